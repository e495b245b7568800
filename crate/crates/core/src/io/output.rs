//! Deterministic artifact writers. Every file is written to a temporary in the
//! target directory and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::absorption::AbsorptionMap;
use crate::analysis::ContourSet;
use crate::error::{Error, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Shortest representation is not used on purpose: every value carries 17
/// significant digits so files are uniform and round-trip exactly.
fn num(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").unwrap();
}

pub fn map_csv(map: &AbsorptionMap) -> String {
    let g = &map.grid;
    let mut out = String::with_capacity(16 + g.len() * 72);
    out.push_str("x,y,chi_im\n");
    for i in 0..g.nx {
        for j in 0..g.ny {
            num(&mut out, g.x(i));
            out.push(',');
            num(&mut out, g.y(j));
            out.push(',');
            num(&mut out, map.get(i, j));
            out.push('\n');
        }
    }
    out
}

/// Header `x,y,chi_im`, one row per node with x outer and y inner.
pub fn write_map_csv(map: &AbsorptionMap, path: &Path) -> Result<()> {
    write_atomic(path, map_csv(map).as_bytes())
}

/// Parses a file produced by [`write_map_csv`] back into `(x, y, chi_im)` rows.
pub fn read_map_csv(path: &Path) -> Result<Vec<[f64; 3]>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some("x,y,chi_im") {
        return Err(Error::Parse(format!("{}: missing header x,y,chi_im", path.display())));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let fields: Vec<f64> = line
                .split(',')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{} line {}: {e}", path.display(), k + 2)))?;
            <[f64; 3]>::try_from(fields)
                .map_err(|_| Error::Parse(format!("{} line {}: expected 3 fields", path.display(), k + 2)))
        })
        .collect()
}

/// Columns `level,polyline,vertex,x,y`; closed polylines repeat their first vertex.
pub fn contours_csv(sets: &[ContourSet]) -> String {
    let mut out = String::from("level,polyline,vertex,x,y\n");
    for set in sets {
        for (k, line) in set.polylines.iter().enumerate() {
            for (v, p) in line.vertices.iter().enumerate() {
                num(&mut out, set.level);
                write!(out, ",{k},{v},").unwrap();
                num(&mut out, p[0]);
                out.push(',');
                num(&mut out, p[1]);
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_contours_csv(sets: &[ContourSet], path: &Path) -> Result<()> {
    write_atomic(path, contours_csv(sets).as_bytes())
}

/// Binary P5 graymap, one pixel per node. Raster row `j` holds y_j (ymin
/// first, as in the CSV) and column `i` holds x_i, so a map symmetric under
/// x ↔ y gives a raster equal to its own transpose. Values map linearly from
/// [min, max] onto [0, 255].
///
/// A constant map cannot be scaled; it renders as uniform 128 and the
/// returned bytes come with `Some(Error::DegenerateRange)` as a note.
pub fn heatmap_pgm(map: &AbsorptionMap) -> (Vec<u8>, Option<Error>) {
    let g = &map.grid;
    let (lo, hi) = (map.min(), map.max());
    let mut out = format!("P5 {} {} 255\n", g.nx, g.ny).into_bytes();
    out.reserve(g.len());
    let degenerate = !(hi > lo);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let px = if degenerate {
                128
            } else {
                (255.0 * (map.get(i, j) - lo) / (hi - lo)).round().clamp(0.0, 255.0) as u8
            };
            out.push(px);
        }
    }
    let note = degenerate.then_some(Error::DegenerateRange { value: lo });
    (out, note)
}

/// Writes the raster; a degenerate range still writes the mid-gray file and
/// reports the note back to the caller.
pub fn render_heatmap(map: &AbsorptionMap, path: &Path) -> Result<Option<Error>> {
    let (bytes, note) = heatmap_pgm(map);
    write_atomic(path, &bytes)?;
    Ok(note)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_atomic(path, to_json(value).as_bytes())
}
