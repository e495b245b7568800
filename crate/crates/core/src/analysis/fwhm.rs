use crate::absorption::AbsorptionMap;
use crate::error::{Error, Result};

use super::peaks::Peak;

/// Map values along `axis` through the refined peak, blending the two grid
/// lines that straddle the peak's transverse coordinate.
fn slice(map: &AbsorptionMap, peak: &Peak, axis: char) -> (Vec<f64>, Vec<f64>) {
    let g = &map.grid;
    let (n, m, across, start, step) = match axis {
        'x' => (g.nx, g.ny, peak.y, g.ymin, g.dy()),
        _ => (g.ny, g.nx, peak.x, g.xmin, g.dx()),
    };
    let s = ((across - start) / step).clamp(0.0, (m - 1) as f64);
    let lo = (s.floor() as usize).min(m.saturating_sub(2));
    let t = if m > 1 { s - lo as f64 } else { 0.0 };
    let hi = (lo + 1).min(m - 1);
    let at = |k: usize, l: usize| if axis == 'x' { map.get(k, l) } else { map.get(l, k) };
    let coords = (0..n).map(|k| if axis == 'x' { g.x(k) } else { g.y(k) }).collect();
    let values = (0..n).map(|k| (1.0 - t) * at(k, lo) + t * at(k, hi)).collect();
    (coords, values)
}

fn crossing(coords: &[f64], values: &[f64], from: usize, half: f64, dir: i64) -> Option<f64> {
    let mut k = from as i64;
    loop {
        let next = k + dir;
        if next < 0 || next as usize >= values.len() {
            return None;
        }
        let (a, b) = (values[k as usize], values[next as usize]);
        if b < half {
            let t = if a == b { 0.0 } else { (a - half) / (a - b) };
            let (xa, xb) = (coords[k as usize], coords[next as usize]);
            return Some(xa + t.clamp(0.0, 1.0) * (xb - xa));
        }
        k = next;
    }
}

fn width(map: &AbsorptionMap, peak: &Peak, axis: char) -> Result<f64> {
    let (coords, values) = slice(map, peak, axis);
    let half = peak.height / 2.0;
    let from = if axis == 'x' { peak.i } else { peak.j };
    let left = crossing(&coords, &values, from, half, -1);
    let right = crossing(&coords, &values, from, half, 1);
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::HalfLevelNotBracketed { axis }),
    }
}

/// Full widths at half the peak height along x and y, measured on straight
/// slices through the refined peak. Both half-level crossings must lie
/// inside the window.
pub fn fwhm_diameters(map: &AbsorptionMap, peak: &Peak) -> Result<(f64, f64)> {
    Ok((width(map, peak, 'x')?, width(map, peak, 'y')?))
}
