//! Marching-squares iso-lines.
//!
//! A corner is "inside" when its value is ≥ the level. Ambiguous saddle cells
//! are resolved by comparing the mean of the four corners with the level: if
//! the mean is inside, the two inside corners are treated as connected.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::absorption::AbsorptionMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    /// Closed polylines repeat their first vertex at the end.
    pub closed: bool,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

impl ContourSet {
    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.vertices.len()).sum()
    }
}

/// Cell edge identifier: horizontal edges run (i,j)–(i+1,j), vertical (i,j)–(i,j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn crossing(map: &AbsorptionMap, level: f64, e: Edge) -> [f64; 2] {
    let g = &map.grid;
    let (i0, j0, i1, j1) = match e {
        Edge::H(i, j) => (i, j, i + 1, j),
        Edge::V(i, j) => (i, j, i, j + 1),
    };
    let (a, b) = (map.get(i0, j0), map.get(i1, j1));
    let t = if b == a { 0.5 } else { ((level - a) / (b - a)).clamp(0.0, 1.0) };
    let (x0, y0, x1, y1) = (g.x(i0), g.y(j0), g.x(i1), g.y(j1));
    [x0 + t * (x1 - x0), y0 + t * (y1 - y0)]
}

fn cell_segments(map: &AbsorptionMap, level: f64, i: usize, j: usize, out: &mut Vec<(Edge, Edge)>) {
    let bl = map.get(i, j);
    let br = map.get(i + 1, j);
    let tr = map.get(i + 1, j + 1);
    let tl = map.get(i, j + 1);
    let case = (bl >= level) as u8 | ((br >= level) as u8) << 1 | ((tr >= level) as u8) << 2 | ((tl >= level) as u8) << 3;
    let bottom = Edge::H(i, j);
    let top = Edge::H(i, j + 1);
    let left = Edge::V(i, j);
    let right = Edge::V(i + 1, j);
    let center_inside = (bl + br + tr + tl) / 4.0 >= level;
    match case {
        0 | 15 => {}
        1 | 14 => out.push((left, bottom)),
        2 | 13 => out.push((bottom, right)),
        3 | 12 => out.push((left, right)),
        4 | 11 => out.push((right, top)),
        6 | 9 => out.push((bottom, top)),
        7 | 8 => out.push((left, top)),
        5 => {
            if center_inside {
                out.push((bottom, right));
                out.push((top, left));
            } else {
                out.push((left, bottom));
                out.push((right, top));
            }
        }
        10 => {
            if center_inside {
                out.push((left, bottom));
                out.push((right, top));
            } else {
                out.push((bottom, right));
                out.push((top, left));
            }
        }
        _ => unreachable!(),
    }
}

/// Iso-lines of `map` at `level`, joined into polylines. Deterministic:
/// open lines come first, ordered by their starting edge, then closed loops.
pub fn contour_polylines(map: &AbsorptionMap, level: f64) -> ContourSet {
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    let mut segments = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            cell_segments(map, level, i, j, &mut segments);
        }
    }

    let mut incident: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];

    let trace = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
        let mut edges = vec![start_edge];
        let mut seg = start_seg;
        let mut at = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            edges.push(next);
            at = next;
            match incident[&at].iter().copied().find(|&s| !used[s]) {
                Some(s) => seg = s,
                None => break,
            }
        }
        let closed = edges.len() > 2 && edges.first() == edges.last();
        (edges, closed)
    };

    let mut polylines = Vec::new();
    let ends: Vec<(Edge, usize)> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&e, segs)| (e, segs[0]))
        .collect();
    for (edge, seg) in ends {
        if used[seg] {
            continue;
        }
        let (edges, closed) = trace(seg, edge, &mut used);
        polylines.push((edges, closed));
    }
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (edges, closed) = trace(k, segments[k].0, &mut used);
        polylines.push((edges, closed));
    }

    ContourSet {
        level,
        polylines: polylines
            .into_iter()
            .map(|(edges, closed)| Polyline {
                closed,
                vertices: edges.into_iter().map(|e| crossing(map, level, e)).collect(),
            })
            .collect(),
    }
}
