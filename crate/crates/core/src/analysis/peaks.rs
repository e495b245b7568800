use serde::Serialize;

use crate::absorption::AbsorptionMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    /// Refined location.
    pub x: f64,
    pub y: f64,
    /// Refined height, never below the node value.
    pub height: f64,
    /// Node the peak was detected at.
    pub i: usize,
    pub j: usize,
    /// Height above the highest saddle connecting it to a taller peak
    /// (or above the map minimum for the tallest peak).
    pub prominence: f64,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut k: usize) -> usize {
        while self.parent[k] != k {
            self.parent[k] = self.parent[self.parent[k]];
            k = self.parent[k];
        }
        k
    }
}

fn neighbors(i: usize, j: usize, nx: usize, ny: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1i64..=1)
        .flat_map(move |di| (-1i64..=1).map(move |dj| (di, dj)))
        .filter(|&(di, dj)| di != 0 || dj != 0)
        .filter_map(move |(di, dj)| {
            let a = i as i64 + di;
            let b = j as i64 + dj;
            (a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < ny).then_some((a as usize, b as usize))
        })
}

/// Topographic prominence of every component-founding node, by descending
/// flood fill with union-find over 8-connected neighbors.
fn prominences(map: &AbsorptionMap) -> Vec<f64> {
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    let v = &map.values;
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &k) in order.iter().enumerate() {
        rank[k] = r;
    }

    // Each root is the first (tallest) node of its component, so it is
    // also that component's summit.
    let mut sets = DisjointSet::new(n);
    let mut seen = vec![false; n];
    let mut prom = vec![f64::NAN; n];

    for &k in &order {
        let (i, j) = (k / ny, k % ny);
        let mut roots: Vec<usize> = neighbors(i, j, nx, ny)
            .map(|(a, b)| a * ny + b)
            .filter(|&q| seen[q])
            .map(|q| sets.find(q))
            .collect();
        roots.sort_by_key(|&r| rank[r]);
        roots.dedup();
        seen[k] = true;
        let Some(&keep) = roots.first() else {
            continue;
        };
        for &other in &roots[1..] {
            prom[other] = v[other] - v[k];
            sets.parent[other] = keep;
        }
        sets.parent[k] = keep;
    }
    if n > 0 {
        let top = order[0];
        prom[top] = v[top] - v[order[n - 1]];
    }
    prom
}

/// Strict interior 8-neighbor maxima with prominence ≥ `min_prominence`,
/// refined by a least-squares quadratic on the 3×3 neighborhood, tallest first.
pub fn find_peaks(map: &AbsorptionMap, min_prominence: f64) -> Vec<Peak> {
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    if nx < 3 || ny < 3 {
        return Vec::new();
    }
    let prom = prominences(map);
    let mut out = Vec::new();
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let c = map.get(i, j);
            if !neighbors(i, j, nx, ny).all(|(a, b)| map.get(a, b) < c) {
                continue;
            }
            let p = prom[i * ny + j];
            if p >= min_prominence {
                out.push(refine(map, i, j, p));
            }
        }
    }
    out.sort_by(|a, b| b.height.total_cmp(&a.height).then((a.i, a.j).cmp(&(b.i, b.j))));
    out
}

fn refine(map: &AbsorptionMap, i: usize, j: usize, prominence: f64) -> Peak {
    let f = |di: i64, dj: i64| map.get((i as i64 + di) as usize, (j as i64 + dj) as usize);
    let col_mean = |di: i64| (f(di, -1) + f(di, 0) + f(di, 1)) / 3.0;
    let row_mean = |dj: i64| (f(-1, dj) + f(0, dj) + f(1, dj)) / 3.0;
    let mean: f64 = (-1..=1).map(col_mean).sum::<f64>() / 3.0;

    // f ≈ c0 + bx·u + by·v + hxx·u² + hxy·u·v + hyy·v² in node units.
    let bx = (col_mean(1) - col_mean(-1)) / 2.0;
    let by = (row_mean(1) - row_mean(-1)) / 2.0;
    let hxx = (col_mean(1) + col_mean(-1) - 2.0 * col_mean(0)) / 2.0;
    let hyy = (row_mean(1) + row_mean(-1) - 2.0 * row_mean(0)) / 2.0;
    let hxy = (f(1, 1) + f(-1, -1) - f(1, -1) - f(-1, 1)) / 4.0;
    let c0 = mean - 2.0 / 3.0 * (hxx + hyy);

    let node = map.get(i, j);
    let det = 4.0 * hxx * hyy - hxy * hxy;
    let (mut u, mut v) = (0.0, 0.0);
    if hxx < 0.0 && det > 0.0 {
        let su = (-2.0 * hyy * bx + hxy * by) / det;
        let sv = (-2.0 * hxx * by + hxy * bx) / det;
        if su.abs() <= 1.0 && sv.abs() <= 1.0 {
            u = su;
            v = sv;
        }
    }
    let fitted = c0 + bx * u + by * v + hxx * u * u + hxy * u * v + hyy * v * v;
    let g = &map.grid;
    Peak {
        x: g.x(i) + u * g.dx(),
        y: g.y(j) + v * g.dy(),
        height: if u == 0.0 && v == 0.0 { node } else { fitted.max(node) },
        i,
        j,
        prominence,
    }
}
