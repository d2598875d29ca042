// Copyright 2026 The fraclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Sets of mesh cells stored as runs along the last axis.

use rustc_hash::FxHashMap;

use crate::ifs::net::{Prim, MAX_DIM};

type Prefix = [i64; MAX_DIM - 1];

/// Union of half-open mesh cells of side `2^{-m}`, anchored at `origin`.
#[derive(Debug)]
pub(crate) struct CellRuns {
    dim: usize,
    scale: f64,
    origin: [f64; MAX_DIM],
    columns: FxHashMap<Prefix, Column>,
}

#[derive(Debug, Default)]
struct Column {
    runs: Vec<(i64, i64)>,
    settled: usize,
}

impl Column {
    fn push(&mut self, lo: i64, hi: i64) {
        self.runs.push((lo, hi));
        if self.runs.len() >= 2 * self.settled + 32 {
            self.compact();
        }
    }

    fn compact(&mut self) {
        self.runs.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(self.runs.len());
        for &(lo, hi) in &self.runs {
            match out.last_mut() {
                Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        self.runs = out;
        self.settled = self.runs.len();
    }

    fn cells(&mut self) -> u64 {
        self.compact();
        self.runs.iter().map(|&(lo, hi)| (hi - lo + 1) as u64).sum()
    }
}

impl CellRuns {
    pub fn new(dim: usize, m: u32, origin: &[f64]) -> Self {
        let mut o = [0.0; MAX_DIM];
        o[..dim].copy_from_slice(&origin[..dim]);
        CellRuns {
            dim,
            scale: (m as f64).exp2(),
            origin: o,
            columns: FxHashMap::default(),
        }
    }

    #[inline]
    fn coord(&self, x: f64, j: usize) -> f64 {
        (x - self.origin[j]) * self.scale
    }

    #[inline]
    fn cell_of(&self, p: &[f64; MAX_DIM]) -> [i64; MAX_DIM] {
        let mut c = [0i64; MAX_DIM];
        for (j, cj) in c.iter_mut().enumerate().take(self.dim) {
            *cj = self.coord(p[j], j).floor() as i64;
        }
        c
    }

    fn split(&self, c: &[i64; MAX_DIM]) -> (Prefix, i64) {
        let mut prefix = [0i64; MAX_DIM - 1];
        let last = self.dim - 1;
        prefix[..last].copy_from_slice(&c[..last]);
        (prefix, c[last])
    }

    fn add_cell(&mut self, c: &[i64; MAX_DIM]) {
        let (prefix, z) = self.split(c);
        self.columns.entry(prefix).or_default().push(z, z);
    }

    #[cfg(test)]
    pub fn add_point(&mut self, p: &[f64; MAX_DIM]) {
        let c = self.cell_of(p);
        self.add_cell(&c);
    }

    /// Adds every cell the closed segment meets.
    pub fn add_prim(&mut self, p: &Prim) {
        let ca = self.cell_of(&p.a);
        if p.a == p.b {
            self.add_cell(&ca);
            return;
        }
        let cb = self.cell_of(&p.b);
        let (pa, za) = self.split(&ca);
        let (pb, zb) = self.split(&cb);
        if pa == pb {
            self.columns
                .entry(pa)
                .or_default()
                .push(za.min(zb), za.max(zb));
            return;
        }
        // General position: cut at every grid crossing and take the cell of
        // each crossing point and of each piece between crossings.
        let mut ts: Vec<f64> = vec![0.0, 1.0];
        for j in 0..self.dim {
            let (u, v) = (self.coord(p.a[j], j), self.coord(p.b[j], j));
            if u == v {
                continue;
            }
            let (lo, hi) = (u.min(v).floor() as i64 + 1, u.max(v).ceil() as i64 - 1);
            for k in lo..=hi {
                let t = (k as f64 - u) / (v - u);
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
            // Crossings that coincide with an endpoint are already covered.
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let at = |t: f64| {
            let mut q = [0.0; MAX_DIM];
            for j in 0..MAX_DIM {
                q[j] = p.a[j] + t * (p.b[j] - p.a[j]);
            }
            q
        };
        self.add_cell(&ca);
        self.add_cell(&cb);
        for w in ts.windows(2) {
            let c = self.cell_of(&at(0.5 * (w[0] + w[1])));
            self.add_cell(&c);
            let c = self.cell_of(&at(w[1]));
            self.add_cell(&c);
        }
    }

    pub fn count(&mut self) -> u64 {
        self.columns.values_mut().map(Column::cells).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: [f64; 2], b: [f64; 2]) -> Prim {
        Prim::from_slices(&a, &b)
    }

    #[test]
    fn vertical_segment_is_one_run() {
        let mut r = CellRuns::new(2, 3, &[0.0, 0.0]);
        r.add_prim(&seg([0.1, 0.0], [0.1, 1.0]));
        assert_eq!(r.count(), 9);
        r.add_prim(&seg([0.1, 0.25], [0.1, 0.5]));
        assert_eq!(r.count(), 9);
    }

    #[test]
    fn horizontal_segment_touches_each_column() {
        let mut r = CellRuns::new(2, 2, &[0.0, 0.0]);
        r.add_prim(&seg([0.0, 0.1], [1.0, 0.1]));
        assert_eq!(r.count(), 5);
    }

    #[test]
    fn diagonal_through_corners() {
        // From (0,0) to (1,1) at m = 1: cells (0,0), (1,1), (2,2) only.
        let mut r = CellRuns::new(2, 1, &[0.0, 0.0]);
        r.add_prim(&seg([0.0, 0.0], [1.0, 1.0]));
        assert_eq!(r.count(), 3);
        // The anti-diagonal passes the corner (1/2, 1/2) whose cell is (1,1).
        let mut r = CellRuns::new(2, 1, &[0.0, 0.0]);
        r.add_prim(&seg([0.1, 0.9], [0.9, 0.1]));
        assert_eq!(r.count(), 3);
    }

    #[test]
    fn generic_segment_matches_dense_sampling() {
        let s = seg([0.013, 0.2], [0.77, 0.61]);
        let mut r = CellRuns::new(2, 5, &[0.0, 0.0]);
        r.add_prim(&s);
        let mut cells = std::collections::BTreeSet::new();
        for k in 0..=200_000 {
            let t = k as f64 / 200_000.0;
            let x = s.a[0] + t * (s.b[0] - s.a[0]);
            let y = s.a[1] + t * (s.b[1] - s.a[1]);
            cells.insert(((x * 32.0).floor() as i64, (y * 32.0).floor() as i64));
        }
        assert_eq!(r.count(), cells.len() as u64);
    }
}
