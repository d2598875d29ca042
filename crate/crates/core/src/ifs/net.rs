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

//! Breadth-first net generation for contracting affine systems.
//!
//! Level `n` holds the images of level `n-1` under every map. Each level is
//! merged on a grid of side `eta`: primitives whose endpoints share grid
//! cells collapse to the lexicographically smallest member, so the output
//! does not depend on enumeration order. Generation stops once the images
//! of the invariant ball are far below the mesh.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;

use super::{IfsSystem, Similarity};
use crate::{Error, Result};

pub(crate) const MAX_DIM: usize = 3;

pub(crate) type Pt = [f64; MAX_DIM];

/// Default cap on the size of one level.
pub(crate) const MAX_FRONTIER: usize = 1 << 22;

const MAX_LEVELS: usize = 20_000;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Affine {
    lin: [[f64; MAX_DIM]; MAX_DIM],
    b: Pt,
    /// Operator norm bound of the linear part.
    pub norm: f64,
}

impl Affine {
    pub fn from_similarity(s: &Similarity) -> Self {
        let d = s.dimension();
        let mut lin = [[0.0; MAX_DIM]; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for i in 0..d {
            for j in 0..d {
                lin[i][j] = s.scale() * s.orthogonal()[(i, j)];
            }
            b[i] = s.translation()[i];
        }
        Affine {
            lin,
            b,
            norm: s.scale(),
        }
    }

    /// `x ↦ diag(diag)·x + b`.
    pub fn diagonal(diag: &[f64], b: &[f64]) -> Self {
        let mut lin = [[0.0; MAX_DIM]; MAX_DIM];
        let mut t = [0.0; MAX_DIM];
        for (i, (&a, &c)) in diag.iter().zip(b).enumerate() {
            lin[i][i] = a;
            t[i] = c;
        }
        Affine {
            lin,
            b: t,
            norm: diag.iter().fold(0.0f64, |m, a| m.max(a.abs())),
        }
    }

    #[inline]
    pub fn apply(&self, p: &Pt) -> Pt {
        let mut out = self.b;
        for (o, row) in out.iter_mut().zip(&self.lin) {
            *o += row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
        }
        out
    }

    pub fn fixed_point(&self) -> Pt {
        let mut p = [0.0; MAX_DIM];
        for _ in 0..100_000 {
            let q = self.apply(&p);
            let moved = q.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            p = q;
            if moved == 0.0 {
                break;
            }
        }
        p
    }
}

/// A point (`a == b`) or a closed segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Prim {
    pub a: Pt,
    pub b: Pt,
}

impl Prim {
    pub fn point(p: Pt) -> Self {
        Prim { a: p, b: p }
    }

    pub fn from_slices(a: &[f64], b: &[f64]) -> Self {
        Prim {
            a: embed(a),
            b: embed(b),
        }
    }

    fn map(&self, f: &Affine) -> Prim {
        Prim {
            a: f.apply(&self.a),
            b: f.apply(&self.b),
        }
    }

    fn cmp_total(&self, other: &Prim) -> Ordering {
        self.a
            .iter()
            .chain(&self.b)
            .zip(other.a.iter().chain(&other.b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

pub(crate) fn embed(v: &[f64]) -> Pt {
    let mut p = [0.0; MAX_DIM];
    p[..v.len()].copy_from_slice(v);
    p
}

#[cfg(test)]
fn dist(a: &Pt, b: &Pt) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub(crate) struct NetSpec {
    pub dim: usize,
    pub maps: Vec<Affine>,
    pub seeds: Vec<Prim>,
    pub delta: f64,
    pub eta: f64,
    pub levels: usize,
    pub max_frontier: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NetStats {
    pub levels: usize,
    pub primitives: usize,
    pub widest: usize,
}

impl NetSpec {
    /// Net of `F_C` for a system with condensation.
    pub fn for_system(system: &IfsSystem, delta: f64) -> Result<Self> {
        let c = system
            .condensation()
            .ok_or_else(|| Error::domain("the system has no condensation set"))?;
        let seeds = c
            .pieces()
            .iter()
            .map(|(a, b)| Prim::from_slices(a, b))
            .collect();
        Self::build(system, seeds, delta)
    }

    /// Net of `F_∅`, seeded with the fixed point of the first map.
    pub fn for_attractor(system: &IfsSystem, delta: f64) -> Result<Self> {
        let z = system.maps()[0].fixed_point();
        let seeds = vec![Prim::point(embed(z.as_slice()))];
        let bare = system.clone().with_condensation(None)?;
        Self::build(&bare, seeds, delta)
    }

    fn build(system: &IfsSystem, seeds: Vec<Prim>, delta: f64) -> Result<Self> {
        let maps = system.maps().iter().map(Affine::from_similarity).collect();
        let (_, radius) = system.invariant_ball();
        Self::new(system.dimension(), maps, seeds, radius, delta)
    }

    /// `radius` must bound a ball that every map sends into itself and
    /// that contains the seeds.
    pub fn new(
        dim: usize,
        maps: Vec<Affine>,
        seeds: Vec<Prim>,
        radius: f64,
        delta: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("delta = {delta} must be positive")));
        }
        let c = maps.iter().fold(0.0f64, |m, f| m.max(f.norm));
        if !(c < 1.0) {
            return Err(Error::domain("maps must be contractions"));
        }
        let eta = delta * (1.0 - c) / (4.0 * (dim as f64).sqrt());
        let levels = level_cut(c, 2.0 * radius, delta)?;
        Ok(NetSpec {
            dim,
            maps,
            seeds,
            delta,
            eta,
            levels,
            max_frontier: MAX_FRONTIER,
        })
    }

    /// Replaces the merge grid side. Coarser grids are cheaper but drop the
    /// δ/4 drift guarantee.
    pub fn with_merge(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    #[cfg(test)]
    pub fn with_max_frontier(mut self, n: usize) -> Self {
        self.max_frontier = n;
        self
    }

    /// Streams every level to `visit`.
    pub fn run(&self, mut visit: impl FnMut(usize, &[Prim]) -> Result<()>) -> Result<NetStats> {
        let mut stats = NetStats::default();
        let mut frontier = self.merge(self.seeds.iter().copied(), self.seeds.len())?;
        for level in 0..=self.levels {
            if level > 0 {
                let cap = frontier.len() * self.maps.len();
                let images = frontier
                    .iter()
                    .flat_map(|p| self.maps.iter().map(move |f| p.map(f)));
                frontier = self.merge(images, cap)?;
            }
            stats.levels = level;
            stats.primitives += frontier.len();
            stats.widest = stats.widest.max(frontier.len());
            visit(level, &frontier)?;
        }
        Ok(stats)
    }

    fn merge(&self, prims: impl Iterator<Item = Prim>, cap: usize) -> Result<Vec<Prim>> {
        let inv = 1.0 / self.eta;
        let mut index: FxHashMap<[i64; 2 * MAX_DIM], u32> = FxHashMap::default();
        index.reserve(cap.min(self.max_frontier));
        let mut out: Vec<Prim> = Vec::with_capacity(cap.min(self.max_frontier));
        for p in prims {
            let mut key = [0i64; 2 * MAX_DIM];
            for k in 0..MAX_DIM {
                key[k] = (p.a[k] * inv).floor() as i64;
                key[MAX_DIM + k] = (p.b[k] * inv).floor() as i64;
            }
            match index.get(&key) {
                Some(&i) => {
                    let slot = &mut out[i as usize];
                    if p.cmp_total(slot).is_lt() {
                        *slot = p;
                    }
                }
                None => {
                    if out.len() >= self.max_frontier {
                        return Err(Error::budget("net level size", self.max_frontier));
                    }
                    index.insert(key, out.len() as u32);
                    out.push(p);
                }
            }
        }
        Ok(out)
    }
}

/// Smallest `n` with `c^n · diam < delta / 8`.
fn level_cut(c: f64, diam: f64, delta: f64) -> Result<usize> {
    let target = delta / 8.0;
    if diam < target || c == 0.0 {
        return Ok(0);
    }
    let n = ((target / diam).ln() / c.ln()).floor() as usize + 1;
    if n > MAX_LEVELS {
        return Err(Error::budget("net depth", MAX_LEVELS));
    }
    Ok(n)
}

#[cfg(test)]
pub(crate) fn nearest(points: &[Pt], q: &Pt) -> f64 {
    points.iter().map(|p| dist(p, q)).fold(f64::INFINITY, f64::min)
}
