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

//! Rotation orbits on the unit sphere and the attractor built from them.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::boxcount::{count_boxes, estimate_dimension, CountCurve, DimensionEstimate};
use crate::ifs::{CloudMeta, PointCloud};
use crate::{Error, Result};

/// Dedup mesh exponent for orbit points.
pub const ORBIT_MESH: i32 = 20;

/// Default cap on generated orbit images.
pub const ORBIT_BUDGET: usize = 50_000_000;

const ORTHO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RotationSet {
    generators: Vec<DMatrix<f64>>,
    include_inverses: bool,
}

impl RotationSet {
    pub fn new(generators: Vec<DMatrix<f64>>, include_inverses: bool) -> Result<Self> {
        let d = match generators.first() {
            Some(g) => g.nrows(),
            None => return Err(Error::domain("a rotation set needs at least one generator")),
        };
        if d == 0 || d > 3 {
            return Err(Error::domain(format!("rotations of dimension {d} are not supported")));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.nrows() != d || g.ncols() != d {
                return Err(Error::domain(format!("generator {i} is not {d}x{d}")));
            }
            let err = (g.transpose() * g - DMatrix::<f64>::identity(d, d)).amax();
            if err > ORTHO_TOL {
                return Err(Error::domain(format!("generator {i} is not orthogonal (error {err:e})")));
            }
            let det = g.determinant();
            if (det - 1.0).abs() > ORTHO_TOL {
                return Err(Error::domain(format!("generator {i} has determinant {det}")));
            }
        }
        Ok(RotationSet {
            generators,
            include_inverses,
        })
    }

    /// Rotations by `arccos(3/5)` about the x and z axes, with inverses.
    pub fn default_pair() -> Self {
        let (c, s) = (0.6, 0.8);
        let rx = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c]);
        let rz = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        RotationSet::new(vec![rx, rz], true).expect("rational rotations")
    }

    /// Rotations about the z axis by `arccos(3/5)` and `arccos(5/13)`, with
    /// inverses. Their orbits stay on a circle.
    pub fn commuting_pair() -> Self {
        let rz = |c: f64, s: f64| DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        RotationSet::new(vec![rz(0.6, 0.8), rz(5.0 / 13.0, 12.0 / 13.0)], true).expect("rational rotations")
    }

    pub fn identity(d: usize) -> Self {
        RotationSet::new(vec![DMatrix::identity(d, d)], false).expect("identity")
    }

    pub fn with_inverses(mut self, include: bool) -> Self {
        self.include_inverses = include;
        self
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn include_inverses(&self) -> bool {
        self.include_inverses
    }

    pub fn dimension(&self) -> usize {
        self.generators[0].nrows()
    }

    /// Generators followed by their inverses when included.
    pub fn alphabet(&self) -> Vec<DMatrix<f64>> {
        let mut out = self.generators.clone();
        if self.include_inverses {
            out.extend(self.generators.iter().map(|g| g.transpose()));
        }
        out
    }
}

type Key = [i64; 3];

fn key(p: &[f64], inv: f64) -> Key {
    let mut k = [0i64; 3];
    for (slot, v) in k.iter_mut().zip(p) {
        *slot = (v * inv).floor() as i64;
    }
    k
}

fn check_unit(rot: &RotationSet, x: &[f64]) -> Result<()> {
    if x.len() != rot.dimension() {
        return Err(Error::domain(format!(
            "x has {} coordinates, rotations act on R^{}",
            x.len(),
            rot.dimension()
        )));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("x has norm {norm}, expected 1")));
    }
    Ok(())
}

/// One orbit step: all images of `points` under `alphabet`, deduplicated on a
/// mesh of side `1/inv`, first occurrence kept, sorted by cell.
fn step(points: &[Vec<f64>], alphabet: &[DMatrix<f64>], inv: f64) -> Vec<Vec<f64>> {
    let images: Vec<(Key, Vec<f64>)> = points
        .par_iter()
        .flat_map_iter(|p| {
            let v = DVector::from_column_slice(p);
            alphabet.iter().map(move |g| {
                let q: Vec<f64> = (g * &v).iter().copied().collect();
                (key(&q, inv), q)
            })
        })
        .collect();
    let mut seen: FxHashMap<Key, Vec<f64>> = FxHashMap::default();
    for (k, q) in images {
        seen.entry(k).or_insert(q);
    }
    let mut out: Vec<(Key, Vec<f64>)> = seen.into_iter().collect();
    out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, q)| q).collect()
}

struct Orbit {
    alphabet: Vec<DMatrix<f64>>,
    budget: usize,
    spent: usize,
}

impl Orbit {
    fn new(rot: &RotationSet) -> Self {
        Orbit {
            alphabet: rot.alphabet(),
            budget: ORBIT_BUDGET,
            spent: 0,
        }
    }

    fn advance(&mut self, level: &[Vec<f64>], inv: f64) -> Result<Vec<Vec<f64>>> {
        self.spent += level.len() * self.alphabet.len();
        if self.spent > self.budget {
            return Err(Error::budget("orbit images", self.budget));
        }
        Ok(step(level, &self.alphabet, inv))
    }
}

fn cloud_of(dim: usize, points: &[Vec<f64>], source: &str) -> Result<PointCloud> {
    let mut cloud = PointCloud::with_meta(
        dim,
        CloudMeta {
            resolution: (-(ORBIT_MESH as f64)).exp2(),
            depth: 0,
            source: source.into(),
        },
    );
    for p in points {
        cloud.push(p)?;
    }
    Ok(cloud)
}

/// The orbit `G^n(x)`, deduplicated on a mesh of side `2^-20`.
pub fn orbit(rot: &RotationSet, x: &[f64], n: usize) -> Result<PointCloud> {
    check_unit(rot, x)?;
    let inv = (ORBIT_MESH as f64).exp2();
    let mut walk = Orbit::new(rot);
    let mut level = vec![x.to_vec()];
    for _ in 0..n {
        level = walk.advance(&level, inv)?;
    }
    let mut cloud = cloud_of(rot.dimension(), &level, "rotation orbit")?;
    cloud.meta.depth = n;
    Ok(cloud)
}

/// Area of the unit sphere in `R^d`.
fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitCounts {
    pub m: u32,
    /// Box counts of `G^n(x)` for `n = 0..=n_max`.
    pub counts: Vec<u64>,
    pub epsilon_hat: f64,
    /// Rough number of mesh cells meeting the sphere.
    pub capacity: f64,
    /// First `n` whose count reaches a quarter of the capacity.
    pub saturation: Option<usize>,
    /// Levels used by the growth fit.
    pub fit_range: (usize, usize),
}

impl OrbitCounts {
    /// `n,count,log2count`.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "n,count,log2count")?;
        for (n, c) in self.counts.iter().enumerate() {
            writeln!(w, "{n},{c},{:.6}", (*c as f64).log2())?;
        }
        Ok(())
    }
}

/// Fit `ln N(n) ≈ a + n ln(1+ε) + p ln(n+1)` over `range`; falls back to a plain
/// exponential fit when fewer than four levels are available.
pub fn fit_growth(counts: &[u64], range: (usize, usize)) -> f64 {
    let (lo, hi) = (range.0.max(1), range.1.min(counts.len().saturating_sub(1)));
    if hi <= lo {
        return 0.0;
    }
    let rows: Vec<(f64, f64)> = (lo..=hi).map(|n| (n as f64, (counts[n] as f64).ln())).collect();
    let rate = if rows.len() >= 4 {
        let x = DMatrix::from_fn(rows.len(), 3, |i, j| match j {
            0 => 1.0,
            1 => rows[i].0,
            _ => (rows[i].0 + 1.0).ln(),
        });
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        match x.svd(true, true).solve(&y, 1e-12) {
            Ok(beta) => beta[1],
            Err(_) => 0.0,
        }
    } else {
        crate::boxcount::least_squares(&rows).0
    };
    rate.exp() - 1.0
}

pub fn orbit_counts(rot: &RotationSet, x: &[f64], n_max: usize, m: u32) -> Result<OrbitCounts> {
    check_unit(rot, x)?;
    let d = rot.dimension();
    let inv = (ORBIT_MESH as f64).exp2();
    let origin = vec![0.0; d];
    let mut walk = Orbit::new(rot);
    let mut level = vec![x.to_vec()];
    let mut counts = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            level = walk.advance(&level, inv)?;
        }
        counts.push(count_boxes(&cloud_of(d, &level, "rotation orbit")?, m, &origin)?);
    }
    let delta = (-(m as f64)).exp2();
    let capacity = sphere_area(d) * delta.powi(-(d as i32 - 1));
    let saturation = (1..counts.len()).find(|&n| counts[n] as f64 >= capacity / 4.0);
    let fit_range = (1, saturation.map_or(n_max, |s| s.saturating_sub(1)));
    Ok(OrbitCounts {
        m,
        epsilon_hat: fit_growth(&counts, fit_range),
        counts,
        capacity,
        saturation,
        fit_range,
    })
}

/// `(d−1) ln(1/c) / (ln(1+ε) − (d−1) ln c)`.
pub fn alpha_of(c: f64, epsilon: f64, d: usize) -> f64 {
    let k = (d as f64 - 1.0).max(0.0);
    let num = k * (1.0 / c).ln();
    let den = (1.0 + epsilon).ln() - k * c.ln();
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

#[derive(Clone, Debug)]
pub struct SgAttractor {
    pub cloud: PointCloud,
    pub curve: CountCurve,
    pub estimate: DimensionEstimate,
    pub epsilon_hat: f64,
    pub alpha: f64,
    /// `(1 − α(c))(d − 1)`.
    pub target: f64,
    pub levels: usize,
}

/// Levels of the orbit used to fit the growth rate for the target.
const TARGET_FIT_LEVELS: usize = 8;

/// The attractor `{0} ∪ ⋃ c^n G^n(x)` sampled at mesh `2^-m`.
///
/// Level `n` of the orbit is thinned on a mesh of side `2^-(m+2) / c^n`, so
/// every scaled level is kept to a quarter of the counting mesh. Thinning
/// keeps genuine orbit points, so the sample is a subset of the attractor.
pub fn sg_attractor(c: f64, rot: &RotationSet, x: &[f64], m: u32) -> Result<SgAttractor> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain(format!("c = {c} is outside (0, 1)")));
    }
    check_unit(rot, x)?;
    if !(1..=24).contains(&m) {
        return Err(Error::domain(format!("mesh exponent {m} is outside [1, 24]")));
    }
    let d = rot.dimension();
    let fine = (-((m + 2) as f64)).exp2();
    let global_inv = 1.0 / fine;
    let mut walk = Orbit::new(rot);
    let mut seen: FxHashSet<Key> = FxHashSet::default();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut keep = |p: Vec<f64>| {
        if seen.insert(key(&p, global_inv)) {
            points.push(p);
        }
    };
    keep(vec![0.0; d]);
    keep(x.to_vec());
    let mut level = vec![x.to_vec()];
    let mut scale = 1.0;
    let mut n = 0usize;
    // Past `c^n < fine` every point lands in the cells around the origin.
    while scale >= fine / 8.0 {
        n += 1;
        scale *= c;
        level = walk.advance(&level, scale / fine)?;
        for p in &level {
            keep(p.iter().map(|v| v * scale).collect());
        }
    }
    let mut cloud = cloud_of(d, &points, "sphere attractor")?;
    cloud.meta.resolution = fine;
    cloud.meta.depth = n;
    let lo = m.saturating_sub(4).max(1);
    let ms: Vec<u32> = (lo..=m).collect();
    let origin = vec![0.0; d];
    let mut curve = CountCurve::new(origin.clone(), "sphere attractor");
    for &k in &ms {
        curve.entries.insert(k, count_boxes(&cloud, k, &origin)?);
    }
    let estimate = estimate_dimension(&curve, (lo, m))?;
    let fit_m = m.min(6);
    let epsilon_hat = orbit_counts(rot, x, TARGET_FIT_LEVELS, fit_m)?.epsilon_hat.max(0.0);
    let alpha = alpha_of(c, epsilon_hat, d);
    Ok(SgAttractor {
        cloud,
        curve,
        estimate,
        epsilon_hat,
        alpha,
        target: (1.0 - alpha) * (d as f64 - 1.0),
        levels: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const E1: [f64; 3] = [1.0, 0.0, 0.0];

    #[test]
    fn rotation_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(RotationSet::new(vec![bad], false).is_err());
        let reflection = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(RotationSet::new(vec![reflection], false).is_err());
        let rot = RotationSet::default_pair();
        assert_eq!(rot.alphabet().len(), 4);
        assert_eq!(rot.clone().with_inverses(false).alphabet().len(), 2);
        for g in rot.alphabet() {
            assert!((g.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_examples() {
        let rot = RotationSet::default_pair();
        assert_eq!(orbit(&rot, &E1, 0).unwrap().len(), 1);
        let two = orbit(&rot, &E1, 2).unwrap();
        assert!(two.len() > 1 && two.len() <= 16, "{}", two.len());
        let id = RotationSet::identity(3);
        assert_eq!(orbit(&id, &E1, 5).unwrap().len(), 1);
        assert!(matches!(orbit(&rot, &[0.0, 0.0, 0.0], 1), Err(Error::Domain(_))));
        for p in orbit(&rot, &E1, 6).unwrap().points() {
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 6e-12);
        }
    }

    #[test]
    fn orbit_nesting() {
        let rot = RotationSet::default_pair();
        for n in 0..4 {
            let small = orbit(&rot, &E1, n).unwrap();
            let big = orbit(&rot, &E1, n + 2).unwrap();
            for p in small.points() {
                let near = big
                    .points()
                    .any(|q| p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-5);
                assert!(near, "n = {n}");
            }
        }
    }

    #[test]
    fn orbit_budget() {
        let rot = RotationSet::default_pair();
        let mut walk = Orbit::new(&rot);
        walk.budget = 10;
        let level = vec![E1.to_vec(); 3];
        assert!(matches!(walk.advance(&level, 1.0), Err(Error::Budget { .. })));
    }

    #[test]
    fn growth_examples() {
        let id = orbit_counts(&RotationSet::identity(3), &E1, 6, 6).unwrap();
        assert!(id.counts.iter().all(|&c| c == 1));
        assert!(id.epsilon_hat.abs() < 1e-9);
        let free = orbit_counts(&RotationSet::default_pair(), &E1, 8, 6).unwrap();
        assert!(free.counts[1..].windows(2).all(|w| w[0] < w[1]), "{:?}", free.counts);
        assert!(free.epsilon_hat > 0.2, "{free:?}");
        let flat = orbit_counts(&RotationSet::commuting_pair(), &E1, 8, 6).unwrap();
        assert!(flat.epsilon_hat < 0.05, "{flat:?}");
        assert!(flat.counts.iter().all(|&c| c as f64 <= 2.0 * PI * 64.0 * 2.0));
        let mut csv = Vec::new();
        id.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("n,count,log2count\n0,1,0.000000\n"));
    }

    #[test]
    fn polynomial_growth_fits_zero_rate() {
        let counts: Vec<u64> = (0..10u64).map(|n| (n + 1) * (n + 1)).collect();
        assert!(fit_growth(&counts, (1, 9)).abs() < 1e-9);
        let counts: Vec<u64> = (0..10u32).map(|n| 3u64.pow(n)).collect();
        assert!((fit_growth(&counts, (1, 9)) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_limits() {
        assert!(alpha_of(0.999, 2.0, 3) < 0.01);
        assert!(alpha_of(0.5, 2.0, 3) > 0.5);
        assert_eq!(alpha_of(0.5, 0.0, 3), 1.0);
    }

    #[test]
    fn ray_attractor_is_thin() {
        let sg = sg_attractor(0.5, &RotationSet::identity(3), &E1, 7).unwrap();
        for p in sg.cloud.points() {
            assert!(p[1] == 0.0 && p[2] == 0.0);
        }
        assert!(sg.estimate.slope < 0.4, "{:?}", sg.estimate);
        assert!(matches!(
            sg_attractor(0.5, &RotationSet::identity(3), &[0.0; 3], 5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn attractor_self_covering() {
        let rot = RotationSet::default_pair();
        let c = 0.6;
        let m = 5;
        let sg = sg_attractor(c, &rot, &E1, m).unwrap();
        let tol = (-(m as f64)).exp2();
        let pts: Vec<Vec<f64>> = sg.cloud.points().map(|p| p.to_vec()).collect();
        let images: Vec<Vec<f64>> = rot
            .alphabet()
            .iter()
            .flat_map(|g| {
                pts.iter().map(move |p| {
                    (g * DVector::from_column_slice(p) * c).iter().copied().collect::<Vec<f64>>()
                })
            })
            .collect();
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        for q in &pts {
            if dist(q, &E1) < 1e-15 || q.iter().all(|v| *v == 0.0) {
                continue;
            }
            assert!(images.iter().any(|i| dist(i, q) <= tol), "{q:?}");
        }
    }
}
