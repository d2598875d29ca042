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

//! Half-open dyadic box counting and log-log regression.
//!
//! `N(m)` is the number of cubes `∏[a_j, a_j + 2^{-m})` of the mesh anchored
//! at `origin` that meet a set.

mod runs;
mod svg;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::ifs::net::NetSpec;
use crate::ifs::{PointCloud, PresetSystem};
use crate::{Error, Result};

pub(crate) use runs::CellRuns;
pub use svg::{render_svg, SVG_SIZE};

/// Cells of the `2^{-m}` mesh holding at least one point.
pub fn count_boxes(cloud: &PointCloud, m: u32, origin: &[f64]) -> Result<u64> {
    if cloud.is_empty() {
        return Err(Error::domain("cannot count boxes of an empty cloud"));
    }
    let d = cloud.dim();
    if origin.len() != d {
        return Err(Error::domain(format!(
            "origin has dimension {}, cloud has {d}",
            origin.len()
        )));
    }
    let s = (m as f64).exp2();
    let mut keys: Vec<[i64; 3]> = cloud
        .points()
        .map(|p| {
            let mut k = [0i64; 3];
            for j in 0..d.min(3) {
                k[j] = ((p[j] - origin[j]) * s).floor() as i64;
            }
            k
        })
        .collect();
    if d > 3 {
        return Err(Error::domain("box counting supports d <= 3"));
    }
    keys.sort_unstable();
    keys.dedup();
    Ok(keys.len() as u64)
}

/// Counts `N(m)` per mesh exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct CountCurve {
    pub entries: BTreeMap<u32, u64>,
    pub origin: Vec<f64>,
    pub source: String,
    /// Per-scale provenance (for example the net depth used).
    pub notes: BTreeMap<u32, String>,
    /// Set when finer scales were dropped after a resource limit.
    pub truncated: bool,
}

impl CountCurve {
    pub fn new(origin: Vec<f64>, source: impl Into<String>) -> Self {
        CountCurve {
            entries: BTreeMap::new(),
            origin,
            source: source.into(),
            notes: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (u32, u64)>) -> Self {
        let mut c = CountCurve::new(vec![], "synthetic");
        c.entries.extend(counts);
        c
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: u32) -> Option<u64> {
        self.entries.get(&m).copied()
    }

    /// Mesh exponents present, ascending.
    pub fn scales(&self) -> Vec<u32> {
        self.entries.keys().copied().collect()
    }

    /// Default regression window: drops the two coarsest scales and the
    /// finest one when at least six scales are available.
    pub fn default_window(&self) -> Option<(u32, u32)> {
        let ms = self.scales();
        match ms.len() {
            0..=2 => None,
            3..=5 => Some((ms[0], ms[ms.len() - 1])),
            n => Some((ms[2], ms[n - 2])),
        }
    }

    /// `m,delta,count,log2count`, one row per scale.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "m,delta,count,log2count")?;
        for (&m, &n) in &self.entries {
            writeln!(
                w,
                "{m},{:e},{n},{:.6}",
                (-(m as f64)).exp2(),
                (n as f64).log2()
            )?;
        }
        Ok(())
    }
}

/// What to count: a fixed cloud or a system regenerated per scale.
#[derive(Clone, Copy, Debug)]
pub enum CountSource<'a> {
    Cloud(&'a PointCloud),
    System(&'a PresetSystem),
}

#[derive(Clone, Debug, Default)]
pub struct CurveOptions {
    /// Generate the net again at `δ = 2^{-m}` for every scale. Otherwise one
    /// net at the finest scale serves all scales.
    pub delta_matching: bool,
    pub origin: Option<Vec<f64>>,
    /// Replaces the merge grid side with `merge_factor · δ`.
    pub merge_factor: Option<f64>,
}

impl CurveOptions {
    pub fn matching() -> Self {
        CurveOptions {
            delta_matching: true,
            ..Default::default()
        }
    }
}

fn spec_for(system: &PresetSystem, delta: f64, opts: &CurveOptions) -> Result<NetSpec> {
    let spec = system.net_spec(delta)?;
    Ok(match opts.merge_factor {
        Some(f) => spec.with_merge(f * delta),
        None => spec,
    })
}

/// Box counts of the set at one scale, by rasterising the net primitives.
fn count_system_at(
    system: &PresetSystem,
    m: u32,
    origin: &[f64],
    opts: &CurveOptions,
) -> Result<(u64, String)> {
    let delta = (-(m as f64)).exp2();
    let spec = spec_for(system, delta, opts)?;
    let mut cells = CellRuns::new(system.dimension(), m, origin);
    let stats = spec.run(|_, level| {
        for p in level {
            cells.add_prim(p);
        }
        Ok(())
    })?;
    Ok((
        cells.count(),
        format!("net depth {} widest level {}", stats.levels, stats.widest),
    ))
}

/// One net at the finest scale, rasterised at every scale.
fn count_system_single_pass(
    system: &PresetSystem,
    ms: &[u32],
    origin: &[f64],
    opts: &CurveOptions,
) -> Result<Vec<(u32, u64, String)>> {
    let finest = *ms.last().expect("nonempty");
    let spec = spec_for(system, (-(finest as f64)).exp2(), opts)?;
    let mut grids: Vec<CellRuns> = ms
        .iter()
        .map(|&m| CellRuns::new(system.dimension(), m, origin))
        .collect();
    let stats = spec.run(|_, level| {
        for p in level {
            for g in grids.iter_mut() {
                g.add_prim(p);
            }
        }
        Ok(())
    })?;
    let note = format!("single net at m={finest}, depth {}", stats.levels);
    Ok(ms
        .iter()
        .zip(grids.iter_mut())
        .map(|(&m, g)| (m, g.count(), note.clone()))
        .collect())
}

/// Count curve over the given ascending scales.
pub fn count_curve(source: CountSource<'_>, ms: &[u32], opts: &CurveOptions) -> Result<CountCurve> {
    if ms.is_empty() || ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("scales must be nonempty and strictly ascending"));
    }
    if ms[ms.len() - 1] > 40 {
        return Err(Error::domain("mesh exponents above 40 are not supported"));
    }
    match source {
        CountSource::Cloud(cloud) => {
            let origin = opts.origin.clone().unwrap_or_else(|| vec![0.0; cloud.dim()]);
            let mut curve = CountCurve::new(origin.clone(), "point cloud");
            for &m in ms {
                curve.entries.insert(m, count_boxes(cloud, m, &origin)?);
            }
            Ok(curve)
        }
        CountSource::System(system) => {
            let d = system.dimension();
            let origin = opts.origin.clone().unwrap_or_else(|| vec![0.0; d]);
            if origin.len() != d {
                return Err(Error::domain("origin dimension does not match the system"));
            }
            let mut curve = CountCurve::new(origin.clone(), "system net");
            let results: Vec<Result<(u32, u64, String)>> = if opts.delta_matching {
                ms.par_iter()
                    .map(|&m| count_system_at(system, m, &origin, opts).map(|(n, s)| (m, n, s)))
                    .collect()
            } else {
                match count_system_single_pass(system, ms, &origin, opts) {
                    Ok(v) => v.into_iter().map(Ok).collect(),
                    Err(e) => vec![Err(e)],
                }
            };
            for r in results {
                match r {
                    Ok((m, n, note)) => {
                        curve.entries.insert(m, n);
                        curve.notes.insert(m, note);
                    }
                    Err(Error::Budget { .. }) if !curve.entries.is_empty() => {
                        curve.truncated = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(curve)
        }
    }
}

/// Least-squares line through `(m, log2 N(m))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub window: (u32, u32),
    pub residual_max: f64,
}

pub fn estimate_dimension(curve: &CountCurve, window: (u32, u32)) -> Result<DimensionEstimate> {
    let (lo, hi) = window;
    if lo >= hi {
        return Err(Error::domain(format!("degenerate window [{lo}, {hi}]")));
    }
    let pts: Vec<(f64, f64)> = curve
        .entries
        .range(lo..=hi)
        .map(|(&m, &n)| (m as f64, (n as f64).log2()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::domain(format!(
            "window [{lo}, {hi}] holds {} scales, need at least 3",
            pts.len()
        )));
    }
    let (slope, intercept) = least_squares(&pts);
    let residual_max = pts
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(DimensionEstimate {
        slope,
        intercept,
        window,
        residual_max,
    })
}

pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Fit of `(log2 N(m)/m − dim)·m` to a constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub constant: f64,
    /// Largest `|(log2 N(m)/m − dim)·m|` over the curve.
    pub max_deviation: f64,
    /// Largest distance of a sample from the fitted constant.
    pub residual_max: f64,
}

pub fn fit_rate(curve: &CountCurve, dim_limit: f64) -> Result<RateFit> {
    let vals: Vec<f64> = curve
        .entries
        .iter()
        .filter(|(&m, _)| m > 0)
        .map(|(&m, &n)| (n as f64).log2() - dim_limit * m as f64)
        .collect();
    if vals.len() < 5 {
        return Err(Error::domain("rate fit needs at least 5 positive scales"));
    }
    let constant = vals.iter().sum::<f64>() / vals.len() as f64;
    Ok(RateFit {
        constant,
        max_deviation: vals.iter().map(|v| v.abs()).fold(0.0, f64::max),
        residual_max: vals.iter().map(|v| (v - constant).abs()).fold(0.0, f64::max),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinkowskiCheck {
    pub holds: bool,
    pub count_sum: u64,
    pub count_x: u64,
    pub count_y: u64,
    /// `2^d · N(X) · N(Y)`.
    pub bound: u64,
}

/// Compares `N(X + Y)` with `2^d N(X) N(Y)` at mesh `2^{-m}`.
pub fn minkowski_sum_check(x: &PointCloud, y: &PointCloud, m: u32) -> Result<MinkowskiCheck> {
    let d = x.dim();
    if y.dim() != d {
        return Err(Error::domain("clouds must share a dimension"));
    }
    let mut sum = PointCloud::new(d);
    let mut buf = vec![0.0; d];
    for p in x.points() {
        for q in y.points() {
            for j in 0..d {
                buf[j] = p[j] + q[j];
            }
            sum.push(&buf)?;
        }
    }
    let origin = vec![0.0; d];
    let count_sum = count_boxes(&sum, m, &origin)?;
    let count_x = count_boxes(x, m, &origin)?;
    let count_y = count_boxes(y, m, &origin)?;
    let bound = (1u64 << d) * count_x * count_y;
    Ok(MinkowskiCheck {
        holds: count_sum <= bound,
        count_sum,
        count_x,
        count_y,
        bound,
    })
}

/// Counts for a plain point set, used by modules that hold raw points.
#[cfg(test)]
pub(crate) fn count_points<'a>(
    dim: usize,
    points: impl Iterator<Item = &'a [f64]>,
    m: u32,
) -> u64 {
    let mut cells = CellRuns::new(dim, m, &vec![0.0; dim]);
    for p in points {
        cells.add_point(&crate::ifs::net::embed(p));
    }
    cells.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Lambda;
    use crate::ifs::{preset, PresetName, PresetParams};
    use proptest::prelude::*;

    fn segment_cloud(m: u32) -> PointCloud {
        let n = 1u32 << m;
        let pts: Vec<Vec<f64>> = (0..=n).map(|k| vec![k as f64 / n as f64, 0.0]).collect();
        PointCloud::from_points(2, &pts).unwrap()
    }

    #[test]
    fn count_examples() {
        let one = PointCloud::from_points(2, &[vec![0.3, 0.4]]).unwrap();
        for m in 0..10 {
            assert_eq!(count_boxes(&one, m, &[0.0, 0.0]).unwrap(), 1);
        }
        // The right endpoint 1 opens a new half-open cell.
        for m in 4..=10 {
            assert_eq!(count_boxes(&segment_cloud(m), m, &[0.0, 0.0]).unwrap(), (1 << m) + 1);
        }
        let corners = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(count_boxes(&corners, 0, &[0.0, 0.0]).unwrap(), 2);
        assert!(count_boxes(&PointCloud::new(2), 3, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn curve_on_segment() {
        let cloud = segment_cloud(10);
        let ms: Vec<u32> = (4..=10).collect();
        let curve = count_curve(CountSource::Cloud(&cloud), &ms, &CurveOptions::default()).unwrap();
        for m in 4..=10 {
            assert_eq!(curve.get(m), Some((1 << m) + 1));
        }
        let est = estimate_dimension(&curve, (4, 10)).unwrap();
        assert!((0.98..=1.0).contains(&est.slope), "{est:?}");
    }

    #[test]
    fn synthetic_slopes_and_rates() {
        let exact = CountCurve::from_counts((6..=15).map(|m| (m, (1.5 * m as f64).exp2() as u64)));
        let est = estimate_dimension(&exact, (6, 15)).unwrap();
        assert!((est.slope - 1.5).abs() < 1e-3);
        let pure = CountCurve::from_counts((2..=20).step_by(2).map(|m| (m, 1u64 << (3 * m / 2))));
        assert!((estimate_dimension(&pure, (2, 20)).unwrap().slope - 1.5).abs() < 1e-9);

        let shifted = CountCurve::from_counts((6..=16).step_by(2).map(|m| (m, 1u64 << (3 * m / 2 + 3))));
        let rate = fit_rate(&shifted, 1.5).unwrap();
        assert!((rate.constant - 3.0).abs() < 1e-9);
        let flat = CountCurve::from_counts((1..=8).map(|m| (m, 5)));
        let rate = fit_rate(&flat, 0.0).unwrap();
        assert!((rate.constant - 5f64.log2()).abs() < 1e-12);
        assert!(rate.residual_max < 1e-12);
        assert!(estimate_dimension(&flat, (3, 3)).is_err());
        assert!(estimate_dimension(&flat, (20, 30)).is_err());
    }

    #[test]
    fn constant_count_rate_is_zero() {
        let one = CountCurve::from_counts((1..=8).map(|m| (m, 1)));
        let rate = fit_rate(&one, 0.0).unwrap();
        assert_eq!(rate.constant, 0.0);
    }

    #[test]
    fn csv_format() {
        let curve = CountCurve::from_counts([(3, 8), (4, 17)]);
        let mut out = Vec::new();
        curve.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "m,delta,count,log2count\n3,1.25e-1,8,3.000000\n4,6.25e-2,17,4.087463\n");
    }

    #[test]
    fn minkowski_examples() {
        let p = PointCloud::from_points(2, &[vec![0.1, 0.2]]).unwrap();
        let r = minkowski_sum_check(&p, &p, 4).unwrap();
        assert!(r.holds && r.count_sum == 1 && r.bound == 4);
        let xs: Vec<Vec<f64>> = (0..=64).map(|k| vec![k as f64 / 64.0, 0.0]).collect();
        let ys: Vec<Vec<f64>> = (0..=64).map(|k| vec![0.0, k as f64 / 64.0]).collect();
        let x = PointCloud::from_points(2, &xs).unwrap();
        let y = PointCloud::from_points(2, &ys).unwrap();
        let r = minkowski_sum_check(&x, &y, 5).unwrap();
        assert!(r.holds);
        assert_eq!(r.count_sum, 33 * 33);
        assert!(r.count_sum <= 4 * 33 * 33);
    }

    #[test]
    fn dyadic_comb_counts() {
        // λ = 1/2: no overlaps, the set is a comb of dimension 1.
        let sys = preset(PresetName::BernoulliComb, &PresetParams::with_lambda(Lambda::real(0.5))).unwrap();
        let ms: Vec<u32> = (3..=9).collect();
        let curve = count_curve(CountSource::System(&sys), &ms, &CurveOptions::matching()).unwrap();
        let est = estimate_dimension(&curve, (3, 9)).unwrap();
        assert!((est.slope - 1.0).abs() < 0.15, "slope {}", est.slope);
        let single = count_curve(CountSource::System(&sys), &ms, &CurveOptions::default()).unwrap();
        for m in ms {
            let (a, b) = (curve.get(m).unwrap() as f64, single.get(m).unwrap() as f64);
            assert!((a / b - 1.0).abs() < 0.1, "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn count_points_agrees_with_count_boxes() {
        let c = PointCloud::from_points(3, &[vec![0.1, 0.2, 0.3], vec![0.1, 0.2, 0.31], vec![0.9, 0.0, 0.0]]).unwrap();
        for m in 0..8 {
            assert_eq!(count_points(3, c.points(), m), count_boxes(&c, m, &[0.0; 3]).unwrap());
        }
    }

    fn cloud_strategy(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, d), 1..60)
    }

    proptest! {
        #[test]
        fn mesh_refinement(pts in cloud_strategy(2), m in 0u32..10) {
            let c = PointCloud::from_points(2, &pts).unwrap();
            let a = count_boxes(&c, m, &[0.0, 0.0]).unwrap();
            let b = count_boxes(&c, m + 1, &[0.0, 0.0]).unwrap();
            prop_assert!(a <= b && b <= 4 * a);
        }

        #[test]
        fn subset_monotone(pts in cloud_strategy(3), k in 1usize..60, m in 0u32..8) {
            let all = PointCloud::from_points(3, &pts).unwrap();
            let part = PointCloud::from_points(3, &pts[..k.min(pts.len())]).unwrap();
            prop_assert!(count_boxes(&part, m, &[0.0; 3]).unwrap() <= count_boxes(&all, m, &[0.0; 3]).unwrap());
        }

        #[test]
        fn translation_covariance(pts in cloud_strategy(2), sx in -3i32..3, sy in -3i32..3, m in 0u32..8) {
            // Shifts by whole mesh cells keep floating point exact.
            let v = [sx as f64 * 0.5, sy as f64 * 0.25];
            let c = PointCloud::from_points(2, &pts).unwrap();
            let moved = c.translated(&v);
            prop_assert_eq!(count_boxes(&c, m, &[0.0, 0.0]).unwrap(), count_boxes(&moved, m, &v).unwrap());
        }

        #[test]
        fn minkowski_inequality(xs in cloud_strategy(1), ys in cloud_strategy(1), m in 0u32..9) {
            let x = PointCloud::from_points(1, &xs).unwrap();
            let y = PointCloud::from_points(1, &ys).unwrap();
            prop_assert!(minkowski_sum_check(&x, &y, m).unwrap().holds);
        }
    }
}
