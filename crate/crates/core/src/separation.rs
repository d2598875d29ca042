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

//! Sum sets of Bernoulli convolutions, their gaps and separation counts.
//!
//! `A_n(λ) = {(1−λ) Σ i_k λ^(k−1) : i ∈ {0,1}^n}`. Words are stored as bit
//! masks with `i_1` in bit 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::boxcount::{count_curve, estimate_dimension, CountSource, CurveOptions};
use crate::exact::{FieldElem, Lambda};
use crate::ifs::{preset, PresetName, PresetParams, Word};
use crate::{Error, Result};

pub const DEFAULT_DEDUP_TOL: f64 = 1e-12;

/// Largest `n` whose sum set is held in memory.
pub const SUM_SET_MAX_N: usize = 24;

/// Largest `n` for streamed gap and separation statistics.
pub const STREAM_MAX_N: usize = 30;

/// Largest `n` for exact arithmetic.
pub const EXACT_MAX_N: usize = 20;

pub const DEFAULT_SEED: u64 = 0xF1D0;

/// Decodes a bit mask into a word of length `n`.
pub fn word_of(bits: u32, n: usize) -> Word {
    Word((0..n).map(|k| (bits >> k & 1) as u8).collect())
}

/// The value of a word, summed with compensation.
pub fn word_value(lambda: f64, bits: u32, n: usize) -> f64 {
    kahan((0..n).filter(|k| bits >> k & 1 == 1).map(|k| (1.0 - lambda) * lambda.powi(k as i32)))
}

fn kahan(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda = {lambda} is outside (0, 1)")))
    }
}

fn check_n(n: usize, max: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if n > max {
        return Err(Error::budget(what, max));
    }
    Ok(())
}

/// Both halves of the sum set: low words over the first `h` letters and
/// high words over the rest, scaled by `λ^h`.
struct Halves {
    low: Vec<(f64, u32)>,
    high: Vec<(f64, u32)>,
}

impl Halves {
    fn new(lambda: f64, n: usize) -> Self {
        let h = n / 2;
        let shift = lambda.powi(h as i32);
        let mut low: Vec<(f64, u32)> = (0..1u32 << h).map(|a| (word_value(lambda, a, h), a)).collect();
        low.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let high = (0..1u32 << (n - h))
            .map(|b| (shift * word_value(lambda, b, n - h), b << h))
            .collect();
        Halves { low, high }
    }

    /// Every sum in `[lo, hi)`, sorted by value then word.
    fn range(&self, lo: f64, hi: f64) -> Vec<(f64, u32)> {
        let slack = 1e-9;
        let mut out: Vec<(f64, u32)> = self
            .high
            .par_iter()
            .flat_map_iter(|&(hv, hb)| {
                let start = self.low.partition_point(|p| p.0 < lo - hv - slack);
                self.low[start..]
                    .iter()
                    .take_while(move |p| p.0 < hi - hv + slack)
                    .map(move |&(lv, la)| (lv + hv, la | hb))
                    .filter(move |p| p.0 >= lo && p.0 < hi)
            })
            .collect();
        out.par_sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        out
    }
}

/// Visits all `2^n` sums in ascending order, in chunks of at most `2^24`.
fn for_each_sorted(lambda: f64, n: usize, mut f: impl FnMut(f64, u32)) {
    let halves = Halves::new(lambda, n);
    let chunks = 1usize << n.saturating_sub(SUM_SET_MAX_N);
    for i in 0..chunks {
        let lo = if i == 0 { f64::NEG_INFINITY } else { i as f64 / chunks as f64 };
        let hi = if i + 1 == chunks { f64::INFINITY } else { (i + 1) as f64 / chunks as f64 };
        for (v, w) in halves.range(lo, hi) {
            f(v, w);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumSet {
    pub lambda: f64,
    pub n: usize,
    /// Distinct sums, ascending.
    pub values: Vec<f64>,
    /// A word reproducing each value.
    pub words: Vec<u32>,
}

impl SumSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn threshold(&self, s: f64) -> f64 {
        s * (-(self.n as f64)).exp2()
    }

    /// Ordered pairs `a ≠ b` with `|a − b| ≤ s 2^-n`.
    pub fn r2_count(&self, s: f64) -> u64 {
        let t = self.threshold(s);
        let v = &self.values;
        let mut j = 0usize;
        let mut pairs = 0u64;
        for i in 0..v.len() {
            if j < i + 1 {
                j = i + 1;
            }
            while j < v.len() && v[j] - v[i] <= t {
                j += 1;
            }
            pairs += (j - i - 1) as u64;
        }
        2 * pairs
    }

    /// Elements with another element within `s 2^-n`.
    pub fn t_count(&self, s: f64) -> u64 {
        let t = self.threshold(s);
        let v = &self.values;
        (0..v.len())
            .filter(|&i| (i > 0 && v[i] - v[i - 1] <= t) || (i + 1 < v.len() && v[i + 1] - v[i] <= t))
            .count() as u64
    }

    /// Elements farther than `kappa / (n² 2^n)` from every other element.
    pub fn well_separated_count(&self, kappa: f64) -> u64 {
        let t = kappa / (self.n * self.n) as f64 * (-(self.n as f64)).exp2();
        let v = &self.values;
        (0..v.len())
            .filter(|&i| (i == 0 || v[i] - v[i - 1] > t) && (i + 1 == v.len() || v[i + 1] - v[i] > t))
            .count() as u64
    }
}

/// `A_n(λ)`; sums closer than `dedup_tol` to the previous kept sum merge.
pub fn sum_set(lambda: f64, n: usize, dedup_tol: f64) -> Result<SumSet> {
    check_lambda(lambda)?;
    check_n(n, SUM_SET_MAX_N, "sum set length")?;
    if !(dedup_tol >= 0.0) {
        return Err(Error::domain("dedup tolerance must be nonnegative"));
    }
    let mut set = SumSet {
        lambda,
        n,
        values: Vec::new(),
        words: Vec::new(),
    };
    for_each_sorted(lambda, n, |v, w| {
        if set.values.last().is_some_and(|&p| v - p <= dedup_tol) {
            return;
        }
        set.values.push(v);
        set.words.push(w);
    });
    Ok(set)
}

pub fn r2_count(s: f64, lambda: f64, n: usize) -> Result<u64> {
    Ok(sum_set(lambda, n, DEFAULT_DEDUP_TOL)?.r2_count(s))
}

pub fn t_count(s: f64, lambda: f64, n: usize) -> Result<u64> {
    Ok(sum_set(lambda, n, DEFAULT_DEDUP_TOL)?.t_count(s))
}

/// `A_n(λ)` deduplicated exactly in `Q(λ)`, with colliding word pairs.
#[derive(Clone, Debug)]
pub struct ExactSumSet {
    pub set: SumSet,
    /// Pairs of distinct words with equal sums, first word kept; capped.
    pub collisions: Vec<(Word, Word)>,
}

const MAX_COLLISIONS: usize = 1024;

pub fn sum_set_exact(lambda: &Lambda, n: usize) -> Result<ExactSumSet> {
    let field = lambda.field.as_ref().ok_or_else(|| {
        Error::domain("exact mode needs lambda as a polynomial or fraction")
    })?;
    check_lambda(lambda.value)?;
    check_n(n, EXACT_MAX_N, "exact sum set length")?;
    // Level by level: A_k = A_(k−1) ∪ (A_(k−1) + λ^(k−1)), without the 1−λ factor.
    let mut level: Vec<(FieldElem, u32)> = vec![(field.zero(), 0)];
    let mut index: FxHashMap<FieldElem, u32> = FxHashMap::default();
    index.insert(field.zero(), 0);
    let mut collisions = Vec::new();
    let mut power = field.one();
    for k in 0..n {
        let mut next = level.clone();
        for (e, w) in &level {
            let sum = field.add(e, &power);
            let word = w | 1 << k;
            match index.get(&sum) {
                Some(&first) => {
                    if collisions.len() < MAX_COLLISIONS {
                        collisions.push((word_of(first, n), word_of(word, n)));
                    }
                }
                None => {
                    index.insert(sum.clone(), word);
                    next.push((sum, word));
                }
            }
        }
        level = next;
        power = field.mul(&power, &field.generator());
    }
    let l = lambda.value;
    let mut pairs: Vec<(f64, u32)> = level.iter().map(|&(_, w)| (word_value(l, w, n), w)).collect();
    pairs.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    Ok(ExactSumSet {
        set: SumSet {
            lambda: l,
            n,
            values: pairs.iter().map(|p| p.0).collect(),
            words: pairs.iter().map(|p| p.1).collect(),
        },
        collisions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub n: usize,
    /// Zero when two words collide within the dedup tolerance.
    pub min_gap: f64,
    pub scaled_gap: f64,
    pub witness: (Vec<u8>, Vec<u8>),
    pub distinct: u64,
    /// Set when `|A_n| < 2^n`.
    pub collision: bool,
    pub well_separated: u64,
}

/// One sorted pass over `A_n(λ)`: minimal gap with witnesses, distinct
/// count and the number of `kappa`-separated elements.
pub fn scan_sum_set(lambda: f64, n: usize, dedup_tol: f64, kappa: f64) -> Result<GapReport> {
    check_lambda(lambda)?;
    check_n(n, STREAM_MAX_N, "streamed sum set length")?;
    let thr = kappa / (n * n) as f64 * (-(n as f64)).exp2();
    let mut prev: Option<(f64, u32)> = None;
    let mut min_gap = f64::INFINITY;
    let mut witness = (0u32, 0u32);
    let mut distinct = 0u64;
    let mut last_rep: Option<f64> = None;
    let mut left_ok = true;
    let mut well = 0u64;
    for_each_sorted(lambda, n, |v, w| {
        if let Some((pv, pw)) = prev {
            if v - pv < min_gap {
                min_gap = v - pv;
                witness = (pw, w);
            }
            if v - pv <= dedup_tol {
                prev = Some((v, w));
                return;
            }
        }
        prev = Some((v, w));
        distinct += 1;
        if let Some(r) = last_rep {
            let gap = v - r;
            if left_ok && gap > thr {
                well += 1;
            }
            left_ok = gap > thr;
        }
        last_rep = Some(v);
    });
    if left_ok && last_rep.is_some() {
        well += 1;
    }
    let collision = distinct < 1u64 << n;
    if min_gap <= dedup_tol {
        min_gap = 0.0;
    }
    Ok(GapReport {
        n,
        min_gap,
        scaled_gap: min_gap * (n as f64).exp2(),
        witness: (word_of(witness.0, n).0, word_of(witness.1, n).0),
        distinct,
        collision,
        well_separated: well,
    })
}

pub fn gap_report(lambda: f64, n: usize) -> Result<GapReport> {
    scan_sum_set(lambda, n, DEFAULT_DEDUP_TOL, 1.0)
}

pub fn well_separated_count(lambda: f64, n: usize, kappa: f64) -> Result<u64> {
    Ok(scan_sum_set(lambda, n, DEFAULT_DEDUP_TOL, kappa)?.well_separated)
}

/// Base points `S_I(0)` over words of length at most `k`. Appending zeros
/// keeps a base point, so this is `A_k(λ)` together with the origin.
pub fn lambda_points(lambda: f64, k: usize) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if k == 0 {
        return Ok(vec![0.0]);
    }
    Ok(sum_set(lambda, k, DEFAULT_DEDUP_TOL)?.values)
}

/// Per-`n` rows `n,count_A,min_gap,scaled_gap,well_separated`.
pub fn separation_table(lambda: f64, n_max: usize, kappa: f64) -> Result<Vec<GapReport>> {
    (1..=n_max)
        .map(|n| scan_sum_set(lambda, n, DEFAULT_DEDUP_TOL, kappa))
        .collect()
}

pub fn write_separation_csv(rows: &[GapReport], mut w: impl std::io::Write) -> Result<()> {
    writeln!(w, "n,count_A,min_gap,scaled_gap,well_separated")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.12e},{:.12e},{}",
            r.n, r.distinct, r.min_gap, r.scaled_gap, r.well_separated
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanOptions {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub kappa: f64,
    /// Number of leading samples that also get a box-dimension estimate.
    pub boxdim_samples: usize,
    pub boxdim_window: (u32, u32),
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            lo: 0.5,
            hi: 0.668,
            samples: 20,
            n_min: 6,
            n_max: 14,
            seed: DEFAULT_SEED,
            kappa: 1.0,
            boxdim_samples: 0,
            boxdim_window: (8, 15),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    /// `log2(4λ)`.
    pub target: f64,
    /// `(n, well-separated count)` for `n_min..=n_max`.
    pub well_separated: Vec<(usize, u64)>,
    pub pass_fraction: f64,
    pub all_pass: bool,
    /// `#R_2(1, λ, n_max) / 2^n_max`.
    pub r2_ratio: f64,
    pub slope: Option<f64>,
}

/// The sampled λ values, in draw order.
pub fn scan_lambdas(opts: &ScanOptions) -> Result<Vec<f64>> {
    if !(opts.lo > 0.0 && opts.lo <= opts.hi && opts.hi < 1.0) {
        return Err(Error::domain(format!(
            "scan interval [{}, {}] is not inside (0, 1)",
            opts.lo, opts.hi
        )));
    }
    if opts.samples == 0 {
        return Err(Error::domain("samples must be positive"));
    }
    if opts.lo == opts.hi {
        return Ok(vec![opts.lo]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    Ok((0..opts.samples).map(|_| rng.random_range(opts.lo..opts.hi)).collect())
}

fn comb_slope(lambda: f64, window: (u32, u32)) -> Result<f64> {
    let system = preset(PresetName::BernoulliComb, &PresetParams::with_lambda(Lambda::real(lambda)))?;
    let ms: Vec<u32> = (window.0..=window.1).collect();
    let curve = count_curve(CountSource::System(&system), &ms, &CurveOptions::default())?;
    Ok(estimate_dimension(&curve, window)?.slope)
}

pub fn monte_carlo_scan(opts: &ScanOptions) -> Result<Vec<ScanRow>> {
    if opts.n_min == 0 || opts.n_min > opts.n_max {
        return Err(Error::domain("need 1 <= n_min <= n_max"));
    }
    check_n(opts.n_max, SUM_SET_MAX_N, "scan depth")?;
    let lambdas = scan_lambdas(opts)?;
    lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let well: Vec<(usize, u64)> = (opts.n_min..=opts.n_max)
                .map(|n| Ok((n, well_separated_count(lambda, n, opts.kappa)?)))
                .collect::<Result<_>>()?;
            let passed = well.iter().filter(|&&(n, c)| c >= 1u64 << (n - 1)).count();
            let r2 = r2_count(1.0, lambda, opts.n_max)? as f64 / (opts.n_max as f64).exp2();
            let slope = if i < opts.boxdim_samples {
                Some(comb_slope(lambda, opts.boxdim_window)?)
            } else {
                None
            };
            Ok(ScanRow {
                lambda,
                target: (4.0 * lambda).log2(),
                pass_fraction: passed as f64 / well.len() as f64,
                all_pass: passed == well.len(),
                well_separated: well,
                r2_ratio: r2,
                slope,
            })
        })
        .collect()
}

pub fn write_scan_csv(rows: &[ScanRow], mut w: impl std::io::Write) -> Result<()> {
    writeln!(w, "lambda,target,pass_fraction,all_pass,r2_ratio,slope")?;
    for r in rows {
        let slope = r.slope.map(|s| format!("{s:.6}")).unwrap_or_default();
        writeln!(
            w,
            "{:.12},{:.6},{:.6},{},{:.6},{}",
            r.lambda, r.target, r.pass_fraction, r.all_pass, r.r2_ratio, slope
        )?;
    }
    Ok(())
}
