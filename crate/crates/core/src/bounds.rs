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

//! Closed-form dimension bounds for inhomogeneous self-similar sets.
//!
//! With `s` the similarity dimension, `α` the dimension of `F_∅`, `β` the
//! upper box dimension of `C`, `γ` the growth exponent of distinct linear
//! parts and `d` the ambient dimension, the upper box dimension of `F_C` is
//! at most `max_{x∈[0,1]} min{ℓ_1(x), …, ℓ_4(x)}` with
//!
//! * `ℓ_1 = x s + (1−x) β`
//! * `ℓ_2 = x α + (1−x) d`
//! * `ℓ_3 = α + (1−x)(β + d − 1)`
//! * `ℓ_4 = α + x γ + (1−x) β`

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::boxcount::least_squares;
use crate::ifs::{IfsSystem, SCALE_EPS};
use crate::overlap::{reduced_words, Mode};
use crate::{Error, Result};

const BISECT_TOL: f64 = 1e-12;

/// Solves `Σ c_i^s = 1` by bisection.
pub fn similarity_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::domain("similarity dimension needs at least one ratio"));
    }
    if let Some(c) = ratios.iter().find(|&&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::domain(format!("ratio {c} is not in (0, 1)")));
    }
    let f = |s: f64| ratios.iter().map(|c| c.powf(s)).sum::<f64>() - 1.0;
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    Ok(bisect(f, 0.0, hi))
}

/// Root of a decreasing function on `[lo, hi]` with `f(lo) ≥ 0 ≥ f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) <= 0.0 {
        return lo;
    }
    while hi - lo > BISECT_TOL * hi.max(1.0) * 1e-3 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInputs {
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d: u32,
}

impl BoundInputs {
    pub fn new(s: f64, alpha: f64, beta: f64, gamma: f64, d: u32) -> Result<Self> {
        let inp = BoundInputs {
            s,
            alpha,
            beta,
            gamma,
            d,
        };
        inp.validate()?;
        Ok(inp)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d as f64;
        let all = [self.s, self.alpha, self.beta, self.gamma];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain("s, alpha, beta and gamma must be finite and >= 0"));
        }
        if self.d == 0 {
            return Err(Error::domain("d must be positive"));
        }
        if self.alpha > self.s.min(d) {
            return Err(Error::domain("alpha must not exceed min(s, d)"));
        }
        if self.gamma > self.s {
            return Err(Error::domain("gamma must not exceed s"));
        }
        if self.beta > d {
            return Err(Error::domain("beta must not exceed d"));
        }
        Ok(())
    }
}

/// The affine function `x ↦ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub slope: f64,
    pub intercept: f64,
}

impl Term {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn envelope_terms(inp: &BoundInputs) -> [Term; 4] {
    let BoundInputs {
        s,
        alpha: a,
        beta: b,
        gamma: g,
        d,
    } = *inp;
    let d = d as f64;
    [
        Term {
            slope: s - b,
            intercept: b,
        },
        Term {
            slope: a - d,
            intercept: d,
        },
        Term {
            slope: -(b + d - 1.0),
            intercept: a + b + d - 1.0,
        },
        Term {
            slope: g - b,
            intercept: a + b,
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxMinResult {
    pub value: f64,
    pub argmax_x: f64,
    /// 1-based indices of the terms attaining the minimum at `argmax_x`.
    pub active_terms: Vec<usize>,
    /// Candidate points examined: the endpoints and pairwise crossings.
    pub breakpoints: Vec<f64>,
}

/// `max_x min_k ℓ_k(x)` over all four terms.
pub fn thm1_bound(inp: &BoundInputs) -> Result<MaxMinResult> {
    thm1_bound_restricted(inp, &[1, 2, 3, 4])
}

/// As [`thm1_bound`] with only the listed (1-based) terms.
pub fn thm1_bound_restricted(inp: &BoundInputs, which: &[usize]) -> Result<MaxMinResult> {
    inp.validate()?;
    if which.is_empty() || which.iter().any(|&k| !(1..=4).contains(&k)) {
        return Err(Error::domain("term indices must be in 1..=4"));
    }
    let all = envelope_terms(inp);
    let terms: Vec<Term> = which.iter().map(|&k| all[k - 1]).collect();
    Ok(max_min(&terms, which))
}

fn max_min(terms: &[Term], labels: &[usize]) -> MaxMinResult {
    let lower = |x: f64| terms.iter().map(|t| t.at(x)).fold(f64::INFINITY, f64::min);
    let mut xs = vec![0.0, 1.0];
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            if a.slope != b.slope {
                let x = (b.intercept - a.intercept) / (a.slope - b.slope);
                if (0.0..=1.0).contains(&x) {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let best = xs.iter().map(|&x| lower(x)).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1.0);
    let argmax_x = xs
        .iter()
        .copied()
        .find(|&x| lower(x) >= best - tol)
        .unwrap_or(0.0);
    let value = lower(argmax_x);
    let active_terms = terms
        .iter()
        .zip(labels)
        .filter(|(t, _)| t.at(argmax_x) <= value + tol)
        .map(|(_, &k)| k)
        .collect();
    MaxMinResult {
        value,
        argmax_x,
        active_terms,
        breakpoints: xs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corollary {
    /// Commuting orthogonal parts (`γ = 0`).
    Cor2,
    /// Singleton condensation (`β = 0`).
    Cor3,
    /// Singleton condensation and a common fixed point (`α = β = 0`).
    Cor4,
}

impl Corollary {
    /// Terms whose restricted max–min equals the closed form.
    pub fn terms(&self) -> &'static [usize] {
        match self {
            Corollary::Cor2 => &[1, 4],
            Corollary::Cor3 | Corollary::Cor4 => &[1, 2, 3],
        }
    }
}

impl fmt::Display for Corollary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corollary::Cor2 => "cor2",
            Corollary::Cor3 => "cor3",
            Corollary::Cor4 => "cor4",
        })
    }
}

impl std::str::FromStr for Corollary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cor2" => Ok(Corollary::Cor2),
            "cor3" => Ok(Corollary::Cor3),
            "cor4" => Ok(Corollary::Cor4),
            _ => Err(Error::Parse(format!("unknown corollary {s:?}"))),
        }
    }
}

pub fn corollary_bound(which: Corollary, inp: &BoundInputs) -> Result<f64> {
    inp.validate()?;
    let BoundInputs {
        s,
        alpha: a,
        beta: b,
        gamma: g,
        d,
    } = *inp;
    let d = d as f64;
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("{which} requires {what}")))
        }
    };
    match which {
        Corollary::Cor2 => {
            need(g == 0.0, "gamma = 0")?;
            let drop = if a * b == 0.0 { 0.0 } else { a * b / s };
            Ok(b.max(a + b - drop))
        }
        Corollary::Cor3 => {
            need(b == 0.0, "beta = 0")?;
            if s == 0.0 {
                return Ok(0.0);
            }
            let dp = d.min(a + d - 1.0);
            Ok(dp / (1.0 + (dp - a) / s))
        }
        Corollary::Cor4 => {
            need(a == 0.0 && b == 0.0, "alpha = 0 and beta = 0")?;
            if s == 0.0 {
                return Ok(0.0);
            }
            Ok((d - 1.0) / (1.0 + (d - 1.0) / s))
        }
    }
}

/// The bracket `[max(α, β), max(s, β)]`.
pub fn classical_sandwich(s: f64, alpha: f64, beta: f64) -> (f64, f64) {
    (alpha.max(beta), s.max(beta))
}

/// Similarity dimension of the stopping set at `r` after identifying words
/// with equal maps. Bisection on `[0, d + s + 1]`.
pub fn alpha_r(system: &IfsSystem, r: f64, mode: Mode) -> Result<f64> {
    let reps = reduced_words(system, r, mode)?;
    let ratios: Vec<f64> = reps
        .iter()
        .map(|w| {
            w.indices()
                .iter()
                .map(|&i| system.maps()[i as usize].scale())
                .product()
        })
        .collect();
    let s = similarity_dimension(&system.ratios())?;
    let f = |a: f64| ratios.iter().map(|c: &f64| c.powf(a)).sum::<f64>() - 1.0;
    Ok(bisect(f, 0.0, system.dimension() as f64 + s + 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModifiedDimension {
    /// `(r, α(r))` in schedule order.
    pub values: Vec<(f64, f64)>,
    /// Last computed `α(r)`.
    pub s_star: f64,
    /// Whether the sequence is nonincreasing (within 1e-9).
    pub monotone: bool,
    /// Set when the schedule was cut short by an enumeration budget.
    pub truncated: bool,
}

pub fn modified_similarity_dimension(
    system: &IfsSystem,
    r_schedule: &[f64],
    mode: Mode,
) -> Result<ModifiedDimension> {
    if r_schedule.is_empty() || r_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("r schedule must be nonempty and strictly decreasing"));
    }
    let mut values = Vec::new();
    let mut truncated = false;
    for &r in r_schedule {
        match alpha_r(system, r, mode) {
            Ok(a) => values.push((r, a)),
            Err(Error::Budget { .. }) if !values.is_empty() => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let monotone = values.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
    Ok(ModifiedDimension {
        s_star: values.last().map(|v| v.1).unwrap_or(f64::NAN),
        values,
        monotone,
        truncated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaEstimate {
    /// `(k, |{T_I : I ∈ 𝓘_k}|)`.
    pub counts: Vec<(u32, usize)>,
    /// `count^{1/k}` for `k ≥ 1`.
    pub roots: Vec<(u32, f64)>,
    /// Slope of `log2 count` against `k` over `k ≥ 4` (or all `k ≥ 1` when
    /// fewer than three such levels exist). An estimate, not `γ` itself.
    pub gamma_hat: f64,
}

/// Distinct linear parts `T_I = c_I M_I` per scale band `k ≤ k_max`.
pub fn gamma_estimate(system: &IfsSystem, k_max: u32, budget: usize) -> Result<GammaEstimate> {
    let d = system.dimension();
    let floor = 0.5f64.powi(k_max as i32 + 1) * (1.0 + SCALE_EPS);
    let key = |scale: f64, m: &[f64]| -> Vec<i64> {
        std::iter::once(scale.log2())
            .chain(m.iter().copied())
            .map(|v| (v * 1e9).round() as i64)
            .collect()
    };
    let letters: Vec<(f64, Vec<f64>)> = system
        .maps()
        .iter()
        .map(|m| (m.scale(), m.orthogonal().transpose().as_slice().to_vec()))
        .collect();
    let mut per_band: Vec<FxHashMap<Vec<i64>, ()>> = vec![FxHashMap::default(); k_max as usize + 1];
    let mut frontier: Vec<(f64, Vec<f64>)> = vec![(1.0, identity(d))];
    let mut seen_total = 0usize;
    while !frontier.is_empty() {
        let mut next: FxHashMap<Vec<i64>, (f64, Vec<f64>)> = FxHashMap::default();
        for (c, m) in &frontier {
            for (ci, mi) in &letters {
                let scale = c * ci;
                if scale <= floor {
                    continue;
                }
                let prod = matmul(m, mi, d);
                next.entry(key(scale, &prod)).or_insert((scale, prod));
            }
        }
        seen_total += next.len();
        if seen_total > budget {
            return Err(Error::budget("distinct linear parts", budget));
        }
        for (k, (scale, _)) in &next {
            let band = band_of(*scale);
            if band <= k_max {
                per_band[band as usize].insert(k.clone(), ());
            }
        }
        let mut v: Vec<(f64, Vec<f64>)> = next.into_values().collect();
        v.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| a.1.iter().zip(&b.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
        });
        frontier = v;
    }
    let counts: Vec<(u32, usize)> = per_band
        .iter()
        .enumerate()
        .map(|(k, s)| (k as u32, s.len()))
        .collect();
    let roots = counts
        .iter()
        .filter(|(k, _)| *k >= 1)
        .map(|&(k, n)| (k, (n as f64).powf(1.0 / k as f64)))
        .collect();
    let fit_from = |lo: u32| -> Vec<(f64, f64)> {
        counts
            .iter()
            .filter(|(k, n)| *k >= lo && *n > 0)
            .map(|&(k, n)| (k as f64, (n as f64).log2()))
            .collect()
    };
    let mut pts = fit_from(4);
    if pts.len() < 3 {
        pts = fit_from(1);
    }
    let gamma_hat = if pts.len() >= 2 {
        least_squares(&pts).0.max(0.0)
    } else {
        0.0
    };
    Ok(GammaEstimate {
        counts,
        roots,
        gamma_hat,
    })
}

/// `k` with `2^{-k-1} < c ≤ 2^{-k}`.
fn band_of(c: f64) -> u32 {
    let mut k = (-c.log2()).floor().max(0.0) as u32;
    let hi = |k: u32| 0.5f64.powi(k as i32) * (1.0 + SCALE_EPS);
    while c > hi(k) && k > 0 {
        k -= 1;
    }
    while c <= hi(k + 1) {
        k += 1;
    }
    k
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}
