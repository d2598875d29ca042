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

//! Exact overlaps between composed maps and the weak separation margin.
//!
//! Words `I`, `J` are equivalent when `S_I = S_J`. In exact mode equality is
//! decided in `Q(λ)` with rational orthogonal parts; in float mode maps
//! closer than a tolerance on the system's bounding box are identified.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::exact::{ExactSimilarity, ExactSystem};
use crate::ifs::{compose, stopping_set, IfsSystem, Similarity, Word};
use crate::{Error, Result};

/// Default float tolerance.
pub const FLOAT_TOL: f64 = 1e-9;

/// Default cap on enumerated words.
pub const OVERLAP_WORD_BUDGET: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Float(f64),
    Exact,
}

impl Mode {
    fn require_exact<'a>(&self, system: &'a IfsSystem) -> Result<Option<&'a ExactSystem>> {
        match self {
            Mode::Float(tol) if *tol >= 0.0 => Ok(None),
            Mode::Float(tol) => Err(Error::domain(format!("tolerance {tol} is negative"))),
            Mode::Exact => system.exact().map(Some).ok_or_else(|| {
                Error::domain("exact mode needs algebraic data for the system (give lambda as a polynomial or fraction)")
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapPair {
    pub word_a: Vec<u8>,
    pub word_b: Vec<u8>,
    pub map_distance: f64,
}

/// Largest distance between `S x` and `T x` over the corners of `[lo, hi]`.
pub fn map_distance(s: &Similarity, t: &Similarity, lo: &[f64], hi: &[f64]) -> f64 {
    let d = s.dimension();
    let mut best = 0.0f64;
    for mask in 0..(1u32 << d) {
        let x = DVector::from_fn(d, |j, _| if mask >> j & 1 == 1 { hi[j] } else { lo[j] });
        best = best.max((s.apply(&x) - t.apply(&x)).norm());
    }
    best
}

struct Entry {
    word: Word,
    map: Similarity,
    exact: Option<ExactSimilarity>,
}

fn all_words(system: &IfsSystem, max_len: usize, exact: Option<&ExactSystem>) -> Result<Vec<Entry>> {
    let k = system.maps().len();
    let total: f64 = (1..=max_len).map(|n| (k as f64).powi(n as i32)).sum();
    if total > OVERLAP_WORD_BUDGET as f64 {
        return Err(Error::budget("overlap word enumeration", OVERLAP_WORD_BUDGET));
    }
    let mut out: Vec<Entry> = Vec::new();
    let mut level: Vec<Entry> = vec![Entry {
        word: Word::empty(),
        map: Similarity::identity(system.dimension()),
        exact: exact.map(ExactSystem::identity),
    }];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * k);
        for e in &level {
            for (i, m) in system.maps().iter().enumerate() {
                let mut w = e.word.0.clone();
                w.push(i as u8);
                next.push(Entry {
                    word: Word(w),
                    map: e.map.then(m),
                    exact: exact.map(|x| x.then(e.exact.as_ref().expect("exact prefix"), &x.maps[i])),
                });
            }
        }
        out.extend(next.iter().map(|e| Entry {
            word: e.word.clone(),
            map: e.map.clone(),
            exact: e.exact.clone(),
        }));
        level = next;
    }
    Ok(out)
}

/// Classes of equal maps among `entries`, each sorted by (length, word).
fn classes(entries: &[Entry], mode: Mode, lo: &[f64], hi: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = match mode {
        Mode::Exact => {
            let mut by_map: FxHashMap<&ExactSimilarity, Vec<usize>> = FxHashMap::default();
            for (i, e) in entries.iter().enumerate() {
                by_map.entry(e.exact.as_ref().expect("exact data")).or_default().push(i);
            }
            by_map.into_values().collect()
        }
        Mode::Float(tol) => {
            // Union-find over pairs within tolerance, bucketed by scale and
            // swept along the first translation coordinate.
            let mut parent: Vec<usize> = (0..entries.len()).collect();
            fn find(p: &mut [usize], mut i: usize) -> usize {
                while p[i] != i {
                    p[i] = p[p[i]];
                    i = p[i];
                }
                i
            }
            let mut order: Vec<usize> = (0..entries.len()).collect();
            order.sort_by(|&a, &b| {
                let (x, y) = (&entries[a].map, &entries[b].map);
                x.scale()
                    .total_cmp(&y.scale())
                    .then(x.translation()[0].total_cmp(&y.translation()[0]))
            });
            for (pos, &a) in order.iter().enumerate() {
                for &b in &order[pos + 1..] {
                    let (x, y) = (&entries[a].map, &entries[b].map);
                    if (y.scale() - x.scale()).abs() > tol + 1e-15 {
                        break;
                    }
                    if (y.translation()[0] - x.translation()[0]).abs() > tol {
                        continue;
                    }
                    if map_distance(x, y, lo, hi) <= tol {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
            let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for i in 0..entries.len() {
                let r = find(&mut parent, i);
                by_root.entry(r).or_default().push(i);
            }
            by_root.into_values().collect()
        }
    };
    for g in &mut groups {
        g.sort_by(|&a, &b| {
            let (x, y) = (&entries[a].word, &entries[b].word);
            x.len().cmp(&y.len()).then(x.cmp(y))
        });
    }
    groups.sort_by(|a, b| {
        let (x, y) = (&entries[a[0]].word, &entries[b[0]].word);
        x.len().cmp(&y.len()).then(x.cmp(y))
    });
    groups
}

/// All pairs of distinct words of length `1..=max_len` with equal maps.
pub fn exact_overlaps(system: &IfsSystem, max_len: usize, mode: Mode) -> Result<Vec<OverlapPair>> {
    let exact = mode.require_exact(system)?;
    let entries = all_words(system, max_len, exact)?;
    let (lo, hi) = system.bounding_box();
    let mut pairs = Vec::new();
    for g in classes(&entries, mode, &lo, &hi) {
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                pairs.push(OverlapPair {
                    word_a: entries[a].word.0.clone(),
                    word_b: entries[b].word.0.clone(),
                    map_distance: map_distance(&entries[a].map, &entries[b].map, &lo, &hi),
                });
            }
        }
    }
    Ok(pairs)
}

/// One representative (the lexicographically least word) per class of the
/// stopping set at `r`.
pub fn reduced_words(system: &IfsSystem, r: f64, mode: Mode) -> Result<Vec<Word>> {
    let exact = mode.require_exact(system)?;
    let words = stopping_set(system, r)?;
    let entries: Vec<Entry> = words
        .into_iter()
        .map(|w| {
            Ok(Entry {
                map: compose(system, &w)?,
                exact: exact.map(|x| x.compose(&w.0)),
                word: w,
            })
        })
        .collect::<Result<_>>()?;
    let (lo, hi) = system.bounding_box();
    let mut reps: Vec<Word> = classes(&entries, mode, &lo, &hi)
        .into_iter()
        .map(|g| {
            g.iter()
                .map(|&i| entries[i].word.clone())
                .min()
                .expect("nonempty class")
        })
        .collect();
    reps.sort();
    Ok(reps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WspMargin {
    /// Minimum distance from the identity per `|I| + |J|`.
    pub per_length_sum: BTreeMap<usize, f64>,
    pub overall: Option<f64>,
    pub pairs: usize,
}

impl WspMargin {
    /// `length_sum,min_distance`.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "length_sum,min_distance")?;
        for (k, v) in &self.per_length_sum {
            writeln!(w, "{k},{v:.12e}")?;
        }
        Ok(())
    }
}

/// Distance of `S_I^{-1} ∘ S_J` from the identity: the largest of the scale
/// ratio offset, the orthogonal offset and the translation length.
fn identity_distance(a: &Similarity, b: &Similarity) -> f64 {
    let ratio = (b.scale() / a.scale() - 1.0).abs();
    let ot = a.orthogonal().transpose();
    let d = a.dimension();
    let orth = (&ot * b.orthogonal() - nalgebra::DMatrix::identity(d, d)).amax();
    let shift = (&ot * (b.translation() - a.translation())).norm() / a.scale();
    ratio.max(orth).max(shift)
}

pub fn wsp_margin(system: &IfsSystem, max_len: usize, mode: Mode) -> Result<WspMargin> {
    let exact = mode.require_exact(system)?;
    let entries = all_words(system, max_len, exact)?;
    let (lo, hi) = system.bounding_box();
    let mut class_of = vec![0usize; entries.len()];
    for (c, g) in classes(&entries, mode, &lo, &hi).iter().enumerate() {
        for &i in g {
            class_of[i] = c;
        }
    }
    let mut per: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pairs = 0usize;
    for (i, a) in entries.iter().enumerate() {
        for (j, b) in entries.iter().enumerate().skip(i + 1) {
            if class_of[i] == class_of[j] {
                continue;
            }
            pairs += 1;
            let key = a.word.len() + b.word.len();
            let cur = per.get(&key).copied().unwrap_or(f64::INFINITY);
            let ratio = (b.map.scale() / a.map.scale() - 1.0).abs();
            if ratio >= cur {
                continue;
            }
            // Measure from the side with the larger scale so the ratio is ≤ 1.
            let dist = if a.map.scale() >= b.map.scale() {
                identity_distance(&a.map, &b.map)
            } else {
                identity_distance(&b.map, &a.map)
            };
            if dist < cur {
                per.insert(key, dist);
            }
        }
    }
    let overall = per.values().copied().reduce(f64::min);
    Ok(WspMargin {
        per_length_sum: per,
        overall,
        pairs,
    })
}
