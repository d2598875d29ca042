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

//! Similarity IFSs with a condensation set.
//!
//! An [`IfsSystem`] holds maps `S_i(x) = c_i M_i x + b_i` and an optional
//! condensation set `C`. Its inhomogeneous attractor `F_C` is the closure of
//! the orbital set `C ∪ ⋃_I S_I(C)` together with the homogeneous attractor.

mod cloud;
mod config;
pub(crate) mod net;
mod preset;

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::exact::ExactSystem;
use crate::{Error, Result};

pub use cloud::{CloudMeta, PointCloud};
pub use config::{load_config, parse_config, SystemConfig};
pub use preset::{preset, resolve_lambda, AffineCompanion, PresetName, PresetParams, PresetSystem};

/// Relative slack for scale-boundary comparisons, so that a product such as
/// `λ·λ` with `λ = 2^{-1/2}` lands on the intended side of `1/2`.
pub const SCALE_EPS: f64 = 1e-12;

/// Default cap on the number of words any enumeration may visit.
pub const WORD_BUDGET: usize = 1 << 22;

/// A contracting similarity `x ↦ scale · orthogonal · x + translation`.
#[derive(Clone, Debug, PartialEq)]
pub struct Similarity {
    scale: f64,
    orthogonal: DMatrix<f64>,
    translation: DVector<f64>,
}

impl Similarity {
    pub fn new(scale: f64, orthogonal: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if !(scale > 0.0 && scale < 1.0) {
            return Err(Error::domain(format!("scale {scale} is not in (0, 1)")));
        }
        let d = translation.len();
        if orthogonal.nrows() != d || orthogonal.ncols() != d {
            return Err(Error::domain(format!(
                "orthogonal part is {}x{}, translation has length {d}",
                orthogonal.nrows(),
                orthogonal.ncols()
            )));
        }
        if translation.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("translation must be finite"));
        }
        let err = (&orthogonal * orthogonal.transpose() - DMatrix::identity(d, d)).amax();
        if !(err <= 1e-12) {
            return Err(Error::domain(format!(
                "matrix is not orthogonal (deviation {err:.3e})"
            )));
        }
        Ok(Similarity {
            scale,
            orthogonal,
            translation,
        })
    }

    /// `x ↦ scale·x + translation`.
    pub fn homothety(scale: f64, translation: &[f64]) -> Result<Self> {
        let d = translation.len();
        Similarity::new(
            scale,
            DMatrix::identity(d, d),
            DVector::from_column_slice(translation),
        )
    }

    pub fn identity(d: usize) -> Self {
        Similarity {
            scale: 1.0,
            orthogonal: DMatrix::identity(d, d),
            translation: DVector::zeros(d),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.orthogonal * x * self.scale + &self.translation
    }

    /// `self ∘ inner`.
    pub fn then(&self, inner: &Similarity) -> Similarity {
        Similarity {
            scale: self.scale * inner.scale,
            orthogonal: &self.orthogonal * &inner.orthogonal,
            translation: &self.orthogonal * &inner.translation * self.scale + &self.translation,
        }
    }

    /// The inverse map; its scale is `1/scale`.
    pub fn inverse(&self) -> Similarity {
        let ot = self.orthogonal.transpose();
        let translation = -(&ot * &self.translation) / self.scale;
        Similarity {
            scale: 1.0 / self.scale,
            orthogonal: ot,
            translation,
        }
    }

    /// The unique fixed point `(I − c M)^{-1} b`.
    pub fn fixed_point(&self) -> DVector<f64> {
        let d = self.dimension();
        let a = DMatrix::identity(d, d) - &self.orthogonal * self.scale;
        a.lu()
            .solve(&self.translation)
            .unwrap_or_else(|| DVector::zeros(d))
    }
}

/// A finite index sequence; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The word with its last letter removed.
    pub fn parent(&self) -> Option<Word> {
        let (_, head) = self.0.split_last()?;
        Some(Word(head.to_vec()))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        let wide = self.0.iter().any(|&i| i >= 10);
        for (k, i) in self.0.iter().enumerate() {
            if wide && k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// The compact set `C`.
#[derive(Clone, Debug, PartialEq)]
pub enum CondensationSet {
    Point(Vec<f64>),
    Segment(Vec<f64>, Vec<f64>),
    Polyline(Vec<Vec<f64>>),
    PointCloud(Vec<Vec<f64>>),
}

impl CondensationSet {
    pub fn kind(&self) -> &'static str {
        match self {
            CondensationSet::Point(_) => "point",
            CondensationSet::Segment(..) => "segment",
            CondensationSet::Polyline(_) => "polyline",
            CondensationSet::PointCloud(_) => "point_cloud",
        }
    }

    /// Every coordinate vector the set is built from.
    pub fn vertices(&self) -> Vec<&[f64]> {
        match self {
            CondensationSet::Point(p) => vec![p.as_slice()],
            CondensationSet::Segment(a, b) => vec![a.as_slice(), b.as_slice()],
            CondensationSet::Polyline(v) | CondensationSet::PointCloud(v) => {
                v.iter().map(Vec::as_slice).collect()
            }
        }
    }

    /// Points and segments (as endpoint pairs) making up the set.
    pub fn pieces(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        match self {
            CondensationSet::Point(p) => vec![(p.clone(), p.clone())],
            CondensationSet::Segment(a, b) => vec![(a.clone(), b.clone())],
            CondensationSet::Polyline(v) if v.len() == 1 => vec![(v[0].clone(), v[0].clone())],
            CondensationSet::Polyline(v) => {
                v.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
            }
            CondensationSet::PointCloud(v) => v.iter().map(|p| (p.clone(), p.clone())).collect(),
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        let verts = self.vertices();
        if verts.is_empty() {
            return Err(Error::domain("condensation set is empty"));
        }
        for v in verts {
            if v.len() != d {
                return Err(Error::domain(format!(
                    "condensation vertex has dimension {}, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("condensation coordinates must be finite"));
            }
        }
        Ok(())
    }

    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut best = 0.0f64;
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                best = best.max(dist(a, b));
            }
        }
        best
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Similarity IFS `{S_i}` with optional condensation set and optional exact
/// companion data used by the overlap machinery.
#[derive(Clone, Debug)]
pub struct IfsSystem {
    dimension: usize,
    maps: Vec<Similarity>,
    condensation: Option<CondensationSet>,
    exact: Option<ExactSystem>,
}

impl IfsSystem {
    pub fn new(
        dimension: usize,
        maps: Vec<Similarity>,
        condensation: Option<CondensationSet>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        if dimension > net::MAX_DIM {
            return Err(Error::domain(format!(
                "dimension {dimension} exceeds the supported maximum {}",
                net::MAX_DIM
            )));
        }
        if maps.is_empty() {
            return Err(Error::domain("an IFS needs at least one map"));
        }
        if maps.len() > 256 {
            return Err(Error::domain("at most 256 maps are supported"));
        }
        if let Some(m) = maps.iter().find(|m| m.dimension() != dimension) {
            return Err(Error::domain(format!(
                "map acts on R^{}, system is R^{dimension}",
                m.dimension()
            )));
        }
        if let Some(c) = &condensation {
            c.validate(dimension)?;
        }
        Ok(IfsSystem {
            dimension,
            maps,
            condensation,
            exact: None,
        })
    }

    /// Attaches exact data; it must describe the same number of maps.
    pub fn with_exact(mut self, exact: ExactSystem) -> Result<Self> {
        if exact.maps.len() != self.maps.len() || exact.dimension != self.dimension {
            return Err(Error::domain("exact data does not match the system"));
        }
        self.exact = Some(exact);
        Ok(self)
    }

    pub fn with_condensation(mut self, c: Option<CondensationSet>) -> Result<Self> {
        if let Some(c) = &c {
            c.validate(self.dimension)?;
        }
        self.condensation = c;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn condensation(&self) -> Option<&CondensationSet> {
        self.condensation.as_ref()
    }

    pub fn exact(&self) -> Option<&ExactSystem> {
        self.exact.as_ref()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Similarity::scale).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(1.0, f64::min)
    }

    fn check_word(&self, word: &Word) -> Result<()> {
        match word.0.iter().find(|&&i| i as usize >= self.maps.len()) {
            Some(i) => Err(Error::domain(format!(
                "index {i} is not a map of this {}-map system",
                self.maps.len()
            ))),
            None => Ok(()),
        }
    }

    /// A ball `B(z, R)` mapped into itself by every `S_i` and containing `C`.
    pub fn invariant_ball(&self) -> (DVector<f64>, f64) {
        let z = self.maps[0].fixed_point();
        let mut r = 0.0f64;
        for m in &self.maps {
            r = r.max((m.apply(&z) - &z).norm() / (1.0 - m.scale()));
        }
        if let Some(c) = &self.condensation {
            for v in c.vertices() {
                r = r.max((DVector::from_column_slice(v) - &z).norm());
            }
        }
        (z, r)
    }

    /// Axis-aligned box containing `F_C`, from the invariant ball.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (z, r) = self.invariant_ball();
        (
            z.iter().map(|x| x - r).collect(),
            z.iter().map(|x| x + r).collect(),
        )
    }
}

/// `S_I = S_{i_1} ∘ … ∘ S_{i_k}`; the empty word gives the identity (scale 1).
pub fn compose(system: &IfsSystem, word: &Word) -> Result<Similarity> {
    system.check_word(word)?;
    let mut acc = Similarity::identity(system.dimension);
    for &i in &word.0 {
        acc = acc.then(&system.maps[i as usize]);
    }
    Ok(acc)
}

/// Depth-first enumeration of words in lexicographic order. `visit` gets
/// each nonempty word with its ratio and returns whether to descend.
fn walk_words(
    system: &IfsSystem,
    budget: usize,
    mut visit: impl FnMut(&[u8], f64) -> Result<bool>,
) -> Result<()> {
    let ratios = system.ratios();
    let mut word: Vec<u8> = Vec::new();
    let mut scales: Vec<f64> = vec![1.0];
    let mut seen = 0usize;
    // Stack of next letter to try at each depth.
    let mut next: Vec<usize> = vec![0];
    while let Some(top) = next.last_mut() {
        if *top == ratios.len() {
            next.pop();
            word.pop();
            scales.pop();
            continue;
        }
        let i = *top;
        *top += 1;
        seen += 1;
        if seen > budget {
            return Err(Error::budget("word enumeration", budget));
        }
        let c = scales.last().copied().unwrap_or(1.0) * ratios[i];
        word.push(i as u8);
        if visit(&word, c)? {
            scales.push(c);
            next.push(0);
        } else {
            word.pop();
        }
    }
    Ok(())
}

/// Words `I` with `c_I ≤ r < c_{I†}`: a prefix-free cover of the index space.
pub fn stopping_set(system: &IfsSystem, r: f64) -> Result<Vec<Word>> {
    stopping_set_with_budget(system, r, WORD_BUDGET)
}

pub fn stopping_set_with_budget(system: &IfsSystem, r: f64, budget: usize) -> Result<Vec<Word>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("r = {r} is not in (0, 1)")));
    }
    let cut = r * (1.0 + SCALE_EPS);
    let mut out = Vec::new();
    walk_words(system, budget, |w, c| {
        if c <= cut {
            out.push(Word(w.to_vec()));
            Ok(false)
        } else {
            Ok(true)
        }
    })?;
    Ok(out)
}

/// Nonempty words with `2^{-k-1} < c_I ≤ 2^{-k}`.
pub fn level_set(system: &IfsSystem, k: u32) -> Result<Vec<Word>> {
    level_set_with_budget(system, k, WORD_BUDGET)
}

pub fn level_set_with_budget(system: &IfsSystem, k: u32, budget: usize) -> Result<Vec<Word>> {
    let hi = 0.5f64.powi(k as i32) * (1.0 + SCALE_EPS);
    let lo = 0.5f64.powi(k as i32 + 1) * (1.0 + SCALE_EPS);
    let mut out = Vec::new();
    walk_words(system, budget, |w, c| {
        if c <= lo {
            return Ok(false);
        }
        if c <= hi {
            out.push(Word(w.to_vec()));
        }
        Ok(true)
    })?;
    Ok(out)
}

/// A δ/2-net of `F_C`: images of `C` under all words up to the depth where
/// they fall below the mesh, merged on a sub-mesh grid, with segments
/// sampled at spacing δ/4.
pub fn orbital_cloud(system: &IfsSystem, delta: f64) -> Result<PointCloud> {
    let c = system
        .condensation()
        .ok_or_else(|| Error::domain("orbital cloud needs a condensation set"))?;
    let _ = c;
    let spec = net::NetSpec::for_system(system, delta)?;
    cloud::sample_net(&spec, "orbital")
}

/// A δ/2-net of the homogeneous attractor `F_∅`, seeded with the fixed point
/// of the first map.
pub fn attractor_cloud(system: &IfsSystem, delta: f64) -> Result<PointCloud> {
    let spec = net::NetSpec::for_attractor(system, delta)?;
    cloud::sample_net(&spec, "attractor")
}

/// `⋃_{I ∈ 𝓘_k} S_I(C)` sampled at spacing δ/4.
pub fn level_slice(system: &IfsSystem, k: u32, delta: f64) -> Result<PointCloud> {
    if !(delta > 0.0) {
        return Err(Error::domain("delta must be positive"));
    }
    let c = system
        .condensation()
        .ok_or_else(|| Error::domain("level slice needs a condensation set"))?;
    let words = level_set(system, k)?;
    let pieces = c.pieces();
    let mut cloud = PointCloud::with_meta(
        system.dimension,
        CloudMeta {
            resolution: delta / 4.0,
            depth: k as usize,
            source: format!("level slice k={k}"),
        },
    );
    for w in &words {
        let s = compose(system, w)?;
        for (a, b) in &pieces {
            let a = s.apply(&DVector::from_column_slice(a));
            let b = s.apply(&DVector::from_column_slice(b));
            cloud.push_segment(a.as_slice(), b.as_slice(), delta / 4.0)?;
        }
    }
    cloud.canonicalize();
    Ok(cloud)
}
