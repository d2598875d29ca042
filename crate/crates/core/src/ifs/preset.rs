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

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::net::{Affine, NetSpec, Prim};
use super::{CondensationSet, IfsSystem, Similarity};
use crate::algebraic::{AlgebraicNumber, IntPolynomial, DEFAULT_PRECISION};
use crate::exact::{parse_rational, ExactSimilarity, ExactSystem, Lambda};
use crate::sphere::RotationSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetName {
    BernoulliComb,
    AffineCompanion,
    ExtendedComb,
    Sphere,
}

impl PresetName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::BernoulliComb => "bernoulli_comb",
            PresetName::AffineCompanion => "affine_companion",
            PresetName::ExtendedComb => "extended_comb",
            PresetName::Sphere => "sphere",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bernoulli_comb" => PresetName::BernoulliComb,
            "affine_companion" => PresetName::AffineCompanion,
            "extended_comb" => PresetName::ExtendedComb,
            "sphere" => PresetName::Sphere,
            other => return Err(Error::Parse(format!("unknown preset {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct PresetParams {
    pub lambda: Option<Lambda>,
    pub epsilon: Option<f64>,
    pub c: Option<f64>,
    pub rotations: Option<RotationSet>,
    pub x: Option<Vec<f64>>,
}

impl PresetParams {
    pub fn with_lambda(lambda: Lambda) -> Self {
        PresetParams {
            lambda: Some(lambda),
            ..Default::default()
        }
    }
}

/// λ from its textual forms: a decimal (float mode), a fraction `p/q`
/// (exact, rational field) or the reciprocal of a root of `poly`.
pub fn resolve_lambda(
    value: Option<&str>,
    poly: Option<&IntPolynomial>,
    root_index: Option<usize>,
) -> Result<Lambda> {
    match (value, poly) {
        (Some(_), Some(_)) => Err(Error::domain(
            "give either a lambda value or a polynomial, not both",
        )),
        (None, None) => Err(Error::domain("lambda is required")),
        (Some(v), None) => {
            let v = v.trim();
            if v.contains('/') {
                let q = parse_rational(v)
                    .ok_or_else(|| Error::Parse(format!("bad fraction {v:?}")))?;
                Ok(Lambda::rational(q))
            } else {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad lambda {v:?}")))?;
                Ok(Lambda::real(x))
            }
        }
        (None, Some(p)) => {
            let theta = match root_index {
                Some(k) => AlgebraicNumber::new(p.clone(), k, DEFAULT_PRECISION)?,
                None => AlgebraicNumber::largest_real(p.clone())?,
            };
            Lambda::reciprocal(&theta)
        }
    }
}

/// The self-affine companion `T_0(x, y) = (λx, y/2)`,
/// `T_1(x, y) = (λx + 1 − λ, y/2 + 1/2)`. It supports rendering and
/// counting only.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineCompanion {
    lambda: f64,
}

impl AffineCompanion {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(AffineCompanion { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Diagonal and translation of each map.
    pub fn maps(&self) -> [([f64; 2], [f64; 2]); 2] {
        let l = self.lambda;
        [([l, 0.5], [0.0, 0.0]), ([l, 0.5], [1.0 - l, 0.5])]
    }

    pub(crate) fn net_spec(&self, delta: f64) -> Result<NetSpec> {
        let maps: Vec<Affine> = self
            .maps()
            .iter()
            .map(|(d, b)| Affine::diagonal(d, b))
            .collect();
        // Both maps send the unit square into itself, so images of the
        // seed at depth n lie within c^n·√2 of the whole image square.
        let seeds = vec![Prim::point(maps[0].fixed_point())];
        NetSpec::new(2, maps, seeds, std::f64::consts::FRAC_1_SQRT_2, delta)
    }

    pub fn attractor_cloud(&self, delta: f64) -> Result<super::PointCloud> {
        super::cloud::sample_net(&self.net_spec(delta)?, "affine companion")
    }
}

#[derive(Clone, Debug)]
pub enum PresetSystem {
    Similarity(IfsSystem),
    Affine(AffineCompanion),
}

impl PresetSystem {
    pub fn dimension(&self) -> usize {
        match self {
            PresetSystem::Similarity(s) => s.dimension(),
            PresetSystem::Affine(_) => 2,
        }
    }

    pub fn as_similarity(&self) -> Result<&IfsSystem> {
        match self {
            PresetSystem::Similarity(s) => Ok(s),
            PresetSystem::Affine(_) => Err(Error::domain(
                "the affine companion is not a similarity system",
            )),
        }
    }

    pub fn into_similarity(self) -> Result<IfsSystem> {
        match self {
            PresetSystem::Similarity(s) => Ok(s),
            PresetSystem::Affine(_) => Err(Error::domain(
                "the affine companion is not a similarity system",
            )),
        }
    }

    /// Net of the set the preset describes: `F_C` when a condensation set is
    /// present, the attractor otherwise.
    pub(crate) fn net_spec(&self, delta: f64) -> Result<NetSpec> {
        match self {
            PresetSystem::Similarity(s) if s.condensation().is_some() => {
                NetSpec::for_system(s, delta)
            }
            PresetSystem::Similarity(s) => NetSpec::for_attractor(s, delta),
            PresetSystem::Affine(a) => a.net_spec(delta),
        }
    }

    /// Axis-aligned box containing the set.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            PresetSystem::Similarity(s) => s.bounding_box(),
            PresetSystem::Affine(_) => (vec![0.0, 0.0], vec![1.0, 1.0]),
        }
    }

    pub fn cloud(&self, delta: f64) -> Result<super::PointCloud> {
        super::cloud::sample_net(&self.net_spec(delta)?, "preset")
    }
}

fn check_lambda(l: f64) -> Result<()> {
    if l > 0.0 && l < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda = {l} is outside (0, 1)")))
    }
}

fn require_lambda(params: &PresetParams) -> Result<&Lambda> {
    let l = params
        .lambda
        .as_ref()
        .ok_or_else(|| Error::domain("this preset needs lambda"))?;
    check_lambda(l.value)?;
    Ok(l)
}

fn comb_maps(l: f64) -> Result<Vec<Similarity>> {
    Ok(vec![
        Similarity::homothety(l, &[0.0, 0.0])?,
        Similarity::homothety(l, &[1.0 - l, 0.0])?,
    ])
}

fn comb_exact(lambda: &Lambda) -> Option<ExactSystem> {
    let field = lambda.field.clone()?;
    let orth = vec![
        BigRational::one(),
        BigRational::zero(),
        BigRational::zero(),
        BigRational::one(),
    ];
    let l = field.generator();
    let shift = field.sub(&field.one(), &l);
    let maps = vec![
        ExactSimilarity {
            scale: l.clone(),
            orthogonal: orth.clone(),
            translation: vec![field.zero(), field.zero()],
        },
        ExactSimilarity {
            scale: l,
            orthogonal: orth,
            translation: vec![shift, field.zero()],
        },
    ];
    Some(ExactSystem {
        field,
        dimension: 2,
        maps,
    })
}

fn unit_stem() -> CondensationSet {
    CondensationSet::Segment(vec![0.0, 0.0], vec![0.0, 1.0])
}

/// Builds a named system. See [`PresetName`] for the catalogue.
pub fn preset(name: PresetName, params: &PresetParams) -> Result<PresetSystem> {
    match name {
        PresetName::BernoulliComb => {
            let lambda = require_lambda(params)?;
            let sys = IfsSystem::new(2, comb_maps(lambda.value)?, Some(unit_stem()))?;
            let sys = match comb_exact(lambda) {
                Some(e) => sys.with_exact(e)?,
                None => sys,
            };
            Ok(PresetSystem::Similarity(sys))
        }
        PresetName::AffineCompanion => {
            let lambda = require_lambda(params)?;
            Ok(PresetSystem::Affine(AffineCompanion::new(lambda.value)?))
        }
        PresetName::ExtendedComb => {
            let lambda = require_lambda(params)?;
            let l = lambda.value;
            let eps = params
                .epsilon
                .ok_or_else(|| Error::domain("extended_comb needs epsilon"))?;
            if !(eps > 0.0 && eps < 1.0 - l) {
                return Err(Error::domain(format!(
                    "epsilon = {eps} is outside (0, 1 - lambda) = (0, {})",
                    1.0 - l
                )));
            }
            let mut maps = comb_maps(l)?;
            maps.push(Similarity::homothety(eps, &[0.0, 1.0 - eps])?);
            Ok(PresetSystem::Similarity(IfsSystem::new(
                2,
                maps,
                Some(unit_stem()),
            )?))
        }
        PresetName::Sphere => {
            let c = params.c.unwrap_or(0.95);
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::domain(format!("c = {c} is outside (0, 1)")));
            }
            let rot = match &params.rotations {
                Some(r) => r.clone(),
                None => RotationSet::default_pair(),
            };
            let d = rot.dimension();
            let x = match &params.x {
                Some(x) => x.clone(),
                None => {
                    let mut e = vec![0.0; d];
                    e[0] = 1.0;
                    e
                }
            };
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if x.len() != d || (norm - 1.0).abs() > 1e-12 {
                return Err(Error::domain("sphere preset needs a unit vector x"));
            }
            let maps = rot
                .alphabet()
                .iter()
                .map(|g| Similarity::new(c, g.clone(), DVector::zeros(d)))
                .collect::<Result<Vec<_>>>()?;
            Ok(PresetSystem::Similarity(IfsSystem::new(
                d,
                maps,
                Some(CondensationSet::Point(x)),
            )?))
        }
    }
}
