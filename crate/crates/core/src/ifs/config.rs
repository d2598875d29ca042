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

//! JSON system descriptions.
//!
//! ```json
//! { "dimension": 2,
//!   "maps": [{ "scale": 0.5, "rotation": { "angle_deg": 90 }, "translation": [0, 0] }],
//!   "condensation": { "kind": "segment", "data": [[0, 0], [0, 1]] },
//!   "preset": { "name": "bernoulli_comb", "params": { "lambda_poly": "x^2-2" } } }
//! ```
//!
//! A preset replaces the explicit maps; giving both is accepted only when
//! they describe the same maps. An explicit condensation set replaces the
//! preset's own.

use std::path::Path;

use nalgebra::{DMatrix, DVector, Unit, Vector3};
use serde::Deserialize;

use super::{preset, CondensationSet, IfsSystem, PresetName, PresetParams, PresetSystem, Similarity};
use crate::algebraic::IntPolynomial;
use crate::ifs::resolve_lambda;
use crate::sphere::RotationSet;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, Deserialize)]
pub struct SystemConfig {
    pub dimension: Option<usize>,
    #[serde(default)]
    pub maps: Vec<MapConfig>,
    pub condensation: Option<CondensationConfig>,
    pub preset: Option<PresetConfig>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MapConfig {
    pub scale: f64,
    pub rotation: Option<RotationConfig>,
    pub translation: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RotationConfig {
    Matrix { matrix: Vec<Vec<f64>> },
    AxisAngle { axis: Vec<f64>, angle_deg: f64 },
    Angle { angle_deg: f64 },
}

#[derive(Clone, Debug, Deserialize)]
pub struct CondensationConfig {
    pub kind: String,
    pub data: serde_json::Value,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PresetConfig {
    pub name: String,
    #[serde(default)]
    pub params: PresetParamsConfig,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct PresetParamsConfig {
    pub lambda: Option<NumberOrText>,
    pub lambda_poly: Option<PolyConfig>,
    pub root_index: Option<usize>,
    pub epsilon: Option<f64>,
    pub c: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub generators: Option<Vec<RotationConfig>>,
    pub include_inverses: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum NumberOrText {
    Number(f64),
    Text(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PolyConfig {
    Text(String),
    Coefficients(Vec<i64>),
}

impl PolyConfig {
    pub fn polynomial(&self) -> Result<IntPolynomial> {
        match self {
            PolyConfig::Text(s) => s.parse(),
            PolyConfig::Coefficients(c) => IntPolynomial::new(c.clone()),
        }
    }
}

pub fn parse_config(text: &str) -> Result<SystemConfig> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Orthogonal matrix for a rotation entry in dimension `d`.
pub(crate) fn rotation_matrix(r: Option<&RotationConfig>, d: usize) -> Result<DMatrix<f64>> {
    match r {
        None => Ok(DMatrix::identity(d, d)),
        Some(RotationConfig::Matrix { matrix }) => {
            if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                return Err(Error::domain(format!("rotation matrix must be {d}x{d}")));
            }
            Ok(DMatrix::from_fn(d, d, |i, j| matrix[i][j]))
        }
        Some(RotationConfig::Angle { angle_deg }) => {
            if d != 2 {
                return Err(Error::domain(
                    "a bare angle only defines a rotation in the plane",
                ));
            }
            let t = angle_deg.to_radians();
            Ok(DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]))
        }
        Some(RotationConfig::AxisAngle { axis, angle_deg }) => {
            if d != 3 || axis.len() != 3 {
                return Err(Error::domain("axis-angle rotations need d = 3"));
            }
            let v = Vector3::new(axis[0], axis[1], axis[2]);
            if v.norm() == 0.0 {
                return Err(Error::domain("rotation axis must be nonzero"));
            }
            let r = nalgebra::Rotation3::from_axis_angle(&Unit::new_normalize(v), angle_deg.to_radians());
            Ok(DMatrix::from_fn(3, 3, |i, j| r.matrix()[(i, j)]))
        }
    }
}

fn condensation(c: &CondensationConfig) -> Result<CondensationSet> {
    let bad = || Error::domain(format!("malformed data for condensation kind {:?}", c.kind));
    let list = || -> Result<Vec<Vec<f64>>> {
        serde_json::from_value(c.data.clone()).map_err(|_| bad())
    };
    match c.kind.as_str() {
        "point" => Ok(CondensationSet::Point(
            serde_json::from_value(c.data.clone()).map_err(|_| bad())?,
        )),
        "segment" => {
            let v = list()?;
            match <[Vec<f64>; 2]>::try_from(v) {
                Ok([a, b]) => Ok(CondensationSet::Segment(a, b)),
                Err(_) => Err(bad()),
            }
        }
        "polyline" => Ok(CondensationSet::Polyline(list()?)),
        "point_cloud" => Ok(CondensationSet::PointCloud(list()?)),
        other => Err(Error::domain(format!("unknown condensation kind {other:?}"))),
    }
}

fn preset_params(p: &PresetParamsConfig) -> Result<PresetParams> {
    let lambda_text = p.lambda.as_ref().map(|l| match l {
        NumberOrText::Number(x) => format!("{x:?}"),
        NumberOrText::Text(s) => s.clone(),
    });
    let poly = p.lambda_poly.as_ref().map(PolyConfig::polynomial).transpose()?;
    let lambda = if lambda_text.is_some() || poly.is_some() {
        Some(resolve_lambda(lambda_text.as_deref(), poly.as_ref(), p.root_index)?)
    } else {
        None
    };
    let rotations = match &p.generators {
        Some(gens) => {
            let mats = gens
                .iter()
                .map(|g| rotation_matrix(Some(g), 3))
                .collect::<Result<Vec<_>>>()?;
            Some(RotationSet::new(mats, p.include_inverses.unwrap_or(true))?)
        }
        None => p.include_inverses.map(|inv| RotationSet::default_pair().with_inverses(inv)),
    };
    Ok(PresetParams {
        lambda,
        epsilon: p.epsilon,
        c: p.c,
        rotations,
        x: p.x.clone(),
    })
}

fn same_maps(a: &[Similarity], b: &[Similarity]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            (x.scale() - y.scale()).abs() <= 1e-12
                && (x.orthogonal() - y.orthogonal()).amax() <= 1e-12
                && (x.translation() - y.translation()).amax() <= 1e-12
        })
}

impl SystemConfig {
    /// Rotation generators of a sphere preset, when configured.
    pub fn rotations(&self) -> Result<Option<RotationSet>> {
        match &self.preset {
            Some(p) => Ok(preset_params(&p.params)?.rotations),
            None => Ok(None),
        }
    }

    pub fn build(&self) -> Result<PresetSystem> {
        let explicit = if self.maps.is_empty() {
            None
        } else {
            let d = self
                .dimension
                .ok_or_else(|| Error::domain("explicit maps need \"dimension\""))?;
            let maps = self
                .maps
                .iter()
                .map(|m| {
                    Similarity::new(
                        m.scale,
                        rotation_matrix(m.rotation.as_ref(), d)?,
                        DVector::from_column_slice(&m.translation),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Some((d, maps))
        };
        let cond = self.condensation.as_ref().map(condensation).transpose()?;
        let system = match (&self.preset, explicit) {
            (None, None) => return Err(Error::domain("config has neither maps nor a preset")),
            (None, Some((d, maps))) => PresetSystem::Similarity(IfsSystem::new(d, maps, cond)?),
            (Some(p), explicit) => {
                let name: PresetName = p.name.parse()?;
                let built = preset(name, &preset_params(&p.params)?)?;
                if let Some((_, maps)) = explicit {
                    let agrees = match &built {
                        PresetSystem::Similarity(s) => same_maps(s.maps(), &maps),
                        PresetSystem::Affine(_) => false,
                    };
                    if !agrees {
                        return Err(Error::domain(format!(
                            "explicit maps conflict with preset {name}"
                        )));
                    }
                }
                match (built, cond) {
                    (PresetSystem::Similarity(s), Some(c)) => {
                        PresetSystem::Similarity(s.with_condensation(Some(c))?)
                    }
                    (PresetSystem::Affine(_), Some(_)) => {
                        return Err(Error::domain(
                            "the affine companion takes no condensation set",
                        ))
                    }
                    (b, None) => b,
                }
            }
        };
        if let Some(d) = self.dimension {
            if d != system.dimension() {
                return Err(Error::domain(format!(
                    "\"dimension\" is {d} but the system acts on R^{}",
                    system.dimension()
                )));
            }
        }
        Ok(system)
    }
}
