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

use std::cmp::Ordering;

use super::net::{NetSpec, Prim, MAX_DIM};
use crate::{Error, Result};

/// Cap on the number of points a cloud may hold.
pub const MAX_CLOUD_POINTS: usize = 1 << 24;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CloudMeta {
    /// Sampling spacing or merge resolution.
    pub resolution: f64,
    /// Deepest word length or level used.
    pub depth: usize,
    pub source: String,
}

/// Finite sample of a compact set, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    pub meta: CloudMeta,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        Self::with_meta(dim, CloudMeta::default())
    }

    pub fn with_meta(dim: usize, meta: CloudMeta) -> Self {
        PointCloud {
            dim,
            coords: Vec::new(),
            meta,
        }
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut c = PointCloud::new(dim);
        for p in points {
            c.push(p)?;
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::domain(format!(
                "point of dimension {} pushed into a {}-dimensional cloud",
                p.len(),
                self.dim
            )));
        }
        if self.len() >= MAX_CLOUD_POINTS {
            return Err(Error::budget("point cloud size", MAX_CLOUD_POINTS));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Samples the closed segment `[a, b]` with spacing at most `spacing`,
    /// endpoints included.
    pub fn push_segment(&mut self, a: &[f64], b: &[f64], spacing: f64) -> Result<()> {
        let len = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        let steps = (len / spacing).ceil() as usize;
        if steps == 0 {
            return self.push(a);
        }
        if self.len() + steps + 1 > MAX_CLOUD_POINTS {
            return Err(Error::budget("point cloud size", MAX_CLOUD_POINTS));
        }
        let mut p = vec![0.0; self.dim];
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            for (j, q) in p.iter_mut().enumerate() {
                *q = a[j] + t * (b[j] - a[j]);
            }
            self.push(&p)?;
        }
        Ok(())
    }

    /// Sorts points lexicographically and removes exact duplicates.
    pub fn canonicalize(&mut self) {
        let d = self.dim.max(1);
        let mut pts: Vec<&[f64]> = self.coords.chunks_exact(d).collect();
        pts.sort_by(|a, b| cmp_points(a, b));
        pts.dedup_by(|a, b| cmp_points(a, b).is_eq());
        self.coords = pts.concat();
    }

    /// Shifts every point by `v`.
    pub fn translated(&self, v: &[f64]) -> PointCloud {
        let mut out = self.clone();
        for p in out.coords.chunks_exact_mut(self.dim.max(1)) {
            for (x, s) in p.iter_mut().zip(v) {
                *x += s;
            }
        }
        out
    }

    /// Coordinate-wise bounding box.
    pub fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut it = self.points();
        let first = it.next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in it {
            for j in 0..self.dim {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        Some((lo, hi))
    }
}

fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub(crate) fn push_prim(cloud: &mut PointCloud, p: &Prim, spacing: f64) -> Result<()> {
    let d = cloud.dim();
    debug_assert!(d <= MAX_DIM);
    if p.a == p.b {
        cloud.push(&p.a[..d])
    } else {
        cloud.push_segment(&p.a[..d], &p.b[..d], spacing)
    }
}

pub(crate) fn sample_net(spec: &NetSpec, source: &str) -> Result<PointCloud> {
    let spacing = spec.delta / 4.0;
    let mut cloud = PointCloud::with_meta(
        spec.dim,
        CloudMeta {
            resolution: spacing,
            depth: spec.levels,
            source: format!("{source} net, delta={}", spec.delta),
        },
    );
    spec.run(|_, level| {
        for p in level {
            push_prim(&mut cloud, p, spacing)?;
        }
        Ok(())
    })?;
    cloud.canonicalize();
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_sampling_spacing() {
        let mut c = PointCloud::new(2);
        c.push_segment(&[0.0, 0.0], &[0.0, 1.0], 0.25).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.point(4), &[0.0, 1.0]);
        let mut d = PointCloud::new(2);
        d.push_segment(&[0.0, 0.0], &[0.0, 0.0], 0.25).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn canonical_order_and_dedup() {
        let mut c = PointCloud::from_points(
            2,
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        c.canonicalize();
        let pts: Vec<Vec<f64>> = c.points().map(<[f64]>::to_vec).collect();
        assert_eq!(pts, vec![vec![0.0, 1.0], vec![0.0, 2.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn dimension_mismatch() {
        let mut c = PointCloud::new(2);
        assert!(c.push(&[1.0]).is_err());
    }
}
