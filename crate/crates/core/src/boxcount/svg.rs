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

use std::collections::BTreeSet;
use std::io::Write;

use crate::ifs::PointCloud;
use crate::{Error, Result};

/// Side of the square SVG viewport, in pixels.
pub const SVG_SIZE: u32 = 1024;

/// Draws the first two coordinates of `cloud` as unit pixels, mapping the
/// box `[lo, hi]` onto the viewport with the y axis pointing up.
pub fn render_svg(cloud: &PointCloud, lo: &[f64], hi: &[f64], mut w: impl Write) -> Result<()> {
    if cloud.dim() > 3 || lo.len() != cloud.dim() || hi.len() != cloud.dim() {
        return Err(Error::domain("render box does not match the cloud"));
    }
    let axes = cloud.dim().min(2);
    let size = SVG_SIZE as f64;
    let span: Vec<f64> = (0..axes)
        .map(|j| {
            let s = hi[j] - lo[j];
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let mut pixels = BTreeSet::new();
    for p in cloud.points() {
        let px = ((p[0] - lo[0]) / span[0] * (size - 1.0)).round() as i64;
        let py = if axes == 2 {
            ((hi[1] - p[1]) / span[1] * (size - 1.0)).round() as i64
        } else {
            SVG_SIZE as i64 / 2
        };
        if (0..SVG_SIZE as i64).contains(&px) && (0..SVG_SIZE as i64).contains(&py) {
            pixels.insert((py, px));
        }
    }
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    )?;
    writeln!(w, "<!-- fraclab {} -->", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(w, r#"<g fill="black" shape-rendering="crispEdges">"#)?;
    // Horizontal runs of pixels become one rectangle.
    let mut it = pixels.into_iter().peekable();
    while let Some((y, x0)) = it.next() {
        let mut x1 = x0;
        while let Some(&(y2, x2)) = it.peek() {
            if y2 == y && x2 == x1 + 1 {
                x1 = x2;
                it.next();
            } else {
                break;
            }
        }
        writeln!(w, r#"<rect x="{x0}" y="{y}" width="{}" height="1"/>"#, x1 - x0 + 1)?;
    }
    writeln!(w, "</g>")?;
    writeln!(w, "</svg>")?;
    Ok(())
}
