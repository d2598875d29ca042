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

//! Certified complex root finding for integer polynomials.
//!
//! Roots of each square-free factor are located with the Aberth–Ehrlich
//! simultaneous iteration in double precision. Each approximation z_i is then
//! certified by a Weierstrass inclusion disk of radius
//!
//! ```text
//! r_i = n · |p(z_i)| / (|a_n| · ∏_{j≠i} |z_i − z_j|)
//! ```
//!
//! where p(z_i) is evaluated exactly in rational arithmetic (the real and
//! imaginary parts of a double are dyadic rationals). When the disks are
//! pairwise disjoint each contains exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::IntPolynomial;
use crate::exact::{rat_to_f64, RatPoly};
use crate::{Error, Result};

/// Default certified radius for [`find_roots`].
pub const DEFAULT_PRECISION: f64 = 1e-14;

const MAX_ITER: usize = 2000;

/// A root approximation with a certified inclusion radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedRoot {
    pub value: Complex64,
    pub radius: f64,
}

impl CertifiedRoot {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }

    /// Lower and upper bounds on |root|.
    pub fn modulus_bounds(&self) -> (f64, f64) {
        let m = self.value.norm();
        ((m - self.radius).max(0.0), m + self.radius)
    }
}

/// All `deg(p)` complex roots, repeated by multiplicity, sorted by
/// (real part, imaginary part). Roots certified real have a zero imaginary
/// part.
pub fn find_roots(p: &IntPolynomial, precision: f64) -> Result<Vec<CertifiedRoot>> {
    if !(precision > 0.0) {
        return Err(Error::domain("precision must be positive"));
    }
    let rp = RatPoly::from_ints(p.coefficients());
    let mut all: Vec<(CertifiedRoot, usize)> = Vec::new();
    for (factor, mult) in rp.squarefree_factors() {
        for root in roots_of_squarefree(&factor)? {
            all.push((root, mult));
        }
    }

    // Disks of distinct roots must be disjoint across factors as well.
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let (a, b) = (&all[i].0, &all[j].0);
            if (a.value - b.value).norm() <= a.radius + b.radius {
                return Err(Error::Refinement(format!(
                    "inclusion disks around {} and {} overlap",
                    a.value, b.value
                )));
            }
        }
    }

    let snapshot: Vec<CertifiedRoot> = all.iter().map(|(r, _)| *r).collect();
    for (i, (root, _)) in all.iter_mut().enumerate() {
        if root.value.im != 0.0 && root.value.im.abs() <= root.radius {
            // The conjugate disk holds exactly one root; if it meets no other
            // disk, that root is inside this disk, hence equal to its conjugate.
            let conj = root.value.conj();
            let isolated = snapshot.iter().enumerate().all(|(j, other)| {
                j == i || (conj - other.value).norm() > root.radius + other.radius
            });
            if isolated {
                root.value.im = 0.0;
            }
        }
    }

    let worst = all.iter().map(|(r, _)| r.radius).fold(0.0, f64::max);
    if worst > precision {
        return Err(Error::Refinement(format!(
            "certified radius {worst:e} exceeds requested precision {precision:e}"
        )));
    }

    let mut out: Vec<CertifiedRoot> = all
        .into_iter()
        .flat_map(|(r, m)| std::iter::repeat_n(r, m))
        .collect();
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(out)
}

fn roots_of_squarefree(f: &RatPoly) -> Result<Vec<CertifiedRoot>> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = f.to_f64_coeffs();
    let lead = coeffs[n];
    let mut z: Vec<Complex64> = if n == 1 {
        vec![Complex64::new(-coeffs[0] / lead, 0.0)]
    } else {
        initial_guesses(&coeffs)
    };

    if n > 1 {
        aberth(&coeffs, &mut z);
    }
    // A couple of Newton steps clean up the last bits.
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (v, dv) = horner(&coeffs, *zi);
            if dv.norm() > 0.0 {
                let step = v / dv;
                if step.is_finite() {
                    *zi -= step;
                }
            }
        }
    }

    let lead_abs = lead.abs();
    let mut roots = Vec::with_capacity(n);
    for i in 0..n {
        let residual = exact_abs_value(f, z[i]);
        let mut denom = lead_abs;
        for j in 0..n {
            if j != i {
                denom *= (z[i] - z[j]).norm();
            }
        }
        if !(denom > 0.0) || !residual.is_finite() {
            return Err(Error::Refinement(format!(
                "root iteration collapsed near {}",
                z[i]
            )));
        }
        // Inflate for rounding in the denominator and the final modulus.
        let radius = n as f64 * residual / denom * (1.0 + 8.0 * (n as f64 + 2.0) * f64::EPSILON);
        roots.push(CertifiedRoot {
            value: z[i],
            radius: radius.max(f64::MIN_POSITIVE),
        });
    }
    Ok(roots)
}

fn initial_guesses(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    // Radius from the geometric mean of the root moduli, bounded by Cauchy.
    let cauchy = 1.0 + c[..n].iter().map(|a| (a / c[n]).abs()).fold(0.0, f64::max);
    let mut r = (c[0] / c[n]).abs().powf(1.0 / n as f64);
    if !(r > 0.0) || !r.is_finite() {
        r = 1.0;
    }
    r = r.min(cauchy);
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r, t)
        })
        .collect()
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::zero();
    let mut dv = Complex64::zero();
    for &a in c.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

fn aberth(c: &[f64], z: &mut [Complex64]) {
    let n = z.len();
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (v, dv) = horner(c, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let mut repulsion = Complex64::zero();
            for j in 0..n {
                if j != i {
                    repulsion += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 4.0 * f64::EPSILON {
            break;
        }
    }
}

fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// |f(z)| with f evaluated exactly over Q(i) at the dyadic point z.
fn exact_abs_value(f: &RatPoly, z: Complex64) -> f64 {
    let zr = f64_to_rational(z.re);
    let zi = f64_to_rational(z.im);
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    for a in f.coeffs().iter().rev() {
        let nre = &re * &zr - &im * &zi + a;
        let nim = &re * &zi + &im * &zr;
        re = nre;
        im = nim;
    }
    let (fr, fi) = (big_to_f64(&re), big_to_f64(&im));
    fr.hypot(fi) * (1.0 + 4.0 * f64::EPSILON)
}

fn big_to_f64(r: &BigRational) -> f64 {
    let v = rat_to_f64(r);
    if v.is_finite() {
        v
    } else {
        // Fall back on integer division for extreme magnitudes.
        let q: BigInt = r.numer() / r.denom();
        q.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn sqrt_two_pair() {
        let r = find_roots(&poly(&[-2, 0, 1]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.is_real()));
        assert!((r[0].value.re + std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((r[1].value.re - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn linear_root() {
        let r = find_roots(&poly(&[-2, 1]), DEFAULT_PRECISION).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].value, Complex64::new(2.0, 0.0));
    }

    #[test]
    fn cubic_one_real_two_complex() {
        let r = find_roots(&poly(&[-2, -2, 0, 1]), DEFAULT_PRECISION).unwrap();
        let real: Vec<_> = r.iter().filter(|x| x.is_real()).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].value.re - 1.769_292_354_238_631).abs() < 1e-12);
        let complex: Vec<_> = r.iter().filter(|x| !x.is_real()).collect();
        assert_eq!(complex.len(), 2);
        assert!((complex[0].value - complex[1].value.conj()).norm() < 1e-12);
    }

    #[test]
    fn repeated_roots_reported_with_multiplicity() {
        // (x − 1)² (x + 3)
        let r = find_roots(&poly(&[3, -5, 1, 1]), DEFAULT_PRECISION).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0].value.re + 3.0).abs() < 1e-13);
        assert!((r[1].value.re - 1.0).abs() < 1e-13);
        assert_eq!(r[1], r[2]);
    }

    #[test]
    fn unattainable_precision_is_reported() {
        let err = find_roots(&poly(&[-2, -2, 0, 1]), 1e-30).unwrap_err();
        assert!(matches!(err, Error::Refinement(_)));
    }

    #[test]
    fn high_degree_root_of_two() {
        let mut c = vec![0i64; 21];
        c[0] = -2;
        c[20] = 1;
        let r = find_roots(&poly(&c), DEFAULT_PRECISION).unwrap();
        assert_eq!(r.len(), 20);
        let target = 2f64.powf(1.0 / 20.0);
        for root in &r {
            assert!((root.value.norm() - target).abs() < 1e-12);
        }
        assert_eq!(r.iter().filter(|x| x.is_real()).count(), 2);
    }
}
