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

//! Integer polynomials, algebraic numbers and the Garsia / Pisot tests that
//! decide how the Bernoulli comb overlaps.

mod roots;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use roots::{find_roots, CertifiedRoot, DEFAULT_PRECISION};

use crate::{Error, Result};

/// Polynomial with integer coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    /// Trailing zero coefficients are dropped; the result must have degree ≥ 1.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::domain("polynomial must have degree >= 1"));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i64 {
        self.coeffs[self.degree()]
    }

    pub fn constant(&self) -> i64 {
        self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// x^n p(1/x): the polynomial whose roots are the reciprocals.
    pub fn reversed(&self) -> Result<Self> {
        let mut c = self.coeffs.clone();
        c.reverse();
        while c.first() == Some(&0) {
            c.remove(0);
        }
        IntPolynomial::new(c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{sign}")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Accepts ASCII such as `x^3-2x-2`, `2*x^2 + 1` or `-x+3`.
    fn from_str(s: &str) -> Result<Self> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bad = |why: &str| Error::Parse(format!("{why} in polynomial {s:?}"));
        let bytes = src.as_bytes();
        let mut coeffs: Vec<i64> = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(bad("expected + or -"));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coef: Option<i64> = if i > start {
                Some(src[start..i].parse().map_err(|_| bad("coefficient overflow"))?)
            } else {
                None
            };
            if i < bytes.len() && bytes[i] == b'*' {
                if coef.is_none() {
                    return Err(bad("dangling '*'"));
                }
                i += 1;
                if i >= bytes.len() || bytes[i] != b'x' {
                    return Err(bad("expected x after '*'"));
                }
            }
            let exp = if i < bytes.len() && bytes[i] == b'x' {
                i += 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let es = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if es == i {
                        return Err(bad("missing exponent"));
                    }
                    src[es..i].parse::<usize>().map_err(|_| bad("bad exponent"))?
                } else {
                    1
                }
            } else {
                if coef.is_none() {
                    return Err(bad("empty term"));
                }
                0
            };
            if exp > 4096 {
                return Err(bad("exponent too large"));
            }
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, 0);
            }
            let term = sign
                .checked_mul(coef.unwrap_or(1))
                .ok_or_else(|| bad("coefficient overflow"))?;
            coeffs[exp] = coeffs[exp]
                .checked_add(term)
                .ok_or_else(|| bad("coefficient overflow"))?;
        }
        IntPolynomial::new(coeffs)
    }
}

/// A root of an integer polynomial, selected by its index in the root list
/// sorted by (real part, imaginary part).
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    polynomial: IntPolynomial,
    root_index: usize,
    roots: Vec<CertifiedRoot>,
    precision: f64,
}

impl AlgebraicNumber {
    pub fn new(polynomial: IntPolynomial, root_index: usize, precision: f64) -> Result<Self> {
        let roots = find_roots(&polynomial, precision)?;
        if root_index >= roots.len() {
            return Err(Error::domain(format!(
                "root index {root_index} out of range for degree {}",
                roots.len()
            )));
        }
        Ok(AlgebraicNumber {
            polynomial,
            root_index,
            roots,
            precision,
        })
    }

    /// The largest certified real root.
    pub fn largest_real(polynomial: IntPolynomial) -> Result<Self> {
        let roots = find_roots(&polynomial, DEFAULT_PRECISION)?;
        let idx = roots
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_real())
            .max_by(|a, b| a.1.value.re.total_cmp(&b.1.value.re))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::domain(format!("{polynomial} has no real root")))?;
        Ok(AlgebraicNumber {
            polynomial,
            root_index: idx,
            roots,
            precision: DEFAULT_PRECISION,
        })
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.polynomial
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn root(&self) -> &CertifiedRoot {
        &self.roots[self.root_index]
    }

    pub fn value(&self) -> Complex64 {
        self.root().value
    }

    pub fn is_real(&self) -> bool {
        self.root().is_real()
    }

    /// Real value; errors for a non-real root.
    pub fn real_value(&self) -> Result<f64> {
        if self.is_real() {
            Ok(self.root().value.re)
        } else {
            Err(Error::domain(format!(
                "selected root {} of {} is not real",
                self.value(),
                self.polynomial
            )))
        }
    }

    pub fn roots(&self) -> &[CertifiedRoot] {
        &self.roots
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    fn conjugates(&self) -> impl Iterator<Item = &CertifiedRoot> {
        self.roots
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.root_index)
            .map(|(_, r)| r)
    }

    fn require_monic_real(&self) -> Result<f64> {
        if !self.polynomial.is_monic() {
            return Err(Error::domain(format!(
                "{} is not monic; algebraic-integer tests need a monic polynomial",
                self.polynomial
            )));
        }
        self.real_value()
    }

    fn undecidable(&self, what: String) -> Error {
        Error::Undecidable {
            what,
            precision: self.precision,
        }
    }
}

/// Positive real algebraic integer, norm ±2, every root of modulus > 1.
pub fn is_garsia(theta: &AlgebraicNumber) -> Result<bool> {
    let value = theta.require_monic_real()?;
    let r = theta.root().radius;
    if value + r <= 0.0 {
        return Ok(false);
    }
    if value - r <= 0.0 {
        return Err(theta.undecidable("sign of the selected root".into()));
    }
    if theta.polynomial.constant().abs() != 2 {
        return Ok(false);
    }
    for root in theta.roots() {
        let (lo, hi) = root.modulus_bounds();
        if lo > 1.0 {
            continue;
        }
        if hi < 1.0 {
            return Ok(false);
        }
        return Err(theta.undecidable(format!("|{}| against 1", root.value)));
    }
    Ok(true)
}

/// Real algebraic integer > 1 whose other roots all have modulus < 1.
pub fn is_pisot(theta: &AlgebraicNumber) -> Result<bool> {
    let value = theta.require_monic_real()?;
    let r = theta.root().radius;
    if value + r < 1.0 {
        return Ok(false);
    }
    if value - r <= 1.0 {
        return Err(theta.undecidable("selected root against 1".into()));
    }
    for root in theta.conjugates() {
        let (lo, hi) = root.modulus_bounds();
        if hi < 1.0 {
            continue;
        }
        if lo > 1.0 {
            return Ok(false);
        }
        return Err(theta.undecidable(format!("|{}| against 1", root.value)));
    }
    Ok(true)
}

/// A contraction ratio λ given either as a bare real or as 1/θ for an
/// algebraic θ.
#[derive(Clone, Debug)]
pub enum LambdaInput {
    Real(f64),
    Reciprocal(AlgebraicNumber),
}

impl LambdaInput {
    pub fn value(&self) -> Result<f64> {
        match self {
            LambdaInput::Real(v) => Ok(*v),
            LambdaInput::Reciprocal(theta) => Ok(1.0 / theta.real_value()?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaClass {
    GarsiaReciprocal,
    PisotReciprocal,
    Unclassified,
}

impl LambdaClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LambdaClass::GarsiaReciprocal => "garsia_reciprocal",
            LambdaClass::PisotReciprocal => "pisot_reciprocal",
            LambdaClass::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for LambdaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies 1/λ. The Garsia test runs first, so a degree-one θ = 2 (both
/// Garsia and Pisot, vacuously) reports [`LambdaClass::GarsiaReciprocal`].
pub fn classify_lambda(lambda: &LambdaInput) -> Result<LambdaClass> {
    let v = lambda.value()?;
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::domain(format!("lambda = {v} is outside (0, 1)")));
    }
    match lambda {
        LambdaInput::Real(_) => Ok(LambdaClass::Unclassified),
        LambdaInput::Reciprocal(theta) => {
            if is_garsia(theta)? {
                Ok(LambdaClass::GarsiaReciprocal)
            } else if is_pisot(theta)? {
                Ok(LambdaClass::PisotReciprocal)
            } else {
                Ok(LambdaClass::Unclassified)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(p: &str) -> AlgebraicNumber {
        AlgebraicNumber::largest_real(p.parse().unwrap()).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let p: IntPolynomial = "x^3-2x-2".parse().unwrap();
        assert_eq!(p.coefficients(), &[-2, -2, 0, 1]);
        assert_eq!(p.to_string(), "x^3-2x-2");
        let q: IntPolynomial = " 2*x^2 + 1 ".parse().unwrap();
        assert_eq!(q.coefficients(), &[1, 0, 2]);
        let r: IntPolynomial = "-x+3+x^2-x^2".parse::<IntPolynomial>().unwrap();
        assert_eq!(r.coefficients(), &[3, -1]);
        assert!("x^".parse::<IntPolynomial>().is_err());
        assert!("5".parse::<IntPolynomial>().is_err());
        assert!("x**2".parse::<IntPolynomial>().is_err());
        assert!("".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn reversed_polynomial() {
        let p: IntPolynomial = "x^2-x-1".parse().unwrap();
        assert_eq!(p.reversed().unwrap().coefficients(), &[1, -1, -1]);
    }

    #[test]
    fn garsia_examples() {
        assert!(is_garsia(&theta("x^2-2")).unwrap());
        assert!(is_garsia(&theta("x^3-2x-2")).unwrap());
        assert!(is_garsia(&theta("x^5-2")).unwrap());
        assert!(!is_garsia(&theta("x^2-x-1")).unwrap());
        // Norm 2 but a conjugate inside the unit disk: x^2 - 3x + 2 = (x-1)(x-2)
        // has a root of modulus exactly 1, which cannot be certified either way.
        assert!(matches!(
            is_garsia(&theta("x^2-3x+2")),
            Err(Error::Undecidable { .. })
        ));
    }

    #[test]
    fn golden_mean_norm_oracle() {
        // The product of the numerically computed roots equals the norm.
        let t = theta("x^2-x-1");
        let prod = t.roots().iter().fold(Complex64::new(1.0, 0.0), |a, r| a * r.value);
        assert!((prod.re.abs() - 1.0).abs() < 1e-12);
        assert!(!is_garsia(&t).unwrap());
    }

    #[test]
    fn pisot_examples() {
        assert!(is_pisot(&theta("x^2-x-1")).unwrap());
        assert!(!is_pisot(&theta("x^2-2")).unwrap());
        assert!(is_pisot(&theta("x-2")).unwrap());
        assert!(is_pisot(&theta("x^3-x-1")).unwrap());
    }

    #[test]
    fn non_monic_is_domain_error() {
        let t = theta("2x^2-3");
        assert!(matches!(is_garsia(&t), Err(Error::Domain(_))));
        assert!(matches!(is_pisot(&t), Err(Error::Domain(_))));
    }

    #[test]
    fn classification() {
        let c = |p: &str| classify_lambda(&LambdaInput::Reciprocal(theta(p))).unwrap();
        assert_eq!(c("x^2-2"), LambdaClass::GarsiaReciprocal);
        assert_eq!(c("x^2-x-1"), LambdaClass::PisotReciprocal);
        assert_eq!(c("x-2"), LambdaClass::GarsiaReciprocal);
        assert_eq!(c("x^2-3"), LambdaClass::Unclassified);
        assert_eq!(
            classify_lambda(&LambdaInput::Real(0.55)).unwrap(),
            LambdaClass::Unclassified
        );
        assert!(classify_lambda(&LambdaInput::Real(1.5)).is_err());
        // θ = 1/2 gives λ = 2.
        let half = AlgebraicNumber::largest_real("2x-1".parse().unwrap()).unwrap();
        assert!(classify_lambda(&LambdaInput::Reciprocal(half)).is_err());
    }

    #[test]
    fn garsia_implies_norm_two() {
        for p in ["x^2-2", "x^3-2", "x^3-2x-2", "x^4-2", "x^2-x-1", "x^3-x-1", "x^2-2x-2"] {
            let t = theta(p);
            if is_garsia(&t).unwrap() {
                assert_eq!(t.polynomial().constant().abs(), 2, "{p}");
            }
        }
    }
}
