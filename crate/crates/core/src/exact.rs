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

//! Exact arithmetic over Q and over simple extensions Q(λ).
//!
//! Polynomials have rational coefficients in ascending degree order. A
//! [`NumberField`] is the quotient Q[x]/(q) by a (monic, rational) modulus q
//! whose root is the parameter λ; field elements are reduced coefficient
//! vectors of fixed length, so structural equality is equality in the
//! quotient ring. When q is irreducible this is equality of real numbers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebraic::AlgebraicNumber;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3/5"`, `"-2"` or `"0.75"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let frac_part: BigInt = frac.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mag = int_part.abs() * &den + frac_part;
        let num = if neg { -mag } else { mag };
        return Some(BigRational::new(num, den));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Polynomial with rational coefficients, ascending order, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly {
            coeffs: vec![BigRational::one()],
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has no degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => RatPoly::zero(),
            Some(l) => {
                let l = l.clone();
                RatPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
            }
        }
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let t = &rem[k] / &lead;
            if t.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] -= &t * dc;
            }
            quot[k - dd] = t;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free decomposition (Yun): returns `(factor, multiplicity)`
    /// pairs of monic, pairwise coprime, square-free factors of positive
    /// degree whose product (with multiplicities) is `self.monic()`.
    pub fn squarefree_factors(&self) -> Vec<(RatPoly, usize)> {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let fp = f.derivative();
        let g = RatPoly::gcd(&f, &fp);
        let mut c = f.div_rem(&g).0;
        let mut d = fp.div_rem(&g).0.sub(&c.derivative());
        let mut out = Vec::new();
        let mut mult = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = RatPoly::gcd(&c, &d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), mult));
            }
            c = c.div_rem(&a).0;
            d = d.div_rem(&a).0.sub(&c.derivative());
            mult += 1;
        }
        out
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The quotient ring Q[x]/(q) for a monic modulus q of degree ≥ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    modulus: RatPoly,
    /// Numerical value of the distinguished root, for diagnostics.
    approx: f64,
}

impl NumberField {
    pub fn new(modulus: RatPoly, approx: f64) -> crate::Result<Self> {
        match modulus.degree() {
            Some(d) if d >= 1 => Ok(NumberField {
                modulus: modulus.monic(),
                approx,
            }),
            _ => Err(crate::Error::domain("number field modulus must have degree >= 1")),
        }
    }

    /// The field Q, with the generator fixed to the rational `value`.
    pub fn rational(value: BigRational) -> Self {
        let approx = rat_to_f64(&value);
        NumberField {
            modulus: RatPoly::new(vec![-value, BigRational::one()]),
            approx,
        }
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(1)
    }

    pub fn modulus(&self) -> &RatPoly {
        &self.modulus
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![BigRational::zero(); self.degree()])
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElem {
        let mut v = vec![BigRational::zero(); self.degree()];
        v[0] = r;
        self.reduce(v)
    }

    pub fn one(&self) -> FieldElem {
        self.from_rational(BigRational::one())
    }

    /// The generator λ (the class of x).
    pub fn generator(&self) -> FieldElem {
        self.reduce(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_poly(&self, p: &RatPoly) -> FieldElem {
        self.reduce(p.coeffs().to_vec())
    }

    fn reduce(&self, mut v: Vec<BigRational>) -> FieldElem {
        let n = self.degree();
        let m = self.modulus.coeffs();
        if v.len() > n {
            for k in (n..v.len()).rev() {
                let t = std::mem::take(&mut v[k]);
                if t.is_zero() {
                    continue;
                }
                // x^k = x^(k-n) * x^n and x^n = -(m_0 + ... + m_{n-1} x^{n-1}).
                for (j, mj) in m.iter().take(n).enumerate() {
                    v[k - n + j] -= &t * mj;
                }
            }
            v.truncate(n);
        }
        v.resize(n, BigRational::zero());
        FieldElem(v)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &FieldElem, r: &BigRational) -> FieldElem {
        FieldElem(a.0.iter().map(|x| x * r).collect())
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let n = self.degree();
        let mut out = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        self.reduce(out)
    }

    pub fn pow(&self, a: &FieldElem, mut e: u32) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Numerical value at the distinguished root.
    pub fn to_f64(&self, a: &FieldElem) -> f64 {
        a.0.iter().rev().fold(0.0, |acc, c| acc * self.approx + rat_to_f64(c))
    }
}

/// Reduced element of a [`NumberField`]; equality is exact.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem(Vec<BigRational>);

impl FieldElem {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})λ")?,
                _ => write!(f, "({c})λ^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A similarity x ↦ scale·M·x + b with exact data: the scale and the
/// translation live in Q(λ), the orthogonal part is a rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactSimilarity {
    pub scale: FieldElem,
    /// Row-major d×d.
    pub orthogonal: Vec<BigRational>,
    pub translation: Vec<FieldElem>,
}

/// Exact companion data for every map of an IFS.
#[derive(Clone, Debug)]
pub struct ExactSystem {
    pub field: NumberField,
    pub dimension: usize,
    pub maps: Vec<ExactSimilarity>,
}

impl ExactSystem {
    pub fn identity(&self) -> ExactSimilarity {
        let d = self.dimension;
        let mut orthogonal = vec![BigRational::zero(); d * d];
        for i in 0..d {
            orthogonal[i * d + i] = BigRational::one();
        }
        ExactSimilarity {
            scale: self.field.one(),
            orthogonal,
            translation: vec![self.field.zero(); d],
        }
    }

    /// `outer ∘ inner`.
    pub fn then(&self, outer: &ExactSimilarity, inner: &ExactSimilarity) -> ExactSimilarity {
        let d = self.dimension;
        let f = &self.field;
        let mut orthogonal = vec![BigRational::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = BigRational::zero();
                for k in 0..d {
                    acc += &outer.orthogonal[i * d + k] * &inner.orthogonal[k * d + j];
                }
                orthogonal[i * d + j] = acc;
            }
        }
        let mut translation = Vec::with_capacity(d);
        for i in 0..d {
            let mut acc = f.zero();
            for k in 0..d {
                let m = &outer.orthogonal[i * d + k];
                if !m.is_zero() {
                    acc = f.add(&acc, &f.scale(&inner.translation[k], m));
                }
            }
            let t = f.add(&f.mul(&outer.scale, &acc), &outer.translation[i]);
            translation.push(t);
        }
        ExactSimilarity {
            scale: f.mul(&outer.scale, &inner.scale),
            orthogonal,
            translation,
        }
    }

    /// S_{i_1} ∘ … ∘ S_{i_k}.
    pub fn compose(&self, word: &[u8]) -> ExactSimilarity {
        let mut acc = self.identity();
        for &i in word {
            acc = self.then(&acc, &self.maps[i as usize]);
        }
        acc
    }
}

pub fn is_rational_orthogonal(m: &[BigRational], d: usize) -> bool {
    for i in 0..d {
        for j in 0..d {
            let mut acc = BigRational::zero();
            for k in 0..d {
                acc += &m[i * d + k] * &m[j * d + k];
            }
            let want = if i == j { BigRational::one() } else { BigRational::zero() };
            if acc != want {
                return false;
            }
        }
    }
    true
}

/// A contraction ratio λ with optional exact data. When `field` is present
/// its generator is λ itself.
#[derive(Clone, Debug)]
pub struct Lambda {
    pub value: f64,
    pub field: Option<NumberField>,
}

impl Lambda {
    pub fn real(value: f64) -> Self {
        Lambda { value, field: None }
    }

    pub fn rational(value: BigRational) -> Self {
        let field = NumberField::rational(value);
        Lambda {
            value: field.approx(),
            field: Some(field),
        }
    }

    /// λ = 1/θ; the field modulus is the reversed polynomial of θ.
    pub fn reciprocal(theta: &AlgebraicNumber) -> crate::Result<Self> {
        let value = 1.0 / theta.real_value()?;
        let rev = theta.polynomial().reversed()?;
        let field = NumberField::new(RatPoly::from_ints(rev.coefficients()), value)?;
        Ok(Lambda {
            value,
            field: Some(field),
        })
    }

    pub fn is_exact(&self) -> bool {
        self.field.is_some()
    }
}
