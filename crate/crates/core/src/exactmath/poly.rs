//! Univariate and bivariate polynomials over the rationals, plus the small
//! `Scalar` abstraction that lets divisor classes carry polynomial
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// Coefficient ring for divisor classes: `Rational`, `Poly1` or `Poly2`.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn constant(r: Rational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn is_zero(&self) -> bool;

    fn neg(&self) -> Self {
        self.scale(&Rational::from_int(-1))
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn constant(r: Rational) -> Self {
        r
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

/// Polynomial in the single variable `u`; `coeffs[k]` multiplies `u^k`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly1 {
    coeffs: Vec<Rational>,
}

impl Poly1 {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly1 { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly1::new(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Poly1::new(vec![c])
    }

    /// The monomial `u`.
    pub fn u() -> Self {
        Poly1::from_ints(&[0, 1])
    }

    /// `a + b*u`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly1::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * u + c;
        }
        acc
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Poly1::constant(Rational::one());
        for _ in 0..exp {
            out = Scalar::mul(&out, self);
        }
        out
    }

    pub fn antiderivative(&self) -> Self {
        let mut out = vec![Rational::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c / &Rational::from_int(k as i64 + 1));
        }
        Poly1::new(out)
    }

    /// Composition `self(inner(u))`.
    pub fn compose(&self, inner: &Poly1) -> Self {
        let mut acc = Poly1::default();
        for c in self.coeffs.iter().rev() {
            acc = Scalar::add(&Scalar::mul(&acc, inner), &Poly1::constant(c.clone()));
        }
        acc
    }
}

impl Scalar for Poly1 {
    fn zero() -> Self {
        Poly1::default()
    }
    fn constant(r: Rational) -> Self {
        Poly1::constant(r)
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly1::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly1::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly1::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly1::new(out)
    }
    fn scale(&self, r: &Rational) -> Self {
        Poly1::new(self.coeffs.iter().map(|c| c * r).collect())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Rational, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, mono) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        if mono.is_empty() {
            write!(f, "{mag}")?;
        } else if mag == 1 {
            write!(f, "{mono}")?;
        } else {
            write!(f, "{mag}*{mono}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn monomial(var: &str, k: u32) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

impl fmt::Display for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.coeffs.iter().enumerate().map(|(k, c)| (c, monomial("u", k as u32))),
        )
    }
}

impl fmt::Debug for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly1({self})")
    }
}

impl Serialize for Poly1 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly1 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Poly1::new(Vec::<Rational>::deserialize(deserializer)?))
    }
}

/// Polynomial in `(u, v)`, keyed by `(deg_u, deg_v)`. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Poly2 {
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Rational)>) -> Self {
        let mut p = Poly2::default();
        for (k, c) in terms {
            p.add_term(k, &c);
        }
        p
    }

    pub fn constant(c: Rational) -> Self {
        Poly2::from_terms([((0, 0), c)])
    }

    pub fn u() -> Self {
        Poly2::constant(Rational::one()).shift(1, 0)
    }

    pub fn v() -> Self {
        Poly2::constant(Rational::one()).shift(0, 1)
    }

    /// `c + a*u + b*v`.
    pub fn affine(c: Rational, a: Rational, b: Rational) -> Self {
        Poly2::from_terms([((0, 0), c), ((1, 0), a), ((0, 1), b)])
    }

    pub fn from_poly1_in_u(p: &Poly1) -> Self {
        Poly2::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| ((k as u32, 0), c.clone())))
    }

    fn add_term(&mut self, key: (u32, u32), c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn shift(&self, du: u32, dv: u32) -> Self {
        Poly2 {
            terms: self.terms.iter().map(|(&(i, j), c)| ((i + du, j + dv), c.clone())).collect(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, deg_u: u32, deg_v: u32) -> Rational {
        self.terms.get(&(deg_u, deg_v)).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|&(i, j)| (i + j) as i64).max().unwrap_or(-1)
    }

    pub fn eval(&self, u: &Rational, v: &Rational) -> Rational {
        self.terms.iter().map(|(&(i, j), c)| c * &u.pow(i) * v.pow(j)).sum()
    }

    /// Fix `u`, leaving a polynomial in `v` (returned as a `Poly1` in its own variable).
    pub fn eval_u(&self, u: &Rational) -> Poly1 {
        let deg = self.terms.keys().map(|&(_, j)| j).max().map_or(0, |d| d as usize + 1);
        let mut out = vec![Rational::zero(); deg];
        for (&(i, j), c) in &self.terms {
            out[j as usize] += &(c * &u.pow(i));
        }
        Poly1::new(out)
    }

    /// `∫_{lo(u)}^{hi(u)} self(u, v) dv` as a polynomial in `u`.
    pub fn integrate_v(&self, lo: &Poly1, hi: &Poly1) -> Poly1 {
        let mut acc = Poly1::default();
        for (&(i, j), c) in &self.terms {
            let k = j + 1;
            let span = Scalar::sub(&hi.pow(k), &lo.pow(k));
            let factor = c / &Rational::from_int(k as i64);
            let mono = Poly1::new(
                std::iter::repeat_n(Rational::zero(), i as usize)
                    .chain(std::iter::once(factor))
                    .collect(),
            );
            acc = Scalar::add(&acc, &Scalar::mul(&mono, &span));
        }
        acc
    }

    /// Swap the roles of `u` and `v`.
    pub fn transpose(&self) -> Self {
        Poly2 { terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect() }
    }
}

impl Scalar for Poly2 {
    fn zero() -> Self {
        Poly2::default()
    }
    fn constant(r: Rational) -> Self {
        Poly2::constant(r)
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        out
    }
    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, &-c);
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Poly2::default();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                out.add_term((i + k, j + l), &(a * b));
            }
        }
        out
    }
    fn scale(&self, r: &Rational) -> Self {
        Poly2::from_terms(self.terms.iter().map(|(k, c)| (*k, c * r)))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms.iter().map(|(&(i, j), c)| {
                let mono = match (monomial("u", i), monomial("v", j)) {
                    (a, b) if a.is_empty() => b,
                    (a, b) if b.is_empty() => a,
                    (a, b) => format!("{a}*{b}"),
                };
                (c, mono)
            }),
        )
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({self})")
    }
}
