//! Affine bounds, integration chambers and exact integration over them.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::poly::{Poly1, Poly2};
use super::Rational;
use crate::error::{Error, Result};

/// `constant + slope_u * u`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct AffineFn {
    pub constant: Rational,
    pub slope_u: Rational,
}

impl AffineFn {
    pub fn new(constant: Rational, slope_u: Rational) -> Self {
        AffineFn { constant, slope_u }
    }

    pub fn constant(c: Rational) -> Self {
        AffineFn { constant: c, slope_u: Rational::zero() }
    }

    /// The line through `(u0, v0)` and `(u1, v1)`; `u0 != u1`.
    pub fn through(u0: &Rational, v0: &Rational, u1: &Rational, v1: &Rational) -> Self {
        let slope = (v1 - v0) / (u1 - u0);
        let constant = v0 - &(&slope * u0);
        AffineFn { constant, slope_u: slope }
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        &self.constant + &(&self.slope_u * u)
    }

    pub fn to_poly1(&self) -> Poly1 {
        Poly1::linear(self.constant.clone(), self.slope_u.clone())
    }
}

impl fmt::Display for AffineFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly1())
    }
}

/// Region `u_lo <= u <= u_hi`, `v_lo(u) <= v <= v_hi(u)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Chamber {
    pub u_lo: Rational,
    pub u_hi: Rational,
    pub v_lo: AffineFn,
    pub v_hi: AffineFn,
}

impl Chamber {
    pub fn new(u_lo: Rational, u_hi: Rational, v_lo: AffineFn, v_hi: AffineFn) -> Result<Self> {
        let c = Chamber { u_lo, u_hi, v_lo, v_hi };
        c.validate()?;
        Ok(c)
    }

    /// Rectangle `[u_lo, u_hi] x [v_lo, v_hi]`.
    pub fn rect(u_lo: Rational, u_hi: Rational, v_lo: Rational, v_hi: Rational) -> Result<Self> {
        Chamber::new(u_lo, u_hi, AffineFn::constant(v_lo), AffineFn::constant(v_hi))
    }

    /// Affine bounds only need checking at the two ends of the `u` range.
    pub fn validate(&self) -> Result<()> {
        if self.u_lo > self.u_hi {
            return Err(Error::InvalidChamber(format!(
                "u_lo = {} exceeds u_hi = {}",
                self.u_lo, self.u_hi
            )));
        }
        for u in [&self.u_lo, &self.u_hi] {
            if self.v_lo.eval(u) > self.v_hi.eval(u) {
                return Err(Error::InvalidChamber(format!(
                    "v_lo({u}) = {} exceeds v_hi({u}) = {}",
                    self.v_lo.eval(u),
                    self.v_hi.eval(u)
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, u: &Rational, v: &Rational) -> bool {
        u >= &self.u_lo && u <= &self.u_hi && v >= &self.v_lo.eval(u) && v <= &self.v_hi.eval(u)
    }

    pub fn area(&self) -> Rational {
        integrate_chamber(&Poly2::constant(Rational::one()), self)
            .expect("chamber validated at construction")
    }

    /// Corner points in counter-clockwise order, duplicates removed.
    pub fn polygon(&self) -> Polygon {
        Polygon::new(vec![
            (self.u_lo.clone(), self.v_lo.eval(&self.u_lo)),
            (self.u_hi.clone(), self.v_lo.eval(&self.u_hi)),
            (self.u_hi.clone(), self.v_hi.eval(&self.u_hi)),
            (self.u_lo.clone(), self.v_hi.eval(&self.u_lo)),
        ])
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} <= u <= {}, {} <= v <= {}",
            self.u_lo, self.u_hi, self.v_lo, self.v_hi
        )
    }
}

/// Exact `∫_a^b p(u) du`.
pub fn integrate_interval(p: &Poly1, a: &Rational, b: &Rational) -> Result<Rational> {
    if a > b {
        return Err(Error::InvalidInterval { lo: a.to_string(), hi: b.to_string() });
    }
    let anti = p.antiderivative();
    Ok(anti.eval(b) - anti.eval(a))
}

/// Exact iterated integral over a chamber: symbolic inner integration in `v`,
/// then `integrate_interval` in `u`.
pub fn integrate_chamber(p: &Poly2, c: &Chamber) -> Result<Rational> {
    c.validate()?;
    let inner = p.integrate_v(&c.v_lo.to_poly1(), &c.v_hi.to_poly1());
    integrate_interval(&inner, &c.u_lo, &c.u_hi)
}

/// `c + cu*u + cv*v`; the half-plane and coefficient type of chamber enumeration.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Affine2 {
    pub c: Rational,
    pub cu: Rational,
    pub cv: Rational,
}

impl Affine2 {
    pub fn new(c: Rational, cu: Rational, cv: Rational) -> Self {
        Affine2 { c, cu, cv }
    }

    pub fn eval(&self, u: &Rational, v: &Rational) -> Rational {
        &self.c + &(&self.cu * u) + &self.cv * v
    }

    pub fn to_poly2(&self) -> Poly2 {
        Poly2::affine(self.c.clone(), self.cu.clone(), self.cv.clone())
    }

    /// Inverse of `to_poly2`; `None` when the polynomial is not affine.
    pub fn from_poly2(p: &Poly2) -> Option<Self> {
        if p.total_degree() > 1 {
            return None;
        }
        Some(Affine2::new(p.coeff(0, 0), p.coeff(1, 0), p.coeff(0, 1)))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.cu.is_zero() && self.cv.is_zero()
    }
}

impl fmt::Display for Affine2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly2())
    }
}

type Point = (Rational, Rational);

/// Convex polygon in the `(u, v)` plane with exact vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Point>) -> Self {
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Shoelace area (absolute value).
    pub fn area(&self) -> Rational {
        let n = self.vertices.len();
        if n < 3 {
            return Rational::zero();
        }
        let twice: Rational = (0..n)
            .map(|i| {
                let (u0, v0) = &self.vertices[i];
                let (u1, v1) = &self.vertices[(i + 1) % n];
                u0 * v1 - u1 * v0
            })
            .sum();
        (twice / Rational::from_int(2)).abs()
    }

    /// Sutherland-Hodgman clip against `f(u, v) >= 0`.
    pub fn clip(&self, f: &Affine2) -> Polygon {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            let fp = f.eval(&p.0, &p.1);
            let fq = f.eval(&q.0, &q.1);
            if !fp.is_negative() {
                out.push(p.clone());
            }
            if (fp.is_negative() && fq.is_positive()) || (fp.is_positive() && fq.is_negative()) {
                let t = &fp / &(&fp - &fq);
                out.push((&p.0 + &(&t * &(&q.0 - &p.0)), &p.1 + &(&t * &(&q.1 - &p.1))));
            }
        }
        Polygon::new(out)
    }

    /// Cut into vertical slabs between consecutive vertex `u`-coordinates; each
    /// slab is a chamber with affine lower and upper bounds.
    pub fn to_chambers(&self) -> Vec<Chamber> {
        if self.area().is_zero() {
            return Vec::new();
        }
        let n = self.vertices.len();
        let mut us: Vec<Rational> = self.vertices.iter().map(|p| p.0.clone()).collect();
        us.sort();
        us.dedup();
        let edges: Vec<(&Point, &Point)> = (0..n)
            .map(|i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
            .filter(|(p, q)| p.0 != q.0)
            .map(|(p, q)| if p.0 < q.0 { (p, q) } else { (q, p) })
            .collect();
        let two = Rational::from_int(2);
        us.windows(2)
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let mid = (a + b) / two.clone();
                let mut spanning: Vec<(Rational, AffineFn)> = edges
                    .iter()
                    .filter(|(p, q)| &p.0 <= a && &q.0 >= b)
                    .map(|(p, q)| {
                        let line = AffineFn::through(&p.0, &p.1, &q.0, &q.1);
                        (line.eval(&mid), line)
                    })
                    .collect();
                spanning.sort_by(|x, y| x.0.cmp(&y.0));
                let lo = spanning.first().expect("convex slab has a lower edge").1.clone();
                let hi = spanning.last().expect("convex slab has an upper edge").1.clone();
                Chamber { u_lo: a.clone(), u_hi: b.clone(), v_lo: lo, v_hi: hi }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::r;

    #[test]
    fn reversed_interval_rejected() {
        assert!(integrate_interval(&Poly1::from_ints(&[1]), &r!(1), &r!(0)).is_err());
    }

    #[test]
    fn invalid_chamber_rejected() {
        let bad = Chamber {
            u_lo: r!(0),
            u_hi: r!(1),
            v_lo: AffineFn::constant(r!(1)),
            v_hi: AffineFn::new(r!(2), r!(-2)),
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidChamber(_))));
        assert!(integrate_chamber(&Poly2::constant(r!(1)), &bad).is_err());
    }

    #[test]
    fn triangle_slabs() {
        // {1 <= u <= 2, 0 <= v <= u/2} clipped from a rectangle
        let rect = Chamber::rect(r!(1), r!(2), r!(0), r!(1)).unwrap();
        let clipped = rect.polygon().clip(&Affine2::new(r!(0), r!(1 / 2), r!(-1)));
        let chambers = clipped.to_chambers();
        assert_eq!(chambers.len(), 1);
        assert_eq!(chambers[0].v_hi, AffineFn::new(r!(0), r!(1 / 2)));
        assert_eq!(clipped.area(), r!(3 / 4));
    }

    #[test]
    fn clip_to_nothing() {
        let rect = Chamber::rect(r!(0), r!(1), r!(0), r!(1)).unwrap();
        let gone = rect.polygon().clip(&Affine2::new(r!(-2), r!(0), r!(0)));
        assert!(gone.area().is_zero());
        assert!(gone.to_chambers().is_empty());
    }
}
