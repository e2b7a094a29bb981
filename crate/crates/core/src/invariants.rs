//! S-invariants of divisors and of flags `Y > Z > P`, beta, and the
//! resulting lower bounds for the local delta-invariant.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::{integrate_chamber, integrate_interval, AffineFn, Chamber, Poly1, Poly2, Rational, Scalar};
use crate::lattice::{DivisorClass, RestrictionMap, SurfaceLattice, ThreefoldLattice};
use crate::zariski::{
    parametric_zariski, verify_threefold_certificate, AffineFamily, ChamberDecomposition, ThreefoldCertificate,
};

/// Flag data on a surface: the curve `Z`, the point `P` on it, and local
/// intersection multiplicities of other curves with `Z` at `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagData {
    pub curve: String,
    pub point: String,
    /// `(curve, point) -> local intersection multiplicity with Z`.
    pub local_mults: BTreeMap<(String, String), Rational>,
    /// Order at `P` of the different of `Z`.
    pub different_ord: Rational,
    /// Log discrepancy of the surface as a divisor over the threefold.
    pub a_surface: Rational,
}

impl FlagData {
    pub fn local_mult(&self, curve: &str) -> Result<&Rational> {
        self.local_mults
            .get(&(curve.to_string(), self.point.clone()))
            .ok_or_else(|| Error::MissingMultiplicity { curve: curve.to_string(), point: self.point.clone() })
    }

    /// Local multiplicities at a point may not exceed the global intersection number.
    pub fn check_against(&self, s: &SurfaceLattice) -> Result<()> {
        let z = &s.curve(&self.curve)?.class;
        let mut totals: BTreeMap<&str, Rational> = BTreeMap::new();
        for ((curve, _), m) in &self.local_mults {
            if m.is_negative() {
                return Err(Error::Data(format!("negative local multiplicity for {curve}")));
            }
            *totals.entry(curve).or_insert_with(Rational::zero) += m;
        }
        for (curve, total) in totals {
            let global = s.pair(&s.curve(curve)?.class, z)?;
            if total > global {
                return Err(Error::Data(format!(
                    "local multiplicities of {curve} with {} sum to {total} > {global}",
                    self.curve
                )));
            }
        }
        Ok(())
    }
}

/// Restrictions of threefold divisors to the surface as cycles of named curves.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NuData {
    pub cycles: BTreeMap<String, Vec<(String, Rational)>>,
}

impl NuData {
    /// Each cycle must have the class of the restricted divisor.
    pub fn check_against(&self, t: &ThreefoldLattice, s: &SurfaceLattice, map: &RestrictionMap) -> Result<()> {
        for (divisor, cycle) in &self.cycles {
            let mut class = s.zero::<Rational>();
            for (curve, m) in cycle {
                class = class.add(&s.curve(curve)?.class.scale(m))?;
            }
            let image = map.restrict(&t.divisor(divisor)?)?;
            if class != image {
                return Err(Error::Data(format!("{divisor} restricts to {image}, but its cycle has class {class}")));
            }
        }
        Ok(())
    }

    /// `N|_Y` as a cycle, for `N = sum c_j D_j`.
    pub fn restrict_cycle<R: Scalar>(&self, negative: &[(String, R)]) -> Result<Vec<(String, R)>> {
        let mut acc: BTreeMap<String, R> = BTreeMap::new();
        for (divisor, coeff) in negative {
            if coeff.is_zero() {
                continue;
            }
            let cycle = self.cycles.get(divisor).ok_or_else(|| Error::UnknownDivisor(divisor.clone()))?;
            for (curve, m) in cycle {
                let term = coeff.scale(m);
                let slot = acc.entry(curve.clone()).or_insert_with(R::zero);
                *slot = slot.add(&term);
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

/// `ord_P` of a cycle restricted to `Z`: `sum coeff(C) * (C . Z)_P`.
pub fn ord_restrict<R: Scalar>(w: &[(String, R)], flag: &FlagData) -> Result<R> {
    let mut acc = R::zero();
    for (curve, coeff) in w {
        if *curve == flag.curve {
            return Err(Error::FlagCurveInCycle(curve.clone()));
        }
        acc = acc.add(&coeff.scale(flag.local_mult(curve)?));
    }
    Ok(acc)
}

fn require_verified(t: &ThreefoldLattice, cert: &ThreefoldCertificate) -> Result<()> {
    let report = verify_threefold_certificate(t, &cert.divisor, cert)?;
    if !report.verdict {
        return Err(Error::UnverifiedCertificate(cert.name.clone()));
    }
    Ok(())
}

fn normalizer(t: &ThreefoldLattice, numerator: i64) -> Rational {
    Rational::new(numerator, t.degree())
}

/// `S_X(Y) = (1/(-K)^3) * integral of P(u)^3`.
pub fn s_divisor(t: &ThreefoldLattice, y_label: &str, cert: &ThreefoldCertificate) -> Result<Rational> {
    if cert.divisor != y_label {
        return Err(Error::InvalidArgument(format!("certificate {} is for {}, not {y_label}", cert.name, cert.divisor)));
    }
    require_verified(t, cert)?;
    let mut total = Rational::zero();
    for iv in &cert.intervals {
        let cube = t.triple(&iv.positive, &iv.positive, &iv.positive)?;
        total += &integrate_interval(&cube, &iv.u_lo, &iv.u_hi)?;
    }
    Ok(total * normalizer(t, 1))
}

/// `beta = A - S` for a prime divisor (`A = 1`).
pub fn beta_divisor(t: &ThreefoldLattice, y_label: &str, cert: &ThreefoldCertificate) -> Result<Rational> {
    Ok(Rational::one() - s_divisor(t, y_label, cert)?)
}

/// Everything needed to evaluate the flag invariants on one surface.
#[derive(Clone, Debug)]
pub struct FlagProblem {
    pub threefold: ThreefoldLattice,
    pub surface: SurfaceLattice,
    pub restriction: RestrictionMap,
    pub certificate: ThreefoldCertificate,
    pub flag: FlagData,
    pub nu: NuData,
    /// Pseudo-effective threshold in `v` on each certificate interval.
    pub v_upper: Vec<AffineFn>,
}

impl FlagProblem {
    pub fn validate(&self) -> Result<()> {
        if self.v_upper.len() != self.certificate.intervals.len() {
            return Err(Error::Data(format!(
                "{} v-bounds for {} certificate intervals",
                self.v_upper.len(),
                self.certificate.intervals.len()
            )));
        }
        self.flag.check_against(&self.surface)?;
        self.nu.check_against(&self.threefold, &self.surface, &self.restriction)
    }

    pub fn y_label(&self) -> &str {
        &self.certificate.divisor
    }

    pub fn z_class(&self) -> Result<DivisorClass> {
        Ok(self.surface.curve(&self.flag.curve)?.class.clone())
    }

    /// `P(u)|_Y - vZ` over `[u_lo, u_hi] x [0, v_upper(u)]`, one per interval.
    pub fn families(&self) -> Result<Vec<AffineFamily>> {
        let z = self.z_class()?;
        self.certificate
            .intervals
            .iter()
            .zip(&self.v_upper)
            .map(|(iv, vu)| {
                let restricted = self.restriction.restrict(&iv.positive)?;
                let domain = Chamber::new(iv.u_lo.clone(), iv.u_hi.clone(), AffineFn::default(), vu.clone())?;
                AffineFamily::from_poly1(&restricted, &z, domain)
            })
            .collect()
    }

    pub fn decompositions(&self) -> Result<Vec<ChamberDecomposition>> {
        self.families()?.iter().map(|f| parametric_zariski(&self.surface, f)).collect()
    }

    /// `ord_Z(N(u)|_Y)` on interval `i`.
    pub fn ord_z(&self, i: usize) -> Result<Poly1> {
        let cycle = self.nu.restrict_cycle(&self.certificate.intervals[i].negative)?;
        Ok(cycle.into_iter().find(|(c, _)| *c == self.flag.curve).map(|(_, p)| p).unwrap_or_default())
    }

    /// `N'_Y(u) = N(u)|_Y - ord_Z * Z` on interval `i`.
    pub fn n_prime(&self, i: usize) -> Result<Vec<(String, Poly1)>> {
        let cycle = self.nu.restrict_cycle(&self.certificate.intervals[i].negative)?;
        Ok(cycle.into_iter().filter(|(c, _)| *c != self.flag.curve).collect())
    }

    pub fn s_curve(&self) -> Result<Rational> {
        let decs = self.decompositions()?;
        let (a, b) = self.s_curve_terms(&decs)?;
        Ok(a + b)
    }

    /// The `ord_Z` term and the volume term of `S(W; Z)`.
    pub fn s_curve_terms(&self, decs: &[ChamberDecomposition]) -> Result<(Rational, Rational)> {
        let t = &self.threefold;
        let y = t.divisor(self.y_label())?.lift::<Poly1>();
        let c = normalizer(t, 3);
        let mut first = Rational::zero();
        let mut second = Rational::zero();
        for (i, (iv, dec)) in self.certificate.intervals.iter().zip(decs).enumerate() {
            let ord = self.ord_z(i)?;
            if !ord.is_zero() {
                let p2y = t.triple(&iv.positive, &iv.positive, &y)?;
                first += &integrate_interval(&p2y.mul(&ord), &iv.u_lo, &iv.u_hi)?;
            }
            for piece in &dec.pieces {
                let vol = self.surface.self_intersection(&piece.positive)?;
                second += &integrate_chamber(&vol, &piece.chamber)?;
            }
        }
        Ok((first * c.clone(), second * c))
    }

    pub fn s_point(&self) -> Result<Rational> {
        self.s_point_with(&self.decompositions()?)
    }

    pub fn s_point_with(&self, decs: &[ChamberDecomposition]) -> Result<Rational> {
        let t = &self.threefold;
        let z = self.z_class()?;
        let mut squares = Rational::zero();
        let mut orders = Rational::zero();
        for (i, dec) in decs.iter().enumerate() {
            let n_prime: Vec<(String, Poly2)> =
                self.n_prime(i)?.into_iter().map(|(c, p)| (c, Poly2::from_poly1_in_u(&p))).collect();
            let ord_prime = ord_restrict(&n_prime, &self.flag)?;
            for piece in &dec.pieces {
                let pz = self.surface.pair_mixed(&piece.positive, &z)?;
                squares += &integrate_chamber(&pz.mul(&pz), &piece.chamber)?;
                let local: Vec<(String, Poly2)> =
                    piece.negative.iter().map(|(c, a)| (c.clone(), a.to_poly2())).collect();
                let ord = ord_prime.add(&ord_restrict(&local, &self.flag)?);
                if !ord.is_zero() {
                    orders += &integrate_chamber(&pz.mul(&ord), &piece.chamber)?;
                }
            }
        }
        Ok(squares * normalizer(t, 3) + orders * normalizer(t, 6))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaBound {
    /// `(1 - ord_P(different)) / S(W; P)`.
    pub point_term: Rational,
    /// `1 / S(W; Z)`.
    pub curve_term: Rational,
    /// `A_X(Y) / S_X(Y)`.
    pub divisor_term: Rational,
    pub adjusted: Rational,
    /// Minimum with the different ignored.
    pub raw: Rational,
    pub caveats: Vec<String>,
}

impl DeltaBound {
    pub fn exceeds_one(&self) -> bool {
        self.adjusted > 1
    }
}

impl fmt::Display for DeltaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "min{{{}, {}, {}}} = {}",
            self.point_term, self.curve_term, self.divisor_term, self.adjusted
        )
    }
}

pub fn delta_bound(
    s_point: &Rational,
    s_curve: &Rational,
    s_divisor: &Rational,
    different_ord: &Rational,
    a_surface: &Rational,
) -> Result<DeltaBound> {
    for (name, s) in [("S(W; P)", s_point), ("S(W; Z)", s_curve), ("S_X(Y)", s_divisor)] {
        if !s.is_positive() {
            return Err(Error::InvalidArgument(format!("{name} = {s} must be positive")));
        }
    }
    let point_term = (Rational::one() - different_ord) / s_point.clone();
    let curve_term = Rational::one() / s_curve.clone();
    let divisor_term = a_surface / s_divisor;
    let adjusted = point_term.clone().min(curve_term.clone()).min(divisor_term.clone());
    let raw = (Rational::one() / s_point.clone()).min(curve_term.clone()).min(divisor_term.clone());
    let mut caveats = Vec::new();
    for (name, term) in [("point", &point_term), ("curve", &curve_term), ("divisor", &divisor_term)] {
        if *term == adjusted {
            caveats.push(format!(
                "minimum {adjusted} attained by the {name} term; the equality case is not adjudicated"
            ));
        }
    }
    if raw != adjusted {
        caveats.push(format!("ignoring the different would give {raw}"));
    }
    Ok(DeltaBound { point_term, curve_term, divisor_term, adjusted, raw, caveats })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothFiberBound {
    /// `(P(u)|_Y)^2` per certificate interval.
    pub restricted_squares: Vec<Poly1>,
    /// Intervals on which `P(u)|_Y = -K_Y`.
    pub anticanonical: Vec<bool>,
    /// Integral of the restricted square over the other intervals.
    pub integral: Rational,
    /// Restricted square where `P(u)|_Y` first departs from `-K_Y`.
    pub at_break: Option<Rational>,
    /// Coefficient of `A_Y(Z)` in the bound.
    pub value: Rational,
}

/// `(3/(-K)^3) * (vol(-K_Y) * len / delta_lb + integral of (P(u)|_Y)^2)`,
/// the first summand over intervals where `P(u)|_Y = -K_Y`, the second over
/// the rest.
pub fn smooth_fiber_bound(
    t: &ThreefoldLattice,
    s: &SurfaceLattice,
    map: &RestrictionMap,
    cert: &ThreefoldCertificate,
    delta_lb: &Rational,
) -> Result<SmoothFiberBound> {
    if !delta_lb.is_positive() {
        return Err(Error::InvalidArgument(format!("delta lower bound {delta_lb} must be positive")));
    }
    require_verified(t, cert)?;
    let anti = s.anticanonical().lift::<Poly1>();
    let vol_anti = s.self_intersection(&s.anticanonical())?;
    let mut squares = Vec::new();
    let mut flags = Vec::new();
    let mut fixed = Rational::zero();
    let mut integral = Rational::zero();
    let mut at_break = None;
    for iv in &cert.intervals {
        let restricted = map.restrict(&iv.positive)?;
        let sq = s.self_intersection(&restricted)?;
        let is_anti = restricted == anti;
        if is_anti {
            fixed += &(&vol_anti * &(&iv.u_hi - &iv.u_lo) / delta_lb.clone());
        } else {
            integral += &integrate_interval(&sq, &iv.u_lo, &iv.u_hi)?;
            at_break.get_or_insert_with(|| sq.eval(&iv.u_lo));
        }
        squares.push(sq);
        flags.push(is_anti);
    }
    let value = (fixed + integral.clone()) * normalizer(t, 3);
    Ok(SmoothFiberBound { restricted_squares: squares, anticanonical: flags, integral, at_break, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::r;

    #[test]
    fn s_divisor_of_f2() {
        let t = data::threefold().unwrap();
        let cert = data::certificate(&t, "zd_f2").unwrap();
        assert_eq!(s_divisor(&t, "F2", &cert).unwrap(), r!(45 / 56));
        assert_eq!(beta_divisor(&t, "F2", &cert).unwrap(), r!(11 / 56));
        assert!(s_divisor(&t, "F1", &cert).is_err());
    }

    #[test]
    fn unverified_certificate_is_rejected() {
        let t = data::threefold().unwrap();
        let mut cert = data::certificate(&t, "zd_f2").unwrap();
        cert.intervals[0].negative.push(("D".into(), Poly1::from_ints(&[1])));
        assert!(matches!(s_divisor(&t, "F2", &cert), Err(Error::UnverifiedCertificate(_))));
    }

    fn flag(curve: &str, mults: &[(&str, Rational)]) -> FlagData {
        FlagData {
            curve: curve.into(),
            point: "P".into(),
            local_mults: mults.iter().map(|(c, m)| ((c.to_string(), "P".to_string()), m.clone())).collect(),
            different_ord: r!(0),
            a_surface: r!(1),
        }
    }

    #[test]
    fn ord_restrict_examples() {
        let f = flag("E1", &[("E2", r!(1)), ("E", r!(0))]);
        let w = vec![("E2".to_string(), Poly2::affine(r!(-2), r!(1), r!(1)))];
        assert_eq!(ord_restrict(&w, &f).unwrap(), Poly2::affine(r!(-2), r!(1), r!(1)));
        assert_eq!(ord_restrict::<Rational>(&[], &f).unwrap(), r!(0));
        let off = vec![("E".to_string(), r!(1 / 2))];
        assert_eq!(ord_restrict(&off, &f).unwrap(), r!(0));
        let missing = vec![("G".to_string(), r!(1))];
        assert!(matches!(ord_restrict(&missing, &f), Err(Error::MissingMultiplicity { .. })));
        let own = vec![("E1".to_string(), r!(1))];
        assert!(matches!(ord_restrict(&own, &f), Err(Error::FlagCurveInCycle(_))));
    }

    #[test]
    fn delta_bound_components() {
        let b = delta_bound(&r!(11 / 14), &r!(135 / 336), &r!(45 / 56), &r!(0), &r!(1)).unwrap();
        assert_eq!(b.point_term, r!(14 / 11));
        assert_eq!(b.curve_term, r!(336 / 135));
        assert_eq!(b.adjusted, r!(56 / 45));
        assert_eq!(b.raw, b.adjusted);
        assert!(b.exceeds_one());
        assert_eq!(b.caveats.len(), 1);
        let half = delta_bound(&r!(11 / 28), &r!(45 / 56), &r!(45 / 56), &r!(1 / 2), &r!(1)).unwrap();
        assert_eq!(half.point_term, r!(14 / 11));
        assert_eq!(half.raw, r!(56 / 45));
        assert!(delta_bound(&r!(0), &r!(1), &r!(1), &r!(0), &r!(1)).is_err());
    }

    #[test]
    fn beta_zero_when_s_is_one() {
        assert_eq!(Rational::one() - r!(1), r!(0));
    }

    #[test]
    fn smooth_fiber_values() {
        let t = data::threefold().unwrap();
        let s = data::surface("f1_sextic").unwrap();
        let map = data::restriction("f1_sextic").unwrap();
        let cert = data::certificate(&t, "zd2_f1").unwrap();
        let b = smooth_fiber_bound(&t, &s, &map, &cert, &r!(1)).unwrap();
        assert_eq!(b.restricted_squares[1], Poly1::from_ints(&[8, 0, -8]));
        assert_eq!(b.integral, r!(5 / 3));
        assert_eq!(b.at_break, Some(r!(6)));
        assert_eq!(b.value, r!(1));
        let b2 = smooth_fiber_bound(&t, &s, &map, &cert, &r!(2)).unwrap();
        assert_eq!(b2.value, r!(19 / 28));
        assert!(smooth_fiber_bound(&t, &s, &map, &cert, &r!(0)).is_err());
    }

    #[test]
    fn mult1_square_identity() {
        // (-K - vC - (v-1)E)^2 = (2 - v)^2
        let s = data::surface("mult1_cubic").unwrap();
        let v = Poly1::u();
        let one = Poly1::from_ints(&[1]);
        let c = s.curve("C").unwrap().class.lift::<Poly1>();
        let e = s.curve("E").unwrap().class.lift::<Poly1>();
        let d = s
            .anticanonical()
            .lift::<Poly1>()
            .sub(&c.times(&v))
            .and_then(|x| x.sub(&e.times(&v.sub(&one))))
            .unwrap();
        let two_minus_v = Poly1::from_ints(&[2, -1]);
        assert_eq!(s.self_intersection(&d).unwrap(), two_minus_v.mul(&two_minus_v));
    }
}
