//! Zariski decomposition on surfaces, pointwise and over two-parameter
//! affine families, and verification of piecewise threefold decompositions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::linalg::{self, Matrix};
use crate::exactmath::{Affine2, Chamber, Poly1, Poly2, Rational};
use crate::lattice::{nef_violation, DivisorClass, SurfaceLattice, ThreefoldLattice};

/// `input = positive + sum(coeff * curve)`.
#[derive(Clone, PartialEq, Debug)]
pub struct ZariskiResult {
    pub positive: DivisorClass,
    /// Sorted by curve label; coefficients strictly positive.
    pub negative: Vec<(String, Rational)>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Decomposition {
    Decomposed(ZariskiResult),
    NotPseudoeffective,
}

impl Decomposition {
    pub fn result(&self) -> Option<&ZariskiResult> {
        match self {
            Decomposition::Decomposed(r) => Some(r),
            Decomposition::NotPseudoeffective => None,
        }
    }
}

fn support_gram(l: &SurfaceLattice, support: &[usize]) -> Result<Matrix> {
    let curves = l.negative_curves();
    support
        .iter()
        .map(|&i| support.iter().map(|&j| l.pair(&curves[i].class, &curves[j].class)).collect())
        .collect()
}

/// Fujita-style iteration: grow the support by the negative curves that pair
/// negatively with the current positive part, re-solving from the input
/// each round. A support that stops being negative definite, a negative
/// coefficient, or a failing cone-curve test means the input is not
/// pseudo-effective against the declared curve data.
pub fn zariski_decompose(l: &SurfaceLattice, d: &DivisorClass) -> Result<Decomposition> {
    let curves = l.negative_curves();
    let mut support: Vec<usize> = Vec::new();
    let mut positive = d.clone();
    let mut coeffs: Vec<Rational> = Vec::new();
    for _round in 0..=curves.len() {
        let mut grew = false;
        for (i, c) in curves.iter().enumerate() {
            if !support.contains(&i) && l.pair(&positive, &c.class)?.is_negative() {
                support.push(i);
                grew = true;
            }
        }
        if !grew {
            if coeffs.iter().any(Rational::is_negative) {
                return Ok(Decomposition::NotPseudoeffective);
            }
            for c in l.cone_curves() {
                if l.pair(&positive, &c.class)?.is_negative() {
                    return Ok(Decomposition::NotPseudoeffective);
                }
            }
            if l.self_intersection(&positive)?.is_negative() {
                return Ok(Decomposition::NotPseudoeffective);
            }
            let mut negative: Vec<(String, Rational)> = support
                .iter()
                .zip(&coeffs)
                .filter(|(_, a)| !a.is_zero())
                .map(|(&i, a)| (curves[i].label.clone(), a.clone()))
                .collect();
            negative.sort_by(|a, b| a.0.cmp(&b.0));
            return Ok(Decomposition::Decomposed(ZariskiResult { positive, negative }));
        }
        support.sort_unstable();
        let gram = support_gram(l, &support)?;
        if !linalg::is_negative_definite(&gram) {
            return Ok(Decomposition::NotPseudoeffective);
        }
        let inv = linalg::inverse(&gram).expect("negative definite matrices are invertible");
        let rhs = support
            .iter()
            .map(|&i| l.pair(d, &curves[i].class))
            .collect::<Result<Vec<_>>>()?;
        coeffs = linalg::mat_vec(&inv, &rhs);
        positive = d.clone();
        for (&i, a) in support.iter().zip(&coeffs) {
            positive = positive.sub(&curves[i].class.scale(a))?;
        }
    }
    Err(Error::IterationLimit(curves.len() + 1))
}

/// `P^2` of the Zariski decomposition, or 0 outside the pseudo-effective cone.
pub fn volume_surface(l: &SurfaceLattice, d: &DivisorClass) -> Result<Rational> {
    match zariski_decompose(l, d)? {
        Decomposition::Decomposed(r) => l.self_intersection(&r.positive),
        Decomposition::NotPseudoeffective => Ok(Rational::zero()),
    }
}

/// `base + u*dir_u + v*dir_v` over `domain`.
#[derive(Clone, Debug)]
pub struct AffineFamily {
    pub base: DivisorClass,
    pub dir_u: DivisorClass,
    pub dir_v: DivisorClass,
    pub domain: Chamber,
}

impl AffineFamily {
    pub fn new(base: DivisorClass, dir_u: DivisorClass, dir_v: DivisorClass, domain: Chamber) -> Result<Self> {
        for other in [&dir_u, &dir_v] {
            if other.owner() != base.owner() {
                return Err(Error::OwnerMismatch { expected: base.owner().into(), found: other.owner().into() });
            }
        }
        domain.validate()?;
        Ok(AffineFamily { base, dir_u, dir_v, domain })
    }

    /// From a class with coefficients affine in `u`, minus `v` times a curve class.
    pub fn from_poly1(class: &DivisorClass<Poly1>, minus_v: &DivisorClass, domain: Chamber) -> Result<Self> {
        if let Some(bad) = class.coeffs().iter().find(|p| p.degree() > 1) {
            return Err(Error::NonAffineFamily(format!("coefficient {bad} has degree > 1")));
        }
        let base = class.map(|p| p.coeff(0));
        let dir_u = class.map(|p| p.coeff(1));
        AffineFamily::new(base, dir_u, minus_v.scale(&Rational::from_int(-1)), domain)
    }

    pub fn at(&self, u: &Rational, v: &Rational) -> DivisorClass {
        self.base
            .add(&self.dir_u.scale(u))
            .and_then(|x| x.add(&self.dir_v.scale(v)))
            .expect("family classes share an owner")
    }

    pub fn as_poly2(&self) -> DivisorClass<Poly2> {
        let u = Poly2::u();
        let v = Poly2::v();
        self.base
            .lift::<Poly2>()
            .add(&self.dir_u.lift::<Poly2>().times(&u))
            .and_then(|x| x.add(&self.dir_v.lift::<Poly2>().times(&v)))
            .expect("family classes share an owner")
    }
}

/// One region of a chamber decomposition, with its decomposition formulas.
#[derive(Clone, PartialEq, Debug)]
pub struct ChamberPiece {
    pub chamber: Chamber,
    /// Sorted labels of curves with a nonzero negative coefficient.
    pub support: Vec<String>,
    pub negative: Vec<(String, Affine2)>,
    pub positive: DivisorClass<Poly2>,
}

impl ChamberPiece {
    pub fn positive_at(&self, u: &Rational, v: &Rational) -> DivisorClass {
        self.positive.map(|p| p.eval(u, v))
    }

    pub fn negative_at(&self, u: &Rational, v: &Rational) -> Vec<(String, Rational)> {
        self.negative
            .iter()
            .map(|(l, a)| (l.clone(), a.eval(u, v)))
            .filter(|(_, a)| !a.is_zero())
            .collect()
    }
}

impl fmt::Display for ChamberPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] N = ", self.chamber)?;
        if self.negative.is_empty() {
            write!(f, "0")?;
        }
        for (i, (label, a)) in self.negative.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a}){label}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ChamberDecomposition {
    pub domain: Chamber,
    pub pieces: Vec<ChamberPiece>,
}

impl ChamberDecomposition {
    pub fn total_area(&self) -> Rational {
        self.pieces.iter().map(|p| p.chamber.area()).sum()
    }

    /// A piece containing `(u, v)`; on shared boundaries the first one wins,
    /// and either gives the same decomposition there.
    pub fn locate(&self, u: &Rational, v: &Rational) -> Option<&ChamberPiece> {
        self.pieces.iter().find(|p| p.chamber.contains(u, v))
    }
}

fn affine_of(p: &Poly2) -> Result<Affine2> {
    Affine2::from_poly2(p).ok_or_else(|| Error::NonAffineFamily(format!("pairing {p} is not affine in (u, v)")))
}

/// Enumerate candidate supports among the lattice's negative curves and
/// return the regions of the domain where each one gives the decomposition.
pub fn parametric_zariski(l: &SurfaceLattice, fam: &AffineFamily) -> Result<ChamberDecomposition> {
    if fam.base.owner() != l.name() {
        return Err(Error::OwnerMismatch { expected: l.name().into(), found: fam.base.owner().into() });
    }
    let curves = l.negative_curves();
    let d = fam.as_poly2();
    let domain_poly = fam.domain.polygon();
    let domain_area = fam.domain.area();

    let mut masks: Vec<u32> = (0..(1u32 << curves.len())).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    let mut pieces = Vec::new();
    for mask in masks {
        let support: Vec<usize> = (0..curves.len()).filter(|i| mask & (1 << i) != 0).collect();
        let gram = support_gram(l, &support)?;
        if !linalg::is_negative_definite(&gram) {
            continue;
        }
        let inv = linalg::inverse(&gram).expect("negative definite matrices are invertible");
        let rhs = support
            .iter()
            .map(|&i| l.pair_mixed(&d, &curves[i].class).and_then(|p| affine_of(&p)))
            .collect::<Result<Vec<_>>>()?;
        let coeffs: Vec<Affine2> = inv
            .iter()
            .map(|row| {
                row.iter().zip(&rhs).fold(Affine2::default(), |acc, (g, a)| {
                    Affine2::new(&acc.c + &(g * &a.c), &acc.cu + &(g * &a.cu), &acc.cv + &(g * &a.cv))
                })
            })
            .collect();
        if coeffs.iter().any(Affine2::is_zero) {
            // a smaller support already describes this region
            continue;
        }
        let mut positive = d.clone();
        for (&i, a) in support.iter().zip(&coeffs) {
            positive = positive.sub(&curves[i].class.lift::<Poly2>().times(&a.to_poly2()))?;
        }

        let mut region = domain_poly.clone();
        for a in &coeffs {
            region = region.clip(a);
        }
        for (i, c) in curves.iter().enumerate() {
            if !support.contains(&i) {
                region = region.clip(&affine_of(&l.pair_mixed(&positive, &c.class)?)?);
            }
        }
        for c in l.cone_curves() {
            region = region.clip(&affine_of(&l.pair_mixed(&positive, &c.class)?)?);
        }
        if region.area().is_zero() {
            continue;
        }
        let mut negative: Vec<(String, Affine2)> =
            support.iter().zip(&coeffs).map(|(&i, a)| (curves[i].label.clone(), a.clone())).collect();
        negative.sort_by(|a, b| a.0.cmp(&b.0));
        let labels: Vec<String> = negative.iter().map(|(l, _)| l.clone()).collect();
        for chamber in region.to_chambers() {
            pieces.push(ChamberPiece {
                chamber,
                support: labels.clone(),
                negative: negative.clone(),
                positive: positive.clone(),
            });
        }
    }

    let mut pieces = merge_pieces(pieces);
    let two = Rational::from_int(2);
    pieces.sort_by(|a, b| {
        let ma = (&a.chamber.u_lo + &a.chamber.u_hi) / two.clone();
        let mb = (&b.chamber.u_lo + &b.chamber.u_hi) / two.clone();
        (&a.chamber.u_lo, a.chamber.v_lo.eval(&ma), &a.chamber.u_hi)
            .cmp(&(&b.chamber.u_lo, b.chamber.v_lo.eval(&mb), &b.chamber.u_hi))
    });
    let decomposition = ChamberDecomposition { domain: fam.domain.clone(), pieces };
    let covered = decomposition.total_area();
    if covered < domain_area {
        return Err(Error::DomainNotCovered { covered: covered.to_string(), domain: domain_area.to_string() });
    }
    if covered > domain_area {
        return Err(Error::OverlappingChambers { covered: covered.to_string(), domain: domain_area.to_string() });
    }
    Ok(decomposition)
}

fn try_merge(a: &ChamberPiece, b: &ChamberPiece) -> Option<Chamber> {
    if a.support != b.support {
        return None;
    }
    let (ca, cb) = (&a.chamber, &b.chamber);
    if ca.u_lo == cb.u_lo && ca.u_hi == cb.u_hi {
        if ca.v_hi == cb.v_lo {
            return Some(Chamber { v_hi: cb.v_hi.clone(), ..ca.clone() });
        }
        if cb.v_hi == ca.v_lo {
            return Some(Chamber { v_hi: ca.v_hi.clone(), ..cb.clone() });
        }
    }
    if ca.v_lo == cb.v_lo && ca.v_hi == cb.v_hi {
        if ca.u_hi == cb.u_lo {
            return Some(Chamber { u_hi: cb.u_hi.clone(), ..ca.clone() });
        }
        if cb.u_hi == ca.u_lo {
            return Some(Chamber { u_hi: ca.u_hi.clone(), ..cb.clone() });
        }
    }
    None
}

fn merge_pieces(mut pieces: Vec<ChamberPiece>) -> Vec<ChamberPiece> {
    'outer: loop {
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                if let Some(merged) = try_merge(&pieces[i], &pieces[j]) {
                    pieces[i].chamber = merged;
                    pieces.remove(j);
                    continue 'outer;
                }
            }
        }
        return pieces;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NegativeTermData {
    pub divisor: String,
    pub coeff: Poly1,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateIntervalData {
    pub u_lo: Rational,
    pub u_hi: Rational,
    pub positive: Vec<Poly1>,
    pub negative: Vec<NegativeTermData>,
}

/// On-disk form of a piecewise threefold decomposition of `-K - uY`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreefoldCertificateData {
    pub name: String,
    pub divisor: String,
    pub intervals: Vec<CertificateIntervalData>,
}

#[derive(Clone, Debug)]
pub struct CertificateInterval {
    pub u_lo: Rational,
    pub u_hi: Rational,
    pub positive: DivisorClass<Poly1>,
    pub negative: Vec<(String, Poly1)>,
}

#[derive(Clone, Debug)]
pub struct ThreefoldCertificate {
    pub name: String,
    pub divisor: String,
    pub intervals: Vec<CertificateInterval>,
}

impl ThreefoldCertificate {
    pub fn from_data(t: &ThreefoldLattice, data: &ThreefoldCertificateData) -> Result<Self> {
        t.divisor(&data.divisor)?;
        let intervals = data
            .intervals
            .iter()
            .map(|iv| {
                if iv.positive.len() != t.rank() {
                    return Err(Error::RankMismatch {
                        lattice: t.name().to_string(),
                        expected: t.rank(),
                        found: iv.positive.len(),
                    });
                }
                for n in &iv.negative {
                    t.divisor(&n.divisor)?;
                }
                Ok(CertificateInterval {
                    u_lo: iv.u_lo.clone(),
                    u_hi: iv.u_hi.clone(),
                    positive: DivisorClass::new(t.name_arc().clone(), iv.positive.clone()),
                    negative: iv.negative.iter().map(|n| (n.divisor.clone(), n.coeff.clone())).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ThreefoldCertificate { name: data.name.clone(), divisor: data.divisor.clone(), intervals })
    }

    pub fn to_data(&self) -> ThreefoldCertificateData {
        ThreefoldCertificateData {
            name: self.name.clone(),
            divisor: self.divisor.clone(),
            intervals: self
                .intervals
                .iter()
                .map(|iv| CertificateIntervalData {
                    u_lo: iv.u_lo.clone(),
                    u_hi: iv.u_hi.clone(),
                    positive: iv.positive.coeffs().to_vec(),
                    negative: iv
                        .negative
                        .iter()
                        .map(|(d, c)| NegativeTermData { divisor: d.clone(), coeff: c.clone() })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Interval index containing `u` (the first one on a shared endpoint).
    pub fn interval_at(&self, u: &Rational) -> Option<usize> {
        self.intervals.iter().position(|iv| &iv.u_lo <= u && u <= &iv.u_hi)
    }
}

impl CertificateInterval {
    /// `N(u)` as a threefold class.
    pub fn negative_class(&self, t: &ThreefoldLattice) -> Result<DivisorClass<Poly1>> {
        let mut acc = t.class(vec![Rational::zero(); t.rank()])?.lift::<Poly1>();
        for (label, coeff) in &self.negative {
            acc = acc.add(&t.divisor(label)?.lift::<Poly1>().times(coeff))?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<usize>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    fn new(name: &str, interval: Option<usize>, witness: Option<String>) -> Self {
        CheckResult { name: name.to_string(), interval, pass: witness.is_none(), witness }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub certificate: String,
    pub divisor: String,
    pub checks: Vec<CheckResult>,
    pub verdict: bool,
}

impl CertificateReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Check a piecewise decomposition `-K - uY = P(u) + N(u)`: additivity,
/// nonnegative `N`, nef `P`, orthogonality `P^2 . D_j = 0` on the support of
/// `N`, continuity of `P`, and that the intervals partition `[0, tau(Y)]`.
/// Failures are reported with witnesses; only malformed input is an error.
pub fn verify_threefold_certificate(
    t: &ThreefoldLattice,
    y_label: &str,
    cert: &ThreefoldCertificate,
) -> Result<CertificateReport> {
    let y = t.divisor(y_label)?;
    let (tau, _) = t.thresholds(&y)?;
    let mut checks = Vec::new();

    let partition_witness = if cert.divisor != y_label {
        Some(format!("certificate is for {}, not {y_label}", cert.divisor))
    } else if cert.intervals.is_empty() {
        Some("no intervals".into())
    } else if !cert.intervals[0].u_lo.is_zero() {
        Some(format!("first interval starts at {}", cert.intervals[0].u_lo))
    } else if let Some(w) = cert.intervals.windows(2).find(|w| w[0].u_hi != w[1].u_lo) {
        Some(format!("gap or overlap between {} and {}", w[0].u_hi, w[1].u_lo))
    } else if let Some(iv) = cert.intervals.iter().find(|iv| iv.u_lo >= iv.u_hi) {
        Some(format!("empty interval [{}, {}]", iv.u_lo, iv.u_hi))
    } else if cert.intervals.last().map(|iv| &iv.u_hi) != Some(&tau) {
        Some(format!("last interval ends at {}, tau = {tau}", cert.intervals.last().unwrap().u_hi))
    } else {
        None
    };
    checks.push(CheckResult::new("partition of [0, tau]", None, partition_witness));

    let family = t.anticanonical().lift::<Poly1>().sub(&y.lift::<Poly1>().times(&Poly1::u()))?;
    for (idx, iv) in cert.intervals.iter().enumerate() {
        let at = Some(idx);
        let n_class = iv.negative_class(t)?;
        let sum = iv.positive.add(&n_class)?;
        let additivity = (sum != family).then(|| format!("P + N = {sum}, expected {family}"));
        checks.push(CheckResult::new("P + N = -K - uY", at, additivity));

        let mut neg_witness = None;
        for (label, coeff) in &iv.negative {
            if coeff.degree() > 1 {
                neg_witness = Some(format!("coefficient of {label} is not affine: {coeff}"));
                break;
            }
            for u in [&iv.u_lo, &iv.u_hi] {
                let value = coeff.eval(u);
                if value.is_negative() {
                    neg_witness = Some(format!("coefficient of {label} is {value} at u = {u}"));
                }
            }
        }
        checks.push(CheckResult::new("N >= 0", at, neg_witness));

        let nef_witness = match nef_violation(t, &iv.positive, &iv.u_lo, &iv.u_hi) {
            Ok(None) => None,
            Ok(Some((curve, u, value))) => Some(format!("P . {curve} = {value} at u = {u}")),
            Err(e) => Some(e.to_string()),
        };
        checks.push(CheckResult::new("P nef", at, nef_witness));

        let mut orth_witness = None;
        for (label, coeff) in &iv.negative {
            if coeff.is_zero() {
                continue;
            }
            let dj = t.divisor(label)?.lift::<Poly1>();
            let value = t.triple(&iv.positive, &iv.positive, &dj)?;
            if !value.is_zero() {
                orth_witness = Some(format!("P^2 . {label} = {value}"));
            }
        }
        checks.push(CheckResult::new("P^2 . supp(N) = 0", at, orth_witness));
    }
    for (idx, w) in cert.intervals.windows(2).enumerate() {
        let left = w[0].positive.eval(&w[0].u_hi);
        let right = w[1].positive.eval(&w[1].u_lo);
        let witness = (left != right).then(|| format!("P jumps from {left} to {right} at u = {}", w[0].u_hi));
        checks.push(CheckResult::new("P continuous", Some(idx), witness));
    }
    let verdict = checks.iter().all(|c| c.pass);
    Ok(CertificateReport { certificate: cert.name.clone(), divisor: y_label.to_string(), checks, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::r;

    #[test]
    fn nef_input_has_no_negative_part() {
        let s = data::surface("f2_irreducible").unwrap();
        let k = s.anticanonical();
        let res = zariski_decompose(&s, &k).unwrap();
        let res = res.result().unwrap();
        assert!(res.negative.is_empty());
        assert_eq!(res.positive, k);
        assert_eq!(volume_surface(&s, &k).unwrap(), r!(3));
    }

    #[test]
    fn irreducible_f2_at_three_quarters() {
        // (1 - v)Z + E at v = 3/4
        let s = data::surface("f2_irreducible").unwrap();
        let d = s.class(vec![r!(1 / 4), r!(1)]).unwrap();
        let res = zariski_decompose(&s, &d).unwrap();
        let res = res.result().unwrap();
        assert_eq!(res.negative, vec![("E".to_string(), r!(1 / 2))]);
        assert_eq!(res.positive, s.class(vec![r!(1 / 4), r!(1 / 2)]).unwrap());
    }

    #[test]
    fn mult1_at_three_halves() {
        let s = data::surface("mult1_cubic").unwrap();
        let c = s.curve("C").unwrap().class.clone();
        let d = s.anticanonical().sub(&c.scale(&r!(3 / 2))).unwrap();
        let res = zariski_decompose(&s, &d).unwrap();
        assert_eq!(res.result().unwrap().negative, vec![("E".to_string(), r!(1 / 2))]);
        // vol(-K - vC) = 3 - 2v at v = 1/2
        let half = s.anticanonical().sub(&c.scale(&r!(1 / 2))).unwrap();
        assert_eq!(volume_surface(&s, &half).unwrap(), r!(2));
    }

    #[test]
    fn outside_pseudoeffective_cone() {
        let s = data::surface("f2_reducible").unwrap();
        // -E1/4 + E2 + E is past the threshold v = 1
        let d = s.class(vec![r!(-1 / 4), r!(1), r!(1)]).unwrap();
        assert_eq!(zariski_decompose(&s, &d).unwrap(), Decomposition::NotPseudoeffective);
        assert_eq!(volume_surface(&s, &d).unwrap(), r!(0));
        let m = data::surface("mult1_cubic").unwrap();
        let neg_e = m.class_from_ints(&[0, -1]).unwrap();
        assert_eq!(volume_surface(&m, &neg_e).unwrap(), r!(0));
    }

    #[test]
    fn sextic_two_disjoint_curves_in_support() {
        // -K - 2E1 on the sextic: E3 and G2 both meet E1 and are disjoint
        let s = data::surface("f1_sextic").unwrap();
        let e1 = s.curve("E1").unwrap().class.clone();
        let d = s.anticanonical().sub(&e1.scale(&r!(2))).unwrap();
        let res = zariski_decompose(&s, &d).unwrap();
        let res = res.result().unwrap();
        assert_eq!(res.negative, vec![("E3".to_string(), r!(1)), ("G2".to_string(), r!(1))]);
        assert_eq!(res.positive, s.class_from_ints(&[1, -1, 0, 0]).unwrap());
        assert_eq!(volume_surface(&s, &d).unwrap(), r!(0));
    }

    #[test]
    fn trivial_family_single_chamber() {
        let s = data::surface("f2_irreducible").unwrap();
        let fam = AffineFamily::new(
            s.anticanonical(),
            s.zero(),
            s.zero(),
            Chamber::rect(r!(0), r!(1), r!(0), r!(1)).unwrap(),
        )
        .unwrap();
        let dec = parametric_zariski(&s, &fam).unwrap();
        assert_eq!(dec.pieces.len(), 1);
        assert!(dec.pieces[0].negative.is_empty());
    }

    #[test]
    fn incomplete_curve_list_is_detected() {
        // drop E from the irreducible F2 lattice: past v = 1/2 nothing is valid
        let mut data = data::surface("f2_irreducible").unwrap().to_data();
        let e = data.negative_curves.remove(0);
        data.cone_curves.push(e);
        let s = SurfaceLattice::from_data(&data).unwrap();
        let fam = AffineFamily::new(
            s.class_from_ints(&[1, 1]).unwrap(),
            s.zero(),
            s.class_from_ints(&[-1, 0]).unwrap(),
            Chamber::rect(r!(0), r!(1), r!(0), r!(1)).unwrap(),
        )
        .unwrap();
        assert!(matches!(parametric_zariski(&s, &fam), Err(Error::DomainNotCovered { .. })));
    }

    #[test]
    fn certificate_perturbation_breaks_orthogonality() {
        let t = data::threefold().unwrap();
        let mut cert = data::certificate(&t, "zd_f2").unwrap();
        assert!(verify_threefold_certificate(&t, "F2", &cert).unwrap().verdict);
        // D-coefficient of P on [1, 2] becomes 2 - u/2
        let iv = &mut cert.intervals[1];
        let mut coeffs = iv.positive.coeffs().to_vec();
        coeffs[0] = Poly1::linear(r!(2), r!(-1 / 2));
        iv.positive = DivisorClass::new(iv.positive.owner_arc().clone(), coeffs);
        let report = verify_threefold_certificate(&t, "F2", &cert).unwrap();
        assert!(!report.verdict);
        assert!(report.failures().any(|c| c.name == "P^2 . supp(N) = 0"));
    }

    #[test]
    fn certificate_for_wrong_divisor_fails_partition() {
        let t = data::threefold().unwrap();
        let cert = data::certificate(&t, "zd_f2").unwrap();
        let report = verify_threefold_certificate(&t, "F1", &cert).unwrap();
        assert!(!report.verdict);
    }
}
