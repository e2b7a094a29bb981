//! Intersection lattices of the threefold and of the surfaces inside it,
//! divisor classes with rational or polynomial coefficients, nefness over
//! parameter intervals, thresholds and restriction maps.
//!
//! Cones are never computed from geometry: effective and Mori cone generators,
//! and the curve lists of each surface, are supplied as data.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::linalg::{self, Matrix};
use crate::exactmath::{Poly1, Rational, Scalar};

/// Coefficient vector over the basis of a named lattice.
#[derive(Clone, PartialEq, Debug)]
pub struct DivisorClass<R: Scalar = Rational> {
    owner: Arc<str>,
    coeffs: Vec<R>,
}

impl<R: Scalar> DivisorClass<R> {
    pub fn new(owner: Arc<str>, coeffs: Vec<R>) -> Self {
        DivisorClass { owner, coeffs }
    }

    pub fn zero(owner: Arc<str>, rank: usize) -> Self {
        DivisorClass { owner, coeffs: vec![R::zero(); rank] }
    }

    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn owner_arc(&self) -> &Arc<str> {
        &self.owner
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn same_owner(&self, other: &Self) -> Result<()> {
        if self.owner != other.owner {
            return Err(Error::OwnerMismatch {
                expected: self.owner.to_string(),
                found: other.owner.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_owner(other)?;
        Ok(self.zip_with(other, R::add))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_owner(other)?;
        Ok(self.zip_with(other, R::sub))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        DivisorClass {
            owner: self.owner.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    /// Multiply every coefficient by a ring element.
    pub fn times(&self, s: &R) -> Self {
        self.map(|c| c.mul(s))
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> DivisorClass<S> {
        DivisorClass { owner: self.owner.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl DivisorClass<Rational> {
    /// Embed into a class with constant coefficients of another ring.
    pub fn lift<S: Scalar>(&self) -> DivisorClass<S> {
        self.map(|c| S::constant(c.clone()))
    }
}

impl DivisorClass<Poly1> {
    pub fn eval(&self, u: &Rational) -> DivisorClass<Rational> {
        self.map(|p| p.eval(u))
    }
}

impl<R: Scalar> fmt::Display for DivisorClass<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct NamedCurve {
    pub label: String,
    pub class: DivisorClass,
}

/// Anything that can pair a divisor class against a finite list of test
/// curves whose nonnegativity defines nefness.
pub trait NefTest {
    fn lattice_name(&self) -> &str;
    fn test_pairings(&self, d: &DivisorClass<Poly1>) -> Result<Vec<(String, Poly1)>>;
}

/// True iff every test pairing is nonnegative on `[lo, hi]`. Pairings must be
/// affine in `u` so that the endpoint check is conclusive.
pub fn is_nef(
    lattice: &impl NefTest,
    d: &DivisorClass<Poly1>,
    lo: &Rational,
    hi: &Rational,
) -> Result<bool> {
    Ok(nef_violation(lattice, d, lo, hi)?.is_none())
}

/// First failing `(curve, u, pairing value)`, if any.
pub fn nef_violation(
    lattice: &impl NefTest,
    d: &DivisorClass<Poly1>,
    lo: &Rational,
    hi: &Rational,
) -> Result<Option<(String, Rational, Rational)>> {
    if lo > hi {
        return Err(Error::InvalidInterval { lo: lo.to_string(), hi: hi.to_string() });
    }
    for (label, p) in lattice.test_pairings(d)? {
        if p.degree() > 1 {
            return Err(Error::NonAffinePairing { curve: label, degree: p.degree() });
        }
        for u in [lo, hi] {
            let value = p.eval(u);
            if value.is_negative() {
                return Ok(Some((label, u.clone(), value)));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveData {
    pub label: String,
    pub class: Vec<Rational>,
}

/// On-disk form of a surface lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceLatticeData {
    pub name: String,
    pub basis_labels: Vec<String>,
    pub gram: Vec<Vec<Rational>>,
    pub canonical: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    pub negative_curves: Vec<CurveData>,
    pub cone_curves: Vec<CurveData>,
}

#[derive(Clone, Debug)]
pub struct SurfaceLattice {
    name: Arc<str>,
    basis_labels: Vec<String>,
    gram: Matrix,
    canonical: DivisorClass,
    degree: Option<i64>,
    negative_curves: Vec<NamedCurve>,
    cone_curves: Vec<NamedCurve>,
}

impl SurfaceLattice {
    pub fn from_data(data: &SurfaceLatticeData) -> Result<Self> {
        let name: Arc<str> = Arc::from(data.name.as_str());
        let invalid = |reason: String| Error::InvalidLattice { name: data.name.clone(), reason };
        let n = data.basis_labels.len();
        if data.gram.len() != n || data.gram.iter().any(|row| row.len() != n) {
            return Err(invalid(format!("gram matrix must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if data.gram[i][j] != data.gram[j][i] {
                    return Err(invalid(format!("gram not symmetric at ({i}, {j})")));
                }
            }
        }
        let class = |coeffs: &Vec<Rational>, what: &str| -> Result<DivisorClass> {
            if coeffs.len() != n {
                return Err(invalid(format!("{what} has {} coefficients, rank is {n}", coeffs.len())));
            }
            Ok(DivisorClass::new(name.clone(), coeffs.clone()))
        };
        let curves = |list: &Vec<CurveData>| -> Result<Vec<NamedCurve>> {
            list.iter()
                .map(|c| Ok(NamedCurve { label: c.label.clone(), class: class(&c.class, &c.label)? }))
                .collect()
        };
        let lattice = SurfaceLattice {
            name: name.clone(),
            basis_labels: data.basis_labels.clone(),
            gram: data.gram.clone(),
            canonical: class(&data.canonical, "canonical class")?,
            degree: data.degree,
            negative_curves: curves(&data.negative_curves)?,
            cone_curves: curves(&data.cone_curves)?,
        };
        lattice.validate().map_err(invalid)?;
        Ok(lattice)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let anti = self.anticanonical();
        if let Some(deg) = self.degree {
            let sq = self.pair(&anti, &anti).map_err(|e| e.to_string())?;
            if sq != deg {
                return Err(format!("(-K)^2 = {sq}, declared degree {deg}"));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in self.negative_curves.iter().chain(&self.cone_curves) {
            if !seen.insert(c.label.as_str()) {
                return Err(format!("duplicate curve label {:?}", c.label));
            }
        }
        for c in &self.negative_curves {
            let sq = self.pair(&c.class, &c.class).map_err(|e| e.to_string())?;
            if !sq.is_negative() {
                return Err(format!("negative curve {} has self-intersection {sq}", c.label));
            }
            if sq == -1 && c.class.coeffs().iter().all(Rational::is_integer) {
                let k = self.pair(&anti, &c.class).map_err(|e| e.to_string())?;
                if k != 1 {
                    return Err(format!("(-1)-curve {} has -K.{} = {k}", c.label, c.label));
                }
            }
        }
        Ok(())
    }

    pub fn to_data(&self) -> SurfaceLatticeData {
        let curves = |list: &[NamedCurve]| {
            list.iter()
                .map(|c| CurveData { label: c.label.clone(), class: c.class.coeffs().to_vec() })
                .collect()
        };
        SurfaceLatticeData {
            name: self.name.to_string(),
            basis_labels: self.basis_labels.clone(),
            gram: self.gram.clone(),
            canonical: self.canonical.coeffs().to_vec(),
            degree: self.degree,
            negative_curves: curves(&self.negative_curves),
            cone_curves: curves(&self.cone_curves),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn degree(&self) -> Option<i64> {
        self.degree
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn anticanonical(&self) -> DivisorClass {
        self.canonical.scale(&Rational::from_int(-1))
    }

    pub fn negative_curves(&self) -> &[NamedCurve] {
        &self.negative_curves
    }

    pub fn cone_curves(&self) -> &[NamedCurve] {
        &self.cone_curves
    }

    /// Look a curve up by label among the negative curves, then the cone curves.
    pub fn curve(&self, label: &str) -> Result<&NamedCurve> {
        self.negative_curves
            .iter()
            .chain(&self.cone_curves)
            .find(|c| c.label == label)
            .ok_or_else(|| Error::UnknownCurve(label.to_string()))
    }

    pub fn class(&self, coeffs: Vec<Rational>) -> Result<DivisorClass> {
        if coeffs.len() != self.rank() {
            return Err(Error::RankMismatch {
                lattice: self.name.to_string(),
                expected: self.rank(),
                found: coeffs.len(),
            });
        }
        Ok(DivisorClass::new(self.name.clone(), coeffs))
    }

    pub fn class_from_ints(&self, coeffs: &[i64]) -> Result<DivisorClass> {
        self.class(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn zero<R: Scalar>(&self) -> DivisorClass<R> {
        DivisorClass::zero(self.name.clone(), self.rank())
    }

    fn check<R: Scalar>(&self, d: &DivisorClass<R>) -> Result<()> {
        if d.owner() != &*self.name {
            return Err(Error::OwnerMismatch { expected: self.name.to_string(), found: d.owner().to_string() });
        }
        if d.rank() != self.rank() {
            return Err(Error::RankMismatch {
                lattice: self.name.to_string(),
                expected: self.rank(),
                found: d.rank(),
            });
        }
        Ok(())
    }

    /// Intersection number `a . b` through the Gram matrix.
    pub fn pair<R: Scalar>(&self, a: &DivisorClass<R>, b: &DivisorClass<R>) -> Result<R> {
        self.check(a)?;
        self.check(b)?;
        let mut acc = R::zero();
        for (i, ai) in a.coeffs().iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs().iter().enumerate() {
                let g = &self.gram[i][j];
                if !g.is_zero() {
                    acc = acc.add(&ai.mul(bj).scale(g));
                }
            }
        }
        Ok(acc)
    }

    /// Pair a polynomial-coefficient class with a rational one.
    pub fn pair_mixed<R: Scalar>(&self, a: &DivisorClass<R>, b: &DivisorClass) -> Result<R> {
        self.pair(a, &b.lift())
    }

    pub fn self_intersection<R: Scalar>(&self, a: &DivisorClass<R>) -> Result<R> {
        self.pair(a, a)
    }
}

impl NefTest for SurfaceLattice {
    fn lattice_name(&self) -> &str {
        &self.name
    }

    fn test_pairings(&self, d: &DivisorClass<Poly1>) -> Result<Vec<(String, Poly1)>> {
        self.negative_curves
            .iter()
            .chain(&self.cone_curves)
            .map(|c| Ok((c.label.clone(), self.pair_mixed(d, &c.class)?)))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MoriGeneratorData {
    pub label: String,
    pub pairing: Vec<Rational>,
}

/// On-disk form of the threefold lattice. `triple` maps sorted index
/// triples `"i,j,k"` to intersection numbers; absent entries are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreefoldLatticeData {
    pub name: String,
    pub basis_labels: Vec<String>,
    pub triple: BTreeMap<String, Rational>,
    pub anticanonical: Vec<Rational>,
    pub degree: i64,
    pub mori_generators: Vec<MoriGeneratorData>,
    pub effective_generators: Vec<CurveData>,
}

#[derive(Clone, Debug)]
pub struct ThreefoldLattice {
    name: Arc<str>,
    basis_labels: Vec<String>,
    triple: Vec<Vec<Vec<Rational>>>,
    anticanonical: DivisorClass,
    degree: i64,
    mori_generators: Vec<(String, Vec<Rational>)>,
    effective_generators: Vec<NamedCurve>,
}

impl ThreefoldLattice {
    pub fn from_data(data: &ThreefoldLatticeData) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidLattice { name: data.name.clone(), reason };
        let name: Arc<str> = Arc::from(data.name.as_str());
        let n = data.basis_labels.len();
        let mut triple = vec![vec![vec![Rational::zero(); n]; n]; n];
        for (key, value) in &data.triple {
            let idx: Vec<usize> = key
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| invalid(format!("bad triple key {key:?}")))?;
            if idx.len() != 3 || idx.iter().any(|&i| i >= n) {
                return Err(invalid(format!("bad triple key {key:?}")));
            }
            if !(idx[0] <= idx[1] && idx[1] <= idx[2]) {
                return Err(invalid(format!("triple key {key:?} is not sorted")));
            }
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                triple[a][b][c] = value.clone();
            }
        }
        if data.anticanonical.len() != n {
            return Err(invalid("anticanonical class has wrong rank".into()));
        }
        let mut mori = Vec::new();
        for g in &data.mori_generators {
            if g.pairing.len() != n {
                return Err(invalid(format!("Mori generator {} has wrong rank", g.label)));
            }
            mori.push((g.label.clone(), g.pairing.clone()));
        }
        let mut eff = Vec::new();
        for g in &data.effective_generators {
            if g.class.len() != n {
                return Err(invalid(format!("effective generator {} has wrong rank", g.label)));
            }
            eff.push(NamedCurve { label: g.label.clone(), class: DivisorClass::new(name.clone(), g.class.clone()) });
        }
        let lattice = ThreefoldLattice {
            name: name.clone(),
            basis_labels: data.basis_labels.clone(),
            triple,
            anticanonical: DivisorClass::new(name, data.anticanonical.clone()),
            degree: data.degree,
            mori_generators: mori,
            effective_generators: eff,
        };
        lattice.validate().map_err(invalid)?;
        Ok(lattice)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let k = &self.anticanonical;
        let deg = self.triple(k, k, k).map_err(|e| e.to_string())?;
        if deg != self.degree {
            return Err(format!("(-K)^3 = {deg}, declared degree {}", self.degree));
        }
        for (label, _) in &self.mori_generators {
            let p = self.pair_curve(k, label).map_err(|e| e.to_string())?;
            if !p.is_positive() {
                return Err(format!("-K . {label} = {p} is not positive"));
            }
        }
        Ok(())
    }

    pub fn to_data(&self) -> ThreefoldLatticeData {
        let n = self.rank();
        let mut triple = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    if !self.triple[i][j][k].is_zero() {
                        triple.insert(format!("{i},{j},{k}"), self.triple[i][j][k].clone());
                    }
                }
            }
        }
        ThreefoldLatticeData {
            name: self.name.to_string(),
            basis_labels: self.basis_labels.clone(),
            triple,
            anticanonical: self.anticanonical.coeffs().to_vec(),
            degree: self.degree,
            mori_generators: self
                .mori_generators
                .iter()
                .map(|(l, p)| MoriGeneratorData { label: l.clone(), pairing: p.clone() })
                .collect(),
            effective_generators: self
                .effective_generators
                .iter()
                .map(|c| CurveData { label: c.label.clone(), class: c.class.coeffs().to_vec() })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn anticanonical(&self) -> &DivisorClass {
        &self.anticanonical
    }

    pub fn mori_labels(&self) -> impl Iterator<Item = &str> {
        self.mori_generators.iter().map(|(l, _)| l.as_str())
    }

    pub fn effective_generators(&self) -> &[NamedCurve] {
        &self.effective_generators
    }

    /// Raw tensor entry for basis indices.
    pub fn entry(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.triple[i][j][k]
    }

    pub fn class(&self, coeffs: Vec<Rational>) -> Result<DivisorClass> {
        if coeffs.len() != self.rank() {
            return Err(Error::RankMismatch {
                lattice: self.name.to_string(),
                expected: self.rank(),
                found: coeffs.len(),
            });
        }
        Ok(DivisorClass::new(self.name.clone(), coeffs))
    }

    pub fn class_from_ints(&self, coeffs: &[i64]) -> Result<DivisorClass> {
        self.class(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    /// The basis class carrying `label`.
    pub fn divisor(&self, label: &str) -> Result<DivisorClass> {
        let i = self
            .basis_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownDivisor(label.to_string()))?;
        let mut coeffs = vec![Rational::zero(); self.rank()];
        coeffs[i] = Rational::one();
        Ok(DivisorClass::new(self.name.clone(), coeffs))
    }

    fn check<R: Scalar>(&self, d: &DivisorClass<R>) -> Result<()> {
        if d.owner() != &*self.name {
            return Err(Error::OwnerMismatch { expected: self.name.to_string(), found: d.owner().to_string() });
        }
        if d.rank() != self.rank() {
            return Err(Error::RankMismatch {
                lattice: self.name.to_string(),
                expected: self.rank(),
                found: d.rank(),
            });
        }
        Ok(())
    }

    /// Symmetric trilinear intersection `a . b . c`.
    pub fn triple<R: Scalar>(
        &self,
        a: &DivisorClass<R>,
        b: &DivisorClass<R>,
        c: &DivisorClass<R>,
    ) -> Result<R> {
        self.check(a)?;
        self.check(b)?;
        self.check(c)?;
        let n = self.rank();
        let mut acc = R::zero();
        for i in 0..n {
            if a.coeffs()[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.coeffs()[j].is_zero() {
                    continue;
                }
                let ab = a.coeffs()[i].mul(&b.coeffs()[j]);
                for k in 0..n {
                    let t = &self.triple[i][j][k];
                    if !t.is_zero() {
                        acc = acc.add(&ab.mul(&c.coeffs()[k]).scale(t));
                    }
                }
            }
        }
        Ok(acc)
    }

    /// `d . curve` for a Mori cone generator.
    pub fn pair_curve<R: Scalar>(&self, d: &DivisorClass<R>, curve: &str) -> Result<R> {
        self.check(d)?;
        let (_, pairing) = self
            .mori_generators
            .iter()
            .find(|(l, _)| l == curve)
            .ok_or_else(|| Error::UnknownCurve(curve.to_string()))?;
        Ok(d.coeffs().iter().zip(pairing).fold(R::zero(), |acc, (c, p)| acc.add(&c.scale(p))))
    }

    /// Pseudo-effective threshold `tau` and nef threshold `eps` of
    /// `-K - xE`. The effective cone must be simplicial.
    pub fn thresholds(&self, e: &DivisorClass) -> Result<(Rational, Rational)> {
        self.check(e)?;
        if e.is_zero() {
            return Err(Error::NotEffective(e.to_string()));
        }
        let gens: Matrix = self.effective_generators.iter().map(|g| g.class.coeffs().to_vec()).collect();
        if gens.len() != self.rank() {
            return Err(Error::InvalidLattice {
                name: self.name.to_string(),
                reason: "effective cone is not simplicial".into(),
            });
        }
        // coordinates x with sum_i x_i g_i = class, i.e. G^T x = class
        let transpose: Matrix = (0..self.rank()).map(|j| gens.iter().map(|g| g[j].clone()).collect()).collect();
        let inv = linalg::inverse(&transpose).ok_or_else(|| Error::InvalidLattice {
            name: self.name.to_string(),
            reason: "effective generators are linearly dependent".into(),
        })?;
        let e_coords = linalg::mat_vec(&inv, e.coeffs());
        if e_coords.iter().any(Rational::is_negative) {
            return Err(Error::NotEffective(e.to_string()));
        }
        let k_coords = linalg::mat_vec(&inv, self.anticanonical.coeffs());
        let tau = k_coords
            .iter()
            .zip(&e_coords)
            .filter(|(_, ec)| ec.is_positive())
            .map(|(kc, ec)| kc / ec)
            .min()
            .expect("nonzero effective class has a positive coordinate");
        let mut eps = tau.clone();
        for (label, _) in &self.mori_generators {
            let ke = self.pair_curve(&self.anticanonical, label)?;
            let ee = self.pair_curve(e, label)?;
            if ee.is_positive() {
                eps = eps.min(ke / ee);
            }
        }
        Ok((tau, eps))
    }
}

impl NefTest for ThreefoldLattice {
    fn lattice_name(&self) -> &str {
        &self.name
    }

    fn test_pairings(&self, d: &DivisorClass<Poly1>) -> Result<Vec<(String, Poly1)>> {
        self.mori_generators
            .iter()
            .map(|(label, _)| Ok((label.clone(), self.pair_curve(d, label)?)))
            .collect()
    }
}

/// Linear map sending threefold basis divisors to surface classes.
#[derive(Clone, Debug)]
pub struct RestrictionMap {
    source: Arc<str>,
    target: Arc<str>,
    /// `images[i]` is the image of the i-th threefold basis divisor.
    images: Vec<Vec<Rational>>,
}

impl RestrictionMap {
    pub fn new(source: &ThreefoldLattice, target: &SurfaceLattice, images: Vec<Vec<Rational>>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidLattice { name: target.name().to_string(), reason };
        if images.len() != source.rank() || images.iter().any(|r| r.len() != target.rank()) {
            return Err(invalid(format!(
                "restriction matrix must be {}x{}",
                source.rank(),
                target.rank()
            )));
        }
        Ok(RestrictionMap { source: source.name.clone(), target: target.name.clone(), images })
    }

    /// Build from a map `threefold basis label -> surface coefficients`.
    pub fn from_labels(
        source: &ThreefoldLattice,
        target: &SurfaceLattice,
        images: &BTreeMap<String, Vec<Rational>>,
    ) -> Result<Self> {
        let rows = source
            .basis_labels()
            .iter()
            .map(|l| images.get(l).cloned().ok_or_else(|| Error::UnknownDivisor(l.clone())))
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = images.keys().find(|k| !source.basis_labels().contains(k)) {
            return Err(Error::UnknownDivisor(extra.clone()));
        }
        RestrictionMap::new(source, target, rows)
    }

    pub fn images(&self) -> &[Vec<Rational>] {
        &self.images
    }

    pub fn restrict<R: Scalar>(&self, d: &DivisorClass<R>) -> Result<DivisorClass<R>> {
        if d.owner() != &*self.source {
            return Err(Error::OwnerMismatch { expected: self.source.to_string(), found: d.owner().to_string() });
        }
        let m = self.images.first().map_or(0, Vec::len);
        let mut out = vec![R::zero(); m];
        for (c, row) in d.coeffs().iter().zip(&self.images) {
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o = o.add(&c.scale(r));
                }
            }
        }
        Ok(DivisorClass::new(self.target.clone(), out))
    }

    /// Adjunction `(-K_X - Y)|_Y = -K_Y` and the projection formula
    /// `(a|_Y).(b|_Y) = a.b.Y` on all basis pairs. Returns the failures.
    pub fn consistency_failures(
        &self,
        source: &ThreefoldLattice,
        target: &SurfaceLattice,
        surface_class: &DivisorClass,
    ) -> Result<Vec<String>> {
        let mut failures = Vec::new();
        let image = self.restrict(&source.anticanonical().sub(surface_class)?)?;
        if image != target.anticanonical() {
            failures.push(format!(
                "-K_X - Y restricts to {image}, but -K of {} is {}",
                target.name(),
                target.anticanonical()
            ));
        }
        let labels = source.basis_labels();
        for i in 0..labels.len() {
            for j in i..labels.len() {
                let a = source.divisor(&labels[i])?;
                let b = source.divisor(&labels[j])?;
                let upstairs = source.triple(&a, &b, surface_class)?;
                let downstairs = target.pair(&self.restrict(&a)?, &self.restrict(&b)?)?;
                if upstairs != downstairs {
                    failures.push(format!(
                        "{}.{}.Y = {upstairs} but restricted pairing is {downstairs}",
                        labels[i], labels[j]
                    ));
                }
            }
        }
        Ok(failures)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::r;

    fn x() -> ThreefoldLattice {
        data::threefold().unwrap()
    }

    fn poly_class(t: &ThreefoldLattice, coeffs: &[&[i64]]) -> DivisorClass<Poly1> {
        DivisorClass::new(t.name.clone(), coeffs.iter().map(|c| Poly1::from_ints(c)).collect())
    }

    #[test]
    fn triple_table() {
        let t = x();
        let d = t.divisor("D").unwrap();
        let f1 = t.divisor("F1").unwrap();
        let f2 = t.divisor("F2").unwrap();
        assert_eq!(t.triple(&d, &d, &d).unwrap(), r!(2));
        assert_eq!(t.triple(&d, &d, &f1).unwrap(), r!(-2));
        assert_eq!(t.triple(&f2, &d, &d).unwrap(), r!(-1));
        assert_eq!(t.triple(&f1, &f2, &d).unwrap(), r!(2));
        for any in [&d, &f1, &f2] {
            assert_eq!(t.triple(&f1, &f1, any).unwrap(), r!(0));
            assert_eq!(t.triple(&f2, any, &f2).unwrap(), r!(0));
        }
        let k = t.anticanonical().clone();
        assert_eq!(t.triple(&k, &k, &k).unwrap(), r!(14));
    }

    #[test]
    fn curve_pairings() {
        let t = x();
        // (-K - u F2) . L1 = 1 - u
        let fam = poly_class(&t, &[&[1], &[1], &[2, -1]]);
        assert_eq!(t.pair_curve(&fam, "L1").unwrap(), Poly1::from_ints(&[1, -1]));
        let fam1 = poly_class(&t, &[&[1], &[1, -1], &[2]]);
        assert_eq!(t.pair_curve(&fam1, "C").unwrap(), Poly1::from_ints(&[2]));
        assert_eq!(t.pair_curve(&t.class_from_ints(&[0, 0, 0]).unwrap(), "L2").unwrap(), r!(0));
        assert!(matches!(t.pair_curve(t.anticanonical(), "L9"), Err(Error::UnknownCurve(_))));
    }

    #[test]
    fn nefness_over_intervals() {
        let t = x();
        let fam = poly_class(&t, &[&[1], &[1], &[2, -1]]);
        assert!(is_nef(&t, &fam, &r!(0), &r!(1)).unwrap());
        assert!(!is_nef(&t, &fam, &r!(0), &r!(65 / 64)).unwrap());
        let d = t.divisor("D").unwrap().lift();
        assert!(!is_nef(&t, &d, &r!(0), &r!(0)).unwrap());
        assert!(is_nef(&t, &t.anticanonical().lift(), &r!(0), &r!(0)).unwrap());
        let quad = poly_class(&t, &[&[1], &[1], &[2, 0, -1]]);
        assert!(matches!(is_nef(&t, &quad, &r!(0), &r!(1)), Err(Error::NonAffinePairing { .. })));
    }

    #[test]
    fn thresholds_of_basis_divisors() {
        let t = x();
        let th = |l: &str| t.thresholds(&t.divisor(l).unwrap()).unwrap();
        assert_eq!(th("F2"), (r!(2), r!(1)));
        assert_eq!(th("F1"), (r!(1), r!(1 / 2)));
        assert_eq!(th("D"), (r!(1), r!(1)));
        let outside = t.class_from_ints(&[1, -1, 0]).unwrap();
        assert!(matches!(t.thresholds(&outside), Err(Error::NotEffective(_))));
    }

    #[test]
    fn owner_mismatch_is_an_error() {
        let t = x();
        let s = data::surface("f2_irreducible").unwrap();
        let z = s.curve("Z").unwrap().class.clone();
        assert!(matches!(s.pair(&z, &t.anticanonical().clone()), Err(Error::OwnerMismatch { .. })));
        assert!(t.triple(&z, &z, &z).is_err());
    }

    #[test]
    fn surface_pairings() {
        let s = data::surface("f2_irreducible").unwrap();
        let z = s.curve("Z").unwrap().class.clone();
        let e = s.curve("E").unwrap().class.clone();
        assert_eq!(s.pair(&z, &e).unwrap(), r!(2));
        assert_eq!(s.pair(&e, &e).unwrap(), r!(-1));
        assert_eq!(s.pair(&z, &s.zero()).unwrap(), r!(0));
    }

    #[test]
    fn restriction_examples() {
        let t = x();
        let d_lat = data::surface("d_quadric").unwrap();
        let map = data::restriction("d_quadric").unwrap();
        let f1 = map.restrict(&t.divisor("F1").unwrap()).unwrap();
        assert_eq!(f1, d_lat.class_from_ints(&[2, 0]).unwrap());
        assert!(map.restrict(&t.class_from_ints(&[0, 0, 0]).unwrap()).unwrap().is_zero());

        let f2 = data::surface("f2_irreducible").unwrap();
        let map2 = data::restriction("f2_irreducible").unwrap();
        let z_plus_e = f2.curve("Z").unwrap().class.add(&f2.curve("E").unwrap().class).unwrap();
        assert_eq!(map2.restrict(t.anticanonical()).unwrap(), z_plus_e);
    }

    #[test]
    fn gram_must_be_symmetric() {
        let mut d = data::surface("mult1_cubic").unwrap().to_data();
        d.gram[0][1] = r!(3);
        assert!(matches!(SurfaceLattice::from_data(&d), Err(Error::InvalidLattice { .. })));
    }

    #[test]
    fn declared_degree_is_checked() {
        let mut d = data::surface("f2_irreducible").unwrap().to_data();
        d.degree = Some(4);
        assert!(SurfaceLattice::from_data(&d).is_err());
    }
}
