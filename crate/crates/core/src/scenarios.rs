//! Scenario files, the per-scenario verification pipeline, and the batch
//! runner with the sampling oracle, mutation controls and case coverage.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataSource;
use crate::delpezzo::{validate_atlas, Atlas, AtlasReport};
use crate::error::{Error, Result};
use crate::exactmath::{Affine2, AffineFn, Chamber, Poly1, Rational, Scalar};
use crate::invariants::{
    beta_divisor, delta_bound, s_divisor, smooth_fiber_bound, FlagData, FlagProblem, NuData,
};
use crate::lattice::{RestrictionMap, SurfaceLattice, ThreefoldLattice};
use crate::zariski::{
    verify_threefold_certificate, zariski_decompose, ChamberDecomposition, Decomposition, ThreefoldCertificate,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Flag,
    SmoothFiber,
    Divisorial,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalMultData {
    pub curve: String,
    pub point: String,
    pub mult: Rational,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagSpec {
    pub curve: String,
    pub point: String,
    pub local_mults: Vec<LocalMultData>,
    pub different_ord: Rational,
    pub a_surface: Rational,
    /// Upper end of the `v` range on each certificate interval.
    pub v_upper: Vec<AffineFn>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleTerm {
    pub curve: String,
    pub mult: Rational,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedChamber {
    pub chamber: Chamber,
    pub negative: BTreeMap<String, Affine2>,
}

/// On-disk form of a scenario.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioData {
    pub name: String,
    pub kind: ScenarioKind,
    pub proof_branch: String,
    pub description: String,
    pub threefold: String,
    pub certificates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<FlagSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<BTreeMap<String, Vec<CycleTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_lower_bound: Option<Rational>,
    pub expected: BTreeMap<String, Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_polynomials: Option<BTreeMap<String, Poly1>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_chambers: Option<Vec<ExpectedChamber>>,
    /// Recorded values known to disagree with the computation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recorded_values: Option<BTreeMap<String, Rational>>,
    /// Other recorded bounds for the same case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recorded_bounds: Option<BTreeMap<String, Rational>>,
    pub notes: Vec<String>,
}

/// A scenario with all referenced data files resolved.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub data: ScenarioData,
    pub threefold: ThreefoldLattice,
    pub certificates: Vec<ThreefoldCertificate>,
    pub surface: Option<SurfaceLattice>,
    pub restriction: Option<RestrictionMap>,
    /// Threefold class of the surface, from the restriction file.
    pub surface_divisor: Option<String>,
    pub flag: Option<FlagData>,
    pub nu: NuData,
}

impl Scenario {
    pub fn from_data(src: &DataSource, data: ScenarioData) -> Result<Scenario> {
        let invalid = |reason: String| Error::InvalidScenario { name: data.name.clone(), reason };
        let threefold = src.threefold(&data.threefold)?;
        let certificates = data
            .certificates
            .iter()
            .map(|c| src.certificate(&threefold, c))
            .collect::<Result<Vec<_>>>()?;
        if certificates.is_empty() {
            return Err(invalid("no certificates".into()));
        }

        let needs_surface = data.kind != ScenarioKind::Divisorial;
        if needs_surface != data.surface.is_some() {
            return Err(invalid("surface must be given exactly for flag and smooth_fiber kinds".to_string()));
        }
        if (data.kind == ScenarioKind::Flag) != data.flag.is_some() {
            return Err(invalid("flag data must be given exactly for the flag kind".into()));
        }
        if (data.kind == ScenarioKind::SmoothFiber) != data.delta_lower_bound.is_some() {
            return Err(invalid("delta_lower_bound must be given exactly for the smooth_fiber kind".into()));
        }
        if needs_surface && certificates.len() != 1 {
            return Err(invalid(format!("{} certificates, expected one", certificates.len())));
        }

        let (surface, restriction, surface_divisor) = match &data.surface {
            Some(name) => {
                let s = src.surface(name)?;
                let rdata = src.restriction_data(name)?;
                let map = src.restriction(&threefold, &s)?;
                if rdata.divisor != certificates[0].divisor {
                    return Err(invalid(format!(
                        "surface {name} is the divisor {}, certificate is for {}",
                        rdata.divisor, certificates[0].divisor
                    )));
                }
                (Some(s), Some(map), Some(rdata.divisor))
            }
            None => (None, None, None),
        };

        let flag = data.flag.as_ref().map(|f| FlagData {
            curve: f.curve.clone(),
            point: f.point.clone(),
            local_mults: f
                .local_mults
                .iter()
                .map(|m| ((m.curve.clone(), m.point.clone()), m.mult.clone()))
                .collect(),
            different_ord: f.different_ord.clone(),
            a_surface: f.a_surface.clone(),
        });
        if let (Some(f), Some(s)) = (&flag, &surface) {
            s.curve(&f.curve)?;
            if data.flag.as_ref().unwrap().v_upper.len() != certificates[0].intervals.len() {
                return Err(invalid("one v_upper bound per certificate interval is required".into()));
            }
        }
        let nu = NuData {
            cycles: data
                .nu
                .iter()
                .flatten()
                .map(|(d, cycle)| (d.clone(), cycle.iter().map(|t| (t.curve.clone(), t.mult.clone())).collect()))
                .collect(),
        };

        let scenario = Scenario { data, threefold, certificates, surface, restriction, surface_divisor, flag, nu };
        let computed = scenario.quantity_names();
        let declared: Vec<&String> = scenario.data.expected.keys().collect();
        let mut sorted = computed.clone();
        sorted.sort();
        if sorted.iter().collect::<Vec<_>>() != declared {
            return Err(Error::InvalidScenario {
                name: scenario.data.name.clone(),
                reason: format!("expected values must cover exactly {computed:?}"),
            });
        }
        for key in scenario.data.expected_polynomials.iter().flatten().map(|(k, _)| k) {
            let ok = parse_indexed(key, "restricted_square").is_some_and(|i| i < scenario.certificates[0].intervals.len());
            if scenario.data.kind != ScenarioKind::SmoothFiber || !ok {
                return Err(Error::InvalidScenario {
                    name: scenario.data.name.clone(),
                    reason: format!("unsupported expected polynomial {key:?}"),
                });
            }
        }
        if scenario.data.expected_chambers.is_some() && scenario.data.kind != ScenarioKind::Flag {
            return Err(Error::InvalidScenario {
                name: scenario.data.name.clone(),
                reason: "expected chambers need a flag".into(),
            });
        }
        Ok(scenario)
    }

    pub fn from_json(src: &DataSource, text: &str) -> Result<Scenario> {
        Scenario::from_data(src, serde_json::from_str(text)?)
    }

    pub fn name(&self) -> &str {
        &self.data.name
    }

    /// The quantities the runner computes for this scenario, in report order.
    pub fn quantity_names(&self) -> Vec<String> {
        let y = &self.certificates[0].divisor;
        match self.data.kind {
            ScenarioKind::Flag => vec![
                format!("tau({y})"),
                format!("eps({y})"),
                format!("S_X({y})"),
                "S_curve".into(),
                "S_point".into(),
                "delta_bound".into(),
                "delta_bound_raw".into(),
            ],
            ScenarioKind::SmoothFiber => vec![
                format!("tau({y})"),
                format!("eps({y})"),
                format!("S_X({y})"),
                "restricted_square_at_break".into(),
                "integral_restricted_square".into(),
                "smooth_fiber_bound".into(),
            ],
            ScenarioKind::Divisorial => {
                let mut names = vec!["(-K)^3".to_string()];
                for c in &self.certificates {
                    let d = &c.divisor;
                    names.extend([format!("tau({d})"), format!("eps({d})"), format!("S_X({d})"), format!("beta({d})")]);
                }
                names
            }
        }
    }

    pub fn flag_problem(&self) -> Option<FlagProblem> {
        Some(FlagProblem {
            threefold: self.threefold.clone(),
            surface: self.surface.clone()?,
            restriction: self.restriction.clone()?,
            certificate: self.certificates[0].clone(),
            flag: self.flag.clone()?,
            nu: self.nu.clone(),
            v_upper: self.data.flag.as_ref()?.v_upper.clone(),
        })
    }
}

fn parse_indexed(key: &str, stem: &str) -> Option<usize> {
    key.strip_prefix(stem)?.strip_prefix('[')?.strip_suffix(']')?.parse().ok()
}

/// Scenarios named in `scenarios/index.json` of a data source.
pub fn load_scenarios(src: &DataSource) -> Result<Vec<Scenario>> {
    src.scenario_names()?
        .iter()
        .map(|name| Scenario::from_data(src, src.parse(&format!("scenarios/{name}.json"))?))
        .collect()
}

/// The seven shipped scenarios.
pub fn builtin_scenarios() -> Result<Vec<Scenario>> {
    load_scenarios(&DataSource::embedded())
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct QuantityResult {
    pub name: String,
    pub computed: Option<Rational>,
    pub expected: Rational,
    pub matches: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl QuantityResult {
    pub fn line(&self) -> String {
        let computed = self.computed.as_ref().map_or("?".to_string(), ToString::to_string);
        let mut line = format!(
            "{} = {computed} [expected {}] {}",
            self.name,
            self.expected,
            if self.matches { "PASS" } else { "FAIL" }
        );
        if let Some(e) = &self.error {
            let _ = write!(line, " ({e})");
        }
        line
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckEntry {
    fn new(name: impl Into<String>, pass: bool, detail: Option<String>) -> Self {
        CheckEntry { name: name.into(), pass, detail }
    }

    fn from_result(name: impl Into<String>, r: Result<Option<String>>) -> Self {
        match r {
            Ok(None) => CheckEntry::new(name, true, None),
            Ok(Some(w)) => CheckEntry::new(name, false, Some(w)),
            Err(e) => CheckEntry::new(name, false, Some(e.to_string())),
        }
    }

    pub fn line(&self) -> String {
        let mut line = format!("check {}: {}", self.name, if self.pass { "PASS" } else { "FAIL" });
        if let Some(d) = &self.detail {
            let _ = write!(line, " ({d})");
        }
        line
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub proof_branch: String,
    pub values: BTreeMap<String, Rational>,
    pub quantities: Vec<QuantityResult>,
    pub checks: Vec<CheckEntry>,
    pub caveats: Vec<String>,
    pub notes: Vec<String>,
    pub verdict: bool,
}

impl ScenarioReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "== {} ({}) {}",
            self.scenario,
            self.proof_branch,
            if self.verdict { "PASS" } else { "FAIL" }
        )];
        out.extend(self.quantities.iter().map(QuantityResult::line));
        out.extend(self.checks.iter().map(CheckEntry::line));
        out.extend(self.caveats.iter().map(|c| format!("caveat: {c}")));
        out.extend(self.notes.iter().map(|n| format!("note: {n}")));
        out
    }
}

fn v_threshold_witness(problem: &FlagProblem) -> Result<Option<String>> {
    let step = Rational::new(1, 64);
    let two = Rational::from_int(2);
    for fam in problem.families()? {
        let c = &fam.domain;
        for u in [c.u_lo.clone(), (&c.u_lo + &c.u_hi) / two.clone(), c.u_hi.clone()] {
            let v = c.v_hi.eval(&u);
            let at = fam.at(&u, &v);
            let vol = crate::zariski::volume_surface(&problem.surface, &at)?;
            if !vol.is_zero() {
                return Ok(Some(format!("volume {vol} at (u, v) = ({u}, {v})")));
            }
            let past = &v + &step;
            if zariski_decompose(&problem.surface, &fam.at(&u, &past))? != Decomposition::NotPseudoeffective {
                return Ok(Some(format!("still pseudo-effective at (u, v) = ({u}, {past})")));
            }
        }
    }
    Ok(None)
}

fn chamber_witness(decs: &[ChamberDecomposition], expected: &[ExpectedChamber]) -> Option<String> {
    let found: Vec<ExpectedChamber> = decs
        .iter()
        .flat_map(|d| &d.pieces)
        .map(|p| ExpectedChamber { chamber: p.chamber.clone(), negative: p.negative.iter().cloned().collect() })
        .collect();
    if found == expected {
        return None;
    }
    let show = |list: &[ExpectedChamber]| {
        list.iter()
            .map(|c| {
                let n: Vec<String> = c.negative.iter().map(|(l, a)| format!("({a}){l}")).collect();
                format!("[{}] N = {}", c.chamber, if n.is_empty() { "0".into() } else { n.join(" + ") })
            })
            .collect::<Vec<_>>()
            .join("; ")
    };
    Some(format!("found {}; expected {}", show(&found), show(expected)))
}

/// Run the full pipeline for one scenario. Failures become report entries.
pub fn run_scenario(s: &Scenario) -> ScenarioReport {
    let t = &s.threefold;
    let mut computed: BTreeMap<String, Result<Rational>> = BTreeMap::new();
    let mut checks = Vec::new();
    let mut caveats = Vec::new();

    for cert in &s.certificates {
        let entry = match verify_threefold_certificate(t, &cert.divisor, cert) {
            Ok(r) if r.verdict => CheckEntry::new(format!("certificate {}", cert.name), true, None),
            Ok(r) => {
                let detail = r
                    .failures()
                    .map(|c| match (&c.interval, &c.witness) {
                        (Some(i), Some(w)) => format!("{} on interval {i}: {w}", c.name),
                        (_, Some(w)) => format!("{}: {w}", c.name),
                        _ => c.name.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join("; ");
                CheckEntry::new(format!("certificate {}", cert.name), false, Some(detail))
            }
            Err(e) => CheckEntry::new(format!("certificate {}", cert.name), false, Some(e.to_string())),
        };
        checks.push(entry);
        let y = &cert.divisor;
        match t.divisor(y).and_then(|d| t.thresholds(&d)) {
            Ok((tau, eps)) => {
                computed.insert(format!("tau({y})"), Ok(tau));
                computed.insert(format!("eps({y})"), Ok(eps));
            }
            Err(e) => {
                computed.insert(format!("tau({y})"), Err(Error::Data(e.to_string())));
                computed.insert(format!("eps({y})"), Err(e));
            }
        }
        computed.insert(format!("S_X({y})"), s_divisor(t, y, cert));
        if s.data.kind == ScenarioKind::Divisorial {
            computed.insert(format!("beta({y})"), beta_divisor(t, y, cert));
        }
    }

    if let (Some(surface), Some(map), Some(y)) = (&s.surface, &s.restriction, &s.surface_divisor) {
        let r = t.divisor(y).and_then(|yc| map.consistency_failures(t, surface, &yc));
        checks.push(CheckEntry::from_result(
            "restriction consistency",
            r.map(|f| if f.is_empty() { None } else { Some(f.join("; ")) }),
        ));
    }

    match s.data.kind {
        ScenarioKind::Flag => run_flag(s, &mut computed, &mut checks, &mut caveats),
        ScenarioKind::SmoothFiber => run_smooth_fiber(s, &mut computed, &mut checks, &mut caveats),
        ScenarioKind::Divisorial => {
            computed.insert("(-K)^3".into(), t.triple(t.anticanonical(), t.anticanonical(), t.anticanonical()));
            for cert in &s.certificates {
                let y = &cert.divisor;
                let sx = computed.get(&format!("S_X({y})")).and_then(|r| r.as_ref().ok()).cloned();
                let tau = computed.get(&format!("tau({y})")).and_then(|r| r.as_ref().ok()).cloned();
                let ok = matches!((&sx, &tau), (Some(sx), Some(tau)) if sx.is_positive() && sx < tau && *sx < 1);
                let detail = (!ok).then(|| format!("S_X({y}) = {sx:?}, tau = {tau:?}"));
                checks.push(CheckEntry::new(format!("0 < S_X({y}) < min(1, tau)"), ok, detail));
            }
        }
    }

    if let Some(bounds) = &s.data.recorded_bounds {
        for (name, value) in bounds {
            if let Some(Ok(c)) = computed.get(name) {
                let relation = if value < c { "weaker than" } else if value == c { "equal to" } else { "stronger than" };
                caveats.push(format!("recorded {name} {value} is {relation} the computed {c}"));
            }
        }
    }
    if let Some(values) = &s.data.recorded_values {
        for (name, value) in values {
            if let Some(Ok(c)) = computed.get(name) {
                if c != value {
                    caveats.push(format!("recorded {name} = {value} disagrees with the exact value {c}"));
                }
            }
        }
    }

    let quantities: Vec<QuantityResult> = s
        .quantity_names()
        .into_iter()
        .map(|name| {
            let expected = s.data.expected.get(&name).cloned().unwrap_or_default();
            match computed.remove(&name) {
                Some(Ok(v)) => QuantityResult { matches: v == expected, computed: Some(v), expected, name, error: None },
                Some(Err(e)) => {
                    QuantityResult { name, computed: None, expected, matches: false, error: Some(e.to_string()) }
                }
                None => QuantityResult {
                    name,
                    computed: None,
                    expected,
                    matches: false,
                    error: Some("not computed".into()),
                },
            }
        })
        .collect();
    let values = quantities.iter().filter_map(|q| Some((q.name.clone(), q.computed.clone()?))).collect();
    let verdict = quantities.iter().all(|q| q.matches) && checks.iter().all(|c| c.pass);
    ScenarioReport {
        scenario: s.data.name.clone(),
        proof_branch: s.data.proof_branch.clone(),
        values,
        quantities,
        checks,
        caveats,
        notes: s.data.notes.clone(),
        verdict,
    }
}

fn run_flag(
    s: &Scenario,
    computed: &mut BTreeMap<String, Result<Rational>>,
    checks: &mut Vec<CheckEntry>,
    caveats: &mut Vec<String>,
) {
    let problem = s.flag_problem().expect("flag scenarios carry flag data");
    let y = problem.y_label().to_string();
    checks.push(CheckEntry::from_result("flag and cycle data", problem.validate().map(|_| None)));
    checks.push(CheckEntry::from_result("v threshold", v_threshold_witness(&problem)));

    let decs = match problem.decompositions() {
        Ok(d) => {
            checks.push(CheckEntry::new("chambers cover the domain", true, None));
            d
        }
        Err(e) => {
            checks.push(CheckEntry::new("chambers cover the domain", false, Some(e.to_string())));
            for q in ["S_curve", "S_point", "delta_bound", "delta_bound_raw"] {
                computed.insert(q.into(), Err(Error::Data(e.to_string())));
            }
            return;
        }
    };
    if let Some(expected) = &s.data.expected_chambers {
        checks.push(CheckEntry::new("chamber list", chamber_witness(&decs, expected).is_none(), chamber_witness(&decs, expected)));
    }
    let ord_z: Result<Option<String>> = (0..problem.certificate.intervals.len())
        .map(|i| problem.ord_z(i))
        .collect::<Result<Vec<_>>>()
        .map(|ords| ords.iter().find(|p| !p.is_zero()).map(|p| format!("ord_Z = {p}")));
    checks.push(CheckEntry::from_result("Z not in N(u)|_Y", ord_z));

    let s_curve = problem.s_curve_terms(&decs).map(|(a, b)| a + b);
    let s_point = problem.s_point_with(&decs);
    let s_div = computed.get(&format!("S_X({y})")).and_then(|r| r.as_ref().ok()).cloned();
    match (&s_point, &s_curve, &s_div) {
        (Ok(sp), Ok(sc), Some(sd)) => {
            match delta_bound(sp, sc, sd, &problem.flag.different_ord, &problem.flag.a_surface) {
                Ok(b) => {
                    checks.push(CheckEntry::new(
                        "delta bound > 1",
                        b.exceeds_one(),
                        (!b.exceeds_one()).then(|| b.to_string()),
                    ));
                    caveats.extend(b.caveats.iter().cloned());
                    computed.insert("delta_bound".into(), Ok(b.adjusted));
                    computed.insert("delta_bound_raw".into(), Ok(b.raw));
                }
                Err(e) => {
                    computed.insert("delta_bound".into(), Err(Error::Data(e.to_string())));
                    computed.insert("delta_bound_raw".into(), Err(e));
                }
            }
        }
        _ => {
            for q in ["delta_bound", "delta_bound_raw"] {
                computed.insert(q.into(), Err(Error::Data("components unavailable".into())));
            }
        }
    }
    computed.insert("S_curve".into(), s_curve);
    computed.insert("S_point".into(), s_point);
}

fn run_smooth_fiber(
    s: &Scenario,
    computed: &mut BTreeMap<String, Result<Rational>>,
    checks: &mut Vec<CheckEntry>,
    caveats: &mut Vec<String>,
) {
    let (surface, map) = (s.surface.as_ref().unwrap(), s.restriction.as_ref().unwrap());
    let delta_lb = s.data.delta_lower_bound.clone().unwrap_or_default();
    match smooth_fiber_bound(&s.threefold, surface, map, &s.certificates[0], &delta_lb) {
        Ok(b) => {
            for (key, poly) in s.data.expected_polynomials.iter().flatten() {
                let i = parse_indexed(key, "restricted_square").unwrap_or(usize::MAX);
                let found = b.restricted_squares.get(i);
                let ok = found == Some(poly);
                let detail = (!ok).then(|| format!("found {}, expected {poly}", found.map_or("none".into(), ToString::to_string)));
                checks.push(CheckEntry::new(format!("{key} = {poly}"), ok, detail));
            }
            let le_one = b.value <= 1;
            checks.push(CheckEntry::new("smooth fiber bound <= 1", le_one, (!le_one).then(|| b.value.to_string())));
            if b.value == 1 {
                caveats.push(
                    "the bound equals A(Z) exactly; strictness rests on the equality case of the flag estimate".into(),
                );
            }
            computed.insert(
                "restricted_square_at_break".into(),
                b.at_break.clone().ok_or_else(|| Error::Data("restricted class never departs from -K".into())),
            );
            computed.insert("integral_restricted_square".into(), Ok(b.integral));
            computed.insert("smooth_fiber_bound".into(), Ok(b.value));
        }
        Err(e) => {
            for q in ["restricted_square_at_break", "integral_restricted_square", "smooth_fiber_bound"] {
                computed.insert(q.into(), Err(Error::Data(e.to_string())));
            }
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct OracleFamilyReport {
    pub scenario: String,
    pub interval: usize,
    pub samples: usize,
    pub agreements: usize,
    pub covered_area: Rational,
    pub domain_area: Rational,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

fn stable_hash(s: &str) -> u64 {
    // FNV-1a
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn sample_fraction(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.gen_range(1..=64);
    Rational::new(rng.gen_range(0..=den), den)
}

/// Compare chamber formulas against pointwise decomposition at seeded
/// rational points `(u_lo + a(u_hi - u_lo), b v_hi(u))`, `a, b` with
/// denominators at most 64.
pub fn sampling_oracle(name: &str, problem: &FlagProblem, samples: usize, seed: u64) -> Result<Vec<OracleFamilyReport>> {
    let families = problem.families()?;
    let mut out = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        let dec = crate::zariski::parametric_zariski(&problem.surface, fam)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash(name) ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut mismatches = Vec::new();
        let mut agreements = 0;
        for _ in 0..samples {
            let c = &fam.domain;
            let u = &c.u_lo + &(&sample_fraction(&mut rng) * &(&c.u_hi - &c.u_lo));
            let v = &sample_fraction(&mut rng) * &c.v_hi.eval(&u);
            let Some(piece) = dec.locate(&u, &v) else {
                mismatches.push(format!("({u}, {v}) lies in no chamber"));
                continue;
            };
            let pointwise = zariski_decompose(&problem.surface, &fam.at(&u, &v))?;
            let Decomposition::Decomposed(r) = pointwise else {
                mismatches.push(format!("({u}, {v}) is not pseudo-effective pointwise"));
                continue;
            };
            if r.positive == piece.positive_at(&u, &v) && r.negative == piece.negative_at(&u, &v) {
                agreements += 1;
            } else {
                mismatches.push(format!("({u}, {v}): chamber {} vs pointwise {:?}", piece, r.negative));
            }
        }
        let covered_area = dec.total_area();
        let domain_area = fam.domain.area();
        let pass = mismatches.is_empty() && covered_area == domain_area;
        out.push(OracleFamilyReport {
            scenario: name.to_string(),
            interval: i,
            samples,
            agreements,
            covered_area,
            domain_area,
            mismatches,
            pass,
        });
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct OracleSummary {
    pub skipped: bool,
    pub families: Vec<OracleFamilyReport>,
    pub errors: Vec<String>,
    pub pass: bool,
}

/// One perturbed datum; running the mutated scenario must fail.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MutationResult {
    pub scenario: String,
    pub mutation: String,
    pub flipped: bool,
}

/// Negative controls for a scenario, each changing one datum.
pub fn mutations(s: &Scenario) -> Vec<(String, Scenario)> {
    let mut out = Vec::new();

    let mut m = s.clone();
    if let Some(iv) = m.certificates.last_mut().and_then(|c| c.intervals.last_mut()) {
        let mut coeffs = iv.positive.coeffs().to_vec();
        coeffs[0] = Scalar::add(&coeffs[0], &Poly1::constant(Rational::new(1, 2)));
        iv.positive = crate::lattice::DivisorClass::new(iv.positive.owner_arc().clone(), coeffs);
        out.push(("certificate coefficient shifted by 1/2".to_string(), m));
    }

    let mut m = s.clone();
    let key = if m.data.expected.contains_key("S_point") {
        "S_point".to_string()
    } else {
        m.data.expected.keys().next_back().cloned().unwrap_or_default()
    };
    let tampered = if m.data.expected.get(&key) == Some(&Rational::new(1, 2)) { Rational::new(1, 3) } else { Rational::new(1, 2) };
    m.data.expected.insert(key.clone(), tampered.clone());
    out.push((format!("expected {key} set to {tampered}"), m));

    match s.data.kind {
        ScenarioKind::Flag => {
            let mut m = s.clone();
            if let Some(f) = m.flag.as_mut() {
                f.different_ord = &f.different_ord + &Rational::new(1, 2);
            }
            out.push(("different raised by 1/2".to_string(), m));
        }
        ScenarioKind::SmoothFiber => {
            let mut m = s.clone();
            m.data.delta_lower_bound = m.data.delta_lower_bound.map(|d| d * Rational::from_int(2));
            out.push(("delta lower bound doubled".to_string(), m));
        }
        ScenarioKind::Divisorial => {}
    }
    out
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub branch: String,
    pub scenarios: Vec<String>,
    pub pass: bool,
}

/// Cases of the final case analysis, each of which needs a passing scenario.
pub const PROOF_BRANCHES: &[&str] = &[
    "divisorial",
    "point_on_D",
    "smooth_fiber_f2_irreducible",
    "smooth_fiber_f2_reducible",
    "smooth_fiber_f2_singular",
    "multiple_fiber",
];

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub parallel: bool,
    pub samples: usize,
    pub seed: u64,
    pub scenario: Option<String>,
    pub include_atlas: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub scenarios: Vec<ScenarioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atlas: Option<AtlasReport>,
    pub oracle: OracleSummary,
    pub mutations: Vec<MutationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Vec<CoverageEntry>>,
    pub verdict: bool,
}

fn map_maybe_parallel<T: Sync, U: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Run the selected scenarios with their mutation controls and the sampling
/// oracle; for the full set also the atlas and the coverage checklist.
pub fn run_all(src: &DataSource, opts: &RunOptions) -> Result<BatchReport> {
    let mut scenarios = load_scenarios(src)?;
    if let Some(name) = &opts.scenario {
        scenarios.retain(|s| s.name() == name);
        if scenarios.is_empty() {
            return Err(Error::InvalidArgument(format!("unknown scenario {name:?}")));
        }
    }
    let reports = map_maybe_parallel(&scenarios, opts.parallel, run_scenario);

    let mutation_jobs: Vec<(String, String, Scenario)> = scenarios
        .iter()
        .flat_map(|s| mutations(s).into_iter().map(move |(label, m)| (s.name().to_string(), label, m)))
        .collect();
    let mutations = map_maybe_parallel(&mutation_jobs, opts.parallel, |(name, label, m)| MutationResult {
        scenario: name.clone(),
        mutation: label.clone(),
        flipped: !run_scenario(m).verdict,
    });

    let oracle = if opts.samples == 0 {
        OracleSummary { skipped: true, families: Vec::new(), errors: Vec::new(), pass: true }
    } else {
        let flags: Vec<&Scenario> = scenarios.iter().filter(|s| s.data.kind == ScenarioKind::Flag).collect();
        let results = map_maybe_parallel(&flags, opts.parallel, |s| {
            let problem = s.flag_problem().expect("flag scenario");
            sampling_oracle(s.name(), &problem, opts.samples, opts.seed).map_err(|e| format!("{}: {e}", s.name()))
        });
        let mut families = Vec::new();
        let mut errors = Vec::new();
        for r in results {
            match r {
                Ok(f) => families.extend(f),
                Err(e) => errors.push(e),
            }
        }
        let pass = errors.is_empty() && families.iter().all(|f| f.pass);
        OracleSummary { skipped: false, families, errors, pass }
    };

    let atlas = if opts.include_atlas { Some(validate_atlas(&Atlas::load(src)?)?) } else { None };

    let coverage = opts.scenario.is_none().then(|| {
        PROOF_BRANCHES
            .iter()
            .map(|branch| {
                let matching: Vec<&ScenarioReport> = reports.iter().filter(|r| r.proof_branch == *branch).collect();
                CoverageEntry {
                    branch: branch.to_string(),
                    scenarios: matching.iter().map(|r| r.scenario.clone()).collect(),
                    pass: !matching.is_empty() && matching.iter().all(|r| r.verdict),
                }
            })
            .collect::<Vec<_>>()
    });

    let verdict = reports.iter().all(|r| r.verdict)
        && mutations.iter().all(|m| m.flipped)
        && oracle.pass
        && atlas.as_ref().is_none_or(|a| a.verdict)
        && coverage.as_ref().is_none_or(|c| c.iter().all(|e| e.pass));
    Ok(BatchReport { scenarios: reports, atlas, oracle, mutations, coverage, verdict })
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

impl BatchReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.scenarios {
            for line in r.lines() {
                out.push_str(&line);
                out.push('\n');
            }
        }
        if let Some(atlas) = &self.atlas {
            let _ = writeln!(out, "== atlas {}", verdict_word(atlas.verdict));
            for line in atlas.lines() {
                let _ = writeln!(out, "{line}");
            }
        }
        if self.oracle.skipped {
            out.push_str("== oracle skipped\n");
        } else {
            let _ = writeln!(out, "== oracle {}", verdict_word(self.oracle.pass));
            for f in &self.oracle.families {
                let _ = writeln!(
                    out,
                    "{} interval {}: {}/{} samples agree, chamber area {} of {} {}",
                    f.scenario,
                    f.interval,
                    f.agreements,
                    f.samples,
                    f.covered_area,
                    f.domain_area,
                    verdict_word(f.pass)
                );
                for m in &f.mismatches {
                    let _ = writeln!(out, "  mismatch {m}");
                }
            }
            for e in &self.oracle.errors {
                let _ = writeln!(out, "error: {e}");
            }
        }
        let _ = writeln!(out, "== mutations {}", verdict_word(self.mutations.iter().all(|m| m.flipped)));
        for m in &self.mutations {
            let _ = writeln!(
                out,
                "{} / {}: {}",
                m.scenario,
                m.mutation,
                if m.flipped { "FAIL as required" } else { "still PASS" }
            );
        }
        if let Some(coverage) = &self.coverage {
            let _ = writeln!(out, "== coverage {}", verdict_word(coverage.iter().all(|c| c.pass)));
            for c in coverage {
                let names = if c.scenarios.is_empty() { "none".to_string() } else { c.scenarios.join(", ") };
                let _ = writeln!(out, "{} -> {} {}", c.branch, names, verdict_word(c.pass));
            }
        }
        let _ = writeln!(out, "verdict: {}", verdict_word(self.verdict));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::r;

    fn scenario(name: &str) -> Scenario {
        builtin_scenarios().unwrap().into_iter().find(|s| s.name() == name).unwrap()
    }

    #[test]
    fn seven_scenarios() {
        let names: Vec<String> = builtin_scenarios().unwrap().iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names.len(), 7);
        assert!(names.contains(&"mult1".to_string()));
    }

    #[test]
    fn shipped_scenario_files_round_trip() {
        let src = DataSource::embedded();
        for name in src.scenario_names().unwrap() {
            let path = format!("scenarios/{name}.json");
            let data: ScenarioData = src.parse(&path).unwrap();
            let again: ScenarioData = serde_json::from_value(serde_json::to_value(&data).unwrap()).unwrap();
            assert_eq!(again, data, "{path}");
        }
    }

    #[test]
    fn mult1_lattice_pairings() {
        let s = scenario("mult1");
        let lat = s.surface.as_ref().unwrap();
        let c = lat.curve("C").unwrap().class.clone();
        let e = lat.curve("E").unwrap().class.clone();
        assert_eq!(lat.pair(&c, &c).unwrap(), r!(0));
        assert_eq!(lat.pair(&e, &e).unwrap(), r!(-1));
        assert_eq!(lat.pair(&c, &e).unwrap(), r!(1));
        assert_eq!(lat.self_intersection(&lat.anticanonical()).unwrap(), r!(3));
    }

    #[test]
    fn delta_d_report() {
        let report = run_scenario(&scenario("delta_d"));
        assert!(report.verdict, "{:#?}", report);
        assert_eq!(report.values["S_curve"], r!(45 / 56));
        assert_eq!(report.values["S_point"], r!(45 / 56));
        assert_eq!(report.values["delta_bound"], r!(56 / 45));
        assert!(report.caveats.iter().any(|c| c.contains("8/7")));
    }

    #[test]
    fn tampered_expectation_fails_with_witness() {
        let mut s = scenario("sm_f2_reducible_node");
        s.data.expected.insert("S_point".into(), r!(1 / 2));
        let report = run_scenario(&s);
        assert!(!report.verdict);
        let q = report.quantities.iter().find(|q| q.name == "S_point").unwrap();
        assert_eq!(q.computed, Some(r!(41 / 56)));
        assert!(!q.matches);
    }

    #[test]
    fn missing_expected_value_is_rejected() {
        let src = DataSource::embedded();
        let mut data: ScenarioData = src.parse("scenarios/mult1.json").unwrap();
        data.expected.remove("S_point");
        assert!(matches!(Scenario::from_data(&src, data), Err(Error::InvalidScenario { .. })));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let src = DataSource::embedded();
        let text = src.read("scenarios/mult1.json").unwrap().replacen("\"kind\"", "\"colour\": \"red\",\n  \"kind\"", 1);
        assert!(Scenario::from_json(&src, &text).is_err());
    }

    #[test]
    fn samples_zero_skips_oracle() {
        let opts = RunOptions { samples: 0, scenario: Some("delta_d".into()), ..Default::default() };
        let report = run_all(&DataSource::embedded(), &opts).unwrap();
        assert!(report.oracle.skipped);
        assert!(report.oracle.pass);
        assert!(report.verdict);
    }
}
