//! Atlas of negative-curve configurations on du Val del Pezzo surfaces and
//! their minimal resolutions, with arithmetic consistency checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::DataSource;
use crate::error::{Error, Result};
use crate::exactmath::Rational;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    MinusOne,
    MinusTwo,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::MinusOne => "(-1)",
            CurveKind::MinusTwo => "(-2)",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AtlasCurve {
    pub label: String,
    pub kind: CurveKind,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfiguration {
    pub case_id: String,
    pub degree: i64,
    pub declared_rho: i64,
    /// Number of (-1)-curves the classification states for this case.
    pub stated_minus_one: usize,
    pub curves: Vec<AtlasCurve>,
    pub adjacency: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CurveConfiguration {
    pub fn count(&self, kind: CurveKind) -> usize {
        self.curves.iter().filter(|c| c.kind == kind).count()
    }

    /// Per curve: kind, weighted degree, and the sorted kinds of its neighbours.
    pub fn degree_signature(&self) -> Vec<(CurveKind, u32, Vec<CurveKind>)> {
        let mut sig: Vec<_> = self
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let row = self.adjacency.get(i).cloned().unwrap_or_default();
                let mut nbrs: Vec<CurveKind> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0)
                    .flat_map(|(j, &m)| std::iter::repeat_n(self.curves[j].kind, m as usize))
                    .collect();
                nbrs.sort();
                (c.kind, row.iter().sum(), nbrs)
            })
            .collect();
        sig.sort();
        sig
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConfigCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ValidationReport {
    pub case_id: String,
    pub checks: Vec<ConfigCheck>,
    pub valid: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.case_id, if self.valid { "PASS" } else { "FAIL" })?;
        for c in self.checks.iter().filter(|c| !c.pass) {
            write!(f, " [{}: {}]", c.name, c.detail)?;
        }
        Ok(())
    }
}

use CurveKind::{MinusOne as M1, MinusTwo as M2};

type Diagram = (Vec<CurveKind>, Vec<(usize, usize)>);

/// Reference dual graphs as edge lists over curve kinds, compared with the
/// data by degree signature.
fn reference_diagram(case_id: &str) -> Option<Diagram> {
    Some(match case_id {
        "sextic_1" => (vec![M1; 6], vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
        "sextic_2" => (vec![M1, M1, M2, M1, M1], vec![(0, 1), (1, 2), (2, 3), (3, 4)]),
        "sextic_3" => (vec![M2, M1, M1, M1], vec![(0, 1), (0, 2), (0, 3)]),
        "sextic_4" => (vec![M2, M2, M1, M1], vec![(0, 1), (1, 2), (1, 3)]),
        "sextic_5" => (vec![M2, M1, M2, M1], vec![(0, 1), (1, 2), (2, 3)]),
        "sextic_6" => (vec![M2, M2, M1, M2], vec![(0, 1), (1, 2), (2, 3)]),
        "cubic_double_fiber" => (vec![M1, M1, M2, M2], vec![(0, 1), (0, 2), (0, 3)]),
        _ => return None,
    })
}

fn reference_configuration(case_id: &str) -> Option<CurveConfiguration> {
    let (kinds, edges) = reference_diagram(case_id)?;
    let n = kinds.len();
    let mut adjacency = vec![vec![0; n]; n];
    for (a, b) in edges {
        adjacency[a][b] += 1;
        adjacency[b][a] += 1;
    }
    Some(CurveConfiguration {
        case_id: case_id.to_string(),
        degree: 0,
        declared_rho: 0,
        stated_minus_one: 0,
        curves: kinds
            .into_iter()
            .enumerate()
            .map(|(i, kind)| AtlasCurve { label: i.to_string(), kind })
            .collect(),
        adjacency,
        note: None,
    })
}

/// (a) (-1)-curve count against the stated count, (b) `rho + #(-2) = 10 - degree`,
/// (c) adjacency symmetric, zero diagonal, and matching the reference diagram.
pub fn validate_configuration(c: &CurveConfiguration) -> ValidationReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, pass: bool, detail: String| {
        checks.push(ConfigCheck { name: name.to_string(), pass, detail });
    };

    let minus_one = c.count(CurveKind::MinusOne);
    check(
        "(-1)-curve count",
        minus_one == c.stated_minus_one,
        format!("{minus_one} listed, {} stated", c.stated_minus_one),
    );

    let minus_two = c.count(CurveKind::MinusTwo) as i64;
    let resolved_rho = 10 - c.degree;
    check(
        "rho + #(-2) = 10 - degree",
        c.declared_rho + minus_two == resolved_rho,
        format!("{} + {minus_two} vs {resolved_rho}", c.declared_rho),
    );

    let n = c.curves.len();
    let square = c.adjacency.len() == n && c.adjacency.iter().all(|r| r.len() == n);
    let symmetric = square && (0..n).all(|i| c.adjacency[i][i] == 0 && (0..n).all(|j| c.adjacency[i][j] == c.adjacency[j][i]));
    check("adjacency symmetric", symmetric, format!("{n} curves"));

    match reference_configuration(&c.case_id) {
        Some(reference) if symmetric => {
            let ok = reference.degree_signature() == c.degree_signature();
            check("diagram", ok, "degree signature compared with the reference graph".into());
        }
        Some(_) => check("diagram", false, "adjacency malformed".into()),
        None => check("diagram", false, format!("no reference diagram for {:?}", c.case_id)),
    }

    let valid = checks.iter().all(|c| c.pass);
    ValidationReport { case_id: c.case_id.clone(), checks, valid }
}

/// `fiber_sq - k/2`: self-intersection on the minimal resolution of a curve
/// through `k` points of type A1.
pub fn strict_transform_self_intersection(fiber_sq: &Rational, k: i64) -> Result<Rational> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("number of singular points must be >= 0, got {k}")));
    }
    Ok(fiber_sq - &Rational::new(k, 2))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StrictTransformCase {
    pub fiber_sq: Rational,
    pub k: i64,
    pub expected: Rational,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StrictTransformReport {
    pub fiber_sq: Rational,
    pub k: i64,
    pub value: Rational,
    pub expected: Rational,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Counts of A1 points on a half-fiber that cannot occur.
pub fn excluded_point_count(k: i64) -> Option<&'static str> {
    match k {
        4 => Some("excluded: the pullback of the half-fiber would have nonzero square"),
        k if k % 2 == 1 => Some("excluded: non-integral self-intersection"),
        0 => Some("excluded: a multiple fiber passes through a singular point"),
        _ => None,
    }
}

pub fn strict_transform_report(case: &StrictTransformCase) -> Result<StrictTransformReport> {
    let value = strict_transform_self_intersection(&case.fiber_sq, case.k)?;
    Ok(StrictTransformReport {
        fiber_sq: case.fiber_sq.clone(),
        k: case.k,
        matches: value == case.expected,
        expected: case.expected.clone(),
        value,
        note: excluded_point_count(case.k).map(str::to_string),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atlas {
    pub configurations: Vec<CurveConfiguration>,
    pub strict_transforms: Vec<StrictTransformCase>,
    /// Singularity types admitted on the cubic with a double fiber; stored, not derived.
    pub cubic_singularity_types: Vec<String>,
}

impl Atlas {
    pub fn load(src: &DataSource) -> Result<Atlas> {
        src.parse("atlas.json")
    }

    pub fn configuration(&self, case_id: &str) -> Option<&CurveConfiguration> {
        self.configurations.iter().find(|c| c.case_id == case_id)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasReport {
    pub configurations: Vec<ValidationReport>,
    pub strict_transforms: Vec<StrictTransformReport>,
    pub verdict: bool,
}

impl AtlasReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.configurations.iter().map(ToString::to_string).collect();
        for s in &self.strict_transforms {
            let mut line = format!(
                "strict transform ({}, k={}) = {} [expected {}] {}",
                s.fiber_sq,
                s.k,
                s.value,
                s.expected,
                if s.matches { "PASS" } else { "FAIL" }
            );
            if let Some(note) = &s.note {
                line.push_str(&format!(" ({note})"));
            }
            out.push(line);
        }
        out
    }
}

pub fn validate_atlas(atlas: &Atlas) -> Result<AtlasReport> {
    let configurations: Vec<ValidationReport> = atlas.configurations.iter().map(validate_configuration).collect();
    let strict_transforms = atlas
        .strict_transforms
        .iter()
        .map(strict_transform_report)
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeMap::new();
    for c in &atlas.configurations {
        if seen.insert(c.case_id.as_str(), ()).is_some() {
            return Err(Error::Data(format!("duplicate atlas case {:?}", c.case_id)));
        }
    }
    let verdict = configurations.iter().all(|r| r.valid) && strict_transforms.iter().all(|s| s.matches);
    Ok(AtlasReport { configurations, strict_transforms, verdict })
}
