//! Shipped data files, embedded at compile time, with an optional on-disk
//! override directory using the same layout.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::lattice::{RestrictionMap, SurfaceLattice, SurfaceLatticeData, ThreefoldLattice, ThreefoldLatticeData};
use crate::zariski::{ThreefoldCertificate, ThreefoldCertificateData};

macro_rules! embed {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../data/", $path)))),*]
    };
}

static EMBEDDED: &[(&str, &str)] = embed![
    "atlas.json",
    "certificates/delta_d.json",
    "certificates/zd2_f1.json",
    "certificates/zd_f2.json",
    "lattices/d_quadric.json",
    "lattices/f1_sextic.json",
    "lattices/f2_irreducible.json",
    "lattices/f2_reducible.json",
    "lattices/mult1_cubic.json",
    "lattices/threefold.json",
    "restrictions/d_quadric.json",
    "restrictions/f1_sextic.json",
    "restrictions/f2_irreducible.json",
    "restrictions/f2_reducible.json",
    "restrictions/mult1_cubic.json",
    "scenarios/delta_d.json",
    "scenarios/divisorial.json",
    "scenarios/index.json",
    "scenarios/mult1.json",
    "scenarios/sm_f1.json",
    "scenarios/sm_f2_irreducible.json",
    "scenarios/sm_f2_reducible_generic.json",
    "scenarios/sm_f2_reducible_node.json",
];

/// On-disk form of a restriction map into a surface lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionData {
    pub surface: String,
    /// Threefold class of the surface itself.
    pub divisor: String,
    pub images: BTreeMap<String, Vec<Rational>>,
}

/// Where data files are read from: the embedded copies, or a directory.
#[derive(Clone, Debug, Default)]
pub struct DataSource {
    dir: Option<PathBuf>,
}

impl DataSource {
    pub fn embedded() -> Self {
        DataSource { dir: None }
    }

    pub fn dir(path: impl Into<PathBuf>) -> Self {
        DataSource { dir: Some(path.into()) }
    }

    pub fn path(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Raw text of `rel`, e.g. `"lattices/threefold.json"`.
    pub fn read(&self, rel: &str) -> Result<String> {
        if rel.split('/').any(|part| part == ".." || part.is_empty()) {
            return Err(Error::Data(format!("invalid data path {rel:?}")));
        }
        match &self.dir {
            Some(dir) => std::fs::read_to_string(dir.join(rel))
                .map_err(|e| Error::Data(format!("{}: {e}", dir.join(rel).display()))),
            None => embedded(rel)
                .map(str::to_string)
                .ok_or_else(|| Error::Data(format!("no shipped data file {rel:?}"))),
        }
    }

    pub fn parse<T: DeserializeOwned>(&self, rel: &str) -> Result<T> {
        let text = self.read(rel)?;
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("{rel}: {e}")))
    }

    pub fn threefold(&self, name: &str) -> Result<ThreefoldLattice> {
        ThreefoldLattice::from_data(&self.parse::<ThreefoldLatticeData>(&format!("lattices/{name}.json"))?)
    }

    pub fn surface(&self, name: &str) -> Result<SurfaceLattice> {
        let lattice = SurfaceLattice::from_data(&self.parse::<SurfaceLatticeData>(&format!("lattices/{name}.json"))?)?;
        if lattice.name() != name {
            return Err(Error::Data(format!("lattices/{name}.json declares name {:?}", lattice.name())));
        }
        Ok(lattice)
    }

    pub fn restriction_data(&self, surface: &str) -> Result<RestrictionData> {
        self.parse(&format!("restrictions/{surface}.json"))
    }

    pub fn restriction(&self, t: &ThreefoldLattice, s: &SurfaceLattice) -> Result<RestrictionMap> {
        let data = self.restriction_data(s.name())?;
        if data.surface != s.name() {
            return Err(Error::Data(format!("restriction file for {} targets {}", s.name(), data.surface)));
        }
        RestrictionMap::from_labels(t, s, &data.images)
    }

    pub fn certificate_data(&self, name: &str) -> Result<ThreefoldCertificateData> {
        self.parse(&format!("certificates/{name}.json"))
    }

    pub fn certificate(&self, t: &ThreefoldLattice, name: &str) -> Result<ThreefoldCertificate> {
        ThreefoldCertificate::from_data(t, &self.certificate_data(name)?)
    }

    pub fn scenario_names(&self) -> Result<Vec<String>> {
        self.parse("scenarios/index.json")
    }
}

/// Text of a shipped file.
pub fn embedded(rel: &str) -> Option<&'static str> {
    EMBEDDED.iter().find(|(p, _)| *p == rel).map(|(_, text)| *text)
}

/// Paths of all shipped files.
pub fn embedded_paths() -> impl Iterator<Item = &'static str> {
    EMBEDDED.iter().map(|(p, _)| *p)
}

pub fn threefold() -> Result<ThreefoldLattice> {
    DataSource::embedded().threefold("threefold")
}

pub fn surface(name: &str) -> Result<SurfaceLattice> {
    DataSource::embedded().surface(name)
}

pub fn restriction(surface_name: &str) -> Result<RestrictionMap> {
    let src = DataSource::embedded();
    src.restriction(&src.threefold("threefold")?, &src.surface(surface_name)?)
}

pub fn certificate(t: &ThreefoldLattice, name: &str) -> Result<ThreefoldCertificate> {
    DataSource::embedded().certificate(t, name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_file_parses_as_json() {
        for path in embedded_paths() {
            let text = embedded(path).unwrap();
            assert!(serde_json::from_str::<serde_json::Value>(text).is_ok(), "{path}");
        }
    }

    #[test]
    fn directory_source_matches_embedded() {
        let dir = DataSource::dir(concat!(env!("CARGO_MANIFEST_DIR"), "/data"));
        for path in embedded_paths() {
            assert_eq!(dir.read(path).unwrap(), embedded(path).unwrap(), "{path}");
        }
    }

    #[test]
    fn path_escapes_are_rejected() {
        assert!(DataSource::embedded().read("../Cargo.toml").is_err());
        assert!(DataSource::dir("/tmp").read("a//b").is_err());
    }

    #[test]
    fn restriction_consistency_for_every_surface() {
        let t = threefold().unwrap();
        for name in ["d_quadric", "f2_irreducible", "f2_reducible", "mult1_cubic", "f1_sextic"] {
            let s = surface(name).unwrap();
            let data = DataSource::embedded().restriction_data(name).unwrap();
            let map = restriction(name).unwrap();
            let y = t.divisor(&data.divisor).unwrap();
            let failures = map.consistency_failures(&t, &s, &y).unwrap();
            assert!(failures.is_empty(), "{name}: {failures:?}");
        }
    }

    #[test]
    fn mori_curve_c_is_f1_times_f2() {
        let t = threefold().unwrap();
        let f1 = t.divisor("F1").unwrap();
        let f2 = t.divisor("F2").unwrap();
        for label in ["D", "F1", "F2"] {
            let d = t.divisor(label).unwrap();
            assert_eq!(t.pair_curve(&d, "C").unwrap(), t.triple(&d, &f1, &f2).unwrap());
        }
    }
}
