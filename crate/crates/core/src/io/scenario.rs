//! JSON scenario files.
//!
//! Every field has a default, so `{}` is a complete scenario. Unknown keys
//! are rejected at every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engines::{initial_moduli, SlaConfig, Specimen, SsConfig};
use crate::error::{Error, Result};
use crate::material::{sample_field, MaterialParams, RandomField, StepFunction};
use crate::mesh::{assign_patches, attach_strip, build_structured_mesh};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    /// Block width (m).
    pub width: f64,
    /// Block height (m).
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    /// Out-of-plane depth (m).
    pub depth: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            width: 0.2,
            height: 0.3,
            nx: 40,
            ny: 30,
            depth: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StripSpec {
    pub width: f64,
    pub thickness: f64,
    /// Offset of the strip centre from the block centre line (m).
    pub eccentricity: f64,
    pub rows: usize,
}

impl Default for StripSpec {
    fn default() -> Self {
        StripSpec {
            width: 0.07,
            thickness: 0.005,
            eccentricity: 0.05,
            rows: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomSpec {
    pub seed: u64,
    pub e_min: f64,
    pub e_max: f64,
    pub patch_w: f64,
    pub patch_h: f64,
    /// Use `materials.e_avg` everywhere instead of sampling. Defaults to
    /// `true` for SLA and `false` for SS.
    pub constant_e: Option<bool>,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            seed: 1,
            e_min: 6300e6,
            e_max: 7700e6,
            patch_w: 0.02,
            patch_h: 0.02,
            constant_e: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Engine {
    Sla(SlaConfig),
    Ss(SsConfig),
}

impl Default for Engine {
    fn default() -> Self {
        Engine::Ss(SsConfig::default())
    }
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Sla(_) => "sla",
            Engine::Ss(_) => "ss",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub directory: PathBuf,
    /// Write a field snapshot every this many steps (0 = final state only).
    /// Defaults to 1 for SLA and 10 for SS.
    pub snapshot_every: Option<usize>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            directory: PathBuf::from("out"),
            snapshot_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub geometry: Geometry,
    pub strip: StripSpec,
    pub materials: MaterialParams,
    pub step_function: StepFunction,
    pub random: RandomSpec,
    pub engine: Engine,
    pub output: OutputSpec,
}

impl Scenario {
    /// Parses and validates a scenario; engine-dependent defaults are filled in.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let mut s: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        s.resolve();
        s.validate()?;
        Ok(s)
    }

    /// Fills the engine-dependent defaults.
    pub fn resolve(&mut self) {
        let sla = matches!(self.engine, Engine::Sla(_));
        self.random.constant_e.get_or_insert(sla);
        self.output.snapshot_every.get_or_insert(if sla { 1 } else { 10 });
    }

    pub fn constant_e(&self) -> bool {
        self.random.constant_e.unwrap_or(matches!(self.engine, Engine::Sla(_)))
    }

    pub fn snapshot_every(&self) -> usize {
        self.output
            .snapshot_every
            .unwrap_or(if matches!(self.engine, Engine::Sla(_)) { 1 } else { 10 })
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        for (key, v) in [
            ("geometry.width", g.width),
            ("geometry.height", g.height),
            ("geometry.depth", g.depth),
            ("strip.width", self.strip.width),
            ("strip.thickness", self.strip.thickness),
            ("random.patch_w", self.random.patch_w),
            ("random.patch_h", self.random.patch_h),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{key} must be positive, got {v}")));
            }
        }
        for (key, n) in [("geometry.nx", g.nx), ("geometry.ny", g.ny), ("strip.rows", self.strip.rows)] {
            if n == 0 {
                return Err(Error::Config(format!("{key} must be at least 1")));
            }
        }
        if !self.strip.eccentricity.is_finite() {
            return Err(Error::Config("strip.eccentricity must be finite".into()));
        }
        if !self.constant_e() {
            let r = &self.random;
            if !(r.e_min.is_finite() && r.e_min > 0.0 && r.e_min <= r.e_max && r.e_max.is_finite()) {
                return Err(Error::Config(format!(
                    "random.e_min and random.e_max must satisfy 0 < e_min <= e_max, got [{}, {}]",
                    r.e_min, r.e_max
                )));
            }
        }
        self.materials.validate()?;
        match &self.engine {
            Engine::Sla(c) => c.validate(),
            Engine::Ss(c) => c.validate(),
        }
    }

    pub fn build_specimen(&self) -> Result<Specimen> {
        let g = &self.geometry;
        let mesh = build_structured_mesh(g.width, g.height, g.nx, g.ny, g.depth)?;
        let s = &self.strip;
        let mesh = attach_strip(mesh, s.width, s.thickness, s.eccentricity, s.rows)?;
        let mesh = assign_patches(mesh, self.random.patch_w, self.random.patch_h)?;
        mesh.validate()?;
        Specimen::from_mesh(mesh)
    }

    /// Per-patch initial moduli for `seed`. A constant field uses `e_avg`.
    pub fn field(&self, specimen: &Specimen, seed: u64) -> Result<RandomField> {
        let grid = specimen
            .mesh
            .patches
            .ok_or_else(|| Error::Config("mesh has no patch grid".into()))?;
        if self.constant_e() {
            sample_field(seed, &grid, self.materials.e_avg, self.materials.e_avg)
        } else {
            sample_field(seed, &grid, self.random.e_min, self.random.e_max)
        }
    }

    pub fn initial_moduli(&self, specimen: &Specimen, seed: u64) -> Result<Vec<f64>> {
        initial_moduli(&specimen.mesh, &self.field(specimen, seed)?, &self.materials)
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_json(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        Scenario::from_json(text, Path::new("test.json"))
    }

    #[test]
    fn empty_object_is_default_ss() {
        let s = parse("{}").unwrap();
        assert_eq!(s.engine, Engine::Ss(SsConfig::default()));
        assert_eq!(s.random.constant_e, Some(false));
        assert_eq!(s.output.snapshot_every, Some(10));
        assert_eq!(s.geometry, Geometry::default());
    }

    #[test]
    fn sla_defaults_to_constant_field() {
        let s = parse(r#"{"engine": {"kind": "sla", "max_steps": 40}}"#).unwrap();
        match &s.engine {
            Engine::Sla(c) => assert_eq!(c.max_steps, 40),
            e => panic!("wrong engine {e:?}"),
        }
        assert!(s.constant_e());
        assert_eq!(s.snapshot_every(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(parse(r#"{"geometri": {}}"#), Err(Error::Parse { .. })));
        assert!(matches!(parse(r#"{"geometry": {"nz": 3}}"#), Err(Error::Parse { .. })));
        assert!(matches!(
            parse(r#"{"engine": {"kind": "sla", "n_steps": 3}}"#),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse(r#"{"engine": {"kind": "fem"}}"#), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_error_has_position() {
        match parse("{\n  \"geometry\": {\n    \"nx\": -3\n  }\n}") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_key() {
        let err = parse(r#"{"geometry": {"width": 0.0}}"#).unwrap_err().to_string();
        assert!(err.contains("geometry.width"), "{err}");
        let err = parse(r#"{"engine": {"kind": "ss", "relaxation": 2.0}}"#).unwrap_err().to_string();
        assert!(err.contains("relaxation"), "{err}");
        let err = parse(r#"{"step_function": [[0.0, 0.5]]}"#).unwrap_err().to_string();
        assert!(err.contains("test.json"), "{err}");
    }

    #[test]
    fn round_trips_through_json() {
        let s = parse(r#"{"engine": {"kind": "sla"}, "random": {"seed": 9}}"#).unwrap();
        let text = serde_json::to_string_pretty(&s).unwrap();
        assert_eq!(parse(&text).unwrap(), s);
    }

    #[test]
    fn builds_specimen_and_field() {
        let s = parse("{}").unwrap();
        let sp = s.build_specimen().unwrap();
        assert_eq!(sp.mesh.n_elements(), 1200 + 14);
        let strip = sp.mesh.strip.as_ref().unwrap();
        assert!(strip.width_snap.abs() < 1e-12 && strip.center_snap.abs() < 1e-12);
        let e0 = s.initial_moduli(&sp, 3).unwrap();
        assert!(e0[..1200].iter().all(|&e| (6300e6..=7700e6).contains(&e)));
        assert!(e0[1200..].iter().all(|&e| e == 1000e6));
    }
}
