use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::write_atomic;
use crate::channel::{DirectLinkModel, LinkGeometry, Scene};
use crate::error::{Error, Result};
use crate::model::{IdealPin, IdealVaractor, ReflectionModel, VaractorTable};
use crate::nonreciprocal::{parse_error, ActiveCellModel, NonlinearCellModel};
use crate::panel::{build_panel, Panel};
use crate::pattern::{make_pattern, PatternSpec};

/// Environment variable naming a directory of `<id>.toml` fixtures that
/// replaces the built-in set.
pub const FIXTURE_DIR_ENV: &str = "RISRECIP_FIXTURES";

pub const FIXTURE_IDS: [&str; 4] = ["ris1-a", "ris1-b", "ris2-a", "ris2-b"];

const EMBEDDED: [(&str, &str); 4] = [
    ("ris1-a", include_str!("../../fixtures/ris1-a.toml")),
    ("ris1-b", include_str!("../../fixtures/ris1-b.toml")),
    ("ris2-a", include_str!("../../fixtures/ris2-a.toml")),
    ("ris2-b", include_str!("../../fixtures/ris2-b.toml")),
];

/// Cell model as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellModelSpec {
    IdealVaractor(IdealVaractor),
    IdealPin(IdealPin),
    /// CSV with header `voltage_V,magnitude,phase_deg`, relative to the
    /// working directory.
    TableVaractor { path: PathBuf },
    AngleDependent { q: f64, base: Box<CellModelSpec> },
    Active(ActiveCellModel),
    Nonlinear(NonlinearCellModel),
}

impl CellModelSpec {
    pub fn build(&self) -> Result<ReflectionModel> {
        let model = match self {
            CellModelSpec::IdealVaractor(m) => ReflectionModel::IdealVaractor(*m),
            CellModelSpec::IdealPin(m) => ReflectionModel::IdealPin(*m),
            CellModelSpec::TableVaractor { path } => ReflectionModel::TableVaractor(VaractorTable::load(path)?),
            CellModelSpec::AngleDependent { q, base } => ReflectionModel::angle_dependent(base.build()?, *q),
            CellModelSpec::Active(m) => ReflectionModel::Active(*m),
            CellModelSpec::Nonlinear(m) => ReflectionModel::Nonlinear(*m),
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelSpec {
    pub rows: usize,
    pub cols: usize,
    pub dx_m: f64,
    pub dy_m: f64,
    /// Columns per super-column.
    pub group_cols: usize,
    pub model: CellModelSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectLinkSpec {
    None,
    FreeSpaceLos,
    FixedComplex { re: f64, im: f64 },
}

impl DirectLinkSpec {
    pub fn model(&self) -> DirectLinkModel {
        match *self {
            DirectLinkSpec::None => DirectLinkModel::None,
            DirectLinkSpec::FreeSpaceLos => DirectLinkModel::FreeSpaceLos,
            DirectLinkSpec::FixedComplex { re, im } => DirectLinkModel::FixedComplex(Complex64::new(re, im)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub steps: usize,
}

/// One measurement setup: geometry, panel, static pattern and direct link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    /// Whether phase columns are meaningful for this setup.
    #[serde(default = "default_true")]
    pub report_phase: bool,
    pub geometry: LinkGeometry,
    pub panel: PanelSpec,
    pub pattern: PatternSpec,
    pub direct_link: DirectLinkSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_true() -> bool {
    true
}

impl Scenario {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| parse_error(path, text, &e))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("cannot serialise scenario {}: {e}", self.id)))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_toml_string()?.as_bytes())
    }

    /// Checks every reference and bound, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::validation("id", "must not be empty"));
        }
        self.geometry.validate()?;
        if let DirectLinkSpec::FixedComplex { re, im } = self.direct_link {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::validation("direct_link", "fixed value must be finite"));
            }
        }
        if let Some(sweep) = self.sweep {
            if sweep.steps < 2 {
                return Err(Error::validation("sweep.steps", format!("{} must be >= 2", sweep.steps)));
            }
        }
        let panel = self.build_panel()?;
        make_pattern(&self.pattern, &panel).map_err(|e| Error::validation("pattern", e.to_string()))?;
        Ok(())
    }

    pub fn build_panel(&self) -> Result<Panel> {
        let p = &self.panel;
        let model = p.model.build().map_err(|e| match e {
            e @ Error::Io { .. } | e @ Error::Parse { .. } => e,
            e => Error::validation("panel.model", e.to_string()),
        })?;
        build_panel(p.rows, p.cols, p.dx_m, p.dy_m, p.group_cols, model)
            .map_err(|e| Error::validation("panel", e.to_string()))
    }

    /// Scene with the scenario's own pattern.
    pub fn scene(&self) -> Result<Scene> {
        self.scene_with(&self.pattern)
    }

    pub fn scene_with(&self, pattern: &PatternSpec) -> Result<Scene> {
        let panel = self.build_panel()?;
        let pattern = make_pattern(pattern, &panel)?;
        Scene::new(panel, pattern, self.geometry, self.direct_link.model())
    }

    /// The sweep length from the file, else the 0.1 V default grid.
    pub fn sweep_steps(&self) -> usize {
        self.sweep.map_or(211, |s| s.steps)
    }
}

/// Loads a reserved fixture, from [`FIXTURE_DIR_ENV`] when it is set.
pub fn load_fixture(id: &str) -> Result<Scenario> {
    if let Some(dir) = std::env::var_os(FIXTURE_DIR_ENV) {
        return Scenario::load(Path::new(&dir).join(format!("{id}.toml")));
    }
    let (_, text) = EMBEDDED
        .iter()
        .find(|(name, _)| *name == id)
        .ok_or_else(|| Error::Argument(format!("unknown fixture {id:?}; known: {}", FIXTURE_IDS.join(", "))))?;
    Scenario::from_toml_str(text, Path::new(&format!("<fixture {id}>")))
}

/// A path to a scenario file, or a fixture id when no such file exists.
pub fn load_scenario(path_or_id: &str) -> Result<Scenario> {
    let path = Path::new(path_or_id);
    if path.exists() || path.extension().is_some_and(|e| e == "toml") {
        Scenario::load(path)
    } else {
        load_fixture(path_or_id)
    }
}
