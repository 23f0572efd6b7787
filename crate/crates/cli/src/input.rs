//! Input files and their diagnostics.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use oscint_core::linalg::Mat;
use oscint_core::quadrature::{unit_box, BumpSpec, Interval, QuadConfig, Rule};
use oscint_core::quadrature::{DEFAULT_REFINE_TOL, MIN_NODES_PER_AXIS};
use oscint_core::snarl::Snarl;
use oscint_core::wire::{LabelledMap, MapsJson, PolyJson, SnarlJson};

use crate::{CliError, CliResult};

/// Parses JSON, reporting the field path and position of the first problem.
pub fn parse<T: DeserializeOwned>(what: &str, text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::input(format!(
            "{what}: {inner} (field `{}`)",
            if path.is_empty() { "." } else { &path }
        ))
    })
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// A snarl given either by subspace bases or by the maps whose null spaces it lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnarlInput {
    Maps(MapsJson),
    Subspaces(SnarlJson),
}

impl SnarlInput {
    pub fn parse(text: &str) -> CliResult<SnarlInput> {
        let v: serde_json::Value = parse("snarl", text)?;
        if v.get("maps").is_some() {
            Ok(SnarlInput::Maps(parse("snarl maps", text)?))
        } else {
            Ok(SnarlInput::Subspaces(parse("snarl", text)?))
        }
    }

    pub fn snarl(&self) -> CliResult<Snarl> {
        match self {
            SnarlInput::Maps(m) => Ok(Snarl::from_maps(&m.to_maps()?)?),
            SnarlInput::Subspaces(s) => Ok(Snarl::try_from(s.clone())?),
        }
    }

    pub fn maps(&self) -> CliResult<Option<Vec<(String, Mat)>>> {
        match self {
            SnarlInput::Maps(m) => Ok(Some(m.to_maps()?)),
            SnarlInput::Subspaces(_) => Ok(None),
        }
    }
}

/// Quadrature settings; every field has a default.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_box: Option<Vec<Interval>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes_per_axis: Option<usize>,
}

impl QuadSpec {
    pub fn config(&self, m: usize) -> QuadConfig {
        QuadConfig {
            nodes_per_axis: self.nodes_per_axis.unwrap_or(MIN_NODES_PER_AXIS),
            domain_box: self.domain_box.clone().unwrap_or_else(|| unit_box(m)),
            rule: self.rule.unwrap_or(Rule::GaussLegendre),
            refine_tol: self.refine_tol.unwrap_or(DEFAULT_REFINE_TOL),
            max_nodes_per_axis: self.max_nodes_per_axis,
        }
    }
}

/// Everything a decay sweep needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub phase: PolyJson,
    pub maps: Vec<LabelledMap>,
    /// Functions for the fixed mode; smooth bumps on unit boxes when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bumps: Option<Vec<BumpSpec>>,
    /// Supports of the modulated bumps in adversarial mode; defaults to the boxes of
    /// `bumps`, or unit boxes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<Vec<Vec<Interval>>>,
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub quad: QuadSpec,
    #[serde(default)]
    pub adversarial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunSpec {
    pub fn parse(text: &str) -> CliResult<RunSpec> {
        parse("run spec", text)
    }

    pub fn num_vars(&self) -> usize {
        self.phase.vars
    }

    pub fn labelled_maps(&self) -> CliResult<Vec<(String, Mat)>> {
        MapsJson {
            m: self.num_vars(),
            maps: self.maps.clone(),
        }
        .to_maps()
        .map_err(Into::into)
    }

    pub fn bumps(&self, maps: &[(String, Mat)]) -> Vec<BumpSpec> {
        self.bumps.clone().unwrap_or_else(|| {
            maps.iter()
                .map(|(_, a)| BumpSpec::smooth(unit_box(a.rows())))
                .collect()
        })
    }

    pub fn supports(&self, maps: &[(String, Mat)]) -> Vec<Vec<Interval>> {
        if let Some(b) = &self.boxes {
            return b.clone();
        }
        self.bumps(maps).into_iter().map(|f| f.support).collect()
    }
}
