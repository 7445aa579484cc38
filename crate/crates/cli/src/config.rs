use std::fs;
use std::path::{Path, PathBuf};

use gic_core::model::validate_params;
use gic_core::optimizer::{check_mu_list, default_mu_grid, SearchConfig};
use gic_core::ChannelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub fn default_deltas() -> Vec<f64> {
    vec![1e-1, 5e-2, 2.5e-2, 1.25e-2]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_instances() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub search: SearchConfig,
    pub deltas: Vec<f64>,
    /// Private powers `(pv1, pv2)` for the layer run; half of each budget when
    /// absent.
    pub layer_split: Option<(f64, f64)>,
    pub out_dir: PathBuf,
    pub plot: bool,
    pub seed: u64,
    /// Random instances per check in the validation suite.
    pub instances: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            search: SearchConfig::default(),
            deltas: default_deltas(),
            layer_split: None,
            out_dir: default_out_dir(),
            plot: false,
            seed: 0,
            instances: default_instances(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: ChannelParams,
    #[serde(default = "default_mu_grid")]
    pub mu_grid: Vec<f64>,
    #[serde(default)]
    pub options: Options,
}

impl Default for Scenario {
    /// Symmetric instance `a = b = 0.25`, `p1 = p2 = 2`, unit noise.
    fn default() -> Self {
        Scenario {
            params: ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).expect("valid default"),
            mu_grid: default_mu_grid(),
            options: Options::default(),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let sc: Scenario = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid scenario: {e}")))?;
        sc.validated()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|_| CliError::Config(format!("config not found: {}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn validated(mut self) -> Result<Self, CliError> {
        self.params = validate_params(self.params).map_err(|e| CliError::Config(e.to_string()))?;
        check_mu_list(&self.mu_grid).map_err(|e| CliError::Config(e.to_string()))?;
        let d = &self.options.deltas;
        if d.is_empty() || d.iter().any(|x| !(*x > 0.0)) || d.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::Config(
                "deltas must be positive and strictly decreasing".into(),
            ));
        }
        let s = &self.options.search;
        if s.all_private_grid < 2 || s.split_grid < 2 {
            return Err(CliError::Config(
                "search grids need at least two points".into(),
            ));
        }
        if self.options.instances == 0 {
            return Err(CliError::Config("instances must be positive".into()));
        }
        Ok(self)
    }

    pub fn layer_split(&self) -> (f64, f64) {
        self.options
            .layer_split
            .unwrap_or((0.5 * self.params.p1, 0.5 * self.params.p2))
    }
}

/// Parses a comma-separated mu list such as `"0.5,1,2"`.
pub fn parse_mu_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let mus = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad mu value {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_mu_list(&mus).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(mus)
}
