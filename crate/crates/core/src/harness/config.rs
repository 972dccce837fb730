use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metric::MatchParams;
use crate::raster::LoadOptions;
use crate::rts::RtsConfig;

use super::dataset::Layout;

/// Per-dataset overrides.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSection {
    pub path: Option<PathBuf>,
    pub layout: Layout,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub load: LoadOptions,
    pub rts: RtsConfig,
    #[serde(rename = "match")]
    pub matching: MatchParams,
    pub datasets: BTreeMap<String, DatasetSection>,
}

impl Default for Config {
    fn default() -> Self {
        let mut datasets = BTreeMap::new();
        datasets.insert(
            "tari56".to_string(),
            DatasetSection { layout: Layout::Tari56, beta1: Some(30.0), beta2: Some(0.6), ..Default::default() },
        );
        datasets.insert(
            "kimia99".to_string(),
            DatasetSection { layout: Layout::Kimia99, beta1: Some(29.0), beta2: Some(0.7), ..Default::default() },
        );
        Config { load: LoadOptions::default(), rts: RtsConfig::default(), matching: MatchParams::default(), datasets }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Matching parameters with the named dataset's overrides applied.
    pub fn params_for(&self, dataset: &str) -> MatchParams {
        let mut p = self.matching;
        if let Some(s) = self.datasets.get(dataset) {
            p.beta1 = s.beta1.unwrap_or(p.beta1);
            p.beta2 = s.beta2.unwrap_or(p.beta2);
        }
        p
    }
}
