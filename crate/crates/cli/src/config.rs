//! Optional TOML configuration. Every value can also be given as a flag;
//! flags win, then the file, then built-in defaults.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

use crate::InputError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub graph: GraphSection,
    #[serde(default)]
    pub pagerank: PageRankSection,
    #[serde(default)]
    pub combination: CombinationSection,
    #[serde(default)]
    pub census: CensusSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub weighted: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageRankSection {
    pub damping: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub exact_node_cap: Option<usize>,
    pub pivots: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationSection {
    pub motif: Option<String>,
    pub mode: Option<String>,
    pub alpha: Option<f64>,
    pub counting: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSection {
    pub n: Option<usize>,
    pub method: Option<String>,
    pub samples: Option<usize>,
    pub max_subgraphs: Option<u64>,
    pub random_networks: Option<usize>,
    pub swap_factor: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub k: Option<Vec<usize>>,
    pub methods: Option<Vec<String>>,
    pub reference: Option<String>,
    pub reps: Option<usize>,
    pub fraction: Option<f64>,
    pub test: Option<String>,
    pub idcg: Option<String>,
    pub alphas: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| InputError(format!("invalid config {}: {e}", path.display())))
            .context("loading configuration")
    }
}
