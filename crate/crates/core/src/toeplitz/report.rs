//! JSON layout of a spectral run.

use serde::{Deserialize, Serialize};

use super::schatten::Verdict;
use crate::quadrature::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    #[serde(rename = "Nr")]
    pub n_r: usize,
    #[serde(rename = "Ntheta")]
    pub n_theta: usize,
    pub kappa: f64,
}

impl From<&GridSpec> for GridSummary {
    fn from(g: &GridSpec) -> Self {
        Self {
            n_r: g.n_r,
            n_theta: g.n_theta,
            kappa: g.kappa,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssSummary {
    pub upper: f64,
    pub lower: Option<f64>,
    #[serde(rename = "limsupM")]
    pub limsup_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenSummary {
    pub s: f64,
    pub verdict: Verdict,
    pub partial_sums: Vec<(u64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub domain: String,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub grid: GridSummary,
    pub sigma: Vec<f64>,
    pub norm_bracket: Option<NormSummary>,
    pub essnorm: Option<EssSummary>,
    pub schatten: Option<SchattenSummary>,
}
