//! Radial symbols are diagonal on holomorphic monomials: T_psi w^m = lambda_|m| w^m with
//! lambda_k = (2k+2n) int_0^1 psi(r) r^{2k+2n-1} dr and multiplicity C(k+n-1, n-1).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spectrum::{SingularSpectrum, SpectrumSource};
use super::symbol::RadialSymbol;
use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::quadrature::{dyadic_toward_zero, UnitRule};

/// Panels of the radial rule reach down to this boundary distance.
const RADIAL_FLOOR: f64 = 1.0 / 1_125_899_906_842_624.0; // 2^-50
const PANEL_NODES: usize = 20;

/// Nodes (s, weight) in s = 1 - r on (0, 1] with panel edges at `breaks`.
pub(crate) fn radial_rule(breaks: &[f64]) -> Vec<(f64, f64)> {
    let rule = UnitRule::new(PANEL_NODES);
    dyadic_toward_zero(1.0, RADIAL_FLOOR, breaks, &rule, &rule)
}

/// int_0^1 f(s) ds on the radial rule.
pub(crate) fn radial_integral<F: Fn(f64) -> f64>(breaks: &[f64], f: F) -> f64 {
    radial_rule(breaks).iter().map(|(s, w)| w * f(*s)).sum()
}

/// Eigenvalues of T_psi restricted to the Bergman space, by degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialOracle {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<u64>,
}

impl RadialOracle {
    pub fn degree(&self) -> usize {
        self.eigenvalues.len().saturating_sub(1)
    }

    /// Spectrum of T_psi as an operator on the Bergman space (positive, so eigenvalues
    /// are singular values).
    pub fn spectrum(&self) -> Result<SingularSpectrum> {
        SingularSpectrum::with_multiplicities(
            self.eigenvalues.clone(),
            self.multiplicities.clone(),
            SpectrumSource::Galerkin {
                degree: self.degree(),
            },
        )
    }

    /// sum over degrees <= D of multiplicity * lambda.
    pub fn partial_trace(&self, degree: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .take(degree + 1)
            .map(|(l, m)| l * *m as f64)
            .sum()
    }
}

pub fn multiplicity(dim: usize, k: usize) -> u64 {
    // C(k+n-1, n-1)
    let mut c: u64 = 1;
    for j in 1..dim as u64 {
        c = c * (k as u64 + j) / j;
    }
    c
}

/// lambda_0, ..., lambda_D for a radial symbol.
pub fn galerkin_radial(
    domain: &DomainModel,
    sym: &RadialSymbol,
    degree: usize,
) -> Result<RadialOracle> {
    let n = domain.dim();
    let table: Vec<(f64, f64)> = radial_rule(&sym.breaks())
        .into_iter()
        .map(|(s, w)| (w * sym.at_distance(domain, s), (-s).ln_1p()))
        .filter(|(w, _)| *w != 0.0)
        .collect();
    let eigenvalues: Vec<f64> = (0..=degree)
        .into_par_iter()
        .map(|k| {
            let m = (2 * k + 2 * n) as f64;
            m * table
                .iter()
                .map(|(w, l)| w * ((m - 1.0) * l).exp())
                .sum::<f64>()
        })
        .collect();
    if let Some(v) = eigenvalues.iter().find(|v| !v.is_finite()) {
        return Err(Error::Conditioning(format!(
            "radial eigenvalue {v} is not finite"
        )));
    }
    Ok(RadialOracle {
        dim: n,
        multiplicities: (0..=degree).map(|k| multiplicity(n, k)).collect(),
        eigenvalues,
    })
}

/// Singular values of T_psi = P M_psi as an operator on L^2: sigma_k = sqrt(lambda_k(psi^2)),
/// since T T* = T_{psi^2} on the Bergman space.
pub fn l2_singular_values(
    domain: &DomainModel,
    sym: &RadialSymbol,
    degree: usize,
) -> Result<SingularSpectrum> {
    let o = galerkin_radial(domain, &sym.squared(), degree)?;
    SingularSpectrum::with_multiplicities(
        o.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect(),
        o.multiplicities,
        SpectrumSource::Galerkin { degree },
    )
}

/// Degree large enough to resolve symbols cut at `cut`.
pub fn degree_for_cut(cut: Option<f64>) -> usize {
    match cut {
        Some(c) if c > 0.0 => ((64.0 / c).ceil() as usize).clamp(512, 1 << 16),
        _ => 512,
    }
}

/// ||T_psi||_{L^2 -> L^2} = sup_k sqrt(lambda_k(psi^2)), including the boundary limit of psi.
pub fn exact_l2_norm(domain: &DomainModel, sym: &RadialSymbol) -> Result<f64> {
    let degree = degree_for_cut(sym.breaks().first().copied());
    let sq = galerkin_radial(domain, &sym.squared(), degree)?;
    let top = sq.eigenvalues.iter().copied().fold(0.0, f64::max);
    Ok(top.max(sym.boundary_limit().powi(2)).sqrt())
}
