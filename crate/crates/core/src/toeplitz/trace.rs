//! Trace identity sum_k mult_k lambda_k(psi) = int psi(w) K(w,w) dV(w) for trace-class radial
//! symbols.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::galerkin::{galerkin_radial, radial_integral};
use super::symbol::RadialSymbol;
use crate::domain::DomainModel;
use crate::error::{Error, Result};

/// Partial traces are sampled at BASE_DEGREE * 2^i.
const BASE_DEGREE: usize = 256;
const LEVELS: usize = 6;
const FIT_TERMS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// Extrapolated sum of the eigenvalues.
    pub lhs: f64,
    pub rhs: f64,
    pub relative_difference: f64,
    /// (D, partial trace up to degree D).
    pub partial_traces: Vec<(usize, f64)>,
}

/// |S^{2n-1}| int_0^1 psi(r) K(r) r^{2n-1} dr.
pub fn trace_integral(domain: &DomainModel, sym: &RadialSymbol) -> f64 {
    let n = domain.dim() as i32;
    let sphere = 2.0 * std::f64::consts::PI.powi(n) / (1..n).map(f64::from).product::<f64>();
    sphere
        * radial_integral(&sym.breaks(), |s| {
            let r = 1.0 - s;
            sym.at_distance(domain, s) * domain.diag_from_distance(s) * r.powi(2 * n - 1)
        })
}

pub fn trace_identity_check(domain: &DomainModel, sym: &RadialSymbol) -> Result<TraceReport> {
    let n = domain.dim() as f64;
    let rho = sym.boundary_order(domain);
    if !(rho > n) || !matches!(sym.window, super::symbol::Window::Full) {
        return Err(Error::admissibility(format!(
            "trace class needs (n+1) alpha + beta > n = {n}, got {rho}"
        )));
    }
    let top = BASE_DEGREE << (LEVELS - 1);
    let oracle = galerkin_radial(domain, sym, top)?;
    let partial_traces: Vec<(usize, f64)> = (0..LEVELS)
        .map(|i| {
            let d = BASE_DEGREE << i;
            (d, oracle.partial_trace(d))
        })
        .collect();
    // S(D) = S + sum_j c_j D^{1 - tau - j}, tau = rho - n + 1
    let tau = rho - n + 1.0;
    let a = DMatrix::from_fn(LEVELS, FIT_TERMS + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            (partial_traces[i].0 as f64).powf(1.0 - tau - (j - 1) as f64)
        }
    });
    let b = DVector::from_iterator(LEVELS, partial_traces.iter().map(|p| p.1));
    let lhs = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Conditioning(format!("tail fit failed: {e}")))?[0];
    let rhs = trace_integral(domain, sym);
    Ok(TraceReport {
        lhs,
        rhs,
        relative_difference: (lhs - rhs).abs() / rhs.abs(),
        partial_traces,
    })
}
