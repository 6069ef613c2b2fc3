//! Weighted Schur test: the gamma window, test weights, tau factors and the explicit
//! norm-bound factor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};
use crate::estimates::{check_ab_window, kernel_power_integral, EstimateReport, Sweep, SweepPoint};
use crate::quadrature::{FocusedRule, GridSpec};

/// Exponents p <= q and weight a of the spaces L^p_a -> L^q_a.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: f64,
    pub q: f64,
    pub a: f64,
}

impl SpaceParams {
    /// Requires 1 < p <= q < infinity and a > -1.
    pub fn new(p: f64, q: f64, a: f64) -> Result<Self> {
        if !(p > 1.0 && p <= q && q.is_finite()) {
            return Err(Error::admissibility(format!(
                "need 1 < p <= q < infinity, got p = {p}, q = {q}"
            )));
        }
        if !(a > -1.0) {
            return Err(Error::admissibility(format!("need a > -1, got a = {a}")));
        }
        Ok(Self { p, q, a })
    }

    /// Conjugate exponent p' with 1/p + 1/p' = 1.
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn q_conj(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    /// a < q/p', the range of the norm bound.
    pub fn check_bounded_regime(&self) -> Result<()> {
        let lim = self.q / self.p_conj();
        if self.a < lim {
            Ok(())
        } else {
            Err(Error::admissibility(format!(
                "need a < q/p' = {lim}, got a = {}",
                self.a
            )))
        }
    }

    /// a < min{2(p-1), q-1}, the range of the lower estimates.
    pub fn check_necessity_regime(&self) -> Result<()> {
        let lim = (2.0 * (self.p - 1.0)).min(self.q - 1.0);
        if self.a < lim {
            Ok(())
        } else {
            Err(Error::admissibility(format!(
                "need a < min{{2(p-1), q-1}} = {lim}, got a = {}",
                self.a
            )))
        }
    }

    /// a < min{2(p-1), q/p'}.
    pub fn check_full_regime(&self) -> Result<()> {
        let lim = (2.0 * (self.p - 1.0)).min(self.q / self.p_conj());
        if self.a < lim {
            Ok(())
        } else {
            Err(Error::admissibility(format!(
                "need a < min{{2(p-1), q/p'}} = {lim}, got a = {}",
                self.a
            )))
        }
    }

    /// Open interval max{0, a/q} < gamma < min{1/p', (a+1)/q}.
    pub fn gamma_window(&self) -> Result<(f64, f64)> {
        self.check_bounded_regime()?;
        let lo = (self.a / self.q).max(0.0);
        let hi = (1.0 / self.p_conj()).min((self.a + 1.0) / self.q);
        if lo < hi {
            Ok((lo, hi))
        } else {
            Err(Error::admissibility(format!(
                "empty gamma window ({lo}, {hi})"
            )))
        }
    }

    /// gamma_0 = (1 + a)/(p' + q).
    pub fn gamma0(&self) -> f64 {
        (1.0 + self.a) / (self.p_conj() + self.q)
    }
}

/// gamma with delta = 1/p' and the two tau factors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurParams {
    pub gamma: f64,
    pub delta: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl SchurParams {
    pub fn new(sp: &SpaceParams, gamma: f64) -> Result<Self> {
        let (lo, hi) = sp.gamma_window()?;
        if !(gamma > lo && gamma < hi) {
            return Err(Error::admissibility(format!(
                "gamma = {gamma} outside the window ({lo}, {hi})"
            )));
        }
        Ok(Self {
            gamma,
            delta: 1.0 / sp.p_conj(),
            tau1: tau1(sp, gamma),
            tau2: tau2(sp, gamma),
        })
    }

    pub fn at_gamma0(sp: &SpaceParams) -> Result<Self> {
        Self::new(sp, sp.gamma0())
    }
}

/// tau_1 = 1/(gamma p' (1 - gamma p')).
pub fn tau1(sp: &SpaceParams, gamma: f64) -> f64 {
    let t = gamma * sp.p_conj();
    1.0 / (t * (1.0 - t))
}

/// tau_2 = (2q/p - 1)/((2q/p - 2 - a + gamma q)(a - gamma q + 1)).
pub fn tau2(sp: &SpaceParams, gamma: f64) -> f64 {
    let r = 2.0 * sp.q / sp.p;
    (r - 1.0) / ((r - 2.0 - sp.a + gamma * sp.q) * (sp.a - gamma * sp.q + 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchurWeights {
    pub g: f64,
    pub h1: f64,
    pub h2: f64,
}

/// g = d^{-gamma}, h1 = d^{-gamma}, h2 = K(w,w)^{1/p - 1/q} d^{a/q - gamma}.
pub fn schur_weights(
    domain: &DomainModel,
    sp: &SpaceParams,
    gamma: f64,
    w: &Point,
) -> Result<SchurWeights> {
    SchurParams::new(sp, gamma)?;
    let k = domain.kernel_diag(w)?;
    let d = domain.boundary_distance(w);
    let g = d.powf(-gamma);
    Ok(SchurWeights {
        g,
        h1: g,
        h2: k.powf(1.0 / sp.p - 1.0 / sp.q) * d.powf(sp.a / sp.q - gamma),
    })
}

/// ((p' + q)/((1 + a)(1 - a p'/q)))^{1/p' + 1/q}.
pub fn norm_bound_constant(sp: &SpaceParams) -> Result<f64> {
    sp.check_bounded_regime()?;
    let pc = sp.p_conj();
    let base = (pc + sp.q) / ((1.0 + sp.a) * (1.0 - sp.a * pc / sp.q));
    Ok(base.powf(1.0 / pc + 1.0 / sp.q))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauProduct {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// tau1^{1/p'} tau2^{1/q} against 4 times the norm-bound factor, at gamma = gamma_0 only.
pub fn tau_product_bound(sp: &SpaceParams, gamma: f64) -> Result<TauProduct> {
    let g0 = sp.gamma0();
    if (gamma - g0).abs() > 1e-12 * g0.abs().max(1.0) {
        return Err(Error::Unsupported(format!(
            "the product bound is stated at gamma_0 = {g0}, got gamma = {gamma}"
        )));
    }
    let sch = SchurParams::new(sp, gamma)?;
    let lhs = sch.tau1.powf(1.0 / sp.p_conj()) * sch.tau2.powf(1.0 / sp.q);
    let rhs = 4.0 * norm_bound_constant(sp)?;
    Ok(TauProduct {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// One row of the parameter sweep report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub gamma0: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub bound_factor: f64,
    pub inequality_ok: bool,
    pub gamma0_in_window: bool,
}

pub fn sweep_entry(sp: &SpaceParams) -> Result<SweepEntry> {
    let g0 = sp.gamma0();
    let (lo, hi) = sp.gamma_window()?;
    let tp = tau_product_bound(sp, g0)?;
    Ok(SweepEntry {
        p: sp.p,
        q: sp.q,
        a: sp.a,
        gamma0: g0,
        tau1: tau1(sp, g0),
        tau2: tau2(sp, g0),
        bound_factor: norm_bound_constant(sp)?,
        inequality_ok: tp.holds,
        gamma0_in_window: g0 > lo && g0 < hi,
    })
}

/// p in {1.5, 2, 3}, q in {p, p+1, 2p}, a in {0, 0.3, m - 0.05} with
/// m = min{2(p-1), q/p'}; tuples outside the full regime are dropped.
pub fn default_sweep_points() -> Vec<SpaceParams> {
    let mut out = Vec::new();
    for p in [1.5f64, 2.0, 3.0] {
        for q in [p, p + 1.0, 2.0 * p] {
            let m = (2.0 * (p - 1.0)).min(q * (p - 1.0) / p);
            for a in [0.0, 0.3, m - 0.05] {
                if let Ok(sp) = SpaceParams::new(p, q, a) {
                    if sp.check_full_regime().is_ok() {
                        out.push(sp);
                    }
                }
            }
        }
    }
    out
}

/// A 5 x 5 x 3 grid over the bounded regime: p in {1.25, 1.5, 2, 3, 5},
/// q = p * {1, 1.25, 1.5, 2, 3}, a in {-0.5, 0, 0.9 q/p'}.
pub fn tau_sweep_points() -> Vec<SpaceParams> {
    let mut out = Vec::new();
    for p in [1.25f64, 1.5, 2.0, 3.0, 5.0] {
        for m in [1.0, 1.25, 1.5, 2.0, 3.0] {
            let q = p * m;
            let lim = q * (p - 1.0) / p;
            for a in [-0.5, 0.0, 0.9 * lim] {
                if let Ok(sp) = SpaceParams::new(p, q, a) {
                    out.push(sp);
                }
            }
        }
    }
    out
}

/// Check of x^x <= 4 for x = 1/p' + 1/q.
pub fn exponent_power_ok(sp: &SpaceParams) -> bool {
    let x = 1.0 / sp.p_conj() + 1.0 / sp.q;
    (0.0..=2.0).contains(&x) && x.powf(x) <= 4.0
}

/// Evaluate both test integrals of the Schur test along the sweep:
/// int |K(z,w)| d(w)^{-gamma p'} dV(w) / (tau1 d(z)^{-gamma p'}) and
/// int |K(z,w)|^{q/p} d(z)^{a - gamma q} dV(z) / (tau2 K(w,w)^{q/p-1} d(w)^{a - gamma q}).
pub fn verify_test_inequalities(
    domain: &DomainModel,
    spec: &GridSpec,
    sp: &SpaceParams,
    gamma: f64,
    sweep: &Sweep,
) -> Result<(EstimateReport, EstimateReport)> {
    let sch = SchurParams::new(sp, gamma)?;
    let pc = sp.p_conj();
    let b1 = -gamma * pc;
    let a2 = sp.q / sp.p;
    let b2 = sp.a - gamma * sp.q;
    check_ab_window(1.0, b1)?;
    check_ab_window(a2, b2)?;
    sweep.validate()?;
    let rows: Vec<(SweepPoint, SweepPoint)> = sweep
        .distances
        .par_iter()
        .map(|&d| {
            let rule = FocusedRule::new(domain, spec, 1.0 - d)?;
            let l1 = kernel_power_integral(domain, &rule, 1.0, |t| t.powf(b1));
            let e1 = sch.tau1 * d.powf(b1);
            let l2 = kernel_power_integral(domain, &rule, a2, |t| t.powf(b2));
            let e2 = sch.tau2 * domain.diag_from_distance(d).powf(a2 - 1.0) * d.powf(b2);
            Ok((
                SweepPoint {
                    d_z: d,
                    lhs: l1,
                    rhs_envelope: e1,
                    ratio: l1 / e1,
                },
                SweepPoint {
                    d_z: d,
                    lhs: l2,
                    rhs_envelope: e2,
                    ratio: l2 / e2,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (first, second): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let params = [("p", sp.p), ("q", sp.q), ("a", sp.a), ("gamma", gamma)];
    Ok((
        EstimateReport::new("schur_test_1", domain, &params, *spec, first),
        EstimateReport::new("schur_test_2", domain, &params, *spec, second),
    ))
}

/// Empirical Schur constants: sup of the two test ratios without the tau factors, and the
/// resulting operator bound factor (sup R1)^{1/p'} (sup R2)^{1/q}, which multiplies ||M||_inf.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurConstants {
    pub r1_sup: f64,
    pub r2_sup: f64,
    pub factor: f64,
}

pub fn schur_constants(
    domain: &DomainModel,
    spec: &GridSpec,
    sp: &SpaceParams,
    sweep: &Sweep,
) -> Result<SchurConstants> {
    let g0 = sp.gamma0();
    let (t1, t2) = verify_test_inequalities(domain, spec, sp, g0, sweep)?;
    let sch = SchurParams::new(sp, g0)?;
    let r1_sup = t1.max_ratio * sch.tau1;
    let r2_sup = t2.max_ratio * sch.tau2;
    Ok(SchurConstants {
        r1_sup,
        r2_sup,
        factor: r1_sup.powf(1.0 / sp.p_conj()) * r2_sup.powf(1.0 / sp.q),
    })
}
