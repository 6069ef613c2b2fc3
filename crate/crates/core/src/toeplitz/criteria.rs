//! The quantity M(w) = psi(w) K(w,w)^{1/p - 1/q} d(w)^{a(1/q - 1/p)} and the boundedness and
//! compactness decisions it drives.

use serde::{Deserialize, Serialize};

use super::symbol::{RadialSymbol, SymbolSpec, Window};
use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};
use crate::schur::SpaceParams;

/// Exponents closer to zero than this are reported as critical and never decided.
pub const CRITICAL_BAND: f64 = 0.02;

/// Smallest boundary distance of the M profile.
const PROFILE_FLOOR: f64 = 1e-8;
const PROFILE_POINTS: usize = 161;

pub fn m_at_distance(domain: &DomainModel, sym: &RadialSymbol, sp: &SpaceParams, d: f64) -> f64 {
    let psi = sym.at_distance(domain, d);
    if psi == 0.0 {
        return 0.0;
    }
    let e = 1.0 / sp.p - 1.0 / sp.q;
    psi * domain.diag_from_distance(d).powf(e) * d.powf(-sp.a * e)
}

/// M at an interior point.
pub fn m_value(
    domain: &DomainModel,
    spec: &SymbolSpec,
    sp: &SpaceParams,
    w: &Point,
) -> Result<f64> {
    domain.kernel_diag(w)?;
    Ok(m_at_distance(
        domain,
        spec.as_radial()?,
        sp,
        domain.boundary_distance(w),
    ))
}

/// e = (n+1)(alpha - 1/p + 1/q) + beta + a(1/q - 1/p), with M ~ d^e at the boundary.
pub fn boundary_exponent(domain: &DomainModel, alpha: f64, beta: f64, sp: &SpaceParams) -> f64 {
    let n1 = (domain.dim() + 1) as f64;
    let e = 1.0 / sp.q - 1.0 / sp.p;
    n1 * (alpha + e) + beta + sp.a * e
}

/// M along a geometric sweep of boundary distances over the support of the symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MProfile {
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    /// Log-log slope of M over the two thinnest points.
    pub fitted_exponent: f64,
}

impl MProfile {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// M at the thinnest shell.
    pub fn thinnest(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }
}

pub fn m_profile(domain: &DomainModel, sym: &RadialSymbol, sp: &SpaceParams) -> MProfile {
    let (top, bottom) = match sym.window {
        Window::Full => (1.0, PROFILE_FLOOR),
        Window::Tail { cut } => (
            (cut * (1.0 - 1e-12)).min(1.0),
            PROFILE_FLOOR.min(cut * 1e-3),
        ),
        Window::Core { cut } => (1.0, cut.clamp(PROFILE_FLOOR, 1.0)),
    };
    let ratio = (bottom / top).powf(1.0 / (PROFILE_POINTS - 1) as f64);
    let distances: Vec<f64> = (0..PROFILE_POINTS)
        .map(|i| top * ratio.powi(i as i32))
        .collect();
    let values: Vec<f64> = distances
        .iter()
        .map(|&d| m_at_distance(domain, sym, sp, d))
        .collect();
    let k = values.len();
    let fitted_exponent = if values[k - 1] > 0.0 && values[k - 2] > 0.0 {
        (values[k - 2] / values[k - 1]).ln() / (distances[k - 2] / distances[k - 1]).ln()
    } else {
        f64::INFINITY
    };
    MProfile {
        distances,
        values,
        fitted_exponent,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryLimit {
    Zero,
    Finite(f64),
    Infinite,
}

impl BoundaryLimit {
    pub fn value(&self) -> f64 {
        match *self {
            BoundaryLimit::Zero => 0.0,
            BoundaryLimit::Finite(v) => v,
            BoundaryLimit::Infinite => f64::INFINITY,
        }
    }
}

/// limsup of M at the boundary: 0, finite, or infinite by the sign of the exponent; the
/// finite value is M evaluated deep inside the last shell.
pub fn limsup_m(domain: &DomainModel, sym: &RadialSymbol, sp: &SpaceParams) -> BoundaryLimit {
    if matches!(sym.window, Window::Core { cut } if cut > 0.0) || sym.scale == 0.0 {
        return BoundaryLimit::Zero;
    }
    let e = boundary_exponent(domain, sym.alpha, sym.beta, sp);
    if e > 1e-12 {
        BoundaryLimit::Zero
    } else if e < -1e-12 {
        BoundaryLimit::Infinite
    } else {
        BoundaryLimit::Finite(m_at_distance(domain, sym, sp, 1e-12))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub bounded: bool,
    /// |e| < CRITICAL_BAND.
    pub critical: bool,
    pub boundary_exponent: f64,
    /// The same decision read off the sampled profile.
    pub numeric_bounded: bool,
    pub fitted_exponent: f64,
    /// sup of M over the support; infinite when unbounded.
    pub sup_m: f64,
    pub limsup_m: f64,
}

impl BoundednessReport {
    /// The exponent rule and the sampled profile agree.
    pub fn consistent(&self) -> bool {
        self.bounded == self.numeric_bounded
    }
}

pub fn boundedness_criterion(
    domain: &DomainModel,
    spec: &SymbolSpec,
    sp: &SpaceParams,
) -> Result<BoundednessReport> {
    sp.check_bounded_regime()?;
    let sym = spec.as_radial()?;
    let e = boundary_exponent(domain, sym.alpha, sym.beta, sp);
    let limit = limsup_m(domain, sym, sp);
    let core_only = matches!(sym.window, Window::Core { cut } if cut > 0.0);
    let bounded = core_only || e >= 0.0;
    let profile = m_profile(domain, sym, sp);
    let numeric_bounded = core_only || profile.fitted_exponent >= -CRITICAL_BAND / 2.0;
    let sup_m = if bounded {
        profile.max().max(limit.value())
    } else {
        f64::INFINITY
    };
    Ok(BoundednessReport {
        bounded,
        critical: !core_only && e.abs() < CRITICAL_BAND,
        boundary_exponent: e,
        numeric_bounded,
        fitted_exponent: profile.fitted_exponent,
        sup_m,
        limsup_m: limit.value(),
    })
}

/// Fails with an admissibility error naming the exponent when the operator is unbounded.
pub fn require_bounded(
    domain: &DomainModel,
    spec: &SymbolSpec,
    sp: &SpaceParams,
) -> Result<BoundednessReport> {
    let r = boundedness_criterion(domain, spec, sp)?;
    if !r.bounded {
        return Err(Error::admissibility(format!(
            "M is unbounded: boundary exponent e = {} < 0",
            r.boundary_exponent
        )));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub compact: bool,
    pub critical: bool,
    pub boundary_exponent: f64,
    pub limsup_m: f64,
    /// M at the thinnest profile shell.
    pub thinnest_m: f64,
}

pub fn compactness_criterion(
    domain: &DomainModel,
    spec: &SymbolSpec,
    sp: &SpaceParams,
) -> Result<CompactnessReport> {
    let b = require_bounded(domain, spec, sp)?;
    let sym = spec.as_radial()?;
    let limit = limsup_m(domain, sym, sp);
    Ok(CompactnessReport {
        compact: limit == BoundaryLimit::Zero,
        critical: b.critical,
        boundary_exponent: b.boundary_exponent,
        limsup_m: limit.value(),
        thinnest_m: m_profile(domain, sym, sp).thinnest(),
    })
}
