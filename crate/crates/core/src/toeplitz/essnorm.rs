//! Essential-norm brackets. Upper: norms of the tail symbols psi 1{d < eps_m}, extrapolated
//! in m. Lower: the kernel duality ratio at the points closest to the boundary, which
//! bounds ||T k_z|| for normalized kernels k_z tending weakly to zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::criteria::{limsup_m, require_bounded};
use super::norms::{NormContext, NormOptions};
use super::symbol::{ExhaustionSpec, RadialSymbol, SymbolSpec};
use crate::domain::DomainModel;
use crate::error::Result;
use crate::quadrature::{aitken, GridSpec};
use crate::schur::SpaceParams;

/// Number of thinnest sweep points whose kernel ratios are reported.
const LOWER_POINTS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssentialNormReport {
    pub exhaustion: String,
    pub levels: Vec<f64>,
    /// Upper norm bound of the tail symbol at each level.
    pub tail_uppers: Vec<f64>,
    pub upper_source: Vec<String>,
    pub upper_proxy: f64,
    /// (d(z), ratio) at the thinnest sweep points; empty when a >= q - 1.
    pub lower_points: Vec<(f64, f64)>,
    pub lower_proxy: Option<f64>,
    pub limsup_m: f64,
    /// Upper bound for the full operator, the scale for comparisons.
    pub norm_upper: f64,
}

impl EssentialNormReport {
    /// Tail bounds never increase with m.
    pub fn tails_nonincreasing(&self) -> bool {
        self.tail_uppers
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9))
    }
}

/// Limit of a nonincreasing nonnegative sequence by Aitken extrapolation of its last three
/// terms, kept inside [0, last].
pub fn extrapolate_decreasing(values: &[f64]) -> f64 {
    let Some(&last) = values.last() else {
        return 0.0;
    };
    if values.len() < 3 {
        return last;
    }
    let c: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let (lim, _) = aitken(&c);
    if lim.re.is_finite() {
        lim.re.clamp(0.0, last)
    } else {
        last
    }
}

pub fn essential_norm(
    domain: &DomainModel,
    spec: &GridSpec,
    sym: &SymbolSpec,
    sp: &SpaceParams,
    exhaustion: &ExhaustionSpec,
    opts: &NormOptions,
) -> Result<EssentialNormReport> {
    let ctx = NormContext::new(domain, spec, sp, opts)?;
    essential_norm_with(&ctx, domain, sym, exhaustion)
}

/// [`essential_norm`] reusing a prepared context.
pub fn essential_norm_with(
    ctx: &NormContext<'_>,
    domain: &DomainModel,
    sym: &SymbolSpec,
    exhaustion: &ExhaustionSpec,
) -> Result<EssentialNormReport> {
    let radial: RadialSymbol = *sym.as_radial()?;
    let sp = *ctx.space();
    require_bounded(domain, sym, &sp)?;
    let (norm_upper, _, _) = ctx.upper(&radial)?;
    let mut tail_uppers = Vec::with_capacity(exhaustion.len());
    let mut upper_source = Vec::with_capacity(exhaustion.len());
    for m in 0..exhaustion.len() {
        let tail = *sym.tail(exhaustion, m, None)?.as_radial()?;
        let (u, src, _) = ctx.upper(&tail)?;
        tail_uppers.push(u);
        upper_source.push(src.to_string());
    }
    let kernel = ctx.kernel_family(&radial)?;
    let mut thin: Vec<(f64, f64)> = kernel.into_iter().filter(|(d, _)| *d < 1.0).collect();
    thin.sort_by(|a, b| a.0.total_cmp(&b.0));
    thin.truncate(LOWER_POINTS);
    Ok(EssentialNormReport {
        exhaustion: exhaustion.to_string(),
        levels: exhaustion.levels().to_vec(),
        upper_proxy: extrapolate_decreasing(&tail_uppers),
        tail_uppers,
        upper_source,
        lower_proxy: thin.first().map(|r| r.1),
        lower_points: thin,
        limsup_m: limsup_m(domain, &radial, &sp).value(),
        norm_upper,
    })
}

/// |u1 - u2| relative to the larger of the two proxies and a tenth of the operator norm
/// bound, so that two proxies that both vanish agree.
pub fn exhaustion_disagreement(a: &EssentialNormReport, b: &EssentialNormReport) -> f64 {
    let scale = a
        .upper_proxy
        .max(b.upper_proxy)
        .max(0.1 * a.norm_upper.min(b.norm_upper));
    if scale == 0.0 {
        0.0
    } else {
        (a.upper_proxy - b.upper_proxy).abs() / scale
    }
}
