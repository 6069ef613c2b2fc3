//! Schatten-class membership: the integrability criterion and a verdict from the growth of
//! partial sums of sigma_k^s.

use serde::{Deserialize, Serialize};

use super::galerkin::l2_singular_values;
use super::spectrum::SingularSpectrum;
use super::symbol::RadialSymbol;
use crate::domain::DomainModel;
use crate::error::{Error, Result};

/// |s rho / n - 1| below this is the critical surface and is not decided.
pub const SCHATTEN_CRITICAL: f64 = 0.1;
/// |log2 of the increment ratio| below this gives an inconclusive verdict.
pub const NOISE_BAND: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenCriterion {
    pub s: f64,
    /// Exponent of d in K(w,w)^{1 - s alpha} d(w)^{s beta}; integrable iff > -1.
    pub exponent: f64,
    pub integrable: bool,
    /// Membership decision. For s < 1 only the sufficient direction is known, so a failed
    /// condition gives `None`.
    pub in_class: Option<bool>,
    pub critical: bool,
}

pub fn schatten_criterion(
    domain: &DomainModel,
    alpha: f64,
    beta: f64,
    s: f64,
) -> Result<SchattenCriterion> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::admissibility(format!("need s > 0, got s = {s}")));
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::admissibility(format!(
            "need alpha, beta >= 0, got ({alpha}, {beta})"
        )));
    }
    let n = domain.dim() as f64;
    let exponent = -(n + 1.0) * (1.0 - s * alpha) + s * beta;
    let integrable = exponent > -1.0;
    let rho = (n + 1.0) * alpha + beta;
    let in_class = if s >= 1.0 {
        Some(integrable)
    } else if integrable && 2.0 * alpha + beta < 2.0 {
        Some(true)
    } else {
        None
    };
    Ok(SchattenCriterion {
        s,
        exponent,
        integrable,
        in_class,
        critical: (s * rho / n - 1.0).abs() < SCHATTEN_CRITICAL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenEstimate {
    pub s: f64,
    /// (count, partial sum) for each input spectrum at its own length and at the windows.
    pub partial_sums: Vec<(u64, f64)>,
    /// (sum over (2N, 4N]) / (sum over (N, 2N]) on the longest spectrum.
    pub increment_ratio: f64,
    /// Largest relative difference of partial sums over the shared range of the inputs.
    pub resolution_spread: f64,
    pub verdict: Verdict,
}

impl SchattenEstimate {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().map(|p| p.1).unwrap_or(0.0)
    }
}

pub fn schatten_norm_estimate(spectra: &[SingularSpectrum], s: f64) -> Result<SchattenEstimate> {
    if !(s > 0.0) {
        return Err(Error::admissibility(format!("need s > 0, got s = {s}")));
    }
    let Some(longest) = spectra.iter().max_by_key(|x| x.count()) else {
        return Err(Error::Config("no spectrum given".into()));
    };
    let total = longest.count();
    let n = (total / 4).max(1);
    let (s1, s2, s4) = (
        longest.partial_sum(s, n),
        longest.partial_sum(s, 2 * n),
        longest.partial_sum(s, 4 * n),
    );
    let (low, high) = (s2 - s1, s4 - s2);
    let increment_ratio = if low > 0.0 {
        high / low
    } else if high > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let shared = spectra.iter().map(|x| x.count()).min().unwrap_or(0);
    let sums: Vec<f64> = spectra.iter().map(|x| x.partial_sum(s, shared)).collect();
    let hi = sums.iter().copied().fold(0.0, f64::max);
    let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let resolution_spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let verdict = if spectra.len() < 2 {
        Verdict::Inconclusive
    } else if high == 0.0 {
        Verdict::Converging
    } else if increment_ratio.log2().abs() < NOISE_BAND {
        Verdict::Inconclusive
    } else if increment_ratio < 1.0 {
        Verdict::Converging
    } else {
        Verdict::Diverging
    };
    let mut partial_sums: Vec<(u64, f64)> = spectra
        .iter()
        .map(|x| (x.count(), x.partial_sum(s, x.count())))
        .collect();
    partial_sums.extend([(n, s1), (2 * n, s2), (4 * n, s4)]);
    partial_sums.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    partial_sums.dedup();
    Ok(SchattenEstimate {
        s,
        partial_sums,
        increment_ratio,
        resolution_spread,
        verdict,
    })
}

/// Verdict from exact radial spectra at degrees D and 4D.
pub fn schatten_from_oracle(
    domain: &DomainModel,
    sym: &RadialSymbol,
    s: f64,
    degree: usize,
) -> Result<SchattenEstimate> {
    let coarse = l2_singular_values(domain, sym, degree)?;
    let fine = l2_singular_values(domain, sym, 4 * degree + 3)?;
    schatten_norm_estimate(&[coarse, fine], s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub sigma: Vec<f64>,
    /// Local exponents log(sigma_k / sigma_{2k}) / log 2 at k = 4, 8, 16, ...
    pub local_rates: Vec<f64>,
    pub super_polynomial: bool,
}

/// Decay of the distinct singular values (one per radial level for oracle spectra), read off
/// the local power-law exponents: super-polynomial decay shows as rates that keep growing
/// past `rate_floor`.
pub fn spectral_decay(spec: &SingularSpectrum, rate_floor: f64) -> DecayReport {
    let sigma: Vec<f64> = spec.values().iter().take(1 << 12).copied().collect();
    let mut local_rates = Vec::new();
    let mut k = 4;
    while 2 * k < sigma.len() && sigma[2 * k] > 1e-200 {
        local_rates.push((sigma[k] / sigma[2 * k]).ln() / std::f64::consts::LN_2);
        k *= 2;
    }
    let growing = local_rates.windows(2).all(|w| w[1] > w[0]);
    let super_polynomial =
        local_rates.len() >= 2 && growing && local_rates.last().is_some_and(|r| *r > rate_floor);
    DecayReport {
        sigma,
        local_rates,
        super_polynomial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::spectrum::SpectrumSource;
    use crate::toeplitz::symbol::Window;
    use approx::assert_relative_eq;

    fn disc() -> DomainModel {
        DomainModel::disc()
    }

    #[test]
    fn criterion_examples() {
        let c = schatten_criterion(&disc(), 0.0, 1.0, 1.0).unwrap();
        assert_eq!((c.exponent, c.in_class), (-1.0, Some(false)));
        assert_eq!(
            schatten_criterion(&disc(), 0.0, 1.0, 2.0).unwrap().in_class,
            Some(true)
        );
        assert_eq!(
            schatten_criterion(&disc(), 0.5, 0.0, 1.5).unwrap().in_class,
            Some(true)
        );
        assert!(schatten_criterion(&disc(), 0.0, 1.0, 0.0).is_err());
        assert_eq!(
            schatten_criterion(&disc(), 0.0, 1.0, 0.5).unwrap().in_class,
            None
        );
        assert_eq!(
            schatten_criterion(&disc(), 0.0, 1.5, 0.8).unwrap().in_class,
            Some(true)
        );
    }

    #[test]
    fn hilbert_schmidt_sum() {
        let e = schatten_from_oracle(&disc(), &RadialSymbol::new(0.0, 1.0).unwrap(), 2.0, 1024)
            .unwrap();
        assert_eq!(e.verdict, Verdict::Converging);
        assert!(
            (e.total() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-3,
            "{}",
            e.total()
        );
        // sigma_k ~ 1/k: logarithmic divergence on the critical surface
        let e = schatten_from_oracle(&disc(), &RadialSymbol::new(0.0, 1.0).unwrap(), 1.0, 1024)
            .unwrap();
        assert_eq!(e.verdict, Verdict::Inconclusive);
        let e = schatten_from_oracle(&disc(), &RadialSymbol::new(0.0, 1.0).unwrap(), 0.5, 1024)
            .unwrap();
        assert_eq!(e.verdict, Verdict::Diverging);
    }

    #[test]
    fn zero_and_single_inputs() {
        let zero =
            SingularSpectrum::new(vec![0.0; 64], SpectrumSource::Galerkin { degree: 63 }).unwrap();
        let e = schatten_norm_estimate(&[zero.clone(), zero.clone()], 1.0).unwrap();
        assert_eq!(e.verdict, Verdict::Converging);
        assert_eq!(e.total(), 0.0);
        assert_eq!(
            schatten_norm_estimate(&[zero], 1.0).unwrap().verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn compactly_supported_symbols_decay_fast() {
        let core = RadialSymbol::one().windowed(Window::Core { cut: 0.2 });
        let s = l2_singular_values(&disc(), &core, 200).unwrap();
        let r = spectral_decay(&s, 10.0);
        assert!(r.super_polynomial, "{:?}", r.local_rates);
        let full = l2_singular_values(&disc(), &RadialSymbol::new(0.0, 1.0).unwrap(), 200).unwrap();
        assert!(!spectral_decay(&full, 10.0).super_polynomial);
        assert_relative_eq!(full.largest(), (1.0f64 / 6.0).sqrt(), epsilon = 1e-12);
    }
}
