//! Berezin transform T~(z) = <T k_z, k_z> = K(z,z)^{-1} int |K(w,z)|^2 psi(w) dV(w), and the
//! weak convergence of normalized kernels.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::symbol::{RadialSymbol, SymbolSpec};
use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};
use crate::estimates::{
    kernel_norm_focused, kernel_power_integral, EstimateReport, Sweep, SweepPoint,
};
use crate::quadrature::{FocusedRule, GridSpec, QuadGrid};

/// T~(z) for a radial symbol; by rotation invariance only |z| matters.
pub fn berezin(
    domain: &DomainModel,
    spec: &GridSpec,
    sym: &RadialSymbol,
    z: &Point,
) -> Result<f64> {
    let kzz = domain.kernel_diag(z)?;
    let rule = FocusedRule::with_breaks(domain, spec, z.norm(), &sym.breaks())?;
    Ok(kernel_power_integral(domain, &rule, 2.0, |d| sym.at_distance(domain, d)) / kzz)
}

/// T~(z) by node quadrature, for any symbol on `grid`.
pub fn berezin_on_grid(
    domain: &DomainModel,
    grid: &QuadGrid,
    sym: &SymbolSpec,
    z: &Point,
) -> Result<f64> {
    let kzz = domain.kernel_diag(z)?;
    let psi = sym.on_grid(domain, grid)?;
    let s: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(&psi)
        .map(|((w, wt), p)| domain.kernel_unchecked(w, z).norm_sqr() * p * wt)
        .sum();
    Ok(s / kzz)
}

/// T~(z) against K(z,z)^{-alpha} d(z)^beta along the sweep; two-sided for 2 alpha + beta < 2.
pub fn berezin_bracket(
    domain: &DomainModel,
    spec: &GridSpec,
    sym: &RadialSymbol,
    sweep: &Sweep,
) -> Result<EstimateReport> {
    if !(2.0 * sym.alpha + sym.beta < 2.0) {
        return Err(Error::admissibility(format!(
            "need 2 alpha + beta < 2, got {}",
            2.0 * sym.alpha + sym.beta
        )));
    }
    sweep.validate()?;
    let points = sweep
        .distances
        .par_iter()
        .map(|&d| {
            let t = berezin(domain, spec, sym, &Point::on_axis(domain.dim(), 1.0 - d))?;
            let env = domain.diag_from_distance(d).powf(-sym.alpha) * d.powf(sym.beta) * sym.scale;
            Ok(SweepPoint {
                d_z: d,
                lhs: t,
                rhs_envelope: env,
                ratio: t / env,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::new(
        "berezin",
        domain,
        &[("alpha", sym.alpha), ("beta", sym.beta)],
        *spec,
        points,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub d_z: f64,
    pub value: f64,
}

/// |<k_{a}(., z), g>_a| along the sweep, with k_a(., z) = K(., z)/||K(., z)||_{p,a} and g a
/// function of w_1. These tend to 0 when a < 2(p-1).
pub fn weak_null_pairings<G>(
    domain: &DomainModel,
    spec: &GridSpec,
    p: f64,
    a: f64,
    sweep: &Sweep,
    g: G,
) -> Result<Vec<Pairing>>
where
    G: Fn(Complex64) -> Complex64 + Sync,
{
    if !(a > -1.0 && a < 2.0 * (p - 1.0)) {
        return Err(Error::admissibility(format!(
            "need -1 < a < 2(p-1) = {}, got a = {a}",
            2.0 * (p - 1.0)
        )));
    }
    sweep.validate()?;
    let mut ds = sweep.distances.clone();
    ds.sort_by(|x, y| y.total_cmp(x));
    ds.par_iter()
        .map(|&d| {
            let x = 1.0 - d;
            let rule = FocusedRule::new(domain, spec, x)?;
            // K(w, z) = K as a function of <w, z> = w_1 x
            let pair = rule.integrate_complex(
                |v| domain.kernel_of_inner(v * x) * g(v).conj(),
                |t| t.powf(a),
            );
            let norm = kernel_norm_focused(domain, &rule, p, a)?;
            Ok(Pairing {
                d_z: d,
                value: pair.norm() / norm,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use approx::assert_relative_eq;

    #[test]
    fn projection_and_distance_values() {
        let disc = DomainModel::disc();
        let spec = GridSpec::default();
        for x in [0.0, 0.5, 0.99] {
            let t = berezin(&disc, &spec, &RadialSymbol::one(), &Point::on_axis(1, x)).unwrap();
            assert_relative_eq!(t, 1.0, epsilon = 1e-10);
        }
        let d1 = RadialSymbol::new(0.0, 1.0).unwrap();
        assert_relative_eq!(
            berezin(&disc, &spec, &d1, &Point::origin(1)).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-10
        );
        let grid = build_grid(&disc, &GridSpec::new(80, 64)).unwrap();
        let g = berezin_on_grid(&disc, &grid, &SymbolSpec::Radial(d1), &Point::origin(1)).unwrap();
        assert_relative_eq!(g, 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn two_sided_bracket() {
        let disc = DomainModel::disc();
        let sym = RadialSymbol::new(0.5, 0.5).unwrap();
        let r = berezin_bracket(&disc, &GridSpec::default(), &sym, &Sweep::default()).unwrap();
        assert!(r.ratios_finite_positive());
        assert!(r.min_ratio > 0.1 && r.max_ratio < 10.0, "{r:?}");
        let wide = RadialSymbol::new(1.0, 0.5).unwrap();
        assert!(berezin_bracket(&disc, &GridSpec::default(), &wide, &Sweep::default()).is_err());
    }

    #[test]
    fn kernels_tend_weakly_to_zero() {
        let disc = DomainModel::disc();
        let pairs = weak_null_pairings(
            &disc,
            &GridSpec::default(),
            2.0,
            0.5,
            &Sweep::default(),
            |v| Complex64::new(1.0, 0.0) + v,
        )
        .unwrap();
        assert!(pairs.windows(2).all(|w| w[1].value < w[0].value));
        assert!(pairs.last().unwrap().value < 0.1 * pairs[0].value);
        assert!(weak_null_pairings(
            &disc,
            &GridSpec::default(),
            1.5,
            1.0,
            &Sweep::default(),
            |_| Complex64::new(1.0, 0.0)
        )
        .is_err());
    }
}
