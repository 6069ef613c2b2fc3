//! Brackets lower <= ||T_psi||_{L^p_a -> L^q_a} <= upper for radial symbols.
//!
//! Lower bounds are ratios |<T f, g>_a| / (||f||_{p,a} ||g||_{q',a}) for explicit f, g:
//! reproducing kernels K(., z) paired with K(., z) d^{-a}, monomials, and random
//! holomorphic polynomials in w_1 (on which T acts diagonally). Upper bounds are the
//! Schur-test bound with empirical test constants times sup M, and the exact L^2 norm.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criteria::require_bounded;
use super::galerkin::{exact_l2_norm, galerkin_radial};
use super::symbol::{RadialSymbol, SymbolSpec};
use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::estimates::{kernel_power_integral, Sweep};
use crate::quadrature::{FocusedRule, GridSpec, QuadGrid};
use crate::schur::{norm_bound_constant, schur_constants, SchurConstants, SpaceParams};

/// Relative slack allowed between the two ends of a bracket (quadrature noise).
pub const BRACKET_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Kernel test points; z = 0 is always added.
    pub sweep: Sweep,
    pub seed: u64,
    pub random_trials: usize,
    pub random_degree: usize,
    /// Largest monomial degree is 2^monomial_levels.
    pub monomial_levels: u32,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            sweep: Sweep::default(),
            seed: 0,
            random_trials: 8,
            random_degree: 12,
            monomial_levels: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_source: String,
    pub upper_source: String,
    /// Best value of every family, by name.
    pub families: BTreeMap<String, f64>,
    pub sup_m: f64,
}

impl NormBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower * (1.0 - BRACKET_SLACK) && v <= self.upper * (1.0 + BRACKET_SLACK)
    }

    pub fn is_ordered(&self) -> bool {
        self.lower <= self.upper * (1.0 + BRACKET_SLACK)
    }
}

/// Precomputed pieces shared by all brackets at fixed (domain, p, q, a).
pub struct NormContext<'a> {
    domain: &'a DomainModel,
    spec: GridSpec,
    sp: SpaceParams,
    opts: NormOptions,
    schur: SchurConstants,
}

impl<'a> NormContext<'a> {
    pub fn new(
        domain: &'a DomainModel,
        spec: &GridSpec,
        sp: &SpaceParams,
        opts: &NormOptions,
    ) -> Result<Self> {
        sp.check_bounded_regime()?;
        let schur = schur_constants(domain, spec, sp, &opts.sweep)?;
        Ok(Self {
            domain,
            spec: *spec,
            sp: *sp,
            opts: opts.clone(),
            schur,
        })
    }

    pub fn schur(&self) -> &SchurConstants {
        &self.schur
    }

    pub fn space(&self) -> &SpaceParams {
        &self.sp
    }

    /// min of the Schur bound and (for p = q = 2, a = 0) the exact L^2 norm.
    pub fn upper(&self, sym: &RadialSymbol) -> Result<(f64, &'static str, f64)> {
        let sup_m = require_bounded(self.domain, &SymbolSpec::Radial(*sym), &self.sp)?.sup_m;
        let schur = self.schur.factor * sup_m;
        if self.is_l2() {
            let exact = exact_l2_norm(self.domain, sym)?;
            if exact <= schur {
                return Ok((exact, "exact_l2", sup_m));
            }
        }
        Ok((schur, "schur", sup_m))
    }

    fn is_l2(&self) -> bool {
        self.sp.p == 2.0 && self.sp.q == 2.0 && self.sp.a == 0.0
    }

    /// Duality ratio at z = (x, 0, ..., 0); `None` when a >= q - 1.
    pub fn kernel_ratio(&self, sym: &RadialSymbol, x: f64) -> Result<Option<f64>> {
        let SpaceParams { p, q, a } = self.sp;
        if !(a < q - 1.0) {
            return Ok(None);
        }
        let qc = self.sp.q_conj();
        let rule = FocusedRule::with_breaks(self.domain, &self.spec, x, &sym.breaks())?;
        let num =
            kernel_power_integral(self.domain, &rule, 2.0, |d| sym.at_distance(self.domain, d));
        let f = kernel_power_integral(self.domain, &rule, p, |d| d.powf(a)).powf(1.0 / p);
        let g =
            kernel_power_integral(self.domain, &rule, qc, |d| d.powf(a - a * qc)).powf(1.0 / qc);
        Ok(Some(num / (f * g)))
    }

    /// Kernel ratios at z = 0 and along the sweep, as (d(z), ratio).
    pub fn kernel_family(&self, sym: &RadialSymbol) -> Result<Vec<(f64, f64)>> {
        let mut ds = vec![1.0];
        ds.extend(self.opts.sweep.distances.iter().copied());
        let rows: Vec<Option<(f64, f64)>> = ds
            .par_iter()
            .map(|&d| Ok(self.kernel_ratio(sym, 1.0 - d)?.map(|r| (d, r))))
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }

    /// f = psi w_1^j against g = w_1^j d^{-a}; `None` when a >= q - 1.
    pub fn monomial_family(&self, sym: &RadialSymbol) -> Result<Option<Vec<(usize, f64)>>> {
        let SpaceParams { p, q, a } = self.sp;
        if !(a < q - 1.0) {
            return Ok(None);
        }
        let qc = self.sp.q_conj();
        let rule = FocusedRule::with_breaks(self.domain, &self.spec, 0.0, &sym.breaks())?;
        let dom = self.domain;
        let degrees: Vec<usize> = std::iter::once(0)
            .chain((0..=self.opts.monomial_levels).map(|l| 1usize << l))
            .collect();
        let rows = degrees
            .par_iter()
            .map(|&j| {
                let j = j as f64;
                let num = rule.integrate(
                    |v| v.norm().powf(2.0 * j),
                    |d| sym.at_distance(dom, d).powi(2),
                );
                let f = rule
                    .integrate(
                        |v| v.norm().powf(j * p),
                        |d| sym.at_distance(dom, d).powf(p) * d.powf(a),
                    )
                    .powf(1.0 / p);
                let g = rule
                    .integrate(|v| v.norm().powf(j * qc), |d| d.powf(a - a * qc))
                    .powf(1.0 / qc);
                (j as usize, if f > 0.0 { num / (f * g) } else { 0.0 })
            })
            .collect();
        Ok(Some(rows))
    }

    /// ||T f||_{q,a} / ||f||_{p,a} for seeded random polynomials f(w) = sum c_j w_1^j.
    pub fn random_family(&self, sym: &RadialSymbol) -> Result<Vec<f64>> {
        let SpaceParams { p, q, a } = self.sp;
        let degree = self.opts.random_degree;
        let lambda = galerkin_radial(self.domain, sym, degree)?.eigenvalues;
        let rule = FocusedRule::new(self.domain, &self.spec, 0.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        let draws: Vec<Vec<Complex64>> = (0..self.opts.random_trials)
            .map(|_| {
                (0..=degree)
                    .map(|_| {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                    .collect()
            })
            .collect();
        let poly = |c: &[Complex64], v: Complex64| {
            c.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, cj| acc * v + cj)
        };
        Ok(draws
            .par_iter()
            .map(|c| {
                let tc: Vec<Complex64> = c.iter().zip(&lambda).map(|(x, l)| x * l).collect();
                let f = rule
                    .integrate(|v| poly(c, v).norm().powf(p), |d| d.powf(a))
                    .powf(1.0 / p);
                let tf = rule
                    .integrate(|v| poly(&tc, v).norm().powf(q), |d| d.powf(a))
                    .powf(1.0 / q);
                tf / f
            })
            .collect())
    }

    pub fn bracket(&self, sym: &RadialSymbol) -> Result<NormBracket> {
        let (upper, upper_source, sup_m) = self.upper(sym)?;
        let mut families = BTreeMap::new();
        let kernel = self.kernel_family(sym)?;
        if let Some(best) = kernel.iter().map(|r| r.1).reduce(f64::max) {
            families.insert("kernel".to_string(), best);
        }
        if let Some(rows) = self.monomial_family(sym)? {
            if let Some(best) = rows.iter().map(|r| r.1).reduce(f64::max) {
                families.insert("monomial".to_string(), best);
            }
        }
        if let Some(best) = self.random_family(sym)?.into_iter().reduce(f64::max) {
            families.insert("random_polynomial".to_string(), best);
        }
        let (lower_source, lower) = families.iter().map(|(k, v)| (k.clone(), *v)).fold(
            ("none".to_string(), 0.0),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
        Ok(NormBracket {
            lower,
            upper,
            lower_source,
            upper_source: upper_source.to_string(),
            families,
            sup_m,
        })
    }
}

/// Norm bracket of T_psi from L^p_a to L^q_a.
pub fn op_norm(
    domain: &DomainModel,
    spec: &GridSpec,
    sym: &SymbolSpec,
    sp: &SpaceParams,
    opts: &NormOptions,
) -> Result<NormBracket> {
    let r = sym.as_radial()?;
    require_bounded(domain, sym, sp)?;
    NormContext::new(domain, spec, sp, opts)?.bracket(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalBound {
    pub measured_lower: f64,
    pub bound_factor: f64,
    pub sup_m: f64,
    /// norm_bound_constant * sup M.
    pub bound_rhs: f64,
    pub ratio: f64,
}

/// measured lower bound / (norm_bound_constant(sp) sup M).
pub fn global_bound_check(
    domain: &DomainModel,
    spec: &GridSpec,
    sym: &SymbolSpec,
    sp: &SpaceParams,
    opts: &NormOptions,
) -> Result<GlobalBound> {
    let b = op_norm(domain, spec, sym, sp, opts)?;
    let factor = norm_bound_constant(sp)?;
    let rhs = factor * b.sup_m;
    Ok(GlobalBound {
        measured_lower: b.lower,
        bound_factor: factor,
        sup_m: b.sup_m,
        bound_rhs: rhs,
        ratio: b.lower / rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoydEstimate {
    pub value: f64,
    pub iterations: usize,
}

/// Power iteration for the L^p_a -> L^q_a norm of the discretized modulus operator
/// f -> sum_j |K(z_i, w_j)| psi_j weight_j f_j. A diagnostic: it approximates the norm of
/// |K| psi, which dominates ||T_psi|| but may be much larger (or infinite in the limit).
pub fn boyd_modulus_norm(
    domain: &DomainModel,
    grid: &QuadGrid,
    sym: &SymbolSpec,
    sp: &SpaceParams,
    max_iter: usize,
    tol: f64,
    cap: usize,
) -> Result<BoydEstimate> {
    let n = grid.len();
    if n > cap {
        return Err(Error::MemoryGuard { nodes: n, cap });
    }
    let psi = sym.on_grid(domain, grid)?;
    let nodes = grid.nodes();
    let cw: Vec<f64> = psi.iter().zip(grid.weights()).map(|(s, w)| s * w).collect();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            nodes
                .iter()
                .map(|z| domain.kernel_unchecked(z, &nodes[j]).norm() * cw[j])
                .collect()
        })
        .collect();
    let b = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    let w: Vec<f64> = grid
        .weights()
        .iter()
        .zip(grid.distances())
        .map(|(w, d)| w * d.powf(sp.a))
        .collect();
    let norm = |v: &[f64], r: f64| {
        v.iter()
            .zip(&w)
            .map(|(x, wi)| wi * x.abs().powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    };
    let mut x = vec![1.0; n];
    let s = norm(&x, sp.p);
    x.iter_mut().for_each(|v| *v /= s);
    let pc = sp.p_conj();
    let mut last = 0.0;
    for it in 1..=max_iter {
        let y = &b * nalgebra::DVector::from_column_slice(&x);
        let value = norm(y.as_slice(), sp.q);
        if it > 1 && (value - last).abs() <= tol * value {
            return Ok(BoydEstimate {
                value,
                iterations: it,
            });
        }
        last = value;
        // dual step in the weighted pairing: (B^T W y^{q-1})_j / W_j, then the p' map
        let u = nalgebra::DVector::from_iterator(
            n,
            y.iter().zip(&w).map(|(v, wi)| wi * v.powf(sp.q - 1.0)),
        );
        let z = b.transpose() * u;
        x = z
            .iter()
            .zip(&w)
            .map(|(v, wj)| (v / wj).powf(pc - 1.0))
            .collect();
        let s = norm(&x, sp.p);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Iteration {
                last,
                iterations: it,
            });
        }
        x.iter_mut().for_each(|v| *v /= s);
    }
    Err(Error::Iteration {
        last,
        iterations: max_iter,
    })
}

/// Cheap options for tests and coarse runs.
pub fn quick_options() -> NormOptions {
    NormOptions {
        sweep: Sweep::halving(0.5, 1e-3),
        random_trials: 4,
        random_degree: 8,
        monomial_levels: 10,
        ..NormOptions::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use approx::assert_relative_eq;

    fn disc() -> DomainModel {
        DomainModel::disc()
    }

    fn sp(p: f64, q: f64, a: f64) -> SpaceParams {
        SpaceParams::new(p, q, a).unwrap()
    }

    #[test]
    fn projection_bracket() {
        let spec = GridSpec::new(60, 64);
        let b = op_norm(
            &disc(),
            &spec,
            &SymbolSpec::radial(0.0, 0.0).unwrap(),
            &sp(2.0, 2.0, 0.0),
            &quick_options(),
        )
        .unwrap();
        assert!(b.contains(1.0), "{b:?}");
        assert!(b.width() < 0.05 && b.lower >= 0.99, "{b:?}");
        assert_eq!(b.upper_source, "exact_l2");
    }

    #[test]
    fn distance_symbol_lower_bound_hits_sigma0() {
        let spec = GridSpec::new(60, 64);
        let b = op_norm(
            &disc(),
            &spec,
            &SymbolSpec::radial(0.0, 1.0).unwrap(),
            &sp(2.0, 2.0, 0.0),
            &quick_options(),
        )
        .unwrap();
        assert!((b.lower - (1.0f64 / 6.0).sqrt()).abs() < 1e-3, "{b:?}");
        assert!(b.is_ordered());
    }

    #[test]
    fn homogeneity() {
        let spec = GridSpec::new(40, 32);
        let s = sp(2.0, 3.0, 0.2);
        let r = RadialSymbol::new(0.4, 0.3).unwrap();
        let b1 = op_norm(&disc(), &spec, &SymbolSpec::Radial(r), &s, &quick_options()).unwrap();
        let b3 = op_norm(
            &disc(),
            &spec,
            &SymbolSpec::Radial(r.scaled(3.0).unwrap()),
            &s,
            &quick_options(),
        )
        .unwrap();
        assert_relative_eq!(b3.lower, 3.0 * b1.lower, max_relative = 1e-10);
        assert_relative_eq!(b3.upper, 3.0 * b1.upper, max_relative = 1e-10);
        assert!(b1.is_ordered(), "{b1:?}");
    }

    #[test]
    fn global_ratio_for_projection() {
        let g = global_bound_check(
            &disc(),
            &GridSpec::new(40, 32),
            &SymbolSpec::radial(0.0, 0.0).unwrap(),
            &sp(2.0, 2.0, 0.0),
            &quick_options(),
        )
        .unwrap();
        assert_relative_eq!(g.ratio, 0.25, epsilon = 1e-6);
        assert!(matches!(
            global_bound_check(
                &disc(),
                &GridSpec::new(40, 32),
                &SymbolSpec::radial(0.0, 0.0).unwrap(),
                &sp(2.0, 4.0, 0.0),
                &quick_options()
            ),
            Err(Error::Admissibility { .. })
        ));
    }

    #[test]
    fn boyd_dominates_the_spectral_norm() {
        let grid = build_grid(&disc(), &GridSpec::new(12, 16)).unwrap();
        let sym = SymbolSpec::radial(0.0, 1.0).unwrap();
        let e =
            boyd_modulus_norm(&disc(), &grid, &sym, &sp(2.0, 2.0, 0.0), 500, 1e-10, 2000).unwrap();
        assert!(e.value >= (1.0f64 / 6.0).sqrt() * 0.99, "{e:?}");
        let small = build_grid(&disc(), &GridSpec::new(4, 4)).unwrap();
        assert!(matches!(
            boyd_modulus_norm(&disc(), &small, &sym, &sp(2.0, 2.0, 0.0), 1, 0.0, 100),
            Err(Error::Iteration { .. })
        ));
    }
}
