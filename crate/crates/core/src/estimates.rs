//! Kernel integral estimates: I_{a,b}, I_{a,b,s}, kernel norms and the Berezin-type bound,
//! each compared with its boundary envelope along a sweep toward the boundary.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};
use crate::quadrature::{FocusedRule, GridSpec, QuadGrid};

/// Boundary distances d(z) of the sweep points z = (1 - d, 0, ..., 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub distances: Vec<f64>,
}

impl Default for Sweep {
    /// 0.5, 0.25, ..., 2^-9, then 1e-3.
    fn default() -> Self {
        Self::halving(0.5, 1e-3)
    }
}

impl Sweep {
    /// Halve from `start` while staying above `end`, then append `end`.
    pub fn halving(start: f64, end: f64) -> Self {
        let mut distances = Vec::new();
        let mut d = start;
        while d > end * (1.0 + 1e-9) {
            distances.push(d);
            d *= 0.5;
        }
        distances.push(end);
        Self { distances }
    }

    /// `count` geometrically spaced distances from `start` down to `end`.
    pub fn geometric(start: f64, end: f64, count: usize) -> Self {
        let count = count.max(2);
        let ratio = (end / start).powf(1.0 / (count - 1) as f64);
        Self {
            distances: (0..count).map(|i| start * ratio.powi(i as i32)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.distances.is_empty() {
            return Err(Error::Config("empty sweep".into()));
        }
        if let Some(d) = self.distances.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return Err(Error::Config(format!("sweep distance {d} not in (0, 1]")));
        }
        Ok(())
    }

    pub fn points(&self, dim: usize) -> Vec<Point> {
        self.distances
            .iter()
            .map(|d| Point::on_axis(dim, 1.0 - d))
            .collect()
    }

    /// The `count` points closest to the boundary.
    pub fn thinnest(&self, count: usize) -> Vec<f64> {
        let mut d = self.distances.clone();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d.truncate(count.max(1));
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub d_z: f64,
    pub lhs: f64,
    pub rhs_envelope: f64,
    pub ratio: f64,
}

/// Computed integrals against their envelopes along a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub label: String,
    pub domain: String,
    pub params: BTreeMap<String, f64>,
    pub grids: Vec<GridSpec>,
    pub points: Vec<SweepPoint>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl EstimateReport {
    pub fn new(
        label: impl Into<String>,
        domain: &DomainModel,
        params: &[(&str, f64)],
        grid: GridSpec,
        points: Vec<SweepPoint>,
    ) -> Self {
        let min_ratio = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let max_ratio = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
        Self {
            label: label.into(),
            domain: domain.name().into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            grids: vec![grid],
            points,
            min_ratio,
            max_ratio,
        }
    }

    /// Every ratio finite and strictly positive.
    pub fn ratios_finite_positive(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.ratio.is_finite() && p.ratio > 0.0)
    }

    /// max_ratio / min_ratio.
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }

    /// Relative change of the sup-ratio against a report at another resolution; the
    /// other report's grid is recorded.
    pub fn compare_sup(&mut self, other: &EstimateReport) -> f64 {
        self.grids.extend(other.grids.iter().copied());
        (self.max_ratio - other.max_ratio).abs() / other.max_ratio.abs()
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "grids": self.grids,
        })
    }

    /// CSV with columns d_z,lhs,rhs_envelope,ratio.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        for p in &self.points {
            wtr.serialize(p)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn check_ab_window(a: f64, b: f64) -> Result<()> {
    if !(a >= 1.0) {
        return Err(Error::admissibility(format!(
            "kernel power a = {a} must be >= 1"
        )));
    }
    if !(b > -1.0 && b < 2.0 * a - 2.0) {
        return Err(Error::admissibility(format!(
            "need -1 < b < 2a - 2, got b = {b} with 2a - 2 = {}",
            2.0 * a - 2.0
        )));
    }
    Ok(())
}

fn check_abs_window(a: f64, b: f64, s: f64) -> Result<()> {
    if !(s >= 0.0) {
        return Err(Error::admissibility(format!("s = {s} must be >= 0")));
    }
    if !(a - s >= 1.0) {
        return Err(Error::admissibility(format!(
            "need a - s >= 1, got a - s = {}",
            a - s
        )));
    }
    if !(b + 2.0 * s > -1.0 && b + 2.0 * s < 2.0 * a - 2.0) {
        return Err(Error::admissibility(format!(
            "need -1 < b + 2s < 2a - 2, got b + 2s = {} with 2a - 2 = {}",
            b + 2.0 * s,
            2.0 * a - 2.0
        )));
    }
    Ok(())
}

fn interior_point(domain: &DomainModel, z: &Point) -> Result<f64> {
    domain.kernel_diag(z)?;
    Ok(z.norm())
}

/// Integral over the domain of |K(z,w)|^power g(d(w)) for z = (x, 0, ..., 0).
pub fn kernel_power_integral<G: Fn(f64) -> f64>(
    domain: &DomainModel,
    rule: &FocusedRule,
    power: f64,
    g: G,
) -> f64 {
    let x = rule.center();
    rule.integrate(|v| domain.kernel_modulus_of_inner(v * x).powf(power), g)
}

/// I_{a,b}(z) = int |K(z,w)|^a d(w)^b dV(w), by node quadrature on `grid`.
pub fn i_ab(domain: &DomainModel, grid: &QuadGrid, z: &Point, a: f64, b: f64) -> Result<f64> {
    check_ab_window(a, b)?;
    domain.kernel_diag(z)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(grid.distances())
        .map(|((w, wt), d)| domain.kernel_unchecked(z, w).norm().powf(a) * d.powf(b) * wt)
        .sum())
}

/// I_{a,b,s}(z) = int |K(z,w)|^a d(w)^b K(w,w)^{-s} dV(w), by node quadrature on `grid`.
pub fn i_abs(
    domain: &DomainModel,
    grid: &QuadGrid,
    z: &Point,
    a: f64,
    b: f64,
    s: f64,
) -> Result<f64> {
    check_abs_window(a, b, s)?;
    domain.kernel_diag(z)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(grid.distances())
        .map(|((w, wt), d)| {
            domain.kernel_unchecked(z, w).norm().powf(a)
                * d.powf(b)
                * domain.diag_from_distance(*d).powf(-s)
                * wt
        })
        .sum())
}

/// I_{a,b}(z) with a rule focused at z (uses the unitary invariance of the ball).
pub fn i_ab_focused(
    domain: &DomainModel,
    spec: &GridSpec,
    z: &Point,
    a: f64,
    b: f64,
) -> Result<f64> {
    check_ab_window(a, b)?;
    let x = interior_point(domain, z)?;
    let rule = FocusedRule::new(domain, spec, x)?;
    Ok(kernel_power_integral(domain, &rule, a, |d| d.powf(b)))
}

/// I_{a,b,s}(z) with a rule focused at z.
pub fn i_abs_focused(
    domain: &DomainModel,
    spec: &GridSpec,
    z: &Point,
    a: f64,
    b: f64,
    s: f64,
) -> Result<f64> {
    check_abs_window(a, b, s)?;
    let x = interior_point(domain, z)?;
    let rule = FocusedRule::new(domain, spec, x)?;
    Ok(kernel_power_integral(domain, &rule, a, |d| {
        d.powf(b) * domain.diag_from_distance(d).powf(-s)
    }))
}

fn run_sweep<F>(sweep: &Sweep, f: F) -> Result<Vec<SweepPoint>>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    sweep.validate()?;
    sweep
        .distances
        .par_iter()
        .map(|&d| {
            let (lhs, env) = f(d)?;
            Ok(SweepPoint {
                d_z: d,
                lhs,
                rhs_envelope: env,
                ratio: lhs / env,
            })
        })
        .collect()
}

/// I_{a,b}(z) / (K(z,z)^{a-1} d(z)^b) along the sweep.
pub fn i_ab_sweep(
    domain: &DomainModel,
    spec: &GridSpec,
    a: f64,
    b: f64,
    sweep: &Sweep,
) -> Result<EstimateReport> {
    check_ab_window(a, b)?;
    let points = run_sweep(sweep, |d| {
        let rule = FocusedRule::new(domain, spec, 1.0 - d)?;
        let lhs = kernel_power_integral(domain, &rule, a, |t| t.powf(b));
        Ok((lhs, domain.diag_from_distance(d).powf(a - 1.0) * d.powf(b)))
    })?;
    Ok(EstimateReport::new(
        "I_ab",
        domain,
        &[("a", a), ("b", b)],
        *spec,
        points,
    ))
}

/// I_{a,b,s}(z) / (K(z,z)^{a-s-1} d(z)^b) along the sweep.
pub fn i_abs_sweep(
    domain: &DomainModel,
    spec: &GridSpec,
    a: f64,
    b: f64,
    s: f64,
    sweep: &Sweep,
) -> Result<EstimateReport> {
    check_abs_window(a, b, s)?;
    let points = run_sweep(sweep, |d| {
        let rule = FocusedRule::new(domain, spec, 1.0 - d)?;
        let lhs = kernel_power_integral(domain, &rule, a, |t| {
            t.powf(b) * domain.diag_from_distance(t).powf(-s)
        });
        Ok((
            lhs,
            domain.diag_from_distance(d).powf(a - s - 1.0) * d.powf(b),
        ))
    })?;
    Ok(EstimateReport::new(
        "I_abs",
        domain,
        &[("a", a), ("b", b), ("s", s)],
        *spec,
        points,
    ))
}

fn check_norm_params(p: f64, a: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::admissibility(format!(
            "exponent p = {p} must be >= 1"
        )));
    }
    if !(a > -1.0) {
        return Err(Error::admissibility(format!("weight a = {a} must be > -1")));
    }
    Ok(())
}

/// ||K(., z)||_{p,a} by node quadrature on `grid`.
pub fn kernel_norm(
    domain: &DomainModel,
    grid: &QuadGrid,
    z: &Point,
    p: f64,
    a: f64,
) -> Result<f64> {
    check_norm_params(p, a)?;
    domain.kernel_diag(z)?;
    let f: Vec<Complex64> = grid.sample(|w, _| domain.kernel_unchecked(w, z));
    crate::quadrature::norm_pa(grid, &f, p, a)
}

/// ||K(., z)||_{p,a} for z = (x, 0, ..., 0) with a focused rule.
pub fn kernel_norm_focused(
    domain: &DomainModel,
    rule: &FocusedRule,
    p: f64,
    a: f64,
) -> Result<f64> {
    check_norm_params(p, a)?;
    Ok(kernel_power_integral(domain, rule, p, |d| d.powf(a)).powf(1.0 / p))
}

/// Envelope K(z,z)^{1-1/p} d(z)^{a/p}.
pub fn kernel_norm_envelope(domain: &DomainModel, d: f64, p: f64, a: f64) -> f64 {
    domain.diag_from_distance(d).powf(1.0 - 1.0 / p) * d.powf(a / p)
}

/// ||K(., z)||_{p,a} / (K(z,z)^{1-1/p} d(z)^{a/p}) along the sweep. The `upper_admissible`
/// parameter records whether a < 2(p-1), the range of the matching upper estimate.
pub fn kernel_norm_bracket(
    domain: &DomainModel,
    spec: &GridSpec,
    p: f64,
    a: f64,
    sweep: &Sweep,
) -> Result<EstimateReport> {
    check_norm_params(p, a)?;
    let points = run_sweep(sweep, |d| {
        let rule = FocusedRule::new(domain, spec, 1.0 - d)?;
        let lhs = kernel_norm_focused(domain, &rule, p, a)?;
        Ok((lhs, kernel_norm_envelope(domain, d, p, a)))
    })?;
    let upper_ok = if a < 2.0 * (p - 1.0) { 1.0 } else { 0.0 };
    Ok(EstimateReport::new(
        "kernel_norm",
        domain,
        &[("p", p), ("a", a), ("upper_admissible", upper_ok)],
        *spec,
        points,
    ))
}

/// Whether K(z,z)^{1-1/p} d(z)^{a/p} increases strictly along the sweep toward the boundary.
pub fn envelope_blows_up(domain: &DomainModel, p: f64, a: f64, sweep: &Sweep) -> bool {
    let mut d = sweep.distances.clone();
    d.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let env: Vec<f64> = d
        .iter()
        .map(|&t| kernel_norm_envelope(domain, t, p, a))
        .collect();
    env.windows(2).all(|w| w[1] > w[0])
}

/// int |K(z,w)|^2 K(w,w)^{-alpha} d(w)^beta dV(w) for z = (x, 0, ..., 0).
pub fn berezin_integral(domain: &DomainModel, rule: &FocusedRule, alpha: f64, beta: f64) -> f64 {
    kernel_power_integral(domain, rule, 2.0, |d| {
        domain.diag_from_distance(d).powf(-alpha) * d.powf(beta)
    })
}

/// int |K(z,w)|^2 K(w,w)^{-alpha} d(w)^beta dV / (K(z,z)^{1-alpha} d(z)^beta) along the sweep,
/// for alpha, beta >= 0 and 2 alpha + beta < 2.
pub fn berezin_ratio(
    domain: &DomainModel,
    spec: &GridSpec,
    alpha: f64,
    beta: f64,
    sweep: &Sweep,
) -> Result<EstimateReport> {
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::admissibility(format!(
            "need alpha, beta >= 0, got ({alpha}, {beta})"
        )));
    }
    if !(2.0 * alpha + beta < 2.0) {
        return Err(Error::admissibility(format!(
            "need 2 alpha + beta < 2, got {}",
            2.0 * alpha + beta
        )));
    }
    let points = run_sweep(sweep, |d| {
        let rule = FocusedRule::new(domain, spec, 1.0 - d)?;
        let lhs = berezin_integral(domain, &rule, alpha, beta);
        Ok((
            lhs,
            domain.diag_from_distance(d).powf(1.0 - alpha) * d.powf(beta),
        ))
    })?;
    Ok(EstimateReport::new(
        "berezin_ratio",
        domain,
        &[("alpha", alpha), ("beta", beta)],
        *spec,
        points,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disc() -> DomainModel {
        DomainModel::disc()
    }

    #[test]
    fn default_sweep_schedule() {
        let s = Sweep::default();
        assert_eq!(s.distances.len(), 10);
        assert_relative_eq!(s.distances[0], 0.5);
        assert_relative_eq!(*s.distances.last().unwrap(), 1e-3);
        assert_eq!(s.thinnest(2), vec![1e-3, 0.5f64.powi(9)]);
    }

    #[test]
    fn i_ab_at_center() {
        let g = build_grid(&disc(), &GridSpec::new(40, 16)).unwrap();
        let o = Point::origin(1);
        assert_relative_eq!(
            i_ab(&disc(), &g, &o, 2.0, 0.0).unwrap(),
            1.0 / PI,
            epsilon = 1e-10
        );
        let f = i_ab_focused(&disc(), &GridSpec::default(), &o, 2.0, 0.0).unwrap();
        assert_relative_eq!(f, 1.0 / PI, epsilon = 1e-10);
        assert!(matches!(
            i_ab(&disc(), &g, &o, 2.0, 2.5),
            Err(Error::Admissibility { .. })
        ));
    }

    #[test]
    fn i_abs_reduces_and_checks_window() {
        let g = build_grid(&disc(), &GridSpec::new(40, 32)).unwrap();
        let z = Point::on_axis(1, 0.4);
        let a = i_ab(&disc(), &g, &z, 2.0, 0.0).unwrap();
        let b = i_abs(&disc(), &g, &z, 2.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-14);
        assert!(i_abs(&disc(), &g, &z, 2.0, 0.0, 1.2).is_err());
    }

    #[test]
    fn kernel_norm_values() {
        let g = build_grid(&disc(), &GridSpec::new(40, 16)).unwrap();
        let o = Point::origin(1);
        assert_relative_eq!(
            kernel_norm(&disc(), &g, &o, 2.0, 0.0).unwrap(),
            0.564190,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            kernel_norm(&disc(), &g, &o, 2.0, 1.0).unwrap(),
            0.325735,
            epsilon = 1e-6
        );
        let spec = GridSpec::default();
        let n9 = kernel_norm_focused(
            &disc(),
            &FocusedRule::new(&disc(), &spec, 0.9).unwrap(),
            2.0,
            0.0,
        )
        .unwrap();
        let n5 = kernel_norm_focused(
            &disc(),
            &FocusedRule::new(&disc(), &spec, 0.5).unwrap(),
            2.0,
            0.0,
        )
        .unwrap();
        assert!(n9 > n5);
    }

    #[test]
    fn reproducing_ratio_is_one() {
        let r = kernel_norm_bracket(&disc(), &GridSpec::default(), 2.0, 0.0, &Sweep::default())
            .unwrap();
        assert!((r.min_ratio - 1.0).abs() < 1e-6 && (r.max_ratio - 1.0).abs() < 1e-6);
        let r = berezin_ratio(&disc(), &GridSpec::default(), 0.0, 0.0, &Sweep::default()).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn berezin_ratio_window() {
        assert!(berezin_ratio(&disc(), &GridSpec::default(), 1.0, 0.0, &Sweep::default()).is_err());
        let r = berezin_ratio(&disc(), &GridSpec::default(), 0.5, 0.5, &Sweep::default()).unwrap();
        assert!(r.ratios_finite_positive());
    }

    #[test]
    fn envelope_direction() {
        assert!(envelope_blows_up(&disc(), 2.0, 1.0, &Sweep::default()));
        assert!(!envelope_blows_up(&disc(), 1.0, 0.5, &Sweep::default()));
    }

    #[test]
    fn csv_layout() {
        let r = i_ab_sweep(
            &disc(),
            &GridSpec::new(40, 32),
            2.0,
            0.0,
            &Sweep::geometric(0.5, 0.01, 3),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        r.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("d_z,lhs,rhs_envelope,ratio"));
        assert_eq!(text.lines().count(), 4);
        assert!(r.summary_json().get("max_ratio").is_some());
    }
}
