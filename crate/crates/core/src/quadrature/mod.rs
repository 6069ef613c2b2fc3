//! Boundary-graded quadrature on the model domains.

mod focused;
mod gauss;

pub use focused::{FocusRing, FocusedRule};
pub use gauss::{dyadic_toward_zero, gauss_legendre, UnitRule, ENDPOINT_GRADING};

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};

/// Upper limit on materialized tensor-grid nodes.
pub const MAX_GRID_NODES: usize = 20_000_000;

/// Resolution of a grid: radial count, angular count per angular dimension, grading exponent
/// and boundary clamp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_theta: usize,
    pub kappa: f64,
    pub eps_min: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_r: 80,
            n_theta: 128,
            kappa: 2.0,
            eps_min: 1e-6,
        }
    }
}

impl GridSpec {
    pub fn new(n_r: usize, n_theta: usize) -> Self {
        Self {
            n_r,
            n_theta,
            ..Self::default()
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_eps_min(mut self, eps_min: f64) -> Self {
        self.eps_min = eps_min;
        self
    }

    /// Same grid with both counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            n_r: self.n_r * 2,
            n_theta: self.n_theta * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r < 4 || self.n_theta < 4 {
            return Err(Error::Config(format!(
                "grid sizes N_r = {}, N_theta = {} must both be at least 4",
                self.n_r, self.n_theta
            )));
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(Error::Config(format!(
                "grading kappa = {} must be >= 1",
                self.kappa
            )));
        }
        if !(self.eps_min > 0.0 && self.eps_min < 0.1) {
            return Err(Error::Config(format!(
                "boundary clamp eps_min = {} must lie in (0, 0.1)",
                self.eps_min
            )));
        }
        Ok(())
    }
}

/// How the nodes of a grid are arranged.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    /// Disc tensor grid, ring-major; every ring carries the same `n_angles` equispaced angles
    /// starting at 0, so operators with radial symbols are block circulant.
    Rings { radii: Vec<f64>, n_angles: usize },
    /// Ball tensor grid in (radius, simplex, torus) coordinates.
    Tensor,
    /// Disc grid focused at a point.
    Focused,
    /// Read back from a CSV dump.
    Loaded,
}

/// Nodes and Lebesgue weights. `distances` holds the graded boundary distance of each node;
/// node coordinates are clamped to d >= eps_min while the distance keeps its exact value.
#[derive(Clone, Debug)]
pub struct QuadGrid {
    dim: usize,
    spec: GridSpec,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    distances: Vec<f64>,
    layout: Layout,
    tolerance: f64,
}

impl QuadGrid {
    pub(crate) fn from_parts(
        dim: usize,
        spec: GridSpec,
        nodes: Vec<Point>,
        weights: Vec<f64>,
        distances: Vec<f64>,
        layout: Layout,
        tolerance: f64,
    ) -> Self {
        Self {
            dim,
            spec,
            nodes,
            weights,
            distances,
            layout,
            tolerance,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Self-reported accuracy of sum(weights) as a volume.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Evaluate f(node, distance) at every node.
    pub fn sample<T, F: Fn(&Point, f64) -> T>(&self, f: F) -> Vec<T> {
        self.nodes
            .iter()
            .zip(&self.distances)
            .map(|(p, &d)| f(p, d))
            .collect()
    }

    /// Write the grid as CSV with columns re_z1,im_z1,...,weight.
    pub fn dump_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = Vec::with_capacity(2 * self.dim + 1);
        for j in 1..=self.dim {
            header.push(format!("re_z{j}"));
            header.push(format!("im_z{j}"));
        }
        header.push("weight".into());
        wtr.write_record(&header)?;
        for (p, w) in self.nodes.iter().zip(&self.weights) {
            let mut row: Vec<String> = Vec::with_capacity(header.len());
            for c in p.coords() {
                row.push(format!("{:e}", c.re));
                row.push(format!("{:e}", c.im));
            }
            row.push(format!("{w:e}"));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Read a CSV dump; distances are recomputed as 1 - |z|.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let cols = rdr.headers()?.len();
        if cols < 3 || cols % 2 == 0 || cols > 7 {
            return Err(Error::Config(format!("grid CSV has {cols} columns")));
        }
        let dim = (cols - 1) / 2;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad number '{s}': {e}")))
                })
                .collect::<Result<_>>()?;
            let coords: Vec<Complex64> = (0..dim)
                .map(|j| Complex64::new(vals[2 * j], vals[2 * j + 1]))
                .collect();
            nodes.push(Point::new(&coords)?);
            weights.push(vals[cols - 1]);
        }
        let distances = nodes.iter().map(|p| (1.0 - p.norm()).max(0.0)).collect();
        Ok(Self {
            dim,
            spec: GridSpec::default(),
            nodes,
            weights,
            distances,
            layout: Layout::Loaded,
            tolerance: f64::NAN,
        })
    }
}

/// Tensor polar grid: r = 1 - (1-u)^kappa with Gauss-Legendre u, periodic trapezoid in every
/// angle, Gauss-Legendre on the simplex of squared moduli for the balls.
pub fn build_grid(domain: &DomainModel, spec: &GridSpec) -> Result<QuadGrid> {
    spec.validate()?;
    let radial = radial_nodes(spec);
    match domain.dim() {
        1 => Ok(disc_tensor(spec, &radial)),
        n => ball_tensor(domain, n, spec, &radial),
    }
}

/// (r, distance, dr-weight) with r clamped to 1 - eps_min.
fn radial_nodes(spec: &GridSpec) -> Vec<(f64, f64, f64)> {
    let rule = UnitRule::new(spec.n_r);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| {
            let s = (1.0 - u).powf(spec.kappa);
            let dr = spec.kappa * (1.0 - u).powf(spec.kappa - 1.0) * w;
            ((1.0 - s).min(1.0 - spec.eps_min), s, dr)
        })
        .collect()
}

fn disc_tensor(spec: &GridSpec, radial: &[(f64, f64, f64)]) -> QuadGrid {
    let n_t = spec.n_theta;
    let dt = 2.0 * PI / n_t as f64;
    let mut nodes = Vec::with_capacity(radial.len() * n_t);
    let mut weights = Vec::with_capacity(nodes.capacity());
    let mut distances = Vec::with_capacity(nodes.capacity());
    for &(r, s, dr) in radial {
        // the Jacobian uses the unclamped radius
        let w = (1.0 - s) * dr * dt;
        for k in 0..n_t {
            nodes.push(Point::polar(r, dt * k as f64));
            weights.push(w);
            distances.push(s);
        }
    }
    let radii = radial.iter().map(|t| t.0).collect();
    QuadGrid::from_parts(
        1,
        *spec,
        nodes,
        weights,
        distances,
        Layout::Rings {
            radii,
            n_angles: n_t,
        },
        volume_tolerance(PI, radial.len() * n_t),
    )
}

fn volume_tolerance(volume: f64, nodes: usize) -> f64 {
    volume * (1e-13 + 1e-16 * nodes as f64)
}

/// Points t on the simplex {t_j >= 0, sum t_j = 1} of dimension n-1 with weights summing
/// to 1/(n-1)!.
fn simplex_rule(n: usize, count: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = UnitRule::new(count);
    match n {
        2 => rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| (vec![t, 1.0 - t], w))
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count * count);
            for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
                for (&v, &wv) in rule.nodes.iter().zip(&rule.weights) {
                    let t1 = u;
                    let t2 = (1.0 - u) * v;
                    out.push((vec![t1, t2, 1.0 - t1 - t2], wu * wv * (1.0 - u)));
                }
            }
            out
        }
    }
}

fn ball_tensor(
    domain: &DomainModel,
    n: usize,
    spec: &GridSpec,
    radial: &[(f64, f64, f64)],
) -> Result<QuadGrid> {
    let n_t = spec.n_theta;
    let simplex = simplex_rule(n, (n_t / 2).max(4));
    let torus = n_t.pow(n as u32);
    let total = radial.len() * simplex.len() * torus;
    if total > MAX_GRID_NODES {
        return Err(Error::Config(format!(
            "tensor grid on {} would need {total} nodes (limit {MAX_GRID_NODES})",
            domain.name()
        )));
    }
    let dt = 2.0 * PI / n_t as f64;
    let jac = 2f64.powi(1 - n as i32) * dt.powi(n as i32);
    let phases: Vec<Complex64> = (0..n_t)
        .map(|k| Complex64::from_polar(1.0, dt * k as f64))
        .collect();
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut distances = Vec::with_capacity(total);
    for &(r, s, dr) in radial {
        let rj = (1.0 - s).powi(2 * n as i32 - 1) * dr * jac;
        for (t, wt) in &simplex {
            let moduli: Vec<f64> = t.iter().map(|tj| r * tj.max(0.0).sqrt()).collect();
            for idx in 0..torus {
                let mut rest = idx;
                let coords: Vec<Complex64> = moduli
                    .iter()
                    .map(|&m| {
                        let a = rest % n_t;
                        rest /= n_t;
                        phases[a] * m
                    })
                    .collect();
                nodes.push(Point::new(&coords)?);
                weights.push(rj * wt);
                distances.push(s);
            }
        }
    }
    Ok(QuadGrid::from_parts(
        n,
        *spec,
        nodes,
        weights,
        distances,
        Layout::Tensor,
        volume_tolerance(domain.volume(), total),
    ))
}

fn check_weight_exponent(a: f64) -> Result<()> {
    if !(a > -1.0) {
        return Err(Error::admissibility(format!(
            "weight exponent a = {a} must satisfy a > -1"
        )));
    }
    Ok(())
}

/// sum_i f_i d_i^a w_i.
pub fn integrate(grid: &QuadGrid, f: &[Complex64], a: f64) -> Result<Complex64> {
    check_weight_exponent(a)?;
    check_len(grid, f.len())?;
    Ok(f.iter()
        .zip(grid.weights())
        .zip(grid.distances())
        .map(|((fi, w), d)| fi * (w * weight_power(*d, a)))
        .sum())
}

/// Real-valued variant of [`integrate`].
pub fn integrate_real(grid: &QuadGrid, f: &[f64], a: f64) -> Result<f64> {
    check_weight_exponent(a)?;
    check_len(grid, f.len())?;
    Ok(f.iter()
        .zip(grid.weights())
        .zip(grid.distances())
        .map(|((fi, w), d)| fi * w * weight_power(*d, a))
        .sum())
}

#[inline]
fn weight_power(d: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        d.powf(a)
    }
}

fn check_len(grid: &QuadGrid, n: usize) -> Result<()> {
    if n != grid.len() {
        return Err(Error::Config(format!(
            "sampled function has {n} values, grid has {} nodes",
            grid.len()
        )));
    }
    Ok(())
}

/// ||f||_{p,a} = (int |f|^p dV_a)^{1/p}.
pub fn norm_pa(grid: &QuadGrid, f: &[Complex64], p: f64, a: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::admissibility(format!(
            "exponent p = {p} must be >= 1"
        )));
    }
    let powered: Vec<f64> = f.iter().map(|x| x.norm().powf(p)).collect();
    Ok(integrate_real(grid, &powered, a)?.powf(1.0 / p))
}

#[derive(Clone, Debug, Serialize)]
pub struct Convergence {
    pub values: Vec<Complex64>,
    pub n_r: Vec<usize>,
    pub richardson_limit: Complex64,
    pub error_estimate: f64,
}

/// Integrate `f(node, distance)` against dV_a on each grid and extrapolate the sequence
/// (Aitken's delta-squared on the last three values).
pub fn convergence_estimate<F>(grids: &[QuadGrid], a: f64, f: F) -> Result<Convergence>
where
    F: Fn(&Point, f64) -> Complex64,
{
    if grids.len() < 3 {
        return Err(Error::Config(format!(
            "convergence study needs at least 3 grids, got {}",
            grids.len()
        )));
    }
    if grids.windows(2).any(|g| g[1].spec().n_r <= g[0].spec().n_r) {
        return Err(Error::Config(
            "grids must be ordered by strictly increasing N_r".into(),
        ));
    }
    let values: Vec<Complex64> = grids
        .iter()
        .map(|g| integrate(g, &g.sample(&f), a))
        .collect::<Result<_>>()?;
    let (limit, err) = aitken(&values);
    Ok(Convergence {
        n_r: grids.iter().map(|g| g.spec().n_r).collect(),
        values,
        richardson_limit: limit,
        error_estimate: err,
    })
}

pub(crate) fn aitken(values: &[Complex64]) -> (Complex64, f64) {
    let n = values.len();
    let (x0, x1, x2) = (values[n - 3], values[n - 2], values[n - 1]);
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let denom = d2 - d1;
    let scale = x2.norm().max(1e-300);
    let limit = if denom.norm() <= 1e-14 * scale || d2.norm() >= d1.norm() {
        x2
    } else {
        x2 - d2 * d2 / denom
    };
    (limit, (limit - x2).norm().max(d2.norm()))
}
