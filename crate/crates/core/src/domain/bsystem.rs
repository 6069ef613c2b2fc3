//! Boundary charts, the sharp B-type system and adapted polydiscs for the ball family.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{DomainModel, Point, BOUNDARY_CLAMP, MAX_DIM};
use crate::error::{Error, Result};

/// Bound C with 1/C <= |det U| <= C; unitary charts give C = 1.
pub const CHART_DET_BOUND: f64 = 1.0;

/// Unitary chart sending z/|z| to the first coordinate axis.
#[derive(Clone, Debug)]
pub struct Chart {
    base: Point,
    rows: [[Complex64; MAX_DIM]; MAX_DIM],
    dim: usize,
    det_modulus: f64,
}

impl Chart {
    pub fn at(z: &Point) -> Self {
        let dim = z.dim();
        let zero = Complex64::new(0.0, 0.0);
        let norm = z.norm();
        let mut basis: Vec<[Complex64; MAX_DIM]> = Vec::with_capacity(dim);
        if norm > 1e-14 {
            let mut e = [zero; MAX_DIM];
            for (j, c) in z.coords().iter().enumerate() {
                e[j] = c / norm;
            }
            basis.push(e);
        }
        for axis in 0..dim {
            if basis.len() == dim {
                break;
            }
            let mut v = [zero; MAX_DIM];
            v[axis] = Complex64::new(1.0, 0.0);
            for b in &basis {
                let proj: Complex64 = (0..dim).map(|j| v[j] * b[j].conj()).sum();
                for j in 0..dim {
                    v[j] -= proj * b[j];
                }
            }
            let n: f64 = (0..dim).map(|j| v[j].norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-8 {
                for x in v.iter_mut().take(dim) {
                    *x /= n;
                }
                basis.push(v);
            }
        }
        // row k holds conj(basis_k), so (U w)_k = <w, basis_k>
        let mut rows = [[zero; MAX_DIM]; MAX_DIM];
        for (k, b) in basis.iter().enumerate() {
            for j in 0..dim {
                rows[k][j] = b[j].conj();
            }
        }
        let det_modulus = determinant(&rows, dim).norm();
        Self {
            base: *z,
            rows,
            dim,
            det_modulus,
        }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn det_modulus(&self) -> f64 {
        self.det_modulus
    }

    /// Chart coordinates w' = U w.
    pub fn apply(&self, w: &Point) -> Point {
        let mut out = [Complex64::new(0.0, 0.0); MAX_DIM];
        for (k, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim).map(|j| self.rows[k][j] * w.coords[j]).sum();
        }
        Point::from_array(out, self.dim)
    }

    /// Inverse map w = U^* w'.
    pub fn inverse(&self, wp: &Point) -> Point {
        let mut out = [Complex64::new(0.0, 0.0); MAX_DIM];
        for (j, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim)
                .map(|k| self.rows[k][j].conj() * wp.coords[k])
                .sum();
        }
        Point::from_array(out, self.dim)
    }
}

fn determinant(m: &[[Complex64; MAX_DIM]; MAX_DIM], dim: usize) -> Complex64 {
    match dim {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SharpRatio {
    pub diag_ratio: f64,
    pub offdiag_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolydiscReport {
    pub radii: Vec<f64>,
    pub volume: f64,
    pub contained: bool,
    /// Largest |w| over the sampled distinguished boundary.
    pub max_norm: f64,
    /// max/min of K(w,w) over the samples; infinite when a sample reaches the boundary clamp.
    pub kernel_variation: f64,
    /// max/min of d(w) over the samples.
    pub distance_variation: f64,
    pub samples: usize,
}

/// Coefficients A_{jk} (constant on the boundary neighborhood), order m and the
/// off-diagonal neighborhood radius c.
#[derive(Clone, Debug)]
pub struct BSystem {
    dim: usize,
    order: usize,
    coefficients: Vec<Vec<f64>>,
    neighborhood: f64,
}

impl BSystem {
    /// m = 2, A_{l2} = 1 for l >= 2, everything else zero; c = 0.5.
    pub fn for_ball(domain: &DomainModel) -> Self {
        let dim = domain.dim();
        let order = 2;
        let coefficients = (0..dim)
            .map(|j| {
                let mut row = vec![0.0; order + 1];
                if j >= 1 {
                    row[2] = 1.0;
                }
                row
            })
            .collect();
        Self {
            dim,
            order,
            coefficients,
            neighborhood: 0.5,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn neighborhood(&self) -> f64 {
        self.neighborhood
    }

    /// A_{jk} with 1-based indices as in the usual notation.
    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        self.coefficients
            .get(j.wrapping_sub(1))
            .and_then(|row| row.get(k))
            .copied()
            .unwrap_or(0.0)
    }

    /// Every transverse direction j >= 2 needs some positive A_{jk}.
    pub fn validate(&self) -> Result<()> {
        for j in 2..=self.dim {
            if !(1..=self.order).any(|k| self.coefficient(j, k) > 0.0) {
                return Err(Error::Config(format!(
                    "direction {j} has no positive coefficient"
                )));
            }
        }
        Ok(())
    }

    fn chart_pair(&self, domain: &DomainModel, z: &Point, w: &Point) -> Result<(Point, Point)> {
        for p in [z, w] {
            if p.dim() != self.dim || p.norm_sq() > 1.0 + 1e-14 {
                return Err(Error::ChartDomain(format!(
                    "point with |p|^2 = {} outside the closed {}",
                    p.norm_sq(),
                    domain.name()
                )));
            }
        }
        let chart = Chart::at(z);
        Ok((chart.apply(z), chart.apply(w)))
    }

    /// delta = d(z) + d(w) + |z'_1 - w'_1| + sum_{l>=2, s} A_{ls} |z'_l - w'_l|^s.
    pub fn pseudo_distance(&self, domain: &DomainModel, z: &Point, w: &Point) -> Result<f64> {
        let (zp, wp) = self.chart_pair(domain, z, w)?;
        let mut delta = domain.boundary_distance(z)
            + domain.boundary_distance(w)
            + (zp.coords[0] - wp.coords[0]).norm();
        for l in 2..=self.dim {
            let gap = (zp.coords[l - 1] - wp.coords[l - 1]).norm();
            for s in 1..=self.order {
                let a = self.coefficient(l, s);
                if a > 0.0 {
                    delta += a * gap.powi(s as i32);
                }
            }
        }
        if delta <= 0.0 {
            return Err(Error::ChartDomain(
                "pseudo-distance vanishes at a boundary point".into(),
            ));
        }
        Ok(delta)
    }

    /// b_1 = 1/delta, b_j = sum_k (A_{jk}/delta)^{1/k}.
    pub fn b_functions(&self, domain: &DomainModel, z: &Point, w: &Point) -> Result<Vec<f64>> {
        let delta = self.pseudo_distance(domain, z, w)?;
        let mut b = Vec::with_capacity(self.dim);
        b.push(1.0 / delta);
        for j in 2..=self.dim {
            let bj: f64 = (1..=self.order)
                .map(|k| self.coefficient(j, k))
                .enumerate()
                .filter(|(_, a)| *a > 0.0)
                .map(|(i, a)| (a / delta).powf(1.0 / (i + 1) as f64))
                .sum();
            b.push(bj);
        }
        Ok(b)
    }

    fn b_product_sq(&self, domain: &DomainModel, z: &Point, w: &Point) -> Result<f64> {
        Ok(self
            .b_functions(domain, z, w)?
            .iter()
            .map(|b| b * b)
            .product())
    }

    /// K(z,z)/prod b_j(z,z)^2 and |K(z,w)|/prod b_j(z,w)^2 for w in the Euclidean ball B(z, c).
    pub fn sharp_b_ratio(&self, domain: &DomainModel, z: &Point, w: &Point) -> Result<SharpRatio> {
        let gap = w.sub(z).norm();
        if gap >= self.neighborhood {
            return Err(Error::Range(format!(
                "|w - z| = {gap} is not below the neighborhood radius {}",
                self.neighborhood
            )));
        }
        let kzz = domain.kernel_diag(z)?;
        let kzw = domain.kernel(z, w)?.norm();
        Ok(SharpRatio {
            diag_ratio: kzz / self.b_product_sq(domain, z, z)?,
            offdiag_ratio: kzw / self.b_product_sq(domain, z, w)?,
        })
    }

    /// Polydisc P_lambda(z) with radii lambda/b_j(z,z) in chart coordinates.
    /// Containment is judged for the open polydisc, from samples of its distinguished boundary.
    pub fn bpolydisc(
        &self,
        domain: &DomainModel,
        z: &Point,
        lambda: f64,
    ) -> Result<PolydiscReport> {
        if !(lambda > 0.0) {
            return Err(Error::Config(format!(
                "polydisc scale {lambda} must be positive"
            )));
        }
        let b = self.b_functions(domain, z, z)?;
        let radii: Vec<f64> = b.iter().map(|bj| lambda / bj).collect();
        let volume = PI.powi(self.dim as i32)
            * lambda.powi(2 * self.dim as i32)
            * b.iter().map(|bj| bj.powi(-2)).product::<f64>();

        let chart = Chart::at(z);
        let center = chart.apply(z);
        let n_angles: usize = match self.dim {
            1 => 64,
            2 => 24,
            _ => 12,
        };
        let fractions = [0.5, 1.0];
        let total = n_angles.pow(self.dim as u32);
        let mut max_norm: f64 = 0.0;
        let (mut kmin, mut kmax) = (f64::INFINITY, 0.0f64);
        let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
        let mut samples = 0;
        for &t in &fractions {
            for idx in 0..total {
                let mut coords = [Complex64::new(0.0, 0.0); MAX_DIM];
                let mut rest = idx;
                for j in 0..self.dim {
                    let a = rest % n_angles;
                    rest /= n_angles;
                    let theta = 2.0 * PI * a as f64 / n_angles as f64;
                    coords[j] = center.coords[j] + Complex64::from_polar(t * radii[j], theta);
                }
                let w = chart.inverse(&Point::from_array(coords, self.dim));
                let norm = w.norm();
                max_norm = max_norm.max(norm);
                let d = (1.0 - norm).max(0.0);
                dmin = dmin.min(d);
                dmax = dmax.max(d);
                if d >= BOUNDARY_CLAMP {
                    let k = domain.diag_from_distance(d);
                    kmin = kmin.min(k);
                    kmax = kmax.max(k);
                } else {
                    kmax = f64::INFINITY;
                }
                samples += 1;
            }
        }
        Ok(PolydiscReport {
            radii,
            volume,
            contained: max_norm <= 1.0 + 1e-12,
            max_norm,
            kernel_variation: kmax / kmin,
            distance_variation: if dmin > 0.0 {
                dmax / dmin
            } else {
                f64::INFINITY
            },
            samples,
        })
    }
}
