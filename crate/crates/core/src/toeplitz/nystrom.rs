//! Nystrom discretization A[i][j] = K(z_i, w_j) psi(w_j) weight_j over a quadrature grid.
//! Ring grids on the disc are rotation invariant, so A is block circulant and is stored as
//! one n_r x n_r block per angular frequency.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::spectrum::{SingularSpectrum, SpectrumSource};
use super::symbol::SymbolSpec;
use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::quadrature::{Layout, QuadGrid};

/// Default cap on the node count of dense matrices.
pub const DENSE_NODE_CAP: usize = 5000;

/// Ratio of smallest to largest space weight below which W^{-1/2} is refused.
const WEIGHT_CONDITION_FLOOR: f64 = 1e-280;

#[derive(Clone, Debug)]
enum Storage {
    Dense(DMatrix<Complex64>),
    /// blocks[nu] = sum_m C_m e^{-2 pi i nu m / N}, C_m[i][j] = A[(i, m), (j, 0)].
    Circulant {
        n_rings: usize,
        n_angles: usize,
        blocks: Vec<DMatrix<Complex64>>,
    },
}

#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    grid: QuadGrid,
    symbol: Vec<f64>,
    a: f64,
    storage: Storage,
}

impl DiscreteOperator {
    pub fn assemble(domain: &DomainModel, grid: &QuadGrid, spec: &SymbolSpec) -> Result<Self> {
        Self::assemble_with_cap(domain, grid, spec, DENSE_NODE_CAP)
    }

    /// Dense grids are refused above `cap` nodes; ring grids above `cap` rings.
    pub fn assemble_with_cap(
        domain: &DomainModel,
        grid: &QuadGrid,
        spec: &SymbolSpec,
        cap: usize,
    ) -> Result<Self> {
        if grid.dim() != domain.dim() {
            return Err(Error::Config(format!(
                "grid of dimension {} used on {}",
                grid.dim(),
                domain.name()
            )));
        }
        let symbol = spec.on_grid(domain, grid)?;
        let storage = match grid.layout() {
            Layout::Rings { radii, n_angles } if domain.dim() == 1 => {
                if radii.len() > cap {
                    return Err(Error::MemoryGuard {
                        nodes: grid.len(),
                        cap,
                    });
                }
                circulant_blocks(domain, grid, &symbol, radii.len(), *n_angles)
            }
            _ => {
                if grid.len() > cap {
                    return Err(Error::MemoryGuard {
                        nodes: grid.len(),
                        cap,
                    });
                }
                Storage::Dense(dense_matrix(domain, grid, &symbol))
            }
        };
        let op = Self {
            grid: grid.clone(),
            symbol,
            a: 0.0,
            storage,
        };
        if let Storage::Dense(m) = &op.storage {
            if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Conditioning("non-finite matrix entry".into()));
            }
        }
        Ok(op)
    }

    /// Space weight a of L^2_a used by [`DiscreteOperator::singular_values`].
    pub fn with_weight(mut self, a: f64) -> Result<Self> {
        if !(a > -1.0) {
            return Err(Error::admissibility(format!("need a > -1, got a = {a}")));
        }
        self.a = a;
        Ok(self)
    }

    pub fn weight(&self) -> f64 {
        self.a
    }

    pub fn grid(&self) -> &QuadGrid {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn is_circulant(&self) -> bool {
        matches!(self.storage, Storage::Circulant { .. })
    }

    /// (A f)_i = sum_j A[i][j] f_j.
    pub fn apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        if f.len() != self.len() {
            return Err(Error::Config(format!(
                "vector of length {} applied to an operator on {} nodes",
                f.len(),
                self.len()
            )));
        }
        match &self.storage {
            Storage::Dense(m) => Ok((m * nalgebra::DVector::from_column_slice(f))
                .as_slice()
                .to_vec()),
            Storage::Circulant {
                n_rings,
                n_angles,
                blocks,
            } => Ok(circulant_apply(*n_rings, *n_angles, blocks, f)),
        }
    }

    /// Space weights d(node)^a weight(node).
    fn space_weights(&self) -> Result<Vec<f64>> {
        let w: Vec<f64> = self
            .grid
            .weights()
            .iter()
            .zip(self.grid.distances())
            .map(|(w, d)| w * d.powf(self.a))
            .collect();
        let max = w.iter().copied().fold(0.0, f64::max);
        let min = w.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0 && max.is_finite() && min / max > WEIGHT_CONDITION_FLOOR) {
            return Err(Error::Conditioning(format!(
                "space weights range over [{min:e}, {max:e}] with a = {}",
                self.a
            )));
        }
        Ok(w)
    }

    /// Singular values of W^{1/2} A W^{-1/2}, W = diag(d^a weight): the singular values
    /// with respect to the discrete L^2_a inner product.
    pub fn singular_values(&self) -> Result<SingularSpectrum> {
        let w = self.space_weights()?;
        let sq: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let source = SpectrumSource::Nystrom {
            grid: *self.grid.spec(),
            weight: self.a,
        };
        let values = match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                let s = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * (sq[i] / sq[j]));
                s.singular_values().as_slice().to_vec()
            }
            Storage::Circulant {
                n_rings,
                n_angles,
                blocks,
            } => {
                let ring_sq: Vec<f64> = (0..*n_rings).map(|i| sq[i * n_angles]).collect();
                let per: Vec<Vec<f64>> = blocks
                    .par_iter()
                    .map(|b| {
                        DMatrix::from_fn(*n_rings, *n_rings, |i, j| {
                            b[(i, j)] * (ring_sq[i] / ring_sq[j])
                        })
                        .singular_values()
                        .as_slice()
                        .to_vec()
                    })
                    .collect();
                per.into_iter().flatten().collect()
            }
        };
        SingularSpectrum::new(values, source)
    }
}

fn dense_matrix(domain: &DomainModel, grid: &QuadGrid, symbol: &[f64]) -> DMatrix<Complex64> {
    let n = grid.len();
    let nodes = grid.nodes();
    let col_w: Vec<f64> = symbol
        .iter()
        .zip(grid.weights())
        .map(|(s, w)| s * w)
        .collect();
    let columns: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            nodes
                .iter()
                .map(|z| {
                    if col_w[j] == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        domain.kernel_unchecked(z, &nodes[j]) * col_w[j]
                    }
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| columns[j][i])
}

fn circulant_blocks(
    domain: &DomainModel,
    grid: &QuadGrid,
    symbol: &[f64],
    n_rings: usize,
    n_angles: usize,
) -> Storage {
    let nodes = grid.nodes();
    let weights = grid.weights();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n_angles);
    // series[i][j] = (C_m[i][j])_m, transformed over m
    let series: Vec<Vec<Complex64>> = (0..n_rings * n_rings)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / n_rings, ij % n_rings);
            let col = j * n_angles;
            let cw = symbol[col] * weights[col];
            let mut v: Vec<Complex64> = (0..n_angles)
                .map(|m| {
                    if cw == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        domain.kernel_unchecked(&nodes[i * n_angles + m], &nodes[col]) * cw
                    }
                })
                .collect();
            fft.process(&mut v);
            v
        })
        .collect();
    let blocks = (0..n_angles)
        .map(|nu| DMatrix::from_fn(n_rings, n_rings, |i, j| series[i * n_rings + j][nu]))
        .collect();
    Storage::Circulant {
        n_rings,
        n_angles,
        blocks,
    }
}

fn circulant_apply(
    n_rings: usize,
    n_angles: usize,
    blocks: &[DMatrix<Complex64>],
    f: &[Complex64],
) -> Vec<Complex64> {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n_angles);
    let inv = planner.plan_fft_inverse(n_angles);
    let mut hat: Vec<Vec<Complex64>> = (0..n_rings)
        .map(|j| {
            let mut v = f[j * n_angles..(j + 1) * n_angles].to_vec();
            fwd.process(&mut v);
            v
        })
        .collect();
    let mut out_hat = vec![vec![Complex64::new(0.0, 0.0); n_angles]; n_rings];
    for (nu, b) in blocks.iter().enumerate() {
        for i in 0..n_rings {
            out_hat[i][nu] = (0..n_rings).map(|j| b[(i, j)] * hat[j][nu]).sum();
        }
    }
    hat.clear();
    let scale = 1.0 / n_angles as f64;
    out_hat
        .into_iter()
        .flat_map(|mut v| {
            inv.process(&mut v);
            v.into_iter().map(move |x| x * scale)
        })
        .collect()
}
