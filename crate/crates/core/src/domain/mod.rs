//! Model domains: the unit disc and the unit balls of C^2 and C^3.

mod bsystem;

pub use bsystem::{BSystem, Chart, PolydiscReport, SharpRatio, CHART_DET_BOUND};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior points closer than this to the boundary are rejected by diagonal evaluations.
pub const BOUNDARY_CLAMP: f64 = 1e-6;

/// Default truncation degree of the orthonormal-series oracle.
pub const SERIES_DEGREE: usize = 200;

const MAX_DIM: usize = 3;

/// A point of C^n, n <= 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [Complex64; MAX_DIM],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[Complex64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidPoint(format!(
                "dimension {} not in 1..=3",
                coords.len()
            )));
        }
        if coords
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let mut buf = [Complex64::new(0.0, 0.0); MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: buf,
            dim: coords.len(),
        })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: [Complex64::new(0.0, 0.0); MAX_DIM],
            dim: dim.clamp(1, MAX_DIM),
        }
    }

    /// The point (x, 0, ..., 0).
    pub fn on_axis(dim: usize, x: f64) -> Self {
        let mut p = Self::origin(dim);
        p.coords[0] = Complex64::new(x, 0.0);
        p
    }

    /// Disc point r e^{i theta}.
    pub fn polar(r: f64, theta: f64) -> Self {
        let mut p = Self::origin(1);
        p.coords[0] = Complex64::from_polar(r, theta);
        p
    }

    pub(crate) fn from_array(coords: [Complex64; MAX_DIM], dim: usize) -> Self {
        Self { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords[..self.dim]
    }

    pub fn first(&self) -> Complex64 {
        self.coords[0]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords().iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Hermitian product sum_j z_j conj(w_j).
    pub fn inner(&self, other: &Point) -> Complex64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(z, w)| z * w.conj())
            .sum()
    }

    pub fn scaled(&self, c: f64) -> Point {
        let mut p = *self;
        for x in p.coords.iter_mut() {
            *x *= c;
        }
        p
    }

    pub fn sub(&self, other: &Point) -> Point {
        let mut p = *self;
        for (x, y) in p.coords.iter_mut().zip(other.coords.iter()) {
            *x -= y;
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Disc,
    Ball,
}

/// Unit disc (n = 1) or unit ball of C^n (n = 2, 3) with its closed-form Bergman kernel
/// K(z,w) = n!/pi^n (1 - <z,w>)^{-(n+1)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainModel {
    dim: usize,
    kind: DomainKind,
    kernel_constant: f64,
    series_degree: usize,
}

impl DomainModel {
    pub fn disc() -> Self {
        Self::with_dim(1)
    }

    pub fn ball(dim: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Config(format!("ball dimension {dim} not in 1..=3")));
        }
        Ok(Self::with_dim(dim))
    }

    fn with_dim(dim: usize) -> Self {
        let fact: f64 = (1..=dim).map(|k| k as f64).product();
        Self {
            dim,
            kind: if dim == 1 {
                DomainKind::Disc
            } else {
                DomainKind::Ball
            },
            kernel_constant: fact / PI.powi(dim as i32),
            series_degree: SERIES_DEGREE,
        }
    }

    pub fn with_series_degree(mut self, degree: usize) -> Self {
        self.series_degree = degree;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn series_degree(&self) -> usize {
        self.series_degree
    }

    /// n!/pi^n, the value K(0,0).
    pub fn kernel_constant(&self) -> f64 {
        self.kernel_constant
    }

    /// Lebesgue volume pi^n/n!.
    pub fn volume(&self) -> f64 {
        1.0 / self.kernel_constant
    }

    pub fn name(&self) -> &'static str {
        match self.dim {
            1 => "disc",
            2 => "ball2",
            _ => "ball3",
        }
    }

    fn check_closed(&self, z: &Point) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::InvalidPoint(format!(
                "point has dimension {}, domain {} has {}",
                z.dim(),
                self.name(),
                self.dim
            )));
        }
        let n2 = z.norm_sq();
        if n2 > 1.0 + 1e-14 {
            return Err(Error::InvalidPoint(format!(
                "|z|^2 = {n2} lies outside the closed unit ball"
            )));
        }
        Ok(())
    }

    /// Closed-form Bergman kernel.
    pub fn kernel(&self, z: &Point, w: &Point) -> Result<Complex64> {
        self.check_closed(z)?;
        self.check_closed(w)?;
        let base = Complex64::new(1.0, 0.0) - z.inner(w);
        if base.norm() == 0.0 {
            return Err(Error::InvalidPoint(
                "kernel is singular at coincident boundary points".into(),
            ));
        }
        Ok(self.kernel_unchecked(z, w))
    }

    /// Kernel without domain checks, for inner loops over validated nodes.
    #[inline]
    pub fn kernel_unchecked(&self, z: &Point, w: &Point) -> Complex64 {
        self.kernel_of_inner(z.inner(w))
    }

    /// K as a function of the Hermitian product t = <z,w>.
    #[inline]
    pub fn kernel_of_inner(&self, t: Complex64) -> Complex64 {
        let base = Complex64::new(1.0, 0.0) - t;
        let inv = base.inv();
        let pow = match self.dim {
            1 => inv * inv,
            2 => inv * inv * inv,
            _ => {
                let sq = inv * inv;
                sq * sq
            }
        };
        pow * self.kernel_constant
    }

    /// |K(z,w)| as a function of t = <z,w>.
    #[inline]
    pub fn kernel_modulus_of_inner(&self, t: Complex64) -> f64 {
        let base = (Complex64::new(1.0, 0.0) - t).norm();
        self.kernel_constant * base.powi(-(self.dim as i32 + 1))
    }

    /// Truncated orthonormal-series oracle sum_{|m| <= degree} z^m conj(w^m) / ||w^m||^2,
    /// summed over explicit multi-indices.
    pub fn kernel_series(&self, z: &Point, w: &Point, degree: usize) -> Result<Complex64> {
        self.check_closed(z)?;
        self.check_closed(w)?;
        let n = self.dim;
        let prods: Vec<Complex64> = z
            .coords()
            .iter()
            .zip(w.coords())
            .map(|(a, b)| a * b.conj())
            .collect();
        let powers: Vec<Vec<Complex64>> = prods
            .iter()
            .map(|&p| {
                let mut v = Vec::with_capacity(degree + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=degree {
                    v.push(acc);
                    acc *= p;
                }
                v
            })
            .collect();
        let binom = pascal(degree);
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..=degree {
            // ||w^m||^2 = pi^n m! / (n+|m|)!, so 1/||w^m||^2 = (k+1)..(k+n)/pi^n * k!/m! / k!
            let rising: f64 = (1..=n).map(|j| (k + j) as f64).product();
            let lead = rising * self.kernel_constant / (1..=n).map(|j| j as f64).product::<f64>();
            let mut shell = Complex64::new(0.0, 0.0);
            match n {
                1 => shell = powers[0][k],
                2 => {
                    for m1 in 0..=k {
                        shell += powers[0][m1] * powers[1][k - m1] * binom[k][m1];
                    }
                }
                _ => {
                    for m1 in 0..=k {
                        for m2 in 0..=(k - m1) {
                            let coef = binom[k][m1] * binom[k - m1][m2];
                            shell += powers[0][m1] * powers[1][m2] * powers[2][k - m1 - m2] * coef;
                        }
                    }
                }
            }
            total += shell * lead;
        }
        Ok(total)
    }

    /// Series oracle at the model's configured degree.
    pub fn kernel_series_default(&self, z: &Point, w: &Point) -> Result<Complex64> {
        self.kernel_series(z, w, self.series_degree)
    }

    /// K(z,z) for interior z with d(z) >= BOUNDARY_CLAMP.
    pub fn kernel_diag(&self, z: &Point) -> Result<f64> {
        self.check_closed(z)?;
        let d = self.boundary_distance(z);
        if d < BOUNDARY_CLAMP {
            return Err(Error::InvalidPoint(format!(
                "d(z) = {d:e} is below the boundary clamp {BOUNDARY_CLAMP:e}"
            )));
        }
        Ok(self.diag_from_distance(d))
    }

    /// K(z,z) expressed through d = 1 - |z|, avoiding cancellation in 1 - |z|^2.
    #[inline]
    pub fn diag_from_distance(&self, d: f64) -> f64 {
        self.kernel_constant * (d * (2.0 - d)).powi(-(self.dim as i32 + 1))
    }

    /// 1 - |z|, floored at zero.
    pub fn boundary_distance(&self, z: &Point) -> f64 {
        (1.0 - z.norm()).max(0.0)
    }

    /// Exponent e with K(z,z) ~ d(z)^{-e}; equals n+1 on the ball family.
    pub fn diag_blowup_exponent(&self) -> f64 {
        (self.dim + 1) as f64
    }

    /// inf over interior z of d(z)^2 K(z,z). On the disc the infimum is the boundary limit
    /// c/4; for n >= 2 it is attained at d = (n-1)/n.
    pub fn diag_lower_constant(&self) -> f64 {
        let n = self.dim as f64;
        if self.dim == 1 {
            return self.kernel_constant / 4.0;
        }
        let d = (n - 1.0) / n;
        d * d * self.diag_from_distance(d)
    }
}

impl FromStr for DomainModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disc" | "disk" | "ball1" => Ok(Self::disc()),
            "ball2" => Self::ball(2),
            "ball3" => Self::ball(3),
            other => Err(Error::Config(format!(
                "unknown domain '{other}' (expected disc, ball2 or ball3)"
            ))),
        }
    }
}

impl fmt::Display for DomainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for DomainModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DomainModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn pascal(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = rows[k - 1][j - 1] + rows[k - 1][j];
        }
        rows.push(row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_kernel_values() {
        let d = DomainModel::disc();
        let o = Point::origin(1);
        assert_relative_eq!(d.kernel(&o, &o).unwrap().re, 0.318310, epsilon = 1e-6);
        let h = Point::on_axis(1, 0.5);
        assert_relative_eq!(d.kernel(&h, &h).unwrap().re, 0.565884, epsilon = 1e-6);
        let s = d.kernel_series(&h, &h, 200).unwrap();
        assert_relative_eq!(s.re, 0.565884, epsilon = 1e-6);
    }

    #[test]
    fn diag_values() {
        let b2 = DomainModel::ball(2).unwrap();
        assert_relative_eq!(
            b2.kernel_diag(&Point::origin(2)).unwrap(),
            0.202642,
            epsilon = 1e-6
        );
        let d = DomainModel::disc();
        let z9 = Point::on_axis(1, 0.9);
        assert_relative_eq!(d.kernel_diag(&z9).unwrap(), 8.817448, epsilon = 1e-6);
        let series = d.kernel_series(&z9, &z9, 400).unwrap();
        assert_relative_eq!(series.re, 8.817448, epsilon = 1e-6);
        assert!(d.kernel_diag(&Point::on_axis(1, 0.99)).unwrap() > 8.817448);
    }

    #[test]
    fn distances() {
        let d = DomainModel::disc();
        assert_relative_eq!(d.boundary_distance(&Point::on_axis(1, 0.3)), 0.7);
        let b2 = DomainModel::ball(2).unwrap();
        assert_relative_eq!(b2.boundary_distance(&Point::on_axis(2, 0.6)), 0.4);
        assert_eq!(d.boundary_distance(&Point::polar(1.0, 0.7)), 0.0);
    }

    #[test]
    fn rejects_exterior_and_clamped_points() {
        let d = DomainModel::disc();
        let out = Point::on_axis(1, 1.2);
        assert!(matches!(
            d.kernel(&out, &Point::origin(1)),
            Err(Error::InvalidPoint(_))
        ));
        assert!(matches!(
            d.kernel_diag(&Point::on_axis(1, 1.0 - 1e-8)),
            Err(Error::InvalidPoint(_))
        ));
        assert!(d.kernel(&Point::origin(2), &Point::origin(1)).is_err());
    }

    #[test]
    fn diag_lower_constant_is_positive() {
        assert_relative_eq!(
            DomainModel::disc().diag_lower_constant(),
            0.25 / PI,
            epsilon = 1e-12
        );
        let b2 = DomainModel::ball(2).unwrap();
        assert_relative_eq!(
            b2.diag_lower_constant(),
            2.0 / (PI * PI * 1.6875),
            epsilon = 1e-12
        );
        for dom in [DomainModel::disc(), b2, DomainModel::ball(3).unwrap()] {
            let c = dom.diag_lower_constant();
            for i in 0..=600 {
                let d = 10f64.powf(-6.0 * i as f64 / 600.0);
                assert!(d * d * dom.diag_from_distance(d) >= c * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn ball3_series_matches_closed_form() {
        let b3 = DomainModel::ball(3).unwrap();
        let z = Point::new(&[c(0.3, 0.1), c(-0.2, 0.4), c(0.1, -0.3)]).unwrap();
        let w = Point::new(&[c(0.5, -0.2), c(0.1, 0.1), c(-0.4, 0.2)]).unwrap();
        let exact = b3.kernel(&z, &w).unwrap();
        let series = b3.kernel_series(&z, &w, 120).unwrap();
        assert!((exact - series).norm() / exact.norm() < 1e-10);
    }

    #[test]
    fn parse_names() {
        assert_eq!("ball2".parse::<DomainModel>().unwrap().dim(), 2);
        assert_eq!(DomainModel::disc().to_string(), "disc");
        assert!("annulus".parse::<DomainModel>().is_err());
    }

    fn point_in_ball(dim: usize, max_norm: f64) -> impl Strategy<Value = Point> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_flat_map(move |raw| {
            (0.0f64..max_norm).prop_map(move |radius| {
                let v: Vec<Complex64> = raw.iter().map(|&(a, b)| c(a, b)).collect();
                let n: f64 = v
                    .iter()
                    .map(|x| x.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    .max(1e-12);
                let scaled: Vec<Complex64> = v.iter().map(|x| x * (radius / n)).collect();
                Point::new(&scaled).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(
            (z, w) in (1usize..=3).prop_flat_map(|d| (point_in_ball(d, 0.99), point_in_ball(d, 0.99)))
        ) {
            let dom = DomainModel::ball(z.dim()).unwrap();
            let kzw = dom.kernel(&z, &w).unwrap();
            let kwz = dom.kernel(&w, &z).unwrap();
            prop_assert!((kzw - kwz.conj()).norm() <= 1e-12 * kzw.norm().max(1.0));
        }

        #[test]
        fn series_oracle_agrees_on_disc(z in point_in_ball(1, 0.9), w in point_in_ball(1, 0.9)) {
            let dom = DomainModel::disc();
            let exact = dom.kernel(&z, &w).unwrap();
            let series = dom.kernel_series(&z, &w, 200).unwrap();
            prop_assert!((exact - series).norm() / exact.norm() < 1e-8);
        }

        #[test]
        fn series_oracle_agrees_on_ball2(z in point_in_ball(2, 0.9), w in point_in_ball(2, 0.9)) {
            let dom = DomainModel::ball(2).unwrap();
            let exact = dom.kernel(&z, &w).unwrap();
            let series = dom.kernel_series(&z, &w, 200).unwrap();
            prop_assert!((exact - series).norm() / exact.norm() < 1e-8);
        }

        #[test]
        fn diag_is_real_positive(z in point_in_ball(2, 0.999)) {
            let dom = DomainModel::ball(2).unwrap();
            let k = dom.kernel(&z, &z).unwrap();
            let kd = dom.kernel_diag(&z).unwrap();
            prop_assert!(kd > 0.0);
            prop_assert!(k.im.abs() <= 1e-12 * kd);
            prop_assert!((k.re - kd).abs() <= 1e-9 * kd);
        }
    }
}
