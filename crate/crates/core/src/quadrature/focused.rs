//! Rules focused at an interior point (x, 0, ..., 0), x >= 0, for integrands of the form
//! H(w_1) G(d(w)). On the disc this is an ordinary two-dimensional rule. On the balls the
//! remaining variables are integrated out exactly per ring:
//! dV(w) = dA(w_1) |S^{2n-3}| (r^2 - |w_1|^2)^{n-2} r dr with r = |w| >= |w_1|.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gauss::{dyadic_toward_zero, UnitRule};
use super::{GridSpec, Layout, QuadGrid};
use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};

/// Dyadic refinement stops at (1 - x) * OUTER_FLOOR so that the graded end panel stays far
/// from the kernel singularity at s = -(1 - x) relative to its own length.
const OUTER_FLOOR: f64 = 1.0 / 65536.0;

#[derive(Clone, Debug)]
pub struct FocusRing {
    /// 1 - |w_1| (exact, not clamped).
    pub distance: f64,
    /// |w_1| used for evaluation, kept strictly inside the unit circle.
    pub radius: f64,
    /// |w_1| ds.
    pub weight: f64,
    /// (e^{i theta}, weight) pairs.
    pub angles: Vec<(Complex64, f64)>,
    /// Ball only: (d(w), weight) pairs integrating the remaining variables.
    pub inner: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct FocusedRule {
    dim: usize,
    center: f64,
    spec: GridSpec,
    rings: Vec<FocusRing>,
}

impl FocusedRule {
    /// Rule focused at (x, 0, ..., 0).
    pub fn new(domain: &DomainModel, spec: &GridSpec, x: f64) -> Result<Self> {
        Self::with_breaks(domain, spec, x, &[])
    }

    /// Like [`FocusedRule::new`], with panel edges at the given boundary distances so that
    /// G may jump there.
    pub fn with_breaks(
        domain: &DomainModel,
        spec: &GridSpec,
        x: f64,
        breaks: &[f64],
    ) -> Result<Self> {
        spec.validate()?;
        if !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidPoint(format!(
                "focus center {x} must lie in [0, 1)"
            )));
        }
        let dim = domain.dim();
        let n_p = (spec.n_r / 8).max(4);
        let rule = UnitRule::new(n_p);
        let graded = UnitRule::new(2 * n_p);
        let eps = 1.0 - x;
        let outer = dyadic_toward_zero(
            1.0,
            eps * OUTER_FLOOR,
            if dim == 1 { breaks } else { &[] },
            &rule,
            &graded,
        );
        let n_ang = (spec.n_theta / 4).max(12);
        let sphere = if dim >= 2 {
            // |S^{2n-3}| = 2 pi^{n-1} / (n-2)!
            2.0 * PI.powi(dim as i32 - 1) / (1..=dim - 2).map(|k| k as f64).product::<f64>()
        } else {
            0.0
        };
        let rings = outer
            .into_iter()
            .map(|(s, ws)| {
                let rho = 1.0 - s;
                let angles = angular_rule(x * rho, spec.n_theta, n_ang);
                let inner = if dim >= 2 {
                    dyadic_toward_zero(s, s / 16.0, breaks, &rule, &graded)
                        .into_iter()
                        .map(|(t, wt)| {
                            let r = 1.0 - t;
                            let slab = (r * r - rho * rho).max(0.0).powi(dim as i32 - 2);
                            (t, wt * sphere * slab * r)
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                FocusRing {
                    distance: s,
                    radius: rho.min(1.0 - f64::EPSILON),
                    weight: rho * ws,
                    angles,
                    inner,
                }
            })
            .collect();
        Ok(Self {
            dim,
            center: x,
            spec: *spec,
            rings,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rings(&self) -> &[FocusRing] {
        &self.rings
    }

    pub fn node_count(&self) -> usize {
        self.rings
            .iter()
            .map(|r| r.angles.len() * r.inner.len().max(1))
            .sum()
    }

    /// Integral of h(w_1) g(d(w)) over the domain.
    pub fn integrate<H, G>(&self, h: H, g: G) -> f64
    where
        H: Fn(Complex64) -> f64,
        G: Fn(f64) -> f64,
    {
        self.rings
            .iter()
            .map(|ring| {
                let radial = self.radial_factor(ring, &g);
                if radial == 0.0 {
                    return 0.0;
                }
                let ang: f64 = ring
                    .angles
                    .iter()
                    .map(|(e, w)| w * h(e * ring.radius))
                    .sum();
                ring.weight * radial * ang
            })
            .sum()
    }

    /// Complex-valued variant of [`FocusedRule::integrate`].
    pub fn integrate_complex<H, G>(&self, h: H, g: G) -> Complex64
    where
        H: Fn(Complex64) -> Complex64,
        G: Fn(f64) -> f64,
    {
        self.rings
            .iter()
            .map(|ring| {
                let radial = self.radial_factor(ring, &g);
                let ang: Complex64 = ring
                    .angles
                    .iter()
                    .map(|(e, w)| h(e * ring.radius) * *w)
                    .sum();
                ang * (ring.weight * radial)
            })
            .sum()
    }

    fn radial_factor<G: Fn(f64) -> f64>(&self, ring: &FocusRing, g: &G) -> f64 {
        if self.dim == 1 {
            g(ring.distance)
        } else {
            ring.inner.iter().map(|(d, w)| w * g(*d)).sum()
        }
    }

    /// Materialize a disc rule as an ordinary node grid.
    pub fn to_grid(&self) -> Result<QuadGrid> {
        if self.dim != 1 {
            return Err(Error::Unsupported(
                "only disc focused rules expand to node grids".into(),
            ));
        }
        let mut nodes = Vec::with_capacity(self.node_count());
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut distances = Vec::with_capacity(nodes.capacity());
        for ring in &self.rings {
            for (e, w) in &ring.angles {
                let v = e * ring.radius;
                nodes.push(Point::polar(v.norm(), v.arg()));
                weights.push(ring.weight * w);
                distances.push(ring.distance);
            }
        }
        Ok(QuadGrid::from_parts(
            1,
            self.spec,
            nodes,
            weights,
            distances,
            Layout::Focused,
            PI * 1e-12,
        ))
    }
}

/// Rule on the circle for integrands peaked at theta = 0 with width about
/// (1 - rho)/sqrt(rho): dyadic panels toward 0, or the plain trapezoid when the peak is wide.
fn angular_rule(rho: f64, n_theta: usize, n_panel: usize) -> Vec<(Complex64, f64)> {
    let width = if rho > 0.0 {
        (1.0 - rho) / rho.sqrt()
    } else {
        f64::INFINITY
    };
    if width >= 0.5 {
        let dt = 2.0 * PI / n_theta as f64;
        return (0..n_theta)
            .map(|k| (Complex64::from_polar(1.0, dt * k as f64), dt))
            .collect();
    }
    let mut edges = vec![PI];
    while edges.last().unwrap() * 0.5 > width / 8.0 {
        let e = edges.last().unwrap() * 0.5;
        edges.push(e);
    }
    edges.push(0.0);
    let mut half = Vec::new();
    for pair in edges.windows(2) {
        let len = pair[0] - pair[1];
        let count = ((n_theta as f64 * len / (2.0 * PI)).ceil() as usize + 2).max(n_panel);
        UnitRule::new(count).push_panel(pair[1], pair[0], &mut half);
    }
    let mut out = Vec::with_capacity(2 * half.len());
    for (t, w) in half {
        out.push((Complex64::from_polar(1.0, t), w));
        out.push((Complex64::from_polar(1.0, -t), w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn disc_kernel_sq_mass(x: f64, spec: &GridSpec) -> f64 {
        let disc = DomainModel::disc();
        let rule = FocusedRule::new(&disc, spec, x).unwrap();
        let c = disc.kernel_constant();
        rule.integrate(
            |v| {
                let m = disc.kernel_modulus_of_inner(v * x);
                m * m / (c * c) * c * c
            },
            |_| 1.0,
        )
    }

    #[test]
    fn volumes() {
        for (dom, vol) in [
            (DomainModel::disc(), PI),
            (DomainModel::ball(2).unwrap(), PI * PI / 2.0),
            (DomainModel::ball(3).unwrap(), PI.powi(3) / 6.0),
        ] {
            for x in [0.0, 0.5, 0.999] {
                let rule = FocusedRule::new(&dom, &GridSpec::default(), x).unwrap();
                assert_relative_eq!(rule.integrate(|_| 1.0, |_| 1.0), vol, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn reproducing_mass_near_boundary() {
        // int |K(z,w)|^2 dV = K(z,z)
        let disc = DomainModel::disc();
        for d in [0.5, 1e-2, 1e-3] {
            let got = disc_kernel_sq_mass(1.0 - d, &GridSpec::new(80, 64));
            let want = disc.diag_from_distance(d);
            assert!((got / want - 1.0).abs() < 1e-9, "d = {d}: {}", got / want);
        }
        let b2 = DomainModel::ball(2).unwrap();
        for d in [0.5, 1e-3] {
            let x = 1.0 - d;
            let rule = FocusedRule::new(&b2, &GridSpec::new(80, 64), x).unwrap();
            let got = rule.integrate(|v| b2.kernel_modulus_of_inner(v * x).powi(2), |_| 1.0);
            assert!((got / b2.diag_from_distance(d) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn weighted_radial_moments_on_ball() {
        // int_B d(w)^a dV = 2 pi^2 B(a+1, 4) on the ball of C^2
        let b2 = DomainModel::ball(2).unwrap();
        let rule = FocusedRule::new(&b2, &GridSpec::default(), 0.9).unwrap();
        let a: f64 = -0.5;
        let got = rule.integrate(|_| 1.0, |d| d.powf(a));
        // B(1/2, 4) = Gamma(1/2) Gamma(4) / Gamma(9/2)
        let beta = 6.0 / ((0.5 * 1.5 * 2.5 * 3.5) as f64);
        assert_relative_eq!(got, 2.0 * PI * PI * beta, epsilon = 1e-9);
    }

    #[test]
    fn grid_expansion_matches_rule() {
        let disc = DomainModel::disc();
        let rule = FocusedRule::new(&disc, &GridSpec::new(40, 32), 0.95).unwrap();
        let grid = rule.to_grid().unwrap();
        assert_eq!(grid.len(), rule.node_count());
        assert_relative_eq!(grid.weight_sum(), PI, epsilon = 1e-11);
        assert!(
            FocusedRule::new(&DomainModel::ball(2).unwrap(), &GridSpec::default(), 0.2)
                .unwrap()
                .to_grid()
                .is_err()
        );
    }
}
