//! Gauss-Legendre rules and composite panel rules.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on the three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Reference rule on [0, 1].
#[derive(Clone, Debug)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self {
            nodes: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            weights: w.iter().map(|t| 0.5 * t).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Append the rule mapped to [a, b].
    pub fn push_panel(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let h = b - a;
        out.extend(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(u, w)| (a + h * u, h * w)),
        );
    }

    /// Append a panel on [0, b] graded toward 0 by s = b u^kappa.
    pub fn push_graded(&self, b: f64, kappa: f64, out: &mut Vec<(f64, f64)>) {
        out.extend(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(u, w)| (b * u.powf(kappa), b * kappa * u.powf(kappa - 1.0) * w)),
        );
    }
}

/// Grading exponent of the innermost panel next to an endpoint.
pub const ENDPOINT_GRADING: f64 = 6.0;

/// Composite rule on [0, top] in a variable that may be singular at 0: dyadic panels down to
/// `floor`, then a graded panel. Extra breakpoints inside (0, top) are honoured.
pub fn dyadic_toward_zero(
    top: f64,
    floor: f64,
    breaks: &[f64],
    rule: &UnitRule,
    graded: &UnitRule,
) -> Vec<(f64, f64)> {
    let mut edges = vec![top];
    let mut b = top;
    let floor = floor.min(top * 0.5).max(f64::MIN_POSITIVE);
    while b * 0.5 > floor {
        b *= 0.5;
        edges.push(b);
    }
    for &c in breaks {
        if c > 0.0 && c < top && edges.iter().all(|e| (e - c).abs() > 1e-15 * top) {
            edges.push(c);
        }
    }
    edges.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut out = Vec::with_capacity(edges.len() * rule.len() + graded.len());
    for pair in edges.windows(2) {
        rule.push_panel(pair[1], pair[0], &mut out);
    }
    let last = *edges.last().unwrap();
    graded.push_graded(last, ENDPOINT_GRADING, &mut out);
    out
}
