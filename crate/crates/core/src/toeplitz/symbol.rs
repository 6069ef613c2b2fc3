//! Symbols psi(w) = scale * K(w,w)^{-alpha} d(w)^beta, optionally restricted to a boundary
//! shell or its complement, and node-sampled symbols.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainModel, Point};
use crate::error::{Error, Result};
use crate::quadrature::QuadGrid;

/// Restriction of a radial symbol by boundary distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Full,
    /// Keep d(w) < cut, the part outside Q = {d >= cut}.
    Tail {
        cut: f64,
    },
    /// Keep d(w) >= cut, the part on Q.
    Core {
        cut: f64,
    },
}

impl Window {
    fn contains(&self, d: f64) -> bool {
        match *self {
            Window::Full => true,
            Window::Tail { cut } => d < cut,
            Window::Core { cut } => d >= cut,
        }
    }

    fn cut(&self) -> Option<f64> {
        match *self {
            Window::Full => None,
            Window::Tail { cut } | Window::Core { cut } => Some(cut),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSymbol {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
    pub window: Window,
}

impl RadialSymbol {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::admissibility(format!(
                "need alpha, beta >= 0, got ({alpha}, {beta})"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            scale: 1.0,
            window: Window::Full,
        })
    }

    /// psi = 1, the symbol of the Bergman projection.
    pub fn one() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            scale: 1.0,
            window: Window::Full,
        }
    }

    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::admissibility(format!("scale must be >= 0, got {c}")));
        }
        self.scale *= c;
        Ok(self)
    }

    pub fn windowed(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    /// psi as a function of the boundary distance.
    pub fn at_distance(&self, domain: &DomainModel, d: f64) -> f64 {
        if !self.window.contains(d) || self.scale == 0.0 {
            return 0.0;
        }
        let mut v = self.scale;
        if self.alpha != 0.0 {
            v *= domain.diag_from_distance(d).powf(-self.alpha);
        }
        if self.beta != 0.0 {
            v *= d.powf(self.beta);
        }
        v
    }

    /// psi^2, again of the same form.
    pub fn squared(&self) -> Self {
        Self {
            alpha: 2.0 * self.alpha,
            beta: 2.0 * self.beta,
            scale: self.scale * self.scale,
            window: self.window,
        }
    }

    /// psi^t for t > 0.
    pub fn power(&self, t: f64) -> Self {
        Self {
            alpha: t * self.alpha,
            beta: t * self.beta,
            scale: self.scale.powf(t),
            window: self.window,
        }
    }

    /// Distances where psi jumps.
    pub fn breaks(&self) -> Vec<f64> {
        self.window.cut().into_iter().collect()
    }

    /// Limit of psi at the boundary.
    pub fn boundary_limit(&self) -> f64 {
        let keeps_boundary = !matches!(self.window, Window::Core { cut } if cut > 0.0);
        if keeps_boundary && self.alpha == 0.0 && self.beta == 0.0 {
            self.scale
        } else {
            0.0
        }
    }

    /// (n+1) alpha + beta: psi ~ d^rho at the boundary.
    pub fn boundary_order(&self, domain: &DomainModel) -> f64 {
        (domain.dim() + 1) as f64 * self.alpha + self.beta
    }

    /// Complementary pieces at level `cut`: (core on {d >= cut}, tail on {d < cut}).
    pub fn split(&self, cut: f64) -> Result<(Self, Self)> {
        if !matches!(self.window, Window::Full) {
            return Err(Error::Unsupported("only full symbols can be split".into()));
        }
        if !(cut >= 0.0) {
            return Err(Error::Config(format!("cut level {cut} must be >= 0")));
        }
        Ok((
            self.windowed(Window::Core { cut }),
            self.windowed(Window::Tail { cut }),
        ))
    }
}

/// Nonnegative symbol given by its values at the nodes of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSymbol {
    values: Vec<f64>,
    ess_sup: f64,
}

impl SampledSymbol {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::admissibility(format!(
                "sampled symbol values must be finite and >= 0, found {v}"
            )));
        }
        let ess_sup = values.iter().copied().fold(0.0, f64::max);
        Ok(Self { values, ess_sup })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ess_sup(&self) -> f64 {
        self.ess_sup
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolSpec {
    Radial(RadialSymbol),
    Sampled(SampledSymbol),
}

impl SymbolSpec {
    pub fn radial(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self::Radial(RadialSymbol::new(alpha, beta)?))
    }

    pub fn as_radial(&self) -> Result<&RadialSymbol> {
        match self {
            Self::Radial(r) => Ok(r),
            Self::Sampled(_) => Err(Error::Unsupported(
                "operation needs a radial (alpha, beta) symbol".into(),
            )),
        }
    }

    /// psi at an interior point. Sampled symbols only have node values, see
    /// [`SymbolSpec::on_grid`].
    pub fn eval(&self, domain: &DomainModel, w: &Point) -> Result<f64> {
        domain.kernel_diag(w)?;
        Ok(self
            .as_radial()?
            .at_distance(domain, domain.boundary_distance(w)))
    }

    /// Values of psi at the grid nodes.
    pub fn on_grid(&self, domain: &DomainModel, grid: &QuadGrid) -> Result<Vec<f64>> {
        match self {
            Self::Radial(r) => Ok(grid
                .distances()
                .iter()
                .map(|&d| r.at_distance(domain, d))
                .collect()),
            Self::Sampled(s) => {
                if s.values.len() != grid.len() {
                    return Err(Error::Config(format!(
                        "sampled symbol has {} values for a grid of {} nodes",
                        s.values.len(),
                        grid.len()
                    )));
                }
                Ok(s.values.clone())
            }
        }
    }

    /// The part of the symbol outside Q_m = {d >= eps_m}.
    pub fn tail(
        &self,
        exhaustion: &ExhaustionSpec,
        m: usize,
        grid: Option<&QuadGrid>,
    ) -> Result<Self> {
        self.restrict(exhaustion.level(m)?, true, grid)
    }

    /// The part of the symbol on Q_m.
    pub fn core(
        &self,
        exhaustion: &ExhaustionSpec,
        m: usize,
        grid: Option<&QuadGrid>,
    ) -> Result<Self> {
        self.restrict(exhaustion.level(m)?, false, grid)
    }

    fn restrict(&self, cut: f64, tail: bool, grid: Option<&QuadGrid>) -> Result<Self> {
        match self {
            Self::Radial(r) => {
                let (c, t) = r.split(cut)?;
                Ok(Self::Radial(if tail { t } else { c }))
            }
            Self::Sampled(s) => {
                let grid = grid.ok_or_else(|| {
                    Error::Config("truncating a sampled symbol needs its grid".into())
                })?;
                if grid.len() != s.values.len() {
                    return Err(Error::Config(
                        "sampled symbol and grid differ in size".into(),
                    ));
                }
                let values = s
                    .values
                    .iter()
                    .zip(grid.distances())
                    .map(|(v, &d)| if (d < cut) == tail { *v } else { 0.0 })
                    .collect();
                Ok(Self::Sampled(SampledSymbol::new(values)?))
            }
        }
    }
}

/// Cut levels eps_1 > eps_2 > ... > 0 of the exhaustion Q_m = {d >= eps_m}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionSpec {
    levels: Vec<f64>,
    label: String,
}

impl Default for ExhaustionSpec {
    fn default() -> Self {
        Self::geometric(2.0, 2, 9).expect("valid default exhaustion")
    }
}

impl ExhaustionSpec {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::Config(
                "an exhaustion needs at least two levels".into(),
            ));
        }
        if levels.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::Config("exhaustion levels must lie in (0, 1]".into()));
        }
        if levels.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config(
                "exhaustion levels must strictly decrease".into(),
            ));
        }
        let label = format!("{levels:?}");
        Ok(Self { levels, label })
    }

    /// eps_m = base^{-m} for m = first..=last.
    pub fn geometric(base: f64, first: u32, last: u32) -> Result<Self> {
        if !(base > 1.0) || last <= first {
            return Err(Error::Config(format!(
                "need base > 1 and first < last, got {base}, {first}..{last}"
            )));
        }
        let levels = (first..=last).map(|m| base.powi(-(m as i32))).collect();
        let mut e = Self::new(levels)?;
        e.label = format!("{base}^-m:{first}..{last}");
        Ok(e)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// eps_m for the 0-based position m.
    pub fn level(&self, m: usize) -> Result<f64> {
        self.levels.get(m).copied().ok_or_else(|| {
            Error::Config(format!(
                "level {m} outside an exhaustion of {}",
                self.levels.len()
            ))
        })
    }
}

impl FromStr for ExhaustionSpec {
    type Err = Error;

    /// "B^-m:i..j" (e.g. "2^-m:2..9") or a comma-separated list of levels.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((base, range)) = s.split_once("^-m:") {
            let bad = || Error::Config(format!("cannot parse exhaustion '{s}'"));
            let base: f64 = base.trim().parse().map_err(|_| bad())?;
            let (i, j) = range.split_once("..").ok_or_else(bad)?;
            let i: u32 = i.trim().parse().map_err(|_| bad())?;
            let j: u32 = j
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            return Self::geometric(base, i, j);
        }
        let levels = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("cannot parse exhaustion level '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels)
    }
}

impl fmt::Display for ExhaustionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
