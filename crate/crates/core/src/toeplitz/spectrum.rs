use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GridSpec;

/// Where a spectrum came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSource {
    Nystrom { grid: GridSpec, weight: f64 },
    Galerkin { degree: usize },
}

/// Singular values in nonincreasing order, each with a multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    multiplicities: Vec<u64>,
    pub source: SpectrumSource,
}

impl SingularSpectrum {
    pub fn new(values: Vec<f64>, source: SpectrumSource) -> Result<Self> {
        let m = vec![1; values.len()];
        Self::with_multiplicities(values, m, source)
    }

    /// Sorts the pairs by value, largest first.
    pub fn with_multiplicities(
        values: Vec<f64>,
        multiplicities: Vec<u64>,
        source: SpectrumSource,
    ) -> Result<Self> {
        if values.len() != multiplicities.len() {
            return Err(Error::Config(
                "values and multiplicities differ in length".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Conditioning(format!(
                "singular value {v} is not finite and >= 0"
            )));
        }
        let mut pairs: Vec<(f64, u64)> = values.into_iter().zip(multiplicities).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (values, multiplicities) = pairs.into_iter().unzip();
        Ok(Self {
            values,
            multiplicities,
            source,
        })
    }

    /// Distinct values (repeated per multiplicity only when the source repeats them).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// Number of singular values counted with multiplicity.
    pub fn count(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// The first `k` singular values with multiplicity expanded.
    pub fn leading(&self, k: usize) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(v, m)| std::iter::repeat_n(*v, *m as usize))
            .take(k)
            .collect()
    }

    /// sum of sigma^s over the first `n` singular values counted with multiplicity.
    pub fn partial_sum(&self, s: f64, n: u64) -> f64 {
        let mut left = n;
        let mut total = 0.0;
        for (v, m) in self.values.iter().zip(&self.multiplicities) {
            if left == 0 {
                break;
            }
            let take = left.min(*m);
            total += take as f64 * v.powf(s);
            left -= take;
        }
        total
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_sums() {
        let s = SingularSpectrum::with_multiplicities(
            vec![0.5, 1.0, 0.25],
            vec![2, 1, 3],
            SpectrumSource::Galerkin { degree: 2 },
        )
        .unwrap();
        assert!(s.is_nonincreasing());
        assert_eq!(s.count(), 6);
        assert_eq!(s.leading(4), vec![1.0, 0.5, 0.5, 0.25]);
        assert_eq!(s.partial_sum(1.0, 2), 1.5);
        assert_eq!(s.partial_sum(2.0, 100), 1.0 + 0.5 + 3.0 / 16.0);
        assert!(
            SingularSpectrum::new(vec![f64::NAN], SpectrumSource::Galerkin { degree: 0 }).is_err()
        );
    }
}
