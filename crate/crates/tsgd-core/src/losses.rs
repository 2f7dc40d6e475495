//! Pinball (quantile) loss, its subgradient, the multi-horizon multi-quantile
//! total loss, and mean squared error.
//!
//! All functions here are stateless and per-step; accumulation over time
//! belongs to the experiment harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonempty, strictly increasing set of quantile levels in `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuantileSet {
    quantiles: Vec<f64>,
}

impl QuantileSet {
    pub fn new(quantiles: Vec<f64>) -> Result<Self> {
        if quantiles.is_empty() {
            return Err(Error::Domain("quantile set must be nonempty".into()));
        }
        for &q in &quantiles {
            check_quantile(q)?;
        }
        if !quantiles.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "quantiles must be strictly increasing, got {quantiles:?}"
            )));
        }
        Ok(QuantileSet { quantiles })
    }

    pub fn len(&self) -> usize {
        self.quantiles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.quantiles
    }
}

impl TryFrom<Vec<f64>> for QuantileSet {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        QuantileSet::new(v)
    }
}

impl From<QuantileSet> for Vec<f64> {
    fn from(qs: QuantileSet) -> Vec<f64> {
        qs.quantiles
    }
}

/// Predictions over the full horizon x quantile grid for one forecast origin.
///
/// Horizon `k` is 1-based; cell `(k, qi)` holds the prediction of quantile
/// `quantiles[qi]` at horizon `k`. Dense storage guarantees every grid cell
/// is present exactly once.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileForecast {
    horizons: usize,
    quantiles: QuantileSet,
    values: Vec<f64>,
}

impl QuantileForecast {
    pub fn new(horizons: usize, quantiles: QuantileSet, values: Vec<f64>) -> Result<Self> {
        let expected = horizons * quantiles.len();
        if values.len() != expected {
            return Err(Error::Dimension {
                what: "quantile forecast grid",
                expected,
                got: values.len(),
            });
        }
        Ok(QuantileForecast {
            horizons,
            quantiles,
            values,
        })
    }

    pub fn horizons(&self) -> usize {
        self.horizons
    }

    pub fn quantiles(&self) -> &QuantileSet {
        &self.quantiles
    }

    /// Prediction for 1-based horizon `k` and quantile index `qi`.
    pub fn value(&self, k: usize, qi: usize) -> f64 {
        self.values[(k - 1) * self.quantiles.len() + qi]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

fn check_quantile(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("quantile must lie in (0, 1), got {q}")));
    }
    Ok(())
}

/// Pinball loss `q*max(y - y_hat, 0) + (1-q)*max(y_hat - y, 0)`.
///
/// Non-finite inputs propagate to a non-finite result.
pub fn quantile_loss(y: f64, y_hat: f64, q: f64) -> Result<f64> {
    check_quantile(q)?;
    let diff = y - y_hat;
    // Branch form keeps NaN propagating; f64::max would swallow it.
    Ok(if diff >= 0.0 { q * diff } else { (q - 1.0) * diff })
}

/// A subgradient of the pinball loss with respect to `y_hat`.
///
/// Returns `-q` when underpredicting, `1-q` when overpredicting, and `0`
/// at the kink (a valid element of `[-q, 1-q]`, symmetric tie convention).
pub fn quantile_loss_subgrad(y: f64, y_hat: f64, q: f64) -> Result<f64> {
    check_quantile(q)?;
    Ok(if y_hat < y {
        -q
    } else if y_hat > y {
        1.0 - q
    } else {
        0.0
    })
}

/// Sum of pinball losses over the horizon x quantile grid for one origin.
///
/// `targets[k-1]` is the true value at horizon `k`. The sum is raw (no
/// averaging); any normalization is applied by metrics code with an explicit
/// divisor.
pub fn total_quantile_loss(targets: &[f64], forecast: &QuantileForecast) -> Result<f64> {
    if targets.len() != forecast.horizons() {
        return Err(Error::Dimension {
            what: "total_quantile_loss horizons",
            expected: forecast.horizons(),
            got: targets.len(),
        });
    }
    let qs = forecast.quantiles().as_slice().to_vec();
    let mut total = 0.0;
    for (k, &y) in targets.iter().enumerate() {
        for (qi, &q) in qs.iter().enumerate() {
            total += quantile_loss(y, forecast.value(k + 1, qi), q)?;
        }
    }
    Ok(total)
}

/// Squared error `(y_hat - y)^2`.
pub fn mse_loss(y: f64, y_hat: f64) -> f64 {
    (y_hat - y) * (y_hat - y)
}

/// Gradient of [`mse_loss`] with respect to `y_hat`: `2*(y_hat - y)`.
pub fn mse_loss_grad(y: f64, y_hat: f64) -> f64 {
    2.0 * (y_hat - y)
}
