//! Composite trapezoid integration over sampled integrands, with a
//! Richardson error estimate from the half-resolution grid.

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    /// Composite trapezoid; error from comparing with every other sample.
    #[default]
    TrapezoidRichardson,
}

impl QuadratureScheme {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureScheme::TrapezoidRichardson => "trapezoid-richardson",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

fn validate(times: &[f64], values: &[f64]) -> Result<()> {
    assert_eq!(times.len(), values.len(), "times/values length mismatch");
    for (&t, &v) in times.iter().zip(values) {
        if !t.is_finite() || !v.is_finite() {
            return Err(QslError::NonFiniteSample { t });
        }
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QslError::InvalidConfig(
            "quadrature nodes must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Cumulative integral from the first sample to each sample, with the
/// Richardson estimate `|full - half| / 3` at every node.
///
/// The half grid uses even-indexed nodes. At odd nodes it is extended by the
/// final full-grid panel, so the estimate only reflects the even prefix.
pub fn cumulative(times: &[f64], values: &[f64]) -> Result<Vec<QuadratureEstimate>> {
    validate(times, values)?;
    let n = times.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let panel = |i: usize, j: usize| 0.5 * (times[j] - times[i]) * (values[i] + values[j]);

    let mut full = 0.0;
    let mut half_even = 0.0;
    out.push(QuadratureEstimate {
        value: 0.0,
        error_estimate: 0.0,
    });
    for k in 1..n {
        full += panel(k - 1, k);
        let half = if k % 2 == 0 {
            half_even += panel(k - 2, k);
            half_even
        } else {
            half_even + panel(k - 1, k)
        };
        out.push(QuadratureEstimate {
            value: full,
            error_estimate: (full - half).abs() / 3.0,
        });
    }
    Ok(out)
}

/// Integral over the full span of `(t, value)` samples.
pub fn integrate_correction(
    samples: &[(f64, f64)],
    scheme: QuadratureScheme,
) -> Result<QuadratureEstimate> {
    match scheme {
        QuadratureScheme::TrapezoidRichardson => {
            let (times, values): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
            Ok(cumulative(&times, &values)?
                .last()
                .copied()
                .unwrap_or(QuadratureEstimate {
                    value: 0.0,
                    error_estimate: 0.0,
                }))
        }
    }
}
