//! Error and output-statistics metrics used by studies.

use crate::error::{Error, Result};

/// Relative worst-case error over a validation set: the largest absolute
/// deviation divided by the range of the reference values.
pub fn relative_linf_error(reference: &[f64], surrogate: &[f64]) -> Result<f64> {
    if reference.len() != surrogate.len() || reference.len() < 2 {
        return Err(Error::Validation(format!(
            "need two equal-length sequences, got {} and {}",
            reference.len(),
            surrogate.len()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &r in reference {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let range = hi - lo;
    if range <= 0.0 || range.is_nan() {
        return Err(Error::ZeroRange(format!(
            "reference values span [{lo}, {hi}]; the relative error is undefined"
        )));
    }
    let mut worst = 0.0f64;
    for (&r, &s) in reference.iter().zip(surrogate) {
        worst = worst.max((r - s).abs());
    }
    Ok(worst / range)
}

/// Silverman's rule-of-thumb bandwidth `1.06 * sigma * n^(-1/5)`.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSamples(
            "bandwidth needs at least two samples".into(),
        ));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<f64>()
        / (n - 1.0);
    if var <= 0.0 || var.is_nan() {
        return Err(Error::DegenerateSamples("samples have no spread".into()));
    }
    Ok(1.06 * var.sqrt() * n.powf(-0.2))
}

/// Gaussian kernel density estimate at `eval_points`, with the Silverman
/// bandwidth.
pub fn kde_density(samples: &[f64], eval_points: &[f64]) -> Result<Vec<f64>> {
    let h = silverman_bandwidth(samples)?;
    let n = samples.len() as f64;
    let norm = 1.0 / (n * h * (2.0 * std::f64::consts::PI).sqrt());
    Ok(eval_points
        .iter()
        .map(|&x| {
            let mut sum = 0.0;
            for &s in samples {
                let u = (x - s) / h;
                sum += (-0.5 * u * u).exp();
            }
            norm * sum
        })
        .collect())
}

/// Power-mean aggregation `((1/N) sum c_i^p)^(1/p)`; approaches the maximum
/// as `p` grows. Inputs must be non-negative.
pub fn pn_aggregate(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Validation("pn_aggregate of an empty slice".into()));
    }
    if p < 1.0 {
        return Err(Error::Validation(format!("p must be at least 1, got {p}")));
    }
    let mut max = 0.0f64;
    for &v in values {
        if v < 0.0 {
            return Err(Error::Validation(format!(
                "pn_aggregate needs non-negative values, got {v}"
            )));
        }
        max = max.max(v);
    }
    if max == 0.0 {
        return Ok(0.0);
    }
    // factor out the maximum so large values cannot overflow at high p
    let n = values.len() as f64;
    let sum: f64 = values.iter().map(|&v| (v / max).powf(p)).sum();
    Ok(max * (sum / n).powf(1.0 / p))
}
