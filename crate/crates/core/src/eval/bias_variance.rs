use super::EvalError;

/// Decomposition of the mean squared error of repeated model fits at one
/// input into squared bias and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasVarianceReport {
    /// Average prediction over the fitted models.
    pub mean_prediction: f64,
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Decomposes the error of `predictions` (one per fitted model) against the
/// true value. `mse == bias_sq + variance` up to rounding.
pub fn bias_variance_decompose(predictions: &[f64], truth: f64) -> Result<BiasVarianceReport, EvalError> {
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let m = predictions.len() as f64;
    let mean = predictions.iter().sum::<f64>() / m;
    let variance = predictions.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / m;
    let mse = predictions.iter().map(|y| (truth - y).powi(2)).sum::<f64>() / m;
    Ok(BiasVarianceReport {
        mean_prediction: mean,
        bias_sq: (truth - mean).powi(2),
        variance,
        mse,
    })
}
