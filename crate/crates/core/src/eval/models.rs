//! Ridge and L2-regularized logistic regression.

use nalgebra::{DMatrix, DVector};

use super::EvalError;

/// Weights plus an unpenalized intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    /// `X w + b` for every row of `x`.
    pub fn decision(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let w = DVector::from_column_slice(&self.weights);
        (x * w).iter().map(|v| v + self.intercept).collect()
    }

    pub fn predict_proba(&self, x: &DMatrix<f64>) -> Vec<f64> {
        self.decision(x).into_iter().map(sigmoid).collect()
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn check_shape(x: &DMatrix<f64>, y: &[f64]) -> Result<(), EvalError> {
    if x.nrows() != y.len() {
        return Err(EvalError::LengthMismatch(x.nrows(), y.len()));
    }
    if y.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

/// Solves `(XᵀX + αI) w = Xᵀy`.
///
/// With `fit_intercept`, features and target are centered first and the
/// intercept is recovered from the means, so it is not penalized.
pub fn ridge_fit(x: &DMatrix<f64>, y: &[f64], alpha: f64, fit_intercept: bool) -> Result<LinearModel, EvalError> {
    check_shape(x, y)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(EvalError::InvalidParam(format!("alpha must be >= 0, got {alpha}")));
    }
    let d = x.ncols();
    let n = x.nrows() as f64;
    let (x_means, y_mean) = if fit_intercept {
        (
            DVector::from_iterator(d, x.column_iter().map(|c| c.sum() / n)),
            y.iter().sum::<f64>() / n,
        )
    } else {
        (DVector::zeros(d), 0.0)
    };
    let mut xc = x.clone();
    for (j, mut col) in xc.column_iter_mut().enumerate() {
        col.add_scalar_mut(-x_means[j]);
    }
    let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - y_mean));

    let mut gram = xc.transpose() * &xc;
    for j in 0..d {
        gram[(j, j)] += alpha;
    }
    let rhs = xc.transpose() * yc;
    let scale = (0..d).map(|j| gram[(j, j)]).fold(0.0, f64::max);
    let chol = gram.cholesky().ok_or(EvalError::Singular)?;
    let l = chol.l_dirty();
    let min_pivot = (0..d).map(|j| l[(j, j)] * l[(j, j)]).fold(f64::INFINITY, f64::min);
    if d > 0 && !(min_pivot > 1e-12 * scale) {
        return Err(EvalError::Singular);
    }
    let w = chol.solve(&rhs);
    let intercept = if fit_intercept { y_mean - x_means.dot(&w) } else { 0.0 };
    Ok(LinearModel {
        weights: w.iter().copied().collect(),
        intercept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            max_iters: 1000,
            tol: 1e-6,
        }
    }
}

/// A fitted logistic model with its optimization trace.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub model: LinearModel,
    /// Objective value after each accepted step, starting from the initial point.
    pub losses: Vec<f64>,
    pub converged: bool,
}

/// Mean log-loss plus `‖w‖² / (2 C n)`, and its gradient (weights first,
/// intercept last).
pub fn logistic_loss_and_grad(
    x: &DMatrix<f64>,
    y: &[f64],
    weights: &[f64],
    intercept: f64,
    c: f64,
) -> (f64, Vec<f64>) {
    let n = x.nrows() as f64;
    let w = DVector::from_column_slice(weights);
    let z = x * &w;
    let mut loss = 0.0;
    let mut residual = DVector::zeros(x.nrows());
    for i in 0..x.nrows() {
        let zi = z[i] + intercept;
        loss += softplus(zi) - y[i] * zi;
        residual[i] = sigmoid(zi) - y[i];
    }
    let penalty = w.norm_squared() / (2.0 * c * n);
    let mut grad: Vec<f64> = (x.transpose() * &residual / n + &w / (c * n))
        .iter()
        .copied()
        .collect();
    grad.push(residual.sum() / n);
    (loss / n + penalty, grad)
}

fn check_binary(y: &[f64]) -> Result<(), EvalError> {
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(EvalError::InvalidParam("logistic targets must be 0 or 1".to_owned()));
    }
    let pos = y.iter().filter(|&&v| v == 1.0).count();
    if pos == 0 || pos == y.len() {
        return Err(EvalError::SingleClass);
    }
    Ok(())
}

pub fn logistic_fit(
    x: &DMatrix<f64>,
    y: &[f64],
    c: f64,
    options: LogisticOptions,
) -> Result<LinearModel, EvalError> {
    logistic_fit_traced(x, y, c, options).map(|f| f.model)
}

/// Minimizes the regularized log-loss by gradient descent with Armijo
/// backtracking.
///
/// Steps are scaled per coordinate by a bound on the diagonal of the Hessian,
/// which keeps the unpenalized intercept moving when a tiny `C` makes the
/// weight curvature huge.
pub fn logistic_fit_traced(
    x: &DMatrix<f64>,
    y: &[f64],
    c: f64,
    options: LogisticOptions,
) -> Result<LogisticFit, EvalError> {
    check_shape(x, y)?;
    check_binary(y)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(EvalError::InvalidParam(format!("C must be > 0, got {c}")));
    }
    let d = x.ncols();
    let n = x.nrows() as f64;
    let mut curvature: Vec<f64> = x
        .column_iter()
        .map(|col| col.norm_squared() / (4.0 * n) + 1.0 / (c * n))
        .collect();
    curvature.push(0.25);

    let mut theta = vec![0.0; d + 1];
    let (mut loss, mut grad) = logistic_loss_and_grad(x, y, &theta[..d], theta[d], c);
    let mut losses = vec![loss];
    let mut converged = false;
    for _ in 0..options.max_iters {
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < options.tol {
            converged = true;
            break;
        }
        let dir: Vec<f64> = grad.iter().zip(&curvature).map(|(g, h)| -g / h).collect();
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + step * d).collect();
            let (l, g) = logistic_loss_and_grad(x, y, &trial[..d], trial[d], c);
            if l <= loss + 1e-4 * step * slope {
                accepted = Some((trial, l, g));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((t, l, g)) => {
                theta = t;
                loss = l;
                grad = g;
                losses.push(l);
            }
            // No decrease representable in floating point: at the optimum.
            None => {
                converged = true;
                break;
            }
        }
    }
    Ok(LogisticFit {
        model: LinearModel {
            weights: theta[..d].to_vec(),
            intercept: theta[d],
        },
        losses,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn column(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn ridge_exact_fit_without_intercept() {
        let m = ridge_fit(&column(&[1.0, 2.0]), &[2.0, 4.0], 0.0, false).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-12);
        assert_eq!(m.intercept, 0.0);
    }

    #[test]
    fn ridge_shrinkage_example() {
        let m = ridge_fit(&column(&[1.0, 2.0]), &[2.0, 4.0], 1.0, false).unwrap();
        assert!((m.weights[0] - 10.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ridge_full_shrinkage_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = DMatrix::from_fn(30, 3, |_, _| rng.random_range(-1.0..1.0));
        let y: Vec<f64> = (0..30).map(|i| x[(i, 0)] * 2.0 - x[(i, 2)] + 0.3).collect();
        let free = ridge_fit(&x, &y, 0.0, true).unwrap();
        let shrunk = ridge_fit(&x, &y, 1e9, true).unwrap();
        assert!(shrunk.norm() < 1e-4 * free.norm());
    }

    #[test]
    fn ridge_intercept_recovered() {
        let x = column(&[0.0, 1.0, 2.0, 3.0]);
        let m = ridge_fit(&x, &[1.0, 3.0, 5.0, 7.0], 0.0, true).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-12);
        assert!((m.intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ridge_singular_without_penalty() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert_eq!(ridge_fit(&x, &[1.0, 2.0, 3.0], 0.0, false), Err(EvalError::Singular));
        assert!(ridge_fit(&x, &[1.0, 2.0, 3.0], 0.5, false).is_ok());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let x = DMatrix::from_fn(25, 4, |_, _| rng.random_range(-2.0..2.0));
        let y: Vec<f64> = (0..25).map(|_| if rng.random_bool(0.4) { 1.0 } else { 0.0 }).collect();
        for _ in 0..10 {
            let theta: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c = rng.random_range(0.01..1.0);
            let (_, grad) = logistic_loss_and_grad(&x, &y, &theta[..4], theta[4], c);
            for k in 0..5 {
                let h = 1e-6;
                let mut up = theta.clone();
                let mut down = theta.clone();
                up[k] += h;
                down[k] -= h;
                let fu = logistic_loss_and_grad(&x, &y, &up[..4], up[4], c).0;
                let fd = logistic_loss_and_grad(&x, &y, &down[..4], down[4], c).0;
                let numeric = (fu - fd) / (2.0 * h);
                let rel = (numeric - grad[k]).abs() / grad[k].abs().max(1e-8);
                assert!(rel < 1e-4, "coordinate {k}: analytic {} numeric {numeric}", grad[k]);
            }
        }
    }

    #[test]
    fn tiny_c_gives_base_rate_intercept() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = DMatrix::from_fn(40, 2, |_, _| rng.random_range(-1.0..1.0));
        let y: Vec<f64> = (0..40).map(|i| if i % 4 == 0 { 1.0 } else { 0.0 }).collect();
        let m = logistic_fit(&x, &y, 1e-8, LogisticOptions::default()).unwrap();
        assert!(m.norm() < 1e-6, "weights {:?}", m.weights);
        let log_odds = (0.25f64 / 0.75).ln();
        assert!((m.intercept - log_odds).abs() < 1e-4, "intercept {}", m.intercept);
    }

    #[test]
    fn separable_pair_classified() {
        let x = column(&[-1.0, 1.0]);
        let y = [0.0, 1.0];
        let fit = logistic_fit_traced(&x, &y, 1.0, LogisticOptions::default()).unwrap();
        assert!(fit.converged);
        let p = fit.model.predict_proba(&x);
        assert!(p[0] < 0.5 && p[1] > 0.5);
    }

    #[test]
    fn loss_decreases_monotonically() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = DMatrix::from_fn(60, 3, |_, _| rng.random_range(-3.0..3.0));
        let y: Vec<f64> = (0..60)
            .map(|i| if x[(i, 0)] - x[(i, 1)] + rng.random_range(-1.0..1.0) > 0.0 { 1.0 } else { 0.0 })
            .collect();
        let fit = logistic_fit_traced(&x, &y, 0.5, LogisticOptions::default()).unwrap();
        assert!(fit.losses.len() > 2);
        assert!(fit.losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn logistic_rejects_bad_targets() {
        let x = column(&[0.0, 1.0]);
        assert_eq!(logistic_fit(&x, &[1.0, 1.0], 1.0, LogisticOptions::default()), Err(EvalError::SingleClass));
        assert!(logistic_fit(&x, &[0.0, 2.0], 1.0, LogisticOptions::default()).is_err());
        assert!(logistic_fit(&x, &[0.0, 1.0], 0.0, LogisticOptions::default()).is_err());
    }
}
