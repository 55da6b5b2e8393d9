//! L2-regularized, class-weighted logistic regression fitted by damped Newton
//! iterations from a zero start.
//!
//! The minimized objective is
//!
//! ```text
//! J(w, b) = (1/n) * [ sum_i s_i * (softplus(z_i) - y_i * z_i) + (lambda/2) * |w|^2 ],  z_i = w.x_i + b
//! ```
//!
//! where `s_i` is the class weight of record `i`. The `1/n` factor does not
//! move the minimizer; it keeps the gradient-norm tolerance meaningful for
//! large training sets. The intercept is not penalized.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::features::FeatureMatrix;
use super::SeverityError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub severe: f64,
    pub non_severe: f64,
}

impl ClassWeights {
    pub const UNIFORM: ClassWeights = ClassWeights {
        severe: 1.0,
        non_severe: 1.0,
    };

    /// `w_c = N / (2 * N_c)`.
    pub fn balanced(labels: &[bool]) -> Result<Self, SeverityError> {
        let n = labels.len() as f64;
        let n_pos = labels.iter().filter(|&&l| l).count() as f64;
        let n_neg = n - n_pos;
        if n_pos == 0.0 || n_neg == 0.0 {
            return Err(SeverityError::SingleClass("balanced class weights need both classes"));
        }
        Ok(Self {
            severe: n / (2.0 * n_pos),
            non_severe: n / (2.0 * n_neg),
        })
    }

    pub fn weight(&self, label: bool) -> f64 {
        if label {
            self.severe
        } else {
            self.non_severe
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2_lambda: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            l2_lambda: 1.0,
            tolerance: 1e-8,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub l2_lambda: f64,
    pub class_weights: ClassWeights,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Objective value at the start and after every accepted step.
    pub loss_history: Vec<f64>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(weights: &[f64], intercept: f64, row: &[f64]) -> f64 {
    weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + intercept
}

/// `σ(w·x + b)` for a feature vector already in the model's standardized space.
pub fn predict_proba(model: &LogisticModel, features: &[f64]) -> Result<f64, SeverityError> {
    if features.len() != model.weights.len() {
        return Err(SeverityError::DimensionMismatch {
            expected: model.weights.len(),
            got: features.len(),
        });
    }
    Ok(sigmoid(linear(&model.weights, model.intercept, features)))
}

/// Objective value `J(w, b)`.
pub fn objective(x: &FeatureMatrix, y: &[bool], cw: ClassWeights, lambda: f64, w: &[f64], b: f64) -> f64 {
    let n = x.rows as f64;
    let data: f64 = (0..x.rows)
        .map(|i| {
            let z = linear(w, b, x.row(i));
            let yi = f64::from(u8::from(y[i]));
            cw.weight(y[i]) * (softplus(z) - yi * z)
        })
        .sum();
    let penalty = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    (data + penalty) / n
}

/// Gradient of [`objective`]; the last entry is the intercept component.
pub fn gradient(x: &FeatureMatrix, y: &[bool], cw: ClassWeights, lambda: f64, w: &[f64], b: f64) -> Vec<f64> {
    let d = x.cols;
    let n = x.rows as f64;
    let mut g = vec![0.0; d + 1];
    for (i, &yi) in y.iter().enumerate().take(x.rows) {
        let row = x.row(i);
        let r = cw.weight(yi) * (sigmoid(linear(w, b, row)) - f64::from(u8::from(yi)));
        for (gj, xj) in g.iter_mut().zip(row) {
            *gj += r * xj;
        }
        g[d] += r;
    }
    for j in 0..d {
        g[j] += lambda * w[j];
    }
    g.iter_mut().for_each(|v| *v /= n);
    g
}

fn hessian(x: &FeatureMatrix, y: &[bool], cw: ClassWeights, lambda: f64, w: &[f64], b: f64) -> DMatrix<f64> {
    let d = x.cols;
    let n = x.rows as f64;
    let mut h = DMatrix::<f64>::zeros(d + 1, d + 1);
    let mut aug = vec![1.0; d + 1];
    for (i, &yi) in y.iter().enumerate().take(x.rows) {
        let row = x.row(i);
        let p = sigmoid(linear(w, b, row));
        let s = cw.weight(yi) * p * (1.0 - p);
        if s == 0.0 {
            continue;
        }
        aug[..d].copy_from_slice(row);
        for a in 0..=d {
            let sa = s * aug[a];
            for c in a..=d {
                h[(a, c)] += sa * aug[c];
            }
        }
    }
    for a in 0..=d {
        for c in 0..a {
            h[(a, c)] = h[(c, a)];
        }
    }
    for j in 0..d {
        h[(j, j)] += lambda;
    }
    h / n
}

fn newton_direction(h: DMatrix<f64>, g: &[f64]) -> DVector<f64> {
    let g = DVector::from_column_slice(g);
    let scale = h.diagonal().amax().max(1e-300);
    let mut damping = 0.0;
    loop {
        let mut hd = h.clone();
        for k in 0..hd.nrows() {
            hd[(k, k)] += damping;
        }
        if let Some(ch) = hd.cholesky() {
            return ch.solve(&g);
        }
        damping = if damping == 0.0 { 1e-12 * scale } else { damping * 10.0 };
        if damping > 1e6 * scale {
            // steepest descent
            return g;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fits the model on standardized features. Deterministic: starts from
/// `w = 0, b = 0` and uses full-batch Newton steps with Armijo backtracking,
/// so the objective never increases between iterations.
pub fn fit_logistic(
    x: &FeatureMatrix,
    y: &[bool],
    class_weights: ClassWeights,
    config: &LogisticConfig,
) -> Result<LogisticModel, SeverityError> {
    if x.rows != y.len() {
        return Err(SeverityError::DimensionMismatch {
            expected: x.rows,
            got: y.len(),
        });
    }
    if x.rows == 0 {
        return Err(SeverityError::EmptyInput("no training rows"));
    }
    if config.l2_lambda <= 0.0 {
        return Err(SeverityError::InvalidConfig(format!("l2_lambda must be positive, got {}", config.l2_lambda)));
    }
    let d = x.cols;
    let lambda = config.l2_lambda;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut loss = objective(x, y, class_weights, lambda, &w, b);
    let mut history = vec![loss];

    for iter in 0..config.max_iter {
        let g = gradient(x, y, class_weights, lambda, &w, b);
        let gnorm = norm(&g);
        if gnorm <= config.tolerance {
            return Ok(LogisticModel {
                weights: w,
                intercept: b,
                l2_lambda: lambda,
                class_weights,
                iterations: iter,
                gradient_norm: gnorm,
                loss_history: history,
            });
        }
        let dir = newton_direction(hessian(x, y, class_weights, lambda, &w, b), &g);
        let slope: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let w_new: Vec<f64> = w.iter().zip(dir.iter()).map(|(wj, dj)| wj - step * dj).collect();
            let b_new = b - step * dir[d];
            let l_new = objective(x, y, class_weights, lambda, &w_new, b_new);
            if l_new <= loss - 1e-4 * step * slope {
                accepted = Some((w_new, b_new, l_new));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((w_new, b_new, l_new)) => {
                w = w_new;
                b = b_new;
                loss = l_new;
                history.push(loss);
            }
            None => return Err(SeverityError::NoConvergence { gradient_norm: gnorm, iterations: iter }),
        }
    }
    let gnorm = norm(&gradient(x, y, class_weights, lambda, &w, b));
    if gnorm <= config.tolerance {
        return Ok(LogisticModel {
            weights: w,
            intercept: b,
            l2_lambda: lambda,
            class_weights,
            iterations: config.max_iter,
            gradient_norm: gnorm,
            loss_history: history,
        });
    }
    Err(SeverityError::NoConvergence {
        gradient_norm: gnorm,
        iterations: config.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn balanced_weights_formula() {
        let labels: Vec<bool> = (0..100).map(|i| i < 25).collect();
        let cw = ClassWeights::balanced(&labels).unwrap();
        assert_relative_eq!(cw.severe, 2.0);
        assert_relative_eq!(cw.non_severe, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn proba_link() {
        let m = LogisticModel {
            weights: vec![0.0, 0.0],
            intercept: 0.0,
            l2_lambda: 1.0,
            class_weights: ClassWeights::UNIFORM,
            iterations: 0,
            gradient_norm: 0.0,
            loss_history: vec![],
        };
        assert_eq!(predict_proba(&m, &[3.0, -2.0]).unwrap(), 0.5);
        assert!(predict_proba(&m, &[1.0]).is_err());
        let m = LogisticModel {
            weights: vec![1.0],
            intercept: 0.0,
            ..m
        };
        assert_eq!(predict_proba(&m, &[0.0]).unwrap(), 0.5);
        let m = LogisticModel { intercept: 800.0, ..m };
        assert_eq!(predict_proba(&m, &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn all_negative_labels() {
        let x = FeatureMatrix::from_rows(&[vec![1.0], vec![-1.0], vec![0.5], vec![-0.5]]);
        let y = [false; 4];
        let m = fit_logistic(&x, &y, ClassWeights::UNIFORM, &LogisticConfig::default()).unwrap();
        assert!(m.intercept < -10.0);
        for i in 0..4 {
            assert!(predict_proba(&m, x.row(i)).unwrap() < 0.5);
        }
    }

    #[test]
    fn loss_never_increases() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos(), ((i * 7) % 5) as f64 - 2.0])
            .collect();
        let y: Vec<bool> = rows.iter().map(|r| r[0] + 0.3 * r[2] > 0.1).collect();
        let x = FeatureMatrix::from_rows(&rows);
        let m = fit_logistic(&x, &y, ClassWeights::balanced(&y).unwrap(), &LogisticConfig {
            l2_lambda: 0.5,
            ..Default::default()
        })
        .unwrap();
        assert!(m.loss_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.gradient_norm <= 1e-8);
    }
}
