//! L2-penalized logistic regression fitted by full-batch gradient descent.
//!
//! The objective is the mean penalized negative log-likelihood
//!
//! ```text
//! J(w, b) = (1/N) [ Σᵢ log(1 + exp(zᵢ)) − yᵢ zᵢ  +  (λ/2)‖w‖² ],   zᵢ = w·xᵢ + b
//! ```
//!
//! with the intercept left unpenalized. Steps follow an Armijo backtracking
//! line search; the trial step grows after every accepted step so that flat
//! stretches are crossed quickly.

use crate::classifiers::{canonical_order, check_inputs, default_epsilon, ClassifierSpec, ProbEstimate};
use crate::error::Result;
use crate::matrix::{LabeledDataset, SampleMatrix};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Objective value after each accepted step, starting from the initial point.
    pub objective_trace: Vec<f64>,
}

impl LogisticFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.intercept)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Training rows in canonical order, flattened.
struct Problem {
    x: Vec<f64>,
    y: Vec<f64>,
    d: usize,
    l2: f64,
}

impl Problem {
    fn new(train: &LabeledDataset, l2: f64) -> Self {
        let order = canonical_order(train);
        let features = train.features();
        let d = features.cols();
        let mut x = Vec::with_capacity(order.len() * d);
        for &i in &order {
            x.extend_from_slice(features.row(i));
        }
        let y = order.iter().map(|&i| f64::from(train.labels()[i])).collect();
        Problem { x, y, d, l2 }
    }

    fn rows(&self) -> usize {
        self.y.len()
    }

    /// θ = (w₁..w_d, b)
    fn objective(&self, theta: &[f64]) -> f64 {
        let (w, b) = theta.split_at(self.d);
        let nll: f64 = self
            .x
            .chunks_exact(self.d)
            .zip(&self.y)
            .map(|(row, y)| {
                let z = dot(w, row) + b[0];
                softplus(z) - y * z
            })
            .sum();
        (nll + 0.5 * self.l2 * dot(w, w)) / self.rows() as f64
    }

    fn gradient(&self, theta: &[f64], grad: &mut [f64]) {
        let (w, b) = theta.split_at(self.d);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (row, y) in self.x.chunks_exact(self.d).zip(&self.y) {
            let r = sigmoid(dot(w, row) + b[0]) - y;
            for (g, v) in grad[..self.d].iter_mut().zip(row) {
                *g += r * v;
            }
            grad[self.d] += r;
        }
        let n = self.rows() as f64;
        for (g, wj) in grad[..self.d].iter_mut().zip(w) {
            *g = (*g + self.l2 * wj) / n;
        }
        grad[self.d] /= n;
    }
}

/// The penalized objective and its analytic gradient at `theta = (w, b)`.
#[cfg(test)]
pub(crate) fn objective_and_gradient(train: &LabeledDataset, l2: f64, theta: &[f64]) -> (f64, Vec<f64>) {
    let problem = Problem::new(train, l2);
    let mut grad = vec![0.0; theta.len()];
    problem.gradient(theta, &mut grad);
    (problem.objective(theta), grad)
}

/// Fits `(w, b)` from the intercept-only start `w = 0, b = log(n/m)`.
pub fn logistic_fit(spec: &ClassifierSpec, train: &LabeledDataset) -> LogisticFit {
    let problem = Problem::new(train, spec.logistic_l2);
    let d = problem.d;
    let mut theta = vec![0.0; d + 1];
    theta[d] = (train.n() as f64 / train.m() as f64).ln();

    let mut grad = vec![0.0; d + 1];
    let mut trial = vec![0.0; d + 1];
    let mut value = problem.objective(&theta);
    let mut trace = vec![value];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < spec.logistic_max_iter {
        problem.gradient(&theta, &mut grad);
        let gnorm2 = dot(&grad, &grad);
        if gnorm2.sqrt() <= spec.logistic_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        while step >= MIN_STEP {
            for ((t, th), g) in trial.iter_mut().zip(&theta).zip(&grad) {
                *t = th - step * g;
            }
            let candidate = problem.objective(&trial);
            if candidate <= value - ARMIJO * step * gnorm2 {
                accepted = Some(candidate);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(candidate) => {
                std::mem::swap(&mut theta, &mut trial);
                value = candidate;
                trace.push(value);
                step *= 2.0;
            }
            // no descent possible at floating-point resolution
            None => break,
        }
    }
    if !converged {
        problem.gradient(&theta, &mut grad);
        converged = dot(&grad, &grad).sqrt() <= spec.logistic_tol;
    }

    let intercept = theta[d];
    theta.truncate(d);
    LogisticFit {
        weights: theta,
        intercept,
        converged,
        iterations,
        objective_trace: trace,
    }
}

/// Logistic `p̂ = sigmoid(w·x + b)` on `eval`, clipped.
///
/// A fit that hits `logistic_max_iter` is still returned, flagged through
/// [`ProbEstimate::converged`].
pub fn logistic_fit_predict(
    spec: &ClassifierSpec,
    train: &LabeledDataset,
    eval: &SampleMatrix,
) -> Result<ProbEstimate> {
    spec.validate()?;
    check_inputs(train, eval)?;
    let fit = logistic_fit(spec, train);
    let values = eval.iter_rows().map(|x| fit.predict(x)).collect();
    Ok(ProbEstimate::clipped(values, default_epsilon(train.len())).with_convergence(fit.converged))
}
