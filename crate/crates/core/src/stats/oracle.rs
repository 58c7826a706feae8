//! Oracle statistics computed from the true densities.
//!
//! With class prior `π`, the class probability is
//! `p(x) = π f(x) / (π f(x) + (1 − π) g(x))`, so its log-odds minus
//! `log(π / (1 − π))` is exactly `log f(x) − log g(x)`. The oracle statistic
//! `U` averages that quantity over class-1 points and estimates `KL(f ‖ g)`;
//! `V` is its mirror over class-0 points and estimates `KL(g ‖ f)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::SampleMatrix;

/// A log-density on `ℝ^d`; `-∞` outside the support.
pub type LogDensity = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct OracleModel {
    log_f: LogDensity,
    log_g: LogDensity,
    pi: f64,
}

impl std::fmt::Debug for OracleModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleModel")
            .field("pi", &self.pi)
            .finish_non_exhaustive()
    }
}

impl OracleModel {
    pub fn new(log_f: LogDensity, log_g: LogDensity, pi: f64) -> Result<Self> {
        if !(pi > 0.0 && pi < 1.0) {
            return Err(Error::invalid("pi", "must lie in (0, 1)"));
        }
        Ok(OracleModel { log_f, log_g, pi })
    }

    /// `f = N(mean_f, σ²I)`, `g = N(mean_g, σ²I)`.
    pub fn gaussian_shift(mean_f: Vec<f64>, mean_g: Vec<f64>, sigma: f64, pi: f64) -> Result<Self> {
        if mean_f.len() != mean_g.len() {
            return Err(Error::DimensionMismatch {
                expected: mean_f.len(),
                found: mean_g.len(),
            });
        }
        if !(sigma > 0.0) {
            return Err(Error::invalid("sigma", "must be positive"));
        }
        let d = mean_f.len() as f64;
        let norm = -0.5 * d * (2.0 * std::f64::consts::PI * sigma * sigma).ln();
        let density = move |mean: Vec<f64>| -> LogDensity {
            Arc::new(move |x: &[f64]| {
                let q: f64 = x.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum();
                norm - q / (2.0 * sigma * sigma)
            })
        };
        OracleModel::new(density(mean_f), density(mean_g), pi)
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn with_pi(&self, pi: f64) -> Result<Self> {
        OracleModel::new(self.log_f.clone(), self.log_g.clone(), pi)
    }

    /// Exchanges the roles of `f` and `g` and maps `π ↦ 1 − π`.
    pub fn swapped(&self) -> Self {
        OracleModel {
            log_f: self.log_g.clone(),
            log_g: self.log_f.clone(),
            pi: 1.0 - self.pi,
        }
    }

    pub fn log_f(&self, x: &[f64]) -> f64 {
        (self.log_f)(x)
    }

    pub fn log_g(&self, x: &[f64]) -> f64 {
        (self.log_g)(x)
    }

    /// The class probability `p(x)` under prior `π`.
    pub fn probability(&self, x: &[f64]) -> f64 {
        let (lf, lg) = (self.log_f(x), self.log_g(x));
        match (lf == f64::NEG_INFINITY, lg == f64::NEG_INFINITY) {
            (true, true) => f64::NAN,
            (true, false) => 0.0,
            (false, true) => 1.0,
            (false, false) => {
                let t = ((1.0 - self.pi) / self.pi).ln() + lg - lf;
                1.0 / (1.0 + t.exp())
            }
        }
    }
}

/// `(1/n) Σ log(num(xᵢ) / den(xᵢ))`, `+∞` if some `den(xᵢ) = 0`.
fn mean_log_ratio(
    points: &SampleMatrix,
    num: impl Fn(&[f64]) -> f64,
    den: impl Fn(&[f64]) -> f64,
    outside: Error,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut unbounded = false;
    for x in points.iter_rows() {
        let (a, b) = (num(x), den(x));
        if a == f64::NEG_INFINITY {
            return Err(outside);
        }
        if b == f64::NEG_INFINITY {
            unbounded = true;
        } else {
            sum += a - b;
        }
    }
    Ok(if unbounded {
        f64::INFINITY
    } else {
        sum / points.rows() as f64
    })
}

/// Oracle `U` over class-1 points.
///
/// Evaluated as the mean log density ratio, which equals the mean of
/// `log(p/(1−p)) − log(π/(1−π))`; `π` therefore cancels. Returns `+∞` when a
/// point lies outside the support of `g`.
pub fn statistic_u(oracle: &OracleModel, class1_points: &SampleMatrix) -> Result<f64> {
    mean_log_ratio(
        class1_points,
        |x| oracle.log_f(x),
        |x| oracle.log_g(x),
        Error::PointOutsideSupportOfF,
    )
}

/// Oracle `V` over class-0 points: the mirror of [`statistic_u`].
pub fn statistic_v(oracle: &OracleModel, class0_points: &SampleMatrix) -> Result<f64> {
    mean_log_ratio(
        class0_points,
        |x| oracle.log_g(x),
        |x| oracle.log_f(x),
        Error::PointOutsideSupportOfG,
    )
}
