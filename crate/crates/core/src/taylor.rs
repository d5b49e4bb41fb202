//! Truncated complex power series and recurrence-driven Taylor expansion of
//! ODE solutions.
//!
//! A [`TruncatedSeries`] stores the coefficients of `h^0 ..= h^p` of one scalar
//! function expanded at `t0`, with `h = t - t0`. Systems supply their
//! right-hand side as a per-coefficient recurrence through [`OdeSystem`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;

/// Complex scalar used for both the independent variable and the state.
pub type ComplexScalar = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    #[serde(with = "crate::complex_pair")]
    t0: Complex64,
    #[serde(with = "crate::complex_pair::vec")]
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series from its coefficients. At least two coefficients
    /// (order >= 1) are required.
    pub fn new(t0: Complex64, coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.len() < 2 {
            return Err(SeriesError::OrderTooLow(coeffs.len().saturating_sub(1)));
        }
        Ok(Self { t0, coeffs })
    }

    pub fn zero(t0: Complex64, order: usize) -> Result<Self, SeriesError> {
        Self::new(t0, vec![Complex64::new(0.0, 0.0); order + 1])
    }

    /// The constant series `1`.
    pub fn one(t0: Complex64, order: usize) -> Result<Self, SeriesError> {
        let mut s = Self::zero(t0, order)?;
        s.coeffs[0] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Series with real coefficients, handy in tests and fixtures.
    pub fn from_real(t0: Complex64, coeffs: &[f64]) -> Result<Self, SeriesError> {
        Self::new(t0, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn t0(&self) -> Complex64 {
        self.t0
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Same coefficients re-anchored at another expansion point.
    pub fn with_t0(&self, t0: Complex64) -> Self {
        Self {
            t0,
            coeffs: self.coeffs.clone(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.t0 != other.t0 {
            return Err(SeriesError::ExpansionPointMismatch {
                left: self.t0,
                right: other.t0,
            });
        }
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { t0: self.t0, coeffs })
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let coeffs = (0..=self.order())
            .map(|k| cauchy_term(&self.coeffs, &other.coeffs, k))
            .collect();
        Ok(Self { t0: self.t0, coeffs })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            t0: self.t0,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Horner evaluation at offset `h` from the expansion point.
    pub fn eval(&self, h: Complex64) -> Complex64 {
        eval_coeffs(&self.coeffs, h)
    }

    /// Evaluates the term-by-term derivative at offset `h`.
    pub fn eval_derivative(&self, h: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * h + c * k as f64;
        }
        acc
    }
}

/// `k`-th coefficient of the Cauchy product of `a` and `b`. Both slices must
/// hold at least `k + 1` coefficients.
#[inline]
pub fn cauchy_term(a: &[Complex64], b: &[Complex64], k: usize) -> Complex64 {
    (0..=k).map(|j| a[j] * b[k - j]).sum()
}

#[inline]
pub fn eval_coeffs(coeffs: &[Complex64], h: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * h + c)
}

/// A first-order system `y' = f(t, y)` described by the recurrence that turns
/// Taylor coefficients of `t` and `y` into Taylor coefficients of `f(t, y)`.
///
/// Implementations must be pure: the same inputs always produce the same
/// outputs.
pub trait OdeSystem: Send + Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> &str;

    /// Writes the `k`-th coefficient of every derivative component into `out`.
    ///
    /// `time` holds coefficients `0..=k` of the independent-variable series
    /// (`t0`, `1`, `0`, ...) and `state[i]` holds coefficients `0..=k` of
    /// component `i`.
    fn rhs_coefficient(&self, k: usize, time: &[Complex64], state: &[Vec<Complex64>], out: &mut [Complex64]);
}

/// First Painlevé equation `y'' = 6 y^2 + t` as the system
/// `y1' = y2`, `y2' = 6 y1^2 + t`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PainleveI;

impl OdeSystem for PainleveI {
    fn dim(&self) -> usize {
        2
    }

    fn label(&self) -> &str {
        "painleve1"
    }

    fn rhs_coefficient(&self, k: usize, time: &[Complex64], state: &[Vec<Complex64>], out: &mut [Complex64]) {
        let y = &state[0];
        out[0] = state[1][k];
        out[1] = 6.0 * cauchy_term(y, y, k) + time[k];
    }
}

/// System built from a closure, for ad hoc problems and tests.
pub struct RecurrenceSystem<F> {
    dim: usize,
    label: String,
    rule: F,
}

impl<F> RecurrenceSystem<F>
where
    F: Fn(usize, &[Complex64], &[Vec<Complex64>], &mut [Complex64]) + Send + Sync,
{
    pub fn new(dim: usize, label: impl Into<String>, rule: F) -> Self {
        Self {
            dim,
            label: label.into(),
            rule,
        }
    }
}

impl<F> OdeSystem for RecurrenceSystem<F>
where
    F: Fn(usize, &[Complex64], &[Vec<Complex64>], &mut [Complex64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn rhs_coefficient(&self, k: usize, time: &[Complex64], state: &[Vec<Complex64>], out: &mut [Complex64]) {
        (self.rule)(k, time, state, out)
    }
}

/// Expands the solution of `sys` through `(t0, y0)` to order `order`.
///
/// Returns one series per state component. A non-finite coefficient aborts
/// with [`SeriesError::Overflow`], which in practice means the expansion
/// point sits at or too close to a singularity.
pub fn generate_solution_series(
    sys: &dyn OdeSystem,
    t0: Complex64,
    y0: &[Complex64],
    order: usize,
) -> Result<Vec<TruncatedSeries>, SeriesError> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(SeriesError::DimensionMismatch {
            expected: n,
            got: y0.len(),
        });
    }
    if order < 2 {
        return Err(SeriesError::OrderTooLow(order));
    }
    if let Some(component) = y0.iter().position(|v| !is_finite(*v)) {
        return Err(SeriesError::Overflow {
            component,
            coefficient: 0,
        });
    }

    let mut time = Vec::with_capacity(order + 1);
    time.push(t0);
    time.push(Complex64::new(1.0, 0.0));
    time.resize(order + 1, Complex64::new(0.0, 0.0));

    let mut state: Vec<Vec<Complex64>> = y0
        .iter()
        .map(|&v| {
            let mut c = Vec::with_capacity(order + 1);
            c.push(v);
            c
        })
        .collect();
    let mut deriv = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..order {
        sys.rhs_coefficient(k, &time, &state, &mut deriv);
        let inv = 1.0 / (k + 1) as f64;
        for (component, (coeffs, d)) in state.iter_mut().zip(&deriv).enumerate() {
            let next = d * inv;
            if !is_finite(next) {
                return Err(SeriesError::Overflow {
                    component,
                    coefficient: k + 1,
                });
            }
            coeffs.push(next);
        }
    }

    Ok(state.into_iter().map(|coeffs| TruncatedSeries { t0, coeffs }).collect())
}

#[inline]
pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
