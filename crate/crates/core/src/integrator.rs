//! Taylor-series stepping along straight segments in the complex t-plane.
//!
//! Every step expands the solution at the current point, fits the tail of
//! the located component for its primary singularity, chooses a step length
//! from the last two series terms, and sums the series at the next point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OptionsError, PathError, StepError};
use crate::locator::{self, fit_primary_singularity, SingularityEstimate};
use crate::taylor::{generate_solution_series, is_finite, OdeSystem, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Taylor order `p`; each series holds `p + 1` coefficients.
    pub ts_order: usize,
    pub window: usize,
    pub accept_threshold: f64,
    pub merge_tol: f64,
    /// Safety factor applied to the step-length estimate.
    pub safety: f64,
    pub max_steps: usize,
    pub min_step: f64,
    /// State component whose series feeds the locator.
    pub locate_component: usize,
    /// Keep each step's series in its record.
    pub dense_output: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            ts_order: 45,
            window: locator::DEFAULT_WINDOW,
            accept_threshold: locator::DEFAULT_ACCEPT_THRESHOLD,
            merge_tol: locator::DEFAULT_MERGE_TOL,
            safety: 0.9,
            max_steps: 10_000,
            min_step: 1e-12,
            locate_component: 0,
            dense_output: false,
        }
    }
}

impl IntegrationOptions {
    pub fn validate(&self) -> Result<(), OptionsError> {
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(OptionsError::Safety(self.safety));
        }
        for (name, value) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("accept_threshold", self.accept_threshold),
            ("merge_tol", self.merge_tol),
            ("min_step", self.min_step),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(OptionsError::NonPositive { name, value });
            }
        }
        if self.window < 2 {
            return Err(OptionsError::Window(self.window));
        }
        if self.ts_order < self.window + 2 {
            return Err(OptionsError::OrderBelowWindow {
                order: self.ts_order,
                window: self.window,
            });
        }
        if self.max_steps == 0 {
            return Err(OptionsError::MaxSteps);
        }
        Ok(())
    }

    /// Both tolerances scaled by `factor`.
    pub fn with_tolerances_scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..self.clone()
        }
    }
}

/// Piecewise-linear route through the t-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathVertices", into = "PathVertices")]
pub struct PathSpec {
    vertices: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PathVertices {
    #[serde(with = "crate::complex_pair::vec")]
    vertices: Vec<Complex64>,
}

impl TryFrom<PathVertices> for PathSpec {
    type Error = PathError;

    fn try_from(v: PathVertices) -> Result<Self, Self::Error> {
        PathSpec::new(v.vertices)
    }
}

impl From<PathSpec> for PathVertices {
    fn from(p: PathSpec) -> Self {
        Self { vertices: p.vertices }
    }
}

impl PathSpec {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self, PathError> {
        if vertices.len() < 2 {
            return Err(PathError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|v| !is_finite(*v)) {
            return Err(PathError::NonFinite(i));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(PathError::RepeatedVertex(i));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().expect("path has vertices")
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Reflection across the real axis.
    pub fn conjugate(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Shortest distance from `t` to any segment of the path.
    pub fn distance_to(&self, t: Complex64) -> f64 {
        self.segments()
            .map(|(a, b)| {
                let d = b - a;
                let u = ((t - a) * d.conj()).re / d.norm_sqr();
                (a + d * u.clamp(0.0, 1.0) - t).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    #[serde(with = "crate::complex_pair")]
    pub t: Complex64,
    #[serde(with = "crate::complex_pair::vec")]
    pub y: Vec<Complex64>,
    /// Length of the step that arrived at `t`; zero for a path's first record.
    pub h_taken: f64,
    pub estimate: Option<SingularityEstimate>,
    /// Series expanded at `t`, kept only with `dense_output`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<TruncatedSeries>>,
}

/// Records and estimates of one integration. `estimates[i]` was fitted at
/// `records[i].t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathSolution {
    pub records: Vec<StepRecord>,
    pub estimates: Vec<SingularityEstimate>,
}

impl PathSolution {
    pub fn final_state(&self) -> Option<&[Complex64]> {
        self.records.last().map(|r| r.y.as_slice())
    }

    pub fn final_t(&self) -> Option<Complex64> {
        self.records.last().map(|r| r.t)
    }

    pub fn accepted_estimates(&self) -> impl Iterator<Item = &SingularityEstimate> {
        self.estimates.iter().filter(|e| e.accepted)
    }
}

/// An aborted integration with everything computed before the failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct IntegrationFailure {
    #[source]
    pub error: StepError,
    pub partial: PathSolution,
}

impl IntegrationFailure {
    fn new(error: impl Into<StepError>, partial: PathSolution) -> Self {
        Self {
            error: error.into(),
            partial,
        }
    }
}

/// Step length from the last two series terms of every component:
/// `safety * min (tol / |c_k|)^(1/k)` over `k in {p-1, p}`, where
/// `tol = abs_tol + rel_tol * max |y|`. Clamped to `remaining`.
pub fn step_size(series: &[TruncatedSeries], opts: &IntegrationOptions, remaining: f64) -> Result<f64, StepError> {
    let scale = series.iter().map(|s| s.coeffs()[0].norm()).fold(0.0, f64::max);
    let tol = opts.abs_tol + opts.rel_tol * scale;
    let mut h = f64::INFINITY;
    for s in series {
        let p = s.order();
        for k in [p - 1, p] {
            let mag = s.coeffs()[k].norm();
            if mag > 0.0 {
                h = h.min((tol / mag).powf(1.0 / k as f64));
            }
        }
    }
    h *= opts.safety;
    if h < opts.min_step {
        let t = series.first().map(|s| s.t0()).unwrap_or_default();
        return Err(StepError::BelowMinStep {
            h,
            min_step: opts.min_step,
            t,
        });
    }
    Ok(h.min(remaining))
}

struct Stepper<'a> {
    sys: &'a dyn OdeSystem,
    opts: &'a IntegrationOptions,
    steps_left: usize,
}

impl Stepper<'_> {
    fn expand(&self, t: Complex64, y: &[Complex64]) -> Result<(Vec<TruncatedSeries>, SingularityEstimate), StepError> {
        let series = generate_solution_series(self.sys, t, y, self.opts.ts_order)
            .map_err(|source| StepError::Series { t, source })?;
        let located = series.get(self.opts.locate_component).unwrap_or(&series[0]);
        let estimate = fit_primary_singularity(located, self.opts.window, self.opts.accept_threshold)
            .map_err(|source| StepError::Series { t, source })?;
        Ok((series, estimate))
    }

    fn push(
        &self,
        out: &mut PathSolution,
        t: Complex64,
        y: Vec<Complex64>,
        h_taken: f64,
        series: Vec<TruncatedSeries>,
        estimate: SingularityEstimate,
    ) {
        out.records.push(StepRecord {
            index: out.records.len(),
            t,
            y,
            h_taken,
            estimate: Some(estimate.clone()),
            series: self.opts.dense_output.then_some(series),
        });
        out.estimates.push(estimate);
    }

    /// Appends the steps of one segment to `out`. The record at `t_start` is
    /// appended only when `out` is empty.
    fn segment(
        &mut self,
        out: &mut PathSolution,
        y0: &[Complex64],
        t_start: Complex64,
        t_end: Complex64,
    ) -> Result<(), StepError> {
        let span = t_end - t_start;
        let length = span.norm();
        let dir = span / length;

        let mut y = y0.to_vec();
        let mut t = t_start;
        let mut travelled = 0.0;
        let (mut series, estimate) = self.expand(t, &y)?;
        if out.records.is_empty() {
            self.push(out, t, y.clone(), 0.0, series.clone(), estimate);
        }

        while travelled < length {
            if self.steps_left == 0 {
                return Err(StepError::MaxSteps(self.opts.max_steps));
            }
            self.steps_left -= 1;

            let remaining = length - travelled;
            let h = step_size(&series, self.opts, remaining)?;
            let dh = dir * h;
            y = series.iter().map(|s| s.eval(dh)).collect();
            if h >= remaining {
                travelled = length;
                t = t_end;
            } else {
                travelled += h;
                t = t_start + dir * travelled;
            }
            if y.iter().any(|v| !is_finite(*v)) {
                return Err(StepError::NonFiniteState { t });
            }
            let (next, estimate) = self.expand(t, &y)?;
            self.push(out, t, y.clone(), h, next.clone(), estimate);
            series = next;
        }
        Ok(())
    }
}

fn check_initial(y0: &[Complex64], sys: &dyn OdeSystem) -> Result<(), StepError> {
    if y0.len() != sys.dim() {
        return Err(StepError::Series {
            t: Complex64::default(),
            source: crate::error::SeriesError::DimensionMismatch {
                expected: sys.dim(),
                got: y0.len(),
            },
        });
    }
    if y0.iter().any(|v| !is_finite(*v)) {
        return Err(StepError::NonFiniteState {
            t: Complex64::default(),
        });
    }
    Ok(())
}

/// Integrates along the straight segment `t_start -> t_end`.
///
/// The first record sits at `t_start`, the last exactly at `t_end`. On failure
/// the records computed so far travel with the error.
pub fn integrate_segment(
    sys: &dyn OdeSystem,
    y0: &[Complex64],
    t_start: Complex64,
    t_end: Complex64,
    opts: &IntegrationOptions,
) -> Result<PathSolution, IntegrationFailure> {
    let path = PathSpec::new(vec![t_start, t_end]).map_err(|e| IntegrationFailure::new(e, PathSolution::default()))?;
    integrate_path(sys, y0, &path, opts)
}

/// Integrates segment after segment along `path`, each segment starting from
/// the previous one's final state. Records carry global indices and vertices
/// shared by adjacent segments appear once.
pub fn integrate_path(
    sys: &dyn OdeSystem,
    y0: &[Complex64],
    path: &PathSpec,
    opts: &IntegrationOptions,
) -> Result<PathSolution, IntegrationFailure> {
    let mut out = PathSolution::default();
    if let Err(e) = opts.validate() {
        return Err(IntegrationFailure::new(e, out));
    }
    if let Err(e) = check_initial(y0, sys) {
        return Err(IntegrationFailure::new(e, out));
    }
    let mut stepper = Stepper {
        sys,
        opts,
        steps_left: opts.max_steps,
    };
    let mut y = y0.to_vec();
    for (a, b) in path.segments() {
        if let Err(e) = stepper.segment(&mut out, &y, a, b) {
            log::debug!("integration aborted after {} records: {e}", out.records.len());
            return Err(IntegrationFailure::new(e, out));
        }
        y = out.final_state().expect("segment produced records").to_vec();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taylor::RecurrenceSystem;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_sys() -> impl OdeSystem {
        RecurrenceSystem::new(1, "exp", |k, _t, y: &[Vec<Complex64>], out: &mut [Complex64]| {
            out[0] = y[0][k]
        })
    }

    #[test]
    fn polynomial_tail_takes_the_whole_remainder() {
        let s = TruncatedSeries::from_real(c(0.0, 0.0), &[1.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
        let h = step_size(&[s], &IntegrationOptions::default(), 3.5).unwrap();
        assert_eq!(h, 3.5);
    }

    #[test]
    fn step_is_proportional_to_radius() {
        let opts = IntegrationOptions::default();
        for radius in [0.5f64, 2.0, 7.0] {
            let coeffs: Vec<f64> = (0..=45).map(|k| radius.powi(-k)).collect();
            let s = TruncatedSeries::from_real(c(0.0, 0.0), &coeffs).unwrap();
            let h = step_size(&[s], &opts, f64::INFINITY).unwrap();
            // tol = 1e-10 + 1e-10 * |c0| = 2e-10; binding term is k = 44
            let tol: f64 = 2e-10;
            let expected = 0.9 * radius * tol.powf(1.0 / 44.0).min(tol.powf(1.0 / 45.0));
            assert!((h - expected).abs() < 1e-12 * radius, "{h} vs {expected}");
            assert!((h / radius - 0.9 * 0.60).abs() < 0.02);
        }
    }

    #[test]
    fn short_remainder_clamps() {
        let coeffs: Vec<f64> = (0..=45).map(|k| 0.5f64.powi(k)).collect();
        let s = TruncatedSeries::from_real(c(0.0, 0.0), &coeffs).unwrap();
        assert_eq!(step_size(&[s], &IntegrationOptions::default(), 1e-6).unwrap(), 1e-6);
    }

    #[test]
    fn step_below_minimum_is_a_failure() {
        let coeffs: Vec<f64> = (0..=45).map(|k| 1e3f64.powi(k)).collect();
        let s = TruncatedSeries::from_real(c(0.0, 0.0), &coeffs).unwrap();
        let opts = IntegrationOptions {
            min_step: 1e-3,
            ..Default::default()
        };
        assert!(matches!(
            step_size(&[s], &opts, 1.0),
            Err(StepError::BelowMinStep { .. })
        ));
    }

    #[test]
    fn exponential_on_unit_interval() {
        let sol = integrate_segment(
            &exp_sys(),
            &[c(1.0, 0.0)],
            c(0.0, 0.0),
            c(1.0, 0.0),
            &IntegrationOptions::default(),
        )
        .unwrap();
        let last = sol.records.last().unwrap();
        assert_eq!(last.t, c(1.0, 0.0));
        assert!((last.y[0].re - std::f64::consts::E).abs() < 1e-9);
        assert_eq!(sol.records.len(), sol.estimates.len());
        assert_eq!(sol.records[0].h_taken, 0.0);
    }

    #[test]
    fn split_path_matches_single_segment() {
        let opts = IntegrationOptions::default();
        let whole = integrate_segment(&exp_sys(), &[c(1.0, 0.0)], c(0.0, 0.0), c(1.0, 0.0), &opts).unwrap();
        let path = PathSpec::new(vec![c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]).unwrap();
        let split = integrate_path(&exp_sys(), &[c(1.0, 0.0)], &path, &opts).unwrap();
        let a = whole.final_state().unwrap()[0];
        let b = split.final_state().unwrap()[0];
        assert!((a - b).norm() < 1e-10);
        // joins are not duplicated and indices are global
        for (i, r) in split.records.iter().enumerate() {
            assert_eq!(r.index, i);
        }
        assert_eq!(split.records.iter().filter(|r| r.t == c(0.5, 0.0)).count(), 1);
    }

    #[test]
    fn max_steps_returns_partial_results() {
        let opts = IntegrationOptions {
            max_steps: 1,
            ..Default::default()
        };
        let path = PathSpec::new(vec![c(0.0, 0.0), c(100.0, 0.0)]).unwrap();
        let err = integrate_path(&exp_sys(), &[c(1.0, 0.0)], &path, &opts).unwrap_err();
        assert!(matches!(err.error, StepError::MaxSteps(1)));
        assert_eq!(err.partial.records.len(), 2);
    }

    #[test]
    fn options_are_validated() {
        let bad = IntegrationOptions {
            safety: 1.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(OptionsError::Safety(_))));
        let bad = IntegrationOptions {
            ts_order: 7,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(OptionsError::OrderBelowWindow { .. })));
        let bad = IntegrationOptions {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(IntegrationOptions::default().validate().is_ok());
    }

    #[test]
    fn path_validation() {
        assert!(matches!(
            PathSpec::new(vec![c(0.0, 0.0)]),
            Err(PathError::TooFewVertices(1))
        ));
        assert!(matches!(
            PathSpec::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]),
            Err(PathError::RepeatedVertex(1))
        ));
        assert!(PathSpec::new(vec![c(0.0, 0.0), c(f64::NAN, 0.0)]).is_err());
        let p = PathSpec::new(vec![c(0.0, 0.0), c(2.0, 0.0), c(2.0, 2.0)]).unwrap();
        assert!((p.distance_to(c(1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((p.length() - 4.0).abs() < 1e-15);
    }
}
