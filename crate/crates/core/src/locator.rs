//! Primary-singularity location from the tail of a Taylor series.
//!
//! Near a dominant singularity at distance `a` from the expansion point, the
//! tail of a series behaves like that of `w(h) = (a - h)^(-s)`, whose
//! coefficients obey
//!
//! ```text
//! k Y[k+1] = (k-1) Y[k] x1 + Y[k] x2,   x1 = 1/a, x2 = s/a
//! ```
//!
//! with `Y[k]` the 1-based coefficient array (`Y[k]` multiplies `h^(k-1)`).
//! Taking `k = p - window, ..., p - 1` gives an overdetermined 2-unknown
//! system whose least-squares residual measures how well the model fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;
use crate::taylor::{is_finite, TruncatedSeries};

pub const DEFAULT_WINDOW: usize = 6;
pub const DEFAULT_ACCEPT_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_MERGE_TOL: f64 = 1e-3;
/// Largest accepted ratio of singular values of the tail system.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityEstimate {
    /// Absolute position in the t-plane (`step_point + a`).
    #[serde(with = "crate::complex_pair")]
    pub location: Complex64,
    #[serde(with = "crate::complex_pair")]
    pub order_s: Complex64,
    #[serde(with = "crate::complex_pair::lossy_f64")]
    pub residual: f64,
    pub confidence: f64,
    #[serde(with = "crate::complex_pair")]
    pub step_point: Complex64,
    pub accepted: bool,
}

impl SingularityEstimate {
    fn rejected(step_point: Complex64, location: Complex64, order_s: Complex64, residual: f64) -> Self {
        Self {
            location,
            order_s,
            residual,
            confidence: confidence_from_residual(residual),
            step_point,
            accepted: false,
        }
    }

    /// Distance from the expansion point to the estimated singularity.
    pub fn radius(&self) -> f64 {
        (self.location - self.step_point).norm()
    }
}

/// Maps a relative residual to `[0, 1]`: `-log10(residual) / 16`, clipped.
pub fn confidence_from_residual(residual: f64) -> f64 {
    if !residual.is_finite() {
        return 0.0;
    }
    (-residual.max(1e-16).log10() / 16.0).clamp(0.0, 1.0)
}

/// Fits the tail of `series` to the single-singularity model.
///
/// A poor fit, a degenerate tail or an ill-conditioned system produce a
/// rejected estimate rather than an error; only a series too short for the
/// window is an error.
pub fn fit_primary_singularity(
    series: &TruncatedSeries,
    window: usize,
    accept_threshold: f64,
) -> Result<SingularityEstimate, SeriesError> {
    let p = series.order();
    if window < 2 || p < window + 2 {
        return Err(SeriesError::OrderTooLow(p));
    }
    let t0 = series.t0();
    let nan = Complex64::new(f64::NAN, f64::NAN);

    // Y[k] (1-based) is coeffs[k - 1]; rows use k = p - window ..= p - 1,
    // touching coeffs[p - window - 1 ..= p - 1].
    let tail = &series.coeffs()[p - window - 1..p];
    if tail.iter().any(|z| !is_finite(*z)) {
        return Ok(SingularityEstimate::rejected(t0, nan, nan, f64::INFINITY));
    }
    // Normalize so that very large or tiny coefficients do not under/overflow
    // the factorization; the model is homogeneous so the fit is unchanged.
    let scale = tail.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(SingularityEstimate::rejected(t0, nan, nan, f64::INFINITY));
    }
    let y = |k: usize| series.coeffs()[k - 1] / scale;

    let mut a = DMatrix::<Complex64>::zeros(window, 2);
    let mut b = DVector::<Complex64>::zeros(window);
    for (row, k) in (p - window..p).enumerate() {
        let yk = y(k);
        a[(row, 0)] = yk * (k - 1) as f64;
        a[(row, 1)] = yk;
        b[row] = y(k + 1) * k as f64;
    }

    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok(SingularityEstimate::rejected(t0, nan, nan, f64::INFINITY));
    }

    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = s_max / s_min;
    if s_min == 0.0 || condition.is_nan() || condition > MAX_CONDITION {
        return Ok(SingularityEstimate::rejected(t0, nan, nan, f64::INFINITY));
    }
    let x = match svd.solve(&b, 0.0) {
        Ok(x) => x,
        Err(_) => return Ok(SingularityEstimate::rejected(t0, nan, nan, f64::INFINITY)),
    };
    let (x1, x2) = (x[0], x[1]);
    let residual = (&a * &x - &b).norm() / b_norm;

    let offset = x1.inv();
    let order_s = x2 / x1;
    if x1 == Complex64::new(0.0, 0.0) || !is_finite(offset) || !is_finite(order_s) {
        return Ok(SingularityEstimate::rejected(t0, nan, nan, residual));
    }
    let location = t0 + offset;
    let accepted = residual <= accept_threshold;
    Ok(SingularityEstimate {
        location,
        order_s,
        residual,
        confidence: confidence_from_residual(residual),
        step_point: t0,
        accepted,
    })
}

/// Where an atlas entry's support came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub campaign: String,
    pub step: usize,
}

/// A deduplicated singularity backed by one or more accepted estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SingularityRecord", from = "SingularityRecord")]
pub struct Singularity {
    pub location: Complex64,
    /// Confidence-weighted mean of `Re(s)` over the supporting estimates.
    pub order: f64,
    /// Mean confidence of the supporting estimates.
    pub confidence: f64,
    pub support_count: usize,
    pub confirmed: bool,
    pub sources: Vec<Source>,
}

#[derive(Serialize, Deserialize)]
struct SingularityRecord {
    re: f64,
    im: f64,
    order: f64,
    confidence: f64,
    support: usize,
    confirmed: bool,
    #[serde(default)]
    sources: Vec<Source>,
}

impl From<Singularity> for SingularityRecord {
    fn from(s: Singularity) -> Self {
        Self {
            re: s.location.re,
            im: s.location.im,
            order: s.order,
            confidence: s.confidence,
            support: s.support_count,
            confirmed: s.confirmed,
            sources: s.sources,
        }
    }
}

impl From<SingularityRecord> for Singularity {
    fn from(r: SingularityRecord) -> Self {
        Self {
            location: Complex64::new(r.re, r.im),
            order: r.order,
            confidence: r.confidence,
            support_count: r.support,
            confirmed: r.confirmed,
            sources: r.sources,
        }
    }
}

impl Singularity {
    fn from_estimate(e: &SingularityEstimate, source: Option<Source>) -> Self {
        Self {
            location: e.location,
            order: e.order_s.re,
            confidence: e.confidence,
            support_count: 1,
            confirmed: false,
            sources: source.into_iter().collect(),
        }
    }

    fn weight(&self) -> f64 {
        self.confidence.max(MIN_WEIGHT) * self.support_count as f64
    }

    fn absorb(&mut self, other: Singularity) {
        let (w1, w2) = (self.weight(), other.weight());
        let w = w1 + w2;
        self.location = (self.location * w1 + other.location * w2) / w;
        self.order = (self.order * w1 + other.order * w2) / w;
        self.support_count += other.support_count;
        self.confidence = w / self.support_count as f64;
        self.confirmed = self.support_count >= 2;
        self.sources.extend(other.sources);
    }
}

const MIN_WEIGHT: f64 = 1e-12;

/// Counts produced by [`merge_estimates`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeSummary {
    pub new: usize,
    pub merged: usize,
    pub rejected: usize,
}

/// Folds accepted estimates into `existing`.
///
/// An estimate joins the nearest entry within `merge_tol`, otherwise it opens
/// a new entry. Entries that drift within `merge_tol` of each other are then
/// coalesced, so no two entries end up closer than `merge_tol`. Rejected
/// estimates are counted and dropped. `campaign`, when given, tags each
/// estimate with its index in `new` as the step index.
pub fn merge_estimates(
    existing: &mut Vec<Singularity>,
    new: &[SingularityEstimate],
    merge_tol: f64,
    campaign: Option<&str>,
) -> MergeSummary {
    let mut summary = MergeSummary::default();
    let before = existing.len();
    for (step, e) in new.iter().enumerate() {
        if !e.accepted || !is_finite(e.location) {
            summary.rejected += 1;
            continue;
        }
        let source = campaign.map(|c| Source {
            campaign: c.to_string(),
            step,
        });
        let incoming = Singularity::from_estimate(e, source);
        match nearest(existing, e.location) {
            Some((i, d)) if d <= merge_tol => {
                existing[i].absorb(incoming);
                summary.merged += 1;
            }
            _ => existing.push(incoming),
        }
    }
    // Coalesce entries whose centroids moved within tolerance of each other.
    let mut i = 0;
    while i < existing.len() {
        let mut j = i + 1;
        let mut changed = false;
        while j < existing.len() {
            if (existing[i].location - existing[j].location).norm() <= merge_tol {
                let other = existing.remove(j);
                existing[i].absorb(other);
                changed = true;
            } else {
                j += 1;
            }
        }
        if !changed {
            i += 1;
        }
    }
    let accepted = new.len() - summary.rejected;
    summary.new = existing.len().saturating_sub(before);
    summary.merged = accepted - summary.new;
    summary
}

/// Index of and distance to the entry nearest `z`.
pub fn nearest(entries: &[Singularity], z: Complex64) -> Option<(usize, f64)> {
    entries
        .iter()
        .enumerate()
        .map(|(i, s)| (i, (s.location - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}
