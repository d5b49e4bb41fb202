//! Route generators: long jumps over the real axis, semicircular pole vaults,
//! closed loops, and the closed-loop return check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PathError, StepError};
use crate::integrator::{integrate_path, IntegrationFailure, IntegrationOptions, PathSolution, PathSpec};
use crate::taylor::OdeSystem;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Upper,
    Lower,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VaultSpec {
    /// Real-axis pole positions in increasing order.
    pub poles: Vec<f64>,
    pub radius: f64,
    /// Straight segments per semicircle.
    pub chords: usize,
    pub side: Side,
}

impl Default for VaultSpec {
    fn default() -> Self {
        Self {
            poles: Vec::new(),
            radius: 0.3,
            chords: 8,
            side: Side::Upper,
        }
    }
}

impl VaultSpec {
    pub fn new(poles: Vec<f64>) -> Self {
        Self {
            poles,
            ..Default::default()
        }
    }
}

/// `0 -> |offset| + i offset -> t_target + i offset -> t_target`.
///
/// A negative offset gives the conjugate route below the axis.
pub fn long_jump_path(t_target: f64, offset: f64) -> Result<PathSpec, PathError> {
    if !(t_target > 0.0 && t_target.is_finite()) {
        return Err(PathError::Parameter(format!(
            "t_target must be positive, got {t_target}"
        )));
    }
    if offset == 0.0 || !offset.is_finite() {
        return Err(PathError::Parameter(format!("offset must be nonzero, got {offset}")));
    }
    PathSpec::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(offset.abs(), offset),
        Complex64::new(t_target, offset),
        Complex64::new(t_target, 0.0),
    ])
}

/// Real-axis route from 0 to `t_target` that hops over each pole along an
/// inscribed polygon of its semicircle.
pub fn pole_vault_path(spec: &VaultSpec, t_target: f64) -> Result<PathSpec, PathError> {
    if !(t_target > 0.0 && t_target.is_finite()) {
        return Err(PathError::Parameter(format!(
            "t_target must be positive, got {t_target}"
        )));
    }
    if !(spec.radius > 0.0 && spec.radius.is_finite()) {
        return Err(PathError::Parameter(format!(
            "radius must be positive, got {}",
            spec.radius
        )));
    }
    if spec.chords < 4 {
        return Err(PathError::Parameter(format!(
            "need at least 4 chords, got {}",
            spec.chords
        )));
    }
    let r = spec.radius;
    for &pole in &spec.poles {
        if !(pole > 0.0 && pole < t_target) {
            return Err(PathError::PoleOutOfRange { pole, target: t_target });
        }
    }
    for w in spec.poles.windows(2) {
        let gap = w[1] - w[0];
        if gap.is_nan() || gap <= 2.0 * r {
            return Err(PathError::OverlappingVaults {
                left: w[0],
                right: w[1],
                radius: r,
            });
        }
    }

    let sign = spec.side.sign();
    let mut vertices = vec![Complex64::new(0.0, 0.0)];
    for &pole in &spec.poles {
        // a pole closer than `radius` to either end gets a smaller vault so
        // the route still starts and ends on the real axis
        let r = r.min(0.5 * pole).min(0.5 * (t_target - pole));
        vertices.push(Complex64::new(pole - r, 0.0));
        for j in 1..spec.chords {
            let angle = PI * (1.0 - j as f64 / spec.chords as f64);
            vertices.push(Complex64::new(pole + r * angle.cos(), sign * r * angle.sin()));
        }
        vertices.push(Complex64::new(pole + r, 0.0));
    }
    vertices.push(Complex64::new(t_target, 0.0));
    PathSpec::new(vertices)
}

/// Closed polygon inscribed in a circle, counterclockwise, starting and
/// ending at `center + radius * e^(i start_angle)`.
pub fn circle_loop(center: Complex64, radius: f64, chords: usize, start_angle: f64) -> Result<PathSpec, PathError> {
    if !(radius > 0.0 && radius.is_finite()) || chords < 3 {
        return Err(PathError::Parameter(format!(
            "circle needs positive radius and >= 3 chords, got {radius} and {chords}"
        )));
    }
    let mut vertices: Vec<Complex64> = (0..chords)
        .map(|j| center + Complex64::from_polar(radius, start_angle + 2.0 * PI * j as f64 / chords as f64))
        .collect();
    vertices.push(vertices[0]);
    PathSpec::new(vertices)
}

/// `base -> loop -> base`: reach a loop from `base`, go around, come back.
pub fn excursion(base: Complex64, lp: &PathSpec) -> Result<PathSpec, PathError> {
    if !lp.is_closed() {
        return Err(PathError::NotClosed);
    }
    let mut vertices = vec![base];
    vertices.extend_from_slice(lp.vertices());
    vertices.push(base);
    PathSpec::new(vertices)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopCheck {
    /// Euclidean norm of the difference between the final and initial state.
    pub return_error: f64,
    pub solution: PathSolution,
}

/// Integrates around a closed path and measures how far the final state is
/// from the initial one.
pub fn closed_loop_check(
    sys: &dyn OdeSystem,
    y0: &[Complex64],
    lp: &PathSpec,
    opts: &IntegrationOptions,
) -> Result<LoopCheck, IntegrationFailure> {
    if !lp.is_closed() {
        return Err(IntegrationFailure {
            error: StepError::Path(PathError::NotClosed),
            partial: PathSolution::default(),
        });
    }
    let solution = integrate_path(sys, y0, lp, opts)?;
    let last = solution.final_state().expect("closed loop produced records");
    let return_error = last.iter().zip(y0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(LoopCheck { return_error, solution })
}
