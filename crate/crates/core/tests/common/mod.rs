#![allow(dead_code)]

use num_complex::Complex64;
use singmap::{run_campaign, Atlas, IntegrationOptions, PainleveI, PathSpec, ProblemSpec};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn y0() -> Vec<Complex64> {
    vec![c(0.5, 0.0), c(0.9, 0.0)]
}

pub fn problem() -> ProblemSpec {
    ProblemSpec {
        label: "painleve1".into(),
        t0: c(0.0, 0.0),
        y0: y0(),
    }
}

pub fn path(vertices: &[Complex64]) -> PathSpec {
    PathSpec::new(vertices.to_vec()).unwrap()
}

/// Multi-segment route that crosses the first real pole at a small height.
pub fn route() -> PathSpec {
    path(&[c(0.0, 0.0), c(1.0, 0.3), c(20.5, 0.3)])
}

/// Long excursion through the upper half plane.
pub fn wander() -> PathSpec {
    path(&[c(0.0, 0.0), c(18.0, 5.0), c(5.0, 18.0), c(-15.0, 2.0)])
}

/// Elongated hexagon enclosing only the real pole near 1.3486.
pub fn hexagon() -> PathSpec {
    path(&[
        c(0.0, 0.0),
        c(0.8, 0.0),
        c(1.3, -0.6),
        c(2.6, -0.6),
        c(3.1, 0.0),
        c(2.6, 0.6),
        c(1.3, 0.6),
        c(0.8, 0.0),
        c(0.0, 0.0),
    ])
}

/// Options for mapping sweeps. The larger minimum step aborts a row that
/// grazes a pole instead of letting it report a cascade of spurious fits.
pub fn mapping_options() -> IntegrationOptions {
    IntegrationOptions {
        min_step: 1e-3,
        ..Default::default()
    }
}

/// Horizontal rows `0 -> i h -> +-20 + i h` for h = 0.25, 0.75, ..., 19.75,
/// covering the upper half of the [-20, 20] x [0, 20] square.
pub fn row_sweep() -> Vec<(String, PathSpec)> {
    let mut rows = Vec::new();
    for i in 0..40 {
        let h = 0.25 + 0.5 * i as f64;
        for (tag, end) in [("east", 20.0), ("west", -20.0)] {
            rows.push((format!("row-{tag}-{i:02}"), path(&[c(0.0, 0.0), c(0.0, h), c(end, h)])));
        }
    }
    rows
}

pub fn map_rows() -> Atlas {
    let opts = mapping_options();
    let mut atlas = Atlas::new(opts.merge_tol);
    for (id, p) in row_sweep() {
        let run = run_campaign(id, &PainleveI, problem(), p, opts.clone());
        atlas.ingest(run.campaign, &run.estimates).unwrap();
    }
    atlas
}

pub fn map_route() -> Atlas {
    let opts = IntegrationOptions::default();
    let mut atlas = Atlas::new(opts.merge_tol);
    let run = run_campaign("route", &PainleveI, problem(), route(), opts);
    assert!(run.failure.is_none(), "{:?}", run.failure);
    atlas.ingest(run.campaign, &run.estimates).unwrap();
    atlas
}

/// Reference solution at t = 20 from an independent 50-digit Taylor
/// integration along two different paths.
pub const Y20: f64 = 75.44598670965368;
pub const DY20: f64 = -1311.81748609223;
