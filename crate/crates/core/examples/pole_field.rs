//! Maps the singularities of the Painleve I solution with y(0) = 0.5,
//! y'(0) = 0.9 over the square |Re t|, |Im t| <= 20 and writes the atlas.
//!
//! cargo run --release --example pole_field -- field.csv [field.json]

use num_complex::Complex64;
use singmap::{run_campaign, Atlas, IntegrationOptions, PainleveI, PathSpec, ProblemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let csv = args.first().map(String::as_str).unwrap_or("pole_field.csv");
    let problem = ProblemSpec {
        label: "painleve1".into(),
        t0: Complex64::new(0.0, 0.0),
        y0: vec![Complex64::new(0.5, 0.0), Complex64::new(0.9, 0.0)],
    };
    // rows grazing a pole abort instead of crawling through it
    let opts = IntegrationOptions {
        min_step: 1e-3,
        ..Default::default()
    };
    let mut atlas = Atlas::new(opts.merge_tol);
    let mut aborted = 0;
    for i in 0..40 {
        let h = 0.25 + 0.5 * i as f64;
        for (side, sign) in [("up", 1.0), ("down", -1.0)] {
            for end in [20.0, -20.0] {
                let path = PathSpec::new(vec![
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, sign * h),
                    Complex64::new(end, sign * h),
                ])?;
                let run = run_campaign(
                    format!("{side}-{i:02}-{end}"),
                    &PainleveI,
                    problem.clone(),
                    path,
                    opts.clone(),
                );
                aborted += usize::from(run.failure.is_some());
                atlas.ingest(run.campaign, &run.estimates)?;
            }
        }
    }
    println!(
        "{} entries, {} confirmed, {aborted} rows aborted",
        atlas.len(),
        atlas.confirmed().count()
    );
    atlas.export_csv(csv)?;
    if let Some(json) = args.get(1) {
        atlas.save(json)?;
    }
    Ok(())
}
