//! Step table, CSV schemas and plot data.

use std::io::{Read, Write};

use num_complex::Complex64;
use singmap::{Atlas, PathSolution};

use crate::error::CliError;

/// Shortest round-trip text, in exponent form for very small or large values.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Fixed-point step table, steps numbered from 1.
pub fn write_table<W: Write>(mut w: W, sol: &PathSolution) -> std::io::Result<()> {
    let dim = sol.records.first().map_or(0, |r| r.y.len());
    let mut header = format!("{:>4}  {:^19}", "Step", "Complex time t");
    for k in 0..dim {
        let name = match k {
            0 => "y".to_string(),
            1 => "y'".to_string(),
            _ => format!("y{}", k + 1),
        };
        header.push_str(&format!("  {name:^21}"));
    }
    writeln!(w, "{}", header.trim_end())?;
    for r in &sol.records {
        write!(w, "{:4}  {}", r.index + 1, cell(r.t, 3, 7))?;
        for y in &r.y {
            write!(w, "  {}", cell(*y, 4, 8))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn cell(z: Complex64, prec: usize, width: usize) -> String {
    format!("{:>width$.prec$} + {:>width$.prec$} i", z.re, z.im)
}

/// `index,t_re,t_im,y1_re,y1_im,...,h`
pub fn write_steps<W: Write>(w: W, sol: &PathSolution, dim: usize) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["index".to_string(), "t_re".into(), "t_im".into()];
    for k in 1..=dim {
        header.push(format!("y{k}_re"));
        header.push(format!("y{k}_im"));
    }
    header.push("h".into());
    out.write_record(&header)?;
    for r in &sol.records {
        let mut row = vec![r.index.to_string(), num(r.t.re), num(r.t.im)];
        for y in &r.y {
            row.push(num(y.re));
            row.push(num(y.im));
        }
        row.push(num(r.h_taken));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// `step,loc_re,loc_im,order_re,order_im,residual,confidence,accepted`
pub fn write_estimates<W: Write>(w: W, sol: &PathSolution) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "step",
        "loc_re",
        "loc_im",
        "order_re",
        "order_im",
        "residual",
        "confidence",
        "accepted",
    ])?;
    for (step, e) in sol.estimates.iter().enumerate() {
        out.write_record([
            step.to_string(),
            num(e.location.re),
            num(e.location.im),
            num(e.order_s.re),
            num(e.order_s.im),
            num(e.residual),
            num(e.confidence),
            e.accepted.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `re,im,confirmed` for every registry entry.
pub fn write_scatter<W: Write>(w: W, atlas: &Atlas) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["re", "im", "confirmed"])?;
    for s in atlas.singularities() {
        out.write_record([num(s.location.re), num(s.location.im), s.confirmed.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a steps CSV and emits `index,t_re,y_re,y_im` for the first component.
pub fn write_trace<R: Read, W: Write>(r: R, w: W) -> Result<(), CliError> {
    let mut input = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "t_re", "y_re", "y_im"])?;
    let mut rows = input.records();
    let columns = match rows.next() {
        Some(header) => {
            let header = header?;
            let col = |name: &str| {
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| CliError::Config(format!("steps CSV has no `{name}` column")))
            };
            Some([col("index")?, col("t_re")?, col("y1_re")?, col("y1_im")?])
        }
        None => None,
    };
    if let Some(columns) = columns {
        for row in rows {
            let row = row?;
            out.write_record(columns.iter().map(|&i| row.get(i).unwrap_or("")))?;
        }
    }
    out.flush()?;
    Ok(())
}
