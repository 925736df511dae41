//! Result emission: per-step trace CSVs, sweep summary CSVs, and a
//! success-rate-versus-cost scatter as a standalone SVG.
//!
//! Floats are serialized with nine significant digits. The cumulative
//! metric columns are computed from the *serialized* step values, so
//! parsing a trace CSV and recomputing its metrics reproduces the stored
//! columns exactly, and re-emitting a parsed trace is byte-identical.

use crate::harness::SweepSummary;
use crate::metrics::{RunTrace, TraceStep};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Nine-significant-digit serialization used for every float column.
pub fn format_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// The double a reader recovers from the nine-digit form.
pub fn round_sig9(v: f64) -> f64 {
    format_sig9(v).parse().expect("formatted float reparses")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Render the trace CSV: `run_id, t, x_0..x_{d-1}, f_x, c_t, z_t, y_t,
/// in_target, success_rate, norm_cum_cost, regret`.
pub fn render_trace_csv(trace: &RunTrace) -> String {
    let dim = trace.steps.first().map(|s| s.x.len()).unwrap_or(0);
    let mut out = String::new();
    out.push_str("run_id,t");
    for d in 0..dim {
        let _ = write!(out, ",x_{d}");
    }
    out.push_str(",f_x,c_t,z_t,y_t,in_target,success_rate,norm_cum_cost,regret\n");

    let range = trace.f_max - trace.f_min;
    let f_star = trace.f_star;
    let mut hits = 0usize;
    let mut cum_cost = 0.0;
    let mut cum_regret = 0.0;
    for (i, step) in trace.steps.iter().enumerate() {
        let f_x = round_sig9(step.f_x);
        let c = round_sig9(step.c);
        let z = round_sig9(step.z);
        let y = round_sig9(step.y);
        if step.in_target {
            hits += 1;
        }
        cum_cost += c.abs();
        cum_regret += f_star - f_x;
        let _ = write!(out, "{},{}", trace.run_id, step.t);
        for v in &step.x {
            let _ = write!(out, ",{}", format_sig9(round_sig9(*v)));
        }
        let _ = writeln!(
            out,
            ",{},{},{},{},{},{},{},{}",
            format_sig9(f_x),
            format_sig9(c),
            format_sig9(z),
            format_sig9(y),
            u8::from(step.in_target),
            format_sig9(hits as f64 / (i + 1) as f64),
            format_sig9(cum_cost / range),
            format_sig9(cum_regret),
        );
    }
    out
}

pub fn write_trace_csv(trace: &RunTrace, path: &Path) -> Result<()> {
    std::fs::write(path, render_trace_csv(trace)).map_err(io_err(path))
}

/// Parse a trace CSV back into a trace. The range constants and certified
/// optimum are not stored in the file, so the caller supplies them.
pub fn read_trace_csv(path: &Path, f_min: f64, f_max: f64, f_star: f64) -> Result<RunTrace> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_trace_csv(&text, f_min, f_max, f_star)
}

pub fn parse_trace_csv(text: &str, f_min: f64, f_max: f64, f_star: f64) -> Result<RunTrace> {
    let bad = |msg: String| Error::InvalidInput(format!("trace CSV: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let dim = columns
        .iter()
        .filter(|c| c.starts_with("x_"))
        .count();
    if dim == 0 || columns.len() != dim + 10 {
        return Err(bad(format!("unexpected header `{header}`")));
    }

    let mut run_id = String::new();
    let mut steps = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 10 {
            return Err(bad(format!("row {}: {} fields, expected {}", lineno + 2, fields.len(), dim + 10)));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| bad(format!("row {}: `{s}` is not a number", lineno + 2)))
        };
        run_id = fields[0].to_string();
        let t: usize = fields[1]
            .parse()
            .map_err(|_| bad(format!("row {}: bad step index", lineno + 2)))?;
        let x: Vec<f64> = fields[2..2 + dim]
            .iter()
            .map(|s| num(s))
            .collect::<Result<_>>()?;
        let f_x = num(fields[2 + dim])?;
        let c = num(fields[3 + dim])?;
        let z = num(fields[4 + dim])?;
        let y = num(fields[5 + dim])?;
        let in_target = match fields[6 + dim] {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("row {}: in_target `{other}`", lineno + 2))),
        };
        steps.push(TraceStep {
            t,
            x,
            f_x,
            c,
            z,
            y,
            in_target,
        });
    }
    Ok(RunTrace {
        run_id,
        steps,
        f_min,
        f_max,
        f_star,
    })
}

/// Render the sweep summary CSV: one row per `(theta, seed)` cell, then one
/// `avg` row per theta. Failed cells carry NaN metrics.
pub fn render_summary_csv(summary: &SweepSummary) -> String {
    let mut out = String::from("theta,seed,success_rate_T,norm_cost_T,regret_T\n");
    for cell in &summary.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_sig9(cell.theta),
            cell.seed,
            format_sig9(cell.success_rate),
            format_sig9(cell.normalized_cost),
            format_sig9(cell.regret),
        );
    }
    for avg in &summary.averages {
        let _ = writeln!(
            out,
            "{},avg,{},{},{}",
            format_sig9(avg.theta),
            format_sig9(avg.success_rate),
            format_sig9(avg.normalized_cost),
            format_sig9(avg.regret),
        );
    }
    out
}

pub fn write_summary_csv(summary: &SweepSummary, path: &Path) -> Result<()> {
    std::fs::write(path, render_summary_csv(summary)).map_err(io_err(path))
}

/// Success-rate-versus-cost scatter of the per-theta averages, cost on a
/// log axis as in the result figures this mirrors.
pub fn render_scatter_svg(summary: &SweepSummary, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const ML: f64 = 70.0;
    const MR: f64 = 30.0;
    const MT: f64 = 50.0;
    const MB: f64 = 60.0;

    let points: Vec<(f64, f64, f64)> = summary
        .averages
        .iter()
        .filter(|a| a.runs_ok > 0 && a.normalized_cost.is_finite() && a.success_rate.is_finite())
        .map(|a| (a.normalized_cost, a.success_rate, a.theta))
        .collect();

    // Log-scaled cost axis; zero-cost points are pinned to the left edge.
    let positive_min = points
        .iter()
        .map(|p| p.0)
        .filter(|&c| c > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor = if positive_min.is_finite() {
        (positive_min / 10.0).max(1e-12)
    } else {
        1e-3
    };
    let max_cost = points.iter().map(|p| p.0).fold(floor * 10.0, f64::max);
    let (lx, hx) = (floor.log10().floor(), max_cost.log10().ceil());
    let span = (hx - lx).max(1.0);

    let to_x = |cost: f64| ML + (cost.max(floor).log10() - lx) / span * (W - ML - MR);
    let to_y = |sr: f64| H - MB - sr.clamp(0.0, 1.0) * (H - MT - MB);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );
    // Axes.
    let _ = writeln!(
        s,
        r#"<line x1="{ML}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - MB,
        W - MR,
        H - MB
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}" stroke="black"/>"#,
        H - MB
    );
    // Y ticks at 0, 0.25, .., 1.
    for i in 0..=4 {
        let sr = i as f64 / 4.0;
        let y = to_y(sr);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{ML}" y2="{y}" stroke="black"/>"#,
            ML - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{sr:.2}</text>"#,
            ML - 9.0,
            y + 4.0
        );
    }
    // X ticks at powers of ten.
    let mut decade = lx;
    while decade <= hx + 1e-9 {
        let x = ML + (decade - lx) / span * (W - ML - MR);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            H - MB,
            H - MB + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{decade:.0}</text>"#,
            H - MB + 20.0
        );
        decade += 1.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">normalized cost (log)</text>"#,
        (ML + W - MR) / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {})">success rate</text>"#,
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    );
    for (cost, sr, theta) in &points {
        let (x, y) = (to_x(*cost), to_y(*sr));
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="steelblue" fill-opacity="0.8"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10">{theta}</text>"#,
            x + 7.0,
            y - 7.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_scatter_svg(summary: &SweepSummary, title: &str, path: &Path) -> Result<()> {
    std::fs::write(path, render_scatter_svg(summary, title)).map_err(io_err(path))
}
