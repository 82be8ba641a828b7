use std::fmt::Write as _;
use std::path::Path;

use nsii_core::{
    estimate, evaluate_policy_finite, solve_finite_horizon, welfare_report, MechanismKind, Params, Report,
};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;

pub const CSV_HEADER: &str =
    "p,delta,mechanism,mode,gsw,nsw,revenue,gsw_stderr,nsw_stderr,revenue_stderr,gross_impr_pct,net_impr_pct,profit_pct";

/// Crosscheck tolerance in standard errors.
pub const CROSSCHECK_Z: f64 = 3.0;

/// One CSV line. Optional cells print as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub p: f64,
    pub delta: f64,
    pub mechanism: String,
    pub mode: &'static str,
    pub gsw: Option<f64>,
    pub nsw: Option<f64>,
    pub revenue: Option<f64>,
    pub stderr: Option<[f64; 3]>,
    pub improvement: Option<[f64; 3]>,
}

impl Row {
    fn from_report(p: f64, delta: f64, kind: MechanismKind, mode: Mode, report: &Report, baseline_gsw: f64) -> Self {
        let imp = report.improvement_over(baseline_gsw);
        Self {
            p,
            delta,
            mechanism: kind.name().to_string(),
            mode: mode.name(),
            gsw: Some(report.gsw),
            nsw: Some(report.nsw),
            revenue: Some(report.revenue),
            stderr: report.stderr.map(|s| [s.gsw, s.nsw, s.revenue]),
            improvement: Some([imp.gross_pct, imp.net_pct, imp.profit_pct]),
        }
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(format_g12).unwrap_or_default();
        let mut line = format!(
            "{},{},{},{}",
            format_g12(self.p),
            format_g12(self.delta),
            self.mechanism,
            self.mode
        );
        for v in [self.gsw, self.nsw, self.revenue] {
            let _ = write!(line, ",{}", cell(v));
        }
        for arr in [self.stderr, self.improvement] {
            for i in 0..3 {
                let _ = write!(line, ",{}", cell(arr.map(|a| a[i])));
            }
        }
        line
    }
}

/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent form
/// outside `[1e-4, 1e12)`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Everything a run produced, plus crosscheck diagnostics.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub crosscheck_failures: Vec<String>,
}

impl RunOutput {
    pub fn csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv());
            out.push('\n');
        }
        out
    }
}

fn factor(cfg: &RunConfig) -> f64 {
    if cfg.normalize {
        1.0 - cfg.delta
    } else {
        1.0
    }
}

fn maybe_normalize(report: Report, cfg: &RunConfig) -> Report {
    if cfg.normalize {
        report.normalized(cfg.delta)
    } else {
        report
    }
}

/// Computes all rows for the configured grid and mode.
pub fn compute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let mut out = RunOutput::default();
    for &p in &cfg.grid {
        let params = Params::new(p, cfg.delta)?;
        if cfg.mode == Mode::Dp {
            dp_rows(cfg, &params, &mut out)?;
            continue;
        }
        let baseline = maybe_normalize(welfare_report(&params, MechanismKind::Bhw, cfg.kmax)?, cfg).gsw;
        for &kind in &cfg.mechanisms {
            let exact = matches!(cfg.mode, Mode::Analytic | Mode::Crosscheck)
                .then(|| welfare_report(&params, kind, cfg.kmax).map(|r| maybe_normalize(r, cfg)))
                .transpose()?;
            let simulated = matches!(cfg.mode, Mode::Simulate | Mode::Crosscheck)
                .then(|| {
                    estimate(&params, &kind.policy(params), cfg.episodes, cfg.horizon, cfg.seed)
                        .map(|r| maybe_normalize(r, cfg))
                })
                .transpose()?;
            if let Some(r) = &exact {
                out.rows
                    .push(Row::from_report(p, cfg.delta, kind, Mode::Analytic, r, baseline));
            }
            if let Some(r) = &simulated {
                out.rows
                    .push(Row::from_report(p, cfg.delta, kind, Mode::Simulate, r, baseline));
            }
            if let (Some(e), Some(s)) = (&exact, &simulated) {
                out.crosscheck_failures.extend(crosscheck(p, kind, e, s));
            }
        }
    }
    Ok(out)
}

fn dp_rows(cfg: &RunConfig, params: &Params, out: &mut RunOutput) -> Result<(), CliError> {
    let f = factor(cfg);
    let solution = solve_finite_horizon(params, cfg.horizon)?;
    let dp_row = |mechanism: &str, revenue: f64| Row {
        p: params.p(),
        delta: cfg.delta,
        mechanism: mechanism.to_string(),
        mode: Mode::Dp.name(),
        gsw: None,
        nsw: None,
        revenue: Some(revenue * f),
        stderr: None,
        improvement: None,
    };
    out.rows.push(dp_row("optimal", solution.root_value()));
    for &kind in &cfg.mechanisms {
        let value = evaluate_policy_finite(params, &kind.policy(*params), cfg.horizon)?;
        out.rows.push(dp_row(kind.name(), value));
    }
    Ok(())
}

/// Differences beyond `CROSSCHECK_Z` standard errors plus the truncation
/// bounds of both estimates.
fn crosscheck(p: f64, kind: MechanismKind, exact: &Report, sim: &Report) -> Vec<String> {
    let se = sim.stderr.expect("simulated reports carry standard errors");
    let slack = exact.truncation_bound + sim.truncation_bound + 1e-9;
    [
        ("gsw", exact.gsw, sim.gsw, se.gsw),
        ("nsw", exact.nsw, sim.nsw, se.nsw),
        ("revenue", exact.revenue, sim.revenue, se.revenue),
    ]
    .into_iter()
    .filter(|&(_, e, s, se)| (s - e).abs() > CROSSCHECK_Z * se + slack)
    .map(|(name, e, s, se)| {
        format!(
            "p={} {} {name}: analytic {} simulated {} (se {})",
            format_g12(p),
            kind.name(),
            format_g12(e),
            format_g12(s),
            format_g12(se)
        )
    })
    .collect()
}

/// Plot-ready two-column series, one file per curve. Uses analytic rows when
/// present and simulated rows otherwise.
pub fn series_files(out: &RunOutput) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = Vec::new();
    let source = if out.rows.iter().any(|r| r.mode == "analytic") {
        "analytic"
    } else {
        "simulate"
    };
    let mut push = |name: String, p: f64, v: f64| {
        let line = format!("{} {}\n", format_g12(p), format_g12(v));
        match files.iter_mut().find(|(n, _)| *n == name) {
            Some((_, body)) => body.push_str(&line),
            None => files.push((name, line)),
        }
    };
    for row in out.rows.iter().filter(|r| r.mode == source) {
        let m = &row.mechanism;
        for (col, v) in [("gsw", row.gsw), ("nsw", row.nsw), ("revenue", row.revenue)] {
            if let Some(v) = v {
                push(format!("{m}_{col}.dat"), row.p, v);
            }
        }
        if let (Some(imp), true) = (row.improvement, m == "nsii") {
            for (col, v) in ["gross_impr_pct", "net_impr_pct", "profit_pct"].iter().zip(imp) {
                push(format!("{m}_{col}.dat"), row.p, v);
            }
        }
    }
    if out.rows.iter().any(|r| r.mode == "dp") {
        for row in &out.rows {
            if let Some(v) = row.revenue {
                push(format!("dp_{}_revenue.dat", row.mechanism), row.p, v);
            }
        }
    }
    files
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Computes, writes CSV and series, and reports crosscheck failures as an error
/// after the output is on disk.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let out = compute(cfg)?;
    let csv = out.csv();
    match &cfg.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(dir) = &cfg.series {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        for (name, body) in series_files(&out) {
            write_file(&dir.join(name), &body)?;
        }
    }
    if !out.crosscheck_failures.is_empty() {
        return Err(CliError::Crosscheck(out.crosscheck_failures.join("; ")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_formatting() {
        assert_eq!(format_g12(0.0), "0");
        assert_eq!(format_g12(0.9), "0.9");
        assert_eq!(format_g12(0.37), "0.37");
        assert_eq!(format_g12(7.627705431837171), "7.62770543184");
        assert_eq!(format_g12(-0.5), "-0.5");
        assert_eq!(format_g12(100.0), "100");
        assert_eq!(format_g12(1.5e-5), "1.5e-05");
        assert_eq!(format_g12(2.0e13), "2e+13");
        assert_eq!(format_g12(0.0001), "0.0001");
    }

    #[test]
    fn empty_cells_keep_column_count() {
        let row = Row {
            p: 0.25,
            delta: 0.9,
            mechanism: "bhw".into(),
            mode: "analytic",
            gsw: Some(1.0),
            nsw: Some(1.0),
            revenue: Some(0.0),
            stderr: None,
            improvement: Some([0.0; 3]),
        };
        let line = row.to_csv();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(line, "0.25,0.9,bhw,analytic,1,1,0,,,,0,0,0");
    }
}
