//! Machine-readable experiment reports: CSV (versioned schema), JSON, and
//! two-column plot-data series.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Schema version comment emitted at the top of every CSV report.
pub const CSV_SCHEMA_HEADER: &str = "# svi-kit report v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    PlotData,
}

impl ReportFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "plot-data" | "plot" => Ok(ReportFormat::PlotData),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

/// Scientific notation with six significant digits, locale independent.
fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Residual-vs-iteration row shared by the asymptotics and scheme-comparison
/// experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub family: String,
    pub n: usize,
    pub instance: u64,
    pub scheme: String,
    pub k: u64,
    pub residual: Option<f64>,
    pub seconds: f64,
    pub status: String,
}

/// Empirical-versus-theoretical error row for the rate experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub family: String,
    pub n: usize,
    pub k: u64,
    pub psi_e: f64,
    pub psi_b: f64,
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub growth_b: f64,
    pub nu_sq: f64,
    pub m_b: f64,
    pub m_nu: f64,
    pub m: f64,
    /// Log-log slope of `psi_e` against `k` over the decade window, repeated
    /// on every row of the same instance.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub k: u64,
    pub multiplier: f64,
    pub gamma0: f64,
    pub psi_e: Option<f64>,
    /// Smallest averaged error among the multipliers at this `(n, k)`.
    pub best: bool,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseRow {
    pub family: String,
    pub n: usize,
    pub property: String,
    pub pairs: usize,
    pub violations: usize,
    pub modulus: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Report {
    Asymptotics { rows: Vec<ResidualRow> },
    Compare { rows: Vec<ResidualRow> },
    Rate { rows: Vec<RateRow> },
    Sweep { rows: Vec<SweepRow> },
    Diagnose { rows: Vec<DiagnoseRow> },
}

impl Report {
    pub fn is_empty(&self) -> bool {
        match self {
            Report::Asymptotics { rows } | Report::Compare { rows } => rows.is_empty(),
            Report::Rate { rows } => rows.is_empty(),
            Report::Sweep { rows } => rows.is_empty(),
            Report::Diagnose { rows } => rows.is_empty(),
        }
    }

    /// Number of rows carrying an error status.
    pub fn error_count(&self) -> usize {
        match self {
            Report::Asymptotics { rows } | Report::Compare { rows } => {
                rows.iter().filter(|r| r.status != "ok").count()
            }
            Report::Rate { .. } => 0,
            Report::Sweep { rows } => rows.iter().filter(|r| r.status != "ok").count(),
            Report::Diagnose { rows } => rows.iter().filter(|r| r.status != "ok").count(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CSV_SCHEMA_HEADER}");
        match self {
            Report::Asymptotics { rows } | Report::Compare { rows } => {
                let _ = writeln!(out, "family,n,instance,scheme,k,residual,seconds,status");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{:.3},{}",
                        r.family,
                        r.n,
                        r.instance,
                        r.scheme,
                        r.k,
                        opt_sci(r.residual),
                        r.seconds,
                        r.status
                    );
                }
            }
            Report::Rate { rows } => {
                let _ = writeln!(
                    out,
                    "family,n,k,psi_e,psi_b,a,b,sigma,growth_b,nu_sq,m_b,m_nu,m,slope"
                );
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        r.family,
                        r.n,
                        r.k,
                        sci(r.psi_e),
                        sci(r.psi_b),
                        sci(r.a),
                        sci(r.b),
                        sci(r.sigma),
                        sci(r.growth_b),
                        sci(r.nu_sq),
                        sci(r.m_b),
                        sci(r.m_nu),
                        sci(r.m),
                        opt_sci(r.slope)
                    );
                }
            }
            Report::Sweep { rows } => {
                let _ = writeln!(out, "family,n,k,multiplier,gamma0,psi_e,best,status");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.family,
                        r.n,
                        r.k,
                        sci(r.multiplier),
                        sci(r.gamma0),
                        opt_sci(r.psi_e),
                        r.best,
                        r.status
                    );
                }
            }
            Report::Diagnose { rows } => {
                let _ = writeln!(out, "family,n,property,pairs,violations,modulus,status");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.family,
                        r.n,
                        r.property,
                        r.pairs,
                        r.violations,
                        opt_sci(r.modulus),
                        r.status
                    );
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Two-column `(k, value)` series, one block per instance, suitable for
    /// external plotting tools.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::new();
        let mut block = |label: &str, points: &[(String, String)]| {
            let _ = writeln!(out, "# series: {label}");
            for (x, y) in points {
                let _ = writeln!(out, "{x} {y}");
            }
            let _ = writeln!(out);
        };
        match self {
            Report::Asymptotics { rows } | Report::Compare { rows } => {
                let mut keys: Vec<_> = rows
                    .iter()
                    .map(|r| (r.family.clone(), r.n, r.instance, r.scheme.clone()))
                    .collect();
                keys.sort();
                keys.dedup();
                for (family, n, instance, scheme) in keys {
                    let points: Vec<_> = rows
                        .iter()
                        .filter(|r| {
                            r.family == family
                                && r.n == n
                                && r.instance == instance
                                && r.scheme == scheme
                                && r.residual.is_some()
                        })
                        .map(|r| (r.k.to_string(), sci(r.residual.unwrap())))
                        .collect();
                    block(
                        &format!("family={family} n={n} instance={instance} scheme={scheme}"),
                        &points,
                    );
                }
            }
            Report::Rate { rows } => {
                let mut ns: Vec<_> = rows.iter().map(|r| r.n).collect();
                ns.sort_unstable();
                ns.dedup();
                for n in ns {
                    let points: Vec<_> = rows
                        .iter()
                        .filter(|r| r.n == n)
                        .map(|r| (r.k.to_string(), sci(r.psi_e)))
                        .collect();
                    block(&format!("psi_e n={n}"), &points);
                    let bounds: Vec<_> = rows
                        .iter()
                        .filter(|r| r.n == n)
                        .map(|r| (r.k.to_string(), sci(r.psi_b)))
                        .collect();
                    block(&format!("psi_b n={n}"), &bounds);
                }
            }
            Report::Sweep { rows } => {
                let mut keys: Vec<_> = rows
                    .iter()
                    .map(|r| (r.n, r.multiplier.to_bits()))
                    .collect();
                keys.sort();
                keys.dedup();
                for (n, bits) in keys {
                    let multiplier = f64::from_bits(bits);
                    let points: Vec<_> = rows
                        .iter()
                        .filter(|r| r.n == n && r.multiplier == multiplier && r.psi_e.is_some())
                        .map(|r| (r.k.to_string(), sci(r.psi_e.unwrap())))
                        .collect();
                    block(&format!("psi_e n={n} multiplier={multiplier}"), &points);
                }
            }
            Report::Diagnose { rows } => {
                let points: Vec<_> = rows
                    .iter()
                    .filter(|r| r.modulus.is_some())
                    .map(|r| (r.n.to_string(), sci(r.modulus.unwrap())))
                    .collect();
                block("modulus", &points);
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        if self.is_empty() {
            return Err(Error::Config("report contains no rows".into()));
        }
        match format {
            ReportFormat::Csv => Ok(self.to_csv()),
            ReportFormat::Json => self.to_json(),
            ReportFormat::PlotData => Ok(self.to_plot_data()),
        }
    }
}

/// Write a report to `path`; an empty report is an error and creates no file.
pub fn emit_report(report: &Report, format: ReportFormat, path: &Path) -> Result<()> {
    let body = report.render(format)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(body.as_bytes())?;
    Ok(())
}
