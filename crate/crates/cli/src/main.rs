//! `momdet`: generate moment sequences, check determinacy criteria and
//! reproduce the published numeric tables.
//!
//! Exit codes: 0 ok, 1 tolerance failure (paper-table only), 2 input error,
//! 3 numeric error.

mod output;
mod tables;

use std::f64::consts::E;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momdet::criteria::{analyze, analyze_with, AnalysisReport, Criterion, QFunction};
use momdet::moments::io::{format_f64, from_csv, from_json, to_csv, to_json};
use momdet::moments::{generate_moments_tol, FamilySpec, MomentSequence, Support};
use momdet::quadrature::DEFAULT_REL_TOL;
use serde::Serialize;

use output::{render_rows, write_text, Format};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<momdet::error::Error> for CliError {
    fn from(e: momdet::error::Error) -> Self {
        CliError {
            code: if e.is_numeric() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "momdet",
    version,
    about = "Moment-determinacy checks for log-weighted exponential families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for quadrature
    #[arg(long, env = "MOMDET_REL_TOL", default_value_t = DEFAULT_REL_TOL)]
    rel_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the moments of a family
    Gen {
        /// e.g. "product[(1,1),(1,1)]", "symroot[(1,1),(1,1)]", exp, exp2, lognormal
        #[arg(long)]
        family: String,
        #[arg(long, env = "MOMDET_NMAX")]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Run determinacy checkers on a moment file (JSON or CSV)
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated subset of carleman, growth_rate, growth_rate_q, q_divergence, hardy
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<String>,
        /// q function: one, log, power(a) or table(v1,v2,...)
        #[arg(long, default_value = "log")]
        q: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce the published table of K_n ratios and moments
    PaperTable {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Compare S(t) with its saddle-point estimates
    Asym {
        /// Comma-separated t values
        #[arg(long, value_delimiter = ',', default_value = "50,100,500,1000")]
        t: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate W(t) with its elementary bounds; "e" is accepted as a value
    Wtable {
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the derivatives of Gamma at 1 with their bracketing bounds
    GammaDerivs {
        #[arg(long, env = "MOMDET_NMAX")]
        nmax: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_t(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let t = if s == "e" {
        E
    } else {
        s.parse::<f64>()
            .map_err(|_| CliError::input(format!("bad t value {s:?}")))?
    };
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::input(format!(
            "t must be finite and >= 0, got {s}"
        )));
    }
    Ok(t)
}

fn read_sequence(path: &PathBuf) -> Result<MomentSequence, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let seq = if text.trim_start().starts_with('#') {
        from_csv(&text)
    } else {
        from_json(&text)
    };
    seq.map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct MomentRow {
    order: usize,
    sign: i8,
    ln_moment: String,
}

fn render_sequence(seq: &MomentSequence, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(to_json(seq)? + "\n"),
        Format::Csv => Ok(to_csv(seq)?),
        Format::Human => {
            let step = match seq.support() {
                Support::Stieltjes => 1,
                Support::HamburgerSymmetric => 2,
            };
            let rows: Vec<MomentRow> = seq
                .entries()
                .iter()
                .enumerate()
                .map(|(k, m)| MomentRow {
                    order: step * k,
                    sign: m.sign(),
                    ln_moment: format_f64(m.logmag()),
                })
                .collect();
            render_rows(&rows, Format::Human)
        }
    }
}

fn render_report(report: &AnalysisReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)
            .map_err(|e| CliError::input(e.to_string()))?
            + "\n"),
        Format::Csv => Err(CliError::input(
            "check reports are available as json or human",
        )),
        Format::Human => {
            let mut out = format!(
                "support: {}\nfamily: {}\nn_max: {}\nq: {}\n",
                report.support.as_str(),
                report.family.as_deref().unwrap_or("-"),
                report.n_max,
                report.q
            );
            for v in &report.verdicts {
                out += &format!(
                    "\n{:<14} {}  (n_used {})\n",
                    v.criterion.as_str(),
                    v.status,
                    v.n_used
                );
                for (k, x) in &v.diagnostics {
                    out += &format!("    {k:<16} {x:.6e}\n");
                }
            }
            if !report.trends.is_empty() {
                out += "\ntrends\n";
                for (k, x) in &report.trends {
                    out += &format!("    {k:<24} {x:.6}\n");
                }
            }
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Gen {
            family,
            nmax,
            format,
            common,
        } => {
            if nmax < 2 {
                return Err(CliError::input("--nmax must be at least 2"));
            }
            let fam: FamilySpec = family.parse()?;
            let seq = generate_moments_tol(&fam, nmax, common.rel_tol)?;
            write_text(common.out.as_deref(), &render_sequence(&seq, format)?)?;
            Ok(0)
        }
        Command::Check {
            input,
            criteria,
            q,
            format,
            common,
        } => {
            let seq = read_sequence(&input)?;
            let q: QFunction = q.parse()?;
            let report = if criteria.is_empty() {
                analyze(&seq, &q)?
            } else {
                let which = criteria
                    .iter()
                    .map(|c| c.parse::<Criterion>())
                    .collect::<Result<Vec<_>, _>>()?;
                analyze_with(&seq, &which, &q)?
            };
            write_text(common.out.as_deref(), &render_report(&report, format)?)?;
            Ok(0)
        }
        Command::PaperTable { format, common } => {
            let rows = tables::reference_table(common.rel_tol)?;
            write_text(common.out.as_deref(), &render_rows(&rows, format)?)?;
            Ok(if rows.iter().all(|r| r.within != Some(false)) {
                0
            } else {
                1
            })
        }
        Command::Asym { t, format, common } => {
            let ts = t
                .iter()
                .map(|s| parse_t(s))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = tables::asym_rows(&ts, common.rel_tol)?;
            write_text(common.out.as_deref(), &render_rows(&rows, format)?)?;
            Ok(0)
        }
        Command::Wtable { t, format, common } => {
            let ts = t
                .iter()
                .map(|s| parse_t(s))
                .collect::<Result<Vec<_>, _>>()?;
            write_text(
                common.out.as_deref(),
                &render_rows(&tables::w_rows(&ts)?, format)?,
            )?;
            Ok(0)
        }
        Command::GammaDerivs {
            nmax,
            format,
            common,
        } => {
            let rows = tables::gamma_rows(nmax, common.rel_tol)?;
            write_text(common.out.as_deref(), &render_rows(&rows, format)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("momdet: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
