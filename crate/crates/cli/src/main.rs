//! `wachlab`: classify mod-p reductions of V_{k,a_p}, build tables, run the
//! invariant suites and write fixtures.

mod apspec;
mod config;
mod fixture;
mod rows;
mod table;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wachlab::classify::Provenance;

use config::{CliError, Format, Instance, EXIT_OK};

#[derive(Parser)]
#[command(name = "wachlab", version, about = "Mod-p reductions of crystalline representations V_{k,a_p}")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify one (p, k, a_p).
    Reduce(ReduceArgs),
    /// Classify a grid of (p, k, a_p), optionally cross-validating each row.
    Table(table::TableArgs),
    /// Run the invariant suites and smoke instances.
    Verify(verify::VerifyArgs),
    /// Write the intermediate data of one instance as JSON fixtures.
    Fixture(fixture::FixtureArgs),
}

/// Options describing one instance.
#[derive(Args, Clone)]
pub struct InstanceArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
    /// Integer, "c*p", "pi", or a polynomial in pi.
    #[arg(long, allow_hyphen_values = true)]
    ap: String,
    /// Eisenstein polynomial in x; required when a_p involves pi with e > 1.
    #[arg(long)]
    eisenstein: Option<String>,
    #[command(flatten)]
    prec: PrecisionArgs,
}

/// Precision and generator overrides.
#[derive(Args, Clone, Default)]
pub struct PrecisionArgs {
    /// X-adic precision (default max(4(p−1), k+p)).
    #[arg(long)]
    mx: Option<i64>,
    /// Certified p-adic digits.
    #[arg(long, default_value_t = 2)]
    n_target: u32,
    /// ε-values of the generators of Γ, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<i64>>,
}

impl PrecisionArgs {
    fn apply(&self, inst: &mut Instance) {
        inst.mx = self.mx;
        inst.n_target = self.n_target;
        inst.gamma_gens = self.gamma.clone();
    }
}

impl InstanceArgs {
    pub fn instance(&self) -> Result<Instance, CliError> {
        let mut inst = Instance::new(self.p, self.k, &self.ap, self.eisenstein.as_deref())?;
        self.prec.apply(&mut inst);
        Ok(inst)
    }
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Also run the Wach-module pipeline and require agreement (val = 1).
    #[arg(long)]
    validate: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Writes to `out` or stdout.
pub fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

pub fn csv_text(rows: &[rows::Row]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(rows::CSV_HEADER)
        .map_err(|e| CliError::failure(e.to_string()))?;
    for r in rows {
        w.write_record(r.csv_fields())
            .map_err(|e| CliError::failure(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::failure(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_reduce(a: &ReduceArgs) -> Result<i32, CliError> {
    let inst = a.inst.instance()?;
    let row = rows::evaluate(&inst, a.validate, None);
    if row.formula.is_none() {
        let msg = row.error.clone().unwrap_or_default();
        eprintln!("wachlab: {msg}");
        return Ok(row.exit);
    }
    let text = match a.format {
        Format::Json => {
            let mut j = row.pipeline.clone().unwrap_or_else(|| row.formula.clone().expect("formula"));
            if row.pipeline.is_some() {
                j.provenance = Provenance::Both;
            }
            serde_json::to_string_pretty(&j)? + "\n"
        }
        Format::Csv => csv_text(std::slice::from_ref(&row))?,
        Format::Text => {
            let f = row.formula.as_ref().expect("formula");
            let mut s = format!("{}: {}\n", row.variant, f.display);
            if let Some(pj) = &row.pipeline {
                s += &format!("pipeline agrees ({} checks passed)\n", pj.checks.len());
            }
            s
        }
    };
    emit(a.out.as_ref(), &text)?;
    if let Some(e) = &row.error {
        eprintln!("wachlab: {e}");
    }
    Ok(if row.failed() { row.exit } else { EXIT_OK })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { config::EXIT_PARSE as u8 } else { 0 });
        }
    };
    let r = match &cli.cmd {
        Cmd::Reduce(a) => cmd_reduce(a),
        Cmd::Table(a) => table::run(a),
        Cmd::Verify(a) => verify::run(a),
        Cmd::Fixture(a) => fixture::run(a),
    };
    match r {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("wachlab: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
