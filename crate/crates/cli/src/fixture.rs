//! `wachlab fixture`: the intermediate data of one run as JSON files.

use std::path::PathBuf;

use clap::Args;
use wachlab::classify::{run_pipeline, Provenance};
use wachlab::modp::{build_q_kp2, delta_line, diagonalize_const, solve_z};
use wachlab::wach::WachContext;

use crate::config::{CliError, EXIT_OK};
use crate::InstanceArgs;

#[derive(Args)]
pub struct FixtureArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Directory for the JSON files (created if missing).
    #[arg(long)]
    out_dir: PathBuf,
}

fn write(dir: &PathBuf, name: &str, v: &serde_json::Value) -> Result<(), CliError> {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

pub fn run(a: &FixtureArgs) -> Result<i32, CliError> {
    let inst = a.inst.instance()?;
    let params = inst.params();
    let ctx = WachContext::new(&params)?;
    let run = run_pipeline(&params, &ctx)?;
    let dir = &a.out_dir;
    std::fs::create_dir_all(dir)?;
    write(dir, "params.json", &serde_json::to_value(&params)?)?;
    write(dir, "wach.json", &run.wach.to_json())?;
    let res = &run.reduced;
    write(dir, "reswach.json", &res.to_json())?;
    if inst.k as u64 >= inst.p + 3 {
        let z = solve_z(&res.ubar, &res.beta, inst.k, res.mx)?;
        let w = delta_line(res, &z, &res.beta)?;
        write(dir, "witness.json", &w.to_json())?;
    } else {
        let q = build_q_kp2(res)?;
        let eig = diagonalize_const(&q.at_zero(), &res.beta)?;
        write(dir, "eigen.json", &serde_json::to_value(&eig)?)?;
    }
    if let Some(ext) = &run.extension {
        write(dir, "extension.json", &ext.to_json())?;
    }
    let mut j = run.result.to_json();
    j.provenance = Provenance::Both;
    j.checks = run.checks.clone();
    write(dir, "result.json", &serde_json::to_value(&j)?)?;
    Ok(EXIT_OK)
}
