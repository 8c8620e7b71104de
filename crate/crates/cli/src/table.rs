//! `wachlab table`: one row per (p, k, a_p) in deterministic order.

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Args;
use rayon::prelude::*;
use serde_json::json;
use wachlab::wach::WachContext;

use crate::config::{k_range, parse_list, CliError, Format, Instance, EXIT_FAILURE, EXIT_OK};
use crate::rows::{evaluate, Row};
use crate::{csv_text, emit, PrecisionArgs};

#[derive(Args)]
pub struct TableArgs {
    /// Primes: "5", "3,5,7" or "3..13" (non-primes are skipped).
    #[arg(long)]
    p: String,
    /// Weights, intersected with [p+2, 2p−1]; default the whole range.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated a_p specs, or "all" for c·p with c = 1, …, p−1.
    #[arg(long, default_value = "all", allow_hyphen_values = true)]
    ap: String,
    #[arg(long)]
    eisenstein: Option<String>,
    /// Fill the pipeline columns by cross-validation (val = 1 rows).
    #[arg(long)]
    validate: bool,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; a `.meta.json` sidecar with timings is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    prec: PrecisionArgs,
}

fn ap_specs(spec: &str, p: u64) -> Vec<String> {
    if spec.trim() == "all" {
        (1..p).map(|c| (c * p).to_string()).collect()
    } else {
        spec.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    }
}

/// All instances of the grid, grouped by (p, k).
fn grid(a: &TableArgs) -> Result<Vec<Vec<Instance>>, CliError> {
    let ks = a.k.as_deref().map(parse_list).transpose()?;
    let mut groups = Vec::new();
    for p in parse_list(&a.p)? {
        if p < 3 || !wachlab::padic::ol::is_prime(p as u64) {
            continue;
        }
        let p = p as u64;
        for k in k_range(p, ks.as_deref()) {
            let mut g = Vec::new();
            for spec in ap_specs(&a.ap, p) {
                let mut inst = Instance::new(p, k, &spec, a.eisenstein.as_deref())?;
                a.prec.apply(&mut inst);
                g.push(inst);
            }
            groups.push(g);
        }
    }
    Ok(groups)
}

fn run_group(g: &[Instance], validate: bool) -> Vec<Row> {
    let needs_ctx = validate
        && g.iter().any(|i| {
            i.ap_elem()
                .map(|a| a.valuation().exact() == Some(1.into()))
                .unwrap_or(false)
        });
    let ctx = if needs_ctx {
        WachContext::new(&g[0].params()).ok()
    } else {
        None
    };
    g.par_iter().map(|inst| evaluate(inst, validate, ctx.as_ref())).collect()
}

pub fn build_rows(a: &TableArgs) -> Result<Vec<Row>, CliError> {
    let groups = grid(a)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::failure(e.to_string()))?;
    let rows: Vec<Vec<Row>> = pool.install(|| groups.par_iter().map(|g| run_group(g, a.validate)).collect());
    Ok(rows.into_iter().flatten().collect())
}

fn text_table(rows: &[Row]) -> String {
    let mut lines = vec![crate::rows::CSV_HEADER.map(String::from)];
    lines.extend(rows.iter().map(|r| r.csv_fields()));
    let widths: Vec<usize> = (0..10)
        .map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for l in &lines {
        let cells: Vec<String> = l
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        s += cells.join("  ").trim_end();
        s.push('\n');
    }
    s
}

pub fn run(a: &TableArgs) -> Result<i32, CliError> {
    let started = SystemTime::now();
    let t0 = Instant::now();
    let rows = build_rows(a)?;
    let text = match a.format {
        Format::Csv => csv_text(&rows)?,
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Text => text_table(&rows),
    };
    emit(a.out.as_ref(), &text)?;
    if let Some(out) = &a.out {
        let mut side = out.clone().into_os_string();
        side.push(".meta.json");
        let meta = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "rows": rows.len(),
            "started_unix": started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            "elapsed_seconds": t0.elapsed().as_secs_f64(),
        });
        std::fs::write(PathBuf::from(side), serde_json::to_string_pretty(&meta)? + "\n")?;
    }
    let failed: Vec<&Row> = rows.iter().filter(|r| r.failed()).collect();
    for r in &failed {
        eprintln!(
            "wachlab: p={} k={} ap={}: {}",
            r.p,
            r.k,
            r.ap,
            r.error.as_deref().unwrap_or("mismatch")
        );
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}
