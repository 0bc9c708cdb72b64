//! Command-line front end: runs repair scenarios over randomized or fixed
//! codewords, counts correctable triples, prints the scheme bandwidth table,
//! and self-tests against the built-in golden tables.

mod scenario;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use trace_repair_core::analysis;
use trace_repair_core::field::FieldTower;

#[derive(Parser)]
#[command(name = "trace-repair", version, about = "Trace-based Reed-Solomon repair simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repair trials for a scenario given by flags and/or a config file
    Repair(RepairArgs),
    /// Count the correctable three-erasure patterns with two positions fixed
    CountTriples(CountTriplesArgs),
    /// Print the closed-form bandwidth table and thresholds for a tower
    Compare(CompareArgs),
    /// Regenerate the built-in check table, toy transcripts, and census rows
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct RepairArgs {
    /// Flat key-value config file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    t: Option<u32>,
    /// Code dimension; defaults to n(1 - 1/|B|)
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated positions or element strings, e.g. "0,1" or "x^3,[1,1,0,0]"
    #[arg(long)]
    erasures: Option<String>,
    /// One of: naive, gw, dist1, central2, dist2, central3, dist3, auto
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed message coefficients (element strings); random per trial if absent
    #[arg(long)]
    message: Option<String>,
    /// Also write the CSV report to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-trial verbose transcripts to this file
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct CountTriplesArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    t: u32,
    /// Fixed pair as two comma-separated element strings; default "0,1"
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    t: u32,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Include the two largest census rows (runs longer)
    #[arg(long)]
    full: bool,
}

/// Field-size cap, overridable through TRACE_REPAIR_MAX_FIELD.
fn field_cap() -> u64 {
    std::env::var("TRACE_REPAIR_MAX_FIELD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(trace_repair_core::DEFAULT_MAX_FIELD)
}

fn build_tower(p: u64, m: u32, t: u32) -> anyhow::Result<FieldTower> {
    FieldTower::with_cap(p, m, t, field_cap())
        .with_context(|| format!("cannot build GF({p}^({m}*{t}))"))
}

fn cmd_count_triples(args: &CountTriplesArgs) -> anyhow::Result<()> {
    let tower = build_tower(args.p, args.m, args.t)?;
    let (alpha, beta) = match &args.pair {
        None => (tower.element_at(0), tower.element_at(1)),
        Some(pair) => {
            let items = scenario::split_top_level(pair);
            if items.len() != 2 {
                anyhow::bail!("--pair needs exactly two elements");
            }
            (tower.parse(&items[0])?, tower.parse(&items[1])?)
        }
    };
    let census = analysis::count_correctable(&tower, alpha, beta)?;
    let mut out = String::from("tower,fixed_pair,correctable,total\n");
    out.push_str(&census.csv_row(&tower));
    print!("{out}");
    if let Some(path) = &args.out {
        std::fs::write(path, &out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> anyhow::Result<()> {
    let tower = build_tower(args.p, args.m, args.t)?;
    let n = tower.order();
    let default_k = (n - n / tower.subfield_order()) as usize;
    let k = args.k.unwrap_or(default_k);
    if k == 0 || k as u64 >= n {
        anyhow::bail!("dimension k must satisfy 1 <= k < n");
    }

    println!("tower = {}", analysis::tower_label(&tower));
    println!("n = {n}");
    println!("k = {k}");
    println!("scheme,erasures,bandwidth_subsymbols,conditions");
    for row in analysis::scheme_table(&tower, k as u64) {
        println!(
            "{},{},{},{}",
            row.scheme, row.erasures, row.bandwidth, row.conditions
        );
    }
    let bound = analysis::repair_lower_bound(n, k as u64, tower.subfield_order(), tower.t())?;
    println!("lower_bound_single,1,{bound:.6},-");
    if k == default_k {
        let th = analysis::threshold_report(tower.subfield_order(), tower.t())?;
        println!(
            "dist1 < naive+gw: {} < {} = {} (threshold t >= {:.2})",
            th.dist1_total, th.naive_plus_gw, th.dist1_strictly_better, th.dist1_threshold
        );
        println!(
            "central2 < naive: {} < {} = {} (threshold t >= {:.2})",
            th.central2_total, th.naive_total, th.central2_strictly_better, th.central2_threshold
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Repair(args) => scenario::cmd_repair(args),
        Command::CountTriples(args) => cmd_count_triples(args).map(|()| true),
        Command::Compare(args) => cmd_compare(args).map(|()| true),
        Command::Selftest(args) => selftest::cmd_selftest(args.full).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
