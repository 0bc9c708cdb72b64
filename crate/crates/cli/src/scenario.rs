//! Scenario loading (flags + flat key-value config), the trial loop, the
//! run report with CSV emission, and transcript dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use trace_repair_core::code::{self, CodeParams};
use trace_repair_core::repair::{self, ErasurePattern, RepairResult};
use trace_repair_core::{Error, Fel, SplitMix64};

use crate::RepairArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Scheme {
    Naive,
    Gw,
    Dist1,
    Central2,
    Dist2,
    Central3,
    Dist3,
    Auto,
}

impl Scheme {
    fn parse(s: &str) -> anyhow::Result<Scheme> {
        Ok(match s {
            "naive" => Scheme::Naive,
            "gw" => Scheme::Gw,
            "dist1" => Scheme::Dist1,
            "central2" => Scheme::Central2,
            "dist2" => Scheme::Dist2,
            "central3" => Scheme::Central3,
            "dist3" => Scheme::Dist3,
            "auto" => Scheme::Auto,
            other => bail!("unknown scheme {other:?}"),
        })
    }

    fn arity(self) -> Option<usize> {
        match self {
            Scheme::Naive | Scheme::Gw => Some(1),
            Scheme::Dist1 | Scheme::Central2 | Scheme::Dist2 => Some(2),
            Scheme::Central3 | Scheme::Dist3 => Some(3),
            Scheme::Auto => None,
        }
    }
}

/// A fully resolved run description.
#[derive(Debug, Clone)]
pub(crate) struct Scenario {
    pub p: u64,
    pub m: u32,
    pub t: u32,
    pub k: Option<usize>,
    pub erasures: Vec<String>,
    pub scheme: Scheme,
    pub trials: u64,
    pub seed: u64,
    pub message: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
}

/// Splits on commas that are not nested inside `[...]` coefficient vectors.
pub(crate) fn split_top_level(s: &str) -> Vec<String> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                items.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        items.push(cur.trim().to_string());
    }
    items
}

fn parse_config(path: &PathBuf) -> anyhow::Result<Vec<(String, String)>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected `key = value`", path.display(), lineno + 1);
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl Scenario {
    pub(crate) fn from_args(args: &RepairArgs) -> anyhow::Result<Scenario> {
        let mut p = args.p;
        let mut m = args.m;
        let mut t = args.t;
        let mut k = args.k;
        let mut erasures = args.erasures.clone();
        let mut scheme = args.scheme.clone();
        let mut trials = args.trials;
        let mut seed = args.seed;
        let mut message = args.message.clone();

        if let Some(path) = &args.config {
            for (key, value) in parse_config(path)? {
                // Flags take precedence over the config file.
                match key.as_str() {
                    "p" => p = p.or(Some(value.parse().context("config key p")?)),
                    "m" => m = m.or(Some(value.parse().context("config key m")?)),
                    "t" => t = t.or(Some(value.parse().context("config key t")?)),
                    "k" => k = k.or(Some(value.parse().context("config key k")?)),
                    "erasures" => erasures = erasures.or(Some(value)),
                    "scheme" => scheme = scheme.or(Some(value)),
                    "trials" => {
                        trials = trials.or(Some(value.parse().context("config key trials")?))
                    }
                    "seed" => seed = seed.or(Some(value.parse().context("config key seed")?)),
                    "message" => message = message.or(Some(value)),
                    other => bail!("unknown config key {other:?}"),
                }
            }
        }

        let (Some(p), Some(m), Some(t)) = (p, m, t) else {
            bail!("p, m, and t are required (flags or config)");
        };
        let Some(erasures) = erasures else {
            bail!("erasures are required (flags or config)");
        };
        Ok(Scenario {
            p,
            m,
            t,
            k,
            erasures: split_top_level(&erasures),
            scheme: Scheme::parse(scheme.as_deref().unwrap_or("auto"))?,
            trials: trials.unwrap_or(1),
            seed: seed.unwrap_or(0),
            message: message.as_deref().map(split_top_level),
            out: args.out.clone(),
            transcript: args.transcript.clone(),
        })
    }
}

/// Resolves one erasure item: a plain integer is a position, anything else
/// is element notation mapped to its position in the enumeration.
fn resolve_erasure(params: &CodeParams, item: &str) -> anyhow::Result<usize> {
    if let Ok(pos) = item.parse::<usize>() {
        if pos >= params.n() {
            bail!("erasure position {pos} out of range (n = {})", params.n());
        }
        return Ok(pos);
    }
    let elem = params
        .tower()
        .parse(item)
        .with_context(|| format!("erasure item {item:?}"))?;
    Ok(params.tower().index_of(elem))
}

fn dispatch(
    scheme: Scheme,
    params: &CodeParams,
    view: &code::PartialCodeword,
) -> Result<RepairResult, Error> {
    match scheme {
        Scheme::Naive => code::naive_repair(params, view),
        Scheme::Gw => repair::repair_single_gw(params, view),
        Scheme::Dist1 => repair::repair_two_distributed_one(params, view),
        Scheme::Central2 => repair::repair_two_centralized(params, view),
        Scheme::Dist2 => repair::repair_two_distributed_two(params, view),
        Scheme::Central3 => repair::repair_three_centralized(params, view),
        Scheme::Dist3 => repair::repair_three_distributed(params, view),
        Scheme::Auto => unreachable!("auto is resolved before dispatch"),
    }
}

/// The `auto` scheme picks by erasure count and conditions: one erasure uses
/// the single-erasure trace scheme; two use the centralized scheme when the
/// characteristic divides t and Distributed I otherwise; three use the
/// centralized scheme, falling back to naive-plus-centralized for
/// non-correctable triples.
fn resolve_auto(params: &CodeParams, erasure_count: usize) -> anyhow::Result<Scheme> {
    Ok(match erasure_count {
        1 => Scheme::Gw,
        2 => {
            if params.tower().char_divides_t() {
                Scheme::Central2
            } else {
                Scheme::Dist1
            }
        }
        3 => Scheme::Central3,
        other => bail!("unsupported erasure count {other}"),
    })
}

/// One CSV row of the run report.
struct TrialRow {
    scheme: String,
    trial: u64,
    bandwidth_subsymbols: u64,
    success: bool,
}

/// Everything a repair run produces: per-trial rows, bandwidth aggregates,
/// and the condition diagnostics.
pub(crate) struct RunReport {
    n: usize,
    k: usize,
    erasures_label: String,
    rows: Vec<TrialRow>,
    transcripts: String,
    char_divides_t: bool,
    correctable_triple: Option<bool>,
    fallback: bool,
}

impl RunReport {
    fn successes(&self) -> u64 {
        self.rows.iter().filter(|r| r.success).count() as u64
    }

    pub(crate) fn all_succeeded(&self) -> bool {
        self.successes() == self.rows.len() as u64
    }

    pub(crate) fn render_csv(&self) -> String {
        let mut csv = String::from("scheme,n,k,erasures,trial,bandwidth_subsymbols,success\n");
        for row in &self.rows {
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                row.scheme,
                self.n,
                self.k,
                self.erasures_label,
                row.trial,
                row.bandwidth_subsymbols,
                row.success
            )
            .expect("string write");
        }
        csv
    }

    pub(crate) fn render_summary(&self) -> String {
        let min = self.rows.iter().map(|r| r.bandwidth_subsymbols).min().unwrap_or(0);
        let max = self.rows.iter().map(|r| r.bandwidth_subsymbols).max().unwrap_or(0);
        let sum: u64 = self.rows.iter().map(|r| r.bandwidth_subsymbols).sum();
        let mean = sum as f64 / self.rows.len().max(1) as f64;
        let correctable = match self.correctable_triple {
            Some(v) => v.to_string(),
            None => "n/a".to_string(),
        };
        format!(
            "trials: {}/{} succeeded\nbandwidth_subsymbols: min={min} max={max} mean={mean:.2}\n\
             diagnostics: char_divides_t={} correctable_triple={correctable} fallback={}\n",
            self.successes(),
            self.rows.len(),
            self.char_divides_t,
            self.fallback
        )
    }
}

pub(crate) fn run_scenario(scenario: &Scenario) -> anyhow::Result<RunReport> {
    let tower = crate::build_tower(scenario.p, scenario.m, scenario.t)?;
    let params = match scenario.k {
        Some(k) => CodeParams::with_dimension(tower, k)?,
        None => CodeParams::new(tower),
    };

    let positions: Vec<usize> = scenario
        .erasures
        .iter()
        .map(|item| resolve_erasure(&params, item))
        .collect::<anyhow::Result<_>>()?;
    let pattern = ErasurePattern::new(&positions)?;

    if let Some(arity) = scenario.scheme.arity() {
        if arity != pattern.len() {
            bail!(
                "scheme expects {arity} erasures but the pattern has {}",
                pattern.len()
            );
        }
    }

    let fixed_message: Option<Vec<Fel>> = match &scenario.message {
        None => None,
        Some(items) => Some(
            items
                .iter()
                .map(|s| params.tower().parse(s).map_err(anyhow::Error::from))
                .collect::<anyhow::Result<_>>()?,
        ),
    };
    if let Some(msg) = &fixed_message {
        if msg.len() > params.k() {
            bail!("message has {} coefficients but k = {}", msg.len(), params.k());
        }
    }

    let erasures_label = positions
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";");

    let correctable_triple = if pattern.len() == 3 {
        let pts: Vec<Fel> = positions.iter().map(|&p| params.point(p)).collect();
        repair::is_correctable_triple(params.tower(), pts[0], pts[1], pts[2]).ok()
    } else {
        None
    };

    let mut rng = SplitMix64::new(scenario.seed);
    let mut report = RunReport {
        n: params.n(),
        k: params.k(),
        erasures_label,
        rows: Vec::new(),
        transcripts: String::new(),
        char_divides_t: params.tower().char_divides_t(),
        correctable_triple,
        fallback: false,
    };

    for trial in 0..scenario.trials {
        let message: Vec<Fel> = match &fixed_message {
            Some(msg) => msg.clone(),
            None => (0..params.k())
                .map(|_| {
                    params
                        .tower()
                        .element_at(rng.next_below(params.n() as u64) as usize)
                })
                .collect(),
        };
        let cw = code::encode(&params, &message)?;
        let view = cw.with_erasures(&pattern);

        let scheme = match scenario.scheme {
            Scheme::Auto => resolve_auto(&params, pattern.len())?,
            s => s,
        };
        let result = match dispatch(scheme, &params, &view) {
            Ok(r) => r,
            Err(Error::NotCorrectable) if scenario.scheme == Scheme::Auto => {
                // Low-bandwidth repair refuses this triple; fall back.
                report.fallback = true;
                repair::repair_three_fallback(&params, &view)?
            }
            Err(e) => {
                return Err(anyhow::Error::from(e))
                    .with_context(|| format!("trial {trial}: scheme conditions not met"));
            }
        };

        let success = result
            .recovered
            .iter()
            .all(|&(pos, val)| cw.symbols[pos] == val);
        report.rows.push(TrialRow {
            scheme: result.scheme.clone(),
            trial,
            bandwidth_subsymbols: result.ledger.total(),
            success,
        });

        if scenario.transcript.is_some() {
            writeln!(report.transcripts, "=== trial {trial} ===").expect("string write");
            writeln!(report.transcripts, "success = {success}").expect("string write");
            report.transcripts.push_str("codeword:\n");
            report
                .transcripts
                .push_str(&code::codeword_to_text(params.tower(), &cw));
            report.transcripts.push_str(&result.render(params.tower()));
        }
    }
    Ok(report)
}

pub(crate) fn cmd_repair(args: &RepairArgs) -> anyhow::Result<bool> {
    let scenario = Scenario::from_args(args)?;
    let report = run_scenario(&scenario)?;

    let csv = report.render_csv();
    print!("{csv}");
    if let Some(path) = &scenario.out {
        fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &scenario.transcript {
        fs::write(path, &report.transcripts)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprint!("{}", report.render_summary());
    Ok(report.all_succeeded())
}
