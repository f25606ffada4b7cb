//! Command-line front end: parse quiver-spec documents, run builders and
//! verifications, emit reports.

use clap::{Parser, Subcommand, ValueEnum};
use gklo::field::{set_prime, Q};
use gklo::gklo::{Corruption, GkloContext};
use gklo::monopole::{minuscule_monopole, psi_crosscheck, Direction};
use gklo::poly::MultiPoly;
use gklo::quiver::{validate_quiver, DimensionData, InvolutiveQuiver, RawArrow, RawQuiverSpec, ResolvedDims};
use gklo::relations::{verify_all, Status, Tag, VerifyOptions};
use gklo::render;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_RELATION_FAILURE: u8 = 1;
const EXIT_INVALID_SPEC: u8 = 2;
const EXIT_PARSE_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "gklo", version, about = "Difference-operator representations from quiver-with-involution data", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhatArg {
    B,
    H,
    Y,
    Coeffs,
}

#[derive(Subcommand)]
enum Command {
    /// Check a quiver-spec document against all structural axioms.
    Validate { path: String },
    /// Print Cartan matrix, shift coweight, pairings and normalizations.
    Info { path: String },
    /// Run the relation suite and report pass/fail per relation.
    Verify {
        path: String,
        /// exact (ℚ) or random (𝔽_p polynomial identity testing)
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// coefficient-index budget for cross-checks
        #[arg(long)]
        order: Option<i64>,
        /// evaluation trials per identity in random mode
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// comma-separated relation tags to restrict to
        #[arg(long)]
        only: Option<String>,
        /// write the full report (JSON) to this file
        #[arg(long)]
        report_out: Option<String>,
        /// inject a named sign corruption (negative control)
        #[arg(long)]
        corrupt: Option<String>,
    },
    /// Print operators in canonical textual form.
    Build {
        path: String,
        #[arg(long)]
        node: String,
        #[arg(long, value_enum)]
        what: WhatArg,
        /// coefficient index range a..b (coeffs only)
        #[arg(long)]
        range: Option<String>,
    },
    /// Print the minuscule monopole operator and the cross-check verdict.
    Monopole {
        path: String,
        #[arg(long)]
        node: String,
        #[arg(long, default_value_t = 3)]
        r_max: i64,
    },
}

// ---- document schema ------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuiverSpecDocument {
    nodes: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowDoc>,
    involution: InvolutionDoc,
    #[serde(default)]
    positive_nodes: Option<Vec<String>>,
    dims: DimsDoc,
    #[serde(default)]
    options: Option<OptionsDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowDoc {
    id: String,
    source: String,
    target: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvolutionDoc {
    nodes: Vec<(String, String)>,
    #[serde(default)]
    arrows: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DimsDoc {
    v: BTreeMap<String, u32>,
    w: BTreeMap<String, u32>,
}

#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct OptionsDoc {
    mode: Option<String>,
    series_order: Option<i64>,
    trials: Option<u32>,
    seed: Option<u64>,
}

struct Loaded {
    quiver: InvolutiveQuiver,
    dims: ResolvedDims,
    options: OptionsDoc,
}

enum CliError {
    ParseIo(String),
    InvalidSpec(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::ParseIo(_) => EXIT_PARSE_IO,
            CliError::InvalidSpec(_) => EXIT_INVALID_SPEC,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::ParseIo(m) | CliError::InvalidSpec(m) => m,
        }
    }
}

fn load(path: &str) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::ParseIo(format!("cannot read {path}: {e}")))?;
    let doc: QuiverSpecDocument = toml::from_str(&text)
        .map_err(|e| CliError::ParseIo(format!("cannot parse {path}: {e}")))?;
    let raw = RawQuiverSpec {
        nodes: doc.nodes,
        arrows: doc
            .arrows
            .into_iter()
            .map(|a| RawArrow {
                id: a.id,
                source: a.source,
                target: a.target,
            })
            .collect(),
        node_involution: doc.involution.nodes,
        arrow_involution: doc.involution.arrows,
        positive_nodes: doc.positive_nodes,
    };
    let quiver =
        validate_quiver(&raw).map_err(|e| CliError::InvalidSpec(format!("invalid quiver: {e}")))?;
    let dims = DimensionData {
        v: doc.dims.v,
        w: doc.dims.w,
    }
    .resolve(&quiver)
    .map_err(|e| CliError::InvalidSpec(format!("invalid dimensions: {e}")))?;
    Ok(Loaded {
        quiver,
        dims,
        options: doc.options.unwrap_or_default(),
    })
}

fn prime_from_env() -> Result<(), CliError> {
    if let Ok(s) = std::env::var("GKLO_PRIME") {
        let p: u64 = s
            .parse()
            .map_err(|_| CliError::ParseIo(format!("GKLO_PRIME is not an integer: {s}")))?;
        set_prime(p);
    }
    Ok(())
}

// ---- subcommands ----------------------------------------------------------

fn cmd_validate(path: &str) -> Result<u8, CliError> {
    let loaded = load(path)?;
    println!(
        "ok: {} nodes, {} arrows, {} tau-fixed",
        loaded.quiver.n_nodes(),
        loaded.quiver.arrows.len(),
        loaded.quiver.tau_fixed_arrows.len()
    );
    Ok(EXIT_OK)
}

fn cmd_info(path: &str) -> Result<u8, CliError> {
    let loaded = load(path)?;
    let ctx = GkloContext::<Q>::exact(loaded.quiver, loaded.dims);
    let n = ctx.quiver.n_nodes();
    println!("nodes: {}", ctx.quiver.nodes.join(" "));
    let tau_pairs: Vec<String> = ctx
        .quiver
        .positive_nodes
        .iter()
        .map(|&i| {
            format!(
                "{}<->{}",
                ctx.quiver.nodes[i],
                ctx.quiver.nodes[ctx.quiver.tau(i)]
            )
        })
        .collect();
    println!("involution: {}", tau_pairs.join(" "));
    println!("cartan:");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| ctx.c(i, j).to_string()).collect();
        println!("  {}: {}", ctx.quiver.nodes[i], row.join(" "));
    }
    let fund: Vec<String> = (0..n)
        .map(|i| format!("{}:{}", ctx.quiver.nodes[i], ctx.mu.fundamental[i]))
        .collect();
    let coroot: Vec<String> = (0..n)
        .map(|i| format!("{}:{}", ctx.quiver.nodes[i], ctx.mu.coroot[i]))
        .collect();
    println!("mu fundamental: {}", fund.join(" "));
    println!("mu coroot: {}", coroot.join(" "));
    for i in 0..n {
        println!(
            "alpha_mu[{}] = {}   hbar_zeta[{}] = {}",
            ctx.quiver.nodes[i],
            ctx.alpha_mu(i),
            ctx.quiver.nodes[i],
            ctx.hbar_zeta(i)
        );
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    path: &str,
    mode: Option<ModeArg>,
    order: Option<i64>,
    trials: Option<u32>,
    seed: Option<u64>,
    only: Option<String>,
    report_out: Option<String>,
    corrupt: Option<String>,
) -> Result<u8, CliError> {
    prime_from_env()?;
    let loaded = load(path)?;
    let mode = match mode {
        Some(m) => m,
        None => match loaded.options.mode.as_deref() {
            Some("random") => ModeArg::Random,
            Some("exact") | None => ModeArg::Exact,
            Some(other) => {
                return Err(CliError::InvalidSpec(format!(
                    "unknown mode in options: {other}"
                )))
            }
        },
    };
    let filter = match only {
        None => None,
        Some(list) => {
            let mut tags = Vec::new();
            for part in list.split(',') {
                let t = Tag::by_name(part.trim()).ok_or_else(|| {
                    CliError::ParseIo(format!("unknown relation tag: {part}"))
                })?;
                tags.push(t);
            }
            Some(tags)
        }
    };
    let corruption = match corrupt {
        None => None,
        Some(name) => Some(Corruption::by_name(&name).ok_or_else(|| {
            CliError::ParseIo(format!(
                "unknown corruption site: {name} (expected one of {})",
                Corruption::ALL
                    .iter()
                    .map(|c| c.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?),
    };
    let opts = VerifyOptions {
        series_order: order.or(loaded.options.series_order),
        trials: trials.or(loaded.options.trials).unwrap_or(20),
        seed: seed.or(loaded.options.seed).unwrap_or(0),
        filter,
    };
    let report = match mode {
        ModeArg::Exact => {
            let ctx = GkloContext::<Q>::exact(loaded.quiver, loaded.dims)
                .with_corruption(corruption);
            verify_all(&ctx, opts)
        }
        ModeArg::Random => {
            let ctx =
                GkloContext::randomized(loaded.quiver, loaded.dims, opts.seed)
                    .with_corruption(corruption);
            verify_all(&ctx, opts)
        }
    };
    for e in &report.entries {
        let idx = match (&e.id.i, &e.id.j) {
            (Some(i), Some(j)) => format!("[{i},{j}]"),
            (Some(i), None) => format!("[{i}]"),
            _ => String::new(),
        };
        let aux = if e.id.aux.is_empty() {
            String::new()
        } else {
            format!(
                "({})",
                e.id.aux
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        let status = match e.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
        };
        let mut line = format!("{:<14}{idx}{aux}: {status} ({} ms)", e.id.tag.name(), e.elapsed_ms);
        if let Some(w) = &e.witness {
            line.push_str(&format!("  witness: {}", w.monomial));
            if let Some(t) = &w.term {
                line.push_str(&format!(" -> {t}"));
            }
            if let Some(p) = &w.point {
                let pt: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
                line.push_str(&format!(" at {}", pt.join(", ")));
            }
        }
        println!("{line}");
    }
    let fails = report.count(Status::Fail);
    println!(
        "summary: {} pass, {} fail, {} inconclusive, {} skipped",
        report.count(Status::Pass),
        fails,
        report.count(Status::Inconclusive),
        report.count(Status::Skipped)
    );
    if let Some(out) = report_out {
        let json = serde_json::to_string_pretty(&report)
            .expect("report serialization cannot fail");
        std::fs::write(&out, json)
            .map_err(|e| CliError::ParseIo(format!("cannot write {out}: {e}")))?;
    }
    Ok(if fails == 0 {
        EXIT_OK
    } else {
        EXIT_RELATION_FAILURE
    })
}

fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| CliError::ParseIo(format!("range must be a..b, got {s}")))?;
    let lo: i64 = a
        .trim()
        .parse()
        .map_err(|_| CliError::ParseIo(format!("bad range bound: {a}")))?;
    let hi: i64 = b
        .trim()
        .parse()
        .map_err(|_| CliError::ParseIo(format!("bad range bound: {b}")))?;
    if lo > hi {
        return Err(CliError::ParseIo(format!("empty range: {s}")));
    }
    Ok((lo, hi))
}

fn cmd_build(path: &str, node: &str, what: WhatArg, range: Option<String>) -> Result<u8, CliError> {
    let loaded = load(path)?;
    let ctx = GkloContext::<Q>::exact(loaded.quiver, loaded.dims);
    let i = ctx
        .quiver
        .node_index(node)
        .map_err(|e| CliError::InvalidSpec(e.to_string()))?;
    let names = render::var_names(&ctx.quiver);
    match what {
        WhatArg::B => {
            println!("{}", render::render_element(&ctx.build_b(i), &ctx.quiver, &names));
        }
        WhatArg::H => {
            println!("{}", render::render_ratfunc(&ctx.build_h(i), &names));
        }
        WhatArg::Y => {
            for r in 1..=ctx.v(i) as u16 {
                let y = ctx
                    .build_y(i, r)
                    .map_err(|e| CliError::InvalidSpec(e.to_string()))?;
                println!("{}", render::render_element(&y, &ctx.quiver, &names));
            }
        }
        WhatArg::Coeffs => {
            let (lo, hi) = parse_range(range.as_deref().unwrap_or("0..3"))?;
            for r in lo..=hi {
                println!("{}", render::render_ratfunc(&ctx.h_coeff(i, r), &names));
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_monopole(path: &str, node: &str, r_max: i64) -> Result<u8, CliError> {
    let loaded = load(path)?;
    let ctx = GkloContext::<Q>::exact(loaded.quiver, loaded.dims);
    let i = ctx
        .quiver
        .node_index(node)
        .map_err(|e| CliError::InvalidSpec(e.to_string()))?;
    let names = render::var_names(&ctx.quiver);
    let positive = ctx.quiver.is_positive(i);
    let site = if positive { i } else { ctx.quiver.tau(i) };
    let dir = if positive {
        Direction::Plus
    } else {
        Direction::Minus
    };
    let mono = minuscule_monopole(&ctx, site, &MultiPoly::one(), dir)
        .map_err(|e| CliError::InvalidSpec(e.to_string()))?;
    println!(
        "monopole({}, f=1, {}) = {}",
        ctx.quiver.nodes[site],
        if positive { "plus" } else { "minus" },
        render::render_element(&mono, &ctx.quiver, &names)
    );
    let entries =
        psi_crosscheck(&ctx, i, r_max).map_err(|e| CliError::InvalidSpec(e.to_string()))?;
    let mut ok = true;
    for e in &entries {
        if e.ok {
            println!("crosscheck r={}: pass", e.r);
        } else {
            ok = false;
            println!(
                "crosscheck r={}: FAIL ({})",
                e.r,
                e.mismatch.as_deref().unwrap_or("?")
            );
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_RELATION_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Info { path } => cmd_info(&path),
        Command::Verify {
            path,
            mode,
            order,
            trials,
            seed,
            only,
            report_out,
            corrupt,
        } => cmd_verify(&path, mode, order, trials, seed, only, report_out, corrupt),
        Command::Build {
            path,
            node,
            what,
            range,
        } => cmd_build(&path, &node, what, range),
        Command::Monopole { path, node, r_max } => cmd_monopole(&path, &node, r_max),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
