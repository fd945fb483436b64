//! Command-line front end: family constructors, property checks, hom
//! enumeration, gadget certificates, the B(m, k) bound, witness
//! constructions, and the simplicial summary. Every command produces a
//! JSON-serialisable report; the human-readable output is a rendering of the
//! same payload.
//!
//! Exit codes: 0 a verdict was computed (whether it holds or not), 2 the
//! check was inconclusive within budget, 1 usage or input errors.

mod report;

use clap::{Args, Parser, Subcommand};
use report::Report;
use serde_json::json;
use slupecki_core::budget::SearchBudget;
use slupecki_core::gadgets::{self, BuiltinGadgetFamily, GadgetSpec};
use slupecki_core::hom::{self, Pinning};
use slupecki_core::ordinal;
use slupecki_core::poly::{self, DeciderOptions};
use slupecki_core::{families, io, topology};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "slupecki", version, about = "Decision procedures for reflexive digraphs")]
struct Cli {
    /// Emit the full report as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads; more than one waives canonical-witness guarantees.
    #[arg(long, global = true, env = "SLUPECKI_THREADS", default_value_t = 1)]
    threads: usize,
    /// Seed recorded in reports for randomized drivers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Search-node budget per check.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget_nodes: u64,
    /// Wall-clock budget per check, in seconds.
    #[arg(long, global = true, default_value_t = 300.0)]
    timeout: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a named digraph family and write it as a .dg file.
    Family(FamilyArgs),
    /// Decide a triviality property by exhaustive search.
    Check(CheckArgs),
    /// Enumerate homomorphisms or build the hom digraph.
    Hom(HomArgs),
    /// Verify pp-definability gadgets.
    Gadget(GadgetArgs),
    /// Compute the bound B(m, k).
    Bmk(BmkArgs),
    /// Construct a verified witness operation on a three-level ordinal sum.
    Witness(WitnessArgs),
    /// Simplicial summary: simplex counts, Euler characteristic, 1-sphere.
    Topo(TopoArgs),
    /// Verify and classify an operation table against a digraph.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// One of: path W, cycle W, directed-cycle M, symmetric-cycle M,
    /// crown SIZE, gn SIZE, hn SIZE, antichain N, chain N,
    /// ordinal-sum N1 N2 ..., suspension, poset-suspension, chorded4,
    /// mixed4.
    name: String,
    /// Family parameters (orientation word or level sizes).
    params: Vec<String>,
    /// Orientation word for path/cycle, for words starting with `-`
    /// (e.g. `--word=-+s`).
    #[arg(long)]
    word: Option<String>,
    /// Input digraph for suspension constructors.
    #[arg(short = 'i', long = "input")]
    input: Option<PathBuf>,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Property: slupecki | idtrivial.
    property: String,
    #[arg(short = 'k', long, default_value_t = 2)]
    k: usize,
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
}

#[derive(Args)]
struct HomArgs {
    /// Mode: count | list | graph.
    mode: String,
    /// Source digraph.
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Target digraph; defaults to the source.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Pins `v=w` mapping source vertex v to target vertex w.
    #[arg(long = "pin")]
    pins: Vec<String>,
    /// Output .dg file for `graph` mode (a `.map` sidecar lists the tables).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GadgetArgs {
    /// Mode: verify | builtin.
    mode: String,
    /// For builtin: directed-cycle M | symmetric-cycle M | crown SIZE |
    /// mixed4 | gn SIZE | hn SIZE.
    params: Vec<String>,
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Gadget digraph file for `verify`.
    #[arg(long)]
    gadget: Option<PathBuf>,
    /// Comma-separated pin vertices of the gadget.
    #[arg(long)]
    pins: Option<String>,
    /// Output vertex of the gadget.
    #[arg(long)]
    u: Option<usize>,
    /// Also run the glued-structure cross-check (targets of at most 4
    /// vertices).
    #[arg(long)]
    direct_check: bool,
}

#[derive(Args)]
struct BmkArgs {
    m: usize,
    k: usize,
    /// List every maximising quadruple.
    #[arg(long)]
    argmax: bool,
    /// Sweep 2..=M times 2..=K instead of a single value.
    #[arg(long, num_args = 2, value_names = ["M", "K"])]
    table: Option<Vec<usize>>,
    /// Print the sweep as CSV.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct WitnessArgs {
    /// Kind: ternary | binary.
    kind: String,
    m: usize,
    n: usize,
    k: usize,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Re-verify and report the classification.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct TopoArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(long)]
    max_dim: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Object kind; only `op` is supported.
    kind: String,
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(long)]
    op: PathBuf,
}

struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if cli.threads > 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn budget_of(cli: &Cli) -> SearchBudget {
    SearchBudget {
        max_nodes: cli.budget_nodes,
        timeout: Some(Duration::from_secs_f64(cli.timeout)),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let mut report = Report::new(cli.threads, cli.seed);
    let code = match &cli.cmd {
        Cmd::Family(args) => cmd_family(cli, args, &mut report)?,
        Cmd::Check(args) => cmd_check(cli, args, &mut report)?,
        Cmd::Hom(args) => cmd_hom(cli, args, &mut report)?,
        Cmd::Gadget(args) => cmd_gadget(cli, args, &mut report)?,
        Cmd::Bmk(args) => cmd_bmk(cli, args, &mut report)?,
        Cmd::Witness(args) => cmd_witness(cli, args, &mut report)?,
        Cmd::Topo(args) => cmd_topo(cli, args, &mut report)?,
        Cmd::Verify(args) => cmd_verify(cli, args, &mut report)?,
    };
    if cli.json {
        println!("{}", report.finish());
    }
    Ok(code)
}

fn parse_count(tokens: &[String], what: &str) -> Result<usize, CliError> {
    tokens
        .first()
        .ok_or_else(|| CliError(format!("{what}: missing parameter")))?
        .parse()
        .map_err(|_| CliError(format!("{what}: parameter must be a number")))
}

fn parse_levels(tokens: &[String]) -> Result<Vec<usize>, CliError> {
    if tokens.is_empty() {
        return Err(CliError("ordinal-sum: at least one level required".into()));
    }
    tokens
        .iter()
        .map(|t| {
            t.parse()
                .map_err(|_| CliError(format!("level {t:?} is not a number")))
        })
        .collect()
}

fn cmd_family(cli: &Cli, args: &FamilyArgs, report: &mut Report) -> Result<u8, CliError> {
    let word = || {
        args.word
            .clone()
            .unwrap_or_else(|| args.params.join(""))
    };
    let g = match args.name.as_str() {
        "path" => families::path(&word().parse()?)?,
        "cycle" => families::cycle(&word().parse()?)?,
        "directed-cycle" => families::directed_cycle(parse_count(&args.params, "directed-cycle")?)?,
        "symmetric-cycle" => {
            families::symmetric_cycle(parse_count(&args.params, "symmetric-cycle")?)?
        }
        "crown" => families::crown(parse_count(&args.params, "crown")?)?,
        "gn" => families::complete_minus_matching(parse_count(&args.params, "gn")?)?,
        "hn" => families::complete_minus_hamiltonian(parse_count(&args.params, "hn")?)?,
        "antichain" => families::antichain(parse_count(&args.params, "antichain")?)?,
        "chain" => families::chain(parse_count(&args.params, "chain")?)?,
        "ordinal-sum" => families::ordinal_sum(&parse_levels(&args.params)?)?,
        "suspension" | "poset-suspension" => {
            let input = args
                .input
                .as_ref()
                .ok_or_else(|| CliError(format!("{}: -i input.dg required", args.name)))?;
            let base = io::read_digraph(input)?;
            report.add_input(input)?;
            if args.name == "suspension" {
                families::suspension(&base)
            } else {
                families::poset_suspension(&base)?
            }
        }
        "chorded4" => families::chorded_4_cycle(),
        "mixed4" => families::mixed_4_cycle(),
        other => return Err(CliError(format!("unknown family {other:?}"))),
    };
    io::write_digraph(&g, &args.output)?;
    report.set_payload(json!({
        "family": args.name,
        "params": args.params,
        "output": args.output.display().to_string(),
        "digraph": g,
    }));
    if !cli.json {
        println!(
            "{}: {} vertices, {} arcs -> {}",
            args.name,
            g.n(),
            g.arc_count(),
            args.output.display()
        );
    }
    Ok(0)
}

fn cmd_check(cli: &Cli, args: &CheckArgs, report: &mut Report) -> Result<u8, CliError> {
    let g = io::read_digraph(&args.input)?;
    report.add_input(&args.input)?;
    let budget = budget_of(cli);
    let opts = DeciderOptions {
        threads: cli.threads,
    };
    let verdict = match args.property.as_str() {
        "slupecki" => poly::k_slupecki_opts(&g, args.k, &budget, &opts)?,
        "idtrivial" => poly::k_idempotent_trivial_opts(&g, args.k, &budget, &opts)?,
        other => return Err(CliError(format!("unknown property {other:?}"))),
    };
    let code = if verdict.holds.is_some() { 0 } else { 2 };
    if !cli.json {
        match verdict.holds {
            Some(true) => println!("{}-{} holds (exhaustive)", args.k, args.property),
            Some(false) => println!(
                "{}-{} fails; witness: {:?}",
                args.k,
                args.property,
                verdict.witness.as_ref().map(|w| w.table.values())
            ),
            None => println!(
                "{}-{} inconclusive within budget ({} nodes, {:?})",
                args.k, args.property, verdict.stats.nodes, verdict.stats.status
            ),
        }
    }
    report.set_payload(serde_json::to_value(&verdict).map_err(CliError::from)?);
    Ok(code)
}

fn parse_pins(pins: &[String]) -> Result<Vec<(usize, usize)>, CliError> {
    pins.iter()
        .map(|p| {
            let (v, w) = p
                .split_once('=')
                .ok_or_else(|| CliError(format!("pin {p:?} must look like v=w")))?;
            Ok((
                v.trim().parse().map_err(|_| CliError(format!("bad pin {p:?}")))?,
                w.trim().parse().map_err(|_| CliError(format!("bad pin {p:?}")))?,
            ))
        })
        .collect()
}

fn cmd_hom(cli: &Cli, args: &HomArgs, report: &mut Report) -> Result<u8, CliError> {
    let source = io::read_digraph(&args.input)?;
    report.add_input(&args.input)?;
    let target = match &args.target {
        Some(path) => {
            let t = io::read_digraph(path)?;
            report.add_input(path)?;
            t
        }
        None => source.clone(),
    };
    let pins = Pinning::new(parse_pins(&args.pins)?, source.n(), target.n())?;
    let budget = budget_of(cli);
    match args.mode.as_str() {
        "count" => {
            let (count, stats) = hom::count_homs(&source, &target, &pins, &budget)?;
            let code = if stats.status.is_complete() { 0 } else { 2 };
            if !cli.json {
                println!("{count} homomorphisms ({:?})", stats.status);
            }
            report.set_payload(json!({ "count": count, "stats": stats }));
            Ok(code)
        }
        "list" => {
            let (maps, stats) = hom::collect_homs(&source, &target, &pins, None, &budget)?;
            if !cli.json {
                for m in &maps {
                    let row: Vec<String> = m.iter().map(|v| v.to_string()).collect();
                    println!("{}", row.join(" "));
                }
            }
            let code = if stats.status.is_complete() { 0 } else { 2 };
            report.set_payload(json!({ "homs": maps, "stats": stats }));
            Ok(code)
        }
        "graph" => {
            let hd = hom::hom_digraph(&source, &target, &budget)?;
            let payload = json!({
                "vertices": hd.vertices.len(),
                "arcs": hd.graph.arc_count(),
                "tables": hd.vertices,
            });
            if let Some(out) = &args.output {
                io::write_digraph(&hd.graph, out)?;
                let mut side = String::new();
                for (i, t) in hd.vertices.iter().enumerate() {
                    let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                    side.push_str(&format!("{i} {}\n", row.join(" ")));
                }
                let side_path = format!("{}.map", out.display());
                std::fs::write(&side_path, side).map_err(|e| CliError(e.to_string()))?;
                if !cli.json {
                    println!(
                        "hom digraph: {} vertices, {} arcs -> {} (+ {side_path})",
                        hd.vertices.len(),
                        hd.graph.arc_count(),
                        out.display()
                    );
                }
            } else if !cli.json {
                println!(
                    "hom digraph: {} vertices, {} arcs",
                    hd.vertices.len(),
                    hd.graph.arc_count()
                );
            }
            report.set_payload(payload);
            Ok(0)
        }
        other => Err(CliError(format!("unknown hom mode {other:?}"))),
    }
}

fn parse_builtin_family(params: &[String]) -> Result<BuiltinGadgetFamily, CliError> {
    let name = params
        .first()
        .ok_or_else(|| CliError("gadget builtin: family name required".into()))?;
    let num = |what: &str| parse_count(&params[1..], what);
    Ok(match name.as_str() {
        "directed-cycle" => BuiltinGadgetFamily::DirectedCycle {
            girth: num("directed-cycle")?,
        },
        "symmetric-cycle" | "symmetric-even-cycle" => BuiltinGadgetFamily::SymmetricEvenCycle {
            girth: num("symmetric-cycle")?,
        },
        "crown" => BuiltinGadgetFamily::Crown {
            size: num("crown")?,
        },
        "mixed4" => BuiltinGadgetFamily::Mixed4Cycle,
        "gn" => BuiltinGadgetFamily::CompleteMinusMatching { size: num("gn")? },
        "hn" => BuiltinGadgetFamily::CompleteMinusHamiltonian { size: num("hn")? },
        other => return Err(CliError(format!("unknown gadget family {other:?}"))),
    })
}

fn cmd_gadget(cli: &Cli, args: &GadgetArgs, report: &mut Report) -> Result<u8, CliError> {
    let g = io::read_digraph(&args.input)?;
    report.add_input(&args.input)?;
    let budget = budget_of(cli);
    let gadget: GadgetSpec = match args.mode.as_str() {
        "verify" => {
            let path = args
                .gadget
                .as_ref()
                .ok_or_else(|| CliError("gadget verify: --gadget k.dg required".into()))?;
            let graph = io::read_digraph(path)?;
            report.add_input(path)?;
            let pins: Vec<usize> = args
                .pins
                .as_ref()
                .ok_or_else(|| CliError("gadget verify: --pins required".into()))?
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| CliError(format!("bad pin vertex {t:?}")))
                })
                .collect::<Result<_, _>>()?;
            let output = args
                .u
                .ok_or_else(|| CliError("gadget verify: --u output vertex required".into()))?;
            GadgetSpec::new(graph, pins, output, "user-supplied gadget")?
        }
        "builtin" => gadgets::builtin_gadget(parse_builtin_family(&args.params)?)?,
        other => return Err(CliError(format!("unknown gadget mode {other:?}"))),
    };
    let cert = gadgets::verify_uniform_gadget(&g, &gadget, &budget, cli.threads)?;
    let direct = if args.direct_check {
        Some(gadgets::direct_theta_check(&g, &gadget, &budget)?)
    } else {
        None
    };
    let code = if cert.status.is_complete() { 0 } else { 2 };
    if !cli.json {
        println!(
            "certificate: valid={} proper_everywhere={} co_singletons={}/{}{}",
            cert.valid,
            cert.proper_everywhere,
            cert.co_singletons_found.len(),
            g.n(),
            match direct {
                Some(ok) => format!(" direct_check={ok}"),
                None => String::new(),
            }
        );
    }
    let mut payload = serde_json::to_value(&cert).map_err(CliError::from)?;
    if let Some(ok) = direct {
        payload["direct_theta_check"] = json!(ok);
    }
    report.set_payload(payload);
    Ok(code)
}

fn cmd_bmk(cli: &Cli, args: &BmkArgs, report: &mut Report) -> Result<u8, CliError> {
    if let Some(bounds) = &args.table {
        let (m_max, k_max) = (bounds[0], bounds[1]);
        let cells: Vec<(usize, usize)> = (2..=m_max)
            .flat_map(|m| (2..=k_max).map(move |k| (m, k)))
            .collect();
        let results: Vec<ordinal::BmkResult> = if cli.threads > 1 {
            use rayon::prelude::*;
            cells
                .par_iter()
                .map(|&(m, k)| ordinal::bmk(m, k))
                .collect::<Result<_, _>>()?
        } else {
            cells
                .iter()
                .map(|&(m, k)| ordinal::bmk(m, k))
                .collect::<Result<_, _>>()?
        };
        if !cli.json {
            if args.csv {
                println!("m,k,b,mu");
                for r in &results {
                    println!("{},{},{},{}", r.m, r.k, r.b, r.mu);
                }
            } else {
                for r in &results {
                    println!("B({}, {}) = {}", r.m, r.k, r.b);
                }
            }
        }
        report.set_payload(json!({ "table": results }));
        return Ok(0);
    }
    let r = ordinal::bmk(args.m, args.k)?;
    if !cli.json {
        if args.argmax {
            println!("B({}, {}) = {} (mu = {}, {:?})", r.m, r.k, r.b, r.mu, r.source);
        } else {
            println!("{}", r.b);
        }
    }
    report.set_payload(serde_json::to_value(&r).map_err(CliError::from)?);
    Ok(0)
}

fn cmd_witness(cli: &Cli, args: &WitnessArgs, report: &mut Report) -> Result<u8, CliError> {
    let table = match args.kind.as_str() {
        "ternary" => ordinal::ternary_witness(args.m, args.n, args.k)?,
        "binary" => ordinal::binary_witness(args.m, args.n, args.k)?,
        other => return Err(CliError(format!("unknown witness kind {other:?}"))),
    };
    if let Some(out) = &args.output {
        io::write_op(&table, out)?;
    }
    let classification = poly::classify(&table);
    let mut payload = json!({
        "kind": args.kind,
        "m": args.m,
        "n": args.n,
        "k": args.k,
        "table": table,
    });
    if args.verify {
        let p = ordinal::OrdinalSumPoset::new(args.m, args.n, args.k)?;
        let claims = ordinal::verify_binary_claims(&p, &table).ok();
        payload["classification"] = serde_json::to_value(&classification).map_err(CliError::from)?;
        payload["is_polymorphism"] = json!(poly::is_polymorphism(p.graph(), &table)?);
        if let Some(claims) = claims {
            payload["claims"] = serde_json::to_value(&claims).map_err(CliError::from)?;
        }
    }
    if !cli.json {
        println!(
            "{} witness on {}+{}+{}: surjective={} essential_coords={:?}{}",
            args.kind,
            args.m,
            args.n,
            args.k,
            classification.surjective,
            classification.essential_coords,
            match &args.output {
                Some(p) => format!(" -> {}", p.display()),
                None => String::new(),
            }
        );
    }
    report.set_payload(payload);
    Ok(0)
}

fn cmd_topo(cli: &Cli, args: &TopoArgs, report: &mut Report) -> Result<u8, CliError> {
    let g = io::read_digraph(&args.input)?;
    report.add_input(&args.input)?;
    let complex = topology::simplices(&g, args.max_dim)?;
    let euler: Option<i64> = if complex.complete {
        Some(
            complex
                .counts()
                .iter()
                .enumerate()
                .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum(),
        )
    } else {
        None
    };
    let one_sphere = topology::triangulates_1_sphere(&g);
    if !cli.json {
        println!(
            "simplices per dimension: {:?}{}",
            complex.counts(),
            if complex.complete { "" } else { " (truncated)" }
        );
        match euler {
            Some(chi) => println!("euler characteristic: {chi}"),
            None => println!("euler characteristic: unavailable under the dimension bound"),
        }
        println!("triangulates a 1-sphere: {one_sphere}");
    }
    report.set_payload(json!({
        "counts": complex.counts(),
        "complete": complex.complete,
        "euler_characteristic": euler,
        "triangulates_1_sphere": one_sphere,
    }));
    Ok(0)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, report: &mut Report) -> Result<u8, CliError> {
    if args.kind != "op" {
        return Err(CliError(format!("unknown verify kind {:?}", args.kind)));
    }
    let g = io::read_digraph(&args.input)?;
    report.add_input(&args.input)?;
    let f = io::read_op(&args.op)?;
    report.add_input(&args.op)?;
    let is_poly = poly::is_polymorphism(&g, &f)?;
    let classification = poly::classify(&f);
    if !cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "is_polymorphism": is_poly,
                "classification": classification,
            }))
            .map_err(CliError::from)?
        );
    }
    report.set_payload(json!({
        "is_polymorphism": is_poly,
        "classification": classification,
    }));
    Ok(0)
}
