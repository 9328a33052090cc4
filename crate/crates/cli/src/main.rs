//! `bidfair` command-line front-end.
//!
//! Exit codes: 0 pass, 1 guarantee violation, 2 input error, 3 internal
//! contract violation.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bidfair::analysis::{
    analyze_proportional_run, build_theorem_system, check_feasible, guarantee_report, AgentCount,
    Feasibility, SYSTEM_VARIABLES,
};
use bidfair::engine::{run_game, AltruisticTrigger, GameConfig, GameMode, Strategy};
use bidfair::instance_gen::{
    gen_altruistic_negative, gen_modified_negative, gen_original_negative, gen_random_submodular,
    gen_xos_hard, EntitlementKind, PlayerSpec, ScriptedRun,
};
use bidfair::io::{to_json, verify_report, write_instance, CheckDoc, ReportError, RunReport};
use bidfair::poly::{mms_rho, unconditional_allocate, PolyError, ShareMode};
use bidfair::rational::{format_rational, parse_rational, Rational};
use bidfair::shares::{aps_of, mms_of, ShareWitness};
use bidfair::strategies::{
    default_rho, make_altruistic_proportional_mms, make_proportional_aps,
    make_unit_demand_full_budget, FractionBidder, GreedyBidder, RandomBidder,
};
use bidfair::valuation::{SizeGuard, ValuationOracle};
use bidfair::{AgentId, Instance, TieBreakPolicy};

#[derive(Parser)]
#[command(name = "bidfair", version, about = "Fair allocation through the bidding game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file (or, with --run, the report of a scripted run).
    Gen(GenArgs),
    /// Exact MMS and APS of each agent, with witnesses.
    Shares(SharesArgs),
    /// Play the bidding game and report the transcript and guarantees.
    Play(PlayArgs),
    /// Guess-refinement allocation with proportional strategies.
    Alloc(AllocArgs),
    /// Re-verify a run report offline.
    Verify(VerifyArgs),
    /// Feasibility of the linear system bounding the altruistic guarantee.
    Lpcert(LpcertArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    AltruisticNegative,
    OriginalNegative,
    ModifiedNegative,
    XosHard,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Construction depth for the negative instances, columns for xos-hard.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Number of agents (random, xos-hard).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Number of items (random).
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// Coverage universe size (random).
    #[arg(long, default_value_t = 6)]
    universe: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Equal entitlements (random).
    #[arg(long)]
    equal: bool,
    /// Execute the scripted run and emit its report instead of the instance.
    #[arg(long)]
    run: bool,
    /// Output path, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SharesArgs {
    /// Instance file, `-` for stdin.
    instance: String,
    /// Restrict to these agents.
    #[arg(long = "agent")]
    agents: Vec<u32>,
    /// Largest item count for exhaustive computations (default from
    /// BIDFAIR_MAX_ITEMS, else 12).
    #[arg(long)]
    max_items: Option<usize>,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Standard,
    Altruistic,
    MultiPick,
}

#[derive(Clone, Copy, ValueEnum)]
enum TriggerArg {
    Exceeds,
    Reaches,
}

#[derive(Args)]
struct PlayArgs {
    instance: String,
    #[arg(long, value_enum, default_value = "standard")]
    mode: ModeArg,
    /// Altruistic spend fraction (default 10/27).
    #[arg(long)]
    rho: Option<String>,
    #[arg(long, value_enum, default_value = "exceeds")]
    trigger: TriggerArg,
    /// `lexicographic`, `random`, or `against:<agent>`.
    #[arg(long, default_value = "lexicographic")]
    tiebreak: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `<agent>=<kind>` with kind one of proportional, altruistic,
    /// unit-demand, passive, all-in, random, greedy. Unlisted agents play
    /// proportional (altruistic in altruistic mode, unit-demand in
    /// multi-pick mode).
    #[arg(long = "strategy")]
    strategies: Vec<String>,
    #[arg(long)]
    max_items: Option<usize>,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShareArg {
    Aps,
    Mms,
}

#[derive(Args)]
struct AllocArgs {
    instance: String,
    #[arg(long, value_enum, default_value = "aps")]
    mode: ShareArg,
    /// Guess decrement (default 2/(3m) for APS, 1/(3n) for MMS).
    #[arg(long)]
    epsilon: Option<String>,
    /// Bound on v(M)/v(S) over positive bundles (default from singletons).
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value = "lexicographic")]
    tiebreak: String,
    #[arg(long)]
    max_items: Option<usize>,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Report file, `-` for stdin.
    report: String,
}

#[derive(Args)]
struct LpcertArgs {
    #[arg(long)]
    z: String,
    /// Number of agents or `inf`.
    #[arg(long)]
    n: String,
    #[arg(short, long, default_value = "-")]
    output: String,
}

enum Failure {
    Guarantee(String),
    Input(String),
    Contract(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Guarantee(_) => 1,
            Failure::Input(_) => 2,
            Failure::Contract(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Guarantee(m) | Failure::Input(m) | Failure::Contract(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

type CliResult = Result<(), Failure>;

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(input)?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn write_sink(path: &str, text: &str) -> CliResult {
    if path == "-" {
        io::stdout().write_all(text.as_bytes()).map_err(input)
    } else {
        fs::write(path, text).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn rational_arg(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| Failure::Input(format!("--{name}: {e}")))
}

fn load_instance(path: &str) -> Result<Instance, Failure> {
    bidfair::io::parse_instance(&read_source(path)?).map_err(input)
}

fn guard(max_items: Option<usize>) -> SizeGuard {
    max_items.map(SizeGuard::new).unwrap_or_else(SizeGuard::from_env)
}

fn tie_breaker(text: &str) -> Result<TieBreakPolicy, Failure> {
    match text {
        "lexicographic" => Ok(TieBreakPolicy::Lexicographic),
        "random" => Ok(TieBreakPolicy::SeededRandom),
        other => other
            .strip_prefix("against:")
            .and_then(|id| id.parse().ok())
            .map(|id| TieBreakPolicy::AdversarialAgainst(AgentId(id)))
            .ok_or_else(|| Failure::Input(format!("unknown tie-break policy {other:?}"))),
    }
}

fn scripted_run(args: &GenArgs) -> Result<ScriptedRun, Failure> {
    match args.kind {
        GenKind::AltruisticNegative => gen_altruistic_negative(args.k),
        GenKind::OriginalNegative => gen_original_negative(args.k),
        GenKind::ModifiedNegative => gen_modified_negative(args.k),
        GenKind::XosHard => gen_xos_hard(args.n, args.k),
        GenKind::Random => unreachable!("random instances are not scripted"),
    }
    .map_err(input)
}

fn cmd_gen(args: GenArgs) -> CliResult {
    if let GenKind::Random = args.kind {
        if args.run {
            return Err(Failure::Input("--run needs a scripted generator".into()));
        }
        let kind = if args.equal {
            EntitlementKind::Equal
        } else {
            EntitlementKind::Random
        };
        let inst = gen_random_submodular(args.seed, args.n, args.m, args.universe, kind)
            .map_err(input)?;
        return write_sink(&args.output, &write_instance(&inst));
    }
    let run = scripted_run(&args)?;
    if !args.run {
        return write_sink(&args.output, &write_instance(&run.instance));
    }
    let out = run.execute().map_err(|e| Failure::Contract(e.to_string()))?;
    let target = match &run.player {
        PlayerSpec::ProportionalAps { rho, .. } => rho.clone(),
        PlayerSpec::AltruisticMms { .. } => mms_rho(),
    };
    let shares = BTreeMap::from([(run.p, run.mms.clone())]);
    let targets = BTreeMap::from([(run.p, target)]);
    let g = guarantee_report(&run.instance, &out.transcript.allocation, &shares, &targets)
        .map_err(input)?;
    let report = RunReport::new("gen", &run.instance, &out.transcript, &g);
    eprintln!(
        "{}: p = {}, value {}, MMS {}, ratio {}, as expected: {}",
        run.name,
        run.p,
        format_rational(&out.p_value),
        format_rational(&run.mms),
        format_rational(&out.ratio),
        out.as_expected
    );
    write_sink(&args.output, &to_json(&report))
}

fn sets(parts: &[bidfair::ItemSet]) -> Value {
    parts
        .iter()
        .map(|s| s.iter().map(|e| e.0).collect::<Vec<_>>())
        .collect()
}

fn cmd_shares(args: SharesArgs) -> CliResult {
    let inst = load_instance(&args.instance)?;
    let guard = guard(args.max_items);
    let mut rows = Vec::new();
    for a in inst.agents() {
        if !args.agents.is_empty() && !args.agents.contains(&a.id.0) {
            continue;
        }
        let mms = mms_of(&inst, a.id, guard).map_err(input)?;
        let aps = aps_of(&inst, a.id, guard).map_err(input)?;
        let ShareWitness::Partition(parts) = &mms.witness else {
            return Err(Failure::Contract("MMS witness is not a partition".into()));
        };
        let ShareWitness::Fractional(lambda) = &aps.witness else {
            return Err(Failure::Contract("APS witness is not fractional".into()));
        };
        rows.push(json!({
            "agent": a.id.0,
            "entitlement": format_rational(&a.entitlement),
            "total": format_rational(&a.valuation.value(inst.item_set())),
            "mms": format_rational(&mms.value),
            "mms_partition": sets(parts),
            "aps": format_rational(&aps.value),
            "aps_witness": lambda.entries.iter().map(|(s, w)| json!({
                "items": s.iter().map(|e| e.0).collect::<Vec<_>>(),
                "weight": format_rational(w),
            })).collect::<Vec<_>>(),
        }));
    }
    let doc = json!({ "version": bidfair::io::FORMAT_VERSION, "shares": rows });
    write_sink(&args.output, &to_json(&doc))
}

fn cmd_play(args: PlayArgs) -> CliResult {
    let inst = load_instance(&args.instance)?;
    let guard = guard(args.max_items);
    let rho = args
        .rho
        .as_deref()
        .map(|r| rational_arg("rho", r))
        .transpose()?
        .unwrap_or_else(mms_rho);
    let trigger = match args.trigger {
        TriggerArg::Exceeds => AltruisticTrigger::Exceeds,
        TriggerArg::Reaches => AltruisticTrigger::Reaches,
    };
    let config = match args.mode {
        ModeArg::Standard => GameConfig::standard(),
        ModeArg::MultiPick => GameConfig::multi_pick(),
        ModeArg::Altruistic => GameConfig::altruistic(rho).with_trigger(trigger),
    }
    .with_tie_breaker(tie_breaker(&args.tiebreak)?)
    .with_seed(args.seed);
    config.validate().map_err(input)?;

    let mut kinds: BTreeMap<AgentId, String> = BTreeMap::new();
    for spec in &args.strategies {
        let (id, kind) = spec
            .split_once('=')
            .and_then(|(id, kind)| Some((AgentId(id.trim().parse().ok()?), kind.trim().to_string())))
            .ok_or_else(|| Failure::Input(format!("--strategy {spec:?}: expected <agent>=<kind>")))?;
        inst.agent(id).map_err(input)?;
        kinds.insert(id, kind);
    }
    let default_kind = match args.mode {
        ModeArg::Standard => "proportional",
        ModeArg::Altruistic => "altruistic",
        ModeArg::MultiPick => "unit-demand",
    };

    let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> = BTreeMap::new();
    let mut shares = BTreeMap::new();
    let mut targets = BTreeMap::new();
    let mut proportional = Vec::new();
    for a in inst.agents() {
        let v = a.valuation.clone();
        let b = a.entitlement.clone();
        let kind = kinds.get(&a.id).map(String::as_str).unwrap_or(default_kind);
        let strategy: Box<dyn Strategy> = match kind {
            "proportional" => {
                let aps = aps_of(&inst, a.id, guard).map_err(input)?.value;
                let rho = default_rho(&b);
                shares.insert(a.id, aps.clone());
                targets.insert(a.id, rho.clone());
                proportional.push((a.id, rho.clone(), aps.clone()));
                Box::new(make_proportional_aps(v, b, rho, aps))
            }
            "altruistic" => {
                if !inst.has_equal_entitlements() {
                    return Err(Failure::Input("altruistic strategy needs equal entitlements".into()));
                }
                let mms = mms_of(&inst, a.id, guard).map_err(input)?.value;
                shares.insert(a.id, mms.clone());
                targets.insert(a.id, mms_rho());
                Box::new(make_altruistic_proportional_mms(v, b, mms))
            }
            "unit-demand" => Box::new(make_unit_demand_full_budget(v)),
            "passive" => Box::new(FractionBidder { fraction: Rational::from_integer(0.into()) }),
            "all-in" => Box::new(FractionBidder { fraction: Rational::from_integer(1.into()) }),
            "random" => Box::new(RandomBidder::new(args.seed ^ u64::from(a.id.0), 4)),
            "greedy" => {
                let total = v.value(inst.item_set());
                let scale = if total > Rational::from_integer(0.into()) {
                    &b / total
                } else {
                    Rational::from_integer(0.into())
                };
                Box::new(GreedyBidder { v, scale })
            }
            other => return Err(Failure::Input(format!("unknown strategy {other:?}"))),
        };
        strategies.insert(a.id, strategy);
    }
    let transcript = run_game(&inst, &mut strategies, &config).map_err(|e| match e {
        bidfair::engine::GameError::InvalidConfig(m) => Failure::Input(m),
        other => Failure::Contract(other.to_string()),
    })?;
    let g = guarantee_report(&inst, &transcript.allocation, &shares, &targets).map_err(input)?;
    let mut report = RunReport::new("play", &inst, &transcript, &g);
    if config.mode == GameMode::Standard {
        for (id, rho, aps) in &proportional {
            let analysis = analyze_proportional_run(&inst, &transcript, *id, rho, aps, guard)
                .map_err(|e| Failure::Contract(e.to_string()))?;
            report
                .diagnostics
                .extend(analysis.checks.iter().map(|c| CheckDoc::new(*id, c)));
        }
    }
    write_sink(&args.output, &to_json(&report))?;
    finish(&report)
}

fn finish(report: &RunReport) -> CliResult {
    if report.all_pass() {
        Ok(())
    } else {
        let failing: Vec<String> = report
            .guarantee
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("agent {} got {} of share {}", r.agent, r.value, r.share))
            .chain(
                report
                    .diagnostics
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("agent {} {}: {}", c.agent, c.name, c.detail)),
            )
            .collect();
        Err(Failure::Guarantee(failing.join("; ")))
    }
}

fn cmd_alloc(args: AllocArgs) -> CliResult {
    let inst = load_instance(&args.instance)?;
    let guard = guard(args.max_items);
    let mode = match args.mode {
        ShareArg::Aps => ShareMode::Aps,
        ShareArg::Mms => ShareMode::Mms,
    };
    let eps = match &args.epsilon {
        Some(e) => rational_arg("epsilon", e)?,
        None => mode.default_epsilon(&inst),
    };
    let k = args.k.as_deref().map(|k| rational_arg("k", k)).transpose()?;
    let out = unconditional_allocate(&inst, &eps, k, mode, tie_breaker(&args.tiebreak)?)
        .map_err(|e| match e {
            PolyError::ContractViolation { .. } | PolyError::Game(_) => Failure::Contract(e.to_string()),
            other => Failure::Input(other.to_string()),
        })?;
    let mut shares = BTreeMap::new();
    let mut targets = BTreeMap::new();
    let floor = Rational::from_integer(1.into()) - &eps;
    for a in inst.agents() {
        let share = match mode {
            ShareMode::Aps => aps_of(&inst, a.id, guard),
            ShareMode::Mms => mms_of(&inst, a.id, guard),
        }
        .map_err(input)?
        .value;
        shares.insert(a.id, share);
        targets.insert(a.id, &floor * mode.rho(&a.entitlement));
    }
    let g = guarantee_report(&inst, &out.allocation, &shares, &targets).map_err(input)?;
    let mut report = RunReport::new("alloc", &inst, &out.transcript, &g);
    report.guesses = out
        .guesses
        .iter()
        .map(|g| g.iter().map(|(id, t)| (id.0, format_rational(t))).collect())
        .collect();
    write_sink(&args.output, &to_json(&report))?;
    finish(&report)
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let text = read_source(&args.report)?;
    let report: RunReport = serde_json::from_str(&text).map_err(input)?;
    match verify_report(&report) {
        Ok(true) => {
            println!("pass");
            Ok(())
        }
        Ok(false) => {
            println!("fail: guarantee violated");
            finish(&report)
        }
        Err(ReportError::Io(e)) => Err(input(e)),
        Err(e) => {
            println!("fail: {e}");
            Err(Failure::Guarantee(e.to_string()))
        }
    }
}

fn cmd_lpcert(args: LpcertArgs) -> CliResult {
    let z = rational_arg("z", &args.z)?;
    let n = match args.n.as_str() {
        "inf" | "infinity" => AgentCount::Infinite,
        other => AgentCount::Finite(
            other
                .parse()
                .map_err(|_| Failure::Input(format!("--n: expected a count or inf, got {other:?}")))?,
        ),
    };
    let sys = build_theorem_system(&z, n).map_err(input)?;
    let q = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
    let rows: Vec<Value> = sys
        .rows
        .iter()
        .zip(&sys.strict)
        .map(|(r, strict)| {
            json!({
                "coeffs": q(&r.coeffs),
                "relation": if *strict { "<" } else { "<=" },
                "rhs": format_rational(&r.rhs),
            })
        })
        .collect();
    let result = match check_feasible(&sys) {
        Feasibility::Feasible { witness, margin } => json!({
            "status": "feasible",
            "witness": q(&witness),
            "margin": format_rational(&margin),
        }),
        Feasibility::Infeasible(cert) => json!({
            "status": "infeasible",
            "multipliers": q(&cert.multipliers),
            "combined_coeffs": q(&cert.coeffs),
            "combined_constant": format_rational(&cert.constant),
            "verified": cert.verify(&sys),
        }),
    };
    let doc = json!({
        "version": bidfair::io::FORMAT_VERSION,
        "z": format_rational(&z),
        "n": n.to_string(),
        "variables": SYSTEM_VARIABLES,
        "rows": rows,
        "result": result,
    });
    write_sink(&args.output, &to_json(&doc))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Shares(a) => cmd_shares(a),
        Command::Play(a) => cmd_play(a),
        Command::Alloc(a) => cmd_alloc(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Lpcert(a) => cmd_lpcert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bidfair: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
