//! Command-line front end for the group-theory toolkit: word-problem
//! queries, exact area certificates, growth-function tables, cyclic
//! geometry reports, fibre-product distortion, conjugator construction,
//! the small cancellation compiler, and declarative experiment runs.
//!
//! Exit codes: 0 for a decided, fully certified result; 2 when an audit
//! failed; 3 when the only blemish is an exhausted budget or an
//! uncertified sample; 4 for input, config, or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fpgroups::area::{AreaCaps, AreaEngine, AreaOutcome, Exactness};
use fpgroups::conjugacy::{
    cl_base, cl_pair, construct_p_conjugator, hard_conjugacy_instance, ClCaps, ClFlavor,
    ClPairCaps, ClSample, ConjugatorCaps, ConjugatorOutcome,
};
use fpgroups::constructions::{dagger, rips};
use fpgroups::fibre::{DistortionCaps, FibreSystem};
use fpgroups::geometry::{translation_number_bound, umc_estimate, uqc_estimate, BallIndex};
use fpgroups::harness::{emit, exit_code, run_experiment, CapsConfig, Experiment, ExperimentConfig, Pipeline};
use fpgroups::oracle::{strongest_oracle, Verdict};
use fpgroups::presentation::Presentation;
use fpgroups::word::{Letter, Word};

#[derive(Parser)]
#[command(
    name = "fpg",
    version,
    about = "Finitely presented groups: exact areas, distortion, conjugators, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a word represents the identity
    Wp(WpArgs),
    /// Compute exact van Kampen area with a verifiable certificate
    Area(AreaArgs),
    /// Sample one growth function into JSON/CSV tables
    Table(TableArgs),
    /// Cyclic-subgroup geometry: uniformity constants and translation bounds
    Cyclics(CyclicsArgs),
    /// Fibre-product distortion with hardest-member witnesses
    Fibre(FibreArgs),
    /// Conjugator-length statistics in a group or a fibre product
    Cl(ClArgs),
    /// Build a verified conjugator in a fibre product
    Conjugator(ConjugatorArgs),
    /// Compile a presentation into a certified small cancellation cover
    Rips(RipsArgs),
    /// Compile, square, and attach a stable letter along the fibre product
    Dagger(DaggerArgs),
    /// Run a declarative experiment config and emit its reports
    Run(RunArgs),
}

/// Oracle budgets shared by the query-style verbs.
#[derive(Args)]
struct OracleArgs {
    /// oracle search radius
    #[arg(long, default_value_t = 12)]
    radius: usize,
    /// relator applications allowed per oracle query
    #[arg(long, default_value_t = 5)]
    moves: u64,
}

#[derive(Args)]
struct WpArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    /// the word to decide, e.g. "x y x^-1 y^-1"
    word: String,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct AreaArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    /// the null word to fill
    word: String,
    /// area cap for the certificate search
    #[arg(long, default_value_t = 24)]
    area_cap: u64,
}

#[derive(Args)]
struct TableArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    /// which function to sample (delta, delta_c, delta_z, delta_o, frak_m,
    /// frak_t, dist, cl, cl_rel)
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    n_min: u64,
    #[arg(long)]
    n_max: u64,
    /// output directory
    #[arg(long)]
    out: PathBuf,
    /// kernel generator names, enabling the fibre-product functions
    #[arg(long)]
    kernel: Vec<String>,
    /// emit only this format (json, csv); repeat for both (the default)
    #[arg(long)]
    format: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    caps: CapsArgs,
}

/// The full cap set, mirroring the config file's `[caps]` table.
#[derive(Args)]
struct CapsArgs {
    #[arg(long, default_value_t = 12)]
    radius: usize,
    #[arg(long, default_value_t = 5)]
    moves: u64,
    #[arg(long, default_value_t = 24)]
    area: u64,
    #[arg(long, default_value_t = 5)]
    exponent: u64,
    #[arg(long, default_value_t = 8)]
    order_cutoff: u64,
    #[arg(long, default_value_t = 50_000_000)]
    quotient_budget: u64,
    #[arg(long, default_value_t = 6)]
    p_radius: usize,
}

impl CapsArgs {
    fn to_config(&self) -> CapsConfig {
        CapsConfig {
            radius: self.radius,
            moves: self.moves,
            area: self.area,
            exponent: self.exponent,
            order_cutoff: self.order_cutoff,
            quotient_budget: self.quotient_budget,
            p_radius: self.p_radius,
        }
    }
}

#[derive(Args)]
struct CyclicsArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    /// ball radius for the geometry scan
    #[arg(long, default_value_t = 3)]
    ball_radius: usize,
    /// power cap for the cyclic scans
    #[arg(long, default_value_t = 5)]
    power_cap: u64,
    /// work budget for finite-quotient separation
    #[arg(long, default_value_t = 50_000_000)]
    quotient_budget: u64,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct FibreArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    /// kernel generator names (repeatable)
    #[arg(long, required = true)]
    kernel: Vec<String>,
    #[arg(long)]
    n_min: u64,
    #[arg(long)]
    n_max: u64,
    /// radius cap for the fibre-product ball
    #[arg(long, default_value_t = 8)]
    p_radius: usize,
    #[arg(long, default_value_t = 50_000_000)]
    quotient_budget: u64,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    /// pairs and conjugators in the base group
    Base,
    /// pairs and conjugators in the fibre product's own generators
    Intrinsic,
    /// pairs in the ambient direct square, conjugators in the fibre product
    Relative,
}

#[derive(Args)]
struct ClArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    #[arg(long, value_enum)]
    flavor: FlavorArg,
    /// kernel generator names (required for intrinsic/relative)
    #[arg(long)]
    kernel: Vec<String>,
    #[arg(long)]
    n_min: u64,
    #[arg(long)]
    n_max: u64,
    /// conjugator search radius
    #[arg(long, default_value_t = 4)]
    search_radius: usize,
    #[arg(long, default_value_t = 50_000_000)]
    quotient_budget: u64,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct ConjugatorArgs {
    /// presentation file
    #[arg(long)]
    pres: PathBuf,
    /// kernel generator names (repeatable)
    #[arg(long, required = true)]
    kernel: Vec<String>,
    /// build the hard instance at this scale instead of passing a pair
    #[arg(long)]
    hard: Option<usize>,
    /// first coordinate of U
    #[arg(long)]
    u1: Option<String>,
    /// second coordinate of U
    #[arg(long)]
    u2: Option<String>,
    /// first coordinate of V
    #[arg(long)]
    v1: Option<String>,
    /// second coordinate of V
    #[arg(long)]
    v2: Option<String>,
    /// radius of the base-group conjugacy searches
    #[arg(long, default_value_t = 4)]
    search_radius: usize,
    /// centralizer exponent scan bound
    #[arg(long, default_value_t = 4)]
    exponent_cap: i64,
    #[arg(long, default_value_t = 8)]
    order_cutoff: u64,
    /// radius cap for the fibre-product ball (hard instances)
    #[arg(long, default_value_t = 8)]
    p_radius: usize,
    #[arg(long, default_value_t = 50_000_000)]
    quotient_budget: u64,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct RipsArgs {
    /// input presentation file
    #[arg(long = "in")]
    input: PathBuf,
    /// where to write the compiled presentation
    #[arg(long)]
    out: PathBuf,
    /// target kernel-word length
    #[arg(long, default_value_t = 400)]
    tails: usize,
}

#[derive(Args)]
struct DaggerArgs {
    /// input presentation file
    #[arg(long = "in")]
    input: PathBuf,
    /// where to write the composite presentation
    #[arg(long)]
    out: PathBuf,
    /// target kernel-word length for the compile stage
    #[arg(long, default_value_t = 400)]
    tails: usize,
}

#[derive(Args)]
struct RunArgs {
    /// experiment config (TOML)
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(4)
        }
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Wp(args) => cmd_wp(args),
        Command::Area(args) => cmd_area(args),
        Command::Table(args) => cmd_table(args),
        Command::Cyclics(args) => cmd_cyclics(args),
        Command::Fibre(args) => cmd_fibre(args),
        Command::Cl(args) => cmd_cl(args),
        Command::Conjugator(args) => cmd_conjugator(args),
        Command::Rips(args) => cmd_rips(args),
        Command::Dagger(args) => cmd_dagger(args),
        Command::Run(args) => cmd_run(args),
    }
}

fn load_presentation(path: &Path) -> Result<Presentation> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Presentation::parse(&text).map_err(|e| anyhow!("parsing {}: {e}", path.display()))
}

fn parse_word(p: &Presentation, text: &str) -> Result<Word> {
    p.alphabet().parse(text).map_err(|e| anyhow!("word {text:?}: {e}"))
}

fn build_system(p: &Presentation, kernel: &[String], oracle: &OracleArgs) -> Result<FibreSystem> {
    let names: Vec<&str> = kernel.iter().map(|s| s.as_str()).collect();
    Ok(FibreSystem::with_budgets(p, &names, oracle.radius, oracle.moves)?)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Trivial => "trivial",
        Verdict::Nontrivial => "nontrivial",
        Verdict::Unknown => "unknown",
    }
}

// ---------------------------------------------------------------------------
// wp
// ---------------------------------------------------------------------------

fn cmd_wp(args: WpArgs) -> Result<u8> {
    let p = load_presentation(&args.pres)?;
    let w = parse_word(&p, &args.word)?;
    let oracle = strongest_oracle(&p, args.oracle.radius, args.oracle.moves);
    let verdict = oracle.query(&w);
    println!("verdict: {}", verdict_str(verdict));
    if let Some(nf) = oracle.normal_form(&w) {
        println!("normal form: {}", p.alphabet().format_word(&nf));
    }
    Ok(if verdict == Verdict::Unknown { 3 } else { 0 })
}

// ---------------------------------------------------------------------------
// area
// ---------------------------------------------------------------------------

fn cmd_area(args: AreaArgs) -> Result<u8> {
    let p = load_presentation(&args.pres)?;
    let w = parse_word(&p, &args.word)?;
    let engine = AreaEngine::new(&p);
    let mut caps = AreaCaps::default_for(&w, &p);
    caps.area_cap = args.area_cap;
    match engine.area(&w, &caps) {
        AreaOutcome::Found { area, certificate, exact } => {
            let factors: Vec<serde_json::Value> = certificate
                .factors
                .iter()
                .map(|f| {
                    json!({
                        "relator": p.alphabet().format_word(&f.relator),
                        "conjugator": p.alphabet().format_word(&f.conjugator),
                    })
                })
                .collect();
            print_json(&json!({
                "outcome": "found",
                "area": area,
                "exact": exact,
                "factors": factors,
                "noise": certificate.noise,
                "noise_bound_met": certificate.noise_bound_met,
            }));
            Ok(if exact { 0 } else { 3 })
        }
        AreaOutcome::NotNull => {
            print_json(&json!({ "outcome": "not_null" }));
            Ok(0)
        }
        AreaOutcome::Exhausted { .. } => {
            print_json(&json!({ "outcome": "exhausted" }));
            Ok(3)
        }
    }
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

fn cmd_table(args: TableArgs) -> Result<u8> {
    let base_dir = args.pres.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    let name = args
        .pres
        .file_name()
        .ok_or_else(|| anyhow!("presentation path has no file name"))?
        .to_string_lossy()
        .into_owned();
    let formats = if args.format.is_empty() {
        vec!["json".to_string(), "csv".to_string()]
    } else {
        args.format.clone()
    };
    let config = ExperimentConfig {
        presentation: name,
        pipeline: Pipeline::None,
        kernel: args.kernel.clone(),
        hnn_commute: vec![],
        tails: 400,
        n_min: args.n_min,
        n_max: args.n_max,
        seed: args.seed,
        output: args.out.display().to_string(),
        functions: vec![args.function.clone()],
        audits: vec![],
        formats,
        caps: args.caps.to_config(),
    };
    let experiment = Experiment::prepare(config, &base_dir)?;
    let report = experiment.run();
    let files = emit(&report, &args.out)?;
    for table in &report.tables {
        let exact = table
            .samples
            .iter()
            .filter(|s| s.exactness == Exactness::Exact)
            .count();
        println!(
            "table {}: {} samples, {} exact",
            table.name.as_str(),
            table.samples.len(),
            exact
        );
    }
    for file in &files {
        println!("wrote {}", file.display());
    }
    Ok(exit_code(&report) as u8)
}

// ---------------------------------------------------------------------------
// cyclics
// ---------------------------------------------------------------------------

fn cmd_cyclics(args: CyclicsArgs) -> Result<u8> {
    let p = load_presentation(&args.pres)?;
    let oracle = strongest_oracle(&p, args.oracle.radius, args.oracle.moves);
    let ball = BallIndex::build(&p, oracle.as_ref(), args.ball_radius, args.quotient_budget);
    let uqc = uqc_estimate(&ball, oracle.as_ref(), args.power_cap);
    let umc = umc_estimate(&ball, oracle.as_ref(), args.power_cap);
    let mut translations = Vec::new();
    let mut uncertified = !ball.complete();
    for (idx, name) in p.alphabet().names().iter().enumerate() {
        let g = Word::from_reduced(vec![Letter::new(idx as u32, false)]);
        let bound = translation_number_bound(&g, &ball, oracle.as_ref(), args.power_cap);
        if bound.value.is_none() || bound.uncertified_powers > 0 {
            uncertified = true;
        }
        translations.push(json!({ "generator": name, "bound": bound }));
    }
    uncertified |= uqc.uncertified_powers > 0 || umc.uncertified_powers > 0;
    print_json(&json!({
        "uqc": uqc,
        "umc": umc,
        "translation": translations,
    }));
    Ok(if uncertified { 3 } else { 0 })
}

// ---------------------------------------------------------------------------
// fibre
// ---------------------------------------------------------------------------

fn cmd_fibre(args: FibreArgs) -> Result<u8> {
    let p = load_presentation(&args.pres)?;
    let sys = build_system(&p, &args.kernel, &args.oracle)?;
    let caps = DistortionCaps {
        p_radius_cap: args.p_radius,
        quotient_budget: args.quotient_budget,
    };
    let mut rows = Vec::new();
    let mut all_exact = true;
    for n in args.n_min..=args.n_max {
        let sample = sys.distortion(n as usize, &caps);
        let witness = sys.hard_distortion_witness(n as usize, &caps);
        all_exact &= sample.exactness == Exactness::Exact && witness.exact;
        rows.push(json!({
            "n": sample.n,
            "value": sample.value,
            "exactness": sample.exactness.as_str(),
            "witness": witness,
        }));
    }
    print_json(&json!({
        "kernel": args.kernel,
        "samples": rows,
    }));
    Ok(if all_exact { 0 } else { 3 })
}

// ---------------------------------------------------------------------------
// cl
// ---------------------------------------------------------------------------

fn cl_sample_json(s: &ClSample) -> serde_json::Value {
    json!({
        "n": s.n,
        "value": s.value,
        "witness": s.witness,
        "conjugator": s.conjugator,
        "exactness": s.exactness.as_str(),
    })
}

fn cmd_cl(args: ClArgs) -> Result<u8> {
    let p = load_presentation(&args.pres)?;
    let mut rows = Vec::new();
    let mut all_exact = true;
    match args.flavor {
        FlavorArg::Base => {
            let oracle = strongest_oracle(&p, args.oracle.radius, args.oracle.moves);
            let caps = ClCaps {
                search_radius: args.search_radius,
                quotient_budget: args.quotient_budget,
            };
            for n in args.n_min..=args.n_max {
                let s = cl_base(&p, oracle.as_ref(), n, &caps);
                all_exact &= s.exactness == Exactness::Exact;
                rows.push(cl_sample_json(&s));
            }
        }
        FlavorArg::Intrinsic | FlavorArg::Relative => {
            if args.kernel.is_empty() {
                return Err(anyhow!("--flavor {} needs --kernel", match args.flavor {
                    FlavorArg::Intrinsic => "intrinsic",
                    _ => "relative",
                }));
            }
            let sys = build_system(&p, &args.kernel, &args.oracle)?;
            let caps = ClPairCaps {
                conjugator_radius: args.search_radius,
                quotient_budget: args.quotient_budget,
            };
            let flavor = match args.flavor {
                FlavorArg::Intrinsic => ClFlavor::PairIntrinsic,
                _ => ClFlavor::PairRelative,
            };
            for n in args.n_min..=args.n_max {
                let s = cl_pair(&sys, n, flavor, &caps);
                all_exact &= s.exactness == Exactness::Exact;
                rows.push(cl_sample_json(&s));
            }
        }
    }
    print_json(&json!({ "samples": rows }));
    Ok(if all_exact { 0 } else { 3 })
}

// ---------------------------------------------------------------------------
// conjugator
// ---------------------------------------------------------------------------

fn cmd_conjugator(args: ConjugatorArgs) -> Result<u8> {
    let p = load_presentation(&args.pres)?;
    let sys = build_system(&p, &args.kernel, &args.oracle)?;
    let (u, v, instance_json) = if let Some(scale) = args.hard {
        let caps = DistortionCaps {
            p_radius_cap: args.p_radius,
            quotient_budget: args.quotient_budget,
        };
        let instance = hard_conjugacy_instance(&sys, scale, &caps)?;
        let info = json!({
            "gamma": p.alphabet().format_word(&instance.gamma),
            "u_p_len": instance.u_p_len,
            "v_p_len": instance.v_p_len,
            "bound_ok": instance.bound_ok,
        });
        (instance.u.clone(), instance.v.clone(), Some(info))
    } else {
        let words: Vec<&Option<String>> = vec![&args.u1, &args.u2, &args.v1, &args.v2];
        if words.iter().any(|w| w.is_none()) {
            return Err(anyhow!("pass either --hard N or all of --u1 --u2 --v1 --v2"));
        }
        let parse = |w: &Option<String>| parse_word(&p, w.as_ref().unwrap());
        (
            (parse(&args.u1)?, parse(&args.u2)?),
            (parse(&args.v1)?, parse(&args.v2)?),
            None,
        )
    };
    let caps = ConjugatorCaps {
        search_radius: args.search_radius,
        exponent_cap: args.exponent_cap,
        order_cutoff: args.order_cutoff,
        root_radius: 3,
        root_exponent_cap: args.order_cutoff,
        quotient_budget: args.quotient_budget,
    };
    let outcome = construct_p_conjugator(&sys, (&u.0, &u.1), (&v.0, &v.1), &caps)?;
    let render = |w: &Word| p.alphabet().format_word(w);
    let mut body = json!({
        "u": [render(&u.0), render(&u.1)],
        "v": [render(&v.0), render(&v.1)],
    });
    if let Some(info) = instance_json {
        body["hard_instance"] = info;
    }
    let code = match outcome {
        ConjugatorOutcome::Certificate(cert) => {
            body["outcome"] = json!("certificate");
            body["zeta"] = json!(sys.pair_alphabet().format_word(cert.zeta.word()));
            body["zeta_length"] = json!(cert.zeta.len());
            body["zeta_coords"] =
                json!([render(&cert.zeta_coords.0), render(&cert.zeta_coords.1)]);
            body["stages"] = json!({
                "route": cert.stages.route,
                "gamma": render(&cert.stages.gamma),
                "roots": [render(&cert.stages.y1), render(&cert.stages.y2)],
                "exponents": { "e1": cert.stages.e1, "e2": cert.stages.e2,
                                "q1": cert.stages.q1, "q2": cert.stages.q2,
                                "p": cert.stages.p, "r2": cert.stages.r2,
                                "p_prime": cert.stages.p_prime,
                                "p_final": cert.stages.p_final },
                "omega": cert.stages.omega,
            });
            0
        }
        ConjugatorOutcome::NotConjugate => {
            body["outcome"] = json!("not_conjugate");
            0
        }
        ConjugatorOutcome::Exhausted { stage } => {
            body["outcome"] = json!("exhausted");
            body["stage"] = json!(stage);
            3
        }
    };
    print_json(&body);
    Ok(code)
}

// ---------------------------------------------------------------------------
// rips / dagger
// ---------------------------------------------------------------------------

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}.json", path.display()))
}

fn cmd_rips(args: RipsArgs) -> Result<u8> {
    let q = load_presentation(&args.input)?;
    let out = rips(&q, args.tails)?;
    fs::write(&args.out, out.presentation.serialize())
        .with_context(|| format!("writing {}", args.out.display()))?;
    let cert_path = sidecar(&args.out, "cert");
    let cert = serde_json::to_string_pretty(&out.certificate)?;
    fs::write(&cert_path, format!("{cert}\n"))
        .with_context(|| format!("writing {}", cert_path.display()))?;
    println!(
        "compiled cover: {} generators, {} relators, cancellation ratio {}/{}",
        out.presentation.alphabet().len(),
        out.presentation.relators().len(),
        out.certificate.cancellation_ratio.0,
        out.certificate.cancellation_ratio.1
    );
    println!("wrote {}", args.out.display());
    println!("wrote {}", cert_path.display());
    Ok(0)
}

fn cmd_dagger(args: DaggerArgs) -> Result<u8> {
    let q = load_presentation(&args.input)?;
    let out = dagger(&q, args.tails)?;
    fs::write(&args.out, out.presentation.serialize())
        .with_context(|| format!("writing {}", args.out.display()))?;
    let prov_path = sidecar(&args.out, "provenance");
    let prov = serde_json::to_string_pretty(&out.provenance)?;
    fs::write(&prov_path, format!("{prov}\n"))
        .with_context(|| format!("writing {}", prov_path.display()))?;
    println!(
        "composite: {} generators, {} relators, stable letter {}",
        out.presentation.alphabet().len(),
        out.presentation.relators().len(),
        out.stable_letter
    );
    println!("wrote {}", args.out.display());
    println!("wrote {}", prov_path.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn cmd_run(args: RunArgs) -> Result<u8> {
    let (report, files, code) = run_experiment(&args.config)?;
    for log in &report.logs {
        println!("# {log}");
    }
    for table in &report.tables {
        let exact = table
            .samples
            .iter()
            .filter(|s| s.exactness == Exactness::Exact)
            .count();
        println!(
            "table {}: {} samples, {} exact",
            table.name.as_str(),
            table.samples.len(),
            exact
        );
    }
    for audit in &report.audits {
        println!(
            "audit {}: {} pass, {} fail, {} unknown",
            audit.id, audit.passed, audit.failed, audit.unknown
        );
    }
    println!("wrote {} files", files.len());
    Ok(code as u8)
}
