use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rqrao::graph::{generate, read_rudy, to_rudy, GeneratorSpec, Graph, GraphJson};
use rqrao::oracle::suite::{run_suite, SuiteConfig};
use rqrao::rng::derive_seed;
use rqrao::solver::{
    brute_force_solve, qrao_solve, rank_two_solve, rqaoa_solve, rqrao_solve, Algorithm, QraoParams, Rank2Params,
    RqaoaParams, RqraoParams, SolveReport,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "rqrao", version, about = "MAX-CUT by recursive quantum random access optimization")]
struct Cli {
    /// Worker threads for trial and brute-force parallelism.
    #[arg(long, global = true, env = "RQRAO_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one graph, optionally several times with derived seeds.
    Solve(SolveArgs),
    /// Run the identity and oracle suites.
    Verify(VerifyArgs),
    /// Sweep generated graphs over sizes and algorithms, emitting CSV.
    Bench(BenchArgs),
    /// Generate a graph and write it as rudy text or JSON.
    Gen(GenArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Algo {
    Rqrao,
    Qrao,
    Rqaoa,
    Rank2,
    Brute,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Algorithm {
        match a {
            Algo::Rqrao => Algorithm::Rqrao,
            Algo::Qrao => Algorithm::Qrao,
            Algo::Rqaoa => Algorithm::Rqaoa,
            Algo::Rank2 => Algorithm::Rank2,
            Algo::Brute => Algorithm::Brute,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct InputArgs {
    /// Graph in rudy format.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    graph: Option<PathBuf>,
    /// Generator spec as JSON, e.g. '{"kind":"3regular","n":100,"seed":1}'.
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ParamArgs {
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Trials per round.
    #[arg(long, default_value_t = 20)]
    ensemble: usize,
    /// Shrinkage factor of the ensemble energy.
    #[arg(long, default_value_t = 2.0)]
    scale: f64,
    /// MPS bond dimension.
    #[arg(long, default_value_t = 2)]
    chi: usize,
    /// Remaining node count at which exhaustive search takes over.
    #[arg(long, default_value_t = 10)]
    bf_threshold: usize,
    #[arg(long, default_value_t = 1e-5)]
    perturbation: f64,
    /// Restarts of the rank-two relaxation.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Algo::Rqrao)]
    algo: Algo,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-round telemetry CSV of the best run.
    #[arg(long)]
    telemetry: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Generator spec; its node count is replaced by each size.
    #[arg(long)]
    gen: String,
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Graphs per size.
    #[arg(long, default_value_t = 10)]
    graphs: usize,
    #[arg(long = "algo", value_enum, value_delimiter = ',', default_values_t = [Algo::Rqrao, Algo::Rank2])]
    algos: Vec<Algo>,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GraphFormat {
    Rudy,
    Json,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, value_enum, default_value_t = GraphFormat::Rudy)]
    format: GraphFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_spec(text: &str) -> Result<GeneratorSpec> {
    serde_json::from_str(text).with_context(|| format!("invalid generator spec {text}"))
}

fn load_graph(input: &InputArgs) -> Result<Graph> {
    match (&input.graph, &input.gen) {
        (Some(path), None) => read_rudy(path).with_context(|| format!("reading {}", path.display())),
        (None, Some(spec)) => Ok(generate(&parse_spec(spec)?)?),
        _ => bail!("give exactly one of --graph or --gen"),
    }
}

fn run_algorithm(algo: Algo, g: &Graph, p: &ParamArgs, seed: u64) -> rqrao::Result<SolveReport> {
    match algo {
        Algo::Rqrao => rqrao_solve(
            g,
            &RqraoParams {
                m: p.m,
                ensemble: p.ensemble,
                scale: p.scale,
                chi: p.chi,
                bf_threshold: p.bf_threshold,
                perturbation: p.perturbation,
                seed,
                ..Default::default()
            },
        ),
        Algo::Qrao => qrao_solve(
            g,
            &QraoParams {
                m: p.m,
                chi: p.chi,
                seed,
                ..Default::default()
            },
        ),
        Algo::Rqaoa => rqaoa_solve(
            g,
            &RqaoaParams {
                bf_threshold: p.bf_threshold,
                seed,
                ..Default::default()
            },
        ),
        Algo::Rank2 => rank_two_solve(
            g,
            &Rank2Params {
                restarts: p.restarts,
                seed,
                ..Default::default()
            },
        ),
        Algo::Brute => brute_force_solve(g),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ResolvedSolve<'a> {
    command: &'static str,
    input: &'a InputArgs,
    algorithm: Algo,
    params: &'a ParamArgs,
    repeat: usize,
    seed: u64,
    num_nodes: usize,
    num_edges: usize,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    config: ResolvedSolve<'a>,
    runs: Vec<SolveReport>,
    best_run: usize,
    best_weight: f64,
}

fn usage_error(e: rqrao::Error) -> anyhow::Error {
    match e {
        rqrao::Error::InvalidParameter(msg) => anyhow::anyhow!(UsageError(msg)),
        other => other.into(),
    }
}

/// Bad parameter values; reported with a pointer to the usage text.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    if args.repeat == 0 {
        return Err(UsageError("--repeat must be at least 1".into()).into());
    }
    let g = load_graph(&args.input)?;
    let mut runs = Vec::with_capacity(args.repeat);
    for r in 0..args.repeat {
        let seed = derive_seed(args.seed, &[r as u64]);
        let report = run_algorithm(args.algo, &g, &args.params, seed).map_err(usage_error)?;
        let check = g.cut_weight(&report.bits)?;
        if check != report.weight {
            bail!("run {r}: reported weight {} differs from recomputed {check}", report.weight);
        }
        log::info!("run {r}: weight {}", report.weight);
        runs.push(report);
    }
    let best_run = (0..runs.len())
        .max_by(|&a, &b| runs[a].weight.total_cmp(&runs[b].weight).then(b.cmp(&a)))
        .unwrap();
    let best_weight = runs[best_run].weight;
    if let Some(path) = &args.telemetry {
        write_output(Some(path), &runs[best_run].telemetry_csv())?;
    }
    let out = SolveOutput {
        config: ResolvedSolve {
            command: "solve",
            input: &args.input,
            algorithm: args.algo,
            params: &args.params,
            repeat: args.repeat,
            seed: args.seed,
            num_nodes: g.num_nodes(),
            num_edges: g.num_edges(),
        },
        runs,
        best_run,
        best_weight,
    };
    if let Some(path) = &args.out {
        write_output(Some(path), &(serde_json::to_string_pretty(&out)? + "\n"))?;
    }
    println!("{best_weight}");
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let report = run_suite(&SuiteConfig {
        instances: args.instances,
        seed: args.seed,
    })?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    write_output(args.out.as_deref(), &text)?;
    for r in report.failing() {
        let m = r.m.map_or(String::new(), |m| format!(" (m={m})"));
        eprintln!("FAIL {}{m}: max gap {:.3e} >= {:.0e}", r.name, r.max_gap, r.tolerance);
    }
    Ok(report.passed)
}

/// Least-squares slope of `ln y` against `ln x`.
fn power_law_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn set_size(spec: GeneratorSpec, size: usize) -> GeneratorSpec {
    match spec {
        GeneratorSpec::Random { density, weights, seed, .. } => GeneratorSpec::Random {
            n: size,
            density,
            weights,
            seed,
        },
        GeneratorSpec::ThreeRegular { weights, seed, .. } => GeneratorSpec::ThreeRegular { n: size, weights, seed },
        GeneratorSpec::ToricPlusHub { weights, seed, .. } => GeneratorSpec::ToricPlusHub { g: size, weights, seed },
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let base = parse_spec(&args.gen)?;
    let mut csv = String::from("algorithm,n,graph,cut,relative_cut,seconds\n");
    let mut timings: Vec<(Algo, f64, f64)> = Vec::new();
    for &n in &args.sizes {
        for gi in 0..args.graphs {
            let spec = set_size(base.clone(), n).with_seed(derive_seed(args.seed, &[n as u64, gi as u64]));
            let g = match generate(&spec) {
                Ok(g) => g,
                Err(e) => {
                    log::warn!("n={n} graph {gi}: {e}");
                    for a in &args.algos {
                        writeln!(csv, "{},{n},{gi},NA,NA,NA", Algorithm::from(*a))?;
                    }
                    continue;
                }
            };
            let run_seed = derive_seed(args.seed, &[n as u64, gi as u64, 1]);
            let baseline = run_algorithm(Algo::Rank2, &g, &args.params, run_seed).map(|r| r.weight);
            for &a in &args.algos {
                let start = Instant::now();
                match run_algorithm(a, &g, &args.params, run_seed) {
                    Ok(r) => {
                        let secs = start.elapsed().as_secs_f64();
                        let rel = match &baseline {
                            Ok(b) if *b != 0.0 => format!("{}", r.weight / b),
                            _ => "NA".into(),
                        };
                        writeln!(csv, "{},{n},{gi},{},{rel},{secs:.6}", Algorithm::from(a), r.weight)?;
                        timings.push((a, n as f64, secs));
                    }
                    Err(e) => {
                        log::warn!("{} on n={n} graph {gi}: {e}", Algorithm::from(a));
                        writeln!(csv, "{},{n},{gi},NA,NA,NA", Algorithm::from(a))?;
                    }
                }
            }
        }
    }
    write_output(args.out.as_deref(), &csv)?;
    for &a in &args.algos {
        let mut by_size: Vec<(f64, f64)> = Vec::new();
        for &n in &args.sizes {
            let t: Vec<f64> = timings
                .iter()
                .filter(|x| x.0 == a && x.1 == n as f64)
                .map(|x| x.2)
                .collect();
            if !t.is_empty() {
                by_size.push((n as f64, t.iter().sum::<f64>() / t.len() as f64));
            }
        }
        match power_law_exponent(&by_size) {
            Some(beta) => eprintln!("fit {} time exponent {beta:.3}", Algorithm::from(a)),
            None => eprintln!("fit {} time exponent NA", Algorithm::from(a)),
        }
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let g = generate(&parse_spec(&args.gen)?)?;
    let text = match args.format {
        GraphFormat::Rudy => to_rudy(&g),
        GraphFormat::Json => serde_json::to_string_pretty(&GraphJson::from(&g))? + "\n",
    };
    write_output(args.out.as_deref(), &text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Gen(a) => cmd_gen(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}\n\nSee `rqrao --help` for usage.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
