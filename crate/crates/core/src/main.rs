use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use collision_sim::harness::{
    self, fit_scaling_exponent, group_by, optimal_k_report, read_csv, tradeoff_check, write_csv,
    Algorithm, ExperimentRecord, SweepConfig,
};

const EXIT_INVALID_CONFIG: u8 = 1;
const EXIT_ANALYSIS_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "collision-sim", version, about = "Seeded sweeps of quantum collision and claw finding in the oracle model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials at a single domain size.
    Run(RunArgs),
    /// Run trials over a grid of domain sizes and table sizes.
    Sweep(SweepArgs),
    /// Summarize a CSV produced by `run` or `sweep`.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KPolicyArg {
    CubeRoot,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    algo: Algorithm,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Birthday constant c (birthday baseline only).
    #[arg(long, default_value_t = collision_sim::baseline::DEFAULT_BIRTHDAY_CONSTANT)]
    c: f64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "k_policy")]
    k: Option<usize>,
    #[arg(long, value_enum)]
    k_policy: Option<KPolicyArg>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', required = true)]
    n_grid: Vec<usize>,
    /// Table sizes; defaults to the cube-root policy at each N.
    #[arg(long, value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Scaling,
    Tradeoff,
    OptimalK,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(value_enum)]
    kind: Analysis,
    #[arg(long = "in")]
    input: PathBuf,
}

fn config_from(common: &Common, n_grid: Vec<usize>, k_grid: Option<Vec<usize>>) -> SweepConfig {
    let mut config = SweepConfig::new(common.algo, n_grid, common.r, common.trials, common.seed);
    config.birthday_c = common.c;
    if let Some(ks) = k_grid {
        config = config.with_k_grid(ks);
    }
    config
}

fn execute(config: &SweepConfig, out: &PathBuf) -> Result<(), (u8, String)> {
    let records = harness::run_trials(config).map_err(|e| (EXIT_INVALID_CONFIG, e.to_string()))?;
    let file = File::create(out).map_err(|e| (EXIT_INVALID_CONFIG, format!("{}: {e}", out.display())))?;
    write_csv(&records, BufWriter::new(file)).map_err(|e| (EXIT_INVALID_CONFIG, e.to_string()))?;
    let stats = group_by(&records, |r| (r.n, r.k));
    for ((n, k), s) in stats {
        println!(
            "N={n} k={k} trials={} success={:.3} mean_queries={:.2} se={:.2}",
            s.trials, s.success_rate, s.mean_total, s.std_err
        );
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<Vec<ExperimentRecord>, (u8, String)> {
    let file = File::open(path).map_err(|e| (EXIT_ANALYSIS_INPUT, format!("{}: {e}", path.display())))?;
    read_csv(BufReader::new(file)).map_err(|e| (EXIT_ANALYSIS_INPUT, e.to_string()))
}

fn analyze(args: &AnalyzeArgs) -> Result<(), (u8, String)> {
    let records = load(&args.input)?;
    let input_err = |e: harness::AnalysisError| (EXIT_ANALYSIS_INPUT, e.to_string());
    match args.kind {
        Analysis::Scaling => {
            let fit = fit_scaling_exponent(&records).map_err(input_err)?;
            for (n, stats) in group_by(&records, |r| r.n) {
                let cond = stats
                    .success_mean_total
                    .map_or("-".to_string(), |m| format!("{m:.2}"));
                println!(
                    "N={n} trials={} mean_queries={:.2} success_rate={:.3} success_mean={cond}",
                    stats.trials, stats.mean_total, stats.success_rate
                );
            }
            println!("slope={:.4} intercept={:.4}", fit.slope, fit.intercept);
        }
        Analysis::Tradeoff => {
            let rep = tradeoff_check(&records).map_err(input_err)?;
            println!("N={} r={} image_size={}", rep.n, rep.r, rep.image_size);
            for p in &rep.points {
                println!(
                    "k={} S={:.2} T={:.2} se={:.2} ST2/|F(X)|={:.3}{}",
                    p.k,
                    p.space,
                    p.time,
                    p.time_std_err,
                    p.ratio,
                    if p.violation { " VIOLATION" } else { "" }
                );
            }
            println!("min_ratio={:.3} violations={}", rep.min_ratio, rep.violations);
        }
        Analysis::OptimalK => {
            let rep = optimal_k_report(&records).map_err(input_err)?;
            println!(
                "argmin_k={} mean_queries={:.2} cube_root_target={:.2} ratio={:.3}",
                rep.k, rep.mean_total, rep.cube_root_target, rep.ratio
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => {
            let k_grid = args.k.map(|k| vec![k]);
            execute(&config_from(&args.common, vec![args.n], k_grid), &args.common.out)
        }
        Command::Sweep(args) => execute(
            &config_from(&args.common, args.n_grid.clone(), args.k_grid.clone()),
            &args.common.out,
        ),
        Command::Analyze(args) => analyze(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
