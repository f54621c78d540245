//! `surfpack` command-line front end.

mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use surfpack::milp::{check_model_counts, export_milp, Encoding, ExportOptions, ObjectiveMode};
use surfpack::policy::{train, Checkpoint, TrainerConfig};
use surfpack::{
    exhaustive_optimal_sequence, generate_instances, pack_heuristic, pack_sequence, run_benchmark,
    BenchmarkConfig, BinExtents, Instance, Method, DEFAULT_ORACLE_LIMIT,
};

use files::{read_instances, write_output, SolutionFile};

#[derive(Parser)]
#[command(name = "surfpack", version, about = "Surface-area-minimizing 3D bin packing toolkit")]
struct Cli {
    /// Log verbosity: -v for info, -vv for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances as JSON.
    Gen(GenArgs),
    /// Pack instances with the heuristic or a given sequence.
    Pack(PackArgs),
    /// Train a sequence policy and write a checkpoint.
    Train(TrainArgs),
    /// Compare methods on a set of instances.
    Eval(EvalArgs),
    /// Write the mixed-integer model of an instance in LP format.
    ExportMilp(ExportArgs),
    /// Find the best packing order by enumerating all of them.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Items per instance.
    #[arg(long, short = 'n', default_value_t = 8)]
    items: usize,
    #[arg(long, default_value_t = 1)]
    min: i64,
    #[arg(long, default_value_t = 10)]
    max: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PackArgs {
    /// Instance JSON: one instance or an array.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pack in this order instead of running the heuristic, e.g. `2,0,1`.
    #[arg(long, value_delimiter = ',')]
    sequence: Option<Vec<usize>>,
}

#[derive(Args)]
struct TrainArgs {
    /// Trainer config JSON; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training instances; generated from the seed when omitted.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Instances to generate when no input is given.
    #[arg(long, default_value_t = 2000)]
    train_count: usize,
    /// Items per generated instance.
    #[arg(long, default_value_t = 6)]
    items: usize,
    #[arg(long)]
    out: PathBuf,
    /// Training log CSV.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Instances to evaluate; required unless `--preset` is given.
    #[arg(long = "in", required_unless_present = "preset")]
    input: Option<PathBuf>,
    /// Generate the standard set instead: n in {8, 10, 12}, `--preset-count` each.
    #[arg(long, value_parser = ["standard"], conflicts_with = "input")]
    preset: Option<String>,
    #[arg(long, default_value_t = 100)]
    preset_count: usize,
    #[arg(long, value_delimiter = ',', default_value = "random,heuristic")]
    methods: Vec<String>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    random_draws: usize,
    #[arg(long, default_value_t = 1)]
    policy_samples: usize,
    #[arg(long, default_value_t = 3)]
    beam_width: usize,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall time per evaluation (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Benchmark CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "disjunctive", value_parser = ["disjunctive", "literal"])]
    encoding: String,
    /// Pin the extents `L,W,H` and emit a feasibility model.
    #[arg(long, value_parser = parse_extents)]
    fixed_extents: Option<BinExtents>,
    /// Big-M constants `L,W,H`; defaults to the working bin.
    #[arg(long, value_parser = parse_extents)]
    big_m: Option<BinExtents>,
    /// Print the structure count report to stderr.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    limit: usize,
}

fn parse_extents(s: &str) -> Result<BinExtents, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [l, w, h] => BinExtents::new(*l, *w, *h).map_err(|e| e.to_string()),
        _ => Err("expected L,W,H".into()),
    }
}

fn one_instance(path: &Path) -> Result<Instance> {
    let mut all = read_instances(path)?;
    if all.len() != 1 {
        bail!("{} holds {} instances, expected one", path.display(), all.len());
    }
    Ok(all.remove(0))
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let instances = generate_instances(a.count, a.items, a.min..=a.max, a.seed)?;
    write_output(a.out.as_ref(), &(serde_json::to_string_pretty(&instances)? + "\n"))
}

fn cmd_pack(a: PackArgs) -> Result<()> {
    let instances = read_instances(&a.input)?;
    let mut files = Vec::with_capacity(instances.len());
    for inst in &instances {
        let solution = match &a.sequence {
            Some(seq) => pack_sequence(inst, seq),
            None => pack_heuristic(inst),
        }
        .with_context(|| format!("packing {}", inst.id))?;
        files.push(SolutionFile::new(inst, solution)?);
    }
    let failed: Vec<&str> = files
        .iter()
        .filter(|f| f.verdict != "PASS")
        .map(|f| f.solution.instance_id.as_str())
        .collect();
    let text = if files.len() == 1 {
        serde_json::to_string_pretty(&files[0])?
    } else {
        serde_json::to_string_pretty(&files)?
    };
    write_output(a.out.as_ref(), &(text + "\n"))?;
    if !failed.is_empty() {
        bail!("validation FAIL for {}", failed.join(", "));
    }
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut config: TrainerConfig = match &a.config {
        Some(p) => serde_json::from_str(&files::read_text(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => TrainerConfig::default(),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(steps) = a.steps {
        config.steps = steps;
    }
    let data = match &a.input {
        Some(p) => read_instances(p)?,
        None => generate_instances(a.train_count, a.items, 1..=10, config.seed)?,
    };
    log::info!("training on {} instances for {} steps", data.len(), config.steps);
    let outcome = train(&config, &data)?;
    let checkpoint = Checkpoint::from_outcome(&config, &outcome);
    write_output(Some(&a.out), &(checkpoint.to_json() + "\n"))?;
    if let Some(p) = &a.log {
        write_output(Some(p), &outcome.log.to_csv())?;
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let instances = match (&a.input, &a.preset) {
        (Some(p), _) => read_instances(p)?,
        (None, _) => {
            let mut all = Vec::new();
            for n in [8, 10, 12] {
                all.extend(generate_instances(a.preset_count, n, 1..=10, a.seed)?);
            }
            all
        }
    };
    let methods = a
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<Vec<_>, _>>()?;
    let policy = match &a.checkpoint {
        Some(p) => Some(Checkpoint::from_json(&files::read_text(p)?)?.policy()?),
        None => None,
    };
    let config = BenchmarkConfig {
        seed: a.seed,
        random_draws: a.random_draws,
        policy_samples: a.policy_samples,
        beam_width: a.beam_width,
        oracle_limit: a.oracle_limit,
        policy,
        threads: a.threads,
        record_timing: a.timing,
    };
    let report = run_benchmark(&instances, &methods, &config)?;
    print!("{}", report.to_table());
    if let Some(p) = &a.csv {
        write_output(Some(p), &report.to_csv())?;
    }
    if let Some(p) = &a.json {
        write_output(Some(p), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(())
}

fn cmd_export(a: ExportArgs) -> Result<()> {
    let inst = one_instance(&a.input)?;
    let options = ExportOptions {
        big_m: a.big_m,
        objective: match a.fixed_extents {
            Some(e) => ObjectiveMode::FixedExtents(e),
            None => ObjectiveMode::Quadratic,
        },
        encoding: a.encoding.parse::<Encoding>().map_err(anyhow::Error::msg)?,
    };
    let model = export_milp(&inst, &options)?;
    if a.check {
        let report = check_model_counts(&model, inst.len());
        eprint!("{report}");
        if !report.is_pass() {
            bail!("model structure check FAIL");
        }
    }
    write_output(a.out.as_ref(), &model.to_lp())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let inst = one_instance(&a.input)?;
    let (_, solution) = exhaustive_optimal_sequence(&inst, a.limit)?;
    let file = SolutionFile::new(&inst, solution)?;
    write_output(a.out.as_ref(), &(serde_json::to_string_pretty(&file)? + "\n"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Pack(a) => cmd_pack(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::ExportMilp(a) => cmd_export(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
