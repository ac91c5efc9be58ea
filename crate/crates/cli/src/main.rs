mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use bmatch_core::audit;
use bmatch_core::exact::{exact_bmatching, ExactError, ExactResult};
use bmatch_core::instance::{
    attach_random_coverage, attach_random_cut, attach_random_graphic, attach_random_partition, generate_random,
    read_instance, MatroidSpec,
};
use bmatch_core::objectives::LinearObjective;
use bmatch_core::streaming::default_p;
use bmatch_core::{
    approximation_bound, run_with, Instance, Matroid, Objective, PipelineError, PipelineOutput, StreamError,
    StreamParams, Variant,
};

use report::{summarize, within, ExactReport, MonteCarloReport, ParamsReport, RunReport};

#[derive(Parser)]
#[command(name = "bmatch", version, about = "Semi-streaming b-matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream an instance and print the run report.
    Run(RunArgs),
    /// Run, compare against the exact optimum and audit the result.
    Verify(RunArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Repeat a run over independent seeds and aggregate the values.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args, Clone)]
struct AlgArgs {
    /// Algorithm variant.
    #[arg(long, default_value = "weighted")]
    alg: Variant,
    /// Threshold slack; defaults to the variant's tuned value.
    #[arg(long)]
    eps: Option<f64>,
    /// Matroid threshold multiplier.
    #[arg(long)]
    gamma: Option<f64>,
    /// Storage probability; defaults to the lower end of the admissible range.
    #[arg(long)]
    p: Option<f64>,
    /// 1 enables eviction of deep queue elements.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    d: Option<u8>,
    /// Instance file.
    instance: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    alg: AlgArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also compute the exact optimum.
    #[arg(long)]
    verify: bool,
    /// Also write the report to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MonteCarloArgs {
    #[command(flatten)]
    alg: AlgArgs,
    #[arg(long, default_value_t = 100)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// Compare the mean against the exact optimum.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveKind {
    Linear,
    Coverage,
    Cut,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatroidKind {
    None,
    Uniform,
    Partition,
    Graphic,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 12)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    b_max: usize,
    #[arg(long, default_value_t = 20)]
    w_max: u64,
    #[arg(long, value_enum, default_value = "linear")]
    objective: ObjectiveKind,
    /// Number of coverage items.
    #[arg(long, default_value_t = 10)]
    items: usize,
    /// Pair density of the cut objective.
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, value_enum, default_value = "none")]
    matroid: MatroidKind,
    /// Rank, number of parts or auxiliary vertices, by matroid kind.
    #[arg(long, default_value_t = 3)]
    matroid_size: usize,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

const EXIT_CHECK: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PARAMS: u8 = 3;
const EXIT_GUARD: u8 = 4;

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Instance(e) => Failure::new(EXIT_PARSE, e.to_string()),
            PipelineError::Stream(e) => Failure::new(EXIT_PARAMS, e.to_string()),
            PipelineError::Greedy(e) => Failure::new(EXIT_CHECK, e.to_string()),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::TooLarge { .. } => Failure::new(EXIT_GUARD, e.to_string()),
            other => Failure::new(EXIT_CHECK, other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let file = File::open(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    read_instance(file).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

/// Oracles and parameters for one configured run.
struct Setup {
    inst: Instance,
    variant: Variant,
    params: StreamParams,
    objective: Box<dyn Objective>,
    matroid: Option<Box<dyn Matroid>>,
}

impl Setup {
    fn new(args: &AlgArgs, seed: u64) -> Result<Self, Failure> {
        let inst = load(&args.instance)?;
        let mut variant = args.alg;
        if args.d == Some(1) && variant == Variant::Weighted {
            variant = Variant::WeightedMem;
        }
        if args.d == Some(0) && variant == Variant::WeightedMem {
            return Err(Failure::new(EXIT_PARAMS, "weighted-mem always evicts; drop --d 0"));
        }
        let mut params = StreamParams::defaults_for(variant, inst.k);
        params.seed = seed;
        params.record_trace = true;
        if let Some(eps) = args.eps {
            params.epsilon = eps;
        }
        if let Some(gamma) = args.gamma {
            params.gamma = gamma;
        }
        if let Some(d) = args.d {
            params.evict = d == 1;
        }
        params.p = args.p.unwrap_or_else(|| default_p(variant, inst.k, params.epsilon, params.gamma));
        params.validate(variant, inst.k).map_err(|e| Failure::new(EXIT_PARAMS, e.to_string()))?;

        let objective: Box<dyn Objective> = if variant.is_weighted() {
            Box::new(LinearObjective::new(inst.weights()))
        } else {
            inst.objective().map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?
        };
        let matroid = if variant.uses_matroid() {
            let m = inst.matroid().map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
            Some(m.ok_or_else(|| Failure::new(EXIT_PARAMS, StreamError::MissingMatroid.to_string()))?)
        } else {
            None
        };
        Ok(Self { inst, variant, params, objective, matroid })
    }

    fn with_seed(&self, seed: u64) -> StreamParams {
        StreamParams { seed, ..self.params }
    }

    fn run(&self, params: StreamParams) -> Result<PipelineOutput, Failure> {
        Ok(run_with(&self.inst, self.variant, self.objective.as_ref(), self.matroid.as_deref(), params)?)
    }

    fn exact(&self) -> Result<ExactResult, Failure> {
        Ok(exact_bmatching(&self.inst, self.objective.as_ref(), self.matroid.as_deref())?)
    }

    fn bound(&self) -> Option<f64> {
        approximation_bound(self.variant, self.inst.k, &self.params).filter(|b| b.is_finite())
    }

    /// Invariants that hold for every finished run.
    fn audit(&self, out: &PipelineOutput) -> Result<(), Failure> {
        let st = &out.state;
        audit::check_queue_structure(&st.ledger)
            .and_then(|_| audit::check_trace(st))
            .and_then(|_| audit::check_matching(&self.inst, st, &out.matching, self.matroid.as_deref()))
            .and_then(|_| audit::check_value_covers_gain(st, &out.matching, self.objective.as_ref()))
            .map_err(|v| Failure::new(EXIT_CHECK, format!("audit failed: {v}")))
    }
}

fn emit<T: Serialize>(report: &T, json: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Failure::new(EXIT_CHECK, e.to_string()))?;
    if let Some(path) = json {
        std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::new(EXIT_CHECK, format!("{}: {e}", path.display())))?;
    }
    println!("{text}");
    Ok(())
}

fn run(args: &RunArgs, verify: bool) -> Result<(), Failure> {
    let start = Instant::now();
    let setup = Setup::new(&args.alg, args.seed)?;
    let out = setup.run(setup.params)?;
    let mut report = RunReport::new(setup.variant, &setup.params, setup.inst.m(), &out, setup.bound());
    let exact = if verify || args.verify { Some(setup.exact()?) } else { None };
    if let Some(exact) = &exact {
        report.attach_exact(exact);
    }
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    emit(&report, args.json.as_deref())?;
    if verify {
        setup.audit(&out)?;
        if report.within_bound == Some(false) {
            return Err(Failure::new(EXIT_CHECK, "value is outside the guaranteed ratio"));
        }
    }
    Ok(())
}

fn montecarlo(args: &MonteCarloArgs) -> Result<(), Failure> {
    if args.replicas == 0 {
        return Err(Failure::new(EXIT_PARAMS, "need at least one replica"));
    }
    let start = Instant::now();
    let setup = Setup::new(&args.alg, args.base_seed)?;
    let values: Vec<f64> = (0..args.replicas)
        .into_par_iter()
        .map(|i| {
            let params = StreamParams { record_trace: false, ..setup.with_seed(args.base_seed.wrapping_add(i as u64)) };
            setup.run(params).map(|out| out.matching.value)
        })
        .collect::<Result<_, _>>()?;
    let summary = summarize(&values);
    let bound = setup.bound();
    let exact = if args.verify { Some(setup.exact()?) } else { None };
    let bound_times_mean = bound.map(|b| b * summary.mean);
    let report = MonteCarloReport {
        algorithm: setup.variant.name().into(),
        params: ParamsReport::new(setup.variant, &setup.params),
        base_seed: args.base_seed,
        replicas: args.replicas,
        mean: summary.mean,
        min: summary.min,
        max: summary.max,
        std_dev: summary.std_dev,
        bound,
        bound_times_mean,
        mean_within_bound: exact.as_ref().zip(bound_times_mean).map(|(x, bm)| within(bm, x.optimum_value)),
        exact: exact.as_ref().map(ExactReport::from),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    emit(&report, args.json.as_deref())
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let params = |e: bmatch_core::InstanceError| Failure::new(EXIT_PARAMS, e.to_string());
    let mut inst = generate_random(args.seed, args.n, args.m, args.k, args.b_max, args.w_max).map_err(params)?;
    match args.objective {
        ObjectiveKind::Linear => {}
        ObjectiveKind::Coverage => attach_random_coverage(&mut inst, args.seed, args.items, 4, 10).map_err(params)?,
        ObjectiveKind::Cut => attach_random_cut(&mut inst, args.seed, args.density, 10).map_err(params)?,
    }
    match args.matroid {
        MatroidKind::None => {}
        MatroidKind::Uniform => inst.matroid = Some(MatroidSpec::Uniform { rank: args.matroid_size }),
        MatroidKind::Partition => {
            attach_random_partition(&mut inst, args.seed, args.matroid_size, 2).map_err(params)?
        }
        MatroidKind::Graphic => attach_random_graphic(&mut inst, args.seed, args.matroid_size).map_err(params)?,
    }
    let text = inst.to_string();
    match &args.output {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
    .map_err(|e| Failure::new(EXIT_CHECK, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args, false),
        Command::Verify(args) => run(args, true),
        Command::Generate(args) => generate(args),
        Command::Montecarlo(args) => montecarlo(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bmatch: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
