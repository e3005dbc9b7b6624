//! `headway-sim`: run, compare and render governed unicycle episodes, run
//! the property suites and lint scenario files.
//!
//! Exit codes: 0 success, 1 schema or input error, 2 reference path without
//! clearance, 3 episode did not converge, 4 collision, 5 property check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use headway_core::checks::{standard_suite, SuiteSize};
use headway_core::output::{
    comparison_table, read_trajectory_csv, summaries_toml, summary_toml, write_samples_csv, TrajectoryRow,
};
use headway_core::render::{render_scene, render_speed_profile, RenderSpec, Scene, TrajectoryLayer};
use headway_core::scenario::{load_scenario, Scenario, ScenarioError};
use headway_core::simulation::{EpisodeSummary, SimError};
use headway_core::{ControllerParams, EpisodeResult, PredictionMethod};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SCHEMA: u8 = 1;
const CLEARANCE: u8 = 2;
const NON_CONVERGENCE: u8 = 3;
const COLLISION: u8 = 4;
const CHECK_FAILED: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "headway-sim",
    version,
    about = "Adaptive headway path following with time-governed safety"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one episode and write its trajectory CSV, summary and SVG.
    Run(RunArgs),
    /// Run every method/epsilon combination and write comparison artifacts.
    Compare(CompareArgs),
    /// Render trajectory CSVs to SVG.
    Render(RenderArgs),
    /// Run the seeded property suites.
    Check(CheckArgs),
    /// Validate a scenario file and report its path clearance.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output directory.
    #[arg(long, env = "HEADWAY_SIM_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EpisodeArgs {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: PathBuf,
    /// Integration step (s), overriding the scenario.
    #[arg(long)]
    dt: Option<f64>,
    /// Time limit (s), overriding the scenario.
    #[arg(long = "max-time")]
    max_time: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    episode: EpisodeArgs,
    /// Prediction method: circle, triangle or forward-sim.
    #[arg(long)]
    method: Option<String>,
    /// Headway coefficient in (0, 1), overriding the scenario.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Times (s) at which prediction sets are drawn.
    #[arg(long = "snapshot", default_value = "0")]
    snapshots: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    episode: EpisodeArgs,
    /// Methods to compare (repeatable); all three by default.
    #[arg(long)]
    method: Vec<String>,
    /// Headway coefficients to sweep (repeatable); the scenario value by default.
    #[arg(long)]
    epsilon: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Trajectory CSV files (repeatable). The prediction method drawn at
    /// snapshots is taken from the file name.
    #[arg(long, required = true)]
    csv: Vec<PathBuf>,
    /// Scenario providing the environment, path and controller for the scene.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Prediction method for every trajectory, instead of the file names.
    #[arg(long)]
    method: Option<String>,
    /// Times (s) at which prediction sets are drawn.
    #[arg(long = "snapshot", default_value = "0")]
    snapshots: Vec<f64>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
    #[arg(long)]
    no_predictions: bool,
    #[arg(long)]
    no_speed_bars: bool,
    /// Also write a speed profile `speed.svg`.
    #[arg(long)]
    speed: bool,
    /// File name of the scene SVG inside the output directory.
    #[arg(long, default_value = "render.svg")]
    name: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Seed of the case generator.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Fraction of the full sample counts (10⁴ pointwise, 200 trajectories).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self::new(SCHEMA, error)
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = if matches!(e, ScenarioError::Clearance { .. }) {
            CLEARANCE
        } else {
            SCHEMA
        };
        Self::new(code, e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { SCHEMA } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::Render(a) => render(a),
        Command::Check(a) => check(a),
        Command::Validate(a) => validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load(args: &EpisodeArgs) -> Result<Scenario<f64>, Failure> {
    let mut s = load_scenario::<f64>(&args.scenario)?;
    if let Some(dt) = args.dt {
        s.sim = s.sim.with_step(dt).map_err(|e| anyhow!("--dt: {e}"))?;
    }
    if let Some(t) = args.max_time {
        s.sim = s.sim.with_max_time(t).map_err(|e| anyhow!("--max-time: {e}"))?;
    }
    Ok(s)
}

fn method(s: &Scenario<f64>, name: &str) -> Result<PredictionMethod, Failure> {
    Ok(s.method_named(name).map_err(|e| anyhow!("--method: {e}"))?)
}

fn controller(s: &Scenario<f64>, epsilon: f64) -> Result<ControllerParams, Failure> {
    Ok(s.controller
        .with_headway_coeff(epsilon)
        .map_err(|e| anyhow!("--epsilon: {e}"))?)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(())
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Base file name of an episode's artifacts, e.g. `triangle_eps0.5`.
fn episode_stem(summary: &EpisodeSummary) -> String {
    format!("{}_eps{}", summary.method, summary.headway_coeff)
}

fn write_csv(path: &Path, result: &EpisodeResult) -> Result<Vec<TrajectoryRow>, Failure> {
    let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    write_samples_csv(std::io::BufWriter::new(file), &result.samples)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(result.samples.iter().map(TrajectoryRow::from_sample).collect())
}

/// Splits an episode outcome into its result and the exit code it implies.
fn settle(outcome: Result<EpisodeResult, SimError<f64>>) -> Result<(EpisodeResult, u8), Failure> {
    let (result, mut code) = match outcome {
        Ok(r) => (r, 0),
        Err(SimError::NonConvergence { result, .. }) => (*result, NON_CONVERGENCE),
        Err(e @ SimError::Clearance { .. }) => return Err(Failure::new(CLEARANCE, e)),
    };
    if result.summary.collision {
        code = COLLISION;
    }
    Ok((result, code))
}

fn episode_failure(code: u8, summary: &EpisodeSummary) -> Failure {
    let what = if code == COLLISION {
        "collided"
    } else {
        "did not converge"
    };
    Failure::new(
        code,
        anyhow!(
            "{} episode with eps {} {what} (final goal error {:.3e} m, min margin {:.3e} m)",
            summary.method,
            summary.headway_coeff,
            summary.final_goal_error,
            summary.min_margin
        ),
    )
}

fn snapshot_spec(snapshots: &[f64]) -> RenderSpec {
    let mut spec = RenderSpec::default();
    spec.snapshot_times = snapshots.to_vec();
    spec
}

fn run(a: RunArgs) -> Outcome {
    let s = load(&a.episode)?;
    let m = match &a.method {
        Some(name) => method(&s, name)?,
        None => s.method,
    };
    let params = match a.epsilon {
        Some(e) => controller(&s, e)?,
        None => s.controller,
    };
    let (result, code) = settle(s.run_with(&m, &params))?;

    let dir = &a.out.out;
    create_dir(dir)?;
    let stem = episode_stem(&result.summary);
    let rows = write_csv(&dir.join(format!("{stem}.csv")), &result)?;
    write(
        &dir.join("summary.toml"),
        &summary_toml(&result.summary).context("cannot serialize summary")?,
    )?;
    let scene = Scene {
        environment: Some(&s.environment),
        path: Some(&s.path),
        params: Some(&params),
    };
    let layer = TrajectoryLayer {
        label: &stem,
        rows: &rows,
        method: Some(m),
    };
    let svg = render_scene(&scene, &[layer], &snapshot_spec(&a.snapshots)).context("cannot render")?;
    write(&dir.join(format!("{stem}.svg")), &svg)?;

    print!("{}", comparison_table(std::slice::from_ref(&result.summary)));
    if code != 0 {
        return Err(episode_failure(code, &result.summary));
    }
    Ok(())
}

fn compare(a: CompareArgs) -> Outcome {
    let s = load(&a.episode)?;
    let methods = if a.method.is_empty() {
        s.all_methods().to_vec()
    } else {
        a.method.iter().map(|n| method(&s, n)).collect::<Result<_, _>>()?
    };
    let epsilons = if a.epsilon.is_empty() {
        vec![s.controller.headway_coeff()]
    } else {
        a.epsilon.clone()
    };
    let params = epsilons
        .iter()
        .map(|&e| controller(&s, e))
        .collect::<Result<Vec<_>, _>>()?;

    let jobs: Vec<_> = params
        .iter()
        .flat_map(|p| methods.iter().map(move |m| (m, p)))
        .collect();
    let outcomes: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(m, p)| {
                let s = &s;
                scope.spawn(move || s.run_with(m, p))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("episode thread panicked"))
            .collect()
    });

    let dir = &a.out.out;
    create_dir(dir)?;
    let mut results = Vec::new();
    let mut worst: Option<(u8, EpisodeSummary)> = None;
    for outcome in outcomes {
        let (result, code) = settle(outcome)?;
        if code > worst.as_ref().map_or(0, |w| w.0) {
            worst = Some((code, result.summary.clone()));
        }
        results.push(result);
    }
    let mut rows = Vec::new();
    let mut stems = Vec::new();
    for r in &results {
        let stem = episode_stem(&r.summary);
        rows.push(write_csv(&dir.join(format!("{stem}.csv")), r)?);
        stems.push(stem);
    }
    let summaries: Vec<_> = results.iter().map(|r| r.summary.clone()).collect();
    write(
        &dir.join("summary.toml"),
        &summaries_toml(&summaries).context("cannot serialize summary")?,
    )?;
    let table = comparison_table(&summaries);
    write(&dir.join("table.txt"), &table)?;
    let layers: Vec<_> = stems
        .iter()
        .zip(&rows)
        .zip(&jobs)
        .map(|((stem, rows), (m, _))| TrajectoryLayer {
            label: stem,
            rows,
            method: Some(**m),
        })
        .collect();
    let spec = RenderSpec::default();
    write(
        &dir.join("speed.svg"),
        &render_speed_profile(&layers, &spec).context("cannot render speed profile")?,
    )?;
    let mut scene_spec = spec;
    scene_spec.layers.predictions = false;
    let scene = Scene {
        environment: Some(&s.environment),
        path: Some(&s.path),
        params: None,
    };
    write(
        &dir.join("trajectories.svg"),
        &render_scene(&scene, &layers, &scene_spec).context("cannot render trajectories")?,
    )?;

    print!("{table}");
    match worst {
        Some((code, summary)) => Err(episode_failure(code, &summary)),
        None => Ok(()),
    }
}

/// Method named by a CSV file stem such as `forward-sim_eps0.5`.
fn method_from_stem(s: Option<&Scenario<f64>>, stem: &str) -> Option<PredictionMethod> {
    let name = ["forward-sim", "triangle", "circle"]
        .into_iter()
        .find(|n| stem.contains(n))?;
    match s {
        Some(s) => s.method_named(name).ok(),
        None => name.parse().ok(),
    }
}

/// Headway coefficient named by a CSV file stem such as `triangle_eps0.75`.
fn epsilon_from_stem(stem: &str) -> Option<f64> {
    stem.rsplit_once("_eps")?.1.parse().ok()
}

fn render(a: RenderArgs) -> Outcome {
    let scenario = a.scenario.as_ref().map(load_scenario::<f64>).transpose()?;
    let fixed = match (&a.method, &scenario) {
        (Some(name), Some(s)) => Some(method(s, name)?),
        (Some(name), None) => Some(name.parse().map_err(|e| anyhow!("--method: {e}"))?),
        (None, _) => None,
    };
    let mut tables = Vec::new();
    for path in &a.csv {
        let file = fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
        let rows = read_trajectory_csv(std::io::BufReader::new(file))
            .with_context(|| format!("malformed trajectory {}", path.display()))?;
        let stem = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        tables.push((stem, rows));
    }

    let mut spec = RenderSpec::new(a.width, a.height).context("invalid canvas")?;
    spec.snapshot_times = a.snapshots.clone();
    spec.layers.predictions = !a.no_predictions;
    spec.layers.speed_bars = !a.no_speed_bars;

    // predictions need the controller of the episode, so each layer gets its own parameters
    let params: Vec<Option<ControllerParams>> = tables
        .iter()
        .map(|(stem, _)| {
            let s = scenario.as_ref()?;
            Some(
                epsilon_from_stem(stem)
                    .and_then(|e| s.controller.with_headway_coeff(e).ok())
                    .unwrap_or(s.controller),
            )
        })
        .collect();
    let layers: Vec<_> = tables
        .iter()
        .map(|(stem, rows)| TrajectoryLayer {
            label: stem,
            rows,
            method: fixed.or_else(|| method_from_stem(scenario.as_ref(), stem)),
        })
        .collect();
    let uniform = params.windows(2).all(|w| w[0] == w[1]);
    let scene = Scene {
        environment: scenario.as_ref().map(|s| &s.environment),
        path: scenario.as_ref().map(|s| &s.path),
        params: if uniform {
            params.first().and_then(Option::as_ref)
        } else {
            None
        },
    };
    if !uniform {
        eprintln!("note: trajectories use different headway coefficients; prediction snapshots are omitted");
    }

    let svg = render_scene(&scene, &layers, &spec).context("cannot render")?;
    let speed = if a.speed {
        Some(render_speed_profile(&layers, &spec).context("cannot render speed profile")?)
    } else {
        None
    };
    create_dir(&a.out.out)?;
    write(&a.out.out.join(&a.name), &svg)?;
    if let Some(svg) = speed {
        write(&a.out.out.join("speed.svg"), &svg)?;
    }
    Ok(())
}

fn check(a: CheckArgs) -> Outcome {
    if !(a.scale > 0.0 && a.scale.is_finite()) {
        return Err(anyhow!("--scale must be positive, got {}", a.scale).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let reports = standard_suite(&mut rng, SuiteSize::scaled(a.scale));
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(Failure::new(
            CHECK_FAILED,
            anyhow!("{failed} of {} checks failed (seed {})", reports.len(), a.seed),
        ));
    }
    println!("all {} checks passed (seed {})", reports.len(), a.seed);
    Ok(())
}

fn validate(a: ValidateArgs) -> Outcome {
    let s = load_scenario::<f64>(&a.scenario)?;
    println!(
        "{}: ok ({} obstacles, path length {:.3} m, clearance {:.3} m, method {})",
        a.scenario.display(),
        s.environment.obstacles().len(),
        s.path.length(),
        s.clearance(),
        s.method
    );
    Ok(())
}
