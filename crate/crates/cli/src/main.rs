use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use f1champ_core::geometry::load_circuit_file;
use f1champ_core::sim::{calibrate_speed_scale, run_race};
use f1champ_core::strategy::{
    analyze_season, optimize_pit_plan, plan_strategy, run_tournament, Strategy, DEFAULT_PROBE,
};
use f1champ_core::{CarState, Circuit, RacePlan, Rules};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(
    name = "f1champ",
    version,
    about = "Formula 1 championship simulator, strategy optimizer and game server"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one race and report its stint times.
    Simulate(SimulateArgs),
    /// Find the speed scale that makes a plan finish in a reference time.
    Calibrate(CalibrateArgs),
    /// Plan a season of spending with one strategy.
    Optimize(OptimizeArgs),
    /// Play every strategy against each other over a season.
    Tournament(TournamentArgs),
    /// Host championships over HTTP.
    Serve(ServeArgs),
}

#[derive(Args)]
struct RulesArg {
    /// Rules file; the shipped 2019 season when omitted.
    #[arg(long)]
    rules: Option<PathBuf>,
}

impl RulesArg {
    fn load(&self) -> Result<Rules> {
        match &self.rules {
            Some(p) => Rules::load(p).with_context(|| format!("reading rules {}", p.display())),
            None => Ok(Rules::shipped()),
        }
    }
}

#[derive(Args)]
struct CircuitArgs {
    #[command(flatten)]
    rules: RulesArg,
    /// Race of the season to use, 1-based.
    #[arg(long, conflicts_with = "circuit")]
    race: Option<usize>,
    /// Circuit file to use instead of a race of the season.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

impl CircuitArgs {
    fn resolve(&self) -> Result<(Rules, Circuit)> {
        let rules = self.rules.load()?;
        let circuit = match (&self.circuit, self.race) {
            (Some(p), _) => load_circuit_file(p).with_context(|| format!("reading circuit {}", p.display()))?,
            (None, Some(r)) => match rules.venue(r) {
                Some(v) => v.circuit.clone(),
                None => bail!("race {r} is not on the calendar (1..={})", rules.num_races()),
            },
            (None, None) => bail!("give --race or --circuit"),
        };
        Ok((rules, circuit))
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Car file; the rules' base car when omitted.
    #[arg(long)]
    car: Option<PathBuf>,
    /// Race plan file; the fastest legal plan for the car when omitted.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Print the full result, lap trace included, as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Target race time in seconds; the venue's reference time with --race.
    #[arg(long)]
    reference_time: Option<f64>,
    /// Pit stops in the reference plan; the venue's with --race.
    #[arg(long)]
    stops: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Rlf,
    Clf,
    Cmlf,
    Hrlf,
    U,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    rules: RulesArg,
    #[arg(long, value_enum)]
    strategy: StrategyName,
    /// Seed for the unstructured player.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Spend used to probe each lever's effect, in USD.
    #[arg(long, default_value_t = DEFAULT_PROBE)]
    probe: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TournamentArgs {
    #[command(flatten)]
    rules: RulesArg,
    /// Seed for the unstructured player.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    #[arg(long, env = "F1CHAMP_DATA_DIR", default_value = "f1champ-data")]
    data_dir: PathBuf,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let (rules, circuit) = args.circuit.resolve()?;
    let config = rules.sim_config();
    let car: CarState = match &args.car {
        Some(p) => read_json(p)?,
        None => rules.base_car,
    };
    let plan: RacePlan = match &args.plan {
        Some(p) => read_json(p)?,
        None => optimize_pit_plan(&circuit, &car, &rules.limits, &config)?,
    };
    let result = run_race(&circuit, &car, &plan, &config)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&result)?);
        return Ok(());
    }
    println!(
        "{}: {} laps, {} stops",
        circuit.name,
        circuit.laps,
        plan.stints.len() - 1
    );
    for (i, (s, t)) in plan.stints.iter().zip(&result.stint_times).enumerate() {
        println!(
            "  stint {}: {:>3} laps on {:>6.2} kg  {:>9.3} s",
            i + 1,
            s.laps,
            s.fuel,
            t
        );
    }
    println!("total {:.3} s", result.total_time);
    Ok(())
}

fn calibrate(args: &CalibrateArgs) -> Result<()> {
    let (rules, circuit) = args.circuit.resolve()?;
    let venue = args.circuit.race.and_then(|r| rules.venue(r));
    let Some(reference) = args.reference_time.or(venue.map(|v| v.reference_time_s)) else {
        bail!("give --reference-time");
    };
    let Some(stops) = args.stops.or(venue.map(|v| v.reference_stops)) else {
        bail!("give --stops");
    };
    let plan = RacePlan::even(circuit.laps, stops, circuit.fuel_per_lap);
    let scale = calibrate_speed_scale(&circuit, &rules.base_car, reference, &plan, &rules.sim_config())?;
    println!("{scale}");
    Ok(())
}

fn optimize(args: &OptimizeArgs) -> Result<()> {
    let rules = args.rules.load()?;
    let strategy = match args.strategy {
        StrategyName::Rlf => Strategy::Rlf,
        StrategyName::Clf => Strategy::Clf,
        StrategyName::Cmlf => Strategy::Cmlf,
        StrategyName::Hrlf => Strategy::Hrlf,
        StrategyName::U => Strategy::Unstructured(args.seed),
    };
    let season = analyze_season(&rules, args.probe)?;
    let plan = plan_strategy(strategy, &rules, &season)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&plan)?);
        return Ok(());
    }
    println!("{:<6} {:>12} {:>12} {:>12}", "race", "aero", "horsepower", "weight");
    for (i, x) in plan.expenditures.races.iter().enumerate() {
        println!(
            "{:<6} {:>12.0} {:>12.0} {:>12.0}",
            i + 1,
            x.aero,
            x.horsepower,
            x.weight
        );
    }
    println!("total {:.0} USD", plan.expenditures.total());
    Ok(())
}

fn tournament(args: &TournamentArgs) -> Result<()> {
    let rules = args.rules.load()?;
    let report = run_tournament(&Strategy::lineup(args.seed), &rules)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    Ok(())
}

async fn serve(args: &ServeArgs) -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let addr = SocketAddr::new(args.host, args.port);
    f1champ_service::serve(addr, &args.data_dir).await?;
    Ok(())
}

#[tokio::main]
async fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Optimize(a) => optimize(a),
        Command::Tournament(a) => tournament(a),
        Command::Serve(a) => serve(a).await,
    }
}
