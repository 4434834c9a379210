use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lastmile::fleet::{batch_sweep, gap_study, sweep};
use lastmile::microsim::{simulate, IdmParams, IdmVariant, SimConfig};
use lastmile::results::{
    batch_csv, batch_records, GapDoc, ResultsDocument, SimulationDoc, SweepDoc,
};
use lastmile::scenario::{
    gen_scenarios, load_idm_params, load_network, write_atomic, Scenario, ScenarioError,
};
use lastmile::{ClusteringError, DeliverySet, FleetError, RoadNetwork, RoutingError, SimError};

/// Last-mile delivery fleet optimizer.
#[derive(Parser)]
#[command(name = "lastmile", version, about)]
struct Cli {
    /// road network file (overrides the scenario's network reference)
    #[arg(long, global = true)]
    network: Option<PathBuf>,
    /// output path for the results document (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// seed for randomized subcommands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// override the scenario's cost trade-off weight
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// simulation time step in seconds
    #[arg(long, global = true, default_value_t = 0.02)]
    dt: f64,
    /// IDM parameter file
    #[arg(long, global = true)]
    idm_params: Option<PathBuf>,
    /// acceleration law override
    #[arg(long, global = true, value_enum)]
    idm: Option<IdmArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdmArg {
    /// gap-rate coupling with the delta exponent (the default law)
    GapRate,
    /// canonical IDM with exponent 4
    Standard,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep fleet sizes for a scenario and report the optimum.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Optimize, then validate the planned costs in the microsimulation.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// simulate this fleet size instead of the sweep optimum
        #[arg(long)]
        fleet_size: Option<usize>,
        /// write a trajectory CSV (t, vehicle, edge, position, speed)
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// keep every n-th sample in the trajectory log
        #[arg(long, default_value_t = 10)]
        log_every: usize,
    },
    /// Compare greedy routes against the exact oracle on random scenarios.
    CompareExact {
        /// package counts, e.g. 3,4,5,6
        #[arg(long, value_delimiter = ',', required = true)]
        packages: Vec<usize>,
        /// scenarios per package count
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// exact oracle cap
        #[arg(long, default_value_t = lastmile::DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Batch sweeps over random scenarios; emits one CSV row per scenario x k.
    Pareto {
        #[arg(long, default_value_t = 6)]
        packages: usize,
        #[arg(long, default_value_t = 40)]
        count: usize,
        /// available vehicles (defaults to the package count)
        #[arg(long)]
        vehicles: Option<usize>,
    },
    /// Write random scenario files.
    GenScenario {
        #[arg(long, default_value_t = 6)]
        packages: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// available vehicles (defaults to the package count)
        #[arg(long)]
        vehicles: Option<usize>,
        /// directory for the generated files
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Error categories with distinct exit codes.
enum CliError {
    Parse(String),
    Validation(String),
    Cap(String),
    Internal(String),
}

impl CliError {
    fn category(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Cap(_) => "cap",
            CliError::Internal(_) => "internal",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Cap(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } | ScenarioError::Parse { .. } | ScenarioError::MixedNetworkForms { .. } => {
                CliError::Parse(e.to_string())
            }
            ScenarioError::Write { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FleetError> for CliError {
    fn from(e: FleetError) -> Self {
        match e {
            FleetError::Routing(RoutingError::ExactCapExceeded { .. }) => CliError::Cap(e.to_string()),
            FleetError::InvalidAlpha(_) | FleetError::Clustering(_) => CliError::Validation(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ClusteringError> for CliError {
    fn from(e: ClusteringError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NonPositiveParam { .. } | SimError::SpeedOrdering { .. } | SimError::InvalidDt(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lastmile: {} error: {}", e.category(), e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Optimize { scenario } => {
            let (net, scenario, deliveries) = load_inputs(cli, scenario)?;
            let alpha = cli.alpha.unwrap_or(scenario.alpha);
            let result = sweep(&net, &deliveries, scenario.vehicles, alpha)?;
            eprintln!("lastmile: best fleet size {} of {}", result.best_k, scenario.vehicles);
            let mut doc = ResultsDocument::new(scenario.seed, Some(scenario));
            doc.sweep = Some(SweepDoc::new(&result, &deliveries));
            emit(cli, &doc.to_toml())
        }
        Command::Simulate { scenario, fleet_size, trajectory, log_every } => {
            let (net, scenario, deliveries) = load_inputs(cli, scenario)?;
            let alpha = cli.alpha.unwrap_or(scenario.alpha);
            let result = sweep(&net, &deliveries, scenario.vehicles, alpha)?;
            let k = fleet_size.unwrap_or(result.best_k);
            let eval = result
                .evaluations
                .iter()
                .find(|e| e.k == k)
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "fleet size {k} is outside the swept range 1..={}",
                        result.evaluations.len()
                    ))
                })?;
            let params = idm_params(cli)?;
            let config = SimConfig {
                dt: cli.dt,
                log_every: if trajectory.is_some() { *log_every } else { 0 },
                ..SimConfig::default()
            };
            let sim = simulate(&net, &deliveries, &eval.routes, &params, &config)?;
            if let Some(path) = trajectory {
                let mut writer = csv::Writer::from_writer(Vec::new());
                for sample in &sim.trajectory {
                    writer
                        .serialize(sample)
                        .map_err(|e| CliError::Internal(e.to_string()))?;
                }
                let text = String::from_utf8(
                    writer.into_inner().map_err(|e| CliError::Internal(e.to_string()))?,
                )
                .expect("csv output is utf-8");
                write_atomic(path, &text)?;
                eprintln!("lastmile: wrote {}", path.display());
            }
            eprintln!(
                "lastmile: simulated fleet size {k}; measured round trips {:?}",
                sim.round_trip_times.values().collect::<Vec<_>>()
            );
            let mut doc = ResultsDocument::new(scenario.seed, Some(scenario));
            doc.sweep = Some(SweepDoc::new(&result, &deliveries));
            doc.simulations.push(SimulationDoc::new(
                k, &eval.routes, &deliveries, &sim, &params, &config,
            ));
            emit(cli, &doc.to_toml())
        }
        Command::CompareExact { packages, count, cap } => {
            let net = network_from(cli)?;
            echo_seed(cli);
            for &m in packages {
                if m > *cap {
                    return Err(CliError::Cap(format!(
                        "{m} packages exceed the exact-route cap of {cap}"
                    )));
                }
            }
            let mut doc = ResultsDocument::new(Some(cli.seed), None);
            for &m in packages {
                let sets = delivery_sets(&net, m, *count, cli.seed.wrapping_add(m as u64))?;
                let records = gap_study(&net, &sets, *cap)?;
                let mut gaps: Vec<f64> = records.iter().map(|r| r.gap_pct).collect();
                gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = gaps[gaps.len() / 2];
                eprintln!(
                    "lastmile: M = {m}: median gap {median:.2}% over {} scenarios",
                    records.len()
                );
                doc.gap_records.extend(records.iter().map(GapDoc::from));
            }
            emit(cli, &doc.to_toml())
        }
        Command::Pareto { packages, count, vehicles } => {
            let net = network_from(cli)?;
            echo_seed(cli);
            let sets = delivery_sets(&net, *packages, *count, cli.seed)?;
            let n = vehicles.unwrap_or(*packages);
            let alpha = cli.alpha.unwrap_or(0.5);
            let sweeps = batch_sweep(&net, &sets, n, alpha)?;
            let records = batch_records(&sweeps);
            let frontier = records.iter().filter(|r| r.pareto).count();
            eprintln!(
                "lastmile: {} scenario x k points, {frontier} on the Pareto frontier",
                records.len()
            );
            emit(cli, &batch_csv(&records))
        }
        Command::GenScenario { packages, count, vehicles, out_dir } => {
            let net = network_from(cli)?;
            echo_seed(cli);
            let mut scenarios = gen_scenarios(&net, *packages, *count, cli.seed)?;
            for s in &mut scenarios {
                if let Some(n) = vehicles {
                    s.vehicles = *n;
                }
                if let Some(alpha) = cli.alpha {
                    s.alpha = alpha;
                }
                if let Some(net_path) = &cli.network {
                    s.network = Some(net_path.display().to_string());
                }
            }
            for (i, s) in scenarios.iter().enumerate() {
                let path = out_dir.join(format!("scenario-{i:03}.toml"));
                s.save(&path)?;
                eprintln!("lastmile: wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn network_from(cli: &Cli) -> Result<RoadNetwork, CliError> {
    let path = cli
        .network
        .as_ref()
        .ok_or_else(|| CliError::Parse("no network file given (use --network)".into()))?;
    eprintln!("lastmile: network {}", path.display());
    Ok(load_network(path)?)
}

/// Resolve the network (flag first, then the scenario's reference relative to
/// the scenario file), then validate the scenario against it.
fn load_inputs(
    cli: &Cli,
    scenario_path: &Path,
) -> Result<(RoadNetwork, Scenario, DeliverySet), CliError> {
    eprintln!("lastmile: scenario {}", scenario_path.display());
    let scenario = Scenario::load(scenario_path)?;
    let net = match (&cli.network, &scenario.network) {
        (Some(path), _) => {
            eprintln!("lastmile: network {}", path.display());
            load_network(path)?
        }
        (None, Some(reference)) => {
            let base = scenario_path.parent().unwrap_or(Path::new("."));
            let path = base.join(reference);
            eprintln!("lastmile: network {}", path.display());
            load_network(&path)?
        }
        (None, None) => {
            return Err(CliError::Parse(
                "no network file given (use --network or a scenario `network` entry)".into(),
            ))
        }
    };
    echo_seed(cli);
    let deliveries = scenario.delivery_set(&net)?;
    Ok((net, scenario, deliveries))
}

fn delivery_sets(
    net: &RoadNetwork,
    m: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<DeliverySet>, CliError> {
    let scenarios = gen_scenarios(net, m, count, seed)?;
    scenarios
        .iter()
        .map(|s| s.delivery_set(net).map_err(CliError::from))
        .collect()
}

fn idm_params(cli: &Cli) -> Result<IdmParams, CliError> {
    let mut params = match &cli.idm_params {
        Some(path) => load_idm_params(path)?,
        None => IdmParams::default(),
    };
    if let Some(variant) = cli.idm {
        params.variant = match variant {
            IdmArg::GapRate => IdmVariant::GapRate,
            IdmArg::Standard => IdmVariant::Standard,
        };
    }
    params.validate()?;
    Ok(params)
}

fn echo_seed(cli: &Cli) {
    eprintln!("lastmile: seed {}", cli.seed);
}

fn emit(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            write_atomic(path, content)?;
            eprintln!("lastmile: wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
