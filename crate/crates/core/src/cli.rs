//! Command-line front end: parses flags, runs one analysis, renders outputs.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::correlated::{ce_utility_region, lambda_mixture, optimize_over_ce, weighted_objective};
use crate::efficiency::{leader_coefficient, solve_beta, solve_gamma_with_beta, EfficiencyModel, RootResult};
use crate::error::{Error, Result};
use crate::game::enumerate_pure_equilibria;
use crate::hierarchy::{stackelberg_from_roots, GammaIndexing, SensingRoots, StackelbergOutcome};
use crate::hybrid::{paradox_report, GridSpec};
use crate::oneshot::{br_dynamics, nash_powers_with_beta, sinr, utility, BrOutcome, NetworkConfig, PowerVector};
use crate::output::{fmt_f64, to_json, Table};
use crate::sensing_game::{
    check_exact_potential, check_weighted_potential, profile_of, sensing_game_from_units, stable_profiles,
    PotentialCheck, PotentialTable, UnitUtilities, WeightedPotentialCheck,
};
use crate::two_player::{build_matrix, classify_equilibria, Classification, EquilibriumReport};

#[derive(Debug, Parser)]
#[command(name = "sensegame", version, about = "Equilibria of energy-efficient power control with costly sensing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving every output file (stdout gets the main output otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SINR targets β*, γ* and the sensing-profile roots γ*_L.
    Roots(Common),
    /// Nash powers, SINRs and utilities of the one-shot game.
    OneShot(Common),
    /// Leader and follower operating points of every player.
    Stackelberg(Common),
    /// The K-player sensing game, its potential and its pure equilibria.
    SensingGame(Common),
    /// Two-player matrix game: equilibria, thresholds, mixed equilibrium.
    TwoPlayer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Correlated-equilibrium utility region of the two-player game.
    CorrelatedRegion {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        angles: Option<usize>,
    },
    /// Hybrid sense-and-power game against the two-stage outcomes.
    HybridParadox {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        grid_size: Option<usize>,
    },
    /// Equilibrium classification of the two-player game over a range of α.
    AlphaSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Roots(_) => "roots",
            Command::OneShot(_) => "one-shot",
            Command::Stackelberg(_) => "stackelberg",
            Command::SensingGame(_) => "sensing-game",
            Command::TwoPlayer { .. } => "two-player",
            Command::CorrelatedRegion { .. } => "correlated-region",
            Command::HybridParadox { .. } => "hybrid-paradox",
            Command::AlphaSweep { .. } => "alpha-sweep",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Roots(c) | Command::OneShot(c) | Command::Stackelberg(c) | Command::SensingGame(c) => c,
            Command::TwoPlayer { common, .. }
            | Command::CorrelatedRegion { common, .. }
            | Command::HybridParadox { common, .. }
            | Command::AlphaSweep { common, .. } => common,
        }
    }
}

/// One rendered output file. The first artifact of a run is the main one.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

fn json_artifact<T: Serialize>(stem: &str, value: &T) -> Result<Artifact> {
    let contents = to_json(value).map_err(|e| Error::InvalidInput(format!("cannot render JSON: {e}")))?;
    Ok(Artifact { file_name: format!("{stem}.json"), contents })
}

fn csv_artifact(name: &str, table: &Table) -> Result<Artifact> {
    let contents = table.to_csv().map_err(|e| Error::InvalidInput(format!("cannot render CSV: {e}")))?;
    Ok(Artifact { file_name: format!("{name}.csv"), contents })
}

/// Runs `command` against an already loaded configuration.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let name = command.name();
    match command {
        Command::Roots(_) => Ok(vec![json_artifact(name, &roots_report(cfg)?)?]),
        Command::OneShot(_) => Ok(vec![json_artifact(name, &one_shot_report(cfg)?)?]),
        Command::Stackelberg(_) => Ok(vec![json_artifact(name, &stackelberg_report(cfg)?)?]),
        Command::SensingGame(_) => {
            let (report, table) = sensing_game_report(cfg)?;
            Ok(vec![json_artifact(name, &report)?, csv_artifact(name, &table)?])
        }
        Command::TwoPlayer { alpha, .. } => {
            let alpha = alpha.unwrap_or(cfg.network.sensing_cost);
            Ok(vec![json_artifact(name, &two_player_report(cfg, alpha)?)?])
        }
        Command::CorrelatedRegion { alpha, angles, .. } => {
            let alpha = alpha.unwrap_or(cfg.network.sensing_cost);
            let (summary, table) = region_report(cfg, alpha, angles.unwrap_or(cfg.region.angles))?;
            Ok(vec![csv_artifact(name, &table)?, json_artifact(name, &summary)?])
        }
        Command::HybridParadox { alpha, grid_size, .. } => {
            let alpha = alpha.unwrap_or(cfg.network.sensing_cost);
            let grid = GridSpec { size: grid_size.unwrap_or(cfg.hybrid.size), ..cfg.hybrid };
            Ok(vec![json_artifact(name, &paradox_report(&cfg.network, &cfg.efficiency, alpha, &grid)?)?])
        }
        Command::AlphaSweep { from, to, steps, .. } => {
            let sweep = crate::config::SweepSpec {
                from: from.unwrap_or(cfg.sweep.from),
                to: to.unwrap_or(cfg.sweep.to),
                steps: steps.unwrap_or(cfg.sweep.steps),
            };
            sweep.validate()?;
            Ok(vec![csv_artifact(name, &alpha_sweep(cfg, &sweep.values())?)?])
        }
    }
}

/// Parses `args`, runs the command and writes its outputs. Returns the
/// process exit code: 0 on success, 1 on invalid input, 2 when the model
/// has no solution of the requested kind.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match run_command(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_infeasibility() {
                2
            } else {
                1
            }
        }
    }
}

fn run_command(command: &Command, stdout: &mut dyn Write) -> Result<()> {
    let common = command.common();
    let cfg = RunConfig::load(&common.config)?;
    let artifacts = execute(command, &cfg)?;
    match common.out.as_deref().or(cfg.out_dir.as_deref()) {
        Some(dir) => write_artifacts(dir, &artifacts),
        None => stdout
            .write_all(artifacts[0].contents.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}"))),
    }
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))?;
    for a in artifacts {
        let path = dir.join(&a.file_name);
        std::fs::write(&path, &a.contents)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RootsReport {
    efficiency: EfficiencyModel,
    players: usize,
    beta: RootResult,
    leader_coefficient: f64,
    gamma: RootResult,
    sensing: SensingRoots,
}

fn roots_report(cfg: &RunConfig) -> Result<RootsReport> {
    let tol = cfg.tolerances.root;
    let k = cfg.network.k();
    let beta = solve_beta(&cfg.efficiency, tol)?;
    let c = leader_coefficient(k, beta.value)?;
    let gamma = solve_gamma_with_beta(&cfg.efficiency, k, beta.value, tol)?;
    let sensing = SensingRoots::solve(&cfg.efficiency, k, cfg.network.processing_gain, tol)?;
    Ok(RootsReport { efficiency: cfg.efficiency, players: k, beta, leader_coefficient: c, gamma, sensing })
}

#[derive(Debug, Serialize)]
struct OneShotReport {
    beta: f64,
    /// W
    powers: Vec<f64>,
    sinr: Vec<f64>,
    /// bit/J
    utilities: Vec<f64>,
    best_response: BrOutcome,
    /// Largest |p_BR - p*| / p*.
    best_response_gap: f64,
}

fn one_shot_report(cfg: &RunConfig) -> Result<OneShotReport> {
    let net = &cfg.network;
    let beta = solve_beta(&cfg.efficiency, cfg.tolerances.root)?.value;
    let p = nash_powers_with_beta(net, beta)?;
    let k = net.k();
    let sinrs = (0..k).map(|i| sinr(net, &p, i)).collect::<Result<Vec<_>>>()?;
    let utilities = (0..k).map(|i| utility(net, &cfg.efficiency, &p, i)).collect::<Result<Vec<_>>>()?;
    let br = br_dynamics(net, &cfg.efficiency, &PowerVector(net.max_power.clone()), 1e-13, 10_000)?;
    let gap = br.powers.0.iter().zip(&p.0).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
    Ok(OneShotReport { beta, powers: p.0, sinr: sinrs, utilities, best_response: br, best_response_gap: gap })
}

#[derive(Debug, Serialize)]
struct StackelbergReport {
    beta: f64,
    gamma: f64,
    sensing_cost: f64,
    players: Vec<StackelbergOutcome>,
}

fn stackelberg_report(cfg: &RunConfig) -> Result<StackelbergReport> {
    let net = &cfg.network;
    let tol = cfg.tolerances.root;
    let beta = solve_beta(&cfg.efficiency, tol)?.value;
    let gamma = solve_gamma_with_beta(&cfg.efficiency, net.k(), beta, tol)?.value;
    let players = (0..net.k())
        .map(|i| stackelberg_from_roots(net, &cfg.efficiency, i, beta, gamma))
        .collect::<Result<Vec<_>>>()?;
    Ok(StackelbergReport { beta, gamma, sensing_cost: net.sensing_cost, players })
}

#[derive(Debug, Serialize)]
struct SensingEquilibrium {
    actions: Vec<String>,
    sensing: usize,
    non_sensing: usize,
    utilities: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SensingGameReport {
    players: usize,
    indexing: GammaIndexing,
    units: UnitUtilities,
    potential: PotentialTable,
    stable_profiles: Vec<crate::hierarchy::SensingProfile>,
    potential_argmax: Vec<crate::hierarchy::SensingProfile>,
    equilibria: Vec<SensingEquilibrium>,
    exact_potential: PotentialCheck,
    weighted_potential: WeightedPotentialCheck,
}

fn sensing_game_report(cfg: &RunConfig) -> Result<(SensingGameReport, Table)> {
    let net = &cfg.network;
    let tol = cfg.tolerances.equilibrium;
    let units = UnitUtilities::compute(net, &cfg.efficiency, cfg.indexing())?;
    let game = sensing_game_from_units(net, &units)?;
    let equilibria = enumerate_pure_equilibria(&game, tol)?
        .into_iter()
        .map(|idx| {
            let p = profile_of(&game, idx);
            SensingEquilibrium {
                actions: game.label_tuple(idx),
                sensing: p.sensing,
                non_sensing: p.non_sensing,
                utilities: game.payoffs_at(idx).to_vec(),
            }
        })
        .collect();
    let potential = PotentialTable::from_units(&units, net.weights());
    let stable = stable_profiles(&units, tol);
    let argmax = potential.argmax(tol);
    let mut table = Table::new([
        "sensing [players]",
        "non_sensing [players]",
        "u_sense_per_weight [1]",
        "u_not_sense_per_weight [1]",
        "potential_per_weight [1]",
        "stable",
    ]);
    for (f, phi) in potential.values.iter().enumerate() {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        table.push(vec![
            f.to_string(),
            (units.k - f).to_string(),
            opt(units.sense[f]),
            opt(units.not_sense[f]),
            fmt_f64(*phi),
            stable.iter().any(|p| p.sensing == f).to_string(),
        ]);
    }
    let report = SensingGameReport {
        players: net.k(),
        indexing: cfg.indexing(),
        exact_potential: check_exact_potential(&game, tol),
        weighted_potential: check_weighted_potential(&game, &net.weights(), tol)?,
        units,
        potential,
        stable_profiles: stable,
        potential_argmax: argmax,
        equilibria,
    };
    Ok((report, table))
}

fn two_player_report(cfg: &RunConfig, alpha: f64) -> Result<EquilibriumReport> {
    Ok(classify_equilibria(&build_matrix(&cfg.network, &cfg.efficiency, alpha)?))
}

#[derive(Debug, Serialize)]
struct RegionSummary {
    alpha: f64,
    classification: Classification,
    angles: usize,
    pure_equilibria: Vec<[f64; 2]>,
    lambda_half: Vec<f64>,
    contains_pure_equilibria: bool,
    contains_lambda_half: bool,
    welfare_optimum: f64,
    hull: Vec<[f64; 2]>,
}

fn region_report(cfg: &RunConfig, alpha: f64, angles: usize) -> Result<(RegionSummary, Table)> {
    let matrix = build_matrix(&cfg.network, &cfg.efficiency, alpha)?;
    let report = classify_equilibria(&matrix);
    let game = matrix.to_game()?;
    let region = ce_utility_region(&game, angles)?;
    let pure: Vec<[f64; 2]> = report.pure.iter().map(|p| p.utilities).collect();
    let half = lambda_mixture(&game, 0.5)?.expected_utilities(&game);
    let welfare = optimize_over_ce(&game, &weighted_objective(&game, &[1.0, 1.0]))?.value;
    let mut header = vec!["theta [rad]".to_string(), "u1 [bit/J]".to_string(), "u2 [bit/J]".to_string()];
    header.extend(region.labels.iter().map(|l| format!("Q({l}) [1]")));
    let mut table = Table::new(header);
    for p in &region.points {
        let mut row = vec![fmt_f64(p.theta), fmt_f64(p.utilities[0]), fmt_f64(p.utilities[1])];
        row.extend(p.q.iter().map(|q| fmt_f64(*q)));
        table.push(row);
    }
    let summary = RegionSummary {
        alpha,
        classification: report.classification,
        angles,
        contains_pure_equilibria: pure.iter().all(|u| region.contains(*u, 1e-6)),
        contains_lambda_half: report.classification != Classification::Three || region.contains([half[0], half[1]], 1e-6),
        pure_equilibria: pure,
        lambda_half: half,
        welfare_optimum: welfare,
        hull: region.hull,
    };
    Ok((summary, table))
}

/// One CSV row per α: classification, pure equilibria and the mixed
/// equilibrium when it exists.
pub fn alpha_sweep(cfg: &RunConfig, alphas: &[f64]) -> Result<Table> {
    let mut table = Table::new([
        "alpha [1]",
        "classification",
        "pure_equilibria",
        "pure_u1 [bit/J]",
        "pure_u2 [bit/J]",
        "mixed_not_sense_prob [1]",
        "mixed_u1 [bit/J]",
        "mixed_u2 [bit/J]",
    ]);
    for &alpha in alphas {
        let r = classify_equilibria(&build_matrix(&cfg.network, &cfg.efficiency, alpha)?);
        let join = |f: &dyn Fn(&crate::two_player::PureEquilibrium) -> String| {
            r.pure.iter().map(f).collect::<Vec<_>>().join(";")
        };
        let label = serde_json::to_value(r.classification).ok().and_then(|v| v.as_str().map(str::to_string));
        let mixed = |f: &dyn Fn(&crate::two_player::MixedProfile) -> f64| r.mixed.as_ref().map(|m| fmt_f64(f(m))).unwrap_or_default();
        table.push(vec![
            fmt_f64(alpha),
            label.unwrap_or_default(),
            join(&|p| format!("{}/{}", p.actions[0].label(), p.actions[1].label())),
            join(&|p| fmt_f64(p.utilities[0])),
            join(&|p| fmt_f64(p.utilities[1])),
            mixed(&|m| m.not_sense[0]),
            mixed(&|m| m.values[0]),
            mixed(&|m| m.values[1]),
        ]);
    }
    Ok(table)
}

/// Convenience for callers that already hold a network and model.
pub fn reference_config(network: NetworkConfig, efficiency: EfficiencyModel) -> RunConfig {
    RunConfig {
        network,
        efficiency,
        tolerances: Default::default(),
        hybrid: Default::default(),
        sweep: Default::default(),
        region: Default::default(),
        consistent_gamma_index: false,
        out_dir: None,
    }
}
