//! `rpo`: run missions, unforced propagations and single-block demos from a
//! scenario file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rpo_core::maneuver::BlockKind;
use rpo_core::mission::MissionOutcome;
use rpo_core::scenario::{
    format_schedule, plan_block, propagate_scenario, propagation_element_rows, run_scenario, write_elements_csv,
    write_mission_artifacts, ScenarioConfig,
};
use rpo_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_ABORT: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "rpo", version, about = "Low-thrust CubeSat rendezvous mission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fly the full mission and write states, elements, schedule and report.
    RunMission {
        #[arg(long)]
        config: PathBuf,
        /// Output directory. Falls back to the config, then RPO_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unforced propagation of target and chaser; writes elements.csv.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        days: f64,
        /// Accepted for symmetry; propagation is always unforced.
        #[arg(long)]
        no_thrust: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan one maneuver block on the scenario's target orbit.
    PlanBlock {
        #[arg(long, value_enum)]
        block: BlockArg,
        #[arg(long)]
        config: PathBuf,
        /// raan/u: offset to close, deg. i: Δi to add, deg. e: Δe to reach.
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        /// Propagate the schedule and report the measured change.
        #[arg(long)]
        execute: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockArg {
    Raan,
    U,
    I,
    E,
}

impl From<BlockArg> for BlockKind {
    fn from(b: BlockArg) -> Self {
        match b {
            BlockArg::Raan => BlockKind::RaanCor,
            BlockArg::U => BlockKind::UCor,
            BlockArg::I => BlockKind::ICor,
            BlockArg::E => BlockKind::ECor,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::InvalidElements(_) => EXIT_CONFIG,
        Error::MissionAbort { .. } => EXIT_ABORT,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => 1,
    }
}

fn out_dir(cli: Option<PathBuf>, cfg: &ScenarioConfig) -> PathBuf {
    cli.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("RPO_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rpo-out"))
}

fn run_mission_cmd(config: &Path, out: Option<PathBuf>) -> Result<u8, Error> {
    let cfg = ScenarioConfig::load(config)?;
    let report = run_scenario(&cfg)?;
    let dir = out_dir(out, &cfg);
    let files = write_mission_artifacts(&dir, &report, &cfg)?;
    for p in &report.phases {
        println!(
            "{:<17} {:>9.3} d -> {:>9.3} d  dv {:>8.3} m/s",
            p.phase.label(),
            p.start / rpo_core::DAY,
            p.end / rpo_core::DAY,
            p.delta_v
        );
    }
    println!("total dv {:.3} m/s", report.delta_v_used);
    if let Some(g) = report.final_geometry {
        println!(
            "final ellipse: radial {:.2} km, along-track {:.2} km, cross-track {:.2} km",
            g.radial_extent, g.alongtrack_extent, g.crosstrack_extent
        );
    }
    println!("report: {}", files.report.display());
    match report.outcome {
        MissionOutcome::Completed => Ok(0),
        MissionOutcome::Aborted { phase, epoch, reason } => {
            eprintln!("mission aborted in {phase} at t = {epoch:.1} s: {reason}");
            Ok(EXIT_ABORT)
        }
    }
}

fn propagate_cmd(config: &Path, days: f64, out: Option<PathBuf>) -> Result<u8, Error> {
    let cfg = ScenarioConfig::load(config)?;
    if !(days >= 0.0 && days.is_finite()) {
        return Err(Error::Config(vec![format!("--days: must be non-negative, got {days}")]));
    }
    let rows = if days == 0.0 {
        Vec::new()
    } else {
        let res = propagate_scenario(&cfg, days)?;
        propagation_element_rows(&res, &cfg.gravity)?
    };
    let dir = out_dir(out, &cfg);
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("elements.csv");
    write_elements_csv(&path, &rows)?;
    println!("{} rows -> {}", rows.len(), path.display());
    Ok(0)
}

fn plan_block_cmd(block: BlockArg, config: &Path, delta: f64, execute: bool) -> Result<u8, Error> {
    let cfg = ScenarioConfig::load(config)?;
    let demo = plan_block(&cfg, block.into(), delta, execute)?;
    let label = demo.block.label();
    if demo.schedule.is_empty() {
        println!("{label}: empty schedule, requested change is inside the deadband");
    } else {
        println!("{label}: {} firings", demo.schedule.segments.len());
        print!("{}", format_schedule(&demo.schedule.segments));
    }
    let p = &demo.predicted_change;
    println!(
        "predicted change: da {:.4} km, de {:.6e}, di {:.5} deg, draan {:.5} deg, dlambda {:.5} deg",
        p.da_km, p.de, p.di_deg, p.draan_deg, p.dlambda_deg
    );
    if let Some(m) = &demo.measured_after {
        let b = &demo.before;
        println!(
            "measured change: da {:.4} km, de {:.6e}, di {:.5} deg, draan {:.5} deg, dlambda {:.5} deg",
            m.da_km - b.da_km,
            m.de - b.de,
            m.di_deg - b.di_deg,
            m.draan_deg - b.draan_deg,
            m.dlambda_deg - b.dlambda_deg
        );
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RunMission { config, out } => run_mission_cmd(&config, out),
        Command::Propagate {
            config,
            days,
            no_thrust: _,
            out,
        } => propagate_cmd(&config, days, out),
        Command::PlanBlock {
            block,
            config,
            delta,
            execute,
        } => plan_block_cmd(block, &config, delta, execute),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
