use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kinetic_core::driver::{load_config, parse_collision, parse_scheme, parse_time_step, run};

/// Kinetic shock-tube / relaxation solver.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Scenario file with key=value lines.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    kn: Option<f64>,
    /// Time step, or `auto` for the CFL rule.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long = "order-x")]
    order_x: Option<usize>,
    #[arg(long = "order-v")]
    order_v: Option<usize>,
    #[arg(long)]
    elements: Option<usize>,
    /// euler_frame or rk4
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long = "smoothing-c")]
    smoothing_c: Option<f64>,
    /// boltzmann, bgk or off
    #[arg(long)]
    collision: Option<String>,
    #[arg(long = "output-dir")]
    output_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), String> {
    let mut cfg = load_config(&cli.config).map_err(|e| e.to_string())?;
    if let Some(v) = cli.kn {
        cfg.kn = v;
    }
    if let Some(v) = &cli.tau {
        cfg.tau = parse_time_step(0, v).map_err(|e| e.to_string())?;
    }
    if let Some(v) = cli.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = cli.order_x {
        cfg.order_x = v;
    }
    if let Some(v) = cli.order_v {
        cfg.order_v = v;
    }
    if let Some(v) = cli.elements {
        cfg.elements = v;
    }
    if let Some(v) = &cli.scheme {
        cfg.scheme = parse_scheme(v)?;
    }
    if let Some(v) = cli.smoothing_c {
        cfg.smoothing_c = v;
    }
    if let Some(v) = &cli.collision {
        cfg.collision = parse_collision(v)?;
    }
    if let Some(v) = cli.output_dir {
        cfg.output_dir = v;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    let out = run(cfg).map_err(|e| e.to_string())?;
    let last = out.reports.last();
    println!(
        "{} steps, t = {:.6}, {} snapshots",
        out.reports.len(),
        last.map_or(0.0, |r| r.time),
        out.snapshots.len()
    );
    if let Some(r) = last {
        println!(
            "mass {:.12e} -> {:.12e}, energy {:.12e} -> {:.12e}",
            out.initial_totals[0], r.totals[0], out.initial_totals[4], r.totals[4]
        );
    }
    for (_, _, p) in &out.snapshots {
        println!("{}", p.display());
    }
    Ok(())
}
