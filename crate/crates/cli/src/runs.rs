//! Command dispatch: builds validated inputs, runs the library, writes files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use platelab::error::{PlateError, Result};
use platelab::experiments::{
    chirp_experiment, dilation_experiment, growth_experiment, multiplier_experiment,
    product_experiment, ExperimentEnv, ExperimentReport, Verdict,
};
use platelab::gabor::{stft, Window};
use platelab::io;
use platelab::lattice::{Field, Lattice};
use platelab::mixed_norms::{modulation_norm, wiener_norm, Exponent, MixedNormSpec, NormOrder};
use platelab::plate_solver::{picard_solve, Nonlinearity, SolverConfig};

use crate::config::{Cli, Command, ExperimentName};

pub enum Outcome {
    Success,
    InconsistentVerdict,
}

pub fn dispatch(cli: Cli) -> Result<Outcome> {
    init_threads(&cli);
    let lattice = Lattice::new(cli.dim, cli.grid, cli.length)?;
    let out_dir = PathBuf::from(&cli.output_dir);
    std::fs::create_dir_all(&out_dir)?;
    let p: Exponent = cli.p.parse()?;
    let q: Exponent = cli.q.parse()?;
    write_manifest(&cli, &out_dir)?;

    match cli.command {
        Command::Norm => {
            let field = load_matching_field(&cli.input, lattice, "--input")?;
            let spec = if cli.wiener {
                MixedNormSpec::wiener(p, q, cli.s, cli.gamma)?
            } else {
                MixedNormSpec::modulation(p, q, cli.s)?
            };
            let window = Window::gaussian_with_width(lattice, cli.window_width);
            let matrix = stft(&field, &window)?;
            let value = match spec.order {
                NormOrder::PositionFirst => modulation_norm(&matrix, &spec)?,
                NormOrder::FrequencyFirst => wiener_norm(&matrix, &spec)?,
            };
            let line = io::fmt_g17(value);
            println!("{line}");
            std::fs::write(out_dir.join("norm.txt"), format!("{line}\n"))?;
            Ok(Outcome::Success)
        }
        Command::Stft => {
            let field = load_matching_field(&cli.input, lattice, "--input")?;
            let window = Window::gaussian_with_width(lattice, cli.window_width);
            let matrix = stft(&field, &window)?;
            std::fs::write(out_dir.join(&cli.out), matrix.abs_csv())?;
            Ok(Outcome::Success)
        }
        Command::Propagate => {
            let u0 = load_matching_field(&cli.u0, lattice, "--u0")?;
            let u1 = load_matching_field(&cli.u1, lattice, "--u1")?;
            let cfg = SolverConfig::new(cli.horizon, cli.nodes)?
                .with_tolerance(cli.tol, cli.max_iter)?;
            let trajectory = picard_solve(&u0, &u1, &Nonlinearity::Zero, &cfg)?;
            io::export_trajectory(&trajectory, &out_dir)?;
            Ok(Outcome::Success)
        }
        Command::Solve => {
            let u0 = load_matching_field(&cli.u0, lattice, "--u0")?;
            let u1 = load_matching_field(&cli.u1, lattice, "--u1")?;
            let cfg = SolverConfig::new(cli.horizon, cli.nodes)?
                .with_tolerance(cli.tol, cli.max_iter)?;
            let nonlinearity = match cli.nonlinearity.as_str() {
                "zero" => Nonlinearity::Zero,
                "powerlaw" => Nonlinearity::power_law(
                    Complex64::new(cli.lambda_re, cli.lambda_im),
                    cli.power_k,
                ),
                other => {
                    return Err(PlateError::InvalidParameter(format!(
                        "--nonlinearity must be zero or powerlaw, got '{other}'"
                    )))
                }
            };
            let trajectory = picard_solve(&u0, &u1, &nonlinearity, &cfg)?;
            io::export_trajectory(&trajectory, &out_dir)?;
            if !trajectory.converged {
                eprintln!(
                    "warning: Picard iteration did not converge ({} iterations, last increment {})",
                    trajectory.iterations_used,
                    io::fmt_g17(trajectory.final_increment)
                );
            }
            println!(
                "converged={} iterations={} final_increment={}",
                trajectory.converged,
                trajectory.iterations_used,
                io::fmt_g17(trajectory.final_increment)
            );
            Ok(Outcome::Success)
        }
        Command::Experiment { name } => {
            let env = ExperimentEnv {
                lattice,
                seed: cli.seed,
                family_size: cli.family_size,
            };
            let report = run_experiment(name, &env, &cli, p, q)?;
            io::write_report(&report, &out_dir)?;
            println!("{}: {}", report.name, report.verdict);
            match report.verdict {
                Verdict::Inconsistent => Ok(Outcome::InconsistentVerdict),
                _ => Ok(Outcome::Success),
            }
        }
    }
}

fn run_experiment(
    name: ExperimentName,
    env: &ExperimentEnv,
    cli: &Cli,
    p: Exponent,
    q: Exponent,
) -> Result<ExperimentReport> {
    match name {
        ExperimentName::Multiplier => multiplier_experiment(env, p, q, cli.s),
        ExperimentName::Dilation => {
            let mut lambdas = vec![1.0f64];
            while *lambdas.last().unwrap() < cli.lambda_max {
                lambdas.push(lambdas.last().unwrap() * 2.0);
            }
            dilation_experiment(env, &lambdas)
        }
        ExperimentName::Growth => {
            let times = parse_list(&cli.times, "--times")?;
            growth_experiment(env, &times)
        }
        ExperimentName::Product => product_experiment(env, p, cli.s),
        ExperimentName::Chirp => {
            let t_values = parse_list(&cli.t_values, "--t-values")?;
            chirp_experiment(env, p, q, &t_values)
        }
    }
}

fn parse_list(raw: &str, flag: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                PlateError::InvalidParameter(format!("{flag}: cannot parse '{tok}' as a number"))
            })
        })
        .collect()
}

fn load_matching_field(
    path: &Option<String>,
    lattice: Lattice,
    flag: &str,
) -> Result<Field> {
    let path = path.as_ref().ok_or_else(|| {
        PlateError::InvalidParameter(format!("{flag} is required for this command"))
    })?;
    let field = io::load_field(Path::new(path))?;
    if field.lattice() != &lattice {
        return Err(PlateError::InvalidParameter(format!(
            "{flag} {path}: field lattice (d={}, N={}, L={}) does not match the configured \
             lattice (d={}, N={}, L={})",
            field.lattice().dim(),
            field.lattice().points_per_axis(),
            field.lattice().side_length(),
            lattice.dim(),
            lattice.points_per_axis(),
            lattice.side_length()
        )));
    }
    Ok(field)
}

fn init_threads(cli: &Cli) {
    let from_env = std::env::var("PLATELAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = cli.threads.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// Echoes the fully resolved configuration, one sorted `key = value` line each.
fn write_manifest(cli: &Cli, out_dir: &Path) -> Result<()> {
    let command = match &cli.command {
        Command::Propagate => "propagate".to_string(),
        Command::Solve => "solve".to_string(),
        Command::Norm => "norm".to_string(),
        Command::Stft => "stft".to_string(),
        Command::Experiment { name } => format!("experiment {}", name.as_str()),
    };
    let mut entries = vec![
        ("command".to_string(), command),
        ("dim".to_string(), cli.dim.to_string()),
        ("grid".to_string(), cli.grid.to_string()),
        ("length".to_string(), io::fmt_g17(cli.length)),
        ("seed".to_string(), cli.seed.to_string()),
        ("output-dir".to_string(), cli.output_dir.clone()),
        ("p".to_string(), cli.p.clone()),
        ("q".to_string(), cli.q.clone()),
        ("s".to_string(), io::fmt_g17(cli.s)),
        ("gamma".to_string(), io::fmt_g17(cli.gamma)),
        ("wiener".to_string(), cli.wiener.to_string()),
        ("window-width".to_string(), io::fmt_g17(cli.window_width)),
        ("horizon".to_string(), io::fmt_g17(cli.horizon)),
        ("nodes".to_string(), cli.nodes.to_string()),
        ("nonlinearity".to_string(), cli.nonlinearity.clone()),
        ("lambda-re".to_string(), io::fmt_g17(cli.lambda_re)),
        ("lambda-im".to_string(), io::fmt_g17(cli.lambda_im)),
        ("power-k".to_string(), cli.power_k.to_string()),
        ("tol".to_string(), io::fmt_g17(cli.tol)),
        ("max-iter".to_string(), cli.max_iter.to_string()),
        ("family-size".to_string(), cli.family_size.to_string()),
        ("lambda-max".to_string(), io::fmt_g17(cli.lambda_max)),
        ("t-values".to_string(), cli.t_values.clone()),
        ("times".to_string(), cli.times.clone()),
    ];
    if let Some(input) = &cli.input {
        entries.push(("input".to_string(), input.clone()));
    }
    if let Some(u0) = &cli.u0 {
        entries.push(("u0".to_string(), u0.clone()));
    }
    if let Some(u1) = &cli.u1 {
        entries.push(("u1".to_string(), u1.clone()));
    }
    entries.sort();
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(&format!("{k} = {v}\n"));
    }
    std::fs::write(out_dir.join("manifest.txt"), text)?;
    Ok(())
}
