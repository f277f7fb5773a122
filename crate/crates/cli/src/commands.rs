use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pcacal_core::io::{format_f64, read_matrix_csv, write_matrix_csv};
use pcacal_core::simulation::{
    fit_power_law, run_monte_carlo, summarize, ErrorStats, SimulationConfig, TrialOutcome,
};
use pcacal_core::{
    calibrate, feasibility, min_positions, CalibrationProblem, CalibrationResult, ReadingsMatrix,
};

use crate::args::{CalibrateArgs, CheckDesignArgs, GlobalArgs, SimArgs, SweepArgs, SweepAxis};
use crate::config::{calibration_options, resolve_simulation, simulation_manifest, FileConfig};
use crate::error::{CliError, EXIT_INFEASIBLE, EXIT_OK};

fn output_dir(global: &GlobalArgs, file: &FileConfig) -> Result<PathBuf, CliError> {
    let dir = global
        .output_dir
        .clone()
        .or_else(|| file.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| CliError::Output {
        path: dir.clone(),
        source,
    })?;
    Ok(dir)
}

fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let wrap = |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    body(&mut out).map_err(wrap)?;
    out.flush().map_err(wrap)
}

fn write_matrix(path: &Path, values: &nalgebra::DMatrix<f64>, header: &[String]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })?;
    write_matrix_csv(BufWriter::new(file), values, Some(header)).map_err(|e| match e {
        pcacal_core::Error::Io(source) => CliError::Output {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Core(other),
    })
}

fn labels(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}_{i}")).collect()
}

pub fn cmd_calibrate(global: &GlobalArgs, args: &CalibrateArgs) -> Result<i32, CliError> {
    let file = FileConfig::load_optional(global.config.as_deref())?;
    let input = args
        .input
        .clone()
        .or_else(|| file.input.clone())
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let dim = args
        .dim
        .or(file.dim)
        .ok_or_else(|| CliError::Config("--dim is required".into()))?;
    let magnitude = args.magnitude.or(file.magnitude);
    let options = calibration_options(global, &file);

    let input_err = |source| CliError::Input {
        path: input.clone(),
        source,
    };
    let reader = File::open(&input).map_err(|e| input_err(e.into()))?;
    let parsed = read_matrix_csv(reader).map_err(input_err)?;
    let readings = ReadingsMatrix::new(parsed.values).map_err(input_err)?;

    let problem = match magnitude {
        Some(c) => CalibrationProblem::new(readings, dim, c)?,
        None => CalibrationProblem::with_unknown_magnitude(readings, dim)?,
    };
    let result = calibrate(&problem, &options).inspect_err(|_| {
        let report = feasibility(problem.readings().positions(), problem.readings().sensors(), dim);
        if options.force && !report.is_feasible() {
            eprintln!("warning: proceeding with infeasible design: {report}");
        }
    })?;
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }

    let dir = output_dir(global, &file)?;
    let sensors = problem.readings().sensors();
    let positions = problem.readings().positions();
    write_matrix(&dir.join("a_hat.csv"), &result.a_hat, &labels("sensor", sensors))?;
    let position_labels = parsed.header.unwrap_or_else(|| labels("position", positions));
    write_matrix(&dir.join("v_hat.csv"), &result.v_hat, &position_labels)?;
    write_file(&dir.join("diagnostics.csv"), |out| {
        write_diagnostics(out, &result, options.clamp_gram)
    })?;

    println!(
        "calibrated {sensors} sensors from {positions} positions (d={dim}): fit residual {:.3e}, gram residual {:.3e}",
        result.fit_residual, result.gram.residual
    );
    Ok(EXIT_OK)
}

fn write_diagnostics<W: Write>(out: &mut W, result: &CalibrationResult, clamp: Option<f64>) -> std::io::Result<()> {
    writeln!(out, "name,index,value")?;
    for (i, s) in result.factors.spectrum.iter().enumerate() {
        writeln!(out, "singular_value,{},{}", i + 1, format_f64(*s))?;
    }
    for (i, l) in result.gram.eigenvalues.iter().enumerate() {
        writeln!(out, "gram_eigenvalue,{},{}", i + 1, format_f64(*l))?;
    }
    writeln!(out, "gram_residual,,{}", format_f64(result.gram.residual))?;
    writeln!(out, "fit_residual,,{}", format_f64(result.fit_residual))?;
    writeln!(out, "discarded_energy,,{}", format_f64(result.discarded_energy))?;
    writeln!(out, "magnitude,,{}", format_f64(result.magnitude))?;
    writeln!(out, "scale_unresolved,,{}", result.scale_unresolved)?;
    writeln!(out, "gram_near_singular,,{}", result.gram.near_singular)?;
    writeln!(out, "gram_clamped,,{}", result.gram.clamped)?;
    if let Some(floor) = clamp {
        writeln!(out, "clamp_gram,,{}", format_f64(floor))?;
    }
    writeln!(out, "feasible,,{}", result.feasibility.is_feasible())?;
    Ok(())
}

fn write_outcomes<W: Write>(out: &mut W, outcomes: &[TrialOutcome]) -> std::io::Result<()> {
    writeln!(out, "trial_index,epsilon,fit_residual,status")?;
    let cell = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    for o in outcomes {
        writeln!(
            out,
            "{},{},{},{}",
            o.trial_index,
            cell(o.epsilon),
            cell(o.fit_residual),
            o.status
        )?;
    }
    Ok(())
}

const STATS_HEADER: &str = "median,q1,q3,iqr,mean,success_count,failure_count";

fn stats_row(s: &ErrorStats) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        format_f64(s.median),
        format_f64(s.q1),
        format_f64(s.q3),
        format_f64(s.iqr),
        format_f64(s.mean),
        s.success_count,
        s.failure_count
    )
}

pub fn cmd_simulate(global: &GlobalArgs, args: &SimArgs) -> Result<i32, CliError> {
    let file = FileConfig::load_optional(global.config.as_deref())?;
    let config = resolve_simulation(global, args, &file)?;
    let dir = output_dir(global, &file)?;

    let manifest = simulation_manifest("simulate", &config).to_toml();
    write_file(&dir.join("manifest.toml"), |out| out.write_all(manifest.as_bytes()))?;

    let outcomes = run_monte_carlo(&config)?;
    write_file(&dir.join("outcomes.csv"), |out| write_outcomes(out, &outcomes))?;

    let stats = summarize(&outcomes)?;
    write_file(&dir.join("stats.csv"), |out| {
        writeln!(out, "{STATS_HEADER}")?;
        writeln!(out, "{}", stats_row(&stats))
    })?;

    println!(
        "{} trials (n={}, noise sigma={}): median {:.4e}, iqr {:.4e}, failures {}",
        outcomes.len(),
        config.positions,
        config.noise_sigma,
        stats.median,
        stats.iqr,
        stats.failure_count
    );
    Ok(EXIT_OK)
}

fn apply_sweep_value(base: &SimulationConfig, axis: SweepAxis, value: f64) -> Result<SimulationConfig, CliError> {
    let mut config = base.clone();
    match axis {
        SweepAxis::Positions => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(CliError::Config(format!(
                    "positions must be positive integers, got {value}"
                )));
            }
            config.positions = value as usize;
        }
        SweepAxis::NoiseSigma => config.noise_sigma = value,
    }
    config.validate()?;
    Ok(config)
}

pub fn cmd_sweep(global: &GlobalArgs, args: &SweepArgs) -> Result<i32, CliError> {
    let file = FileConfig::load_optional(global.config.as_deref())?;
    let axis = args
        .vary
        .or(file.vary)
        .ok_or_else(|| CliError::Config("--vary is required (positions or noise-sigma)".into()))?;
    let values = args
        .values
        .clone()
        .or_else(|| file.values.clone())
        .unwrap_or_default();
    if values.len() < 2 {
        return Err(CliError::Config(format!(
            "a sweep needs at least two values, got {}",
            values.len()
        )));
    }
    let base = resolve_simulation(global, &args.sim, &file)?;
    let configs = values
        .iter()
        .map(|&v| apply_sweep_value(&base, axis, v))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = output_dir(global, &file)?;

    let mut manifest = simulation_manifest("sweep", &base);
    manifest.vary = Some(axis);
    manifest.values = Some(values.clone());
    let manifest = manifest.to_toml();
    write_file(&dir.join("manifest.toml"), |out| out.write_all(manifest.as_bytes()))?;

    let mut rows = Vec::with_capacity(values.len());
    for (value, config) in values.iter().zip(&configs) {
        let stats = summarize(&run_monte_carlo(config)?)?;
        println!(
            "{}={value}: median {:.4e}, iqr {:.4e}, failures {}",
            axis.as_str(),
            stats.median,
            stats.iqr,
            stats.failure_count
        );
        rows.push((*value, stats));
    }
    write_file(&dir.join("sweep.csv"), |out| {
        writeln!(out, "value,{STATS_HEADER}")?;
        for (value, stats) in &rows {
            writeln!(out, "{},{}", format_f64(*value), stats_row(stats))?;
        }
        Ok(())
    })?;

    let medians: Vec<f64> = rows.iter().map(|(_, s)| s.median).collect();
    let fit = fit_power_law(&values, &medians)?;
    write_file(&dir.join("fit.txt"), |out| {
        writeln!(out, "vary = {}", axis.as_str())?;
        writeln!(out, "exponent = {}", format_f64(fit.exponent))?;
        writeln!(out, "prefactor = {}", format_f64(fit.prefactor))?;
        writeln!(out, "r_squared = {}", format_f64(fit.r_squared))
    })?;
    println!(
        "median ~ {:.4e} * {}^{:.4} (r^2 = {:.5})",
        fit.prefactor,
        axis.as_str(),
        fit.exponent,
        fit.r_squared
    );
    Ok(EXIT_OK)
}

pub fn cmd_check_design(args: &CheckDesignArgs) -> Result<i32, CliError> {
    if args.dim == 0 || args.sensors == 0 || args.positions == 0 {
        return Err(CliError::Config("sensors, positions and dim must be positive".into()));
    }
    let report = feasibility(args.positions, args.sensors, args.dim);
    println!("min_positions(d={}) = {}", args.dim, min_positions(args.dim));
    println!(
        "(n-d)(m-d+1) = {} vs d(d-1)/2 = {}",
        report.counting_lhs, report.counting_rhs
    );
    if report.is_feasible() {
        println!("feasible: m={}, n={}, d={}", args.sensors, args.positions, args.dim);
        Ok(EXIT_OK)
    } else {
        println!("infeasible: {report}");
        Ok(EXIT_INFEASIBLE)
    }
}
