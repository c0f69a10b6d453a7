//! Command-line front end: linearization, exact-solution evaluation, the
//! finite-difference run, and the full benchmark comparison, with stable
//! exit codes (0 success, 1 input error, 2 solver failure, 3 comparison
//! gate failure) and no output files written on input errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mushybench::fdm::{self, GridSpec};
use mushybench::harness::{self, Scenario, Tolerances};
use mushybench::linearization::{
    LinearizationError, LinearizationResult, SearchParams, solve_mushy_diffusivity,
    write_scan_csv,
};
use mushybench::material::{LiquidFractionModel, MaterialProperties};
use mushybench::similarity::ExactSolution;

#[derive(Parser)]
#[command(
    name = "mushybench",
    version,
    about = "Mushy-zone solidification benchmark: exact similarity solution vs implicit FDM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the constant mushy diffusivity and write the scan diagnostics.
    Linearize(CommonArgs),
    /// Solve the front coefficients and write exact field profiles.
    Exact(CommonArgs),
    /// Run the implicit finite-difference scheme and write trace + profiles.
    Fdm(CommonArgs),
    /// Full benchmark: linearize + exact + fdm + comparison report.
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the material JSON file.
    #[arg(long)]
    material: PathBuf,

    /// Output directory; falls back to $MUSHYBENCH_OUT, then the working directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Chilled-boundary temperature, °C.
    #[arg(long, default_value_t = 800.0, allow_negative_numbers = true)]
    t_out: f64,

    /// Initial / far-field temperature, °C.
    #[arg(long, default_value_t = 1650.0, allow_negative_numbers = true)]
    t_init: f64,

    /// Domain length, m.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    length: f64,

    /// Node count N (nodes 0..=N).
    #[arg(long, default_value_t = 500)]
    nodes: usize,

    /// Time step, s.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    tau: f64,

    /// Final time, s.
    #[arg(long, default_value_t = 500.0, allow_negative_numbers = true)]
    t_end: f64,

    /// Comma-separated profile sample times, s (adjust when changing --t-end).
    #[arg(long, value_delimiter = ',', default_values_t = [20.0, 500.0])]
    samples: Vec<f64>,

    /// Override both comparison thresholds (percent) for the compare gate.
    #[arg(long)]
    tolerance: Option<f64>,
}

/// A failure carrying the process exit code.
struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn solver_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() {
    std::process::exit(run_cli());
}

fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    let result = match &cli.command {
        Command::Linearize(args) => cmd_linearize(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Fdm(args) => cmd_fdm(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Inputs validated up front, before anything is written.
struct Prepared {
    props: MaterialProperties,
    grid: GridSpec,
    t_out: f64,
    t_init: f64,
    out_dir: PathBuf,
    tolerances: Tolerances,
}

fn prepare(args: &CommonArgs, samples_must_be_positive: bool) -> Result<Prepared, Failure> {
    let props = MaterialProperties::from_json_file(&args.material).map_err(|e| {
        input_error(format!(
            "invalid material file {}: {e}",
            args.material.display()
        ))
    })?;
    let grid = GridSpec::new(
        args.length,
        args.nodes,
        args.tau,
        args.t_end,
        args.samples.clone(),
    )
    .map_err(|e| input_error(e.to_string()))?;
    if samples_must_be_positive {
        if let Some(&bad) = args.samples.iter().find(|&&s| s <= 0.0) {
            return Err(input_error(format!(
                "exact profiles need strictly positive sample times, got {bad}"
            )));
        }
    }
    if !(args.t_out < props.t_sol && args.t_init > props.t_liq) {
        return Err(input_error(format!(
            "boundary temperatures must satisfy T_out < T_s and T_init > T_l, got \
             T_out = {}, T_s = {}, T_l = {}, T_init = {}",
            args.t_out, props.t_sol, props.t_liq, args.t_init
        )));
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os("MUSHYBENCH_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let tolerances = match args.tolerance {
        Some(pct) if pct.is_finite() && pct >= 0.0 => Tolerances {
            max_front_error_pct: pct,
            max_temp_error_pct: pct,
        },
        Some(pct) => {
            return Err(input_error(format!(
                "--tolerance must be a non-negative percentage, got {pct}"
            )));
        }
        None => Tolerances::default(),
    };
    Ok(Prepared {
        props,
        grid,
        t_out: args.t_out,
        t_init: args.t_init,
        out_dir,
        tolerances,
    })
}

fn save(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| input_error(format!("cannot create output directory {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes)
        .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Six-significant-digit rendering for human-readable summaries.
fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}

fn eutectic_note(props: &MaterialProperties) {
    if props.lambda0 > 0.0 {
        println!(
            "note: eutectic mode (lambda0 = {}) is experimental",
            props.lambda0
        );
    }
}

#[derive(Serialize)]
struct LinearizeJson<'a> {
    alpha_s_m2_per_s: f64,
    alpha_sl_m2_per_s: f64,
    alpha_l_m2_per_s: f64,
    residual_lambda_at_solidus: f64,
    bracket_lo_m2_per_s: f64,
    bracket_hi_m2_per_s: f64,
    model: &'a LiquidFractionModel,
    eutectic_mode_experimental: bool,
}

fn render_linearization_json(props: &MaterialProperties, lin: &LinearizationResult) -> Vec<u8> {
    let json = LinearizeJson {
        alpha_s_m2_per_s: lin.alpha_s,
        alpha_sl_m2_per_s: lin.alpha_sl,
        alpha_l_m2_per_s: lin.alpha_l,
        residual_lambda_at_solidus: lin.residual,
        bracket_lo_m2_per_s: lin.bracket.0,
        bracket_hi_m2_per_s: lin.bracket.1,
        model: &lin.model,
        eutectic_mode_experimental: props.lambda0 > 0.0,
    };
    let mut text = serde_json::to_string_pretty(&json).expect("linearization serialization");
    text.push('\n');
    text.into_bytes()
}

fn linearize_or_dump(prepared: &Prepared) -> Result<LinearizationResult, Failure> {
    match solve_mushy_diffusivity(&prepared.props, &SearchParams::default()) {
        Ok(lin) => Ok(lin),
        Err(LinearizationError::RootNotFound { lo, hi, n, scan }) => {
            // Solver failure, but still dump the scan landscape for diagnosis.
            let mut buf = Vec::new();
            if write_scan_csv(&scan, &mut buf).is_ok() {
                if let Ok(path) = save(&prepared.out_dir, "linearization_scan.csv", &buf) {
                    eprintln!("scan diagnostics written to {}", path.display());
                }
            }
            Err(solver_error(format!(
                "no mushy-diffusivity root in [{lo}, {hi}] after scanning {n} points"
            )))
        }
        Err(e) => Err(solver_error(e.to_string())),
    }
}

fn cmd_linearize(args: &CommonArgs) -> Result<i32, Failure> {
    let prepared = prepare(args, false)?;
    let lin = linearize_or_dump(&prepared)?;

    save(
        &prepared.out_dir,
        "linearization.json",
        &render_linearization_json(&prepared.props, &lin),
    )?;
    let mut buf = Vec::new();
    write_scan_csv(&lin.scan, &mut buf)
        .map_err(|e| input_error(format!("cannot render scan CSV: {e}")))?;
    save(&prepared.out_dir, "linearization_scan.csv", &buf)?;

    eutectic_note(&prepared.props);
    println!("alpha_s  = {} m^2/s", sig6(lin.alpha_s));
    println!("alpha_sl = {} m^2/s", sig6(lin.alpha_sl));
    println!("alpha_l  = {} m^2/s", sig6(lin.alpha_l));
    println!("residual |lambda(T_s) - lambda0| = {}", sig6(lin.residual));
    println!(
        "wrote linearization.json, linearization_scan.csv to {}",
        prepared.out_dir.display()
    );
    Ok(0)
}

#[derive(Serialize)]
struct ExactJson {
    alpha_s_m2_per_s: f64,
    alpha_sl_m2_per_s: f64,
    alpha_l_m2_per_s: f64,
    k_s_m_per_sqrt_s: f64,
    k_l_m_per_sqrt_s: f64,
    residual_s: f64,
    residual_l: f64,
    h_out_j_per_m3: f64,
    h_init_j_per_m3: f64,
    h_sol_j_per_m3: f64,
    h_liq_j_per_m3: f64,
    t_out_c: f64,
    t_init_c: f64,
}

fn render_exact_json(sol: &ExactSolution) -> Vec<u8> {
    let json = ExactJson {
        alpha_s_m2_per_s: sol.lin.alpha_s,
        alpha_sl_m2_per_s: sol.lin.alpha_sl,
        alpha_l_m2_per_s: sol.lin.alpha_l,
        k_s_m_per_sqrt_s: sol.roots.k_s,
        k_l_m_per_sqrt_s: sol.roots.k_l,
        residual_s: sol.roots.residual_s,
        residual_l: sol.roots.residual_l,
        h_out_j_per_m3: sol.bounds.h_out,
        h_init_j_per_m3: sol.bounds.h_init,
        h_sol_j_per_m3: sol.bounds.h_sol,
        h_liq_j_per_m3: sol.bounds.h_liq,
        t_out_c: sol.t_out,
        t_init_c: sol.t_init,
    };
    let mut text = serde_json::to_string_pretty(&json).expect("exact serialization");
    text.push('\n');
    text.into_bytes()
}

fn assemble_exact(prepared: &Prepared) -> Result<ExactSolution, Failure> {
    let lin = linearize_or_dump(prepared)?;
    ExactSolution::assemble(&prepared.props, lin, prepared.t_out, prepared.t_init)
        .map_err(|e| solver_error(e.to_string()))
}

fn node_positions(grid: &GridSpec) -> Vec<f64> {
    (0..=grid.n).map(|i| grid.x(i)).collect()
}

fn cmd_exact(args: &CommonArgs) -> Result<i32, Failure> {
    let prepared = prepare(args, true)?;
    let sol = assemble_exact(&prepared)?;

    save(&prepared.out_dir, "exact.json", &render_exact_json(&sol))?;
    let xs = node_positions(&prepared.grid);
    for &t in &prepared.grid.sample_times {
        let mut buf = Vec::new();
        sol.write_profile_csv(&xs, t, &mut buf)
            .map_err(|e| solver_error(format!("profile at t = {t} s: {e}")))?;
        save(
            &prepared.out_dir,
            &format!("exact_profile_t{}s.csv", harness::time_label(t)),
            &buf,
        )?;
    }

    eutectic_note(&prepared.props);
    println!("k_s = {} m/s^0.5", sig6(sol.roots.k_s));
    println!("k_l = {} m/s^0.5", sig6(sol.roots.k_l));
    println!(
        "residuals: solidus {}, liquidus {}",
        sig6(sol.roots.residual_s),
        sig6(sol.roots.residual_l)
    );
    println!(
        "wrote exact.json and {} profile file(s) to {}",
        prepared.grid.sample_times.len(),
        prepared.out_dir.display()
    );
    Ok(0)
}

fn cmd_fdm(args: &CommonArgs) -> Result<i32, Failure> {
    let prepared = prepare(args, false)?;
    let lin = linearize_or_dump(&prepared)?;
    let output = fdm::run(
        &prepared.props,
        &lin.model,
        &prepared.grid,
        prepared.t_out,
        prepared.t_init,
    )
    .map_err(|e| solver_error(e.to_string()))?;

    let mut buf = Vec::new();
    fdm::write_trace_csv(&output.trace, &mut buf)
        .map_err(|e| input_error(format!("cannot render trace CSV: {e}")))?;
    save(&prepared.out_dir, "front_trace.csv", &buf)?;
    for profile in &output.profiles {
        let mut buf = Vec::new();
        fdm::write_profile_csv(&prepared.grid, profile, &mut buf)
            .map_err(|e| input_error(format!("cannot render profile CSV: {e}")))?;
        save(
            &prepared.out_dir,
            &format!("profile_t{}s.csv", harness::time_label(profile.requested_t)),
            &buf,
        )?;
    }

    eutectic_note(&prepared.props);
    let last = output.trace.samples.last().expect("non-empty trace");
    let show = |hit: Option<fdm::FrontHit>| {
        hit.map(|h| sig6(h.x)).unwrap_or_else(|| "not found".into())
    };
    println!(
        "t = {} s: X_s = {} m, X_l = {} m",
        last.t,
        show(last.x_s),
        show(last.x_l)
    );
    println!(
        "wrote front_trace.csv and {} profile file(s) to {}",
        output.profiles.len(),
        prepared.out_dir.display()
    );
    Ok(0)
}

/// Refinement levels the compare subcommand tabulates (base + one halving).
const COMPARE_CONVERGENCE_LEVELS: usize = 2;

fn cmd_compare(args: &CommonArgs) -> Result<i32, Failure> {
    let prepared = prepare(args, false)?;
    let scenario = Scenario {
        props: prepared.props.clone(),
        t_out: prepared.t_out,
        t_init: prepared.t_init,
        grid: prepared.grid.clone(),
        tolerances: prepared.tolerances,
        out_dir: prepared.out_dir.clone(),
    };
    let artifacts = harness::run_benchmark(&scenario).map_err(|e| solver_error(e.to_string()))?;
    let convergence = harness::convergence_study(&scenario, COMPARE_CONVERGENCE_LEVELS)
        .map_err(|e| solver_error(e.to_string()))?;

    // Pipeline-stage outputs.
    save(
        &prepared.out_dir,
        "linearization.json",
        &render_linearization_json(&prepared.props, &artifacts.sol.lin),
    )?;
    let mut buf = Vec::new();
    write_scan_csv(&artifacts.sol.lin.scan, &mut buf)
        .map_err(|e| input_error(format!("cannot render scan CSV: {e}")))?;
    save(&prepared.out_dir, "linearization_scan.csv", &buf)?;
    save(
        &prepared.out_dir,
        "exact.json",
        &render_exact_json(&artifacts.sol),
    )?;
    let mut buf = Vec::new();
    fdm::write_trace_csv(&artifacts.output.trace, &mut buf)
        .map_err(|e| input_error(format!("cannot render trace CSV: {e}")))?;
    save(&prepared.out_dir, "front_trace.csv", &buf)?;
    let xs = node_positions(&prepared.grid);
    for profile in &artifacts.output.profiles {
        let mut buf = Vec::new();
        fdm::write_profile_csv(&prepared.grid, profile, &mut buf)
            .map_err(|e| input_error(format!("cannot render profile CSV: {e}")))?;
        save(
            &prepared.out_dir,
            &format!("profile_t{}s.csv", harness::time_label(profile.requested_t)),
            &buf,
        )?;
        if profile.requested_t > 0.0 {
            let mut buf = Vec::new();
            artifacts
                .sol
                .write_profile_csv(&xs, profile.requested_t, &mut buf)
                .map_err(|e| solver_error(format!("exact profile at t = {} s: {e}", profile.requested_t)))?;
            save(
                &prepared.out_dir,
                &format!(
                    "exact_profile_t{}s.csv",
                    harness::time_label(profile.requested_t)
                ),
                &buf,
            )?;
        }
    }

    // Report files.
    harness::write_report_files(&scenario, &artifacts, &convergence, &prepared.out_dir)
        .map_err(|e| input_error(format!("cannot write report: {e}")))?;

    eutectic_note(&prepared.props);
    let report = &artifacts.report;
    println!("alpha_sl = {} m^2/s", sig6(artifacts.sol.lin.alpha_sl));
    println!(
        "k_s = {} m/s^0.5, k_l = {} m/s^0.5",
        sig6(artifacts.sol.roots.k_s),
        sig6(artifacts.sol.roots.k_l)
    );
    println!(
        "max |eps_x| (t >= {} s): solidus {} %, liquidus {} %",
        report.early_time_cutoff_s,
        sig6(report.solidus_stats.max_abs_pct),
        sig6(report.liquidus_stats.max_abs_pct)
    );
    println!(
        "max |eps_x| in gate window (t >= {} s): solidus {} %, liquidus {} %",
        report.gate_window_start_s,
        sig6(report.solidus_gate_stats.max_abs_pct),
        sig6(report.liquidus_gate_stats.max_abs_pct)
    );
    for (t, stats) in &report.temp_stats {
        println!(
            "max |eps_T| at t = {t} s: {} %",
            sig6(stats.max_abs_pct)
        );
    }
    println!("report written to {}", prepared.out_dir.display());

    let passed = harness::report_passes(report, &scenario.tolerances);
    println!(
        "comparison gate ({} % front, {} % temperature): {}",
        scenario.tolerances.max_front_error_pct,
        scenario.tolerances.max_temp_error_pct,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(if passed { 0 } else { 3 })
}
