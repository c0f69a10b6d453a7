//! Benchmark orchestration: runs linearization, the exact solution, and the
//! finite-difference scheme on one scenario, then computes the front-position
//! and temperature-profile error metrics, the refinement (convergence) table,
//! and the liquid-fraction comparison curve, and writes all figure data as
//! CSV plus a summary JSON.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::fdm::{self, FdmError, FrontTrace, GridSpec, ProfileSample, RunOutput};
use crate::linearization::{LinearizationError, SearchParams, solve_mushy_diffusivity};
use crate::material::{self, LiquidFractionModel, MaterialError, MaterialProperties};
use crate::similarity::{ExactSolution, SimilarityError, StefanRoots};

/// Early-time rows (t below this many time steps) are reported in the CSVs
/// but excluded from summary statistics: the numeric front needs several
/// steps to form.
pub const EARLY_TIME_STEPS: f64 = 10.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Linearization(#[from] LinearizationError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Fdm(#[from] FdmError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("front trace is empty; nothing to compare")]
    EmptyTrace,
    #[error("convergence study needs at least one level, got {0}")]
    BadLevelCount(usize),
    #[error("no profile was captured at t = {t} s; add it to sample_times")]
    MissingProfile { t: f64 },
    #[error("front not found at t = {t} s on refinement level {level}")]
    FrontLost { t: f64, level: usize },
}

/// Pass/fail thresholds for a comparison run. These are regression knobs for
/// the command-line gate, looser than the property-based acceptance bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Maximum allowed |ε_x| in percent, over both fronts, past the early-time cutoff.
    pub max_front_error_pct: f64,
    /// Maximum allowed |ε_T| in percent over all sampled profiles.
    pub max_temp_error_pct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            max_front_error_pct: 5.0,
            max_temp_error_pct: 2.5,
        }
    }
}

/// One full benchmark configuration: material, boundary temperatures, grid,
/// thresholds, and where the report files go.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub props: MaterialProperties,
    pub t_out: f64,
    pub t_init: f64,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
}

/// One front-error row: percentage errors for whichever fronts were located.
#[derive(Debug, Clone, Copy)]
pub struct FrontErrorRow {
    pub t: f64,
    pub eps_xs_pct: Option<f64>,
    pub eps_xl_pct: Option<f64>,
}

/// Percentage front-position errors over a trace, with skip accounting:
/// emitted rows plus skips reconcile exactly with the trace length.
#[derive(Debug, Clone)]
pub struct FrontErrorSeries {
    pub rows: Vec<FrontErrorRow>,
    /// Trace entries skipped because X_exact = 0 there (t = 0).
    pub skipped_zero_time: usize,
    /// Entries (past t=0) where the solidus was not located.
    pub skipped_not_found_s: usize,
    /// Entries (past t=0) where the liquidus was not located.
    pub skipped_not_found_l: usize,
    pub trace_len: usize,
}

/// Max/mean of |ε| over the rows included in summary statistics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesStats {
    pub max_abs_pct: f64,
    pub mean_abs_pct: f64,
    pub count: usize,
}

fn stats_of(values: impl Iterator<Item = f64>) -> SeriesStats {
    let mut max_abs = 0.0_f64;
    let mut sum_abs = 0.0_f64;
    let mut count = 0usize;
    for v in values {
        max_abs = max_abs.max(v.abs());
        sum_abs += v.abs();
        count += 1;
    }
    SeriesStats {
        max_abs_pct: max_abs,
        mean_abs_pct: if count > 0 { sum_abs / count as f64 } else { 0.0 },
        count,
    }
}

/// Front-position percentage errors ε_x = (X_num − X_exact)/X_exact · 100%
/// for every trace entry; t = 0 entries (X_exact = 0) and not-found fronts
/// are skipped and counted.
pub fn front_error_series(
    trace: &FrontTrace,
    roots: &StefanRoots,
) -> Result<FrontErrorSeries, HarnessError> {
    if trace.samples.is_empty() {
        return Err(HarnessError::EmptyTrace);
    }
    let mut series = FrontErrorSeries {
        rows: Vec::new(),
        skipped_zero_time: 0,
        skipped_not_found_s: 0,
        skipped_not_found_l: 0,
        trace_len: trace.samples.len(),
    };
    for s in &trace.samples {
        if s.t <= 0.0 {
            series.skipped_zero_time += 1;
            continue;
        }
        let (x_s_exact, x_l_exact) = roots.front_position(s.t)?;
        let eps = |num: Option<fdm::FrontHit>, exact: f64, skipped: &mut usize| match num {
            Some(hit) => Some((hit.x - exact) / exact * 100.0),
            None => {
                *skipped += 1;
                None
            }
        };
        let eps_xs_pct = eps(s.x_s, x_s_exact, &mut series.skipped_not_found_s);
        let eps_xl_pct = eps(s.x_l, x_l_exact, &mut series.skipped_not_found_l);
        series.rows.push(FrontErrorRow {
            t: s.t,
            eps_xs_pct,
            eps_xl_pct,
        });
    }
    Ok(series)
}

/// One temperature-error row at a node.
#[derive(Debug, Clone, Copy)]
pub struct TempErrorRow {
    pub x: f64,
    pub eps_t_pct: f64,
}

/// Per-node percentage temperature errors for one captured profile.
#[derive(Debug, Clone)]
pub struct TempErrorProfile {
    pub requested_t: f64,
    pub actual_t: f64,
    pub rows: Vec<TempErrorRow>,
}

/// ε_T = (T_num − T_exact)/T_exact · 100% at every node of a captured
/// profile, with the exact field evaluated at the profile's actual step time.
pub fn temperature_error_profile(
    profile: &ProfileSample,
    sol: &ExactSolution,
    grid: &GridSpec,
) -> Result<TempErrorProfile, HarnessError> {
    let mut rows = Vec::with_capacity(profile.temps.len());
    for (i, &t_num) in profile.temps.iter().enumerate() {
        let x = grid.x(i);
        let t_exact = sol.temperature_at(x, profile.actual_t)?;
        rows.push(TempErrorRow {
            x,
            eps_t_pct: (t_num - t_exact) / t_exact * 100.0,
        });
    }
    Ok(TempErrorProfile {
        requested_t: profile.requested_t,
        actual_t: profile.actual_t,
        rows,
    })
}

/// The assembled comparison: error series, per-profile errors, and the
/// summary statistics computed past the early-time cutoff.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub front_errors: FrontErrorSeries,
    pub temp_errors: Vec<TempErrorProfile>,
    /// Rows with t below this are excluded from the summary statistics.
    pub early_time_cutoff_s: f64,
    pub solidus_stats: SeriesStats,
    pub liquidus_stats: SeriesStats,
    /// (requested sample time, stats) per captured profile past the cutoff.
    pub temp_stats: Vec<(f64, SeriesStats)>,
    /// Start of the pass/fail gate window: the front needs the first tenth
    /// of the run to resolve itself on the grid (it spans only a cell or
    /// two early on), so the gate judges t ≥ max(t_end/10, cutoff) only.
    pub gate_window_start_s: f64,
    pub solidus_gate_stats: SeriesStats,
    pub liquidus_gate_stats: SeriesStats,
}

/// Builds the comparison report from a finished run.
pub fn build_report(
    output: &RunOutput,
    sol: &ExactSolution,
    grid: &GridSpec,
) -> Result<ComparisonReport, HarnessError> {
    let front_errors = front_error_series(&output.trace, &sol.roots)?;
    let cutoff = EARLY_TIME_STEPS * grid.tau;
    let solidus_stats = stats_of(
        front_errors
            .rows
            .iter()
            .filter(|r| r.t >= cutoff)
            .filter_map(|r| r.eps_xs_pct),
    );
    let liquidus_stats = stats_of(
        front_errors
            .rows
            .iter()
            .filter(|r| r.t >= cutoff)
            .filter_map(|r| r.eps_xl_pct),
    );
    let gate_start = (grid.t_end / 10.0).max(cutoff);
    let solidus_gate_stats = stats_of(
        front_errors
            .rows
            .iter()
            .filter(|r| r.t >= gate_start)
            .filter_map(|r| r.eps_xs_pct),
    );
    let liquidus_gate_stats = stats_of(
        front_errors
            .rows
            .iter()
            .filter(|r| r.t >= gate_start)
            .filter_map(|r| r.eps_xl_pct),
    );
    let mut temp_errors = Vec::new();
    let mut temp_stats = Vec::new();
    for profile in &output.profiles {
        if profile.actual_t <= 0.0 {
            continue;
        }
        let errors = temperature_error_profile(profile, sol, grid)?;
        if profile.actual_t >= cutoff {
            temp_stats.push((
                profile.requested_t,
                stats_of(errors.rows.iter().map(|r| r.eps_t_pct)),
            ));
        }
        temp_errors.push(errors);
    }
    Ok(ComparisonReport {
        front_errors,
        temp_errors,
        early_time_cutoff_s: cutoff,
        solidus_stats,
        liquidus_stats,
        temp_stats,
        gate_window_start_s: gate_start,
        solidus_gate_stats,
        liquidus_gate_stats,
    })
}

/// Everything one benchmark run produces.
#[derive(Debug, Clone)]
pub struct BenchmarkArtifacts {
    pub sol: ExactSolution,
    pub output: RunOutput,
    pub report: ComparisonReport,
}

/// Runs the full pipeline on a scenario: linearize, assemble the exact
/// solution, march the scheme, and compare.
pub fn run_benchmark(scenario: &Scenario) -> Result<BenchmarkArtifacts, HarnessError> {
    let lin = solve_mushy_diffusivity(&scenario.props, &SearchParams::default())?;
    let sol = ExactSolution::assemble(&scenario.props, lin, scenario.t_out, scenario.t_init)?;
    let output = fdm::run(
        &scenario.props,
        &sol.lin.model,
        &scenario.grid,
        scenario.t_out,
        scenario.t_init,
    )?;
    let report = build_report(&output, &sol, &scenario.grid)?;
    Ok(BenchmarkArtifacts {
        sol,
        output,
        report,
    })
}

/// One row of the refinement table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h_m: f64,
    pub tau_s: f64,
    /// max(|ε_x solidus|, |ε_x liquidus|) at t_end, percent.
    pub max_abs_eps_x_pct: f64,
    /// max |ε_T| over the t_end profile, percent.
    pub max_abs_eps_t_pct: f64,
}

/// Halves h and τ together per level (level 0 = the scenario grid) and
/// tabulates the end-time front and temperature errors at each level.
pub fn convergence_study(
    scenario: &Scenario,
    levels: usize,
) -> Result<Vec<ConvergenceRow>, HarnessError> {
    if levels == 0 {
        return Err(HarnessError::BadLevelCount(levels));
    }
    let lin = solve_mushy_diffusivity(&scenario.props, &SearchParams::default())?;
    let sol = ExactSolution::assemble(&scenario.props, lin, scenario.t_out, scenario.t_init)?;
    let mut rows = Vec::with_capacity(levels);
    for level in 0..levels {
        let factor = 1usize << level;
        let grid = GridSpec::new(
            scenario.grid.d,
            scenario.grid.n * factor,
            scenario.grid.tau / factor as f64,
            scenario.grid.t_end,
            vec![scenario.grid.t_end],
        )?;
        let output = fdm::run(
            &scenario.props,
            &sol.lin.model,
            &grid,
            scenario.t_out,
            scenario.t_init,
        )?;
        let last = output
            .trace
            .samples
            .last()
            .ok_or(HarnessError::EmptyTrace)?;
        let (x_s_exact, x_l_exact) = sol.roots.front_position(last.t)?;
        let eps_s = last
            .x_s
            .map(|h| (h.x - x_s_exact) / x_s_exact * 100.0)
            .ok_or(HarnessError::FrontLost { t: last.t, level })?;
        let eps_l = last
            .x_l
            .map(|h| (h.x - x_l_exact) / x_l_exact * 100.0)
            .ok_or(HarnessError::FrontLost { t: last.t, level })?;
        let profile = output
            .profiles
            .first()
            .ok_or(HarnessError::MissingProfile {
                t: scenario.grid.t_end,
            })?;
        let temp = temperature_error_profile(profile, &sol, &grid)?;
        let max_t = temp
            .rows
            .iter()
            .map(|r| r.eps_t_pct.abs())
            .fold(0.0_f64, f64::max);
        rows.push(ConvergenceRow {
            level,
            h_m: grid.h(),
            tau_s: grid.tau,
            max_abs_eps_x_pct: eps_s.abs().max(eps_l.abs()),
            max_abs_eps_t_pct: max_t,
        });
    }
    Ok(rows)
}

/// Writes the liquid-fraction comparison curve: 200 uniformly spaced mushy
/// temperatures with the analytical fraction, the published closed reference
/// curve (needs T_m), and the power-law curve at n = 1.5.
pub fn fraction_curve_export<W: Write>(
    props: &MaterialProperties,
    model: &LiquidFractionModel,
    out: &mut W,
) -> Result<(), HarnessError> {
    writeln!(out, "T_C,lambda_analytical,lambda_t,lambda_n1_5")?;
    const POINTS: usize = 200;
    for i in 0..POINTS {
        let frac = i as f64 / (POINTS - 1) as f64;
        let temp = props.t_sol + (props.t_liq - props.t_sol) * frac;
        let lambda = material::liquid_fraction(model, temp)?;
        let lambda_t = material::reference_fraction_vt(props, temp)?;
        let lambda_n = material::reference_fraction_power(props, temp, 1.5)?;
        writeln!(out, "{temp},{lambda},{lambda_t},{lambda_n}")?;
    }
    Ok(())
}

/// Writes front_errors.csv: t_s, eps_xs_pct, eps_xl_pct (empty where skipped).
pub fn write_front_errors_csv<W: Write>(
    series: &FrontErrorSeries,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "t_s,eps_xs_pct,eps_xl_pct")?;
    for row in &series.rows {
        let fmt = |v: Option<f64>| v.map(|e| e.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{}",
            row.t,
            fmt(row.eps_xs_pct),
            fmt(row.eps_xl_pct)
        )?;
    }
    Ok(())
}

/// Writes one temp_errors_t{label}s.csv body: x_m, eps_T_pct.
pub fn write_temp_errors_csv<W: Write>(profile: &TempErrorProfile, out: &mut W) -> io::Result<()> {
    writeln!(out, "x_m,eps_T_pct")?;
    for row in &profile.rows {
        writeln!(out, "{},{}", row.x, row.eps_t_pct)?;
    }
    Ok(())
}

/// Writes convergence.csv.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "level,h_m,tau_s,max_abs_eps_x_pct,max_abs_eps_t_pct")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.level, r.h_m, r.tau_s, r.max_abs_eps_x_pct, r.max_abs_eps_t_pct
        )?;
    }
    Ok(())
}

/// Time label used in per-time filenames: zero-padded to width 5 with one
/// decimal, e.g. 20 s -> "020.0".
pub fn time_label(t: f64) -> String {
    format!("{t:05.1}")
}

#[derive(Debug, Serialize)]
struct SummaryGrid {
    d_m: f64,
    n: usize,
    tau_s: f64,
    t_end_s: f64,
}

#[derive(Debug, Serialize)]
struct SummaryFront {
    max_abs_pct: f64,
    mean_abs_pct: f64,
    rows_in_stats: usize,
    rows_emitted: usize,
    skipped_not_found: usize,
}

#[derive(Debug, Serialize)]
struct SummaryTemp {
    t_s: f64,
    max_abs_pct: f64,
    mean_abs_pct: f64,
}

#[derive(Debug, Serialize)]
struct SummaryGate {
    window_start_s: f64,
    solidus_max_abs_pct: f64,
    liquidus_max_abs_pct: f64,
}

/// The summary JSON: golden numbers first, then grid, then error statistics.
#[derive(Debug, Serialize)]
struct Summary<'a> {
    note: &'static str,
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
    grid: SummaryGrid,
    early_time_cutoff_s: f64,
    tolerances: &'a Tolerances,
    solidus: SummaryFront,
    liquidus: SummaryFront,
    gate: SummaryGate,
    temperature_profiles: Vec<SummaryTemp>,
}

/// Renders the summary JSON for a finished benchmark.
pub fn summary_json(scenario: &Scenario, artifacts: &BenchmarkArtifacts) -> String {
    let report = &artifacts.report;
    let emitted_s = report
        .front_errors
        .rows
        .iter()
        .filter(|r| r.eps_xs_pct.is_some())
        .count();
    let emitted_l = report
        .front_errors
        .rows
        .iter()
        .filter(|r| r.eps_xl_pct.is_some())
        .count();
    let summary = Summary {
        note: "front-error rows with t below early_time_cutoff_s appear in \
               front_errors.csv but are excluded from these statistics",
        alpha_s_m2_per_s: artifacts.sol.lin.alpha_s,
        alpha_sl_m2_per_s: artifacts.sol.lin.alpha_sl,
        alpha_l_m2_per_s: artifacts.sol.lin.alpha_l,
        k_s_m_per_sqrt_s: artifacts.sol.roots.k_s,
        k_l_m_per_sqrt_s: artifacts.sol.roots.k_l,
        residual_s: artifacts.sol.roots.residual_s,
        residual_l: artifacts.sol.roots.residual_l,
        h_out_j_per_m3: artifacts.sol.bounds.h_out,
        h_init_j_per_m3: artifacts.sol.bounds.h_init,
        h_sol_j_per_m3: artifacts.sol.bounds.h_sol,
        h_liq_j_per_m3: artifacts.sol.bounds.h_liq,
        grid: SummaryGrid {
            d_m: scenario.grid.d,
            n: scenario.grid.n,
            tau_s: scenario.grid.tau,
            t_end_s: scenario.grid.t_end,
        },
        early_time_cutoff_s: report.early_time_cutoff_s,
        tolerances: &scenario.tolerances,
        solidus: SummaryFront {
            max_abs_pct: report.solidus_stats.max_abs_pct,
            mean_abs_pct: report.solidus_stats.mean_abs_pct,
            rows_in_stats: report.solidus_stats.count,
            rows_emitted: emitted_s,
            skipped_not_found: report.front_errors.skipped_not_found_s,
        },
        liquidus: SummaryFront {
            max_abs_pct: report.liquidus_stats.max_abs_pct,
            mean_abs_pct: report.liquidus_stats.mean_abs_pct,
            rows_in_stats: report.liquidus_stats.count,
            rows_emitted: emitted_l,
            skipped_not_found: report.front_errors.skipped_not_found_l,
        },
        gate: SummaryGate {
            window_start_s: report.gate_window_start_s,
            solidus_max_abs_pct: report.solidus_gate_stats.max_abs_pct,
            liquidus_max_abs_pct: report.liquidus_gate_stats.max_abs_pct,
        },
        temperature_profiles: report
            .temp_stats
            .iter()
            .map(|&(t_s, s)| SummaryTemp {
                t_s,
                max_abs_pct: s.max_abs_pct,
                mean_abs_pct: s.mean_abs_pct,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serialization");
    text.push('\n');
    text
}

/// Whether a report passes the scenario's thresholds: front errors are
/// judged over the gate window, temperature errors over every sampled
/// profile past the early-time cutoff.
pub fn report_passes(report: &ComparisonReport, tolerances: &Tolerances) -> bool {
    let front_ok = report.solidus_gate_stats.max_abs_pct <= tolerances.max_front_error_pct
        && report.liquidus_gate_stats.max_abs_pct <= tolerances.max_front_error_pct;
    let temp_ok = report
        .temp_stats
        .iter()
        .all(|(_, s)| s.max_abs_pct <= tolerances.max_temp_error_pct);
    front_ok && temp_ok
}

/// Writes the full report-file set into `dir` and returns the paths written:
/// front_errors.csv, one temp_errors file per sampled profile,
/// convergence.csv, fraction_curve.csv, and summary.json.
pub fn write_report_files(
    scenario: &Scenario,
    artifacts: &BenchmarkArtifacts,
    convergence: &[ConvergenceRow],
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let save = |name: String, bytes: Vec<u8>| -> io::Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        Ok(path)
    };

    let mut buf = Vec::new();
    write_front_errors_csv(&artifacts.report.front_errors, &mut buf)?;
    written.push(save("front_errors.csv".into(), buf)?);

    for profile in &artifacts.report.temp_errors {
        let mut buf = Vec::new();
        write_temp_errors_csv(profile, &mut buf)?;
        written.push(save(
            format!("temp_errors_t{}s.csv", time_label(profile.requested_t)),
            buf,
        )?);
    }

    let mut buf = Vec::new();
    write_convergence_csv(convergence, &mut buf)?;
    written.push(save("convergence.csv".into(), buf)?);

    let mut buf = Vec::new();
    fraction_curve_export(&scenario.props, &artifacts.sol.lin.model, &mut buf)?;
    written.push(save("fraction_curve.csv".into(), buf)?);

    written.push(save(
        "summary.json".into(),
        summary_json(scenario, artifacts).into_bytes(),
    )?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdm::{FrontHit, FrontSample};

    fn vt3_1_sol() -> ExactSolution {
        let props = MaterialProperties::vt3_1();
        let lin = solve_mushy_diffusivity(&props, &SearchParams::default()).unwrap();
        ExactSolution::assemble(&props, lin, 800.0, 1650.0).unwrap()
    }

    fn small_scenario() -> Scenario {
        Scenario {
            props: MaterialProperties::vt3_1(),
            t_out: 800.0,
            t_init: 1650.0,
            grid: GridSpec::new(0.1, 100, 0.5, 20.0, vec![10.0, 20.0]).unwrap(),
            tolerances: Tolerances::default(),
            out_dir: PathBuf::from("."),
        }
    }

    fn exact_trace(roots: &StefanRoots, times: &[f64]) -> FrontTrace {
        let mut trace = FrontTrace::default();
        for &t in times {
            let (x_s, x_l) = roots.front_position(t).unwrap();
            trace.samples.push(FrontSample {
                t,
                x_s: Some(FrontHit {
                    x: x_s,
                    degenerate: false,
                }),
                x_l: Some(FrontHit {
                    x: x_l,
                    degenerate: false,
                }),
            });
        }
        trace
    }

    #[test]
    fn exact_trace_gives_zero_errors() {
        let sol = vt3_1_sol();
        let trace = exact_trace(&sol.roots, &[1.0, 10.0, 100.0]);
        let series = front_error_series(&trace, &sol.roots).unwrap();
        for row in &series.rows {
            assert_eq!(row.eps_xs_pct, Some(0.0));
            assert_eq!(row.eps_xl_pct, Some(0.0));
        }
    }

    #[test]
    fn uniform_offset_gives_uniform_percentage() {
        let sol = vt3_1_sol();
        let mut trace = exact_trace(&sol.roots, &[1.0, 10.0, 100.0]);
        for s in trace.samples.iter_mut() {
            s.x_s = s.x_s.map(|h| FrontHit {
                x: 1.01 * h.x,
                ..h
            });
        }
        let series = front_error_series(&trace, &sol.roots).unwrap();
        for row in &series.rows {
            let eps = row.eps_xs_pct.unwrap();
            assert!(
                (eps - 1.0).abs() < 1e-9,
                "X_num = 1.01 X_exact must give +1%, got {eps}"
            );
        }
    }

    #[test]
    fn error_metric_symmetry() {
        let sol = vt3_1_sol();
        let (x_s, _) = sol.roots.front_position(25.0).unwrap();
        let delta = 1e-4;
        let row_for = |x: f64| {
            let mut trace = FrontTrace::default();
            trace.samples.push(FrontSample {
                t: 25.0,
                x_s: Some(FrontHit {
                    x,
                    degenerate: false,
                }),
                x_l: None,
            });
            front_error_series(&trace, &sol.roots).unwrap().rows[0]
                .eps_xs_pct
                .unwrap()
        };
        let plus = row_for(x_s + delta);
        let minus = row_for(x_s - delta);
        assert_eq!(plus, -minus, "negating the offset must negate ε exactly");
    }

    #[test]
    fn skip_accounting_reconciles() {
        let sol = vt3_1_sol();
        let mut trace = exact_trace(&sol.roots, &[0.0, 1.0, 2.0, 3.0, 4.0]);
        trace.samples[2].x_s = None;
        trace.samples[3].x_l = None;
        let series = front_error_series(&trace, &sol.roots).unwrap();
        assert_eq!(series.skipped_zero_time, 1);
        assert_eq!(series.skipped_not_found_s, 1);
        assert_eq!(series.skipped_not_found_l, 1);
        let emitted_s = series.rows.iter().filter(|r| r.eps_xs_pct.is_some()).count();
        let emitted_l = series.rows.iter().filter(|r| r.eps_xl_pct.is_some()).count();
        assert_eq!(
            emitted_s + series.skipped_not_found_s + series.skipped_zero_time,
            series.trace_len
        );
        assert_eq!(
            emitted_l + series.skipped_not_found_l + series.skipped_zero_time,
            series.trace_len
        );
    }

    #[test]
    fn empty_trace_is_an_error() {
        let sol = vt3_1_sol();
        let trace = FrontTrace::default();
        assert!(matches!(
            front_error_series(&trace, &sol.roots),
            Err(HarnessError::EmptyTrace)
        ));
    }

    #[test]
    fn exact_profile_gives_zero_temperature_errors() {
        let sol = vt3_1_sol();
        let grid = GridSpec::new(0.1, 50, 0.5, 20.0, vec![]).unwrap();
        let temps: Vec<f64> = (0..=50)
            .map(|i| sol.temperature_at(grid.x(i), 20.0).unwrap())
            .collect();
        let profile = ProfileSample {
            requested_t: 20.0,
            actual_t: 20.0,
            temps,
        };
        let errors = temperature_error_profile(&profile, &sol, &grid).unwrap();
        for row in &errors.rows {
            assert_eq!(row.eps_t_pct, 0.0, "x = {}", row.x);
        }
    }

    #[test]
    fn one_kelvin_offset_gives_definitional_percentage() {
        let sol = vt3_1_sol();
        let grid = GridSpec::new(0.1, 20, 0.5, 20.0, vec![]).unwrap();
        let exact: Vec<f64> = (0..=20)
            .map(|i| sol.temperature_at(grid.x(i), 20.0).unwrap())
            .collect();
        let profile = ProfileSample {
            requested_t: 20.0,
            actual_t: 20.0,
            temps: exact.iter().map(|t| t + 1.0).collect(),
        };
        let errors = temperature_error_profile(&profile, &sol, &grid).unwrap();
        for (row, t_exact) in errors.rows.iter().zip(&exact) {
            let expected = 100.0 / t_exact;
            assert!(
                (row.eps_t_pct - expected).abs() < 1e-9,
                "+1 K at T = {t_exact} must give {expected}%, got {}",
                row.eps_t_pct
            );
        }
    }

    #[test]
    fn fraction_curve_has_200_rows_and_correct_endpoints() {
        let props = MaterialProperties::vt3_1();
        let lin = solve_mushy_diffusivity(&props, &SearchParams::default()).unwrap();
        let mut buf = Vec::new();
        fraction_curve_export(&props, &lin.model, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "T_C,lambda_analytical,lambda_t,lambda_n1_5");
        assert_eq!(lines.len(), 201);
        let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first[0], 1550.0);
        assert!(first[1].abs() < 1e-9, "λ(T_s) ~ 0, got {}", first[1]);
        assert_eq!(first[2], 0.0);
        assert_eq!(first[3], 0.0);
        let last: Vec<f64> = lines[200].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(last[0], 1620.0);
        assert_eq!(last[1], 1.0);
        assert_eq!(last[2], 1.0);
        assert_eq!(last[3], 1.0);
    }

    #[test]
    fn power_fraction_with_unit_exponent_is_linear() {
        let props = MaterialProperties::vt3_1();
        for i in 0..=10 {
            let temp = 1550.0 + 70.0 * f64::from(i) / 10.0;
            let lambda = material::reference_fraction_power(&props, temp, 1.0).unwrap();
            let linear = (temp - 1550.0) / 70.0;
            assert!(
                (lambda - linear).abs() < 1e-12,
                "n = 1 power fraction must be linear in T"
            );
        }
    }

    #[test]
    fn benchmark_report_on_small_scenario() {
        let scenario = small_scenario();
        let artifacts = run_benchmark(&scenario).unwrap();
        let report = &artifacts.report;
        assert_eq!(report.front_errors.trace_len, 41);
        assert_eq!(report.temp_errors.len(), 2);
        assert!(report.solidus_stats.count > 0);
        assert!(report.solidus_stats.max_abs_pct.is_finite());
        // Cutoff excludes the first 10 steps (5 s at τ=0.5).
        assert_eq!(report.early_time_cutoff_s, 5.0);
        for row in &report.front_errors.rows {
            if let Some(e) = row.eps_xs_pct {
                assert!(e.is_finite());
            }
        }
        let json = summary_json(&scenario, &artifacts);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(parsed["alpha_sl_m2_per_s"].as_f64().unwrap() > 0.0);
        assert!(parsed["solidus"]["max_abs_pct"].as_f64().unwrap().is_finite());
    }

    #[test]
    fn convergence_study_shape_and_level_geometry() {
        let mut scenario = small_scenario();
        scenario.grid = GridSpec::new(0.1, 50, 1.0, 10.0, vec![]).unwrap();
        assert!(matches!(
            convergence_study(&scenario, 0),
            Err(HarnessError::BadLevelCount(0))
        ));
        let rows = convergence_study(&scenario, 2).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].h_m, 0.1 / 50.0);
        assert_eq!(rows[1].h_m, 0.1 / 100.0);
        assert_eq!(rows[1].tau_s, 0.5);
        assert!(rows[0].max_abs_eps_x_pct.is_finite());
        assert!(rows[1].max_abs_eps_t_pct.is_finite());
    }

    #[test]
    fn pipeline_outputs_are_deterministic() {
        let scenario = small_scenario();
        let render = || {
            let artifacts = run_benchmark(&scenario).unwrap();
            let mut front = Vec::new();
            write_front_errors_csv(&artifacts.report.front_errors, &mut front).unwrap();
            let mut temp = Vec::new();
            write_temp_errors_csv(&artifacts.report.temp_errors[0], &mut temp).unwrap();
            (front, temp, summary_json(&scenario, &artifacts))
        };
        let (f1, t1, s1) = render();
        let (f2, t2, s2) = render();
        assert_eq!(f1, f2, "front_errors.csv must be byte-identical");
        assert_eq!(t1, t2, "temp_errors csv must be byte-identical");
        assert_eq!(s1, s2, "summary.json must be byte-identical");
    }

    #[test]
    fn report_files_written_to_directory() {
        let scenario = small_scenario();
        let artifacts = run_benchmark(&scenario).unwrap();
        let rows = convergence_study(
            &Scenario {
                grid: GridSpec::new(0.1, 50, 1.0, 10.0, vec![]).unwrap(),
                ..scenario.clone()
            },
            1,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = write_report_files(&scenario, &artifacts, &rows, dir.path()).unwrap();
        let names: Vec<String> = written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert!(names.contains(&"front_errors.csv".to_string()));
        assert!(names.contains(&"temp_errors_t010.0s.csv".to_string()));
        assert!(names.contains(&"temp_errors_t020.0s.csv".to_string()));
        assert!(names.contains(&"convergence.csv".to_string()));
        assert!(names.contains(&"fraction_curve.csv".to_string()));
        assert!(names.contains(&"summary.json".to_string()));
        for path in &written {
            assert!(path.exists());
        }
    }

    #[test]
    fn time_labels_are_zero_padded() {
        assert_eq!(time_label(20.0), "020.0");
        assert_eq!(time_label(500.0), "500.0");
        assert_eq!(time_label(5.0), "005.0");
    }

    #[test]
    fn report_gate_honors_tolerances() {
        let scenario = small_scenario();
        let artifacts = run_benchmark(&scenario).unwrap();
        let loose = Tolerances {
            max_front_error_pct: 1e6,
            max_temp_error_pct: 1e6,
        };
        assert!(report_passes(&artifacts.report, &loose));
        let impossible = Tolerances {
            max_front_error_pct: 0.0,
            max_temp_error_pct: 0.0,
        };
        assert!(!report_passes(&artifacts.report, &impossible));
    }
}
