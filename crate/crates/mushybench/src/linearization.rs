//! The piecewise-constant diffusivity linearization: α_s and α_l follow
//! directly from the properties, while the mushy α_sl is the root of
//! λ(T_s; α_sl) = λ0, scanned for sign changes and then bisected. The module
//! also carries the independent Runge-Kutta integrator for the fraction ODE
//! that serves as the oracle for the closed form.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::material::{LiquidFractionModel, MaterialError, MaterialProperties};

#[derive(Debug, Error)]
pub enum LinearizationError {
    #[error(transparent)]
    Material(#[from] MaterialError),

    #[error(
        "no sign change of λ(T_s; α) − λ0 across [{lo:.3e}, {hi:.3e}] m²/s \
         ({n} scan points); the scan table is attached for diagnosis"
    )]
    RootNotFound {
        lo: f64,
        hi: f64,
        n: usize,
        scan: Vec<ScanPoint>,
    },

    #[error(
        "{count} sign changes of λ(T_s; α) − λ0 found, refusing to pick one; \
         brackets: {brackets:?}"
    )]
    AmbiguousRoot {
        count: usize,
        brackets: Vec<(f64, f64)>,
    },

    #[error("residual |λ(T_s) − λ0| = {residual:.3e} exceeds {tol:.3e} after bisection")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("fraction ODE integration went non-finite at T = {t} °C")]
    NonFinite { t: f64 },

    #[error("fraction ODE integration needs at least 100 steps, got {0}")]
    TooFewSteps(usize),
}

/// Search controls for the α_sl root solve. The defaults scan six decades
/// geometrically and bisect the single bracket they find.
#[derive(Debug, Clone, Serialize)]
pub struct SearchParams {
    /// Lower end of the scanned diffusivity range, m²/s.
    pub bracket_lo: f64,
    /// Upper end of the scanned diffusivity range, m²/s.
    pub bracket_hi: f64,
    /// Number of geometric scan points across the range.
    pub scan_points: usize,
    /// Acceptable |λ(T_s; root) − λ0| at the returned root.
    pub residual_tol: f64,
    /// Bisection stops once the bracket width shrinks below this times the
    /// bracket midpoint.
    pub rel_width_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            bracket_lo: 1e-9,
            bracket_hi: 1e-4,
            scan_points: 200,
            residual_tol: 1e-10,
            rel_width_tol: 1e-12,
        }
    }
}

/// One row of the root-scan landscape.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanPoint {
    /// Candidate mushy diffusivity, m²/s.
    pub alpha: f64,
    /// λ(T_s) the closed form yields at that candidate.
    pub lambda_at_solidus: f64,
}

/// The three constant diffusivities plus the fraction model they induce.
#[derive(Debug, Clone, Serialize)]
pub struct LinearizationResult {
    /// Solid diffusivity κ_s/(ρC_s), m²/s.
    pub alpha_s: f64,
    /// Mushy diffusivity from the root solve, m²/s.
    pub alpha_sl: f64,
    /// Liquid diffusivity κ_l/(ρC_l), m²/s.
    pub alpha_l: f64,
    /// Fraction model evaluated at `alpha_sl`.
    pub model: LiquidFractionModel,
    /// |λ(T_s; alpha_sl) − λ0| at the returned root.
    pub residual: f64,
    /// The scan interval the root was bisected out of, m²/s.
    pub bracket: (f64, f64),
    /// Full scan landscape, for the diagnostics CSV.
    pub scan: Vec<ScanPoint>,
}

/// Solid and liquid diffusivities (κ_s/(ρC_s), κ_l/(ρC_l)).
pub fn phase_diffusivities(props: &MaterialProperties) -> (f64, f64) {
    (
        props.kappa_s / (props.rho * props.c_s),
        props.kappa_l / (props.rho * props.c_l),
    )
}

/// The closed-form coefficients (a, b, p) of the fraction ODE
/// [1 + pT]·dλ/dT + aλ + b = 0 at the given mushy diffusivity.
pub fn ode_coefficients(props: &MaterialProperties, alpha_sl: f64) -> (f64, f64, f64) {
    assert!(
        alpha_sl.is_finite() && alpha_sl > 0.0,
        "mushy diffusivity must be positive, got {alpha_sl}"
    );
    let denom = alpha_sl * props.rho * props.latent_heat;
    let a = (alpha_sl * props.rho * (props.c_l - props.c_s) - (props.kappa_l - props.kappa_s))
        / denom;
    let b = (alpha_sl * props.rho * props.c_s - props.kappa_s) / denom;
    let p = (props.c_l - props.c_s) / props.latent_heat;
    (a, b, p)
}

/// Builds the fraction model induced by a candidate mushy diffusivity.
pub fn fraction_model(
    props: &MaterialProperties,
    alpha_sl: f64,
) -> Result<LiquidFractionModel, MaterialError> {
    let (a, b, p) = ode_coefficients(props, alpha_sl);
    LiquidFractionModel::new(a, b, p, props.t_sol, props.t_liq, props.lambda0)
}

/// λ(T_s; α) − λ0, the function whose root defines the mushy diffusivity.
fn solidus_mismatch(props: &MaterialProperties, alpha: f64) -> Result<f64, MaterialError> {
    let model = fraction_model(props, alpha)?;
    Ok(model.eval_raw(props.t_sol)? - props.lambda0)
}

/// Finds α_sl with |λ(T_s; α_sl) − λ0| ≤ tolerance. Scans the configured
/// range geometrically for sign changes; zero sign changes and more than one
/// are both reported as errors rather than guessed around. Deterministic for
/// fixed inputs.
pub fn solve_mushy_diffusivity(
    props: &MaterialProperties,
    search: &SearchParams,
) -> Result<LinearizationResult, LinearizationError> {
    let (alpha_s, alpha_l) = phase_diffusivities(props);
    let n = search.scan_points.max(2);
    let ratio = (search.bracket_hi / search.bracket_lo).powf(1.0 / (n as f64 - 1.0));

    let mut scan = Vec::with_capacity(n);
    for i in 0..n {
        // Exact endpoints; geometric spacing in between.
        let alpha = if i == n - 1 {
            search.bracket_hi
        } else {
            search.bracket_lo * ratio.powi(i as i32)
        };
        let mismatch = solidus_mismatch(props, alpha)?;
        scan.push(ScanPoint {
            alpha,
            lambda_at_solidus: mismatch + props.lambda0,
        });
    }

    let mut brackets = Vec::new();
    for w in scan.windows(2) {
        let g0 = w[0].lambda_at_solidus - props.lambda0;
        let g1 = w[1].lambda_at_solidus - props.lambda0;
        if g0 == 0.0 {
            brackets.push((w[0].alpha, w[0].alpha));
        } else if g0 * g1 < 0.0 {
            brackets.push((w[0].alpha, w[1].alpha));
        }
    }
    if let Some(last) = scan.last() {
        if last.lambda_at_solidus - props.lambda0 == 0.0 {
            brackets.push((last.alpha, last.alpha));
        }
    }

    match brackets.len() {
        0 => {
            return Err(LinearizationError::RootNotFound {
                lo: search.bracket_lo,
                hi: search.bracket_hi,
                n,
                scan,
            });
        }
        1 => {}
        count => {
            return Err(LinearizationError::AmbiguousRoot { count, brackets });
        }
    }

    let bracket = brackets[0];
    let (mut lo, mut hi) = bracket;
    let mut g_lo = solidus_mismatch(props, lo)?;
    if g_lo != 0.0 {
        while hi - lo > search.rel_width_tol * 0.5 * (lo + hi) {
            let mid = 0.5 * (lo + hi);
            let g_mid = solidus_mismatch(props, mid)?;
            if g_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if g_lo * g_mid < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                g_lo = g_mid;
            }
        }
    }
    let root = 0.5 * (lo + hi);

    let residual = solidus_mismatch(props, root)?.abs();
    if residual > search.residual_tol {
        return Err(LinearizationError::ResidualTooLarge {
            residual,
            tol: search.residual_tol,
        });
    }
    let model = fraction_model(props, root)?;
    Ok(LinearizationResult {
        alpha_s,
        alpha_sl: root,
        alpha_l,
        model,
        residual,
        bracket,
        scan,
    })
}

/// Classical fourth-order Runge-Kutta march of the fraction ODE from
/// (T_l, 1) down to T_s with a uniform step. Returns the full (T, λ) table;
/// the independent oracle for the closed form.
pub fn integrate_fraction_ode(
    props: &MaterialProperties,
    alpha_sl: f64,
    n_steps: usize,
) -> Result<Vec<(f64, f64)>, LinearizationError> {
    if n_steps < 100 {
        return Err(LinearizationError::TooFewSteps(n_steps));
    }
    let (a, b, p) = ode_coefficients(props, alpha_sl);
    // Same validity checks the closed form gets.
    LiquidFractionModel::new(a, b, p, props.t_sol, props.t_liq, props.lambda0)?;

    let slope = |t: f64, lambda: f64| -(a * lambda + b) / (1.0 + p * t);
    let t_from = props.t_liq;
    let t_to = props.t_sol;
    let h = (t_to - t_from) / n_steps as f64;

    let mut table = Vec::with_capacity(n_steps + 1);
    let mut lambda = 1.0_f64;
    table.push((t_from, lambda));
    for k in 0..n_steps {
        // Endpoint-exact abscissas so the last row lands on T_s precisely.
        let t_k = t_from + (t_to - t_from) * (k as f64 / n_steps as f64);
        let k1 = slope(t_k, lambda);
        let k2 = slope(t_k + 0.5 * h, lambda + 0.5 * h * k1);
        let k3 = slope(t_k + 0.5 * h, lambda + 0.5 * h * k2);
        let k4 = slope(t_k + h, lambda + h * k3);
        lambda += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t_next = t_from + (t_to - t_from) * ((k + 1) as f64 / n_steps as f64);
        if !lambda.is_finite() {
            return Err(LinearizationError::NonFinite { t: t_next });
        }
        table.push((t_next, lambda));
    }
    Ok(table)
}

/// Writes the root-scan landscape as CSV (`alpha_candidate,lambda_at_Ts`).
pub fn write_scan_csv<W: Write>(scan: &[ScanPoint], out: &mut W) -> io::Result<()> {
    writeln!(out, "alpha_candidate,lambda_at_Ts")?;
    for pt in scan {
        writeln!(out, "{},{}", pt.alpha, pt.lambda_at_solidus)?;
    }
    Ok(())
}
