//! The exact similarity solution: enthalpy boundary values, the two
//! transcendental interface conditions that fix the front coefficients
//! (k_s, k_l), and the closed-form fields built on them: enthalpy,
//! temperature, spatial gradient, cooling rate, front kinematics, the
//! liquidus parameters G_l and Ṫ_l, and the local solidification time.
//!
//! Everything depends on x and t only through x/√t, so the fronts move as
//! X = k√t and all fields are invariant under (x, t) → (cx, c²t).

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::linearization::LinearizationResult;
use crate::material::{self, LiquidFractionModel, MaterialError, MaterialProperties};
use crate::specfn::{erf, erfc};

/// Residuals at the returned roots must not exceed this times the magnitude
/// of the leading flux term of their interface equation.
pub const RESIDUAL_REL_TOL: f64 = 1e-9;

/// Half-width of the window around each front, relative to X_l, inside which
/// gradient-like evaluations require an explicit side.
pub const FRONT_SNAP_REL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error(transparent)]
    Material(#[from] MaterialError),

    #[error(
        "boundary temperatures must satisfy T_out < T_s and T_init > T_l, got \
         T_out = {t_out}, T_s = {t_sol}, T_l = {t_liq}, T_init = {t_init}"
    )]
    BoundaryOrdering {
        t_out: f64,
        t_sol: f64,
        t_liq: f64,
        t_init: f64,
    },

    #[error("front coefficients must satisfy 0 < k_s < k_l, got k_s = {k_s}, k_l = {k_l}")]
    InvalidCoefficients { k_s: f64, k_l: f64 },

    #[error("non-finite value in {what} at k_s = {k_s}, k_l = {k_l}")]
    NonFinite {
        what: &'static str,
        k_s: f64,
        k_l: f64,
    },

    #[error(
        "no admissible (k_s, k_l) root in (0, {k_max}] m/s^1/2; solidus residual \
         scan attached ({} points, None where the liquidus equation had no root)",
        scan.len()
    )]
    RootNotFound {
        k_max: f64,
        scan: Vec<(f64, Option<f64>)>,
    },

    #[error(
        "interface residuals ({residual_s:.3e}, {residual_l:.3e}) exceed \
         {tol:.1e} of the leading terms ({scale_s:.3e}, {scale_l:.3e})"
    )]
    ResidualTooLarge {
        residual_s: f64,
        residual_l: f64,
        scale_s: f64,
        scale_l: f64,
        tol: f64,
    },

    #[error("time {0} s must be non-negative")]
    NegativeTime(f64),

    #[error("time {0} s must be strictly positive")]
    NonPositiveTime(f64),

    #[error("position {0} m must be non-negative")]
    NegativePosition(f64),

    #[error(
        "x = {x} m sits on the {front} front at t = {t} s where the gradient is \
         one-sided; pass an explicit side"
    )]
    AtFront {
        x: f64,
        t: f64,
        front: &'static str,
    },
}

/// Enthalpies pinning the similarity solution: the chilled boundary, the far
/// field, and the two front isotherms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryEnthalpies {
    /// H(T_out) at x = 0, J/m³.
    pub h_out: f64,
    /// H(T_init) far field, J/m³.
    pub h_init: f64,
    /// H at the solidus, ρC_sT_s, J/m³.
    pub h_sol: f64,
    /// H at the liquidus, ρ(C_lT_l + L), J/m³.
    pub h_liq: f64,
}

/// Front coefficients of X = k√t and the interface residuals at the root.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StefanRoots {
    /// Solidus coefficient, m/s^½.
    pub k_s: f64,
    /// Liquidus coefficient, m/s^½.
    pub k_l: f64,
    /// Solidus interface-condition residual at the root.
    pub residual_s: f64,
    /// Liquidus interface-condition residual at the root.
    pub residual_l: f64,
}

impl StefanRoots {
    /// Front positions (X_s, X_l) = (k_s√t, k_l√t) in m.
    pub fn front_position(&self, t: f64) -> Result<(f64, f64), SimilarityError> {
        if !t.is_finite() || t < 0.0 {
            return Err(SimilarityError::NegativeTime(t));
        }
        let sqrt_t = t.sqrt();
        Ok((self.k_s * sqrt_t, self.k_l * sqrt_t))
    }

    /// Front velocities (k_s/(2√t), k_l/(2√t)) in m/s.
    pub fn front_velocity(&self, t: f64) -> Result<(f64, f64), SimilarityError> {
        if !t.is_finite() || t <= 0.0 {
            return Err(SimilarityError::NonPositiveTime(t));
        }
        let half_inv = 0.5 / t.sqrt();
        Ok((self.k_s * half_inv, self.k_l * half_inv))
    }

    /// Local solidification time (1/k_s² − 1/k_l²)·x², the interval a point
    /// at x spends between the liquidus and solidus passages.
    pub fn local_solidification_time(&self, x: f64) -> f64 {
        (1.0 / (self.k_s * self.k_s) - 1.0 / (self.k_l * self.k_l)) * x * x
    }
}

/// Which phase a sample point is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Solid,
    Mush,
    Liquid,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Solid => "solid",
            Region::Mush => "mush",
            Region::Liquid => "liquid",
        }
    }
}

/// Which one-sided limit to take when evaluating a discontinuous quantity
/// exactly on a front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Approach from smaller x.
    Left,
    /// Approach from larger x.
    Right,
}

/// Boundary enthalpies for the solidification configuration
/// T_out < T_s < T_l < T_init.
pub fn boundary_enthalpies(
    props: &MaterialProperties,
    model: &LiquidFractionModel,
    t_out: f64,
    t_init: f64,
) -> Result<BoundaryEnthalpies, SimilarityError> {
    if !(t_out < props.t_sol && t_init > props.t_liq) {
        return Err(SimilarityError::BoundaryOrdering {
            t_out,
            t_sol: props.t_sol,
            t_liq: props.t_liq,
            t_init,
        });
    }
    Ok(BoundaryEnthalpies {
        h_out: material::enthalpy(props, model, t_out)?,
        h_init: material::enthalpy(props, model, t_init)?,
        h_sol: props.rho * props.c_s * props.t_sol,
        h_liq: props.rho * (props.c_l * props.t_liq + props.latent_heat),
    })
}

/// The two-front transcendental system. Holds every constant the interface
/// conditions need, so residuals can be evaluated at arbitrary (k_s, k_l).
#[derive(Debug, Clone, Copy)]
pub struct FrontSystem {
    alpha_s: f64,
    alpha_sl: f64,
    alpha_l: f64,
    bounds: BoundaryEnthalpies,
    rho: f64,
    latent_heat: f64,
    lambda0: f64,
}

impl FrontSystem {
    pub fn new(
        props: &MaterialProperties,
        lin: &LinearizationResult,
        bounds: BoundaryEnthalpies,
    ) -> Self {
        FrontSystem {
            alpha_s: lin.alpha_s,
            alpha_sl: lin.alpha_sl,
            alpha_l: lin.alpha_l,
            bounds,
            rho: props.rho,
            latent_heat: props.latent_heat,
            lambda0: props.lambda0,
        }
    }

    /// Flux term of the solid solution at the solidus:
    /// √α_s (H_s−H_out) e^(−k_s²/4α_s) / erf(k_s/2√α_s).
    fn solid_flux(&self, k_s: f64) -> f64 {
        let half = k_s / (2.0 * self.alpha_s.sqrt());
        self.alpha_s.sqrt() * (self.bounds.h_sol - self.bounds.h_out) * (-half * half).exp()
            / erf(half)
    }

    /// Flux terms of the mushy solution at the solidus and the liquidus;
    /// they share the erf-difference denominator.
    fn mush_fluxes(&self, k_s: f64, k_l: f64) -> (f64, f64) {
        let scale = 2.0 * self.alpha_sl.sqrt();
        let half_s = k_s / scale;
        let half_l = k_l / scale;
        let denom = erf(half_l) - erf(half_s);
        let lead = self.alpha_sl.sqrt() * (self.bounds.h_liq - self.bounds.h_sol);
        (
            lead * (-half_s * half_s).exp() / denom,
            lead * (-half_l * half_l).exp() / denom,
        )
    }

    /// Flux term of the liquid solution at the liquidus:
    /// √α_l (H_init−H_l) e^(−k_l²/4α_l) / erfc(k_l/2√α_l).
    fn liquid_flux(&self, k_l: f64) -> f64 {
        let half = k_l / (2.0 * self.alpha_l.sqrt());
        self.alpha_l.sqrt() * (self.bounds.h_init - self.bounds.h_liq) * (-half * half).exp()
            / erfc(half)
    }

    /// The eutectic Stefan term (√π/2)ρλ0Lk_s; zero for noneutectic alloys.
    fn stefan_term(&self, k_s: f64) -> f64 {
        0.5 * PI.sqrt() * self.rho * self.lambda0 * self.latent_heat * k_s
    }

    /// Residuals of the two interface conditions at (k_s, k_l): the solidus
    /// flux balance including the eutectic term, and the liquidus flux
    /// balance. Both vanish at the true front coefficients.
    pub fn residuals(&self, k_s: f64, k_l: f64) -> Result<(f64, f64), SimilarityError> {
        if !(k_s > 0.0 && k_l > k_s) {
            return Err(SimilarityError::InvalidCoefficients { k_s, k_l });
        }
        let (mush_s, mush_l) = self.mush_fluxes(k_s, k_l);
        let r_s = self.solid_flux(k_s) - mush_s - self.stefan_term(k_s);
        let r_l = mush_l - self.liquid_flux(k_l);
        if !r_s.is_finite() || !r_l.is_finite() {
            return Err(SimilarityError::NonFinite {
                what: "interface residuals",
                k_s,
                k_l,
            });
        }
        Ok((r_s, r_l))
    }

    /// Magnitudes of the leading flux term of each equation, the scale the
    /// residual tolerance is measured against.
    pub fn leading_magnitudes(&self, k_s: f64, k_l: f64) -> (f64, f64) {
        let (_, mush_l) = self.mush_fluxes(k_s, k_l);
        (self.solid_flux(k_s).abs(), mush_l.abs())
    }
}

/// Scan resolution for both nested bracket searches.
const FRONT_SCAN_POINTS: usize = 200;

/// Bisection width targets, relative to the current midpoint.
const INNER_REL_TOL: f64 = 1e-14;
const OUTER_REL_TOL: f64 = 1e-13;

/// Solves the liquidus equation for k_l ∈ (k_s, k_max) at a fixed trial k_s:
/// geometric scan for a sign change, then bisection. None when the scan sees
/// no sign change (k_s too large to admit a liquidus root).
fn solve_liquidus_for(system: &FrontSystem, k_s: f64, k_max: f64) -> Option<f64> {
    let lo = k_s * (1.0 + 1e-9);
    if lo >= k_max {
        return None;
    }
    let r_l = |k_l: f64| system.residuals(k_s, k_l).ok().map(|(_, r)| r);

    let ratio = (k_max / lo).powf(1.0 / (FRONT_SCAN_POINTS as f64 - 1.0));
    let mut prev_k = lo;
    let mut prev_r = r_l(lo)?;
    let mut bracket = None;
    for i in 1..FRONT_SCAN_POINTS {
        let k = if i == FRONT_SCAN_POINTS - 1 {
            k_max
        } else {
            lo * ratio.powi(i as i32)
        };
        let r = r_l(k)?;
        if prev_r == 0.0 {
            return Some(prev_k);
        }
        if prev_r * r < 0.0 {
            bracket = Some((prev_k, k, prev_r));
            break;
        }
        prev_k = k;
        prev_r = r;
    }
    let (mut lo_k, mut hi_k, mut r_lo) = bracket?;
    while hi_k - lo_k > INNER_REL_TOL * 0.5 * (lo_k + hi_k) {
        let mid = 0.5 * (lo_k + hi_k);
        let r_mid = r_l(mid)?;
        if r_mid == 0.0 {
            return Some(mid);
        }
        if r_lo * r_mid < 0.0 {
            hi_k = mid;
        } else {
            lo_k = mid;
            r_lo = r_mid;
        }
    }
    Some(0.5 * (lo_k + hi_k))
}

/// Solves the coupled system for (k_s, k_l) by nested bracketed bisection:
/// for each trial k_s the liquidus equation is solved for k_l, and the
/// resulting solidus residual is driven to zero over k_s. The search domain
/// is (0, k_max] with k_max = 6·√(max α).
pub fn solve_front_coefficients(
    props: &MaterialProperties,
    lin: &LinearizationResult,
    bounds: BoundaryEnthalpies,
) -> Result<StefanRoots, SimilarityError> {
    let system = FrontSystem::new(props, lin, bounds);
    let k_max = 6.0 * lin.alpha_s.max(lin.alpha_sl).max(lin.alpha_l).sqrt();

    // Solidus residual as a function of k_s alone, with k_l eliminated by
    // the inner solve. None where no liquidus root exists.
    let outer = |k_s: f64| -> Option<f64> {
        let k_l = solve_liquidus_for(&system, k_s, k_max)?;
        system.residuals(k_s, k_l).ok().map(|(r_s, _)| r_s)
    };

    let lo = k_max * 1e-5;
    let hi = k_max * 0.999;
    let ratio = (hi / lo).powf(1.0 / (FRONT_SCAN_POINTS as f64 - 1.0));
    let mut scan = Vec::with_capacity(FRONT_SCAN_POINTS);
    for i in 0..FRONT_SCAN_POINTS {
        let k = lo * ratio.powi(i as i32);
        scan.push((k, outer(k)));
    }

    let mut bracket = None;
    for w in scan.windows(2) {
        if let ((k0, Some(r0)), (k1, Some(r1))) = (w[0], w[1]) {
            if r0 == 0.0 {
                bracket = Some((k0, k0, r0));
                break;
            }
            if r0 * r1 < 0.0 {
                bracket = Some((k0, k1, r0));
                break;
            }
        }
    }
    let Some((mut lo_k, mut hi_k, mut r_lo)) = bracket else {
        return Err(SimilarityError::RootNotFound { k_max, scan });
    };

    while hi_k - lo_k > OUTER_REL_TOL * 0.5 * (lo_k + hi_k) {
        let mid = 0.5 * (lo_k + hi_k);
        let Some(r_mid) = outer(mid) else {
            // The inner solve failed inside the bracket; shrink toward the
            // side that still evaluates.
            hi_k = mid;
            continue;
        };
        if r_mid == 0.0 {
            lo_k = mid;
            hi_k = mid;
            break;
        }
        if r_lo * r_mid < 0.0 {
            hi_k = mid;
        } else {
            lo_k = mid;
            r_lo = r_mid;
        }
    }

    let k_s = 0.5 * (lo_k + hi_k);
    let k_l = solve_liquidus_for(&system, k_s, k_max).ok_or(SimilarityError::RootNotFound {
        k_max,
        scan: Vec::new(),
    })?;
    let (residual_s, residual_l) = system.residuals(k_s, k_l)?;
    let (scale_s, scale_l) = system.leading_magnitudes(k_s, k_l);
    if residual_s.abs() > RESIDUAL_REL_TOL * scale_s
        || residual_l.abs() > RESIDUAL_REL_TOL * scale_l
    {
        return Err(SimilarityError::ResidualTooLarge {
            residual_s,
            residual_l,
            scale_s,
            scale_l,
            tol: RESIDUAL_REL_TOL,
        });
    }
    Ok(StefanRoots {
        k_s,
        k_l,
        residual_s,
        residual_l,
    })
}

/// The assembled exact solution: properties, linearization, boundary
/// enthalpies, front coefficients, and the boundary temperatures that
/// produced them. Immutable; all evaluations are pure.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub props: MaterialProperties,
    pub lin: LinearizationResult,
    pub bounds: BoundaryEnthalpies,
    pub roots: StefanRoots,
    pub t_out: f64,
    pub t_init: f64,
}

impl ExactSolution {
    /// Builds the full exact solution from a linearization and boundary
    /// temperatures: boundary enthalpies, then the front coefficients.
    pub fn assemble(
        props: &MaterialProperties,
        lin: LinearizationResult,
        t_out: f64,
        t_init: f64,
    ) -> Result<Self, SimilarityError> {
        let bounds = boundary_enthalpies(props, &lin.model, t_out, t_init)?;
        let roots = solve_front_coefficients(props, &lin, bounds)?;
        Ok(ExactSolution {
            props: props.clone(),
            lin,
            bounds,
            roots,
            t_out,
            t_init,
        })
    }

    fn model(&self) -> &LiquidFractionModel {
        &self.lin.model
    }

    fn check_sample_point(&self, x: f64, t: f64) -> Result<(), SimilarityError> {
        if !x.is_finite() || x < 0.0 {
            return Err(SimilarityError::NegativePosition(x));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(SimilarityError::NonPositiveTime(t));
        }
        Ok(())
    }

    /// Region of a sample point, boundaries included in the mush.
    pub fn region_at(&self, x: f64, t: f64) -> Result<Region, SimilarityError> {
        self.check_sample_point(x, t)?;
        let (x_s, x_l) = self.roots.front_position(t)?;
        Ok(if x < x_s {
            Region::Solid
        } else if x <= x_l {
            Region::Mush
        } else {
            Region::Liquid
        })
    }

    /// Exact enthalpy H(x, t) in J/m³, from the three erf/erfc closed forms.
    pub fn enthalpy_at(&self, x: f64, t: f64) -> Result<f64, SimilarityError> {
        self.check_sample_point(x, t)?;
        let (x_s, x_l) = self.roots.front_position(t)?;
        let b = &self.bounds;
        let sqrt_t = t.sqrt();
        Ok(if x < x_s {
            let e_front = erf(self.roots.k_s / (2.0 * self.lin.alpha_s.sqrt()));
            b.h_out
                + (b.h_sol - b.h_out) * erf(x / (2.0 * (self.lin.alpha_s * t).sqrt())) / e_front
        } else if x <= x_l {
            let scale = 2.0 * self.lin.alpha_sl.sqrt();
            let e_s = erf(self.roots.k_s / scale);
            let e_l = erf(self.roots.k_l / scale);
            let e_x = erf(x / (scale * sqrt_t));
            ((b.h_liq - b.h_sol) * e_x + b.h_sol * e_l - b.h_liq * e_s) / (e_l - e_s)
        } else {
            let e_front = erfc(self.roots.k_l / (2.0 * self.lin.alpha_l.sqrt()));
            b.h_init
                - (b.h_init - b.h_liq) * erfc(x / (2.0 * (self.lin.alpha_l * t).sqrt())) / e_front
        })
    }

    /// Exact temperature T(x, t) in °C: closed forms in the single-phase
    /// regions, enthalpy inversion in the mush.
    pub fn temperature_at(&self, x: f64, t: f64) -> Result<f64, SimilarityError> {
        let region = self.region_at(x, t)?;
        let h = self.enthalpy_at(x, t)?;
        Ok(match region {
            Region::Solid => h / (self.props.rho * self.props.c_s),
            Region::Mush => material::temperature_from_enthalpy(&self.props, self.model(), h)?,
            Region::Liquid => {
                h / (self.props.rho * self.props.c_l) - self.props.latent_heat / self.props.c_l
            }
        })
    }

    /// Region of (x, t) honoring the explicit `side` when x falls within the
    /// snap window of either front; errors there when no side is given.
    fn gradient_region(
        &self,
        x: f64,
        t: f64,
        side: Option<Side>,
    ) -> Result<Region, SimilarityError> {
        self.check_sample_point(x, t)?;
        let (x_s, x_l) = self.roots.front_position(t)?;
        let window = FRONT_SNAP_REL * x_l;
        if (x - x_s).abs() < window {
            return match side {
                Some(Side::Left) => Ok(Region::Solid),
                Some(Side::Right) => Ok(Region::Mush),
                None => Err(SimilarityError::AtFront {
                    x,
                    t,
                    front: "solidus",
                }),
            };
        }
        if (x - x_l).abs() < window {
            return match side {
                Some(Side::Left) => Ok(Region::Mush),
                Some(Side::Right) => Ok(Region::Liquid),
                None => Err(SimilarityError::AtFront {
                    x,
                    t,
                    front: "liquidus",
                }),
            };
        }
        self.region_at(x, t)
    }

    /// ∂H/∂x of the branch solution for `region` at (x, t).
    fn enthalpy_gradient_branch(&self, region: Region, x: f64, t: f64) -> f64 {
        let b = &self.bounds;
        let (alpha, lead, denom) = match region {
            Region::Solid => (
                self.lin.alpha_s,
                b.h_sol - b.h_out,
                erf(self.roots.k_s / (2.0 * self.lin.alpha_s.sqrt())),
            ),
            Region::Mush => {
                let scale = 2.0 * self.lin.alpha_sl.sqrt();
                (
                    self.lin.alpha_sl,
                    b.h_liq - b.h_sol,
                    erf(self.roots.k_l / scale) - erf(self.roots.k_s / scale),
                )
            }
            Region::Liquid => (
                self.lin.alpha_l,
                b.h_init - b.h_liq,
                erfc(self.roots.k_l / (2.0 * self.lin.alpha_l.sqrt())),
            ),
        };
        lead / denom * (-x * x / (4.0 * alpha * t)).exp() / (PI * alpha * t).sqrt()
    }

    /// dT/dH of the branch at the local temperature: 1/(ρC) in the
    /// single-phase regions, 1/(ρ·C_apparent) in the mush.
    fn temperature_slope_branch(
        &self,
        region: Region,
        x: f64,
        t: f64,
    ) -> Result<f64, SimilarityError> {
        Ok(match region {
            Region::Solid => 1.0 / (self.props.rho * self.props.c_s),
            Region::Liquid => 1.0 / (self.props.rho * self.props.c_l),
            Region::Mush => {
                let h = self.enthalpy_at(x, t)?;
                let temp = material::temperature_from_enthalpy(&self.props, self.model(), h)?;
                let cap = material::apparent_capacity(&self.props, self.model(), temp)?;
                1.0 / (self.props.rho * cap)
            }
        })
    }

    /// Spatial temperature gradient ∂T/∂x in K/m. On a front the gradient is
    /// discontinuous, so a sample inside the snap window needs `side`.
    pub fn temperature_gradient_at(
        &self,
        x: f64,
        t: f64,
        side: Option<Side>,
    ) -> Result<f64, SimilarityError> {
        let region = self.gradient_region(x, t, side)?;
        let slope = self.temperature_slope_branch(region, x, t)?;
        Ok(slope * self.enthalpy_gradient_branch(region, x, t))
    }

    /// Cooling rate ∂T/∂t in K/s; same side rules as the gradient. Equals
    /// −(x/2t)·∂T/∂x by the similarity structure, and is implemented through
    /// the printed closed form −dT/dH·(αx e^(−x²/4αt))/(2√π (αt)^(3/2)).
    pub fn cooling_rate_at(
        &self,
        x: f64,
        t: f64,
        side: Option<Side>,
    ) -> Result<f64, SimilarityError> {
        let region = self.gradient_region(x, t, side)?;
        let slope = self.temperature_slope_branch(region, x, t)?;
        let b = &self.bounds;
        let (alpha, lead, denom) = match region {
            Region::Solid => (
                self.lin.alpha_s,
                b.h_sol - b.h_out,
                erf(self.roots.k_s / (2.0 * self.lin.alpha_s.sqrt())),
            ),
            Region::Mush => {
                let scale = 2.0 * self.lin.alpha_sl.sqrt();
                (
                    self.lin.alpha_sl,
                    b.h_liq - b.h_sol,
                    erf(self.roots.k_l / scale) - erf(self.roots.k_s / scale),
                )
            }
            Region::Liquid => (
                self.lin.alpha_l,
                b.h_init - b.h_liq,
                erfc(self.roots.k_l / (2.0 * self.lin.alpha_l.sqrt())),
            ),
        };
        let rate = -lead / denom * alpha * x * (-x * x / (4.0 * alpha * t)).exp()
            / (2.0 * PI.sqrt() * (alpha * t).powf(1.5));
        Ok(slope * rate)
    }

    /// G_l(t): the liquid-side temperature gradient at the liquidus, K/m.
    pub fn liquidus_gradient(&self, t: f64) -> Result<f64, SimilarityError> {
        if !t.is_finite() || t <= 0.0 {
            return Err(SimilarityError::NonPositiveTime(t));
        }
        let b = &self.bounds;
        let half = self.roots.k_l / (2.0 * self.lin.alpha_l.sqrt());
        Ok(
            1.0 / (self.props.rho * self.props.c_l) * (b.h_init - b.h_liq) / erfc(half)
                * (-half * half).exp()
                / (PI * self.lin.alpha_l * t).sqrt(),
        )
    }

    /// Ṫ_l(t): the cooling rate at the liquidus, K/s, negative and ∝ 1/t.
    pub fn liquidus_cooling_rate(&self, t: f64) -> Result<f64, SimilarityError> {
        if !t.is_finite() || t <= 0.0 {
            return Err(SimilarityError::NonPositiveTime(t));
        }
        let b = &self.bounds;
        let half = self.roots.k_l / (2.0 * self.lin.alpha_l.sqrt());
        Ok(
            -1.0 / (self.props.rho * self.props.c_l) * (b.h_init - b.h_liq) / erfc(half)
                * self.roots.k_l
                * (-half * half).exp()
                / (2.0 * (PI * self.lin.alpha_l).sqrt() * t),
        )
    }

    /// Writes an exact profile at time `t` over the given positions as CSV
    /// with columns x_m, t_s, H_J_per_m3, T_C, dTdx_K_per_m, dTdt_K_per_s,
    /// region. Samples inside a front's snap window are labeled with the
    /// side they numerically fall on.
    pub fn write_profile_csv<W: Write>(
        &self,
        xs: &[f64],
        t: f64,
        out: &mut W,
    ) -> Result<(), ProfileExportError> {
        writeln!(out, "x_m,t_s,H_J_per_m3,T_C,dTdx_K_per_m,dTdt_K_per_s,region")?;
        for &x in xs {
            let region = self.region_at(x, t)?;
            let side = match region {
                Region::Solid | Region::Mush => Side::Left,
                Region::Liquid => Side::Right,
            };
            // region_at puts a front-window sample in the lower region
            // (boundaries belong to the mush), so Left matches it; a sample
            // in the liquid can only snap to the liquidus from the right.
            let h = self.enthalpy_at(x, t)?;
            let temp = self.temperature_at(x, t)?;
            let dtdx = self.temperature_gradient_at(x, t, Some(side))?;
            let dtdt = self.cooling_rate_at(x, t, Some(side))?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                x,
                t,
                h,
                temp,
                dtdx,
                dtdt,
                region.label()
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ProfileExportError {
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Io(#[from] io::Error),
}
