//! Alloy properties and the pointwise thermophysical functions built on them:
//! mixture conductivity, the closed-form liquid fraction and its derivative,
//! piecewise volumetric enthalpy, apparent capacity, enthalpy-to-temperature
//! inversion, and the two reference fraction curves used for comparison.
//!
//! Temperatures are in °C with the enthalpy reference at 0 °C; this scale is
//! normative because the (1 + p·T) factor in the fraction model is not scale
//! invariant. All values are immutable after construction and every function
//! here is pure, so concurrent evaluation needs no synchronization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed before an evaluated liquid fraction outside [0, 1] is
/// treated as an error. A mushy diffusivity rounded to six significant
/// digits already shifts the fraction at the solidus by a few 1e-7, so the
/// tolerance sits comfortably above that but far below any physical misuse.
pub const LAMBDA_RANGE_TOL: f64 = 1e-6;

/// Half-width at which the mushy enthalpy inversion stops bisecting, in K.
pub const INVERSION_TOL_K: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("cannot read material file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("material JSON invalid at `{at}`: {detail}")]
    Parse { at: String, detail: String },

    #[error("material invariant violated: {0}")]
    Invariant(String),

    #[error("{name} = {value} outside the valid range [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("temperature {t} °C outside the mushy interval [{t_sol}, {t_liq}] °C")]
    OutsideMush { t: f64, t_sol: f64, t_liq: f64 },

    #[error("temperature {0} °C is below the 0 °C enthalpy reference")]
    NegativeTemperature(f64),

    #[error("enthalpy {0} J/m³ is negative")]
    NegativeEnthalpy(f64),

    #[error(
        "degenerate fraction coefficients (a = {a}, p = {p}): the closed form is \
         undefined; integrate the fraction ODE numerically instead"
    )]
    DegenerateCoefficients { a: f64, p: f64 },

    #[error(
        "1 + p·T = {value} is not positive at T = {t} °C; the fraction model is \
         invalid on this mushy interval"
    )]
    NonPositiveBase { t: f64, value: f64 },

    #[error(
        "liquid fraction {lambda} at T = {t} °C lies outside [0, 1] by more than \
         {tol}; the fraction model is not converged"
    )]
    FractionOutOfRange { lambda: f64, t: f64, tol: f64 },

    #[error("melting temperature T_m is required for the reference fraction curve but absent")]
    MissingMeltingPoint,

    #[error(
        "mushy enthalpy inversion failed: H = {h} J/m³ is not bracketed by the \
         mushy branch range [{h_lo}, {h_hi}] J/m³"
    )]
    InversionBracket { h: f64, h_lo: f64, h_hi: f64 },
}

/// Thermophysical constants of the alloy. Loadable from JSON with exactly
/// these keys: `C_s`, `C_l`, `kappa_s`, `kappa_l`, `rho`, `L`, `T_s`, `T_l`,
/// optional `T_m`, and `lambda0` (defaults to 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialProperties {
    /// Specific heat of the solid, J/(kg·K).
    #[serde(rename = "C_s")]
    pub c_s: f64,
    /// Specific heat of the liquid, J/(kg·K).
    #[serde(rename = "C_l")]
    pub c_l: f64,
    /// Thermal conductivity of the solid, W/(m·K).
    pub kappa_s: f64,
    /// Thermal conductivity of the liquid, W/(m·K).
    pub kappa_l: f64,
    /// Density, kg/m³ (shared by all phases).
    pub rho: f64,
    /// Latent heat of fusion, J/kg.
    #[serde(rename = "L")]
    pub latent_heat: f64,
    /// Solidus temperature, °C.
    #[serde(rename = "T_s")]
    pub t_sol: f64,
    /// Liquidus temperature, °C.
    #[serde(rename = "T_l")]
    pub t_liq: f64,
    /// Melting temperature of the pure solvent, °C. Only the reference
    /// fraction curve λ_t needs it.
    #[serde(rename = "T_m", default, skip_serializing_if = "Option::is_none")]
    pub t_melt: Option<f64>,
    /// Liquid fraction remaining at the solidus; 0 for a noneutectic alloy.
    #[serde(default)]
    pub lambda0: f64,
}

impl MaterialProperties {
    /// The VT3-1 titanium alloy of the published benchmark.
    pub fn vt3_1() -> Self {
        MaterialProperties {
            c_s: 600.0,
            c_l: 1200.0,
            kappa_s: 10.0,
            kappa_l: 35.0,
            rho: 4500.0,
            latent_heat: 3.55e5,
            t_sol: 1550.0,
            t_liq: 1620.0,
            t_melt: Some(1668.0),
            lambda0: 0.0,
        }
    }

    /// Parses and validates a material from a JSON string.
    pub fn from_json_str(text: &str) -> Result<Self, MaterialError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let props: MaterialProperties =
            serde_path_to_error::deserialize(de).map_err(|e| {
                let path = e.path().to_string();
                MaterialError::Parse {
                    at: if path == "." { "top level".to_string() } else { path },
                    detail: e.inner().to_string(),
                }
            })?;
        props.validate()?;
        Ok(props)
    }

    /// Reads and validates a material from a JSON file.
    pub fn from_json_file(path: &Path) -> Result<Self, MaterialError> {
        let text = fs::read_to_string(path).map_err(|source| MaterialError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Checks every invariant, naming the offending field in the error.
    pub fn validate(&self) -> Result<(), MaterialError> {
        let positive = [
            ("C_s", self.c_s),
            ("C_l", self.c_l),
            ("kappa_s", self.kappa_s),
            ("kappa_l", self.kappa_l),
            ("rho", self.rho),
            ("L", self.latent_heat),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(MaterialError::Invariant(format!(
                    "{name} must be strictly positive and finite, got {value}"
                )));
            }
        }
        if !self.t_sol.is_finite() || !self.t_liq.is_finite() {
            return Err(MaterialError::Invariant(format!(
                "T_s and T_l must be finite, got T_s = {}, T_l = {}",
                self.t_sol, self.t_liq
            )));
        }
        if self.t_sol >= self.t_liq {
            return Err(MaterialError::Invariant(format!(
                "T_s must lie strictly below T_l, got T_s = {}, T_l = {}",
                self.t_sol, self.t_liq
            )));
        }
        if let Some(t_melt) = self.t_melt {
            if !t_melt.is_finite() || t_melt <= self.t_liq {
                return Err(MaterialError::Invariant(format!(
                    "T_m must lie strictly above T_l, got T_m = {}, T_l = {}",
                    t_melt, self.t_liq
                )));
            }
        }
        if !self.lambda0.is_finite() || self.lambda0 < 0.0 || self.lambda0 >= 1.0 {
            return Err(MaterialError::Invariant(format!(
                "lambda0 must lie in [0, 1), got {}",
                self.lambda0
            )));
        }
        Ok(())
    }
}

/// Coefficients and bounds of the closed-form liquid fraction
/// λ(T) = −b/a + ((a+b)/a) · ((1 + p·T_l)/(1 + p·T))^(a/p) on [T_s, T_l],
/// anchored so that λ(T_l) = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiquidFractionModel {
    /// Dimensionless ODE coefficient multiplying λ.
    pub a: f64,
    /// Dimensionless ODE constant term.
    pub b: f64,
    /// (C_l − C_s)/L in 1/K.
    pub p: f64,
    /// Solidus bound of the model's domain, °C.
    pub t_sol: f64,
    /// Liquidus bound of the model's domain, °C.
    pub t_liq: f64,
    /// Target fraction at the solidus.
    pub lambda0: f64,
}

impl LiquidFractionModel {
    /// Builds a model, rejecting degenerate coefficients (a = 0 or p = 0,
    /// where the closed form collapses) and a non-positive exponent base
    /// anywhere on [T_s, T_l].
    pub fn new(
        a: f64,
        b: f64,
        p: f64,
        t_sol: f64,
        t_liq: f64,
        lambda0: f64,
    ) -> Result<Self, MaterialError> {
        if a == 0.0 || p == 0.0 || !a.is_finite() || !b.is_finite() || !p.is_finite() {
            return Err(MaterialError::DegenerateCoefficients { a, p });
        }
        // 1 + p·T is linear in T, so positivity at both ends covers the interval.
        for t in [t_sol, t_liq] {
            let base = 1.0 + p * t;
            if base <= 0.0 {
                return Err(MaterialError::NonPositiveBase { t, value: base });
            }
        }
        Ok(LiquidFractionModel {
            a,
            b,
            p,
            t_sol,
            t_liq,
            lambda0,
        })
    }

    fn check_domain(&self, t: f64) -> Result<(), MaterialError> {
        if !t.is_finite() || t < self.t_sol || t > self.t_liq {
            return Err(MaterialError::OutsideMush {
                t,
                t_sol: self.t_sol,
                t_liq: self.t_liq,
            });
        }
        Ok(())
    }

    /// The closed form with no range policing. Written as
    /// (a·R + b·(R − 1))/a with R = ((1+p·T_l)/(1+p·T))^(a/p) so that T = T_l
    /// gives R = 1 and the anchored value λ = a/a = 1 exactly.
    fn closed_form(&self, t: f64) -> f64 {
        let r = ((1.0 + self.p * self.t_liq) / (1.0 + self.p * t)).powf(self.a / self.p);
        (self.a * r + self.b * (r - 1.0)) / self.a
    }

    /// Evaluates the closed form at `t` without the [0, 1] range check.
    /// Diagnostic use (root-scan landscapes); still rejects `t` outside the
    /// model's mushy interval.
    pub fn eval_raw(&self, t: f64) -> Result<f64, MaterialError> {
        self.check_domain(t)?;
        Ok(self.closed_form(t))
    }
}

/// Mixture conductivity (1−λ)·κ_s + λ·κ_l.
pub fn mixture_conductivity(
    props: &MaterialProperties,
    lambda: f64,
) -> Result<f64, MaterialError> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(MaterialError::OutOfRange {
            name: "lambda",
            value: lambda,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok((1.0 - lambda) * props.kappa_s + lambda * props.kappa_l)
}

/// Closed-form liquid fraction at `t`, erroring if the value escapes [0, 1]
/// by more than [`LAMBDA_RANGE_TOL`] (an unconverged model), never clamping
/// silently.
pub fn liquid_fraction(model: &LiquidFractionModel, t: f64) -> Result<f64, MaterialError> {
    let lambda = model.eval_raw(t)?;
    if !(-LAMBDA_RANGE_TOL..=1.0 + LAMBDA_RANGE_TOL).contains(&lambda) {
        return Err(MaterialError::FractionOutOfRange {
            lambda,
            t,
            tol: LAMBDA_RANGE_TOL,
        });
    }
    Ok(lambda)
}

/// dλ/dT = −(aλ + b)/(1 + pT), the simplified form of the fraction ODE.
pub fn liquid_fraction_derivative(
    model: &LiquidFractionModel,
    t: f64,
) -> Result<f64, MaterialError> {
    let lambda = liquid_fraction(model, t)?;
    Ok(-(model.a * lambda + model.b) / (1.0 + model.p * t))
}

/// Liquid fraction as a total function of temperature: 0 below the solidus,
/// 1 above the liquidus, the closed form on the closed mushy interval,
/// clamped into [0, 1] so downstream mixture formulas always get a physical
/// fraction.
pub fn phase_fraction(model: &LiquidFractionModel, t: f64) -> f64 {
    if t < model.t_sol {
        0.0
    } else if t > model.t_liq {
        1.0
    } else {
        model.closed_form(t).clamp(0.0, 1.0)
    }
}

/// Volumetric enthalpy H(T) in J/m³ with reference H(0 °C) = 0:
/// ρC_sT in the solid, ρ[C_sT + λ(T)((C_l−C_s)T + L)] in the mush,
/// ρ[C_lT + L] in the liquid.
pub fn enthalpy(
    props: &MaterialProperties,
    model: &LiquidFractionModel,
    t: f64,
) -> Result<f64, MaterialError> {
    if !t.is_finite() || t < 0.0 {
        return Err(MaterialError::NegativeTemperature(t));
    }
    let rho = props.rho;
    if t < model.t_sol {
        Ok(rho * props.c_s * t)
    } else if t <= model.t_liq {
        let lambda = liquid_fraction(model, t)?;
        let latent_term = (props.c_l - props.c_s) * t + props.latent_heat;
        Ok(rho * (props.c_s * t + lambda * latent_term))
    } else {
        Ok(rho * (props.c_l * t + props.latent_heat))
    }
}

/// Apparent specific heat C(T) in J/(kg·K): the single-phase values outside
/// [T_s, T_l] and, on the closed mushy interval,
/// (1−λ)C_s + λC_l + [(C_l−C_s)T + L]·dλ/dT, which equals (1/ρ)·dH/dT away
/// from the two joints.
pub fn apparent_capacity(
    props: &MaterialProperties,
    model: &LiquidFractionModel,
    t: f64,
) -> Result<f64, MaterialError> {
    if !t.is_finite() || t < 0.0 {
        return Err(MaterialError::NegativeTemperature(t));
    }
    if t < model.t_sol {
        Ok(props.c_s)
    } else if t <= model.t_liq {
        let lambda = liquid_fraction(model, t)?;
        let dlambda = -(model.a * lambda + model.b) / (1.0 + model.p * t);
        let latent_term = (props.c_l - props.c_s) * t + props.latent_heat;
        Ok((1.0 - lambda) * props.c_s + lambda * props.c_l + latent_term * dlambda)
    } else {
        Ok(props.c_l)
    }
}

/// Inverts H(T): direct formulas in the single-phase branches, bisection on
/// the strictly increasing mushy branch to [`INVERSION_TOL_K`].
///
/// For a eutectic alloy (λ0 > 0) the enthalpy jumps at the solidus; any H
/// inside the jump maps to T_s.
pub fn temperature_from_enthalpy(
    props: &MaterialProperties,
    model: &LiquidFractionModel,
    h: f64,
) -> Result<f64, MaterialError> {
    if !h.is_finite() || h < 0.0 {
        return Err(MaterialError::NegativeEnthalpy(h));
    }
    let rho = props.rho;
    let h_sol = rho * props.c_s * model.t_sol;
    // Mush-side value at T_l, computed by the same formula the bisection
    // evaluates so the branch cut and the bracket cannot disagree in
    // rounding (λ(T_l) = 1 exactly, so this equals ρ(C_l·T_l + L) up to ulps).
    let h_liq = enthalpy(props, model, model.t_liq)?;
    if h < h_sol {
        return Ok(h / (rho * props.c_s));
    }
    if h > h_liq {
        return Ok((h / rho - props.latent_heat) / props.c_l);
    }

    let mut lo = model.t_sol;
    let mut hi = model.t_liq;
    let g_lo = enthalpy(props, model, lo)? - h;
    if g_lo > 0.0 {
        // h sits below the mush-side enthalpy at the solidus: inside the
        // eutectic jump when λ0 > 0, or, for a λ0 = 0 model, inside the
        // sliver that the convergence residual λ(T_s) ≠ 0 leaves above
        // ρC_sT_s. Both map to the solidus within the model's own fraction
        // tolerance; a gap beyond that sliver is a genuine inconsistency.
        let sliver = LAMBDA_RANGE_TOL
            * rho
            * ((props.c_l - props.c_s) * model.t_sol + props.latent_heat);
        if model.lambda0 > 0.0 || g_lo <= sliver {
            return Ok(model.t_sol);
        }
        return Err(MaterialError::InversionBracket {
            h,
            h_lo: h + g_lo,
            h_hi: h_liq,
        });
    }
    while hi - lo > INVERSION_TOL_K {
        let mid = 0.5 * (lo + hi);
        let g_mid = enthalpy(props, model, mid)? - h;
        if g_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Reference fraction curve λ_t(T) = 1 − ((T_m−T_s)/(T_l−T_s))·((T_l−T)/(T_m−T)),
/// the lever-rule curve used for the benchmark alloy. Requires `T_m`.
pub fn reference_fraction_vt(props: &MaterialProperties, t: f64) -> Result<f64, MaterialError> {
    let t_melt = props.t_melt.ok_or(MaterialError::MissingMeltingPoint)?;
    if !t.is_finite() || t < props.t_sol || t > props.t_liq {
        return Err(MaterialError::OutsideMush {
            t,
            t_sol: props.t_sol,
            t_liq: props.t_liq,
        });
    }
    let slope = (t_melt - props.t_sol) / (props.t_liq - props.t_sol);
    Ok(1.0 - slope * (props.t_liq - t) / (t_melt - t))
}

/// Reference power-law fraction λ_n(T) = ((T−T_s)/(T_l−T_s))^n.
pub fn reference_fraction_power(
    props: &MaterialProperties,
    t: f64,
    n: f64,
) -> Result<f64, MaterialError> {
    if !n.is_finite() || n <= 0.0 {
        return Err(MaterialError::OutOfRange {
            name: "n",
            value: n,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    if !t.is_finite() || t < props.t_sol || t > props.t_liq {
        return Err(MaterialError::OutsideMush {
            t,
            t_sol: props.t_sol,
            t_liq: props.t_liq,
        });
    }
    Ok(((t - props.t_sol) / (props.t_liq - props.t_sol)).powf(n))
}
