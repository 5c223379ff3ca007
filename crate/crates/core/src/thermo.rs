//! Thermodynamics built on `ln Q`: free energy, entropy, the self-consistent
//! effective temperature of a coherent oscillator and the zero-point branch.
//!
//! The occupation `nbar` depends on temperature only through an explicit
//! [`OccupationModel`]; the default is linear, `nbar ∝ T`.
//!
//! Two temperature branches are kept separate and never joined:
//! [`temperature_closed_form`] for `nbar > 0` and [`zero_point`] for
//! `nbar = 0` (the Bloch limit of a cold heat bath).

use std::fmt;
use std::sync::Arc;

use crate::coherent::{check_nbar, OscillatorConfig};
use crate::constants::ConstantsSet;
use crate::error::{Error, Result};
use crate::ode::{self, SolverOptions, Trajectory};

fn check_temperature(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("temperature must be positive, got {t}")))
    }
}

/// `(T, ln Q, F, S, E)` with `F = -k_B T ln Q` and `E = F + T S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub temperature: f64,
    pub ln_q: f64,
    pub free_energy: f64,
    pub entropy: f64,
    pub energy: f64,
}

impl ThermoPoint {
    /// Builds the point from `T`, `ln Q` and `S`; `F` and `E` follow.
    pub fn from_entropy(temperature: f64, ln_q: f64, entropy: f64, cs: &ConstantsSet) -> Result<Self> {
        let free_energy = free_energy(temperature, ln_q, cs)?;
        Ok(Self {
            temperature,
            ln_q,
            free_energy,
            entropy,
            energy: free_energy + temperature * entropy,
        })
    }

    /// Relative residuals of `F = -k_B T ln Q` and `E = F + T S`.
    pub fn closure_residuals(&self, cs: &ConstantsSet) -> (f64, f64) {
        let f_expected = -cs.k_b() * self.temperature * self.ln_q;
        let e_expected = self.free_energy + self.temperature * self.entropy;
        (
            relative_gap(self.free_energy, f_expected),
            relative_gap(self.energy, e_expected),
        )
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Linear { gamma: f64 },
    Constant { value: f64 },
    SelfConsistent { alpha: f64 },
    Custom,
}

/// Temperature dependence of the mean occupation, `nbar(T)`.
#[derive(Clone)]
pub struct OccupationModel {
    nbar_of_t: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    description: String,
    domain: (f64, f64),
    kind: ModelKind,
}

impl fmt::Debug for OccupationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OccupationModel")
            .field("description", &self.description)
            .field("domain", &self.domain)
            .field("kind", &self.kind)
            .finish()
    }
}

impl OccupationModel {
    /// `nbar = gamma T`, the default.
    pub fn linear(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::domain(format!("linear occupation slope must be non-negative, got {gamma}")));
        }
        Ok(Self {
            nbar_of_t: Arc::new(move |t| gamma * t),
            description: format!("linear: nbar = {gamma} * T"),
            domain: (0.0, f64::INFINITY),
            kind: ModelKind::Linear { gamma },
        })
    }

    /// Linear model passing through `(t, nbar)`.
    pub fn linear_through(t: f64, nbar: f64) -> Result<Self> {
        check_temperature(t)?;
        check_nbar(nbar)?;
        Self::linear(nbar / t)
    }

    pub fn constant(value: f64) -> Result<Self> {
        check_nbar(value)?;
        Ok(Self {
            nbar_of_t: Arc::new(move |_| value),
            description: format!("constant: nbar = {value}"),
            domain: (0.0, f64::INFINITY),
            kind: ModelKind::Constant { value },
        })
    }

    /// Inverse of the closed-form temperature at fixed `alpha = ω / nbar`:
    /// `nbar(T) = 1 / (2 (exp(ħα / (2 k_B T)) - 1))`.
    pub fn self_consistent(alpha: f64, cs: &ConstantsSet) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        let theta = cs.hbar() * alpha / (2.0 * cs.k_b());
        Ok(Self {
            nbar_of_t: Arc::new(move |t| 0.5 / (theta / t).exp_m1()),
            description: format!("self-consistent: alpha = {alpha}"),
            domain: (0.0, f64::INFINITY),
            kind: ModelKind::SelfConsistent { alpha },
        })
    }

    pub fn custom(
        description: impl Into<String>,
        domain: (f64, f64),
        nbar_of_t: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            nbar_of_t: Arc::new(nbar_of_t),
            description: description.into(),
            domain,
            kind: ModelKind::Custom,
        }
    }

    pub fn nbar(&self, t: f64) -> f64 {
        (self.nbar_of_t)(t)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, ModelKind::Linear { .. })
    }
}

/// `F = -k_B T ln Q`.
pub fn free_energy(t: f64, ln_q: f64, cs: &ConstantsSet) -> Result<f64> {
    check_temperature(t)?;
    Ok(-cs.k_b() * t * ln_q)
}

/// `S = -dF/dT` by central differences with one Richardson level, where
/// `F(T) = -k_B T nbar(T)`.
pub fn entropy_numeric(model: &OccupationModel, t: f64, cs: &ConstantsSet) -> Result<f64> {
    check_temperature(t)?;
    let h = (1e-6 * t).max(1e-12);
    let (lo, hi) = model.domain();
    if t - h <= lo || t + h >= hi {
        return Err(Error::DerivativeStep { t, lo, hi });
    }
    let free = |x: f64| -cs.k_b() * x * model.nbar(x);
    let central = |step: f64| (free(t + step) - free(t - step)) / (2.0 * step);
    let coarse = central(h);
    let fine = central(0.5 * h);
    Ok(-(4.0 * fine - coarse) / 3.0)
}

/// `S = k_B (nbar + T dnbar/dT)`; the caller supplies `T dnbar/dT`.
pub fn entropy_analytic(nbar: f64, t_dnbar_dt: f64, cs: &ConstantsSet) -> f64 {
    cs.k_b() * (nbar + t_dnbar_dt)
}

/// `E = k_B T² dnbar/dT`.
pub fn energy_from_occupation_slope(t: f64, dnbar_dt: f64, cs: &ConstantsSet) -> Result<f64> {
    check_temperature(t)?;
    Ok(cs.k_b() * t * t * dnbar_dt)
}

/// `ħω(nbar + 1/2) - k_B T² dnbar/dT`; zero on the self-consistent curve.
pub fn self_consistency_residual(cfg: &OscillatorConfig, nbar: f64, t: f64, dnbar_dt: f64) -> f64 {
    let cs = cfg.constants();
    cs.hbar() * cfg.omega() * (nbar + 0.5) - cs.k_b() * t * t * dnbar_dt
}

/// `T = ħω / (2 k_B nbar ln(1 + 1/(2 nbar)))`.
pub fn temperature_closed_form(cfg: &OscillatorConfig, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    if nbar == 0.0 {
        return Err(Error::domain(
            "closed-form temperature needs nbar > 0; use the zero-point branch at nbar = 0",
        ));
    }
    let cs = cfg.constants();
    Ok(cs.hbar() * cfg.omega() / (2.0 * cs.k_b() * nbar * (0.5 / nbar).ln_1p()))
}

/// `dT/dnbar` of the closed form along `ω = α nbar` with `α = ω / nbar` fixed.
pub fn closed_form_slope(cfg: &OscillatorConfig, nbar: f64) -> Result<f64> {
    check_nbar(nbar)?;
    if nbar == 0.0 {
        return Err(Error::domain("closed-form slope needs nbar > 0"));
    }
    let cs = cfg.constants();
    let alpha = cfg.omega() / nbar;
    let log_term = (0.5 / nbar).ln_1p();
    Ok(cs.hbar() * alpha / (2.0 * cs.k_b() * log_term * log_term * nbar * (2.0 * nbar + 1.0)))
}

/// Right-hand side of `ħα nbar (nbar + 1/2) dT/dnbar = k_B T²`.
pub fn temperature_ode_rhs(alpha: f64, nbar: f64, t: f64, cs: &ConstantsSet) -> f64 {
    cs.k_b() * t * t / (cs.hbar() * alpha * nbar * (nbar + 0.5))
}

/// Integrated `T(nbar)` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureCurve {
    trajectory: Trajectory,
}

impl TemperatureCurve {
    pub fn nbar(&self) -> &[f64] {
        &self.trajectory.x
    }

    pub fn temperature(&self) -> &[f64] {
        &self.trajectory.y
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.trajectory.x.iter().copied().zip(self.trajectory.y.iter().copied())
    }

    /// Interpolated temperature at `nbar`, inside the integrated span.
    pub fn eval(&self, nbar: f64) -> Option<f64> {
        self.trajectory.eval(nbar)
    }

    pub fn end(&self) -> (f64, f64) {
        self.trajectory.last()
    }
}

/// Integrates `dT/dnbar = k_B T² / (ħα nbar (nbar + 1/2))` from
/// `(nbar_start, t_start)` to `nbar_end`. Either direction is allowed as long
/// as both ends are positive.
pub fn temperature_ode_solve(
    alpha: f64,
    nbar_start: f64,
    nbar_end: f64,
    t_start: f64,
    rtol: f64,
    cs: &ConstantsSet,
) -> Result<TemperatureCurve> {
    if !(nbar_start > 0.0) || !(nbar_end > 0.0) {
        return Err(Error::Singularity(format!(
            "the temperature equation is singular at nbar = 0 (got span [{nbar_start}, {nbar_end}])"
        )));
    }
    if nbar_start == nbar_end {
        return Err(Error::domain("nbar_start and nbar_end must differ"));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    check_temperature(t_start)?;
    if !(rtol > 1e-12 && rtol < 1e-3) {
        return Err(Error::domain(format!("rtol must lie in (1e-12, 1e-3), got {rtol}")));
    }
    let opts = SolverOptions {
        rtol,
        ..SolverOptions::default()
    };
    let trajectory = ode::integrate(
        |nbar, t| temperature_ode_rhs(alpha, nbar, t, cs),
        nbar_start,
        nbar_end,
        t_start,
        opts,
    )?;
    Ok(TemperatureCurve { trajectory })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaLaw {
    /// `π |d|²`, phase-portrait area in the `(q, p/ω)` plane.
    pub area: f64,
    /// `sqrt(ħ/(m ω))`.
    pub l0: f64,
    pub nbar: f64,
    pub entropy: f64,
}

pub fn area_law(cfg: &OscillatorConfig, d_abs: f64) -> Result<AreaLaw> {
    if !(d_abs.is_finite() && d_abs >= 0.0) {
        return Err(Error::domain(format!("|d| must be non-negative, got {d_abs}")));
    }
    let area = std::f64::consts::PI * d_abs * d_abs;
    let l0 = cfg.zero_point_length();
    let cell = std::f64::consts::PI * l0 * l0;
    Ok(AreaLaw {
        area,
        l0,
        nbar: area / (2.0 * cell),
        entropy: cfg.constants().k_b() * area / cell,
    })
}

/// `coth x = 1 + 2 / (e^{2x} - 1)`, accurate at both ends.
fn coth(x: f64) -> f64 {
    1.0 + 2.0 / (2.0 * x).exp_m1()
}

/// `T_Bl = (ħω / 2k_B) coth(ħω / (2 k_B T_hb))`.
pub fn bloch_temperature(cfg: &OscillatorConfig, t_hb: f64) -> Result<f64> {
    check_temperature(t_hb)?;
    let cs = cfg.constants();
    let t0 = cs.hbar() * cfg.omega() / (2.0 * cs.k_b());
    Ok(t0 * coth(t0 / t_hb))
}

/// Gaussian position density of an oscillator in contact with a bath.
pub fn bloch_distribution(cfg: &OscillatorConfig, t_hb: f64, q: f64) -> Result<f64> {
    let t_bl = bloch_temperature(cfg, t_hb)?;
    let stiffness = cfg.mass() * cfg.omega() * cfg.omega();
    let thermal = cfg.constants().k_b() * t_bl;
    Ok((stiffness / (2.0 * std::f64::consts::PI * thermal)).sqrt() * (-stiffness * q * q / (2.0 * thermal)).exp())
}

/// The `nbar = 0` state: `T = ħω/2k_B`, `E = ħω/2`, `F = 0`, `S = k_B`.
pub fn zero_point(cfg: &OscillatorConfig) -> ThermoPoint {
    let cs = cfg.constants();
    let energy = 0.5 * cs.hbar() * cfg.omega();
    ThermoPoint {
        temperature: energy / cs.k_b(),
        ln_q: 0.0,
        free_energy: 0.0,
        entropy: cs.k_b(),
        energy,
    }
}
