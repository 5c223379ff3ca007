//! Horizon thermodynamics of a Schwarzschild black hole and the patch model
//! of the horizon area.
//!
//! With `α = β ln κ` the patch count `Q = κ^{A/(α λ_P²)}` collapses to
//! `Q = e^{nbar}` with `nbar = A/(β λ_P²)`, the coherent-state form. Two
//! routes lead back to `S = k_B A / (4 λ_P²)`:
//!
//! 1. Boltzmann, `S = k_B ln Q = k_B nbar`, which needs `β = 4`;
//! 2. coherent state with `nbar ∝ T`, `S = 2 k_B nbar`, which needs `β = 8`.
//!
//! All state counts are kept as logarithms.

use crate::coherent::log_partition_function;
use crate::constants::ConstantsSet;
use crate::error::{Error, Result};

/// Relative tolerance used by [`coherent_equivalence_report`] to decide
/// whether a route reproduces the area-law entropy.
pub const ROUTE_MATCH_TOLERANCE: f64 = 1e-12;

/// Number of states per horizon patch.
///
/// Counting states requires an integer `κ ≥ 2`; [`Kappa::real`] relaxes this
/// to any real `κ > 1` for identity checks such as `κ = e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa(f64);

impl Kappa {
    pub fn states(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("kappa counts states per patch and must be >= 2, got {n}")));
        }
        Ok(Self(n as f64))
    }

    pub fn real(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 1.0) {
            return Err(Error::domain(format!("real-valued kappa must exceed 1, got {x}")));
        }
        Ok(Self(x))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn ln(&self) -> f64 {
        self.0.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HorizonSource {
    Mass(f64),
    Area(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackHoleConfig {
    source: HorizonSource,
    area: f64,
    beta: f64,
    kappa: Kappa,
    cs: ConstantsSet,
}

impl BlackHoleConfig {
    pub fn new(source: HorizonSource, beta: f64, kappa: Kappa, cs: ConstantsSet) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::domain(format!("beta must be positive, got {beta}")));
        }
        let area = match source {
            HorizonSource::Mass(m) => horizon_area(m, &cs)?,
            HorizonSource::Area(a) => {
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::domain(format!("horizon area must be positive, got {a}")));
                }
                a
            }
        };
        Ok(Self {
            source,
            area,
            beta,
            kappa,
            cs,
        })
    }

    pub fn source(&self) -> HorizonSource {
        self.source
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn constants(&self) -> &ConstantsSet {
        &self.cs
    }
}

/// `16π G² M² / c⁴`, evaluated as `4π r_s²` with `r_s = 2GM/c²`.
pub fn horizon_area(mass: f64, cs: &ConstantsSet) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::domain(format!("black-hole mass must be positive, got {mass}")));
    }
    let r_s = 2.0 * cs.g() * mass / (cs.c() * cs.c());
    Ok(4.0 * std::f64::consts::PI * r_s * r_s)
}

pub fn schwarzschild_radius(mass: f64, cs: &ConstantsSet) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::domain(format!("black-hole mass must be positive, got {mass}")));
    }
    Ok(2.0 * cs.g() * mass / (cs.c() * cs.c()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BhEntropy {
    /// `S / k_B`.
    pub ratio: f64,
    pub ln_ratio: f64,
    pub entropy: f64,
}

/// `S = k_B A / (4 λ_P²)`.
pub fn bh_entropy(area: f64, cs: &ConstantsSet) -> Result<BhEntropy> {
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::domain(format!("horizon area must be positive, got {area}")));
    }
    let lp = cs.planck_length();
    let ln_ratio = area.ln() - 4f64.ln() - 2.0 * lp.ln();
    let ratio = area / (4.0 * lp * lp);
    Ok(BhEntropy {
        ratio,
        ln_ratio,
        entropy: cs.k_b() * ratio,
    })
}

/// `ln Q = (A / (α λ_P²)) ln κ`.
pub fn bekenstein_log_states(area: f64, kappa: Kappa, alpha: f64, cs: &ConstantsSet) -> Result<f64> {
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::domain(format!("horizon area must be positive, got {area}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("patch area factor alpha must be positive, got {alpha}")));
    }
    let lp = cs.planck_length();
    Ok(area / (alpha * lp * lp) * kappa.ln())
}

/// `S = k_B ln Q`.
pub fn bekenstein_entropy(log_states: f64, cs: &ConstantsSet) -> Result<f64> {
    if !(log_states >= 0.0) {
        return Err(Error::domain(format!("log state count must be non-negative, got {log_states}")));
    }
    Ok(cs.k_b() * log_states)
}

/// `α = β ln κ`.
pub fn alpha_from_kappa(beta: f64, kappa: Kappa) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    Ok(beta * kappa.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub area: f64,
    pub beta: f64,
    pub kappa: f64,
    pub alpha: f64,
    /// `A / (β λ_P²)`.
    pub nbar: f64,
    /// `ln Q` from the patch count.
    pub log_states: f64,
    /// Target `k_B A / (4 λ_P²)`.
    pub target_entropy: f64,
    pub target_ratio: f64,
    /// Boltzmann route, `k_B ln Q`.
    pub route1_entropy: f64,
    /// Coherent-state route, `2 k_B nbar`.
    pub route2_entropy: f64,
    pub route1_matches: bool,
    pub route2_matches: bool,
    /// Largest relative spread of `ln Q` over `κ ∈ {2, 3, 10, 100}`.
    pub kappa_spread: f64,
}

const KAPPA_PROBES: [u64; 4] = [2, 3, 10, 100];

pub fn coherent_equivalence_report(cfg: &BlackHoleConfig) -> Result<EquivalenceReport> {
    let cs = cfg.constants();
    let area = cfg.area();
    let lp = cs.planck_length();
    let alpha = alpha_from_kappa(cfg.beta, cfg.kappa)?;
    let log_states = bekenstein_log_states(area, cfg.kappa, alpha, cs)?;
    let nbar = area / (cfg.beta * lp * lp);
    let target = bh_entropy(area, cs)?;

    let route1_entropy = bekenstein_entropy(log_states, cs)?;
    let route2_entropy = 2.0 * cs.k_b() * log_partition_function(nbar);
    let matches = |s: f64| ((s - target.entropy) / target.entropy).abs() <= ROUTE_MATCH_TOLERANCE;

    let mut kappa_spread = 0.0_f64;
    for k in KAPPA_PROBES {
        let kappa = Kappa::states(k)?;
        let probe = bekenstein_log_states(area, kappa, alpha_from_kappa(cfg.beta, kappa)?, cs)?;
        kappa_spread = kappa_spread.max(((probe - nbar) / nbar).abs());
    }

    Ok(EquivalenceReport {
        area,
        beta: cfg.beta,
        kappa: cfg.kappa.value(),
        alpha,
        nbar,
        log_states,
        target_entropy: target.entropy,
        target_ratio: target.ratio,
        route1_entropy,
        route2_entropy,
        route1_matches: matches(route1_entropy),
        route2_matches: matches(route2_entropy),
        kappa_spread,
    })
}
