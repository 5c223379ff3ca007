//! Physical constants and the two supported unit systems.
//!
//! SI defaults are CODATA 2018. In natural units `hbar = k_B = c = 1`
//! exactly and only `G` may be chosen.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B_SI: f64 = 1.380_649e-23;
/// Speed of light, m/s (exact).
pub const C_SI: f64 = 299_792_458.0;
/// Newtonian constant of gravitation, m³/(kg·s²).
pub const G_SI: f64 = 6.674_30e-11;
/// Electron mass, kg.
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// Nominal solar mass, kg.
pub const SOLAR_MASS_SI: f64 = 1.989e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitSystem {
    #[default]
    Si,
    Natural,
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitSystem::Si => "si",
            UnitSystem::Natural => "natural",
        })
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(UnitSystem::Si),
            "natural" => Ok(UnitSystem::Natural),
            other => Err(Error::domain(format!("unknown unit system `{other}`"))),
        }
    }
}

/// The constants every formula is evaluated with. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsSet {
    hbar: f64,
    k_b: f64,
    c: f64,
    g: f64,
    unit_system: UnitSystem,
}

impl ConstantsSet {
    pub fn si() -> Self {
        Self {
            hbar: HBAR_SI,
            k_b: K_B_SI,
            c: C_SI,
            g: G_SI,
            unit_system: UnitSystem::Si,
        }
    }

    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            k_b: 1.0,
            c: 1.0,
            g: 1.0,
            unit_system: UnitSystem::Natural,
        }
    }

    pub fn for_units(unit_system: UnitSystem) -> Self {
        match unit_system {
            UnitSystem::Si => Self::si(),
            UnitSystem::Natural => Self::natural(),
        }
    }

    /// Fully custom SI-like set. Used by tests to pin exact values.
    pub fn custom(hbar: f64, k_b: f64, c: f64, g: f64) -> Result<Self> {
        let cs = Self {
            hbar,
            k_b,
            c,
            g,
            unit_system: UnitSystem::Si,
        };
        cs.validate()?;
        Ok(cs)
    }

    /// Replace one constant by name (`hbar`, `k_b`, `c`, `G`).
    ///
    /// In natural units only `G` can be overridden.
    pub fn with_override(mut self, name: &str, value: f64) -> Result<Self> {
        let key = name.to_ascii_lowercase();
        if self.unit_system == UnitSystem::Natural && key != "g" {
            return Err(Error::domain(format!(
                "`{name}` is fixed to 1 in natural units; only G may be overridden"
            )));
        }
        match key.as_str() {
            "hbar" => self.hbar = value,
            "k_b" | "kb" => self.k_b = value,
            "c" => self.c = value,
            "g" => self.g = value,
            _ => return Err(Error::domain(format!("unknown constant `{name}`"))),
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("k_b", self.k_b), ("c", self.c), ("G", self.g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("constant {name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn unit_system(&self) -> UnitSystem {
        self.unit_system
    }

    /// `sqrt(hbar G / c^3)`.
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.g / (self.c * self.c * self.c)).sqrt()
    }

    /// `hbar / (m c)`.
    pub fn compton_wavelength(&self, mass: f64) -> Result<f64> {
        if !(mass > 0.0) {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        Ok(self.hbar / (mass * self.c))
    }
}

impl Default for ConstantsSet {
    fn default() -> Self {
        Self::si()
    }
}
