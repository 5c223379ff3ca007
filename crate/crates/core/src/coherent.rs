//! Coherent states of a harmonic oscillator and their Fock-space statistics.
//!
//! The diagonal of `|d><d|` in the number basis is Poisson with mean
//! `nbar = m ω |d|² / (2ħ)`. The f-independent prefactor of the overlap
//! `|<f|d>|²` is taken as `1/Q`, so `ln Q = nbar`.

use crate::constants::ConstantsSet;
use crate::error::{Error, Result};

/// Complex displacement `d` stored as a real/imaginary pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Displacement {
    pub re: f64,
    pub im: f64,
}

impl Displacement {
    pub const ZERO: Displacement = Displacement { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn from_polar(r: f64, phase: f64) -> Self {
        Self {
            re: r * phase.cos(),
            im: r * phase.sin(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl std::ops::Sub for Displacement {
    type Output = Displacement;

    fn sub(self, rhs: Displacement) -> Displacement {
        Displacement::new(self.re - rhs.re, self.im - rhs.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorConfig {
    mass: f64,
    omega: f64,
    cs: ConstantsSet,
}

impl OscillatorConfig {
    pub fn new(mass: f64, omega: f64, cs: ConstantsSet) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain(format!("oscillator mass must be positive, got {mass}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::domain(format!("angular frequency must be positive, got {omega}")));
        }
        Ok(Self { mass, omega, cs })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn constants(&self) -> &ConstantsSet {
        &self.cs
    }

    /// `m ω / (2ħ)`, the factor multiplying `|d|²` in every exponent.
    fn phase_space_scale(&self) -> f64 {
        self.mass * self.omega / (2.0 * self.cs.hbar())
    }

    /// Zero-point amplitude `sqrt(ħ/(m ω))`.
    pub fn zero_point_length(&self) -> f64 {
        (self.cs.hbar() / (self.mass * self.omega)).sqrt()
    }

    /// Magnitude of `d` that yields the given mean occupation.
    pub fn amplitude_for_occupation(&self, nbar: f64) -> Result<f64> {
        check_nbar(nbar)?;
        Ok((nbar / self.phase_space_scale()).sqrt())
    }
}

/// A coherent state `|d>` together with its cached mean occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    d: Displacement,
    nbar: f64,
}

impl CoherentAmplitude {
    pub fn new(cfg: &OscillatorConfig, d: Displacement) -> Self {
        Self {
            d,
            nbar: occupation_from_amplitude(cfg, d),
        }
    }

    pub fn displacement(&self) -> Displacement {
        self.d
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }
}

pub fn occupation_from_amplitude(cfg: &OscillatorConfig, d: Displacement) -> f64 {
    cfg.mass * cfg.omega * d.norm_sqr() / (2.0 * cfg.cs.hbar())
}

/// `|<f|d>|² = exp(-(m ω / 2ħ) |d - f|²)`.
pub fn overlap_sq(cfg: &OscillatorConfig, d: Displacement, f: Displacement) -> f64 {
    (-cfg.phase_space_scale() * (d - f).norm_sqr()).exp()
}

/// `ln Q = nbar`. Q itself is never formed.
pub fn log_partition_function(nbar: f64) -> f64 {
    nbar
}

/// `ħ ω (nbar + 1/2)`.
pub fn mean_energy(cfg: &OscillatorConfig, nbar: f64) -> f64 {
    cfg.cs.hbar() * cfg.omega * (nbar + 0.5)
}

pub(crate) fn check_nbar(nbar: f64) -> Result<()> {
    if nbar.is_finite() && nbar >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("mean occupation must be finite and non-negative, got {nbar}")))
    }
}

/// Truncated Poisson weights `ρ_nn` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockWeights {
    nbar: f64,
    weights: Vec<f64>,
}

impl FockWeights {
    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// `Σ ρ_nn f(n)` over the retained weights.
    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(n, w)| w * f(n)).sum()
    }
}

/// Ratio at which the running mantissa is rescaled to stay in range.
const RESCALE_THRESHOLD: f64 = 1e250;
/// Stop extending once the last weight is below `tol * TAIL_SAFETY`.
const TAIL_SAFETY: f64 = 1e-3;

/// Poisson weights by multiplicative recurrence `ρ_{n+1} = ρ_n nbar / (n+1)`.
///
/// The recurrence runs on a mantissa with a separately tracked log-scale so
/// that `e^{-nbar}` never underflows for large `nbar`; the normalising factor
/// is folded in term by term as `exp(shift - nbar)`.
pub fn fock_weights(nbar: f64, tol: f64) -> Result<FockWeights> {
    check_nbar(nbar)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain(format!("truncation tolerance must lie in (0, 1), got {tol}")));
    }
    if nbar == 0.0 {
        return Ok(FockWeights {
            nbar,
            weights: vec![1.0],
        });
    }

    let initial = (nbar + 10.0 * nbar.sqrt() + 20.0).ceil() as usize;
    let mut weights = Vec::with_capacity(initial + 1);

    let mut mantissa = 1.0_f64;
    // rescale count; shift = rescales * ln(threshold), never accumulated
    let mut rescales = 0u32;
    let mut scale = (-nbar).exp();
    weights.push(scale);

    let mut n = 0usize;
    loop {
        mantissa *= nbar / (n + 1) as f64;
        n += 1;
        if mantissa > RESCALE_THRESHOLD {
            mantissa /= RESCALE_THRESHOLD;
            rescales += 1;
            scale = (f64::from(rescales) * RESCALE_THRESHOLD.ln() - nbar).exp();
        }
        let w = mantissa * scale;
        weights.push(w);
        if n >= initial && w < tol * TAIL_SAFETY {
            break;
        }
    }

    Ok(FockWeights { nbar, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn natural(mass: f64, omega: f64) -> OscillatorConfig {
        OscillatorConfig::new(mass, omega, ConstantsSet::natural()).unwrap()
    }

    #[test]
    fn occupation_examples() {
        let cfg = natural(1.0, 2.0);
        assert_eq!(occupation_from_amplitude(&cfg, Displacement::ZERO), 0.0);
        assert_eq!(occupation_from_amplitude(&cfg, Displacement::real(1.0)), 1.0);
    }

    #[test]
    fn occupation_matches_fock_mean() {
        let cfg = natural(1.3, 0.7);
        let d = Displacement::new(2.1, -1.4);
        let nbar = occupation_from_amplitude(&cfg, d);
        let fw = fock_weights(nbar, 1e-14).unwrap();
        assert_relative_eq!(fw.expectation(|n| n as f64), nbar, max_relative = 1e-10);
    }

    #[test]
    fn vacuum_weights() {
        let fw = fock_weights(0.0, 1e-12).unwrap();
        assert_eq!(fw.weights(), &[1.0]);
        assert_eq!(fw.n_max(), 0);
    }

    #[test]
    fn weight_zero_at_unit_mean() {
        let fw = fock_weights(1.0, 1e-12).unwrap();
        assert!((fw.weights()[0] - 0.367_879_441_2).abs() < 1e-9);
    }

    #[test]
    fn tail_mass_at_thirty() {
        let fw = fock_weights(30.0, 1e-12).unwrap();
        let total: f64 = fw.weights().iter().sum();
        assert!((1.0 - total).abs() < 1e-12, "{}", 1.0 - total);
    }

    #[test]
    fn poisson_moments() {
        for nbar in [0.1, 1.0, 10.0, 100.0] {
            let fw = fock_weights(nbar, 1e-12).unwrap();
            let norm: f64 = fw.weights().iter().sum();
            assert!((norm - 1.0).abs() < 1e-12, "nbar {nbar}: {norm}");
            let mean = fw.expectation(|n| n as f64);
            let var = fw.expectation(|n| (n as f64 - nbar).powi(2));
            assert_relative_eq!(mean, nbar, max_relative = 1e-8);
            assert_relative_eq!(var, nbar, max_relative = 1e-8);
        }
    }

    #[test]
    fn large_occupation_does_not_underflow() {
        let fw = fock_weights(1e6, 1e-12).unwrap();
        let norm: f64 = fw.weights().iter().sum();
        assert!((norm - 1.0).abs() < 1e-9, "{norm}");
        assert!(fw.weights().iter().all(|w| (0.0..=1.0).contains(w)));
    }

    #[test]
    fn recurrence_holds() {
        let fw = fock_weights(7.5, 1e-12).unwrap();
        for (n, pair) in fw.weights().windows(2).enumerate() {
            if pair[0] > 1e-300 {
                assert_relative_eq!(pair[1], pair[0] * 7.5 / (n + 1) as f64, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn weights_reject_bad_input() {
        assert!(fock_weights(-1.0, 1e-12).is_err());
        assert!(fock_weights(1.0, 0.0).is_err());
        assert!(fock_weights(1.0, 1.0).is_err());
        assert!(fock_weights(f64::NAN, 1e-3).is_err());
    }

    #[test]
    fn overlap_examples() {
        let cfg = natural(1.0, 2.0);
        let d = Displacement::new(0.8, 0.3);
        assert_eq!(overlap_sq(&cfg, d, d), 1.0);
        let nbar = occupation_from_amplitude(&cfg, d);
        assert_relative_eq!(overlap_sq(&cfg, d, Displacement::ZERO), (-nbar).exp(), max_relative = 1e-15);
    }

    #[test]
    fn partition_function_matches_vacuum_overlap() {
        let cfg = natural(1.0, 2.0);
        let d = Displacement::real(1.0);
        let nbar = occupation_from_amplitude(&cfg, d);
        assert_eq!(log_partition_function(nbar), 1.0);
        assert_relative_eq!(
            log_partition_function(nbar).exp(),
            1.0 / overlap_sq(&cfg, d, Displacement::ZERO),
            max_relative = 1e-12
        );
        assert_eq!(log_partition_function(0.0), 0.0);
        assert_eq!(log_partition_function(1e6), 1e6);
    }

    #[test]
    fn mean_energy_examples() {
        let cfg = natural(1.0, 1.0);
        assert_eq!(mean_energy(&cfg, 0.0), 0.5);
        assert_eq!(mean_energy(&cfg, 2.0), 2.5);
        for nbar in [0.3, 4.0, 37.0, 100.0] {
            let fw = fock_weights(nbar, 1e-14).unwrap();
            let e = fw.expectation(|n| n as f64 + 0.5);
            assert_relative_eq!(mean_energy(&cfg, nbar), e, max_relative = 1e-9);
        }
    }

    #[test]
    fn amplitude_round_trip() {
        let cfg = OscillatorConfig::new(2.0e-26, 3.0e12, ConstantsSet::si()).unwrap();
        let d = cfg.amplitude_for_occupation(12.5).unwrap();
        assert_relative_eq!(occupation_from_amplitude(&cfg, Displacement::real(d)), 12.5, max_relative = 1e-14);
    }

    #[test]
    fn config_validation() {
        let cs = ConstantsSet::natural();
        assert!(OscillatorConfig::new(0.0, 1.0, cs).is_err());
        assert!(OscillatorConfig::new(1.0, -1.0, cs).is_err());
        assert!(OscillatorConfig::new(f64::INFINITY, 1.0, cs).is_err());
    }

    proptest! {
        #[test]
        fn overlap_in_unit_interval(
            dr in -5.0..5.0f64, di in -5.0..5.0f64,
            fr in -5.0..5.0f64, fi in -5.0..5.0f64,
        ) {
            let cfg = natural(1.0, 1.0);
            let d = Displacement::new(dr, di);
            let f = Displacement::new(fr, fi);
            let o = overlap_sq(&cfg, d, f);
            prop_assert!(o > 0.0 && o <= 1.0);
            prop_assert_eq!(o, overlap_sq(&cfg, f, d));
            if d != f && (d - f).norm_sqr() > 1e-12 {
                prop_assert!(o < 1.0);
            }
        }

        #[test]
        fn occupation_is_phase_invariant(r in 0.0..10.0f64, phase in 0.0..std::f64::consts::TAU) {
            let cfg = natural(1.7, 0.9);
            let a = occupation_from_amplitude(&cfg, Displacement::real(r));
            let b = occupation_from_amplitude(&cfg, Displacement::from_polar(r, phase));
            prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
        }

        #[test]
        fn cached_nbar_is_recomputable(dr in -5.0..5.0f64, di in -5.0..5.0f64) {
            let cfg = natural(0.4, 3.0);
            let amp = CoherentAmplitude::new(&cfg, Displacement::new(dr, di));
            prop_assert_eq!(amp.nbar(), occupation_from_amplitude(&cfg, amp.displacement()));
        }
    }
}
