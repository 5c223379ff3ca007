//! Coherent-state thermodynamics of a scalar field around a static source.
//!
//! The number of virtual quanta is Poisson with mean `nbar = Σ nbar_i`, so
//! the oscillator relations carry over with `ω` replaced by the
//! occupation-weighted mean frequency. The zero-point term of the energy is a
//! single `ħω̄/2`, not a per-mode sum.

use std::io::Read;
use std::path::Path;

use crate::constants::ConstantsSet;
use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub nbar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    modes: Vec<Mode>,
    nbar_total: f64,
}

impl ModeSpectrum {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if !(m.omega.is_finite() && m.omega > 0.0) {
                return Err(Error::domain(format!("mode {i}: omega must be positive, got {}", m.omega)));
            }
            if !(m.nbar.is_finite() && m.nbar >= 0.0) {
                return Err(Error::domain(format!("mode {i}: nbar must be non-negative, got {}", m.nbar)));
            }
        }
        let nbar_total = modes.iter().map(|m| m.nbar).sum();
        Ok(Self { modes, nbar_total })
    }

    pub fn single(omega: f64, nbar: f64) -> Result<Self> {
        Self::new(vec![Mode { omega, nbar }])
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(omega, nbar)| Mode { omega, nbar }).collect())
    }

    /// Reads `omega,nbar` CSV. Rows are numbered from 1 after the header.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse { row: 0, msg: e.to_string() })?;
        if headers.len() != 2 || &headers[0] != "omega" || &headers[1] != "nbar" {
            return Err(Error::Parse {
                row: 0,
                msg: format!("expected header `omega,nbar`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut modes = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
            if record.len() != 2 {
                return Err(Error::Parse {
                    row,
                    msg: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let field = |k: usize, name: &str| -> Result<f64> {
                let v: f64 = record[k].parse().map_err(|_| Error::Parse {
                    row,
                    msg: format!("{name} `{}` is not a number", &record[k]),
                })?;
                if v.is_nan() {
                    return Err(Error::Parse { row, msg: format!("{name} is NaN") });
                }
                Ok(v)
            };
            let omega = field(0, "omega")?;
            let nbar = field(1, "nbar")?;
            if !(omega.is_finite() && omega > 0.0) {
                return Err(Error::Parse {
                    row,
                    msg: format!("omega must be positive, got {omega}"),
                });
            }
            if !(nbar.is_finite() && nbar >= 0.0) {
                return Err(Error::Parse {
                    row,
                    msg: format!("nbar must be non-negative, got {nbar}"),
                });
            }
            modes.push(Mode { omega, nbar });
        }
        Self::new(modes)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Parse {
            row: 0,
            msg: format!("cannot open {}: {e}", path.display()),
        })?;
        Self::from_csv_reader(file)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn nbar_total(&self) -> f64 {
        self.nbar_total
    }

    pub fn scaled_frequencies(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.modes
                .iter()
                .map(|m| Mode {
                    omega: m.omega * factor,
                    nbar: m.nbar,
                })
                .collect(),
        )
    }
}

/// `ω̄ = Σ ω_i nbar_i / nbar`.
pub fn mean_frequency(spec: &ModeSpectrum) -> Result<f64> {
    if !(spec.nbar_total > 0.0) {
        return Err(Error::UndefinedMean);
    }
    let weighted: f64 = spec.modes.iter().map(|m| m.omega * m.nbar).sum();
    Ok(weighted / spec.nbar_total)
}

/// `E = nbar ħω̄ + ħω̄/2`.
pub fn field_energy(spec: &ModeSpectrum, cs: &ConstantsSet) -> Result<f64> {
    let omega_bar = mean_frequency(spec)?;
    Ok(cs.hbar() * omega_bar * (spec.nbar_total + 0.5))
}

pub const DEFAULT_HIGH_OCCUPATION_THRESHOLD: f64 = 10.0;

/// A value together with the validity notes that apply to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Qualified {
    pub value: f64,
    pub warnings: Vec<String>,
}

/// `T = ħω̄ / k_B`, valid for `nbar ≫ 1/2`. Below `threshold` a warning is
/// attached rather than an error raised.
pub fn field_temperature(spec: &ModeSpectrum, cs: &ConstantsSet, threshold: f64) -> Result<Qualified> {
    let omega_bar = mean_frequency(spec)?;
    let mut warnings = Vec::new();
    if spec.nbar_total < threshold {
        warnings.push(format!(
            "field temperature assumes nbar >> 1/2; total nbar = {} is below the threshold {threshold}",
            spec.nbar_total
        ));
    }
    Ok(Qualified {
        value: cs.hbar() * omega_bar / cs.k_b(),
        warnings,
    })
}

/// `S = 2 k_B nbar`.
pub fn field_entropy(spec: &ModeSpectrum, cs: &ConstantsSet) -> f64 {
    2.0 * cs.k_b() * spec.nbar_total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceProfile {
    /// Constant density `3 / (4π d³)` inside radius `d`.
    UniformBall,
    PointLike,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalSource {
    g: f64,
    radius_d: f64,
    lambda_c: f64,
    profile: SourceProfile,
}

impl SphericalSource {
    pub fn new(g: f64, radius_d: f64, lambda_c: f64, profile: SourceProfile) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::domain("coupling g must be finite"));
        }
        if !(radius_d.is_finite() && radius_d >= 0.0) {
            return Err(Error::domain(format!("source radius must be non-negative, got {radius_d}")));
        }
        if !(lambda_c.is_finite() && lambda_c > 0.0) {
            return Err(Error::domain(format!("Compton wavelength must be positive, got {lambda_c}")));
        }
        if profile == SourceProfile::UniformBall && radius_d == 0.0 {
            return Err(Error::domain("a uniform ball needs a positive radius"));
        }
        Ok(Self {
            g,
            radius_d,
            lambda_c,
            profile,
        })
    }

    pub fn point(g: f64, lambda_c: f64) -> Result<Self> {
        Self::new(g, 0.0, lambda_c, SourceProfile::PointLike)
    }

    pub fn uniform_ball(g: f64, radius_d: f64, lambda_c: f64) -> Result<Self> {
        Self::new(g, radius_d, lambda_c, SourceProfile::UniformBall)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn radius(&self) -> f64 {
        self.radius_d
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    pub fn profile(&self) -> SourceProfile {
        self.profile
    }
}

const MAX_QUAD_INTERVALS: usize = 2000;

/// Ground-state field `g ∫ d³r' e^{-|r-r'|/λ_C} / |r-r'| ϱ(r')` outside the
/// source, with `∫ ϱ = 1`.
///
/// For the uniform ball the angular integral is done in closed form,
/// leaving a radial integral over shells that is evaluated adaptively.
pub fn yukawa_potential(src: &SphericalSource, r: f64, quad_tol: f64) -> Result<f64> {
    if !(r > src.radius_d) {
        return Err(Error::OutsideDomain { r, radius: src.radius_d });
    }
    if !(quad_tol > 1e-12 && quad_tol < 1e-3) {
        return Err(Error::domain(format!("quadrature tolerance must lie in (1e-12, 1e-3), got {quad_tol}")));
    }
    let lambda = src.lambda_c;
    match src.profile {
        SourceProfile::PointLike => Ok(src.g * (-r / lambda).exp() / r),
        SourceProfile::UniformBall => {
            let d = src.radius_d;
            let density = 3.0 / (4.0 * std::f64::consts::PI * d * d * d);
            // shell of radius s: ∫dΩ e^{-R/λ}/R = (2πλ/(r s)) e^{-(r-s)/λ} (1 - e^{-2s/λ})
            let shell = |s: f64| s * (-(r - s) / lambda).exp() * -(-2.0 * s / lambda).exp_m1();
            let radial = quad::integrate(shell, 0.0, d, quad_tol, 0.0, MAX_QUAD_INTERVALS)?;
            Ok(src.g * density * 2.0 * std::f64::consts::PI * lambda / r * radial.value)
        }
    }
}

/// `prefactor · 4π d² / λ_C²`. Warns when `d < 5 λ_C`, outside the thin-layer
/// regime the estimate assumes.
pub fn occupancy_estimate(radius_d: f64, lambda_c: f64, prefactor: f64) -> Result<Qualified> {
    if !(radius_d.is_finite() && radius_d > 0.0) {
        return Err(Error::domain(format!("source radius must be positive, got {radius_d}")));
    }
    if !(lambda_c.is_finite() && lambda_c > 0.0) {
        return Err(Error::domain(format!("Compton wavelength must be positive, got {lambda_c}")));
    }
    if !(prefactor.is_finite() && prefactor > 0.0) {
        return Err(Error::domain(format!("prefactor must be positive, got {prefactor}")));
    }
    let mut warnings = vec![format!(
        "occupancy is an order-of-magnitude estimate; prefactor = {prefactor} is a free parameter"
    )];
    if radius_d < 5.0 * lambda_c {
        warnings.push(format!(
            "estimate assumes radius >> Compton wavelength; radius/lambda_C = {}",
            radius_d / lambda_c
        ));
    }
    let area = 4.0 * std::f64::consts::PI * radius_d * radius_d;
    Ok(Qualified {
        value: prefactor * area / (lambda_c * lambda_c),
        warnings,
    })
}

/// `2 k_B` times [`occupancy_estimate`].
pub fn field_entropy_area(radius_d: f64, lambda_c: f64, prefactor: f64, cs: &ConstantsSet) -> Result<Qualified> {
    let est = occupancy_estimate(radius_d, lambda_c, prefactor)?;
    Ok(Qualified {
        value: 2.0 * cs.k_b() * est.value,
        warnings: est.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{mean_energy, OscillatorConfig};
    use crate::thermo::temperature_closed_form;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn nat() -> ConstantsSet {
        ConstantsSet::natural()
    }

    #[test]
    fn mean_frequency_examples() {
        assert_eq!(mean_frequency(&ModeSpectrum::single(3.0, 5.0).unwrap()).unwrap(), 3.0);
        assert_eq!(mean_frequency(&ModeSpectrum::from_pairs(&[(1.0, 1.0), (3.0, 1.0)]).unwrap()).unwrap(), 2.0);
        let w = mean_frequency(&ModeSpectrum::from_pairs(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap()).unwrap();
        assert!((w - 14.0 / 6.0).abs() < 1e-12);
        let empty = ModeSpectrum::from_pairs(&[(1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert_eq!(mean_frequency(&empty), Err(Error::UndefinedMean));
    }

    #[test]
    fn energy_examples() {
        let cs = nat();
        let two = ModeSpectrum::from_pairs(&[(1.0, 1.0), (3.0, 1.0)]).unwrap();
        assert_eq!(field_energy(&two, &cs).unwrap(), 5.0);
        let scaled = two.scaled_frequencies(2.5).unwrap();
        assert_relative_eq!(field_energy(&scaled, &cs).unwrap(), 12.5, max_relative = 1e-15);
    }

    #[test]
    fn single_mode_matches_oscillator() {
        let cs = ConstantsSet::si();
        let (omega, nbar) = (2.3e13, 17.0);
        let spec = ModeSpectrum::single(omega, nbar).unwrap();
        let cfg = OscillatorConfig::new(1e-26, omega, cs).unwrap();
        assert_relative_eq!(field_energy(&spec, &cs).unwrap(), mean_energy(&cfg, nbar), max_relative = 1e-14);
        assert_relative_eq!(field_entropy(&spec, &cs), 2.0 * cs.k_b() * nbar, max_relative = 1e-14);
    }

    #[test]
    fn temperature_examples() {
        let cs = nat();
        let t = field_temperature(&ModeSpectrum::single(1.0, 100.0).unwrap(), &cs, 10.0).unwrap();
        assert_eq!(t.value, 1.0);
        assert!(t.warnings.is_empty());
        let two = field_temperature(&ModeSpectrum::from_pairs(&[(1.0, 1.0), (3.0, 1.0)]).unwrap(), &cs, 10.0).unwrap();
        assert_eq!(two.value, 2.0);
        assert_eq!(two.warnings.len(), 1);

        let cfg = OscillatorConfig::new(1.0, 1.0, cs).unwrap();
        let t50 = temperature_closed_form(&cfg, 50.0).unwrap();
        let tf = field_temperature(&ModeSpectrum::single(1.0, 50.0).unwrap(), &cs, 10.0).unwrap();
        assert!((t50 / tf.value - 1.0).abs() < 0.01);
        assert!((t50 / tf.value - 1.00499).abs() < 1e-5);
    }

    #[test]
    fn entropy_examples() {
        let cs = nat();
        assert_eq!(field_entropy(&ModeSpectrum::new(vec![]).unwrap(), &cs), 0.0);
        let s = ModeSpectrum::from_pairs(&[(1.0, 3.0), (2.0, 4.0)]).unwrap();
        assert_eq!(field_entropy(&s, &cs), 14.0);
    }

    #[test]
    fn csv_parsing() {
        let s = ModeSpectrum::from_csv_reader("omega,nbar\n1,1\n3,1\n".as_bytes()).unwrap();
        assert_eq!(s.modes().len(), 2);
        assert_eq!(s.nbar_total(), 2.0);

        let bad = ModeSpectrum::from_csv_reader("omega,nbar\n1,1\n-3,1\n".as_bytes()).unwrap_err();
        assert_eq!(bad, Error::Parse { row: 2, msg: "omega must be positive, got -3".into() });
        let nan = ModeSpectrum::from_csv_reader("omega,nbar\nNaN,1\n".as_bytes()).unwrap_err();
        assert!(matches!(nan, Error::Parse { row: 1, .. }));
        let neg = ModeSpectrum::from_csv_reader("omega,nbar\n1,-0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(neg, Error::Parse { row: 1, .. }));
        let word = ModeSpectrum::from_csv_reader("omega,nbar\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(word, Error::Parse { row: 1, .. }));
        let header = ModeSpectrum::from_csv_reader("w,n\n1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(header, Error::Parse { row: 0, .. }));
    }

    #[test]
    fn point_source_value() {
        let src = SphericalSource::point(1.0, 1.0).unwrap();
        let v = yukawa_potential(&src, 1.0, 1e-10).unwrap();
        assert!((v - 0.367_879_4).abs() < 1e-7);
    }

    #[test]
    fn small_ball_is_point_like() {
        let lambda = 1.0;
        let ball = SphericalSource::uniform_ball(1.0, lambda / 100.0, lambda).unwrap();
        let point = SphericalSource::point(1.0, lambda).unwrap();
        let r = 10.0 * lambda;
        let a = yukawa_potential(&ball, r, 1e-10).unwrap();
        let b = yukawa_potential(&point, r, 1e-10).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-4);
    }

    #[test]
    fn ball_matches_form_factor() {
        // exterior field of a uniform ball: point value times 3(cosh x · x - sinh x)/x³, x = d/λ
        let (d, lambda, r) = (1.0, 0.1, 2.0);
        let ball = SphericalSource::uniform_ball(1.0, d, lambda).unwrap();
        let x: f64 = d / lambda;
        let form = 3.0 * (x * x.cosh() - x.sinh()) / x.powi(3);
        let expected = form * (-r / lambda).exp() / r;
        assert_relative_eq!(yukawa_potential(&ball, r, 1e-10).unwrap(), expected, max_relative = 1e-9);
    }

    #[test]
    fn yukawa_domain() {
        let ball = SphericalSource::uniform_ball(1.0, 1.0, 0.1).unwrap();
        assert!(matches!(yukawa_potential(&ball, 1.0, 1e-8), Err(Error::OutsideDomain { .. })));
        assert!(matches!(yukawa_potential(&ball, 0.5, 1e-8), Err(Error::OutsideDomain { .. })));
        assert!(yukawa_potential(&ball, 2.0, 1e-2).is_err());
        assert!(SphericalSource::uniform_ball(1.0, 0.0, 1.0).is_err());
        assert!(SphericalSource::point(1.0, 0.0).is_err());
    }

    #[test]
    fn occupancy_examples() {
        let unit = occupancy_estimate(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(unit.value, 4.0 * std::f64::consts::PI, max_relative = 1e-15);
        assert_eq!(unit.warnings.len(), 2);
        let a = occupancy_estimate(20.0, 1.0, 1.0).unwrap();
        let b = occupancy_estimate(40.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(b.value, 4.0 * a.value, max_relative = 1e-15);
        assert_eq!(a.warnings.len(), 1);
        let big = occupancy_estimate(10.0, 0.1, 1.0).unwrap();
        assert!((big.value - 1.2566e5).abs() < 1.0 * 10.0, "{}", big.value);
        assert!((big.value - 4.0 * std::f64::consts::PI * 100.0 / 0.01).abs() < 1e-6);
        assert!(occupancy_estimate(0.0, 1.0, 1.0).is_err());
        assert!(occupancy_estimate(1.0, -1.0, 1.0).is_err());
        assert!(occupancy_estimate(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn area_entropy_examples() {
        let cs = nat();
        let s = field_entropy_area(10.0, 0.1, 1.0, &cs).unwrap();
        assert!((s.value - 2.5133e5).abs() < 1e1);
        let n = occupancy_estimate(10.0, 0.1, 1.0).unwrap();
        let spec = ModeSpectrum::single(1.0, n.value).unwrap();
        assert_eq!(s.value, field_entropy(&spec, &cs));
        let s2 = field_entropy_area(20.0, 0.1, 1.0, &cs).unwrap();
        assert_relative_eq!(s2.value, 4.0 * s.value, max_relative = 1e-15);
        assert!(s.warnings.iter().any(|w| w.contains("prefactor")));
    }

    proptest! {
        #[test]
        fn mean_frequency_is_bounded(modes in prop::collection::vec((0.01..100.0f64, 0.0..50.0f64), 1..12)) {
            let mut modes = modes;
            modes[0].1 += 0.1;
            let spec = ModeSpectrum::from_pairs(&modes).unwrap();
            let w = mean_frequency(&spec).unwrap();
            let lo = modes.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
            let hi = modes.iter().map(|m| m.0).fold(0.0, f64::max);
            prop_assert!(w >= lo * (1.0 - 1e-14) && w <= hi * (1.0 + 1e-14));
        }

        #[test]
        fn point_screening_is_exact(r in 0.01..30.0f64, lambda in 0.1..10.0f64) {
            let src = SphericalSource::point(1.0, lambda).unwrap();
            let v = yukawa_potential(&src, r, 1e-10).unwrap();
            prop_assert!((v * r * (r / lambda).exp() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn ball_potential_decreases(d in 0.05..2.0f64, lambda in 0.05..2.0f64, gap in 0.01..3.0f64, step in 0.01..1.0f64) {
            let ball = SphericalSource::uniform_ball(1.0, d, lambda).unwrap();
            let a = yukawa_potential(&ball, d + gap, 1e-10).unwrap();
            let b = yukawa_potential(&ball, d + gap + step, 1e-10).unwrap();
            prop_assert!(b < a);
        }
    }
}
