//! Independent numerical oracles.
//!
//! None of these share a code path with the operation they check: Fock sums
//! are built from log-space increments with compensated summation (the
//! primary uses a multiplicative recurrence), the Yukawa oracle integrates
//! over radius and polar angle with adaptive Simpson (the primary uses a
//! closed angular form and Gauss–Kronrod), and derivatives use their own
//! Richardson-extrapolated central differences.

use std::fmt;

use crate::blackhole::{self, BlackHoleConfig, HorizonSource, Kappa};
use crate::coherent::{self, OscillatorConfig};
use crate::constants::{ConstantsSet, SOLAR_MASS_SI};
use crate::error::{Error, Result};
use crate::kgf_field::{self, SourceProfile, SphericalSource};
use crate::thermo::{self, OccupationModel};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new(initial: f64) -> Self {
        Self {
            sum: initial,
            compensation: 0.0,
        }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub primary_value: f64,
    pub oracle_value: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn compare(quantity: impl Into<String>, primary_value: f64, oracle_value: f64, tolerance: f64) -> Self {
        let diff = (primary_value - oracle_value).abs();
        let relative_error = if oracle_value == 0.0 { diff } else { diff / oracle_value.abs() };
        Self {
            quantity: quantity.into(),
            primary_value,
            oracle_value,
            relative_error,
            tolerance,
            passed: relative_error <= tolerance,
        }
    }

    /// A report for a check that could not be evaluated at all.
    pub fn failed(quantity: impl Into<String>, tolerance: f64) -> Self {
        Self {
            quantity: quantity.into(),
            primary_value: f64::NAN,
            oracle_value: f64::NAN,
            relative_error: f64::INFINITY,
            tolerance,
            passed: false,
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: primary {:.16e}, oracle {:.16e}, rel err {:.3e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.quantity,
            self.primary_value,
            self.oracle_value,
            self.relative_error,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockObservable {
    Norm,
    MeanN,
    VarN,
    Energy,
}

pub const FOCK_ORACLE_MAX_NBAR: f64 = 1e4;

/// `Σ_n ρ_nn f(n)` with `ln ρ_nn = -nbar + Σ_{k≤n} ln(nbar/k)` accumulated
/// with compensated summation, tail below 1e-14.
pub fn fock_sum_oracle(cfg: &OscillatorConfig, nbar: f64, observable: FockObservable) -> Result<f64> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::Domain(format!("nbar must be non-negative, got {nbar}")));
    }
    if nbar > FOCK_ORACLE_MAX_NBAR {
        return Err(Error::OracleScale(format!(
            "fock_sum_oracle supports nbar <= {FOCK_ORACLE_MAX_NBAR}, got {nbar}"
        )));
    }
    let hbar_omega = cfg.constants().hbar() * cfg.omega();
    let f = |n: f64| match observable {
        FockObservable::Norm => 1.0,
        FockObservable::MeanN => n,
        FockObservable::VarN => (n - nbar) * (n - nbar),
        FockObservable::Energy => hbar_omega * (n + 0.5),
    };
    if nbar == 0.0 {
        return Ok(f(0.0));
    }

    let mut log_weight = KahanSum::new(-nbar);
    let mut total = KahanSum::default();
    let mut n = 0u64;
    loop {
        let nf = n as f64;
        let w = log_weight.value().exp();
        total.add(w * f(nf));
        let ratio = nbar / (nf + 1.0);
        // geometric bound on the remaining tail once past the mode
        if ratio < 1.0 && w * ratio / (1.0 - ratio) * f(nf + 1.0).abs().max(1.0) < 1e-17 {
            break;
        }
        log_weight.add(ratio.ln());
        n += 1;
    }
    Ok(total.value())
}

/// Adaptive Simpson on `[a, b]` to relative accuracy `rel_tol`, judged
/// against a 32-panel composite estimate.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    const PANELS: usize = 32;
    const MAX_DEPTH: u32 = 48;

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Accuracy(format!("adaptive Simpson exhausted depth on [{a}, {b}]")));
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }

    let width = (b - a) / PANELS as f64;
    let node = |i: usize| if i == PANELS { b } else { a + width * i as f64 };
    let mut panels = Vec::with_capacity(PANELS);
    let mut scale = KahanSum::default();
    for i in 0..PANELS {
        let (x0, x1) = (node(i), node(i + 1));
        let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
        let s = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        scale.add(s.abs());
        panels.push((x0, x1, f0, fm, f1, s));
    }
    let tol = rel_tol * scale.value() / PANELS as f64;
    let mut total = KahanSum::default();
    for (x0, x1, f0, fm, f1, s) in panels {
        total.add(recurse(f, x0, x1, f0, fm, f1, s, tol, MAX_DEPTH)?);
    }
    Ok(total.value())
}

/// The uniform-ball Yukawa integral over `(r', θ')` with no symmetry
/// reduction beyond the trivial azimuth.
pub fn nested_quadrature_oracle(src: &SphericalSource, r: f64) -> Result<f64> {
    if src.profile() != SourceProfile::UniformBall {
        return Err(Error::Domain("nested quadrature oracle needs a uniform-ball source".into()));
    }
    let d = src.radius();
    if !(r > d) {
        return Err(Error::OutsideDomain { r, radius: d });
    }
    let lambda = src.lambda_c();
    let density = 3.0 / (4.0 * std::f64::consts::PI * d.powi(3));
    const REL: f64 = 1e-10;

    let shell = |s: f64| -> Result<f64> {
        let kernel = |theta: f64| {
            let dist = (r * r + s * s - 2.0 * r * s * theta.cos()).sqrt();
            theta.sin() * (-dist / lambda).exp() / dist
        };
        let angular = simpson(&kernel, 0.0, std::f64::consts::PI, REL)?;
        Ok(2.0 * std::f64::consts::PI * s * s * angular)
    };

    // surface the first inner failure instead of integrating garbage
    let failure = std::cell::RefCell::new(None);
    let outer = |s: f64| match shell(s) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let radial = simpson(&outer, 0.0, d, 1e-9)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(src.g() * density * radial)
}

pub const FINITE_DIFFERENCE_TOLERANCE: f64 = 1e-6;

/// Central difference at `x` with one Richardson level, compared to
/// `analytic_df` at the default tolerance.
pub fn finite_difference_check(f: impl Fn(f64) -> f64, x: f64, analytic_df: f64) -> OracleReport {
    finite_difference_check_with_tol("finite difference", f, x, analytic_df, FINITE_DIFFERENCE_TOLERANCE)
}

pub fn finite_difference_check_with_tol(
    quantity: &str,
    f: impl Fn(f64) -> f64,
    x: f64,
    analytic_df: f64,
    tolerance: f64,
) -> OracleReport {
    let h = 1e-3 * x.abs().max(1e-8);
    let d = |step: f64| (f(x + step) - f(x - step)) / (2.0 * step);
    let estimate = (4.0 * d(0.5 * h) - d(h)) / 3.0;
    OracleReport::compare(quantity, estimate, analytic_df, tolerance)
}

fn report_from(quantity: &str, tolerance: f64, pair: Result<(f64, f64)>) -> OracleReport {
    match pair {
        Ok((primary, oracle)) => OracleReport::compare(quantity, primary, oracle, tolerance),
        Err(_) => OracleReport::failed(quantity, tolerance),
    }
}

/// The full oracle suite behind `--self-check`.
pub fn run_suite() -> Vec<OracleReport> {
    let mut out = Vec::new();
    let nat = ConstantsSet::natural();
    let si = ConstantsSet::si();
    let osc = OscillatorConfig::new(1.0, 1.0, nat).expect("valid oscillator");

    for nbar in [0.1, 1.0, 10.0, 100.0, 1000.0] {
        out.push(report_from(
            &format!("fock norm, nbar = {nbar}"),
            1e-10,
            coherent::fock_weights(nbar, 1e-12)
                .map(|w| w.weights().iter().copied().collect::<KahanSum>().value())
                .and_then(|p| Ok((p, fock_sum_oracle(&osc, nbar, FockObservable::Norm)?))),
        ));
        out.push(report_from(
            &format!("fock mean, nbar = {nbar}"),
            1e-8,
            coherent::fock_weights(nbar, 1e-12)
                .map(|w| w.expectation(|n| n as f64))
                .and_then(|p| Ok((p, fock_sum_oracle(&osc, nbar, FockObservable::MeanN)?))),
        ));
        out.push(report_from(
            &format!("fock variance, nbar = {nbar}"),
            1e-8,
            fock_sum_oracle(&osc, nbar, FockObservable::VarN).map(|o| (nbar, o)),
        ));
        out.push(report_from(
            &format!("mean energy, nbar = {nbar}"),
            1e-9,
            fock_sum_oracle(&osc, nbar, FockObservable::Energy).map(|o| (coherent::mean_energy(&osc, nbar), o)),
        ));
    }

    let gamma = 0.75;
    let linear = OccupationModel::linear(gamma).expect("valid model");
    for t in [0.2, 3.0, 40.0] {
        out.push(report_from(
            &format!("numeric entropy, linear model, T = {t}"),
            1e-8,
            thermo::entropy_numeric(&linear, t, &nat).map(|s| (s, thermo::entropy_analytic(gamma * t, gamma * t, &nat))),
        ));
        let free = |x: f64| -nat.k_b() * x * gamma * x;
        let mut r = finite_difference_check(free, t, -2.0 * nat.k_b() * gamma * t);
        r.quantity = format!("dF/dT, linear model, T = {t}");
        out.push(r);
    }

    for nbar in [0.1, 1.0, 30.0, 1e3] {
        let alpha = 1.0 / nbar;
        let temperature = |n: f64| nat.hbar() * alpha / (2.0 * nat.k_b() * (0.5 / n).ln_1p());
        let t = temperature(nbar);
        out.push(finite_difference_check_with_tol(
            &format!("closed-form dT/dnbar vs ODE rhs, nbar = {nbar}"),
            temperature,
            nbar,
            thermo::temperature_ode_rhs(alpha, nbar, t, &nat),
            1e-8,
        ));
    }

    {
        let alpha = 2.0;
        let t0 = nat.hbar() * alpha / (2.0 * nat.k_b() * 2f64.ln());
        let result = thermo::temperature_ode_solve(alpha, 0.5, 100.0, t0, 1e-9, &nat).map(|curve| {
            let mut worst = (0.0, 0.0, 0.0);
            for (n, t) in curve.samples() {
                let exact = nat.hbar() * alpha / (2.0 * nat.k_b() * (0.5 / n).ln_1p());
                let err = ((t - exact) / exact).abs();
                if err >= worst.0 {
                    worst = (err, t, exact);
                }
            }
            (worst.1, worst.2)
        });
        out.push(report_from("ODE vs closed form, worst sample on [0.5, 100]", 1e-6, result));
    }

    {
        let zp = thermo::zero_point(&osc);
        out.push(report_from(
            "zero-point temperature vs cold Bloch bath",
            1e-10,
            thermo::bloch_temperature(&osc, 0.01 * osc.omega()).map(|b| (b, zp.temperature)),
        ));
    }

    for (d, lambda, r) in [(1.0, 0.1, 2.0), (0.5, 1.0, 0.8), (2.0, 0.7, 5.0)] {
        out.push(report_from(
            &format!("uniform-ball Yukawa, d = {d}, lambda = {lambda}, r = {r}"),
            1e-6,
            SphericalSource::uniform_ball(1.0, d, lambda).and_then(|src| {
                Ok((kgf_field::yukawa_potential(&src, r, 1e-10)?, nested_quadrature_oracle(&src, r)?))
            }),
        ));
    }

    {
        let cfg = BlackHoleConfig::new(
            HorizonSource::Mass(SOLAR_MASS_SI),
            4.0,
            Kappa::states(2).expect("kappa"),
            si,
        );
        out.push(report_from(
            "black hole route 1 (beta = 4) vs area law",
            1e-12,
            cfg.and_then(|c| blackhole::coherent_equivalence_report(&c))
                .map(|r| (r.route1_entropy, r.target_entropy)),
        ));
        let cfg8 = BlackHoleConfig::new(
            HorizonSource::Mass(SOLAR_MASS_SI),
            8.0,
            Kappa::states(2).expect("kappa"),
            si,
        );
        out.push(report_from(
            "black hole route 2 (beta = 8) vs area law",
            1e-12,
            cfg8.and_then(|c| blackhole::coherent_equivalence_report(&c))
                .map(|r| (r.route2_entropy, r.target_entropy)),
        ));
    }

    out
}
