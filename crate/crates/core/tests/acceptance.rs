//! Acceptance checks. One line per criterion; exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use coherent_thermo::coherent::{self, OscillatorConfig};
use coherent_thermo::kgf_field::{self, SphericalSource};
use coherent_thermo::thermo::{self, OccupationModel};
use coherent_thermo::verification::{self, FockObservable, KahanSum};
use coherent_thermo::blackhole::{self, BlackHoleConfig, HorizonSource, Kappa};
use coherent_thermo::constants::{ELECTRON_MASS_SI, SOLAR_MASS_SI};
use coherent_thermo::ConstantsSet;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_c0de;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fmt_err(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

fn normalization() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for nbar in [0.1, 1.0, 10.0, 100.0, 1000.0] {
        let w = coherent::fock_weights(nbar, 1e-12).map_err(fmt_err)?;
        let total: f64 = w.weights().iter().copied().collect::<KahanSum>().value();
        worst = worst.max((total - 1.0).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst < 1e-10 && elapsed < 0.1,
        format!("max |sum - 1| = {worst:.3e}, runtime {elapsed:.4} s"),
    )
}

fn mean_energy() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let cs = ConstantsSet::si();
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let m = log_uniform(&mut rng, 1e-31, 1e-25);
        let omega = log_uniform(&mut rng, 1e9, 1e16);
        let nbar = log_uniform(&mut rng, 1e-2, 1e3);
        let cfg = OscillatorConfig::new(m, omega, cs).map_err(fmt_err)?;
        let oracle = verification::fock_sum_oracle(&cfg, nbar, FockObservable::Energy).map_err(fmt_err)?;
        worst = worst.max(rel(coherent::mean_energy(&cfg, nbar), oracle));
    }
    check(worst < 1e-9, format!("worst relative error {worst:.3e} over 20 triples"))
}

fn closed_form_residual() -> Outcome {
    let cs = ConstantsSet::natural();
    let alpha = 1.0;
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let nbar = 10f64.powf(-1.0 + 5.0 * i as f64 / 99.0);
        let cfg = OscillatorConfig::new(1.0, alpha * nbar, cs).map_err(fmt_err)?;
        let t = thermo::temperature_closed_form(&cfg, nbar).map_err(fmt_err)?;
        let slope = thermo::closed_form_slope(&cfg, nbar).map_err(fmt_err)?;
        let lhs = cs.hbar() * alpha * nbar * (nbar + 0.5) * slope;
        let rhs = cs.k_b() * t * t;
        worst = worst.max(rel(lhs, rhs));
    }
    check(worst < 1e-10, format!("worst relative residual {worst:.3e} at 100 points"))
}

fn ode_tracks_closed_form() -> Outcome {
    let cs = ConstantsSet::natural();
    let alpha = 1.0;
    let exact = |n: f64| cs.hbar() * alpha / (2.0 * cs.k_b() * (0.5 / n).ln_1p());
    let start = Instant::now();
    let curve = thermo::temperature_ode_solve(alpha, 0.5, 100.0, exact(0.5), 1e-9, &cs).map_err(fmt_err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst = 0.0_f64;
    for (n, t) in curve.samples() {
        worst = worst.max(rel(t, exact(n)));
    }
    for i in 0..=400 {
        let n = 0.5 + 99.5 * i as f64 / 400.0;
        let t = curve.eval(n).ok_or("dense output outside span")?;
        worst = worst.max(rel(t, exact(n)));
    }
    check(
        worst < 1e-6 && elapsed < 1.0,
        format!("worst relative error {worst:.3e}, {} steps, runtime {elapsed:.4} s", curve.nbar().len()),
    )
}

fn high_occupation_limit() -> Outcome {
    let cs = ConstantsSet::natural();
    let omega = 1.0;
    let cfg = OscillatorConfig::new(1.0, omega, cs).map_err(fmt_err)?;
    let scaled = |n: f64| thermo::temperature_closed_form(&cfg, n).map(|t| t * cs.k_b() / (cs.hbar() * omega));
    let t100 = scaled(100.0).map_err(fmt_err)?;
    let mut deviations = Vec::new();
    let mut n = 100.0;
    while n <= 1600.0 {
        deviations.push(scaled(n).map_err(fmt_err)? - 1.0);
        n *= 2.0;
    }
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]) && deviations.iter().all(|&d| d > 0.0);
    check(
        (t100 - 1.00251).abs() < 1e-4 && monotone,
        format!(
            "T(100) k_B/(hbar omega) = {t100:.7}, deviations {}",
            deviations.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

fn entropy_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 6);
    let cs = ConstantsSet::si();
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let m = log_uniform(&mut rng, 1e-31, 1e-25);
        let omega = log_uniform(&mut rng, 1e9, 1e16);
        let nbar = log_uniform(&mut rng, 1e-2, 1e4);
        let cfg = OscillatorConfig::new(m, omega, cs).map_err(fmt_err)?;
        let target = 2.0 * cs.k_b() * nbar;
        let t = thermo::temperature_closed_form(&cfg, nbar).map_err(fmt_err)?;
        let analytic = thermo::entropy_analytic(nbar, nbar, &cs);
        let model = OccupationModel::linear_through(t, nbar).map_err(fmt_err)?;
        let numeric = thermo::entropy_numeric(&model, t, &cs).map_err(fmt_err)?;
        let d = cfg.amplitude_for_occupation(nbar).map_err(fmt_err)?;
        let area = thermo::area_law(&cfg, d).map_err(fmt_err)?.entropy;
        for s in [analytic, numeric, area] {
            worst = worst.max(rel(s, target));
        }
    }
    check(worst < 1e-8, format!("worst relative disagreement {worst:.3e} over 20 inputs"))
}

fn zero_point_branch() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (cs, m, omega) in [(ConstantsSet::natural(), 1.0, 1.0), (ConstantsSet::si(), ELECTRON_MASS_SI, 2.0e14)] {
        let cfg = OscillatorConfig::new(m, omega, cs).map_err(fmt_err)?;
        let zp = thermo::zero_point(&cfg);
        let hw = cs.hbar() * omega;
        ok &= zp.temperature == hw / (2.0 * cs.k_b())
            && zp.energy == hw / 2.0
            && zp.free_energy == 0.0
            && zp.entropy == cs.k_b();
        let bloch = thermo::bloch_temperature(&cfg, hw / (100.0 * cs.k_b())).map_err(fmt_err)?;
        let e = rel(bloch, zp.temperature);
        ok &= e < 1e-10;
        details.push(format!("{}: Bloch rel {e:.1e}", cs.unit_system()));
    }
    check(ok, format!("(T, E, F, S) exact; {}", details.join(", ")))
}

fn bloch_classical_limit() -> Outcome {
    let cs = ConstantsSet::natural();
    let cfg = OscillatorConfig::new(1.0, 1.0, cs).map_err(fmt_err)?;
    let t_hb = 20.0 * cs.hbar() * cfg.omega() / cs.k_b();
    let t_bl = thermo::bloch_temperature(&cfg, t_hb).map_err(fmt_err)?;
    let e = rel(t_bl, t_hb);
    check(e < 3e-4, format!("|T_Bl - T_hb|/T_hb = {e:.4e}"))
}

fn yukawa() -> Outcome {
    let lambda = 1.0;
    let mut point_worst = 0.0_f64;
    for r in [0.05, 0.5, 2.0, 10.0] {
        let src = SphericalSource::uniform_ball(1.0, lambda / 100.0, lambda).map_err(fmt_err)?;
        let quad = kgf_field::yukawa_potential(&src, r, 1e-10).map_err(fmt_err)?;
        point_worst = point_worst.max(rel(quad, (-r / lambda).exp() / r));
    }

    let mut rng = StdRng::seed_from_u64(SEED + 9);
    let mut ball_worst = 0.0_f64;
    for _ in 0..10 {
        let lambda = log_uniform(&mut rng, 1e-3, 1e3);
        let d = lambda * log_uniform(&mut rng, 0.05, 5.0);
        let r = d * rng.gen_range(1.05..4.0);
        let src = SphericalSource::uniform_ball(1.0, d, lambda).map_err(fmt_err)?;
        let primary = kgf_field::yukawa_potential(&src, r, 1e-10).map_err(fmt_err)?;
        let oracle = verification::nested_quadrature_oracle(&src, r).map_err(fmt_err)?;
        ball_worst = ball_worst.max(rel(primary, oracle));
    }
    check(
        point_worst < 1e-4 && ball_worst < 1e-6,
        format!("point-source rel {point_worst:.3e}; ball vs oracle rel {ball_worst:.3e} over 10 triples"),
    )
}

fn black_hole() -> Outcome {
    let cs = ConstantsSet::si();
    let area = blackhole::horizon_area(SOLAR_MASS_SI, &cs).map_err(fmt_err)?;
    let ratio = blackhole::bh_entropy(area, &cs).map_err(fmt_err)?.ratio;
    let ratio_ok = rel(ratio, 1.049e77) < 5e-3;

    let lp = cs.planck_length();
    let mut spread = 0.0_f64;
    let mut routes = Vec::new();
    for beta in [4.0, 8.0] {
        let reference = area / (beta * lp * lp);
        for k in [2, 3, 10, 100] {
            let kappa = Kappa::states(k).map_err(fmt_err)?;
            let alpha = blackhole::alpha_from_kappa(beta, kappa).map_err(fmt_err)?;
            let ln_q = blackhole::bekenstein_log_states(area, kappa, alpha, &cs).map_err(fmt_err)?;
            spread = spread.max(rel(ln_q, reference));
        }
        let cfg = BlackHoleConfig::new(HorizonSource::Mass(SOLAR_MASS_SI), beta, Kappa::states(2).map_err(fmt_err)?, cs)
            .map_err(fmt_err)?;
        let report = blackhole::coherent_equivalence_report(&cfg).map_err(fmt_err)?;
        let s = if beta == 4.0 { report.route1_entropy } else { report.route2_entropy };
        routes.push(rel(s, report.target_entropy));
    }
    let ok = ratio_ok && spread < 1e-12 && routes.iter().all(|&e| e < 1e-12);
    check(
        ok,
        format!(
            "S/k_B = {ratio:.4e}; kappa spread {spread:.1e}; beta=4 route rel {:.1e}, beta=8 route rel {:.1e}",
            routes[0], routes[1]
        ),
    )
}

fn run_bin(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cohtherm"))
        .args(args)
        .env_remove("COHTHERM_UNITS")
        .output()
        .map_err(fmt_err)?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn cli_determinism(dir: &Path) -> Outcome {
    let spectrum = dir.join("modes.csv");
    std::fs::write(&spectrum, "omega,nbar\n1.0,2.0\n3.0,5.0\n7.5,0.25\n").map_err(fmt_err)?;
    let spectrum = spectrum.to_str().ok_or("non-UTF-8 temp path")?.to_string();

    let invocations: Vec<Vec<&str>> = vec![
        vec!["--units", "natural", "oscillator", "--mass", "1", "--omega", "1", "--nbar", "1"],
        vec!["--units", "natural", "oscillator", "--mass", "1", "--omega", "1", "--nbar", "0"],
        vec!["oscillator", "--mass", "9.1e-31", "--omega", "1e14", "--d-re", "1e-9", "--d-im", "2e-9"],
        vec!["--units", "natural", "bloch", "--omega", "1", "--t-hb", "10", "--q-max", "3", "--q-points", "7"],
        vec!["--units", "natural", "field", "--spectrum", &spectrum],
        vec!["--units", "natural", "field", "--radius", "10", "--compton", "0.1", "--potential-at", "12"],
        vec!["blackhole", "--solar-masses", "1", "--beta", "8"],
        vec!["--units", "natural", "blackhole", "--area", "4"],
        vec!["--units", "natural", "sweep", "--var", "nbar", "--from", "0.5", "--to", "100", "--points", "50",
             "--scale", "log", "oscillator", "--mass", "1", "--omega", "1"],
    ];
    let mut runs = 0;
    for base in &invocations {
        for format in ["table", "json", "csv"] {
            let mut args = base.clone();
            args.splice(0..0, ["--format", format]);
            let (first, code) = run_bin(&args)?;
            let (second, code2) = run_bin(&args)?;
            if code != 0 || code2 != 0 {
                return Err(format!("exit code {code} for {args:?}"));
            }
            if first != second || first.is_empty() {
                return Err(format!("output differs between runs of {args:?}"));
            }
            runs += 2;
        }
    }
    let (report, code) = run_bin(&["--self-check"])?;
    let report = String::from_utf8_lossy(&report);
    let failures = report.lines().filter(|l| l.starts_with("[FAIL]")).count();
    check(
        code == 0 && failures == 0,
        format!(
            "{runs} runs byte-identical; self-check exit {code}, {}",
            report.lines().last().unwrap_or("no output")
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        ("normalization", Box::new(normalization)),
        ("mean energy vs Fock sum", Box::new(mean_energy)),
        ("closed form solves the temperature equation", Box::new(closed_form_residual)),
        ("ODE tracks closed form", Box::new(ode_tracks_closed_form)),
        ("high-occupation limit", Box::new(high_occupation_limit)),
        ("entropy identities", Box::new(entropy_identities)),
        ("zero-point branch", Box::new(zero_point_branch)),
        ("Bloch classical limit", Box::new(bloch_classical_limit)),
        ("Yukawa potential", Box::new(yukawa)),
        ("black-hole entropy", Box::new(black_hole)),
        ("CLI determinism and self-check", Box::new(move || cli_determinism(dir.path()))),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
