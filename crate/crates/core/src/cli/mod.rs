//! Command-line front end: argument definitions and the runners behind each
//! subcommand. `main.rs` only parses, dispatches and prints.

pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::blackhole::{self, BlackHoleConfig, HorizonSource, Kappa};
use crate::coherent::{self, Displacement, OscillatorConfig};
use crate::constants::{ConstantsSet, UnitSystem, SOLAR_MASS_SI};
use crate::error::Error;
use crate::kgf_field::{self, ModeSpectrum, SphericalSource};
use crate::thermo;
use crate::verification::{self, OracleReport};

pub use output::{Format, OutputRecord, Value, SCHEMA_VERSION};

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (schema_version 1)");

/// Environment variable consulted for the unit system when `--units` is absent.
pub const UNITS_ENV: &str = "COHTHERM_UNITS";

#[derive(Debug, Parser)]
#[command(name = "cohtherm", version = VERSION, about = "Thermodynamics of coherent states")]
pub struct Cli {
    /// Unit system for all inputs and outputs.
    #[arg(long, global = true, value_enum, env = UNITS_ENV, default_value = "si")]
    pub units: UnitsArg,

    /// Override a physical constant, e.g. `--const G=6.7e-11`.
    #[arg(long = "const", global = true, value_name = "NAME=VALUE")]
    pub consts: Vec<String>,

    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,

    /// Run the oracle suite and exit nonzero on any failure.
    #[arg(long)]
    pub self_check: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Si,
    Natural,
}

impl From<UnitsArg> for UnitSystem {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Si => UnitSystem::Si,
            UnitsArg::Natural => UnitSystem::Natural,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Coherent state of a single harmonic oscillator.
    Oscillator(OscillatorArgs),
    /// Bloch effective temperature of an oscillator in a heat bath.
    Bloch(BlochArgs),
    /// Multimode scalar field around a static source.
    Field(FieldArgs),
    /// Black-hole horizon entropy and the patch model.
    Blackhole(BlackholeArgs),
    /// Evaluate a subcommand over a grid of one parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct OscillatorArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Real part of the displacement d.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "nbar")]
    pub d_re: Option<f64>,
    /// Imaginary part of the displacement d.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "nbar")]
    pub d_im: Option<f64>,
    /// Mean occupation, instead of a displacement.
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BlochArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Heat-bath temperature.
    #[arg(long, allow_negative_numbers = true)]
    pub t_hb: Option<f64>,
    /// Half-width of a symmetric q grid for dumping b(q).
    #[arg(long, allow_negative_numbers = true)]
    pub q_max: Option<f64>,
    /// Number of q grid points (default 21 when --q-max is given).
    #[arg(long)]
    pub q_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    UniformBall,
    PointLike,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FieldArgs {
    /// CSV with header `omega,nbar`.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Source radius d.
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Compton wavelength of the field quanta.
    #[arg(long, allow_negative_numbers = true)]
    pub compton: Option<f64>,
    /// Free prefactor of the occupancy estimate.
    #[arg(long, allow_negative_numbers = true)]
    pub prefactor: Option<f64>,
    /// Evaluate the ground-state field at this radius.
    #[arg(long, allow_negative_numbers = true)]
    pub potential_at: Option<f64>,
    /// Source coupling g.
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Total occupation below which the field temperature is flagged.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BlackholeArgs {
    /// Mass in solar masses (SI only).
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["area", "mass"])]
    pub solar_masses: Option<f64>,
    /// Mass in the active unit system.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "area")]
    pub mass: Option<f64>,
    /// Horizon area in the active unit system.
    #[arg(long, allow_negative_numbers = true)]
    pub area: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Nbar,
    THb,
    Mass,
    Radius,
}

impl SweepVar {
    fn name(self) -> &'static str {
        match self {
            SweepVar::Nbar => "nbar",
            SweepVar::THb => "t-hb",
            SweepVar::Mass => "mass",
            SweepVar::Radius => "radius",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub var: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub scale: Scale,
    #[command(subcommand)]
    pub base: SweepBase,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SweepBase {
    Oscillator(OscillatorArgs),
    Bloch(BlochArgs),
    Field(FieldArgs),
    Blackhole(BlackholeArgs),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    /// 2 for usage and validation errors, 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Resolved global settings shared by every runner.
#[derive(Debug, Clone)]
pub struct Context {
    pub cs: ConstantsSet,
    overrides: Vec<(String, f64)>,
}

impl Context {
    pub fn new(units: UnitSystem, consts: &[String]) -> CliResult<Self> {
        let mut cs = ConstantsSet::for_units(units);
        let mut overrides = Vec::new();
        for entry in consts {
            let (name, value) = entry
                .split_once('=')
                .ok_or_else(|| usage(format!("--const expects NAME=VALUE, got `{entry}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| usage(format!("--const {name}: `{value}` is not a number")))?;
            cs = cs.with_override(name.trim(), value).map_err(|e| usage(e.to_string()))?;
            overrides.push((name.trim().to_string(), value));
        }
        Ok(Self { cs, overrides })
    }

    pub fn natural() -> Self {
        Self {
            cs: ConstantsSet::natural(),
            overrides: Vec::new(),
        }
    }

    fn units(&self) -> Units {
        Units::for_system(self.cs.unit_system())
    }

    fn record(&self, command: &str) -> OutputRecord {
        let mut r = OutputRecord::new(command);
        r.input("units", self.cs.unit_system().to_string());
        r.input("hbar", self.cs.hbar())
            .input("k_B", self.cs.k_b())
            .input("c", self.cs.c())
            .input("G", self.cs.g());
        for (name, value) in &self.overrides {
            r.input(&format!("const.{name}"), *value);
        }
        r
    }
}

/// Unit labels for the active system.
struct Units {
    energy: &'static str,
    temperature: &'static str,
    length: &'static str,
    area: &'static str,
    mass: &'static str,
    frequency: &'static str,
    field: &'static str,
    density: &'static str,
}

const DIMENSIONLESS: &str = "1";
const ENTROPY: &str = "k_B";

impl Units {
    fn for_system(u: UnitSystem) -> Self {
        match u {
            UnitSystem::Si => Units {
                energy: "J",
                temperature: "K",
                length: "m",
                area: "m^2",
                mass: "kg",
                frequency: "rad/s",
                field: "g/m",
                density: "1/m",
            },
            UnitSystem::Natural => Units {
                energy: "natural",
                temperature: "natural",
                length: "natural",
                area: "natural",
                mass: "natural",
                frequency: "natural",
                field: "natural",
                density: "natural",
            },
        }
    }
}

fn required(name: &str, v: Option<f64>) -> CliResult<f64> {
    v.ok_or_else(|| usage(format!("missing required flag --{name}")))
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

pub fn run_oscillator(args: &OscillatorArgs, ctx: &Context) -> CliResult<OutputRecord> {
    let mass = positive("mass", required("mass", args.mass)?)?;
    let omega = positive("omega", required("omega", args.omega)?)?;
    let cfg = OscillatorConfig::new(mass, omega, ctx.cs)?;
    let u = ctx.units();
    let cs = &ctx.cs;

    let mut rec = ctx.record("oscillator");
    rec.input("mass", mass).input("omega", omega);

    let (nbar, d_abs) = match (args.nbar, args.d_re, args.d_im) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(usage("give either --nbar or --d-re/--d-im, not both"));
        }
        (Some(nbar), None, None) => {
            if !(nbar.is_finite() && nbar >= 0.0) {
                return Err(usage(format!("--nbar must be non-negative, got {nbar}")));
            }
            rec.input("nbar", nbar);
            (nbar, cfg.amplitude_for_occupation(nbar)?)
        }
        (None, None, None) => return Err(usage("one of --nbar or --d-re/--d-im is required")),
        (None, re, im) => {
            let d = Displacement::new(re.unwrap_or(0.0), im.unwrap_or(0.0));
            if !(d.re.is_finite() && d.im.is_finite()) {
                return Err(usage("displacement must be finite"));
            }
            rec.input("d_re", d.re).input("d_im", d.im);
            (coherent::CoherentAmplitude::new(&cfg, d).nbar(), d.abs())
        }
    };
    rec.input("occupation_model", "linear (nbar proportional to T)");

    let area = thermo::area_law(&cfg, d_abs)?;

    if nbar == 0.0 {
        let zp = thermo::zero_point(&cfg);
        rec.result("branch", "zero_point", "")
            .result("nbar", 0.0, DIMENSIONLESS)
            .result("ln_q", zp.ln_q, DIMENSIONLESS)
            .result("temperature", zp.temperature, u.temperature)
            .result("energy", zp.energy, u.energy)
            .result("free_energy", zp.free_energy, u.energy)
            .result("entropy", zp.entropy / cs.k_b(), ENTROPY)
            .result("d_abs", d_abs, u.length)
            .result("area", area.area, u.area)
            .result("l0", area.l0, u.length);
        rec.warn("nbar = 0: zero-point branch; temperature is the cold-bath limit of the Bloch formula");
        return Ok(rec);
    }

    let ln_q = coherent::log_partition_function(nbar);
    let temperature = thermo::temperature_closed_form(&cfg, nbar)?;
    let free_energy = thermo::free_energy(temperature, ln_q, cs)?;
    // linear model: T dnbar/dT = nbar
    let entropy = thermo::entropy_analytic(nbar, nbar, cs);
    let energy = coherent::mean_energy(&cfg, nbar);
    let gibbs = free_energy + temperature * entropy;
    let slope = thermo::closed_form_slope(&cfg, nbar)?;
    let entropy_sc = thermo::entropy_analytic(nbar, temperature / slope, cs);

    rec.result("branch", "coherent", "")
        .result("nbar", nbar, DIMENSIONLESS)
        .result("ln_q", ln_q, DIMENSIONLESS)
        .result("temperature", temperature, u.temperature)
        .result("temperature_limit", cs.hbar() * omega / cs.k_b(), u.temperature)
        .result("free_energy", free_energy, u.energy)
        .result("entropy", entropy / cs.k_b(), ENTROPY)
        .result("energy", energy, u.energy)
        .result("energy_gibbs_helmholtz", gibbs, u.energy)
        .result("entropy_self_consistent", entropy_sc / cs.k_b(), ENTROPY)
        .result("d_abs", d_abs, u.length)
        .result("area", area.area, u.area)
        .result("l0", area.l0, u.length)
        .result("nbar_area", area.nbar, DIMENSIONLESS)
        .result("entropy_area", area.entropy / cs.k_b(), ENTROPY);

    rec.warn("entropy uses the default linear occupation model nbar proportional to T");
    let gap = (gibbs - energy).abs() / energy;
    if gap > 1e-12 {
        rec.warn(format!(
            "F + T*S differs from the mean energy by relative {} under the linear model",
            output::format_float(gap)
        ));
    }
    if nbar < 0.5 {
        rec.warn("nbar < 1/2: far from the high-occupation limit T -> hbar*omega/k_B");
    }
    Ok(rec)
}

pub fn run_bloch(args: &BlochArgs, ctx: &Context) -> CliResult<OutputRecord> {
    let mass = positive("mass", args.mass.unwrap_or(1.0))?;
    let omega = positive("omega", required("omega", args.omega)?)?;
    let t_hb = positive("t-hb", required("t-hb", args.t_hb)?)?;
    let cfg = OscillatorConfig::new(mass, omega, ctx.cs)?;
    let u = ctx.units();
    let cs = &ctx.cs;

    let mut rec = ctx.record("bloch");
    rec.input("mass", mass).input("omega", omega).input("t_hb", t_hb);

    let t_bl = thermo::bloch_temperature(&cfg, t_hb)?;
    let t0 = thermo::zero_point(&cfg).temperature;
    let sigma = (cs.k_b() * t_bl / (mass * omega * omega)).sqrt();
    rec.result("t_bloch", t_bl, u.temperature)
        .result("t_zero_point", t0, u.temperature)
        .result("t_bloch_over_t_hb", t_bl / t_hb, DIMENSIONLESS)
        .result("sigma_q", sigma, u.length)
        .result("b_peak", thermo::bloch_distribution(&cfg, t_hb, 0.0)?, u.density);

    match (args.q_max, args.q_points) {
        (None, None) => {}
        (None, Some(_)) => return Err(usage("--q-points requires --q-max")),
        (Some(q_max), points) => {
            let q_max = positive("q-max", q_max)?;
            let points = points.unwrap_or(21);
            if points < 2 {
                return Err(usage("--q-points must be at least 2"));
            }
            rec.input("q_max", q_max).input("q_points", points);
            let span = (points - 1) as f64;
            let mut rows = Vec::with_capacity(points);
            for i in 0..points {
                // integer numerator keeps the grid exactly antisymmetric
                let q = q_max * (2.0 * i as f64 - span) / span;
                rows.push(vec![q, thermo::bloch_distribution(&cfg, t_hb, q)?]);
            }
            rec.table = Some(output::Table {
                columns: vec![("q".into(), u.length.into()), ("b".into(), u.density.into())],
                rows,
            });
        }
    }
    Ok(rec)
}

pub fn run_field(args: &FieldArgs, ctx: &Context) -> CliResult<OutputRecord> {
    let u = ctx.units();
    let cs = &ctx.cs;
    let mut rec = ctx.record("field");

    if args.spectrum.is_none() && args.radius.is_none() && args.potential_at.is_none() {
        return Err(usage("field needs --spectrum, --radius/--compton, or --potential-at"));
    }

    if let Some(path) = &args.spectrum {
        let threshold = args.threshold.unwrap_or(kgf_field::DEFAULT_HIGH_OCCUPATION_THRESHOLD);
        rec.input("spectrum", path.display().to_string()).input("threshold", threshold);
        let spec = ModeSpectrum::from_csv_path(path)?;
        rec.input("modes", spec.modes().len());
        let omega_bar = kgf_field::mean_frequency(&spec)?;
        let energy = kgf_field::field_energy(&spec, cs)?;
        let temperature = kgf_field::field_temperature(&spec, cs, threshold)?;
        rec.result("nbar_total", spec.nbar_total(), DIMENSIONLESS)
            .result("omega_bar", omega_bar, u.frequency)
            .result("energy", energy, u.energy)
            .result("temperature", temperature.value, u.temperature)
            .result("entropy", kgf_field::field_entropy(&spec, cs) / cs.k_b(), ENTROPY);
        for w in temperature.warnings {
            rec.warn(w);
        }
        if spec.modes().len() > 1 {
            rec.warn("energy uses one collective zero-point term hbar*omega_bar/2, not a per-mode sum");
        }
    }

    if args.radius.is_some() || args.compton.is_some() || args.prefactor.is_some() {
        if let (Some(radius), Some(compton)) = (args.radius, args.compton) {
            let prefactor = args.prefactor.unwrap_or(1.0);
            rec.input("radius", radius).input("compton", compton).input("prefactor", prefactor);
            let nbar = kgf_field::occupancy_estimate(radius, compton, prefactor).map_err(|e| usage(e.to_string()))?;
            let entropy = kgf_field::field_entropy_area(radius, compton, prefactor, cs)?;
            rec.result("occupancy", nbar.value, DIMENSIONLESS)
                .result("entropy_area", entropy.value / cs.k_b(), ENTROPY)
                .result("radius_over_compton", radius / compton, DIMENSIONLESS);
            for w in nbar.warnings {
                rec.warn(w);
            }
        } else if args.potential_at.is_none() {
            return Err(usage("the occupancy estimate needs both --radius and --compton"));
        }
    }

    if let Some(r) = args.potential_at {
        let compton = positive("compton", required("compton", args.compton)?)?;
        let radius = args.radius.unwrap_or(0.0);
        let g = args.g.unwrap_or(1.0);
        let quad_tol = args.quad_tol.unwrap_or(1e-10);
        let profile = args.profile.unwrap_or(if radius > 0.0 {
            ProfileArg::UniformBall
        } else {
            ProfileArg::PointLike
        });
        let profile = match profile {
            ProfileArg::UniformBall => kgf_field::SourceProfile::UniformBall,
            ProfileArg::PointLike => kgf_field::SourceProfile::PointLike,
        };
        rec.input("potential_at", r)
            .input("radius", radius)
            .input("compton", compton)
            .input("g", g)
            .input(
                "profile",
                match profile {
                    kgf_field::SourceProfile::UniformBall => "uniform-ball",
                    kgf_field::SourceProfile::PointLike => "point-like",
                },
            )
            .input("quad_tol", quad_tol);
        let src = SphericalSource::new(g, radius, compton, profile).map_err(|e| usage(e.to_string()))?;
        let phi = kgf_field::yukawa_potential(&src, r, quad_tol)?;
        rec.result("potential", phi, u.field);
    }

    Ok(rec)
}

pub fn run_blackhole(args: &BlackholeArgs, ctx: &Context) -> CliResult<OutputRecord> {
    let u = ctx.units();
    let cs = &ctx.cs;
    let beta = positive("beta", args.beta.unwrap_or(4.0))?;
    let kappa_n = args.kappa.unwrap_or(2);
    let kappa = Kappa::states(kappa_n).map_err(|e| usage(e.to_string()))?;

    let mut rec = ctx.record("blackhole");
    let source = match (args.solar_masses, args.mass, args.area) {
        (Some(x), None, None) => {
            if cs.unit_system() != UnitSystem::Si {
                return Err(usage("--solar-masses requires SI units; use --mass in natural units"));
            }
            let x = positive("solar-masses", x)?;
            rec.input("solar_masses", x);
            HorizonSource::Mass(x * SOLAR_MASS_SI)
        }
        (None, Some(m), None) => {
            let m = positive("mass", m)?;
            rec.input("mass", m);
            HorizonSource::Mass(m)
        }
        (None, None, Some(a)) => {
            let a = positive("area", a)?;
            rec.input("area", a);
            HorizonSource::Area(a)
        }
        (None, None, None) => return Err(usage("one of --solar-masses, --mass or --area is required")),
        _ => return Err(usage("give only one of --solar-masses, --mass, --area")),
    };
    rec.input("beta", beta).input("kappa", kappa_n);

    let cfg = BlackHoleConfig::new(source, beta, kappa, *cs)?;
    let report = blackhole::coherent_equivalence_report(&cfg)?;
    let bh = blackhole::bh_entropy(cfg.area(), cs)?;

    if let HorizonSource::Mass(m) = source {
        rec.result("mass", m, u.mass)
            .result("schwarzschild_radius", blackhole::schwarzschild_radius(m, cs)?, u.length);
    }
    rec.result("area", report.area, u.area)
        .result("planck_length", cs.planck_length(), u.length)
        .result("entropy", report.target_ratio, ENTROPY)
        .result("ln_entropy", bh.ln_ratio, DIMENSIONLESS)
        .result("alpha", report.alpha, DIMENSIONLESS)
        .result("nbar", report.nbar, DIMENSIONLESS)
        .result("log_states", report.log_states, DIMENSIONLESS)
        .result("route1_entropy", report.route1_entropy / cs.k_b(), ENTROPY)
        .result("route2_entropy", report.route2_entropy / cs.k_b(), ENTROPY)
        .result("route1_matches", report.route1_matches, "")
        .result("route2_matches", report.route2_matches, "")
        .result("kappa_spread", report.kappa_spread, DIMENSIONLESS)
        .result("kappa_invariant", report.kappa_spread <= blackhole::ROUTE_MATCH_TOLERANCE, "");
    rec.warn("route 1 (Boltzmann, S = k_B ln Q) needs beta = 4; route 2 (coherent state, S = 2 k_B nbar, nbar proportional to T) needs beta = 8; neither is preferred");
    Ok(rec)
}

/// Grid of `points` values from `from` to `to`, endpoints exact.
pub fn sweep_grid(from: f64, to: f64, points: usize, scale: Scale) -> CliResult<Vec<f64>> {
    if !(from.is_finite() && to.is_finite()) || from >= to {
        return Err(usage(format!("sweep needs --from < --to, got {from} .. {to}")));
    }
    if points < 2 {
        return Err(usage(format!("sweep needs at least 2 points, got {points}")));
    }
    if scale == Scale::Log && from <= 0.0 {
        return Err(usage("log sweeps need --from > 0"));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                from
            } else if i == points - 1 {
                to
            } else {
                let s = i as f64 / last;
                match scale {
                    Scale::Linear => from + (to - from) * s,
                    Scale::Log => (from.ln() + (to.ln() - from.ln()) * s).exp(),
                }
            }
        })
        .collect())
}

fn sweep_point(args: &SweepArgs, x: f64, ctx: &Context) -> CliResult<OutputRecord> {
    let mismatch = || {
        usage(format!(
            "sweep variable `{}` does not apply to this subcommand",
            args.var.name()
        ))
    };
    let mut rec = match (&args.base, args.var) {
        (SweepBase::Oscillator(a), SweepVar::Nbar) => {
            let mut a = a.clone();
            a.nbar = Some(x);
            a.d_re = None;
            a.d_im = None;
            run_oscillator(&a, ctx)?
        }
        (SweepBase::Oscillator(a), SweepVar::Mass) => {
            let mut a = a.clone();
            a.mass = Some(x);
            run_oscillator(&a, ctx)?
        }
        (SweepBase::Bloch(a), SweepVar::THb) => {
            let mut a = a.clone();
            a.t_hb = Some(x);
            run_bloch(&a, ctx)?
        }
        (SweepBase::Bloch(a), SweepVar::Mass) => {
            let mut a = a.clone();
            a.mass = Some(x);
            run_bloch(&a, ctx)?
        }
        (SweepBase::Field(a), SweepVar::Radius) => {
            let mut a = a.clone();
            a.radius = Some(x);
            run_field(&a, ctx)?
        }
        (SweepBase::Blackhole(a), SweepVar::Mass) => {
            let mut a = a.clone();
            if a.mass.is_some() || ctx.cs.unit_system() == UnitSystem::Natural {
                a.mass = Some(x);
                a.solar_masses = None;
            } else {
                a.solar_masses = Some(x);
            }
            a.area = None;
            run_blackhole(&a, ctx)?
        }
        _ => return Err(mismatch()),
    };
    rec.command = format!("sweep/{}", rec.command);
    Ok(rec)
}

pub struct SweepOutput {
    pub var: &'static str,
    pub values: Vec<f64>,
    pub records: Vec<OutputRecord>,
}

impl SweepOutput {
    pub fn render(&self, format: Format) -> String {
        output::render_sweep(self.var, &self.values, &self.records, format)
    }
}

/// Points are evaluated in parallel; records keep grid order.
pub fn run_sweep(args: &SweepArgs, ctx: &Context) -> CliResult<SweepOutput> {
    let values = sweep_grid(args.from, args.to, args.points, args.scale)?;
    let results: Vec<CliResult<OutputRecord>> = values.par_iter().map(|&x| sweep_point(args, x, ctx)).collect();
    let mut records = Vec::with_capacity(values.len());
    for (i, r) in results.into_iter().enumerate() {
        let mut rec = r?;
        rec.input("sweep.var", args.var.name())
            .input("sweep.index", i)
            .input("sweep.value", values[i]);
        records.push(rec);
    }
    Ok(SweepOutput {
        var: args.var.name(),
        values,
        records,
    })
}

pub fn render_self_check(reports: &[OracleReport], format: Format) -> String {
    let passed = reports.iter().filter(|r| r.passed).count();
    match format {
        Format::Json => reports
            .iter()
            .map(|r| {
                let mut rec = OutputRecord::new("self-check");
                rec.input("quantity", r.quantity.as_str());
                rec.result("primary_value", r.primary_value, "")
                    .result("oracle_value", r.oracle_value, "")
                    .result("relative_error", r.relative_error, "")
                    .result("tolerance", r.tolerance, "")
                    .result("passed", r.passed, "");
                let mut line = rec.to_json();
                line.push('\n');
                line
            })
            .collect(),
        Format::Csv => {
            let mut s = String::from("quantity,primary_value,oracle_value,relative_error,tolerance,passed\n");
            for r in reports {
                s.push_str(&format!(
                    "\"{}\",{},{},{},{},{}\n",
                    r.quantity.replace('"', "\"\""),
                    output::format_float(r.primary_value),
                    output::format_float(r.oracle_value),
                    output::format_float(r.relative_error),
                    output::format_float(r.tolerance),
                    r.passed
                ));
            }
            s
        }
        Format::Table => {
            let mut s: String = reports.iter().map(|r| format!("{r}\n")).collect();
            s.push_str(&format!("{passed}/{} oracle checks passed\n", reports.len()));
            s
        }
    }
}

/// Runs the parsed command line, returning stdout text.
pub fn execute(cli: &Cli) -> CliResult<(String, i32)> {
    let ctx = Context::new(cli.units.into(), &cli.consts)?;
    if cli.self_check {
        if cli.command.is_some() {
            return Err(usage("--self-check takes no subcommand"));
        }
        let reports = verification::run_suite();
        let ok = reports.iter().all(|r| r.passed);
        return Ok((render_self_check(&reports, cli.format), if ok { 0 } else { 1 }));
    }
    let text = match &cli.command {
        None => return Err(usage("no subcommand given; see --help")),
        Some(Command::Oscillator(a)) => run_oscillator(a, &ctx)?.render(cli.format),
        Some(Command::Bloch(a)) => run_bloch(a, &ctx)?.render(cli.format),
        Some(Command::Field(a)) => run_field(a, &ctx)?.render(cli.format),
        Some(Command::Blackhole(a)) => run_blackhole(a, &ctx)?.render(cli.format),
        Some(Command::Sweep(a)) => run_sweep(a, &ctx)?.render(cli.format),
    };
    Ok((text, 0))
}
