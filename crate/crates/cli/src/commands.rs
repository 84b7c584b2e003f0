use std::f64::consts::PI;
use std::str::FromStr;

use clap::Args;
use num_complex::Complex64;
use qwalk::bound::{antisymmetric_mode, single_boundary_existence, single_boundary_mode, MajoranaEnergy};
use qwalk::bulk::{self, bloch_vector, winding_number, DEFAULT_WINDING_POINTS};
use qwalk::lattice::{build_profile_at, position_distribution, step};
use qwalk::spectral::{
    self, find_bound_states, fit_splitting_decay, solve_wire_energy, wire_end_for, EnergyFamily,
    MAX_DIAG_SITES,
};
use qwalk::{CoinAngle, CoinProfile, ProfileKind, Spinor, WalkerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{num, sig, Report};
use crate::{CliError, RunContext};

type CmdResult = Result<Report, CliError>;

fn angle(pi_units: f64, flag: &str) -> Result<CoinAngle, CliError> {
    CoinAngle::from_pi_units(pi_units).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

/// Lattice site → coordinate `n` of the most probable site.
fn peak_coordinate(state: &WalkerState, profile: &CoinProfile) -> isize {
    let p = position_distribution(state);
    let peak = (0..p.len()).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap_or(0);
    profile.coordinate(peak)
}

#[derive(Debug, Args, Serialize)]
pub struct DispersionArgs {
    /// Coin angle θ (units of π).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    /// Number of k points on [−π, π].
    #[arg(long, default_value_t = 101)]
    pub k_points: usize,
}

pub fn dispersion(args: &DispersionArgs, params: Value, ctx: RunContext) -> CmdResult {
    let theta = angle(args.theta, "--theta")?;
    if args.k_points < 2 {
        return Err(CliError::Usage("--k-points must be at least 2".into()));
    }
    let mut report =
        Report::new("dispersion", params, ctx.seed, &["k", "E_plus", "E_minus", "n_x", "n_y", "n_z"]);
    let last = (args.k_points - 1) as f64;
    let mut gap_edges = 0;
    for j in 0..args.k_points {
        let k = -PI + 2.0 * PI * j as f64 / last;
        let e = bulk::dispersion(theta, k);
        let n = match bloch_vector(theta, k) {
            Ok(n) => n.map(num),
            Err(_) => {
                gap_edges += 1;
                [Value::Null, Value::Null, Value::Null]
            }
        };
        let [nx, ny, nz] = n;
        report.push_row(vec![num(k), num(e), num(-e), nx, ny, nz]);
    }
    report.set("theta", args.theta);
    report.set("gap", num(theta.radians().abs().min(PI - theta.radians().abs())));
    report.set("gap_closing_rows", gap_edges);
    Ok(report)
}

#[derive(Debug, Args, Serialize)]
pub struct WindingArgs {
    /// First angle of the sweep (units of π).
    #[arg(long, default_value_t = -0.9, allow_hyphen_values = true)]
    pub theta_min: f64,
    /// Last angle of the sweep (units of π).
    #[arg(long, default_value_t = 0.9, allow_hyphen_values = true)]
    pub theta_max: f64,
    /// Number of angles, endpoints included.
    #[arg(long, default_value_t = 19)]
    pub steps: usize,
    /// k-grid size for the phase sum.
    #[arg(long, default_value_t = DEFAULT_WINDING_POINTS)]
    pub grid_points: usize,
}

pub fn winding(args: &WindingArgs, params: Value, ctx: RunContext) -> CmdResult {
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let thetas: Vec<f64> = if args.steps == 1 {
        vec![args.theta_min]
    } else {
        let last = (args.steps - 1) as f64;
        (0..args.steps)
            .map(|j| (args.theta_min * (last - j as f64) + args.theta_max * j as f64) / last)
            .collect()
    };
    let angles =
        thetas.iter().map(|&t| angle(t, "--theta-min/--theta-max")).collect::<Result<Vec<_>, _>>()?;
    let grid = args.grid_points;
    let results = ctx.install(|| angles.par_iter().map(|&a| winding_number(a, grid)).collect::<Vec<_>>())?;

    let mut report = Report::new("winding", params, ctx.seed, &["theta", "m", "integral_value", "reason"]);
    let mut undefined = 0;
    for (t, res) in thetas.iter().zip(results) {
        match res {
            Ok(w) => report.push_row(vec![num(*t), w.m.into(), num(w.integral_value), Value::Null]),
            Err(e) => {
                undefined += 1;
                let reason = match e {
                    qwalk::Error::GapClosed(_) => "gap-closed".to_string(),
                    other => other.to_string(),
                };
                report.push_row(vec![num(*t), Value::Null, Value::Null, reason.into()]);
            }
        }
    }
    report.set("points", thetas.len());
    report.set("undefined_points", undefined);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyChoice {
    #[value(name = "0")]
    #[serde(rename = "0")]
    Zero,
    Pi,
    Both,
}

impl EnergyChoice {
    fn targets(self) -> Vec<MajoranaEnergy> {
        match self {
            EnergyChoice::Zero => vec![MajoranaEnergy::Zero],
            EnergyChoice::Pi => vec![MajoranaEnergy::Pi],
            EnergyChoice::Both => vec![MajoranaEnergy::Zero, MajoranaEnergy::Pi],
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BoundSingleArgs {
    /// Coin angle for n ≤ 0 (units of π).
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: f64,
    /// Coin angle for n ≥ 1 (units of π).
    #[arg(long, allow_hyphen_values = true)]
    pub theta2: f64,
    /// Which bound state(s) to materialize.
    #[arg(long, value_enum, default_value = "both")]
    pub energy: EnergyChoice,
    /// Ring size.
    #[arg(long, default_value_t = 128)]
    pub n_sites: usize,
    /// Ring index of n = 0 (default: n_sites / 2).
    #[arg(long)]
    pub origin: Option<usize>,
}

pub fn bound_single(args: &BoundSingleArgs, params: Value, ctx: RunContext) -> CmdResult {
    let t1 = angle(args.theta1, "--theta1")?;
    let t2 = angle(args.theta2, "--theta2")?;
    let mut report = Report::new(
        "bound-single",
        params,
        ctx.seed,
        &["energy", "site", "n", "probability", "a_re", "a_im", "b_re", "b_im"],
    );
    let verdict = single_boundary_existence(t1, t2);
    report.set("exists", verdict.exists);
    report.set("reason", verdict.reason.as_str());
    if !verdict.exists {
        return Ok(report);
    }
    let mut modes = Vec::new();
    for target in args.energy.targets() {
        let mode = single_boundary_mode(t1, t2, target, args.n_sites, args.origin)?;
        let p = position_distribution(&mode.wavefunction);
        for (site, prob) in p.iter().enumerate() {
            let s = mode.wavefunction.spinor(site);
            report.push_row(vec![
                target.name().into(),
                site.into(),
                mode.profile.coordinate(site).into(),
                num(*prob),
                num(s.a.re),
                num(s.a.im),
                num(s.b.re),
                num(s.b.im),
            ]);
        }
        modes.push(json!({
            "energy": target.name(),
            "residual": num(mode.eigen_residual()),
            "kappa1": num(mode.kappa1.value()),
            "kappa2": num(mode.kappa2.value()),
            "peak_n": peak_coordinate(&mode.wavefunction, &mode.profile),
        }));
    }
    report.set("modes", modes);
    Ok(report)
}

#[derive(Debug, Args, Serialize)]
pub struct WireSpectrumArgs {
    /// Inner coin angles θ₂ (units of π, comma separated).
    #[arg(
        long = "theta2",
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_values_t = [1.0 / 3.0, 0.25, 1.0 / 6.0]
    )]
    pub theta2: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Wire lengths used for the ln E vs N fit.
    #[arg(long, default_value_t = 5)]
    pub fit_min: usize,
    #[arg(long, default_value_t = 10)]
    pub fit_max: usize,
}

pub fn wire_spectrum(args: &WireSpectrumArgs, params: Value, ctx: RunContext) -> CmdResult {
    if args.theta2.is_empty() {
        return Err(CliError::Usage("--theta2 needs at least one angle".into()));
    }
    if args.n_min > args.n_max {
        return Err(CliError::Usage("--n-min exceeds --n-max".into()));
    }
    let angles = args.theta2.iter().map(|&t| angle(t, "--theta2")).collect::<Result<Vec<_>, _>>()?;
    let lengths: Vec<usize> = (args.n_min..=args.n_max).collect();
    let cells: Vec<(usize, usize)> =
        lengths.iter().flat_map(|&n| (0..angles.len()).map(move |c| (n, c))).collect();
    let fit_lengths: Vec<usize> = (args.fit_min..=args.fit_max).collect();

    let (energies, fits) = ctx.install(|| {
        let energies: Vec<_> = cells
            .par_iter()
            .map(|&(n, c)| {
                let t2 = angles[c];
                solve_wire_energy(wire_end_for(t2), t2, n, EnergyFamily::NearZero)
            })
            .collect();
        let fits: Vec<_> = angles.par_iter().map(|&t2| fit_splitting_decay(t2, &fit_lengths)).collect();
        (energies, fits)
    })?;

    let mut columns = vec!["N".to_string()];
    columns.extend(args.theta2.iter().map(|t| format!("E_over_pi(theta2={})", sig(*t, 6))));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = Report::new("wire-spectrum", params, ctx.seed, &column_refs);

    let mut cell_errors = Vec::new();
    for (row, chunk) in energies.chunks(angles.len()).enumerate() {
        let n = lengths[row];
        let mut values = vec![Value::from(n)];
        for (c, e) in chunk.iter().enumerate() {
            match e {
                Ok(e) => values.push(num(sig(e / PI, 6))),
                Err(err) => {
                    cell_errors.push(json!({"N": n, "theta2": args.theta2[c], "error": err.to_string()}));
                    values.push(Value::Null);
                }
            }
        }
        report.push_row(values);
    }

    let slopes: Vec<Value> = args
        .theta2
        .iter()
        .zip(&angles)
        .zip(fits)
        .map(|((t, a), fit)| match fit {
            Ok(f) => json!({
                "theta2": t,
                "theta1": wire_end_for(*a).radians() / PI,
                "slope": num(f.slope),
                "intercept": num(f.intercept),
                "r_squared": num(f.r_squared),
                "kappa2_predicted": num(f.kappa2_predicted),
                "relative_deviation": num((-f.slope / f.kappa2_predicted - 1.0).abs()),
            }),
            Err(err) => json!({"theta2": t, "error": err.to_string()}),
        })
        .collect();
    report.set("fit_range", json!([args.fit_min, args.fit_max]));
    report.set("decay_fits", slopes);
    report.set("cell_errors", cell_errors);
    Ok(report)
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    /// uniform, single, symmetric, antisymmetric or wire.
    #[arg(long, default_value = "uniform")]
    pub profile: String,
    /// Outer coin angle, or the only one for uniform profiles (units of π).
    #[arg(long, alias = "theta", default_value_t = 0.25, allow_hyphen_values = true)]
    pub theta1: f64,
    /// Inner coin angle (units of π).
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    pub theta2: f64,
    /// N: the inner region spans sites n = 0..=N.
    #[arg(long, default_value_t = 10)]
    pub wire_length: usize,
    #[arg(long, default_value_t = 64)]
    pub n_sites: usize,
    /// Ring index of n = 0 (default: n_sites/2 for single, n_sites/4 otherwise).
    #[arg(long)]
    pub origin: Option<usize>,
}

impl ProfileArgs {
    fn kind(&self) -> Result<ProfileKind, CliError> {
        ProfileKind::from_str(&self.profile).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn angles(&self) -> Result<(CoinAngle, CoinAngle), CliError> {
        Ok((angle(self.theta1, "--theta1")?, angle(self.theta2, "--theta2")?))
    }

    fn origin(&self, kind: ProfileKind) -> usize {
        self.origin.unwrap_or_else(|| kind.default_origin(self.n_sites))
    }

    fn build(&self) -> Result<CoinProfile, CliError> {
        let kind = self.kind()?;
        let (t1, t2) = self.angles()?;
        Ok(build_profile_at(kind, self.n_sites, t1, t2, self.wire_length, self.origin(kind))?)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    /// delta:N[:a|b] (N is the lattice coordinate), bound:0|pi, or random.
    #[arg(long, default_value = "delta:0")]
    pub init: String,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Emit p(n) every this many steps (0: initial and final only).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum InitialState {
    Delta { n: isize, component: Option<bool> },
    Bound(MajoranaEnergy),
    Random,
}

impl FromStr for InitialState {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Usage(format!("malformed --init `{s}` (expected delta:N[:a|b], bound:0|pi or random)"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["random"] => Ok(InitialState::Random),
            ["bound", e] => Ok(InitialState::Bound(e.parse().map_err(|_| bad())?)),
            ["delta", n] => Ok(InitialState::Delta { n: n.parse().map_err(|_| bad())?, component: None }),
            ["delta", n, c] => {
                let component = match *c {
                    "a" => true,
                    "b" => false,
                    _ => return Err(bad()),
                };
                Ok(InitialState::Delta { n: n.parse().map_err(|_| bad())?, component: Some(component) })
            }
            _ => Err(bad()),
        }
    }
}

fn initial_state(
    init: InitialState,
    args: &ProfileArgs,
    profile: &CoinProfile,
    seed: u64,
) -> Result<WalkerState, CliError> {
    let l = profile.n_sites();
    match init {
        InitialState::Delta { n, component } => {
            let site = (profile.origin() as isize + n).rem_euclid(l as isize) as usize;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let spinor = match component {
                Some(true) => Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
                Some(false) => Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
                None => Spinor::new(Complex64::new(h, 0.0), Complex64::new(0.0, h)),
            };
            Ok(WalkerState::localized(l, site, spinor)?)
        }
        InitialState::Bound(target) => {
            let kind = args.kind()?;
            let (t1, t2) = args.angles()?;
            let origin = Some(args.origin(kind));
            let mode = match kind {
                ProfileKind::SingleBoundary => single_boundary_mode(t1, t2, target, l, origin)?,
                ProfileKind::Antisymmetric => {
                    antisymmetric_mode(t1, t2, target, args.wire_length, l, origin)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "bound initial states need a single or antisymmetric profile, not {}",
                        other.name()
                    )))
                }
            };
            Ok(mode.wavefunction)
        }
        InitialState::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amps = (0..2 * l)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            Ok(WalkerState::normalized(amps)?)
        }
    }
}

pub fn evolve(args: &EvolveArgs, params: Value, ctx: RunContext) -> CmdResult {
    let init: InitialState = args.init.parse()?;
    let profile = args.profile.build()?;
    let mut state = initial_state(init, &args.profile, &profile, ctx.seed)?;
    let mut report = Report::new("evolve", params, ctx.seed, &["t", "site", "n", "probability"]);

    let p0 = position_distribution(&state);
    let emit = |report: &mut Report, t: usize, p: &[f64]| {
        for (site, prob) in p.iter().enumerate() {
            report.push_row(vec![t.into(), site.into(), profile.coordinate(site).into(), num(*prob)]);
        }
    };
    emit(&mut report, 0, &p0);
    let mut drift: f64 = 0.0;
    let mut max_change: f64 = 0.0;
    for t in 1..=args.steps {
        state = step(&state, &profile)?;
        drift = drift.max((state.norm_sqr() - 1.0).abs());
        let p = position_distribution(&state);
        max_change = p.iter().zip(&p0).map(|(a, b)| (a - b).abs()).fold(max_change, f64::max);
        let snapshot = args.snapshot_every > 0 && t % args.snapshot_every == 0;
        if snapshot || t == args.steps {
            emit(&mut report, t, &p);
        }
    }
    let p = position_distribution(&state);
    let mean: f64 = p.iter().enumerate().map(|(s, q)| profile.coordinate(s) as f64 * q).sum();
    let var: f64 = p.iter().enumerate().map(|(s, q)| (profile.coordinate(s) as f64 - mean).powi(2) * q).sum();
    report.set("final_norm", num(state.norm_sqr()));
    report.set("norm_drift", num(drift));
    report.set("max_distribution_change", num(max_change));
    report.set("final_mean_n", num(mean));
    report.set("final_std_n", num(var.sqrt()));
    Ok(report)
}

#[derive(Debug, Args, Serialize)]
pub struct DiagonalizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    /// Localization threshold on the IPR (default 4/L).
    #[arg(long)]
    pub ipr_threshold: Option<f64>,
}

pub fn diagonalize(args: &DiagonalizeArgs, params: Value, ctx: RunContext) -> CmdResult {
    if args.profile.n_sites > MAX_DIAG_SITES {
        return Err(CliError::Usage(format!(
            "--n-sites {} exceeds the dense limit of {MAX_DIAG_SITES}",
            args.profile.n_sites
        )));
    }
    let profile = args.profile.build()?;
    let spectrum = spectral::diagonalize(&profile)?;
    let threshold = args.ipr_threshold.unwrap_or(4.0 / profile.n_sites() as f64);

    let mut flags = vec![Value::Null; spectrum.len()];
    let summary_for = |target: MajoranaEnergy, flags: &mut Vec<Value>| -> Vec<Value> {
        let found = find_bound_states(&spectrum, target, Some(threshold));
        found
            .quasi_energies
            .iter()
            .zip(&found.eigenvectors)
            .zip(&found.ipr)
            .map(|((e, v), ipr)| {
                if let Some(i) = spectrum.quasi_energies.iter().position(|q| q == e) {
                    flags[i] = target.name().into();
                }
                json!({"E": num(*e), "ipr": num(*ipr), "peak_n": peak_coordinate(v, &profile)})
            })
            .collect()
    };
    let near_zero = summary_for(MajoranaEnergy::Zero, &mut flags);
    let near_pi = summary_for(MajoranaEnergy::Pi, &mut flags);

    let mut report = Report::new(
        "diagonalize",
        params,
        ctx.seed,
        &["index", "E", "E_over_pi", "ipr", "localized", "bound_state", "peak_n"],
    );
    for (i, ((e, v), ipr)) in
        spectrum.quasi_energies.iter().zip(&spectrum.eigenvectors).zip(&spectrum.ipr).enumerate()
    {
        report.push_row(vec![
            i.into(),
            num(*e),
            num(e / PI),
            num(*ipr),
            (*ipr > threshold).into(),
            flags[i].clone(),
            peak_coordinate(v, &profile).into(),
        ]);
    }
    report.set("n_states", spectrum.len());
    report.set("ipr_threshold", num(threshold));
    report.set("flagged", near_zero.len() + near_pi.len());
    report.set("near_zero", near_zero);
    report.set("near_pi", near_pi);
    Ok(report)
}
