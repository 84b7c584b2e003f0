//! Majorana boundary modes at domain walls of the coin parameter.
//!
//! Bound states are assembled from evanescent plane waves `e^{ikn}[a_k, b_k]ᵀ`
//! with complex momentum. On each side of a wall the decay constant κ follows
//! from `cos E = cosθ cosh κ`. When `cos E / cosθ < 0` the momentum picks up a
//! real part π, so the tail alternates in sign ([`MomentumClass::PiShifted`]).
//!
//! Closed forms are written for one sign orientation of the wall. The mirror
//! orientation follows from the exact symmetry `θ → −θ` on every site, which
//! maps eigenstates by `σ_z` (the right-moving component changes sign).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::bulk::eigenspinor_raw;
use crate::error::{Error, Result};
use crate::lattice::{build_profile_at, step, CoinAngle, CoinProfile, ProfileKind, Spinor, WalkerState};

/// Largest seam amplitude, relative to the peak, accepted for a materialized mode.
pub const SEAM_TAIL_TOLERANCE: f64 = 1e-10;

/// Sites on each side of the ring seam left out of eigen-residual checks.
pub const SEAM_MARGIN: usize = 2;

const DEGENERATE: f64 = 1e-9;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The two self-conjugate quasi-energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MajoranaEnergy {
    Zero,
    Pi,
}

impl MajoranaEnergy {
    pub fn value(self) -> f64 {
        match self {
            MajoranaEnergy::Zero => 0.0,
            MajoranaEnergy::Pi => PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MajoranaEnergy::Zero => "0",
            MajoranaEnergy::Pi => "pi",
        }
    }
}

impl fmt::Display for MajoranaEnergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MajoranaEnergy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(MajoranaEnergy::Zero),
            "pi" | "π" | "1" => Ok(MajoranaEnergy::Pi),
            other => Err(Error::InvalidParameter(format!("energy must be 0 or pi, got `{other}`"))),
        }
    }
}

/// Positive, finite decay rate of a bound-state tail.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DecayConstant(f64);

impl DecayConstant {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa > 0.0 && kappa.is_finite() {
            Ok(DecayConstant(kappa))
        } else {
            Err(Error::InvalidParameter(format!("decay constant must be positive and finite, got {kappa}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Real part of an evanescent momentum: 0 or π.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumClass {
    Imaginary,
    PiShifted,
}

/// Decaying plane wave in one region: `k = k₀ ± iκ` with `k₀ ∈ {0, π}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evanescent {
    pub kappa: DecayConstant,
    pub class: MomentumClass,
}

impl Evanescent {
    /// Solves `cos E = cosθ cosh κ` (up to the π shift) for κ > 0.
    pub fn at_energy(theta: CoinAngle, energy: f64) -> Result<Self> {
        let c = theta.cos();
        if c.abs() < 1e-12 {
            return Err(Error::InvalidParameter(format!("θ = {theta} is a hard wall: κ is infinite")));
        }
        let ratio = energy.cos() / c;
        let kappa = ratio.abs().acosh();
        if !(ratio.abs() > 1.0) {
            return Err(Error::OutsideWindow {
                energy,
                reason: format!("|cos E / cosθ| = {} ≤ 1 for θ = {theta}", ratio.abs()),
            });
        }
        let class = if ratio > 0.0 { MomentumClass::Imaginary } else { MomentumClass::PiShifted };
        Ok(Evanescent { kappa: DecayConstant::new(kappa)?, class })
    }

    fn offset(&self) -> f64 {
        match self.class {
            MomentumClass::Imaginary => 0.0,
            MomentumClass::PiShifted => PI,
        }
    }

    /// Momentum of the wave decaying towards `n → +∞`.
    pub fn decaying_right(&self) -> Complex64 {
        Complex64::new(self.offset(), self.kappa.0)
    }

    /// Momentum of the wave decaying towards `n → −∞`.
    pub fn decaying_left(&self) -> Complex64 {
        Complex64::new(self.offset(), -self.kappa.0)
    }
}

/// `κ = ln((1 + |sinθ|)/|cosθ|)`, the `E ∈ {0, π}` decay constant.
///
/// The sign in `e^κ = ±(1 ± sinθ)/cosθ` is picked so that κ > 0; `E = π`
/// only changes the momentum class, not the rate.
pub fn decay_constant(theta: CoinAngle, _energy: MajoranaEnergy) -> Result<DecayConstant> {
    let (s, c) = theta.radians().sin_cos();
    if s.abs() < DEGENERATE {
        return Err(Error::GapClosed(format!("sinθ = 0 at θ = {theta}: κ = 0")));
    }
    if c.abs() < DEGENERATE {
        return Err(Error::InvalidParameter(format!("θ = {theta} is a hard wall: κ is infinite")));
    }
    DecayConstant::new(((1.0 + s.abs()) / c.abs()).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceReason {
    OppositeSign,
    SameSign,
    GapClosed,
}

impl ExistenceReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExistenceReason::OppositeSign => "opposite-sign-ok",
            ExistenceReason::SameSign => "same-sign-no-bound-state",
            ExistenceReason::GapClosed => "gap-closed",
        }
    }
}

impl fmt::Display for ExistenceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub reason: ExistenceReason,
}

/// A single wall binds a pair of modes (at E = 0 and E = π) iff the
/// topological numbers `sgn(sinθ)` differ across it.
pub fn single_boundary_existence(theta1: CoinAngle, theta2: CoinAngle) -> ExistenceVerdict {
    let (s1, s2) = (theta1.sin(), theta2.sin());
    if s1.abs() < DEGENERATE || s2.abs() < DEGENERATE {
        return ExistenceVerdict { exists: false, reason: ExistenceReason::GapClosed };
    }
    if s1.signum() != s2.signum() {
        ExistenceVerdict { exists: true, reason: ExistenceReason::OppositeSign }
    } else {
        ExistenceVerdict { exists: false, reason: ExistenceReason::SameSign }
    }
}

/// Amplitudes multiplying the plane waves of the ansatz, before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnsatzCoefficients {
    /// `ψ(n) = r·x₁ⁿ(x₁, −1)` for `n ≤ 0` and `t·x₂ⁿ(x₂, −1)` for `n ≥ 1`
    /// (with `xᵢ → −xᵢ` as the base at E = π).
    Single { r: f64, t: f64 },
    /// `A e^{ik₂n}v₂ + B e^{−ik₂n}v₂'` inside, `C e^{ik₁n}v₃` right, `D e^{−ik₁n}v₁` left.
    TwoBoundary { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
}

/// Closed-form bound state materialized on a ring.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateSolution {
    pub energy: f64,
    pub kappa1: DecayConstant,
    pub kappa2: DecayConstant,
    pub coefficients: AnsatzCoefficients,
    pub configuration: ProfileKind,
    pub profile: CoinProfile,
    pub wavefunction: WalkerState,
}

impl BoundStateSolution {
    /// `max |Uψ − e^{−iE}ψ|` away from the ring seam.
    pub fn eigen_residual(&self) -> f64 {
        eigen_residual(&self.wavefunction, &self.profile, self.energy, SEAM_MARGIN)
            .expect("solution profile and wavefunction share the ring")
    }
}

/// `max |Uψ − e^{−iE}ψ|` over ring sites `margin..L−margin`.
pub fn eigen_residual(state: &WalkerState, profile: &CoinProfile, energy: f64, margin: usize) -> Result<f64> {
    let next = step(state, profile)?;
    let phase = Complex64::from_polar(1.0, -energy);
    let l = state.n_sites();
    let amps = state.amplitudes();
    let out = next.amplitudes();
    Ok((margin..l.saturating_sub(margin))
        .flat_map(|site| [2 * site, 2 * site + 1])
        .map(|i| (out[i] - phase * amps[i]).norm())
        .fold(0.0, f64::max))
}

/// Closed-form E = 0 or E = π mode of a single wall: θ₁ for `n ≤ 0`, θ₂ for `n ≥ 1`.
///
/// For `sinθ₁ > 0 > sinθ₂`:
/// `ψ(n) = xᵢ^{n−1}(xᵢ, −1)` at E = 0 and `(−xᵢ)^{n−1}(xᵢ, −1)` at E = π, with
/// `xᵢ = (1 + sinθᵢ)/cosθᵢ`. The other orientation uses the `θ → −θ` symmetry.
/// `origin` is the ring index of `n = 0` (default `L/2`).
pub fn single_boundary_mode(
    theta1: CoinAngle,
    theta2: CoinAngle,
    energy: MajoranaEnergy,
    n_sites: usize,
    origin: Option<usize>,
) -> Result<BoundStateSolution> {
    let verdict = single_boundary_existence(theta1, theta2);
    if !verdict.exists {
        return Err(Error::NoBoundState(format!("θ₁ = {theta1}, θ₂ = {theta2}: {}", verdict.reason)));
    }
    let flip = theta1.sin() < 0.0;
    let (t1, t2) = if flip { (theta1.negated(), theta2.negated()) } else { (theta1, theta2) };
    let kappa1 = decay_constant(t1, energy)?;
    let kappa2 = decay_constant(t2, energy)?;

    let origin = origin.unwrap_or_else(|| ProfileKind::SingleBoundary.default_origin(n_sites));
    let profile = build_profile_at(ProfileKind::SingleBoundary, n_sites, theta1, theta2, 0, origin)?;

    let x1 = (1.0 + t1.sin()) / t1.cos();
    let x2 = (1.0 + t2.sin()) / t2.cos();
    let (base1, base2) = match energy {
        MajoranaEnergy::Zero => (x1, x2),
        MajoranaEnergy::Pi => (-x1, -x2),
    };
    let sz = if flip { -1.0 } else { 1.0 };
    let spinors: Vec<Spinor> = (0..n_sites)
        .map(|site| {
            let n = profile.coordinate(site) as i32;
            let (x, base) = if n <= 0 { (x1, base1) } else { (x2, base2) };
            let amp = base.powi(n - 1);
            Spinor::new(Complex64::new(amp * x, 0.0), Complex64::new(-amp * sz, 0.0))
        })
        .collect();
    check_seam_tail(&spinors)?;

    Ok(BoundStateSolution {
        energy: energy.value(),
        kappa1,
        kappa2,
        coefficients: AnsatzCoefficients::Single { r: 1.0 / base1, t: 1.0 / base2 },
        configuration: ProfileKind::SingleBoundary,
        profile,
        wavefunction: WalkerState::from_spinors(&spinors)?,
    })
}

fn check_seam_tail(spinors: &[Spinor]) -> Result<()> {
    let peak = spinors.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max).sqrt();
    let edge = spinors[0].norm_sqr().max(spinors[spinors.len() - 1].norm_sqr()).sqrt();
    let tail = edge / peak;
    if !(tail <= SEAM_TAIL_TOLERANCE) {
        return Err(Error::RingTooSmall { n_sites: spinors.len(), tail });
    }
    Ok(())
}

/// Determinant condition of the single-wall matching problem:
/// `i sin E − (sinθ₂ cosθ₁ sinh κ₁ + sinθ₁ cosθ₂ sinh κ₂)/(sinθ₁ − sinθ₂)`.
pub fn single_boundary_condition_residual(
    theta1: CoinAngle,
    theta2: CoinAngle,
    energy: f64,
    kappa1: DecayConstant,
    kappa2: DecayConstant,
) -> Result<Complex64> {
    let (s1, c1) = theta1.radians().sin_cos();
    let (s2, c2) = theta2.radians().sin_cos();
    let denom = s1 - s2;
    if denom.abs() < 1e-12 {
        return Err(Error::InvalidParameter("sinθ₁ = sinθ₂: condition undefined".into()));
    }
    let real = (s2 * c1 * kappa1.0.sinh() + s1 * c2 * kappa2.0.sinh()) / denom;
    Ok(Complex64::new(-real, sin_exact(energy)))
}

/// `sin E` that is exactly zero at `E ∈ {0, ±π}`.
fn sin_exact(energy: f64) -> f64 {
    if energy == 0.0 || energy.abs() == PI {
        0.0
    } else {
        energy.sin()
    }
}

/// κ ≥ 0 with `cosh κ = |cos E / cosθ|`.
fn kappa_from_energy(theta: CoinAngle, energy: f64) -> Result<f64> {
    let c = theta.cos();
    let ratio = (energy.cos() / c).abs();
    if !(ratio >= 1.0) {
        return Err(Error::OutsideWindow {
            energy, reason: format!("cosh κ = {ratio} < 1 for θ = {theta}")
        });
    }
    Ok(ratio.acosh())
}

fn require_finite_kappa(theta: CoinAngle, what: &str) -> Result<()> {
    if theta.cos().abs() < 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "{what} = {theta} has cosθ = 0; use wire_condition_residual"
        )));
    }
    Ok(())
}

/// `√(sin²θ − sin²E) = |cosθ| sinh κ`, the form that keeps its digits when E
/// is tiny.
fn evanescent_root(theta: CoinAngle, sin_sq: f64, energy: f64) -> Result<f64> {
    let d = theta.sin() * theta.sin() - sin_sq;
    if d < -1e-15 {
        return Err(Error::OutsideWindow { energy, reason: format!("cos²E < cos²θ for θ = {theta}") });
    }
    Ok(d.max(0.0).sqrt())
}

/// `tanh y (X − s₁s₂) − sign·r₁r₂` with `X = sin²E`, `rᵢ = √(sᵢ² − X)`.
///
/// In the binding case (`sign > 0`, `s₁s₂ < 0`) both terms are close to
/// `|s₁s₂|` and their difference is rebuilt from `A² − r₁²r₂² = X(|s₁| + |s₂|)²`.
fn two_wall_bracket(sin_sq: f64, s1: f64, s2: f64, r1: f64, r2: f64, y: f64, sign: f64) -> f64 {
    if sign > 0.0 && s1 * s2 < 0.0 {
        let a = sin_sq + (s1 * s2).abs();
        let close = sin_sq * (s1.abs() + s2.abs()).powi(2) / (a + r1 * r2);
        close - a * 2.0 / ((2.0 * y).exp() + 1.0)
    } else {
        y.tanh() * (sin_sq - s1 * s2) - sign * r1 * r2
    }
}

/// Two walls, symmetric ends (θ₃ = θ₁):
/// `sinh[κ₂(N+1)](sin²E − sinθ₁sinθ₂) − cosh[κ₂(N+1)] cosθ₁cosθ₂ sinh κ₁ sinh κ₂`.
pub fn symmetric_condition_residual(
    theta1: CoinAngle,
    theta2: CoinAngle,
    energy: f64,
    wire_length: usize,
) -> Result<f64> {
    require_finite_kappa(theta1, "θ₁")?;
    require_finite_kappa(theta2, "θ₂")?;
    let sin_sq = sin_exact(energy).powi(2);
    let r1 = evanescent_root(theta1, sin_sq, energy)?;
    let r2 = evanescent_root(theta2, sin_sq, energy)?;
    let y = (r2 / theta2.cos().abs()).asinh() * (wire_length as f64 + 1.0);
    let sign = (theta1.cos() * theta2.cos()).signum();
    Ok(y.cosh() * two_wall_bracket(sin_sq, theta1.sin(), theta2.sin(), r1, r2, y, sign))
}

/// The symmetric condition with κ₁ eliminated:
/// `sinh[κ₂(N+1)](sin²E − sinθ₁sinθ₂) − cosh[κ₂(N+1)] cosθ₂ sinh κ₂ √(cos²E − cos²θ₁)`.
///
/// Stays finite for reflective ends θ₁ = ±π/2.
pub fn wire_condition_residual(
    theta1: CoinAngle,
    theta2: CoinAngle,
    energy: f64,
    wire_length: usize,
) -> Result<f64> {
    require_finite_kappa(theta2, "θ₂")?;
    let sin_sq = sin_exact(energy).powi(2);
    let r1 = evanescent_root(theta1, sin_sq, energy)?;
    let r2 = evanescent_root(theta2, sin_sq, energy)?;
    let y = (r2 / theta2.cos().abs()).asinh() * (wire_length as f64 + 1.0);
    let sign = theta2.cos().signum();
    Ok(y.cosh() * two_wall_bracket(sin_sq, theta1.sin(), theta2.sin(), r1, r2, y, sign))
}

/// Two walls, antisymmetric ends (θ₃ = −θ₁):
/// `sin E (cosθ₁ sinh κ₁ tanh[κ₂(N+1)] + cosθ₂ sinh κ₂)`. Exactly zero at E ∈ {0, π}.
pub fn antisymmetric_condition_residual(
    theta1: CoinAngle,
    theta2: CoinAngle,
    energy: f64,
    wire_length: usize,
) -> Result<f64> {
    require_finite_kappa(theta1, "θ₁")?;
    require_finite_kappa(theta2, "θ₂")?;
    let k1 = kappa_from_energy(theta1, energy)?;
    let k2 = kappa_from_energy(theta2, energy)?;
    let span = k2 * (wire_length as f64 + 1.0);
    Ok(sin_exact(energy) * (theta1.cos() * k1.sinh() * span.tanh() + theta2.cos() * k2.sinh()))
}

/// Bound state of the antisymmetric two-wall profile, localized at the single
/// jump of the topological number at `n = 0`.
///
/// In the orientation `sinθ₁ < 0 < sinθ₂` the coefficients are `A = sinθ₁`,
/// `B = 0`, `D = sinθ₂` and `C = −sinθ₂ e^{(κ₁−κ₂)(N+1)}` (for the
/// pure-imaginary momentum class); C and D are obtained from continuity of
/// the right-moving component at `n = 0` and `n = N+1`.
/// `origin` is the ring index of `n = 0` (default `L/4`).
pub fn antisymmetric_mode(
    theta1: CoinAngle,
    theta2: CoinAngle,
    energy: MajoranaEnergy,
    wire_length: usize,
    n_sites: usize,
    origin: Option<usize>,
) -> Result<BoundStateSolution> {
    let verdict = single_boundary_existence(theta1, theta2);
    if !verdict.exists {
        return Err(Error::NoBoundState(format!("θ₁ = {theta1}, θ₂ = {theta2}: {}", verdict.reason)));
    }
    let origin = origin.unwrap_or_else(|| ProfileKind::Antisymmetric.default_origin(n_sites));
    let profile = build_profile_at(ProfileKind::Antisymmetric, n_sites, theta1, theta2, wire_length, origin)?;

    let flip = theta1.sin() > 0.0;
    let (t1, t2) = if flip { (theta1.negated(), theta2.negated()) } else { (theta1, theta2) };
    let e = energy.value();
    let outer = Evanescent::at_energy(t1, e)?;
    let inner = Evanescent::at_energy(t2, e)?;

    let k2 = inner.decaying_right();
    let k1_left = outer.decaying_left();
    let k1_right = outer.decaying_right();
    let v2 = eigenspinor_raw(t2, k2, e)?;
    let v1 = eigenspinor_raw(t1, k1_left, e)?;
    let v3 = eigenspinor_raw(t1.negated(), k1_right, e)?;

    let edge = wire_length as f64 + 1.0;
    let a = Complex64::new(t1.sin(), 0.0);
    let d = a * v2.b / v1.b;
    // C written relative to n = N+1 to keep the outer tail in range
    let c_edge = a * (I * k2 * edge).exp() * v2.b / v3.b;
    let c = c_edge * (-I * k1_right * edge).exp();

    let sz = if flip { -1.0 } else { 1.0 };
    let n_last = wire_length as isize;
    let spinors: Vec<Spinor> = (0..n_sites)
        .map(|site| {
            let n = profile.coordinate(site);
            let nf = n as f64;
            let s = if n < 0 {
                v1.scale(d * (I * k1_left * nf).exp())
            } else if n <= n_last {
                v2.scale(a * (I * k2 * nf).exp())
            } else {
                v3.scale(c_edge * (I * k1_right * (nf - edge)).exp())
            };
            Spinor::new(s.a, s.b * sz)
        })
        .collect();
    check_seam_tail(&spinors)?;

    Ok(BoundStateSolution {
        energy: e,
        kappa1: outer.kappa,
        kappa2: inner.kappa,
        coefficients: AnsatzCoefficients::TwoBoundary { a, b: Complex64::new(0.0, 0.0), c, d },
        configuration: ProfileKind::Antisymmetric,
        profile,
        wavefunction: WalkerState::from_spinors(&spinors)?,
    })
}

/// Decay constants of the symmetric profile as `N → ∞`, where the modes sit
/// at E ∈ {0, π}: `sinh κ₁ = sgn(θ₁) tanθ₁`, `sinh κ₂ = tanθ₂` in the
/// orientation `sinθ₂ > 0`, i.e. `sinh κᵢ = |tanθᵢ|`.
pub fn infinite_wire_limit(theta1: CoinAngle, theta2: CoinAngle) -> Result<(DecayConstant, DecayConstant)> {
    if !(theta1.sin() * theta2.sin() < 0.0) {
        return Err(Error::NoBoundState(format!(
            "infinite-wire modes need sinθ₁·sinθ₂ < 0 (θ₁ = {theta1}, θ₂ = {theta2})"
        )));
    }
    require_finite_kappa(theta1, "θ₁")?;
    require_finite_kappa(theta2, "θ₂")?;
    let k1 = theta1.radians().tan().abs().asinh();
    let k2 = theta2.radians().tan().abs().asinh();
    Ok((DecayConstant::new(k1)?, DecayConstant::new(k2)?))
}

/// `κ₂ = −ln|(1 − sgn(θ₂) sinθ₂)/cosθ₂|`, the rate at which the splitting of
/// the two end modes of a wire vanishes with its length.
pub fn splitting_decay_rate(theta2: CoinAngle) -> Result<f64> {
    let (s, c) = theta2.radians().sin_cos();
    if s.abs() < DEGENERATE || c.abs() < DEGENERATE {
        return Err(Error::InvalidParameter(format!("degenerate θ₂ = {theta2}")));
    }
    Ok(-((1.0 - theta2.radians().signum() * s) / c).abs().ln())
}
