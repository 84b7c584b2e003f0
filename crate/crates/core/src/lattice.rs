//! Ring lattice, coin profiles and the one-step walk `U = S·C`.
//!
//! Amplitudes are stored interleaved, `(a₀, b₀, a₁, b₁, …)`, where `a` is the
//! left-moving and `b` the right-moving component. One step applies the coin
//! at every site and then shifts `a` one site left and `b` one site right,
//! with periodic wrap-around.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `Σ|ψ|² = 1` accepted by [`WalkerState::from_amplitudes`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Coin parameter θ, kept in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CoinAngle(f64);

impl CoinAngle {
    /// Wraps `theta` (radians) into `(−π, π]`.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidAngle(theta));
        }
        Ok(CoinAngle(wrap_angle(theta)))
    }

    /// Builds an angle from a value in units of π (`0.25` is π/4).
    pub fn from_pi_units(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidAngle(x));
        }
        Self::new(x * PI)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// The coin with opposite topological number, `θ → −θ`.
    pub fn negated(self) -> Self {
        CoinAngle(wrap_angle(-self.0))
    }

    /// True for the fully reflecting coins `θ = ±π/2`.
    pub fn is_reflective(self) -> bool {
        self.cos().abs() < 1e-12
    }
}

impl fmt::Display for CoinAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π", self.0 / PI)
    }
}

/// Maps any finite angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    // rem_euclid can land exactly on 2π for tiny negative inputs
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// Two-component amplitude at one site: `a` left-moving, `b` right-moving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub a: Complex64,
    pub b: Complex64,
}

impl Spinor {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Spinor { a, b }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    pub fn scale(&self, s: Complex64) -> Spinor {
        Spinor::new(self.a * s, self.b * s)
    }

    /// ⟨self, other⟩ with the first argument conjugated.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    pub fn normalized(&self) -> Option<Spinor> {
        let n = self.norm_sqr().sqrt();
        (n > 0.0 && n.is_finite()).then(|| self.scale(Complex64::new(1.0 / n, 0.0)))
    }
}

/// Shape of a coin profile on the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// θ₁ on every site.
    Uniform,
    /// θ₁ for `n ≤ 0`, θ₂ for `n ≥ 1`.
    SingleBoundary,
    /// θ₁ for `n < 0` and `n > N`, θ₂ on `0..=N`.
    Symmetric,
    /// θ₁ for `n < 0`, θ₂ on `0..=N`, −θ₁ for `n > N`.
    Antisymmetric,
    /// Symmetric profile whose exterior coin is reflective, θ₁ = ±π/2.
    Wire,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 5] = [
        ProfileKind::Uniform,
        ProfileKind::SingleBoundary,
        ProfileKind::Symmetric,
        ProfileKind::Antisymmetric,
        ProfileKind::Wire,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Uniform => "uniform",
            ProfileKind::SingleBoundary => "single",
            ProfileKind::Symmetric => "symmetric",
            ProfileKind::Antisymmetric => "antisymmetric",
            ProfileKind::Wire => "wire",
        }
    }

    /// Ring index of lattice site `n = 0` when no offset is given.
    ///
    /// Two-boundary profiles start their inner region at `L/4`; a single
    /// boundary sits at `L/2` so both half-lines get the same length.
    pub fn default_origin(self, n_sites: usize) -> usize {
        match self {
            ProfileKind::Uniform => 0,
            ProfileKind::SingleBoundary => n_sites / 2,
            ProfileKind::Symmetric | ProfileKind::Antisymmetric | ProfileKind::Wire => n_sites / 4,
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(ProfileKind::Uniform),
            "single" | "single-boundary" => Ok(ProfileKind::SingleBoundary),
            "symmetric" => Ok(ProfileKind::Symmetric),
            "antisymmetric" => Ok(ProfileKind::Antisymmetric),
            "wire" => Ok(ProfileKind::Wire),
            other => Err(Error::InvalidParameter(format!("unknown profile kind `{other}`"))),
        }
    }
}

/// Half-open run `[start, end)` of ring sites sharing one coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub start: usize,
    pub end: usize,
    pub theta: CoinAngle,
}

/// Coin angle for every site of a ring of `L` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinProfile {
    angles: Vec<CoinAngle>,
    regions: Vec<Region>,
    origin: usize,
}

impl CoinProfile {
    pub fn uniform(n_sites: usize, theta: CoinAngle) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParameter("ring must have at least one site".into()));
        }
        Ok(CoinProfile {
            angles: vec![theta; n_sites],
            regions: vec![Region { start: 0, end: n_sites, theta }],
            origin: 0,
        })
    }

    /// Arbitrary per-site angles, without region metadata.
    pub fn from_angles(angles: Vec<CoinAngle>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidParameter("ring must have at least one site".into()));
        }
        Ok(CoinProfile { angles, regions: Vec::new(), origin: 0 })
    }

    /// Builds a profile from regions that tile `[0, L)` in order.
    pub fn from_regions(n_sites: usize, regions: Vec<Region>, origin: usize) -> Result<Self> {
        let mut cursor = 0;
        let mut angles = Vec::with_capacity(n_sites);
        for r in &regions {
            if r.start != cursor || r.end <= r.start {
                return Err(Error::InvalidParameter(format!(
                    "regions must tile [0, {n_sites}) without gaps or overlap (at site {cursor})"
                )));
            }
            angles.extend(std::iter::repeat_n(r.theta, r.end - r.start));
            cursor = r.end;
        }
        if cursor != n_sites || n_sites == 0 {
            return Err(Error::InvalidParameter(format!("regions cover {cursor} of {n_sites} sites")));
        }
        if origin >= n_sites {
            return Err(Error::InvalidParameter(format!("origin {origin} outside ring")));
        }
        Ok(CoinProfile { angles, regions, origin })
    }

    pub fn n_sites(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[CoinAngle] {
        &self.angles
    }

    pub fn angle(&self, site: usize) -> CoinAngle {
        self.angles[site]
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Ring index of lattice site `n = 0`.
    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Lattice coordinate `n` of ring index `site`.
    pub fn coordinate(&self, site: usize) -> isize {
        site as isize - self.origin as isize
    }

    /// Same profile with every angle negated (θ → −θ).
    pub fn negated(&self) -> CoinProfile {
        CoinProfile {
            angles: self.angles.iter().map(|t| t.negated()).collect(),
            regions: self.regions.iter().map(|r| Region { theta: r.theta.negated(), ..*r }).collect(),
            origin: self.origin,
        }
    }
}

/// Builds a profile with the kind's default origin.
pub fn build_profile(
    kind: ProfileKind,
    n_sites: usize,
    theta1: CoinAngle,
    theta2: CoinAngle,
    wire_length: usize,
) -> Result<CoinProfile> {
    build_profile_at(kind, n_sites, theta1, theta2, wire_length, kind.default_origin(n_sites))
}

/// Builds a profile whose lattice site `n = 0` sits at ring index `origin`.
///
/// `wire_length` is `N`: the inner region covers sites `0..=N`. It is ignored
/// for uniform and single-boundary profiles.
pub fn build_profile_at(
    kind: ProfileKind,
    n_sites: usize,
    theta1: CoinAngle,
    theta2: CoinAngle,
    wire_length: usize,
    origin: usize,
) -> Result<CoinProfile> {
    match kind {
        ProfileKind::Uniform => CoinProfile::uniform(n_sites, theta1),
        ProfileKind::SingleBoundary => {
            if origin + 1 >= n_sites {
                return Err(Error::InvalidParameter(format!(
                    "boundary at ring index {origin} leaves no θ₂ sites on a ring of {n_sites}"
                )));
            }
            CoinProfile::from_regions(
                n_sites,
                vec![
                    Region { start: 0, end: origin + 1, theta: theta1 },
                    Region { start: origin + 1, end: n_sites, theta: theta2 },
                ],
                origin,
            )
        }
        ProfileKind::Symmetric | ProfileKind::Antisymmetric | ProfileKind::Wire => {
            let inner = wire_length + 1;
            if inner >= n_sites {
                return Err(Error::InvalidParameter(format!(
                    "inner region of N+1 = {inner} sites does not fit a ring of {n_sites}"
                )));
            }
            if origin == 0 || origin + inner >= n_sites {
                return Err(Error::InvalidParameter(format!(
                    "origin {origin} leaves no exterior on one side (L = {n_sites}, N = {wire_length})"
                )));
            }
            if kind == ProfileKind::Wire && !theta1.is_reflective() {
                return Err(Error::InvalidParameter(format!("wire ends need θ₁ = ±π/2, got {theta1}")));
            }
            let right = match kind {
                ProfileKind::Antisymmetric => theta1.negated(),
                _ => theta1,
            };
            CoinProfile::from_regions(
                n_sites,
                vec![
                    Region { start: 0, end: origin, theta: theta1 },
                    Region { start: origin, end: origin + inner, theta: theta2 },
                    Region { start: origin + inner, end: n_sites, theta: right },
                ],
                origin,
            )
        }
    }
}

/// Reflective end coin with the sign of `sign`.
pub fn reflective_coin(sign: f64) -> CoinAngle {
    CoinAngle(if sign < 0.0 { -FRAC_PI_2 } else { FRAC_PI_2 })
}

/// Normalized two-component wavefunction on the ring, interleaved storage.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    amps: Vec<Complex64>,
}

impl WalkerState {
    /// Accepts interleaved amplitudes that are already unit-norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        check_shape(&amps)?;
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n2));
        }
        Ok(WalkerState { amps })
    }

    /// Rescales interleaved amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        check_shape(&amps)?;
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let s = 1.0 / n2.sqrt();
        amps.iter_mut().for_each(|z| *z *= s);
        Ok(WalkerState { amps })
    }

    pub fn from_spinors(spinors: &[Spinor]) -> Result<Self> {
        Self::normalized(spinors.iter().flat_map(|s| [s.a, s.b]).collect())
    }

    /// Whole weight on one site with internal state `spinor` (normalized).
    pub fn localized(n_sites: usize, site: usize, spinor: Spinor) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::InvalidParameter(format!("site {site} outside ring of {n_sites}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * n_sites];
        amps[2 * site] = spinor.a;
        amps[2 * site + 1] = spinor.b;
        Self::normalized(amps)
    }

    pub fn n_sites(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn spinor(&self, site: usize) -> Spinor {
        Spinor::new(self.amps[2 * site], self.amps[2 * site + 1])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨self, other⟩.
    pub fn inner(&self, other: &WalkerState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum()
    }

    /// Moves the state `by` sites to the right on the ring.
    pub fn translated(&self, by: isize) -> WalkerState {
        let l = self.n_sites() as isize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for site in 0..self.n_sites() {
            let dest = (site as isize + by).rem_euclid(l) as usize;
            out[2 * dest] = self.amps[2 * site];
            out[2 * dest + 1] = self.amps[2 * site + 1];
        }
        WalkerState { amps: out }
    }
}

fn check_shape(amps: &[Complex64]) -> Result<()> {
    if amps.is_empty() || !amps.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "interleaved amplitude vector needs an even, nonzero length, got {}",
            amps.len()
        )));
    }
    if amps.iter().any(|z| !z.is_finite()) {
        return Err(Error::InvalidParameter("non-finite amplitude".into()));
    }
    Ok(())
}

/// `[[cosθ, sinθ], [−sinθ, cosθ]]` in the `{L, R}` basis.
pub fn coin_matrix(theta: CoinAngle) -> Matrix2<Complex64> {
    let (s, c) = theta.radians().sin_cos();
    Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    )
}

pub fn apply_coin(state: &WalkerState, profile: &CoinProfile) -> Result<WalkerState> {
    check_lengths(state, profile)?;
    let mut out = state.amps.clone();
    for (site, theta) in profile.angles.iter().enumerate() {
        let (s, c) = theta.radians().sin_cos();
        let a = out[2 * site];
        let b = out[2 * site + 1];
        out[2 * site] = a * c + b * s;
        out[2 * site + 1] = b * c - a * s;
    }
    Ok(WalkerState { amps: out })
}

/// `a'ₙ = aₙ₊₁`, `b'ₙ = bₙ₋₁`, indices mod `L`.
pub fn apply_shift(state: &WalkerState) -> WalkerState {
    let l = state.n_sites();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * l];
    for n in 0..l {
        out[2 * n] = state.amps[2 * ((n + 1) % l)];
        out[2 * n + 1] = state.amps[2 * ((n + l - 1) % l) + 1];
    }
    WalkerState { amps: out }
}

/// One application of `U = S·C`.
pub fn step(state: &WalkerState, profile: &CoinProfile) -> Result<WalkerState> {
    check_lengths(state, profile)?;
    let l = state.n_sites();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * l];
    for n in 0..l {
        let (s, c) = profile.angles[n].radians().sin_cos();
        let a = state.amps[2 * n];
        let b = state.amps[2 * n + 1];
        out[2 * ((n + l - 1) % l)] = a * c + b * s;
        out[2 * ((n + 1) % l) + 1] = b * c - a * s;
    }
    Ok(WalkerState { amps: out })
}

pub fn evolve(state: &WalkerState, profile: &CoinProfile, t: usize) -> Result<WalkerState> {
    check_lengths(state, profile)?;
    let mut current = state.clone();
    for _ in 0..t {
        current = step(&current, profile)?;
    }
    Ok(current)
}

/// `pₙ = |aₙ|² + |bₙ|²`.
pub fn position_distribution(state: &WalkerState) -> Vec<f64> {
    state.amps.chunks_exact(2).map(|ab| ab[0].norm_sqr() + ab[1].norm_sqr()).collect()
}

fn check_lengths(state: &WalkerState, profile: &CoinProfile) -> Result<()> {
    if state.n_sites() != profile.n_sites() {
        return Err(Error::LengthMismatch { state: state.n_sites(), profile: profile.n_sites() });
    }
    Ok(())
}
