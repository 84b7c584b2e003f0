//! Band theory of the translation-invariant walk.
//!
//! For a uniform coin the plane waves `e^{ikn}[a_k, b_k]ᵀ` diagonalize the walk
//! with `cos E = cosθ cos k`. Writing `U(k) = e^{−iH(k)}` with
//! `H(k) = E(k) n(k)·σ` exposes a chiral symmetry, an intrinsic particle-hole
//! symmetry and a winding number `m = sgn(sinθ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{CoinAngle, Spinor};

/// Inputs with `|sin E|` (or `|sinθ|`) below this are treated as gap closings.
pub const GAP_TOLERANCE: f64 = 1e-9;

/// Default k-grid for [`winding_number`].
pub const DEFAULT_WINDING_POINTS: usize = 1024;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Energy band selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Positive-branch quasi-energy `E = arccos(cosθ cos k) ∈ [0, π]`.
pub fn dispersion(theta: CoinAngle, k: f64) -> f64 {
    (theta.cos() * k.cos()).clamp(-1.0, 1.0).acos()
}

/// Normalized eigenspinor of `U(k)` on the requested branch.
pub fn eigenspinor(theta: CoinAngle, k: f64, branch: Branch) -> Result<Spinor> {
    let e = match branch {
        Branch::Plus => dispersion(theta, k),
        Branch::Minus => -dispersion(theta, k),
    };
    if e.sin().abs() < GAP_TOLERANCE {
        return Err(Error::GapClosed(format!("sin E = 0 at θ = {theta}, k = {k}; use eigenspinor_raw")));
    }
    let raw = spinor_numerator(theta, re(k), e);
    raw.normalized()
        .filter(|_| raw.norm_sqr() > GAP_TOLERANCE * GAP_TOLERANCE)
        .ok_or_else(|| Error::GapClosed(format!("degenerate spinor at θ = {theta}, k = {k}")))
}

/// Unnormalized spinor `(i sinθ e^{ik}, sin E + cosθ sin k)` for a possibly
/// complex momentum. Valid at `sin E = 0`, where the normalized form is singular.
pub fn eigenspinor_raw(theta: CoinAngle, k: Complex64, energy: f64) -> Result<Spinor> {
    let residual = (re(energy.cos()) - re(theta.cos()) * k.cos()).norm();
    if !(residual <= 1e-10) {
        return Err(Error::DispersionViolated(residual));
    }
    Ok(spinor_numerator(theta, k, energy))
}

fn spinor_numerator(theta: CoinAngle, k: Complex64, energy: f64) -> Spinor {
    let (s, c) = theta.radians().sin_cos();
    Spinor::new(I * s * (I * k).exp(), re(energy.sin()) + k.sin() * c)
}

/// `U(k) = [[cosθ e^{ik}, sinθ e^{ik}], [−sinθ e^{−ik}, cosθ e^{−ik}]]`.
pub fn bloch_unitary(theta: CoinAngle, k: f64) -> Matrix2<Complex64> {
    let (s, c) = theta.radians().sin_cos();
    let ep = Complex64::from_polar(1.0, k);
    let em = ep.conj();
    Matrix2::new(ep * c, ep * s, -em * s, em * c)
}

/// `n(k) = −(sinθ sin k, sinθ cos k, cosθ sin k) / sin E`.
pub fn bloch_vector(theta: CoinAngle, k: f64) -> Result<[f64; 3]> {
    let sin_e = dispersion(theta, k).sin();
    if sin_e.abs() < GAP_TOLERANCE {
        return Err(Error::GapClosed(format!("sin E = 0 at θ = {theta}, k = {k}")));
    }
    let (s, c) = theta.radians().sin_cos();
    let (sk, ck) = k.sin_cos();
    Ok([-s * sk / sin_e, -s * ck / sin_e, -c * sk / sin_e])
}

/// `v·σ` for a real 3-vector.
pub fn pauli_dot(v: [f64; 3]) -> Matrix2<Complex64> {
    Matrix2::new(re(v[2]), Complex64::new(v[0], -v[1]), Complex64::new(v[0], v[1]), re(-v[2]))
}

pub fn pauli_y() -> Matrix2<Complex64> {
    pauli_dot([0.0, 1.0, 0.0])
}

/// `H(k) = E(k) n(k)·σ`, so that `U(k) = e^{−iH(k)}`.
pub fn effective_hamiltonian(theta: CoinAngle, k: f64) -> Result<Matrix2<Complex64>> {
    let n = bloch_vector(theta, k)?;
    Ok(pauli_dot(n) * re(dispersion(theta, k)))
}

/// Everything known about one momentum of a uniform walk.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochData {
    pub k: f64,
    pub energy: f64,
    pub spinor_plus: Spinor,
    pub spinor_minus: Spinor,
    pub n_vec: [f64; 3],
    pub hamiltonian: Matrix2<Complex64>,
}

pub fn bloch_data(theta: CoinAngle, k: f64) -> Result<BlochData> {
    let n_vec = bloch_vector(theta, k)?;
    let energy = dispersion(theta, k);
    Ok(BlochData {
        k,
        energy,
        spinor_plus: eigenspinor(theta, k, Branch::Plus)?,
        spinor_minus: eigenspinor(theta, k, Branch::Minus)?,
        n_vec,
        hamiltonian: pauli_dot(n_vec) * re(energy),
    })
}

/// Axes of the chiral rotation.
///
/// `a` is `sgn(sinθ)(cosθ, 0, −sinθ)` and jumps across `θ = 0, π`;
/// `b = (cosθ, 0, −sinθ)` is its continuous counterpart, with `a·b = sgn(sinθ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralAxes {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl ChiralAxes {
    /// `a·b`, the topological number.
    pub fn topological_number(&self) -> i32 {
        let dot: f64 = self.a.iter().zip(&self.b).map(|(x, y)| x * y).sum();
        dot.round() as i32
    }
}

pub fn chiral_axes(theta: CoinAngle) -> Result<ChiralAxes> {
    let (s, c) = theta.radians().sin_cos();
    if s.abs() < GAP_TOLERANCE {
        return Err(Error::GapClosed(format!("chiral axis undefined at θ = {theta}")));
    }
    let b = [c, 0.0, -s];
    let sg = s.signum();
    Ok(ChiralAxes { a: [sg * b[0], 0.0, sg * b[2]], b })
}

/// `Π = e^{i(A·σ)π/2} = i A·σ`, anticommuting with `H(k)`.
pub fn chiral_operator(theta: CoinAngle) -> Result<Matrix2<Complex64>> {
    let axes = chiral_axes(theta)?;
    Ok(pauli_dot(axes.a) * I)
}

/// `h(k) = sin k − i sinθ cos k`.
pub fn offdiagonal_h(theta: CoinAngle, k: f64) -> Complex64 {
    Complex64::new(k.sin(), -theta.sin() * k.cos())
}

/// `Λ = e^{−iσ_y(π/2−θ)/2}`. `Λ H Λ⁻¹` has no diagonal part.
pub fn off_diagonalizer(theta: CoinAngle) -> Matrix2<Complex64> {
    let half = (FRAC_PI_2 - theta.radians()) / 2.0;
    Matrix2::identity() * re(half.cos()) - pauli_y() * (I * half.sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingResult {
    pub m: i32,
    /// Accumulated phase of `h(k)` over the zone, divided by 2π.
    pub integral_value: f64,
    pub grid_points: usize,
}

/// Winding of `h(k)` around the origin as `k` runs over `(−π, π]`.
///
/// Sums principal-value phase increments on a uniform grid. A step larger
/// than π/2 doubles the grid, up to 16 times the requested size.
pub fn winding_number(theta: CoinAngle, grid_points: usize) -> Result<WindingResult> {
    if theta.sin().abs() < GAP_TOLERANCE {
        return Err(Error::GapClosed(format!("sinθ = 0 at θ = {theta}, winding undefined")));
    }
    if grid_points < 64 {
        return Err(Error::InvalidParameter(format!(
            "winding grid needs at least 64 points, got {grid_points}"
        )));
    }
    let mut points = grid_points;
    loop {
        let (total, max_step) = accumulate_phase(theta, points);
        if max_step <= FRAC_PI_2 {
            let integral_value = total / (2.0 * PI);
            return Ok(WindingResult {
                m: integral_value.round() as i32,
                integral_value,
                grid_points: points,
            });
        }
        if points >= 16 * grid_points {
            return Err(Error::WindingUnresolved { step: max_step, grid_points: points });
        }
        points *= 2;
    }
}

fn accumulate_phase(theta: CoinAngle, points: usize) -> (f64, f64) {
    let dk = 2.0 * PI / points as f64;
    let mut prev = offdiagonal_h(theta, -PI);
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    for j in 1..=points {
        let next = offdiagonal_h(theta, -PI + dk * j as f64);
        let step = (next * prev.conj()).arg();
        max_step = max_step.max(step.abs());
        total += step;
        prev = next;
    }
    (total, max_step)
}

/// Max-norm of `conj(H(k)) + H(−k)`; zero by particle-hole symmetry `Γ = −K`.
pub fn particle_hole_check(theta: CoinAngle, k: f64) -> Result<f64> {
    let hk = effective_hamiltonian(theta, k)?;
    let hmk = effective_hamiltonian(theta, -k)?;
    Ok((hk.map(|z| z.conj()) + hmk).iter().map(|z| z.norm()).fold(0.0, f64::max))
}
