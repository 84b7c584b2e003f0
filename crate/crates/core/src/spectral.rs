//! Exact diagonalization of the one-step unitary and finite-wire energies.
//!
//! The dense `2L × 2L` walk matrix is unitary, so its Hermitian parts
//! `(U + U†)/2` (eigenvalues `cos E`) and `(U − U†)/2i` (eigenvalues `−sin E`)
//! commute and share its eigenvectors. Diagonalizing those with a Hermitian
//! solver avoids the stagnation a shifted QR iteration can hit on unitary
//! matrices with symmetric spectra.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bound::{splitting_decay_rate, wire_condition_residual, BoundStateSolution, MajoranaEnergy};
use crate::error::{Error, Result};
use crate::lattice::{position_distribution, wrap_angle, CoinAngle, CoinProfile, WalkerState};
use crate::roots::{first_bracket, Bisection};

/// Largest ring handled by [`diagonalize`].
pub const MAX_DIAG_SITES: usize = 512;

/// Localized states must lie within this distance of 0 or π to be reported.
pub const BOUND_STATE_WINDOW: f64 = FRAC_PI_4;

/// Eigenpairs this close to a target energy count as one degenerate cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-6;

/// Neighbouring `cos E` eigenvalues closer than this are resolved together.
const COS_CLUSTER_GAP: f64 = 1e-6;

/// Weight of `cos E` in the within-cluster splitting operator.
const SPLIT_MIX: f64 = 0.618_033_988_749_895;

/// Lower end of the energy bracket for [`solve_wire_energy`].
pub const WIRE_BRACKET_FLOOR: f64 = 1e-12;

/// Dense `U = S·C` acting on interleaved amplitudes.
pub fn build_unitary(profile: &CoinProfile) -> DMatrix<Complex64> {
    let l = profile.n_sites();
    let mut u = DMatrix::zeros(2 * l, 2 * l);
    for n in 0..l {
        let (s, c) = profile.angle(n).radians().sin_cos();
        let left = 2 * ((n + l - 1) % l);
        let right = 2 * ((n + 1) % l) + 1;
        u[(left, 2 * n)] += Complex64::new(c, 0.0);
        u[(left, 2 * n + 1)] += Complex64::new(s, 0.0);
        u[(right, 2 * n)] += Complex64::new(-s, 0.0);
        u[(right, 2 * n + 1)] += Complex64::new(c, 0.0);
    }
    u
}

/// Eigen-decomposition of the walk, sorted by quasi-energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// `E = −arg λ ∈ (−π, π]`.
    pub quasi_energies: Vec<f64>,
    pub eigenvectors: Vec<WalkerState>,
    /// `Σₙ pₙ²` of each eigenvector.
    pub ipr: Vec<f64>,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.quasi_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quasi_energies.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.eigenvectors.first().map_or(0, |v| v.n_sites())
    }

    pub fn subset(&self, indices: &[usize]) -> SpectralResult {
        SpectralResult {
            quasi_energies: indices.iter().map(|&i| self.quasi_energies[i]).collect(),
            eigenvectors: indices.iter().map(|&i| self.eigenvectors[i].clone()).collect(),
            ipr: indices.iter().map(|&i| self.ipr[i]).collect(),
        }
    }

    /// Indices of eigenpairs within `tol` of `energy` (distance taken mod 2π).
    pub fn cluster(&self, energy: f64, tol: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| phase_distance(self.quasi_energies[i], energy) <= tol).collect()
    }
}

/// `|a − b|` on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

pub fn inverse_participation_ratio(state: &WalkerState) -> f64 {
    position_distribution(state).iter().map(|p| p * p).sum()
}

pub fn diagonalize(profile: &CoinProfile) -> Result<SpectralResult> {
    diagonalize_with_limit(profile, MAX_DIAG_SITES)
}

pub fn diagonalize_with_limit(profile: &CoinProfile, max_sites: usize) -> Result<SpectralResult> {
    let l = profile.n_sites();
    if l > max_sites {
        return Err(Error::InvalidParameter(format!(
            "ring of {l} sites exceeds the dense limit of {max_sites}"
        )));
    }
    let u = build_unitary(profile);
    let u_dag = u.adjoint();
    let re_part = (&u + &u_dag) * Complex64::new(0.5, 0.0);
    let im_part = (&u - &u_dag) * Complex64::new(0.0, -0.5);

    let eig = SymmetricEigen::try_new(re_part.clone(), 1e-15, 0)
        .ok_or_else(|| Error::Eigensolver("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..2 * l).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    // cos E cannot tell E from −E, so split each cos-cluster with a generic
    // mix of both parts restricted to the cluster
    let mixed = &im_part + &re_part * Complex64::new(SPLIT_MIX, 0.0);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(2 * l);
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < COS_CLUSTER_GAP
        {
            end += 1;
        }
        let basis = DMatrix::from_columns(
            &order[start..end].iter().map(|&j| eig.eigenvectors.column(j)).collect::<Vec<_>>(),
        );
        if end - start == 1 {
            vectors.push(basis.column(0).into_owned());
        } else {
            let reduced = basis.adjoint() * &mixed * &basis;
            let reduced = (&reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0);
            let sub = SymmetricEigen::try_new(reduced, 1e-15, 0)
                .ok_or_else(|| Error::Eigensolver("cluster eigensolver did not converge".into()))?;
            let rotated = &basis * sub.eigenvectors;
            vectors.extend(rotated.column_iter().map(|c| c.into_owned()));
        }
        start = end;
    }

    let mut pairs = Vec::with_capacity(2 * l);
    for v in vectors {
        let lambda = v.dotc(&(&u * &v));
        if (lambda.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Eigensolver(format!("Rayleigh quotient {lambda} off the unit circle")));
        }
        let energy = wrap_angle(-lambda.arg());
        pairs.push((energy, WalkerState::normalized(v.iter().copied().collect())?));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let ipr = pairs.iter().map(|(_, v)| inverse_participation_ratio(v)).collect();
    let (quasi_energies, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralResult { quasi_energies, eigenvectors, ipr })
}

/// Localized eigenpairs closest to `target`.
///
/// Keeps states with IPR above `ipr_threshold` (default `4/L`) that lie within
/// [`BOUND_STATE_WINDOW`] of the target, then returns the ones at the
/// smallest distance, so both members of a ±E split pair come back together.
pub fn find_bound_states(
    result: &SpectralResult,
    target: MajoranaEnergy,
    ipr_threshold: Option<f64>,
) -> SpectralResult {
    let threshold = ipr_threshold.unwrap_or(4.0 / result.n_sites().max(1) as f64);
    let candidates: Vec<(usize, f64)> = (0..result.len())
        .filter(|&i| result.ipr[i] > threshold)
        .map(|i| (i, phase_distance(result.quasi_energies[i], target.value())))
        .filter(|&(_, d)| d <= BOUND_STATE_WINDOW)
        .collect();
    let Some(nearest) = candidates.iter().map(|&(_, d)| d).reduce(f64::min) else {
        return result.subset(&[]);
    };
    let picked: Vec<usize> =
        candidates.into_iter().filter(|&(_, d)| d - nearest <= 1e-8).map(|(i, _)| i).collect();
    result.subset(&picked)
}

/// Branch of the four-state wire spectrum `{E, −E, π−E, −(π−E)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyFamily {
    NearZero,
    NearPi,
}

/// Positive bound-state energy of a symmetric wire, `0 < E < π`.
///
/// Brackets the first root of [`wire_condition_residual`] above
/// [`WIRE_BRACKET_FLOOR`] and bisects it. Angles are first brought to
/// `0 < θ₂ < π/2` with the spectrum-preserving maps `θ → −θ` and `θ → π − θ`
/// (applied to both angles); the near-π energy is `π − E`.
pub fn solve_wire_energy(
    theta1: CoinAngle,
    theta2: CoinAngle,
    wire_length: usize,
    family: EnergyFamily,
) -> Result<f64> {
    if !(theta1.sin() * theta2.sin() < 0.0) {
        return Err(Error::NoBoundState(format!(
            "wire modes need sinθ₁·sinθ₂ < 0 (θ₁ = {theta1}, θ₂ = {theta2})"
        )));
    }
    let (mut t1, mut t2) = (theta1, theta2);
    if t2.sin() < 0.0 {
        t1 = t1.negated();
        t2 = t2.negated();
    }
    if t2.cos() < 0.0 {
        t1 = CoinAngle::new(PI - t1.radians())?;
        t2 = CoinAngle::new(PI - t2.radians())?;
    }
    if t2.cos() < 1e-9 {
        return Err(Error::InvalidParameter(format!("θ₂ = {theta2} is a hard wall")));
    }
    // cos E ≥ cosθ₂ and cos²E ≥ cos²θ₁
    let e_max = t2.radians().min(t1.cos().abs().acos());
    let hi = e_max * (1.0 - 1e-9);
    let residual = |e: f64| wire_condition_residual(t1, t2, e, wire_length);
    let (lo, hi) = match first_bracket(residual, WIRE_BRACKET_FLOOR, hi, 400) {
        Ok(bracket) => bracket,
        // long wires push the root under the floor; E = 0 itself is never a root
        Err(Error::NoSignChange { .. })
            if residual(0.0)?.signum() != residual(WIRE_BRACKET_FLOOR)?.signum() =>
        {
            (0.0, WIRE_BRACKET_FLOOR)
        }
        Err(e) => return Err(e),
    };
    let root = Bisection::default().solve(residual, lo, hi)?;
    Ok(match family {
        EnergyFamily::NearZero => root,
        EnergyFamily::NearPi => PI - root,
    })
}

/// Reflective end coin paired with `θ₂` in a wire with bound states.
pub fn wire_end_for(theta2: CoinAngle) -> CoinAngle {
    let sign = if theta2.sin() > 0.0 { -1.0 } else { 1.0 };
    CoinAngle::new(sign * FRAC_PI_2).expect("finite")
}

/// Least-squares fit of `ln E(N)` against `N` for reflective wire ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub kappa2_predicted: f64,
}

/// Fits the wire splitting over `lengths`; ends are `θ₁ = ∓π/2`, opposite in
/// sign to θ₂ (so `−π/2` for positive θ₂).
pub fn fit_splitting_decay(theta2: CoinAngle, lengths: &[usize]) -> Result<SplittingFit> {
    if lengths.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "splitting fit needs at least 4 wire lengths, got {}",
            lengths.len()
        )));
    }
    let kappa2_predicted = splitting_decay_rate(theta2)?;
    let end = wire_end_for(theta2);
    let points = lengths
        .iter()
        .map(|&n| Ok((n as f64, solve_wire_energy(end, theta2, n, EnergyFamily::NearZero)?.ln())))
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept, r_squared) = linear_fit(&points);
    Ok(SplittingFit { slope, intercept, r_squared, kappa2_predicted })
}

/// Ordinary least squares `y = slope·x + intercept`, with R².
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    (slope, intercept, r2)
}

/// Overlap `|⟨ψ_analytic, ψ_numeric⟩|²` with the diagonalized profile.
pub fn oracle_compare(analytic: &BoundStateSolution, profile: &CoinProfile) -> Result<f64> {
    if analytic.wavefunction.n_sites() != profile.n_sites() {
        return Err(Error::LengthMismatch {
            state: analytic.wavefunction.n_sites(),
            profile: profile.n_sites(),
        });
    }
    oracle_compare_with(analytic, &diagonalize(profile)?)
}

/// As [`oracle_compare`], reusing a finished diagonalization.
///
/// All eigenvectors within [`CLUSTER_TOLERANCE`] of the analytic energy are
/// matched together, so a mode that is degenerate (e.g. with a partner at a
/// distant wall) is compared against the whole eigenspace.
pub fn oracle_compare_with(analytic: &BoundStateSolution, spectrum: &SpectralResult) -> Result<f64> {
    let psi = &analytic.wavefunction;
    if psi.n_sites() != spectrum.n_sites() {
        return Err(Error::LengthMismatch { state: psi.n_sites(), profile: spectrum.n_sites() });
    }
    let cluster = spectrum.cluster(analytic.energy, CLUSTER_TOLERANCE);
    if cluster.is_empty() {
        return Err(Error::NoMatchingEigenvector { energy: analytic.energy, tolerance: CLUSTER_TOLERANCE });
    }
    let fidelity: f64 = cluster.iter().map(|&i| spectrum.eigenvectors[i].inner(psi).norm_sqr()).sum();
    Ok(fidelity.clamp(0.0, 1.0))
}

/// `max |(U ψ)ᵢ − (step ψ)ᵢ|`, comparing the dense matrix with [`crate::lattice::step`].
pub fn matrix_step_mismatch(profile: &CoinProfile, state: &WalkerState) -> Result<f64> {
    let u = build_unitary(profile);
    let v = DVector::from_column_slice(state.amplitudes());
    let by_matrix = u * v;
    let by_step = crate::lattice::step(state, profile)?;
    Ok(by_matrix.iter().zip(by_step.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_profile, ProfileKind};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

    fn angle(x: f64) -> CoinAngle {
        CoinAngle::new(x).unwrap()
    }

    #[test]
    fn free_two_site_ring_is_permutation() {
        let u = build_unitary(&CoinProfile::uniform(2, angle(0.0)).unwrap());
        for row in u.row_iter() {
            let ones = row.iter().filter(|z| (**z - Complex64::new(1.0, 0.0)).norm() < 1e-15).count();
            let zeros = row.iter().filter(|z| z.norm() < 1e-15).count();
            assert_eq!((ones, zeros), (1, 3));
        }
    }

    #[test]
    fn uniform_spectrum_follows_dispersion() {
        let theta = angle(FRAC_PI_4);
        let l = 64;
        let res = diagonalize(&CoinProfile::uniform(l, theta).unwrap()).unwrap();
        assert_eq!(res.len(), 2 * l);
        for &e in &res.quasi_energies {
            let best = (0..l)
                .map(|j| 2.0 * PI * j as f64 / l as f64)
                .map(|k| (e.cos() - theta.cos() * k.cos()).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10);
        }
        assert!(find_bound_states(&res, MajoranaEnergy::Zero, None).is_empty());
        assert!(find_bound_states(&res, MajoranaEnergy::Pi, None).is_empty());
    }

    #[test]
    fn antisymmetric_ring_has_unsplit_modes() {
        // one wall at the wire's left end and one at the seam where −θ₁ meets θ₁
        let p =
            build_profile(ProfileKind::Antisymmetric, 64, angle(FRAC_PI_2), angle(-FRAC_PI_4), 10).unwrap();
        let res = diagonalize(&p).unwrap();
        for target in [MajoranaEnergy::Zero, MajoranaEnergy::Pi] {
            let found = find_bound_states(&res, target, None);
            assert_eq!(found.len(), 2, "{target}: {:?}", found.quasi_energies);
            for (&e, &ipr) in found.quasi_energies.iter().zip(&found.ipr) {
                assert!(phase_distance(e, target.value()) < 1e-8);
                assert!(ipr > 4.0 / 64.0);
            }
        }
    }

    #[test]
    fn symmetric_wire_has_split_pairs() {
        let p = build_profile(ProfileKind::Wire, 64, angle(FRAC_PI_2), angle(-FRAC_PI_4), 10).unwrap();
        let res = diagonalize(&p).unwrap();
        let e = solve_wire_energy(angle(FRAC_PI_2), angle(-FRAC_PI_4), 10, EnergyFamily::NearZero).unwrap();
        for target in [MajoranaEnergy::Zero, MajoranaEnergy::Pi] {
            let found = find_bound_states(&res, target, None);
            assert_eq!(found.len(), 2);
            for &q in &found.quasi_energies {
                assert!((phase_distance(q, target.value()) - e).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn table_corner_values() {
        let wall = angle(-FRAC_PI_2);
        let cases = [(FRAC_PI_3, 1, 2.13e-2), (FRAC_PI_6, 10, 5.04e-4), (FRAC_PI_4, 5, 1.33e-3)];
        for (t2, n, expect) in cases {
            let e = solve_wire_energy(wall, angle(t2), n, EnergyFamily::NearZero).unwrap() / PI;
            assert!((e / expect - 1.0).abs() < 5e-3, "θ₂ = {t2}, N = {n}: {e}");
            let e_pi = solve_wire_energy(wall, angle(t2), n, EnergyFamily::NearPi).unwrap() / PI;
            assert!((1.0 - e_pi - e).abs() < 1e-15);
        }
    }

    #[test]
    fn wire_solver_resolves_long_wires() {
        let wall = angle(-FRAC_PI_2);
        let t2 = angle(FRAC_PI_3);
        let kappa = splitting_decay_rate(t2).unwrap();
        let e30 = solve_wire_energy(wall, t2, 30, EnergyFamily::NearZero).unwrap();
        let e31 = solve_wire_energy(wall, t2, 31, EnergyFamily::NearZero).unwrap();
        assert!(e31 < WIRE_BRACKET_FLOOR);
        assert!(((e30 / e31).ln() / kappa - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wire_solver_errors() {
        let r = solve_wire_energy(angle(0.5), angle(0.7), 3, EnergyFamily::NearZero);
        assert!(matches!(r, Err(Error::NoBoundState(_))));
    }

    #[test]
    fn wire_solver_is_orientation_independent() {
        let base = solve_wire_energy(angle(-FRAC_PI_2), angle(0.6), 4, EnergyFamily::NearZero).unwrap();
        for (t1, t2) in [(FRAC_PI_2, -0.6), (-FRAC_PI_2, PI - 0.6), (FRAC_PI_2, -(PI - 0.6))] {
            let e = solve_wire_energy(angle(t1), angle(t2), 4, EnergyFamily::NearZero).unwrap();
            assert!((e - base).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_requires_four_lengths() {
        assert!(fit_splitting_decay(angle(FRAC_PI_4), &[5, 6, 7]).is_err());
        let fit = fit_splitting_decay(angle(FRAC_PI_4), &[5, 6, 7, 8, 9, 10]).unwrap();
        assert!(fit.r_squared > 0.999 && fit.r_squared <= 1.0);
    }

    #[test]
    fn diagonalize_size_cap() {
        let p = CoinProfile::uniform(20, angle(0.3)).unwrap();
        assert!(diagonalize_with_limit(&p, 10).is_err());
    }

    #[test]
    fn linear_fit_exact_line() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        let (m, b, r2) = linear_fit(&pts);
        assert!((m + 0.5).abs() < 1e-14 && (b - 2.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }
}
