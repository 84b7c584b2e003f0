//! Closed-form results against dense diagonalization, and frozen reference values.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use qwalk::bound::{
    antisymmetric_mode, single_boundary_mode, splitting_decay_rate, symmetric_condition_residual,
    MajoranaEnergy,
};
use qwalk::lattice::{build_profile, build_profile_at};
use qwalk::roots::{first_bracket, Bisection};
use qwalk::spectral::{
    diagonalize, find_bound_states, oracle_compare, phase_distance, solve_wire_energy, EnergyFamily,
    SpectralResult,
};
use qwalk::{CoinAngle, CoinProfile, ProfileKind};

fn angle(x: f64) -> CoinAngle {
    CoinAngle::new(x).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn assert_particle_hole(res: &SpectralResult, tol: f64) {
    let e = sorted(res.quasi_energies.clone());
    let neg = sorted(e.iter().map(|x| -x).collect());
    for (a, b) in e.iter().zip(&neg) {
        assert!(phase_distance(*a, *b) < tol, "{a} vs {b}");
    }
}

#[test]
fn uniform_ring_recovers_bulk_bands() {
    for (theta, l) in [(FRAC_PI_4, 64), (0.37, 50), (-2.2, 33)] {
        let theta = angle(theta);
        let res = diagonalize(&CoinProfile::uniform(l, theta).unwrap()).unwrap();
        let mut expected: Vec<f64> = (0..l)
            .map(|j| (theta.cos() * (2.0 * PI * j as f64 / l as f64).cos()).clamp(-1.0, 1.0).acos())
            .flat_map(|e| [e, -e])
            .collect();
        expected = sorted(expected);
        let got = sorted(res.quasi_energies.iter().map(|e| if *e == PI { -PI } else { *e }).collect());
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10, "L={l}: {a} vs {b}");
        }
        assert_particle_hole(&res, 1e-10);
    }
}

#[test]
fn spectra_are_particle_hole_symmetric() {
    let p = build_profile(ProfileKind::Symmetric, 48, angle(-1.1), angle(0.7), 6).unwrap();
    assert_particle_hole(&diagonalize(&p).unwrap(), 1e-10);
    let p = CoinProfile::from_angles((0..37).map(|j| angle(0.3 * j as f64 - 2.0)).collect()).unwrap();
    assert_particle_hole(&diagonalize(&p).unwrap(), 1e-10);
}

#[test]
fn symmetric_wire_has_four_localized_states() {
    let (t1, t2, n) = (angle(FRAC_PI_2), angle(-FRAC_PI_4), 10);
    let res = diagonalize(&build_profile(ProfileKind::Wire, 64, t1, t2, n).unwrap()).unwrap();
    let e = solve_wire_energy(t1, t2, n, EnergyFamily::NearZero).unwrap();
    let near_zero = find_bound_states(&res, MajoranaEnergy::Zero, None);
    let near_pi = find_bound_states(&res, MajoranaEnergy::Pi, None);
    let mut got = sorted([near_zero.quasi_energies, near_pi.quasi_energies].concat());
    got.iter_mut().for_each(|x| {
        if (*x - PI).abs() < 1e-12 {
            *x = -PI;
        }
    });
    let expected = sorted(vec![e, -e, PI - e, -(PI - e)]);
    assert_eq!(got.len(), 4);
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9, "{got:?} vs {expected:?}");
    }
    // no exact zero or π mode
    assert!(res
        .quasi_energies
        .iter()
        .all(|&q| phase_distance(q, 0.0) > 1e-9 && phase_distance(q, PI) > 1e-9));
}

#[test]
fn wire_root_matches_reflective_ring() {
    for t2 in [FRAC_PI_3, FRAC_PI_4, FRAC_PI_6] {
        for n in [1, 4, 8, 12] {
            let l = 4 * (n + 2);
            let wall = angle(-FRAC_PI_2);
            let p = build_profile(ProfileKind::Wire, l.max(16), wall, angle(t2), n).unwrap();
            let res = diagonalize(&p).unwrap();
            let e = solve_wire_energy(wall, angle(t2), n, EnergyFamily::NearZero).unwrap();
            let found = find_bound_states(&res, MajoranaEnergy::Zero, None);
            assert_eq!(found.len(), 2, "θ₂={t2} N={n}");
            for &q in &found.quasi_energies {
                assert!((q.abs() - e).abs() < 1e-7, "θ₂={t2} N={n}: {q} vs {e}");
            }
        }
    }
}

#[test]
fn analytic_modes_match_diagonalization() {
    let cases = [(0.25, -0.25), (-0.3, 0.2), (0.7, -0.35), (-0.8, 0.6)];
    for (a, b) in cases {
        let (t1, t2) = (CoinAngle::from_pi_units(a).unwrap(), CoinAngle::from_pi_units(b).unwrap());
        for target in [MajoranaEnergy::Zero, MajoranaEnergy::Pi] {
            let mode = single_boundary_mode(t1, t2, target, 96, None).unwrap();
            let fid = oracle_compare(&mode, &mode.profile).unwrap();
            assert!(fid > 1.0 - 1e-6, "({a}, {b}) {target}: {fid}");
        }
    }
    for (a, b, n) in [(0.45, -0.25, 10), (-0.3, 0.3, 6), (0.35, -0.2, 4)] {
        let (t1, t2) = (CoinAngle::from_pi_units(a).unwrap(), CoinAngle::from_pi_units(b).unwrap());
        for target in [MajoranaEnergy::Zero, MajoranaEnergy::Pi] {
            let mode = antisymmetric_mode(t1, t2, target, n, 96, None).unwrap();
            assert!(mode.eigen_residual() < 1e-10);
            let fid = oracle_compare(&mode, &mode.profile).unwrap();
            assert!(fid > 1.0 - 1e-6, "({a}, {b}, {n}) {target}: {fid}");
        }
    }
}

#[test]
fn antisymmetric_mode_reduces_to_single_wall() {
    // long wire: the far end's influence is below round-off near n = 0
    let (l, origin, n) = (160, 40, 70);
    for (a, b) in [(-0.3, 0.25), (0.4, -0.2), (-0.75, 0.7)] {
        let (t1, t2) = (CoinAngle::from_pi_units(a).unwrap(), CoinAngle::from_pi_units(b).unwrap());
        for target in [MajoranaEnergy::Zero, MajoranaEnergy::Pi] {
            let anti = antisymmetric_mode(t1, t2, target, n, l, Some(origin)).unwrap();
            // the single wall sits between n = 0 and 1, the wire's left wall one site earlier
            let single = single_boundary_mode(t1, t2, target, l, Some(origin - 1)).unwrap();
            let window: Vec<usize> = (origin - 15..origin + 16).collect();
            let pick = |s: &qwalk::WalkerState| -> Vec<num_complex::Complex64> {
                window.iter().flat_map(|&i| [s.amplitudes()[2 * i], s.amplitudes()[2 * i + 1]]).collect()
            };
            let (x, y) = (pick(&anti.wavefunction), pick(&single.wavefunction));
            let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let overlap: num_complex::Complex64 = x.iter().zip(&y).map(|(p, q)| p.conj() * q).sum();
            let phase = overlap / overlap.norm();
            let diff = x.iter().zip(&y).map(|(p, q)| (p / nx * phase - q / ny).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-8, "({a}, {b}) {target}: {diff}");
        }
    }
}

#[test]
fn symmetric_roots_close_in_on_zero() {
    // roots of the two-wall condition approach E = 0 by e^{−κ₂} per added site
    let (t1, t2) = (angle(-FRAC_PI_4), angle(FRAC_PI_3));
    let kappa = splitting_decay_rate(t2).unwrap();
    let roots: Vec<f64> = (30..=40)
        .map(|n| {
            let f = |e: f64| symmetric_condition_residual(t1, t2, e, n);
            let (lo, hi) = first_bracket(f, 1e-30, 0.5, 2000).unwrap();
            Bisection { abs_tol: 1e-40, rel_tol: 1e-12, max_iter: 400 }.solve(f, lo, hi).unwrap()
        })
        .collect();
    assert!(roots[10] < 1e-15);
    for w in roots.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio.ln() / kappa - 1.0).abs() < 1e-3, "ratio {ratio}");
    }
}

#[test]
fn frozen_wire_energies() {
    // 40-digit roots of the reflective-end condition
    let wall = angle(-FRAC_PI_2);
    let cases = [
        (FRAC_PI_3, 1, 6.70374982049e-2),
        (FRAC_PI_4, 5, 4.18440200413e-3),
        (FRAC_PI_6, 10, 1.58399474147e-3),
    ];
    for (t2, n, expected) in cases {
        let e = solve_wire_energy(wall, angle(t2), n, EnergyFamily::NearZero).unwrap();
        assert!((e / expected - 1.0).abs() < 1e-8, "θ₂={t2} N={n}: {e:.10e}");
    }
}

#[test]
fn profile_origin_is_respected() {
    let p = build_profile_at(ProfileKind::Antisymmetric, 40, angle(0.5), angle(-0.4), 3, 10).unwrap();
    assert_eq!(p.coordinate(10), 0);
    assert_eq!(p.angle(9).radians(), 0.5);
    assert_eq!(p.angle(10).radians(), -0.4);
    assert_eq!(p.angle(13).radians(), -0.4);
    assert_eq!(p.angle(14).radians(), -0.5);
}
