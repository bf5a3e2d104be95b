//! Integration checks on the six-level spectrum: closed form against the
//! generic complex eigensolver over random parameter sets, trace and
//! degeneracy identities, phase classification, and conjugation structure.

use h2mol::spectrum::{a_minus_b, build_matrix, ground_energy, PT_IM_THRESHOLD};
use h2mol::{
    hubbard_params, pt_phase, spectrum_closed_form, spectrum_numeric, GainLossCoupling,
    HubbardParams, OrbitalGeometry,
};
use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn coupling(x: f64) -> GainLossCoupling {
    GainLossCoupling::new(x).expect("valid coupling")
}

fn random_params(rng: &mut StdRng) -> HubbardParams {
    let u: f64 = rng.gen_range(0.5..2.5);
    HubbardParams::new(
        rng.gen_range(-3.0..0.0),
        rng.gen_range(-2.0..-0.01),
        u,
        rng.gen_range(0.05..u * 0.95),
        rng.gen_range(0.001..0.2),
        rng.gen_range(-0.2..-0.001),
        rng.gen_range(0.0..0.8),
    )
    .expect("random parameters satisfy the ordering constraints")
}

/// Multiset comparison by nearest-neighbor pairing; plain sorting would
/// misalign conjugate pairs whose real parts agree only to roundoff.
fn assert_spectra_match(got: &[C], want: &[C], tol: f64) {
    let mut pool: Vec<C> = got.to_vec();
    for w in want {
        let (idx, best) = pool
            .iter()
            .enumerate()
            .map(|(i, g)| (i, (g - w).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("as many eigenvalues as wanted values");
        assert!(best < tol, "no eigenvalue near {w}: best distance {best:e}");
        pool.swap_remove(idx);
    }
}

/// Closed-form and numerically diagonalized spectra agree to 1e-9 over a
/// broad random sample of valid parameter sets and couplings.
#[test]
fn closed_form_matches_numeric_diagonalization_on_random_parameters() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let p = random_params(&mut rng);
        let g = coupling(rng.gen_range(0.0..1.5));
        let a = spectrum_closed_form(&p, g).unwrap();
        let b = spectrum_numeric(&p, g).unwrap();
        assert_spectra_match(&a.energies, &b.energies, 1e-9);
    }
}

/// The eigenvalue sum equals the matrix trace, which is real for balanced
/// gain and loss: the +2i gamma and -2i gamma diagonal entries cancel.
#[test]
fn eigenvalue_sum_equals_matrix_trace() {
    let geom = OrbitalGeometry::new(1.41968, 1.199206).unwrap();
    let p = hubbard_params(&geom).unwrap();
    for &gamma in &[0.0, 0.2, 0.520873, 0.8, 1.2] {
        let g = coupling(gamma);
        let m = build_matrix(&p, g);
        let trace: C = (0..6).map(|i| m[i][i]).sum();
        let sum: C = spectrum_closed_form(&p, g).unwrap().energies.iter().sum();
        assert!(
            (sum - trace).norm() < 1e-9,
            "sum {sum} != trace {trace} at gamma={gamma}"
        );
        assert!(trace.im.abs() < 1e-12, "trace not real at gamma={gamma}");
    }
}

/// Without gain and loss every level is real and the ground level is the
/// spectrum minimum.
#[test]
fn hermitian_spectrum_is_real() {
    let mut rng = StdRng::seed_from_u64(0xbeef);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let s = spectrum_closed_form(&p, coupling(0.0)).unwrap();
        for e in &s.energies {
            assert!(e.im.abs() < 1e-12, "complex level {e} at gamma=0");
        }
        assert!(!s.pt_broken);
        let min = s.energies.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
        assert!((s.energies[s.ground_index].re - min).abs() < 1e-12);
    }
}

/// Two exact identities survive any coupling: the doubly degenerate pair
/// E1 = E2 and the splitting E3 - E1 = 2 J.
#[test]
fn degenerate_pair_and_exchange_splitting_are_exact() {
    let mut rng = StdRng::seed_from_u64(0xfeed);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let g = coupling(rng.gen_range(0.0..1.5));
        let s = spectrum_closed_form(&p, g).unwrap();
        assert_eq!(s.energies[0], s.energies[1]);
        let split = s.energies[2] - s.energies[0];
        assert!(
            (split - C::new(2.0 * p.j, 0.0)).norm() < 1e-12,
            "E3 - E1 = {split} != 2j = {}",
            2.0 * p.j
        );
    }
}

/// In the broken phase the complex levels come as a conjugate pair around
/// a real partner, so the spectrum stays closed under conjugation.
#[test]
fn broken_phase_levels_form_a_conjugate_pair() {
    let geom = OrbitalGeometry::new(1.41968, 1.199206).unwrap();
    let p = hubbard_params(&geom).unwrap();
    let s = spectrum_closed_form(&p, coupling(1.2)).unwrap();
    assert!(s.pt_broken);
    assert!(s.energies[3].im.abs() < PT_IM_THRESHOLD, "E4 not real");
    assert!(s.energies[4].im < 0.0, "E5 should carry the decaying sign");
    let pair = s.energies[4] - s.energies[5].conj();
    assert!(pair.norm() < 1e-9, "E5 != conj(E6): {pair}");
}

/// Phase classification agrees with both the discriminant sign and the
/// presence of complex levels, across the transition.
#[test]
fn phase_classification_is_consistent_with_the_discriminant() {
    let geom = OrbitalGeometry::new(1.41968, 1.199206).unwrap();
    let p = hubbard_params(&geom).unwrap();
    let mut crossed = false;
    let mut prev = false;
    for i in 0..=30 {
        let gamma = 0.05 * i as f64;
        let g = coupling(gamma);
        let s = spectrum_closed_form(&p, g).unwrap();
        let broken = pt_phase(&p, g).unwrap();
        assert_eq!(s.pt_broken, broken, "flag mismatch at gamma={gamma}");
        let max_im = s.energies.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
        assert_eq!(broken, max_im > PT_IM_THRESHOLD, "at gamma={gamma}");
        // The discriminant-style indicator changes sign exactly where the
        // complex pair appears.
        if gamma > 0.0 {
            assert_eq!(broken, a_minus_b(&p, g) > 0.0, "at gamma={gamma}");
        }
        if broken && !prev {
            crossed = true;
        }
        assert!(!(prev && !broken), "phase unbroke at gamma={gamma}");
        prev = broken;
    }
    assert!(crossed, "no transition found on the sampled grid");
}

/// The scalar ground-energy helper agrees with the labeled spectrum.
#[test]
fn ground_energy_helper_matches_the_labeled_spectrum() {
    let geom = OrbitalGeometry::new(1.3, 1.27).unwrap();
    let p = hubbard_params(&geom).unwrap();
    for &gamma in &[0.0, 0.3, 0.7, 1.1] {
        let s = spectrum_closed_form(&p, coupling(gamma)).unwrap();
        let e = ground_energy(&p, gamma);
        assert!(
            (e - s.energies[s.ground_index].re).abs() < 1e-12,
            "ground energy {e} vs spectrum at gamma={gamma}"
        );
    }
}
