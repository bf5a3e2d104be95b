//! Integration checks on the vibrational and rotational analysis: harmonic
//! stiffness against frozen references, pinned-depth Morse fits, distance
//! derivatives of the integrals, and the level-ladder identities.

use h2mol::vibrational::{eph_couplings_with_step, REDUCED_MASS};
use h2mol::{
    eph_couplings, equilibrium, harmonic_fit, morse_fit, phonon_fit, rotational_constant,
    rotational_levels, vibrational_levels, GainLossCoupling, Stability,
};

fn coupling(x: f64) -> GainLossCoupling {
    GainLossCoupling::new(x).expect("valid coupling")
}

/// Harmonic stiffness at the three reference couplings with a live well,
/// within 2 percent, and the frequency identity omega = sqrt(k/m') exact.
#[test]
fn harmonic_stiffness_matches_reference_values() {
    for &(gamma, k_want) in &[
        (0.0, 0.691719),
        (0.520873, 0.919309),
        (0.659374, 0.980341),
    ] {
        let eq = equilibrium(coupling(gamma)).unwrap();
        let (k, w) = harmonic_fit(&eq).unwrap();
        assert!(
            ((k - k_want) / k_want).abs() < 0.02,
            "k {k} vs {k_want} at gamma={gamma}"
        );
        assert_eq!(w, (k / REDUCED_MASS).sqrt(), "frequency identity at gamma={gamma}");
    }
}

/// At the breakup coupling the well has almost no curvature left: the mode
/// is two orders of magnitude softer than without gain and loss. The exact
/// number is hypersensitive to the fold position, so only a band is frozen.
#[test]
fn harmonic_mode_saturates_soft_at_the_breakup_coupling() {
    let eq = equilibrium(coupling(1.024638)).unwrap();
    let (k, w) = harmonic_fit(&eq).unwrap();
    assert!(k > 0.0 && k < 0.04, "stiffness {k} not soft");
    assert!((k - 0.004519).abs() < 6e-4, "stiffness {k} left the frozen band");
    assert_eq!(w, (k / REDUCED_MASS).sqrt());
}

/// Pinned-depth Morse fits: the depth is exactly the dissociation energy
/// of the equilibrium, and depth plus shape match frozen references while
/// the well is stable. Shape values are frozen from an independent
/// implementation of the same least-squares protocol.
#[test]
fn morse_fit_matches_frozen_references_while_stable() {
    let rows: [(f64, f64, f64); 4] = [
        (0.0, 0.323007, 1.063166),
        (0.1, 0.314916, 1.086694),
        (0.2, 0.290867, 1.157196),
        (0.3, 0.251537, 1.277880),
    ];
    let mut prev_alpha = 0.0;
    for (gamma, ed_want, alpha_want) in rows {
        let eq = equilibrium(coupling(gamma)).unwrap();
        let (ed, alpha, omega) = morse_fit(&eq).unwrap();
        assert_eq!(ed, eq.e_diss.unwrap(), "depth not pinned at gamma={gamma}");
        assert!((ed - ed_want).abs() < 1e-4, "depth {ed} != {ed_want} at gamma={gamma}");
        assert!(
            (alpha - alpha_want).abs() < 2e-3,
            "shape {alpha} != {alpha_want} at gamma={gamma}"
        );
        // omega follows from the curvature the fitted well implies.
        let k_mo = 2.0 * ed * alpha * alpha;
        assert!((omega - (k_mo / REDUCED_MASS).sqrt()).abs() < 1e-15);
        assert!(alpha > prev_alpha, "shape not stiffening at gamma={gamma}");
        prev_alpha = alpha;
    }
}

/// A metastable well has negative dissociation energy, which leaves no
/// depth to pin: the Morse fit refuses while the harmonic one still works.
#[test]
fn morse_fit_refuses_metastable_wells() {
    let eq = equilibrium(coupling(0.9)).unwrap();
    assert_eq!(eq.stability, Stability::Metastable);
    assert!(morse_fit(&eq).is_err());
    let fit = phonon_fit(&eq).unwrap();
    assert!(fit.k_h > 0.0);
    assert!(fit.e_d_morse.is_none() && fit.alpha_mo.is_none() && fit.omega_mo.is_none());
}

/// Unbound couplings carry no geometry at all, so every fit refuses.
#[test]
fn fits_refuse_unbound_couplings() {
    let eq = equilibrium(coupling(1.2)).unwrap();
    assert!(harmonic_fit(&eq).is_err());
    assert!(morse_fit(&eq).is_err());
    assert!(phonon_fit(&eq).is_err());
    assert!(rotational_constant(&eq).is_err());
}

/// Distance derivatives of the six integrals at the frozen-exponent
/// equilibrium, against reference values at two couplings, 1e-5 absolute.
#[test]
fn integral_distance_derivatives_match_reference_values() {
    let rows: [(f64, [f64; 6]); 2] = [
        (
            0.0,
            [0.001744, 0.609033, -0.126289, -0.236261, -0.007502, -0.000385],
        ),
        (
            0.5,
            [-0.0603282, 0.746108, -0.143655, -0.264823, -0.00805519, 0.000105421],
        ),
    ];
    for (gamma, want) in rows {
        let c = eph_couplings(coupling(gamma)).unwrap();
        let got = [c.g_eps, c.g_t, c.g_u, c.g_k, c.g_j, c.g_v];
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-5, "derivative {g} != {w} at gamma={gamma}");
        }
    }
    // The on-site level barely moves with distance without gain and loss:
    // its attraction and repulsion shifts nearly cancel.
    let c = eph_couplings(coupling(0.0)).unwrap();
    assert!(c.g_eps.abs() < 0.01);
}

/// Halving the differentiation step moves no derivative by more than 1e-4.
#[test]
fn integral_derivatives_are_step_converged() {
    let g = coupling(0.5);
    let a = eph_couplings_with_step(g, 1e-3).unwrap();
    let b = eph_couplings_with_step(g, 5e-4).unwrap();
    let pairs = [
        (a.g_eps, b.g_eps),
        (a.g_t, b.g_t),
        (a.g_u, b.g_u),
        (a.g_k, b.g_k),
        (a.g_j, b.g_j),
        (a.g_v, b.g_v),
    ];
    for (x, y) in pairs {
        assert!((x - y).abs() < 1e-4, "step sensitivity {x} vs {y}");
    }
}

/// Rigid-rotor constant: frozen value without gain and loss, growth as the
/// bond contracts, and the exact ladder identity.
#[test]
fn rotational_constant_and_ladder() {
    let eq = equilibrium(coupling(0.0)).unwrap();
    let b0 = rotational_constant(&eq).unwrap();
    assert!((b0 - 5.4043e-4).abs() < 1e-7, "B0 {b0} left the frozen band");
    let r0 = eq.r0.unwrap();
    assert_eq!(b0, 1.0 / (REDUCED_MASS * r0 * r0));

    let mut prev = 0.0;
    for &gamma in &[0.0, 0.3, 0.6, 0.9] {
        let eq = equilibrium(coupling(gamma)).unwrap();
        let b = rotational_constant(&eq).unwrap();
        assert!(b > prev, "B0 not growing at gamma={gamma}");
        prev = b;
    }

    let levels = rotational_levels(b0, 4);
    assert_eq!(levels.len(), 5);
    for (l, e) in levels {
        assert_eq!(e, b0 * (l * (l + 1)) as f64);
    }
}

/// Level ladders follow the closed forms: equally spaced harmonic levels
/// and the quadratic correction for the Morse ladder.
#[test]
fn vibrational_ladders_follow_their_closed_forms() {
    let eq = equilibrium(coupling(0.2)).unwrap();
    let fit = phonon_fit(&eq).unwrap();
    let levels = vibrational_levels(&fit, 5);
    assert_eq!(levels.len(), 6);
    let (w, ed) = (fit.omega_mo.unwrap(), fit.e_d_morse.unwrap());
    for lv in &levels {
        let x = lv.n as f64 + 0.5;
        assert_eq!(lv.e_harmonic, fit.omega_h * x);
        let want = w * x + w * w / (4.0 * ed) * x * x;
        assert_eq!(lv.e_morse.unwrap(), want);
    }
    // Equal harmonic spacing.
    for pair in levels.windows(2) {
        let gap = pair[1].e_harmonic - pair[0].e_harmonic;
        assert!((gap - fit.omega_h).abs() < 1e-15);
    }
}
