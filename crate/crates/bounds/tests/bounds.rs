use bounds::{
    a_function, a_tilde, alpha_beta, beta_removable, cj_curve_qfi, cloning_lower_discrimination,
    cloning_lower_metrology, f_n, lambert_w_m1, linear_replication_bound, qfi_state,
    quadratic_replication_bound, state_cloning_lower, unitary_diamond_lower, BoundError,
};
use channels::{
    ad_curve, amplitude_damping, kraus_to_choi, noisy_phase_b_curve, pauli_curve, phase_curve,
    phase_gate, unitary_channel,
};
use matrix_core::{c64, ComplexMatrix};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

#[test]
fn lambert_branch_point_and_exact_values() {
    assert_eq!(lambert_w_m1(-(-1.0f64).exp()).unwrap(), -1.0);
    let w = lambert_w_m1(-2.0 * (-2.0f64).exp()).unwrap();
    assert!((w + 2.0).abs() < 1e-12);
}

#[test]
fn lambert_residual_and_domain() {
    let y = -0.1;
    let w = lambert_w_m1(y).unwrap();
    assert!((w * w.exp() - y).abs() < 1e-13);
    assert!(w <= -1.0);
    assert!(lambert_w_m1(0.0).is_err());
    assert!(lambert_w_m1(-1.0).is_err());
    assert!(lambert_w_m1(0.5).is_err());
}

#[test]
fn a_function_boundary_values() {
    assert_eq!(a_function(1.0).unwrap(), 0.0);
    assert_eq!(a_function(2.5).unwrap(), 0.0);
    assert!((a_function(1e-12).unwrap() - FRAC_PI_4).abs() < 1e-4);
    assert_eq!(a_function(0.0).unwrap(), FRAC_PI_4);
    assert!(a_function(-0.1).is_err());
}

#[test]
fn a_function_matches_direct_maximization() {
    // Direct max over u in (0,1] of (arccos u - sqrt(2 z ln(1/u))) / 2.
    for i in 1..=9 {
        let z = i as f64 / 10.0;
        let obj = |u: f64| 0.5 * (u.acos() - (2.0 * z * (1.0 / u).ln()).sqrt());
        let mut best = f64::NEG_INFINITY;
        let mut best_u = 1.0;
        for k in 1..=200_000 {
            let u = k as f64 / 200_000.0;
            let v = obj(u);
            if v > best {
                best = v;
                best_u = u;
            }
        }
        // Parabolic refinement around the grid maximizer.
        let h = 1.0 / 200_000.0;
        for k in -50..=50 {
            let u = best_u + k as f64 * h / 50.0;
            if u > 0.0 && u <= 1.0 {
                best = best.max(obj(u));
            }
        }
        assert!(
            (a_function(z).unwrap() - best).abs() < 1e-8,
            "z = {z}: {} vs {best}",
            a_function(z).unwrap()
        );
    }
}

#[test]
fn a_function_is_monotone_decreasing() {
    let mut prev = f64::INFINITY;
    for i in 0..=100 {
        let z = i as f64 / 100.0 * 1.2;
        let v = a_function(z).unwrap();
        assert!(v <= prev + 1e-10, "not decreasing at z = {z}");
        prev = v;
    }
}

#[test]
fn a_tilde_boundary_and_grid_oracle() {
    assert_eq!(a_tilde(1.0).unwrap(), 0.0);
    assert!((a_tilde(1e-4).unwrap() - FRAC_PI_4).abs() < 0.02);
    assert!(a_tilde(0.0).is_err());
    assert!(a_tilde(1.5).is_err());

    let z: f64 = 0.5;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=1_000_000 {
        let x = k as f64 / 1e6;
        best = best.max(0.5 * (x.powf(1.0 / z).acos() - x.acos()));
    }
    assert!((a_tilde(z).unwrap() - best).abs() < 1e-6);
}

#[test]
fn a_tilde_decreasing_in_z() {
    let mut prev = f64::INFINITY;
    for i in 1..=20 {
        let v = a_tilde(i as f64 / 20.0).unwrap();
        assert!(v <= prev + 1e-10);
        prev = v;
    }
}

#[test]
fn beta_vanishes_for_ad_and_pauli_curves() {
    let ab = alpha_beta(&ad_curve(), 0.37, None).unwrap();
    assert!(ab.beta_norm < 1e-10, "AD beta norm {}", ab.beta_norm);

    let curve = pauli_curve([0.4, 0.3, 0.2, 0.1], [-0.3, 0.1, 0.1, 0.1]);
    let ab = alpha_beta(&curve, 0.2, None).unwrap();
    assert!(ab.beta_norm < 1e-10, "Pauli beta norm {}", ab.beta_norm);
}

#[test]
fn phase_curve_beta_is_minus_i_sigma_z() {
    let ab = alpha_beta(&phase_curve(), 0.3, None).unwrap();
    let expected = sigma_z().scaled(c64(0.0, -1.0));
    assert!(ab.beta.max_abs_diff(&expected) < 1e-10);
    assert!((ab.beta_norm - 1.0).abs() < 1e-10);
    assert!((ab.alpha_norm - 1.0).abs() < 1e-10);
}

#[test]
fn alpha_is_psd_and_gauge_shifts_beta_linearly() {
    let curve = noisy_phase_b_curve(0.3);
    let x = 0.4;
    let natural = alpha_beta(&curve, x, None).unwrap();
    let h = {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 0)] = c64(0.7, 0.0);
        h[(1, 1)] = c64(-0.2, 0.0);
        h[(0, 1)] = c64(0.3, 0.5);
        h[(1, 0)] = c64(0.3, -0.5);
        h
    };
    let gauged = alpha_beta(&curve, x, Some(&h)).unwrap();

    // beta_h = beta - i sum_{mn} h_{mn} K_m^dag K_n.
    let ch = curve.kraus_at(x).unwrap();
    let mut shift = ComplexMatrix::zeros(2, 2);
    for m in 0..2 {
        for n in 0..2 {
            shift = &shift + &(&ch.kraus()[m].dagger() * &ch.kraus()[n])
                .scaled(c64(0.0, -1.0) * h[(m, n)]);
        }
    }
    let expected = &natural.beta + &shift;
    assert!(gauged.beta.max_abs_diff(&expected) < 1e-10);

    for ab in [&natural, &gauged] {
        let (eigs, _) = matrix_core::herm_eig(&ab.alpha).unwrap();
        assert!(eigs.iter().all(|&l| l > -1e-10));
    }
}

#[test]
fn removability_verdicts() {
    let (ok, res) = beta_removable(&ad_curve(), 0.5).unwrap();
    assert!(ok);
    assert!(res < 1e-10);

    let (ok, res) = beta_removable(&phase_curve(), 0.1).unwrap();
    assert!(!ok);
    // span{K^dag K} = span{I}; the orthogonal remainder of sigma_z has
    // Frobenius norm sqrt(2).
    assert!((res - 2.0f64.sqrt()).abs() < 1e-8);

    let (ok, _) = beta_removable(&noisy_phase_b_curve(0.25), 0.7).unwrap();
    assert!(!ok);
}

#[test]
fn f_n_closed_forms() {
    // Amplitude damping: f_N = N |alpha| = N / (4 g (1-g)).
    for g in [0.25, 0.5] {
        for n in [1usize, 3, 10] {
            let f = f_n(&ad_curve(), g, n, None).unwrap();
            let expected = n as f64 / (4.0 * g * (1.0 - g));
            assert!((f - expected).abs() < 1e-9, "g = {g}, n = {n}: {f}");
        }
    }
    // Phase gates: |alpha| = |beta| = 1, f_N = N^2.
    for n in [1usize, 2, 7] {
        let f = f_n(&phase_curve(), 0.2, n, None).unwrap();
        assert!((f - (n * n) as f64).abs() < 1e-9);
    }
    // N = 1 collapses to |alpha| for any curve.
    let f1 = f_n(&noisy_phase_b_curve(0.3), 0.1, 1, None).unwrap();
    let ab = alpha_beta(&noisy_phase_b_curve(0.3), 0.1, None).unwrap();
    assert!((f1 - ab.alpha_norm).abs() < 1e-9);
}

#[test]
fn qfi_of_choi_curves_matches_closed_forms() {
    let g = 0.3;
    let qfi = cj_curve_qfi(&ad_curve(), g).unwrap();
    let expected = 1.0 / (2.0 * g * (1.0 - g));
    assert!(
        ((qfi - expected) / expected).abs() < 1e-3,
        "{qfi} vs {expected}"
    );

    let base = [0.4, 0.3, 0.2, 0.1];
    let dir = [-0.3, 0.1, 0.1, 0.1];
    let x = 0.15;
    let qfi = cj_curve_qfi(&pauli_curve(base, dir), x).unwrap();
    let expected: f64 = (0..4)
        .map(|k| dir[k] * dir[k] / (base[k] + x * dir[k]))
        .sum();
    assert!(((qfi - expected) / expected).abs() < 1e-3);
}

#[test]
fn qfi_of_pure_phase_states_is_four() {
    // e^{i theta sigma_z} |+> has QFI 4 Var(sigma_z) = 4.
    let rho = |theta: f64| {
        let amp0 = c64(0.0, theta).exp() * std::f64::consts::FRAC_1_SQRT_2;
        let amp1 = c64(0.0, -theta).exp() * std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_fn(2, 2, |i, j| {
            let a = if i == 0 { amp0 } else { amp1 };
            let b = if j == 0 { amp0 } else { amp1 };
            a * b.conj()
        })
    };
    let qfi = qfi_state(rho, 0.3, 1e-4).unwrap();
    assert!((qfi - 4.0).abs() < 1e-4, "{qfi}");
    assert!(matches!(
        qfi_state(rho, 0.3, 1e-9),
        Err(BoundError::StepTooSmall(_))
    ));
}

#[test]
fn state_cloning_lower_cases() {
    let plus = ComplexMatrix::from_fn(2, 2, |_, _| c64(0.5, 0.0));
    let maximally_mixed = ComplexMatrix::identity(2).scaled_re(0.5);
    // arccos near F = 1 amplifies rounding by 1/sqrt(eps).
    assert!(state_cloning_lower(&plus, &plus, 2, 5).unwrap() < 1e-7);
    assert_eq!(
        state_cloning_lower(&plus, &maximally_mixed, 4, 4).unwrap(),
        0.0
    );
    assert!(state_cloning_lower(&plus, &maximally_mixed, 5, 4).is_err());

    // Scalar evaluation against the formula at F = 0.99.
    let rho0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
    let eps = 1.0 - 0.99f64.powi(2);
    let rho1 = ComplexMatrix::from_real_diag(&[1.0 - eps, eps]);
    let f = metrics::state_fidelity(&rho0, &rho1).unwrap();
    let got = state_cloning_lower(&rho0, &rho1, 10, 100).unwrap();
    let expected = 0.5 * (f.powi(100).acos() - f.powi(10).acos());
    assert!((got - expected).abs() < 1e-12);
}

#[test]
fn discrimination_bound_for_unitary_pairs() {
    let e0 = phase_gate(0.0);
    let e1 = phase_gate(FRAC_PI_4); // eigenphase spread pi/2
    assert_eq!(cloning_lower_discrimination(&e0, &e0, 1, 2).unwrap(), 0.0);
    // m Theta = pi at m = 2, n = 1: (pi/2 - pi/4) / 2 = pi/8.
    let v = cloning_lower_discrimination(&e0, &e1, 1, 2).unwrap();
    assert!((v - PI / 8.0).abs() < 1e-10, "{v}");
}

#[test]
fn discrimination_bound_for_noisy_pairs_is_sane() {
    let e0 = amplitude_damping(0.2).unwrap();
    let e1 = amplitude_damping(0.6).unwrap();
    assert_eq!(cloning_lower_discrimination(&e0, &e1, 3, 3).unwrap(), 0.0);
    let v = cloning_lower_discrimination(&e0, &e1, 1, 40).unwrap();
    assert!(v >= 0.0 && v <= FRAC_PI_2);
}

#[test]
fn metrology_bound_matches_quadrature_oracle() {
    let curve = ad_curve();
    let (a, b) = (0.3, 0.31);
    let v = cloning_lower_metrology(&curve, (a, b), 4, 40).unwrap();
    assert!(v >= 0.0);

    // Fixed-step Simpson oracle for the discrimination integral.
    let steps = 2000;
    let h = (b - a) / steps as f64;
    let mut integral = 0.0;
    for i in 0..steps {
        let x0 = a + i as f64 * h;
        let fm = |x: f64| f_n(&curve, x, 4, None).unwrap().sqrt();
        integral += h / 6.0 * (fm(x0) + 4.0 * fm(x0 + h / 2.0) + fm(x0 + h));
    }
    let f = metrics::cj_fidelity(&curve.kraus_at(a).unwrap(), &curve.kraus_at(b).unwrap()).unwrap();
    let expected = (0.5 * (f.powi(40).acos() - integral)).max(0.0);
    assert!((v - expected).abs() < 1e-6, "{v} vs {expected}");
}

#[test]
fn replication_bounds_hit_closed_forms() {
    let pauli = pauli_curve([0.4, 0.3, 0.2, 0.1], [-0.3, 0.1, 0.1, 0.1]);
    for lambda in [0.0, 1.0, 4.0] {
        let v = linear_replication_bound(&pauli, 0.1, lambda).unwrap();
        let expected = a_function(1.0 / (1.0 + lambda)).unwrap();
        assert!((v - expected).abs() < 2e-4, "pauli lambda {lambda}: {v} vs {expected}");
    }
    for lambda in [0.5, 3.0] {
        let v = linear_replication_bound(&ad_curve(), 0.35, lambda).unwrap();
        let expected = a_function(2.0 / (1.0 + lambda)).unwrap();
        assert!((v - expected).abs() < 2e-4, "ad lambda {lambda}: {v} vs {expected}");
    }
    // lambda -> infinity pushes both branches to A(0) = pi/4.
    let v = linear_replication_bound(&ad_curve(), 0.5, 1e9).unwrap();
    assert!((v - FRAC_PI_4).abs() < 1e-3);
    let v = quadratic_replication_bound(&noisy_phase_b_curve(0.2), 0.3, 1e9).unwrap();
    assert!((v - FRAC_PI_4).abs() < 1e-3);
}

#[test]
fn replication_bounds_reject_wrong_branch() {
    assert!(matches!(
        linear_replication_bound(&phase_curve(), 0.2, 1.0),
        Err(BoundError::WrongBranch { expected: true, .. })
    ));
    assert!(matches!(
        quadratic_replication_bound(&ad_curve(), 0.4, 1.0),
        Err(BoundError::WrongBranch {
            expected: false,
            ..
        })
    ));
}

#[test]
fn unitary_diamond_lower_values() {
    assert_eq!(unitary_diamond_lower(3, 3).unwrap(), 0.0);
    assert!((unitary_diamond_lower(1, 2).unwrap() - PI / 8.0).abs() < 1e-15);
    assert!((unitary_diamond_lower(1, 1_000_000_000).unwrap() - FRAC_PI_4).abs() < 1e-8);
    assert!(unitary_diamond_lower(2, 1).is_err());
}

#[test]
fn four_f1_dominates_choi_qfi() {
    let curves: Vec<(&str, channels::ChannelCurve, f64, f64)> = vec![
        ("ad", ad_curve(), 0.02, 0.98),
        (
            "pauli",
            pauli_curve([0.4, 0.3, 0.2, 0.1], [-0.3, 0.1, 0.1, 0.1]),
            -0.5,
            0.5,
        ),
        ("phase", phase_curve(), -1.0, 1.0),
        ("noisy-b", noisy_phase_b_curve(0.3), -1.0, 1.0),
    ];
    for (name, curve, lo, hi) in curves {
        for i in 1..=20 {
            let x = lo + (hi - lo) * i as f64 / 21.0;
            let f1 = f_n(&curve, x, 1, None).unwrap();
            let qfi = cj_curve_qfi(&curve, x).unwrap();
            assert!(
                4.0 * f1 >= qfi * (1.0 - 1e-6),
                "{name} at x = {x}: 4 f_1 = {} < QFI = {qfi}",
                4.0 * f1
            );
        }
    }
}

#[test]
fn bound_report_clamps_and_pairs_fidelity() {
    let r = bounds::BoundReport::new(bounds::BoundKind::UnitaryDiamond, 1, 2, PI / 8.0);
    assert!((r.fidelity - (PI / 8.0).cos()).abs() < 1e-15);
    let r = bounds::BoundReport::new(bounds::BoundKind::State, 1, 2, 10.0);
    assert_eq!(r.value, FRAC_PI_2);
}

#[test]
fn unitary_channel_pairs_agree_with_diamond_family_bound() {
    // A maximally spread pair never exceeds the family-wide bound.
    let u = unitary_channel(&sigma_z()).unwrap();
    let id = phase_gate(0.0);
    for (n, m) in [(1usize, 2usize), (2, 6), (3, 4)] {
        let pair = cloning_lower_discrimination(&id, &u, n, m).unwrap();
        assert!(pair <= FRAC_PI_2);
        assert!(unitary_diamond_lower(n, m).unwrap() <= FRAC_PI_4);
    }
}
