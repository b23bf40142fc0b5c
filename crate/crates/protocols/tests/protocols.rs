use channels::{phase_gate, KrausChannel};
use matrix_core::{c64, ComplexMatrix};
use num_complex::Complex64;
use protocols::{
    ad_coherent_fidelity, ad_ep_fidelity, binom_sqrt_bound_check, compositions, dummy_fidelity,
    error_mitigation, noisy_phase_a_process, noisy_phase_b_mp_bound, optimize_estimator,
    pauli_ep_fidelity, pauli_invariance_check, pauli_mp_fidelity, phase_coherent_exponents, phase_coherent_process,
    phase_estimation_exact, phase_mp_bound, su2_mp_bound, trash_replace_equivalence_check,
    Estimator, OptimizeMode, ParameterNet, PauliEstimator, ProtocolError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::f64::consts::PI;

fn uniform_net(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

#[test]
fn dummy_ad_optimum_is_half_damping() {
    let net = ParameterNet::AmplitudeDamping(uniform_net(101));
    let r = dummy_fidelity(&net, 1, 2).unwrap();
    let expected = (2.0 + 2.0f64.sqrt()) / 4.0;
    assert!((r.base_fidelity - expected).abs() < 1e-10, "{}", r.base_fidelity);
    assert!((r.parameter[0] - 0.5).abs() < 1e-5);
    assert!((r.fidelity - expected).abs() < 1e-10);

    let r = dummy_fidelity(&net, 3, 3).unwrap();
    assert_eq!(r.fidelity, 1.0);
}

#[test]
fn dummy_pauli_optimum_is_uniform() {
    let mut net = vec![
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.25, 0.25, 0.25, 0.25],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..8 {
        let mut p = [rng.gen::<f64>(), rng.gen(), rng.gen(), rng.gen()];
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        net.push(p);
    }
    let r = dummy_fidelity(&ParameterNet::Pauli(net), 2, 5).unwrap();
    assert!((r.base_fidelity - 0.5).abs() < 1e-12, "{}", r.base_fidelity);
    assert!((r.fidelity - 0.5f64.powi(3)).abs() < 1e-11);
    for q in &r.parameter {
        assert!((q - 0.25).abs() < 1e-6);
    }
}

#[test]
fn dummy_rejects_empty_net() {
    assert!(matches!(
        dummy_fidelity(&ParameterNet::AmplitudeDamping(vec![]), 1, 2),
        Err(ProtocolError::EmptyNet)
    ));
}

#[test]
fn error_mitigation_splits_noisy_gates() {
    let theta = 0.9;
    let u = phase_gate(theta).kraus()[0].clone();
    let (k0, k1) = error_mitigation(&u).unwrap();
    assert!(k0.max_abs_diff(&u) < 1e-15);
    assert!(k1.max_abs() < 1e-15);

    // Flip after the gate: the flipped branch corrects back to the gate.
    let p = 0.3f64;
    let a = channels::noisy_phase_a(theta, p).unwrap();
    let (_, k1) = error_mitigation(&a.kraus()[1]).unwrap();
    assert!(k1.max_abs_diff(&u.scaled_re(p.sqrt())) < 1e-12);

    // Flip before the gate: correction reverses the phase.
    let b = channels::noisy_phase_b(theta, p).unwrap();
    let u_rev = phase_gate(-theta).kraus()[0].clone();
    let (_, l1) = error_mitigation(&b.kraus()[1]).unwrap();
    assert!(l1.max_abs_diff(&u_rev.scaled_re(p.sqrt())) < 1e-12);

    // Branch weights reproduce the diagonal of K^dag K.
    for k in a.kraus().iter().chain(b.kraus()) {
        let (k0, k1) = error_mitigation(k).unwrap();
        let sum = &(&k0.dagger() * &k0) + &(&k1.dagger() * &k1);
        let full = &k.dagger() * k;
        for i in 0..2 {
            assert!((sum[(i, i)] - full[(i, i)]).norm() < 1e-14);
        }
    }

    assert!(error_mitigation(&ComplexMatrix::identity(3)).is_err());
}

#[test]
fn noisy_phase_a_reduces_to_clean_replication() {
    for p in [0.0, 0.2, 0.5, 0.9] {
        let r = noisy_phase_a_process(3, 3, p).unwrap();
        assert!((r.worst_case_fidelity - 1.0).abs() < 1e-10);
    }
    let clean = phase_coherent_process(2, 4).unwrap();
    let noisy = noisy_phase_a_process(2, 4, 0.4).unwrap();
    assert_eq!(clean.worst_case_fidelity, noisy.worst_case_fidelity);
}

#[test]
fn noisy_phase_b_bound_values() {
    assert_eq!(
        noisy_phase_b_mp_bound(10, 100, 0.0).unwrap(),
        phase_mp_bound(10, 100)
    );
    let v = noisy_phase_b_mp_bound(100, 5000, 0.25).unwrap();
    let expected = (1.0 - 2.0 * PI * PI / 1e4).powi(5000);
    assert!((v - expected).abs() < 1e-12);
    assert!(matches!(
        noisy_phase_b_mp_bound(10, 100, 0.5),
        Err(ProtocolError::Degenerate(_))
    ));
}

#[test]
fn mp_bound_scalars_and_ordering() {
    let expected = (1.0 - PI * PI / 200.0).powi(100);
    assert!((phase_mp_bound(10, 100) - expected).abs() < 1e-14);
    for n in (2..=50).step_by(4) {
        for m in [n, 2 * n, n * n, 2500].iter().filter(|&&m| m >= n) {
            assert!(
                phase_mp_bound(n, *m) >= su2_mp_bound(n, *m) - 1e-15,
                "n = {n}, m = {m}"
            );
        }
    }
    // Sub-quadratic replication keeps the ceiling near one.
    let n = 4000usize;
    let m = (n as f64).powf(1.5) as usize;
    assert!(phase_mp_bound(n, m) > 0.92);
}

#[test]
fn phase_estimation_closed_form() {
    assert!((phase_estimation_exact(1) - 0.75).abs() < 1e-15);
    let n = 100;
    let deficit = 1.0 - phase_estimation_exact(n);
    let asym = PI * PI / (4.0 * (n * n) as f64);
    assert!((deficit - asym).abs() / asym < 0.1);
}

/// Sine-state amplitudes for `n` uses.
fn sine_state(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| (2.0 / (n + 2) as f64).sqrt() * ((k + 1) as f64 * PI / (n + 2) as f64).sin())
        .collect()
}

/// Covariant-POVM outcome density at true phase zero.
fn phase_posterior(c: &[f64], theta_hat: f64) -> f64 {
    let amp: Complex64 = c
        .iter()
        .enumerate()
        .map(|(k, &ck)| Complex64::from_polar(ck, -(k as f64) * theta_hat))
        .sum();
    amp.norm_sqr() / (2.0 * PI)
}

#[test]
fn phase_estimation_matches_integral_oracle() {
    const STEPS: usize = 100_000;
    for n in 1..=8 {
        let c = sine_state(n);
        let mut integral = 0.0;
        for i in 0..STEPS {
            let th = i as f64 / STEPS as f64 * 2.0 * PI;
            integral += phase_posterior(&c, th) * (th / 2.0).cos().powi(2);
        }
        integral *= 2.0 * PI / STEPS as f64;
        let closed = phase_estimation_exact(n);
        assert!(
            (integral - closed).abs() < 1e-8,
            "n = {n}: {integral} vs {closed}"
        );
    }
}

#[test]
fn jensen_chain_for_phase_estimation() {
    const STEPS: usize = 20_000;
    let m = 4;
    for n in 1..=8 {
        let c = sine_state(n);
        let (mut e_fm, mut e_f2, mut e_f) = (0.0, 0.0, 0.0);
        for i in 0..STEPS {
            let th = i as f64 / STEPS as f64 * 2.0 * PI;
            let w = phase_posterior(&c, th) * 2.0 * PI / STEPS as f64;
            let f = (th / 2.0).cos().powi(2);
            e_fm += w * f.powi(m);
            e_f2 += w * f * f;
            e_f += w * f;
        }
        assert!(e_fm >= e_f2.powf(m as f64 / 2.0) - 1e-12);
        assert!(e_f2.powf(m as f64 / 2.0) >= e_f.powi(m) - 1e-12);
    }
}

#[test]
fn coherent_phase_replication_window() {
    for (n, m) in [(1usize, 1usize), (3, 3), (2, 4), (1, 3), (3, 9)] {
        let r = phase_coherent_process(n, m).unwrap();
        assert_eq!(r.per_parameter_fidelities.len(), 64);
        if n == m {
            assert!((r.worst_case_fidelity - 1.0).abs() < 1e-10);
        }
        assert!(r
            .per_parameter_fidelities
            .iter()
            .all(|&(_, f)| (0.0..=1.0).contains(&f)));
    }
    assert!(matches!(
        phase_coherent_process(10, 12),
        Err(ProtocolError::DimensionCap(22))
    ));
}

#[test]
fn coherent_phase_two_to_four() {
    // Weights 1..3 sit in the good window; weights 0 and 4 pick up
    // wrong phases whose worst interference (at theta = pi/2) leaves
    // |14 + e^{-2 i theta} + e^{6 i theta}| / 16 = 12/16.
    let exps = phase_coherent_exponents(2, 4);
    let target: Vec<i64> = (0..=4).map(|w| 4 - 2 * w).collect();
    for w in 1..=3usize {
        assert_eq!(exps[w], target[w], "weight {w} should be exact");
    }
    assert_ne!(exps[0], target[0]);
    assert_ne!(exps[4], target[4]);

    let r = phase_coherent_process(2, 4).unwrap();
    assert!((r.worst_case_fidelity - 0.75).abs() < 1e-12, "{}", r.worst_case_fidelity);
    // At theta = 0 the process is exact.
    assert!((r.per_parameter_fidelities[0].1 - 1.0).abs() < 1e-12);
}

#[test]
fn pauli_mp_trivial_and_permutation_invariance() {
    let n = 3;
    let est = PauliEstimator::natural(n);
    let net = [[0.5, 0.2, 0.2, 0.1]];
    let r = pauli_mp_fidelity(&net, n, n, &est).unwrap();
    assert!((r.worst_case_fidelity - 1.0).abs() < 1e-12);

    // Relabeling the Pauli axes is a symmetry; the frequency estimator
    // is equivariant, so permuting only the net leaves the fidelity
    // unchanged.
    let perm = [2usize, 0, 3, 1];
    let permuted_net = [[net[0][perm[0]], net[0][perm[1]], net[0][perm[2]], net[0][perm[3]]]];
    let a = pauli_mp_fidelity(&net, n, n + 2, &est).unwrap();
    let b = pauli_mp_fidelity(&permuted_net, n, n + 2, &est).unwrap();
    assert!((a.worst_case_fidelity - b.worst_case_fidelity).abs() < 1e-12);
}

#[test]
fn pauli_frequency_estimator_bound() {
    let n = 10;
    let est = PauliEstimator::natural(n);
    let net = [
        [0.7, 0.1, 0.1, 0.1],
        [0.4, 0.3, 0.2, 0.1],
        [0.25, 0.25, 0.25, 0.25],
    ];
    let r = pauli_mp_fidelity(&net, n, n + 1, &est).unwrap();
    let floor = (1.0 - 3.0 / (2.0 * n as f64)).powi(1);
    assert!(r.worst_case_fidelity >= floor, "{}", r.worst_case_fidelity);
}

#[test]
fn bit_flip_one_to_two_matches_reported_value() {
    let q = 0.0778;
    let est = Estimator::new(vec![q, 1.0 - q]);
    let p_net: Vec<[f64; 4]> = uniform_net(101)
        .into_iter()
        .map(|p| [1.0 - p, p, 0.0, 0.0])
        .collect();
    let r = pauli_ep_fidelity(&p_net, 1, 2, &PauliEstimator::bit_flip(1, &est).unwrap()).unwrap();
    assert!(
        (r.worst_case_fidelity - 0.922).abs() < 1e-3,
        "{}",
        r.worst_case_fidelity
    );
}

#[test]
fn binom_sqrt_inequality() {
    let (e, b) = binom_sqrt_bound_check(1, 1.0).unwrap();
    assert!((e - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
    let (e, b) = binom_sqrt_bound_check(20, 0.5).unwrap();
    assert!(b <= e && (b - 10.0f64.sqrt() * 0.975).abs() < 1e-12);
    for n in (2..=50).step_by(3) {
        for i in 1..=9 {
            let p = i as f64 / 10.0;
            let (e, b) = binom_sqrt_bound_check(n, p).unwrap();
            assert!(e >= b - 1e-12, "n = {n}, p = {p}: {e} < {b}");
        }
    }
    assert!(binom_sqrt_bound_check(0, 0.5).is_err());
    assert!(binom_sqrt_bound_check(61, 0.5).is_err());
}

#[test]
fn ad_coherent_exact_at_equal_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [1usize, 4] {
        let est = Estimator::new((0..=n).map(|_| rng.gen::<f64>()).collect());
        let net = uniform_net(11);
        let r = ad_coherent_fidelity(&net, n, n, &est).unwrap();
        assert!((r.worst_case_fidelity - 1.0).abs() < 1e-12);
        for &(_, f) in &r.per_parameter_fidelities {
            assert!((f - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn ad_one_to_two_optimized_values() {
    let net = uniform_net(101);
    let ep = optimize_estimator(
        OptimizeMode::Ep,
        &net,
        1,
        2,
        &Estimator::natural_frequency(1),
        11,
    )
    .unwrap();
    let f_ep = ad_ep_fidelity(&net, 1, 2, &ep).unwrap().worst_case_fidelity;
    assert!((f_ep - 0.925).abs() < 2e-3, "{f_ep}");

    let coh = optimize_estimator(
        OptimizeMode::Coherent,
        &net,
        1,
        2,
        &Estimator::natural_half_rate(1),
        11,
    )
    .unwrap();
    let f_coh = ad_coherent_fidelity(&net, 1, 2, &coh)
        .unwrap()
        .worst_case_fidelity;
    assert!((f_coh - 0.900).abs() < 2e-3, "{f_coh}");

    // Reported ordering: dummy < coherent < estimate-and-prepare at 1 -> 2.
    let dummy = dummy_fidelity(&ParameterNet::AmplitudeDamping(net), 1, 2)
        .unwrap()
        .fidelity;
    assert!(dummy < f_coh && f_coh < f_ep);
}

#[test]
fn optimizer_respects_trivial_and_natural_baselines() {
    let net = uniform_net(21);
    let init = Estimator::new(vec![0.3, 0.6, 0.9]);
    let same = optimize_estimator(OptimizeMode::Ep, &net, 2, 2, &init, 5).unwrap();
    assert_eq!(same, init);

    let n = 5;
    let natural = Estimator::natural_half_rate(n);
    let baseline = ad_coherent_fidelity(&net, n, 6, &natural)
        .unwrap()
        .worst_case_fidelity;
    let tuned = optimize_estimator(OptimizeMode::Coherent, &net, n, 6, &natural, 17).unwrap();
    let improved = ad_coherent_fidelity(&net, n, 6, &tuned)
        .unwrap()
        .worst_case_fidelity;
    assert!(improved >= baseline - 1e-12);
}

#[test]
fn optimizer_recovers_bit_flip_estimate() {
    let net = uniform_net(101);
    let init = Estimator::new(vec![0.2, 0.8]);
    let tuned = optimize_estimator(OptimizeMode::Pauli, &net, 1, 2, &init, 23).unwrap();
    assert!((tuned.values[0] - 0.0778).abs() < 0.01, "{:?}", tuned.values);
    let p_net: Vec<[f64; 4]> = net.iter().map(|&p| [1.0 - p, p, 0.0, 0.0]).collect();
    let f = pauli_ep_fidelity(&p_net, 1, 2, &PauliEstimator::bit_flip(1, &tuned).unwrap())
        .unwrap()
        .worst_case_fidelity;
    assert!((f - 0.922).abs() < 1e-3, "{f}");
}

fn random_channel(rng: &mut ChaCha8Rng, d_in: usize, d_out: usize) -> KrausChannel {
    // Gram-Schmidt a random complex matrix into an isometry, sliced
    // into Kraus operators.
    let r = 2;
    let rows = d_out * r;
    let mut cols: Vec<Vec<Complex64>> = (0..d_in)
        .map(|_| {
            (0..rows)
                .map(|_| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect()
        })
        .collect();
    for i in 0..d_in {
        for j in 0..i {
            let overlap: Complex64 = cols[j]
                .iter()
                .zip(&cols[i])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for k in 0..rows {
                let adj = cols[j][k] * overlap;
                cols[i][k] -= adj;
            }
        }
        let norm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[i].iter_mut() {
            *z /= norm;
        }
    }
    let kraus = (0..r)
        .map(|blk| {
            ComplexMatrix::from_fn(d_out, d_in, |a, i| cols[i][blk * d_out + a])
        })
        .collect();
    KrausChannel::new(kraus).unwrap()
}

fn plus_state() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |_, _| c64(0.5, 0.0))
}

#[test]
fn trash_replace_equivalence_examples() {
    // Discard-and-prepare a pure target state.
    let target = {
        let pp = plus_state();
        matrix_core::kron(&pp, &pp)
    };
    let prepare = channels::trash_and_replace(&target, 2).unwrap();
    let (lhs, rhs) = trash_replace_equivalence_check(&prepare, &plus_state()).unwrap();
    assert!((lhs - 1.0).abs() < 1e-9 && (rhs - 1.0).abs() < 1e-9);

    // Random 1 -> 2 qubit cloner.
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..3 {
        let cloner = random_channel(&mut rng, 2, 4);
        let (lhs, rhs) = trash_replace_equivalence_check(&cloner, &plus_state()).unwrap();
        assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    // Identity padded with a maximally mixed extra copy.
    let pad = KrausChannel::new(
        (0..2)
            .map(|j| {
                ComplexMatrix::from_fn(4, 2, |a, i| {
                    if a == i * 2 + j {
                        c64(std::f64::consts::FRAC_1_SQRT_2, 0.0)
                    } else {
                        c64(0.0, 0.0)
                    }
                })
            })
            .collect(),
    )
    .unwrap();
    let (lhs, rhs) = trash_replace_equivalence_check(&pad, &plus_state()).unwrap();
    let expected = metrics::state_fidelity(&plus_state(), &ComplexMatrix::identity(2).scaled_re(0.5))
        .unwrap();
    assert!((lhs - rhs).abs() < 1e-9);
    assert!((rhs - expected).abs() < 1e-9);
}

#[test]
fn pauli_process_reproduces_pauli_channels() {
    assert!(pauli_invariance_check(&[1.0, 0.0, 0.0, 0.0]).unwrap() < 1e-14);
    assert!(pauli_invariance_check(&[0.25, 0.25, 0.25, 0.25]).unwrap() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..5 {
        let mut p = [rng.gen::<f64>(), rng.gen(), rng.gen(), rng.gen()];
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        assert!(pauli_invariance_check(&p).unwrap() < 1e-10);
    }
}

#[test]
fn estimator_serializes_to_json_array() {
    let est = Estimator::new(vec![0.0, 0.5, 1.0]);
    let json = serde_json::to_string(&est).unwrap();
    assert_eq!(json, "[0.0,0.5,1.0]");
    let back: Estimator = serde_json::from_str(&json).unwrap();
    assert_eq!(back, est);
}

#[test]
fn protocol_results_are_consistent() {
    let net = uniform_net(31);
    let r = ad_ep_fidelity(&net, 2, 3, &Estimator::natural_frequency(2)).unwrap();
    let min = r
        .per_parameter_fidelities
        .iter()
        .map(|&(_, f)| f)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(r.worst_case_fidelity, min);
    assert!(r
        .per_parameter_fidelities
        .iter()
        .all(|&(_, f)| (0.0..=1.0).contains(&f)));
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("worst_case_fidelity"));
}
