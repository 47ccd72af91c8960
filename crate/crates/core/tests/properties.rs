//! Property tests over randomly drawn states, gates, and tensors.

use num_complex::Complex64;
use proptest::prelude::*;

use qode_core::copy_solver::{build_interaction, encode_ensemble, step, CopyEnsembleState};
use qode_core::ode::OdeSpec;
use qode_core::qubit::{apply_gate, basis_state, bloch_coords, product_test, Gate, StateVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// General single-qubit unitary from three Euler-like angles.
fn u3(theta: f64, phi: f64, lam: f64) -> Gate {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let m = vec![
        c(ct, 0.0),
        -Complex64::from_polar(st, lam),
        Complex64::from_polar(st, phi),
        Complex64::from_polar(ct, phi + lam),
    ];
    Gate::new(1, m).expect("u3 is unitary")
}

fn random_two_qubit_state(seed: [f64; 8]) -> Option<StateVector> {
    let amps: Vec<Complex64> = seed.chunks(2).map(|p| c(p[0], p[1])).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-3 {
        return None;
    }
    StateVector::new(2, amps.into_iter().map(|a| a / norm).collect()).ok()
}

fn swap_qubits(state: &StateVector) -> StateVector {
    let a = state.amplitudes();
    StateVector::new(2, vec![a[0], a[2], a[1], a[3]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..std::f64::consts::TAU,
        lam in 0.0..std::f64::consts::TAU,
        target in 0usize..3,
    ) {
        let state = basis_state(3, 5).unwrap();
        let state = apply_gate(&state, &Gate::h(), &[target]).unwrap();
        let state = apply_gate(&state, &u3(theta, phi, lam), &[target]).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn involutions_return_input(seed in proptest::array::uniform8(-1.0f64..1.0)) {
        if let Some(state) = random_two_qubit_state(seed) {
            for (gate, targets) in [
                (Gate::x(), vec![0]),
                (Gate::h(), vec![1]),
                (Gate::cx(), vec![0, 1]),
            ] {
                let once = apply_gate(&state, &gate, &targets).unwrap();
                let twice = apply_gate(&once, &gate, &targets).unwrap();
                for (a, b) in state.amplitudes().iter().zip(twice.amplitudes()) {
                    prop_assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn product_test_invariant_under_swap_and_local_unitaries(
        seed in proptest::array::uniform8(-1.0f64..1.0),
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..std::f64::consts::TAU,
        lam in 0.0..std::f64::consts::TAU,
    ) {
        if let Some(state) = random_two_qubit_state(seed) {
            let reference = product_test(&state).unwrap();
            let swapped = product_test(&swap_qubits(&state)).unwrap();
            prop_assert!((reference - swapped).abs() < 1e-9);
            for target in [0usize, 1] {
                let rotated = apply_gate(&state, &u3(theta, phi, lam), &[target]).unwrap();
                let value = product_test(&rotated).unwrap();
                prop_assert!((reference - value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bloch_roundtrip_identity(re0 in -1.0f64..1.0, im0 in -1.0f64..1.0,
                                re1 in -1.0f64..1.0, im1 in -1.0f64..1.0) {
        let norm = (re0 * re0 + im0 * im0 + re1 * re1 + im1 * im1).sqrt();
        prop_assume!(norm > 1e-3);
        let state = StateVector::new(
            1,
            vec![c(re0 / norm, im0 / norm), c(re1 / norm, im1 / norm)],
        )
        .unwrap();
        let (theta, bloch_phi) = bloch_coords(&state).unwrap();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&theta));
        prop_assert!((0.0..std::f64::consts::TAU).contains(&bloch_phi));
        let a = c((theta / 2.0).cos(), 0.0);
        let b = Complex64::from_polar((theta / 2.0).sin(), bloch_phi);
        // equal up to global phase: the cross term vanishes
        let cross = state.amplitudes()[0] * b - state.amplitudes()[1] * a;
        prop_assert!(cross.norm() < 1e-10);
    }

    #[test]
    fn solver_step_is_linear(
        x in -0.8f64..0.8,
        y in -0.8f64..0.8,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let spec = OdeSpec::new(2.0, 0.05, 1, 0.1).unwrap();
        let op = build_interaction(&spec, 5).unwrap();
        let u = encode_ensemble(x, 5).unwrap();
        let v = encode_ensemble(y, 5).unwrap();
        let combo = CopyEnsembleState::from_tensor(
            5,
            u.tensor().iter().zip(v.tensor()).map(|(p, q)| a * p + b * q).collect(),
        )
        .unwrap();
        let lhs = step(&combo, &op, spec.dt).unwrap();
        let su = step(&u, &op, spec.dt).unwrap();
        let sv = step(&v, &op, spec.dt).unwrap();
        for ((l, p), q) in lhs.tensor().iter().zip(su.tensor()).zip(sv.tensor()) {
            prop_assert!((l - (a * p + b * q)).abs() < 1e-12);
        }
    }

    #[test]
    fn born_frequencies_within_four_sigma(seed in 0u64..5) {
        let state = apply_gate(&basis_state(2, 0).unwrap(), &Gate::h(), &[0]).unwrap();
        let state = apply_gate(&state, &u3(1.1, 0.3, 0.0), &[1]).unwrap();
        let shots = 10_000u64;
        let record = qode_core::qubit::measure(&state, shots, seed).unwrap();
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            let p = amp.norm_sqr();
            let bound = 4.0 * (p * (1.0 - p) / shots as f64).sqrt();
            let freq = record.count(idx) as f64 / shots as f64;
            prop_assert!((freq - p).abs() <= bound);
        }
    }
}
