use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topogame::harness::estimate_pq_exact;
use topogame::lattice::{build_rsc_layout, p3_loop_config, RscLayout};
use topogame::prep::{
    build_deformed_ghz_circuit, build_deformed_rsc_circuit, build_deformed_rsc_circuit_ordered,
    correction_strings, deformed_reference_state, effective_signs, prepare_branches, syndrome_of,
    theta_from_beta, SignConfig,
};
use topogame::qsim::{parse_labels, run_circuit, GateKind, Pauli, PauliString, QuantumState, StateVector};

fn flips_mask(strings: &[Vec<usize>]) -> u64 {
    strings.iter().flatten().fold(0, |m, &q| m ^ (1 << q))
}

#[test]
fn ry_on_plus_is_an_imaginary_time_factor() {
    for &beta in &[0.0, 0.3, 0.6, 1.1, 2.5] {
        let theta = theta_from_beta(beta).unwrap();
        let mut s = StateVector::product(&parse_labels("+").unwrap()).unwrap();
        s.apply_gate(GateKind::Ry(theta), &[0]).unwrap();
        let pref = theta.cos().sqrt() / std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(s.amplitude(0).re, pref * (beta / 2.0).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(1).re, pref * (-beta / 2.0).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(0).im + s.amplitude(1).im, 0.0, epsilon = 1e-15);
    }
}

#[test]
fn undeformed_rsc_branches_are_identical_code_states() {
    let l = build_rsc_layout(3).unwrap();
    let r = build_deformed_rsc_circuit(&l, 0.0).unwrap();
    let branches = prepare_branches::<StateVector>(&r).unwrap();
    assert_eq!(branches.len(), 16);
    for b in &branches {
        assert_abs_diff_eq!(b.probability, 1.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.state.fidelity(&branches[0].state).unwrap(), 1.0, epsilon = 1e-10);
    }
    let w = r.circuit.num_qubits();
    for s in l.stabilizers() {
        let op = l.stabilizer_string(s).padded(w).unwrap();
        assert_abs_diff_eq!(branches[5].state.pauli_expectation(&op).unwrap(), 1.0, epsilon = 1e-10);
    }
    let xbar = l.logical_x().padded(w).unwrap();
    assert_abs_diff_eq!(branches[9].state.pauli_expectation(&xbar).unwrap(), 1.0, epsilon = 1e-10);
}

#[test]
fn z_checks_are_certain_and_x_checks_degrade() {
    let l = build_rsc_layout(3).unwrap();
    for &theta in &[0.0, 0.4, 1.0] {
        let r = build_deformed_rsc_circuit(&l, theta).unwrap();
        let w = r.circuit.num_qubits();
        let mut bulk_x = 0.0;
        for b in prepare_branches::<StateVector>(&r).unwrap() {
            for s in l.z_stabilizers() {
                let op = l.stabilizer_string(s).padded(w).unwrap();
                assert_abs_diff_eq!(b.state.pauli_expectation(&op).unwrap(), 1.0, epsilon = 1e-10);
            }
            let hub = &l.x_stabilizers()[l.bulk_x_by_centrality()[0]];
            bulk_x += b.probability * b.state.pauli_expectation(&l.stabilizer_string(hub).padded(w).unwrap()).unwrap();
        }
        if theta == 0.0 {
            assert_abs_diff_eq!(bulk_x, 1.0, epsilon = 1e-10);
        } else {
            assert!(bulk_x < 0.99, "θ = {theta}: ⟨B_p⟩ = {bulk_x}");
        }
    }
}

#[test]
fn branch_states_match_the_analytic_deformed_states() {
    let beta = 0.7;
    let theta = theta_from_beta(beta).unwrap();
    let l = build_rsc_layout(3).unwrap();
    for r in [build_deformed_rsc_circuit(&l, theta).unwrap(), build_deformed_ghz_circuit(5, theta).unwrap()] {
        for b in prepare_branches::<StateVector>(&r).unwrap() {
            let reference = deformed_reference_state(r.num_data, &r.checks, beta, &b.signs, true).unwrap();
            assert_abs_diff_eq!(b.state.fidelity(&reference).unwrap(), 1.0, epsilon = 1e-8);
        }
    }
}

#[test]
fn born_weights_follow_the_nishimori_line() {
    let l = build_rsc_layout(3).unwrap();
    let n = l.num_qubits();
    for &beta in &[0.3, 0.9] {
        let r = build_deformed_rsc_circuit(&l, theta_from_beta(beta).unwrap()).unwrap();
        // Sign patterns that differ by a correction redefinition share a
        // syndrome, so classes are labelled by syndrome.
        let p_plus = 1.0 / (1.0 + (-2.0 * beta).exp());
        let mut nishimori: BTreeMap<Vec<bool>, f64> = BTreeMap::new();
        for flips in 0u64..1 << n {
            let minus = flips.count_ones() as i32;
            let w = p_plus.powi(n as i32 - minus) * (1.0 - p_plus).powi(minus);
            *nishimori.entry(syndrome_of(&l, flips)).or_default() += w;
        }
        let branches = prepare_branches::<StateVector>(&r).unwrap();
        assert_eq!(branches.len(), nishimori.len());
        for b in &branches {
            let class = syndrome_of(&l, flips_mask(&b.corrections));
            assert_eq!(class, b.outcomes);
            assert_abs_diff_eq!(b.probability, nishimori[&class], epsilon = 1e-8);
        }
    }
}

#[test]
fn check_order_does_not_change_statistics() {
    let l = build_rsc_layout(3).unwrap();
    let theta = theta_from_beta(0.5).unwrap();
    let a = build_deformed_rsc_circuit(&l, theta).unwrap();
    let b = build_deformed_rsc_circuit_ordered(&l, theta, &[3, 1, 0, 2]).unwrap();
    let by_syndrome = |r: &topogame::prep::ResourceCircuit| -> BTreeMap<Vec<bool>, f64> {
        prepare_branches::<StateVector>(r)
            .unwrap()
            .into_iter()
            .map(|br| (syndrome_of(&l, flips_mask(&br.corrections)), br.probability))
            .collect()
    };
    let (pa, pb) = (by_syndrome(&a), by_syndrome(&b));
    assert_eq!(pa.len(), pb.len());
    for (k, v) in &pa {
        assert_abs_diff_eq!(*v, pb[k], epsilon = 1e-12);
    }
    let loops = p3_loop_config(&l).unwrap();
    assert_abs_diff_eq!(
        estimate_pq_exact(&a, &loops).unwrap(),
        estimate_pq_exact(&b, &loops).unwrap(),
        epsilon = 1e-12
    );
    assert!(build_deformed_rsc_circuit_ordered(&l, theta, &[0, 0, 1, 2]).is_err());
}

#[test]
fn correction_strings_clear_the_syndrome() {
    let l = build_rsc_layout(3).unwrap();
    assert!(correction_strings(&l, &[false; 4]).unwrap().is_empty());
    for mask in 1u32..16 {
        let syndrome: Vec<bool> = (0..4).map(|k| mask >> k & 1 == 1).collect();
        let strings = correction_strings(&l, &syndrome).unwrap();
        assert_eq!(strings.len(), mask.count_ones() as usize);
        assert_eq!(syndrome_of(&l, flips_mask(&strings)), syndrome);
    }
    assert!(correction_strings(&l, &[true]).is_err());
}

#[test]
fn signs_follow_the_applied_strings() {
    assert_eq!(effective_signs(3, &[]), SignConfig::uniform(3));
    assert_eq!(effective_signs(3, &[vec![1]]).signs, vec![1, -1, 1]);
    assert_eq!(effective_signs(3, &[vec![0, 1], vec![1, 2]]).signs, vec![-1, 1, -1]);
}

#[test]
fn ghz_preparation() {
    assert_eq!(prepare_branches::<StateVector>(&build_deformed_ghz_circuit(3, 0.9).unwrap()).unwrap().len(), 4);
    let r = build_deformed_ghz_circuit(4, 0.0).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for b in prepare_branches::<StateVector>(&r).unwrap() {
        assert_abs_diff_eq!(b.state.amplitude(0).re, h, epsilon = 1e-10);
        assert_abs_diff_eq!(b.state.amplitude(0b1111).re, h, epsilon = 1e-10);
    }
}

#[test]
fn sampled_preparation_is_normalized() {
    let r = build_deformed_rsc_circuit(&build_rsc_layout(3).unwrap(), 0.4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (state, record) = run_circuit::<StateVector, _>(&r.circuit, &mut rng).unwrap();
    assert_eq!(record.len(), 4);
    assert_eq!(state.num_qubits(), 10);
    assert_abs_diff_eq!(state.norm_sqr(), 1.0, epsilon = 1e-12);
    let anc = PauliString::from_sparse(10, [(9, Pauli::Z)]).unwrap();
    assert_abs_diff_eq!(state.pauli_expectation(&anc).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn rectangular_patches_prepare_too() {
    let l = RscLayout::rectangular(5, 3).unwrap();
    let r = build_deformed_rsc_circuit(&l, 0.0).unwrap();
    assert_eq!(r.circuit.num_qubits(), 16);
    assert_eq!(r.circuit.num_measurements(), l.z_stabilizers().len());
}
