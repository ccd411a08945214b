// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use cqed_core::hilbert::{HilbertSpace, StateVector};
use cqed_core::optical::OpticalCavityParams;
use cqed_core::protocol::{classify_entangled_state, complete_set_from, run_protocol, ProtocolConfig};
use cqed_core::units::from_mhz;
use num_complex::Complex64;
use proptest::prelude::*;

fn cavity() -> impl Strategy<Value = OpticalCavityParams> {
    (5.0..60.0f64, 5.0..60.0f64, 0.0..5.0f64, 0.0..5.0f64)
        .prop_map(|(r, l, g, k)| OpticalCavityParams::new(from_mhz(r), from_mhz(l), from_mhz(g), from_mhz(k)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outcome_probabilities_sum_to_one(n in 2usize..=3, cav in proptest::collection::vec(cavity(), 3)) {
        let base = ProtocolConfig::reference(n).unwrap();
        let cfg = ProtocolConfig { optical: cav[..n].to_vec(), ..base };
        let result = run_protocol(&cfg).unwrap();
        let sum: f64 = result.outcome_table.iter().map(|r| r.probability).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-10);
        let product: f64 = result.optical.iter().map(|o| o.success_prob).product();
        prop_assert!((result.total_success_prob - product).abs() <= 1e-15);
    }

    #[test]
    fn symmetric_couplings_give_orthonormal_sets(n in 2usize..=3, hs in proptest::collection::vec(5.0..60.0f64, 3)) {
        let base = ProtocolConfig::reference(n).unwrap();
        let optical = hs[..n]
            .iter()
            .map(|&h| OpticalCavityParams::symmetric(from_mhz(h), from_mhz(2.6), from_mhz(4.1)).unwrap())
            .collect();
        let report = complete_set_from(&run_protocol(&ProtocolConfig { optical, ..base }).unwrap()).unwrap();
        prop_assert!(report.gram_deviation <= 1e-9);
        prop_assert!(report.complete);
    }

    #[test]
    fn classification_ignores_global_phase(re in proptest::collection::vec(-1.0..1.0f64, 8), im in proptest::collection::vec(-1.0..1.0f64, 8), theta in 0.0..6.3f64) {
        prop_assume!(re.iter().chain(&im).any(|v| v.abs() > 1e-3));
        let amps: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let s = StateVector::from_vec(
            HilbertSpace::qubits("photon", 3).unwrap(),
            amps.iter().map(|z| z / norm).collect(),
        ).unwrap();
        let a = classify_entangled_state(&s).unwrap();
        let b = classify_entangled_state(&s.scaled(Complex64::from_polar(1.0, theta))).unwrap();
        prop_assert_eq!(a.family, b.family);
        prop_assert!((a.fidelity - b.fidelity).abs() <= 1e-12);
        prop_assert!((a.phase - b.phase).norm() <= 1e-9);
        prop_assert!(a.fidelity <= 1.0 && a.fidelity >= 0.0);
    }
}
