use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stoq::compiler::accept_probability;
use stoq::gates::{hamiltonian_term_alphabet, instance_matrix, rotation_matrix, universal_alphabet, xx_matrix};
use stoq::hamiltonian::{ising_hamiltonian, preset, Pauli};
use stoq::matrix::{cost, hermitian_expi, is_unitary, kron};
use stoq::random_targets::haar_random_unitary;
use stoq::{ComplexMatrix, Hamiltonian, PauliString};

fn haar(dim: usize, seed: u64) -> ComplexMatrix {
    haar_random_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn local(dim: usize, data: Vec<C64>) -> ComplexMatrix {
    ComplexMatrix::from_vec(dim, data).unwrap()
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn hamiltonian(n: usize) -> impl Strategy<Value = Hamiltonian> {
    prop::collection::vec((-2.0..2.0f64, prop::collection::vec(pauli(), n)), 1..6)
        .prop_map(move |terms| Hamiltonian::new(n, terms.into_iter().map(|(c, ops)| (c, PauliString::new(ops)))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cost_is_symmetric_and_bounded(a in any::<u64>(), b in any::<u64>(), k in 1usize..4) {
        let (u, v) = (haar(1 << k, a), haar(1 << k, b));
        let uv = cost(&u, &v).unwrap();
        prop_assert!((uv - cost(&v, &u).unwrap()).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&uv));
    }

    #[test]
    fn cost_ignores_global_phase(seed in any::<u64>(), idx in 0usize..4) {
        let alpha = [0.0, PI / 7.0, PI, 1.234][idx];
        let u = haar(8, seed);
        prop_assert!(cost(&u.scale(C64::from_polar(1.0, alpha)), &u).unwrap() < 1e-12);
    }

    #[test]
    fn expi_group_property(ham in hamiltonian(3), s in -1.0..1.0f64, t in -1.0..1.0f64) {
        let h = ham.to_matrix().unwrap();
        let lhs = hermitian_expi(&h, s).unwrap().matmul(&hermitian_expi(&h, t).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&hermitian_expi(&h, s + t).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn kron_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (haar(2, a), haar(4, b), haar(2, c));
        let left = kron(&kron(&x, &y), &z);
        let right = kron(&x, &kron(&y, &z));
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-12);
    }

    #[test]
    fn hamiltonian_matrix_is_hermitian(ham in hamiltonian(4)) {
        prop_assert!(ham.to_matrix().unwrap().hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn lambda_norm_ignores_term_order(ham in hamiltonian(3), rot in 0usize..6) {
        let mut terms = ham.terms().to_vec();
        let r = rot % terms.len();
        terms.rotate_left(r);
        terms.reverse();
        let shuffled = Hamiltonian::new(3, terms).unwrap();
        prop_assert!((shuffled.lambda_norm() - ham.lambda_norm()).abs() < 1e-12);
    }

    #[test]
    fn time_evolution_composes(ham in hamiltonian(3), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let product = ham.time_evolution(s).unwrap().matmul(&ham.time_evolution(t).unwrap()).unwrap();
        prop_assert!(product.max_abs_diff(&ham.time_evolution(s + t).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn ising_term_count(couplings in prop::collection::vec(0.1..2.0f64, 1..6)) {
        let n = couplings.len() + 1;
        let fields: Vec<f64> = (0..n).map(|k| 0.3 + k as f64 * 0.1).collect();
        prop_assert_eq!(ising_hamiltonian(n, &couplings, &fields).unwrap().len(), 2 * n - 1);
    }

    #[test]
    fn rotation_and_xx_invert(theta in 0.0..2.0 * PI, phi in 0.0..2.0 * PI) {
        let r = local(2, rotation_matrix(theta, phi)).matmul(&local(2, rotation_matrix(-theta, phi))).unwrap();
        prop_assert!(r.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
        let x = local(4, xx_matrix(theta)).matmul(&local(4, xx_matrix(-theta))).unwrap();
        prop_assert!(x.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() < 1e-12);
    }

    #[test]
    fn term_gates_compose_in_time(k in 0usize..9, s in -0.05..0.05f64, t in -0.05..0.05f64) {
        let ham = preset("ising5").unwrap();
        let alphabet = hamiltonian_term_alphabet(&ham, 0.2, 0.5).unwrap();
        let g = |t: f64| instance_matrix(&alphabet.instance(k, vec![t]).unwrap(), &alphabet, 5).unwrap();
        prop_assert!(g(s).matmul(&g(t)).unwrap().max_abs_diff(&g(s + t)).unwrap() < 1e-9);
    }

    #[test]
    fn acceptance_rule(cost in 0.0..1.0f64, new_cost in 0.0..1.0f64, beta in 0.0..1e3f64) {
        let p = accept_probability(cost, new_cost, beta);
        if new_cost <= cost {
            prop_assert_eq!(p, 1.0);
        } else {
            prop_assert!((p - (-beta * (new_cost - cost)).exp()).abs() < 1e-15);
            prop_assert!(p <= 1.0);
        }
    }
}

#[test]
fn acceptance_rule_reference_values() {
    assert_eq!(accept_probability(0.3, 0.3, 5.0), 1.0);
    assert_eq!(accept_probability(0.3, 0.1, 5.0), 1.0);
    assert!((accept_probability(0.0, 0.5, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn sampled_instances_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ham = preset("ising3").unwrap();
    let alphabets = [Arc::new(universal_alphabet(3).unwrap()), Arc::new(hamiltonian_term_alphabet(&ham, 0.2, 0.5).unwrap())];
    for alphabet in alphabets {
        for _ in 0..1000 {
            let inst = alphabet.sample_instance(&mut rng);
            assert!(is_unitary(&instance_matrix(&inst, &alphabet, 3).unwrap(), 1e-9));
            if let Some(d) = inst.duration() {
                assert_eq!(d, inst.params()[0].abs());
                assert!(d <= 0.1);
            }
        }
    }
}
