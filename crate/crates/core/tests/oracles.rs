//! Library results checked against independent, deliberately naive computations.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stoq::hamiltonian::{preset, Pauli};
use stoq::matrix::{cost, hermitian_expi, hs_overlap, kron, trace_distance};
use stoq::random_targets::haar_random_unitary;
use stoq::{ComplexMatrix, Hamiltonian, PauliString};

fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    let d = m.as_mut_slice();
    for i in 0..dim {
        d[i * dim + i] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            d[i * dim + j] = z;
            d[j * dim + i] = z.conj();
        }
    }
    m
}

/// e^{iHt} by truncated power series.
fn taylor_expi(h: &ComplexMatrix, t: f64, terms: usize) -> ComplexMatrix {
    let dim = h.dim();
    let a = h.scale(C64::new(0.0, t));
    let mut sum = ComplexMatrix::identity(dim);
    let mut term = ComplexMatrix::identity(dim);
    for k in 1..terms {
        term = term.matmul(&a).unwrap().scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term).unwrap();
    }
    sum
}

#[test]
fn expi_matches_taylor_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let h = random_hermitian(8, &mut rng);
        let exact = hermitian_expi(&h, 0.3).unwrap();
        let series = taylor_expi(&h, 0.3, 40);
        assert!(exact.max_abs_diff(&series).unwrap() <= 1e-10);
    }
}

#[test]
fn overlap_matches_entrywise_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u = haar_random_unitary(8, &mut rng);
    let v = haar_random_unitary(8, &mut rng);
    // Tr(v^dagger u) written out as a double loop
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..8 {
        for k in 0..8 {
            tr += v[(k, i)].conj() * u[(k, i)];
        }
    }
    assert!((hs_overlap(&u, &v).unwrap() - tr.norm()).abs() < 1e-12);
    assert!((cost(&u, &v).unwrap() - (1.0 - tr.norm() / 8.0)).abs() < 1e-12);
}

/// Cyclic Jacobi sweep for real symmetric matrices; returns eigenvalues.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[test]
fn trace_distance_matches_jacobi_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for dim in [2, 4] {
        let u = haar_random_unitary(dim, &mut rng);
        let v = haar_random_unitary(dim, &mut rng);
        let d = u.sub(&v).unwrap();
        let g = d.adjoint().matmul(&d).unwrap();
        // Hermitian g = A + iB embeds as the real symmetric [[A, -B], [B, A]],
        // which carries every eigenvalue of g twice.
        let mut real = vec![vec![0.0; 2 * dim]; 2 * dim];
        for i in 0..dim {
            for j in 0..dim {
                let z = g[(i, j)];
                real[i][j] = z.re;
                real[i + dim][j + dim] = z.re;
                real[i][j + dim] = -z.im;
                real[i + dim][j] = z.im;
            }
        }
        let eig = jacobi_eigenvalues(real);
        let oracle = eig.iter().map(|&e| e.max(0.0).sqrt()).sum::<f64>() / 4.0;
        assert!((trace_distance(&u, &v).unwrap() - oracle).abs() < 1e-9, "dim {dim}");
    }
}

#[test]
fn trace_distance_sees_global_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let u = haar_random_unitary(4, &mut rng);
    let phased = u.scale(C64::from_polar(1.0, 0.7));
    assert!(trace_distance(&u, &u).unwrap() < 1e-9);
    assert!(trace_distance(&u, &phased).unwrap() > 0.1);
    assert!(cost(&u, &phased).unwrap() < 1e-12);
}

#[test]
fn ising_matrix_matches_kron_construction() {
    let ham = preset("ising3").unwrap();
    let (x, y, i2) = (Pauli::X.matrix(), Pauli::Y.matrix(), ComplexMatrix::identity(2));
    let j = [1.81, 1.27];
    let h = [1.54, 1.19, 0.53];
    let place = |ops: [&ComplexMatrix; 3]| kron(&kron(ops[0], ops[1]), ops[2]);
    let terms = [
        (j[0], place([&x, &x, &i2])),
        (j[1], place([&i2, &x, &x])),
        (h[0], place([&y, &i2, &i2])),
        (h[1], place([&i2, &y, &i2])),
        (h[2], place([&i2, &i2, &y])),
    ];
    let mut oracle = ComplexMatrix::zeros(8);
    for (c, m) in &terms {
        oracle = oracle.add(&m.scale(C64::new(*c, 0.0))).unwrap();
    }
    assert!(ham.to_matrix().unwrap().max_abs_diff(&oracle).unwrap() < 1e-12);
}

#[test]
fn ising5_has_reported_lambda() {
    let ham = preset("ising5").unwrap();
    assert_eq!(ham.len(), 9);
    assert!((ham.lambda_norm() - 11.0).abs() < 1e-12);
}

#[test]
fn pauli_string_parse_matches_placement() {
    let parsed: PauliString = "XIZ".parse().unwrap();
    let placed = PauliString::with_ops(3, &[(1, Pauli::X), (3, Pauli::Z)]);
    assert_eq!(parsed, placed);
    let ham = Hamiltonian::new(3, [(0.5, parsed)]).unwrap();
    let oracle = kron(&kron(&Pauli::X.matrix(), &ComplexMatrix::identity(2)), &Pauli::Z.matrix()).scale(C64::new(0.5, 0.0));
    assert!(ham.to_matrix().unwrap().max_abs_diff(&oracle).unwrap() < 1e-15);
}
