//! Pauli-term Hamiltonians.
//!
//! Time evolution uses the `e^{+iHt}` sign convention throughout this crate
//! (most texts use `e^{-iHt}`). Negating `t` converts between the two.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_expi, ComplexMatrix};

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => crate::matrix::pauli::x(),
            Pauli::Y => crate::matrix::pauli::y(),
            Pauli::Z => crate::matrix::pauli::z(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A tensor product of single-qubit Paulis; `ops[0]` acts on qubit 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn identity(n: usize) -> Self {
        Self { ops: vec![Pauli::I; n] }
    }

    /// String with `op` on the given 1-based qubits and identity elsewhere.
    pub fn with_ops(n: usize, placed: &[(usize, Pauli)]) -> Self {
        let mut ops = vec![Pauli::I; n];
        for &(q, p) in placed {
            ops[q - 1] = p;
        }
        Self { ops }
    }

    pub fn num_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// 1-based indices of the non-identity factors, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Dense matrix of the factors on `support()` only, first support qubit
    /// most significant. An all-identity string gives the 1x1 identity.
    pub fn local_matrix(&self) -> ComplexMatrix {
        self.support()
            .into_iter()
            .map(|q| self.ops[q - 1].matrix())
            .fold(ComplexMatrix::identity(1), |acc, m| crate::matrix::kron(&acc, &m))
    }

    /// For basis column `j`, the row index and amplitude of `P|j>`.
    #[inline]
    fn action(&self, j: usize) -> (usize, C64) {
        let n = self.ops.len();
        let mut row = j;
        let mut amp = C64::new(1.0, 0.0);
        for (idx, &p) in self.ops.iter().enumerate() {
            let bit = n - 1 - idx;
            let set = (j >> bit) & 1 == 1;
            match p {
                Pauli::I => {}
                Pauli::X => row ^= 1 << bit,
                Pauli::Y => {
                    row ^= 1 << bit;
                    amp *= if set { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
                }
                Pauli::Z => {
                    if set {
                        amp = -amp;
                    }
                }
            }
        }
        (row, amp)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ops.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

impl FromStr for PauliString {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.is_empty() {
            return Err("empty pauli string".into());
        }
        s.chars()
            .map(|c| Pauli::from_symbol(c).ok_or_else(|| format!("bad pauli symbol `{c}`")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PauliString::new)
    }
}

/// A real-weighted sum of Pauli strings on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    /// Builds a Hamiltonian, merging coefficients of repeated strings.
    /// Term order follows first appearance.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (c, s) in terms {
            if s.num_qubits() != n {
                return Err(Error::QubitCountMismatch { expected: n, got: s.num_qubits() });
            }
            match merged.iter_mut().find(|(_, existing)| *existing == s) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, s)),
            }
        }
        Ok(Self { n, terms: merged })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of absolute coefficients.
    pub fn lambda_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Dense `2^n x 2^n` Hermitian matrix.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(self.n));
        }
        let d = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(d);
        for (c, s) in &self.terms {
            for j in 0..d {
                let (i, amp) = s.action(j);
                m[(i, j)] += amp * *c;
            }
        }
        Ok(m)
    }

    /// `e^{i H tau}`.
    pub fn time_evolution(&self, tau: f64) -> Result<ComplexMatrix> {
        Ok(hermitian_expi(&self.to_matrix()?, tau)?)
    }
}

/// `sum_i J_i X_i X_{i+1} + sum_i h_i Y_i` on an open chain; coupling terms
/// come first.
pub fn ising_hamiltonian(n: usize, couplings: &[f64], fields: &[f64]) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::LengthMismatch { what: "qubits (at least)", expected: 2, got: n });
    }
    if couplings.len() != n - 1 {
        return Err(Error::LengthMismatch { what: "couplings", expected: n - 1, got: couplings.len() });
    }
    if fields.len() != n {
        return Err(Error::LengthMismatch { what: "fields", expected: n, got: fields.len() });
    }
    let xx = couplings
        .iter()
        .enumerate()
        .map(|(i, &j)| (j, PauliString::with_ops(n, &[(i + 1, Pauli::X), (i + 2, Pauli::X)])));
    let y = fields
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, PauliString::with_ops(n, &[(i + 1, Pauli::Y)])));
    Hamiltonian::new(n, xx.chain(y))
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["ising2", "ising3", "ising5", "ising8"];

/// Built-in transverse-field Ising instances.
pub fn preset(name: &str) -> Result<Hamiltonian> {
    match name {
        "ising2" => ising_hamiltonian(2, &[1.27], &[1.54, 1.19]),
        "ising3" => ising_hamiltonian(3, &[1.81, 1.27], &[1.54, 1.19, 0.53]),
        "ising5" => ising_hamiltonian(5, &[1.20, 1.40, 1.60, 1.80], &[1.60, 1.30, 1.00, 0.70, 0.40]),
        "ising8" => ising_hamiltonian(
            8,
            &[1.20, 1.30, 1.40, 1.50, 1.60, 1.70, 1.80],
            &[1.40, 1.10, 0.80, 1.00, 1.20, 1.50, 1.70, 1.30],
        ),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Text form: one `<coefficient> <pauli-string>` per line. Coefficients use
/// the shortest representation that parses back to the same `f64`.
impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, s) in &self.terms {
            writeln!(f, "{c} {s}")?;
        }
        Ok(())
    }
}

impl FromStr for Hamiltonian {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(coef), Some(string), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(line_no, "expected `<coefficient> <pauli-string>`"));
            };
            let coef: f64 = coef
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad coefficient `{coef}`")))?;
            if !coef.is_finite() {
                return Err(Error::parse(line_no, "coefficient must be finite"));
            }
            let string: PauliString = string.parse().map_err(|e| Error::parse(line_no, e))?;
            match n {
                None => n = Some(string.num_qubits()),
                Some(n) if n != string.num_qubits() => {
                    return Err(Error::parse(
                        line_no,
                        format!("pauli string has {} qubits, expected {n}", string.num_qubits()),
                    ))
                }
                _ => {}
            }
            terms.push((coef, string));
        }
        let n = n.ok_or(Error::EmptyHamiltonian)?;
        Hamiltonian::new(n, terms)
    }
}
