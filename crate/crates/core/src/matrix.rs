//! Dense complex matrices and the distance measures used to score compilations.
//!
//! Matrices are square and stored row-major. Qubit 1 is the most-significant
//! tensor factor everywhere in the crate, so for an `n`-qubit operator the
//! basis index bit for qubit `q` sits at position `n - q` (counting from the
//! least-significant bit).

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Tolerance used for unitarity and Hermiticity checks throughout the crate.
pub const STRUCTURE_TOL: f64 = 1e-9;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    BadEntryCount { dim: usize, expected: usize, got: usize },
    #[error("eigendecomposition did not converge")]
    NoConvergence,
}

/// A dense `dim x dim` complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != dim * dim {
            return Err(MatrixError::BadEntryCount { dim, expected: dim * dim, got: data.len() });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from a list of equal-length rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(MatrixError::DimensionMismatch { left: dim, right: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_same_dim(rhs)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            let out_row = &mut out.data[i * d..(i + 1) * d];
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * d..(k + 1) * d];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_same_dim(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_same_dim(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64, MatrixError> {
        self.check_same_dim(rhs)?;
        Ok(self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Max-norm of `M - M^dag`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.data[i * d + j] - self.data[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn num_qubits(&self) -> Result<usize, MatrixError> {
        if self.dim.is_power_of_two() {
            Ok(self.dim.trailing_zeros() as usize)
        } else {
            Err(MatrixError::NotPowerOfTwo(self.dim))
        }
    }

    fn check_same_dim(&self, rhs: &Self) -> Result<(), MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(m[(i, j)]);
            }
        }
        Self { dim, data }
    }

    /// Applies a `k`-qubit operator acting on `support` (1-based qubit
    /// indices) of an `n`-qubit register from the left, in place:
    /// `self <- G_full * self`.
    ///
    /// `gate` is the row-major `2^k x 2^k` matrix whose first tensor factor
    /// is `support[0]`. Costs `O(dim^2 * 2^k)` instead of a dense product.
    pub fn left_apply_local(&mut self, n: usize, support: &[usize], gate: &[C64]) {
        let d = self.dim;
        debug_assert_eq!(d, 1 << n);
        let k = support.len();
        let gdim = 1usize << k;
        debug_assert_eq!(gate.len(), gdim * gdim);

        let bits: Vec<usize> = support.iter().map(|&q| n - q).collect();
        let support_mask: usize = bits.iter().map(|&b| 1usize << b).sum();
        // offsets[a] = basis offset of local index a (support[0] most significant)
        let offsets: Vec<usize> = (0..gdim)
            .map(|a| {
                bits.iter()
                    .enumerate()
                    .filter(|(pos, _)| a >> (k - 1 - pos) & 1 == 1)
                    .map(|(_, &b)| 1usize << b)
                    .sum()
            })
            .collect();

        let mut scratch = vec![ZERO; gdim * d];
        for base in (0..d).filter(|i| i & support_mask == 0) {
            for (a, &off) in offsets.iter().enumerate() {
                scratch[a * d..(a + 1) * d].copy_from_slice(self.row(base + off));
            }
            for (a, &off) in offsets.iter().enumerate() {
                let row_start = (base + off) * d;
                let out = &mut self.data[row_start..row_start + d];
                out.fill(ZERO);
                for b in 0..gdim {
                    let g = gate[a * gdim + b];
                    if g == ZERO {
                        continue;
                    }
                    for (o, &s) in out.iter_mut().zip(&scratch[b * d..(b + 1) * d]) {
                        *o += g * s;
                    }
                }
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> =
                self.row(i).iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// Plain-text form: a `dim` header line, then one line per row of
    /// space-separated `re,im` pairs at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{:.16e},{:.16e}", z.re, z.im)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Whitespace layout is not significant.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut tokens = text.split_whitespace();
        let dim: usize = tokens
            .next()
            .ok_or("missing dimension header")?
            .parse()
            .map_err(|e| format!("bad dimension header: {e}"))?;
        let data = tokens
            .map(|tok| {
                let (re, im) = tok.split_once(',').ok_or_else(|| format!("expected `re,im`, got `{tok}`"))?;
                let re: f64 = re.parse().map_err(|e| format!("bad real part `{re}`: {e}"))?;
                let im: f64 = im.parse().map_err(|e| format!("bad imaginary part `{im}`: {e}"))?;
                Ok(C64::new(re, im))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Self::from_vec(dim, data).map_err(|e| e.to_string())
    }
}

/// Tensor product `a (x) b`, with `a` as the more-significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..da {
        for j in 0..da {
            let x = a.data[i * da + j];
            if x == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.data[(i * db + k) * d + j * db + l] = x * b.data[k * db + l];
                }
            }
        }
    }
    out
}

/// Spectral decomposition `H = V diag(values) V^dag` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(h: &ComplexMatrix) -> Result<Self, MatrixError> {
        let deviation = h.hermiticity_deviation();
        if deviation > STRUCTURE_TOL {
            return Err(MatrixError::NotHermitian { deviation });
        }
        let eig = nalgebra::SymmetricEigen::try_new(h.to_nalgebra(), f64::EPSILON, 0)
            .ok_or(MatrixError::NoConvergence)?;
        Ok(Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: ComplexMatrix::from_nalgebra(&eig.eigenvectors),
        })
    }

    /// `exp(i H t)`.
    pub fn expi(&self, t: f64) -> ComplexMatrix {
        let d = self.vectors.dim;
        let phases: Vec<C64> = self.values.iter().map(|&l| C64::from_polar(1.0, l * t)).collect();
        let v = &self.vectors.data;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += v[i * d + k] * phases[k] * v[j * d + k].conj();
                }
                out.data[i * d + j] = acc;
            }
        }
        out
    }
}

/// `exp(i h t)` for Hermitian `h`. Note the `+i` sign convention.
pub fn hermitian_expi(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, MatrixError> {
    Ok(HermitianEigen::new(h)?.expi(t))
}

/// Hilbert-Schmidt overlap `|Tr(v^dag u)|`, in `[0, dim]` for unitaries.
pub fn hs_overlap(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, MatrixError> {
    u.check_same_dim(v)?;
    Ok(overlap_unchecked(u, v))
}

#[inline]
pub(crate) fn overlap_unchecked(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    u.data.iter().zip(&v.data).map(|(a, b)| b.conj() * a).sum::<C64>().norm()
}

/// Phase-invariant compilation cost `1 - |Tr(v^dag u)| / 2^n`.
///
/// Zero exactly when `u` and `v` agree up to a global phase. The result is
/// clamped into `[0, 1]` to absorb roundoff at the endpoints.
pub fn cost(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, MatrixError> {
    u.num_qubits()?;
    let overlap = hs_overlap(u, v)?;
    Ok(cost_from_overlap(overlap, u.dim))
}

#[inline]
pub(crate) fn cost_from_overlap(overlap: f64, dim: usize) -> f64 {
    (1.0 - overlap / dim as f64).clamp(0.0, 1.0)
}

/// Trace distance `1/2 Tr|u - v|`, the sum of singular values of `u - v` halved.
///
/// Not phase invariant. Only used for diagnostics.
pub fn trace_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, MatrixError> {
    let diff = u.sub(v)?;
    let svd = diff.to_nalgebra().svd(false, false);
    Ok(0.5 * svd.singular_values.iter().sum::<f64>())
}

/// True iff the max-norm of `m^dag m - I` is at most `tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

pub fn unitarity_deviation(m: &ComplexMatrix) -> f64 {
    let d = m.dim;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            let mut acc = ZERO;
            for k in 0..d {
                acc += m.data[k * d + i].conj() * m.data[k * d + j];
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Single-qubit Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix { dim: 2, data: vec![ZERO, ONE, ONE, ZERO] }
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix { dim: 2, data: vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO] }
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix { dim: 2, data: vec![ONE, ZERO, ZERO, -ONE] }
    }
}
