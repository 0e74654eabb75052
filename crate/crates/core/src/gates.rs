//! Gate alphabets and concrete gate instances.
//!
//! Every gate is stored as a small local matrix on its support; embedding into
//! the full register happens only on demand ([`instance_matrix`]) or through
//! [`ComplexMatrix::left_apply_local`] on cached products.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, PauliString};
use crate::matrix::{hermitian_expi, ComplexMatrix};

/// Slack allowed when validating parameters read back from fixed-precision text.
pub const PARAM_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    /// Whether `hi` itself is attainable.
    pub closed: bool,
}

impl ParamRange {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, closed: true }
    }

    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, closed: false }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.closed {
            rng.random_range(self.lo..=self.hi)
        } else {
            rng.random_range(self.lo..self.hi)
        }
    }

    fn admits(&self, v: f64) -> bool {
        v >= self.lo - PARAM_SLACK && v <= self.hi + PARAM_SLACK
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// A parameterless gate given by its local matrix.
    Fixed(ComplexMatrix),
    /// `R_phi(theta)`, params `[theta, phi]`.
    Rotation,
    /// `XX(theta) = cos(theta) I - i sin(theta) X(x)X`, params `[theta]`.
    Xx,
    /// `e^{i c P t}` for a Pauli string `P`, params `[t]`.
    PauliEvolution { coefficient: f64, string: PauliString },
    /// `e^{i H t}` for a dense Hermitian generator on the whole support, params `[t]`.
    Evolution { generator: ComplexMatrix },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DurationRule {
    Undefined,
    /// Duration is `|t|` for the single time parameter.
    AbsoluteTime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub id: String,
    pub kind: GateKind,
    /// 1-based qubits, first entry is the most-significant local factor.
    pub support: Vec<usize>,
    pub param_ranges: Vec<ParamRange>,
    pub duration_rule: DurationRule,
}

impl GateSpec {
    pub fn fixed(id: impl Into<String>, support: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 1 << support.len() {
            return Err(Error::InvalidSupport(support));
        }
        Ok(Self {
            id: id.into(),
            kind: GateKind::Fixed(matrix),
            support,
            param_ranges: Vec::new(),
            duration_rule: DurationRule::Undefined,
        })
    }

    pub fn rotation(qubit: usize) -> Self {
        Self {
            id: format!("R{qubit}"),
            kind: GateKind::Rotation,
            support: vec![qubit],
            param_ranges: vec![ParamRange::half_open(0.0, TAU), ParamRange::half_open(0.0, TAU)],
            duration_rule: DurationRule::Undefined,
        }
    }

    pub fn xx(a: usize, b: usize) -> Self {
        let (a, b) = (a.min(b), a.max(b));
        Self {
            id: format!("XX{a}_{b}"),
            kind: GateKind::Xx,
            support: vec![a, b],
            param_ranges: vec![ParamRange::half_open(0.0, TAU)],
            duration_rule: DurationRule::Undefined,
        }
    }

    /// `e^{i c P t}` with `t` in `[-t_max, t_max]` and duration `|t|`.
    pub fn pauli_evolution(id: impl Into<String>, coefficient: f64, string: PauliString, t_max: f64) -> Self {
        Self {
            id: id.into(),
            support: string.support(),
            kind: GateKind::PauliEvolution { coefficient, string },
            param_ranges: vec![ParamRange::closed(-t_max, t_max)],
            duration_rule: DurationRule::AbsoluteTime,
        }
    }

    /// `e^{i H t}` for a dense Hermitian `generator` on all `n` qubits, with
    /// `t` in `[0, t_max]` and duration `|t|`.
    pub fn evolution(id: impl Into<String>, generator: ComplexMatrix, t_max: f64) -> Result<Self> {
        let n = generator.num_qubits()?;
        let deviation = generator.hermiticity_deviation();
        if deviation > crate::matrix::STRUCTURE_TOL {
            return Err(crate::matrix::MatrixError::NotHermitian { deviation }.into());
        }
        Ok(Self {
            id: id.into(),
            kind: GateKind::Evolution { generator },
            support: (1..=n).collect(),
            param_ranges: vec![ParamRange::closed(0.0, t_max)],
            duration_rule: DurationRule::AbsoluteTime,
        })
    }

    /// Local unitary on `support` for the given parameters (not range checked).
    pub fn local_matrix(&self, params: &[f64]) -> Vec<C64> {
        match &self.kind {
            GateKind::Fixed(m) => m.as_slice().to_vec(),
            GateKind::Rotation => rotation_matrix(params[0], params[1]),
            GateKind::Xx => xx_matrix(params[0]),
            GateKind::PauliEvolution { coefficient, string } => {
                let angle = coefficient * params[0];
                let (s, c) = angle.sin_cos();
                let p = string.local_matrix();
                let d = p.dim();
                let mut out: Vec<C64> = p.as_slice().iter().map(|&x| x * C64::new(0.0, s)).collect();
                for i in 0..d {
                    out[i * d + i] += c;
                }
                out
            }
            GateKind::Evolution { generator } => hermitian_expi(generator, params[0])
                .expect("generator checked Hermitian at construction")
                .as_slice()
                .to_vec(),
        }
    }

    fn duration(&self, params: &[f64]) -> Option<f64> {
        match self.duration_rule {
            DurationRule::Undefined => None,
            DurationRule::AbsoluteTime => Some(params[0].abs()),
        }
    }

    fn validate(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_ranges.len() {
            return Err(Error::ParamCount {
                spec: self.id.clone(),
                expected: self.param_ranges.len(),
                got: params.len(),
            });
        }
        for (index, (&value, range)) in params.iter().zip(&self.param_ranges).enumerate() {
            if !range.admits(value) {
                return Err(Error::ParamOutOfRange {
                    spec: self.id.clone(),
                    index,
                    value,
                    lo: range.lo,
                    hi: range.hi,
                });
            }
        }
        Ok(())
    }
}

/// `R_phi(theta)`, a rotation by `theta` about the equatorial axis at angle `phi`.
pub fn rotation_matrix(theta: f64, phi: f64) -> Vec<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    vec![
        C64::new(c, 0.0),
        C64::from_polar(s, -(FRAC_PI_2 + phi)),
        C64::from_polar(s, -(FRAC_PI_2 - phi)),
        C64::new(c, 0.0),
    ]
}

pub fn xx_matrix(theta: f64) -> Vec<C64> {
    let (s, c) = theta.sin_cos();
    let c = C64::new(c, 0.0);
    let m = C64::new(0.0, -s);
    let z = C64::new(0.0, 0.0);
    vec![c, z, z, m, z, c, m, z, z, m, c, z, m, z, z, c]
}

/// A concrete gate: a spec plus parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct GateInstance {
    spec_index: usize,
    spec_id: Arc<str>,
    support: Arc<[usize]>,
    params: Vec<f64>,
    duration: Option<f64>,
    local: Vec<C64>,
}

impl GateInstance {
    pub fn spec_index(&self) -> usize {
        self.spec_index
    }

    pub fn spec_id(&self) -> &str {
        &self.spec_id
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn duration(&self) -> Option<f64> {
        self.duration
    }

    /// Row-major local matrix on [`support`](Self::support).
    pub fn local_matrix(&self) -> &[C64] {
        &self.local
    }
}

/// The set of gates a compilation may draw from.
#[derive(Clone, Debug)]
pub struct GateAlphabet {
    n: usize,
    specs: Vec<GateSpec>,
    ids: HashMap<String, usize>,
}

impl GateAlphabet {
    pub fn new(n: usize, specs: Vec<GateSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut ids = HashMap::with_capacity(specs.len());
        for (i, spec) in specs.iter().enumerate() {
            let mut seen = spec.support.clone();
            seen.sort_unstable();
            seen.dedup();
            let bad_index = spec.support.iter().any(|&q| q == 0 || q > n);
            if bad_index || seen.len() != spec.support.len() {
                return Err(Error::InvalidSupport(spec.support.clone()));
            }
            if ids.insert(spec.id.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate gate id `{}`", spec.id)));
            }
        }
        Ok(Self { n, specs, ids })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn specs(&self) -> &[GateSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.get(id).copied()
    }

    /// Instantiates spec `index` with explicit parameters.
    pub fn instance(&self, index: usize, params: Vec<f64>) -> Result<GateInstance> {
        let spec = self.specs.get(index).ok_or_else(|| Error::UnknownSpec(format!("#{index}")))?;
        spec.validate(&params)?;
        Ok(self.build(index, params))
    }

    pub fn instance_by_id(&self, id: &str, params: Vec<f64>) -> Result<GateInstance> {
        let index = self.index_of(id).ok_or_else(|| Error::UnknownSpec(id.to_string()))?;
        self.instance(index, params)
    }

    fn build(&self, index: usize, params: Vec<f64>) -> GateInstance {
        let spec = &self.specs[index];
        GateInstance {
            spec_index: index,
            spec_id: Arc::from(spec.id.as_str()),
            support: Arc::from(spec.support.as_slice()),
            duration: spec.duration(&params),
            local: spec.local_matrix(&params),
            params,
        }
    }

    /// Draws a spec uniformly, then each parameter uniformly over its range.
    pub fn sample_instance<R: Rng + ?Sized>(&self, rng: &mut R) -> GateInstance {
        let index = rng.random_range(0..self.specs.len());
        let params = self.specs[index].param_ranges.iter().map(|r| r.sample(rng)).collect();
        self.build(index, params)
    }

    /// Checks that `inst` was produced by this alphabet with admissible parameters.
    pub fn check_instance(&self, inst: &GateInstance) -> Result<()> {
        let index = self.index_of(inst.spec_id()).ok_or_else(|| Error::UnknownSpec(inst.spec_id().into()))?;
        let spec = &self.specs[index];
        if spec.support.as_slice() != inst.support() {
            return Err(Error::SupportMismatch { spec: spec.id.clone(), support: inst.support().to_vec() });
        }
        spec.validate(inst.params())
    }
}

/// One gate `e^{i H_k t}`, `t` in `[-epsilon tau, epsilon tau]`, per Hamiltonian term.
pub fn hamiltonian_term_alphabet(ham: &Hamiltonian, epsilon: f64, tau: f64) -> Result<GateAlphabet> {
    if ham.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    if !(epsilon > 0.0 && tau > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon ({epsilon}) and tau ({tau}) must be positive")));
    }
    let specs = ham
        .terms()
        .iter()
        .enumerate()
        .map(|(k, (c, s))| GateSpec::pauli_evolution(format!("H{}", k + 1), *c, s.clone(), epsilon * tau))
        .collect();
    GateAlphabet::new(ham.num_qubits(), specs)
}

/// `R_phi(theta)` on every qubit and `XX(theta)` on every unordered pair.
pub fn universal_alphabet(n: usize) -> Result<GateAlphabet> {
    if n == 0 {
        return Err(Error::InvalidConfig("universal alphabet needs at least one qubit".into()));
    }
    let mut specs: Vec<GateSpec> = (1..=n).map(GateSpec::rotation).collect();
    for a in 1..=n {
        for b in a + 1..=n {
            specs.push(GateSpec::xx(a, b));
        }
    }
    GateAlphabet::new(n, specs)
}

/// Dense `2^n` realization of `inst`, identity off its support.
pub fn instance_matrix(inst: &GateInstance, alphabet: &GateAlphabet, n: usize) -> Result<ComplexMatrix> {
    alphabet.check_instance(inst)?;
    if inst.support().iter().any(|&q| q == 0 || q > n) {
        return Err(Error::InvalidSupport(inst.support().to_vec()));
    }
    let mut m = ComplexMatrix::identity(1 << n);
    m.left_apply_local(n, inst.support(), inst.local_matrix());
    Ok(m)
}
