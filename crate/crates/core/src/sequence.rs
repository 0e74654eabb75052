//! Ordered gate sequences and their text serialization.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gates::{GateAlphabet, GateInstance};
use crate::matrix::ComplexMatrix;

/// Gates `G_1, ..., G_M` in application order; the realized unitary is
/// `G_M ... G_1`.
#[derive(Clone, Debug)]
pub struct CompiledSequence {
    alphabet: Arc<GateAlphabet>,
    instances: Vec<GateInstance>,
}

impl CompiledSequence {
    pub fn new(alphabet: Arc<GateAlphabet>) -> Self {
        Self { alphabet, instances: Vec::new() }
    }

    /// Wraps existing instances, checking each against the alphabet.
    pub fn from_instances(alphabet: Arc<GateAlphabet>, instances: Vec<GateInstance>) -> Result<Self> {
        for inst in &instances {
            alphabet.check_instance(inst)?;
        }
        Ok(Self { alphabet, instances })
    }

    pub fn alphabet(&self) -> &Arc<GateAlphabet> {
        &self.alphabet
    }

    pub fn num_qubits(&self) -> usize {
        self.alphabet.num_qubits()
    }

    pub fn instances(&self) -> &[GateInstance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub(crate) fn push(&mut self, inst: GateInstance) {
        self.instances.push(inst);
    }

    pub(crate) fn pop(&mut self) -> Option<GateInstance> {
        self.instances.pop()
    }

    /// `G_M ... G_1`; the empty sequence gives the identity.
    pub fn product(&self) -> ComplexMatrix {
        let n = self.num_qubits();
        let mut m = ComplexMatrix::identity(1 << n);
        for inst in &self.instances {
            m.left_apply_local(n, inst.support(), inst.local_matrix());
        }
        m
    }

    /// Calls `f(m, G_m ... G_1)` for each prefix `m = 1..=M`.
    pub fn for_each_prefix_product(&self, mut f: impl FnMut(usize, &ComplexMatrix)) {
        let n = self.num_qubits();
        let mut m = ComplexMatrix::identity(1 << n);
        for (i, inst) in self.instances.iter().enumerate() {
            m.left_apply_local(n, inst.support(), inst.local_matrix());
            f(i + 1, &m);
        }
    }

    /// Sum of gate durations; an error if any gate has no defined duration.
    pub fn total_time(&self) -> Result<f64> {
        self.instances
            .iter()
            .map(|g| g.duration().ok_or_else(|| Error::UndefinedDuration(g.spec_id().to_string())))
            .sum()
    }

    /// Parses the line format written by `Display`, resolving ids against `alphabet`.
    pub fn parse(text: &str, alphabet: Arc<GateAlphabet>) -> Result<Self> {
        let mut instances = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            instances.push(parse_instance(line, &alphabet).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(line_no, message),
                other => Error::parse(line_no, other.to_string()),
            })?);
        }
        Ok(Self { alphabet, instances })
    }
}

fn parse_instance(line: &str, alphabet: &GateAlphabet) -> Result<GateInstance> {
    let mut fields = line.split_whitespace();
    let id = fields.next().ok_or_else(|| Error::parse(0, "missing gate id"))?;
    let mut support = None;
    let mut params = None;
    for field in fields {
        if let Some(q) = field.strip_prefix("q=") {
            support = Some(parse_list::<usize>(q)?);
        } else if let Some(p) = field.strip_prefix("p=") {
            params = Some(parse_list::<f64>(p)?);
        } else {
            return Err(Error::parse(0, format!("unexpected field `{field}`")));
        }
    }
    let index = alphabet.index_of(id).ok_or_else(|| Error::UnknownSpec(id.to_string()))?;
    let spec = &alphabet.specs()[index];
    let support = support.unwrap_or_default();
    if support != spec.support {
        return Err(Error::SupportMismatch { spec: id.to_string(), support });
    }
    // fixed-precision text can land a hair outside the range
    let params = params
        .unwrap_or_default()
        .into_iter()
        .zip(&spec.param_ranges)
        .map(|(v, r)| v.clamp(r.lo, r.hi))
        .collect();
    alphabet.instance(index, params)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| v.parse::<T>().map_err(|_| Error::parse(0, format!("bad value `{v}`"))))
        .collect()
}

/// One gate per line: `<spec_id> q=<i[,j]> p=<v1[,v2]>`, 12 decimals.
impl fmt::Display for CompiledSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for inst in &self.instances {
            let q: Vec<String> = inst.support().iter().map(|q| q.to_string()).collect();
            let p: Vec<String> = inst.params().iter().map(|p| format!("{p:.12}")).collect();
            writeln!(f, "{} q={} p={}", inst.spec_id(), q.join(","), p.join(","))?;
        }
        Ok(())
    }
}
