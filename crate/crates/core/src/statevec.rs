//! Dense statevector simulation.
//!
//! Site `i` of a register is bit `i` of the basis-state index, with site 0 the
//! least-significant bit. Bitstrings and Pauli strings are always written with
//! site 0 first, so `|01⟩` is site 0 in `|0⟩`, site 1 in `|1⟩` (index 2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 20;
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    qubit_count: usize,
}

impl StateVector {
    /// Build a state from raw amplitudes. The vector must have power-of-two
    /// length and unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubit_count = qubits_for_len(amplitudes.len())?;
        let state = Self {
            amplitudes,
            qubit_count,
        };
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n2));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales the input
    /// to unit norm first.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubit_count = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self {
            amplitudes,
            qubit_count,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Born-rule probabilities of every computational basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_qubits(other.qubit_count)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn check_qubits(&self, expected: usize) -> Result<()> {
        if self.qubit_count != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.qubit_count,
            });
        }
        Ok(())
    }

    pub(crate) fn from_raw_unchecked(amplitudes: Vec<Complex64>, qubit_count: usize) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << qubit_count);
        Self {
            amplitudes,
            qubit_count,
        }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Parse(format!(
            "amplitude vector length {len} is not 2^N with N ≥ 1"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::UnsupportedSize {
            size: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(n)
}

/// Index of a bitstring under the site-0-is-LSB convention.
pub fn basis_index(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b & 1) << i))
}

/// Bitstring (site 0 first) of a basis index.
pub fn index_bits(index: usize, qubit_count: usize) -> String {
    (0..qubit_count)
        .map(|i| if index >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn init_basis_state(qubit_count: usize, bits: &[u8]) -> Result<StateVector> {
    if qubit_count == 0 || qubit_count > MAX_QUBITS {
        return Err(Error::InvalidQubitCount(qubit_count));
    }
    if bits.len() != qubit_count {
        return Err(Error::DimensionMismatch {
            expected: qubit_count,
            found: bits.len(),
        });
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::Parse(format!("bit value {b} is not 0 or 1")));
    }
    let mut amplitudes = vec![ZERO; 1 << qubit_count];
    amplitudes[basis_index(bits)] = ONE;
    Ok(StateVector::from_raw_unchecked(amplitudes, qubit_count))
}

/// The closed gate set used by the ansätze and measurement rotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Ry { site: usize, angle: f64 },
    Hadamard { site: usize },
    S { site: usize },
    SDagger { site: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    /// `exp[−iθ(X_iX_j + Y_iY_j + Z_iZ_j)]`
    Exchange { angle: f64, i: usize, j: usize },
}

impl Gate {
    pub fn sites(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { site, .. }
            | Gate::Hadamard { site }
            | Gate::S { site }
            | Gate::SDagger { site } => vec![site],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz { a, b } => vec![a, b],
            Gate::Exchange { i, j, .. } => vec![i, j],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.sites().len() == 2
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::Ry { site, angle } => Gate::Ry {
                site,
                angle: -angle,
            },
            Gate::S { site } => Gate::SDagger { site },
            Gate::SDagger { site } => Gate::S { site },
            Gate::Exchange { angle, i, j } => Gate::Exchange {
                angle: -angle,
                i,
                j,
            },
            g @ (Gate::Hadamard { .. } | Gate::Cnot { .. } | Gate::Cz { .. }) => g,
        }
    }

    pub fn validate(&self, qubit_count: usize) -> Result<()> {
        let sites = self.sites();
        for &s in &sites {
            if s >= qubit_count {
                return Err(Error::InvalidSite {
                    site: s,
                    qubits: qubit_count,
                });
            }
        }
        if sites.len() == 2 && sites[0] == sites[1] {
            return Err(Error::RepeatedSite(sites[0]));
        }
        Ok(())
    }

    /// Matrix of the gate on its own sites. Two-qubit matrices use local
    /// index `bit(first site) + 2·bit(second site)`.
    pub fn local_matrix(&self) -> GateMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match *self {
            Gate::Ry { angle, .. } => {
                let (s, co) = (angle / 2.0).sin_cos();
                GateMatrix::One([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
            }
            Gate::Hadamard { .. } => {
                GateMatrix::One([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
            }
            Gate::S { .. } => GateMatrix::One([[ONE, ZERO], [ZERO, c(0.0, 1.0)]]),
            Gate::SDagger { .. } => GateMatrix::One([[ONE, ZERO], [ZERO, c(0.0, -1.0)]]),
            Gate::Cnot { .. } => {
                // local index = control + 2·target; flip target when control = 1
                let mut m = [[ZERO; 4]; 4];
                m[0][0] = ONE;
                m[2][2] = ONE;
                m[1][3] = ONE;
                m[3][1] = ONE;
                GateMatrix::Two(m)
            }
            Gate::Cz { .. } => {
                let mut m = [[ZERO; 4]; 4];
                m[0][0] = ONE;
                m[1][1] = ONE;
                m[2][2] = ONE;
                m[3][3] = -ONE;
                GateMatrix::Two(m)
            }
            Gate::Exchange { angle, .. } => GateMatrix::Two(exchange_matrix(angle)),
        }
    }
}

/// Closed form of `exp[−iθ(XX + YY + ZZ)]`. The generator equals
/// `2·SWAP − I`, so the unitary is `e^{iθ}(cos2θ·I − i·sin2θ·SWAP)`: a phase
/// `e^{−iθ}` on `|00⟩, |11⟩` and a rotation inside `{|01⟩, |10⟩}`.
pub fn exchange_matrix(theta: f64) -> Mat4 {
    let phase = Complex64::from_polar(1.0, theta);
    let (s2, c2) = (2.0 * theta).sin_cos();
    let diag = phase * Complex64::new(c2, 0.0);
    let off = phase * Complex64::new(0.0, -s2);
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = Complex64::from_polar(1.0, -theta);
    m[3][3] = m[0][0];
    m[1][1] = diag;
    m[2][2] = diag;
    m[1][2] = off;
    m[2][1] = off;
    m
}

#[derive(Debug, Clone, Copy)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

/// Apply a 2×2 matrix on bit `site` of a raw amplitude buffer.
pub(crate) fn apply_mat2(amps: &mut [Complex64], site: usize, m: &Mat2) {
    let stride = 1usize << site;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for k in base..base + stride {
            let a0 = amps[k];
            let a1 = amps[k + stride];
            amps[k] = m[0][0] * a0 + m[0][1] * a1;
            amps[k + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

/// Apply a 4×4 matrix on bits `(a, b)` of a raw amplitude buffer, local index
/// `bit_a + 2·bit_b`.
pub(crate) fn apply_mat4(amps: &mut [Complex64], a: usize, b: usize, m: &Mat4) {
    let ma = 1usize << a;
    let mb = 1usize << b;
    for k in 0..amps.len() {
        if k & ma != 0 || k & mb != 0 {
            continue;
        }
        let idx = [k, k | ma, k | mb, k | ma | mb];
        let v = idx.map(|i| amps[i]);
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

/// Apply a gate's matrix (or its elementwise conjugate) to a raw buffer with
/// the gate's sites shifted by `offset`. Density matrices use this to act on
/// row (offset 0) and column (offset N) indices.
pub(crate) fn apply_gate_raw(amps: &mut [Complex64], gate: &Gate, offset: usize, conjugate: bool) {
    let sites = gate.sites();
    match gate.local_matrix() {
        GateMatrix::One(mut m) => {
            if conjugate {
                m.iter_mut().flatten().for_each(|z| *z = z.conj());
            }
            apply_mat2(amps, sites[0] + offset, &m);
        }
        GateMatrix::Two(mut m) => {
            if conjugate {
                m.iter_mut().flatten().for_each(|z| *z = z.conj());
            }
            apply_mat4(amps, sites[0] + offset, sites[1] + offset, &m);
        }
    }
}

pub fn apply_gate(psi: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = psi.clone();
    apply_gate_in_place(&mut out, gate)?;
    Ok(out)
}

pub(crate) fn apply_gate_in_place(psi: &mut StateVector, gate: &Gate) -> Result<()> {
    gate.validate(psi.qubit_count())?;
    apply_gate_raw(psi.amplitudes_mut(), gate, 0, false);
    Ok(())
}

/// A gate angle: either a constant or a reference into the parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Fixed(f64),
    Param(usize),
}

impl Angle {
    fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(v) => v,
            Angle::Param(k) => params[k],
        }
    }
}

/// A gate whose angle may still be unbound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateTemplate {
    Ry { site: usize, angle: Angle },
    Hadamard { site: usize },
    S { site: usize },
    SDagger { site: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    Exchange { angle: Angle, i: usize, j: usize },
}

impl GateTemplate {
    pub fn bind(&self, params: &[f64]) -> Gate {
        match *self {
            GateTemplate::Ry { site, angle } => Gate::Ry {
                site,
                angle: angle.resolve(params),
            },
            GateTemplate::Hadamard { site } => Gate::Hadamard { site },
            GateTemplate::S { site } => Gate::S { site },
            GateTemplate::SDagger { site } => Gate::SDagger { site },
            GateTemplate::Cnot { control, target } => Gate::Cnot { control, target },
            GateTemplate::Cz { a, b } => Gate::Cz { a, b },
            GateTemplate::Exchange { angle, i, j } => Gate::Exchange {
                angle: angle.resolve(params),
                i,
                j,
            },
        }
    }

    fn angle(&self) -> Option<Angle> {
        match *self {
            GateTemplate::Ry { angle, .. } | GateTemplate::Exchange { angle, .. } => Some(angle),
            _ => None,
        }
    }
}

impl From<Gate> for GateTemplate {
    fn from(g: Gate) -> Self {
        match g {
            Gate::Ry { site, angle } => GateTemplate::Ry {
                site,
                angle: Angle::Fixed(angle),
            },
            Gate::Hadamard { site } => GateTemplate::Hadamard { site },
            Gate::S { site } => GateTemplate::S { site },
            Gate::SDagger { site } => GateTemplate::SDagger { site },
            Gate::Cnot { control, target } => GateTemplate::Cnot { control, target },
            Gate::Cz { a, b } => GateTemplate::Cz { a, b },
            Gate::Exchange { angle, i, j } => GateTemplate::Exchange {
                angle: Angle::Fixed(angle),
                i,
                j,
            },
        }
    }
}

/// Ordered list of gate templates over named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<GateTemplate>,
    parameter_slots: Vec<String>,
}

impl Circuit {
    pub fn new(qubit_count: usize, parameter_slots: Vec<String>) -> Result<Self> {
        if qubit_count == 0 || qubit_count > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(qubit_count));
        }
        Ok(Self {
            qubit_count,
            gates: Vec::new(),
            parameter_slots,
        })
    }

    pub fn push(&mut self, gate: GateTemplate) -> Result<()> {
        if let Some(Angle::Param(k)) = gate.angle() {
            if k >= self.parameter_slots.len() {
                return Err(Error::ParameterArity {
                    expected: self.parameter_slots.len(),
                    found: k + 1,
                });
            }
        }
        gate.bind(&vec![0.0; self.parameter_slots.len()])
            .validate(self.qubit_count)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn push_gate(&mut self, gate: Gate) -> Result<()> {
        self.push(gate.into())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[GateTemplate] {
        &self.gates
    }

    pub fn parameter_slots(&self) -> &[String] {
        &self.parameter_slots
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_slots.len()
    }

    pub fn bind(&self, params: &[f64]) -> Result<Vec<Gate>> {
        if params.len() != self.parameter_slots.len() {
            return Err(Error::ParameterArity {
                expected: self.parameter_slots.len(),
                found: params.len(),
            });
        }
        Ok(self.gates.iter().map(|g| g.bind(params)).collect())
    }

    /// Gate records for the `--dump-circuit` JSON format.
    pub fn to_records(&self) -> Vec<GateRecord> {
        self.gates
            .iter()
            .map(|g| {
                let bound = g.bind(&vec![0.0; self.parameter_slots.len()]);
                let (angle, parameter) = match g.angle() {
                    Some(Angle::Fixed(v)) => (Some(v), None),
                    Some(Angle::Param(k)) => (None, Some(self.parameter_slots[k].clone())),
                    None => (None, None),
                };
                GateRecord {
                    kind: gate_kind_name(&bound).to_string(),
                    sites: bound.sites(),
                    angle,
                    parameter,
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_records())?)
    }

    /// Rebuild a circuit from gate records. Parameters are slotted in order of
    /// first appearance.
    pub fn from_records(qubit_count: usize, records: &[GateRecord]) -> Result<Self> {
        let mut slots: Vec<String> = Vec::new();
        for r in records {
            if let Some(p) = &r.parameter {
                if !slots.contains(p) {
                    slots.push(p.clone());
                }
            }
        }
        let mut circuit = Circuit::new(qubit_count, slots.clone())?;
        for r in records {
            let angle = match (&r.parameter, r.angle) {
                (Some(p), _) => Some(Angle::Param(slots.iter().position(|s| s == p).unwrap())),
                (None, Some(v)) => Some(Angle::Fixed(v)),
                (None, None) => None,
            };
            let site = |k: usize| {
                r.sites
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::Parse(format!("gate {} is missing site {k}", r.kind)))
            };
            let need_angle =
                || angle.ok_or_else(|| Error::Parse(format!("gate {} needs an angle", r.kind)));
            let tmpl = match r.kind.as_str() {
                "ry" => GateTemplate::Ry {
                    site: site(0)?,
                    angle: need_angle()?,
                },
                "hadamard" => GateTemplate::Hadamard { site: site(0)? },
                "s" => GateTemplate::S { site: site(0)? },
                "s_dagger" => GateTemplate::SDagger { site: site(0)? },
                "cnot" => GateTemplate::Cnot {
                    control: site(0)?,
                    target: site(1)?,
                },
                "cz" => GateTemplate::Cz {
                    a: site(0)?,
                    b: site(1)?,
                },
                "exchange" => GateTemplate::Exchange {
                    angle: need_angle()?,
                    i: site(0)?,
                    j: site(1)?,
                },
                other => return Err(Error::Parse(format!("unknown gate kind {other:?}"))),
            };
            circuit.push(tmpl)?;
        }
        Ok(circuit)
    }
}

fn gate_kind_name(g: &Gate) -> &'static str {
    match g {
        Gate::Ry { .. } => "ry",
        Gate::Hadamard { .. } => "hadamard",
        Gate::S { .. } => "s",
        Gate::SDagger { .. } => "s_dagger",
        Gate::Cnot { .. } => "cnot",
        Gate::Cz { .. } => "cz",
        Gate::Exchange { .. } => "exchange",
    }
}

/// One serialized gate: `{"kind": "exchange", "sites": [0, 1], "parameter": "theta0"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub sites: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
}

pub fn run_circuit(circuit: &Circuit, params: &[f64], psi0: &StateVector) -> Result<StateVector> {
    psi0.check_qubits(circuit.qubit_count())?;
    run_gates(&circuit.bind(params)?, psi0)
}

/// Apply a fully bound gate list in order.
pub fn run_gates(gates: &[Gate], psi0: &StateVector) -> Result<StateVector> {
    let mut psi = psi0.clone();
    for g in gates {
        apply_gate_in_place(&mut psi, g)?;
    }
    Ok(psi)
}
