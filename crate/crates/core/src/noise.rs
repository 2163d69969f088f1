//! Density-matrix noise simulation.
//!
//! Every gate is applied as a unitary conjugation followed by a depolarizing
//! channel on its sites and amplitude/phase damping for the gate duration.
//! Readout error is a symmetric classical bit flip on each measured site.
//! Default rates come from averaged calibration data of a superconducting
//! processor (T1 = 29.49 μs, T2 echo = 20.63 μs, PRX fidelity 99.82 %,
//! CZ fidelity 99.01 %, readout fidelity 97.12 %).

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{estimate_with_plan, EnergyEstimate, Measurable, MeasurementBasis, MeasurementPlan, Shots};
use crate::pauli::{Observable, PauliString};
use crate::statevec::{apply_gate_raw, apply_mat2, Circuit, Gate, Mat2, StateVector};

pub const MAX_DENSITY_QUBITS: usize = 8;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Device characteristics as reported by a calibration run. Fidelities are
/// fractions, times in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareCalibration {
    pub t1_us: f64,
    pub t2_echo_us: f64,
    pub single_qubit_fidelity: f64,
    pub two_qubit_fidelity: f64,
    pub readout_fidelity: f64,
}

impl HardwareCalibration {
    /// Device-wide averages of the 20-qubit Garnet processor.
    pub fn garnet() -> Self {
        Self {
            t1_us: 29.49,
            t2_echo_us: 20.63,
            single_qubit_fidelity: 0.9982,
            two_qubit_fidelity: 0.9901,
            readout_fidelity: 0.9712,
        }
    }
}

pub const DEFAULT_GATE_TIME_1Q_NS: f64 = 40.0;
pub const DEFAULT_GATE_TIME_2Q_NS: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Symmetric 0↔1 readout flip probability per site.
    pub readout_flip_prob: f64,
    /// Depolarizing probability after each single-qubit gate.
    pub single_qubit_depol: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub two_qubit_depol: f64,
    /// Energy relaxation time; `None` disables amplitude damping.
    #[serde(default)]
    pub t1_us: Option<f64>,
    /// Dephasing time; `None` disables pure dephasing.
    #[serde(default)]
    pub t2_us: Option<f64>,
    #[serde(default = "default_1q_time")]
    pub gate_time_1q_ns: f64,
    #[serde(default = "default_2q_time")]
    pub gate_time_2q_ns: f64,
}

fn default_1q_time() -> f64 {
    DEFAULT_GATE_TIME_1Q_NS
}

fn default_2q_time() -> f64 {
    DEFAULT_GATE_TIME_2Q_NS
}

/// Depolarizing probability `p` of `ρ → (1 − p)ρ + p·I/d` whose average gate
/// fidelity is `F`: `F = 1 − p(d − 1)/d`, so `p = (1 − F)·d/(d − 1)`. For a
/// single qubit this is `2(1 − F)`.
pub fn depolarizing_from_fidelity(fidelity: f64, dim: usize) -> f64 {
    let d = dim as f64;
    (1.0 - fidelity) * d / (d - 1.0)
}

/// `1 − exp(−τ/T1)`
pub fn amplitude_damping_prob(duration_ns: f64, t1_us: f64) -> f64 {
    1.0 - (-(duration_ns * 1e-3) / t1_us).exp()
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            readout_flip_prob: 0.0,
            single_qubit_depol: 0.0,
            two_qubit_depol: 0.0,
            t1_us: None,
            t2_us: None,
            gate_time_1q_ns: DEFAULT_GATE_TIME_1Q_NS,
            gate_time_2q_ns: DEFAULT_GATE_TIME_2Q_NS,
        }
    }

    /// Readout-only model.
    pub fn readout_only(p: f64) -> Self {
        Self {
            readout_flip_prob: p,
            ..Self::noiseless()
        }
    }

    pub fn calibrate_from_table(cal: &HardwareCalibration) -> Self {
        Self {
            readout_flip_prob: 1.0 - cal.readout_fidelity,
            single_qubit_depol: depolarizing_from_fidelity(cal.single_qubit_fidelity, 2),
            two_qubit_depol: depolarizing_from_fidelity(cal.two_qubit_fidelity, 4),
            t1_us: Some(cal.t1_us),
            t2_us: Some(cal.t2_echo_us),
            gate_time_1q_ns: DEFAULT_GATE_TIME_1Q_NS,
            gate_time_2q_ns: DEFAULT_GATE_TIME_2Q_NS,
        }
    }

    pub fn garnet() -> Self {
        Self::calibrate_from_table(&HardwareCalibration::garnet())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("readout_flip_prob", self.readout_flip_prob),
            ("single_qubit_depol", self.single_qubit_depol),
            ("two_qubit_depol", self.two_qubit_depol),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        for (name, t) in [("t1_us", self.t1_us), ("t2_us", self.t2_us)] {
            if let Some(t) = t {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Config(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if let (Some(t1), Some(t2)) = (self.t1_us, self.t2_us) {
            if t2 > 2.0 * t1 {
                return Err(Error::Config(format!("unphysical coherence: T2 = {t2} > 2·T1 = {}", 2.0 * t1)));
            }
        }
        for (name, t) in [("gate_time_1q_ns", self.gate_time_1q_ns), ("gate_time_2q_ns", self.gate_time_2q_ns)] {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {t}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: NoiseModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Amplitude-damping probability for a gate of the given duration.
    pub fn damping_prob(&self, duration_ns: f64) -> f64 {
        self.t1_us
            .map_or(0.0, |t1| amplitude_damping_prob(duration_ns, t1))
    }

    /// Phase-flip probability `q` of the pure-dephasing part, chosen so that
    /// coherences decay by `1 − 2q = exp(−τ/T_φ)`, `1/T_φ = 1/T2 − 1/(2·T1)`.
    pub fn dephasing_prob(&self, duration_ns: f64) -> f64 {
        let Some(t2) = self.t2_us else { return 0.0 };
        let rate = 1.0 / t2 - self.t1_us.map_or(0.0, |t1| 0.5 / t1);
        let factor = (-(duration_ns * 1e-3) * rate.max(0.0)).exp();
        (1.0 - factor) / 2.0
    }
}

/// Mixed state on up to [`MAX_DENSITY_QUBITS`] qubits. Entry `(r, c)` lives at
/// `r + c·2^N`, so row indices act like qubits `0..N` and column indices like
/// qubits `N..2N` of a doubled register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Vec<Complex64>,
    qubit_count: usize,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let n = psi.qubit_count();
        check_size(n)?;
        let dim = psi.dim();
        let a = psi.amplitudes();
        let mut entries = vec![ZERO; dim * dim];
        for c in 0..dim {
            for r in 0..dim {
                entries[r + c * dim] = a[r] * a[c].conj();
            }
        }
        Ok(Self {
            entries,
            qubit_count: n,
        })
    }

    pub fn maximally_mixed(qubit_count: usize) -> Result<Self> {
        check_size(qubit_count)?;
        let dim = 1usize << qubit_count;
        let mut entries = vec![ZERO; dim * dim];
        for k in 0..dim {
            entries[k + k * dim] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self {
            entries,
            qubit_count,
        })
    }

    /// Build from a row-major matrix and check every density-matrix invariant.
    pub fn from_row_major(qubit_count: usize, rows: &[Complex64]) -> Result<Self> {
        check_size(qubit_count)?;
        let dim = 1usize << qubit_count;
        if rows.len() != dim * dim {
            return Err(Error::Parse(format!("expected {} entries, got {}", dim * dim, rows.len())));
        }
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r + c * dim] = rows[r * dim + c];
            }
        }
        let rho = Self {
            entries,
            qubit_count,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row + col * self.dim()]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|k| self.get(k, k)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.get(k, k).re).collect()
    }

    /// Largest `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue, via the real symmetric embedding
    /// `[[A, −B], [B, A]]` of `ρ = A + iB` (each eigenvalue appears twice).
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let mut m = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
        for r in 0..dim {
            for c in 0..dim {
                // symmetrize against round-off
                let z = (self.get(r, c) + self.get(c, r).conj()) * 0.5;
                m[(r, c)] = z.re;
                m[(r + dim, c + dim)] = z.re;
                m[(r, c + dim)] = -z.im;
                m[(r + dim, c)] = z.im;
            }
        }
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitian(herm));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::NotNormalized(tr.re));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOLERANCE {
            return Err(Error::Config(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `Tr(ρ·O)`, real part; fails on a residual imaginary part.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        if obs.qubit_count() != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: obs.qubit_count(),
                found: self.qubit_count,
            });
        }
        let dim = self.dim();
        let m = obs.to_dense();
        let mut acc = ZERO;
        for r in 0..dim {
            for c in 0..dim {
                acc += m[r * dim + c] * self.get(c, r);
            }
        }
        if acc.im.abs() > HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitian(acc.im));
        }
        Ok(acc.re)
    }

    /// Largest entrywise distance to `|ψ⟩⟨ψ|`.
    pub fn distance_to_pure(&self, psi: &StateVector) -> Result<f64> {
        let pure = DensityMatrix::from_pure(psi)?;
        if pure.qubit_count != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qubit_count,
                found: pure.qubit_count,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&pure.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn apply_unitary(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        apply_gate_raw(&mut self.entries, gate, 0, false);
        apply_gate_raw(&mut self.entries, gate, self.qubit_count, true);
        Ok(())
    }

    /// `ρ → Σ_k K_k ρ K_k†` on one site.
    pub fn apply_kraus(&mut self, site: usize, kraus: &[Mat2]) -> Result<()> {
        self.check_site(site)?;
        let n = self.qubit_count;
        let mut acc = vec![ZERO; self.entries.len()];
        for k in kraus {
            let mut term = self.entries.clone();
            apply_mat2(&mut term, site, k);
            apply_mat2(&mut term, site + n, &conj2(k));
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t;
            }
        }
        self.entries = acc;
        Ok(())
    }

    /// `ρ → (1 − p)ρ + p·Tr_S(ρ) ⊗ I/2^|S|`, written as a Pauli twirl
    /// `(1 − p)ρ + (p/4^|S|) Σ_P PρP` over all Paulis on `sites`.
    pub fn depolarize(&mut self, sites: &[usize], p: f64) -> Result<()> {
        for &s in sites {
            self.check_site(s)?;
        }
        if p == 0.0 {
            return Ok(());
        }
        let n = self.qubit_count;
        let paulis = pauli_mats();
        let count = 4usize.pow(sites.len() as u32);
        let mut acc: Vec<Complex64> = self.entries.iter().map(|z| z * (1.0 - p)).collect();
        let w = p / count as f64;
        for code in 0..count {
            let mut term = self.entries.clone();
            for (k, &s) in sites.iter().enumerate() {
                let m = &paulis[(code >> (2 * k)) & 3];
                apply_mat2(&mut term, s, m);
                apply_mat2(&mut term, s + n, &conj2(m));
            }
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t * w;
            }
        }
        self.entries = acc;
        Ok(())
    }

    pub fn amplitude_damp(&mut self, site: usize, gamma: f64) -> Result<()> {
        if gamma == 0.0 {
            return self.check_site(site);
        }
        let k0 = [[ONE, ZERO], [ZERO, Complex64::new((1.0 - gamma).sqrt(), 0.0)]];
        let k1 = [[ZERO, Complex64::new(gamma.sqrt(), 0.0)], [ZERO, ZERO]];
        self.apply_kraus(site, &[k0, k1])
    }

    /// Phase flip with probability `q`.
    pub fn dephase(&mut self, site: usize, q: f64) -> Result<()> {
        if q == 0.0 {
            return self.check_site(site);
        }
        let a = Complex64::new((1.0 - q).sqrt(), 0.0);
        let b = Complex64::new(q.sqrt(), 0.0);
        self.apply_kraus(site, &[[[a, ZERO], [ZERO, a]], [[b, ZERO], [ZERO, -b]]])
    }

    /// Unitary followed by the gate's noise channels.
    pub fn apply_noisy_gate(&mut self, gate: &Gate, model: &NoiseModel) -> Result<()> {
        self.apply_unitary(gate)?;
        let sites = gate.sites();
        let (p, duration) = if gate.is_two_qubit() {
            (model.two_qubit_depol, model.gate_time_2q_ns)
        } else {
            (model.single_qubit_depol, model.gate_time_1q_ns)
        };
        self.depolarize(&sites, p)?;
        let gamma = model.damping_prob(duration);
        let q = model.dephasing_prob(duration);
        for &s in &sites {
            self.amplitude_damp(s, gamma)?;
            self.dephase(s, q)?;
        }
        Ok(())
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.qubit_count {
            return Err(Error::InvalidSite {
                site,
                qubits: self.qubit_count,
            });
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSITY_QUBITS {
        return Err(Error::UnsupportedSize {
            size: n,
            limit: MAX_DENSITY_QUBITS,
        });
    }
    Ok(())
}

fn conj2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

fn pauli_mats() -> [Mat2; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        [[ONE, ZERO], [ZERO, ONE]],
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -i], [i, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

pub fn evolve_noisy(
    circuit: &Circuit,
    params: &[f64],
    rho0: &DensityMatrix,
    model: &NoiseModel,
) -> Result<DensityMatrix> {
    if circuit.qubit_count() != rho0.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: circuit.qubit_count(),
            found: rho0.qubit_count(),
        });
    }
    evolve_noisy_gates(&circuit.bind(params)?, rho0, model)
}

pub fn evolve_noisy_gates(
    gates: &[Gate],
    rho0: &DensityMatrix,
    model: &NoiseModel,
) -> Result<DensityMatrix> {
    model.validate()?;
    let mut rho = rho0.clone();
    for g in gates {
        rho.apply_noisy_gate(g, model)?;
    }
    Ok(rho)
}

/// Apply independent symmetric bit flips with probability `p` on every site
/// of a distribution over basis indices.
pub fn readout_confusion(probabilities: &[f64], qubit_count: usize, p: f64) -> Vec<f64> {
    let mut out = probabilities.to_vec();
    if p == 0.0 {
        return out;
    }
    for s in 0..qubit_count {
        let bit = 1usize << s;
        let prev = out.clone();
        for (k, o) in out.iter_mut().enumerate() {
            *o = (1.0 - p) * prev[k] + p * prev[k ^ bit];
        }
    }
    out
}

/// A density matrix measured through noisy basis rotations and noisy readout.
#[derive(Debug, Clone)]
pub struct NoisyState<'a> {
    pub rho: &'a DensityMatrix,
    pub model: &'a NoiseModel,
}

impl Measurable for NoisyState<'_> {
    fn qubit_count(&self) -> usize {
        self.rho.qubit_count()
    }

    fn setting_probabilities(&self, basis: &PauliString) -> Result<Vec<f64>> {
        if basis.qubit_count() != self.rho.qubit_count() {
            return Err(Error::DimensionMismatch {
                expected: self.rho.qubit_count(),
                found: basis.qubit_count(),
            });
        }
        let mut rotated = self.rho.clone();
        for g in MeasurementBasis::for_term(basis).gates() {
            rotated.apply_noisy_gate(&g, self.model)?;
        }
        Ok(readout_confusion(
            &rotated.diagonal(),
            rotated.qubit_count(),
            self.model.readout_flip_prob,
        ))
    }
}

/// Estimate `obs` on `rho` term by term. Basis rotations carry gate noise and
/// every outcome passes through the readout confusion channel; with
/// `Shots::Infinite` the exact noisy expectation is returned.
pub fn noisy_expectation(
    rho: &DensityMatrix,
    obs: &Observable,
    model: &NoiseModel,
    shots: Shots,
    seed: u64,
) -> Result<EnergyEstimate> {
    model.validate()?;
    let state = NoisyState { rho, model };
    estimate_with_plan(&state, obs, &MeasurementPlan::per_term(obs), shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_exchange;
    use crate::statevec::{init_basis_state, run_circuit};
    use approx::assert_abs_diff_eq;

    #[test]
    fn calibration_values() {
        let m = NoiseModel::garnet();
        assert_abs_diff_eq!(m.readout_flip_prob, 0.0288, epsilon = 1e-12);
        assert_abs_diff_eq!(m.single_qubit_depol, 2.0 * (1.0 - 0.9982), epsilon = 1e-12);
        assert_abs_diff_eq!(m.two_qubit_depol, 4.0 / 3.0 * (1.0 - 0.9901), epsilon = 1e-12);
        m.validate().unwrap();
        let tau = m.gate_time_2q_ns;
        assert_abs_diff_eq!(
            m.damping_prob(tau),
            1.0 - (-(tau * 1e-3) / 29.49f64).exp(),
            epsilon = 1e-15
        );
        let perfect = HardwareCalibration {
            two_qubit_fidelity: 1.0,
            ..HardwareCalibration::garnet()
        };
        assert_eq!(NoiseModel::calibrate_from_table(&perfect).two_qubit_depol, 0.0);
    }

    #[test]
    fn validation_rejects_bad_models() {
        let bad = NoiseModel {
            readout_flip_prob: 1.2,
            ..NoiseModel::noiseless()
        };
        assert!(bad.validate().is_err());
        let bad = NoiseModel {
            t1_us: Some(10.0),
            t2_us: Some(25.0),
            ..NoiseModel::noiseless()
        };
        assert!(bad.validate().is_err());
        assert!(NoiseModel::from_json(r#"{"readout_flip_prob": 2.0, "single_qubit_depol": 0, "two_qubit_depol": 0}"#).is_err());
        let ok = NoiseModel::from_json(
            r#"{"readout_flip_prob": 0.01, "single_qubit_depol": 0.001, "two_qubit_depol": 0.01, "t1_us": 30.0}"#,
        )
        .unwrap();
        assert_eq!(ok.gate_time_2q_ns, DEFAULT_GATE_TIME_2Q_NS);
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed() {
        let psi = StateVector::normalized(vec![Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.7)]).unwrap();
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        rho.depolarize(&[0], 1.0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        for (a, b) in rho.entries.iter().zip(&mixed.entries) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn amplitude_damping_population_decay() {
        let mut rho = DensityMatrix::from_pure(&init_basis_state(1, &[1]).unwrap()).unwrap();
        rho.amplitude_damp(0, 0.3).unwrap();
        assert_abs_diff_eq!(rho.get(0, 0).re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(1, 1).re, 0.7, epsilon = 1e-15);
    }

    #[test]
    fn dephasing_shrinks_coherence() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::normalized(vec![Complex64::new(h, 0.0); 2]).unwrap();
        let mut rho = DensityMatrix::from_pure(&plus).unwrap();
        rho.dephase(0, 0.1).unwrap();
        assert_abs_diff_eq!(rho.get(0, 1).re, 0.5 * 0.8, epsilon = 1e-15);
    }

    #[test]
    fn zero_noise_matches_statevector() {
        let a = build_exchange(3, 2).unwrap();
        let params = [0.37, -1.1];
        let psi = run_circuit(&a.circuit, &params, &a.initial).unwrap();
        let rho0 = DensityMatrix::from_pure(&a.initial).unwrap();
        let rho = evolve_noisy(&a.circuit, &params, &rho0, &NoiseModel::noiseless()).unwrap();
        assert!(rho.distance_to_pure(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn readout_examples() {
        let zz = Observable::from_text("1 ZZ").unwrap();
        let rho = DensityMatrix::from_pure(&init_basis_state(2, &[0, 1]).unwrap()).unwrap();
        let e = noisy_expectation(&rho, &zz, &NoiseModel::readout_only(0.0288), Shots::Infinite, 0).unwrap();
        assert_abs_diff_eq!(e.energy, -(1.0 - 2.0 * 0.0288f64).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(e.energy, -0.88811776, epsilon = 1e-8);
        let e = noisy_expectation(&rho, &zz, &NoiseModel::readout_only(0.5), Shots::Infinite, 0).unwrap();
        assert_abs_diff_eq!(e.energy, 0.0, epsilon = 1e-15);
        let e = noisy_expectation(&rho, &zz, &NoiseModel::readout_only(0.0), Shots::Finite(100), 3).unwrap();
        assert_eq!(e.energy, -1.0);
    }

    #[test]
    fn noisy_evolution_is_a_valid_state() {
        let a = build_exchange(2, 1).unwrap();
        let rho0 = DensityMatrix::from_pure(&a.initial).unwrap();
        let rho = evolve_noisy(&a.circuit, &[0.9], &rho0, &NoiseModel::garnet()).unwrap();
        rho.validate().unwrap();
        assert!(rho.min_eigenvalue() >= -PSD_TOLERANCE);
    }

    #[test]
    fn size_limits() {
        assert!(DensityMatrix::maximally_mixed(9).is_err());
        assert!(DensityMatrix::from_row_major(1, &[ONE, ZERO, ZERO, ONE]).is_err());
    }
}
