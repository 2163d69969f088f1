//! Shot-based Pauli measurement.
//!
//! A term is measured by rotating its eigenbasis onto the computational basis
//! (`X` → H, `Y` → S† then H, `Z`/`I` → nothing), sampling bitstrings from the
//! Born distribution, and reading the eigenvalue as the parity of the bits on
//! the term's support. For `±1` outcomes the plug-in variance of the mean is
//! `(1 − p̂²)/shots`; independent terms add in quadrature.

use std::collections::BTreeMap;
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Observable, PauliAxis, PauliString};
use crate::rng::{derive_seed, rng_from_seed};
use crate::statevec::{apply_gate_in_place, index_bits, Gate, StateVector};

/// Shot count per measurement setting; `Infinite` evaluates the exact
/// outcome distribution instead of sampling it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shots {
    Finite(u32),
    Infinite,
}

impl Shots {
    pub fn finite(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(Shots::Finite(n))
    }
}

/// Default shot budget per circuit.
pub const DEFAULT_SHOTS: u32 = 1500;

/// Pre-measurement rotations for one Pauli setting.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    axes: Vec<PauliAxis>,
}

impl MeasurementBasis {
    pub fn for_term(term: &PauliString) -> Self {
        Self {
            axes: term.axes().to_vec(),
        }
    }

    pub fn gates(&self) -> Vec<Gate> {
        let mut gates = Vec::new();
        for (site, axis) in self.axes.iter().enumerate() {
            match axis {
                PauliAxis::X => gates.push(Gate::Hadamard { site }),
                PauliAxis::Y => {
                    gates.push(Gate::SDagger { site });
                    gates.push(Gate::Hadamard { site });
                }
                PauliAxis::Z | PauliAxis::I => {}
            }
        }
        gates
    }
}

pub fn rotate_for_basis(psi: &StateVector, term: &PauliString) -> Result<StateVector> {
    psi.check_qubits(term.qubit_count())?;
    let mut out = psi.clone();
    for g in MeasurementBasis::for_term(term).gates() {
        apply_gate_in_place(&mut out, &g)?;
    }
    Ok(out)
}

/// Sampled outcomes of one measurement setting. Bitstrings are basis
/// indices (site 0 least significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub bitstrings: Vec<u32>,
    pub shots: u32,
    pub basis: PauliString,
    pub seed: u64,
    qubit_count: usize,
}

impl ShotRecord {
    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn counts(&self) -> BTreeMap<u32, u64> {
        let mut counts = BTreeMap::new();
        for &b in &self.bitstrings {
            *counts.entry(b).or_insert(0) += 1;
        }
        counts
    }

    /// Append `seed,basis,bitstring,count` rows (no header).
    pub fn write_csv_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        for (b, n) in self.counts() {
            w.write_record([
                self.seed.to_string(),
                self.basis.axes_string(),
                index_bits(b as usize, self.qubit_count),
                n.to_string(),
            ])?;
        }
        Ok(())
    }

    pub fn to_csv(records: &[ShotRecord]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["seed", "basis", "bitstring", "count"])?;
        for r in records {
            r.write_csv_rows(&mut w)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Draw `shots` outcomes from an explicit distribution over basis indices.
pub fn sample_distribution(
    probabilities: &[f64],
    qubit_count: usize,
    basis: &PauliString,
    shots: u32,
    seed: u64,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let weights = probabilities.iter().map(|p| p.max(0.0));
    let dist = WeightedIndex::new(weights)
        .map_err(|e| Error::Config(format!("invalid outcome distribution: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let bitstrings = (0..shots).map(|_| dist.sample(&mut rng) as u32).collect();
    Ok(ShotRecord {
        bitstrings,
        shots,
        basis: basis.with_coeff(1.0),
        seed,
        qubit_count,
    })
}

/// Sample a state that has already been rotated into `basis`.
pub fn sample_shots(
    psi: &StateVector,
    basis: &PauliString,
    shots: u32,
    seed: u64,
) -> Result<ShotRecord> {
    if !psi.is_normalized() {
        return Err(Error::NotNormalized(psi.norm_sqr()));
    }
    psi.check_qubits(basis.qubit_count())?;
    sample_distribution(&psi.probabilities(), psi.qubit_count(), basis, shots, seed)
}

fn parity(index: usize, mask: usize) -> f64 {
    if (index & mask).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A term is readable from a setting when each of its non-identity axes
/// matches the setting's axis on that site.
fn readable_from(term: &PauliString, basis: &PauliString) -> bool {
    term.qubit_count() == basis.qubit_count()
        && term
            .axes()
            .iter()
            .zip(basis.axes())
            .all(|(t, b)| *t == PauliAxis::I || t == b)
}

fn check_readable(term: &PauliString, basis: &PauliString) -> Result<()> {
    if readable_from(term, basis) {
        Ok(())
    } else {
        Err(Error::BasisMismatch {
            term: term.axes_string(),
            basis: basis.axes_string(),
        })
    }
}

/// `(coeff·p̂, coeff²·(1 − p̂²)/shots)` where `p̂` is the mean parity.
pub fn estimate_term(record: &ShotRecord, term: &PauliString) -> Result<(f64, f64)> {
    check_readable(term, &record.basis)?;
    let mask = term.support_mask();
    let sum: f64 = record
        .bitstrings
        .iter()
        .map(|&b| parity(b as usize, mask))
        .sum();
    let p_hat = sum / f64::from(record.shots);
    let c = term.coeff();
    Ok((c * p_hat, c * c * (1.0 - p_hat * p_hat) / f64::from(record.shots)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub term: PauliString,
    pub estimate: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    /// One standard deviation.
    pub sigma: f64,
    pub per_term: Vec<TermEstimate>,
}

impl EnergyEstimate {
    pub fn exact(energy: f64) -> Self {
        Self {
            energy,
            sigma: 0.0,
            per_term: Vec::new(),
        }
    }
}

/// One measurement setting and the observable terms read from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub basis: PauliString,
    pub terms: Vec<usize>,
}

/// Assignment of observable terms to measurement settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub settings: Vec<Setting>,
}

impl MeasurementPlan {
    /// Every term in its own setting.
    pub fn per_term(obs: &Observable) -> Self {
        let settings = obs
            .terms()
            .iter()
            .enumerate()
            .map(|(k, t)| Setting {
                basis: t.with_coeff(1.0),
                terms: vec![k],
            })
            .collect();
        Self { settings }
    }

    /// Greedy qubit-wise grouping: a term joins the first setting whose axes
    /// agree with it on every site where both are non-identity. For a
    /// Heisenberg chain this yields the three global settings `X…X`, `Y…Y`,
    /// `Z…Z`, with every bond read from the matching one. With two sites the
    /// result coincides with [`per_term`](Self::per_term).
    pub fn qubit_wise(obs: &Observable) -> Self {
        let mut settings: Vec<(Vec<PauliAxis>, Vec<usize>)> = Vec::new();
        for (k, t) in obs.terms().iter().enumerate() {
            let slot = settings.iter_mut().find(|(axes, _)| {
                axes.iter()
                    .zip(t.axes())
                    .all(|(a, b)| *a == PauliAxis::I || *b == PauliAxis::I || a == b)
            });
            match slot {
                Some((axes, terms)) => {
                    for (a, b) in axes.iter_mut().zip(t.axes()) {
                        if *a == PauliAxis::I {
                            *a = *b;
                        }
                    }
                    terms.push(k);
                }
                None => settings.push((t.axes().to_vec(), vec![k])),
            }
        }
        let settings = settings
            .into_iter()
            .map(|(axes, terms)| Setting {
                basis: PauliString::new(axes, 1.0).expect("non-empty axes"),
                terms,
            })
            .collect();
        Self { settings }
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }
}

/// Anything that can produce the outcome distribution of a measurement
/// setting.
pub trait Measurable {
    fn qubit_count(&self) -> usize;

    /// Probabilities of each basis index after rotating into `basis` and
    /// reading out.
    fn setting_probabilities(&self, basis: &PauliString) -> Result<Vec<f64>>;
}

impl Measurable for StateVector {
    fn qubit_count(&self) -> usize {
        StateVector::qubit_count(self)
    }

    fn setting_probabilities(&self, basis: &PauliString) -> Result<Vec<f64>> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized(self.norm_sqr()));
        }
        Ok(rotate_for_basis(self, basis)?.probabilities())
    }
}

/// Raw outcome of one setting: sampled shots or the exact distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SettingData {
    Sampled(ShotRecord),
    Exact {
        basis: PauliString,
        probabilities: Vec<f64>,
    },
}

impl SettingData {
    pub fn basis(&self) -> &PauliString {
        match self {
            SettingData::Sampled(r) => &r.basis,
            SettingData::Exact { basis, .. } => basis,
        }
    }
}

pub fn measure_setting<M: Measurable + ?Sized>(
    state: &M,
    basis: &PauliString,
    shots: Shots,
    seed: u64,
) -> Result<SettingData> {
    let probabilities = state.setting_probabilities(basis)?;
    match shots {
        Shots::Infinite => Ok(SettingData::Exact {
            basis: basis.with_coeff(1.0),
            probabilities,
        }),
        Shots::Finite(n) => Ok(SettingData::Sampled(sample_distribution(
            &probabilities,
            state.qubit_count(),
            basis,
            n,
            seed,
        )?)),
    }
}

/// Per-term estimates from one setting, plus the variance of their sum.
/// With several terms in a setting the sum's variance is the plug-in sample
/// variance of the per-shot weighted parity sum, which carries the
/// covariance between terms; for a lone term it is the term's own variance.
fn estimate_from_setting(
    data: &SettingData,
    terms: &[&PauliString],
) -> Result<(Vec<TermEstimate>, f64)> {
    for t in terms {
        check_readable(t, data.basis())?;
    }
    match data {
        SettingData::Exact { probabilities, .. } => {
            let ests = terms
                .iter()
                .map(|t| {
                    let mask = t.support_mask();
                    let p: f64 = probabilities
                        .iter()
                        .enumerate()
                        .map(|(k, &w)| w * parity(k, mask))
                        .sum();
                    TermEstimate {
                        term: (*t).clone(),
                        estimate: t.coeff() * p,
                        variance: 0.0,
                    }
                })
                .collect();
            Ok((ests, 0.0))
        }
        SettingData::Sampled(record) => {
            let mut ests = Vec::with_capacity(terms.len());
            for t in terms {
                let (estimate, variance) = estimate_term(record, t)?;
                ests.push(TermEstimate {
                    term: (*t).clone(),
                    estimate,
                    variance,
                });
            }
            let var = if terms.len() == 1 {
                ests[0].variance
            } else {
                let masks: Vec<(usize, f64)> =
                    terms.iter().map(|t| (t.support_mask(), t.coeff())).collect();
                let (mut s1, mut s2) = (0.0, 0.0);
                for &b in &record.bitstrings {
                    let s: f64 = masks.iter().map(|&(m, c)| c * parity(b as usize, m)).sum();
                    s1 += s;
                    s2 += s * s;
                }
                let n = f64::from(record.shots);
                let mean = s1 / n;
                ((s2 / n - mean * mean).max(0.0)) / n
            };
            Ok((ests, var))
        }
    }
}

/// Combine per-setting data into an energy estimate. `data[j]` must belong
/// to `plan.settings[j]`.
pub fn combine_settings(
    obs: &Observable,
    plan: &MeasurementPlan,
    data: &[SettingData],
) -> Result<EnergyEstimate> {
    if data.len() != plan.settings.len() {
        return Err(Error::Config(format!(
            "{} settings planned, {} measured",
            plan.settings.len(),
            data.len()
        )));
    }
    let mut per_term: Vec<Option<TermEstimate>> = vec![None; obs.terms().len()];
    let mut var_total = 0.0;
    for (setting, d) in plan.settings.iter().zip(data) {
        let terms: Vec<&PauliString> = setting.terms.iter().map(|&k| &obs.terms()[k]).collect();
        let (ests, var) = estimate_from_setting(d, &terms)?;
        var_total += var;
        for (&k, e) in setting.terms.iter().zip(ests) {
            per_term[k] = Some(e);
        }
    }
    let per_term: Vec<TermEstimate> = per_term
        .into_iter()
        .map(|e| e.ok_or_else(|| Error::Config("measurement plan misses a term".into())))
        .collect::<Result<_>>()?;
    Ok(EnergyEstimate {
        energy: per_term.iter().map(|t| t.estimate).sum(),
        sigma: var_total.sqrt(),
        per_term,
    })
}

/// Setting `j` is sampled with seed `derive_seed(seed, [j])`.
pub fn estimate_with_plan<M: Measurable + ?Sized>(
    state: &M,
    obs: &Observable,
    plan: &MeasurementPlan,
    shots: Shots,
    seed: u64,
) -> Result<EnergyEstimate> {
    if state.qubit_count() != obs.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: obs.qubit_count(),
            found: state.qubit_count(),
        });
    }
    let data = plan
        .settings
        .iter()
        .enumerate()
        .map(|(j, s)| measure_setting(state, &s.basis, shots, derive_seed(seed, &[j as u64])))
        .collect::<Result<Vec<_>>>()?;
    combine_settings(obs, plan, &data)
}

/// Measure every term independently with its own shot budget.
pub fn estimate_energy(
    psi: &StateVector,
    obs: &Observable,
    shots_per_term: Shots,
    seed: u64,
) -> Result<EnergyEstimate> {
    estimate_with_plan(psi, obs, &MeasurementPlan::per_term(obs), shots_per_term, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{exact_expectation, term_expectation};
    use crate::statevec::init_basis_state;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn zz() -> PauliString {
        PauliString::parse("ZZ", 1.0).unwrap()
    }

    fn bell_phi_plus() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)])
            .unwrap()
    }

    #[test]
    fn basis_rotation_examples() {
        let psi = bell_phi_plus();
        assert_eq!(rotate_for_basis(&psi, &zz()).unwrap(), psi);
        let xx = PauliString::parse("XX", 1.0).unwrap();
        let rotated = rotate_for_basis(&psi, &xx).unwrap();
        let p = rotated.probabilities();
        // even parity outcomes: indices 0 and 3
        assert_abs_diff_eq!(p[0] + p[3], 1.0, epsilon = 1e-14);
        let yy = PauliString::parse("YY", 1.0).unwrap();
        let zero = init_basis_state(2, &[0, 0]).unwrap();
        let data = measure_setting(&zero, &yy, Shots::Infinite, 0).unwrap();
        let (est, _) = estimate_from_setting(&data, &[&yy]).unwrap();
        assert_abs_diff_eq!(est[0].estimate, 0.0, epsilon = 1e-14);
        let rec = sample_shots(&rotate_for_basis(&zero, &yy).unwrap(), &yy, 20_000, 3).unwrap();
        let (e, v) = estimate_term(&rec, &yy).unwrap();
        assert!(e.abs() < 5.0 * v.sqrt());
    }

    #[test]
    fn deterministic_state_sampling() {
        let psi = init_basis_state(2, &[0, 1]).unwrap();
        let rec = sample_shots(&psi, &zz(), 100, 9).unwrap();
        assert!(rec.bitstrings.iter().all(|&b| b == 2));
        assert_eq!(rec.bitstrings.len(), 100);
        assert_eq!(rec, sample_shots(&psi, &zz(), 100, 9).unwrap());
        assert!(matches!(
            sample_shots(&psi, &zz(), 0, 9),
            Err(Error::ZeroShots)
        ));
        assert!(matches!(Shots::finite(0), Err(Error::ZeroShots)));
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let psi = StateVector::normalized(vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        let rec = sample_shots(&psi, &zz(), 100_000, 5).unwrap();
        for (_, n) in rec.counts() {
            assert!((n as f64 / 1e5 - 0.25).abs() < 0.01);
        }
    }

    fn record_with_parity_mean(p_hat: f64, shots: u32) -> ShotRecord {
        let plus = ((1.0 + p_hat) / 2.0 * f64::from(shots)).round() as u32;
        let bitstrings = (0..shots).map(|k| if k < plus { 0 } else { 1 }).collect();
        ShotRecord {
            bitstrings,
            shots,
            basis: zz(),
            seed: 0,
            qubit_count: 2,
        }
    }

    #[test]
    fn term_estimate_formulas() {
        let rec = record_with_parity_mean(1.0, 50);
        assert_eq!(estimate_term(&rec, &zz()).unwrap(), (1.0, 0.0));
        let rec = record_with_parity_mean(0.0, 1500);
        let (e, v) = estimate_term(&rec, &zz()).unwrap();
        assert_eq!(e, 0.0);
        assert_abs_diff_eq!(v, 1.0 / 1500.0, epsilon = 1e-18);
        let rec = record_with_parity_mean(0.5, 100);
        let (e, v) = estimate_term(&rec, &zz().with_coeff(2.0)).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.03, epsilon = 1e-15);
        assert!(matches!(
            estimate_term(&rec, &PauliString::parse("XX", 1.0).unwrap()),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn single_zz_observable_is_exact_on_neel() {
        let obs = Observable::new(2, vec![zz()]).unwrap();
        let psi = init_basis_state(2, &[0, 1]).unwrap();
        for shots in [1, 10, 1500] {
            let e = estimate_energy(&psi, &obs, Shots::Finite(shots), 1).unwrap();
            assert_eq!(e.energy, -1.0);
            assert_eq!(e.sigma, 0.0);
        }
    }

    #[test]
    fn propagation_is_sum_of_term_variances() {
        let obs = Observable::from_text("1 XX\n1 YY\n1 ZZ\n0.5 XZ").unwrap();
        let psi = StateVector::normalized(
            (0..4).map(|k| Complex64::new(1.0 + k as f64, 0.3 * k as f64)).collect(),
        )
        .unwrap();
        let e = estimate_energy(&psi, &obs, Shots::Finite(700), 21).unwrap();
        let total: f64 = e.per_term.iter().map(|t| t.variance).sum();
        assert_eq!(e.sigma * e.sigma, total.sqrt() * total.sqrt());
        assert_eq!(e.sigma, total.sqrt());
        for t in &e.per_term {
            assert!(t.estimate.abs() <= t.term.coeff().abs());
        }
    }

    #[test]
    fn infinite_shots_match_exact_expectation() {
        let obs = Observable::from_text("1 XYZ\n-0.5 YYI\n2 ZIX").unwrap();
        let psi = StateVector::normalized(
            (0..8)
                .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.7).cos()))
                .collect(),
        )
        .unwrap();
        let e = estimate_energy(&psi, &obs, Shots::Infinite, 0).unwrap();
        assert_abs_diff_eq!(e.energy, exact_expectation(&obs, &psi).unwrap(), epsilon = 1e-12);
        for t in &e.per_term {
            assert_abs_diff_eq!(
                t.estimate,
                term_expectation(&t.term, &psi).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn qubit_wise_plan_for_chain() {
        let mut text = String::new();
        for i in 0..3 {
            for a in ['X', 'Y', 'Z'] {
                let mut axes = ['I'; 4];
                axes[i] = a;
                axes[i + 1] = a;
                text.push_str(&format!("1 {}\n", axes.iter().collect::<String>()));
            }
        }
        let obs = Observable::from_text(&text).unwrap();
        let plan = MeasurementPlan::qubit_wise(&obs);
        let bases: Vec<_> = plan.settings.iter().map(|s| s.basis.axes_string()).collect();
        assert_eq!(bases, ["XXXX", "YYYY", "ZZZZ"]);
        let two = Observable::from_text("1 XX\n1 YY\n1 ZZ").unwrap();
        assert_eq!(MeasurementPlan::qubit_wise(&two), MeasurementPlan::per_term(&two));
    }

    #[test]
    fn csv_export() {
        let psi = init_basis_state(2, &[0, 1]).unwrap();
        let rec = sample_shots(&psi, &zz(), 10, 4).unwrap();
        let csv = ShotRecord::to_csv(&[rec]).unwrap();
        assert_eq!(csv, "seed,basis,bitstring,count\n4,ZZ,01,10\n");
    }
}
