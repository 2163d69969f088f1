//! Cross-module invariant battery behind `spinvqe validate`.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{build_hea, AnsatzFamily, AnsatzSpec};
use crate::error::Result;
use crate::measure::{estimate_energy, measure_setting, SettingData, Shots, DEFAULT_SHOTS};
use crate::model::{build_hamiltonian, exact_diagonalize, magnetization_sector, HeisenbergChain};
use crate::noise::{evolve_noisy_gates, DensityMatrix, NoiseModel, NoisyState};
use crate::pauli::{exact_expectation, term_expectation, Observable, PauliAxis, PauliString};
use crate::rng::rng_from_seed;
use crate::runner::{
    run_sweep, run_sweep_batched, Execution, ExperimentConfig, GridSpec, Sweep,
};
use crate::statevec::{run_gates, Gate, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Print one line per check; returns whether all passed.
pub fn print_outcomes(outcomes: &[CheckOutcome]) -> bool {
    for o in outcomes {
        println!(
            "{} {:<28} {} [{:.2}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            o.seconds
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} checks, {failed} failed", outcomes.len());
    failed == 0
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).expect("non-zero random vector")
}

pub fn random_term(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let axes = (0..n)
        .map(|_| [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z][rng.random_range(0..4)])
        .collect();
    PauliString::new(axes, rng.random_range(-2.0..2.0)).expect("finite coefficient")
}

pub fn random_gates(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Gate> {
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            let angle = rng.random_range(-PI..PI);
            match rng.random_range(0..7) {
                0 => Gate::Ry { site: a, angle },
                1 => Gate::Hadamard { site: a },
                2 => Gate::S { site: a },
                3 => Gate::SDagger { site: a },
                4 => Gate::Cnot { control: a, target: b },
                5 => Gate::Cz { a, b },
                _ => Gate::Exchange { angle, i: a, j: b },
            }
        })
        .collect()
}

fn chain(n: usize) -> HeisenbergChain {
    HeisenbergChain::antiferro(n).expect("n ≥ 2")
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckOutcome {
    let t = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckOutcome { name, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

fn config_rejection(noise_config: Option<&Path>) -> Result<(bool, String)> {
    let bad = NoiseModel { readout_flip_prob: 1.5, ..NoiseModel::garnet() };
    let cfg = ExperimentConfig {
        chain: chain(2),
        ansatz: AnsatzSpec::new(AnsatzFamily::Exchange, 2, 1)?,
        execution: Execution::Noisy { model: bad, shots: Shots::Finite(10), seed: 0 },
        sweep: Sweep::Grid(GridSpec::default()),
    };
    let rejected = cfg.validate().is_err() && run_sweep(&cfg).is_err();
    let mut detail = format!("p_ro = 1.5 rejected: {rejected}");
    let mut ok = rejected;
    if let Some(path) = noise_config {
        match NoiseModel::load(path) {
            Ok(_) => detail.push_str(&format!("; {} valid", path.display())),
            Err(e) => {
                ok = false;
                detail.push_str(&format!("; {}: {e}", path.display()));
            }
        }
    }
    Ok((ok, detail))
}

fn symmetry(quick: bool) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(101);
    let (max_n, vectors) = if quick { (4, 8) } else { (6, 32) };
    let mut worst = 0.0f64;
    for n in 2..=max_n {
        for layers in 1..=3 {
            let a = AnsatzSpec::new(AnsatzFamily::Exchange, n, layers)?.build()?;
            for _ in 0..vectors {
                let p: Vec<f64> = (0..layers).map(|_| rng.random_range(-PI..PI)).collect();
                worst = worst.max(magnetization_sector(&a.prepare(&p)?)?.leakage_from(n / 2));
            }
        }
    }
    let hea = build_hea(2)?;
    let mut witness = 0.0f64;
    for t in GridSpec::default().values() {
        witness = witness.max(magnetization_sector(&hea.prepare(&[t])?)?.leakage_from(1));
    }
    Ok((
        worst <= 1e-10 && witness > 0.01,
        format!("exchange leakage {worst:.1e}, HEA witness {witness:.3}"),
    ))
}

/// Empirical spread of repeated energy estimates against the propagated σ_E.
pub fn variance_ratio(psi: &StateVector, obs: &Observable, shots: u32, reps: usize, seed: u64) -> Result<(f64, f64)> {
    let mut predicted = 0.0;
    for t in obs.terms() {
        let p = term_expectation(&t.with_coeff(1.0), psi)?;
        predicted += t.coeff().powi(2) * (1.0 - p * p).max(0.0) / shots as f64;
    }
    let samples = (0..reps)
        .map(|r| Ok(estimate_energy(psi, obs, Shots::Finite(shots), seed.wrapping_add(r as u64))?.energy))
        .collect::<Result<Vec<f64>>>()?;
    let mean = samples.iter().sum::<f64>() / reps as f64;
    let var = samples.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    Ok((var.sqrt(), predicted.sqrt()))
}

fn singlet() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    StateVector::from_amplitudes(vec![z, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), z])
        .expect("normalized")
}

fn variance_calibration(quick: bool) -> Result<(bool, String)> {
    let reps = if quick { 200 } else { 500 };
    let h = build_hamiltonian(&chain(2));
    // every parity of the singlet is −1, so both spreads vanish
    let (emp_s, pred_s) = variance_ratio(&singlet(), &h, DEFAULT_SHOTS, reps, 1)?;
    let mut ok = emp_s == 0.0 && pred_s == 0.0;
    let mut detail = format!("singlet {emp_s:.1e}/{pred_s:.1e}");
    let mut rng = rng_from_seed(7);
    for (label, psi) in [
        ("neel", crate::ansatz::neel_state(2)?),
        ("random", random_state(2, &mut rng)),
    ] {
        let (emp, pred) = variance_ratio(&psi, &h, DEFAULT_SHOTS, reps, 1000)?;
        let ratio = emp / pred;
        ok &= (0.8..=1.25).contains(&ratio);
        detail.push_str(&format!(", {label} ratio {ratio:.3}"));
    }
    Ok((ok, detail))
}

fn noiseless_limit(quick: bool) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(23);
    let (pairs, circuits) = if quick { (20, 10) } else { (100, 50) };
    let mut worst_shots = 0.0f64;
    for _ in 0..pairs {
        let n = rng.random_range(1..=5);
        let psi = random_state(n, &mut rng);
        let term = random_term(n, &mut rng);
        let SettingData::Exact { probabilities, .. } = measure_setting(&psi, &term, Shots::Infinite, 0)? else {
            unreachable!("infinite shots give exact data")
        };
        let mask = term.support_mask();
        let parity: f64 = probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| if (k & mask).count_ones().is_multiple_of(2) { *p } else { -*p })
            .sum();
        let obs = Observable::new(n, vec![term.clone()])?;
        worst_shots = worst_shots.max((term.coeff() * parity - exact_expectation(&obs, &psi)?).abs());
    }
    let mut worst_dm = 0.0f64;
    for _ in 0..circuits {
        let n = rng.random_range(2..=4);
        let gates = random_gates(n, 16, &mut rng);
        let psi0 = random_state(n, &mut rng);
        let psi = run_gates(&gates, &psi0)?;
        let rho = evolve_noisy_gates(&gates, &DensityMatrix::from_pure(&psi0)?, &NoiseModel::noiseless())?;
        worst_dm = worst_dm.max(rho.distance_to_pure(&psi)?);
    }
    Ok((
        worst_shots <= 1e-12 && worst_dm <= 1e-10,
        format!("infinite-shot Δ {worst_shots:.1e}, density-matrix Δ {worst_dm:.1e}"),
    ))
}

fn variational_bound(quick: bool) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(31);
    let max_n = if quick { 4 } else { 6 };
    let mut worst = f64::INFINITY;
    for n in 2..=max_n {
        let h = build_hamiltonian(&chain(n));
        let e0 = exact_diagonalize(&chain(n))?.ground_energy;
        for spec in [
            AnsatzSpec::new(AnsatzFamily::Hea, n, 1)?,
            AnsatzSpec::new(AnsatzFamily::Exchange, n, 2)?,
            AnsatzSpec::new(AnsatzFamily::Expressive, n, 2)?,
        ] {
            let a = spec.build()?;
            for _ in 0..20 {
                let p: Vec<f64> = (0..a.parameter_count()).map(|_| rng.random_range(-PI..PI)).collect();
                worst = worst.min(exact_expectation(&h, &a.prepare(&p)?)? - e0);
            }
        }
    }
    Ok((worst >= -1e-9, format!("min E − E0 = {worst:.3e}")))
}

fn readout_law() -> Result<(bool, String)> {
    let mut rng = rng_from_seed(41);
    let psi = random_state(2, &mut rng);
    let zz = PauliString::parse("ZZ", 1.0)?;
    let clean = term_expectation(&zz, &psi)?;
    let rho = DensityMatrix::from_pure(&psi)?;
    let mut worst = 0.0f64;
    for p in [0.0, 0.01, 0.05, 0.1, 0.5] {
        let model = NoiseModel::readout_only(p);
        let state = NoisyState { rho: &rho, model: &model };
        let SettingData::Exact { probabilities, .. } = measure_setting(&state, &zz, Shots::Infinite, 0)? else {
            unreachable!("infinite shots give exact data")
        };
        let noisy = probabilities[0] - probabilities[1] - probabilities[2] + probabilities[3];
        worst = worst.max((noisy - (1.0 - 2.0 * p).powi(2) * clean).abs());
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.1e}")))
}

fn determinism_and_batching() -> Result<(bool, String)> {
    let mut ok = true;
    for execution in [
        Execution::Sampled { shots: 500, seed: 9 },
        Execution::Noisy { model: NoiseModel::garnet(), shots: Shots::Finite(500), seed: 9 },
    ] {
        let cfg = ExperimentConfig {
            chain: chain(3),
            ansatz: AnsatzSpec::new(AnsatzFamily::Hea, 3, 1)?,
            execution,
            sweep: Sweep::Grid(GridSpec { points: 12, ..GridSpec::default() }),
        };
        let a = run_sweep(&cfg)?;
        ok &= a == run_sweep(&cfg)? && a == run_sweep_batched(&cfg)?;
    }
    Ok((ok, "repeat and batched runs bit-identical".into()))
}

fn monotone_gap() -> Result<(bool, String)> {
    let mut gaps = Vec::new();
    for n in 2..=4 {
        let cfg = ExperimentConfig {
            chain: chain(n),
            ansatz: AnsatzSpec::new(AnsatzFamily::Exchange, n, 1)?,
            execution: Execution::Exact,
            sweep: Sweep::Grid(GridSpec::default()),
        };
        gaps.push(run_sweep(&cfg)?.error);
    }
    let ok = gaps.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    Ok((ok, format!("gaps {gaps:.4?}")))
}

/// Run every check; `quick` shrinks sizes and repetition counts.
pub fn run_battery(quick: bool, noise_config: Option<&Path>) -> Vec<CheckOutcome> {
    vec![
        timed("config validation", || config_rejection(noise_config)),
        timed("symmetry conservation", || symmetry(quick)),
        timed("variance calibration", || variance_calibration(quick)),
        timed("noiseless-limit equivalence", || noiseless_limit(quick)),
        timed("variational bound", || variational_bound(quick)),
        timed("readout scaling law", readout_law),
        timed("determinism and batching", determinism_and_batching),
        timed("monotone exchange gap", monotone_gap),
    ]
}
