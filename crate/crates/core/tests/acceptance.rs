//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use spinchain_vqe::ansatz::{build_exchange, build_hea, neel_state, AnsatzFamily, AnsatzSpec};
use spinchain_vqe::measure::{estimate_energy, measure_setting, SettingData, Shots};
use spinchain_vqe::model::{build_hamiltonian, exact_diagonalize, magnetization_sector, HeisenbergChain};
use spinchain_vqe::noise::{evolve_noisy_gates, DensityMatrix, NoiseModel, NoisyState};
use spinchain_vqe::pauli::{exact_expectation, Observable, PauliAxis, PauliString};
use spinchain_vqe::rng::rng_from_seed;
use spinchain_vqe::runner::{
    run_sweep, Execution, ExperimentConfig, GridSpec, OptimizerSpec, Sweep, SweepResult,
};
use spinchain_vqe::statevec::{run_gates, Gate, StateVector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense matrix of a Pauli string, site 0 as the least significant factor.
fn dense_pauli(term: &PauliString) -> DMatrix<Complex64> {
    let one = |a: PauliAxis| -> DMatrix<Complex64> {
        let z = c(0.0, 0.0);
        let entries = match a {
            PauliAxis::I => [c(1.0, 0.0), z, z, c(1.0, 0.0)],
            PauliAxis::X => [z, c(1.0, 0.0), c(1.0, 0.0), z],
            PauliAxis::Y => [z, c(0.0, -1.0), c(0.0, 1.0), z],
            PauliAxis::Z => [c(1.0, 0.0), z, z, c(-1.0, 0.0)],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    };
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for &a in term.axes() {
        m = one(a).kronecker(&m);
    }
    m * c(term.coeff(), 0.0)
}

fn dense_expectation(term: &PauliString, psi: &StateVector) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    (v.adjoint() * dense_pauli(term) * &v)[(0, 0)].re
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn chain(n: usize) -> HeisenbergChain {
    HeisenbergChain::antiferro(n).unwrap()
}

fn grid_config(family: AnsatzFamily, n: usize, execution: Execution) -> ExperimentConfig {
    ExperimentConfig {
        chain: chain(n),
        ansatz: AnsatzSpec::new(family, n, 1).unwrap(),
        execution,
        sweep: Sweep::Grid(GridSpec::default()),
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let published = [(2, -3.0000), (3, -4.0000), (4, -6.4641)];
    let mut parts = Vec::new();
    for (n, e_paper) in published {
        let e = exact_diagonalize(&chain(n)).map_err(|e| e.to_string())?.ground_energy;
        ensure((e - e_paper).abs() <= 5e-4, || format!("N={n}: {e} vs {e_paper}"))?;
        parts.push(format!("N={n} {e:.4}"));
    }
    // closed form −3 − 2√3 for four sites
    let e4 = exact_diagonalize(&chain(4)).unwrap().ground_energy;
    ensure((e4 + 3.0 + 2.0 * 3f64.sqrt()).abs() < 1e-10, || format!("N=4 closed form {e4}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(parts.join(", "))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let r = run_sweep(&grid_config(AnsatzFamily::Exchange, 2, Execution::Exact)).map_err(|e| e.to_string())?;
    ensure(r.points.len() == 50, || format!("{} grid points", r.points.len()))?;
    let worst = r.points.iter().map(|p| (p.estimate.energy + 1.0).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-9, || format!("max |E + 1| = {worst:e}"))?;
    // independent oracle: e^{iθ}(cos2θ|01⟩ − i sin2θ|10⟩) against dense H;
    // |01⟩ is index 2
    let h = build_hamiltonian(&chain(2));
    let ansatz = build_exchange(2, 1).unwrap();
    for p in &r.points {
        let t = p.params[0];
        let phase = c(t.cos(), t.sin());
        let psi = StateVector::from_amplitudes(vec![
            c(0.0, 0.0),
            phase * c(0.0, -(2.0 * t).sin()),
            phase * (2.0 * t).cos(),
            c(0.0, 0.0),
        ])
        .unwrap();
        let prepared = ansatz.prepare(&[t]).unwrap();
        let overlap = prepared.inner(&psi).unwrap().norm();
        ensure((overlap - 1.0).abs() < 1e-12, || format!("state mismatch at θ={t}"))?;
        let e: f64 = h.terms().iter().map(|term| dense_expectation(term, &psi)).sum();
        ensure((e + 1.0).abs() <= 1e-9, || format!("oracle energy {e} at θ={t}"))?;
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("max |E + 1| = {worst:.1e} over 50 points"))
}

fn optimize(n: usize, layers: usize) -> Result<SweepResult, String> {
    run_sweep(&ExperimentConfig {
        chain: chain(n),
        ansatz: AnsatzSpec::new(AnsatzFamily::Expressive, n, layers).unwrap(),
        execution: Execution::Exact,
        sweep: Sweep::Optimizer(OptimizerSpec::default()),
    })
    .map_err(|e| e.to_string())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let e2 = optimize(2, 3)?.min_energy();
    ensure((e2 + 3.0).abs() <= 1e-3, || format!("N=2: {e2}"))?;
    let e3 = optimize(3, 4)?.min_energy();
    ensure(e3 <= -3.98, || format!("N=3: {e3}"))?;
    let e4 = optimize(4, 4)?.min_energy();
    ensure(e4 <= -6.0, || format!("N=4: {e4}"))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "N=2 {e2:.8} (paper -2.99999999), N=3 {e3:.5} (paper -3.98937), N=4 {e4:.5} (paper -6.06173), {:.1?}",
        start.elapsed()
    ))
}

fn criterion_4() -> Outcome {
    let mut gaps = Vec::new();
    let mut parts = Vec::new();
    for (n, paper) in [(2, -1.0), (3, -2.0), (4, -3.5678)] {
        let r = run_sweep(&grid_config(AnsatzFamily::Exchange, n, Execution::Exact)).map_err(|e| e.to_string())?;
        let h = build_hamiltonian(&chain(n));
        let neel = exact_expectation(&h, &neel_state(n).unwrap()).unwrap();
        let min = r.min_energy();
        ensure(min >= r.reference_energy - 1e-9, || format!("N={n}: {min} below exact"))?;
        ensure(min <= neel + 1e-9, || format!("N={n}: {min} above Néel {neel}"))?;
        gaps.push(r.error);
        parts.push(format!("N={n} {min:.4} (paper {paper:.4})"));
    }
    ensure(gaps.windows(2).all(|w| w[1] >= w[0] - 1e-9), || format!("gaps {gaps:?}"))?;
    Ok(format!("{}; gaps {gaps:.4?}", parts.join(", ")))
}

/// Sample standard deviation of `reps` seeded estimates and the σ_E
/// predicted from the exact per-term values.
fn spread(psi: &StateVector, reps: u64) -> (f64, f64) {
    let h = build_hamiltonian(&chain(2));
    let shots = 1500;
    let predicted: f64 = h
        .terms()
        .iter()
        .map(|t| {
            let p = dense_expectation(&t.with_coeff(1.0), psi);
            t.coeff().powi(2) * (1.0 - p * p).max(0.0) / shots as f64
        })
        .sum::<f64>()
        .sqrt();
    let samples: Vec<f64> = (0..reps)
        .map(|s| estimate_energy(psi, &h, Shots::Finite(shots), s).unwrap().energy)
        .collect();
    let mean = samples.iter().sum::<f64>() / reps as f64;
    let var = samples.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    (var.sqrt(), predicted)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let z = c(0.0, 0.0);
    let singlet = StateVector::from_amplitudes(vec![z, c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0), z]).unwrap();
    let (emp, pred) = spread(&singlet, 500);
    // every singlet parity is exactly −1: both spreads vanish
    ensure(emp == 0.0 && pred == 0.0, || format!("singlet spread {emp} vs σ_E {pred}"))?;
    let mut parts = vec![format!("singlet {emp:.1e}/{pred:.1e}")];
    let mut rng = rng_from_seed(5);
    for (label, psi) in [
        ("Néel", neel_state(2).unwrap()),
        ("HEA θ=2", build_hea(2).unwrap().prepare(&[2.0]).unwrap()),
        ("random", random_state(2, &mut rng)),
    ] {
        let (emp, pred) = spread(&psi, 500);
        let ratio = emp / pred;
        ensure((0.8..=1.25).contains(&ratio), || format!("{label}: ratio {ratio}"))?;
        parts.push(format!("{label} ratio {ratio:.3}"));
    }
    within(Duration::from_secs(30), start)?;
    Ok(parts.join(", "))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cfg = grid_config(
        AnsatzFamily::Exchange,
        2,
        Execution::Noisy { model: NoiseModel::garnet(), shots: Shots::Finite(1500), seed: 2024 },
    );
    let min = run_sweep(&cfg).map_err(|e| e.to_string())?.min_energy();
    ensure((-1.0..=-0.8).contains(&min), || format!("noisy min {min} outside [-1, -0.8]"))?;
    ensure(min > -1.0 + 1e-6, || format!("noisy min {min} not above noiseless"))?;
    within(Duration::from_secs(10), start)?;
    Ok(format!("noisy exchange min {min:.4} (hardware -0.96 ± 0.03)"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(77);
    let mut worst = 0.0f64;
    for n in 2..=6 {
        for layers in 1..=3 {
            let a = build_exchange(n, layers).unwrap();
            let sector = n / 2;
            for _ in 0..32 {
                let p: Vec<f64> = (0..layers).map(|_| rng.random_range(-PI..PI)).collect();
                let psi = a.prepare(&p).unwrap();
                // independent count: weight on basis states with the wrong number of 1 bits
                let leak: f64 = psi
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k.count_ones() as usize != sector)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                worst = worst.max(leak);
                let lib = magnetization_sector(&psi).unwrap().leakage_from(sector);
                ensure((lib - leak).abs() < 1e-12, || "sector report disagrees".into())?;
            }
        }
    }
    ensure(worst <= 1e-10, || format!("exchange leakage {worst:e}"))?;
    let hea = build_hea(2).unwrap();
    let witness = GridSpec::default()
        .values()
        .into_iter()
        .map(|t| magnetization_sector(&hea.prepare(&[t]).unwrap()).unwrap().leakage_from(1))
        .fold(0.0, f64::max);
    ensure(witness > 0.01, || format!("HEA witness {witness}"))?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("exchange leakage {worst:.1e}, HEA witness {witness:.3}"))
}

fn random_gates(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Gate> {
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

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(88);
    let axes = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let mut worst_shots = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=5);
        let psi = random_state(n, &mut rng);
        let term = PauliString::new(
            (0..n).map(|_| axes[rng.random_range(0..4)]).collect(),
            rng.random_range(-2.0..2.0),
        )
        .unwrap();
        let h = Observable::new(n, vec![term.clone()]).unwrap();
        let est = estimate_energy(&psi, &h, Shots::Infinite, 0).unwrap().energy;
        let exact = exact_expectation(&h, &psi).unwrap();
        ensure((exact - dense_expectation(&term, &psi)).abs() < 1e-12, || "dense oracle disagrees".into())?;
        worst_shots = worst_shots.max((est - exact).abs());
    }
    ensure(worst_shots <= 1e-12, || format!("infinite-shot Δ {worst_shots:e}"))?;

    let mut worst_dm = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=4);
        let gates = random_gates(n, 20, &mut rng);
        let psi0 = random_state(n, &mut rng);
        let psi = run_gates(&gates, &psi0).unwrap();
        let rho = evolve_noisy_gates(&gates, &DensityMatrix::from_pure(&psi0).unwrap(), &NoiseModel::noiseless()).unwrap();
        let dim = psi.dim();
        for r in 0..dim {
            for col in 0..dim {
                let want = psi.amplitude(r) * psi.amplitude(col).conj();
                worst_dm = worst_dm.max((rho.get(r, col) - want).norm());
            }
        }
    }
    ensure(worst_dm <= 1e-10, || format!("density-matrix Δ {worst_dm:e}"))?;
    within(Duration::from_secs(30), start)?;
    Ok(format!("infinite-shot Δ {worst_shots:.1e}, density-matrix Δ {worst_dm:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng_from_seed(99);
    let zz = PauliString::parse("ZZ", 1.0).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let psi = random_state(2, &mut rng);
        let clean = dense_expectation(&zz, &psi);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        for p in [0.0, 0.01, 0.05, 0.1, 0.5] {
            let model = NoiseModel::readout_only(p);
            let state = NoisyState { rho: &rho, model: &model };
            let SettingData::Exact { probabilities: q, .. } = measure_setting(&state, &zz, Shots::Infinite, 0).unwrap() else {
                return Err("expected exact setting data".into());
            };
            let noisy = q[0] - q[1] - q[2] + q[3];
            worst = worst.max((noisy - (1.0 - 2.0 * p).powi(2) * clean).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} over p ∈ {{0, 0.01, 0.05, 0.1, 0.5}}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 exact energies", criterion_1),
        ("2 exchange N=2 flat at -1", criterion_2),
        ("3 expressive optimizer", criterion_3),
        ("4 exchange N=3,4 properties", criterion_4),
        ("5 shot statistics", criterion_5),
        ("6 noisy bracket", criterion_6),
        ("7 symmetry suite", criterion_7),
        ("8 oracle equivalence", criterion_8),
        ("9 readout scaling law", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
