//! Experiment orchestration: fixed parameter sweeps, batched execution,
//! gradient-free optimization, and report assembly.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{neel_bits, Ansatz, AnsatzFamily, AnsatzSpec};
use crate::error::{Error, Result};
use crate::measure::{
    combine_settings, estimate_with_plan, measure_setting, EnergyEstimate, MeasurementPlan,
    SettingData, Shots, TermEstimate,
};
use crate::model::{build_hamiltonian, exact_diagonalize, HeisenbergChain};
use crate::noise::{evolve_noisy_gates, DensityMatrix, NoiseModel, NoisyState, MAX_DENSITY_QUBITS};
use crate::pauli::{exact_expectation, term_expectation, Observable, PauliString};
use crate::rng::{derive_seed, rng_from_seed};
use crate::statevec::{init_basis_state, run_gates, Gate, StateVector};

/// Upper bound on the number of points in a (possibly multi-parameter) grid.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Execution {
    /// Analytic expectation values, no sampling.
    Exact,
    /// Shot sampling of the ideal state.
    Sampled { shots: u32, seed: u64 },
    /// Density-matrix evolution with gate and readout noise.
    Noisy {
        model: NoiseModel,
        shots: Shots,
        seed: u64,
    },
}

impl Execution {
    pub fn seed(&self) -> u64 {
        match *self {
            Execution::Exact => 0,
            Execution::Sampled { seed, .. } | Execution::Noisy { seed, .. } => seed,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Execution::Exact => "exact",
            Execution::Sampled { .. } => "sampled",
            Execution::Noisy { .. } => "noisy",
        }
    }

    /// True when every estimate is free of sampling noise.
    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            Execution::Exact
                | Execution::Noisy {
                    shots: Shots::Infinite,
                    ..
                }
        )
    }

    fn shots(&self) -> Shots {
        match *self {
            Execution::Exact => Shots::Infinite,
            Execution::Sampled { shots, .. } => Shots::Finite(shots),
            Execution::Noisy { shots, .. } => shots,
        }
    }
}

/// `points` evenly spaced values from `start` to `end` inclusive, applied to
/// every parameter (cartesian product, first parameter slowest).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: PI,
            points: 50,
        }
    }
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.end
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {}", self.points)));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::Config("grid range must be finite".into()));
        }
        Ok(())
    }

    /// All parameter vectors in lexicographic order.
    pub fn points_for(&self, parameter_count: usize) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        let total = (self.points as f64).powi(parameter_count as i32);
        if total > MAX_GRID_POINTS as f64 {
            return Err(Error::Config(format!(
                "a {}-point grid over {parameter_count} parameters has {total} points (limit {MAX_GRID_POINTS})",
                self.points
            )));
        }
        let values = self.values();
        let mut out = vec![Vec::new()];
        for _ in 0..parameter_count {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `start:end:points`, where `start`/`end` accept a trailing `pi`
    /// (`0:pi:50`, `0:2pi:101`).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid {s:?} is not start:end:points")));
        };
        let spec = GridSpec {
            start: parse_angle(a)?,
            end: parse_angle(b)?,
            points: n
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("grid points {n:?}: {e}")))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.points)
    }
}

fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim().to_ascii_lowercase();
    let err = |e: String| Error::Parse(format!("angle {s:?}: {e}"));
    if let Some(prefix) = s.strip_suffix("pi") {
        let prefix = prefix.trim_end_matches('*');
        let k = match prefix {
            "" => 1.0,
            "-" => -1.0,
            p => p.parse::<f64>().map_err(|e| err(e.to_string()))?,
        };
        Ok(k * PI)
    } else {
        s.parse::<f64>().map_err(|e| err(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMethod {
    /// Cyclic coordinate descent; each coordinate is bracketed on a coarse
    /// periodic grid and refined by golden-section search.
    CoordinateGolden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSpec {
    pub method: OptimizerMethod,
    pub max_evals: usize,
    /// Stop a restart once a full coordinate sweep improves by less than this.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        Self {
            method: OptimizerMethod::CoordinateGolden,
            max_evals: 400_000,
            tolerance: 1e-10,
            restarts: 8,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sweep {
    Grid(GridSpec),
    Optimizer(OptimizerSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub chain: HeisenbergChain,
    pub ansatz: AnsatzSpec,
    pub execution: Execution,
    pub sweep: Sweep,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        // deserialized configs bypass the checked constructors
        HeisenbergChain::new(self.chain.sites(), self.chain.coupling())?;
        AnsatzSpec::new(self.ansatz.family, self.ansatz.sites, self.ansatz.layers)?;
        if self.chain.sites() != self.ansatz.sites {
            return Err(Error::Config(format!(
                "chain has {} sites but the ansatz has {}",
                self.chain.sites(),
                self.ansatz.sites
            )));
        }
        match &self.execution {
            Execution::Exact => {}
            Execution::Sampled { shots, .. } => {
                if *shots == 0 {
                    return Err(Error::ZeroShots);
                }
            }
            Execution::Noisy { model, shots, .. } => {
                model.validate()?;
                if *shots == Shots::Finite(0) {
                    return Err(Error::ZeroShots);
                }
                if self.chain.sites() > MAX_DENSITY_QUBITS {
                    return Err(Error::UnsupportedSize {
                        size: self.chain.sites(),
                        limit: MAX_DENSITY_QUBITS,
                    });
                }
            }
        }
        match &self.sweep {
            Sweep::Grid(g) => {
                g.points_for(self.ansatz.parameter_count())?;
            }
            Sweep::Optimizer(o) => {
                if self.execution != Execution::Exact {
                    return Err(Error::Config(
                        "the optimizer runs on the exact statevector path only".into(),
                    ));
                }
                if o.max_evals == 0 || o.restarts == 0 {
                    return Err(Error::Config("optimizer needs max_evals ≥ 1 and restarts ≥ 1".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: Vec<f64>,
    pub estimate: EnergyEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    /// Grid points in order, or the optimizer's sequence of improving points.
    pub points: Vec<SweepPoint>,
    pub min_index: usize,
    pub reference_energy: f64,
    /// Minimum energy minus the exact ground energy.
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl SweepResult {
    pub fn min_point(&self) -> &SweepPoint {
        &self.points[self.min_index]
    }

    pub fn min_energy(&self) -> f64 {
        self.min_point().estimate.energy
    }
}

/// Index of the lowest energy; ties go to the lexicographically smallest
/// parameter vector.
fn argmin(points: &[SweepPoint]) -> usize {
    let mut best = 0;
    for (k, p) in points.iter().enumerate().skip(1) {
        let b = &points[best];
        let lower = p.estimate.energy < b.estimate.energy;
        let tie = p.estimate.energy == b.estimate.energy
            && p.params
                .iter()
                .zip(&b.params)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                == Some(std::cmp::Ordering::Less);
        if lower || tie {
            best = k;
        }
    }
    best
}

/// Everything needed to evaluate energies for one configuration.
struct Evaluator {
    ansatz: Ansatz,
    observable: Observable,
    plan: MeasurementPlan,
    execution: Execution,
}

impl Evaluator {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let observable = build_hamiltonian(&config.chain);
        Ok(Self {
            ansatz: config.ansatz.build()?,
            plan: MeasurementPlan::qubit_wise(&observable),
            observable,
            execution: config.execution,
        })
    }

    fn energy_only(&self, params: &[f64]) -> Result<f64> {
        exact_expectation(&self.observable, &self.ansatz.prepare(params)?)
    }

    /// Energy at one parameter vector. Setting `j` of point `p` is sampled
    /// with seed `derive_seed(derive_seed(master, [p]), [j])`.
    fn evaluate(&self, params: &[f64], point: usize) -> Result<EnergyEstimate> {
        let point_seed = derive_seed(self.execution.seed(), &[point as u64]);
        match &self.execution {
            Execution::Exact => {
                let psi = self.ansatz.prepare(params)?;
                let per_term = self
                    .observable
                    .terms()
                    .iter()
                    .map(|t| {
                        Ok(TermEstimate {
                            term: t.clone(),
                            estimate: term_expectation(t, &psi)?,
                            variance: 0.0,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(EnergyEstimate {
                    energy: exact_expectation(&self.observable, &psi)?,
                    sigma: 0.0,
                    per_term,
                })
            }
            Execution::Sampled { shots, .. } => {
                let psi = self.ansatz.prepare(params)?;
                estimate_with_plan(&psi, &self.observable, &self.plan, Shots::Finite(*shots), point_seed)
            }
            Execution::Noisy { model, shots, .. } => {
                let gates = self.ansatz.circuit.bind(params)?;
                let rho = noisy_prepare(&gates, &self.ansatz.initial, model)?;
                let state = NoisyState { rho: &rho, model };
                estimate_with_plan(&state, &self.observable, &self.plan, *shots, point_seed)
            }
        }
    }
}

fn noisy_prepare(gates: &[Gate], initial: &StateVector, model: &NoiseModel) -> Result<DensityMatrix> {
    evolve_noisy_gates(gates, &DensityMatrix::from_pure(initial)?, model)
}

fn reference_energy(chain: &HeisenbergChain) -> Result<f64> {
    Ok(exact_diagonalize(chain)?.ground_energy)
}

/// Evaluate every grid point (in parallel) or run the optimizer.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let grid = match config.sweep {
        Sweep::Grid(g) => g,
        Sweep::Optimizer(_) => return run_optimizer(config),
    };
    let eval = Evaluator::new(config)?;
    let params = grid.points_for(config.ansatz.parameter_count())?;
    let points = params
        .into_par_iter()
        .enumerate()
        .map(|(k, p)| {
            let estimate = eval.evaluate(&p, k)?;
            Ok(SweepPoint { params: p, estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    finish(config, points, true, 0)
}

fn finish(
    config: &ExperimentConfig,
    points: Vec<SweepPoint>,
    converged: bool,
    evaluations: usize,
) -> Result<SweepResult> {
    let min_index = argmin(&points);
    let reference_energy = reference_energy(&config.chain)?;
    let error = points[min_index].estimate.energy - reference_energy;
    let evaluations = if evaluations == 0 { points.len() } else { evaluations };
    Ok(SweepResult {
        config: *config,
        points,
        min_index,
        reference_energy,
        error,
        converged,
        evaluations,
    })
}

/// One circuit of a batch: a fully bound ansatz followed by a measurement
/// setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub point: usize,
    pub setting: usize,
    pub params: Vec<f64>,
    pub gates: Vec<Gate>,
    pub basis: PauliString,
    pub seed: u64,
}

/// Every (grid point × measurement setting) circuit of a sweep, submitted
/// together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchJob {
    pub qubit_count: usize,
    pub initial_bits: Vec<u8>,
    pub shots: Shots,
    pub master_seed: u64,
    pub entries: Vec<BatchEntry>,
}

impl BatchJob {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn build_batch(config: &ExperimentConfig) -> Result<BatchJob> {
    let Sweep::Grid(grid) = config.sweep else {
        return Err(Error::Config("batching needs a fixed grid sweep".into()));
    };
    let eval = Evaluator::new(config)?;
    let master = config.execution.seed();
    let mut entries = Vec::new();
    for (p, params) in grid
        .points_for(config.ansatz.parameter_count())?
        .into_iter()
        .enumerate()
    {
        let gates = eval.ansatz.circuit.bind(&params)?;
        let point_seed = derive_seed(master, &[p as u64]);
        for (j, s) in eval.plan.settings.iter().enumerate() {
            entries.push(BatchEntry {
                point: p,
                setting: j,
                params: params.clone(),
                gates: gates.clone(),
                basis: s.basis.clone(),
                seed: derive_seed(point_seed, &[j as u64]),
            });
        }
    }
    Ok(BatchJob {
        qubit_count: config.chain.sites(),
        initial_bits: neel_bits(config.chain.sites()),
        shots: config.execution.shots(),
        master_seed: master,
        entries,
    })
}

/// Run every circuit of a batch, returning one outcome per entry in order.
pub fn execute_batch(job: &BatchJob, execution: &Execution) -> Result<Vec<SettingData>> {
    let initial = init_basis_state(job.qubit_count, &job.initial_bits)?;
    job.entries
        .par_iter()
        .map(|e| match execution {
            Execution::Exact | Execution::Sampled { .. } => {
                let psi = run_gates(&e.gates, &initial)?;
                measure_setting(&psi, &e.basis, job.shots, e.seed)
            }
            Execution::Noisy { model, .. } => {
                let rho = noisy_prepare(&e.gates, &initial, model)?;
                measure_setting(&NoisyState { rho: &rho, model }, &e.basis, job.shots, e.seed)
            }
        })
        .collect()
}

/// Regroup batch outcomes by grid point and reduce them to energies.
pub fn assemble_batch(
    config: &ExperimentConfig,
    job: &BatchJob,
    data: &[SettingData],
) -> Result<SweepResult> {
    let observable = build_hamiltonian(&config.chain);
    let plan = MeasurementPlan::qubit_wise(&observable);
    let per_point = plan.len();
    if data.len() != job.len() || !job.len().is_multiple_of(per_point) {
        return Err(Error::Config("batch outcomes do not match the job".into()));
    }
    let points = job
        .entries
        .chunks(per_point)
        .zip(data.chunks(per_point))
        .map(|(entries, outcomes)| {
            Ok(SweepPoint {
                params: entries[0].params.clone(),
                estimate: combine_settings(&observable, &plan, outcomes)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    finish(config, points, true, 0)
}

pub fn run_sweep_batched(config: &ExperimentConfig) -> Result<SweepResult> {
    let job = build_batch(config)?;
    let data = execute_batch(&job, &config.execution)?;
    assemble_batch(config, &job, &data)
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_section(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    budget: &mut usize,
) -> Result<Option<(f64, f64)>> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if *budget < 2 {
        return Ok(None);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    *budget -= 2;
    while (b - a).abs() > xtol && *budget > 0 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        *budget -= 1;
    }
    Ok(Some(if f1 <= f2 { (x1, f1) } else { (x2, f2) }))
}

const COARSE_STEPS: usize = 8;
const GOLDEN_XTOL: f64 = 1e-7;

/// Gradient-free local search on the exact path: cyclic coordinate descent
/// where each coordinate is scanned on a coarse periodic grid and the best
/// bracket refined by golden-section search. Restarts begin from uniform
/// random angles in `[−π, π)`. The returned points trace every improvement of
/// the incumbent; an exhausted budget returns the best point flagged as not
/// converged.
pub fn run_optimizer(config: &ExperimentConfig) -> Result<SweepResult> {
    let Sweep::Optimizer(opt) = config.sweep else {
        return Err(Error::Config("configuration does not request the optimizer".into()));
    };
    let eval = Evaluator::new(config)?;
    let dim = config.ansatz.parameter_count();
    let mut budget = opt.max_evals;
    let mut trace: Vec<SweepPoint> = Vec::new();
    let mut best = f64::INFINITY;
    let mut converged = true;

    let record = |params: &[f64], e: f64, trace: &mut Vec<SweepPoint>, best: &mut f64| {
        if e < *best {
            *best = e;
            trace.push(SweepPoint {
                params: params.to_vec(),
                estimate: EnergyEstimate::exact(e),
            });
        }
    };

    'restarts: for r in 0..opt.restarts {
        let mut rng = rng_from_seed(derive_seed(opt.seed, &[r as u64]));
        let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(-PI..PI)).collect();
        if budget == 0 {
            converged = false;
            break;
        }
        let mut fx = eval.energy_only(&x)?;
        budget -= 1;
        record(&x, fx, &mut trace, &mut best);
        loop {
            let start = fx;
            for k in 0..dim {
                let x0 = x[k];
                let step = 2.0 * PI / COARSE_STEPS as f64;
                let mut best_j = (0usize, fx);
                for j in 1..COARSE_STEPS {
                    if budget == 0 {
                        converged = false;
                        break 'restarts;
                    }
                    x[k] = x0 + step * j as f64;
                    let e = eval.energy_only(&x)?;
                    budget -= 1;
                    if e < best_j.1 {
                        best_j = (j, e);
                    }
                }
                let centre = x0 + step * best_j.0 as f64;
                let mut line = |t: f64| {
                    x[k] = t;
                    eval.energy_only(&x)
                };
                let refined =
                    golden_section(&mut line, centre - step, centre + step, GOLDEN_XTOL, &mut budget)?;
                let (t, e) = match refined {
                    Some((t, e)) if e < best_j.1 => (t, e),
                    _ => (centre, best_j.1),
                };
                // wrap into [−π, π)
                x[k] = (t + PI).rem_euclid(2.0 * PI) - PI;
                fx = e;
                record(&x, fx, &mut trace, &mut best);
                if refined.is_none() || budget == 0 {
                    converged = false;
                    break 'restarts;
                }
            }
            if start - fx < opt.tolerance {
                break;
            }
        }
    }
    if budget == 0 {
        converged = false;
    }
    // recompute the incumbent with the full per-term breakdown
    let min_index = argmin(&trace);
    let best_params = trace[min_index].params.clone();
    trace[min_index].estimate = eval.evaluate(&best_params, 0)?;
    finish(config, trace, converged, opt.max_evals - budget)
}

/// Check the invariants every sweep must satisfy; returns one message per
/// violation.
pub fn check_sweep(result: &SweepResult) -> Vec<String> {
    let mut failures = Vec::new();
    let min = result.min_point();
    for (k, p) in result.points.iter().enumerate() {
        if p.estimate.energy < min.estimate.energy {
            failures.push(format!("point {k} is below the reported minimum"));
        }
    }
    if result.error < -3.0 * min.estimate.sigma - 1e-9 {
        failures.push(format!(
            "variational bound violated: min {} below exact {} by more than 3σ",
            min.estimate.energy, result.reference_energy
        ));
    }
    failures
}

/// One row of the energy-versus-size table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub exact: f64,
    pub expressive_min: Option<f64>,
    pub exchange_min: Option<f64>,
    /// Exchange minimum minus exact.
    pub gap: Option<f64>,
}

/// Plot-ready `(θ, E, σ)` series of one single-parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub label: String,
    pub n: usize,
    pub family: AnsatzFamily,
    pub execution: String,
    pub rows: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub table: Vec<ScalingRow>,
    pub landscapes: Vec<Landscape>,
}

pub const TABLE_HEADER: [&str; 5] = ["n", "exact", "expressive_min", "exchange_min", "gap"];
pub const LANDSCAPE_HEADER: [&str; 3] = ["theta", "energy", "sigma"];

fn opt_min(slot: &mut Option<f64>, v: f64) {
    *slot = Some(slot.map_or(v, |s| s.min(v)));
}

/// Aggregate sweeps into the scaling table (exact expressive and exchange
/// sweeps) and landscape series (single-parameter grid sweeps).
pub fn make_report(results: &[SweepResult]) -> Report {
    let mut table: Vec<ScalingRow> = Vec::new();
    let mut landscapes = Vec::new();
    for r in results {
        let n = r.config.chain.sites();
        if r.config.execution == Execution::Exact && r.config.ansatz.family != AnsatzFamily::Hea {
            let row = match table.iter_mut().position(|row| row.n == n) {
                Some(i) => &mut table[i],
                None => {
                    table.push(ScalingRow {
                        n,
                        exact: r.reference_energy,
                        expressive_min: None,
                        exchange_min: None,
                        gap: None,
                    });
                    table.last_mut().unwrap()
                }
            };
            let e = r.min_energy();
            match r.config.ansatz.family {
                AnsatzFamily::Expressive => opt_min(&mut row.expressive_min, e),
                AnsatzFamily::Exchange => {
                    opt_min(&mut row.exchange_min, e);
                    row.gap = row.exchange_min.map(|m| m - row.exact);
                }
                AnsatzFamily::Hea => unreachable!(),
            }
        }
        if matches!(r.config.sweep, Sweep::Grid(_)) && r.config.ansatz.parameter_count() == 1 {
            landscapes.push(Landscape {
                label: format!("{}-n{}-{}", r.config.ansatz.family, n, r.config.execution.label()),
                n,
                family: r.config.ansatz.family,
                execution: r.config.execution.label().to_string(),
                rows: r
                    .points
                    .iter()
                    .map(|p| (p.params[0], p.estimate.energy, p.estimate.sigma))
                    .collect(),
            });
        }
    }
    table.sort_by_key(|row| row.n);
    Report { table, landscapes }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.10}"))
}

impl Report {
    pub fn table_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TABLE_HEADER)?;
        for row in &self.table {
            w.write_record([
                row.n.to_string(),
                format!("{:.10}", row.exact),
                fmt_opt(row.expressive_min),
                fmt_opt(row.exchange_min),
                fmt_opt(row.gap),
            ])?;
        }
        into_string(w)
    }

    /// A single landscape as `theta,energy,sigma`.
    pub fn landscape_csv(landscape: &Landscape) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(LANDSCAPE_HEADER)?;
        for (t, e, s) in &landscape.rows {
            w.write_record([format!("{t:.10}"), format!("{e:.10}"), format!("{s:.10}")])?;
        }
        into_string(w)
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
