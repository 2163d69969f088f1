//! Preconfigured experiment sets for each published table and figure, with
//! per-cell comparison against the published numbers. Reference values and
//! tolerances live in `data/reproduce.toml`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::OutputDir;
use crate::ansatz::{neel_state, AnsatzFamily, AnsatzSpec};
use crate::error::{Error, Result};
use crate::measure::Shots;
use crate::model::{build_hamiltonian, HeisenbergChain};
use crate::noise::NoiseModel;
use crate::pauli::exact_expectation;
use crate::runner::{
    make_report, run_sweep, Execution, ExperimentConfig, GridSpec, OptimizerSpec, Report, Sweep,
    SweepResult,
};

/// Bundled reference file.
pub const DEFAULTS_TOML: &str = include_str!("../../data/reproduce.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Table4,
    Table5,
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Target {
    pub const ALL: [Target; 6] = [
        Target::Table4,
        Target::Table5,
        Target::Fig1,
        Target::Fig2,
        Target::Fig3,
        Target::Fig4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Table4 => "table4",
            Target::Table5 => "table5",
            Target::Fig1 => "fig1",
            Target::Fig2 => "fig2",
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
        }
    }
}

type BySize = BTreeMap<String, f64>;

#[derive(Debug, Clone, Deserialize)]
struct Common {
    seed: u64,
    shots: u32,
    grid_points: usize,
}

#[derive(Debug, Clone, Deserialize)]
struct Measured {
    value: f64,
    sigma: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct Table4Refs {
    exact: BySize,
    exact_tol: f64,
    expressive: BySize,
    exchange: BySize,
    noisy_expressive: Measured,
    noisy_exchange: Measured,
}

#[derive(Debug, Clone, Deserialize)]
struct Table5Refs {
    exact: BySize,
    exact_tol: f64,
    expressive: BySize,
    exchange: BySize,
    gap: BySize,
    expressive_tol_n2: f64,
    expressive_ceiling: BySize,
    expressive_layers: BTreeMap<String, usize>,
    exchange_n2_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct Fig1Refs {
    grid: String,
    shots: u32,
}

#[derive(Debug, Clone, Deserialize)]
struct Fig2Refs {
    sizes: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
struct Fig3Refs {
    bracket: [f64; 2],
    noiseless_margin: f64,
    paper_min: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct Fig4Refs {
    grid: String,
    paper_hea_min: f64,
    paper_exchange_min: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct References {
    version: u32,
    defaults: Common,
    table4: Table4Refs,
    table5: Table5Refs,
    fig1: Fig1Refs,
    fig2: Fig2Refs,
    fig3: Fig3Refs,
    fig4: Fig4Refs,
}

/// Reference data plus run-level overrides.
#[derive(Debug, Clone)]
pub struct Options {
    refs: References,
    pub seed: u64,
    pub shots: u32,
}

impl Options {
    pub fn load(seed: Option<u64>, shots: Option<u32>) -> Result<Self> {
        let refs: References =
            toml::from_str(DEFAULTS_TOML).map_err(|e| Error::Config(e.to_string()))?;
        if shots == Some(0) {
            return Err(Error::ZeroShots);
        }
        Ok(Self {
            seed: seed.unwrap_or(refs.defaults.seed),
            shots: shots.unwrap_or(refs.defaults.shots),
            refs,
        })
    }

    pub fn reference_version(&self) -> u32 {
        self.refs.version
    }

    fn default_grid(&self) -> GridSpec {
        GridSpec {
            points: self.refs.defaults.grid_points,
            ..GridSpec::default()
        }
    }
}

/// One compared cell. `passed` is `None` for informational rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub paper: Option<f64>,
    pub deviation: Option<f64>,
    pub criterion: String,
    pub passed: Option<bool>,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, paper: Option<f64>) -> Self {
        Self {
            name: name.into(),
            value,
            paper,
            deviation: paper.map(|p| value - p),
            criterion: "informational".into(),
            passed: None,
        }
    }

    fn require(mut self, criterion: impl Into<String>, ok: bool) -> Self {
        self.criterion = criterion.into();
        self.passed = Some(ok);
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: Vec<SweepResult>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed != Some(false))
    }
}

fn config(family: AnsatzFamily, n: usize, layers: usize, execution: Execution, sweep: Sweep) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        chain: HeisenbergChain::antiferro(n)?,
        ansatz: AnsatzSpec::new(family, n, layers)?,
        execution,
        sweep,
    })
}

fn neel_energy(n: usize) -> Result<f64> {
    exact_expectation(&build_hamiltonian(&HeisenbergChain::antiferro(n)?), &neel_state(n)?)
}

fn noisy(opts: &Options) -> Execution {
    Execution::Noisy {
        model: NoiseModel::garnet(),
        shots: Shots::Finite(opts.shots),
        seed: opts.seed,
    }
}

/// Published columns a scaling run is compared against.
struct Columns<'a> {
    exact: &'a BySize,
    exact_tol: f64,
    expressive: &'a BySize,
    exchange: &'a BySize,
    gap: Option<&'a BySize>,
}

impl<'a> Columns<'a> {
    fn table5(r: &'a Table5Refs) -> Self {
        Self {
            exact: &r.exact,
            exact_tol: r.exact_tol,
            expressive: &r.expressive,
            exchange: &r.exchange,
            gap: Some(&r.gap),
        }
    }
}

/// Exact, expressive (optimizer) and exchange (grid) rows for each size.
fn scaling(opts: &Options, sizes: &[usize], cols: Columns<'_>, out: &mut Outcome) -> Result<()> {
    let r = &opts.refs.table5;
    let mut gaps = Vec::new();
    for &n in sizes {
        let key = n.to_string();
        let layers = r.expressive_layers.get(&key).copied().unwrap_or(n);
        let spec = OptimizerSpec { seed: opts.seed, ..OptimizerSpec::default() };
        let expressive = run_sweep(&config(AnsatzFamily::Expressive, n, layers, Execution::Exact, Sweep::Optimizer(spec))?)?;
        let exchange = run_sweep(&config(AnsatzFamily::Exchange, n, 1, Execution::Exact, Sweep::Grid(opts.default_grid()))?)?;
        let exact = exchange.reference_energy;
        out.checks.push(match cols.exact.get(&key).copied() {
            Some(p) => Check::new(format!("exact N={n}"), exact, Some(p))
                .require(format!("|Δ| ≤ {}", cols.exact_tol), (exact - p).abs() <= cols.exact_tol),
            None => Check::new(format!("exact N={n}"), exact, None),
        });

        let e = expressive.min_energy();
        let paper = cols.expressive.get(&key).copied();
        let c = Check::new(format!("expressive N={n} (L={layers})"), e, paper);
        out.checks.push(if n == 2 {
            c.require(format!("within {} of exact", r.expressive_tol_n2), (e - exact).abs() <= r.expressive_tol_n2)
        } else if let Some(&ceiling) = r.expressive_ceiling.get(&key) {
            c.require(format!("≤ {ceiling}"), e <= ceiling)
        } else {
            c.require("≥ exact − 1e-9", e >= exact - 1e-9)
        });

        let x = exchange.min_energy();
        let neel = neel_energy(n)?;
        let paper = cols.exchange.get(&key).copied();
        let c = Check::new(format!("exchange N={n}"), x, paper);
        out.checks.push(if n == 2 {
            let flat = exchange.points.iter().all(|p| (p.estimate.energy + 1.0).abs() <= r.exchange_n2_tol);
            c.require(format!("every grid point within {:e} of −1", r.exchange_n2_tol), flat)
        } else {
            c.require(
                format!("exact ≤ min ≤ Néel ({neel:.4})"),
                x >= exact - 1e-9 && x <= neel + 1e-9,
            )
        });
        let gap = x - exact;
        out.checks.push(Check::new(format!("gap N={n}"), gap, cols.gap.and_then(|g| g.get(&key).copied())));
        gaps.push(gap);
        out.results.push(expressive);
        out.results.push(exchange);
    }
    let monotone = gaps.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let last = gaps.last().copied().unwrap_or(0.0);
    out.checks.push(Check::new("exchange gap monotone in N", last, None).require("non-decreasing", monotone));
    Ok(())
}

fn noisy_exchange_check(opts: &Options, result: &SweepResult, paper: f64) -> Check {
    let f = &opts.refs.fig3;
    let e = result.min_energy();
    let [lo, hi] = f.bracket;
    Check::new("noisy exchange N=2 min", e, Some(paper)).require(
        format!("in [{lo}, {hi}] and > −1 + {}", f.noiseless_margin),
        e >= lo && e <= hi && e > -1.0 + f.noiseless_margin,
    )
}

fn table4(opts: &Options) -> Result<Outcome> {
    let r = &opts.refs.table4;
    let mut out = Outcome::default();
    let cols = Columns { exact: &r.exact, exact_tol: r.exact_tol, expressive: &r.expressive, exchange: &r.exchange, gap: None };
    scaling(opts, &[2, 3, 4], cols, &mut out)?;

    let fig4_grid: GridSpec = opts.refs.fig4.grid.parse()?;
    let exchange = run_sweep(&config(AnsatzFamily::Exchange, 2, 1, noisy(opts), Sweep::Grid(opts.default_grid()))?)?;
    let mut c = noisy_exchange_check(opts, &exchange, r.noisy_exchange.value);
    c.name = format!("noisy exchange N=2 min (paper ± {})", r.noisy_exchange.sigma);
    out.checks.push(c);
    let hea = run_sweep(&config(AnsatzFamily::Hea, 2, 1, noisy(opts), Sweep::Grid(fig4_grid))?)?;
    out.checks.push(Check::new(
        format!("noisy HEA N=2 min (paper ± {})", r.noisy_expressive.sigma),
        hea.min_energy(),
        Some(r.noisy_expressive.value),
    ));
    out.results.push(exchange);
    out.results.push(hea);
    Ok(out)
}

fn table5(opts: &Options) -> Result<Outcome> {
    let mut out = Outcome::default();
    scaling(opts, &[2, 3, 4], Columns::table5(&opts.refs.table5), &mut out)?;
    Ok(out)
}

fn fig1(opts: &Options) -> Result<Outcome> {
    let f = &opts.refs.fig1;
    let grid: GridSpec = f.grid.parse()?;
    let exact = run_sweep(&config(AnsatzFamily::Hea, 2, 1, Execution::Exact, Sweep::Grid(grid))?)?;
    let shots = if opts.shots == opts.refs.defaults.shots { f.shots } else { opts.shots };
    let sampled = run_sweep(&config(
        AnsatzFamily::Hea,
        2,
        1,
        Execution::Sampled { shots, seed: opts.seed },
        Sweep::Grid(grid),
    )?)?;
    let mut out = Outcome::default();
    let e0 = exact.reference_energy;
    out.checks.push(Check::new("exact ground energy N=2", e0, Some(-3.0)).require("|Δ| ≤ 5e-4", (e0 + 3.0).abs() <= 5e-4));
    out.checks.push(
        Check::new("HEA exact landscape min", exact.min_energy(), None)
            .require("≥ exact ground energy", exact.min_energy() >= e0 - 1e-9),
    );
    out.checks.push(Check::new("HEA argmin θ", exact.min_point().params[0], None));
    // shot noise should stay within 5σ of the analytic curve at every point
    let worst = exact
        .points
        .iter()
        .zip(&sampled.points)
        .map(|(e, s)| {
            let var: f64 = e.estimate.per_term.iter().map(|t| (1.0 - t.estimate * t.estimate) / shots as f64).sum();
            let d = (s.estimate.energy - e.estimate.energy).abs();
            if var > 1e-15 { d / var.sqrt() } else if d < 1e-12 { 0.0 } else { f64::INFINITY }
        })
        .fold(0.0, f64::max);
    out.checks.push(Check::new("max |sampled − exact| / σ", worst, None).require("≤ 5", worst <= 5.0));
    out.results.push(exact);
    out.results.push(sampled);
    Ok(out)
}

fn fig2(opts: &Options) -> Result<Outcome> {
    let mut out = Outcome::default();
    scaling(opts, &opts.refs.fig2.sizes, Columns::table5(&opts.refs.table5), &mut out)?;
    Ok(out)
}

fn fig3(opts: &Options) -> Result<Outcome> {
    let noisy_run = run_sweep(&config(AnsatzFamily::Exchange, 2, 1, noisy(opts), Sweep::Grid(opts.default_grid()))?)?;
    let clean = run_sweep(&config(AnsatzFamily::Exchange, 2, 1, Execution::Exact, Sweep::Grid(opts.default_grid()))?)?;
    let mut out = Outcome::default();
    out.checks.push(noisy_exchange_check(opts, &noisy_run, opts.refs.fig3.paper_min));
    let spread = noisy_run.points.iter().map(|p| p.estimate.energy).fold(f64::NEG_INFINITY, f64::max) - noisy_run.min_energy();
    out.checks.push(Check::new("noisy landscape spread (max − min)", spread, None));
    out.checks.push(Check::new("noiseless exchange N=2 min", clean.min_energy(), Some(-1.0)));
    out.results.push(noisy_run);
    out.results.push(clean);
    Ok(out)
}

fn fig4(opts: &Options) -> Result<Outcome> {
    let f = &opts.refs.fig4;
    let grid: GridSpec = f.grid.parse()?;
    let hea = run_sweep(&config(AnsatzFamily::Hea, 2, 1, noisy(opts), Sweep::Grid(grid))?)?;
    let exchange = run_sweep(&config(AnsatzFamily::Exchange, 2, 1, noisy(opts), Sweep::Grid(grid))?)?;
    let mut out = Outcome::default();
    out.checks.push(noisy_exchange_check(opts, &exchange, f.paper_exchange_min));
    out.checks.push(Check::new("noisy HEA N=2 min", hea.min_energy(), Some(f.paper_hea_min)));
    let hea_max = hea.points.iter().map(|p| p.estimate.energy).fold(f64::NEG_INFINITY, f64::max);
    out.checks.push(Check::new("noisy HEA N=2 max", hea_max, None));
    out.checks.push(Check::new(
        "exchange min − HEA min",
        exchange.min_energy() - hea.min_energy(),
        Some(f.paper_exchange_min - f.paper_hea_min),
    ));
    out.results.push(hea);
    out.results.push(exchange);
    Ok(out)
}

pub fn compute(target: Target, opts: &Options) -> Result<Outcome> {
    match target {
        Target::Table4 => table4(opts),
        Target::Table5 => table5(opts),
        Target::Fig1 => fig1(opts),
        Target::Fig2 => fig2(opts),
        Target::Fig3 => fig3(opts),
        Target::Fig4 => fig4(opts),
    }
}

/// The stored config copy: enough to re-run the target bit-identically.
#[derive(Debug, Serialize)]
struct ReproduceRecord<'a> {
    target: Target,
    seed: u64,
    shots: u32,
    reference_version: u32,
    experiments: Vec<&'a ExperimentConfig>,
}

fn print_checks(target: Target, checks: &[Check]) {
    println!("{}", target.name());
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:+.6}"));
    println!("  {:<40} {:>11} {:>11} {:>11}  status", "cell", "value", "paper", "deviation");
    for c in checks {
        let status = match c.passed {
            Some(true) => format!("PASS ({})", c.criterion),
            Some(false) => format!("FAIL ({})", c.criterion),
            None => "info".to_string(),
        };
        println!(
            "  {:<40} {:>11} {:>11} {:>11}  {status}",
            c.name,
            format!("{:+.6}", c.value),
            fmt(c.paper),
            fmt(c.deviation)
        );
    }
}

fn comparison_csv(checks: &[Check]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["cell", "value", "paper", "deviation", "criterion", "status"])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.10}"));
    for c in checks {
        let status = match c.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "info",
        };
        w.write_record([
            c.name.clone(),
            format!("{:.10}", c.value),
            opt(c.paper),
            opt(c.deviation),
            c.criterion.clone(),
            status.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Run a target, write its outputs to `dir`, and print the comparison.
pub fn run_target(target: Target, opts: &Options, dir: PathBuf) -> Result<bool> {
    let outcome = compute(target, opts)?;
    print_checks(target, &outcome.checks);
    let mut out = OutputDir::create(dir)?;
    out.write_json("results.json", &outcome.results)?;
    out.write_json("comparison.json", &outcome.checks)?;
    out.write("comparison.csv", &comparison_csv(&outcome.checks)?)?;
    let report: Report = make_report(&outcome.results);
    out.write_report(&report, "table4.csv")?;
    let path = out.path().to_path_buf();
    let record = ReproduceRecord {
        target,
        seed: opts.seed,
        shots: opts.shots,
        reference_version: opts.reference_version(),
        experiments: outcome.results.iter().map(|r| &r.config).collect(),
    };
    out.finish(&record, opts.seed)?;
    let failed = outcome.checks.iter().filter(|c| c.passed == Some(false)).count();
    println!(
        "{}: {} ({} checks, {failed} failed) → {}",
        target.name(),
        if failed == 0 { "pass" } else { "FAIL" },
        outcome.checks.iter().filter(|c| c.passed.is_some()).count(),
        path.display()
    );
    Ok(outcome.passed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_file_parses() {
        let o = Options::load(None, None).unwrap();
        assert_eq!(o.shots, 1500);
        assert_eq!(o.refs.table5.exact["4"], -6.4641);
        assert!(Options::load(None, Some(0)).is_err());
    }

    #[test]
    fn table5_two_site_row() {
        let o = Options::load(None, None).unwrap();
        let mut out = Outcome::default();
        scaling(&o, &[2], Columns::table5(&o.refs.table5), &mut out).unwrap();
        let get = |name: &str| out.checks.iter().find(|c| c.name.starts_with(name)).unwrap();
        assert!((get("exchange N=2").value + 1.0).abs() < 1e-12);
        assert!((get("gap N=2").value - 2.0).abs() < 1e-12);
        assert!(out.passed());
    }
}
