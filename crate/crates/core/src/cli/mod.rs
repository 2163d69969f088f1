//! Command-line front end: config loading, flag overrides, output
//! directories with run manifests, and the `reproduce` / `validate` suites.

mod manifest;
pub mod reproduce;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ansatz::{neel_state, AnsatzFamily, AnsatzSpec};
use crate::error::{Error, Result};
use crate::measure::{Shots, DEFAULT_SHOTS};
use crate::model::{exact_diagonalize, magnetization_sector, HeisenbergChain};
use crate::noise::NoiseModel;
use crate::runner::{
    check_sweep, make_report, run_sweep, Execution, ExperimentConfig, GridSpec, OptimizerSpec,
    Report, SweepResult, Sweep,
};

pub use manifest::RunManifest;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "SPINVQE_OUT";
const DEFAULT_OUT_ROOT: &str = "spinvqe-out";

#[derive(Debug, Parser)]
#[command(name = "spinvqe", version, about = "Heisenberg chain VQE simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact ground state of a chain.
    Exact {
        #[arg(long, default_value_t = 2)]
        sites: usize,
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed parameter sweep.
    Sweep(RunArgs),
    /// Gradient-free minimization on the exact path.
    Optimize {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        max_evals: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Build the scaling table and landscapes from earlier `results.json` files.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a published table or figure and compare against it.
    Reproduce {
        target: reproduce::Target,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        shots: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-module invariant battery.
    Validate {
        /// Reduced battery, a few seconds.
        #[arg(long)]
        quick: bool,
        /// Also check that this noise config is rejected or accepted.
        #[arg(long)]
        noise_config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseChoice {
    Off,
    Garnet,
    Custom,
}

/// Experiment flags shared by `sweep` and `optimize`; each overrides the
/// corresponding field of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON or TOML experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long)]
    pub coupling: Option<f64>,
    #[arg(long)]
    pub ansatz: Option<AnsatzFamily>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// `start:end:points`, e.g. `0:pi:50`.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots per measurement setting, or `inf`.
    #[arg(long)]
    pub shots: Option<String>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseChoice>,
    /// Noise model JSON, used with `--noise custom`.
    #[arg(long)]
    pub noise_config: Option<PathBuf>,
    /// Also write the bound circuit at the best point as `circuit.json`.
    #[arg(long)]
    pub dump_circuit: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        chain: HeisenbergChain::antiferro(2).expect("valid chain"),
        ansatz: AnsatzSpec::new(AnsatzFamily::Exchange, 2, 1).expect("valid ansatz"),
        execution: Execution::Exact,
        sweep: Sweep::Grid(GridSpec::default()),
    }
}

/// Read an [`ExperimentConfig`] from JSON or TOML, chosen by extension.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    let config: ExperimentConfig = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?,
        _ => serde_json::from_str(&text)?,
    };
    config.validate()?;
    Ok(config)
}

fn parse_shots(s: &str) -> Result<Shots> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinite" => Ok(Shots::Infinite),
        n => {
            let n: u32 = n
                .parse()
                .map_err(|e| Error::Parse(format!("shots {s:?}: {e}")))?;
            Shots::finite(n)
        }
    }
}

impl RunArgs {
    /// Merge the base config (file or built-in default) with flag overrides
    /// and validate the result.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let c = self.merge()?;
        c.validate()?;
        Ok(c)
    }

    fn merge(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => load_config(p)?,
            None => default_config(),
        };
        let sites = self.sites.unwrap_or(c.chain.sites());
        c.chain = HeisenbergChain::new(sites, self.coupling.unwrap_or(c.chain.coupling()))?;
        let family = self.ansatz.unwrap_or(c.ansatz.family);
        let layers = match (self.layers, family) {
            (Some(l), _) => l,
            (None, AnsatzFamily::Hea) => 1,
            (None, _) if family != c.ansatz.family => 1,
            (None, _) => c.ansatz.layers,
        };
        c.ansatz = AnsatzSpec::new(family, sites, layers)?;
        if let Some(g) = self.grid {
            c.sweep = Sweep::Grid(g);
        }

        let seed = self.seed.unwrap_or(c.execution.seed());
        let shots = self.shots.as_deref().map(parse_shots).transpose()?;
        let noise = match self.noise {
            None => match c.execution {
                Execution::Noisy { model, .. } => Some(model),
                _ => None,
            },
            Some(NoiseChoice::Off) => None,
            Some(NoiseChoice::Garnet) => Some(NoiseModel::garnet()),
            Some(NoiseChoice::Custom) => {
                let path = self.noise_config.as_ref().ok_or_else(|| {
                    Error::Config("--noise custom needs --noise-config <file>".into())
                })?;
                Some(NoiseModel::load(path)?)
            }
        };
        let current_shots = match c.execution {
            Execution::Exact => None,
            Execution::Sampled { shots, .. } => Some(Shots::Finite(shots)),
            Execution::Noisy { shots, .. } => Some(shots),
        };
        c.execution = match (noise, shots.or(current_shots)) {
            (Some(model), s) => Execution::Noisy {
                model,
                shots: s.unwrap_or(Shots::Finite(DEFAULT_SHOTS)),
                seed,
            },
            (None, Some(Shots::Finite(n))) => Execution::Sampled { shots: n, seed },
            (None, _) => Execution::Exact,
        };
        Ok(c)
    }
}

/// `--out`, else `$SPINVQE_OUT/<name>`, else `spinvqe-out/<name>`.
pub fn output_dir(out: Option<&Path>, name: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT))
            .join(name),
    }
}

/// Collects output files of one run and finishes with its manifest.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    pub fn write_report(&mut self, report: &Report, table_name: &str) -> Result<()> {
        if !report.table.is_empty() {
            self.write(table_name, &report.table_csv()?)?;
        }
        match report.landscapes.as_slice() {
            [] => {}
            [one] => self.write("landscape.csv", &Report::landscape_csv(one)?)?,
            many => {
                for l in many {
                    self.write(&format!("landscape-{}.csv", l.label), &Report::landscape_csv(l)?)?;
                }
            }
        }
        Ok(())
    }

    /// Store the config copy and write `manifest.json`.
    pub fn finish<T: Serialize + ?Sized>(self, config: &T, seed: u64) -> Result<RunManifest> {
        let text = serde_json::to_string_pretty(config)? + "\n";
        fs::write(self.dir.join(manifest::CONFIG_FILE), &text)?;
        let m = RunManifest::new(&text, seed, self.files);
        fs::write(
            self.dir.join(manifest::MANIFEST_FILE),
            serde_json::to_string_pretty(&m)? + "\n",
        )?;
        Ok(m)
    }
}

fn print_sweep(r: &SweepResult) {
    let c = &r.config;
    println!(
        "{} ansatz, N = {}, {} layer(s), {} path, {} evaluations{}",
        c.ansatz.family,
        c.chain.sites(),
        c.ansatz.layers,
        c.execution.label(),
        r.evaluations,
        if r.converged { "" } else { " (not converged)" }
    );
    let best = r.min_point();
    let params: Vec<String> = best.params.iter().map(|p| format!("{p:.6}")).collect();
    println!("  min energy   {:.6} ± {:.6}", best.estimate.energy, best.estimate.sigma);
    println!("  at params    [{}]", params.join(", "));
    println!("  exact E0     {:.6}", r.reference_energy);
    println!("  error        {:.6}", r.error);
}

fn run_experiment(args: &RunArgs, config: ExperimentConfig, name: &str) -> Result<bool> {
    let result = run_sweep(&config)?;
    print_sweep(&result);
    let failures = check_sweep(&result);
    for f in &failures {
        eprintln!("invariant violated: {f}");
    }
    let mut out = OutputDir::create(output_dir(args.out.as_deref(), name))?;
    out.write_json("results.json", std::slice::from_ref(&result))?;
    out.write_report(&make_report(std::slice::from_ref(&result)), "table4.csv")?;
    if args.dump_circuit {
        let ansatz = config.ansatz.build()?;
        out.write_json(
            "circuit.json",
            &serde_json::json!({
                "qubit_count": ansatz.circuit.qubit_count(),
                "gates": ansatz.circuit.to_records(),
                "params": result.min_point().params,
            }),
        )?;
    }
    let dir = out.path().to_path_buf();
    out.finish(&config, config.execution.seed())?;
    println!("wrote {}", dir.display());
    Ok(failures.is_empty())
}

#[derive(Serialize)]
struct ExactSummary {
    sites: usize,
    coupling: f64,
    ground_energy: f64,
    first_gap: f64,
    spectrum: Vec<f64>,
    ground_magnetization: Vec<(f64, f64)>,
    neel_energy: f64,
}

fn cmd_exact(sites: usize, coupling: f64, out: Option<&Path>) -> Result<bool> {
    let chain = HeisenbergChain::new(sites, coupling)?;
    let sol = exact_diagonalize(&chain)?;
    let h = crate::model::build_hamiltonian(&chain);
    let summary = ExactSummary {
        sites,
        coupling,
        ground_energy: sol.ground_energy,
        first_gap: sol.gap(),
        ground_magnetization: magnetization_sector(&sol.ground_state)?.by_magnetization(),
        neel_energy: crate::pauli::exact_expectation(&h, &neel_state(sites)?)?,
        spectrum: sol.spectrum,
    };
    println!("N = {sites}, J = {coupling}");
    println!("  ground energy  {:.10}", summary.ground_energy);
    println!("  gap            {:.10}", summary.first_gap);
    println!("  Néel energy    {:.10}", summary.neel_energy);
    let mut dir = OutputDir::create(output_dir(out, "exact"))?;
    dir.write_json("exact.json", &summary)?;
    dir.finish(&chain, 0)?;
    Ok(true)
}

fn cmd_report(inputs: &[PathBuf], out: Option<&Path>) -> Result<bool> {
    let mut results: Vec<SweepResult> = Vec::new();
    for p in inputs {
        let text = fs::read_to_string(p)?;
        results.extend(serde_json::from_str::<Vec<SweepResult>>(&text)?);
    }
    let report = make_report(&results);
    for row in &report.table {
        let fmt = |v: Option<f64>| v.map_or("-".into(), |x| format!("{x:.6}"));
        println!(
            "N = {}  exact {:.6}  expressive {}  exchange {}  gap {}",
            row.n,
            row.exact,
            fmt(row.expressive_min),
            fmt(row.exchange_min),
            fmt(row.gap)
        );
    }
    println!("{} landscape series", report.landscapes.len());
    let mut dir = OutputDir::create(output_dir(out, "report"))?;
    dir.write_json("report.json", &report)?;
    dir.write("table4.csv", &report.table_csv()?)?;
    dir.write_report(&Report { table: Vec::new(), ..report }, "table4.csv")?;
    let configs: Vec<&ExperimentConfig> = results.iter().map(|r| &r.config).collect();
    dir.finish(&configs, 0)?;
    Ok(true)
}

/// Execute a parsed command. `Ok(false)` means an invariant or comparison
/// check failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Exact { sites, coupling, out } => cmd_exact(sites, coupling, out.as_deref()),
        Command::Sweep(args) => {
            let config = args.resolve()?;
            if matches!(config.sweep, Sweep::Optimizer(_)) {
                return Err(Error::Config("config requests the optimizer; use `optimize`".into()));
            }
            run_experiment(&args, config, "sweep")
        }
        Command::Optimize { run, max_evals, restarts } => {
            let mut config = run.merge()?;
            let mut spec = match config.sweep {
                Sweep::Optimizer(o) => o,
                Sweep::Grid(_) => OptimizerSpec::default(),
            };
            if let Some(m) = max_evals {
                spec.max_evals = m;
            }
            if let Some(r) = restarts {
                spec.restarts = r;
            }
            if let Some(s) = run.seed {
                spec.seed = s;
            }
            config.sweep = Sweep::Optimizer(spec);
            config.validate()?;
            run_experiment(&run, config, "optimize")
        }
        Command::Report { inputs, out } => cmd_report(&inputs, out.as_deref()),
        Command::Reproduce { target, seed, shots, out } => {
            let opts = reproduce::Options::load(seed, shots)?;
            let dir = output_dir(out.as_deref(), "reproduce").join(target.name());
            reproduce::run_target(target, &opts, dir)
        }
        Command::Validate { quick, noise_config } => {
            let outcomes = validate::run_battery(quick, noise_config.as_deref());
            Ok(validate::print_outcomes(&outcomes))
        }
    }
}

/// Entry point for the binary: parse `std::env::args`, run, map to an exit
/// code (1 for failed checks, 2 for errors).
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
