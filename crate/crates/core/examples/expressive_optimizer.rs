//! Minimize the expressive ansatz energy with the coordinate/golden-section
//! optimizer and compare against exact diagonalization.
//!
//! ```text
//! cargo run --release --example expressive_optimizer -- 4 4
//! ```

use spinchain_vqe::ansatz::{AnsatzFamily, AnsatzSpec};
use spinchain_vqe::model::HeisenbergChain;
use spinchain_vqe::runner::{run_sweep, Execution, ExperimentConfig, OptimizerSpec, Sweep};

fn main() -> spinchain_vqe::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sites = args.first().copied().unwrap_or(3);
    let layers = args.get(1).copied().unwrap_or(4);

    let config = ExperimentConfig {
        chain: HeisenbergChain::antiferro(sites)?,
        ansatz: AnsatzSpec::new(AnsatzFamily::Expressive, sites, layers)?,
        execution: Execution::Exact,
        sweep: Sweep::Optimizer(OptimizerSpec::default()),
    };
    let started = std::time::Instant::now();
    let result = run_sweep(&config)?;

    println!("N = {sites}, L = {layers}, {} parameters", config.ansatz.parameter_count());
    for (k, p) in result.points.iter().enumerate().step_by((result.points.len() / 10).max(1)) {
        println!("  improvement {k:>4}: E = {:.8}", p.estimate.energy);
    }
    println!("best E     = {:.8}", result.min_energy());
    println!("exact E0   = {:.8}", result.reference_energy);
    println!("error      = {:.3e}", result.error);
    println!("evaluations {} ({}), {:.2?}", result.evaluations,
        if result.converged { "converged" } else { "budget exhausted" }, started.elapsed());
    Ok(())
}
