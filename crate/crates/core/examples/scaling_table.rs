//! Energy versus chain length: exact ground energy, optimized expressive
//! ansatz, and the best exchange-ansatz grid point, written as CSV.

use spinchain_vqe::ansatz::{AnsatzFamily, AnsatzSpec};
use spinchain_vqe::model::HeisenbergChain;
use spinchain_vqe::runner::{
    make_report, run_sweep, Execution, ExperimentConfig, GridSpec, OptimizerSpec, Sweep,
};

fn main() -> spinchain_vqe::Result<()> {
    let mut results = Vec::new();
    for n in 2..=4 {
        let chain = HeisenbergChain::antiferro(n)?;
        let layers = if n == 2 { 3 } else { 4 };
        results.push(run_sweep(&ExperimentConfig {
            chain,
            ansatz: AnsatzSpec::new(AnsatzFamily::Expressive, n, layers)?,
            execution: Execution::Exact,
            sweep: Sweep::Optimizer(OptimizerSpec::default()),
        })?);
        results.push(run_sweep(&ExperimentConfig {
            chain,
            ansatz: AnsatzSpec::new(AnsatzFamily::Exchange, n, 1)?,
            execution: Execution::Exact,
            sweep: Sweep::Grid(GridSpec::default()),
        })?);
    }
    print!("{}", make_report(&results).table_csv()?);
    Ok(())
}
