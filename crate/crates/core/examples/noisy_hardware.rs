//! Two-site exchange and hardware-efficient landscapes under the calibrated
//! superconducting-device noise model, next to their noiseless curves.
//!
//! Pass a noise-model JSON file to use custom parameters instead:
//!
//! ```text
//! cargo run --release --example noisy_hardware -- my_noise.json
//! ```

use spinchain_vqe::ansatz::{AnsatzFamily, AnsatzSpec};
use spinchain_vqe::measure::Shots;
use spinchain_vqe::model::HeisenbergChain;
use spinchain_vqe::noise::NoiseModel;
use spinchain_vqe::runner::{run_sweep, Execution, ExperimentConfig, GridSpec, Sweep};

fn main() -> spinchain_vqe::Result<()> {
    let model = match std::env::args().nth(1) {
        Some(path) => NoiseModel::load(path.as_ref())?,
        None => NoiseModel::garnet(),
    };
    println!("{model:#?}");

    let grid: GridSpec = "0:2pi:33".parse()?;
    let sweep = |family, execution| {
        run_sweep(&ExperimentConfig {
            chain: HeisenbergChain::antiferro(2)?,
            ansatz: AnsatzSpec::new(family, 2, 1)?,
            execution,
            sweep: Sweep::Grid(grid),
        })
    };
    let noisy = Execution::Noisy { model, shots: Shots::Finite(1500), seed: 11 };
    let runs = [
        sweep(AnsatzFamily::Exchange, Execution::Exact)?,
        sweep(AnsatzFamily::Exchange, noisy)?,
        sweep(AnsatzFamily::Hea, Execution::Exact)?,
        sweep(AnsatzFamily::Hea, noisy)?,
    ];

    println!("{:>8} {:>9} {:>16} {:>9} {:>16}", "theta", "exch", "exch noisy", "hea", "hea noisy");
    for k in 0..grid.points {
        let e = |i: usize| &runs[i].points[k].estimate;
        println!(
            "{:>8.4} {:>9.4} {:>9.4} ± {:.3} {:>9.4} {:>9.4} ± {:.3}",
            runs[0].points[k].params[0],
            e(0).energy,
            e(1).energy,
            e(1).sigma,
            e(2).energy,
            e(3).energy,
            e(3).sigma
        );
    }
    for r in &runs {
        println!("{:>10} {:>8}: min {:+.4}", r.config.ansatz.family, r.config.execution.label(), r.min_energy());
    }
    Ok(())
}
