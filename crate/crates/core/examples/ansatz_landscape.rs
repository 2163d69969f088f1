//! Noiseless single-parameter landscapes of the hardware-efficient and
//! exchange ansätze for two sites, with the weight each state leaves outside
//! the Néel magnetization sector.
//!
//! ```text
//! cargo run --example ansatz_landscape
//! ```

use spinchain_vqe::ansatz::{build_exchange, build_hea};
use spinchain_vqe::model::{build_hamiltonian, magnetization_sector, HeisenbergChain};
use spinchain_vqe::pauli::exact_expectation;
use spinchain_vqe::runner::GridSpec;

fn main() -> spinchain_vqe::Result<()> {
    let h = build_hamiltonian(&HeisenbergChain::antiferro(2)?);
    let hea = build_hea(2)?;
    let exchange = build_exchange(2, 1)?;
    let grid: GridSpec = "0:2pi:25".parse()?;

    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "theta", "E_hea", "leak_hea", "E_exch", "leak_exch");
    for t in grid.values() {
        let a = hea.prepare(&[t])?;
        let b = exchange.prepare(&[t])?;
        println!(
            "{t:>8.4} {:>10.5} {:>10.5} {:>10.5} {:>10.1e}",
            exact_expectation(&h, &a)?,
            magnetization_sector(&a)?.leakage_from(1),
            exact_expectation(&h, &b)?,
            magnetization_sector(&b)?.leakage_from(1),
        );
    }
    Ok(())
}
