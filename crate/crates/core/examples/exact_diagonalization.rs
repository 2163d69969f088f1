//! Ground energies, gaps and magnetization content of short Heisenberg chains.

use spinchain_vqe::model::{exact_diagonalize, magnetization_sector, HeisenbergChain};

fn main() -> spinchain_vqe::Result<()> {
    println!("{:>3} {:>14} {:>12}  ground-state S^z weights", "N", "E0", "gap");
    for n in 2..=8 {
        let sol = exact_diagonalize(&HeisenbergChain::antiferro(n)?)?;
        let sectors = magnetization_sector(&sol.ground_state)?;
        let weights: Vec<String> = sectors
            .by_magnetization()
            .into_iter()
            .filter(|(_, w)| *w > 1e-12)
            .map(|(m, w)| format!("{m:+}:{w:.3}"))
            .collect();
        println!("{n:>3} {:>14.10} {:>12.8}  {}", sol.ground_energy, sol.gap(), weights.join(" "));
    }
    Ok(())
}
