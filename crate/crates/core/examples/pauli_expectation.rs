//! Build an observable from text, evaluate it exactly, and apply single Pauli
//! strings to basis states.

use spinchain_vqe::pauli::{apply_pauli_string, exact_expectation, Observable, PauliString};
use spinchain_vqe::statevec::init_basis_state;

const HAMILTONIAN: &str = "\
# two-bond Heisenberg chain
1.0 XXI
1.0 YYI
1.0 ZZI
1.0 IXX
1.0 IYY
1.0 IZZ
";

fn main() -> spinchain_vqe::Result<()> {
    let h: Observable = HAMILTONIAN.parse()?;
    println!("{} terms on {} sites", h.terms().len(), h.qubit_count());

    for bits in [[0, 0, 0], [0, 1, 0], [1, 1, 0]] {
        let psi = init_basis_state(3, &bits)?;
        println!("<{bits:?}|H|{bits:?}> = {:+.3}", exact_expectation(&h, &psi)?);
    }

    // Y on site 0 of |00⟩ gives i|10⟩
    let y0 = PauliString::parse("YI", 1.0)?;
    let out = apply_pauli_string(&y0, &init_basis_state(2, &[0, 0])?)?;
    for (k, a) in out.amplitudes().iter().enumerate().filter(|(_, a)| a.norm() > 0.0) {
        println!("YI|00> has amplitude {a} on index {k}");
    }
    print!("{}", h.to_text());
    Ok(())
}
