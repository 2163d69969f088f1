//! Open-boundary antiferromagnetic Heisenberg chain and its exact spectrum.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Observable, PauliAxis, PauliString};
use crate::statevec::{StateVector, NORM_TOLERANCE};

/// Largest chain handled by dense diagonalization.
pub const MAX_EXACT_SITES: usize = 12;

/// `H = J Σ_{i<N-1} (X_iX_{i+1} + Y_iY_{i+1} + Z_iZ_{i+1})`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergChain {
    sites: usize,
    coupling: f64,
}

impl HeisenbergChain {
    pub fn new(sites: usize, coupling: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Config(format!("chain needs at least 2 sites, got {sites}")));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::Config(format!(
                "coupling must be positive (antiferromagnetic), got {coupling}"
            )));
        }
        Ok(Self { sites, coupling })
    }

    /// Unit coupling, `J = 1`.
    pub fn antiferro(sites: usize) -> Result<Self> {
        Self::new(sites, 1.0)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }
}

pub fn build_hamiltonian(chain: &HeisenbergChain) -> Observable {
    let n = chain.sites;
    let terms = (0..n - 1)
        .flat_map(|i| {
            [PauliAxis::X, PauliAxis::Y, PauliAxis::Z]
                .map(|axis| PauliString::two_site(n, i, i + 1, axis, chain.coupling))
        })
        .collect();
    Observable::new(n, terms).expect("chain terms share the register size")
}

#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub ground_energy: f64,
    pub ground_state: StateVector,
    /// All `2^N` eigenvalues, ascending.
    pub spectrum: Vec<f64>,
}

impl ExactSolution {
    /// `E_1 − E_0`, counting degenerate levels separately.
    pub fn gap(&self) -> f64 {
        self.spectrum.get(1).map_or(0.0, |e1| e1 - self.ground_energy)
    }
}

/// Real symmetric matrix of an observable whose dense form has no imaginary
/// entries (true of every Heisenberg chain: `Y⊗Y` is real).
pub fn real_dense_matrix(obs: &Observable) -> Result<DMatrix<f64>> {
    let dim = 1usize << obs.qubit_count();
    let dense = obs.to_dense();
    let max_im = dense.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_im > 0.0 {
        return Err(Error::NonHermitian(max_im));
    }
    Ok(DMatrix::from_row_iterator(
        dim,
        dim,
        dense.iter().map(|z| z.re),
    ))
}

pub fn exact_diagonalize(chain: &HeisenbergChain) -> Result<ExactSolution> {
    if chain.sites > MAX_EXACT_SITES {
        return Err(Error::UnsupportedSize {
            size: chain.sites,
            limit: MAX_EXACT_SITES,
        });
    }
    let h = real_dense_matrix(&build_hamiltonian(chain))?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spectrum: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let ground = eig.eigenvectors.column(order[0]);
    let amps = ground.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(ExactSolution {
        ground_energy: spectrum[0],
        ground_state: StateVector::normalized(amps)?,
        spectrum,
    })
}

/// Probability mass per Hamming weight (number of `1` sites).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub mass_by_weight: Vec<f64>,
}

impl SectorReport {
    /// Mass outside the given Hamming-weight sector.
    pub fn leakage_from(&self, weight: usize) -> f64 {
        self.mass_by_weight
            .iter()
            .enumerate()
            .filter(|(w, _)| *w != weight)
            .map(|(_, m)| m)
            .sum()
    }

    /// `S^z_tot = (N − 2w)/2` for weight `w`, paired with its mass.
    pub fn by_magnetization(&self) -> Vec<(f64, f64)> {
        let n = self.mass_by_weight.len() - 1;
        self.mass_by_weight
            .iter()
            .enumerate()
            .map(|(w, &m)| ((n as f64 - 2.0 * w as f64) / 2.0, m))
            .collect()
    }
}

pub fn magnetization_sector(psi: &StateVector) -> Result<SectorReport> {
    if !psi.is_normalized() {
        return Err(Error::NotNormalized(psi.norm_sqr()));
    }
    let mut mass = vec![0.0; psi.qubit_count() + 1];
    for (k, a) in psi.amplitudes().iter().enumerate() {
        mass[k.count_ones() as usize] += a.norm_sqr();
    }
    debug_assert!((mass.iter().sum::<f64>() - 1.0).abs() <= NORM_TOLERANCE);
    Ok(SectorReport {
        mass_by_weight: mass,
    })
}
