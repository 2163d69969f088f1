//! Variational circuit families and their initial states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{init_basis_state, Angle, Circuit, GateTemplate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzFamily {
    /// Shared-angle `R_y` layer followed by a CNOT ladder.
    Hea,
    /// Shared-angle nearest-neighbour exchange unitaries, one angle per layer.
    Exchange,
    /// Independent `R_y` per site per layer, each layer closed by a CNOT ladder.
    Expressive,
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzFamily::Hea => "hea",
            AnsatzFamily::Exchange => "exchange",
            AnsatzFamily::Expressive => "expressive",
        })
    }
}

impl FromStr for AnsatzFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hea" => Ok(AnsatzFamily::Hea),
            "exchange" | "physics" | "physics-informed" => Ok(AnsatzFamily::Exchange),
            "expressive" => Ok(AnsatzFamily::Expressive),
            other => Err(Error::Config(format!("unknown ansatz family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub sites: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(family: AnsatzFamily, sites: usize, layers: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Config(format!("ansatz needs at least 2 sites, got {sites}")));
        }
        if layers == 0 {
            return Err(Error::Config("layer count must be at least 1".into()));
        }
        if family == AnsatzFamily::Hea && layers != 1 {
            return Err(Error::Config("the hardware-efficient ansatz has a single layer".into()));
        }
        Ok(Self {
            family,
            sites,
            layers,
        })
    }

    pub fn parameter_count(&self) -> usize {
        match self.family {
            AnsatzFamily::Hea => 1,
            AnsatzFamily::Exchange => self.layers,
            AnsatzFamily::Expressive => self.sites * self.layers,
        }
    }

    /// Whether the family conserves total magnetization by construction.
    pub fn symmetry_preserving(&self) -> bool {
        self.family == AnsatzFamily::Exchange
    }

    pub fn build(&self) -> Result<Ansatz> {
        let circuit = match self.family {
            AnsatzFamily::Hea => hea_circuit(self.sites)?,
            AnsatzFamily::Exchange => exchange_circuit(self.sites, self.layers)?,
            AnsatzFamily::Expressive => expressive_circuit(self.sites, self.layers)?,
        };
        Ok(Ansatz {
            spec: *self,
            circuit,
            initial: neel_state(self.sites)?,
        })
    }
}

/// A circuit together with the basis state it acts on.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub spec: AnsatzSpec,
    pub circuit: Circuit,
    pub initial: StateVector,
}

impl Ansatz {
    pub fn parameter_count(&self) -> usize {
        self.circuit.parameter_count()
    }

    pub fn prepare(&self, params: &[f64]) -> Result<StateVector> {
        crate::statevec::run_circuit(&self.circuit, params, &self.initial)
    }
}

/// `|0101…⟩`, site 0 in `|0⟩`.
pub fn neel_bits(sites: usize) -> Vec<u8> {
    (0..sites).map(|i| (i % 2) as u8).collect()
}

pub fn neel_state(sites: usize) -> Result<StateVector> {
    init_basis_state(sites, &neel_bits(sites))
}

fn cnot_ladder(circuit: &mut Circuit, sites: usize) -> Result<()> {
    for i in 0..sites - 1 {
        circuit.push(GateTemplate::Cnot {
            control: i,
            target: i + 1,
        })?;
    }
    Ok(())
}

fn hea_circuit(sites: usize) -> Result<Circuit> {
    let mut c = Circuit::new(sites, vec!["theta".into()])?;
    for s in 0..sites {
        c.push(GateTemplate::Ry {
            site: s,
            angle: Angle::Param(0),
        })?;
    }
    cnot_ladder(&mut c, sites)?;
    Ok(c)
}

fn exchange_circuit(sites: usize, layers: usize) -> Result<Circuit> {
    let slots = (0..layers).map(|l| format!("theta_{l}")).collect();
    let mut c = Circuit::new(sites, slots)?;
    for l in 0..layers {
        for i in 0..sites - 1 {
            c.push(GateTemplate::Exchange {
                angle: Angle::Param(l),
                i,
                j: i + 1,
            })?;
        }
    }
    Ok(c)
}

fn expressive_circuit(sites: usize, layers: usize) -> Result<Circuit> {
    let slots = (0..layers)
        .flat_map(|l| (0..sites).map(move |s| format!("theta_{l}_{s}")))
        .collect();
    let mut c = Circuit::new(sites, slots)?;
    for l in 0..layers {
        for s in 0..sites {
            c.push(GateTemplate::Ry {
                site: s,
                angle: Angle::Param(l * sites + s),
            })?;
        }
        cnot_ladder(&mut c, sites)?;
    }
    Ok(c)
}

/// `CNOT_{0,1}·(R_y(θ) ⊗ R_y(θ))|01⟩` for two sites; a shared-angle
/// `R_y` layer plus CNOT ladder on the Néel state beyond that.
pub fn build_hea(sites: usize) -> Result<Ansatz> {
    AnsatzSpec::new(AnsatzFamily::Hea, sites, 1)?.build()
}

pub fn build_exchange(sites: usize, layers: usize) -> Result<Ansatz> {
    AnsatzSpec::new(AnsatzFamily::Exchange, sites, layers)?.build()
}

pub fn build_expressive(sites: usize, layers: usize) -> Result<Ansatz> {
    AnsatzSpec::new(AnsatzFamily::Expressive, sites, layers)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, magnetization_sector, HeisenbergChain};
    use crate::pauli::exact_expectation;
    use crate::rng::rng_from_seed;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::PI;

    fn energy(a: &Ansatz, params: &[f64]) -> f64 {
        let h = build_hamiltonian(&HeisenbergChain::antiferro(a.spec.sites).unwrap());
        exact_expectation(&h, &a.prepare(params).unwrap()).unwrap()
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(build_hea(2).unwrap().parameter_count(), 1);
        assert_eq!(build_exchange(5, 1).unwrap().parameter_count(), 1);
        assert_eq!(build_exchange(5, 3).unwrap().parameter_count(), 3);
        assert_eq!(build_expressive(4, 3).unwrap().parameter_count(), 12);
        for spec in [
            AnsatzSpec::new(AnsatzFamily::Hea, 3, 1).unwrap(),
            AnsatzSpec::new(AnsatzFamily::Exchange, 4, 2).unwrap(),
            AnsatzSpec::new(AnsatzFamily::Expressive, 3, 2).unwrap(),
        ] {
            assert_eq!(spec.build().unwrap().parameter_count(), spec.parameter_count());
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(build_hea(1).is_err());
        assert!(build_expressive(3, 0).is_err());
        assert!(AnsatzSpec::new(AnsatzFamily::Hea, 2, 2).is_err());
        assert!("bogus".parse::<AnsatzFamily>().is_err());
    }

    #[test]
    fn neel_states() {
        assert_eq!(neel_bits(2), vec![0, 1]);
        assert_eq!(neel_bits(4), vec![0, 1, 0, 1]);
        let psi = neel_state(3).unwrap();
        let h = build_hamiltonian(&HeisenbergChain::antiferro(3).unwrap());
        assert_abs_diff_eq!(exact_expectation(&h, &psi).unwrap(), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn hea_at_zero_is_cnot_on_neel() {
        let a = build_hea(2).unwrap();
        // control site 0 is |0⟩, so CNOT leaves |01⟩ alone
        assert_eq!(a.prepare(&[0.0]).unwrap(), neel_state(2).unwrap());
    }

    #[test]
    fn hea_energy_matches_closed_form() {
        // Hand-derived amplitudes of CNOT(R_y⊗R_y)|01⟩ give
        // E(θ) = −cosθ + sinθ + sinθ·cosθ.
        let a = build_hea(2).unwrap();
        for k in 0..8 {
            let t = -PI + k as f64 * 0.77;
            let closed = -t.cos() + t.sin() + t.sin() * t.cos();
            assert_abs_diff_eq!(energy(&a, &[t]), closed, epsilon = 1e-12);
        }
    }

    #[test]
    fn exchange_two_site_energy_is_constant() {
        let a = build_exchange(2, 1).unwrap();
        for k in 0..50 {
            let t = PI * k as f64 / 49.0;
            assert_abs_diff_eq!(energy(&a, &[t]), -1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn exchange_three_site_identity_point() {
        let a = build_exchange(3, 1).unwrap();
        assert_abs_diff_eq!(energy(&a, &[0.0]), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn expressive_zero_angles() {
        let a = build_expressive(2, 1).unwrap();
        assert_abs_diff_eq!(energy(&a, &[0.0, 0.0]), -1.0, epsilon = 1e-12);
        // Beyond two sites the CNOT ladder maps the Néel bits to their prefix
        // XOR, a basis state whose energy is the sum of ±1 bond parities.
        for n in 3..=5 {
            let a = build_expressive(n, 1).unwrap();
            let mut bits = neel_bits(n);
            for i in 1..n {
                bits[i] ^= bits[i - 1];
            }
            let zz: f64 = bits
                .windows(2)
                .map(|w| if w[0] == w[1] { 1.0 } else { -1.0 })
                .sum();
            assert_abs_diff_eq!(energy(&a, &vec![0.0; n]), zz, epsilon = 1e-12);
        }
    }

    #[test]
    fn exchange_conserves_magnetization() {
        let mut rng = rng_from_seed(11);
        for n in 2..=6 {
            for layers in 1..=3 {
                let a = build_exchange(n, layers).unwrap();
                for _ in 0..32 {
                    let params: Vec<f64> = (0..layers).map(|_| rng.random_range(-PI..PI)).collect();
                    let out = a.prepare(&params).unwrap();
                    let r = magnetization_sector(&out).unwrap();
                    assert!(r.leakage_from(n / 2) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hea_leaves_the_sector() {
        let a = build_hea(2).unwrap();
        let leak = (0..50)
            .map(|k| PI * k as f64 / 49.0)
            .map(|t| {
                magnetization_sector(&a.prepare(&[t]).unwrap())
                    .unwrap()
                    .leakage_from(1)
            })
            .fold(0.0, f64::max);
        assert!(leak > 0.01);
    }
}
