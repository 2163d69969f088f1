//! Pauli strings, weighted sums of them, and their exact action on states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{StateVector, NORM_TOLERANCE};

/// Imaginary residue tolerated in ⟨ψ|O|ψ⟩ before the observable is rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(PauliAxis::I),
            'X' => Ok(PauliAxis::X),
            'Y' => Ok(PauliAxis::Y),
            'Z' => Ok(PauliAxis::Z),
            other => Err(Error::Parse(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

/// Tensor product of single-site Paulis with a real coefficient. Axis `k`
/// acts on site `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
    coeff: f64,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>, coeff: f64) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidQubitCount(0));
        }
        Ok(Self { axes, coeff })
    }

    /// Parse an axes string such as `"XXI"` (site 0 first).
    pub fn parse(axes: &str, coeff: f64) -> Result<Self> {
        let axes = axes
            .chars()
            .map(PauliAxis::from_char)
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes, coeff)
    }

    /// A two-site term `P_i P_j` padded with identities.
    pub fn two_site(qubit_count: usize, i: usize, j: usize, axis: PauliAxis, coeff: f64) -> Self {
        let mut axes = vec![PauliAxis::I; qubit_count];
        axes[i] = axis;
        axes[j] = axis;
        Self { axes, coeff }
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn qubit_count(&self) -> usize {
        self.axes.len()
    }

    pub fn with_coeff(&self, coeff: f64) -> Self {
        Self {
            axes: self.axes.clone(),
            coeff,
        }
    }

    pub fn axes_string(&self) -> String {
        self.axes.iter().map(|a| a.as_char()).collect()
    }

    /// Sites carrying a non-identity axis.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != PauliAxis::I)
            .map(|(i, _)| i)
            .collect()
    }

    /// Bitmask of non-identity sites.
    pub fn support_mask(&self) -> usize {
        self.support().iter().fold(0, |m, &s| m | 1 << s)
    }

    fn masks(&self) -> (usize, usize, u32) {
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut y_count = 0u32;
        for (i, a) in self.axes.iter().enumerate() {
            match a {
                PauliAxis::I => {}
                PauliAxis::X => flip |= 1 << i,
                PauliAxis::Y => {
                    flip |= 1 << i;
                    phase |= 1 << i;
                    y_count += 1;
                }
                PauliAxis::Z => phase |= 1 << i,
            }
        }
        (flip, phase, y_count)
    }

    /// `P|k⟩ = phase(k)·|k ⊕ flip⟩`, with `Y = iXZ` supplying `i^{#Y}`.
    fn for_each_image(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        let (flip, phase_mask, y_count) = self.masks();
        let base = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let dim = 1usize << self.axes.len();
        for k in 0..dim {
            let sign = if (k & phase_mask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            f(k, k ^ flip, base * sign);
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coeff, self.axes_string())
    }
}

/// `s·ψ`, coefficient included.
pub fn apply_pauli_string(s: &PauliString, psi: &StateVector) -> Result<StateVector> {
    psi.check_qubits(s.qubit_count())?;
    let amps = psi.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    s.for_each_image(|k, image, phase| out[image] = phase * amps[k] * s.coeff);
    Ok(StateVector::from_raw_unchecked(out, psi.qubit_count()))
}

/// ⟨ψ|s|ψ⟩ as a complex number, coefficient included.
fn string_expectation(s: &PauliString, amps: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    s.for_each_image(|k, image, phase| acc += amps[image].conj() * phase * amps[k]);
    acc * s.coeff
}

/// Weighted sum of Pauli strings on a fixed register. Terms with identical
/// axes are merged at construction, keeping first-appearance order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    terms: Vec<PauliString>,
    qubit_count: usize,
}

impl Observable {
    pub fn new(qubit_count: usize, terms: Vec<PauliString>) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidQubitCount(0));
        }
        let mut merged: Vec<PauliString> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.qubit_count() != qubit_count {
                return Err(Error::DimensionMismatch {
                    expected: qubit_count,
                    found: t.qubit_count(),
                });
            }
            match merged.iter_mut().find(|m| m.axes == t.axes) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        Ok(Self {
            terms: merged,
            qubit_count,
        })
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// `a·self + b·other`
    pub fn linear_combination(&self, a: f64, other: &Observable, b: f64) -> Result<Observable> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.with_coeff(a * t.coeff))
            .chain(other.terms.iter().map(|t| t.with_coeff(b * t.coeff)))
            .collect();
        Observable::new(self.qubit_count, terms)
    }

    /// Dense row-major matrix, dimension `2^N × 2^N`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = 1usize << self.qubit_count;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for t in &self.terms {
            t.for_each_image(|k, image, phase| m[image * dim + k] += phase * t.coeff);
        }
        m
    }

    /// Parse the text format: one `<coeff> <axes>` term per line. Blank lines
    /// and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(c), Some(axes), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `<coeff> <axes>`",
                    lineno + 1
                )));
            };
            let coeff: f64 = c
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            terms.push(PauliString::parse(axes, coeff)?);
        }
        let n = terms
            .first()
            .map(|t| t.qubit_count())
            .ok_or_else(|| Error::Parse("observable has no terms".into()))?;
        Observable::new(n, terms)
    }

    pub fn to_text(&self) -> String {
        self.terms.iter().map(|t| format!("{t}\n")).collect()
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::from_text(s)
    }
}

/// ⟨ψ|obs|ψ⟩. Fails if ψ is not normalized or the result has an imaginary
/// part above [`HERMITIAN_TOLERANCE`].
pub fn exact_expectation(obs: &Observable, psi: &StateVector) -> Result<f64> {
    psi.check_qubits(obs.qubit_count())?;
    let n2 = psi.norm_sqr();
    if (n2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(n2));
    }
    let total: Complex64 = obs
        .terms
        .iter()
        .map(|t| string_expectation(t, psi.amplitudes()))
        .sum();
    if total.im.abs() > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian(total.im));
    }
    Ok(total.re)
}

/// Exact expectation of a single term (coefficient included).
pub fn term_expectation(term: &PauliString, psi: &StateVector) -> Result<f64> {
    let obs = Observable::new(term.qubit_count(), vec![term.clone()])?;
    exact_expectation(&obs, psi)
}
