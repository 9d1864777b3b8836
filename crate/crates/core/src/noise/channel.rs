use serde::{Deserialize, Serialize};

use crate::circuit::Pauli;
use crate::error::{Error, Result};

/// Single-qubit Pauli channel
/// `rho -> (1 - px - py - pz) rho + px X rho X + py Y rho Y + pz Z rho Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel1Q {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliChannel1Q {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        let c = Self { px, py, pz };
        c.validate()?;
        Ok(c)
    }

    /// Depolarizing channel with `px = py = pz = p`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, p, p)
    }

    pub fn identity() -> Self {
        Self {
            px: 0.0,
            py: 0.0,
            pz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_probs(&[self.px, self.py, self.pz], "1q Pauli channel")
    }

    pub fn error_probability(&self) -> f64 {
        self.px + self.py + self.pz
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            px: self.px * s,
            py: self.py * s,
            pz: self.pz * s,
        }
    }

    /// Probabilities of I, X, Y, Z.
    pub fn kraus_probabilities(&self) -> [f64; 4] {
        [1.0 - self.error_probability(), self.px, self.py, self.pz]
    }
}

/// Two-qubit Pauli channel over the 15 non-identity products `P1 (x) P2`.
/// `probs[4 * a + b]` belongs to `Pauli::ALL[a] (x) Pauli::ALL[b]`, the first
/// factor acting on the first qubit of the pair; entry 0 is unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel2Q {
    probs: [f64; 16],
}

impl PauliChannel2Q {
    pub fn new(mut probs: [f64; 16]) -> Result<Self> {
        probs[0] = 0.0;
        let c = Self { probs };
        c.validate()?;
        Ok(c)
    }

    /// Z-biased channel: `IZ`, `ZI`, `ZZ` at `pz_class`, the other twelve
    /// terms at `other_class`.
    pub fn z_biased(pz_class: f64, other_class: f64) -> Result<Self> {
        let mut probs = [other_class; 16];
        for (a, b) in [
            (Pauli::I, Pauli::Z),
            (Pauli::Z, Pauli::I),
            (Pauli::Z, Pauli::Z),
        ] {
            probs[Self::index(a, b)] = pz_class;
        }
        Self::new(probs)
    }

    pub fn identity() -> Self {
        Self { probs: [0.0; 16] }
    }

    pub fn index(a: Pauli, b: Pauli) -> usize {
        4 * a as usize + b as usize
    }

    pub fn prob(&self, a: Pauli, b: Pauli) -> f64 {
        if a == Pauli::I && b == Pauli::I {
            1.0 - self.error_probability()
        } else {
            self.probs[Self::index(a, b)]
        }
    }

    /// `(pz_class, other_class)` when the channel has the Z-biased shape.
    pub fn class_values(&self) -> Option<(f64, f64)> {
        let pz = self.probs[Self::index(Pauli::Z, Pauli::Z)];
        let other = self.probs[Self::index(Pauli::X, Pauli::I)];
        (Self::z_biased(pz, other).ok()? == *self).then_some((pz, other))
    }

    pub fn validate(&self) -> Result<()> {
        validate_probs(&self.probs[1..], "2q Pauli channel")
    }

    pub fn error_probability(&self) -> f64 {
        self.probs[1..].iter().sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut probs = self.probs;
        probs[1..].iter_mut().for_each(|p| *p *= s);
        Self { probs }
    }

    /// All 16 probabilities including the identity term.
    pub fn kraus_probabilities(&self) -> [f64; 16] {
        let mut out = self.probs;
        out[0] = 1.0 - self.error_probability();
        out
    }
}

fn validate_probs(ps: &[f64], what: &str) -> Result<()> {
    if let Some(p) = ps.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidNoise(format!(
            "{what}: probability {p} is negative or not finite"
        )));
    }
    let total: f64 = ps.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::InvalidNoise(format!(
            "{what}: total error probability {total} exceeds 1"
        )));
    }
    Ok(())
}

/// A Pauli channel of either arity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Channel {
    One(PauliChannel1Q),
    Two(PauliChannel2Q),
}

/// One non-identity term of a channel: probability and Pauli per qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub prob: f64,
    pub paulis: [Pauli; 2],
}

impl Channel {
    pub fn arity(&self) -> usize {
        match self {
            Channel::One(_) => 1,
            Channel::Two(_) => 2,
        }
    }

    pub fn error_probability(&self) -> f64 {
        match self {
            Channel::One(c) => c.error_probability(),
            Channel::Two(c) => c.error_probability(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Channel::One(c) => c.validate(),
            Channel::Two(c) => c.validate(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.error_probability() == 0.0
    }

    /// Non-identity terms with nonzero probability, in a fixed order.
    pub fn terms(&self) -> Vec<PauliTerm> {
        match self {
            Channel::One(c) => [(c.px, Pauli::X), (c.py, Pauli::Y), (c.pz, Pauli::Z)]
                .into_iter()
                .filter(|(p, _)| *p > 0.0)
                .map(|(prob, p)| PauliTerm {
                    prob,
                    paulis: [p, Pauli::I],
                })
                .collect(),
            Channel::Two(c) => {
                let mut out = Vec::new();
                for a in Pauli::ALL {
                    for b in Pauli::ALL {
                        if (a, b) == (Pauli::I, Pauli::I) {
                            continue;
                        }
                        let prob = c.prob(a, b);
                        if prob > 0.0 {
                            out.push(PauliTerm {
                                prob,
                                paulis: [a, b],
                            });
                        }
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PauliChannel1Q::new(0.5, 0.3, 0.3).is_err());
        assert!(PauliChannel1Q::new(-0.1, 0.0, 0.0).is_err());
        assert!(PauliChannel1Q::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(PauliChannel2Q::z_biased(0.2, 0.1).is_err());
        assert!(PauliChannel2Q::z_biased(1.5e-3, 1.5e-4).is_ok());
    }

    #[test]
    fn kraus_probabilities_sum_to_one() {
        let c = PauliChannel1Q::new(3e-5, 3e-5, 3e-3).unwrap();
        assert!((c.kraus_probabilities().iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        let c = PauliChannel2Q::z_biased(1.5e-3, 1.5e-4).unwrap();
        assert!((c.kraus_probabilities().iter().sum::<f64>() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn z_biased_layout() {
        let c = PauliChannel2Q::z_biased(1.5e-3, 1.5e-4).unwrap();
        assert_eq!(c.prob(Pauli::I, Pauli::Z), 1.5e-3);
        assert_eq!(c.prob(Pauli::Z, Pauli::I), 1.5e-3);
        assert_eq!(c.prob(Pauli::Z, Pauli::Z), 1.5e-3);
        assert_eq!(c.prob(Pauli::X, Pauli::Y), 1.5e-4);
        assert_eq!(c.class_values(), Some((1.5e-3, 1.5e-4)));
        assert_eq!(Channel::Two(c).terms().len(), 15);
        let mut probs = [1e-4; 16];
        probs[5] = 2e-4;
        assert_eq!(PauliChannel2Q::new(probs).unwrap().class_values(), None);
    }

    #[test]
    fn identity_channel_has_no_terms() {
        assert!(Channel::One(PauliChannel1Q::identity()).terms().is_empty());
        assert!(Channel::Two(PauliChannel2Q::identity()).is_identity());
    }
}
