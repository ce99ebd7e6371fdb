//! Exact probability distributions over colourings.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enumerate::decode;
use crate::error::{LabError, LabResult};
use recolour_core::Colour;

/// Probability law on `[k]^n`, stored as integer masses over a common
/// total so every probability is the exact fraction `mass / total`.
/// Keys are canonical colouring codes (see [`crate::enumerate::encode`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouringDistribution {
    n: usize,
    k: usize,
    masses: BTreeMap<u64, BigUint>,
    total: BigUint,
}

impl ColouringDistribution {
    pub fn from_masses(n: usize, k: usize, mut masses: BTreeMap<u64, BigUint>) -> LabResult<Self> {
        masses.retain(|_, m| !m.is_zero());
        let total: BigUint = masses.values().sum();
        if total.is_zero() {
            return Err(LabError::Invalid("distribution has no mass".into()));
        }
        Ok(ColouringDistribution { n, k, masses, total })
    }

    /// Equal mass on every listed code (duplicates count twice).
    pub fn uniform<I: IntoIterator<Item = u64>>(n: usize, k: usize, codes: I) -> LabResult<Self> {
        let mut masses = BTreeMap::new();
        for c in codes {
            *masses.entry(c).or_insert_with(BigUint::zero) += 1u32;
        }
        Self::from_masses(n, k, masses)
    }

    pub fn point(n: usize, k: usize, code: u64) -> Self {
        Self::uniform(n, k, [code]).expect("one point has mass")
    }

    /// Builds the distribution from exact probabilities, which must sum to 1.
    pub fn from_probabilities<I>(n: usize, k: usize, entries: I) -> LabResult<Self>
    where
        I: IntoIterator<Item = (u64, BigRational)>,
    {
        let mut probs: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (code, p) in entries {
            if p.is_negative() {
                return Err(LabError::Invalid("negative probability".into()));
            }
            *probs.entry(code).or_insert_with(BigRational::zero) += p;
        }
        let sum: BigRational = probs.values().sum();
        if !sum.is_one() {
            return Err(LabError::Invalid(format!("probabilities sum to {sum}, not 1")));
        }
        let denom = probs
            .values()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let masses = probs
            .into_iter()
            .map(|(code, p)| {
                let m = p.numer() * (&denom / p.denom());
                (code, m.to_biguint().expect("non-negative"))
            })
            .collect();
        Self::from_masses(n, k, masses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }

    pub fn total_mass(&self) -> &BigUint {
        &self.total
    }

    pub fn probability(&self, code: u64) -> BigRational {
        match self.masses.get(&code) {
            None => BigRational::zero(),
            Some(m) => BigRational::new(m.clone().into(), self.total.clone().into()),
        }
    }

    /// Probability of the set of colourings satisfying `event`.
    pub fn probability_of(&self, mut event: impl FnMut(&[Colour]) -> bool) -> BigRational {
        let hit: BigUint = self
            .masses
            .iter()
            .filter(|(code, _)| event(&decode(**code, self.n, self.k)))
            .map(|(_, m)| m)
            .sum();
        BigRational::new(hit.into(), self.total.clone().into())
    }

    /// `(code, probability)` in code order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, BigRational)> + '_ {
        self.masses
            .iter()
            .map(|(c, m)| (*c, BigRational::new(m.clone().into(), self.total.clone().into())))
    }

    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        self.masses.keys().copied()
    }
}

/// Half the L1 distance, exact.
pub fn tv_distance(a: &ColouringDistribution, b: &ColouringDistribution) -> LabResult<BigRational> {
    if a.n != b.n || a.k != b.k {
        return Err(LabError::Invalid(format!(
            "distributions over different spaces: (n={}, k={}) vs (n={}, k={})",
            a.n, a.k, b.n, b.k
        )));
    }
    let zero = BigUint::zero();
    let mut keys: Vec<u64> = a.masses.keys().chain(b.masses.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut sum = BigUint::zero();
    for key in keys {
        let x = a.masses.get(&key).unwrap_or(&zero) * &b.total;
        let y = b.masses.get(&key).unwrap_or(&zero) * &a.total;
        sum += if x >= y { x - y } else { y - x };
    }
    let denom = BigUint::from(2u32) * &a.total * &b.total;
    Ok(BigRational::new(sum.into(), denom.into()))
}

/// `"num/den"` in lowest terms.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tv_examples() {
        let u = ColouringDistribution::uniform(2, 2, [1, 2]).unwrap();
        let p = ColouringDistribution::point(2, 2, 1);
        assert_eq!(tv_distance(&u, &u).unwrap(), r(0, 1));
        assert_eq!(tv_distance(&u, &p).unwrap(), r(1, 2));
        let q = ColouringDistribution::point(2, 2, 3);
        assert_eq!(tv_distance(&u, &q).unwrap(), r(1, 1));
        let other = ColouringDistribution::point(3, 2, 1);
        assert!(tv_distance(&u, &other).is_err());
    }

    #[test]
    fn probabilities_convert_exactly() {
        let d = ColouringDistribution::from_probabilities(2, 3, [(0, r(1, 6)), (4, r(1, 3)), (0, r(1, 6)), (5, r(1, 3))])
            .unwrap();
        assert_eq!(d.probability(0), r(1, 3));
        assert_eq!(d.probability(4), r(1, 3));
        assert_eq!(d.probability(7), r(0, 1));
        assert_eq!(d.iter().map(|(_, p)| p).sum::<BigRational>(), r(1, 1));
        assert!(ColouringDistribution::from_probabilities(2, 3, [(0, r(1, 2))]).is_err());
        assert_eq!(ratio_string(&r(2, 4)), "1/2");
    }

    #[test]
    fn event_probability() {
        // Colourings of two vertices with k = 2: codes 0..4.
        let d = ColouringDistribution::uniform(2, 2, 0..4).unwrap();
        assert_eq!(d.probability_of(|c| c[0] == c[1]), r(1, 2));
    }
}
