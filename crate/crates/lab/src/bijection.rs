//! Exhaustive checks of the switching bijection between S(c,c) and S(q,c).

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::Zero;
use recolour_core::switching::{q_switch, StepEngine};
use recolour_core::{Colour, Colouring, Graph};
use serde::Serialize;

use crate::dist::{tv_distance, ColouringDistribution};
use crate::enumerate::{encode, proper_colour_vectors};
use crate::error::{LabError, LabResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BijectionCheck {
    pub c: Colour,
    pub q: Colour,
    /// |S(c,c)|: `σ_v = σ_u = c` and `u ∉ Q_{c,q}`.
    pub domain: usize,
    /// |S(q,c)|: `σ_v = q, σ_u = c` and `u ∉ Q_{q,c}`.
    pub codomain: usize,
    pub collisions: usize,
    pub outside_range: usize,
    pub improper: usize,
    pub not_inverted: usize,
    /// TV between the push-forward of uniform on S(c,c) and uniform on S(q,c).
    #[serde(skip)]
    pub pushforward_tv: BigRational,
}

impl BijectionCheck {
    pub fn violations(&self) -> usize {
        self.collisions + self.outside_range + self.improper + self.not_inverted + usize::from(self.domain != self.codomain)
    }

    pub fn pass(&self) -> bool {
        self.violations() == 0 && self.pushforward_tv.is_zero()
    }
}

/// One record per ordered pair `c ≠ q` for the non-adjacent pair `(v, u)`.
pub fn check_bijection(g: &Graph, v: usize, u: usize, k: usize) -> LabResult<Vec<BijectionCheck>> {
    if v == u || g.has_edge(v, u) {
        return Err(LabError::Invalid(format!("({v}, {u}) must be distinct and non-adjacent")));
    }
    let n = g.n();
    let mut engine = StepEngine::new(n);
    let omega: Vec<Colouring> = proper_colour_vectors(g, k)?
        .into_iter()
        .map(|cs| Colouring::new(cs, k))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for c in 0..k as Colour {
        for q in (0..k as Colour).filter(|&q| q != c) {
            let mut domain = Vec::new();
            let mut codomain = HashSet::new();
            for x in &omega {
                let (cv, cu) = (x.colour(v), x.colour(u));
                if cv == c && cu == c && !engine.component(g, x, v, q, u, None)?.contains_u {
                    domain.push(x);
                }
                if cv == q && cu == c && !engine.component(g, x, v, c, u, None)?.contains_u {
                    codomain.insert(encode(x.colours(), k));
                }
            }
            let mut images: HashMap<u64, usize> = HashMap::new();
            let (mut outside_range, mut improper, mut not_inverted) = (0, 0, 0);
            for x in &domain {
                let comp = engine.component(g, x, v, q, u, None)?;
                let y = q_switch(x, &comp);
                let code = encode(y.colours(), k);
                *images.entry(code).or_default() += 1;
                if !codomain.contains(&code) {
                    outside_range += 1;
                }
                if !y.is_proper(g) {
                    improper += 1;
                }
                let back = engine.component(g, &y, v, c, u, None)?;
                if &q_switch(&y, &back) != *x {
                    not_inverted += 1;
                }
            }
            let collisions = images.values().map(|&m| m - 1).sum();
            let pushforward_tv = if domain.is_empty() && codomain.is_empty() {
                BigRational::zero()
            } else if domain.is_empty() || codomain.is_empty() {
                BigRational::from_integer(1.into())
            } else {
                let pushed = ColouringDistribution::uniform(
                    n,
                    k,
                    images.iter().flat_map(|(&code, &m)| std::iter::repeat_n(code, m)),
                )?;
                let target = ColouringDistribution::uniform(n, k, codomain.iter().copied())?;
                tv_distance(&pushed, &target)?
            };
            out.push(BijectionCheck {
                c,
                q,
                domain: domain.len(),
                codomain: codomain.len(),
                collisions,
                outside_range,
                improper,
                not_inverted,
                pushforward_tv,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_pairs_are_bijective() {
        let g = Graph::path(4);
        for k in 2..=4 {
            for check in check_bijection(&g, 0, 3, k).unwrap() {
                assert!(check.pass(), "{check:?}");
            }
        }
    }

    #[test]
    fn cycle_sizes_match() {
        let g = Graph::cycle(6);
        let checks = check_bijection(&g, 0, 3, 3).unwrap();
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(BijectionCheck::pass));
        assert!(checks.iter().any(|c| c.domain > 0));
    }

    #[test]
    fn adjacent_pair_rejected() {
        assert!(check_bijection(&Graph::path(3), 0, 1, 3).is_err());
    }
}
