//! Exact branch enumeration of randomised code.
//!
//! [`enumerate_branches`] runs a closure repeatedly against a [`Chooser`]
//! that replays a prefix of recorded choices and then always takes the first
//! available option. After each run the last choice with an untried option
//! is advanced, depth first, until every branch has been visited. Each
//! branch comes back with its exact probability, so the result is the exact
//! law of whatever the closure computes from its random choices.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use recolour_core::Chooser;

use crate::error::{LabError, LabResult};

enum Options {
    Uniform(usize),
    Weighted(Vec<BigUint>),
}

struct Frame {
    options: Options,
    taken: usize,
}

impl Frame {
    fn next_option(&self) -> Option<usize> {
        match &self.options {
            Options::Uniform(n) => (self.taken + 1 < *n).then_some(self.taken + 1),
            Options::Weighted(w) => (self.taken + 1..w.len()).find(|&i| !w[i].is_zero()),
        }
    }

    fn probability(&self) -> BigRational {
        match &self.options {
            Options::Uniform(n) => BigRational::new(1.into(), (*n as i64).into()),
            Options::Weighted(w) => {
                let total: BigUint = w.iter().sum();
                BigRational::new(w[self.taken].clone().into(), total.into())
            }
        }
    }
}

#[derive(Default)]
pub struct ReplayChooser {
    frames: Vec<Frame>,
    pos: usize,
}

impl ReplayChooser {
    fn probability(&self) -> BigRational {
        self.frames
            .iter()
            .fold(BigRational::one(), |acc, f| acc * f.probability())
    }

    /// Moves to the next unexplored branch; false once all are done.
    fn advance(&mut self) -> bool {
        self.frames.truncate(self.pos);
        while let Some(last) = self.frames.last_mut() {
            if let Some(next) = last.next_option() {
                last.taken = next;
                self.pos = 0;
                return true;
            }
            self.frames.pop();
        }
        false
    }
}

impl Chooser for ReplayChooser {
    fn pick_uniform(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        let taken = if self.pos < self.frames.len() {
            self.frames[self.pos].taken
        } else {
            self.frames.push(Frame {
                options: Options::Uniform(n),
                taken: 0,
            });
            0
        };
        self.pos += 1;
        taken
    }

    fn pick_weighted(&mut self, weights: &[BigUint]) -> usize {
        let taken = if self.pos < self.frames.len() {
            self.frames[self.pos].taken
        } else {
            let first = weights
                .iter()
                .position(|w| !w.is_zero())
                .expect("at least one positive weight");
            self.frames.push(Frame {
                options: Options::Weighted(weights.to_vec()),
                taken: first,
            });
            first
        };
        self.pos += 1;
        taken
    }
}

/// Every branch of `f` with its exact probability, in depth-first order.
/// Fails once more than `limit` branches have been produced.
pub fn enumerate_branches<T, F>(mut f: F, limit: usize) -> LabResult<Vec<(T, BigRational)>>
where
    F: FnMut(&mut ReplayChooser) -> LabResult<T>,
{
    let mut chooser = ReplayChooser::default();
    let mut out = Vec::new();
    loop {
        chooser.pos = 0;
        let value = f(&mut chooser)?;
        out.push((value, chooser.probability()));
        if out.len() > limit {
            return Err(LabError::GuardExceeded {
                what: "branches",
                size: out.len() as f64,
                limit: limit as f64,
            });
        }
        if !chooser.advance() {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_closure_has_one_branch() {
        let b = enumerate_branches(|_| Ok(7), 10).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0], (7, BigRational::one()));
    }

    #[test]
    fn nested_choices_multiply() {
        // First pick in 0..2; on 1 pick again in 0..3.
        let b = enumerate_branches(
            |ch| {
                let a = ch.pick_uniform(2);
                Ok(if a == 0 { (0, 0) } else { (1, ch.pick_uniform(3)) })
            },
            100,
        )
        .unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(
            b,
            vec![((0, 0), r(1, 2)), ((1, 0), r(1, 6)), ((1, 1), r(1, 6)), ((1, 2), r(1, 6))]
        );
    }

    #[test]
    fn weighted_skips_zeros() {
        let w: Vec<BigUint> = [0u32, 3, 0, 1].iter().map(|&x| x.into()).collect();
        let b = enumerate_branches(|ch| Ok(ch.pick_weighted(&w)), 100).unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(b, vec![(1, r(3, 4)), (3, r(1, 4))]);
    }

    #[test]
    fn limit_is_enforced() {
        assert!(enumerate_branches(|ch| Ok(ch.pick_uniform(5)), 3).is_err());
    }
}
