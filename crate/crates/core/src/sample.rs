//! Tuple enumeration: exhaustive or seeded sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Which tuples a check visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sample {
    /// Every tuple over the host's vertices.
    All,
    /// `count` tuples drawn uniformly with replacement from a ChaCha8
    /// stream seeded by `seed`.
    Random { count: usize, seed: u64 },
}

impl Sample {
    /// Materializes `arity`-tuples of vertex indices in `0..n`.
    pub fn tuples<const K: usize>(self, n: usize) -> Result<Vec<[u32; K]>> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        match self {
            Sample::All => {
                let total = n
                    .checked_pow(K as u32)
                    .filter(|t| *t <= 1 << 31)
                    .ok_or_else(|| Error::BadParams(format!("{n}^{K} tuples is too many to enumerate")))?;
                Ok((0..total)
                    .map(|mut i| {
                        let mut t = [0u32; K];
                        for slot in t.iter_mut().rev() {
                            *slot = (i % n) as u32;
                            i /= n;
                        }
                        t
                    })
                    .collect())
            }
            Sample::Random { count, seed } => {
                if count == 0 {
                    return Err(Error::EmptySample);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..count)
                    .map(|_| {
                        let mut t = [0u32; K];
                        for slot in &mut t {
                            *slot = rng.gen_range(0..n as u32);
                        }
                        t
                    })
                    .collect())
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Sample::All => "all".to_string(),
            Sample::Random { count, seed } => format!("random count={count} seed={seed}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_enumeration_is_ordered() {
        let t = Sample::All.tuples::<2>(3).unwrap();
        assert_eq!(t.len(), 9);
        assert_eq!(t[0], [0, 0]);
        assert_eq!(t[5], [1, 2]);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = Sample::Random { count: 50, seed: 7 }.tuples::<4>(10).unwrap();
        let b = Sample::Random { count: 50, seed: 7 }.tuples::<4>(10).unwrap();
        assert_eq!(a, b);
        assert!(Sample::Random { count: 0, seed: 7 }.tuples::<4>(10).is_err());
    }
}
