//! Logistic-map sequences and the argsort permutations built from them.

use std::cmp::Ordering;

use thiserror::Error;

/// Lower edge of the chaotic regime of the logistic map.
pub const MU_CHAOTIC_MIN: f64 = 3.569_945_6;
/// Upper edge of the chaotic regime (the map leaves `[0, 1]` above it).
pub const MU_CHAOTIC_MAX: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("initial value {0} is outside the open interval (0, 1)")]
    InitialValue(f64),
    #[error("bifurcation parameter {0} is outside the chaotic regime [{MU_CHAOTIC_MIN}, {MU_CHAOTIC_MAX}]")]
    Bifurcation(f64),
    #[error("sequence length must be at least 1")]
    ZeroCount,
    #[error("orbit collapsed to {value} at iterate {iterate}")]
    DegenerateOrbit { iterate: u64, value: f64 },
    #[error("cannot build a permutation from an empty sequence")]
    EmptySequence,
    #[error("index list is not a permutation of 0..{0}")]
    NotABijection(usize),
    #[error("length mismatch: vector has {vector} elements, permutation has {permutation}")]
    LengthMismatch { vector: usize, permutation: usize },
}

/// Parameters of one logistic-map key: start value, bifurcation parameter
/// and the number of leading iterates thrown away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub x0: f64,
    pub mu: f64,
    pub discard: u64,
}

impl LogisticParams {
    pub fn new(x0: f64, mu: f64, discard: u64) -> Result<Self, ChaosError> {
        let params = Self { x0, mu, discard };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ChaosError> {
        // NaN fails both comparisons.
        if !(self.x0 > 0.0 && self.x0 < 1.0) {
            return Err(ChaosError::InitialValue(self.x0));
        }
        if !(MU_CHAOTIC_MIN..=MU_CHAOTIC_MAX).contains(&self.mu) {
            return Err(ChaosError::Bifurcation(self.mu));
        }
        Ok(())
    }
}

/// Iterates `x <- mu * x * (1 - x)` from `x0`, drops `discard` iterates and
/// returns the next `count`. Element `i` is iterate number `discard + i + 1`.
pub fn logistic_sequence(params: &LogisticParams, count: usize) -> Result<Vec<f64>, ChaosError> {
    params.validate()?;
    if count == 0 {
        return Err(ChaosError::ZeroCount);
    }
    let LogisticParams { x0, mu, discard } = *params;
    let mut x = x0;
    let mut iterate = 0u64;
    let mut step = |x: f64| -> Result<f64, ChaosError> {
        iterate += 1;
        let next = mu * x * (1.0 - x);
        if next > 0.0 && next < 1.0 {
            Ok(next)
        } else {
            Err(ChaosError::DegenerateOrbit { iterate, value: next })
        }
    };
    for _ in 0..discard {
        x = step(x)?;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        x = step(x)?;
        out.push(x);
    }
    Ok(out)
}

/// A bijection on `0..n`, stored as the gather index: applying it to `v`
/// yields `out[j] = v[index[j]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    index: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { index: (0..n).collect() }
    }

    /// Checks that `index` contains every value of `0..index.len()` exactly once.
    pub fn from_indices(index: Vec<usize>) -> Result<Self, ChaosError> {
        let n = index.len();
        let mut seen = vec![false; n];
        for &i in &index {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(ChaosError::NotABijection(n));
            }
        }
        Ok(Self { index })
    }

    /// Stable ascending argsort of `seq`: `index[j]` is the position of the
    /// j-th smallest value, equal values keep their original order.
    pub fn from_sequence(seq: &[f64]) -> Result<Self, ChaosError> {
        if seq.is_empty() {
            return Err(ChaosError::EmptySequence);
        }
        let mut index: Vec<usize> = (0..seq.len()).collect();
        index.sort_by(|&a, &b| seq[a].partial_cmp(&seq[b]).unwrap_or(Ordering::Equal));
        Ok(Self { index })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.index
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.index.len()];
        for (i, &p) in self.index.iter().enumerate() {
            inv[p] = i;
        }
        Self { index: inv }
    }

    pub fn apply<T: Clone>(&self, v: &[T]) -> Result<Vec<T>, ChaosError> {
        if v.len() != self.index.len() {
            return Err(ChaosError::LengthMismatch {
                vector: v.len(),
                permutation: self.index.len(),
            });
        }
        Ok(self.index.iter().map(|&i| v[i].clone()).collect())
    }
}

pub fn permutation_from_sequence(seq: &[f64]) -> Result<Permutation, ChaosError> {
    Permutation::from_sequence(seq)
}

pub fn invert_permutation(p: &Permutation) -> Permutation {
    p.inverse()
}

pub fn apply_permutation<T: Clone>(v: &[T], p: &Permutation) -> Result<Vec<T>, ChaosError> {
    p.apply(v)
}

/// Scrambling permutation for a key: argsort of its first `len` retained iterates.
pub fn scrambling_permutation(params: &LogisticParams, len: usize) -> Result<Permutation, ChaosError> {
    Permutation::from_sequence(&logistic_sequence(params, len)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_indices(v.to_vec()).unwrap()
    }

    #[test]
    fn first_iterate_by_hand() {
        let p = LogisticParams::new(0.31, 3.8, 0).unwrap();
        let s = logistic_sequence(&p, 1).unwrap();
        assert!((s[0] - 3.8 * 0.31 * 0.69).abs() < 1e-15);
        assert!((s[0] - 0.81282).abs() < 1e-12);
    }

    #[test]
    fn discard_skips_leading_iterates() {
        let p = LogisticParams::new(0.31, 3.8, 1).unwrap();
        let s = logistic_sequence(&p, 1).unwrap();
        let first = 3.8 * 0.31 * (1.0 - 0.31);
        assert_eq!(s[0], 3.8 * first * (1.0 - first));
        assert!((s[0] - 0.578_145_86).abs() < 1e-8);

        let long = logistic_sequence(&LogisticParams::new(0.31, 3.8, 0).unwrap(), 5).unwrap();
        let skipped = logistic_sequence(&LogisticParams::new(0.31, 3.8, 2).unwrap(), 3).unwrap();
        assert_eq!(&long[2..], &skipped[..]);
    }

    #[test]
    fn fixed_point_at_mu_four() {
        let p = LogisticParams::new(0.75, 4.0, 0).unwrap();
        assert_eq!(logistic_sequence(&p, 3).unwrap(), vec![0.75; 3]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(LogisticParams::new(0.0, 3.8, 0), Err(ChaosError::InitialValue(0.0)));
        assert_eq!(LogisticParams::new(1.0, 3.8, 0), Err(ChaosError::InitialValue(1.0)));
        assert!(matches!(LogisticParams::new(f64::NAN, 3.8, 0), Err(ChaosError::InitialValue(_))));
        assert_eq!(LogisticParams::new(0.3, 3.5, 0), Err(ChaosError::Bifurcation(3.5)));
        assert_eq!(LogisticParams::new(0.3, 4.0001, 0), Err(ChaosError::Bifurcation(4.0001)));
        assert!(LogisticParams::new(0.3, MU_CHAOTIC_MIN, 0).is_ok());
        let p = LogisticParams::new(0.3, 3.9, 0).unwrap();
        assert_eq!(logistic_sequence(&p, 0), Err(ChaosError::ZeroCount));
    }

    #[test]
    fn collapsing_orbit_is_an_error() {
        let p = LogisticParams::new(0.5, 4.0, 0).unwrap();
        assert!(matches!(
            logistic_sequence(&p, 4),
            Err(ChaosError::DegenerateOrbit { iterate: 1, .. })
        ));
    }

    #[test]
    fn argsort_examples() {
        assert_eq!(permutation_from_sequence(&[0.5, 0.1, 0.9]).unwrap().as_slice(), &[1, 0, 2]);
        assert_eq!(permutation_from_sequence(&[0.1, 0.2, 0.3]).unwrap().as_slice(), &[0, 1, 2]);
        assert_eq!(permutation_from_sequence(&[0.3, 0.3, 0.1]).unwrap().as_slice(), &[2, 0, 1]);
        assert_eq!(permutation_from_sequence(&[]), Err(ChaosError::EmptySequence));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(invert_permutation(&perm(&[1, 0, 2])), perm(&[1, 0, 2]));
        assert_eq!(invert_permutation(&perm(&[0, 1, 2])), perm(&[0, 1, 2]));
        let p = perm(&[2, 0, 1]);
        let q = invert_permutation(&p);
        assert_eq!(q, perm(&[1, 2, 0]));
        for i in 0..3 {
            assert_eq!(q.as_slice()[p.as_slice()[i]], i);
        }
    }

    #[test]
    fn apply_examples() {
        let abc = ['a', 'b', 'c'];
        assert_eq!(apply_permutation(&abc, &perm(&[1, 0, 2])).unwrap(), vec!['b', 'a', 'c']);
        assert_eq!(apply_permutation(&abc, &perm(&[0, 1, 2])).unwrap(), abc.to_vec());
        assert_eq!(
            apply_permutation(&[10, 20, 30, 40], &perm(&[3, 2, 1, 0])).unwrap(),
            vec![40, 30, 20, 10]
        );
        assert_eq!(
            apply_permutation(&[1, 2], &perm(&[0, 1, 2])),
            Err(ChaosError::LengthMismatch { vector: 2, permutation: 3 })
        );
    }

    #[test]
    fn from_indices_rejects_non_bijections() {
        assert!(Permutation::from_indices(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_indices(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_indices(vec![]).is_ok());
    }

    fn valid_params() -> impl Strategy<Value = LogisticParams> {
        (1e-6..1.0 - 1e-6, MU_CHAOTIC_MIN..3.999_999, 0u64..2000)
            .prop_map(|(x0, mu, discard)| LogisticParams { x0, mu, discard })
    }

    proptest! {
        #[test]
        fn sequence_stays_in_open_unit_interval(p in valid_params(), n in 1usize..3000) {
            let s = logistic_sequence(&p, n).unwrap();
            prop_assert_eq!(s.len(), n);
            prop_assert!(s.iter().all(|&x| x > 0.0 && x < 1.0));
            let again = logistic_sequence(&p, n).unwrap();
            prop_assert!(s.iter().zip(&again).all(|(a, b)| a.to_bits() == b.to_bits()));
        }

        #[test]
        fn argsort_is_bijection_and_inverse_restores(seq in prop::collection::vec(0.0f64..1.0, 1..500)) {
            let p = permutation_from_sequence(&seq).unwrap();
            let mut sorted = p.as_slice().to_vec();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..seq.len()).collect::<Vec<_>>());
            let sorted_vals = p.apply(&seq).unwrap();
            prop_assert!(sorted_vals.windows(2).all(|w| w[0] <= w[1]));
            let back = p.inverse().apply(&sorted_vals).unwrap();
            prop_assert_eq!(back, seq);
        }
    }
}
