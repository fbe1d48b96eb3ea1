//! Index-driven sequences: normalizing scales `r̃`, point sequences `x̃`, and
//! the strictly increasing index maps that pick subsequences.
//!
//! Sequences are indexed from `n = 1`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{Exact, Real};
use crate::metric::Point;

type ScaleRule = dyn Fn(usize) -> Real + Send + Sync;
type PointRule = dyn Fn(usize) -> Point + Send + Sync;
type IndexRule = dyn Fn(usize) -> usize + Send + Sync;

/// A positive sequence `r_n -> 0`.
#[derive(Clone)]
pub struct NormalizingSequence {
    label: String,
    rule: Arc<ScaleRule>,
}

impl NormalizingSequence {
    pub fn new(label: impl Into<String>, rule: impl Fn(usize) -> Real + Send + Sync + 'static) -> Self {
        NormalizingSequence {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    /// `r_n = ratio^n`, exact.
    pub fn geometric(ratio: Exact) -> Self {
        let label = format!("({ratio})^n");
        NormalizingSequence::new(label, move |n| {
            let mut r = Exact::one();
            for _ in 0..n {
                r = &r * &ratio;
            }
            Real::Exact(r)
        })
    }

    /// `r_n = 3^-n`.
    pub fn powers_of_three() -> Self {
        NormalizingSequence::new("3^-n", |n| Real::Exact(Exact::pow3(-(n as i64))))
    }

    /// `r_n = 2^-n`.
    pub fn powers_of_two() -> Self {
        NormalizingSequence::new("2^-n", |n| {
            let mut r = Exact::one();
            let half = Exact::ratio(1, 2);
            for _ in 0..n {
                r = &r * &half;
            }
            Real::Exact(r)
        })
    }

    /// `r_n = 1/n`.
    pub fn harmonic() -> Self {
        NormalizingSequence::new("1/n", |n| Real::Exact(Exact::ratio(1, n as i64)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn at(&self, n: usize) -> Real {
        (self.rule)(n)
    }

    /// `r̃' = {r_{n_k}}`.
    pub fn subsequence(&self, selector: &IndexSelector) -> NormalizingSequence {
        let base = self.rule.clone();
        let pick = selector.rule.clone();
        NormalizingSequence {
            label: format!("{}[{}]", self.label, selector.label),
            rule: Arc::new(move |k| base(pick(k))),
        }
    }
}

impl fmt::Debug for NormalizingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormalizingSequence({})", self.label)
    }
}

/// A sequence of points `x̃ = {x_n}` of one space.
#[derive(Clone)]
pub struct PointSequence {
    label: String,
    rule: Arc<PointRule>,
}

impl PointSequence {
    pub fn new(label: impl Into<String>, rule: impl Fn(usize) -> Point + Send + Sync + 'static) -> Self {
        PointSequence {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    /// `ã = {a, a, ...}`.
    pub fn constant(label: impl Into<String>, p: Point) -> Self {
        PointSequence::new(label, move |_| p.clone())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn at(&self, n: usize) -> Point {
        (self.rule)(n)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `x̃' = {x_{n_k}}`.
    pub fn subsequence(&self, selector: &IndexSelector) -> PointSequence {
        let base = self.rule.clone();
        let pick = selector.rule.clone();
        PointSequence {
            label: format!("{}[{}]", self.label, selector.label),
            rule: Arc::new(move |k| base(pick(k))),
        }
    }
}

impl fmt::Debug for PointSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSequence({})", self.label)
    }
}

/// A strictly increasing map `k ↦ n_k` on positive integers.
#[derive(Clone)]
pub struct IndexSelector {
    label: String,
    rule: Arc<IndexRule>,
}

impl IndexSelector {
    pub fn new(label: impl Into<String>, rule: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        IndexSelector {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    /// `n_k = 2k`.
    pub fn even() -> Self {
        IndexSelector::new("2k", |k| 2 * k)
    }

    /// `n_k = 2k - 1`.
    pub fn odd() -> Self {
        IndexSelector::new("2k-1", |k| 2 * k - 1)
    }

    /// `n_k = k^2`.
    pub fn squares() -> Self {
        IndexSelector::new("k^2", |k| k * k)
    }

    /// Random gaps in `{1, 2, 3}`, fixed by `seed` for the first `len` terms
    /// and unit gaps beyond.
    pub fn random(seed: u64, len: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = Vec::with_capacity(len + 1);
        table.push(0usize);
        let mut n = 0usize;
        for _ in 0..len {
            n += rng.random_range(1..=3);
            table.push(n);
        }
        let last = n;
        IndexSelector::new(format!("random(seed={seed})"), move |k| {
            if k < table.len() {
                table[k]
            } else {
                last + (k - len)
            }
        })
    }

    /// The default suite: even, odd, squares and one seeded random map.
    pub fn default_suite(seed: u64, len: usize) -> Vec<IndexSelector> {
        vec![
            IndexSelector::even(),
            IndexSelector::odd(),
            IndexSelector::squares(),
            IndexSelector::random(seed, len),
        ]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn at(&self, k: usize) -> usize {
        (self.rule)(k)
    }

    /// Checks `n_1 >= 1` and strict increase on `1..=len`.
    pub fn is_strictly_increasing(&self, len: usize) -> bool {
        let mut prev = 0;
        for k in 1..=len {
            let n = self.at(k);
            if n <= prev {
                return false;
            }
            prev = n;
        }
        true
    }
}

impl fmt::Debug for IndexSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSelector({})", self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_scales_tend_to_zero() {
        for r in [
            NormalizingSequence::powers_of_three(),
            NormalizingSequence::powers_of_two(),
            NormalizingSequence::geometric(Exact::ratio(7, 10)),
        ] {
            assert!(r.at(1).is_positive());
            assert!(r.at(100).to_f64() < 1e-9, "{}", r.label());
        }
        // 1/n needs N = 10^9 + 1 terms; check exactly instead
        assert!(NormalizingSequence::harmonic().at(2_000_000_000).to_f64() < 1e-9);
    }

    #[test]
    fn selectors_are_strictly_increasing() {
        for s in IndexSelector::default_suite(7, 256) {
            assert!(s.is_strictly_increasing(512), "{}", s.label());
        }
        assert_eq!(IndexSelector::squares().at(5), 25);
        assert_eq!(IndexSelector::odd().at(1), 1);
    }

    #[test]
    fn subsequence_composes() {
        let r = NormalizingSequence::powers_of_three().subsequence(&IndexSelector::even());
        assert_eq!(r.at(3), Real::Exact(Exact::pow3(-6)));
    }
}
