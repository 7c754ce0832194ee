//! Multi-index arithmetic and truncated jet index sets.
//!
//! A multi-index is a tuple of `N` non-negative integers labelling a mixed
//! partial derivative; its order is the component sum. Jet fibers truncated
//! at order `p` are indexed by all multi-indices of order at most `p`,
//! enumerated here in graded lexicographic order (by order first, then
//! lexicographically inside each grade) so that every matrix module in the
//! crate agrees on the same basis ordering.

use crate::scalar::binomial;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// A multi-index: `N` non-negative components.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// Unit vector in direction `mu`.
    pub fn unit(n: usize, mu: usize) -> Self {
        let mut v = vec![0; n];
        v[mu] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Order: the component sum.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `self + unit(mu)`.
    pub fn bump(&self, mu: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[mu] += 1;
        MultiIndex(v)
    }

    /// `self - unit(mu)`, or `None` if the component is already zero.
    pub fn lower(&self, mu: usize) -> Option<MultiIndex> {
        if self.0[mu] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[mu] -= 1;
        Some(MultiIndex(v))
    }

    /// Componentwise difference, `None` unless `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut v = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if b > a {
                return None;
            }
            v.push(a - b);
        }
        Some(MultiIndex(v))
    }

    /// `m!` as a big integer.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &c in &self.0 {
            for k in 2..=c {
                acc *= BigInt::from(k);
            }
        }
        acc
    }

    /// Graded lexicographic comparison key.
    fn grlex_key(&self) -> (u32, Vec<u32>) {
        (self.order(), self.0.clone())
    }
}

/// Sum of multi-index orders, as used for the enumeration length.
pub fn order(m: &MultiIndex) -> u32 {
    m.order()
}

/// All multi-indices with `N` components and order at most `p`, in graded
/// lexicographic order. The length is `binomial(N + p, p)`.
pub fn enumerate(n: usize, p: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "need at least one dimension");
    let mut all = Vec::new();
    for grade in 0..=p {
        let mut grade_indices = Vec::new();
        compositions(n, grade, &mut vec![0; n], 0, &mut grade_indices);
        grade_indices.sort_by_key(|m: &MultiIndex| m.0.clone());
        all.extend(grade_indices);
    }
    debug_assert!(all
        .windows(2)
        .all(|w| w[0].grlex_key() < w[1].grlex_key()));
    all
}

fn compositions(n: usize, rest: u32, buf: &mut Vec<u32>, pos: usize, out: &mut Vec<MultiIndex>) {
    if pos == n - 1 {
        buf[pos] = rest;
        out.push(MultiIndex(buf.clone()));
        return;
    }
    for c in 0..=rest {
        buf[pos] = c;
        compositions(n, rest - c, buf, pos + 1, out);
    }
    buf[pos] = 0;
}

/// Product over components of per-component binomial coefficients; zero
/// whenever some component of `m` exceeds the matching component of `n`.
pub fn multi_binomial(n: &MultiIndex, m: &MultiIndex) -> BigInt {
    assert_eq!(n.dim(), m.dim());
    let mut acc = BigInt::one();
    for (a, b) in n.0.iter().zip(&m.0) {
        if b > a {
            return BigInt::zero();
        }
        acc *= binomial(*a as i64, *b as i64);
    }
    acc
}

/// The three binomial reduction identities behind the dimension-lowering
/// step of the charge calculus:
///
/// ```text
/// C(N+p, p)   - C(N+p-1, p-1) = C(N-1+p, p)
/// C(N+p, p-1) - C(N+p-1, p-2) = C(N-1+p, p-1)
/// C(N+p, p-2) - C(N+p-1, p-3) = C(N-1+p, p-2)
/// ```
///
/// Terms with negative lower argument are zero.
pub fn verify_np1(n: u32, p: u32) -> bool {
    let (n, p) = (n as i64, p as i64);
    (0..3).all(|shift| {
        binomial(n + p, p - shift) - binomial(n + p - 1, p - 1 - shift)
            == binomial(n - 1 + p, p - shift)
    })
}
