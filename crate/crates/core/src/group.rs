//! Finite Abelian groups presented as ordered products of cyclic groups.
//!
//! Elements are residue vectors; every element also has a canonical rank in
//! `[0, order)` given by lexicographic mixed radix (the last factor varies
//! fastest). Dense functions and spectra are indexed by this rank, and the
//! dual group is identified with the group itself through the pairing
//! `<a, x> = exp(2 pi i sum_k a_k x_k / n_k)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce `m` into `[0, n)`.
pub(crate) fn reduce(m: i64, n: u64) -> u64 {
    (m as i128).rem_euclid(n as i128) as u64
}

/// Inverse of `m` modulo `n`, if it exists.
pub(crate) fn mod_inverse(m: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let g = (m as i128).extended_gcd(&(n as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(n as i128) as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GroupSpec {
    factors: Vec<u64>,
    order: u64,
    exponent: u64,
    // strides[k] = prod_{j > k} n_j
    strides: Vec<u64>,
}

impl GroupSpec {
    pub fn new(factor_orders: &[u64]) -> Result<Self> {
        if factor_orders.is_empty() {
            return Err(Error::EmptyGroup);
        }
        let mut order: u64 = 1;
        let mut exponent: u64 = 1;
        for &n in factor_orders {
            if n < 2 {
                return Err(Error::FactorTooSmall(n));
            }
            order = order.checked_mul(n).ok_or(Error::OrderOverflow)?;
            exponent = exponent.lcm(&n);
        }
        let mut strides = vec![1u64; factor_orders.len()];
        for k in (0..factor_orders.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * factor_orders[k + 1];
        }
        Ok(Self {
            factors: factor_orders.to_vec(),
            order,
            exponent,
            strides,
        })
    }

    /// Cyclic group of order `n`.
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of elements as a `usize`, for indexing dense storage.
    pub fn size(&self) -> usize {
        self.order as usize
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn rank_of(&self, x: &GroupElement) -> usize {
        x.0.iter()
            .zip(&self.strides)
            .map(|(&r, &s)| (r * s) as usize)
            .sum()
    }

    pub fn unrank(&self, rank: usize) -> GroupElement {
        let mut rank = rank as u64;
        let residues = self
            .strides
            .iter()
            .zip(&self.factors)
            .map(|(&s, &n)| {
                let r = rank / s;
                rank -= r * s;
                r % n
            })
            .collect();
        GroupElement(residues)
    }

    /// All elements in canonical rank order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size()).map(move |r| self.unrank(r))
    }

    /// Build an element from arbitrary integers, reducing each component.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_len(residues.len())?;
        Ok(GroupElement(
            residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &n)| reduce(r, n))
                .collect(),
        ))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                found: len,
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.0.len() == self.factors.len() && x.0.iter().zip(&self.factors).all(|(&r, &n)| r < n)
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        self.check_len(x.0.len())?;
        if !self.contains(x) {
            return Err(Error::Precondition(format!("{x} is not reduced in {self}")));
        }
        Ok(())
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.factors)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        ))
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement(
            x.0.iter()
                .zip(&self.factors)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        ))
    }

    /// Integer action `m * x`; negative `m` is allowed.
    pub fn scalar_mul(&self, m: i64, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement(
            x.0.iter()
                .zip(&self.factors)
                .map(|(&a, &n)| ((reduce(m, n) as u128 * a as u128) % n as u128) as u64)
                .collect(),
        ))
    }

    /// Rank-level integer action, used by the dense hot paths.
    pub fn scalar_mul_rank(&self, m: i64, rank: usize) -> usize {
        let mut rest = rank as u64;
        let mut out = 0u64;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let r = rest / s;
            rest -= r * s;
            let v = ((reduce(m, n) as u128 * r as u128) % n as u128) as u64;
            out += v * s;
        }
        out as usize
    }

    pub fn neg_rank(&self, rank: usize) -> usize {
        self.scalar_mul_rank(-1, rank)
    }

    /// Least `m >= 1` with `m * x = 0`.
    pub fn element_order(&self, x: &GroupElement) -> u64 {
        x.0.iter()
            .zip(&self.factors)
            .map(|(&r, &n)| n / r.gcd(&n))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// The all-ones element; its order is the exponent.
    pub fn max_order_element(&self) -> GroupElement {
        GroupElement(vec![1; self.factors.len()])
    }

    /// Phase numerator of the pairing: `<a, x> = e(phase / exponent)`.
    pub(crate) fn pairing_phase(&self, a: &[u64], x: &[u64]) -> u64 {
        let e = self.exponent as u128;
        let mut acc: u128 = 0;
        for ((&ai, &xi), &n) in a.iter().zip(x).zip(&self.factors) {
            let scale = (self.exponent / n) as u128;
            acc = (acc + (ai as u128 * xi as u128 % n as u128) * scale) % e;
        }
        acc as u64
    }

    pub fn character_eval(&self, a: &GroupElement, x: &GroupElement) -> Result<Complex64> {
        self.check(a)?;
        self.check(x)?;
        let phase = self.pairing_phase(&a.0, &x.0);
        Ok(Complex64::from_polar(
            1.0,
            TAU * phase as f64 / self.exponent as f64,
        ))
    }

    /// `gcd(m mod |G|, |G|) == 1`; `m = 0 (mod |G|)` is never coprime.
    pub fn is_coprime_to_order(&self, m: i64) -> bool {
        let r = reduce(m, self.order);
        r != 0 && r.gcd(&self.order) == 1
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `"Z6xZ4"` (case-insensitive). A bare number `"6"` is also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.is_empty() {
            return Err(Error::Parse {
                what: "group",
                token: s.to_string(),
            });
        }
        let mut factors = Vec::new();
        for token in lower.split('x') {
            let digits = token.trim().strip_prefix('z').unwrap_or(token.trim());
            let n: u64 = digits.parse().map_err(|_| Error::Parse {
                what: "group",
                token: token.to_string(),
            })?;
            factors.push(n);
        }
        Self::new(&factors)
    }
}

impl TryFrom<Vec<u64>> for GroupSpec {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<GroupSpec> for Vec<u64> {
    fn from(g: GroupSpec) -> Self {
        g.factors
    }
}

/// Residue vector, one component per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(f: &[u64]) -> GroupSpec {
        GroupSpec::new(f).unwrap()
    }

    #[test]
    fn make_group_examples() {
        let z5 = g(&[5]);
        assert_eq!((z5.order(), z5.exponent()), (5, 5));
        let z64 = g(&[6, 4]);
        assert_eq!((z64.order(), z64.exponent()), (24, 12));
        let z22 = g(&[2, 2]);
        assert_eq!((z22.order(), z22.exponent()), (4, 2));
    }

    #[test]
    fn make_group_errors() {
        assert_eq!(GroupSpec::new(&[]), Err(Error::EmptyGroup));
        assert_eq!(GroupSpec::new(&[3, 1]), Err(Error::FactorTooSmall(1)));
        assert_eq!(GroupSpec::new(&[0]), Err(Error::FactorTooSmall(0)));
        assert_eq!(
            GroupSpec::new(&[u64::MAX / 2, 3]),
            Err(Error::OrderOverflow)
        );
    }

    #[test]
    fn arithmetic_examples() {
        let z5 = g(&[5]);
        let two = z5.element(&[2]).unwrap();
        assert_eq!(z5.scalar_mul(-1, &two).unwrap(), z5.element(&[3]).unwrap());

        let z64 = g(&[6, 4]);
        let x = z64.element(&[5, 3]).unwrap();
        let y = z64.element(&[1, 1]).unwrap();
        assert_eq!(z64.add(&x, &y).unwrap(), z64.zero());
        for x in z64.elements() {
            assert_eq!(z64.scalar_mul(z64.exponent() as i64, &x).unwrap(), z64.zero());
            let sum = z64.add(&x, &z64.neg(&x).unwrap()).unwrap();
            assert_eq!(sum, z64.zero());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let z64 = g(&[6, 4]);
        let bad = GroupElement(vec![1]);
        assert!(matches!(
            z64.add(&bad, &z64.zero()),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(z64.element(&[1, 2, 3]).is_err());
    }

    #[test]
    fn element_orders() {
        let z64 = g(&[6, 4]);
        assert_eq!(z64.element_order(&z64.element(&[1, 1]).unwrap()), 12);
        assert_eq!(z64.element_order(&z64.zero()), 1);
        let z5 = g(&[5]);
        assert_eq!(z5.element_order(&z5.element(&[2]).unwrap()), 5);
    }

    #[test]
    fn max_order_elements() {
        for f in [&[6u64, 4][..], &[5], &[2, 2], &[3, 9, 2], &[4, 6, 10]] {
            let grp = g(f);
            let a = grp.max_order_element();
            assert!(a.0.iter().all(|&r| r == 1));
            assert_eq!(grp.element_order(&a), grp.exponent());
            for x in grp.elements() {
                assert_eq!(grp.exponent() % grp.element_order(&x), 0);
            }
        }
    }

    #[test]
    fn character_examples() {
        let z4 = g(&[4]);
        let one = z4.element(&[1]).unwrap();
        let c = z4.character_eval(&one, &one).unwrap();
        assert!((c - Complex64::i()).norm() < 1e-15);

        let z64 = g(&[6, 4]);
        for x in z64.elements() {
            let c = z64.character_eval(&z64.zero(), &x).unwrap();
            assert!((c - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn character_orthogonality() {
        for f in [&[5u64][..], &[6, 4], &[2, 2, 2], &[3, 3]] {
            let grp = g(f);
            for x in grp.elements() {
                let s: Complex64 = grp
                    .elements()
                    .map(|a| grp.character_eval(&a, &x).unwrap())
                    .sum();
                let want = if x == grp.zero() { grp.order() as f64 } else { 0.0 };
                assert!((s - want).norm() < 1e-9, "{grp} x={x}: {s}");
            }
        }
    }

    #[test]
    fn coprimality() {
        let z6 = g(&[6]);
        assert!(z6.is_coprime_to_order(5));
        assert!(!z6.is_coprime_to_order(4));
        assert!(!z6.is_coprime_to_order(0));
        assert!(!z6.is_coprime_to_order(12));
        assert!(g(&[5]).is_coprime_to_order(-1));
    }

    #[test]
    fn rank_round_trip() {
        for f in [&[5u64][..], &[6, 4], &[2, 3, 4], &[2, 2, 2, 2]] {
            let grp = g(f);
            for r in 0..grp.size() {
                assert_eq!(grp.rank_of(&grp.unrank(r)), r);
            }
            // last factor varies fastest
            if f.len() > 1 {
                assert_eq!(grp.unrank(1).0.last(), Some(&1));
            }
        }
    }

    #[test]
    fn rank_level_action_matches() {
        let grp = g(&[6, 4, 3]);
        for m in -7..8 {
            for r in 0..grp.size() {
                let x = grp.unrank(r);
                assert_eq!(
                    grp.scalar_mul_rank(m, r),
                    grp.rank_of(&grp.scalar_mul(m, &x).unwrap())
                );
            }
        }
    }

    #[test]
    fn parse_groups() {
        assert_eq!("Z6xZ4".parse::<GroupSpec>().unwrap(), g(&[6, 4]));
        assert_eq!("z2XZ2".parse::<GroupSpec>().unwrap(), g(&[2, 2]));
        assert_eq!("7".parse::<GroupSpec>().unwrap(), g(&[7]));
        assert_eq!(g(&[6, 4]).to_string(), "Z6xZ4");
        match "Z6xZq".parse::<GroupSpec>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "zq"),
            other => panic!("{other:?}"),
        }
        assert!("Z1".parse::<GroupSpec>().is_err());
        assert!("".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn inverse_helper() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 6), None);
        assert_eq!(mod_inverse(5, 1), Some(0));
    }

    fn group_strategy() -> impl Strategy<Value = GroupSpec> {
        prop::collection::vec(2u64..7, 1..4).prop_map(|f| GroupSpec::new(&f).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn characters_are_multiplicative(grp in group_strategy(), seed in any::<[usize; 3]>()) {
            let n = grp.size();
            let a = grp.unrank(seed[0] % n);
            let x = grp.unrank(seed[1] % n);
            let y = grp.unrank(seed[2] % n);
            let lhs = grp.character_eval(&a, &grp.add(&x, &y).unwrap()).unwrap();
            let rhs = grp.character_eval(&a, &x).unwrap() * grp.character_eval(&a, &y).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
            // symmetric pairing
            let swapped = grp.character_eval(&x, &a).unwrap();
            prop_assert!((grp.character_eval(&a, &x).unwrap() - swapped).norm() < 1e-12);
        }
    }
}
