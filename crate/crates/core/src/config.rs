//! Linear configurations: single equations, their kernels, canceling
//! partitions and brute-force arithmetic multiplicities.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::DenseFunction;
use crate::group::{mod_inverse, reduce, GroupSpec};

/// Upper limit on `|G|^d` for the unfiltered scan of `G^d`.
pub const FILTER_SCAN_LIMIT: u128 = 100_000_000;

/// A homogeneous equation `sum_i L_i v_i = 0` in `d >= 2` variables.
/// Coefficients are stored as given and reduced per group on demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Equation {
    coeffs: Vec<i64>,
}

impl Equation {
    pub fn new(coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::ArityTooSmall(coeffs.len()));
        }
        Ok(Self {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn all_coprime(&self, group: &GroupSpec) -> bool {
        self.coeffs.iter().all(|&c| group.is_coprime_to_order(c))
    }

    pub fn coprime_count(&self, group: &GroupSpec) -> usize {
        self.coeffs
            .iter()
            .filter(|&&c| group.is_coprime_to_order(c))
            .count()
    }

    /// First coefficient not coprime to `|G|`, if any.
    pub fn first_non_coprime(&self, group: &GroupSpec) -> Option<i64> {
        self.coeffs
            .iter()
            .copied()
            .find(|&c| !group.is_coprime_to_order(c))
    }

    /// Evaluate the left-hand side at an instance given by ranks.
    pub fn apply_ranks(&self, group: &GroupSpec, v: &[usize]) -> Vec<u64> {
        let mut acc = vec![0u64; group.factors().len()];
        for (&c, &r) in self.coeffs.iter().zip(v) {
            let x = group.unrank(r);
            for ((a, &xi), &n) in acc.iter_mut().zip(x.residues()).zip(group.factors()) {
                *a = ((*a as u128 + reduce(c, n) as u128 * xi as u128) % n as u128) as u64;
            }
        }
        acc
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Equation {
    type Err = Error;

    /// Comma-separated integers, e.g. `"1,1,-2"`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim().parse::<i64>().map_err(|_| Error::Parse {
                    what: "equation",
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&coeffs)
    }
}

impl TryFrom<Vec<i64>> for Equation {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<Equation> for Vec<i64> {
    fn from(e: Equation) -> Self {
        e.coeffs
    }
}

/// A `k x d` integer system. Only used for brute-force multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    rows: Vec<Vec<i64>>,
}

impl LinearSystem {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.first().map(Vec::len).ok_or(Error::TooManyRows { rows: 0, cols: 0 })?;
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        if d == 0 || rows.len() > d {
            return Err(Error::TooManyRows {
                rows: rows.len(),
                cols: d,
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn arity(&self) -> usize {
        self.rows[0].len()
    }
}

impl From<&Equation> for LinearSystem {
    fn from(e: &Equation) -> Self {
        Self {
            rows: vec![e.coeffs.clone()],
        }
    }
}

/// Outcome of the canceling-partition search. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancelReport {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<(usize, usize)>>,
}

/// `(m, n)` cancels in `G` iff `exponent(G)` divides `m + n`.
pub fn is_canceling_pair(group: &GroupSpec, m: i64, n: i64) -> bool {
    (m as i128 + n as i128).rem_euclid(group.exponent() as i128) == 0
}

/// Backtracking search for a perfect matching of `[d]` into canceling pairs.
pub fn has_canceling_partition(eq: &Equation, group: &GroupSpec) -> CancelReport {
    let d = eq.arity();
    if d % 2 == 1 {
        return CancelReport {
            exists: false,
            partition: None,
        };
    }
    let c = eq.coeffs();
    let adj: Vec<Vec<bool>> = (0..d)
        .map(|i| (0..d).map(|j| i != j && is_canceling_pair(group, c[i], c[j])).collect())
        .collect();

    fn search(adj: &[Vec<bool>], used: &mut [bool], pairs: &mut Vec<(usize, usize)>) -> bool {
        let Some(i) = used.iter().position(|u| !u) else {
            return true;
        };
        used[i] = true;
        for j in i + 1..used.len() {
            if !used[j] && adj[i][j] {
                used[j] = true;
                pairs.push((i, j));
                if search(adj, used, pairs) {
                    return true;
                }
                pairs.pop();
                used[j] = false;
            }
        }
        used[i] = false;
        false
    }

    let mut used = vec![false; d];
    let mut pairs = Vec::with_capacity(d / 2);
    if search(&adj, &mut used, &mut pairs) {
        CancelReport {
            exists: true,
            partition: Some(pairs),
        }
    } else {
        CancelReport {
            exists: false,
            partition: None,
        }
    }
}

/// Sufficient condition for surjectivity used throughout: some coefficient is
/// coprime to `|G|`.
pub fn is_full_rank_single(eq: &Equation, group: &GroupSpec) -> bool {
    eq.coprime_count(group) > 0
}

/// Kernel of a single equation, parametrised by the `d - 1` coordinates other
/// than the first coprime coefficient (the pivot).
#[derive(Debug, Clone)]
pub struct Kernel<'a> {
    group: &'a GroupSpec,
    d: usize,
    pivot: usize,
    free: Vec<usize>,
    // reduced coefficient per (free coordinate, factor)
    coeff_mod: Vec<Vec<u64>>,
    // -(L_pivot)^{-1} mod n_k
    neg_pivot_inv: Vec<u64>,
    digits: Vec<Vec<u64>>,
}

impl<'a> Kernel<'a> {
    pub fn new(eq: &Equation, group: &'a GroupSpec) -> Result<Self> {
        // keeps every residue product below 2^64
        if group.order() > u32::MAX as u64 {
            return Err(Error::SearchTooLarge {
                size: group.order() as u128,
                limit: u32::MAX as u128,
            });
        }
        let c = eq.coeffs();
        let pivot = c
            .iter()
            .position(|&ci| group.is_coprime_to_order(ci))
            .ok_or(Error::NoCoprimeCoefficient {
                order: group.order(),
            })?;
        let free: Vec<usize> = (0..c.len()).filter(|&i| i != pivot).collect();
        let coeff_mod = free
            .iter()
            .map(|&i| group.factors().iter().map(|&n| reduce(c[i], n)).collect())
            .collect();
        let neg_pivot_inv = group
            .factors()
            .iter()
            .map(|&n| {
                let inv = mod_inverse(reduce(c[pivot], n), n).expect("pivot coprime to every factor");
                (n - inv) % n
            })
            .collect();
        let digits = group.elements().map(|x| x.0).collect();
        Ok(Self {
            group,
            d: c.len(),
            pivot,
            free,
            coeff_mod,
            neg_pivot_inv,
            digits,
        })
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// `|G|^(d-1)`.
    pub fn len(&self) -> u128 {
        (self.group.order() as u128).pow(self.d as u32 - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn pivot_rank(&self, sum: &[u64]) -> usize {
        let factors = self.group.factors();
        let mut rank = 0u64;
        for k in 0..factors.len() {
            let n = factors[k];
            let v = (self.neg_pivot_inv[k] * sum[k]) % n;
            rank = rank * n + v;
        }
        rank as usize
    }

    /// Visit every instance (as ranks in coordinate order). Free coordinates
    /// run lexicographically, the last one fastest.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize])) {
        let n = self.group.size();
        let m = self.group.factors().len();
        let factors = self.group.factors();
        let levels = self.free.len();
        let mut v = vec![0usize; self.d];
        let mut counters = vec![0usize; levels];
        // partial[l] = sum of contributions of free levels 0..=l
        let mut partial = vec![vec![0u64; m]; levels + 1];

        // partial[0] = 0, partial[l + 1] = partial[l] + L_l * v_l
        let recompute_from = |partial: &mut [Vec<u64>], counters: &[usize], from: usize| {
            for l in from..levels {
                let (lo, hi) = partial.split_at_mut(l + 1);
                let base = &lo[l];
                let dst = &mut hi[0];
                let x = &self.digits[counters[l]];
                for k in 0..m {
                    dst[k] = (base[k] + self.coeff_mod[l][k] * x[k]) % factors[k];
                }
            }
        };
        recompute_from(&mut partial, &counters, 0);

        loop {
            for (l, &i) in self.free.iter().enumerate() {
                v[i] = counters[l];
            }
            v[self.pivot] = self.pivot_rank(&partial[levels]);
            visit(&v);

            // odometer step
            let mut l = levels;
            loop {
                if l == 0 {
                    return;
                }
                l -= 1;
                counters[l] += 1;
                if counters[l] < n {
                    break;
                }
                counters[l] = 0;
            }
            recompute_from(&mut partial, &counters, l);
        }
    }

    /// Owned iterator over instances; convenient but allocates per instance.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> {
        let mut all = Vec::new();
        self.for_each(|v| all.push(v.to_vec()));
        all.into_iter()
    }
}

/// All `|G|^(d-1)` solutions of `L v = 0`, as rank vectors.
pub fn enumerate_kernel(eq: &Equation, group: &GroupSpec) -> Result<impl Iterator<Item = Vec<usize>>> {
    Ok(Kernel::new(eq, group)?.iter())
}

fn check_len(f: &DenseFunction, group: &GroupSpec) -> Result<()> {
    if f.len() != group.size() {
        return Err(Error::DimensionMismatch {
            expected: group.size(),
            found: f.len(),
        });
    }
    Ok(())
}

/// Exact average of `prod_i f(v_i)` over all instances of the system.
pub fn multiplicity_bruteforce(
    f: &DenseFunction,
    system: &LinearSystem,
    group: &GroupSpec,
) -> Result<Complex64> {
    Ok(multiplicity_bruteforce_batch(std::slice::from_ref(f), system, group)?[0])
}

/// [`multiplicity_bruteforce`] for several functions sharing one kernel scan.
pub fn multiplicity_bruteforce_batch(
    fs: &[DenseFunction],
    system: &LinearSystem,
    group: &GroupSpec,
) -> Result<Vec<Complex64>> {
    for f in fs {
        check_len(f, group)?;
    }
    if system.rows().len() == 1 {
        let eq = Equation::new(&system.rows()[0])?;
        if let Ok(kernel) = Kernel::new(&eq, group) {
            let count = kernel.len() as f64;
            return Ok(kernel_average(fs, |visit| kernel.for_each(visit))
                .into_iter()
                .map(|s| s / count)
                .collect());
        }
    }
    filter_scan(fs, system, group)
}

fn kernel_average(fs: &[DenseFunction], scan: impl FnOnce(&mut dyn FnMut(&[usize]))) -> Vec<Complex64> {
    if fs.iter().all(DenseFunction::is_real) {
        let reals: Vec<Vec<f64>> = fs.iter().map(DenseFunction::real_values).collect();
        let mut sums = vec![0.0f64; fs.len()];
        scan(&mut |v: &[usize]| {
            for (s, f) in sums.iter_mut().zip(&reals) {
                *s += v.iter().map(|&r| f[r]).product::<f64>();
            }
        });
        sums.into_iter().map(|s| Complex64::new(s, 0.0)).collect()
    } else {
        let mut sums = vec![Complex64::new(0.0, 0.0); fs.len()];
        scan(&mut |v: &[usize]| {
            for (s, f) in sums.iter_mut().zip(fs) {
                let vals = f.values();
                *s += v.iter().map(|&r| vals[r]).product::<Complex64>();
            }
        });
        sums
    }
}

fn filter_scan(fs: &[DenseFunction], system: &LinearSystem, group: &GroupSpec) -> Result<Vec<Complex64>> {
    let d = system.arity();
    let n = group.size();
    let size = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if size > FILTER_SCAN_LIMIT {
        return Err(Error::SearchTooLarge {
            size,
            limit: FILTER_SCAN_LIMIT,
        });
    }
    let rows: Vec<Equation> = system
        .rows()
        .iter()
        .map(|r| Equation { coeffs: r.clone() })
        .collect();
    let zero = vec![0u64; group.factors().len()];
    let mut count = 0u64;
    let mut v = vec![0usize; d];
    let sums = kernel_average(fs, |visit| loop {
        if rows.iter().all(|row| row.apply_ranks(group, &v) == zero) {
            count += 1;
            visit(&v);
        }
        let mut l = d;
        loop {
            if l == 0 {
                return;
            }
            l -= 1;
            v[l] += 1;
            if v[l] < n {
                break;
            }
            v[l] = 0;
        }
    });
    // the zero vector always solves a homogeneous system
    Ok(sums.into_iter().map(|s| s / count as f64).collect())
}

fn has_repeat(v: &[usize]) -> bool {
    (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i] == v[j]))
}

/// Number of kernel instances with two equal coordinates.
pub fn count_noninjective(eq: &Equation, group: &GroupSpec) -> Result<u64> {
    let kernel = Kernel::new(eq, group)?;
    let mut count = 0u64;
    kernel.for_each(|v| {
        if has_repeat(v) {
            count += 1;
        }
    });
    Ok(count)
}

/// `C(d, 2) * |G|^(d-2)`, valid once three coefficients are coprime to `|G|`.
pub fn noninjective_bound(eq: &Equation, group: &GroupSpec) -> Result<u128> {
    if eq.coprime_count(group) < 3 {
        return Err(Error::TooFewCoprime);
    }
    let d = eq.arity() as u128;
    Ok(d * (d - 1) / 2 * (group.order() as u128).pow(eq.arity() as u32 - 2))
}
