//! From function witnesses to set witnesses, and the overall classifier.
//!
//! Rounding works on the injective part of the kernel. On injective
//! instances the functional `Psi(g) = sum_v prod_i g(v_i)` is multilinear, so
//! moving mass `eta` from `b` to `a` changes it by
//! `eta (dPsi/da - dPsi/db) - eta^2 d2Psi/da db`, a concave quadratic for
//! nonnegative `g`. One of the two feasible endpoints is therefore never
//! worse than the current point, and each such move fixes at least one more
//! value to 0 or 1.

use serde::Serialize;

use crate::config::{has_canceling_partition, Equation, Kernel};
use crate::error::{Error, Result};
use crate::fourier::DenseFunction;
use crate::group::GroupSpec;
use crate::witness::{build_uncommon_witness, deviation_bound, UncommonWitness, WitnessCertificate};
use crate::{REAL_TOL, TOL};

/// Largest group for which the exhaustive fallback may run.
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Keep `t_L(A)` low with `|A| >= E(f) |G| - 1`.
    Sidorenko,
    /// Keep `t_L(A) + t_L(A^C)` low.
    Common,
}

/// Kernel instances split into injective and non-injective ones, stored flat.
#[derive(Debug, Clone)]
pub struct SplitKernel {
    d: usize,
    injective: Vec<usize>,
    noninjective: Vec<usize>,
}

impl SplitKernel {
    pub fn new(eq: &Equation, group: &GroupSpec) -> Result<Self> {
        let kernel = Kernel::new(eq, group)?;
        let d = eq.arity();
        let mut injective = Vec::new();
        let mut noninjective = Vec::new();
        kernel.for_each(|v| {
            let repeated = (0..d).any(|i| (i + 1..d).any(|j| v[i] == v[j]));
            if repeated {
                noninjective.extend_from_slice(v);
            } else {
                injective.extend_from_slice(v);
            }
        });
        Ok(Self {
            d,
            injective,
            noninjective,
        })
    }

    pub fn total(&self) -> usize {
        (self.injective.len() + self.noninjective.len()) / self.d
    }

    pub fn noninjective_count(&self) -> usize {
        self.noninjective.len() / self.d
    }

    fn sum_products(flat: &[usize], d: usize, g: &[f64]) -> f64 {
        flat.chunks_exact(d).map(|v| v.iter().map(|&x| g[x]).product::<f64>()).sum()
    }

    /// `Psi(g)` over injective instances.
    pub fn injective_sum(&self, g: &[f64]) -> f64 {
        Self::sum_products(&self.injective, self.d, g)
    }

    /// `t_L(g)` from both parts.
    pub fn multiplicity(&self, g: &[f64]) -> f64 {
        (self.injective_sum(g) + Self::sum_products(&self.noninjective, self.d, g)) / self.total() as f64
    }

    fn count_inside(flat: &[usize], d: usize, mask: &[bool]) -> usize {
        flat.chunks_exact(d).filter(|v| v.iter().all(|&x| mask[x])).count()
    }

    /// `|C ∩ A^d|`.
    pub fn instances_inside(&self, mask: &[bool]) -> usize {
        Self::count_inside(&self.injective, self.d, mask) + self.noninjective_inside(mask)
    }

    /// `|C^# ∩ A^d|`.
    pub fn noninjective_inside(&self, mask: &[bool]) -> usize {
        Self::count_inside(&self.noninjective, self.d, mask)
    }

    /// First and mixed second partial derivatives of `Psi` at `g`.
    fn derivatives(&self, g: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = g.len();
        let d = self.d;
        let mut grad = vec![0.0; n];
        let mut mixed = vec![vec![0.0; n]; n];
        for v in self.injective.chunks_exact(d) {
            for p in 0..d {
                let rest: f64 = (0..d).filter(|&i| i != p).map(|i| g[v[i]]).product();
                grad[v[p]] += rest;
                for q in p + 1..d {
                    let rest2: f64 = (0..d).filter(|&i| i != p && i != q).map(|i| g[v[i]]).product();
                    mixed[v[p]][v[q]] += rest2;
                    mixed[v[q]][v[p]] += rest2;
                }
            }
        }
        (grad, mixed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingResult {
    pub mode: Mode,
    /// Ranks of the elements of `A`.
    pub members: Vec<usize>,
    #[serde(skip)]
    pub mask: Vec<bool>,
    pub size: usize,
    pub mean: f64,
    /// `t_L(A)`.
    pub t_set: f64,
    /// `t_L(A^C)`, common mode only.
    pub t_complement: Option<f64>,
    /// `t_L(f)`.
    pub t_function: f64,
    /// `t_L(1 - f)`, common mode only.
    pub t_function_complement: Option<f64>,
    /// `|C^# ∩ A^d|`.
    pub noninjective_in_set: usize,
    /// `|C^# ∩ (A^C)^d|`, common mode only.
    pub noninjective_in_complement: Option<usize>,
    /// `|C|`.
    pub kernel_size: usize,
    pub iterations: usize,
    pub used_fallback: bool,
    pub verified: bool,
}

impl RoundingResult {
    /// Left-hand side of the mode's inequality.
    pub fn lhs(&self) -> f64 {
        self.t_set + self.t_complement.unwrap_or(0.0)
    }

    /// Right-hand side of the mode's inequality.
    pub fn rhs(&self) -> f64 {
        let slack = (self.noninjective_in_set + self.noninjective_in_complement.unwrap_or(0)) as f64
            / self.kernel_size as f64;
        self.t_function + self.t_function_complement.unwrap_or(0.0) + slack
    }
}

fn snap(v: f64) -> f64 {
    if v.abs() <= REAL_TOL {
        0.0
    } else if (v - 1.0).abs() <= REAL_TOL {
        1.0
    } else {
        v
    }
}

fn is_fractional(v: f64) -> bool {
    v != 0.0 && v != 1.0
}

/// Coefficients `(linear, quadratic)` of the objective change when `eta` moves
/// from `b` to `a`.
fn move_coeffs(mode: Mode, a: usize, b: usize, dg: &(Vec<f64>, Vec<Vec<f64>>), dh: Option<&(Vec<f64>, Vec<Vec<f64>>)>) -> (f64, f64) {
    let mut lin = dg.0[a] - dg.0[b];
    let mut quad = -dg.1[a][b];
    if mode == Mode::Common {
        let dh = dh.expect("complement derivatives in common mode");
        lin -= dh.0[a] - dh.0[b];
        quad -= dh.1[a][b];
    }
    (lin, quad)
}

fn evaluate(
    mode: Mode,
    kernel: &SplitKernel,
    f: &[f64],
    mask: Vec<bool>,
    iterations: usize,
    used_fallback: bool,
) -> RoundingResult {
    let total = kernel.total();
    let size = mask.iter().filter(|&&b| b).count();
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let members = (0..mask.len()).filter(|&x| mask[x]).collect();
    let t_set = kernel.instances_inside(&mask) as f64 / total as f64;
    let noninjective_in_set = kernel.noninjective_inside(&mask);
    let t_function = kernel.multiplicity(f);
    let (t_complement, t_function_complement, noninjective_in_complement) = match mode {
        Mode::Sidorenko => (None, None, None),
        Mode::Common => {
            let comp: Vec<bool> = mask.iter().map(|b| !b).collect();
            let fc: Vec<f64> = f.iter().map(|v| 1.0 - v).collect();
            (
                Some(kernel.instances_inside(&comp) as f64 / total as f64),
                Some(kernel.multiplicity(&fc)),
                Some(kernel.noninjective_inside(&comp)),
            )
        }
    };
    let mut result = RoundingResult {
        mode,
        members,
        mask,
        size,
        mean,
        t_set,
        t_complement,
        t_function,
        t_function_complement,
        noninjective_in_set,
        noninjective_in_complement,
        kernel_size: total,
        iterations,
        used_fallback,
        verified: false,
    };
    let size_ok = mode == Mode::Common || size as f64 >= mean * f.len() as f64 - 1.0 - TOL;
    result.verified = size_ok && result.lhs() <= result.rhs() + TOL;
    result
}

/// Rounds `f: G -> [0, 1]` to a set satisfying the mode's inequality.
///
/// Pairwise transfer until at most one fractional value is left, then the
/// last one is rounded to whichever end does not increase the objective.
/// If the local search stalls or the result fails verification, an
/// exhaustive search over sets of size `floor(E(f)|G|)` and `ceil(E(f)|G|)`
/// runs for `|G| <= 24`.
pub fn round_to_set(f: &DenseFunction, eq: &Equation, group: &GroupSpec, mode: Mode) -> Result<RoundingResult> {
    if f.len() != group.size() {
        return Err(Error::DimensionMismatch {
            expected: group.size(),
            found: f.len(),
        });
    }
    f.check_unit_range()?;
    let kernel = SplitKernel::new(eq, group)?;
    let values: Vec<f64> = f.real_values().into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    round_with_kernel(&values, &kernel, mode)
}

fn round_with_kernel(f: &[f64], kernel: &SplitKernel, mode: Mode) -> Result<RoundingResult> {
    let n = f.len();
    let mut g: Vec<f64> = f.iter().map(|&v| snap(v)).collect();
    let cap = 50 * n;
    let mut iterations = 0;
    let mut stalled = false;

    loop {
        let frac: Vec<usize> = (0..n).filter(|&x| is_fractional(g[x])).collect();
        if frac.len() <= 1 || iterations >= cap {
            break;
        }
        iterations += 1;
        let dg = kernel.derivatives(&g);
        let dh = (mode == Mode::Common).then(|| {
            let h: Vec<f64> = g.iter().map(|v| 1.0 - v).collect();
            kernel.derivatives(&h)
        });

        // (change, a, b, eta), first pair in lexicographic order wins ties
        let mut best_end: Option<(f64, usize, usize, f64)> = None;
        let mut best_inner: Option<(f64, usize, usize, f64)> = None;
        for (i, &a) in frac.iter().enumerate() {
            for &b in &frac[i + 1..] {
                let (lin, quad) = move_coeffs(mode, a, b, &dg, dh.as_ref());
                let change = |eta: f64| lin * eta + quad * eta * eta;
                let lo = (-g[a]).max(g[b] - 1.0);
                let hi = (1.0 - g[a]).min(g[b]);
                for eta in [lo, hi] {
                    let c = change(eta);
                    if best_end.is_none_or(|(bc, ..)| c < bc) {
                        best_end = Some((c, a, b, eta));
                    }
                }
                if quad != 0.0 {
                    let eta = -lin / (2.0 * quad);
                    if eta > lo && eta < hi {
                        let c = change(eta);
                        if best_inner.is_none_or(|(bc, ..)| c < bc) {
                            best_inner = Some((c, a, b, eta));
                        }
                    }
                }
            }
        }
        let chosen = match (best_end, best_inner) {
            (Some(end), _) if end.0 <= TOL * TOL => end,
            (_, Some(inner)) if inner.0 < 0.0 => inner,
            _ => {
                stalled = true;
                break;
            }
        };
        let (_, a, b, eta) = chosen;
        g[a] = snap(g[a] + eta);
        g[b] = snap(g[b] - eta);
    }

    let frac: Vec<usize> = (0..n).filter(|&x| is_fractional(g[x])).collect();
    if frac.len() == 1 {
        let x = frac[0];
        // the objective is affine in g(x); pick the better end
        let (grad_g, _) = kernel.derivatives(&g);
        let slope = match mode {
            Mode::Sidorenko => grad_g[x],
            Mode::Common => {
                let h: Vec<f64> = g.iter().map(|v| 1.0 - v).collect();
                grad_g[x] - kernel.derivatives(&h).0[x]
            }
        };
        g[x] = if slope > 0.0 { 0.0 } else { 1.0 };
    }

    if !stalled && frac.len() <= 1 {
        let mask: Vec<bool> = g.iter().map(|&v| v == 1.0).collect();
        let result = evaluate(mode, kernel, f, mask, iterations, false);
        if result.verified {
            return Ok(result);
        }
    }
    exhaustive(f, kernel, mode, iterations)
}

/// Best set of size `floor(E(f)|G|)` or `ceil(E(f)|G|)` by the mode's margin.
fn exhaustive(f: &[f64], kernel: &SplitKernel, mode: Mode, iterations: usize) -> Result<RoundingResult> {
    let n = f.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::RoundingFailed(format!(
            "local search left an unverified set and |G| = {n} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}"
        )));
    }
    let target = f.iter().sum::<f64>();
    let sizes = [target.floor() as u32, target.ceil() as u32];
    let mut best: Option<RoundingResult> = None;
    for bits in 0u32..(1u32 << n) {
        if !sizes.contains(&bits.count_ones()) {
            continue;
        }
        let mask: Vec<bool> = (0..n).map(|x| bits >> x & 1 == 1).collect();
        let candidate = evaluate(mode, kernel, f, mask, iterations, true);
        let better = match &best {
            None => true,
            Some(b) => candidate.lhs() - candidate.rhs() < b.lhs() - b.rhs(),
        };
        if better {
            best = Some(candidate);
        }
    }
    match best {
        Some(b) if b.verified => Ok(b),
        _ => Err(Error::RoundingFailed("no set of the target size satisfies the inequality".into())),
    }
}

/// Public entry to the exhaustive search, mainly for cross-checks.
pub fn round_exhaustive(f: &DenseFunction, eq: &Equation, group: &GroupSpec, mode: Mode) -> Result<RoundingResult> {
    f.check_unit_range()?;
    let kernel = SplitKernel::new(eq, group)?;
    exhaustive(&f.real_values(), &kernel, mode, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    FullySidorenko,
    FullyCommonNotFullySidorenko,
    NotFullyCommon,
    NotApplicable,
}

/// Witness margins: how far below the random-coloring value the witness sits.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Margins {
    /// `2^-d` (odd `d`) or `2^(1-d)` (even `d`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_value: Option<f64>,
    /// `t_L(f)` (odd `d`) or `t_L(f) + t_L(1 - f)` (even `d`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved: Option<f64>,
    /// `random_value - achieved`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// Gap guaranteed by the construction: `delta_tight`, doubled for even `d`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guaranteed_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_certificate: Option<WitnessCertificate>,
    /// `d^2 / Delta(d)`; sets exist once `|G|` exceeds it.
    pub corollary_constant: f64,
    pub margins: Margins,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip)]
    pub witness: Option<UncommonWitness>,
}

/// `d^2 / Delta(d)` with the universal deviation bound.
pub fn corollary_constant(d: usize) -> f64 {
    let delta = deviation_bound(d, 1).expect("r = 1 is always valid").universal;
    (d * d) as f64 / delta
}

/// Classifies `L` in `G` and attaches a certificate.
pub fn classify(eq: &Equation, group: &GroupSpec) -> Result<Verdict> {
    let d = eq.arity();
    let mut verdict = Verdict {
        classification: Classification::NotApplicable,
        partition: None,
        witness_certificate: None,
        corollary_constant: corollary_constant(d),
        margins: Margins::default(),
        reason: None,
        witness: None,
    };
    if let Some(c) = eq.first_non_coprime(group) {
        verdict.reason = Some(format!("coefficient {c} is not coprime to |G| = {}", group.order()));
        return Ok(verdict);
    }
    let report = has_canceling_partition(eq, group);
    if report.exists {
        verdict.classification = Classification::FullySidorenko;
        verdict.partition = report.partition;
        return Ok(verdict);
    }
    verdict.classification = if d % 2 == 1 {
        Classification::FullyCommonNotFullySidorenko
    } else {
        Classification::NotFullyCommon
    };
    let witness = build_uncommon_witness(eq, group)?;
    let cert = &witness.certificate;
    let (random_value, achieved, guaranteed) = if d % 2 == 1 {
        (0.5f64.powi(d as i32), cert.multiplicity, cert.delta_tight)
    } else {
        (
            0.5f64.powi(d as i32 - 1),
            cert.common_sum.unwrap_or(f64::NAN),
            2.0 * cert.delta_tight,
        )
    };
    verdict.margins = Margins {
        random_value: Some(random_value),
        achieved: Some(achieved),
        gap: Some(random_value - achieved),
        guaranteed_gap: Some(guaranteed),
    };
    verdict.witness_certificate = Some(witness.certificate.clone());
    verdict.witness = Some(witness);
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollarySets {
    pub classification: Classification,
    pub rounding: RoundingResult,
    pub corollary_constant: f64,
    /// `|G| > C`, the regime where the margin is guaranteed positive.
    pub above_threshold: bool,
    /// `(|A|/|G|)^d` for odd `d`, `2^(1-d)` for even `d`.
    pub reference: f64,
    /// `t_L(A)` for odd `d`, `t_L(A) + t_L(A^C)` for even `d`.
    pub achieved: f64,
    /// `reference - achieved`; positive means the set witnesses the failure.
    pub margin: f64,
    pub inequalities_verified: bool,
}

/// Set witnesses `A_1` (odd `d`) or `A_2` (even `d`) from the function witness.
pub fn corollary_sets(eq: &Equation, group: &GroupSpec) -> Result<CorollarySets> {
    let verdict = classify(eq, group)?;
    let witness = match verdict.classification {
        Classification::FullySidorenko => return Err(Error::PositiveCase("equation is fully Sidorenko")),
        Classification::NotApplicable => return Err(Error::PositiveCase("coefficients not coprime to |G|")),
        _ => verdict.witness.expect("negative verdicts carry a witness"),
    };
    let d = eq.arity() as i32;
    let mode = if d % 2 == 1 { Mode::Sidorenko } else { Mode::Common };
    let rounding = round_to_set(&witness.function, eq, group, mode)?;
    let (reference, achieved) = match mode {
        Mode::Sidorenko => ((rounding.size as f64 / group.order() as f64).powi(d), rounding.t_set),
        Mode::Common => (0.5f64.powi(d - 1), rounding.lhs()),
    };
    Ok(CorollarySets {
        classification: verdict.classification,
        corollary_constant: verdict.corollary_constant,
        above_threshold: group.order() as f64 > verdict.corollary_constant,
        reference,
        achieved,
        margin: reference - achieved,
        inequalities_verified: rounding.verified,
        rounding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{multiplicity_bruteforce, LinearSystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(f: &[u64]) -> GroupSpec {
        GroupSpec::new(f).unwrap()
    }

    fn eq(c: &[i64]) -> Equation {
        Equation::new(c).unwrap()
    }

    fn set_multiplicity(mask: &[bool], e: &Equation, grp: &GroupSpec) -> f64 {
        multiplicity_bruteforce(&DenseFunction::indicator(mask), &LinearSystem::from(e), grp)
            .unwrap()
            .re
    }

    #[test]
    fn sets_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (f, c) in [(&[5u64][..], &[1i64, 1, 1][..]), (&[8], &[1, 1, -1]), (&[3, 3], &[1, 2, 1, 1])] {
            let (grp, e) = (g(f), eq(c));
            for _ in 0..20 {
                let mask: Vec<bool> = (0..grp.size()).map(|_| rng.gen()).collect();
                for mode in [Mode::Sidorenko, Mode::Common] {
                    let r = round_to_set(&DenseFunction::indicator(&mask), &e, &grp, mode).unwrap();
                    assert_eq!(r.mask, mask);
                    assert_eq!(r.iterations, 0);
                    assert!(r.verified);
                }
            }
        }
    }

    #[test]
    fn split_kernel_counts() {
        let (grp, e) = (g(&[7]), eq(&[1, 2, 4]));
        let k = SplitKernel::new(&e, &grp).unwrap();
        assert_eq!(k.total(), 49);
        assert_eq!(k.noninjective_count() as u64, crate::config::count_noninjective(&e, &grp).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f: Vec<f64> = (0..7).map(|_| rng.gen()).collect();
        let brute = multiplicity_bruteforce(&DenseFunction::from_real(f.clone()), &LinearSystem::from(&e), &grp).unwrap();
        assert!((k.multiplicity(&f) - brute.re).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (grp, e) = (g(&[7]), eq(&[1, 1, 2, 3]));
        let k = SplitKernel::new(&e, &grp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f: Vec<f64> = (0..7).map(|_| rng.gen()).collect();
        let (grad, mixed) = k.derivatives(&f);
        let h = 1e-5;
        for a in 0..7 {
            let mut up = f.clone();
            up[a] += h;
            let mut dn = f.clone();
            dn[a] -= h;
            let fd = (k.injective_sum(&up) - k.injective_sum(&dn)) / (2.0 * h);
            assert!((fd - grad[a]).abs() < 1e-6);
            for b in 0..7 {
                if a == b {
                    continue;
                }
                let eval = |da: f64, db: f64| {
                    let mut x = f.clone();
                    x[a] += da;
                    x[b] += db;
                    k.injective_sum(&x)
                };
                let fd2 = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h);
                assert!((fd2 - mixed[a][b]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn rounding_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (f, c) in [(&[5u64][..], &[1i64, 1, 1][..]), (&[7], &[1, 2, 4]), (&[8], &[1, 3, -1]), (&[11], &[1, 1, 1, 1])] {
            let (grp, e) = (g(f), eq(c));
            for _ in 0..10 {
                let func = DenseFunction::from_real((0..grp.size()).map(|_| rng.gen()).collect());
                let target = func.mean().re * grp.order() as f64;
                for mode in [Mode::Sidorenko, Mode::Common] {
                    let r = round_to_set(&func, &e, &grp, mode).unwrap();
                    assert!(r.verified && !r.used_fallback, "{e} in {grp} {mode:?}");
                    // exact recount
                    let t = set_multiplicity(&r.mask, &e, &grp);
                    assert!((t - r.t_set).abs() < 1e-12);
                    assert!((r.size as f64) >= target - 1.0 - 1e-9);
                    if mode == Mode::Sidorenko {
                        assert!(r.t_set <= r.t_function + r.noninjective_in_set as f64 / r.kernel_size as f64 + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn rounding_half_on_z4() {
        let grp = g(&[4]);
        let e = eq(&[1, 1, -1, -1]);
        let half = DenseFunction::from_real(vec![0.5; 4]);
        for mode in [Mode::Sidorenko, Mode::Common] {
            let r = round_to_set(&half, &e, &grp, mode).unwrap();
            assert!(r.verified);
            let ex = round_exhaustive(&half, &e, &grp, mode).unwrap();
            assert!(ex.verified && ex.used_fallback);
        }
    }

    #[test]
    fn rounding_rejects_bad_input() {
        let grp = g(&[5]);
        let e = eq(&[1, 1, 1]);
        let bad = DenseFunction::from_real(vec![0.5, 2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(round_to_set(&bad, &e, &grp, Mode::Sidorenko), Err(Error::RangeViolation { .. })));
        let short = DenseFunction::from_real(vec![0.5; 3]);
        assert!(round_to_set(&short, &e, &grp, Mode::Common).is_err());
    }

    #[test]
    fn common_mode_never_beats_global_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (f, c) in [(&[7u64][..], &[1i64, 1, 1][..]), (&[2, 5], &[1, 3, 7]), (&[16], &[1, 1, -3])] {
            let (grp, e) = (g(f), eq(c));
            let n = grp.size();
            let k = SplitKernel::new(&e, &grp).unwrap();
            let mut global = f64::INFINITY;
            for bits in 0u32..(1 << n) {
                let mask: Vec<bool> = (0..n).map(|x| bits >> x & 1 == 1).collect();
                let comp: Vec<bool> = mask.iter().map(|b| !b).collect();
                let v = (k.instances_inside(&mask) + k.instances_inside(&comp)) as f64 / k.total() as f64;
                global = global.min(v);
            }
            for _ in 0..5 {
                let func = DenseFunction::from_real((0..n).map(|_| rng.gen()).collect());
                let r = round_to_set(&func, &e, &grp, Mode::Common).unwrap();
                assert!(r.lhs() >= global - 1e-12);
                assert!(r.verified);
            }
        }
    }

    #[test]
    fn mean_value_bound() {
        for d in 1..=6i32 {
            for n in (2 * d)..=100 {
                let n = n as f64;
                assert!((0.5 - 1.0 / n).powi(d) >= 0.5f64.powi(d) - d as f64 / n - 1e-15);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let v = classify(&eq(&[1, -1, 1, -1]), &g(&[7])).unwrap();
        assert_eq!(v.classification, Classification::FullySidorenko);
        assert!(v.partition.is_some() && v.witness_certificate.is_none());

        let v = classify(&eq(&[1, 1, 1]), &g(&[5])).unwrap();
        assert_eq!(v.classification, Classification::FullyCommonNotFullySidorenko);
        let cert = v.witness_certificate.unwrap();
        assert!(cert.verified && cert.multiplicity < 0.125);

        let v = classify(&eq(&[1, 1, 1, 1]), &g(&[5])).unwrap();
        assert_eq!(v.classification, Classification::NotFullyCommon);
        assert!(v.margins.gap.unwrap() >= v.margins.guaranteed_gap.unwrap());

        let v = classify(&eq(&[2, 3]), &g(&[6])).unwrap();
        assert_eq!(v.classification, Classification::NotApplicable);
        assert!(v.reason.is_some());

        let v = classify(&eq(&[1, 1, 1, 1]), &g(&[2, 2])).unwrap();
        assert_eq!(v.classification, Classification::FullySidorenko);
        let v = classify(&eq(&[1, 1, 1]), &g(&[2, 2, 2])).unwrap();
        assert_eq!(v.classification, Classification::FullyCommonNotFullySidorenko);
    }

    #[test]
    fn classify_ignores_coefficient_order() {
        let grp = g(&[13]);
        let base = [1i64, 5, -5, 3, 2, -1];
        let want = classify(&eq(&base), &grp).unwrap().classification;
        let perms = [[5, 4, 3, 2, 1, 0], [1, 0, 3, 2, 5, 4], [2, 4, 0, 5, 1, 3]];
        for p in perms {
            let c: Vec<i64> = p.iter().map(|&i| base[i]).collect();
            let r = has_canceling_partition(&eq(&c), &grp);
            assert_eq!(r.exists, want == Classification::FullySidorenko);
            assert_eq!(classify(&eq(&c), &grp).unwrap().classification, want);
        }
    }

    #[test]
    fn corollary_constant_values() {
        let c3 = corollary_constant(3);
        assert!((c3 - 9.0 * 1024.0 * 729.0 * std::f64::consts::SQRT_2).abs() < 1e-3);
        assert!(c3 > 9.4e6 && c3 < 9.6e6);
    }

    #[test]
    fn set_witnesses_small_groups() {
        let s = corollary_sets(&eq(&[1, 1, 1]), &g(&[101])).unwrap();
        assert!(!s.above_threshold);
        assert!(s.inequalities_verified);
        assert!(s.rounding.size as f64 >= 0.5 * 101.0 - 1.0);

        let s = corollary_sets(&eq(&[1, 1, 1, 1]), &g(&[7])).unwrap();
        assert_eq!(s.rounding.mode, Mode::Common);
        assert!(s.inequalities_verified);

        assert!(matches!(corollary_sets(&eq(&[1, -1]), &g(&[5])), Err(Error::PositiveCase(_))));
        assert!(matches!(corollary_sets(&eq(&[1, 5]), &g(&[5])), Err(Error::PositiveCase(_))));
    }
}
