//! Negative witnesses: functions `f: G -> [0, 1]` with mean 1/2 and negative
//! deviation.
//!
//! The construction fixes `a` of maximal order, takes `U = {L_i a}` and one
//! representative `s_j` of each `+-` pair in `U`, and places the spectrum
//!
//! ```text
//! g(0) = 1/2,  g(s_j) = e(phi / (2d)^j) / 4r,  g(-s_j) = conj(g(s_j))
//! ```
//!
//! Its inverse transform `f_phi` stays in `[0, 1]`, and `(4r)^d` times the
//! deviation of `f_phi` is the trigonometric polynomial
//! `psi(phi) = sum_{x in X} cos(2 pi c_x phi)` with frequencies `c_x` that are
//! nonzero multiples of `(2d)^-r`. A phase with `psi <= -|X| / (2 sqrt2 (2d)^r)`
//! always exists; [`find_negative_phase`] locates one numerically.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::config::{has_canceling_partition, Equation};
use crate::error::{Error, Result};
use crate::fourier::{self, coefficient_maps, idft, DenseFunction, Spectrum};
use crate::group::{GroupElement, GroupSpec};
use crate::{REAL_TOL, TOL};

/// Minimum number of grid points in the phase search.
pub const MIN_GRID: usize = 100_000;
/// Grid points per unit of phase.
pub const GRID_PER_UNIT: f64 = 1000.0;

/// One element of `X` with its signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanInstance {
    /// Rank of `x`.
    pub x: usize,
    /// `(j_i, sigma_i)` per coefficient: `L_i x = sigma_i * s_{j_i}`, `j_i` 1-based.
    pub signature: Vec<(usize, i8)>,
    /// Numerator of `c_x` over [`WitnessPlan::denominator`].
    pub freq_num: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPlan {
    pub d: usize,
    pub a: GroupElement,
    /// Ranks of `U = {L_i a}`, sorted and deduplicated.
    pub u: Vec<usize>,
    /// Ranks of `s_1..s_r`.
    pub s: Vec<usize>,
    pub r: usize,
    pub instances: Vec<PlanInstance>,
    /// `(2d)^r`.
    pub denominator: i64,
    /// `|X| / (2 sqrt2 (2d)^r)`.
    pub threshold: f64,
    /// `(2d)^r` as a float; also the period of `psi`.
    pub period: f64,
}

impl WitnessPlan {
    pub fn x_size(&self) -> usize {
        self.instances.len()
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.instances[i].freq_num as f64 / self.denominator as f64
    }

    pub fn contains(&self, rank: usize) -> bool {
        self.instances.iter().any(|p| p.x == rank)
    }
}

fn checked_pow(base: i64, exp: usize) -> Result<i64> {
    base.checked_pow(exp as u32)
        .ok_or_else(|| Error::PlanInvariant(format!("({base})^{exp} overflows i64")))
}

pub(crate) fn require_negative_case(eq: &Equation, group: &GroupSpec) -> Result<()> {
    if let Some(c) = eq.first_non_coprime(group) {
        return Err(Error::NonCoprimeCoefficient {
            coeff: c,
            order: group.order(),
        });
    }
    if has_canceling_partition(eq, group).exists {
        return Err(Error::CancelingPartition);
    }
    Ok(())
}

pub fn build_plan(eq: &Equation, group: &GroupSpec) -> Result<WitnessPlan> {
    require_negative_case(eq, group)?;
    if group.exponent() == 2 {
        return Err(Error::ExponentTwo);
    }
    let d = eq.arity();
    let n = group.size();
    let a = group.max_order_element();
    let a_rank = group.rank_of(&a);

    let mut u: Vec<usize> = eq
        .coeffs()
        .iter()
        .map(|&c| group.scalar_mul_rank(c, a_rank))
        .collect();
    u.sort_unstable();
    u.dedup();
    if u.iter().any(|&b| b == group.neg_rank(b)) {
        return Err(Error::PlanInvariant("an element of U is its own inverse".into()));
    }

    let mut s: Vec<usize> = u.iter().map(|&b| b.min(group.neg_rank(b))).collect();
    s.sort_unstable();
    s.dedup();
    let r = s.len();
    let base = 2 * d as i64;
    let denominator = checked_pow(base, r)?;

    // rank -> (level j, sign) for members of S and -S
    let mut level = vec![None; n];
    for (j, &sj) in s.iter().enumerate() {
        level[sj] = Some((j + 1, 1i8));
        level[group.neg_rank(sj)] = Some((j + 1, -1i8));
    }

    let maps = coefficient_maps(eq, group);
    let mut instances = Vec::new();
    for x in 1..n {
        let Some(signature) = maps.iter().map(|m| level[m[x]]).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let mut freq_num = 0i64;
        for &(j, sign) in &signature {
            freq_num += sign as i64 * checked_pow(base, r - j)?;
        }
        let unbalanced = (1..=r).any(|j| {
            let net: i64 = signature
                .iter()
                .filter(|&&(jj, _)| jj == j)
                .map(|&(_, sign)| sign as i64)
                .sum();
            net != 0
        });
        if !unbalanced {
            return Err(Error::PlanInvariant(format!(
                "signature of {} is balanced at every level",
                group.unrank(x)
            )));
        }
        if freq_num == 0 || 2 * freq_num.abs() > denominator {
            return Err(Error::PlanInvariant(format!(
                "frequency {freq_num}/{denominator} out of range"
            )));
        }
        instances.push(PlanInstance {
            x,
            signature,
            freq_num,
        });
    }

    let plan = WitnessPlan {
        d,
        a,
        u,
        s,
        r,
        threshold: instances.len() as f64 / (2.0 * SQRT_2 * denominator as f64),
        period: denominator as f64,
        instances,
        denominator,
    };
    check_plan(&plan, group)?;
    Ok(plan)
}

fn check_plan(plan: &WitnessPlan, group: &GroupSpec) -> Result<()> {
    let a_rank = group.rank_of(&plan.a);
    if !plan.contains(a_rank) || !plan.contains(group.neg_rank(a_rank)) {
        return Err(Error::PlanInvariant("a or -a missing from X".into()));
    }
    if plan.r > plan.d {
        return Err(Error::PlanInvariant("r exceeds d".into()));
    }
    for inst in &plan.instances {
        if group.element_order(&group.unrank(inst.x)) != group.exponent() {
            return Err(Error::PlanInvariant(format!(
                "{} is not of maximal order",
                group.unrank(inst.x)
            )));
        }
        let neg = group.neg_rank(inst.x);
        let mirrored = plan.instances.iter().find(|p| p.x == neg);
        if mirrored.map(|p| p.freq_num) != Some(-inst.freq_num) {
            return Err(Error::PlanInvariant("c_{-x} != -c_x".into()));
        }
    }
    Ok(())
}

/// The sparse spectrum `g_phi`.
pub fn phase_function(plan: &WitnessPlan, group: &GroupSpec, phi: f64) -> Spectrum {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); group.size()];
    coeffs[0] = Complex64::new(0.5, 0.0);
    let amp = 1.0 / (4.0 * plan.r as f64);
    let base = 2.0 * plan.d as f64;
    for (j, &sj) in plan.s.iter().enumerate() {
        let z = Complex64::from_polar(amp, TAU * phi / base.powi(j as i32 + 1));
        coeffs[sj] = z;
        coeffs[group.neg_rank(sj)] = z.conj();
    }
    Spectrum::new(coeffs)
}

/// Checks a candidate witness is real, in `[0, 1]` with mean 1/2, then
/// strips rounding noise.
fn finish_witness(raw: DenseFunction) -> Result<DenseFunction> {
    if !raw.is_real() {
        return Err(Error::Assertion("witness function is not real".into()));
    }
    raw.check_unit_range()?;
    let mean = raw.mean().re;
    if (mean - 0.5).abs() > REAL_TOL {
        return Err(Error::Assertion(format!("witness mean {mean} != 1/2")));
    }
    Ok(DenseFunction::from_real(
        raw.values().iter().map(|v| v.re.clamp(0.0, 1.0)).collect(),
    ))
}

/// `f_phi`, the inverse transform of [`phase_function`].
pub fn witness_function(plan: &WitnessPlan, group: &GroupSpec, phi: f64) -> Result<DenseFunction> {
    finish_witness(idft(group, &phase_function(plan, group, phi))?)
}

/// `(4r)^d` times the deviation of `f_phi`.
pub fn psi(plan: &WitnessPlan, phi: f64) -> f64 {
    let den = plan.denominator as f64;
    plan.instances
        .iter()
        .map(|p| (TAU * (p.freq_num as f64 / den) * phi).cos())
        .sum()
}

/// `(4r)^-d`, the factor turning `psi` into a deviation.
pub fn psi_scale(plan: &WitnessPlan) -> f64 {
    (4.0 * plan.r as f64).powi(-(plan.d as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSearch {
    pub phi: f64,
    pub psi: f64,
    pub grid_points: usize,
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if hi - lo < 1e-13 * (1.0 + hi.abs()) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

const REFINED_CANDIDATES: usize = 8;
const TIE: f64 = 1e-12;

fn search_grid(plan: &WitnessPlan, points: usize) -> PhaseSearch {
    let step = plan.period / points as f64;
    let values: Vec<f64> = (0..points).map(|k| psi(plan, k as f64 * step)).collect();
    // cyclic local minima of the sampled psi
    let mut minima: Vec<usize> = (0..points)
        .filter(|&k| {
            let prev = values[(k + points - 1) % points];
            let next = values[(k + 1) % points];
            values[k] <= prev && values[k] <= next
        })
        .collect();
    minima.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    minima.truncate(REFINED_CANDIDATES);

    let mut best: Option<(f64, f64)> = None;
    for k in minima {
        let centre = k as f64 * step;
        let phi = golden_section(|p| psi(plan, p), centre - step, centre + step).rem_euclid(plan.period);
        let value = psi(plan, phi);
        let better = match best {
            None => true,
            Some((bphi, bval)) => value < bval - TIE || (value <= bval + TIE && phi < bphi),
        };
        if better {
            best = Some((phi, value));
        }
    }
    let (phi, value) = best.unwrap_or((0.0, values[0]));
    PhaseSearch {
        phi,
        psi: value,
        grid_points: points,
    }
}

/// A phase `phi* in [0, (2d)^r)` with `psi(phi*) <= -threshold`.
///
/// Uniform grid of `max(10^5, 1000 (2d)^r)` points, then golden-section
/// refinement of the best local minima. Ties go to the smaller phase. One
/// retry with a ten times finer grid precedes failure.
pub fn find_negative_phase(plan: &WitnessPlan) -> Result<PhaseSearch> {
    let points = MIN_GRID.max((GRID_PER_UNIT * plan.period).ceil() as usize);
    let mut found = search_grid(plan, points);
    if found.psi > -plan.threshold {
        found = search_grid(plan, points * 10);
    }
    if found.psi > -plan.threshold {
        return Err(Error::PhaseSearchFailed {
            best: found.psi,
            threshold: plan.threshold,
        });
    }
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationBound {
    /// `(4r)^-d / (2 sqrt2 (2d)^r)`.
    pub tight: f64,
    /// `1 / (2^(3d+1) sqrt2 d^(2d))`, valid for every `r <= d`.
    pub universal: f64,
}

pub fn deviation_bound(d: usize, r: usize) -> Result<DeviationBound> {
    if r < 1 || r > d {
        return Err(Error::Precondition(format!("need 1 <= r <= d, got r={r}, d={d}")));
    }
    let (d_f, r_f) = (d as f64, r as f64);
    let tight = (4.0 * r_f).powi(-(d as i32)) / (2.0 * SQRT_2 * (2.0 * d_f).powi(r as i32));
    let universal = 1.0 / (2f64.powi(3 * d as i32 + 1) * SQRT_2 * d_f.powi(2 * d as i32));
    Ok(DeviationBound { tight, universal })
}

/// Witness for odd `d` in groups of exponent 2: `f = 1/2 - chi_a / 4`.
///
/// The only nonzero Fourier coefficient besides the mean sits at `a`, so the
/// deviation is `(-1/4)^d`.
pub fn witness_exponent2(eq: &Equation, group: &GroupSpec) -> Result<DenseFunction> {
    if group.exponent() != 2 {
        return Err(Error::Precondition("group exponent is not 2".into()));
    }
    if eq.arity() % 2 == 0 {
        return Err(Error::Precondition("exponent-2 witness needs odd d".into()));
    }
    if let Some(c) = eq.first_non_coprime(group) {
        return Err(Error::NonCoprimeCoefficient {
            coeff: c,
            order: group.order(),
        });
    }
    let a = group.max_order_element();
    let values = group
        .elements()
        .map(|x| Ok(0.5 - 0.25 * group.character_eval(&a, &x)?.re))
        .collect::<Result<Vec<f64>>>()?;
    finish_witness(DenseFunction::from_real(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    PhaseSearch,
    ExponentTwo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub construction: Construction,
    pub phi_star: Option<f64>,
    pub psi_value: Option<f64>,
    pub deviation: f64,
    pub threshold: Option<f64>,
    pub delta_tight: f64,
    pub delta_universal: f64,
    #[serde(rename = "X_size")]
    pub x_size: usize,
    pub r: usize,
    pub mean: f64,
    /// `t_L(f)`.
    pub multiplicity: f64,
    /// `t_L(f) + t_L(1 - f)`, even `d` only.
    pub common_sum: Option<f64>,
    /// `2^-d - delta_tight` (odd `d`) or `2^(1-d) - 2 delta_tight` (even `d`).
    pub target: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncommonWitness {
    pub function: DenseFunction,
    pub certificate: WitnessCertificate,
    pub plan: Option<WitnessPlan>,
}

/// Function witness for an equation with coprime coefficients and no
/// canceling partition: not fully Sidorenko for odd `d`, not fully common
/// for even `d`.
pub fn build_uncommon_witness(eq: &Equation, group: &GroupSpec) -> Result<UncommonWitness> {
    require_negative_case(eq, group)?;
    let d = eq.arity();

    let (function, plan, search) = if group.exponent() == 2 {
        (witness_exponent2(eq, group)?, None, None)
    } else {
        let plan = build_plan(eq, group)?;
        let search = find_negative_phase(&plan)?;
        let f = witness_function(&plan, group, search.phi)?;
        (f, Some(plan), Some(search))
    };
    let r = plan.as_ref().map_or(1, |p| p.r);
    let bound = deviation_bound(d, r)?;

    let mean = function.mean().re;
    let deviation = fourier::deviation(&function, eq, group)?;
    let multiplicity = fourier::expect_real(fourier::multiplicity_fourier(&function, eq, group)?)?;
    let half_d = 0.5f64.powi(d as i32);
    let (common_sum, target, achieved) = if d % 2 == 0 {
        let s = fourier::common_sum(&function, eq, group)?;
        (Some(s), 2.0 * half_d - 2.0 * bound.tight, s)
    } else {
        (None, half_d - bound.tight, multiplicity)
    };

    let mut verified = (mean - 0.5).abs() <= REAL_TOL
        && achieved <= target
        && deviation <= -bound.universal
        && function.check_unit_range().is_ok();
    if let (Some(plan), Some(search)) = (&plan, &search) {
        verified &= (deviation - psi_scale(plan) * search.psi).abs() <= TOL;
        verified &= deviation <= -psi_scale(plan) * plan.threshold;
    }

    let certificate = WitnessCertificate {
        construction: if plan.is_some() {
            Construction::PhaseSearch
        } else {
            Construction::ExponentTwo
        },
        phi_star: search.map(|s| s.phi),
        psi_value: search.map(|s| s.psi),
        deviation,
        threshold: plan.as_ref().map(|p| p.threshold),
        delta_tight: bound.tight,
        delta_universal: bound.universal,
        x_size: plan.as_ref().map_or(1, WitnessPlan::x_size),
        r,
        mean,
        multiplicity,
        common_sum,
        target,
        verified,
    };
    Ok(UncommonWitness {
        function,
        certificate,
        plan,
    })
}
