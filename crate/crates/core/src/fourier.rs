//! Discrete Fourier analysis on a finite Abelian group.
//!
//! Conventions: `f^(a) = E_x <a, x> f(x)` and `f(x) = sum_a f^(a) <a, -x>`,
//! with the dual group indexed by group ranks through the fixed pairing.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::config::{is_full_rank_single, Equation};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::{REAL_TOL, TOL};

/// A function on `G`, stored in canonical rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFunction {
    values: Vec<Complex64>,
}

impl DenseFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: Vec<f64>) -> Self {
        Self::new(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(group: &GroupSpec, c: Complex64) -> Self {
        Self::new(vec![c; group.size()])
    }

    /// Indicator of a set given as a membership mask over ranks.
    pub fn indicator(mask: &[bool]) -> Self {
        Self::from_real(mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }

    /// Indicator of a set given by its element ranks.
    pub fn indicator_of(group: &GroupSpec, ranks: &[usize]) -> Self {
        let mut mask = vec![false; group.size()];
        for &r in ranks {
            mask[r] = true;
        }
        Self::indicator(&mask)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every imaginary part is zero within `REAL_TOL`.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() <= REAL_TOL)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `1 - f`.
    pub fn complement(&self) -> Self {
        Self::new(self.values.iter().map(|v| 1.0 - v).collect())
    }

    /// Checks that `f` is real with values in `[0, 1]` up to `REAL_TOL`.
    pub fn check_unit_range(&self) -> Result<()> {
        for (rank, v) in self.values.iter().enumerate() {
            if v.im.abs() > REAL_TOL || v.re < -REAL_TOL || v.re > 1.0 + REAL_TOL {
                return Err(Error::RangeViolation { rank, value: v.re });
            }
        }
        Ok(())
    }
}

impl Serialize for DenseFunction {
    /// Plain reals when the function is real, `[re, im]` pairs otherwise.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.values.len()))?;
        if self.is_real() {
            for v in &self.values {
                seq.serialize_element(&v.re)?;
            }
        } else {
            for v in &self.values {
                seq.serialize_element(&[v.re, v.im])?;
            }
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl<'de> Deserialize<'de> for DenseFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<Entry>::deserialize(deserializer)?;
        if entries.is_empty() {
            return Err(de::Error::custom("function has no values"));
        }
        Ok(Self::new(
            entries
                .into_iter()
                .map(|e| match e {
                    Entry::Real(re) => Complex64::new(re, 0.0),
                    Entry::Pair([re, im]) => Complex64::new(re, im),
                })
                .collect(),
        ))
    }
}

/// Fourier coefficients; index `a` is the character `<a, .>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `s[-a] = conj(s[a])` for every `a`, i.e. the inverse is real.
    pub fn is_conjugate_symmetric(&self, group: &GroupSpec) -> bool {
        (0..self.coeffs.len())
            .all(|a| (self.coeffs[group.neg_rank(a)] - self.coeffs[a].conj()).norm() <= REAL_TOL)
    }
}

/// Residues of every element and the `exponent`-th roots of unity.
struct CharacterTable<'a> {
    group: &'a GroupSpec,
    digits: Vec<Vec<u64>>,
    roots: Vec<Complex64>,
}

impl<'a> CharacterTable<'a> {
    fn new(group: &'a GroupSpec) -> Self {
        let e = group.exponent();
        Self {
            group,
            digits: group.elements().map(|x| x.0).collect(),
            roots: (0..e)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / e as f64))
                .collect(),
        }
    }

    fn eval(&self, a: usize, x: usize) -> Complex64 {
        self.roots[self.group.pairing_phase(&self.digits[a], &self.digits[x]) as usize]
    }
}

fn check_len(len: usize, group: &GroupSpec) -> Result<()> {
    if len != group.size() {
        return Err(Error::DimensionMismatch {
            expected: group.size(),
            found: len,
        });
    }
    Ok(())
}

pub fn dft(group: &GroupSpec, f: &DenseFunction) -> Result<Spectrum> {
    check_len(f.len(), group)?;
    let table = CharacterTable::new(group);
    let n = group.size();
    let vals = f.values();
    let coeffs = (0..n)
        .map(|a| (0..n).map(|x| table.eval(a, x) * vals[x]).sum::<Complex64>() / n as f64)
        .collect();
    Ok(Spectrum::new(coeffs))
}

pub fn idft(group: &GroupSpec, s: &Spectrum) -> Result<DenseFunction> {
    check_len(s.len(), group)?;
    let table = CharacterTable::new(group);
    let n = group.size();
    let coeffs = s.coeffs();
    // skip exact zeros; sparse spectra are common here
    let support: Vec<usize> = (0..n).filter(|&a| coeffs[a] != Complex64::new(0.0, 0.0)).collect();
    let values = (0..n)
        .map(|x| {
            support
                .iter()
                .map(|&a| coeffs[a] * table.eval(a, x).conj())
                .sum::<Complex64>()
        })
        .collect();
    Ok(DenseFunction::new(values))
}

/// For each coefficient `L_i`, the table `x -> rank(L_i x)`.
pub(crate) fn coefficient_maps(eq: &Equation, group: &GroupSpec) -> Vec<Vec<usize>> {
    eq.coeffs()
        .iter()
        .map(|&c| (0..group.size()).map(|x| group.scalar_mul_rank(c, x)).collect())
        .collect()
}

/// `sum_x prod_i s[L_i x]`, optionally leaving out `x = 0`.
pub fn spectral_sum(spectrum: &Spectrum, eq: &Equation, group: &GroupSpec, skip_zero: bool) -> Result<Complex64> {
    check_len(spectrum.len(), group)?;
    let maps = coefficient_maps(eq, group);
    let s = spectrum.coeffs();
    let start = usize::from(skip_zero);
    Ok((start..group.size())
        .map(|x| maps.iter().map(|m| s[m[x]]).product::<Complex64>())
        .sum())
}

fn require_full_rank(eq: &Equation, group: &GroupSpec) -> Result<()> {
    if !is_full_rank_single(eq, group) {
        return Err(Error::NoCoprimeCoefficient {
            order: group.order(),
        });
    }
    Ok(())
}

/// Arithmetic multiplicity `t_L(f)` computed on the Fourier side.
pub fn multiplicity_fourier(f: &DenseFunction, eq: &Equation, group: &GroupSpec) -> Result<Complex64> {
    require_full_rank(eq, group)?;
    spectral_sum(&dft(group, f)?, eq, group, false)
}

/// Real part of a sum whose imaginary part must vanish.
pub(crate) fn expect_real(z: Complex64) -> Result<f64> {
    if z.im.abs() > TOL {
        return Err(Error::ResidualImaginary(z.im));
    }
    Ok(z.re)
}

/// `t_L(f) - E(f)^d`: the spectral sum over nonzero `x`.
pub fn deviation(f: &DenseFunction, eq: &Equation, group: &GroupSpec) -> Result<f64> {
    require_full_rank(eq, group)?;
    if !f.is_real() {
        return Err(Error::Precondition("deviation needs a real function".into()));
    }
    expect_real(spectral_sum(&dft(group, f)?, eq, group, true)?)
}

/// `t_L(f) + t_L(1 - f)` for `f: G -> [0, 1]`.
///
/// When every coefficient is coprime to `|G|` the result is checked against
/// `E^d + (1 - E)^d + 2 * deviation` (even `d`) or `E^d + (1 - E)^d` (odd `d`).
pub fn common_sum(f: &DenseFunction, eq: &Equation, group: &GroupSpec) -> Result<f64> {
    require_full_rank(eq, group)?;
    f.check_unit_range()?;
    let spec = dft(group, f)?;
    let spec_c = dft(group, &f.complement())?;
    let t_f = expect_real(spectral_sum(&spec, eq, group, false)?)?;
    let t_c = expect_real(spectral_sum(&spec_c, eq, group, false)?)?;
    let total = t_f + t_c;

    if eq.all_coprime(group) {
        let d = eq.arity() as i32;
        let mean = spec.coeffs()[0].re;
        let mut expected = mean.powi(d) + (1.0 - mean).powi(d);
        if d % 2 == 0 {
            expected += 2.0 * expect_real(spectral_sum(&spec, eq, group, true)?)?;
        }
        if (total - expected).abs() > TOL {
            return Err(Error::Assertion(format!(
                "common sum {total} differs from spectral identity {expected}"
            )));
        }
    }
    Ok(total)
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

    fn random_unit(group: &GroupSpec, rng: &mut ChaCha8Rng) -> DenseFunction {
        DenseFunction::from_real((0..group.size()).map(|_| rng.gen::<f64>()).collect())
    }

    fn random_complex(group: &GroupSpec, rng: &mut ChaCha8Rng) -> DenseFunction {
        DenseFunction::new(
            (0..group.size())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    const GROUPS: [&[u64]; 6] = [&[5], &[6, 4], &[2, 2, 2], &[9], &[3, 5], &[12]];

    #[test]
    fn point_mass_and_constant() {
        for f in GROUPS {
            let grp = g(f);
            let n = grp.size();
            let mut vals = vec![Complex64::new(0.0, 0.0); n];
            vals[0] = Complex64::new(n as f64, 0.0);
            let s = dft(&grp, &DenseFunction::new(vals)).unwrap();
            assert!(s.coeffs().iter().all(|c| (c - 1.0).norm() < 1e-12));

            let c = Complex64::new(0.7, 0.1);
            let s = dft(&grp, &DenseFunction::constant(&grp, c)).unwrap();
            assert!((s.coeffs()[0] - c).norm() < 1e-12);
            assert!(s.coeffs()[1..].iter().all(|z| z.norm() < 1e-12));

            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            coeffs[0] = c;
            let back = idft(&grp, &Spectrum::new(coeffs)).unwrap();
            assert!(back.values().iter().all(|v| (v - c).norm() < 1e-12));
        }
    }

    #[test]
    fn length_mismatch() {
        let grp = g(&[5]);
        let f = DenseFunction::from_real(vec![0.0; 4]);
        assert!(matches!(dft(&grp, &f), Err(Error::DimensionMismatch { expected: 5, found: 4 })));
        assert!(idft(&grp, &Spectrum::new(vec![Complex64::new(0.0, 0.0); 6])).is_err());
    }

    #[test]
    fn parseval_plancherel_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in GROUPS {
            let grp = g(f);
            for _ in 0..100 {
                let a = random_complex(&grp, &mut rng);
                let b = random_complex(&grp, &mut rng);
                let sa = dft(&grp, &a).unwrap();
                let sb = dft(&grp, &b).unwrap();
                let lhs: Complex64 = sa.coeffs().iter().zip(sb.coeffs()).map(|(x, y)| x * y.conj()).sum();
                let rhs: Complex64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>()
                    / grp.size() as f64;
                assert!((lhs - rhs).norm() < 1e-9);
                let energy: f64 = sa.coeffs().iter().map(|c| c.norm_sqr()).sum();
                let mean_sq: f64 = a.values().iter().map(|c| c.norm_sqr()).sum::<f64>() / grp.size() as f64;
                assert!((energy - mean_sq).abs() < 1e-9);
                let back = idft(&grp, &sa).unwrap();
                assert!(back.values().iter().zip(a.values()).all(|(x, y)| (x - y).norm() < 1e-9));
                assert!((sa.coeffs()[0] - a.mean()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn real_functions_have_symmetric_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for f in GROUPS {
            let grp = g(f);
            let real = random_unit(&grp, &mut rng);
            let s = dft(&grp, &real).unwrap();
            assert!(s.is_conjugate_symmetric(&grp));
            // and conversely
            let n = grp.size();
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            for a in 0..n {
                let b = grp.neg_rank(a);
                if a < b {
                    let z = Complex64::new(rng.gen(), rng.gen());
                    coeffs[a] = z;
                    coeffs[b] = z.conj();
                } else if a == b {
                    coeffs[a] = Complex64::new(rng.gen(), 0.0);
                }
            }
            let spec = Spectrum::new(coeffs);
            assert!(spec.is_conjugate_symmetric(&grp));
            assert!(idft(&grp, &spec).unwrap().is_real());
            assert!(!random_complex(&grp, &mut rng).is_real());
        }
    }

    #[test]
    fn multiplicity_examples() {
        let z5 = g(&[5]);
        let e = eq(&[1, 1, -1]);
        let c = Complex64::new(0.4, 0.3);
        let t = multiplicity_fourier(&DenseFunction::constant(&z5, c), &e, &z5).unwrap();
        assert!((t - c.powi(3)).norm() < 1e-12);
        let a = DenseFunction::indicator_of(&z5, &[1, 2]);
        let t = multiplicity_fourier(&a, &e, &z5).unwrap();
        assert!((t - 1.0 / 25.0).norm() < 1e-12);
        assert!(matches!(
            multiplicity_fourier(&a, &eq(&[5, 10]), &z5),
            Err(Error::NoCoprimeCoefficient { .. })
        ));
    }

    #[test]
    fn fourier_matches_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut cases = 0;
        while cases < 200 {
            let f = GROUPS[rng.gen_range(0..GROUPS.len())];
            let grp = g(f);
            let d = rng.gen_range(2..=4);
            let coeffs: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            let e = eq(&coeffs);
            if !is_full_rank_single(&e, &grp) {
                continue;
            }
            cases += 1;
            let func = if cases % 2 == 0 { random_unit(&grp, &mut rng) } else { random_complex(&grp, &mut rng) };
            let four = multiplicity_fourier(&func, &e, &grp).unwrap();
            let brute = multiplicity_bruteforce(&func, &LinearSystem::from(&e), &grp).unwrap();
            assert!((four - brute).norm() < 1e-9, "{e} in {grp}: {four} vs {brute}");
            if func.is_real() {
                assert!(four.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn coprime_coefficients_never_hit_zero() {
        for f in GROUPS {
            let grp = g(f);
            for c in -13i64..=13 {
                if !grp.is_coprime_to_order(c) {
                    continue;
                }
                for x in 1..grp.size() {
                    assert_ne!(grp.scalar_mul_rank(c, x), 0);
                }
            }
        }
    }

    #[test]
    fn deviation_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for f in [&[5u64][..], &[7], &[3, 5], &[9]] {
            let grp = g(f);
            for c in [&[1i64, 1, 1][..], &[1, -1, 2, -2], &[1, 2, 4, 1], &[1, 1]] {
                let e = eq(c);
                if !e.all_coprime(&grp) {
                    continue;
                }
                let half = DenseFunction::constant(&grp, Complex64::new(0.5, 0.0));
                assert!(deviation(&half, &e, &grp).unwrap().abs() < 1e-12);
                for _ in 0..20 {
                    let func = random_unit(&grp, &mut rng);
                    let dev = deviation(&func, &e, &grp).unwrap();
                    let dev_c = deviation(&func.complement(), &e, &grp).unwrap();
                    let sign = if e.arity() % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((dev_c - sign * dev).abs() < 1e-9);
                    let t = multiplicity_bruteforce(&func, &LinearSystem::from(&e), &grp).unwrap().re;
                    assert!((t - func.mean().re.powi(e.arity() as i32) - dev).abs() < 1e-9);
                    if crate::config::has_canceling_partition(&e, &grp).exists {
                        assert!(dev >= -1e-12);
                    }
                }
            }
        }
        let z5 = g(&[5]);
        let complex = random_complex(&z5, &mut rng);
        assert!(matches!(deviation(&complex, &eq(&[1, 1, 1]), &z5), Err(Error::Precondition(_))));
    }

    #[test]
    fn common_sum_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [&[5u64][..], &[7], &[4]] {
            let grp = g(f);
            for d in 2..=5 {
                let e = Equation::new(&vec![1; d]).unwrap();
                let half = DenseFunction::constant(&grp, Complex64::new(0.5, 0.0));
                let s = common_sum(&half, &e, &grp).unwrap();
                assert!((s - 0.5f64.powi(d as i32 - 1)).abs() < 1e-12);
            }
        }
        // odd d and mean exactly 1/2: the sum is exactly 2^(1-d)
        let grp = g(&[7]);
        let e = eq(&[1, 2, 3]);
        for _ in 0..20 {
            let mut vals: Vec<f64> = (0..6).map(|_| rng.gen()).collect();
            let s: f64 = vals.iter().sum();
            vals.push(3.5 - s);
            if !(0.0..=1.0).contains(&vals[6]) {
                continue;
            }
            let func = DenseFunction::from_real(vals);
            assert!((common_sum(&func, &e, &grp).unwrap() - 0.25).abs() < 1e-9);
        }
        let bad = DenseFunction::from_real(vec![0.5, 1.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(common_sum(&bad, &e, &grp), Err(Error::RangeViolation { rank: 1, .. })));
    }

    #[test]
    fn json_shape() {
        let real = DenseFunction::from_real(vec![0.25, 0.75]);
        assert_eq!(serde_json::to_string(&real).unwrap(), "[0.25,0.75]");
        let cplx = DenseFunction::new(vec![Complex64::new(1.0, -1.0), Complex64::new(0.0, 0.5)]);
        let text = serde_json::to_string(&cplx).unwrap();
        assert_eq!(text, "[[1.0,-1.0],[0.0,0.5]]");
        let back: DenseFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cplx);
        let mixed: DenseFunction = serde_json::from_str("[0.5,[0.25,0.0]]").unwrap();
        assert!(mixed.is_real());
        assert!(serde_json::from_str::<DenseFunction>("[]").is_err());
    }
}
