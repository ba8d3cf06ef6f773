//! Three independent exact computations of tau(1..N), and the A/B split
//! 3*tau(n) = A(n) - B(n) with closed-form A and convolution B.
//!
//! Engines:
//!   * `tau_eta` - expands q * prod (1-q^n)^24 with the pentagonal-number
//!     sparse series raised to the 24th power by repeated sparse
//!     multiplication, in checked i128 (exact well past n = 10^6).
//!   * `tau_eisenstein` - evaluates
//!     756 tau(n) = 65 sigma11(n) + 691 sigma5(n) - 691*252 * conv(n),
//!     conv(n) = sum_j sigma5(j) sigma5(n-j), in big integers and divides
//!     with a remainder assertion.
//!   * `tau_discriminant` - builds E4 and E6 from divisor sums with leading
//!     coefficients derived from Bernoulli numbers, and reads tau off
//!     (E4^3 - E6^2)/1728.
//!
//! The three share no series code, which is what makes cross-agreement a
//! meaningful check.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::bernoulli;
use crate::error::{Error, Result};
use crate::sieves::SigmaTable;

/// The prime governing every congruence in this crate; re-derived from
/// the numerator of the twelfth Bernoulli number by `self_check`.
pub const CONGRUENCE_PRIME: u64 = 691;

/// Which engine produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Eta,
    Eisenstein,
    Discriminant,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Eta => "eta",
            Engine::Eisenstein => "eisenstein",
            Engine::Discriminant => "discriminant",
        }
    }
}

/// tau(1..=upper) as exact integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSeries {
    engine: Engine,
    values: Vec<BigInt>, // values[0] unused
}

impl TauSeries {
    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn upper(&self) -> usize {
        self.values.len() - 1
    }

    pub fn tau(&self, n: usize) -> &BigInt {
        &self.values[n]
    }
}

// ---------------------------------------------------------------------------
// Shared coefficient data
// ---------------------------------------------------------------------------

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The three rational coefficients of the sigma expansion of tau(n).
fn tau_expansion_coefficients() -> [BigRational; 3] {
    let p = CONGRUENCE_PRIME as i64;
    [ratio(65, 756), ratio(p, 756), ratio(p, 3)]
}

/// Coefficients of the A(n)/B(n) split: A uses the first two over 252,
/// B scales the convolution by the congruence prime itself.
fn ab_coefficients() -> [BigRational; 3] {
    let p = CONGRUENCE_PRIME as i64;
    [ratio(65, 252), ratio(p, 252), ratio(p, 1)]
}

/// Leading coefficient -2k/B_k of the weight-k Eisenstein series, derived
/// from the Bernoulli recurrence and required to be an integer.
pub fn eisenstein_coefficient(k: u32) -> Result<BigInt> {
    let bk = bernoulli(k);
    if bk.is_zero() {
        return Err(Error::Domain(format!("eisenstein_coefficient: B_{k} = 0")));
    }
    let c = -BigRational::from(BigInt::from(2 * k as i64)) / bk;
    if !c.is_integer() {
        return Err(Error::Inconsistency(format!(
            "eisenstein_coefficient: -2k/B_k is not an integer at k = {k}"
        )));
    }
    Ok(c.to_integer())
}

/// Startup self-check tying hardcoded constants to the machinery that is
/// supposed to produce them. Guards transcription errors.
pub fn self_check() -> Result<()> {
    let b12 = bernoulli(12);
    let numer = b12.numer().abs();
    if numer != BigInt::from(CONGRUENCE_PRIME) {
        return Err(Error::Inconsistency(format!(
            "|numerator(B_12)| = {numer}, expected the congruence prime {CONGRUENCE_PRIME}"
        )));
    }
    if b12 != BigRational::new(-BigInt::from(CONGRUENCE_PRIME), BigInt::from(2730)) {
        return Err(Error::Inconsistency(format!("B_12 = {b12}, expected -691/2730")));
    }
    let tau_c = tau_expansion_coefficients();
    let ab_c = ab_coefficients();
    let three = BigRational::from(BigInt::from(3));
    for (a, t) in ab_c.iter().zip(tau_c.iter()) {
        if a != &(t * &three) {
            return Err(Error::Inconsistency(format!(
                "A/B coefficient {a} is not 3 x tau coefficient {t}"
            )));
        }
    }
    if tau_c[0].clone() + tau_c[1].clone() != BigRational::one() {
        return Err(Error::Inconsistency("tau(1) would not be 1".into()));
    }
    if eisenstein_coefficient(4)? != BigInt::from(240) {
        return Err(Error::Inconsistency("E4 leading coefficient is not 240".into()));
    }
    if eisenstein_coefficient(6)? != BigInt::from(-504) {
        return Err(Error::Inconsistency("E6 leading coefficient is not -504".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Eta engine
// ---------------------------------------------------------------------------

/// Exponent/sign pairs of prod (1-q^n) = sum (-1)^k q^{k(3k-1)/2}, all
/// exponents <= max_exp, including the constant term (0, +1).
fn pentagonal_terms(max_exp: usize) -> Vec<(usize, i32)> {
    let mut terms = vec![(0usize, 1i32)];
    let mut k = 1u64;
    loop {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g1 > max_exp && g2 > max_exp {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        if g1 <= max_exp {
            terms.push((g1, sign));
        }
        if g2 <= max_exp {
            terms.push((g2, sign));
        }
        k += 1;
    }
    terms.sort_unstable();
    terms
}

/// tau(1..=upper) from the eta product.
pub fn tau_eta(upper: usize) -> Result<TauSeries> {
    if upper < 1 {
        return Err(Error::Domain("tau_eta: upper bound must be >= 1".into()));
    }
    let len = upper; // coefficients 0..=upper-1 of prod(1-q^n)^24; tau(n) shifts by one
    let pent = pentagonal_terms(len - 1);
    let overflow = || Error::Overflow("tau_eta: coefficient exceeded i128 (raise engine width)".into());

    let mut f = vec![0i128; len];
    for &(e, s) in &pent {
        f[e] = s as i128;
    }
    let mut g = vec![0i128; len];
    for _ in 1..24 {
        g.iter_mut().for_each(|c| *c = 0);
        for &(e, s) in &pent {
            let (dst, src) = (&mut g[e..], &f[..len - e]);
            if s > 0 {
                for i in 0..src.len() {
                    dst[i] = dst[i].checked_add(src[i]).ok_or_else(overflow)?;
                }
            } else {
                for i in 0..src.len() {
                    dst[i] = dst[i].checked_sub(src[i]).ok_or_else(overflow)?;
                }
            }
        }
        std::mem::swap(&mut f, &mut g);
    }

    let mut values = Vec::with_capacity(upper + 1);
    values.push(BigInt::zero());
    values.extend(f.iter().map(|&c| BigInt::from(c)));
    if values[1] != BigInt::one() {
        return Err(Error::Inconsistency("tau_eta: tau(1) != 1".into()));
    }
    Ok(TauSeries { engine: Engine::Eta, values })
}

// ---------------------------------------------------------------------------
// Eisenstein engine and the A/B split
// ---------------------------------------------------------------------------

fn require_exact(table: &SigmaTable, k: u32, upper: usize, who: &str) -> Result<()> {
    if !table.is_exact() {
        return Err(Error::Domain(format!("{who}: sigma_{k} table must be exact, not reduced")));
    }
    if table.k() != k {
        return Err(Error::Domain(format!("{who}: expected a sigma_{k} table, got sigma_{}", table.k())));
    }
    if table.upper() < upper {
        return Err(Error::Domain(format!(
            "{who}: sigma_{k} table reaches {} but {upper} is needed",
            table.upper()
        )));
    }
    Ok(())
}

/// sum_{j=1}^{n-1} sigma5(j) sigma5(n-j), folded over the j <-> n-j symmetry.
fn sigma5_self_convolution(n: usize, s5: &SigmaTable) -> BigUint {
    let mut acc = BigUint::zero();
    for j in 1..=(n - 1) / 2 {
        acc += s5.exact(j) * s5.exact(n - j);
    }
    acc *= 2u32;
    if n % 2 == 0 {
        let mid = s5.exact(n / 2);
        acc += mid * mid;
    }
    acc
}

/// tau(1..=upper) from the sigma expansion, in exact integer arithmetic:
/// computes 756 tau(n) and divides with a remainder assertion.
pub fn tau_eisenstein(upper: usize, s5: &SigmaTable, s11: &SigmaTable) -> Result<TauSeries> {
    if upper < 1 {
        return Err(Error::Domain("tau_eisenstein: upper bound must be >= 1".into()));
    }
    require_exact(s5, 5, upper, "tau_eisenstein")?;
    require_exact(s11, 11, upper, "tau_eisenstein")?;
    let p = BigInt::from(CONGRUENCE_PRIME);
    let conv_scale = &p * 252;
    let mut values = vec![BigInt::zero()];
    for n in 1..=upper {
        let conv = BigInt::from(sigma5_self_convolution(n, s5));
        let numer = BigInt::from(65) * BigInt::from(s11.exact(n).clone())
            + &p * BigInt::from(s5.exact(n).clone())
            - &conv_scale * conv;
        let (q, r) = numer.div_rem(&BigInt::from(756));
        if !r.is_zero() {
            return Err(Error::Inconsistency(format!(
                "tau_eisenstein: 756 does not divide the expansion at n = {n}"
            )));
        }
        values.push(q);
    }
    Ok(TauSeries { engine: Engine::Eisenstein, values })
}

/// The A/B split at n: A - B = 3 tau(n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ABPair {
    pub n: usize,
    pub a: BigInt,
    pub b: BigInt,
}

/// Exact A(n) and B(n) from sigma tables reaching n.
pub fn ab_pair(n: usize, s5: &SigmaTable, s11: &SigmaTable) -> Result<ABPair> {
    if n < 1 {
        return Err(Error::Domain("ab_pair: n must be >= 1".into()));
    }
    require_exact(s5, 5, n, "ab_pair")?;
    require_exact(s11, 11, n, "ab_pair")?;
    let p = BigInt::from(CONGRUENCE_PRIME);
    let numer = BigInt::from(65) * BigInt::from(s11.exact(n).clone())
        + &p * BigInt::from(s5.exact(n).clone());
    let (a, r) = numer.div_rem(&BigInt::from(252));
    if !r.is_zero() {
        return Err(Error::Inconsistency(format!("ab_pair: A({n}) is not an integer")));
    }
    let b = if n == 1 {
        BigInt::zero()
    } else {
        &p * BigInt::from(sigma5_self_convolution(n, s5))
    };
    Ok(ABPair { n, a, b })
}

/// Exact A(p^alpha) by the closed form over the prime power, no sieve needed.
pub fn a_closed_form(p: u64, alpha: u32) -> Result<BigUint> {
    if alpha < 1 {
        return Err(Error::Domain("a_closed_form: alpha must be >= 1".into()));
    }
    let pb = BigUint::from(p);
    let mut s11 = BigUint::zero();
    let mut s5 = BigUint::zero();
    for i in 0..=alpha {
        s11 += pb.pow(11 * i);
        s5 += pb.pow(5 * i);
    }
    let numer = s11 * 65u32 + s5 * CONGRUENCE_PRIME;
    let (q, r) = numer.div_rem(&BigUint::from(252u32));
    if !r.is_zero() {
        return Err(Error::Inconsistency(format!("A({p}^{alpha}) is not an integer")));
    }
    Ok(q)
}

/// A(p^alpha) mod m via modular evaluation of the closed form: the numerator
/// is reduced mod 252m, then divided exactly by 252. Needs 252*m to fit u64.
pub fn a_pow_mod(p: u64, alpha: u32, m: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::Domain("a_pow_mod: modulus must be >= 1".into()));
    }
    if alpha < 1 {
        return Err(Error::Domain("a_pow_mod: alpha must be >= 1".into()));
    }
    let wide = 252u128 * m as u128;
    if wide > u64::MAX as u128 {
        return Err(Error::Domain("a_pow_mod: modulus too large (252*m must fit u64)".into()));
    }
    let mm = wide as u64;
    let s11 = geometric_power_sum_mod(p, 11, alpha, mm);
    let s5 = geometric_power_sum_mod(p, 5, alpha, mm);
    let numer = (65u128 * s11 as u128 + CONGRUENCE_PRIME as u128 * s5 as u128) % mm as u128;
    if numer % 252 != 0 {
        return Err(Error::Inconsistency(format!(
            "a_pow_mod: numerator not divisible by 252 at p={p} alpha={alpha}"
        )));
    }
    Ok((numer / 252) as u64)
}

/// sum_{i=0}^{alpha} (p^k)^i mod m.
fn geometric_power_sum_mod(p: u64, k: u64, alpha: u32, m: u64) -> u64 {
    let t = crate::arith::mod_pow_u64(p % m.max(1), k, m);
    let mut acc = 0u64;
    let mut term = 1 % m;
    for _ in 0..=alpha {
        acc = ((acc as u128 + term as u128) % m as u128) as u64;
        term = crate::arith::mul_mod_u64(term, t, m);
    }
    acc
}

/// B(n) mod m from a sigma5 table reduced mod m reaching n-1, folding the
/// j <-> n-j symmetry to halve the convolution.
pub fn b_mod(n: u64, m: u64, s5mod: &SigmaTable) -> Result<u64> {
    if n < 1 {
        return Err(Error::Domain("b_mod: n must be >= 1".into()));
    }
    if s5mod.modulus() != Some(m) {
        return Err(Error::Domain(format!(
            "b_mod: sigma5 table modulus {:?} does not match m = {m}",
            s5mod.modulus()
        )));
    }
    if s5mod.k() != 5 {
        return Err(Error::Domain("b_mod: table is not a sigma_5 table".into()));
    }
    if n > 1 && (s5mod.upper() as u64) < n - 1 {
        return Err(Error::Domain(format!(
            "b_mod: table reaches {} but n-1 = {} is needed",
            s5mod.upper(),
            n - 1
        )));
    }
    let n_us = n as usize;
    let mut acc: u64 = 0;
    for j in 1..=(n_us - 1) / 2 {
        let prod = crate::arith::mul_mod_u64(s5mod.residue(j), s5mod.residue(n_us - j), m);
        acc = ((acc as u128 + prod as u128) % m as u128) as u64;
    }
    acc = crate::arith::mul_mod_u64(acc, 2 % m.max(1), m);
    if n_us % 2 == 0 && n_us > 1 {
        let mid = s5mod.residue(n_us / 2);
        let sq = crate::arith::mul_mod_u64(mid, mid, m);
        acc = ((acc as u128 + sq as u128) % m as u128) as u64;
    }
    Ok(crate::arith::mul_mod_u64(acc, CONGRUENCE_PRIME % m, m))
}

/// (A(p^alpha) mod m, B(p^alpha) mod m). The sigma5-mod-m table must reach
/// p^alpha - 1.
pub fn ab_mod(p: u64, alpha: u32, m: u64, s5mod: &SigmaTable) -> Result<(u64, u64)> {
    let n = checked_pow_u64(p, alpha).ok_or_else(|| {
        Error::Domain(format!("ab_mod: p^alpha = {p}^{alpha} exceeds u64"))
    })?;
    Ok((a_pow_mod(p, alpha, m)?, b_mod(n, m, s5mod)?))
}

/// p^alpha if it fits u64.
pub fn checked_pow_u64(p: u64, alpha: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..alpha {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

// ---------------------------------------------------------------------------
// Discriminant engine
// ---------------------------------------------------------------------------

fn dense_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn dense_square(a: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for i in 0..a.len().min(len) {
        if a[i].is_zero() {
            continue;
        }
        // diagonal
        if 2 * i < len {
            out[2 * i] += &a[i] * &a[i];
        }
        for j in (i + 1)..a.len().min(len - i) {
            if !a[j].is_zero() {
                out[i + j] += (&a[i] * &a[j]) * 2;
            }
        }
    }
    out
}

/// tau(1..=upper) from (E4^3 - E6^2)/1728.
pub fn tau_discriminant(upper: usize, s3: &SigmaTable, s5: &SigmaTable) -> Result<TauSeries> {
    if upper < 1 {
        return Err(Error::Domain("tau_discriminant: upper bound must be >= 1".into()));
    }
    require_exact(s3, 3, upper, "tau_discriminant")?;
    require_exact(s5, 5, upper, "tau_discriminant")?;
    let c4 = eisenstein_coefficient(4)?;
    let c6 = eisenstein_coefficient(6)?;
    let len = upper + 1;

    let mut e4 = Vec::with_capacity(len);
    let mut e6 = Vec::with_capacity(len);
    e4.push(BigInt::one());
    e6.push(BigInt::one());
    for n in 1..=upper {
        e4.push(&c4 * BigInt::from(s3.exact(n).clone()));
        e6.push(&c6 * BigInt::from(s5.exact(n).clone()));
    }

    let e4_sq = dense_square(&e4, len);
    let e4_cu = dense_mul(&e4_sq, &e4, len);
    let e6_sq = dense_square(&e6, len);

    let scale = BigInt::from(1728);
    let mut values = vec![BigInt::zero()];
    for n in 1..=upper {
        let numer = &e4_cu[n] - &e6_sq[n];
        let (q, r) = numer.div_rem(&scale);
        if !r.is_zero() {
            return Err(Error::Inconsistency(format!(
                "tau_discriminant: 1728 does not divide E4^3 - E6^2 at n = {n}"
            )));
        }
        values.push(q);
    }
    if !(&e4_cu[0] - &e6_sq[0]).is_zero() {
        return Err(Error::Inconsistency("tau_discriminant: constant term is nonzero".into()));
    }
    Ok(TauSeries { engine: Engine::Discriminant, values })
}
