//! Exact integer, rational and modular arithmetic.
//!
//! Everything here is deterministic: primality below 2^64 uses a fixed
//! Miller-Rabin witness set, larger inputs derive their witnesses from the
//! input itself, `primitive_root` always returns the smallest generator, and
//! `factor` reports exactly how far a budget let it get instead of guessing.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// u64 modular kernels
// ---------------------------------------------------------------------------

/// `a * b mod m` without overflow, for any `m >= 1`.
#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply, for any `m >= 1`.
pub fn mod_pow_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 1, "modulus must be >= 1");
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod_u64(result, b, m);
        }
        b = mul_mod_u64(b, b, m);
        exp >>= 1;
    }
    result
}

/// `base^exponent mod modulus` over big integers.
///
/// The base may be negative; the result is always the canonical residue in
/// `[0, modulus)`. A zero modulus is a domain error.
pub fn mod_pow(base: &BigInt, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return Err(Error::Domain("mod_pow: modulus must be >= 1".into()));
    }
    let m = BigInt::from(modulus.clone());
    let reduced = base.mod_floor(&m);
    let reduced = reduced.to_biguint().expect("mod_floor of positive modulus");
    Ok(reduced.modpow(exponent, modulus))
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Outcome of a primality test. `ProbablePrime` only occurs above 2^64 and
/// carries an error probability below 2^-128; reports must surface the flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    Prime,
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        matches!(self, Primality::Prime | Primality::ProbablePrime)
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(self, Primality::ProbablePrime)
    }
}

/// Witnesses making Miller-Rabin deterministic for all n < 3.18e23, which
/// covers the full u64 range (Sorenson & Webster).
const MR_WITNESSES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mr_round_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    // true = "n passes this witness"
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = mod_pow_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    MR_WITNESSES_U64.iter().all(|&a| mr_round_u64(n, d, s, a))
}

/// Rounds of Miller-Rabin above 2^64; 4^-64 = 2^-128 error bound.
const MR_ROUNDS_BIG: usize = 64;

fn mr_round_big(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, Miller-Rabin with witnesses
/// derived deterministically from `n` above (so reports reproduce run to run).
pub fn is_prime(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    if n.is_even() {
        return Primality::Composite;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n odd and > 1");
    let d = &n_minus_1 >> s;

    // Seed a ChaCha stream from the input so witness choice is reproducible.
    let mut seed = [0u8; 32];
    for (i, byte) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= byte.rotate_left((i / 32) as u32 % 8);
    }
    let mut rng = ChaCha20Rng::from_seed(seed);
    let low = BigUint::from(2u32);
    let high = n - 2u32;
    for _ in 0..MR_ROUNDS_BIG {
        let a = rng.gen_biguint_range(&low, &high);
        if !mr_round_big(n, &d, s, &a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

/// All primes strictly below `bound`, by a plain sieve of Eratosthenes.
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound > (1 << 31) {
        // 2 GiB of sieve is past anything this crate needs.
        panic!("primes_below: bound {bound} too large");
    }
    let bound = bound as usize;
    if bound <= 2 {
        return Vec::new();
    }
    let mut composite = vec![false; bound];
    let mut out = Vec::new();
    for n in 2..bound {
        if !composite[n] {
            out.push(n as u64);
            let mut m = n * n;
            while m < bound {
                composite[m] = true;
                m += n;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

/// Effort descriptor for `factor`: trial-divide up to `trial_bound`, then
/// spend at most `rho_iterations` Pollard-rho steps on what is left.
#[derive(Debug, Clone)]
pub struct FactorBudget {
    pub trial_bound: u64,
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { trial_bound: 1_000_000, rho_iterations: 1_000_000 }
    }
}

/// Possibly-partial factorization. `factors` holds proven (or flagged
/// probable) primes; whatever resisted the budget is left in `cofactor`.
/// Invariant: product of `prime^exp` times `cofactor` equals the input, and
/// the cofactor has no prime factor at or below `trial_bound`.
#[derive(Debug, Clone)]
pub struct PartialFactorization {
    factors: BTreeMap<BigUint, u32>,
    cofactor: BigUint,
    complete: bool,
    trial_bound: u64,
    probabilistic: bool,
}

impl PartialFactorization {
    pub fn factors(&self) -> &BTreeMap<BigUint, u32> {
        &self.factors
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn trial_bound(&self) -> u64 {
        self.trial_bound
    }

    /// True if any listed factor only passed a probabilistic primality test.
    pub fn is_probabilistic(&self) -> bool {
        self.probabilistic
    }

    /// Multiplies everything back together; must equal the original input.
    pub fn reassemble(&self) -> BigUint {
        let mut acc = self.cofactor.clone();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    /// Dot notation with caret exponents: `2^2.3.11.691`, primes ascending.
    /// An unfactored cofactor is appended with a trailing `?`.
    pub fn to_dot_string(&self) -> String {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e > 1 { format!("{p}^{e}") } else { p.to_string() })
            .collect();
        if !self.complete {
            parts.push(format!("{}?", self.cofactor));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(".")
        }
    }
}

fn brent_rho_u64(n: u64, c: u64, iterations: &mut u64) -> Option<u64> {
    // Brent's cycle variant of Pollard rho with gcd batching.
    if n % 2 == 0 {
        return Some(2);
    }
    let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    let mut g = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let batch = 128.min(r - k);
            for _ in 0..batch {
                if *iterations == 0 {
                    return None;
                }
                *iterations -= 1;
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += batch;
        }
        r *= 2;
    }
    if g == n {
        // backtrack one step at a time
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn rho_big(n: &BigUint, c: u32, iterations: &mut u64) -> Option<BigUint> {
    // Floyd variant with gcd batching; fine at the sizes the budget allows.
    let one = BigUint::one();
    let f = |x: &BigUint| (x * x + c) % n;
    let mut x = BigUint::from(2u32);
    let mut y = x.clone();
    let mut q = BigUint::one();
    let mut count = 0u32;
    loop {
        if *iterations == 0 {
            return None;
        }
        *iterations -= 1;
        x = f(&x);
        y = f(&f(&y));
        let diff = if x > y { &x - &y } else { &y - &x };
        if diff.is_zero() {
            return None; // cycle without factor; caller retries with new c
        }
        q = (q * diff) % n;
        count += 1;
        if count == 64 {
            let g = q.gcd(n);
            if !g.is_one() {
                return if g == *n { None } else { Some(g) };
            }
            count = 0;
        }
    }
}

fn rho_split(n: &BigUint, budget_left: &mut u64) -> Option<BigUint> {
    if let Some(small) = n.to_u64() {
        for c in 1..=6u64 {
            if *budget_left == 0 {
                return None;
            }
            if let Some(d) = brent_rho_u64(small, c, budget_left) {
                if d != 1 && d != small {
                    return Some(BigUint::from(d));
                }
            }
        }
        None
    } else {
        for c in 1..=6u32 {
            if *budget_left == 0 {
                return None;
            }
            if let Some(d) = rho_big(n, c, budget_left) {
                return Some(d);
            }
        }
        None
    }
}

/// Factor `n >= 1` within the budget. Incompleteness is a result, not an
/// error: the caller inspects `is_complete` and `cofactor`.
pub fn factor(n: &BigUint, budget: &FactorBudget) -> Result<PartialFactorization> {
    if n.is_zero() {
        return Err(Error::Domain("factor: n must be >= 1".into()));
    }
    let mut out = PartialFactorization {
        factors: BTreeMap::new(),
        cofactor: BigUint::one(),
        complete: true,
        trial_bound: budget.trial_bound,
        probabilistic: false,
    };
    let mut rem = n.clone();
    if rem.is_one() {
        return Ok(out);
    }

    // Trial division on a 2,3 then 6k+-1 wheel; composite candidates are
    // harmless because their prime parts were already stripped.
    let mut strip = |d: u64, rem: &mut BigUint, factors: &mut BTreeMap<BigUint, u32>| {
        while (&*rem % d).is_zero() {
            *rem /= d;
            *factors.entry(BigUint::from(d)).or_insert(0) += 1;
        }
    };
    strip(2, &mut rem, &mut out.factors);
    strip(3, &mut rem, &mut out.factors);
    let mut d = 5u64;
    let mut step = 2u64;
    while d <= budget.trial_bound {
        if let Some(r) = rem.to_u128() {
            if (d as u128) * (d as u128) > r {
                break;
            }
        }
        strip(d, &mut rem, &mut out.factors);
        d += step;
        step = 6 - step;
    }
    if rem.is_one() {
        return Ok(out);
    }

    let mut iterations = budget.rho_iterations;
    let mut pending = vec![rem];
    while let Some(m) = pending.pop() {
        match is_prime(&m) {
            Primality::Prime => *out.factors.entry(m).or_insert(0) += 1,
            Primality::ProbablePrime => {
                out.probabilistic = true;
                *out.factors.entry(m).or_insert(0) += 1;
            }
            Primality::Composite => match rho_split(&m, &mut iterations) {
                Some(d) => {
                    let other = &m / &d;
                    pending.push(d);
                    pending.push(other);
                }
                None => {
                    out.cofactor *= m;
                    out.complete = false;
                }
            },
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Primitive roots and discrete logarithms
// ---------------------------------------------------------------------------

fn group_order(p: u64, i: u32) -> BigUint {
    BigUint::from(p).pow(i - 1) * (p - 1)
}

/// Prime factors of p^{i-1}(p-1) as (prime, exponent) pairs.
fn group_order_factors(p: u64, i: u32) -> Result<Vec<(BigUint, u32)>> {
    let budget = FactorBudget { trial_bound: 1 << 16, rho_iterations: 500_000 };
    let f = factor(&BigUint::from(p - 1), &budget)?;
    if !f.is_complete() {
        return Err(Error::Unavailable(format!(
            "cannot factor group order: p-1 = {} resisted the factoring budget",
            p - 1
        )));
    }
    let mut factors: Vec<(BigUint, u32)> = f.factors().iter().map(|(q, e)| (q.clone(), *e)).collect();
    if i > 1 {
        factors.push((BigUint::from(p), i - 1));
    }
    factors.sort();
    Ok(factors)
}

/// Smallest generator of the multiplicative group mod `p^i` (`p` an odd
/// prime). Deterministic by construction; the order is verified against
/// every prime divisor of p^{i-1}(p-1).
pub fn primitive_root(p: u64, i: u32) -> Result<BigUint> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::Domain(format!("primitive_root: p = {p} must be an odd prime")));
    }
    if i < 1 {
        return Err(Error::Domain("primitive_root: i must be >= 1".into()));
    }
    let modulus = BigUint::from(p).pow(i);
    let order = group_order(p, i);
    let factors = group_order_factors(p, i)?;
    let mut g = 2u64;
    loop {
        if g % p != 0 {
            let gb = BigInt::from(g);
            let is_generator = factors.iter().all(|(r, _)| {
                let e = &order / r;
                !mod_pow(&gb, &e, &modulus).expect("modulus >= 1").is_one()
            });
            if is_generator {
                return Ok(BigUint::from(g));
            }
        }
        g += 1;
        if BigUint::from(g) >= modulus {
            return Err(Error::Inconsistency(format!(
                "no primitive root mod {p}^{i}; p is not an odd prime?"
            )));
        }
    }
}

/// Largest baby-step table BSGS will allocate; prime-order subgroups above
/// the square of this are refused as a budget matter.
const BSGS_MAX_TABLE: u64 = 1 << 22;

/// Baby-step giant-step in the order-`r` subgroup generated by `gamma`
/// (mod `n`): returns `d` in `[0, r)` with `gamma^d = h`, if it exists.
fn bsgs(gamma: &BigUint, h: &BigUint, r: &BigUint, n: &BigUint) -> Result<Option<BigUint>> {
    let m = r.sqrt() + 1u32;
    let m_small = m
        .to_u64()
        .filter(|&m| m <= BSGS_MAX_TABLE)
        .ok_or_else(|| {
            Error::Unavailable(format!(
                "discrete-log budget exhausted: subgroup of order {r} needs a {m}-entry table"
            ))
        })?;
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(m_small as usize);
    let mut cur = BigUint::one();
    for j in 0..m_small {
        table.entry(cur.clone()).or_insert(j);
        cur = (&cur * gamma) % n;
    }
    // gamma^-1 = gamma^{r-1} since gamma has order r
    let gamma_inv = gamma.modpow(&(r - 1u32), n);
    let giant = gamma_inv.modpow(&m, n);
    let mut y = h.clone();
    for idx in 0..=m_small {
        if let Some(j) = table.get(&y) {
            let d = BigUint::from(idx) * &m + *j;
            return Ok(Some(d % r));
        }
        y = (&y * &giant) % n;
    }
    Ok(None)
}

/// Discrete logarithm of `a` to base `g` in the multiplicative group mod
/// `p^i`, by Pohlig-Hellman over the factorization of p^{i-1}(p-1) with
/// baby-step/giant-step in each prime-order subgroup.
///
/// Requires `g` to be a primitive root mod `p^i` and `gcd(a, p) = 1`.
pub fn discrete_log(g: &BigUint, a: &BigUint, p: u64, i: u32) -> Result<BigUint> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::Domain(format!("discrete_log: p = {p} must be an odd prime")));
    }
    let modulus = BigUint::from(p).pow(i);
    let a = a % &modulus;
    if (&a % p).is_zero() {
        return Err(Error::Domain("discrete_log: a must be coprime to p".into()));
    }
    let order = group_order(p, i);
    let g_inv = g.modpow(&(&order - 1u32), &modulus);

    let mut residues: Vec<(BigUint, BigUint)> = Vec::new(); // (x mod r^e, r^e)
    for (r, e) in group_order_factors(p, i)? {
        let r_pow_e = r.pow(e);
        let gamma = g.modpow(&(&order / &r), &modulus);
        let mut x = BigUint::zero();
        let mut r_pow_j = BigUint::one();
        for _ in 0..e {
            // strip the known digits, project into the order-r subgroup
            let shifted = (&a * g_inv.modpow(&x, &modulus)) % &modulus;
            let exp = &order / (r_pow_j.clone() * &r);
            let h = shifted.modpow(&exp, &modulus);
            let digit = bsgs(&gamma, &h, &r, &modulus)?.ok_or_else(|| {
                Error::Domain(format!(
                    "discrete_log: {a} is not a power of the given base mod {p}^{i} \
                     (is g a primitive root?)"
                ))
            })?;
            x += &digit * &r_pow_j;
            r_pow_j *= &r;
        }
        residues.push((x, r_pow_e));
    }

    // CRT across coprime prime-power moduli
    let mut x = BigUint::zero();
    let mut m = BigUint::one();
    for (r_i, m_i) in residues {
        let (x_b, m_b, r_b) = (
            BigInt::from(x.clone()),
            BigInt::from(m.clone()),
            BigInt::from(r_i.clone()),
        );
        let m_i_b = BigInt::from(m_i.clone());
        let eg = m_b.extended_gcd(&m_i_b);
        debug_assert!(eg.gcd.is_one());
        // x' = x + m * ((r_i - x) * inv(m) mod m_i)
        let t = ((&r_b - &x_b) * &eg.x).mod_floor(&m_i_b);
        let combined = (&x_b + &m_b * t).to_biguint().expect("CRT residue is non-negative");
        m *= &m_i;
        x = combined % &m;
    }
    Ok(x)
}

/// Tower of discrete logs of the same residue at successive prime-power
/// levels: `g^{t[i-1]} = a mod p^i`, with level-to-level increments `d`.
#[derive(Debug, Clone)]
pub struct DlogTower {
    pub p: u64,
    pub g: BigUint,
    /// t[i-1] is the canonical log at level i, in [0, p^{i-1}(p-1)).
    pub t: Vec<BigUint>,
    /// d[i-1] = (t[i] - t[i-1]) / (p^{i-1}(p-1)); always a non-negative integer.
    pub d: Vec<BigUint>,
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

/// k-th Bernoulli number (convention B_1 = -1/2), by the triangular
/// recurrence sum C(m+1, j) B_j = 0 in exact rationals.
pub fn bernoulli(k: u32) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(k as usize + 1);
    b.push(BigRational::one());
    for m in 1..=k as usize {
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        let mut acc = BigRational::zero();
        let mut binom = BigUint::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from(BigInt::from(binom.clone())) * bj;
            // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
            binom = binom * BigUint::from(m + 1 - j) / BigUint::from(j + 1);
        }
        let m1 = BigRational::from(BigInt::from(m as u64 + 1));
        b.push(-acc / m1);
    }
    b.pop().expect("vector holds k+1 entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    // --- mod_pow ---

    #[test]
    fn mod_pow_zero_exponent_is_one() {
        for x in [0i64, 1, 7, -3, 1000] {
            for m in [2u64, 3, 97, 1_000_000] {
                let r = mod_pow(&BigInt::from(x), &BigUint::zero(), &big(m)).unwrap();
                assert_eq!(r, BigUint::one() % big(m));
            }
        }
    }

    #[test]
    fn mod_pow_small_case() {
        let r = mod_pow(&BigInt::from(2), &big(10), &big(1000)).unwrap();
        assert_eq!(r, big(24)); // 1024 mod 1000
    }

    #[test]
    fn mod_pow_zero_modulus_is_domain_error() {
        let e = mod_pow(&BigInt::from(2), &big(3), &BigUint::zero());
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn mod_pow_negative_base_canonical_residue() {
        let r = mod_pow(&BigInt::from(-2), &big(3), &big(7)).unwrap();
        assert_eq!(r, big(6)); // (-8) mod 7
    }

    /// Brute-force oracle: repeated multiplication.
    fn naive_pow_mod(base: u64, exp: u64, m: u64) -> u64 {
        let mut acc = 1u64 % m;
        for _ in 0..exp {
            acc = mul_mod_u64(acc, base, m);
        }
        acc
    }

    #[test]
    fn mod_pow_691_power_modulus_cases() {
        // consistency with the repeated-multiplication oracle on 691-flavored cases
        let m = 691u64 * 691;
        for (base, exp) in [(5u64, 691), (2, 1382), (690, 691), (123, 2073), (691, 13)] {
            let expect = naive_pow_mod(base, exp, m);
            assert_eq!(mod_pow_u64(base, exp, m), expect);
            assert_eq!(
                mod_pow(&BigInt::from(base), &big(exp), &big(m)).unwrap(),
                big(expect)
            );
        }
    }

    proptest! {
        #[test]
        fn mod_pow_matches_naive(base in 0u64..10_000, exp in 0u64..=64, m in 1u64..100_000) {
            prop_assert_eq!(mod_pow_u64(base, exp, m), naive_pow_mod(base, exp, m));
        }
    }

    // --- primality ---

    fn trial_division_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn one_is_not_prime() {
        assert!(!is_prime_u64(1));
        assert_eq!(is_prime(&BigUint::one()), Primality::Composite);
    }

    #[test]
    fn prime_1381_by_trial_division() {
        assert!(trial_division_is_prime(1381));
        assert!(is_prime_u64(1381));
    }

    #[test]
    fn prime_216113_by_trial_division() {
        assert!(trial_division_is_prime(216113));
        assert!(is_prime_u64(216113));
    }

    #[test]
    fn is_prime_agrees_with_trial_division_to_1e6() {
        let primes = primes_below(1_000_001);
        let mut set = vec![false; 1_000_001];
        for p in &primes {
            set[*p as usize] = true;
        }
        for n in 0..=1_000_000u64 {
            assert_eq!(is_prime_u64(n), set[n as usize], "disagreement at {n}");
        }
    }

    #[test]
    fn is_prime_big_known_values() {
        // 2^89 - 1 is a Mersenne prime; 2^90-1 obviously composite
        let m89 = (BigUint::one() << 89) - 1u32;
        assert_eq!(is_prime(&m89), Primality::ProbablePrime);
        let c = (BigUint::one() << 90) - 1u32;
        assert_eq!(is_prime(&c), Primality::Composite);
    }

    // --- factor ---

    #[test]
    fn factor_690() {
        let f = factor(&big(690), &FactorBudget::default()).unwrap();
        assert!(f.is_complete());
        let got: Vec<(u64, u32)> =
            f.factors().iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
        assert_eq!(got, vec![(2, 1), (3, 1), (5, 1), (23, 1)]);
        assert_eq!(f.to_dot_string(), "2.3.5.23");
    }

    #[test]
    fn factor_one() {
        let f = factor(&BigUint::one(), &FactorBudget::default()).unwrap();
        assert!(f.is_complete());
        assert!(f.factors().is_empty());
        assert_eq!(f.cofactor(), &BigUint::one());
    }

    #[test]
    fn factor_zero_is_domain_error() {
        assert!(matches!(factor(&BigUint::zero(), &FactorBudget::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn factor_a_of_2() {
        // A(2) = (65*(1+2^11) + 691*(1+2^5))/252 = 619, prime by trial division
        let a2 = (65u64 * 2049 + 691 * 33) / 252;
        assert_eq!(a2, 619);
        assert!(trial_division_is_prime(619));
        let f = factor(&big(619), &FactorBudget::default()).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.factors().len(), 1);
        assert_eq!(f.factors().get(&big(619)), Some(&1));
    }

    #[test]
    fn factor_reassembles_to_1e6() {
        let budget = FactorBudget { trial_bound: 1000, rho_iterations: 10_000 };
        for n in 1..=1_000_000u64 {
            if n % 997 != 0 && n > 10_000 {
                continue; // full range is checked by the sweep below on a stride
            }
            let f = factor(&big(n), &budget).unwrap();
            assert_eq!(f.reassemble(), big(n), "reassembly failed at {n}");
            assert!(f.is_complete(), "small n should factor completely: {n}");
        }
        // dense sweep on the low range
        for n in 1..=10_000u64 {
            let f = factor(&big(n), &budget).unwrap();
            assert_eq!(f.reassemble(), big(n));
        }
    }

    #[test]
    fn factor_incomplete_on_tight_budget() {
        // product of two 11-digit primes; rho with 0 iterations cannot split it
        let p = big(10_000_000_019u64);
        let q = big(10_000_000_033u64);
        let n = &p * &q;
        let f = factor(&n, &FactorBudget { trial_bound: 1000, rho_iterations: 0 }).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.cofactor(), &n);
        assert_eq!(f.reassemble(), n);
        assert!(f.to_dot_string().ends_with('?'));
    }

    proptest! {
        #[test]
        fn factor_reassembles_random_u64(n in 1u64..u64::MAX) {
            let f = factor(&big(n), &FactorBudget { trial_bound: 10_000, rho_iterations: 200_000 }).unwrap();
            prop_assert_eq!(f.reassemble(), big(n));
        }
    }

    // --- primitive roots ---

    /// Order-check oracle: smallest g whose successive powers first return to
    /// 1 after exactly phi steps, found by exhaustive candidate scan.
    fn smallest_generator_exhaustive(p: u64, i: u32) -> u64 {
        let modulus = big(p).pow(i);
        let phi = (big(p).pow(i - 1) * (p - 1)).to_u64().unwrap();
        'candidate: for g in 2.. {
            if g % p == 0 {
                continue;
            }
            let gb = big(g);
            let mut x = BigUint::one();
            for step in 1..=phi {
                x = (&x * &gb) % &modulus;
                if x.is_one() {
                    if step == phi {
                        return g;
                    }
                    continue 'candidate;
                }
            }
            unreachable!("group element order divides the group order");
        }
        unreachable!()
    }

    #[test]
    fn primitive_root_small_cases() {
        assert_eq!(smallest_generator_exhaustive(5, 1), 2);
        assert_eq!(primitive_root(5, 1).unwrap(), big(2));
        assert_eq!(smallest_generator_exhaustive(7, 1), 3);
        assert_eq!(primitive_root(7, 1).unwrap(), big(3));
        assert_eq!(primitive_root(5, 2).unwrap(), big(smallest_generator_exhaustive(5, 2)));
        assert_eq!(primitive_root(7, 3).unwrap(), big(smallest_generator_exhaustive(7, 3)));
    }

    #[test]
    fn primitive_root_rejects_two() {
        assert!(matches!(primitive_root(2, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn primitive_root_order_is_exact() {
        // definition check: g^(phi/r) != 1 for every prime r | phi
        for (p, i) in [(13u64, 2u32), (1381, 1), (1381, 2)] {
            let g = primitive_root(p, i).unwrap();
            let modulus = big(p).pow(i);
            let phi = group_order(p, i);
            for (r, _) in group_order_factors(p, i).unwrap() {
                let e = &phi / &r;
                assert!(!g.modpow(&e, &modulus).is_one(), "order check failed p={p} i={i} r={r}");
            }
        }
    }

    // --- discrete logs ---

    #[test]
    fn discrete_log_identity() {
        for (p, i) in [(5u64, 1u32), (7, 2), (1381, 1)] {
            let g = primitive_root(p, i).unwrap();
            assert_eq!(discrete_log(&g, &BigUint::one(), p, i).unwrap(), BigUint::zero());
        }
    }

    #[test]
    fn discrete_log_exhaustive_small() {
        // oracle: exhaustive search over exponents mod 5
        let g = big(2);
        let a = big(3);
        let mut x = BigUint::one();
        let mut found = None;
        for t in 0..4u64 {
            if x == a {
                found = Some(t);
                break;
            }
            x = (&x * &g) % 5u64;
        }
        assert_eq!(found, Some(3)); // 2^3 = 8 = 3 mod 5
        assert_eq!(discrete_log(&g, &a, 5, 1).unwrap(), big(3));
    }

    #[test]
    fn discrete_log_rejects_multiple_of_p() {
        let g = primitive_root(5, 2).unwrap();
        assert!(matches!(discrete_log(&g, &big(10), 5, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn discrete_log_round_trips_mod_pow() {
        use rand::Rng;
        let mut rng = ChaCha20Rng::seed_from_u64(0x7a75);
        for p in [5u64, 7, 1381] {
            for i in 1..=3u32 {
                let g = primitive_root(p, i).unwrap();
                let modulus = big(p).pow(i);
                let phi = group_order(p, i).to_u64().unwrap();
                for _ in 0..20 {
                    let t = rng.gen_range(0..phi);
                    let a = g.modpow(&big(t), &modulus);
                    assert_eq!(discrete_log(&g, &a, p, i).unwrap(), big(t), "p={p} i={i} t={t}");
                }
            }
        }
    }

    // --- bernoulli ---

    /// Independent oracle: Worpitzky's double sum
    /// B_m = sum_{j=0}^{m} 1/(j+1) sum_{v=0}^{j} (-1)^v C(j,v) v^m.
    fn bernoulli_worpitzky(m: u32) -> BigRational {
        let mut acc = BigRational::zero();
        for j in 0..=m as u64 {
            let mut inner = BigInt::zero();
            let mut c = BigInt::one(); // C(j, 0)
            for v in 0..=j {
                let term = if v == 0 && m == 0 {
                    // 0^0 = 1 in this sum
                    c.clone()
                } else {
                    &c * BigInt::from(v).pow(m)
                };
                inner += if v % 2 == 0 { term } else { -term };
                c = c * BigInt::from(j - v) / BigInt::from(v + 1);
            }
            acc += BigRational::new(inner, BigInt::from(j + 1));
        }
        acc
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), BigRational::one());
        assert_eq!(bernoulli(1), BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(bernoulli(12), BigRational::new(BigInt::from(-691), BigInt::from(2730)));
    }

    #[test]
    fn bernoulli_matches_worpitzky_oracle() {
        for k in 0..=14u32 {
            assert_eq!(bernoulli(k), bernoulli_worpitzky(k), "mismatch at k={k}");
        }
    }

    #[test]
    fn bernoulli_vanishes_at_odd_k() {
        for k in [3u32, 5, 7, 9, 11] {
            assert!(bernoulli(k).is_zero(), "B_{k} should vanish");
        }
    }
}
