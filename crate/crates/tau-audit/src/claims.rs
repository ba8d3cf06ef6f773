//! Auditors for the prime-indexed claims: the mod-691 equivalence, base-p
//! digit structure of A(p^alpha), the discrete-log tower, existence of large
//! prime factors, and mod-691 periodicity over prime powers.
//!
//! Auditors evaluate both sides of every claim independently and report.
//! A claim that fails empirically yields `Verdict::Fails` with a concrete
//! witness; nothing here assumes the literature is right.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{
    discrete_log, factor, is_prime_u64, mod_pow, primes_below, primitive_root, DlogTower,
    FactorBudget,
};
use crate::error::{Error, Result};
use crate::report::{ClaimId, ClaimReport, Verdict};
use crate::tau::{a_closed_form, a_pow_mod, checked_pow_u64, CONGRUENCE_PRIME};

// ---------------------------------------------------------------------------
// Lemma 1: A(p) = 0 mod 691  <=>  p = -1 mod 691
// ---------------------------------------------------------------------------

/// Audit the equivalence at a single prime. The two sides run on disjoint
/// code paths: the left via modular evaluation of the closed form, the
/// right via the integer residue of p.
pub fn lemma1_check(p: u64) -> Result<ClaimReport> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("lemma1_check: {p} is not prime")));
    }
    let left = a_pow_mod(p, 1, CONGRUENCE_PRIME)? == 0;
    let right = p % CONGRUENCE_PRIME == CONGRUENCE_PRIME - 1;
    let verdict = if left == right { Verdict::Holds } else { Verdict::Fails };
    Ok(ClaimReport::new(ClaimId::Lemma1, verdict)
        .input("p", p)
        .witness("a_divisible_by_691", left)
        .witness("p_congruent_minus_one", right))
}

/// Scan the equivalence over every prime up to `max`, aggregating into one
/// report. Counterexamples, if any ever appear, are listed in the witness.
pub fn lemma1_scan(max: u64) -> Result<ClaimReport> {
    let mut checked = 0u64;
    let mut counterexamples: Vec<u64> = Vec::new();
    for p in primes_below(max + 1) {
        let left = a_pow_mod(p, 1, CONGRUENCE_PRIME)? == 0;
        let right = p % CONGRUENCE_PRIME == CONGRUENCE_PRIME - 1;
        if left != right {
            counterexamples.push(p);
        }
        checked += 1;
    }
    let verdict = if counterexamples.is_empty() { Verdict::Holds } else { Verdict::Fails };
    let mut report = ClaimReport::new(ClaimId::Lemma1, verdict)
        .input("max", max)
        .witness("primes_checked", checked);
    if !counterexamples.is_empty() {
        let list: Vec<String> = counterexamples.iter().take(16).map(u64::to_string).collect();
        report = report.witness("counterexamples", list.join(" "));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Digit structure of A(p^alpha)
// ---------------------------------------------------------------------------

/// Base-p digit expansion of A(p^alpha), least significant digit first.
#[derive(Debug, Clone)]
pub struct DigitProfile {
    pub p: u64,
    pub alpha: u32,
    pub digits: Vec<u64>,
}

impl DigitProfile {
    /// Reassemble sum digits[i] * p^i; must equal A(p^alpha).
    pub fn reassemble(&self) -> BigUint {
        let p = BigUint::from(self.p);
        let mut acc = BigUint::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &p + *d;
        }
        acc
    }
}

/// Audit the base-p digit structure of A(p^alpha):
///
/// * `DIGITS_EQ12` - the low digits are (3, 0, 0, 0, 0), i.e.
///   A(p^alpha) = 3 mod p^5;
/// * `DIGITS_BOUND` - p^{11 alpha - 1} < A(p^alpha) < p^{11 alpha}, i.e. the
///   expansion has exactly 11 alpha digits;
/// * `DIGITS_EQ15` - the claim that digits 1..4 are all nonzero is derived
///   under a hypothesis the profile itself refutes, so it is reported as
///   not directly testable (the unconditional structure above is what runs).
pub fn digit_profile(p: u64, alpha: u32) -> Result<(DigitProfile, Vec<ClaimReport>)> {
    if p <= 3 {
        return Err(Error::Domain(format!(
            "digit_profile: p = {p} must exceed 3 so digit 3 is a valid base-p digit"
        )));
    }
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("digit_profile: {p} is not prime")));
    }
    if alpha < 1 {
        return Err(Error::Domain("digit_profile: alpha must be >= 1".into()));
    }
    let a = a_closed_form(p, alpha)?;

    let mut digits = Vec::new();
    let mut rest = a.clone();
    let pb = BigUint::from(p);
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&pb);
        digits.push(r.to_u64().expect("digit fits u64"));
        rest = q;
    }
    let profile = DigitProfile { p, alpha, digits };

    let low_ok = {
        let head: Vec<u64> =
            (0..5).map(|i| profile.digits.get(i).copied().unwrap_or(0)).collect();
        head == [3, 0, 0, 0, 0]
    };
    let residue = &a % pb.pow(5);
    let eq12 = ClaimReport::new(
        ClaimId::DigitsEq12,
        if low_ok { Verdict::Holds } else { Verdict::Fails },
    )
    .input("p", p)
    .input("alpha", alpha)
    .witness("a_mod_p5", &residue)
    .witness("low_digits", format!("{:?}", &profile.digits[..5.min(profile.digits.len())]));

    let lower = pb.pow(11 * alpha - 1);
    let upper = pb.pow(11 * alpha);
    let bracket_ok = a > lower && a < upper;
    let bound = ClaimReport::new(
        ClaimId::DigitsBound,
        if bracket_ok { Verdict::Holds } else { Verdict::Fails },
    )
    .input("p", p)
    .input("alpha", alpha)
    .witness("digit_count", profile.digits.len())
    .witness("expected_digit_count", 11 * alpha);

    let eq15 = ClaimReport::new(ClaimId::DigitsEq15, Verdict::NotDirectlyTestable)
        .input("p", p)
        .input("alpha", alpha)
        .witness(
            "note",
            "derived under the hypothesis that A(p) has no prime factor above p, \
             which the unconditional digit structure contradicts",
        );

    Ok((profile, vec![eq12, bound, eq15]))
}

// ---------------------------------------------------------------------------
// Discrete-log tower
// ---------------------------------------------------------------------------

/// A computed tower plus the claim reports attached to it.
#[derive(Debug, Clone)]
pub struct DlogAudit {
    pub tower: DlogTower,
    pub reports: Vec<ClaimReport>,
}

/// Default cap: levels stop once p^i crosses 2^63 unless the caller opts
/// into big moduli.
fn tower_height(p: u64, big_modulus: bool) -> u32 {
    if big_modulus {
        return 5;
    }
    let mut h = 0u32;
    let mut acc: u128 = 1;
    let limit: u128 = 1 << 63;
    for _ in 0..5 {
        acc *= p as u128;
        if acc >= limit {
            break;
        }
        h += 1;
    }
    h.max(1)
}

/// Compute T_i = dlog_g(A(p) mod p^i) for i = 1..=height with one canonical
/// generator g (the smallest primitive root mod p^2, which generates every
/// level), then audit the tower:
///
/// * `DLOG_EQ19` - g^{T_i} = A(p) mod p^i (re-verified by modular powering);
/// * `DLOG_EQ20` - T_{i+1} = T_i mod p^{i-1}(p-1), with the increments d_i;
/// * `DLOG_EQ21` - every d_i >= 1 (reported, never assumed);
/// * `DLOG_EQ22` - strict growth T_1 < ... < T_height.
pub fn dlog_tower_audit(p: u64, big_modulus: bool) -> Result<DlogAudit> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::Domain(format!("dlog_tower_audit: p = {p} must be an odd prime")));
    }
    let a = a_closed_form(p, 1)?;
    if (&a % p).is_zero() {
        return Err(Error::Domain(format!("dlog_tower_audit: p = {p} divides A(p)")));
    }
    let height = tower_height(p, big_modulus);
    let g = if height >= 2 { primitive_root(p, 2)? } else { primitive_root(p, 1)? };

    let mut t: Vec<BigUint> = Vec::with_capacity(height as usize);
    for i in 1..=height {
        let modulus = BigUint::from(p).pow(i);
        let target = &a % &modulus;
        t.push(discrete_log(&g, &target, p, i)?);
    }

    // EQ19: defining property, re-verified through mod_pow rather than
    // trusting the solver.
    let g_int = num_bigint::BigInt::from(g.clone());
    let mut eq19_ok = true;
    for (idx, ti) in t.iter().enumerate() {
        let modulus = BigUint::from(p).pow(idx as u32 + 1);
        let lhs = mod_pow(&g_int, ti, &modulus)?;
        if lhs != &a % &modulus {
            eq19_ok = false;
        }
    }

    // EQ20 + increments
    let mut d: Vec<BigUint> = Vec::new();
    let mut eq20_ok = true;
    for i in 1..height as usize {
        let period = BigUint::from(p).pow(i as u32 - 1) * (p - 1);
        if (&t[i] % &period) != (&t[i - 1] % &period) {
            eq20_ok = false;
            d.push(BigUint::zero());
        } else {
            let diff = &t[i] - &t[i - 1]; // t is non-decreasing when EQ20 holds
            d.push(diff / &period);
        }
    }

    let eq21_ok = d.iter().all(|di| !di.is_zero());
    let eq22_ok = t.windows(2).all(|w| w[0] < w[1]);

    let base = |claim: ClaimId, ok: bool| {
        ClaimReport::new(claim, if ok { Verdict::Holds } else { Verdict::Fails })
            .input("p", p)
            .input("height", height)
            .witness("g", &g)
            .witness("t", join_bigs(&t))
    };
    let reports = vec![
        base(ClaimId::DlogEq19, eq19_ok),
        base(ClaimId::DlogEq20, eq20_ok),
        base(ClaimId::DlogEq21, eq21_ok).witness("d", join_bigs(&d)),
        base(ClaimId::DlogEq22, eq22_ok),
    ];
    Ok(DlogAudit { tower: DlogTower { p, g, t, d }, reports })
}

fn join_bigs(v: &[BigUint]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Audit primes for the default tower scan: every prime p = -1 mod 691 up
/// to `max`.
pub fn dlog_audit_primes(max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut v = CONGRUENCE_PRIME - 1;
    while v <= max {
        if is_prime_u64(v) {
            out.push(v);
        }
        v += CONGRUENCE_PRIME;
    }
    out
}

// ---------------------------------------------------------------------------
// Large prime factors (the Lemma 2 / Lemma 8 search)
// ---------------------------------------------------------------------------

/// Look for a prime factor of A(p^alpha) exceeding p^alpha.
///
/// Certification rule: `holds` needs either a proven prime witness above
/// p^alpha, or a leftover cofactor above p^alpha whose prime factors all
/// provably exceed p^alpha (trial bound at least p^alpha). Anything less is
/// `undetermined`, never a guess. Witness divisibility is re-verified
/// through the modular closed form, a separate code path from the
/// factorizer.
pub fn find_factor_above(p: u64, alpha: u32, budget: &FactorBudget) -> Result<ClaimReport> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("find_factor_above: {p} is not prime")));
    }
    let claim = if alpha <= 1 { ClaimId::Lemma2 } else { ClaimId::Lemma8 };
    let a = a_closed_form(p, alpha)?;
    let threshold = BigUint::from(p).pow(alpha);
    let f = factor(&a, budget)?;

    let mut report = ClaimReport::new(claim, Verdict::Undetermined)
        .input("p", p)
        .input("alpha", alpha)
        .input("trial_bound", budget.trial_bound)
        .input("rho_iterations", budget.rho_iterations);

    if let Some((q, e)) = f.factors().iter().find(|(q, _)| **q > threshold) {
        // independent divisibility re-check via the modular closed form
        let verified = match q.to_u64() {
            Some(q64) if 252u128 * q64 as u128 <= u64::MAX as u128 => {
                a_pow_mod(p, alpha, q64)? == 0
            }
            _ => (&a % q).is_zero(),
        };
        if !verified {
            return Err(Error::Inconsistency(format!(
                "find_factor_above: witness {q} does not divide A({p}^{alpha}) on re-check"
            )));
        }
        report.verdict = Verdict::Holds;
        report = report
            .witness("witness_prime", q)
            .witness("exponent", e)
            .witness("proof", if f.is_probabilistic() { "probabilistic" } else { "deterministic" });
        return Ok(report);
    }

    if !f.is_complete() && f.cofactor() > &threshold {
        if BigUint::from(f.trial_bound()) >= threshold {
            // every prime factor of the cofactor exceeds the trial bound,
            // hence exceeds p^alpha: existence is certified
            report.verdict = Verdict::Holds;
            report = report
                .witness("cofactor_above_threshold", f.cofactor())
                .witness("certified_by", "trial bound at or above p^alpha");
        } else {
            report = report
                .witness("unresolved_cofactor", f.cofactor())
                .witness("note", "budget exhausted before the cofactor was resolved");
        }
        return Ok(report);
    }

    if f.is_complete() {
        // fully factored with no factor above the threshold: a concrete
        // counterexample
        report.verdict = Verdict::Fails;
        report = report.witness("factorization", f.to_dot_string());
        return Ok(report);
    }

    report = report
        .witness("unresolved_cofactor", f.cofactor())
        .witness("note", "no witness found within budget");
    Ok(report)
}

// ---------------------------------------------------------------------------
// Periodicity mod 691 over prime powers
// ---------------------------------------------------------------------------

/// Given 691 | A(p^alpha), verify A(p^{alpha + k(alpha+1)}) = 0 mod 691 for
/// k = 0..=k_max, and independently audit the divisibility-pattern
/// equivalence against p^{alpha+1} = 1 mod 691 with gcd(p-1, 691) = 1.
pub fn periodicity_audit(p: u64, alpha: u32, k_max: u32) -> Result<Vec<ClaimReport>> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("periodicity_audit: {p} is not prime")));
    }
    if a_pow_mod(p, alpha, CONGRUENCE_PRIME)? != 0 {
        return Err(Error::Domain(format!(
            "periodicity_audit: precondition violated: A({p}^{alpha}) is not 0 mod {CONGRUENCE_PRIME}"
        )));
    }

    let mut bad_exponent = None;
    for k in 0..=k_max {
        let exponent = alpha + k * (alpha + 1);
        if a_pow_mod(p, exponent, CONGRUENCE_PRIME)? != 0 {
            bad_exponent = Some(exponent);
            break;
        }
    }
    let mut main = ClaimReport::new(
        ClaimId::Periodicity,
        if bad_exponent.is_none() { Verdict::Holds } else { Verdict::Fails },
    )
    .input("p", p)
    .input("alpha", alpha)
    .input("k_max", k_max)
    .witness("period", alpha + 1);
    if let Some(e) = bad_exponent {
        main = main.witness("failing_exponent", e);
    }

    // Equivalence audit: both sides computed independently.
    let left = true; // A(p^alpha) = 0 mod 691 by the precondition above
    let pow_ok =
        crate::arith::mod_pow_u64(p % CONGRUENCE_PRIME, alpha as u64 + 1, CONGRUENCE_PRIME) == 1;
    // 691 is prime, so gcd(p-1, 691) = 1 exactly when p is not 1 mod 691
    let coprime_ok = p % CONGRUENCE_PRIME != 1;
    let right = pow_ok && coprime_ok;
    let eq66 = ClaimReport::new(
        ClaimId::PeriodicityEq66,
        if left == right { Verdict::Holds } else { Verdict::Fails },
    )
    .input("p", p)
    .input("alpha", alpha)
    .witness("p_pow_alpha_plus_1_is_1", pow_ok)
    .witness("p_minus_1_coprime_691", coprime_ok);

    Ok(vec![main, eq66])
}

// ---------------------------------------------------------------------------
// Gap set
// ---------------------------------------------------------------------------

/// All alpha in 1..=bound such that no prime factor of alpha+1 divides 690.
/// The divisor set {2, 3, 5, 23} is derived by factoring 690 rather than
/// hardcoded.
pub fn gap_set(bound: u32) -> Vec<u32> {
    let f690 = factor(&BigUint::from(690u32), &FactorBudget::default())
        .expect("690 factors completely");
    let small: Vec<u64> =
        f690.factors().keys().map(|p| p.to_u64().expect("factor fits u64")).collect();
    let mut out = Vec::new();
    'alpha: for alpha in 1..=bound {
        let m = alpha as u64 + 1;
        for &p in &small {
            if m % p == 0 {
                continue 'alpha;
            }
        }
        out.push(alpha);
    }
    out
}
