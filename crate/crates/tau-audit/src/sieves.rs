//! Bulk divisor-sum tables: sigma_k(1..N), exact or reduced mod m.
//!
//! Construction is the additive divisor loop (for each d, add d^k to every
//! multiple of d), O(N log N) additions. Parallel construction partitions
//! the *output* range so each worker owns a disjoint slice; integer addition
//! is exact, so the result is bit-identical to the serial build.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factor, mod_pow_u64, FactorBudget};
use crate::error::{Error, Result};

/// Read-only table of sigma_k(1..=upper), exact or reduced modulo m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTable {
    k: u32,
    upper: usize,
    data: SigmaData,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SigmaData {
    Exact(Vec<BigUint>),
    Reduced { modulus: u64, values: Vec<u64> },
}

impl SigmaTable {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Largest n stored.
    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn modulus(&self) -> Option<u64> {
        match &self.data {
            SigmaData::Exact(_) => None,
            SigmaData::Reduced { modulus, .. } => Some(*modulus),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.modulus().is_none()
    }

    /// Exact value sigma_k(n). Panics if the table is reduced or n is out of
    /// range; call sites own the table they built.
    pub fn exact(&self, n: usize) -> &BigUint {
        match &self.data {
            SigmaData::Exact(v) => &v[n],
            SigmaData::Reduced { .. } => panic!("exact() on a reduced sigma table"),
        }
    }

    /// Residue sigma_k(n) mod m for a reduced table. Panics on exact tables.
    pub fn residue(&self, n: usize) -> u64 {
        match &self.data {
            SigmaData::Reduced { values, .. } => values[n],
            SigmaData::Exact(_) => panic!("residue() on an exact sigma table"),
        }
    }

    /// Value at n as a big integer, reduced or not.
    pub fn value(&self, n: usize) -> BigUint {
        match &self.data {
            SigmaData::Exact(v) => v[n].clone(),
            SigmaData::Reduced { values, .. } => BigUint::from(values[n]),
        }
    }

    pub(crate) fn from_reduced_values(k: u32, modulus: u64, values: Vec<u64>) -> Self {
        let upper = values.len() - 1;
        SigmaTable { k, upper, data: SigmaData::Reduced { modulus, values } }
    }

    pub(crate) fn from_exact_values(k: u32, values: Vec<BigUint>) -> Self {
        let upper = values.len() - 1;
        SigmaTable { k, upper, data: SigmaData::Exact(values) }
    }
}

/// Bytes the exact table will occupy, estimated before allocation.
fn exact_estimate_bytes(k: u32, upper: usize) -> u64 {
    let bits = k as u64 * (usize::BITS - (upper.max(2) - 1).leading_zeros()) as u64 + 2;
    let limbs = bits.div_ceil(64);
    // Vec header + heap limbs + allocator slack, per entry.
    let per_entry = 24 + 8 * limbs + 16;
    (upper as u64 + 1) * per_entry
}

/// Exact sigma_k table for n = 1..=upper.
///
/// Fails with a resource error naming the budget if the estimated table size
/// exceeds `memory_budget_bytes`. `jobs > 1` splits the output range across
/// that many threads.
pub fn sigma_sieve(k: u32, upper: usize, memory_budget_bytes: u64, jobs: usize) -> Result<SigmaTable> {
    if upper < 1 {
        return Err(Error::Domain("sigma_sieve: upper bound must be >= 1".into()));
    }
    let needed = exact_estimate_bytes(k, upper);
    if needed > memory_budget_bytes {
        return Err(Error::Resource {
            what: format!("exact sigma_{k} table to {upper} (memory budget)"),
            budget: memory_budget_bytes,
            needed,
        });
    }
    let mut values = vec![BigUint::zero(); upper + 1];
    let fill = |slice: &mut [BigUint], lo: usize| {
        // slice covers table indices lo..=hi; index 0 of the table stays zero
        let hi = lo + slice.len() - 1;
        for d in 1..=hi {
            let mut m = if d >= lo { d } else { lo.div_ceil(d) * d };
            if m > hi {
                continue; // no multiple lands in this chunk; skip the pow
            }
            let dk = BigUint::from(d).pow(k);
            while m <= hi {
                slice[m - lo] += &dk;
                m += d;
            }
        }
    };
    run_partitioned(&mut values[1..], 1, jobs, fill);
    Ok(SigmaTable { k, upper, data: SigmaData::Exact(values) })
}

/// sigma_k(1..=upper) mod m. The modulus must satisfy m <= 2^63 so sums of
/// two residues never overflow.
pub fn sigma_mod_sieve(k: u32, upper: usize, modulus: u64, jobs: usize) -> Result<SigmaTable> {
    if upper < 1 {
        return Err(Error::Domain("sigma_mod_sieve: upper bound must be >= 1".into()));
    }
    if modulus < 1 {
        return Err(Error::Domain("sigma_mod_sieve: modulus must be >= 1".into()));
    }
    if modulus > (1 << 63) {
        return Err(Error::Domain("sigma_mod_sieve: modulus must be <= 2^63".into()));
    }
    let mut values = vec![0u64; upper + 1];
    let fill = |slice: &mut [u64], lo: usize| {
        let hi = lo + slice.len() - 1;
        for d in 1..=hi {
            let mut m = if d >= lo { d } else { lo.div_ceil(d) * d };
            if m > hi {
                continue;
            }
            let dk = mod_pow_u64(d as u64, k as u64, modulus);
            while m <= hi {
                let cell = &mut slice[m - lo];
                *cell = (*cell + dk) % modulus;
                m += d;
            }
        }
    };
    run_partitioned(&mut values[1..], 1, jobs, fill);
    Ok(SigmaTable { k, upper, data: SigmaData::Reduced { modulus, values } })
}

/// Split `data` (whose first element is table index `base`) into `jobs`
/// contiguous chunks and run `fill(chunk, lo)` on each, in parallel when
/// jobs > 1. Chunks are balanced by harmonic work, not length, so the last
/// worker (small divisors only reach it via long strides) is not starved.
fn run_partitioned<T: Send>(
    data: &mut [T],
    base: usize,
    jobs: usize,
    fill: impl Fn(&mut [T], usize) + Sync,
) {
    let jobs = jobs.max(1);
    if jobs == 1 || data.len() < 4 * jobs {
        fill(data, base);
        return;
    }
    // Work for output cell n is ~H(n); cumulative work to n is ~n log n.
    // Cut points equalize n log n.
    let n = data.len();
    let total = (n as f64) * (n as f64).ln().max(1.0);
    let mut cuts = vec![0usize];
    for t in 1..jobs {
        let target = total * t as f64 / jobs as f64;
        let mut x = cuts.last().unwrap() + 1;
        while x < n && (x as f64) * (x as f64).ln().max(1.0) < target {
            x += (x / 16).max(1);
        }
        cuts.push(x.min(n));
    }
    cuts.push(n);
    cuts.dedup();
    std::thread::scope(|scope| {
        let fill = &fill;
        let mut rest = data;
        let mut consumed = 0usize;
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            let (chunk, tail) = rest.split_at_mut(len);
            rest = tail;
            let chunk_lo = base + consumed;
            consumed += len;
            scope.spawn(move || fill(chunk, chunk_lo));
        }
    });
}

/// sigma_k(n) for a single n, via the geometric-sum formula over the prime
/// powers of n. Unavailable if the factorization budget runs out.
pub fn sigma_single(k: u32, n: &BigUint, budget: &FactorBudget) -> Result<BigUint> {
    if n.is_zero() {
        return Err(Error::Domain("sigma_single: n must be >= 1".into()));
    }
    let f = factor(n, budget)?;
    if !f.is_complete() {
        return Err(Error::Unavailable(format!(
            "sigma_single: factorization of {n} incomplete within budget (cofactor {})",
            f.cofactor()
        )));
    }
    let mut acc = BigUint::one();
    for (p, e) in f.factors() {
        // (p^{k(e+1)} - 1) / (p^k - 1)
        let pk = p.pow(k);
        let num = pk.pow(e + 1) - 1u32;
        let den = &pk - 1u32;
        acc *= num / den;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_below;

    fn sigma_enumerate(k: u32, n: usize) -> BigUint {
        let mut acc = BigUint::zero();
        for d in 1..=n {
            if n % d == 0 {
                acc += BigUint::from(d).pow(k);
            }
        }
        acc
    }

    const BUDGET: u64 = 1 << 30;

    #[test]
    fn sieve_examples() {
        let s5 = sigma_sieve(5, 10, BUDGET, 1).unwrap();
        assert_eq!(s5.exact(1), &BigUint::from(1u32));
        assert_eq!(s5.exact(6), &BigUint::from(8052u32)); // 1 + 32 + 243 + 7776
        let s11 = sigma_sieve(11, 4, BUDGET, 1).unwrap();
        assert_eq!(s11.exact(2), &BigUint::from(2049u32)); // 1 + 2^11
    }

    #[test]
    fn sieve_matches_enumeration_to_1e4() {
        for k in [3u32, 5, 11] {
            let table = sigma_sieve(k, 10_000, BUDGET, 1).unwrap();
            for n in 1..=10_000 {
                assert_eq!(table.exact(n), &sigma_enumerate(k, n), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn sieve_prime_entries_are_one_plus_p_to_k() {
        let table = sigma_sieve(5, 10_000, BUDGET, 1).unwrap();
        for p in primes_below(10_001) {
            let expect = BigUint::from(p).pow(5) + 1u32;
            assert_eq!(table.exact(p as usize), &expect);
        }
    }

    #[test]
    fn multiplicativity_on_coprime_pairs() {
        let table = sigma_sieve(5, 10_000, BUDGET, 1).unwrap();
        for m in 2..=100usize {
            for n in 2..=(10_000 / m) {
                if num_integer::gcd(m, n) == 1 {
                    let lhs = table.exact(m * n);
                    let rhs = table.exact(m) * table.exact(n);
                    assert_eq!(lhs, &rhs, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn memory_budget_is_enforced() {
        let e = sigma_sieve(11, 1_000_000, 1024, 1);
        match e {
            Err(Error::Resource { budget, .. }) => assert_eq!(budget, 1024),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn mod_sieve_modulus_one_is_all_zeros() {
        let t = sigma_mod_sieve(5, 100, 1, 1).unwrap();
        for n in 1..=100 {
            assert_eq!(t.residue(n), 0);
        }
    }

    #[test]
    fn mod_sieve_agrees_with_exact_reduction() {
        let exact = sigma_sieve(5, 10_000, BUDGET, 1).unwrap();
        for m in [2u64, 691, 216113] {
            let reduced = sigma_mod_sieve(5, 10_000, m, 1).unwrap();
            for n in 1..=10_000 {
                let expect = (exact.exact(n) % m).to_u64().unwrap();
                assert_eq!(reduced.residue(n), expect, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn mod_sieve_sigma5_of_690_mod_691() {
        let exact = sigma_sieve(5, 690, BUDGET, 1).unwrap();
        let reduced = sigma_mod_sieve(5, 690, 691, 1).unwrap();
        let expect = (exact.exact(690) % 691u64).to_u64().unwrap();
        assert_eq!(reduced.residue(690), expect);
    }

    #[test]
    fn parallel_build_is_bit_identical() {
        for jobs in [2usize, 3, 8] {
            let serial = sigma_sieve(5, 20_000, BUDGET, 1).unwrap();
            let parallel = sigma_sieve(5, 20_000, BUDGET, jobs).unwrap();
            assert_eq!(serial, parallel, "jobs={jobs}");
            let serial_m = sigma_mod_sieve(11, 20_000, 691, 1).unwrap();
            let parallel_m = sigma_mod_sieve(11, 20_000, 691, jobs).unwrap();
            assert_eq!(serial_m, parallel_m, "jobs={jobs}");
        }
    }

    #[test]
    fn sigma_single_cases() {
        let b = FactorBudget::default();
        assert_eq!(sigma_single(11, &BigUint::from(1u32), &b).unwrap(), BigUint::from(1u32));
        assert_eq!(sigma_single(5, &BigUint::from(6u32), &b).unwrap(), BigUint::from(8052u32));
        for p in [2u64, 97, 1381] {
            let expect = BigUint::from(p).pow(5) + 1u32;
            assert_eq!(sigma_single(5, &BigUint::from(p), &b).unwrap(), expect);
        }
    }

    #[test]
    fn sigma_single_unavailable_when_budget_too_small() {
        let n = BigUint::from(10_000_000_019u64) * BigUint::from(10_000_000_033u64);
        let e = sigma_single(5, &n, &FactorBudget { trial_bound: 100, rho_iterations: 0 });
        assert!(matches!(e, Err(Error::Unavailable(_))));
    }
}
