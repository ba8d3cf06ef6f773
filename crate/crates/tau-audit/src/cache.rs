//! On-disk cache for sigma tables.
//!
//! File format, bit-exact:
//!
//! ```text
//! sigma k=<k> N=<N> mod=<m|none> v1
//! <sigma_k(1)>
//! ...
//! <sigma_k(N)>
//! ```
//!
//! one decimal value per line, terminating newline included. Loading
//! verifies the header, the line count, the value at n = 1 and the value at
//! one pseudorandom prime position before trusting anything; any mismatch
//! means the cache is ignored and the table rebuilt.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::is_prime_u64;
use crate::error::Result;
use crate::sieves::SigmaTable;

fn header(k: u32, upper: usize, modulus: Option<u64>) -> String {
    let m = modulus.map(|m| m.to_string()).unwrap_or_else(|| "none".to_string());
    format!("sigma k={k} N={upper} mod={m} v1")
}

/// File name a table is stored under.
pub fn cache_file_name(k: u32, upper: usize, modulus: Option<u64>) -> String {
    let m = modulus.map(|m| m.to_string()).unwrap_or_else(|| "none".to_string());
    format!("sigma_k{k}_N{upper}_mod{m}.v1.txt")
}

/// Write the table under `dir` (created on demand). Returns the path.
pub fn store(table: &SigmaTable, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(cache_file_name(table.k(), table.upper(), table.modulus()));
    let tmp = path.with_extension("tmp");
    {
        let mut out = std::io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(out, "{}", header(table.k(), table.upper(), table.modulus()))?;
        for n in 1..=table.upper() {
            writeln!(out, "{}", table.value(n))?;
        }
        out.flush()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Load a table if a verifiable cache file exists; `None` (with a note on
/// the diagnostic stream) otherwise.
pub fn load(dir: &Path, k: u32, upper: usize, modulus: Option<u64>) -> Option<SigmaTable> {
    let path = dir.join(cache_file_name(k, upper, modulus));
    let text = fs::read_to_string(&path).ok()?;
    match parse_and_verify(&text, k, upper, modulus) {
        Ok(table) => Some(table),
        Err(why) => {
            eprintln!("cache: ignoring {}: {why}", path.display());
            None
        }
    }
}

fn parse_and_verify(
    text: &str,
    k: u32,
    upper: usize,
    modulus: Option<u64>,
) -> std::result::Result<SigmaTable, String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty file")?;
    let expected = header(k, upper, modulus);
    if head != expected {
        return Err(format!("header mismatch: got {head:?}, want {expected:?}"));
    }

    // one pseudorandom prime position, derived from the header so the check
    // is reproducible per table shape
    let mut seed = 0u64;
    for b in expected.bytes() {
        seed = seed.wrapping_mul(0x100000001b3).wrapping_add(b as u64);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe = pick_prime_at_most(upper, &mut rng);

    let mut count = 0usize;
    let mut values_u64: Vec<u64> = Vec::new();
    let mut values_big: Vec<BigUint> = Vec::new();
    match modulus {
        Some(_) => values_u64.push(0),
        None => values_big.push(BigUint::from(0u32)),
    }
    for line in lines {
        count += 1;
        if count > upper {
            return Err(format!("too many value lines (expected {upper})"));
        }
        match modulus {
            Some(_) => values_u64.push(line.parse::<u64>().map_err(|e| format!("line {count}: {e}"))?),
            None => values_big
                .push(line.parse::<BigUint>().map_err(|e| format!("line {count}: {e}"))?),
        }
    }
    if count != upper {
        return Err(format!("{count} value lines, expected {upper}"));
    }
    if !text.ends_with('\n') {
        return Err("missing terminating newline".into());
    }

    let table = match modulus {
        Some(m) => SigmaTable::from_reduced_values(k, m, values_u64),
        None => SigmaTable::from_exact_values(k, values_big),
    };

    // verification: sigma_k(1) = 1 and sigma_k(probe) = 1 + probe^k
    let one_expect = match modulus {
        Some(m) => BigUint::one() % m,
        None => BigUint::one(),
    };
    if table.value(1) != one_expect {
        return Err("verification failed at n = 1".into());
    }
    if let Some(p) = probe {
        let mut expect = BigUint::from(p).pow(k) + 1u32;
        if let Some(m) = modulus {
            expect %= m;
        }
        if table.value(p as usize) != expect {
            return Err(format!("verification failed at prime position {p}"));
        }
    }
    Ok(table)
}

fn pick_prime_at_most(upper: usize, rng: &mut ChaCha8Rng) -> Option<u64> {
    if upper < 2 {
        return None;
    }
    for _ in 0..64 {
        let candidate = rng.gen_range(2..=upper as u64);
        let mut v = candidate;
        while v >= 2 {
            if is_prime_u64(v) {
                return Some(v);
            }
            v -= 1;
        }
    }
    Some(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieves::{sigma_mod_sieve, sigma_sieve};

    #[test]
    fn round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let table = sigma_sieve(5, 10_000, 1 << 30, 1).unwrap();
        let path = store(&table, dir.path()).unwrap();
        assert!(path.exists());
        let loaded = load(dir.path(), 5, 10_000, None).unwrap();
        assert_eq!(loaded, table);
    }

    #[test]
    fn round_trip_reduced() {
        let dir = tempfile::tempdir().unwrap();
        let table = sigma_mod_sieve(5, 5000, 691, 1).unwrap();
        store(&table, dir.path()).unwrap();
        let loaded = load(dir.path(), 5, 5000, Some(691)).unwrap();
        assert_eq!(loaded, table);
    }

    #[test]
    fn header_format_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let table = sigma_sieve(5, 10, 1 << 30, 1).unwrap();
        let path = store(&table, dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.starts_with("sigma k=5 N=10 mod=none v1\n"));
        assert!(text.ends_with('\n'));
        assert_eq!(text.lines().count(), 11);
    }

    #[test]
    fn corrupted_value_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let table = sigma_sieve(5, 100, 1 << 30, 1).unwrap();
        let path = store(&table, dir.path()).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        // damage the value at n = 1
        let nl = text.find('\n').unwrap();
        text.replace_range(nl + 1..nl + 2, "9");
        std::fs::write(&path, text).unwrap();
        assert!(load(dir.path(), 5, 100, None).is_none());
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let table = sigma_sieve(5, 100, 1 << 30, 1).unwrap();
        store(&table, dir.path()).unwrap();
        assert!(load(dir.path(), 5, 101, None).is_none());
        assert!(load(dir.path(), 3, 100, None).is_none());
        assert!(load(dir.path(), 5, 100, Some(7)).is_none());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let table = sigma_sieve(5, 100, 1 << 30, 1).unwrap();
        let path = store(&table, dir.path()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cut: Vec<&str> = text.lines().take(50).collect();
        std::fs::write(&path, cut.join("\n") + "\n").unwrap();
        assert!(load(dir.path(), 5, 100, None).is_none());
    }
}
