//! Structured claim verdicts and their JSON / CSV / text renderings.
//!
//! Every audit in this crate produces `ClaimReport`s with a stable schema:
//! `{"claim": string, "inputs": object, "verdict": string, "witness": object}`.
//! All numeric payloads are decimal strings so consumers never see binary
//! or scientific notation, and maps are ordered so output is byte-stable.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Outcome of one claim audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
    NotDirectlyTestable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined",
            Verdict::NotDirectlyTestable => "not-directly-testable",
        }
    }

    /// Combine verdicts: any failure dominates, then undetermined.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Undetermined, _) | (_, Undetermined) => Undetermined,
            (NotDirectlyTestable, x) | (x, NotDirectlyTestable) => x,
            (Holds, Holds) => Holds,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Stable identifiers for every auditable claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClaimId {
    /// A(p) = 0 mod 691 iff p = -1 mod 691.
    Lemma1,
    /// Base-p digit structure: A(p^alpha) = 3 mod p^5.
    DigitsEq12,
    /// Digit-count bracket p^{11a-1} < A(p^a) < p^{11a}.
    DigitsBound,
    /// Per-digit positivity claim derived under a refuted hypothesis.
    DigitsEq15,
    /// Tower definition g^{T_i} = A(p) mod p^i.
    DlogEq19,
    /// Tower compatibility T_{i+1} = T_i mod p^{i-1}(p-1).
    DlogEq20,
    /// Every tower increment d_i >= 1.
    DlogEq21,
    /// Strict growth T_1 < ... < T_height.
    DlogEq22,
    /// A(p) has a prime factor above p.
    Lemma2,
    /// A(p^alpha) has a prime factor above p^alpha (alpha >= 2).
    Lemma8,
    /// A(p^{alpha + k(alpha+1)}) = 0 mod 691 for k = 0..k_max.
    Periodicity,
    /// Divisibility pattern equivalence p^{alpha+1} = 1 mod 691 and
    /// gcd(p-1, 691) = 1.
    PeriodicityEq66,
    /// Row entries are even.
    RowEq29,
    /// Row 0 is concentrated at residue 0.
    RowEq30,
    /// a_{i,0} agrees across rows i >= 1.
    RowEq31,
    /// Mirror symmetry a_{i,k} = a_{q-i,q-k}.
    RowEq32,
    /// Reshuffle law a_{i,k} = a_{1, i^{-1} k mod q}.
    RowEq35,
    /// Row mass sums to n-1.
    RowMass,
    /// Census totals sum to q.
    CensusEq38,
    /// Weighted census mass equals n-1.
    CensusEq39,
    /// Occupied census levels stop strictly before q-1.
    CensusQ0,
    /// Reproduction of a reference census row.
    CensusReference,
    /// Majority inequality |S_{1,l-1}| > l |S_{1,l}|.
    Ineq41,
    /// C_i = i * B(p) mod q.
    WeightedEq33,
    /// Exact inverse identity C_i + C_{q-i} = q(n-1).
    WeightedEq49,
    /// All C_i distinct.
    WeightedEq52,
    /// Some adjacent gap below q-1.
    WeightedEq56,
    /// min_i C_i = 2q.
    MinEq48,
    /// min_i C_i = 2.
    MinCor7,
    /// The residues {C_i mod q} form the full group of order q.
    GroupOrder,
    /// C_i and C_{q-i} are additive inverses mod q.
    GroupInverse,
    /// q | A(p) and 691 | A(p), by modular evaluation.
    TableDivisibility,
    /// gcd(A(p), B(p)) factors as the reference row says.
    GcdReference,
    /// Odd common prime factors of A(p) and B(p) stay below p.
    GcdCorollary5,
    /// 691 divides gcd(A(p), B(p)) when p = -1 mod 691.
    Gcd691,
    /// tau(n) != 0 on the scanned range, with engine cross-checks.
    LehmerScan,
    /// All engines produce identical series.
    EngineAgreement,
    /// A(n) - B(n) = 3 tau(n) on a range.
    AbIdentity,
}

impl ClaimId {
    pub fn as_str(self) -> &'static str {
        use ClaimId::*;
        match self {
            Lemma1 => "LEMMA1",
            DigitsEq12 => "DIGITS_EQ12",
            DigitsBound => "DIGITS_BOUND",
            DigitsEq15 => "DIGITS_EQ15",
            DlogEq19 => "DLOG_EQ19",
            DlogEq20 => "DLOG_EQ20",
            DlogEq21 => "DLOG_EQ21",
            DlogEq22 => "DLOG_EQ22",
            Lemma2 => "LEMMA2",
            Lemma8 => "LEMMA8",
            Periodicity => "PERIODICITY",
            PeriodicityEq66 => "PERIODICITY_EQ66",
            RowEq29 => "ROW_EQ29",
            RowEq30 => "ROW_EQ30",
            RowEq31 => "ROW_EQ31",
            RowEq32 => "ROW_EQ32",
            RowEq35 => "ROW_EQ35",
            RowMass => "ROW_MASS",
            CensusEq38 => "CENSUS_EQ38",
            CensusEq39 => "CENSUS_EQ39",
            CensusQ0 => "CENSUS_Q0",
            CensusReference => "CENSUS_REFERENCE",
            Ineq41 => "INEQ41",
            WeightedEq33 => "WSUM_EQ33",
            WeightedEq49 => "WSUM_EQ49",
            WeightedEq52 => "WSUM_EQ52",
            WeightedEq56 => "WSUM_EQ56",
            MinEq48 => "MIN_EQ48",
            MinCor7 => "MIN_COR7",
            GroupOrder => "GROUP_ORDER",
            GroupInverse => "GROUP_INVERSE",
            TableDivisibility => "TABLE_DIVISIBILITY",
            GcdReference => "GCD_REFERENCE",
            GcdCorollary5 => "GCD_COROLLARY5",
            Gcd691 => "GCD_691",
            LehmerScan => "LEHMER_SCAN",
            EngineAgreement => "ENGINE_AGREEMENT",
            AbIdentity => "AB_IDENTITY",
        }
    }
}

impl Serialize for ClaimId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One audited claim: identifier, the inputs it ran on, the verdict, and
/// whatever witnesses justify the verdict. A failing verdict always carries
/// a concrete counterexample in the witness map.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub inputs: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub witness: BTreeMap<String, String>,
}

impl ClaimReport {
    pub fn new(claim: ClaimId, verdict: Verdict) -> Self {
        ClaimReport { claim, inputs: BTreeMap::new(), verdict, witness: BTreeMap::new() }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn witness(mut self, key: &str, value: impl ToString) -> Self {
        self.witness.insert(key.to_string(), value.to_string());
        self
    }
}

/// Worst verdict across a batch, for exit-code mapping.
pub fn combined_verdict(reports: &[ClaimReport]) -> Verdict {
    reports.iter().fold(Verdict::Holds, |acc, r| acc.and(r.verdict))
}

/// Pretty JSON array of reports. Stable: struct field order plus sorted maps.
pub fn reports_to_json(reports: &[ClaimReport]) -> String {
    serde_json::to_string_pretty(reports).expect("report serialization cannot fail")
}

/// Flat CSV with semicolon-joined key=value cells for the two maps.
pub fn reports_to_csv(reports: &[ClaimReport]) -> String {
    let mut out = String::from("claim,verdict,inputs,witness\n");
    for r in reports {
        let join = |m: &BTreeMap<String, String>| {
            m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.claim,
            r.verdict,
            join(&r.inputs),
            join(&r.witness)
        ));
    }
    out
}

/// Human-oriented one-line-per-claim rendering.
pub fn reports_to_text(reports: &[ClaimReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{:<20} {:<22}", r.claim.to_string(), r.verdict.to_string()));
        for (k, v) in &r.inputs {
            out.push_str(&format!(" {k}={v}"));
        }
        if !r.witness.is_empty() {
            out.push_str("  |");
            for (k, v) in &r.witness {
                out.push_str(&format!(" {k}={v}"));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_combination_prefers_failure() {
        use Verdict::*;
        assert_eq!(Holds.and(Fails), Fails);
        assert_eq!(Undetermined.and(Fails), Fails);
        assert_eq!(Holds.and(Undetermined), Undetermined);
        assert_eq!(NotDirectlyTestable.and(Holds), Holds);
        assert_eq!(Holds.and(Holds), Holds);
    }

    #[test]
    fn json_schema_shape() {
        let r = ClaimReport::new(ClaimId::Lemma1, Verdict::Holds)
            .input("p", 1381)
            .witness("a_mod_691", 0);
        let json = reports_to_json(&[r]);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let obj = &parsed[0];
        assert_eq!(obj["claim"], "LEMMA1");
        assert_eq!(obj["verdict"], "holds");
        assert_eq!(obj["inputs"]["p"], "1381");
        assert_eq!(obj["witness"]["a_mod_691"], "0");
    }

    #[test]
    fn not_directly_testable_renders_kebab() {
        let r = ClaimReport::new(ClaimId::DigitsEq15, Verdict::NotDirectlyTestable);
        let json = reports_to_json(&[r]);
        assert!(json.contains("\"not-directly-testable\""));
    }
}
