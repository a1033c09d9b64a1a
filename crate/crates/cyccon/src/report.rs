//! Machine-readable run reports. Every command prints exactly one JSON
//! report to standard output; identical inputs and flags produce identical
//! bytes.

use cyccon_core::criterion::{IntervalVerdict, Verdict};
use cyccon_core::sfunc::SignVector;
use cyccon_core::stats::TTest;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::formats::CouplingDoc;
use crate::render::Render;

/// Fields shared by all reports.
#[derive(Debug, Serialize)]
pub struct ReportHeader {
    pub command: &'static str,
    pub version: &'static str,
    pub input_digest: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ReportHeader {
    pub fn new(command: &'static str, inputs: &[&[u8]], warnings: Vec<String>) -> Self {
        ReportHeader {
            command,
            version: env!("CARGO_PKG_VERSION"),
            input_digest: sha256_digest(inputs),
            warnings,
        }
    }
}

/// `"sha256:<hex>"` over the concatenated inputs.
pub fn sha256_digest(inputs: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for chunk in inputs {
        hasher.update(chunk);
    }
    let mut out = String::with_capacity(7 + 64);
    out.push_str("sha256:");
    for byte in hasher.finalize() {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// A criterion decision.
#[derive(Debug, Serialize)]
pub struct VerdictDoc {
    pub kind: String,
    pub lhs: String,
    pub bound: String,
    pub contextual: bool,
    pub inconclusive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i8>>,
    pub deltas: Vec<String>,
}

impl VerdictDoc {
    pub fn new(verdict: &Verdict, render: Render) -> Self {
        VerdictDoc {
            kind: verdict.kind.to_string(),
            lhs: render.num(&verdict.lhs),
            bound: render.num(&verdict.bound),
            contextual: verdict.contextual,
            inconclusive: verdict.inconclusive,
            witness: verdict.witness.as_ref().map(witness_signs),
            deltas: render.all(&verdict.deltas),
        }
    }
}

pub fn witness_signs(witness: &SignVector) -> Vec<i8> {
    witness.signs().to_vec()
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub verdicts: Vec<VerdictDoc>,
}

/// Why no maximal coupling exists: the odd sign vector whose signed sum
/// exceeds the criterion bound.
#[derive(Debug, Serialize)]
pub struct InfeasibilityDoc {
    pub lhs: String,
    pub bound: String,
    pub witness: Vec<i8>,
}

#[derive(Debug, Serialize)]
pub struct CoupleReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingDoc>,
    /// Per connection, the probability that both measurements of the
    /// property agree; equals 1 - |delta_i| / 2.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub agreement_probabilities: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<InfeasibilityDoc>,
}

#[derive(Debug, Serialize)]
pub struct MomentMismatchDoc {
    pub moment: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<MomentMismatchDoc>,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub mode: &'static str,
    pub oracle_feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_gap: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<VerdictDoc>,
    pub agreement: &'static str,
}

#[derive(Debug, Serialize)]
pub struct IntervalDoc {
    pub lo: String,
    pub hi: String,
    pub bound: String,
    pub certified: bool,
}

impl IntervalDoc {
    pub fn new(verdict: &IntervalVerdict, render: Render) -> Self {
        IntervalDoc {
            lo: render.num(&verdict.lo),
            hi: render.num(&verdict.hi),
            bound: render.num(&verdict.bound),
            certified: verdict.certified,
        }
    }
}

/// A two-sample consistency test between the two measurements of one
/// property; `connection` is 1-based.
#[derive(Debug, Serialize)]
pub struct TTestDoc {
    pub connection: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    pub t: String,
    pub df: u32,
    pub significant_1_percent: bool,
    pub significant_01_percent: bool,
}

impl TTestDoc {
    pub fn new(connection: usize, property: Option<String>, test: &TTest, render: Render) -> Self {
        TTestDoc {
            connection,
            property,
            t: render.float(test.t),
            df: test.df,
            significant_1_percent: test.significant_1_percent,
            significant_01_percent: test.significant_01_percent,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub rank: usize,
    pub mode: &'static str,
    pub alpha: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<String>,
    pub corr_intervals: Vec<[String; 2]>,
    pub delta_intervals: Vec<[String; 2]>,
    pub interval: IntervalDoc,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub consistency_tests: Vec<TTestDoc>,
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub cycles: Vec<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_prefixed() {
        let d = sha256_digest(&[b"abc"]);
        assert_eq!(
            d,
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(sha256_digest(&[b"ab", b"c"]), d);
    }

    #[test]
    fn report_serialization_flattens_the_header() {
        let report = CheckReport {
            header: ReportHeader::new("check", &[b"x"], vec![]),
            verdicts: vec![],
        };
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["command"], "check");
        assert!(json["input_digest"]
            .as_str()
            .unwrap()
            .starts_with("sha256:"));
        assert!(json.get("warnings").is_none());
    }
}
