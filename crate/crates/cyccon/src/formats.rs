//! File formats: system and layout JSON, coupling JSON, and trial-record
//! CSV, with conversion to and from the core types.

use std::path::Path;

use cyccon_core::coupling::{coupling_variable_names, JointDistribution, MAX_COUPLING_VARIABLES};
use cyccon_core::model::{
    build_cyclic_system, BuildOptions, ClampNote, CyclicSystem, MomentEntry, SystemLayout,
};
use cyccon_core::rational::{format_fraction, from_f64_shortest, parse_fraction, Rational};
use cyccon_core::stats::{TrialRecords, TrialRow};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A numeric JSON field: a decimal or fraction string ("−0.805", "3/16"), or
/// a bare JSON number read by shortest-decimal conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberLit {
    Number(f64),
    Text(String),
}

impl NumberLit {
    pub fn to_rational(&self) -> Result<Rational, String> {
        match self {
            NumberLit::Number(x) => {
                from_f64_shortest(*x).map_err(|err| format!("number {x}: {err}"))
            }
            NumberLit::Text(s) => parse_fraction(s).map_err(|err| format!("{s:?}: {err}")),
        }
    }
}

/// The moments observed for one context, keyed by its two properties in the
/// orientation of this entry. Standard errors are optional and only needed
/// by `analyze`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentDoc {
    pub context: (String, String),
    pub e_first: NumberLit,
    pub e_second: NumberLit,
    pub corr: NumberLit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_first: Option<NumberLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_second: Option<NumberLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_corr: Option<NumberLit>,
}

/// A measurement layout with optional per-context moments. `decompose` needs
/// only the layout; every other command needs the moments, and `analyze`
/// additionally needs standard errors and the replication degrees of
/// freedom `df`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub properties: Vec<String>,
    pub contexts: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moments: Vec<MomentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<u32>,
}

/// Standard errors of one context's moments in canonical cycle orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSes {
    pub se_own: Rational,
    pub se_next: Rational,
    pub se_corr: Rational,
}

/// A system document resolved against its canonical cycle.
#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub system: CyclicSystem,
    pub clamped: Vec<ClampNote>,
    /// Per-context standard errors when every moment carried all three.
    pub ses: Option<Vec<ContextSes>>,
    pub df: Option<u32>,
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_system(path: &Path, text: &[u8]) -> Result<SystemDoc, CliError> {
    serde_json::from_slice(text).map_err(|err| CliError::Parse {
        path: path.display().to_string(),
        message: err.to_string(),
    })
}

fn number(path: &Path, what: &str, lit: &NumberLit) -> Result<Rational, CliError> {
    lit.to_rational().map_err(|message| CliError::Parse {
        path: path.display().to_string(),
        message: format!("{what}: {message}"),
    })
}

/// Builds the canonical cyclic system from a parsed document, mirroring the
/// entry-matching order of the core builder so optional standard errors stay
/// attached to the right contexts.
pub fn build_system(path: &Path, doc: &SystemDoc, clamp: bool) -> Result<LoadedSystem, CliError> {
    let layout = SystemLayout {
        properties: doc.properties.clone(),
        contexts: doc.contexts.clone(),
    };
    let mut entries = Vec::with_capacity(doc.moments.len());
    for (i, m) in doc.moments.iter().enumerate() {
        let label = |field: &str| format!("moments[{i}].{field}");
        entries.push(MomentEntry {
            members: m.context.clone(),
            e_first: number(path, &label("e_first"), &m.e_first)?,
            e_second: number(path, &label("e_second"), &m.e_second)?,
            corr: number(path, &label("corr"), &m.corr)?,
        });
    }
    let outcome = build_cyclic_system(&layout, &entries, BuildOptions { clamp })
        .map_err(|err| CliError::Invalid(format!("{}: {err}", path.display())))?;

    let with_se = doc
        .moments
        .iter()
        .filter(|m| m.se_first.is_some() || m.se_second.is_some() || m.se_corr.is_some());
    let complete = doc
        .moments
        .iter()
        .filter(|m| m.se_first.is_some() && m.se_second.is_some() && m.se_corr.is_some());
    let ses = if with_se.count() == 0 {
        None
    } else if complete.count() == doc.moments.len() {
        Some(match_ses(path, doc, outcome.system.labels())?)
    } else {
        return Err(CliError::Invalid(format!(
            "{}: standard errors must be given as se_first, se_second and se_corr on every moment",
            path.display()
        )));
    };

    Ok(LoadedSystem {
        system: outcome.system,
        clamped: outcome.clamped,
        ses,
        df: doc.df,
    })
}

/// Re-runs the builder's first-unconsumed pair matching to orient each
/// moment's standard errors along the canonical cycle.
fn match_ses(path: &Path, doc: &SystemDoc, labels: &[String]) -> Result<Vec<ContextSes>, CliError> {
    let n = labels.len();
    let mut consumed = vec![false; doc.moments.len()];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let own = &labels[i];
        let next = &labels[(i + 1) % n];
        let j = doc
            .moments
            .iter()
            .enumerate()
            .position(|(j, m)| {
                !consumed[j]
                    && ((m.context.0 == *own && m.context.1 == *next)
                        || (m.context.0 == *next && m.context.1 == *own))
            })
            .expect("built system consumed one entry per context");
        consumed[j] = true;
        let m = &doc.moments[j];
        let label = |field: &str| format!("moments[{j}].{field}");
        let se_first = number(
            path,
            &label("se_first"),
            m.se_first.as_ref().expect("checked"),
        )?;
        let se_second = number(
            path,
            &label("se_second"),
            m.se_second.as_ref().expect("checked"),
        )?;
        let se_corr = number(
            path,
            &label("se_corr"),
            m.se_corr.as_ref().expect("checked"),
        )?;
        for (field, se) in [
            ("se_first", &se_first),
            ("se_second", &se_second),
            ("se_corr", &se_corr),
        ] {
            if se.is_negative() {
                return Err(CliError::Invalid(format!(
                    "{}: {} must be nonnegative",
                    path.display(),
                    label(field)
                )));
            }
        }
        let (se_own, se_next) = if m.context.0 == *own {
            (se_first, se_second)
        } else {
            (se_second, se_first)
        };
        out.push(ContextSes {
            se_own,
            se_next,
            se_corr,
        });
    }
    Ok(out)
}

pub fn load_system(path: &Path, clamp: bool) -> Result<(LoadedSystem, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let doc = parse_system(path, &bytes)?;
    let loaded = build_system(path, &doc, clamp)?;
    Ok((loaded, bytes))
}

/// One outcome assignment and its probability, as an exact fraction string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub assignment: Vec<i8>,
    pub prob: String,
}

/// A joint distribution over named dichotomic variables. Files may list any
/// subset of assignments (unlisted atoms have probability zero); emitted
/// couplings enumerate all of them, first variable most significant and +1
/// before -1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingDoc {
    pub variables: Vec<String>,
    pub atoms: Vec<AtomDoc>,
}

impl CouplingDoc {
    pub fn from_joint(joint: &JointDistribution) -> Self {
        let k = joint.variables().len();
        let atoms = (0..joint.probs().len())
            .map(|atom| AtomDoc {
                assignment: (0..k).map(|var| joint.sign(atom, var)).collect(),
                prob: format_fraction(&joint.probs()[atom]),
            })
            .collect();
        CouplingDoc {
            variables: joint.variables().to_vec(),
            atoms,
        }
    }

    pub fn to_joint(&self, path: &Path) -> Result<JointDistribution, CliError> {
        let invalid = |message: String| CliError::Parse {
            path: path.display().to_string(),
            message,
        };
        let k = self.variables.len();
        if k == 0 || k > MAX_COUPLING_VARIABLES {
            return Err(invalid(format!(
                "couplings need between 1 and {MAX_COUPLING_VARIABLES} variables, got {k}"
            )));
        }
        let mut probs = vec![Rational::zero(); 1usize << k];
        let mut seen = vec![false; probs.len()];
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.assignment.len() != k {
                return Err(invalid(format!(
                    "atoms[{i}] assigns {} variables, expected {k}",
                    atom.assignment.len()
                )));
            }
            let mut index = 0usize;
            for &sign in &atom.assignment {
                index <<= 1;
                match sign {
                    1 => {}
                    -1 => index |= 1,
                    other => {
                        return Err(invalid(format!(
                            "atoms[{i}] contains outcome {other}, expected 1 or -1"
                        )))
                    }
                }
            }
            if seen[index] {
                return Err(invalid(format!("atoms[{i}] repeats an earlier assignment")));
            }
            seen[index] = true;
            probs[index] = parse_fraction(&atom.prob)
                .map_err(|err| invalid(format!("atoms[{i}].prob {:?}: {err}", atom.prob)))?;
        }
        JointDistribution::new(self.variables.clone(), probs)
            .map_err(|err| invalid(err.to_string()))
    }
}

pub fn load_coupling(path: &Path) -> Result<(JointDistribution, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let doc: CouplingDoc = serde_json::from_slice(&bytes).map_err(|err| CliError::Parse {
        path: path.display().to_string(),
        message: err.to_string(),
    })?;
    Ok((doc.to_joint(path)?, bytes))
}

/// Expected variable names of a rank-n maximal coupling.
pub fn expected_variables(rank: usize) -> Vec<String> {
    coupling_variable_names(rank)
}

#[derive(Debug, Deserialize)]
struct RecordRow {
    replication: u32,
    context: usize,
    outcome_first: i8,
    outcome_second: i8,
}

/// Reads trial records from CSV with the header
/// `replication,context,outcome_first,outcome_second`; the context column is
/// the 1-based cycle index and outcomes are +-1.
pub fn read_records(path: &Path) -> Result<(TrialRecords, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let parse_err = |message: String| CliError::Parse {
        path: path.display().to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut rows = Vec::new();
    for (i, row) in reader.deserialize::<RecordRow>().enumerate() {
        let row = row.map_err(|err| parse_err(err.to_string()))?;
        if row.context == 0 {
            return Err(parse_err(format!(
                "record {}: context indices are 1-based",
                i + 1
            )));
        }
        rows.push(TrialRow {
            replication: row.replication,
            context: row.context - 1,
            first: row.outcome_first,
            second: row.outcome_second,
        });
    }
    let records = TrialRecords::new(rows).map_err(|err| parse_err(err.to_string()))?;
    Ok((records, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cyccon_core::coupling::max_pair_coupling;
    use cyccon_core::rational::{rat, rat_int};
    use std::io::Write;

    fn temp_json(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file
    }

    #[test]
    fn number_literals_cover_strings_fractions_and_numbers() {
        let cases = [
            (NumberLit::Text("-0.805".into()), rat(-805, 1000)),
            (NumberLit::Text("3/16".into()), rat(3, 16)),
            (NumberLit::Text("1e-2".into()), rat(1, 100)),
            (NumberLit::Number(0.5), rat(1, 2)),
            (NumberLit::Number(-1.0), rat_int(-1)),
        ];
        for (lit, expected) in cases {
            assert_eq!(lit.to_rational().unwrap(), expected);
        }
        assert!(NumberLit::Text("abc".into()).to_rational().is_err());
    }

    #[test]
    fn system_documents_build_with_reoriented_standard_errors() {
        let file = temp_json(
            r#"{
              "properties": ["b", "a", "c"],
              "contexts": [["a", "b"], ["b", "c"], ["c", "a"]],
              "moments": [
                {"context": ["b", "a"], "e_first": "0.5", "e_second": 0.25,
                 "corr": "0.125", "se_first": "0.02", "se_second": "0.01", "se_corr": "0.03"},
                {"context": ["b", "c"], "e_first": "0.5", "e_second": "0",
                 "corr": "-0.25", "se_first": "0.02", "se_second": "0.04", "se_corr": "0.05"},
                {"context": ["c", "a"], "e_first": "0", "e_second": "0.25",
                 "corr": "0.75", "se_first": "0.04", "se_second": "0.01", "se_corr": "0.06"}
              ],
              "df": 9
            }"#,
        );
        let (loaded, _) = load_system(file.path(), false).unwrap();
        assert_eq!(loaded.system.labels(), ["a", "b", "c"]);
        assert_eq!(loaded.df, Some(9));
        let ses = loaded.ses.unwrap();
        assert_eq!(ses[0].se_own, rat(1, 100));
        assert_eq!(ses[0].se_next, rat(2, 100));
        assert_eq!(ses[1].se_corr, rat(5, 100));
        assert_eq!(ses[2].se_own, rat(4, 100));
        assert_eq!(ses[2].se_next, rat(1, 100));
    }

    #[test]
    fn incomplete_standard_errors_are_rejected() {
        let file = temp_json(
            r#"{
              "properties": ["a", "b"],
              "contexts": [["a", "b"], ["a", "b"]],
              "moments": [
                {"context": ["a", "b"], "e_first": 0, "e_second": 0, "corr": 0, "se_first": 0.1},
                {"context": ["a", "b"], "e_first": 0, "e_second": 0, "corr": 0}
              ]
            }"#,
        );
        let err = load_system(file.path(), false).unwrap_err();
        assert!(err.to_string().contains("every moment"), "{err}");
    }

    #[test]
    fn coupling_documents_round_trip() {
        let joint = max_pair_coupling(&rat(1, 4), &rat(-1, 2)).unwrap();
        let doc = CouplingDoc::from_joint(&joint);
        assert_eq!(doc.variables, ["A", "B"]);
        assert_eq!(doc.atoms.len(), 4);
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: CouplingDoc = serde_json::from_str(&text).unwrap();
        let back = parsed.to_joint(Path::new("rt.json")).unwrap();
        assert_eq!(back, joint);
    }

    #[test]
    fn sparse_coupling_files_fill_missing_atoms_with_zero() {
        let doc: CouplingDoc = serde_json::from_str(
            r#"{"variables": ["X", "Y"],
                "atoms": [{"assignment": [1, 1], "prob": "1/2"},
                          {"assignment": [-1, -1], "prob": "1/2"}]}"#,
        )
        .unwrap();
        let joint = doc.to_joint(Path::new("sparse.json")).unwrap();
        assert_eq!(joint.pair_expectation(0, 1), rat_int(1));
        assert_eq!(joint.probs()[1], rat_int(0));
    }

    #[test]
    fn coupling_rejects_repeated_and_malformed_atoms() {
        let repeated: CouplingDoc = serde_json::from_str(
            r#"{"variables": ["X", "Y"],
                "atoms": [{"assignment": [1, 1], "prob": "1/2"},
                          {"assignment": [1, 1], "prob": "1/2"}]}"#,
        )
        .unwrap();
        assert!(repeated.to_joint(Path::new("x.json")).is_err());

        let zero_outcome: CouplingDoc = serde_json::from_str(
            r#"{"variables": ["X"], "atoms": [{"assignment": [0], "prob": "1"}]}"#,
        )
        .unwrap();
        assert!(zero_outcome.to_joint(Path::new("x.json")).is_err());
    }

    #[test]
    fn records_parse_and_reject_zero_context() {
        let mut file = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        writeln!(file, "replication,context,outcome_first,outcome_second").unwrap();
        writeln!(file, "1,1,1,-1").unwrap();
        writeln!(file, "1,2,-1,-1").unwrap();
        writeln!(file, "2,1,1,1").unwrap();
        writeln!(file, "2,2,1,-1").unwrap();
        let (records, _) = read_records(file.path()).unwrap();
        assert_eq!(records.rank(), 2);
        assert_eq!(records.rows()[0].context, 0);

        let mut bad = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        writeln!(bad, "replication,context,outcome_first,outcome_second").unwrap();
        writeln!(bad, "1,0,1,1").unwrap();
        let err = read_records(bad.path()).unwrap_err();
        assert!(err.to_string().contains("1-based"), "{err}");
    }
}
