//! One function per subcommand. Each returns the JSON report for standard
//! output, a one-line human summary for standard error, and the process
//! exit code; hard failures become [`CliError`] instead.

use std::path::{Path, PathBuf};

use cyccon_core::coupling::{maximal_coupling, CouplingError};
use cyccon_core::criterion::{
    check_consistent, check_kcbs, check_main, check_necessary, interval_verdict, kcbs_system,
    CriterionError, Verdict,
};
use cyccon_core::model::{decompose_cycles, pair_correlation_bounds, CyclicSystem, SystemLayout};
use cyccon_core::oracle::{feasible, feasible_traditional, OracleOutcome};
use cyccon_core::rational::{format_fraction, parse_fraction, rat, rat_int, sqrt_approx, Rational};
use cyccon_core::sfunc::RangeMode;
use cyccon_core::stats::{
    conservative_box, estimate_moments, lapkiewicz_dataset, lapkiewicz_system, two_sample_t,
    EstimatedMoment, StatsError,
};
use serde::Serialize;

use crate::error::CliError;
use crate::formats::{self, CouplingDoc, LoadedSystem};
use crate::render::Render;
use crate::report::{
    witness_signs, AnalyzeReport, CheckReport, CoupleReport, DecomposeReport, InfeasibilityDoc,
    IntervalDoc, MomentMismatchDoc, OracleReport, ReportHeader, TTestDoc, VerdictDoc, VerifyReport,
};
use crate::{EXIT_CONTEXTUAL, EXIT_DISAGREEMENT, EXIT_INPUT_ERROR, EXIT_OK};

/// What a finished command hands back to `main`.
#[derive(Debug)]
pub struct CommandOutput {
    pub stdout: String,
    pub summary: String,
    pub code: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Main,
    Consistent,
    Necessary,
    Kcbs,
}

fn finish<T: Serialize>(report: &T, summary: String, code: i32) -> CommandOutput {
    let mut stdout =
        serde_json::to_string_pretty(report).expect("reports are plain trees of strings");
    stdout.push('\n');
    CommandOutput {
        stdout,
        summary,
        code,
    }
}

fn precondition(err: impl std::fmt::Display) -> CliError {
    CliError::Precondition(err.to_string())
}

fn clamp_warnings(loaded: &LoadedSystem, render: Render) -> Vec<String> {
    loaded
        .clamped
        .iter()
        .map(|note| {
            format!(
                "context {}: correlation {} lies outside its feasible range, clamped to {}",
                note.context + 1,
                render.num(&note.original),
                render.num(&note.clamped)
            )
        })
        .collect()
}

fn verdict_summary(verdict: &Verdict, render: Render) -> String {
    let status = if verdict.contextual {
        "contextual"
    } else if verdict.inconclusive {
        "inconclusive"
    } else {
        "noncontextual"
    };
    let relation = if verdict.contextual { ">" } else { "<=" };
    format!(
        "{status}: {} criterion value {} {relation} bound {}",
        verdict.kind,
        render.num(&verdict.lhs),
        render.num(&verdict.bound)
    )
}

pub fn cmd_check(
    system: &Path,
    kind: CheckKind,
    clamp: bool,
    render: Render,
) -> Result<CommandOutput, CliError> {
    let (loaded, bytes) = formats::load_system(system, clamp)?;
    let warnings = clamp_warnings(&loaded, render);
    let verdict = run_criterion(&loaded.system, kind)?;
    let code = if verdict.contextual {
        EXIT_CONTEXTUAL
    } else {
        EXIT_OK
    };
    let summary = verdict_summary(&verdict, render);
    let report = CheckReport {
        header: ReportHeader::new("check", &[&bytes], warnings),
        verdicts: vec![VerdictDoc::new(&verdict, render)],
    };
    Ok(finish(&report, summary, code))
}

fn run_criterion(sys: &CyclicSystem, kind: CheckKind) -> Result<Verdict, CliError> {
    match kind {
        CheckKind::Main => Ok(check_main(sys)),
        CheckKind::Necessary => Ok(check_necessary(sys)),
        CheckKind::Consistent => check_consistent(sys).map_err(precondition),
        CheckKind::Kcbs => kcbs_verdict(sys),
    }
}

/// Reads the system back as five pairwise-exclusive event probabilities
/// p_i = (1 + e_own(i)) / 2 and requires the moments to match that form
/// exactly before running the summed-probability test.
fn kcbs_verdict(sys: &CyclicSystem) -> Result<Verdict, CliError> {
    let probabilities: Vec<Rational> = sys
        .contexts()
        .iter()
        .map(|ctx| (rat_int(1) + &ctx.e_own) / rat_int(2))
        .collect();
    let verdict = check_kcbs(&probabilities).map_err(precondition)?;
    let induced = kcbs_system(&probabilities).map_err(precondition)?;
    if induced.contexts() != sys.contexts() {
        return Err(CliError::Precondition(String::from(
            "system is not in exclusive-event form: each context must satisfy \
             e_next(i) = e_own(i+1) and corr(i) = 1 - 2 (p_i + p_{i+1})",
        )));
    }
    Ok(verdict)
}

pub fn cmd_couple(
    system: &Path,
    out: Option<&Path>,
    clamp: bool,
    render: Render,
) -> Result<CommandOutput, CliError> {
    let (loaded, bytes) = formats::load_system(system, clamp)?;
    let warnings = clamp_warnings(&loaded, render);
    let header = ReportHeader::new("couple", &[&bytes], warnings);
    match maximal_coupling(&loaded.system) {
        Ok(coupling) => {
            let agreement_probabilities = (0..coupling.rank())
                .map(|i| render.num(&coupling.agreement_probability(i)))
                .collect();
            let doc = CouplingDoc::from_joint(coupling.joint());
            let variables = doc.variables.len();
            let atoms = doc.atoms.len();
            let (coupling_file, coupling) = match out {
                Some(path) => {
                    let mut text = serde_json::to_string_pretty(&doc)
                        .expect("coupling documents are plain trees of strings");
                    text.push('\n');
                    std::fs::write(path, text).map_err(|source| CliError::Write {
                        path: path.display().to_string(),
                        source,
                    })?;
                    (Some(path.display().to_string()), None)
                }
                None => (None, Some(doc)),
            };
            let summary = format!(
                "feasible: maximal coupling over {variables} variables ({atoms} atoms) to {}",
                coupling_file.as_deref().unwrap_or("standard output")
            );
            let report = CoupleReport {
                header,
                feasible: true,
                coupling_file,
                coupling,
                agreement_probabilities,
                infeasibility: None,
            };
            Ok(finish(&report, summary, EXIT_OK))
        }
        Err(CouplingError::InfeasibleCycle {
            lhs,
            bound,
            witness,
        }) => {
            let report = CoupleReport {
                header,
                feasible: false,
                coupling_file: None,
                coupling: None,
                agreement_probabilities: Vec::new(),
                infeasibility: Some(InfeasibilityDoc {
                    lhs: render.num(&lhs),
                    bound: render.num(&bound),
                    witness: witness_signs(&witness),
                }),
            };
            let summary = format!(
                "contextual: no maximal coupling exists, signed sum {} exceeds bound {}",
                render.num(&lhs),
                render.num(&bound)
            );
            Ok(finish(&report, summary, EXIT_CONTEXTUAL))
        }
        Err(err @ CouplingError::TooManyVariables { .. }) => Err(precondition(err)),
        Err(err) => Err(CliError::Invalid(err.to_string())),
    }
}

pub fn cmd_verify(
    coupling: &Path,
    system: &Path,
    clamp: bool,
    render: Render,
) -> Result<CommandOutput, CliError> {
    let (joint, coupling_bytes) = formats::load_coupling(coupling)?;
    let (loaded, system_bytes) = formats::load_system(system, clamp)?;
    let warnings = clamp_warnings(&loaded, render);
    let sys = &loaded.system;
    let n = sys.rank();
    let names = formats::expected_variables(n);

    let mut mismatches = Vec::new();
    if joint.variables() != names.as_slice() {
        mismatches.push(MomentMismatchDoc {
            moment: String::from("variables"),
            expected: format!("{names:?}"),
            got: format!("{:?}", joint.variables()),
        });
    } else {
        let mut compare = |moment: String, expected: &Rational, got: Rational| {
            if *expected != got {
                mismatches.push(MomentMismatchDoc {
                    moment,
                    expected: render.num(expected),
                    got: render.num(&got),
                });
            }
        };
        for i in 0..n {
            let ctx = &sys.contexts()[i];
            compare(
                format!("<{}>", names[2 * i]),
                &ctx.e_own,
                joint.expectation(2 * i),
            );
            compare(
                format!("<{}>", names[2 * i + 1]),
                &ctx.e_next,
                joint.expectation(2 * i + 1),
            );
            compare(
                format!("<{} {}>", names[2 * i], names[2 * i + 1]),
                &ctx.corr,
                joint.pair_expectation(2 * i, 2 * i + 1),
            );
            let next = (i + 1) % n;
            compare(
                format!("<{} {}>", names[2 * i + 1], names[2 * next]),
                &sys.max_equal_corr(next),
                joint.pair_expectation(2 * i + 1, 2 * next),
            );
        }
    }

    let ok = mismatches.is_empty();
    let summary = if ok {
        String::from("ok: coupling reproduces every context moment and maximal agreement")
    } else {
        format!("{} moment mismatch(es)", mismatches.len())
    };
    let code = if ok { EXIT_OK } else { EXIT_INPUT_ERROR };
    let report = VerifyReport {
        header: ReportHeader::new("verify", &[&coupling_bytes, &system_bytes], warnings),
        ok,
        mismatches,
    };
    Ok(finish(&report, summary, code))
}

pub fn cmd_oracle(
    system: &Path,
    traditional: bool,
    force: bool,
    clamp: bool,
    render: Render,
) -> Result<CommandOutput, CliError> {
    let (loaded, bytes) = formats::load_system(system, clamp)?;
    let mut warnings = clamp_warnings(&loaded, render);
    let sys = &loaded.system;

    let outcome = if traditional {
        feasible_traditional(sys, force)
    } else {
        feasible(sys)
    }
    .map_err(precondition)?;
    let oracle_feasible = matches!(outcome, OracleOutcome::Feasible(_));
    let (certificate, certificate_gap) = match &outcome {
        OracleOutcome::Infeasible(cert) => (
            Some(render.all(&cert.coefficients)),
            Some(render.num(&cert.gap)),
        ),
        OracleOutcome::Feasible(_) => (None, None),
    };

    let (mode, criterion_verdict, expected_feasible) = if traditional {
        if sys.is_consistently_connected() {
            let verdict = check_consistent(sys).expect("consistently connected system");
            let expected = !verdict.contextual;
            ("traditional", Some(verdict), expected)
        } else {
            warnings.push(String::from(
                "marginals differ within a connection, so equality with probability 1 is \
                 impossible; the forced run must come back infeasible",
            ));
            ("traditional", None, false)
        }
    } else {
        let verdict = check_main(sys);
        let expected = !verdict.contextual;
        ("maximal", Some(verdict), expected)
    };

    let agree = oracle_feasible == expected_feasible;
    let agreement = if agree { "AGREE" } else { "DISAGREE" };
    let code = if !agree {
        EXIT_DISAGREEMENT
    } else if oracle_feasible {
        EXIT_OK
    } else {
        EXIT_CONTEXTUAL
    };
    let oracle_word = if oracle_feasible {
        "feasible"
    } else {
        "infeasible"
    };
    let criterion_word = match &criterion_verdict {
        Some(v) if v.contextual => "contextual",
        Some(_) => "noncontextual",
        None => "impossible by construction",
    };
    let summary = format!("oracle {oracle_word}, criterion {criterion_word}: {agreement}");
    let report = OracleReport {
        header: ReportHeader::new("oracle", &[&bytes], warnings),
        mode,
        oracle_feasible,
        certificate,
        certificate_gap,
        criterion: criterion_verdict.map(|v| VerdictDoc::new(&v, render)),
        agreement,
    };
    Ok(finish(&report, summary, code))
}

/// Where `analyze` reads its moments from.
#[derive(Debug, Clone)]
pub enum AnalyzeSource {
    /// The embedded reference experiment.
    Demo,
    /// A `.csv` trial-record file or a `.json` system document with
    /// standard errors.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub alpha: String,
    pub factor: Option<String>,
    pub grid: bool,
    pub spacing: Option<String>,
    pub clamp: bool,
}

struct AnalysisTerms {
    corr: Vec<EstimatedMoment>,
    delta: Vec<EstimatedMoment>,
    /// Per connection: 0-based index, property label if known, and the two
    /// estimates of that property with the df to test at.
    tests: Vec<(usize, Option<String>, EstimatedMoment, EstimatedMoment, u32)>,
}

/// Digest inputs, the estimated terms, and any gathering warnings.
type GatheredTerms = (Vec<Vec<u8>>, AnalysisTerms, Vec<String>);

pub fn cmd_analyze(
    source: &AnalyzeSource,
    opts: &AnalyzeOptions,
    render: Render,
) -> Result<CommandOutput, CliError> {
    let alpha = parse_fraction(&opts.alpha)
        .map_err(|err| CliError::Precondition(format!("--alpha {:?}: {err}", opts.alpha)))?;
    let factor = opts
        .factor
        .as_deref()
        .map(|s| {
            parse_fraction(s)
                .map_err(|err| CliError::Precondition(format!("--factor {s:?}: {err}")))
        })
        .transpose()?;
    if opts.spacing.is_some() && !opts.grid {
        return Err(CliError::Precondition(String::from(
            "--spacing only applies to --mode grid",
        )));
    }
    let spacing = opts
        .spacing
        .as_deref()
        .map(|s| {
            parse_fraction(s)
                .map_err(|err| CliError::Precondition(format!("--spacing {s:?}: {err}")))
        })
        .transpose()?
        .unwrap_or_else(|| rat(1, 1000));
    let (mode, mode_name) = if opts.grid {
        (RangeMode::Grid(spacing.clone()), "grid")
    } else {
        (RangeMode::Conservative, "conservative")
    };

    let (input_bytes, terms, mut warnings) = gather_terms(source, opts.clamp, render)?;
    let rank = terms.corr.len();

    let bx =
        conservative_box(&terms.corr, &terms.delta, &alpha, factor.as_ref()).map_err(|err| {
            match err {
                StatsError::Domain(_) => precondition(err),
                other => CliError::Invalid(other.to_string()),
            }
        })?;
    let verdict = interval_verdict(&bx, &mode).map_err(|err| match err {
        CriterionError::Range(_) => CliError::Precondition(format!(
            "{err}; rerun with a coarser --spacing or --mode conservative"
        )),
        other => CliError::Invalid(other.to_string()),
    })?;

    let mut consistency_tests = Vec::new();
    for (index, label, own, other, df) in &terms.tests {
        match two_sample_t(own, other, *df) {
            Ok(test) => {
                consistency_tests.push(TTestDoc::new(index + 1, label.clone(), &test, render));
            }
            Err(StatsError::ZeroVariance) => warnings.push(format!(
                "connection {}: both standard errors are zero, no consistency test",
                index + 1
            )),
            Err(other) => return Err(CliError::Invalid(other.to_string())),
        }
    }

    let interval_pairs = |pairs: &[(Rational, Rational)]| {
        pairs
            .iter()
            .map(|(lo, hi)| [render.num(lo), render.num(hi)])
            .collect::<Vec<_>>()
    };
    let code = if verdict.certified {
        EXIT_CONTEXTUAL
    } else {
        EXIT_OK
    };
    let summary = if verdict.certified {
        format!(
            "certified contextual: criterion interval [{}, {}] lies above bound {}",
            render.num(&verdict.lo),
            render.num(&verdict.hi),
            render.num(&verdict.bound)
        )
    } else {
        format!(
            "not certified: criterion interval [{}, {}] reaches the bound {}",
            render.num(&verdict.lo),
            render.num(&verdict.hi),
            render.num(&verdict.bound)
        )
    };
    let inputs: Vec<&[u8]> = input_bytes.iter().map(|b| b.as_slice()).collect();
    let report = AnalyzeReport {
        header: ReportHeader::new("analyze", &inputs, warnings),
        rank,
        mode: mode_name,
        alpha: format_fraction(&alpha),
        factor: factor.as_ref().map(format_fraction),
        spacing: opts.grid.then(|| format_fraction(&spacing)),
        corr_intervals: interval_pairs(bx.corr_intervals()),
        delta_intervals: interval_pairs(bx.delta_intervals()),
        interval: IntervalDoc::new(&verdict, render),
        consistency_tests,
    };
    Ok(finish(&report, summary, code))
}

fn gather_terms(
    source: &AnalyzeSource,
    clamp: bool,
    render: Render,
) -> Result<GatheredTerms, CliError> {
    match source {
        AnalyzeSource::Demo => {
            let ds = lapkiewicz_dataset();
            let labels = lapkiewicz_system().labels().to_vec();
            let tests = ds
                .marginal_pairs
                .iter()
                .map(|(i, own, other)| {
                    (
                        *i,
                        Some(labels[*i].clone()),
                        own.clone(),
                        other.clone(),
                        ds.df,
                    )
                })
                .collect();
            let terms = AnalysisTerms {
                corr: ds.corr,
                delta: ds.delta,
                tests,
            };
            Ok((vec![b"demo:lapkiewicz".to_vec()], terms, Vec::new()))
        }
        AnalyzeSource::File(path) => match extension(path).as_deref() {
            Some("csv") => gather_from_records(path, render),
            Some("json") => gather_from_system(path, clamp, render),
            _ => Err(CliError::Invalid(format!(
                "{}: analyze reads .csv trial records or .json system documents",
                path.display()
            ))),
        },
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
}

fn quadrature(a: &Rational, b: &Rational) -> Rational {
    sqrt_approx(&(a * a + b * b), 12)
}

fn gather_from_records(path: &Path, render: Render) -> Result<GatheredTerms, CliError> {
    let (records, bytes) = formats::read_records(path)?;
    let estimates = estimate_moments(&records)
        .map_err(|err| CliError::Invalid(format!("{}: {err}", path.display())))?;
    let n = estimates.len();
    if n < 2 {
        return Err(CliError::Invalid(format!(
            "{}: records describe a single context; cyclic analysis needs at least 2",
            path.display()
        )));
    }

    let mut warnings = Vec::new();
    for (i, est) in estimates.iter().enumerate() {
        let (lo, hi) = pair_correlation_bounds(&est.e_first.point, &est.e_second.point);
        if est.corr.point < lo || est.corr.point > hi {
            warnings.push(format!(
                "context {}: estimated correlation {} lies outside the range [{}, {}] \
                 allowed by its estimated marginals",
                i + 1,
                render.num(&est.corr.point),
                render.num(&lo),
                render.num(&hi)
            ));
        }
    }

    let corr = estimates.iter().map(|est| est.corr.clone()).collect();
    let mut delta = Vec::with_capacity(n);
    let mut tests = Vec::with_capacity(n);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let own = &estimates[i].e_first;
        let other = &estimates[prev].e_second;
        let df = own.df.min(other.df);
        delta.push(EstimatedMoment::new(
            &own.point - &other.point,
            quadrature(&own.se, &other.se),
            df,
        ));
        tests.push((i, None, own.clone(), other.clone(), df));
    }
    Ok((vec![bytes], AnalysisTerms { corr, delta, tests }, warnings))
}

fn gather_from_system(path: &Path, clamp: bool, render: Render) -> Result<GatheredTerms, CliError> {
    let (loaded, bytes) = formats::load_system(path, clamp)?;
    let ses = loaded.ses.as_ref().ok_or_else(|| {
        CliError::Invalid(format!(
            "{}: analyze needs se_first, se_second and se_corr on every moment",
            path.display()
        ))
    })?;
    let df = loaded.df.ok_or_else(|| {
        CliError::Invalid(format!(
            "{}: analyze needs a top-level \"df\" (replication count minus 1)",
            path.display()
        ))
    })?;
    if df == 0 {
        return Err(CliError::Invalid(format!(
            "{}: \"df\" must be at least 1",
            path.display()
        )));
    }
    let warnings = clamp_warnings(&loaded, render);
    let sys = &loaded.system;
    let n = sys.rank();

    let corr = (0..n)
        .map(|i| EstimatedMoment::new(sys.contexts()[i].corr.clone(), ses[i].se_corr.clone(), df))
        .collect();
    let mut delta = Vec::with_capacity(n);
    let mut tests = Vec::with_capacity(n);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let own = EstimatedMoment::new(sys.contexts()[i].e_own.clone(), ses[i].se_own.clone(), df);
        let other = EstimatedMoment::new(
            sys.contexts()[prev].e_next.clone(),
            ses[prev].se_next.clone(),
            df,
        );
        delta.push(EstimatedMoment::new(
            &own.point - &other.point,
            quadrature(&own.se, &other.se),
            df,
        ));
        tests.push((i, Some(sys.labels()[i].clone()), own, other, df));
    }
    Ok((vec![bytes], AnalysisTerms { corr, delta, tests }, warnings))
}

pub fn cmd_decompose(layout: &Path) -> Result<CommandOutput, CliError> {
    let bytes = formats::read_file(layout)?;
    let doc = formats::parse_system(layout, &bytes)?;
    let shape = SystemLayout {
        properties: doc.properties.clone(),
        contexts: doc.contexts.clone(),
    };
    let cycles = decompose_cycles(&shape).map_err(|violations| {
        let list = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        CliError::Invalid(format!("{}: {list}", layout.display()))
    })?;
    let summary = format!(
        "{} cycle(s): {}",
        cycles.len(),
        cycles
            .iter()
            .map(|c| c.join(" -> "))
            .collect::<Vec<_>>()
            .join("; ")
    );
    let report = DecomposeReport {
        header: ReportHeader::new("decompose", &[&bytes], Vec::new()),
        cycles,
    };
    Ok(finish(&report, summary, EXIT_OK))
}
