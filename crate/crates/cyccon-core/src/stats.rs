//! Conservative statistics for replicated trial data.
//!
//! Trial records are reduced context by context: each replication yields one
//! mean per moment, the replication means give the point estimate, their
//! sample standard deviation over sqrt(k) gives the standard error, and the
//! degrees of freedom are k - 1. Confidence half-widths use Student
//! t-quantiles (or a caller-supplied multiplier), Bonferroni-corrected across
//! all simultaneous moment intervals, producing a [`MomentBox`] whose
//! coverage statement is conservative by construction.
//!
//! The t-distribution tail is computed from the regularized incomplete beta
//! function (continued fraction, modified Lentz iteration) and inverted by
//! bisection. This is the only floating-point corner of the crate; points
//! and standard errors stay rational.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::model::{ContextMoments, CyclicSystem};
use crate::rational::{from_f64_shortest, rat, rat_int, sqrt_approx, to_f64, Rational};
use crate::sfunc::{IntervalBox, SFuncError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatsError {
    NoRows,
    /// Outcome other than -1 or +1 at this row.
    BadOutcome {
        row: usize,
    },
    TooFewReplications {
        context: usize,
        replications: usize,
    },
    LengthMismatch {
        corrs: usize,
        deltas: usize,
    },
    ZeroVariance,
    Domain(&'static str),
    Range(SFuncError),
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::NoRows => write!(f, "no trial rows supplied"),
            StatsError::BadOutcome { row } => {
                write!(f, "row {row} has an outcome other than -1 or +1")
            }
            StatsError::TooFewReplications {
                context,
                replications,
            } => write!(
                f,
                "context {context} has {replications} replications, need at least 2"
            ),
            StatsError::LengthMismatch { corrs, deltas } => {
                write!(f, "{corrs} correlation terms but {deltas} difference terms")
            }
            StatsError::ZeroVariance => {
                write!(f, "both standard errors are zero; t statistic is undefined")
            }
            StatsError::Domain(what) => write!(f, "argument out of domain: {what}"),
            StatsError::Range(e) => write!(f, "range computation failed: {e}"),
        }
    }
}

impl core::error::Error for StatsError {}

impl From<SFuncError> for StatsError {
    fn from(e: SFuncError) -> Self {
        StatsError::Range(e)
    }
}

/// One joint trial of a two-property context. Context indices are 0-based
/// positions in cycle order; `first` is the outcome of the context's own
/// property q_i, `second` of its successor q_{i+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRow {
    pub replication: u32,
    pub context: usize,
    pub first: i8,
    pub second: i8,
}

/// Validated trial rows; rank is inferred from the largest context index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecords {
    rank: usize,
    rows: Vec<TrialRow>,
}

impl TrialRecords {
    pub fn new(rows: Vec<TrialRow>) -> Result<Self, StatsError> {
        if rows.is_empty() {
            return Err(StatsError::NoRows);
        }
        for (i, row) in rows.iter().enumerate() {
            let ok = |v: i8| v == 1 || v == -1;
            if !ok(row.first) || !ok(row.second) {
                return Err(StatsError::BadOutcome { row: i });
            }
        }
        let rank = rows.iter().map(|r| r.context).max().expect("nonempty") + 1;
        Ok(TrialRecords { rank, rows })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> &[TrialRow] {
        &self.rows
    }
}

/// A point estimate with its standard error and degrees of freedom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatedMoment {
    pub point: Rational,
    pub se: Rational,
    pub df: u32,
}

impl EstimatedMoment {
    pub fn new(point: Rational, se: Rational, df: u32) -> Self {
        EstimatedMoment { point, se, df }
    }
}

/// The three estimated moments of one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextEstimates {
    pub e_first: EstimatedMoment,
    pub e_second: EstimatedMoment,
    pub corr: EstimatedMoment,
}

/// Per-context moment estimation: replication means first, then mean,
/// standard error sd/sqrt(k), and df = k - 1 across the k replication means.
/// Points are exact rationals; standard errors are rational square-root
/// approximations at 12 decimal digits (exact when the radicand is a perfect
/// square).
pub fn estimate_moments(records: &TrialRecords) -> Result<Vec<ContextEstimates>, StatsError> {
    let mut grouped: Vec<BTreeMap<u32, Vec<(i8, i8)>>> = Vec::new();
    grouped.resize_with(records.rank(), BTreeMap::new);
    for row in records.rows() {
        grouped[row.context]
            .entry(row.replication)
            .or_default()
            .push((row.first, row.second));
    }

    let mut out = Vec::with_capacity(records.rank());
    for (context, replications) in grouped.iter().enumerate() {
        if replications.len() < 2 {
            return Err(StatsError::TooFewReplications {
                context,
                replications: replications.len(),
            });
        }
        let mut means: [Vec<Rational>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for trials in replications.values() {
            let count = Rational::from_integer((trials.len() as u64).into());
            let mut sums = [0i64; 3];
            for &(a, b) in trials {
                sums[0] += a as i64;
                sums[1] += b as i64;
                sums[2] += (a as i64) * (b as i64);
            }
            for (slot, sum) in means.iter_mut().zip(sums) {
                slot.push(Rational::from_integer(sum.into()) / &count);
            }
        }
        let k = replications.len() as u32;
        let mut moments = means.iter().map(|m| summarize(m, k));
        out.push(ContextEstimates {
            e_first: moments.next().expect("three moments"),
            e_second: moments.next().expect("three moments"),
            corr: moments.next().expect("three moments"),
        });
    }
    Ok(out)
}

fn summarize(replication_means: &[Rational], k: u32) -> EstimatedMoment {
    let count = Rational::from_integer(k.into());
    let point: Rational = replication_means.iter().sum::<Rational>() / &count;
    let ss: Rational = replication_means
        .iter()
        .map(|m| {
            let d = m - &point;
            &d * &d
        })
        .sum();
    let variance = ss / Rational::from_integer((k - 1).into());
    let se = sqrt_approx(&(variance / &count), 12);
    EstimatedMoment {
        point,
        se,
        df: k - 1,
    }
}

/// Student t cumulative distribution function.
pub fn t_cdf(t: f64, df: u32) -> f64 {
    if t >= 0.0 {
        1.0 - t_upper_tail(t, df)
    } else {
        t_upper_tail(-t, df)
    }
}

/// P(T > t) for t >= 0, computed directly so extreme tails keep relative
/// accuracy.
fn t_upper_tail(t: f64, df: u32) -> f64 {
    debug_assert!(t >= 0.0);
    let nu = df as f64;
    let x = nu / (nu + t * t);
    0.5 * reg_inc_beta(0.5 * nu, 0.5, x)
}

/// Quantile of the Student t distribution by bisection on the tail, to
/// absolute accuracy 1e-6.
pub fn t_quantile(p: f64, df: u32) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::Domain("degrees of freedom must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::Domain(
            "probability must lie strictly between 0 and 1",
        ));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p < 0.5 {
        return Ok(-t_quantile(1.0 - p, df)?);
    }
    let target = 1.0 - p;
    let mut hi = 1.0f64;
    let mut guard = 0;
    while t_upper_tail(hi, df) > target {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(StatsError::Domain("quantile out of representable range"));
        }
    }
    let mut lo = 0.0f64;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if t_upper_tail(mid, df) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-sample t comparison of independent estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: u32,
    /// |t| exceeds the two-sided 1% critical value.
    pub significant_1_percent: bool,
    /// |t| exceeds the two-sided 0.1% critical value.
    pub significant_01_percent: bool,
}

/// t = (a - b) / sqrt(se_a^2 + se_b^2), with two-sided significance verdicts
/// at the 1% and 0.1% levels for the given degrees of freedom.
pub fn two_sample_t(
    a: &EstimatedMoment,
    b: &EstimatedMoment,
    df: u32,
) -> Result<TTest, StatsError> {
    let var = &a.se * &a.se + &b.se * &b.se;
    if var.is_zero() {
        return Err(StatsError::ZeroVariance);
    }
    let t = to_f64(&(&a.point - &b.point)) / libm::sqrt(to_f64(&var));
    let crit_1 = t_quantile(1.0 - 0.01 / 2.0, df)?;
    let crit_01 = t_quantile(1.0 - 0.001 / 2.0, df)?;
    Ok(TTest {
        t,
        df,
        significant_1_percent: libm::fabs(t) > crit_1,
        significant_01_percent: libm::fabs(t) > crit_01,
    })
}

/// Simultaneous confidence intervals for n correlations and n connection
/// differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentBox {
    corr: Vec<(Rational, Rational)>,
    delta: Vec<(Rational, Rational)>,
}

impl MomentBox {
    pub fn new(
        corr: Vec<(Rational, Rational)>,
        delta: Vec<(Rational, Rational)>,
    ) -> Result<Self, StatsError> {
        if corr.len() != delta.len() {
            return Err(StatsError::LengthMismatch {
                corrs: corr.len(),
                deltas: delta.len(),
            });
        }
        if corr.is_empty() {
            return Err(StatsError::NoRows);
        }
        Ok(MomentBox { corr, delta })
    }

    pub fn rank(&self) -> usize {
        self.corr.len()
    }

    pub fn corr_intervals(&self) -> &[(Rational, Rational)] {
        &self.corr
    }

    pub fn delta_intervals(&self) -> &[(Rational, Rational)] {
        &self.delta
    }

    pub fn corr_box(&self) -> Result<IntervalBox, SFuncError> {
        IntervalBox::new(self.corr.clone())
    }

    /// Interval of |Delta_i| induced by each signed interval: the distance
    /// from 0 to the interval up to the larger endpoint magnitude.
    pub fn abs_delta_intervals(&self) -> Vec<(Rational, Rational)> {
        self.delta
            .iter()
            .map(|(lo, hi)| {
                let low = if !lo.is_positive() && !hi.is_negative() {
                    Rational::zero()
                } else {
                    lo.abs().min(hi.abs())
                };
                (low, lo.abs().max(hi.abs()))
            })
            .collect()
    }
}

/// Builds a [`MomentBox`] with per-term half-width q * se, where q is either
/// the supplied multiplier or the Bonferroni-corrected t-quantile
/// t(1 - alpha/(2n), df) with each term's own df.
pub fn conservative_box(
    corr: &[EstimatedMoment],
    delta: &[EstimatedMoment],
    alpha: &Rational,
    factor_override: Option<&Rational>,
) -> Result<MomentBox, StatsError> {
    if corr.len() != delta.len() {
        return Err(StatsError::LengthMismatch {
            corrs: corr.len(),
            deltas: delta.len(),
        });
    }
    if corr.is_empty() {
        return Err(StatsError::NoRows);
    }
    if let Some(factor) = factor_override {
        if !factor.is_positive() {
            return Err(StatsError::Domain("interval multiplier must be positive"));
        }
    } else if !alpha.is_positive() || *alpha >= rat_int(1) {
        return Err(StatsError::Domain(
            "alpha must lie strictly between 0 and 1",
        ));
    }

    let n = corr.len();
    let mut quantiles: BTreeMap<u32, Rational> = BTreeMap::new();
    let mut interval = |m: &EstimatedMoment| -> Result<(Rational, Rational), StatsError> {
        let q = match factor_override {
            Some(factor) => factor.clone(),
            None => match quantiles.get(&m.df) {
                Some(q) => q.clone(),
                None => {
                    let p = rat_int(1) - alpha / rat_int(2 * n as i64);
                    let q = from_f64_shortest(t_quantile(to_f64(&p), m.df)?)
                        .map_err(|_| StatsError::Domain("t quantile is not finite"))?;
                    quantiles.insert(m.df, q.clone());
                    q
                }
            },
        };
        let half = &q * &m.se;
        Ok((&m.point - &half, &m.point + half))
    };
    let corr_intervals = corr
        .iter()
        .map(&mut interval)
        .collect::<Result<Vec<_>, _>>()?;
    let delta_intervals = delta
        .iter()
        .map(&mut interval)
        .collect::<Result<Vec<_>, _>>()?;
    MomentBox::new(corr_intervals, delta_intervals)
}

/// The embedded reference dataset: a rank-5 cyclic system measured in 20
/// replications (df 19), with published correlations, connection
/// differences, and the marginal pairs behind connections 1 and 4 (0-based
/// 0 and 3). Standard errors of the correlation and difference terms are the
/// published half-widths divided by the published multiplier 14.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceDataset {
    pub corr: Vec<EstimatedMoment>,
    pub delta: Vec<EstimatedMoment>,
    /// (context index, own-context estimate, previous-context estimate) for
    /// the connections whose raw marginals are available.
    pub marginal_pairs: Vec<(usize, EstimatedMoment, EstimatedMoment)>,
    pub df: u32,
}

pub fn lapkiewicz_dataset() -> ReferenceDataset {
    let df = 19;
    let m = |point: Rational, half: Rational| EstimatedMoment {
        point,
        se: half / rat_int(14),
        df,
    };
    let corr = alloc::vec![
        m(rat(-805, 1000), rat(28, 1000)),
        m(rat(-804, 1000), rat(42, 1000)),
        m(rat(-709, 1000), rat(42, 1000)),
        m(rat(-810, 1000), rat(28, 1000)),
        m(rat(-766, 1000), rat(28, 1000)),
    ];
    let delta = alloc::vec![
        m(rat(-36, 1000), rat(101, 1000)),
        m(rat(-4, 1000), rat(140, 1000)),
        m(rat(6, 1000), rat(126, 1000)),
        m(rat(-20, 1000), rat(80, 1000)),
        m(rat(-6, 1000), rat(80, 1000)),
    ];
    let se = |point: Rational, se: Rational| EstimatedMoment { point, se, df };
    let marginal_pairs = alloc::vec![
        (
            0,
            se(rat(136, 1000), rat(6, 1000)),
            se(rat(172, 1000), rat(4, 1000)),
        ),
        (
            3,
            se(rat(122, 1000), rat(4, 1000)),
            se(rat(142, 1000), rat(4, 1000)),
        ),
    ];
    ReferenceDataset {
        corr,
        delta,
        marginal_pairs,
        df,
    }
}

/// Point-estimate system for the reference dataset. Only the marginals of
/// properties 1 and 4 were published; the remaining properties carry their
/// published difference on the own-context side and 0 on the other, which
/// preserves every delta and keeps all contexts pair-feasible.
pub fn lapkiewicz_system() -> CyclicSystem {
    let labels = alloc::vec![
        alloc::string::String::from("q1"),
        alloc::string::String::from("q2"),
        alloc::string::String::from("q3"),
        alloc::string::String::from("q4"),
        alloc::string::String::from("q5"),
    ];
    let ctx = |e_own: Rational, e_next: Rational, corr: Rational| ContextMoments {
        e_own,
        e_next,
        corr,
    };
    let contexts = alloc::vec![
        ctx(rat(136, 1000), rat_int(0), rat(-805, 1000)),
        ctx(rat(-4, 1000), rat_int(0), rat(-804, 1000)),
        ctx(rat(6, 1000), rat(142, 1000), rat(-709, 1000)),
        ctx(rat(122, 1000), rat_int(0), rat(-810, 1000)),
        ctx(rat(-6, 1000), rat(172, 1000), rat(-766, 1000)),
    ];
    CyclicSystem::new(labels, contexts).expect("embedded dataset is feasible")
}

// Regularized incomplete beta function machinery (double precision).

fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    const COF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * libm::log(tmp);
    let mut ser = 1.000000000190015;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + libm::log(2.5066282746310005 * ser / x)
}

/// I_x(a, b) via its continued fraction, switching to the complement when
/// that converges faster.
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front = libm::exp(
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * libm::log(x) + b * libm::log(1.0 - x),
    );
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta function, modified Lentz
/// iteration.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 3e-16;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if libm::fabs(d) < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn estimates_the_worked_example() {
        // Two replications of one context whose replication means for the
        // first property are 0.0 and 0.2.
        let mut rows = Vec::new();
        for (rep, first_positives) in [(1u32, 5usize), (2, 6)] {
            for t in 0..10 {
                rows.push(TrialRow {
                    replication: rep,
                    context: 0,
                    first: if t < first_positives { 1 } else { -1 },
                    second: 1,
                });
            }
        }
        let records = TrialRecords::new(rows).unwrap();
        let estimates = estimate_moments(&records).unwrap();
        let e = &estimates[0].e_first;
        assert_eq!(e.point, rat(1, 10));
        assert_eq!(e.se, rat(1, 10));
        assert_eq!(e.df, 1);
        // Constant +1 second outcomes: zero spread.
        let e2 = &estimates[0].e_second;
        assert_eq!(e2.point, rat_int(1));
        assert_eq!(e2.se, rat_int(0));
    }

    #[test]
    fn rejects_degenerate_records() {
        assert_eq!(TrialRecords::new(vec![]), Err(StatsError::NoRows));
        let bad = TrialRow {
            replication: 1,
            context: 0,
            first: 0,
            second: 1,
        };
        assert_eq!(
            TrialRecords::new(vec![bad]),
            Err(StatsError::BadOutcome { row: 0 })
        );
        let lonely = TrialRow {
            replication: 1,
            context: 0,
            first: 1,
            second: 1,
        };
        let records = TrialRecords::new(vec![lonely]).unwrap();
        assert_eq!(
            estimate_moments(&records),
            Err(StatsError::TooFewReplications {
                context: 0,
                replications: 1
            })
        );
    }

    #[test]
    fn t_quantile_matches_known_values() {
        assert_eq!(t_quantile(0.5, 7).unwrap(), 0.0);
        // Standard two-sided critical values for df = 19.
        let q = t_quantile(1.0 - 0.001 / 2.0, 19).unwrap();
        assert!((q - 3.883).abs() < 2e-3, "got {q}");
        let q = t_quantile(1.0 - 0.01 / 2.0, 19).unwrap();
        assert!((q - 2.861).abs() < 2e-3, "got {q}");
        // Symmetry.
        let up = t_quantile(0.975, 12).unwrap();
        let down = t_quantile(0.025, 12).unwrap();
        assert!((up + down).abs() < 1e-9);
        // The reference multiplier stays below 14 even at the Bonferroni
        // level 1e-11.
        let q = t_quantile(1.0 - 1e-11, 19).unwrap();
        assert!(q < 14.0, "got {q}");
        assert!(q > 10.0, "got {q}");
    }

    #[test]
    fn t_quantile_rejects_bad_domain() {
        assert!(t_quantile(0.0, 5).is_err());
        assert!(t_quantile(1.0, 5).is_err());
        assert!(t_quantile(0.9, 0).is_err());
    }

    #[test]
    fn t_cdf_is_monotone_and_symmetric() {
        let mut prev = 0.0;
        for i in 0..40 {
            let t = -4.0 + 0.2 * i as f64;
            let c = t_cdf(t, 9);
            assert!(c >= prev);
            prev = c;
            let mirror = t_cdf(-t, 9);
            assert!((c + mirror - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_sample_matches_reference_connections() {
        let data = lapkiewicz_dataset();
        let (_, own1, prev1) = &data.marginal_pairs[0];
        let test1 = two_sample_t(own1, prev1, 19).unwrap();
        assert!((test1.t + 4.992).abs() < 1e-2, "got {}", test1.t);
        assert!(test1.significant_01_percent);
        assert!(test1.significant_1_percent);

        let (_, own4, prev4) = &data.marginal_pairs[1];
        let test4 = two_sample_t(own4, prev4, 19).unwrap();
        assert!((test4.t + 3.536).abs() < 1e-2, "got {}", test4.t);
        assert!(!test4.significant_01_percent);
        assert!(test4.significant_1_percent);
    }

    #[test]
    fn two_sample_requires_spread() {
        let a = EstimatedMoment::new(rat(1, 2), rat_int(0), 9);
        let b = EstimatedMoment::new(rat(1, 3), rat_int(0), 9);
        assert_eq!(two_sample_t(&a, &b, 9), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn factor_mode_reproduces_reference_half_widths() {
        let data = lapkiewicz_dataset();
        let bx =
            conservative_box(&data.corr, &data.delta, &rat(1, 10), Some(&rat_int(14))).unwrap();
        assert_eq!(bx.corr_intervals()[0], (rat(-833, 1000), rat(-777, 1000)));
        assert_eq!(bx.corr_intervals()[2], (rat(-751, 1000), rat(-667, 1000)));
        assert_eq!(bx.delta_intervals()[0], (rat(-137, 1000), rat(65, 1000)));
        let abs = bx.abs_delta_intervals();
        assert_eq!(abs[0], (rat_int(0), rat(137, 1000)));
        let total: Rational = abs.iter().map(|(_, hi)| hi.clone()).sum();
        assert_eq!(total, rat(599, 1000));
    }

    #[test]
    fn quantile_mode_stays_below_the_reference_multiplier() {
        let data = lapkiewicz_dataset();
        let alpha = Rational::new(1.into(), num_bigint::BigInt::from(10u64).pow(10));
        let bx = conservative_box(&data.corr, &data.delta, &alpha, None).unwrap();
        let fourteen =
            conservative_box(&data.corr, &data.delta, &alpha, Some(&rat_int(14))).unwrap();
        for (tight, wide) in bx.corr_intervals().iter().zip(fourteen.corr_intervals()) {
            assert!(tight.0 > wide.0 && tight.1 < wide.1);
        }
    }

    #[test]
    fn embedded_system_matches_dataset_deltas() {
        let sys = lapkiewicz_system();
        let data = lapkiewicz_dataset();
        assert_eq!(sys.rank(), 5);
        for (i, d) in sys.deltas().into_iter().enumerate() {
            assert_eq!(d, data.delta[i].point, "delta {i}");
        }
        for (i, c) in sys.corrs().into_iter().enumerate() {
            assert_eq!(c, data.corr[i].point, "corr {i}");
        }
    }
}
