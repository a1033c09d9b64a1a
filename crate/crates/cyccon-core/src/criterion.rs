//! Decision procedures for maximally noncontextual descriptions.
//!
//! A cyclic system of rank n admits a maximally noncontextual description
//! exactly when
//!
//! ```text
//! s1(corr_1, 1 - |D_1|, corr_2, 1 - |D_2|, ..., corr_n, 1 - |D_n|) <= 2n - 2
//! ```
//!
//! where `corr_i` is the product expectation of context i and `D_i` the
//! difference between the two marginal expectations of property i. For
//! consistently connected systems (all differences zero) the condition
//! collapses to `s1(corr) <= n - 2`, and dropping the paired terms instead
//! of their exact values yields the weaker necessary test
//! `s1(corr) - sum |D_i| <= n - 2`.
//!
//! Every check returns a [`Verdict`] carrying the computed left-hand side,
//! the bound, and the maximizing sign vector, so a violation always comes
//! with the linear witness that exhibits it.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::model::{ContextMoments, CyclicSystem, ModelError};
use crate::rational::{rat_int, Rational};
use crate::sfunc::{s1_box_range, s_fast_witness, RangeMode, SFuncError, SignVector};
use crate::stats::MomentBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    Main,
    Consistent,
    Necessary,
    Kcbs,
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CriterionKind::Main => "main",
            CriterionKind::Consistent => "consistent",
            CriterionKind::Necessary => "necessary",
            CriterionKind::Kcbs => "kcbs",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionError {
    /// The consistent-case criterion was requested but these properties have
    /// differing marginal expectations across their two contexts.
    NotConsistentlyConnected {
        indices: Vec<usize>,
    },
    WrongArity {
        got: usize,
    },
    ProbabilityOutOfRange {
        index: usize,
    },
    /// Adjacent event probabilities sum above 1, violating exclusivity.
    OverlapViolation {
        index: usize,
        sum: Rational,
    },
    RankTooSmall {
        rank: usize,
    },
    Model(ModelError),
    Range(SFuncError),
}

impl fmt::Display for CriterionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionError::NotConsistentlyConnected { indices } => {
                write!(f, "system is not consistently connected at properties ")?;
                for (k, i) in indices.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{i}")?;
                }
                Ok(())
            }
            CriterionError::WrongArity { got } => {
                write!(f, "expected exactly 5 event probabilities, got {got}")
            }
            CriterionError::ProbabilityOutOfRange { index } => {
                write!(f, "probability {index} lies outside [0, 1]")
            }
            CriterionError::OverlapViolation { index, sum } => write!(
                f,
                "probabilities of adjacent events {index} and {} sum to {sum} > 1",
                (index + 1) % 5
            ),
            CriterionError::RankTooSmall { rank } => {
                write!(f, "need rank at least 2, got {rank}")
            }
            CriterionError::Model(e) => write!(f, "{e}"),
            CriterionError::Range(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CriterionError {}

impl From<SFuncError> for CriterionError {
    fn from(e: SFuncError) -> Self {
        CriterionError::Range(e)
    }
}

impl From<ModelError> for CriterionError {
    fn from(e: ModelError) -> Self {
        CriterionError::Model(e)
    }
}

/// Outcome of a criterion evaluation.
///
/// `contextual` means the left-hand side strictly exceeds the bound. For the
/// necessary-condition check a non-violation proves nothing, which
/// `inconclusive` records; for decisive criteria it is always false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: CriterionKind,
    pub lhs: Rational,
    pub bound: Rational,
    pub contextual: bool,
    pub inconclusive: bool,
    pub witness: Option<SignVector>,
    pub deltas: Vec<Rational>,
}

/// The general decision: interleaves each context correlation with the
/// maximal connection agreement `1 - |D_i|` and compares s1 of the 2n terms
/// against 2n - 2. Decisive for every cyclic system.
pub fn check_main(sys: &CyclicSystem) -> Verdict {
    let n = sys.rank();
    let corrs = sys.corrs();
    let mut args = Vec::with_capacity(2 * n);
    for (i, corr) in corrs.iter().enumerate() {
        args.push(corr.clone());
        args.push(sys.max_equal_corr(i));
    }
    let (lhs, witness) = s_fast_witness(&args, -1).expect("rank >= 2 gives arguments");
    let bound = rat_int(2 * n as i64 - 2);
    Verdict {
        kind: CriterionKind::Main,
        contextual: lhs > bound,
        inconclusive: false,
        lhs,
        bound,
        witness: Some(witness),
        deltas: sys.deltas(),
    }
}

/// The consistent-case specialization `s1(corr) <= n - 2`. Fails if any
/// property has differing marginals, since the specialization is only valid
/// for consistently connected systems.
pub fn check_consistent(sys: &CyclicSystem) -> Result<Verdict, CriterionError> {
    let deltas = sys.deltas();
    let off: Vec<usize> = deltas
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(i, _)| i)
        .collect();
    if !off.is_empty() {
        return Err(CriterionError::NotConsistentlyConnected { indices: off });
    }
    let corrs = sys.corrs();
    let (lhs, witness) = s_fast_witness(&corrs, -1).expect("rank >= 2 gives arguments");
    let bound = rat_int(sys.rank() as i64 - 2);
    Ok(Verdict {
        kind: CriterionKind::Consistent,
        contextual: lhs > bound,
        inconclusive: false,
        lhs,
        bound,
        witness: Some(witness),
        deltas,
    })
}

/// The necessary condition `s1(corr) - sum |D_i| <= n - 2`. A violation
/// proves contextuality; a pass is inconclusive because the dropped
/// interleaved terms could still decide either way.
pub fn check_necessary(sys: &CyclicSystem) -> Verdict {
    let corrs = sys.corrs();
    let (s1, witness) = s_fast_witness(&corrs, -1).expect("rank >= 2 gives arguments");
    let deltas = sys.deltas();
    let penalty: Rational = deltas.iter().map(|d| d.abs()).sum();
    let lhs = s1 - penalty;
    let bound = rat_int(sys.rank() as i64 - 2);
    let contextual = lhs > bound;
    Verdict {
        kind: CriterionKind::Necessary,
        contextual,
        inconclusive: !contextual,
        lhs,
        bound,
        witness: Some(witness),
        deltas,
    }
}

/// The cyclic system induced by five pairwise-exclusive events: property i
/// has expectation `2 p_i - 1` in both of its contexts, and exclusivity
/// forces the context correlation `1 - 2(p_i + p_{i+1})`.
pub fn kcbs_system(probabilities: &[Rational]) -> Result<CyclicSystem, CriterionError> {
    if probabilities.len() != 5 {
        return Err(CriterionError::WrongArity {
            got: probabilities.len(),
        });
    }
    for (index, p) in probabilities.iter().enumerate() {
        if p.is_negative() || *p > Rational::one() {
            return Err(CriterionError::ProbabilityOutOfRange { index });
        }
    }
    for index in 0..5 {
        let sum = &probabilities[index] + &probabilities[(index + 1) % 5];
        if sum > Rational::one() {
            return Err(CriterionError::OverlapViolation { index, sum });
        }
    }
    let e = |p: &Rational| rat_int(2) * p - rat_int(1);
    let labels = (1..=5).map(|i| alloc::format!("a{i}")).collect::<Vec<_>>();
    let contexts = (0..5)
        .map(|i| {
            let j = (i + 1) % 5;
            ContextMoments {
                e_own: e(&probabilities[i]),
                e_next: e(&probabilities[j]),
                corr: rat_int(1) - rat_int(2) * (&probabilities[i] + &probabilities[j]),
            }
        })
        .collect();
    Ok(CyclicSystem::new(labels, contexts)?)
}

/// The pentagon test for five pairwise-exclusive events: the summed event
/// probabilities admit a maximally noncontextual description exactly when
/// they total at most 2.
pub fn check_kcbs(probabilities: &[Rational]) -> Result<Verdict, CriterionError> {
    let sys = kcbs_system(probabilities)?;
    let lhs: Rational = probabilities.iter().sum();
    let bound = rat_int(2);
    let contextual = lhs > bound;
    if cfg!(debug_assertions) {
        let general = check_consistent(&sys)
            .expect("induced system is consistently connected by construction");
        assert_eq!(general.contextual, contextual, "pentagon test disagrees");
    }
    Ok(Verdict {
        kind: CriterionKind::Kcbs,
        lhs,
        bound,
        contextual,
        inconclusive: false,
        witness: None,
        deltas: sys.deltas(),
    })
}

/// The necessary-condition interval induced by simultaneous confidence
/// intervals: `certified` means even the most favorable point in the box
/// violates the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalVerdict {
    pub lo: Rational,
    pub hi: Rational,
    pub bound: Rational,
    pub certified: bool,
}

/// Ranges the necessary-condition left-hand side over a moment box: s1 over
/// the correlation box (by the requested mode) minus the sum of the |D_i|
/// intervals, largest against smallest.
pub fn interval_verdict(
    bx: &MomentBox,
    mode: &RangeMode,
) -> Result<IntervalVerdict, CriterionError> {
    let n = bx.rank();
    if n < 2 {
        return Err(CriterionError::RankTooSmall { rank: n });
    }
    let (s_lo, s_hi) = s1_box_range(&bx.corr_box()?, mode)?;
    let abs = bx.abs_delta_intervals();
    let penalty_lo: Rational = abs.iter().map(|(lo, _)| lo.clone()).sum();
    let penalty_hi: Rational = abs.iter().map(|(_, hi)| hi.clone()).sum();
    let lo = s_lo - penalty_hi;
    let hi = s_hi - penalty_lo;
    let bound = rat_int(n as i64 - 2);
    let certified = lo > bound;
    Ok(IntervalVerdict {
        lo,
        hi,
        bound,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::stats::{conservative_box, lapkiewicz_dataset, lapkiewicz_system};
    use alloc::vec;

    fn zero_delta_system(corrs: &[Rational]) -> CyclicSystem {
        let labels = (1..=corrs.len())
            .map(|i| alloc::format!("q{i}"))
            .collect::<Vec<_>>();
        let contexts = corrs
            .iter()
            .map(|c| ContextMoments {
                e_own: rat_int(0),
                e_next: rat_int(0),
                corr: c.clone(),
            })
            .collect();
        CyclicSystem::new(labels, contexts).unwrap()
    }

    #[test]
    fn main_criterion_on_the_reference_system() {
        let v = check_main(&lapkiewicz_system());
        assert_eq!(v.lhs, rat(8822, 1000));
        assert_eq!(v.bound, rat_int(8));
        assert!(v.contextual);
        assert!(!v.inconclusive);
        // All five correlations are negative and every agreement term is
        // positive, so the maximizer negates exactly the odd positions.
        let w = v.witness.unwrap();
        assert_eq!(alloc::format!("{w}"), "-+-+-+-+-+");
    }

    #[test]
    fn necessary_condition_on_the_reference_system() {
        let v = check_necessary(&lapkiewicz_system());
        assert_eq!(v.lhs, rat(3894, 1000) - rat(72, 1000));
        assert_eq!(v.bound, rat_int(3));
        assert!(v.contextual);
        assert!(!v.inconclusive);
    }

    #[test]
    fn consistent_check_refuses_inconsistent_input() {
        let err = check_consistent(&lapkiewicz_system()).unwrap_err();
        assert_eq!(
            err,
            CriterionError::NotConsistentlyConnected {
                indices: vec![0, 1, 2, 3, 4]
            }
        );
    }

    #[test]
    fn box_world_correlations_are_contextual() {
        let sys = zero_delta_system(&[rat_int(1), rat_int(1), rat_int(1), rat_int(-1)]);
        let consistent = check_consistent(&sys).unwrap();
        assert_eq!(consistent.lhs, rat_int(4));
        assert_eq!(consistent.bound, rat_int(2));
        assert!(consistent.contextual);

        let main = check_main(&sys);
        assert_eq!(main.lhs, rat_int(8));
        assert_eq!(main.bound, rat_int(6));
        assert!(main.contextual);
    }

    #[test]
    fn uncorrelated_system_is_noncontextual_but_necessary_is_inconclusive() {
        let sys = zero_delta_system(&[rat_int(0), rat_int(0), rat_int(0)]);
        assert!(!check_consistent(&sys).unwrap().contextual);
        let v = check_necessary(&sys);
        assert!(!v.contextual);
        assert!(v.inconclusive);
    }

    #[test]
    fn pentagon_boundary_and_violation() {
        let boundary = vec![rat(2, 5); 5];
        let v = check_kcbs(&boundary).unwrap();
        assert_eq!(v.lhs, rat_int(2));
        assert!(!v.contextual);

        let above = vec![rat(45, 100); 5];
        let v = check_kcbs(&above).unwrap();
        assert_eq!(v.lhs, rat(225, 100));
        assert!(v.contextual);

        let nothing = vec![rat_int(0); 5];
        assert!(!check_kcbs(&nothing).unwrap().contextual);
    }

    #[test]
    fn pentagon_input_validation() {
        assert_eq!(
            check_kcbs(&vec![rat(1, 2); 4]).unwrap_err(),
            CriterionError::WrongArity { got: 4 }
        );
        let mut probs = vec![rat(1, 2); 5];
        probs[2] = rat(11, 10);
        assert_eq!(
            check_kcbs(&probs).unwrap_err(),
            CriterionError::ProbabilityOutOfRange { index: 2 }
        );
        let overlapping = vec![rat(3, 5); 5];
        assert_eq!(
            check_kcbs(&overlapping).unwrap_err(),
            CriterionError::OverlapViolation {
                index: 0,
                sum: rat(6, 5)
            }
        );
    }

    #[test]
    fn interval_verdict_certifies_the_reference_box() {
        let data = lapkiewicz_dataset();
        let bx =
            conservative_box(&data.corr, &data.delta, &rat(1, 10), Some(&rat_int(14))).unwrap();
        let v = interval_verdict(&bx, &RangeMode::Conservative).unwrap();
        assert_eq!(v.lo, rat(3127, 1000));
        assert_eq!(v.hi, rat(4062, 1000));
        assert_eq!(v.bound, rat_int(3));
        assert!(v.certified);
    }

    #[test]
    fn interval_verdict_grid_mode_on_a_small_box() {
        use crate::stats::MomentBox;
        // Rank 3, correlations pinned near the contextual corner but with a
        // wide delta interval that de-certifies the verdict.
        let corr = vec![
            (rat(9, 10), rat(95, 100)),
            (rat(9, 10), rat(95, 100)),
            (rat(-95, 100), rat(-9, 10)),
        ];
        let delta = vec![
            (rat_int(0), rat_int(0)),
            (rat(-2, 1), rat(2, 1)),
            (rat_int(0), rat_int(0)),
        ];
        let bx = MomentBox::new(corr, delta).unwrap();
        let v = interval_verdict(&bx, &RangeMode::Grid(rat(1, 100))).unwrap();
        // s1 over the box lies within [2.7 - 3h/2, 2.85]; subtracting the
        // |delta| range [0, 2] yields an interval straddling the bound 1.
        assert!(v.hi <= rat(285, 100));
        assert!(v.lo >= rat(27, 10) - rat(3, 200) - rat_int(2));
        assert_eq!(v.bound, rat_int(1));
        assert!(!v.certified);
    }
}
