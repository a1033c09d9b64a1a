//! System layouts and validated cyclic systems.
//!
//! A layout lists dichotomic properties and two-property measurement
//! contexts. A layout is cyclic-decomposable when every context has exactly
//! two distinct known properties and every property occurs in exactly two
//! contexts; its contexts then partition into simple cycles. A
//! [`CyclicSystem`] is one such cycle together with the observed first
//! moments and correlation of every context, canonically oriented and
//! checked against the pair-feasibility bounds
//!
//! ```text
//! |<A> + <B>| - 1  <=  <AB>  <=  1 - |<A> - <B>|
//! ```
//!
//! which characterize the (A, B) moment triples realizable by some joint
//! distribution on {-1,+1}^2.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{rat_int, Rational};

/// Properties and contexts as declared, prior to validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    pub properties: Vec<String>,
    pub contexts: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutViolation {
    /// Context does not consist of exactly two distinct properties.
    ContextArity {
        context: usize,
        members: Vec<String>,
    },
    /// Property appears in `degree` contexts instead of exactly two.
    PropertyDegree {
        property: String,
        degree: usize,
    },
    UnknownProperty {
        context: usize,
        property: String,
    },
    DuplicateProperty {
        property: String,
    },
}

impl fmt::Display for LayoutViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutViolation::ContextArity { context, members } => write!(
                f,
                "context {context} must have exactly 2 distinct properties, got {members:?}"
            ),
            LayoutViolation::PropertyDegree { property, degree } => write!(
                f,
                "property {property:?} appears in {degree} contexts, expected exactly 2"
            ),
            LayoutViolation::UnknownProperty { context, property } => {
                write!(
                    f,
                    "context {context} references undeclared property {property:?}"
                )
            }
            LayoutViolation::DuplicateProperty { property } => {
                write!(f, "property {property:?} is declared more than once")
            }
        }
    }
}

/// Observed moments of one context, in the orientation the context list was
/// given: `e_first`/`e_second` are the expectations of the first/second
/// listed property, `corr` the expectation of their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentEntry {
    pub members: (String, String),
    pub e_first: Rational,
    pub e_second: Rational,
    pub corr: Rational,
}

/// Moments of context i in canonical cycle orientation: `e_own` is the
/// expectation of property q_i measured in context i, `e_next` the
/// expectation of q_{i+1} measured in the same context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextMoments {
    pub e_own: Rational,
    pub e_next: Rational,
    pub corr: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    Layout(Vec<LayoutViolation>),
    MultipleCycles(Vec<Vec<String>>),
    RankTooSmall {
        rank: usize,
    },
    LabelCountMismatch {
        labels: usize,
        contexts: usize,
    },
    DuplicateLabel {
        label: String,
    },
    /// No moment entry was supplied for this adjacent pair.
    MissingMoment {
        first: String,
        second: String,
    },
    /// Moment entries (by input position) that matched no context.
    UnmatchedMoments {
        indices: Vec<usize>,
    },
    /// Context correlation outside the pair-feasibility bounds.
    InfeasibleContext {
        context: usize,
        corr: Rational,
        lo: Rational,
        hi: Rational,
    },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Layout(violations) => {
                write!(f, "layout is invalid:")?;
                for v in violations {
                    write!(f, " [{v}]")?;
                }
                Ok(())
            }
            ModelError::MultipleCycles(cycles) => write!(
                f,
                "layout decomposes into {} cycles, expected exactly one: {cycles:?}",
                cycles.len()
            ),
            ModelError::RankTooSmall { rank } => {
                write!(f, "cyclic systems need rank at least 2, got {rank}")
            }
            ModelError::LabelCountMismatch { labels, contexts } => {
                write!(f, "{labels} labels but {contexts} context moment sets")
            }
            ModelError::DuplicateLabel { label } => write!(f, "duplicate label {label:?}"),
            ModelError::MissingMoment { first, second } => {
                write!(f, "no moments supplied for context ({first:?}, {second:?})")
            }
            ModelError::UnmatchedMoments { indices } => {
                write!(
                    f,
                    "moment entries at positions {indices:?} match no context"
                )
            }
            ModelError::InfeasibleContext {
                context,
                corr,
                lo,
                hi,
            } => write!(
                f,
                "context {context} has correlation {corr} outside its feasible range [{lo}, {hi}]"
            ),
        }
    }
}

impl core::error::Error for ModelError {}

/// Checks that every context has exactly two distinct declared properties and
/// every property sits in exactly two contexts. Returns all violations.
pub fn validate_layout(layout: &SystemLayout) -> Result<(), Vec<LayoutViolation>> {
    let mut violations = Vec::new();
    for (i, p) in layout.properties.iter().enumerate() {
        if layout.properties[..i].contains(p) {
            violations.push(LayoutViolation::DuplicateProperty {
                property: p.clone(),
            });
        }
    }
    for (ci, members) in layout.contexts.iter().enumerate() {
        let distinct_pair = members.len() == 2 && members[0] != members[1];
        if !distinct_pair {
            violations.push(LayoutViolation::ContextArity {
                context: ci,
                members: members.clone(),
            });
        }
        for p in members {
            if !layout.properties.contains(p) {
                violations.push(LayoutViolation::UnknownProperty {
                    context: ci,
                    property: p.clone(),
                });
            }
        }
    }
    for p in &layout.properties {
        let degree = layout
            .contexts
            .iter()
            .map(|ctx| ctx.iter().filter(|m| *m == p).count())
            .sum::<usize>();
        if degree != 2 {
            violations.push(LayoutViolation::PropertyDegree {
                property: p.clone(),
                degree,
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Splits a valid layout into its cycles. Each cycle is listed starting from
/// its lexicographically least property, proceeding toward the lesser of that
/// property's two neighbors; cycles are sorted by starting property.
pub fn decompose_cycles(layout: &SystemLayout) -> Result<Vec<Vec<String>>, Vec<LayoutViolation>> {
    validate_layout(layout)?;
    let index_of = |label: &str| -> usize {
        layout
            .properties
            .iter()
            .position(|p| p == label)
            .expect("validated layout has no unknown properties")
    };
    // adjacency[p] = the two (context, neighbor) incidences of property p.
    let mut adjacency: Vec<Vec<(usize, usize)>> = Vec::new();
    adjacency.resize_with(layout.properties.len(), Vec::new);
    for (ci, members) in layout.contexts.iter().enumerate() {
        let a = index_of(&members[0]);
        let b = index_of(&members[1]);
        adjacency[a].push((ci, b));
        adjacency[b].push((ci, a));
    }

    let mut order: Vec<usize> = (0..layout.properties.len()).collect();
    order.sort_by(|&a, &b| layout.properties[a].cmp(&layout.properties[b]));

    let mut visited = alloc::vec![false; layout.properties.len()];
    let mut cycles = Vec::new();
    for &start in &order {
        if visited[start] {
            continue;
        }
        let (first_ctx, first_next) = {
            let edges = &adjacency[start];
            debug_assert_eq!(edges.len(), 2);
            let (ca, na) = edges[0];
            let (cb, nb) = edges[1];
            if layout.properties[na] <= layout.properties[nb] {
                (ca, na)
            } else {
                (cb, nb)
            }
        };
        let mut cycle = alloc::vec![layout.properties[start].clone()];
        visited[start] = true;
        let mut via_ctx = first_ctx;
        let mut here = first_next;
        while here != start {
            cycle.push(layout.properties[here].clone());
            visited[here] = true;
            let (next_ctx, next) = adjacency[here]
                .iter()
                .copied()
                .find(|&(c, _)| c != via_ctx)
                .expect("degree-2 node has an outgoing edge");
            via_ctx = next_ctx;
            here = next;
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Feasible range of `<AB>` for +-1 variables with means e_a and e_b.
pub fn pair_correlation_bounds(e_a: &Rational, e_b: &Rational) -> (Rational, Rational) {
    let lo = (e_a + e_b).abs() - rat_int(1);
    let hi = rat_int(1) - (e_a - e_b).abs();
    (lo, hi)
}

/// A validated rank-n cyclic system: properties in cycle order, context i
/// measuring (q_i, q_{i+1}), all contexts pair-feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSystem {
    labels: Vec<String>,
    contexts: Vec<ContextMoments>,
}

impl CyclicSystem {
    pub fn new(labels: Vec<String>, contexts: Vec<ContextMoments>) -> Result<Self, ModelError> {
        if labels.len() < 2 {
            return Err(ModelError::RankTooSmall { rank: labels.len() });
        }
        if labels.len() != contexts.len() {
            return Err(ModelError::LabelCountMismatch {
                labels: labels.len(),
                contexts: contexts.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ModelError::DuplicateLabel { label: l.clone() });
            }
        }
        for (i, ctx) in contexts.iter().enumerate() {
            let (lo, hi) = pair_correlation_bounds(&ctx.e_own, &ctx.e_next);
            if ctx.corr < lo || ctx.corr > hi {
                return Err(ModelError::InfeasibleContext {
                    context: i,
                    corr: ctx.corr.clone(),
                    lo,
                    hi,
                });
            }
        }
        Ok(CyclicSystem { labels, contexts })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contexts(&self) -> &[ContextMoments] {
        &self.contexts
    }

    /// Difference between the two measurements of property q_i: its
    /// expectation in context i minus its expectation in context i-1.
    pub fn delta(&self, i: usize) -> Rational {
        let n = self.rank();
        let prev = (i + n - 1) % n;
        &self.contexts[i].e_own - &self.contexts[prev].e_next
    }

    pub fn deltas(&self) -> Vec<Rational> {
        (0..self.rank()).map(|i| self.delta(i)).collect()
    }

    pub fn corrs(&self) -> Vec<Rational> {
        self.contexts.iter().map(|c| c.corr.clone()).collect()
    }

    /// Largest probability-of-agreement correlation any coupling can give the
    /// two measurements of q_i: 1 - |Delta_i|.
    pub fn max_equal_corr(&self, i: usize) -> Rational {
        rat_int(1) - self.delta(i).abs()
    }

    /// True when every property's two measurements have equal expectations.
    pub fn is_consistently_connected(&self) -> bool {
        (0..self.rank()).all(|i| self.delta(i).is_zero())
    }
}

/// Correlation clamped into its feasible range during a tolerant build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClampNote {
    pub context: usize,
    pub original: Rational,
    pub clamped: Rational,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Project out-of-range context correlations onto their feasible
    /// interval instead of failing.
    pub clamp: bool,
}

#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub system: CyclicSystem,
    pub clamped: Vec<ClampNote>,
}

/// Assembles a single-cycle system from a layout and per-context moment
/// entries. Entries are matched to cycle contexts by unordered member pair,
/// consumed in input order (rank-2 layouts list the same pair twice), and
/// reoriented to the canonical cycle direction.
pub fn build_cyclic_system(
    layout: &SystemLayout,
    moments: &[MomentEntry],
    options: BuildOptions,
) -> Result<BuildOutcome, ModelError> {
    let cycles = decompose_cycles(layout).map_err(ModelError::Layout)?;
    if cycles.len() != 1 {
        return Err(ModelError::MultipleCycles(cycles));
    }
    let labels = cycles.into_iter().next().expect("one cycle");
    let n = labels.len();

    let mut consumed = alloc::vec![false; moments.len()];
    let mut contexts = Vec::with_capacity(n);
    let mut clamped = Vec::new();
    for i in 0..n {
        let own = &labels[i];
        let next = &labels[(i + 1) % n];
        let position = moments.iter().enumerate().position(|(j, m)| {
            !consumed[j]
                && ((m.members.0 == *own && m.members.1 == *next)
                    || (m.members.0 == *next && m.members.1 == *own))
        });
        let Some(j) = position else {
            return Err(ModelError::MissingMoment {
                first: own.clone(),
                second: next.clone(),
            });
        };
        consumed[j] = true;
        let entry = &moments[j];
        let (e_own, e_next) = if entry.members.0 == *own {
            (entry.e_first.clone(), entry.e_second.clone())
        } else {
            (entry.e_second.clone(), entry.e_first.clone())
        };
        let (lo, hi) = pair_correlation_bounds(&e_own, &e_next);
        let mut corr = entry.corr.clone();
        if corr < lo || corr > hi {
            if !options.clamp {
                return Err(ModelError::InfeasibleContext {
                    context: i,
                    corr,
                    lo,
                    hi,
                });
            }
            let projected = corr.clone().max(lo).min(hi);
            clamped.push(ClampNote {
                context: i,
                original: corr,
                clamped: projected.clone(),
            });
            corr = projected;
        }
        contexts.push(ContextMoments {
            e_own,
            e_next,
            corr,
        });
    }

    let leftovers: Vec<usize> = (0..moments.len()).filter(|&j| !consumed[j]).collect();
    if !leftovers.is_empty() {
        return Err(ModelError::UnmatchedMoments { indices: leftovers });
    }
    let system = CyclicSystem::new(labels, contexts)?;
    Ok(BuildOutcome { system, clamped })
}
