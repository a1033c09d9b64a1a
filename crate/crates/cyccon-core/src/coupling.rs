//! Explicit joint distributions witnessing noncontextual descriptions.
//!
//! All couplings here are dense distributions over the 2^k sign patterns of
//! k dichotomic variables, built exactly in rational arithmetic. The
//! workhorse is [`cycle_joint`]: given single expectations around a cycle
//! and a correlation for every edge, it either proves infeasibility (the
//! cycle inequality `s1(c) <= m - 2` fails, or some edge is infeasible on
//! its own) or constructs a joint reproducing every requested moment. The
//! construction peels one vertex at a time: pick the chord correlation
//! between the peeled vertex's neighbors from the (always nonempty)
//! interval permitted by both the closing triangle and the shortened cycle,
//! solve the shortened cycle recursively, then glue the triangle back on by
//! conditioning.
//!
//! [`maximal_coupling`] applies this to a cyclic system of measurements: one
//! variable per property per context, context edges carrying the measured
//! correlations and connection edges carrying the maximal agreement
//! `1 - |D_i|` that any coupling of the two marginals can reach.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::model::{pair_correlation_bounds, CyclicSystem};
use crate::rational::{rat, rat_int, Rational};
use crate::sfunc::{s0_enum, s1_enum, s_fast_witness, SignVector};

/// Dense joints are capped at 2^16 atoms.
pub const MAX_COUPLING_VARIABLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CouplingError {
    ExpectationOutOfRange {
        index: usize,
    },
    LengthMismatch {
        expectations: usize,
        correlations: usize,
    },
    TooFewVariables {
        got: usize,
    },
    TooManyVariables {
        got: usize,
        max: usize,
    },
    /// A single edge already fails the two-variable feasibility bounds.
    InfeasiblePair {
        index: usize,
        corr: Rational,
        lo: Rational,
        hi: Rational,
    },
    /// Every edge is fine but the cycle inequality fails; the witness is the
    /// odd sign vector achieving the violating value.
    InfeasibleCycle {
        lhs: Rational,
        bound: Rational,
        witness: SignVector,
    },
    DuplicateVariable {
        name: String,
    },
    WrongAtomCount {
        expected: usize,
        got: usize,
    },
    NegativeProbability {
        atom: usize,
    },
    NotNormalized {
        total: Rational,
    },
    VariableMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    MarginalMismatch {
        variable: String,
        expected: Rational,
        got: Rational,
    },
    PairMismatch {
        first: String,
        second: String,
        expected: Rational,
        got: Rational,
    },
}

impl fmt::Display for CouplingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingError::ExpectationOutOfRange { index } => {
                write!(f, "expectation {index} lies outside [-1, 1]")
            }
            CouplingError::LengthMismatch {
                expectations,
                correlations,
            } => write!(
                f,
                "{expectations} expectations but {correlations} edge correlations"
            ),
            CouplingError::TooFewVariables { got } => {
                write!(f, "need at least 3 variables, got {got}")
            }
            CouplingError::TooManyVariables { got, max } => {
                write!(f, "{got} variables exceed the supported maximum of {max}")
            }
            CouplingError::InfeasiblePair {
                index,
                corr,
                lo,
                hi,
            } => write!(
                f,
                "edge {index} correlation {corr} lies outside the feasible range [{lo}, {hi}]"
            ),
            CouplingError::InfeasibleCycle {
                lhs,
                bound,
                witness,
            } => write!(
                f,
                "no joint exists: signed sum {lhs} exceeds {bound} under signs {witness}"
            ),
            CouplingError::DuplicateVariable { name } => {
                write!(f, "variable name {name:?} appears twice")
            }
            CouplingError::WrongAtomCount { expected, got } => {
                write!(f, "expected {expected} atom probabilities, got {got}")
            }
            CouplingError::NegativeProbability { atom } => {
                write!(f, "atom {atom} has negative probability")
            }
            CouplingError::NotNormalized { total } => {
                write!(f, "probabilities sum to {total}, not 1")
            }
            CouplingError::VariableMismatch { expected, got } => write!(
                f,
                "variable list {got:?} does not match the expected {expected:?}"
            ),
            CouplingError::MarginalMismatch {
                variable,
                expected,
                got,
            } => write!(f, "marginal of {variable} is {got}, expected {expected}"),
            CouplingError::PairMismatch {
                first,
                second,
                expected,
                got,
            } => write!(
                f,
                "correlation of {first} with {second} is {got}, expected {expected}"
            ),
        }
    }
}

impl core::error::Error for CouplingError {}

/// A probability distribution over the joint sign patterns of named
/// dichotomic variables. Atom index bits follow variable order with the
/// first variable most significant; a 0 bit means outcome +1, so atom 0 is
/// the all-plus pattern and atoms are lexicographic with + before -.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    variables: Vec<String>,
    probs: Vec<Rational>,
}

impl JointDistribution {
    pub fn new(variables: Vec<String>, probs: Vec<Rational>) -> Result<Self, CouplingError> {
        if variables.is_empty() {
            return Err(CouplingError::TooFewVariables { got: 0 });
        }
        if variables.len() > MAX_COUPLING_VARIABLES {
            return Err(CouplingError::TooManyVariables {
                got: variables.len(),
                max: MAX_COUPLING_VARIABLES,
            });
        }
        for (i, name) in variables.iter().enumerate() {
            if variables[..i].contains(name) {
                return Err(CouplingError::DuplicateVariable { name: name.clone() });
            }
        }
        let expected = 1usize << variables.len();
        if probs.len() != expected {
            return Err(CouplingError::WrongAtomCount {
                expected,
                got: probs.len(),
            });
        }
        if let Some(atom) = probs.iter().position(|p| p.is_negative()) {
            return Err(CouplingError::NegativeProbability { atom });
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(CouplingError::NotNormalized { total });
        }
        Ok(JointDistribution { variables, probs })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// Outcome of variable `var` in the given atom.
    pub fn sign(&self, atom: usize, var: usize) -> i8 {
        let shift = self.variables.len() - 1 - var;
        if atom >> shift & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn expectation(&self, var: usize) -> Rational {
        self.fold_signed(|atom| self.sign(atom, var))
    }

    pub fn pair_expectation(&self, a: usize, b: usize) -> Rational {
        self.fold_signed(|atom| self.sign(atom, a) * self.sign(atom, b))
    }

    /// Probability that two variables agree.
    pub fn equal_probability(&self, a: usize, b: usize) -> Rational {
        self.probs
            .iter()
            .enumerate()
            .filter(|(atom, p)| !p.is_zero() && self.sign(*atom, a) == self.sign(*atom, b))
            .map(|(_, p)| p)
            .sum()
    }

    fn fold_signed(&self, sign: impl Fn(usize) -> i8) -> Rational {
        let mut sum = Rational::zero();
        for (atom, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if sign(atom) > 0 {
                sum += p;
            } else {
                sum -= p;
            }
        }
        sum
    }
}

fn check_expectation(e: &Rational, index: usize) -> Result<(), CouplingError> {
    if e.abs() > Rational::one() {
        return Err(CouplingError::ExpectationOutOfRange { index });
    }
    Ok(())
}

/// The four atom probabilities (++, +-, -+, --) of the unique two-variable
/// distribution with the given expectations and correlation.
pub fn pair_table(
    e_a: &Rational,
    e_b: &Rational,
    corr: &Rational,
) -> Result<[Rational; 4], CouplingError> {
    check_expectation(e_a, 0)?;
    check_expectation(e_b, 1)?;
    let (lo, hi) = pair_correlation_bounds(e_a, e_b);
    if corr < &lo || corr > &hi {
        return Err(CouplingError::InfeasiblePair {
            index: 0,
            corr: corr.clone(),
            lo,
            hi,
        });
    }
    let quarter = rat(1, 4);
    let both = (Rational::one() + e_a + e_b + corr) * &quarter;
    let first_only = (Rational::one() + e_a - e_b - corr) * &quarter;
    let second_only = (Rational::one() - e_a + e_b - corr) * &quarter;
    let neither = (Rational::one() - e_a - e_b + corr) * quarter;
    Ok([both, first_only, second_only, neither])
}

/// The coupling of two dichotomic marginals with the largest possible
/// agreement: correlation `1 - |e_a - e_b|`, equality probability
/// `1 - |e_a - e_b| / 2`.
pub fn max_pair_coupling(
    e_a: &Rational,
    e_b: &Rational,
) -> Result<JointDistribution, CouplingError> {
    let corr = Rational::one() - (e_a - e_b).abs();
    let table = pair_table(e_a, e_b, &corr)?;
    JointDistribution::new(
        alloc::vec![String::from("A"), String::from("B")],
        table.to_vec(),
    )
}

/// A three-variable joint with the given single expectations and adjacent
/// correlations `c = (c_01, c_12, c_20)`. Exists exactly when every pair is
/// feasible and `s1(c) <= 1`.
pub fn triple_joint(
    e: &[Rational; 3],
    c: &[Rational; 3],
) -> Result<JointDistribution, CouplingError> {
    cycle_joint(e, c)
}

/// A joint over m >= 3 cyclically arranged variables `V1..Vm` with
/// expectations `e` and edge correlations `c` (`c[i]` couples `V_{i+1}` with
/// `V_{i+2}`, the last entry closing the cycle). Exists exactly when every
/// edge passes the pair bounds and `s1(c) <= m - 2`; the returned joint
/// reproduces every requested moment exactly.
pub fn cycle_joint(e: &[Rational], c: &[Rational]) -> Result<JointDistribution, CouplingError> {
    let names: Vec<String> = (1..=e.len()).map(|i| format!("V{i}")).collect();
    cycle_joint_named(names, e, c)
}

fn cycle_joint_named(
    names: Vec<String>,
    e: &[Rational],
    c: &[Rational],
) -> Result<JointDistribution, CouplingError> {
    let m = e.len();
    if c.len() != m {
        return Err(CouplingError::LengthMismatch {
            expectations: m,
            correlations: c.len(),
        });
    }
    if m < 3 {
        return Err(CouplingError::TooFewVariables { got: m });
    }
    if m > MAX_COUPLING_VARIABLES {
        return Err(CouplingError::TooManyVariables {
            got: m,
            max: MAX_COUPLING_VARIABLES,
        });
    }
    for (i, x) in e.iter().enumerate() {
        check_expectation(x, i)?;
    }
    for index in 0..m {
        let (lo, hi) = pair_correlation_bounds(&e[index], &e[(index + 1) % m]);
        if c[index] < lo || c[index] > hi {
            return Err(CouplingError::InfeasiblePair {
                index,
                corr: c[index].clone(),
                lo,
                hi,
            });
        }
    }
    let (lhs, witness) = s_fast_witness(c, -1).expect("m >= 3");
    let bound = rat_int(m as i64 - 2);
    if lhs > bound {
        return Err(CouplingError::InfeasibleCycle {
            lhs,
            bound,
            witness,
        });
    }
    Ok(cycle_core(&names, e, c))
}

/// Recursive construction over validated input.
fn cycle_core(names: &[String], e: &[Rational], c: &[Rational]) -> JointDistribution {
    let m = e.len();
    if m == 3 {
        return triple_core(names, e, c);
    }

    // Chord between the neighbors of the peeled vertex V_m: intersect the
    // pair bounds with the feasibility conditions of the closing triangle
    // (V_{m-1}, V_m, V_1) and of the shortened cycle (V_1 .. V_{m-1}).
    let (pair_lo, pair_hi) = pair_correlation_bounds(&e[m - 2], &e[0]);
    let tri_pair = [c[m - 2].clone(), c[m - 1].clone()];
    let rest = &c[..m - 2];
    let short_bound = rat_int(m as i64 - 3);
    let tri_lo = s0_enum(&tri_pair).expect("two entries").0 - Rational::one();
    let tri_hi = Rational::one() - s1_enum(&tri_pair).expect("two entries").0;
    let rest_lo = s0_enum(rest).expect("nonempty").0 - &short_bound;
    let rest_hi = &short_bound - s1_enum(rest).expect("nonempty").0;

    let lo = pair_lo.max(tri_lo).max(rest_lo);
    let hi = pair_hi.min(tri_hi).min(rest_hi);
    assert!(lo <= hi, "chord interval empty for a feasible cycle");
    let chord = (lo + hi) / rat_int(2);

    let mut short_c = rest.to_vec();
    short_c.push(chord.clone());
    let sub = cycle_core(&names[..m - 1], &e[..m - 1], &short_c);

    let tri = triple_core(
        &[names[m - 2].clone(), names[m - 1].clone(), names[0].clone()],
        &[e[m - 2].clone(), e[m - 1].clone(), e[0].clone()],
        &[c[m - 2].clone(), c[m - 1].clone(), chord],
    );

    // Glue: extend each shortened-cycle atom by V_m, distributed according
    // to the triangle conditioned on the shared pair (V_{m-1}, V_1). Both
    // joints carry the same exact pair marginal, so conditioning is sound;
    // the arbitrary 1/2 split below only ever multiplies probability zero.
    let half = rat(1, 2);
    let mut probs = alloc::vec![Rational::zero(); 1 << m];
    for (atom, p_sub) in sub.probs().iter().enumerate() {
        let last = sub.sign(atom, m - 2);
        let first = sub.sign(atom, 0);
        let tri_atom = |peeled: i8| -> usize {
            let bit = |s: i8| usize::from(s < 0);
            bit(last) << 2 | bit(peeled) << 1 | bit(first)
        };
        let denom = &tri.probs()[tri_atom(1)] + &tri.probs()[tri_atom(-1)];
        for peeled in [1i8, -1] {
            let cond = if denom.is_zero() {
                half.clone()
            } else {
                &tri.probs()[tri_atom(peeled)] / &denom
            };
            probs[atom << 1 | usize::from(peeled < 0)] = p_sub * cond;
        }
    }
    JointDistribution::new(names.to_vec(), probs).expect("glued joint is a distribution")
}

/// Exact three-variable construction: the full joint is determined by the
/// given moments up to the three-way term, which is fixed to the midpoint
/// of its admissible interval.
fn triple_core(names: &[String], e: &[Rational], c: &[Rational]) -> JointDistribution {
    let base = |a: i8, b: i8, k: i8| -> Rational {
        let sgn = |s: i8, v: &Rational| if s > 0 { v.clone() } else { -v.clone() };
        Rational::one()
            + sgn(a, &e[0])
            + sgn(b, &e[1])
            + sgn(k, &e[2])
            + sgn(a * b, &c[0])
            + sgn(b * k, &c[1])
            + sgn(k * a, &c[2])
    };
    let mut theta_lo: Option<Rational> = None;
    let mut theta_hi: Option<Rational> = None;
    let signs = [1i8, -1];
    for a in signs {
        for b in signs {
            for k in signs {
                let v = base(a, b, k);
                if a * b * k > 0 {
                    let lower = -v;
                    theta_lo = Some(match theta_lo {
                        Some(cur) => cur.max(lower),
                        None => lower,
                    });
                } else {
                    theta_hi = Some(match theta_hi {
                        Some(cur) => cur.min(v),
                        None => v,
                    });
                }
            }
        }
    }
    let (theta_lo, theta_hi) = (theta_lo.expect("atoms"), theta_hi.expect("atoms"));
    assert!(
        theta_lo <= theta_hi,
        "three-way interval empty for a feasible triple"
    );
    let theta = (theta_lo + theta_hi) / rat_int(2);

    let eighth = rat(1, 8);
    let mut probs = Vec::with_capacity(8);
    for a in signs {
        for b in signs {
            for k in signs {
                let signed_theta = if a * b * k > 0 {
                    theta.clone()
                } else {
                    -theta.clone()
                };
                probs.push((base(a, b, k) + signed_theta) * &eighth);
            }
        }
    }
    JointDistribution::new(names.to_vec(), probs).expect("triple is a distribution")
}

/// A coupling of all measurements of a cyclic system in which every pair of
/// measurements of the same property agrees with the largest probability any
/// coupling allows. Variables are named `S<property>_c<context>` (1-based)
/// and ordered `S1_c1, S2_c1, S2_c2, S3_c2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalCoupling {
    joint: JointDistribution,
    rank: usize,
}

impl MaximalCoupling {
    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn into_joint(self) -> JointDistribution {
        self.joint
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Correlation of the two measurements in context i.
    pub fn context_corr(&self, i: usize) -> Rational {
        self.joint.pair_expectation(2 * i, 2 * i + 1)
    }

    /// Probability that the two measurements of property i agree.
    pub fn agreement_probability(&self, i: usize) -> Rational {
        let (own, other) = self.property_vars(i);
        self.joint.equal_probability(own, other)
    }

    /// Variable indices measuring property i: in its own context and in its
    /// predecessor context.
    fn property_vars(&self, i: usize) -> (usize, usize) {
        (2 * i, 2 * ((i + self.rank - 1) % self.rank) + 1)
    }
}

/// Variable names of a rank-n maximal coupling in serialization order:
/// context i contributes `S{i}_c{i}` then `S{i+1}_c{i}` (1-based, wrapping).
pub fn coupling_variable_names(n: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * n);
    for i in 0..n {
        names.push(format!("S{}_c{}", i + 1, i + 1));
        names.push(format!("S{}_c{}", (i + 1) % n + 1, i + 1));
    }
    names
}

/// Builds the maximally agreeing coupling of a cyclic system, or proves that
/// none exists. The infeasibility witness is reported in criterion argument
/// order (correlation of context i followed by the agreement term of
/// property i), matching the main criterion's witness for the same system.
pub fn maximal_coupling(sys: &CyclicSystem) -> Result<MaximalCoupling, CouplingError> {
    let n = sys.rank();
    if 2 * n > MAX_COUPLING_VARIABLES {
        return Err(CouplingError::TooManyVariables {
            got: 2 * n,
            max: MAX_COUPLING_VARIABLES,
        });
    }
    let mut e = Vec::with_capacity(2 * n);
    let mut c = Vec::with_capacity(2 * n);
    for i in 0..n {
        let ctx = &sys.contexts()[i];
        e.push(ctx.e_own.clone());
        e.push(ctx.e_next.clone());
        c.push(ctx.corr.clone());
        c.push(sys.max_equal_corr((i + 1) % n));
    }
    let joint = cycle_joint_named(coupling_variable_names(n), &e, &c).map_err(|err| match err {
        CouplingError::InfeasibleCycle {
            lhs,
            bound,
            witness,
        } => {
            let mut perm = alloc::vec![0usize; 2 * n];
            for i in 0..n {
                perm[2 * i] = 2 * i;
                perm[2 * i + 1] = 2 * ((i + n - 1) % n) + 1;
            }
            CouplingError::InfeasibleCycle {
                lhs,
                bound,
                witness: witness.permuted(&perm),
            }
        }
        other => other,
    })?;
    Ok(MaximalCoupling { joint, rank: n })
}

/// Checks that a claimed coupling really is a maximal coupling of the given
/// system: right variables, exact context moments, and every connection at
/// its maximal agreement.
pub fn verify_maximal(sys: &CyclicSystem, joint: &JointDistribution) -> Result<(), CouplingError> {
    let n = sys.rank();
    let expected_names = coupling_variable_names(n);
    if joint.variables() != expected_names {
        return Err(CouplingError::VariableMismatch {
            expected: expected_names,
            got: joint.variables().to_vec(),
        });
    }
    let check_marginal = |var: usize, expected: &Rational| -> Result<(), CouplingError> {
        let got = joint.expectation(var);
        if &got != expected {
            return Err(CouplingError::MarginalMismatch {
                variable: expected_names[var].clone(),
                expected: expected.clone(),
                got,
            });
        }
        Ok(())
    };
    let check_pair = |a: usize, b: usize, expected: &Rational| -> Result<(), CouplingError> {
        let got = joint.pair_expectation(a, b);
        if &got != expected {
            return Err(CouplingError::PairMismatch {
                first: expected_names[a].clone(),
                second: expected_names[b].clone(),
                expected: expected.clone(),
                got,
            });
        }
        Ok(())
    };
    for i in 0..n {
        let ctx = &sys.contexts()[i];
        check_marginal(2 * i, &ctx.e_own)?;
        check_marginal(2 * i + 1, &ctx.e_next)?;
        check_pair(2 * i, 2 * i + 1, &ctx.corr)?;
        let next = (i + 1) % n;
        check_pair(2 * i + 1, 2 * next, &sys.max_equal_corr(next))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::check_main;
    use crate::model::ContextMoments;
    use crate::stats::lapkiewicz_system;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn pair_table_reproduces_the_moment_parameterization() {
        let t = pair_table(&rat(1, 2), &rat(-1, 4), &rat(1, 8)).unwrap();
        assert_eq!(t[0], rat(11, 32));
        assert_eq!(t[1], rat(13, 32));
        assert_eq!(t[2], rat(1, 32));
        assert_eq!(t[3], rat(7, 32));
        let infeasible = pair_table(&rat(1, 2), &rat(-1, 4), &rat(1, 2));
        assert!(matches!(
            infeasible,
            Err(CouplingError::InfeasiblePair { .. })
        ));
    }

    #[test]
    fn max_pair_coupling_hits_the_agreement_ceiling() {
        let j = max_pair_coupling(&rat(1, 2), &rat(-1, 4)).unwrap();
        assert_eq!(j.expectation(0), rat(1, 2));
        assert_eq!(j.expectation(1), rat(-1, 4));
        assert_eq!(j.pair_expectation(0, 1), rat(1, 4));
        // 1 - |e_a - e_b| / 2 with a difference of 3/4.
        assert_eq!(j.equal_probability(0, 1), rat(5, 8));
    }

    #[test]
    fn triple_joint_reproduces_all_moments() {
        let e = [rat(1, 2), rat(-1, 3), rat_int(0)];
        let c = [rat(-1, 4), rat(1, 5), rat(1, 7)];
        let j = triple_joint(&e, &c).unwrap();
        for (i, want) in e.iter().enumerate() {
            assert_eq!(&j.expectation(i), want);
        }
        assert_eq!(j.pair_expectation(0, 1), c[0]);
        assert_eq!(j.pair_expectation(1, 2), c[1]);
        assert_eq!(j.pair_expectation(2, 0), c[2]);
    }

    #[test]
    fn cycle_joint_reproduces_moments_for_a_pentagon() {
        let e: Vec<Rational> = vec![rat(1, 10), rat(-1, 5), rat(3, 10), rat_int(0), rat(2, 5)];
        let c: Vec<Rational> = vec![rat(-1, 2), rat(-2, 5), rat(1, 5), rat(-1, 10), rat(3, 10)];
        let j = cycle_joint(&e, &c).unwrap();
        assert_eq!(j.variables().len(), 5);
        for (i, want) in e.iter().enumerate() {
            assert_eq!(&j.expectation(i), want, "marginal {i}");
        }
        for (i, want) in c.iter().enumerate() {
            assert_eq!(&j.pair_expectation(i, (i + 1) % 5), want, "edge {i}");
        }
    }

    #[test]
    fn cycle_joint_rejects_violating_correlations() {
        let e = vec![rat_int(0); 4];
        let c = vec![rat_int(1), rat_int(1), rat_int(1), rat_int(-1)];
        let err = cycle_joint(&e, &c).unwrap_err();
        match err {
            CouplingError::InfeasibleCycle {
                lhs,
                bound,
                witness,
            } => {
                assert_eq!(lhs, rat_int(4));
                assert_eq!(bound, rat_int(2));
                assert_eq!(witness.to_string(), "+++-");
            }
            other => panic!("expected cycle infeasibility, got {other}"),
        }
    }

    #[test]
    fn cycle_joint_validates_shape() {
        assert!(matches!(
            cycle_joint(&[rat_int(0), rat_int(0)], &[rat_int(0), rat_int(0)]),
            Err(CouplingError::TooFewVariables { got: 2 })
        ));
        assert!(matches!(
            cycle_joint(&vec![rat_int(0); 3], &vec![rat_int(0); 4]),
            Err(CouplingError::LengthMismatch {
                expectations: 3,
                correlations: 4
            })
        ));
        assert!(matches!(
            cycle_joint(&[rat_int(2), rat_int(0), rat_int(0)], &vec![rat_int(0); 3]),
            Err(CouplingError::ExpectationOutOfRange { index: 0 })
        ));
    }

    #[test]
    fn noncontextual_system_gets_a_verified_maximal_coupling() {
        // Correlations well inside the noncontextual region, deltas nonzero.
        let labels = vec!["q1".to_string(), "q2".to_string(), "q3".to_string()];
        let contexts = vec![
            ContextMoments {
                e_own: rat(1, 4),
                e_next: rat(-1, 8),
                corr: rat(1, 3),
            },
            ContextMoments {
                e_own: rat(-1, 6),
                e_next: rat(1, 5),
                corr: rat(-1, 7),
            },
            ContextMoments {
                e_own: rat(1, 9),
                e_next: rat(1, 10),
                corr: rat(1, 11),
            },
        ];
        let sys = CyclicSystem::new(labels, contexts).unwrap();
        let coupling = maximal_coupling(&sys).unwrap();
        verify_maximal(&sys, coupling.joint()).unwrap();
        for i in 0..3 {
            assert_eq!(coupling.context_corr(i), sys.corrs()[i]);
            let delta_abs = sys.delta(i).abs();
            assert_eq!(
                coupling.agreement_probability(i),
                Rational::one() - delta_abs / rat_int(2),
                "connection {i}"
            );
        }
    }

    #[test]
    fn reference_system_is_refused_with_the_criterion_witness() {
        let sys = lapkiewicz_system();
        let err = maximal_coupling(&sys).unwrap_err();
        match err {
            CouplingError::InfeasibleCycle {
                lhs,
                bound,
                witness,
            } => {
                let verdict = check_main(&sys);
                assert_eq!(lhs, verdict.lhs);
                assert_eq!(bound, verdict.bound);
                assert_eq!(witness, verdict.witness.unwrap());
            }
            other => panic!("expected cycle infeasibility, got {other}"),
        }
    }

    #[test]
    fn verify_rejects_tampered_probabilities() {
        let labels = vec!["q1".to_string(), "q2".to_string(), "q3".to_string()];
        let contexts = vec![
            ContextMoments {
                e_own: rat_int(0),
                e_next: rat_int(0),
                corr: rat(1, 2),
            },
            ContextMoments {
                e_own: rat_int(0),
                e_next: rat_int(0),
                corr: rat(1, 2),
            },
            ContextMoments {
                e_own: rat_int(0),
                e_next: rat_int(0),
                corr: rat(1, 2),
            },
        ];
        let sys = CyclicSystem::new(labels, contexts).unwrap();
        let good = maximal_coupling(&sys).unwrap().into_joint();
        verify_maximal(&sys, &good).unwrap();

        let mut probs = good.probs().to_vec();
        let donor = (0..probs.len())
            .max_by(|a, b| probs[*a].cmp(&probs[*b]))
            .unwrap();
        let recipient = (donor + 1) % probs.len();
        let moved = &probs[donor] / rat_int(2);
        assert!(moved.is_positive());
        probs[donor] = &probs[donor] - &moved;
        probs[recipient] = &probs[recipient] + &moved;
        let tampered = JointDistribution::new(good.variables().to_vec(), probs).unwrap();
        assert!(verify_maximal(&sys, &tampered).is_err());
    }

    #[test]
    fn joint_distribution_validates_its_input() {
        let names = vec!["A".to_string(), "B".to_string()];
        assert!(matches!(
            JointDistribution::new(names.clone(), vec![rat(1, 2); 2]),
            Err(CouplingError::WrongAtomCount {
                expected: 4,
                got: 2
            })
        ));
        assert!(matches!(
            JointDistribution::new(names.clone(), vec![rat(1, 2); 4]),
            Err(CouplingError::NotNormalized { .. })
        ));
        let mut probs = vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(-1, 2)];
        assert!(matches!(
            JointDistribution::new(names.clone(), core::mem::take(&mut probs)),
            Err(CouplingError::NegativeProbability { atom: 3 })
        ));
        assert!(matches!(
            JointDistribution::new(vec!["A".to_string(), "A".to_string()], vec![rat(1, 4); 4]),
            Err(CouplingError::DuplicateVariable { .. })
        ));
    }
}
