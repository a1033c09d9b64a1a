//! Linear-programming oracle for coupling feasibility.
//!
//! The question "does a joint distribution with these moments exist" is a
//! linear feasibility problem over the 2^(2n) sign patterns of the coupled
//! measurements. This module answers it from first principles: it writes
//! down one equality row per prescribed moment and runs a phase-1 simplex
//! over the atom probabilities, sharing no logic with the closed-form
//! criteria or the recursive coupling construction. Its verdicts therefore
//! cross-check those modules rather than restating them.
//!
//! Every answer is verified before it is returned: a feasible solution is
//! replayed against all rows, an infeasible one comes with a Farkas
//! certificate `y` satisfying `y^T A_j >= 0` for every atom column and
//! `y^T b < 0`, checked exhaustively. The simplex is exact and fraction-free:
//! the constraint block has entries in `{-1, 0, 1}`, so every tableau entry
//! produced by the Bareiss update rule is a minor of that matrix and stays
//! within `i128` (a Hadamard bound, spelled out at the solver); the targets,
//! the only non-integer data, ride along in a separate exact-rational
//! right-hand-side column under the same row operations. Entering columns
//! are picked by steepest reduced cost, falling back to Bland's rule after
//! a degenerate stall so termination stays guaranteed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::model::CyclicSystem;
use crate::rational::Rational;

/// Largest supported rank: rank 6 already means 4096 atom columns.
pub const MAX_ORACLE_RANK: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    RankTooLarge {
        rank: usize,
        max: usize,
    },
    /// A traditional joint requires equal marginals for every property;
    /// these properties differ.
    NotConsistentlyConnected {
        indices: Vec<usize>,
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::RankTooLarge { rank, max } => {
                write!(f, "rank {rank} exceeds the oracle maximum of {max}")
            }
            OracleError::NotConsistentlyConnected { indices } => {
                write!(
                    f,
                    "no traditional joint can exist: properties with differing marginals:"
                )?;
                for i in indices {
                    write!(f, " {i}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Shape of one equality row: sum of all atoms, a single-variable
/// expectation, or a two-variable product expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowPattern {
    Ones,
    Single(usize),
    Pair(usize, usize),
}

/// The moment rows of a coupling feasibility question, over one variable per
/// measurement (two per context, named and ordered as in the coupling
/// construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityProblem {
    variables: Vec<String>,
    patterns: Vec<RowPattern>,
    targets: Vec<Rational>,
}

/// A probability per atom, indexed like the rows' variables with the first
/// variable most significant and a 0 bit meaning outcome +1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub variables: Vec<String>,
    pub probs: Vec<Rational>,
}

/// Farkas refutation: `coefficients^T A_j >= 0` for every atom column while
/// `coefficients^T targets = gap < 0`, so no nonnegative combination of
/// atoms can meet the targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub coefficients: Vec<Rational>,
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Feasible(OracleSolution),
    Infeasible(InfeasibilityCertificate),
}

impl FeasibilityProblem {
    /// Rows demanding each connection reach its maximal agreement
    /// `1 - |D_i|`; feasibility is then exactly the existence of a maximally
    /// noncontextual description.
    pub fn maximal(sys: &CyclicSystem) -> Result<Self, OracleError> {
        Self::build(sys, false)
    }

    /// Rows demanding perfect agreement on every connection, the traditional
    /// notion of one random variable per property.
    pub fn traditional(sys: &CyclicSystem) -> Result<Self, OracleError> {
        Self::build(sys, true)
    }

    fn build(sys: &CyclicSystem, traditional: bool) -> Result<Self, OracleError> {
        let n = sys.rank();
        if n > MAX_ORACLE_RANK {
            return Err(OracleError::RankTooLarge {
                rank: n,
                max: MAX_ORACLE_RANK,
            });
        }
        let mut variables = Vec::with_capacity(2 * n);
        for i in 0..n {
            variables.push(format!("S{}_c{}", i + 1, i + 1));
            variables.push(format!("S{}_c{}", (i + 1) % n + 1, i + 1));
        }
        let mut patterns = Vec::with_capacity(4 * n + 1);
        let mut targets = Vec::with_capacity(4 * n + 1);
        patterns.push(RowPattern::Ones);
        targets.push(Rational::one());
        for (i, ctx) in sys.contexts().iter().enumerate() {
            patterns.push(RowPattern::Single(2 * i));
            targets.push(ctx.e_own.clone());
            patterns.push(RowPattern::Single(2 * i + 1));
            targets.push(ctx.e_next.clone());
            patterns.push(RowPattern::Pair(2 * i, 2 * i + 1));
            targets.push(ctx.corr.clone());
        }
        for j in 0..n {
            let own = 2 * j;
            let previous = 2 * ((j + n - 1) % n) + 1;
            patterns.push(RowPattern::Pair(previous, own));
            targets.push(if traditional {
                Rational::one()
            } else {
                sys.max_equal_corr(j)
            });
        }
        Ok(FeasibilityProblem {
            variables,
            patterns,
            targets,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn row_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&RowPattern, &Rational)> {
        self.patterns.iter().zip(&self.targets)
    }

    pub fn atom_count(&self) -> usize {
        1usize << self.variables.len()
    }

    fn sign(&self, atom: usize, var: usize) -> i64 {
        if atom >> (self.variables.len() - 1 - var) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    /// Coefficient of the given atom in the given row.
    pub fn coefficient(&self, row: usize, atom: usize) -> i64 {
        match self.patterns[row] {
            RowPattern::Ones => 1,
            RowPattern::Single(v) => self.sign(atom, v),
            RowPattern::Pair(a, b) => self.sign(atom, a) * self.sign(atom, b),
        }
    }

    /// Decides feasibility. The returned outcome has already been verified
    /// against every row of the problem.
    pub fn solve(&self) -> OracleOutcome {
        let outcome = self.solve_phase1();
        match &outcome {
            OracleOutcome::Feasible(solution) => self.assert_solves(solution),
            OracleOutcome::Infeasible(cert) => {
                assert!(
                    self.certificate_refutes(cert),
                    "simplex produced a certificate that does not refute the problem"
                );
            }
        }
        outcome
    }

    fn assert_solves(&self, solution: &OracleSolution) {
        assert_eq!(solution.probs.len(), self.atom_count());
        for (row, target) in self.targets.iter().enumerate() {
            let mut sum = Rational::zero();
            for (atom, p) in solution.probs.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                match self.coefficient(row, atom) {
                    1 => sum += p,
                    -1 => sum -= p,
                    _ => unreachable!("coefficients are signs"),
                }
            }
            assert_eq!(&sum, target, "simplex solution misses row {row}");
        }
        assert!(
            solution.probs.iter().all(|p| !p.is_negative()),
            "simplex solution has a negative atom"
        );
    }

    /// True when the certificate proves this problem infeasible.
    pub fn certificate_refutes(&self, cert: &InfeasibilityCertificate) -> bool {
        if cert.coefficients.len() != self.row_count() {
            return false;
        }
        let gap: Rational = cert
            .coefficients
            .iter()
            .zip(&self.targets)
            .map(|(c, t)| c * t)
            .sum();
        if !gap.is_negative() || gap != cert.gap {
            return false;
        }
        // Clear denominators once, so the sign test over every atom column
        // runs on integers (machine-sized when they fit).
        let lcd = cert
            .coefficients
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<BigInt> = cert
            .coefficients
            .iter()
            .map(|c| c.numer() * (&lcd / c.denom()))
            .collect();
        if let Some(small) = scaled
            .iter()
            .map(ToPrimitive::to_i128)
            .collect::<Option<Vec<i128>>>()
        {
            let mut overflowed = false;
            'atoms: for atom in 0..self.atom_count() {
                let mut sum = 0i128;
                for (row, &c) in small.iter().enumerate() {
                    let term = match self.coefficient(row, atom) {
                        1 => Some(c),
                        -1 => c.checked_neg(),
                        _ => unreachable!("coefficients are signs"),
                    };
                    match term.and_then(|t| sum.checked_add(t)) {
                        Some(s) => sum = s,
                        None => {
                            overflowed = true;
                            break 'atoms;
                        }
                    }
                }
                if sum < 0 {
                    return false;
                }
            }
            if !overflowed {
                return true;
            }
        }
        for atom in 0..self.atom_count() {
            let mut sum = BigInt::zero();
            for (row, c) in scaled.iter().enumerate() {
                match self.coefficient(row, atom) {
                    1 => sum += c,
                    -1 => sum -= c,
                    _ => unreachable!("coefficients are signs"),
                }
            }
            if Signed::is_negative(&sum) {
                return false;
            }
        }
        true
    }

    /// Phase-1 simplex, fraction-free on the matrix block and exact-rational
    /// on the right-hand side column.
    ///
    /// The coefficient matrix (sign patterns plus the artificial identity)
    /// has entries in {-1, 0, 1}, so every Bareiss intermediate in the
    /// matrix block is a minor of that matrix: Hadamard bounds it by
    /// sqrt(m)^m, about 3e17 for the largest supported m = 25 rows. The
    /// objective row adds one row of column sums (at most m), for a bound of
    /// m * sqrt(m)^m. Products of two such entries stay below 1e38, inside
    /// `i128`, so the checked arithmetic can never actually fail. Target
    /// denominators never enter the matrix block: the right-hand side is
    /// carried as exact rationals under the same row operations.
    fn solve_phase1(&self) -> OracleOutcome {
        let m = self.row_count();
        let atoms = self.atom_count();
        let cols = atoms + m;
        const WIDTH: &str = "products of Hadamard-bounded minors fit in i128";

        // Flip rows with a negative target so the right-hand side starts
        // nonnegative; the artificial variables then form a feasible basis.
        let mut sigma = alloc::vec![1i8; m];
        let mut matrix: Vec<Vec<i128>> = Vec::with_capacity(m);
        let mut rhs: Vec<Rational> = Vec::with_capacity(m);
        for i in 0..m {
            if self.targets[i].numer().is_negative() {
                sigma[i] = -1;
            }
            let flip = i128::from(sigma[i]);
            let mut row = alloc::vec![0i128; cols];
            for (atom, slot) in row.iter_mut().enumerate().take(atoms) {
                *slot = flip * i128::from(self.coefficient(i, atom));
            }
            row[atoms + i] = 1;
            matrix.push(row);
            let target = &self.targets[i];
            rhs.push(if sigma[i] < 0 {
                -target
            } else {
                target.clone()
            });
        }
        // Artificials cost 1 each; eliminating them leaves the negated
        // column sums as reduced costs, with zeros over the artificials.
        let mut obj: Vec<i128> = (0..cols)
            .map(|j| -matrix.iter().map(|row| row[j]).sum::<i128>())
            .collect();
        for i in 0..m {
            obj[atoms + i] = 0;
        }
        let mut obj_rhs: Rational = -rhs.iter().sum::<Rational>();

        let mut delta = 1i128;
        let mut basis: Vec<usize> = (0..m).map(|i| atoms + i).collect();
        let mut banned = alloc::vec![false; m];
        let mut stalled = 0usize;

        loop {
            // Steepest reduced cost normally; after a long degenerate stall,
            // first negative index (Bland), which cannot cycle and therefore
            // guarantees termination.
            let bland = stalled > 2 * m;
            let mut entering = None;
            for j in 0..cols {
                if j >= atoms && banned[j - atoms] {
                    continue;
                }
                if obj[j] >= 0 {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(c) => {
                        if obj[j] < obj[c] {
                            entering = Some(j);
                        }
                    }
                }
                if bland {
                    break;
                }
            }
            let Some(col) = entering else { break };

            let mut leaving: Option<usize> = None;
            for i in 0..m {
                if matrix[i][col] <= 0 {
                    continue;
                }
                match leaving {
                    None => leaving = Some(i),
                    Some(r) => {
                        let lhs = &rhs[i] * BigInt::from(matrix[r][col]);
                        let rhs_v = &rhs[r] * BigInt::from(matrix[i][col]);
                        if lhs < rhs_v || (lhs == rhs_v && basis[i] < basis[r]) {
                            leaving = Some(i);
                        }
                    }
                }
            }
            let row = leaving.expect("phase-1 objective is bounded below by zero");
            if rhs[row].is_zero() {
                stalled += 1;
            } else {
                stalled = 0;
            }

            let pivot = matrix[row][col];
            let pivot_row = matrix[row].clone();
            let pivot_rhs = rhs[row].clone();
            let pivot_r = Rational::from_integer(BigInt::from(pivot));
            let delta_r = Rational::from_integer(BigInt::from(delta));
            for i in 0..=m {
                if i == row {
                    continue;
                }
                let (line, line_rhs) = if i == m {
                    (&mut obj, &mut obj_rhs)
                } else {
                    (&mut matrix[i], &mut rhs[i])
                };
                let factor = line[col];
                // Even rows untouched by the pivot column are rescaled: all
                // entries carry the common denominator delta.
                for j in 0..cols {
                    let scaled = line[j].checked_mul(pivot).expect(WIDTH);
                    let correction = factor.checked_mul(pivot_row[j]).expect(WIDTH);
                    let next = scaled.checked_sub(correction).expect(WIDTH);
                    debug_assert_eq!(next % delta, 0, "inexact fraction-free division");
                    line[j] = next / delta;
                }
                let factor_r = Rational::from_integer(BigInt::from(factor));
                *line_rhs = (&*line_rhs * &pivot_r - &pivot_rhs * &factor_r) / &delta_r;
            }
            delta = pivot;
            if basis[row] >= atoms {
                banned[basis[row] - atoms] = true;
            }
            basis[row] = col;
        }

        let delta_r = Rational::from_integer(BigInt::from(delta));
        if obj_rhs.is_zero() {
            let mut probs = alloc::vec![Rational::zero(); atoms];
            for (i, &var) in basis.iter().enumerate() {
                if var < atoms {
                    probs[var] = &rhs[i] / &delta_r;
                } else {
                    assert!(
                        rhs[i].is_zero(),
                        "artificial variable stuck in the basis with positive value"
                    );
                }
            }
            return OracleOutcome::Feasible(OracleSolution {
                variables: self.variables.clone(),
                probs,
            });
        }

        let mut coefficients = Vec::with_capacity(m);
        for k in 0..m {
            let dual =
                Rational::one() - Rational::new(BigInt::from(obj[atoms + k]), BigInt::from(delta));
            let unscale = Rational::from_integer(BigInt::from(sigma[k]));
            coefficients.push(-dual * unscale);
        }
        let gap: Rational = coefficients
            .iter()
            .zip(&self.targets)
            .map(|(c, t)| c * t)
            .sum();
        OracleOutcome::Infeasible(InfeasibilityCertificate { coefficients, gap })
    }
}

/// Asks whether the system admits a maximally noncontextual description.
pub fn feasible(sys: &CyclicSystem) -> Result<OracleOutcome, OracleError> {
    Ok(FeasibilityProblem::maximal(sys)?.solve())
}

/// Asks whether the system admits a traditional joint (perfect agreement on
/// every connection). Without `force` this refuses inconsistently connected
/// systems outright, since the answer is no a priori; with `force` the
/// simplex runs anyway and produces a genuine refutation.
pub fn feasible_traditional(sys: &CyclicSystem, force: bool) -> Result<OracleOutcome, OracleError> {
    if !force {
        let off: Vec<usize> = sys
            .deltas()
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, _)| i)
            .collect();
        if !off.is_empty() {
            return Err(OracleError::NotConsistentlyConnected { indices: off });
        }
    }
    Ok(FeasibilityProblem::traditional(sys)?.solve())
}
