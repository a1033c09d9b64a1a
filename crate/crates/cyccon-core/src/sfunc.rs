//! Signed-maximum functions over real vectors.
//!
//! For x in R^n, s1(x) is the maximum of sum_k iota_k x_k over sign vectors
//! iota in {-1,+1}^n with an odd number of -1 entries (product -1), and s0(x)
//! is the even-parity analogue. Both have closed forms:
//!
//! ```text
//! s1(x) = sum|x_k| - 2 * [prod x_k > 0] * min|x_k|
//! s0(x) = sum|x_k| - 2 * [prod x_k < 0] * min|x_k|
//! ```
//!
//! because flipping the sign pattern that matches x coordinate-wise costs
//! twice the magnitude of whichever coordinate is sacrificed to fix parity.
//! Every contextuality criterion in this crate is an `s1` evaluation, so this
//! module also computes exact or certified ranges of s1 over coordinate
//! boxes.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{rat, Rational};

/// Enumeration guard: reference enumerations and vertex scans walk 2^n
/// candidates, so refuse inputs where that is no longer interactive.
const MAX_ENUMERATION_DIM: usize = 24;

/// Grid-mode guard on the total number of grid points.
const MAX_GRID_POINTS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SFuncError {
    EmptyInput,
    /// Interval with lower endpoint above the upper one, at this coordinate.
    InvalidInterval(usize),
    /// Conservative range mode needs the odd-parity correction term to vanish
    /// identically on the box; this box attains a positive coordinate product.
    ConservativeModeInapplicable,
    NonPositiveSpacing,
    EnumerationTooLarge(usize),
    GridTooLarge,
}

impl fmt::Display for SFuncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SFuncError::EmptyInput => write!(f, "input vector is empty"),
            SFuncError::InvalidInterval(i) => {
                write!(f, "interval {i} has its lower endpoint above the upper one")
            }
            SFuncError::ConservativeModeInapplicable => write!(
                f,
                "conservative range mode is inapplicable: the box attains a positive \
                 coordinate product with all coordinates nonzero"
            ),
            SFuncError::NonPositiveSpacing => write!(f, "grid spacing must be positive"),
            SFuncError::EnumerationTooLarge(n) => {
                write!(
                    f,
                    "enumeration over 2^{n} candidates refused (limit 2^{MAX_ENUMERATION_DIM})"
                )
            }
            SFuncError::GridTooLarge => {
                write!(
                    f,
                    "grid has more than {MAX_GRID_POINTS} points; coarsen the spacing"
                )
            }
        }
    }
}

impl core::error::Error for SFuncError {}

/// A vector of +-1 coefficients witnessing an s1/s0 value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    fn new(signs: Vec<i8>) -> Self {
        debug_assert!(signs.iter().all(|&s| s == 1 || s == -1));
        SignVector(signs)
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of all coefficients: -1 for odd parity, +1 for even.
    pub fn parity(&self) -> i8 {
        self.0.iter().product()
    }

    /// The signed sum this vector assigns to x.
    pub fn apply(&self, x: &[Rational]) -> Rational {
        assert_eq!(self.0.len(), x.len(), "sign vector length mismatch");
        let mut sum = Rational::zero();
        for (s, v) in self.0.iter().zip(x) {
            if *s > 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        sum
    }

    /// Reorders coefficients: output[i] = input[perm[i]].
    pub(crate) fn permuted(&self, perm: &[usize]) -> SignVector {
        SignVector::new(perm.iter().map(|&j| self.0[j]).collect())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Odd-parity signed maximum by direct enumeration of all 2^(n-1) admissible
/// sign vectors, in lexicographic order with +1 before -1. Returns the value
/// and the lexicographically least maximizer. Reference implementation; the
/// closed form is the fast path.
pub fn s1_enum(x: &[Rational]) -> Result<(Rational, SignVector), SFuncError> {
    s_enum(x, -1)
}

/// Even-parity counterpart of [`s1_enum`].
pub fn s0_enum(x: &[Rational]) -> Result<(Rational, SignVector), SFuncError> {
    s_enum(x, 1)
}

fn s_enum(x: &[Rational], parity: i8) -> Result<(Rational, SignVector), SFuncError> {
    let n = x.len();
    if n == 0 {
        return Err(SFuncError::EmptyInput);
    }
    if n > MAX_ENUMERATION_DIM {
        return Err(SFuncError::EnumerationTooLarge(n));
    }
    let mut best: Option<(Rational, SignVector)> = None;
    let mut signs = vec![1i8; n];
    for pattern in 0u64..(1u64 << (n - 1)) {
        let mut product = 1i8;
        for (i, slot) in signs.iter_mut().enumerate().take(n - 1) {
            let bit = (pattern >> (n - 2 - i)) & 1;
            *slot = if bit == 0 { 1 } else { -1 };
            product *= *slot;
        }
        signs[n - 1] = parity * product;
        let mut sum = Rational::zero();
        for (s, v) in signs.iter().zip(x) {
            if *s > 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        let better = match &best {
            None => true,
            Some((current, _)) => sum > *current,
        };
        if better {
            best = Some((sum, SignVector::new(signs.clone())));
        }
    }
    Ok(best.expect("at least one sign vector"))
}

/// Odd-parity signed maximum via the closed form; O(n) exact arithmetic.
pub fn s1_closed(x: &[Rational]) -> Result<Rational, SFuncError> {
    s_closed(x, -1)
}

/// Even-parity signed maximum via the closed form.
pub fn s0(x: &[Rational]) -> Result<Rational, SFuncError> {
    s_closed(x, 1)
}

/// [`s1_closed`] together with its maximizer, computed without enumeration.
/// The returned vector is the lexicographically least maximizer with +1
/// ordered before -1, matching [`s1_enum`].
pub fn s1_witness(x: &[Rational]) -> Result<(Rational, SignVector), SFuncError> {
    s_fast_witness(x, -1)
}

/// Even-parity counterpart of [`s1_witness`].
pub fn s0_witness(x: &[Rational]) -> Result<(Rational, SignVector), SFuncError> {
    s_fast_witness(x, 1)
}

fn s_closed(x: &[Rational], parity: i8) -> Result<Rational, SFuncError> {
    if x.is_empty() {
        return Err(SFuncError::EmptyInput);
    }
    let mut sum_abs = Rational::zero();
    let mut min_abs: Option<Rational> = None;
    let mut negatives = 0usize;
    let mut has_zero = false;
    for v in x {
        let a = v.abs();
        if v.is_negative() {
            negatives += 1;
        } else if v.is_zero() {
            has_zero = true;
        }
        match &min_abs {
            None => min_abs = Some(a.clone()),
            Some(m) if a < *m => min_abs = Some(a.clone()),
            _ => {}
        }
        sum_abs += a;
    }
    let product_sign: i8 = if has_zero {
        0
    } else if negatives.is_multiple_of(2) {
        1
    } else {
        -1
    };
    // The matching sign pattern has product -product_sign relative to the
    // requested parity: a correction is paid exactly when the pattern that
    // realizes sum|x| sits on the wrong side.
    let correction_needed = product_sign == -parity;
    let min_abs = min_abs.expect("nonempty input");
    if correction_needed {
        Ok(sum_abs - rat(2, 1) * min_abs)
    } else {
        Ok(sum_abs)
    }
}

/// Closed-form argmax with the same value and tie-break as the enumeration:
/// among maximizing sign vectors of the requested parity, the
/// lexicographically least with +1 ordered before -1.
pub(crate) fn s_fast_witness(
    x: &[Rational],
    parity: i8,
) -> Result<(Rational, SignVector), SFuncError> {
    if x.is_empty() {
        return Err(SFuncError::EmptyInput);
    }
    let n = x.len();
    let mut signs: Vec<i8> = Vec::with_capacity(n);
    let mut frees: Vec<usize> = Vec::new();
    let mut nonzero_product = 1i8;
    for (i, v) in x.iter().enumerate() {
        if v.is_zero() {
            frees.push(i);
            signs.push(1);
        } else if v.is_negative() {
            signs.push(-1);
            nonzero_product = -nonzero_product;
        } else {
            signs.push(1);
        }
    }

    let value = s_closed(x, parity)?;
    if let Some(&last_free) = frees.last() {
        // Zero coordinates are free; put the single compensating -1 as late
        // as possible so earlier positions stay +1.
        if nonzero_product != parity {
            signs[last_free] = -1;
        }
        let witness = SignVector::new(signs);
        debug_assert_eq!(witness.apply(x), value);
        return Ok((value, witness));
    }
    if nonzero_product != parity {
        // Must flip one minimal-magnitude coordinate. Flipping a -1 makes the
        // vector lexicographically smaller at that position, so take the
        // earliest such; otherwise flipping a +1 makes it larger, so take the
        // latest.
        let min_abs = x.iter().map(|v| v.abs()).min().expect("nonempty input");
        let mut flip = None;
        for (i, v) in x.iter().enumerate() {
            if v.abs() == min_abs {
                if signs[i] == -1 {
                    flip = Some(i);
                    break;
                }
                flip = Some(match flip {
                    Some(j) if signs[j] == -1 => j,
                    _ => i,
                });
            }
        }
        let flip = flip.expect("a minimal coordinate exists");
        signs[flip] = -signs[flip];
    }
    let witness = SignVector::new(signs);
    debug_assert_eq!(witness.apply(x), value);
    Ok((value, witness))
}

/// Checks both concatenation identities exactly:
///
/// ```text
/// s1(a || b) = max(s0(a) + s1(b), s1(a) + s0(b))
/// s0(a || b) = max(s0(a) + s0(b), s1(a) + s1(b))
/// ```
pub fn split_identity_check(a: &[Rational], b: &[Rational]) -> Result<bool, SFuncError> {
    if a.is_empty() || b.is_empty() {
        return Err(SFuncError::EmptyInput);
    }
    let mut joined = Vec::with_capacity(a.len() + b.len());
    joined.extend_from_slice(a);
    joined.extend_from_slice(b);
    let s0_a = s0(a)?;
    let s1_a = s1_closed(a)?;
    let s0_b = s0(b)?;
    let s1_b = s1_closed(b)?;
    let odd_ok = s1_closed(&joined)? == (&s0_a + &s1_b).max(&s1_a + &s0_b);
    let even_ok = s0(&joined)? == (&s0_a + &s0_b).max(&s1_a + &s1_b);
    Ok(odd_ok && even_ok)
}

/// Checks s0(x) + s1(x) = 2 sum|x_k| - 2 min|x_k| exactly.
pub fn s_pair_identity(x: &[Rational]) -> Result<bool, SFuncError> {
    if x.is_empty() {
        return Err(SFuncError::EmptyInput);
    }
    let sum_abs: Rational = x.iter().map(|v| v.abs()).sum();
    let min_abs = x.iter().map(|v| v.abs()).min().expect("nonempty input");
    let rhs = rat(2, 1) * (sum_abs - min_abs);
    Ok(s0(x)? + s1_closed(x)? == rhs)
}

/// An axis-aligned box of closed coordinate intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalBox {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalBox {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self, SFuncError> {
        if intervals.is_empty() {
            return Err(SFuncError::EmptyInput);
        }
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            if lo > hi {
                return Err(SFuncError::InvalidInterval(i));
            }
        }
        Ok(IntervalBox { intervals })
    }

    /// A zero-width box: a single point.
    pub fn degenerate(point: Vec<Rational>) -> Result<Self, SFuncError> {
        Self::new(point.into_iter().map(|v| (v.clone(), v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    fn vertex(&self, mask: usize) -> Vec<Rational> {
        self.intervals
            .iter()
            .enumerate()
            .map(|(i, (lo, hi))| {
                if (mask >> i) & 1 == 0 {
                    lo.clone()
                } else {
                    hi.clone()
                }
            })
            .collect()
    }

    /// The point of least coordinate magnitudes: 0 where the interval spans
    /// it, otherwise the endpoint nearest zero.
    pub fn min_magnitude_point(&self) -> Vec<Rational> {
        self.intervals
            .iter()
            .map(|(lo, hi)| {
                if !lo.is_positive() && !hi.is_negative() {
                    Rational::zero()
                } else if lo.is_positive() {
                    lo.clone()
                } else {
                    hi.clone()
                }
            })
            .collect()
    }
}

/// How [`s1_box_range`] certifies the lower end of the range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeMode {
    /// Exact minimum, available only when the odd-parity correction term
    /// vanishes identically on the box.
    Conservative,
    /// Certified lower bound from a grid scan with the given spacing: the
    /// grid minimum minus n*h/2, valid because s1 is 1-Lipschitz in each
    /// coordinate.
    Grid(Rational),
}

/// Range of s1 over a box: (lo, hi). The upper end is always exact, since s1
/// is a maximum of linear functions and thus attains its box maximum at a
/// vertex. The lower end depends on the mode.
pub fn s1_box_range(
    bx: &IntervalBox,
    mode: &RangeMode,
) -> Result<(Rational, Rational), SFuncError> {
    let n = bx.dim();
    if n > MAX_ENUMERATION_DIM {
        return Err(SFuncError::EnumerationTooLarge(n));
    }
    let mut hi: Option<Rational> = None;
    for mask in 0usize..(1 << n) {
        let value = s1_closed(&bx.vertex(mask))?;
        if hi.as_ref().is_none_or(|h| value > *h) {
            hi = Some(value);
        }
    }
    let hi = hi.expect("nonempty vertex set");

    let lo = match mode {
        RangeMode::Conservative => {
            if !correction_vanishes_on(bx) {
                return Err(SFuncError::ConservativeModeInapplicable);
            }
            // With the correction term identically zero, s1 = sum|x_k| on the
            // whole box, so the minimum sits at the least-magnitude point.
            s1_closed(&bx.min_magnitude_point())?
        }
        RangeMode::Grid(spacing) => grid_minimum(bx, spacing)?,
    };
    Ok((lo, hi))
}

/// True when no point of the box has all coordinates nonzero with a positive
/// product, i.e. the odd-parity correction term is identically zero there.
fn correction_vanishes_on(bx: &IntervalBox) -> bool {
    let mut product = 1i8;
    for (lo, hi) in bx.intervals() {
        if lo.is_zero() && hi.is_zero() {
            return true;
        }
        let pos = hi.is_positive();
        let neg = lo.is_negative();
        if pos && neg {
            // Both signs attainable: this coordinate can fix the product to
            // be positive whatever the others do.
            return false;
        }
        if neg {
            product = -product;
        }
    }
    product < 0
}

fn grid_minimum(bx: &IntervalBox, spacing: &Rational) -> Result<Rational, SFuncError> {
    if !spacing.is_positive() {
        return Err(SFuncError::NonPositiveSpacing);
    }
    let n = bx.dim();
    let mut axes: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut total: u64 = 1;
    for (lo, hi) in bx.intervals() {
        let width = hi - lo;
        if width.is_zero() {
            axes.push(vec![lo.clone()]);
            continue;
        }
        let steps = (&width / spacing).ceil().to_integer();
        let steps: u64 = u64::try_from(&steps)
            .ok()
            .filter(|s| *s < MAX_GRID_POINTS)
            .ok_or(SFuncError::GridTooLarge)?;
        total = total
            .checked_mul(steps + 1)
            .filter(|t| *t <= MAX_GRID_POINTS)
            .ok_or(SFuncError::GridTooLarge)?;
        let step = width / Rational::from_integer(steps.into());
        let axis = (0..=steps)
            .map(|k| lo + &step * Rational::from_integer(k.into()))
            .collect();
        axes.push(axis);
    }

    let mut index = vec![0usize; n];
    let mut point: Vec<Rational> = axes.iter().map(|a| a[0].clone()).collect();
    let mut min: Option<Rational> = None;
    loop {
        let value = s1_closed(&point)?;
        if min.as_ref().is_none_or(|m| value < *m) {
            min = Some(value);
        }
        // Mixed-radix increment over the grid indices.
        let mut axis = 0;
        loop {
            if axis == n {
                let slack = rat(1, 2) * Rational::from_integer(n.into()) * spacing;
                return Ok(min.expect("grid has at least one point") - slack);
            }
            index[axis] += 1;
            if index[axis] < axes[axis].len() {
                point[axis] = axes[axis][index[axis]].clone();
                break;
            }
            index[axis] = 0;
            point[axis] = axes[axis][0].clone();
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn v(values: &[(i64, i64)]) -> Vec<Rational> {
        values.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn enumerates_small_cases() {
        let (value, witness) = s1_enum(&v(&[(1, 1), (1, 1)])).unwrap();
        assert_eq!(value, rat_int(0));
        assert_eq!(witness.signs(), &[1, -1]);

        let (value, witness) = s1_enum(&v(&[(1, 1), (1, 1), (1, 1), (-1, 1)])).unwrap();
        assert_eq!(value, rat_int(4));
        assert_eq!(witness.signs(), &[1, 1, 1, -1]);

        let (value, witness) = s0_enum(&v(&[(1, 1), (1, 1)])).unwrap();
        assert_eq!(value, rat_int(2));
        assert_eq!(witness.signs(), &[1, 1]);
    }

    #[test]
    fn single_coordinate_is_signed_identity() {
        let x = v(&[(-1, 1)]);
        assert_eq!(s1_closed(&x).unwrap(), rat_int(1));
        assert_eq!(s0(&x).unwrap(), rat_int(-1));
        let x = v(&[(3, 4)]);
        assert_eq!(s1_closed(&x).unwrap(), rat(-3, 4));
        assert_eq!(s0(&x).unwrap(), rat(3, 4));
    }

    #[test]
    fn closed_form_matches_enumeration_on_handpicked_vectors() {
        let cases = [
            v(&[(1, 1), (1, 1)]),
            v(&[(0, 1), (0, 1), (0, 1)]),
            v(&[(-1, 2), (1, 3), (0, 1), (5, 7)]),
            v(&[(1, 1), (-1, 1), (1, 1), (-1, 1), (1, 1)]),
            v(&[
                (-805, 1000),
                (-804, 1000),
                (-709, 1000),
                (-810, 1000),
                (-766, 1000),
            ]),
        ];
        for x in &cases {
            let (ev, ew) = s1_enum(x).unwrap();
            assert_eq!(s1_closed(x).unwrap(), ev);
            let (fv, fw) = s_fast_witness(x, -1).unwrap();
            assert_eq!(fv, ev);
            assert_eq!(fw, ew, "witness tie-break diverged on {x:?}");

            let (ev0, ew0) = s0_enum(x).unwrap();
            assert_eq!(s0(x).unwrap(), ev0);
            let (fv0, fw0) = s_fast_witness(x, 1).unwrap();
            assert_eq!(fv0, ev0);
            assert_eq!(fw0, ew0);
        }
    }

    #[test]
    fn reference_correlations_have_no_correction() {
        let corrs = v(&[
            (-805, 1000),
            (-804, 1000),
            (-709, 1000),
            (-810, 1000),
            (-766, 1000),
        ]);
        let (value, witness) = s1_enum(&corrs).unwrap();
        assert_eq!(value, rat(3894, 1000));
        assert_eq!(witness.signs(), &[-1, -1, -1, -1, -1]);
        assert_eq!(witness.parity(), -1);
    }

    #[test]
    fn identities_hold_on_samples() {
        let a = v(&[(1, 2), (-1, 3)]);
        let b = v(&[(0, 1), (7, 9), (-2, 5)]);
        assert!(split_identity_check(&a, &b).unwrap());
        assert!(s_pair_identity(&a).unwrap());
        assert!(s_pair_identity(&b).unwrap());
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert_eq!(s1_enum(&[]), Err(SFuncError::EmptyInput));
        assert_eq!(s1_closed(&[]), Err(SFuncError::EmptyInput));
        assert_eq!(s0(&[]), Err(SFuncError::EmptyInput));
        assert!(IntervalBox::new(alloc::vec![]).is_err());
    }

    fn reference_box() -> IntervalBox {
        IntervalBox::new(alloc::vec![
            (rat(-833, 1000), rat(-777, 1000)),
            (rat(-846, 1000), rat(-762, 1000)),
            (rat(-751, 1000), rat(-667, 1000)),
            (rat(-838, 1000), rat(-782, 1000)),
            (rat(-794, 1000), rat(-738, 1000)),
        ])
        .unwrap()
    }

    #[test]
    fn conservative_range_on_reference_box() {
        let (lo, hi) = s1_box_range(&reference_box(), &RangeMode::Conservative).unwrap();
        assert_eq!(lo, rat(3726, 1000));
        assert_eq!(hi, rat(4062, 1000));
    }

    #[test]
    fn degenerate_box_collapses_to_point_value() {
        let bx = IntervalBox::degenerate(v(&[
            (-805, 1000),
            (-804, 1000),
            (-709, 1000),
            (-810, 1000),
            (-766, 1000),
        ]))
        .unwrap();
        let (lo, hi) = s1_box_range(&bx, &RangeMode::Conservative).unwrap();
        assert_eq!(lo, rat(3894, 1000));
        assert_eq!(hi, rat(3894, 1000));
    }

    #[test]
    fn conservative_mode_rejects_positive_products() {
        let bx = IntervalBox::new(alloc::vec![
            (rat(1, 2), rat_int(1)),
            (rat(1, 2), rat_int(1)),
        ])
        .unwrap();
        assert_eq!(
            s1_box_range(&bx, &RangeMode::Conservative),
            Err(SFuncError::ConservativeModeInapplicable)
        );

        let straddling = IntervalBox::new(alloc::vec![
            (rat(-1, 10), rat(1, 10)),
            (rat(-1, 10), rat(1, 10)),
        ])
        .unwrap();
        assert_eq!(
            s1_box_range(&straddling, &RangeMode::Conservative),
            Err(SFuncError::ConservativeModeInapplicable)
        );
    }

    #[test]
    fn conservative_mode_accepts_pinned_zero_coordinate() {
        let bx = IntervalBox::new(alloc::vec![
            (rat_int(0), rat_int(0)),
            (rat_int(-1), rat_int(1)),
        ])
        .unwrap();
        let (lo, hi) = s1_box_range(&bx, &RangeMode::Conservative).unwrap();
        assert_eq!(lo, rat_int(0));
        assert_eq!(hi, rat_int(1));
    }

    #[test]
    fn grid_mode_certifies_a_lower_bound() {
        let bx = IntervalBox::new(alloc::vec![
            (rat(-1, 10), rat(1, 10)),
            (rat(-1, 10), rat(1, 10)),
        ])
        .unwrap();
        let (lo, hi) = s1_box_range(&bx, &RangeMode::Grid(rat(1, 100))).unwrap();
        // True minimum of |x1 - x2| on this box is 0, at the origin; the
        // certificate gives back the grid minimum minus n*h/2.
        assert_eq!(lo, rat(-1, 100));
        assert_eq!(hi, rat(2, 10));
    }

    #[test]
    fn grid_mode_validates_spacing() {
        let bx = IntervalBox::degenerate(v(&[(1, 2)])).unwrap();
        assert_eq!(
            s1_box_range(&bx, &RangeMode::Grid(rat_int(0))),
            Err(SFuncError::NonPositiveSpacing)
        );
        assert_eq!(
            s1_box_range(&bx, &RangeMode::Grid(rat(-1, 10))),
            Err(SFuncError::NonPositiveSpacing)
        );
    }

    #[test]
    fn grid_mode_refuses_absurd_point_counts() {
        let bx = IntervalBox::new(alloc::vec![
            (rat_int(-1), rat_int(1)),
            (rat_int(-1), rat_int(1)),
            (rat_int(-1), rat_int(1)),
            (rat_int(-1), rat_int(1)),
        ])
        .unwrap();
        assert_eq!(
            s1_box_range(&bx, &RangeMode::Grid(rat(1, 1_000_000))),
            Err(SFuncError::GridTooLarge)
        );
    }
}
