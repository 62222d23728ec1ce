//! Step functions on the randomization interval `[0, 1]`.

use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    /// Fewer than two breaks, or `values.len() != breaks.len() - 1`.
    Length,
    FirstBreakNotZero,
    LastBreakNotOne,
    NotIncreasing { index: usize },
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::Length => f.write_str("need k+1 breaks and k values with k >= 1"),
            StepError::FirstBreakNotZero => f.write_str("first break must be 0"),
            StepError::LastBreakNotOne => f.write_str("last break must be 1"),
            StepError::NotIncreasing { index } => {
                write!(f, "breaks not strictly increasing at index {index}")
            }
        }
    }
}

impl core::error::Error for StepError {}

/// A map `[0, 1] -> grid index` that is constant on each `[r_{i-1}, r_i)`,
/// for breaks `0 = r_0 < r_1 < ... < r_k = 1`. The point `r = 1` belongs to
/// the last interval. Values at single points are irrelevant for every
/// quantity computed here, since only interval lengths are ever measured.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breaks: Vec<Rational>,
    values: Vec<usize>,
}

impl StepFunction {
    pub fn new(breaks: Vec<Rational>, values: Vec<usize>) -> Result<Self, StepError> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(StepError::Length);
        }
        if !breaks[0].is_zero() {
            return Err(StepError::FirstBreakNotZero);
        }
        if !breaks[breaks.len() - 1].is_one() {
            return Err(StepError::LastBreakNotOne);
        }
        if let Some(i) = breaks.windows(2).position(|w| w[1] <= w[0]) {
            return Err(StepError::NotIncreasing { index: i + 1 });
        }
        Ok(Self { breaks, values })
    }

    pub fn constant(value: usize) -> Self {
        Self { breaks: vec![Rational::zero(), Rational::one()], values: vec![value] }
    }

    /// Builds from consecutive `(length, value)` pieces; zero-length pieces are
    /// dropped. The lengths must sum to one and at least one must be positive.
    pub fn from_pieces<'a>(
        pieces: impl IntoIterator<Item = (&'a Rational, usize)>,
    ) -> Result<Self, StepError> {
        let mut breaks = vec![Rational::zero()];
        let mut values = Vec::new();
        let mut at = Rational::zero();
        for (len, value) in pieces {
            if len.is_zero() {
                continue;
            }
            at += len;
            breaks.push(at.clone());
            values.push(value);
        }
        Self::new(breaks, values)
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// `(lo, hi, value)` for each interval `[lo, hi)`.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, usize)> + '_ {
        self.breaks.windows(2).zip(&self.values).map(|(w, &v)| (&w[0], &w[1], v))
    }

    /// `(length, value)` for each interval.
    pub fn lengths(&self) -> impl Iterator<Item = (Rational, usize)> + '_ {
        self.pieces().map(|(lo, hi, v)| (hi - lo, v))
    }

    /// Value at `r` under the half-open convention.
    pub fn eval(&self, r: &Rational) -> usize {
        let idx = self.breaks[1..self.breaks.len() - 1].partition_point(|b| b <= r);
        self.values[idx]
    }

    /// Lebesgue measure of `{r : value(r) = index}`.
    pub fn mass_at(&self, index: usize) -> Rational {
        self.measure_where(|v| v == index)
    }

    /// Lebesgue measure of `{r : value(r) <= index}`.
    pub fn mass_up_to(&self, index: usize) -> Rational {
        self.measure_where(|v| v <= index)
    }

    pub fn measure_where(&self, mut pred: impl FnMut(usize) -> bool) -> Rational {
        self.lengths()
            .filter(|&(_, v)| pred(v))
            .fold(Rational::zero(), |acc, (len, _)| acc + len)
    }

    /// The masses `lambda({r : value(r) = j})` for `j in 0..n`.
    pub fn masses(&self, n: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); n];
        for (len, v) in self.lengths() {
            out[v] += len;
        }
        out
    }

    /// Merges adjacent intervals with equal values.
    pub fn canonical(&self) -> Self {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut values: Vec<usize> = Vec::new();
        for (_, hi, v) in self.pieces() {
            if values.last() == Some(&v) {
                *breaks.last_mut().unwrap() = hi.clone();
            } else {
                values.push(v);
                breaks.push(hi.clone());
            }
        }
        Self { breaks, values }
    }

    /// Lebesgue measure of the symmetric difference of `{r : self(r) <= index}`
    /// and `{r : other(r) <= index}`.
    pub fn sublevel_symmetric_difference(&self, other: &StepFunction, index: usize) -> Rational {
        let mut total = Rational::zero();
        for_common_refinement(&[self, other], |lo, hi, vals| {
            if (vals[0] <= index) != (vals[1] <= index) {
                total += hi - lo;
            }
        });
        total
    }
}

/// Calls `f(lo, hi, values)` for each interval of the common refinement of
/// `sections`, where `values[i]` is the value of `sections[i]` on `[lo, hi)`.
pub fn for_common_refinement(
    sections: &[&StepFunction],
    mut f: impl FnMut(&Rational, &Rational, &[usize]),
) {
    let mut cursor = vec![0usize; sections.len()];
    let mut values: Vec<usize> = sections.iter().map(|s| s.values[0]).collect();
    let mut lo = Rational::zero();
    loop {
        // next break strictly after lo across all sections
        let hi = sections
            .iter()
            .zip(&cursor)
            .map(|(s, &c)| &s.breaks[c + 1])
            .min()
            .cloned()
            .expect("at least one section");
        f(&lo, &hi, &values);
        if hi.is_one() {
            break;
        }
        for (i, s) in sections.iter().enumerate() {
            if s.breaks[cursor[i] + 1] == hi {
                cursor[i] += 1;
                values[i] = s.values[cursor[i]];
            }
        }
        lo = hi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn half(a: usize, b: usize) -> StepFunction {
        StepFunction::new(vec![int(0), rat(1, 2), int(1)], vec![a, b]).unwrap()
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(StepFunction::new(vec![int(0)], vec![]), Err(StepError::Length));
        assert_eq!(StepFunction::new(vec![int(0), int(1)], vec![0, 1]), Err(StepError::Length));
        assert_eq!(
            StepFunction::new(vec![rat(1, 3), int(1)], vec![0]),
            Err(StepError::FirstBreakNotZero)
        );
        assert_eq!(
            StepFunction::new(vec![int(0), rat(2, 3)], vec![0]),
            Err(StepError::LastBreakNotOne)
        );
        assert_eq!(
            StepFunction::new(vec![int(0), rat(1, 2), rat(1, 2), int(1)], vec![0, 1, 2]),
            Err(StepError::NotIncreasing { index: 2 })
        );
    }

    #[test]
    fn evaluates_half_open() {
        let s = half(0, 1);
        assert_eq!(s.eval(&int(0)), 0);
        assert_eq!(s.eval(&rat(3, 10)), 0);
        assert_eq!(s.eval(&rat(1, 2)), 1);
        assert_eq!(s.eval(&int(1)), 1);
        assert_eq!(StepFunction::constant(4).eval(&int(1)), 4);
    }

    #[test]
    fn masses_and_cdf() {
        let s = StepFunction::new(vec![int(0), rat(1, 3), rat(1, 2), int(1)], vec![2, 0, 2]).unwrap();
        assert_eq!(s.mass_at(2), rat(5, 6));
        assert_eq!(s.mass_up_to(1), rat(1, 6));
        assert_eq!(s.masses(3), vec![rat(1, 6), int(0), rat(5, 6)]);
    }

    #[test]
    fn canonical_merges_equal_neighbours() {
        let s = StepFunction::new(vec![int(0), rat(1, 4), rat(1, 2), int(1)], vec![1, 1, 0]).unwrap();
        assert_eq!(s.canonical(), StepFunction::new(vec![int(0), rat(1, 2), int(1)], vec![1, 0]).unwrap());
        assert_eq!(half(0, 0).canonical(), StepFunction::constant(0));
    }

    #[test]
    fn symmetric_difference_of_sublevel_sets() {
        // [0,1/2) vs [1/2,1]
        assert_eq!(half(0, 1).sublevel_symmetric_difference(&half(1, 0), 0), int(1));
        assert_eq!(half(0, 1).sublevel_symmetric_difference(&half(1, 0), 1), int(0));
        let third = StepFunction::new(vec![int(0), rat(1, 3), int(1)], vec![0, 1]).unwrap();
        assert_eq!(half(0, 1).sublevel_symmetric_difference(&third, 0), rat(1, 6));
    }

    #[test]
    fn from_pieces_skips_empty() {
        let s = StepFunction::from_pieces([(&rat(1, 2), 0), (&int(0), 1), (&rat(1, 2), 2)]).unwrap();
        assert_eq!(s.values(), &[0, 2]);
        assert!(StepFunction::from_pieces([(&rat(1, 2), 0)]).is_err());
    }
}
