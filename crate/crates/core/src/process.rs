//! Processes indexed by outcome and grid index.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Report, Violation};
use crate::rational::Rational;
use crate::space::FilteredSpace;

/// A table `values[outcome][grid index]`.
///
/// Adaptedness is not enforced on construction: rewards of stopping
/// problems only need to be bounded and measurable, which any finite table
/// is. Use [`validate_adapted`] where adaptedness matters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    values: Vec<Vec<Rational>>,
}

impl Process {
    pub fn new(values: Vec<Vec<Rational>>) -> Self {
        Self { values }
    }

    pub fn from_fn(space: &FilteredSpace, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let values = (0..space.n_outcomes())
            .map(|o| (0..space.n_times()).map(|j| f(o, j)).collect())
            .collect();
        Self { values }
    }

    pub fn constant(space: &FilteredSpace, c: &Rational) -> Self {
        Self::from_fn(space, |_, _| c.clone())
    }

    /// `R_{t_j}(w) = t_j`.
    pub fn time(space: &FilteredSpace) -> Self {
        Self::from_fn(space, |_, j| space.time(j).clone())
    }

    pub fn value(&self, outcome: usize, index: usize) -> &Rational {
        &self.values[outcome][index]
    }

    pub fn row(&self, outcome: usize) -> &[Rational] {
        &self.values[outcome]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn map(&self, mut f: impl FnMut(&Rational) -> Rational) -> Self {
        Self { values: self.values.iter().map(|r| r.iter().map(&mut f).collect()).collect() }
    }

    /// `a * self + b * other`, entry-wise. Shapes must agree.
    pub fn combine(&self, a: &Rational, other: &Process, b: &Rational) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.iter().zip(y).map(|(x, y)| a * x + b * y).collect())
            .collect();
        Self { values }
    }

    pub fn min(&self) -> Rational {
        self.values.iter().flatten().min().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max(&self) -> Rational {
        self.values.iter().flatten().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn shape_report(&self, space: &FilteredSpace) -> Report {
        let mut report = Report::new();
        if let Some(v) = space.shape_violation(&self.values) {
            report.push(v);
        }
        report
    }
}

/// Empty report iff the process has the right shape and, at every grid
/// index, is constant on every block of the partition there.
pub fn validate_adapted(space: &FilteredSpace, process: &Process) -> Report {
    let mut report = process.shape_report(space);
    if !report.is_valid() {
        return report;
    }
    for level in 0..space.n_times() {
        for block in space.nonconstant_blocks(level, |o| process.value(o, level)) {
            report.push(Violation::NotAdapted { level, block });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::build_space;
    use alloc::vec;

    fn coarse_space() -> FilteredSpace {
        build_space(
            vec!["w1".into(), "w2".into()],
            vec![rat(1, 2), rat(1, 2)],
            vec![int(0), rat(1, 2), int(1)],
            vec![vec![vec![0, 1]], vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
        )
        .unwrap()
    }

    #[test]
    fn constant_and_time_processes_are_adapted() {
        let s = coarse_space();
        assert!(validate_adapted(&s, &Process::constant(&s, &rat(3, 7))).is_valid());
        assert!(validate_adapted(&s, &Process::time(&s)).is_valid());
    }

    #[test]
    fn differing_values_on_coarse_block() {
        let s = coarse_space();
        let p = Process::new(vec![vec![int(0), int(1), int(2)], vec![int(1), int(1), int(2)]]);
        let report = validate_adapted(&s, &p);
        assert_eq!(report.violations(), &[Violation::NotAdapted { level: 0, block: 0 }]);
    }

    #[test]
    fn wrong_shape() {
        let s = coarse_space();
        let p = Process::new(vec![vec![int(0); 2]; 2]);
        assert!(validate_adapted(&s, &p).has_shape_error());
    }

    #[test]
    fn combine_and_bounds() {
        let s = coarse_space();
        let t = Process::time(&s);
        let c = Process::constant(&s, &int(2));
        let mix = t.combine(&int(2), &c, &rat(-1, 2));
        assert_eq!(mix.value(1, 2), &int(1));
        assert_eq!(mix.min(), int(-1));
        assert_eq!(mix.max(), int(1));
    }
}
