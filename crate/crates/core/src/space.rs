//! Finite filtered probability spaces.
//!
//! A space is a finite outcome set with exact probabilities, a grid of times
//! `0 = t_0 < t_1 < ... < t_m = T` and one partition of the outcomes per grid
//! point. The partition at `t_j` is the information available at time `t_j`;
//! measurability with respect to it means constancy on its blocks.
//!
//! With finitely many atoms of positive probability, completeness and right
//! continuity of the filtration hold trivially, so there is nothing further to
//! check.

use core::fmt;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceError {
    NoOutcomes,
    DuplicateOutcome { label: String },
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
    NonPositiveProb { outcome: usize },
    ProbsNotSummingToOne { total: Rational },
    EmptyGrid,
    GridNotStartingAtZero,
    GridNotIncreasing { index: usize },
    NotAPartition { level: usize, reason: PartitionDefect },
    RefinementViolated { level: usize, block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionDefect {
    EmptyBlock,
    UnknownOutcome(usize),
    Overlap(usize),
    Missing(usize),
}

impl fmt::Display for SpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceError::NoOutcomes => f.write_str("outcome set is empty"),
            SpaceError::DuplicateOutcome { label } => write!(f, "duplicate outcome label {label:?}"),
            SpaceError::ShapeMismatch { what, expected, found } => {
                write!(f, "{what}: expected {expected} entries, found {found}")
            }
            SpaceError::NonPositiveProb { outcome } => {
                write!(f, "outcome {outcome} has non-positive probability")
            }
            SpaceError::ProbsNotSummingToOne { total } => {
                write!(f, "probabilities sum to {total}, not 1")
            }
            SpaceError::EmptyGrid => f.write_str("time grid is empty"),
            SpaceError::GridNotStartingAtZero => f.write_str("time grid must start at 0"),
            SpaceError::GridNotIncreasing { index } => {
                write!(f, "time grid not strictly increasing at index {index}")
            }
            SpaceError::NotAPartition { level, reason } => {
                write!(f, "partition at level {level} is not a partition: ")?;
                match reason {
                    PartitionDefect::EmptyBlock => f.write_str("empty block"),
                    PartitionDefect::UnknownOutcome(o) => write!(f, "unknown outcome {o}"),
                    PartitionDefect::Overlap(o) => write!(f, "outcome {o} in several blocks"),
                    PartitionDefect::Missing(o) => write!(f, "outcome {o} not covered"),
                }
            }
            SpaceError::RefinementViolated { level, block } => write!(
                f,
                "block {block} at level {level} is not contained in a block of level {}",
                level.saturating_sub(1)
            ),
        }
    }
}

impl core::error::Error for SpaceError {}

/// A partition of `0..n`, stored canonically: each block sorted, blocks
/// ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionDefect> {
        let mut block_of = vec![usize::MAX; n];
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PartitionDefect::EmptyBlock);
            }
            block.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        for (id, block) in blocks.iter().enumerate() {
            for &o in block {
                let slot = block_of.get_mut(o).ok_or(PartitionDefect::UnknownOutcome(o))?;
                if *slot != usize::MAX {
                    return Err(PartitionDefect::Overlap(o));
                }
                *slot = id;
            }
        }
        if let Some(o) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(PartitionDefect::Missing(o));
        }
        Ok(Self { blocks, block_of })
    }

    /// The one-block partition.
    pub fn trivial(n: usize) -> Self {
        Self { blocks: vec![(0..n).collect()], block_of: vec![0; n] }
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Self { blocks: (0..n).map(|o| vec![o]).collect(), block_of: (0..n).collect() }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, id: usize) -> &[usize] {
        &self.blocks[id]
    }

    pub fn block_of(&self, outcome: usize) -> usize {
        self.block_of[outcome]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Ids of blocks of `self` that are not contained in a single block of `coarser`.
    pub fn refinement_defects(&self, coarser: &Partition) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, block)| {
                let parent = coarser.block_of(block[0]);
                block.iter().any(|&o| coarser.block_of(o) != parent)
            })
            .map(|(id, _)| id)
            .collect()
    }

    pub fn refines(&self, coarser: &Partition) -> bool {
        self.refinement_defects(coarser).is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredSpace {
    outcomes: Vec<String>,
    probs: Vec<Rational>,
    grid: Vec<Rational>,
    levels: Vec<Partition>,
}

/// Validates raw inputs and builds a space. Every violated invariant is
/// reported, not just the first.
///
/// `partitions[j]` lists the blocks at grid index `j` as outcome indices.
pub fn build_space(
    outcomes: Vec<String>,
    probs: Vec<Rational>,
    grid: Vec<Rational>,
    partitions: Vec<Vec<Vec<usize>>>,
) -> Result<FilteredSpace, Vec<SpaceError>> {
    let mut errors = Vec::new();
    let n = outcomes.len();
    if n == 0 {
        errors.push(SpaceError::NoOutcomes);
    }
    for (i, label) in outcomes.iter().enumerate() {
        if outcomes[..i].contains(label) {
            errors.push(SpaceError::DuplicateOutcome { label: label.clone() });
        }
    }
    if probs.len() != n {
        errors.push(SpaceError::ShapeMismatch { what: "probs", expected: n, found: probs.len() });
    }
    for (i, p) in probs.iter().enumerate() {
        if !p.is_positive() {
            errors.push(SpaceError::NonPositiveProb { outcome: i });
        }
    }
    let total: Rational = probs.iter().sum();
    if !total.is_one() {
        errors.push(SpaceError::ProbsNotSummingToOne { total });
    }
    check_grid(&grid, &mut errors);
    if partitions.len() != grid.len() {
        errors.push(SpaceError::ShapeMismatch {
            what: "partitions",
            expected: grid.len(),
            found: partitions.len(),
        });
    }
    let mut levels = Vec::with_capacity(partitions.len());
    for (level, blocks) in partitions.into_iter().enumerate() {
        match Partition::new(n, blocks) {
            Ok(p) => levels.push(p),
            Err(reason) => errors.push(SpaceError::NotAPartition { level, reason }),
        }
    }
    if errors.is_empty() {
        check_refinement(&levels, &mut errors);
    }
    if errors.is_empty() {
        Ok(FilteredSpace { outcomes, probs, grid, levels })
    } else {
        Err(errors)
    }
}

fn check_grid(grid: &[Rational], errors: &mut Vec<SpaceError>) {
    match grid.first() {
        None => errors.push(SpaceError::EmptyGrid),
        Some(t0) if !t0.is_zero() => errors.push(SpaceError::GridNotStartingAtZero),
        Some(_) => {}
    }
    for (index, w) in grid.windows(2).enumerate() {
        if w[1] <= w[0] {
            errors.push(SpaceError::GridNotIncreasing { index: index + 1 });
        }
    }
}

fn check_refinement(levels: &[Partition], errors: &mut Vec<SpaceError>) {
    for (j, w) in levels.windows(2).enumerate() {
        for block in w[1].refinement_defects(&w[0]) {
            errors.push(SpaceError::RefinementViolated { level: j + 1, block });
        }
    }
}

impl FilteredSpace {
    /// Builds a space whose atoms may carry zero probability. Used for the
    /// lifted spaces of stopping games, where null atoms are kept so that the
    /// filtration does not depend on the opponent's strategy.
    pub(crate) fn with_null_atoms(
        outcomes: Vec<String>,
        probs: Vec<Rational>,
        grid: Vec<Rational>,
        levels: Vec<Partition>,
    ) -> Self {
        debug_assert!(probs.iter().all(|p| !p.is_negative()));
        debug_assert!(probs.iter().sum::<Rational>().is_one());
        debug_assert_eq!(levels.len(), grid.len());
        Self { outcomes, probs, grid, levels }
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// Number of grid points, `m + 1`.
    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    /// The terminal grid index `m`.
    pub fn last(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn horizon(&self) -> &Rational {
        &self.grid[self.last()]
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn label(&self, outcome: usize) -> &str {
        &self.outcomes[outcome]
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> &Rational {
        &self.probs[outcome]
    }

    /// True for atoms of probability zero (only possible on lifted spaces).
    pub fn is_null(&self, outcome: usize) -> bool {
        self.probs[outcome].is_zero()
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    pub fn time(&self, index: usize) -> &Rational {
        &self.grid[index]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.levels
    }

    pub fn partition(&self, level: usize) -> &Partition {
        &self.levels[level]
    }

    /// Id of the block of the partition at `level` that contains `outcome`.
    pub fn atom_of(&self, level: usize, outcome: usize) -> Result<usize, Error> {
        let partition = self.levels.get(level).ok_or(Error::IndexOutOfRange {
            what: "grid",
            index: level,
            len: self.levels.len(),
        })?;
        if outcome >= self.n_outcomes() {
            return Err(Error::IndexOutOfRange {
                what: "outcome",
                index: outcome,
                len: self.n_outcomes(),
            });
        }
        Ok(partition.block_of(outcome))
    }

    /// Blocks at `level` on which `value` is not constant over the non-null
    /// atoms. Null atoms are ignored, since measurability is up to null sets.
    pub fn nonconstant_blocks<T, F>(&self, level: usize, mut value: F) -> Vec<usize>
    where
        T: PartialEq,
        F: FnMut(usize) -> T,
    {
        let mut bad = Vec::new();
        for (id, block) in self.levels[level].blocks().iter().enumerate() {
            let mut first: Option<T> = None;
            for &o in block.iter().filter(|&&o| !self.is_null(o)) {
                let v = value(o);
                match &first {
                    None => first = Some(v),
                    Some(f) if *f != v => {
                        bad.push(id);
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        bad
    }

    /// Checks that a table has the `outcomes x grid` shape of this space.
    pub(crate) fn shape_violation<R: AsRef<[T]>, T>(
        &self,
        rows: &[R],
    ) -> Option<crate::error::Violation> {
        let expected = (self.n_outcomes(), self.n_times());
        let bad = rows.len() != expected.0 || rows.iter().any(|r| r.as_ref().len() != expected.1);
        bad.then(|| crate::error::Violation::Shape {
            expected,
            found: (rows.len(), rows.iter().map(|r| r.as_ref().len()).find(|&l| l != expected.1).unwrap_or(expected.1)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::string::ToString;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| alloc::format!("w{i}")).collect()
    }

    #[test]
    fn two_point_uniform_space() {
        let s = build_space(
            labels(2),
            vec![rat(1, 2), rat(1, 2)],
            vec![int(0), int(1)],
            vec![vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
        )
        .unwrap();
        assert_eq!(s.n_outcomes(), 2);
        assert_eq!(s.last(), 1);
        assert_eq!(s.atom_of(0, 0).unwrap(), 0);
        assert_eq!(s.partition(0).block(s.atom_of(0, 0).unwrap()), &[0]);
    }

    #[test]
    fn single_outcome_space() {
        let s = build_space(labels(1), vec![int(1)], vec![int(0), int(1)], vec![vec![vec![0]]; 2])
            .unwrap();
        assert_eq!(s.horizon(), &int(1));
    }

    #[test]
    fn coarse_then_fine() {
        let s = build_space(
            labels(2),
            vec![rat(1, 2), rat(1, 2)],
            vec![int(0), int(1)],
            vec![vec![vec![1, 0]], vec![vec![1], vec![0]]],
        )
        .unwrap();
        assert_eq!(s.partition(0).block(s.atom_of(0, 0).unwrap()), &[0, 1]);
        assert_eq!(s.atom_of(0, 1).unwrap(), s.atom_of(0, 0).unwrap());
        assert_eq!(s.partition(1).block(s.atom_of(1, 1).unwrap()), &[1]);
        assert!(matches!(s.atom_of(2, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(s.atom_of(0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let errs = build_space(
            labels(2),
            vec![rat(1, 2), rat(1, 3)],
            vec![int(0), int(1)],
            vec![vec![vec![0], vec![1]]; 2],
        )
        .unwrap_err();
        assert_eq!(errs, vec![SpaceError::ProbsNotSummingToOne { total: rat(5, 6) }]);
    }

    #[test]
    fn collects_every_violation() {
        let errs = build_space(
            labels(3),
            vec![int(0), rat(1, 2), rat(1, 2)],
            vec![int(1), int(1)],
            vec![vec![vec![0, 1], vec![2]], vec![vec![0], vec![1, 2]]],
        )
        .unwrap_err();
        assert!(errs.contains(&SpaceError::NonPositiveProb { outcome: 0 }));
        assert!(errs.contains(&SpaceError::GridNotStartingAtZero));
        assert!(errs.contains(&SpaceError::GridNotIncreasing { index: 1 }));
    }

    #[test]
    fn refinement_is_enforced() {
        let errs = build_space(
            labels(3),
            vec![rat(1, 3); 3],
            vec![int(0), int(1)],
            vec![vec![vec![0, 1], vec![2]], vec![vec![0], vec![1, 2]]],
        )
        .unwrap_err();
        assert_eq!(errs, vec![SpaceError::RefinementViolated { level: 1, block: 1 }]);
    }

    #[test]
    fn partition_defects() {
        assert_eq!(Partition::new(2, vec![vec![0]]), Err(PartitionDefect::Missing(1)));
        assert_eq!(Partition::new(2, vec![vec![0, 1], vec![1]]), Err(PartitionDefect::Overlap(1)));
        assert_eq!(Partition::new(2, vec![vec![0, 1], vec![]]), Err(PartitionDefect::EmptyBlock));
        assert_eq!(Partition::new(1, vec![vec![0, 3]]), Err(PartitionDefect::UnknownOutcome(3)));
        let err = build_space(labels(1), vec![int(1)], vec![int(0)], vec![vec![vec![0], vec![0]]])
            .unwrap_err();
        assert_eq!(err[0].to_string(), "partition at level 0 is not a partition: outcome 0 in several blocks");
    }

    #[test]
    fn canonical_form_is_deterministic() {
        let a = Partition::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        let b = Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(a, b);
        assert!(Partition::discrete(4).refines(&a));
        assert!(a.refines(&Partition::trivial(4)));
        assert!(!a.refines(&Partition::discrete(4)));
    }
}
