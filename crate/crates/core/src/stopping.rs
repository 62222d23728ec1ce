//! The four representations of stopping times on a grid, and their
//! validators.
//!
//! * [`PureSt`]: a grid index per outcome.
//! * [`MixedSt`]: per outcome, a step function from the randomization
//!   interval `[0, 1]` to grid indices.
//! * [`RandomizedSt`]: per outcome, the cumulative probability of having
//!   stopped by each grid time.
//! * [`DistributionSt`]: a joint mass table on outcomes x grid whose row sums
//!   are the outcome probabilities.
//!
//! Validators return a [`Report`] that is empty iff the object is valid.
//! Block-constancy is only checked across non-null atoms.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Report, Violation};
use crate::rational::{cumulative, Rational};
use crate::space::FilteredSpace;
use crate::step::{for_common_refinement, StepFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureSt {
    pub stop: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedSt {
    pub sections: Vec<StepFunction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedSt {
    /// `paths[outcome][j]` is the probability of having stopped by `t_j`.
    pub paths: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionSt {
    /// `mass[outcome][j]` is the joint probability of `(outcome, t_j)`.
    pub mass: Vec<Vec<Rational>>,
}

/// `delta^t` restricted to atoms: `mass[outcome] = delta({outcome} x [0, t])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubMeasure {
    pub mass: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Pure,
    Mixed,
    Randomized,
    Distribution,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Pure => "pure",
            Kind::Mixed => "mixed",
            Kind::Randomized => "randomized",
            Kind::Distribution => "distribution",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoppingTime {
    Pure(PureSt),
    Mixed(MixedSt),
    Randomized(RandomizedSt),
    Distribution(DistributionSt),
}

impl StoppingTime {
    pub fn kind(&self) -> Kind {
        match self {
            StoppingTime::Pure(_) => Kind::Pure,
            StoppingTime::Mixed(_) => Kind::Mixed,
            StoppingTime::Randomized(_) => Kind::Randomized,
            StoppingTime::Distribution(_) => Kind::Distribution,
        }
    }

    pub fn validate(&self, space: &FilteredSpace) -> Report {
        match self {
            StoppingTime::Pure(s) => validate_pure(space, s),
            StoppingTime::Mixed(m) => validate_mixed(space, m),
            StoppingTime::Randomized(r) => validate_randomized(space, r),
            StoppingTime::Distribution(d) => validate_distribution(space, d),
        }
    }
}

impl From<PureSt> for StoppingTime {
    fn from(v: PureSt) -> Self {
        StoppingTime::Pure(v)
    }
}

impl From<MixedSt> for StoppingTime {
    fn from(v: MixedSt) -> Self {
        StoppingTime::Mixed(v)
    }
}

impl From<RandomizedSt> for StoppingTime {
    fn from(v: RandomizedSt) -> Self {
        StoppingTime::Randomized(v)
    }
}

impl From<DistributionSt> for StoppingTime {
    fn from(v: DistributionSt) -> Self {
        StoppingTime::Distribution(v)
    }
}

impl MixedSt {
    /// Section-wise canonical form (adjacent equal intervals merged).
    pub fn canonical(&self) -> Self {
        Self { sections: self.sections.iter().map(StepFunction::canonical).collect() }
    }
}

fn length_violation(space: &FilteredSpace, len: usize) -> Option<Violation> {
    (len != space.n_outcomes()).then(|| Violation::Shape {
        expected: (space.n_outcomes(), space.n_times()),
        found: (len, space.n_times()),
    })
}

/// `{w : stop(w) <= t_j}` must be a union of blocks at level `j`, for every `j`.
pub fn validate_pure(space: &FilteredSpace, st: &PureSt) -> Report {
    let mut report = Report::new();
    if let Some(v) = length_violation(space, st.stop.len()) {
        report.push(v);
        return report;
    }
    for (outcome, &index) in st.stop.iter().enumerate() {
        if index > space.last() {
            report.push(Violation::IndexOutOfRange { outcome, index });
        }
    }
    if !report.is_valid() {
        return report;
    }
    for level in 0..space.n_times() {
        for block in space.nonconstant_blocks(level, |o| st.stop[o] <= level) {
            report.push(Violation::NotStopping { level, block });
        }
    }
    report
}

fn mixed_shape(space: &FilteredSpace, st: &MixedSt) -> Report {
    let mut report = Report::new();
    if let Some(v) = length_violation(space, st.sections.len()) {
        report.push(v);
        return report;
    }
    for (outcome, section) in st.sections.iter().enumerate() {
        if section.max_value() > space.last() {
            report.push(Violation::MalformedSection { outcome });
        }
    }
    report
}

/// Mixed measurability, checked through `r`-sections: for almost every `r`,
/// `w -> mu(w, r)` must be a pure stopping time. Sections are constant on
/// each interval of the common refinement of all breaks, so checking one
/// representative per interval covers almost every `r`.
pub fn validate_mixed_sectionwise(space: &FilteredSpace, st: &MixedSt) -> Report {
    let mut report = mixed_shape(space, st);
    if !report.is_valid() {
        return report;
    }
    let sections: Vec<&StepFunction> = st.sections.iter().collect();
    let mut bad = BTreeSet::new();
    for_common_refinement(&sections, |_, _, values| {
        for level in 0..space.n_times() {
            for block in space.nonconstant_blocks(level, |o| values[o] <= level) {
                bad.insert((level, block));
            }
        }
    });
    for (level, block) in bad {
        report.push(Violation::SectionNotStopping { level, block });
    }
    report
}

/// Mixed measurability, checked on the product: for every level `j` and
/// block `B`, the sets `{r : mu(w, r) <= t_j}` for `w` in `B` must agree up
/// to a Lebesgue-null set.
pub fn validate_mixed_product(space: &FilteredSpace, st: &MixedSt) -> Report {
    let mut report = mixed_shape(space, st);
    if !report.is_valid() {
        return report;
    }
    for level in 0..space.n_times() {
        for (block, members) in space.partition(level).blocks().iter().enumerate() {
            let mut live = members.iter().filter(|&&o| !space.is_null(o));
            let Some(&first) = live.next() else { continue };
            let reference = &st.sections[first];
            if live.any(|&o| {
                !reference.sublevel_symmetric_difference(&st.sections[o], level).is_zero()
            }) {
                report.push(Violation::NotJointlyMeasurable { level, block });
            }
        }
    }
    report
}

/// Runs both mixed checks. They always reach the same verdict; the report
/// contains the violations found by each.
pub fn validate_mixed(space: &FilteredSpace, st: &MixedSt) -> Report {
    let mut report = validate_mixed_product(space, st);
    if report.has_shape_error() || report.violations().iter().any(|v| matches!(v, Violation::MalformedSection { .. })) {
        return report;
    }
    report.extend(validate_mixed_sectionwise(space, st));
    report
}

pub fn validate_randomized(space: &FilteredSpace, st: &RandomizedSt) -> Report {
    let mut report = Report::new();
    if let Some(v) = space.shape_violation(&st.paths) {
        report.push(v);
        return report;
    }
    for (outcome, path) in st.paths.iter().enumerate() {
        for (level, value) in path.iter().enumerate() {
            if value.is_negative() || *value > Rational::one() {
                report.push(Violation::PathOutOfRange { outcome, level });
            }
        }
        for (i, w) in path.windows(2).enumerate() {
            if w[1] < w[0] {
                report.push(Violation::NotMonotone { outcome, level: i + 1 });
            }
        }
        if !path[space.last()].is_one() {
            report.push(Violation::TerminalNotOne { outcome });
        }
    }
    for level in 0..space.n_times() {
        for block in space.nonconstant_blocks(level, |o| &st.paths[o][level]) {
            report.push(Violation::NotAdapted { level, block });
        }
    }
    report
}

pub fn validate_distribution(space: &FilteredSpace, st: &DistributionSt) -> Report {
    let mut report = Report::new();
    if let Some(v) = space.shape_violation(&st.mass) {
        report.push(v);
        return report;
    }
    for (outcome, row) in st.mass.iter().enumerate() {
        for (level, m) in row.iter().enumerate() {
            if m.is_negative() {
                report.push(Violation::NegativeMass { outcome, level });
            }
        }
        if row.iter().sum::<Rational>() != *space.prob(outcome) {
            report.push(Violation::MarginalMismatch { outcome });
        }
    }
    if !report.is_valid() {
        return report;
    }
    let densities: Vec<Vec<Rational>> = (0..space.n_outcomes())
        .map(|o| {
            if space.is_null(o) {
                Vec::new()
            } else {
                cumulative(&st.mass[o]).into_iter().map(|c| c / space.prob(o)).collect()
            }
        })
        .collect();
    for level in 0..space.n_times() {
        for block in space.nonconstant_blocks(level, |o| &densities[o][level]) {
            report.push(Violation::DensityNotAdapted { level, block });
        }
    }
    report
}

/// The mixed stopping time whose every section is constant at `stop(w)`.
pub fn embed_pure(st: &PureSt) -> MixedSt {
    MixedSt { sections: st.stop.iter().map(|&j| StepFunction::constant(j)).collect() }
}

/// `delta^{t_j}` on atoms: `delta({w} x [0, t_j])`.
pub fn sub_measure(st: &DistributionSt, level: usize) -> SubMeasure {
    SubMeasure { mass: st.mass.iter().map(|row| row[..=level].iter().sum()).collect() }
}

/// The density of `delta^{t_j}` with respect to `P`, atom by atom.
///
/// On null atoms (lifted spaces only) the density is not determined; there
/// the value of a non-null atom of the same block is used, or 1 if the whole
/// block is null. This keeps the result block-constant, nondecreasing in `j`
/// and equal to 1 at the horizon.
pub fn rn_derivative(space: &FilteredSpace, st: &DistributionSt, level: usize) -> Vec<Rational> {
    let sub = sub_measure(st, level);
    let mut density: Vec<Option<Rational>> = sub
        .mass
        .into_iter()
        .enumerate()
        .map(|(o, m)| (!space.is_null(o)).then(|| m / space.prob(o)))
        .collect();
    if density.iter().any(Option::is_none) {
        let partition = space.partition(level);
        for block in partition.blocks() {
            let fill = block
                .iter()
                .find_map(|&o| density[o].clone())
                .unwrap_or_else(Rational::one);
            for &o in block {
                if density[o].is_none() {
                    density[o] = Some(fill.clone());
                }
            }
        }
    }
    density.into_iter().map(|d| d.expect("filled above")).collect()
}
