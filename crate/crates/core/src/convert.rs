//! Conversions between representations, and equivalence.
//!
//! Every stopping time induces a joint law on outcomes x grid: the
//! push-forward of `P x Lebesgue` for mixed times, `P(w) * (rho_j - rho_{j-1})`
//! for randomized times. Two stopping times are equivalent iff these laws
//! coincide. The reverse maps go through the per-outcome conditional c.d.f.
//! (distribution -> randomized) and its generalized inverse (randomized ->
//! mixed).
//!
//! All public functions validate their stopping-time arguments first and
//! return [`Error::Invalid`] on failure.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::rational::Rational;
use crate::space::FilteredSpace;
use crate::step::StepFunction;
use crate::stopping::{
    embed_pure, rn_derivative, DistributionSt, MixedSt, RandomizedSt, StoppingTime,
};

pub(crate) fn check_all(space: &FilteredSpace, st: &StoppingTime) -> Result<(), Error> {
    let report = st.validate(space);
    if report.has_shape_error() {
        return Err(Error::IncompatibleSpaces);
    }
    report.into_result()
}

/// `mass(w, j) = P(w) * lambda({r : mu(w, r) = t_j})`.
pub fn delta_of_mixed(space: &FilteredSpace, mu: &MixedSt) -> Result<DistributionSt, Error> {
    check_all(space, &StoppingTime::Mixed(mu.clone()))?;
    Ok(delta_of_mixed_unchecked(space, mu))
}

pub(crate) fn delta_of_mixed_unchecked(space: &FilteredSpace, mu: &MixedSt) -> DistributionSt {
    let mass = mu
        .sections
        .iter()
        .enumerate()
        .map(|(o, s)| {
            let p = space.prob(o);
            s.masses(space.n_times()).into_iter().map(|m| m * p).collect()
        })
        .collect();
    DistributionSt { mass }
}

/// `mass(w, j) = P(w) * (rho_{t_j}(w) - rho_{t_{j-1}}(w))` with `rho_{t_{-1}} = 0`,
/// so a jump at time 0 carries mass.
pub fn delta_of_randomized(space: &FilteredSpace, rho: &RandomizedSt) -> Result<DistributionSt, Error> {
    check_all(space, &StoppingTime::Randomized(rho.clone()))?;
    Ok(delta_of_randomized_unchecked(space, rho))
}

pub(crate) fn delta_of_randomized_unchecked(space: &FilteredSpace, rho: &RandomizedSt) -> DistributionSt {
    let mass = rho
        .paths
        .iter()
        .enumerate()
        .map(|(o, path)| {
            let p = space.prob(o);
            let mut prev = Rational::zero();
            path.iter()
                .map(|v| {
                    let jump = v - &prev;
                    prev = v.clone();
                    jump * p
                })
                .collect()
        })
        .collect();
    DistributionSt { mass }
}

/// `rho_{t_j}(w)` = conditional probability, given `w`, of stopping by `t_j`.
pub fn randomized_of_distribution(
    space: &FilteredSpace,
    delta: &DistributionSt,
) -> Result<RandomizedSt, Error> {
    check_all(space, &StoppingTime::Distribution(delta.clone()))?;
    Ok(randomized_of_distribution_unchecked(space, delta))
}

pub(crate) fn randomized_of_distribution_unchecked(
    space: &FilteredSpace,
    delta: &DistributionSt,
) -> RandomizedSt {
    let by_level: Vec<Vec<Rational>> =
        (0..space.n_times()).map(|j| rn_derivative(space, delta, j)).collect();
    let paths = (0..space.n_outcomes())
        .map(|o| by_level.iter().map(|col| col[o].clone()).collect())
        .collect();
    RandomizedSt { paths }
}

/// The generalized inverse `mu(w, r) = t_{j(r)}`, `j(r) = min{j : rho_{t_j}(w) >= r}`.
///
/// Section of `w`: value `j` on `[rho_{t_{j-1}}(w), rho_{t_j}(w))` for every `j`
/// where the path jumps. The right endpoint `rho_{t_j}` itself belongs to `j`
/// in the exact inverse but to the next interval here; the two differ on a
/// finite set, which no measured quantity can see.
pub fn mixed_of_randomized(space: &FilteredSpace, rho: &RandomizedSt) -> Result<MixedSt, Error> {
    check_all(space, &StoppingTime::Randomized(rho.clone()))?;
    Ok(mixed_of_randomized_unchecked(rho))
}

pub(crate) fn mixed_of_randomized_unchecked(rho: &RandomizedSt) -> MixedSt {
    let sections = rho
        .paths
        .iter()
        .map(|path| {
            let mut prev = Rational::zero();
            let jumps: Vec<(Rational, usize)> = path
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let jump = v - &prev;
                    prev = v.clone();
                    (jump, j)
                })
                .collect();
            StepFunction::from_pieces(jumps.iter().map(|(len, j)| (len, *j)))
                .expect("a valid path jumps by a total of one")
        })
        .collect();
    MixedSt { sections }
}

/// A mixed stopping time with the given law.
pub fn mixed_of_distribution(space: &FilteredSpace, delta: &DistributionSt) -> Result<MixedSt, Error> {
    check_all(space, &StoppingTime::Distribution(delta.clone()))?;
    Ok(mixed_of_randomized_unchecked(&randomized_of_distribution_unchecked(space, delta)))
}

/// `lambda({r : mu(w, r) <= t_j})`.
pub fn cdf_of_mixed(
    space: &FilteredSpace,
    mu: &MixedSt,
    outcome: usize,
    level: usize,
) -> Result<Rational, Error> {
    if outcome >= space.n_outcomes() {
        return Err(Error::IndexOutOfRange { what: "outcome", index: outcome, len: space.n_outcomes() });
    }
    if level >= space.n_times() {
        return Err(Error::IndexOutOfRange { what: "grid", index: level, len: space.n_times() });
    }
    check_all(space, &StoppingTime::Mixed(mu.clone()))?;
    Ok(mu.sections[outcome].mass_up_to(level))
}

/// The joint law induced by any kind of stopping time.
pub fn to_distribution(space: &FilteredSpace, st: &StoppingTime) -> Result<DistributionSt, Error> {
    check_all(space, st)?;
    Ok(match st {
        StoppingTime::Pure(s) => delta_of_mixed_unchecked(space, &embed_pure(s)),
        StoppingTime::Mixed(m) => delta_of_mixed_unchecked(space, m),
        StoppingTime::Randomized(r) => delta_of_randomized_unchecked(space, r),
        StoppingTime::Distribution(d) => d.clone(),
    })
}

pub fn to_randomized(space: &FilteredSpace, st: &StoppingTime) -> Result<RandomizedSt, Error> {
    match st {
        StoppingTime::Randomized(r) => {
            check_all(space, st)?;
            Ok(r.clone())
        }
        _ => Ok(randomized_of_distribution_unchecked(space, &to_distribution(space, st)?)),
    }
}

pub fn to_mixed(space: &FilteredSpace, st: &StoppingTime) -> Result<MixedSt, Error> {
    check_all(space, st)?;
    Ok(match st {
        StoppingTime::Pure(s) => embed_pure(s),
        StoppingTime::Mixed(m) => m.clone(),
        StoppingTime::Randomized(r) => mixed_of_randomized_unchecked(r),
        StoppingTime::Distribution(d) => {
            mixed_of_randomized_unchecked(&randomized_of_distribution_unchecked(space, d))
        }
    })
}

/// First atom where two laws differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Difference {
    pub outcome: usize,
    pub level: usize,
    pub left: Rational,
    pub right: Rational,
}

/// `None` iff `a` and `b` are equivalent; otherwise the first `(w, t_j)`
/// (row-major) where their laws differ.
///
/// When one side is mixed (or pure) and the other randomized, the answer is
/// also computed by comparing the path with the section c.d.f. directly, and
/// a disagreement between the two routes is reported as
/// [`Error::RouteMismatch`].
pub fn compare(
    space: &FilteredSpace,
    a: &StoppingTime,
    b: &StoppingTime,
) -> Result<Option<Difference>, Error> {
    let da = to_distribution(space, a)?;
    let db = to_distribution(space, b)?;
    let difference = first_difference(&da, &db);

    let cross = match (a, b) {
        (StoppingTime::Randomized(r), other) | (other, StoppingTime::Randomized(r)) => match other {
            StoppingTime::Mixed(m) => Some(cdf_agreement(space, m, r)),
            StoppingTime::Pure(s) => Some(cdf_agreement(space, &embed_pure(s), r)),
            _ => None,
        },
        _ => None,
    };
    if let Some(cross) = cross {
        if cross.is_none() != difference.is_none() {
            let d = difference.or(cross).expect("exactly one route found a difference");
            return Err(Error::RouteMismatch {
                outcome: d.outcome,
                level: d.level,
                left: Box::new(d.left),
                right: Box::new(d.right),
            });
        }
    }
    Ok(difference)
}

pub fn equivalent(space: &FilteredSpace, a: &StoppingTime, b: &StoppingTime) -> Result<bool, Error> {
    compare(space, a, b).map(|d| d.is_none())
}

fn first_difference(a: &DistributionSt, b: &DistributionSt) -> Option<Difference> {
    for (outcome, (ra, rb)) in a.mass.iter().zip(&b.mass).enumerate() {
        for (level, (x, y)) in ra.iter().zip(rb).enumerate() {
            if x != y {
                return Some(Difference { outcome, level, left: x.clone(), right: y.clone() });
            }
        }
    }
    None
}

/// Compares `rho_{t_j}(w)` with `lambda({r : mu(w, r) <= t_j})` on non-null atoms.
fn cdf_agreement(space: &FilteredSpace, mu: &MixedSt, rho: &RandomizedSt) -> Option<Difference> {
    for outcome in (0..space.n_outcomes()).filter(|&o| !space.is_null(o)) {
        for level in 0..space.n_times() {
            let cdf = mu.sections[outcome].mass_up_to(level);
            if cdf != rho.paths[outcome][level] {
                return Some(Difference {
                    outcome,
                    level,
                    left: cdf,
                    right: rho.paths[outcome][level].clone(),
                });
            }
        }
    }
    None
}
