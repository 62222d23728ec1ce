//! The standard two-outcome example: `w1`, `w2` equally likely, grid
//! `{0, 1}`, both outcomes observed at time 0. Two different mixed stopping
//! times, a randomized time and the uniform law on outcomes x {0, 1} are all
//! equivalent here.

use stoptime_core::prelude::*;

/// With `coarse`, the outcomes are not distinguished at time 0.
pub fn two_point_space(coarse: bool) -> FilteredSpace {
    let level0 = if coarse { vec![vec![0, 1]] } else { vec![vec![0], vec![1]] };
    build_space(
        vec!["w1".into(), "w2".into()],
        vec![rat(1, 2), rat(1, 2)],
        vec![int(0), int(1)],
        vec![level0, vec![vec![0], vec![1]]],
    )
    .expect("fixture space is valid")
}

fn halves(first: usize, second: usize) -> StepFunction {
    StepFunction::new(vec![int(0), rat(1, 2), int(1)], vec![first, second]).expect("fixture section")
}

/// Stop at 0 for `r` in the lower half, at 1 otherwise, on both outcomes.
pub fn mu() -> MixedSt {
    MixedSt { sections: vec![halves(0, 1), halves(0, 1)] }
}

/// As [`mu`] on `w1`; on `w2` stop at 1 for the lower half and at 0 for the upper.
pub fn mu_tilde() -> MixedSt {
    MixedSt { sections: vec![halves(0, 1), halves(1, 0)] }
}

pub fn rho() -> RandomizedSt {
    RandomizedSt { paths: vec![vec![rat(1, 2), int(1)]; 2] }
}

pub fn uniform() -> DistributionSt {
    DistributionSt { mass: vec![vec![rat(1, 4); 2]; 2] }
}
