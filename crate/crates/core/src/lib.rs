//! Random stopping times on finite filtered probability spaces, in exact
//! arithmetic.
//!
//! Time runs over a finite grid `0 = t_0 < ... < t_m = T`; stopping times are
//! supported on the grid, so their paths are right-continuous step functions
//! and they are genuine continuous-time stopping times. Every atom of the
//! outcome space has positive probability, so "almost surely" means
//! "everywhere" and all equalities below are checked exactly.
//!
//! The crate covers
//!
//! * the four representations (pure, mixed, randomized, distribution) and
//!   their validators ([`stopping`]),
//! * the conversions between them and the equivalence relation ([`convert`]),
//! * payoffs of stopping problems ([`problem`]) and two-player zero-sum
//!   stopping games ([`game`]).
//!
//! ```
//! use stoptime_core::prelude::*;
//!
//! let space = build_space(
//!     vec!["w1".into(), "w2".into()],
//!     vec![rat(1, 2), rat(1, 2)],
//!     vec![int(0), int(1)],
//!     vec![vec![vec![0], vec![1]]; 2],
//! )
//! .unwrap();
//! let rho = RandomizedSt { paths: vec![vec![rat(1, 2), int(1)]; 2] };
//! let mu = mixed_of_randomized(&space, &rho).unwrap();
//! assert!(equivalent(&space, &mu.into(), &rho.into()).unwrap());
//! ```
#![no_std]

extern crate alloc;

pub mod convert;
pub mod error;
pub mod game;
pub mod problem;
pub mod process;
pub mod rational;
pub mod space;
pub mod step;
pub mod stopping;

pub mod prelude {
    pub use crate::convert::{
        cdf_of_mixed, compare, delta_of_mixed, delta_of_randomized, equivalent,
        mixed_of_distribution, mixed_of_randomized, randomized_of_distribution, to_distribution,
        to_mixed, to_randomized, Difference,
    };
    pub use crate::error::{Error, Report, Violation};
    pub use crate::game::{
        game_payoff_player2_view, game_payoff_symmetric, game_payoff_via_lift, lift, lift_as,
        LiftedProblem, Perspective, StoppingGame,
    };
    pub use crate::problem::StoppingProblem;
    pub use crate::process::{validate_adapted, Process};
    pub use crate::rational::{int, one, parse_rational, rat, zero, Rational};
    pub use crate::space::{build_space, FilteredSpace, Partition, SpaceError};
    pub use crate::step::StepFunction;
    pub use crate::stopping::{
        embed_pure, rn_derivative, sub_measure, validate_distribution, validate_mixed,
        validate_mixed_product, validate_mixed_sectionwise, validate_pure, validate_randomized,
        DistributionSt, Kind, MixedSt, PureSt, RandomizedSt, StoppingTime, SubMeasure,
    };
}
