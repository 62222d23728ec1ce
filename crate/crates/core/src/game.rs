//! Two-player zero-sum stopping games.
//!
//! Player 1 maximizes, Player 2 minimizes. If Player 1 stops strictly first
//! at `t` the payoff is `X_t`; if Player 2 stops strictly first at `s` it is
//! `Y_s`; on a tie at `t` it is `Z_t`.
//!
//! Fixing Player 2's law `delta_2` turns the game into a one-player stopping
//! problem on the lifted space `Omega x grid`, whose atom `(w, s)` carries
//! mass `delta_2(w, s)` and whose information at `t_j` is `B x grid` for the
//! blocks `B` of the base partition: Player 1 never observes `s`. Atoms of
//! mass zero are kept so that the lifted filtration does not depend on
//! `delta_2`.

use alloc::format;
use alloc::vec::Vec;

use core::cmp::Ordering;

use num_traits::Zero;

use crate::convert::{check_all, randomized_of_distribution_unchecked, to_distribution};
use crate::error::Error;
use crate::problem::StoppingProblem;
use crate::process::Process;
use crate::rational::Rational;
use crate::space::{FilteredSpace, Partition};
use crate::step::StepFunction;
use crate::stopping::{DistributionSt, MixedSt, PureSt, RandomizedSt, StoppingTime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingGame {
    space: FilteredSpace,
    x: Process,
    y: Process,
    z: Process,
}

impl StoppingGame {
    pub fn new(space: FilteredSpace, x: Process, y: Process, z: Process) -> Result<Self, Error> {
        for p in [&x, &y, &z] {
            if !p.shape_report(&space).is_valid() {
                return Err(Error::IncompatibleSpaces);
            }
        }
        Ok(Self { space, x, y, z })
    }

    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn x(&self) -> &Process {
        &self.x
    }

    pub fn y(&self) -> &Process {
        &self.y
    }

    pub fn z(&self) -> &Process {
        &self.z
    }

    pub fn negated(&self) -> Self {
        Self {
            space: self.space.clone(),
            x: self.x.map(|v| -v),
            y: self.y.map(|v| -v),
            z: self.z.map(|v| -v),
        }
    }

    /// Terminal payoff when Player 1 stops at index `first` and Player 2 at `second`.
    pub fn terminal(&self, outcome: usize, first: usize, second: usize) -> &Rational {
        match first.cmp(&second) {
            Ordering::Less => self.x.value(outcome, first),
            Ordering::Greater => self.y.value(outcome, second),
            Ordering::Equal => self.z.value(outcome, first),
        }
    }
}

/// Whose stopping problem the lift describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perspective {
    /// Player 1 stops at `t`; the opponent's stop `s` is part of the state.
    Player1,
    /// Player 2 stops at `t`; `s` is Player 1's stop.
    Player2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedProblem {
    problem: StoppingProblem,
    base_outcomes: usize,
    n_times: usize,
}

/// Player 1's problem against a fixed law `opponent` of Player 2.
pub fn lift(game: &StoppingGame, opponent: &DistributionSt) -> Result<LiftedProblem, Error> {
    lift_as(game, opponent, Perspective::Player1)
}

/// The lifted problem of the player given by `perspective` against the other
/// player's law `opponent`.
///
/// The lifted reward at `(t, (w, s))` is the terminal payoff of the game
/// when the deciding player stops at `t` and the opponent at `s`.
pub fn lift_as(
    game: &StoppingGame,
    opponent: &DistributionSt,
    perspective: Perspective,
) -> Result<LiftedProblem, Error> {
    let base = &game.space;
    check_all(base, &StoppingTime::Distribution(opponent.clone()))?;
    let n = base.n_outcomes();
    let k = base.n_times();
    let atom = |o: usize, s: usize| o * k + s;

    let mut outcomes = Vec::with_capacity(n * k);
    let mut probs = Vec::with_capacity(n * k);
    for o in 0..n {
        for s in 0..k {
            outcomes.push(format!("{}@{}", base.label(o), s));
            probs.push(opponent.mass[o][s].clone());
        }
    }
    let levels = base
        .partitions()
        .iter()
        .map(|p| {
            let blocks = p
                .blocks()
                .iter()
                .map(|b| b.iter().flat_map(|&o| (0..k).map(move |s| atom(o, s))).collect())
                .collect();
            Partition::new(n * k, blocks).expect("product of a partition with the grid")
        })
        .collect();
    let space = FilteredSpace::with_null_atoms(outcomes, probs, base.grid().to_vec(), levels);

    let mut rows = Vec::with_capacity(n * k);
    for o in 0..n {
        for s in 0..k {
            rows.push(
                (0..k)
                    .map(|t| match perspective {
                        Perspective::Player1 => game.terminal(o, t, s).clone(),
                        Perspective::Player2 => game.terminal(o, s, t).clone(),
                    })
                    .collect(),
            );
        }
    }
    let problem = StoppingProblem::new(space, Process::new(rows))?;
    Ok(LiftedProblem { problem, base_outcomes: n, n_times: k })
}

impl LiftedProblem {
    pub fn problem(&self) -> &StoppingProblem {
        &self.problem
    }

    pub fn space(&self) -> &FilteredSpace {
        self.problem.space()
    }

    pub fn reward(&self) -> &Process {
        self.problem.reward()
    }

    /// Index of the lifted atom `(outcome, s)`.
    pub fn atom(&self, outcome: usize, s: usize) -> usize {
        outcome * self.n_times + s
    }

    fn check_base_len(&self, len: usize) -> Result<(), Error> {
        if len == self.base_outcomes {
            Ok(())
        } else {
            Err(Error::IncompatibleSpaces)
        }
    }

    fn spread<T: Clone>(&self, rows: &[T]) -> Vec<T> {
        rows.iter().flat_map(|r| core::iter::repeat_n(r, self.n_times).cloned()).collect()
    }

    pub fn lift_pure(&self, sigma: &PureSt) -> Result<PureSt, Error> {
        self.check_base_len(sigma.stop.len())?;
        Ok(PureSt { stop: self.spread(&sigma.stop) })
    }

    /// `mu~(w, s, r) = mu(w, r)`.
    pub fn lift_mixed(&self, mu: &MixedSt) -> Result<MixedSt, Error> {
        self.check_base_len(mu.sections.len())?;
        Ok(MixedSt { sections: self.spread::<StepFunction>(&mu.sections) })
    }

    /// `rho~_t(w, s) = rho_t(w)`.
    pub fn lift_randomized(&self, rho: &RandomizedSt) -> Result<RandomizedSt, Error> {
        self.check_base_len(rho.paths.len())?;
        Ok(RandomizedSt { paths: self.spread(&rho.paths) })
    }

    /// Lifts a base stopping time. A distribution stopping time is lifted
    /// through its unique equivalent randomized stopping time.
    pub fn lift(&self, base: &FilteredSpace, st: &StoppingTime) -> Result<StoppingTime, Error> {
        Ok(match st {
            StoppingTime::Pure(s) => self.lift_pure(s)?.into(),
            StoppingTime::Mixed(m) => self.lift_mixed(m)?.into(),
            StoppingTime::Randomized(r) => self.lift_randomized(r)?.into(),
            StoppingTime::Distribution(d) => {
                check_all(base, st)?;
                self.lift_randomized(&randomized_of_distribution_unchecked(base, d))?.into()
            }
        })
    }
}

/// Payoff when Player 1 uses `first` and Player 2's law is `second`:
/// the one-player payoff of the lifted `first` in the lifted problem.
pub fn game_payoff_via_lift(
    game: &StoppingGame,
    first: &StoppingTime,
    second: &DistributionSt,
) -> Result<Rational, Error> {
    check_all(&game.space, first)?;
    let lifted = lift(game, second)?;
    lifted.problem.payoff(&lifted.lift(&game.space, first)?)
}

/// `E_{P x Leb x Leb}` of the terminal payoff, evaluated interval pair by
/// interval pair.
pub fn game_payoff_symmetric(
    game: &StoppingGame,
    first: &MixedSt,
    second: &MixedSt,
) -> Result<Rational, Error> {
    check_all(&game.space, &StoppingTime::Mixed(first.clone()))?;
    check_all(&game.space, &StoppingTime::Mixed(second.clone()))?;
    let mut total = Rational::zero();
    for (o, (a, b)) in first.sections.iter().zip(&second.sections).enumerate() {
        let mut inner = Rational::zero();
        for (len_a, t1) in a.lengths() {
            for (len_b, t2) in b.lengths() {
                inner += &len_a * &len_b * game.terminal(o, t1, t2);
            }
        }
        total += inner * game.space.prob(o);
    }
    Ok(total)
}

/// The same game payoff computed from Player 2's side: lift over Player 1's
/// law `first` and evaluate Player 2's lifted `second`.
pub fn game_payoff_player2_view(
    game: &StoppingGame,
    first: &DistributionSt,
    second: &StoppingTime,
) -> Result<Rational, Error> {
    check_all(&game.space, second)?;
    let lifted = lift_as(game, first, Perspective::Player2)?;
    lifted.problem.payoff(&lifted.lift(&game.space, second)?)
}

/// Convenience wrapper: the law of any stopping time of Player 2.
pub fn opponent_law(game: &StoppingGame, st: &StoppingTime) -> Result<DistributionSt, Error> {
    to_distribution(&game.space, st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::build_space;
    use crate::stopping::validate_distribution;
    use alloc::vec;

    fn remark_space() -> FilteredSpace {
        build_space(
            vec!["w1".into(), "w2".into()],
            vec![rat(1, 2), rat(1, 2)],
            vec![int(0), int(1)],
            vec![vec![vec![0], vec![1]]; 2],
        )
        .unwrap()
    }

    fn table(rows: [[i64; 2]; 2]) -> Process {
        Process::new(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    fn game() -> StoppingGame {
        StoppingGame::new(
            remark_space(),
            table([[1, 2], [3, 4]]),
            table([[10, 20], [30, 40]]),
            table([[100, 200], [300, 400]]),
        )
        .unwrap()
    }

    fn uniform_mu() -> MixedSt {
        MixedSt { sections: vec![StepFunction::new(vec![int(0), rat(1, 2), int(1)], vec![0, 1]).unwrap(); 2] }
    }

    #[test]
    fn lifted_space_from_uniform_law() {
        let g = game();
        let uniform = DistributionSt { mass: vec![vec![rat(1, 4); 2]; 2] };
        let l = lift(&g, &uniform).unwrap();
        assert_eq!(l.space().n_outcomes(), 4);
        assert!(l.space().probs().iter().all(|p| *p == rat(1, 4)));
        assert_eq!(l.space().label(l.atom(1, 0)), "w2@0");
        // Player 1 at t = 0 while Player 2 stops at s = 1: X_0
        assert_eq!(l.reward().value(l.atom(0, 1), 0), &int(1));
        // Player 1 at t = 1 after Player 2 stopped at s = 0: Y_0
        assert_eq!(l.reward().value(l.atom(0, 0), 1), &int(10));
        assert_eq!(l.reward().value(l.atom(1, 1), 1), &int(400));
    }

    #[test]
    fn opponent_stops_at_horizon() {
        let g = game();
        let late = DistributionSt { mass: vec![vec![int(0), rat(1, 2)]; 2] };
        let l = lift(&g, &late).unwrap();
        assert_eq!(l.reward().value(l.atom(0, 1), 0), g.x().value(0, 0));
        assert_eq!(l.reward().value(l.atom(0, 1), 1), g.z().value(0, 1));
        assert!(l.space().is_null(l.atom(0, 0)));
        let lifted = l.lift_randomized(&RandomizedSt { paths: vec![vec![int(1), int(1)]; 2] }).unwrap();
        assert!(lifted.paths.iter().all(|p| *p == vec![int(1), int(1)]));
        let d = crate::convert::delta_of_randomized(l.space(), &lifted).unwrap();
        assert!(validate_distribution(l.space(), &d).is_valid());
    }

    #[test]
    fn mixed_against_stop_at_zero() {
        let g = game();
        let now = DistributionSt { mass: vec![vec![rat(1, 2), int(0)]; 2] };
        // 1/2 Z_0 + 1/2 Y_0 on each outcome
        let expected = rat(1, 2) * (rat(1, 2) * int(100) + rat(1, 2) * int(10))
            + rat(1, 2) * (rat(1, 2) * int(300) + rat(1, 2) * int(30));
        let mu = uniform_mu();
        assert_eq!(game_payoff_via_lift(&g, &mu.clone().into(), &now).unwrap(), expected);
        let zero = MixedSt { sections: vec![StepFunction::constant(0); 2] };
        assert_eq!(game_payoff_symmetric(&g, &mu, &zero).unwrap(), expected);
        let first = crate::convert::delta_of_mixed(g.space(), &mu).unwrap();
        assert_eq!(game_payoff_player2_view(&g, &first, &zero.into()).unwrap(), expected);
    }

    #[test]
    fn both_stop_at_zero() {
        let g = game();
        let zero = MixedSt { sections: vec![StepFunction::constant(0); 2] };
        let ez0 = rat(1, 2) * int(100) + rat(1, 2) * int(300);
        assert_eq!(game_payoff_symmetric(&g, &zero, &zero).unwrap(), ez0);
        let now = DistributionSt { mass: vec![vec![rat(1, 2), int(0)]; 2] };
        assert_eq!(game_payoff_via_lift(&g, &zero.clone().into(), &now).unwrap(), ez0);
        assert_eq!(game_payoff_player2_view(&g, &now, &zero.into()).unwrap(), ez0);
    }

    #[test]
    fn constant_game() {
        let s = remark_space();
        let c = Process::constant(&s, &rat(2, 3));
        let g = StoppingGame::new(s, c.clone(), c.clone(), c).unwrap();
        let uniform = DistributionSt { mass: vec![vec![rat(1, 4); 2]; 2] };
        let l = lift(&g, &uniform).unwrap();
        assert!(l.reward().rows().iter().flatten().all(|v| *v == rat(2, 3)));
        let mu = uniform_mu();
        assert_eq!(game_payoff_via_lift(&g, &mu.clone().into(), &uniform).unwrap(), rat(2, 3));
        assert_eq!(game_payoff_symmetric(&g, &mu, &mu).unwrap(), rat(2, 3));
        assert_eq!(game_payoff_player2_view(&g, &uniform, &mu.into()).unwrap(), rat(2, 3));
    }

    #[test]
    fn negation_flips_sign() {
        let g = game();
        let mu = uniform_mu();
        let v = game_payoff_symmetric(&g, &mu, &mu).unwrap();
        assert_eq!(game_payoff_symmetric(&g.negated(), &mu, &mu).unwrap(), -v);
    }
}
