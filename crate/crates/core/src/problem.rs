//! Expected payoffs of single-agent stopping problems.

use num_traits::Zero;

use crate::convert::check_all;
use crate::error::{Error, Report};
use crate::process::Process;
use crate::rational::Rational;
use crate::space::FilteredSpace;
use crate::stopping::{DistributionSt, MixedSt, PureSt, RandomizedSt, StoppingTime};

/// A space together with a reward table `R_{t_j}(w)`.
///
/// The reward need not be adapted; any finite table is bounded and
/// measurable, which is all that payoff evaluation requires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingProblem {
    space: FilteredSpace,
    reward: Process,
}

impl StoppingProblem {
    pub fn new(space: FilteredSpace, reward: Process) -> Result<Self, Error> {
        let report: Report = reward.shape_report(&space);
        if !report.is_valid() {
            return Err(Error::IncompatibleSpaces);
        }
        Ok(Self { space, reward })
    }

    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn reward(&self) -> &Process {
        &self.reward
    }

    fn r(&self, outcome: usize, index: usize) -> &Rational {
        self.reward.value(outcome, index)
    }

    /// `E_P[R_sigma]`.
    pub fn payoff_pure(&self, sigma: &PureSt) -> Result<Rational, Error> {
        check_all(&self.space, &StoppingTime::Pure(sigma.clone()))?;
        Ok(sigma
            .stop
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (o, &j)| acc + self.space.prob(o) * self.r(o, j)))
    }

    /// `E_{P x Lebesgue}[R_{mu(w, r)}(w)]`, summed interval by interval.
    pub fn payoff_mixed(&self, mu: &MixedSt) -> Result<Rational, Error> {
        check_all(&self.space, &StoppingTime::Mixed(mu.clone()))?;
        let mut total = Rational::zero();
        for (o, section) in mu.sections.iter().enumerate() {
            let inner = section
                .lengths()
                .fold(Rational::zero(), |acc, (len, j)| acc + len * self.r(o, j));
            total += inner * self.space.prob(o);
        }
        Ok(total)
    }

    /// `E_P[ integral_[0,T] R_t d rho_t ]`. The path starts from 0 before
    /// time 0, so the jump `rho_0` is weighted by `R_0`.
    pub fn payoff_randomized(&self, rho: &RandomizedSt) -> Result<Rational, Error> {
        check_all(&self.space, &StoppingTime::Randomized(rho.clone()))?;
        let mut total = Rational::zero();
        for (o, path) in rho.paths.iter().enumerate() {
            let mut prev = Rational::zero();
            let mut inner = Rational::zero();
            for (j, v) in path.iter().enumerate() {
                inner += (v - &prev) * self.r(o, j);
                prev = v.clone();
            }
            total += inner * self.space.prob(o);
        }
        Ok(total)
    }

    /// `E_delta[R_t(w)]`.
    pub fn payoff_distribution(&self, delta: &DistributionSt) -> Result<Rational, Error> {
        check_all(&self.space, &StoppingTime::Distribution(delta.clone()))?;
        let mut total = Rational::zero();
        for (o, row) in delta.mass.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                total += m * self.r(o, j);
            }
        }
        Ok(total)
    }

    pub fn payoff(&self, st: &StoppingTime) -> Result<Rational, Error> {
        match st {
            StoppingTime::Pure(s) => self.payoff_pure(s),
            StoppingTime::Mixed(m) => self.payoff_mixed(m),
            StoppingTime::Randomized(r) => self.payoff_randomized(r),
            StoppingTime::Distribution(d) => self.payoff_distribution(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::build_space;
    use crate::step::StepFunction;
    use alloc::vec;

    fn remark_problem(reward: impl Fn(&FilteredSpace) -> Process) -> StoppingProblem {
        let s = build_space(
            vec!["w1".into(), "w2".into()],
            vec![rat(1, 2), rat(1, 2)],
            vec![int(0), int(1)],
            vec![vec![vec![0], vec![1]]; 2],
        )
        .unwrap();
        let r = reward(&s);
        StoppingProblem::new(s, r).unwrap()
    }

    fn mu() -> MixedSt {
        MixedSt { sections: vec![StepFunction::new(vec![int(0), rat(1, 2), int(1)], vec![0, 1]).unwrap(); 2] }
    }

    #[test]
    fn time_reward() {
        let p = remark_problem(Process::time);
        assert_eq!(p.payoff_pure(&PureSt { stop: vec![0, 1] }).unwrap(), rat(1, 2));
        assert_eq!(p.payoff_pure(&PureSt { stop: vec![1, 1] }).unwrap(), int(1));
        assert_eq!(p.payoff_mixed(&mu()).unwrap(), rat(1, 2));
        let rho = RandomizedSt { paths: vec![vec![rat(1, 2), int(1)]; 2] };
        assert_eq!(p.payoff_randomized(&rho).unwrap(), rat(1, 2));
        let delta = DistributionSt { mass: vec![vec![rat(1, 4); 2]; 2] };
        assert_eq!(p.payoff_distribution(&delta).unwrap(), rat(1, 2));
    }

    #[test]
    fn constant_reward() {
        let c = rat(-7, 3);
        let p = remark_problem(|s| Process::constant(s, &c));
        assert_eq!(p.payoff_mixed(&mu()).unwrap(), c);
        assert_eq!(p.payoff_pure(&PureSt { stop: vec![0, 1] }).unwrap(), c);
        let rho = RandomizedSt { paths: vec![vec![rat(1, 5), int(1)]; 2] };
        assert_eq!(p.payoff_randomized(&rho).unwrap(), c);
    }

    #[test]
    fn stopping_at_zero_collects_initial_reward() {
        let p = remark_problem(|_| Process::new(vec![vec![int(3), int(10)], vec![int(5), int(10)]]));
        let rho = RandomizedSt { paths: vec![vec![int(1), int(1)]; 2] };
        assert_eq!(p.payoff_randomized(&rho).unwrap(), int(4));
    }

    #[test]
    fn point_mass_on_single_outcome() {
        let s = build_space(vec!["w".into()], vec![int(1)], vec![int(0), rat(5, 2)], vec![vec![vec![0]]; 2]).unwrap();
        let p = StoppingProblem::new(s.clone(), Process::time(&s)).unwrap();
        let delta = DistributionSt { mass: vec![vec![int(0), int(1)]] };
        assert_eq!(p.payoff_distribution(&delta).unwrap(), rat(5, 2));
    }

    #[test]
    fn rejects_mismatched_reward() {
        let s = build_space(vec!["w".into()], vec![int(1)], vec![int(0)], vec![vec![vec![0]]]).unwrap();
        assert_eq!(
            StoppingProblem::new(s, Process::new(vec![vec![int(0), int(1)]])),
            Err(Error::IncompatibleSpaces)
        );
    }
}
