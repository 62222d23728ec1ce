//! Random instances for the property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use stoptime_core::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_outcomes: usize,
    /// Maximum number of grid points `m + 1`.
    pub max_grid_points: usize,
    /// Maximum number of intervals in a rearranged mixed section.
    pub max_breaks: usize,
    /// Largest denominator used when drawing rationals.
    pub max_denominator: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { max_outcomes: 8, max_grid_points: 6, max_breaks: 8, max_denominator: 64 }
    }
}

impl Bounds {
    pub fn is_valid(&self) -> bool {
        self.max_outcomes >= 1 && self.max_grid_points >= 1 && self.max_breaks >= 1 && self.max_denominator >= 1
    }
}

/// A random space with one stopping time of every kind for Player 1, an
/// independent one for Player 2, a reward and a game.
///
/// `mixed`, `randomized` and `distribution` are equivalent; so are the
/// `opponent_*` fields. `inverse` is the generalized inverse of `randomized`
/// and `mixed` a rearrangement of it.
#[derive(Debug, Clone)]
pub struct FuzzInstance {
    pub space: FilteredSpace,
    pub pure: PureSt,
    pub mixed: MixedSt,
    pub inverse: MixedSt,
    pub randomized: RandomizedSt,
    pub distribution: DistributionSt,
    pub opponent_mixed: MixedSt,
    pub opponent_randomized: RandomizedSt,
    pub opponent_distribution: DistributionSt,
    pub reward: Process,
    pub game: StoppingGame,
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R, bounds: &Bounds, magnitude: i64) -> Rational {
    let q = rng.gen_range(1..=bounds.max_denominator.min(12)) as i64;
    rat(rng.gen_range(-magnitude * q..=magnitude * q), q)
}

/// A bounded adapted process: one value per block and level.
fn adapted_table<R: Rng + ?Sized>(rng: &mut R, space: &FilteredSpace, bounds: &Bounds) -> Process {
    let mut rows = vec![vec![int(0); space.n_times()]; space.n_outcomes()];
    for j in 0..space.n_times() {
        for block in space.partition(j).blocks() {
            let v = small_rational(rng, bounds, 10);
            for &o in block {
                rows[o][j] = v.clone();
            }
        }
    }
    Process::new(rows)
}

fn random_space<R: Rng + ?Sized>(rng: &mut R, bounds: &Bounds) -> FilteredSpace {
    let n = rng.gen_range(1..=bounds.max_outcomes);
    let k = rng.gen_range(1..=bounds.max_grid_points);
    let d = bounds.max_denominator as i64;

    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=d)).collect();
    let total: i64 = weights.iter().sum();
    let probs = weights.iter().map(|&w| rat(w, total)).collect();

    let mut grid = vec![int(0)];
    for _ in 1..k {
        let step = rat(rng.gen_range(1..=d), rng.gen_range(1..=d));
        let next = grid.last().expect("nonempty") + step;
        grid.push(next);
    }

    // level 0 groups outcomes at random; later levels split blocks further
    let groups = rng.gen_range(1..=n);
    let mut current: Vec<Vec<usize>> = vec![Vec::new(); groups];
    for o in 0..n {
        current[rng.gen_range(0..groups)].push(o);
    }
    current.retain(|b| !b.is_empty());
    let mut levels = vec![current.clone()];
    for _ in 1..k {
        let mut next = Vec::new();
        for block in current {
            if block.len() > 1 && rng.gen_bool(0.4) {
                let (a, b): (Vec<usize>, Vec<usize>) = block.iter().partition(|_| rng.gen_bool(0.5));
                next.extend([a, b].into_iter().filter(|x| !x.is_empty()));
            } else {
                next.push(block);
            }
        }
        current = next;
        levels.push(current.clone());
    }
    let outcomes = (1..=n).map(|i| format!("w{i}")).collect();
    build_space(outcomes, probs, grid, levels).expect("generator builds valid spaces")
}

/// Block-constant conditional stopping probabilities, level by level.
fn random_randomized<R: Rng + ?Sized>(rng: &mut R, space: &FilteredSpace, bounds: &Bounds) -> RandomizedSt {
    let k = space.n_times();
    let mut paths = vec![vec![int(0); k]; space.n_outcomes()];
    for j in 0..k {
        for block in space.partition(j).blocks() {
            let prev = if j == 0 { int(0) } else { paths[block[0]][j - 1].clone() };
            let v = if j + 1 == k {
                int(1)
            } else if rng.gen_bool(0.3) {
                prev
            } else {
                let q = rng.gen_range(1..=bounds.max_denominator) as i64;
                let p = rng.gen_range(0..=q);
                &prev + (int(1) - &prev) * rat(p, q)
            };
            for &o in block {
                paths[o][j] = v.clone();
            }
        }
    }
    RandomizedSt { paths }
}

fn random_pure<R: Rng + ?Sized>(rng: &mut R, space: &FilteredSpace) -> PureSt {
    let mut stop: Vec<Option<usize>> = vec![None; space.n_outcomes()];
    for j in 0..space.n_times() {
        for block in space.partition(j).blocks() {
            if j == space.last() || rng.gen_bool(0.35) {
                for &o in block {
                    stop[o].get_or_insert(j);
                }
            }
        }
    }
    PureSt { stop: stop.into_iter().map(|s| s.expect("decided at the horizon")).collect() }
}

/// Cuts `[0, 1]` at `cuts` and lays the pieces out again in `order`.
/// Returns `None` if the result has more than `max_intervals` intervals.
pub fn rearrange(section: &StepFunction, cuts: &[Rational], order: &[usize], max_intervals: usize) -> Option<StepFunction> {
    let mut edges = vec![int(0)];
    edges.extend(cuts.iter().cloned());
    edges.push(int(1));
    let mut pieces: Vec<(Rational, usize)> = Vec::new();
    for &p in order {
        let (a, b) = (&edges[p], &edges[p + 1]);
        for (lo, hi, v) in section.pieces() {
            let lo = lo.max(a);
            let hi = hi.min(b);
            if lo < hi {
                pieces.push((hi - lo, v));
            }
        }
    }
    let out = StepFunction::from_pieces(pieces.iter().map(|(l, v)| (l, *v))).ok()?.canonical();
    (out.len() <= max_intervals).then_some(out)
}

/// A mixed time with the same law as `mu`: each block of the time-0
/// partition gets its own interval exchange of `[0, 1]`, applied to every
/// outcome of that block. Falls back to fewer cuts when a section would
/// exceed the interval cap.
pub fn random_rearrangement<R: Rng + ?Sized>(rng: &mut R, space: &FilteredSpace, mu: &MixedSt, bounds: &Bounds) -> MixedSt {
    let mut sections = mu.sections.clone();
    for block in space.partition(0).blocks() {
        let mut n_cuts = rng.gen_range(0..=3usize);
        let mut cuts: Vec<Rational> = (0..n_cuts)
            .map(|_| {
                let q = rng.gen_range(2..=bounds.max_denominator.max(2)) as i64;
                rat(rng.gen_range(1..q), q)
            })
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut order: Vec<usize> = (0..=cuts.len()).collect();
        order.shuffle(rng);
        loop {
            let attempt: Option<Vec<StepFunction>> =
                block.iter().map(|&o| rearrange(&mu.sections[o], &cuts, &order, bounds.max_breaks)).collect();
            if let Some(done) = attempt {
                for (&o, s) in block.iter().zip(done) {
                    sections[o] = s;
                }
                break;
            }
            if n_cuts == 0 || cuts.is_empty() {
                break;
            }
            n_cuts -= 1;
            cuts.pop();
            order = (0..=cuts.len()).collect();
            order.shuffle(rng);
        }
    }
    MixedSt { sections }
}

/// Breaks measurability on purpose: picks a block at some level `j < m`
/// with two or more outcomes and makes one of them stop at `t_j` surely and
/// another at `t_m` surely. `None` if no block qualifies.
pub fn mutate_invalid<R: Rng + ?Sized>(rng: &mut R, space: &FilteredSpace, mu: &MixedSt) -> Option<MixedSt> {
    let candidates: Vec<(usize, &Vec<usize>)> = (0..space.last())
        .flat_map(|j| space.partition(j).blocks().iter().map(move |b| (j, b)))
        .filter(|(_, b)| b.len() >= 2)
        .collect();
    let &(level, block) = candidates.choose(rng)?;
    let mut picked: Vec<usize> = block.choose_multiple(rng, 2).copied().collect();
    picked.shuffle(rng);
    let mut out = mu.clone();
    out.sections[picked[0]] = StepFunction::constant(level);
    out.sections[picked[1]] = StepFunction::constant(space.last());
    Some(out)
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, bounds: &Bounds) -> FuzzInstance {
    assert!(bounds.is_valid(), "bounds must be at least 1");
    let space = random_space(rng, bounds);

    let randomized = random_randomized(rng, &space, bounds);
    let distribution = delta_of_randomized(&space, &randomized).expect("generated path is valid");
    let inverse = mixed_of_randomized(&space, &randomized).expect("generated path is valid");
    let mixed = random_rearrangement(rng, &space, &inverse, bounds);

    let opponent_randomized = random_randomized(rng, &space, bounds);
    let opponent_distribution = delta_of_randomized(&space, &opponent_randomized).expect("valid");
    let opponent_inverse = mixed_of_randomized(&space, &opponent_randomized).expect("valid");
    let opponent_mixed = random_rearrangement(rng, &space, &opponent_inverse, bounds);

    let pure = random_pure(rng, &space);
    let reward = adapted_table(rng, &space, bounds);
    let x = adapted_table(rng, &space, bounds);
    let y = adapted_table(rng, &space, bounds);
    let z = adapted_table(rng, &space, bounds);
    let game = StoppingGame::new(space.clone(), x, y, z).expect("tables match the space");

    FuzzInstance {
        space,
        pure,
        mixed,
        inverse,
        randomized,
        distribution,
        opponent_mixed,
        opponent_randomized,
        opponent_distribution,
        reward,
        game,
    }
}
