//! Seed-driven random instances for the property tests.

#![allow(dead_code)]

use stoptime_core::prelude::*;

pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }
}

pub struct Instance {
    pub space: FilteredSpace,
    pub rho: RandomizedSt,
    pub sigma: PureSt,
    pub reward: Process,
}

/// Space with up to `max_n` outcomes and `max_k` grid points, a random
/// adapted randomized time, a random pure time and a random reward.
pub fn instance(seed: u64, max_n: usize, max_k: usize) -> Instance {
    let mut g = SplitMix::new(seed);
    let n = g.range(1, max_n);
    let k = g.range(1, max_k);

    let weights: Vec<i64> = (0..n).map(|_| 1 + g.below(9) as i64).collect();
    let total: i64 = weights.iter().sum();
    let probs = weights.iter().map(|&w| rat(w, total)).collect();

    let mut grid = vec![int(0)];
    for _ in 1..k {
        let step = rat(1 + g.below(4) as i64, 1 + g.below(4) as i64);
        let next = grid.last().unwrap() + step;
        grid.push(next);
    }

    // refining chain: split blocks at random as time goes on
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut current: Vec<Vec<usize>> = vec![(0..n).collect()];
    for j in 0..k {
        if j > 0 || g.below(2) == 0 {
            let mut next = Vec::new();
            for block in current {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for o in block {
                    if g.below(3) == 0 { b.push(o) } else { a.push(o) }
                }
                next.extend([a, b].into_iter().filter(|x| !x.is_empty()));
            }
            current = next;
        }
        levels.push(current.clone());
    }
    let outcomes = (0..n).map(|i| format!("w{i}")).collect();
    let space = build_space(outcomes, probs, grid, levels).unwrap();

    let rho = random_randomized(&space, &mut g);

    let mut stop = vec![k - 1; n];
    let mut decided = vec![false; n];
    for j in 0..k {
        for block in space.partition(j).blocks() {
            if g.below(3) == 0 {
                for &o in block {
                    if !decided[o] {
                        decided[o] = true;
                        stop[o] = j;
                    }
                }
            }
        }
    }
    let sigma = PureSt { stop };

    let reward = Process::from_fn(&space, |_, _| rat(g.below(41) as i64 - 20, 1 + g.below(6) as i64));
    Instance { space, rho, sigma, reward }
}

/// Block-constant nondecreasing paths ending at 1.
pub fn random_randomized(space: &FilteredSpace, g: &mut SplitMix) -> RandomizedSt {
    let (n, k) = (space.n_outcomes(), space.n_times());
    let mut paths = vec![vec![int(0); k]; n];
    for j in 0..k {
        for block in space.partition(j).blocks() {
            let prev = if j == 0 { int(0) } else { paths[block[0]][j - 1].clone() };
            let v = if j + 1 == k {
                int(1)
            } else {
                let q = 1 + g.below(8) as i64;
                let p = g.below(q as u64 + 1) as i64;
                &prev + (int(1) - &prev) * rat(p, q)
            };
            for &o in block {
                paths[o][j] = v.clone();
            }
        }
    }
    RandomizedSt { paths }
}

/// Rearranges `[0, 1]` by cutting at `cuts` and reversing the order of the
/// pieces, the same way for every outcome. Preserves measurability and the
/// induced law.
pub fn reverse_pieces(mu: &MixedSt, cuts: &[Rational]) -> MixedSt {
    let mut edges = vec![int(0)];
    edges.extend(cuts.iter().cloned());
    edges.push(int(1));
    let sections = mu
        .sections
        .iter()
        .map(|s| {
            let mut pieces: Vec<(Rational, usize)> = Vec::new();
            for w in edges.windows(2).rev() {
                for (lo, hi, v) in s.pieces() {
                    let a = lo.max(&w[0]).clone();
                    let b = hi.min(&w[1]).clone();
                    if a < b {
                        pieces.push((b - a, v));
                    }
                }
            }
            StepFunction::from_pieces(pieces.iter().map(|(l, v)| (l, *v))).unwrap()
        })
        .collect();
    MixedSt { sections }
}

/// Law of a mixed time by enumerating the cells of the common refinement of
/// all breaks and evaluating each section at the cell's midpoint.
pub fn brute_force_law(space: &FilteredSpace, mu: &MixedSt) -> Vec<Vec<Rational>> {
    let mut cuts: Vec<Rational> = mu.sections.iter().flat_map(|s| s.breaks().to_vec()).collect();
    cuts.sort();
    cuts.dedup();
    let mut mass = vec![vec![int(0); space.n_times()]; space.n_outcomes()];
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / int(2);
        for (o, s) in mu.sections.iter().enumerate() {
            mass[o][s.eval(&mid)] += space.prob(o) * (&w[1] - &w[0]);
        }
    }
    mass
}
