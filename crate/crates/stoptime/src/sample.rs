//! Monte Carlo sampling of stopping times.
//!
//! Each draw picks an outcome from `P`, then a grid index:
//!
//! * mixed: draw `r` uniform on `[0, 1)` and read off the section,
//! * randomized: draw `r` uniform on `(0, 1]` and take the smallest `j` with
//!   `rho_{t_j}(w) >= r`,
//! * distribution: draw from the row `mass(w, .) / P(w)`.
//!
//! All three target the same law on outcomes x grid. Sampling uses `f64`
//! copies of the exact tables.

use rand::Rng;
use stoptime_core::prelude::*;
use stoptime_core::rational::to_f64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleRecord {
    pub outcome: usize,
    pub index: usize,
    pub replicate: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("no samples")]
    EmptySamples,
    #[error("sample refers to outcome {outcome}, grid index {index} outside the space")]
    OutOfRange { outcome: usize, index: usize },
    #[error(transparent)]
    Core(#[from] Error),
}

enum Rule {
    /// Per outcome: inner breaks and values of the section.
    Section(Vec<(Vec<f64>, Vec<usize>)>),
    /// Per outcome: the path.
    Inverse(Vec<Vec<f64>>),
    /// Per outcome: cumulative conditional distribution.
    Row(Vec<Vec<f64>>),
}

/// Precomputed `f64` tables for repeated draws from one stopping time.
pub struct Sampler {
    outcome_cdf: Vec<f64>,
    rule: Rule,
}

fn cdf(weights: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .into_iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// First index whose cumulative value exceeds `u`; the last index if none does.
fn search(cumulative: &[f64], u: f64) -> usize {
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
}

impl Sampler {
    pub fn new(space: &FilteredSpace, st: &StoppingTime) -> Result<Self, Error> {
        st.validate(space).into_result()?;
        let outcome_cdf = cdf(space.probs().iter().map(to_f64));
        let sections = |m: &MixedSt| {
            m.sections
                .iter()
                .map(|s| {
                    let b = s.breaks();
                    (b[1..b.len() - 1].iter().map(to_f64).collect(), s.values().to_vec())
                })
                .collect()
        };
        let rule = match st {
            StoppingTime::Pure(p) => Rule::Section(sections(&embed_pure(p))),
            StoppingTime::Mixed(m) => Rule::Section(sections(m)),
            StoppingTime::Randomized(r) => {
                Rule::Inverse(r.paths.iter().map(|p| p.iter().map(to_f64).collect()).collect())
            }
            StoppingTime::Distribution(d) => Rule::Row(
                d.mass
                    .iter()
                    .enumerate()
                    .map(|(o, row)| cdf(row.iter().map(|m| to_f64(&(m / space.prob(o))))))
                    .collect(),
            ),
        };
        Ok(Self { outcome_cdf, rule })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, replicate: u64) -> SampleRecord {
        let outcome = search(&self.outcome_cdf, rng.gen::<f64>());
        let index = match &self.rule {
            Rule::Section(sections) => {
                let (breaks, values) = &sections[outcome];
                let r = rng.gen::<f64>();
                values[breaks.partition_point(|&b| b <= r)]
            }
            Rule::Inverse(paths) => {
                let r = 1.0 - rng.gen::<f64>();
                let path = &paths[outcome];
                path.iter().position(|&v| v >= r).unwrap_or(path.len() - 1)
            }
            Rule::Row(rows) => search(&rows[outcome], rng.gen::<f64>()),
        };
        SampleRecord { outcome, index, replicate }
    }

    pub fn draw_many<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<SampleRecord> {
        (0..n as u64).map(|i| self.draw(rng, i)).collect()
    }
}

/// One draw from `st`.
pub fn sample_stop<R: Rng + ?Sized>(
    space: &FilteredSpace,
    st: &StoppingTime,
    rng: &mut R,
    replicate: u64,
) -> Result<SampleRecord, Error> {
    Ok(Sampler::new(space, st)?.draw(rng, replicate))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    /// `freq[outcome][index]`, relative frequencies.
    pub freq: Vec<Vec<f64>>,
    /// Total variation distance to the reference law.
    pub tv: f64,
    pub n: usize,
}

/// Relative frequencies of `samples` and their total variation distance
/// `1/2 * sum |freq - reference|` to `reference`.
pub fn empirical_delta(
    space: &FilteredSpace,
    samples: &[SampleRecord],
    reference: &DistributionSt,
) -> Result<Empirical, SampleError> {
    if samples.is_empty() {
        return Err(SampleError::EmptySamples);
    }
    validate_distribution(space, reference).into_result()?;
    let mut counts = vec![vec![0usize; space.n_times()]; space.n_outcomes()];
    for s in samples {
        let cell = counts
            .get_mut(s.outcome)
            .and_then(|row| row.get_mut(s.index))
            .ok_or(SampleError::OutOfRange { outcome: s.outcome, index: s.index })?;
        *cell += 1;
    }
    let n = samples.len() as f64;
    let freq: Vec<Vec<f64>> =
        counts.iter().map(|row| row.iter().map(|&c| c as f64 / n).collect()).collect();
    let tv = 0.5
        * freq
            .iter()
            .zip(&reference.mass)
            .flat_map(|(f, r)| f.iter().zip(r).map(|(f, r)| (f - to_f64(r)).abs()))
            .sum::<f64>();
    Ok(Empirical { freq, tv, n: samples.len() })
}
