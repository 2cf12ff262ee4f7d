//! Event-driven Monte Carlo of the process observed at one horizon.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    BranchingModel, LifetimeLaw, LightTail, OffspringSampler, ParetoTail, SlowlyVarying,
};
use crate::scalar::Scalar;

pub const DEFAULT_EVENT_BUDGET: u64 = 10_000_000;

/// Independent stream for replicate `replicate` of a run seeded with `seed`.
pub fn replicate_stream(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// One draw of `(Z₁(t), Z₂(t))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationSample {
    pub z1: u64,
    pub z2: u64,
    /// Deaths processed.
    pub events: u64,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: u64,
    pub t: f64,
    pub replicates: u64,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub event_budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_EVENT_BUDGET
}

impl SimConfig {
    pub fn new(n: u64, t: f64, replicates: u64, seed: u64) -> Self {
        Self {
            n,
            t,
            replicates,
            seed,
            event_budget: DEFAULT_EVENT_BUDGET,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::EmptyRun);
        }
        if self.event_budget == 0 {
            return Err(Error::Config("event budget must be at least 1".into()));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::Config(format!("horizon must be finite and >= 0, got {}", self.t)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum LifetimeSampler {
    Exponential { inv_rate: f64 },
    Uniform { a: f64, width: f64 },
    Pareto { scale: f64, atom: f64, c: f64, inv_beta: f64 },
    General(LifetimeLaw),
}

impl LifetimeSampler {
    fn new(law: &LifetimeLaw) -> Self {
        match *law {
            LifetimeLaw::Light(LightTail::Exponential { rate }) => {
                LifetimeSampler::Exponential { inv_rate: 1.0 / rate }
            }
            LifetimeLaw::Light(LightTail::Uniform { a, b }) => {
                LifetimeSampler::Uniform { a, width: b - a }
            }
            LifetimeLaw::Pareto(p @ ParetoTail {
                beta,
                scale,
                ell: SlowlyVarying::Constant { c },
            }) => LifetimeSampler::Pareto {
                scale,
                atom: p.atom_at_scale(),
                c,
                inv_beta: 1.0 / beta,
            },
            ref other => LifetimeSampler::General(other.clone()),
        }
    }

    #[inline]
    fn sample(&self, u: f64) -> f64 {
        match *self {
            LifetimeSampler::Exponential { inv_rate } => -(-u).ln_1p() * inv_rate,
            LifetimeSampler::Uniform { a, width } => a + u * width,
            LifetimeSampler::Pareto {
                scale,
                atom,
                c,
                inv_beta,
            } => {
                if u < atom {
                    scale
                } else {
                    let x = c / (1.0 - u);
                    if inv_beta == 2.0 {
                        x * x
                    } else if inv_beta == 4.0 {
                        (x * x) * (x * x)
                    } else {
                        x.powf(inv_beta)
                    }
                }
            }
            LifetimeSampler::General(ref law) => law.quantile(u),
        }
    }
}

/// Sampling tables for one model.
#[derive(Clone, Debug)]
pub struct Simulator {
    offspring: [OffspringSampler; 2],
    lifetimes: [LifetimeSampler; 2],
    lattice: Option<f64>,
}

impl Simulator {
    pub fn new<T: Scalar>(model: &BranchingModel<T>) -> Self {
        Self {
            offspring: [model.offspring[0].sampler(), model.offspring[1].sampler()],
            lifetimes: [
                LifetimeSampler::new(&model.lifetimes[0]),
                LifetimeSampler::new(&model.lifetimes[1]),
            ],
            lattice: None,
        }
    }

    /// Rounds every lifetime up to a multiple of `step`: the process whose law
    /// the lattice solvers compute exactly.
    pub fn on_lattice(mut self, step: f64) -> Self {
        self.lattice = Some(step);
        self
    }

    /// Start from `N` type-2 particles.
    pub fn simulate<R: Rng>(&self, n: u64, t: f64, rng: &mut R, event_budget: u64) -> PopulationSample {
        self.simulate_from([0, n], t, rng, event_budget)
    }

    /// Depth-first processing of `(birth time, type)` records, starting from
    /// `start[i]` particles of type `i+1` born at time 0.
    pub fn simulate_from<R: Rng>(
        &self,
        start: [u64; 2],
        t: f64,
        rng: &mut R,
        event_budget: u64,
    ) -> PopulationSample {
        // lattice mode works in whole steps so comparisons are exact
        let (horizon, step) = match self.lattice {
            Some(h) => ((t / h).round(), Some(h)),
            None => (t, None),
        };
        let mut z = [0u64; 2];
        let mut events = 0u64;
        let mut stack: Vec<(f64, u8)> = Vec::with_capacity(64);
        let ancestors = (0..start[0]).map(|_| 0u8).chain((0..start[1]).map(|_| 1u8));
        for root in ancestors {
            stack.push((0.0, root));
            while let Some((birth, ty)) = stack.pop() {
                let ty = ty as usize;
                let mut life = self.lifetimes[ty].sample(rng.gen::<f64>());
                if let Some(h) = step {
                    life = (life / h).ceil().max(1.0);
                }
                let death = birth + life;
                if death > horizon {
                    z[ty] += 1;
                    continue;
                }
                events += 1;
                if events > event_budget {
                    return PopulationSample {
                        z1: z[0],
                        z2: z[1],
                        events,
                        truncated: true,
                    };
                }
                let kids = self.offspring[ty].sample(rng.gen::<f64>());
                for _ in 0..kids[0] {
                    stack.push((death, 0));
                }
                for _ in 0..kids[1] {
                    stack.push((death, 1));
                }
            }
        }
        PopulationSample {
            z1: z[0],
            z2: z[1],
            events,
            truncated: false,
        }
    }
}

/// Exact draw of `(Z₁(t), Z₂(t))` started from `N` type-2 particles.
pub fn simulate_population<T: Scalar, R: Rng>(
    model: &BranchingModel<T>,
    n: u64,
    t: f64,
    rng: &mut R,
    event_budget: u64,
) -> PopulationSample {
    Simulator::new(model).simulate(n, t, rng, event_budget)
}

/// Replicate samples in index order plus the number of truncated ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub samples: Vec<PopulationSample>,
    pub truncated: u64,
}

impl Batch {
    pub fn usable(&self) -> impl Iterator<Item = &PopulationSample> {
        self.samples.iter().filter(|s| !s.truncated)
    }

    pub fn truncated_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.truncated as f64 / self.samples.len() as f64
        }
    }

    /// More than 1% truncation makes a run unusable for estimates.
    pub fn is_valid(&self) -> bool {
        self.truncated_fraction() <= 0.01
    }

    pub fn total_events(&self) -> u64 {
        self.samples.iter().map(|s| s.events).sum()
    }
}

/// Runs `config.replicates` independent replicates; replicate `r` uses stream
/// `(seed, r)`, so the output does not depend on scheduling.
pub fn simulate_batch<T: Scalar>(model: &BranchingModel<T>, config: &SimConfig) -> Result<Batch> {
    run_batch(&Simulator::new(model), config)
}

pub fn run_batch(sim: &Simulator, config: &SimConfig) -> Result<Batch> {
    run_batch_from(sim, [0, config.n], config)
}

/// Like [`run_batch`] with an arbitrary initial composition (`config.n` is ignored).
pub fn run_batch_from(sim: &Simulator, start: [u64; 2], config: &SimConfig) -> Result<Batch> {
    config.check()?;
    let samples: Vec<PopulationSample> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_stream(config.seed, r);
            sim.simulate_from(start, config.t, &mut rng, config.event_budget)
        })
        .collect();
    let truncated = samples.iter().filter(|s| s.truncated).count() as u64;
    Ok(Batch { samples, truncated })
}
