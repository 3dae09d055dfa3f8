//! Monte Carlo oracle for every analytic quantity.
//!
//! Trials are grouped in chunks of [`CHUNK_TRIALS`]; chunk `k` draws from
//! stream `k` of the run seed (see [`crate::rng`]), its blocks in order. Chunk
//! results are merged in chunk order, so output is bit-identical for any
//! thread count.

use crate::channel::{LinkBudget, ReceivedPower};
use crate::error::{domain, Result};
use crate::harvester::Harvester;
use crate::rfid::RfidScenario;
use crate::rng::{stream_rng, StreamRng};
use rayon::prelude::*;

pub const CHUNK_TRIALS: u64 = 4096;

/// Runs `work(chunk_index, trials_in_chunk, rng)` for every chunk of
/// `total` trials and returns the results in chunk order.
pub fn for_each_chunk<T, F>(total: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, &mut StreamRng) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK_TRIALS.min(total - k * CHUNK_TRIALS);
            let mut rng = stream_rng(seed, k);
            work(k, len, &mut rng)
        })
        .collect()
}

/// What to simulate: a harvester behind a fading link, `trials` independent
/// trajectories of `blocks_per_trial` coherence blocks.
#[derive(Clone, Copy)]
pub struct SimulationPlan<'a> {
    pub trials: u64,
    pub blocks_per_trial: usize,
    pub seed: u64,
    pub received: ReceivedPower,
    pub harvester: &'a dyn Harvester,
}

impl<'a> SimulationPlan<'a> {
    pub fn new(received: ReceivedPower, harvester: &'a dyn Harvester, trials: u64, blocks_per_trial: usize, seed: u64) -> Result<Self> {
        let plan = Self { trials, blocks_per_trial, seed, received, harvester };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.blocks_per_trial == 0 {
            return domain("a simulation needs at least one trial and one block");
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
        }
    }

    fn estimate(self) -> Estimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        Estimate { mean: self.mean, std_error: (var / self.n as f64).sqrt(), samples: self.n }
    }
}

/// Mean harvested energy `T_p * sum_n p(P_R^(n))` per trial, in mW * ms when
/// `packet_ms` is in ms. With one block and `packet_ms = 1` this is the mean
/// harvested power.
pub fn simulate_energy(plan: &SimulationPlan, packet_ms: f64) -> Result<Estimate> {
    plan.validate()?;
    let sampler = plan.received.sampler();
    let parts = for_each_chunk(plan.trials, plan.seed, |_, len, rng| {
        let mut acc = Moments::default();
        for _ in 0..len {
            let mut u = 0.0;
            for _ in 0..plan.blocks_per_trial {
                u += plan.harvester.power(sampler.sample(rng));
            }
            acc.push(packet_ms * u);
        }
        acc
    });
    Ok(parts.into_iter().fold(Moments::default(), Moments::merge).estimate())
}

/// Raw draws of the harvested power `p(P_R)` for one block each.
pub fn sample_harvested(plan: &SimulationPlan) -> Result<Vec<f64>> {
    plan.validate()?;
    let sampler = plan.received.sampler();
    let parts = for_each_chunk(plan.trials, plan.seed, |_, len, rng| {
        (0..len).map(|_| plan.harvester.power(sampler.sample(rng))).collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

/// Counts of samples per bin `[edges[k], edges[k+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramResult {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples that landed in some bin; equals the sum of `counts`.
    pub total: u64,
    /// Samples outside `[edges[0], edges[last])`.
    pub outside: u64,
}

impl HistogramResult {
    pub fn empty(bin_edges: Vec<f64>) -> Result<Self> {
        if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("histogram edges must be strictly increasing, at least two");
        }
        let n = bin_edges.len() - 1;
        Ok(Self { bin_edges, counts: vec![0; n], total: 0, outside: 0 })
    }

    pub fn add(&mut self, x: f64) {
        let k = self.bin_edges.partition_point(|&e| e <= x);
        if k == 0 || k == self.bin_edges.len() {
            self.outside += 1;
        } else {
            self.counts[k - 1] += 1;
            self.total += 1;
        }
    }

    fn merge(&mut self, other: &HistogramResult) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.outside += other.outside;
    }

    /// Fraction of all samples (inside and outside) in each bin.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = (self.total + self.outside) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    pub fn outside_fraction(&self) -> f64 {
        self.outside as f64 / (self.total + self.outside) as f64
    }
}

/// Histogram of the accumulated harvested power `U_N` over the given bins.
pub fn simulate_u_n(plan: &SimulationPlan, bin_edges: &[f64]) -> Result<HistogramResult> {
    plan.validate()?;
    let template = HistogramResult::empty(bin_edges.to_vec())?;
    let sampler = plan.received.sampler();
    let parts = for_each_chunk(plan.trials, plan.seed, |_, len, rng| {
        let mut h = template.clone();
        for _ in 0..len {
            let mut u = 0.0;
            for _ in 0..plan.blocks_per_trial {
                u += plan.harvester.power(sampler.sample(rng));
            }
            h.add(u);
        }
        h
    });
    let mut out = template;
    for p in &parts {
        out.merge(p);
    }
    Ok(out)
}

/// First-passage indices `N*` from simulated trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstPassageSamples {
    /// `N*` per trial; `0` marks a trial censored at the horizon.
    pub samples: Vec<u32>,
    pub censored: u64,
    pub horizon: usize,
}

impl FirstPassageSamples {
    /// Mean of `N*`, counting censored trials at the horizon; the flag is
    /// true when the value is therefore only a lower bound.
    pub fn mean(&self) -> (f64, bool) {
        let sum: u64 = self
            .samples
            .iter()
            .map(|&s| if s == 0 { self.horizon as u64 } else { s as u64 })
            .sum();
        (sum as f64 / self.samples.len() as f64, self.censored > 0)
    }

    pub fn std_error(&self) -> f64 {
        let (m, _) = self.mean();
        let n = self.samples.len() as f64;
        let ss: f64 = self
            .samples
            .iter()
            .map(|&s| {
                let v = if s == 0 { self.horizon as f64 } else { s as f64 };
                (v - m) * (v - m)
            })
            .sum();
        (ss / (n - 1.0).max(1.0) / n).sqrt()
    }

    /// Empirical PMF over `1..=horizon` (index 0 unused).
    pub fn pmf(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.horizon + 1];
        let n = self.samples.len() as f64;
        for &s in &self.samples {
            if s > 0 {
                p[s as usize] += 1.0 / n;
            }
        }
        p
    }
}

/// Simulates the first block index at which accumulated harvested power
/// exceeds `theta_mw`, up to `blocks_per_trial` blocks.
pub fn simulate_first_passage(plan: &SimulationPlan, theta_mw: f64) -> Result<FirstPassageSamples> {
    plan.validate()?;
    if !(theta_mw > 0.0) {
        return domain("threshold must be positive");
    }
    let sampler = plan.received.sampler();
    let horizon = plan.blocks_per_trial;
    let parts = for_each_chunk(plan.trials, plan.seed, |_, len, rng| {
        let mut out = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let mut u = 0.0;
            let mut hit = 0u32;
            for n in 1..=horizon {
                u += plan.harvester.power(sampler.sample(rng));
                if u > theta_mw {
                    hit = n as u32;
                    break;
                }
            }
            out.push(hit);
        }
        out
    });
    let samples = parts.concat();
    let censored = samples.iter().filter(|&&s| s == 0).count() as u64;
    Ok(FirstPassageSamples { samples, censored, horizon })
}

/// Joint-event counts of a backscatter round trip for one tag consumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RfidCounts {
    pub trials: u64,
    /// BER at the interrogator below the threshold.
    pub ber_ok: u64,
    /// Harvested share covers the tag consumption.
    pub energy_ok: u64,
    pub both: u64,
}

impl RfidCounts {
    pub fn success_frequency(&self) -> f64 {
        self.both as f64 / self.trials as f64
    }

    /// Binomial standard error of [`RfidCounts::success_frequency`].
    pub fn std_error(&self) -> f64 {
        let p = self.success_frequency();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Failure probability through the conditional decomposition
    /// `1 - P(energy) P(ber | energy)`.
    pub fn failure_via_complement(&self) -> f64 {
        if self.energy_ok == 0 {
            return 1.0;
        }
        let pb = self.energy_ok as f64 / self.trials as f64;
        let pa_given_b = self.both as f64 / self.energy_ok as f64;
        1.0 - pb * pa_given_b
    }

    fn merge(mut self, o: RfidCounts) -> RfidCounts {
        self.trials += o.trials;
        self.ber_ok += o.ber_ok;
        self.energy_ok += o.energy_ok;
        self.both += o.both;
        self
    }
}

/// Simulates the round trip for every tag consumption in `consumptions_mw`
/// against the same channel draws. The BER event is evaluated directly from
/// the interrogator's received power.
pub fn simulate_rfid(
    plan: &SimulationPlan,
    scn: &RfidScenario,
    link: &LinkBudget,
    consumptions_mw: &[f64],
) -> Result<Vec<RfidCounts>> {
    plan.validate()?;
    scn.validate()?;
    let sampler = plan.received.sampler();
    let zeta = scn.harvest_share();
    let k = consumptions_mw.len();
    let parts = for_each_chunk(plan.trials, plan.seed, |_, len, rng| {
        let mut counts = vec![RfidCounts::default(); k];
        for _ in 0..len {
            let pr = sampler.sample(rng);
            let ber_ok = scn.ber(scn.interrogator_power(link, pr)) < scn.ber_threshold;
            let harvested = plan.harvester.power(zeta * pr);
            for (c, &pc) in counts.iter_mut().zip(consumptions_mw) {
                let energy_ok = harvested > pc;
                c.trials += 1;
                c.ber_ok += ber_ok as u64;
                c.energy_ok += energy_ok as u64;
                c.both += (ber_ok && energy_ok) as u64;
            }
        }
        counts
    });
    let mut out = vec![RfidCounts::default(); k];
    for p in parts {
        for (o, c) in out.iter_mut().zip(p) {
            *o = o.merge(c);
        }
    }
    Ok(out)
}
