//! The Monte Carlo engine: nested geometric retries with pairwise waiting.
//!
//! Trials are independent; trial `i` draws from stream `i` of a counter-mode
//! generator seeded with the root seed, so results are bit-identical for any
//! worker count and aggregation is a plain index-ordered reduction.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use repeater_analytics::success_probs;

use crate::config::{Result, SimConfig, SimError, SimOutcome, TimeModel};

/// Geometric attempt count (support 1, 2, ...) by inverse CDF; `O(1)` per
/// draw regardless of how small `p` is.
fn sample_geometric(rng: &mut ChaCha8Rng, p: f64, ln_one_minus_p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.random();
    let g = ((1.0 - u).ln() / ln_one_minus_p).ceil();
    if g < 1.0 {
        1
    } else {
        g as u64
    }
}

fn sample_exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() * mean
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Per-stage success probabilities driving the retry structure. Normally
/// derived from the protocol parameters; injectable directly for testing
/// the time accounting in degenerate limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageProbs {
    /// Local PME generation per slot.
    pub p_r: f64,
    /// Elementary-link attempt.
    pub p_b: f64,
    /// Swap attempt, identical at every level.
    pub p_i: f64,
}

impl StageProbs {
    pub fn from_params(params: &repeater_analytics::ProtocolParams) -> Result<Self> {
        let probs = success_probs(params)?;
        Ok(Self { p_r: probs.p_r, p_b: probs.p_b, p_i: probs.p_i })
    }

    fn validate(&self, levels_above_zero: bool) -> Result<()> {
        for (name, p) in [("p_r", self.p_r), ("p_b", self.p_b), ("p_i", self.p_i)] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(SimError::InvalidConfig(format!(
                    "stage probability {name} = {p} out of [0, 1]"
                )));
            }
        }
        if self.p_r <= 0.0 || self.p_b <= 0.0 || (levels_above_zero && self.p_i <= 0.0) {
            return Err(SimError::InvalidConfig(
                "a required stage probability is zero; the protocol never succeeds".into(),
            ));
        }
        Ok(())
    }
}

struct Env {
    p_r: f64,
    ln_one_minus_p_r: f64,
    p_b: f64,
    p_i: f64,
    slot: f64,
    herald: f64,
    local_mean: f64,
    time_model: TimeModel,
    coherence_time: Option<f64>,
}

impl Env {
    fn new(cfg: &SimConfig, probs: StageProbs) -> Env {
        Env {
            p_r: probs.p_r,
            ln_one_minus_p_r: (1.0 - probs.p_r).ln(),
            p_b: probs.p_b,
            p_i: probs.p_i,
            slot: 1.0 / cfg.params.r,
            herald: cfg.params.l0() / cfg.params.c,
            local_mean: 1.0 / (cfg.params.r * probs.p_r),
            time_model: cfg.time_model,
            coherence_time: cfg.memory_coherence_time,
        }
    }

    /// Waiting time until one node has a fresh local PME state.
    fn local_wait(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.time_model {
            TimeModel::AttemptSlotted => {
                sample_geometric(rng, self.p_r, self.ln_one_minus_p_r) as f64 * self.slot
            }
            TimeModel::Continuous => sample_exponential(rng, self.local_mean),
        }
    }
}

#[derive(Clone)]
struct TrialRecord {
    time: f64,
    attempts: Vec<u64>,
    successes: Vec<u64>,
    decoherence_events: u64,
}

struct TrialState<'a> {
    env: &'a Env,
    rng: ChaCha8Rng,
    attempts: Vec<u64>,
    successes: Vec<u64>,
    decoherence_events: u64,
}

impl TrialState<'_> {
    /// Elapsed time to establish one entangled pair spanning `2^level`
    /// elementary links. Both sub-links are built (conceptually in
    /// parallel, so the wait is the larger of the two), then the swap is
    /// attempted; a failed swap discards both sub-links.
    fn build(&mut self, level: u32) -> f64 {
        if level == 0 {
            let mut elapsed = 0.0;
            loop {
                let w1 = self.env.local_wait(&mut self.rng);
                let w2 = self.env.local_wait(&mut self.rng);
                elapsed += w1.max(w2) + self.env.herald;
                self.attempts[0] += 1;
                if bernoulli(&mut self.rng, self.env.p_b) {
                    self.successes[0] += 1;
                    return elapsed;
                }
            }
        }
        let mut elapsed = 0.0;
        loop {
            let t1 = self.build(level - 1);
            let t2 = self.build(level - 1);
            elapsed += t1.max(t2);
            if let Some(tau) = self.env.coherence_time {
                // the earlier link idles until the later one is ready
                let idle = (t1 - t2).abs();
                let lifetime = sample_exponential(&mut self.rng, tau);
                if lifetime < idle {
                    self.decoherence_events += 1;
                    continue;
                }
            }
            elapsed += self.env.herald;
            self.attempts[level as usize] += 1;
            if bernoulli(&mut self.rng, self.env.p_i) {
                self.successes[level as usize] += 1;
                return elapsed;
            }
        }
    }
}

fn run_trial(env: &Env, root_seed: u64, trial: u64, levels: usize) -> TrialRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(trial);
    let mut state = TrialState {
        env,
        rng,
        attempts: vec![0; levels],
        successes: vec![0; levels],
        decoherence_events: 0,
    };
    let time = state.build(levels as u32 - 1);
    TrialRecord {
        time,
        attempts: state.attempts,
        successes: state.successes,
        decoherence_events: state.decoherence_events,
    }
}

fn aggregate(cfg: &SimConfig, records: Vec<TrialRecord>) -> SimOutcome {
    let trials = records.len() as u64;
    let levels = records.first().map(|r| r.attempts.len()).unwrap_or(0);

    // index-ordered Welford pass keeps the result independent of how the
    // trials were scheduled
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut attempts = vec![0u64; levels];
    let mut successes = vec![0u64; levels];
    let mut decoherence = 0u64;
    for (i, rec) in records.iter().enumerate() {
        let delta = rec.time - mean;
        mean += delta / (i as f64 + 1.0);
        m2 += delta * (rec.time - mean);
        for (acc, x) in attempts.iter_mut().zip(&rec.attempts) {
            *acc += x;
        }
        for (acc, x) in successes.iter_mut().zip(&rec.successes) {
            *acc += x;
        }
        decoherence += rec.decoherence_events;
    }
    let variance = if trials > 1 { m2 / (trials as f64 - 1.0) } else { 0.0 };
    let std_error = (variance / trials as f64).sqrt();

    SimOutcome {
        trials: cfg.trials,
        mean_total_time: mean,
        std_error,
        attempts_per_level: attempts.iter().map(|&a| a as f64 / trials as f64).collect(),
        success_rate_conditional: successes
            .iter()
            .zip(&attempts)
            .map(|(&s, &a)| if a == 0 { 0.0 } else { s as f64 / a as f64 })
            .collect(),
        mean_decoherence_events: decoherence as f64 / trials as f64,
    }
}

/// Runs the full nested protocol at the nesting level in `cfg.params`,
/// with stage probabilities derived from the protocol parameters.
/// Deterministic for a given config: identical seeds give bit-identical
/// outcomes regardless of thread count.
pub fn simulate(cfg: &SimConfig) -> Result<SimOutcome> {
    cfg.validate()?;
    let probs = StageProbs::from_params(&cfg.params)?;
    simulate_with_probs(cfg, probs)
}

/// Same engine with the stage probabilities supplied directly.
pub fn simulate_with_probs(cfg: &SimConfig, probs: StageProbs) -> Result<SimOutcome> {
    if cfg.trials == 0 {
        return Err(SimError::InvalidConfig("trials must be at least 1".into()));
    }
    probs.validate(cfg.params.n >= 1)?;
    let env = Env::new(cfg, probs);
    let levels = cfg.params.n as usize + 1;
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(&env, cfg.seed, trial, levels))
        .collect();
    Ok(aggregate(cfg, records))
}

/// Runs only the elementary-link stage (the level-0 slice of the config).
pub fn simulate_basic_link(cfg: &SimConfig) -> Result<SimOutcome> {
    let mut cfg = cfg.clone();
    cfg.params = cfg.params.level_slice(0);
    simulate(&cfg)
}

/// Runs the nested protocol; requires at least one nesting level.
pub fn simulate_nested(cfg: &SimConfig) -> Result<SimOutcome> {
    if cfg.params.n == 0 {
        return Err(SimError::InvalidConfig(
            "nested simulation needs nesting level n >= 1".into(),
        ));
    }
    simulate(cfg)
}

/// Mean of the larger of two independent geometric attempt counts:
/// `2/p - 1/(2p - p^2)`.
pub fn expected_max_geometric(p: f64) -> f64 {
    2.0 / p - 1.0 / (2.0 * p - p * p)
}

/// Exact mean total time of the modeled elementary-link process:
/// `(E[max wait] + L0/c) / p_b`, with the max-wait mean matching the
/// configured time model.
pub fn closed_form_basic_link_mean(cfg: &SimConfig) -> Result<f64> {
    let params = cfg.params.level_slice(0);
    let probs = success_probs(&params)?;
    let mean_max_wait = match cfg.time_model {
        TimeModel::AttemptSlotted => expected_max_geometric(probs.p_r) / params.r,
        // max of two exponentials has mean 3/2 of one
        TimeModel::Continuous => 1.5 / (params.r * probs.p_r),
    };
    Ok((mean_max_wait + params.l0() / params.c) / probs.p_b)
}
