//! Closed-form outcome probabilities, the Monte Carlo harness and α sweeps.
//!
//! The closed forms here never touch a state vector, so comparing them with
//! [`crate::protocols::enumerate_branches`] checks two independent routes to
//! the same numbers.

use crate::error::{Error, Result};
use crate::protocols::{ChannelSpec, InputQubit, OutcomeLabel, Protocol};
use crate::random::RandomSource;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

/// Trials handled sequentially per parallel work unit. Results are combined
/// in chunk order, so summaries do not depend on scheduling.
const CHUNK: u64 = 4096;

/// Exact branch probabilities of the qubit-assisted protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub channel: ChannelSpec,
    pub per_outcome: BTreeMap<OutcomeLabel, f64>,
    /// Probability of landing in `{Φ₁, Φ₂}` and `{Φ₃, Φ₄}`.
    pub subspace_probabilities: [f64; 2],
    /// Conclusive probability of the discrimination POVM given a subspace
    /// outcome, `2β⁴/(α⁴+β⁴)`.
    pub conclusive_within_subspace: f64,
    /// Joint probability of a subspace outcome followed by a conclusive
    /// result, `β⁴`.
    pub joint_conclusive_per_subspace: f64,
    pub success_total: f64,
}

/// `2β²`
pub fn success_total(channel: &ChannelSpec) -> f64 {
    2.0 * channel.beta_sq()
}

/// `2β⁴/(α⁴+β⁴)`
pub fn conclusive_within_subspace(channel: &ChannelSpec) -> f64 {
    let (a4, b4) = (channel.alpha_sq().powi(2), channel.beta_sq().powi(2));
    2.0 * b4 / (a4 + b4)
}

/// Success probability a protocol should reach on the channel.
pub fn analytic_success(protocol: Protocol, channel: &ChannelSpec) -> f64 {
    match protocol {
        Protocol::Bbcjpw => 1.0,
        Protocol::QubitAssisted | Protocol::MorHorodecki => success_total(channel),
    }
}

pub fn analytic_outcome_probs(channel: &ChannelSpec, input: &InputQubit) -> AnalyticReport {
    let (a2, b2) = (channel.alpha_sq(), channel.beta_sq());
    let (a4, b4) = (a2 * a2, b2 * b2);
    let (pa, pb) = (input.a.norm_sqr(), input.b.norm_sqr());
    let direct = a2 * b2 / 2.0;
    let sub1 = pa * a4 + pb * b4;
    let sub2 = pa * b4 + pb * a4;

    use OutcomeLabel::*;
    let per_outcome = BTreeMap::from([
        (Phi5, direct),
        (Phi6, direct),
        (Phi7, direct),
        (Phi8, direct),
        (Subspace1Plus, b4 / 2.0),
        (Subspace1Minus, b4 / 2.0),
        (Subspace1Fail, sub1 - b4),
        (Subspace2Plus, b4 / 2.0),
        (Subspace2Minus, b4 / 2.0),
        (Subspace2Fail, sub2 - b4),
    ]);
    AnalyticReport {
        channel: *channel,
        per_outcome,
        subspace_probabilities: [sub1, sub2],
        conclusive_within_subspace: conclusive_within_subspace(channel),
        joint_conclusive_per_subspace: b4,
        success_total: success_total(channel),
    }
}

/// Closed-form branch probabilities for any protocol. Haar inputs use the
/// input average (`|a|² → 1/2`), which only moves the subspace failure
/// branches of the qubit-assisted protocol.
pub fn expected_outcome_probs(protocol: Protocol, channel: &ChannelSpec, input: InputSpec) -> BTreeMap<OutcomeLabel, f64> {
    match protocol {
        Protocol::QubitAssisted => {
            let averaged = InputQubit { a: Complex64::new(FRAC_1_SQRT_2, 0.0), b: Complex64::new(FRAC_1_SQRT_2, 0.0) };
            let q = match input {
                InputSpec::Explicit(q) => q,
                InputSpec::Haar => averaged,
            };
            analytic_outcome_probs(channel, &q).per_outcome
        }
        Protocol::Bbcjpw => OutcomeLabel::BELL.iter().map(|&l| (l, 0.25)).collect(),
        Protocol::MorHorodecki => {
            let b2 = channel.beta_sq();
            let mut m: BTreeMap<_, _> = OutcomeLabel::BELL.iter().map(|&l| (l, b2 / 2.0)).collect();
            m.insert(OutcomeLabel::FilterFail, 1.0 - 2.0 * b2);
            m
        }
    }
}

/// Where trial inputs come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    Explicit(InputQubit),
    /// A fresh Haar-random qubit per trial.
    Haar,
}

/// Uniformly distributed pure qubit, from a normalized pair of standard
/// complex Gaussians.
pub fn haar_random_input(randomness: &mut RandomSource) -> InputQubit {
    loop {
        let a = Complex64::new(randomness.standard_normal(), randomness.standard_normal());
        let b = Complex64::new(randomness.standard_normal(), randomness.standard_normal());
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-150 {
            return InputQubit::new(a / n, b / n).expect("normalized");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub protocol: Protocol,
    pub channel: ChannelSpec,
    pub input: InputSpec,
    pub n_trials: u64,
    pub seed: u64,
    pub counts: BTreeMap<OutcomeLabel, u64>,
    pub empirical_frequencies: BTreeMap<OutcomeLabel, f64>,
    pub standard_errors: BTreeMap<OutcomeLabel, f64>,
    pub successes: u64,
    pub success_rate: f64,
    pub success_std_err: f64,
    /// Mean fidelity over successful trials; `None` when none succeeded.
    pub mean_success_fidelity: Option<f64>,
    pub min_success_fidelity: Option<f64>,
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<OutcomeLabel, u64>,
    successes: u64,
    fidelity_sum: f64,
    fidelity_min: f64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        if other.successes > 0 {
            self.fidelity_min = if self.successes > 0 { self.fidelity_min.min(other.fidelity_min) } else { other.fidelity_min };
        }
        self.successes += other.successes;
        self.fidelity_sum += other.fidelity_sum;
        self
    }
}

fn binomial_std_err(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Run `n_trials` independent protocol runs. Trial `i` draws all of its
/// randomness (including a Haar input) from the stream `(seed, i)`, so equal
/// arguments give bit-identical summaries.
pub fn monte_carlo(
    protocol: Protocol,
    channel: &ChannelSpec,
    input: InputSpec,
    n_trials: u64,
    seed: u64,
) -> Result<TrialSummary> {
    if n_trials == 0 {
        return Err(Error::NoTrials);
    }
    let teleporter = protocol.prepare(*channel);
    let n_chunks = n_trials.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut t = Tally::default();
            for trial in chunk * CHUNK..((chunk + 1) * CHUNK).min(n_trials) {
                let mut rng = RandomSource::for_trial(seed, trial);
                let qubit = match input {
                    InputSpec::Explicit(q) => q,
                    InputSpec::Haar => haar_random_input(&mut rng),
                };
                let record = teleporter.run(&qubit, &mut rng);
                *t.counts.entry(record.outcome_label).or_default() += 1;
                if record.success {
                    let f = record.fidelity_with(&qubit).expect("sampled runs carry Bob's state");
                    t.fidelity_min = if t.successes == 0 { f } else { t.fidelity_min.min(f) };
                    t.successes += 1;
                    t.fidelity_sum += f;
                }
            }
            t
        })
        .collect();
    let total = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let n = n_trials as f64;
    let empirical_frequencies: BTreeMap<_, _> = total.counts.iter().map(|(&k, &c)| (k, c as f64 / n)).collect();
    let standard_errors = empirical_frequencies.iter().map(|(&k, &f)| (k, binomial_std_err(f, n_trials))).collect();
    let success_rate = total.successes as f64 / n;
    let (mean_success_fidelity, min_success_fidelity) = if total.successes > 0 {
        (Some(total.fidelity_sum / total.successes as f64), Some(total.fidelity_min))
    } else {
        (None, None)
    };
    Ok(TrialSummary {
        protocol,
        channel: protocol.effective_channel(*channel),
        input,
        n_trials,
        seed,
        counts: total.counts,
        empirical_frequencies,
        standard_errors,
        successes: total.successes,
        success_rate,
        success_std_err: binomial_std_err(success_rate, n_trials),
        mean_success_fidelity,
        min_success_fidelity,
    })
}

/// One grid point of an α sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub analytic_success: f64,
    pub empirical_success: f64,
    /// Binomial standard error at the analytic success probability.
    pub std_err: f64,
    pub conclusive_within_subspace: f64,
    pub mean_success_fidelity: Option<f64>,
}

impl SweepRow {
    /// Distance between empirical and analytic success in standard errors.
    /// Zero-variance rows must match exactly.
    pub fn within_sigmas(&self, k: f64) -> bool {
        (self.empirical_success - self.analytic_success).abs() <= k * self.std_err + 1e-12
    }
}

/// Every grid value must lie in `[1/2, 1]`. Each row reuses `seed`.
pub fn sweep_alpha(grid: &[f64], protocol: Protocol, input: InputSpec, n_trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    let channels = grid.iter().map(|&x| ChannelSpec::from_alpha_sq(x)).collect::<Result<Vec<_>>>()?;
    grid.iter()
        .zip(channels)
        .map(|(&alpha_sq, channel)| {
            let summary = monte_carlo(protocol, &channel, input, n_trials, seed)?;
            let analytic = analytic_success(protocol, &channel);
            Ok(SweepRow {
                alpha_sq,
                beta_sq: 1.0 - alpha_sq,
                analytic_success: analytic,
                empirical_success: summary.success_rate,
                std_err: binomial_std_err(analytic, n_trials),
                conclusive_within_subspace: conclusive_within_subspace(&channel),
                mean_success_fidelity: summary.mean_success_fidelity,
            })
        })
        .collect()
}
