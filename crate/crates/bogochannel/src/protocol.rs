//! End-to-end communication experiment: encode an integer as an eigenstate
//! of the invariant observable, transmit it through a Bogolyubov channel,
//! decode by measuring the observable.
//!
//! Decoding sees only the received state and the observable; channel
//! parameters never reach the decoder. Trials whose truncation leakage
//! exceeds the budget are flagged invalid rather than counted as protocol
//! failures, and an experiment aborts when more than a tenth of its trials
//! are invalid: that signals a misconfigured cutoff, not broken physics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::channels::expanding::rw_channel;
use crate::channels::{
    random_asymmetric_channel_with_cap, random_symmetric_channel_with_cap, squeeze_cap,
    ChannelSpec,
};
use crate::error::{Error, Result};
use crate::evolve::{exp_evolve, EvolveOptions};
use crate::fock::{FockVector, ModeSet};
use crate::invariant::{build_invariant, schwinger_eigenstate, EigenstateProfile, InvariantObservable};

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelFamily {
    Identity,
    RandomSymmetric { strength: f64 },
    RandomAsymmetric { strength: f64 },
    Expanding { k: f64, mass: f64, epsilon: f64, sigma: f64 },
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelFamily::Identity => "identity",
            ChannelFamily::RandomSymmetric { .. } => "symmetric",
            ChannelFamily::RandomAsymmetric { .. } => "asymmetric",
            ChannelFamily::Expanding { .. } => "expanding",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub alphabet: Vec<i64>,
    pub modeset: ModeSet,
    pub weights: Vec<f64>,
    pub family: ChannelFamily,
    pub ensemble: usize,
    pub leakage_budget: f64,
    pub seed: u64,
}

impl ProtocolConfig {
    /// Alphabet `{0..=alphabet_max}` with uniform weights.
    pub fn new(
        modeset: ModeSet,
        family: ChannelFamily,
        alphabet_max: i64,
        ensemble: usize,
        seed: u64,
    ) -> Result<Self> {
        let m = modeset.n_modes();
        let cfg = ProtocolConfig {
            alphabet: (0..=alphabet_max).collect(),
            weights: vec![1.0 / m as f64; m],
            modeset,
            family,
            ensemble,
            leakage_budget: 1e-6,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn alphabet_max(&self) -> i64 {
        self.alphabet.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet.is_empty() {
            return Err(Error::InvalidParameter("alphabet is empty".into()));
        }
        if self.alphabet.iter().any(|l| *l < 0) {
            return Err(Error::InvalidParameter("alphabet values must be nonnegative".into()));
        }
        let capacity = self.modeset.cutoff() as i64;
        let max = self.alphabet_max();
        if max > capacity {
            return Err(Error::CapacityExceeded { lambda: max, capacity });
        }
        if self.ensemble == 0 {
            return Err(Error::InvalidParameter("ensemble must be at least 1".into()));
        }
        if !(self.leakage_budget > 0.0) {
            return Err(Error::InvalidParameter("leakage budget must be positive".into()));
        }
        if let ChannelFamily::Expanding { k, .. } = self.family {
            if self.modeset.labels() != [k, -k] {
                return Err(Error::InvalidParameter(
                    "expanding channel needs the mode pair {k, -k}".into(),
                ));
            }
        }
        Ok(())
    }

    fn channel(&self, index: usize) -> Result<ChannelSpec> {
        let cap = squeeze_cap(
            self.modeset.cutoff(),
            self.alphabet_max() as usize,
            self.leakage_budget,
        );
        let child = child_seed(self.seed, index as u64);
        match self.family {
            ChannelFamily::Identity => Ok(ChannelSpec::identity(self.modeset.labels())),
            ChannelFamily::RandomSymmetric { strength } => {
                random_symmetric_channel_with_cap(child, strength, &self.modeset, cap)
            }
            ChannelFamily::RandomAsymmetric { strength } => {
                random_asymmetric_channel_with_cap(child, strength, &self.modeset, cap)
            }
            ChannelFamily::Expanding { k, mass, epsilon, sigma } => {
                rw_channel(k, mass, epsilon, sigma)
            }
        }
    }
}

fn child_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ (stream.wrapping_add(1)).wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Normalized eigenstate carrying `lambda`.
pub fn encode(lambda: i64, config: &ProtocolConfig) -> Result<FockVector> {
    if !config.alphabet.contains(&lambda) {
        return Err(Error::InvalidParameter(format!("{lambda} is not in the alphabet")));
    }
    schwinger_eigenstate(lambda, &config.modeset, &EigenstateProfile::Minimal)
}

#[derive(Clone, Debug)]
pub struct Transmission {
    pub state: FockVector,
    pub leakage: f64,
    /// False when the leakage budget was exceeded; the trial is then void.
    pub valid: bool,
}

/// Evolve the state through a generator-based channel.
pub fn transmit(state: &FockVector, channel: &ChannelSpec, budget: f64) -> Result<Transmission> {
    let generator = channel.generator.as_ref().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "channel {} carries no generator; only generator-based channels evolve states",
            channel.label
        ))
    })?;
    let h = generator.to_fock(&state.modeset)?;
    let evolved = exp_evolve(&h, state, &EvolveOptions::default())?;
    Ok(Transmission {
        valid: evolved.leakage <= budget,
        leakage: evolved.leakage,
        state: evolved.state,
    })
}

/// Expectation value of the observable and its nearest integer.
pub fn decode_expectation(state: &FockVector, l: &InvariantObservable) -> Result<(f64, i64)> {
    let e = l.expectation(state)?;
    Ok((e, e.round() as i64))
}

const DENSE_DECODER_LIMIT: usize = 4096;

/// Dense spectral decomposition of the observable, reusable for sampling.
pub struct SpectralDecoder {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecoder {
    pub fn new(l: &InvariantObservable) -> Result<Self> {
        let dim = l.fock_form().dim();
        if dim > DENSE_DECODER_LIMIT {
            return Err(Error::DimensionTooLarge { dim, limit: DENSE_DECODER_LIMIT });
        }
        let eig = l.fock_form().mat.to_dense().symmetric_eigen();
        Ok(SpectralDecoder {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    /// Born-rule sample of the observable, eigenspaces grouped by rounded
    /// eigenvalue. Deterministic given the RNG state.
    pub fn sample<R: Rng>(&self, state: &FockVector, rng: &mut R) -> Result<i64> {
        let dim = self.eigenvalues.len();
        if state.amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { got: state.amplitudes.len(), expected: dim });
        }
        let mut probs = Vec::with_capacity(dim);
        let mut total = 0.0f64;
        for col in 0..dim {
            let mut overlap = Complex64::new(0.0, 0.0);
            for row in 0..dim {
                overlap += self.eigenvectors[(row, col)].conj() * state.amplitudes[row];
            }
            let p = overlap.norm_sqr();
            total += p;
            probs.push(p);
        }
        if total <= 0.0 {
            return Err(Error::InvalidParameter("zero state".into()));
        }
        let mut u = rng.gen_range(0.0..total);
        for (col, p) in probs.iter().enumerate() {
            if u < *p {
                return Ok(self.eigenvalues[col].round() as i64);
            }
            u -= p;
        }
        Ok(self.eigenvalues[dim - 1].round() as i64)
    }
}

/// One-shot projective sample; builds the decomposition on the fly.
pub fn decode_sample<R: Rng>(
    state: &FockVector,
    l: &InvariantObservable,
    rng: &mut R,
) -> Result<i64> {
    SpectralDecoder::new(l)?.sample(state, rng)
}

#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub trial: usize,
    pub lambda_sent: i64,
    pub expectation: f64,
    pub decoded: i64,
    pub residual: f64,
    pub variance: f64,
    pub leakage: f64,
    pub channel_id: String,
    pub valid: bool,
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub records: Vec<TrialRecord>,
    pub success_rate: f64,
    pub valid_trials: usize,
    pub invalid_trials: usize,
    pub worst_residual: f64,
    pub worst_leakage: f64,
}

/// Run the full experiment: every alphabet value through every channel of
/// the ensemble. Trials are independent and run in parallel; records are
/// merged in deterministic order.
pub fn run_experiment(config: &ProtocolConfig) -> Result<ProtocolResult> {
    config.validate()?;
    let l = build_invariant(&config.modeset, &config.weights)?;

    let per_channel: Vec<Result<Vec<TrialRecord>>> = (0..config.ensemble)
        .into_par_iter()
        .map(|ci| {
            let channel = config.channel(ci)?;
            let mut out = Vec::with_capacity(config.alphabet.len());
            for (ai, &lambda) in config.alphabet.iter().enumerate() {
                let trial = ci * config.alphabet.len() + ai;
                let sent = encode(lambda, config)?;
                let tx = transmit(&sent, &channel, config.leakage_budget)?;
                let (expectation, decoded) = decode_expectation(&tx.state, &l)?;
                let variance = l.variance(&tx.state)?;
                out.push(TrialRecord {
                    trial,
                    lambda_sent: lambda,
                    expectation,
                    decoded,
                    residual: (expectation - lambda as f64).abs(),
                    variance,
                    leakage: tx.leakage,
                    channel_id: channel.label.clone(),
                    valid: tx.valid,
                });
            }
            Ok(out)
        })
        .collect();

    let mut records = Vec::with_capacity(config.ensemble * config.alphabet.len());
    for r in per_channel {
        records.extend(r?);
    }

    let invalid_trials = records.iter().filter(|r| !r.valid).count();
    let total = records.len();
    if invalid_trials * 10 > total {
        return Err(Error::ExcessInvalidTrials { invalid: invalid_trials, total });
    }
    let valid: Vec<&TrialRecord> = records.iter().filter(|r| r.valid).collect();
    let successes = valid.iter().filter(|r| r.decoded == r.lambda_sent).count();
    let success_rate = successes as f64 / valid.len().max(1) as f64;
    let worst_residual = valid.iter().map(|r| r.residual).fold(0.0, f64::max);
    let worst_leakage = valid.iter().map(|r| r.leakage).fold(0.0, f64::max);
    Ok(ProtocolResult {
        success_rate,
        valid_trials: valid.len(),
        invalid_trials,
        worst_residual,
        worst_leakage,
        records,
    })
}

/// Seeded RNG for sampling paths; kept here so callers share one stream type.
pub fn sampling_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::uniform_invariant;

    fn small_config(family: ChannelFamily, ensemble: usize) -> ProtocolConfig {
        let ms = ModeSet::new(&[1.0], 16).unwrap();
        ProtocolConfig::new(ms, family, 3, ensemble, 77).unwrap()
    }

    #[test]
    fn encode_zero_is_vacuum_and_states_are_orthogonal() {
        let cfg = small_config(ChannelFamily::Identity, 1);
        let zero = encode(0, &cfg).unwrap();
        assert!((zero.amplitudes[0].norm() - 1.0).abs() < 1e-14);
        let two = encode(2, &cfg).unwrap();
        let three = encode(3, &cfg).unwrap();
        assert!(two.inner(&three).norm() < 1e-13);
        assert!(encode(9, &cfg).is_err());
    }

    #[test]
    fn identity_channel_decodes_exactly() {
        let cfg = small_config(ChannelFamily::Identity, 2);
        let result = run_experiment(&cfg).unwrap();
        assert_eq!(result.success_rate, 1.0);
        assert_eq!(result.invalid_trials, 0);
        assert!(result.worst_residual < 1e-10);
    }

    #[test]
    fn symmetric_channels_preserve_expectation_and_variance() {
        let cfg = small_config(ChannelFamily::RandomSymmetric { strength: 0.3 }, 6);
        let l = uniform_invariant(&cfg.modeset).unwrap();
        for ci in 0..cfg.ensemble {
            let ch = cfg.channel(ci).unwrap();
            for lambda in [1i64, 3] {
                let sent = encode(lambda, &cfg).unwrap();
                let tx = transmit(&sent, &ch, cfg.leakage_budget).unwrap();
                assert!(tx.valid, "leakage {}", tx.leakage);
                let (e, d) = decode_expectation(&tx.state, &l).unwrap();
                assert_eq!(d, lambda);
                assert!((e - lambda as f64).abs() < 1e-6 + tx.leakage);
                let v = l.variance(&tx.state).unwrap();
                assert!(v.abs() < 1e-6 + tx.leakage, "variance {v}");
            }
        }
    }

    #[test]
    fn asymmetric_ensemble_fails_somewhere() {
        let ms = ModeSet::new(&[1.0], 20).unwrap();
        let cfg =
            ProtocolConfig::new(ms, ChannelFamily::RandomAsymmetric { strength: 0.3 }, 4, 12, 77)
                .unwrap();
        let result = run_experiment(&cfg).unwrap();
        assert!(result.success_rate < 1.0, "negative control should not be perfect");
        assert!(
            result.records.iter().any(|r| r.valid && r.residual > 0.1),
            "expected at least one strongly deflected trial"
        );
    }

    #[test]
    fn born_sampling_matches_eigenstate_and_weights() {
        let ms = ModeSet::new(&[1.0], 6).unwrap();
        let cfg = ProtocolConfig::new(ms.clone(), ChannelFamily::Identity, 4, 1, 5).unwrap();
        let l = uniform_invariant(&ms).unwrap();
        let decoder = SpectralDecoder::new(&l).unwrap();
        let mut rng = sampling_rng(99);

        // exact eigenstate: deterministic outcome
        let psi = encode(3, &cfg).unwrap();
        for _ in 0..50 {
            assert_eq!(decoder.sample(&psi, &mut rng).unwrap(), 3);
        }

        // known superposition: empirical frequencies within multinomial bounds
        let a = encode(1, &cfg).unwrap();
        let b = encode(2, &cfg).unwrap();
        let w = (0.3f64, 0.7f64);
        let mix = FockVector {
            modeset: ms.clone(),
            amplitudes: a
                .amplitudes
                .iter()
                .zip(&b.amplitudes)
                .map(|(x, y)| x * w.0.sqrt() + y * w.1.sqrt())
                .collect(),
        };
        let n = 10_000;
        let mut count1 = 0;
        for _ in 0..n {
            if decoder.sample(&mix, &mut rng).unwrap() == 1 {
                count1 += 1;
            }
        }
        let p = count1 as f64 / n as f64;
        let sigma = (w.0 * w.1 / n as f64).sqrt();
        assert!((p - w.0).abs() < 3.0 * sigma, "p={p} vs {} (3sigma {})", w.0, 3.0 * sigma);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let ms = ModeSet::new(&[1.0], 5).unwrap();
        let l = uniform_invariant(&ms).unwrap();
        let decoder = SpectralDecoder::new(&l).unwrap();
        let cfg = ProtocolConfig::new(ms.clone(), ChannelFamily::Identity, 2, 1, 5).unwrap();
        let a = encode(1, &cfg).unwrap();
        let b = encode(2, &cfg).unwrap();
        let mix = FockVector {
            modeset: ms,
            amplitudes: a
                .amplitudes
                .iter()
                .zip(&b.amplitudes)
                .map(|(x, y)| (x + y) * std::f64::consts::FRAC_1_SQRT_2)
                .collect(),
        };
        let run = |seed: u64| -> Vec<i64> {
            let mut rng = sampling_rng(seed);
            (0..40).map(|_| decoder.sample(&mix, &mut rng).unwrap()).collect()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn dense_decoder_refuses_large_dimensions() {
        // (8+1)^4 = 6561 exceeds the dense decomposition limit
        let ms = ModeSet::new(&[1.0, -1.0], 8).unwrap();
        let l = uniform_invariant(&ms).unwrap();
        assert!(matches!(
            SpectralDecoder::new(&l),
            Err(crate::error::Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn transmit_rejects_map_only_channels() {
        use crate::channels::ChannelSpec;
        let ms = ModeSet::new(&[1.0], 6).unwrap();
        let psi = FockVector::vacuum(&ms);
        let ch = ChannelSpec::rindler_descriptor(1.0, (0.0, 10.0, 5));
        assert!(transmit(&psi, &ch, 1e-6).is_err());
    }

    #[test]
    fn undersized_cutoff_aborts_with_excess_invalid() {
        // cutoff equal to the alphabet maximum leaves no headroom: the edge
        // band eats the top eigenstate even through the identity channel
        let ms = ModeSet::new(&[1.0], 3).unwrap();
        let cfg = ProtocolConfig {
            alphabet: vec![3],
            weights: vec![1.0],
            modeset: ms,
            family: ChannelFamily::Identity,
            ensemble: 4,
            leakage_budget: 1e-9,
            seed: 1,
        };
        match run_experiment(&cfg) {
            Err(Error::ExcessInvalidTrials { .. }) => {}
            other => panic!("expected excess-invalid abort, got {other:?}"),
        }
    }

    #[test]
    fn raising_cutoff_never_hurts_worst_residual() {
        // fixed channels (cutoff-independent generators), rising cutoff
        use crate::channels::random_symmetric_channel_with_cap;
        use crate::invariant::uniform_invariant;
        let channels: Vec<_> = (0..4)
            .map(|seed| {
                let ms = ModeSet::new(&[1.0], 10).unwrap();
                random_symmetric_channel_with_cap(seed, 0.3, &ms, 0.2).unwrap()
            })
            .collect();
        let mut worst = Vec::new();
        for cutoff in [10usize, 14, 18] {
            let ms = ModeSet::new(&[1.0], cutoff).unwrap();
            let l = uniform_invariant(&ms).unwrap();
            let mut w = 0.0f64;
            for ch in &channels {
                for lambda in [1i64, 3] {
                    let psi =
                        schwinger_eigenstate(lambda, &ms, &EigenstateProfile::Minimal).unwrap();
                    let tx = transmit(&psi, ch, 1.0).unwrap();
                    let (e, _) = decode_expectation(&tx.state, &l).unwrap();
                    w = w.max((e - lambda as f64).abs());
                }
            }
            worst.push(w);
        }
        assert!(worst[1] <= worst[0] + 1e-9, "{worst:?}");
        assert!(worst[2] <= worst[1] + 1e-9, "{worst:?}");
    }
}
