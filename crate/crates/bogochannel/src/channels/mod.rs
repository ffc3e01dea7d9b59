//! Concrete Bogolyubov channels.
//!
//! Generator-based channels carry an exact coefficient-space generator and
//! are suitable for full state evolution; the accelerated-observer channel
//! ([`rindler`]) mixes all frequencies and is handled at the level of kernel
//! integrals and expectation values instead.

pub mod expanding;
pub mod rindler;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::coeff::{bogoliubov_of, BogolyubovMap, CoefficientMatrix};
use crate::error::{Error, Result};
use crate::fock::ModeSet;
use crate::generators::{assemble_hamiltonian, GeneratorTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    GenericSymmetric,
    GenericAsymmetric,
    ExpandingUniverse,
    Rindler,
}

/// Parameter record shared with the CLI schema.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelParams {
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub mass: Option<f64>,
    pub k: Option<f64>,
    pub acceleration: Option<f64>,
    pub k_window: Option<(f64, f64, usize)>,
    pub seed: Option<u64>,
    pub strength: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub label: String,
    pub generator: Option<CoefficientMatrix>,
    pub bogomap: Option<BogolyubovMap>,
    pub params: ChannelParams,
}

impl ChannelSpec {
    pub fn identity(labels: &[f64]) -> Self {
        let n = 2 * labels.len();
        ChannelSpec {
            kind: ChannelKind::GenericSymmetric,
            label: "identity".into(),
            generator: Some(CoefficientMatrix::zero(labels)),
            bogomap: Some(BogolyubovMap::identity(n)),
            params: ChannelParams::default(),
        }
    }

    /// Descriptor for the accelerated-observer channel. It mixes all
    /// frequencies, so it carries no finite generator or map; state evolution
    /// is not available through it, only the kernel-level machinery of
    /// [`rindler`].
    pub fn rindler_descriptor(acceleration: f64, k_window: (f64, f64, usize)) -> Self {
        ChannelSpec {
            kind: ChannelKind::Rindler,
            label: format!("rindler-a{acceleration}"),
            generator: None,
            bogomap: None,
            params: ChannelParams {
                acceleration: Some(acceleration),
                k_window: Some(k_window),
                ..Default::default()
            },
        }
    }

    /// Field-interchange symmetry of the generator; `None` for map-based channels.
    pub fn is_symmetric(&self) -> Option<bool> {
        self.generator.as_ref().map(|g| g.is_field_symmetric())
    }
}

/// Largest admissible squeezing singular value of the beta block, chosen so a
/// state with occupations up to `max_occupation` keeps its truncation leakage
/// under `budget` at the given cutoff.
///
/// Squeezing walks occupation in steps of two with amplitude `tanh r` per
/// step, so the mass past the cutoff scales as `tanh(r)^(cutoff - n)` with a
/// measured prefactor near 1e2; the extra factor of ten here is headroom.
pub fn squeeze_cap(cutoff: usize, max_occupation: usize, budget: f64) -> f64 {
    let levels = cutoff.saturating_sub(max_occupation).max(1) as f64;
    let t = (budget / 1e3).powf(1.0 / levels).min(0.99);
    // sinh(artanh(t))
    t / (1.0 - t * t).sqrt()
}

fn splitmix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn random_channel(
    seed: u64,
    strength: f64,
    modeset: &ModeSet,
    symmetric: bool,
    cap: f64,
) -> Result<ChannelSpec> {
    if strength < 0.0 || !strength.is_finite() {
        return Err(Error::InvalidParameter("strength must be a nonnegative real".into()));
    }
    let m = modeset.n_modes();
    for attempt in 0u64..8192 {
        let mut rng = ChaCha12Rng::seed_from_u64(splitmix(seed, attempt));
        let d = GeneratorTable::random(&mut rng, m, strength);
        let d_tilde = if symmetric {
            d.clone()
        } else {
            GeneratorTable::random(&mut rng, m, strength)
        };
        let generator = assemble_hamiltonian(&d, &d_tilde, modeset.labels())?;
        let map = bogoliubov_of(&generator)?;
        if map.max_squeeze() <= cap {
            let kind = if symmetric {
                ChannelKind::GenericSymmetric
            } else {
                ChannelKind::GenericAsymmetric
            };
            let tag = if symmetric { "sym" } else { "asym" };
            return Ok(ChannelSpec {
                kind,
                label: format!("{tag}-{seed}"),
                generator: Some(generator),
                bogomap: Some(map),
                params: ChannelParams {
                    seed: Some(seed),
                    strength: Some(strength),
                    ..Default::default()
                },
            });
        }
    }
    Err(Error::InvalidParameter(format!(
        "no channel under squeeze cap {cap:.3} after 8192 draws (seed {seed})"
    )))
}

/// Random field-symmetric channel: one coefficient table drawn uniformly in
/// `[-strength, strength]`, applied to both fields. Deterministic per seed.
/// Draws whose induced squeezing would overrun the truncation budget are
/// rejected and redrawn (still deterministically).
pub fn random_symmetric_channel(seed: u64, strength: f64, modeset: &ModeSet) -> Result<ChannelSpec> {
    let cap = squeeze_cap(modeset.cutoff(), modeset.cutoff() / 2, 1e-6);
    random_channel(seed, strength, modeset, true, cap)
}

pub fn random_symmetric_channel_with_cap(
    seed: u64,
    strength: f64,
    modeset: &ModeSet,
    cap: f64,
) -> Result<ChannelSpec> {
    random_channel(seed, strength, modeset, true, cap)
}

/// Negative control: the two fields get independent coefficient tables.
pub fn random_asymmetric_channel(seed: u64, strength: f64, modeset: &ModeSet) -> Result<ChannelSpec> {
    let cap = squeeze_cap(modeset.cutoff(), modeset.cutoff() / 2, 1e-6);
    random_channel(seed, strength, modeset, false, cap)
}

pub fn random_asymmetric_channel_with_cap(
    seed: u64,
    strength: f64,
    modeset: &ModeSet,
    cap: f64,
) -> Result<ChannelSpec> {
    random_channel(seed, strength, modeset, false, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::{commutation_residual, uniform_invariant};
    use num_complex::Complex64;

    #[test]
    fn zero_strength_gives_identity_channel() {
        let ms = ModeSet::new(&[1.0, -1.0], 20).unwrap();
        let ch = random_symmetric_channel(7, 0.0, &ms).unwrap();
        assert_eq!(ch.generator.as_ref().unwrap().norm(), 0.0);
        assert_eq!(ch.is_symmetric(), Some(true));
        let map = ch.bogomap.unwrap();
        assert!(map.beta.norm() < 1e-15);
    }

    #[test]
    fn symmetric_flag_by_construction() {
        // generous cap: this exercises the symmetry flag, not truncation
        let ms = ModeSet::new(&[1.0, -1.0], 20).unwrap();
        for seed in 0..10 {
            let ch = random_symmetric_channel_with_cap(seed, 0.3, &ms, 5.0).unwrap();
            assert_eq!(ch.is_symmetric(), Some(true));
            let l = uniform_invariant(&ms).unwrap();
            let r = commutation_residual(&l, ch.generator.as_ref().unwrap()).unwrap();
            assert!(r <= 1e-12);
        }
    }

    #[test]
    fn asymmetric_channels_generically_break_symmetry() {
        let ms = ModeSet::new(&[1.0, -1.0], 20).unwrap();
        let l = uniform_invariant(&ms).unwrap();
        let mut positive = 0;
        for seed in 0..10 {
            let ch = random_asymmetric_channel_with_cap(seed, 0.3, &ms, 5.0).unwrap();
            assert_eq!(ch.is_symmetric(), Some(false));
            if commutation_residual(&l, ch.generator.as_ref().unwrap()).unwrap() > 1e-6 {
                positive += 1;
            }
        }
        assert_eq!(positive, 10);
    }

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        let minus = Complex64::new(-1.0, 0.0);
        let ms = ModeSet::new(&[1.0], 20).unwrap();
        let a = random_symmetric_channel(5, 0.3, &ms).unwrap();
        let b = random_symmetric_channel(5, 0.3, &ms).unwrap();
        let d = a
            .generator
            .as_ref()
            .unwrap()
            .add(&b.generator.as_ref().unwrap().scale(minus))
            .unwrap();
        assert_eq!(d.norm(), 0.0);
        let c = random_symmetric_channel(6, 0.3, &ms).unwrap();
        let d2 = a
            .generator
            .as_ref()
            .unwrap()
            .add(&c.generator.as_ref().unwrap().scale(minus))
            .unwrap();
        assert!(d2.norm() > 0.0);
    }

    #[test]
    fn guard_respects_cap() {
        let ms = ModeSet::new(&[1.0, -1.0], 10).unwrap();
        let cap = 0.3;
        for seed in 0..30 {
            let ch = random_symmetric_channel_with_cap(seed, 0.3, &ms, cap).unwrap();
            assert!(ch.bogomap.unwrap().max_squeeze() <= cap);
        }
    }

    #[test]
    fn zero_strength_asymmetric_is_degenerately_symmetric() {
        let ms = ModeSet::new(&[1.0], 20).unwrap();
        let ch = random_asymmetric_channel(3, 0.0, &ms).unwrap();
        assert_eq!(ch.kind, ChannelKind::GenericAsymmetric);
        assert_eq!(ch.is_symmetric(), Some(true));
        assert_eq!(ch.generator.as_ref().unwrap().norm(), 0.0);
    }

    #[test]
    fn rindler_descriptor_has_no_generator() {
        let ch = ChannelSpec::rindler_descriptor(1.5, (0.0, 40.0, 17));
        assert_eq!(ch.kind, ChannelKind::Rindler);
        assert!(ch.generator.is_none());
        assert_eq!(ch.is_symmetric(), None);
        assert_eq!(ch.params.acceleration, Some(1.5));
    }
}
