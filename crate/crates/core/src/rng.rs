//! Reproducible random streams and exact samplers for symmetric stable and
//! one-sided stable laws.
//!
//! Every stream is a ChaCha8 keystream keyed by `seed` with the ChaCha stream
//! word set to `stream_id`, so a `(seed, stream_id)` pair always yields the
//! same sequence, regardless of platform or of which other streams exist.

use std::f64::consts::{PI, SQRT_2};

use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Stability index `α ∈ (0, 2]`.
///
/// A unit sample has characteristic function `exp(-|λ|^α)`; for `α = 2` this
/// is a centred Gaussian with variance 2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct StabilityIndex(f64);

impl StabilityIndex {
    pub const BROWNIAN: StabilityIndex = StabilityIndex(2.0);
    pub const CAUCHY: StabilityIndex = StabilityIndex(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 2.0 {
            Ok(StabilityIndex(alpha))
        } else {
            Err(Error::invalid(
                "alpha",
                format!("{alpha} is outside (0, 2]"),
            ))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_brownian(self) -> bool {
        self.0 == 2.0
    }

    /// Multiplier turning a unit-time sample into a sample at time `t`.
    #[inline]
    pub fn time_scale(self, t: f64) -> f64 {
        if self.0 == 2.0 {
            t.sqrt()
        } else if self.0 == 1.0 {
            t
        } else {
            libm::pow(t, 1.0 / self.0)
        }
    }
}

/// A single-owner random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

/// Seed for an auxiliary experiment labelled `tag`, decorrelated from
/// `seed` by the splitmix64 finalizer.
pub fn derived_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for batch (or sample) `batch_index` under `seed`.
pub fn substream(seed: u64, batch_index: u64) -> RandomStream {
    RandomStream::new(seed, batch_index)
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Unit exponential, strictly positive.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        loop {
            let w: f64 = self.rng.sample(Exp1);
            if w > 0.0 {
                return w;
            }
        }
    }

    pub fn symmetric_stable(&mut self, alpha: StabilityIndex) -> f64 {
        SymmetricStable::new(alpha).sample(self)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// One unit symmetric α-stable variate (characteristic function
/// `exp(-|λ|^α)`).
pub fn sample_symmetric_stable(stream: &mut RandomStream, alpha: StabilityIndex) -> f64 {
    stream.symmetric_stable(alpha)
}

/// One positive stable variate with Laplace transform
/// `exp(-scale · λ^index)`, `index ∈ (0, 1)`.
pub fn sample_positive_stable(stream: &mut RandomStream, index: f64, scale: f64) -> Result<f64> {
    Ok(PositiveStable::new(index, scale)?.sample(stream))
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Gaussian,
    Cauchy,
    General {
        alpha: f64,
        inv_alpha: f64,
        tail_power: f64,
    },
}

/// Chambers–Mallows–Stuck sampler for the symmetric law with constants
/// precomputed; this is the inner-loop form used by path simulation.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricStable {
    kind: Kind,
}

impl SymmetricStable {
    pub fn new(alpha: StabilityIndex) -> Self {
        let a = alpha.value();
        let kind = if a == 2.0 {
            Kind::Gaussian
        } else if a == 1.0 {
            Kind::Cauchy
        } else {
            Kind::General {
                alpha: a,
                inv_alpha: 1.0 / a,
                tail_power: (1.0 - a) / a,
            }
        };
        SymmetricStable { kind }
    }

    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match self.kind {
            Kind::Gaussian => SQRT_2 * stream.standard_normal(),
            Kind::Cauchy => libm::tan(PI * (stream.uniform_open() - 0.5)),
            Kind::General {
                alpha,
                inv_alpha,
                tail_power,
            } => {
                let v = PI * (stream.uniform_open() - 0.5);
                let w = stream.exponential();
                // Both power factors go through one exp so the second one
                // tends to 1 smoothly as alpha -> 1.
                let log_mag = tail_power * libm::log(libm::cos((1.0 - alpha) * v) / w)
                    - inv_alpha * libm::log(libm::cos(v));
                libm::sin(alpha * v) * libm::exp(log_mag)
            }
        }
    }
}

/// Kanter's representation of the one-sided stable law,
/// `E[exp(-λX)] = exp(-scale · λ^index)`.
#[derive(Debug, Clone, Copy)]
pub struct PositiveStable {
    index: f64,
    inv_index: f64,
    tail_power: f64,
    multiplier: f64,
}

impl PositiveStable {
    pub fn new(index: f64, scale: f64) -> Result<Self> {
        if !(index > 0.0 && index < 1.0) {
            return Err(Error::invalid(
                "index",
                format!("{index} is outside (0, 1)"),
            ));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("scale", format!("{scale} is not positive")));
        }
        Ok(PositiveStable {
            index,
            inv_index: 1.0 / index,
            tail_power: (1.0 - index) / index,
            multiplier: libm::pow(scale, 1.0 / index),
        })
    }

    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let u = PI * stream.uniform_open();
        let w = stream.exponential();
        let log_mag = self.tail_power * libm::log(libm::sin((1.0 - self.index) * u) / w)
            - self.inv_index * libm::log(libm::sin(u));
        self.multiplier * libm::sin(self.index * u) * libm::exp(log_mag)
    }
}
