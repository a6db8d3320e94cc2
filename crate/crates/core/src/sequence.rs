//! Deterministic real sequences and the tail windows used for limit checks.
//!
//! A limit `s_n -> L` cannot be observed on a computer, so every limit check in
//! the crate samples a fixed battery of sequences on log-spaced indices and
//! inspects the deviation on the last decades of the window.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "serde")]
use serde::Serialize;

/// Shape of the decaying part of a sequence, as a function of the index `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "shape"))]
pub enum Decay {
    /// `1/n`
    Harmonic,
    /// `1/n²`
    InverseSquare,
    /// `1/√n`
    InverseSqrt,
    /// `1/(n ln n)`
    HarmonicLog,
    /// `(1.5 + sin n)/n`
    Oscillating,
    /// `2^(-n/64)`
    Geometric,
    /// `r_n/n` with `r_n` uniform in `[0, 2)`.
    RandomHarmonic { seed: u64 },
    /// `r_n/√n` with `r_n` uniform in `[0, 2)`.
    RandomSqrt { seed: u64 },
    /// Identically zero.
    Zero,
    /// Identically one.
    One,
    /// `sin n`
    Sine,
    /// Uniform in `[0, 1)`, independently per index.
    RandomUnit { seed: u64 },
}

fn indexed_unit(seed: u64, n: f64) -> f64 {
    let mix = seed ^ n.to_bits().wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(mix).random::<f64>()
}

impl Decay {
    pub fn at(&self, n: f64) -> f64 {
        match *self {
            Decay::Harmonic => 1.0 / n,
            Decay::InverseSquare => 1.0 / (n * n),
            Decay::InverseSqrt => 1.0 / libm::sqrt(n),
            Decay::HarmonicLog => 1.0 / (n * libm::log(n)),
            Decay::Oscillating => (1.5 + libm::sin(n)) / n,
            Decay::Geometric => libm::exp2(-n / 64.0),
            Decay::RandomHarmonic { seed } => 2.0 * indexed_unit(seed, n) / n,
            Decay::RandomSqrt { seed } => 2.0 * indexed_unit(seed, n) / libm::sqrt(n),
            Decay::Zero => 0.0,
            Decay::One => 1.0,
            Decay::Sine => libm::sin(n),
            Decay::RandomUnit { seed } => indexed_unit(seed, n),
        }
    }

    /// Whether the shape tends to zero.
    pub fn vanishes(&self) -> bool {
        !matches!(self, Decay::One | Decay::Sine | Decay::RandomUnit { .. })
    }
}

/// `s_n = limit + scale · shape(n)`; when the shape does not vanish, `limit`
/// is only an offset.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Sequence {
    pub limit: f64,
    pub scale: f64,
    pub shape: Decay,
}

impl Sequence {
    pub const fn new(limit: f64, scale: f64, shape: Decay) -> Self {
        Sequence {
            limit,
            scale,
            shape,
        }
    }

    pub const fn constant(value: f64) -> Self {
        Sequence::new(value, 0.0, Decay::Zero)
    }

    pub fn at(&self, n: f64) -> f64 {
        if self.scale == 0.0 {
            return self.limit;
        }
        self.limit + self.scale * self.shape.at(n)
    }

    /// The limit, when the sequence converges.
    pub fn converges_to(&self) -> Option<f64> {
        (self.scale == 0.0 || self.shape.vanishes()).then_some(self.limit)
    }
}

/// Log-spaced index window `10^start ..= 10^end`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct TailWindow {
    pub start_exp: u32,
    pub end_exp: u32,
    pub per_decade: u32,
    /// Number of trailing decades that make up the tail.
    pub tail_decades: u32,
}

impl Default for TailWindow {
    fn default() -> Self {
        TailWindow {
            start_exp: 3,
            end_exp: 32,
            per_decade: 20,
            tail_decades: 1,
        }
    }
}

impl TailWindow {
    /// Every sampled index, increasing.
    pub fn indices(&self) -> Vec<f64> {
        let steps = (self.end_exp - self.start_exp) * self.per_decade;
        (0..=steps)
            .map(|k| {
                let e = self.start_exp as f64 + k as f64 / self.per_decade as f64;
                libm::round(libm::pow(10.0, e))
            })
            .collect()
    }

    /// The indices that belong to the tail.
    pub fn tail(&self) -> Vec<f64> {
        let cut = libm::pow(10.0, (self.end_exp - self.tail_decades) as f64);
        self.indices().into_iter().filter(|&n| n >= cut).collect()
    }

    /// `max |s_n - target|` over the tail.
    pub fn tail_deviation(&self, mut f: impl FnMut(f64) -> f64, target: f64) -> (f64, f64) {
        self.tail()
            .into_iter()
            .map(|n| ((f(n) - target).abs(), n))
            .fold((0.0, f64::NAN), |acc, cur| {
                if cur.0 > acc.0 || cur.0.is_nan() || acc.1.is_nan() {
                    cur
                } else {
                    acc
                }
            })
    }
}

/// The eight null sequences `x_n -> 0` of the falsification battery.
pub fn null_battery(seed: u64) -> [Sequence; 8] {
    [
        Sequence::new(0.0, 1.0, Decay::Harmonic),
        Sequence::new(0.0, 1.0, Decay::InverseSquare),
        Sequence::new(0.0, 1.0, Decay::InverseSqrt),
        Sequence::new(0.0, 1.0, Decay::HarmonicLog),
        Sequence::new(0.0, 1.0, Decay::Oscillating),
        Sequence::new(0.0, 1.0, Decay::Geometric),
        Sequence::new(0.0, 1.0, Decay::RandomHarmonic { seed }),
        Sequence::new(
            0.0,
            1.0,
            Decay::RandomSqrt {
                seed: seed.wrapping_add(1),
            },
        ),
    ]
}

/// The eight bounded, otherwise arbitrary sequences of the falsification battery.
/// The first two are the constants 0 and 1.
pub fn bounded_battery(seed: u64) -> [Sequence; 8] {
    [
        Sequence::constant(0.0),
        Sequence::constant(1.0),
        Sequence::constant(10.0),
        Sequence::new(1.0, 0.5, Decay::Sine),
        Sequence::new(1.0, 1.0, Decay::Sine),
        Sequence::new(0.5, 1.0, Decay::Harmonic),
        Sequence::new(
            0.0,
            5.0,
            Decay::RandomUnit {
                seed: seed.wrapping_add(2),
            },
        ),
        Sequence::new(
            3.0,
            2.0,
            Decay::RandomUnit {
                seed: seed.wrapping_add(3),
            },
        ),
    ]
}
