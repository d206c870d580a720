//! Splittable counter-based pseudorandom streams and the variate
//! transformations used by the samplers.
//!
//! # Stream derivation (the determinism contract)
//!
//! A stream is identified by its *provenance* `(master_seed, stream_index)`.
//! Output word `j` (counting from 1) is a pure function of the provenance:
//!
//! ```text
//! mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB;
//!           z ^= z >> 31                               (wrapping arithmetic)
//!
//! key   = mix64(master_seed ^ mix64(stream_index * GAMMA ^ SALT))
//! out_j = mix64(key ^ mix64(j * GAMMA))
//! ```
//!
//! with `GAMMA = 0x9E3779B97F4A7C15` (the 64-bit golden-ratio increment) and
//! `SALT = 0x6A09E667F3BCC909`. `mix64` is the finalizer of SplitMix64; the
//! double application decorrelates streams whose indices differ in few bits.
//! Because each output word depends only on `(key, j)`, streams are values:
//! they can be created in any order, on any thread, and replicate `r` of a
//! campaign always sees the same sequence regardless of scheduling.
//!
//! # Variate transformations (fixed, documented algorithms)
//!
//! * `next_uniform` maps one output word to the open interval (0, 1) via
//!   `((w >> 11) + 0.5) · 2⁻⁵³`; it can produce neither 0 nor 1.
//! * `next_normal` is the Box–Muller cosine branch and consumes exactly
//!   two words per normal — no caching of the sine partner, so the stream
//!   position after `k` normals is always `2k` words.
//! * `next_gamma` is the Marsaglia–Tsang squeeze method for shape ≥ 1;
//!   shapes below 1 use the boost identity
//!   `Gamma(k) = Gamma(k+1) · U^{1/k}`, with the boost uniform drawn
//!   *after* the accepted Gamma(k+1) variate.
//!
//! The determinism contract covers these algorithms, not any platform or
//! library default.

use crate::error::{Error, Result};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SALT: u64 = 0x6A09_E667_F3BC_C909;

/// Identifier of the documented generator + transformation stack.
pub const ALGORITHM: &str = "splitmix64-counter/box-muller/marsaglia-tsang";

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A counter-based pseudorandom stream with reproducible provenance.
///
/// Two streams with equal provenance produce identical output sequences;
/// streams with distinct provenance are decorrelated by the key-derivation
/// hash. See the module documentation for the exact derivation.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    counter: u64,
    master_seed: u64,
    stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = mix64(master_seed ^ mix64(stream_index.wrapping_mul(GAMMA) ^ SALT));
        Self { key, counter: 0, master_seed, stream_index }
    }

    /// Name of the documented algorithm stack this stream implements.
    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    /// The `(master_seed, stream_index)` pair this stream was created from.
    pub fn provenance(&self) -> (u64, u64) {
        (self.master_seed, self.stream_index)
    }

    /// Number of 64-bit words consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.key ^ mix64(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in the open interval (0, 1); consumes one word.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw (Box–Muller cosine branch); consumes two words.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// One draw from Gamma(`shape`, `scale`) (scale parameterization:
    /// mean = shape·scale). Supports every `shape > 0`, including
    /// fractional shapes below 1 via the boost identity.
    pub fn next_gamma(&mut self, shape: f64, scale: f64) -> Result<f64> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma shape must be positive and finite, got {shape}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma scale must be positive and finite, got {scale}"
            )));
        }
        let raw = if shape < 1.0 {
            let g = self.gamma_shape_ge1(shape + 1.0);
            let u = self.next_uniform();
            g * u.powf(1.0 / shape)
        } else {
            self.gamma_shape_ge1(shape)
        };
        // the boost factor u^{1/shape} can underflow to literal zero for
        // very small shapes; the draw is mathematically strictly positive,
        // so floor it at the smallest positive normal instead
        Ok((raw * scale).max(f64::MIN_POSITIVE))
    }

    /// Marsaglia–Tsang rejection sampler, valid for shape ≥ 1, unit scale.
    fn gamma_shape_ge1(&mut self, shape: f64) -> f64 {
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.next_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v3 = v * v * v;
            let u = self.next_uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v3;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v3 + v3.ln()) {
                return d * v3;
            }
        }
    }
}
