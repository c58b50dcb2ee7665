//! Deterministic shared common randomness.
//!
//! Encoder and decoder derive every random object they share — the proposal
//! sequence {Z_k}, the per-level collections {Υ_n}, the stream pad — from one
//! 256-bit seed. Substreams are keyed by a role label plus an index tuple and
//! are generated in counter mode from SHA-256, so any element of any
//! collection can be materialized lazily and identically on both sides.
//! Encoder-private draws use the `Private` label so trials stay replayable.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::numerics::Rational;
use crate::{Error, Result};

/// Role of a derived substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    /// Proposal samples Z_k ~ P_Y.
    Z,
    /// Per-level collections Υ_n ~ P_{Y|Γ=γ}.
    Upsilon,
    /// Acceptance-test uniforms U_n.
    U,
    /// Stream pad words.
    Pad,
    /// Encoder-private randomness (kept out of the shared roles so trials
    /// are replayable without leaking into common randomness).
    Private,
}

impl Label {
    fn tag(self) -> &'static [u8] {
        match self {
            Label::Z => b"Z",
            Label::Upsilon => b"UPSILON",
            Label::U => b"U",
            Label::Pad => b"PAD",
            Label::Private => b"PRIVATE",
        }
    }
}

/// 256-bit shared seed. All common randomness is a pure function of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedSeed {
    bytes: [u8; 32],
}

impl SharedSeed {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        SharedSeed { bytes }
    }

    /// Parses the 64-hex-char CLI form.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 64 || !s.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Config(format!(
                "seed must be 64 hex chars, got {:?}",
                s
            )));
        }
        let mut bytes = [0u8; 32];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16)
                .map_err(|_| Error::Config("bad hex in seed".into()))?;
        }
        Ok(SharedSeed { bytes })
    }

    /// Convenience seed for tests and defaults.
    pub fn from_u64(x: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"seed64");
        h.update(x.to_le_bytes());
        SharedSeed {
            bytes: h.finalize().into(),
        }
    }

    /// Derives an independent seed for one trial; encoder and decoder of the
    /// same trial fold the same index.
    pub fn child(&self, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(self.bytes);
        h.update(b"TRIAL");
        h.update(index.to_le_bytes());
        SharedSeed {
            bytes: h.finalize().into(),
        }
    }

    /// Opens the substream keyed by `(label, indices...)`.
    pub fn source(&self, label: Label, indices: &[u64]) -> BitSource {
        let mut h = Sha256::new();
        h.update(self.bytes);
        h.update([label.tag().len() as u8]);
        h.update(label.tag());
        for ix in indices {
            h.update(ix.to_le_bytes());
        }
        BitSource::new(h.finalize().into())
    }

    /// Short identifier of this seed's pad construction, stored in stream
    /// headers to catch mismatched pads.
    pub fn pad_id(&self) -> u16 {
        let mut h = Sha256::new();
        h.update(self.bytes);
        h.update(b"PADID");
        let d = h.finalize();
        u16::from_le_bytes([d[0], d[1]])
    }
}

/// Lazily-extensible uniform bit source: SHA-256 in counter mode under a
/// substream key.
pub struct BitSource {
    key: [u8; 32],
    counter: u64,
    buf: [u8; 32],
    bit_pos: usize,
    /// Total bits handed out, for consumption accounting.
    consumed: u64,
}

impl BitSource {
    fn new(key: [u8; 32]) -> Self {
        let mut src = BitSource {
            key,
            counter: 0,
            buf: [0u8; 32],
            bit_pos: 256,
            consumed: 0,
        };
        src.refill();
        src.bit_pos = 0;
        src
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(self.counter.to_le_bytes());
        self.buf = h.finalize().into();
        self.counter += 1;
        self.bit_pos = 0;
    }

    pub fn next_bit(&mut self) -> bool {
        if self.bit_pos == 256 {
            self.refill();
        }
        let byte = self.buf[self.bit_pos / 8];
        let bit = (byte >> (self.bit_pos % 8)) & 1;
        self.bit_pos += 1;
        self.consumed += 1;
        bit == 1
    }

    pub fn next_u32(&mut self) -> u32 {
        let mut w = 0u32;
        for i in 0..32 {
            w |= (self.next_bit() as u32) << i;
        }
        w
    }

    pub fn next_u64(&mut self) -> u64 {
        (self.next_u32() as u64) | ((self.next_u32() as u64) << 32)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        let mut m = 0u64;
        for i in 0..53 {
            m |= (self.next_bit() as u64) << i;
        }
        m as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unit-rate exponential variate.
    pub fn next_exp(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }

    pub fn bits_consumed(&self) -> u64 {
        self.consumed
    }
}

/// Exact Bernoulli draw: returns `1{U < p}` for a lazily-refined uniform U.
/// Probability-zero and probability-one thresholds consume no bits.
pub fn bernoulli(src: &mut BitSource, p: &Rational) -> bool {
    let one = Rational::one();
    if p <= &Rational::zero() {
        return false;
    }
    if p >= &one {
        return true;
    }
    // interval [u, u+1) / 2^t around the uniform's binary expansion
    let mut u = BigUint::zero();
    let mut t = 0u64;
    loop {
        // entirely below p → accept; entirely at/above p → reject
        // (u+1)/2^t ≤ p  ⟺  (u+1)·den ≤ num·2^t
        let num = p.numer().magnitude();
        let den = p.denom().magnitude();
        let hi = (&u + 1u32) * den;
        let lo = &u * den;
        let scaled = num << t;
        if hi <= scaled {
            return true;
        }
        if lo >= scaled {
            return false;
        }
        u = (u << 1) | BigUint::from(src.next_bit() as u32);
        t += 1;
    }
}

/// Exact inverse-CDF sample from a rational pmf. The sampled law is exactly
/// `pmf`; precision extends lazily until the CDF cell is disambiguated.
/// A probability-one cell is returned without consuming any bits.
pub fn sample_index(src: &mut BitSource, pmf: &[Rational]) -> usize {
    debug_assert!(!pmf.is_empty());
    for (i, p) in pmf.iter().enumerate() {
        if p.is_one() {
            return i;
        }
    }
    // cumulative boundaries c_0 = 0 ≤ ... ≤ c_m = 1
    let mut cdf = Vec::with_capacity(pmf.len() + 1);
    let mut acc = Rational::zero();
    cdf.push(acc.clone());
    for p in pmf {
        acc += p;
        cdf.push(acc.clone());
    }
    let mut u = BigUint::zero();
    let mut t = 0u64;
    loop {
        u = (u << 1) | BigUint::from(src.next_bit() as u32);
        t += 1;
        // find the cell containing [u, u+1)/2^t, if any single cell does
        let contains = |c: &Rational, strictly_above: &BigUint| -> bool {
            // c ≤ x/2^t  ⟺  c.num·2^t ≤ x·c.den
            (c.numer().magnitude() << t) <= strictly_above * c.denom().magnitude()
        };
        // lower symbol: largest i with c_i ≤ u/2^t
        let mut lo = 0usize;
        let mut hi = pmf.len();
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if contains(&cdf[mid], &u) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // accept if (u+1)/2^t ≤ c_{lo+1}
        let upper = &cdf[lo + 1];
        if (&u + 1u32) * upper.denom().magnitude() <= (upper.numer().magnitude() << t) {
            return lo;
        }
    }
}
