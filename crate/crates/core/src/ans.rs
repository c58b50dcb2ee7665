//! LIFO invertible stream coder.
//!
//! A 64-bit-state asymmetric numeral system renormalizing in 32-bit words,
//! state lower bound 2^32. The stream bottom is extended by a fixed-length
//! pad generated deterministically from the shared seed, so pops may consume
//! bits that were never pushed; rate accounting measures the whole stack
//! (words plus the state's bit length), which makes pad bits cancel across
//! encode/decode.
//!
//! Three symbol paths:
//! - probability-one symbols bypass the coder entirely (zero bits),
//! - uniform dyadic tables push/pop raw bits (cost exact, no quantisation),
//! - everything else goes through 2^precision frequency tables.

use num_traits::{One, Zero};

use crate::numerics::{format_rational, Rational};
use crate::randomness::{Label, SharedSeed};
use crate::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 16;
pub const DEFAULT_PAD_BITS: u64 = 4096;

const STATE_LOWER: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
enum TableKind {
    /// One symbol has probability exactly 1; coding it touches zero bits.
    Certain(usize),
    /// Uniform over 2^k symbols: raw k-bit push/pop, exact cost.
    UniformPow2(u32),
    General,
}

/// Quantised coding distribution: frequencies summing to 2^precision,
/// derived deterministically from rational probabilities by
/// largest-remainder rounding (ties to the lowest symbol index), with every
/// positive-probability symbol floored at frequency 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    precision: u32,
    freqs: Vec<u32>,
    cdf: Vec<u32>,
    kind: TableKind,
}

impl FrequencyTable {
    pub fn frequencies(&self) -> &[u32] {
        &self.freqs
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Symbol carrying probability one, if the table is certain.
    pub fn certain_symbol(&self) -> Option<usize> {
        match self.kind {
            TableKind::Certain(s) => Some(s),
            _ => None,
        }
    }
}

/// Builds the coder table for an exact pmf.
pub fn make_table(pmf: &[Rational], precision: u32) -> Result<FrequencyTable> {
    if !(2..=24).contains(&precision) {
        return Err(Error::Coding(format!(
            "table precision {precision} outside 2..=24"
        )));
    }
    crate::numerics::check_pmf(pmf)?;
    let total: u64 = 1 << precision;
    if let Some(s) = pmf.iter().position(|p| p.is_one()) {
        let mut freqs = vec![0u32; pmf.len()];
        freqs[s] = total as u32;
        let cdf = build_cdf(&freqs);
        return Ok(FrequencyTable {
            precision,
            freqs,
            cdf,
            kind: TableKind::Certain(s),
        });
    }

    // largest-remainder rounding of p_i · 2^precision
    let mut freqs = vec![0u32; pmf.len()];
    let mut remainders: Vec<(usize, Rational)> = Vec::with_capacity(pmf.len());
    let mut assigned: u64 = 0;
    for (i, p) in pmf.iter().enumerate() {
        let ideal = p * Rational::from_integer(total.into());
        let floor = ideal.floor();
        let f = floor
            .to_integer()
            .try_into()
            .map_err(|_| Error::Coding("frequency overflow".into()))?;
        freqs[i] = f;
        assigned += f as u64;
        remainders.push((i, ideal - floor));
    }
    // distribute the shortfall to the largest remainders, ties to lowest index
    remainders.sort_by(|(ia, ra), (ib, rb)| rb.cmp(ra).then(ia.cmp(ib)));
    let mut shortfall = total - assigned;
    for (i, _) in &remainders {
        if shortfall == 0 {
            break;
        }
        freqs[*i] += 1;
        shortfall -= 1;
    }
    // floor: every positive-probability symbol keeps at least one slot,
    // stolen from the currently largest frequency
    for i in 0..pmf.len() {
        if pmf[i].is_zero() || freqs[i] > 0 {
            continue;
        }
        let donor = (0..pmf.len())
            .max_by_key(|&j| freqs[j])
            .expect("non-empty pmf");
        if freqs[donor] < 2 {
            return Err(Error::Coding(format!(
                "alphabet too large for precision {precision}"
            )));
        }
        freqs[donor] -= 1;
        freqs[i] += 1;
    }

    let kind = detect_uniform_pow2(&freqs, precision);
    let cdf = build_cdf(&freqs);
    Ok(FrequencyTable {
        precision,
        freqs,
        cdf,
        kind,
    })
}

fn detect_uniform_pow2(freqs: &[u32], precision: u32) -> TableKind {
    let m = freqs.len();
    if m >= 2 && m.is_power_of_two() && freqs.iter().all(|&f| f as u64 == (1u64 << precision) / m as u64)
    {
        TableKind::UniformPow2(m.trailing_zeros())
    } else {
        TableKind::General
    }
}

fn build_cdf(freqs: &[u32]) -> Vec<u32> {
    let mut cdf = Vec::with_capacity(freqs.len() + 1);
    let mut acc = 0u32;
    cdf.push(0);
    for &f in freqs {
        acc = acc.wrapping_add(f);
        cdf.push(acc);
    }
    cdf
}

/// Invertible bit stack. Single-owner mutable value; clone to snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    state: u64,
    words: Vec<u32>,
    pad_words: usize,
    seed: SharedSeed,
    pad_id: u16,
}

impl BitStream {
    /// Fresh stream over the seed's deterministic pad (default 4096 bits).
    pub fn new(seed: &SharedSeed) -> Self {
        Self::with_pad_bits(seed, DEFAULT_PAD_BITS)
    }

    pub fn with_pad_bits(seed: &SharedSeed, pad_bits: u64) -> Self {
        assert!(pad_bits % 32 == 0 && pad_bits > 0, "pad is whole words");
        let pad_words = (pad_bits / 32) as usize;
        let mut src = seed.source(Label::Pad, &[]);
        let state = STATE_LOWER | src.next_u32() as u64;
        let mut words: Vec<u32> = (0..pad_words).map(|_| src.next_u32()).collect();
        words.reverse(); // pop order follows generation order
        BitStream {
            state,
            words,
            pad_words,
            seed: *seed,
            pad_id: seed.pad_id(),
        }
    }

    /// Total stack length in bits: words plus the state's bit length.
    /// Differences of this measure are the exact bit cost of operations.
    pub fn stream_bits(&self) -> i64 {
        32 * self.words.len() as i64 + (64 - self.state.leading_zeros() as i64)
    }

    /// Pad bits currently popped (consumed from below the payload line and
    /// not yet restored).
    pub fn consumed_pad_bits(&self) -> u64 {
        32 * (self.pad_words.saturating_sub(self.words.len())) as u64
    }

    fn pop_word(&mut self) -> Result<u32> {
        self.words.pop().ok_or(Error::RandomnessUnderflow)
    }

    fn renorm_down(&mut self) -> Result<()> {
        while self.state < STATE_LOWER {
            let w = self.pop_word()?;
            self.state = (self.state << 32) | w as u64;
        }
        Ok(())
    }

    /// Pushes `k` raw bits (a uniform dyadic symbol). Cost is exactly `k`.
    pub fn push_raw_bits(&mut self, value: u64, k: u32) -> Result<()> {
        assert!(k >= 1 && k <= 32);
        if value >= 1u64 << k {
            return Err(Error::Coding(format!("value {value} needs more than {k} bits")));
        }
        while self.state >= 1u64 << (64 - k) {
            self.words.push(self.state as u32);
            self.state >>= 32;
        }
        self.state = (self.state << k) | value;
        Ok(())
    }

    /// Pops `k` raw bits; exact inverse of [`Self::push_raw_bits`].
    pub fn pop_raw_bits(&mut self, k: u32) -> Result<u64> {
        assert!(k >= 1 && k <= 32);
        let value = self.state & ((1u64 << k) - 1);
        self.state >>= k;
        self.renorm_down()?;
        Ok(value)
    }

    /// Pushes one symbol under `table`. Pop after push restores the stream
    /// exactly.
    pub fn push_symbol(&mut self, symbol: usize, table: &FrequencyTable) -> Result<()> {
        match table.kind {
            TableKind::Certain(s) => {
                if symbol != s {
                    return Err(Error::Coding(format!(
                        "pushed symbol {symbol} against a table certain of {s}"
                    )));
                }
                Ok(())
            }
            TableKind::UniformPow2(k) => self.push_raw_bits(symbol as u64, k),
            TableKind::General => {
                let f = *table
                    .freqs
                    .get(symbol)
                    .ok_or_else(|| Error::Coding(format!("symbol {symbol} out of range")))?
                    as u64;
                if f == 0 {
                    return Err(Error::Coding(format!("symbol {symbol} has zero frequency")));
                }
                let p = table.precision;
                while self.state >= f << (64 - p) {
                    self.words.push(self.state as u32);
                    self.state >>= 32;
                }
                self.state =
                    (self.state / f) << p | (self.state % f) + table.cdf[symbol] as u64;
                Ok(())
            }
        }
    }

    /// Pops one symbol under `table`; exact inverse of [`Self::push_symbol`].
    /// If the consumed bits are iid uniform, the popped symbol follows the
    /// table's distribution.
    pub fn pop_symbol(&mut self, table: &FrequencyTable) -> Result<usize> {
        match table.kind {
            TableKind::Certain(s) => Ok(s),
            TableKind::UniformPow2(k) => Ok(self.pop_raw_bits(k)? as usize),
            TableKind::General => {
                let p = table.precision;
                let slot = (self.state & ((1u64 << p) - 1)) as u32;
                // largest symbol with cdf[s] ≤ slot; zero-width cells can
                // never contain a slot
                let mut lo = 0usize;
                let mut hi = table.freqs.len();
                while lo + 1 < hi {
                    let mid = (lo + hi) / 2;
                    if table.cdf[mid] <= slot {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let f = table.freqs[lo] as u64;
                debug_assert!(f > 0);
                self.state =
                    f * (self.state >> p) + (slot as u64 - table.cdf[lo] as u64);
                self.renorm_down()?;
                Ok(lo)
            }
        }
    }

    /// Pushes an acceptance decision under Bern(a). Probability-0/1
    /// decisions bypass the coder symbolically.
    pub fn push_bernoulli(&mut self, a: &Rational, bit: bool) -> Result<()> {
        if a.is_zero() || a.is_one() {
            if bit != a.is_one() {
                return Err(Error::Coding(format!(
                    "pushed bit {bit} against certain probability {}",
                    format_rational(a)
                )));
            }
            return Ok(());
        }
        let table = bernoulli_table(a)?;
        self.push_symbol(bit as usize, &table)
    }

    /// Pops an acceptance decision under Bern(a); inverse of
    /// [`Self::push_bernoulli`].
    pub fn pop_bernoulli(&mut self, a: &Rational) -> Result<bool> {
        if a.is_zero() {
            return Ok(false);
        }
        if a.is_one() {
            return Ok(true);
        }
        let table = bernoulli_table(a)?;
        Ok(self.pop_symbol(&table)? == 1)
    }

    /// Serializes as an 8-byte header plus little-endian 32-bit words.
    /// Header: payload bit-length (u32), pad seed id (u16), consumed pad
    /// bits (u16). Bit-exact across platforms.
    pub fn to_bytes(&self) -> Vec<u8> {
        let pad = regenerate_pad(&self.seed, self.pad_words);
        let cp = self
            .words
            .iter()
            .zip(&pad)
            .take_while(|(a, b)| a == b)
            .count();
        let payload = &self.words[cp..];
        let payload_bits = 32 * payload.len() as u32;
        let consumed = 32 * (self.pad_words - cp) as u16;
        let mut out = Vec::with_capacity(8 + 4 * payload.len() + 8);
        out.extend_from_slice(&payload_bits.to_le_bytes());
        out.extend_from_slice(&self.pad_id.to_le_bytes());
        out.extend_from_slice(&consumed.to_le_bytes());
        for w in payload {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.extend_from_slice(&self.state.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8], seed: &SharedSeed) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(Error::MalformedStream("shorter than header + state".into()));
        }
        let payload_bits = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
        let pad_id = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        let consumed = u16::from_le_bytes(bytes[6..8].try_into().unwrap());
        if pad_id != seed.pad_id() {
            return Err(Error::PadMismatch);
        }
        if payload_bits % 32 != 0 || consumed % 32 != 0 {
            return Err(Error::MalformedStream("lengths not whole words".into()));
        }
        let n_payload = (payload_bits / 32) as usize;
        if bytes.len() != 8 + 4 * n_payload + 8 {
            return Err(Error::MalformedStream("length disagrees with header".into()));
        }
        let pad_words = (DEFAULT_PAD_BITS / 32) as usize;
        let cp = pad_words
            .checked_sub((consumed / 32) as usize)
            .ok_or_else(|| Error::MalformedStream("consumed pad exceeds pad".into()))?;
        let mut words = regenerate_pad(seed, pad_words);
        words.truncate(cp);
        for i in 0..n_payload {
            let off = 8 + 4 * i;
            words.push(u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()));
        }
        let state = u64::from_le_bytes(bytes[bytes.len() - 8..].try_into().unwrap());
        if state < STATE_LOWER {
            return Err(Error::MalformedStream("state below lower bound".into()));
        }
        Ok(BitStream {
            state,
            words,
            pad_words,
            seed: *seed,
            pad_id,
        })
    }
}

fn regenerate_pad(seed: &SharedSeed, pad_words: usize) -> Vec<u32> {
    let mut src = seed.source(Label::Pad, &[]);
    let _state_word = src.next_u32();
    let mut words: Vec<u32> = (0..pad_words).map(|_| src.next_u32()).collect();
    words.reverse();
    words
}

fn bernoulli_table(a: &Rational) -> Result<FrequencyTable> {
    let fail = Rational::one() - a;
    make_table(&[fail, a.clone()], DEFAULT_PRECISION)
}

/// Signed bit-flow between two snapshots of the same stream. Additive over
/// chained operations.
pub fn net_bits(before: &BitStream, after: &BitStream) -> Result<i64> {
    if before.pad_id != after.pad_id {
        return Err(Error::PadMismatch);
    }
    Ok(after.stream_bits() - before.stream_bits())
}
