//! Exact rational arithmetic and high-precision entropy computation.
//!
//! Probabilities and density ratios are [`Rational`] values and all coding
//! decisions compare them exactly. Real-valued outputs (entropies, bounds)
//! are `f64` bit counts accurate to 1e-9 absolute, computed from big-integer
//! mantissas so that astronomically large numerators and denominators (for
//! example binomial coefficients at n = 4096) never overflow.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::{Error, Result};

/// Exact probability or ratio value. Always stored in lowest terms with a
/// positive denominator (maintained by `num_rational`).
pub type Rational = num_rational::BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses the `"num/den"` wire form used in config and report files.
/// A bare integer is accepted as `n/1`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = n
        .parse()
        .map_err(|_| Error::Config(format!("bad rational numerator in {s:?}")))?;
    let denom: BigInt = d
        .parse()
        .map_err(|_| Error::Config(format!("bad rational denominator in {s:?}")))?;
    if denom.is_zero() {
        return Err(Error::Config(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// Formats a rational in the `"num/den"` wire form (integers as `"n/1"`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Checks that `pmf` sums to exactly one with every entry in [0, 1].
pub fn check_pmf(pmf: &[Rational]) -> Result<()> {
    let mut sum = Rational::zero();
    for p in pmf {
        if p.is_negative() || p > &Rational::one() {
            return Err(Error::NotNormalized(format!(
                "entry {} outside [0, 1]",
                format_rational(p)
            )));
        }
        sum += p;
    }
    if !sum.is_one() {
        return Err(Error::NotNormalized(format!(
            "sum is {}, not 1",
            format_rational(&sum)
        )));
    }
    Ok(())
}

fn log2_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("small biguint fits f64").log2();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().expect("53-bit mantissa fits f64");
    top.log2() + shift as f64
}

/// Base-two logarithm of a positive rational, exact to ~1e-13 relative.
pub fn log2_rational(r: &Rational) -> f64 {
    assert!(r.is_positive(), "log2 of non-positive rational");
    log2_biguint(r.numer().magnitude()) - log2_biguint(r.denom().magnitude())
}

/// `f64` approximation that stays finite for rationals far outside the
/// `f64` exponent range of their numerator or denominator.
pub fn approx_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * log2_rational(&r.abs()).exp2()
}

/// Shannon entropy of an exact pmf in bits, with 0·log 0 = 0.
/// Absolute error ≤ 1e-9.
pub fn entropy_bits(pmf: &[Rational]) -> Result<f64> {
    check_pmf(pmf)?;
    let mut h = 0.0;
    for p in pmf {
        if p.is_zero() {
            continue;
        }
        h -= approx_f64(p) * log2_rational(p);
    }
    Ok(h.max(0.0))
}

/// Exact ordering of `log₂(r)` against `k·Δ` for `Δ = p/q`, evaluated as the
/// big-integer comparison of `r^q` with `2^(k·p)`. No floating point.
pub fn pow2_compare(r: &Rational, k: i64, p: u32, q: u32) -> Result<Ordering> {
    if !r.is_positive() {
        return Err(Error::Domain("pow2_compare requires r > 0".into()));
    }
    if q == 0 || q > 64 || p == 0 {
        return Err(Error::Domain(format!(
            "quantiser denominator q={q} outside 1..=64 or zero p"
        )));
    }
    let e = k
        .checked_mul(p as i64)
        .ok_or_else(|| Error::Domain("exponent overflow in pow2_compare".into()))?;
    let mut lhs = r.numer().magnitude().pow(q);
    let mut rhs = r.denom().magnitude().pow(q);
    if e >= 0 {
        rhs <<= e as u64;
    } else {
        lhs <<= (-e) as u64;
    }
    Ok(lhs.cmp(&rhs))
}

/// Cross entropy `H[Geom(true_mean) ‖ Geom(coding_mean)]` in bits:
/// `log₂ M_c − (M_t − 1)·log₂(1 − 1/M_c)`.
pub fn cross_entropy_geometric(true_mean: &Rational, coding_mean: &Rational) -> Result<f64> {
    if true_mean < &Rational::one() {
        return Err(Error::Domain("true mean of a geometric is ≥ 1".into()));
    }
    if coding_mean <= &Rational::one() {
        return Err(Error::Domain(
            "coding mean ≤ 1: degenerate geometric must be handled by the caller".into(),
        ));
    }
    let fail = (coding_mean - Rational::one()) / coding_mean;
    let mt = approx_f64(true_mean);
    Ok(log2_rational(coding_mean) - (mt - 1.0) * log2_rational(&fail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Pow;
    use proptest::prelude::*;

    #[test]
    fn entropy_degenerate_and_fair() {
        assert_eq!(entropy_bits(&[rat(1, 1)]).unwrap(), 0.0);
        assert!((entropy_bits(&[rat(1, 2), rat(1, 2)]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_quarter_quarter_half() {
        // -2·(1/4)·log2(1/4) - (1/2)·log2(1/2) = 1 + 0.5 = 1.5
        let h = entropy_bits(&[rat(1, 4), rat(1, 4), rat(1, 2)]).unwrap();
        assert!((h - 1.5).abs() < 1e-9);
    }

    #[test]
    fn entropy_rejects_unnormalized() {
        assert!(entropy_bits(&[rat(1, 2), rat(1, 4)]).is_err());
        assert!(entropy_bits(&[rat(3, 2), rat(-1, 2)]).is_err());
    }

    #[test]
    fn entropy_huge_denominators() {
        // Binomial(128, 1/2) masses never fit f64 numerators, but the
        // entropy must still come out right: H ≈ ½ log2(πen/2).
        let n = 128u64;
        let mut pmf = Vec::new();
        let mut c = BigInt::one();
        let denom = BigInt::one() << n;
        for k in 0..=n {
            pmf.push(Rational::new(c.clone(), denom.clone()));
            c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        }
        let h = entropy_bits(&pmf).unwrap();
        let approx = 0.5 * ((std::f64::consts::PI * std::f64::consts::E * n as f64) / 2.0).log2();
        assert!((h - approx).abs() < 0.01, "h={h} approx={approx}");
    }

    #[test]
    fn pow2_compare_examples() {
        assert_eq!(pow2_compare(&rat(2, 1), 1, 1, 1).unwrap(), Ordering::Equal);
        assert_eq!(pow2_compare(&rat(8, 3), 1, 1, 1).unwrap(), Ordering::Greater);
        assert_eq!(pow2_compare(&rat(8, 3), 2, 1, 1).unwrap(), Ordering::Less);
        // negative exponents: log2(1/4) vs -2 → equal
        assert_eq!(pow2_compare(&rat(1, 4), -2, 1, 1).unwrap(), Ordering::Equal);
        assert!(pow2_compare(&rat(0, 1), 0, 1, 1).is_err());
        assert!(pow2_compare(&rat(2, 1), 0, 1, 65).is_err());
    }

    #[test]
    fn cross_entropy_geometric_examples() {
        // (2,2): 1 + 1 = 2
        assert!((cross_entropy_geometric(&rat(2, 1), &rat(2, 1)).unwrap() - 2.0).abs() < 1e-12);
        // (4,4): 2 - 3·log2(3/4) = 8 - 3·log2(3) = H_b(1/4)/(1/4)
        let expected = 8.0 - 3.0 * 3f64.log2();
        assert!((cross_entropy_geometric(&rat(4, 1), &rat(4, 1)).unwrap() - expected).abs() < 1e-12);
        // (1,2): second term vanishes
        assert!((cross_entropy_geometric(&rat(1, 1), &rat(2, 1)).unwrap() - 1.0).abs() < 1e-12);
        assert!(cross_entropy_geometric(&rat(2, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn wire_format_round_trip() {
        let r = parse_rational("-7/12").unwrap();
        assert_eq!(format_rational(&r), "-7/12");
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("1/0").is_err());
    }

    proptest! {
        // H[Geom(M)] = log2(M) + c(M) with c increasing, c(2) = 1 and
        // c(M) ↑ log2(e) as M → ∞; so log2(M) + log2(e) bounds it for every
        // M and log2(M) + 1 bounds it up to M = 2. Checked on random
        // rational M ∈ (1, 2^20].
        #[test]
        fn geometric_entropy_within_log2e_of_log_mean(n in 1u64..(1 << 20), d in 1u64..1024) {
            let m = Rational::new(BigInt::from(n) + BigInt::from(d), BigInt::from(d));
            let h = cross_entropy_geometric(&m, &m).unwrap();
            prop_assert!(h <= log2_rational(&m) + std::f64::consts::LOG2_E + 1e-9);
            if m <= rat(2, 1) {
                prop_assert!(h <= log2_rational(&m) + 1.0 + 1e-9);
            }
        }

        // pow2_compare agrees with high-precision floating evaluation away
        // from ties and resolves exact ties as Equal.
        #[test]
        fn pow2_compare_matches_float(num in 1u64..u64::MAX, den in 1u64..u64::MAX,
                                      k in -40i64..40, p in 1u32..8, q in 1u32..8) {
            let r = Rational::new(BigInt::from(num), BigInt::from(den));
            let target = k as f64 * p as f64 / q as f64;
            let lg = log2_rational(&r);
            let got = pow2_compare(&r, k, p, q).unwrap();
            if (lg - target).abs() > 1e-6 {
                prop_assert_eq!(got, lg.partial_cmp(&target).unwrap());
            }
        }

        #[test]
        fn pow2_compare_exact_ties(k in -30i64..30, p in 1u32..6, q in 1u32..6) {
            // r = 2^(k·p/q) exactly representable only when q | k·p; build
            // r = 2^(k·p) and compare with exponent scaled by q.
            let e = k * p as i64;
            let r = if e >= 0 {
                Rational::from(BigInt::one() << e as u64)
            } else {
                Rational::new(BigInt::one(), BigInt::one() << (-e) as u64)
            };
            // log2(r) = k·p, so comparing against (k·q)·(p/q) is a tie.
            prop_assert_eq!(pow2_compare(&r, k * q as i64, p, q).unwrap(), Ordering::Equal);
        }

        // entropy is permutation-invariant and concave under pairwise mixing.
        #[test]
        fn entropy_permutation_and_mixing(a in 1u64..100, b in 1u64..100, c in 1u64..100) {
            let t = a + b + c;
            let pmf = [
                Rational::new(a.into(), t.into()),
                Rational::new(b.into(), t.into()),
                Rational::new(c.into(), t.into()),
            ];
            let perm = [pmf[2].clone(), pmf[0].clone(), pmf[1].clone()];
            let h = entropy_bits(&pmf).unwrap();
            prop_assert!((h - entropy_bits(&perm).unwrap()).abs() < 1e-12);
            // merging two outcomes cannot increase entropy
            let merged = [&pmf[0] + &pmf[1], pmf[2].clone()];
            prop_assert!(entropy_bits(&merged).unwrap() <= h + 1e-12);
        }

        #[test]
        fn pow2_compare_power_identity(num in 1u64..10_000, den in 1u64..10_000,
                                       k in -20i64..20, p in 1u32..5, q in 1u32..5) {
            // independent big-integer recomputation of r^q vs 2^{kp}
            let r = Rational::new(BigInt::from(num), BigInt::from(den));
            let got = pow2_compare(&r, k, p, q).unwrap();
            let rq: Rational = Pow::pow(r, q as u64);
            let e = k * p as i64;
            let pw = if e >= 0 {
                Rational::from(BigInt::one() << e as u64)
            } else {
                Rational::new(BigInt::one(), BigInt::one() << (-e) as u64)
            };
            prop_assert_eq!(got, rq.cmp(&pw));
        }
    }
}
