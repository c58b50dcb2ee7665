//! Small statistical helpers for the verification harness: Pearson
//! chi-square goodness of fit and the least-squares redundancy slope.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Pearson chi-square p-value of `observed` counts against `expected`
/// counts. Bins with expected count < 5 are pooled into their left
/// neighbour so the asymptotic null holds.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut acc_o = 0.0f64;
    let mut acc_e = 0.0f64;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o as f64;
        acc_e += e;
        if acc_e >= 5.0 {
            obs.push(acc_o);
            exp.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 {
        if let (Some(o), Some(e)) = (obs.last_mut(), exp.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            return 1.0; // everything pooled into one bin: no test possible
        }
    }
    if obs.len() < 2 {
        return 1.0;
    }
    let stat: f64 = obs
        .iter()
        .zip(&exp)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = (obs.len() - 1) as f64;
    let dist = ChiSquared::new(dof).expect("dof ≥ 1");
    1.0 - dist.cdf(stat)
}

/// Ordinary least-squares slope (and its standard error) of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Domain("need ≥ 3 points for a slope fit".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("degenerate x values in slope fit".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let se = if x.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, se))
}
