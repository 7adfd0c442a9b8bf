//! Goodness-of-fit helpers used by the Monte Carlo checks.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::series::LaurentSeries;
use crate::{Error, Result};

const MIN_EXPECTED: f64 = 5.0;

fn chi_square_sf(stat: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Ok(1.0);
    }
    let d = ChiSquared::new(df as f64).map_err(|e| Error::Domain {
        name: "df",
        range: "(0, inf)".into(),
        context: e.to_string(),
    })?;
    Ok(d.sf(stat))
}

/// Pearson goodness-of-fit p-value. `counts[i]` are observed frequencies of
/// cells with probabilities `probs[i]`; any mass missing from `probs` forms a
/// final cell with zero observations. Cells with small expectation are pooled
/// with their neighbours.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<f64> {
    if counts.len() != probs.len() {
        return Err(Error::Dimension {
            expected: probs.len(),
            got: counts.len(),
        });
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::domain("counts", "a nonempty sample", "chi_square_gof"));
    }
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64, p * nf))
        .collect();
    let rest = 1.0 - probs.iter().sum::<f64>();
    if rest * nf > 1e-9 {
        cells.push((0.0, rest * nf));
    }
    let pooled = pool(&cells);
    let stat: f64 = pooled.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    chi_square_sf(stat, pooled.len().saturating_sub(1))
}

fn pool(cells: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for &(o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= MIN_EXPECTED {
            out.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match out.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => out.push(acc),
        }
    }
    out
}

/// Two-sample chi-square homogeneity p-value over pooled integer cells.
pub fn chi_square_two_sample(a: &[i64], b: &[i64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("samples", "nonempty", "chi_square_two_sample"));
    }
    let mut table: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for &x in a {
        table.entry(x).or_default().0 += 1.0;
    }
    for &x in b {
        table.entry(x).or_default().1 += 1.0;
    }
    let mut cells = Vec::new();
    let mut acc = (0.0, 0.0);
    for &(ca, cb) in table.values() {
        acc.0 += ca;
        acc.1 += cb;
        if acc.0 + acc.1 >= 2.0 * MIN_EXPECTED {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cells.push(acc),
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ra, rb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let stat: f64 = cells
        .iter()
        .map(|&(x, y)| (x * ra - y * rb).powi(2) / (x + y))
        .sum();
    chi_square_sf(stat, cells.len().saturating_sub(1))
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

/// Two-sided p-value of a standardized statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    2.0 * Normal::new(0.0, 1.0).expect("standard normal").sf(z.abs())
}

/// Total variation distance between the empirical law of `samples` and `pmf`,
/// with everything outside the pmf window lumped into one cell.
pub fn tv_distance(samples: &[i64], pmf: &LaurentSeries) -> f64 {
    let n = samples.len() as f64;
    let mut counts = vec![0u64; pmf.len()];
    let mut outside = 0u64;
    for &x in samples {
        let i = x - pmf.k_min();
        if i >= 0 && (i as usize) < counts.len() {
            counts[i as usize] += 1;
        } else {
            outside += 1;
        }
    }
    let inside: f64 = counts
        .iter()
        .zip(pmf.coeffs())
        .map(|(&c, &p)| (c as f64 / n - p).abs())
        .sum();
    let rest = (1.0 - pmf.total()).max(0.0);
    0.5 * (inside + (outside as f64 / n - rest).abs())
}

/// Sample mean and the standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gof_perfect_fit() {
        let p = chi_square_gof(&[250, 500, 250], &[0.25, 0.5, 0.25]).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let p = chi_square_gof(&[400, 400, 200], &[0.25, 0.5, 0.25]).unwrap();
        assert!(p < 1e-10);
    }

    #[test]
    fn gof_known_statistic() {
        // stat = (60-50)^2/50 + (40-50)^2/50 = 4, df = 1
        let p = chi_square_gof(&[60, 40], &[0.5, 0.5]).unwrap();
        assert!((p - 0.045_500_263_896_358_4).abs() < 1e-9);
    }

    #[test]
    fn pooling_keeps_totals() {
        let cells = [(1.0, 1.0), (2.0, 3.0), (6.0, 6.0), (0.0, 0.5)];
        let p = pool(&cells);
        let (o, e) = p.iter().fold((0.0, 0.0), |a, c| (a.0 + c.0, a.1 + c.1));
        assert_eq!((o, e), (9.0, 10.5));
        assert!(p.iter().all(|c| c.1 >= MIN_EXPECTED));
    }

    #[test]
    fn two_sample_identical() {
        let a: Vec<i64> = (0..1000).map(|i| i % 7).collect();
        assert!((chi_square_two_sample(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let b: Vec<i64> = (0..1000).map(|i| i % 5).collect();
        assert!(chi_square_two_sample(&a, &b).unwrap() < 1e-6);
    }

    #[test]
    fn normal_helpers() {
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((normal_two_sided_p(1.959_963_984_540_054) - 0.05).abs() < 1e-9);
    }

    #[test]
    fn tv_of_exact_sample() {
        let pmf = LaurentSeries::new(-1, vec![0.25, 0.5, 0.25], 1);
        let s = [-1, 0, 0, 1];
        assert!(tv_distance(&s, &pmf) < 1e-15);
        let s = [5, 5, 5, 5];
        assert!((tv_distance(&s, &pmf) - 1.0).abs() < 1e-15);
    }
}
