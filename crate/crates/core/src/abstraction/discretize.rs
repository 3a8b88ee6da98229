//! Cutoff learning: equal-width, SAX and class-supervised (TD4C with
//! symmetric Kullback-Leibler divergence).

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Additive smoothing applied to per-class state frequencies.
pub const TD4C_SMOOTHING: f64 = 1e-9;
pub const DEFAULT_PERCENTILE_STEP: u32 = 5;

/// Bin index of `value`: the number of cutoffs at or below it. Bins are
/// left-closed, so a value equal to a cutoff falls in the upper bin.
pub fn apply_cutoffs(value: f64, cutoffs: &[f64]) -> usize {
    cutoffs.partition_point(|&c| c <= value)
}

pub fn ewd_cutoffs(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    check_bins(bins)?;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if values.is_empty() || min == max {
        return Err(Error::Discretization(
            "equal-width binning needs at least two distinct values".into(),
        ));
    }
    let width = (max - min) / bins as f64;
    Ok((1..bins).map(|i| min + i as f64 * width).collect())
}

/// Equiprobable breakpoints of the standard normal distribution.
pub fn sax_breakpoints(bins: usize) -> Result<Vec<f64>> {
    check_bins(bins)?;
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    Ok((1..bins)
        .map(|i| n.inverse_cdf(i as f64 / bins as f64))
        .collect())
}

/// Z-normalizes with the population standard deviation. `None` for series
/// shorter than two points or with zero variance.
pub fn z_normalize(series: &[f64]) -> Option<Vec<f64>> {
    if series.len() < 2 {
        return None;
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return None;
    }
    Some(series.iter().map(|v| (v - mean) / sd).collect())
}

/// Averages non-overlapping windows of `window` points; a shorter trailing
/// window is averaged as is. Timestamps become window midpoints.
pub fn paa(series: &[(i64, f64)], window: usize) -> Vec<(i64, f64)> {
    let window = window.max(1);
    series
        .chunks(window)
        .map(|c| {
            let mean = c.iter().map(|p| p.1).sum::<f64>() / c.len() as f64;
            let mid = (c[0].0 + c[c.len() - 1].0).div_euclid(2);
            (mid, mean)
        })
        .collect()
}

/// SAX symbols (bin indices) for one time-ordered series. Degenerate
/// series map entirely to the middle bin.
pub fn sax_symbols(
    series: &[(i64, f64)],
    bins: usize,
    paa_window: usize,
) -> Result<Vec<(i64, usize)>> {
    let breaks = sax_breakpoints(bins)?;
    let values: Vec<f64> = series.iter().map(|p| p.1).collect();
    let Some(z) = z_normalize(&values) else {
        return Ok(series.iter().map(|p| (p.0, bins / 2)).collect());
    };
    let normalized: Vec<(i64, f64)> = series.iter().zip(z).map(|(p, v)| (p.0, v)).collect();
    Ok(paa(&normalized, paa_window)
        .into_iter()
        .map(|(t, v)| (t, apply_cutoffs(v, &breaks)))
        .collect())
}

/// Percentiles at `step, 2·step, … < 100` with linear interpolation between
/// order statistics, deduplicated.
pub fn percentile_candidates(values: &[f64], step: u32) -> Vec<f64> {
    if values.is_empty() || step == 0 || step >= 100 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut out: Vec<f64> = (1..)
        .map(|i| i * step)
        .take_while(|&p| p < 100)
        .map(|p| {
            let pos = p as f64 / 100.0 * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        })
        .collect();
    out.dedup();
    out
}

/// Sum over class pairs of the symmetric KL divergence between their
/// smoothed state distributions under `cutoffs`.
pub fn td4c_score(samples: &[(f64, usize)], classes: usize, cutoffs: &[f64]) -> f64 {
    let m = cutoffs.len() + 1;
    let mut counts = vec![vec![0usize; m]; classes];
    for &(v, c) in samples {
        counts[c][apply_cutoffs(v, cutoffs)] += 1;
    }
    let dists: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| {
            let n: usize = row.iter().sum();
            row.iter()
                .map(|&f| {
                    let freq = if n == 0 { 0.0 } else { f as f64 / n as f64 };
                    (freq + TD4C_SMOOTHING) / (1.0 + m as f64 * TD4C_SMOOTHING)
                })
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for a in 0..classes {
        for b in a + 1..classes {
            total += dists[a]
                .iter()
                .zip(&dists[b])
                .map(|(p, q)| (p - q) * (p / q).ln())
                .sum::<f64>();
        }
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct Td4cResult {
    /// Sorted cutoffs.
    pub cutoffs: Vec<f64>,
    /// Cutoffs in the order the greedy search picked them.
    pub picks: Vec<f64>,
}

/// Greedy TD4C over explicit candidates. `samples` pair each value with a
/// dense class index.
pub fn td4c_with_candidates(
    samples: &[(f64, usize)],
    classes: usize,
    candidates: &[f64],
    bins: usize,
) -> Result<Td4cResult> {
    check_bins(bins)?;
    if classes < 2 {
        return Err(Error::Discretization(
            "supervised discretization needs at least two classes".into(),
        ));
    }
    let mut pool: Vec<f64> = candidates.to_vec();
    pool.sort_by(f64::total_cmp);
    pool.dedup();
    if pool.len() < bins - 1 {
        return Err(Error::Discretization(format!(
            "{} distinct candidate cutoffs, {} needed",
            pool.len(),
            bins - 1
        )));
    }
    let mut chosen: Vec<f64> = Vec::with_capacity(bins - 1);
    let mut picks = Vec::with_capacity(bins - 1);
    for _ in 1..bins {
        let mut best: Option<(f64, usize)> = None;
        for (i, &c) in pool.iter().enumerate() {
            let mut trial = chosen.clone();
            let at = trial.partition_point(|&x| x < c);
            trial.insert(at, c);
            let s = td4c_score(samples, classes, &trial);
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, i));
            }
        }
        let (_, i) = best.expect("pool is non-empty");
        let c = pool.remove(i);
        let at = chosen.partition_point(|&x| x < c);
        chosen.insert(at, c);
        picks.push(c);
    }
    Ok(Td4cResult {
        cutoffs: chosen,
        picks,
    })
}

/// Greedy TD4C over percentile candidates of the pooled values. Labels are
/// arbitrary strings; classes are indexed in sorted label order.
pub fn td4c_kl_cutoffs(labeled: &[(f64, &str)], bins: usize, step: u32) -> Result<Td4cResult> {
    let mut names: Vec<&str> = labeled.iter().map(|p| p.1).collect();
    names.sort_unstable();
    names.dedup();
    let samples: Vec<(f64, usize)> = labeled
        .iter()
        .map(|&(v, l)| (v, names.binary_search(&l).expect("collected above")))
        .collect();
    let values: Vec<f64> = labeled.iter().map(|p| p.0).collect();
    td4c_with_candidates(
        &samples,
        names.len(),
        &percentile_candidates(&values, step),
        bins,
    )
}

fn check_bins(bins: usize) -> Result<()> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "bins must be at least 2, got {bins}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ewd_examples() {
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(ewd_cutoffs(&v, 3).unwrap(), vec![3.0, 6.0]);
        assert_eq!(ewd_cutoffs(&[0.0, 10.0], 2).unwrap(), vec![5.0]);
        let v: Vec<f64> = (-3..=3).map(f64::from).collect();
        assert_eq!(ewd_cutoffs(&v, 3).unwrap(), vec![-1.0, 1.0]);
        assert!(ewd_cutoffs(&[2.0, 2.0], 3).is_err());
        assert!(ewd_cutoffs(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn cutoff_boundaries_go_right() {
        let c = [3.0, 6.0];
        assert_eq!(apply_cutoffs(3.0, &c), 1);
        assert_eq!(apply_cutoffs(2.99, &c), 0);
        assert_eq!(apply_cutoffs(6.0, &c), 2);
        assert_eq!(apply_cutoffs(-10.0, &c), 0);
    }

    #[test]
    fn sax_examples() {
        let b = sax_breakpoints(3).unwrap();
        assert!((b[0] + 0.4307).abs() < 1e-3 && (b[1] - 0.4307).abs() < 1e-3);
        let flat = sax_symbols(&[(0, 10.0), (1, 10.0), (2, 10.0)], 3, 1).unwrap();
        assert!(flat.iter().all(|s| s.1 == 1));
        let s = sax_symbols(&[(0, 0.0), (1, 0.0), (2, 100.0)], 3, 1).unwrap();
        assert_eq!(s.iter().map(|p| p.1).collect::<Vec<_>>(), vec![0, 0, 2]);
    }

    #[test]
    fn paa_midpoints() {
        let s = [(0, 1.0), (2, 3.0), (4, 5.0), (7, 7.0), (9, 9.0)];
        assert_eq!(paa(&s, 2), vec![(1, 2.0), (5, 6.0), (9, 9.0)]);
    }

    #[test]
    fn td4c_examples() {
        let s = [(1.0, 0), (1.0, 0), (4.0, 0), (6.0, 1), (9.0, 1), (9.0, 1)];
        let r = td4c_with_candidates(&s, 2, &[2.0, 5.0, 8.0], 2).unwrap();
        assert_eq!(r.cutoffs, vec![5.0]);
        let one = [(1.0, "a"), (2.0, "a")];
        assert!(td4c_kl_cutoffs(&one, 2, 5).is_err());
        // identical class distributions: every candidate scores the same
        let same = [(1.0, 0), (2.0, 0), (3.0, 0), (1.0, 1), (2.0, 1), (3.0, 1)];
        let r = td4c_with_candidates(&same, 2, &[2.5, 1.5], 2).unwrap();
        assert_eq!(r.cutoffs, vec![1.5]);
        assert!(td4c_with_candidates(&s, 2, &[2.0], 3).is_err());
    }

    #[test]
    fn percentiles_interpolate() {
        let v: Vec<f64> = (0..=10).map(f64::from).collect();
        let c = percentile_candidates(&v, 25);
        assert_eq!(c, vec![2.5, 5.0, 7.5]);
    }

    proptest! {
        #[test]
        fn ewd_widths_equal(values in prop::collection::vec(-1e6f64..1e6, 2..40), bins in 2usize..8) {
            prop_assume!(values.iter().any(|v| *v != values[0]));
            let c = ewd_cutoffs(&values, bins).unwrap();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut edges = vec![lo];
            edges.extend(&c);
            edges.push(hi);
            let w = (hi - lo) / bins as f64;
            for pair in edges.windows(2) {
                prop_assert!(((pair[1] - pair[0]) - w).abs() <= 1e-9 * w.abs().max(1e-300));
            }
        }

        #[test]
        fn z_normalized_moments(values in prop::collection::vec(-1e3f64..1e3, 2..50)) {
            if let Some(z) = z_normalize(&values) {
                let n = z.len() as f64;
                let mean = z.iter().sum::<f64>() / n;
                let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((sd - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn bins_are_monotone(cutoffs in prop::collection::btree_set(-100i32..100, 1..6), a in -200.0f64..200.0, b in -200.0f64..200.0) {
            let c: Vec<f64> = cutoffs.into_iter().map(f64::from).collect();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(apply_cutoffs(lo, &c) <= apply_cutoffs(hi, &c));
            prop_assert!(apply_cutoffs(hi, &c) <= c.len());
        }
    }
}
