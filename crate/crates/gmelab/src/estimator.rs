//! Asymptotic distance estimation from the decay of recorded squared
//! distances.
//!
//! The squared distances approach their limit roughly like a + const/c, so
//! shifting the tail of the history by the right offset makes 1/(l - a)
//! linear in the correction index. The estimator drops the first third of
//! the history, then searches for the offset a maximizing the Pearson
//! correlation between the correction indices and 1/(l - a); D_Est = √a.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct EstimatorResult {
    /// √a*: estimated asymptotic distance.
    pub d_est: f64,
    /// Optimal offset, in squared-distance units; below every trimmed entry.
    pub a_star: f64,
    /// Pearson correlation achieved at the optimum.
    pub r_star: f64,
}

/// Minimum gap kept between the offset and the smallest trimmed entry.
const OFFSET_GUARD: f64 = 1e-12;
const GRID_POINTS: usize = 1000;
const REFINE_TOL: f64 = 1e-10;

/// Estimates the asymptotic distance from (correction index, squared
/// distance) samples. Requires at least 9 entries after dropping the first
/// third; errors on a constant tail (the correlation is undefined there).
pub fn estimate(history: &[(u64, f64)]) -> Result<EstimatorResult> {
    let trim = history.len() / 3;
    let tail = &history[trim..];
    if tail.len() < 9 {
        return Err(Error::HistoryTooShort { len: tail.len() });
    }
    let xs: Vec<f64> = tail.iter().map(|&(c, _)| c as f64).collect();
    let ls: Vec<f64> = tail.iter().map(|&(_, d2)| d2).collect();
    if ls.iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateHistory);
    }
    let min_l = ls.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_l = ls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_l - min_l < 1e-300 {
        return Err(Error::DegenerateHistory);
    }
    let a_max = min_l - OFFSET_GUARD;
    if a_max <= 0.0 {
        // Entries already at the guard floor; the offset can only be zero.
        let r = pearson(&xs, &inverted(&ls, 0.0))?;
        return Ok(EstimatorResult {
            d_est: 0.0,
            a_star: 0.0,
            r_star: r,
        });
    }

    // Coarse grid, then golden-section refinement around the best point.
    let mut best_a = 0.0;
    let mut best_r = f64::NEG_INFINITY;
    for k in 0..=GRID_POINTS {
        let a = a_max * k as f64 / GRID_POINTS as f64;
        let r = pearson(&xs, &inverted(&ls, a))?;
        if r > best_r {
            best_r = r;
            best_a = a;
        }
    }
    let step = a_max / GRID_POINTS as f64;
    let mut lo = (best_a - step).max(0.0);
    let mut hi = (best_a + step).min(a_max);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a1 = hi - phi * (hi - lo);
    let mut a2 = lo + phi * (hi - lo);
    let mut r1 = pearson(&xs, &inverted(&ls, a1))?;
    let mut r2 = pearson(&xs, &inverted(&ls, a2))?;
    while hi - lo > REFINE_TOL {
        if r1 < r2 {
            lo = a1;
            a1 = a2;
            r1 = r2;
            a2 = lo + phi * (hi - lo);
            r2 = pearson(&xs, &inverted(&ls, a2))?;
        } else {
            hi = a2;
            a2 = a1;
            r2 = r1;
            a1 = hi - phi * (hi - lo);
            r1 = pearson(&xs, &inverted(&ls, a1))?;
        }
    }
    // Smallest offset wins ties.
    for (a, r) in [(a1, r1), (a2, r2)] {
        if r > best_r || (r == best_r && a < best_a) {
            best_r = r;
            best_a = a;
        }
    }
    Ok(EstimatorResult {
        d_est: best_a.sqrt(),
        a_star: best_a,
        r_star: best_r,
    })
}

fn inverted(ls: &[f64], a: f64) -> Vec<f64> {
    ls.iter().map(|&l| 1.0 / (l - a)).collect()
}

/// Pearson correlation: (E[xy] - E[x]E[y]) / √(Var x · Var y).
fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mean_xy = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / n;
    let mean_x2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let mean_y2 = ys.iter().map(|y| y * y).sum::<f64>() / n;
    let var_x = mean_x2 - mean_x * mean_x;
    let var_y = mean_y2 - mean_y * mean_y;
    if var_x <= 0.0 || var_y <= 0.0 {
        return Err(Error::DegenerateHistory);
    }
    // Rounding can push a perfect correlation a few ulps past 1.
    Ok(((mean_xy - mean_x * mean_y) / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}
