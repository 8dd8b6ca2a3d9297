//! Probability laws discretised on a uniform lattice.
//!
//! Mass `pmf[j]` sits at `origin + j·step` and is read back as spread
//! uniformly over the cell of width `step` centred there, so the CDF is
//! piecewise linear. Sums of independent laws are lattice convolutions.
//! Cells carrying negligible mass at either end are dropped; the dropped
//! mass is tracked in `below` / `above` and bounds the truncation error.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeLaw {
    step: f64,
    origin: f64,
    pmf: Vec<f64>,
    cumulative: Vec<f64>,
    below: f64,
    above: f64,
}

/// Window trimming applied after every convolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Trim {
    /// Mass allowed to be discarded from each end per operation.
    pub tolerance: f64,
    /// Cells positioned beyond this are dropped. Exact for CDF queries
    /// below the cap when all summands are nonnegative.
    pub cap: Option<f64>,
}

impl LatticeLaw {
    /// Builds a law from cell masses on `[lo + j·step, lo + (j+1)·step]`.
    pub(crate) fn from_cells(step: f64, lo: f64, pmf: Vec<f64>, below: f64, above: f64) -> Self {
        let mut law = Self {
            step,
            origin: lo + 0.5 * step,
            pmf,
            cumulative: Vec::new(),
            below,
            above,
        };
        law.rebuild_cumulative();
        law
    }

    fn rebuild_cumulative(&mut self) {
        self.cumulative.clear();
        self.cumulative.reserve(self.pmf.len() + 1);
        let mut acc = 0.0;
        self.cumulative.push(0.0);
        for &m in &self.pmf {
            acc += m;
            self.cumulative.push(acc);
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Lower edge of the first cell.
    pub fn lower_edge(&self) -> f64 {
        self.origin - 0.5 * self.step
    }

    /// Upper edge of the last cell.
    pub fn upper_edge(&self) -> f64 {
        self.origin + (self.pmf.len() as f64 - 0.5) * self.step
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    /// Mass discarded below the window.
    pub fn mass_below(&self) -> f64 {
        self.below
    }

    /// Mass discarded above the window.
    pub fn mass_above(&self) -> f64 {
        self.above
    }

    /// Cell edges paired with CDF values at those edges.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let lo = self.lower_edge();
        self.cumulative
            .iter()
            .enumerate()
            .map(move |(j, &c)| (lo + j as f64 * self.step, self.below + c))
    }

    pub fn mean(&self) -> f64 {
        let total: f64 = self.pmf.iter().sum();
        self.pmf
            .iter()
            .enumerate()
            .map(|(j, &m)| m * (self.origin + j as f64 * self.step))
            .sum::<f64>()
            / total
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let u = (x - self.lower_edge()) / self.step;
        if u <= 0.0 {
            return self.below;
        }
        let n = self.pmf.len();
        if u >= n as f64 {
            return (self.below + self.cumulative[n]).min(1.0);
        }
        let j = u.floor() as usize;
        let frac = u - j as f64;
        (self.below + self.cumulative[j] + frac * self.pmf[j]).min(1.0)
    }

    /// Inverse of the piecewise-linear CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let n = self.pmf.len();
        let target = p - self.below;
        let top = self.cumulative[n];
        if !(target > 0.0) || target > top {
            return Err(Error::Bracket {
                p,
                lo: self.below,
                hi: self.below + top,
            });
        }
        // Last j with cumulative[j] < target; cell j holds the crossing.
        let j = self.cumulative.partition_point(|&c| c < target) - 1;
        let j = j.min(n - 1);
        let inside = if self.pmf[j] > 0.0 {
            ((target - self.cumulative[j]) / self.pmf[j]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Ok(self.lower_edge() + (j as f64 + inside) * self.step)
    }

    /// Law of the sum of two independent variables.
    pub(crate) fn convolve(&self, other: &LatticeLaw, trim: Trim) -> LatticeLaw {
        assert!(
            (self.step - other.step).abs() <= 1e-12 * self.step,
            "lattice steps differ"
        );
        let pmf = convolve_slices(&self.pmf, &other.pmf);
        let mut law = LatticeLaw {
            step: self.step,
            origin: self.origin + other.origin,
            pmf,
            cumulative: Vec::new(),
            below: self.below + other.below,
            above: self.above + other.above,
        };
        law.trim(trim);
        law.rebuild_cumulative();
        law
    }

    /// Law of the sum of `k` independent copies.
    pub(crate) fn power(&self, k: usize, trim: Trim) -> LatticeLaw {
        assert!(k >= 1);
        let mut result: Option<LatticeLaw> = None;
        let mut base = self.clone();
        base.trim(trim);
        base.rebuild_cumulative();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.convolve(&base, trim),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.convolve(&base, trim);
        }
        result.expect("k >= 1")
    }

    fn trim(&mut self, trim: Trim) {
        for m in self.pmf.iter_mut() {
            // FFT round-off can leave tiny negative values.
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let mut end = self.pmf.len();
        if let Some(cap) = trim.cap {
            let last = ((cap - self.origin) / self.step).floor();
            if last < 0.0 {
                end = 1.min(end);
            } else if (last as usize) + 1 < end {
                end = last as usize + 1;
            }
        }
        let mut dropped_above: f64 = self.pmf[end..].iter().sum();
        while end > 1 && dropped_above + self.pmf[end - 1] < trim.tolerance {
            dropped_above += self.pmf[end - 1];
            end -= 1;
        }
        let mut start = 0;
        let mut dropped_below = 0.0;
        while start + 1 < end && dropped_below + self.pmf[start] < trim.tolerance {
            dropped_below += self.pmf[start];
            start += 1;
        }
        self.pmf.truncate(end);
        if start > 0 {
            self.pmf.drain(..start);
            self.origin += start as f64 * self.step;
        }
        self.below += dropped_below;
        self.above += dropped_above;
    }
}

const DIRECT_LIMIT: usize = 1 << 15;

pub(crate) fn convolve_slices(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 || a.len() * b.len() <= DIRECT_LIMIT {
        let mut out = vec![0.0; out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(b) {
                *o += x * y;
            }
        }
        return out;
    }
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward: Arc<dyn Fft<f64>> = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    // Pack both real inputs into one complex transform.
    let mut buf: Vec<Complex<f64>> = (0..size)
        .map(|i| Complex::new(a.get(i).copied().unwrap_or(0.0), b.get(i).copied().unwrap_or(0.0)))
        .collect();
    forward.process(&mut buf);
    let mut prod = vec![Complex::new(0.0, 0.0); size];
    for k in 0..size {
        let z = buf[k];
        let zc = buf[(size - k) % size].conj();
        let fa = (z + zc) * 0.5;
        let fb = (z - zc) * Complex::new(0.0, -0.5);
        prod[k] = fa * fb;
    }
    inverse.process(&mut prod);
    let scale = 1.0 / size as f64;
    prod[..out_len].iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for i in 0..a.len() {
            for j in 0..b.len() {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    }

    #[test]
    fn fft_path_matches_direct_sum() {
        let a: Vec<f64> = (0..700).map(|i| ((i as f64) * 0.37).sin().abs()).collect();
        let b: Vec<f64> = (0..900).map(|i| ((i as f64) * 0.11).cos().powi(2)).collect();
        let fast = convolve_slices(&a, &b);
        let slow = naive(&a, &b);
        assert_eq!(fast.len(), slow.len());
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn cdf_and_quantile_invert_each_other() {
        let law = LatticeLaw::from_cells(0.5, 1.0, vec![0.1, 0.2, 0.3, 0.4], 0.0, 0.0);
        assert_eq!(law.cdf(1.0), 0.0);
        assert!((law.cdf(1.5) - 0.1).abs() < 1e-15);
        assert!((law.cdf(1.75) - 0.2).abs() < 1e-15);
        assert!((law.cdf(3.0) - 1.0).abs() < 1e-15);
        for p in [0.05, 0.1, 0.33, 0.6, 0.99] {
            let x = law.quantile(p).unwrap();
            assert!((law.cdf(x) - p).abs() < 1e-14);
        }
        assert!(law.quantile(0.0).is_err());
        assert!(law.quantile(1.5).is_err());
    }

    #[test]
    fn power_agrees_with_repeated_convolution() {
        let law = LatticeLaw::from_cells(0.25, 0.0, vec![0.5, 0.3, 0.2], 0.0, 0.0);
        let trim = Trim { tolerance: 0.0, cap: None };
        let mut iter = law.clone();
        for _ in 1..5 {
            iter = iter.convolve(&law, trim);
        }
        let pow = law.power(5, trim);
        assert_eq!(iter.len(), pow.len());
        for x in [0.1, 0.7, 1.3, 2.0, 3.1] {
            assert!((iter.cdf(x) - pow.cdf(x)).abs() < 1e-14);
        }
        // Mean of a sum of five copies.
        assert!((pow.mean() - 5.0 * law.mean()).abs() < 1e-12);
    }

    #[test]
    fn cap_truncation_is_exact_below_cap() {
        let cells: Vec<f64> = (0..40).map(|i| (-(i as f64) / 8.0).exp()).collect();
        let total: f64 = cells.iter().sum();
        let cells: Vec<f64> = cells.iter().map(|c| c / total).collect();
        let law = LatticeLaw::from_cells(0.1, 0.0, cells, 0.0, 0.0);
        let full = law.power(3, Trim { tolerance: 0.0, cap: None });
        let capped = law.power(3, Trim { tolerance: 0.0, cap: Some(2.0) });
        assert!(capped.len() < full.len());
        for x in [0.2, 0.9, 1.5, 1.95] {
            assert!((full.cdf(x) - capped.cdf(x)).abs() < 1e-14);
        }
    }
}
