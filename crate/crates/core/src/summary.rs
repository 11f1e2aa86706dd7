//! Summaries of a posterior sample of entropy values.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges, equally spaced over `[min, max]`.
    pub edges: Vec<f64>,
    /// Fraction of values per bin; sums to one.
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropySummary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (n - 1) standard deviation.
    pub std_dev: f64,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn summarize(values: &[f64], level: f64, bins: usize) -> Result<EntropySummary> {
    if values.len() < 2 {
        return Err(Error::InsufficientSamples(values.len()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("credible level must lie in (0, 1), got {level}")));
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bin count must be at least 1".into()));
    }
    let n = values.len() as f64;
    let rough = values.iter().sum::<f64>() / n;
    // Second pass removes the rounding drift of the naive sum.
    let mean = rough + values.iter().map(|v| v - rough).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);

    let width = (max - min) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { max } else { min + width * i as f64 })
        .collect();
    let mut counts = vec![0usize; bins];
    for &v in &sorted {
        let idx = if width > 0.0 {
            (((v - min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let frequencies = counts.iter().map(|&c| c as f64 / n).collect();

    Ok(EntropySummary {
        count: values.len(),
        mean,
        std_dev: var.sqrt(),
        level,
        lower: quantile(&sorted, tail),
        upper: quantile(&sorted, 1.0 - tail),
        min,
        max,
        histogram: Histogram { edges, frequencies },
    })
}

impl EntropySummary {
    /// Key-value document followed by the histogram table.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version = 1");
        let _ = writeln!(out, "samples = {}", self.count);
        let _ = writeln!(out, "mean = {}", self.mean);
        let _ = writeln!(out, "std_dev = {}", self.std_dev);
        let _ = writeln!(out, "credible_level = {}", self.level);
        let _ = writeln!(out, "credible_lower = {}", self.lower);
        let _ = writeln!(out, "credible_upper = {}", self.upper);
        let _ = writeln!(out, "min = {}", self.min);
        let _ = writeln!(out, "max = {}", self.max);
        let _ = writeln!(out, "bins = {}", self.histogram.frequencies.len());
        let _ = writeln!(out, "[histogram]");
        out.push_str(&self.histogram_csv());
        out
    }

    /// `bin_lo,bin_hi,frequency` rows with a header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,frequency\n");
        let h = &self.histogram;
        for (i, f) in h.frequencies.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", h.edges[i], h.edges[i + 1], f);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn constant_values() {
        let s = summarize(&[0.4; 10], 0.95, 50).unwrap();
        assert_eq!((s.mean, s.std_dev, s.lower, s.upper), (0.4, 0.0, 0.4, 0.4));
        assert_eq!(s.histogram.frequencies[0], 1.0);
    }

    #[test]
    fn too_few_values() {
        assert!(matches!(summarize(&[1.0], 0.95, 10), Err(Error::InsufficientSamples(1))));
    }

    #[test]
    fn normal_quantiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = summarize(&v, 0.95, 50).unwrap();
        assert!((s.lower + 1.96).abs() < 0.03, "{}", s.lower);
        assert!((s.upper - 1.96).abs() < 0.03, "{}", s.upper);
        assert!((s.std_dev - 1.0).abs() < 0.01);
        let total: f64 = s.histogram.frequencies.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(s.histogram.edges.len(), 51);
        assert_eq!(s.histogram.edges[50], s.max);
    }

    #[test]
    fn document_has_version_and_table() {
        let s = summarize(&[0.1, 0.2, 0.3], 0.9, 2).unwrap();
        let doc = s.to_document();
        assert!(doc.starts_with("format_version = 1\n"));
        assert!(doc.contains("bin_lo,bin_hi,frequency\n"));
        assert_eq!(s.histogram_csv().lines().count(), 3);
    }
}
