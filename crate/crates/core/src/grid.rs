use crate::error::{Error, Result};

/// Strictly increasing, strictly positive frequency grid in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid(Vec<f64>);

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("frequency grid is empty"));
        }
        if let Some(bad) = points.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::invalid(format!(
                "frequency grid contains non-positive value {bad}"
            )));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "frequency grid not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self(points))
    }

    /// `points` log-spaced samples on `[f_min, f_max]`, endpoints exact.
    pub fn log_spaced(f_min: f64, f_max: f64, points: usize) -> Result<Self> {
        if !(f_min > 0.0 && f_min < f_max && f_max.is_finite()) {
            return Err(Error::invalid(format!(
                "need 0 < f_min < f_max, got [{f_min}, {f_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::invalid("a grid needs at least 2 points"));
        }
        let (a, b) = (f_min.ln(), f_max.ln());
        let step = (b - a) / (points - 1) as f64;
        let mut v: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
        v[0] = f_min;
        v[points - 1] = f_max;
        Self::new(v)
    }

    /// Same as [`log_spaced`](Self::log_spaced) but evenly spaced.
    pub fn linear(f_min: f64, f_max: f64, points: usize) -> Result<Self> {
        if !(f_min > 0.0 && f_min < f_max && f_max.is_finite()) {
            return Err(Error::invalid(format!(
                "need 0 < f_min < f_max, got [{f_min}, {f_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::invalid("a grid needs at least 2 points"));
        }
        let step = (f_max - f_min) / (points - 1) as f64;
        let mut v: Vec<f64> = (0..points).map(|i| f_min + step * i as f64).collect();
        v[points - 1] = f_max;
        Self::new(v)
    }

    /// Drops every point above `cutoff`. Errors if nothing is left.
    pub fn truncated(&self, cutoff: f64) -> Result<Self> {
        let kept: Vec<f64> = self.0.iter().copied().filter(|&f| f <= cutoff).collect();
        if kept.is_empty() {
            return Err(Error::invalid(format!(
                "no grid point at or below the {cutoff} Hz cutoff"
            )));
        }
        Ok(Self(kept))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}
