use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform time grid `t0, t0 + dt, …, t0 + (len − 1) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::EmptyGrid);
        }
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need finite t0 and dt > 0, got t0 = {t0}, dt = {dt}"
            )));
        }
        Ok(Self { t0, dt, len })
    }

    /// Grid from 0 covering at least `t_max` with step `dt`.
    pub fn span(t_max: f64, dt: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
        Self::new(0.0, dt, steps + 1)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.len - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.time(i))
    }

    /// Same spacing and length, shifted start.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            t0: self.t0 + offset,
            ..*self
        }
    }

    /// Index range of grid points inside `[lo, hi]`.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = ((lo - self.t0) / self.dt - 1e-9).ceil().max(0.0) as usize;
        let end = (((hi - self.t0) / self.dt + 1e-9).floor() as i64 + 1).clamp(0, self.len as i64)
            as usize;
        start.min(end)..end
    }
}
