//! Step sizes `λ_i = c / (i + i0)^p`.
//!
//! For `½ < p ≤ 1` the series `Σ λ_i` diverges and `Σ λ_i²` converges, which
//! is exactly what the convergence theory asks of the steps. Other exponents
//! are rejected at construction.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("scale c = {0} must be positive and finite")]
    NonPositiveScale(f64),
    #[error("exponent p = {0} <= 1/2: the sum of squared steps diverges")]
    SquaredStepsDiverge(f64),
    #[error("exponent p = {0} > 1: the sum of steps converges")]
    StepsSummable(f64),
    #[error("exponent p = {0} is not finite")]
    NonFiniteExponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    c: f64,
    p: f64,
    i0: u64,
}

impl Default for StepSchedule {
    /// `λ_i = 1/i`.
    fn default() -> Self {
        Self {
            c: 1.0,
            p: 1.0,
            i0: 0,
        }
    }
}

impl StepSchedule {
    pub fn new(c: f64, p: f64, i0: u64) -> Result<Self, ScheduleError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(ScheduleError::NonPositiveScale(c));
        }
        if !p.is_finite() {
            return Err(ScheduleError::NonFiniteExponent(p));
        }
        if p <= 0.5 {
            return Err(ScheduleError::SquaredStepsDiverge(p));
        }
        if p > 1.0 {
            return Err(ScheduleError::StepsSummable(p));
        }
        Ok(Self { c, p, i0 })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn i0(&self) -> u64 {
        self.i0
    }

    /// `λ_i` for `i >= 1`.
    pub fn lambda(&self, i: u64) -> f64 {
        debug_assert!(i >= 1);
        let base = (i + self.i0) as f64;
        if self.p == 1.0 {
            self.c / base
        } else {
            self.c / base.powf(self.p)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (1..).map(move |i| self.lambda(i))
    }
}
