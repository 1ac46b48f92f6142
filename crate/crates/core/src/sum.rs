//! Order-fixed summation.
//!
//! Quadrature over large grids is split into tiles that may run on any
//! thread. Each tile is reduced with a pairwise sum and the tile partials are
//! combined pairwise in tile order, so the result does not depend on the
//! thread count.

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (cascade) summation with a fixed split schedule.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Running Neumaier-compensated accumulator, for streams that are too long
/// to buffer.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
