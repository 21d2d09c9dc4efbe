//! Compensated (Neumaier) summation with a running magnitude total, so callers
//! can report the condition number of an alternating series.

#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    terms: usize,
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
        self.abs_sum += value.abs();
        self.terms += 1;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of the magnitudes of every term added so far.
    #[inline]
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    #[inline]
    pub fn terms(&self) -> usize {
        self.terms
    }

    /// `Σ|xᵢ| / |Σxᵢ|`; infinite when the terms cancel exactly but are not all zero.
    pub fn condition(&self) -> f64 {
        let v = self.value().abs();
        if self.abs_sum == 0.0 {
            1.0
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            self.abs_sum / v
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = xs.iter().sum();
        let acc: CompensatedSum = xs.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(acc.value(), 2.0);
        assert_eq!(acc.terms(), 4);
    }

    #[test]
    fn condition_of_exact_cancellation_is_infinite() {
        let acc: CompensatedSum = [0.5, -0.5].into_iter().collect();
        assert!(acc.condition().is_infinite());
        let empty = CompensatedSum::new();
        assert_eq!(empty.condition(), 1.0);
    }
}
