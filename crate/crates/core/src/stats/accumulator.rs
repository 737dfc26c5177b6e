/// Running count, mean and sum of squared deviations.
///
/// Merging uses the pairwise update, so any bracketing of a fixed sequence
/// agrees up to rounding; [`pairwise`] fixes the bracketing to make results
/// bit-identical regardless of how the samples were produced.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn single(x: f64) -> Self {
        Self {
            count: 1,
            mean: x,
            m2: 0.0,
        }
    }

    pub fn push(&mut self, x: f64) {
        *self = self.merge(&Self::single(x));
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        Self {
            count: self.count + other.count,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.variance() / self.count as f64).sqrt())
    }
}

/// Balanced binary reduction of `values` in index order.
pub fn pairwise(values: &[f64]) -> MomentAccumulator {
    match values.len() {
        0 => MomentAccumulator::default(),
        1 => MomentAccumulator::single(values[0]),
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise(a).merge(&pairwise(b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let acc = pairwise(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(acc.count(), 4);
        assert_eq!(acc.mean(), 2.5);
        assert!((acc.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(pairwise(&[7.0]).standard_error(), None);
        assert_eq!(pairwise(&[7.0]).variance(), 0.0);
        assert_eq!(pairwise(&[]).count(), 0);
        let c = pairwise(&[0.3; 9]);
        assert_eq!((c.mean(), c.variance()), (0.3, 0.0));
    }

    proptest! {
        #[test]
        fn merge_matches_two_pass(xs in prop::collection::vec(-1e3f64..1e3, 2..60), cut in 0usize..60) {
            let cut = cut.min(xs.len());
            let mut seq = MomentAccumulator::default();
            for &x in &xs[..cut] {
                seq.push(x);
            }
            let merged = seq.merge(&pairwise(&xs[cut..]));
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            prop_assert!((merged.mean() - mean).abs() <= 1e-9 * (1.0 + mean.abs()));
            prop_assert!((merged.variance() - var).abs() <= 1e-7 * (1.0 + var));
        }
    }
}
