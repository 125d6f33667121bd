//! Deterministic point sets for field-level checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::PhasePoint;

/// Axis-aligned box in phase space, bounds ordered `(x1..xn, p1..pn)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<SampleBox> {
        if lo.len() != hi.len() || lo.is_empty() || !lo.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "sample box bounds need equal, even, non-zero lengths (got {} and {})",
                lo.len(),
                hi.len()
            )));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b))
        {
            return Err(Error::InvalidArgument(
                "sample box needs finite lo <= hi".into(),
            ));
        }
        Ok(SampleBox { lo, hi })
    }

    /// Same interval for every position and every momentum.
    pub fn uniform(dim: usize, x: (f64, f64), p: (f64, f64)) -> Result<SampleBox> {
        let mut lo = vec![x.0; dim];
        let mut hi = vec![x.1; dim];
        lo.extend(vec![p.0; dim]);
        hi.extend(vec![p.1; dim]);
        SampleBox::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len() / 2
    }
}

/// `count` uniform points in `bounds`, reproducible from `seed`.
pub fn sample_points(bounds: &SampleBox, count: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coords: Vec<f64> = bounds
                .lo
                .iter()
                .zip(&bounds.hi)
                .map(|(&a, &b)| if a == b { a } else { rng.random_range(a..b) })
                .collect();
            PhasePoint::from_coords(&coords).expect("finite coordinates")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_inside() {
        let b = SampleBox::uniform(2, (-2.0, 2.0), (0.2, 2.0)).unwrap();
        let a = sample_points(&b, 50, 7);
        assert_eq!(a, sample_points(&b, 50, 7));
        assert_ne!(a, sample_points(&b, 50, 8));
        for p in &a {
            assert!(p.x().iter().all(|v| (-2.0..2.0).contains(v)));
            assert!(p.p().iter().all(|v| (0.2..2.0).contains(v)));
        }
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(SampleBox::new(vec![0.0], vec![1.0]).is_err());
        assert!(SampleBox::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
    }
}
