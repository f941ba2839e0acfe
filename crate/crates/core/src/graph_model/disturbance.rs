use rand::distr::OpenClosed01;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Symmetric matrix of pairwise link shocks, stored as the packed strict upper
/// triangle. Entries lie in (0, 1], so a link probability of 0 never fires and
/// a probability of 1 always does.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceMatrix {
    n: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl DisturbanceMatrix {
    pub fn sample_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("need at least 2 units, got {n}")));
        }
        let len = n * (n - 1) / 2;
        let upper = rng.sample_iter(OpenClosed01).take(len).collect();
        Ok(Self { n, upper })
    }

    /// Builds a matrix from explicit upper-triangle rows (`rows[i]` holds
    /// entries `(i, i+1..n)`).
    pub fn from_upper_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len() + 1;
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i - 1 {
                return Err(Error::InvalidInput(format!(
                    "row {i} of the upper triangle has {} entries, expected {}",
                    row.len(),
                    n - i - 1
                )));
            }
            if let Some(bad) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::InvalidInput(format!("disturbance {bad} outside [0, 1]")));
            }
            upper.extend_from_slice(row);
        }
        Ok(Self { n, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `eta[i][j]`; the diagonal is reported as 1.0 (never below a probability).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper[packed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.upper[packed_index(self.n, j, i)],
            std::cmp::Ordering::Equal => 1.0,
        }
    }

    /// Entries `(i, i+1..n)` as a contiguous slice.
    #[inline]
    pub fn upper_row(&self, i: usize) -> &[f64] {
        if i + 1 >= self.n {
            return &[];
        }
        let start = packed_index(self.n, i, i + 1);
        &self.upper[start..start + (self.n - i - 1)]
    }

    pub fn upper_entries(&self) -> &[f64] {
        &self.upper
    }
}

/// Samples the shared pairwise disturbances for `n` units.
pub fn sample_disturbances(n: usize, seed: u64) -> Result<DisturbanceMatrix> {
    let mut rng = stream_rng(seed, 0, Stream::Disturbances);
    DisturbanceMatrix::sample_with(&mut rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean;

    #[test]
    fn symmetric_and_in_range() {
        let eta = sample_disturbances(30, 1).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(eta.get(i, j), eta.get(j, i));
                if i != j {
                    let v = eta.get(i, j);
                    assert!(v > 0.0 && v <= 1.0);
                }
            }
        }
    }

    #[test]
    fn uniform_mean() {
        let eta = sample_disturbances(200, 3).unwrap();
        let m = mean(eta.upper_entries());
        assert!((m - 0.5).abs() < 0.02, "mean {m}");
    }

    #[test]
    fn reseeding() {
        let a = sample_disturbances(20, 1).unwrap();
        let b = sample_disturbances(20, 1).unwrap();
        let c = sample_disturbances(20, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rows_match_get() {
        let eta = sample_disturbances(7, 9).unwrap();
        for i in 0..7 {
            let row = eta.upper_row(i);
            for (k, v) in row.iter().enumerate() {
                assert_eq!(*v, eta.get(i, i + 1 + k));
            }
        }
        let rebuilt =
            DisturbanceMatrix::from_upper_rows(&(0..6).map(|i| eta.upper_row(i).to_vec()).collect::<Vec<_>>())
                .unwrap();
        assert_eq!(rebuilt, eta);
    }
}
