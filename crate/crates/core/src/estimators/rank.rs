use crate::error::{Error, Result};

use super::eigen::EigenBasis;

/// Largest rank the gap heuristic will propose.
pub const MAX_AUTO_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankChoice {
    pub rank: usize,
    /// Relative gap `(lambda_r - lambda_{r+1}) / |lambda_1|` at the chosen rank.
    pub relative_gap: f64,
    /// No gap was distinguishable; the rank fell back to 1.
    pub degenerate: bool,
}

/// Uses `r_user` when given; otherwise picks the `r <= 8` maximizing the
/// relative eigen-gap, preferring the smaller rank on ties.
pub fn select_rank(basis: &EigenBasis, r_user: Option<usize>) -> Result<RankChoice> {
    let n = basis.n();
    if let Some(r) = r_user {
        if r > n {
            return Err(Error::InvalidConfig(format!("rank {r} exceeds the network size {n}")));
        }
        if r > basis.k() {
            return Err(Error::InvalidConfig(format!(
                "rank {r} exceeds the {} computed eigenpairs",
                basis.k()
            )));
        }
        let gap = relative_gap(basis, r);
        return Ok(RankChoice { rank: r, relative_gap: gap, degenerate: false });
    }
    let r_max = MAX_AUTO_RANK.min(basis.k().saturating_sub(1));
    let lead = basis.values.first().map_or(0.0, |v| v.abs());
    if r_max == 0 || lead == 0.0 {
        log::warn!("cannot select a denoising rank from this spectrum; using 1");
        return Ok(RankChoice { rank: 1, relative_gap: 0.0, degenerate: true });
    }
    let mut best = (1, relative_gap(basis, 1));
    for r in 2..=r_max {
        let g = relative_gap(basis, r);
        if g > best.1 {
            best = (r, g);
        }
    }
    if best.1 <= 1e-12 {
        log::warn!("eigenvalues are indistinguishable; using denoising rank 1");
        return Ok(RankChoice { rank: 1, relative_gap: best.1, degenerate: true });
    }
    Ok(RankChoice { rank: best.0, relative_gap: best.1, degenerate: false })
}

fn relative_gap(basis: &EigenBasis, r: usize) -> f64 {
    if r == 0 || r >= basis.k() {
        return f64::NAN;
    }
    (basis.values[r - 1] - basis.values[r]) / basis.values[0].abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn finds_rank_two_structure() {
        let n = 60;
        let u: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.37).sin()).collect();
        let v: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.11).cos()).collect();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let mut m = DMatrix::from_fn(n, n, |i, j| 3.0 * u[i] * u[j] + 2.0 * v[i] * v[j]);
        for i in 0..n {
            for j in 0..=i {
                let e = noise.sample(&mut rng);
                m[(i, j)] += e;
                if i != j {
                    m[(j, i)] += e;
                }
            }
        }
        let basis = EigenBasis::from_symmetric(&m, 10).unwrap();
        let choice = select_rank(&basis, None).unwrap();
        assert_eq!(choice.rank, 2);
        assert!(!choice.degenerate);
    }

    #[test]
    fn ties_prefer_smaller_rank() {
        // eigenvalues 3, 2, 1, 0: every gap is equal
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0, 0.0]));
        let basis = EigenBasis::from_symmetric(&m, 4).unwrap();
        assert_eq!(select_rank(&basis, None).unwrap().rank, 1);
    }

    #[test]
    fn equal_eigenvalues_are_degenerate() {
        let m = DMatrix::<f64>::identity(5, 5);
        let basis = EigenBasis::from_symmetric(&m, 5).unwrap();
        let c = select_rank(&basis, None).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.rank, 1);
    }

    #[test]
    fn user_rank_validated() {
        let m = DMatrix::<f64>::identity(4, 4);
        let basis = EigenBasis::from_symmetric(&m, 2).unwrap();
        assert!(select_rank(&basis, Some(5)).is_err());
        assert!(select_rank(&basis, Some(3)).is_err());
        assert_eq!(select_rank(&basis, Some(2)).unwrap().rank, 2);
    }
}
