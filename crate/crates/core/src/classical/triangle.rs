//! The classical-triangle counterexample: inside the triangle of diagonal
//! states on C^3, the constraint <e3|rho e3> at 1/2 has rank-two extreme
//! points, and the supremum of the constrained functional over pure states
//! falls strictly below its value on mixed states.

use num::rational::BigRational;
use num::{One, Zero};
use serde::Serialize;

use super::simplex::FiniteDensity;

/// Exact rank of a small rational matrix via Gaussian elimination.
fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &lead;
                for c in col..ncols {
                    let sub = &factor * &rows[rank][c];
                    rows[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Dimension of the two-sided direction space at `p` inside the simplex
/// restricted by the active linear functionals: vectors supported on
/// supp(p), summing to zero, annihilated by each functional. Exact.
fn simplex_direction_dim(p: &FiniteDensity, functionals: &[Vec<BigRational>]) -> usize {
    let support: Vec<u64> = p.support().collect();
    let k = support.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(1 + functionals.len());
    rows.push(vec![BigRational::one(); k]);
    for f in functionals {
        rows.push(
            support
                .iter()
                .map(|&n| f[(n - 1) as usize].clone())
                .collect(),
        );
    }
    k - rational_rank(rows)
}

/// Machine-checkable certificate for the counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct TriangleReport {
    /// rho_1 = (sigma_1 + sigma_3) / 2 as exact fractions over {1, 2, 3}.
    pub rho1: Vec<(u64, String)>,
    /// Two-sided direction dimension of rho_1 in the level set (0 means
    /// extreme).
    pub direction_dim_level: usize,
    pub direction_dim_sublevel: usize,
    pub rho1_extreme_in_level_set: bool,
    pub rho1_extreme_in_sublevel_set: bool,
    /// Support size of rho_1 (its rank as a diagonal density matrix).
    pub rho1_rank: usize,
    /// Vertices (pure states) inside the sublevel set.
    pub pure_states_in_sublevel: Vec<u64>,
    /// Vertices inside the level set (none).
    pub pure_states_in_level: Vec<u64>,
    /// sup f over pure states in the sublevel set.
    pub sup_f_over_pure: f64,
    /// sup f over the whole sublevel set, attained at rho_1.
    pub sup_f_over_all: f64,
    /// All of the above verdicts combined.
    pub certificate_ok: bool,
}

/// Builds the triangle counterexample and checks its three facts: rho_1 is
/// extreme in both constrained sets, has rank two, and the pure states in
/// the sublevel set only reach f = 0 < 1/2.
pub fn triangle_counterexample() -> TriangleReport {
    let half = BigRational::new(1.into(), 2.into());
    // f(rho) = <e3|rho e3> reads the third diagonal entry.
    let f: Vec<BigRational> = vec![
        BigRational::zero(),
        BigRational::zero(),
        BigRational::one(),
    ];
    let alpha = half.clone();

    let rho1 = FiniteDensity::new(vec![(1, half.clone()), (3, half.clone())])
        .expect("rho_1 is a density");

    let f_value = |p: &FiniteDensity| -> BigRational {
        p.iter()
            .map(|(n, w)| &f[(n - 1) as usize] * w)
            .sum()
    };

    debug_assert_eq!(f_value(&rho1), alpha);

    // In both the level set and the sublevel set (where the constraint is
    // active at rho_1) the admissible directions must annihilate f.
    let dim_level = simplex_direction_dim(&rho1, &[f.clone()]);
    let active_at_rho1 = f_value(&rho1) == alpha;
    let dim_sublevel = if active_at_rho1 {
        simplex_direction_dim(&rho1, &[f.clone()])
    } else {
        simplex_direction_dim(&rho1, &[])
    };

    let vertices = [1u64, 2, 3];
    let pure_in_sublevel: Vec<u64> = vertices
        .iter()
        .copied()
        .filter(|&n| f[(n - 1) as usize] <= alpha)
        .collect();
    let pure_in_level: Vec<u64> = vertices
        .iter()
        .copied()
        .filter(|&n| f[(n - 1) as usize] == alpha)
        .collect();
    let sup_pure = pure_in_sublevel
        .iter()
        .map(|&n| &f[(n - 1) as usize])
        .max()
        .cloned()
        .unwrap_or_else(BigRational::zero);

    let rho1_rank = rho1.support_len();
    let extreme_level = dim_level == 0;
    let extreme_sublevel = dim_sublevel == 0;
    let to_f64 = |r: &BigRational| -> f64 {
        use num::ToPrimitive;
        r.to_f64().expect("small rational")
    };
    let certificate_ok = extreme_level
        && extreme_sublevel
        && rho1_rank == 2
        && sup_pure == BigRational::zero()
        && pure_in_level.is_empty()
        && f_value(&rho1) == alpha;

    TriangleReport {
        rho1: rho1.iter().map(|(n, w)| (n, w.to_string())).collect(),
        direction_dim_level: dim_level,
        direction_dim_sublevel: dim_sublevel,
        rho1_extreme_in_level_set: extreme_level,
        rho1_extreme_in_sublevel_set: extreme_sublevel,
        rho1_rank,
        pure_states_in_sublevel: pure_in_sublevel,
        pure_states_in_level: pure_in_level,
        sup_f_over_pure: to_f64(&sup_pure),
        sup_f_over_all: to_f64(&alpha),
        certificate_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_reproduces_all_three_facts() {
        let report = triangle_counterexample();
        assert!(report.rho1_extreme_in_level_set);
        assert!(report.rho1_extreme_in_sublevel_set);
        assert_eq!(report.rho1_rank, 2);
        assert_eq!(report.sup_f_over_pure, 0.0);
        assert_eq!(report.sup_f_over_all, 0.5);
        assert_eq!(report.pure_states_in_sublevel, vec![1, 2]);
        assert!(report.pure_states_in_level.is_empty());
        assert!(report.certificate_ok);
    }

    #[test]
    fn deterministic_output() {
        let a = serde_json::to_string(&triangle_counterexample()).unwrap();
        let b = serde_json::to_string(&triangle_counterexample()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rational_rank_basics() {
        let one = BigRational::one;
        let zero = BigRational::zero;
        // Rows (1,1,1) and (0,0,1) are independent.
        let rank = rational_rank(vec![
            vec![one(), one(), one()],
            vec![zero(), zero(), one()],
        ]);
        assert_eq!(rank, 2);
        let rank = rational_rank(vec![
            vec![one(), one(), one()],
            vec![one(), one(), one()],
        ]);
        assert_eq!(rank, 1);
    }
}
