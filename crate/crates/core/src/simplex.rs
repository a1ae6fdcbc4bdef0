//! Dense phase-1 simplex for feasibility of `A x = b, x ≥ 0`.

/// Pivot elements smaller than this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-10;
/// Phase-1 optimum at or below this counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;

const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOne {
    Feasible(Vec<f64>),
    /// Smallest total artificial mass reached.
    Infeasible(f64),
}

/// Minimizes the sum of artificial variables with Bland's rule.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(b.len(), m, "rhs length must match row count");
    let width = n + m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][rhs] = sign * b[i];
    }
    // Reduced-cost row; its rhs holds minus the objective.
    let (rows, last) = t.split_at_mut(m);
    for (j, cell) in last[0].iter_mut().enumerate().take(n) {
        *cell = -rows.iter().map(|r| r[j]).sum::<f64>();
    }
    t[m][rhs] = -(0..m).map(|i| t[i][rhs]).sum::<f64>();
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..n + m).find(|&j| t[m][j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let ratio = t[i][rhs] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Unbounded direction cannot occur for a bounded-below phase-1 objective.
            break;
        };
        let piv = t[r][enter];
        t[r].iter_mut().for_each(|v| *v /= piv);
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[enter];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        basis[r] = enter;
    }

    let objective = -t[m][rhs];
    if objective > FEASIBILITY_TOL {
        return PhaseOne::Infeasible(objective);
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].max(0.0);
        }
    }
    PhaseOne::Feasible(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible_system() {
        // x + y = 1, x - y = 0.5
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let PhaseOne::Feasible(x) = phase_one(&a, &[1.0, 0.5]) else {
            panic!("expected feasible");
        };
        assert!((x[0] - 0.75).abs() < 1e-12);
        assert!((x[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_needs_negative_variable() {
        // x + y = -1 has no non-negative solution.
        let a = vec![vec![1.0, 1.0]];
        assert!(matches!(phase_one(&a, &[-1.0]), PhaseOne::Infeasible(v) if (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn redundant_rows_are_fine() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        let PhaseOne::Feasible(x) = phase_one(&a, &[1.0, 2.0, 1.0]) else {
            panic!("expected feasible");
        };
        assert!((x[0] + x[1] - 1.0).abs() < 1e-12);
        assert!((x[1] + x[2] - 1.0).abs() < 1e-12);
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(phase_one(&a, &[1.0, 2.0]), PhaseOne::Infeasible(_)));
    }
}
