//! Dense bounded-variable primal simplex for small problems:
//!
//! ```text
//! maximize cᵀx  subject to  A x = b,  0 ≤ x ≤ u
//! ```
//!
//! Two phases with one artificial variable per row. Entering and leaving
//! variables follow Bland's smallest-index rule.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-12;
/// Phase-one residual above which the problem is declared infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Relative equality residual tolerated in a returned solution.
pub const RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    /// `B⁻¹ A`, one row per constraint.
    rows: Vec<Vec<f64>>,
    /// Current values of the basic variables.
    values: Vec<f64>,
    basis: Vec<usize>,
    status: Vec<Status>,
    upper: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn value_of(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::AtLower => 0.0,
            Status::AtUpper => self.upper[j],
            Status::Basic => {
                let r = self.basis.iter().position(|&b| b == j).unwrap();
                self.values[r]
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
            }
        }
    }

    /// Runs simplex iterations maximizing `obj`. Returns `Err` when unbounded.
    fn optimize(&mut self, obj: &[f64], max_iterations: usize) -> Result<()> {
        let n = obj.len();
        loop {
            if self.iterations >= max_iterations {
                return Err(Error::Infeasible("simplex iteration limit reached".into()));
            }
            // Bland: smallest improving index.
            let mut entering = None;
            for j in 0..n {
                if self.status[j] == Status::Basic || self.upper[j] == 0.0 {
                    continue;
                }
                let d = obj[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| obj[b] * self.rows[i][j])
                        .sum::<f64>();
                let improving = match self.status[j] {
                    Status::AtLower => d > COST_EPS,
                    Status::AtUpper => d < -COST_EPS,
                    Status::Basic => false,
                };
                if improving {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(());
            };
            self.iterations += 1;
            let dir = if self.status[j] == Status::AtLower { 1.0 } else { -1.0 };

            // Ratio test. `None` row means a bound flip of the entering variable.
            let mut step = self.upper[j];
            let mut leave: Option<(usize, Status)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let alpha = dir * row[j];
                let b = self.basis[i];
                let (limit, hits) = if alpha > PIVOT_EPS {
                    (self.values[i].max(0.0) / alpha, Status::AtLower)
                } else if alpha < -PIVOT_EPS && self.upper[b].is_finite() {
                    ((self.upper[b] - self.values[i]).max(0.0) / -alpha, Status::AtUpper)
                } else {
                    continue;
                };
                // Ties with the bound flip keep the flip; ties between rows go
                // to the smallest basic index.
                let better = if limit < step - PIVOT_EPS {
                    true
                } else if limit <= step + PIVOT_EPS {
                    matches!(leave, Some((r, _)) if b < self.basis[r])
                } else {
                    false
                };
                if better {
                    step = step.min(limit);
                    leave = Some((i, hits));
                }
            }
            if !step.is_finite() {
                return Err(Error::Infeasible("linear program is unbounded".into()));
            }
            for (i, row) in self.rows.iter().enumerate() {
                self.values[i] -= dir * step * row[j];
            }
            match leave {
                None => {
                    self.status[j] = if self.status[j] == Status::AtLower {
                        Status::AtUpper
                    } else {
                        Status::AtLower
                    };
                }
                Some((r, hits)) => {
                    let entering_value = if dir > 0.0 { step } else { self.upper[j] - step };
                    let leaving = self.basis[r];
                    self.status[leaving] = hits;
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.status[j] = Status::Basic;
                    self.values[r] = entering_value;
                }
            }
        }
    }
}

/// Maximizes `cᵀx` subject to `A x = b` and `0 ≤ x ≤ upper`.
///
/// `upper` entries may be `f64::INFINITY`. Infeasible or unbounded problems
/// return [`Error::Infeasible`].
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if upper.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: upper.len(),
        });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            found: row.len(),
        });
    }
    if upper.iter().any(|u| !(*u >= 0.0)) {
        return Err(Error::InvalidParameter("upper bounds must be non-negative".into()));
    }

    // Columns: n structural, then m artificial.
    let total = n + m;
    let mut rows = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut r: Vec<f64> = row.iter().map(|v| sign * v).collect();
        r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        rows.push(r);
        values.push(sign * bi);
    }
    let mut bounds = upper.to_vec();
    bounds.extend(std::iter::repeat_n(f64::INFINITY, m));
    let mut status = vec![Status::AtLower; total];
    for s in status.iter_mut().skip(n) {
        *s = Status::Basic;
    }
    let mut tab = Tableau {
        rows,
        values,
        basis: (n..total).collect(),
        status,
        upper: bounds,
        iterations: 0,
    };
    let max_iterations = 50 * total.max(10);

    // Phase one: maximize −Σ artificials.
    let phase1: Vec<f64> = (0..total).map(|j| if j < n { 0.0 } else { -1.0 }).collect();
    tab.optimize(&phase1, max_iterations)?;
    let residual: f64 = (n..total).map(|j| tab.value_of(j)).sum();
    let scale = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if residual > FEASIBILITY_TOL * scale {
        return Err(Error::Infeasible(format!(
            "no point satisfies the constraints (phase-one residual {residual:e})"
        )));
    }
    // Drive zero-valued artificials out of the basis where possible, then pin
    // every artificial at zero.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| tab.status[j] != Status::Basic && tab.rows[r][j].abs() > 1e-9) {
                let value = tab.value_of(j);
                let leaving = tab.basis[r];
                tab.pivot(r, j);
                tab.status[leaving] = Status::AtLower;
                tab.basis[r] = j;
                tab.status[j] = Status::Basic;
                tab.values[r] = value;
            }
        }
    }
    for j in n..total {
        tab.upper[j] = 0.0;
    }

    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, m));
    tab.optimize(&phase2, max_iterations)?;

    let x: Vec<f64> = (0..n).map(|j| tab.value_of(j).clamp(0.0, upper[j])).collect();
    let worst = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let lhs: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            let mag: f64 = row.iter().zip(&x).map(|(p, q)| (p * q).abs()).sum();
            (lhs - bi).abs() / mag.max(bi.abs()).max(1.0)
        })
        .fold(0.0f64, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "simplex lost feasibility (relative residual {worst:e})"
        )));
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpSolution {
        x,
        objective,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Solves a small dense square system by Gaussian elimination.
    fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
        let n = rhs.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
            if m[piv][col].abs() < 1e-12 {
                return None;
            }
            m.swap(col, piv);
            rhs.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for k in col..n {
                        m[r][k] -= f * m[col][k];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
        Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
    }

    /// Enumerates every basic solution of a box-bounded equality LP.
    fn brute_force(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: &[f64]) -> Option<f64> {
        let n = c.len();
        let m = a.len();
        let mut best: Option<f64> = None;
        let combos = 1usize << n;
        for basic_mask in 0..combos {
            if (basic_mask as u32).count_ones() as usize != m {
                continue;
            }
            let basic: Vec<usize> = (0..n).filter(|j| basic_mask >> j & 1 == 1).collect();
            let nonbasic: Vec<usize> = (0..n).filter(|j| basic_mask >> j & 1 == 0).collect();
            for bound_mask in 0..(1usize << nonbasic.len()) {
                let mut x = vec![0.0; n];
                for (t, &j) in nonbasic.iter().enumerate() {
                    x[j] = if bound_mask >> t & 1 == 1 { upper[j] } else { 0.0 };
                }
                let rhs: Vec<f64> = (0..m)
                    .map(|i| b[i] - nonbasic.iter().map(|&j| a[i][j] * x[j]).sum::<f64>())
                    .collect();
                let sub: Vec<Vec<f64>> = (0..m).map(|i| basic.iter().map(|&j| a[i][j]).collect()).collect();
                let Some(xb) = solve_square(sub, rhs) else { continue };
                if xb.iter().zip(&basic).any(|(v, &j)| *v < -1e-9 || *v > upper[j] + 1e-9) {
                    continue;
                }
                for (v, &j) in xb.iter().zip(&basic) {
                    x[j] = *v;
                }
                let obj: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
                best = Some(best.map_or(obj, |bst: f64| bst.max(obj)));
            }
        }
        best
    }

    #[test]
    fn simple_box() {
        // max x0 + 2 x1, x0 + x1 = 1, 0 ≤ x ≤ 1 → x = (0, 1)
        let s = maximize(&[1.0, 2.0], &[vec![1.0, 1.0]], &[1.0], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(s.objective, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bound_flips_only() {
        // No equality rows: every positive-cost variable sits at its upper bound.
        let s = maximize(&[1.0, -1.0, 3.0], &[], &[], &[2.0, 5.0, 0.5]).unwrap();
        assert_eq!(s.x, vec![2.0, 0.0, 0.5]);
    }

    #[test]
    fn infeasible_is_reported() {
        let r = maximize(&[1.0, 1.0], &[vec![1.0, 1.0]], &[3.0], &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn unbounded_is_reported() {
        let r = maximize(&[1.0, 0.0], &[vec![1.0, -1.0]], &[0.0], &[f64::INFINITY, f64::INFINITY]);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0]];
        let s = maximize(&[1.0, 2.0, 3.0], &a, &[1.0, 2.0], &[1.0; 3]).unwrap();
        assert_abs_diff_eq!(s.objective, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn homogeneous_equalities() {
        // Same structure as the max-luminance program: A w = 0, 0 ≤ w ≤ 1.
        let a = vec![vec![1.0, -2.0, 0.5, 0.0], vec![0.0, 1.0, -1.0, 1.0]];
        let c = [0.3, 0.5, 0.1, 0.2];
        let s = maximize(&c, &a, &[0.0, 0.0], &[1.0; 4]).unwrap();
        let oracle = brute_force(&c, &a, &[0.0, 0.0], &[1.0; 4]).unwrap();
        assert_abs_diff_eq!(s.objective, oracle, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            n in 3usize..7,
            seed_a in proptest::collection::vec(-1.0f64..1.0, 12),
            seed_c in proptest::collection::vec(-1.0f64..1.0, 6),
            frac in proptest::collection::vec(0.0f64..1.0, 6),
        ) {
            let m = 2;
            let a: Vec<Vec<f64>> = (0..m).map(|i| seed_a[i * 6..i * 6 + n].to_vec()).collect();
            let upper = vec![1.0; n];
            // b from an interior point so the problem is feasible.
            let x0 = &frac[..n];
            let b: Vec<f64> = a.iter().map(|r| r.iter().zip(x0).map(|(p, q)| p * q).sum()).collect();
            let c = &seed_c[..n];
            let s = maximize(c, &a, &b, &upper).unwrap();
            let oracle = brute_force(c, &a, &b, &upper).unwrap();
            prop_assert!((s.objective - oracle).abs() < 1e-8, "simplex {} vs oracle {}", s.objective, oracle);
            for (i, row) in a.iter().enumerate() {
                let lhs: f64 = row.iter().zip(&s.x).map(|(p, q)| p * q).sum();
                prop_assert!((lhs - b[i]).abs() < 1e-9);
            }
            prop_assert!(s.x.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn many_rows_with_slacks_stay_feasible() {
        // Box-constrained mixture: Σ_k w_k g_k(t) + s_t = 1 on a dense grid.
        let k = 7;
        let grid = 300;
        let n = k + grid;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for t in 0..grid {
            let u = t as f64 / (grid - 1) as f64;
            let mut row = vec![0.0; n];
            for (j, v) in row.iter_mut().take(k).enumerate() {
                let centre = j as f64 / (k - 1) as f64;
                *v = (-((u - centre) * 6.0).powi(2)).exp();
            }
            row[k + t] = 1.0;
            a.push(row);
            b.push(1.0);
        }
        let mut chroma = vec![0.0; n];
        for (j, v) in chroma.iter_mut().take(k).enumerate() {
            *v = j as f64 - 2.5;
        }
        a.push(chroma);
        b.push(0.0);
        let mut upper = vec![10.0; k];
        upper.extend(std::iter::repeat_n(1.0, grid));
        let mut c = vec![1.0; k];
        c.extend(std::iter::repeat_n(0.0, grid));
        let s = maximize(&c, &a, &b, &upper).unwrap();
        for (row, bi) in a.iter().zip(&b) {
            let lhs: f64 = row.iter().zip(&s.x).map(|(p, q)| p * q).sum();
            assert!((lhs - bi).abs() < 1e-8);
        }
        assert!(s.objective > 0.0);
    }
}
