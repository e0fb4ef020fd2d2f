//! The per-iteration feasibility LP of the deterministic greedy and a
//! phase-one simplex that returns one of its vertices.
//!
//! Variables are `p[s][i]` for support index `s` and part `i`, flattened as
//! `s * k + i`. The constraints, in the fixed order used for tight sets, are
//!
//! * `k` inequalities, one per part `l`:
//!   `Σ_s Pr[s] ((1 - 1/k) Σ_i p[s][i] y_i(s) + p[s][l] y_l(s)) >= Σ_s Pr[s] y_l(s)`
//! * `m` equalities `Σ_i p[s][i] = 1`
//! * `km` sign constraints `p[s][i] >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual tolerance for feasibility and tightness, and the simplex pivot tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Entries below this magnitude are treated as exactly zero.
pub const SNAP_TOL: f64 = 1e-12;

/// Gains may dip below zero by rounding on fractional instances; anything
/// further negative means the oracle is not monotone.
const NEGATIVE_GAIN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeLP {
    pub k: u32,
    /// `Pr[s]` for each support entry.
    pub probs: Vec<f64>,
    /// `gains[s][i - 1] = y_i(s)`.
    pub gains: Vec<Vec<f64>>,
}

/// Builds the LP for one iteration from the current support weights and gains.
pub fn assemble(probs: &[f64], gains: &[Vec<f64>], k: u32) -> Result<ExtremeLP> {
    if k == 0 {
        return Err(Error::Validation("k must be at least 1".into()));
    }
    if probs.len() != gains.len() {
        return Err(Error::DimensionMismatch {
            left: probs.len(),
            right: gains.len(),
        });
    }
    if probs.is_empty() {
        return Err(Error::Validation("empty support".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > FEASIBILITY_TOL || probs.iter().any(|&p| p.is_nan() || p <= 0.0) {
        return Err(Error::Validation(format!(
            "support weights must be positive and sum to 1 (sum {total})"
        )));
    }
    let mut clean = Vec::with_capacity(gains.len());
    for row in gains {
        if row.len() != k as usize {
            return Err(Error::DimensionMismatch {
                left: row.len(),
                right: k as usize,
            });
        }
        let mut out = Vec::with_capacity(row.len());
        for &g in row {
            if !g.is_finite() || g < -NEGATIVE_GAIN_TOL {
                return Err(Error::Validation(format!(
                    "marginal gain {g} is negative; oracle is not monotone"
                )));
            }
            out.push(g.max(0.0));
        }
        clean.push(out);
    }
    Ok(ExtremeLP {
        k,
        probs: probs.to_vec(),
        gains: clean,
    })
}

impl ExtremeLP {
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn num_vars(&self) -> usize {
        self.m() * self.k as usize
    }

    fn ratio(&self) -> f64 {
        1.0 - 1.0 / self.k as f64
    }

    /// Coefficients and right-hand side of the inequality for part `l` (0-based).
    pub fn inequality(&self, l: usize) -> (Vec<f64>, f64) {
        let k = self.k as usize;
        let c = self.ratio();
        let mut row = vec![0.0; self.num_vars()];
        let mut rhs = 0.0;
        for (s, (&pr, y)) in self.probs.iter().zip(&self.gains).enumerate() {
            for i in 0..k {
                let mut coef = c * y[i];
                if i == l {
                    coef += y[l];
                }
                row[s * k + i] = pr * coef;
            }
            rhs += pr * y[l];
        }
        (row, rhs)
    }

    pub fn is_degenerate(&self) -> bool {
        self.gains.iter().flatten().all(|&g| g == 0.0)
    }

    /// Largest constraint violation of `p` (zero when feasible).
    pub fn max_residual(&self, p: &[Vec<f64>]) -> f64 {
        let flat: Vec<f64> = p.iter().flatten().copied().collect();
        let mut worst: f64 = 0.0;
        for l in 0..self.k as usize {
            let (row, rhs) = self.inequality(l);
            let lhs: f64 = row.iter().zip(&flat).map(|(a, x)| a * x).sum();
            worst = worst.max(rhs - lhs);
        }
        for ps in p {
            worst = worst.max((ps.iter().sum::<f64>() - 1.0).abs());
        }
        for &x in &flat {
            worst = worst.max(-x);
        }
        worst
    }

    /// Indices of constraints tight at `p`, in the module-level ordering.
    pub fn tight_set(&self, p: &[Vec<f64>]) -> Vec<usize> {
        let k = self.k as usize;
        let m = self.m();
        let flat: Vec<f64> = p.iter().flatten().copied().collect();
        let mut tight = Vec::new();
        for l in 0..k {
            let (row, rhs) = self.inequality(l);
            let lhs: f64 = row.iter().zip(&flat).map(|(a, x)| a * x).sum();
            if (lhs - rhs).abs() <= FEASIBILITY_TOL {
                tight.push(l);
            }
        }
        tight.extend(k..k + m);
        for (v, &x) in flat.iter().enumerate() {
            if x.abs() <= SNAP_TOL {
                tight.push(k + m + v);
            }
        }
        tight
    }

    /// Row of the constraint matrix for a constraint index.
    fn constraint_row(&self, idx: usize) -> Vec<f64> {
        let k = self.k as usize;
        let m = self.m();
        if idx < k {
            self.inequality(idx).0
        } else if idx < k + m {
            let s = idx - k;
            let mut row = vec![0.0; self.num_vars()];
            row[s * k..(s + 1) * k].iter_mut().for_each(|x| *x = 1.0);
            row
        } else {
            let mut row = vec![0.0; self.num_vars()];
            row[idx - k - m] = 1.0;
            row
        }
    }

    /// JSON dump for reproducing solver issues offline.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("lp serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ExtremeLP = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        assemble(&raw.probs, &raw.gains, raw.k)
    }
}

/// The point used to show the LP is feasible: each support entry gets the
/// randomized greedy's distribution `p_i ∝ y_i^(k-1)`, or all mass on part 1
/// when every gain is zero.
pub fn feasible_witness(lp: &ExtremeLP) -> Vec<Vec<f64>> {
    lp.gains
        .iter()
        .map(|y| greedy_distribution(y, lp.k))
        .collect()
}

/// `p_i = y_i^t / Σ_j y_j^t` with `t = k - 1`, falling back to part 1 when the
/// sum vanishes.
pub fn greedy_distribution(gains: &[f64], k: u32) -> Vec<f64> {
    let t = k as i32 - 1;
    let powered: Vec<f64> = gains.iter().map(|&y| y.max(0.0).powi(t)).collect();
    let beta: f64 = powered.iter().sum();
    if beta == 0.0 {
        let mut p = vec![0.0; gains.len()];
        p[0] = 1.0;
        p
    } else {
        powered.iter().map(|w| w / beta).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicSolution {
    /// `values[s][i - 1] = p_{i,s}`, snapped so tiny entries are exactly zero.
    pub values: Vec<Vec<f64>>,
    pub tight_set: Vec<usize>,
    pub support_size: usize,
    pub max_residual: f64,
    pub pivots: usize,
}

impl BasicSolution {
    fn from_values(lp: &ExtremeLP, mut values: Vec<Vec<f64>>, pivots: usize) -> Self {
        for x in values.iter_mut().flatten() {
            if *x < SNAP_TOL {
                *x = 0.0;
            }
        }
        let support_size = values.iter().flatten().filter(|&&x| x > 0.0).count();
        Self {
            tight_set: lp.tight_set(&values),
            max_residual: lp.max_residual(&values),
            values,
            support_size,
            pivots,
        }
    }
}

/// Finds a vertex of the feasible region with phase-one simplex under
/// Bland's smallest-index rule. Deterministic for a given LP.
pub fn find_extreme_point(lp: &ExtremeLP) -> Result<BasicSolution> {
    let k = lp.k as usize;
    let m = lp.m();
    if lp.is_degenerate() {
        let values = (0..m)
            .map(|_| {
                let mut p = vec![0.0; k];
                p[0] = 1.0;
                p
            })
            .collect();
        return Ok(BasicSolution::from_values(lp, values, 0));
    }

    let mut tab = Tableau::phase_one(lp);
    let pivots = tab.run(lp)?;
    let objective = tab.objective();
    if objective > FEASIBILITY_TOL {
        return Err(Error::LpInfeasible {
            objective,
            dump: lp.to_json(),
        });
    }
    tab.drive_out_artificials();

    let mut values = vec![vec![0.0; k]; m];
    for (r, &var) in tab.basis.iter().enumerate() {
        if var < lp.num_vars() {
            values[var / k][var % k] = tab.rhs(r);
        }
    }
    let sol = BasicSolution::from_values(lp, values, pivots);
    if sol.max_residual > FEASIBILITY_TOL {
        return Err(Error::Numerical {
            message: format!("vertex residual {:e} exceeds tolerance", sol.max_residual),
            dump: lp.to_json(),
        });
    }
    Ok(sol)
}

/// Dense phase-one tableau. Columns are the `km` LP variables, then `k`
/// surplus variables, then one artificial per row, then the right-hand side.
struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs of the phase-one objective; last entry is `-objective`.
    cost: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    width: usize,
}

impl Tableau {
    fn phase_one(lp: &ExtremeLP) -> Self {
        let k = lp.k as usize;
        let m = lp.m();
        let n_vars = lp.num_vars();
        let n_rows = k + m;
        let first_artificial = n_vars + k;
        let width = first_artificial + n_rows + 1;
        let mut rows = Vec::with_capacity(n_rows);

        for l in 0..k {
            let (coef, rhs) = lp.inequality(l);
            // Row scaling only affects pivot selection; residuals use the raw LP.
            let scale = coef
                .iter()
                .fold(rhs.abs(), |acc, c| acc.max(c.abs()))
                .max(f64::MIN_POSITIVE);
            let mut row = vec![0.0; width];
            for (v, c) in coef.iter().enumerate() {
                row[v] = c / scale;
            }
            row[n_vars + l] = -1.0 / scale;
            row[first_artificial + l] = 1.0;
            row[width - 1] = rhs / scale;
            rows.push(row);
        }
        for s in 0..m {
            let mut row = vec![0.0; width];
            row[s * k..(s + 1) * k].iter_mut().for_each(|x| *x = 1.0);
            row[first_artificial + k + s] = 1.0;
            row[width - 1] = 1.0;
            rows.push(row);
        }

        let mut cost = vec![0.0; width];
        for row in &rows {
            for j in 0..first_artificial {
                cost[j] -= row[j];
            }
            cost[width - 1] -= row[width - 1];
        }
        let basis = (first_artificial..first_artificial + n_rows).collect();
        Self {
            rows,
            cost,
            basis,
            first_artificial,
            width,
        }
    }

    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width - 1]
    }

    fn objective(&self) -> f64 {
        -self.cost[self.width - 1]
    }

    fn run(&mut self, lp: &ExtremeLP) -> Result<usize> {
        let limit = 50 * self.width * self.rows.len() + 1_000;
        let mut pivots = 0;
        loop {
            // Bland: lowest-index improving column, then lowest-index basic
            // variable among minimum-ratio rows.
            let entering = match (0..self.width - 1).find(|&j| self.cost[j] < -FEASIBILITY_TOL) {
                Some(j) => j,
                None => return Ok(pivots),
            };
            let mut leaving: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[entering];
                if a <= FEASIBILITY_TOL {
                    continue;
                }
                let ratio = row[self.width - 1].max(0.0) / a;
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - SNAP_TOL
                            || (ratio <= best_ratio + SNAP_TOL && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leaving else {
                // Phase one is bounded below by zero, so this is numerical trouble.
                return Err(Error::Numerical {
                    message: format!("unbounded direction at column {entering} in phase one"),
                    dump: lp.to_json(),
                });
            };
            self.pivot(r, entering);
            pivots += 1;
            if pivots > limit {
                return Err(Error::Numerical {
                    message: format!("no convergence after {pivots} pivots"),
                    dump: lp.to_json(),
                });
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x *= inv;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * p;
                }
                row[c] = 0.0;
            }
        }
        let factor = self.cost[c];
        if factor != 0.0 {
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Replaces zero-level artificials in the basis by structural columns.
    /// Rows where no such column exists are redundant and keep their artificial.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            if let Some(c) =
                (0..self.first_artificial).find(|&j| self.rows[r][j].abs() > FEASIBILITY_TOL)
            {
                self.pivot(r, c);
            }
        }
    }
}

/// Outcome of re-checking a candidate vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicnessReport {
    pub holds: bool,
    pub max_residual: f64,
    pub tight_rank: usize,
    pub required_rank: usize,
    pub support_size: usize,
    pub support_bound: usize,
    pub failures: Vec<String>,
}

/// Checks feasibility, that the tight constraints have full rank `km`, and
/// that at most `m + k` entries are positive.
pub fn verify_basic(lp: &ExtremeLP, values: &[Vec<f64>]) -> BasicnessReport {
    let mut failures = Vec::new();
    let shape_ok = values.len() == lp.m() && values.iter().all(|v| v.len() == lp.k as usize);
    if !shape_ok {
        failures.push("solution shape does not match the LP".to_string());
        return BasicnessReport {
            holds: false,
            max_residual: f64::INFINITY,
            tight_rank: 0,
            required_rank: lp.num_vars(),
            support_size: 0,
            support_bound: lp.m() + lp.k as usize,
            failures,
        };
    }

    let max_residual = lp.max_residual(values);
    if max_residual > FEASIBILITY_TOL {
        failures.push(format!("infeasible: residual {max_residual:e}"));
    }
    let tight: Vec<Vec<f64>> = lp
        .tight_set(values)
        .into_iter()
        .map(|idx| lp.constraint_row(idx))
        .collect();
    let tight_rank = rank(tight);
    let required_rank = lp.num_vars();
    if tight_rank < required_rank {
        failures.push(format!(
            "tight constraints have rank {tight_rank} < {required_rank}"
        ));
    }
    let support_size = values
        .iter()
        .flatten()
        .filter(|&&x| x.abs() > SNAP_TOL)
        .count();
    let support_bound = lp.m() + lp.k as usize;
    if support_size > support_bound {
        failures.push(format!(
            "support {support_size} exceeds m + k = {support_bound}"
        ));
    }
    BasicnessReport {
        holds: failures.is_empty(),
        max_residual,
        tight_rank,
        required_rank,
        support_size,
        support_bound,
        failures,
    }
}

/// Row rank by Gaussian elimination with partial pivoting on row-normalized input.
pub(crate) fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    for row in rows.iter_mut() {
        let scale = row.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if scale > 0.0 {
            row.iter_mut().for_each(|x| *x /= scale);
        }
    }
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let (best, best_abs) = (rank..rows.len())
            .map(|r| (r, rows[r][c].abs()))
            .fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= FEASIBILITY_TOL {
            continue;
        }
        rows.swap(rank, best);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[c] / pivot[c];
            if factor != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(probs: &[f64], gains: &[&[f64]]) -> ExtremeLP {
        let k = gains[0].len() as u32;
        let g: Vec<Vec<f64>> = gains.iter().map(|r| r.to_vec()).collect();
        assemble(probs, &g, k).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn single_entry_two_parts_reduces_by_substitution() {
        // 0.5 (p1 + p2) >= 1 - p_l  <=>  0.5 (p1 + p2) + p_l >= 1
        let lp = lp(&[1.0], &[&[1.0, 1.0]]);
        let (row, rhs) = lp.inequality(0);
        assert_eq!(row, vec![1.5, 0.5]);
        assert_eq!(rhs, 1.0);
        let (row, rhs) = lp.inequality(1);
        assert_eq!(row, vec![0.5, 1.5]);
        assert_eq!(rhs, 1.0);
    }

    #[test]
    fn k_one_collapses() {
        let lp = lp(&[0.25, 0.75], &[&[2.0], &[0.0]]);
        let (row, rhs) = lp.inequality(0);
        // (1 - 1/k) = 0, so only the p_l y_l term survives.
        assert_eq!(row, vec![0.5, 0.0]);
        assert_eq!(rhs, 0.5);
        let sol = find_extreme_point(&lp).unwrap();
        assert_eq!(sol.values, vec![vec![1.0], vec![1.0]]);
    }

    #[test]
    fn zero_gains_make_every_simplex_point_feasible() {
        let lp = lp(&[0.5, 0.5], &[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(
            lp.max_residual(&[vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0]]),
            0.0
        );
        let sol = find_extreme_point(&lp).unwrap();
        assert_eq!(sol.values, vec![vec![1.0, 0.0, 0.0]; 2]);
        assert_eq!(sol.pivots, 0);
        assert!(sol.support_size <= 2 + 3);
        assert!(verify_basic(&lp, &sol.values).holds);
    }

    #[test]
    fn witness_uses_greedy_distribution() {
        let lp = lp(&[1.0], &[&[1.0, 3.0]]);
        let w = feasible_witness(&lp);
        assert_eq!(w, vec![vec![0.25, 0.75]]);
        assert_eq!(lp.max_residual(&w), 0.0);
        assert_eq!(greedy_distribution(&[0.0, 0.0], 2), vec![1.0, 0.0]);
        assert_eq!(
            greedy_distribution(&[0.0, 0.0, 0.0], 3),
            vec![1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn equal_gains_give_the_unique_vertex() {
        let lp = lp(&[1.0], &[&[1.0, 1.0]]);
        let sol = find_extreme_point(&lp).unwrap();
        assert!(close(sol.values[0][0], 0.5) && close(sol.values[0][1], 0.5));
        assert!(sol.tight_set.contains(&0) && sol.tight_set.contains(&1));
        assert!(verify_basic(&lp, &sol.values).holds);
    }

    #[test]
    fn one_sided_gains_return_a_vertex_of_the_segment() {
        // Feasible region: p1 >= 2/3 on the 1-simplex.
        let lp = lp(&[1.0], &[&[1.0, 0.0]]);
        let sol = find_extreme_point(&lp).unwrap();
        let p1 = sol.values[0][0];
        assert!(close(p1, 2.0 / 3.0) || close(p1, 1.0), "p1 = {p1}");
        assert!(verify_basic(&lp, &sol.values).holds);

        let interior = verify_basic(&lp, &[vec![5.0 / 6.0, 1.0 / 6.0]]);
        assert!(!interior.holds);
        assert!(interior.max_residual <= FEASIBILITY_TOL);
        assert_eq!(interior.tight_rank, 1);
        // (1/2, 1/2) violates the l = 1 constraint outright.
        let midpoint = verify_basic(&lp, &[vec![0.5, 0.5]]);
        assert!(!midpoint.holds);
        assert!(midpoint.max_residual > 0.2);
    }

    #[test]
    fn single_element_modular_lp() {
        // y = (1, 3): feasible p1 in [0, 3/8].
        let lp = lp(&[1.0], &[&[1.0, 3.0]]);
        let sol = find_extreme_point(&lp).unwrap();
        let p1 = sol.values[0][0];
        assert!(close(p1, 0.0) || close(p1, 3.0 / 8.0), "p1 = {p1}");
    }

    #[test]
    fn mixed_two_entry_witness_is_feasible_but_not_basic() {
        let lp = lp(&[0.4, 0.6], &[&[2.0, 5.0, 1.0], &[4.0, 1.0, 3.0]]);
        let w = feasible_witness(&lp);
        assert!(lp.max_residual(&w) <= 1e-12);
        let report = verify_basic(&lp, &w);
        assert!(report.max_residual <= FEASIBILITY_TOL);
        assert!(!report.holds);
        assert!(report.tight_rank < report.required_rank);

        let sol = find_extreme_point(&lp).unwrap();
        let report = verify_basic(&lp, &sol.values);
        assert!(report.holds, "{report:?}");
        assert!(sol.support_size <= 2 + 3);
    }

    #[test]
    fn assemble_validates_input() {
        assert!(assemble(&[0.5], &[vec![1.0, 1.0]], 2).is_err());
        assert!(assemble(&[1.0], &[vec![1.0]], 2).is_err());
        assert!(assemble(&[1.0], &[vec![1.0, -1.0]], 2).is_err());
        assert!(assemble(&[0.5, 0.5], &[vec![1.0, 1.0]], 2).is_err());
        let lp = assemble(&[1.0], &[vec![1.0, -1e-12]], 2).unwrap();
        assert_eq!(lp.gains[0][1], 0.0);
    }

    #[test]
    fn dump_round_trips() {
        let lp = lp(&[0.25, 0.75], &[&[1.0, 2.0], &[3.0, 0.5]]);
        let text = lp.to_json();
        assert!(text.contains("\"probs\"") && text.contains("\"gains\"") && text.contains("\"k\""));
        let back = ExtremeLP::from_json(&text).unwrap();
        assert_eq!(back, lp);
        assert_eq!(
            find_extreme_point(&back).unwrap(),
            find_extreme_point(&lp).unwrap()
        );
    }

    #[test]
    fn rank_of_simple_systems() {
        assert_eq!(
            rank(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]),
            2
        );
        assert_eq!(rank(vec![vec![1.0, 1.0], vec![2.0, 2.0]]), 1);
        assert_eq!(rank(vec![vec![0.0, 0.0]]), 0);
    }
}
