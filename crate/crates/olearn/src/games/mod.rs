//! Finite binary zero-sum games.
//!
//! The row player minimizes and the column player maximizes the expected
//! payoff `val(row, col)`. In the learning games used elsewhere in the crate
//! the rows are concepts, the columns are labeled examples, and the payoff
//! is the error indicator `1[h(x) != y]`, so the value is the best error
//! mass a mixed concept strategy can guarantee against the worst example.
//!
//! Two solvers are provided: an exact one over rationals (duality gap
//! exactly zero) and an iterative multiplicative-weights self-play solver
//! whose returned strategies carry an exactly-certified duality gap.

mod simplex;
pub mod sparsify;

pub use sparsify::{dual_eps_approx, eps_net, pointwise_approx, EpsNetOutcome, SearchReport};

use std::path::Path;

use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::bits::Bits;
use crate::concepts::{ConceptClass, LabeledExample};
use crate::{rat_int, Error, Rat, Result};

/// Binary payoff matrix. Row strategies minimize, column strategies maximize.
#[derive(Clone, PartialEq, Eq)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    /// One bit row per row player action.
    data: Vec<Bits>,
}

impl GameMatrix {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::InvalidParameter(
                "game matrix dimensions must be >= 1".into(),
            ));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::RaggedRows {
                expected: c,
                got: rows.iter().find(|row| row.len() != c).unwrap().len(),
            });
        }
        Ok(GameMatrix {
            rows: r,
            cols: c,
            data: rows.iter().map(|r| Bits::from_bools(r)).collect(),
        })
    }

    /// Error-indicator game of a class against a set of labeled examples:
    /// entry `(h, (x,y))` is `1[h(x) != y]`.
    pub fn err_game(class: &ConceptClass, examples: &[LabeledExample]) -> Result<Self> {
        let rows: Vec<Vec<bool>> = class
            .concepts()
            .iter()
            .map(|h| examples.iter().map(|e| h.label(e.x) != e.y).collect())
            .collect();
        GameMatrix::new(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::ParseClass {
            line: 0,
            message: "missing matrix header".into(),
        })?;
        let mut parts = header.split_whitespace();
        let (r, c): (usize, usize) = match (
            parts.next().and_then(|s| s.parse().ok()),
            parts.next().and_then(|s| s.parse().ok()),
        ) {
            (Some(r), Some(c)) => (r, c),
            _ => {
                return Err(Error::ParseClass {
                    line: 1,
                    message: "matrix header must be `rows cols`".into(),
                })
            }
        };
        let mut rows = Vec::with_capacity(r);
        for (k, line) in lines.enumerate() {
            let row: Vec<bool> = line
                .chars()
                .filter(|ch| !ch.is_whitespace())
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::ParseClass {
                        line: k + 2,
                        message: format!("unexpected character {other:?}"),
                    }),
                })
                .collect::<Result<_>>()?;
            if row.len() != c {
                return Err(Error::ParseClass {
                    line: k + 2,
                    message: format!("row has {} entries, expected {c}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != r {
            return Err(Error::ParseClass {
                line: 0,
                message: format!("declared {r} rows, found {}", rows.len()),
            });
        }
        GameMatrix::new(rows)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }
}

impl std::fmt::Debug for GameMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "GameMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Finite-support probability vector over one player's actions. Weights are
/// exact rationals summing exactly to 1; zero-weight entries are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedStrategy {
    pub support: Vec<usize>,
    pub weights: Vec<Rat>,
}

impl MixedStrategy {
    pub fn from_dense(weights: &[Rat]) -> Result<Self> {
        let total: Rat = weights.iter().sum();
        if total != rat_int(1) {
            return Err(Error::InvalidParameter(format!(
                "strategy weights sum to {total}, expected 1"
            )));
        }
        if weights.iter().any(|w| w < &Rat::zero()) {
            return Err(Error::InvalidParameter("negative strategy weight".into()));
        }
        let mut support = Vec::new();
        let mut kept = Vec::new();
        for (i, w) in weights.iter().enumerate() {
            if !w.is_zero() {
                support.push(i);
                kept.push(w.clone());
            }
        }
        Ok(MixedStrategy {
            support,
            weights: kept,
        })
    }

    pub fn point_mass(index: usize) -> Self {
        MixedStrategy {
            support: vec![index],
            weights: vec![rat_int(1)],
        }
    }

    pub fn uniform(indices: &[usize]) -> Self {
        let k = indices.len();
        MixedStrategy {
            support: indices.to_vec(),
            weights: vec![Rat::new(1.into(), (k as i64).into()); k],
        }
    }

    /// Probability of the event `pred(action index)`.
    pub fn mass_where(&self, mut pred: impl FnMut(usize) -> bool) -> Rat {
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|(i, _)| pred(**i))
            .map(|(_, w)| w.clone())
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct GameSolution {
    pub value: Rat,
    pub row_strategy: MixedStrategy,
    pub col_strategy: MixedStrategy,
    /// `max_col payoff(row_strategy) - min_row payoff(col_strategy)`;
    /// exactly zero in exact mode.
    pub duality_gap: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolveMode {
    Exact,
    Iterative { tol: f64 },
}

pub const DEFAULT_ITER_CAP: u64 = 1 << 21;

/// Worst-case payoff of a row (minimizer) strategy: `max_j sum_i p_i M_ij`.
pub fn row_strategy_payoff(m: &GameMatrix, p: &MixedStrategy) -> Rat {
    (0..m.cols())
        .map(|j| {
            p.support
                .iter()
                .zip(&p.weights)
                .filter(|(i, _)| m.at(**i, j))
                .map(|(_, w)| w.clone())
                .sum::<Rat>()
        })
        .max()
        .expect("matrix has at least one column")
}

/// Guaranteed payoff of a column (maximizer) strategy: `min_i sum_j q_j M_ij`.
pub fn col_strategy_payoff(m: &GameMatrix, q: &MixedStrategy) -> Rat {
    (0..m.rows())
        .map(|i| {
            q.support
                .iter()
                .zip(&q.weights)
                .filter(|(j, _)| m.at(i, **j))
                .map(|(_, w)| w.clone())
                .sum::<Rat>()
        })
        .min()
        .expect("matrix has at least one row")
}

/// Exact value and optimal strategies via rational-arithmetic linear
/// programming; the duality gap of the returned strategies is exactly zero.
pub fn game_value_exact(m: &GameMatrix) -> Result<GameSolution> {
    let (p, q) = simplex::solve_zero_sum(m);
    let row_strategy = MixedStrategy::from_dense(&p)?;
    let col_strategy = MixedStrategy::from_dense(&q)?;
    let upper = row_strategy_payoff(m, &row_strategy);
    let lower = col_strategy_payoff(m, &col_strategy);
    let gap = &upper - &lower;
    debug_assert!(gap.is_zero(), "exact solver produced nonzero gap {gap}");
    Ok(GameSolution {
        value: lower,
        row_strategy,
        col_strategy,
        duality_gap: gap,
    })
}

/// Multiplicative-weights self-play with certified bounds. The averaged
/// strategies hunt for the equilibrium; periodically the near-active rows
/// and columns are polished through a square linear solve, and any candidate
/// pair is accepted only after its duality gap has been re-certified in
/// exact arithmetic.
pub fn game_value_iterative(m: &GameMatrix, tol: f64, max_iters: u64) -> Result<GameSolution> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let r = m.rows();
    let c = m.cols();
    let mf: Vec<Vec<f64>> = (0..r)
        .map(|i| (0..c).map(|j| f64::from(u8::from(m.at(i, j)))).collect())
        .collect();

    let mut u = vec![1.0f64; r];
    let mut w = vec![1.0f64; c];
    let mut p_sum = vec![0.0f64; r];
    let mut q_sum = vec![0.0f64; c];
    let mut last_loss = vec![0.0f64; r];
    let mut last_gain = vec![0.0f64; c];
    // Optimistic (predictive) updates: each player charges twice the current
    // vector and refunds the previous one, which makes self-play averages
    // converge at roughly 1/t rather than 1/sqrt(t).
    let eta = 0.25f64;

    let mut best_gap = f64::INFINITY;
    let check_every = 512u64;

    for t in 1..=max_iters {
        let su: f64 = u.iter().sum();
        let sw: f64 = w.iter().sum();
        let p: Vec<f64> = u.iter().map(|v| v / su).collect();
        let q: Vec<f64> = w.iter().map(|v| v / sw).collect();
        for i in 0..r {
            p_sum[i] += p[i];
        }
        for j in 0..c {
            q_sum[j] += q[j];
        }
        for i in 0..r {
            let loss: f64 = (0..c).map(|j| mf[i][j] * q[j]).sum();
            u[i] *= (-eta * (2.0 * loss - last_loss[i])).exp();
            last_loss[i] = loss;
        }
        for j in 0..c {
            let gain: f64 = (0..r).map(|i| mf[i][j] * p[i]).sum();
            w[j] *= (eta * (2.0 * gain - last_gain[j])).exp();
            last_gain[j] = gain;
        }
        // Keep the weights normalized; only their ratios matter.
        let (su, sw) = (u.iter().sum::<f64>(), w.iter().sum::<f64>());
        u.iter_mut().for_each(|v| *v /= su);
        w.iter_mut().for_each(|v| *v /= sw);

        if t % check_every == 0 || t == max_iters {
            let inv = 1.0 / t as f64;
            let p_avg: Vec<f64> = p_sum.iter().map(|v| v * inv).collect();
            let q_avg: Vec<f64> = q_sum.iter().map(|v| v * inv).collect();
            let (ub, lb) = float_bounds(&mf, &p_avg, &q_avg);
            best_gap = best_gap.min(ub - lb);
            for (cand_p, cand_q) in polish_candidates(&mf, &p_avg, &q_avg, ub, lb, tol) {
                if let Some(sol) = certify(m, &cand_p, &cand_q, tol) {
                    return Ok(sol);
                }
            }
            if ub - lb <= tol * 0.5 {
                if let Some(sol) = certify(m, &p_avg, &q_avg, tol) {
                    return Ok(sol);
                }
            }
        }
    }
    Err(Error::ToleranceNotReached {
        tol,
        achieved: best_gap,
        iterations: max_iters,
    })
}

pub fn game_value(m: &GameMatrix, mode: SolveMode) -> Result<GameSolution> {
    match mode {
        SolveMode::Exact => game_value_exact(m),
        SolveMode::Iterative { tol } => game_value_iterative(m, tol, DEFAULT_ITER_CAP),
    }
}

fn float_bounds(mf: &[Vec<f64>], p: &[f64], q: &[f64]) -> (f64, f64) {
    let r = mf.len();
    let c = mf[0].len();
    let ub = (0..c)
        .map(|j| (0..r).map(|i| p[i] * mf[i][j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let lb = (0..r)
        .map(|i| (0..c).map(|j| q[j] * mf[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    (ub, lb)
}

/// Candidate equilibrium supports: a bounded kernel hunt over small square
/// subsets of the rows near-best against the average column strategy and the
/// columns near-best against the average row strategy. Candidates are
/// float-prefiltered; the caller certifies survivors exactly.
fn polish_candidates(
    mf: &[Vec<f64>],
    p_avg: &[f64],
    q_avg: &[f64],
    ub: f64,
    lb: f64,
    tol: f64,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    const MAX_CANDIDATE_ACTIONS: usize = 10;
    const MAX_SOLVES: u32 = 4000;

    let r = mf.len();
    let c = mf[0].len();
    let row_payoff: Vec<f64> = (0..r)
        .map(|i| (0..c).map(|j| mf[i][j] * q_avg[j]).sum())
        .collect();
    let col_payoff: Vec<f64> = (0..c)
        .map(|j| (0..r).map(|i| mf[i][j] * p_avg[i]).sum())
        .collect();
    let mut out = Vec::new();
    let mut solves = 0u32;
    for delta in [1e-6, 1e-3, 1e-2, 2.0 * (ub - lb) + 1e-12, 0.08] {
        let mut rows: Vec<usize> = (0..r).filter(|&i| row_payoff[i] <= lb + delta).collect();
        let mut cols: Vec<usize> = (0..c).filter(|&j| col_payoff[j] >= ub - delta).collect();
        if rows.is_empty() || cols.is_empty() {
            continue;
        }
        // Order by closeness to tight so truncation keeps the likeliest actives.
        rows.sort_by(|&a, &b| row_payoff[a].total_cmp(&row_payoff[b]));
        cols.sort_by(|&a, &b| col_payoff[b].total_cmp(&col_payoff[a]));
        rows.truncate(MAX_CANDIDATE_ACTIONS);
        cols.truncate(MAX_CANDIDATE_ACTIONS);
        for k in 1..=rows.len().min(cols.len()) {
            for rk in subsets_of(&rows, k) {
                for ck in subsets_of(&cols, k) {
                    solves += 1;
                    if solves > MAX_SOLVES {
                        return out;
                    }
                    if let Some((p, q)) = solve_square(mf, &rk, &ck) {
                        let (cu, cl) = float_bounds(mf, &p, &q);
                        if cu - cl <= (tol * 0.5).max(1e-9) {
                            out.push((p, q));
                            if out.len() >= 8 {
                                return out;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        out.push(comb.iter().map(|&i| items[i]).collect());
        let mut i = k;
        let mut done = false;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if comb[i] != i + n - k {
                comb[i] += 1;
                for j in i + 1..k {
                    comb[j] = comb[j - 1] + 1;
                }
                break;
            }
        }
        if done {
            break;
        }
    }
    out
}

/// Solve for strategies making the selected opponent actions indifferent:
/// `sum_{i in R} p_i M_ij = v` for `j in C` plus normalization, and the
/// symmetric system for `q`. Returns dense (full-length) strategies.
#[allow(clippy::needless_range_loop)]
fn solve_square(mf: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
    let k = rows.len();
    // p over `rows` and v: columns in `cols` tie at v; weights sum to 1.
    let mut a = vec![vec![0.0f64; k + 1]; k + 1];
    let mut b = vec![0.0f64; k + 1];
    for (eq, &j) in cols.iter().enumerate() {
        for (t, &i) in rows.iter().enumerate() {
            a[eq][t] = mf[i][j];
        }
        a[eq][k] = -1.0;
    }
    for t in 0..k {
        a[k][t] = 1.0;
    }
    b[k] = 1.0;
    let px = gauss(&mut a, &mut b)?;

    let mut a = vec![vec![0.0f64; k + 1]; k + 1];
    let mut b = vec![0.0f64; k + 1];
    for (eq, &i) in rows.iter().enumerate() {
        for (t, &j) in cols.iter().enumerate() {
            a[eq][t] = mf[i][j];
        }
        a[eq][k] = -1.0;
    }
    for t in 0..k {
        a[k][t] = 1.0;
    }
    b[k] = 1.0;
    let qx = gauss(&mut a, &mut b)?;

    let r = mf.len();
    let c = mf[0].len();
    let mut p = vec![0.0; r];
    for (t, &i) in rows.iter().enumerate() {
        if px[t] < -1e-9 {
            return None;
        }
        p[i] = px[t].max(0.0);
    }
    let mut q = vec![0.0; c];
    for (t, &j) in cols.iter().enumerate() {
        if qx[t] < -1e-9 {
            return None;
        }
        q[j] = qx[t].max(0.0);
    }
    Some((p, q))
}

#[allow(clippy::needless_range_loop)]
fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Turn float strategies into exact rationals, renormalize, and accept only
/// if the exactly-computed duality gap meets the tolerance.
fn certify(m: &GameMatrix, p: &[f64], q: &[f64], tol: f64) -> Option<GameSolution> {
    let to_rat = |v: &[f64]| -> Option<Vec<Rat>> {
        let raw: Vec<Rat> = v
            .iter()
            .map(|&x| Rat::from_f64(x.max(0.0)))
            .collect::<Option<_>>()?;
        let total: Rat = raw.iter().sum();
        if total.is_zero() {
            return None;
        }
        Some(raw.into_iter().map(|x| x / &total).collect())
    };
    let p = to_rat(p)?;
    let q = to_rat(q)?;
    let row_strategy = MixedStrategy::from_dense(&p).ok()?;
    let col_strategy = MixedStrategy::from_dense(&q).ok()?;
    let upper = row_strategy_payoff(m, &row_strategy);
    let lower = col_strategy_payoff(m, &col_strategy);
    let gap = &upper - &lower;
    if gap.to_f64()? <= tol {
        let value = (&upper + &lower) / rat_int(2);
        Some(GameSolution {
            value,
            row_strategy,
            col_strategy,
            duality_gap: gap,
        })
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Triangular dimension

/// Size of the largest `k x k` submatrix that, under some ordering of the
/// selected rows and columns, has the pattern `1[s <= t]` (ones on and above
/// the diagonal). Depth-first extension: the next row must be 0 on every
/// selected column, and the next column must be 1 on every selected row and
/// on the new row.
pub fn triangular_dim(m: &GameMatrix) -> usize {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    let mut best = 0;
    extend_triangular(m, &rows, &cols, 0, &mut best);
    best
}

fn extend_triangular(
    m: &GameMatrix,
    row_cand: &[usize],
    col_cand: &[usize],
    depth: usize,
    best: &mut usize,
) {
    if depth > *best {
        *best = depth;
    }
    if depth + row_cand.len().min(col_cand.len()) <= *best {
        return;
    }
    for &i in row_cand {
        let cols_ok: Vec<usize> = col_cand.iter().copied().filter(|&j| m.at(i, j)).collect();
        if cols_ok.is_empty() {
            continue;
        }
        // Rows usable after picking row i: still unpicked and 0 on i's columns
        // is checked later; here only the new column needs selecting.
        for &j in &cols_ok {
            let rows2: Vec<usize> = row_cand
                .iter()
                .copied()
                .filter(|&i2| i2 != i && !m.at(i2, j))
                .collect();
            let cols2: Vec<usize> = cols_ok.iter().copied().filter(|&j2| j2 != j).collect();
            extend_triangular(m, &rows2, &cols2, depth + 1, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn upper_triangular(k: usize) -> GameMatrix {
        GameMatrix::new(
            (0..k)
                .map(|i| (0..k).map(|j| i <= j).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn exact_values() {
        let sol = game_value_exact(&upper_triangular(3)).unwrap();
        assert_eq!(sol.value, rat_int(1));
        assert!(sol.duality_gap.is_zero());

        let diag = GameMatrix::new(vec![vec![true, false], vec![false, true]]).unwrap();
        let sol = game_value_exact(&diag).unwrap();
        assert_eq!(sol.value, rat(1, 2));
        assert!(sol.duality_gap.is_zero());

        let zero = GameMatrix::new(vec![vec![false]]).unwrap();
        assert_eq!(game_value_exact(&zero).unwrap().value, rat_int(0));

        let id3 = GameMatrix::new(
            (0..3)
                .map(|i| (0..3).map(|j| i == j).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(game_value_exact(&id3).unwrap().value, rat(1, 3));
    }

    #[test]
    fn iterative_matches_exact() {
        let m = GameMatrix::new(vec![
            vec![true, false, true],
            vec![false, true, false],
            vec![true, true, false],
        ])
        .unwrap();
        let exact = game_value_exact(&m).unwrap();
        let iter = game_value_iterative(&m, 1e-4, DEFAULT_ITER_CAP).unwrap();
        let diff = (&exact.value - &iter.value).to_f64().unwrap().abs();
        assert!(iter.duality_gap.to_f64().unwrap() <= 1e-4);
        assert!(diff <= 1e-4);
    }

    #[test]
    fn triangular_dims() {
        for k in 1..=5 {
            assert_eq!(triangular_dim(&upper_triangular(k)), k);
        }
        let ones = GameMatrix::new(vec![vec![true; 3]; 3]).unwrap();
        assert_eq!(triangular_dim(&ones), 1);
        let zeros = GameMatrix::new(vec![vec![false; 3]; 3]).unwrap();
        assert_eq!(triangular_dim(&zeros), 0);
    }

    #[test]
    fn matrix_parse_round_trip() {
        let m = GameMatrix::parse("# comment\n2 3\n101\n010\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        assert!(m.at(0, 0) && !m.at(0, 1) && m.at(1, 1));
        assert!(GameMatrix::parse("2 3\n101\n").is_err());
        assert!(GameMatrix::parse("1 1\n2\n").is_err());
    }
}
