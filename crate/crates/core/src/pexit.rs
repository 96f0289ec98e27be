//! Protograph EXIT analysis and decoding-threshold bisection.
//!
//! Mutual information is tracked on every protograph edge. Each iteration
//! runs a variable-to-check update, a check-to-variable update and an APP
//! check per column:
//!
//! ```text
//! I_Ev(i,j) = J( sqrt( sum_{s != i} J^-1(I_Ec(s,j))^2 + J^-1(I_ch(j))^2 ) )
//! I_Ec(i,j) = 1 - J( sqrt( sum_{s != j} J^-1(1 - I_Ev(i,s))^2 ) )
//! I_APP(j)  = J( sqrt( sum_s J^-1(I_Ec(s,j))^2 + J^-1(I_ch(j))^2 ) )
//! ```
//!
//! Shortening is handled by erasing columns before analysis; punctured
//! columns get zero channel information.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::jfunc::{j, j_inv};
use crate::protograph::BaseMatrix;
use crate::pruning::{PrunedMatrix, PruningPattern};

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
pub const DEFAULT_LOWER_DB: f64 = -2.0;
pub const DEFAULT_UPPER_DB: f64 = 12.0;
pub const DEFAULT_RESOLUTION_DB: f64 = 0.001;
/// A run whose largest per-edge change falls below this has reached a fixed
/// point short of 1 and is reported as non-convergent.
pub const DEFAULT_STALL_TOLERANCE: f64 = 1e-12;

/// Channel mutual information of one column for BPSK over AWGN at the
/// given `Eb/N0` and code rate: `J(sigma_ch)` with
/// `sigma_ch^2 = 8 R 10^(ebno/10)`, or zero for a punctured column.
pub fn channel_mi(ebno_db: f64, rate: f64, punctured: bool) -> f64 {
    if punctured {
        0.0
    } else {
        j(channel_sigma(ebno_db, rate))
    }
}

fn channel_sigma(ebno_db: f64, rate: f64) -> f64 {
    (8.0 * rate * 10f64.powf(ebno_db / 10.0)).sqrt()
}

/// How a column's channel observation enters the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnChannel {
    Transmitted,
    /// Not sent: zero channel information.
    Punctured,
    /// Known to the decoder: channel information pinned to 1.
    Known,
}

#[derive(Debug, Clone)]
pub struct ThresholdQuery {
    pub base: BaseMatrix,
    pub channels: Vec<ColumnChannel>,
    pub rate: Ratio<usize>,
    pub lower_db: f64,
    pub upper_db: f64,
    pub resolution_db: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub stall_tolerance: f64,
}

impl ThresholdQuery {
    /// Query with default settings for an already pruned matrix, at its
    /// pruned transmission rate.
    pub fn new(pruned: &PrunedMatrix) -> Self {
        let channels = pruned
            .punctured
            .iter()
            .map(|&p| {
                if p {
                    ColumnChannel::Punctured
                } else {
                    ColumnChannel::Transmitted
                }
            })
            .collect();
        ThresholdQuery {
            base: pruned.base.clone(),
            channels,
            rate: pruned.rate(),
            lower_db: DEFAULT_LOWER_DB,
            upper_db: DEFAULT_UPPER_DB,
            resolution_db: DEFAULT_RESOLUTION_DB,
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            stall_tolerance: DEFAULT_STALL_TOLERANCE,
        }
    }

    pub fn for_pattern(bm: &BaseMatrix, pattern: &PruningPattern) -> Result<Self> {
        Ok(ThresholdQuery::new(&pattern.apply(bm)?))
    }

    pub fn with_rate(mut self, rate: Ratio<usize>) -> Self {
        self.rate = rate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if *self.rate.numer() == 0 || self.rate.numer() >= self.rate.denom() {
            return Err(Error::InvalidQuery(format!(
                "rate {} outside (0, 1)",
                self.rate
            )));
        }
        if !(self.lower_db < self.upper_db) {
            return Err(Error::InvalidQuery(format!(
                "bracket [{}, {}] is empty",
                self.lower_db, self.upper_db
            )));
        }
        if self.channels.len() != self.base.cols() {
            return Err(Error::LengthMismatch {
                expected: self.base.cols(),
                got: self.channels.len(),
            });
        }
        if !(self.resolution_db > 0.0) || !(self.epsilon > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidQuery("non-positive tolerance or cap".into()));
        }
        Ok(())
    }

    fn rate_f64(&self) -> f64 {
        *self.rate.numer() as f64 / *self.rate.denom() as f64
    }
}

/// Edge-wise mutual information for one protograph at one channel point.
#[derive(Debug, Clone)]
pub struct PexitState {
    /// `(row, col)` of every edge, row-major.
    edges: Vec<(usize, usize)>,
    col_edges: Vec<Vec<usize>>,
    row_edges: Vec<Vec<usize>>,
    pub variable_to_check: Vec<f64>,
    pub check_to_variable: Vec<f64>,
    pub channel: Vec<f64>,
    channel_sq: Vec<f64>,
    scratch: Vec<f64>,
    pub iterations: usize,
}

impl PexitState {
    pub fn new(base: &BaseMatrix, channel: Vec<f64>) -> Self {
        let mut edges = Vec::with_capacity(base.edge_count());
        let mut col_edges = vec![Vec::new(); base.cols()];
        let mut row_edges = vec![Vec::new(); base.rows()];
        for i in 0..base.rows() {
            for jcol in 0..base.cols() {
                if base.is_edge(i, jcol) {
                    col_edges[jcol].push(edges.len());
                    row_edges[i].push(edges.len());
                    edges.push((i, jcol));
                }
            }
        }
        let channel_sq = channel.iter().map(|&c| j_inv(c).powi(2)).collect();
        let e = edges.len();
        PexitState {
            edges,
            col_edges,
            row_edges,
            variable_to_check: vec![0.0; e],
            check_to_variable: vec![0.0; e],
            channel,
            channel_sq,
            scratch: vec![0.0; e],
            iterations: 0,
        }
    }

    /// `(row, col)` of every edge in storage order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// One full iteration. Returns the largest change of any check-to-variable
    /// value.
    pub fn step(&mut self) -> f64 {
        // variable -> check
        for e in 0..self.edges.len() {
            self.scratch[e] = j_inv(self.check_to_variable[e]).powi(2);
        }
        for (col, list) in self.col_edges.iter().enumerate() {
            let total: f64 =
                self.channel_sq[col] + list.iter().map(|&e| self.scratch[e]).sum::<f64>();
            for &e in list {
                self.variable_to_check[e] = j((total - self.scratch[e]).max(0.0).sqrt());
            }
        }
        // check -> variable
        for e in 0..self.edges.len() {
            self.scratch[e] = j_inv(1.0 - self.variable_to_check[e]).powi(2);
        }
        let mut delta = 0.0f64;
        for list in &self.row_edges {
            let total: f64 = list.iter().map(|&e| self.scratch[e]).sum();
            for &e in list {
                let v = 1.0 - j((total - self.scratch[e]).max(0.0).sqrt());
                delta = delta.max((v - self.check_to_variable[e]).abs());
                self.check_to_variable[e] = v;
            }
        }
        self.iterations += 1;
        delta
    }

    /// A-posteriori mutual information of each column.
    pub fn app(&self) -> Vec<f64> {
        (0..self.col_edges.len()).map(|c| self.app_of(c)).collect()
    }

    fn app_of(&self, col: usize) -> f64 {
        let s: f64 = self.col_edges[col]
            .iter()
            .map(|&e| j_inv(self.check_to_variable[e]).powi(2))
            .sum();
        j((s + self.channel_sq[col]).sqrt())
    }

    fn all_above(&self, level: f64) -> bool {
        (0..self.col_edges.len()).all(|c| self.app_of(c) >= level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: usize,
}

/// Runs the EXIT recursion at one `Eb/N0` and reports whether every column's
/// APP information reaches `1 - epsilon` within the iteration cap.
pub fn converges(query: &ThresholdQuery, ebno_db: f64) -> Convergence {
    let rate = query.rate_f64();
    let channel = query
        .channels
        .iter()
        .map(|c| match c {
            ColumnChannel::Transmitted => channel_mi(ebno_db, rate, false),
            ColumnChannel::Punctured => 0.0,
            ColumnChannel::Known => 1.0,
        })
        .collect();
    let mut state = PexitState::new(&query.base, channel);
    let target = 1.0 - query.epsilon;
    while state.iterations < query.max_iterations {
        let delta = state.step();
        if state.all_above(target) {
            return Convergence {
                converged: true,
                iterations: state.iterations,
            };
        }
        if delta < query.stall_tolerance {
            break;
        }
    }
    Convergence {
        converged: false,
        iterations: state.iterations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Upper end of the final bisection bracket; `+inf` when the upper
    /// bracket end does not converge.
    pub db: f64,
    /// Iterations used by the converging run at `db`.
    pub iterations: usize,
}

impl Threshold {
    pub fn is_finite(&self) -> bool {
        self.db.is_finite()
    }
}

/// Bisects `Eb/N0` for the smallest converging value.
pub fn threshold(query: &ThresholdQuery) -> Result<Threshold> {
    query.validate()?;
    if converges(query, query.lower_db).converged {
        return Err(Error::BracketTooHigh(query.lower_db));
    }
    let top = converges(query, query.upper_db);
    if !top.converged {
        return Ok(Threshold {
            db: f64::INFINITY,
            iterations: top.iterations,
        });
    }
    let (mut lo, mut hi, mut iters) = (query.lower_db, query.upper_db, top.iterations);
    while hi - lo > query.resolution_db {
        let mid = 0.5 * (lo + hi);
        let c = converges(query, mid);
        if c.converged {
            hi = mid;
            iters = c.iterations;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold {
        db: hi,
        iterations: iters,
    })
}

/// Threshold of `bm` pruned by `pattern`, at the pruned rate.
pub fn pattern_threshold(bm: &BaseMatrix, pattern: &PruningPattern) -> Result<Threshold> {
    threshold(&ThresholdQuery::for_pattern(bm, pattern)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard;

    fn unpruned(bm: &BaseMatrix) -> ThresholdQuery {
        ThresholdQuery::for_pattern(bm, &PruningPattern::default()).unwrap()
    }

    #[test]
    fn channel_mi_cases() {
        assert_eq!(channel_mi(3.0, 0.5, true), 0.0);
        assert!(1.0 - channel_mi(40.0, 0.5, false) < 1e-6);
        assert_eq!(channel_mi(0.0, 0.5, false), j(2.0));
    }

    #[test]
    fn r12_converges_above_and_not_below() {
        let q = unpruned(&standard::ieee80211n_r12());
        assert!(converges(&q, 1.0).converged);
        assert!(!converges(&q, 0.3).converged);
    }

    #[test]
    fn unrecoverable_puncture_never_converges() {
        // columns 2 and 3 are degree one on the same check; with both
        // punctured neither ever receives information
        let bm: BaseMatrix = "5 3 1\n0 0 0 -1 -1\n0 -1 -1 0 -1\n0 -1 -1 -1 0\n"
            .parse()
            .unwrap();
        let p = PruningPattern::new(vec![], vec![2, 3]);
        let q = ThresholdQuery::for_pattern(&bm, &p).unwrap();
        for db in [0.0, 5.0, 12.0, 30.0] {
            assert!(!converges(&q, db).converged, "{db} dB");
        }
        assert_eq!(threshold(&q).unwrap().db, f64::INFINITY);
    }

    #[test]
    fn bracket_errors() {
        let mut q = unpruned(&standard::ieee80211n_r12());
        q.lower_db = 5.0;
        assert_eq!(threshold(&q), Err(Error::BracketTooHigh(5.0)));
        q.lower_db = 13.0;
        assert!(matches!(threshold(&q), Err(Error::InvalidQuery(_))));
        let q = unpruned(&standard::ieee80211n_r12()).with_rate(Ratio::new(1, 1));
        assert!(threshold(&q).is_err());
    }

    #[test]
    fn threshold_is_deterministic() {
        let q = unpruned(&standard::ieee80216e_r12(96));
        assert_eq!(threshold(&q).unwrap(), threshold(&q).unwrap());
    }

    #[test]
    fn shift_values_do_not_matter() {
        let a = standard::ieee80216e_r12(96);
        let b = standard::ieee80216e_r12(40);
        let c = standard::ieee80216e_r12(27);
        let ta = threshold(&unpruned(&a)).unwrap();
        assert_eq!(ta, threshold(&unpruned(&b)).unwrap());
        assert_eq!(ta, threshold(&unpruned(&c)).unwrap());
    }

    #[test]
    fn erasure_equals_known_column() {
        let bm = standard::ieee80211n_r23();
        for col in [1usize, 6, 11] {
            let pattern = PruningPattern::new(vec![col], vec![]);
            let erased = ThresholdQuery::for_pattern(&bm, &pattern).unwrap();
            let mut pinned = unpruned(&bm).with_rate(erased.rate);
            pinned.channels[col - 1] = ColumnChannel::Known;
            let a = threshold(&erased).unwrap().db;
            let b = threshold(&pinned).unwrap().db;
            assert!((a - b).abs() <= 0.002, "column {col}: {a} vs {b}");
        }
    }

    #[test]
    fn convergence_is_monotone_in_ebno() {
        let bm = standard::ieee80211n_r12();
        let q = ThresholdQuery::for_pattern(&bm, &standard::patterns::std_11n_r12()).unwrap();
        let grid: Vec<bool> = (0..60)
            .map(|i| converges(&q, -0.5 + i as f64 * 0.05).converged)
            .collect();
        let first = grid.iter().position(|&c| c).expect("converges somewhere");
        assert!(grid[first..].iter().all(|&c| c), "{grid:?}");
    }

    #[test]
    fn state_values_stay_in_unit_interval() {
        let bm = standard::ieee80211n_r12();
        let q = unpruned(&bm);
        let ch = vec![channel_mi(0.5, 0.5, false); bm.cols()];
        let mut s = PexitState::new(&q.base, ch);
        let mut prev = s.check_to_variable.clone();
        for _ in 0..50 {
            s.step();
            for (e, (&v, &p)) in s.check_to_variable.iter().zip(&prev).enumerate() {
                assert!((0.0..=1.0).contains(&v));
                assert!(v + 1e-12 >= p, "edge {e} decreased");
            }
            prev = s.check_to_variable.clone();
        }
        assert_eq!(s.edges().len(), bm.edge_count());
        assert!(s.app().iter().all(|a| (0.0..=1.0).contains(a)));
    }
}
