//! Staged non-greedy beam search for joint shortening/puncturing patterns.
//!
//! Stage `t` extends every surviving pattern of stage `t-1` by one shortened
//! information column and one punctured column, scores each extension by its
//! PEXIT threshold, and keeps the `beam` best. After `T` stages every
//! survivor is a `{T;T}` pattern whose prefixes are the earlier-stage
//! survivors it descends from.
//!
//! Ranking is by `(threshold, parent rank, s, p)` so the outcome does not
//! depend on evaluation order. A candidate that fails to converge at the
//! current worst beam threshold cannot enter the beam and is not bisected.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pexit::{self, ThresholdQuery};
use crate::protograph::BaseMatrix;
use crate::pruning::PruningPattern;

/// Candidates scored between beam-cutoff refreshes.
const CHUNK: usize = 32;

pub const DEFAULT_BEAM: usize = 8;

/// PEXIT settings applied to every candidate query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PexitSettings {
    pub lower_db: f64,
    pub upper_db: f64,
    pub resolution_db: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl Default for PexitSettings {
    fn default() -> Self {
        PexitSettings {
            lower_db: pexit::DEFAULT_LOWER_DB,
            upper_db: pexit::DEFAULT_UPPER_DB,
            resolution_db: pexit::DEFAULT_RESOLUTION_DB,
            epsilon: pexit::DEFAULT_EPSILON,
            max_iterations: pexit::DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl PexitSettings {
    fn query(&self, bm: &BaseMatrix, pattern: &PruningPattern) -> Result<ThresholdQuery> {
        let mut q = ThresholdQuery::for_pattern(bm, pattern)?;
        q.lower_db = self.lower_db;
        q.upper_db = self.upper_db;
        q.resolution_db = self.resolution_db;
        q.epsilon = self.epsilon;
        q.max_iterations = self.max_iterations;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Number of stages `T` (final pattern is `{T;T}`).
    pub stages: usize,
    /// Beam width.
    pub beam: usize,
    pub pexit: PexitSettings,
}

impl SearchConfig {
    pub fn new(stages: usize, beam: usize) -> Self {
        SearchConfig {
            stages,
            beam,
            pexit: PexitSettings::default(),
        }
    }

    pub fn validate(&self, bm: &BaseMatrix) -> Result<()> {
        let (n, m, k, t) = (bm.cols(), bm.rows(), bm.info_cols(), self.stages);
        if t == 0 || self.beam == 0 {
            return Err(Error::SearchInfeasible(
                "stages and beam width must be at least 1".into(),
            ));
        }
        if 2 * t > n || t >= k || t >= m {
            return Err(Error::SearchInfeasible(format!(
                "{t} stages need 2T <= n, T < k, T < m (n={n}, k={k}, m={m})"
            )));
        }
        Ok(())
    }
}

/// One (shorten, puncture) extension awaiting evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    /// Rank of the parent in the previous stage's beam; `None` at stage 1.
    pub parent: Option<usize>,
    pub shorten: usize,
    pub puncture: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamEntry {
    pub stage: usize,
    pub shorten: usize,
    pub puncture: usize,
    pub threshold_db: f64,
    pub parent: Option<usize>,
    /// Accumulated `{t;t}` pattern.
    pub pattern: PruningPattern,
}

impl BeamEntry {
    fn rank_cmp(&self, other: &Self) -> Ordering {
        self.threshold_db
            .total_cmp(&other.threshold_db)
            .then(self.parent.cmp(&other.parent))
            .then(self.shorten.cmp(&other.shorten))
            .then(self.puncture.cmp(&other.puncture))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageStats {
    /// Size of the candidate set.
    pub candidates: usize,
    /// Candidates whose threshold was bisected in full.
    pub bisected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Surviving beam after each stage, best first.
    pub beams: Vec<Vec<BeamEntry>>,
    pub stats: Vec<StageStats>,
}

impl SearchOutcome {
    /// Final `{T;T}` patterns, best first, rebuilt by walking parent links.
    pub fn final_patterns(&self) -> Vec<(PruningPattern, f64)> {
        let Some(last) = self.beams.last() else {
            return Vec::new();
        };
        (0..last.len())
            .map(|i| (self.trace(i), last[i].threshold_db))
            .collect()
    }

    /// Pattern of final-beam entry `rank`, following parent links back to
    /// stage 1.
    pub fn trace(&self, rank: usize) -> PruningPattern {
        let mut pairs = Vec::with_capacity(self.beams.len());
        let mut idx = Some(rank);
        for beam in self.beams.iter().rev() {
            let e = &beam[idx.expect("parent link present below stage 1")];
            pairs.push((e.shorten, e.puncture));
            idx = e.parent;
        }
        pairs.reverse();
        PruningPattern::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    /// The best final pattern and its threshold.
    pub fn recommended(&self) -> Option<(PruningPattern, f64)> {
        self.final_patterns().into_iter().next()
    }

    /// CSV log of every surviving entry: `stage,rank,s,p,threshold_db,parent_rank`
    /// with 1-based ranks and an empty parent at stage 1.
    pub fn stage_log_csv(&self) -> String {
        let mut out = String::from("stage,rank,s,p,threshold_db,parent_rank\n");
        for beam in &self.beams {
            for (rank, e) in beam.iter().enumerate() {
                let parent = e.parent.map(|p| (p + 1).to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:.6},{}",
                    e.stage,
                    rank + 1,
                    e.shorten,
                    e.puncture,
                    e.threshold_db,
                    parent
                );
            }
        }
        out
    }
}

/// All stage-1 pairs: `s` over the `k` information columns, `p` over the
/// other `n - 1` columns, ordered by `(s, p)`.
pub fn stage1_candidates(bm: &BaseMatrix) -> Vec<(usize, usize)> {
    let (n, k) = (bm.cols(), bm.info_cols());
    (1..=k)
        .flat_map(|s| (1..=n).filter(move |&p| p != s).map(move |p| (s, p)))
        .collect()
}

/// Extensions of every beam entry by one unused information column and one
/// further unused column.
pub fn stage_candidates(beam: &[BeamEntry], bm: &BaseMatrix) -> Result<Vec<Candidate>> {
    if beam.is_empty() {
        return Err(Error::SearchInfeasible("empty beam".into()));
    }
    let (n, k) = (bm.cols(), bm.info_cols());
    let mut out = Vec::new();
    for (rank, parent) in beam.iter().enumerate() {
        let mut used = vec![false; n + 1];
        for &c in parent
            .pattern
            .shorten
            .iter()
            .chain(&parent.pattern.puncture)
        {
            used[c] = true;
        }
        for s in (1..=k).filter(|&s| !used[s]) {
            for p in (1..=n).filter(|&p| !used[p] && p != s) {
                out.push(Candidate {
                    parent: Some(rank),
                    shorten: s,
                    puncture: p,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::SearchInfeasible(
            "no legal column pairs remain".into(),
        ));
    }
    Ok(out)
}

fn extend(base: &PruningPattern, s: usize, p: usize) -> PruningPattern {
    let mut pat = base.clone();
    pat.shorten.push(s);
    pat.puncture.push(p);
    pat
}

/// Scores `candidates` and keeps the best `width` of them.
fn select(
    bm: &BaseMatrix,
    cfg: &SearchConfig,
    stage: usize,
    parents: &[BeamEntry],
    candidates: &[Candidate],
) -> Result<(Vec<BeamEntry>, StageStats)> {
    let empty = PruningPattern::default();
    let mut beam: Vec<BeamEntry> = Vec::with_capacity(cfg.beam + CHUNK);
    let mut stats = StageStats {
        candidates: candidates.len(),
        bisected: 0,
    };
    for chunk in candidates.chunks(CHUNK) {
        let cutoff = (beam.len() == cfg.beam).then(|| beam[cfg.beam - 1].threshold_db);
        let scored: Vec<Option<BeamEntry>> = chunk
            .par_iter()
            .map(|c| -> Result<Option<BeamEntry>> {
                let parent_pattern = c.parent.map_or(&empty, |r| &parents[r].pattern);
                let pattern = extend(parent_pattern, c.shorten, c.puncture);
                let query = cfg.pexit.query(bm, &pattern)?;
                if let Some(cut) = cutoff.filter(|c| c.is_finite()) {
                    if !pexit::converges(&query, cut).converged {
                        return Ok(None);
                    }
                }
                let th = pexit::threshold(&query)?;
                Ok(Some(BeamEntry {
                    stage,
                    shorten: c.shorten,
                    puncture: c.puncture,
                    threshold_db: th.db,
                    parent: c.parent,
                    pattern,
                }))
            })
            .collect::<Result<_>>()?;
        for e in scored.into_iter().flatten() {
            stats.bisected += 1;
            beam.push(e);
        }
        beam.sort_by(BeamEntry::rank_cmp);
        beam.truncate(cfg.beam);
    }
    if beam.iter().all(|e| !e.threshold_db.is_finite()) {
        return Err(Error::SearchInfeasible(format!(
            "no candidate converges at stage {stage}"
        )));
    }
    Ok((beam, stats))
}

/// Runs all `T` stages.
pub fn run_search(bm: &BaseMatrix, cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate(bm)?;
    let mut beams: Vec<Vec<BeamEntry>> = Vec::with_capacity(cfg.stages);
    let mut stats = Vec::with_capacity(cfg.stages);
    for stage in 1..=cfg.stages {
        let candidates: Vec<Candidate> = match beams.last() {
            None => stage1_candidates(bm)
                .into_iter()
                .map(|(s, p)| Candidate {
                    parent: None,
                    shorten: s,
                    puncture: p,
                })
                .collect(),
            Some(prev) => stage_candidates(prev, bm)?,
        };
        let parents: &[BeamEntry] = beams.last().map_or(&[], |b| b.as_slice());
        let (beam, st) = select(bm, cfg, stage, parents, &candidates)?;
        beams.push(beam);
        stats.push(st);
    }
    Ok(SearchOutcome { beams, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard;

    /// Small code that keeps searches fast: n=8, m=4, k=4.
    fn small() -> BaseMatrix {
        "8 4 1\n\
         0 0 -1 0 0 0 -1 -1\n\
         0 -1 0 0 -1 0 0 -1\n\
         -1 0 0 0 -1 -1 0 0\n\
         0 0 0 -1 0 -1 -1 0\n"
            .parse()
            .unwrap()
    }

    #[test]
    fn stage1_counts() {
        let bm = standard::ieee80211n_r12();
        let c = stage1_candidates(&bm);
        assert_eq!(c.len(), 12 * 23);
        assert!(c.iter().all(|&(s, p)| s != p && s <= 12));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        let tiny: BaseMatrix = "2 1 1\n0 0\n".parse().unwrap();
        assert_eq!(stage1_candidates(&tiny), vec![(1, 2)]);
    }

    fn entry(pattern: PruningPattern) -> BeamEntry {
        BeamEntry {
            stage: pattern.alpha(),
            shorten: *pattern.shorten.last().unwrap(),
            puncture: *pattern.puncture.last().unwrap(),
            threshold_db: 0.0,
            parent: None,
            pattern,
        }
    }

    #[test]
    fn stage2_counts() {
        let bm = standard::ieee80211n_r12();
        let beam: Vec<BeamEntry> = (0..8)
            .map(|i| entry(PruningPattern::new(vec![i + 1], vec![i + 13])))
            .collect();
        let c = stage_candidates(&beam, &bm).unwrap();
        assert_eq!(c.len(), 8 * 11 * 21);
        for cand in &c {
            let parent = &beam[cand.parent.unwrap()].pattern;
            assert!(!parent.shorten.contains(&cand.shorten));
            assert!(!parent.puncture.contains(&cand.puncture));
            assert!(!parent.shorten.contains(&cand.puncture));
            assert!(!parent.puncture.contains(&cand.shorten));
        }
    }

    #[test]
    fn stage_candidates_minimal() {
        // k_{t-1} = 1 and n_{t-1} = 3 after one stage on a 5-column code
        let bm: BaseMatrix = "5 3 1\n0 0 0 -1 -1\n0 -1 0 0 -1\n-1 0 -1 0 0\n"
            .parse()
            .unwrap();
        let beam = vec![entry(PruningPattern::new(vec![1], vec![3]))];
        let c = stage_candidates(&beam, &bm).unwrap();
        assert_eq!(c.len(), 2);
        assert!(stage_candidates(&[], &bm).is_err());
    }

    #[test]
    fn config_feasibility() {
        let bm = small();
        assert!(SearchConfig::new(0, 1).validate(&bm).is_err());
        assert!(SearchConfig::new(1, 0).validate(&bm).is_err());
        assert!(SearchConfig::new(4, 1).validate(&bm).is_err());
        SearchConfig::new(3, 2).validate(&bm).unwrap();
    }

    #[test]
    fn single_stage_matches_brute_force() {
        let bm = small();
        let out = run_search(&bm, &SearchConfig::new(1, 1)).unwrap();
        let mut best: Option<(f64, usize, usize)> = None;
        for (s, p) in stage1_candidates(&bm) {
            let th = pexit::pattern_threshold(&bm, &PruningPattern::new(vec![s], vec![p]))
                .unwrap()
                .db;
            if best.map_or(true, |b| th < b.0) {
                best = Some((th, s, p));
            }
        }
        let (th, s, p) = best.unwrap();
        let (pat, got) = out.recommended().unwrap();
        assert_eq!(got, th);
        assert_eq!(pat, PruningPattern::new(vec![s], vec![p]));
    }

    #[test]
    fn wide_beam_keeps_everything_sorted() {
        let bm = small();
        let all = stage1_candidates(&bm).len();
        let out = run_search(&bm, &SearchConfig::new(1, all + 5)).unwrap();
        let beam = &out.beams[0];
        assert_eq!(beam.len(), all);
        assert!(beam
            .windows(2)
            .all(|w| w[0].rank_cmp(&w[1]) == Ordering::Less));
        assert_eq!(out.stats[0].bisected, all);
    }

    #[test]
    fn multi_stage_invariants() {
        let bm = small();
        let cfg = SearchConfig::new(2, 3);
        let out = run_search(&bm, &cfg).unwrap();
        assert_eq!(out.beams.len(), 2);
        for (t, beam) in out.beams.iter().enumerate() {
            assert!(beam.len() <= 3);
            assert!(beam
                .windows(2)
                .all(|w| w[0].threshold_db <= w[1].threshold_db));
            for e in beam {
                assert_eq!(e.pattern.alpha(), t + 1);
                e.pattern.validate(&bm).unwrap();
            }
        }
        // parent links reproduce the accumulated patterns, and every prefix
        // of a final pattern survived its stage
        for (rank, (pat, _)) in out.final_patterns().iter().enumerate() {
            assert_eq!(pat, &out.beams[1][rank].pattern);
            for t in 1..=1 {
                let prefix = pat.sub_pattern(t, t).unwrap();
                assert!(out.beams[t - 1].iter().any(|e| e.pattern == prefix));
            }
        }
        let again = run_search(&bm, &cfg).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn stage_log_format() {
        let bm = small();
        let out = run_search(&bm, &SearchConfig::new(2, 2)).unwrap();
        let log = out.stage_log_csv();
        let lines: Vec<&str> = log.lines().collect();
        assert_eq!(lines[0], "stage,rank,s,p,threshold_db,parent_rank");
        assert_eq!(lines.len(), 1 + 2 + 2);
        assert!(lines[1].starts_with("1,1,") && lines[1].ends_with(','));
        assert!(lines[3].starts_with("2,1,"));
    }
}
