//! Shortening and puncturing patterns over base-matrix columns.
//!
//! A pattern `{s_1..s_a; p_1..p_b}` lists the columns to shorten and to
//! puncture, in priority order. Prefixes of a pattern are again patterns, which
//! is what makes one optimized pattern usable across many rates.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protograph::BaseMatrix;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PruningPattern {
    pub shorten: Vec<usize>,
    pub puncture: Vec<usize>,
}

impl PruningPattern {
    pub fn new(shorten: Vec<usize>, puncture: Vec<usize>) -> Self {
        PruningPattern { shorten, puncture }
    }

    /// Number of shortened columns.
    pub fn alpha(&self) -> usize {
        self.shorten.len()
    }

    /// Number of punctured columns.
    pub fn beta(&self) -> usize {
        self.puncture.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shorten.is_empty() && self.puncture.is_empty()
    }

    /// Checks the pattern against a base matrix: indices in range, disjoint
    /// lists without repeats, shortening restricted to information columns,
    /// and fewer punctured columns than check rows.
    pub fn validate(&self, bm: &BaseMatrix) -> Result<()> {
        let n = bm.cols();
        let mut seen = vec![false; n + 1];
        for &c in self.shorten.iter().chain(&self.puncture) {
            if c == 0 || c > n {
                return Err(Error::ColumnOutOfRange { index: c, n });
            }
            if seen[c] {
                return Err(Error::InvalidPattern(format!(
                    "column {c} appears more than once"
                )));
            }
            seen[c] = true;
        }
        if let Some(&c) = self.shorten.iter().find(|&&c| c > bm.info_cols()) {
            return Err(Error::InvalidPattern(format!(
                "column {c} is a parity column and cannot be shortened (k={})",
                bm.info_cols()
            )));
        }
        if self.alpha() >= bm.info_cols() {
            return Err(Error::InvalidPattern(format!(
                "shortening {} of {} information columns leaves nothing to send",
                self.alpha(),
                bm.info_cols()
            )));
        }
        if self.beta() >= bm.rows() {
            return Err(Error::InvalidPattern(format!(
                "puncturing {} columns needs beta < m = {}",
                self.beta(),
                bm.rows()
            )));
        }
        Ok(())
    }

    /// The prefix pattern made of the first `alpha` shortened and the first
    /// `beta` punctured columns.
    pub fn sub_pattern(&self, alpha: usize, beta: usize) -> Result<Self> {
        if alpha > self.alpha() || beta > self.beta() {
            return Err(Error::PatternTooShort {
                needed: alpha.max(beta),
                available: if alpha > self.alpha() {
                    self.alpha()
                } else {
                    self.beta()
                },
            });
        }
        Ok(PruningPattern {
            shorten: self.shorten[..alpha].to_vec(),
            puncture: self.puncture[..beta].to_vec(),
        })
    }

    /// Erases the shortened columns and marks the punctured ones.
    pub fn apply(&self, bm: &BaseMatrix) -> Result<PrunedMatrix> {
        self.validate(bm)?;
        let base = bm.erase_columns(&self.shorten)?;
        let mut punctured = vec![false; base.cols()];
        for &p in &self.puncture {
            // index shift: number of erased columns before p
            let shift = self.shorten.iter().filter(|&&s| s < p).count();
            punctured[p - 1 - shift] = true;
        }
        Ok(PrunedMatrix {
            base,
            punctured,
            alpha: self.alpha(),
            beta: self.beta(),
        })
    }

    /// Parses an inline comma-separated column list such as `1,2,8,10`.
    /// An empty string gives an empty list.
    pub fn parse_list(text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidPattern(format!("bad column index {t:?}: {e}")))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pattern serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidPattern(e.to_string()))
    }
}

impl fmt::Display for PruningPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{{{}; {}}}", list(&self.shorten), list(&self.puncture))
    }
}

/// A base matrix with its shortened columns erased and punctured columns
/// flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedMatrix {
    pub base: BaseMatrix,
    /// One flag per surviving column.
    pub punctured: Vec<bool>,
    pub alpha: usize,
    pub beta: usize,
}

impl PrunedMatrix {
    /// `n - alpha - beta`
    pub fn transmitted_cols(&self) -> usize {
        self.base.cols() - self.beta
    }

    /// `k - alpha`
    pub fn info_cols(&self) -> usize {
        self.base.info_cols()
    }

    pub fn rate(&self) -> Ratio<usize> {
        Ratio::new(self.info_cols(), self.transmitted_cols())
    }
}

/// Transmission rate `(k - alpha) / (n - alpha - beta)` of a pruned base matrix.
pub fn pruned_rate(n: usize, k: usize, alpha: usize, beta: usize) -> Result<Ratio<usize>> {
    if alpha > k {
        return Err(Error::InvalidPattern(format!(
            "cannot shorten {alpha} of {k} information columns"
        )));
    }
    let denom = n
        .checked_sub(alpha + beta)
        .filter(|&d| d > 0)
        .ok_or_else(|| {
            Error::InvalidPattern(format!("no columns left ({n} - {alpha} - {beta})"))
        })?;
    Ok(Ratio::new(k - alpha, denom))
}

/// A column that is pruned in its first `bits` positions only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartialColumn {
    /// 1-based base-matrix column.
    pub column: usize,
    pub bits: usize,
}

/// Bit-level realisation of a pattern for `N_s` shortened and `N_p`
/// punctured bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitSchedule {
    pub lift: usize,
    pub full_shorten: Vec<usize>,
    pub partial_shorten: Option<PartialColumn>,
    pub full_puncture: Vec<usize>,
    pub partial_puncture: Option<PartialColumn>,
    pub shortened_bits: usize,
    pub punctured_bits: usize,
    /// Transmitted length `N = nZ - N_s - N_p`.
    pub transmitted: usize,
    /// Unknown information bits `kZ - N_s`.
    pub info_bits: usize,
}

impl BitSchedule {
    /// Spreads `ns` shortened and `np` punctured bits over the pattern's
    /// columns: `ceil(N/Z)` columns are touched, all but the last in full, and
    /// the remainder comes from the leading positions of the last one.
    pub fn new(
        pattern: &PruningPattern,
        n: usize,
        k: usize,
        lift: usize,
        ns: usize,
        np: usize,
    ) -> Result<Self> {
        if lift == 0 {
            return Err(Error::InvalidPattern(
                "lifting factor must be positive".into(),
            ));
        }
        let (full_shorten, partial_shorten) = split_columns(&pattern.shorten, lift, ns)?;
        let (full_puncture, partial_puncture) = split_columns(&pattern.puncture, lift, np)?;
        if ns >= k * lift {
            return Err(Error::InvalidPattern(format!(
                "{ns} shortened bits leave no information bits (K = {})",
                k * lift
            )));
        }
        let transmitted = (n * lift)
            .checked_sub(ns + np)
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::InvalidPattern("nothing left to transmit".into()))?;
        Ok(BitSchedule {
            lift,
            full_shorten,
            partial_shorten,
            full_puncture,
            partial_puncture,
            shortened_bits: ns,
            punctured_bits: np,
            transmitted,
            info_bits: k * lift - ns,
        })
    }

    /// Schedule that prunes whole columns: `N_s = alpha Z`, `N_p = beta Z`.
    pub fn whole_columns(
        pattern: &PruningPattern,
        n: usize,
        k: usize,
        lift: usize,
    ) -> Result<Self> {
        BitSchedule::new(
            pattern,
            n,
            k,
            lift,
            pattern.alpha() * lift,
            pattern.beta() * lift,
        )
    }

    /// Practical transmission rate `(kZ - N_s) / N`.
    pub fn rate(&self) -> Ratio<usize> {
        Ratio::new(self.info_bits, self.transmitted)
    }

    /// Zero-based lifted positions of every shortened bit.
    pub fn shortened_positions(&self) -> Vec<usize> {
        positions(&self.full_shorten, self.partial_shorten, self.lift)
    }

    /// Zero-based lifted positions of every punctured bit.
    pub fn punctured_positions(&self) -> Vec<usize> {
        positions(&self.full_puncture, self.partial_puncture, self.lift)
    }
}

fn split_columns(
    cols: &[usize],
    lift: usize,
    bits: usize,
) -> Result<(Vec<usize>, Option<PartialColumn>)> {
    let touched = bits.div_ceil(lift);
    if touched > cols.len() {
        return Err(Error::PatternTooShort {
            needed: touched,
            available: cols.len(),
        });
    }
    if touched == 0 {
        return Ok((Vec::new(), None));
    }
    let rest = bits - (touched - 1) * lift;
    if rest == lift {
        Ok((cols[..touched].to_vec(), None))
    } else {
        Ok((
            cols[..touched - 1].to_vec(),
            Some(PartialColumn {
                column: cols[touched - 1],
                bits: rest,
            }),
        ))
    }
}

fn positions(full: &[usize], partial: Option<PartialColumn>, lift: usize) -> Vec<usize> {
    let mut out: Vec<usize> = full
        .iter()
        .flat_map(|&c| (c - 1) * lift..c * lift)
        .collect();
    if let Some(p) = partial {
        out.extend((p.column - 1) * lift..(p.column - 1) * lift + p.bits);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard;

    fn opt44() -> PruningPattern {
        PruningPattern::new(vec![1, 2, 8, 10], vec![5, 9, 19, 20])
    }

    #[test]
    fn validate_table_pattern() {
        let bm = standard::ieee80211n_r12();
        assert_eq!((bm.cols(), bm.info_cols()), (24, 12));
        opt44().validate(&bm).unwrap();
    }

    #[test]
    fn validate_rejects() {
        let bm = standard::ieee80211n_r12();
        let parity = PruningPattern::new(vec![13], vec![]);
        assert!(matches!(
            parity.validate(&bm),
            Err(Error::InvalidPattern(_))
        ));
        let overlap = PruningPattern::new(vec![1], vec![1]);
        assert!(overlap.validate(&bm).is_err());
        let range = PruningPattern::new(vec![], vec![25]);
        assert_eq!(
            range.validate(&bm),
            Err(Error::ColumnOutOfRange { index: 25, n: 24 })
        );
        let too_many = PruningPattern::new(vec![], (13..=24).collect());
        assert!(too_many.validate(&bm).is_err());
        let dup = PruningPattern::new(vec![2, 2], vec![]);
        assert!(dup.validate(&bm).is_err());
    }

    #[test]
    fn apply_empty_is_identity() {
        let bm = standard::ieee80211n_r12();
        let p = PruningPattern::default().apply(&bm).unwrap();
        assert_eq!(p.base, bm);
        assert!(p.punctured.iter().all(|&x| !x));
    }

    #[test]
    fn apply_opt44_dimensions() {
        let bm = standard::ieee80211n_r12();
        let p = opt44().apply(&bm).unwrap();
        assert_eq!(p.transmitted_cols(), 16);
        assert_eq!(p.info_cols(), 8);
        assert_eq!(p.base.cols(), 20);
        assert_eq!(p.punctured.iter().filter(|&&x| x).count(), 4);
        // original column 5 sits at index 2 after erasing 1 and 2
        assert!(p.punctured[2]);
        // original column 19 sits at index 14 after erasing 1, 2, 8, 10
        assert!(p.punctured[14] && p.punctured[15]);
        assert_eq!(p.rate(), Ratio::new(1, 2));
    }

    #[test]
    fn apply_puncture_only_rate() {
        let bm = standard::ieee80211n_r12();
        let p = PruningPattern::new(vec![], vec![21, 22, 23, 24])
            .apply(&bm)
            .unwrap();
        assert_eq!(p.rate(), Ratio::new(12, 20));
    }

    #[test]
    fn pruned_rate_examples() {
        assert_eq!(pruned_rate(24, 12, 4, 4).unwrap(), Ratio::new(1, 2));
        assert_eq!(pruned_rate(24, 16, 0, 4).unwrap(), Ratio::new(4, 5));
        assert_eq!(pruned_rate(24, 12, 0, 0).unwrap(), Ratio::new(12, 24));
        assert_eq!(pruned_rate(24, 12, 0, 4).unwrap(), Ratio::new(3, 5));
        assert!(pruned_rate(4, 2, 2, 2).is_err());
        assert!(pruned_rate(24, 12, 13, 0).is_err());
    }

    #[test]
    fn schedule_two_full_columns() {
        let s = PruningPattern::new((1..=12).collect(), vec![]);
        let b = BitSchedule::new(&s, 24, 12, 81, 162, 0).unwrap();
        assert_eq!(b.full_shorten, vec![1, 2]);
        assert_eq!(b.partial_shorten, None);
        assert!(b.full_puncture.is_empty() && b.partial_puncture.is_none());
        assert_eq!(b.transmitted, 24 * 81 - 162);
    }

    #[test]
    fn schedule_partial_column() {
        let s = PruningPattern::new(vec![3, 7], vec![]);
        let b = BitSchedule::new(&s, 24, 12, 81, 100, 0).unwrap();
        assert_eq!(b.full_shorten, vec![3]);
        assert_eq!(
            b.partial_shorten,
            Some(PartialColumn {
                column: 7,
                bits: 19
            })
        );
        let pos = b.shortened_positions();
        assert_eq!(pos.len(), 100);
        assert_eq!(pos[81], 6 * 81);
        assert_eq!(*pos.last().unwrap(), 6 * 81 + 18);
    }

    #[test]
    fn schedule_empty() {
        let b = BitSchedule::new(&PruningPattern::default(), 24, 12, 81, 0, 0).unwrap();
        assert_eq!(b.transmitted, 24 * 81);
        assert_eq!(b.rate(), Ratio::new(1, 2));
        assert!(b.shortened_positions().is_empty());
    }

    #[test]
    fn schedule_too_short() {
        let s = PruningPattern::new(vec![1], vec![5]);
        assert_eq!(
            BitSchedule::new(&s, 24, 12, 81, 82, 0),
            Err(Error::PatternTooShort {
                needed: 2,
                available: 1
            })
        );
        assert!(BitSchedule::new(&s, 24, 12, 81, 0, 200).is_err());
    }

    #[test]
    fn sub_pattern_prefixes() {
        let p = opt44();
        assert_eq!(
            p.sub_pattern(2, 2).unwrap(),
            PruningPattern::new(vec![1, 2], vec![5, 9])
        );
        assert!(p.sub_pattern(0, 0).unwrap().is_empty());
        assert_eq!(
            p.sub_pattern(4, 2).unwrap(),
            PruningPattern::new(vec![1, 2, 8, 10], vec![5, 9])
        );
        assert!(p.sub_pattern(5, 0).is_err());
        assert!(p.sub_pattern(0, 5).is_err());
    }

    #[test]
    fn json_format() {
        let p = opt44();
        assert_eq!(
            p.to_json(),
            r#"{"shorten":[1,2,8,10],"puncture":[5,9,19,20]}"#
        );
        assert_eq!(PruningPattern::from_json(&p.to_json()).unwrap(), p);
        assert!(PruningPattern::from_json("{\"shorten\":[1]}").is_err());
    }

    #[test]
    fn inline_lists() {
        assert_eq!(
            PruningPattern::parse_list("1,2, 8,10").unwrap(),
            vec![1, 2, 8, 10]
        );
        assert!(PruningPattern::parse_list("").unwrap().is_empty());
        assert!(PruningPattern::parse_list("1,x").is_err());
    }
}
