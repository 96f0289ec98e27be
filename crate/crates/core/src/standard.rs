//! Base matrices and reference patterns shipped with the crate.

use crate::protograph::BaseMatrix;
use crate::pruning::PruningPattern;

pub const IEEE80211N_Z81_R12: &str = include_str!("../../../data/11n_z81_r12.bm");
pub const IEEE80211N_Z81_R23: &str = include_str!("../../../data/11n_z81_r23.bm");
pub const IEEE80216E_R12: &str = include_str!("../../../data/16e_r12.bm");
pub const IEEE80216E_R23A: &str = include_str!("../../../data/16e_r23a.bm");
pub const IEEE80216E_R23B: &str = include_str!("../../../data/16e_r23b.bm");
pub const FIG1_EXAMPLE: &str = include_str!("../../../data/fig1_example.bm");

fn load(text: &str) -> BaseMatrix {
    text.parse().expect("bundled base matrix is valid")
}

/// 802.11n, N = 1944, rate 1/2.
pub fn ieee80211n_r12() -> BaseMatrix {
    load(IEEE80211N_Z81_R12)
}

/// 802.11n, N = 1944, rate 2/3.
pub fn ieee80211n_r23() -> BaseMatrix {
    load(IEEE80211N_Z81_R23)
}

/// 802.16e rate 1/2, shifts scaled from the `Z = 96` master.
pub fn ieee80216e_r12(z: usize) -> BaseMatrix {
    load(IEEE80216E_R12)
        .with_lift(z)
        .expect("scaling keeps support")
}

/// 802.16e rate 2/3 A. The standard derives other `Z` by `h mod Z` for this
/// code; the floor rule is used here as well since only the support matters
/// for threshold analysis.
pub fn ieee80216e_r23a(z: usize) -> BaseMatrix {
    load(IEEE80216E_R23A)
        .with_lift(z)
        .expect("scaling keeps support")
}

/// 802.16e rate 2/3 B.
pub fn ieee80216e_r23b(z: usize) -> BaseMatrix {
    load(IEEE80216E_R23B)
        .with_lift(z)
        .expect("scaling keeps support")
}

pub fn fig1_example() -> BaseMatrix {
    load(FIG1_EXAMPLE)
}

/// Looks up a bundled matrix by short name (`11n-r12`, `11n-r23`, `16e-r12`,
/// `16e-r23a`, `16e-r23b`, `fig1`).
pub fn by_name(name: &str) -> Option<BaseMatrix> {
    Some(match name {
        "11n-r12" => ieee80211n_r12(),
        "11n-r23" => ieee80211n_r23(),
        "16e-r12" => load(IEEE80216E_R12),
        "16e-r23a" => load(IEEE80216E_R23A),
        "16e-r23b" => load(IEEE80216E_R23B),
        "fig1" => fig1_example(),
        _ => return None,
    })
}

/// Reference patterns used for comparison runs.
pub mod patterns {
    use super::PruningPattern;

    /// Optimized `{4;4}` pattern for 802.11n rate 1/2.
    pub fn opt_11n_r12() -> PruningPattern {
        PruningPattern::new(vec![1, 2, 8, 10], vec![5, 9, 19, 20])
    }

    /// The 802.11n standard's own pruning order for rate 1/2.
    pub fn std_11n_r12() -> PruningPattern {
        PruningPattern::new(vec![12, 11, 10, 9], vec![24, 23, 22, 21])
    }

    /// Separately optimized shortening and puncturing orders, combined.
    pub fn lw_11n_r12() -> PruningPattern {
        PruningPattern::new(vec![3, 4, 6, 7], vec![13, 15, 17, 20])
    }

    /// Optimized `{4;4}` pattern for the rate-2/3 code.
    pub fn opt_r23() -> PruningPattern {
        PruningPattern::new(vec![4, 5, 8, 9], vec![3, 20, 22, 23])
    }

    pub fn std_r23() -> PruningPattern {
        PruningPattern::new(vec![16, 15, 14, 13], vec![24, 23, 22, 21])
    }

    /// Optimized puncture-only `{0;6}` pattern for 802.16e rate 1/2.
    pub fn opt_16e_r12() -> PruningPattern {
        PruningPattern::new(vec![], vec![6, 14, 16, 18, 20, 23])
    }

    pub fn lw_16e_r12() -> PruningPattern {
        PruningPattern::new(vec![], vec![13, 15, 17, 20, 22, 24])
    }
}
