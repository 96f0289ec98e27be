use ldpc_prune::pexit;
use ldpc_prune::search::{self, SearchConfig};
use ldpc_prune::sim::{run_sim, SimPlan};
use ldpc_prune::standard::{self, patterns};
use ldpc_prune::{BaseMatrix, PruningPattern};

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
fn search_thresholds_are_reproducible_from_patterns() {
    let bm = small();
    let out = search::run_search(&bm, &SearchConfig::new(2, 4)).unwrap();
    let finals = out.final_patterns();
    assert!(!finals.is_empty());
    for (p, db) in finals {
        p.validate(&bm).unwrap();
        assert_eq!(pexit::pattern_threshold(&bm, &p).unwrap().db, db);
        // every prefix was a stage-1 survivor
        let prefix = p.sub_pattern(1, 1).unwrap();
        assert!(out.beams[0].iter().any(|e| e.pattern == prefix));
    }
}

#[test]
fn small_code_has_singular_lifted_parity() {
    // all-zero shifts make the parity part of `small()` rank deficient
    let err = ldpc_prune::codec::Encoder::new(&small().with_lift(8).unwrap()).unwrap_err();
    assert!(matches!(
        err,
        ldpc_prune::Error::SingularParity { size: 32, .. }
    ));
}

#[test]
fn search_result_feeds_the_simulator() {
    let bm = standard::ieee80216e_r12(24);
    let out = search::run_search(&bm, &SearchConfig::new(1, 2)).unwrap();
    let (p, _) = out.recommended().unwrap();
    let mut plan = SimPlan::whole_columns(bm, p, vec![4.0]);
    plan.max_frames = 30;
    let pt = &run_sim(&plan).unwrap()[0];
    assert_eq!((pt.frames, pt.frame_errors), (30, 0));
}

#[test]
fn pruned_11n_decodes_cleanly_well_above_threshold() {
    let mut plan = SimPlan::whole_columns(
        standard::ieee80211n_r12(),
        patterns::opt_11n_r12(),
        vec![3.0],
    );
    plan.max_frames = 40;
    plan.seed = 3;
    let pt = &run_sim(&plan).unwrap()[0];
    assert_eq!((pt.frames, pt.frame_errors), (40, 0));
}

#[test]
fn partial_columns_simulate() {
    // 100 shortened and 50 punctured bits: one full column plus part of a second
    let mut plan = SimPlan::whole_columns(
        standard::ieee80211n_r12(),
        patterns::opt_11n_r12(),
        vec![3.0],
    );
    plan.shortened_bits = 100;
    plan.punctured_bits = 50;
    plan.max_frames = 20;
    let sched = plan.schedule().unwrap();
    assert_eq!(sched.transmitted, 1944 - 150);
    let pt = &run_sim(&plan).unwrap()[0];
    assert_eq!(pt.frame_errors, 0);
}

#[test]
fn fixtures_match_bundled_patterns() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/patterns/");
    for (file, p) in [
        ("opt_11n_r12.json", patterns::opt_11n_r12()),
        ("opt_16e_r12.json", patterns::opt_16e_r12()),
        ("lw_16e_r12.json", patterns::lw_16e_r12()),
    ] {
        let text = std::fs::read_to_string(format!("{dir}{file}")).unwrap();
        assert_eq!(PruningPattern::from_json(&text).unwrap(), p);
    }
}
