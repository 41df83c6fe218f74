use std::fs;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use emitgen::graphs::CanonicalOrderings;
use emitgen::graphs::{
    automorphisms, orbit_count, path, ring, shor_encode_22, truncate_leaves, EmissionOrdering,
    Graph,
};
use emitgen::search::{
    canonical_count, exhaustive, random, solve_record, Collect, Execution, ExhaustiveConfig,
    HistogramDoc, Provenance, SearchConfig, SearchOutcome,
};
use emitgen::solver::SolveOptions;

fn config(execution: Execution) -> ExhaustiveConfig {
    let mut cfg = ExhaustiveConfig::default();
    cfg.search.execution = execution;
    cfg
}

fn small_core(n: usize) -> Graph {
    truncate_leaves(&shor_encode_22(&ring(n).unwrap()).unwrap())
        .unwrap()
        .graph
}

#[test]
fn serial_and_parallel_histograms_agree() {
    for g in [ring(8).unwrap(), small_core(4), path(7).unwrap()] {
        let serial = exhaustive(&g, &config(Execution::Serial)).unwrap();
        for workers in [1, 3, 0] {
            let par = exhaustive(&g, &config(Execution::Parallel { workers })).unwrap();
            assert_eq!(serial, par, "workers {workers}");
        }
    }
}

#[test]
fn exhaustive_visits_one_ordering_per_orbit() {
    for g in [
        ring(5).unwrap(),
        ring(7).unwrap(),
        small_core(3),
        small_core(4),
    ] {
        let out = exhaustive(&g, &ExhaustiveConfig::default()).unwrap();
        let group = automorphisms(&g).unwrap();
        let expected = orbit_count(g.n_vertices() as u64, group.size() as u64);
        assert_eq!(u64::try_from(expected).unwrap(), out.evaluated);
        assert_eq!(out.evaluated, out.histogram.total());
    }
}

#[test]
fn representatives_resolve_to_their_cell() {
    let g = ring(7).unwrap();
    let out = exhaustive(&g, &ExhaustiveConfig::default()).unwrap();
    let opts = SolveOptions::default();
    for (&key, cell) in out.histogram.cells() {
        assert!(!cell.representatives.is_empty());
        for o in &cell.representatives {
            let rec = solve_record(&g, o, &opts).unwrap();
            assert_eq!((rec.stats.n_emitters, rec.stats.cnot_count), key);
        }
    }
}

#[test]
fn orbit_members_have_identical_stats() {
    let g = ring(6).unwrap();
    let group = automorphisms(&g).unwrap();
    let opts = SolveOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let mut v: Vec<usize> = (0..6).collect();
        v.shuffle(&mut rng);
        let o = EmissionOrdering::new(v).unwrap();
        let sigma = &group.elements()[rng.gen_range(0..group.size())];
        let image = o.relabeled(sigma);
        let a = solve_record(&g, &o, &opts).unwrap().stats;
        let b = solve_record(&g, &image, &opts).unwrap().stats;
        assert_eq!(a, b, "{o} vs {image}");
        assert_eq!(o.canonical_under(&group), image.canonical_under(&group));
    }
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let g = ring(8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    let depth = 3;
    let mut cfg = ExhaustiveConfig {
        prefix_depth: Some(depth),
        checkpoint: Some(path.clone()),
        checkpoint_every: 2,
        ..ExhaustiveConfig::default()
    };
    cfg.search.collect = Collect::Best;
    let full = exhaustive(&g, &cfg).unwrap();
    assert!(path.exists());

    // Rewrite the finished checkpoint as if the run stopped after `done`
    // prefixes.
    let group = automorphisms(&g).unwrap();
    let prefixes = CanonicalOrderings::prefixes(&group, depth);
    let done = prefixes.len() / 2;
    let mut partial = SearchOutcome::default();
    for prefix in &prefixes[..done] {
        for o in CanonicalOrderings::from_prefix(&group, prefix)
            .into_iter()
            .flatten()
        {
            let rec = solve_record(&g, &o, &cfg.search.solver).unwrap();
            let key = (rec.stats.n_emitters, rec.stats.cnot_count);
            partial.histogram.add(key, &o);
            partial.evaluated += 1;
            let best = partial.collected.keys().next().copied();
            if best.is_none_or(|b| key <= b) {
                partial.collected.retain(|&k, _| k <= key);
                partial.collected.entry(key).or_default().push(o);
            }
        }
    }
    let provenance = Provenance {
        mode: "exhaustive".into(),
        seed: None,
        samples: None,
        graph_hash: None,
        solver: cfg.search.solver,
    };
    let mut ck: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    ck["completed"] = done.into();
    ck["partial"] =
        serde_json::from_str(&HistogramDoc::new(provenance.clone(), &partial).to_json()).unwrap();
    fs::write(&path, ck.to_string()).unwrap();

    let resumed = exhaustive(&g, &cfg).unwrap();
    assert_eq!(full, resumed);

    // A finished checkpoint is returned as is, without solving.
    let mut ck: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    ck["partial"] =
        serde_json::from_str(&HistogramDoc::new(provenance, &partial).to_json()).unwrap();
    fs::write(&path, ck.to_string()).unwrap();
    assert_eq!(exhaustive(&g, &cfg).unwrap().evaluated, partial.evaluated);
}

#[test]
fn checkpoint_from_another_search_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    let cfg = ExhaustiveConfig {
        checkpoint: Some(path.clone()),
        ..ExhaustiveConfig::default()
    };
    exhaustive(&ring(6).unwrap(), &cfg).unwrap();
    assert!(exhaustive(&ring(7).unwrap(), &cfg).is_err());
}

#[test]
fn random_search_is_reproducible_and_worker_independent() {
    let g = shor_encode_22(&ring(4).unwrap()).unwrap();
    let run = |execution| {
        let cfg = SearchConfig {
            execution,
            ..SearchConfig::default()
        };
        random(&g, 700, 11, &cfg).unwrap()
    };
    let a = run(Execution::Serial);
    assert_eq!(a.evaluated, 700);
    assert_eq!(a, run(Execution::Parallel { workers: 0 }));
    assert_eq!(a, run(Execution::Parallel { workers: 2 }));
}

#[test]
fn histogram_document_round_trips() {
    let g = ring(7).unwrap();
    let mut cfg = ExhaustiveConfig::default();
    cfg.search.collect = Collect::Best;
    let out = exhaustive(&g, &cfg).unwrap();
    let provenance = Provenance {
        mode: "exhaustive".into(),
        seed: Some(1),
        samples: None,
        graph_hash: Some("abc".into()),
        solver: SolveOptions::default(),
    };
    let doc = HistogramDoc::new(provenance, &out);
    let back = HistogramDoc::from_json(&doc.to_json()).unwrap();
    assert_eq!(doc, back);
    assert_eq!(back.outcome().unwrap(), out);
}

#[test]
fn canonical_count_matches_exhaustive_total() {
    let g = ring(6).unwrap();
    let count = canonical_count(&g).unwrap();
    let out = exhaustive(&g, &ExhaustiveConfig::default()).unwrap();
    assert_eq!(u64::try_from(count).unwrap(), out.evaluated);
}
