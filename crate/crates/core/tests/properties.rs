use proptest::prelude::*;

use emitgen::bounds::total_bound;
use emitgen::graphs::{automorphisms, parse_graph, write_graph, EmissionOrdering, Graph};
use emitgen::solver::{min_emitters, solve, verify, GenerationCircuit};
use emitgen::tableau::{Clifford, Tableau};

fn graph_and_ordering(max_n: usize) -> impl Strategy<Value = (Graph, EmissionOrdering)> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(any::<bool>(), n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(edges, had, order)| {
                let mut g = Graph::empty(n).unwrap();
                let mut k = 0;
                for a in 0..n {
                    for b in a + 1..n {
                        if edges[k] {
                            g.add_edge(a, b).unwrap();
                        }
                        k += 1;
                    }
                }
                for (v, &h) in had.iter().enumerate() {
                    if h {
                        g.set_hadamard(v).unwrap();
                    }
                }
                (g, EmissionOrdering::new(order).unwrap())
            })
    })
}

fn clifford_sequence(n: usize) -> impl Strategy<Value = Vec<Clifford>> {
    let gate = (0..3u8, 0..n, 0..n).prop_map(move |(kind, a, b)| match kind {
        0 => Clifford::H(a),
        1 => Clifford::S(a),
        _ if a != b => Clifford::Cnot {
            control: a,
            target: b,
        },
        _ => Clifford::H(a),
    });
    proptest::collection::vec(gate, 0..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solved_circuits_verify_and_respect_bounds((g, o) in graph_and_ordering(8)) {
        let sol = solve(&g, &o).unwrap();
        let report = verify(&sol.circuit, &g, &o, 3, 4).unwrap();
        prop_assert!(report.passed, "{:?}", report.failure);
        let s = sol.stats;
        prop_assert_eq!(s.n_emitters, min_emitters(&g, &o).unwrap());
        prop_assert_eq!(s.cnot_count, s.absorption + s.measurement + s.end);
        prop_assert_eq!(s.cnot_count, sol.circuit.cnot_count());
        let bound = total_bound(g.n_vertices() as u64, s.n_emitters as u64, None).unwrap();
        prop_assert!(s.cnot_count as u64 <= bound.total);
    }

    #[test]
    fn circuit_text_round_trips((g, o) in graph_and_ordering(7)) {
        let c = solve(&g, &o).unwrap().circuit;
        prop_assert_eq!(GenerationCircuit::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn graph_file_round_trips((g, _) in graph_and_ordering(9)) {
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn canonical_ordering_is_an_orbit_invariant((g, o) in graph_and_ordering(7)) {
        let group = automorphisms(&g).unwrap();
        let c = o.canonical_under(&group);
        prop_assert!(c <= o);
        prop_assert_eq!(c.canonical_under(&group), c.clone());
        for sigma in group.elements() {
            prop_assert_eq!(o.relabeled(sigma).canonical_under(&group), c.clone());
        }
    }

    #[test]
    fn vertex_times_invert_emission_sequences((_, o) in graph_and_ordering(9)) {
        let times = o.inverse().to_one_based();
        prop_assert_eq!(EmissionOrdering::from_vertex_times(&times).unwrap(), o.clone());
        prop_assert_eq!(o.inverse().inverse(), o);
    }

    #[test]
    fn height_is_a_unit_step_profile(n in 1usize..10, gates in clifford_sequence(10)) {
        let mut t = Tableau::zero_state(n).unwrap();
        for gate in gates {
            let gate = match gate {
                Clifford::H(q) => Clifford::H(q % n),
                Clifford::S(q) => Clifford::S(q % n),
                Clifford::Cnot { control, target } if control % n != target % n => {
                    Clifford::Cnot { control: control % n, target: target % n }
                }
                _ => continue,
            };
            t.apply(gate).unwrap();
        }
        let h = t.height_natural();
        let v = h.values();
        prop_assert_eq!(v.len(), n + 1);
        prop_assert_eq!(v[0], 0);
        prop_assert_eq!(v[n], 0);
        for w in v.windows(2) {
            prop_assert!(w[0].abs_diff(w[1]) <= 1);
        }
        let c = t.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        let hc = c.height_natural();
        prop_assert_eq!(hc.values(), v);
    }
}
