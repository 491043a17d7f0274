use matdeg::format::InstanceFile;
use matdeg::generate::{fuzz_params, generate, ConstraintKind, GeneratorParams};
use matdeg::graph::Multigraph;
use matdeg::lp::{
    build_laminar_tight_family, enumerate_tight_st_sets, is_laminar, linalg, solve_lp1,
    DegreeConstraint,
};
use matdeg::oracle::brute_force_opt;
use matdeg::{EdgeId, Instance, Limits, Rational, SolverConfig, VertexId};
use num_traits::Zero;
use proptest::prelude::*;

fn multigraph_strategy() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (2usize..8).prop_flat_map(|n| {
        let pair = (0..n as u32, 0..n as u32).prop_filter("no self-loops", |(u, v)| u != v);
        (Just(n), prop::collection::vec(pair, 1..14))
    })
}

fn build(n: usize, pairs: &[(u32, u32)]) -> Multigraph {
    let vs: Vec<VertexId> = (0..n as u32).map(VertexId).collect();
    let es: Vec<_> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| (EdgeId(i as u32), VertexId(u), VertexId(v)))
        .collect();
    Multigraph::new(&vs, &es)
}

fn degree_sum(g: &Multigraph) -> usize {
    g.nodes().map(|w| g.delta(w).unwrap().len()).sum()
}

fn constraints_of(inst: &Instance, g: &Multigraph) -> Vec<DegreeConstraint> {
    inst.vertices()
        .iter()
        .map(|&v| DegreeConstraint {
            node: g.node_of(v).unwrap(),
            matroid: inst.constraint(v).clone(),
        })
        .collect()
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (
        prop::sample::select(vec![
            ConstraintKind::UniformDeg,
            ConstraintKind::Partition,
            ConstraintKind::Laminar,
            ConstraintKind::Mixed,
        ]),
        3usize..=7,
        0u64..10_000,
    )
        .prop_flat_map(|(kind, n, seed)| {
            (n - 1..=12).prop_map(move |m| {
                generate(&GeneratorParams { kind, n, m, seed })
                    .unwrap()
                    .instance
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_identities((n, pairs) in multigraph_strategy(), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..6)) {
        let mut g = build(n, &pairs);
        prop_assert_eq!(degree_sum(&g), 2 * g.edge_count());
        for pick in picks {
            let ids: Vec<EdgeId> = g.edge_ids().collect();
            if ids.is_empty() {
                break;
            }
            let before = g.edge_count();
            let c = g.contract_edge(*pick.get(&ids)).unwrap();
            prop_assert_eq!(g.edge_count(), before - 1 - c.removed_loops.len());
            let covered: usize = g.nodes().map(|w| g.members(w).unwrap().len()).sum();
            prop_assert_eq!(covered, n);
            prop_assert_eq!(degree_sum(&g), 2 * g.edge_count());
        }
    }

    #[test]
    fn lp_vertices_are_certified_and_reproducible(inst in instance_strategy()) {
        let cfg = SolverConfig::default();
        let g = Multigraph::from_instance(&inst);
        let dcs = constraints_of(&inst, &g);
        let first = solve_lp1(&g, &inst.costs(), &dcs, &[], &cfg);
        let Ok(sol) = first else {
            // only infeasibility is an acceptable failure
            prop_assert!(first.unwrap_err().is_infeasible());
            return Ok(());
        };
        prop_assert!(sol.vertex_certificate);
        let support: Vec<EdgeId> = sol.x.support().collect();
        let rows: Vec<Vec<Rational>> = sol
            .tight
            .iter()
            .map(|c| support.iter().map(|&e| c.coefficient(e)).collect())
            .collect();
        prop_assert!(support.len() <= linalg::rank(&rows));
        let again = solve_lp1(&g, &inst.costs(), &dcs, &[], &cfg).unwrap();
        prop_assert_eq!(&again.x, &sol.x);
        prop_assert_eq!(again.objective, sol.objective);

        let tight = enumerate_tight_st_sets(&g, &sol.x).unwrap();
        let family = build_laminar_tight_family(&g, &sol.x, &tight).unwrap();
        prop_assert!(is_laminar(&family));
        for s in &family {
            let inside: Rational = sol.x.sum(g.edges_within(s).unwrap().iter());
            prop_assert_eq!(inside, Rational::from_integer((s.len() as i64 - 1).into()));
        }
    }

    #[test]
    fn instance_files_round_trip(inst in instance_strategy()) {
        let file = InstanceFile { instance: inst, metadata: None };
        let text = file.to_json().unwrap();
        let back = InstanceFile::parse(&text).unwrap();
        prop_assert_eq!(back.instance.edges(), file.instance.edges());
        for (v, m) in file.instance.constraints() {
            prop_assert_eq!(back.instance.constraint(*v).primitive(), m.primitive());
        }
        prop_assert_eq!(back.to_json().unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relaxation_and_rounding_bracket_the_optimum(seed in 0u64..100_000) {
        let inst = generate(&fuzz_params(seed)).unwrap().instance;
        let (opt, _) = brute_force_opt(&inst, &Limits::default()).unwrap().expect("planted tree is feasible");
        let res = matdeg::run(&inst, &SolverConfig::default()).unwrap();
        prop_assert!(res.lp_initial <= opt);
        prop_assert!(res.cost <= res.lp_initial);
        prop_assert_eq!(res.cost.clone(), inst.cost_of(&res.tree));
        prop_assert_eq!(res.tree.len() + 1, inst.vertices().len());
        prop_assert!(res.cost >= Rational::zero());
    }
}
