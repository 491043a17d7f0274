//! Runs with fractional relaxations, where the rounding loop does real work.
//! Fuzz-scale instances are almost always integral, so denser ones are
//! searched for fractional starts and then re-run with every assertion on.

use matdeg::generate::{generate, ConstraintKind, GeneratorParams};
use matdeg::oracle::verify_solution;
use matdeg::{run, SolverConfig};

#[test]
fn fractional_runs_pass_every_check() {
    let fast = SolverConfig::default();
    let debug = SolverConfig::debug();
    let mut fractional = 0;
    let mut adaptations = 0;
    for kind in [
        ConstraintKind::UniformDeg,
        ConstraintKind::Laminar,
        ConstraintKind::Mixed,
    ] {
        for seed in 0..150 {
            let g = generate(&GeneratorParams {
                kind,
                n: 8,
                m: 14,
                seed,
            })
            .unwrap();
            if run(&g.instance, &fast).unwrap().iterations == 1 {
                continue;
            }
            fractional += 1;
            let res =
                run(&g.instance, &debug).unwrap_or_else(|e| panic!("{kind} seed {seed}: {e}"));
            let report = verify_solution(&g.instance, &res, &debug.limits).unwrap();
            assert!(
                report.passed(),
                "{kind} seed {seed}: {:?}",
                report.failures()
            );
            assert!(res.cost <= report.integral_opt.clone().unwrap());
            adaptations += res.adaptations.len();
        }
    }
    assert!(
        fractional >= 5,
        "only {fractional} fractional instances found"
    );
    assert!(adaptations > 0);
}
