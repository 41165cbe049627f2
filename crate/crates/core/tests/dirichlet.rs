mod common;

use proptest::prelude::*;

use common::{max_abs_diff, path_graph};
use inflap::dirichlet::{
    dpp_iterate, dpp_iterate_observed, solve_bounded, steepest_path_solve, verify_comparison, DirichletProblem,
    SolverOptions, SweepMode,
};
use inflap::fixtures::{framed_grid, path, random, star};
use inflap::operator::residual_norm;
use inflap::{BoundaryPartition, Error, Graph, ScalarField};

fn tight() -> SolverOptions {
    SolverOptions::default().with_tol(1e-13)
}

fn problem_of(fx: inflap::fixtures::GraphFixture) -> DirichletProblem {
    DirichletProblem::new(fx.graph, fx.partition, fx.f.unwrap(), fx.g.unwrap()).unwrap()
}

fn random_problem(seed: u64, n: usize) -> DirichletProblem {
    random::finite_width_problem(&mut random::rng(seed), n).unwrap()
}

#[test]
fn path_fixture_is_linear() {
    let prob = problem_of(path(4).unwrap());
    let r = solve_bounded(&prob, &tight()).unwrap().into_converged().unwrap();
    for v in 0..4 {
        assert!((r.solution.raw()[v] - v as f64).abs() < 1e-10);
    }
    assert!(r.bracket_gap.unwrap() < 1e-10);
}

#[test]
fn star_center_is_midrange() {
    let prob = problem_of(star(&[0.0, 2.0, 1.0]).unwrap());
    let r = solve_bounded(&prob, &tight()).unwrap();
    assert_eq!(r.solution.get(0), Some(1.0));
}

#[test]
fn source_on_a_short_path() {
    for c in [0.5, 1.0, 3.0] {
        let g = path_graph(3);
        let p = BoundaryPartition::new(&g, &[1], &[0, 2]).unwrap();
        let f = ScalarField::from_pairs(3, [(1, c)]).unwrap();
        let gv = ScalarField::from_pairs(3, [(0, 0.0), (2, 0.0)]).unwrap();
        let prob = DirichletProblem::new(g, p, f, gv).unwrap();
        let r = solve_bounded(&prob, &tight()).unwrap();
        assert!((r.solution.get(1).unwrap() + c / 2.0).abs() < 1e-12);
    }
}

#[test]
fn framed_grid_reproduces_the_x_coordinate() {
    let prob = problem_of(framed_grid(5).unwrap());
    let r = solve_bounded(&prob, &tight()).unwrap().into_converged().unwrap();
    for &x in prob.partition.interior() {
        assert!((r.solution.raw()[x] - (x % 7) as f64).abs() < 1e-9, "vertex {x}");
    }
}

#[test]
fn constant_data_gives_constant_solution() {
    let fx = framed_grid(4).unwrap();
    let n = fx.graph.vertex_count();
    let g = ScalarField::constant_on(n, fx.partition.boundary(), 2.5).unwrap();
    let prob = DirichletProblem::homogeneous(fx.graph, fx.partition, g).unwrap();
    let r = solve_bounded(&prob, &tight()).unwrap();
    for &x in prob.partition.interior() {
        assert!((r.solution.raw()[x] - 2.5).abs() < 1e-12);
    }
}

#[test]
fn sweeps_are_monotone_from_both_sides() {
    for seed in 0..10 {
        let prob = random_problem(seed, 30);
        for mode in [SweepMode::GaussSeidel, SweepMode::Jacobi] {
            let opts = tight().with_mode(mode).with_max_iter(200);
            for (init, down) in [(prob.supersolution().unwrap(), true), (prob.subsolution().unwrap(), false)] {
                let mut prev = init.raw().to_vec();
                dpp_iterate_observed(&prob, &init, &opts, |_, u| {
                    for &x in prob.partition.interior() {
                        if down {
                            assert!(u[x] <= prev[x] + 1e-12, "seed {seed} vertex {x} rose");
                        } else {
                            assert!(u[x] >= prev[x] - 1e-12, "seed {seed} vertex {x} fell");
                        }
                    }
                    prev.copy_from_slice(u);
                })
                .unwrap();
            }
        }
    }
}

#[test]
fn limits_lie_between_the_initial_brackets() {
    for seed in 0..20 {
        let prob = random_problem(seed, 25);
        let sup = prob.supersolution().unwrap();
        let sub = prob.subsolution().unwrap();
        let r = solve_bounded(&prob, &tight()).unwrap();
        for &x in prob.partition.interior() {
            let u = r.solution.raw()[x];
            assert!(sub.raw()[x] - 1e-12 <= u && u <= sup.raw()[x] + 1e-12);
        }
    }
}

#[test]
fn homogeneous_solutions_obey_the_maximum_principle() {
    for seed in 0..20 {
        let prob = random_problem(seed, 20);
        let prob = DirichletProblem::homogeneous(prob.graph, prob.partition, prob.g).unwrap();
        let r = solve_bounded(&prob, &tight()).unwrap();
        for &x in prob.partition.interior() {
            let u = r.solution.raw()[x];
            assert!(prob.g_min() - 1e-12 <= u && u <= prob.g_max() + 1e-12);
        }
    }
}

#[test]
fn sign_changing_rhs_is_rejected() {
    let g = path_graph(4);
    let p = BoundaryPartition::new(&g, &[1, 2], &[0, 3]).unwrap();
    let f = ScalarField::from_pairs(4, [(1, 1.0), (2, -1.0)]).unwrap();
    let gv = ScalarField::from_pairs(4, [(0, 0.0), (3, 0.0)]).unwrap();
    let prob = DirichletProblem::new(g, p, f, gv).unwrap();
    assert!(matches!(solve_bounded(&prob, &tight()), Err(Error::SignChangingRhs { .. })));
}

#[test]
fn iteration_cap_is_reported() {
    let prob = problem_of(framed_grid(6).unwrap());
    let r = dpp_iterate(&prob, &prob.supersolution().unwrap(), &tight().with_max_iter(3)).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 3);
    assert!(matches!(r.into_converged(), Err(Error::NonConvergence { iterations: 3, .. })));
    assert!(dpp_iterate(&prob, &prob.supersolution().unwrap(), &SolverOptions::default().with_tol(0.0)).is_err());
}

#[test]
fn wrong_boundary_values_in_the_initial_field_are_rejected() {
    let prob = problem_of(path(4).unwrap());
    let mut init = prob.supersolution().unwrap();
    init.set(0, 7.0).unwrap();
    assert!(dpp_iterate(&prob, &init, &tight()).is_err());
}

#[test]
fn gauss_seidel_and_jacobi_agree() {
    for seed in 0..10 {
        let prob = random_problem(seed, 30);
        let a = solve_bounded(&prob, &tight()).unwrap();
        let b = solve_bounded(&prob, &tight().with_mode(SweepMode::Jacobi)).unwrap();
        assert!(max_abs_diff(&a.solution, &b.solution, prob.partition.interior()) < 1e-8);
    }
}

#[test]
fn comparison_of_a_solution_with_itself() {
    let prob = random_problem(3, 20);
    let r = solve_bounded(&prob, &tight()).unwrap();
    let verdict = verify_comparison(
        &prob.graph,
        &prob.partition,
        &r.solution,
        &r.solution,
        &prob.f,
        1e-9,
    )
    .unwrap();
    assert!(verdict.holds());
}

fn permuted(prob: &DirichletProblem, perm: &[usize]) -> DirichletProblem {
    let n = perm.len();
    let graph = Graph::from_edges(n, prob.graph.edges().map(|(a, b)| (perm[a], perm[b]))).unwrap();
    let map = |vs: &[usize]| vs.iter().map(|&v| perm[v]).collect::<Vec<_>>();
    let p = BoundaryPartition::new(&graph, &map(prob.partition.interior()), &map(prob.partition.boundary())).unwrap();
    let carry = |s: &ScalarField| ScalarField::from_pairs(n, s.iter().map(|(v, x)| (perm[v], x))).unwrap();
    DirichletProblem::new(graph, p, carry(&prob.f), carry(&prob.g)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relabeling_commutes_with_solving(seed in any::<u64>(), n in 4usize..24, shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let prob = random_problem(seed, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut random::rng(shuffle));
        let moved = permuted(&prob, &perm);
        let a = solve_bounded(&prob, &tight()).unwrap();
        let b = solve_bounded(&moved, &tight()).unwrap();
        for &x in prob.partition.interior() {
            prop_assert!((a.solution.raw()[x] - b.solution.raw()[perm[x]]).abs() < 1e-8);
        }
    }

    #[test]
    fn negating_data_negates_the_solution(seed in any::<u64>(), n in 4usize..24) {
        let prob = random_problem(seed, n);
        let neg = DirichletProblem::new(
            prob.graph.clone(),
            prob.partition.clone(),
            prob.f.map(|x| -x).unwrap(),
            prob.g.map(|x| -x).unwrap(),
        )
        .unwrap();
        let a = solve_bounded(&prob, &tight()).unwrap();
        let b = solve_bounded(&neg, &tight()).unwrap();
        for &x in prob.partition.interior() {
            prop_assert!((a.solution.raw()[x] + b.solution.raw()[x]).abs() < 1e-8);
        }
    }

    #[test]
    fn peeling_matches_iteration(seed in any::<u64>(), n in 4usize..25) {
        let prob = random_problem(seed, n);
        let prob = DirichletProblem::homogeneous(prob.graph, prob.partition, prob.g).unwrap();
        let exact = steepest_path_solve(&prob).unwrap();
        prop_assert!(residual_norm(&prob.graph, &prob.partition, &exact.solution, &prob.f).unwrap() < 1e-12);
        let iter = solve_bounded(&prob, &tight()).unwrap();
        prop_assert!(max_abs_diff(&exact.solution, &iter.solution, prob.partition.interior()) < 1e-8);
    }

    #[test]
    fn solutions_have_small_residual(seed in any::<u64>(), n in 4usize..40) {
        let prob = random_problem(seed, n);
        let r = solve_bounded(&prob, &tight()).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.residual < 1e-9);
        prop_assert!(r.bracket_gap.unwrap() < 1e-7);
    }
}
