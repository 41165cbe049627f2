use inflap::exhaustion::{doubling_schedule, solve_exhaustion, sublinearity_ratio, ExhaustionOptions};
use inflap::fixtures::{BinaryTree, HalfLine, HalfPlane};
use inflap::Error;

fn opts(radii: Vec<usize>, window_r: usize) -> ExhaustionOptions {
    ExhaustionOptions {
        radii,
        window_r,
        early_stop: false,
        ..ExhaustionOptions::default()
    }
}

#[test]
fn constant_data_on_the_half_line() {
    let run = solve_exhaustion(&HalfLine, |_| 2.5, &opts(vec![4, 8, 16], 4)).unwrap();
    assert!(run.converged);
    assert_eq!(run.records[1].change, Some(0.0));
    assert!(run.final_window().iter().all(|&v| v == 2.5));
    let trace = run.sublinearity(&[1, 5, 10]).unwrap();
    assert_eq!(trace.at(5), Some(0.5));
    assert_eq!(trace.at(10), Some(0.25));
}

#[test]
fn early_stop_ends_the_schedule() {
    let o = ExhaustionOptions {
        radii: vec![4, 8, 16, 32],
        ..ExhaustionOptions::default()
    };
    let run = solve_exhaustion(&HalfLine, |_| 1.0, &o).unwrap();
    assert_eq!(run.records.len(), 2);
}

#[test]
fn zero_data_on_the_binary_tree() {
    let run = solve_exhaustion(&BinaryTree, |_| 0.0, &opts(vec![3, 6], 3)).unwrap();
    assert!(run.final_window().iter().all(|&v| v == 0.0));
    assert!(run.solution.iter().all(|(_, v)| v == 0.0));
}

#[test]
fn boundary_values_are_kept() {
    let o = HalfPlane::new(8).unwrap();
    let run = solve_exhaustion(&o, HalfPlane::alternating, &opts(vec![4, 8], 2)).unwrap();
    let t = &run.truncation;
    for &v in &t.inner_boundary {
        assert_eq!(run.solution.get(v), Some(HalfPlane::alternating(&t.keys[v])));
    }
}

#[test]
fn half_plane_limit_is_schedule_independent() {
    let o = HalfPlane::new(8).unwrap();
    let a = solve_exhaustion(&o, HalfPlane::alternating, &opts(vec![4, 8, 16, 24], 2)).unwrap();
    let b = solve_exhaustion(&o, HalfPlane::alternating, &opts(vec![4, 6, 12, 20, 28], 2)).unwrap();
    assert_eq!(a.window, b.window);
    for (x, y) in a.final_window().iter().zip(b.final_window()) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn window_values_decrease_and_stay_in_range() {
    let o = HalfPlane::new(6).unwrap();
    let mut o2 = opts(vec![4, 8, 16], 3);
    o2.lower_bracket = true;
    let run = solve_exhaustion(&o, HalfPlane::alternating, &o2).unwrap();
    for pair in run.records.windows(2) {
        for (now, before) in pair[1].window.iter().zip(&pair[0].window) {
            assert!(*now <= before + 1e-10);
        }
    }
    for (_, v) in run.solution.iter() {
        assert!((run.g_inf - 1e-12..=run.g_sup + 1e-12).contains(&v));
    }
    let last = run.records.last().unwrap();
    for (up, low) in last.window.iter().zip(last.lower.as_ref().unwrap()) {
        assert!(low <= &(up + 1e-10));
    }
    assert!(run.bracket_gap().unwrap() >= 0.0);
}

#[test]
fn invalid_schedules_are_rejected() {
    for (radii, w) in [(vec![], 1), (vec![4, 4], 1), (vec![8, 4], 1), (vec![4, 8], 5), (vec![4], 0)] {
        assert!(matches!(
            solve_exhaustion(&HalfLine, |_| 0.0, &opts(radii, w)),
            Err(Error::Argument(_))
        ));
    }
    assert!(solve_exhaustion(&HalfLine, |_| f64::NAN, &opts(vec![4], 1)).is_err());
}

#[test]
fn schedules_and_ratios() {
    assert_eq!(doubling_schedule(3, 30), vec![3, 6, 12, 24]);
    assert!(doubling_schedule(8, 4).is_empty());
    let linear = sublinearity_ratio(&[2, 4, 8], (0..=8).map(|d| (d, d as f64))).unwrap();
    assert!(linear.ratios.iter().all(|&(_, q)| q == 1.0));
    assert!(sublinearity_ratio(&[0], [(1, 1.0)]).is_err());
}
