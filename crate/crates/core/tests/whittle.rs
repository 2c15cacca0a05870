use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmab::instances::{self, action_symmetric_arm, circulant_arm, non_indexable_arm, restart_arm};
use rmab::whittle::{
    check_indexability, index_table, lambda_grid, solve_subsidized, whittle_index, whittle_index_from,
    Indexability, Mode, SolverParams,
};
use rmab::{Action, ArmMdp};

const PUBLISHED: [f64; 4] = [-0.5, 0.5, 1.0, -1.0];

fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_arm(rng: &mut ChaCha8Rng, n: usize) -> ArmMdp {
    let p0 = (0..n).map(|_| random_row(rng, n)).collect();
    let p1 = (0..n).map(|_| random_row(rng, n)).collect();
    let r0 = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r1 = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ArmMdp::new([p0, p1], [r0, r1]).unwrap()
}

fn is_passive(mdp: &ArmMdp, state: usize, lambda: f64, mode: Mode) -> bool {
    solve_subsidized(mdp, lambda, mode, 1e-9, 100_000).unwrap().is_passive(state)
}

/// First subsidy on the grid `-bound + k·eps/2` at which `state` is passive.
/// A coarse pass locates the cell, then the cell is walked at the fine step.
fn grid_scan(mdp: &ArmMdp, state: usize, params: &SolverParams) -> Option<f64> {
    let bound = params.bound_for(mdp);
    let fine = params.eps / 2.0;
    let per_cell = 200usize;
    let coarse = fine * per_cell as f64;
    let n_cells = (2.0 * bound / coarse).ceil() as usize;
    let at = |k: usize| -bound + k as f64 * fine;
    if is_passive(mdp, state, at(0), params.mode) {
        return Some(at(0));
    }
    let cell = (1..=n_cells).find(|&c| is_passive(mdp, state, at(c * per_cell), params.mode))?;
    let start = (cell - 1) * per_cell;
    (start + 1..=cell * per_cell).map(at).find(|&l| is_passive(mdp, state, l, params.mode))
}

fn indexable_on_fine_grid(mdp: &ArmMdp) -> bool {
    let bound = SolverParams::default().bound_for(mdp);
    check_indexability(mdp, &lambda_grid(bound, 0.01), Mode::AverageReward, 1e-9, 100_000)
        .unwrap()
        .is_indexable()
}

#[test]
fn circulant_indices_average_reward() {
    let t = index_table(&circulant_arm(), &SolverParams::default()).unwrap();
    for z in 0..4 {
        assert!((t.get(z) - PUBLISHED[z]).abs() <= 0.05, "{t:?}");
    }
}

#[test]
fn circulant_indices_discounted_099() {
    let params = SolverParams {
        mode: Mode::Discounted(0.99),
        ..SolverParams::default()
    };
    let t = index_table(&circulant_arm(), &params).unwrap();
    for z in 0..4 {
        assert!((t.get(z) - PUBLISHED[z]).abs() <= 0.05, "{t:?}");
    }
}

#[test]
fn circulant_state_two_is_on_the_boundary_at_one() {
    let tol = 1e-9;
    let sol = solve_subsidized(&circulant_arm(), 1.0, Mode::AverageReward, tol, 100_000).unwrap();
    assert!((sol.q_passive[2] - sol.q_active[2]).abs() <= 2.0 * tol, "{sol:?}");
}

#[test]
fn symmetric_arm_ties_at_zero_subsidy() {
    for mode in [Mode::AverageReward, Mode::Discounted(0.95)] {
        let sol = solve_subsidized(&action_symmetric_arm(), 0.0, mode, 1e-9, 100_000).unwrap();
        for z in 0..3 {
            assert_eq!(sol.q_active[z], sol.q_passive[z]);
            assert!(sol.is_passive(z));
        }
    }
    let eps = SolverParams::default().eps;
    for z in index_table(&action_symmetric_arm(), &SolverParams::default()).unwrap().0 {
        assert!(z.abs() <= eps);
    }
}

#[test]
fn discounted_q_values_match_linear_policy_evaluation() {
    let gamma = 0.95;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let mdp = random_arm(&mut rng, 3);
        let lambda = rng.random_range(-1.0..1.0);
        let sol = solve_subsidized(&mdp, lambda, Mode::Discounted(gamma), 1e-12, 100_000).unwrap();
        let policy: Vec<Action> = (0..3)
            .map(|z| if sol.is_passive(z) { Action::Passive } else { Action::Active })
            .collect();
        let sub = |a: Action| if a == Action::Passive { lambda } else { 0.0 };
        let a_mat = DMatrix::from_fn(3, 3, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - gamma * mdp.prob(i, policy[i], j)
        });
        let b = DVector::from_fn(3, |i, _| mdp.rewards(policy[i])[i] + sub(policy[i]));
        let v = a_mat.lu().solve(&b).unwrap();
        for z in 0..3 {
            for a in Action::ALL {
                let ev: f64 = (0..3).map(|j| mdp.prob(z, a, j) * v[j]).sum();
                let q = mdp.rewards(a)[z] + sub(a) + gamma * ev;
                let got = if a == Action::Passive { sol.q_passive[z] } else { sol.q_active[z] };
                assert!((q - got).abs() < 1e-8, "z {z} {a:?}: oracle {q} solver {got}");
            }
        }
    }
}

#[test]
fn random_indexable_arms_match_grid_scan() {
    let params = SolverParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 100 {
        let n = 2 + checked % 3;
        let mdp = random_arm(&mut rng, n);
        if !indexable_on_fine_grid(&mdp) {
            continue;
        }
        for z in 0..n {
            let fast = whittle_index(&mdp, z, &params).unwrap();
            let oracle = grid_scan(&mdp, z, &params).unwrap();
            assert!((fast - oracle).abs() <= params.eps, "arm {checked} state {z}: {fast} vs {oracle}");
        }
        checked += 1;
    }
}

#[test]
fn restart_table_matches_grid_scan() {
    let params = SolverParams::default();
    let arm = restart_arm(&Default::default());
    let table = index_table(&arm, &params).unwrap();
    for z in 0..arm.n_states() {
        let oracle = grid_scan(&arm, z, &params).unwrap();
        assert!((table.get(z) - oracle).abs() <= params.eps, "state {z}: {} vs {oracle}", table.get(z));
    }
}

#[test]
fn index_does_not_depend_on_initial_values() {
    let params = SolverParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let arms = [circulant_arm(), restart_arm(&Default::default())];
    for arm in &arms {
        for z in 0..arm.n_states() {
            let zero = whittle_index(arm, z, &params).unwrap();
            let init: Vec<f64> = (0..arm.n_states()).map(|_| rng.random_range(-10.0..10.0)).collect();
            let other = whittle_index_from(arm, z, &params, &init).unwrap();
            assert!((zero - other).abs() <= 2.0 * params.eps, "{zero} vs {other}");
        }
    }
}

#[test]
fn benefit_is_non_increasing_in_subsidy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut arms = vec![circulant_arm(), restart_arm(&Default::default())];
    while arms.len() < 12 {
        let a = random_arm(&mut rng, 3);
        if indexable_on_fine_grid(&a) {
            arms.push(a);
        }
    }
    for (k, arm) in arms.iter().enumerate() {
        let grid = lambda_grid(SolverParams::default().bound_for(arm), 0.05);
        let mut prev: Option<Vec<f64>> = None;
        for &l in &grid {
            let sol = solve_subsidized(arm, l, Mode::AverageReward, 1e-10, 100_000).unwrap();
            let b: Vec<f64> = (0..arm.n_states()).map(|z| sol.benefit(z)).collect();
            if let Some(p) = &prev {
                for z in 0..b.len() {
                    assert!(b[z] <= p[z] + 1e-7, "arm {k} state {z} at {l}: {} > {}", b[z], p[z]);
                }
            }
            prev = Some(b);
        }
    }
}

#[test]
fn indexability_of_presets() {
    let grid = lambda_grid(3.0, 0.05);
    for arm in [circulant_arm(), action_symmetric_arm()] {
        assert_eq!(
            check_indexability(&arm, &grid, Mode::AverageReward, 1e-9, 100_000).unwrap(),
            Indexability::Indexable
        );
    }
    let restart = restart_arm(&Default::default());
    let g = lambda_grid(SolverParams::default().bound_for(&restart), 0.05);
    assert!(check_indexability(&restart, &g, Mode::AverageReward, 1e-9, 100_000)
        .unwrap()
        .is_indexable());
}

#[test]
fn non_indexable_preset_has_a_counterexample() {
    let arm = non_indexable_arm();
    let grid = lambda_grid(SolverParams::default().bound_for(&arm), 0.05);
    match check_indexability(&arm, &grid, Mode::AverageReward, 1e-9, 100_000).unwrap() {
        Indexability::Exit { lambda_lo, lambda_hi, state } => {
            assert!(lambda_lo < lambda_hi);
            assert!(is_passive(&arm, state, lambda_lo, Mode::AverageReward));
            assert!(!is_passive(&arm, state, lambda_hi, Mode::AverageReward));
        }
        other => panic!("expected a passive-set exit, got {other:?}"),
    }
    assert!(matches!(
        whittle_index(&arm, 0, &SolverParams::default()),
        Err(rmab::Error::NonIndexable { state: 0 })
    ));
}

#[test]
fn literal_mentoring_defaults_have_zero_indices() {
    let arm = instances::mentoring_arm(&Default::default());
    let eps = SolverParams::default().eps;
    for x in index_table(&arm, &SolverParams::default()).unwrap().0 {
        assert!(x.abs() <= eps, "{x}");
    }
}

#[test]
fn bracket_widens_past_the_default_for_sticky_arms() {
    use rmab::instances::{MaternalCategory, PERSUADABLE};
    let params = SolverParams::default();
    let mut previous = f64::INFINITY;
    for cat in [MaternalCategory::A, MaternalCategory::B, MaternalCategory::C] {
        let arm = instances::maternal_arm(&cat, &Default::default());
        let t = index_table(&arm, &params).unwrap();
        let p = t.get(PERSUADABLE);
        assert!(p < previous, "{cat:?}: {t:?}");
        previous = p;
        for z in [0, 2] {
            assert!(t.get(z).abs() <= params.eps, "{t:?}");
        }
        assert!(!is_passive(&arm, PERSUADABLE, p - params.eps, Mode::AverageReward));
        assert!(is_passive(&arm, PERSUADABLE, p + params.eps, Mode::AverageReward));
    }
    let a = instances::maternal_arm(&MaternalCategory::A, &Default::default());
    assert!(index_table(&a, &params).unwrap().get(PERSUADABLE) > params.bound_for(&a));

    let fixed = SolverParams { lambda_bound: Some(params.bound_for(&a)), ..params };
    assert!(matches!(
        whittle_index(&a, PERSUADABLE, &fixed),
        Err(rmab::Error::IndexOutsideBound { state: PERSUADABLE, .. })
    ));
}
