use phasekit::blockenc::OracleTable;
use phasekit::sampler::{
    error_budget, exact_distribution, max_element_error, query_scaling_sweep, sample,
    separation_instance, truncation_bits, tv_distance, write_sweep_csv, BudgetMode, Pipeline,
    DEFAULT_ETA,
};
use phasekit::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn separation_pipeline(n: usize, eps: f64) -> Pipeline {
    Pipeline::build(
        separation_instance(n).unwrap(),
        eps,
        1,
        BudgetMode::Element,
        DEFAULT_ETA,
    )
    .unwrap()
}

#[test]
fn budget_examples() {
    let table = separation_instance(4).unwrap();
    let (b, t) = error_budget(&table, 0.1, 1, BudgetMode::Element).unwrap();
    assert!((b.c_bar - 3.0 / 16.0).abs() < 1e-15);
    assert!((b.eps_prime - 3.0 / 320.0).abs() < 1e-15);
    assert!(b.holds());
    assert!(t.sup_error <= b.eps_prime / 16.0);
    assert_eq!(b.d, t.degree);

    assert_eq!(truncation_bits(0.125), 5);
    assert_eq!(truncation_bits(4.0), 1);

    // A vacuous target still builds a budget but is flagged.
    let (b, _) = error_budget(&table, 2.0, 1, BudgetMode::Element).unwrap();
    assert!(!b.eps_prime_in_range);
    assert!(!b.holds());

    let (tv, _) = error_budget(&table, 0.1, 1, BudgetMode::Tv).unwrap();
    assert!((tv.eps_element - 0.025).abs() < 1e-15);

    assert!(error_budget(&table, 0.0, 1, BudgetMode::Element).is_err());
    let zeros = OracleTable::new(vec![0.0; 3], 3).unwrap();
    assert!(matches!(
        error_budget(&zeros, 0.1, 1, BudgetMode::Element),
        Err(Error::ZeroSuccess)
    ));
}

#[test]
fn separation_examples() {
    assert_eq!(separation_instance(2).unwrap().values(), &[0.25, 0.125]);
    assert_eq!(
        separation_instance(4).unwrap().values(),
        &[0.25, 0.25, 0.125, 0.125]
    );
    assert!(separation_instance(3).is_err());
    assert!(separation_instance(0).is_err());
    let target = separation_instance(4)
        .unwrap()
        .target_distribution()
        .unwrap();
    let want = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
    for (a, b) in target.iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn tv_examples() {
    assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
    assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
    let d = tv_distance(&[0.5, 0.5], &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
    assert!((d - 1.0 / 6.0).abs() < 1e-15);
    assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    assert!(max_element_error(&[1.0], &[0.5, 0.5]).is_err());
}

#[test]
fn single_element_is_always_sampled() {
    let table = OracleTable::new(vec![0.3], 8).unwrap();
    let p = Pipeline::build(table, 0.05, 1, BudgetMode::Element, DEFAULT_ETA).unwrap();
    assert_eq!(exact_distribution(&p).unwrap(), vec![1.0]);
    let r = sample(&p, 100, 1).unwrap();
    assert_eq!(r.counts, vec![100]);
}

#[test]
fn uniform_values_give_a_uniform_distribution() {
    let table = OracleTable::new(vec![0.2; 8], 8).unwrap();
    let p = Pipeline::build(table, 0.05, 1, BudgetMode::Element, DEFAULT_ETA).unwrap();
    for q in exact_distribution(&p).unwrap() {
        assert!((q - 0.125).abs() < 1e-12);
    }
}

#[test]
fn exact_distribution_meets_the_element_target() {
    for eps in [0.1, 0.01] {
        let p = separation_pipeline(4, eps);
        let q = exact_distribution(&p).unwrap();
        let target = p.table.target_distribution().unwrap();
        assert!(max_element_error(&q, &target).unwrap() <= eps);
    }
}

#[test]
fn random_tables_meet_the_element_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..5 {
        let n = rng.random_range(1..=24);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.99)).collect();
        let table = OracleTable::new(values, 20).unwrap();
        let p = Pipeline::build(table, 0.05, 1, BudgetMode::Element, DEFAULT_ETA).unwrap();
        let q = exact_distribution(&p).unwrap();
        let target = p.table.target_distribution().unwrap();
        assert!(max_element_error(&q, &target).unwrap() <= 0.05);
        assert!(p.amplified.success_probability() >= 0.5);
    }
}

#[test]
fn tv_mode_bounds_total_variation() {
    let eps = 0.1;
    let p = Pipeline::build(
        separation_instance(8).unwrap(),
        eps,
        1,
        BudgetMode::Tv,
        DEFAULT_ETA,
    )
    .unwrap();
    let q = exact_distribution(&p).unwrap();
    let target = p.table.target_distribution().unwrap();
    assert!(tv_distance(&q, &target).unwrap() <= eps);
}

#[test]
fn seeded_runs_are_deterministic() {
    let p = separation_pipeline(8, 0.05);
    let a = sample(&p, 2000, 7).unwrap();
    let b = sample(&p, 2000, 7).unwrap();
    assert_eq!(a, b);
    let c = sample(&p, 2000, 8).unwrap();
    assert_ne!(a.counts, c.counts);
}

#[test]
fn empirical_tv_stays_within_the_shot_noise_bound() {
    let p = separation_pipeline(4, 0.05);
    let n_samples = 2000u64;
    // E[TV] ≤ ½ Σ √(q(1-q)/n); three times that is a generous bound.
    let exact = exact_distribution(&p).unwrap();
    let bound = 3.0
        * 0.5
        * exact
            .iter()
            .map(|q| (q * (1.0 - q) / n_samples as f64).sqrt())
            .sum::<f64>();
    let within = (0..100u64)
        .filter(|&seed| sample(&p, n_samples, seed).unwrap().tv_empirical <= bound)
        .count();
    assert!(within >= 99, "{within}/100 within {bound}");
}

#[test]
fn query_accounting() {
    let p = separation_pipeline(4, 0.05);
    let r = sample(&p, 500, 3).unwrap();
    assert_eq!(r.oracle_queries, r.trials * r.oracle_calls_per_trial);
    assert_eq!(r.trials, r.n_samples + r.failed_post_selections);
    assert_eq!(r.counts.iter().sum::<u64>(), 500);
    let k = r.amplification_iterations as u64;
    let u = (p.pair.seq0.degree() + p.pair.seq1.degree()) as u64;
    assert_eq!(r.oracle_calls_per_trial, (2 * k + 1) * u * 2);
    assert!(sample(&p, 0, 3).is_err());
}

#[test]
fn sweep_rows_and_csv() {
    let rows = query_scaling_sweep(1, &[0.1, 0.05], &[2, 4], 200, 1, DEFAULT_ETA).unwrap();
    assert_eq!(rows.len(), 4);
    // Queries depend on eps but not on N for the separation family.
    assert_eq!(rows[0].queries, rows[1].queries);
    assert!(rows[2].queries > rows[0].queries);
    let mut out = Vec::new();
    write_sweep_csv(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,eps,p,queries,tv_exact,tv_empirical");
    assert_eq!(lines.len(), 5);
}
