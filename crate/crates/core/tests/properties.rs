use proptest::prelude::*;
use smoothperc_core::oracle::{brute_projection, exact_feasibility_2d, reference_min_gnorm};
use smoothperc_core::solvers::{isnkpvn, nkp, nvn, snkp, snkpvn, theoretical_bound};
use smoothperc_core::{
    check_certificate, loss, project_simplex, smoothed_loss, synth, Algorithm, Certificate,
    Dataset, GramMatrix, Kernel, Outcome, Prox, SimplexVector, SolverConfig,
};

fn kernel_strategy() -> impl Strategy<Value = Kernel> {
    prop_oneof![
        Just(Kernel::Linear),
        (1u32..4, 0.0..2.0f64).prop_map(|(degree, offset)| Kernel::Polynomial { degree, offset }),
        (0.3..3.0f64).prop_map(|bandwidth| Kernel::Rbf { bandwidth }),
    ]
}

fn dataset_strategy(max_n: usize, d: usize) -> impl Strategy<Value = Dataset> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-3.0..3.0f64, d), n),
                prop::collection::vec(prop::bool::ANY, n),
            )
        })
        .prop_filter_map("zero point", |(points, signs)| {
            if points
                .iter()
                .any(|x| x.iter().map(|v| v * v).sum::<f64>() < 1e-6)
            {
                return None;
            }
            let labels = signs.iter().map(|&s| if s { 1.0 } else { -1.0 }).collect();
            Dataset::new(points, labels).ok()
        })
}

fn simplex_strategy(n: usize) -> impl Strategy<Value = SimplexVector> {
    prop::collection::vec(0.0..1.0f64, n).prop_map(|w| {
        if w.iter().sum::<f64>() < 1e-9 {
            SimplexVector::uniform(w.len())
        } else {
            SimplexVector::renormalize(w)
        }
    })
}

/// `sqrt` of the rounding error in evaluating `p^T G p`.
const NORM_FLOOR: f64 = 1e-7;

fn norm_l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn norm_l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn gram(data: &Dataset) -> GramMatrix {
    GramMatrix::build(data, &Kernel::Linear).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gram_is_normalized_and_psd(data in dataset_strategy(8, 3), kernel in kernel_strategy(),
                                  v in prop::collection::vec(-1.0..1.0f64, 8)) {
        let g = GramMatrix::build(&data, &kernel).unwrap();
        let n = g.size();
        for i in 0..n {
            prop_assert_eq!(g.get(i, i), 1.0);
            for j in 0..n {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
                prop_assert!(g.get(i, j).abs() <= 1.0 + 1e-12);
            }
        }
        let v = &v[..n];
        prop_assert!(g.inner(v, v).unwrap() >= -1e-9 * norm_l2(v).powi(2).max(1.0));
    }

    #[test]
    fn gnorm_chain(data in dataset_strategy(10, 3), kernel in kernel_strategy(),
                   a in prop::collection::vec(-5.0..5.0f64, 10)) {
        let g = GramMatrix::build(&data, &kernel).unwrap();
        let a = &a[..g.size()];
        let gn = g.norm(a).unwrap();
        prop_assert!(gn <= norm_l1(a) + 1e-9);
        prop_assert!(norm_l1(a) <= (a.len() as f64).sqrt() * norm_l2(a) + 1e-9);
    }

    #[test]
    fn gnorm_triangle_inequality(data in dataset_strategy(6, 2),
                                 a in prop::collection::vec(-2.0..2.0f64, 6),
                                 b in prop::collection::vec(-2.0..2.0f64, 6)) {
        let g = gram(&data);
        let n = g.size();
        let (a, b) = (&a[..n], &b[..n]);
        let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        prop_assert!(g.norm(&sum).unwrap() <= g.norm(a).unwrap() + g.norm(b).unwrap() + 1e-9);
    }

    #[test]
    fn linear_gram_of_unit_points_is_signed_inner_product(data in dataset_strategy(6, 3)) {
        let g = gram(&data);
        let unit: Vec<Vec<f64>> = data.points().map(|x| {
            let r = norm_l2(x);
            x.iter().map(|v| v / r).collect()
        }).collect();
        for i in 0..data.len() {
            for j in 0..data.len() {
                let ip: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
                let expect = data.label(i) * data.label(j) * ip;
                prop_assert!((g.get(i, j) - expect).abs() <= 1e-12, "{} vs {}", g.get(i, j), expect);
            }
        }
    }

    #[test]
    fn projection_matches_brute_force(v in prop::collection::vec(-3.0..3.0f64, 1..=6)) {
        let fast = project_simplex(&v);
        let slow = brute_projection(&v).unwrap();
        for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_is_closest_point(v in prop::collection::vec(-3.0..3.0f64, 5), q in simplex_strategy(5)) {
        let p = project_simplex(&v);
        let dist = |x: &[f64]| x.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        prop_assert!(dist(p.as_slice()) <= dist(q.as_slice()) + 1e-12);
    }

    #[test]
    fn smoothed_argmin_is_optimal(gv in prop::collection::vec(-2.0..2.0f64, 5), mu in 1e-3..10.0f64,
                                  q in simplex_strategy(5), center in simplex_strategy(5)) {
        for prox in [Prox::entropy(5), Prox::euclidean(center.clone())] {
            let p = prox.smoothed_argmin(&gv, mu).unwrap();
            let obj = |x: &[f64]| x.iter().zip(&gv).map(|(a, b)| a * b).sum::<f64>() + mu * prox.value(x);
            prop_assert!(obj(p.as_slice()) <= obj(q.as_slice()) + 1e-10);
            prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn smoothed_argmin_tends_to_worst_case(gv in prop::collection::vec(-2.0..2.0f64, 5)) {
        let min = gv.iter().copied().fold(f64::INFINITY, f64::min);
        let runner_up = gv.iter().copied().filter(|&v| v > min).fold(f64::INFINITY, f64::min);
        prop_assume!(runner_up - min > 1e-2);
        for prox in [Prox::entropy(5), Prox::euclidean(SimplexVector::uniform(5))] {
            let p = prox.smoothed_argmin(&gv, 1e-5).unwrap();
            let at_min: f64 = p.as_slice().iter().zip(&gv).filter(|(_, &g)| g == min).map(|(x, _)| x).sum();
            prop_assert!(at_min >= 1.0 - 1e-6);
        }
    }

    #[test]
    fn prox_strong_convexity(p in simplex_strategy(6), q in simplex_strategy(6), t in 0.0..1.0f64,
                             center in simplex_strategy(6)) {
        for prox in [Prox::entropy(6), Prox::euclidean(center.clone())] {
            let mid: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            let diff: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| a - b).collect();
            let lhs = prox.value(&mid);
            let rhs = t * prox.value(p.as_slice()) + (1.0 - t) * prox.value(q.as_slice())
                - 0.5 * t * (1.0 - t) * prox.sharp_norm(&diff).powi(2);
            prop_assert!(lhs <= rhs + 1e-10, "{} > {}", lhs, rhs);
            prop_assert!(prox.value(p.as_slice()) >= 0.0);
            prop_assert!(prox.value(p.as_slice()) <= prox.sup_value() + 1e-12);
            prop_assert!(prox.value(prox.center().as_slice()).abs() <= 1e-12);
        }
    }

    #[test]
    fn smoothed_loss_sandwich(data in dataset_strategy(8, 3), kernel in kernel_strategy(),
                              a in prop::collection::vec(-2.0..2.0f64, 8), mu in 1e-4..5.0f64) {
        let g = GramMatrix::build(&data, &kernel).unwrap();
        let n = g.size();
        let a = &a[..n];
        let l = loss(&g, a).unwrap();
        for prox in [Prox::entropy(n), Prox::euclidean(SimplexVector::uniform(n))] {
            let lm = smoothed_loss(&g, &prox, a, mu).unwrap();
            prop_assert!(lm <= l + 1e-10);
            prop_assert!(lm >= l - mu * prox.sup_value() - 1e-10);
        }
    }

    #[test]
    fn negative_loss_gives_separator(data in dataset_strategy(6, 2), a in prop::collection::vec(-2.0..2.0f64, 6)) {
        let g = gram(&data);
        let a = &a[..g.size()];
        if loss(&g, a).unwrap() < 0.0 {
            prop_assert!(g.decision_values(a).unwrap().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn gordan_exclusivity(data in dataset_strategy(6, 2), a in prop::collection::vec(-2.0..2.0f64, 6),
                          p in simplex_strategy(6)) {
        let g = gram(&data);
        let n = g.size();
        let a = &a[..n];
        let p = SimplexVector::renormalize(p.as_slice()[..n].to_vec());
        if g.decision_values(a).unwrap().iter().all(|&v| v > 0.0) {
            // p^T G a > 0 forces G p != 0, so p cannot be an exact witness.
            prop_assert!(g.inner(p.as_slice(), a).unwrap() > 0.0);
            prop_assert!(g.norm(p.as_slice()).unwrap() > 0.0);
        }
    }
}

#[test]
fn smoothed_iterates_stay_in_simplex() {
    for seed in 0..10 {
        let data = synth::random_points(&mut synth::rng(seed), 12, 3);
        let g = gram(&data);
        let cfg = SolverConfig::default().with_max_iterations(25);
        for out in [
            snkp(&g, &cfg).unwrap(),
            snkpvn(&g, &SimplexVector::uniform(12), 1e-12, &cfg).unwrap(),
            nkp(&g, &cfg).unwrap(),
        ] {
            let alpha = match out.outcome {
                Outcome::Primal { alpha } | Outcome::Limit { alpha, .. } => alpha,
                Outcome::Dual { p, .. } => p.into_vec(),
            };
            assert!(alpha.iter().all(|&v| v >= 0.0), "seed {seed}");
            assert!(
                (alpha.iter().sum::<f64>() - 1.0).abs() <= 1e-9,
                "seed {seed}"
            );
        }
    }
}

#[test]
fn nvn_norm_is_nonincreasing() {
    for seed in 0..20 {
        let data = synth::random_points(&mut synth::rng(seed), 20, 3);
        let g = gram(&data);
        let cfg = SolverConfig::default()
            .with_epsilon(1e-3)
            .with_max_iterations(2000)
            .with_trace_every(1);
        let out = nvn(&g, &cfg).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1].p_gnorm <= w[0].p_gnorm + 1e-12, "seed {seed}: {w:?}");
        }
        for r in &out.trace {
            assert!(
                r.p_gnorm <= 1.0 / ((r.k + 1) as f64).sqrt() + 1e-9,
                "seed {seed}"
            );
        }
    }
}

#[test]
fn solvers_are_deterministic() {
    let data = synth::planted_separable(&mut synth::rng(3), 30, 4, 0.05);
    let g = gram(&data);
    let cfg = SolverConfig::default().with_trace_every(2);
    for solve in [snkp, nkp, nvn, isnkpvn] {
        assert_eq!(solve(&g, &cfg).unwrap(), solve(&g, &cfg).unwrap());
    }
}

#[test]
fn every_outcome_passes_its_certificate_check() {
    for seed in 0..20 {
        let data = if seed % 2 == 0 {
            synth::planted_separable(&mut synth::rng(seed), 16, 3, 0.05)
        } else {
            synth::random_points(&mut synth::rng(seed), 24, 3)
        };
        let g = gram(&data);
        let cfg = SolverConfig::default().with_epsilon(1e-4);
        for solve in [snkp, nkp, nvn, isnkpvn] {
            match solve(&g, &cfg).unwrap().outcome {
                Outcome::Primal { alpha } => assert!(matches!(
                    check_certificate(&g, &alpha, 1e-4),
                    Ok(Certificate::PrimalFeasible { .. })
                )),
                Outcome::Dual { p, g_norm } => {
                    assert!(g_norm <= 1e-4);
                    assert!(matches!(
                        check_certificate(&g, p.as_slice(), 1e-4),
                        Ok(Certificate::DualEpsilon { .. })
                    ));
                }
                Outcome::Limit { .. } => {}
            }
        }
    }
}

#[test]
fn iteration_bounds_on_separable_instances() {
    for seed in 0..50u64 {
        let n = 8 + (seed as usize * 7) % 57;
        let data =
            synth::planted_separable(&mut synth::rng(1000 + seed), n, 2 + seed as usize % 4, 0.05);
        let g = gram(&data);
        let rho = reference_min_gnorm(&g, 1e-9).unwrap().margin_estimate;
        for (alg, solve) in [
            (Algorithm::Nkp, nkp as fn(&GramMatrix, &SolverConfig) -> _),
            (Algorithm::Snkp, snkp),
        ] {
            let bound = theoretical_bound(alg, n, rho, 0.0).unwrap();
            let out = solve(&g, &SolverConfig::default()).unwrap();
            assert!(out.outcome.is_primal(), "seed {seed} {alg}");
            assert!(
                out.iterations <= bound,
                "seed {seed} {alg}: {} > {bound}",
                out.iterations
            );
        }
        let bound = theoretical_bound(Algorithm::Snkpvn, n, rho, 0.0).unwrap();
        let out = snkpvn(
            &g,
            &SimplexVector::uniform(n),
            1e-12,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(
            out.outcome.is_primal() && out.iterations <= bound,
            "seed {seed} snkpvn"
        );
    }
}

#[test]
fn oracle_agrees_with_angular_sweep() {
    use rand::Rng;
    let mut rng = synth::rng(2024);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.random_range(2..=9);
        let data = synth::random_points(&mut rng, n, 2);
        let g = gram(&data);
        let report = reference_min_gnorm(&g, 1e-10).unwrap();
        // Stay away from the boundary between the two regimes.
        if report.margin_estimate > 1e-7 && report.margin_estimate < 1e-3 {
            continue;
        }
        checked += 1;
        assert_eq!(
            report.margin_estimate > 1e-4,
            exact_feasibility_2d(&data).unwrap(),
            "instance {checked}: {report:?}"
        );
    }
}

#[test]
fn oracle_margin_shrinks_when_points_are_added() {
    for seed in 0..30 {
        let mut rng = synth::rng(500 + seed);
        let mut data = synth::planted_separable(&mut rng, 5, 3, 0.05);
        let extra = synth::random_points(&mut rng, 6, 3);
        let mut previous = reference_min_gnorm(&gram(&data), 1e-10)
            .unwrap()
            .margin_estimate;
        for i in 0..extra.len() {
            data = data.with_point(extra.point(i), extra.label(i)).unwrap();
            let m = reference_min_gnorm(&gram(&data), 1e-10)
                .unwrap()
                .margin_estimate;
            // Zero-margin instances only resolve ||p||_G down to the rounding
            // floor of p^T G p.
            assert!(
                m <= previous + 1e-9 || m <= NORM_FLOOR,
                "seed {seed}: {m} > {previous}"
            );
            previous = m;
        }
    }
}

#[test]
fn minimum_norm_point_attains_the_margin() {
    for seed in 0..20 {
        let data = synth::planted_separable(&mut synth::rng(seed), 12, 3, 0.1);
        let g = gram(&data);
        let report = reference_min_gnorm(&g, 1e-10).unwrap();
        let rho = report.margin_estimate;
        let p = report.minimizer.as_slice();
        let worst = g
            .decision_values(p)
            .unwrap()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        // The normalized separator p / ||p||_G has margin ||p||_G.
        assert!(
            (worst / rho - rho).abs() <= 1e-6,
            "seed {seed}: {} vs {rho}",
            worst / rho
        );
        assert!((loss(&g, p).unwrap() + 0.5 * rho * rho).abs() <= 1e-6);
    }
}
