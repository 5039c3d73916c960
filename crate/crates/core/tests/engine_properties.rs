use sppa_core::{
    cyclic_ppa_run, estimate_objective, run, sppa_step, step_residual, EuclideanPoint, Execution,
    Marginal, ProxVariant, Sampler, SpacePoint, SplitMix64, StepSchedule,
};

#[test]
fn per_step_inequality_on_random_steps() {
    for (k, v) in ProxVariant::ALL.into_iter().enumerate() {
        let worst = Execution::default().min_indexed(10_000, |i| {
            let mut rng = SplitMix64::derive(50 + k as u64, i as u64);
            let (space, req) = v.random_request(&mut rng);
            let next = sppa_step(req.x(), req.marginal(), req.lambda()).unwrap();
            let y = space.random_in_ball(req.x(), 20.0, &mut rng);
            step_residual(req.x(), &next, req.marginal(), req.lambda(), &y).unwrap()
        });
        assert!(worst >= -1e-9, "{}: {worst}", v.name());
    }
}

fn e(c: &[f64]) -> EuclideanPoint {
    EuclideanPoint::new(c.to_vec()).unwrap()
}

#[test]
fn running_minimum_reaches_least_squares_optimum() {
    // Consistent system: x* = (1, -1) solves every row.
    let rows = [
        ([1.0, 0.0], 1.0),
        ([0.0, 1.0], -1.0),
        ([1.0, 1.0], 0.0),
        ([2.0, -1.0], 3.0),
    ];
    let support: Vec<Marginal> = rows
        .iter()
        .map(|(a, b)| Marginal::SqAffine { a: e(a), b: *b })
        .collect();
    let sampler = Sampler::uniform(support.clone(), 11).unwrap();
    let x_star = SpacePoint::Euclidean(e(&[1.0, -1.0]));
    assert_eq!(estimate_objective(&x_star, &sampler).unwrap(), 0.0);

    let start = SpacePoint::Euclidean(e(&[5.0, 5.0]));
    let sched = StepSchedule::new(10.0, 1.0, 0).unwrap();
    let trace = run(&start, &sampler, &sched, 20_000, Some(&x_star)).unwrap();
    assert!(trace.final_distance().unwrap() < 1e-6);
    assert!(trace.min_residual().unwrap() >= -1e-9);
    let rm = trace.running_min_objective();
    assert!(rm.windows(2).all(|w| w[1] <= w[0]));

    let cyclic = cyclic_ppa_run(&start, &support, &sched, 5_000, Some(&x_star)).unwrap();
    assert!(cyclic.final_distance().unwrap() < 1e-6);
}

#[test]
fn identical_inputs_identical_traces() {
    let support = vec![
        Marginal::AbsAffine {
            a: e(&[1.0, 2.0]),
            b: 0.5,
        },
        Marginal::AbsAffine {
            a: e(&[-1.0, 0.5]),
            b: 1.0,
        },
        Marginal::AbsAffine {
            a: e(&[0.0, 1.0]),
            b: -2.0,
        },
    ];
    let sampler = Sampler::new(support, vec![0.5, 0.25, 0.25], 99).unwrap();
    let start = SpacePoint::Euclidean(e(&[0.0, 0.0]));
    let sched = StepSchedule::new(0.5, 0.8, 2).unwrap();
    let a = run(&start, &sampler, &sched, 5_000, None).unwrap();
    let b = run(&start, &sampler, &sched, 5_000, None).unwrap();
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert_eq!(ra.point, rb.point);
        assert_eq!(ra.objective.to_bits(), rb.objective.to_bits());
    }
}
