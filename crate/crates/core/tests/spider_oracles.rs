//! Cross-checks of the closed-form Fréchet oracles against brute force.

use sppa_core::{
    distance, frechet_mean_oracle, frechet_median_oracle, grid_search_oracle, Error, SpacePoint,
    SpiderPoint, SpiderSpace, SplitMix64, WeightedSample,
};

fn random_sample(rng: &mut SplitMix64) -> (SpiderSpace, WeightedSample) {
    let space = SpiderSpace::new(3 + rng.below(3)).unwrap();
    let n = 1 + rng.below(8);
    let points: Vec<SpiderPoint> = (0..n).map(|_| space.random_point(4.0, rng)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.range(0.05, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // Make the sum exactly representable as 1 within the sample tolerance.
    let drift: f64 = 1.0 - weights.iter().sum::<f64>();
    weights[0] += drift;
    (space, WeightedSample::new(points, weights).unwrap())
}

/// Smallest |right derivative| of the distance objective over all
/// breakpoints on all legs; small values mean the minimizer is nearly flat.
fn median_margin(space: &SpiderSpace, s: &WeightedSample) -> f64 {
    let mut margin = f64::INFINITY;
    for leg in 1..=space.legs() {
        let mut radii: Vec<f64> = s
            .points()
            .iter()
            .filter(|p| p.leg() == leg)
            .map(|p| p.radius())
            .collect();
        radii.push(0.0);
        for r in radii {
            let slope: f64 = s
                .iter()
                .map(|(t, w)| {
                    if t.leg() == leg && t.radius() > r {
                        -w
                    } else {
                        w
                    }
                })
                .sum();
            margin = margin.min(slope.abs());
        }
    }
    margin
}

#[test]
fn mean_oracle_matches_grid_search() {
    let mut rng = SplitMix64::new(2024);
    let step = 1e-3;
    for _ in 0..200 {
        let (space, s) = random_sample(&mut rng);
        let exact = frechet_mean_oracle(&s);
        let grid = grid_search_oracle(&space, &s, 2, step).unwrap();
        let d = distance(&exact, &grid).unwrap();
        assert!(d <= 2.0 * step, "{s:?}: oracle {exact} grid {grid}");
    }
}

#[test]
fn median_oracle_matches_grid_search() {
    let mut rng = SplitMix64::new(4048);
    let step = 1e-3;
    let mut checked = 0;
    while checked < 200 {
        let (space, s) = random_sample(&mut rng);
        if median_margin(&space, &s) < 1e-2 {
            continue;
        }
        let exact = frechet_median_oracle(&s).unwrap();
        let grid = grid_search_oracle(&space, &s, 1, step).unwrap();
        let d = distance(&exact, &grid).unwrap();
        assert!(d <= 2.0 * step, "{s:?}: oracle {exact} grid {grid}");
        checked += 1;
    }
}

#[test]
fn oracle_outputs_beat_random_points() {
    let mut rng = SplitMix64::new(77);
    for _ in 0..100 {
        let (space, s) = random_sample(&mut rng);
        let mean = *frechet_mean_oracle(&s).as_spider().unwrap();
        let median = match frechet_median_oracle(&s) {
            Ok(p) => Some(*p.as_spider().unwrap()),
            Err(Error::DegenerateMedian) => None,
            Err(e) => panic!("{e}"),
        };
        for _ in 0..1000 {
            let p = space.random_point(6.0, &mut rng);
            assert!(s.objective(&mean, 2) <= s.objective(&p, 2) + 1e-12);
            if let Some(m) = median {
                assert!(s.objective(&m, 1) <= s.objective(&p, 1) + 1e-12);
            }
        }
    }
}

#[test]
fn two_point_mean_is_validated_to_grid_precision() {
    let s = WeightedSample::uniform(vec![
        SpiderPoint::new(1, 3.0).unwrap(),
        SpiderPoint::new(2, 1.0).unwrap(),
    ])
    .unwrap();
    let space = SpiderSpace::new(3).unwrap();
    let exact = frechet_mean_oracle(&s);
    assert_eq!(exact, SpacePoint::spider(1, 1.0).unwrap());
    let grid = grid_search_oracle(&space, &s, 2, 1e-4).unwrap();
    assert!(distance(&exact, &grid).unwrap() <= 2e-4);
}
