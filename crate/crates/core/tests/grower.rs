use proptest::prelude::*;
use rhizome::field::{build_field, FieldParams, Source, Terrain};
use rhizome::grower::{
    grow, grow_step, rng_from_seed, run_growth, Apex, Environment, GrowthParams, RootNetwork, Scenario, SeedSpec,
};
use rhizome::Point;

fn obstacle_terrain(w: usize, h: usize, blocked: &[bool], free: &[(usize, usize)]) -> Terrain {
    let mut t = Terrain::open(w, h);
    for (i, b) in blocked.iter().enumerate() {
        if *b {
            t.set_obstacle(i % w, i / w, true);
        }
    }
    for &(x, y) in free {
        t.set_obstacle(x, y, false);
    }
    t
}

fn noisy(seed: u64, branch_rate: f64) -> GrowthParams {
    GrowthParams {
        w_noise: 0.7,
        branch_rate,
        rng_seed: seed,
        ..GrowthParams::default()
    }
}

fn scenario(t: Terrain, params: GrowthParams, steps: usize) -> Scenario {
    let (w, h) = (t.width(), t.height());
    let seed = SeedSpec {
        position: Terrain::cell_center(w / 2, h / 2),
        heading: Some(Point::new(1.0, 0.0)),
    };
    let mut s = Scenario::new(t, vec![seed], params, steps);
    s.attractants.push(Source::new(w - 1, 0, 1.0));
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn same_seed_same_network(
        seed in any::<u64>(),
        blocked in prop::collection::vec(prop::bool::weighted(0.15), 20 * 16),
    ) {
        let t = obstacle_terrain(20, 16, &blocked, &[(10, 8), (19, 0)]);
        let s = scenario(t, noisy(seed, 0.05), 150);
        prop_assert_eq!(run_growth(&s).unwrap(), run_growth(&s).unwrap());
    }

    #[test]
    fn headings_stay_unit_and_trails_avoid_obstacles(
        seed in any::<u64>(),
        blocked in prop::collection::vec(prop::bool::weighted(0.2), 18 * 18),
    ) {
        let t = obstacle_terrain(18, 18, &blocked, &[(9, 9), (1, 1)]);
        let p = GrowthParams { w_align: 0.5, ..noisy(seed, 0.08) };
        let field = build_field(&[Source::new(1, 1, 1.0)], &t, &FieldParams::default()).unwrap().field;
        let env = Environment::new(&t, &p).with_attractant(&field);
        let start = Terrain::cell_center(9, 9);
        let mut apexes = vec![Apex::new(0, start, Point::new(0.0, 1.0), p.speed)];
        let mut rng = rng_from_seed(seed);
        for _ in 0..120 {
            grow_step(&mut apexes, &env, &p, &mut rng).unwrap();
            for a in apexes.iter().filter(|a| a.is_active()) {
                prop_assert!((a.heading.norm() - 1.0).abs() <= 1e-9);
            }
        }
        for a in &apexes {
            for q in &a.trail {
                let (x, y) = t.cell_of(*q).expect("trail point inside the domain");
                prop_assert!(t.is_passable(x, y));
            }
            // Moves always cover exactly one speed length; reflections do not move.
            for w in a.trail.windows(2) {
                prop_assert!((w[0].dist(w[1]) - a.speed).abs() <= 1e-9);
            }
            prop_assert_eq!(a.speed, p.speed);
        }
    }

    #[test]
    fn branching_keeps_a_forest(seed in any::<u64>(), steps in 1usize..200) {
        let t = Terrain::open(40, 40);
        let s = scenario(t, GrowthParams { max_apexes: 30, ..noisy(seed, 0.2) }, steps);
        let net = run_growth(&s).unwrap();
        prop_assert!(net.is_forest());
        prop_assert!(net.children_start_on_parents());
        prop_assert_eq!(RootNetwork::from_csv(&net.to_csv()).unwrap(), net);
    }
}

#[test]
fn ballistic_apex_draws_a_straight_line() {
    let t = Terrain::open(50, 20);
    let p = GrowthParams { w_gradient: 0.0, ..GrowthParams::default() };
    let env = Environment::new(&t, &p);
    let dir = Point::new(3.0, 1.0).normalized().unwrap();
    let mut apexes = vec![Apex::new(0, Point::new(2.5, 2.5), dir, 0.5)];
    grow(&mut apexes, &env, &p, &mut rng_from_seed(1), 40).unwrap();
    let trail = &apexes[0].trail;
    assert!(trail.len() > 30);
    for q in trail {
        assert!((*q - trail[0]).cross(dir).abs() < 1e-9);
    }
}

#[test]
fn pure_gradient_heading_is_the_normalised_gradient() {
    let t = Terrain::open(30, 30);
    let field = build_field(&[Source::new(25, 5, 1.0)], &t, &FieldParams::default()).unwrap().field;
    let p = GrowthParams {
        w_inertia: 0.0,
        w_gradient: 1.0,
        ..GrowthParams::default()
    };
    let env = Environment::new(&t, &p).with_attractant(&field);
    let start = Point::new(10.2, 20.7);
    let g = env.chemical_gradient(start).unwrap().normalized().unwrap();
    let mut apexes = vec![Apex::new(0, start, Point::new(-1.0, 0.0), 0.5)];
    grow_step(&mut apexes, &env, &p, &mut rng_from_seed(0)).unwrap();
    assert!((apexes[0].heading - g).norm() < 1e-12);
}

#[test]
fn wall_reflects_heading_and_apex_stays() {
    let mut t = Terrain::open(10, 5);
    for y in 0..5 {
        t.set_obstacle(6, y, true);
    }
    let p = GrowthParams { w_gradient: 0.0, ..GrowthParams::default() };
    let env = Environment::new(&t, &p);
    let start = Point::new(5.8, 2.5);
    let mut apexes = vec![Apex::new(0, start, Point::new(1.0, 0.0), 0.5)];
    grow_step(&mut apexes, &env, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(apexes[0].heading, Point::new(-1.0, 0.0));
    assert_eq!(apexes[0].position, start);
}

#[test]
fn plateau_above_elevation_limit_is_never_entered() {
    let mut t = Terrain::open(30, 30);
    for y in 10..20 {
        for x in 10..20 {
            t.set_elevation(x, y, 5.0);
        }
    }
    for seed in 0..5 {
        let p = GrowthParams {
            elevation_limit: 1.0,
            ..noisy(seed, 0.05)
        };
        let seeds = vec![SeedSpec {
            position: Point::new(3.5, 15.5),
            heading: Some(Point::new(1.0, 0.0)),
        }];
        let mut s = Scenario::new(t.clone(), seeds, p, 400);
        s.attractants.push(Source::new(27, 15, 1.0));
        let net = run_growth(&s).unwrap();
        for tr in &net.trails {
            for q in &tr.points {
                let (x, y) = t.cell_of(*q).unwrap();
                assert!(t.elevation(x, y) <= 1.0, "seed {seed}: trail on plateau at {q:?}");
            }
        }
    }
}

#[test]
fn apex_seeded_in_obstacle_is_rejected() {
    let mut t = Terrain::open(5, 5);
    t.set_obstacle(2, 2, true);
    let p = GrowthParams::default();
    let env = Environment::new(&t, &p);
    let mut apexes = vec![Apex::new(0, Point::new(2.5, 2.5), Point::new(1.0, 0.0), 0.5)];
    assert!(grow_step(&mut apexes, &env, &p, &mut rng_from_seed(0)).is_err());
}

fn mean_pairwise_cosine(apexes: &[Apex]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for i in 0..apexes.len() {
        for j in i + 1..apexes.len() {
            sum += apexes[i].heading.dot(apexes[j].heading);
            n += 1;
        }
    }
    sum / n as f64
}

#[test]
fn alignment_makes_swarms_coherent() {
    let t = Terrain::open(400, 40);
    let run = |w_align: f64, seed: u64| {
        let p = GrowthParams {
            w_align,
            w_gradient: 0.0,
            w_noise: 0.6,
            align_radius: 8.0,
            rng_seed: seed,
            ..GrowthParams::default()
        };
        let env = Environment::new(&t, &p);
        let mut rng = rng_from_seed(seed);
        let mut apexes: Vec<Apex> = (0..20)
            .map(|i| {
                let pos = Point::new(5.5 + (i % 5) as f64 * 2.0, 12.5 + (i / 5) as f64 * 4.0);
                let angle = ((i * 7919) % 100) as f64 / 100.0 * 1.6 - 0.8;
                Apex::new(i, pos, Point::from_angle(angle), 0.5)
            })
            .collect();
        grow(&mut apexes, &env, &p, &mut rng, 150).unwrap();
        mean_pairwise_cosine(&apexes)
    };
    let (mut with, mut without) = (0.0, 0.0);
    for seed in 0..10 {
        with += run(3.0, seed);
        without += run(0.0, seed);
    }
    assert!(with > without, "aligned {with} vs free {without}");
}
