use proptest::prelude::*;

use paretoset::artifact::{run, RunArtifact, RunConfig};
use paretoset::domain::{sample_preference, BoxBounds, PreferenceVector, RngStream};
use paretoset::metrics::{dominates, hypervolume_exact, igd_plus, nondominated_filter, strictly_dominates};
use paretoset::model::{distance_to_chain, sample_set, RelationKind, SetModel, VariantSpec};
use paretoset::moead::{evolve, MoeadConfig, Population};
use paretoset::problems::{Problem, SineCurve};
use paretoset::scalarize::tchebycheff_value;
use paretoset::train::TrainConfig;

fn variants() -> Vec<VariantSpec> {
    vec![
        VariantSpec::Plain,
        VariantSpec::Shared { indices: vec![2] },
        VariantSpec::Relation { kind: RelationKind::Sine, base: vec![0] },
        VariantSpec::Relation { kind: RelationKind::Poly, base: vec![0] },
        VariantSpec::Chain { vertices: 4 },
    ]
}

fn jittered(spec: &VariantSpec, bounds: &BoxBounds<f64>, scale: f64, rng: &mut RngStream) -> SetModel<f64> {
    let mut model = SetModel::init(spec, 2, bounds, 8, rng).unwrap();
    for block in model.blocks_mut() {
        for v in block.iter_mut() {
            *v += scale * rng.standard_normal();
        }
    }
    model
}

#[test]
fn a_million_preferences_lie_on_the_simplex() {
    let mut rng = RngStream::new(1);
    for m in [2, 3] {
        for _ in 0..500_000 {
            let p = sample_preference::<f64>(m, &mut rng).unwrap();
            assert!(p.iter().all(|&w| (0.0..=1.0).contains(&w)));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn forward_stays_in_box_for_many_random_models() {
    let bounds = BoxBounds::new(vec![0.0, -1.0, -1.0], vec![1.0, 1.0, 1.0]).unwrap();
    let mut rng = RngStream::new(2);
    let specs = variants();
    let mut probes = 0;
    while probes < 100_000 {
        for spec in &specs {
            let model = jittered(spec, &bounds, 5.0, &mut rng);
            for _ in 0..100 {
                let pref = sample_preference(2, &mut rng).unwrap();
                let x = model.forward(&pref, &bounds).unwrap();
                assert!(bounds.contains(&x), "{} left the box: {x:?}", spec.name());
                probes += 1;
            }
        }
    }
}

#[test]
fn sampling_is_prefix_consistent() {
    let p = SineCurve::<f64>::new(3).unwrap();
    let mut rng = RngStream::new(3);
    let model = SetModel::init(&VariantSpec::Plain, 2, &p.spec().bounds, 16, &mut rng).unwrap();
    let short = sample_set(&model, &p, 100, &mut RngStream::new(9)).unwrap();
    let long = sample_set(&model, &p, 1000, &mut RngStream::new(9)).unwrap();
    assert_eq!(short[..], long[..100]);
    let one = sample_set(&model, &p, 1, &mut RngStream::new(9)).unwrap();
    let x = model.forward(&one[0].pref, &p.spec().bounds).unwrap();
    assert_eq!(one[0].x, x);
    assert_eq!(one[0].f, p.evaluate(&x).unwrap());
}

#[test]
fn artifact_round_trip_is_field_for_field() {
    for spec in variants() {
        let cfg = TrainConfig { iters: 20, seed: 4, ..TrainConfig::default() };
        let a = run(&RunConfig::epsl("syn", spec, cfg), None).unwrap();
        let b = RunArtifact::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.consistency_error().unwrap(), 0.0);
    }
    let m = run(&RunConfig::moead("syn", MoeadConfig { pop_size: 20, ..MoeadConfig::default() }, 200, 4), None).unwrap();
    assert_eq!(m, RunArtifact::from_json(&m.to_json().unwrap()).unwrap());
}

#[test]
fn artifact_rejects_other_schema_versions() {
    let cfg = TrainConfig { iters: 1, ..TrainConfig::default() };
    let a = run(&RunConfig::epsl("syn", VariantSpec::Plain, cfg), None).unwrap();
    let text = a.to_json().unwrap().replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
    assert!(RunArtifact::from_json(&text).is_err());
}

#[test]
fn moead_ideal_is_monotone_and_deterministic() {
    let p = SineCurve::<f64>::new(3).unwrap();
    let cfg = MoeadConfig { pop_size: 30, neighbors: 5, ..MoeadConfig::default() };
    let mut rng = RngStream::new(5);
    let mut pop = Population::init(&p, &cfg, &mut rng).unwrap();
    for _ in 0..10 {
        let before = pop.utopia.z_star.clone();
        pop = evolve(&p, pop, &cfg, 60, &mut rng).unwrap();
        assert!(pop.utopia.z_star.iter().zip(&before).all(|(a, b)| a <= b));
    }
    let replay = |seed| {
        let mut rng = RngStream::new(seed);
        let pop = Population::init(&p, &cfg, &mut rng).unwrap();
        evolve(&p, pop, &cfg, 500, &mut rng).unwrap()
    };
    assert_eq!(replay(8), replay(8));
}

#[test]
fn moead_subproblem_values_never_increase_with_fixed_ideal() {
    let p = SineCurve::<f64>::new(3).unwrap();
    let cfg = MoeadConfig { pop_size: 30, neighbors: 5, ..MoeadConfig::default() };
    let mut rng = RngStream::new(6);
    let mut pop = Population::init(&p, &cfg, &mut rng).unwrap();
    pop.freeze_utopia = true;
    let values = |pop: &Population<f64>| -> Vec<f64> {
        (0..pop.individuals.len())
            .map(|i| tchebycheff_value(&pop.individuals[i].f, &pop.weights[i], &pop.utopia).unwrap())
            .collect()
    };
    let mut last = values(&pop);
    for _ in 0..20 {
        pop = evolve(&p, pop, &cfg, 30, &mut rng).unwrap();
        let now = values(&pop);
        assert!(now.iter().zip(&last).all(|(a, b)| a <= b));
        last = now;
    }
}

#[test]
fn moead_population_shape() {
    let p = SineCurve::<f64>::new(3).unwrap();
    let cfg = MoeadConfig::default();
    let pop = Population::init(&p, &cfg, &mut RngStream::new(7)).unwrap();
    assert_eq!(pop.individuals.len(), pop.weights.len());
    for (i, hood) in pop.neighborhoods.iter().enumerate() {
        assert_eq!(hood.len(), cfg.neighbors);
        assert!(hood.contains(&i));
    }
}

fn point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0_f64, m)
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(a in point(3), b in point(3), c in point(3)) {
        prop_assert!(!dominates(&a, &a).unwrap());
        if dominates(&a, &b).unwrap() {
            prop_assert!(!dominates(&b, &a).unwrap());
            if dominates(&b, &c).unwrap() {
                prop_assert!(dominates(&a, &c).unwrap());
            }
        }
        if strictly_dominates(&a, &b).unwrap() {
            prop_assert!(dominates(&a, &b).unwrap());
        }
    }

    #[test]
    fn filter_keeps_exactly_the_undominated(pts in prop::collection::vec(point(2), 1..60)) {
        let keep = nondominated_filter(&pts);
        for i in 0..pts.len() {
            let dominated = pts.iter().any(|q| dominates(q, &pts[i]).unwrap());
            prop_assert_eq!(keep.contains(&i), !dominated);
        }
    }

    #[test]
    fn hypervolume_grows_with_the_set(pts in prop::collection::vec(point(2), 1..30), extra in point(2)) {
        let r = [1.1, 1.1];
        let base = hypervolume_exact(&pts, &r).unwrap();
        let mut more = pts.clone();
        more.push(extra);
        prop_assert!(hypervolume_exact(&more, &r).unwrap() >= base - 1e-12);
        prop_assert!(base <= 1.1 * 1.1 + 1e-12);
    }

    #[test]
    fn three_objective_hypervolume_grows_with_the_set(pts in prop::collection::vec(point(3), 1..15), extra in point(3)) {
        let r = [1.1, 1.1, 1.1];
        let base = hypervolume_exact(&pts, &r).unwrap();
        let mut more = pts.clone();
        more.push(extra);
        prop_assert!(hypervolume_exact(&more, &r).unwrap() >= base - 1e-12);
    }

    #[test]
    fn igd_plus_vanishes_on_the_reference(front in prop::collection::vec(point(2), 1..20)) {
        prop_assert_eq!(igd_plus(&front, &front).unwrap(), 0.0);
    }

    #[test]
    fn chain_outputs_lie_on_segments(seed in 0u64..500, w in 0.0..1.0_f64) {
        let bounds = BoxBounds::new(vec![0.0, -1.0, -1.0], vec![1.0, 1.0, 1.0]).unwrap();
        let mut rng = RngStream::new(seed);
        let model = jittered(&VariantSpec::Chain { vertices: 4 }, &bounds, 2.0, &mut rng);
        let vertices = model.chain_vertices(&bounds).unwrap();
        let x = model.forward(&PreferenceVector::new(vec![w, 1.0 - w]).unwrap(), &bounds).unwrap();
        prop_assert!(distance_to_chain(&vertices, &x) < 1e-14);
    }

    #[test]
    fn shared_coordinates_are_bit_identical(seed in 0u64..500, a in 0.0..1.0_f64, b in 0.0..1.0_f64) {
        let bounds = BoxBounds::new(vec![0.0, -1.0, -1.0], vec![1.0, 1.0, 1.0]).unwrap();
        let mut rng = RngStream::new(seed);
        let model = jittered(&VariantSpec::Shared { indices: vec![0, 2] }, &bounds, 2.0, &mut rng);
        let xa = model.forward(&PreferenceVector::new(vec![a, 1.0 - a]).unwrap(), &bounds).unwrap();
        let xb = model.forward(&PreferenceVector::new(vec![b, 1.0 - b]).unwrap(), &bounds).unwrap();
        prop_assert_eq!(xa[0].to_bits(), xb[0].to_bits());
        prop_assert_eq!(xa[2].to_bits(), xb[2].to_bits());
    }
}
