use paretoset::domain::{sample_preference, BoxBounds, PreferenceVector, RngStream};
use paretoset::model::{RelationKind, SetModel, VariantSpec};

fn specs() -> Vec<VariantSpec> {
    vec![
        VariantSpec::Plain,
        VariantSpec::Shared { indices: vec![1, 3] },
        VariantSpec::Relation { kind: RelationKind::Sine, base: vec![0] },
        VariantSpec::Relation { kind: RelationKind::Poly, base: vec![0, 2] },
        VariantSpec::Chain { vertices: 4 },
    ]
}

/// Perturbs every trainable parameter so blocks that start at a constant
/// (biases, alpha, beta) are probed away from their initial values.
fn jitter(model: &mut SetModel<f64>, rng: &mut RngStream) {
    for block in model.blocks_mut() {
        for v in block.iter_mut() {
            *v += 0.3 * rng.standard_normal();
        }
    }
}

fn max_rel_error(model: &SetModel<f64>, pref: &PreferenceVector<f64>, bounds: &BoxBounds<f64>, cot: &[f64]) -> f64 {
    let analytic = model.backward(pref, bounds, cot).unwrap().flat();
    let h = 1e-5;
    let objective = |m: &SetModel<f64>| -> f64 {
        let x = m.forward(pref, bounds).unwrap();
        x.iter().zip(cot).map(|(a, b)| a * b).sum()
    };
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    let mut idx = 0;
    let sizes: Vec<usize> = model.blocks().iter().map(|b| b.len()).collect();
    for (b, &len) in sizes.iter().enumerate() {
        for i in 0..len {
            let orig = probe.blocks()[b][i];
            probe.blocks_mut()[b][i] = orig + h;
            let up = objective(&probe);
            probe.blocks_mut()[b][i] = orig - h;
            let down = objective(&probe);
            probe.blocks_mut()[b][i] = orig;
            let fd = (up - down) / (2.0 * h);
            let a = analytic[idx];
            let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-4);
            worst = worst.max(rel);
            idx += 1;
        }
    }
    worst
}

#[test]
fn backward_matches_finite_differences_for_every_variant() {
    let bounds = BoxBounds::new(vec![0.0, -1.0, -2.0, 0.5], vec![1.0, 1.0, 3.0, 4.0]).unwrap();
    let mut rng = RngStream::new(2024);
    for spec in specs() {
        let mut worst: f64 = 0.0;
        let mut probes = 0;
        while probes < 20 {
            let mut model = SetModel::init(&spec, 3, &bounds, 16, &mut rng).unwrap();
            jitter(&mut model, &mut rng);
            let pref = sample_preference(3, &mut rng).unwrap();
            if let Some(t) = model.tracer(&pref) {
                // the chain is not differentiable at its vertices
                if (t - t.round()).abs() < 1e-3 {
                    continue;
                }
            }
            let cot: Vec<f64> = (0..4).map(|_| rng.standard_normal()).collect();
            worst = worst.max(max_rel_error(&model, &pref, &bounds, &cot));
            probes += 1;
        }
        assert!(worst < 1e-4, "{}: max relative error {worst:e}", spec.name());
    }
}
