use telu_lab::nn::experiment::RecoverySetup;
use telu_lab::nn::{
    evaluate_with_noise, init_model, recovery_experiment, synth_blobs, train, BlobConfig, Dataset, Gradients, MlpModel,
    TrainConfig, WeightInit,
};
use telu_lab::ActivationId;

fn loss(model: &MlpModel, x: &[f64], y: &[usize]) -> f64 {
    let mut g = Gradients::zeros_like(model);
    model.loss_and_gradients(x, y, &mut g).loss
}

fn inputs(n: usize, dim: usize) -> Vec<f64> {
    (0..n * dim)
        .map(|i| ((i as f64 * 0.7311).sin() * 1.9).clamp(-1.5, 1.5))
        .collect()
}

#[test]
fn backprop_matches_finite_differences_for_every_unit() {
    let (dim, k, n) = (4, 3, 8);
    let x = inputs(n, dim);
    let y: Vec<usize> = (0..n).map(|i| i % k).collect();
    let h = 1e-6;
    for id in ActivationId::LINEAR_UNITS {
        let model = init_model(&[dim, 6, k], id, WeightInit::XavierUniform, 0.1, 11).unwrap();
        let mut g = Gradients::zeros_like(&model);
        model.loss_and_gradients(&x, &y, &mut g);
        for l in 0..model.layers.len() {
            for (j, analytic) in g.layers[l].weights.iter().enumerate() {
                let mut plus = model.clone();
                plus.layers[l].weights[j] += h;
                let mut minus = model.clone();
                minus.layers[l].weights[j] -= h;
                let fd = (loss(&plus, &x, &y) - loss(&minus, &x, &y)) / (2.0 * h);
                let tol = 1e-5 * analytic.abs().max(fd.abs()) + 1e-8;
                assert!((analytic - fd).abs() <= tol, "{id} layer {l} w{j}: {analytic} vs {fd}");
            }
            for (j, analytic) in g.layers[l].biases.iter().enumerate() {
                let mut plus = model.clone();
                plus.layers[l].biases[j] += h;
                let mut minus = model.clone();
                minus.layers[l].biases[j] -= h;
                let fd = (loss(&plus, &x, &y) - loss(&minus, &x, &y)) / (2.0 * h);
                let tol = 1e-5 * analytic.abs().max(fd.abs()) + 1e-8;
                assert!((analytic - fd).abs() <= tol, "{id} layer {l} b{j}: {analytic} vs {fd}");
            }
        }
    }
}

#[test]
fn initial_loss_is_near_log_class_count() {
    let data = synth_blobs(3, BlobConfig::default()).unwrap();
    let model = init_model(&[32, 64, 64, 10], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 3).unwrap();
    let l = loss(&model, data.features(), data.labels());
    assert!((l - 10f64.ln()).abs() < 0.1, "{l}");
}

#[test]
fn saturated_relu_passes_no_gradient_to_hidden_layers() {
    let x: Vec<f64> = inputs(16, 5).iter().map(|v| v.abs()).collect();
    let y: Vec<usize> = (0..16).map(|i| i % 4).collect();
    let mut model = init_model(&[5, 8, 8, 4], ActivationId::ReLU, WeightInit::XavierUniform, -10.0, 2).unwrap();
    model.layers[0].weights.iter_mut().for_each(|w| *w = w.abs() * 0.1);
    let mut g = Gradients::zeros_like(&model);
    model.loss_and_gradients(&x, &y, &mut g);
    for layer in &g.layers[..2] {
        assert!(layer.weights.iter().chain(&layer.biases).all(|&v| v == 0.0));
    }
    assert!(g.layers[2].biases.iter().any(|&v| v != 0.0));
}

#[test]
fn memorizes_a_single_sample() {
    let data = Dataset::new(vec![0.5, -0.25, 1.0], 3, vec![2], 4).unwrap();
    let mut model = init_model(&[3, 8, 4], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 9).unwrap();
    let cfg = TrainConfig {
        learning_rate: 0.1,
        epochs: 200,
        batch_size: 1,
        weight_decay: 0.0,
        ..TrainConfig::default()
    };
    let metrics = train(&mut model, &data, &data, &cfg).unwrap().into_result().unwrap();
    assert!(metrics.last().unwrap().train_loss < 1e-3);
    assert_eq!(model.predict(&[0.5, -0.25, 1.0]), vec![2]);
}

#[test]
fn separable_blobs_are_learned_exactly() {
    let blobs = BlobConfig {
        n_classes: 4,
        dim: 8,
        per_class: 25,
        spread: 0.0,
    };
    let data = synth_blobs(5, blobs).unwrap();
    let mut model = init_model(&[8, 16, 4], ActivationId::TeLU, WeightInit::XavierUniform, 0.0, 5).unwrap();
    let cfg = TrainConfig {
        learning_rate: 0.05,
        epochs: 40,
        ..TrainConfig::default()
    };
    train(&mut model, &data, &data, &cfg).unwrap().into_result().unwrap();
    assert_eq!(telu_lab::nn::accuracy(&model, &data), 1.0);
}

#[test]
fn training_is_deterministic() {
    let setup = RecoverySetup {
        train: TrainConfig {
            epochs: 3,
            ..RecoverySetup::desk(4).train
        },
        ..RecoverySetup::desk(4)
    };
    let (tr, va) = setup.datasets().unwrap();
    let ids = [ActivationId::TeLU, ActivationId::GELU];
    let a = recovery_experiment(&ids, &setup, &tr, &va).unwrap();
    let b = recovery_experiment(&ids, &setup, &tr, &va).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unbiased_control_recovers_almost_immediately() {
    let mut setup = RecoverySetup::desk(1);
    setup.train.bias_init = 0.0;
    setup.train.epochs = 3;
    let (tr, va) = setup.datasets().unwrap();
    for o in recovery_experiment(&ActivationId::LINEAR_UNITS, &setup, &tr, &va).unwrap() {
        assert!(
            matches!(o.first_recovery_epoch, Some(e) if e <= 2),
            "{}: {:?}",
            o.id,
            o.first_recovery_epoch
        );
    }
}

#[test]
fn noise_curve_starts_at_clean_accuracy_and_decays() {
    let mut setup = RecoverySetup::desk(2);
    setup.train.bias_init = 0.0;
    setup.train.epochs = 10;
    setup.input_scale = 1.0;
    let (tr, va) = setup.datasets().unwrap();
    let mut model = init_model(
        &setup.widths(&tr),
        ActivationId::TeLU,
        WeightInit::XavierUniform,
        0.0,
        2,
    )
    .unwrap();
    train(&mut model, &tr, &va, &setup.train)
        .unwrap()
        .into_result()
        .unwrap();
    let sigmas: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
    let curve = evaluate_with_noise(&model, &va, &sigmas, 8).unwrap();
    assert_eq!(curve[0].accuracy, telu_lab::nn::accuracy(&model, &va));
    for w in curve.windows(2) {
        assert!(w[1].accuracy <= w[0].accuracy + 0.01, "{:?}", curve);
    }
    assert!(evaluate_with_noise(&model, &va, &[-0.1], 8).is_err());

    let untrained = init_model(
        &setup.widths(&tr),
        ActivationId::TeLU,
        WeightInit::XavierUniform,
        0.0,
        2,
    )
    .unwrap();
    for p in evaluate_with_noise(&untrained, &va, &[0.0, 0.5], 8).unwrap() {
        assert!((p.accuracy - 0.1).abs() < 0.1, "{p:?}");
    }
}
