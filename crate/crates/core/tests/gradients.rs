use beamsnet::model::{BeamsNet, BeamsNetV1Config, BeamsNetV2Config};
use beamsnet::nn::gradcheck::DEFAULT_THRESHOLD;
use beamsnet::nn::{grad_check, grad_check_sampled, GradCheckReport, GraphBuilder, Model, NodeId, Tensor};
use beamsnet::seed::{component_rng, rng_from_seed, Rng};
use rand_distr::{Distribution, StandardNormal};

const H: f64 = 1e-6;

fn randn(shape: &[usize], rng: &mut Rng) -> Tensor {
    let n = shape.iter().product();
    let data = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    Tensor::new(shape.to_vec(), data).unwrap()
}

fn assert_passes(what: &str, r: &GradCheckReport) {
    assert!(
        r.passed(),
        "{what}: max rel error {:.3e} (worst param {:?}, inputs {:?})",
        r.max_rel_error(),
        r.worst(),
        r.inputs
    );
}

/// One-layer-under-test model with a dense readout to 3 outputs.
fn check_single(what: &str, shapes: &[&[usize]], layer: impl FnOnce(&mut GraphBuilder, &[NodeId]) -> NodeId) {
    let mut rng = component_rng(11, what, 0);
    let model: Model = {
        let mut b = GraphBuilder::new(&mut rng);
        let ins: Vec<NodeId> = shapes.iter().enumerate().map(|(i, s)| b.input(&format!("x{i}"), s).unwrap()).collect();
        let x = layer(&mut b, &ins);
        let x = b.flatten("flat_out", x).unwrap();
        let y = b.dense("readout", x, 3).unwrap();
        b.build(y).unwrap()
    };
    let mut data_rng = component_rng(12, what, 0);
    let xs: Vec<Tensor> = shapes.iter().map(|s| randn(s, &mut data_rng)).collect();
    let target = randn(&[3], &mut data_rng);
    let refs: Vec<&Tensor> = xs.iter().collect();
    let r = grad_check(&model, &refs, &target, H).unwrap();
    assert_passes(what, &r);
}

#[test]
fn dense_gradients() {
    check_single("dense", &[&[7]], |b, x| b.dense("d", x[0], 5).unwrap());
}

#[test]
fn conv1d_gradients() {
    check_single("conv1d", &[&[9, 3]], |b, x| b.conv1d("c", x[0], 4, 3).unwrap());
}

#[test]
fn conv1d_kernel_one_gradients() {
    check_single("conv1d_k1", &[&[5, 2]], |b, x| b.conv1d("c", x[0], 3, 1).unwrap());
}

#[test]
fn relu_gradients() {
    check_single("relu", &[&[8]], |b, x| {
        let d = b.dense("d", x[0], 6).unwrap();
        b.relu("r", d).unwrap()
    });
}

#[test]
fn tanh_gradients() {
    check_single("tanh", &[&[8]], |b, x| {
        let d = b.dense("d", x[0], 6).unwrap();
        b.tanh("t", d).unwrap()
    });
}

#[test]
fn dropout_eval_gradients() {
    check_single("dropout", &[&[8]], |b, x| {
        let d = b.dense("d", x[0], 6).unwrap();
        b.dropout("drop", d, 0.2).unwrap()
    });
}

#[test]
fn flatten_gradients() {
    check_single("flatten", &[&[4, 3]], |b, x| b.flatten("f", x[0]).unwrap());
}

#[test]
fn concat_gradients() {
    check_single("concat", &[&[4], &[2, 3], &[5]], |b, x| {
        let f = b.flatten("f", x[1]).unwrap();
        b.concat("cat", &[x[0], f, x[2]]).unwrap()
    });
}

#[test]
fn v2_full_gradients() {
    let net = BeamsNet::v2(BeamsNetV2Config::default(), &mut rng_from_seed(21)).unwrap();
    let mut rng = rng_from_seed(22);
    let past = randn(&[3, 4], &mut rng);
    let beams = randn(&[4], &mut rng);
    let target = randn(&[3], &mut rng);
    let r = grad_check(net.model(), &[&past, &beams], &target, H).unwrap();
    assert_eq!(r.params.iter().map(|p| p.checked).sum::<usize>(), 1061);
    assert_passes("v2", &r);
}

#[test]
fn v1_full_gradients_sampled() {
    let net = BeamsNet::v1(BeamsNetV1Config::default(), &mut rng_from_seed(31)).unwrap();
    let mut rng = rng_from_seed(32);
    let accel = randn(&[100, 3], &mut rng);
    let gyro = randn(&[100, 3], &mut rng);
    let beams = randn(&[4], &mut rng);
    let target = randn(&[3], &mut rng);
    let r = grad_check_sampled(net.model(), &[&accel, &gyro, &beams], &target, H, Some(40), &mut rng).unwrap();
    // every parameter tensor is covered, small ones exhaustively
    assert_eq!(r.params.len(), net.model().params().len());
    assert!(r.params.iter().all(|p| p.checked >= 3));
    assert_passes("v1", &r);
    assert_eq!(r.threshold, DEFAULT_THRESHOLD);
}
