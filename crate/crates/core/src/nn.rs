//! Branching dueling Q-network, written from scratch.
//!
//! A shared trunk feeds one state-value head and one two-output advantage arm
//! per BIS. Arm Q-values combine the shared state value with mean-normalized
//! advantages, so the two sub-actions of an arm always average back to the
//! state value. Backpropagation, Adam, and a binary checkpoint format are
//! implemented here directly; no tensor library is involved.

use crate::error::{Error, Result};
use crate::seeds::SimRng;
use rand::{Rng, SeedableRng};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Default widths of the two shared trunk layers.
pub const TRUNK_WIDTHS: [usize; 2] = [512, 256];
/// Default hidden width of the state head and of every arm.
pub const HEAD_HIDDEN: usize = 128;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPSILON: f64 = 1e-8;

const CHECKPOINT_MAGIC: [u8; 4] = *b"BNCK";
const CHECKPOINT_VERSION: u32 = 1;

/// Layer widths of a branching network. `arms` equals the input length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetShape {
    pub arms: usize,
    pub trunk: [usize; 2],
    pub head_hidden: usize,
}

impl NetShape {
    pub fn standard(arms: usize) -> Self {
        Self { arms, trunk: TRUNK_WIDTHS, head_hidden: HEAD_HIDDEN }
    }

    /// Dense layers in canonical order: trunk, state head, then the two
    /// layers of each arm.
    fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = vec![
            (self.arms, self.trunk[0]),
            (self.trunk[0], self.trunk[1]),
            (self.trunk[1], self.head_hidden),
            (self.head_hidden, 1),
        ];
        for _ in 0..self.arms {
            dims.push((self.trunk[1], self.head_hidden));
            dims.push((self.head_hidden, 2));
        }
        dims
    }
}

#[derive(Debug, Clone, Copy)]
struct LayerSpec {
    w_offset: usize,
    b_offset: usize,
    in_dim: usize,
    out_dim: usize,
}

/// Outputs of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    pub state_value: f64,
    /// Raw advantages per arm, `[keep, broadcast]`.
    pub advantages: Vec<[f64; 2]>,
    /// Aggregated Q-values per arm, `[keep, broadcast]`.
    pub q_values: Vec<[f64; 2]>,
}

impl ForwardOutput {
    pub fn arms(&self) -> usize {
        self.q_values.len()
    }

    /// Sub-action with the larger Q-value; ties keep sub-action 0.
    pub fn arm_argmax(&self, arm: usize) -> usize {
        usize::from(self.q_values[arm][1] > self.q_values[arm][0])
    }
}

struct Trace {
    input: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
    state_hidden: Vec<f64>,
    /// All arm hidden activations, `arms * head_hidden` flat.
    arm_hidden: Vec<f64>,
    out: ForwardOutput,
}

/// Weights, Adam moments, and the step counter of one branching network.
#[derive(Debug, Clone)]
pub struct BranchingNet {
    shape: NetShape,
    layers: Vec<LayerSpec>,
    theta: Vec<f64>,
    adam_m: Vec<f64>,
    adam_v: Vec<f64>,
    step_count: u64,
    input_scale: f64,
}

impl BranchingNet {
    /// Network with the standard layer widths.
    pub fn new(arms: usize, input_scale: f64, seed: u64) -> Self {
        Self::with_shape(NetShape::standard(arms), input_scale, seed)
    }

    /// Network with explicit layer widths; weights drawn from the fan-in
    /// scaled uniform scheme, biases zero.
    pub fn with_shape(shape: NetShape, input_scale: f64, seed: u64) -> Self {
        assert!(shape.arms >= 1, "need at least one arm");
        let (layers, param_count) = build_layout(&shape);
        let mut theta = vec![0.0; param_count];
        let mut rng = SimRng::seed_from_u64(seed);
        for layer in &layers {
            let limit = (6.0 / layer.in_dim as f64).sqrt();
            for w in &mut theta[layer.w_offset..layer.w_offset + layer.in_dim * layer.out_dim] {
                *w = rng.random_range(-limit..limit);
            }
        }
        Self {
            shape,
            layers,
            adam_m: vec![0.0; param_count],
            adam_v: vec![0.0; param_count],
            theta,
            step_count: 0,
            input_scale,
        }
    }

    pub fn shape(&self) -> NetShape {
        self.shape
    }

    pub fn arms(&self) -> usize {
        self.shape.arms
    }

    /// Factor applied to raw staleness counts before they enter the trunk.
    pub fn input_scale(&self) -> f64 {
        self.input_scale
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn param_count(&self) -> usize {
        self.theta.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.theta
    }

    pub fn param(&self, index: usize) -> f64 {
        self.theta[index]
    }

    pub fn set_param(&mut self, index: usize, value: f64) {
        self.theta[index] = value;
    }

    /// Dense layers in canonical order: trunk pair, state hidden, state out,
    /// then hidden/out per arm.
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// (in, out) of one layer.
    pub fn layer_dims(&self, layer: usize) -> (usize, usize) {
        let spec = self.layers[layer];
        (spec.in_dim, spec.out_dim)
    }

    /// Overwrites one layer's weights (row-major, `out x in`) and biases.
    /// Lets tests and tools build networks with exact known parameters.
    pub fn set_layer(&mut self, layer: usize, weights: &[f64], biases: &[f64]) -> Result<()> {
        let spec = *self
            .layers
            .get(layer)
            .ok_or_else(|| Error::ShapeMismatch(format!("no layer {layer}")))?;
        if weights.len() != spec.in_dim * spec.out_dim || biases.len() != spec.out_dim {
            return Err(Error::ShapeMismatch(format!(
                "layer {layer} takes {}x{} weights and {} biases",
                spec.out_dim, spec.in_dim, spec.out_dim
            )));
        }
        self.theta[spec.w_offset..spec.w_offset + weights.len()].copy_from_slice(weights);
        self.theta[spec.b_offset..spec.b_offset + biases.len()].copy_from_slice(biases);
        Ok(())
    }

    /// Sets every parameter to zero; a blank slate for [`set_layer`](Self::set_layer).
    pub fn zero_params(&mut self) {
        self.theta.fill(0.0);
    }

    /// Scales a raw staleness count vector into network input space.
    pub fn encode_counts(&self, counts: &[u32]) -> Vec<f64> {
        counts.iter().map(|&c| c as f64 * self.input_scale).collect()
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.shape.arms {
            return Err(Error::ShapeMismatch(format!(
                "input length {} against {} arms",
                input.len(),
                self.shape.arms
            )));
        }
        Ok(())
    }

    fn weights(&self, layer: usize) -> (&[f64], &[f64]) {
        let spec = self.layers[layer];
        (
            &self.theta[spec.w_offset..spec.w_offset + spec.in_dim * spec.out_dim],
            &self.theta[spec.b_offset..spec.b_offset + spec.out_dim],
        )
    }

    /// Full forward pass over an already-scaled input vector.
    pub fn forward(&self, input: &[f64]) -> Result<ForwardOutput> {
        Ok(self.forward_trace(input)?.out)
    }

    fn forward_trace(&self, input: &[f64]) -> Result<Trace> {
        self.check_input(input)?;
        let arms = self.shape.arms;
        let hh = self.shape.head_hidden;

        let (w, b) = self.weights(0);
        let mut h1 = affine(w, b, input, self.shape.trunk[0]);
        relu(&mut h1);
        let (w, b) = self.weights(1);
        let mut h2 = affine(w, b, &h1, self.shape.trunk[1]);
        relu(&mut h2);

        let (w, b) = self.weights(2);
        let mut state_hidden = affine(w, b, &h2, hh);
        relu(&mut state_hidden);
        let (w, b) = self.weights(3);
        let state_value = affine(w, b, &state_hidden, 1)[0];

        let mut arm_hidden = vec![0.0; arms * hh];
        let mut advantages = Vec::with_capacity(arms);
        let mut q_values = Vec::with_capacity(arms);
        for arm in 0..arms {
            let (w, b) = self.weights(4 + 2 * arm);
            let hidden = &mut arm_hidden[arm * hh..(arm + 1) * hh];
            affine_into(w, b, &h2, hidden);
            relu(hidden);
            let (w, b) = self.weights(5 + 2 * arm);
            let raw = affine(w, b, hidden, 2);
            let adv = [raw[0], raw[1]];
            let mean = 0.5 * (adv[0] + adv[1]);
            advantages.push(adv);
            q_values.push([state_value + adv[0] - mean, state_value + adv[1] - mean]);
        }

        Ok(Trace {
            input: input.to_vec(),
            h1,
            h2,
            state_hidden,
            arm_hidden,
            out: ForwardOutput { state_value, advantages, q_values },
        })
    }

    /// Gradient of the mean per-arm squared error against every parameter.
    ///
    /// The loss is `(1/N) * sum_i (targets[i] - Q_i(input, chosen[i]))^2`;
    /// each arm contributes only through its chosen sub-action, whose error
    /// also flows into the shared state value and trunk.
    pub fn backward(
        &self,
        input: &[f64],
        chosen: &[usize],
        targets: &[f64],
    ) -> Result<(f64, Vec<f64>)> {
        let mut grad = vec![0.0; self.param_count()];
        let loss = self.backward_into(input, chosen, targets, &mut grad)?;
        Ok((loss, grad))
    }

    /// Like [`backward`](Self::backward) but accumulates into an existing
    /// gradient buffer; used by minibatch training to avoid reallocation.
    pub fn backward_into(
        &self,
        input: &[f64],
        chosen: &[usize],
        targets: &[f64],
        grad: &mut [f64],
    ) -> Result<f64> {
        let arms = self.shape.arms;
        if chosen.len() != arms || targets.len() != arms {
            return Err(Error::ShapeMismatch(format!(
                "chosen {} / targets {} against {arms} arms",
                chosen.len(),
                targets.len()
            )));
        }
        if grad.len() != self.param_count() {
            return Err(Error::ShapeMismatch("gradient buffer length".into()));
        }
        if chosen.iter().any(|&a| a > 1) {
            return Err(Error::ShapeMismatch("sub-actions are 0 or 1".into()));
        }
        let trace = self.forward_trace(input)?;
        let hh = self.shape.head_hidden;
        let inv_n = 1.0 / arms as f64;

        let mut loss = 0.0;
        let mut g_q = vec![0.0; arms];
        for arm in 0..arms {
            let residual = targets[arm] - trace.out.q_values[arm][chosen[arm]];
            loss += residual * residual * inv_n;
            g_q[arm] = -2.0 * inv_n * residual;
        }

        let mut g_h2 = vec![0.0; self.shape.trunk[1]];

        // State head: every arm's error reaches V with weight one.
        let g_v: f64 = g_q.iter().sum();
        let mut g_state_hidden =
            self.backprop_layer(3, &trace.state_hidden, &[g_v], grad);
        relu_backward(&mut g_state_hidden, &trace.state_hidden);
        accumulate(
            &mut g_h2,
            &self.backprop_layer(2, &trace.h2, &g_state_hidden, grad),
        );

        // Arms: the chosen sub-action carries 1 - 1/2, the other -1/2.
        for arm in 0..arms {
            let g_out = [
                g_q[arm] * (f64::from(chosen[arm] == 0) - 0.5),
                g_q[arm] * (f64::from(chosen[arm] == 1) - 0.5),
            ];
            let hidden = &trace.arm_hidden[arm * hh..(arm + 1) * hh];
            let mut g_hidden = self.backprop_layer(5 + 2 * arm, hidden, &g_out, grad);
            relu_backward(&mut g_hidden, hidden);
            accumulate(&mut g_h2, &self.backprop_layer(4 + 2 * arm, &trace.h2, &g_hidden, grad));
        }

        relu_backward(&mut g_h2, &trace.h2);
        let mut g_h1 = self.backprop_layer(1, &trace.h1, &g_h2, grad);
        relu_backward(&mut g_h1, &trace.h1);
        self.backprop_layer_no_input_grad(0, &trace.input, &g_h1, grad);

        Ok(loss)
    }

    /// Writes this layer's parameter gradients and returns the input gradient.
    fn backprop_layer(
        &self,
        layer: usize,
        input: &[f64],
        g_out: &[f64],
        grad: &mut [f64],
    ) -> Vec<f64> {
        let spec = self.layers[layer];
        let mut g_in = vec![0.0; spec.in_dim];
        for (o, &go) in g_out.iter().enumerate() {
            let row = &self.theta[spec.w_offset + o * spec.in_dim..spec.w_offset + (o + 1) * spec.in_dim];
            let g_row = &mut grad[spec.w_offset + o * spec.in_dim..spec.w_offset + (o + 1) * spec.in_dim];
            for ((gw, gi), (&w, &x)) in g_row
                .iter_mut()
                .zip(g_in.iter_mut())
                .zip(row.iter().zip(input))
            {
                *gw += go * x;
                *gi += go * w;
            }
            grad[spec.b_offset + o] += go;
        }
        g_in
    }

    fn backprop_layer_no_input_grad(
        &self,
        layer: usize,
        input: &[f64],
        g_out: &[f64],
        grad: &mut [f64],
    ) {
        let spec = self.layers[layer];
        for (o, &go) in g_out.iter().enumerate() {
            let g_row = &mut grad[spec.w_offset + o * spec.in_dim..spec.w_offset + (o + 1) * spec.in_dim];
            for (gw, &x) in g_row.iter_mut().zip(input) {
                *gw += go * x;
            }
            grad[spec.b_offset + o] += go;
        }
    }

    /// One Adam update with bias correction.
    pub fn adam_step(&mut self, grad: &[f64], learning_rate: f64) -> Result<()> {
        if grad.len() != self.param_count() {
            return Err(Error::ShapeMismatch("gradient length".into()));
        }
        self.step_count += 1;
        adam_update(
            &mut self.theta,
            &mut self.adam_m,
            &mut self.adam_v,
            self.step_count,
            grad,
            learning_rate,
        );
        Ok(())
    }

    /// Copies every tensor and the step counter into `dst`.
    pub fn copy_into(&self, dst: &mut BranchingNet) -> Result<()> {
        if dst.shape != self.shape {
            return Err(Error::ShapeMismatch("network shapes differ".into()));
        }
        dst.theta.copy_from_slice(&self.theta);
        dst.adam_m.copy_from_slice(&self.adam_m);
        dst.adam_v.copy_from_slice(&self.adam_v);
        dst.step_count = self.step_count;
        dst.input_scale = self.input_scale;
        Ok(())
    }

    /// Smallest |pre-activation| over all rectifier units for this input.
    /// Finite-difference probes use it to stay clear of activation kinks.
    pub fn preactivation_margin(&self, input: &[f64]) -> Result<f64> {
        self.check_input(input)?;
        let mut margin = f64::INFINITY;
        let mut track = |values: &[f64]| {
            for &v in values {
                margin = margin.min(v.abs());
            }
        };
        let (w, b) = self.weights(0);
        let z1 = affine(w, b, input, self.shape.trunk[0]);
        track(&z1);
        let h1: Vec<f64> = z1.iter().map(|&z| z.max(0.0)).collect();
        let (w, b) = self.weights(1);
        let z2 = affine(w, b, &h1, self.shape.trunk[1]);
        track(&z2);
        let h2: Vec<f64> = z2.iter().map(|&z| z.max(0.0)).collect();
        let (w, b) = self.weights(2);
        track(&affine(w, b, &h2, self.shape.head_hidden));
        for arm in 0..self.shape.arms {
            let (w, b) = self.weights(4 + 2 * arm);
            track(&affine(w, b, &h2, self.shape.head_hidden));
        }
        Ok(margin)
    }

    /// Serializes the self-describing checkpoint: header (version, arm count,
    /// input scale, step counter, layer shapes) then every tensor as
    /// little-endian f64 in declaration order (weights and biases, then Adam
    /// first and second moments).
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&CHECKPOINT_MAGIC)?;
        out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        out.write_all(&(self.shape.arms as u64).to_le_bytes())?;
        out.write_all(&self.input_scale.to_le_bytes())?;
        out.write_all(&self.step_count.to_le_bytes())?;
        out.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for layer in &self.layers {
            out.write_all(&(layer.in_dim as u32).to_le_bytes())?;
            out.write_all(&(layer.out_dim as u32).to_le_bytes())?;
        }
        for tensor in [&self.theta, &self.adam_m, &self.adam_v] {
            for value in tensor.iter() {
                out.write_all(&value.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        self.write_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let magic = read_array::<4, R>(&mut input)?;
        if magic != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("bad magic bytes".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut input)?);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let arms = u64::from_le_bytes(read_array(&mut input)?) as usize;
        let input_scale = f64::from_le_bytes(read_array(&mut input)?);
        let step_count = u64::from_le_bytes(read_array(&mut input)?);
        let layer_count = u32::from_le_bytes(read_array(&mut input)?) as usize;
        if arms == 0 || layer_count != 4 + 2 * arms {
            return Err(Error::Checkpoint(format!(
                "layer count {layer_count} inconsistent with {arms} arms"
            )));
        }
        let mut dims = Vec::with_capacity(layer_count);
        for _ in 0..layer_count {
            let in_dim = u32::from_le_bytes(read_array(&mut input)?) as usize;
            let out_dim = u32::from_le_bytes(read_array(&mut input)?) as usize;
            dims.push((in_dim, out_dim));
        }
        let shape = NetShape {
            arms,
            trunk: [dims[0].1, dims[1].1],
            head_hidden: dims[2].1,
        };
        if shape.layer_dims() != dims {
            return Err(Error::Checkpoint("layer shapes are not a branching net".into()));
        }
        let (layers, param_count) = build_layout(&shape);
        let mut tensors = [Vec::new(), Vec::new(), Vec::new()];
        for tensor in &mut tensors {
            tensor.reserve_exact(param_count);
            for _ in 0..param_count {
                tensor.push(f64::from_le_bytes(read_array(&mut input)?));
            }
        }
        let [theta, adam_m, adam_v] = tensors;
        Ok(Self { shape, layers, theta, adam_m, adam_v, step_count, input_scale })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| {
            Error::Checkpoint(format!("cannot open {}: {e}", path.display()))
        })?;
        Self::read_from(BufReader::new(file))
    }
}

fn build_layout(shape: &NetShape) -> (Vec<LayerSpec>, usize) {
    let mut layers = Vec::new();
    let mut offset = 0;
    for (in_dim, out_dim) in shape.layer_dims() {
        let w_offset = offset;
        let b_offset = offset + in_dim * out_dim;
        offset = b_offset + out_dim;
        layers.push(LayerSpec { w_offset, b_offset, in_dim, out_dim });
    }
    (layers, offset)
}

fn affine(w: &[f64], b: &[f64], input: &[f64], out_dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; out_dim];
    affine_into(w, b, input, &mut out);
    out
}

fn affine_into(w: &[f64], b: &[f64], input: &[f64], out: &mut [f64]) {
    let in_dim = input.len();
    for (o, (value, bias)) in out.iter_mut().zip(b).enumerate() {
        let row = &w[o * in_dim..(o + 1) * in_dim];
        let mut acc = *bias;
        for (wi, xi) in row.iter().zip(input) {
            acc += wi * xi;
        }
        *value = acc;
    }
}

fn relu(values: &mut [f64]) {
    for v in values {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Masks gradients of units that were inactive in the forward pass.
fn relu_backward(grad: &mut [f64], activations: &[f64]) {
    for (g, &a) in grad.iter_mut().zip(activations) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
}

fn accumulate(acc: &mut [f64], values: &[f64]) {
    for (a, v) in acc.iter_mut().zip(values) {
        *a += v;
    }
}

/// Standard bias-corrected Adam over flat parameter vectors. `step` is the
/// 1-based count including this update.
pub fn adam_update(
    theta: &mut [f64],
    m: &mut [f64],
    v: &mut [f64],
    step: u64,
    grad: &[f64],
    learning_rate: f64,
) {
    let bias1 = 1.0 - ADAM_BETA1.powi(step as i32);
    let bias2 = 1.0 - ADAM_BETA2.powi(step as i32);
    for i in 0..theta.len() {
        let g = grad[i];
        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g;
        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        theta[i] -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Checkpoint(format!("truncated checkpoint: {e}")))?;
    Ok(buf)
}
