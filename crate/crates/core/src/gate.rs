//! The feed-forward gate: scene features in, softmax weights over the four
//! experts out. Trained supervised against overlap-derived targets with
//! exact manual gradients (checked against finite differences in the
//! acceptance suite).

use alloc::vec::Vec;
use core::fmt;

use crate::experts::{ExpertKind, EXPERT_COUNT};
use crate::mathx;
use crate::metrics::rouge_l;
use crate::rng::Rng;
use crate::scene::SceneRecord;
use crate::textkit::tokenize;

pub const DEFAULT_FEATURE_DIM: usize = 128;
pub const DEFAULT_HIDDEN_DIM: usize = 64;
pub const DEFAULT_TARGET_TEMPERATURE: f64 = 0.1;

/// Normalized non-negative weights over the four experts.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector(pub [f64; EXPERT_COUNT]);

impl AlphaVector {
    pub fn uniform() -> Self {
        AlphaVector([0.25; EXPERT_COUNT])
    }

    /// Verify the sum-to-one (within 1e-9) and non-negativity invariants.
    /// Returns the offending sum on failure.
    pub fn check(&self) -> Result<(), f64> {
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || self.0.iter().any(|&a| a < 0.0) {
            return Err(sum);
        }
        Ok(())
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..EXPERT_COUNT {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Numerically stable softmax (max-logit subtraction).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| mathx::exp(z - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateError {
    DimensionMismatch { expected: usize, got: usize },
    NonFiniteInput,
    MissingExpertText(ExpertKind),
    EmptyDataset,
}

impl fmt::Display for GateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateError::DimensionMismatch { expected, got } => {
                write!(f, "feature dimension {got}, gate expects {expected}")
            }
            GateError::NonFiniteInput => write!(f, "non-finite value in gate input"),
            GateError::MissingExpertText(k) => write!(f, "scene carries no text for expert {k}"),
            GateError::EmptyDataset => write!(f, "gate training dataset is empty"),
        }
    }
}

/// Two-layer tanh MLP with a softmax output over the four experts.
///
/// `w1` is `hidden x d_in` row-major, `w2` is `4 x hidden` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    pub d_in: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl GateParams {
    pub fn zeros(d_in: usize, hidden: usize) -> Self {
        GateParams {
            d_in,
            hidden,
            w1: alloc::vec![0.0; hidden * d_in],
            b1: alloc::vec![0.0; hidden],
            w2: alloc::vec![0.0; EXPERT_COUNT * hidden],
            b2: alloc::vec![0.0; EXPERT_COUNT],
        }
    }

    /// Gaussian init scaled by 1/sqrt(fan_in).
    pub fn init(d_in: usize, hidden: usize, rng: &mut Rng) -> Self {
        let mut p = GateParams::zeros(d_in, hidden);
        let s1 = 1.0 / mathx::sqrt(d_in as f64);
        for w in &mut p.w1 {
            *w = rng.next_gaussian() * s1;
        }
        let s2 = 1.0 / mathx::sqrt(hidden as f64);
        for w in &mut p.w2 {
            *w = rng.next_gaussian() * s2;
        }
        p
    }

    fn check_features(&self, features: &[f64]) -> Result<(), GateError> {
        if features.len() != self.d_in {
            return Err(GateError::DimensionMismatch { expected: self.d_in, got: features.len() });
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(GateError::NonFiniteInput);
        }
        Ok(())
    }
}

/// Exact gradient of KL(target || gate_forward(features)) w.r.t. all params.
#[derive(Debug, Clone, PartialEq)]
pub struct GateGradient {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl GateGradient {
    fn zeros(params: &GateParams) -> Self {
        GateGradient {
            w1: alloc::vec![0.0; params.w1.len()],
            b1: alloc::vec![0.0; params.b1.len()],
            w2: alloc::vec![0.0; params.w2.len()],
            b2: alloc::vec![0.0; params.b2.len()],
        }
    }

    fn add_scaled(&mut self, other: &GateGradient, scale: f64) {
        for (a, b) in self.w1.iter_mut().zip(&other.w1) {
            *a += b * scale;
        }
        for (a, b) in self.b1.iter_mut().zip(&other.b1) {
            *a += b * scale;
        }
        for (a, b) in self.w2.iter_mut().zip(&other.w2) {
            *a += b * scale;
        }
        for (a, b) in self.b2.iter_mut().zip(&other.b2) {
            *a += b * scale;
        }
    }
}

fn forward_internal(features: &[f64], params: &GateParams) -> (Vec<f64>, [f64; EXPERT_COUNT], AlphaVector) {
    let h = params.hidden;
    let mut hidden = alloc::vec![0.0; h];
    for (i, slot) in hidden.iter_mut().enumerate() {
        let row = &params.w1[i * params.d_in..(i + 1) * params.d_in];
        let mut acc = params.b1[i];
        for (w, x) in row.iter().zip(features) {
            acc += w * x;
        }
        *slot = mathx::tanh(acc);
    }
    let mut logits = [0.0; EXPERT_COUNT];
    for (m, logit) in logits.iter_mut().enumerate() {
        let row = &params.w2[m * h..(m + 1) * h];
        let mut acc = params.b2[m];
        for (w, a) in row.iter().zip(&hidden) {
            acc += w * a;
        }
        *logit = acc;
    }
    let probs = softmax(&logits);
    (hidden, logits, AlphaVector([probs[0], probs[1], probs[2], probs[3]]))
}

/// Map scene features to expert weights.
pub fn gate_forward(features: &[f64], params: &GateParams) -> Result<AlphaVector, GateError> {
    params.check_features(features)?;
    Ok(forward_internal(features, params).2)
}

/// Supervised target weights: softmax over per-expert ROUGE-L f1 against
/// the reference, sharpened by the temperature.
pub fn gate_targets(scene: &SceneRecord, temperature: f64) -> Result<AlphaVector, GateError> {
    assert!(temperature > 0.0, "temperature must be positive");
    let reference = tokenize(&scene.reference_text);
    let mut scores = [0.0; EXPERT_COUNT];
    for kind in ExpertKind::ALL {
        let raw = scene
            .expert_texts
            .get(&kind)
            .ok_or(GateError::MissingExpertText(kind))?;
        let text = tokenize(raw);
        scores[kind.index()] = rouge_l(&text, &reference).f1 / temperature;
    }
    let probs = softmax(&scores);
    Ok(AlphaVector([probs[0], probs[1], probs[2], probs[3]]))
}

/// KL(target || alpha) with the 0 log 0 = 0 convention.
pub fn kl_divergence(target: &AlphaVector, alpha: &AlphaVector) -> f64 {
    let mut kl = 0.0;
    for (t, a) in target.0.iter().zip(alpha.0.iter()) {
        if *t > 0.0 {
            kl += t * (mathx::ln(*t) - mathx::ln(a.max(1e-300)));
        }
    }
    kl
}

/// Reverse-mode gradient of KL(target || gate_forward(features)).
pub fn gate_gradient(
    features: &[f64],
    params: &GateParams,
    target: &AlphaVector,
) -> Result<GateGradient, GateError> {
    params.check_features(features)?;
    let (hidden, _logits, alpha) = forward_internal(features, params);
    let h = params.hidden;
    // dKL/dlogit_m = alpha_m - target_m
    let dlogits: [f64; EXPERT_COUNT] = core::array::from_fn(|m| alpha.0[m] - target.0[m]);

    let mut grad = GateGradient::zeros(params);
    grad.b2.copy_from_slice(&dlogits);
    for m in 0..EXPERT_COUNT {
        for j in 0..h {
            grad.w2[m * h + j] = dlogits[m] * hidden[j];
        }
    }
    // back through tanh
    for j in 0..h {
        let mut dhidden = 0.0;
        for m in 0..EXPERT_COUNT {
            dhidden += dlogits[m] * params.w2[m * h + j];
        }
        let dpre = dhidden * (1.0 - hidden[j] * hidden[j]);
        grad.b1[j] = dpre;
        for (k, &x) in features.iter().enumerate() {
            grad.w1[j * params.d_in + k] = dpre * x;
        }
    }
    Ok(grad)
}

/// Per-epoch mean KL losses from [`train_gate`].
pub type LossCurve = Vec<f64>;

/// Full-batch gradient descent on mean KL(target || forward). Deterministic
/// for a fixed dataset order.
pub fn train_gate(
    dataset: &[(Vec<f64>, AlphaVector)],
    params: &GateParams,
    epochs: usize,
    learning_rate: f64,
) -> Result<(GateParams, LossCurve), GateError> {
    if dataset.is_empty() {
        return Err(GateError::EmptyDataset);
    }
    let mut params = params.clone();
    let mut curve = LossCurve::with_capacity(epochs);
    let inv_n = 1.0 / dataset.len() as f64;
    for _ in 0..epochs {
        let mut total = GateGradient::zeros(&params);
        let mut loss = 0.0;
        for (features, target) in dataset {
            let alpha = gate_forward(features, &params)?;
            loss += kl_divergence(target, &alpha);
            let g = gate_gradient(features, &params, target)?;
            total.add_scaled(&g, inv_n);
        }
        curve.push(loss * inv_n);
        for (w, g) in params.w1.iter_mut().zip(&total.w1) {
            *w -= learning_rate * g;
        }
        for (w, g) in params.b1.iter_mut().zip(&total.b1) {
            *w -= learning_rate * g;
        }
        for (w, g) in params.w2.iter_mut().zip(&total.w2) {
            *w -= learning_rate * g;
        }
        for (w, g) in params.b2.iter_mut().zip(&total.b2) {
            *w -= learning_rate * g;
        }
    }
    Ok((params, curve))
}
