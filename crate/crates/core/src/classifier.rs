//! Deep player-state classifiers.
//!
//! Each network has several parallel branches that all read the full input.
//! A branch starts with dropout and continues with dense layers, optionally
//! batch-normalized. Branch outputs are concatenated (the merge layer), passed
//! through a dense trunk and a single sigmoid output unit. Training is
//! minibatch SGD on binary cross-entropy.
//!
//! All parameters live in one flat vector; [`Layout`] maps layers to offsets.
//! Dense layers followed by batch normalization carry no bias, since the
//! normalization shift subsumes it.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability clamp used by the loss and by reported outputs.
pub const EPSILON: f64 = 1e-7;
/// Variance floor inside batch normalization.
pub const BN_EPSILON: f64 = 1e-5;
/// Weight kept on the old running statistics at each update.
pub const BN_MOMENTUM: f64 = 0.9;
/// Decision threshold for metrics.
pub const DECISION_THRESHOLD: f64 = 0.5;

const MODEL_FORMAT: &str = "gridiron-network";
const MODEL_VERSION: u32 = 1;

/// `(1 − e^{−2z}) / (1 + e^{−2z})`, evaluated on the side that cannot overflow.
pub fn act_tanh(z: f64) -> f64 {
    if z < 0.0 {
        return -act_tanh(-z);
    }
    let e = (-2.0 * z).exp();
    (1.0 - e) / (1.0 + e)
}

/// `ln(1 + e^z)`, returning `z + ln(1 + e^{−z})` for positive `z`.
pub fn act_softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn act_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    /// `ln(1 + e^z)`. Sometimes labelled "relu" in the literature this
    /// system follows; [`Activation::Relu`] is the true rectifier.
    Softplus,
    Sigmoid,
    Relu,
}

impl Activation {
    pub const ALL: [Activation; 4] = [Activation::Tanh, Activation::Softplus, Activation::Sigmoid, Activation::Relu];

    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => act_tanh(z),
            Activation::Softplus => act_softplus(z),
            Activation::Sigmoid => act_sigmoid(z),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative at `z`, given `a = apply(z)`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Softplus => act_sigmoid(z),
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width of the uniform initialization range for a given fan-in.
    fn init_bound(self, fan_in: usize) -> f64 {
        let gain = match self {
            Activation::Tanh | Activation::Sigmoid => 3.0,
            Activation::Softplus | Activation::Relu => 6.0,
        };
        (gain / fan_in.max(1) as f64).sqrt()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Softplus => "softplus",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Activation::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown activation {s:?}")))
    }
}

/// The four player states, each with its own classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayerState {
    Boom,
    Bust,
    Injury,
    Meaningful,
}

impl PlayerState {
    /// Fixed order, also used to break ties between equal probabilities.
    pub const ALL: [PlayerState; 4] = [PlayerState::Boom, PlayerState::Bust, PlayerState::Injury, PlayerState::Meaningful];

    pub fn as_str(self) -> &'static str {
        match self {
            PlayerState::Boom => "boom",
            PlayerState::Bust => "bust",
            PlayerState::Injury => "injury",
            PlayerState::Meaningful => "meaningful",
        }
    }

    /// Injury and bust networks use tanh; boom and meaningful use softplus.
    pub fn activation(self) -> Activation {
        match self {
            PlayerState::Injury | PlayerState::Bust => Activation::Tanh,
            PlayerState::Boom | PlayerState::Meaningful => Activation::Softplus,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, PlayerState::Boom | PlayerState::Meaningful)
    }
}

impl fmt::Display for PlayerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlayerState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlayerState::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown player state {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchLayer {
    pub width: usize,
    pub batch_norm: bool,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub dropout_rate: f64,
    pub layers: Vec<BranchLayer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrunkLayer {
    pub width: usize,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub branch_count: usize,
    pub branch: BranchSpec,
    pub trunk: Vec<TrunkLayer>,
}

impl NetworkConfig {
    /// Six branches of dropout plus seven dense/batch-norm pairs of width 32,
    /// a six-layer trunk of width 64 and a sigmoid output: 98 counted layers.
    pub fn standard(input_dim: usize, activation: Activation) -> Self {
        NetworkConfig::uniform(input_dim, 6, 0.2, 7, 32, 6, 64, activation)
    }

    /// Every branch layer batch-normalized with the same width; every trunk
    /// layer with the same width.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        input_dim: usize,
        branch_count: usize,
        dropout_rate: f64,
        branch_depth: usize,
        branch_width: usize,
        trunk_depth: usize,
        trunk_width: usize,
        activation: Activation,
    ) -> Self {
        NetworkConfig {
            input_dim,
            branch_count,
            branch: BranchSpec {
                dropout_rate,
                layers: vec![
                    BranchLayer {
                        width: branch_width,
                        batch_norm: true,
                        activation,
                    };
                    branch_depth
                ],
            },
            trunk: vec![
                TrunkLayer {
                    width: trunk_width,
                    activation,
                };
                trunk_depth
            ],
        }
    }

    /// Dropout, dense, batch-norm, merge and output layers all count.
    pub fn total_layers(&self) -> usize {
        let per_branch = 1 + self.branch.layers.iter().map(|l| 1 + usize::from(l.batch_norm)).sum::<usize>();
        self.branch_count * per_branch + 1 + self.trunk.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::invalid("input dimension must be positive"));
        }
        if self.branch_count == 0 {
            return Err(Error::invalid("at least one branch is required"));
        }
        if !(0.0..1.0).contains(&self.branch.dropout_rate) {
            return Err(Error::invalid("dropout rate must lie in [0, 1)"));
        }
        if self.branch.layers.iter().any(|l| l.width == 0) || self.trunk.iter().any(|l| l.width == 0) {
            return Err(Error::invalid("layer widths must be positive"));
        }
        Ok(())
    }

    fn branch_output_width(&self) -> usize {
        self.branch.layers.last().map_or(self.input_dim, |l| l.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dense {
    input: usize,
    output: usize,
    weights: usize,
    bias: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Norm {
    gamma: usize,
    beta: usize,
    /// Offset into the running-statistics vectors.
    stats: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    dense: Dense,
    norm: Option<Norm>,
    activation: Activation,
}

/// Parameter offsets for every layer of a configuration.
#[derive(Debug, Clone, PartialEq)]
struct Layout {
    branches: Vec<Vec<Layer>>,
    trunk: Vec<Layer>,
    output: Dense,
    params: usize,
    stats: usize,
}

impl Layout {
    fn new(config: &NetworkConfig) -> Layout {
        let mut params = 0;
        let mut stats = 0;
        let dense = |input: usize, output: usize, bias: bool, params: &mut usize| {
            let weights = *params;
            *params += input * output;
            let bias = bias.then(|| {
                let b = *params;
                *params += output;
                b
            });
            Dense {
                input,
                output,
                weights,
                bias,
            }
        };
        let mut branches = Vec::new();
        for _ in 0..config.branch_count {
            let mut width = config.input_dim;
            let mut layers = Vec::new();
            for spec in &config.branch.layers {
                let d = dense(width, spec.width, !spec.batch_norm, &mut params);
                let norm = spec.batch_norm.then(|| {
                    let n = Norm {
                        gamma: params,
                        beta: params + spec.width,
                        stats,
                    };
                    params += 2 * spec.width;
                    stats += spec.width;
                    n
                });
                layers.push(Layer {
                    dense: d,
                    norm,
                    activation: spec.activation,
                });
                width = spec.width;
            }
            branches.push(layers);
        }
        let mut width = config.branch_count * config.branch_output_width();
        let mut trunk = Vec::new();
        for spec in &config.trunk {
            trunk.push(Layer {
                dense: dense(width, spec.width, true, &mut params),
                norm: None,
                activation: spec.activation,
            });
            width = spec.width;
        }
        let output = dense(width, 1, true, &mut params);
        Layout {
            branches,
            trunk,
            output,
            params,
            stats,
        }
    }

    fn layers(&self) -> impl Iterator<Item = &Layer> {
        self.branches.iter().flatten().chain(&self.trunk)
    }
}

/// Row-major batch matrix.
#[derive(Debug, Clone, PartialEq)]
struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    fn from_rows(rows: &[&[f64]]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Per-feature standardization fitted on training inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Population statistics; constant features get unit scale.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Standardizer> {
        let first = rows.first().ok_or_else(|| Error::EmptySample("no rows to standardize".into()))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m).powi(2);
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.std).map(|((x, m), s)| (x - m) / s).collect()
    }
}

/// Forward-pass mode. Training mode normalizes with batch statistics and,
/// when `dropout` is set, draws dropout masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train { dropout: bool },
    Infer,
}

/// Inverted dropout: zero each entry with probability `rate` and scale the
/// survivors by `1 / (1 − rate)`.
pub fn dropout(x: &[f64], rate: f64, rng: &mut impl Rng) -> Vec<f64> {
    let keep = 1.0 / (1.0 - rate);
    x.iter().map(|v| if rng.random::<f64>() < rate { 0.0 } else { v * keep }).collect()
}

/// Batch-normalizes columns with population statistics, returning the
/// normalized batch (before scale and shift), column means and variances.
pub fn normalize_batch(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let m = Mat::from_rows(&refs);
    let (xhat, mean, var) = batch_stats_normalize(&m);
    let out = (0..xhat.rows).map(|r| xhat.row(r).to_vec()).collect();
    (out, mean, var)
}

fn batch_stats_normalize(z: &Mat) -> (Mat, Vec<f64>, Vec<f64>) {
    let n = z.rows as f64;
    let mut mean = vec![0.0; z.cols];
    for r in 0..z.rows {
        for (m, v) in mean.iter_mut().zip(z.row(r)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; z.cols];
    for r in 0..z.rows {
        for ((s, v), m) in var.iter_mut().zip(z.row(r)).zip(&mean) {
            *s += (v - m).powi(2);
        }
    }
    var.iter_mut().for_each(|s| *s /= n);
    let mut xhat = Mat::zeros(z.rows, z.cols);
    for r in 0..z.rows {
        for c in 0..z.cols {
            xhat.data[r * z.cols + c] = (z.data[r * z.cols + c] - mean[c]) / (var[c] + BN_EPSILON).sqrt();
        }
    }
    (xhat, mean, var)
}

struct LayerCache {
    input: Mat,
    xhat: Option<Mat>,
    batch_var: Vec<f64>,
    batch_mean: Vec<f64>,
    pre: Mat,
    out: Mat,
}

struct Cache {
    branches: Vec<Vec<LayerCache>>,
    merged: Mat,
    trunk: Vec<LayerCache>,
    output_z: Vec<f64>,
    probabilities: Vec<f64>,
}

fn dense_forward(params: &[f64], d: &Dense, h: &Mat) -> Mat {
    let mut out = Mat::zeros(h.rows, d.output);
    let w = &params[d.weights..d.weights + d.input * d.output];
    for r in 0..h.rows {
        let x = h.row(r);
        for j in 0..d.output {
            let wj = &w[j * d.input..(j + 1) * d.input];
            let mut s = d.bias.map_or(0.0, |b| params[b + j]);
            for (a, b) in wj.iter().zip(x) {
                s += a * b;
            }
            out.data[r * d.output + j] = s;
        }
    }
    out
}

/// Accumulates weight/bias gradients and returns the gradient with respect
/// to the layer input when `need_input` is set.
fn dense_backward(params: &[f64], d: &Dense, h: &Mat, dz: &Mat, grad: &mut [f64], need_input: bool) -> Option<Mat> {
    for r in 0..h.rows {
        let x = h.row(r);
        for j in 0..d.output {
            let g = dz.data[r * d.output + j];
            if g == 0.0 {
                continue;
            }
            let gw = &mut grad[d.weights + j * d.input..d.weights + (j + 1) * d.input];
            for (gw, xv) in gw.iter_mut().zip(x) {
                *gw += g * xv;
            }
            if let Some(b) = d.bias {
                grad[b + j] += g;
            }
        }
    }
    if !need_input {
        return None;
    }
    let w = &params[d.weights..d.weights + d.input * d.output];
    let mut dh = Mat::zeros(h.rows, d.input);
    for r in 0..h.rows {
        let out = &mut dh.data[r * d.input..(r + 1) * d.input];
        for j in 0..d.output {
            let g = dz.data[r * d.output + j];
            if g == 0.0 {
                continue;
            }
            for (o, wv) in out.iter_mut().zip(&w[j * d.input..(j + 1) * d.input]) {
                *o += g * wv;
            }
        }
    }
    Some(dh)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedNetwork {
    pub config: NetworkConfig,
    pub seed: u64,
    pub params: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub standardizer: Option<Standardizer>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    network: TrainedNetwork,
}

impl TrainedNetwork {
    /// Seeded fan-in uniform weights, zero biases, unit batch-norm scale and
    /// zero shift.
    pub fn initialize(config: &NetworkConfig, seed: u64) -> Result<TrainedNetwork> {
        config.validate()?;
        let layout = Layout::new(config);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; layout.params];
        let fill = |d: &Dense, activation: Activation, rng: &mut ChaCha8Rng, params: &mut [f64]| {
            let bound = activation.init_bound(d.input);
            for w in &mut params[d.weights..d.weights + d.input * d.output] {
                *w = rng.random_range(-bound..=bound);
            }
        };
        for layer in layout.layers() {
            fill(&layer.dense, layer.activation, &mut rng, &mut params);
            if let Some(n) = layer.norm {
                params[n.gamma..n.gamma + layer.dense.output].fill(1.0);
            }
        }
        fill(&layout.output, Activation::Sigmoid, &mut rng, &mut params);
        Ok(TrainedNetwork {
            config: config.clone(),
            seed,
            params,
            running_mean: vec![0.0; layout.stats],
            running_var: vec![1.0; layout.stats],
            standardizer: None,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.config)
    }

    fn check_shapes(&self) -> Result<Layout> {
        let layout = self.layout();
        if self.params.len() != layout.params {
            return Err(Error::ShapeMismatch {
                expected: layout.params,
                got: self.params.len(),
            });
        }
        if self.running_mean.len() != layout.stats || self.running_var.len() != layout.stats {
            return Err(Error::ShapeMismatch {
                expected: layout.stats,
                got: self.running_mean.len().min(self.running_var.len()),
            });
        }
        if self.running_var.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::invalid("running variances must be positive"));
        }
        Ok(layout)
    }

    fn prepare(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.config.input_dim {
            return Err(Error::ShapeMismatch {
                expected: self.config.input_dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature vector is not finite"));
        }
        Ok(match &self.standardizer {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        })
    }

    fn forward_batch(&self, layout: &Layout, x: &Mat, mode: Mode, rng: Option<&mut ChaCha8Rng>) -> Cache {
        let mut rng = rng;
        let p = &self.params;
        let layer_forward = |layer: &Layer, input: Mat| -> LayerCache {
            let z = dense_forward(p, &layer.dense, &input);
            let width = layer.dense.output;
            let (pre, xhat, batch_mean, batch_var) = match layer.norm {
                None => (z.clone(), None, Vec::new(), Vec::new()),
                Some(n) => {
                    let (xhat, mean, var) = match mode {
                        Mode::Train { .. } => batch_stats_normalize(&z),
                        Mode::Infer => {
                            let mut xh = Mat::zeros(z.rows, width);
                            for r in 0..z.rows {
                                for c in 0..width {
                                    let rm = self.running_mean[n.stats + c];
                                    let rv = self.running_var[n.stats + c];
                                    xh.data[r * width + c] = (z.data[r * width + c] - rm) / (rv + BN_EPSILON).sqrt();
                                }
                            }
                            (xh, Vec::new(), Vec::new())
                        }
                    };
                    let mut pre = Mat::zeros(z.rows, width);
                    for r in 0..z.rows {
                        for c in 0..width {
                            pre.data[r * width + c] = p[n.gamma + c] * xhat.data[r * width + c] + p[n.beta + c];
                        }
                    }
                    (pre, Some(xhat), mean, var)
                }
            };
            let mut out = pre.clone();
            out.data.iter_mut().for_each(|v| *v = layer.activation.apply(*v));
            LayerCache {
                input,
                xhat,
                batch_var,
                batch_mean,
                pre,
                out,
            }
        };

        let rate = self.config.branch.dropout_rate;
        let mut branches = Vec::new();
        let mut branch_inputs = Vec::new();
        for layers in &layout.branches {
            let input = match (mode, rng.as_deref_mut()) {
                (Mode::Train { dropout: true }, Some(rng)) if rate > 0.0 => Mat {
                    rows: x.rows,
                    cols: x.cols,
                    data: dropout(&x.data, rate, rng),
                },
                _ => x.clone(),
            };
            let mut caches: Vec<LayerCache> = Vec::new();
            let mut h = input.clone();
            for layer in layers {
                let c = layer_forward(layer, h);
                h = c.out.clone();
                caches.push(c);
            }
            branch_inputs.push(input);
            branches.push(caches);
        }
        let bw = self.config.branch_output_width();
        let mut merged = Mat::zeros(x.rows, bw * layout.branches.len());
        for (b, caches) in branches.iter().enumerate() {
            let src = caches.last().map_or(&branch_inputs[b], |c| &c.out);
            for r in 0..x.rows {
                merged.data[r * merged.cols + b * bw..r * merged.cols + (b + 1) * bw].copy_from_slice(src.row(r));
            }
        }
        let mut trunk = Vec::new();
        let mut h = merged.clone();
        for layer in &layout.trunk {
            let c = layer_forward(layer, h);
            h = c.out.clone();
            trunk.push(c);
        }
        let z = dense_forward(p, &layout.output, &h);
        let probabilities = z.data.iter().map(|v| act_sigmoid(*v).clamp(EPSILON, 1.0 - EPSILON)).collect();
        Cache {
            branches,
            merged,
            trunk,
            output_z: z.data,
            probabilities,
        }
    }

    /// Gradient of the mean clamped cross-entropy with respect to all
    /// parameters, for a batch already forwarded in training mode.
    fn backward(&self, layout: &Layout, cache: &Cache, labels: &[f64]) -> Vec<f64> {
        let p = &self.params;
        let mut grad = vec![0.0; p.len()];
        let n = labels.len() as f64;
        let mut dz = Mat::zeros(labels.len(), 1);
        for (i, y) in labels.iter().enumerate() {
            let raw = act_sigmoid(cache.output_z[i]);
            if raw > EPSILON && raw < 1.0 - EPSILON {
                dz.data[i] = (raw - y) / n;
            }
        }
        let last = cache.trunk.last().map_or(&cache.merged, |c| &c.out);
        let mut dh = dense_backward(p, &layout.output, last, &dz, &mut grad, true).expect("input gradient");

        let layer_backward = |layer: &Layer, c: &LayerCache, dout: Mat, grad: &mut [f64], need_input: bool| -> Option<Mat> {
            let width = layer.dense.output;
            let mut dpre = dout;
            for (g, (z, a)) in dpre.data.iter_mut().zip(c.pre.data.iter().zip(&c.out.data)) {
                *g *= layer.activation.derivative(*z, *a);
            }
            let dz = match (layer.norm, &c.xhat) {
                (Some(nm), Some(xhat)) => {
                    let rows = dpre.rows;
                    let mut dxhat = Mat::zeros(rows, width);
                    for r in 0..rows {
                        for col in 0..width {
                            let g = dpre.data[r * width + col];
                            grad[nm.gamma + col] += g * xhat.data[r * width + col];
                            grad[nm.beta + col] += g;
                            dxhat.data[r * width + col] = g * p[nm.gamma + col];
                        }
                    }
                    let m = rows as f64;
                    let mut dz = Mat::zeros(rows, width);
                    for col in 0..width {
                        let inv_std = 1.0 / (c.batch_var[col] + BN_EPSILON).sqrt();
                        let mut sum = 0.0;
                        let mut sum_x = 0.0;
                        for r in 0..rows {
                            sum += dxhat.data[r * width + col];
                            sum_x += dxhat.data[r * width + col] * xhat.data[r * width + col];
                        }
                        for r in 0..rows {
                            let i = r * width + col;
                            dz.data[i] = inv_std / m * (m * dxhat.data[i] - sum - xhat.data[i] * sum_x);
                        }
                    }
                    dz
                }
                _ => dpre,
            };
            dense_backward(p, &layer.dense, &c.input, &dz, grad, need_input)
        };

        for (layer, c) in layout.trunk.iter().zip(&cache.trunk).rev() {
            dh = layer_backward(layer, c, dh, &mut grad, true).expect("input gradient");
        }
        let bw = self.config.branch_output_width();
        for (b, (layers, caches)) in layout.branches.iter().zip(&cache.branches).enumerate() {
            let mut d = Mat::zeros(dh.rows, bw);
            for r in 0..dh.rows {
                d.data[r * bw..(r + 1) * bw].copy_from_slice(&dh.data[r * dh.cols + b * bw..r * dh.cols + (b + 1) * bw]);
            }
            for (i, (layer, c)) in layers.iter().zip(caches).enumerate().rev() {
                match layer_backward(layer, c, d, &mut grad, i > 0) {
                    Some(next) => d = next,
                    None => break,
                }
            }
        }
        grad
    }

    /// Probability for one feature vector. Infer mode is deterministic and
    /// uses batch-norm running statistics; train mode on a single example is
    /// mostly useful with `seed` for dropout experiments.
    pub fn forward(&self, x: &[f64], mode: Mode, seed: u64) -> Result<f64> {
        let layout = self.check_shapes()?;
        let x = self.prepare(x)?;
        let m = Mat::from_rows(&[&x]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cache = self.forward_batch(&layout, &m, mode, Some(&mut rng));
        Ok(cache.probabilities[0])
    }

    /// Probabilities for a whole batch forwarded together, so training mode
    /// normalizes with this batch's statistics.
    pub fn forward_batch_rows(&self, rows: &[Vec<f64>], mode: Mode, seed: u64) -> Result<Vec<f64>> {
        let layout = self.check_shapes()?;
        let prepared = rows.iter().map(|r| self.prepare(r)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&[f64]> = prepared.iter().map(Vec::as_slice).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(self.forward_batch(&layout, &Mat::from_rows(&refs), mode, Some(&mut rng)).probabilities)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.predict_batch(std::slice::from_ref(&x.to_vec())).map(|v| v[0])
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let layout = self.check_shapes()?;
        let prepared = rows.iter().map(|r| self.prepare(r)).collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(rows.len());
        for chunk in prepared.chunks(256) {
            let refs: Vec<&[f64]> = chunk.iter().map(Vec::as_slice).collect();
            let cache = self.forward_batch(&layout, &Mat::from_rows(&refs), Mode::Infer, None);
            out.extend(cache.probabilities);
        }
        Ok(out)
    }

    /// Mean clamped binary cross-entropy of a batch in training mode without
    /// dropout, and its analytic gradient.
    pub fn loss_and_gradient(&self, rows: &[Vec<f64>], labels: &[f64]) -> Result<(f64, Vec<f64>)> {
        let layout = self.check_shapes()?;
        let prepared = rows.iter().map(|r| self.prepare(r)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&[f64]> = prepared.iter().map(Vec::as_slice).collect();
        let cache = self.forward_batch(&layout, &Mat::from_rows(&refs), Mode::Train { dropout: false }, None);
        let loss = bce(&cache.probabilities, labels);
        Ok((loss, self.backward(&layout, &cache, labels)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            network: self.clone(),
        })?)
    }

    pub fn from_json(input: &str) -> Result<TrainedNetwork> {
        let file: ModelFile = serde_json::from_str(input)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model file {} v{}", file.format, file.version)));
        }
        file.network.config.validate()?;
        file.network.check_shapes()?;
        Ok(file.network)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TrainedNetwork> {
        TrainedNetwork::from_json(&fs::read_to_string(path)?)
    }
}

fn bce(probabilities: &[f64], labels: &[f64]) -> f64 {
    let n = labels.len() as f64;
    probabilities
        .iter()
        .zip(labels)
        .map(|(p, y)| -(y * p.ln() + (1.0 - y) * (1.0 - p).ln()))
        .sum::<f64>()
        / n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Fit a per-feature standardizer on the training inputs.
    pub standardize: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            learning_rate: 0.01,
            epochs: 30,
            batch_size: 32,
            seed: 1,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    pub network: TrainedNetwork,
    /// Mean training loss per epoch, measured on each minibatch before its
    /// update.
    pub loss_history: Vec<f64>,
}

fn check_dataset(config: &NetworkConfig, features: &[Vec<f64>], labels: &[f64]) -> Result<()> {
    if features.is_empty() {
        return Err(Error::EmptySample("training set is empty".into()));
    }
    if features.len() != labels.len() {
        return Err(Error::ShapeMismatch {
            expected: features.len(),
            got: labels.len(),
        });
    }
    if let Some(bad) = labels.iter().find(|y| **y != 0.0 && **y != 1.0) {
        return Err(Error::NonBinaryLabel(*bad));
    }
    if let Some(row) = features.iter().find(|r| r.len() != config.input_dim) {
        return Err(Error::ShapeMismatch {
            expected: config.input_dim,
            got: row.len(),
        });
    }
    Ok(())
}

/// Minibatch SGD. Initialization, shuffling and dropout masks all derive from
/// `options.seed`.
pub fn train(config: &NetworkConfig, features: &[Vec<f64>], labels: &[f64], options: &TrainOptions) -> Result<TrainingRun> {
    config.validate()?;
    check_dataset(config, features, labels)?;
    if options.batch_size == 0 {
        return Err(Error::invalid("batch size must be positive"));
    }
    let mut net = TrainedNetwork::initialize(config, options.seed)?;
    if options.standardize {
        net.standardizer = Some(Standardizer::fit(features)?);
    }
    let layout = net.layout();
    let prepared = features.iter().map(|r| net.prepare(r)).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut history = Vec::with_capacity(options.epochs);

    for epoch in 0..options.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (batch, idx) in order.chunks(options.batch_size).enumerate() {
            let refs: Vec<&[f64]> = idx.iter().map(|&i| prepared[i].as_slice()).collect();
            let y: Vec<f64> = idx.iter().map(|&i| labels[i]).collect();
            let cache = net.forward_batch(&layout, &Mat::from_rows(&refs), Mode::Train { dropout: true }, Some(&mut rng));
            let loss = bce(&cache.probabilities, &y);
            if !loss.is_finite() {
                return Err(Error::NanLoss {
                    epoch,
                    batch,
                    lr: options.learning_rate,
                });
            }
            total += loss * idx.len() as f64;
            let grad = net.backward(&layout, &cache, &y);
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NanLoss {
                    epoch,
                    batch,
                    lr: options.learning_rate,
                });
            }
            for (w, g) in net.params.iter_mut().zip(&grad) {
                *w -= options.learning_rate * g;
            }
            let caches = cache.branches.iter().flatten().chain(&cache.trunk);
            for (layer, c) in layout.layers().zip(caches) {
                if let Some(n) = layer.norm {
                    for col in 0..layer.dense.output {
                        let i = n.stats + col;
                        net.running_mean[i] = BN_MOMENTUM * net.running_mean[i] + (1.0 - BN_MOMENTUM) * c.batch_mean[col];
                        net.running_var[i] = BN_MOMENTUM * net.running_var[i] + (1.0 - BN_MOMENTUM) * c.batch_var[col];
                    }
                }
            }
        }
        history.push(total / prepared.len() as f64);
    }
    Ok(TrainingRun {
        network: net,
        loss_history: history,
    })
}

/// Largest relative difference `|g_a − g_n| / max(1e-8, |g_a| + |g_n|)`
/// between analytic and central-difference gradients (step 1e-5) over every
/// parameter, for a freshly seeded network in training mode with dropout off.
pub fn gradient_check(config: &NetworkConfig, features: &[Vec<f64>], labels: &[f64], seed: u64) -> Result<f64> {
    config.validate()?;
    check_dataset(config, features, labels)?;
    let mut net = TrainedNetwork::initialize(config, seed)?;
    // Move batch-norm scale and shift off their identity values so their
    // gradients are exercised away from the symmetric point.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for layer in net.layout().layers() {
        if let Some(n) = layer.norm {
            for c in 0..layer.dense.output {
                net.params[n.gamma + c] = rng.random_range(0.5..1.5);
                net.params[n.beta + c] = rng.random_range(-0.5..0.5);
            }
        }
    }
    let (_, analytic) = net.loss_and_gradient(features, labels)?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..net.params.len() {
        let original = net.params[i];
        net.params[i] = original + h;
        let (plus, _) = net.loss_only(features, labels)?;
        net.params[i] = original - h;
        let (minus, _) = net.loss_only(features, labels)?;
        net.params[i] = original;
        let numeric = (plus - minus) / (2.0 * h);
        let rel = (analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

impl TrainedNetwork {
    fn loss_only(&self, rows: &[Vec<f64>], labels: &[f64]) -> Result<(f64, ())> {
        let layout = self.layout();
        let prepared = rows.iter().map(|r| self.prepare(r)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&[f64]> = prepared.iter().map(Vec::as_slice).collect();
        let cache = self.forward_batch(&layout, &Mat::from_rows(&refs), Mode::Train { dropout: false }, None);
        Ok((bce(&cache.probabilities, labels), ()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierMetrics {
    pub accuracy: f64,
    pub positive_predictive_value: f64,
    pub negative_predictive_value: f64,
    pub predicted_positive_rate: f64,
    /// False when there were no positive predictions and PPV was set to 0.
    pub ppv_defined: bool,
    /// False when there were no negative predictions and NPV was set to 0.
    pub npv_defined: bool,
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl ClassifierMetrics {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Result<ClassifierMetrics> {
        let n = tp + fp + tn + fn_;
        if n == 0 {
            return Err(Error::EmptySample("test set is empty".into()));
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Ok(ClassifierMetrics {
            accuracy: ratio(tp + tn, n),
            positive_predictive_value: ratio(tp, tp + fp),
            negative_predictive_value: ratio(tn, tn + fn_),
            predicted_positive_rate: ratio(tp + fp, n),
            ppv_defined: tp + fp > 0,
            npv_defined: tn + fn_ > 0,
            true_positive: tp,
            false_positive: fp,
            true_negative: tn,
            false_negative: fn_,
        })
    }

    /// Confusion-matrix metrics at the 0.5 decision threshold.
    pub fn from_predictions(probabilities: &[f64], labels: &[f64]) -> Result<ClassifierMetrics> {
        if probabilities.len() != labels.len() {
            return Err(Error::ShapeMismatch {
                expected: labels.len(),
                got: probabilities.len(),
            });
        }
        let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
        for (p, y) in probabilities.iter().zip(labels) {
            if *y != 0.0 && *y != 1.0 {
                return Err(Error::NonBinaryLabel(*y));
            }
            match (*p >= DECISION_THRESHOLD, *y == 1.0) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, false) => tn += 1,
                (false, true) => fn_ += 1,
            }
        }
        ClassifierMetrics::from_counts(tp, fp, tn, fn_)
    }
}

pub fn evaluate_classifier(net: &TrainedNetwork, features: &[Vec<f64>], labels: &[f64]) -> Result<ClassifierMetrics> {
    if features.is_empty() {
        return Err(Error::EmptySample("test set is empty".into()));
    }
    let probabilities = net.predict_batch(features)?;
    ClassifierMetrics::from_predictions(&probabilities, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_values() {
        assert_eq!(act_tanh(0.0), 0.0);
        assert_eq!(act_sigmoid(0.0), 0.5);
        assert!((act_softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((act_tanh(1.0) - 0.761_594_155_955_764_9).abs() < 1e-15);
        assert!((act_softplus(50.0) - 50.0).abs() < 1e-12);
        assert!(act_softplus(-800.0) >= 0.0);
        assert!(act_sigmoid(-800.0) >= 0.0 && act_sigmoid(800.0) <= 1.0);
        assert_eq!(act_tanh(400.0), 1.0);
        for z in [-3.0, -0.5, 0.25, 2.0] {
            assert!((act_tanh(z) - f64::tanh(z)).abs() < 1e-15);
        }
    }

    #[test]
    fn standard_config_has_98_layers() {
        let c = NetworkConfig::standard(10, Activation::Tanh);
        assert_eq!(c.total_layers(), 98);
        assert_eq!(c.branch_count, 6);
    }

    #[test]
    fn zero_parameters_give_one_half() {
        let mut net = TrainedNetwork::initialize(&NetworkConfig::uniform(3, 2, 0.0, 2, 4, 2, 4, Activation::Tanh), 3).unwrap();
        net.params.iter_mut().for_each(|p| *p = 0.0);
        for x in [[1.0, 2.0, 3.0], [-5.0, 0.0, 9.0]] {
            assert_eq!(net.forward(&x, Mode::Infer, 0).unwrap(), 0.5);
        }
    }

    #[test]
    fn metric_fixtures() {
        let m = ClassifierMetrics::from_counts(6, 2, 88, 4).unwrap();
        assert_eq!(m.positive_predictive_value, 0.75);
        assert!((m.negative_predictive_value - 88.0 / 92.0).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.94);
        assert_eq!(m.predicted_positive_rate, 0.08);

        let labels: Vec<f64> = (0..100).map(|i| if i < 12 { 1.0 } else { 0.0 }).collect();
        let m = ClassifierMetrics::from_predictions(&[0.1; 100], &labels).unwrap();
        assert_eq!(m.accuracy, 0.88);
        assert_eq!(m.predicted_positive_rate, 0.0);
        assert!(!m.ppv_defined && m.positive_predictive_value == 0.0);

        let m = ClassifierMetrics::from_predictions(&labels, &labels).unwrap();
        assert_eq!((m.accuracy, m.positive_predictive_value, m.negative_predictive_value), (1.0, 1.0, 1.0));
        assert_eq!(m.predicted_positive_rate, 0.12);
        assert!(ClassifierMetrics::from_counts(0, 0, 0, 0).is_err());
    }
}
