//! The shared denoiser: an MLP over `[x_num_t, one-hot categoricals,
//! sinusoidal(t)]` whose output splits into a predicted-noise head for the
//! numeric block and one logit head per categorical column. Hidden layers
//! use SiLU; the output layer is linear. SiLU keeps the loss smooth, which
//! the finite-difference gradient checks rely on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};
use crate::tabddpm::TabSchema;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DenseLayer {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DenoiserParams {
    /// Hidden layers followed by the linear output layer.
    pub layers: Vec<DenseLayer>,
    pub num_numeric: usize,
    pub cardinalities: Vec<usize>,
    pub time_embed_dim: usize,
}

/// Output heads, split per schema.
#[derive(Debug, Clone)]
pub struct DenoiserOutput {
    /// Predicted noise for the numeric block.
    pub eps_hat: Vec<f64>,
    /// Unnormalized logits per categorical column.
    pub logits: Vec<Vec<f64>>,
}

/// Per-layer gradients, same shapes as the parameters.
#[derive(Debug, Clone)]
pub struct DenoiserGrads {
    pub layers: Vec<DenseLayer>,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn silu(z: f64) -> f64 {
    z * sigmoid(z)
}

#[inline]
fn silu_prime(z: f64) -> f64 {
    let s = sigmoid(z);
    s * (1.0 + z * (1.0 - s))
}

/// Sinusoidal embedding of the (1-based) timestep.
pub fn time_embedding(t: usize, dim: usize) -> Vec<f64> {
    debug_assert!(dim >= 2 && dim % 2 == 0);
    let half = dim / 2;
    let mut out = Vec::with_capacity(dim);
    for i in 0..half {
        let exponent = if half > 1 { i as f64 / (half - 1) as f64 } else { 0.0 };
        let freq = (-(10_000f64).ln() * exponent).exp();
        out.push((t as f64 * freq).sin());
    }
    for i in 0..half {
        let exponent = if half > 1 { i as f64 / (half - 1) as f64 } else { 0.0 };
        let freq = (-(10_000f64).ln() * exponent).exp();
        out.push((t as f64 * freq).cos());
    }
    out
}

impl DenoiserParams {
    pub fn init(schema: &TabSchema, hidden_sizes: &[usize], time_embed_dim: usize, rng: &mut Rng) -> Result<Self> {
        if time_embed_dim < 2 || time_embed_dim % 2 != 0 {
            return Err(Error::InvalidArgument(format!("time_embed_dim must be even and >= 2, got {time_embed_dim}")));
        }
        if hidden_sizes.is_empty() {
            return Err(Error::InvalidArgument("denoiser needs at least one hidden layer".into()));
        }
        let input_dim = schema.num_numeric() + schema.one_hot_width() + time_embed_dim;
        let output_dim = schema.num_numeric() + schema.one_hot_width();
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden_sizes);
        dims.push(output_dim);
        let layers = dims
            .windows(2)
            .map(|pair| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                DenseLayer {
                    weight: Matrix::uniform(fan_out, fan_in, 1.0 / (fan_in as f64).sqrt(), rng),
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(DenoiserParams {
            layers,
            num_numeric: schema.num_numeric(),
            cardinalities: schema.cardinalities(),
            time_embed_dim,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("at least one layer").weight.rows()
    }

    pub fn zero_grads(&self) -> DenoiserGrads {
        DenoiserGrads {
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer { weight: Matrix::zeros(l.weight.rows(), l.weight.cols()), bias: vec![0.0; l.bias.len()] })
                .collect(),
        }
    }

    /// Alternating weight/bias groups, matching [`DenoiserParams::from_groups`].
    pub fn to_groups(&self) -> Vec<Vec<f64>> {
        let mut groups = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            groups.push(l.weight.as_slice().to_vec());
            groups.push(l.bias.clone());
        }
        groups
    }

    pub fn from_groups(&self, groups: &[Vec<f64>]) -> Result<DenoiserParams> {
        if groups.len() != 2 * self.layers.len() {
            return Err(Error::shape(format!("{} groups", 2 * self.layers.len()), format!("{}", groups.len())));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, l) in self.layers.iter().enumerate() {
            layers.push(DenseLayer {
                weight: Matrix::from_vec(l.weight.rows(), l.weight.cols(), groups[2 * i].clone())?,
                bias: groups[2 * i + 1].clone(),
            });
        }
        Ok(DenoiserParams { layers, ..self.clone() })
    }

    pub fn group_names(&self) -> Vec<String> {
        (0..self.layers.len()).flat_map(|i| [format!("layer{i}.weight"), format!("layer{i}.bias")]).collect()
    }

    fn assemble_input(&self, x_num_t: &[f64], x_cat_onehots: &[Vec<f64>], t: usize) -> Result<Vec<f64>> {
        if x_num_t.len() != self.num_numeric || x_cat_onehots.len() != self.cardinalities.len() {
            return Err(Error::Model(format!(
                "denoiser expects {} numeric dims and {} categorical columns, got {} and {}",
                self.num_numeric,
                self.cardinalities.len(),
                x_num_t.len(),
                x_cat_onehots.len()
            )));
        }
        for (oh, k) in x_cat_onehots.iter().zip(&self.cardinalities) {
            if oh.len() != *k {
                return Err(Error::Model(format!("one-hot width {} does not match cardinality {k}", oh.len())));
            }
        }
        let mut input = Vec::with_capacity(self.input_dim());
        input.extend_from_slice(x_num_t);
        for oh in x_cat_onehots {
            input.extend_from_slice(oh);
        }
        input.extend(time_embedding(t, self.time_embed_dim));
        Ok(input)
    }

    fn split_output(&self, out: Vec<f64>) -> DenoiserOutput {
        let eps_hat = out[..self.num_numeric].to_vec();
        let mut logits = Vec::with_capacity(self.cardinalities.len());
        let mut offset = self.num_numeric;
        for &k in &self.cardinalities {
            logits.push(out[offset..offset + k].to_vec());
            offset += k;
        }
        DenoiserOutput { eps_hat, logits }
    }
}

/// Layer inputs kept from a forward pass (pre-activations included), enough
/// to run the backward pass.
pub(crate) struct DenoiserTrace {
    /// inputs[0] is the network input; inputs[i] the activation entering layer i.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of each hidden layer.
    pre_activations: Vec<Vec<f64>>,
    pub output: Vec<f64>,
}

pub(crate) fn forward_trace(params: &DenoiserParams, input: Vec<f64>) -> Result<DenoiserTrace> {
    let n_layers = params.layers.len();
    let mut inputs = Vec::with_capacity(n_layers);
    let mut pre_activations = Vec::with_capacity(n_layers - 1);
    let mut current = input;
    for (i, layer) in params.layers.iter().enumerate() {
        let mut z = layer.weight.matvec(&current)?;
        for (zi, b) in z.iter_mut().zip(&layer.bias) {
            *zi += b;
        }
        inputs.push(current);
        if i + 1 < n_layers {
            let activated = z.iter().map(|v| silu(*v)).collect();
            pre_activations.push(z);
            current = activated;
        } else {
            current = z;
        }
    }
    Ok(DenoiserTrace { inputs, pre_activations, output: current })
}

/// Accumulates parameter gradients given the gradient of the loss with
/// respect to the network output.
pub(crate) fn backward_trace(
    params: &DenoiserParams,
    trace: &DenoiserTrace,
    d_output: &[f64],
    grads: &mut DenoiserGrads,
) -> Result<()> {
    let n_layers = params.layers.len();
    let mut delta = d_output.to_vec();
    for i in (0..n_layers).rev() {
        let layer = &params.layers[i];
        let g = &mut grads.layers[i];
        g.weight.add_outer(&delta, &trace.inputs[i], 1.0);
        for (gb, d) in g.bias.iter_mut().zip(&delta) {
            *gb += d;
        }
        if i > 0 {
            let upstream = layer.weight.matvec_transpose(&delta)?;
            delta = upstream
                .iter()
                .zip(&trace.pre_activations[i - 1])
                .map(|(u, z)| u * silu_prime(*z))
                .collect();
        }
    }
    Ok(())
}

/// Forward pass on one sample, outputs split per schema heads.
pub fn denoiser_forward(
    params: &DenoiserParams,
    x_num_t: &[f64],
    x_cat_onehots: &[Vec<f64>],
    t: usize,
) -> Result<DenoiserOutput> {
    let input = params.assemble_input(x_num_t, x_cat_onehots, t)?;
    let trace = forward_trace(params, input)?;
    Ok(params.split_output(trace.output))
}

pub(crate) fn assemble_input_for(
    params: &DenoiserParams,
    x_num_t: &[f64],
    x_cat_onehots: &[Vec<f64>],
    t: usize,
) -> Result<Vec<f64>> {
    params.assemble_input(x_num_t, x_cat_onehots, t)
}

pub(crate) fn split_output_for(params: &DenoiserParams, out: Vec<f64>) -> DenoiserOutput {
    params.split_output(out)
}

impl DenoiserGrads {
    pub fn to_groups(&self) -> Vec<Vec<f64>> {
        let mut groups = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            groups.push(l.weight.as_slice().to_vec());
            groups.push(l.bias.clone());
        }
        groups
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            for w in l.weight.as_mut_slice() {
                *w *= factor;
            }
            for b in &mut l.bias {
                *b *= factor;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabddpm::one_hot;

    fn small_schema() -> TabSchema {
        TabSchema::new(
            vec!["n0".into(), "n1".into()],
            vec![("c0".into(), vec!["a".into(), "b".into(), "c".into()]), ("c1".into(), vec!["x".into(), "y".into()])],
        )
        .unwrap()
    }

    #[test]
    fn zero_weights_give_zero_heads() {
        let schema = small_schema();
        let mut rng = Rng::new(1);
        let mut params = DenoiserParams::init(&schema, &[8], 4, &mut rng).unwrap();
        for l in &mut params.layers {
            l.weight = Matrix::zeros(l.weight.rows(), l.weight.cols());
            l.bias.iter_mut().for_each(|b| *b = 0.0);
        }
        let out = denoiser_forward(&params, &[0.3, -0.2], &[one_hot(1, 3), one_hot(0, 2)], 2).unwrap();
        assert!(out.eps_hat.iter().all(|v| *v == 0.0));
        assert!(out.logits.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn head_split_matches_schema_on_random_shapes() {
        let mut rng = Rng::new(5);
        for _ in 0..10 {
            let n_num = rng.index(3);
            let n_cat = 1 + rng.index(3);
            let cats: Vec<(String, Vec<String>)> = (0..n_cat)
                .map(|i| {
                    let k = 2 + rng.index(4);
                    (format!("c{i}"), (0..k).map(|j| format!("v{j}")).collect())
                })
                .collect();
            let schema = TabSchema::new((0..n_num).map(|i| format!("n{i}")).collect(), cats).unwrap();
            let params = DenoiserParams::init(&schema, &[6, 5], 4, &mut rng).unwrap();
            assert_eq!(params.output_dim(), schema.num_numeric() + schema.one_hot_width());
            let x_num: Vec<f64> = (0..n_num).map(|_| rng.gaussian()).collect();
            let onehots: Vec<Vec<f64>> = schema.cardinalities().iter().map(|&k| one_hot(rng.index(k), k)).collect();
            let out = denoiser_forward(&params, &x_num, &onehots, 1).unwrap();
            assert_eq!(out.eps_hat.len(), schema.num_numeric());
            assert_eq!(out.logits.len(), schema.num_categorical());
            for (l, &k) in out.logits.iter().zip(&schema.cardinalities()) {
                assert_eq!(l.len(), k);
            }
        }
    }

    #[test]
    fn forward_matches_layer_by_layer_oracle() {
        let schema = small_schema();
        let mut rng = Rng::new(9);
        let params = DenoiserParams::init(&schema, &[5], 4, &mut rng).unwrap();
        let x_num = vec![0.7, -1.1];
        let onehots = vec![one_hot(2, 3), one_hot(1, 2)];
        let t = 3;
        let got = denoiser_forward(&params, &x_num, &onehots, t).unwrap();

        // independent recomputation
        let mut input = Vec::new();
        input.extend_from_slice(&x_num);
        input.extend_from_slice(&onehots[0]);
        input.extend_from_slice(&onehots[1]);
        input.extend(time_embedding(t, 4));
        let l0 = &params.layers[0];
        let mut h = vec![0.0; l0.weight.rows()];
        #[allow(clippy::needless_range_loop)]
        for r in 0..l0.weight.rows() {
            let mut z = l0.bias[r];
            for c in 0..l0.weight.cols() {
                z += l0.weight.get(r, c) * input[c];
            }
            h[r] = z / (1.0 + (-z).exp());
        }
        let l1 = &params.layers[1];
        let mut out = vec![0.0; l1.weight.rows()];
        #[allow(clippy::needless_range_loop)]
        for r in 0..l1.weight.rows() {
            let mut z = l1.bias[r];
            for c in 0..l1.weight.cols() {
                z += l1.weight.get(r, c) * h[c];
            }
            out[r] = z;
        }
        let flat: Vec<f64> = got.eps_hat.iter().chain(got.logits.iter().flatten()).copied().collect();
        for (a, b) in flat.iter().zip(&out) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_dimension_and_range() {
        let e = time_embedding(17, 8);
        assert_eq!(e.len(), 8);
        assert!(e.iter().all(|v| v.abs() <= 1.0));
        // distinct timesteps produce distinct embeddings
        assert_ne!(time_embedding(1, 8), time_embedding(2, 8));
    }
}
