//! Self-organizing radial-basis classifier.
//!
//! Training builds the network while fitting it. Hidden units are spawned
//! at training samples that no unit of their own class responds to
//! strongly enough or that the current readout gets wrong, each unit's radius follows the distance to its nearest
//! neighbouring center, units that never carry a meaningful share of the
//! layer's response are pruned, and a ridge least-squares readout maps the
//! hidden activations to one-hot class targets. Grow/prune passes repeat
//! until the unit set stops changing. When a single hidden layer
//! generalises poorly on a seeded holdout split, a second layer is grown on
//! the activation vectors of the first.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, invalid, Result};
use crate::scalar::{sq_dist, Scalar};

use super::linalg::ridge_solve;
use super::pca::{pca_fit, PcaProjection};
use super::rbf::{RbfLayer, RbfUnit};
use super::LabeledSet;

/// Ridge added to the readout normal equations.
pub const RIDGE: f64 = 1e-6;
/// Variance retained by the optional PCA front layer.
pub const PCA_VARIANCE: f64 = 0.95;
/// Share of the samples held out when deciding on a second hidden layer.
pub const HOLDOUT_FRACTION: f64 = 0.1;
/// Datasets smaller than this skip the holdout split.
const MIN_HOLDOUT_SET: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Same-class activation below which a sample spawns a new unit.
    pub novelty_threshold: f64,
    /// Unit radius as a multiple of the distance to the nearest other center.
    pub width_overlap: f64,
    /// Units whose largest normalized response stays below this are pruned.
    pub prune_utility: f64,
    pub max_epochs: usize,
    /// Holdout accuracy below which a second hidden layer is grown.
    pub second_layer_trigger: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            novelty_threshold: 0.35,
            width_overlap: 1.0,
            prune_utility: 0.02,
            max_epochs: 50,
            second_layer_trigger: 0.9,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.novelty_threshold > 0.0 && self.novelty_threshold < 1.0) {
            return invalid(format!(
                "novelty_threshold must lie in (0, 1), got {}",
                self.novelty_threshold
            ));
        }
        if !(self.width_overlap.is_finite() && self.width_overlap > 0.0) {
            return invalid(format!(
                "width_overlap must be positive, got {}",
                self.width_overlap
            ));
        }
        if !(self.prune_utility.is_finite() && self.prune_utility >= 0.0) {
            return invalid(format!(
                "prune_utility must be >= 0, got {}",
                self.prune_utility
            ));
        }
        if self.max_epochs == 0 {
            return invalid("max_epochs must be positive");
        }
        if !self.second_layer_trigger.is_finite() {
            return invalid("second_layer_trigger must be finite");
        }
        Ok(())
    }
}

/// Trained classifier: optional PCA, one or two RBF layers, linear readout.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrbNetwork<T> {
    pub pca: Option<PcaProjection<T>>,
    pub hidden_layers: Vec<RbfLayer<T>>,
    /// `(last hidden size + 1) x classes`; the final row is the bias.
    pub output_weights: Vec<Vec<T>>,
    pub labels: Vec<String>,
}

impl<T: Scalar> SnrbNetwork<T> {
    /// Dimension of raw (pre-PCA) inputs.
    pub fn input_dim(&self) -> usize {
        match &self.pca {
            Some(p) => p.input_dim(),
            None => self.hidden_layers.first().map_or(0, RbfLayer::input_dim),
        }
    }

    pub fn hidden_unit_count(&self) -> usize {
        self.hidden_layers.iter().map(RbfLayer::len).sum()
    }

    /// Input plus hidden plus output.
    pub fn neuron_layer_count(&self) -> usize {
        self.hidden_layers.len() + 2 + usize::from(self.pca.is_some())
    }

    /// Checks the structural invariants of a trained or loaded network.
    pub fn validate(&self) -> Result<()> {
        if self.labels.len() < 2 {
            return invalid("network needs at least two labels");
        }
        if !(1..=2).contains(&self.hidden_layers.len()) {
            return invalid(format!(
                "network must have 1 or 2 hidden layers, got {}",
                self.hidden_layers.len()
            ));
        }
        let mut dim = match &self.pca {
            Some(p) => {
                for row in &p.basis {
                    check_dim(p.input_dim(), row.len())?;
                }
                p.components()
            }
            None => self.hidden_layers[0].input_dim(),
        };
        for layer in &self.hidden_layers {
            if layer.is_empty() {
                return invalid("hidden layer is empty");
            }
            for u in &layer.units {
                check_dim(dim, u.center.len())?;
                if !(u.width > T::zero() && u.width.is_finite()) {
                    return invalid("hidden unit width must be positive");
                }
            }
            dim = layer.len();
        }
        check_dim(dim + 1, self.output_weights.len())?;
        for row in &self.output_weights {
            check_dim(self.labels.len(), row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return invalid("output weights must be finite");
            }
        }
        Ok(())
    }

    fn features(&self, x: &[T]) -> Vec<T> {
        let mut h = match &self.pca {
            Some(p) => p.project_unchecked(x),
            None => x.to_vec(),
        };
        for layer in &self.hidden_layers {
            h = layer.activations(&h);
        }
        h
    }

    /// Class scores for `x`.
    pub fn scores(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.input_dim(), x.len())?;
        Ok(readout(&self.output_weights, &self.features(x)))
    }

    /// Predicted class index and the score vector.
    pub fn predict(&self, x: &[T]) -> Result<(usize, Vec<T>)> {
        let scores = self.scores(x)?;
        Ok((argmax(&scores), scores))
    }

    /// Fraction of `samples` whose predicted label matches.
    pub fn accuracy(&self, samples: &LabeledSet<T>) -> Result<f64> {
        let mut hits = 0;
        for (x, label) in samples {
            let (k, _) = self.predict(x)?;
            hits += usize::from(self.labels[k] == *label);
        }
        Ok(hits as f64 / samples.len().max(1) as f64)
    }
}

/// Predicted label and scores; equal scores resolve to the earlier class.
pub fn snrb_classify<T: Scalar>(net: &SnrbNetwork<T>, x: &[T]) -> Result<(String, Vec<T>)> {
    let (k, scores) = net.predict(x)?;
    Ok((net.labels[k].clone(), scores))
}

fn readout<T: Scalar>(weights: &[Vec<T>], hidden: &[T]) -> Vec<T> {
    let bias = weights.last().expect("readout has a bias row");
    let mut scores = bias.clone();
    for (row, &h) in weights.iter().zip(hidden) {
        for (s, &w) in scores.iter_mut().zip(row) {
            *s += h * w;
        }
    }
    scores
}

pub(crate) fn argmax<T: Scalar>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Appends the constant bias input.
fn design_row<T: Scalar>(mut h: Vec<T>) -> Vec<T> {
    h.push(T::one());
    h
}

fn one_hot<T: Scalar>(classes: &[usize], n_classes: usize) -> Vec<Vec<T>> {
    classes
        .iter()
        .map(|&c| {
            (0..n_classes)
                .map(|k| if k == c { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

/// Ridge readout from hidden activations to one-hot targets.
pub(crate) fn solve_readout<T: Scalar>(
    hidden: &[Vec<T>],
    classes: &[usize],
    n_classes: usize,
) -> Vec<Vec<T>> {
    let design: Vec<Vec<T>> = hidden.iter().cloned().map(design_row).collect();
    ridge_solve(&design, &one_hot(classes, n_classes), RIDGE)
}

fn layer_accuracy<T: Scalar>(weights: &[Vec<T>], hidden: &[Vec<T>], classes: &[usize]) -> f64 {
    let hits = hidden
        .iter()
        .zip(classes)
        .filter(|(h, &c)| argmax(&readout(weights, h)) == c)
        .count();
    hits as f64 / hidden.len().max(1) as f64
}

#[derive(Debug, Clone)]
struct Unit<T> {
    sample: usize,
    class: usize,
    width: T,
}

/// Grows one hidden layer on `inputs`; returns its units.
///
/// A sample spawns a unit when no unit of its class responds above the
/// novelty threshold, or when the readout fitted at the end of the previous
/// pass misclassifies it.
fn grow_layer<T: Scalar>(
    inputs: &[Vec<T>],
    classes: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<RbfUnit<T>> {
    let n = inputs.len();
    // strict compression bound: fewer units than samples once there are more than two
    let cap = if n > 2 { n - 1 } else { n };
    let novelty = T::of(cfg.novelty_threshold);
    let overlap = T::of(cfg.width_overlap);
    let prune = T::of(cfg.prune_utility);
    let response = |u: &Unit<T>, x: &[T]| {
        (-sq_dist(x, &inputs[u.sample]) / (T::of(2.0) * u.width * u.width)).exp()
    };
    let activations = |units: &[Unit<T>]| -> Vec<Vec<T>> {
        inputs
            .iter()
            .map(|x| units.iter().map(|u| response(u, x)).collect())
            .collect()
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut units: Vec<Unit<T>> = Vec::new();
    let mut wrong = vec![false; n];
    for _ in 0..cfg.max_epochs {
        order.shuffle(rng);
        let before: Vec<usize> = units.iter().map(|u| u.sample).collect();

        for &i in &order {
            if units.len() >= cap {
                break;
            }
            if units.iter().any(|u| u.sample == i) {
                continue;
            }
            let x = &inputs[i];
            let best = units
                .iter()
                .filter(|u| u.class == classes[i])
                .map(|u| response(u, x))
                .fold(T::zero(), T::max);
            if best < novelty || wrong[i] {
                let nearest = units
                    .iter()
                    .map(|u| sq_dist(x, &inputs[u.sample]))
                    .filter(|&d| d > T::zero())
                    .fold(T::infinity(), T::min);
                let width = if nearest.is_finite() {
                    overlap * nearest.sqrt()
                } else {
                    T::one()
                };
                units.push(Unit {
                    sample: i,
                    class: classes[i],
                    width,
                });
            }
        }
        refresh_widths(&mut units, inputs, overlap);

        // prune by utility: the largest share of the layer response a unit ever carries
        if units.len() > 1 {
            let mut utility = vec![T::zero(); units.len()];
            for acts in activations(&units) {
                let total: T = acts.iter().copied().sum();
                if total > T::zero() {
                    for (best, &a) in utility.iter_mut().zip(&acts) {
                        *best = best.max(a / total);
                    }
                }
            }
            let mut k = 0;
            units.retain(|_| {
                let keep = utility[k] >= prune;
                k += 1;
                keep
            });
            refresh_widths(&mut units, inputs, overlap);
        }

        let hidden = activations(&units);
        let weights = solve_readout(&hidden, classes, n_classes);
        for (flag, (h, &c)) in wrong.iter_mut().zip(hidden.iter().zip(classes)) {
            *flag = argmax(&readout(&weights, h)) != c;
        }

        let after: Vec<usize> = units.iter().map(|u| u.sample).collect();
        if after == before {
            break;
        }
    }
    units
        .into_iter()
        .map(|u| RbfUnit {
            center: inputs[u.sample].clone(),
            width: u.width,
        })
        .collect()
}

/// Sets each radius to `overlap` times the distance to the nearest other center.
fn refresh_widths<T: Scalar>(units: &mut [Unit<T>], inputs: &[Vec<T>], overlap: T) {
    if units.len() < 2 {
        return;
    }
    let nearest: Vec<T> = (0..units.len())
        .map(|j| {
            units
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, u)| sq_dist(&inputs[units[j].sample], &inputs[u.sample]))
                .filter(|&d| d > T::zero())
                .fold(T::infinity(), T::min)
        })
        .collect();
    for (u, d) in units.iter_mut().zip(nearest) {
        if d.is_finite() {
            u.width = overlap * d.sqrt();
        }
    }
}

fn layer_outputs<T: Scalar>(layer: &RbfLayer<T>, inputs: &[Vec<T>]) -> Vec<Vec<T>> {
    inputs.iter().map(|x| layer.activations(x)).collect()
}

/// Grows one or two hidden layers on `inputs` and returns them with the readout.
fn fit_layers<T: Scalar>(
    inputs: &[Vec<T>],
    classes: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
    two_layers: bool,
    rng: &mut ChaCha8Rng,
) -> (Vec<RbfLayer<T>>, Vec<Vec<T>>) {
    let first = RbfLayer {
        units: grow_layer(inputs, classes, n_classes, cfg, rng),
    };
    let mut hidden = layer_outputs(&first, inputs);
    let mut layers = vec![first];
    if two_layers {
        let second = RbfLayer {
            units: grow_layer(&hidden, classes, n_classes, cfg, rng),
        };
        hidden = layer_outputs(&second, &hidden);
        layers.push(second);
    }
    let weights = solve_readout(&hidden, classes, n_classes);
    (layers, weights)
}

/// Builds and trains a network on labelled samples. Deterministic given `cfg.seed`.
pub fn snrb_train<T: Scalar>(
    samples: &LabeledSet<T>,
    cfg: &TrainConfig,
    use_pca: bool,
) -> Result<SnrbNetwork<T>> {
    cfg.validate()?;
    if samples.is_empty() {
        return invalid("training set is empty");
    }
    let dim = samples[0].0.len();
    if dim == 0 {
        return invalid("training vectors are empty");
    }
    for (x, _) in samples {
        check_dim(dim, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return invalid("training vectors must be finite");
        }
    }
    let mut labels: Vec<String> = samples.iter().map(|s| s.1.clone()).collect();
    labels.sort();
    labels.dedup();
    if labels.len() < 2 {
        return invalid("training set needs at least two classes");
    }
    let classes: Vec<usize> = samples
        .iter()
        .map(|s| labels.binary_search(&s.1).expect("label collected above"))
        .collect();

    let raw: Vec<Vec<T>> = samples.iter().map(|s| s.0.clone()).collect();
    let pca = if use_pca && raw.len() >= 2 {
        Some(pca_fit(&raw, PCA_VARIANCE)?)
    } else {
        None
    };
    let inputs: Vec<Vec<T>> = match &pca {
        Some(p) => raw.iter().map(|x| p.project_unchecked(x)).collect(),
        None => raw,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = inputs.len();
    let two_layers = if n >= MIN_HOLDOUT_SET {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let held = ((n as f64 * HOLDOUT_FRACTION).round() as usize).max(1);
        let (hold, fit) = idx.split_at(held);
        let fit_x: Vec<Vec<T>> = fit.iter().map(|&i| inputs[i].clone()).collect();
        let fit_c: Vec<usize> = fit.iter().map(|&i| classes[i]).collect();
        let (layers, weights) = fit_layers(&fit_x, &fit_c, labels.len(), cfg, false, &mut rng);
        let hold_h: Vec<Vec<T>> = hold
            .iter()
            .map(|&i| layers[0].activations(&inputs[i]))
            .collect();
        let hold_c: Vec<usize> = hold.iter().map(|&i| classes[i]).collect();
        layer_accuracy(&weights, &hold_h, &hold_c) < cfg.second_layer_trigger
    } else {
        false
    };

    let (hidden_layers, output_weights) =
        fit_layers(&inputs, &classes, labels.len(), cfg, two_layers, &mut rng);
    let net = SnrbNetwork {
        pca,
        hidden_layers,
        output_weights,
        labels,
    };
    net.validate()?;
    Ok(net)
}
