//! Neural components: RBF units, the self-organizing RBF classifier, PCA,
//! the Kohonen map and the two-spirals benchmark.

mod format;
mod linalg;
mod pca;
mod rbf;
mod snrb;
mod som;
mod spirals;

pub use format::{read_network, write_network, FORMAT_HEADER};
pub use pca::{pca_fit, pca_project, PcaProjection};
pub use rbf::{rbf_activation, RbfLayer, RbfUnit};
pub use snrb::{
    snrb_classify, snrb_train, SnrbNetwork, TrainConfig, HOLDOUT_FRACTION, PCA_VARIANCE, RIDGE,
};
pub use som::{som_init, som_map, som_train, SomGrid};
pub use spirals::{make_two_spirals, SPIRAL_START};

/// Feature vectors paired with class labels.
pub type LabeledSet<T> = Vec<(Vec<T>, String)>;

/// Residual of the readout normal equations, relative to the right-hand side.
///
/// Recomputes the last-layer activations of `samples` and measures
/// `|(H^T H + ridge I) W - H^T Y| / |H^T Y|` in Frobenius norm.
pub fn readout_residual<T: crate::Scalar>(
    net: &SnrbNetwork<T>,
    samples: &LabeledSet<T>,
) -> crate::Result<f64> {
    let mut design = Vec::with_capacity(samples.len());
    let mut targets = Vec::with_capacity(samples.len());
    for (x, label) in samples {
        crate::error::check_dim(net.input_dim(), x.len())?;
        let mut h = match &net.pca {
            Some(p) => p.project_unchecked(x),
            None => x.clone(),
        };
        for layer in &net.hidden_layers {
            h = layer.activations(&h);
        }
        h.push(T::one());
        design.push(h);
        targets.push(
            net.labels
                .iter()
                .map(|l| if l == label { T::one() } else { T::zero() })
                .collect::<Vec<T>>(),
        );
    }
    let (gram, rhs) = linalg::normal_equations(&design, &targets, RIDGE);
    let w = nalgebra::DMatrix::from_fn(net.output_weights.len(), net.labels.len(), |i, j| {
        net.output_weights[i][j].as_f64()
    });
    Ok((gram * w - &rhs).norm() / rhs.norm())
}
