use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;

use super::LabeledSet;

/// Angular offset of the first point; keeps the two arms from meeting at the origin.
pub const SPIRAL_START: f64 = std::f64::consts::PI / 16.0;

/// Two interleaved spirals labelled `"0"` and `"1"`; class 1 is the point
/// reflection of class 0 through the origin before noise is added.
///
/// The classic benchmark is 97 points per class, 2 turns, no noise.
pub fn make_two_spirals<T: Scalar>(
    points_per_class: usize,
    turns: f64,
    noise: f64,
    seed: u64,
) -> LabeledSet<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta_max = 2.0 * std::f64::consts::PI * turns;
    let jitter = |rng: &mut ChaCha8Rng| {
        if noise > 0.0 {
            noise * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        }
    };
    let mut class0 = Vec::with_capacity(points_per_class);
    let mut class1 = Vec::with_capacity(points_per_class);
    for i in 0..points_per_class {
        let theta = if points_per_class > 1 {
            SPIRAL_START + (theta_max - SPIRAL_START) * i as f64 / (points_per_class - 1) as f64
        } else {
            SPIRAL_START
        };
        let r = theta / theta_max;
        let (x, y) = (r * theta.cos(), r * theta.sin());
        class0.push((
            vec![T::of(x + jitter(&mut rng)), T::of(y + jitter(&mut rng))],
            "0".to_string(),
        ));
        class1.push((
            vec![T::of(-x + jitter(&mut rng)), T::of(-y + jitter(&mut rng))],
            "1".to_string(),
        ));
    }
    class0.into_iter().chain(class1).collect()
}
