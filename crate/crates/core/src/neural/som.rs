//! Kohonen self-organizing map on a rectangular lattice.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, invalid, Result};
use crate::scalar::{sq_dist, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct SomGrid<T> {
    pub rows: usize,
    pub cols: usize,
    /// Row-major lattice of prototype vectors.
    pub weights: Vec<Vec<T>>,
}

impl<T: Scalar> SomGrid<T> {
    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn weight(&self, row: usize, col: usize) -> &[T] {
        &self.weights[row * self.cols + col]
    }

    /// Row-major index of the best-matching unit; ties go to the lowest index.
    pub(crate) fn bmu_index(&self, x: &[T]) -> usize {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (i, w) in self.weights.iter().enumerate() {
            let d = sq_dist(x, w);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Mean Euclidean distance from each sample to its BMU.
    pub fn quantization_error(&self, samples: &[Vec<T>]) -> T {
        let total: T = samples
            .iter()
            .map(|x| sq_dist(x, &self.weights[self.bmu_index(x)]).sqrt())
            .sum();
        total / T::of_usize(samples.len())
    }

    /// Moves unit `j` toward `x` by `rate` of the way.
    pub(crate) fn pull(&mut self, j: usize, x: &[T], rate: T) {
        for (w, &xi) in self.weights[j].iter_mut().zip(x) {
            *w += rate * (xi - *w);
        }
    }
}

/// Lattice initialised from seeded uniform draws inside the data bounding box.
pub fn som_init<T: Scalar>(
    samples: &[Vec<T>],
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<SomGrid<T>> {
    if samples.is_empty() {
        return invalid("SOM needs at least one sample");
    }
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return invalid(format!(
            "SOM lattice must have >= 2 units, got {rows}x{cols}"
        ));
    }
    let dim = samples[0].len();
    for s in samples {
        check_dim(dim, s.len())?;
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for s in samples {
        for (k, v) in s.iter().enumerate() {
            lo[k] = lo[k].min(v.as_f64());
            hi[k] = hi[k].max(v.as_f64());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..rows * cols)
        .map(|_| {
            (0..dim)
                .map(|k| T::of(lo[k] + (hi[k] - lo[k]) * rng.random::<f64>()))
                .collect()
        })
        .collect();
    Ok(SomGrid {
        rows,
        cols,
        weights,
    })
}

/// Classic online training with linearly decaying rate (0.5 to 0.01) and
/// neighbourhood radius (half the lattice extent to 0.5).
pub fn som_train<T: Scalar>(
    samples: &[Vec<T>],
    rows: usize,
    cols: usize,
    epochs: usize,
    seed: u64,
) -> Result<SomGrid<T>> {
    let mut grid = som_init(samples, rows, cols, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let total = (epochs * samples.len()).max(1);
    let radius0 = rows.max(cols) as f64 / 2.0;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut step = 0usize;
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let t = if total > 1 {
                step as f64 / (total - 1) as f64
            } else {
                0.0
            };
            let rate = 0.5 + (0.01 - 0.5) * t;
            let radius = radius0 + (0.5 - radius0) * t;
            let x = &samples[i];
            let bmu = grid.bmu_index(x);
            let (br, bc) = (bmu / cols, bmu % cols);
            for j in 0..rows * cols {
                let dr = (j / cols) as f64 - br as f64;
                let dc = (j % cols) as f64 - bc as f64;
                let h = (-(dr * dr + dc * dc) / (2.0 * radius * radius)).exp();
                grid.pull(j, x, T::of(rate * h));
            }
            step += 1;
        }
    }
    Ok(grid)
}

/// Lattice coordinates of the best-matching unit.
pub fn som_map<T: Scalar>(grid: &SomGrid<T>, x: &[T]) -> Result<(usize, usize)> {
    check_dim(grid.dim(), x.len())?;
    let i = grid.bmu_index(x);
    Ok((i / grid.cols, i % grid.cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_sample_is_a_fixed_point() {
        let samples = vec![vec![0.3, -1.2, 2.0]; 10];
        for (rows, cols) in [(1, 2), (3, 3), (5, 5), (2, 7)] {
            let g = som_train(&samples, rows, cols, 50, 3).unwrap();
            for w in &g.weights {
                assert!(
                    sq_dist::<f64>(w, &samples[0]).sqrt() < 1e-3,
                    "{rows}x{cols}"
                );
            }
        }
    }

    #[test]
    fn map_finds_exact_unit() {
        let samples: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![i as f64, (i * i % 7) as f64])
            .collect();
        let g = som_train(&samples, 3, 4, 5, 9).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                let w = g.weight(r, c).to_vec();
                let hit = som_map(&g, &w).unwrap();
                // a duplicate weight earlier in row-major order would win the tie
                assert!(hit == (r, c) || g.weights[hit.0 * 4 + hit.1] == w);
            }
        }
    }

    #[test]
    fn errors() {
        assert!(som_train::<f64>(&[], 2, 2, 1, 0).is_err());
        assert!(som_train(&[vec![1.0]], 1, 1, 1, 0).is_err());
        let g = som_train(&[vec![1.0, 2.0]], 1, 2, 1, 0).unwrap();
        assert!(som_map(&g, &[1.0]).is_err());
    }

    #[test]
    fn update_is_a_convex_step() {
        let mut g = SomGrid {
            rows: 1,
            cols: 2,
            weights: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
        };
        let x = [2.0, -2.0];
        g.pull(0, &x, 0.25);
        assert_eq!(g.weights[0], vec![0.5, -0.5]);
        g.pull(1, &x, 1.0);
        assert_eq!(g.weights[1], x.to_vec());
    }
}
