//! Gaussian wavelets and the fixed-scale row transform.
//!
//! The mother wavelet of order `n` is the unit-L2 n-th derivative of the
//! Gaussian bell,
//!
//! ```text
//! g_n(x) = (-1)^n He_n(x) exp(-x^2 / 2) / sqrt(Gamma(n + 1/2))
//! ```
//!
//! where `He_n` is the probabilists' Hermite polynomial. The transform
//! correlates every image row with `g_n` dilated by a single scale `a`,
//! producing one coefficient per pixel. Text on a plate is a run of dark and
//! light strokes, which shows up in the coefficient field as a compact
//! plateau of large magnitudes.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::image::GrayImage;
use crate::scalar::Scalar;

/// Order, dilation and truncation of the analysing wavelet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletSpec<T> {
    pub order: u32,
    pub scale: T,
    /// Truncation half-width in wavelet units (before dilation).
    pub support_radius: T,
}

impl<T: Scalar> Default for WaveletSpec<T> {
    fn default() -> Self {
        Self {
            order: 6,
            scale: T::of(2.0),
            support_radius: T::of(5.0),
        }
    }
}

impl<T: Scalar> WaveletSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return invalid("wavelet order must be >= 1");
        }
        if !(self.scale.is_finite() && self.scale > T::zero()) {
            return invalid(format!("wavelet scale must be > 0, got {}", self.scale));
        }
        if !(self.support_radius.is_finite() && self.support_radius >= T::of(3.0)) {
            return invalid(format!(
                "support radius must be >= 3, got {}",
                self.support_radius
            ));
        }
        Ok(())
    }

    /// Samples the dilated wavelet at integer offsets.
    pub fn kernel(&self) -> Result<RowKernel<T>> {
        RowKernel::new(self)
    }
}

/// Probabilists' Hermite polynomial by the three-term recurrence
/// `He_{k+1}(x) = x He_k(x) - k He_{k-1}(x)`.
fn hermite_e<T: Scalar>(order: u32, x: T) -> T {
    let mut prev = T::one();
    if order == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..order {
        let next = x * cur - T::of(k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `1 / sqrt(Gamma(n + 1/2))`, the L2 normaliser of the n-th Gaussian derivative.
fn norm_constant<T: Scalar>(order: u32) -> T {
    let mut gamma = std::f64::consts::PI.sqrt();
    for k in 1..=order {
        gamma *= k as f64 - 0.5;
    }
    T::of(1.0 / gamma.sqrt())
}

/// Evaluates the unit-norm Gaussian wavelet `g_order(x)`.
pub fn gaussian_wavelet<T: Scalar>(order: u32, x: T) -> Result<T> {
    if order == 0 {
        return invalid("wavelet order must be >= 1");
    }
    if !x.is_finite() {
        return invalid(format!("wavelet argument must be finite, got {x}"));
    }
    Ok(gaussian_wavelet_unchecked(order, x))
}

#[inline]
fn gaussian_wavelet_unchecked<T: Scalar>(order: u32, x: T) -> T {
    let sign = if order.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    sign * norm_constant::<T>(order) * hermite_e(order, x) * (-(x * x) / T::of(2.0)).exp()
}

/// Discrete taps of `g_n(k / a) / sqrt(a)` for `|k| <= a * support_radius`.
///
/// The truncated tap set is shifted to sum to exactly zero so that constant
/// runs produce no response; the shift is of the order of the truncated
/// tail mass (below 2e-3 of the peak tap for the default support).
#[derive(Debug, Clone, PartialEq)]
pub struct RowKernel<T> {
    taps: Vec<T>,
    radius: usize,
}

impl<T: Scalar> RowKernel<T> {
    pub fn new(spec: &WaveletSpec<T>) -> Result<Self> {
        spec.validate()?;
        let radius = (spec.scale * spec.support_radius)
            .floor()
            .to_usize()
            .unwrap_or(0);
        let inv_sqrt_scale = T::one() / spec.scale.sqrt();
        let mut taps: Vec<T> = (0..=2 * radius)
            .map(|i| {
                let k = T::of(i as f64 - radius as f64);
                gaussian_wavelet_unchecked(spec.order, k / spec.scale) * inv_sqrt_scale
            })
            .collect();
        let mean = taps.iter().copied().sum::<T>() / T::of_usize(taps.len());
        for t in &mut taps {
            *t -= mean;
        }
        Ok(Self { taps, radius })
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    /// Half-width in samples.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Correlates `signal` with the kernel, replicating the end samples.
    pub fn apply(&self, signal: &[T], out: &mut [T]) {
        let n = signal.len() as isize;
        let r = self.radius as isize;
        for (b, slot) in out.iter_mut().enumerate() {
            let b = b as isize;
            let mut acc = T::zero();
            if b - r >= 0 && b + r < n {
                let window = &signal[(b - r) as usize..=(b + r) as usize];
                for (&s, &w) in window.iter().zip(&self.taps) {
                    acc += s * w;
                }
            } else {
                for (i, &w) in self.taps.iter().enumerate() {
                    let t = (b + i as isize - r).clamp(0, n - 1);
                    acc += signal[t as usize] * w;
                }
            }
            *slot = acc;
        }
    }
}

/// Signed coefficients of the per-row transform, same shape as the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDomain<T> {
    pub width: usize,
    pub height: usize,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> WaveletDomain<T> {
    pub fn get(&self, x: usize, y: usize) -> T {
        self.coeffs[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[T] {
        &self.coeffs[y * self.width..(y + 1) * self.width]
    }
}

fn check_signal<T: Scalar>(signal: &[T]) -> Result<()> {
    if signal.len() < 3 {
        return invalid(format!(
            "signal needs at least 3 samples, got {}",
            signal.len()
        ));
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return invalid(format!("signal sample {i} is not finite"));
    }
    Ok(())
}

/// Fixed-scale continuous wavelet transform of one signal.
pub fn cwt_row<T: Scalar>(signal: &[T], spec: &WaveletSpec<T>) -> Result<Vec<T>> {
    check_signal(signal)?;
    let kernel = spec.kernel()?;
    let mut out = vec![T::zero(); signal.len()];
    kernel.apply(signal, &mut out);
    Ok(out)
}

/// Applies [`cwt_row`] to every row independently.
pub fn transform_image<T: Scalar>(
    img: &GrayImage<T>,
    spec: &WaveletSpec<T>,
) -> Result<WaveletDomain<T>> {
    check_signal(img.row(0))?;
    let kernel = spec.kernel()?;
    let width = img.width();
    let mut coeffs = vec![T::zero(); img.len()];
    coeffs
        .par_chunks_mut(width)
        .zip(img.pixels().par_chunks(width))
        .for_each(|(out, row)| kernel.apply(row, out));
    Ok(WaveletDomain {
        width,
        height: img.height(),
        coeffs,
    })
}

/// `|W|` rescaled so the largest magnitude maps to 1.
pub fn magnitude<T: Scalar>(dom: &WaveletDomain<T>) -> GrayImage<T> {
    let peak = dom.coeffs.iter().fold(T::zero(), |m, &c| m.max(c.abs()));
    let scale = if peak > T::zero() {
        T::one() / peak
    } else {
        T::zero()
    };
    GrayImage::from_fn(dom.width, dom.height, |x, y| dom.get(x, y).abs() * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// He_6 from its explicit monomial expansion, independent of the recurrence.
    fn he6_explicit(x: f64) -> f64 {
        let x2 = x * x;
        x2 * x2 * x2 - 15.0 * x2 * x2 + 45.0 * x2 - 15.0
    }

    fn sign_changes(values: impl Iterator<Item = f64>) -> usize {
        let mut last = 0.0_f64;
        let mut count = 0;
        for v in values {
            if v != 0.0 {
                if last != 0.0 && (v > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }

    #[test]
    fn g6_is_even_and_decays() {
        for &x in &[0.1, 0.7, 1.3, 2.9, 4.4] {
            let a = gaussian_wavelet(6, x).unwrap();
            let b = gaussian_wavelet(6, -x).unwrap();
            assert_eq!(a, b);
        }
        for &x in &[8.0, -8.0, 9.5, 20.0] {
            assert!(gaussian_wavelet::<f64>(6, x).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn g6_sign_changes_match_hermite_scan() {
        let grid = || (0..=10_000).map(|i| -5.0 + i as f64 * 1e-3);
        let oracle = sign_changes(grid().map(he6_explicit));
        assert_eq!(oracle, 6);
        let got = sign_changes(grid().map(|x| gaussian_wavelet(6, x).unwrap()));
        assert_eq!(got, oracle);
    }

    #[test]
    fn recurrence_matches_explicit_he6() {
        for i in 0..50 {
            let x = -4.0 + i as f64 * 0.17;
            assert!(
                (hermite_e(6, x) - he6_explicit(x)).abs() < 1e-9 * (1.0 + he6_explicit(x).abs())
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gaussian_wavelet(0, 1.0).is_err());
        assert!(gaussian_wavelet(3, f64::INFINITY).is_err());
        assert!(cwt_row(&[1.0, 2.0], &WaveletSpec::default()).is_err());
        assert!(cwt_row(&[1.0, f64::NAN, 2.0], &WaveletSpec::default()).is_err());
        let bad = WaveletSpec {
            order: 6,
            scale: 2.0,
            support_radius: 2.0,
        };
        assert!(cwt_row(&[0.0; 8], &bad).is_err());
    }

    #[test]
    fn constant_signal_is_annihilated() {
        let spec = WaveletSpec::default();
        for &c in &[0.0_f64, 0.3, 1.0, -7.5] {
            let w = cwt_row(&vec![c; 64], &spec).unwrap();
            assert!(w.iter().all(|v| v.abs() < 1e-8 * 64.0));
        }
    }

    /// Direct evaluation of `(1/sqrt a) sum_t s[t] g((t - b)/a)` with edge
    /// replication and no tap adjustment.
    fn direct_cwt(signal: &[f64], order: u32, a: f64, support: f64) -> Vec<f64> {
        let n = signal.len() as isize;
        let r = (a * support).floor() as isize;
        (0..n)
            .map(|b| {
                (b - r..=b + r)
                    .map(|t| {
                        let s = signal[t.clamp(0, n - 1) as usize];
                        s * gaussian_wavelet(order, (t - b) as f64 / a).unwrap()
                    })
                    .sum::<f64>()
                    / a.sqrt()
            })
            .collect()
    }

    #[test]
    fn stripes_dominate_flat_background() {
        // 128 samples: flat 0.5 background, alternating 4-px stripes in 48..80
        let signal: Vec<f64> = (0..128)
            .map(|i| {
                if (48..80).contains(&i) {
                    if ((i - 48) / 4) % 2 == 0 {
                        0.05
                    } else {
                        0.95
                    }
                } else {
                    0.5
                }
            })
            .collect();
        let inside = |w: &[f64]| w[48..80].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let outside = |w: &[f64]| {
            w[..20]
                .iter()
                .chain(&w[108..])
                .fold(0.0_f64, |m, v| m.max(v.abs()))
        };
        let oracle = direct_cwt(&signal, 6, 2.0, 5.0);
        assert!(inside(&oracle) > 5.0 * outside(&oracle));
        let got = cwt_row(&signal, &WaveletSpec::default()).unwrap();
        assert!(inside(&got) > 5.0 * outside(&got));
        // the zero-sum tap adjustment only perturbs by about the truncated tail mass
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 2e-3);
        }
    }

    #[test]
    fn magnitude_rescales() {
        let dom = WaveletDomain {
            width: 3,
            height: 1,
            coeffs: vec![0.0, -4.0, 2.0],
        };
        let m = magnitude(&dom);
        assert_eq!(m.pixels(), &[0.0, 1.0, 0.5]);
        let neg = WaveletDomain {
            coeffs: dom.coeffs.iter().map(|c| -c).collect(),
            ..dom.clone()
        };
        assert_eq!(magnitude(&neg), m);
        let zero = WaveletDomain {
            width: 2,
            height: 2,
            coeffs: vec![0.0; 4],
        };
        assert!(magnitude(&zero).pixels().iter().all(|&v| v == 0.0));
        let single = WaveletDomain {
            width: 2,
            height: 2,
            coeffs: vec![0.0, 0.0, 0.3, 0.0],
        };
        assert_eq!(magnitude(&single).pixels(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn degenerate_height_and_identical_rows() {
        let spec = WaveletSpec::default();
        let row: Vec<f64> = (0..40).map(|i| ((i * 7) % 11) as f64 / 10.0).collect();
        let img = GrayImage::new(40, 1, row.clone()).unwrap();
        assert_eq!(
            transform_image(&img, &spec).unwrap().coeffs,
            cwt_row(&row, &spec).unwrap()
        );
        let tall = GrayImage::from_fn(40, 5, |x, _| row[x]);
        let dom = transform_image(&tall, &spec).unwrap();
        for y in 1..5 {
            assert_eq!(dom.row(y), dom.row(0));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let w = cwt_row(&[0.25_f32; 32], &WaveletSpec::default()).unwrap();
        assert!(w.iter().all(|v| v.abs() < 1e-5));
    }
}
