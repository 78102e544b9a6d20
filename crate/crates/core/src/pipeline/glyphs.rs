//! Training glyphs rendered from the embedded font, blurred and jittered.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::image::GrayImage;
use crate::neural::{snrb_train, LabeledSet, SnrbNetwork};
use crate::scalar::Scalar;
use crate::segment::{ink_bbox, normalize_glyph};

use super::font::{self, CELL_HEIGHT, CELL_WIDTH};
use super::scene::draw_text;
use super::PipelineConfig;

/// Training-set size used by [`train_glyph_network`] unless overridden.
pub const DEFAULT_SAMPLES_PER_CLASS: usize = 60;
pub const DEFAULT_BLUR_SIGMAS: [f64; 5] = [0.0, 0.3, 0.6, 0.9, 1.2];

/// Blank margin around the rendered cell, wide enough for jitter and blur tails.
const CANVAS_PAD: usize = 4;

/// Separable Gaussian blur with edge replication; `sigma = 0` is the identity.
pub fn gaussian_blur<T: Scalar>(img: &GrayImage<T>, sigma: f64) -> Result<GrayImage<T>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return invalid(format!("blur sigma must be finite and >= 0, got {sigma}"));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);

    let (w, h) = (img.width(), img.height());
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let horiz: Vec<f64> = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            taps.iter()
                .zip(-radius..)
                .map(|(&t, k)| t * img.get(clamp(x as isize + k, w), y).as_f64())
                .sum()
        })
        .collect();
    Ok(GrayImage::from_fn(w, h, |x, y| {
        let v: f64 = taps
            .iter()
            .zip(-radius..)
            .map(|(&t, k)| t * horiz[clamp(y as isize + k, h) * w + x])
            .sum();
        T::of(v)
    }))
}

/// One training raster: the font cell of `ch` shifted by `(dx, dy)` pixels on
/// a white canvas, blurred, trimmed to its ink and normalized.
pub fn render_training_glyph<T: Scalar>(
    ch: char,
    sigma: f64,
    dx: f64,
    dy: f64,
    glyph_size: usize,
) -> Result<Vec<T>> {
    if !font::is_supported(ch) {
        return invalid(format!("character {ch:?} is not in the font"));
    }
    let mut canvas = GrayImage::filled(
        CELL_WIDTH + 2 * CANVAS_PAD,
        CELL_HEIGHT + 2 * CANVAS_PAD,
        T::one(),
    );
    let origin = CANVAS_PAD as f64;
    draw_text(
        &mut canvas,
        &ch.to_string(),
        origin + dx,
        origin + dy,
        1.0,
        0.0,
    )?;
    let blurred = gaussian_blur(&canvas, sigma)?;
    let bbox = ink_bbox(&blurred)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("glyph {ch:?} has no ink")))?;
    let glyph = normalize_glyph(&blurred.crop(bbox)?, glyph_size)?;
    Ok(glyph.pixels)
}

/// `samples_per_class` glyphs per alphabet character, labelled with the character.
///
/// Sample `i` uses `blur_sigmas[i % len]`. Every sample but the first of each
/// class is translated by a seeded offset in `[-1, 1]` pixels on both axes.
pub fn make_glyph_training_set<T: Scalar>(
    alphabet: &str,
    samples_per_class: usize,
    blur_sigmas: &[f64],
    seed: u64,
    glyph_size: usize,
) -> Result<LabeledSet<T>> {
    if alphabet.is_empty() {
        return invalid("alphabet is empty");
    }
    if blur_sigmas.is_empty() {
        return invalid("at least one blur sigma is required");
    }
    if let Some(s) = blur_sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return invalid(format!("blur sigma must be finite and >= 0, got {s}"));
    }
    if let Some(c) = alphabet.chars().find(|&c| !font::is_supported(c)) {
        return invalid(format!("character {c:?} is not in the font"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = Vec::with_capacity(alphabet.chars().count() * samples_per_class);
    for ch in alphabet.chars() {
        for i in 0..samples_per_class {
            let sigma = blur_sigmas[i % blur_sigmas.len()];
            let (dx, dy) = if i == 0 {
                (0.0, 0.0)
            } else {
                (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
            };
            set.push((
                render_training_glyph(ch, sigma, dx, dy, glyph_size)?,
                ch.to_string(),
            ));
        }
    }
    Ok(set)
}

/// Renders a training set for `alphabet` and trains a PCA-fronted network
/// with `cfg.train`, seeded by `cfg.train.seed`.
pub fn train_glyph_network<T: Scalar>(
    alphabet: &str,
    samples_per_class: usize,
    blur_sigmas: &[f64],
    cfg: &PipelineConfig,
) -> Result<SnrbNetwork<T>> {
    cfg.validate()?;
    let set = make_glyph_training_set(
        alphabet,
        samples_per_class,
        blur_sigmas,
        cfg.train.seed,
        cfg.glyph_size,
    )?;
    snrb_train(&set, &cfg.train, true)
}
