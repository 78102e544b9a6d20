//! Seeded synthetic road scenes with one light plate carrying dark text.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::image::{Bbox, GrayImage};
use crate::scalar::Scalar;

use super::font::{self, CELL_HEIGHT, CELL_WIDTH, DIGITS, PLATE_LETTERS};
use super::pgm::{load_pgm, save_pgm};

/// Rendered scene with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene<T> {
    pub image: GrayImage<T>,
    pub truth_bbox: Bbox,
    pub truth_text: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    /// Plate width as a fraction of the image width.
    pub plate_width_range: (f64, f64),
    pub plate_aspect: f64,
    pub noise_sigma: f64,
    /// Upper bound on dark/light blocks standing in for vehicle parts.
    pub max_distractors: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            plate_width_range: (0.14, 0.20),
            plate_aspect: 4.0,
            noise_sigma: 0.02,
            max_distractors: 2,
        }
    }
}

/// Extra blank font columns between adjacent character cells.
const LETTER_SPACING: f64 = 1.0;
const SUPERSAMPLE: usize = 4;

/// Random plate text shaped like `A123BC`.
pub fn random_plate_text(rng: &mut impl Rng) -> String {
    let letters: Vec<char> = PLATE_LETTERS.chars().collect();
    let digits: Vec<char> = DIGITS.chars().collect();
    let mut pick = |set: &[char]| set[rng.random_range(0..set.len())];
    let mut s = String::with_capacity(6);
    s.push(pick(&letters));
    for _ in 0..3 {
        s.push(pick(&digits));
    }
    for _ in 0..2 {
        s.push(pick(&letters));
    }
    s
}

/// Width in font pixels of `len` characters set with [`LETTER_SPACING`].
fn text_extent(len: usize) -> f64 {
    len as f64 * (CELL_WIDTH as f64 + LETTER_SPACING) - LETTER_SPACING
}

/// Draws `text` with antialiased font pixels of side `scale`, cell origin at `(x0, y0)`.
///
/// Each target pixel blends `ink` and its current value by the fraction of
/// the pixel covered by glyph ink.
pub fn draw_text<T: Scalar>(
    img: &mut GrayImage<T>,
    text: &str,
    x0: f64,
    y0: f64,
    scale: f64,
    ink: f64,
) -> Result<()> {
    let glyphs = text
        .chars()
        .map(|c| {
            font::glyph(c).ok_or_else(|| {
                crate::Error::InvalidArgument(format!("character {c:?} is not in the font"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let advance = CELL_WIDTH as f64 + LETTER_SPACING;
    let width = text_extent(glyphs.len()) * scale;
    let height = CELL_HEIGHT as f64 * scale;
    let px0 = x0.floor().max(0.0) as usize;
    let py0 = y0.floor().max(0.0) as usize;
    let px1 = ((x0 + width).ceil() as usize).min(img.width());
    let py1 = ((y0 + height).ceil() as usize).min(img.height());
    let step = 1.0 / SUPERSAMPLE as f64;
    for py in py0..py1 {
        for px in px0..px1 {
            let mut covered = 0usize;
            for sy in 0..SUPERSAMPLE {
                let fy = (py as f64 + (sy as f64 + 0.5) * step - y0) / scale;
                for sx in 0..SUPERSAMPLE {
                    let fx = (px as f64 + (sx as f64 + 0.5) * step - x0) / scale;
                    if fx < 0.0 || fy < 0.0 {
                        continue;
                    }
                    let cell = (fx / advance).floor();
                    let Some(g) = glyphs.get(cell as usize) else {
                        continue;
                    };
                    let gx = (fx - cell * advance).floor() as isize;
                    if g.ink_at(gx, fy.floor() as isize) {
                        covered += 1;
                    }
                }
            }
            if covered > 0 {
                let a = covered as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64;
                let v = img.get(px, py).as_f64();
                img.set(px, py, T::of(v * (1.0 - a) + ink * a));
            }
        }
    }
    Ok(())
}

/// A light plate patch of the given size with `text` centered on it, noise-free.
pub fn render_plate<T: Scalar>(
    text: &str,
    plate_width: usize,
    plate_height: usize,
    paper: f64,
    ink: f64,
) -> Result<GrayImage<T>> {
    let mut img = GrayImage::filled(plate_width, plate_height, T::of(paper));
    let (x0, y0, scale) = text_layout(
        text.chars().count(),
        plate_width as f64,
        plate_height as f64,
    );
    draw_text(&mut img, text, x0, y0, scale, ink)?;
    Ok(img)
}

/// Origin and font scale that center `len` characters on a plate.
fn text_layout(len: usize, plate_width: f64, plate_height: f64) -> (f64, f64, f64) {
    let scale = (0.86 * plate_width / text_extent(len.max(1))).min(0.62 * plate_height / 9.0);
    let x0 = (plate_width - text_extent(len) * scale) / 2.0;
    // ink occupies font rows 1..=9 of the 12-row cell
    let y0 = (plate_height - 9.0 * scale) / 2.0 - scale;
    (x0, y0, scale)
}

/// Renders a seeded scene; `text = None` draws a random `A123BC`-style plate.
pub fn generate_scene<T: Scalar>(
    seed: u64,
    text: Option<&str>,
    cfg: &SceneConfig,
) -> Result<SyntheticScene<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = match text {
        Some(t) => {
            if t.is_empty() {
                return invalid("plate text is empty");
            }
            if let Some(c) = t.chars().find(|&c| !font::is_supported(c)) {
                return invalid(format!("character {c:?} is not in the font"));
            }
            t.to_string()
        }
        None => random_plate_text(&mut rng),
    };
    let (w, h) = (cfg.width, cfg.height);
    if w < 64 || h < 32 {
        return invalid(format!("scene must be at least 64x32, got {w}x{h}"));
    }

    // low-frequency background: base level, linear gradient and a few long waves
    let base = rng.random_range(0.25..0.45);
    let grad_angle = rng.random_range(0.0..2.0 * PI);
    let grad_amp = rng.random_range(0.0..0.15);
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let angle: f64 = rng.random_range(0.0..PI);
            let period: f64 = rng.random_range(90.0..320.0);
            let amp = rng.random_range(0.02..0.07);
            let phase = rng.random_range(0.0..2.0 * PI);
            (angle, 2.0 * PI / period, amp, phase)
        })
        .collect();
    let diag = ((w * w + h * h) as f64).sqrt();
    let mut image = GrayImage::from_fn(w, h, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let g = grad_amp * ((fx * grad_angle.cos() + fy * grad_angle.sin()) / diag);
        let wv: f64 = waves
            .iter()
            .map(|&(a, k, amp, ph)| amp * (k * (fx * a.cos() + fy * a.sin()) + ph).sin())
            .sum();
        T::of(base + g + wv)
    });

    // plate geometry
    let (lo, hi) = cfg.plate_width_range;
    let pw = (rng.random_range(lo..hi) * w as f64).round() as usize;
    let ph = (pw as f64 / cfg.plate_aspect).round().max(8.0) as usize;
    let px = rng.random_range(20..w - pw - 20);
    let py = rng.random_range(h / 3..h - ph - 20);
    let truth_bbox = Bbox::new(px, py, px + pw - 1, py + ph - 1);

    // distractor blocks kept clear of the plate
    let keep_out = truth_bbox.expand(0.6, w, h);
    let count = rng.random_range(0..=cfg.max_distractors);
    for _ in 0..count {
        let bw = rng.random_range(40..200usize);
        let bh = rng.random_range(30..120usize);
        let bx = rng.random_range(0..w - bw);
        let by = rng.random_range(0..h - bh);
        let lum = rng.random_range(0.1..0.6);
        let block = Bbox::new(bx, by, bx + bw - 1, by + bh - 1);
        if block.intersection(&keep_out).is_some() {
            continue;
        }
        for y in block.y_min..=block.y_max {
            for x in block.x_min..=block.x_max {
                image.set(x, y, T::of(lum));
            }
        }
    }

    let paper = rng.random_range(0.82..0.95);
    let ink = rng.random_range(0.04..0.15);
    for y in truth_bbox.y_min..=truth_bbox.y_max {
        for x in truth_bbox.x_min..=truth_bbox.x_max {
            image.set(x, y, T::of(paper));
        }
    }
    let (tx, ty, scale) = text_layout(text.chars().count(), pw as f64, ph as f64);
    draw_text(
        &mut image,
        &text,
        px as f64 + tx,
        py as f64 + ty,
        scale,
        ink,
    )?;

    if cfg.noise_sigma > 0.0 {
        for y in 0..h {
            for x in 0..w {
                let n: f64 = rng.sample(StandardNormal);
                let v = image.get(x, y).as_f64() + cfg.noise_sigma * n;
                image.set(x, y, T::of(v));
            }
        }
    }
    Ok(SyntheticScene {
        image,
        truth_bbox,
        truth_text: text,
        seed,
    })
}

/// Writes `scene_NNNN.pgm` (16-bit) and its `scene_NNNN.txt` truth sidecar.
pub fn save_scene<T: Scalar>(scene: &SyntheticScene<T>, dir: &Path, index: usize) -> Result<()> {
    let stem = format!("scene_{index:04}");
    save_pgm(&scene.image, dir.join(format!("{stem}.pgm")), 65535)?;
    let b = scene.truth_bbox;
    let sidecar = format!(
        "seed={}\ntext={}\nbbox={},{},{},{}\n",
        scene.seed, scene.truth_text, b.x_min, b.y_min, b.x_max, b.y_max
    );
    std::fs::write(dir.join(format!("{stem}.txt")), sidecar)?;
    Ok(())
}

fn parse_sidecar(text: &str) -> Result<(u64, String, Bbox)> {
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let (mut seed, mut truth, mut bbox) = (None, None, None);
    for (i, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(i + 1, format!("expected key=value, got {line:?}")))?;
        match key.trim() {
            "seed" => {
                seed = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| bad(i + 1, format!("bad seed {value:?}")))?,
                )
            }
            "text" => truth = Some(value.trim().to_string()),
            "bbox" => {
                let v: Vec<usize> = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(i + 1, format!("bad bbox {value:?}")))?;
                if v.len() != 4 || v[0] > v[2] || v[1] > v[3] {
                    return Err(bad(i + 1, format!("bad bbox {value:?}")));
                }
                bbox = Some(Bbox::new(v[0], v[1], v[2], v[3]));
            }
            other => return Err(bad(i + 1, format!("unknown key {other:?}"))),
        }
    }
    match (seed, truth, bbox) {
        (Some(s), Some(t), Some(b)) => Ok((s, t, b)),
        _ => Err(bad(0, "sidecar needs seed, text and bbox".into())),
    }
}

/// Loads every `scene_*.pgm` in `dir` with its sidecar, in file-name order.
pub fn load_scenes<T: Scalar>(dir: &Path) -> Result<Vec<SyntheticScene<T>>> {
    let mut stems: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter_map(|n| {
            n.strip_suffix(".pgm")
                .filter(|s| s.starts_with("scene_"))
                .map(str::to_string)
        })
        .collect();
    stems.sort();
    stems
        .iter()
        .map(|stem| {
            let image: GrayImage<T> = load_pgm(dir.join(format!("{stem}.pgm")))?;
            let (seed, truth_text, truth_bbox) =
                parse_sidecar(&std::fs::read_to_string(dir.join(format!("{stem}.txt")))?)?;
            if truth_bbox.x_max >= image.width() || truth_bbox.y_max >= image.height() {
                return invalid(format!("{stem}: truth bbox lies outside the image"));
            }
            Ok(SyntheticScene {
                image,
                truth_bbox,
                truth_text,
                seed,
            })
        })
        .collect()
}
