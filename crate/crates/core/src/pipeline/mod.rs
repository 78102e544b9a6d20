//! End-to-end plate localization and recognition, plus the synthetic data,
//! image I/O, configuration and metrics around it.

mod config;
mod font;
mod glyphs;
mod metrics;
mod pgm;
mod scene;

pub use config::PipelineConfig;
pub use font::{
    glyph as font_glyph, is_supported, FontGlyph, CELL_HEIGHT, CELL_WIDTH, DIGITS, FONT_ALPHABET,
    PLATE_LETTERS,
};
pub use glyphs::{
    gaussian_blur, make_glyph_training_set, render_training_glyph, train_glyph_network,
    DEFAULT_BLUR_SIGMAS, DEFAULT_SAMPLES_PER_CLASS,
};
pub use metrics::{evaluate, score_scene, Metrics, SceneOutcome, IOU_HIT};
pub use pgm::{load_pgm, read_pgm, save_pgm, write_pgm, PgmFormat};
pub use scene::{
    draw_text, generate_scene, load_scenes, random_plate_text, render_plate, save_scene,
    SceneConfig, SyntheticScene,
};

use crate::error::{invalid, Result};
use crate::grid::{
    binarize_percentile, ca_run, connected_components, select_plate_region, BinaryGrid, Region,
};
use crate::image::{Bbox, GrayImage};
use crate::neural::{snrb_classify, SnrbNetwork};
use crate::scalar::Scalar;
use crate::segment::{contrast_stretch_with, segment_characters_with};
use crate::wavelet::{magnitude, transform_image, WaveletDomain};

/// Smallest accepted input image.
pub const MIN_WIDTH: usize = 64;
pub const MIN_HEIGHT: usize = 32;
/// Wavelet magnitudes below this count as no response at all.
pub const FLAT_RESPONSE: f64 = 1e-9;
/// Share of the plate box added on every side before segmentation.
pub const PLATE_EXPANSION: f64 = 0.10;

/// Localization result with every intermediate raster.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateSearch<T> {
    pub region: Option<Region>,
    pub domain: WaveletDomain<T>,
    /// `|W|` scaled to `[0, 1]`.
    pub magnitude: GrayImage<T>,
    /// Percentile binarization of the magnitude.
    pub binary: BinaryGrid,
    /// Cellular-automaton fixpoint of `binary`.
    pub fixpoint: BinaryGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T> {
    pub plate_bbox: Option<Bbox>,
    pub text: Option<String>,
    /// Class scores of each character, in text order.
    pub per_char_scores: Vec<Vec<T>>,
    /// Character boxes in image coordinates.
    pub char_boxes: Vec<Bbox>,
}

impl<T> Detection<T> {
    pub fn none() -> Self {
        Self {
            plate_bbox: None,
            text: None,
            per_char_scores: Vec::new(),
            char_boxes: Vec::new(),
        }
    }
}

fn check_image<T: Scalar>(img: &GrayImage<T>) -> Result<()> {
    if img.width() < MIN_WIDTH || img.height() < MIN_HEIGHT {
        return invalid(format!(
            "image must be at least {MIN_WIDTH}x{MIN_HEIGHT}, got {}x{}",
            img.width(),
            img.height()
        ));
    }
    Ok(())
}

/// Row wavelet transform, binarization of its magnitude, CA erosion and
/// selection of the plate-shaped component.
///
/// An image whose strongest wavelet response stays below [`FLAT_RESPONSE`]
/// (every row constant up to rounding) has no plate.
pub fn detect_plate<T: Scalar>(img: &GrayImage<T>, cfg: &PipelineConfig) -> Result<PlateSearch<T>> {
    check_image(img)?;
    cfg.validate()?;
    let domain = transform_image(img, &cfg.wavelet_spec())?;
    let magnitude = magnitude(&domain);
    let binary = binarize_percentile(&magnitude, cfg.white_fraction)?;
    let fixpoint = ca_run(&binary, &cfg.ca);
    let regions = connected_components(&fixpoint);
    let peak = domain
        .coeffs
        .iter()
        .fold(0.0f64, |m, c| m.max(c.as_f64().abs()));
    let flat = peak < FLAT_RESPONSE;
    let region = if flat {
        None
    } else {
        select_plate_region(&regions, &cfg.plate, (img.width(), img.height())).cloned()
    };
    Ok(PlateSearch {
        region,
        domain,
        magnitude,
        binary,
        fixpoint,
    })
}

/// Reads the characters inside a located plate box.
pub fn read_plate<T: Scalar>(
    img: &GrayImage<T>,
    plate: Bbox,
    net: &SnrbNetwork<T>,
    cfg: &PipelineConfig,
) -> Result<Detection<T>> {
    let mut det = Detection {
        plate_bbox: Some(plate),
        ..Detection::none()
    };
    let window = plate.expand(PLATE_EXPANSION, img.width(), img.height());
    let mut patch = img.crop(window)?;
    if cfg.invert {
        patch = patch.invert();
    }
    let seg = cfg.segment_config();
    let patch = contrast_stretch_with(&patch, seg.low_percentile, seg.high_percentile);
    let (lo, hi) = cfg.char_count_range;
    let glyphs = segment_characters_with(&patch, lo, hi, &seg);
    if glyphs.is_empty() {
        return Ok(det);
    }
    let mut text = String::new();
    for g in &glyphs {
        let (label, scores) = snrb_classify(net, &g.pixels)?;
        text.push_str(&label);
        det.per_char_scores.push(scores);
        det.char_boxes
            .push(g.source_bbox.offset(window.x_min, window.y_min));
    }
    det.text = Some(text);
    Ok(det)
}

/// Locates the plate and reads it; fields stay `None` past the first stage
/// that finds nothing.
pub fn recognize<T: Scalar>(
    img: &GrayImage<T>,
    net: &SnrbNetwork<T>,
    cfg: &PipelineConfig,
) -> Result<Detection<T>> {
    let expected = cfg.glyph_size * cfg.glyph_size;
    if net.input_dim() != expected {
        return invalid(format!(
            "network expects {}-dimensional glyphs but glyph_size {} gives {expected}",
            net.input_dim(),
            cfg.glyph_size
        ));
    }
    let search = detect_plate(img, cfg)?;
    match search.region {
        Some(region) => read_plate(img, region.bbox, net, cfg),
        None => Ok(Detection::none()),
    }
}
