//! Plate-patch contrasting and splitting into fixed-size character glyphs.
//!
//! Characters are dark ink on a light plate. After a percentile stretch the
//! patch is binarized at Otsu's threshold, ink that touches the patch border
//! (the scene around the plate) is discarded, and the column ink profile is
//! cut at near-empty valleys.

use crate::error::{invalid, Result};
use crate::grid::{connected_components, BinaryGrid};
use crate::image::{Bbox, GrayImage};
use crate::scalar::Scalar;

/// Thresholds of the contrasting and splitting stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    pub low_percentile: f64,
    pub high_percentile: f64,
    /// Columns with less ink than this fraction of the peak column are gaps.
    pub valley_fraction: f64,
    /// Segments with less ink than this fraction of the heaviest segment are dropped.
    pub min_ink_fraction: f64,
    pub clear_border: bool,
    pub glyph_size: usize,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            low_percentile: 0.02,
            high_percentile: 0.98,
            valley_fraction: 0.05,
            min_ink_fraction: 0.15,
            clear_border: true,
            glyph_size: 16,
        }
    }
}

impl SegmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.low_percentile)
            || !(self.low_percentile < self.high_percentile && self.high_percentile <= 1.0)
        {
            return invalid(format!(
                "percentiles must satisfy 0 <= low < high <= 1, got {} and {}",
                self.low_percentile, self.high_percentile
            ));
        }
        if !(0.0..1.0).contains(&self.valley_fraction) {
            return invalid(format!(
                "valley_fraction must lie in [0, 1), got {}",
                self.valley_fraction
            ));
        }
        if !(0.0..1.0).contains(&self.min_ink_fraction) {
            return invalid(format!(
                "min_ink_fraction must lie in [0, 1), got {}",
                self.min_ink_fraction
            ));
        }
        if self.glyph_size == 0 {
            return invalid("glyph_size must be positive");
        }
        Ok(())
    }
}

/// A normalized `size`x`size` character raster (ink dark, background 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Glyph<T> {
    pub size: usize,
    pub pixels: Vec<T>,
    /// Where the glyph came from, in the coordinates of the image it was cut from.
    pub source_bbox: Bbox,
}

impl<T: Scalar> Glyph<T> {
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.size + x]
    }

    pub fn to_image(&self) -> GrayImage<T> {
        GrayImage::from_fn(self.size, self.size, |x, y| self.get(x, y))
    }
}

/// Linear-interpolated quantile of an ascending slice.
fn quantile<T: Scalar>(sorted: &[T], q: f64) -> T {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = T::of(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Maps the 2nd percentile to 0 and the 98th to 1, clamping the rest.
pub fn contrast_stretch<T: Scalar>(patch: &GrayImage<T>) -> GrayImage<T> {
    let cfg = SegmentConfig::default();
    contrast_stretch_with(patch, cfg.low_percentile, cfg.high_percentile)
}

pub fn contrast_stretch_with<T: Scalar>(patch: &GrayImage<T>, low: f64, high: f64) -> GrayImage<T> {
    let mut sorted = patch.pixels().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite pixels"));
    let lo = quantile(&sorted, low);
    let hi = quantile(&sorted, high);
    if hi <= lo {
        return GrayImage::filled(patch.width(), patch.height(), T::zero());
    }
    let span = hi - lo;
    patch.map(|v| (v - lo) / span)
}

/// Otsu threshold over a 256-bin histogram of `[0, 1]` values.
///
/// Returns `None` when the values carry no contrast. When several split
/// points maximise the between-class variance, the middle one is used.
pub fn otsu_threshold<T: Scalar>(values: &[T]) -> Option<T> {
    const BINS: usize = 256;
    let mut hist = [0usize; BINS];
    for &v in values {
        let b = (v.as_f64() * BINS as f64)
            .floor()
            .clamp(0.0, (BINS - 1) as f64) as usize;
        hist[b] += 1;
    }
    let total = values.len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best = 0.0;
    let mut best_range: Option<(usize, usize)> = None;
    for (k, &count) in hist.iter().enumerate().take(BINS - 1) {
        w0 += count as f64;
        sum0 += k as f64 * count as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if between > best * (1.0 + 1e-12) {
            best = between;
            best_range = Some((k, k));
        } else if between >= best * (1.0 - 1e-12) {
            if let Some(r) = best_range.as_mut() {
                r.1 = k;
            }
        }
    }
    let (a, b) = best_range?;
    // split after bin (a+b)/2 -> threshold at that bin's upper edge
    let k = (a + b) / 2;
    Some(T::of((k + 1) as f64 / BINS as f64))
}

fn ink_mask<T: Scalar>(patch: &GrayImage<T>, clear_border: bool) -> Option<BinaryGrid> {
    let threshold = otsu_threshold(patch.pixels())?;
    let mut mask = BinaryGrid::from_fn(patch.width(), patch.height(), |x, y| {
        patch.get(x, y) < threshold
    });
    if clear_border {
        let (w, h) = (patch.width(), patch.height());
        for region in connected_components(&mask) {
            let b = region.bbox;
            if b.x_min == 0 || b.y_min == 0 || b.x_max == w - 1 || b.y_max == h - 1 {
                for (x, y) in region.pixels {
                    mask.set(x, y, false);
                }
            }
        }
    }
    Some(mask)
}

/// Splits a contrast-stretched plate patch into glyphs, left to right.
///
/// Returns an empty list when the number of characters falls outside
/// `expected_min..=expected_max`.
pub fn segment_characters<T: Scalar>(
    patch: &GrayImage<T>,
    expected_min: usize,
    expected_max: usize,
) -> Vec<Glyph<T>> {
    segment_characters_with(patch, expected_min, expected_max, &SegmentConfig::default())
}

pub fn segment_characters_with<T: Scalar>(
    patch: &GrayImage<T>,
    expected_min: usize,
    expected_max: usize,
    cfg: &SegmentConfig,
) -> Vec<Glyph<T>> {
    let Some(mask) = ink_mask(patch, cfg.clear_border) else {
        return Vec::new();
    };
    let (w, h) = (patch.width(), patch.height());
    let profile: Vec<usize> = (0..w)
        .map(|x| (0..h).filter(|&y| mask.get(x, y)).count())
        .collect();
    let peak = profile.iter().copied().max().unwrap_or(0);
    if peak == 0 {
        return Vec::new();
    }
    let floor = cfg.valley_fraction * peak as f64;

    // maximal runs of non-valley columns
    let mut spans = Vec::new();
    let mut start = None;
    for (x, &ink) in profile.iter().enumerate() {
        let is_ink = ink as f64 >= floor && ink > 0;
        match (is_ink, start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                spans.push((s, x - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, w - 1));
    }

    let mut boxes: Vec<(Bbox, usize)> = spans
        .into_iter()
        .filter_map(|(x0, x1)| {
            let rows: Vec<usize> = (0..h)
                .filter(|&y| (x0..=x1).any(|x| mask.get(x, y)))
                .collect();
            let ink: usize = profile[x0..=x1].iter().sum();
            Some((Bbox::new(x0, *rows.first()?, x1, *rows.last()?), ink))
        })
        .collect();
    let heaviest = boxes.iter().map(|b| b.1).max().unwrap_or(0);
    boxes.retain(|b| b.1 as f64 >= cfg.min_ink_fraction * heaviest as f64);

    if boxes.len() < expected_min || boxes.len() > expected_max {
        return Vec::new();
    }
    boxes
        .into_iter()
        .map(|(bbox, _)| {
            let segment = patch.crop(bbox).expect("segment box lies inside the patch");
            let mut glyph = normalize_glyph(&segment, cfg.glyph_size).expect("segment is nonempty");
            glyph.source_bbox = bbox;
            glyph
        })
        .collect()
}

/// Bounding box of the Otsu ink in `img`, if any.
pub fn ink_bbox<T: Scalar>(img: &GrayImage<T>) -> Option<Bbox> {
    let mask = ink_mask(img, false)?;
    let (w, h) = (img.width(), img.height());
    let cols: Vec<usize> = (0..w).filter(|&x| (0..h).any(|y| mask.get(x, y))).collect();
    let rows: Vec<usize> = (0..h).filter(|&y| (0..w).any(|x| mask.get(x, y))).collect();
    Some(Bbox::new(
        *cols.first()?,
        *rows.first()?,
        *cols.last()?,
        *rows.last()?,
    ))
}

/// Aspect-preserving bilinear fit of `segment` into a centered `size`x`size`
/// raster padded with background (1.0).
pub fn normalize_glyph<T: Scalar>(segment: &GrayImage<T>, size: usize) -> Result<Glyph<T>> {
    if segment.is_empty() || size == 0 {
        return invalid("cannot normalize an empty segment");
    }
    let (w, h) = (segment.width(), segment.height());
    let scale = size as f64 / w.max(h) as f64;
    let tw = ((w as f64 * scale).round() as usize).clamp(1, size);
    let th = ((h as f64 * scale).round() as usize).clamp(1, size);
    let (ox, oy) = ((size - tw) / 2, (size - th) / 2);
    let rx = w as f64 / tw as f64;
    let ry = h as f64 / th as f64;

    let mut pixels = vec![T::one(); size * size];
    for dy in 0..th {
        let sy = ((dy as f64 + 0.5) * ry - 0.5).clamp(0.0, (h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(h - 1);
        let fy = T::of(sy - y0 as f64);
        for dx in 0..tw {
            let sx = ((dx as f64 + 0.5) * rx - 0.5).clamp(0.0, (w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let fx = T::of(sx - x0 as f64);
            let top = segment.get(x0, y0) * (T::one() - fx) + segment.get(x1, y0) * fx;
            let bottom = segment.get(x0, y1) * (T::one() - fx) + segment.get(x1, y1) * fx;
            let v = top * (T::one() - fy) + bottom * fy;
            pixels[(oy + dy) * size + ox + dx] = v.max(T::zero()).min(T::one());
        }
    }
    Ok(Glyph {
        size,
        pixels,
        source_bbox: segment.bbox(),
    })
}
