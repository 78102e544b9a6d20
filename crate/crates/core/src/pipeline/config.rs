//! Pipeline configuration and its flat `key=value` text form.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::grid::{CaRule, PlateConstraints};
use crate::neural::TrainConfig;
use crate::scalar::Scalar;
use crate::segment::SegmentConfig;
use crate::wavelet::WaveletSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub wavelet: WaveletSpec<f64>,
    /// Share of wavelet-magnitude pixels binarized white.
    pub white_fraction: f64,
    pub ca: CaRule,
    pub plate: PlateConstraints,
    pub glyph_size: usize,
    pub char_count_range: (usize, usize),
    pub train: TrainConfig,
    /// Set for light characters on a dark plate.
    pub invert: bool,
    pub segment: SegmentConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            wavelet: WaveletSpec::default(),
            white_fraction: 0.30,
            ca: CaRule::default(),
            plate: PlateConstraints::default(),
            glyph_size: 16,
            char_count_range: (4, 9),
            train: TrainConfig::default(),
            invert: false,
            segment: SegmentConfig::default(),
        }
    }
}

const KEYS: &[&str] = &[
    "wavelet.order",
    "wavelet.scale",
    "wavelet.support_radius",
    "white_fraction",
    "ca.survival_min",
    "ca.max_iterations",
    "plate.min_aspect",
    "plate.max_aspect",
    "plate.min_area_fraction",
    "glyph_size",
    "char_count_range",
    "train.novelty_threshold",
    "train.width_overlap",
    "train.prune_utility",
    "train.max_epochs",
    "train.second_layer_trigger",
    "train.seed",
    "invert",
    "segment.low_percentile",
    "segment.high_percentile",
    "segment.valley_fraction",
    "segment.min_ink_fraction",
    "segment.clear_border",
];

fn value<V: FromStr>(line: usize, key: &str, raw: &str) -> Result<V> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad value {raw:?} for {key}"),
    })
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.wavelet.validate()?;
        if !(self.white_fraction > 0.0 && self.white_fraction < 1.0) {
            return invalid(format!(
                "white_fraction must lie in (0, 1), got {}",
                self.white_fraction
            ));
        }
        self.ca.validate()?;
        self.plate.validate()?;
        if self.glyph_size == 0 {
            return invalid("glyph_size must be positive");
        }
        let (lo, hi) = self.char_count_range;
        if lo == 0 || lo > hi {
            return invalid(format!(
                "char_count_range must satisfy 1 <= min <= max, got {lo},{hi}"
            ));
        }
        self.train.validate()?;
        self.segment_config().validate()
    }

    /// Segmentation thresholds with the configured glyph size.
    pub fn segment_config(&self) -> SegmentConfig {
        SegmentConfig {
            glyph_size: self.glyph_size,
            ..self.segment
        }
    }

    pub fn wavelet_spec<T: Scalar>(&self) -> WaveletSpec<T> {
        WaveletSpec {
            order: self.wavelet.order,
            scale: T::of(self.wavelet.scale),
            support_radius: T::of(self.wavelet.support_radius),
        }
    }

    /// Sets one dotted key; `line` only labels errors.
    pub fn set(&mut self, key: &str, raw: &str, line: usize) -> Result<()> {
        let raw = raw.trim();
        match key {
            "wavelet.order" => self.wavelet.order = value(line, key, raw)?,
            "wavelet.scale" => self.wavelet.scale = value(line, key, raw)?,
            "wavelet.support_radius" => self.wavelet.support_radius = value(line, key, raw)?,
            "white_fraction" => self.white_fraction = value(line, key, raw)?,
            "ca.survival_min" => self.ca.survival_min = value(line, key, raw)?,
            "ca.max_iterations" => self.ca.max_iterations = value(line, key, raw)?,
            "plate.min_aspect" => self.plate.min_aspect = value(line, key, raw)?,
            "plate.max_aspect" => self.plate.max_aspect = value(line, key, raw)?,
            "plate.min_area_fraction" => self.plate.min_area_fraction = value(line, key, raw)?,
            "glyph_size" => self.glyph_size = value(line, key, raw)?,
            "char_count_range" => {
                let (lo, hi) = raw.split_once(',').ok_or_else(|| Error::Parse {
                    line,
                    message: format!("char_count_range needs min,max, got {raw:?}"),
                })?;
                self.char_count_range =
                    (value(line, key, lo.trim())?, value(line, key, hi.trim())?);
            }
            "train.novelty_threshold" => self.train.novelty_threshold = value(line, key, raw)?,
            "train.width_overlap" => self.train.width_overlap = value(line, key, raw)?,
            "train.prune_utility" => self.train.prune_utility = value(line, key, raw)?,
            "train.max_epochs" => self.train.max_epochs = value(line, key, raw)?,
            "train.second_layer_trigger" => {
                self.train.second_layer_trigger = value(line, key, raw)?
            }
            "train.seed" => self.train.seed = value(line, key, raw)?,
            "invert" => self.invert = value(line, key, raw)?,
            "segment.low_percentile" => self.segment.low_percentile = value(line, key, raw)?,
            "segment.high_percentile" => self.segment.high_percentile = value(line, key, raw)?,
            "segment.valley_fraction" => self.segment.valley_fraction = value(line, key, raw)?,
            "segment.min_ink_fraction" => self.segment.min_ink_fraction = value(line, key, raw)?,
            "segment.clear_border" => self.segment.clear_border = value(line, key, raw)?,
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key {key:?}"),
                })
            }
        }
        Ok(())
    }

    /// Parses `key=value` lines over the defaults. `#` starts a comment;
    /// repeated keys are errors. The result is validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, val) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key=value, got {content:?}"),
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key {key:?}"),
                });
            }
            cfg.set(key, val, line)?;
            seen.push(key);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Every key with its current value, one per line, in a form [`parse`](Self::parse) accepts.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let v = match *key {
                "wavelet.order" => self.wavelet.order.to_string(),
                "wavelet.scale" => self.wavelet.scale.to_string(),
                "wavelet.support_radius" => self.wavelet.support_radius.to_string(),
                "white_fraction" => self.white_fraction.to_string(),
                "ca.survival_min" => self.ca.survival_min.to_string(),
                "ca.max_iterations" => self.ca.max_iterations.to_string(),
                "plate.min_aspect" => self.plate.min_aspect.to_string(),
                "plate.max_aspect" => self.plate.max_aspect.to_string(),
                "plate.min_area_fraction" => self.plate.min_area_fraction.to_string(),
                "glyph_size" => self.glyph_size.to_string(),
                "char_count_range" => {
                    format!("{},{}", self.char_count_range.0, self.char_count_range.1)
                }
                "train.novelty_threshold" => self.train.novelty_threshold.to_string(),
                "train.width_overlap" => self.train.width_overlap.to_string(),
                "train.prune_utility" => self.train.prune_utility.to_string(),
                "train.max_epochs" => self.train.max_epochs.to_string(),
                "train.second_layer_trigger" => self.train.second_layer_trigger.to_string(),
                "train.seed" => self.train.seed.to_string(),
                "invert" => self.invert.to_string(),
                "segment.low_percentile" => self.segment.low_percentile.to_string(),
                "segment.high_percentile" => self.segment.high_percentile.to_string(),
                "segment.valley_fraction" => self.segment.valley_fraction.to_string(),
                "segment.min_ink_fraction" => self.segment.min_ink_fraction.to_string(),
                "segment.clear_border" => self.segment.clear_border.to_string(),
                _ => unreachable!("KEYS lists only handled keys"),
            };
            let _ = writeln!(s, "{key}={v}");
        }
        s
    }
}
