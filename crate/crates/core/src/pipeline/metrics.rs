//! Scoring recognitions against synthetic ground truth.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::neural::SnrbNetwork;
use crate::scalar::Scalar;

use super::{recognize, Detection, PipelineConfig, SyntheticScene};

/// IoU at or above which a detection counts.
pub const IOU_HIT: f64 = 0.5;

/// Per-scene comparison of a detection with the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneOutcome {
    pub iou: f64,
    pub text_match: bool,
    pub chars_correct: usize,
    pub chars_total: usize,
    pub millis: f64,
}

impl SceneOutcome {
    pub fn detected(&self) -> bool {
        self.iou >= IOU_HIT
    }
}

pub fn score_scene<T>(scene: &SyntheticScene<T>, det: &Detection<T>, millis: f64) -> SceneOutcome {
    let iou = det.plate_bbox.map_or(0.0, |b| b.iou(&scene.truth_bbox));
    let truth: Vec<char> = scene.truth_text.chars().collect();
    let chars_correct = match &det.text {
        Some(t) if t.chars().count() == truth.len() => {
            t.chars().zip(&truth).filter(|(a, b)| a == *b).count()
        }
        _ => 0,
    };
    SceneOutcome {
        iou,
        text_match: det.text.as_deref() == Some(scene.truth_text.as_str()),
        chars_correct,
        chars_total: truth.len(),
        millis,
    }
}

/// Aggregate quality over a scene set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub scenes: usize,
    pub detection_rate: f64,
    pub mean_iou: f64,
    pub text_rate: f64,
    pub char_acc: f64,
    pub ms_per_image: f64,
}

impl Metrics {
    pub fn from_outcomes(outcomes: &[SceneOutcome]) -> Result<Self> {
        if outcomes.is_empty() {
            return invalid("no scenes to evaluate");
        }
        let n = outcomes.len() as f64;
        let chars: usize = outcomes.iter().map(|o| o.chars_total).sum();
        let correct: usize = outcomes.iter().map(|o| o.chars_correct).sum();
        Ok(Self {
            scenes: outcomes.len(),
            detection_rate: outcomes.iter().filter(|o| o.detected()).count() as f64 / n,
            mean_iou: outcomes.iter().map(|o| o.iou).sum::<f64>() / n,
            text_rate: outcomes.iter().filter(|o| o.text_match).count() as f64 / n,
            char_acc: if chars == 0 {
                0.0
            } else {
                correct as f64 / chars as f64
            },
            ms_per_image: outcomes.iter().map(|o| o.millis).sum::<f64>() / n,
        })
    }

    /// The record line without the timing field.
    pub fn quality_record(&self) -> String {
        format!(
            "detection_rate={:.6} mean_iou={:.6} text_rate={:.6} char_acc={:.6}",
            self.detection_rate, self.mean_iou, self.text_rate, self.char_acc
        )
    }
}

impl fmt::Display for Metrics {
    /// The single-line machine-readable record.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ms_per_image={:.3}",
            self.quality_record(),
            self.ms_per_image
        )
    }
}

/// Runs [`recognize`] on every scene in parallel and aggregates the outcomes.
/// Timing is per image, measured around its own recognition.
pub fn evaluate<T: Scalar>(
    scenes: &[SyntheticScene<T>],
    net: &SnrbNetwork<T>,
    cfg: &PipelineConfig,
) -> Result<(Metrics, Vec<SceneOutcome>)> {
    let outcomes = scenes
        .par_iter()
        .map(|scene| {
            let start = Instant::now();
            let det = recognize(&scene.image, net, cfg)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            Ok(score_scene(scene, &det, millis))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Metrics::from_outcomes(&outcomes)?, outcomes))
}
