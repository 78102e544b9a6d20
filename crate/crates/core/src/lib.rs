//! Licence-plate reading with a fixed-scale Gaussian wavelet front end and a
//! self-organizing radial-basis character classifier.
//!
//! Stage one localizes the plate: each image row is correlated with the
//! sixth-order Gaussian wavelet at scale 2, the coefficient magnitudes are
//! binarized so that the top 30% become white, and an erosion-only cellular
//! automaton removes everything except compact clusters. Stage two stretches
//! the plate patch, splits it into characters and classifies each glyph.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the precision.

pub mod error;
pub mod grid;
pub mod image;
pub mod neural;
pub mod pipeline;
pub mod scalar;
pub mod segment;
pub mod wavelet;

pub use error::{Error, Result};
pub use image::{Bbox, GrayImage};
pub use scalar::Scalar;

pub type GrayImage64 = image::GrayImage<f64>;
pub type GrayImage32 = image::GrayImage<f32>;
pub type WaveletSpec64 = wavelet::WaveletSpec<f64>;
pub type WaveletSpec32 = wavelet::WaveletSpec<f32>;
pub type WaveletDomain64 = wavelet::WaveletDomain<f64>;
pub type WaveletDomain32 = wavelet::WaveletDomain<f32>;
pub type Glyph64 = segment::Glyph<f64>;
pub type Glyph32 = segment::Glyph<f32>;
pub type SnrbNetwork64 = neural::SnrbNetwork<f64>;
pub type SnrbNetwork32 = neural::SnrbNetwork<f32>;
pub type SomGrid64 = neural::SomGrid<f64>;
pub type SomGrid32 = neural::SomGrid<f32>;
pub type LabeledSet64 = neural::LabeledSet<f64>;
pub type LabeledSet32 = neural::LabeledSet<f32>;
