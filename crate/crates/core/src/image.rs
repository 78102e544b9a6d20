//! Luminance rasters and pixel bounding boxes.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Row-major luminance raster with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> GrayImage<T> {
    /// Validates dimensions and pixel range.
    pub fn new(width: usize, height: usize, pixels: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            ));
        }
        if pixels.len() != width * height {
            return invalid(format!(
                "pixel buffer has {} values, expected {}",
                pixels.len(),
                width * height
            ));
        }
        if let Some(i) = pixels
            .iter()
            .position(|&v| !v.is_finite() || v < T::zero() || v > T::one())
        {
            return invalid(format!("pixel {i} is outside [0, 1]: {}", pixels[i]));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(x, y)`; values are clamped into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(clamp_unit(f(x, y)));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.width + x]
    }

    /// Sets a pixel, clamping into `[0, 1]`.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.pixels[y * self.width + x] = clamp_unit(value);
    }

    pub fn row(&self, y: usize) -> &[T] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.pixels.chunks_exact(self.width)
    }

    /// Copies the pixels inside `bbox` (inclusive, must lie within the image).
    pub fn crop(&self, bbox: Bbox) -> Result<Self> {
        if bbox.x_max >= self.width || bbox.y_max >= self.height {
            return invalid(format!(
                "crop box {bbox:?} exceeds {}x{} image",
                self.width, self.height
            ));
        }
        Ok(Self::from_fn(bbox.width(), bbox.height(), |x, y| {
            self.get(bbox.x_min + x, bbox.y_min + y)
        }))
    }

    /// Applies `f` to every pixel; results are clamped into `[0, 1]`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| clamp_unit(f(v))).collect(),
        }
    }

    pub fn invert(&self) -> Self {
        self.map(|v| T::one() - v)
    }

    pub fn bbox(&self) -> Bbox {
        Bbox::new(0, 0, self.width - 1, self.height - 1)
    }

    /// Mean luminance inside `bbox`.
    pub fn mean_in(&self, bbox: Bbox) -> T {
        let mut sum = T::zero();
        for y in bbox.y_min..=bbox.y_max {
            for x in bbox.x_min..=bbox.x_max {
                sum += self.get(x, y);
            }
        }
        sum / T::of_usize(bbox.area())
    }

    /// Converts the scalar type.
    pub fn cast<U: Scalar>(&self) -> GrayImage<U> {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}

#[inline]
pub(crate) fn clamp_unit<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::zero()
    } else {
        v.max(T::zero()).min(T::one())
    }
}

/// Inclusive pixel rectangle `(x_min, y_min) ..= (x_max, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bbox {
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
}

impl Bbox {
    pub fn new(x_min: usize, y_min: usize, x_max: usize, y_max: usize) -> Self {
        debug_assert!(x_min <= x_max && y_min <= y_max);
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn width(&self) -> usize {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> usize {
        self.y_max - self.y_min + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn aspect(&self) -> f64 {
        self.width() as f64 / self.height() as f64
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    pub fn intersection(&self, other: &Bbox) -> Option<Bbox> {
        let x_min = self.x_min.max(other.x_min);
        let y_min = self.y_min.max(other.y_min);
        let x_max = self.x_max.min(other.x_max);
        let y_max = self.y_max.min(other.y_max);
        (x_min <= x_max && y_min <= y_max).then(|| Bbox::new(x_min, y_min, x_max, y_max))
    }

    /// Intersection over union of the two pixel sets.
    pub fn iou(&self, other: &Bbox) -> f64 {
        let inter = self.intersection(other).map_or(0, |b| b.area());
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }

    /// Grows each side by `fraction` of the box size, clamped to a `width`x`height` image.
    pub fn expand(&self, fraction: f64, width: usize, height: usize) -> Bbox {
        let dx = (self.width() as f64 * fraction).round() as usize;
        let dy = (self.height() as f64 * fraction).round() as usize;
        Bbox::new(
            self.x_min.saturating_sub(dx),
            self.y_min.saturating_sub(dy),
            (self.x_max + dx).min(width - 1),
            (self.y_max + dy).min(height - 1),
        )
    }

    /// Shifts the box by `(dx, dy)`.
    pub fn offset(&self, dx: usize, dy: usize) -> Bbox {
        Bbox::new(
            self.x_min + dx,
            self.y_min + dy,
            self.x_max + dx,
            self.y_max + dy,
        )
    }
}
