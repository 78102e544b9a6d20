//! Percentile binarization, the survival automaton and plate-region selection.

use std::collections::VecDeque;

use crate::error::{invalid, Result};
use crate::image::{Bbox, GrayImage};
use crate::scalar::Scalar;

/// Boolean raster; `true` is a white (alive) cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryGrid {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl BinaryGrid {
    pub fn new(width: usize, height: usize, cells: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return invalid(format!(
                "grid buffer of {} cells does not match {width}x{height}",
                cells.len()
            ));
        }
        Ok(Self {
            width,
            height,
            cells,
        })
    }

    pub fn black(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.cells[y * self.width + x] = value;
    }

    pub fn white_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Number of white cells among the eight neighbours; outside cells are black.
    pub fn live_neighbors(&self, x: usize, y: usize) -> u8 {
        let mut n = 0;
        for ny in y.saturating_sub(1)..=(y + 1).min(self.height - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(self.width - 1) {
                if (nx, ny) != (x, y) && self.get(nx, ny) {
                    n += 1;
                }
            }
        }
        n
    }

    /// White = 1, black = 0.
    pub fn to_image<T: Scalar>(&self) -> GrayImage<T> {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            if self.get(x, y) {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// Survival rule of the erosion automaton. There is no birth rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaRule {
    /// Minimum white 8-neighbours for a white cell to stay white.
    pub survival_min: u8,
    pub max_iterations: usize,
}

impl Default for CaRule {
    fn default() -> Self {
        Self {
            survival_min: 4,
            max_iterations: 16,
        }
    }
}

impl CaRule {
    pub fn validate(&self) -> Result<()> {
        if self.survival_min > 8 {
            return invalid(format!(
                "survival_min must be <= 8, got {}",
                self.survival_min
            ));
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive");
        }
        Ok(())
    }
}

/// Maximal 8-connected set of white cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub pixel_count: usize,
    pub bbox: Bbox,
    pub pixels: Vec<(usize, usize)>,
}

/// Bounding-box filters applied when choosing the plate cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateConstraints {
    pub min_aspect: f64,
    pub max_aspect: f64,
    pub min_area_fraction: f64,
}

impl Default for PlateConstraints {
    fn default() -> Self {
        Self {
            min_aspect: 2.0,
            max_aspect: 8.0,
            min_area_fraction: 0.002,
        }
    }
}

impl PlateConstraints {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_aspect > 0.0 && self.min_aspect < self.max_aspect) {
            return invalid(format!(
                "aspect bounds must satisfy 0 < min < max, got [{}, {}]",
                self.min_aspect, self.max_aspect
            ));
        }
        if !(self.min_area_fraction > 0.0 && self.min_area_fraction < 1.0) {
            return invalid(format!(
                "min_area_fraction must lie in (0, 1), got {}",
                self.min_area_fraction
            ));
        }
        Ok(())
    }

    pub fn accepts(&self, bbox: &Bbox, image_width: usize, image_height: usize) -> bool {
        let aspect = bbox.aspect();
        let area_fraction = bbox.area() as f64 / (image_width * image_height) as f64;
        aspect >= self.min_aspect
            && aspect <= self.max_aspect
            && area_fraction >= self.min_area_fraction
    }
}

/// Whitens exactly `round(white_fraction * N)` of the brightest pixels.
///
/// Equal values are ranked by row-major index, lower index first.
pub fn binarize_percentile<T: Scalar>(
    img: &GrayImage<T>,
    white_fraction: f64,
) -> Result<BinaryGrid> {
    if !(white_fraction > 0.0 && white_fraction < 1.0) {
        return invalid(format!(
            "white_fraction must lie in (0, 1), got {white_fraction}"
        ));
    }
    let n = img.len();
    let k = (white_fraction * n as f64).round() as usize;
    let px = img.pixels();
    let mut order: Vec<usize> = (0..n).collect();
    let brighter_first = |&a: &usize, &b: &usize| {
        px[b]
            .partial_cmp(&px[a])
            .expect("validated pixels are finite")
            .then(a.cmp(&b))
    };
    let mut cells = vec![false; n];
    if k > 0 {
        if k < n {
            order.select_nth_unstable_by(k - 1, brighter_first);
        }
        for &i in &order[..k] {
            cells[i] = true;
        }
    }
    Ok(BinaryGrid {
        width: img.width(),
        height: img.height(),
        cells,
    })
}

/// One synchronous update: a white cell survives iff it has at least
/// `survival_min` white neighbours in the input grid.
pub fn ca_step(grid: &BinaryGrid, rule: &CaRule) -> BinaryGrid {
    BinaryGrid::from_fn(grid.width, grid.height, |x, y| {
        grid.get(x, y) && grid.live_neighbors(x, y) >= rule.survival_min
    })
}

/// Iterates [`ca_step`] to a fixpoint or `max_iterations`; returns the grid
/// and the number of steps applied.
pub fn ca_iterate(grid: &BinaryGrid, rule: &CaRule) -> (BinaryGrid, usize) {
    let mut current = grid.clone();
    for step in 1..=rule.max_iterations {
        let next = ca_step(&current, rule);
        if next == current {
            return (next, step);
        }
        current = next;
    }
    (current, rule.max_iterations)
}

pub fn ca_run(grid: &BinaryGrid, rule: &CaRule) -> BinaryGrid {
    ca_iterate(grid, rule).0
}

/// 8-connected components, largest first; ties by `(y_min, x_min)`.
pub fn connected_components(grid: &BinaryGrid) -> Vec<Region> {
    let (w, h) = (grid.width, grid.height);
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !grid.cells[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let j = ny * w + nx;
                    if grid.cells[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        regions.push(Region {
            pixel_count: pixels.len(),
            bbox: Bbox::new(x0, y0, x1, y1),
            pixels,
        });
    }
    regions.sort_by(|a, b| {
        b.pixel_count
            .cmp(&a.pixel_count)
            .then(a.bbox.y_min.cmp(&b.bbox.y_min))
            .then(a.bbox.x_min.cmp(&b.bbox.x_min))
    });
    regions
}

/// The largest region whose bounding box passes `constraints`.
pub fn select_plate_region<'a>(
    regions: &'a [Region],
    constraints: &PlateConstraints,
    image_dims: (usize, usize),
) -> Option<&'a Region> {
    let mut best: Option<&Region> = None;
    for r in regions
        .iter()
        .filter(|r| constraints.accepts(&r.bbox, image_dims.0, image_dims.1))
    {
        if best.is_none_or(|b| r.pixel_count > b.pixel_count) {
            best = Some(r);
        }
    }
    best
}
