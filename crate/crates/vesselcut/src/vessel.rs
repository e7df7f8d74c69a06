//! Vessel contour ingestion: interior mask, row-width profile,
//! contour-distance field and the source/sink seed bands.

use std::collections::VecDeque;

use thiserror::Error;

use crate::cutcost::GrayImage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VesselError {
    #[error("vessel contour is not closed (gaps wider than one pixel)")]
    OpenContour,
    #[error("no vessel interior")]
    EmptyMask,
    #[error("seed bands overlap: {band} rows per band on a vessel {height} rows tall")]
    BandsOverlap { band: usize, height: usize },
    #[error("seed fraction must be in (0, 0.5), got {0}")]
    InvalidSeedFraction(f64),
}

/// Horizontal extent of the vessel interior in one image row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowSpan {
    pub left: usize,
    pub right: usize,
    pub count: usize,
}

/// Filled interior of a vessel contour. Contour pixels are not interior.
#[derive(Debug, Clone)]
pub struct VesselMask {
    width: usize,
    height: usize,
    inside: Vec<bool>,
    contour: Vec<bool>,
    row_span: Vec<Option<RowSpan>>,
    inside_count: usize,
    top_row: usize,
    bottom_row: usize,
}

impl VesselMask {
    /// Build the mask from a contour image (nonzero = contour pixel).
    ///
    /// A closed contour is filled exactly. If the contour leaks, one pass
    /// of 8-connected gap closing (dilate, fill, recover the eaten ring)
    /// tolerates hairline breaks; anything wider is [`VesselError::OpenContour`].
    pub fn from_contour(contour_img: &GrayImage) -> Result<Self, VesselError> {
        let (w, h) = (contour_img.width(), contour_img.height());
        let contour: Vec<bool> = contour_img.pixels().iter().map(|&v| v != 0.0).collect();
        if !contour.iter().any(|&c| c) {
            return Err(VesselError::EmptyMask);
        }

        let exterior = flood_from_border(w, h, &contour);
        let inside: Vec<bool> = (0..w * h).map(|i| !contour[i] && !exterior[i]).collect();
        if inside.iter().any(|&b| b) {
            return Self::finalize(w, h, inside, contour);
        }

        // The contour leaks. Close gaps by dilating the contour, fill,
        // then grow the interior back over the ring the dilation ate.
        let dilated = dilate8(w, h, &contour);
        let exterior_d = flood_from_border(w, h, &dilated);
        let core: Vec<bool> = (0..w * h).map(|i| !dilated[i] && !exterior_d[i]).collect();
        if !core.iter().any(|&b| b) {
            return Err(VesselError::OpenContour);
        }
        let grown = dilate8(w, h, &core);
        let inside: Vec<bool> = (0..w * h)
            .map(|i| core[i] || (grown[i] && dilated[i] && !contour[i]))
            .collect();
        Self::finalize(w, h, inside, contour)
    }

    /// Build a mask directly from an interior bitmap. The contour is
    /// derived as the outside pixels 4-adjacent to the interior.
    pub fn from_inside(
        width: usize,
        height: usize,
        inside: Vec<bool>,
    ) -> Result<Self, VesselError> {
        assert_eq!(
            inside.len(),
            width * height,
            "interior bitmap size mismatch"
        );
        let mut contour = vec![false; width * height];
        for y in 0..height {
            for x in 0..width {
                if inside[y * width + x] {
                    continue;
                }
                let touches = (x > 0 && inside[y * width + x - 1])
                    || (x + 1 < width && inside[y * width + x + 1])
                    || (y > 0 && inside[(y - 1) * width + x])
                    || (y + 1 < height && inside[(y + 1) * width + x]);
                if touches {
                    contour[y * width + x] = true;
                }
            }
        }
        Self::finalize(width, height, inside, contour)
    }

    fn finalize(
        width: usize,
        height: usize,
        inside: Vec<bool>,
        contour: Vec<bool>,
    ) -> Result<Self, VesselError> {
        let mut row_span = vec![None; height];
        let mut inside_count = 0;
        let mut top_row = None;
        let mut bottom_row = 0;
        for y in 0..height {
            let mut left = None;
            let mut right = 0;
            let mut count = 0;
            for x in 0..width {
                if inside[y * width + x] {
                    left.get_or_insert(x);
                    right = x;
                    count += 1;
                }
            }
            if let Some(left) = left {
                row_span[y] = Some(RowSpan { left, right, count });
                inside_count += count;
                top_row.get_or_insert(y);
                bottom_row = y;
            }
        }
        let Some(top_row) = top_row else {
            return Err(VesselError::EmptyMask);
        };
        Ok(Self {
            width,
            height,
            inside,
            contour,
            row_span,
            inside_count,
            top_row,
            bottom_row,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_inside(&self, x: usize, y: usize) -> bool {
        self.inside[y * self.width + x]
    }

    pub fn is_contour(&self, x: usize, y: usize) -> bool {
        self.contour[y * self.width + x]
    }

    pub fn inside_count(&self) -> usize {
        self.inside_count
    }

    pub fn row_span(&self, y: usize) -> Option<RowSpan> {
        self.row_span[y]
    }

    /// First and last image rows containing interior pixels.
    pub fn vessel_rows(&self) -> (usize, usize) {
        (self.top_row, self.bottom_row)
    }

    /// Row extent of the vessel interior in pixels.
    pub fn vessel_height(&self) -> usize {
        self.bottom_row - self.top_row + 1
    }

    /// Interior pixel count per image row (0 for empty rows).
    pub fn row_widths(&self) -> Vec<usize> {
        self.row_span
            .iter()
            .map(|s| s.map_or(0, |s| s.count))
            .collect()
    }

    /// Exact city-block distance from every pixel to the nearest contour
    /// pixel, via a two-pass chamfer sweep. All-infinite when the mask has
    /// no contour pixels (e.g. a borderless interior bitmap).
    pub fn distance_field(&self) -> ContourDistanceField {
        let (w, h) = (self.width, self.height);
        const FAR: u32 = u32::MAX - 1;
        let mut d: Vec<u32> = self
            .contour
            .iter()
            .map(|&c| if c { 0 } else { FAR })
            .collect();
        if !self.contour.iter().any(|&c| c) {
            return ContourDistanceField {
                width: w,
                height: h,
                dist: vec![f64::INFINITY; w * h],
            };
        }
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if x > 0 {
                    d[i] = d[i].min(d[i - 1] + 1);
                }
                if y > 0 {
                    d[i] = d[i].min(d[i - w] + 1);
                }
            }
        }
        for y in (0..h).rev() {
            for x in (0..w).rev() {
                let i = y * w + x;
                if x + 1 < w {
                    d[i] = d[i].min(d[i + 1] + 1);
                }
                if y + 1 < h {
                    d[i] = d[i].min(d[i + w] + 1);
                }
            }
        }
        ContourDistanceField {
            width: w,
            height: h,
            dist: d.into_iter().map(f64::from).collect(),
        }
    }

    /// Bottom (material/source) and top (air/sink) seed bands, each
    /// `ceil(fraction * vessel_height)` rows of interior pixels.
    pub fn seed_bands(&self, fraction: f64) -> Result<SeedBands, VesselError> {
        if fraction.is_nan() || fraction <= 0.0 || fraction >= 0.5 {
            return Err(VesselError::InvalidSeedFraction(fraction));
        }
        let height = self.vessel_height();
        let band = ((fraction * height as f64).ceil() as usize).max(1);
        let sink_hi = self.top_row + band - 1;
        let source_lo = self.bottom_row + 1 - band;
        if sink_hi >= source_lo {
            return Err(VesselError::BandsOverlap { band, height });
        }
        let mut source = vec![false; self.width * self.height];
        let mut sink = vec![false; self.width * self.height];
        let mut source_count = 0;
        let mut sink_count = 0;
        for y in self.top_row..=self.bottom_row {
            if y > sink_hi && y < source_lo {
                continue;
            }
            for x in 0..self.width {
                if !self.inside[y * self.width + x] {
                    continue;
                }
                if y <= sink_hi {
                    sink[y * self.width + x] = true;
                    sink_count += 1;
                } else {
                    source[y * self.width + x] = true;
                    source_count += 1;
                }
            }
        }
        Ok(SeedBands {
            width: self.width,
            height: self.height,
            source,
            sink,
            source_count,
            sink_count,
            sink_rows: (self.top_row, sink_hi),
            source_rows: (source_lo, self.bottom_row),
        })
    }

    /// Debug rendering: 255 for interior pixels, 0 elsewhere.
    pub fn to_debug_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            if self.is_inside(x, y) {
                255.0
            } else {
                0.0
            }
        })
    }
}

/// Per-pixel city-block distance to the nearest vessel-contour pixel.
#[derive(Debug, Clone)]
pub struct ContourDistanceField {
    width: usize,
    height: usize,
    dist: Vec<f64>,
}

impl ContourDistanceField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.dist[y * self.width + x]
    }
}

/// Hard-seeded pixels: the bottom band feeds the source (material), the
/// top band feeds the sink (air). Always disjoint.
#[derive(Debug, Clone)]
pub struct SeedBands {
    width: usize,
    height: usize,
    source: Vec<bool>,
    sink: Vec<bool>,
    source_count: usize,
    sink_count: usize,
    sink_rows: (usize, usize),
    source_rows: (usize, usize),
}

impl SeedBands {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_source(&self, x: usize, y: usize) -> bool {
        self.source[y * self.width + x]
    }

    pub fn is_sink(&self, x: usize, y: usize) -> bool {
        self.sink[y * self.width + x]
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn sink_count(&self) -> usize {
        self.sink_count
    }

    /// Inclusive row range of the bottom (material) band.
    pub fn source_rows(&self) -> (usize, usize) {
        self.source_rows
    }

    /// Inclusive row range of the top (air) band.
    pub fn sink_rows(&self) -> (usize, usize) {
        self.sink_rows
    }
}

/// 4-connected flood fill from every border pixel over non-blocked cells.
fn flood_from_border(w: usize, h: usize, blocked: &[bool]) -> Vec<bool> {
    let mut reached = vec![false; w * h];
    let mut queue = VecDeque::new();
    let push =
        |x: usize, y: usize, reached: &mut Vec<bool>, queue: &mut VecDeque<(usize, usize)>| {
            let i = y * w + x;
            if !blocked[i] && !reached[i] {
                reached[i] = true;
                queue.push_back((x, y));
            }
        };
    for x in 0..w {
        push(x, 0, &mut reached, &mut queue);
        push(x, h - 1, &mut reached, &mut queue);
    }
    for y in 0..h {
        push(0, y, &mut reached, &mut queue);
        push(w - 1, y, &mut reached, &mut queue);
    }
    while let Some((x, y)) = queue.pop_front() {
        if x > 0 {
            push(x - 1, y, &mut reached, &mut queue);
        }
        if x + 1 < w {
            push(x + 1, y, &mut reached, &mut queue);
        }
        if y > 0 {
            push(x, y - 1, &mut reached, &mut queue);
        }
        if y + 1 < h {
            push(x, y + 1, &mut reached, &mut queue);
        }
    }
    reached
}

/// 8-connected dilation by one pixel.
fn dilate8(w: usize, h: usize, set: &[bool]) -> Vec<bool> {
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if !set[y * w + x] {
                continue;
            }
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                        out[ny as usize * w + nx as usize] = true;
                    }
                }
            }
        }
    }
    out
}
