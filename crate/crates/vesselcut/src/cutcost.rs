//! Edge costs and pixel-graph assembly.
//!
//! The cost of an edge between 4-adjacent interior pixels is inversely
//! related to their intensity difference (linear or exponential form),
//! divided by the vessel row width, multiplied by a horizontal-edge
//! factor that discourages steep cuts, and tripled inside the penalty
//! zone near the vessel contour. Seed-band pixels get infinite terminal
//! capacity toward their phase.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flownet::{FlowNetwork, INF};
use crate::vessel::{ContourDistanceField, SeedBands, VesselMask};

#[derive(Debug, Error)]
pub enum CostError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Single-channel intensity grid with real values in [0, 255].
/// Intensities stay real end to end; nothing is quantized before the
/// cost computation.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "pixel buffer size mismatch");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    /// Decode an image file and convert to grayscale.
    pub fn load(path: &Path) -> Result<Self, CostError> {
        let img = image::open(path).map_err(|source| CostError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        to_grayscale(&img)
    }

    /// Write as an 8-bit PNG (values rounded and clamped to 0..=255).
    pub fn save_png(&self, path: &Path) -> Result<(), CostError> {
        let buf: Vec<u8> = self
            .data
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8)
            .collect();
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, buf)
            .expect("buffer matches dimensions");
        img.save(path).map_err(|source| CostError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Population standard deviation of the intensities.
    pub fn intensity_std(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let n = self.data.len() as f64;
        let mean = self.data.iter().sum::<f64>() / n;
        let var = self.data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        var.sqrt()
    }
}

/// Convert a decoded image to scalar intensities. RGB collapses through
/// the usual luma weights 0.299 R + 0.587 G + 0.114 B, kept real;
/// single-channel input passes through unchanged.
pub fn to_grayscale(img: &image::DynamicImage) -> Result<GrayImage, CostError> {
    use image::DynamicImage as D;

    fn luma(r: f64, g: f64, b: f64) -> f64 {
        0.299 * r + 0.587 * g + 0.114 * b
    }

    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        D::ImageLuma8(b) => b.pixels().map(|p| p.0[0] as f64).collect(),
        D::ImageLumaA8(b) => b.pixels().map(|p| p.0[0] as f64).collect(),
        D::ImageLuma16(b) => b.pixels().map(|p| p.0[0] as f64 / 257.0).collect(),
        D::ImageLumaA16(b) => b.pixels().map(|p| p.0[0] as f64 / 257.0).collect(),
        D::ImageRgb8(b) => b
            .pixels()
            .map(|p| luma(p.0[0] as f64, p.0[1] as f64, p.0[2] as f64))
            .collect(),
        D::ImageRgba8(b) => b
            .pixels()
            .map(|p| luma(p.0[0] as f64, p.0[1] as f64, p.0[2] as f64))
            .collect(),
        D::ImageRgb16(b) => b
            .pixels()
            .map(|p| {
                luma(
                    p.0[0] as f64 / 257.0,
                    p.0[1] as f64 / 257.0,
                    p.0[2] as f64 / 257.0,
                )
            })
            .collect(),
        D::ImageRgba16(b) => b
            .pixels()
            .map(|p| {
                luma(
                    p.0[0] as f64 / 257.0,
                    p.0[1] as f64 / 257.0,
                    p.0[2] as f64 / 257.0,
                )
            })
            .collect(),
        other => return Err(CostError::UnsupportedFormat(format!("{:?}", other.color()))),
    };
    Ok(GrayImage::from_raw(w, h, data))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Linear,
    Exponential,
}

/// All segmentation tunables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub mode: CostMode,
    /// Intensity scale of the exponential cost (intensity units, 0-255).
    pub sigma: f64,
    /// Multiplier on horizontal edges; > 1 discourages vertical cuts.
    pub horizontal_factor: f64,
    /// Multiplier on edges inside the penalty zone near the contour.
    pub penalty_factor: f64,
    /// Penalty zone radius in pixels. `None` resolves per vessel to
    /// max(3, 2% of the maximum row width).
    pub penalty_distance: Option<f64>,
    /// Height fraction of each seed band, in (0, 0.5).
    pub seed_fraction: f64,
    /// Divide edge costs by the vessel row width.
    pub width_normalization: bool,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            mode: CostMode::Exponential,
            sigma: 20.0,
            horizontal_factor: 1.3,
            penalty_factor: 3.0,
            penalty_distance: None,
            seed_fraction: 0.10,
            width_normalization: true,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), CostError> {
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            return Err(CostError::InvalidParams(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.horizontal_factor.is_nan() || self.horizontal_factor < 1.0 {
            return Err(CostError::InvalidParams(format!(
                "horizontal factor must be >= 1, got {}",
                self.horizontal_factor
            )));
        }
        if self.penalty_factor.is_nan() || self.penalty_factor < 1.0 {
            return Err(CostError::InvalidParams(format!(
                "penalty factor must be >= 1, got {}",
                self.penalty_factor
            )));
        }
        if let Some(d) = self.penalty_distance {
            if d.is_nan() || d < 0.0 {
                return Err(CostError::InvalidParams(format!(
                    "penalty distance must be >= 0, got {d}"
                )));
            }
        }
        if self.seed_fraction.is_nan() || self.seed_fraction <= 0.0 || self.seed_fraction >= 0.5 {
            return Err(CostError::InvalidParams(format!(
                "seed fraction must be in (0, 0.5), got {}",
                self.seed_fraction
            )));
        }
        Ok(())
    }

    /// Penalty zone radius for a specific vessel.
    pub fn resolved_penalty_distance(&self, mask: &VesselMask) -> f64 {
        self.penalty_distance.unwrap_or_else(|| {
            let max_width = mask.row_widths().into_iter().max().unwrap_or(0);
            (0.02 * max_width as f64).max(3.0)
        })
    }
}

/// Similarity cost of a pixel pair, in (0, 1]: maximal at equal
/// intensity, strictly decreasing in the difference.
pub fn pair_cost(ia: f64, ib: f64, params: &CostParams) -> f64 {
    let d = (ia - ib).abs();
    match params.mode {
        CostMode::Exponential => (-(d / (2.0 * params.sigma)).powi(2)).exp(),
        CostMode::Linear => 1.0 - d / 255.0,
    }
}

/// Flow network over the vessel interior, one node per interior pixel,
/// arcs between 4-adjacent pairs.
#[derive(Debug)]
pub struct PixelGraph {
    pub network: FlowNetwork,
    width: usize,
    height: usize,
    node_of: Vec<u32>,
    pixel_of: Vec<(u32, u32)>,
}

const NO_NODE: u32 = u32::MAX;

impl PixelGraph {
    pub fn node_at(&self, x: usize, y: usize) -> Option<usize> {
        let n = self.node_of[y * self.width + x];
        (n != NO_NODE).then_some(n as usize)
    }

    pub fn pixel_at(&self, node: usize) -> (usize, usize) {
        let (x, y) = self.pixel_of[node];
        (x as usize, y as usize)
    }

    pub fn node_count(&self) -> usize {
        self.pixel_of.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Assemble the seeded flow network for one image.
pub fn build_graph(
    img: &GrayImage,
    mask: &VesselMask,
    dist: &ContourDistanceField,
    seeds: &SeedBands,
    params: &CostParams,
) -> Result<PixelGraph, CostError> {
    params.validate()?;
    let (w, h) = (mask.width(), mask.height());
    for (what, dw, dh) in [
        ("image", img.width(), img.height()),
        ("distance field", dist.width(), dist.height()),
        ("seed bands", seeds.width(), seeds.height()),
    ] {
        if (dw, dh) != (w, h) {
            return Err(CostError::DimensionMismatch(format!(
                "{what} is {dw}x{dh}, vessel mask is {w}x{h}"
            )));
        }
    }

    let penalty_distance = params.resolved_penalty_distance(mask);
    let widths = mask.row_widths();

    // Row-major node numbering over interior pixels.
    let mut node_of = vec![NO_NODE; w * h];
    let mut pixel_of = Vec::with_capacity(mask.inside_count());
    for y in 0..h {
        for x in 0..w {
            if mask.is_inside(x, y) {
                node_of[y * w + x] = pixel_of.len() as u32;
                pixel_of.push((x as u32, y as u32));
            }
        }
    }

    let mut network = FlowNetwork::new(pixel_of.len());
    network.reserve_edges(2 * pixel_of.len());

    let penalized = |x: usize, y: usize| -> bool { dist.get(x, y) <= penalty_distance };

    for &(x, y) in &pixel_of {
        let (x, y) = (x as usize, y as usize);
        let here = node_of[y * w + x] as usize;
        let intensity = img.get(x, y);

        // Horizontal edge to the right neighbor.
        if x + 1 < w && mask.is_inside(x + 1, y) {
            let mut cost = pair_cost(intensity, img.get(x + 1, y), params);
            if params.width_normalization {
                cost /= widths[y] as f64;
            }
            cost *= params.horizontal_factor;
            if penalized(x, y) || penalized(x + 1, y) {
                cost *= params.penalty_factor;
            }
            let there = node_of[y * w + x + 1] as usize;
            network
                .add_edge(here, there, cost, cost)
                .expect("adjacent interior nodes are valid");
        }

        // Vertical edge to the neighbor below; the row-width term is the
        // mean of the two rows it spans.
        if y + 1 < h && mask.is_inside(x, y + 1) {
            let mut cost = pair_cost(intensity, img.get(x, y + 1), params);
            if params.width_normalization {
                cost /= (widths[y] + widths[y + 1]) as f64 / 2.0;
            }
            if penalized(x, y) || penalized(x, y + 1) {
                cost *= params.penalty_factor;
            }
            let there = node_of[(y + 1) * w + x] as usize;
            network
                .add_edge(here, there, cost, cost)
                .expect("adjacent interior nodes are valid");
        }

        if seeds.is_source(x, y) {
            network
                .set_terminal(here, INF, 0.0)
                .expect("seed node is valid");
        } else if seeds.is_sink(x, y) {
            network
                .set_terminal(here, 0.0, INF)
                .expect("seed node is valid");
        }
    }

    Ok(PixelGraph {
        network,
        width: w,
        height: h,
        node_of,
        pixel_of,
    })
}
