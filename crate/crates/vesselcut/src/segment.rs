//! End-to-end pipeline: image + vessel mask -> min-cut phase labeling ->
//! boundary curve and fill level.
//!
//! Source side of the cut maps to material, sink side to air. The cut may
//! produce disconnected material regions (no physical constraint is
//! imposed on the boundary shape); [`material_components`] lets callers
//! detect implausible results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutcost::{self, CostParams, GrayImage};
use crate::flownet::NodeLabel;
use crate::vessel::{VesselError, VesselMask};

/// JSON result schema version.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error(transparent)]
    Vessel(#[from] VesselError),
    #[error(transparent)]
    Cost(#[from] cutcost::CostError),
    #[error("labeling covers no vessel pixels")]
    NoBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Material,
    Air,
}

/// Phase per interior pixel plus the cut cost that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLabeling {
    width: usize,
    height: usize,
    phases: Vec<Option<Phase>>,
    inside_count: usize,
    material_count: usize,
    cut_value: f64,
}

impl PhaseLabeling {
    /// Build a labeling directly from a per-pixel phase function
    /// (evaluated on interior pixels only).
    pub fn from_fn(
        mask: &VesselMask,
        cut_value: f64,
        mut f: impl FnMut(usize, usize) -> Phase,
    ) -> Self {
        let (w, h) = (mask.width(), mask.height());
        let mut phases = vec![None; w * h];
        let mut material_count = 0;
        for y in 0..h {
            for x in 0..w {
                if mask.is_inside(x, y) {
                    let phase = f(x, y);
                    material_count += (phase == Phase::Material) as usize;
                    phases[y * w + x] = Some(phase);
                }
            }
        }
        Self {
            width: w,
            height: h,
            phases,
            inside_count: mask.inside_count(),
            material_count,
            cut_value,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Phase of a pixel, `None` outside the vessel interior.
    pub fn phase(&self, x: usize, y: usize) -> Option<Phase> {
        self.phases[y * self.width + x]
    }

    pub fn inside_count(&self) -> usize {
        self.inside_count
    }

    pub fn material_count(&self) -> usize {
        self.material_count
    }

    pub fn air_count(&self) -> usize {
        self.inside_count - self.material_count
    }

    pub fn cut_value(&self) -> f64 {
        self.cut_value
    }
}

/// Topmost material row per image column. A column is `None` when it has
/// no interior pixels or only one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    rows: Vec<Option<u32>>,
}

impl BoundaryCurve {
    pub fn from_rows(rows: Vec<Option<u32>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Option<u32>] {
        &self.rows
    }

    pub fn row(&self, column: usize) -> Option<u32> {
        self.rows[column]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of columns with a defined boundary.
    pub fn defined_count(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }
}

/// Segment one image: build the seeded pixel graph, solve the min cut,
/// and map source side to material, sink side to air.
pub fn segment(
    img: &GrayImage,
    mask: &VesselMask,
    params: &CostParams,
) -> Result<PhaseLabeling, SegmentError> {
    let dist = mask.distance_field();
    let seeds = mask.seed_bands(params.seed_fraction)?;
    let graph = cutcost::build_graph(img, mask, &dist, &seeds, params)?;
    let cut = graph.network.solve();
    Ok(PhaseLabeling::from_fn(mask, cut.flow_value(), |x, y| {
        let node = graph.node_at(x, y).expect("interior pixel has a node");
        match cut.label(node) {
            NodeLabel::SourceSide => Phase::Material,
            NodeLabel::SinkSide => Phase::Air,
        }
    }))
}

/// Per-column topmost material pixel, where the column shows both phases.
pub fn extract_boundary(labeling: &PhaseLabeling, mask: &VesselMask) -> BoundaryCurve {
    debug_assert_eq!(labeling.width(), mask.width());
    debug_assert_eq!(labeling.height(), mask.height());
    let rows = (0..labeling.width())
        .map(|x| {
            let mut top_material = None;
            let mut has_air = false;
            for y in 0..labeling.height() {
                match labeling.phase(x, y) {
                    Some(Phase::Material) => {
                        if top_material.is_none() {
                            top_material = Some(y as u32);
                        }
                    }
                    Some(Phase::Air) => has_air = true,
                    None => {}
                }
            }
            if has_air {
                top_material
            } else {
                None
            }
        })
        .collect();
    BoundaryCurve { rows }
}

/// Fill fraction: material pixels over interior pixels.
pub fn fill_level(labeling: &PhaseLabeling) -> Result<f64, SegmentError> {
    if labeling.inside_count() == 0 {
        return Err(SegmentError::NoBoundary);
    }
    Ok(labeling.material_count() as f64 / labeling.inside_count() as f64)
}

/// Number of 4-connected material regions.
pub fn material_components(labeling: &PhaseLabeling) -> usize {
    let (w, h) = (labeling.width(), labeling.height());
    let mut seen = vec![false; w * h];
    let mut components = 0;
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if seen[y * w + x] || labeling.phase(x, y) != Some(Phase::Material) {
                continue;
            }
            components += 1;
            seen[y * w + x] = true;
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                let visit = |nx: usize,
                             ny: usize,
                             seen: &mut Vec<bool>,
                             stack: &mut Vec<(usize, usize)>| {
                    if !seen[ny * w + nx] && labeling.phase(nx, ny) == Some(Phase::Material) {
                        seen[ny * w + nx] = true;
                        stack.push((nx, ny));
                    }
                };
                if cx > 0 {
                    visit(cx - 1, cy, &mut seen, &mut stack);
                }
                if cx + 1 < w {
                    visit(cx + 1, cy, &mut seen, &mut stack);
                }
                if cy > 0 {
                    visit(cx, cy - 1, &mut seen, &mut stack);
                }
                if cy + 1 < h {
                    visit(cx, cy + 1, &mut seen, &mut stack);
                }
            }
        }
    }
    components
}

/// Serialized result of one segmentation run. `params` holds the
/// resolved values actually used (auto knobs filled in).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentReport {
    pub schema: u32,
    pub image: String,
    pub params: CostParams,
    pub fill_fraction: f64,
    pub cut_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material_components: Option<usize>,
    pub boundary: Vec<Option<u32>>,
}

impl SegmentReport {
    pub fn new(
        image: impl Into<String>,
        mask: &VesselMask,
        labeling: &PhaseLabeling,
        curve: &BoundaryCurve,
        params: &CostParams,
        with_components: bool,
    ) -> Result<Self, SegmentError> {
        let resolved = CostParams {
            penalty_distance: Some(params.resolved_penalty_distance(mask)),
            ..params.clone()
        };
        Ok(Self {
            schema: REPORT_SCHEMA,
            image: image.into(),
            params: resolved,
            fill_fraction: fill_level(labeling)?,
            cut_value: labeling.cut_value(),
            material_components: with_components.then(|| material_components(labeling)),
            boundary: curve.rows().to_vec(),
        })
    }
}

/// Draw the boundary in red over the input image, as overlay output.
pub fn render_overlay(base: &image::DynamicImage, curve: &BoundaryCurve) -> image::RgbImage {
    let mut out = base.to_rgb8();
    for (x, row) in curve.rows().iter().enumerate() {
        if let Some(y) = *row {
            if x < out.width() as usize && y < out.height() {
                out.put_pixel(x as u32, y, image::Rgb([255, 0, 0]));
            }
        }
    }
    out
}
