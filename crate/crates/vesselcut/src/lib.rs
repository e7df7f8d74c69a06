//! Boundary tracing for materials in transparent vessels.
//!
//! Given an image of a transparent vessel and the vessel contour, the
//! pipeline builds a flow network over the vessel interior, hard-seeds the
//! bottom band as material and the top band as air, and reads the material
//! boundary off the minimum cut:
//!
//! 1. [`vessel`] — contour ingestion: interior mask, row widths,
//!    contour-distance field, seed bands.
//! 2. [`cutcost`] — intensity-difference edge costs with width
//!    normalization, horizontal-edge weighting and the near-contour
//!    penalty zone; assembles the pixel graph.
//! 3. [`flownet`] — max-flow/min-cut solver plus an exhaustive oracle.
//! 4. [`segment`] — end-to-end pipeline: phase labeling, boundary curve,
//!    fill level, result serialization.
//! 5. [`evalbench`] — synthetic vessel generation, detection scoring and
//!    the sigma sweep harness.
//!
//! [`cli`] wires the pipeline, the sweep and the synthetic generator into
//! the `vesselcut` binary.

#![forbid(unsafe_code)]

pub mod cli;
pub mod cutcost;
pub mod evalbench;
pub mod flownet;
pub mod segment;
pub mod vessel;
