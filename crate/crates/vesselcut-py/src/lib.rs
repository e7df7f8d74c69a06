//! Python bindings: the flow-network solver, cost parameters and the
//! file-based segmentation pipeline.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vesselcut::cutcost::{self, CostMode, CostParams as CoreParams, GrayImage};
use vesselcut::evalbench::synth;
use vesselcut::flownet::{self, NodeLabel};
use vesselcut::segment::{extract_boundary, segment, SegmentReport};
use vesselcut::vessel::VesselMask;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Two-terminal max-flow/min-cut network.
#[pyclass(name = "FlowNetwork")]
struct PyFlowNetwork {
    inner: flownet::FlowNetwork,
}

#[pymethods]
impl PyFlowNetwork {
    #[new]
    fn new(node_count: usize) -> Self {
        Self {
            inner: flownet::FlowNetwork::new(node_count),
        }
    }

    /// Add an edge with capacities in both directions.
    fn add_edge(&mut self, u: usize, v: usize, cap_uv: f64, cap_vu: f64) -> PyResult<()> {
        self.inner.add_edge(u, v, cap_uv, cap_vu).map_err(value_err)
    }

    /// Attach terminal capacity; pass float("inf") for hard seeds.
    fn set_terminal(&mut self, u: usize, to_source: f64, to_sink: f64) -> PyResult<()> {
        self.inner
            .set_terminal(u, to_source, to_sink)
            .map_err(value_err)
    }

    /// Solve the min cut. Returns (flow_value, source_side) where
    /// source_side[i] is True for nodes on the source side.
    fn solve(&self) -> (f64, Vec<bool>) {
        let cut = self.inner.solve();
        let labels = cut
            .labels()
            .iter()
            .map(|&l| l == NodeLabel::SourceSide)
            .collect();
        (cut.flow_value(), labels)
    }

    /// Exhaustive oracle for small instances (at most 20 nodes).
    fn brute_force_min_cut(&self) -> PyResult<(f64, Vec<bool>)> {
        let cut = self.inner.brute_force_min_cut().map_err(value_err)?;
        let labels = cut
            .labels()
            .iter()
            .map(|&l| l == NodeLabel::SourceSide)
            .collect();
        Ok((cut.flow_value(), labels))
    }

    /// Capacity of the cut induced by a source-side indicator list.
    fn cut_capacity(&self, source_side: Vec<bool>) -> PyResult<f64> {
        if source_side.len() != self.inner.node_count() {
            return Err(value_err("label list length must equal node count"));
        }
        let labels: Vec<NodeLabel> = source_side
            .iter()
            .map(|&s| {
                if s {
                    NodeLabel::SourceSide
                } else {
                    NodeLabel::SinkSide
                }
            })
            .collect();
        Ok(self.inner.cut_capacity(&labels))
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }
}

/// Segmentation tunables; mirrors the CLI flags.
#[pyclass(name = "CostParams", from_py_object)]
#[derive(Clone)]
struct PyCostParams {
    inner: CoreParams,
}

#[pymethods]
impl PyCostParams {
    #[new]
    #[pyo3(signature = (
        mode = "exponential",
        sigma = 20.0,
        horizontal_factor = 1.3,
        penalty_factor = 3.0,
        penalty_distance = None,
        seed_fraction = 0.10,
        width_normalization = true,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        mode: &str,
        sigma: f64,
        horizontal_factor: f64,
        penalty_factor: f64,
        penalty_distance: Option<f64>,
        seed_fraction: f64,
        width_normalization: bool,
    ) -> PyResult<Self> {
        let mode = match mode {
            "exponential" | "exp" => CostMode::Exponential,
            "linear" => CostMode::Linear,
            other => return Err(value_err(format!("unknown cost mode `{other}`"))),
        };
        let inner = CoreParams {
            mode,
            sigma,
            horizontal_factor,
            penalty_factor,
            penalty_distance,
            seed_fraction,
            width_normalization,
        };
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn mode(&self) -> &'static str {
        match self.inner.mode {
            CostMode::Exponential => "exponential",
            CostMode::Linear => "linear",
        }
    }
}

/// Similarity cost of an intensity pair under the given parameters.
#[pyfunction]
#[pyo3(signature = (ia, ib, params = None))]
fn pair_cost(ia: f64, ib: f64, params: Option<PyCostParams>) -> f64 {
    let params = params.map_or_else(CoreParams::default, |p| p.inner);
    cutcost::pair_cost(ia, ib, &params)
}

fn report_to_dict<'py>(py: Python<'py>, report: &SegmentReport) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("schema", report.schema)?;
    dict.set_item("image", &report.image)?;
    dict.set_item("fill_fraction", report.fill_fraction)?;
    dict.set_item("cut_value", report.cut_value)?;
    dict.set_item("boundary", &report.boundary)?;
    if let Some(components) = report.material_components {
        dict.set_item("material_components", components)?;
    }
    let params = PyDict::new(py);
    params.set_item(
        "mode",
        match report.params.mode {
            CostMode::Exponential => "exponential",
            CostMode::Linear => "linear",
        },
    )?;
    params.set_item("sigma", report.params.sigma)?;
    params.set_item("horizontal_factor", report.params.horizontal_factor)?;
    params.set_item("penalty_factor", report.params.penalty_factor)?;
    params.set_item("penalty_distance", report.params.penalty_distance)?;
    params.set_item("seed_fraction", report.params.seed_fraction)?;
    params.set_item("width_normalization", report.params.width_normalization)?;
    dict.set_item("params", params)?;
    Ok(dict)
}

/// Segment one image file against its contour file. Returns the result
/// as a dict with the same fields as the CLI's JSON output.
#[pyfunction]
#[pyo3(signature = (image, contour, params = None, strict = false))]
fn segment_file<'py>(
    py: Python<'py>,
    image: PathBuf,
    contour: PathBuf,
    params: Option<PyCostParams>,
    strict: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let params = params.map_or_else(CoreParams::default, |p| p.inner);
    let gray = GrayImage::load(&image).map_err(value_err)?;
    let contour_img = GrayImage::load(&contour).map_err(value_err)?;
    let mask = VesselMask::from_contour(&contour_img).map_err(runtime_err)?;
    let labeling = segment(&gray, &mask, &params).map_err(runtime_err)?;
    let curve = extract_boundary(&labeling, &mask);
    let report = SegmentReport::new(
        image.display().to_string(),
        &mask,
        &labeling,
        &curve,
        &params,
        strict,
    )
    .map_err(runtime_err)?;
    report_to_dict(py, &report)
}

/// Write a synthetic vessel scene (image, contour, ground-truth JSON)
/// and return the three paths.
#[pyfunction]
#[pyo3(signature = (directory, stem, width = 160, height = 200, level = 0.6, noise = 0.0, seed = 0))]
fn write_synth_scene(
    directory: PathBuf,
    stem: String,
    width: usize,
    height: usize,
    level: f64,
    noise: f64,
    seed: u64,
) -> PyResult<(PathBuf, PathBuf, PathBuf)> {
    let spec = synth::SynthSpec {
        profile: synth::Profile::Flat { level },
        noise_sigma: noise,
        seed,
        ..synth::SynthSpec::new(width, height)
    };
    let scene = synth::synthesize(&spec).map_err(value_err)?;
    let image = directory.join(format!("{stem}.png"));
    let contour = directory.join(format!("{stem}_contour.png"));
    let gt = directory.join(format!("{stem}_gt.json"));
    scene.image.save_png(&image).map_err(runtime_err)?;
    scene.contour.save_png(&contour).map_err(runtime_err)?;
    scene.ground_truth.save_json(&gt).map_err(runtime_err)?;
    Ok((image, contour, gt))
}

#[pymodule]
fn vesselcut_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFlowNetwork>()?;
    m.add_class::<PyCostParams>()?;
    m.add_function(wrap_pyfunction!(pair_cost, m)?)?;
    m.add_function(wrap_pyfunction!(segment_file, m)?)?;
    m.add_function(wrap_pyfunction!(write_synth_scene, m)?)?;
    Ok(())
}
