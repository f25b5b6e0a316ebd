//! Analytic forward projection of Gaussian-blurred atom configurations onto
//! 1D detectors, plus dense system-matrix assembly for grid-based solvers.
//!
//! A single atom at `x` projects, at angle `theta`, to a Gaussian profile
//! `exp(-(r - z0)^2 / sigma^2)` with `z0 = x1 cos(theta) + x2 sin(theta)`,
//! sampled at the detector bin centers. Peak amplitude is 1 and no
//! normalization prefactor is applied; all solvers see data and model
//! through the same operator, so a global scale cancels.

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// The reconstruction domain is the closed unit square.
pub const DOMAIN_MIN: f64 = 0.0;
pub const DOMAIN_MAX: f64 = 1.0;

pub(crate) fn in_domain(p: [f64; 2]) -> bool {
    p[0] >= DOMAIN_MIN && p[0] <= DOMAIN_MAX && p[1] >= DOMAIN_MIN && p[1] <= DOMAIN_MAX
}

/// Ordered list of continuous 2D atom coordinates inside the unit square;
/// the unknown of the inverse problem.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomConfiguration {
    positions: Vec<[f64; 2]>,
}

impl AtomConfiguration {
    /// Builds a configuration, rejecting non-finite or out-of-domain points.
    pub fn new(positions: Vec<[f64; 2]>) -> Result<Self> {
        for (i, p) in positions.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() || !in_domain(*p) {
                return Err(Error::invalid(format!(
                    "atom {i} at ({}, {}) lies outside the unit square",
                    p[0], p[1]
                )));
            }
        }
        Ok(AtomConfiguration { positions })
    }

    pub fn empty() -> Self {
        AtomConfiguration { positions: Vec::new() }
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Cosine/sine of an angle given in degrees, with exact values at
/// multiples of 90 so that axis-aligned projections are bit-symmetric.
pub(crate) fn direction_for_angle_deg(angle_deg: f64) -> (f64, f64) {
    let quarter = angle_deg / 90.0;
    if quarter == quarter.trunc() {
        match (quarter as i64).rem_euclid(4) {
            0 => return (1.0, 0.0),
            1 => return (0.0, 1.0),
            2 => return (-1.0, 0.0),
            _ => return (0.0, -1.0),
        }
    }
    let rad = angle_deg.to_radians();
    (rad.cos(), rad.sin())
}

/// Projection angles, detector pixel size, bin layout, and Gaussian blur
/// width; together these define the forward operator.
///
/// Bin centers sit at `offset + (k + 1/2) d` for `k = 0..bin_count`. The
/// default layout centers a detector of length `bin_count * d >= sqrt(2)`
/// on the projection of the domain center, which covers every projection
/// of the unit square for angles in `[0, 90]` degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorGeometry {
    angles_deg: Vec<f64>,
    pixel_size: f64,
    bin_count: usize,
    gaussian_width: f64,
    offset: f64,
}

impl DetectorGeometry {
    /// Default layout: `bin_count = ceil(sqrt(2)/d)` bins centered on the
    /// domain center's projection, `offset = 0.5 - bin_count * d / 2`.
    pub fn with_coverage(angles_deg: Vec<f64>, pixel_size: f64, gaussian_width: f64) -> Result<Self> {
        if !(pixel_size > 0.0) {
            return Err(Error::invalid(format!("pixel size must be positive, got {pixel_size}")));
        }
        let bin_count = (std::f64::consts::SQRT_2 / pixel_size).ceil() as usize;
        let offset = 0.5 - bin_count as f64 * pixel_size / 2.0;
        Self::new(angles_deg, pixel_size, bin_count, gaussian_width, offset)
    }

    pub fn new(
        angles_deg: Vec<f64>,
        pixel_size: f64,
        bin_count: usize,
        gaussian_width: f64,
        offset: f64,
    ) -> Result<Self> {
        if angles_deg.is_empty() {
            return Err(Error::invalid("at least one projection angle is required"));
        }
        if !(pixel_size > 0.0) || !(gaussian_width > 0.0) {
            return Err(Error::invalid(format!(
                "pixel size and Gaussian width must be positive (d={pixel_size}, sigma={gaussian_width})"
            )));
        }
        if !offset.is_finite() || angles_deg.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("geometry values must be finite"));
        }
        // Coverage rule: the detector must span at least the domain diagonal,
        // otherwise projection mass is lost at oblique angles.
        if (bin_count as f64) * pixel_size < std::f64::consts::SQRT_2 - 1e-12 {
            return Err(Error::invalid(format!(
                "detector extent {} does not cover the domain diagonal sqrt(2)",
                bin_count as f64 * pixel_size
            )));
        }
        Ok(DetectorGeometry { angles_deg, pixel_size, bin_count, gaussian_width, offset })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn angle_count(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn gaussian_width(&self) -> f64 {
        self.gaussian_width
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Center coordinate of detector bin `k`.
    pub fn bin_center(&self, k: usize) -> f64 {
        self.offset + (k as f64 + 0.5) * self.pixel_size
    }

    /// Total number of measurements (angles x bins).
    pub fn ray_count(&self) -> usize {
        self.angles_deg.len() * self.bin_count
    }
}

/// Stacked 1D projections, one row per angle; the data `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    values: Array2<f64>,
    geometry: DetectorGeometry,
}

impl Sinogram {
    pub fn new(values: Array2<f64>, geometry: DetectorGeometry) -> Result<Self> {
        if values.nrows() != geometry.angle_count() || values.ncols() != geometry.bin_count() {
            return Err(Error::ShapeMismatch(format!(
                "sinogram shape {}x{} does not match geometry {}x{}",
                values.nrows(),
                values.ncols(),
                geometry.angle_count(),
                geometry.bin_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sinogram values must be finite"));
        }
        Ok(Sinogram { values, geometry })
    }

    pub fn zeros(geometry: DetectorGeometry) -> Self {
        let values = Array2::zeros((geometry.angle_count(), geometry.bin_count()));
        Sinogram { values, geometry }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn geometry(&self) -> &DetectorGeometry {
        &self.geometry
    }

    /// Row-major (angle-major) flattening used by solvers.
    pub fn flattened(&self) -> Array1<f64> {
        Array1::from_iter(self.values.iter().copied())
    }

    /// Squared l2 norm of all entries.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Writes the Gaussian profile of an atom projected at `(cos_t, sin_t)`
/// into `out` (one detector row), accumulating.
fn accumulate_profile(out: &mut [f64], x: [f64; 2], cos_t: f64, sin_t: f64, geometry: &DetectorGeometry) {
    let z0 = x[0] * cos_t + x[1] * sin_t;
    let inv_w2 = 1.0 / (geometry.gaussian_width * geometry.gaussian_width);
    for (k, slot) in out.iter_mut().enumerate() {
        let dz = geometry.bin_center(k) - z0;
        *slot += (-dz * dz * inv_w2).exp();
    }
}

/// Projection of a single atom onto the detector at one angle: samples of
/// `exp(-(r - z0)^2 / sigma^2)` at the bin centers.
pub fn project_atom(x: [f64; 2], geometry: &DetectorGeometry, angle_index: usize) -> Result<Array1<f64>> {
    if angle_index >= geometry.angle_count() {
        return Err(Error::IndexOutOfRange(format!(
            "angle index {angle_index} with {} angles",
            geometry.angle_count()
        )));
    }
    if !in_domain(x) {
        return Err(Error::invalid(format!(
            "atom at ({}, {}) lies outside the unit square",
            x[0], x[1]
        )));
    }
    let (cos_t, sin_t) = direction_for_angle_deg(geometry.angles_deg[angle_index]);
    let mut row = vec![0.0; geometry.bin_count()];
    accumulate_profile(&mut row, x, cos_t, sin_t, geometry);
    Ok(Array1::from_vec(row))
}

/// Projection of a whole configuration: each row is the sum of the
/// single-atom profiles at that angle. An empty configuration yields the
/// zero sinogram.
pub fn project_config(config: &AtomConfiguration, geometry: &DetectorGeometry) -> Sinogram {
    let mut values = Array2::zeros((geometry.angle_count(), geometry.bin_count()));
    for (i, angle) in geometry.angles_deg.iter().enumerate() {
        let (cos_t, sin_t) = direction_for_angle_deg(*angle);
        let row = values.row_mut(i).into_slice().expect("row is contiguous");
        for &x in config.positions() {
            accumulate_profile(row, x, cos_t, sin_t, geometry);
        }
    }
    Sinogram { values, geometry: geometry.clone() }
}

/// Flattened (angle-major) projection of a single atom over all angles;
/// this is one column of the system matrix for an atom at a grid node.
pub fn atom_signature(x: [f64; 2], geometry: &DetectorGeometry) -> Array1<f64> {
    let bins = geometry.bin_count();
    let mut out = vec![0.0; geometry.ray_count()];
    for (i, angle) in geometry.angles_deg.iter().enumerate() {
        let (cos_t, sin_t) = direction_for_angle_deg(*angle);
        accumulate_profile(&mut out[i * bins..(i + 1) * bins], x, cos_t, sin_t, geometry);
    }
    Array1::from_vec(out)
}

/// Dense forward operator for grid-based solvers: column `j` is the
/// flattened projection of a single atom at grid node `j` (row-major node
/// ordering). Rows follow the sinogram flattening (angle-major).
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    entries: Array2<f64>,
    /// Owned transpose; kept so both `Psi v` and `Psi^T u` run over
    /// contiguous rows.
    entries_t: Array2<f64>,
    grid: GridSpec,
    geometry: DetectorGeometry,
}

impl SystemMatrix {
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn geometry(&self) -> &DetectorGeometry {
        &self.geometry
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `Psi w`.
    pub fn apply(&self, w: &Array1<f64>) -> Array1<f64> {
        self.entries.dot(w)
    }

    /// `Psi^T u`.
    pub fn apply_transpose(&self, u: &Array1<f64>) -> Array1<f64> {
        self.entries_t.dot(u)
    }

    /// Column `j` as a contiguous slice (the signature of node `j`).
    pub fn column(&self, j: usize) -> &[f64] {
        self.entries_t.row(j).to_slice().expect("transpose rows are contiguous")
    }
}

/// Assembles the dense system matrix for `grid` under `geometry`. Columns
/// are computed independently (in parallel) and the result is identical to
/// sequential assembly.
pub fn build_system_matrix(grid: &GridSpec, geometry: &DetectorGeometry) -> Result<SystemMatrix> {
    let n_nodes = grid.node_count();
    if n_nodes == 0 {
        return Err(Error::invalid("grid has no nodes"));
    }
    let rays = geometry.ray_count();
    let columns: Vec<Array1<f64>> = (0..n_nodes)
        .into_par_iter()
        .map(|j| atom_signature(grid.node_coord(j), geometry))
        .collect();

    let mut entries_t = Array2::zeros((n_nodes, rays));
    for (j, col) in columns.iter().enumerate() {
        entries_t.row_mut(j).assign(col);
    }
    let entries = entries_t.t().to_owned();
    Ok(SystemMatrix { entries, entries_t, grid: grid.clone(), geometry: geometry.clone() })
}

/// Adds i.i.d. zero-mean Gaussian noise of standard deviation
/// `noise_level` to every entry; deterministic given `seed`.
pub fn add_noise(sinogram: &Sinogram, noise_level: f64, seed: u64) -> Result<Sinogram> {
    if !(noise_level >= 0.0) {
        return Err(Error::invalid(format!("noise level must be non-negative, got {noise_level}")));
    }
    if noise_level == 0.0 {
        return Ok(sinogram.clone());
    }
    let normal = Normal::new(0.0, noise_level)
        .map_err(|e| Error::invalid(format!("bad noise level: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = sinogram.values.clone();
    for v in values.iter_mut() {
        *v += normal.sample(&mut rng);
    }
    Ok(Sinogram { values, geometry: sinogram.geometry.clone() })
}
