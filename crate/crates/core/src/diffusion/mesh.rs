//! Cell-centered finite-volume mesh on a radial model manifold.

use crate::error::{check_range, LabError, Result};
use crate::geometry::{CurvatureProfile, ModelManifold, RadialGrid};

/// Uniform radial cells `[r_i, r_(i+1)]` on `[0, r_max]` with exact metric volumes.
///
/// Cell volumes are `C(d) * integral h^(d-1)` over the cell and face areas are
/// `C(d) h^(d-1)` at the face, so every integral reported by the solver carries
/// the manifold's own volume weight.
#[derive(Debug, Clone)]
pub struct FvMesh {
    manifold: ModelManifold<f64>,
    kappa: f64,
    alpha: f64,
    faces: Vec<f64>,
    centers: Vec<f64>,
    volumes: Vec<f64>,
    ball_volumes: Vec<f64>,
    areas: Vec<f64>,
}

impl FvMesh {
    /// Mesh on the model with curvature `kappa^2 / (1 + r^2)^(alpha/2)`.
    pub fn standard(kappa: f64, alpha: f64, d: usize, r_max: f64, cells: usize) -> Result<Self> {
        check_range("r_max", r_max, 1e-6, 1e6, "[1e-6, 1e6]")?;
        if cells < 4 {
            return Err(LabError::InvalidGrid(format!("{cells} cells; need at least 4")));
        }
        let profile = CurvatureProfile::standard(kappa, alpha)?;
        let first = (r_max / cells as f64).min(1e-3);
        let grid = RadialGrid::graded(r_max, first, 1.05, (r_max / 64.0).min(0.25))?;
        let manifold = ModelManifold::from_profile(&profile, &grid, d)?;
        Self::build(manifold, kappa, alpha, cells)
    }

    /// Euclidean space of dimension `d`.
    pub fn flat(d: usize, r_max: f64, cells: usize) -> Result<Self> {
        Self::standard(0.0, 0.0, d, r_max, cells)
    }

    fn build(manifold: ModelManifold<f64>, kappa: f64, alpha: f64, cells: usize) -> Result<Self> {
        let r_max = manifold.r_max();
        let step = r_max / cells as f64;
        let faces: Vec<f64> = (0..=cells).map(|i| if i == cells { r_max } else { i as f64 * step }).collect();
        let centers: Vec<f64> = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mut ball_volumes = Vec::with_capacity(cells + 1);
        let mut areas = Vec::with_capacity(cells + 1);
        for &f in &faces {
            ball_volumes.push(manifold.volume_ball(f)?);
            areas.push(if f == 0.0 { 0.0 } else { manifold.area_density(f)? });
        }
        let volumes: Vec<f64> = ball_volumes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = volumes.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(LabError::NonPositive {
                what: "cell volume",
                r: centers[i],
                value: volumes[i],
            });
        }
        Ok(Self {
            manifold,
            kappa,
            alpha,
            faces,
            centers,
            volumes,
            ball_volumes,
            areas,
        })
    }

    pub fn manifold(&self) -> &ModelManifold<f64> {
        &self.manifold
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn d(&self) -> usize {
        self.manifold.d()
    }
    pub fn cells(&self) -> usize {
        self.centers.len()
    }
    pub fn r_max(&self) -> f64 {
        *self.faces.last().expect("mesh has faces")
    }
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }
    /// `C(d) h^(d-1)` at each face (zero at the pole).
    pub fn face_areas(&self) -> &[f64] {
        &self.areas
    }

    /// Evaluate a radial function at the cell centers.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.centers.iter().map(|&r| f(r)).collect()
    }

    /// `integral u dV` over the whole mesh.
    pub fn integral(&self, u: &[f64]) -> f64 {
        self.volumes.iter().zip(u).map(|(v, x)| v * x).sum()
    }

    /// Metric-weighted L1 distance.
    pub fn l1_distance(&self, u: &[f64], v: &[f64]) -> f64 {
        self.volumes.iter().zip(u.iter().zip(v)).map(|(w, (a, b))| w * (a - b).abs()).sum()
    }

    /// `integral_(B_radius) u dV`, splitting the cell that contains `radius` by volume.
    pub fn ball_integral(&self, u: &[f64], radius: f64) -> Result<f64> {
        let r_max = self.r_max();
        if !(radius >= 0.0) || radius > r_max {
            return Err(LabError::OutOfRange { r: radius, r_max });
        }
        let mut acc = 0.0;
        for i in 0..self.cells() {
            if self.faces[i + 1] <= radius {
                acc += self.volumes[i] * u[i];
            } else {
                if radius > self.faces[i] {
                    acc += (self.manifold.volume_ball(radius)? - self.ball_volumes[i]) * u[i];
                }
                break;
            }
        }
        Ok(acc)
    }

    /// `integral_(inner <= r <= outer) u dV`.
    pub fn annulus_integral(&self, u: &[f64], inner: f64, outer: f64) -> Result<f64> {
        Ok(self.ball_integral(u, outer)? - self.ball_integral(u, inner)?)
    }

    /// Outermost cell with `u > floor`, if any.
    pub fn support_cell(&self, u: &[f64], floor: f64) -> Option<usize> {
        u.iter().rposition(|x| *x > floor)
    }

    /// Outer face of the outermost cell with `u > floor` (0 for an empty support).
    pub fn support_radius(&self, u: &[f64], floor: f64) -> f64 {
        self.support_cell(u, floor).map_or(0.0, |i| self.faces[i + 1])
    }

    /// Volume-weighted average of cell pairs: maps a field on this mesh to the
    /// mesh with half as many cells on the same interval.
    pub fn restrict_pairs(&self, u: &[f64]) -> Result<Vec<f64>> {
        if self.cells() % 2 != 0 || u.len() != self.cells() {
            return Err(LabError::InvalidGrid("pair restriction needs an even cell count".into()));
        }
        Ok((0..self.cells() / 2)
            .map(|k| {
                let (a, b) = (2 * k, 2 * k + 1);
                (self.volumes[a] * u[a] + self.volumes[b] * u[b]) / (self.volumes[a] + self.volumes[b])
            })
            .collect())
    }
}
