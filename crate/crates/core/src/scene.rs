//! Scene realizations: eRRHs as a Poisson point process, users as a Poisson
//! cluster process (Gaussian clusters) plus a scattered Poisson population.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{DensityField, GridSpec, Point2D, Region};

/// Attempts allowed to draw a scene with at least [`MIN_ERRHS`] eRRHs.
pub const MAX_SCENE_ATTEMPTS: usize = 100;
/// The RBF system needs at least two centres.
pub const MIN_ERRHS: usize = 2;

/// One Gaussian user cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub head: Point2D,
    pub n_users: usize,
    /// Per-axis variance in km².
    pub sigma2: f64,
}

/// Generative parameters for a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneParams {
    pub region: Region,
    /// eRRH intensity per km².
    pub lambda_r: f64,
    /// Cluster-head intensity per km².
    pub lambda_c: f64,
    /// Scattered-user intensity per km².
    pub lambda_u: f64,
    pub sigma2_range: (f64, f64),
    pub nc_range: (usize, usize),
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            region: Region::square(5.0).expect("valid region"),
            lambda_r: 6.0,
            lambda_c: 6.0,
            lambda_u: 10.0,
            sigma2_range: (0.2, 0.25),
            nc_range: (50, 80),
        }
    }
}

impl SceneParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_r", self.lambda_r),
            ("lambda_c", self.lambda_c),
            ("lambda_u", self.lambda_u),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} = {v} must be a finite non-negative intensity")));
            }
        }
        check_sigma2_range(self.sigma2_range)?;
        check_nc_range(self.nc_range)
    }
}

fn check_sigma2_range((lo, hi): (f64, f64)) -> Result<()> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(invalid(format!("sigma2 range ({lo}, {hi}) must be positive and ordered")));
    }
    Ok(())
}

fn check_nc_range((lo, hi): (usize, usize)) -> Result<()> {
    if hi < lo {
        return Err(invalid(format!("cluster size range ({lo}, {hi}) is not ordered")));
    }
    Ok(())
}

/// One realization of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub region: Region,
    pub errhs: Vec<Point2D>,
    /// Clustered users first, then scattered users.
    pub users: Vec<Point2D>,
    pub clusters: Vec<ClusterSpec>,
    pub lambda_u: f64,
    pub lambda_r: f64,
    pub lambda_c: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Homogeneous Poisson point process on `region`.
pub fn sample_ppp<R: Rng + ?Sized>(
    region: &Region,
    intensity: f64,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(invalid(format!("intensity {intensity} must be finite and non-negative")));
    }
    let mean = intensity * region.area();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|e| invalid(format!("poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    Ok((0..count).map(|_| region.sample_uniform(rng)).collect())
}

/// Poisson cluster process: PPP cluster heads, each with a uniform number of
/// members scattered as an isotropic Gaussian. Members that land outside the
/// region are clipped onto its boundary so every cluster keeps its size.
pub fn sample_pcp<R: Rng + ?Sized>(
    region: &Region,
    lambda_c: f64,
    sigma2_range: (f64, f64),
    nc_range: (usize, usize),
    rng: &mut R,
) -> Result<(Vec<ClusterSpec>, Vec<Point2D>)> {
    check_sigma2_range(sigma2_range)?;
    check_nc_range(nc_range)?;
    let heads = sample_ppp(region, lambda_c, rng)?;
    let mut clusters = Vec::with_capacity(heads.len());
    let mut users = Vec::new();
    for head in heads {
        let sigma2 = if sigma2_range.1 > sigma2_range.0 {
            rng.random_range(sigma2_range.0..sigma2_range.1)
        } else {
            sigma2_range.0
        };
        let n_users = rng.random_range(nc_range.0..=nc_range.1);
        let normal = Normal::new(0.0, sigma2.sqrt()).map_err(|e| invalid(e.to_string()))?;
        for _ in 0..n_users {
            let p = Point2D::new(head.x + normal.sample(rng), head.y + normal.sample(rng));
            users.push(region.clamp(p));
        }
        clusters.push(ClusterSpec { head, n_users, sigma2 });
    }
    Ok((clusters, users))
}

impl Scene {
    /// Draws a scene, re-drawing the eRRH process until it has at least two
    /// points.
    pub fn sample<R: Rng + ?Sized>(params: &SceneParams, rng: &mut R) -> Result<Scene> {
        params.validate()?;
        let region = params.region;
        let mut errhs = Vec::new();
        for _ in 0..MAX_SCENE_ATTEMPTS {
            errhs = sample_ppp(&region, params.lambda_r, rng)?;
            if errhs.len() >= MIN_ERRHS {
                break;
            }
        }
        if errhs.len() < MIN_ERRHS {
            return Err(Error::DegenerateScene(format!(
                "fewer than {MIN_ERRHS} eRRHs after {MAX_SCENE_ATTEMPTS} draws at lambda_r = {}",
                params.lambda_r
            )));
        }
        let (clusters, mut users) =
            sample_pcp(&region, params.lambda_c, params.sigma2_range, params.nc_range, rng)?;
        users.extend(sample_ppp(&region, params.lambda_u, rng)?);
        Ok(Scene {
            region,
            errhs,
            users,
            clusters,
            lambda_u: params.lambda_u,
            lambda_r: params.lambda_r,
            lambda_c: params.lambda_c,
            seed: None,
        })
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    /// Density of the generative model at `p`: the scattered intensity plus
    /// every untruncated Gaussian cluster.
    pub fn density_at(&self, p: &Point2D) -> f64 {
        self.lambda_u
            + self
                .clusters
                .iter()
                .map(|c| {
                    let norm = c.n_users as f64 / (2.0 * PI * c.sigma2);
                    norm * (-p.distance_sq(&c.head) / (2.0 * c.sigma2)).exp()
                })
                .sum::<f64>()
    }

    /// Ground-truth density at the centres of an `nx × ny` grid over the
    /// scene region.
    pub fn true_density(&self, nx: usize, ny: usize) -> Result<DensityField> {
        let grid = GridSpec::new(self.region, nx, ny)?;
        Ok(DensityField::from_fn(grid, |p| self.density_at(&p)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Scene> {
        let scene: Scene = serde_json::from_str(s)?;
        let outside = scene
            .errhs
            .iter()
            .chain(scene.users.iter())
            .any(|p| !p.is_finite() || !scene.region.contains(p));
        if outside {
            return Err(invalid("scene contains points outside its region"));
        }
        Ok(scene)
    }
}

/// Index of the closest site to `p`; the lowest index wins ties.
#[inline]
pub fn nearest_index(sites: &[Point2D], p: &Point2D) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in sites.iter().enumerate() {
        let d = s.distance_sq(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Nearest-site label of every cell of `grid`.
pub fn label_grid(sites: &[Point2D], grid: &GridSpec) -> Vec<usize> {
    grid.centers().map(|c| nearest_index(sites, &c)).collect()
}

/// Voronoi cell areas (km²) of `errhs` clipped to `region`, by nearest-site
/// labelling of a grid with `resolution` cells per km. A cell too small to
/// own any grid point is credited one grid cell so every area is positive.
pub fn voronoi_areas(errhs: &[Point2D], region: &Region, resolution: f64) -> Result<Vec<f64>> {
    if errhs.is_empty() {
        return Err(invalid("voronoi areas need at least one eRRH"));
    }
    let grid = GridSpec::with_resolution(*region, resolution)?;
    let mut counts = vec![0usize; errhs.len()];
    for label in label_grid(errhs, &grid) {
        counts[label] += 1;
    }
    let cell = grid.cell_area();
    Ok(counts.into_iter().map(|c| c.max(1) as f64 * cell).collect())
}
