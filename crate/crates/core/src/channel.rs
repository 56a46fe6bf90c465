//! Rayleigh-faded path-loss channel, max-SIR association and the SH outage
//! probability.
//!
//! Receiver noise is neglected everywhere: association and outage use SIR.
//! The closed-form outage only involves distance ratios, so it is unit-free;
//! absolute gains convert km to metres because `beta0` is referenced to 1 m.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{GridSpec, Point2D};
use crate::scene::{nearest_index, Scene};

/// Which eRRHs interfere with the SH link.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfererPolicy {
    #[default]
    AllErrhs,
    Subset(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannelParams")]
pub struct ChannelParams {
    /// Path-loss exponent.
    pub alpha: f64,
    /// Path loss at the 1 m reference distance.
    pub beta0: f64,
    /// SIR threshold, linear scale.
    pub gamma_bar: f64,
    /// Transmit power in mW.
    pub p_t: f64,
    /// Cache-hit success probability of the SH.
    pub p_c: f64,
    pub interferers: InterfererPolicy,
}

/// Accepts the threshold either linearly (`gamma_bar`) or in dB
/// (`gamma_bar_db`), not both.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelParams {
    #[serde(default = "defaults::alpha")]
    alpha: f64,
    #[serde(default = "defaults::beta0")]
    beta0: f64,
    gamma_bar: Option<f64>,
    gamma_bar_db: Option<f64>,
    #[serde(default = "defaults::p_t")]
    p_t: f64,
    #[serde(default = "defaults::p_c")]
    p_c: f64,
    #[serde(default)]
    interferers: InterfererPolicy,
}

mod defaults {
    pub fn alpha() -> f64 {
        3.0
    }
    pub fn beta0() -> f64 {
        1e-6
    }
    pub fn gamma_bar_db() -> f64 {
        5.0
    }
    pub fn p_t() -> f64 {
        10.0
    }
    pub fn p_c() -> f64 {
        0.3
    }
}

impl TryFrom<RawChannelParams> for ChannelParams {
    type Error = crate::Error;

    fn try_from(raw: RawChannelParams) -> Result<Self> {
        let gamma_bar = match (raw.gamma_bar, raw.gamma_bar_db) {
            (Some(_), Some(_)) => {
                return Err(invalid("give either gamma_bar or gamma_bar_db, not both"))
            }
            (Some(linear), None) => linear,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => db_to_linear(defaults::gamma_bar_db()),
        };
        let params = ChannelParams {
            alpha: raw.alpha,
            beta0: raw.beta0,
            gamma_bar,
            p_t: raw.p_t,
            p_c: raw.p_c,
            interferers: raw.interferers,
        };
        params.validate()?;
        Ok(params)
    }
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            alpha: defaults::alpha(),
            beta0: defaults::beta0(),
            gamma_bar: db_to_linear(defaults::gamma_bar_db()),
            p_t: defaults::p_t(),
            p_c: defaults::p_c(),
            interferers: InterfererPolicy::AllErrhs,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(invalid(format!("path-loss exponent {} must exceed 2", self.alpha)));
        }
        if !(self.beta0 > 0.0) || !(self.gamma_bar > 0.0) || !(self.p_t > 0.0) {
            return Err(invalid("beta0, gamma_bar and p_t must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p_c) {
            return Err(invalid(format!("p_c = {} is not a probability", self.p_c)));
        }
        Ok(())
    }

    pub fn with_gamma_bar(&self, gamma_bar: f64) -> Self {
        Self { gamma_bar, ..self.clone() }
    }

    /// The interfering subset of `errhs` under the configured policy.
    pub fn select_interferers(&self, errhs: &[Point2D]) -> Result<Vec<Point2D>> {
        match &self.interferers {
            InterfererPolicy::AllErrhs => Ok(errhs.to_vec()),
            InterfererPolicy::Subset(indices) => indices
                .iter()
                .map(|&i| {
                    errhs
                        .get(i)
                        .copied()
                        .ok_or_else(|| invalid(format!("interferer index {i} out of range")))
                })
                .collect(),
        }
    }

    /// Mean power gain `beta0 / d^alpha` at `distance_km`.
    pub fn mean_gain(&self, distance_km: f64) -> f64 {
        self.beta0 / (distance_km * 1e3).powf(self.alpha)
    }
}

/// One Rayleigh-faded channel draw `sqrt(beta0 / d^alpha) * h`, `h ~ CN(0, 1)`.
pub fn channel_gain<R: Rng + ?Sized>(
    from: &Point2D,
    to: &Point2D,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Complex64> {
    let d = from.distance(to);
    if d == 0.0 {
        return Err(invalid("channel endpoints coincide"));
    }
    let scale = params.mean_gain(d).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Ok(Complex64::new(re * scale, im * scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociationMode {
    /// Associate by mean SIR, i.e. to the nearest eRRH.
    #[default]
    Expectation,
    /// Associate by one Rayleigh fading snapshot.
    Instantaneous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationResult {
    /// Serving eRRH of each user.
    pub assignment: Vec<usize>,
    /// Users served by each eRRH.
    pub loads: Vec<usize>,
}

/// Assigns every user to its maximum-SIR eRRH (lowest index on ties).
///
/// With all other eRRHs interfering, `SIR_r = S_r / (S_total - S_r)` is
/// increasing in the received power `S_r`, so the argmax is taken over
/// received power.
pub fn associate_users<R: Rng + ?Sized>(
    scene: &Scene,
    params: &ChannelParams,
    mode: AssociationMode,
    rng: &mut R,
) -> Result<AssociationResult> {
    if scene.errhs.is_empty() {
        return Err(invalid("association needs at least one eRRH"));
    }
    let mut loads = vec![0usize; scene.errhs.len()];
    let assignment: Vec<usize> = scene
        .users
        .iter()
        .map(|u| {
            let r = match mode {
                AssociationMode::Expectation => nearest_index(&scene.errhs, u),
                AssociationMode::Instantaneous => {
                    let mut best = 0;
                    let mut best_power = f64::NEG_INFINITY;
                    for (i, e) in scene.errhs.iter().enumerate() {
                        let fade: f64 = Exp1.sample(rng);
                        let power = fade / e.distance_sq(u).powf(0.5 * params.alpha);
                        if power > best_power {
                            best_power = power;
                            best = i;
                        }
                    }
                    best
                }
            };
            loads[r] += 1;
            r
        })
        .collect();
    Ok(AssociationResult { assignment, loads })
}

/// `Π_r 1 / (1 + γ̄ (d_S / d_r)^α)`: the probability that the SH reaches a
/// user at `user` above the SIR threshold.
pub fn coverage_factor(
    sh: &Point2D,
    user: &Point2D,
    interferers: &[Point2D],
    params: &ChannelParams,
) -> Result<f64> {
    let d_s2 = sh.distance_sq(user);
    if d_s2 == 0.0 {
        return Err(invalid("user coincides with the SH"));
    }
    let mut product = 1.0;
    for r in interferers {
        let d_r2 = r.distance_sq(user);
        if d_r2 == 0.0 {
            return Err(invalid("user coincides with an interfering eRRH"));
        }
        product /= 1.0 + params.gamma_bar * (d_s2 / d_r2).powf(0.5 * params.alpha);
    }
    Ok(product)
}

/// Closed-form SH outage probability of a user under Rayleigh fading.
pub fn outage_closed_form(
    sh: &Point2D,
    user: &Point2D,
    errhs: &[Point2D],
    params: &ChannelParams,
) -> Result<f64> {
    let interferers = params.select_interferers(errhs)?;
    Ok(1.0 - coverage_factor(sh, user, &interferers, params)?)
}

/// Empirical SH outage probability over `n_samples` fading draws.
pub fn outage_monte_carlo<R: Rng + ?Sized>(
    sh: &Point2D,
    user: &Point2D,
    errhs: &[Point2D],
    params: &ChannelParams,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(invalid("monte carlo outage needs at least one sample"));
    }
    let interferers = params.select_interferers(errhs)?;
    let d_s2 = sh.distance_sq(user);
    if d_s2 == 0.0 {
        return Err(invalid("user coincides with the SH"));
    }
    // Interference terms relative to the SH link's path loss.
    let mut ratios = Vec::with_capacity(interferers.len());
    for r in &interferers {
        let d_r2 = r.distance_sq(user);
        if d_r2 == 0.0 {
            return Err(invalid("user coincides with an interfering eRRH"));
        }
        ratios.push(params.gamma_bar * (d_s2 / d_r2).powf(0.5 * params.alpha));
    }
    let mut outages = 0usize;
    for _ in 0..n_samples {
        let signal: f64 = Exp1.sample(rng);
        let threshold: f64 = ratios
            .iter()
            .map(|k| {
                let fade: f64 = Exp1.sample(rng);
                k * fade
            })
            .sum();
        if signal <= threshold {
            outages += 1;
        }
    }
    Ok(outages as f64 / n_samples as f64)
}

/// Mean-SIR dominance of one grid cell: the strongest eRRH and its SIR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub errh: usize,
    pub sir: f64,
}

/// Caps the SIR of cells that coincide with an eRRH or have no interferer.
pub const MAX_DOMINANCE_SIR: f64 = 1e12;

/// Mean-SIR dominance profile over the cells of `grid`.
pub fn mean_sir_dominance(
    grid: &GridSpec,
    errhs: &[Point2D],
    params: &ChannelParams,
) -> Result<Vec<Dominance>> {
    if errhs.is_empty() {
        return Err(invalid("dominance profile needs at least one eRRH"));
    }
    let half_alpha = 0.5 * params.alpha;
    Ok(grid
        .centers()
        .map(|c| {
            let errh = nearest_index(errhs, &c);
            let d_best2 = errhs[errh].distance_sq(&c);
            let interference: f64 = errhs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != errh)
                .map(|(_, e)| (d_best2 / e.distance_sq(&c)).powf(half_alpha))
                .sum();
            let sir = if d_best2 == 0.0 || interference == 0.0 {
                MAX_DOMINANCE_SIR
            } else {
                (1.0 / interference).min(MAX_DOMINANCE_SIR)
            };
            Dominance { errh, sir }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn db_conversion() {
        assert!((db_to_linear(5.0) - 3.16228).abs() < 1e-5);
        assert_eq!(db_to_linear(0.0), 1.0);
    }

    #[test]
    fn params_json_accepts_db() {
        let p: ChannelParams = serde_json::from_str(r#"{"gamma_bar_db": 10}"#).unwrap();
        assert!((p.gamma_bar - 10.0).abs() < 1e-12);
        assert_eq!(p.alpha, 3.0);
        let both = r#"{"gamma_bar_db": 10, "gamma_bar": 2}"#;
        assert!(serde_json::from_str::<ChannelParams>(both).is_err());
        assert!(serde_json::from_str::<ChannelParams>(r#"{"alpha": 2}"#).is_err());
        let subset: ChannelParams =
            serde_json::from_str(r#"{"interferers": {"subset": [0, 2]}}"#).unwrap();
        assert_eq!(subset.interferers, InterfererPolicy::Subset(vec![0, 2]));
    }

    #[test]
    fn params_round_trip_through_json() {
        let p = ChannelParams::default();
        let back: ChannelParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn coincident_points_rejected() {
        let p = ChannelParams::default();
        let a = Point2D::new(1.0, 1.0);
        let mut rng = seeded(0);
        assert!(channel_gain(&a, &a, &p, &mut rng).is_err());
        assert!(outage_closed_form(&a, &a, &[Point2D::new(2.0, 2.0)], &p).is_err());
        assert!(outage_closed_form(&Point2D::new(3.0, 3.0), &a, &[a], &p).is_err());
        assert!(outage_monte_carlo(&a, &Point2D::new(2.0, 1.0), &[], &p, 0, &mut rng).is_err());
    }

    #[test]
    fn equal_distance_single_interferer_at_zero_db() {
        let p = ChannelParams::default().with_gamma_bar(1.0);
        let user = Point2D::new(0.0, 0.0);
        let out =
            outage_closed_form(&Point2D::new(1.0, 0.0), &user, &[Point2D::new(0.0, 1.0)], &p)
                .unwrap();
        assert!((out - 0.5).abs() < 1e-15);
    }

    #[test]
    fn outage_vanishes_as_sh_approaches_user() {
        let p = ChannelParams::default();
        let user = Point2D::new(1.0, 1.0);
        let errhs = [Point2D::new(2.0, 1.0), Point2D::new(1.0, 3.0)];
        let out = outage_closed_form(&Point2D::new(1.0 + 1e-6, 1.0), &user, &errhs, &p).unwrap();
        assert!(out < 1e-15);
    }

    #[test]
    fn outage_monotone_in_distance_and_threshold() {
        let p = ChannelParams::default();
        let user = Point2D::new(0.0, 0.0);
        let errhs = [Point2D::new(1.0, 0.5), Point2D::new(-0.7, 1.2)];
        let mut last = 0.0;
        for k in 1..20 {
            let sh = Point2D::new(0.1 * k as f64, -0.05 * k as f64);
            let out = outage_closed_form(&sh, &user, &errhs, &p).unwrap();
            assert!(out > last && (0.0..=1.0).contains(&out));
            last = out;
        }
        let sh = Point2D::new(0.4, 0.0);
        let lo = outage_closed_form(&sh, &user, &errhs, &p.with_gamma_bar(1.0)).unwrap();
        let hi = outage_closed_form(&sh, &user, &errhs, &p.with_gamma_bar(10.0)).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn monte_carlo_threshold_limits() {
        let user = Point2D::new(0.0, 0.0);
        let sh = Point2D::new(0.5, 0.0);
        let errhs = [Point2D::new(1.0, 0.0)];
        let mut rng = seeded(4);
        let low = ChannelParams::default().with_gamma_bar(1e-12);
        let high = ChannelParams::default().with_gamma_bar(1e12);
        assert_eq!(outage_monte_carlo(&sh, &user, &errhs, &low, 10_000, &mut rng).unwrap(), 0.0);
        assert_eq!(outage_monte_carlo(&sh, &user, &errhs, &high, 10_000, &mut rng).unwrap(), 1.0);
    }

    #[test]
    fn subset_policy_limits_interference() {
        let errhs = [Point2D::new(1.0, 0.0), Point2D::new(0.0, 1.0)];
        let sh = Point2D::new(0.5, 0.5);
        let user = Point2D::new(0.0, 0.0);
        let all = ChannelParams::default();
        let one = ChannelParams { interferers: InterfererPolicy::Subset(vec![1]), ..all.clone() };
        let bad = ChannelParams { interferers: InterfererPolicy::Subset(vec![5]), ..all.clone() };
        let a = outage_closed_form(&sh, &user, &errhs, &all).unwrap();
        let b = outage_closed_form(&sh, &user, &errhs, &one).unwrap();
        assert!(b < a);
        assert!(outage_closed_form(&sh, &user, &errhs, &bad).is_err());
    }

    fn scene_with(errhs: Vec<Point2D>, users: Vec<Point2D>) -> Scene {
        Scene {
            region: crate::Region::square(5.0).unwrap(),
            errhs,
            users,
            clusters: vec![],
            lambda_u: 0.0,
            lambda_r: 0.0,
            lambda_c: 0.0,
            seed: None,
        }
    }

    #[test]
    fn single_errh_takes_everyone() {
        let users: Vec<_> = (0..7).map(|i| Point2D::new(i as f64 * 0.5, 1.0)).collect();
        let scene = scene_with(vec![Point2D::new(2.0, 2.0)], users);
        let mut rng = seeded(2);
        for mode in [AssociationMode::Expectation, AssociationMode::Instantaneous] {
            let a = associate_users(&scene, &ChannelParams::default(), mode, &mut rng).unwrap();
            assert_eq!(a.loads, vec![7]);
        }
    }

    #[test]
    fn equidistant_user_goes_to_lowest_index() {
        let scene = scene_with(
            vec![Point2D::new(1.0, 1.0), Point2D::new(3.0, 1.0)],
            vec![Point2D::new(2.0, 1.0)],
        );
        let mut rng = seeded(2);
        let a = associate_users(
            &scene,
            &ChannelParams::default(),
            AssociationMode::Expectation,
            &mut rng,
        )
        .unwrap();
        assert_eq!(a.assignment, vec![0]);
        assert_eq!(a.loads, vec![1, 0]);
    }

    #[test]
    fn dominance_picks_nearest() {
        let grid = GridSpec::new(crate::Region::square(2.0).unwrap(), 2, 1).unwrap();
        let errhs = [Point2D::new(0.5, 1.0), Point2D::new(1.5, 1.0)];
        let d = mean_sir_dominance(&grid, &errhs, &ChannelParams::default()).unwrap();
        assert_eq!(d[0].errh, 0);
        assert_eq!(d[1].errh, 1);
        assert_eq!(d[0].sir, MAX_DOMINANCE_SIR);
    }
}
