//! Linear homotopies on the Bombieri–Weyl unit sphere and the two path
//! trackers: the certified tracker with its condition-based step rule, and an
//! adaptive predictor-corrector baseline.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::vec_norm;
use crate::poly::{PolySystem, C64};
use crate::projective::{sqrt_degrees, ProjectivePoint, StackedInverse};

/// Numerator of the certified step-size rule.
pub const STEP_CONSTANT: f64 = 0.04804448;

/// Constant of the step-count bound `ceil(71 d^{3/2} C_0)`.
pub const COMPLEXITY_CONSTANT: f64 = 71.0;

const UNIT_TOL: f64 = 1e-10;
const DEGENERATE_TOL: f64 = 1e-12;

/// Great-circle arc `h_t = g cos t + w sin t`, `t in [0, T]`, from the start
/// system `g` to the target `f`.
#[derive(Clone, Debug)]
pub struct GeodesicHomotopy {
    target: PolySystem,
    start: PolySystem,
    tangent: PolySystem,
    arc_length: f64,
    start_norm_sqr: f64,
    tangent_norm_sqr: f64,
    re_start_tangent: f64,
}

impl GeodesicHomotopy {
    pub fn new(target: &PolySystem, start: &PolySystem) -> Result<Self> {
        for sys in [target, start] {
            let nrm = sys.bw_norm();
            if (nrm - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit(nrm));
            }
        }
        let re_fg = target.bw_inner(start)?.re;
        if re_fg.abs() >= 1.0 - DEGENERATE_TOL {
            return Err(Error::DegenerateHomotopy(re_fg));
        }
        let tangent = target
            .lin_comb(C64::new(1.0, 0.0), start, C64::new(-re_fg, 0.0))?
            .scale(C64::new(1.0 / (1.0 - re_fg * re_fg).sqrt(), 0.0));
        let start_norm_sqr = start.bw_norm().powi(2);
        let tangent_norm_sqr = tangent.bw_norm().powi(2);
        let re_start_tangent = start.bw_inner(&tangent)?.re;
        Ok(GeodesicHomotopy {
            target: target.clone(),
            start: start.clone(),
            tangent,
            arc_length: re_fg.acos(),
            start_norm_sqr,
            tangent_norm_sqr,
            re_start_tangent,
        })
    }

    pub fn target(&self) -> &PolySystem {
        &self.target
    }

    pub fn start(&self) -> &PolySystem {
        &self.start
    }

    pub fn tangent(&self) -> &PolySystem {
        &self.tangent
    }

    /// Arc length `T = arccos Re<f, g>`.
    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    pub fn max_degree(&self) -> u32 {
        self.start.degrees().max_degree()
    }

    fn check_param(&self, t: f64) -> Result<()> {
        if !(0.0..=self.arc_length).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                end: self.arc_length,
            });
        }
        Ok(())
    }

    /// `h_t`.
    pub fn at(&self, t: f64) -> Result<PolySystem> {
        self.check_param(t)?;
        self.start.lin_comb(
            C64::new(t.cos(), 0.0),
            &self.tangent,
            C64::new(t.sin(), 0.0),
        )
    }

    /// `dh_t/dt = -g sin t + w cos t`.
    pub fn derivative_at(&self, t: f64) -> Result<PolySystem> {
        self.check_param(t)?;
        self.start.lin_comb(
            C64::new(-t.sin(), 0.0),
            &self.tangent,
            C64::new(t.cos(), 0.0),
        )
    }

    /// `||h_t||`, from cached Gram entries.
    pub fn norm_at(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (c * c * self.start_norm_sqr
            + s * s * self.tangent_norm_sqr
            + 2.0 * s * c * self.re_start_tangent)
            .max(0.0)
            .sqrt()
    }

    /// `||dh_t/dt||`, from cached Gram entries.
    pub fn velocity_norm(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (s * s * self.start_norm_sqr + c * c * self.tangent_norm_sqr
            - 2.0 * s * c * self.re_start_tangent)
            .max(0.0)
            .sqrt()
    }

    /// `h_t(z)`, `Dh_t(z)` and `(dh_t/dt)(z)` without forming `h_t`.
    fn eval(&self, t: f64, z: &[C64]) -> Result<PointEval> {
        let (s, c) = t.sin_cos();
        let (gv, gj) = self.start.eval_jacobian(z)?;
        let (wv, wj) = self.tangent.eval_jacobian(z)?;
        let values = gv.iter().zip(&wv).map(|(a, b)| a * c + b * s).collect();
        let velocity = gv.iter().zip(&wv).map(|(a, b)| b * c - a * s).collect();
        let jacobian = gj * C64::new(c, 0.0) + wj * C64::new(s, 0.0);
        Ok(PointEval {
            values,
            jacobian,
            velocity,
        })
    }

    /// Condition number and speed `sqrt(||dh||^2 + ||dzeta||^2)` at a path
    /// node, with `dzeta = -(Dh|_{z^perp})^{-1} dh(z)`.
    pub fn node_profile(&self, t: f64, z: &ProjectivePoint) -> Result<NodeProfile> {
        self.check_param(t)?;
        let ev = self.eval(t, z.coords())?;
        let weights = sqrt_degrees(&self.start);
        match StackedInverse::new(&ev.jacobian, z.coords()) {
            Ok(inv) => {
                let mu = self.norm_at(t) * inv.restricted_norm(&weights);
                let zdot = vec_norm(&inv.solve(&ev.velocity));
                let speed = (self.velocity_norm(t).powi(2) + zdot * zdot).sqrt();
                Ok(NodeProfile { s: t, mu, speed })
            }
            Err(Error::Singular(_)) => Ok(NodeProfile {
                s: t,
                mu: f64::INFINITY,
                speed: f64::INFINITY,
            }),
            Err(e) => Err(e),
        }
    }
}

pub fn make_linear_homotopy(target: &PolySystem, start: &PolySystem) -> Result<GeodesicHomotopy> {
    GeodesicHomotopy::new(target, start)
}

struct PointEval {
    values: Vec<C64>,
    jacobian: DMatrix<C64>,
    velocity: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeProfile {
    pub s: f64,
    pub mu: f64,
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackStatus {
    Converged,
    SingularFailure,
    StepUnderflow,
    /// The run hit its configured step budget.
    StepLimit,
}

/// Parameter value and iterate at the start of a step (plus the final node).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub s: f64,
    pub point: ProjectivePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackResult {
    pub endpoint: ProjectivePoint,
    pub num_steps: usize,
    /// Accepted parameter increments.
    pub step_sizes: Vec<f64>,
    /// `phi_i = chi_{i,1} chi_{i,2}` per certified step (empty for the heuristic).
    pub phi_trace: Vec<f64>,
    pub c0_estimate: Option<f64>,
    pub status: TrackStatus,
    /// Empty when trace retention is disabled.
    pub nodes: Vec<TraceNode>,
    pub arc_length: f64,
}

impl TrackResult {
    pub fn converged(&self) -> bool {
        self.status == TrackStatus::Converged
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedOptions {
    pub retain_trace: bool,
    /// Fraction of the maximal admissible step, in `[0.5, 1]`.
    pub step_fraction: f64,
    pub max_steps: usize,
}

impl Default for CertifiedOptions {
    fn default() -> Self {
        CertifiedOptions {
            retain_trace: true,
            step_fraction: 1.0,
            max_steps: 10_000_000,
        }
    }
}

impl CertifiedOptions {
    pub fn without_trace() -> Self {
        CertifiedOptions {
            retain_trace: false,
            ..Default::default()
        }
    }
}

fn check_start_point(h: &GeodesicHomotopy, z0: &ProjectivePoint) -> Result<()> {
    if z0.dim() != h.start.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: h.start.num_vars(),
            actual: z0.dim(),
        });
    }
    Ok(())
}

/// Certified tracking of the path through `z0` along `h`.
///
/// Each step takes `t_i = f * 0.04804448 / (d^{3/2} phi_i)` (`f` the step
/// fraction), truncated at the end of the arc, followed by one projective
/// Newton step at `h_{s_i + t_i}`.
pub fn track_certified(
    h: &GeodesicHomotopy,
    z0: &ProjectivePoint,
    opts: &CertifiedOptions,
) -> Result<TrackResult> {
    check_start_point(h, z0)?;
    if !(0.5..=1.0).contains(&opts.step_fraction) {
        return Err(Error::InvalidConfig(format!(
            "step fraction {} outside [0.5, 1]",
            opts.step_fraction
        )));
    }
    let big_t = h.arc_length;
    let d32 = (h.max_degree() as f64).powf(1.5);
    let weights = sqrt_degrees(&h.start);

    let mut s = 0.0;
    let mut z = z0.clone();
    let mut step_sizes = Vec::new();
    let mut phi_trace = Vec::new();
    let mut nodes = Vec::new();
    let mut status = TrackStatus::Converged;

    while s < big_t {
        if step_sizes.len() >= opts.max_steps {
            status = TrackStatus::StepLimit;
            break;
        }
        let ev = h.eval(s, z.coords())?;
        let inv = match StackedInverse::new(&ev.jacobian, z.coords()) {
            Ok(inv) => inv,
            Err(Error::Singular(_)) => {
                status = TrackStatus::SingularFailure;
                break;
            }
            Err(e) => return Err(e),
        };
        let chi1 = inv.full_norm(&weights, 1.0);
        let zdot = vec_norm(&inv.solve(&ev.velocity));
        let chi2 = (h.velocity_norm(s).powi(2) + zdot * zdot).sqrt();
        let phi = chi1 * chi2;

        let mut t = opts.step_fraction * STEP_CONSTANT / (d32 * phi);
        let last = t >= big_t - s;
        if last {
            t = big_t - s;
        } else if t.is_nan() || t < 1e-12 * big_t {
            status = TrackStatus::StepUnderflow;
            break;
        }
        if opts.retain_trace {
            nodes.push(TraceNode {
                s,
                point: z.clone(),
            });
        }
        let next_s = if last { big_t } else { s + t };

        let ev = h.eval(next_s, z.coords())?;
        let inv = match StackedInverse::new(&ev.jacobian, z.coords()) {
            Ok(inv) => inv,
            Err(Error::Singular(_)) => {
                status = TrackStatus::SingularFailure;
                break;
            }
            Err(e) => return Err(e),
        };
        let y = inv.solve(&ev.values);
        let next: Vec<C64> = z.coords().iter().zip(&y).map(|(a, b)| a - b).collect();
        z = match ProjectivePoint::new(next) {
            Ok(p) => p,
            Err(_) => {
                status = TrackStatus::SingularFailure;
                break;
            }
        };
        step_sizes.push(t);
        phi_trace.push(phi);
        s = next_s;
    }
    if status == TrackStatus::Converged && opts.retain_trace {
        nodes.push(TraceNode {
            s: big_t,
            point: z.clone(),
        });
    }
    Ok(TrackResult {
        endpoint: z,
        num_steps: step_sizes.len(),
        step_sizes,
        phi_trace,
        c0_estimate: None,
        status,
        nodes,
        arc_length: big_t,
    })
}

/// Settings of the adaptive predictor-corrector baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicSettings {
    pub initial_step: f64,
    pub min_step: f64,
    pub corrector_tolerance: f64,
    pub max_corrector_iters: usize,
    pub step_expand: f64,
    pub step_shrink: f64,
    pub retain_trace: bool,
}

impl HeuristicSettings {
    /// Defaults for an arc of length `arc_length`.
    pub fn for_arc_length(arc_length: f64) -> Self {
        HeuristicSettings {
            initial_step: arc_length / 100.0,
            min_step: 1e-8,
            corrector_tolerance: 1e-8,
            max_corrector_iters: 3,
            step_expand: 1.5,
            step_shrink: 0.5,
            retain_trace: false,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.corrector_tolerance = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            self.initial_step,
            self.min_step,
            self.corrector_tolerance,
            self.step_expand,
            self.step_shrink,
        ]
        .iter()
        .all(|&x| x > 0.0 && x.is_finite());
        if !positive
            || self.max_corrector_iters == 0
            || self.min_step >= self.initial_step
            || self.step_expand <= 1.0
            || self.step_shrink >= 1.0
        {
            return Err(Error::InvalidConfig(format!("heuristic settings {self:?}")));
        }
        Ok(())
    }
}

/// Euler predictor, Newton corrector, multiplicative step control.
///
/// Every linear solve counts as one step: one per predictor and one per
/// corrector iteration, rejected attempts included.
pub fn track_heuristic(
    h: &GeodesicHomotopy,
    z0: &ProjectivePoint,
    settings: &HeuristicSettings,
) -> Result<TrackResult> {
    check_start_point(h, z0)?;
    settings.validate()?;
    let big_t = h.arc_length;
    let mut s = 0.0;
    let mut z = z0.clone();
    let mut dt = settings.initial_step;
    let mut num_steps = 0usize;
    let mut step_sizes = Vec::new();
    let mut nodes = Vec::new();
    let mut status = TrackStatus::Converged;

    while s < big_t {
        let remaining = big_t - s;
        let last = dt >= remaining;
        let step = if last { remaining } else { dt };

        let ev = h.eval(s, z.coords())?;
        let inv = match StackedInverse::new(&ev.jacobian, z.coords()) {
            Ok(inv) => inv,
            Err(Error::Singular(_)) => {
                status = TrackStatus::SingularFailure;
                break;
            }
            Err(e) => return Err(e),
        };
        num_steps += 1;
        let zdot = inv.solve(&ev.velocity);
        let predicted: Vec<C64> = z
            .coords()
            .iter()
            .zip(&zdot)
            .map(|(a, b)| a - b * step)
            .collect();
        let next_s = if last { big_t } else { s + step };

        let mut candidate = ProjectivePoint::new(predicted).ok();
        let mut accepted = false;
        for _ in 0..settings.max_corrector_iters {
            let Some(cur) = candidate.take() else { break };
            num_steps += 1;
            let ev = h.eval(next_s, cur.coords())?;
            let Ok(inv) = StackedInverse::new(&ev.jacobian, cur.coords()) else {
                break;
            };
            let y = inv.solve(&ev.values);
            let next: Vec<C64> = cur.coords().iter().zip(&y).map(|(a, b)| a - b).collect();
            candidate = ProjectivePoint::new(next).ok();
            if vec_norm(&y) <= settings.corrector_tolerance && candidate.is_some() {
                accepted = true;
                break;
            }
        }

        if accepted {
            if settings.retain_trace {
                nodes.push(TraceNode {
                    s,
                    point: z.clone(),
                });
            }
            z = candidate.expect("accepted corrector yields a point");
            step_sizes.push(step);
            s = next_s;
            dt *= settings.step_expand;
        } else {
            dt = step * settings.step_shrink;
            if dt < settings.min_step {
                status = TrackStatus::StepUnderflow;
                break;
            }
        }
    }
    if status == TrackStatus::Converged && settings.retain_trace {
        nodes.push(TraceNode {
            s: big_t,
            point: z.clone(),
        });
    }
    Ok(TrackResult {
        endpoint: z,
        num_steps,
        step_sizes,
        phi_trace: Vec::new(),
        c0_estimate: None,
        status,
        nodes,
        arc_length: big_t,
    })
}

/// Condition number and speed at each retained node of a converged run.
pub fn condition_profile(result: &TrackResult, h: &GeodesicHomotopy) -> Result<Vec<NodeProfile>> {
    if !result.converged() {
        return Err(Error::TrackingFailed(format!(
            "path length needs a converged run, status is {:?}",
            result.status
        )));
    }
    if result.nodes.len() < 2 {
        return Err(Error::TrackingFailed("run retained no trace".into()));
    }
    result
        .nodes
        .iter()
        .map(|node| h.node_profile(node.s, &node.point))
        .collect()
}

/// Trapezoidal estimate of the condition-metric length
/// `C_0 = int_0^T mu(h_t, zeta_t) ||(dh_t, dzeta_t)|| dt` over the retained
/// nodes; stored into `result.c0_estimate`.
pub fn path_length_c0(result: &mut TrackResult, h: &GeodesicHomotopy) -> Result<f64> {
    let profile = condition_profile(result, h)?;
    let c0 = profile
        .windows(2)
        .map(|w| 0.5 * (w[1].s - w[0].s) * (w[0].mu * w[0].speed + w[1].mu * w[1].speed))
        .sum();
    result.c0_estimate = Some(c0);
    Ok(c0)
}

/// `ceil(71 d^{3/2} C_0)`.
pub fn complexity_bound(max_degree: u32, c0: f64) -> f64 {
    (COMPLEXITY_CONSTANT * (max_degree as f64).powf(1.5) * c0).ceil()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{DegreeVector, HomoPoly};
    use crate::projective::{newton_refine, residual, riemann_distance};
    use crate::rng::stream;
    use crate::start::{random_initial_pair, sample_sphere, total_degree};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn deg(v: &[u32]) -> DegreeVector {
        DegreeVector::new(v.to_vec()).unwrap()
    }

    fn random_homotopy(degrees: &[u32], seed: u64) -> (GeodesicHomotopy, ProjectivePoint) {
        let d = deg(degrees);
        let mut rng = stream(seed, 0, 0);
        let pair = random_initial_pair(&d, &mut rng).unwrap();
        let f = sample_sphere(&d, &mut rng);
        (
            GeodesicHomotopy::new(&f, &pair.system).unwrap(),
            pair.starts[0].clone(),
        )
    }

    #[test]
    fn orthogonal_pair_has_quarter_arc() {
        let g = PolySystem::new(vec![
            HomoPoly::from_terms(2, 2, [(vec![2, 0], r(1.0))]).unwrap()
        ])
        .unwrap();
        let f = PolySystem::new(vec![
            HomoPoly::from_terms(2, 2, [(vec![0, 2], r(1.0))]).unwrap()
        ])
        .unwrap();
        let h = make_linear_homotopy(&f, &g).unwrap();
        assert!((h.arc_length() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(h.at(0.0).unwrap().max_coeff_diff(&g).unwrap() == 0.0);
        assert!(
            h.derivative_at(0.0)
                .unwrap()
                .max_coeff_diff(h.tangent())
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn degenerate_and_invalid_homotopies_are_rejected() {
        let g = total_degree(&deg(&[2]), 1.0).system;
        assert!(matches!(
            GeodesicHomotopy::new(&g, &g),
            Err(Error::DegenerateHomotopy(_))
        ));
        let neg = g.scale(r(-1.0));
        assert!(matches!(
            GeodesicHomotopy::new(&neg, &g),
            Err(Error::DegenerateHomotopy(_))
        ));
        assert!(matches!(
            GeodesicHomotopy::new(&g.scale(r(2.0)), &g),
            Err(Error::NotUnit(_))
        ));
        let (h, _) = random_homotopy(&[2], 1);
        assert!(h.at(-0.1).is_err());
        assert!(h.derivative_at(h.arc_length() + 0.1).is_err());
    }

    #[test]
    fn great_circle_properties() {
        for seed in 0..10 {
            let (h, _) = random_homotopy(&[2, 3], seed);
            let big_t = h.arc_length();
            assert!(big_t > 0.0 && big_t < std::f64::consts::PI);
            assert!((h.start().bw_inner(h.tangent()).unwrap().re).abs() < 1e-12);
            assert!((h.tangent().bw_norm() - 1.0).abs() < 1e-12);
            assert!(h.at(big_t).unwrap().max_coeff_diff(h.target()).unwrap() < 1e-12);
            assert!(h.at(0.0).unwrap().max_coeff_diff(h.start()).unwrap() == 0.0);
            for t in [0.0, big_t / 3.0, big_t / 2.0, big_t] {
                let ht = h.at(t).unwrap();
                let dt = h.derivative_at(t).unwrap();
                assert!((ht.bw_norm() - 1.0).abs() < 1e-12);
                assert!((dt.bw_norm() - 1.0).abs() < 1e-12);
                assert!((h.velocity_norm(t) - 1.0).abs() < 1e-12);
                assert!(ht.bw_inner(&dt).unwrap().re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn certified_step_rule_and_arc_sum() {
        for seed in 0..5 {
            let (h, z0) = random_homotopy(&[2, 2], seed);
            let res = track_certified(&h, &z0, &CertifiedOptions::default()).unwrap();
            assert!(res.converged());
            let d32 = 2f64.powf(1.5);
            let n = res.num_steps;
            assert_eq!(n, res.step_sizes.len());
            for i in 0..n - 1 {
                let lhs = res.step_sizes[i] * d32 * res.phi_trace[i];
                assert!((lhs - STEP_CONSTANT).abs() < 1e-12);
            }
            let last_max = STEP_CONSTANT / (d32 * res.phi_trace[n - 1]);
            assert!(res.step_sizes[n - 1] <= last_max);
            let total: f64 = res.step_sizes.iter().sum();
            assert!((total - h.arc_length()).abs() < 1e-12);
            assert_eq!(res.nodes.len(), n + 1);
            for node in &res.nodes {
                assert!((h.velocity_norm(node.s) - 1.0).abs() < 1e-10);
            }
            let res_end = residual(h.target(), &res.endpoint).unwrap();
            assert!(res_end < 1e-4, "seed {seed} residual {res_end} steps {n}");
        }
    }

    #[test]
    fn certified_endpoint_refines_quadratically() {
        let (h, z0) = random_homotopy(&[2, 2], 42);
        let res = track_certified(&h, &z0, &CertifiedOptions::default()).unwrap();
        let trace = newton_refine(h.target(), &res.endpoint, 3).unwrap();
        for w in trace.distances.windows(2) {
            if w[0] <= 1e-3 && w[0] >= 1e-7 {
                assert!(w[1] <= 10.0 * w[0] * w[0], "{:?}", trace.distances);
            }
        }
        assert!(trace.distances[2] < 1e-12);
    }

    #[test]
    fn step_fraction_bounds_are_enforced() {
        let (h, z0) = random_homotopy(&[2], 3);
        let opts = CertifiedOptions {
            step_fraction: 0.4,
            ..Default::default()
        };
        assert!(track_certified(&h, &z0, &opts).is_err());
        let wrong_dim = ProjectivePoint::basis(0, 3);
        assert!(track_certified(&h, &wrong_dim, &CertifiedOptions::default()).is_err());
    }

    #[test]
    fn half_steps_stay_in_admissible_interval() {
        let (h, z0) = random_homotopy(&[3], 5);
        let opts = CertifiedOptions {
            step_fraction: 0.5,
            ..Default::default()
        };
        let res = track_certified(&h, &z0, &opts).unwrap();
        let d32 = 3f64.powf(1.5);
        for (i, (t, phi)) in res.step_sizes.iter().zip(&res.phi_trace).enumerate() {
            let hi = STEP_CONSTANT / (d32 * phi);
            assert!(*t <= hi * (1.0 + 1e-15));
            if i + 1 < res.num_steps {
                assert!(*t >= 0.5 * hi * (1.0 - 1e-15));
            }
        }
    }

    #[test]
    fn heuristic_is_cheaper_and_agrees() {
        for seed in 0..5 {
            let (h, z0) = random_homotopy(&[2, 2], 100 + seed);
            let cert = track_certified(&h, &z0, &CertifiedOptions::without_trace()).unwrap();
            let heur = track_heuristic(&h, &z0, &HeuristicSettings::for_arc_length(h.arc_length()))
                .unwrap();
            assert!(heur.converged());
            assert!(
                heur.num_steps < cert.num_steps,
                "{} vs {}",
                heur.num_steps,
                cert.num_steps
            );
            let a = newton_refine(h.target(), &cert.endpoint, 3).unwrap();
            let b = newton_refine(h.target(), &heur.endpoint, 3).unwrap();
            assert!(riemann_distance(a.last(), b.last()) <= 1e-6);
        }
    }

    #[test]
    fn tighter_tolerance_never_saves_steps() {
        for seed in 0..10 {
            let (h, z0) = random_homotopy(&[2, 2], 200 + seed);
            let base = HeuristicSettings::for_arc_length(h.arc_length()).with_tolerance(1e-6);
            let loose = track_heuristic(&h, &z0, &base).unwrap();
            let tight = track_heuristic(&h, &z0, &base.with_tolerance(1e-7)).unwrap();
            assert!(tight.num_steps >= loose.num_steps);
        }
    }

    #[test]
    fn invalid_heuristic_settings() {
        let (h, z0) = random_homotopy(&[2], 9);
        let mut s = HeuristicSettings::for_arc_length(h.arc_length());
        s.step_shrink = 1.5;
        assert!(track_heuristic(&h, &z0, &s).is_err());
        let mut s = HeuristicSettings::for_arc_length(h.arc_length());
        s.min_step = 1.0;
        assert!(track_heuristic(&h, &z0, &s).is_err());
    }

    #[test]
    fn c0_bounds_step_count_and_lower_riemann_sum() {
        for seed in 0..5 {
            let (h, z0) = random_homotopy(&[2, 2], 300 + seed);
            let mut res = track_certified(&h, &z0, &CertifiedOptions::default()).unwrap();
            let c0 = path_length_c0(&mut res, &h).unwrap();
            assert_eq!(res.c0_estimate, Some(c0));
            assert!(res.num_steps as f64 <= 1.10 * complexity_bound(h.max_degree(), c0));
            let profile = condition_profile(&res, &h).unwrap();
            let min = profile
                .iter()
                .map(|p| p.mu * p.speed)
                .fold(f64::INFINITY, f64::min);
            assert!(c0 >= h.arc_length() * min);
        }
    }

    #[test]
    fn c0_quadrature_converges() {
        let (h, z0) = random_homotopy(&[3], 11);
        let mut coarse = track_certified(&h, &z0, &CertifiedOptions::default()).unwrap();
        let opts = CertifiedOptions {
            step_fraction: 0.5,
            ..Default::default()
        };
        let mut fine = track_certified(&h, &z0, &opts).unwrap();
        let a = path_length_c0(&mut coarse, &h).unwrap();
        let b = path_length_c0(&mut fine, &h).unwrap();
        assert!((a - b).abs() < 0.02 * b, "{a} vs {b}");
    }

    #[test]
    fn c0_requires_trace() {
        let (h, z0) = random_homotopy(&[2], 12);
        let mut res = track_certified(&h, &z0, &CertifiedOptions::without_trace()).unwrap();
        assert!(path_length_c0(&mut res, &h).is_err());
    }
}
