//! Characteristics and gradient blow-up for systems V_t + V₁·V_x = QV.
//!
//! Along a characteristic the solution obeys V′ = QV (linear), and the
//! spatial derivative W = V_x obeys a matrix Riccati equation that
//! linearizes one dimension up: with q the flow-map Jacobian ∂x/∂x₀ and
//! u = q·W, the pair (q, u) satisfies
//!
//! ```text
//! d/dt (q, u) = M (q, u),   M = [ 0  e₁ᵀ ]
//!                               [ 0  Q   ]
//! ```
//!
//! starting from (1, V₀′(x₀)). The derivative V_x = u/q stays finite exactly
//! while q > 0; the first root of q(·; x₀) over all feet x₀ is the blow-up
//! time T*. Everything here reduces to matrix exponentials of M and scalar
//! root scans, so no shock-capturing is ever needed before T*.

mod grid;
mod profile;
mod scan;

pub use grid::{grid_solution, GridSolution, SHOOTING_REFINEMENT};
pub use profile::{InitialProfile, DERIVATIVE_CHECK_PROBES, DERIVATIVE_CHECK_RTOL};
pub use scan::QScan;

use rayon::prelude::*;
use thiserror::Error;

use crate::numkit::{expm, Matrix, NumError, Root};

/// Default smoothness-certification horizon for q-root scans. Closed-form
/// criteria are horizon-free; the generic scan certifies only up to here.
pub const DEFAULT_HORIZON: f64 = 100.0;

/// Default zero tolerance for q-root detection.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

/// Conventional scan resolution: 10⁴ samples across the horizon.
pub fn default_scan_step(t_max: f64) -> f64 {
    t_max / 1e4
}

#[derive(Debug, Error)]
pub enum HyperbolicError {
    #[error("x0 = {x0} lies outside the profile domain [{lo}, {hi}]")]
    OutOfDomain { x0: f64, lo: f64, hi: f64 },
    #[error("system has {expected} components but was given {got}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error(
        "component {component}: claimed derivative {claimed} at x = {x} disagrees with the \
         central difference of the values ({estimated})"
    )]
    InconsistentDerivative { component: usize, x: f64, claimed: f64, estimated: f64 },
    #[error(
        "flow-map factor q = {q} is not positive at x0 = {x0}, t = {t}: the spatial derivative \
         has blown up at or before this time"
    )]
    NonPositiveQ { q: f64, x0: f64, t: f64 },
    #[error(
        "characteristics from x0 = {x0_left} and x0 = {x0_right} cross by t = {t} \
         (positions {x_left} and {x_right}): at or past blow-up, or shooting grid too coarse"
    )]
    CharacteristicsCross { t: f64, x0_left: f64, x0_right: f64, x_left: f64, x_right: f64 },
    #[error(
        "query x = {x} falls outside the characteristic landing range [{lo}, {hi}] \
         of a non-periodic profile"
    )]
    CoverageGap { x: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Numerics(#[from] NumError),
}

/// One member of the studied class: n components, constant source
/// coupling Q, optional constant dissipation B.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub n: usize,
    pub q: Matrix,
    pub b: Option<Matrix>,
    pub label: String,
}

impl SystemSpec {
    pub fn new(
        label: impl Into<String>,
        q: Matrix,
        b: Option<Matrix>,
    ) -> Result<Self, HyperbolicError> {
        if !q.is_square() {
            return Err(HyperbolicError::Numerics(NumError::NotSquare {
                rows: q.rows(),
                cols: q.cols(),
            }));
        }
        let n = q.rows();
        if n == 0 {
            return Err(HyperbolicError::Numerics(NumError::InvalidArgument {
                arg: "q",
                reason: "system needs at least one component".into(),
            }));
        }
        if let Some(b) = &b {
            if b.rows() != n || b.cols() != n {
                return Err(HyperbolicError::Numerics(NumError::DimensionMismatch {
                    context: format!(
                        "dissipation matrix is {}x{} but the coupling is {n}x{n}",
                        b.rows(),
                        b.cols()
                    ),
                }));
            }
        }
        Ok(Self { n, q, b, label: label.into() })
    }
}

/// State carried along one characteristic: position, solution, and the
/// linearized derivative pair (q, u) with V_x = u/q while q > 0.
#[derive(Debug, Clone)]
pub struct CharacteristicState {
    pub t: f64,
    pub x: f64,
    pub v: Vec<f64>,
    pub q: f64,
    pub u: Vec<f64>,
}

impl CharacteristicState {
    /// Spatial derivative V_x = u/q, defined only while q > 0.
    pub fn derivative(&self) -> Option<Vec<f64>> {
        if self.q > 0.0 {
            Some(self.u.iter().map(|u| u / self.q).collect())
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    GloballySmooth,
    BlowsUp,
}

/// Outcome of a q-root scan over a grid of characteristic feet.
#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub verdict: Verdict,
    /// Earliest q-root over the grid (the blow-up time), if any.
    pub t_star: Option<f64>,
    /// Foot x₀ attaining t_star, at grid resolution.
    pub x_star: Option<f64>,
    /// Per-foot first roots in grid order.
    pub per_point: Vec<(f64, Option<Root>)>,
    /// Horizon the scan certified; `GloballySmooth` is relative to it.
    pub horizon: f64,
}

/// Closed-form criterion evaluated on a grid.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    /// Criterion values per grid point; negative everywhere ⇔ smooth.
    pub values: Vec<f64>,
    pub max_value: f64,
    /// Grid point attaining `max_value` (the violating point when ≥ 0).
    pub argmax_x: f64,
    pub verdict: Verdict,
}

/// The (n+1)×(n+1) coefficient matrix of the linearized derivative system:
/// first row (0, 1, 0, …, 0), zero first column below it, Q in the
/// lower-right block.
pub fn augmented_matrix(sys: &SystemSpec) -> Matrix {
    let n = sys.n;
    let mut m = Matrix::zeros(n + 1, n + 1);
    m.set(0, 1, 1.0);
    for i in 0..n {
        for j in 0..n {
            m.set(i + 1, j + 1, sys.q.get(i, j));
        }
    }
    m
}

/// Integrates one characteristic exactly via the matrix exponential:
/// position, solution V(t) = exp(Qt)·V₀(x₀), and derivative pair (q, u).
pub fn characteristic_solve(
    sys: &SystemSpec,
    prof: &InitialProfile,
    x0: f64,
    t: f64,
) -> Result<CharacteristicState, HyperbolicError> {
    if prof.n() != sys.n {
        return Err(HyperbolicError::ComponentMismatch { expected: sys.n, got: prof.n() });
    }
    if !prof.contains(x0) {
        let (lo, hi) = prof.domain();
        return Err(HyperbolicError::OutOfDomain { x0, lo, hi });
    }
    let e = expm(&augmented_matrix(sys), t)?;

    // The same exponential advances both augmented vectors: (0, V₀) picks up
    // the displacement ∫V₁ in its first slot, (1, V₀′) the pair (q, u).
    let mut aug_v = Vec::with_capacity(sys.n + 1);
    aug_v.push(0.0);
    aug_v.extend(prof.value(x0));
    let mut aug_q = Vec::with_capacity(sys.n + 1);
    aug_q.push(1.0);
    aug_q.extend(prof.derivative(x0));

    let moved = e.matvec(&aug_v);
    let jac = e.matvec(&aug_q);
    Ok(CharacteristicState {
        t,
        x: x0 + moved[0],
        v: moved[1..].to_vec(),
        q: jac[0],
        u: jac[1..].to_vec(),
    })
}

/// First positive root of t ↦ q(t; x₀) on (0, t_max], or `None` if q stays
/// away from zero across the horizon.
pub fn q_first_root(
    sys: &SystemSpec,
    prof: &InitialProfile,
    x0: f64,
    t_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<Option<Root>, HyperbolicError> {
    if prof.n() != sys.n {
        return Err(HyperbolicError::ComponentMismatch { expected: sys.n, got: prof.n() });
    }
    if !prof.contains(x0) {
        let (lo, hi) = prof.domain();
        return Err(HyperbolicError::OutOfDomain { x0, lo, hi });
    }
    let scan = QScan::new(sys, t_max, scan_step, tol)?;
    Ok(scan.first_root(&prof.derivative(x0))?)
}

/// Scans q(·; x₀) at every foot of `x0_grid` and reduces to a verdict:
/// T* = earliest root, x* = its foot. Feet are processed in parallel;
/// the result is independent of evaluation order.
pub fn blowup_report(
    sys: &SystemSpec,
    prof: &InitialProfile,
    x0_grid: &[f64],
    t_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<BlowupReport, HyperbolicError> {
    if prof.n() != sys.n {
        return Err(HyperbolicError::ComponentMismatch { expected: sys.n, got: prof.n() });
    }
    if x0_grid.is_empty() {
        return Err(HyperbolicError::Numerics(NumError::InvalidArgument {
            arg: "x0_grid",
            reason: "grid must be non-empty".into(),
        }));
    }
    for &x0 in x0_grid {
        if !prof.contains(x0) {
            let (lo, hi) = prof.domain();
            return Err(HyperbolicError::OutOfDomain { x0, lo, hi });
        }
    }

    let scan = QScan::new(sys, t_max, scan_step, tol)?;
    let per_point: Result<Vec<(f64, Option<Root>)>, NumError> = x0_grid
        .par_iter()
        .map(|&x0| scan.first_root(&prof.derivative(x0)).map(|r| (x0, r)))
        .collect();
    let per_point = per_point?;

    let mut t_star: Option<f64> = None;
    let mut x_star: Option<f64> = None;
    for (x0, root) in &per_point {
        if let Some(r) = root {
            if t_star.is_none_or(|ts| r.t < ts) {
                t_star = Some(r.t);
                x_star = Some(*x0);
            }
        }
    }
    Ok(BlowupReport {
        verdict: if t_star.is_some() { Verdict::BlowsUp } else { Verdict::GloballySmooth },
        t_star,
        x_star,
        per_point,
        horizon: t_max,
    })
}

/// Horizon-free smoothness criterion for the two-component rotation system:
/// D(x) = (V₀′)² + 2U₀′ − 1; the solution stays globally C¹ iff D < 0
/// everywhere, and the gradient blows up wherever D ≥ 0.
pub fn criterion_cold_plasma(
    prof: &InitialProfile,
    x_grid: &[f64],
) -> Result<CriterionReport, HyperbolicError> {
    if prof.n() != 2 {
        return Err(HyperbolicError::ComponentMismatch { expected: 2, got: prof.n() });
    }
    criterion_on_grid(prof, x_grid, |d| d[0] * d[0] + 2.0 * d[1] - 1.0)
}

/// Horizon-free criterion for the three-component magnetized system with
/// components (V₁, V₂, E): ((V₁)′)² + 2E′ + 2B₀(V₂)′ − B₀² − 1, smooth iff
/// strictly negative everywhere. At B₀ = 0 (and V₂ decoupled) this is the
/// two-component criterion on (V₁, E).
pub fn criterion_davidson(
    prof: &InitialProfile,
    b0: f64,
    x_grid: &[f64],
) -> Result<CriterionReport, HyperbolicError> {
    if prof.n() != 3 {
        return Err(HyperbolicError::ComponentMismatch { expected: 3, got: prof.n() });
    }
    criterion_on_grid(prof, x_grid, move |d| {
        d[0] * d[0] + 2.0 * d[2] + 2.0 * b0 * d[1] - b0 * b0 - 1.0
    })
}

fn criterion_on_grid(
    prof: &InitialProfile,
    x_grid: &[f64],
    criterion: impl Fn(&[f64]) -> f64,
) -> Result<CriterionReport, HyperbolicError> {
    if x_grid.is_empty() {
        return Err(HyperbolicError::Numerics(NumError::InvalidArgument {
            arg: "x_grid",
            reason: "grid must be non-empty".into(),
        }));
    }
    let (lo, hi) = prof.domain();
    let mut values = Vec::with_capacity(x_grid.len());
    let mut max_value = f64::NEG_INFINITY;
    let mut argmax_x = x_grid[0];
    for &x in x_grid {
        if !prof.contains(x) {
            return Err(HyperbolicError::OutOfDomain { x0: x, lo, hi });
        }
        let v = criterion(&prof.derivative(x));
        if v > max_value {
            max_value = v;
            argmax_x = x;
        }
        values.push(v);
    }
    Ok(CriterionReport {
        values,
        max_value,
        argmax_x,
        verdict: if max_value < 0.0 { Verdict::GloballySmooth } else { Verdict::BlowsUp },
    })
}

/// V² + U² for a two-component state: constant along every characteristic
/// of the rotation system, so it doubles as an integration oracle.
pub fn conserved_radius(state: &CharacteristicState) -> Result<f64, HyperbolicError> {
    if state.v.len() != 2 {
        return Err(HyperbolicError::ComponentMismatch { expected: 2, got: state.v.len() });
    }
    Ok(state.v[0] * state.v[0] + state.v[1] * state.v[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cold_plasma() -> SystemSpec {
        SystemSpec::new(
            "cold_plasma",
            Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap(),
            None,
        )
        .unwrap()
    }

    fn davidson(b0: f64) -> SystemSpec {
        SystemSpec::new(
            "davidson",
            Matrix::from_rows(&[
                &[0.0, -b0, -1.0],
                &[b0, 0.0, 0.0],
                &[1.0, 0.0, 0.0],
            ])
            .unwrap(),
            None,
        )
        .unwrap()
    }

    fn constant_profile(n: usize, v: Vec<f64>) -> InitialProfile {
        InitialProfile::analytic(n, (-1.0, 1.0), false, move |_| v.clone(), move |_| {
            vec![0.0; n]
        })
        .unwrap()
    }

    fn ramp_profile() -> InitialProfile {
        // V₀ = (0, x): constant derivative (0, 1) everywhere.
        InitialProfile::analytic(2, (-1.0, 1.0), false, |x| vec![0.0, x], |_| vec![0.0, 1.0])
            .unwrap()
    }

    fn smooth_profile() -> InitialProfile {
        InitialProfile::analytic(
            2,
            (-PI, PI),
            true,
            |x| vec![0.5 * x.sin(), 0.3 * x.cos()],
            |x| vec![0.5 * x.cos(), -0.3 * x.sin()],
        )
        .unwrap()
    }

    fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
    }

    #[test]
    fn augmented_matrix_for_the_rotation_coupling() {
        let m = augmented_matrix(&cold_plasma());
        let expect = Matrix::from_rows(&[
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, -1.0],
            &[0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m, expect);
    }

    #[test]
    fn augmented_matrix_for_zero_coupling_has_single_entry() {
        let sys = SystemSpec::new("quiet", Matrix::zeros(3, 3), None).unwrap();
        let m = augmented_matrix(&sys);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (0, 1) { 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j), expect);
            }
        }
    }

    #[test]
    fn augmented_matrix_embeds_the_three_component_coupling() {
        let sys = davidson(0.5);
        let m = augmented_matrix(&sys);
        assert_eq!(m.rows(), 4);
        assert_eq!(m.get(0, 1), 1.0);
        for i in 1..4 {
            assert_eq!(m.get(i, 0), 0.0);
            for j in 1..4 {
                assert_eq!(m.get(i, j), sys.q.get(i - 1, j - 1));
            }
        }
    }

    #[test]
    fn zero_data_rides_along_unchanged() {
        let sys = cold_plasma();
        let prof = constant_profile(2, vec![0.0, 0.0]);
        for t in [0.0, 0.7, 3.3] {
            let s = characteristic_solve(&sys, &prof, 0.25, t).unwrap();
            assert_abs_diff_eq!(s.x, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(s.v[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.v[1], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.q, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_carries_unit_data_a_quarter_turn() {
        let sys = cold_plasma();
        let prof = constant_profile(2, vec![1.0, 0.0]);
        let s = characteristic_solve(&sys, &prof, 0.0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(s.v[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.v[1], 1.0, epsilon = 1e-12);
        // Displacement is ∫₀^{π/2} cos s ds = 1.
        assert_abs_diff_eq!(s.x, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn flow_map_factor_matches_its_closed_form() {
        // Hand-derived from the augmented system with a rotation block:
        // q(t) = (1 − U₀′) + V₀′ sin t + U₀′ cos t.
        let sys = cold_plasma();
        let prof = ramp_profile();
        for k in 0..=100 {
            let t = 10.0 * k as f64 / 100.0;
            let s = characteristic_solve(&sys, &prof, 0.0, t).unwrap();
            assert_abs_diff_eq!(s.q, t.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_values_are_u_over_q() {
        let sys = cold_plasma();
        let prof = smooth_profile();
        let s = characteristic_solve(&sys, &prof, 0.4, 0.9).unwrap();
        let d = s.derivative().unwrap();
        assert_abs_diff_eq!(d[0], s.u[0] / s.q, epsilon = 0.0);
        let past = CharacteristicState { q: -0.1, ..s };
        assert!(past.derivative().is_none());
    }

    #[test]
    fn out_of_domain_foot_is_rejected() {
        let sys = cold_plasma();
        let prof = ramp_profile();
        assert!(matches!(
            characteristic_solve(&sys, &prof, 2.0, 0.1),
            Err(HyperbolicError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn first_root_of_pure_cosine_q() {
        let sys = cold_plasma();
        let prof = ramp_profile();
        let r = q_first_root(&sys, &prof, 0.0, 10.0, 0.01, 1e-10).unwrap().unwrap();
        assert_abs_diff_eq!(r.t, FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn sub_unit_derivative_never_roots_within_the_horizon() {
        // q(t) = 0.7 + 0.3 cos t ≥ 0.4.
        let sys = cold_plasma();
        let prof = InitialProfile::analytic(
            2,
            (-1.0, 1.0),
            false,
            |x| vec![0.0, 0.3 * x],
            |_| vec![0.0, 0.3],
        )
        .unwrap();
        assert!(q_first_root(&sys, &prof, 0.0, 100.0, 0.01, 1e-9).unwrap().is_none());
    }

    #[test]
    fn ramp_data_blows_up_everywhere_at_half_pi() {
        let sys = cold_plasma();
        let prof = ramp_profile();
        let grid = uniform(-1.0, 1.0, 21);
        let rep = blowup_report(&sys, &prof, &grid, 10.0, 0.01, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::BlowsUp);
        assert_abs_diff_eq!(rep.t_star.unwrap(), FRAC_PI_2, epsilon = 1e-6);
        assert!(rep.per_point.iter().all(|(_, r)| r.is_some()));
        assert_eq!(rep.horizon, 10.0);
    }

    #[test]
    fn sub_critical_trigonometric_data_is_certified_smooth() {
        let sys = cold_plasma();
        let prof = smooth_profile();
        let grid = uniform(-PI, PI, 65);
        let rep = blowup_report(&sys, &prof, &grid, 100.0, 0.01, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::GloballySmooth);
        assert!(rep.t_star.is_none());
    }

    #[test]
    fn constant_data_is_globally_smooth() {
        let sys = cold_plasma();
        let prof = constant_profile(2, vec![0.4, -1.7]);
        let rep = blowup_report(&sys, &prof, &uniform(-1.0, 1.0, 9), 50.0, 0.05, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::GloballySmooth);
    }

    #[test]
    fn two_component_criterion_on_the_ramp() {
        let rep = criterion_cold_plasma(&ramp_profile(), &uniform(-1.0, 1.0, 11)).unwrap();
        assert_eq!(rep.verdict, Verdict::BlowsUp);
        for v in &rep.values {
            assert_abs_diff_eq!(v, &1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_component_criterion_on_zero_derivative() {
        let rep =
            criterion_cold_plasma(&constant_profile(2, vec![1.0, 2.0]), &uniform(-1.0, 1.0, 11))
                .unwrap();
        assert_eq!(rep.verdict, Verdict::GloballySmooth);
        assert_abs_diff_eq!(rep.max_value, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_component_criterion_trigonometric_maximum() {
        // D(x) = 0.25 cos²x − 0.6 sin x − 1 has maximum −0.4 at sin x = −1.
        let rep = criterion_cold_plasma(&smooth_profile(), &uniform(-PI, PI, 512)).unwrap();
        assert_eq!(rep.verdict, Verdict::GloballySmooth);
        assert_abs_diff_eq!(rep.max_value, -0.4, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.argmax_x, -FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn three_component_criterion_boundary_case_blows_up() {
        // Derivatives (0, 0, 1) with B₀ = 1: value 0 + 2 + 0 − 1 − 1 = 0,
        // not strictly negative.
        let prof = InitialProfile::analytic(
            3,
            (-1.0, 1.0),
            false,
            |x| vec![0.0, 0.0, x],
            |_| vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let rep = criterion_davidson(&prof, 1.0, &uniform(-1.0, 1.0, 5)).unwrap();
        assert_abs_diff_eq!(rep.max_value, 0.0, epsilon = 1e-12);
        assert_eq!(rep.verdict, Verdict::BlowsUp);
    }

    #[test]
    fn three_component_criterion_negative_case_is_smooth() {
        // Derivatives (0, 1, 0) with B₀ = 2: 0 + 0 + 4 − 4 − 1 = −1.
        let prof = InitialProfile::analytic(
            3,
            (-1.0, 1.0),
            false,
            |x| vec![0.0, x, 0.0],
            |_| vec![0.0, 1.0, 0.0],
        )
        .unwrap();
        let rep = criterion_davidson(&prof, 2.0, &uniform(-1.0, 1.0, 5)).unwrap();
        assert_abs_diff_eq!(rep.max_value, -1.0, epsilon = 1e-12);
        assert_eq!(rep.verdict, Verdict::GloballySmooth);
    }

    #[test]
    fn three_component_criterion_at_zero_field_reduces_to_two_component() {
        let p3 = InitialProfile::analytic(
            3,
            (-PI, PI),
            true,
            |x| vec![0.4 * x.sin(), 0.0, 0.7 * x.cos()],
            |x| vec![0.4 * x.cos(), 0.0, -0.7 * x.sin()],
        )
        .unwrap();
        let p2 = InitialProfile::analytic(
            2,
            (-PI, PI),
            true,
            |x| vec![0.4 * x.sin(), 0.7 * x.cos()],
            |x| vec![0.4 * x.cos(), -0.7 * x.sin()],
        )
        .unwrap();
        let grid = uniform(-PI, PI, 64);
        let r3 = criterion_davidson(&p3, 0.0, &grid).unwrap();
        let r2 = criterion_cold_plasma(&p2, &grid).unwrap();
        for (a, b) in r3.values.iter().zip(r2.values.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert_eq!(r3.verdict, r2.verdict);
    }

    #[test]
    fn criterion_verdicts_match_generic_scan_on_the_three_component_system() {
        // 50 random trigonometric profiles per field strength; the
        // horizon-free criterion and the horizon-100 q-scan must agree.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let grid = uniform(-PI, PI, 24);
        for b0 in [0.0, 0.5, 2.0] {
            let sys = davidson(b0);
            for _ in 0..50 {
                let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
                let w: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.5..2.0));
                let prof = InitialProfile::analytic(
                    3,
                    (-PI, PI),
                    true,
                    move |x| {
                        vec![a[0] * (w[0] * x).sin(), a[1] * (w[1] * x).sin(), a[2] * (w[2] * x).sin()]
                    },
                    move |x| {
                        vec![
                            a[0] * w[0] * (w[0] * x).cos(),
                            a[1] * w[1] * (w[1] * x).cos(),
                            a[2] * w[2] * (w[2] * x).cos(),
                        ]
                    },
                )
                .unwrap();
                let crit = criterion_davidson(&prof, b0, &grid).unwrap();
                // Keep a safety margin so scan resolution cannot flip the
                // verdict at near-critical points.
                if crit.values.iter().all(|v| v.abs() > 1e-3) || crit.max_value > 1e-3 {
                    let rep = blowup_report(&sys, &prof, &grid, 100.0, 0.005, 1e-9).unwrap();
                    assert_eq!(
                        crit.verdict, rep.verdict,
                        "b0={b0}, a={a:?}, w={w:?}, max={}",
                        crit.max_value
                    );
                }
            }
        }
    }

    #[test]
    fn radius_is_conserved_along_characteristics() {
        let sys = cold_plasma();
        let prof = constant_profile(2, vec![3.0, 4.0]);
        for t in [0.0, 0.5, 1.3, 7.9, 20.0] {
            let s = characteristic_solve(&sys, &prof, 0.0, t).unwrap();
            assert_abs_diff_eq!(conserved_radius(&s).unwrap(), 25.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn radius_requires_two_components() {
        let s = CharacteristicState { t: 0.0, x: 0.0, v: vec![1.0, 2.0, 3.0], q: 1.0, u: vec![] };
        assert!(matches!(
            conserved_radius(&s),
            Err(HyperbolicError::ComponentMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn mismatched_system_and_profile_are_rejected() {
        let sys = davidson(1.0);
        let prof = ramp_profile();
        assert!(matches!(
            characteristic_solve(&sys, &prof, 0.0, 1.0),
            Err(HyperbolicError::ComponentMismatch { expected: 3, got: 2 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// The criterion D(x₀) ≥ 0 is equivalent to q(·; x₀) having a root,
        /// and the root agrees with the closed-form q independently rooted.
        #[test]
        fn criterion_matches_root_existence(
            vp in -3.0_f64..3.0,
            up in -3.0_f64..3.0,
        ) {
            let d = vp * vp + 2.0 * up - 1.0;
            prop_assume!(d.abs() > 1e-3);
            let sys = cold_plasma();
            let prof = InitialProfile::analytic(
                2,
                (-1.0, 1.0),
                false,
                move |x| vec![vp * x, up * x],
                move |_| vec![vp, up],
            ).unwrap();
            let root = q_first_root(&sys, &prof, 0.0, 100.0, 0.005, 1e-9).unwrap();
            prop_assert_eq!(root.is_some(), d >= 0.0, "D = {}", d);
            if let Some(r) = root {
                // Independent route: root the scalar closed form directly.
                let f = move |t: f64| (1.0 - up) + vp * t.sin() + up * t.cos();
                let direct = crate::numkit::find_first_root(f, 100.0, 0.005, 1e-9)
                    .unwrap()
                    .expect("closed form must root when D >= 0");
                prop_assert!((r.t - direct.t).abs() < 1e-6,
                    "expm root {} vs closed-form root {}", r.t, direct.t);
            }
        }

        /// q(t; x₀) is the Jacobian ∂x(t;·)/∂x₀ of the characteristic flow.
        #[test]
        fn q_is_the_flow_jacobian(
            a in -0.8_f64..0.8,
            b in -0.8_f64..0.8,
            t in 0.1_f64..1.2,
            x0 in -2.0_f64..2.0,
        ) {
            let sys = cold_plasma();
            let prof = InitialProfile::analytic(
                2,
                (-PI, PI),
                true,
                move |x| vec![a * x.sin(), b * x.cos()],
                move |x| vec![a * x.cos(), -b * x.sin()],
            ).unwrap();
            let s = characteristic_solve(&sys, &prof, x0, t).unwrap();
            prop_assume!(s.q > 0.1);
            let h = 1e-5;
            let xp = characteristic_solve(&sys, &prof, x0 + h, t).unwrap().x;
            let xm = characteristic_solve(&sys, &prof, x0 - h, t).unwrap().x;
            let fd = (xp - xm) / (2.0 * h);
            prop_assert!((s.q - fd).abs() <= 1e-4 * s.q.abs().max(1.0),
                "q = {}, finite difference = {}", s.q, fd);
        }

        /// The solution component of characteristic_solve is linear in V₀.
        #[test]
        fn solution_is_linear_in_the_data(
            va in -2.0_f64..2.0, ua in -2.0_f64..2.0,
            vb in -2.0_f64..2.0, ub in -2.0_f64..2.0,
            alpha in -1.5_f64..1.5, beta in -1.5_f64..1.5,
            t in 0.0_f64..6.0,
        ) {
            let sys = cold_plasma();
            let pa = constant_profile(2, vec![va, ua]);
            let pb = constant_profile(2, vec![vb, ub]);
            let pc = constant_profile(
                2,
                vec![alpha * va + beta * vb, alpha * ua + beta * ub],
            );
            let sa = characteristic_solve(&sys, &pa, 0.0, t).unwrap();
            let sb = characteristic_solve(&sys, &pb, 0.0, t).unwrap();
            let sc = characteristic_solve(&sys, &pc, 0.0, t).unwrap();
            for i in 0..2 {
                let combined = alpha * sa.v[i] + beta * sb.v[i];
                prop_assert!((sc.v[i] - combined).abs() <= 1e-10,
                    "component {}: {} vs {}", i, sc.v[i], combined);
            }
        }
    }
}
