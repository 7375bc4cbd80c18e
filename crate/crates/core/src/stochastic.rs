//! Stochastic particle regularization: characteristics with diffusing feet.
//!
//! An ensemble of particles carries the solution of V_t + V₁·V_x = QV. Each
//! particle's position takes Euler–Maruyama steps
//!
//! ```text
//!     X ← X + 𝔙₁ Δt + σ √Δt ζ,      ζ ~ N(0, 1) i.i.d.,
//! ```
//!
//! while its state advances exactly, 𝔙 ← exp(QΔt) 𝔙, because the state
//! equation along a characteristic is linear with constant coefficients.
//! Kernel density estimation turns the cloud back into fields: a particle
//! density ρ and a density-weighted mean state V̂. As σ → 0 with growing
//! particle count, V̂ recovers the classical solution wherever it is smooth,
//! while positive σ keeps the fields defined past gradient blow-up.
//!
//! Determinism: every particle owns a counter-based random stream keyed by
//! (seed, particle index), so results are bit-identical for a fixed seed no
//! matter how the ensemble is sharded across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::hyperbolic::{
    blowup_report, default_scan_step, grid_solution, HyperbolicError, InitialProfile, SystemSpec,
    Verdict, DEFAULT_ROOT_TOL,
};
use crate::numkit::{expm, NumError};

/// Grid points whose density falls below this fraction of the peak density
/// report an undefined mean state: with so little kernel mass the weighted
/// mean would be dominated by a handful of stray particles.
pub const DENSITY_FLOOR_RTOL: f64 = 1e-8;

/// Silverman-style rule-of-thumb prefactor for the default kernel bandwidth
/// h = 0.9 · std(positions) · N^(-1/5), the classic choice for Gaussian
/// kernels on roughly unimodal data.
pub const SILVERMAN_FACTOR: f64 = 0.9;

/// Relative slack when splitting t_end into whole Δt steps, so that
/// t_end = k·Δt up to roundoff does not produce a spurious sliver step.
const STEP_SPLIT_RTOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("profile supplies {got} components but the system has {expected}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error("parameter {name} must be positive and finite, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("ensemble needs at least one particle")]
    ZeroParticles,
    #[error("ensemble holds no particles")]
    EmptyEnsemble,
    #[error("ensemble carries {positions} positions but {states} states")]
    RaggedEnsemble { positions: usize, states: usize },
    #[error("initial point mass at x = {x} lies outside the domain [{lo}, {hi}]")]
    PointOutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("particle {particle} became non-finite at step {step}")]
    NonFiniteState { particle: usize, step: usize },
    #[error(
        "density floor leaves the mean state undefined at interior grid point x = {x}; \
         increase the particle count or the bandwidth"
    )]
    NoDensity { x: f64 },
    #[error(
        "initial data loses regularity at t* = {t_star} ≤ horizon {horizon}; \
         the deterministic reference solution would be invalid"
    )]
    Supercritical { t_star: f64, horizon: f64 },
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Numerics(#[from] NumError),
}

/// How initial particle positions are drawn over the profile domain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialDistribution {
    /// Uniform over the profile's domain — the default when nothing about
    /// the initial measure is known.
    #[default]
    Uniform,
    /// Every particle starts at the same point (a point mass).
    Point(f64),
}

/// A particle cloud at one instant: positions, per-particle state vectors,
/// and the evolution metadata needed to interpret and reproduce it.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    pub positions: Vec<f64>,
    /// states[i] is particle i's n-component state 𝔙.
    pub states: Vec<Vec<f64>>,
    pub t: f64,
    pub sigma: f64,
    pub seed: u64,
    /// Domain of the initial profile; kernel estimates wrap distances when
    /// `periodic` is set.
    pub domain: (f64, f64),
    pub periodic: bool,
}

impl ParticleEnsemble {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Fields reconstructed from a particle cloud on a grid: kernel density ρ
/// and the density-weighted mean state V̂ wherever enough mass supports it.
#[derive(Debug, Clone)]
pub struct FieldEstimate {
    pub x_grid: Vec<f64>,
    /// rho[j] ≥ 0, normalized so the kernel integrates to one per particle.
    pub rho: Vec<f64>,
    /// v_hat[j] is `None` where rho[j] ≤ [`DENSITY_FLOOR_RTOL`] · max ρ.
    pub v_hat: Vec<Option<Vec<f64>>>,
    /// The bandwidth actually used (supplied or rule-of-thumb).
    pub bandwidth: f64,
}

/// One row of a noise-convergence table: the regularization strength and the
/// sup-norm distance between the regularized mean field and the classical
/// solution over interior grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub sigma: f64,
    pub sup_error: f64,
}

fn check_positive_param(name: &'static str, value: f64) -> Result<(), StochasticError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(StochasticError::BadParameter { name, value });
    }
    Ok(())
}

/// Evolves an ensemble of `n_particles` particles to `t_end`.
///
/// Positions start as draws from `f0` over the profile domain and take
/// Euler–Maruyama steps of size Δt (plus one shorter final step when t_end
/// is not a multiple of Δt). States start at V₀(X(0)) and advance by the
/// exact one-step exponential exp(QΔt), so all time-stepping error lives in
/// the positions. Gaussian increments are drawn even when σ = 0 so that runs
/// with the same seed but different σ share their noise paths.
#[allow(clippy::too_many_arguments)]
pub fn evolve_ensemble(
    sys: &SystemSpec,
    prof: &InitialProfile,
    f0: InitialDistribution,
    sigma: f64,
    n_particles: usize,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<ParticleEnsemble, StochasticError> {
    if prof.n() != sys.n {
        return Err(StochasticError::ComponentMismatch { expected: sys.n, got: prof.n() });
    }
    if n_particles == 0 {
        return Err(StochasticError::ZeroParticles);
    }
    check_positive_param("dt", dt)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(StochasticError::BadParameter { name: "sigma", value: sigma });
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(StochasticError::BadParameter { name: "t_end", value: t_end });
    }
    let (lo, hi) = prof.domain();
    if let InitialDistribution::Point(x) = f0 {
        if !prof.contains(x) {
            return Err(StochasticError::PointOutsideDomain { x, lo, hi });
        }
    }

    // Split t_end into whole steps plus an optional remainder step.
    let n_full = (t_end / dt + STEP_SPLIT_RTOL).floor() as usize;
    let rem = (t_end - n_full as f64 * dt).max(0.0);
    let rem = if rem > STEP_SPLIT_RTOL * dt { Some(rem) } else { None };

    let step_full = expm(&sys.q, dt)?;
    let step_rem = match rem {
        Some(r) => Some(expm(&sys.q, r)?),
        None => None,
    };
    let sqrt_dt = dt.sqrt();

    let evolve_one = |i: usize| -> Result<(f64, Vec<f64>), StochasticError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);

        let mut x = match f0 {
            InitialDistribution::Uniform => rng.gen_range(lo..hi),
            InitialDistribution::Point(p) => p,
        };
        let mut v = prof.value(x);
        if !x.is_finite() || v.iter().any(|c| !c.is_finite()) {
            return Err(StochasticError::NonFiniteState { particle: i, step: 0 });
        }

        for step in 0..n_full {
            let zeta: f64 = rng.sample(StandardNormal);
            x += v[0] * dt + sigma * sqrt_dt * zeta;
            v = step_full.matvec(&v);
            if !x.is_finite() || v.iter().any(|c| !c.is_finite()) {
                return Err(StochasticError::NonFiniteState { particle: i, step: step + 1 });
            }
        }
        if let (Some(r), Some(m)) = (rem, &step_rem) {
            let zeta: f64 = rng.sample(StandardNormal);
            x += v[0] * r + sigma * r.sqrt() * zeta;
            v = m.matvec(&v);
            if !x.is_finite() || v.iter().any(|c| !c.is_finite()) {
                return Err(StochasticError::NonFiniteState { particle: i, step: n_full + 1 });
            }
        }
        Ok((x, v))
    };

    let moved: Result<Vec<(f64, Vec<f64>)>, StochasticError> =
        (0..n_particles).into_par_iter().map(evolve_one).collect();
    let moved = moved?;

    let mut positions = Vec::with_capacity(n_particles);
    let mut states = Vec::with_capacity(n_particles);
    for (x, v) in moved {
        positions.push(x);
        states.push(v);
    }
    Ok(ParticleEnsemble {
        positions,
        states,
        t: t_end,
        sigma,
        seed,
        domain: (lo, hi),
        periodic: prof.periodic(),
    })
}

/// Signed distance from a particle to a grid point, wrapped to the nearest
/// periodic image when the ensemble lives on a periodic domain.
fn kernel_distance(ens: &ParticleEnsemble, x: f64, p: f64) -> f64 {
    let d = x - p;
    if ens.periodic {
        let span = ens.domain.1 - ens.domain.0;
        d - span * (d / span).round()
    } else {
        d
    }
}

/// Rule-of-thumb bandwidth from the position spread. Periodic positions are
/// folded into the domain first so that long diffusion runs do not inflate
/// the spread across many periods.
fn silverman_bandwidth(ens: &ParticleEnsemble) -> f64 {
    let n = ens.positions.len();
    let fold = |p: f64| -> f64 {
        if ens.periodic {
            let (lo, hi) = ens.domain;
            lo + (p - lo).rem_euclid(hi - lo)
        } else {
            p
        }
    };
    let mean = ens.positions.iter().map(|&p| fold(p)).sum::<f64>() / n as f64;
    let var =
        ens.positions.iter().map(|&p| (fold(p) - mean).powi(2)).sum::<f64>() / n.max(2) as f64;
    SILVERMAN_FACTOR * var.sqrt() * (n as f64).powf(-0.2)
}

/// Reconstructs fields from a particle cloud on `x_grid` with a Gaussian
/// kernel: density ρ and density-weighted mean state V̂.
///
/// With `bandwidth = None` a Silverman-style default
/// [`SILVERMAN_FACTOR`] · std · N^(-1/5) is used. On periodic domains the
/// kernel sees the nearest periodic image of each particle — a faithful
/// approximation of the wrapped kernel whenever the bandwidth is small
/// against the period. Grid points carrying less than
/// [`DENSITY_FLOOR_RTOL`] of the peak density report `None` for V̂.
pub fn estimate_fields(
    ens: &ParticleEnsemble,
    x_grid: &[f64],
    bandwidth: Option<f64>,
) -> Result<FieldEstimate, StochasticError> {
    if ens.is_empty() {
        return Err(StochasticError::EmptyEnsemble);
    }
    if ens.states.len() != ens.positions.len() {
        return Err(StochasticError::RaggedEnsemble {
            positions: ens.positions.len(),
            states: ens.states.len(),
        });
    }
    if x_grid.is_empty() || x_grid.iter().any(|x| !x.is_finite()) {
        return Err(StochasticError::Numerics(NumError::InvalidArgument {
            arg: "x_grid",
            reason: "grid must be non-empty and finite".into(),
        }));
    }
    let h = match bandwidth {
        Some(h) => h,
        None => silverman_bandwidth(ens),
    };
    check_positive_param("bandwidth", h)?;

    let n = ens.positions.len();
    let n_comp = ens.states[0].len();
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * n as f64);

    // (rho_j, kernel-weighted state sum, kernel weight sum) per grid point.
    let per_point: Vec<(f64, Vec<f64>, f64)> = x_grid
        .par_iter()
        .map(|&x| {
            let mut weight = 0.0;
            let mut state_sum = vec![0.0; n_comp];
            for (p, v) in ens.positions.iter().zip(&ens.states) {
                let u = kernel_distance(ens, x, *p) / h;
                let k = (-0.5 * u * u).exp();
                weight += k;
                for (acc, c) in state_sum.iter_mut().zip(v) {
                    *acc += k * c;
                }
            }
            (norm * weight, state_sum, weight)
        })
        .collect();

    let rho_max = per_point.iter().map(|(r, _, _)| *r).fold(0.0, f64::max);
    let floor = DENSITY_FLOOR_RTOL * rho_max;

    let mut rho = Vec::with_capacity(x_grid.len());
    let mut v_hat = Vec::with_capacity(x_grid.len());
    for (r, state_sum, weight) in per_point {
        rho.push(r);
        if r > floor && weight > 0.0 {
            v_hat.push(Some(state_sum.iter().map(|s| s / weight).collect()));
        } else {
            v_hat.push(None);
        }
    }
    Ok(FieldEstimate { x_grid: x_grid.to_vec(), rho, v_hat, bandwidth: h })
}

/// Measures how the regularized fields approach the classical solution as
/// the noise strength decreases.
///
/// For every σ in `sigma_list` (in the given order) the study evolves a
/// fresh ensemble from the same seed — paired noise paths make rows directly
/// comparable — estimates V̂ at `t_end`, and reports the sup-norm error
/// against the characteristic reconstruction over the interior grid points
/// (the first and last point are skipped, where one-sided kernel mass would
/// bias the comparison).
///
/// The initial data must stay smooth up to `t_end`: if the gradient blow-up
/// scan finds a root at t* ≤ t_end the study refuses, because the reference
/// solution past t* does not exist.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    sys: &SystemSpec,
    prof: &InitialProfile,
    sigma_list: &[f64],
    n_particles: usize,
    t_end: f64,
    dt: f64,
    x_grid: &[f64],
    bandwidth: Option<f64>,
    seed: u64,
) -> Result<Vec<ConvergenceRow>, StochasticError> {
    if sigma_list.is_empty() {
        return Err(StochasticError::Numerics(NumError::InvalidArgument {
            arg: "sigma_list",
            reason: "need at least one noise strength".into(),
        }));
    }
    if x_grid.len() < 3 {
        return Err(StochasticError::Numerics(NumError::InvalidArgument {
            arg: "x_grid",
            reason: "need at least three grid points to have an interior".into(),
        }));
    }
    check_positive_param("t_end", t_end)?;

    let report =
        blowup_report(sys, prof, x_grid, t_end, default_scan_step(t_end), DEFAULT_ROOT_TOL)?;
    if report.verdict == Verdict::BlowsUp {
        return Err(StochasticError::Supercritical {
            t_star: report.t_star.unwrap_or(t_end),
            horizon: t_end,
        });
    }

    let reference = grid_solution(sys, prof, t_end, x_grid)?;
    let interior = 1..x_grid.len() - 1;

    let mut rows = Vec::with_capacity(sigma_list.len());
    for &sigma in sigma_list {
        let ens = evolve_ensemble(
            sys,
            prof,
            InitialDistribution::Uniform,
            sigma,
            n_particles,
            t_end,
            dt,
            seed,
        )?;
        let est = estimate_fields(&ens, x_grid, bandwidth)?;
        let mut sup_error: f64 = 0.0;
        for j in interior.clone() {
            match &est.v_hat[j] {
                Some(v) => {
                    for (a, b) in v.iter().zip(&reference.v[j]) {
                        sup_error = sup_error.max((a - b).abs());
                    }
                }
                None => return Err(StochasticError::NoDensity { x: x_grid[j] }),
            }
        }
        rows.push(ConvergenceRow { sigma, sup_error });
    }
    Ok(rows)
}
