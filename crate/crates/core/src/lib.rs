//! Numerical analysis of quasilinear first-order systems in which every
//! component is transported with the same speed, the first component itself:
//!
//! ```text
//! V_t + V1 · V_x = Q V          (+ optional B · V_xx)
//! ```
//!
//! with constant matrices `Q` (source) and `B` (dissipation). Systems of this
//! shape are not strictly hyperbolic (the transport matrix `V1·I` has a single
//! eigenvalue of full multiplicity), yet the derivative dynamics along
//! characteristics close into a linear system one dimension up, so gradient
//! blow-up can be decided by root-finding on a single scalar `q(t)` per
//! characteristic instead of by shock-capturing.
//!
//! Module map:
//!
//! - [`numkit`] — self-contained kernels: small dense matrices and `expm`,
//!   an embedded adaptive Runge–Kutta pair with guard/underflow termination,
//!   first-root scanning, quadrature tolerant of inverse-square-root endpoint
//!   singularities, interpolation, small polynomial root sets.
//! - [`hyperbolic`] — characteristics, the augmented linear derivative system,
//!   blow-up reports and closed-form smoothness criteria.
//! - [`waves`] — traveling and simple waves, linearized root classification,
//!   and the phase-plane machinery for the vessel-flow model.
//! - [`stochastic`] — interacting-particle regularization, kernel density
//!   field estimates and the vanishing-noise convergence study.
//! - [`parabolic`] — explicit upwind finite differences for the dissipative
//!   counterpart on periodic grids.
//! - [`models`] — the catalog of concrete systems (plasma oscillations,
//!   Euler–Poisson, convection, vessel flow, magnetized plasma).

pub mod hyperbolic;
pub mod models;
pub mod numkit;
pub mod parabolic;
pub mod stochastic;
pub mod waves;

pub use hyperbolic::{
    augmented_matrix, blowup_report, characteristic_solve, conserved_radius,
    criterion_cold_plasma, criterion_davidson, default_scan_step, grid_solution, q_first_root,
    BlowupReport, CharacteristicState, CriterionReport, GridSolution, InitialProfile, SystemSpec,
    Verdict,
};
pub use numkit::{
    expm, find_first_root, integrate_ode, quad_sqrt_singular, Matrix, NumError, OdeTrajectory,
    Root, RootKind, Termination,
};
pub use models::{
    build, catalog, pressure_from_e, CatalogEntry, ClosedFormCriterion, ModelEntry, ModelError,
    ModelName, ParamSpec,
};
pub use parabolic::{cfl_limits, fd_solve, GridState, ParabolicError, MAX_DT_HALVINGS};
pub use stochastic::{
    convergence_study, estimate_fields, evolve_ensemble, ConvergenceRow, FieldEstimate,
    InitialDistribution, ParticleEnsemble, StochasticError,
};
pub use waves::{
    bloodflow_classify, bloodflow_period, bloodflow_psi, bloodflow_rhs,
    bloodflow_speed_for_perimeter, bloodflow_turning_points, first_return_period,
    linearized_tw_roots, simple_wave_curve, tw_inviscid, tw_viscous_coldplasma, EquilibriumClass,
    EquilibriumKind, OrbitReturn, PhasePoint, TravelingWaveProblem, TwModel, WaveError,
};
