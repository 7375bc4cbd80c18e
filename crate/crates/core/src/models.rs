//! Catalog of concrete physical systems: each named model maps a small set
//! of named parameters to a [`SystemSpec`] (coupling Q, optional dissipation
//! B) together with the closed-form smoothness criteria that apply to it.
//!
//! The catalog is the single source of truth for matrix layouts and the
//! parameter schema the command-line front end exposes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hyperbolic::{
    criterion_cold_plasma, criterion_davidson, CriterionReport, HyperbolicError, InitialProfile,
    SystemSpec,
};
use crate::numkit::Matrix;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model name {name:?}; run the catalog listing for valid names")]
    UnknownModel { name: String },
    #[error("model {model} does not accept parameter {key:?}")]
    UnknownParameter { model: &'static str, key: String },
    #[error("model {model} requires parameter {key:?}")]
    MissingParameter { model: &'static str, key: &'static str },
    #[error("parameter {key:?} = {value} violates the constraint: {constraint}")]
    OutOfRange { key: &'static str, value: f64, constraint: &'static str },
    #[error("operation needs a {expected} model but got {got}")]
    WrongModelKind { expected: &'static str, got: String },
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
}

/// The six catalogued systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelName {
    ColdPlasma,
    EulerPoisson,
    RayleighBenard,
    StratifiedFluid,
    BloodFlow,
    Davidson,
}

impl ModelName {
    pub const ALL: [ModelName; 6] = [
        ModelName::ColdPlasma,
        ModelName::EulerPoisson,
        ModelName::RayleighBenard,
        ModelName::StratifiedFluid,
        ModelName::BloodFlow,
        ModelName::Davidson,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::ColdPlasma => "cold_plasma",
            ModelName::EulerPoisson => "euler_poisson",
            ModelName::RayleighBenard => "rayleigh_benard",
            ModelName::StratifiedFluid => "stratified_fluid",
            ModelName::BloodFlow => "blood_flow",
            ModelName::Davidson => "davidson",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ModelError::UnknownModel { name: s.to_string() })
    }
}

/// A closed-form global-smoothness test attached to a model: evaluating the
/// indicator on the initial data decides blow-up without any time horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCriterion {
    /// Two components (V₁, V₂) with rotation coupling:
    /// D(x) = (V₁′)² + 2V₂′ − 1, smooth iff D < 0 everywhere.
    TwoComponentRotation,
    /// Three components (V₁, V₂, E) with a constant transverse field:
    /// (V₁′)² + 2E′ + 2B₀V₂′ − B₀² − 1 < 0 everywhere.
    ThreeComponentMagnetized { b0: f64 },
}

impl ClosedFormCriterion {
    /// Evaluates the indicator on a grid of the profile's domain.
    pub fn evaluate(
        &self,
        prof: &InitialProfile,
        x_grid: &[f64],
    ) -> Result<CriterionReport, HyperbolicError> {
        match self {
            ClosedFormCriterion::TwoComponentRotation => criterion_cold_plasma(prof, x_grid),
            ClosedFormCriterion::ThreeComponentMagnetized { b0 } => {
                criterion_davidson(prof, *b0, x_grid)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClosedFormCriterion::TwoComponentRotation => "two_component_rotation",
            ClosedFormCriterion::ThreeComponentMagnetized { .. } => "three_component_magnetized",
        }
    }
}

/// A fully resolved model: system matrices, the parameters that produced
/// them (defaults filled in), and the criteria that apply.
#[derive(Debug, Clone)]
pub struct ModelEntry {
    pub name: ModelName,
    /// Resolved parameters, including defaulted ones.
    pub params: BTreeMap<String, f64>,
    pub spec: SystemSpec,
    pub criteria: Vec<ClosedFormCriterion>,
    pub notes: String,
}

/// One parameter slot in a model's schema.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub key: &'static str,
    pub required: bool,
    pub default: Option<f64>,
    pub constraint: &'static str,
}

/// Catalog listing for one model: its schema without building matrices.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: ModelName,
    pub components: usize,
    pub params: Vec<ParamSpec>,
    pub notes: &'static str,
}

fn schema_for(name: ModelName) -> CatalogEntry {
    let p = |key, required, default, constraint| ParamSpec { key, required, default, constraint };
    match name {
        ModelName::ColdPlasma => CatalogEntry {
            name,
            components: 2,
            params: vec![p("nu", false, None, "nu >= 0 (omit for the inviscid system)")],
            notes: "Electron oscillations: rotation coupling between velocity and field; \
                    optional viscosity acts on the velocity component only.",
        },
        ModelName::EulerPoisson => CatalogEntry {
            name,
            components: 2,
            params: vec![
                p("k", true, None, "any real (k < 0 is the attractive regime)"),
                p("n0", true, None, "n0 >= 0"),
                p("q", false, Some(0.0), "q >= 0 (friction)"),
                p("nu", false, None, "nu >= 0 (omit for the inviscid system)"),
            ],
            notes: "Pressureless Euler-Poisson flow with background density n0, coupling \
                    constant k, and friction q; k = n0 = 1, q = 0 recovers cold_plasma.",
        },
        ModelName::RayleighBenard => CatalogEntry {
            name,
            components: 2,
            params: vec![
                p("nu", false, Some(0.0), "nu >= 0 (viscosity)"),
                p("kappa", false, Some(0.0), "kappa >= 0 (thermal diffusivity)"),
            ],
            notes: "Convective instability model: the inviscid part coincides with \
                    cold_plasma; nu and kappa add diagonal dissipation.",
        },
        ModelName::StratifiedFluid => CatalogEntry {
            name,
            components: 2,
            params: vec![
                p("nu", false, Some(0.0), "nu >= 0 (viscosity)"),
                p("kappa", false, Some(0.0), "kappa >= 0 (diffusivity)"),
            ],
            notes: "Internal waves in a density-stratified fluid; structurally the same \
                    matrices as rayleigh_benard.",
        },
        ModelName::BloodFlow => CatalogEntry {
            name,
            components: 2,
            params: vec![
                p("mu", true, None, "mu >= 0 (wall viscosity)"),
                p("s0", true, None, "s0 > 0 (reference cross-section)"),
                p("p0", false, None, "reference pressure (needed for pressure readout)"),
                p("d", false, None, "wall rigidity (needed for pressure readout)"),
            ],
            notes: "Axisymmetric vessel flow (velocity, stretching field); the dissipation \
                    enters off-diagonally because the viscous term acts on the field \
                    inside the velocity equation.",
        },
        ModelName::Davidson => CatalogEntry {
            name,
            components: 3,
            params: vec![
                p("b0", true, None, "any real (transverse field strength)"),
                p("q", false, Some(0.0), "q >= 0 (friction)"),
            ],
            notes: "Magnetized electron flow with components (V1, V2, E); at b0 = 0 the \
                    transverse velocity decouples and the (V1, E) pair is cold_plasma.",
        },
    }
}

/// Schemas for every catalogued model.
pub fn catalog() -> Vec<CatalogEntry> {
    ModelName::ALL.into_iter().map(schema_for).collect()
}

/// Validates `params` against the model schema: rejects unknown keys and
/// constraint violations, fills defaults in, and returns the resolved map.
fn resolve_params(
    name: ModelName,
    params: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>, ModelError> {
    let schema = schema_for(name);
    let model = name.as_str();
    for key in params.keys() {
        if !schema.params.iter().any(|p| p.key == key) {
            return Err(ModelError::UnknownParameter { model, key: key.clone() });
        }
    }
    let mut resolved = BTreeMap::new();
    for p in &schema.params {
        match params.get(p.key) {
            Some(&v) => {
                if !v.is_finite() {
                    return Err(ModelError::OutOfRange {
                        key: p.key,
                        value: v,
                        constraint: "must be finite",
                    });
                }
                resolved.insert(p.key.to_string(), v);
            }
            None => {
                if p.required {
                    return Err(ModelError::MissingParameter { model, key: p.key });
                }
                if let Some(d) = p.default {
                    resolved.insert(p.key.to_string(), d);
                }
            }
        }
    }
    Ok(resolved)
}

fn require_nonnegative(resolved: &BTreeMap<String, f64>, key: &'static str) -> Result<(), ModelError> {
    if let Some(&v) = resolved.get(key) {
        if v < 0.0 {
            return Err(ModelError::OutOfRange { key, value: v, constraint: "must be >= 0" });
        }
    }
    Ok(())
}

/// Diagonal dissipation diag(a, b), collapsed to "no dissipation" when both
/// entries vanish so that inviscid builds compare equal to inviscid specs.
fn diag_dissipation(a: f64, b: f64) -> Option<Matrix> {
    if a == 0.0 && b == 0.0 {
        None
    } else {
        Some(Matrix::diag(&[a, b]).expect("two finite entries"))
    }
}

/// Builds the named model from its parameters.
pub fn build(name: ModelName, params: &BTreeMap<String, f64>) -> Result<ModelEntry, ModelError> {
    let resolved = resolve_params(name, params)?;
    // b0 and k may be any sign; s0 has a strict positivity check below.
    for key in ["nu", "kappa", "mu", "n0", "q"] {
        require_nonnegative(&resolved, key)?;
    }

    let get = |key: &str| resolved.get(key).copied();
    let (q, b) = match name {
        ModelName::ColdPlasma => {
            let q = Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).expect("2x2 literal");
            (q, diag_dissipation(get("nu").unwrap_or(0.0), 0.0))
        }
        ModelName::EulerPoisson => {
            let k = get("k").expect("required");
            let n0 = get("n0").expect("required");
            let friction = get("q").expect("defaulted");
            let q = Matrix::from_rows(&[&[-friction, -k], &[n0, 0.0]]).expect("2x2 literal");
            (q, diag_dissipation(get("nu").unwrap_or(0.0), 0.0))
        }
        ModelName::RayleighBenard | ModelName::StratifiedFluid => {
            let q = Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).expect("2x2 literal");
            (q, diag_dissipation(get("nu").expect("defaulted"), get("kappa").expect("defaulted")))
        }
        ModelName::BloodFlow => {
            let s0 = get("s0").expect("required");
            if s0 <= 0.0 {
                return Err(ModelError::OutOfRange {
                    key: "s0",
                    value: s0,
                    constraint: "must be > 0",
                });
            }
            let mu = get("mu").expect("required");
            let q = Matrix::from_rows(&[&[0.0, -1.0], &[s0, 0.0]]).expect("2x2 literal");
            let b = if mu == 0.0 {
                None
            } else {
                Some(Matrix::from_rows(&[&[0.0, mu], &[0.0, 0.0]]).expect("2x2 literal"))
            };
            (q, b)
        }
        ModelName::Davidson => {
            let b0 = get("b0").expect("required");
            let friction = get("q").expect("defaulted");
            let q = Matrix::from_rows(&[
                &[-friction, -b0, -1.0],
                &[b0, -friction, 0.0],
                &[1.0, 0.0, 0.0],
            ])
            .expect("3x3 literal");
            (q, None)
        }
    };

    let spec = SystemSpec::new(name.as_str(), q, b)?;

    let mut criteria = Vec::new();
    match name {
        ModelName::ColdPlasma => criteria.push(ClosedFormCriterion::TwoComponentRotation),
        ModelName::EulerPoisson => {
            // The closed-form test is known only where the system reduces to
            // the rotation coupling exactly.
            let reduces = get("k") == Some(1.0) && get("n0") == Some(1.0) && get("q") == Some(0.0);
            if reduces {
                criteria.push(ClosedFormCriterion::TwoComponentRotation);
            }
        }
        ModelName::Davidson if get("q") == Some(0.0) => {
            criteria.push(ClosedFormCriterion::ThreeComponentMagnetized {
                b0: get("b0").expect("required"),
            });
        }
        _ => {}
    }

    let notes = schema_for(name).notes.to_string();
    Ok(ModelEntry { name, params: resolved, spec, criteria, notes })
}

/// Wall pressure from the field gradient for a blood-flow entry:
/// P = P₀ − D·E_x. Both `p0` and `d` must have been supplied at build time.
pub fn pressure_from_e(entry: &ModelEntry, e_x: f64) -> Result<f64, ModelError> {
    if entry.name != ModelName::BloodFlow {
        return Err(ModelError::WrongModelKind {
            expected: "blood_flow",
            got: entry.name.to_string(),
        });
    }
    let p0 = entry.params.get("p0").copied().ok_or(ModelError::MissingParameter {
        model: "blood_flow",
        key: "p0",
    })?;
    let d = entry.params.get("d").copied().ok_or(ModelError::MissingParameter {
        model: "blood_flow",
        key: "d",
    })?;
    Ok(p0 - d * e_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::grid_solution;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn matrices_equal(a: &Matrix, b: &Matrix) -> bool {
        a.rows() == b.rows()
            && a.cols() == b.cols()
            && (0..a.rows()).all(|i| (0..a.cols()).all(|j| a.get(i, j) == b.get(i, j)))
    }

    #[test]
    fn cold_plasma_layout() {
        let inviscid = build(ModelName::ColdPlasma, &params(&[])).unwrap();
        assert_eq!(inviscid.spec.n, 2);
        assert!(inviscid.spec.b.is_none());
        assert_eq!(inviscid.spec.q.get(0, 1), -1.0);
        assert_eq!(inviscid.spec.q.get(1, 0), 1.0);
        assert_eq!(inviscid.criteria, vec![ClosedFormCriterion::TwoComponentRotation]);

        let viscous = build(ModelName::ColdPlasma, &params(&[("nu", 0.3)])).unwrap();
        let b = viscous.spec.b.as_ref().unwrap();
        assert_eq!(b.get(0, 0), 0.3);
        assert_eq!(b.get(1, 1), 0.0);
    }

    #[test]
    fn euler_poisson_at_unit_parameters_is_cold_plasma() {
        let ep = build(ModelName::EulerPoisson, &params(&[("k", 1.0), ("n0", 1.0)])).unwrap();
        let cp = build(ModelName::ColdPlasma, &params(&[])).unwrap();
        assert!(matrices_equal(&ep.spec.q, &cp.spec.q));
        assert!(ep.spec.b.is_none());
        assert_eq!(ep.criteria, cp.criteria);
        assert_eq!(ep.params["q"], 0.0, "friction defaults to zero");
    }

    #[test]
    fn euler_poisson_away_from_unit_parameters_has_no_criterion() {
        let ep = build(ModelName::EulerPoisson, &params(&[("k", 2.0), ("n0", 1.0)])).unwrap();
        assert!(ep.criteria.is_empty());
        assert_eq!(ep.spec.q.get(0, 1), -2.0);
        let frictional =
            build(ModelName::EulerPoisson, &params(&[("k", 1.0), ("n0", 1.0), ("q", 0.5)]))
                .unwrap();
        assert!(frictional.criteria.is_empty());
        assert_eq!(frictional.spec.q.get(0, 0), -0.5);
    }

    #[test]
    fn rayleigh_benard_without_dissipation_is_inviscid_rotation() {
        let rb = build(ModelName::RayleighBenard, &params(&[])).unwrap();
        let cp = build(ModelName::ColdPlasma, &params(&[])).unwrap();
        assert!(matrices_equal(&rb.spec.q, &cp.spec.q));
        assert!(rb.spec.b.is_none());

        let viscous =
            build(ModelName::RayleighBenard, &params(&[("nu", 0.1), ("kappa", 0.2)])).unwrap();
        let b = viscous.spec.b.as_ref().unwrap();
        assert_eq!(b.get(0, 0), 0.1);
        assert_eq!(b.get(1, 1), 0.2);
        assert_eq!(b.get(0, 1), 0.0);
    }

    #[test]
    fn stratified_fluid_shares_the_rayleigh_benard_structure() {
        let sf =
            build(ModelName::StratifiedFluid, &params(&[("nu", 0.3), ("kappa", 0.4)])).unwrap();
        let rb =
            build(ModelName::RayleighBenard, &params(&[("nu", 0.3), ("kappa", 0.4)])).unwrap();
        assert!(matrices_equal(&sf.spec.q, &rb.spec.q));
        assert!(matrices_equal(sf.spec.b.as_ref().unwrap(), rb.spec.b.as_ref().unwrap()));
    }

    #[test]
    fn blood_flow_layout_and_zero_viscosity_limit() {
        let bf = build(ModelName::BloodFlow, &params(&[("mu", 0.7), ("s0", 2.0)])).unwrap();
        assert_eq!(bf.spec.q.get(1, 0), 2.0);
        assert_eq!(bf.spec.q.get(0, 1), -1.0);
        let b = bf.spec.b.as_ref().unwrap();
        assert_eq!(b.get(0, 1), 0.7, "dissipation acts on the field inside the V equation");
        assert_eq!(b.get(0, 0), 0.0);
        assert_eq!(b.get(1, 0), 0.0);
        assert_eq!(b.get(1, 1), 0.0);

        let limit = build(ModelName::BloodFlow, &params(&[("mu", 0.0), ("s0", 1.0)])).unwrap();
        let cp = build(ModelName::ColdPlasma, &params(&[])).unwrap();
        assert!(matrices_equal(&limit.spec.q, &cp.spec.q));
        assert!(limit.spec.b.is_none());
        assert!(limit.criteria.is_empty(), "no closed-form test is claimed for this model");
    }

    #[test]
    fn davidson_layout_and_decoupling() {
        let d = build(ModelName::Davidson, &params(&[("b0", 1.5)])).unwrap();
        assert_eq!(d.spec.n, 3);
        assert_eq!(d.spec.q.get(0, 1), -1.5);
        assert_eq!(d.spec.q.get(1, 0), 1.5);
        assert_eq!(d.spec.q.get(0, 2), -1.0);
        assert_eq!(d.spec.q.get(2, 0), 1.0);
        assert_eq!(d.criteria, vec![ClosedFormCriterion::ThreeComponentMagnetized { b0: 1.5 }]);

        // At b0 = 0 the second component no longer talks to (V1, E).
        let decoupled = build(ModelName::Davidson, &params(&[("b0", 0.0)])).unwrap();
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert_eq!(decoupled.spec.q.get(i, j), 0.0);
        }

        let frictional = build(ModelName::Davidson, &params(&[("b0", 1.0), ("q", 0.2)])).unwrap();
        assert!(frictional.criteria.is_empty());
        assert_eq!(frictional.spec.q.get(0, 0), -0.2);
        assert_eq!(frictional.spec.q.get(1, 1), -0.2);
        assert_eq!(frictional.spec.q.get(2, 2), 0.0);
    }

    #[test]
    fn parameter_validation_rejects_bad_input() {
        assert!(matches!(
            build(ModelName::ColdPlasma, &params(&[("bogus", 1.0)])),
            Err(ModelError::UnknownParameter { .. })
        ));
        assert!(matches!(
            build(ModelName::EulerPoisson, &params(&[("n0", 1.0)])),
            Err(ModelError::MissingParameter { key: "k", .. })
        ));
        assert!(matches!(
            build(ModelName::EulerPoisson, &params(&[("k", 1.0), ("n0", -1.0)])),
            Err(ModelError::OutOfRange { key: "n0", .. })
        ));
        assert!(matches!(
            build(ModelName::BloodFlow, &params(&[("mu", 0.1), ("s0", 0.0)])),
            Err(ModelError::OutOfRange { key: "s0", .. })
        ));
        assert!(matches!(
            build(ModelName::Davidson, &params(&[("b0", 1.0), ("q", -0.1)])),
            Err(ModelError::OutOfRange { key: "q", .. })
        ));
        assert!(matches!(
            build(ModelName::ColdPlasma, &params(&[("nu", f64::NAN)])),
            Err(ModelError::OutOfRange { .. })
        ));
        assert!(matches!(
            "no_such_model".parse::<ModelName>(),
            Err(ModelError::UnknownModel { .. })
        ));
    }

    #[test]
    fn names_round_trip_and_catalog_is_complete() {
        for name in ModelName::ALL {
            let parsed: ModelName = name.as_str().parse().unwrap();
            assert_eq!(parsed, name);
        }
        let listing = catalog();
        assert_eq!(listing.len(), 6);
        let davidson = listing.iter().find(|e| e.name == ModelName::Davidson).unwrap();
        assert_eq!(davidson.components, 3);
        let bf = listing.iter().find(|e| e.name == ModelName::BloodFlow).unwrap();
        assert!(bf.params.iter().any(|p| p.key == "s0" && p.required));
    }

    #[test]
    fn every_model_keeps_zero_data_at_zero() {
        let builds: Vec<ModelEntry> = vec![
            build(ModelName::ColdPlasma, &params(&[])).unwrap(),
            build(ModelName::EulerPoisson, &params(&[("k", -0.5), ("n0", 2.0), ("q", 0.3)]))
                .unwrap(),
            build(ModelName::RayleighBenard, &params(&[])).unwrap(),
            build(ModelName::StratifiedFluid, &params(&[])).unwrap(),
            build(ModelName::BloodFlow, &params(&[("mu", 0.0), ("s0", 1.5)])).unwrap(),
            build(ModelName::Davidson, &params(&[("b0", 0.7)])).unwrap(),
        ];
        for entry in &builds {
            let n = entry.spec.n;
            let inviscid =
                SystemSpec::new(entry.name.as_str(), entry.spec.q.clone(), None).unwrap();
            let prof = InitialProfile::analytic(
                n,
                (-1.0, 1.0),
                true,
                move |_| vec![0.0; n],
                move |_| vec![0.0; n],
            )
            .unwrap();
            let grid: Vec<f64> = (0..9).map(|k| -1.0 + 0.25 * k as f64).collect();
            let sol = grid_solution(&inviscid, &prof, 1.0, &grid).unwrap();
            for v in &sol.v {
                assert!(v.iter().all(|c| c.abs() < 1e-12), "{} drifted", entry.name);
            }
        }
    }

    #[test]
    fn criterion_evaluation_dispatches_to_the_right_indicator() {
        let prof = InitialProfile::analytic(
            2,
            (-std::f64::consts::PI, std::f64::consts::PI),
            true,
            |x| vec![0.5 * x.sin(), 0.3 * x.cos()],
            |x| vec![0.5 * x.cos(), -0.3 * x.sin()],
        )
        .unwrap();
        let grid: Vec<f64> =
            (0..64).map(|k| -std::f64::consts::PI + k as f64 * std::f64::consts::PI / 32.0).collect();
        let via_enum =
            ClosedFormCriterion::TwoComponentRotation.evaluate(&prof, &grid).unwrap();
        let direct = criterion_cold_plasma(&prof, &grid).unwrap();
        assert_eq!(via_enum.max_value, direct.max_value);
        assert_eq!(via_enum.verdict, direct.verdict);
    }

    #[test]
    fn pressure_readout_follows_the_linear_law() {
        let bf = build(
            ModelName::BloodFlow,
            &params(&[("mu", 1.0), ("s0", 1.0), ("p0", 100.0), ("d", 2.0)]),
        )
        .unwrap();
        assert_eq!(pressure_from_e(&bf, 0.0).unwrap(), 100.0);
        assert_eq!(pressure_from_e(&bf, 3.0).unwrap(), 94.0);

        let rigid =
            build(ModelName::BloodFlow, &params(&[("mu", 1.0), ("s0", 1.0), ("p0", 7.0), ("d", 0.0)]))
                .unwrap();
        assert_eq!(pressure_from_e(&rigid, 123.0).unwrap(), 7.0);

        let no_pressure =
            build(ModelName::BloodFlow, &params(&[("mu", 1.0), ("s0", 1.0)])).unwrap();
        assert!(matches!(
            pressure_from_e(&no_pressure, 0.0),
            Err(ModelError::MissingParameter { key: "p0", .. })
        ));
        let cp = build(ModelName::ColdPlasma, &params(&[])).unwrap();
        assert!(matches!(
            pressure_from_e(&cp, 0.0),
            Err(ModelError::WrongModelKind { .. })
        ));
    }
}
