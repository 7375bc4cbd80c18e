//! Initial data V₀, V₀′ on an interval, entered either as analytic closures
//! or as sampled tables (spline-interpolated, derivative from the spline).

use std::fmt;
use std::sync::Arc;

use crate::numkit::{CubicSpline, NumError};

use super::HyperbolicError;

type VectorFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Number of interior probe points used to validate a profile on
/// construction (finiteness and value/derivative consistency).
pub const DERIVATIVE_CHECK_PROBES: usize = 16;

/// Relative tolerance for the claimed derivative against an O(h²) central
/// difference of the values at the probe points.
pub const DERIVATIVE_CHECK_RTOL: f64 = 1e-2;

enum Kind {
    Analytic {
        value: VectorFn,
        derivative: VectorFn,
    },
    Sampled {
        values: Vec<CubicSpline>,
        /// Present only when the caller supplied a derivative table;
        /// otherwise derivatives come from differentiating `values`.
        derivatives: Option<Vec<CubicSpline>>,
    },
}

impl Clone for Kind {
    fn clone(&self) -> Self {
        match self {
            Kind::Analytic { value, derivative } => Kind::Analytic {
                value: Arc::clone(value),
                derivative: Arc::clone(derivative),
            },
            Kind::Sampled { values, derivatives } => Kind::Sampled {
                values: values.clone(),
                derivatives: derivatives.clone(),
            },
        }
    }
}

/// C¹ initial data for one system: componentwise V₀(x) and V₀′(x) on a
/// stated interval, optionally periodic.
#[derive(Clone)]
pub struct InitialProfile {
    n: usize,
    domain: (f64, f64),
    periodic: bool,
    kind: Kind,
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialProfile")
            .field("n", &self.n)
            .field("domain", &self.domain)
            .field("periodic", &self.periodic)
            .field(
                "kind",
                &match self.kind {
                    Kind::Analytic { .. } => "analytic",
                    Kind::Sampled { .. } => "sampled",
                },
            )
            .finish()
    }
}

impl InitialProfile {
    /// Builds a profile from analytic closures for V₀ and V₀′.
    pub fn analytic<V, D>(
        n: usize,
        domain: (f64, f64),
        periodic: bool,
        value: V,
        derivative: D,
    ) -> Result<Self, HyperbolicError>
    where
        V: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        D: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        let prof = Self {
            n,
            domain,
            periodic,
            kind: Kind::Analytic {
                value: Arc::new(value),
                derivative: Arc::new(derivative),
            },
        };
        prof.validate()?;
        Ok(prof)
    }

    /// Builds a profile from a sampled table; derivatives are taken from the
    /// interpolating spline, so they are consistent by construction.
    pub fn sampled(
        xs: &[f64],
        values: &[Vec<f64>],
        periodic: bool,
    ) -> Result<Self, HyperbolicError> {
        let (n, splines) = component_splines(xs, values)?;
        let prof = Self {
            n,
            domain: (xs[0], xs[xs.len() - 1]),
            periodic,
            kind: Kind::Sampled { values: splines, derivatives: None },
        };
        prof.validate()?;
        Ok(prof)
    }

    /// Builds a profile from sampled values plus a caller-supplied sampled
    /// derivative; the two tables must be consistent under central
    /// differences (checked at [`DERIVATIVE_CHECK_PROBES`] probe points).
    pub fn sampled_with_derivative(
        xs: &[f64],
        values: &[Vec<f64>],
        derivatives: &[Vec<f64>],
        periodic: bool,
    ) -> Result<Self, HyperbolicError> {
        let (n, value_splines) = component_splines(xs, values)?;
        let (nd, deriv_splines) = component_splines(xs, derivatives)?;
        if nd != n {
            return Err(HyperbolicError::ComponentMismatch { expected: n, got: nd });
        }
        let prof = Self {
            n,
            domain: (xs[0], xs[xs.len() - 1]),
            periodic,
            kind: Kind::Sampled { values: value_splines, derivatives: Some(deriv_splines) },
        };
        prof.validate()?;
        Ok(prof)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    /// V₀ at `x`. Sampled periodic profiles wrap `x` into the domain first;
    /// analytic closures are trusted outside it.
    pub fn value(&self, x: f64) -> Vec<f64> {
        match &self.kind {
            Kind::Analytic { value, .. } => value(x),
            Kind::Sampled { values, .. } => {
                let x = self.fold_into_domain(x);
                values.iter().map(|s| s.eval(x)).collect()
            }
        }
    }

    /// V₀′ at `x`, with the same domain handling as [`Self::value`].
    pub fn derivative(&self, x: f64) -> Vec<f64> {
        match &self.kind {
            Kind::Analytic { derivative, .. } => derivative(x),
            Kind::Sampled { values, derivatives } => {
                let x = self.fold_into_domain(x);
                match derivatives {
                    Some(d) => d.iter().map(|s| s.eval(x)).collect(),
                    None => values.iter().map(|s| s.deriv(x)).collect(),
                }
            }
        }
    }

    fn fold_into_domain(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain;
        if self.periodic {
            lo + (x - lo).rem_euclid(hi - lo)
        } else {
            x.clamp(lo, hi)
        }
    }

    fn validate(&self) -> Result<(), HyperbolicError> {
        let (lo, hi) = self.domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(HyperbolicError::Numerics(NumError::InvalidArgument {
                arg: "domain",
                reason: format!("need finite lo < hi, got [{lo}, {hi}]"),
            }));
        }
        if self.n == 0 {
            return Err(HyperbolicError::Numerics(NumError::InvalidArgument {
                arg: "n",
                reason: "profile needs at least one component".into(),
            }));
        }
        let span = hi - lo;
        let h = span * 1e-4;
        for k in 0..DERIVATIVE_CHECK_PROBES {
            let x = lo + span * (k as f64 + 0.5) / DERIVATIVE_CHECK_PROBES as f64;
            let v = self.value(x);
            let d = self.derivative(x);
            if v.len() != self.n || d.len() != self.n {
                return Err(HyperbolicError::ComponentMismatch {
                    expected: self.n,
                    got: v.len().min(d.len()),
                });
            }
            if v.iter().chain(d.iter()).any(|t| !t.is_finite()) {
                return Err(HyperbolicError::Numerics(NumError::NonFinite {
                    context: format!("profile evaluation at x = {x}"),
                }));
            }
            let vp = self.value(x + h);
            let vm = self.value(x - h);
            for i in 0..self.n {
                let central = (vp[i] - vm[i]) / (2.0 * h);
                if (d[i] - central).abs() > DERIVATIVE_CHECK_RTOL * d[i].abs().max(1.0) {
                    return Err(HyperbolicError::InconsistentDerivative {
                        component: i,
                        x,
                        claimed: d[i],
                        estimated: central,
                    });
                }
            }
        }
        Ok(())
    }
}

fn component_splines(
    xs: &[f64],
    rows: &[Vec<f64>],
) -> Result<(usize, Vec<CubicSpline>), HyperbolicError> {
    if rows.len() != xs.len() || rows.is_empty() {
        return Err(HyperbolicError::Numerics(NumError::DimensionMismatch {
            context: format!("sampled table: {} nodes vs {} rows", xs.len(), rows.len()),
        }));
    }
    let n = rows[0].len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(HyperbolicError::Numerics(NumError::DimensionMismatch {
            context: "sampled table rows must all have the same nonzero length".into(),
        }));
    }
    let mut splines = Vec::with_capacity(n);
    for i in 0..n {
        let ys: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        splines.push(CubicSpline::new(xs, &ys)?);
    }
    Ok((n, splines))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn trig_profile() -> InitialProfile {
        InitialProfile::analytic(
            2,
            (-PI, PI),
            true,
            |x| vec![0.5 * x.sin(), 0.3 * x.cos()],
            |x| vec![0.5 * x.cos(), -0.3 * x.sin()],
        )
        .unwrap()
    }

    #[test]
    fn analytic_profile_evaluates_both_functions() {
        let p = trig_profile();
        assert_eq!(p.n(), 2);
        let v = p.value(0.7);
        let d = p.derivative(0.7);
        assert_abs_diff_eq!(v[0], 0.5 * 0.7_f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], -0.3 * 0.7_f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn inconsistent_analytic_derivative_is_rejected() {
        let r = InitialProfile::analytic(
            1,
            (0.0, 1.0),
            false,
            |x| vec![x * x],
            |_| vec![7.0], // wrong everywhere
        );
        match r {
            Err(HyperbolicError::InconsistentDerivative { claimed, .. }) => {
                assert_abs_diff_eq!(claimed, 7.0, epsilon = 0.0)
            }
            other => panic!("expected InconsistentDerivative, got {other:?}"),
        }
    }

    #[test]
    fn sampled_profile_tracks_the_underlying_function() {
        let xs: Vec<f64> = (0..129).map(|k| -PI + 2.0 * PI * k as f64 / 128.0).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x.sin(), x.cos()]).collect();
        let p = InitialProfile::sampled(&xs, &rows, true).unwrap();
        for &x in &[-2.0, -0.3, 0.9, 2.7] {
            let v = p.value(x);
            let d = p.derivative(x);
            assert_abs_diff_eq!(v[0], x.sin(), epsilon = 1e-6);
            assert_abs_diff_eq!(d[0], x.cos(), epsilon = 1e-4);
            assert_abs_diff_eq!(d[1], -x.sin(), epsilon = 1e-4);
        }
    }

    #[test]
    fn sampled_periodic_profile_wraps_queries() {
        let xs: Vec<f64> = (0..65).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x.sin()]).collect();
        let p = InitialProfile::sampled(&xs, &rows, true).unwrap();
        assert_abs_diff_eq!(p.value(0.4 + 2.0 * PI)[0], p.value(0.4)[0], epsilon = 1e-12);
    }

    #[test]
    fn wrong_sampled_derivative_table_is_rejected() {
        let xs: Vec<f64> = (0..33).map(|k| k as f64 / 32.0).collect();
        let vals: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x * x]).collect();
        let bad: Vec<Vec<f64>> = xs.iter().map(|_| vec![-1.0]).collect();
        assert!(matches!(
            InitialProfile::sampled_with_derivative(&xs, &vals, &bad, false),
            Err(HyperbolicError::InconsistentDerivative { .. })
        ));
    }

    #[test]
    fn consistent_sampled_derivative_table_is_accepted() {
        let xs: Vec<f64> = (0..65).map(|k| k as f64 / 64.0).collect();
        let vals: Vec<Vec<f64>> = xs.iter().map(|&x| vec![(2.0 * x).sin()]).collect();
        let ders: Vec<Vec<f64>> = xs.iter().map(|&x| vec![2.0 * (2.0 * x).cos()]).collect();
        let p = InitialProfile::sampled_with_derivative(&xs, &vals, &ders, false).unwrap();
        assert_abs_diff_eq!(p.derivative(0.25)[0], 2.0 * 0.5_f64.cos(), epsilon = 1e-4);
    }

    #[test]
    fn empty_domain_is_rejected() {
        assert!(InitialProfile::analytic(1, (1.0, 1.0), false, |_| vec![0.0], |_| vec![0.0])
            .is_err());
    }

    #[test]
    fn non_finite_profile_is_rejected() {
        // √x is NaN on the negative half of the domain.
        let r = InitialProfile::analytic(
            1,
            (-1.0, 1.0),
            false,
            |x| vec![x.sqrt()],
            |x| vec![0.5 / x.sqrt()],
        );
        assert!(matches!(r, Err(HyperbolicError::Numerics(NumError::NonFinite { .. }))));
    }
}
