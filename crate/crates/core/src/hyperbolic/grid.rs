//! Solution values on a fixed spatial grid, reconstructed from
//! characteristics: shoot from a refined set of feet x₀, land at positions
//! x(t; x₀), then interpolate back onto the requested grid.

use crate::numkit::{expm, Pchip};

use super::{augmented_matrix, HyperbolicError, InitialProfile, SystemSpec};

/// Shooting density: characteristics per requested grid interval.
pub const SHOOTING_REFINEMENT: usize = 4;

/// Solution snapshot at one time on a spatial grid.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub t: f64,
    /// The requested grid (copied through).
    pub x: Vec<f64>,
    /// v[j] = solution vector at x[j].
    pub v: Vec<Vec<f64>>,
    /// dv[j] = spatial derivative estimates u/q at x[j].
    pub dv: Vec<Vec<f64>>,
}

/// Reconstructs V(t, ·) and V_x(t, ·) on `x_grid` by the method of
/// characteristics. Valid strictly before gradient blow-up: every shooting
/// point must keep q > 0 and the landing positions must stay increasing.
pub fn grid_solution(
    sys: &SystemSpec,
    prof: &InitialProfile,
    t: f64,
    x_grid: &[f64],
) -> Result<GridSolution, HyperbolicError> {
    if prof.n() != sys.n {
        return Err(HyperbolicError::ComponentMismatch { expected: sys.n, got: prof.n() });
    }
    if x_grid.is_empty() {
        return Err(HyperbolicError::Numerics(crate::numkit::NumError::InvalidArgument {
            arg: "x_grid",
            reason: "grid must be non-empty".into(),
        }));
    }
    for w in x_grid.windows(2) {
        // Written so that NaN entries fail the comparison and are rejected.
        let ordered = w[1] > w[0];
        if !ordered {
            return Err(HyperbolicError::Numerics(crate::numkit::NumError::InvalidArgument {
                arg: "x_grid",
                reason: format!("grid must be strictly increasing; found {} then {}", w[0], w[1]),
            }));
        }
    }
    let (lo, hi) = prof.domain();
    for &x in x_grid {
        if !prof.contains(x) {
            return Err(HyperbolicError::OutOfDomain { x0: x, lo, hi });
        }
    }

    let n = sys.n;
    let feet = shooting_feet(prof, x_grid);
    let e = expm(&augmented_matrix(sys), t)?;

    // One characteristic per foot: position, state, derivative numerators.
    let mut pos = Vec::with_capacity(feet.len());
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(feet.len());
    let mut slopes: Vec<Vec<f64>> = Vec::with_capacity(feet.len());
    for &x0 in &feet {
        let mut aug_v = Vec::with_capacity(n + 1);
        aug_v.push(0.0);
        aug_v.extend(prof.value(x0));
        let mut aug_q = Vec::with_capacity(n + 1);
        aug_q.push(1.0);
        aug_q.extend(prof.derivative(x0));
        let moved = e.matvec(&aug_v);
        let jac = e.matvec(&aug_q);
        let q = jac[0];
        if q <= 0.0 {
            return Err(HyperbolicError::NonPositiveQ { q, x0, t });
        }
        pos.push(x0 + moved[0]);
        states.push(moved[1..].to_vec());
        slopes.push(jac[1..].iter().map(|u| u / q).collect());
    }

    // For a periodic profile the characteristic map commutes with the period
    // shift, so one period of landing positions tiles the line: close the
    // table with the shifted first node and wrap queries into its range.
    let period = if prof.periodic() { Some(hi - lo) } else { None };
    let mut feet_ext = feet.clone();
    if let Some(l) = period {
        pos.push(pos[0] + l);
        states.push(states[0].clone());
        slopes.push(slopes[0].clone());
        feet_ext.push(feet[0] + l);
    }

    for j in 1..pos.len() {
        if pos[j] <= pos[j - 1] {
            return Err(HyperbolicError::CharacteristicsCross {
                t,
                x0_left: feet_ext[j - 1],
                x0_right: feet_ext[j],
                x_left: pos[j - 1],
                x_right: pos[j],
            });
        }
    }

    let mut v_interp = Vec::with_capacity(n);
    let mut dv_interp = Vec::with_capacity(n);
    for i in 0..n {
        let vi: Vec<f64> = states.iter().map(|s| s[i]).collect();
        let di: Vec<f64> = slopes.iter().map(|s| s[i]).collect();
        v_interp.push(Pchip::new(&pos, &vi)?);
        dv_interp.push(Pchip::new(&pos, &di)?);
    }

    let mut v = Vec::with_capacity(x_grid.len());
    let mut dv = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let xq = match period {
            Some(l) => pos[0] + (x - pos[0]).rem_euclid(l),
            None => {
                let (p_lo, p_hi) = (pos[0], pos[pos.len() - 1]);
                if x < p_lo || x > p_hi {
                    return Err(HyperbolicError::CoverageGap { x, lo: p_lo, hi: p_hi });
                }
                x
            }
        };
        v.push(v_interp.iter().map(|p| p.eval(xq)).collect());
        dv.push(dv_interp.iter().map(|p| p.eval(xq)).collect());
    }

    Ok(GridSolution { t, x: x_grid.to_vec(), v, dv })
}

/// Refines `x_grid` by [`SHOOTING_REFINEMENT`]; periodic profiles shoot over
/// one full period [lo, hi) so the landing table can wrap, dropping a final
/// grid point that duplicates lo + period.
fn shooting_feet(prof: &InitialProfile, x_grid: &[f64]) -> Vec<f64> {
    let (lo, hi) = prof.domain();
    let r = SHOOTING_REFINEMENT;
    let mut feet = Vec::with_capacity(x_grid.len() * r + 2 * r);

    let mut refine_into = |a: f64, b: f64, include_b: bool| {
        for k in 0..r {
            feet.push(a + (b - a) * k as f64 / r as f64);
        }
        if include_b {
            feet.push(b);
        }
    };

    if prof.periodic() {
        let l = hi - lo;
        let last = x_grid[x_grid.len() - 1];
        let effective_last = if (last - (x_grid[0] + l)).abs() <= 1e-12 * l.max(1.0) {
            x_grid.len() - 1 // endpoint duplicates the start modulo the period
        } else {
            x_grid.len()
        };
        let pts = &x_grid[..effective_last];
        for j in 0..pts.len() {
            let a = pts[j];
            let b = if j + 1 < pts.len() { pts[j + 1] } else { pts[0] + l };
            refine_into(a, b, false);
        }
    } else {
        // Cover the whole domain so queries near the boundary stay inside
        // the landing range whenever the flow allows it.
        if x_grid[0] > lo {
            refine_into(lo, x_grid[0], false);
        }
        for j in 0..x_grid.len() - 1 {
            refine_into(x_grid[j], x_grid[j + 1], false);
        }
        if x_grid[x_grid.len() - 1] < hi {
            refine_into(x_grid[x_grid.len() - 1], hi, true);
        } else {
            feet.push(x_grid[x_grid.len() - 1]);
        }
    }
    feet
}
