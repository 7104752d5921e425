//! Crank–Nicolson collocation step with Rubin–Graves linearisation.
//!
//! At every knot `x_m`, `m = 0..=N`, the time-discrete equations
//!
//! ```text
//! (2/dt + k1 K2 + k2 L2) U + (k1 K1 + k2 L1) U_x - U_xx + k2 K2 V + k2 K1 V_x = 2/dt U^n + U_xx^n
//! (2/dt + k1 L2 + k3 K2) V + (k1 L1 + k3 K1) V_x - V_xx + k3 L2 U + k3 L1 U_x = 2/dt V^n + V_xx^n
//! ```
//!
//! are collocated, where `K1, K2, L1, L2` are `U, U_x, V, V_x` at the old time
//! level. The unknowns are ordered `(delta_0, phi_0, delta_1, phi_1, ...)`, which
//! gives a matrix with three diagonals on either side of the main one.

use crate::banded::BandedMatrix;
use crate::basis::{nodal_weights, NodalWeights, SplineParams};
use crate::error::{domain, Result};
use crate::init::{fit_initial, CoefficientState};
use crate::problems::ProblemSpec;

/// `U, U_x, V, V_x` of the current state at each knot.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearWeights {
    /// `K1`
    pub u: Vec<f64>,
    /// `K2`
    pub ux: Vec<f64>,
    /// `L1`
    pub v: Vec<f64>,
    /// `L2`
    pub vx: Vec<f64>,
}

pub fn nonlinear_weights(state: &CoefficientState, w: &NodalWeights) -> NonlinearWeights {
    let n = state.n();
    let mut out = NonlinearWeights {
        u: Vec::with_capacity(n + 1),
        ux: Vec::with_capacity(n + 1),
        v: Vec::with_capacity(n + 1),
        vx: Vec::with_capacity(n + 1),
    };
    for m in 0..=n {
        let du = w.nodal_values(state.delta_row(m));
        let dv = w.nodal_values(state.phi_row(m));
        out.u.push(du.value);
        out.ux.push(du.d1);
        out.v.push(dv.value);
        out.vx.push(dv.d1);
    }
    out
}

/// Collocation coefficients at one knot.
///
/// `u_row` multiplies `(delta_{m-1}, phi_{m-1}, delta_m, phi_m, delta_{m+1}, phi_{m+1})`
/// at the new level in the `U` equation, `v_row` the same unknowns in the `V`
/// equation, and `rhs` multiplies `(c_{m-1}, c_m, c_{m+1})` of the old level in
/// either equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuCoefficients {
    pub u_row: [f64; 6],
    pub v_row: [f64; 6],
    pub rhs: [f64; 3],
}

impl NuCoefficients {
    /// Coefficient by its conventional number: 1–6 for `u_row`, 7–9 for `rhs`,
    /// 10–15 for `v_row`.
    pub fn get(&self, k: usize) -> f64 {
        match k {
            1..=6 => self.u_row[k - 1],
            7..=9 => self.rhs[k - 7],
            10..=15 => self.v_row[k - 10],
            _ => panic!("coefficient index {k} out of range 1..=15"),
        }
    }
}

pub fn nu_coefficients(
    m: usize,
    nw: &NonlinearWeights,
    w: &NodalWeights,
    dt: f64,
    (k1, k2, k3): (f64, f64, f64),
) -> NuCoefficients {
    let (uu, ux, vv, vx) = (nw.u[m], nw.ux[m], nw.v[m], nw.vx[m]);
    let r = 2.0 / dt;
    let NodalWeights {
        alpha1,
        alpha2,
        beta_l,
        beta_r,
        gamma1,
        gamma2,
    } = *w;

    let self_u = r + k1 * ux + k2 * vx;
    let conv_u = k1 * uu + k2 * vv;
    let cross_u = k2 * ux;
    let cross_ux = k2 * uu;

    let self_v = r + k1 * vx + k3 * ux;
    let conv_v = k1 * vv + k3 * uu;
    let cross_v = k3 * vx;
    let cross_vx = k3 * vv;

    NuCoefficients {
        u_row: [
            self_u * alpha1 + conv_u * beta_l - gamma1,
            cross_u * alpha1 + cross_ux * beta_l,
            self_u * alpha2 - gamma2,
            cross_u * alpha2,
            self_u * alpha1 + conv_u * beta_r - gamma1,
            cross_u * alpha1 + cross_ux * beta_r,
        ],
        v_row: [
            cross_v * alpha1 + cross_vx * beta_l,
            self_v * alpha1 + conv_v * beta_l - gamma1,
            cross_v * alpha2,
            self_v * alpha2 - gamma2,
            cross_v * alpha1 + cross_vx * beta_r,
            self_v * alpha1 + conv_v * beta_r - gamma1,
        ],
        rhs: [
            r * alpha1 + gamma1,
            r * alpha2 + gamma2,
            r * alpha1 + gamma1,
        ],
    }
}

/// Reduced collocation system for the `2N + 2` interior-and-boundary
/// coefficients after the four ghost coefficients are eliminated.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

impl AssembledSystem {
    pub fn solve(&self) -> Result<Vec<f64>> {
        self.matrix.solve(&self.rhs)
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return domain(format!("time step dt={dt} must be positive and finite"));
    }
    Ok(())
}

/// Builds the system for advancing `state` to `t_next`.
///
/// Ghost coefficients at the new level are eliminated with the Dirichlet data
/// at `t_next`; the old-level ghosts are taken from `state` as they stand.
pub fn assemble(
    state: &CoefficientState,
    problem: &ProblemSpec,
    params: &SplineParams,
    dt: f64,
    t_next: f64,
) -> Result<AssembledSystem> {
    check_dt(dt)?;
    state.check_shape(params)?;
    let w = nodal_weights(params);
    let n = params.n();
    let dim = 2 * n + 2;
    let nw = nonlinear_weights(state, &w);
    let ks = (problem.k1, problem.k2, problem.k3);
    let a1 = w.alpha1;

    let left = [(problem.f1)(t_next), (problem.g1)(t_next)];
    let right = [(problem.f2)(t_next), (problem.g2)(t_next)];

    let mut matrix = BandedMatrix::zeros(dim, 3, 3);
    let mut rhs = vec![0.0; dim];
    for m in 0..=n {
        let nu = nu_coefficients(m, &nw, &w, dt, ks);
        let old = [state.delta_row(m), state.phi_row(m)];
        for (field, row_coeffs) in [nu.u_row, nu.v_row].iter().enumerate() {
            let row = 2 * m + field;
            let prev = old[field];
            rhs[row] = nu.rhs[0] * prev[0] + nu.rhs[1] * prev[1] + nu.rhs[2] * prev[2];
            for (j, &cf) in row_coeffs.iter().enumerate() {
                let knot = m as isize - 1 + (j / 2) as isize;
                let comp = j % 2;
                if knot < 0 {
                    // c_{-1} = (bc - c_0 - alpha1 c_1) / alpha1
                    matrix.add(row, comp, -cf / a1);
                    matrix.add(row, 2 + comp, -cf);
                    rhs[row] -= cf * left[comp] / a1;
                } else if knot as usize > n {
                    // c_{N+1} = (bc - alpha1 c_{N-1} - c_N) / alpha1
                    matrix.add(row, 2 * (n - 1) + comp, -cf);
                    matrix.add(row, 2 * n + comp, -cf / a1);
                    rhs[row] -= cf * right[comp] / a1;
                } else {
                    matrix.add(row, 2 * knot as usize + comp, cf);
                }
            }
        }
    }
    Ok(AssembledSystem { matrix, rhs })
}

/// Expands a reduced solution into a full state, restoring the ghosts from the
/// boundary data at `t`.
pub fn expand_solution(
    z: &[f64],
    problem: &ProblemSpec,
    w: &NodalWeights,
    t: f64,
) -> CoefficientState {
    let n = z.len() / 2 - 1;
    let mut st = CoefficientState::zeros(n, t);
    for m in 0..=n {
        st.delta[m + 1] = z[2 * m];
        st.phi[m + 1] = z[2 * m + 1];
    }
    let a1 = w.alpha1;
    let ghost_left = |bc: f64, c0: f64, c1: f64| (bc - w.alpha2 * c0 - a1 * c1) / a1;
    let ghost_right = |bc: f64, cm: f64, cn: f64| (bc - a1 * cm - w.alpha2 * cn) / a1;
    st.delta[0] = ghost_left((problem.f1)(t), st.delta[1], st.delta[2]);
    st.phi[0] = ghost_left((problem.g1)(t), st.phi[1], st.phi[2]);
    st.delta[n + 2] = ghost_right((problem.f2)(t), st.delta[n], st.delta[n + 1]);
    st.phi[n + 2] = ghost_right((problem.g2)(t), st.phi[n], st.phi[n + 1]);
    st
}

/// Advances `state` to `t_next` with step `dt` (one linear solve).
pub fn step_to(
    state: &CoefficientState,
    problem: &ProblemSpec,
    params: &SplineParams,
    dt: f64,
    t_next: f64,
) -> Result<CoefficientState> {
    let sys = assemble(state, problem, params, dt, t_next)?;
    let z = sys.solve()?;
    Ok(expand_solution(&z, problem, &nodal_weights(params), t_next))
}

/// Advances `state` by one step of size `dt`.
pub fn step(
    state: &CoefficientState,
    problem: &ProblemSpec,
    params: &SplineParams,
    dt: f64,
) -> Result<CoefficientState> {
    step_to(state, problem, params, dt, state.t + dt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub final_state: CoefficientState,
    /// One state per requested snapshot time, in the order requested.
    pub snapshots: Vec<CoefficientState>,
}

/// Number of steps of size `dt` that reach `t`, if `t` is a multiple of `dt`.
pub fn steps_for(t: f64, dt: f64) -> Result<usize> {
    check_dt(dt)?;
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("time {t} must be finite and non-negative"));
    }
    let k = (t / dt).round();
    if (k * dt - t).abs() > 1e-9 * t.max(dt) {
        return domain(format!("time {t} is not a multiple of dt={dt}"));
    }
    Ok(k as usize)
}

/// Fits the initial data and steps to `t_final`, capturing the requested
/// snapshot times (each a multiple of `dt`, at most `t_final`).
pub fn run(
    problem: &ProblemSpec,
    params: &SplineParams,
    dt: f64,
    t_final: f64,
    snapshot_times: &[f64],
) -> Result<RunOutput> {
    let total = steps_for(t_final, dt)?;
    let marks = snapshot_times
        .iter()
        .map(|&t| {
            let k = steps_for(t, dt)?;
            if k > total {
                return domain(format!("snapshot time {t} lies beyond t_final={t_final}"));
            }
            Ok(k)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut state = fit_initial(problem, params)?;
    let mut snapshots: Vec<Option<CoefficientState>> = vec![None; marks.len()];
    let mut capture = |k: usize, st: &CoefficientState| {
        for (slot, &mk) in snapshots.iter_mut().zip(&marks) {
            if mk == k {
                *slot = Some(st.clone());
            }
        }
    };
    capture(0, &state);
    for k in 1..=total {
        state = step_to(&state, problem, params, dt, k as f64 * dt)?;
        capture(k, &state);
    }
    Ok(RunOutput {
        final_state: state,
        snapshots: snapshots
            .into_iter()
            .map(|s| s.expect("every mark visited"))
            .collect(),
    })
}
