//! Coefficient state and the `t = 0` fit.

use crate::banded::{solve_tridiagonal, TridiagonalSystem};
use crate::basis::{eval_spline, nodal_weights, NodalValues, NodalWeights, SplineParams};
use crate::error::{domain, Result};
use crate::problems::{ProblemSpec, SpaceFn};

/// Spline coefficients of `U` (`delta`) and `V` (`phi`) at time `t`.
///
/// Both vectors hold `N + 3` entries for knot indices `-1..=N+1`; use
/// [`CoefficientState::delta_at`] for knot-indexed access.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientState {
    pub delta: Vec<f64>,
    pub phi: Vec<f64>,
    pub t: f64,
}

impl CoefficientState {
    pub fn zeros(n: usize, t: f64) -> Self {
        Self {
            delta: vec![0.0; n + 3],
            phi: vec![0.0; n + 3],
            t,
        }
    }

    /// Number of intervals the state was built for.
    pub fn n(&self) -> usize {
        self.delta.len() - 3
    }

    pub fn delta_at(&self, i: isize) -> f64 {
        self.delta[(i + 1) as usize]
    }

    pub fn phi_at(&self, i: isize) -> f64 {
        self.phi[(i + 1) as usize]
    }

    /// `(delta_{m-1}, delta_m, delta_{m+1})`
    pub fn delta_row(&self, m: usize) -> [f64; 3] {
        [self.delta[m], self.delta[m + 1], self.delta[m + 2]]
    }

    pub fn phi_row(&self, m: usize) -> [f64; 3] {
        [self.phi[m], self.phi[m + 1], self.phi[m + 2]]
    }

    /// Nodal `U` at every knot `x_0..=x_N`.
    pub fn nodal_u(&self, w: &NodalWeights) -> Vec<f64> {
        (0..=self.n())
            .map(|m| w.nodal_values(self.delta_row(m)).value)
            .collect()
    }

    pub fn nodal_v(&self, w: &NodalWeights) -> Vec<f64> {
        (0..=self.n())
            .map(|m| w.nodal_values(self.phi_row(m)).value)
            .collect()
    }

    /// `U` and its derivatives anywhere in `[a, b]`.
    pub fn eval_u(&self, x: f64, params: &SplineParams) -> NodalValues {
        eval_spline(&self.delta, x, params)
    }

    pub fn eval_v(&self, x: f64, params: &SplineParams) -> NodalValues {
        eval_spline(&self.phi, x, params)
    }

    pub(crate) fn check_shape(&self, params: &SplineParams) -> Result<()> {
        let want = params.n() + 3;
        if self.delta.len() != want || self.phi.len() != want {
            return domain(format!(
                "state has {}/{} coefficients, grid needs {want}",
                self.delta.len(),
                self.phi.len()
            ));
        }
        Ok(())
    }
}

/// Second-order one-sided difference of `f` at an end point.
fn end_slope(f: &SpaceFn, x: f64, h: f64, left: bool) -> f64 {
    if left {
        (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    } else {
        (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
    }
}

/// Coefficients `c_{-1..=N+1}` whose spline interpolates `values` at the knots
/// and has slopes `slope_a`, `slope_b` at the ends.
pub fn fit_coefficients(
    values: &[f64],
    slope_a: f64,
    slope_b: f64,
    w: &NodalWeights,
) -> Result<Vec<f64>> {
    let n1 = values.len();
    if n1 < 4 {
        return domain("fit needs at least four knots");
    }
    let a1 = w.alpha1;
    // Ghosts: c_{-1} = c_1 + U'_0 / beta_l, c_{N+1} = c_{N-1} + U'_N / beta_r.
    let mut lower = vec![a1; n1 - 1];
    let mut upper = vec![a1; n1 - 1];
    upper[0] = 2.0 * a1;
    lower[n1 - 2] = 2.0 * a1;
    let mut rhs = values.to_vec();
    rhs[0] -= a1 * slope_a / w.beta_l;
    rhs[n1 - 1] -= a1 * slope_b / w.beta_r;
    let sys = TridiagonalSystem::new(lower, vec![w.alpha2; n1], upper, rhs)?;
    let inner = solve_tridiagonal(&sys)?;
    let mut c = Vec::with_capacity(n1 + 2);
    c.push(inner[1] + slope_a / w.beta_l);
    c.extend_from_slice(&inner);
    c.push(inner[n1 - 2] + slope_b / w.beta_r);
    Ok(c)
}

/// Fits `U(x, 0) = f` and `V(x, 0) = g` at the knots with matching end slopes.
pub fn fit_initial(problem: &ProblemSpec, params: &SplineParams) -> Result<CoefficientState> {
    let w = nodal_weights(params);
    let knots = params.knots();
    let (a, b, h) = (params.a(), params.b(), params.h());
    let fit = |f: &SpaceFn, df: &Option<SpaceFn>| -> Result<Vec<f64>> {
        let values: Vec<f64> = knots.iter().map(|&x| f(x)).collect();
        let (sa, sb) = match df {
            Some(d) => (d(a), d(b)),
            None => (end_slope(f, a, h, true), end_slope(f, b, h, false)),
        };
        fit_coefficients(&values, sa, sb, &w)
    };
    Ok(CoefficientState {
        delta: fit(&problem.f, &problem.df)?,
        phi: fit(&problem.g, &problem.dg)?,
        t: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{problem1, ProblemSpec};
    use std::sync::Arc;

    #[test]
    fn constant_is_reproduced() {
        let sp = SplineParams::new(0.0, 1.0, 12, 2.0).unwrap();
        let w = nodal_weights(&sp);
        let pr = ProblemSpec::new(
            "const",
            (0.0, 0.0, 0.0),
            (0.0, 1.0),
            Arc::new(|_| 3.0),
            Arc::new(|_| -1.0),
        )
        .with_initial_slopes(Arc::new(|_| 0.0), Arc::new(|_| 0.0));
        let st = fit_initial(&pr, &sp).unwrap();
        for u in st.nodal_u(&w) {
            assert!((u - 3.0).abs() < 1e-13);
        }
        for d in &st.delta {
            assert!((d - 3.0 / (1.0 + 2.0 * w.alpha1)).abs() < 1e-13);
        }
    }

    #[test]
    fn problem1_interpolates_sine() {
        let pi = std::f64::consts::PI;
        let sp = SplineParams::new(-pi, pi, 200, 1.0).unwrap();
        let w = nodal_weights(&sp);
        let st = fit_initial(&problem1(), &sp).unwrap();
        assert_eq!(st.delta.len(), 203);
        for (u, x) in st.nodal_u(&w).iter().zip(sp.knots()) {
            assert!((u - x.sin()).abs() < 1e-10);
        }
        assert_eq!(st.delta, st.phi);
        let left = w.nodal_values(st.delta_row(0));
        assert!((left.d1 - (-pi).cos()).abs() < 1e-9);
        let right = w.nodal_values(st.delta_row(200));
        assert!((right.d1 - pi.cos()).abs() < 1e-9);
    }

    #[test]
    fn differenced_slopes_when_not_supplied() {
        let sp = SplineParams::new(0.0, 2.0, 40, 1.0).unwrap();
        let w = nodal_weights(&sp);
        let pr = ProblemSpec::new(
            "quad",
            (0.0, 0.0, 0.0),
            (0.0, 2.0),
            Arc::new(|x| x * x),
            Arc::new(|x| x * x),
        );
        let st = fit_initial(&pr, &sp).unwrap();
        let d = w.nodal_values(st.delta_row(40)).d1;
        // second-order differences are exact for quadratics
        assert!((d - 4.0).abs() < 1e-9);
    }
}
