//! Error norms, convergence orders, the tension search and maximum tracking.

use rayon::prelude::*;

use crate::basis::{nodal_weights, SplineParams};
use crate::error::{domain, BurgersError, Result};
use crate::init::CoefficientState;
use crate::problems::ProblemSpec;
use crate::stepper::run;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub linf_u: f64,
    pub linf_v: f64,
    pub argmax_x_u: f64,
    pub argmax_x_v: f64,
    pub n: usize,
    pub dt: f64,
    pub p: f64,
    pub t: f64,
}

impl ErrorReport {
    /// Larger of the two field errors.
    pub fn linf(&self) -> f64 {
        self.linf_u.max(self.linf_v)
    }
}

/// Largest entry and its index; ties go to the lowest index. NaN wins so that
/// a blown-up run is never reported as accurate.
fn argmax(xs: &[f64]) -> (usize, f64) {
    let mut best = (0, xs[0]);
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if best.1.is_nan() {
            break;
        }
        if x > best.1 || x.is_nan() {
            best = (i, x);
        }
    }
    best
}

/// Maximum absolute nodal error against the problem's exact solution at `state.t`.
pub fn linf_error(
    state: &CoefficientState,
    problem: &ProblemSpec,
    params: &SplineParams,
    dt: f64,
) -> Result<ErrorReport> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| BurgersError::NoExactSolution(problem.name.clone()))?;
    state.check_shape(params)?;
    let w = nodal_weights(params);
    let knots = params.knots();
    let t = state.t;
    let eu: Vec<f64> = state
        .nodal_u(&w)
        .iter()
        .zip(&knots)
        .map(|(u, &x)| ((exact.u)(x, t) - u).abs())
        .collect();
    let ev: Vec<f64> = state
        .nodal_v(&w)
        .iter()
        .zip(&knots)
        .map(|(v, &x)| ((exact.v)(x, t) - v).abs())
        .collect();
    let (iu, lu) = argmax(&eu);
    let (iv, lv) = argmax(&ev);
    Ok(ErrorReport {
        linf_u: lu,
        linf_v: lv,
        argmax_x_u: knots[iu],
        argmax_x_v: knots[iv],
        n: params.n(),
        dt,
        p: params.p(),
        t,
    })
}

/// Observed order `ln(e_coarse / e_fine) / ln(n_fine / n_coarse)`.
pub fn convergence_order(
    e_coarse: f64,
    e_fine: f64,
    n_coarse: usize,
    n_fine: usize,
) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0 && e_coarse.is_finite() && e_fine.is_finite()) {
        return domain(format!(
            "errors must be positive and finite ({e_coarse}, {e_fine})"
        ));
    }
    if n_coarse == 0 || n_fine <= n_coarse {
        return domain(format!(
            "need 0 < n_coarse < n_fine, got {n_coarse}, {n_fine}"
        ));
    }
    Ok((e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln())
}

pub const SEARCH_GRID_POINTS: usize = 40;
pub const SEARCH_REL_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_p: f64,
    pub best_value: f64,
    /// Every successful evaluation, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
    /// Candidates whose evaluation failed, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Minimises `objective` over `[lo, hi]` (both positive): a logarithmic grid of
/// [`SEARCH_GRID_POINTS`] samples, then golden-section search in `ln p` on the
/// bracket around the best sample until its relative width is below
/// [`SEARCH_REL_WIDTH`]. Any of `extra` inside the range is sampled as well.
///
/// Grid samples are evaluated in parallel. Failed evaluations are skipped.
pub fn minimise_log<F>(objective: F, lo: f64, hi: f64, extra: &[f64]) -> Result<SearchResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return domain(format!(
            "search bounds must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        ));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let steps = (SEARCH_GRID_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..SEARCH_GRID_POINTS)
        .map(|k| match k {
            0 => lo,
            k if k == SEARCH_GRID_POINTS - 1 => hi,
            k => (llo + (lhi - llo) * k as f64 / steps).exp(),
        })
        .collect();
    grid.extend(extra.iter().copied().filter(|&p| p >= lo && p <= hi));

    let mut result = SearchResult {
        best_p: f64::NAN,
        best_value: f64::INFINITY,
        evaluations: Vec::new(),
        skipped: Vec::new(),
    };
    let record = |res: &mut SearchResult, p: f64, v: Result<f64>| match v {
        Ok(v) if v.is_finite() => {
            res.evaluations.push((p, v));
            if v < res.best_value {
                res.best_value = v;
                res.best_p = p;
            }
        }
        Ok(v) => res.skipped.push((p, format!("non-finite objective {v}"))),
        Err(e) => res.skipped.push((p, e.to_string())),
    };

    let values: Vec<Result<f64>> = grid.par_iter().map(|&p| objective(p)).collect();
    for (&p, v) in grid.iter().zip(values) {
        record(&mut result, p, v);
    }
    if result.evaluations.is_empty() {
        return domain("every search candidate failed");
    }

    // Bracket the best grid sample by its grid neighbours, in log space.
    let lp = result.best_p.ln();
    let cell = (lhi - llo) / steps;
    let (mut a, mut b) = ((lp - cell).max(llo), (lp + cell).min(lhi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |res: &mut SearchResult, x: f64| -> f64 {
        let p = x.exp();
        let v = objective(p);
        let out = match &v {
            Ok(v) if v.is_finite() => *v,
            _ => f64::INFINITY,
        };
        record(res, p, v);
        out
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(&mut result, c);
    let mut fd = eval(&mut result, d);
    // relative width of [e^a, e^b] is about b - a
    while (b - a) > SEARCH_REL_WIDTH {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(&mut result, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(&mut result, d);
        }
    }
    Ok(result)
}

/// Searches the tension `p` in `[p_lo, p_hi]` minimising the nodal maximum
/// error at `t_final` (the larger of the `U` and `V` errors).
pub fn search_p(
    problem: &ProblemSpec,
    n: usize,
    dt: f64,
    t_final: f64,
    p_lo: f64,
    p_hi: f64,
) -> Result<SearchResult> {
    if problem.exact.is_none() {
        return Err(BurgersError::NoExactSolution(problem.name.clone()));
    }
    // validate the grid once so a bad N is an error rather than 40 skips
    let base = SplineParams::new(problem.a, problem.b, n, p_lo.max(f64::MIN_POSITIVE))?;
    let objective = |p: f64| -> Result<f64> {
        let params = base.with_tension(p)?;
        let out = run(problem, &params, dt, t_final, &[])?;
        Ok(linf_error(&out.final_state, problem, &params, dt)?.linf())
    };
    minimise_log(objective, p_lo, p_hi, &[1.0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntry {
    pub t: f64,
    pub max_u: f64,
    pub x_u: f64,
    pub max_v: f64,
    pub x_v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxReport {
    pub entries: Vec<MaxEntry>,
}

/// Largest nodal `U` and `V` of a state and the knots where they occur.
pub fn state_maxima(state: &CoefficientState, params: &SplineParams) -> MaxEntry {
    let w = nodal_weights(params);
    let knots = params.knots();
    let (iu, mu) = argmax(&state.nodal_u(&w));
    let (iv, mv) = argmax(&state.nodal_v(&w));
    MaxEntry {
        t: state.t,
        max_u: mu,
        x_u: knots[iu],
        max_v: mv,
        x_v: knots[iv],
    }
}

pub fn track_maxima(
    problem: &ProblemSpec,
    params: &SplineParams,
    dt: f64,
    snapshot_times: &[f64],
) -> Result<MaxReport> {
    let t_final = snapshot_times.iter().copied().fold(0.0, f64::max);
    let out = run(problem, params, dt, t_final, snapshot_times)?;
    Ok(MaxReport {
        entries: out
            .snapshots
            .iter()
            .map(|s| state_maxima(s, params))
            .collect(),
    })
}
