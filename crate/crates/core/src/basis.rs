//! Exponential cubic B-splines on a uniform grid.
//!
//! Each basis function `B_i` is supported on `[x_{i-2}, x_{i+2}]` and is built
//! piecewise from `{1, x, e^{px}, e^{-px}}`. Evaluation goes through the
//! truncated form
//!
//! ```text
//! B_i(x) = G * ( S(2h - r)_+ - 2(1 + cosh ph) * S(h - r)_+ ),   r = |x - x_i|
//! S(w)   = (sinh(pw) - pw) / p^3,   G = p^3 / (2(ph cosh ph - sinh ph))
//! ```
//!
//! with every ratio expanded in power series when its argument is below one.
//! The expansion removes the cancellation in `sinh(ph) - ph` that otherwise
//! destroys the nodal weights once `ph` drops under about `1e-3`.

use crate::error::{domain, Result};

/// Arguments below this magnitude use the power series; above it the closed
/// forms lose at most one digit.
const SERIES_CUTOFF: f64 = 1.0;
const SERIES_TERMS: usize = 14;
const MAX_PH: f64 = 300.0;

/// Sum of `v^{2j} * weight(j) / (2j + k)!` for `j = 0..SERIES_TERMS`.
fn even_series(v: f64, k: u32, weight: impl Fn(f64) -> f64) -> f64 {
    let v2 = v * v;
    let mut inv_fact = 1.0;
    for q in 2..=k {
        inv_fact /= q as f64;
    }
    let mut term = inv_fact;
    let mut sum = 0.0;
    for j in 0..SERIES_TERMS {
        sum += weight(j as f64) * term;
        let m = (2 * j) as f64 + k as f64;
        term *= v2 / ((m + 1.0) * (m + 2.0));
    }
    sum
}

/// `(sinh v - v) / v^3`
pub(crate) fn sinh_cubic(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        even_series(v, 3, |_| 1.0)
    } else {
        (v.sinh() - v) / (v * v * v)
    }
}

/// `(cosh v - 1) / v^2`
pub(crate) fn cosh_quadratic(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        even_series(v, 2, |_| 1.0)
    } else {
        (v.cosh() - 1.0) / (v * v)
    }
}

/// `sinh v / v`
pub(crate) fn sinhc(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        even_series(v, 1, |_| 1.0)
    } else {
        v.sinh() / v
    }
}

/// `(v cosh v - sinh v) / v^3`, the scaled denominator of every nodal weight.
pub(crate) fn tension_denominator(v: f64) -> f64 {
    if v.abs() < SERIES_CUTOFF {
        even_series(v, 3, |j| 2.0 * j + 2.0)
    } else {
        (v * v.cosh() - v.sinh()) / (v * v * v)
    }
}

/// Uniform partition of `[a, b]` together with the tension parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineParams {
    a: f64,
    b: f64,
    n: usize,
    p: f64,
    h: f64,
    s: f64,
    c: f64,
}

impl SplineParams {
    pub fn new(a: f64, b: f64, n: usize, p: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && p.is_finite()) {
            return domain(format!("non-finite grid input (a={a}, b={b}, p={p})"));
        }
        if n < 3 {
            return domain(format!("partition count N={n} must be at least 3"));
        }
        if b <= a {
            return domain(format!("empty interval [{a}, {b}]"));
        }
        if p <= 0.0 {
            return domain(format!("tension parameter p={p} must be positive"));
        }
        let h = (b - a) / n as f64;
        let ph = p * h;
        // sinh(2ph) must stay finite inside the basis evaluation
        if ph > MAX_PH {
            return domain(format!("p*h={ph} exceeds {MAX_PH}"));
        }
        let (s, c) = (ph.sinh(), ph.cosh());
        Ok(Self {
            a,
            b,
            n,
            p,
            h,
            s,
            c,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of intervals `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `sinh(p h)`
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `cosh(p h)`
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ph(&self) -> f64 {
        self.p * self.h
    }

    /// Knot `x_i`; `i` may address the ghost knots `-1` and `N + 1` (or further out).
    pub fn knot(&self, i: isize) -> f64 {
        if i == self.n as isize {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    /// Interior and boundary knots `x_0..=x_N`.
    pub fn knots(&self) -> Vec<f64> {
        (0..=self.n as isize).map(|i| self.knot(i)).collect()
    }

    /// Returns a copy with a different tension and the same grid.
    pub fn with_tension(&self, p: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.n, p)
    }

    /// `G h^3 = h^3 p^3 / (2(phc - s))`, finite as `p -> 0`.
    fn scale(&self) -> f64 {
        0.5 / tension_denominator(self.ph())
    }
}

/// Values of `B_i` and its first two derivatives at the knots adjacent to `x_i`,
/// arranged as the coefficients of the nodal identities
///
/// ```text
/// U(x_m)   = alpha1 c_{m-1} + alpha2 c_m + alpha1 c_{m+1}
/// U'(x_m)  = beta_l c_{m-1}              + beta_r c_{m+1}
/// U''(x_m) = gamma1 c_{m-1} + gamma2 c_m + gamma1 c_{m+1}
/// ```
///
/// `beta_l = B_{m-1}'(x_m)` is negative and `beta_r = B_{m+1}'(x_m)` positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalWeights {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta_l: f64,
    pub beta_r: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl NodalWeights {
    /// `(value, first derivative, second derivative)` at a knot from the three
    /// coefficients `(c_{m-1}, c_m, c_{m+1})`.
    pub fn nodal_values(&self, row: [f64; 3]) -> NodalValues {
        let [l, m, r] = row;
        NodalValues {
            value: self.alpha1 * l + self.alpha2 * m + self.alpha1 * r,
            d1: self.beta_l * l + self.beta_r * r,
            d2: self.gamma1 * l + self.gamma2 * m + self.gamma1 * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalValues {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn nodal_values(row: [f64; 3], weights: &NodalWeights) -> NodalValues {
    weights.nodal_values(row)
}

pub fn nodal_weights(params: &SplineParams) -> NodalWeights {
    let u = params.ph();
    let h = params.h();
    let g = params.scale();
    let alpha1 = g * sinh_cubic(u);
    let beta_r = g * cosh_quadratic(u) / h;
    let gamma1 = g * sinhc(u) / (h * h);
    NodalWeights {
        alpha1,
        alpha2: 1.0,
        beta_l: -beta_r,
        beta_r,
        gamma1,
        gamma2: -2.0 * gamma1,
    }
}

/// Value and derivatives of `B_i` at `x`, as `[B, B', B'']`.
fn basis_all(i: isize, x: f64, params: &SplineParams) -> [f64; 3] {
    let h = params.h();
    let p = params.p();
    let offset = x - params.knot(i);
    let r = offset.abs();
    if r >= 2.0 * h {
        return [0.0; 3];
    }
    let g = params.scale() / (h * h * h);
    let far = 2.0 * h - r;
    let mut value = far * far * far * sinh_cubic(p * far);
    let mut slope = -far * far * cosh_quadratic(p * far);
    let mut curve = far * sinhc(p * far);
    if r < h {
        let near = h - r;
        let w = 2.0 * (1.0 + params.c());
        value -= w * near * near * near * sinh_cubic(p * near);
        slope += w * near * near * cosh_quadratic(p * near);
        curve -= w * near * sinhc(p * near);
    }
    let sign = if offset > 0.0 {
        1.0
    } else if offset < 0.0 {
        -1.0
    } else {
        0.0
    };
    [g * value, sign * g * slope, g * curve]
}

/// `B_i(x)`; zero outside `[x_{i-2}, x_{i+2}]`.
pub fn eval_basis(i: isize, x: f64, params: &SplineParams) -> f64 {
    basis_all(i, x, params)[0]
}

/// `B_i'(x)`
pub fn eval_basis_d1(i: isize, x: f64, params: &SplineParams) -> f64 {
    basis_all(i, x, params)[1]
}

/// `B_i''(x)`
pub fn eval_basis_d2(i: isize, x: f64, params: &SplineParams) -> f64 {
    basis_all(i, x, params)[2]
}

/// Value, first and second derivative of `sum_i coeffs[i+1] * B_i(x)` where
/// `coeffs` holds the `N + 3` coefficients for `i = -1..=N+1`.
pub fn eval_spline(coeffs: &[f64], x: f64, params: &SplineParams) -> NodalValues {
    let n = params.n() as isize;
    debug_assert_eq!(coeffs.len(), params.n() + 3);
    let centre = ((x - params.a()) / params.h()).floor() as isize;
    let mut out = NodalValues {
        value: 0.0,
        d1: 0.0,
        d2: 0.0,
    };
    for i in (centre - 2).max(-1)..=(centre + 3).min(n + 1) {
        let [v, d1, d2] = basis_all(i, x, params);
        let c = coeffs[(i + 1) as usize];
        out.value += c * v;
        out.d1 += c * d1;
        out.d2 += c * d2;
    }
    out
}

/// The closed-form coefficients of the four pieces of `B_i`:
///
/// ```text
/// [x_{i-2}, x_{i-1}]: b2((x_{i-2} - x) - sinh(p(x_{i-2} - x))/p)
/// [x_{i-1}, x_i]:     a1 + b1(x_i - x) + c1 e^{p(x_i - x)} + d1 e^{-p(x_i - x)}
/// [x_i, x_{i+1}]:     a1 + b1(x - x_i) + c1 e^{p(x - x_i)} + d1 e^{-p(x - x_i)}
/// [x_{i+1}, x_{i+2}]: b2((x - x_{i+2}) - sinh(p(x - x_{i+2}))/p)
/// ```
///
/// These blow up like `(ph)^{-3}` and cancel catastrophically for small `ph`;
/// [`eval_basis`] does not use them. They are kept as an independent check on
/// the truncated form for moderate tension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceCoefficients {
    pub a1: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub d1: f64,
}

impl PieceCoefficients {
    pub fn new(params: &SplineParams) -> Self {
        let (p, ph, s, c) = (params.p(), params.ph(), params.s(), params.c());
        let den = ph * c - s;
        let (em, ep) = ((-ph).exp(), ph.exp());
        Self {
            a1: ph * c / den,
            b1: 0.5 * p * (c * (c - 1.0) + s * s) / (den * (1.0 - c)),
            b2: 0.5 * p / den,
            c1: 0.25 * (em * (1.0 - c) + s * (em - 1.0)) / (den * (1.0 - c)),
            d1: 0.25 * (ep * (c - 1.0) + s * (ep - 1.0)) / (den * (1.0 - c)),
        }
    }

    /// `B_i(x)` from the piecewise closed form.
    pub fn eval(&self, i: isize, x: f64, params: &SplineParams) -> f64 {
        let p = params.p();
        let xi = params.knot(i);
        let h = params.h();
        let r = (x - xi).abs();
        if r >= 2.0 * h {
            0.0
        } else if r >= h {
            let z = r - 2.0 * h;
            self.b2 * (z - (p * z).sinh() / p)
        } else {
            self.a1 + self.b1 * r + self.c1 * (p * r).exp() + self.d1 * (-p * r).exp()
        }
    }
}
