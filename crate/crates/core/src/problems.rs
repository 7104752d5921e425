//! Problem definitions for the coupled system
//!
//! ```text
//! U_t - U_xx + k1 U U_x + k2 (UV)_x = 0
//! V_t - V_xx + k1 V V_x + k3 (UV)_x = 0
//! ```
//!
//! on `[a, b]` with Dirichlet data, and the three benchmark problems.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};

pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution {
    pub u: SpaceTimeFn,
    pub v: SpaceTimeFn,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub a: f64,
    pub b: f64,
    /// `U(x, 0)`
    pub f: SpaceFn,
    /// `V(x, 0)`
    pub g: SpaceFn,
    /// Analytic `f'`; when absent the end slopes are differenced.
    pub df: Option<SpaceFn>,
    pub dg: Option<SpaceFn>,
    /// `U(a, t)`, `U(b, t)`, `V(a, t)`, `V(b, t)`
    pub f1: TimeFn,
    pub f2: TimeFn,
    pub g1: TimeFn,
    pub g2: TimeFn,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("k", &(self.k1, self.k2, self.k3))
            .field("domain", &(self.a, self.b))
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

fn constant(v: f64) -> TimeFn {
    Arc::new(move |_| v)
}

impl ProblemSpec {
    /// A problem with homogeneous Dirichlet data and no exact solution.
    pub fn new(
        name: impl Into<String>,
        (k1, k2, k3): (f64, f64, f64),
        (a, b): (f64, f64),
        f: SpaceFn,
        g: SpaceFn,
    ) -> Self {
        Self {
            name: name.into(),
            k1,
            k2,
            k3,
            a,
            b,
            f,
            g,
            df: None,
            dg: None,
            f1: constant(0.0),
            f2: constant(0.0),
            g1: constant(0.0),
            g2: constant(0.0),
            exact: None,
        }
    }

    pub fn with_initial_slopes(mut self, df: SpaceFn, dg: SpaceFn) -> Self {
        self.df = Some(df);
        self.dg = Some(dg);
        self
    }

    pub fn with_boundaries(mut self, f1: TimeFn, f2: TimeFn, g1: TimeFn, g2: TimeFn) -> Self {
        self.f1 = f1;
        self.f2 = f2;
        self.g1 = g1;
        self.g2 = g2;
        self
    }

    pub fn with_exact(mut self, u: SpaceTimeFn, v: SpaceTimeFn) -> Self {
        self.exact = Some(ExactSolution { u, v });
        self
    }

    pub fn with_constants(mut self, k1: f64, k2: f64, k3: f64) -> Self {
        self.k1 = k1;
        self.k2 = k2;
        self.k3 = k3;
        self
    }
}

/// `U = V = e^{-t} sin x` on `[-pi, pi]` with `k1 = -2, k2 = k3 = 1`.
///
/// With other constants the exact solution only holds while `k1 + k2 = 0` and
/// `k1 + k3 = 0`; [`problem1_with`] keeps it attached regardless so sweeps can
/// still report deviations from it.
pub fn problem1() -> ProblemSpec {
    problem1_with(-2.0, 1.0, 1.0)
}

pub fn problem1_with(k1: f64, k2: f64, k3: f64) -> ProblemSpec {
    let exact: SpaceTimeFn = Arc::new(|x: f64, t: f64| (-t).exp() * x.sin());
    ProblemSpec::new(
        "problem1",
        (k1, k2, k3),
        (-PI, PI),
        Arc::new(f64::sin),
        Arc::new(f64::sin),
    )
    .with_initial_slopes(Arc::new(f64::cos), Arc::new(f64::cos))
    .with_exact(exact.clone(), exact)
}

/// Constants of the tanh travelling wave used by Problem 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWaveParams {
    pub k2: f64,
    pub k3: f64,
    pub a0: f64,
    /// Wave number; the profile moves with speed `2A`.
    pub big_a: f64,
}

impl TravelingWaveParams {
    pub const A0: f64 = 0.05;

    pub fn new(k2: f64, k3: f64) -> Result<Self> {
        if !(k2.is_finite() && k3.is_finite()) {
            return domain("non-finite k2/k3");
        }
        if 2.0 * k2 - 1.0 == 0.0 {
            return domain("travelling wave undefined for 2*k2 = 1");
        }
        if 4.0 * k2 * k3 - 1.0 == 0.0 {
            return domain("travelling wave undefined for 4*k2*k3 = 1");
        }
        let a0 = Self::A0;
        Ok(Self {
            k2,
            k3,
            a0,
            big_a: 0.5 * a0 * (4.0 * k2 * k3 - 1.0) / (2.0 * k2 - 1.0),
        })
    }

    /// Amplitude of the tanh term, `2A(2k2 - 1)/(4k2k3 - 1)`.
    pub fn amplitude(&self) -> f64 {
        2.0 * self.big_a * (2.0 * self.k2 - 1.0) / (4.0 * self.k2 * self.k3 - 1.0)
    }

    /// Far-field offset of `V`, `a0 (2k3 - 1)/(2k2 - 1)`.
    pub fn v_offset(&self) -> f64 {
        self.a0 * (2.0 * self.k3 - 1.0) / (2.0 * self.k2 - 1.0)
    }

    fn phase(&self, x: f64, t: f64) -> f64 {
        self.big_a * (x - 2.0 * self.big_a * t)
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.a0 - self.amplitude() * self.phase(x, t).tanh()
    }

    pub fn v(&self, x: f64, t: f64) -> f64 {
        self.v_offset() - self.amplitude() * self.phase(x, t).tanh()
    }

    /// Residuals of both equations (with `k1 = 2`) for the closed form,
    /// using analytic derivatives.
    ///
    /// These do not vanish: the tanh amplitudes that would balance the
    /// nonlinear terms are `A/(1+k2)` for `U` and `A/(1+k3)` for `V`, while the
    /// closed form uses a common amplitude. The residual is `O(A^2)` and stays
    /// small for the benchmark constants.
    pub fn residual(&self, x: f64, t: f64) -> (f64, f64) {
        let th = self.phase(x, t).tanh();
        let sech2 = 1.0 - th * th;
        let big_a = self.big_a;
        let b = self.amplitude();
        let u = self.u(x, t);
        let v = self.v(x, t);
        // d/dx of both fields
        let ux = -b * big_a * sech2;
        let ut = -2.0 * big_a * ux;
        let uxx = 2.0 * b * big_a * big_a * th * sech2;
        let uv_x = ux * v + u * ux;
        let k1 = 2.0;
        let ru = ut - uxx + k1 * u * ux + self.k2 * uv_x;
        let rv = ut - uxx + k1 * v * ux + self.k3 * uv_x;
        (ru, rv)
    }
}

/// Travelling tanh wave on `[0, 1]` with `k1 = 2`; data taken from the closed form.
pub fn problem2(k2: f64, k3: f64) -> Result<ProblemSpec> {
    let w = TravelingWaveParams::new(k2, k3)?;
    let (a, b) = (0.0, 1.0);
    let u0 = move |x: f64| w.u(x, 0.0);
    let v0 = move |x: f64| w.v(x, 0.0);
    let slope = move |x: f64| {
        let th = (w.big_a * x).tanh();
        -w.amplitude() * w.big_a * (1.0 - th * th)
    };
    Ok(ProblemSpec::new(
        "problem2",
        (2.0, k2, k3),
        (a, b),
        Arc::new(u0),
        Arc::new(v0),
    )
    .with_initial_slopes(Arc::new(slope), Arc::new(slope))
    .with_boundaries(
        Arc::new(move |t| w.u(a, t)),
        Arc::new(move |t| w.u(b, t)),
        Arc::new(move |t| w.v(a, t)),
        Arc::new(move |t| w.v(b, t)),
    )
    .with_exact(
        Arc::new(move |x, t| w.u(x, t)),
        Arc::new(move |x, t| w.v(x, t)),
    ))
}

/// Split sine pulses on `[0, 1]` with zero boundaries; no exact solution.
pub fn problem3(k1: f64, k2: f64, k3: f64) -> ProblemSpec {
    let f = |x: f64| if x <= 0.5 { (2.0 * PI * x).sin() } else { 0.0 };
    let g = |x: f64| if x <= 0.5 { 0.0 } else { -(2.0 * PI * x).sin() };
    let df = |x: f64| {
        if x <= 0.5 {
            2.0 * PI * (2.0 * PI * x).cos()
        } else {
            0.0
        }
    };
    let dg = |x: f64| {
        if x <= 0.5 {
            0.0
        } else {
            -2.0 * PI * (2.0 * PI * x).cos()
        }
    };
    ProblemSpec::new(
        "problem3",
        (k1, k2, k3),
        (0.0, 1.0),
        Arc::new(f),
        Arc::new(g),
    )
    .with_initial_slopes(Arc::new(df), Arc::new(dg))
}
