#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use burgers_core::basis::{eval_basis, eval_basis_d1, eval_basis_d2, eval_spline, SplineParams};
use burgers_core::init::CoefficientState;
use burgers_core::problems::ProblemSpec;
use nalgebra::{DMatrix, DVector};

pub type Row = HashMap<String, f64>;

fn read_csv(path: PathBuf) -> Vec<Row> {
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(str::to_string)
        .collect();
    lines
        .map(|l| {
            header
                .iter()
                .zip(l.split(','))
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| (k.clone(), v.parse().expect("number")))
                .collect()
        })
        .collect()
}

/// Rows of `fixtures/<name>.csv`.
pub fn fixture(name: &str) -> Vec<Row> {
    read_csv(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(format!("{name}.csv")),
    )
}

/// Rows of `tests/data/<name>.csv`.
pub fn data(name: &str) -> Vec<Row> {
    read_csv(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/data")
            .join(format!("{name}.csv")),
    )
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Nonlinear problem with inhomogeneous, time-dependent boundary data.
pub fn mixed_problem() -> ProblemSpec {
    ProblemSpec::new(
        "mixed",
        (1.5, 0.7, -0.4),
        (0.0, 1.0),
        Arc::new(|x| 1.0 + x * x),
        Arc::new(|x| (3.0 * x).cos()),
    )
    .with_boundaries(
        Arc::new(|t| 1.0 + 0.1 * t),
        Arc::new(|t| 2.0 - t),
        Arc::new(|t| 1.0 + t * t),
        Arc::new(|t| 3f64.cos() + 0.5 * t),
    )
}

pub struct Extended {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// Collocation of the linearised Crank–Nicolson equations at every knot plus
/// four Dirichlet rows, in all `2N + 6` coefficients, built from direct basis
/// evaluations.
pub fn extended_system(
    state: &CoefficientState,
    pr: &ProblemSpec,
    sp: &SplineParams,
    dt: f64,
    t: f64,
) -> Extended {
    let n = sp.n();
    let dim = 2 * n + 6;
    let col = |i: isize, field: usize| 2 * (i + 1) as usize + field;
    let mut a = DMatrix::zeros(dim, dim);
    let mut r = DVector::zeros(dim);
    let (k1, k2, k3) = (pr.k1, pr.k2, pr.k3);
    let rr = 2.0 / dt;
    for m in 0..=n {
        let x = sp.knot(m as isize);
        let u = eval_spline(&state.delta, x, sp);
        let v = eval_spline(&state.phi, x, sp);
        let (ru, rv) = (2 * m, 2 * m + 1);
        for i in -1..=(n as isize + 1) {
            let (b0, b1, b2) = (
                eval_basis(i, x, sp),
                eval_basis_d1(i, x, sp),
                eval_basis_d2(i, x, sp),
            );
            // U_t - U_xx + k1 U U_x + k2 (U_x V + U V_x)
            a[(ru, col(i, 0))] +=
                (rr + k1 * u.d1 + k2 * v.d1) * b0 + (k1 * u.value + k2 * v.value) * b1 - b2;
            a[(ru, col(i, 1))] += k2 * u.d1 * b0 + k2 * u.value * b1;
            // V_t - V_xx + k1 V V_x + k3 (U_x V + U V_x)
            a[(rv, col(i, 1))] +=
                (rr + k1 * v.d1 + k3 * u.d1) * b0 + (k1 * v.value + k3 * u.value) * b1 - b2;
            a[(rv, col(i, 0))] += k3 * v.d1 * b0 + k3 * v.value * b1;
        }
        r[ru] = rr * u.value + u.d2;
        r[rv] = rr * v.value + v.d2;
    }
    let bc = [
        (sp.a(), 0, (pr.f1)(t)),
        (sp.a(), 1, (pr.g1)(t)),
        (sp.b(), 0, (pr.f2)(t)),
        (sp.b(), 1, (pr.g2)(t)),
    ];
    for (k, (x, field, value)) in bc.into_iter().enumerate() {
        let row = 2 * n + 2 + k;
        for i in -1..=(n as isize + 1) {
            a[(row, col(i, field))] = eval_basis(i, x, sp);
        }
        r[row] = value;
    }
    Extended { matrix: a, rhs: r }
}
