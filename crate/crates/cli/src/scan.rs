//! Parameter sweeps producing CSV tables.

use std::io::{self, Write};

use cvwitness::criterion::{component_lower_bound, evaluate_witness_with_tol};
use cvwitness::numerics::C64;
use cvwitness::optomech::{distances_of, evolve_mirrors, OptomechParams};
use cvwitness::states::{cat_state, Vec4};
use rayon::prelude::*;

use crate::config::{Scan, ScanConfig};

/// A CSV table; rows whose evaluation failed hold `NaN` and are listed in
/// `failures` with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<f64>>,
    pub failures: Vec<(usize, String)>,
}

impl Table {
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

fn mirror_params(c: &ScanConfig, lambda: f64) -> OptomechParams {
    OptomechParams {
        g: c.g,
        lambda,
        omega_m: c.omega_m,
        rprime: Vec4::from_column_slice(&c.rprime),
    }
}

/// Evaluates `f` at every grid point in parallel and keeps grid order.
fn sweep<F>(header: &'static [&'static str], grid: &[f64], f: F) -> Table
where
    F: Fn(f64) -> cvwitness::Result<Vec<f64>> + Sync,
{
    let results: Vec<cvwitness::Result<Vec<f64>>> = grid.par_iter().map(|&x| f(x)).collect();
    let mut rows = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (k, (x, r)) in grid.iter().zip(results).enumerate() {
        match r {
            Ok(values) => {
                let mut row = vec![*x];
                row.extend(values);
                rows.push(row);
            }
            Err(e) => {
                let mut row = vec![*x];
                row.extend(std::iter::repeat_n(f64::NAN, header.len() - 1));
                rows.push(row);
                failures.push((k, e.to_string()));
            }
        }
    }
    Table {
        header,
        rows,
        failures,
    }
}

pub fn run(scan: Scan, c: &ScanConfig) -> Table {
    let tol = c.tolerance;
    match scan {
        Scan::Cat => sweep(&["alpha", "E2", "E4"], &c.alpha.linear(), |a| {
            let w = evaluate_witness_with_tol(&cat_state(C64::new(a, 0.0))?, tol)?;
            Ok(vec![w.e2, w.e4])
        }),
        Scan::Mirror => sweep(
            &["omega_m_t", "E2", "E4", "E4_cov_only"],
            &c.time.linear(),
            |t| {
                let p = mirror_params(c, c.lambda);
                let (state, _) = evolve_mirrors(&p, t / c.omega_m)?;
                let w = evaluate_witness_with_tol(&state, tol)?;
                Ok(vec![w.e2, w.e4, w.e4_cov_only])
            },
        ),
        Scan::Distance => sweep(
            &[
                "omega_m_t",
                "d_00_01",
                "d_00_10",
                "d_00_11",
                "d_01_10",
                "d_01_11",
                "d_10_11",
            ],
            &c.time.linear(),
            |t| {
                let (_, comps) = evolve_mirrors(&mirror_params(c, c.lambda), t / c.omega_m)?;
                Ok(distances_of(&comps).to_vec())
            },
        ),
        Scan::Lambda => sweep(&["lambda", "E4"], &c.lambdas.logarithmic(), |lambda| {
            let (state, _) = evolve_mirrors(&mirror_params(c, lambda), c.t_fixed / c.omega_m)?;
            Ok(vec![evaluate_witness_with_tol(&state, tol)?.e4])
        }),
        Scan::Bound => sweep(&["omega_m_t", "E4", "lower_bound"], &c.time.linear(), |t| {
            let (state, comps) = evolve_mirrors(&mirror_params(c, c.lambda), t / c.omega_m)?;
            let e4 = evaluate_witness_with_tol(&state, tol)?.e4;
            let (bc, mean) = comps.bound_components();
            Ok(vec![e4, component_lower_bound(&bc, &mean)?])
        }),
        Scan::Validate => unreachable!("validation is not a sweep"),
    }
}
