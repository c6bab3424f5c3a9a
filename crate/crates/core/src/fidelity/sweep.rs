use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::estimate::{estimate, FidelityError};
use super::oracle::mct_permutation;
use crate::circuit::Circuit;
use crate::decomposer::{decompose_mct, defer_corrections, DecomposeError, DeferError};
use crate::simulator::{max_qubits, NoiseError, NoiseModel, Program, SimError};

/// Amplitude updates a sweep may plan before it is refused.
pub const AMPLITUDE_BUDGET: f64 = 1e14;

pub const DEFAULT_MAX_N: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Geometric,
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Points per axis, endpoints included.
    pub points: usize,
    pub min_rate: f64,
    pub max_rate: f64,
    pub spacing: Spacing,
    pub shots: u64,
    pub seed: u64,
    pub max_n: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            points: 19,
            min_rate: 1e-3,
            max_rate: 1e-1,
            spacing: Spacing::Geometric,
            shots: 100,
            seed: 0,
            max_n: DEFAULT_MAX_N,
        }
    }
}

impl SweepSpec {
    pub fn rates(&self) -> Vec<f64> {
        grid_rates(self.min_rate, self.max_rate, self.points, self.spacing)
    }
}

/// `points` rates from `min` to `max` inclusive.
pub fn grid_rates(min: f64, max: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let last = (points - 1) as f64;
            (0..points)
                .map(|k| match k {
                    0 => min,
                    k if k == points - 1 => max,
                    k => match spacing {
                        Spacing::Geometric => min * (max / min).powf(k as f64 / last),
                        Spacing::Linear => min + (max - min) * k as f64 / last,
                    },
                })
                .collect()
        }
    }
}

/// One sweep cell as written to CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub n: usize,
    pub p_toffoli: f64,
    pub p_epr: f64,
    pub p_2q: f64,
    pub p_1q: f64,
    pub p_init: f64,
    pub p_readout: f64,
    pub f_z: f64,
    pub f_c: f64,
    pub lower: f64,
    pub upper: f64,
    pub shots: u64,
    pub seed: u64,
}

impl SweepRow {
    /// Trials behind each fidelity: every data basis state times the shots.
    pub fn trials(&self) -> u64 {
        self.shots << (self.n + 1)
    }

    pub fn standard_errors(&self) -> (f64, f64) {
        let t = self.trials() as f64;
        let se = |f: f64| (f * (1.0 - f) / t).sqrt();
        (se(self.f_z), se(self.f_c))
    }
}

/// Cells in row-major order: `p_toffoli` outer, `p_epr` inner.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub toffoli_rates: Vec<f64>,
    pub epr_rates: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

impl SweepGrid {
    pub fn cell(&self, toffoli: usize, epr: usize) -> &SweepRow {
        &self.rows[toffoli * self.epr_rates.len() + epr]
    }

    /// Rebuilds the axes from rows in row-major order.
    pub fn from_rows(rows: Vec<SweepRow>) -> Result<Self, SweepError> {
        let mut toffoli_rates: Vec<f64> = Vec::new();
        for r in &rows {
            if toffoli_rates.last() != Some(&r.p_toffoli) {
                toffoli_rates.push(r.p_toffoli);
            }
        }
        let epr_rates: Vec<f64> = rows
            .iter()
            .take_while(|r| Some(&r.p_toffoli) == toffoli_rates.first())
            .map(|r| r.p_epr)
            .collect();
        if toffoli_rates.len() * epr_rates.len() != rows.len() {
            return Err(SweepError::Shape(
                "rows do not form a rectangular grid".into(),
            ));
        }
        for (i, r) in rows.iter().enumerate() {
            let (t, e) = (i / epr_rates.len(), i % epr_rates.len());
            if r.p_toffoli != toffoli_rates[t] || r.p_epr != epr_rates[e] {
                return Err(SweepError::Shape(format!(
                    "row {} is out of grid order",
                    i + 1
                )));
            }
        }
        Ok(Self {
            toffoli_rates,
            epr_rates,
            rows,
        })
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Fidelity(#[from] FidelityError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Defer(#[from] DeferError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("resource cap exceeded: {0}")]
    Cap(ResourceEstimate),
    #[error("grid shape mismatch: {0}")]
    Shape(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<SimError> for SweepError {
    fn from(e: SimError) -> Self {
        SweepError::Fidelity(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceEstimate {
    pub n: usize,
    pub max_n: usize,
    pub trajectories: u64,
    pub peak_qubits: usize,
    pub qubit_cap: usize,
    pub ops: usize,
    /// `trajectories * ops * 2^peak_qubits`.
    pub amplitude_updates: f64,
}

impl ResourceEstimate {
    pub fn within_cap(&self) -> bool {
        self.n <= self.max_n
            && self.peak_qubits <= self.qubit_cap
            && self.amplitude_updates <= AMPLITUDE_BUDGET
    }
}

impl std::fmt::Display for ResourceEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "n = {} (max {}), {} trajectories, peak {} qubits (cap {}), {:.3e} amplitude updates (budget {:.0e})",
            self.n,
            self.max_n,
            self.trajectories,
            self.peak_qubits,
            self.qubit_cap,
            self.amplitude_updates,
            AMPLITUDE_BUDGET
        )
    }
}

pub fn estimate_resources(
    circuit: &Circuit,
    n: usize,
    spec: &SweepSpec,
) -> Result<ResourceEstimate, SweepError> {
    let program = Program::new(circuit)?;
    let cells = (spec.points * spec.points) as u64;
    let inputs = 1u64 << program.data_qubits().len().min(63);
    let trajectories = cells
        .saturating_mul(2)
        .saturating_mul(inputs)
        .saturating_mul(spec.shots);
    let peak = program.peak_live_qubits();
    let ops = circuit.ops().len();
    Ok(ResourceEstimate {
        n,
        max_n: spec.max_n,
        trajectories,
        peak_qubits: peak,
        qubit_cap: max_qubits(),
        ops,
        amplitude_updates: trajectories as f64 * ops.max(1) as f64 * 2f64.powi(peak as i32),
    })
}

/// Sweep of the deferred teleportation decomposition of `MCT_{n+1}`.
pub fn run_sweep(n: usize, spec: &SweepSpec) -> Result<SweepGrid, SweepError> {
    let circuit = defer_corrections(&decompose_mct(n)?)?;
    run_sweep_circuit(&circuit, n, spec)
}

/// Sweep of any circuit implementing `MCT_{n+1}` on its data qubits. The
/// resource estimate is checked before anything runs.
pub fn run_sweep_circuit(
    circuit: &Circuit,
    n: usize,
    spec: &SweepSpec,
) -> Result<SweepGrid, SweepError> {
    let est = estimate_resources(circuit, n, spec)?;
    if !est.within_cap() {
        return Err(SweepError::Cap(est));
    }
    let got = circuit.data_qubits().len();
    if got != n + 1 {
        return Err(FidelityError::Width { n, got }.into());
    }
    let expected = mct_permutation(n);
    let rates = spec.rates();
    let mut rows = Vec::with_capacity(rates.len() * rates.len());
    for (t, &p_toffoli) in rates.iter().enumerate() {
        for (e, &p_epr) in rates.iter().enumerate() {
            let noise = NoiseModel::hierarchy(p_toffoli, p_epr)?;
            let cell = (t * rates.len() + e) as u64;
            let est = estimate(circuit, &expected, &noise, spec.shots, spec.seed, cell)?;
            let (lower, upper) = est.bounds();
            rows.push(SweepRow {
                n,
                p_toffoli,
                p_epr,
                p_2q: noise.p_2q,
                p_1q: noise.p_1q,
                p_init: noise.p_init,
                p_readout: noise.p_readout,
                f_z: est.f_z(),
                f_c: est.f_c(),
                lower,
                upper,
                shots: spec.shots,
                seed: spec.seed,
            });
        }
    }
    Ok(SweepGrid {
        toffoli_rates: rates.clone(),
        epr_rates: rates,
        rows,
    })
}

/// Cellwise difference `a - b` of two sweeps over the same grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub n: usize,
    pub p_toffoli: f64,
    pub p_epr: f64,
    pub delta_f_z: f64,
    pub delta_f_c: f64,
    pub delta_lower: f64,
    pub delta_upper: f64,
}

pub fn delta_fidelity(a: &SweepGrid, b: &SweepGrid) -> Result<Vec<DeltaRow>, SweepError> {
    if a.toffoli_rates != b.toffoli_rates
        || a.epr_rates != b.epr_rates
        || a.rows.len() != b.rows.len()
    {
        return Err(SweepError::Shape(format!(
            "{}x{} grid against {}x{} grid or different rates",
            a.toffoli_rates.len(),
            a.epr_rates.len(),
            b.toffoli_rates.len(),
            b.epr_rates.len()
        )));
    }
    Ok(a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| DeltaRow {
            n: x.n,
            p_toffoli: x.p_toffoli,
            p_epr: x.p_epr,
            delta_f_z: x.f_z - y.f_z,
            delta_f_c: x.f_c - y.f_c,
            delta_lower: x.lower - y.lower,
            delta_upper: x.upper - y.upper,
        })
        .collect())
}

/// Adjacent cells along either axis where a fidelity rises by more than
/// `sigmas` combined standard errors as the error rate grows.
pub fn monotonicity_violations(grid: &SweepGrid, sigmas: f64) -> Vec<String> {
    let mut out = Vec::new();
    let (nt, ne) = (grid.toffoli_rates.len(), grid.epr_rates.len());
    let mut check = |a: &SweepRow, b: &SweepRow| {
        let (za, ca) = a.standard_errors();
        let (zb, cb) = b.standard_errors();
        for (name, fa, fb, sa, sb) in [("f_z", a.f_z, b.f_z, za, zb), ("f_c", a.f_c, b.f_c, ca, cb)]
        {
            if fb > fa + sigmas * (sa * sa + sb * sb).sqrt() {
                out.push(format!(
                    "{name} rises from {fa} at ({}, {}) to {fb} at ({}, {})",
                    a.p_toffoli, a.p_epr, b.p_toffoli, b.p_epr
                ));
            }
        }
    };
    for t in 0..nt {
        for e in 0..ne {
            if t + 1 < nt {
                check(grid.cell(t, e), grid.cell(t + 1, e));
            }
            if e + 1 < ne {
                check(grid.cell(t, e), grid.cell(t, e + 1));
            }
        }
    }
    out
}

/// Writes rows with a header line, `,` separators and LF endings.
pub fn write_csv<W: io::Write, T: Serialize>(writer: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a sweep CSV and checks that it forms a grid.
pub fn read_sweep_csv<R: io::Read>(reader: R) -> Result<SweepGrid, SweepError> {
    let mut r = csv::ReaderBuilder::new().from_reader(reader);
    let headers = r.headers()?.clone();
    let expected = [
        "n",
        "p_toffoli",
        "p_epr",
        "p_2q",
        "p_1q",
        "p_init",
        "p_readout",
        "f_z",
        "f_c",
        "lower",
        "upper",
        "shots",
        "seed",
    ];
    if headers.iter().ne(expected) {
        return Err(SweepError::Shape(format!(
            "unexpected header `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let rows = r.deserialize().collect::<Result<Vec<SweepRow>, _>>()?;
    SweepGrid::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = grid_rates(1e-3, 1e-1, 19, Spacing::Geometric);
        assert_eq!(g.len(), 19);
        assert_eq!((g[0], g[18]), (1e-3, 1e-1));
        assert!((g[9] - 1e-2).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = grid_rates(1e-3, 1e-1, 3, Spacing::Linear);
        assert_eq!(l, vec![1e-3, 0.0505, 1e-1]);
        assert_eq!(grid_rates(1e-3, 1e-1, 1, Spacing::Linear), vec![1e-3]);
    }

    #[test]
    fn csv_round_trip_and_self_delta() {
        let spec = SweepSpec {
            points: 2,
            shots: 2,
            seed: 5,
            ..SweepSpec::default()
        };
        let grid = run_sweep(2, &spec).unwrap();
        assert_eq!(grid.rows.len(), 4);
        let mut buf = Vec::new();
        write_csv(&mut buf, &grid.rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "n,p_toffoli,p_epr,p_2q,p_1q,p_init,p_readout,f_z,f_c,lower,upper,shots,seed\n"
        ));
        assert!(!text.contains('\r'));
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(back, grid);
        for d in delta_fidelity(&grid, &back).unwrap() {
            assert_eq!(
                (d.delta_f_z, d.delta_f_c, d.delta_lower, d.delta_upper),
                (0.0, 0.0, 0.0, 0.0)
            );
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = run_sweep(
            2,
            &SweepSpec {
                points: 2,
                shots: 1,
                ..SweepSpec::default()
            },
        )
        .unwrap();
        let b = run_sweep(
            2,
            &SweepSpec {
                points: 3,
                shots: 1,
                ..SweepSpec::default()
            },
        )
        .unwrap();
        assert!(matches!(delta_fidelity(&a, &b), Err(SweepError::Shape(_))));
    }

    #[test]
    fn cap_is_checked_before_running() {
        let spec = SweepSpec {
            points: 19,
            shots: 1_000_000_000,
            ..SweepSpec::default()
        };
        assert!(matches!(run_sweep(7, &spec), Err(SweepError::Cap(_))));
        let spec = SweepSpec {
            points: 1,
            shots: 1,
            ..SweepSpec::default()
        };
        assert!(matches!(run_sweep(8, &spec), Err(SweepError::Cap(_))));
    }

    #[test]
    fn bad_header_is_rejected() {
        let text = "n,p_toffoli\n2,0.1\n";
        assert!(matches!(
            read_sweep_csv(text.as_bytes()),
            Err(SweepError::Shape(_))
        ));
    }
}
