use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::ConductorLayout;
use super::poisson::Discretization;
use crate::error::{Error, Result};
use crate::units::{ELECTRON_CHARGE, EPSILON_0, PLANCK};

/// Largest tolerated |C_ij − C_ji| relative to the largest entry.
pub const MAX_ASYMMETRY: f64 = 0.01;

/// Symmetric conductor capacitance matrix referenced to ground, fF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxwellCapacitanceMatrix {
    pub labels: Vec<String>,
    pub c: DMatrix<f64>,
    /// Relative asymmetry before averaging (0 for matrices built from data).
    pub asymmetry: f64,
}

impl MaxwellCapacitanceMatrix {
    /// Build from a full symmetric matrix, checking sign structure.
    pub fn new(labels: Vec<String>, c: DMatrix<f64>) -> Result<Self> {
        if c.nrows() != labels.len() || c.ncols() != labels.len() {
            return Err(Error::InvalidParameter("capacitance matrix shape does not match labels".into()));
        }
        let asymmetry = relative_asymmetry(&c);
        if asymmetry > 1e-9 {
            return Err(Error::AsymmetricCapacitance { asymmetry });
        }
        let m = Self { labels, c, asymmetry: 0.0 };
        m.check_sign_structure()?;
        Ok(m)
    }

    /// Build from self capacitances (diagonal) and positive mutual capacitances.
    pub fn from_entries(self_caps: &[(&str, f64)], mutual: &[(&str, &str, f64)]) -> Result<Self> {
        let labels: Vec<String> = self_caps.iter().map(|(l, _)| l.to_string()).collect();
        let mut c =
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(labels.len(), self_caps.iter().map(|(_, v)| *v)));
        let idx = |l: &str| labels.iter().position(|x| x == l).ok_or_else(|| Error::UnknownLabel(l.to_string()));
        for &(a, b, v) in mutual {
            let (i, j) = (idx(a)?, idx(b)?);
            c[(i, j)] = -v.abs();
            c[(j, i)] = -v.abs();
        }
        Self::new(labels, c)
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.c[(self.index(a)?, self.index(b)?)])
    }

    /// Capacitance of each conductor to ground (row sums).
    pub fn to_ground(&self) -> Vec<f64> {
        self.c.row_iter().map(|r| r.sum()).collect()
    }

    /// Diagonal > 0, off-diagonal ≤ 0, row sums ≥ 0, each up to round-off.
    pub fn check_sign_structure(&self) -> Result<()> {
        let scale = self.c.amax().max(f64::MIN_POSITIVE);
        let slack = 1e-9 * scale;
        let n = self.labels.len();
        for i in 0..n {
            if !(self.c[(i, i)] > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "self capacitance of '{}' is not positive",
                    self.labels[i]
                )));
            }
            for j in 0..n {
                if i != j && self.c[(i, j)] > slack {
                    return Err(Error::InvalidParameter(format!(
                        "mutual capacitance {}-{} has the wrong sign",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        if let Some(i) = self.to_ground().iter().position(|&g| g < -slack) {
            return Err(Error::InvalidParameter(format!("'{}' has negative capacitance to ground", self.labels[i])));
        }
        Ok(())
    }

    /// CSV with a header row of labels and one row per conductor.
    pub fn to_csv(&self) -> String {
        let mut out = format!("label,{}\n", self.labels.join(","));
        for (i, l) in self.labels.iter().enumerate() {
            let row: Vec<String> = self.c.row(i).iter().map(|v| format!("{v:.9e}")).collect();
            out.push_str(&format!("{l},{}\n", row.join(",")));
        }
        out
    }

    /// Parse the format written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Layout(format!("capacitance CSV: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty".into()))?;
        let labels: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
        let n = labels.len();
        let mut c = DMatrix::zeros(n, n);
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if i >= n || cells.len() != n + 1 || cells[0] != labels[i] {
                return Err(bad(format!("row {} does not match the header", i + 1)));
            }
            for (j, v) in cells[1..].iter().enumerate() {
                c[(i, j)] = v.parse().map_err(|_| bad(format!("'{v}' is not a number")))?;
            }
            rows += 1;
        }
        if rows != n || n == 0 {
            return Err(bad(format!("expected {n} rows, found {rows}")));
        }
        Self::new(labels, c)
    }
}

fn relative_asymmetry(c: &DMatrix<f64>) -> f64 {
    let scale = c.amax().max(f64::MIN_POSITIVE);
    (c - c.transpose()).amax() / scale
}

/// Maxwell matrix of the layout's signal conductors: column j holds the
/// charge induced on each conductor with conductor j at 1 V.
///
/// Grounded conductors and the enclosing box act as the 0 V reference.
pub fn maxwell_capacitance(layout: &ConductorLayout) -> Result<MaxwellCapacitanceMatrix> {
    let disc = Discretization::new(layout)?;
    let signal: Vec<usize> = (0..layout.conductors.len()).filter(|&k| !layout.conductors[k].grounded).collect();
    if signal.is_empty() {
        return Err(Error::Layout("no signal conductors".into()));
    }
    // ε·depth in fF: F/m × µm × 1e-6 m/µm × 1e15 fF/F.
    let eps_depth = EPSILON_0 * layout.relative_permittivity * layout.depth * 1e9;
    let columns: Vec<Vec<f64>> = signal
        .par_iter()
        .map(|&driven| {
            let grid = disc.solve(driven)?;
            Ok(signal.iter().map(|&k| eps_depth * disc.flux(&grid, k)).collect())
        })
        .collect::<Result<_>>()?;
    let n = signal.len();
    let raw = DMatrix::from_fn(n, n, |i, j| columns[j][i]);
    let asymmetry = relative_asymmetry(&raw);
    if asymmetry > MAX_ASYMMETRY {
        return Err(Error::AsymmetricCapacitance { asymmetry });
    }
    let c = (&raw + raw.transpose()) * 0.5;
    let m = MaxwellCapacitanceMatrix { labels: layout.signal_labels(), c, asymmetry };
    m.check_sign_structure()?;
    Ok(m)
}

/// Eliminate every node not in `keep` by Schur complement,
/// C_red = C_kk − C_ke C_ee⁻¹ C_ek.
///
/// Eliminated nodes float (carry no net charge); ground stays the reference.
pub fn reduce_capacitance(m: &MaxwellCapacitanceMatrix, keep: &[&str]) -> Result<MaxwellCapacitanceMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("reduction must keep at least one node".into()));
    }
    let kept: Vec<usize> = keep.iter().map(|l| m.index(l)).collect::<Result<_>>()?;
    let elim: Vec<usize> = (0..m.labels.len()).filter(|i| !kept.contains(i)).collect();
    let block =
        |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| m.c[(rows[i], cols[j])]);
    let c_kk = block(&kept, &kept);
    let reduced = if elim.is_empty() {
        c_kk
    } else {
        let names = || elim.iter().map(|&i| m.labels[i].clone()).collect::<Vec<_>>();
        let chol = block(&elim, &elim).cholesky().ok_or_else(|| Error::SingularReduction(names()))?;
        let c_ke = block(&kept, &elim);
        let schur = &c_kk - &c_ke * chol.solve(&c_ke.transpose());
        (&schur + schur.transpose()) * 0.5
    };
    let labels = kept.iter().map(|&i| m.labels[i].clone()).collect();
    let out = MaxwellCapacitanceMatrix { labels, c: reduced, asymmetry: m.asymmetry };
    out.check_sign_structure()?;
    Ok(out)
}

/// Capacitance seen by the differential mode of islands `a` and `b` after
/// all other nodes are eliminated: C_ab + C_ag·C_bg/(C_ag + C_bg), fF.
pub fn differential_capacitance(m: &MaxwellCapacitanceMatrix, a: &str, b: &str) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidParameter("differential mode needs two distinct islands".into()));
    }
    let pair = reduce_capacitance(m, &[a, b])?;
    let mutual = -pair.c[(0, 1)];
    let g = pair.to_ground();
    let series = if g[0] + g[1] > 0.0 { g[0] * g[1] / (g[0] + g[1]) } else { 0.0 };
    Ok(mutual + series)
}

/// E_C = e²/(2C) in GHz for C in fF.
pub fn effective_charging_energy(c_ff: f64) -> Result<f64> {
    if !(c_ff > 0.0 && c_ff.is_finite()) {
        return Err(Error::InvalidParameter(format!("capacitance {c_ff} fF must be positive")));
    }
    Ok(ELECTRON_CHARGE.powi(2) / (2.0 * c_ff * 1e-15 * PLANCK) * 1e-9)
}

/// Inverse of [`effective_charging_energy`]: C in fF for E_C in GHz.
pub fn capacitance_for_charging_energy(e_c_ghz: f64) -> Result<f64> {
    if !(e_c_ghz > 0.0 && e_c_ghz.is_finite()) {
        return Err(Error::InvalidParameter(format!("E_C {e_c_ghz} GHz must be positive")));
    }
    Ok(ELECTRON_CHARGE.powi(2) / (2.0 * e_c_ghz * 1e9 * PLANCK) * 1e15)
}
