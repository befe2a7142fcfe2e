use super::layout::ConductorLayout;
use crate::error::{Error, Result};

/// Relative residual ‖r‖/‖b‖ at which conjugate gradients stop.
pub const CG_TOLERANCE: f64 = 1e-11;
const CG_MAX_ITERATIONS: usize = 100_000;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    /// Outer box, 0 V.
    Boundary,
    /// Inside conductor `k` (index into `layout.conductors`).
    Conductor(usize),
    /// Unknown potential with index into the CG vector.
    Free(u32),
}

/// Node classification and free-node adjacency of a layout's grid.
pub(crate) struct Discretization {
    pub nx: usize,
    pub ny: usize,
    nodes: Vec<Node>,
    /// Four neighbours of each free node as free indices, NONE when fixed.
    free_neighbors: Vec<[u32; 4]>,
    /// Grid index of each free node.
    free_sites: Vec<usize>,
}

impl Discretization {
    pub fn new(layout: &ConductorLayout) -> Result<Self> {
        layout.validate()?;
        let (nx, ny) = layout.cells();
        let h = layout.grid_spacing;
        let tol = 1e-9 * h;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut free_sites = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                let (x, y) = (i as f64 * h, j as f64 * h);
                let node = if i == 0 || j == 0 || i == nx || j == ny {
                    Node::Boundary
                } else if let Some(k) = layout.conductors.iter().position(|c| {
                    let r = c.rect;
                    x >= r.x0 - tol && x <= r.x1 + tol && y >= r.y0 - tol && y <= r.y1 + tol
                }) {
                    Node::Conductor(k)
                } else {
                    free_sites.push(j * (nx + 1) + i);
                    Node::Free(free_sites.len() as u32 - 1)
                };
                nodes.push(node);
            }
        }
        for (k, c) in layout.conductors.iter().enumerate() {
            if !nodes.contains(&Node::Conductor(k)) {
                return Err(Error::Layout(format!("conductor '{}' covers no grid node at spacing {h}", c.label)));
            }
        }
        let mut d = Self { nx, ny, nodes, free_neighbors: Vec::new(), free_sites };
        d.free_neighbors = d
            .free_sites
            .iter()
            .map(|&site| {
                d.neighbors(site).map(|nb| match d.nodes[nb] {
                    Node::Free(f) => f,
                    _ => NONE,
                })
            })
            .collect();
        Ok(d)
    }

    fn neighbors(&self, site: usize) -> [usize; 4] {
        let w = self.nx + 1;
        [site - 1, site + 1, site - w, site + w]
    }

    fn fixed_potential(&self, node: Node, driven: usize) -> f64 {
        match node {
            Node::Conductor(k) if k == driven => 1.0,
            _ => 0.0,
        }
    }

    /// y = A x with A the 5-point Laplacian restricted to free nodes (positive definite).
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, nbs) in self.free_neighbors.iter().enumerate() {
            let mut acc = 4.0 * x[i];
            for &nb in nbs {
                if nb != NONE {
                    acc -= x[nb as usize];
                }
            }
            y[i] = acc;
        }
    }

    /// Potential everywhere with conductor `driven` at 1 V and all else at 0 V.
    pub fn solve(&self, driven: usize) -> Result<PotentialGrid> {
        let b: Vec<f64> = self
            .free_sites
            .iter()
            .map(|&site| self.neighbors(site).iter().map(|&nb| self.fixed_potential(self.nodes[nb], driven)).sum())
            .collect();
        let (x, residual, iterations) = self.conjugate_gradient(&b)?;
        let values = self
            .nodes
            .iter()
            .map(|&node| match node {
                Node::Free(f) => x[f as usize],
                fixed => self.fixed_potential(fixed, driven),
            })
            .collect();
        Ok(PotentialGrid { nx: self.nx, ny: self.ny, values, residual, iterations })
    }

    fn conjugate_gradient(&self, b: &[f64]) -> Result<(Vec<f64>, f64, usize)> {
        let n = b.len();
        let b_norm = dot(b, b).sqrt();
        let mut x = vec![0.0; n];
        if b_norm == 0.0 {
            return Ok((x, 0.0, 0));
        }
        let mut r = b.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r);
        for it in 0..CG_MAX_ITERATIONS {
            let rel = rr.sqrt() / b_norm;
            if rel < CG_TOLERANCE {
                return Ok((x, rel, it));
            }
            self.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_new;
        }
        Err(Error::NotConverged { iterations: CG_MAX_ITERATIONS, residual: rr.sqrt() / b_norm })
    }

    /// Σ over nodes of conductor `k` and their neighbours outside it of (V_node − V_nb):
    /// the discrete outward flux, i.e. charge / (ε·depth).
    pub fn flux(&self, grid: &PotentialGrid, k: usize) -> f64 {
        let mut total = 0.0;
        for (site, node) in self.nodes.iter().enumerate() {
            if *node != Node::Conductor(k) {
                continue;
            }
            for nb in self.neighbors(site) {
                if self.nodes[nb] != Node::Conductor(k) {
                    total += grid.values[site] - grid.values[nb];
                }
            }
        }
        total
    }

    pub fn is_free(&self, i: usize, j: usize) -> bool {
        matches!(self.nodes[j * (self.nx + 1) + i], Node::Free(_))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Node potentials (V) on the `(nx+1) × (ny+1)` grid, row-major in y.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    /// Relative CG residual at exit.
    pub residual: f64,
    pub iterations: usize,
}

impl PotentialGrid {
    /// Potential at grid node (i, j), i along x.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.nx + 1) + i]
    }
}

/// Solve Laplace's equation with `driven` at 1 V and every other conductor
/// and the enclosing box at 0 V.
pub fn solve_poisson(layout: &ConductorLayout, driven: &str) -> Result<PotentialGrid> {
    let k = layout
        .conductors
        .iter()
        .position(|c| c.label == driven)
        .ok_or_else(|| Error::UnknownLabel(driven.to_string()))?;
    Discretization::new(layout)?.solve(k)
}

/// Largest |4V − ΣV_nb| over free nodes, relative to the largest |V|.
pub fn laplace_residual(layout: &ConductorLayout, grid: &PotentialGrid) -> Result<f64> {
    let d = Discretization::new(layout)?;
    let scale = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for j in 1..grid.ny {
        for i in 1..grid.nx {
            if d.is_free(i, j) {
                let lap =
                    4.0 * grid.at(i, j) - grid.at(i - 1, j) - grid.at(i + 1, j) - grid.at(i, j - 1) - grid.at(i, j + 1);
                worst = worst.max(lap.abs());
            }
        }
    }
    Ok(worst / scale)
}
