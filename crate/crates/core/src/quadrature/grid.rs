//! Composite Gauss-Legendre grids on the semi-infinite wavenumber axis.
//!
//! Layout: one panel `[0, k_min]`, geometrically spaced panels on
//! `[k_min, split]` (optionally refined inside a cluster band), and a tail
//! `(split, inf)` mapped to `t in (0, 1]` by `k = split / t`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rules::gauss_legendre;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least one finite panel")]
    NoPanels,
    #[error("panel order must be positive")]
    ZeroOrder,
    #[error("need 0 < k_min < split, got k_min = {k_min}, split = {split}")]
    BadRange { k_min: f64, split: f64 },
    #[error("cluster band must satisfy width > 1 and refinement >= 1")]
    BadCluster,
}

/// Extra panel density inside `[center / width, center * width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: f64,
    pub width: f64,
    pub refinement: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Upper edge of the first panel `[0, k_min]`.
    pub k_min: f64,
    /// Boundary between the finite panels and the mapped tail.
    pub split: f64,
    /// Number of geometric panels on `[k_min, split]` before clustering.
    pub panels: usize,
    pub order: usize,
    pub tail_panels: usize,
    pub tail_order: usize,
    pub cluster: Option<Cluster>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            k_min: 1e-3,
            split: 1e3,
            panels: 24,
            order: 16,
            tail_panels: 2,
            tail_order: 16,
            cluster: None,
        }
    }
}

impl GridSpec {
    /// Same layout with every panel count doubled.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            panels: self.panels * 2,
            tail_panels: self.tail_panels * 2,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.panels == 0 || self.tail_panels == 0 {
            return Err(GridError::NoPanels);
        }
        if self.order == 0 || self.tail_order == 0 {
            return Err(GridError::ZeroOrder);
        }
        if !(self.k_min > 0.0 && self.k_min < self.split && self.split.is_finite()) {
            return Err(GridError::BadRange {
                k_min: self.k_min,
                split: self.split,
            });
        }
        if let Some(c) = self.cluster {
            if !(c.width > 1.0 && c.refinement >= 1 && c.center > 0.0) {
                return Err(GridError::BadCluster);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TailMap {
    /// `k = split / t`, with the listed panel edges in `t`.
    Reciprocal { split: f64, t_edges: Vec<f64> },
}

/// Panel edges and tail transformation, kept for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelMap {
    pub edges: Vec<f64>,
    pub order: usize,
    pub tail: TailMap,
    pub tail_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_map: PanelMap,
}

impl SpectralGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panel_map(&self) -> &PanelMap {
        &self.panel_map
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(k_i)` in node order (fixed, so bit-reproducible).
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        F: Fn(f64) -> T,
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
    {
        self.nodes.iter().zip(&self.weights).map(|(&k, &w)| f(k) * w).sum()
    }
}

fn finite_edges(spec: &GridSpec) -> Vec<f64> {
    let ratio = (spec.split / spec.k_min).powf(1.0 / spec.panels as f64);
    let mut edges = vec![0.0, spec.k_min];
    for i in 1..=spec.panels {
        edges.push(if i == spec.panels {
            spec.split
        } else {
            spec.k_min * ratio.powi(i as i32)
        });
    }
    let Some(cluster) = spec.cluster else {
        return edges;
    };
    let lo = cluster.center / cluster.width;
    let hi = cluster.center * cluster.width;
    let mut refined = vec![edges[0]];
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inside = a > 0.0 && b > lo && a < hi;
        let pieces = if inside { cluster.refinement + 1 } else { 1 };
        let step = (b / a.max(f64::MIN_POSITIVE)).powf(1.0 / pieces as f64);
        for p in 1..=pieces {
            refined.push(if p == pieces { b } else { a * step.powi(p as i32) });
        }
    }
    refined
}

/// Build the grid described by `spec`.
pub fn build_grid(spec: &GridSpec) -> Result<SpectralGrid, GridError> {
    spec.validate()?;
    let (x, w) = gauss_legendre(spec.order);
    let edges = finite_edges(spec);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for e in edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }

    // Tail panels are geometric in t on [t_min, 1] plus [0, t_min].
    let (xt, wt) = gauss_legendre(spec.tail_order);
    let t_min = 10f64.powi(-(spec.tail_panels as i32 - 1).max(0));
    let mut t_edges = vec![0.0];
    if spec.tail_panels > 1 {
        let steps = spec.tail_panels - 1;
        for i in 0..=steps {
            t_edges.push(t_min.powf(1.0 - i as f64 / steps as f64));
        }
    } else {
        t_edges.push(1.0);
    }
    let mut tail = Vec::new();
    for e in t_edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in xt.iter().zip(&wt) {
            let t = mid + half * xi;
            tail.push((spec.split / t, spec.split / (t * t) * half * wi));
        }
    }
    tail.reverse();
    for (k, wk) in tail {
        nodes.push(k);
        weights.push(wk);
    }

    Ok(SpectralGrid {
        nodes,
        weights,
        panel_map: PanelMap {
            edges,
            order: spec.order,
            tail: TailMap::Reciprocal {
                split: spec.split,
                t_edges,
            },
            tail_order: spec.tail_order,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_invariants() {
        let grid = build_grid(&GridSpec::default()).unwrap();
        assert!(grid.nodes().windows(2).all(|p| p[0] < p[1]));
        assert!(grid.nodes()[0] > 0.0);
        assert!(grid.weights().iter().all(|&w| w > 0.0));
        let one: f64 = grid.integrate(|k| (-k).exp());
        assert!((one - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_integral() {
        let grid = build_grid(&GridSpec::default()).unwrap();
        let v: f64 = grid.integrate(|k| (-k * k).exp());
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn higher_order_reduces_error() {
        let coarse = GridSpec {
            panels: 6,
            order: 3,
            ..GridSpec::default()
        };
        let fine = GridSpec {
            order: 6,
            ..coarse.clone()
        };
        let err = |spec: &GridSpec| {
            let g = build_grid(spec).unwrap();
            (g.integrate(|k: f64| (-k).exp()) - 1.0).abs()
        };
        let (e1, e2) = (err(&coarse), err(&fine));
        assert!(e2 < e1, "{e2} !< {e1}");
    }

    #[test]
    fn cluster_adds_panels_in_band() {
        let plain = GridSpec::default();
        let clustered = GridSpec {
            cluster: Some(Cluster {
                center: 1.0,
                width: 3.0,
                refinement: 1,
            }),
            ..plain.clone()
        };
        let a = build_grid(&plain).unwrap();
        let b = build_grid(&clustered).unwrap();
        assert!(b.len() > a.len());
        let v: f64 = b.integrate(|k| (-k).exp());
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_specs() {
        let base = GridSpec::default();
        assert_eq!(
            build_grid(&GridSpec {
                panels: 0,
                ..base.clone()
            }),
            Err(GridError::NoPanels)
        );
        assert_eq!(
            build_grid(&GridSpec {
                order: 0,
                ..base.clone()
            }),
            Err(GridError::ZeroOrder)
        );
        assert!(matches!(
            build_grid(&GridSpec {
                k_min: 2e3,
                ..base.clone()
            }),
            Err(GridError::BadRange { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let a = build_grid(&GridSpec::default()).unwrap();
        let b = build_grid(&GridSpec::default()).unwrap();
        assert_eq!(a, b);
        let sa: f64 = a.integrate(|k| 1.0 / (1.0 + k * k));
        let sb: f64 = b.integrate(|k| 1.0 / (1.0 + k * k));
        assert_eq!(sa.to_bits(), sb.to_bits());
    }
}
