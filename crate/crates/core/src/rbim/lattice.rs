use serde::{Deserialize, Serialize};

use crate::lattice::{RscLayout, StabilizerKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lattice {
    /// `size × size` spins with nearest-neighbour bonds.
    Square { size: usize, boundary: Boundary },
    /// Spins on the X checks of a rotated surface code plus its left and
    /// right boundaries, one bond per qubit. This is the graph on which the
    /// deformed code state's amplitudes are Ising weights.
    SurfaceCode { rows: usize, cols: usize },
}

impl Lattice {
    pub fn square(size: usize, boundary: Boundary) -> Self {
        Lattice::Square { size, boundary }
    }

    pub fn surface_code(d: usize) -> Self {
        Lattice::SurfaceCode { rows: d, cols: d }
    }

    pub fn graph(&self) -> Result<BondGraph> {
        match *self {
            Lattice::Square { size, boundary } => square_graph(size, boundary),
            Lattice::SurfaceCode { rows, cols } => {
                surface_code_graph(&RscLayout::rectangular(rows, cols)?)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Lattice::Square { size, boundary } => format!("square-{size}-{boundary:?}").to_lowercase(),
            Lattice::SurfaceCode { rows, cols } => format!("rsc-{rows}x{cols}"),
        }
    }
}

/// Spins joined by bonds, with the bonds of the observable marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondGraph {
    num_spins: usize,
    bonds: Vec<(usize, usize)>,
    /// CSR adjacency: neighbours of spin i are `adj[offsets[i]..offsets[i+1]]`
    /// as `(spin, bond)`.
    offsets: Vec<usize>,
    adj: Vec<(u32, u32)>,
    center: usize,
    observable: Vec<usize>,
}

impl BondGraph {
    /// The observable defaults to the bonds around `center`.
    pub fn new(num_spins: usize, bonds: Vec<(usize, usize)>, center: usize) -> Result<Self> {
        if center >= num_spins {
            return Err(Error::Shape(format!("centre {center} outside {num_spins} spins")));
        }
        let mut lists: Vec<Vec<(u32, u32)>> = vec![Vec::new(); num_spins];
        for (b, &(i, j)) in bonds.iter().enumerate() {
            if i >= num_spins || j >= num_spins || i == j {
                return Err(Error::Shape(format!("bad bond {b}: ({i}, {j})")));
            }
            lists[i].push((j as u32, b as u32));
            lists[j].push((i as u32, b as u32));
        }
        let mut offsets = vec![0];
        let mut adj = Vec::with_capacity(2 * bonds.len());
        for l in &lists {
            adj.extend_from_slice(l);
            offsets.push(adj.len());
        }
        let observable = lists[center].iter().map(|&(_, b)| b as usize).collect();
        Ok(Self {
            num_spins,
            bonds,
            offsets,
            adj,
            center,
            observable,
        })
    }

    /// Replaces the observable bond set.
    pub fn with_observable(mut self, mut bonds: Vec<usize>) -> Result<Self> {
        bonds.sort_unstable();
        bonds.dedup();
        if let Some(&b) = bonds.iter().find(|&&b| b >= self.bonds.len()) {
            return Err(Error::Shape(format!("observable bond {b} out of range")));
        }
        self.observable = bonds;
        Ok(self)
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn observable(&self) -> &[usize] {
        &self.observable
    }

    pub(crate) fn neighbours(&self, spin: usize) -> &[(u32, u32)] {
        &self.adj[self.offsets[spin]..self.offsets[spin + 1]]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_spins).map(|i| self.neighbours(i).len()).max().unwrap_or(0)
    }
}

fn square_graph(size: usize, boundary: Boundary) -> Result<BondGraph> {
    let min = match boundary {
        Boundary::Open => 2,
        Boundary::Periodic => 3,
    };
    if size < min || size > 1024 {
        return Err(Error::ResourceLimit(format!(
            "{boundary:?} square lattice needs {min} ≤ L ≤ 1024, got {size}"
        )));
    }
    let idx = |r: usize, c: usize| r * size + c;
    let mut bonds = Vec::new();
    for r in 0..size {
        for c in 0..size {
            if c + 1 < size {
                bonds.push((idx(r, c), idx(r, c + 1)));
            } else if boundary == Boundary::Periodic {
                bonds.push((idx(r, c), idx(r, 0)));
            }
            if r + 1 < size {
                bonds.push((idx(r, c), idx(r + 1, c)));
            } else if boundary == Boundary::Periodic {
                bonds.push((idx(r, c), idx(0, c)));
            }
        }
    }
    BondGraph::new(size * size, bonds, idx(size / 2, size / 2))
}

/// Spin `k` is X check `k`, then the left and right boundaries; bond `q` is
/// qubit `q`. The observable is the most central weight-4 check.
pub fn surface_code_graph(layout: &RscLayout) -> Result<BondGraph> {
    let g = layout.dual_graph(StabilizerKind::X)?;
    let center = *layout
        .bulk_x_by_centrality()
        .first()
        .ok_or_else(|| Error::Geometry("patch has no weight-4 X check".into()))?;
    BondGraph::new(g.num_nodes(), g.edges().to_vec(), center)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bond_counts() {
        let open = Lattice::square(3, Boundary::Open).graph().unwrap();
        assert_eq!(open.num_bonds(), 12);
        assert_eq!(open.center(), 4);
        assert_eq!(open.observable().len(), 4);
        let periodic = Lattice::square(8, Boundary::Periodic).graph().unwrap();
        assert_eq!(periodic.num_bonds(), 128);
        assert_eq!(periodic.max_degree(), 4);
        assert!(Lattice::square(2, Boundary::Periodic).graph().is_err());
    }

    #[test]
    fn surface_code_d3() {
        let g = Lattice::surface_code(3).graph().unwrap();
        assert_eq!(g.num_spins(), 6);
        assert_eq!(g.num_bonds(), 9);
        assert_eq!(g.center(), 1);
        assert_eq!(g.observable(), &[1, 2, 4, 5]);
    }
}
