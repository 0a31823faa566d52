use serde::{Deserialize, Serialize};

use crate::qsim::{Pauli, PauliString};
use crate::{Error, Result};

/// Side of a rectangular patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizerKind {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub kind: StabilizerKind,
    /// Face coordinate `(i, j)`: the square whose corners are qubits
    /// `(i, j)`, `(i, j+1)`, `(i+1, j)`, `(i+1, j+1)`. Boundary faces have
    /// `i` or `j` equal to -1 or the last row/column.
    pub face: (i32, i32),
    pub qubits: Vec<usize>,
    pub boundary: Option<Side>,
}

impl Stabilizer {
    pub fn weight(&self) -> usize {
        self.qubits.len()
    }

    pub fn mask(&self) -> u64 {
        self.qubits.iter().fold(0, |m, &q| m | 1 << q)
    }
}

/// Rotated surface code on a `rows × cols` grid of vertex qubits, qubit
/// `r * cols + c` at `(r, c)`. Bulk faces alternate Z/X in a checkerboard with
/// face `(0, 0)` of Z type. Top and bottom boundaries carry weight-2 X checks,
/// left and right carry weight-2 Z checks. The logical X̄ runs down column 0
/// and Z̄ along row 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RscLayout {
    rows: usize,
    cols: usize,
    z_stabilizers: Vec<Stabilizer>,
    x_stabilizers: Vec<Stabilizer>,
}

pub const MIN_DISTANCE: usize = 3;
pub const MAX_DISTANCE: usize = 5;

pub fn build_rsc_layout(d: usize) -> Result<RscLayout> {
    if !(MIN_DISTANCE..=MAX_DISTANCE).contains(&d) {
        return Err(Error::ResourceLimit(format!(
            "distance must be in {MIN_DISTANCE}..={MAX_DISTANCE}, got {d}"
        )));
    }
    RscLayout::rectangular(d, d)
}

impl RscLayout {
    /// Rectangular patch; both sides at least 2 and at most 63 qubits total.
    pub fn rectangular(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 || rows * cols > 63 {
            return Err(Error::ResourceLimit(format!(
                "{rows}x{cols} patch outside the supported range"
            )));
        }
        let (r, c) = (rows as i32, cols as i32);
        let mut z_stabilizers = Vec::new();
        let mut x_stabilizers = Vec::new();
        for i in -1..r {
            for j in -1..c {
                let kind = if (i + j).rem_euclid(2) == 0 {
                    StabilizerKind::Z
                } else {
                    StabilizerKind::X
                };
                let vertical = i == -1 || i == r - 1;
                let horizontal = j == -1 || j == c - 1;
                let boundary = match (vertical, horizontal) {
                    (true, true) => continue,
                    (true, false) if kind != StabilizerKind::X => continue,
                    (false, true) if kind != StabilizerKind::Z => continue,
                    (true, false) => Some(if i == -1 { Side::Top } else { Side::Bottom }),
                    (false, true) => Some(if j == -1 { Side::Left } else { Side::Right }),
                    (false, false) => None,
                };
                let qubits: Vec<usize> = [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]
                    .into_iter()
                    .filter(|&(a, b)| (0..r).contains(&a) && (0..c).contains(&b))
                    .map(|(a, b)| (a * c + b) as usize)
                    .collect();
                let stab = Stabilizer {
                    kind,
                    face: (i, j),
                    qubits,
                    boundary,
                };
                match kind {
                    StabilizerKind::Z => z_stabilizers.push(stab),
                    StabilizerKind::X => x_stabilizers.push(stab),
                }
            }
        }
        let layout = Self {
            rows,
            cols,
            z_stabilizers,
            x_stabilizers,
        };
        layout.check()?;
        Ok(layout)
    }

    fn check(&self) -> Result<()> {
        let n = self.num_qubits();
        if self.z_stabilizers.len() + self.x_stabilizers.len() != n - 1 {
            return Err(Error::Internal(format!(
                "{} stabilizers on {n} qubits",
                self.z_stabilizers.len() + self.x_stabilizers.len()
            )));
        }
        for z in &self.z_stabilizers {
            for x in &self.x_stabilizers {
                if (z.mask() & x.mask()).count_ones() % 2 == 1 {
                    return Err(Error::Internal(format!(
                        "stabilizers at {:?} and {:?} anticommute",
                        z.face, x.face
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Linear size of a square patch; `None` for rectangles.
    pub fn distance(&self) -> Option<usize> {
        (self.rows == self.cols).then_some(self.rows)
    }

    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn qubit(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn coords(&self, q: usize) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    pub fn z_stabilizers(&self) -> &[Stabilizer] {
        &self.z_stabilizers
    }

    pub fn x_stabilizers(&self) -> &[Stabilizer] {
        &self.x_stabilizers
    }

    pub fn stabilizers(&self) -> impl Iterator<Item = &Stabilizer> {
        self.z_stabilizers.iter().chain(&self.x_stabilizers)
    }

    pub fn stabilizer_string(&self, stab: &Stabilizer) -> PauliString {
        let letter = match stab.kind {
            StabilizerKind::X => Pauli::X,
            StabilizerKind::Z => Pauli::Z,
        };
        PauliString::uniform(self.num_qubits(), letter, &stab.qubits)
            .expect("stabilizer qubits lie on the patch")
    }

    pub fn logical_x_qubits(&self) -> Vec<usize> {
        (0..self.rows).map(|r| self.qubit(r, 0)).collect()
    }

    pub fn logical_z_qubits(&self) -> Vec<usize> {
        (0..self.cols).map(|c| self.qubit(0, c)).collect()
    }

    pub fn logical_x(&self) -> PauliString {
        PauliString::uniform(self.num_qubits(), Pauli::X, &self.logical_x_qubits())
            .expect("column 0 lies on the patch")
    }

    pub fn logical_z(&self) -> PauliString {
        PauliString::uniform(self.num_qubits(), Pauli::Z, &self.logical_z_qubits())
            .expect("row 0 lies on the patch")
    }

    /// Type of the weight-2 checks along a side.
    pub fn boundary_kind(&self, side: Side) -> StabilizerKind {
        match side {
            Side::Top | Side::Bottom => StabilizerKind::X,
            Side::Left | Side::Right => StabilizerKind::Z,
        }
    }

    /// Weight-4 X checks ordered by distance of their face centre from the
    /// patch centre, ties by index. Candidate anchors for bulk loops.
    pub fn bulk_x_by_centrality(&self) -> Vec<usize> {
        let (cr, cc) = ((self.rows as f64 - 1.0) / 2.0, (self.cols as f64 - 1.0) / 2.0);
        let mut idx: Vec<(f64, usize)> = self
            .x_stabilizers
            .iter()
            .enumerate()
            .filter(|(_, s)| s.boundary.is_none())
            .map(|(k, s)| {
                let (fi, fj) = (s.face.0 as f64 + 0.5, s.face.1 as f64 + 0.5);
                ((fi - cr).powi(2) + (fj - cc).powi(2), k)
            })
            .collect();
        idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        idx.into_iter().map(|(_, k)| k).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let layout: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        layout.check().map_err(|e| Error::Geometry(e.to_string()))?;
        Ok(layout)
    }

    /// Graph whose nodes are the checks of one type plus the two boundaries
    /// where strings of that type may end, and whose edges are qubits. A qubit
    /// in a single check attaches to the boundary on its side.
    ///
    /// X checks end on the left/right boundaries (nodes `nx`, `nx + 1`), Z
    /// checks on top/bottom (nodes `nz`, `nz + 1`).
    pub fn dual_graph(&self, kind: StabilizerKind) -> Result<DualGraph> {
        let stabs = match kind {
            StabilizerKind::X => &self.x_stabilizers,
            StabilizerKind::Z => &self.z_stabilizers,
        };
        let k = stabs.len();
        let mut touching: Vec<Vec<usize>> = vec![Vec::new(); self.num_qubits()];
        for (s, stab) in stabs.iter().enumerate() {
            for &q in &stab.qubits {
                touching[q].push(s);
            }
        }
        let mut edges = Vec::with_capacity(self.num_qubits());
        for (q, t) in touching.iter().enumerate() {
            let (r, c) = self.coords(q);
            let edge = match (t.as_slice(), kind) {
                (&[a, b], _) => (a, b),
                (&[a], StabilizerKind::X) if c == 0 => (a, k),
                (&[a], StabilizerKind::X) if c == self.cols - 1 => (a, k + 1),
                (&[a], StabilizerKind::Z) if r == 0 => (a, k),
                (&[a], StabilizerKind::Z) if r == self.rows - 1 => (a, k + 1),
                _ => {
                    return Err(Error::Geometry(format!(
                        "qubit {q} touches {} {kind:?} checks",
                        t.len()
                    )))
                }
            };
            edges.push(edge);
        }
        let boundaries = match kind {
            StabilizerKind::X => [Side::Left, Side::Right],
            StabilizerKind::Z => [Side::Top, Side::Bottom],
        };
        Ok(DualGraph::new(k, boundaries, edges))
    }
}

/// Undirected multigraph with one edge per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGraph {
    num_checks: usize,
    boundaries: [Side; 2],
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl DualGraph {
    fn new(num_checks: usize, boundaries: [Side; 2], edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); num_checks + 2];
        for (q, &(a, b)) in edges.iter().enumerate() {
            adjacency[a].push((b, q));
            adjacency[b].push((a, q));
        }
        Self {
            num_checks,
            boundaries,
            edges,
            adjacency,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_checks + 2
    }

    pub fn num_checks(&self) -> usize {
        self.num_checks
    }

    /// Node index of a boundary; `None` if the graph does not end there.
    pub fn boundary_node(&self, side: Side) -> Option<usize> {
        self.boundaries
            .iter()
            .position(|&s| s == side)
            .map(|k| self.num_checks + k)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        node >= self.num_checks
    }

    /// Endpoints of the edge carried by qubit `q`.
    pub fn edge(&self, q: usize) -> (usize, usize) {
        self.edges[q]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbour, qubit)` pairs in increasing qubit order.
    pub fn neighbours(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    /// Shortest path (as qubits) from `from` to `to`, breadth first with
    /// neighbours visited in increasing qubit order.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.num_nodes()];
        let mut seen = vec![false; self.num_nodes()];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = Vec::new();
                let mut v = to;
                while let Some((p, q)) = prev[v] {
                    path.push(q);
                    v = p;
                }
                path.reverse();
                return Some(path);
            }
            for &(v, q) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    prev[v] = Some((u, q));
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d3_matches_hand_layout() {
        let l = build_rsc_layout(3).unwrap();
        assert_eq!(l.num_qubits(), 9);
        assert_eq!(l.z_stabilizers().len(), 4);
        assert_eq!(l.x_stabilizers().len(), 4);
        let x: Vec<_> = l.x_stabilizers().iter().map(|s| (s.face, s.qubits.clone())).collect();
        assert_eq!(
            x,
            vec![
                ((-1, 0), vec![0, 1]),
                ((0, 1), vec![1, 2, 4, 5]),
                ((1, 0), vec![3, 4, 6, 7]),
                ((2, 1), vec![7, 8]),
            ]
        );
        let z: Vec<_> = l.z_stabilizers().iter().map(|s| s.qubits.clone()).collect();
        assert_eq!(z, vec![vec![0, 1, 3, 4], vec![2, 5], vec![3, 6], vec![4, 5, 7, 8]]);
    }

    #[test]
    fn d4_counts() {
        let l = build_rsc_layout(4).unwrap();
        assert_eq!(l.z_stabilizers().len() + l.x_stabilizers().len(), 15);
        assert!(matches!(build_rsc_layout(2), Err(Error::ResourceLimit(_))));
        assert!(matches!(build_rsc_layout(6), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn dual_graph_d3() {
        let l = build_rsc_layout(3).unwrap();
        let g = l.dual_graph(StabilizerKind::X).unwrap();
        let (left, right) = (4, 5);
        assert_eq!(g.boundary_node(Side::Left), Some(left));
        assert_eq!(g.edge(0), (0, left));
        assert_eq!(g.edge(2), (1, right));
        assert_eq!(g.edge(4), (1, 2));
        assert_eq!(g.edge(8), (3, right));
        let zg = l.dual_graph(StabilizerKind::Z).unwrap();
        // Z check {2,5} reaches the top boundary through qubit 2.
        assert_eq!(zg.shortest_path(1, zg.boundary_node(Side::Top).unwrap()), Some(vec![2]));
    }

    #[test]
    fn json_round_trip() {
        let l = build_rsc_layout(4).unwrap();
        let back = RscLayout::from_json(&l.to_json().unwrap()).unwrap();
        assert_eq!(back, l);
    }
}
