use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::layout::{DualGraph, RscLayout, Side, StabilizerKind};
use crate::qsim::{Pauli, PauliString};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Mixed,
    XPlayer,
    ZPlayer,
}

/// One team's partial loops. `x_support` and `z_support` both contain `mixed`
/// and nothing else in common.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Team {
    pub mixed: usize,
    pub x_support: Vec<usize>,
    pub z_support: Vec<usize>,
}

impl Team {
    pub fn qubits(&self) -> BTreeSet<usize> {
        self.x_support.iter().chain(&self.z_support).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub num_qubits: usize,
    pub teams: Vec<Team>,
    /// X checks whose product is `Π_i X̃_i`; empty when the product is a
    /// logical or GHZ stabilizer instead.
    pub region: Vec<usize>,
}

impl LoopConfig {
    pub fn new(num_qubits: usize, mut teams: Vec<Team>, region: Vec<usize>) -> Result<Self> {
        for t in &mut teams {
            t.x_support.sort_unstable();
            t.z_support.sort_unstable();
        }
        let config = Self {
            num_qubits,
            teams,
            region,
        };
        config.validate()?;
        Ok(config)
    }

    /// GHZ teams on `n` qubits: player i owns qubit i, and the `n - players`
    /// spectators join team 1 as X players.
    pub fn ghz(n: usize, players: usize) -> Result<Self> {
        if players < 3 || n < players {
            return Err(Error::Geometry(format!(
                "{players} players do not fit on {n} GHZ qubits"
            )));
        }
        let teams = (0..players)
            .map(|i| Team {
                mixed: i,
                x_support: if i == 1 {
                    std::iter::once(1).chain(players..n).collect()
                } else {
                    vec![i]
                },
                z_support: vec![i],
            })
            .collect();
        Self::new(n, teams, Vec::new())
    }

    pub fn num_teams(&self) -> usize {
        self.teams.len()
    }

    pub fn x_tilde(&self, team: usize) -> PauliString {
        PauliString::uniform(self.num_qubits, Pauli::X, &self.teams[team].x_support)
            .expect("validated support")
    }

    pub fn z_tilde(&self, team: usize) -> PauliString {
        PauliString::uniform(self.num_qubits, Pauli::Z, &self.teams[team].z_support)
            .expect("validated support")
    }

    /// `Ỹ_i`: Y on the mixed qubit, X and Z on the remaining loop qubits.
    pub fn y_tilde(&self, team: usize) -> PauliString {
        self.team_operator(team, true)
    }

    fn team_entries(&self, team: usize, input: bool) -> Vec<(usize, Pauli)> {
        let t = &self.teams[team];
        if !input {
            return t.x_support.iter().map(|&q| (q, Pauli::X)).collect();
        }
        let mut entries = vec![(t.mixed, Pauli::Y)];
        entries.extend(t.x_support.iter().filter(|&&q| q != t.mixed).map(|&q| (q, Pauli::X)));
        entries.extend(t.z_support.iter().filter(|&&q| q != t.mixed).map(|&q| (q, Pauli::Z)));
        entries
    }

    fn team_operator(&self, team: usize, input: bool) -> PauliString {
        PauliString::from_sparse(self.num_qubits, self.team_entries(team, input))
            .expect("validated support")
    }

    /// Product over teams of `X̃_i` (input 0) or `Ỹ_i` (input 1). Measuring
    /// every factor and multiplying the outcomes is exactly what the players do.
    pub fn term_operator(&self, inputs: &[bool]) -> Result<PauliString> {
        if inputs.len() != self.num_teams() {
            return Err(Error::Shape(format!(
                "{} inputs for {} teams",
                inputs.len(),
                self.num_teams()
            )));
        }
        let entries = inputs
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| self.team_entries(i, x));
        PauliString::from_sparse(self.num_qubits, entries)
    }

    pub fn role(&self, q: usize) -> Option<(usize, Role)> {
        self.teams.iter().enumerate().find_map(|(i, t)| {
            if q == t.mixed {
                Some((i, Role::Mixed))
            } else if t.x_support.contains(&q) {
                Some((i, Role::XPlayer))
            } else if t.z_support.contains(&q) {
                Some((i, Role::ZPlayer))
            } else {
                None
            }
        })
    }

    /// `A[i][j]` = whether `X̃_i` anticommutes with `Z̃_j`.
    pub fn anticommutation_matrix(&self) -> Vec<Vec<bool>> {
        let x: Vec<_> = (0..self.num_teams()).map(|i| self.x_tilde(i)).collect();
        let z: Vec<_> = (0..self.num_teams()).map(|i| self.z_tilde(i)).collect();
        x.iter()
            .map(|xi| {
                z.iter()
                    .map(|zj| xi.anticommutes_with(zj).expect("same width"))
                    .collect()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.teams.len() < 3 {
            return Err(Error::Geometry(format!("{} teams, need at least 3", self.teams.len())));
        }
        let mut owner = vec![None; self.num_qubits];
        for (i, t) in self.teams.iter().enumerate() {
            let x: BTreeSet<_> = t.x_support.iter().copied().collect();
            let z: BTreeSet<_> = t.z_support.iter().copied().collect();
            let both: Vec<_> = x.intersection(&z).copied().collect();
            if both != [t.mixed] {
                return Err(Error::Geometry(format!(
                    "team {i}: X and Z loops meet on {both:?}, expected only {}",
                    t.mixed
                )));
            }
            if x.len() != t.x_support.len() || z.len() != t.z_support.len() {
                return Err(Error::Geometry(format!("team {i} lists a qubit twice")));
            }
            for q in x.union(&z) {
                let slot = owner.get_mut(*q).ok_or_else(|| {
                    Error::Geometry(format!("team {i} uses qubit {q} beyond {}", self.num_qubits))
                })?;
                if let Some(j) = slot.replace(i) {
                    return Err(Error::Geometry(format!("qubit {q} shared by teams {j} and {i}")));
                }
            }
        }
        for (i, row) in self.anticommutation_matrix().iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a != (i == j) {
                    return Err(Error::Geometry(format!(
                        "X̃_{i} and Z̃_{j} {} but should not",
                        if a { "anticommute" } else { "commute" }
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// Edge-disjoint routes out of `region` in the X-check graph.
///
/// The X loop of the configuration is the set of qubits leaving the region,
/// so `Π_i X̃_i` is the product of the region's checks (or X̄ when the region
/// is the left boundary). Each team's Z loop runs from `source` to `sink` and
/// crosses the region's edge once, at its mixed qubit. Any two Z loops share
/// both endpoints, so their product is a closed string. Unused boundary qubits
/// join team 0 as X players.
pub fn region_loop_config(
    layout: &RscLayout,
    region: &[usize],
    source: usize,
    sink: usize,
    players: usize,
) -> Result<LoopConfig> {
    let g = layout.dual_graph(StabilizerKind::X)?;
    let n = g.num_nodes();
    let mut inside = vec![false; n];
    for &v in region {
        if v >= n {
            return Err(Error::Geometry(format!("region node {v} not in the graph")));
        }
        inside[v] = true;
    }
    if !inside[source] || inside[sink] {
        return Err(Error::Geometry("source must be inside the region, sink outside".into()));
    }
    let flow = max_flow(&g, &inside, source, sink, players);
    if flow.paths.len() < players {
        return Err(Error::Geometry(format!(
            "only {} disjoint routes out of region {region:?}, need {players}",
            flow.paths.len()
        )));
    }
    let cut: Vec<usize> = (0..layout.num_qubits())
        .filter(|&q| {
            let (a, b) = g.edge(q);
            inside[a] != inside[b]
        })
        .collect();
    let mut routes: Vec<(usize, Vec<usize>)> = flow
        .paths
        .into_iter()
        .map(|path| {
            let exit = *path
                .iter()
                .find(|q| cut.contains(q))
                .expect("every route leaves the region");
            (exit, path)
        })
        .collect();
    routes.sort_by_key(|r| r.0);
    let exits: BTreeSet<usize> = routes.iter().map(|r| r.0).collect();
    let spare: Vec<usize> = cut.iter().copied().filter(|q| !exits.contains(q)).collect();
    let teams = routes
        .into_iter()
        .enumerate()
        .map(|(i, (exit, path))| Team {
            mixed: exit,
            x_support: if i == 0 {
                std::iter::once(exit).chain(spare.iter().copied()).collect()
            } else {
                vec![exit]
            },
            z_support: path,
        })
        .collect();
    let checks = region.iter().copied().filter(|&v| !g.is_boundary(v)).collect();
    LoopConfig::new(layout.num_qubits(), teams, checks)
}

/// The three-team configuration: the general search with `P = 3`.
pub fn p3_loop_config(layout: &RscLayout) -> Result<LoopConfig> {
    general_loop_config(3, layout)
}

/// Loops around the most central weight-4 X check when P ≤ 4 routes fit,
/// otherwise strings from the left boundary (where the X loop is X̄ itself).
pub fn general_loop_config(players: usize, layout: &RscLayout) -> Result<LoopConfig> {
    if players < 3 {
        return Err(Error::Geometry(format!("need at least 3 players, got {players}")));
    }
    let g = layout.dual_graph(StabilizerKind::X)?;
    let (left, right) = boundary_nodes(&g)?;
    for hub in layout.bulk_x_by_centrality() {
        if g.neighbours(hub).len() < players {
            continue;
        }
        for sink in [right, left] {
            if let Ok(c) = region_loop_config(layout, &[hub], hub, sink, players) {
                return Ok(c);
            }
        }
    }
    region_loop_config(layout, &[left], left, right, players).map_err(|_| {
        Error::Geometry(format!(
            "{}x{} patch cannot host {players} teams",
            layout.rows(),
            layout.cols()
        ))
    })
}

/// A deformed version of the hub configuration: the region grows by the first
/// neighbouring X check, so the X loops encircle two checks.
pub fn enlarged_loop_config(players: usize, layout: &RscLayout) -> Result<LoopConfig> {
    let base = general_loop_config(players, layout)?;
    let [hub] = base.region[..] else {
        return Err(Error::Geometry("no bulk hub to enlarge".into()));
    };
    let g = layout.dual_graph(StabilizerKind::X)?;
    let (left, right) = boundary_nodes(&g)?;
    for &(nb, _) in g.neighbours(hub) {
        if g.is_boundary(nb) || nb == hub {
            continue;
        }
        for sink in [right, left] {
            if let Ok(c) = region_loop_config(layout, &[hub, nb], hub, sink, players) {
                return Ok(c);
            }
        }
    }
    Err(Error::Geometry("no enlarged region fits".into()))
}

fn boundary_nodes(g: &DualGraph) -> Result<(usize, usize)> {
    match (g.boundary_node(Side::Left), g.boundary_node(Side::Right)) {
        (Some(l), Some(r)) => Ok((l, r)),
        _ => Err(Error::Internal("X-check graph lacks left/right boundaries".into())),
    }
}

struct Flow {
    paths: Vec<Vec<usize>>,
}

/// Unit-capacity flow, edges undirected except that region-boundary edges
/// may only be crossed outward. Stops at `limit` units.
fn max_flow(g: &DualGraph, inside: &[bool], source: usize, sink: usize, limit: usize) -> Flow {
    let m = g.edges().len();
    // flow[q] in {-1, 0, 1}: +1 means a → b for edge (a, b).
    let mut flow = vec![0i8; m];
    let can_push = |flow: &[i8], q: usize, from: usize| -> bool {
        let (a, b) = g.edge(q);
        let forward = from == a;
        let (u, v) = if forward { (a, b) } else { (b, a) };
        let f = if forward { flow[q] } else { -flow[q] };
        if f >= 1 || a == b {
            return false;
        }
        // Entering the region is only allowed to cancel outgoing flow.
        !( !inside[u] && inside[v] && f == 0)
    };
    let mut total = 0;
    while total < limit {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.num_nodes()];
        let mut seen = vec![false; g.num_nodes()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for &(v, q) in g.neighbours(u) {
                if !seen[v] && can_push(&flow, q, u) {
                    seen[v] = true;
                    prev[v] = Some((u, q));
                    queue.push_back(v);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut v = sink;
        while let Some((u, q)) = prev[v] {
            flow[q] += if g.edge(q).0 == u { 1 } else { -1 };
            v = u;
        }
        total += 1;
    }
    // Decompose into simple source → sink paths, discarding cycles.
    let mut used = vec![false; m];
    let mut paths = Vec::new();
    for _ in 0..total {
        let mut path: Vec<usize> = Vec::new();
        let mut nodes = vec![source];
        let mut u = source;
        while u != sink {
            let step = g.neighbours(u).iter().find(|&&(_, q)| {
                let (a, _) = g.edge(q);
                !used[q] && flow[q] != 0 && ((flow[q] > 0) == (a == u))
            });
            let Some(&(v, q)) = step else { break };
            used[q] = true;
            if let Some(k) = nodes.iter().position(|&w| w == v) {
                nodes.truncate(k + 1);
                path.truncate(k);
            } else {
                nodes.push(v);
                path.push(q);
            }
            u = v;
        }
        if u == sink {
            paths.push(path);
        }
    }
    Flow { paths }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_rsc_layout;

    #[test]
    fn d3_p3_hand_check() {
        let l = build_rsc_layout(3).unwrap();
        let c = p3_loop_config(&l).unwrap();
        assert_eq!(c.region, vec![1]);
        let mixed: Vec<_> = c.teams.iter().map(|t| t.mixed).collect();
        assert_eq!(mixed, vec![2, 4, 5]);
        assert_eq!(c.teams[0].x_support, vec![1, 2]);
        assert_eq!(c.teams[1].z_support, vec![4, 7, 8]);
        assert_eq!(c.teams[2].z_support, vec![5]);
        assert_eq!(c.role(1), Some((0, Role::XPlayer)));
        assert_eq!(c.role(7), Some((1, Role::ZPlayer)));
        assert_eq!(c.role(0), None);
    }

    #[test]
    fn ghz_teams() {
        let c = LoopConfig::ghz(5, 3).unwrap();
        assert_eq!(c.teams[1].x_support, vec![1, 3, 4]);
        assert_eq!(c.term_operator(&[true, true, false]).unwrap().to_string(), "+YYXXX");
        assert!(LoopConfig::ghz(2, 3).is_err());
    }

    #[test]
    fn rejects_overlapping_teams() {
        let t = |m: usize, x: Vec<usize>, z: Vec<usize>| Team {
            mixed: m,
            x_support: x,
            z_support: z,
        };
        let bad = LoopConfig::new(4, vec![t(0, vec![0], vec![0, 1]), t(1, vec![1], vec![1]), t(2, vec![2], vec![2])], vec![]);
        assert!(matches!(bad, Err(Error::Geometry(_))));
    }

    #[test]
    fn too_many_players_for_d3() {
        let l = build_rsc_layout(3).unwrap();
        assert!(matches!(general_loop_config(4, &l), Err(Error::Geometry(_))));
        assert!(general_loop_config(4, &build_rsc_layout(4).unwrap()).is_ok());
    }
}
