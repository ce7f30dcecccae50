use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMapKind {
    AllToAll,
    Line,
    TShaped,
    Custom,
}

/// Undirected connectivity graph of physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    n_physical: usize,
    edges: BTreeSet<(usize, usize)>,
    kind: CouplingMapKind,
    /// All-pairs hop distance.
    dist: Vec<Vec<usize>>,
}

impl CouplingMap {
    pub fn new(
        n_physical: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        kind: CouplingMapKind,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n_physical || b >= n_physical || a == b {
                return Err(Error::InvalidCouplingMap(format!(
                    "edge ({a}, {b}) invalid for {n_physical} qubits"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut map = Self {
            n_physical,
            edges: set,
            kind,
            dist: Vec::new(),
        };
        map.dist = (0..n_physical).map(|s| map.bfs(s)).collect();
        if map.dist.iter().flatten().any(|&d| d == usize::MAX) {
            return Err(Error::InvalidCouplingMap("map is disconnected".into()));
        }
        Ok(map)
    }

    pub fn custom(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges, CouplingMapKind::Custom)
    }

    pub fn all_to_all(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Self::new(n, edges, CouplingMapKind::AllToAll).expect("complete graph is connected")
    }

    pub fn line(n: usize) -> Self {
        Self::new(n, (1..n).map(|q| (q - 1, q)), CouplingMapKind::Line)
            .expect("line is connected")
    }

    /// `0 - 1 - 2` across the top with a stem `1 - 3 - 4 - ...` hanging from
    /// qubit 1. Five qubits gives the usual T layout. Fewer than four qubits
    /// degenerates to a line.
    pub fn t_shaped(n: usize) -> Self {
        if n < 4 {
            return Self::line(n);
        }
        let mut edges = vec![(0, 1), (1, 2), (1, 3)];
        edges.extend((4..n).map(|q| (q - 1, q)));
        Self::new(n, edges, CouplingMapKind::TShaped).expect("T shape is connected")
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn kind(&self) -> CouplingMapKind {
        self.kind
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.dist[a][b]
    }

    fn neighbors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == q {
                Some(b)
            } else if b == q {
                Some(a)
            } else {
                None
            }
        })
    }

    fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n_physical];
        if source >= self.n_physical {
            return dist;
        }
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(q) = queue.pop_front() {
            for r in self.neighbors(q) {
                if dist[r] == usize::MAX {
                    dist[r] = dist[q] + 1;
                    queue.push_back(r);
                }
            }
        }
        dist
    }

    /// Shortest path from `a` to `b`, both ends included. Ties go to the
    /// lowest-numbered neighbour.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = self
                .neighbors(cur)
                .filter(|&r| self.dist[r][b] + 1 == self.dist[cur][b])
                .min()
                .expect("connected map has a next hop");
            path.push(cur);
        }
        path
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoutingStrategy {
    /// Leave moved qubits where they end up and track the layout.
    #[default]
    TrackLayout,
    /// Undo every SWAP chain right after the gate that needed it.
    SwapBack,
}

/// Insert SWAPs so every two-qubit gate acts on an edge of `map`.
pub fn route<T: Real>(c: &Circuit<T>, map: &CouplingMap) -> Result<Circuit<T>> {
    route_with(c, map, RoutingStrategy::TrackLayout)
}

pub fn route_with<T: Real>(
    c: &Circuit<T>,
    map: &CouplingMap,
    strategy: RoutingStrategy,
) -> Result<Circuit<T>> {
    let n_phys = map.n_physical();
    if n_phys < c.n_qubits() {
        return Err(Error::InvalidCouplingMap(format!(
            "{} physical qubits for a {}-qubit circuit",
            n_phys,
            c.n_qubits()
        )));
    }
    // pos[v] = physical home of the circuit's qubit v; occupant is its inverse.
    let mut pos: Vec<usize> = (0..n_phys).collect();
    let mut occupant: Vec<usize> = (0..n_phys).collect();
    let mut out = Vec::with_capacity(c.len());
    for gate in c.gates() {
        let (a, b) = gate.qubits();
        let Some(b) = b else {
            out.push(gate.map_qubits(|v| pos[v]));
            continue;
        };
        let (pa, pb) = (pos[a], pos[b]);
        if map.connected(pa, pb) {
            out.push(gate.map_qubits(|v| pos[v]));
            continue;
        }
        let path = map.shortest_path(pa, pb);
        let hops: Vec<(usize, usize)> = path[..path.len() - 1]
            .windows(2)
            .map(|w| (w[0], w[1]))
            .collect();
        for &(x, y) in &hops {
            out.push(Gate::Swap(x, y));
            occupant.swap(x, y);
            pos[occupant[x]] = x;
            pos[occupant[y]] = y;
        }
        out.push(gate.map_qubits(|v| pos[v]));
        if strategy == RoutingStrategy::SwapBack {
            for &(x, y) in hops.iter().rev() {
                out.push(Gate::Swap(x, y));
                occupant.swap(x, y);
                pos[occupant[x]] = x;
                pos[occupant[y]] = y;
            }
        }
    }
    let mut layout: Vec<usize> = c.layout().iter().map(|&v| pos[v]).collect();
    // Extra physical qubits are appended as idle logical slots.
    layout.extend((c.n_qubits()..n_phys).map(|v| pos[v]));
    Circuit::with_layout(n_phys, c.logical_qubits(), out, layout)
}
