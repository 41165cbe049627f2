//! Lazily described infinite graphs and their finite truncations around the boundary.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{arg, Error, Result};
use crate::graph::{BoundaryPartition, Graph};

/// A locally finite graph given by a neighbor function.
///
/// Implementations must be deterministic: the same key always yields the same list.
pub trait GraphOracle {
    type Key: Clone + Eq + Hash + Debug;

    /// The complete boundary `δU`, which must be finite.
    fn boundary_seed(&self) -> Vec<Self::Key>;

    fn neighbors(&self, v: &Self::Key) -> Vec<Self::Key>;

    fn is_boundary(&self, v: &Self::Key) -> bool;

    fn label(&self, v: &Self::Key) -> String {
        format!("{v:?}")
    }
}

/// Finite problem on `B_r(δU)` with `δU ∪ S_{r+1}(δU)` as boundary.
///
/// Vertex ids follow BFS discovery order from the seed, so the ids of a
/// truncation at radius `r` are a prefix of those at any larger radius.
#[derive(Debug, Clone)]
pub struct Truncation<K> {
    pub graph: Graph,
    pub partition: BoundaryPartition,
    pub radius: usize,
    /// Ids of `δU`.
    pub inner_boundary: Vec<usize>,
    /// Ids of `S_{r+1}(δU)`.
    pub outer_sphere: Vec<usize>,
    /// `|x| = d(x, δU)` per id.
    pub depth: Vec<usize>,
    pub keys: Vec<K>,
    index: HashMap<K, usize>,
}

impl<K: Clone + Eq + Hash + Debug> Truncation<K> {
    pub fn id_of(&self, key: &K) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Ids of interior vertices with `|x| ≤ r`.
    pub fn ball(&self, r: usize) -> Vec<usize> {
        self.partition
            .interior()
            .iter()
            .copied()
            .filter(|&v| self.depth[v] <= r)
            .collect()
    }
}

/// Materializes every vertex with `|x| ≤ r + 1` and all edges among them.
pub fn truncate<O: GraphOracle>(o: &O, r: usize) -> Result<Truncation<O::Key>> {
    if r == 0 {
        return arg("truncation radius must be at least 1");
    }
    let seed = o.boundary_seed();
    if seed.is_empty() {
        return Err(Error::OracleIntegrity("empty boundary seed".into()));
    }
    let mut keys: Vec<O::Key> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut index: HashMap<O::Key, usize> = HashMap::new();
    for k in seed {
        if !o.is_boundary(&k) {
            return Err(Error::OracleIntegrity(format!("seed vertex {k:?} is not a boundary vertex")));
        }
        if index.contains_key(&k) {
            continue;
        }
        index.insert(k.clone(), keys.len());
        keys.push(k);
        depth.push(0);
    }
    let inner_boundary: Vec<usize> = (0..keys.len()).collect();
    let mut lists: Vec<Vec<O::Key>> = Vec::new();
    let mut head = 0;
    while head < keys.len() {
        let list = o.neighbors(&keys[head]);
        let d = depth[head];
        if d <= r {
            for w in &list {
                if index.contains_key(w) {
                    continue;
                }
                if o.is_boundary(w) {
                    return Err(Error::OracleIntegrity(format!(
                        "boundary vertex {w:?} missing from the seed"
                    )));
                }
                index.insert(w.clone(), keys.len());
                keys.push(w.clone());
                depth.push(d + 1);
            }
        }
        lists.push(list);
        head += 1;
    }
    let n = keys.len();
    let mut adjacency = vec![Vec::new(); n];
    for (v, list) in lists.iter().enumerate() {
        for w in list {
            if *w == keys[v] {
                return Err(Error::OracleIntegrity(format!("self-loop at {w:?}")));
            }
            if let Some(&id) = index.get(w) {
                adjacency[v].push(id);
            }
        }
        adjacency[v].sort_unstable();
        adjacency[v].dedup();
    }
    for v in 0..n {
        for &w in &adjacency[v] {
            if adjacency[w].binary_search(&v).is_err() {
                return Err(Error::OracleIntegrity(format!(
                    "asymmetric neighbors: {:?} lists {:?} but not conversely",
                    keys[v], keys[w]
                )));
            }
        }
    }
    let graph = Graph::from_adjacency(adjacency)?;
    let interior: Vec<usize> = (0..n).filter(|&v| depth[v] >= 1 && depth[v] <= r).collect();
    let outer_sphere: Vec<usize> = (0..n).filter(|&v| depth[v] == r + 1).collect();
    let mut boundary = inner_boundary.clone();
    boundary.extend(&outer_sphere);
    let partition = BoundaryPartition::new(&graph, &interior, &boundary)?;
    Ok(Truncation {
        graph,
        partition,
        radius: r,
        inner_boundary,
        outer_sphere,
        depth,
        keys,
        index,
    })
}
