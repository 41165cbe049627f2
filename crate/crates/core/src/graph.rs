//! Finite undirected graphs, boundary partitions and combinatorial metrics.
//!
//! Vertices are dense `usize` ids. Distances that do not exist are reported as
//! `None` rather than through a sentinel value.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{arg, Error, Result};

/// Finite, simple, undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate edges collapse; self-loops are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            adjacency,
            labels: None,
        })
    }

    /// Builds a graph from explicit adjacency lists, checking symmetry.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        for (x, list) in adjacency.iter().enumerate() {
            for &y in list {
                if y >= n {
                    return Err(Error::InvalidGraph(format!("neighbor {y} of {x} out of range")));
                }
                if y == x {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {x}")));
                }
                if adjacency[y].binary_search(&x).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric adjacency: {y} in adj({x}) but not {x} in adj({y})"
                    )));
                }
            }
        }
        Ok(Self {
            adjacency,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return arg(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.vertex_count()
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|list| list.binary_search(&b).is_ok())
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return arg(format!("vertex {v} out of range {}", self.vertex_count()));
        }
        Ok(())
    }

    /// Multi-source BFS distances over the whole graph.
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        self.bfs_filtered(sources, |_| true)
    }

    /// Multi-source BFS whose expansion only continues from vertices accepted by `pass`.
    /// Sources are always expanded.
    pub(crate) fn bfs_filtered(
        &self,
        sources: &[usize],
        pass: impl Fn(usize) -> bool,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            if d > 0 && !pass(v) {
                continue;
            }
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within distance `r` of `x`, with their distances.
    pub fn ball(&self, x: usize, r: usize) -> Vec<(usize, usize)> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut out = vec![(x, 0)];
        let mut queue = VecDeque::from([x]);
        dist[x] = 0;
        while let Some(v) = queue.pop_front() {
            if dist[v] == r {
                continue;
            }
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    out.push((w, dist[w]));
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Largest finite distance between two vertices.
    pub fn diameter(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| {
                self.bfs_distances(&[v])
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.bfs_distances(&[0]).iter().all(Option::is_some)
    }
}

/// Role of a vertex relative to a boundary partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    Interior,
    Boundary,
    /// Not adjacent to the interior; excluded from the problem.
    Outside,
}

/// Split of a graph's vertex universe into interior `U` and boundary `δU`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryPartition {
    roles: Vec<Role>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    depth: Vec<Option<usize>>,
}

impl BoundaryPartition {
    /// Builds and validates a partition. Vertices in neither set are `Outside`.
    pub fn new(g: &Graph, interior: &[usize], boundary: &[usize]) -> Result<Self> {
        let p = Self::unchecked(g, interior, boundary)?;
        p.validate(g)?;
        Ok(p)
    }

    fn unchecked(g: &Graph, interior: &[usize], boundary: &[usize]) -> Result<Self> {
        let n = g.vertex_count();
        let mut roles = vec![Role::Outside; n];
        for &v in interior {
            g.check_vertex(v)?;
            roles[v] = Role::Interior;
        }
        for &v in boundary {
            g.check_vertex(v)?;
            if roles[v] == Role::Interior {
                return Err(Error::InvalidPartition(format!(
                    "vertex {v} is both interior and boundary"
                )));
            }
            roles[v] = Role::Boundary;
        }
        let interior: Vec<usize> = (0..n).filter(|&v| roles[v] == Role::Interior).collect();
        let boundary: Vec<usize> = (0..n).filter(|&v| roles[v] == Role::Boundary).collect();
        let depth = g.bfs_filtered(&boundary, |v| roles[v] == Role::Interior);
        let depth = depth
            .into_iter()
            .enumerate()
            .map(|(v, d)| if roles[v] == Role::Outside { None } else { d })
            .collect();
        Ok(Self {
            roles,
            interior,
            boundary,
            depth,
        })
    }

    /// Checks the boundary-adjacency, closure and reachability invariants.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.roles.len() != g.vertex_count() {
            return Err(Error::InvalidPartition("partition built for another graph".into()));
        }
        if self.boundary.is_empty() {
            return Err(Error::InvalidPartition("boundary is empty".into()));
        }
        for &y in &self.boundary {
            if !g.neighbors(y).iter().any(|&x| self.roles[x] == Role::Interior) {
                return Err(Error::InvalidPartition(format!(
                    "boundary vertex {y} has no interior neighbor"
                )));
            }
        }
        for &x in &self.interior {
            if let Some(&w) = g.neighbors(x).iter().find(|&&w| self.roles[w] == Role::Outside) {
                return Err(Error::InvalidPartition(format!(
                    "interior vertex {x} has neighbor {w} outside the partition"
                )));
            }
            if self.depth[x].is_none() {
                return Err(Error::InvalidPartition(format!(
                    "interior vertex {x} cannot reach the boundary"
                )));
            }
        }
        Ok(())
    }

    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.roles[v] == Role::Interior
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.roles[v] == Role::Boundary
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior followed by boundary vertices.
    pub fn universe(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.interior.iter().chain(&self.boundary).copied().collect();
        all.sort_unstable();
        all
    }

    /// `|x| = d(x, δU)`; `None` outside the universe or when unreachable.
    pub fn depth(&self, v: usize) -> Option<usize> {
        self.depth[v]
    }

    pub fn depths(&self) -> &[Option<usize>] {
        &self.depth
    }

    /// Largest interior depth.
    pub fn width(&self) -> usize {
        self.interior
            .iter()
            .filter_map(|&x| self.depth[x])
            .max()
            .unwrap_or(0)
    }
}

/// `min_{s ∈ S} d(x, s)`; `None` when no vertex of `S` is reachable.
pub fn distance(g: &Graph, x: usize, set: &[usize]) -> Result<Option<usize>> {
    if set.is_empty() {
        return arg("distance to an empty set");
    }
    g.check_vertex(x)?;
    for &s in set {
        g.check_vertex(s)?;
    }
    Ok(g.bfs_distances(set)[x])
}

/// `B_r(δU)` and `S_r(δU)` of interior vertices, both sorted.
pub fn ball_and_sphere(p: &BoundaryPartition, r: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if r == 0 {
        return arg("ball radius must be at least 1");
    }
    let mut ball = Vec::new();
    let mut sphere = Vec::new();
    for &x in p.interior() {
        match p.depth(x) {
            Some(d) if d <= r => {
                ball.push(x);
                if d == r {
                    sphere.push(x);
                }
            }
            _ => {}
        }
    }
    Ok((ball, sphere))
}

/// Boundary of `U`: every vertex outside `U` adjacent to it. The result is not validated.
pub fn compute_boundary(g: &Graph, interior: &[usize]) -> Result<BoundaryPartition> {
    let inside: BTreeSet<usize> = interior.iter().copied().collect();
    let mut boundary = BTreeSet::new();
    for &x in &inside {
        g.check_vertex(x)?;
        for &y in g.neighbors(x) {
            if !inside.contains(&y) {
                boundary.insert(y);
            }
        }
    }
    let interior: Vec<usize> = inside.into_iter().collect();
    let boundary: Vec<usize> = boundary.into_iter().collect();
    BoundaryPartition::unchecked(g, &interior, &boundary)
}

/// Maximal subsets of `set` connected by edges with both endpoints in `set`.
/// Components are sorted internally and ordered by their smallest vertex.
pub fn connected_components(g: &Graph, set: &[usize]) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut member = vec![false; n];
    for &v in set {
        if v < n {
            member[v] = true;
        }
    }
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if !member[start] || seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in g.neighbors(v) {
                if member[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Vertices outside `set` adjacent to it, sorted.
pub fn outer_boundary(g: &Graph, set: &[usize]) -> Vec<usize> {
    let mut member = vec![false; g.vertex_count()];
    for &v in set {
        member[v] = true;
    }
    let mut out = BTreeSet::new();
    for &v in set {
        for &w in g.neighbors(v) {
            if !member[w] {
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

/// Distances `d_K(source, ·)` along paths whose interior vertices lie in `K`.
///
/// `in_k` is the membership mask of `K`. Entries for vertices outside `K ∪ δK`
/// are meaningless and left `None`.
pub(crate) fn intrinsic_distances_from(g: &Graph, in_k: &[bool], source: usize) -> Vec<Option<usize>> {
    g.bfs_filtered(&[source], |v| in_k[v])
}

/// Intrinsic distance `d_K(x, y)` on `K ∪ δK`.
pub fn intrinsic_distance(g: &Graph, k: &[usize], x: usize, y: usize) -> Result<Option<usize>> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let mut in_k = vec![false; g.vertex_count()];
    for &v in k {
        g.check_vertex(v)?;
        in_k[v] = true;
    }
    let closure = |v: usize| in_k[v] || g.neighbors(v).iter().any(|&w| in_k[w]);
    if !closure(x) || !closure(y) {
        return arg(format!("vertices {x}, {y} must lie in K ∪ δK"));
    }
    Ok(intrinsic_distances_from(g, &in_k, x)[y])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn distance_on_a_path() {
        let g = path(4);
        assert_eq!(distance(&g, 1, &[3]).unwrap(), Some(2));
        assert_eq!(distance(&g, 2, &[2, 0]).unwrap(), Some(0));
        assert!(distance(&g, 0, &[]).is_err());
    }

    #[test]
    fn unreachable_is_none() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(distance(&g, 0, &[3]).unwrap(), None);
    }

    #[test]
    fn rejects_self_loops_and_asymmetry() {
        assert!(Graph::from_edges(2, [(1, 1)]).is_err());
        assert!(Graph::from_adjacency(vec![vec![1], vec![]]).is_err());
    }

    #[test]
    fn half_line_ball_and_sphere() {
        let g = path(4);
        let p = BoundaryPartition::new(&g, &[1, 2, 3], &[0]).unwrap();
        assert_eq!(ball_and_sphere(&p, 2).unwrap(), (vec![1, 2], vec![2]));
        assert!(ball_and_sphere(&p, 0).is_err());
    }

    #[test]
    fn boundary_of_path_middle() {
        let g = path(3);
        let p = compute_boundary(&g, &[1]).unwrap();
        assert_eq!(p.boundary(), &[0, 2]);
        p.validate(&g).unwrap();
    }

    #[test]
    fn full_interior_has_empty_boundary() {
        let g = path(3);
        let p = compute_boundary(&g, &[0, 1, 2]).unwrap();
        assert!(p.boundary().is_empty());
        assert!(p.validate(&g).is_err());
    }

    #[test]
    fn partition_rejects_unreachable_interior() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        // Vertex 3 is interior but its component never touches the boundary.
        let err = BoundaryPartition::new(&g, &[1, 2, 3], &[0]).unwrap_err();
        assert!(matches!(err, Error::InvalidPartition(_)));
    }

    #[test]
    fn components_respect_the_subset() {
        let g = path(5);
        assert_eq!(connected_components(&g, &[0, 1, 3]), vec![vec![0, 1], vec![3]]);
        assert!(connected_components(&g, &[]).is_empty());
    }

    #[test]
    fn intrinsic_distance_on_path() {
        let g = path(4);
        assert_eq!(intrinsic_distance(&g, &[1, 2], 0, 3).unwrap(), Some(3));
        assert_eq!(intrinsic_distance(&g, &[1, 2], 2, 2).unwrap(), Some(0));
        assert!(intrinsic_distance(&g, &[1], 3, 0).is_err());
    }

    #[test]
    fn intrinsic_distance_cannot_cut_through_outside() {
        // Cycle 0..5; K = {1, 2, 3, 4}; 0 and 5 are both in δK but the short arc
        // 0-5 is a direct edge, allowed since it has no interior vertices.
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        assert_eq!(intrinsic_distance(&g, &[1, 2, 3, 4], 0, 5).unwrap(), Some(1));
        // From 1 to 5 the path through 0 is forbidden (0 ∉ K).
        assert_eq!(intrinsic_distance(&g, &[1, 2, 3, 4], 1, 5).unwrap(), Some(4));
    }
}
