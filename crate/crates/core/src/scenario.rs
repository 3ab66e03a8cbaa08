//! Contextuality scenarios as hypergraphs: vertices are measurement outcomes,
//! edges are complete measurements.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    vertices: Vec<String>,
    edges: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioJson {
    vertices: Vec<String>,
    edges: Vec<Vec<String>>,
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScenarioJson { vertices: self.vertices.clone(), edges: self.edge_names() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ScenarioJson::deserialize(d)?;
        Scenario::new(j.vertices, j.edges).map_err(serde::de::Error::custom)
    }
}

impl Scenario {
    /// Validates and builds a scenario. Vertex and edge order are kept as given.
    pub fn new<S: Into<String>>(vertices: Vec<S>, edges: Vec<Vec<S>>) -> Result<Scenario> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let mut idx_edges = Vec::with_capacity(edges.len());
        for e in edges {
            let mut ie = Vec::with_capacity(e.len());
            for v in e {
                let v: String = v.into();
                match index.get(&v) {
                    Some(&i) => ie.push(i),
                    None => return Err(Error::UnknownVertex(v)),
                }
            }
            idx_edges.push(ie);
        }
        Scenario::from_indices(vertices, idx_edges)
    }

    pub fn from_indices(vertices: Vec<String>, edges: Vec<Vec<usize>>) -> Result<Scenario> {
        let n = vertices.len();
        let mut names = BTreeSet::new();
        for v in &vertices {
            if !names.insert(v.as_str()) {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let mut covered = vec![false; n];
        let mut seen = BTreeSet::new();
        for (k, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::EmptyEdge(k));
            }
            let mut inside = BTreeSet::new();
            for &v in e {
                if v >= n {
                    return Err(Error::UnknownVertex(format!("#{v}")));
                }
                if !inside.insert(v) {
                    return Err(Error::DuplicateVertexInEdge { edge: k, vertex: vertices[v].clone() });
                }
                covered[v] = true;
            }
            if !seen.insert(inside.into_iter().collect::<Vec<_>>()) {
                return Err(Error::DuplicateEdge(k));
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::UncoveredVertex(vertices[i].clone()));
        }
        Ok(Scenario { vertices, edges })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_names(&self) -> Vec<Vec<String>> {
        self.edges
            .iter()
            .map(|e| e.iter().map(|&i| self.vertices[i].clone()).collect())
            .collect()
    }

    /// Number of edges containing each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    /// Same hypergraph with vertices renamed in place.
    pub fn renamed(&self, names: Vec<String>) -> Result<Scenario> {
        if names.len() != self.vertices.len() {
            return Err(Error::InvalidDimension("rename length".into()));
        }
        Scenario::from_indices(names, self.edges.clone())
    }

    fn comeasurable(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for e in &self.edges {
            for &a in e {
                for &b in e {
                    if a != b {
                        adj[a][b] = true;
                    }
                }
            }
        }
        adj
    }

    /// Adjacency iff two vertices share an edge.
    pub fn exclusivity_graph(&self) -> OrthogonalityGraph {
        OrthogonalityGraph { vertices: self.vertices.clone(), adj: self.comeasurable() }
    }

    /// Adjacency iff two vertices share no edge.
    pub fn non_orthogonality_graph(&self) -> OrthogonalityGraph {
        self.exclusivity_graph().complement()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityGraph {
    pub vertices: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl OrthogonalityGraph {
    pub fn from_adjacency(vertices: Vec<String>, adj: Vec<Vec<bool>>) -> Result<Self> {
        let n = vertices.len();
        if adj.len() != n || adj.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGraph("adjacency shape".into()));
        }
        for i in 0..n {
            if adj[i][i] {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
            for j in 0..n {
                if adj[i][j] != adj[j][i] {
                    return Err(Error::InvalidGraph(format!("asymmetric pair {i},{j}")));
                }
            }
        }
        Ok(OrthogonalityGraph { vertices, adj })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn induced(&self, keep: &[usize]) -> OrthogonalityGraph {
        let vertices = keep.iter().map(|&i| self.vertices[i].clone()).collect();
        let adj = keep.iter().map(|&i| keep.iter().map(|&j| self.adj[i][j]).collect()).collect();
        OrthogonalityGraph { vertices, adj }
    }

    pub fn complement(&self) -> OrthogonalityGraph {
        let n = self.len();
        let adj = (0..n).map(|i| (0..n).map(|j| i != j && !self.adj[i][j]).collect()).collect();
        OrthogonalityGraph { vertices: self.vertices.clone(), adj }
    }
}

fn sort_dedup_edges(edges: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let set: BTreeSet<Vec<usize>> = edges
        .into_iter()
        .map(|mut e| {
            e.sort_unstable();
            e
        })
        .collect();
    set.into_iter().collect()
}

fn product_vertices(a: &Scenario, b: &Scenario) -> Vec<String> {
    let mut out = Vec::with_capacity(a.num_vertices() * b.num_vertices());
    for u in &a.vertices {
        for v in &b.vertices {
            out.push(format!("({u},{v})"));
        }
    }
    out
}

/// One-way edges: the first party measures `e`, the second party's
/// measurement is chosen as a function of the first party's outcome.
fn one_way_edges(
    first: &Scenario,
    second: &Scenario,
    index: impl Fn(usize, usize) -> usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let kb = second.edges.len();
    for e in &first.edges {
        let mut choice = vec![0usize; e.len()];
        loop {
            let mut edge = Vec::new();
            for (slot, &a) in e.iter().enumerate() {
                for &b in &second.edges[choice[slot]] {
                    edge.push(index(a, b));
                }
            }
            out.push(edge);
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < kb {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    out
}

/// Foulis-Randall product. Vertex `(u,v)` sits at index `i_u * |V_B| + i_v`;
/// edges are deduplicated and sorted.
pub fn foulis_randall_product(a: &Scenario, b: &Scenario) -> Scenario {
    let nb = b.num_vertices();
    let mut edges = one_way_edges(a, b, |x, y| x * nb + y);
    edges.extend(one_way_edges(b, a, |y, x| x * nb + y));
    Scenario { vertices: product_vertices(a, b), edges: sort_dedup_edges(edges) }
}

/// Naive product: only the simultaneous measurements `e_A × e_B`.
pub fn simultaneous_product(a: &Scenario, b: &Scenario) -> Scenario {
    let nb = b.num_vertices();
    let mut edges = Vec::new();
    for ea in &a.edges {
        for eb in &b.edges {
            edges.push(ea.iter().flat_map(|&x| eb.iter().map(move |&y| x * nb + y)).collect());
        }
    }
    Scenario { vertices: product_vertices(a, b), edges: sort_dedup_edges(edges) }
}

/// Party/setting/outcome layout of a Bell scenario built by [`bell_scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellStructure {
    pub parties: usize,
    pub settings: usize,
    pub outcomes: usize,
}

impl BellStructure {
    pub fn new(parties: usize, settings: usize, outcomes: usize) -> Result<Self> {
        if parties == 0 || settings == 0 || outcomes < 2 {
            return Err(Error::InvalidDimension(format!(
                "n={parties}, k={settings}, m={outcomes}"
            )));
        }
        Ok(BellStructure { parties, settings, outcomes })
    }

    fn local(&self) -> usize {
        self.settings * self.outcomes
    }

    pub fn num_vertices(&self) -> usize {
        self.local().pow(self.parties as u32)
    }

    /// Outcomes and settings for vertex `v`, party 1 first.
    pub fn decode(&self, mut v: usize) -> (Vec<usize>, Vec<usize>) {
        let l = self.local();
        let mut a = vec![0; self.parties];
        let mut x = vec![0; self.parties];
        for p in (0..self.parties).rev() {
            let i = v % l;
            v /= l;
            x[p] = i / self.outcomes;
            a[p] = i % self.outcomes;
        }
        (a, x)
    }

    pub fn index(&self, a: &[usize], x: &[usize]) -> usize {
        a.iter().zip(x).fold(0, |acc, (&ai, &xi)| acc * self.local() + xi * self.outcomes + ai)
    }

    pub fn name(&self, v: usize) -> String {
        let (a, x) = self.decode(v);
        let j = |s: &[usize]| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        format!("({}|{})", j(&a), j(&x))
    }
}

fn bell_local(st: &BellStructure) -> Scenario {
    let vertices = (0..st.local()).map(|v| st.name(v)).collect();
    let edges = (0..st.settings)
        .map(|x| (0..st.outcomes).map(|a| x * st.outcomes + a).collect())
        .collect();
    Scenario { vertices, edges }
}

/// `B(n,k,m)`: `n` parties, `k` settings each, `m` outcomes per setting.
/// Vertices are named `(a1,...,an|x1,...,xn)`.
pub fn bell_scenario(n: usize, k: usize, m: usize) -> Result<Scenario> {
    let st = BellStructure::new(n, k, m)?;
    let single = bell_local(&BellStructure { parties: 1, ..st });
    let mut acc = single.clone();
    for _ in 1..n {
        acc = foulis_randall_product(&acc, &single);
    }
    let names = (0..acc.num_vertices()).map(|v| st.name(v)).collect();
    acc.renamed(names)
}

/// Simultaneous-measurement product of `n` copies of `B(1,k,m)`, with Bell names.
pub fn bell_simultaneous(n: usize, k: usize, m: usize) -> Result<Scenario> {
    let st = BellStructure::new(n, k, m)?;
    let single = bell_local(&BellStructure { parties: 1, ..st });
    let mut acc = single.clone();
    for _ in 1..n {
        acc = simultaneous_product(&acc, &single);
    }
    let names = (0..acc.num_vertices()).map(|v| st.name(v)).collect();
    acc.renamed(names)
}

/// Three overlapping three-outcome measurements arranged in a triangle.
pub fn triangle_scenario() -> Scenario {
    Scenario::new(
        vec!["v1", "v2", "v3", "v4", "v5", "v6"],
        vec![vec!["v1", "v2", "v3"], vec!["v3", "v4", "v5"], vec!["v5", "v6", "v1"]],
    )
    .expect("triangle scenario is valid")
}

/// Five binary tests `{yes_i, no_i}` plus the exclusivity edges
/// `{yes_i, yes_{i+1}, rest_i}` of the pentagon.
pub fn kcbs_scenario() -> Scenario {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for i in 1..=5 {
        vertices.push(format!("y{i}"));
    }
    for i in 1..=5 {
        vertices.push(format!("r{i}"));
    }
    for i in 0..5 {
        edges.push(vec![i, (i + 1) % 5, 5 + i]);
    }
    Scenario::from_indices(vertices, edges).expect("kcbs scenario is valid")
}

/// Brute-force hypergraph isomorphism; at most 10 vertices.
pub fn isomorphic(a: &Scenario, b: &Scenario) -> bool {
    let n = a.num_vertices();
    if n != b.num_vertices() || a.num_edges() != b.num_edges() {
        return false;
    }
    assert!(n <= 10, "brute-force isomorphism limited to 10 vertices");
    let target: BTreeSet<Vec<usize>> = sort_dedup_edges(b.edges.clone()).into_iter().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let check = |p: &[usize]| {
        let mapped: BTreeSet<Vec<usize>> = a
            .edges
            .iter()
            .map(|e| {
                let mut m: Vec<usize> = e.iter().map(|&v| p[v]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped == target
    };
    if check(&perm) {
        return true;
    }
    // Heap's algorithm
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if check(&perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncovered_vertex() {
        let r = Scenario::new(vec!["a", "b", "c"], vec![vec!["a", "b"]]);
        assert_eq!(r, Err(Error::UncoveredVertex("c".into())));
    }

    #[test]
    fn empty_and_duplicate() {
        assert_eq!(Scenario::new(vec!["a"], vec![vec!["a"], vec![]]), Err(Error::EmptyEdge(1)));
        assert!(matches!(
            Scenario::new(vec!["a", "b"], vec![vec!["a", "b", "a"]]),
            Err(Error::DuplicateVertexInEdge { .. })
        ));
        assert_eq!(
            Scenario::new(vec!["a", "b"], vec![vec!["a", "b"], vec!["b", "a"]]),
            Err(Error::DuplicateEdge(1))
        );
    }

    #[test]
    fn bell_decode_roundtrip() {
        let st = BellStructure::new(2, 2, 2).unwrap();
        for v in 0..16 {
            let (a, x) = st.decode(v);
            assert_eq!(st.index(&a, &x), v);
        }
        assert_eq!(st.name(st.index(&[1, 0], &[0, 1])), "(1,0|0,1)");
    }

    #[test]
    fn heap_isomorphism_detects_difference() {
        let t = triangle_scenario();
        let path = Scenario::new(
            vec!["v1", "v2", "v3", "v4", "v5", "v6"],
            vec![vec!["v1", "v2", "v3"], vec!["v3", "v4", "v5"], vec!["v5", "v6", "v4"]],
        )
        .unwrap();
        assert!(isomorphic(&t, &t));
        assert!(!isomorphic(&t, &path));
    }
}
