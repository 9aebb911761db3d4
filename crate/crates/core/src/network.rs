//! Routing network model: graph, per-source path lists, and edge flows.
//!
//! Node ids are 1-based. Edge indices are 0-based inside the library and
//! 1-based in JSON.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A source (decision maker) entry of a [`NetworkSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub node: usize,
    pub demand: f64,
}

/// A single path, either as a node walk or as explicit 1-based edge indices.
///
/// The node form is ambiguous when a hop is served by parallel edges; such
/// paths must be given in the edge form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSpec {
    Nodes(Vec<usize>),
    Edges { edges: Vec<usize> },
}

/// Structured network description as it appears in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub sources: Vec<SourceSpec>,
    pub paths: Vec<Vec<PathSpec>>,
}

/// Flat vector partitioned into one block per decision maker.
///
/// Used both for joint strategy profiles (`u`) and for operator values
/// (gradients, pseudo-gradients) that share the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    values: Vec<f64>,
    offsets: Vec<usize>,
}

/// Joint decision: per-source nonnegative path allocations.
pub type FlowProfile = BlockVector;
/// Operator value with the same block layout as a [`FlowProfile`].
pub type GradientVector = BlockVector;

impl BlockVector {
    /// `offsets` has one entry per block plus a trailing total length.
    pub fn new(values: Vec<f64>, offsets: Vec<usize>) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() == values.len();
        if !ok {
            return Err(Error::DimensionMismatch {
                expected: offsets.last().copied().unwrap_or(0),
                got: values.len(),
            });
        }
        Ok(Self { values, offsets })
    }

    pub fn from_blocks(blocks: Vec<Vec<f64>>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        let mut values = Vec::new();
        for b in blocks {
            values.extend(b);
            offsets.push(values.len());
        }
        Self { values, offsets }
    }

    pub fn zeros_like(other: &BlockVector) -> Self {
        Self {
            values: vec![0.0; other.values.len()],
            offsets: other.offsets.clone(),
        }
    }

    /// Same layout as `self`, with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(values, self.offsets.clone())
    }

    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_blocks(&self) -> Vec<Vec<f64>> {
        (0..self.num_blocks())
            .map(|i| self.block(i).to_vec())
            .collect()
    }

    pub fn same_layout(&self, other: &BlockVector) -> bool {
        self.offsets == other.offsets
    }

    pub fn dot(&self, other: &BlockVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    pub fn sub(&self, other: &BlockVector) -> BlockVector {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        BlockVector {
            values,
            offsets: self.offsets.clone(),
        }
    }

    pub fn distance(&self, other: &BlockVector) -> f64 {
        distance(&self.values, &other.values)
    }

    pub fn max_abs_diff(&self, other: &BlockVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Returns a copy where block `i` is replaced by `block`.
    pub fn with_block(&self, i: usize, block: &[f64]) -> BlockVector {
        let mut out = self.clone();
        out.block_mut(i).copy_from_slice(block);
        out
    }
}

impl Serialize for BlockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_blocks().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<Vec<f64>>::deserialize(d).map(BlockVector::from_blocks)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub node: usize,
    pub demand: f64,
}

/// Validated routing network. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Network {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    sources: Vec<Source>,
    paths: Vec<Vec<Vec<usize>>>,
    offsets: Vec<usize>,
    destination: usize,
    // L x (sum P_i), column j is the edge indicator of the j-th flattened path.
    incidence: DMatrix<f64>,
    // touches[i][l] == omega(l, i)
    touches: Vec<Vec<bool>>,
}

impl Network {
    pub fn from_spec(spec: &NetworkSpec) -> Result<Self> {
        build_network(spec)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn num_paths(&self, i: usize) -> usize {
        self.paths[i].len()
    }

    pub fn total_paths(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// 1-based (tail, head) of edge `l`.
    pub fn edge(&self, l: usize) -> (usize, usize) {
        self.edges[l]
    }

    pub fn source(&self, i: usize) -> Source {
        self.sources[i]
    }

    pub fn demand(&self, i: usize) -> f64 {
        self.sources[i].demand
    }

    pub fn demands(&self) -> Vec<f64> {
        self.sources.iter().map(|s| s.demand).collect()
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    /// 0-based edge indices of path `k` of source `i`.
    pub fn path_edges(&self, i: usize, k: usize) -> &[usize] {
        &self.paths[i][k]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Flattened column index of path `k` of source `i`.
    pub fn column(&self, i: usize, k: usize) -> usize {
        self.offsets[i] + k
    }

    /// Dense path-edge incidence matrix, `L x sum P_i`.
    pub fn incidence(&self) -> &DMatrix<f64> {
        &self.incidence
    }

    /// Whether any path of source `i` uses edge `l`.
    pub fn touches(&self, i: usize, l: usize) -> bool {
        self.touches[i][l]
    }

    pub fn check_dims(&self, u: &BlockVector) -> Result<()> {
        if u.offsets() != self.offsets.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: self.total_paths(),
                got: u.len(),
            });
        }
        Ok(())
    }

    pub fn check_source(&self, i: usize) -> Result<()> {
        if i >= self.num_sources() {
            return Err(Error::IndexOutOfRange {
                index: i,
                count: self.num_sources(),
            });
        }
        Ok(())
    }

    /// Wrap a flat vector in this network's block layout.
    pub fn profile(&self, values: Vec<f64>) -> Result<BlockVector> {
        if values.len() != self.total_paths() {
            return Err(Error::DimensionMismatch {
                expected: self.total_paths(),
                got: values.len(),
            });
        }
        BlockVector::new(values, self.offsets.clone())
    }

    pub fn zeros(&self) -> BlockVector {
        BlockVector {
            values: vec![0.0; self.total_paths()],
            offsets: self.offsets.clone(),
        }
    }

    /// Even split `r_i / P_i` on every path.
    pub fn uniform_profile(&self) -> FlowProfile {
        let mut u = self.zeros();
        for i in 0..self.num_sources() {
            let share = self.demand(i) / self.num_paths(i) as f64;
            u.block_mut(i).fill(share);
        }
        u
    }

    /// Total flow on every edge.
    pub fn edge_flows(&self, u: &FlowProfile) -> Result<Vec<f64>> {
        self.check_dims(u)?;
        Ok(self.edge_flows_unchecked(u.as_slice()))
    }

    pub(crate) fn edge_flows_unchecked(&self, u: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.num_edges()];
        for (i, paths) in self.paths.iter().enumerate() {
            for (k, edges) in paths.iter().enumerate() {
                let x = u[self.offsets[i] + k];
                for &l in edges {
                    z[l] += x;
                }
            }
        }
        z
    }

    /// Flow that source `i` alone places on every edge.
    pub(crate) fn own_edge_flows(&self, i: usize, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.num_edges()];
        for (k, edges) in self.paths[i].iter().enumerate() {
            let v = u[self.offsets[i] + k];
            for &l in edges {
                x[l] += v;
            }
        }
        x
    }

    /// Simplex membership of every block within `tol`.
    pub fn validate_profile(&self, u: &FlowProfile, tol: f64) -> bool {
        if self.check_dims(u).is_err() {
            return false;
        }
        (0..self.num_sources()).all(|i| {
            let b = u.block(i);
            let sum: f64 = b.iter().sum();
            b.iter().all(|&x| x.is_finite() && x >= -tol) && (sum - self.demand(i)).abs() <= tol
        })
    }

    /// Number of vertices of the joint strategy polytope (`prod P_i`).
    pub fn vertex_count(&self) -> u128 {
        self.paths.iter().map(|p| p.len() as u128).product()
    }

    /// Every vertex of the product of scaled simplices: each source sends its
    /// whole demand down a single path.
    pub fn vertices(&self) -> Vec<FlowProfile> {
        let n = self.num_sources();
        let mut choice = vec![0usize; n];
        let mut out = Vec::new();
        loop {
            let mut u = self.zeros();
            for (i, &k) in choice.iter().enumerate() {
                u.block_mut(i)[k] = self.demand(i);
            }
            out.push(u);
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                choice[i] += 1;
                if choice[i] < self.num_paths(i) {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

/// Validate a [`NetworkSpec`] and convert its paths to edge-index lists.
pub fn build_network(spec: &NetworkSpec) -> Result<Network> {
    let m = spec.nodes;
    if m < 2 {
        return Err(Error::InvalidNetwork("need at least two nodes".into()));
    }
    if spec.edges.is_empty() {
        return Err(Error::InvalidNetwork("no edges".into()));
    }
    let mut edges = Vec::with_capacity(spec.edges.len());
    for (l, &[t, h]) in spec.edges.iter().enumerate() {
        if t == 0 || t > m || h == 0 || h > m {
            return Err(Error::InvalidNetwork(format!(
                "edge {} ({t}->{h}) references a node outside 1..={m}",
                l + 1
            )));
        }
        if t == h {
            return Err(Error::InvalidNetwork(format!(
                "edge {} is a self-loop",
                l + 1
            )));
        }
        edges.push((t, h));
    }
    if spec.sources.is_empty() {
        return Err(Error::InvalidNetwork("no sources".into()));
    }
    if spec.sources.len() >= m {
        return Err(Error::InvalidNetwork(format!(
            "{} sources need more than {} nodes",
            spec.sources.len(),
            m
        )));
    }
    let mut sources = Vec::with_capacity(spec.sources.len());
    for (i, s) in spec.sources.iter().enumerate() {
        if s.node == 0 || s.node > m {
            return Err(Error::InvalidNetwork(format!(
                "source {} sits on nonexistent node {}",
                i + 1,
                s.node
            )));
        }
        if !(s.demand.is_finite() && s.demand > 0.0) {
            return Err(Error::InvalidNetwork(format!(
                "source {} demand must be positive, got {}",
                i + 1,
                s.demand
            )));
        }
        sources.push(Source {
            node: s.node,
            demand: s.demand,
        });
    }
    if spec.paths.len() != sources.len() {
        return Err(Error::InvalidNetwork(format!(
            "{} path lists for {} sources",
            spec.paths.len(),
            sources.len()
        )));
    }

    let mut paths = Vec::with_capacity(sources.len());
    let mut destination: Option<usize> = None;
    for (i, list) in spec.paths.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::InvalidNetwork(format!(
                "source {} has no paths",
                i + 1
            )));
        }
        let mut converted = Vec::with_capacity(list.len());
        for (k, p) in list.iter().enumerate() {
            let path_err = |reason: String| Error::InvalidPath {
                source_index: i + 1,
                path: k + 1,
                reason,
            };
            let edge_list = match p {
                PathSpec::Nodes(nodes) => {
                    if nodes.len() < 2 {
                        return Err(path_err("a node walk needs at least two nodes".into()));
                    }
                    if let Some(&bad) = nodes.iter().find(|&&v| v == 0 || v > m) {
                        return Err(Error::NonexistentNode {
                            source_index: i + 1,
                            path: k + 1,
                            node: bad,
                        });
                    }
                    let mut out = Vec::with_capacity(nodes.len() - 1);
                    for hop in nodes.windows(2) {
                        let matches: Vec<usize> = edges
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e == (hop[0], hop[1]))
                            .map(|(l, _)| l)
                            .collect();
                        match matches.len() {
                            0 => return Err(path_err(format!("no edge {}->{}", hop[0], hop[1]))),
                            1 => out.push(matches[0]),
                            _ => {
                                return Err(path_err(format!(
                                    "hop {}->{} is ambiguous (parallel edges); use the edge form",
                                    hop[0], hop[1]
                                )))
                            }
                        }
                    }
                    out
                }
                PathSpec::Edges { edges: idx } => {
                    if idx.is_empty() {
                        return Err(path_err("empty edge list".into()));
                    }
                    let mut out = Vec::with_capacity(idx.len());
                    for &e in idx {
                        if e == 0 || e > edges.len() {
                            return Err(Error::NonexistentEdge {
                                source_index: i + 1,
                                path: k + 1,
                                edge: e,
                            });
                        }
                        out.push(e - 1);
                    }
                    for w in out.windows(2) {
                        if edges[w[0]].1 != edges[w[1]].0 {
                            return Err(path_err(format!(
                                "edges {} and {} are not consecutive",
                                w[0] + 1,
                                w[1] + 1
                            )));
                        }
                    }
                    out
                }
            };
            if edges[edge_list[0]].0 != sources[i].node {
                return Err(path_err(format!(
                    "does not start at source node {}",
                    sources[i].node
                )));
            }
            let mut seen = edge_list.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(path_err("uses an edge more than once".into()));
            }
            let end = edges[*edge_list.last().unwrap()].1;
            match destination {
                None => destination = Some(end),
                Some(d) if d != end => {
                    return Err(path_err(format!(
                        "ends at node {end}, other paths end at {d}"
                    )))
                }
                _ => {}
            }
            converted.push(edge_list);
        }
        paths.push(converted);
    }
    let destination = destination.expect("at least one path");
    if let Some(i) = sources.iter().position(|s| s.node == destination) {
        return Err(Error::InvalidNetwork(format!(
            "source {} sits on the destination node {destination}",
            i + 1
        )));
    }

    let mut offsets = vec![0];
    for p in &paths {
        offsets.push(offsets.last().unwrap() + p.len());
    }
    let n = *offsets.last().unwrap();
    let num_edges = edges.len();
    let mut incidence = DMatrix::zeros(num_edges, n);
    let mut touches = vec![vec![false; num_edges]; sources.len()];
    for (i, list) in paths.iter().enumerate() {
        for (k, p) in list.iter().enumerate() {
            for &l in p {
                incidence[(l, offsets[i] + k)] = 1.0;
                touches[i][l] = true;
            }
        }
    }

    Ok(Network {
        num_nodes: m,
        edges,
        sources,
        paths,
        offsets,
        destination,
        incidence,
        touches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel() -> NetworkSpec {
        NetworkSpec {
            nodes: 2,
            edges: vec![[1, 2], [1, 2]],
            sources: vec![SourceSpec {
                node: 1,
                demand: 2.0,
            }],
            paths: vec![vec![
                PathSpec::Edges { edges: vec![1] },
                PathSpec::Edges { edges: vec![2] },
            ]],
        }
    }

    fn fig2() -> NetworkSpec {
        let edges = vec![
            [1, 8],
            [1, 7],
            [2, 8],
            [2, 5],
            [7, 8],
            [6, 8],
            [5, 8],
            [3, 5],
            [3, 6],
            [4, 6],
            [4, 7],
        ];
        let walk = |v: &[usize]| PathSpec::Nodes(v.to_vec());
        NetworkSpec {
            nodes: 8,
            edges,
            sources: [(1, 10.0), (2, 15.0), (3, 8.0), (4, 12.0)]
                .iter()
                .map(|&(node, demand)| SourceSpec { node, demand })
                .collect(),
            paths: vec![
                vec![walk(&[1, 8]), walk(&[1, 7, 8])],
                vec![walk(&[2, 8]), walk(&[2, 5, 8])],
                vec![walk(&[3, 5, 8]), walk(&[3, 6, 8])],
                vec![walk(&[4, 6, 8]), walk(&[4, 7, 8])],
            ],
        }
    }

    #[test]
    fn minimal_parallel_network() {
        let net = build_network(&parallel()).unwrap();
        assert_eq!(net.num_edges(), 2);
        assert_eq!(net.num_paths(0), 2);
        assert_eq!(net.destination(), 2);
        assert_eq!(net.path_edges(0, 1), &[1]);
    }

    #[test]
    fn fig2_network_has_eleven_edges() {
        let net = build_network(&fig2()).unwrap();
        assert_eq!(net.num_edges(), 11);
        assert_eq!(net.total_paths(), 8);
        assert_eq!(net.destination(), 8);
        // 2-5-8 uses edges 2->5 (index 3) and 5->8 (index 6)
        assert_eq!(net.path_edges(1, 1), &[3, 6]);
        assert!(net.touches(0, 4));
        assert!(!net.touches(0, 3));
    }

    #[test]
    fn rejects_nonexistent_node() {
        let mut spec = fig2();
        spec.paths[0][1] = PathSpec::Nodes(vec![1, 9, 8]);
        match build_network(&spec) {
            Err(Error::NonexistentNode { node: 9, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonexistent_edge_and_wrong_endpoints() {
        let mut spec = parallel();
        spec.paths[0][0] = PathSpec::Edges { edges: vec![3] };
        assert!(matches!(
            build_network(&spec),
            Err(Error::NonexistentEdge { edge: 3, .. })
        ));

        let mut spec = fig2();
        spec.paths[0][0] = PathSpec::Nodes(vec![2, 8]);
        assert!(matches!(
            build_network(&spec),
            Err(Error::InvalidPath { .. })
        ));

        let mut spec = fig2();
        spec.edges.push([7, 5]);
        spec.paths[0][1] = PathSpec::Nodes(vec![1, 7, 5]);
        assert!(matches!(
            build_network(&spec),
            Err(Error::InvalidPath { .. })
        ));
    }

    #[test]
    fn node_walk_over_parallel_edges_is_ambiguous() {
        let mut spec = parallel();
        spec.paths[0][0] = PathSpec::Nodes(vec![1, 2]);
        assert!(matches!(
            build_network(&spec),
            Err(Error::InvalidPath { .. })
        ));
    }

    #[test]
    fn edge_flows_examples() {
        let spec = NetworkSpec {
            nodes: 2,
            edges: vec![[1, 2]],
            sources: vec![SourceSpec {
                node: 1,
                demand: 2.0,
            }],
            paths: vec![vec![PathSpec::Nodes(vec![1, 2])]],
        };
        let net = build_network(&spec).unwrap();
        let u = net.profile(vec![2.0]).unwrap();
        assert_eq!(net.edge_flows(&u).unwrap(), vec![2.0]);

        // two sources meeting on edge 3->4
        let shared = NetworkSpec {
            nodes: 4,
            edges: vec![[1, 3], [2, 3], [3, 4]],
            sources: vec![
                SourceSpec {
                    node: 1,
                    demand: 1.5,
                },
                SourceSpec {
                    node: 2,
                    demand: 2.5,
                },
            ],
            paths: vec![
                vec![PathSpec::Nodes(vec![1, 3, 4])],
                vec![PathSpec::Nodes(vec![2, 3, 4])],
            ],
        };
        let net = build_network(&shared).unwrap();
        let u = net.profile(vec![1.5, 2.5]).unwrap();
        assert_eq!(net.edge_flows(&u).unwrap()[2], 4.0);
    }

    #[test]
    fn edge_flows_dimension_mismatch() {
        let net = build_network(&parallel()).unwrap();
        let u = BlockVector::from_blocks(vec![vec![1.0, 1.0, 0.0]]);
        assert!(matches!(
            net.edge_flows(&u),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validate_profile_examples() {
        let net = build_network(&parallel()).unwrap();
        let p = |a: f64, b: f64| net.profile(vec![a, b]).unwrap();
        assert!(net.validate_profile(&p(1.0, 1.0), 1e-9));
        assert!(!net.validate_profile(&p(2.5, -0.5), 1e-9));
        assert!(net.validate_profile(&p(1.0 + 5e-10, 1.0 - 5e-10), 1e-9));
    }

    #[test]
    fn vertices_enumerate_product() {
        let net = build_network(&fig2()).unwrap();
        let v = net.vertices();
        assert_eq!(v.len(), 16);
        assert_eq!(net.vertex_count(), 16);
        assert!(v.iter().all(|u| net.validate_profile(u, 0.0)));
    }
}
