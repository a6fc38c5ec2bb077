//! Species-interaction graph and its edge-graph (line graph) transformation.
//!
//! In the interaction graph a node is a (species, condition) pair and every
//! co-culture record is an edge between its two species under its condition.
//! The edge-graph has one node per record (two in directed mode, one per
//! orientation); two of its nodes are adjacent when their records share an
//! endpoint node, i.e. a species *and* the condition.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::{ConditionId, Dataset, SpeciesId, Split};
use crate::error::{Error, Result};
use crate::features::{assemble_features, Direction, FeatureContext, FEATURE_DIM};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InteractionEdge {
    pub a: usize,
    pub b: usize,
    pub record: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionGraph {
    pub nodes: Vec<(SpeciesId, ConditionId)>,
    pub edges: Vec<InteractionEdge>,
}

impl InteractionGraph {
    /// Checks the structural invariants: endpoints exist, no self-edges, no
    /// duplicate edges, and both endpoints share a condition.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.a >= self.nodes.len() || e.b >= self.nodes.len() {
                return Err(Error::InvalidConfig(format!("edge {e:?} references a missing node")));
            }
            if e.a == e.b {
                return Err(Error::InvalidConfig(format!("self-edge on node {}", e.a)));
            }
            if self.nodes[e.a].1 != self.nodes[e.b].1 {
                return Err(Error::InvalidConfig(format!("edge {e:?} crosses conditions")));
            }
            if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(Error::InvalidConfig(format!("duplicate edge {e:?}")));
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }
}

/// One node per (species, condition) seen in any record, in order of first
/// appearance; one edge per record.
pub fn build_interaction_graph(dataset: &Dataset) -> InteractionGraph {
    let mut index: HashMap<(SpeciesId, ConditionId), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut node_of = |key: (SpeciesId, ConditionId)| {
        *index.entry(key).or_insert_with(|| {
            nodes.push(key);
            nodes.len() - 1
        })
    };
    let edges = dataset
        .records()
        .iter()
        .enumerate()
        .map(|(record, r)| InteractionEdge {
            a: node_of((r.species_x, r.condition)),
            b: node_of((r.species_y, r.condition)),
            record,
        })
        .collect();
    InteractionGraph { nodes, edges }
}

/// Compressed sparse row adjacency with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency {
    pub offsets: Vec<usize>,
    pub neighbors: Vec<usize>,
}

impl Adjacency {
    /// Symmetric adjacency from an undirected edge list; self-loops and
    /// duplicates are dropped.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut lists = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a != b {
                lists[a].push(b);
                lists[b].push(a);
            }
        }
        Self::from_lists(lists)
    }

    fn from_lists(mut lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
            neighbors.extend_from_slice(l);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.node_count()).all(|i| {
            self.neighbors(i)
                .iter()
                .all(|&j| j != i && self.neighbors(j).binary_search(&i).is_ok())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "one-way")]
    OneWay,
    #[serde(rename = "two-way")]
    TwoWay,
}

impl Task {
    pub fn orientation(self) -> Orientation {
        match self {
            Task::OneWay => Orientation::Directed,
            Task::TwoWay => Orientation::Undirected,
        }
    }

    pub fn n_classes(self) -> usize {
        match self {
            Task::OneWay => 2,
            Task::TwoWay => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::OneWay => "one-way",
            Task::TwoWay => "two-way",
        }
    }

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            Task::OneWay => &["negative", "positive"],
            Task::TwoWay => &["mutualism", "competition", "parasitism"],
        }
    }

    /// Class reported as "positive" in binary metrics.
    pub fn positive_class(self) -> Option<usize> {
        match self {
            Task::OneWay => Some(1),
            Task::TwoWay => None,
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-way" => Ok(Task::OneWay),
            "two-way" => Ok(Task::TwoWay),
            other => Err(Error::ConfigParse(format!(
                "task must be one-way or two-way, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// One node per record, two-way label.
    Undirected,
    /// Two mutually adjacent nodes per record (XY, YX), one-way labels.
    Directed,
}

/// Edge-graph adjacency. In directed mode node `2k` is record `k` seen as
/// XY and `2k+1` as YX.
pub fn line_graph_adjacency(graph: &InteractionGraph, orientation: Orientation) -> Adjacency {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes.len()];
    for (k, e) in graph.edges.iter().enumerate() {
        incident[e.a].push(k);
        incident[e.b].push(k);
    }
    let m = graph.edges.len();
    let mut lists: Vec<Vec<usize>> = match orientation {
        Orientation::Undirected => vec![Vec::new(); m],
        Orientation::Directed => vec![Vec::new(); 2 * m],
    };
    for (k, e) in graph.edges.iter().enumerate() {
        for &endpoint in &[e.a, e.b] {
            for &other in &incident[endpoint] {
                if other == k {
                    continue;
                }
                match orientation {
                    Orientation::Undirected => lists[k].push(other),
                    Orientation::Directed => {
                        for own in [2 * k, 2 * k + 1] {
                            lists[own].push(2 * other);
                            lists[own].push(2 * other + 1);
                        }
                    }
                }
            }
        }
        if orientation == Orientation::Directed {
            lists[2 * k].push(2 * k + 1);
            lists[2 * k + 1].push(2 * k);
        }
    }
    Adjacency::from_lists(lists)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeGraph {
    pub task: Task,
    pub orientation: Orientation,
    pub n_classes: usize,
    /// node_count × 13.
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub adjacency: Adjacency,
    /// Source record of each node.
    pub node_records: Vec<usize>,
    pub node_directions: Vec<Direction>,
    pub train_mask: Vec<bool>,
    pub test_mask: Vec<bool>,
}

impl EdgeGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Expands a record-level split to node masks; both orientations of a
    /// record land on the same side.
    pub fn apply_record_split(&mut self, split: &Split) -> Result<()> {
        let records = self.node_records.iter().copied().max().map_or(0, |m| m + 1);
        if split.train.len() != records {
            return Err(Error::DimensionMismatch {
                expected: records,
                actual: split.train.len(),
            });
        }
        self.train_mask = self.node_records.iter().map(|&r| split.train[r]).collect();
        self.test_mask = self.node_records.iter().map(|&r| split.test[r]).collect();
        Ok(())
    }

    /// Node-level labels and feature rows selected by `mask`.
    pub fn masked_rows(&self, mask: &[bool]) -> (Matrix, Vec<usize>) {
        let idx: Vec<usize> = (0..self.node_count()).filter(|&i| mask[i]).collect();
        let rows: Vec<&[f64]> = idx.iter().map(|&i| self.features.row(i)).collect();
        let m = if rows.is_empty() {
            Matrix::zeros(0, self.features.cols())
        } else {
            Matrix::from_rows(&rows)
        };
        (m, idx.iter().map(|&i| self.labels[i]).collect())
    }

    /// JSON dump with the node table and CSR arrays.
    pub fn write_json<W: Write>(&self, out: W, meta: serde_json::Value) -> Result<()> {
        let nodes: Vec<serde_json::Value> = (0..self.node_count())
            .map(|i| {
                serde_json::json!({
                    "record": self.node_records[i],
                    "direction": format!("{:?}", self.node_directions[i]),
                    "label": self.labels[i],
                })
            })
            .collect();
        let doc = serde_json::json!({
            "meta": meta,
            "task": self.task.name(),
            "orientation": format!("{:?}", self.orientation),
            "n_classes": self.n_classes,
            "node_count": self.node_count(),
            "nodes": nodes,
            "csr_offsets": self.adjacency.offsets,
            "csr_neighbors": self.adjacency.neighbors,
            "train_mask": self.train_mask,
            "test_mask": self.test_mask,
        });
        let mut out = out;
        serde_json::to_writer(&mut out, &doc)?;
        writeln!(out).map_err(|e| Error::io("<graph>", e))?;
        Ok(())
    }
}

/// Builds the edge-graph with raw (unstandardized) features. Masks start
/// empty; see [`EdgeGraph::apply_record_split`].
pub fn to_edge_graph(
    graph: &InteractionGraph,
    dataset: &Dataset,
    ctx: &FeatureContext,
    task: Task,
) -> Result<EdgeGraph> {
    if graph.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let orientation = task.orientation();
    let adjacency = line_graph_adjacency(graph, orientation);
    let n = adjacency.node_count();
    let records = dataset.records();

    let mut features = Matrix::zeros(n, FEATURE_DIM);
    let mut labels = Vec::with_capacity(n);
    let mut node_records = Vec::with_capacity(n);
    let mut node_directions = Vec::with_capacity(n);
    for e in &graph.edges {
        let r = records
            .get(e.record)
            .ok_or_else(|| Error::InvalidConfig(format!("edge references record {}", e.record)))?;
        let directions: &[Direction] = match orientation {
            Orientation::Undirected => &[Direction::XY],
            Orientation::Directed => &[Direction::XY, Direction::YX],
        };
        for &d in directions {
            let node = node_records.len();
            let f = assemble_features(r, d, ctx)?;
            features.row_mut(node).copy_from_slice(&f.0);
            labels.push(match (task, d) {
                (Task::TwoWay, _) => r.two_way().class_index(),
                (Task::OneWay, Direction::XY) => r.label_xy.class_index(),
                (Task::OneWay, Direction::YX) => r.label_yx.class_index(),
            });
            node_records.push(e.record);
            node_directions.push(d);
        }
    }

    Ok(EdgeGraph {
        task,
        orientation,
        n_classes: task.n_classes(),
        features,
        labels,
        adjacency,
        node_records,
        node_directions,
        train_mask: vec![false; n],
        test_mask: vec![false; n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(nodes: usize, edges: &[(usize, usize)]) -> InteractionGraph {
        InteractionGraph {
            nodes: (0..nodes).map(|i| (SpeciesId(i), ConditionId(0))).collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(record, &(a, b))| InteractionEdge { a, b, record })
                .collect(),
        }
    }

    #[test]
    fn path_becomes_edge() {
        let adj = line_graph_adjacency(&graph(3, &[(0, 1), (1, 2)]), Orientation::Undirected);
        assert_eq!(adj.node_count(), 2);
        assert_eq!(adj.neighbors(0), &[1]);
        assert_eq!(adj.neighbors(1), &[0]);
    }

    #[test]
    fn triangle_is_self_dual() {
        let adj = line_graph_adjacency(&graph(3, &[(0, 1), (1, 2), (0, 2)]), Orientation::Undirected);
        assert_eq!(adj.node_count(), 3);
        for i in 0..3 {
            assert_eq!(adj.degree(i), 2);
        }
        assert!(adj.is_symmetric());
    }

    #[test]
    fn directed_mode_links_orientations() {
        let adj = line_graph_adjacency(&graph(3, &[(0, 1), (1, 2)]), Orientation::Directed);
        assert_eq!(adj.node_count(), 4);
        assert_eq!(adj.neighbors(0), &[1, 2, 3]);
        assert_eq!(adj.neighbors(3), &[0, 1, 2]);
        assert!(adj.is_symmetric());
    }

    #[test]
    fn isolated_edges_have_no_neighbors() {
        let adj = line_graph_adjacency(&graph(4, &[(0, 1), (2, 3)]), Orientation::Undirected);
        assert_eq!(adj.degree(0), 0);
        assert_eq!(adj.degree(1), 0);
    }

    #[test]
    fn from_edges_drops_loops_and_duplicates() {
        let adj = Adjacency::from_edges(3, &[(0, 1), (1, 0), (2, 2)]);
        assert_eq!(adj.neighbors(0), &[1]);
        assert_eq!(adj.degree(2), 0);
        assert_eq!(adj.offsets, vec![0, 1, 2, 2]);
    }

    #[test]
    fn validation_catches_bad_graphs() {
        let mut g = graph(3, &[(0, 1)]);
        assert!(g.validate().is_ok());
        g.nodes[1].1 = ConditionId(1);
        assert!(g.validate().is_err());
        assert!(graph(2, &[(0, 0)]).validate().is_err());
        assert!(graph(2, &[(0, 1), (1, 0)]).validate().is_err());
    }

    #[test]
    fn task_parsing() {
        assert_eq!("one-way".parse::<Task>().unwrap(), Task::OneWay);
        assert!(matches!("three-way".parse::<Task>(), Err(Error::ConfigParse(_))));
    }
}
