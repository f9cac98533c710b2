use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GraphError;

pub type VertexId = u32;

/// Role of a component in the boundary divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    E,
    LineAtInfinity,
    DComponent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    weight: i64,
    tag: Option<Tag>,
}

/// Dual graph of an SNC divisor made of smooth rational curves.
///
/// Vertices carry self-intersection weights. With the E-tagged vertex removed
/// the graph is a forest; E may meet a component more than once (the closure
/// of C* meets the boundary twice, so D+E always carries one cycle through E).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightedTree {
    nodes: BTreeMap<VertexId, Node>,
    adj: BTreeMap<VertexId, BTreeMap<VertexId, u32>>,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: VertexId,
    weight: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<Tag>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    vertices: Vec<VertexJson>,
    edges: Vec<[VertexId; 2]>,
}

impl WeightedTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds and validates a tree from `(id, weight, tag)` triples and an edge list.
    pub fn from_parts(
        vertices: &[(VertexId, i64, Option<Tag>)],
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, GraphError> {
        let mut t = Self::new();
        for &(id, w, tag) in vertices {
            if t.nodes.contains_key(&id) {
                return Err(GraphError::DuplicateVertex(id));
            }
            t.insert_vertex(id, w, tag);
        }
        for &(a, b) in edges {
            t.add_edge(a, b)?;
        }
        t.validate()?;
        Ok(t)
    }

    /// A path of vertices with the given weights; ids are `0..weights.len()`.
    pub fn chain(weights: &[i64]) -> Self {
        let mut t = Self::new();
        for (i, &w) in weights.iter().enumerate() {
            t.insert_vertex(i as VertexId, w, None);
            if i > 0 {
                t.add_edge(i as VertexId - 1, i as VertexId).expect("fresh ids");
            }
        }
        t
    }

    pub fn insert_vertex(&mut self, id: VertexId, weight: i64, tag: Option<Tag>) {
        self.nodes.insert(id, Node { weight, tag });
        self.adj.entry(id).or_default();
    }

    /// Adds a vertex with the next free id and returns that id.
    pub fn add_vertex(&mut self, weight: i64, tag: Option<Tag>) -> VertexId {
        let id = self.next_id();
        self.insert_vertex(id, weight, tag);
        id
    }

    pub fn next_id(&self) -> VertexId {
        self.nodes.keys().next_back().map_or(0, |m| m + 1)
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        self.require(a)?;
        self.require(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        *self.adj.get_mut(&a).unwrap().entry(b).or_insert(0) += 1;
        *self.adj.get_mut(&b).unwrap().entry(a).or_insert(0) += 1;
        Ok(())
    }

    /// Removes one copy of the edge `a—b`.
    pub fn remove_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if self.edge_mult(a, b) == 0 {
            return Err(GraphError::NoSuchEdge(a, b));
        }
        for (x, y) in [(a, b), (b, a)] {
            let m = self.adj.get_mut(&x).unwrap();
            let c = m.get_mut(&y).unwrap();
            *c -= 1;
            if *c == 0 {
                m.remove(&y);
            }
        }
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.require(v)?;
        let nbrs: Vec<VertexId> = self.adj[&v].keys().copied().collect();
        for n in nbrs {
            self.adj.get_mut(&n).unwrap().remove(&v);
        }
        self.adj.remove(&v);
        self.nodes.remove(&v);
        Ok(())
    }

    pub fn require(&self, v: VertexId) -> Result<(), GraphError> {
        if self.nodes.contains_key(&v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.nodes.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = VertexId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn weight(&self, v: VertexId) -> i64 {
        self.nodes[&v].weight
    }

    pub fn set_weight(&mut self, v: VertexId, w: i64) {
        self.nodes.get_mut(&v).expect("known vertex").weight = w;
    }

    pub fn tag(&self, v: VertexId) -> Option<Tag> {
        self.nodes[&v].tag
    }

    pub fn set_tag(&mut self, v: VertexId, tag: Option<Tag>) {
        self.nodes.get_mut(&v).expect("known vertex").tag = tag;
    }

    pub fn is_e(&self, v: VertexId) -> bool {
        self.tag(v) == Some(Tag::E)
    }

    pub fn e_vertex(&self) -> Option<VertexId> {
        self.nodes
            .iter()
            .find(|(_, n)| n.tag == Some(Tag::E))
            .map(|(&id, _)| id)
    }

    pub fn find_tag(&self, tag: Tag) -> Option<VertexId> {
        self.nodes
            .iter()
            .find(|(_, n)| n.tag == Some(tag))
            .map(|(&id, _)| id)
    }

    /// Ids of all non-E vertices.
    pub fn d_ids(&self) -> Vec<VertexId> {
        self.ids().filter(|&v| !self.is_e(v)).collect()
    }

    /// Neighbours with edge multiplicities, in increasing id order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.adj[&v].iter().map(|(&n, &m)| (n, m))
    }

    pub fn edge_mult(&self, a: VertexId, b: VertexId) -> u32 {
        self.adj
            .get(&a)
            .and_then(|m| m.get(&b))
            .copied()
            .unwrap_or(0)
    }

    /// Number of intersection points with other components.
    pub fn degree(&self, v: VertexId) -> u32 {
        self.adj[&v].values().sum()
    }

    pub fn degree_within(&self, v: VertexId, set: &BTreeSet<VertexId>) -> u32 {
        self.adj[&v]
            .iter()
            .filter(|(n, _)| set.contains(n))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Degree counting only non-E neighbours.
    pub fn degree_in_d(&self, v: VertexId) -> u32 {
        self.adj[&v]
            .iter()
            .filter(|(n, _)| !self.is_e(**n))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Each edge once, with multiplicity, as `(a, b, mult)` with `a < b`.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, u32)> {
        let mut out = Vec::new();
        for (&a, m) in &self.adj {
            for (&b, &k) in m {
                if a < b {
                    out.push((a, b, k));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> u32 {
        self.edges().iter().map(|e| e.2).sum()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), GraphError> {
        let es: Vec<VertexId> = self.ids().filter(|&v| self.is_e(v)).collect();
        if es.len() > 1 {
            return Err(GraphError::DuplicateE);
        }
        let mut parent: BTreeMap<VertexId, VertexId> = self.ids().map(|v| (v, v)).collect();
        fn find(p: &mut BTreeMap<VertexId, VertexId>, mut x: VertexId) -> VertexId {
            while p[&x] != x {
                let up = p[&p[&x]];
                p.insert(x, up);
                x = up;
            }
            x
        }
        for (a, b, m) in self.edges() {
            if self.is_e(a) || self.is_e(b) {
                continue;
            }
            if m > 1 {
                return Err(GraphError::MultiEdge(a, b));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(GraphError::Cycle);
            }
            parent.insert(ra, rb);
        }
        Ok(())
    }

    /// Connected components of the subgraph induced on `set`.
    pub fn components_within(&self, set: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in set {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![s];
            seen.insert(s);
            while let Some(x) = stack.pop() {
                comp.insert(x);
                for (n, _) in self.neighbors(x) {
                    if set.contains(&n) && seen.insert(n) {
                        stack.push(n);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let all: BTreeSet<VertexId> = self.ids().collect();
        self.components_within(&all).len() <= 1
    }

    /// Induced subtree on `set`, keeping ids, weights and tags.
    pub fn induced(&self, set: &BTreeSet<VertexId>) -> Result<Self, GraphError> {
        let mut t = Self::new();
        for &v in set {
            self.require(v).map_err(|_| GraphError::InvalidSubset(v))?;
            let n = &self.nodes[&v];
            t.insert_vertex(v, n.weight, n.tag);
        }
        for (a, b, m) in self.edges() {
            if set.contains(&a) && set.contains(&b) {
                for _ in 0..m {
                    t.add_edge(a, b)?;
                }
            }
        }
        Ok(t)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let vertices = self
            .nodes
            .iter()
            .map(|(&id, n)| VertexJson {
                id,
                weight: n.weight,
                tag: n.tag,
            })
            .collect();
        let mut edges = Vec::new();
        for (a, b, m) in self.edges() {
            for _ in 0..m {
                edges.push([a, b]);
            }
        }
        serde_json::to_value(TreeJson { vertices, edges }).expect("serializable")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self, GraphError> {
        let tj: TreeJson =
            serde_json::from_value(v).map_err(|e| GraphError::Parse(e.to_string()))?;
        let vs: Vec<_> = tj.vertices.iter().map(|v| (v.id, v.weight, v.tag)).collect();
        let es: Vec<_> = tj.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_parts(&vs, &es)
    }

    /// Graphviz rendering; E is drawn as a box, the line at infinity doubled.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph divisor {\n");
        for (&id, n) in &self.nodes {
            let shape = match n.tag {
                Some(Tag::E) => "box",
                Some(Tag::LineAtInfinity) => "doublecircle",
                _ => "circle",
            };
            s.push_str(&format!(
                "  v{id} [label=\"{}\", shape={shape}];\n",
                n.weight
            ));
        }
        for (a, b, m) in self.edges() {
            for _ in 0..m {
                s.push_str(&format!("  v{a} -- v{b};\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

impl Serialize for WeightedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json_value(v).map_err(serde::de::Error::custom)
    }
}
