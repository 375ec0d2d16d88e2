//! Growable rooted tree with dense, creation-ordered vertex ids.
//!
//! Vertices are only ever appended below an existing vertex, so every tree
//! built here is connected and acyclic, and `parent(v) < v` holds for every
//! non-root vertex. Earlier ids, parents and depths never change when the
//! tree grows, which is what makes `T_0 ⊆ T_1 ⊆ …` representable as one
//! value mutated in place.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::TreeError;

/// Dense vertex index; `VertexId(0)` is always the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub const ROOT: VertexId = VertexId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// Summary statistics of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub n: u32,
    pub height: u32,
    pub max_degree: u32,
    /// Same value as `height`; kept separately because the one-agent
    /// optimum `2(n-1) - ecc(root)` is phrased in terms of it.
    pub root_ecc: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<u32>,
    /// Depth-1 ancestor of every vertex; `None` for the root.
    branch: Vec<Option<VertexId>>,
    height: u32,
}

impl Default for RootedTree {
    fn default() -> Self {
        Self::new()
    }
}

impl RootedTree {
    /// A tree consisting of the root only.
    pub fn new() -> Self {
        RootedTree {
            parent: vec![None],
            children: vec![Vec::new()],
            depth: vec![0],
            branch: vec![None],
            height: 0,
        }
    }

    /// Builds a tree from a parent array. `parent[0]` must be `None` and
    /// `parent[i] < i` for every other entry.
    pub fn from_parents(parents: &[Option<u32>]) -> Result<Self, TreeError> {
        let Some(first) = parents.first() else {
            return Err(TreeError::parse(0, "parent array is empty"));
        };
        if first.is_some() {
            return Err(TreeError::parse(0, "parent[0] must be null"));
        }
        let mut tree = RootedTree::new();
        tree.reserve(parents.len() - 1);
        for (i, p) in parents.iter().enumerate().skip(1) {
            match p {
                None => return Err(TreeError::parse(i, "only the root may have a null parent")),
                Some(p) if (*p as usize) >= i => {
                    return Err(TreeError::parse(
                        i,
                        format!("parent {p} does not precede vertex {i} (cycle or forward reference)"),
                    ))
                }
                Some(p) => {
                    tree.push_child(VertexId(*p));
                }
            }
        }
        Ok(tree)
    }

    pub fn reserve(&mut self, additional: usize) {
        self.parent.reserve(additional);
        self.children.reserve(additional);
        self.depth.reserve(additional);
        self.branch.reserve(additional);
    }

    /// A root with `branch_count` disjoint paths of `path_len` edges.
    /// Ids are assigned one branch at a time, top to bottom.
    pub fn path_star(branch_count: u32, path_len: u32) -> Result<Self, TreeError> {
        if branch_count == 0 {
            return Err(TreeError::InvalidParameter("branch_count must be at least 1".into()));
        }
        if path_len == 0 {
            return Err(TreeError::InvalidParameter("path_len must be at least 1".into()));
        }
        let mut tree = RootedTree::new();
        tree.reserve(branch_count as usize * path_len as usize);
        for _ in 0..branch_count {
            let mut at = VertexId::ROOT;
            for _ in 0..path_len {
                at = tree.push_child(at);
            }
        }
        Ok(tree)
    }

    /// A path `0 - 1 - … - len`.
    pub fn path(len: u32) -> Self {
        let mut tree = RootedTree::new();
        let mut at = VertexId::ROOT;
        for _ in 0..len {
            at = tree.push_child(at);
        }
        tree
    }

    /// A root with `leaves` children.
    pub fn star(leaves: u32) -> Self {
        let mut tree = RootedTree::new();
        for _ in 0..leaves {
            tree.push_child(VertexId::ROOT);
        }
        tree
    }

    /// Complete binary tree of the given height, ids in BFS order.
    pub fn full_binary(height: u32) -> Self {
        let n = (1u64 << (height + 1)) - 1;
        let parents: Vec<Option<u32>> = (0..n as u32)
            .map(|i| if i == 0 { None } else { Some((i - 1) / 2) })
            .collect();
        RootedTree::from_parents(&parents).expect("BFS parent array is well formed")
    }

    fn push_child(&mut self, at: VertexId) -> VertexId {
        let id = VertexId(self.parent.len() as u32);
        let depth = self.depth[at.index()] + 1;
        let branch = if at.is_root() {
            id
        } else {
            self.branch[at.index()].expect("non-root has a branch")
        };
        self.parent.push(Some(at));
        self.children.push(Vec::new());
        self.depth.push(depth);
        self.branch.push(Some(branch));
        self.children[at.index()].push(id);
        self.height = self.height.max(depth);
        id
    }

    /// Appends a path of `path_len` edges below `at`, then `leaf_count`
    /// children at the end of that path (at `at` itself when `path_len` is 0).
    /// Returns the new ids in creation order.
    pub fn attach_path_with_star(
        &mut self,
        at: VertexId,
        path_len: u32,
        leaf_count: u32,
    ) -> Result<Vec<VertexId>, TreeError> {
        self.check(at)?;
        let mut created = Vec::with_capacity((path_len + leaf_count) as usize);
        self.reserve((path_len + leaf_count) as usize);
        let mut end = at;
        for _ in 0..path_len {
            end = self.push_child(end);
            created.push(end);
        }
        for _ in 0..leaf_count {
            created.push(self.push_child(end));
        }
        Ok(created)
    }

    fn check(&self, v: VertexId) -> Result<(), TreeError> {
        if v.index() < self.parent.len() {
            Ok(())
        } else {
            Err(TreeError::NotFound(v))
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Always false: a tree has at least its root.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.parent.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.parent.len() as u32).map(VertexId)
    }

    #[inline]
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.index()]
    }

    #[inline]
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.index()]
    }

    #[inline]
    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v.index()]
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v.index()].is_empty()
    }

    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.parent(u) == Some(v) || self.parent(v) == Some(u)
    }

    /// The depth-1 ancestor of `v`. Two non-root vertices share a branch iff
    /// they are connected by a path avoiding the root.
    pub fn root_branch(&self, v: VertexId) -> Result<VertexId, TreeError> {
        self.check(v)?;
        self.branch[v.index()].ok_or(TreeError::NoBranch)
    }

    /// Like [`root_branch`](Self::root_branch) but `None` for the root.
    #[inline]
    pub fn branch_of(&self, v: VertexId) -> Option<VertexId> {
        self.branch[v.index()]
    }

    pub fn vertices_at_depth(&self, d: u32) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.depth(v) == d).collect()
    }

    pub fn stats(&self) -> TreeStats {
        let max_degree = self
            .vertices()
            .map(|v| self.children(v).len() as u32 + u32::from(!v.is_root()))
            .max()
            .unwrap_or(0);
        TreeStats {
            n: self.len() as u32,
            height: self.height,
            max_degree,
            root_ecc: self.height,
        }
    }

    pub fn lca(&self, mut u: VertexId, mut v: VertexId) -> VertexId {
        while self.depth(u) > self.depth(v) {
            u = self.parent(u).expect("deeper vertex has a parent");
        }
        while self.depth(v) > self.depth(u) {
            v = self.parent(v).expect("deeper vertex has a parent");
        }
        while u != v {
            u = self.parent(u).expect("non-root");
            v = self.parent(v).expect("non-root");
        }
        u
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> u32 {
        let w = self.lca(u, v);
        self.depth(u) + self.depth(v) - 2 * self.depth(w)
    }

    /// Next vertex on the tree path from `from` to `to`; `from` if equal.
    pub fn step_toward(&self, from: VertexId, to: VertexId) -> VertexId {
        if from == to {
            return from;
        }
        if self.depth(to) > self.depth(from) {
            let mut x = to;
            while self.depth(x) > self.depth(from) + 1 {
                x = self.parent(x).expect("non-root");
            }
            if self.parent(x) == Some(from) {
                return x;
            }
        }
        self.parent(from)
            .expect("from is not an ancestor of to, so it is not the root")
    }

    /// Vertices on the path from the root to `v`, inclusive.
    pub fn root_path(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = Vec::with_capacity(self.depth(v) as usize + 1);
        let mut x = Some(v);
        while let Some(y) = x {
            path.push(y);
            x = self.parent(y);
        }
        path.reverse();
        path
    }

    pub fn parents(&self) -> Vec<Option<u32>> {
        self.parent.iter().map(|p| p.map(|p| p.0)).collect()
    }

    /// JSON file form: `{"n":…,"parent":[null,…]}` plus a trailing LF.
    pub fn encode(&self) -> Vec<u8> {
        let doc = TreeDoc {
            n: self.len() as u32,
            parent: self.parents(),
        };
        let mut out = serde_json::to_vec(&doc).expect("tree document serializes");
        out.push(b'\n');
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, TreeError> {
        let doc: TreeDoc = serde_json::from_slice(bytes).map_err(|e| TreeError::Parse {
            position: e.column(),
            message: format!("line {}: {e}", e.line()),
        })?;
        if doc.n as usize != doc.parent.len() {
            return Err(TreeError::parse(
                doc.parent.len(),
                format!("n = {} but parent array has {} entries", doc.n, doc.parent.len()),
            ));
        }
        RootedTree::from_parents(&doc.parent)
    }

    /// Graphviz export with edges `parent -> child` in id order.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph tree {\n  0 [label=\"root\"];\n");
        for v in self.vertices().skip(1) {
            let p = self.parent(v).expect("non-root");
            let _ = writeln!(s, "  {p} -> {v};");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    n: u32,
    parent: Vec<Option<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_star_shapes() {
        let t = RootedTree::path_star(1, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.height(), 1);

        let t = RootedTree::path_star(2048, 1).unwrap();
        assert_eq!(t.len(), 2049);
        assert_eq!(t.children(VertexId::ROOT).len(), 2048);

        let t = RootedTree::path_star(10, 5).unwrap();
        assert_eq!(t.len(), 51);
        assert_eq!(t.height(), 5);
        assert!(t.vertices().filter(|&v| t.is_leaf(v)).all(|v| t.depth(v) == 5));
        // breadth-first per branch: branch 0 is ids 1..=5
        assert_eq!(t.root_path(VertexId(5)), (0..=5).map(VertexId).collect::<Vec<_>>());
    }

    #[test]
    fn path_star_rejects_zero() {
        assert!(matches!(
            RootedTree::path_star(0, 3),
            Err(TreeError::InvalidParameter(_))
        ));
        assert!(matches!(
            RootedTree::path_star(3, 0),
            Err(TreeError::InvalidParameter(_))
        ));
    }

    #[test]
    fn attach_gadgets() {
        let mut t = RootedTree::path_star(3, 1).unwrap();
        let new = t.attach_path_with_star(VertexId(1), 0, 2).unwrap();
        assert_eq!(new.len(), 2);
        assert!(new.iter().all(|&v| t.depth(v) == 2));

        let mut t = RootedTree::path(5);
        let new = t.attach_path_with_star(VertexId(5), 4, 10).unwrap();
        assert_eq!(new.len(), 14);
        assert_eq!(new.iter().map(|&v| t.depth(v)).max(), Some(10));

        let before = t.clone();
        assert!(t.attach_path_with_star(VertexId(3), 0, 0).unwrap().is_empty());
        assert_eq!(t, before);

        assert_eq!(
            t.attach_path_with_star(VertexId(999), 1, 1),
            Err(TreeError::NotFound(VertexId(999)))
        );
    }

    #[test]
    fn branches() {
        let t = RootedTree::path_star(3, 2).unwrap();
        assert_eq!(t.root_branch(VertexId(1)), Ok(VertexId(1)));
        assert_eq!(t.root_branch(VertexId(2)), Ok(VertexId(1)));
        assert_eq!(t.root_branch(VertexId(4)), Ok(VertexId(3)));
        assert_eq!(t.root_branch(VertexId::ROOT), Err(TreeError::NoBranch));
    }

    #[test]
    fn depth_queries_and_stats() {
        let t = RootedTree::path_star(3, 2).unwrap();
        assert_eq!(t.vertices_at_depth(2), vec![VertexId(2), VertexId(4), VertexId(6)]);
        assert_eq!(RootedTree::path_star(10, 5).unwrap().height(), 5);
        let s = RootedTree::path(1).stats();
        assert_eq!((s.n, s.height, s.max_degree), (2, 1, 1));
        assert_eq!(RootedTree::star(4).stats().max_degree, 4);
        assert_eq!(RootedTree::path(4).stats().max_degree, 2);
    }

    #[test]
    fn paths_and_steps() {
        let t = RootedTree::full_binary(2);
        assert_eq!(t.distance(VertexId(3), VertexId(6)), 4);
        assert_eq!(t.distance(VertexId(3), VertexId(1)), 1);
        assert_eq!(t.step_toward(VertexId(0), VertexId(5)), VertexId(2));
        assert_eq!(t.step_toward(VertexId(3), VertexId(4)), VertexId(1));
        assert_eq!(t.step_toward(VertexId(1), VertexId(4)), VertexId(4));
        assert_eq!(t.step_toward(VertexId(4), VertexId(4)), VertexId(4));
    }

    #[test]
    fn encode_single_edge() {
        let bytes = RootedTree::path(1).encode();
        assert_eq!(std::str::from_utf8(&bytes).unwrap(), "{\"n\":2,\"parent\":[null,0]}\n");
    }

    #[test]
    fn decode_errors() {
        let err = RootedTree::decode(br#"{"n":3,"parent":[null,2,1]}"#).unwrap_err();
        assert!(matches!(err, TreeError::Parse { position: 1, .. }), "{err}");
        assert!(matches!(
            RootedTree::decode(br#"{"n":2,"parent":[0,0]}"#),
            Err(TreeError::Parse { position: 0, .. })
        ));
        assert!(matches!(
            RootedTree::decode(br#"{"n":3,"parent":[null,0]}"#),
            Err(TreeError::Parse { .. })
        ));
        assert!(matches!(RootedTree::decode(b"{\"n\":2,"), Err(TreeError::Parse { .. })));
    }

    #[test]
    fn large_round_trip() {
        let t = RootedTree::path_star(2048, 1).unwrap();
        assert_eq!(RootedTree::decode(&t.encode()).unwrap().parents(), t.parents());
    }

    #[test]
    fn dot_export() {
        let dot = RootedTree::star(2).to_dot();
        assert_eq!(dot, "digraph tree {\n  0 [label=\"root\"];\n  0 -> 1;\n  0 -> 2;\n}\n");
    }
}
