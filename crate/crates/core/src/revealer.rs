//! The adversarial revealer behind the `L·C(m,2)` round lower bound, and a
//! trivial revealer that serves a fixed tree.
//!
//! The lemma revealer starts from `⌈n/(2L)⌉` paths of length `L` hanging off
//! the root. At checkpoint rounds `t_i = L·C(i+1, 2)` it picks one unvisited
//! vertex at depth `L·i` per root branch (the set `K_i`), keeps the
//! `⌈α|K_i|⌉` of them whose branch holds the fewest agents (`S_i`), and hangs
//! a path of `L-1` edges ending in a star below each.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ParamsError, TreeError};
use crate::exact;
use crate::game::{Attachment, GameState, Reveal, Revealer, TranscriptParams};
use crate::tree::{RootedTree, VertexId};

/// How many leaves a gadget star gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetMode {
    /// `L·(i+1)·a` leaves, which is empty when no agent is in the branch.
    Strict,
    /// `L·(i+1)·max(a, 1)` leaves.
    #[default]
    Repaired,
}

impl std::str::FromStr for GadgetMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(GadgetMode::Strict),
            "repaired" => Ok(GadgetMode::Repaired),
            other => Err(format!("unknown gadget mode {other:?} (expected strict|repaired)")),
        }
    }
}

impl std::fmt::Display for GadgetMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GadgetMode::Strict => "strict",
            GadgetMode::Repaired => "repaired",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaParams {
    pub n: u64,
    #[serde(rename = "L")]
    pub segment: u32,
    pub m: u32,
    pub k: u32,
    /// `(2L/n)^{1/m}`, for display only; decisions use [`exact`].
    pub alpha: f64,
    /// `t_1, …, t_{m-1}`.
    pub checkpoints: Vec<u32>,
    pub t_star: u32,
    pub mode: GadgetMode,
    pub max_team_size: u64,
}

/// `t_i = L·C(i+1, 2)`.
pub fn checkpoint_round(segment: u32, i: u32) -> u64 {
    u64::from(segment) * exact::binomial(u64::from(i) + 1, 2)
}

pub fn check_feasible(n: u64, segment: u32, m: u32) -> Result<(), ParamsError> {
    if n == 0 || segment == 0 || m == 0 {
        return Err(ParamsError::Infeasible("n, L and m must be positive".into()));
    }
    match exact::sixteen_pow(m).and_then(|p| p.checked_mul(u64::from(segment))) {
        Some(bound) if n >= bound => Ok(()),
        Some(bound) => Err(ParamsError::Infeasible(format!(
            "n >= L*16^m violated: {n} < {segment}*16^{m} = {bound}"
        ))),
        None => Err(ParamsError::Infeasible(format!(
            "n >= L*16^m violated: {segment}*16^{m} overflows"
        ))),
    }
}

/// Largest team the lower bound is stated for.
pub fn max_team_size(n: u64, segment: u32, m: u32) -> Result<u64, ParamsError> {
    check_feasible(n, segment, m)?;
    Ok(exact::max_team_size(n, u64::from(segment), m))
}

pub fn derive_params(n: u64, segment: u32, m: u32, k: u32, mode: GadgetMode) -> Result<LemmaParams, ParamsError> {
    let max_team_size = max_team_size(n, segment, m)?;
    let mut checkpoints = Vec::with_capacity(m as usize - 1);
    for i in 1..m {
        let t = checkpoint_round(segment, i);
        let t = u32::try_from(t)
            .map_err(|_| ParamsError::Infeasible(format!("checkpoint t_{i} = {t} exceeds the round range")))?;
        checkpoints.push(t);
    }
    let t_star = checkpoints.last().copied().unwrap_or(0);
    Ok(LemmaParams {
        n,
        segment,
        m,
        k,
        alpha: (2.0 * f64::from(segment) / n as f64).powf(1.0 / f64::from(m)),
        checkpoints,
        t_star,
        mode,
        max_team_size,
    })
}

impl LemmaParams {
    pub fn k_within_bound(&self) -> bool {
        u64::from(self.k) <= self.max_team_size
    }

    /// `⌈α·count⌉`, exactly.
    pub fn selection_size(&self, count: usize) -> usize {
        exact::ceil_alpha_times(count as u64, self.n, u64::from(self.segment), self.m) as usize
    }

    /// Level `i` whose checkpoint is round `t`, if any.
    pub fn checkpoint_level(&self, t: u32) -> Option<u32> {
        self.checkpoints.iter().position(|&c| c == t).map(|p| p as u32 + 1)
    }

    /// `t_i` for any `i ≥ 0`, including `t_m` past the last checkpoint.
    pub fn t(&self, i: u32) -> u64 {
        checkpoint_round(self.segment, i)
    }

    pub fn branch_count(&self) -> u64 {
        self.n.div_ceil(2 * u64::from(self.segment))
    }
}

/// `⌈n/(2L)⌉` paths of length `L` from the root.
pub fn initial_tree(params: &LemmaParams) -> Result<RootedTree, ParamsError> {
    let branches = params.branch_count();
    let total = branches * u64::from(params.segment) + 1;
    let branches = u32::try_from(branches)
        .ok()
        .filter(|_| total <= u64::from(u32::MAX))
        .ok_or_else(|| {
            ParamsError::Infeasible(format!("initial tree with {total} vertices is too large to simulate"))
        })?;
    RootedTree::path_star(branches, params.segment).map_err(|e| ParamsError::Infeasible(e.to_string()))
}

/// Agents per root branch, indexed by the branch's depth-1 vertex id.
/// Agents at the root are not counted anywhere.
pub fn branch_agent_counts(tree: &RootedTree, positions: &[VertexId]) -> Vec<u32> {
    let mut counts = vec![0u32; tree.len()];
    for &p in positions {
        if let Some(b) = tree.branch_of(p) {
            counts[b.index()] += 1;
        }
    }
    counts
}

/// `a(v)`: number of agents in the same root branch as `v`.
pub fn branch_agent_count(tree: &RootedTree, positions: &[VertexId], v: VertexId) -> Result<u32, TreeError> {
    let b = tree.root_branch(v)?;
    Ok(positions.iter().filter(|&&p| tree.branch_of(p) == Some(b)).count() as u32)
}

/// `K_i` on the state at the end of round `t_i - 1`: for each root branch
/// with an unvisited vertex at depth `L·i`, its smallest such vertex.
pub fn compute_k(prev: &GameState, i: u32, segment: u32) -> Vec<VertexId> {
    let tree = prev.tree();
    let depth = segment * i;
    let mut seen = vec![false; tree.len()];
    let mut out = Vec::new();
    for v in tree.vertices() {
        if tree.depth(v) != depth || prev.is_visited(v) {
            continue;
        }
        let b = tree.branch_of(v).expect("depth >= 1");
        if !seen[b.index()] {
            seen[b.index()] = true;
            out.push(v);
        }
    }
    out
}

/// The `take` members of `candidates` with the smallest `(a, id)`, returned
/// in ascending id order.
pub fn select_s(candidates: &[VertexId], a_values: &BTreeMap<VertexId, u32>, take: usize) -> Vec<VertexId> {
    let mut ranked: Vec<(u32, VertexId)> = candidates.iter().map(|&v| (a_values[&v], v)).collect();
    ranked.sort_unstable();
    let mut s: Vec<VertexId> = ranked.into_iter().take(take).map(|(_, v)| v).collect();
    s.sort_unstable();
    s
}

/// `(path_len, leaf_count)` of the gadget hung at level `i` below a vertex
/// whose branch holds `a` agents.
pub fn gadget_spec(i: u32, a: u32, segment: u32, mode: GadgetMode) -> (u32, u32) {
    let a = match mode {
        GadgetMode::Strict => a,
        GadgetMode::Repaired => a.max(1),
    };
    (segment - 1, segment * (i + 1) * a)
}

/// Everything the revealer decided at one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub i: u32,
    pub t: u32,
    #[serde(rename = "K")]
    pub k_set: Vec<VertexId>,
    #[serde(rename = "a")]
    pub a_values: BTreeMap<VertexId, u32>,
    #[serde(rename = "S")]
    pub s_set: Vec<VertexId>,
    pub gadgets: Vec<Attachment>,
}

/// Computes the checkpoint decision for level `i` at round `t`.
pub fn checkpoint_decision(
    params: &LemmaParams,
    prev: &GameState,
    moves: &[VertexId],
    i: u32,
    t: u32,
) -> CheckpointRecord {
    let tree = prev.tree();
    let k_set = compute_k(prev, i, params.segment);
    let counts = branch_agent_counts(tree, moves);
    let a_values: BTreeMap<VertexId, u32> = k_set
        .iter()
        .map(|&v| (v, counts[tree.branch_of(v).expect("non-root").index()]))
        .collect();
    let s_set = select_s(&k_set, &a_values, params.selection_size(k_set.len()));
    let gadgets = s_set
        .iter()
        .map(|&v| {
            let (path_len, leaf_count) = gadget_spec(i, a_values[&v], params.segment, params.mode);
            Attachment {
                at: v,
                path_len,
                leaf_count,
            }
        })
        .collect();
    CheckpointRecord {
        i,
        t,
        k_set,
        a_values,
        s_set,
        gadgets,
    }
}

#[derive(Debug, Clone)]
pub struct LemmaRevealer {
    params: LemmaParams,
}

impl LemmaRevealer {
    pub fn new(params: LemmaParams) -> Result<Self, ParamsError> {
        // validated eagerly so initial_tree cannot fail later
        initial_tree(&params)?;
        Ok(LemmaRevealer { params })
    }

    pub fn params(&self) -> &LemmaParams {
        &self.params
    }
}

impl Revealer for LemmaRevealer {
    fn name(&self) -> &'static str {
        "lemma"
    }

    fn initial_tree(&mut self) -> RootedTree {
        initial_tree(&self.params).expect("validated in LemmaRevealer::new")
    }

    fn reveal(&mut self, state: &GameState, moves: &[VertexId], t: u32) -> Reveal {
        match self.params.checkpoint_level(t) {
            None => Reveal::default(),
            Some(i) => {
                let record = checkpoint_decision(&self.params, state, moves, i, t);
                Reveal {
                    attachments: record.gadgets.clone(),
                    checkpoint: Some(record),
                }
            }
        }
    }

    fn describe(&self, params: &mut TranscriptParams) {
        params.mode = Some(self.params.mode);
        params.n = Some(self.params.n);
        params.segment = Some(self.params.segment);
        params.m = Some(self.params.m);
    }
}

/// Serves a known tree and never attaches anything.
#[derive(Debug, Clone)]
pub struct FixedTreeRevealer {
    tree: RootedTree,
}

impl FixedTreeRevealer {
    pub fn new(tree: RootedTree) -> Self {
        FixedTreeRevealer { tree }
    }
}

impl Revealer for FixedTreeRevealer {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn initial_tree(&mut self) -> RootedTree {
        self.tree.clone()
    }

    fn reveal(&mut self, _: &GameState, _: &[VertexId], _: u32) -> Reveal {
        Reveal::default()
    }

    fn records_initial_tree(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn derive_small_and_medium() {
        let p = derive_params(4096, 1, 3, 541, GadgetMode::Repaired).unwrap();
        assert!((p.alpha - 0.078745).abs() < 1e-6);
        assert_eq!(p.checkpoints, vec![1, 3]);
        assert_eq!(p.t_star, 3);
        assert!(p.k_within_bound());

        let p = derive_params(65536, 1, 4, 5878, GadgetMode::Repaired).unwrap();
        assert!((p.alpha - 0.074325).abs() < 1e-6);
        assert_eq!(p.checkpoints, vec![1, 3, 6]);
        assert_eq!(p.t_star, 6);

        let p = derive_params(16384, 4, 3, 541, GadgetMode::Repaired).unwrap();
        assert_eq!(p.checkpoints, vec![4, 12]);
        assert_eq!(p.t(3), 24);
    }

    #[test]
    fn derive_rejects_small_n() {
        let err = derive_params(100, 1, 3, 1, GadgetMode::Repaired).unwrap_err();
        assert!(
            matches!(err, ParamsError::Infeasible(ref s) if s.contains("100 < 1*16^3")),
            "{err}"
        );
        assert!(max_team_size(100, 1, 3).is_err());
    }

    #[test]
    fn initial_trees() {
        let mk = |n, l| LemmaParams {
            n,
            segment: l,
            m: 3,
            k: 1,
            alpha: 0.0,
            checkpoints: vec![],
            t_star: 0,
            mode: GadgetMode::Repaired,
            max_team_size: 0,
        };
        let t = initial_tree(&mk(4096, 1)).unwrap();
        assert_eq!((t.children(VertexId::ROOT).len(), t.len(), t.height()), (2048, 2049, 1));
        let t = initial_tree(&mk(100, 5)).unwrap();
        assert_eq!((t.children(VertexId::ROOT).len(), t.len(), t.height()), (10, 51, 5));
        let t = initial_tree(&mk(3, 1)).unwrap();
        assert_eq!((t.children(VertexId::ROOT).len(), t.len()), (2, 3));
    }

    #[test]
    fn agent_counts() {
        let t = RootedTree::path_star(3, 2).unwrap();
        let at_root = [VertexId::ROOT; 4];
        for x in t.vertices().skip(1) {
            assert_eq!(branch_agent_count(&t, &at_root, x), Ok(0));
        }
        assert_eq!(branch_agent_count(&t, &[v(2)], v(2)), Ok(1));
        // cousin within the same depth-1 subtree
        assert_eq!(branch_agent_count(&t, &[v(1), v(2), v(3)], v(2)), Ok(2));
        assert_eq!(
            branch_agent_count(&t, &[v(1)], VertexId::ROOT),
            Err(TreeError::NoBranch)
        );
    }

    #[test]
    fn k_on_fresh_star_is_every_branch() {
        let p = derive_params(4096, 1, 3, 541, GadgetMode::Repaired).unwrap();
        let s = GameState::new(initial_tree(&p).unwrap(), 541);
        assert_eq!(compute_k(&s, 1, 1).len(), 2048);
    }

    #[test]
    fn k_skips_visited_and_picks_smallest() {
        let mut tree = RootedTree::path_star(2, 1).unwrap();
        tree.attach_path_with_star(v(1), 0, 3).unwrap(); // 3, 4, 5 under branch 1
        tree.attach_path_with_star(v(2), 0, 1).unwrap(); // 6 under branch 2
        let mut s = GameState::new(tree, 1);
        s.apply_round(&[v(2)], &[]).unwrap();
        s.apply_round(&[v(6)], &[]).unwrap();
        assert_eq!(compute_k(&s, 2, 1), vec![v(3)]);
    }

    #[test]
    fn select_by_load_then_id() {
        let k: Vec<_> = (1..=5).map(v).collect();
        let a: BTreeMap<_, _> = [(v(1), 2), (v(2), 0), (v(3), 1), (v(4), 0), (v(5), 0)]
            .into_iter()
            .collect();
        assert_eq!(select_s(&k, &a, 2), vec![v(2), v(4)]);
        assert_eq!(select_s(&k, &a, 4), vec![v(2), v(3), v(4), v(5)]);
        assert!(select_s(&[], &BTreeMap::new(), 0).is_empty());

        let p = derive_params(4096, 1, 3, 541, GadgetMode::Repaired).unwrap();
        let k: Vec<_> = (1..=2048).map(v).collect();
        let a: BTreeMap<_, _> = k.iter().map(|&x| (x, 0)).collect();
        let s = select_s(&k, &a, p.selection_size(k.len()));
        assert_eq!(s, (1..=162).map(v).collect::<Vec<_>>());
    }

    #[test]
    fn gadget_specs() {
        assert_eq!(gadget_spec(1, 3, 1, GadgetMode::Strict), (0, 6));
        assert_eq!(gadget_spec(1, 0, 1, GadgetMode::Strict), (0, 0));
        assert_eq!(gadget_spec(1, 0, 1, GadgetMode::Repaired), (0, 2));
        assert_eq!(gadget_spec(2, 2, 4, GadgetMode::Repaired), (3, 24));
    }

    #[test]
    fn no_attachments_off_checkpoint() {
        let p = derive_params(4096, 1, 3, 2, GadgetMode::Repaired).unwrap();
        let mut r = LemmaRevealer::new(p).unwrap();
        let s = GameState::new(r.initial_tree(), 2);
        let out = r.reveal(&s, &[VertexId::ROOT; 2], 2);
        assert!(out.attachments.is_empty() && out.checkpoint.is_none());
    }

    #[test]
    fn idle_first_checkpoint() {
        let p = derive_params(4096, 1, 3, 541, GadgetMode::Repaired).unwrap();
        let mut r = LemmaRevealer::new(p).unwrap();
        let s = GameState::new(r.initial_tree(), 541);
        let out = r.reveal(&s, &vec![VertexId::ROOT; 541], 1);
        assert_eq!(out.attachments.len(), 162);
        assert!(out.attachments.iter().all(|g| (g.path_len, g.leaf_count) == (0, 2)));
    }

    /// Hand trace on a 5-branch star (L = 1): one agent steps onto leaf 3,
    /// the others stay at the root. Leaf 3 is not in `A_0`, so it stays in
    /// `K_1` with `a = 1` and ranks last among the `a = 0` peers.
    #[test]
    fn toy_star_trace() {
        let params = LemmaParams {
            n: 10,
            segment: 1,
            m: 3,
            k: 2,
            alpha: 0.0,
            checkpoints: vec![1, 3],
            t_star: 3,
            mode: GadgetMode::Repaired,
            max_team_size: 0,
        };
        let tree = initial_tree(&params).unwrap();
        assert_eq!(tree.len(), 6);
        let s = GameState::new(tree, 2);
        let rec = checkpoint_decision(&params, &s, &[v(3), VertexId::ROOT], 1, 1);
        assert_eq!(rec.k_set, (1..=5).map(v).collect::<Vec<_>>());
        assert_eq!(rec.a_values[&v(3)], 1);
        // ⌈(2/10)^{1/3}·5⌉ = ⌈2.92⌉ = 3
        assert_eq!(params.selection_size(5), 3);
        assert_eq!(rec.s_set, vec![v(1), v(2), v(4)]);
        let all = select_s(&rec.k_set, &rec.a_values, 5);
        assert!(all.contains(&v(3)));
        let four = select_s(&rec.k_set, &rec.a_values, 4);
        assert!(!four.contains(&v(3)));
    }

    #[test]
    fn fixed_revealer_is_constant() {
        let mut r = FixedTreeRevealer::new(RootedTree::path(3));
        let t0 = r.initial_tree();
        let s = GameState::new(t0.clone(), 1);
        assert!(r.reveal(&s, &[v(1)], 1).attachments.is_empty());
        assert_eq!(r.initial_tree(), t0);
    }
}
