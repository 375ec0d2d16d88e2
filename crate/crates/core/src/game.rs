//! The round-based exploration game between an explorer controlling `k`
//! agents and a revealer that grows the tree at unvisited vertices.
//!
//! Round `t ≥ 1` proceeds as: the explorer proposes `φ_t` from a view of the
//! state at the end of round `t-1`; the revealer inspects that state and
//! `φ_t` and chooses attachments (only at vertices outside `A_{t-1}`); the
//! visited set becomes `A_t = A_{t-1} ∪ φ_t`, then the attachments are
//! applied. The game is over at the beginning of a round whose state has
//! every vertex visited.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, MoveViolation, StrategyError};
use crate::revealer::{CheckpointRecord, GadgetMode};
use crate::tree::{RootedTree, TreeStats, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewMode {
    /// The explorer sees the whole revealed tree.
    #[default]
    Game,
    /// Only visited vertices and their children are exposed.
    Local,
}

impl std::str::FromStr for ViewMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "game" => Ok(ViewMode::Game),
            "local" => Ok(ViewMode::Local),
            other => Err(format!("unknown view mode {other:?} (expected game|local)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentAssignment {
    pub round: u32,
    pub positions: Vec<VertexId>,
}

/// A subtree hung below an unvisited vertex: a path of `path_len` edges
/// ending in a star of `leaf_count` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub at: VertexId,
    pub path_len: u32,
    #[serde(rename = "leaves")]
    pub leaf_count: u32,
}

impl Attachment {
    pub fn size(&self) -> u64 {
        u64::from(self.path_len) + u64::from(self.leaf_count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    tree: RootedTree,
    visited: Vec<bool>,
    visited_count: usize,
    agents: AgentAssignment,
    first_visit: Vec<Option<u32>>,
}

impl GameState {
    /// Round 0: all `k` agents at the root, only the root visited.
    pub fn new(tree: RootedTree, k: usize) -> Self {
        let n = tree.len();
        let mut visited = vec![false; n];
        visited[0] = true;
        let mut first_visit = vec![None; n];
        first_visit[0] = Some(0);
        GameState {
            tree,
            visited,
            visited_count: 1,
            agents: AgentAssignment {
                round: 0,
                positions: vec![VertexId::ROOT; k],
            },
            first_visit,
        }
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn round(&self) -> u32 {
        self.agents.round
    }

    pub fn k(&self) -> usize {
        self.agents.positions.len()
    }

    pub fn agents(&self) -> &AgentAssignment {
        &self.agents
    }

    pub fn positions(&self) -> &[VertexId] {
        &self.agents.positions
    }

    #[inline]
    pub fn is_visited(&self, v: VertexId) -> bool {
        self.visited[v.index()]
    }

    pub fn visited_count(&self) -> usize {
        self.visited_count
    }

    pub fn first_visit(&self, v: VertexId) -> Option<u32> {
        self.first_visit[v.index()]
    }

    pub fn is_explored(&self) -> bool {
        self.visited_count == self.tree.len()
    }

    /// Checks that every agent stays or moves along one edge of the
    /// current tree.
    pub fn validate_moves(&self, proposed: &[VertexId]) -> Result<(), GameError> {
        if proposed.len() != self.k() {
            return Err(GameError::WrongAgentCount {
                expected: self.k(),
                got: proposed.len(),
            });
        }
        for (agent, (&from, &to)) in self.agents.positions.iter().zip(proposed).enumerate() {
            let legal = from == to || (self.tree.contains(to) && self.tree.are_adjacent(from, to));
            if !legal {
                return Err(MoveViolation { agent, from, to }.into());
            }
        }
        Ok(())
    }

    /// Plays one round. The state is left untouched on error. Returns the
    /// vertices visited for the first time, in ascending id order.
    pub fn apply_round(&mut self, moves: &[VertexId], attachments: &[Attachment]) -> Result<Vec<VertexId>, GameError> {
        self.validate_moves(moves)?;
        for a in attachments {
            if !self.tree.contains(a.at) {
                return Err(crate::error::TreeError::NotFound(a.at).into());
            }
            if self.visited[a.at.index()] {
                return Err(GameError::AttachAtVisited(a.at));
            }
        }

        let t = self.agents.round + 1;
        let mut newly = Vec::new();
        for &v in moves {
            if !self.visited[v.index()] {
                self.visited[v.index()] = true;
                self.first_visit[v.index()] = Some(t);
                newly.push(v);
            }
        }
        newly.sort_unstable();
        self.visited_count += newly.len();
        self.agents.positions.copy_from_slice(moves);
        self.agents.round = t;

        for a in attachments {
            self.tree.attach_path_with_star(a.at, a.path_len, a.leaf_count)?;
        }
        self.visited.resize(self.tree.len(), false);
        self.first_visit.resize(self.tree.len(), None);
        Ok(newly)
    }
}

/// What an explorer may look at when choosing moves.
pub struct ExplorerView<'a> {
    state: &'a GameState,
    mode: ViewMode,
}

impl<'a> ExplorerView<'a> {
    pub fn new(state: &'a GameState, mode: ViewMode) -> Self {
        ExplorerView { state, mode }
    }

    pub fn mode(&self) -> ViewMode {
        self.mode
    }

    pub fn k(&self) -> usize {
        self.state.k()
    }

    /// Number of completed rounds; the moves requested are for round `round() + 1`.
    pub fn round(&self) -> u32 {
        self.state.round()
    }

    pub fn positions(&self) -> &'a [VertexId] {
        self.state.positions()
    }

    pub fn is_visited(&self, v: VertexId) -> bool {
        self.state.is_visited(v)
    }

    pub fn is_exposed(&self, v: VertexId) -> bool {
        let tree = self.state.tree();
        if !tree.contains(v) {
            return false;
        }
        match self.mode {
            ViewMode::Game => true,
            ViewMode::Local => self.state.is_visited(v) || tree.parent(v).is_some_and(|p| self.state.is_visited(p)),
        }
    }

    pub fn children(&self, v: VertexId) -> &'a [VertexId] {
        match self.mode {
            ViewMode::Local if !self.state.is_visited(v) => &[],
            _ => self.state.tree().children(v),
        }
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.state.tree().parent(v)
    }

    pub fn depth(&self, v: VertexId) -> u32 {
        self.state.tree().depth(v)
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children(v).is_empty()
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> u32 {
        self.state.tree().distance(u, v)
    }

    pub fn step_toward(&self, from: VertexId, to: VertexId) -> VertexId {
        self.state.tree().step_toward(from, to)
    }

    pub fn exposed_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.state.tree().vertices().filter(move |&v| self.is_exposed(v))
    }

    /// Whether some exposed vertex in the subtree of `v` is unvisited.
    pub fn has_unvisited_below(&self, v: VertexId) -> bool {
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if !self.is_visited(x) {
                return true;
            }
            stack.extend_from_slice(self.children(x));
        }
        false
    }

    /// Exposed unvisited vertices ordered by `(depth, id)`.
    pub fn unvisited_frontier(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.exposed_vertices().filter(|&v| !self.is_visited(v)).collect();
        out.sort_by_key(|&v| (self.depth(v), v));
        out
    }

    /// Exposed unvisited leaves of the exposed tree, ascending id.
    pub fn unvisited_leaves(&self) -> Vec<VertexId> {
        self.exposed_vertices()
            .filter(|&v| !self.is_visited(v) && self.is_leaf(v))
            .collect()
    }
}

pub trait Explorer {
    fn name(&self) -> &'static str;
    fn next_moves(&mut self, view: &ExplorerView<'_>) -> Result<Vec<VertexId>, StrategyError>;
}

/// The revealer's answer for one round.
#[derive(Debug, Clone, Default)]
pub struct Reveal {
    pub attachments: Vec<Attachment>,
    pub checkpoint: Option<CheckpointRecord>,
}

pub trait Revealer {
    fn name(&self) -> &'static str;
    fn initial_tree(&mut self) -> RootedTree;
    /// `state` is the end of round `t-1` (it holds `T_{t-1}` and `A_{t-1}`);
    /// `moves` is the explorer's `φ_t`.
    fn reveal(&mut self, state: &GameState, moves: &[VertexId], t: u32) -> Reveal;
    /// Adds revealer-specific metadata to the transcript.
    fn describe(&self, _params: &mut TranscriptParams) {}
    /// Whether `T_0` must be stored in the transcript for replay.
    fn records_initial_tree(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptParams {
    pub explorer: String,
    pub revealer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<GadgetMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub k: u32,
    pub view: ViewMode,
    pub cap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u32,
    pub moves: Vec<VertexId>,
    pub attachments: Vec<Attachment>,
    pub newly_visited: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub finished: bool,
    pub final_round: u32,
    pub n: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: TranscriptParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_tree: Option<Vec<Option<u32>>>,
    pub rounds: Vec<RoundRecord>,
    #[serde(default)]
    pub checkpoints: Vec<CheckpointRecord>,
    pub outcome: Outcome,
}

impl Transcript {
    /// Compact JSON with a trailing LF.
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("transcript serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn final_stats(&self) -> (u32, u32) {
        (self.outcome.n, self.outcome.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayConfig {
    pub k: u32,
    pub cap: u32,
    pub view: ViewMode,
}

/// Default round cap `4(n + D²)`.
pub fn default_cap(n: u64, height: u64) -> u32 {
    (4 * (n + height * height)).min(u64::from(u32::MAX)) as u32
}

/// Receives every completed round, after attachments were applied.
pub trait RoundObserver {
    /// Called by [`replay`] before a recorded round is applied, with the
    /// state at the end of the previous round. An error aborts the replay.
    fn before_round(
        &mut self,
        _prev: &GameState,
        _round: &RoundRecord,
        _checkpoint: Option<&CheckpointRecord>,
    ) -> Result<(), String> {
        Ok(())
    }

    fn on_round(&mut self, state: &GameState, newly_visited: &[VertexId], checkpoint: Option<&CheckpointRecord>);
}

impl RoundObserver for () {
    fn on_round(&mut self, _: &GameState, _: &[VertexId], _: Option<&CheckpointRecord>) {}
}

#[derive(Debug, Clone)]
pub struct GameRun {
    pub transcript: Transcript,
    pub state: GameState,
}

impl GameRun {
    pub fn stats(&self) -> TreeStats {
        self.state.tree().stats()
    }
}

pub fn play(
    explorer: &mut dyn Explorer,
    revealer: &mut dyn Revealer,
    config: PlayConfig,
) -> Result<GameRun, GameError> {
    play_observed(explorer, revealer, config, &mut ())
}

pub fn play_observed(
    explorer: &mut dyn Explorer,
    revealer: &mut dyn Revealer,
    config: PlayConfig,
    observer: &mut dyn RoundObserver,
) -> Result<GameRun, GameError> {
    let tree = revealer.initial_tree();
    let initial_tree = revealer.records_initial_tree().then(|| tree.parents());
    let mut params = TranscriptParams {
        explorer: explorer.name().to_owned(),
        revealer: revealer.name().to_owned(),
        mode: None,
        n: None,
        segment: None,
        m: None,
        k: config.k,
        view: config.view,
        cap: config.cap,
    };
    revealer.describe(&mut params);

    let mut state = GameState::new(tree, config.k as usize);
    let mut rounds = Vec::new();
    let mut checkpoints = Vec::new();
    let finished = loop {
        if state.is_explored() {
            break true;
        }
        if state.round() >= config.cap {
            break false;
        }
        let t = state.round() + 1;
        let moves = explorer
            .next_moves(&ExplorerView::new(&state, config.view))
            .map_err(|e| GameError::from(e).in_round(t))?;
        state.validate_moves(&moves).map_err(|e| e.in_round(t))?;
        let reveal = revealer.reveal(&state, &moves, t);
        let newly = state
            .apply_round(&moves, &reveal.attachments)
            .map_err(|e| e.in_round(t))?;
        observer.on_round(&state, &newly, reveal.checkpoint.as_ref());
        rounds.push(RoundRecord {
            t,
            moves,
            attachments: reveal.attachments,
            newly_visited: newly.len() as u32,
        });
        checkpoints.extend(reveal.checkpoint);
    };

    let stats = state.tree().stats();
    let transcript = Transcript {
        params,
        initial_tree,
        rounds,
        checkpoints,
        outcome: Outcome {
            finished,
            final_round: state.round(),
            n: stats.n,
            height: stats.height,
        },
    };
    Ok(GameRun { transcript, state })
}

/// Replays recorded moves and attachments from `initial`, checking that the
/// recorded per-round counts and the outcome match what the replay produces.
pub fn replay(
    transcript: &Transcript,
    initial: RootedTree,
    observer: &mut dyn RoundObserver,
) -> Result<GameState, ReplayError> {
    let mut state = GameState::new(initial, transcript.params.k as usize);
    let mut checkpoints = transcript.checkpoints.iter().peekable();
    for (idx, round) in transcript.rounds.iter().enumerate() {
        if state.is_explored() {
            return Err(ReplayError::Mismatch(format!(
                "round {} recorded after the tree was fully explored",
                round.t
            )));
        }
        let t = idx as u32 + 1;
        if round.t != t {
            return Err(ReplayError::Mismatch(format!(
                "round index {idx} carries t = {}",
                round.t
            )));
        }
        state
            .validate_moves(&round.moves)
            .map_err(|e| ReplayError::Game(e.in_round(t)))?;
        let checkpoint = checkpoints.next_if(|c| c.t == t);
        observer
            .before_round(&state, round, checkpoint)
            .map_err(|e| ReplayError::Mismatch(format!("round {t}: {e}")))?;
        let newly = state
            .apply_round(&round.moves, &round.attachments)
            .map_err(|e| ReplayError::Game(e.in_round(t)))?;
        if newly.len() as u32 != round.newly_visited {
            return Err(ReplayError::Mismatch(format!(
                "round {t}: recorded {} newly visited vertices, replay gives {}",
                round.newly_visited,
                newly.len()
            )));
        }
        observer.on_round(&state, &newly, checkpoint);
    }
    if let Some(c) = checkpoints.next() {
        return Err(ReplayError::Mismatch(format!(
            "checkpoint at t = {} matches no round",
            c.t
        )));
    }
    let o = &transcript.outcome;
    let stats = state.tree().stats();
    if o.finished != state.is_explored() || o.final_round != state.round() || o.n != stats.n || o.height != stats.height
    {
        return Err(ReplayError::Mismatch(format!(
            "outcome {o:?} differs from replay (finished {}, round {}, n {}, height {})",
            state.is_explored(),
            state.round(),
            stats.n,
            stats.height
        )));
    }
    if !o.finished && o.final_round < transcript.params.cap {
        return Err(ReplayError::Mismatch(
            "unfinished game stopped before its round cap".into(),
        ));
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error(transparent)]
    Game(GameError),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn validate_moves_cases() {
        let s = GameState::new(RootedTree::full_binary(2), 2);
        assert!(s.validate_moves(&[v(0), v(0)]).is_ok());
        assert!(s.validate_moves(&[v(1), v(0)]).is_ok());
        let err = s.validate_moves(&[v(0), v(3)]).unwrap_err();
        assert_eq!(
            err,
            GameError::IllegalMove(MoveViolation {
                agent: 1,
                from: v(0),
                to: v(3)
            })
        );
        assert!(matches!(
            s.validate_moves(&[v(0)]),
            Err(GameError::WrongAgentCount { .. })
        ));
        assert!(s.validate_moves(&[v(0), v(99)]).is_err());
    }

    #[test]
    fn apply_round_stay_and_move() {
        let mut s = GameState::new(RootedTree::path(1), 1);
        let before = s.clone();
        s.apply_round(&[v(0)], &[]).unwrap();
        assert_eq!(s.round(), 1);
        assert_eq!(s.visited_count(), before.visited_count());
        assert!(!s.is_explored());

        let newly = s.apply_round(&[v(1)], &[]).unwrap();
        assert_eq!(newly, vec![v(1)]);
        assert!(s.is_explored());
        assert_eq!(s.first_visit(v(1)), Some(2));
    }

    #[test]
    fn attach_at_visited_rejected_atomically() {
        let mut s = GameState::new(RootedTree::star(2), 1);
        s.apply_round(&[v(1)], &[]).unwrap();
        let before = s.clone();
        let bad = Attachment {
            at: v(1),
            path_len: 0,
            leaf_count: 1,
        };
        assert_eq!(s.apply_round(&[v(0)], &[bad]), Err(GameError::AttachAtVisited(v(1))));
        assert_eq!(s, before);
    }

    #[test]
    fn attach_at_vertex_visited_this_round_is_allowed() {
        let mut s = GameState::new(RootedTree::star(2), 1);
        let a = Attachment {
            at: v(1),
            path_len: 0,
            leaf_count: 2,
        };
        s.apply_round(&[v(1)], &[a]).unwrap();
        assert_eq!(s.tree().len(), 5);
        assert!(s.is_visited(v(1)));
        assert!(!s.is_visited(v(3)));
    }

    #[test]
    fn explored_flags() {
        let mut s = GameState::new(RootedTree::path(1), 1);
        assert!(!s.is_explored());
        s.apply_round(&[v(1)], &[]).unwrap();
        assert!(s.is_explored());

        let mut s = GameState::new(RootedTree::star(2), 1);
        let a = Attachment {
            at: v(2),
            path_len: 1,
            leaf_count: 0,
        };
        s.apply_round(&[v(1)], &[a]).unwrap();
        assert!(!s.is_explored());
    }

    #[test]
    fn local_view_restricts_game_view() {
        let mut s = GameState::new(RootedTree::full_binary(2), 1);
        s.apply_round(&[v(1)], &[]).unwrap();
        let local = ExplorerView::new(&s, ViewMode::Local);
        let game = ExplorerView::new(&s, ViewMode::Game);
        let exposed: Vec<_> = local.exposed_vertices().collect();
        assert_eq!(exposed, vec![v(0), v(1), v(2), v(3), v(4)]);
        assert!(local.children(v(2)).is_empty());
        assert_eq!(game.children(v(2)), &[v(5), v(6)]);
        assert!(exposed.iter().all(|&x| game.is_exposed(x)));
        assert_eq!(local.unvisited_frontier(), vec![v(2), v(3), v(4)]);
        assert_eq!(game.unvisited_leaves(), vec![v(3), v(4), v(5), v(6)]);
    }
}
