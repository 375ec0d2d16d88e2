//! Deterministic explorer strategies.

use std::fmt;
use std::str::FromStr;

use crate::error::StrategyError;
use crate::game::{Explorer, ExplorerView};
use crate::tree::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExplorerKind {
    Idle,
    SingleDfs,
    PhaseBfs,
    GreedyFrontier,
    /// Idle for a fixed number of rounds, then greedy frontier.
    IdleThenSweep,
}

impl ExplorerKind {
    pub const ALL: [ExplorerKind; 5] = [
        ExplorerKind::Idle,
        ExplorerKind::SingleDfs,
        ExplorerKind::PhaseBfs,
        ExplorerKind::GreedyFrontier,
        ExplorerKind::IdleThenSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExplorerKind::Idle => "idle",
            ExplorerKind::SingleDfs => "single_dfs",
            ExplorerKind::PhaseBfs => "phase_bfs",
            ExplorerKind::GreedyFrontier => "greedy_frontier",
            ExplorerKind::IdleThenSweep => "idle_then_sweep",
        }
    }

    /// `idle_rounds` only matters for [`ExplorerKind::IdleThenSweep`].
    pub fn build(self, idle_rounds: u32) -> Box<dyn Explorer + Send> {
        match self {
            ExplorerKind::Idle => Box::new(Idle),
            ExplorerKind::SingleDfs => Box::new(SingleDfs),
            ExplorerKind::PhaseBfs => Box::new(PhaseBfs::default()),
            ExplorerKind::GreedyFrontier => Box::new(GreedyFrontier),
            ExplorerKind::IdleThenSweep => Box::new(IdleThenSweep::new(idle_rounds)),
        }
    }
}

impl fmt::Display for ExplorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExplorerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExplorerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown explorer {s:?}"))
    }
}

/// Every agent stays where it is.
#[derive(Debug, Clone, Copy, Default)]
pub struct Idle;

impl Explorer for Idle {
    fn name(&self) -> &'static str {
        "idle"
    }

    fn next_moves(&mut self, view: &ExplorerView<'_>) -> Result<Vec<VertexId>, StrategyError> {
        Ok(view.positions().to_vec())
    }
}

/// Agent 0 walks a depth-first traversal of whatever is revealed; the rest
/// stay at the root.
///
/// Descends into the smallest-id child whose subtree still holds an
/// unvisited vertex, otherwise climbs. Newly revealed structure is picked up
/// on the way back because the check is redone every round.
#[derive(Debug, Clone, Copy, Default)]
pub struct SingleDfs;

impl Explorer for SingleDfs {
    fn name(&self) -> &'static str {
        "single_dfs"
    }

    fn next_moves(&mut self, view: &ExplorerView<'_>) -> Result<Vec<VertexId>, StrategyError> {
        let mut moves = view.positions().to_vec();
        let Some(&at) = moves.first() else {
            return Ok(moves);
        };
        let down = view.children(at).iter().copied().find(|&c| view.has_unvisited_below(c));
        moves[0] = match down {
            Some(c) => c,
            None if view.has_unvisited_below(VertexId::ROOT) => view.parent(at).unwrap_or(at),
            None => at,
        };
        Ok(moves)
    }
}

/// Breadth-first phases: at the start of each phase every unvisited leaf of
/// the revealed tree gets its own never-used agent, which walks down from the
/// root along the tree path. A phase ends once all of its agents arrived.
#[derive(Debug, Clone, Default)]
pub struct PhaseBfs {
    next_fresh: usize,
    phase: u32,
    dispatch: Vec<(usize, VertexId)>,
}

impl PhaseBfs {
    pub fn phase(&self) -> u32 {
        self.phase
    }
}

impl Explorer for PhaseBfs {
    fn name(&self) -> &'static str {
        "phase_bfs"
    }

    fn next_moves(&mut self, view: &ExplorerView<'_>) -> Result<Vec<VertexId>, StrategyError> {
        let positions = view.positions();
        let mut moves = positions.to_vec();
        if self.dispatch.iter().all(|&(agent, target)| positions[agent] == target) {
            let targets = view.unvisited_leaves();
            self.dispatch.clear();
            if !targets.is_empty() {
                self.phase += 1;
                let available = view.k() - self.next_fresh;
                if targets.len() > available {
                    return Err(StrategyError::Infeasible {
                        strategy: "phase_bfs",
                        phase: self.phase,
                        needed: targets.len(),
                        available,
                    });
                }
                self.dispatch = targets
                    .into_iter()
                    .enumerate()
                    .map(|(j, t)| (self.next_fresh + j, t))
                    .collect();
                self.next_fresh += self.dispatch.len();
            }
        }
        for &(agent, target) in &self.dispatch {
            moves[agent] = view.step_toward(positions[agent], target);
        }
        Ok(moves)
    }
}

/// Unvisited revealed vertices in `(depth, id)` order are each matched to the
/// nearest still-unmatched agent (ties by agent index); matched agents take
/// one step toward their target.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyFrontier;

impl Explorer for GreedyFrontier {
    fn name(&self) -> &'static str {
        "greedy_frontier"
    }

    fn next_moves(&mut self, view: &ExplorerView<'_>) -> Result<Vec<VertexId>, StrategyError> {
        Ok(greedy_moves(view))
    }
}

fn greedy_moves(view: &ExplorerView<'_>) -> Vec<VertexId> {
    let positions = view.positions();
    let mut moves = positions.to_vec();

    // Agents grouped by position; within a group only the lowest unmatched
    // index can win a tie, so each group contributes one candidate.
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by_key(|&a| (positions[a], a));
    let mut groups: Vec<(VertexId, std::collections::VecDeque<usize>)> = Vec::new();
    for a in order {
        match groups.last_mut() {
            Some((p, q)) if *p == positions[a] => q.push_back(a),
            _ => groups.push((positions[a], std::collections::VecDeque::from([a]))),
        }
    }

    for target in view.unvisited_frontier() {
        if groups.is_empty() {
            break;
        }
        let (best, _) = groups
            .iter()
            .enumerate()
            .map(|(g, (p, q))| (g, (view.distance(*p, target), q[0])))
            .min_by_key(|&(_, key)| key)
            .expect("groups is non-empty");
        let (pos, queue) = &mut groups[best];
        let agent = queue.pop_front().expect("groups are never empty");
        moves[agent] = view.step_toward(*pos, target);
        if queue.is_empty() {
            groups.swap_remove(best);
        }
    }
    moves
}

/// Stays put for the first `idle_rounds` rounds, then plays greedy frontier.
#[derive(Debug, Clone, Copy)]
pub struct IdleThenSweep {
    idle_rounds: u32,
}

impl IdleThenSweep {
    pub fn new(idle_rounds: u32) -> Self {
        IdleThenSweep { idle_rounds }
    }
}

impl Explorer for IdleThenSweep {
    fn name(&self) -> &'static str {
        "idle_then_sweep"
    }

    fn next_moves(&mut self, view: &ExplorerView<'_>) -> Result<Vec<VertexId>, StrategyError> {
        if view.round() < self.idle_rounds {
            Ok(view.positions().to_vec())
        } else {
            Ok(greedy_moves(view))
        }
    }
}
