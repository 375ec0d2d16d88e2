//! Checks a lemma-revealer game against the construction's guarantees:
//! per-checkpoint height, `|K_{i+1}| = |S_i|`, the bounds on `|S_i|`, the
//! root-passage floor on gadget leaves, the vertex budget, and game length.
//!
//! The same [`LemmaVerifier`] observes a live game or a replayed transcript;
//! on replay it also recomputes every checkpoint decision from the replayed
//! state and rejects transcripts that disagree.

use serde::Serialize;

use crate::error::VerifyError;
use crate::exact;
use crate::game::{
    play_observed, replay, Explorer, GameRun, GameState, PlayConfig, ReplayError, RoundObserver, RoundRecord,
    Transcript,
};
use crate::revealer::{self, checkpoint_decision, CheckpointRecord, GadgetMode, LemmaParams, LemmaRevealer};
use crate::tree::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// Strict mode with an agent-free branch in `S_i`: nothing forces a
    /// deep unvisited vertex there.
    #[serde(rename = "vacuous (a=0)")]
    Vacuous,
    /// The game stopped before the later checkpoint this check needs.
    #[serde(rename = "not reached")]
    NotReached,
    /// Evaluated and reported, but not guaranteed in this configuration.
    #[serde(rename = "unasserted")]
    Unasserted,
}

impl Status {
    fn asserted(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn reported(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Unasserted
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightCheck {
    pub height: u32,
    pub bound: u32,
    /// Whether `height == bound` is required (repaired mode, all
    /// `S_1..S_i` non-empty).
    pub exact_required: bool,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KChainCheck {
    pub s_size: u64,
    pub next_k_size: Option<u64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionBoundsCheck {
    pub s_size: u64,
    /// `α^i n/(2L)` and `(2α)^i n/(2L)` as floats, for reading only.
    pub lower_approx: f64,
    pub upper_approx: f64,
    pub lower: Status,
    pub upper: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootPassageCheck {
    /// Gadget leaves at depth `L(i+1)` created at this checkpoint.
    pub deep_vertices: u64,
    pub visited: u64,
    /// First visited before `t_{i+1}` by no agent that sat in the branch at `t_i`.
    pub violations: u64,
    pub floor_round: u64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointReport {
    pub i: u32,
    pub t: u32,
    pub k_size: u64,
    pub s_size: u64,
    pub min_a_in_s: Option<u32>,
    pub claim1: HeightCheck,
    pub claim2: Option<KChainCheck>,
    pub claim3: SelectionBoundsCheck,
    pub root_passage: RootPassageCheck,
}

/// Vertex-count audit against the sum `⌈n/(2L)⌉·L + 1 + Σ (L-1 + leaves)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BudgetAudit {
    pub base_term: u64,
    pub path_term: u64,
    /// `Σ L(i+1)·a(v)` over all `S_i`: the leaf count of the unmodified rule.
    pub agent_leaf_term: u64,
    /// Extra leaves from `max(a, 1)`; zero in strict mode.
    pub repair_surcharge: u64,
    pub vertices: u64,
    /// `vertices == base + paths + leaves`.
    pub identity: Status,
    /// `base ≤ n/2 + L + 1`.
    pub base_within_half: Status,
    /// `L + 1 ≤ n/6`.
    pub small_term_within_sixth: Status,
    /// `Σ L(i+1)·a ≤ n/6`.
    pub agent_leaves_within_sixth: Status,
    /// `Σ |S_i|(L-1) ≤ n/6`.
    pub paths_within_sixth: Status,
    /// Repaired mode: surcharge `≤ 7n/18`.
    pub surcharge_within_bound: Status,
    pub k_within_bound: bool,
    /// `n` (strict) or `⌈1.4 n⌉` (repaired).
    pub vertex_bound: u64,
    pub total: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub finished: bool,
    pub final_round: u32,
    pub t_star: u32,
    pub rounds_at_least_t_star: Status,
    pub height: u32,
    pub full_height: u32,
    pub height_reaches_lm: Status,
    pub vertices: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: GadgetMode,
    pub params: LemmaParams,
    pub checkpoints: Vec<CheckpointReport>,
    pub budget: BudgetAudit,
    pub verdicts: Verdicts,
    pub passed: u32,
    pub failed: u32,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    fn statuses(&self) -> Vec<Status> {
        let mut all = Vec::new();
        for c in &self.checkpoints {
            all.push(c.claim1.status);
            all.extend(c.claim2.as_ref().map(|x| x.status));
            all.push(c.claim3.lower);
            all.push(c.claim3.upper);
            all.push(c.root_passage.status);
        }
        let b = &self.budget;
        all.extend([
            b.identity,
            b.base_within_half,
            b.small_term_within_sixth,
            b.agent_leaves_within_sixth,
            b.paths_within_sixth,
            b.surcharge_within_bound,
            b.total,
            self.verdicts.rounds_at_least_t_star,
            self.verdicts.height_reaches_lm,
        ]);
        all
    }
}

struct Observed {
    record: CheckpointRecord,
    height_after: u32,
    positions: Vec<VertexId>,
    deep_vertices: u64,
    deep_visited: u64,
    deep_violations: u64,
}

/// Collects what the checks need while a game is played or replayed.
pub struct LemmaVerifier {
    params: LemmaParams,
    observed: Vec<Observed>,
    /// For each gadget leaf at depth `L(i+1)`: index into `observed`.
    deep_owner: Vec<Option<u32>>,
    tree_len: usize,
}

impl LemmaVerifier {
    pub fn new(params: LemmaParams) -> Self {
        let tree_len = params.branch_count() as usize * params.segment as usize + 1;
        LemmaVerifier {
            params,
            observed: Vec::new(),
            deep_owner: vec![None; tree_len],
            tree_len,
        }
    }

    /// Evaluates every check on the final state of the game.
    pub fn finish(&self, state: &GameState) -> VerificationReport {
        let p = &self.params;
        let l = u64::from(p.segment);
        let n = p.n;
        let strict = p.mode == GadgetMode::Strict;
        let mut checkpoints = Vec::with_capacity(self.observed.len());
        let mut all_nonempty = true;

        for (idx, obs) in self.observed.iter().enumerate() {
            let rec = &obs.record;
            let i = rec.i;
            let s_size = rec.s_set.len() as u64;
            let min_a = rec.s_set.iter().map(|v| rec.a_values[v]).min();
            all_nonempty &= s_size > 0;

            let bound = p.segment * (i + 1);
            let exact_required = !strict && all_nonempty;
            let height_ok = obs.height_after <= bound && (!exact_required || obs.height_after == bound);
            let claim1 = HeightCheck {
                height: obs.height_after,
                bound,
                exact_required,
                status: Status::asserted(height_ok),
            };

            let claim2 = (i + 1 < p.m).then(|| {
                let next = self.observed.get(idx + 1).map(|o| o.record.k_set.len() as u64);
                let status = match next {
                    None => Status::NotReached,
                    Some(_) if strict && min_a == Some(0) => Status::Vacuous,
                    Some(kn) => Status::asserted(kn == s_size),
                };
                KChainCheck {
                    s_size,
                    next_k_size: next,
                    status,
                }
            });

            let lower_ok = exact::selection_lower_bound_holds(s_size, i, n, l, p.m);
            let upper_ok = exact::selection_upper_bound_holds(s_size, i, n, l, p.m);
            let base = n as f64 / (2.0 * l as f64);
            let claim3 = SelectionBoundsCheck {
                s_size,
                lower_approx: p.alpha.powi(i as i32) * base,
                upper_approx: (2.0 * p.alpha).powi(i as i32) * base,
                lower: if strict {
                    Status::reported(lower_ok)
                } else {
                    Status::asserted(lower_ok)
                },
                upper: Status::asserted(upper_ok),
            };

            let root_passage = RootPassageCheck {
                deep_vertices: obs.deep_vertices,
                visited: obs.deep_visited,
                violations: obs.deep_violations,
                floor_round: p.t(i + 1),
                status: Status::asserted(obs.deep_violations == 0),
            };

            checkpoints.push(CheckpointReport {
                i,
                t: rec.t,
                k_size: rec.k_set.len() as u64,
                s_size,
                min_a_in_s: min_a,
                claim1,
                claim2,
                claim3,
                root_passage,
            });
        }

        let budget = self.budget(state);
        let reached_all = self.observed.len() + 1 == p.m as usize;
        let finished = state.is_explored();
        let full_height = p.segment * p.m;
        let height = state.tree().height();
        let rounds_ok = !(finished && state.round() < p.t_star);
        let verdicts = Verdicts {
            finished,
            final_round: state.round(),
            t_star: p.t_star,
            rounds_at_least_t_star: if strict {
                Status::reported(rounds_ok)
            } else {
                Status::asserted(rounds_ok)
            },
            height,
            full_height,
            height_reaches_lm: match (strict, reached_all && all_nonempty) {
                (false, true) => Status::asserted(height == full_height),
                (_, _) => Status::reported(height == full_height),
            },
            vertices: state.tree().len() as u64,
        };

        let mut report = VerificationReport {
            mode: p.mode,
            params: p.clone(),
            checkpoints,
            budget,
            verdicts,
            passed: 0,
            failed: 0,
        };
        let statuses = report.statuses();
        report.passed = statuses.iter().filter(|&&s| s == Status::Pass).count() as u32;
        report.failed = statuses.iter().filter(|&&s| s == Status::Fail).count() as u32;
        report
    }

    fn budget(&self, state: &GameState) -> BudgetAudit {
        let p = &self.params;
        let n = p.n;
        let l = u64::from(p.segment);
        let base_term = p.branch_count() * l + 1;
        let mut path_term = 0u64;
        let mut leaf_term = 0u64;
        let mut agent_leaf_term = 0u64;
        for obs in &self.observed {
            let i = u64::from(obs.record.i);
            for g in &obs.record.gadgets {
                path_term += u64::from(g.path_len);
                leaf_term += u64::from(g.leaf_count);
            }
            for v in &obs.record.s_set {
                agent_leaf_term += l * (i + 1) * u64::from(obs.record.a_values[v]);
            }
        }
        let repair_surcharge = leaf_term - agent_leaf_term.min(leaf_term);
        let vertices = state.tree().len() as u64;
        let k_ok = p.k_within_bound();
        // the n/6 terms only follow from the team-size bound
        let gated = |ok: bool| {
            if k_ok {
                Status::asserted(ok)
            } else {
                Status::reported(ok)
            }
        };
        let vertex_bound = match p.mode {
            GadgetMode::Strict => n,
            GadgetMode::Repaired => (7 * n).div_ceil(5),
        };
        BudgetAudit {
            base_term,
            path_term,
            agent_leaf_term,
            repair_surcharge,
            vertices,
            identity: Status::asserted(vertices == base_term + path_term + leaf_term),
            base_within_half: Status::asserted(2 * base_term <= n + 2 * l + 2),
            small_term_within_sixth: Status::asserted(6 * (l + 1) <= n),
            agent_leaves_within_sixth: gated(6 * agent_leaf_term <= n),
            paths_within_sixth: Status::asserted(6 * path_term <= n),
            surcharge_within_bound: Status::asserted(18 * repair_surcharge <= 7 * n),
            k_within_bound: k_ok,
            vertex_bound,
            total: gated(vertices <= vertex_bound),
        }
    }
}

impl RoundObserver for LemmaVerifier {
    fn before_round(
        &mut self,
        prev: &GameState,
        round: &RoundRecord,
        checkpoint: Option<&CheckpointRecord>,
    ) -> Result<(), String> {
        match (self.params.checkpoint_level(round.t), checkpoint) {
            (None, None) if round.attachments.is_empty() => Ok(()),
            (None, None) => Err("attachments outside a checkpoint round".into()),
            (None, Some(_)) => Err("checkpoint record at a non-checkpoint round".into()),
            (Some(i), None) => Err(format!("checkpoint {i} has no record")),
            (Some(i), Some(rec)) => {
                let expected = checkpoint_decision(&self.params, prev, &round.moves, i, round.t);
                if *rec != expected {
                    return Err(format!("checkpoint {i} record disagrees with the replayed state"));
                }
                if round.attachments != expected.gadgets {
                    return Err(format!("checkpoint {i} attachments differ from its gadgets"));
                }
                Ok(())
            }
        }
    }

    fn on_round(&mut self, state: &GameState, newly: &[VertexId], checkpoint: Option<&CheckpointRecord>) {
        let tree = state.tree();
        let t = state.round();
        for &v in newly {
            let Some(idx) = self.deep_owner.get(v.index()).copied().flatten() else {
                continue;
            };
            let obs = &mut self.observed[idx as usize];
            obs.deep_visited += 1;
            if u64::from(t) >= self.params.t(obs.record.i + 1) {
                continue;
            }
            let branch = tree.branch_of(v);
            let from_inside = state
                .positions()
                .iter()
                .zip(&obs.positions)
                .any(|(&now, &then)| now == v && tree.branch_of(then) == branch);
            if !from_inside {
                obs.deep_violations += 1;
            }
        }

        if let Some(rec) = checkpoint {
            let deep = self.params.segment * (rec.i + 1);
            let idx = self.observed.len() as u32;
            self.deep_owner.resize(tree.len(), None);
            let mut deep_vertices = 0;
            for v in (self.tree_len..tree.len()).map(|x| VertexId(x as u32)) {
                if tree.depth(v) == deep {
                    self.deep_owner[v.index()] = Some(idx);
                    deep_vertices += 1;
                }
            }
            self.observed.push(Observed {
                record: rec.clone(),
                height_after: tree.height(),
                positions: state.positions().to_vec(),
                deep_vertices,
                deep_visited: 0,
                deep_violations: 0,
            });
        }
        self.tree_len = tree.len();
    }
}

/// Plays a lemma game and verifies it as it runs.
pub fn play_verified(
    explorer: &mut dyn Explorer,
    params: &LemmaParams,
    config: PlayConfig,
) -> Result<(GameRun, VerificationReport), crate::error::Error> {
    let mut revealer = LemmaRevealer::new(params.clone())?;
    let mut verifier = LemmaVerifier::new(params.clone());
    let run = play_observed(explorer, &mut revealer, config, &mut verifier)?;
    let report = verifier.finish(&run.state);
    Ok((run, report))
}

/// Reads the lemma parameters a transcript was recorded with.
pub fn params_from_transcript(transcript: &Transcript) -> Result<LemmaParams, VerifyError> {
    let p = &transcript.params;
    if p.revealer != "lemma" {
        return Err(VerifyError::Integrity(format!(
            "revealer is {:?}, not \"lemma\"",
            p.revealer
        )));
    }
    let missing = |what: &str| VerifyError::Integrity(format!("transcript params lack {what}"));
    let n = p.n.ok_or_else(|| missing("n"))?;
    let l = p.segment.ok_or_else(|| missing("L"))?;
    let m = p.m.ok_or_else(|| missing("m"))?;
    let mode = p.mode.ok_or_else(|| missing("mode"))?;
    Ok(revealer::derive_params(n, l, m, p.k, mode)?)
}

/// Replays `transcript` under `params` and evaluates every check.
pub fn verify_lemma_run(transcript: &Transcript, params: &LemmaParams) -> Result<VerificationReport, VerifyError> {
    let p = &transcript.params;
    if p.revealer != "lemma"
        || p.n != Some(params.n)
        || p.segment != Some(params.segment)
        || p.m != Some(params.m)
        || p.k != params.k
        || p.mode != Some(params.mode)
    {
        return Err(VerifyError::Integrity("transcript parameters do not match".into()));
    }
    let initial = revealer::initial_tree(params)?;
    let mut verifier = LemmaVerifier::new(params.clone());
    let state = replay(transcript, initial, &mut verifier).map_err(|e| match e {
        ReplayError::Game(g) => VerifyError::Integrity(g.to_string()),
        ReplayError::Mismatch(m) => VerifyError::Integrity(m),
    })?;
    Ok(verifier.finish(&state))
}
