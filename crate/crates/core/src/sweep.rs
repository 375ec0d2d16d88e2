//! Grids of lemma games run in parallel and written as CSV.

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::Error;
use crate::explorers::ExplorerKind;
use crate::game::{PlayConfig, ViewMode};
use crate::offline::bounds_report;
use crate::revealer::{derive_params, max_team_size, GadgetMode};
use crate::verify::play_verified;

pub const CSV_HEADER: [&str; 18] = [
    "explorer",
    "revealer",
    "mode",
    "n",
    "L",
    "m",
    "k",
    "finished",
    "final_round",
    "height",
    "vertices",
    "trivial_lb",
    "euler_ub",
    "ratio_lb_num",
    "ratio_lb_den",
    "claims_passed",
    "claims_failed",
    "error",
];

/// Team size as a number, the team-size bound, or `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum TeamSize {
    Fixed(u32),
    Named(NamedSize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedSize {
    Max,
    N,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ExplorerEntry {
    Name(String),
    WithTeam { name: String, k: TeamSize },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ParamSet {
    pub n: u64,
    #[serde(rename = "L")]
    pub segment: u32,
    pub m: u32,
    #[serde(default = "default_team")]
    pub k: TeamSize,
}

fn default_team() -> TeamSize {
    TeamSize::Named(NamedSize::Max)
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub explorers: Vec<ExplorerEntry>,
    pub params: Vec<ParamSet>,
    #[serde(default = "default_modes")]
    pub modes: Vec<GadgetMode>,
    /// `null` uses the default cap for the initial tree.
    #[serde(default = "default_caps")]
    pub caps: Vec<Option<u32>>,
    #[serde(default)]
    pub view: ViewMode,
}

fn default_modes() -> Vec<GadgetMode> {
    vec![GadgetMode::Repaired]
}

fn default_caps() -> Vec<Option<u32>> {
    vec![None]
}

impl SweepSpec {
    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepRow {
    pub explorer: String,
    pub revealer: String,
    pub mode: String,
    pub n: u64,
    pub segment: u32,
    pub m: u32,
    pub k: Option<u32>,
    pub finished: Option<bool>,
    pub final_round: Option<u32>,
    pub height: Option<u32>,
    pub vertices: Option<u64>,
    pub trivial_lb: Option<u64>,
    pub euler_ub: Option<u64>,
    pub ratio_lb: Option<(u64, u64)>,
    pub claims_passed: Option<u32>,
    pub claims_failed: Option<u32>,
    pub error: String,
}

impl SweepRow {
    fn fields(&self) -> [String; 18] {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        [
            self.explorer.clone(),
            self.revealer.clone(),
            self.mode.clone(),
            self.n.to_string(),
            self.segment.to_string(),
            self.m.to_string(),
            opt(self.k),
            opt(self.finished),
            opt(self.final_round),
            opt(self.height),
            opt(self.vertices),
            opt(self.trivial_lb),
            opt(self.euler_ub),
            opt(self.ratio_lb.map(|r| r.0)),
            opt(self.ratio_lb.map(|r| r.1)),
            opt(self.claims_passed),
            opt(self.claims_failed),
            self.error.clone(),
        ]
    }
}

#[derive(Debug, Clone)]
struct Cell {
    explorer: String,
    team: TeamSize,
    params: ParamSet,
    mode: GadgetMode,
    cap: Option<u32>,
    view: ViewMode,
}

fn cells(spec: &SweepSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for e in &spec.explorers {
        let (name, team) = match e {
            ExplorerEntry::Name(n) => (n.clone(), None),
            ExplorerEntry::WithTeam { name, k } => (name.clone(), Some(*k)),
        };
        for p in &spec.params {
            for &mode in &spec.modes {
                for &cap in &spec.caps {
                    out.push(Cell {
                        explorer: name.clone(),
                        team: team.unwrap_or(p.k),
                        params: p.clone(),
                        mode,
                        cap,
                        view: spec.view,
                    });
                }
            }
        }
    }
    out
}

fn run_cell(cell: &Cell) -> SweepRow {
    let p = &cell.params;
    let mut row = SweepRow {
        explorer: cell.explorer.clone(),
        revealer: "lemma".into(),
        mode: cell.mode.to_string(),
        n: p.n,
        segment: p.segment,
        m: p.m,
        ..SweepRow::default()
    };
    if let Err(e) = fill_cell(cell, &mut row) {
        row.error = e.to_string();
    }
    row
}

fn fill_cell(cell: &Cell, row: &mut SweepRow) -> Result<(), Error> {
    let p = &cell.params;
    let kind: ExplorerKind = cell.explorer.parse().map_err(Error::Usage)?;
    let k = match cell.team {
        TeamSize::Fixed(k) => u64::from(k),
        TeamSize::Named(NamedSize::Max) => max_team_size(p.n, p.segment, p.m)?,
        TeamSize::Named(NamedSize::N) => p.n,
    };
    let k = u32::try_from(k).map_err(|_| Error::Usage(format!("k = {k} too large")))?;
    row.k = Some(k);
    let params = derive_params(p.n, p.segment, p.m, k, cell.mode)?;
    let initial_height = u64::from(p.segment);
    let cap = cell
        .cap
        .unwrap_or_else(|| crate::game::default_cap(params.branch_count() * initial_height + 1, initial_height));
    let mut explorer = kind.build(params.checkpoints.first().copied().unwrap_or(p.segment));
    let config = PlayConfig {
        k,
        cap,
        view: cell.view,
    };
    let (run, report) = play_verified(explorer.as_mut(), &params, config)?;
    let outcome = &run.transcript.outcome;
    let bounds = bounds_report(run.state.tree(), k as usize, Some(outcome.final_round), false);
    row.finished = Some(outcome.finished);
    row.final_round = Some(outcome.final_round);
    row.height = Some(outcome.height);
    row.vertices = Some(u64::from(outcome.n));
    row.trivial_lb = Some(bounds.trivial_lb);
    row.euler_ub = Some(bounds.euler_ub);
    row.ratio_lb = bounds.ratio_lb.map(|r| (*r.numer(), *r.denom()));
    row.claims_passed = Some(report.passed);
    row.claims_failed = Some(report.failed);
    Ok(())
}

/// Runs every cell; rows come back in grid order (explorer, params, mode,
/// cap) whatever order the cells finish in.
pub fn sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    cells(spec).par_iter().map(run_cell).collect()
}

pub fn to_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("write to memory");
    for r in rows {
        w.write_record(r.fields()).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> SweepSpec {
        SweepSpec::from_json(json.as_bytes()).unwrap()
    }

    #[test]
    fn four_explorers_four_rows() {
        let s = spec(
            r#"{"explorers": ["idle", "single_dfs", {"name": "phase_bfs", "k": "n"}, "greedy_frontier"],
                "params": [{"n": 4096, "L": 1, "m": 3, "k": 64}], "caps": [40]}"#,
        );
        let rows = sweep(&s);
        assert_eq!(rows.len(), 4);
        let names: Vec<_> = rows.iter().map(|r| r.explorer.as_str()).collect();
        assert_eq!(names, ["idle", "single_dfs", "phase_bfs", "greedy_frontier"]);
        assert_eq!(rows[2].k, Some(4096));
        for r in &rows {
            assert!(r.error.is_empty(), "{}", r.error);
            assert_eq!(r.claims_failed, Some(0));
        }
    }

    #[test]
    fn infeasible_cell_keeps_going() {
        let s = spec(
            r#"{"explorers": ["idle"], "params": [{"n": 100, "L": 1, "m": 3}, {"n": 4096, "L": 1, "m": 3}],
                "caps": [5]}"#,
        );
        let rows = sweep(&s);
        assert!(rows[0].error.contains("16^3"), "{}", rows[0].error);
        assert!(rows[1].error.is_empty());
        assert_eq!(rows[1].k, Some(541));
        let csv = String::from_utf8(to_csv(&rows)).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(csv.lines().count(), 3);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn unknown_explorer_is_a_cell_error() {
        let s = spec(r#"{"explorers": ["dfs"], "params": [{"n": 4096, "L": 1, "m": 3}], "caps": [5]}"#);
        let rows = sweep(&s);
        assert!(rows[0].error.contains("unknown explorer"));
    }

    #[test]
    fn csv_is_stable() {
        let s = spec(
            r#"{"explorers": ["greedy_frontier", "idle_then_sweep"], "params": [{"n": 4096, "L": 1, "m": 3}],
                "modes": ["strict", "repaired"], "caps": [30, null]}"#,
        );
        assert_eq!(to_csv(&sweep(&s)), to_csv(&sweep(&s)));
    }
}
