//! Offline exploration of a known tree: the counting lower bound, the
//! doubled-edge Euler tour schedule, and an exhaustive optimum for tiny trees.

use std::collections::HashSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::OfflineError;
use crate::tree::{RootedTree, VertexId};

/// `max(D, ⌈(n-1)/k⌉)`: no agent team beats the depth of the deepest vertex,
/// and `k` agents visit at most `k` new vertices per round.
pub fn trivial_lb(n: u64, height: u64, k: u64) -> u64 {
    assert!(n >= 1 && k >= 1);
    height.max((n - 1).div_ceil(k))
}

/// Per-agent walks, each starting at the root, one position per round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub rounds: u32,
    pub walks: Vec<Vec<VertexId>>,
}

impl Schedule {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("schedule serializes");
        out.push(b'\n');
        out
    }

    /// Checks adjacency of consecutive positions, coverage of every vertex,
    /// and that `rounds` is the longest walk.
    pub fn validate(&self, tree: &RootedTree) -> Result<(), String> {
        let mut covered = vec![false; tree.len()];
        covered[0] = true;
        let mut longest = 0;
        for (j, walk) in self.walks.iter().enumerate() {
            if walk.first() != Some(&VertexId::ROOT) {
                return Err(format!("walk {j} does not start at the root"));
            }
            for w in walk.windows(2) {
                if !tree.contains(w[1]) || (w[0] != w[1] && !tree.are_adjacent(w[0], w[1])) {
                    return Err(format!("walk {j} jumps from {} to {}", w[0], w[1]));
                }
            }
            for &v in walk {
                covered[v.index()] = true;
            }
            longest = longest.max(walk.len() - 1);
        }
        if let Some(v) = covered.iter().position(|&c| !c) {
            return Err(format!("vertex {v} is never visited"));
        }
        if self.rounds as usize != longest {
            return Err(format!(
                "rounds = {} but the longest walk has {longest} moves",
                self.rounds
            ));
        }
        Ok(())
    }
}

/// Closed DFS walk over the doubled edges, children in id order; `2n-1`
/// positions.
pub fn euler_tour(tree: &RootedTree) -> Vec<VertexId> {
    let mut tour = Vec::with_capacity(2 * tree.len() - 1);
    let mut stack: Vec<(VertexId, usize)> = vec![(VertexId::ROOT, 0)];
    tour.push(VertexId::ROOT);
    while let Some((v, next)) = stack.last_mut() {
        let kids = tree.children(*v);
        if *next < kids.len() {
            let c = kids[*next];
            *next += 1;
            tour.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                tour.push(p);
            }
        }
    }
    tour
}

/// Splits the Euler tour into `k` contiguous segments of `⌈(2n-2)/k⌉`
/// edges; agent `j` walks from the root to the start of segment `j` and then
/// along it. Moves after an agent's last first-visit are dropped.
pub fn euler_schedule(tree: &RootedTree, k: usize) -> Schedule {
    assert!(k >= 1);
    let tour = euler_tour(tree);
    let edges = tour.len() - 1;
    if edges == 0 {
        return Schedule {
            rounds: 0,
            walks: vec![vec![VertexId::ROOT]; k],
        };
    }
    let seg = edges.div_ceil(k);
    let mut walks: Vec<Vec<VertexId>> = (0..k)
        .map(|j| {
            let start = j * seg;
            if start >= edges {
                return vec![VertexId::ROOT];
            }
            let end = (start + seg).min(edges);
            let mut walk = tree.root_path(tour[start]);
            walk.extend_from_slice(&tour[start + 1..=end]);
            walk
        })
        .collect();

    // designate, for each vertex, the earliest (round, agent) visit
    let mut first: Vec<Option<(usize, usize)>> = vec![None; tree.len()];
    for (j, walk) in walks.iter().enumerate() {
        for (r, &v) in walk.iter().enumerate() {
            let slot = &mut first[v.index()];
            if slot.is_none_or(|best| (r, j) < best) {
                *slot = Some((r, j));
            }
        }
    }
    let mut keep = vec![0usize; k];
    for &(r, j) in first.iter().flatten() {
        keep[j] = keep[j].max(r);
    }
    for (walk, &last) in walks.iter_mut().zip(&keep) {
        walk.truncate(last + 1);
    }
    let rounds = walks.iter().map(|w| w.len() - 1).max().unwrap_or(0) as u32;
    Schedule { rounds, walks }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteLimits {
    pub cap: u32,
    pub max_states: usize,
}

impl Default for BruteLimits {
    fn default() -> Self {
        BruteLimits {
            cap: 64,
            max_states: 2_000_000,
        }
    }
}

/// Minimum number of rounds for `k` agents starting at the root to visit
/// every vertex, by breadth-first search over (sorted positions, visited set).
pub fn brute_opt(tree: &RootedTree, k: usize, limits: BruteLimits) -> Result<u32, OfflineError> {
    let n = tree.len();
    if n > 64 {
        return Err(OfflineError::TooLarge { n });
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let moves: Vec<Vec<u8>> = tree
        .vertices()
        .map(|v| {
            let mut m = vec![v.0 as u8];
            m.extend(tree.parent(v).map(|p| p.0 as u8));
            m.extend(tree.children(v).iter().map(|c| c.0 as u8));
            m
        })
        .collect();

    type State = (Vec<u8>, u64);
    let start: State = (vec![0; k], 1);
    if start.1 == full {
        return Ok(0);
    }
    let mut seen: HashSet<State> = HashSet::from([start.clone()]);
    let mut layer = vec![start];
    let mut t = 0;
    while !layer.is_empty() {
        t += 1;
        if t > limits.cap {
            return Err(OfflineError::ExceededCap { cap: limits.cap });
        }
        let mut next = Vec::new();
        for (pos, mask) in &layer {
            // odometer over every agent's options
            let mut choice = vec![0usize; k];
            loop {
                let mut np: Vec<u8> = (0..k).map(|a| moves[pos[a] as usize][choice[a]]).collect();
                let nm = np.iter().fold(*mask, |m, &v| m | (1u64 << v));
                if nm == full {
                    return Ok(t);
                }
                np.sort_unstable();
                let state = (np, nm);
                if !seen.contains(&state) {
                    if seen.len() >= limits.max_states {
                        return Err(OfflineError::ResourceLimit {
                            limit: limits.max_states,
                        });
                    }
                    seen.insert(state.clone());
                    next.push(state);
                }
                let mut a = 0;
                while a < k {
                    choice[a] += 1;
                    if choice[a] < moves[pos[a] as usize].len() {
                        break;
                    }
                    choice[a] = 0;
                    a += 1;
                }
                if a == k {
                    break;
                }
            }
        }
        layer = next;
    }
    unreachable!("a connected tree is always explorable")
}

pub(crate) fn ratio_json<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Frac {
        num: u64,
        den: u64,
    }
    r.map(|r| Frac {
        num: *r.numer(),
        den: *r.denom(),
    })
    .serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub n: u64,
    pub height: u64,
    pub k: u64,
    pub trivial_lb: u64,
    pub euler_ub: u64,
    pub brute_opt: Option<u32>,
    pub online_rounds: Option<u32>,
    /// `online / euler_ub`; a certified lower bound on the competitive
    /// ratio of that run since `euler_ub ≥ OPT`.
    #[serde(serialize_with = "ratio_json")]
    pub ratio_lb: Option<Ratio<u64>>,
    /// `online / trivial_lb`.
    #[serde(serialize_with = "ratio_json")]
    pub ratio_estimate: Option<Ratio<u64>>,
}

impl BoundsReport {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }
}

/// Assembles the bounds for `tree` with `k` agents. The exhaustive optimum
/// is attempted only when `try_brute` is set, and left empty if it does not
/// fit the resource limits.
pub fn bounds_report(tree: &RootedTree, k: usize, online_rounds: Option<u32>, try_brute: bool) -> BoundsReport {
    let n = tree.len() as u64;
    let height = u64::from(tree.height());
    let lb = trivial_lb(n, height, k as u64);
    let schedule = euler_schedule(tree, k);
    let ub = u64::from(schedule.rounds);
    let brute = try_brute
        .then(|| {
            brute_opt(
                tree,
                k,
                BruteLimits {
                    cap: schedule.rounds,
                    ..BruteLimits::default()
                },
            )
            .ok()
        })
        .flatten();
    let ratio = |den: u64| online_rounds.filter(|_| den > 0).map(|r| Ratio::new(u64::from(r), den));
    BoundsReport {
        n,
        height,
        k: k as u64,
        trivial_lb: lb,
        euler_ub: ub,
        brute_opt: brute,
        online_rounds,
        ratio_lb: ratio(ub),
        ratio_estimate: ratio(lb),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_lb_examples() {
        assert_eq!(trivial_lb(9, 2, 4), 2);
        assert_eq!(trivial_lb(2, 1, 5), 1);
        assert_eq!(trivial_lb(101, 3, 10), 10);
        assert_eq!(trivial_lb(1, 0, 3), 0);
    }

    #[test]
    fn tour_shapes() {
        let t = RootedTree::path(3);
        let ids: Vec<u32> = euler_tour(&t).iter().map(|v| v.0).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 2, 1, 0]);
        let ids: Vec<u32> = euler_tour(&RootedTree::star(4)).iter().map(|v| v.0).collect();
        assert_eq!(ids, vec![0, 1, 0, 2, 0, 3, 0, 4, 0]);
    }

    #[test]
    fn schedules() {
        let t = RootedTree::path(3);
        let s = euler_schedule(&t, 1);
        s.validate(&t).unwrap();
        assert!(s.rounds <= 6);
        assert_eq!(s.rounds, 3);

        let t = RootedTree::star(4);
        let s = euler_schedule(&t, 2);
        s.validate(&t).unwrap();
        assert!(s.rounds <= 5);
        assert_eq!(s.rounds, 3);

        let t = RootedTree::new();
        let s = euler_schedule(&t, 7);
        s.validate(&t).unwrap();
        assert_eq!(s.rounds, 0);
    }

    #[test]
    fn more_agents_than_edges() {
        let t = RootedTree::star(2);
        let s = euler_schedule(&t, 10);
        s.validate(&t).unwrap();
        assert_eq!(s.rounds, 1);
    }

    #[test]
    fn schedule_validation_catches_faults() {
        let t = RootedTree::star(2);
        let bad = Schedule {
            rounds: 1,
            walks: vec![vec![VertexId(0), VertexId(1)]],
        };
        assert!(bad.validate(&t).unwrap_err().contains("never visited"));
        let bad = Schedule {
            rounds: 1,
            walks: vec![vec![VertexId(0), VertexId(1)], vec![VertexId(1), VertexId(2)]],
        };
        assert!(bad.validate(&t).is_err());
        let bad = Schedule {
            rounds: 1,
            walks: vec![vec![VertexId(0), VertexId(1), VertexId(2)]],
        };
        assert!(bad.validate(&t).is_err());
    }

    #[test]
    fn brute_examples() {
        let lim = BruteLimits::default();
        assert_eq!(brute_opt(&RootedTree::path(3), 1, lim), Ok(3));
        assert_eq!(brute_opt(&RootedTree::star(4), 1, lim), Ok(7));
        assert_eq!(brute_opt(&RootedTree::star(4), 2, lim), Ok(3));
        assert_eq!(brute_opt(&RootedTree::new(), 2, lim), Ok(0));
    }

    #[test]
    fn brute_limits() {
        let t = RootedTree::star(4);
        assert_eq!(
            brute_opt(
                &t,
                1,
                BruteLimits {
                    cap: 5,
                    max_states: 1000
                }
            ),
            Err(OfflineError::ExceededCap { cap: 5 })
        );
        assert_eq!(
            brute_opt(&t, 1, BruteLimits { cap: 50, max_states: 3 }),
            Err(OfflineError::ResourceLimit { limit: 3 })
        );
        assert!(matches!(
            brute_opt(&RootedTree::star(70), 1, BruteLimits::default()),
            Err(OfflineError::TooLarge { .. })
        ));
    }

    #[test]
    fn report_star() {
        let r = bounds_report(&RootedTree::star(4), 2, Some(3), true);
        assert_eq!(r.trivial_lb, 2);
        assert!(r.euler_ub <= 5);
        assert_eq!(r.brute_opt, Some(3));
        assert!(r.ratio_lb.unwrap() >= Ratio::new(3, 5));

        let r = bounds_report(&RootedTree::star(4), 2, None, false);
        assert!(r.ratio_lb.is_none() && r.ratio_estimate.is_none() && r.brute_opt.is_none());
    }

    #[test]
    fn report_json_shape() {
        let r = bounds_report(&RootedTree::star(4), 2, Some(3), true);
        let v: serde_json::Value = serde_json::from_slice(&r.to_json()).unwrap();
        assert_eq!(v["ratio_lb"]["num"], 1);
        assert_eq!(v["ratio_lb"]["den"], 1);
        assert_eq!(v["ratio_estimate"]["num"], 3);
        assert_eq!(v["ratio_estimate"]["den"], 2);
    }
}
