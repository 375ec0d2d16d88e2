//! Seeded random trees for tests and sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tree::RootedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Each new vertex picks a uniform parent among the existing ones.
    Recursive,
    /// Parent drawn from the most recent `window` vertices, giving deep trees.
    Deep { window: u32 },
    /// A spine with leaves hanging off it.
    Caterpillar,
}

pub fn random_tree(n: u32, shape: Shape, seed: u64) -> RootedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n.max(1);
    let mut parents: Vec<Option<u32>> = Vec::with_capacity(n as usize);
    parents.push(None);
    let mut spine = 0u32;
    for v in 1..n {
        let p = match shape {
            Shape::Recursive => rng.gen_range(0..v),
            Shape::Deep { window } => rng.gen_range(v.saturating_sub(window.max(1))..v),
            Shape::Caterpillar => {
                if rng.gen_bool(0.5) {
                    let p = spine;
                    spine = v;
                    p
                } else {
                    spine
                }
            }
        };
        parents.push(Some(p));
    }
    RootedTree::from_parents(&parents).expect("parents precede children")
}

/// Picks the shape from the seed so a seed range covers all three.
pub fn mixed_tree(n: u32, seed: u64) -> RootedTree {
    let shape = match seed % 3 {
        0 => Shape::Recursive,
        1 => Shape::Deep { window: 3 },
        _ => Shape::Caterpillar,
    };
    random_tree(n, shape, seed)
}

/// Size drawn from `1..=max_n`, then [`mixed_tree`].
pub fn sized_tree(max_n: u32, seed: u64) -> RootedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.gen_range(1..=max_n.max(1));
    mixed_tree(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_trees_repeat() {
        for seed in 0..6 {
            let a = mixed_tree(50, seed);
            let b = mixed_tree(50, seed);
            assert_eq!(a.parents(), b.parents());
            assert_eq!(a.len(), 50);
        }
    }

    #[test]
    fn deep_trees_are_deeper() {
        let deep = random_tree(400, Shape::Deep { window: 1 }, 7);
        assert_eq!(deep.height(), 399);
        let flat = random_tree(400, Shape::Recursive, 7);
        assert!(flat.height() < 100);
    }

    #[test]
    fn sized_within_range() {
        for seed in 0..20 {
            let t = sized_tree(8, seed);
            assert!((1..=8).contains(&t.len()));
        }
    }
}
