use std::collections::BTreeMap;

use super::{all_worlds, Evaluator, Frame, FrameClass, Model, WorldSet};
use crate::syntax::Sequent;

/// A refuting model together with the first world where the sequent fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub world: usize,
}

/// Allowed successor masks for world `i` of an `n`-world frame, in
/// increasing order.
fn row_digits(n: usize, i: usize, class: FrameClass) -> Vec<WorldSet> {
    let all = all_worlds(n);
    match class {
        FrameClass::Serial => (1..=all).collect(),
        FrameClass::Reflexive => (0..=all).filter(|r| r >> i & 1 == 1).collect(),
        FrameClass::Functional => (0..n).map(|j| 1u64 << j).collect(),
        _ => (0..=all).collect(),
    }
}

/// Visit every `n`-world frame in `class`, in increasing order of the edge
/// bitmask (edge `(i, j)` is bit `i * n + j`). The visitor returns `false`
/// to stop early.
pub fn for_each_frame<F>(n: usize, class: FrameClass, mut visit: F)
where
    F: FnMut(&Frame) -> bool,
{
    assert!((1..=8).contains(&n), "frame enumeration is limited to 8 worlds");
    let digits: Vec<Vec<WorldSet>> = (0..n).map(|i| row_digits(n, i, class)).collect();
    let post_filter = !matches!(
        class,
        FrameClass::All | FrameClass::Serial | FrameClass::Reflexive | FrameClass::Functional
    );
    let mut pos = vec![0usize; n];
    loop {
        let frame = Frame::from_masks(pos.iter().zip(&digits).map(|(&k, d)| d[k]).collect());
        if (!post_filter || frame.check(class)) && !visit(&frame) {
            return;
        }
        // odometer with row 0 as the least significant digit
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            pos[i] += 1;
            if pos[i] < digits[i].len() {
                break;
            }
            pos[i] = 0;
            i += 1;
        }
    }
}

/// All `n`-world frames of a class, in enumeration order.
pub fn frames(n: usize, class: FrameClass) -> Vec<Frame> {
    let mut out = Vec::new();
    for_each_frame(n, class, |f| {
        out.push(f.clone());
        true
    });
    out
}

/// Bounded refutation search. Enumerates frames by increasing world count,
/// then edge bitmask, then valuation bitmask (variable `k` at world `w` is
/// bit `k * n + w`, variables sorted by name), and returns the first model
/// with a world where `s` fails.
///
/// Finding nothing says nothing about validity.
pub fn countermodel_search(s: &Sequent, class: FrameClass, max_worlds: usize) -> Option<Countermodel> {
    let left: Vec<_> = s.left.iter().collect();
    let right: Vec<_> = s.right.iter().collect();
    let ev = Evaluator::new(left.iter().copied().chain(right.iter().copied()));
    let nvars = ev.variables().len();
    let mut values = Vec::new();
    for n in 1..=max_worlds.min(8) {
        let all = all_worlds(n);
        let bits = nvars * n;
        assert!(bits < 64, "valuation space too large for enumeration");
        let mut found = None;
        for_each_frame(n, class, |frame| {
            let mut masks = vec![0; nvars];
            for v in 0..1u64 << bits {
                for (k, m) in masks.iter_mut().enumerate() {
                    *m = v >> (k * n) & all;
                }
                ev.eval(frame, &masks, &mut values);
                let (l, r) = values.split_at(left.len());
                let lhs = l.iter().fold(all, |acc, x| acc & x);
                let rhs = r.iter().fold(0, |acc, x| acc | x);
                let failing = lhs & !rhs;
                if failing != 0 {
                    let valuation: BTreeMap<_, _> =
                        ev.variables().iter().cloned().zip(masks.iter().copied()).collect();
                    found = Some(Countermodel {
                        model: Model::from_masks(frame.clone(), valuation),
                        world: failing.trailing_zeros() as usize,
                    });
                    return false;
                }
            }
            true
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_sequent;

    fn s(t: &str) -> Sequent {
        parse_sequent(t).unwrap()
    }

    #[test]
    fn frame_counts() {
        assert_eq!(frames(2, FrameClass::All).len(), 16);
        assert_eq!(frames(3, FrameClass::All).len(), 512);
        assert_eq!(frames(3, FrameClass::Serial).len(), 7 * 7 * 7);
        assert_eq!(frames(3, FrameClass::Reflexive).len(), 64);
        assert_eq!(frames(3, FrameClass::Functional).len(), 27);
        // symmetric: free choice of the diagonal and of each unordered pair
        assert_eq!(frames(3, FrameClass::Symmetric).len(), 64);
    }

    #[test]
    fn frames_come_in_mask_order() {
        for class in FrameClass::ALL {
            let fs = frames(3, class);
            let code = |f: &Frame| f.worlds().fold(0u64, |acc, i| acc | f.successors(i) << (3 * i));
            assert!(fs.windows(2).all(|w| code(&w[0]) < code(&w[1])), "{class:?}");
            assert!(fs.iter().all(|f| f.check(class)), "{class:?}");
            let brute = (0..1u64 << 9)
                .filter(|m| Frame::from_masks((0..3).map(|i| m >> (3 * i) & 7).collect()).check(class))
                .count();
            assert_eq!(fs.len(), brute, "{class:?}");
        }
    }

    #[test]
    fn explosion_fails_on_a_chain() {
        let cm = countermodel_search(&s("p, un p => q"), FrameClass::All, 2).unwrap();
        assert_eq!(cm.model.world_count(), 2);
        assert_eq!(cm.model.frame.edges(), vec![(0, 1)]);
        assert_eq!(cm.world, 0);
        assert_eq!(cm.model.holds(cm.world, &s("p, un p => q")), Ok(false));
    }

    #[test]
    fn reflexive_frames_validate_implosion() {
        assert_eq!(countermodel_search(&s("=> un p, p"), FrameClass::Reflexive, 3), None);
        assert!(countermodel_search(&s("=> un p, p"), FrameClass::All, 2).is_some());
    }

    #[test]
    fn de_morgan_fails_reflexively() {
        let seq = s("un p & un q => un (p | q)");
        let cm = countermodel_search(&seq, FrameClass::Reflexive, 3).unwrap();
        assert!(cm.model.frame.check(FrameClass::Reflexive));
        assert_eq!(cm.model.holds(cm.world, &seq), Ok(false));
    }

    #[test]
    fn empty_sequent_is_refuted_immediately() {
        let cm = countermodel_search(&s("=>"), FrameClass::All, 1).unwrap();
        assert_eq!(cm.model.world_count(), 1);
        assert_eq!(cm.world, 0);
    }
}
