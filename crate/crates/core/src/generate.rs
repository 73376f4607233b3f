//! Seeded random formulas and sequents for property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Formula, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Variables are drawn from `p`, `q`, `r`, ... (at most 26).
    pub vars: usize,
    /// Upper bound on connective occurrences per formula.
    pub max_connectives: usize,
    /// Upper bound on formulas per side.
    pub max_side: usize,
    pub im_free: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { vars: 3, max_connectives: 6, max_side: 2, im_free: false }
    }
}

const NAMES: &str = "pqrstuvwxyzabcdefghijklmno";

pub struct Generator {
    rng: ChaCha8Rng,
    config: GenConfig,
}

impl Generator {
    pub fn new(seed: u64, config: GenConfig) -> Generator {
        assert!((1..=26).contains(&config.vars));
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), config }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A formula with a uniformly chosen number of connectives.
    pub fn formula(&mut self) -> Formula {
        let k = self.rng.gen_range(0..=self.config.max_connectives);
        self.formula_of_size(k)
    }

    /// A formula with exactly `k` connective occurrences (`top` and `bot`
    /// count as one).
    pub fn formula_of_size(&mut self, k: usize) -> Formula {
        if k == 0 {
            let i = self.rng.gen_range(0..self.config.vars);
            return Formula::var(&NAMES[i..i + 1]);
        }
        let mut unary: Vec<fn(Formula) -> Formula> = vec![Formula::un, Formula::con, Formula::det];
        if !self.config.im_free {
            unary.push(Formula::im);
        }
        // weights: constants only at k = 1, binary needs no minimum
        let choice = self.rng.gen_range(0..(unary.len() + 2 + if k == 1 { 1 } else { 0 }));
        if choice < unary.len() {
            return unary[choice](self.formula_of_size(k - 1));
        }
        if choice >= unary.len() + 2 {
            return [Formula::Top, Formula::Bot].choose(&mut self.rng).unwrap().clone();
        }
        let a = self.rng.gen_range(0..k);
        let (x, y) = (self.formula_of_size(a), self.formula_of_size(k - 1 - a));
        if choice == unary.len() {
            Formula::and(x, y)
        } else {
            Formula::or(x, y)
        }
    }

    /// A nonempty sequent with at most `max_side` formulas per side.
    pub fn sequent(&mut self) -> Sequent {
        loop {
            let l = self.rng.gen_range(0..=self.config.max_side);
            let r = self.rng.gen_range(0..=self.config.max_side);
            if l + r == 0 {
                continue;
            }
            let left: Vec<Formula> = (0..l).map(|_| self.formula()).collect();
            let right: Vec<Formula> = (0..r).map(|_| self.formula()).collect();
            return Sequent::new(left, right);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respects_config() {
        let config = GenConfig { vars: 2, max_connectives: 5, max_side: 2, im_free: true };
        let mut g = Generator::new(7, config);
        for _ in 0..500 {
            let s = g.sequent();
            assert!(!s.is_empty());
            assert!(s.left.len() <= 2 && s.right.len() <= 2);
            assert!(!s.has_im());
            assert!(s.variables().iter().all(|v| &**v == "p" || &**v == "q"));
            assert!(s.formulas().all(|f| f.connective_count() <= 5));
        }
    }

    #[test]
    fn exact_sizes() {
        let mut g = Generator::new(1, GenConfig::default());
        for k in 0..8 {
            for _ in 0..50 {
                assert_eq!(g.formula_of_size(k).connective_count(), k);
            }
        }
    }

    #[test]
    fn seeded() {
        let a: Vec<_> = { let mut g = Generator::new(3, GenConfig::default()); (0..20).map(|_| g.sequent()).collect() };
        let b: Vec<_> = { let mut g = Generator::new(3, GenConfig::default()); (0..20).map(|_| g.sequent()).collect() };
        assert_eq!(a, b);
    }
}
