use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Expr, Ident};

/// Shape of the expressions produced by [`gen_random`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_depth: usize,
    pub vocab: Vec<Ident>,
    /// Emit `post` and `context` nodes.
    pub allow_effects: bool,
    /// Emit `;` nodes.
    pub allow_seq: bool,
    /// Emit `true`/`false` leaves alongside identifiers.
    pub allow_consts: bool,
}

impl GenConfig {
    pub fn new(max_depth: usize, vocab: Vec<Ident>) -> Self {
        GenConfig {
            max_depth,
            vocab,
            allow_effects: false,
            allow_seq: false,
            allow_consts: true,
        }
    }

    pub fn effects(mut self, on: bool) -> Self {
        self.allow_effects = on;
        self
    }

    pub fn sequencing(mut self, on: bool) -> Self {
        self.allow_seq = on;
        self
    }

    pub fn constants(mut self, on: bool) -> Self {
        self.allow_consts = on;
        self
    }

    /// A fresh deterministic stream of expressions.
    pub fn stream(&self, seed: u64) -> impl Iterator<Item = Expr> + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        std::iter::repeat_with(move || self.sample(&mut rng))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Expr {
        assert!(self.max_depth >= 1, "max_depth must be at least 1");
        assert!(!self.vocab.is_empty(), "vocabulary must be nonempty");
        self.node(rng, self.max_depth)
    }

    fn atom<R: Rng + ?Sized>(&self, rng: &mut R) -> Expr {
        if self.allow_consts && rng.gen_ratio(1, 5) {
            Expr::Const(rng.gen())
        } else {
            Expr::Var(self.vocab[rng.gen_range(0..self.vocab.len())].clone())
        }
    }

    fn node<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> Expr {
        // Leaves become likelier as depth runs out, which keeps sizes moderate
        // while still reaching the depth bound regularly.
        if depth <= 1 || rng.gen_bool(0.3) {
            return self.atom(rng);
        }
        let mut kinds = vec![0u8, 1];
        if self.allow_seq {
            kinds.push(2);
        }
        if self.allow_effects {
            kinds.extend([3, 4]);
        }
        let d = depth - 1;
        match kinds[rng.gen_range(0..kinds.len())] {
            0 => Expr::or(self.node(rng, d), self.node(rng, d)),
            1 => Expr::and(self.node(rng, d), self.node(rng, d)),
            2 => Expr::seq(self.node(rng, d), self.node(rng, d)),
            3 => Expr::Post(Box::new(self.atom(rng)), Box::new(self.node(rng, d))),
            _ => Expr::context(self.node(rng, d), self.node(rng, d)),
        }
    }
}

/// Deterministic random expression for `seed`.
///
/// With `allow_effects` off only constants, identifiers, `and` and `or` are
/// produced; use [`GenConfig`] directly to also admit `;` without effects.
pub fn gen_random(seed: u64, max_depth: usize, vocab: &[Ident], allow_effects: bool) -> Expr {
    let cfg = GenConfig::new(max_depth, vocab.to_vec())
        .effects(allow_effects)
        .sequencing(allow_effects);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cfg.sample(&mut rng)
}
