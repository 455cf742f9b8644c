//! Terms over `·` and `\`.

use std::fmt;

use rand::Rng;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Mul(Box<Term>, Box<Term>),
    LDiv(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn ldiv(a: Term, b: Term) -> Term {
        Term::LDiv(Box::new(a), Box::new(b))
    }

    /// One more than the largest variable index.
    pub fn arity(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Mul(a, b) | Term::LDiv(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Mul(a, b) | Term::LDiv(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn eval_with(
        &self,
        args: &[usize],
        mul: &dyn Fn(usize, usize) -> usize,
        ldiv: &dyn Fn(usize, usize) -> usize,
    ) -> usize {
        match self {
            Term::Var(i) => args[*i],
            Term::Mul(a, b) => mul(a.eval_with(args, mul, ldiv), b.eval_with(args, mul, ldiv)),
            Term::LDiv(a, b) => ldiv(a.eval_with(args, mul, ldiv), b.eval_with(args, mul, ldiv)),
        }
    }

    /// Values at every point of `{0..n-1}^arity`, indexed with variable 0 as
    /// the most significant digit. Tables are row-major `n × n`.
    pub fn value_table(&self, n: usize, arity: usize, mul: &[u8], ldiv: &[u8]) -> Vec<u8> {
        let size = n.pow(arity as u32);
        match self {
            Term::Var(i) => {
                let stride = n.pow((arity - 1 - i) as u32);
                (0..size).map(|idx| ((idx / stride) % n) as u8).collect()
            }
            Term::Mul(a, b) | Term::LDiv(a, b) => {
                let table = if matches!(self, Term::Mul(..)) { mul } else { ldiv };
                let va = a.value_table(n, arity, mul, ldiv);
                let vb = b.value_table(n, arity, mul, ldiv);
                va.iter()
                    .zip(&vb)
                    .map(|(&x, &y)| table[x as usize * n + y as usize])
                    .collect()
            }
        }
    }

    /// A random term in variables `0..arity` of depth at most `max_depth`.
    /// Every variable occurs at least once when the depth allows it.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, arity: usize, max_depth: usize) -> Term {
        assert!(arity > 0);
        loop {
            let depth = rng.gen_range(0..=max_depth);
            let t = Self::grow(rng, arity, depth);
            let leaves = 1usize << max_depth.min(20);
            if t.uses_all(arity) || leaves < arity {
                return t;
            }
        }
    }

    fn grow<R: Rng + ?Sized>(rng: &mut R, arity: usize, depth: usize) -> Term {
        if depth == 0 || rng.gen_bool(0.2) {
            return Term::Var(rng.gen_range(0..arity));
        }
        let a = Self::grow(rng, arity, depth - 1);
        let b = Self::grow(rng, arity, depth - 1);
        if rng.gen_bool(0.5) {
            Term::mul(a, b)
        } else {
            Term::ldiv(a, b)
        }
    }

    fn uses_all(&self, arity: usize) -> bool {
        let mut used = vec![false; arity];
        self.mark(&mut used);
        used.into_iter().all(|u| u)
    }

    fn mark(&self, used: &mut [bool]) {
        match self {
            Term::Var(i) => used[*i] = true,
            Term::Mul(a, b) | Term::LDiv(a, b) => {
                a.mark(used);
                b.mark(used);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Mul(a, b) => write!(f, "({a}·{b})"),
            Term::LDiv(a, b) => write!(f, "({a}\\{b})"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
