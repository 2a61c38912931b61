use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use super::{AltIndex, MultiIndex, TermKey};
use crate::linalg::{Matrix, SparseVec};
use crate::rational::Rational;

thread_local! {
    static FACTORIALS: RefCell<Vec<Rational>> = RefCell::new(vec![Rational::one()]);
}

fn fact(m: u32) -> Rational {
    FACTORIALS.with(|cell| {
        let mut f = cell.borrow_mut();
        while f.len() <= m as usize {
            let next = &f[f.len() - 1] * &Rational::from_int(f.len() as i64);
            f.push(next);
        }
        f[m as usize].clone()
    })
}

/// `∫_{T^n} λ^α = n! α! / (|α| + n)!` with `n = α.len() - 1`, so `vol(T^n) = 1`.
pub fn monomial_integral(alpha: &MultiIndex) -> Rational {
    let n = alpha.len() as u32 - 1;
    let mut num = fact(n);
    for &e in alpha.exps() {
        if e > 1 {
            num *= fact(e as u32);
        }
    }
    num / fact(alpha.degree() + n)
}

/// Cached evaluation of `∫ ⟨a, b⟩` on canonical coordinates of `k`-forms on `T^n`.
#[derive(Debug)]
pub struct InnerProduct {
    n: usize,
    k: usize,
    metric: HashMap<(AltIndex, AltIndex), Rational>,
    monomials: HashMap<MultiIndex, Rational>,
}

impl InnerProduct {
    pub fn new(n: usize, k: usize) -> Self {
        InnerProduct { n, k, metric: HashMap::new(), monomials: HashMap::new() }
    }

    /// Pointwise `⟨dλ_σ, dλ_τ⟩ = det(g_{σ_a τ_b})`.
    pub fn metric(&mut self, s: AltIndex, t: AltIndex) -> Rational {
        if let Some(v) = self.metric.get(&(s, t)) {
            return v.clone();
        }
        let g = Rational::new(-1, self.n as i64 + 1);
        let sv = s.to_vec();
        let tv = t.to_vec();
        let mut m = Matrix::zeros(self.k, self.k);
        for (a, &i) in sv.iter().enumerate() {
            for (b, &j) in tv.iter().enumerate() {
                m[(a, b)] = if i == j { &g + &Rational::one() } else { g.clone() };
            }
        }
        let det = if self.k == 0 { Rational::one() } else { m.determinant().expect("square matrix") };
        self.metric.insert((s, t), det.clone());
        self.metric.insert((t, s), det.clone());
        det
    }

    fn monomial(&mut self, a: MultiIndex) -> Rational {
        self.monomials.entry(a).or_insert_with(|| monomial_integral(&a)).clone()
    }

    pub fn kernel(&mut self, a: &TermKey, b: &TermKey) -> Rational {
        let m = self.metric(a.0, b.0);
        if m.is_zero() {
            return m;
        }
        m * self.monomial(a.1.add(&b.1))
    }

    pub fn pair(&mut self, a: &SparseVec<TermKey>, b: &SparseVec<TermKey>) -> Rational {
        let mut acc = Rational::zero();
        for (s, cs) in a {
            for (t, ct) in b {
                let kv = self.kernel(s, t);
                if !kv.is_zero() {
                    acc += cs * ct * kv;
                }
            }
        }
        acc
    }

    /// Gram matrix `(∫⟨a_i, b_j⟩)_{ij}`.
    pub fn gram(&mut self, rows: &[SparseVec<TermKey>], cols: &[SparseVec<TermKey>]) -> Matrix {
        let keys: Vec<TermKey> = cols.iter().flat_map(|c| c.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (i, a) in rows.iter().enumerate() {
            // y = K·a restricted to the column keys
            let mut y: HashMap<TermKey, Rational> = HashMap::with_capacity(keys.len());
            for t in &keys {
                let mut acc = Rational::zero();
                for (s, cs) in a {
                    let kv = self.kernel(s, t);
                    if !kv.is_zero() {
                        acc += cs * kv;
                    }
                }
                y.insert(*t, acc);
            }
            for (j, b) in cols.iter().enumerate() {
                let mut acc = Rational::zero();
                for (t, ct) in b {
                    acc += &y[t] * ct;
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}
