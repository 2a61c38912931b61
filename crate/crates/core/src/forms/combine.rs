use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{PolyForm, TermKey};
use crate::rational::Rational;

/// A family of forms with denominators cleared, so that many linear
/// combinations of it can be taken with integer arithmetic only.
#[derive(Debug, Clone)]
pub struct IntegerForms {
    n: usize,
    k: usize,
    /// `forms[j] = terms[j] / scale[j]`.
    scale: Vec<BigInt>,
    terms: Vec<Vec<(TermKey, BigInt)>>,
}

impl IntegerForms {
    pub fn new(n: usize, k: usize, forms: &[PolyForm]) -> Self {
        let mut scale = Vec::with_capacity(forms.len());
        let mut terms = Vec::with_capacity(forms.len());
        for f in forms {
            assert_eq!((f.n(), f.k()), (n, k), "forms of different type");
            let l = f.terms().fold(BigInt::one(), |l, (_, c)| l.lcm(&c.denom()));
            terms.push(f.terms().map(|(key, c)| (*key, c.numer() * (&l / c.denom()))).collect());
            scale.push(l);
        }
        IntegerForms { n, k, scale, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_j c_j · forms[j]`.
    pub fn combine(&self, coeffs: &[Rational]) -> PolyForm {
        assert_eq!(coeffs.len(), self.len(), "one coefficient per form");
        // c_j / scale_j = a_j / den with integers a_j
        let used: Vec<usize> = (0..self.len()).filter(|&j| !coeffs[j].is_zero()).collect();
        let den = used.iter().fold(BigInt::one(), |l, &j| l.lcm(&(coeffs[j].denom() * &self.scale[j])));
        let mut acc: BTreeMap<TermKey, BigInt> = BTreeMap::new();
        for &j in &used {
            let a = coeffs[j].numer() * (&den / (coeffs[j].denom() * &self.scale[j]));
            for (key, x) in &self.terms[j] {
                *acc.entry(*key).or_insert_with(BigInt::zero) += &a * x;
            }
        }
        PolyForm::from_terms(
            self.n,
            self.k,
            acc.into_iter().filter(|(_, x)| !x.is_zero()).map(|(key, x)| (key, Rational::from_ratio(x, den.clone()))),
        )
    }
}
