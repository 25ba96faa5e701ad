//! Finite linear combinations of Dirac-delta derivatives δ^(m).

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Σ_m c_m·δ^(m), stored sparsely by derivative order.
///
/// Canonical form: no zero coefficients; the empty map is the zero element.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaComb<S: Scalar> {
    terms: BTreeMap<u32, S>,
}

impl<S: Scalar> DeltaComb<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    /// c·δ^(m)
    pub fn single(order: u32, coeff: S) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(order, coeff);
        }
        Self { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (u32, S)>) -> Self {
        let mut comb = Self::zero();
        for (order, coeff) in pairs {
            comb.accumulate(order, coeff);
        }
        comb
    }

    fn accumulate(&mut self, order: u32, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&order) {
            Some(existing) => {
                let sum = existing.clone() + coeff;
                if sum.is_zero() {
                    self.terms.remove(&order);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(order, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, order: u32) -> S {
        self.terms.get(&order).cloned().unwrap_or_else(S::zero)
    }

    /// Term iteration in ascending derivative order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &S)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.accumulate(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.accumulate(m, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms().map(|(m, q)| (m, q.clone() * c.clone())))
    }

    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        self.sub(other)
            .terms
            .values()
            .map(Scalar::abs_f64)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type D = DeltaComb<Complex64>;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_no_zero_terms() {
        let d = D::from_terms([(0, c(1.0)), (2, c(0.0))]);
        assert_eq!(d.terms().count(), 1);
        let cancelled = d.sub(&D::single(0, c(1.0)));
        assert!(cancelled.is_zero());
    }

    #[test]
    fn sparse_orders_distinct() {
        let d = D::from_terms([(3, c(1.0)), (3, c(2.0)), (1, c(-1.0))]);
        assert_eq!(d.coeff(3), c(3.0));
        assert_eq!(d.coeff(1), c(-1.0));
        assert_eq!(d.max_order(), Some(3));
    }
}
