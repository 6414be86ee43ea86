use std::cmp::Ordering;

use smallvec::SmallVec;

/// Exponent vector. Ordered graded-lexicographically: total degree first, then
/// the exponent of the earliest variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut m = Self::one(arity);
        m.0[i] = 1;
        m
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exps_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors in `arity` variables of total degree exactly `deg`.
pub fn monomials_of_degree(arity: usize, deg: u32) -> Vec<Monomial> {
    fn rec(arity: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() + 1 == arity {
            cur.push(left);
            out.push(Monomial::from_exps(cur));
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            rec(arity, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if arity == 0 {
        if deg == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(arity, deg, &mut Vec::with_capacity(arity), &mut out);
    out
}
