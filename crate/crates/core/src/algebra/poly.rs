use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::context::Ctx;
use super::monomial::Monomial;
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a graded-lexicographic map with no zero coefficients, so
/// structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    ctx: Ctx,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(ctx: &Ctx) -> Self {
        MultiPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Ctx, c: Rational) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ctx.arity()), c);
        }
        p
    }

    pub fn from_int(ctx: &Ctx, c: i64) -> Self {
        Self::constant(ctx, rat(c))
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn var(ctx: &Ctx, i: usize) -> Self {
        assert!(i < ctx.arity(), "variable index out of range");
        let mut p = Self::zero(ctx);
        p.terms.insert(Monomial::var(ctx.arity(), i), Rational::one());
        p
    }

    /// The deformation parameter `e` of a context that has one.
    pub fn e(ctx: &Ctx) -> Self {
        Self::var(ctx, ctx.e_index().expect("context has no `e`"))
    }

    pub fn monomial(ctx: &Ctx, exps: &[u32], c: Rational) -> Self {
        assert_eq!(exps.len(), ctx.arity());
        Self::from_terms(ctx, [(Monomial::from_exps(exps), c)])
    }

    pub fn from_terms<I>(ctx: &Ctx, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            assert_eq!(m.arity(), ctx.arity());
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.ctx.arity()))
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Greatest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Maximal total degree, or −1 for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms.keys().next_back().map_or(-1, |m| m.degree() as i64)
    }

    /// Degree in the space variables only, treating `e` as a coefficient.
    pub fn space_degree(&self) -> i64 {
        let n = self.ctx.space_dim();
        self.terms
            .keys()
            .map(|m| m.exps()[..n].iter().sum::<u32>() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn degree_in(&self, var: usize) -> i64 {
        self.terms.keys().map(|m| m.exps()[var] as i64).max().unwrap_or(-1)
    }

    fn check_ctx(&self, other: &MultiPoly) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ctx(other)?;
        let mut out = MultiPoly::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ctx);
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.ctx);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> MultiPoly {
        assert!(var < self.ctx.arity(), "variable index out of range");
        let mut out = MultiPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            let a = m.exps()[var];
            if a == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.exps_mut()[var] -= 1;
            out.add_term(dm, c * rat(a as i64));
        }
        out
    }

    /// Exact value at a point with one coordinate per context variable.
    pub fn eval(&self, pt: &[Rational]) -> Rational {
        assert_eq!(pt.len(), self.ctx.arity(), "point length must match context");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &a) in pt.iter().zip(m.exps()) {
                if a > 0 {
                    t *= num_traits::pow(x.clone(), a as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Sets variable `var` to `value`; the context is unchanged.
    pub fn substitute(&self, var: usize, value: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            let a = m.exps()[var];
            let mut nm = m.clone();
            nm.exps_mut()[var] = 0;
            let v = if a == 0 {
                c.clone()
            } else {
                c * num_traits::pow(value.clone(), a as usize)
            };
            out.add_term(nm, v);
        }
        out
    }

    /// Substitutes `images[i]` for variable `i`; all images share a target context.
    pub fn compose(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.ctx.arity() {
            return Err(Error::ShapeMismatch(format!(
                "compose needs {} images, got {}",
                self.ctx.arity(),
                images.len()
            )));
        }
        let target = match images.first() {
            Some(p) => p.ctx.clone(),
            None => {
                return Ok(self.clone());
            }
        };
        for p in images {
            if p.ctx != target {
                return Err(Error::ContextMismatch);
            }
        }
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(&target), p.clone()])
            .collect();
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &a) in m.exps().iter().enumerate() {
                if a == 0 {
                    continue;
                }
                while powers[i].len() <= a as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][a as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// `p(x + shift)`.
    pub fn translate(&self, shift: &[Rational]) -> MultiPoly {
        assert_eq!(shift.len(), self.ctx.arity());
        let images: Vec<MultiPoly> = (0..self.ctx.arity())
            .map(|i| &MultiPoly::var(&self.ctx, i) + &MultiPoly::constant(&self.ctx, shift[i].clone()))
            .collect();
        self.compose(&images).expect("same context")
    }

    /// Re-expresses the polynomial in `target`, sending variable `i` to `map[i]`.
    pub fn embed(&self, target: &Ctx, map: &[usize]) -> MultiPoly {
        assert_eq!(map.len(), self.ctx.arity());
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(target.arity());
            for (i, &a) in m.exps().iter().enumerate() {
                nm.exps_mut()[map[i]] += a;
            }
            out.add_term(nm, c.clone());
        }
        out
    }

    /// The same polynomial in the context extended by `e` (no `e` dependence).
    pub fn lift_e(&self) -> MultiPoly {
        if self.ctx.has_e() {
            return self.clone();
        }
        let target = self.ctx.extend_e();
        let map: Vec<usize> = (0..self.ctx.arity()).collect();
        self.embed(&target, &map)
    }

    /// Sets `e = 0` and drops it from the context.
    pub fn at_e_zero(&self) -> MultiPoly {
        let Some(ei) = self.ctx.e_index() else {
            return self.clone();
        };
        let target = self.ctx.strip_e();
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            if m.exps()[ei] == 0 {
                out.add_term(Monomial::from_exps(&m.exps()[..ei]), c.clone());
            }
        }
        out
    }

    /// Divides by the leading coefficient (graded-lex).
    pub fn monic(&self) -> MultiPoly {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Keeps the terms of total degree `< order`.
    pub fn truncate(&self, order: u32) -> MultiPoly {
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() < order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowest total degree of a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn max_abs_coeff_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().abs().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial context mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial context mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial context mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&rat(-1))
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::context::VarContext;

    fn xy() -> Ctx {
        VarContext::new(&["x", "y"]).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let c = xy();
        let x = MultiPoly::var(&c, 0);
        let one = MultiPoly::one(&c);
        let p = &(&x + &one) * &(&x - &one);
        assert_eq!(p, &x.pow(2) - &one);
    }

    #[test]
    fn additive_inverse_is_zero() {
        let c = xy();
        let x = MultiPoly::var(&c, 0);
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn cube_coefficient_from_repeated_multiplication() {
        let c = xy();
        let s = &MultiPoly::var(&c, 0) + &MultiPoly::var(&c, 1);
        let cube = &(&s * &s) * &s;
        assert_eq!(cube, s.pow(3));
        assert_eq!(cube.coeff(&Monomial::from_exps(&[1, 2])), rat(3));
    }

    #[test]
    fn degrees_and_sentinel() {
        let c = xy();
        let x = MultiPoly::var(&c, 0);
        let y = MultiPoly::var(&c, 1);
        assert_eq!((&(&x * &x) * &y + y.clone()).total_degree(), 3);
        assert_eq!(MultiPoly::from_int(&c, 4).total_degree(), 0);
        assert_eq!(MultiPoly::zero(&c).total_degree(), -1);
    }

    #[test]
    fn power_rule_and_constants() {
        let c = xy();
        let x = MultiPoly::var(&c, 0);
        let y = MultiPoly::var(&c, 1);
        let p = &x.pow(2) * &y;
        assert_eq!(p.diff(0), (&x * &y).scale(&rat(2)));
        assert!(MultiPoly::from_int(&c, 7).diff(0).is_zero());
    }

    #[test]
    fn smoothing_term_derivative() {
        let c = VarContext::with_e(&["x"]).unwrap();
        let f = &MultiPoly::var(&c, 0) - &MultiPoly::e(&c).pow(3).scale(&rat(5));
        assert_eq!(f.diff(1), MultiPoly::e(&c).pow(2).scale(&rat(-15)));
    }

    #[test]
    fn evaluation() {
        let c = xy();
        let x = MultiPoly::var(&c, 0);
        let y = MultiPoly::var(&c, 1);
        assert_eq!((&x.pow(2) + &y).eval(&[rat(2), rat(1)]), rat(5));
        assert_eq!(MultiPoly::zero(&c).eval(&[rat(3), ratio(1, 2)]), rat(0));
        let c1 = VarContext::new(&["x"]).unwrap();
        let x = MultiPoly::var(&c1, 0);
        let r = &(&x - &MultiPoly::one(&c1)) * &(&x - &MultiPoly::from_int(&c1, 2));
        assert_eq!(r.eval(&[rat(1)]), rat(0));
    }

    #[test]
    fn translation_matches_evaluation() {
        let c = xy();
        let x = MultiPoly::var(&c, 0);
        let y = MultiPoly::var(&c, 1);
        let p = &(&x.pow(3) * &y) - &y.pow(2).scale(&ratio(2, 3));
        let s = [rat(2), ratio(-1, 5)];
        let t = p.translate(&s);
        let probe = [ratio(1, 7), rat(3)];
        let shifted = [&probe[0] + &s[0], &probe[1] + &s[1]];
        assert_eq!(t.eval(&probe), p.eval(&shifted));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = MultiPoly::var(&xy(), 0);
        let b = MultiPoly::var(&VarContext::new(&["u"]).unwrap(), 0);
        assert_eq!(a.checked_add(&b), Err(Error::ContextMismatch));
    }

    #[test]
    fn e_handling() {
        let c = VarContext::with_e(&["x"]).unwrap();
        let p = &(&MultiPoly::var(&c, 0) * &MultiPoly::e(&c)) + &MultiPoly::var(&c, 0).pow(2);
        assert_eq!(p.space_degree(), 2);
        let z = p.at_e_zero();
        assert_eq!(z.ctx().arity(), 1);
        assert_eq!(z, MultiPoly::var(z.ctx(), 0).pow(2));
    }
}
