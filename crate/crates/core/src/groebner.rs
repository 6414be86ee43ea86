//! A small Buchberger engine over the rationals: reduced bases, unit-ideal
//! tests, saturation and radical membership.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{Ctx, Monomial, MultiPoly, Rational, VarContext};
use crate::error::{Error, Result};

/// Default S-pair budget for desk-scale problems.
pub const DEFAULT_BUDGET: usize = 4000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    ctx: Ctx,
    polys: Vec<MultiPoly>,
}

impl PolySystem {
    pub fn new(ctx: &Ctx, polys: Vec<MultiPoly>) -> Result<Self> {
        if polys.iter().any(|p| p.ctx() != ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(PolySystem {
            ctx: ctx.clone(),
            polys,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn push(&mut self, p: MultiPoly) -> Result<()> {
        if p.ctx() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        self.polys.push(p);
        Ok(())
    }

    pub fn with(&self, extra: &[MultiPoly]) -> Result<PolySystem> {
        let mut out = self.clone();
        for p in extra {
            out.push(p.clone())?;
        }
        Ok(out)
    }

    /// True when the system is `{1}` (after dropping zeros), up to scaling.
    pub fn is_unit(&self) -> bool {
        let nz: Vec<&MultiPoly> = self.polys.iter().filter(|p| !p.is_zero()).collect();
        nz.len() == 1 && nz[0].is_constant()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    GrevLex,
    Lex,
    /// Eliminates the first `split` variables: grevlex on them, ties broken by
    /// grevlex on the rest.
    Block(usize),
}

impl MonomialOrder {
    fn key(self, m: &Monomial) -> Vec<i64> {
        let e = m.exps();
        match self {
            MonomialOrder::Lex => e.iter().map(|&a| a as i64).collect(),
            MonomialOrder::GrevLex => grevlex_key(e),
            MonomialOrder::Block(s) => {
                let s = s.min(e.len());
                let mut k = grevlex_key(&e[..s]);
                k.extend(grevlex_key(&e[s..]));
                k
            }
        }
    }
}

fn grevlex_key(e: &[u32]) -> Vec<i64> {
    let mut k = Vec::with_capacity(e.len() + 1);
    k.push(e.iter().map(|&a| a as i64).sum());
    k.extend(e.iter().rev().map(|&a| -(a as i64)));
    k
}

/// A polynomial with terms keyed by a fixed monomial order.
#[derive(Clone)]
struct OPoly {
    terms: BTreeMap<Vec<i64>, (Monomial, Rational)>,
}

impl OPoly {
    fn from_poly(p: &MultiPoly, ord: MonomialOrder) -> Self {
        OPoly {
            terms: p.terms().map(|(m, c)| (ord.key(m), (m.clone(), c.clone()))).collect(),
        }
    }

    fn to_poly(&self, ctx: &Ctx) -> MultiPoly {
        MultiPoly::from_terms(ctx, self.terms.values().cloned())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lead(&self) -> &(Monomial, Rational) {
        self.terms.values().next_back().expect("nonzero polynomial")
    }

    fn add_scaled(&mut self, g: &OPoly, c: &Rational, shift: &Monomial, ord: MonomialOrder) {
        for (m, a) in g.terms.values() {
            let nm = m.mul(shift);
            let k = ord.key(&nm);
            let v = a * c;
            match self.terms.entry(k) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert((nm, v));
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = &e.get().1 + &v;
                    if s.is_zero() {
                        e.remove();
                    } else {
                        e.get_mut().1 = s;
                    }
                }
            }
        }
    }

    fn make_monic(&mut self) {
        if self.is_zero() {
            return;
        }
        let inv = self.lead().1.recip();
        for (_, c) in self.terms.values_mut() {
            *c *= &inv;
        }
    }
}

/// Full reduction of `p` modulo `basis`.
fn reduce_full(p: &OPoly, basis: &[OPoly], ord: MonomialOrder) -> OPoly {
    let mut rest = p.clone();
    let mut rem = OPoly { terms: BTreeMap::new() };
    while let Some((k, (m, c))) = rest.terms.pop_last() {
        let div = basis.iter().find(|g| g.lead().0.divides(&m));
        match div {
            Some(g) => {
                let (lm, lc) = g.lead();
                let shift = lm.quotient(&m);
                let factor = -(&c / lc);
                let mut tail = g.clone();
                tail.terms.pop_last();
                rest.add_scaled(&tail, &factor, &shift, ord);
            }
            None => {
                rem.terms.insert(k, (m, c));
            }
        }
    }
    rem
}

fn s_poly(a: &OPoly, b: &OPoly, ord: MonomialOrder) -> OPoly {
    let (ma, ca) = a.lead();
    let (mb, cb) = b.lead();
    let l = ma.lcm(mb);
    let mut out = OPoly { terms: BTreeMap::new() };
    out.add_scaled(a, &ca.recip(), &ma.quotient(&l), ord);
    out.add_scaled(b, &-cb.recip(), &mb.quotient(&l), ord);
    out
}

/// Reduced Gröbner basis, monic, sorted by increasing leading monomial.
pub fn buchberger(sys: &PolySystem, order: MonomialOrder, budget: usize) -> Result<PolySystem> {
    if budget == 0 {
        return Err(Error::BudgetExceeded { budget });
    }
    let ctx = sys.ctx.clone();
    let mut basis: Vec<OPoly> = Vec::new();
    for p in sys.polys.iter().filter(|p| !p.is_zero()) {
        let mut op = OPoly::from_poly(p, order);
        op = reduce_full(&op, &basis, order);
        if op.is_zero() {
            continue;
        }
        op.make_monic();
        basis.push(op);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut processed = 0usize;
    while !pairs.is_empty() {
        if basis.iter().any(|g| g.lead().0.is_one()) {
            break;
        }
        // Normal strategy: smallest lcm first.
        let (idx, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = order.key(&basis[a.0].lead().0.lcm(&basis[a.1].lead().0));
                let lb = order.key(&basis[b.0].lead().0.lcm(&basis[b.1].lead().0));
                la.cmp(&lb).then(a.cmp(b))
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(idx);
        let (li, lj) = (&basis[i].lead().0, &basis[j].lead().0);
        if li.is_coprime(lj) {
            continue;
        }
        let l = li.lcm(lj);
        // Chain criterion: skip when some other leading monomial divides the lcm
        // and both its pairs have already been treated.
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lead().0.divides(&l)
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        processed += 1;
        if processed > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut h = reduce_full(&s_poly(&basis[i], &basis[j], order), &basis, order);
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        let n = basis.len();
        basis.push(h);
        for k in 0..n {
            pairs.push((k, n));
        }
    }
    Ok(PolySystem {
        ctx: ctx.clone(),
        polys: interreduce(basis, order).iter().map(|g| g.to_poly(&ctx)).collect(),
    })
}

fn interreduce(basis: Vec<OPoly>, order: MonomialOrder) -> Vec<OPoly> {
    if let Some(unit) = basis.iter().find(|g| g.lead().0.is_one()) {
        return vec![unit.clone()];
    }
    let mut minimal: Vec<OPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let lm = &g.lead().0;
        let redundant = basis
            .iter()
            .enumerate()
            .any(|(j, h)| j != i && h.lead().0.divides(lm) && (h.lead().0 != *lm || j < i));
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<OPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let mut r = reduce_full(&minimal[i], &others, order);
        r.make_monic();
        out.push(r);
    }
    out.sort_by_key(|g| order.key(&g.lead().0));
    out
}

/// Remainder of `p` modulo a Gröbner basis computed for `order`.
pub fn reduce(p: &MultiPoly, basis: &PolySystem, order: MonomialOrder) -> MultiPoly {
    let gs: Vec<OPoly> = basis.polys.iter().map(|g| OPoly::from_poly(g, order)).collect();
    reduce_full(&OPoly::from_poly(p, order), &gs, order).to_poly(p.ctx())
}

pub fn is_unit_ideal(sys: &PolySystem, budget: usize) -> Result<bool> {
    Ok(buchberger(sys, MonomialOrder::GrevLex, budget)?.is_unit())
}

/// `sys` in a context with one fresh variable prepended, for elimination.
fn with_fresh_var(sys: &PolySystem) -> (Ctx, Vec<MultiPoly>) {
    let ctx = &sys.ctx;
    let mut k = 0;
    let fresh = loop {
        let name = format!("t{k}");
        if ctx.index_of(&name).is_none() {
            break name;
        }
        k += 1;
    };
    let mut names = vec![fresh];
    names.extend(ctx.space_names().iter().cloned());
    let big = if ctx.has_e() {
        VarContext::with_e(&names)
    } else {
        VarContext::new(&names)
    }
    .expect("fresh variable keeps names valid");
    let map: Vec<usize> = (1..=ctx.arity()).collect();
    let polys = sys.polys.iter().map(|p| p.embed(&big, &map)).collect();
    (big, polys)
}

/// Generators of the saturation `(I : h^∞)`, by eliminating `t` from `I + (t·h − 1)`.
pub fn saturate_by(sys: &PolySystem, h: &MultiPoly, budget: usize) -> Result<PolySystem> {
    if h.is_zero() {
        return Err(Error::InvalidInput("saturation by the zero polynomial".into()));
    }
    if h.ctx() != &sys.ctx {
        return Err(Error::ContextMismatch);
    }
    let (big, mut polys) = with_fresh_var(sys);
    let map: Vec<usize> = (1..=sys.ctx.arity()).collect();
    let t = MultiPoly::var(&big, 0);
    polys.push(&(&t * &h.embed(&big, &map)) - &MultiPoly::one(&big));
    let basis = buchberger(&PolySystem::new(&big, polys)?, MonomialOrder::Block(1), budget)?;
    let back: Vec<MultiPoly> = basis
        .polys
        .iter()
        .filter(|g| g.degree_in(0) <= 0)
        .map(|g| {
            let images: Vec<MultiPoly> = std::iter::once(MultiPoly::zero(&sys.ctx))
                .chain((0..sys.ctx.arity()).map(|i| MultiPoly::var(&sys.ctx, i)))
                .collect();
            g.compose(&images).expect("matching arity")
        })
        .collect();
    PolySystem::new(&sys.ctx, back)
}

/// The flat part of a family over the `e`-line: saturation by `e`.
pub fn flat_part(family: &PolySystem, budget: usize) -> Result<PolySystem> {
    let Some(ei) = family.ctx.e_index() else {
        return Err(Error::ShapeMismatch("flat_part needs a family in (x, e)".into()));
    };
    saturate_by(family, &MultiPoly::var(&family.ctx, ei), budget)
}

/// Whether `h` vanishes on the zero set of `sys` over ℂ (Rabinowitsch trick).
pub fn in_radical(h: &MultiPoly, sys: &PolySystem, budget: usize) -> Result<bool> {
    if h.ctx() != &sys.ctx {
        return Err(Error::ContextMismatch);
    }
    let (big, mut polys) = with_fresh_var(sys);
    let map: Vec<usize> = (1..=sys.ctx.arity()).collect();
    let t = MultiPoly::var(&big, 0);
    polys.push(&MultiPoly::one(&big) - &(&t * &h.embed(&big, &map)));
    is_unit_ideal(&PolySystem::new(&big, polys)?, budget)
}

/// Checks the Buchberger criterion: every S-polynomial reduces to zero.
pub fn is_groebner(basis: &PolySystem, order: MonomialOrder) -> bool {
    let gs: Vec<OPoly> = basis
        .polys
        .iter()
        .filter(|p| !p.is_zero())
        .map(|g| OPoly::from_poly(g, order))
        .collect();
    for j in 0..gs.len() {
        for i in 0..j {
            if !reduce_full(&s_poly(&gs[i], &gs[j], order), &gs, order).is_zero() {
                return false;
            }
        }
    }
    true
}

/// The constant 1, used to report empty varieties.
pub fn unit_system(ctx: &Ctx) -> PolySystem {
    PolySystem {
        ctx: ctx.clone(),
        polys: vec![MultiPoly::one(ctx)],
    }
}

/// Dimension of the zero set, read off the leading monomials of a graded
/// reverse-lex basis; `None` for the empty set.
pub fn affine_dimension(sys: &PolySystem, budget: usize) -> Result<Option<usize>> {
    let basis = buchberger(sys, MonomialOrder::GrevLex, budget)?;
    if basis.is_unit() {
        return Ok(None);
    }
    let n = sys.ctx.arity();
    let leads: Vec<u32> = basis
        .polys
        .iter()
        .map(|p| {
            let o = OPoly::from_poly(p, MonomialOrder::GrevLex);
            o.lead()
                .0
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .fold(0, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    // The largest set of variables that contains no leading monomial.
    Ok((0u32..1 << n)
        .filter(|mask| leads.iter().all(|l| l & !mask != 0))
        .map(|mask| mask.count_ones() as usize)
        .max())
}

impl PolySystem {
    /// Whether every generator vanishes at `pt`.
    pub fn vanishes_at(&self, pt: &[Rational]) -> bool {
        self.polys.iter().all(|p| p.eval(pt).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn sys(ctx: &Ctx, ps: &[&str]) -> PolySystem {
        PolySystem::new(ctx, ps.iter().map(|s| parse_poly(s, ctx).unwrap()).collect()).unwrap()
    }

    fn strings(s: &PolySystem) -> Vec<String> {
        s.polys().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn basic_bases() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let g = buchberger(&sys(&c, &["x^2", "x"]), MonomialOrder::GrevLex, 100).unwrap();
        assert_eq!(strings(&g), vec!["x"]);
        let g = buchberger(&sys(&c, &["x", "1 - x"]), MonomialOrder::GrevLex, 100).unwrap();
        assert!(g.is_unit());
        let g = buchberger(&sys(&c, &[]), MonomialOrder::GrevLex, 100).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn unit_ideal_tests() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        assert!(is_unit_ideal(&sys(&c, &["x", "y", "x + y - 1"]), 100).unwrap());
        assert!(!is_unit_ideal(&sys(&c, &["x"]), 100).unwrap());
        assert!(!is_unit_ideal(&sys(&c, &["x^2 + 1"]), 100).unwrap());
    }

    #[test]
    fn saturation_examples() {
        let c = VarContext::with_e(&["x"]).unwrap();
        let e = MultiPoly::e(&c);
        assert_eq!(strings(&saturate_by(&sys(&c, &["e*x"]), &e, 100).unwrap()), vec!["x"]);
        assert!(saturate_by(&sys(&c, &["e"]), &e, 100).unwrap().is_unit());
        let c2 = VarContext::new(&["x", "y"]).unwrap();
        let y = MultiPoly::var(&c2, 1);
        assert_eq!(strings(&saturate_by(&sys(&c2, &["x"]), &y, 100).unwrap()), vec!["x"]);
    }

    #[test]
    fn flat_parts() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let g = flat_part(&sys(&c, &["e*(y - x)"]), 100).unwrap();
        assert_eq!(g.len(), 1);
        assert!(reduce(&parse_poly("y - x", &c).unwrap(), &g, MonomialOrder::GrevLex).is_zero());
        let g = flat_part(&sys(&c, &["x - e"]), 100).unwrap();
        assert_eq!(g.len(), 1);
        assert!(reduce(&parse_poly("x - e", &c).unwrap(), &g, MonomialOrder::GrevLex).is_zero());
        assert!(flat_part(&sys(&c, &["e^2"]), 100).unwrap().is_unit());
    }

    #[test]
    fn budget_is_enforced() {
        let c = VarContext::new(&["x", "y", "z"]).unwrap();
        let s = sys(&c, &["x^3 - y*z + 1", "y^3 - x*z^2", "z^3 - x^2*y + 2"]);
        assert_eq!(
            buchberger(&s, MonomialOrder::Lex, 1),
            Err(Error::BudgetExceeded { budget: 1 })
        );
    }

    #[test]
    fn radical_membership() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let s = sys(&c, &["x^2", "y"]);
        assert!(in_radical(&MultiPoly::var(&c, 0), &s, 100).unwrap());
        assert!(!in_radical(&parse_poly("x + 1", &c).unwrap(), &s, 100).unwrap());
    }

    #[test]
    fn lex_elimination() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let g = buchberger(&sys(&c, &["x - y^2", "x*y - 1"]), MonomialOrder::Lex, 100).unwrap();
        assert!(is_groebner(&g, MonomialOrder::Lex));
        assert!(g
            .polys()
            .iter()
            .any(|p| p.degree_in(0) <= 0 && p == &parse_poly("y^3 - 1", &c).unwrap()));
    }

    #[test]
    fn dimensions() {
        let c = VarContext::new(&["x", "y", "z"]).unwrap();
        assert_eq!(affine_dimension(&sys(&c, &["x*y"]), 100).unwrap(), Some(2));
        assert_eq!(affine_dimension(&sys(&c, &["x*y", "z"]), 100).unwrap(), Some(1));
        assert_eq!(
            affine_dimension(&sys(&c, &["x^2", "y - 1", "z"]), 100).unwrap(),
            Some(0)
        );
        assert_eq!(affine_dimension(&sys(&c, &["x", "x - 1"]), 100).unwrap(), None);
        assert_eq!(affine_dimension(&sys(&c, &[]), 100).unwrap(), Some(3));
    }
}
