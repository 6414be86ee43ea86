//! Exterior algebra with polynomial coefficients.
//!
//! Forms of rank `r` are stored as maps from strictly increasing index sets to
//! nonzero coefficients. A wedge whose rank exceeds the number of variables is
//! the zero form of that rank; [`ExteriorForm::is_overflow`] reports it.

use std::collections::BTreeMap;

use crate::algebra::{Ctx, MultiPoly, PointQ, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    ctx: Ctx,
    coeffs: Vec<MultiPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorForm {
    ctx: Ctx,
    rank: usize,
    terms: BTreeMap<Vec<usize>, MultiPoly>,
}

impl OneForm {
    pub fn new(ctx: &Ctx, coeffs: Vec<MultiPoly>) -> Result<Self> {
        if coeffs.len() != ctx.arity() {
            return Err(Error::ShapeMismatch(format!(
                "one-form needs {} coefficients, got {}",
                ctx.arity(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| c.ctx() != ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(OneForm {
            ctx: ctx.clone(),
            coeffs,
        })
    }

    /// A constant form `Σ a_i dx_i`.
    pub fn constant(ctx: &Ctx, a: &[Rational]) -> Result<Self> {
        Self::new(ctx, a.iter().map(|c| MultiPoly::constant(ctx, c.clone())).collect())
    }

    /// `dx_i`.
    pub fn basis(ctx: &Ctx, i: usize) -> Self {
        let coeffs = (0..ctx.arity())
            .map(|j| {
                if i == j {
                    MultiPoly::one(ctx)
                } else {
                    MultiPoly::zero(ctx)
                }
            })
            .collect();
        OneForm {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(MultiPoly::is_constant)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MultiPoly::is_zero)
    }

    /// Contraction with a vector field given by its components.
    pub fn apply(&self, field: &[MultiPoly]) -> MultiPoly {
        let mut acc = MultiPoly::zero(&self.ctx);
        for (a, v) in self.coeffs.iter().zip(field) {
            acc = &acc + &(a * v);
        }
        acc
    }

    pub fn eval(&self, pt: &[Rational]) -> Vec<Rational> {
        self.coeffs.iter().map(|c| c.eval(pt)).collect()
    }

    pub fn scale(&self, c: &MultiPoly) -> OneForm {
        OneForm {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &OneForm) -> Result<OneForm> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        Ok(OneForm {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// The same form in the context extended by `e`, with zero `de` component.
    pub fn lift_e(&self) -> OneForm {
        if self.ctx.has_e() {
            return self.clone();
        }
        let ctx = self.ctx.extend_e();
        let mut coeffs: Vec<MultiPoly> = self.coeffs.iter().map(MultiPoly::lift_e).collect();
        coeffs.push(MultiPoly::zero(&ctx));
        OneForm { ctx, coeffs }
    }

    pub fn to_exterior(&self) -> ExteriorForm {
        let mut terms = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![i], c.clone());
            }
        }
        ExteriorForm {
            ctx: self.ctx.clone(),
            rank: 1,
            terms,
        }
    }

    /// Maximal total degree of the coefficients (−1 for the zero form).
    pub fn degree(&self) -> i64 {
        form_degree(self)
    }
}

/// The differential of `f`, including the `de` component when `e` is present.
pub fn d_of(f: &MultiPoly) -> OneForm {
    let ctx = f.ctx().clone();
    let coeffs = (0..ctx.arity()).map(|i| f.diff(i)).collect();
    OneForm { ctx, coeffs }
}

pub fn form_degree(w: &OneForm) -> i64 {
    w.coeffs.iter().map(MultiPoly::total_degree).max().unwrap_or(-1)
}

impl ExteriorForm {
    pub fn zero(ctx: &Ctx, rank: usize) -> Self {
        ExteriorForm {
            ctx: ctx.clone(),
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// The constant 0-form `c`.
    pub fn scalar(c: MultiPoly) -> Self {
        let ctx = c.ctx().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        ExteriorForm { ctx, rank: 0, terms }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Rank exceeds the number of variables, so the form is necessarily zero.
    pub fn is_overflow(&self) -> bool {
        self.rank > self.ctx.arity()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, subset: &[usize]) -> MultiPoly {
        self.terms
            .get(subset)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&self.ctx))
    }

    fn add_term(&mut self, subset: Vec<usize>, c: MultiPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(subset) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn wedge(&self, other: &ExteriorForm) -> Result<ExteriorForm> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let mut out = ExteriorForm::zero(&self.ctx, self.rank + other.rank);
        if out.is_overflow() {
            return Ok(out);
        }
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                if let Some((sign, merged)) = merge_sorted(sa, sb) {
                    let c = ca * cb;
                    out.add_term(merged, if sign { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> ExteriorForm {
        let mut out = ExteriorForm::zero(&self.ctx, self.rank + 1);
        if out.is_overflow() {
            return out;
        }
        for (s, c) in &self.terms {
            for j in 0..self.ctx.arity() {
                let dc = c.diff(j);
                if dc.is_zero() {
                    continue;
                }
                if let Some((sign, merged)) = merge_sorted(&[j], s) {
                    out.add_term(merged, if sign { -dc } else { dc });
                }
            }
        }
        out
    }

    pub fn eval_is_zero(&self, pt: &[Rational]) -> bool {
        self.terms.values().all(|c| num_traits::Zero::is_zero(&c.eval(pt)))
    }
}

/// Merges two increasing index lists; `None` if they share an index, else the
/// sign (true = negative) of the sorting permutation and the merged list.
fn merge_sorted(a: &[usize], b: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return None,
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                inversions += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((inversions % 2 == 1, out))
}

/// All increasing `k`-subsets of `0..n`, in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Ordered wedge product of one-forms.
pub fn wedge(forms: &[OneForm]) -> Result<ExteriorForm> {
    let Some(first) = forms.first() else {
        return Err(Error::ShapeMismatch("wedge of an empty list".into()));
    };
    let mut acc = first.to_exterior();
    for w in &forms[1..] {
        acc = acc.wedge(&w.to_exterior())?;
    }
    Ok(acc)
}

/// Coefficient of `dx_1 ∧ ⋯ ∧ dx_N` in a top-rank form.
pub fn top_coefficient(w: &ExteriorForm) -> Result<MultiPoly> {
    let n = w.ctx.arity();
    if w.rank != n {
        return Err(Error::RankMismatch {
            expected: n,
            actual: w.rank,
        });
    }
    let all: Vec<usize> = (0..n).collect();
    Ok(w.coeff(&all))
}

/// The Rolle polynomial: top coefficient of
/// `d f̃_1 ∧ ⋯ ∧ d f̃_m ∧ ω_1 ∧ ⋯ ∧ ω_r ∧ dH_1 ∧ ⋯ ∧ dH_s ∧ (de + c·e·dH_j)`
/// in the `(x, e)` context. The form count must equal the number of variables.
pub fn g_form(
    ftilde: &[MultiPoly],
    omegas: &[OneForm],
    dhs: &[OneForm],
    dh_j: &OneForm,
    c: &Rational,
) -> Result<MultiPoly> {
    let ctx = dh_j.ctx().clone();
    let Some(ei) = ctx.e_index() else {
        return Err(Error::ShapeMismatch("g_form needs the (x, e) context".into()));
    };
    let expected = ctx.arity();
    let actual = ftilde.len() + omegas.len() + dhs.len() + 1;
    if actual != expected {
        return Err(Error::CountMismatch { expected, actual });
    }
    if dhs.iter().chain(std::iter::once(dh_j)).any(|h| !h.is_constant()) {
        return Err(Error::NonConstantForm);
    }
    let mut forms: Vec<OneForm> = Vec::with_capacity(expected);
    for f in ftilde {
        if f.ctx() != &ctx {
            return Err(Error::ContextMismatch);
        }
        forms.push(d_of(f));
    }
    forms.extend(omegas.iter().cloned());
    forms.extend(dhs.iter().cloned());
    let ce = MultiPoly::e(&ctx).scale(c);
    let last = OneForm::basis(&ctx, ei).add(&dh_j.scale(&ce))?;
    forms.push(last);
    if forms.iter().any(|w| w.ctx() != &ctx) {
        return Err(Error::ContextMismatch);
    }
    top_coefficient(&wedge(&forms)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct IntegrabilityReport {
    pub nonvanishing: bool,
    pub frobenius_chain: bool,
}

/// Nonvanishing of `ω_1 ∧ ⋯ ∧ ω_k` at `p` and the sufficient Frobenius chain
/// condition `dω_i ∧ ω_1 ∧ ⋯ ∧ ω_i ≡ 0` for every `i`.
pub fn integrability_check(omegas: &[OneForm], p: &PointQ) -> Result<IntegrabilityReport> {
    if omegas.is_empty() {
        return Ok(IntegrabilityReport {
            nonvanishing: true,
            frobenius_chain: true,
        });
    }
    let top = wedge(omegas)?;
    let nonvanishing = !top.is_overflow() && !top.eval_is_zero(p.coords());
    let mut frobenius_chain = true;
    for i in 0..omegas.len() {
        let prefix = wedge(&omegas[..=i])?;
        let dw = omegas[i].to_exterior().d();
        if !dw.wedge(&prefix)?.is_zero() {
            frobenius_chain = false;
            break;
        }
    }
    Ok(IntegrabilityReport {
        nonvanishing,
        frobenius_chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat, VarContext};

    fn form(ctx: &Ctx, coeffs: &[&str]) -> OneForm {
        OneForm::new(ctx, coeffs.iter().map(|s| parse_poly(s, ctx).unwrap()).collect()).unwrap()
    }

    #[test]
    fn differentials() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let w = d_of(&parse_poly("x^2 + y", &c).unwrap());
        assert_eq!(w, form(&c, &["2*x", "1"]));
        assert!(d_of(&parse_poly("5", &c).unwrap()).is_zero());
        let ce = VarContext::with_e(&["x"]).unwrap();
        let w = d_of(&parse_poly("x - e^2", &ce).unwrap());
        assert_eq!(w, form(&ce, &["1", "-2*e"]));
    }

    #[test]
    fn wedge_signs() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let dx = OneForm::basis(&c, 0);
        let dy = OneForm::basis(&c, 1);
        assert_eq!(
            wedge(&[dx.clone(), dy.clone()]).unwrap().coeff(&[0, 1]),
            MultiPoly::one(&c)
        );
        assert!(wedge(&[dx.clone(), dx.clone()]).unwrap().is_zero());
        let w = form(&c, &["-y", "1"]);
        assert_eq!(wedge(&[w, dx]).unwrap().coeff(&[0, 1]), parse_poly("-1", &c).unwrap());
    }

    #[test]
    fn form_degrees() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        assert_eq!(form_degree(&form(&c, &["-y", "1"])), 1);
        assert_eq!(form_degree(&form(&c, &["1", "2"])), 0);
        assert_eq!(form_degree(&form(&c, &["x^2*y", "x"])), 3);
    }

    #[test]
    fn top_coefficients() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let vol = wedge(&[OneForm::basis(&c, 0), OneForm::basis(&c, 1), OneForm::basis(&c, 2)]).unwrap();
        assert_eq!(top_coefficient(&vol).unwrap(), MultiPoly::one(&c));
        let two_dx = form(&c, &["2", "0", "0"]);
        let vol2 = wedge(&[two_dx, OneForm::basis(&c, 1), OneForm::basis(&c, 2)]).unwrap();
        assert_eq!(top_coefficient(&vol2).unwrap(), MultiPoly::from_int(&c, 2));
        let f = parse_poly("y - 1 - x", &c).unwrap();
        let w = form(&c, &["-y", "1", "0"]);
        let t = wedge(&[d_of(&f), w, OneForm::basis(&c, 2)]).unwrap();
        assert_eq!(top_coefficient(&t).unwrap(), parse_poly("y - 1", &c).unwrap());
        assert!(matches!(
            top_coefficient(&OneForm::basis(&c, 0).to_exterior()),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn rolle_polynomial_examples() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let w = form(&c, &["-y", "1", "0"]);
        let dh = OneForm::constant(&c, &[rat(3), rat(-2), rat(0)]).unwrap();
        let f = parse_poly("y - 1 - x", &c).unwrap();
        assert_eq!(
            g_form(&[f], std::slice::from_ref(&w), &[], &dh, &rat(0)).unwrap(),
            parse_poly("y - 1", &c).unwrap()
        );
        let k = parse_poly("7", &c).unwrap();
        assert!(g_form(&[k], &[w], &[], &dh, &rat(5)).unwrap().is_zero());
        let f = parse_poly("x", &c).unwrap();
        let dy = form(&c, &["0", "1", "0"]);
        assert_eq!(g_form(&[f], &[dy], &[], &dh, &rat(4)).unwrap(), MultiPoly::one(&c));
    }

    #[test]
    fn rolle_polynomial_errors() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let f = parse_poly("x", &c).unwrap();
        let dh = OneForm::constant(&c, &[rat(1), rat(1), rat(0)]).unwrap();
        assert!(matches!(
            g_form(std::slice::from_ref(&f), &[], &[], &dh, &rat(1)),
            Err(Error::CountMismatch { .. })
        ));
        let bad = form(&c, &["x", "1", "0"]);
        assert_eq!(g_form(&[f], &[], &[dh], &bad, &rat(1)), Err(Error::NonConstantForm));
    }

    #[test]
    fn integrability_examples() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let p = PointQ::from_ints(&[3, -2]);
        let r = integrability_check(&[form(&c, &["-y", "1"])], &p).unwrap();
        assert!(r.nonvanishing && r.frobenius_chain);
        let dx = OneForm::basis(&c, 0);
        let r = integrability_check(&[dx.clone(), dx], &p).unwrap();
        assert!(!r.nonvanishing);
        let c3 = VarContext::new(&["x", "y", "z"]).unwrap();
        let contact = form(&c3, &["z", "1", "0"]);
        let r = integrability_check(&[contact], &PointQ::origin(3)).unwrap();
        assert!(!r.frobenius_chain);
    }
}
