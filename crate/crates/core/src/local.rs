//! Local multiplicities through the local Hilbert function.
//!
//! For an ideal `I` vanishing at `p`, the dimension `h_o` of the order-`o`
//! Macaulay dual space equals `dim O_p / (I + m^{o+1})`. It is computed as the
//! number of monomials of degree `≤ o` minus the number of distinct initial
//! monomials (lowest degree first) of degree `≤ o` in the span of the shifted
//! generators `x^β f_i`. When `h_o = h_{o-1}` Nakayama's lemma gives
//! `m^o ⊆ I O_p`, so `h_o` is the multiplicity.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{monomials_of_degree, Monomial, MultiPoly, PointQ, Rational};
use crate::error::{Error, Result};
use crate::groebner::{flat_part, saturate_by, PolySystem, DEFAULT_BUDGET};

pub const DEFAULT_CAP: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultValue {
    Finite(u64),
    Infinite,
    CapExceeded,
}

impl MultValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            MultValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MultValue::Finite(_))
    }

    /// Sum, where `Infinite` absorbs everything and `CapExceeded` absorbs finite values.
    pub fn add(self, other: MultValue) -> MultValue {
        use MultValue::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (CapExceeded, _) | (_, CapExceeded) => CapExceeded,
            (Finite(a), Finite(b)) => Finite(a.saturating_add(b)),
        }
    }

    /// Minimum; a finite value beats any flag.
    pub fn min(self, other: MultValue) -> MultValue {
        use MultValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (Finite(a), _) | (_, Finite(a)) => Finite(a),
            (CapExceeded, _) | (_, CapExceeded) => CapExceeded,
            (Infinite, Infinite) => Infinite,
        }
    }

    /// `self ≤ other` where `Infinite` is larger than everything; `None` when a
    /// cap flag makes the comparison undecidable.
    pub fn le(self, other: MultValue) -> Option<bool> {
        use MultValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(a <= b),
            (_, Infinite) => Some(true),
            (Infinite, Finite(_)) => Some(false),
            _ => None,
        }
    }
}

impl std::fmt::Display for MultValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MultValue::Finite(v) => write!(f, "{v}"),
            MultValue::Infinite => f.write_str("infinite"),
            MultValue::CapExceeded => f.write_str("cap_exceeded"),
        }
    }
}

impl Serialize for MultValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MultValue::Finite(v) => s.serialize_u64(*v),
            MultValue::Infinite => s.serialize_str("infinite"),
            MultValue::CapExceeded => s.serialize_str("cap_exceeded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultResult {
    pub value: MultValue,
    pub stabilized_at: Option<u32>,
    pub cap: u32,
}

impl MultResult {
    pub fn finite(value: u64, stabilized_at: u32, cap: u32) -> Self {
        MultResult {
            value: MultValue::Finite(value),
            stabilized_at: Some(stabilized_at),
            cap,
        }
    }

    fn zero(cap: u32) -> Self {
        Self::finite(0, 0, cap)
    }

    fn flagged(value: MultValue, cap: u32) -> Self {
        MultResult {
            value,
            stabilized_at: None,
            cap,
        }
    }
}

impl Serialize for MultResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MultResult", 3)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("stabilized_at", &self.stabilized_at)?;
        st.serialize_field("cap", &self.cap)?;
        st.end()
    }
}

/// Local Hilbert function values `h_0..h_order` of the ideal generated by
/// `polys` (already translated so the point is the origin).
pub fn local_hilbert_function(polys: &[MultiPoly], arity: usize, order: u32) -> Vec<u64> {
    let mut pivots: BTreeMap<Monomial, BTreeMap<Monomial, Rational>> = BTreeMap::new();
    for s in 0..order {
        for beta in monomials_of_degree(arity, s) {
            for f in polys {
                let mut row: BTreeMap<Monomial, Rational> = BTreeMap::new();
                for (m, c) in f.terms() {
                    let nm = m.mul(&beta);
                    if nm.degree() <= order {
                        row.insert(nm, c.clone());
                    }
                }
                insert_row(&mut pivots, row);
            }
        }
    }
    let mut out = Vec::with_capacity(order as usize + 1);
    let mut monos = 0u64;
    for o in 0..=order {
        monos += monomials_of_degree(arity, o).len() as u64;
        let piv = pivots.keys().filter(|m| m.degree() <= o).count() as u64;
        out.push(monos - piv);
    }
    out
}

/// Semi-reduces `row` against the pivot rows (initial monomial = smallest) and
/// records it when a new initial monomial appears.
fn insert_row(pivots: &mut BTreeMap<Monomial, BTreeMap<Monomial, Rational>>, mut row: BTreeMap<Monomial, Rational>) {
    loop {
        let Some((m, c)) = row.iter().next().map(|(m, c)| (m.clone(), c.clone())) else {
            return;
        };
        match pivots.get(&m) {
            None => {
                let inv = c.recip();
                for v in row.values_mut() {
                    *v *= &inv;
                }
                pivots.insert(m, row);
                return;
            }
            Some(p) => {
                for (pm, pc) in p {
                    let t = &c * pc;
                    let entry = row.entry(pm.clone()).or_insert_with(Rational::zero);
                    *entry -= t;
                    if entry.is_zero() {
                        row.remove(pm);
                    }
                }
            }
        }
    }
}

/// Bezout-type bound on the multiplicity of an isolated zero: the product of
/// the `n` largest degrees.
fn bezout_bound(polys: &[MultiPoly], n: usize) -> u64 {
    let mut degs: Vec<u64> = polys
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.total_degree().max(0) as u64)
        .collect();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    degs.iter().take(n).fold(1u64, |acc, &d| acc.saturating_mul(d))
}

/// Past this Hilbert depth the point is tested for isolation before going deeper.
const ISOLATION_CHECK_DEPTH: u32 = 8;
const ISOLATION_BUDGET: usize = 1000;

/// `p` lies on a positive-dimensional component of `V(I)` iff it lies on
/// `V(I : (x_i − p_i)^∞)` for some `i`. `None` when a saturation runs out of
/// budget.
fn isolated(sys: &PolySystem, p: &PointQ) -> Option<bool> {
    let ctx = sys.ctx();
    for (i, c) in p.coords().iter().enumerate() {
        let h = &MultiPoly::var(ctx, i) - &MultiPoly::constant(ctx, c.clone());
        match saturate_by(sys, &h, ISOLATION_BUDGET) {
            Ok(sat) if sat.vanishes_at(p.coords()) => return Some(false),
            Ok(_) => {}
            Err(_) => return None,
        }
    }
    Some(true)
}

/// Intersection multiplicity of an x-only system at `p`.
pub fn local_multiplicity(sys: &PolySystem, p: &PointQ, cap: u32) -> Result<MultResult> {
    if cap < 1 {
        return Err(Error::InvalidCap);
    }
    let ctx = sys.ctx();
    let n = ctx.arity();
    if p.dim() != n {
        return Err(Error::ShapeMismatch(format!(
            "point has {} coordinates, context has {n} variables",
            p.dim()
        )));
    }
    if sys.len() < n {
        return Err(Error::UnderdeterminedSystem {
            equations: sys.len(),
            variables: n,
        });
    }
    if !sys.vanishes_at(p.coords()) {
        return Ok(MultResult::zero(cap));
    }
    let shifted: Vec<MultiPoly> = sys
        .polys()
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| f.translate(p.coords()))
        .collect();
    if shifted.len() < n {
        return Ok(MultResult::flagged(MultValue::Infinite, cap));
    }
    if n == 0 {
        return Ok(MultResult::finite(1, 0, cap));
    }
    let bezout = bezout_bound(&shifted, n);
    let mut depth = 2.min(cap);
    let mut checked = false;
    loop {
        let h = local_hilbert_function(&shifted, n, depth);
        for o in 1..=depth as usize {
            if h[o] > bezout {
                return Ok(MultResult::flagged(MultValue::Infinite, cap));
            }
            if h[o] == h[o - 1] {
                return Ok(MultResult::finite(h[o], o as u32, cap));
            }
        }
        if depth >= cap {
            return Ok(MultResult::flagged(MultValue::CapExceeded, cap));
        }
        if depth >= ISOLATION_CHECK_DEPTH && !checked {
            checked = true;
            if isolated(sys, p) == Some(false) {
                return Ok(MultResult::flagged(MultValue::Infinite, cap));
            }
        }
        depth = (depth * 2).min(cap);
    }
}

/// Number of solutions of the `ε`-fiber converging to `p`, counted with
/// multiplicity.
///
/// When `p` is isolated in the `e = 0` fiber this is the multiplicity of the
/// fiber itself. Otherwise the family is first replaced by its flat part.
pub fn deformation_multiplicity(family: &PolySystem, p: &PointQ, cap: u32) -> Result<MultResult> {
    deformation_multiplicity_checked(family, p, cap).map(|(r, _)| r)
}

/// [`deformation_multiplicity`] together with whether `p` was isolated in the
/// special fiber of the family or of its flat part. When it was not (the flat
/// part is the unit ideal, or both special fibers are positive-dimensional at
/// `p`), the count does not reflect a proper intersection.
pub(crate) fn deformation_multiplicity_checked(
    family: &PolySystem,
    p: &PointQ,
    cap: u32,
) -> Result<(MultResult, bool)> {
    let ctx = family.ctx();
    if !ctx.has_e() {
        return Err(Error::ShapeMismatch("deformation family needs the e variable".into()));
    }
    let n = ctx.space_dim();
    if p.dim() != n {
        return Err(Error::ShapeMismatch(format!(
            "point has {} coordinates, family has {n} space variables",
            p.dim()
        )));
    }
    if family.len() < n {
        return Err(Error::UnderdeterminedSystem {
            equations: family.len(),
            variables: n,
        });
    }
    let special = |fam: &PolySystem| -> Result<MultResult> {
        let x = ctx.strip_e();
        let polys: Vec<MultiPoly> = fam.polys().iter().map(MultiPoly::at_e_zero).collect();
        if polys.len() < n {
            return Ok(MultResult::flagged(MultValue::Infinite, cap));
        }
        local_multiplicity(&PolySystem::new(&x, polys)?, p, cap)
    };
    let first = special(family)?;
    if first.value.is_finite() {
        return Ok((first, true));
    }
    match flat_part(family, DEFAULT_BUDGET) {
        Ok(flat) => {
            if flat.is_unit() {
                return Ok((MultResult::zero(cap), false));
            }
            let second = special(&flat)?;
            Ok(if second.value.is_finite() {
                (second, true)
            } else {
                (first, false)
            })
        }
        Err(Error::BudgetExceeded { .. }) => Ok((first, false)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, Ctx, VarContext};

    fn sys(ctx: &Ctx, ps: &[&str]) -> PolySystem {
        PolySystem::new(ctx, ps.iter().map(|s| parse_poly(s, ctx).unwrap()).collect()).unwrap()
    }

    fn value(r: Result<MultResult>) -> MultValue {
        r.unwrap().value
    }

    #[test]
    fn dual_space_examples() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let o = PointQ::origin(2);
        assert_eq!(
            value(local_multiplicity(&sys(&c, &["x", "y"]), &o, 64)),
            MultValue::Finite(1)
        );
        assert_eq!(
            value(local_multiplicity(&sys(&c, &["x^2", "y^3"]), &o, 64)),
            MultValue::Finite(6)
        );
        assert_eq!(
            value(local_multiplicity(
                &sys(&c, &["x^2 - 1", "y - 1"]),
                &PointQ::from_ints(&[1, 1]),
                64
            )),
            MultValue::Finite(1)
        );
        assert_eq!(
            value(local_multiplicity(&sys(&c, &["x^2 + y^3", "y^2"]), &o, 64)),
            MultValue::Finite(4)
        );
    }

    #[test]
    fn shape_and_flags() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let o = PointQ::origin(2);
        assert_eq!(
            local_multiplicity(&sys(&c, &["x^2 + y^2 - 2"]), &o, 64),
            Err(Error::UnderdeterminedSystem {
                equations: 1,
                variables: 2
            })
        );
        assert_eq!(local_multiplicity(&sys(&c, &["x", "y"]), &o, 0), Err(Error::InvalidCap));
        assert_eq!(
            value(local_multiplicity(&sys(&c, &["x + 1", "y"]), &o, 64)),
            MultValue::Finite(0)
        );
        assert_eq!(
            value(local_multiplicity(&sys(&c, &["x*y", "x^2"]), &o, 64)),
            MultValue::Infinite
        );
        let r = local_multiplicity(&sys(&c, &["x^20", "y^20"]), &o, 10).unwrap();
        assert_eq!(r.value, MultValue::CapExceeded);
    }

    #[test]
    fn curve_germ_is_caught_early() {
        // Both higher generators are divisible by x1, so {x1 = 0, first = 0}
        // is a curve through the origin; the Bezout test alone needs order 25.
        let c = VarContext::new(&["x1", "x2", "x3"]).unwrap();
        let s = sys(
            &c,
            &[
                "-5*x1^2 + 6*x2*x3 + 2*x3^2 + 6*x1 + 2*x2 - 2*x3",
                "-48*x1*x2^2 - 32*x1*x2*x3 - 32*x1*x3^2 - 88*x1*x2 - 16*x1*x3 + 56*x1",
                "2304*x1^2*x2^2 + 1536*x1^2*x2*x3 - 1024*x1^2*x3^2 + 1088*x1^2*x2 + 256*x1^2*x3 - 832*x1^2",
            ],
        );
        let t = std::time::Instant::now();
        assert_eq!(
            value(local_multiplicity(&s, &PointQ::origin(3), 64)),
            MultValue::Infinite
        );
        assert!(t.elapsed().as_secs() < 10);
        let iso = sys(&c, &["x1^9", "x2^9", "x3"]);
        assert_eq!(
            value(local_multiplicity(&iso, &PointQ::origin(3), 64)),
            MultValue::Finite(81)
        );
    }

    #[test]
    fn hilbert_function_of_monomial_ideal() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let s = sys(&c, &["x^2", "y^3"]);
        assert_eq!(local_hilbert_function(s.polys(), 2, 4), vec![1, 3, 5, 6, 6]);
    }

    #[test]
    fn deformation_examples() {
        let c = VarContext::with_e(&["x"]).unwrap();
        let o = PointQ::origin(1);
        assert_eq!(
            value(deformation_multiplicity(&sys(&c, &["x^2 - e"]), &o, 64)),
            MultValue::Finite(2)
        );
        assert_eq!(
            value(deformation_multiplicity(&sys(&c, &["x - e"]), &o, 64)),
            MultValue::Finite(1)
        );
        assert_eq!(
            value(deformation_multiplicity(&sys(&c, &["x^2 - e^2"]), &o, 64)),
            MultValue::Finite(2)
        );
    }

    #[test]
    fn deformation_uses_flat_part() {
        // e*x*(x - e) has the spurious component e = 0; the flat part is x(x - e).
        let c = VarContext::with_e(&["x"]).unwrap();
        let r = deformation_multiplicity(&sys(&c, &["e*x*(x - e)"]), &PointQ::origin(1), 64).unwrap();
        assert_eq!(r.value, MultValue::Finite(2));
    }

    #[test]
    fn serialization() {
        let r = MultResult::finite(3, 2, 64);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"value":3,"stabilized_at":2,"cap":64}"#
        );
        let r = MultResult::flagged(MultValue::Infinite, 8);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"value":"infinite","stabilized_at":null,"cap":8}"#
        );
    }
}
