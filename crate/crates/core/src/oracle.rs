//! Independent computations of the quantities that multiplicity cycles bound:
//! vanishing orders along vector fields, truncated leaves of integrable
//! Pfaffian systems, leaf intersection multiplicities and Milnor numbers.

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{Ctx, MultiPoly, PointQ, Rational, TruncatedSeries, VarContext};
use crate::error::{Error, Result};
use crate::forms::{integrability_check, k_subsets, OneForm};
use crate::groebner::{buchberger, reduce, MonomialOrder, PolySystem};
use crate::linalg::{self, Matrix};
use crate::local::{deformation_multiplicity, local_multiplicity, MultResult, MultValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    ctx: Ctx,
    comps: Vec<MultiPoly>,
}

impl VectorField {
    pub fn new(ctx: &Ctx, comps: Vec<MultiPoly>) -> Result<Self> {
        if ctx.has_e() {
            return Err(Error::ShapeMismatch("vector fields live in x-space".into()));
        }
        if comps.len() != ctx.arity() {
            return Err(Error::ShapeMismatch(format!(
                "vector field needs {} components, got {}",
                ctx.arity(),
                comps.len()
            )));
        }
        if comps.iter().any(|c| c.ctx() != ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(VectorField {
            ctx: ctx.clone(),
            comps,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.comps
    }

    pub fn degree(&self) -> i64 {
        self.comps.iter().map(MultiPoly::total_degree).max().unwrap_or(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(MultiPoly::is_zero)
    }

    /// The derivation `ξ(P) = Σ ξ_i ∂P/∂x_i`; `e`, when present in `P`, is a constant.
    pub fn apply(&self, p: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(p.ctx());
        for (i, c) in self.comps.iter().enumerate() {
            let d = p.diff(i);
            if d.is_zero() || c.is_zero() {
                continue;
            }
            let c = if p.ctx().has_e() { c.lift_e() } else { c.clone() };
            acc = &acc + &(&c * &d);
        }
        acc
    }

    pub fn vanishes_at(&self, p: &PointQ) -> bool {
        self.comps.iter().all(|c| c.eval(p.coords()).is_zero())
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
pub fn poly_determinant(m: &[Vec<MultiPoly>], ctx: &Ctx) -> MultiPoly {
    let n = m.len();
    match n {
        0 => MultiPoly::one(ctx),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = MultiPoly::zero(ctx);
            for (j, a) in m[0].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let t = a * &poly_determinant(&minor, ctx);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// The generalized cross product of `n − 1` one-forms: `ξ_i = (−1)^{i+1}` times
/// the minor obtained by deleting column `i`.
pub fn kernel_vector_field(omegas: &[OneForm]) -> Result<VectorField> {
    let Some(first) = omegas.first() else {
        return Err(Error::ShapeMismatch("kernel field needs n - 1 >= 1 forms".into()));
    };
    let ctx = first.ctx().clone();
    let n = ctx.arity();
    if omegas.len() + 1 != n {
        return Err(Error::CountMismatch {
            expected: n - 1,
            actual: omegas.len(),
        });
    }
    let comps = (0..n)
        .map(|i| {
            let minor: Vec<Vec<MultiPoly>> = omegas
                .iter()
                .map(|w| {
                    w.coeffs()
                        .iter()
                        .enumerate()
                        .filter(|(c, _)| *c != i)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let d = poly_determinant(&minor, &ctx);
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    VectorField::new(&ctx, comps)
}

/// Order of vanishing of `P` along the trajectory of `ξ` through `p`:
/// the least `m` with `(ξ^m P)(p) ≠ 0`.
///
/// Once the ideal `(P, ξP, …, ξ^{m−1}P)` contains `ξ^m P` it is closed under
/// `ξ`, so if all of its generators vanish at `p` the order is infinite.
pub fn lie_multiplicity(xi: &VectorField, p: &MultiPoly, pt: &PointQ, cap: u32) -> Result<MultResult> {
    if cap < 1 {
        return Err(Error::InvalidCap);
    }
    if p.ctx() != xi.ctx() {
        return Err(Error::ContextMismatch);
    }
    if xi.vanishes_at(pt) {
        return Err(Error::Singular);
    }
    let mut chain: Vec<MultiPoly> = Vec::new();
    let mut cur = p.clone();
    for m in 0..=cap {
        if !cur.eval(pt.coords()).is_zero() {
            return Ok(MultResult::finite(u64::from(m), m, cap));
        }
        if cur.is_zero() || closes_chain(&chain, &cur) {
            return Ok(MultResult {
                value: MultValue::Infinite,
                stabilized_at: Some(m),
                cap,
            });
        }
        chain.push(cur.clone());
        cur = xi.apply(&cur);
    }
    Ok(MultResult {
        value: MultValue::CapExceeded,
        stabilized_at: None,
        cap,
    })
}

fn closes_chain(chain: &[MultiPoly], next: &MultiPoly) -> bool {
    if chain.is_empty() {
        return false;
    }
    let sys = PolySystem::new(next.ctx(), chain.to_vec()).expect("shared context");
    match buchberger(&sys, MonomialOrder::GrevLex, 200) {
        Ok(gb) => reduce(next, &gb, MonomialOrder::GrevLex).is_zero(),
        Err(_) => false,
    }
}

/// A leaf of an integrable Pfaffian system as a graph over some coordinates:
/// independent coordinates are `p_b + u_b`, dependent ones are series in `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafChart {
    pub base: PointQ,
    pub independent: Vec<usize>,
    pub dependent: Vec<usize>,
    /// One series per dependent coordinate, in the leaf parameters `u`.
    pub series: Vec<TruncatedSeries>,
    pub order: u32,
}

impl LeafChart {
    pub fn leaf_ctx(&self) -> &Ctx {
        self.series
            .first()
            .map(TruncatedSeries::ctx)
            .expect("charts with no dependent coordinates carry no series")
    }

    /// The coordinate functions `x_i(u)` as truncated series in `ctx`.
    pub fn graph(&self, ctx: &Ctx) -> Vec<TruncatedSeries> {
        let n = self.independent.len() + self.dependent.len();
        let mut out = vec![TruncatedSeries::new(MultiPoly::zero(ctx), self.order); n];
        for (b, &i) in self.independent.iter().enumerate() {
            let x = &MultiPoly::constant(ctx, self.base.coords()[i].clone()) + &MultiPoly::var(ctx, b);
            out[i] = TruncatedSeries::new(x, self.order);
        }
        for (d, &i) in self.dependent.iter().enumerate() {
            let s = self.series[d]
                .poly()
                .embed(ctx, &(0..self.series[d].ctx().arity()).collect::<Vec<_>>());
            out[i] = TruncatedSeries::new(s, self.order);
        }
        out
    }
}

/// Picks `k` columns with an invertible minor at the point, preferring the
/// last coordinates as dependent ones.
fn choose_dependent(a0: &Matrix, k: usize, n: usize) -> Option<Vec<usize>> {
    let mut subsets = k_subsets(n, k);
    subsets.sort_by(|a, b| b.iter().rev().cmp(a.iter().rev()));
    subsets.into_iter().find(|cols| {
        let sub: Matrix = a0
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        !linalg::determinant(&sub).is_zero()
    })
}

/// Solves the pulled-back Pfaffian equations degree by degree. The series are
/// exact through total degree `order − 1`.
pub fn leaf_series(omegas: &[OneForm], p: &PointQ, order: u32) -> Result<LeafChart> {
    if order < 2 {
        return Err(Error::OrderTooSmall);
    }
    let Some(first) = omegas.first() else {
        return Err(Error::ShapeMismatch("leaf_series needs at least one form".into()));
    };
    let x = first.ctx().clone();
    let n = x.arity();
    let k = omegas.len();
    if k >= n {
        return Err(Error::CountMismatch {
            expected: n - 1,
            actual: k,
        });
    }
    let report = integrability_check(omegas, p)?;
    if !report.frobenius_chain {
        return Err(Error::NonIntegrable("Frobenius chain condition fails".into()));
    }
    if !report.nonvanishing {
        return Err(Error::NonIntegrable("forms are dependent at the point".into()));
    }
    let a0: Matrix = omegas.iter().map(|w| w.eval(p.coords())).collect();
    let dependent =
        choose_dependent(&a0, k, n).ok_or_else(|| Error::NonIntegrable("no invertible minor at the point".into()))?;
    let independent: Vec<usize> = (0..n).filter(|i| !dependent.contains(i)).collect();
    let m = independent.len();
    let uctx = VarContext::numbered("u", m);
    let a_dep0: Matrix = a0
        .iter()
        .map(|r| dependent.iter().map(|&c| r[c].clone()).collect())
        .collect();
    let inv = linalg::inverse(&a_dep0).expect("chosen minor is invertible");

    let mut ys: Vec<MultiPoly> = dependent
        .iter()
        .map(|&i| MultiPoly::constant(&uctx, p.coords()[i].clone()))
        .collect();
    for deg in 1..order {
        let graph = graph_series(&uctx, p, &independent, &dependent, &ys, deg);
        let mut new_terms: Vec<MultiPoly> = vec![MultiPoly::zero(&uctx); k];
        for b in 0..m {
            // Residual of A_dep·∂y/∂u_b + A_ind,b in degree deg − 1, with the
            // unknown top-degree part of ∂y/∂u_b still missing.
            let mut rhs: Vec<MultiPoly> = Vec::with_capacity(k);
            for w in omegas {
                let mut r = pullback_coeff(w, independent[b], &graph)?;
                for (d, &di) in dependent.iter().enumerate() {
                    let a = pullback_coeff(w, di, &graph)?;
                    let dy = ys[d].diff(b);
                    r = &r + &(&a * &dy).truncate(deg);
                }
                rhs.push(homogeneous_part(&r, deg - 1));
            }
            for (d, row) in inv.iter().enumerate() {
                let mut jb = MultiPoly::zero(&uctx);
                for (c, coef) in row.iter().enumerate() {
                    jb = &jb - &rhs[c].scale(coef);
                }
                new_terms[d] = &new_terms[d] + &(&MultiPoly::var(&uctx, b) * &jb);
            }
        }
        let scale = Rational::new(1.into(), i64::from(deg).into());
        for d in 0..k {
            ys[d] = &ys[d] + &new_terms[d].scale(&scale);
        }
    }
    let chart = LeafChart {
        base: p.clone(),
        independent,
        dependent,
        series: ys.into_iter().map(|y| TruncatedSeries::new(y, order)).collect(),
        order,
    };
    if !leaf_residual_vanishes(omegas, &chart)? {
        return Err(Error::NonIntegrable(
            "pulled-back forms do not vanish on the constructed leaf".into(),
        ));
    }
    Ok(chart)
}

fn graph_series(
    uctx: &Ctx,
    p: &PointQ,
    independent: &[usize],
    dependent: &[usize],
    ys: &[MultiPoly],
    order: u32,
) -> Vec<TruncatedSeries> {
    let n = independent.len() + dependent.len();
    let mut out = vec![TruncatedSeries::new(MultiPoly::zero(uctx), order); n];
    for (b, &i) in independent.iter().enumerate() {
        let x = &MultiPoly::constant(uctx, p.coords()[i].clone()) + &MultiPoly::var(uctx, b);
        out[i] = TruncatedSeries::new(x, order);
    }
    for (d, &i) in dependent.iter().enumerate() {
        out[i] = TruncatedSeries::new(ys[d].clone(), order);
    }
    out
}

fn pullback_coeff(w: &OneForm, i: usize, graph: &[TruncatedSeries]) -> Result<MultiPoly> {
    Ok(crate::algebra::series_compose(&w.coeffs()[i], graph)?.poly().clone())
}

fn homogeneous_part(p: &MultiPoly, deg: u32) -> MultiPoly {
    MultiPoly::from_terms(
        p.ctx(),
        p.terms()
            .filter(|(m, _)| m.degree() == deg)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Whether each pulled-back form vanishes through degree `order − 2`.
pub fn leaf_residual_vanishes(omegas: &[OneForm], chart: &LeafChart) -> Result<bool> {
    let m = chart.independent.len();
    let uctx = VarContext::numbered("u", m);
    let graph = chart.graph(&uctx);
    for w in omegas {
        for b in 0..m {
            let mut r = pullback_coeff(w, chart.independent[b], &graph)?;
            for (d, &di) in chart.dependent.iter().enumerate() {
                let a = pullback_coeff(w, di, &graph)?;
                let dy = chart.series[d].poly().embed(&uctx, &(0..m).collect::<Vec<_>>()).diff(b);
                r = &r + &(&a * &dy);
            }
            if !r.truncate(chart.order - 1).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafMultiplicity {
    pub result: MultResult,
    pub order: u32,
    pub verified_order: u32,
    pub truncation_verified: bool,
}

/// `mult_p^e` of `n − k` families restricted to the leaf through `p`: the
/// families are pulled back through the leaf chart and the deformation count
/// is taken at the origin of the leaf coordinates. Two truncation orders must
/// agree.
pub fn leaf_intersection_multiplicity(
    f: &[MultiPoly],
    omegas: &[OneForm],
    p: &PointQ,
    order: u32,
    cap: u32,
) -> Result<LeafMultiplicity> {
    let Some(first) = f.first() else {
        return Err(Error::ShapeMismatch("no functions given".into()));
    };
    let x = first.ctx().strip_e();
    let n = x.arity();
    if f.len() + omegas.len() != n {
        return Err(Error::CountMismatch {
            expected: n - omegas.len().min(n),
            actual: f.len(),
        });
    }
    let low = leaf_value(f, omegas, p, order, cap)?;
    let high = leaf_value(f, omegas, p, order + 2, cap)?;
    if low.value != high.value {
        return Err(Error::TruncationUnstable {
            order: order as usize,
            higher: order as usize + 2,
            low: low.value.to_string(),
            high: high.value.to_string(),
        });
    }
    let verified = match low.stabilized_at {
        Some(s) => s < order,
        None => false,
    };
    Ok(LeafMultiplicity {
        result: low,
        order,
        verified_order: order + 2,
        truncation_verified: verified,
    })
}

fn leaf_value(f: &[MultiPoly], omegas: &[OneForm], p: &PointQ, order: u32, cap: u32) -> Result<MultResult> {
    let n = p.dim();
    let pe = p.with_e_zero();
    if f.iter().any(|fi| {
        let v = if fi.ctx().has_e() {
            fi.eval(&pe)
        } else {
            fi.eval(p.coords())
        };
        !v.is_zero()
    }) {
        return Ok(MultResult::finite(0, 0, cap));
    }
    let (m, graph, uectx) = if omegas.is_empty() {
        let uectx = VarContext::with_e(VarContext::numbered("u", n).names())?;
        let graph: Vec<TruncatedSeries> = (0..n)
            .map(|i| {
                TruncatedSeries::new(
                    &MultiPoly::constant(&uectx, p.coords()[i].clone()) + &MultiPoly::var(&uectx, i),
                    order,
                )
            })
            .collect();
        (n, graph, uectx)
    } else {
        let chart = leaf_series(omegas, p, order)?;
        let m = chart.independent.len();
        let uectx = VarContext::with_e(VarContext::numbered("u", m).names())?;
        (m, chart.graph(&uectx), uectx)
    };
    let mut full = graph;
    full.push(TruncatedSeries::var(&uectx, m, order));
    let pulled: Vec<MultiPoly> = f
        .iter()
        .map(|fi| {
            let fe = fi.lift_e();
            crate::algebra::series_compose(&fe, &full).map(|s| s.poly().clone())
        })
        .collect::<Result<_>>()?;
    deformation_multiplicity(&PolySystem::new(&uectx, pulled)?, &PointQ::origin(m), cap)
}

/// Milnor number: multiplicity of the gradient system at `p` (0 off the
/// critical locus).
pub fn milnor_number(p: &MultiPoly, pt: &PointQ, cap: u32) -> Result<MultResult> {
    let ctx = p.ctx();
    if ctx.has_e() {
        return Err(Error::ShapeMismatch(
            "milnor_number expects a polynomial in x only".into(),
        ));
    }
    let grad: Vec<MultiPoly> = (0..ctx.arity()).map(|i| p.diff(i)).collect();
    local_multiplicity(&PolySystem::new(ctx, grad)?, pt, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat};
    use crate::forms::d_of;

    fn poly(ctx: &Ctx, s: &str) -> MultiPoly {
        parse_poly(s, ctx).unwrap()
    }

    fn form(ctx: &Ctx, coeffs: &[&str]) -> OneForm {
        OneForm::new(ctx, coeffs.iter().map(|s| poly(ctx, s)).collect()).unwrap()
    }

    fn field(ctx: &Ctx, comps: &[&str]) -> VectorField {
        VectorField::new(ctx, comps.iter().map(|s| poly(ctx, s)).collect()).unwrap()
    }

    #[test]
    fn kernel_fields() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        assert_eq!(
            kernel_vector_field(&[form(&c, &["-y", "1"])]).unwrap(),
            field(&c, &["1", "y"])
        );
        assert_eq!(
            kernel_vector_field(&[form(&c, &["1", "0"])]).unwrap(),
            field(&c, &["0", "-1"])
        );
        let c3 = VarContext::new(&["x", "y", "z"]).unwrap();
        let xi = kernel_vector_field(&[OneForm::basis(&c3, 0), OneForm::basis(&c3, 1)]).unwrap();
        assert_eq!(xi, field(&c3, &["0", "0", "1"]));
    }

    #[test]
    fn lie_orders() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let o = PointQ::origin(2);
        let dx = field(&c, &["1", "0"]);
        assert_eq!(
            lie_multiplicity(&dx, &poly(&c, "x^3 + y"), &o, 64).unwrap().value,
            MultValue::Finite(3)
        );
        assert_eq!(
            lie_multiplicity(&dx, &poly(&c, "1 + x"), &o, 64).unwrap().value,
            MultValue::Finite(0)
        );
        let xi = field(&c, &["1", "2*x"]);
        assert_eq!(
            lie_multiplicity(&xi, &poly(&c, "y"), &o, 64).unwrap().value,
            MultValue::Finite(2)
        );
        assert_eq!(
            lie_multiplicity(&xi, &poly(&c, "y - x^2"), &o, 64).unwrap().value,
            MultValue::Infinite
        );
        let zero = field(&c, &["x", "y"]);
        assert_eq!(lie_multiplicity(&zero, &poly(&c, "y"), &o, 64), Err(Error::Singular));
    }

    #[test]
    fn exponential_leaf() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let w = form(&c, &["-y", "1"]);
        let chart = leaf_series(&[w], &PointQ::from_ints(&[0, 1]), 4).unwrap();
        assert_eq!(chart.dependent, vec![1]);
        let u = chart.leaf_ctx().clone();
        assert_eq!(chart.series[0].poly(), &poly(&u, "1 + u1 + 1/2*u1^2 + 1/6*u1^3"));
    }

    #[test]
    fn exact_and_constant_leaves() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let w = d_of(&poly(&c, "y - x^2"));
        let chart = leaf_series(&[w], &PointQ::origin(2), 4).unwrap();
        let u = chart.leaf_ctx().clone();
        assert_eq!(chart.series[0].poly(), &poly(&u, "u1^2"));
        let chart = leaf_series(&[OneForm::basis(&c, 1)], &PointQ::origin(2), 4).unwrap();
        assert!(chart.series[0].poly().is_zero());
        assert_eq!(
            leaf_series(&[OneForm::basis(&c, 1)], &PointQ::origin(2), 1),
            Err(Error::OrderTooSmall)
        );
    }

    #[test]
    fn leaf_multiplicities() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let ce = c.extend_e();
        let w = form(&c, &["-y", "1"]);
        let p = PointQ::from_ints(&[0, 1]);
        let r = leaf_intersection_multiplicity(&[poly(&c, "y - 1 - x")], std::slice::from_ref(&w), &p, 8, 64).unwrap();
        assert_eq!(r.result.value, MultValue::Finite(2));
        assert!(r.truncation_verified);
        let r =
            leaf_intersection_multiplicity(&[poly(&ce, "y - 1 - x - e")], std::slice::from_ref(&w), &p, 8, 64).unwrap();
        assert_eq!(r.result.value, MultValue::Finite(2));
        let r =
            leaf_intersection_multiplicity(&[poly(&c, "y - 1 - x")], &[w], &PointQ::from_ints(&[1, 0]), 8, 64).unwrap();
        assert_eq!(r.result.value, MultValue::Finite(0));
    }

    #[test]
    fn exact_form_cross_check() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let big_f = poly(&c, "y - x^2");
        let r = leaf_intersection_multiplicity(&[poly(&c, "y")], &[d_of(&big_f)], &PointQ::origin(2), 8, 64).unwrap();
        let sys = PolySystem::new(&c, vec![poly(&c, "y"), big_f]).unwrap();
        let direct = local_multiplicity(&sys, &PointQ::origin(2), 64).unwrap();
        assert_eq!(r.result.value, MultValue::Finite(2));
        assert_eq!(direct.value, MultValue::Finite(2));
    }

    #[test]
    fn milnor_numbers() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let o = PointQ::origin(2);
        assert_eq!(
            milnor_number(&poly(&c, "x^2 + y^2"), &o, 64).unwrap().value,
            MultValue::Finite(1)
        );
        assert_eq!(
            milnor_number(&poly(&c, "x^3 + y^2"), &o, 64).unwrap().value,
            MultValue::Finite(2)
        );
        let v = milnor_number(&poly(&c, "x^2*y"), &o, 64).unwrap().value;
        assert!(matches!(v, MultValue::Infinite | MultValue::CapExceeded));
        assert_eq!(
            milnor_number(&poly(&c, "x^2 + y^2"), &PointQ(vec![rat(1), rat(0)]), 64)
                .unwrap()
                .value,
            MultValue::Finite(0)
        );
    }
}
