use super::context::Ctx;
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// A multivariate power series known up to (excluding) total degree `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: MultiPoly,
    order: u32,
}

/// Vanishing order of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOrder {
    Exact(u32),
    /// Zero through the truncation order.
    AtLeastTruncation(u32),
}

impl TruncatedSeries {
    pub fn new(poly: MultiPoly, order: u32) -> Self {
        TruncatedSeries {
            poly: poly.truncate(order),
            order,
        }
    }

    pub fn var(ctx: &Ctx, i: usize, order: u32) -> Self {
        Self::new(MultiPoly::var(ctx, i), order)
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ctx(&self) -> &Ctx {
        self.poly.ctx()
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        let order = self.order.min(other.order);
        let mut out = MultiPoly::zero(self.ctx());
        if self.ctx() != other.ctx() {
            return Err(Error::ContextMismatch);
        }
        for (ma, ca) in self.poly.terms() {
            let da = ma.degree();
            if da >= order {
                break;
            }
            for (mb, cb) in other.poly.terms() {
                if da + mb.degree() >= order {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(TruncatedSeries { poly: out, order })
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        let order = self.order.min(other.order);
        Ok(TruncatedSeries::new(self.poly.checked_add(&other.poly)?, order))
    }

    pub fn vanishing_order(&self) -> SeriesOrder {
        series_order(self)
    }
}

/// Minimal total degree of a nonzero term.
pub fn series_order(s: &TruncatedSeries) -> SeriesOrder {
    match s.poly.order() {
        Some(d) => SeriesOrder::Exact(d),
        None => SeriesOrder::AtLeastTruncation(s.order),
    }
}

/// Substitutes one series per variable of `p`, truncating at the common order.
pub fn series_compose(p: &MultiPoly, graph: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    if graph.len() != p.ctx().arity() {
        return Err(Error::ShapeMismatch(format!(
            "series graph has {} entries for {} variables",
            graph.len(),
            p.ctx().arity()
        )));
    }
    let Some(first) = graph.first() else {
        return Err(Error::ShapeMismatch("empty series graph".into()));
    };
    let ctx = first.ctx().clone();
    let order = first.order;
    if graph.iter().any(|s| s.ctx() != &ctx || s.order != order) {
        return Err(Error::ContextMismatch);
    }
    let one = TruncatedSeries::new(MultiPoly::one(&ctx), order);
    let mut powers: Vec<Vec<TruncatedSeries>> = graph.iter().map(|s| vec![one.clone(), s.clone()]).collect();
    let mut out = MultiPoly::zero(&ctx);
    for (m, c) in p.terms() {
        let mut t = TruncatedSeries::new(MultiPoly::constant(&ctx, c.clone()), order);
        for (i, &a) in m.exps().iter().enumerate() {
            if a == 0 {
                continue;
            }
            while powers[i].len() <= a as usize {
                let next = powers[i].last().unwrap().mul(&graph[i])?;
                powers[i].push(next);
            }
            t = t.mul(&powers[i][a as usize])?;
            if t.poly.is_zero() {
                break;
            }
        }
        out = &out + &t.poly;
    }
    Ok(TruncatedSeries { poly: out, order })
}
