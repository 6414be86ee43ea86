//! Exact rational arithmetic, sparse polynomials, truncated series and points.

mod context;
mod monomial;
mod parse;
mod poly;
mod series;

pub use context::{Ctx, VarContext, E_NAME};
pub use monomial::{monomials_of_degree, Monomial};
pub use parse::{parse_poly, parse_rational};
pub use poly::{rat, ratio, MultiPoly, Rational};
pub use series::{series_compose, series_order, SeriesOrder, TruncatedSeries};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A rational point, one coordinate per space variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointQ(pub Vec<Rational>);

impl PointQ {
    pub fn origin(n: usize) -> Self {
        PointQ(vec![rat(0); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        PointQ(v.iter().map(|&a| rat(a)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    /// The point with `e = 0` appended.
    pub fn with_e_zero(&self) -> Vec<Rational> {
        let mut v = self.0.clone();
        v.push(rat(0));
        v
    }
}

impl Serialize for PointQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s))
            .collect::<crate::Result<Vec<_>>>()
            .map(PointQ)
            .map_err(serde::de::Error::custom)
    }
}

/// Exponent vectors paired with coefficient strings, for reports.
pub fn terms_as_json(p: &MultiPoly) -> Vec<(Vec<u32>, String)> {
    p.terms()
        .rev()
        .map(|(m, c)| (m.exps().to_vec(), c.to_string()))
        .collect()
}
