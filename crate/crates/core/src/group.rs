//! The torus `G = (ℂ*)^n` in multiplicative coordinates: sumsets, algebraic
//! subgroups given by character lattices, coset counts, d-weights of cycles,
//! and checks of the Moreau-type zero estimate with multiplicities.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{parse_rational, rat, MultiPoly, PointQ, Rational};
use crate::cycle::{cycle_degree_profile, simple_constant, MultiplicityCycle};
use crate::error::{Error, Result};
use crate::groebner::PolySystem;
use crate::local::MultValue;
use crate::oracle::{lie_multiplicity, VectorField};

/// A point of the torus; every coordinate is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusPoint(Vec<Rational>);

impl TorusPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("torus points have nonzero coordinates".into()));
        }
        Ok(TorusPoint(coords))
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&a| rat(a)).collect())
    }

    pub fn identity(n: usize) -> Self {
        TorusPoint(vec![rat(1); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn mul(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    /// `χ_m(γ) = Π γ_i^{m_i}`.
    pub fn character(&self, m: &[i64]) -> Rational {
        self.0.iter().zip(m).fold(Rational::one(), |acc, (g, &e)| {
            let p = num_traits::pow(g.clone(), e.unsigned_abs() as usize);
            if e < 0 {
                acc / p
            } else {
                acc * p
            }
        })
    }

    pub fn to_point(&self) -> PointQ {
        PointQ(self.0.clone())
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|r| r.to_string()))
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let coords = v
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        TorusPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

/// A finite subset of the torus, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SigmaSet {
    points: BTreeSet<TorusPoint>,
}

impl SigmaSet {
    pub fn new(points: Vec<TorusPoint>) -> Result<Self> {
        if let Some(n) = points.first().map(TorusPoint::dim) {
            if points.iter().any(|p| p.dim() != n) {
                return Err(Error::ShapeMismatch("torus points of different dimensions".into()));
            }
        }
        Ok(SigmaSet {
            points: points.into_iter().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        SigmaSet {
            points: [TorusPoint::identity(n)].into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(TorusPoint::dim)
    }

    pub fn contains_identity(&self) -> bool {
        self.dim()
            .is_some_and(|n| self.points.contains(&TorusPoint::identity(n)))
    }

    pub fn points(&self) -> impl Iterator<Item = &TorusPoint> {
        self.points.iter()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.points.contains(p)
    }
}

/// `Σ^{(p)}`: all products of `p` elements of `Σ`; `Σ^{(0)}` is the identity.
pub fn sumset_power(sigma: &SigmaSet, p: usize) -> SigmaSet {
    let Some(n) = sigma.dim() else {
        return sigma.clone();
    };
    let mut acc = SigmaSet::identity(n);
    for _ in 0..p {
        acc = SigmaSet {
            points: acc
                .points
                .iter()
                .flat_map(|a| sigma.points.iter().map(move |b| a.mul(b)))
                .collect(),
        };
    }
    acc
}

/// An algebraic subgroup `H = {χ_m = 1 for every row m}` of the torus. Rows are
/// kept in Hermite normal form, so equal lattices compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Subtorus {
    n: usize,
    characters: Vec<Vec<i64>>,
}

impl Subtorus {
    pub fn new(n: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("characters must have {n} entries")));
        }
        Ok(Subtorus {
            n,
            characters: hermite_normal_form(rows, n)?,
        })
    }

    /// `H = G`.
    pub fn whole(n: usize) -> Self {
        Subtorus {
            n,
            characters: Vec::new(),
        }
    }

    /// `H = {1}`.
    pub fn trivial(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Subtorus { n, characters: rows }
    }

    pub fn dim_ambient(&self) -> usize {
        self.n
    }

    pub fn characters(&self) -> &[Vec<i64>] {
        &self.characters
    }

    pub fn codim(&self) -> usize {
        self.characters.len()
    }

    pub fn is_proper(&self) -> bool {
        self.codim() > 0
    }

    fn class_key(&self, g: &TorusPoint) -> Vec<Rational> {
        self.characters.iter().map(|m| g.character(m)).collect()
    }
}

/// Row-style Hermite normal form: zero rows dropped, pivots positive and
/// strictly increasing, entries above a pivot reduced modulo it.
fn hermite_normal_form(rows: Vec<Vec<i64>>, n: usize) -> Result<Vec<Vec<i64>>> {
    let overflow = || Error::OutOfRange("character entries too large".into());
    let mut a: Vec<Vec<i128>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect();
    let mut top = 0;
    for col in 0..n {
        if top == a.len() {
            break;
        }
        // Euclid on the column until a single nonzero entry remains at `top`.
        loop {
            let nz: Vec<usize> = (top..a.len()).filter(|&i| a[i][col] != 0).collect();
            let Some(&piv) = nz.iter().min_by_key(|&&i| a[i][col].abs()) else {
                break;
            };
            a.swap(top, piv);
            if nz.len() == 1 {
                break;
            }
            for i in top + 1..a.len() {
                let q = a[i][col].div_euclid(a[top][col]);
                if q != 0 {
                    for c in 0..n {
                        a[i][c] = a[i][c]
                            .checked_sub(q.checked_mul(a[top][c]).ok_or_else(overflow)?)
                            .ok_or_else(overflow)?;
                    }
                }
            }
        }
        if a[top][col] == 0 {
            continue;
        }
        if a[top][col] < 0 {
            a[top].iter_mut().for_each(|v| *v = -*v);
        }
        for i in 0..top {
            let q = a[i][col].div_euclid(a[top][col]);
            if q != 0 {
                for c in 0..n {
                    a[i][c] = a[i][c]
                        .checked_sub(q.checked_mul(a[top][c]).ok_or_else(overflow)?)
                        .ok_or_else(overflow)?;
                }
            }
        }
        top += 1;
    }
    a.truncate(top);
    a.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| i64::try_from(v).map_err(|_| overflow()))
                .collect()
        })
        .collect()
}

/// `#(Σ+H)/H`: the number of distinct character-value vectors on `Σ`.
pub fn coset_count(sigma: &SigmaSet, h: &Subtorus) -> usize {
    sigma.points().map(|g| h.class_key(g)).collect::<BTreeSet<_>>().len()
}

/// All proper subgroups whose character lattice is generated by vectors with
/// entries in `[-height, height]`, in increasing order of codimension.
pub fn subtori_up_to_height(n: usize, height: u32) -> Result<Vec<Subtorus>> {
    let h = i64::from(height);
    let mut vectors: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        vectors = vectors
            .into_iter()
            .flat_map(|v| {
                (-h..=h).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    vectors.retain(|v| v.iter().any(|&a| a != 0));
    let mut found: BTreeSet<(usize, Subtorus)> = BTreeSet::new();
    let mut frontier: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for rows in &frontier {
            for v in &vectors {
                let mut r = rows.clone();
                r.push(v.clone());
                let s = Subtorus::new(n, r)?;
                if s.codim() == rows.len() + 1 && found.insert((s.codim(), s.clone())) {
                    next.push(s.characters.clone());
                }
            }
        }
        frontier = next;
    }
    Ok(found.into_iter().map(|(_, s)| s).collect())
}

/// `Σ_c profile[c] / d^c`: the d-weight of a cycle, computed from Bezout
/// degrees and therefore an upper bound.
pub fn d_weight_of_profile(profile: &[u64], d: u64) -> Result<Rational> {
    if d == 0 {
        return Err(Error::OutOfRange("d must be at least 1".into()));
    }
    let dr = rat(d as i64);
    Ok(profile.iter().enumerate().fold(Rational::zero(), |acc, (codim, &deg)| {
        acc + rat(deg as i64) / num_traits::pow(dr.clone(), codim)
    }))
}

pub fn d_weight(cycle: &MultiplicityCycle, d: u64) -> Result<Rational> {
    d_weight_of_profile(&cycle_degree_profile(cycle), d)
}

/// `C_G = Σ_{j<n} C_{n,n−1,j}`: the weight bound for `Γ(P; ξ)` on `(ℂ*)^n`.
pub fn group_constant(n: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::OutOfRange("the torus must have dimension at least 1".into()));
    }
    (0..n).try_fold(0u128, |acc, j| {
        acc.checked_add(simple_constant(n, n - 1, j)?)
            .ok_or_else(|| Error::OutOfRange("constant overflows 128 bits".into()))
    })
}

/// The diagonal coefficients `λ` of an invariant field `Σ λ_i x_i ∂/∂x_i`.
pub fn invariant_weights(xi: &VectorField) -> Result<Vec<Rational>> {
    let ctx = xi.ctx();
    xi.components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let lambda = c.coeff(&crate::algebra::Monomial::var(ctx.arity(), i));
            if *c == MultiPoly::var(ctx, i).scale(&lambda) {
                Ok(lambda)
            } else {
                Err(Error::NonInvariantField)
            }
        })
        .collect()
}

/// `V_T = {P = ξP = ⋯ = ξ^{T−1}P = 0}` for an invariant field.
pub fn vt_generators(p: &MultiPoly, xi: &VectorField, t: usize) -> Result<PolySystem> {
    invariant_weights(xi)?;
    if p.ctx() != xi.ctx() {
        return Err(Error::ContextMismatch);
    }
    if t == 0 {
        return Err(Error::OutOfRange("T must be at least 1".into()));
    }
    let mut eqs = vec![p.clone()];
    for _ in 1..t {
        let next = xi.apply(eqs.last().expect("nonempty"));
        eqs.push(next);
    }
    PolySystem::new(p.ctx(), eqs)
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupCheck {
    pub characters: Vec<Vec<i64>>,
    pub codim: usize,
    pub lhs: usize,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoreauReport {
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
    /// The weight is a Bezout upper bound, not an exact weight.
    pub weight_is_upper_bound: bool,
    pub per_subgroup: Vec<SubgroupCheck>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Checks `#(Σ+H)/H > d^{codim H} · weight` for each listed subgroup.
pub fn moreau_check(sigma: &SigmaSet, d: u64, weight: &Rational, subgroups: &[Subtorus]) -> MoreauReport {
    let per_subgroup: Vec<SubgroupCheck> = subgroups
        .par_iter()
        .map(|h| {
            let lhs = coset_count(sigma, h);
            let rhs = num_traits::pow(rat(d as i64), h.codim()) * weight;
            SubgroupCheck {
                characters: h.characters.clone(),
                codim: h.codim(),
                lhs,
                holds: rat(lhs as i64) > rhs,
                rhs,
            }
        })
        .collect();
    MoreauReport {
        weight: weight.clone(),
        weight_is_upper_bound: true,
        holds: per_subgroup.iter().all(|c| c.holds),
        warning: subgroups
            .is_empty()
            .then(|| "no subgroups checked; hypothesis holds vacuously".into()),
        per_subgroup,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaOrder {
    pub point: TorusPoint,
    pub order: MultValue,
    /// Declared infinite: certified by a closed Lie chain, or above the cutoff.
    pub infinite: bool,
    pub by_cutoff: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedReport {
    pub t: usize,
    pub degree: u64,
    pub group_constant: u128,
    pub cutoff: u128,
    /// The cutoff rule (order above `C_G · d^n` means infinite) is itself a
    /// consequence of the bound being tested.
    pub cutoff_from_theorem: bool,
    pub hypothesis: MoreauReport,
    pub orders: Vec<GammaOrder>,
    /// Every order at `Σ^{(n)}` is at least `T`.
    pub vanishing_premise: bool,
    pub premises_met: bool,
    pub any_infinite: bool,
    /// Premises met implies some order is infinite.
    pub consistent: bool,
}

/// Checks the multiplicity version of Moreau's zero estimate on an instance.
pub fn extended_multiplicity_check(
    sigma: &SigmaSet,
    p: &MultiPoly,
    xi: &VectorField,
    t: usize,
    subgroups: &[Subtorus],
    cap: u32,
) -> Result<ExtendedReport> {
    invariant_weights(xi)?;
    let n = xi.ctx().arity();
    if sigma.dim() != Some(n) {
        return Err(Error::ShapeMismatch(format!(
            "Σ must be a nonempty subset of ({n})-torus"
        )));
    }
    if !sigma.contains_identity() {
        return Err(Error::InvalidInput("Σ must contain the identity".into()));
    }
    if t == 0 {
        return Err(Error::OutOfRange("T must be at least 1".into()));
    }
    let d = p.total_degree().max(0) as u64;
    let cg = group_constant(n)?;
    let cutoff = (d as u128)
        .checked_pow(n as u32)
        .and_then(|v| v.checked_mul(cg))
        .ok_or_else(|| Error::OutOfRange("cutoff overflows 128 bits".into()))?;
    let weight = Rational::new((cg as i64).into(), (t as i64).into());
    let hypothesis = moreau_check(sigma, d.max(1), &weight, subgroups);
    let lie_cap = u32::try_from(cutoff.saturating_add(1))
        .unwrap_or(u32::MAX)
        .min(cap.max(1));
    let points: Vec<TorusPoint> = sumset_power(sigma, n).points().cloned().collect();
    let orders: Vec<GammaOrder> = points
        .into_par_iter()
        .map(|g| {
            let order = match lie_multiplicity(xi, p, &g.to_point(), lie_cap) {
                Ok(r) => r.value,
                Err(Error::Singular) => MultValue::Infinite,
                Err(e) => return Err(e),
            };
            let by_cutoff = match order {
                MultValue::Finite(v) => u128::from(v) > cutoff,
                MultValue::CapExceeded => u128::from(lie_cap) > cutoff,
                MultValue::Infinite => false,
            };
            Ok(GammaOrder {
                point: g,
                infinite: by_cutoff || order == MultValue::Infinite,
                by_cutoff,
                order,
            })
        })
        .collect::<Result<_>>()?;
    let vanishing_premise = orders.iter().all(|o| match o.order {
        MultValue::Finite(v) => v >= t as u64,
        _ => true,
    });
    let premises_met = hypothesis.holds && vanishing_premise;
    let any_infinite = orders.iter().any(|o| o.infinite);
    Ok(ExtendedReport {
        t,
        degree: d,
        group_constant: cg,
        cutoff,
        cutoff_from_theorem: true,
        hypothesis,
        orders,
        vanishing_premise,
        premises_met,
        any_infinite,
        consistent: !premises_met || any_infinite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, ratio, Ctx, VarContext};
    use crate::cycle::{build_cycle, CycleComponent};
    use crate::params::ParamPack;

    fn pts(v: &[&[i64]]) -> SigmaSet {
        SigmaSet::new(v.iter().map(|c| TorusPoint::from_ints(c).unwrap()).collect()).unwrap()
    }

    fn field(ctx: &Ctx, comps: &[&str]) -> VectorField {
        VectorField::new(ctx, comps.iter().map(|s| parse_poly(s, ctx).unwrap()).collect()).unwrap()
    }

    #[test]
    fn sumsets() {
        let s = pts(&[&[1, 1], &[2, 1]]);
        assert_eq!(sumset_power(&s, 2), pts(&[&[1, 1], &[2, 1], &[4, 1]]));
        assert_eq!(sumset_power(&s, 0), pts(&[&[1, 1]]));
        let id = pts(&[&[1, 1]]);
        assert_eq!(sumset_power(&id, 5), id);
    }

    #[test]
    fn coset_counts() {
        let s = pts(&[&[1, 1], &[2, 1], &[2, 3]]);
        assert_eq!(coset_count(&s, &Subtorus::whole(2)), 1);
        assert_eq!(coset_count(&s, &Subtorus::trivial(2)), 3);
        assert_eq!(coset_count(&s, &Subtorus::new(2, vec![vec![0, 1]]).unwrap()), 2);
        // x^2 = 1 identifies 1 with -1.
        let t = pts(&[&[1], &[-1], &[2]]);
        assert_eq!(coset_count(&t, &Subtorus::new(1, vec![vec![2]]).unwrap()), 2);
    }

    #[test]
    fn hnf_normalises_lattices() {
        let a = Subtorus::new(2, vec![vec![2, 4], vec![1, 3]]).unwrap();
        assert_eq!(a.characters(), &[vec![1, 1], vec![0, 2]]);
        let b = Subtorus::new(2, vec![vec![1, 3], vec![1, 1]]).unwrap();
        assert_eq!(a, b);
        let c = Subtorus::new(3, vec![vec![1, 1, 0], vec![2, 2, 0]]).unwrap();
        assert_eq!(c.codim(), 1);
        assert_eq!(Subtorus::new(2, vec![vec![0, 0]]).unwrap(), Subtorus::whole(2));
    }

    #[test]
    fn subtori_generation() {
        let subs = subtori_up_to_height(1, 2).unwrap();
        assert_eq!(
            subs.iter().map(|s| s.characters()[0][0]).collect::<Vec<_>>(),
            vec![1, 2]
        );
        let subs = subtori_up_to_height(2, 1).unwrap();
        assert!(subs.iter().all(Subtorus::is_proper));
        assert!(subs.contains(&Subtorus::trivial(2)));
        assert!(subs.windows(2).all(|w| w[0].codim() <= w[1].codim()));
    }

    #[test]
    fn group_constants() {
        assert_eq!(group_constant(1).unwrap(), 1);
        assert_eq!(group_constant(2).unwrap(), 3);
        assert_eq!(group_constant(3).unwrap(), 43);
    }

    #[test]
    fn weights() {
        assert_eq!(d_weight_of_profile(&[0, 6], 2).unwrap(), rat(3));
        assert_eq!(d_weight_of_profile(&[0, 2, 6], 2).unwrap(), ratio(5, 2));
        assert_eq!(d_weight_of_profile(&[0, 0, 0], 2).unwrap(), rat(0));
        let xe = VarContext::with_e(&["x", "y"]).unwrap();
        let comp = CycleComponent {
            system: PolySystem::new(&xe, vec![parse_poly("x^2*y^4 - e", &xe).unwrap()]).unwrap(),
            dim: 1,
            trace: vec![],
            coefficient: 1,
            support: vec![],
        };
        let mut single = build_cycle(
            &[parse_poly("x", &xe).unwrap(), parse_poly("y", &xe).unwrap()],
            &[],
            &ParamPack::new(0),
        )
        .unwrap();
        single.components = vec![comp];
        assert_eq!(d_weight(&single, 2).unwrap(), rat(3));
        assert_eq!(
            d_weight(
                &build_cycle(
                    &[parse_poly("x^2", &xe).unwrap(), parse_poly("y^3", &xe).unwrap()],
                    &[],
                    &ParamPack::new(0)
                )
                .unwrap(),
                1
            )
            .unwrap(),
            rat(6)
        );
    }

    #[test]
    fn vt_examples() {
        let c = VarContext::new(&["x"]).unwrap();
        let xi = field(&c, &["x"]);
        let s = vt_generators(&parse_poly("x - 1", &c).unwrap(), &xi, 2).unwrap();
        assert_eq!(
            s.polys().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            vec!["x - 1", "x"]
        );
        assert_eq!(
            vt_generators(&parse_poly("x - 1", &c).unwrap(), &xi, 1).unwrap().len(),
            1
        );
        let c2 = VarContext::new(&["x", "y"]).unwrap();
        let s = vt_generators(&parse_poly("x*y", &c2).unwrap(), &field(&c2, &["x", "2*y"]), 3).unwrap();
        assert_eq!(
            s.polys().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            vec!["x*y", "3*x*y", "9*x*y"]
        );
        let bad = field(&c2, &["1", "y"]);
        assert!(matches!(
            vt_generators(&parse_poly("x", &c2).unwrap(), &bad, 2),
            Err(Error::NonInvariantField)
        ));
    }

    #[test]
    fn moreau_examples() {
        let ten = SigmaSet::new((1..=10).map(|i| TorusPoint::from_ints(&[i, 1]).unwrap()).collect()).unwrap();
        let r = moreau_check(&ten, 1, &rat(1), &[Subtorus::trivial(2)]);
        assert!(r.holds);
        assert_eq!(r.per_subgroup[0].lhs, 10);
        let two = pts(&[&[1, 1], &[1, 2]]);
        let h = Subtorus::new(2, vec![vec![0, 1]]).unwrap();
        let r = moreau_check(&two, 2, &ratio(3, 2), &[h]);
        assert!(!r.holds);
        assert_eq!(r.per_subgroup[0].rhs, rat(3));
        let r = moreau_check(&two, 2, &rat(1), &[]);
        assert!(r.holds && r.warning.is_some());
    }

    #[test]
    fn extended_examples() {
        let c = VarContext::new(&["x"]).unwrap();
        let xi = field(&c, &["x"]);
        let one = pts(&[&[1]]);
        let subs = subtori_up_to_height(1, 3).unwrap();
        let r = extended_multiplicity_check(&one, &parse_poly("x - 1", &c).unwrap(), &xi, 1, &subs, 64).unwrap();
        assert_eq!(r.orders[0].order, MultValue::Finite(1));

        let r = extended_multiplicity_check(&one, &MultiPoly::one(&c), &xi, 1, &subs, 64).unwrap();
        assert_eq!(r.orders[0].order, MultValue::Finite(0));
        assert!(!r.vanishing_premise && !r.premises_met && r.consistent);

        let r = extended_multiplicity_check(&one, &parse_poly("(x - 1)^3", &c).unwrap(), &xi, 3, &subs, 64).unwrap();
        assert_eq!(r.orders[0].order, MultValue::Finite(3));
        assert_eq!(r.cutoff, 3);
        assert!(!r.any_infinite && r.consistent);
    }
}
