//! Milnor fibers of deformations: the determinantal system `Σ(f; ω)`, cycles
//! bounding the Betti numbers of a Milnor fiber, and the cycle `Γ(P; ξ)`
//! bounding the order of contact of `P` with the trajectories of `ξ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{monomials_of_degree, Ctx, MultiPoly, PointQ, Rational};
use crate::cycle::{cycle_mult_at, general_cycle, ser_rat_rows, simple_constant, CycleEval, MultiplicityCycle};
use crate::error::{Error, Result};
use crate::forms::{d_of, k_subsets, wedge, OneForm};
use crate::groebner::{flat_part, PolySystem};
use crate::local::MultValue;
use crate::oracle::VectorField;
use crate::params::ParamPack;

fn lift_family(f: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    let Some(first) = f.first() else {
        return Err(Error::ShapeMismatch("empty family".into()));
    };
    let fe: Vec<MultiPoly> = f.iter().map(MultiPoly::lift_e).collect();
    let ctx = first.lift_e().ctx().clone();
    if fe.iter().any(|p| p.ctx() != &ctx) {
        return Err(Error::ContextMismatch);
    }
    Ok(fe)
}

/// `{f = 0} ∪ {coefficients of ⋀df ∧ ⋀ω ∧ de}` in the `(x, e)` context, one
/// coefficient per `(m+k+1)`-subset of the `n+1` variables, zeros included.
pub fn sigma_system(f: &[MultiPoly], omegas: &[OneForm]) -> Result<PolySystem> {
    let fe = lift_family(f)?;
    let xe = fe[0].ctx().clone();
    let ei = xe.e_index().expect("lifted family has e");
    let rank = fe.len() + omegas.len() + 1;
    if rank > xe.arity() {
        return Err(Error::RankMismatch {
            expected: xe.arity(),
            actual: rank,
        });
    }
    let mut forms: Vec<OneForm> = fe.iter().map(d_of).collect();
    for w in omegas {
        let w = w.lift_e();
        if w.ctx() != &xe {
            return Err(Error::ContextMismatch);
        }
        forms.push(w);
    }
    forms.push(OneForm::basis(&xe, ei));
    let top = wedge(&forms)?;
    let mut polys = fe;
    polys.extend(k_subsets(xe.arity(), rank).iter().map(|s| top.coeff(s)));
    PolySystem::new(&xe, polys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Goodness {
    /// The critical locus of the fibers `X_ε` does not accumulate at `p`.
    Certified,
    UnverifiedGood,
}

/// Certifies that `p` is a good point of the family `f`: the flat limit of
/// `Σ(f; ∅)` (fiber points where `df` drops rank) does not contain `(p, 0)`.
pub fn goodness(f: &[MultiPoly], p: &PointQ, budget: usize) -> Result<Goodness> {
    let sigma = sigma_system(f, &[])?;
    match flat_part(&sigma, budget) {
        Ok(flat) if !flat.vanishes_at(&p.with_e_zero()) => Ok(Goodness::Certified),
        Ok(_) | Err(Error::BudgetExceeded { .. }) => Ok(Goodness::UnverifiedGood),
        Err(e) => Err(e),
    }
}

/// The cycle whose multiplicity at a good point bounds `b_r` of the Milnor
/// fiber: `general_cycle(Σ(f; dℓ_1..dℓ_{k+1}); dℓ_1..dℓ_k)` with `k = n−m−r`.
#[derive(Debug, Clone, Serialize)]
pub struct BettiCycle {
    pub r: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_rat_rows")]
    pub functionals: Vec<Vec<Rational>>,
    pub sigma: Vec<String>,
    pub cycle: MultiplicityCycle,
}

pub fn betti_cycle(f: &[MultiPoly], r: usize, pack: &ParamPack) -> Result<BettiCycle> {
    let fe = lift_family(f)?;
    let x = fe[0].ctx().strip_e();
    let (n, m) = (x.arity(), fe.len());
    if m > n {
        return Err(Error::ShapeMismatch(format!("{m} equations in {n}-space")));
    }
    if r > n - m {
        return Err(Error::OutOfRange(format!(
            "Betti index {r} exceeds fiber dimension {}",
            n - m
        )));
    }
    let k = n - m - r;
    let ell = pack.random_full_rank(&mut pack.rng("ell", &[r as u64]), k + 1, n);
    let dl: Vec<OneForm> = ell
        .iter()
        .map(|row| OneForm::constant(&x, row))
        .collect::<Result<_>>()?;
    // For r = 0 the wedge has rank n + 2 and vanishes: Σ is f alone.
    let sigma = if r == 0 {
        fe
    } else {
        sigma_system(&fe, &dl)?.polys().to_vec()
    };
    let cycle = general_cycle(&sigma, &dl[..k], pack)?;
    Ok(BettiCycle {
        r,
        k,
        functionals: ell,
        sigma: sigma.iter().map(|p| p.to_string()).collect(),
        cycle,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BettiBound {
    pub value: MultValue,
    pub goodness: Goodness,
    pub eval: CycleEval,
    pub betti: BettiCycle,
}

/// Upper bound for `b_r(F_p)`.
pub fn betti_bound(f: &[MultiPoly], p: &PointQ, r: usize, pack: &ParamPack, cap: u32) -> Result<BettiBound> {
    let betti = betti_cycle(f, r, pack)?;
    let eval = cycle_mult_at(&betti.cycle, p, pack, cap)?;
    Ok(BettiBound {
        value: eval.value,
        goodness: goodness(f, p, crate::groebner::DEFAULT_BUDGET)?,
        eval,
        betti,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerBound {
    pub value: MultValue,
    pub per_r: Vec<BettiBound>,
}

/// `Σ_r betti_bound(f, p, r)` over `r = 0..=n−m`, bounding `|χ(F_p)|`.
pub fn euler_bound(f: &[MultiPoly], p: &PointQ, pack: &ParamPack, cap: u32) -> Result<EulerBound> {
    let fe = lift_family(f)?;
    let n = fe[0].ctx().space_dim();
    if fe.len() > n {
        return Err(Error::ShapeMismatch(format!("{} equations in {n}-space", fe.len())));
    }
    let per_r: Vec<BettiBound> = (0..=n - fe.len())
        .into_par_iter()
        .map(|r| betti_bound(&fe, p, r, pack, cap))
        .collect::<Result<_>>()?;
    let value = per_r.iter().fold(MultValue::Finite(0), |a, b| a.add(b.value));
    Ok(EulerBound { value, per_r })
}

/// `D_{n,k,j} · d^{n−j}` with `D_{n,k,j} = m^{n−j} C_{n,k,j}` and `k = n−m−r`.
pub fn milnor_degree_constant(n: usize, m: usize, r: usize, j: usize, d: u64) -> Result<u128> {
    if m == 0 || m > n || r > n - m {
        return Err(Error::OutOfRange(format!(
            "need 1 <= m <= n and r <= n - m, got n={n}, m={m}, r={r}"
        )));
    }
    let k = n - m - r;
    let c = simple_constant(n, k, j)?;
    let t = (n - j) as u32;
    (m as u128)
        .checked_pow(t)
        .and_then(|a| a.checked_mul(c))
        .and_then(|a| a.checked_mul((d as u128).checked_pow(t)?))
        .ok_or_else(|| Error::OutOfRange("constant overflows 128 bits".into()))
}

/// Gabrielov's family `X^r = {P^Q = ξP^Q = ⋯ = ξ^{r−1}P^Q = 0}` with
/// `P^Q = P + eQ`, together with its flat part when the budget allows.
#[derive(Debug, Clone)]
pub struct XrFamily {
    pub r: usize,
    pub raw: PolySystem,
    pub flat: Option<PolySystem>,
}

impl XrFamily {
    pub fn saturated(&self) -> bool {
        self.flat.is_some()
    }
}

pub fn build_xr(p: &MultiPoly, xi: &VectorField, q: &MultiPoly, r: usize, budget: usize) -> Result<XrFamily> {
    let ctx = xi.ctx();
    if p.ctx() != ctx || q.ctx() != ctx {
        return Err(Error::ContextMismatch);
    }
    let n = ctx.arity();
    if r == 0 || r > n {
        return Err(Error::OutOfRange(format!("X^r needs 1 <= r <= {n}, got {r}")));
    }
    // ξ does not involve e, so ξ^i(P + eQ) = ξ^i P + e ξ^i Q.
    let (mut pi, mut qi) = (p.clone(), q.clone());
    let e = MultiPoly::e(&ctx.extend_e());
    let mut eqs = Vec::with_capacity(r);
    for _ in 0..r {
        eqs.push(&pi.lift_e() + &(&e * &qi.lift_e()));
        pi = xi.apply(&pi);
        qi = xi.apply(&qi);
    }
    let raw = PolySystem::new(e.ctx(), eqs)?;
    let flat = match flat_part(&raw, budget) {
        Ok(f) => Some(f),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(err) => return Err(err),
    };
    Ok(XrFamily { r, raw, flat })
}

/// A dense polynomial of the given degree with seeded nonzero coefficients.
pub fn random_poly(ctx: &Ctx, degree: u32, pack: &ParamPack, tag: &str, path: &[u64]) -> MultiPoly {
    let mut rng = pack.rng(tag, path);
    let terms = (0..=degree)
        .flat_map(|d| monomials_of_degree(ctx.arity(), d))
        .map(|m| (m, pack.random_rational(&mut rng)))
        .collect::<Vec<_>>();
    MultiPoly::from_terms(ctx, terms)
}

#[derive(Debug, Clone, Serialize)]
pub struct VfPart {
    pub r: usize,
    pub q: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_rat_rows")]
    pub functionals: Vec<Vec<Rational>>,
    /// Whether the flat part of `X^r` was computed within budget.
    pub saturated: bool,
    pub components: usize,
}

/// `Γ(P; ξ) = Σ_r Σ_q Γ_{r,q}` where `Γ_{r,q}` is the Betti cycle of `X^r` for
/// index `q`. Component traces are prefixed with `[r, q]`.
#[derive(Debug, Clone, Serialize)]
pub struct VfCycle {
    #[serde(rename = "Q")]
    pub q_poly: String,
    pub parts: Vec<VfPart>,
    pub cycle: MultiplicityCycle,
}

/// Builds `Γ(P; ξ)` for an explicit deformation direction `Q`.
///
/// The Σ systems are built from the raw `X^r` equations: saturation by `e`
/// does not change the fibers at `e ≠ 0`, which is all `Σ` sees.
pub fn vf_cycle_with_q(
    p: &MultiPoly,
    xi: &VectorField,
    q: &MultiPoly,
    pack: &ParamPack,
    budget: usize,
) -> Result<VfCycle> {
    let n = xi.ctx().arity();
    let families: Vec<XrFamily> = (1..=n)
        .into_par_iter()
        .map(|r| build_xr(p, xi, q, r, budget))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (1..=n).flat_map(|r| (0..=n - r).map(move |q| (r, q))).collect();
    let built: Vec<(VfPart, MultiplicityCycle)> = jobs
        .par_iter()
        .map(|&(r, qi)| {
            let fam = &families[r - 1];
            let sub = pack.derive("vf-part", &[r as u64, qi as u64]);
            let b = betti_cycle(fam.raw.polys(), qi, &sub)?;
            let part = VfPart {
                r,
                q: qi,
                k: b.k,
                functionals: b.functionals,
                saturated: fam.saturated(),
                components: b.cycle.len(),
            };
            Ok((part, b.cycle))
        })
        .collect::<Result<_>>()?;
    let (parts, cycles): (Vec<_>, Vec<_>) = built.into_iter().unzip();
    let labelled = parts.iter().map(|pt| vec![pt.r, pt.q]).zip(cycles).collect();
    Ok(VfCycle {
        q_poly: q.to_string(),
        parts,
        cycle: MultiplicityCycle::concat(labelled)?,
    })
}

/// Builds `Γ(P; ξ)` with `Q` of degree `q_degree` (default `n − 1`) drawn from
/// the pack; `attempt` selects an independent draw.
pub fn vf_cycle(
    p: &MultiPoly,
    xi: &VectorField,
    q_degree: Option<u32>,
    attempt: u32,
    pack: &ParamPack,
    budget: usize,
) -> Result<VfCycle> {
    let ctx = xi.ctx();
    let deg = q_degree.unwrap_or(ctx.arity() as u32 - 1);
    let q = random_poly(ctx, deg, pack, "vf-q", &[u64::from(attempt)]);
    vf_cycle_with_q(p, xi, &q, pack, budget)
}

#[derive(Debug, Clone, Serialize)]
pub struct PartValue {
    pub r: usize,
    pub q: usize,
    pub value: MultValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct VfBound {
    pub value: MultValue,
    /// Number of `Q` draws used; a draw is rejected when some component is
    /// infinite at the point.
    pub attempts: u32,
    pub per_part: Vec<PartValue>,
    pub cycle: VfCycle,
    pub eval: CycleEval,
}

/// `mult_p Γ(P; ξ)`, redrawing `Q` up to `max_attempts` times while some
/// component evaluates to infinity.
pub fn vf_bound(
    p: &MultiPoly,
    xi: &VectorField,
    pt: &PointQ,
    q_degree: Option<u32>,
    pack: &ParamPack,
    cap: u32,
    max_attempts: u32,
) -> Result<VfBound> {
    if xi.vanishes_at(pt) {
        return Err(Error::Singular);
    }
    let mut attempt = 0;
    loop {
        let cycle = vf_cycle(p, xi, q_degree, attempt, pack, crate::groebner::DEFAULT_BUDGET)?;
        let eval = cycle_mult_at(&cycle.cycle, pt, pack, cap)?;
        attempt += 1;
        let degenerate = eval.components.iter().any(|c| c.result.value == MultValue::Infinite);
        if degenerate && attempt < max_attempts.max(1) {
            continue;
        }
        let per_part = cycle
            .parts
            .iter()
            .map(|part| PartValue {
                r: part.r,
                q: part.q,
                value: eval
                    .components
                    .iter()
                    .filter(|c| c.trace[..2] == [part.r, part.q])
                    .fold(MultValue::Finite(0), |a, c| a.add(c.result.value)),
            })
            .collect();
        return Ok(VfBound {
            value: eval.value,
            attempts: attempt,
            per_part,
            cycle,
            eval,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat, VarContext};
    use crate::cycle::cycle_degree_profile;
    use crate::oracle::{lie_multiplicity, milnor_number};

    fn polys(ctx: &Ctx, s: &[&str]) -> Vec<MultiPoly> {
        s.iter().map(|t| parse_poly(t, ctx).unwrap()).collect()
    }

    fn nonzero(sys: &PolySystem) -> Vec<String> {
        sys.polys()
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn sigma_examples() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let s = sigma_system(&polys(&c, &["x^2 + y^2 - e"]), &[]).unwrap();
        assert_eq!(s.len(), 1 + 3);
        let expected: Vec<String> = polys(&c, &["x^2 + y^2 - e", "2*x", "2*y"])
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(nonzero(&s), expected);

        let x = VarContext::new(&["x", "y"]).unwrap();
        let s = sigma_system(&polys(&c, &["y - e"]), &[OneForm::basis(&x, 0)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(nonzero(&s), vec!["y - e".to_string(), "-1".to_string()]);

        let s = sigma_system(&polys(&c, &["x - e", "x*y - e"]), &[]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(nonzero(&s).len(), 3);

        let err = sigma_system(&polys(&c, &["x - e"]), &[OneForm::basis(&x, 0), OneForm::basis(&x, 1)]);
        assert!(matches!(err, Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn sigma_counts_are_binomial() {
        let c = VarContext::with_e(&["x", "y", "z"]).unwrap();
        let x = VarContext::new(&["x", "y", "z"]).unwrap();
        let f = polys(&c, &["x*y - e"]);
        for k in 0..=2 {
            let ws: Vec<OneForm> = (0..k).map(|i| OneForm::basis(&x, i)).collect();
            let s = sigma_system(&f, &ws).unwrap();
            let b = k_subsets(4, k + 2).len();
            assert_eq!(s.len(), 1 + b);
        }
    }

    #[test]
    fn goodness_of_isolated_singularity() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let g = goodness(&polys(&c, &["x^3 + y^2 - e"]), &PointQ::origin(2), 500).unwrap();
        assert_eq!(g, Goodness::Certified);
        // A constant family degenerates everywhere on its critical curve.
        let g = goodness(&polys(&c, &["y^2"]), &PointQ::origin(2), 500).unwrap();
        assert_eq!(g, Goodness::UnverifiedGood);
    }

    #[test]
    fn betti_bounds_dominate_milnor_numbers() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let x = VarContext::new(&["x", "y"]).unwrap();
        let pack = ParamPack::new(11);
        for k in 1..=2u32 {
            let f = polys(&c, &[&format!("x^{} + y^2 - e", k + 1)]);
            let mu = milnor_number(
                &parse_poly(&format!("x^{} + y^2", k + 1), &x).unwrap(),
                &PointQ::origin(2),
                64,
            )
            .unwrap();
            assert_eq!(mu.value, MultValue::Finite(u64::from(k)));
            let b = betti_bound(&f, &PointQ::origin(2), 1, &pack, 64).unwrap();
            assert!(b.value.finite().unwrap() >= u64::from(k), "k={k}: {:?}", b.value);
            assert_eq!(b.goodness, Goodness::Certified);
        }
    }

    #[test]
    fn smooth_sheet() {
        let c = VarContext::with_e(&["x"]).unwrap();
        let pack = ParamPack::new(3);
        let f = polys(&c, &["x - e"]);
        let b = betti_bound(&f, &PointQ::origin(1), 0, &pack, 64).unwrap();
        assert!(b.value.finite().unwrap() >= 1);
        let eb = euler_bound(&f, &PointQ::origin(1), &pack, 64).unwrap();
        assert!(eb.value.finite().unwrap() >= 1);
        let off = euler_bound(&f, &PointQ::from_ints(&[5]), &pack, 64).unwrap();
        assert_eq!(off.value, MultValue::Finite(0));
        assert!(matches!(
            betti_bound(&f, &PointQ::origin(1), 1, &pack, 64),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn euler_of_quadric() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let eb = euler_bound(
            &polys(&c, &["x^2 + y^2 - e"]),
            &PointQ::origin(2),
            &ParamPack::new(5),
            64,
        )
        .unwrap();
        assert!(eb.value.finite().unwrap() >= 2);
        assert_eq!(eb.per_r.len(), 2);
    }

    #[test]
    fn degree_constants() {
        assert_eq!(milnor_degree_constant(2, 1, 1, 0, 5).unwrap(), 25);
        assert_eq!(milnor_degree_constant(3, 1, 1, 0, 2).unwrap(), 3 * 8);
        assert_eq!(milnor_degree_constant(3, 2, 0, 1, 2).unwrap(), 4 * 4);
        assert!(milnor_degree_constant(2, 1, 2, 0, 2).is_err());
        for n in 1..=4 {
            for m in 1..=n {
                for r in 0..=n - m {
                    let k = n - m - r;
                    for j in 0..=k {
                        let c = simple_constant(n, k, j).unwrap();
                        let lhs = milnor_degree_constant(n, m, r, j, 1).unwrap();
                        assert_eq!(lhs, (m as u128).pow((n - j) as u32) * c);
                    }
                }
            }
        }
    }

    #[test]
    fn betti_profile_within_constant() {
        let c = VarContext::with_e(&["x", "y"]).unwrap();
        let pack = ParamPack::new(2);
        let f = polys(&c, &["x^2 + x*y + y^2 - e"]);
        for r in 0..=1 {
            let b = betti_cycle(&f, r, &pack).unwrap();
            let profile = cycle_degree_profile(&b.cycle);
            for j in 0..=b.k {
                let bound = milnor_degree_constant(2, 1, r, j, 2).unwrap();
                assert!(u128::from(profile[2 - j]) <= bound, "r={r} j={j}: {profile:?}");
            }
        }
    }

    #[test]
    fn xr_examples() {
        let x = VarContext::new(&["x", "y"]).unwrap();
        let xi = VectorField::new(&x, polys(&x, &["1", "2*x"])).unwrap();
        let p = parse_poly("y", &x).unwrap();
        let one = MultiPoly::one(&x);
        let x1 = build_xr(&p, &xi, &one, 1, 200).unwrap();
        assert_eq!(nonzero(&x1.raw), vec!["y + e".to_string()]);
        let x2 = build_xr(&p, &xi, &one, 2, 200).unwrap();
        assert_eq!(nonzero(&x2.raw), vec!["y + e".to_string(), "2*x".to_string()]);
        assert!(x2.saturated());
        assert!(matches!(build_xr(&p, &xi, &one, 3, 200), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn vf_worked_instance() {
        let x = VarContext::new(&["x", "y"]).unwrap();
        let xi = VectorField::new(&x, polys(&x, &["1", "2*x"])).unwrap();
        let p = parse_poly("y", &x).unwrap();
        let o = PointQ::origin(2);
        let oracle = lie_multiplicity(&xi, &p, &o, 64).unwrap();
        assert_eq!(oracle.value, MultValue::Finite(2));
        let b = vf_bound(&p, &xi, &o, None, &ParamPack::new(1), 64, 3).unwrap();
        assert_eq!(b.cycle.parts.len(), 3);
        assert!(b.value.finite().unwrap() >= 2, "{:?}", b.value);
        assert_eq!(
            b.per_part.iter().fold(MultValue::Finite(0), |a, v| a.add(v.value)),
            b.value
        );
    }

    #[test]
    fn vf_off_zero_set() {
        let x = VarContext::new(&["x", "y"]).unwrap();
        let xi = VectorField::new(&x, polys(&x, &["1", "2*x"])).unwrap();
        let p = parse_poly("y - 1", &x).unwrap();
        let b = vf_bound(&p, &xi, &PointQ::origin(2), None, &ParamPack::new(1), 64, 1).unwrap();
        assert_eq!(b.value, MultValue::Finite(0));
        let zero = VectorField::new(&x, polys(&x, &["x", "y"])).unwrap();
        assert!(matches!(
            vf_bound(&p, &zero, &PointQ::origin(2), None, &ParamPack::new(1), 64, 1),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn random_q_has_requested_degree() {
        let x = VarContext::new(&["x", "y"]).unwrap();
        let q = random_poly(&x, 1, &ParamPack::new(4), "vf-q", &[0]);
        assert_eq!(q.total_degree(), 1);
        assert_eq!(q.num_terms(), 3);
        assert!(q.terms().all(|(_, c)| *c != rat(0)));
    }
}
