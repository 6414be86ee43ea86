//! Multiplicity cycles: smoothing deformations, the recursive construction,
//! evaluation of local multiplicities at points, degree bookkeeping and the
//! closed-form degree bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Ctx, MultiPoly, PointQ, Rational, VarContext};
use crate::error::{Error, Result};
use crate::forms::{g_form, integrability_check, OneForm};
use crate::groebner::{
    affine_dimension, buchberger, flat_part, in_radical, reduce, saturate_by, MonomialOrder, PolySystem, DEFAULT_BUDGET,
};
use crate::local::{deformation_multiplicity, deformation_multiplicity_checked, MultResult, MultValue};
use crate::params::{trace_path, ParamPack};

/// One summand of a multiplicity cycle: the flat limit of `{system = 0}` as
/// `e → 0`, a cycle of dimension `dim` in x-space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleComponent {
    pub system: PolySystem,
    pub dim: usize,
    pub trace: Vec<usize>,
    pub coefficient: u32,
    /// The component only counts at points where all of these vanish.
    pub support: Vec<MultiPoly>,
}

/// The random data drawn at one recursion node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeParams {
    pub trace: Vec<usize>,
    #[serde(serialize_with = "ser_rats")]
    pub c_def: Vec<Rational>,
    #[serde(serialize_with = "ser_rat_rows")]
    pub dh: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser_rat")]
    pub c_rolle: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityCycle {
    ctx: Ctx,
    pub components: Vec<CycleComponent>,
    pub nodes: Vec<NodeParams>,
    pub n_exp: u32,
    /// Linear combination matrix used by [`general_cycle`].
    pub combination: Option<Vec<Vec<Rational>>>,
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn ser_rats<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

pub(crate) fn ser_rat_rows<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        v.iter()
            .map(|row| row.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
    )
}

fn ser_opt_rat_rows<S: serde::Serializer>(
    v: &Option<Vec<Vec<Rational>>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(rows) => ser_rat_rows(rows, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct ComponentJson {
    system: Vec<String>,
    dim: usize,
    trace: Vec<usize>,
    coefficient: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    support: Vec<String>,
}

#[derive(Serialize)]
struct CycleJson<'a> {
    variables: &'a [String],
    components: Vec<ComponentJson>,
    degree_profile: Vec<u64>,
    n_exp: u32,
    nodes: &'a [NodeParams],
    #[serde(serialize_with = "ser_opt_rat_rows")]
    combination: &'a Option<Vec<Vec<Rational>>>,
}

impl Serialize for MultiplicityCycle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycleJson {
            variables: self.ctx.names(),
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    system: c.system.polys().iter().map(|p| p.to_string()).collect(),
                    dim: c.dim,
                    trace: c.trace.clone(),
                    coefficient: c.coefficient,
                    support: c.support.iter().map(|p| p.to_string()).collect(),
                })
                .collect(),
            degree_profile: cycle_degree_profile(self),
            n_exp: self.n_exp,
            nodes: &self.nodes,
            combination: &self.combination,
        }
        .serialize(s)
    }
}

impl MultiplicityCycle {
    /// Context `(x, e)` of the component systems.
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn space_dim(&self) -> usize {
        self.ctx.space_dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sum of several cycles over the same space. Each part's traces are
    /// prefixed with its label so that slice draws stay distinct.
    pub fn concat(parts: Vec<(Vec<usize>, MultiplicityCycle)>) -> Result<MultiplicityCycle> {
        let Some(ctx) = parts.first().map(|(_, c)| c.ctx.clone()) else {
            return Err(Error::ShapeMismatch("sum of no cycles".into()));
        };
        let mut out = MultiplicityCycle {
            ctx,
            components: Vec::new(),
            nodes: Vec::new(),
            n_exp: 0,
            combination: None,
        };
        for (label, cycle) in parts {
            if cycle.ctx != out.ctx {
                return Err(Error::ContextMismatch);
            }
            out.n_exp = out.n_exp.max(cycle.n_exp);
            for mut c in cycle.components {
                c.trace.splice(0..0, label.iter().copied());
                out.components.push(c);
            }
            for mut node in cycle.nodes {
                node.trace.splice(0..0, label.iter().copied());
                out.nodes.push(node);
            }
        }
        Ok(out)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut v = vec![0; self.space_dim() + 1];
        for c in &self.components {
            v[c.dim] += 1;
        }
        v
    }
}

/// `f̃_i = f_i − c_i e^N`, in the context extended by `e`.
pub fn smoothing_deform(f: &[MultiPoly], c: &[Rational], n_exp: u32) -> Result<Vec<MultiPoly>> {
    if f.len() != c.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} functions but {} smoothing constants",
            f.len(),
            c.len()
        )));
    }
    Ok(f.iter()
        .zip(c)
        .map(|(fi, ci)| {
            let lifted = fi.lift_e();
            let e = MultiPoly::e(lifted.ctx());
            &lifted - &e.pow(n_exp).scale(ci)
        })
        .collect())
}

/// Counts of the recursion: `a(0) = 1`, `a(k) = 1 + k·a(k−1)`.
pub fn component_count(k: usize) -> u64 {
    (1..=k as u64).fold(1, |a, i| 1 + i * a)
}

fn space_ctx(f: &[MultiPoly], omegas: &[OneForm]) -> Result<Ctx> {
    let ctx = match (f.first(), omegas.first()) {
        (Some(p), _) => p.ctx().strip_e(),
        (None, Some(w)) => w.ctx().strip_e(),
        (None, None) => return Err(Error::ShapeMismatch("empty system".into())),
    };
    if f.iter().any(|p| p.ctx().strip_e() != ctx) {
        return Err(Error::ContextMismatch);
    }
    if omegas.iter().any(|w| w.ctx() != &ctx) {
        return Err(Error::ContextMismatch);
    }
    Ok(ctx)
}

/// Builds `Γ(f; ω)` for `n − k` functions and an integrable Pfaffian system of
/// `k` one-forms. Integrability is certified by the Frobenius chain condition.
pub fn build_cycle(f: &[MultiPoly], omegas: &[OneForm], pack: &ParamPack) -> Result<MultiplicityCycle> {
    let x = space_ctx(f, omegas)?;
    let n = x.arity();
    if f.len() + omegas.len() != n {
        return Err(Error::CountMismatch {
            expected: n - omegas.len().min(n),
            actual: f.len(),
        });
    }
    if !omegas.is_empty() {
        let report = integrability_check(omegas, &PointQ::origin(n))?;
        if !report.frobenius_chain {
            return Err(Error::NonIntegrable(
                "d(omega_i) ^ omega_1 ^ ... ^ omega_i does not vanish identically".into(),
            ));
        }
    }
    let max_deg = f.iter().map(MultiPoly::total_degree).max().unwrap_or(0);
    let n_exp = pack.smoothing_exponent(max_deg);
    let xe = x.extend_e();
    let fs: Vec<MultiPoly> = f.iter().map(MultiPoly::lift_e).collect();
    let ws: Vec<OneForm> = omegas.iter().map(OneForm::lift_e).collect();
    let mut cycle = MultiplicityCycle {
        ctx: xe,
        components: Vec::new(),
        nodes: Vec::new(),
        n_exp,
        combination: None,
    };
    build_node(&fs, &ws, pack, n_exp, &mut Vec::new(), &mut cycle)?;
    Ok(cycle)
}

fn draw_node(pack: &ParamPack, trace: &[usize], m: usize, k: usize, n: usize) -> NodeParams {
    let path = trace_path(trace);
    let mut rng = pack.rng("node", &path);
    let c_def = if pack.degenerate {
        vec![crate::algebra::rat(0); m]
    } else {
        pack.random_vector(&mut rng, m)
    };
    let dh = if k == 0 {
        Vec::new()
    } else {
        pack.random_full_rank(&mut rng, k, n)
    };
    let c_rolle = pack.random_rational(&mut rng);
    NodeParams {
        trace: trace.to_vec(),
        c_def,
        dh,
        c_rolle,
    }
}

fn build_node(
    fs: &[MultiPoly],
    omegas: &[OneForm],
    pack: &ParamPack,
    n_exp: u32,
    trace: &mut Vec<usize>,
    out: &mut MultiplicityCycle,
) -> Result<()> {
    let xe = out.ctx.clone();
    let n = xe.space_dim();
    let k = omegas.len();
    let params = draw_node(pack, trace, fs.len(), k, n);
    let ft = smoothing_deform(fs, &params.c_def, n_exp)?;
    out.components.push(CycleComponent {
        system: PolySystem::new(&xe, ft.clone())?,
        dim: k,
        trace: trace.clone(),
        coefficient: 1,
        support: Vec::new(),
    });
    let dhs: Vec<OneForm> = params
        .dh
        .iter()
        .map(|row| {
            let mut coeffs = row.clone();
            coeffs.push(crate::algebra::rat(0));
            OneForm::constant(&xe, &coeffs)
        })
        .collect::<Result<_>>()?;
    let c = params.c_rolle.clone();
    out.nodes.push(params);
    for j in 1..=k {
        let g = g_form(&ft, &omegas[..k - j + 1], &dhs[..j - 1], &dhs[j - 1], &c)?;
        let mut child_f = ft.clone();
        child_f.push(g);
        let mut child_w: Vec<OneForm> = dhs[..j - 1].to_vec();
        child_w.extend_from_slice(&omegas[..k - j]);
        trace.push(j);
        build_node(&child_f, &child_w, pack, n_exp, trace, out)?;
        trace.pop();
    }
    Ok(())
}

/// Replaces `m ≥ n − k` functions by `n − k` random linear combinations (the
/// identity when `m = n − k`) and builds the cycle of the combinations.
pub fn general_cycle(f: &[MultiPoly], omegas: &[OneForm], pack: &ParamPack) -> Result<MultiplicityCycle> {
    let x = space_ctx(f, omegas)?;
    let n = x.arity();
    if omegas.len() > n {
        return Err(Error::CountMismatch {
            expected: n,
            actual: omegas.len(),
        });
    }
    let want = n - omegas.len();
    if f.len() < want {
        return Err(Error::CountMismatch {
            expected: want,
            actual: f.len(),
        });
    }
    if f.len() == want {
        return build_cycle(f, omegas, pack);
    }
    let lambda = pack.random_full_rank(&mut pack.rng("lambda", &[]), want, f.len());
    let fe: Vec<MultiPoly> = f.iter().map(MultiPoly::lift_e).collect();
    let xe = fe[0].ctx().clone();
    let combos: Vec<MultiPoly> = lambda
        .iter()
        .map(|row| {
            row.iter()
                .zip(&fe)
                .fold(MultiPoly::zero(&xe), |acc, (l, p)| &acc + &p.scale(l))
        })
        .collect();
    let mut cycle = build_cycle(&combos, omegas, pack)?;
    cycle.combination = Some(lambda);
    Ok(cycle)
}

/// Per-codimension Bezout bookkeeping: for each dimension `j`, the sum over the
/// dimension-`j` components of the product of the x-degrees of their equations,
/// stored at index `n − j`.
pub fn cycle_degree_profile(cycle: &MultiplicityCycle) -> Vec<u64> {
    let n = cycle.space_dim();
    let mut profile = vec![0u64; n + 1];
    for c in &cycle.components {
        let deg = c
            .system
            .polys()
            .iter()
            .map(|p| if p.is_zero() { 1 } else { p.space_degree().max(0) as u64 })
            .fold(1u64, |a, d| a.saturating_mul(d));
        let slot = &mut profile[n - c.dim];
        *slot = slot.saturating_add(deg.saturating_mul(u64::from(c.coefficient)));
    }
    profile
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentEval {
    pub trace: Vec<usize>,
    pub dim: usize,
    pub result: MultResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleEval {
    pub value: MultValue,
    pub components: Vec<ComponentEval>,
}

impl CycleEval {
    /// Traces of components whose evaluation hit the cap.
    pub fn capped(&self) -> Vec<Vec<usize>> {
        self.components
            .iter()
            .filter(|c| c.result.value == MultValue::CapExceeded)
            .map(|c| c.trace.clone())
            .collect()
    }
}

/// `mult_p Γ`: the sum over components of the deformation count of the
/// component system cut by `dim` random affine-linear slices through `p`,
/// minimised over `slice_trials` independent slice draws.
pub fn cycle_mult_at(cycle: &MultiplicityCycle, p: &PointQ, pack: &ParamPack, cap: u32) -> Result<CycleEval> {
    if cap < 1 {
        return Err(Error::InvalidCap);
    }
    if p.dim() != cycle.space_dim() {
        return Err(Error::ShapeMismatch(format!(
            "point has {} coordinates, cycle lives in dimension {}",
            p.dim(),
            cycle.space_dim()
        )));
    }
    let results: Vec<Result<MultResult>> = cycle
        .components
        .par_iter()
        .map(|c| component_mult(c, p, pack, cap))
        .collect();
    let mut value = MultValue::Finite(0);
    let mut components = Vec::with_capacity(results.len());
    for (c, r) in cycle.components.iter().zip(results) {
        let r = r?;
        let weighted = match r.value {
            MultValue::Finite(v) => MultValue::Finite(v * u64::from(c.coefficient)),
            other => other,
        };
        value = value.add(weighted);
        components.push(ComponentEval {
            trace: c.trace.clone(),
            dim: c.dim,
            result: r,
        });
    }
    Ok(CycleEval { value, components })
}

fn point_tag(p: &PointQ) -> String {
    let coords: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
    format!("slice:{}", coords.join(","))
}

/// Local multiplicity at `p` of one component.
/// Each proper slice is tried this many times at most before giving up.
const SLICE_REDRAWS: u32 = 3;

pub fn component_mult(c: &CycleComponent, p: &PointQ, pack: &ParamPack, cap: u32) -> Result<MultResult> {
    let zero = MultResult::finite(0, 0, cap);
    let pe = p.with_e_zero();
    if c.support.iter().any(|h| !num_traits::Zero::is_zero(&h.eval(&pe))) {
        return Ok(zero);
    }
    if !c.system.vanishes_at(&pe) {
        return Ok(zero);
    }
    if c.dim == 0 {
        return deformation_multiplicity(&c.system, p, cap);
    }
    let n = p.dim();
    if c.dim > n {
        return Err(Error::ShapeMismatch(format!(
            "component of dimension {} in {n}-space",
            c.dim
        )));
    }
    let m = n - c.dim;
    let uctx = VarContext::with_e(VarContext::numbered("u", m).names())?;
    let tag = point_tag(p);
    let mut path = trace_path(&c.trace);
    path.push(0);
    // Slices meeting the component improperly at `p` are redrawn; they only
    // count when no proper slice turns up.
    let wanted = pack.slice_trials.max(1);
    let mut best: Option<MultResult> = None;
    let mut fallback: Option<MultResult> = None;
    let mut proper = 0;
    for trial in 0..wanted * SLICE_REDRAWS {
        *path.last_mut().expect("nonempty path") = u64::from(trial);
        let mut rng = pack.rng(&tag, &path);
        // Columns span a random (n − dim)-dimensional affine subspace through p.
        let basis = pack.random_full_rank(&mut rng, m, n);
        let mut images: Vec<MultiPoly> = (0..n)
            .map(|i| {
                let mut img = MultiPoly::constant(&uctx, p.coords()[i].clone());
                for (j, row) in basis.iter().enumerate() {
                    img = &img + &MultiPoly::var(&uctx, j).scale(&row[i]);
                }
                img
            })
            .collect();
        images.push(MultiPoly::e(&uctx));
        let restricted: Vec<MultiPoly> = c
            .system
            .polys()
            .iter()
            .map(|f| f.compose(&images))
            .collect::<Result<_>>()?;
        let (r, ok) = deformation_multiplicity_checked(&PolySystem::new(&uctx, restricted)?, &PointQ::origin(m), cap)?;
        let slot = if ok { &mut best } else { &mut fallback };
        *slot = Some(match *slot {
            Some(b) if b.value.min(r.value) == b.value => b,
            _ => r,
        });
        if ok {
            proper += 1;
            if proper == wanted || r.value == MultValue::Finite(0) {
                break;
            }
        }
    }
    Ok(best.or(fallback).expect("at least one trial"))
}

fn factorial_ratio(k: usize, j: usize) -> Option<u128> {
    (j + 1..=k).try_fold(1u128, |a, i| a.checked_mul(i as u128))
}

fn overflow() -> Error {
    Error::OutOfRange("degree bound overflows 128 bits".into())
}

/// `k!/j! · 2^{(k−j)(k−j−1)/2} · β_1⋯β_{n−k} · S^{k−j}` with `S = Σα + Σβ`.
pub fn degree_bound(n: usize, k: usize, j: usize, betas: &[u64], alphas: &[u64]) -> Result<u128> {
    if j > k || k > n {
        return Err(Error::OutOfRange(format!(
            "need 0 <= j <= k <= n, got j={j}, k={k}, n={n}"
        )));
    }
    if betas.len() != n - k || alphas.len() != k {
        return Err(Error::ShapeMismatch(format!(
            "expected {} betas and {k} alphas, got {} and {}",
            n - k,
            betas.len(),
            alphas.len()
        )));
    }
    let s: u128 = betas.iter().chain(alphas).map(|&v| v as u128).sum();
    let t = (k - j) as u32;
    let two = 1u128.checked_shl(t * t.saturating_sub(1) / 2).ok_or_else(overflow)?;
    let prod = betas
        .iter()
        .try_fold(1u128, |a, &b| a.checked_mul(b as u128))
        .ok_or_else(overflow)?;
    factorial_ratio(k, j)
        .and_then(|f| f.checked_mul(two))
        .and_then(|v| v.checked_mul(prod))
        .and_then(|v| v.checked_mul(s.checked_pow(t)?))
        .ok_or_else(overflow)
}

/// `C_{n,k,j} = k!/j! · 2^{(k−j)(k−j−1)/2} · n^{k−j}`.
pub fn simple_constant(n: usize, k: usize, j: usize) -> Result<u128> {
    if j > k || k > n {
        return Err(Error::OutOfRange(format!(
            "need 0 <= j <= k <= n, got j={j}, k={k}, n={n}"
        )));
    }
    let t = (k - j) as u32;
    let two = 1u128.checked_shl(t * t.saturating_sub(1) / 2).ok_or_else(overflow)?;
    factorial_ratio(k, j)
        .and_then(|f| f.checked_mul(two))
        .and_then(|v| v.checked_mul((n as u128).checked_pow(t)?))
        .ok_or_else(overflow)
}

/// `C_{n,k,j} · d^{n−j}`, the bound when all degrees are at most `d`.
pub fn degree_bound_simple(n: usize, k: usize, j: usize, d: u64) -> Result<u128> {
    let c = simple_constant(n, k, j)?;
    (d as u128)
        .checked_pow((n - j) as u32)
        .and_then(|p| p.checked_mul(c))
        .ok_or_else(overflow)
}

/// Bounds from [`degree_bound`] for every dimension `j = 0..=k`, indexed by
/// codimension `n − j` like [`cycle_degree_profile`].
pub fn bound_profile(n: usize, k: usize, betas: &[u64], alphas: &[u64]) -> Result<Vec<Option<u128>>> {
    let mut out = vec![None; n + 1];
    for j in 0..=k {
        out[n - j] = Some(degree_bound(n, k, j, betas, alphas)?);
    }
    Ok(out)
}

/// Whether every profile entry is within the formula bound (entries of
/// dimension above `k` must be zero).
pub fn profile_within_bounds(profile: &[u64], bounds: &[Option<u128>]) -> bool {
    profile.iter().zip(bounds).all(|(&p, b)| match b {
        Some(b) => u128::from(p) <= *b,
        None => p == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarNote {
    pub trace: Vec<usize>,
    pub action: StarAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StarAction {
    /// `H` vanishes on the component: kept unchanged.
    Contained,
    /// Proper intersection: `H` appended, dimension lowered.
    Intersected,
    /// Containment could not be decided within budget; treated as proper.
    IntersectedUndecided,
    /// A zero-dimensional component not inside `H`: restricted to its points on `H`.
    Restricted,
    /// `H` contains some but not all components of the limit: the part inside
    /// `H` is kept and the rest is intersected with `H`.
    Split,
}

/// `Γ * H`: components on which `H` vanishes are kept, the others are
/// intersected with `H`. Containment is decided by radical membership of `H` in
/// the `e = 0` specialisation of the flat part. A component whose limit is
/// only partly inside `H` is split, so that each irreducible piece gets the
/// treatment it would get on its own.
pub fn star_intersect(
    cycle: &MultiplicityCycle,
    h: &MultiPoly,
    budget: usize,
) -> Result<(MultiplicityCycle, Vec<StarNote>)> {
    if h.is_zero() {
        return Err(Error::InvalidInput("star intersection with the zero divisor".into()));
    }
    let x = cycle.ctx.strip_e();
    if h.ctx().strip_e() != x {
        return Err(Error::ContextMismatch);
    }
    let hx = h.at_e_zero();
    let he = hx.lift_e();
    let lift = |sys: &PolySystem| PolySystem::new(&cycle.ctx, sys.polys().iter().map(MultiPoly::lift_e).collect());
    let mut out = cycle.clone();
    out.components.clear();
    let mut notes = Vec::new();
    for comp in &cycle.components {
        let mut comp = comp.clone();
        let limit = limit_system(&comp, &x, budget);
        let contained = limit.as_ref().and_then(|l| in_radical(&hx, l, budget).ok());
        let action = match (contained, comp.dim) {
            (Some(true), _) => StarAction::Contained,
            (_, 0) => {
                comp.support.push(he.clone());
                StarAction::Restricted
            }
            (Some(false), _) => match limit.as_ref().and_then(|l| split_limit(&comp, l, &hx, budget)) {
                Some((inside, outside)) => {
                    out.components.push(CycleComponent {
                        system: lift(&inside)?,
                        ..comp.clone()
                    });
                    comp.system = lift(&outside)?;
                    comp.system.push(he.clone())?;
                    comp.dim -= 1;
                    StarAction::Split
                }
                None => {
                    comp.system.push(he.clone())?;
                    comp.dim -= 1;
                    StarAction::Intersected
                }
            },
            (None, _) => {
                comp.system.push(he.clone())?;
                comp.dim -= 1;
                StarAction::IntersectedUndecided
            }
        };
        notes.push(StarNote {
            trace: comp.trace.clone(),
            action,
        });
        out.components.push(comp);
    }
    Ok((out, notes))
}

/// The `e = 0` specialisation of the flat part, with the support conditions.
fn limit_system(comp: &CycleComponent, x: &Ctx, budget: usize) -> Option<PolySystem> {
    let flat = flat_part(&comp.system, budget).ok()?;
    let mut limit: Vec<MultiPoly> = flat.polys().iter().map(MultiPoly::at_e_zero).collect();
    limit.extend(comp.support.iter().map(MultiPoly::at_e_zero));
    PolySystem::new(x, limit).ok()
}

/// Splits a limit not contained in `H` into the part inside `H`, of full
/// dimension, and the part outside (`L : H^∞`). `None` when nothing of full
/// dimension lies inside `H` or the budget runs out.
fn split_limit(
    comp: &CycleComponent,
    limit: &PolySystem,
    hx: &MultiPoly,
    budget: usize,
) -> Option<(PolySystem, PolySystem)> {
    let outside = saturate_by(limit, hx, budget).ok()?;
    let basis = buchberger(limit, MonomialOrder::GrevLex, budget).ok()?;
    if outside
        .polys()
        .iter()
        .all(|g| reduce(g, &basis, MonomialOrder::GrevLex).is_zero())
    {
        return None;
    }
    // A generic element of L : H^∞ vanishes on no component inside H.
    let pack = ParamPack::new(0);
    let coeffs = pack.random_vector(&mut pack.rng("star-split", &trace_path(&comp.trace)), outside.len());
    let g = outside
        .polys()
        .iter()
        .zip(&coeffs)
        .fold(MultiPoly::zero(hx.ctx()), |acc, (p, c)| &acc + &p.scale(c));
    if g.is_zero() {
        return None;
    }
    let inside = saturate_by(limit, &g, budget).ok()?;
    (affine_dimension(&inside, budget).ok()? == Some(comp.dim)).then_some((inside, outside))
}

/// Default budget for star intersections.
pub const STAR_BUDGET: usize = DEFAULT_BUDGET;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat};

    fn polys(ctx: &Ctx, ps: &[&str]) -> Vec<MultiPoly> {
        ps.iter().map(|s| parse_poly(s, ctx).unwrap()).collect()
    }

    fn single(ctx: &Ctx, ps: &[&str], dim: usize) -> MultiplicityCycle {
        MultiplicityCycle {
            ctx: ctx.clone(),
            components: vec![CycleComponent {
                system: PolySystem::new(ctx, polys(ctx, ps)).unwrap(),
                dim,
                trace: vec![],
                coefficient: 1,
                support: vec![],
            }],
            nodes: vec![],
            n_exp: 2,
            combination: None,
        }
    }

    #[test]
    fn smoothing_examples() {
        let x = VarContext::new(&["x"]).unwrap();
        let xe = x.extend_e();
        let f = smoothing_deform(&polys(&x, &["x"]), &[rat(1)], 2).unwrap();
        assert_eq!(f, polys(&xe, &["x - e^2"]));
        let xy = VarContext::new(&["x", "y"]).unwrap();
        let f = smoothing_deform(&polys(&xy, &["x", "y"]), &[rat(0), rat(0)], 3).unwrap();
        assert_eq!(f, polys(&xy.extend_e(), &["x", "y"]));
        let f = smoothing_deform(&polys(&xy, &["y - 1 - x"]), &[rat(3)], 4).unwrap();
        assert_eq!(f, polys(&xy.extend_e(), &["y - 1 - x - 3*e^4"]));
    }

    #[test]
    fn component_counts() {
        assert_eq!((0..4).map(component_count).collect::<Vec<_>>(), vec![1, 2, 5, 16]);
        let xy = VarContext::new(&["x", "y"]).unwrap();
        let w = OneForm::new(&xy, polys(&xy, &["-y", "1"])).unwrap();
        let c = build_cycle(&polys(&xy, &["y - 1 - x"]), &[w], &ParamPack::new(1)).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.count_by_dim(), vec![1, 1, 0]);
        let xyz = VarContext::new(&["x", "y", "z"]).unwrap();
        let w1 = OneForm::basis(&xyz, 0);
        let w2 = OneForm::basis(&xyz, 1);
        let c = build_cycle(&polys(&xyz, &["z - x*y"]), &[w1, w2], &ParamPack::new(1)).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.count_by_dim(), vec![2, 2, 1, 0]);
    }

    #[test]
    fn base_case() {
        let xy = VarContext::new(&["x", "y"]).unwrap();
        let c = build_cycle(&polys(&xy, &["x", "y"]), &[], &ParamPack::new(5)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.components[0].dim, 0);
        let e2 = MultiPoly::e(c.ctx()).pow(c.n_exp);
        let expected: Vec<MultiPoly> = polys(c.ctx(), &["x", "y"])
            .into_iter()
            .zip(&c.nodes[0].c_def)
            .map(|(p, ci)| &p - &e2.scale(ci))
            .collect();
        assert_eq!(c.components[0].system.polys(), &expected[..]);
    }

    #[test]
    fn contact_form_is_rejected() {
        let c3 = VarContext::new(&["x", "y", "z"]).unwrap();
        let w = OneForm::new(&c3, polys(&c3, &["z", "1", "0"])).unwrap();
        let r = build_cycle(&polys(&c3, &["x", "y"]), &[w], &ParamPack::new(1));
        assert!(matches!(r, Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn evaluation_examples() {
        let xye = VarContext::with_e(&["x", "y"]).unwrap();
        let pack = ParamPack::new(3);
        let c = single(&xye, &["x - e", "y - e"], 0);
        assert_eq!(
            cycle_mult_at(&c, &PointQ::origin(2), &pack, 64).unwrap().value,
            MultValue::Finite(1)
        );
        let xe = VarContext::with_e(&["x"]).unwrap();
        let c = single(&xe, &["x^2 - e"], 0);
        assert_eq!(
            cycle_mult_at(&c, &PointQ::origin(1), &pack, 64).unwrap().value,
            MultValue::Finite(2)
        );
        assert_eq!(
            cycle_mult_at(&c, &PointQ::from_ints(&[3]), &pack, 64).unwrap().value,
            MultValue::Finite(0)
        );
    }

    #[test]
    fn degree_profiles() {
        let xye = VarContext::with_e(&["x", "y"]).unwrap();
        assert_eq!(
            cycle_degree_profile(&single(&xye, &["x - e", "y - e"], 0)),
            vec![0, 0, 1]
        );
        let xe = VarContext::with_e(&["x"]).unwrap();
        assert_eq!(cycle_degree_profile(&single(&xe, &["x^2 - e"], 0)), vec![0, 2]);
        let xy = VarContext::new(&["x", "y"]).unwrap();
        let w = OneForm::new(&xy, polys(&xy, &["-y", "1"])).unwrap();
        let c = build_cycle(&polys(&xy, &["x^2 + y^2 - 1"]), &[w], &ParamPack::new(2)).unwrap();
        let prof = cycle_degree_profile(&c);
        assert!(prof[1] <= 2);
        let g = &c.components[1].system.polys()[1];
        assert!(prof[2] <= 2 * g.space_degree() as u64);
    }

    #[test]
    fn degree_formulas() {
        assert_eq!(degree_bound(2, 1, 1, &[2], &[1]).unwrap(), 2);
        assert_eq!(degree_bound(2, 1, 0, &[2], &[1]).unwrap(), 6);
        assert_eq!(degree_bound(3, 2, 0, &[1], &[1, 1]).unwrap(), 36);
        assert_eq!(simple_constant(2, 1, 0).unwrap(), 2);
        assert_eq!(degree_bound_simple(2, 1, 0, 3).unwrap(), 18);
        assert_eq!(degree_bound_simple(2, 1, 1, 3).unwrap(), 3);
        assert_eq!(simple_constant(3, 2, 0).unwrap(), 36);
        assert!(degree_bound(2, 1, 2, &[2], &[1]).is_err());
        assert!(degree_bound(2, 1, 0, &[2, 2], &[1]).is_err());
    }

    #[test]
    fn general_cycle_shapes() {
        let xy = VarContext::new(&["x", "y"]).unwrap();
        let w = OneForm::new(&xy, polys(&xy, &["-y", "1"])).unwrap();
        let pack = ParamPack::new(4);
        let c = general_cycle(&polys(&xy, &["x", "y", "x + y"]), std::slice::from_ref(&w), &pack).unwrap();
        assert_eq!(c.combination.as_ref().unwrap().len(), 1);
        assert_eq!(c.combination.as_ref().unwrap()[0].len(), 3);
        assert_eq!(c.len(), 2);
        let plain = general_cycle(&polys(&xy, &["x"]), std::slice::from_ref(&w), &pack).unwrap();
        assert_eq!(
            plain,
            build_cycle(&polys(&xy, &["x"]), std::slice::from_ref(&w), &pack).unwrap()
        );
        assert!(general_cycle(&polys(&xy, &[]), &[w], &pack).is_err());
    }

    #[test]
    fn star_examples() {
        let xye = VarContext::with_e(&["x", "y"]).unwrap();
        let xy = xye.strip_e();
        let c = single(&xye, &["x - e"], 1);
        let hx = MultiPoly::var(&xy, 0);
        let (s, notes) = star_intersect(&c, &hx, 500).unwrap();
        assert_eq!(notes[0].action, StarAction::Contained);
        assert_eq!(s, c);
        let hy = MultiPoly::var(&xy, 1);
        let (s, notes) = star_intersect(&c, &hy, 500).unwrap();
        assert_eq!(notes[0].action, StarAction::Intersected);
        assert_eq!(s.components[0].dim, 0);
        assert_eq!(s.components[0].system.polys(), &polys(&xye, &["x - e", "y"])[..]);
        let (s, _) = star_intersect(&c, &MultiPoly::one(&xy), 500).unwrap();
        let pack = ParamPack::new(1);
        for pt in [[0, 0], [0, 1], [2, 3]] {
            let v = cycle_mult_at(&s, &PointQ::from_ints(&pt), &pack, 64).unwrap().value;
            assert_eq!(v, MultValue::Finite(0));
        }
    }

    #[test]
    fn star_restricts_points() {
        let xye = VarContext::with_e(&["x", "y"]).unwrap();
        let xy = xye.strip_e();
        let c = single(&xye, &["x*(x - 1) - e", "y - e"], 0);
        let h = parse_poly("x", &xy).unwrap();
        let (s, notes) = star_intersect(&c, &h, 500).unwrap();
        assert_eq!(notes[0].action, StarAction::Restricted);
        let pack = ParamPack::new(1);
        let at =
            |cy: &MultiplicityCycle, p: [i64; 2]| cycle_mult_at(cy, &PointQ::from_ints(&p), &pack, 64).unwrap().value;
        assert_eq!(at(&s, [0, 0]), MultValue::Finite(1));
        assert_eq!(at(&s, [1, 0]), MultValue::Finite(0));
        assert_eq!(at(&c, [1, 0]), MultValue::Finite(1));
    }

    #[test]
    fn star_splits_reducible_limits() {
        let xye = VarContext::with_e(&["x", "y"]).unwrap();
        let xy = xye.strip_e();
        let c = single(&xye, &["x*y - e"], 1);
        let (s, notes) = star_intersect(&c, &MultiPoly::var(&xy, 1), 500).unwrap();
        assert_eq!(notes[0].action, StarAction::Split);
        assert_eq!(s.components.iter().map(|c| c.dim).collect::<Vec<_>>(), vec![1, 0]);
        let pack = ParamPack::new(1);
        let at =
            |cy: &MultiplicityCycle, p: [i64; 2]| cycle_mult_at(cy, &PointQ::from_ints(&p), &pack, 64).unwrap().value;
        for p in [[0, 0], [1, 0], [-2, 0]] {
            assert_eq!(at(&s, p), at(&c, p));
        }
        assert_eq!(at(&s, [0, 0]), MultValue::Finite(2));
    }

    #[test]
    fn improper_slices_are_redrawn() {
        // A slice direction parallel to the line meets it improperly and
        // counts zero; it must never win the minimum over trials.
        let xe = VarContext::with_e(&["x", "y"]).unwrap();
        let c = single(&xe, &["-35*e^3 - x + y - 1"], 1);
        let p = PointQ::from_ints(&[1, 2]);
        for seed in 0..300 {
            let pack = ParamPack::new(seed);
            assert_eq!(
                cycle_mult_at(&c, &p, &pack, 16).unwrap().value,
                MultValue::Finite(1),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn seed_determinism() {
        let xy = VarContext::new(&["x", "y"]).unwrap();
        let w = OneForm::new(&xy, polys(&xy, &["-y", "1"])).unwrap();
        let f = polys(&xy, &["y - 1 - x"]);
        let a = serde_json::to_string(&build_cycle(&f, std::slice::from_ref(&w), &ParamPack::new(9)).unwrap()).unwrap();
        let b = serde_json::to_string(&build_cycle(&f, std::slice::from_ref(&w), &ParamPack::new(9)).unwrap()).unwrap();
        let c = serde_json::to_string(&build_cycle(&f, &[w], &ParamPack::new(10)).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
