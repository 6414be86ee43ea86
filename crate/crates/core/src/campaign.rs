//! Seeded verification campaigns: random instance families, the chain
//! `oracle ≤ mult_p Γ` at sample points, and degree profile checks.
//! Instances are independent and run in parallel; reports are ordered by
//! instance index so they are byte-identical for a fixed seed.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{monomials_of_degree, rat, Ctx, MultiPoly, PointQ, Rational, VarContext};
use crate::cycle::{bound_profile, build_cycle, cycle_degree_profile, cycle_mult_at, profile_within_bounds};
use crate::error::{Error, Result};
use crate::forms::{d_of, form_degree, OneForm};
use crate::groebner::PolySystem;
use crate::local::{local_multiplicity, MultValue};
use crate::milnor::{betti_bound, milnor_degree_constant, vf_bound};
use crate::oracle::{
    kernel_vector_field, leaf_intersection_multiplicity, lie_multiplicity, milnor_number, VectorField,
};
use crate::params::ParamPack;

pub const DEFAULT_TRUNCATION: u32 = 8;
/// Number of `Q` draws before a degenerate vector-field bound is accepted.
pub const VF_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ExactForms,
    KernelField,
    ClassicChain,
    MilnorAk,
    VfRandom,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::ExactForms,
        Family::KernelField,
        Family::ClassicChain,
        Family::MilnorAk,
        Family::VfRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ExactForms => "exact-forms",
            Family::KernelField => "kernel-field",
            Family::ClassicChain => "classic-chain",
            Family::MilnorAk => "milnor-Ak",
            Family::VfRandom => "vf-random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown campaign family `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CampaignOptions {
    pub family: Family,
    pub count: usize,
    /// Sample points per instance (exact-forms and kernel-field).
    pub points: usize,
    pub pack: ParamPack,
    pub cap: u32,
    /// Minimum leaf truncation order; raised to `bound + 2` at each point.
    pub truncation: u32,
    /// Test hook: halve every bound, which must make the campaign fail.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub halve_bounds: bool,
}

impl CampaignOptions {
    pub fn new(family: Family, count: usize, seed: u64) -> Self {
        CampaignOptions {
            family,
            count,
            points: 10,
            pack: ParamPack::new(seed),
            cap: crate::local::DEFAULT_CAP,
            truncation: DEFAULT_TRUNCATION,
            halve_bounds: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointCheck {
    pub point: PointQ,
    pub oracle: MultValue,
    /// An independent second oracle, which must agree with the first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_oracle: Option<MultValue>,
    pub bound: MultValue,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub kind: String,
    pub variables: Vec<String>,
    pub functions: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub forms: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<String>>,
    pub degree_profile: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_bounds: Option<Vec<Option<u128>>>,
    pub profile_ok: bool,
    pub checks: Vec<PointCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

impl InstanceReport {
    fn new(index: usize, kind: &str, ctx: &Ctx, functions: &[MultiPoly]) -> Self {
        InstanceReport {
            index,
            kind: kind.to_string(),
            variables: ctx.space_names().to_vec(),
            functions: functions.iter().map(|p| p.to_string()).collect(),
            forms: Vec::new(),
            field: None,
            degree_profile: Vec::new(),
            degree_bounds: None,
            profile_ok: true,
            checks: Vec::new(),
            error: None,
            pass: true,
        }
    }

    fn with_forms(mut self, omegas: &[OneForm]) -> Self {
        self.forms = omegas
            .iter()
            .map(|w| w.coeffs().iter().map(|c| c.to_string()).collect())
            .collect();
        self
    }

    fn finish(mut self) -> Self {
        self.pass = self.error.is_none() && self.profile_ok && self.checks.iter().all(|c| c.verdict != Verdict::Fail);
        self
    }

    fn merge_profile(&mut self, profile: Vec<u64>) {
        if self.degree_profile.len() < profile.len() {
            self.degree_profile.resize(profile.len(), 0);
        }
        for (a, b) in self.degree_profile.iter_mut().zip(profile) {
            *a = (*a).max(b);
        }
    }

    fn has_failure(&self) -> bool {
        !self.profile_ok || self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CampaignReport {
    pub family: Family,
    pub options: CampaignOptions,
    pub instances: Vec<InstanceReport>,
    pub passed_checks: usize,
    pub failed_checks: usize,
    pub excluded_checks: usize,
    pub errored_instances: usize,
    pub all_pass: bool,
    /// The failing instance with the fewest polynomial terms, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<InstanceReport>,
}

/// Runs a campaign; instance `i` draws everything from `pack.derive(family, [i])`.
pub fn run_campaign(opts: &CampaignOptions) -> CampaignReport {
    let instances: Vec<InstanceReport> = (0..opts.count).into_par_iter().map(|i| run_instance(opts, i)).collect();
    let count = |v: Verdict| {
        instances
            .iter()
            .flat_map(|r| &r.checks)
            .filter(|c| c.verdict == v)
            .count()
    };
    let counterexample = instances
        .iter()
        .filter(|r| r.has_failure())
        .min_by_key(|r| r.functions.iter().map(String::len).sum::<usize>())
        .cloned();
    CampaignReport {
        family: opts.family,
        options: opts.clone(),
        passed_checks: count(Verdict::Pass),
        failed_checks: count(Verdict::Fail),
        excluded_checks: count(Verdict::Excluded),
        errored_instances: instances.iter().filter(|r| r.error.is_some()).count(),
        all_pass: instances.iter().all(|r| !r.has_failure()),
        counterexample,
        instances,
    }
}

pub fn run_instance(opts: &CampaignOptions, index: usize) -> InstanceReport {
    let pack = opts.pack.derive(opts.family.name(), &[index as u64]);
    let mut rng = pack.rng("instance", &[]);
    match opts.family {
        Family::ExactForms => exact_forms_instance(opts, &pack, &mut rng, index),
        Family::KernelField => kernel_field_instance(opts, &pack, &mut rng, index),
        Family::ClassicChain => classic_chain_instance(opts, &pack, index),
        Family::MilnorAk => milnor_instance(opts, &pack, index),
        Family::VfRandom => vf_instance(opts, &pack, &mut rng, index),
    }
}

/// Compares an oracle value with a bound.
pub fn judge(oracle: MultValue, bound: MultValue) -> (Verdict, Option<String>) {
    match (oracle, bound) {
        (MultValue::Infinite, _) => (Verdict::Excluded, Some("infinite oracle, excluded".into())),
        (MultValue::CapExceeded, _) => (Verdict::Excluded, Some("oracle exceeded the cap".into())),
        _ => match oracle.le(bound) {
            Some(true) => (Verdict::Pass, None),
            Some(false) => (Verdict::Fail, Some(format!("oracle {oracle} exceeds bound {bound}"))),
            None => (Verdict::Excluded, Some("bound exceeded the cap".into())),
        },
    }
}

fn halve(v: MultValue, on: bool) -> MultValue {
    match v {
        MultValue::Finite(b) if on => MultValue::Finite(b / 2),
        other => other,
    }
}

fn excluded(point: &PointQ, note: String) -> PointCheck {
    PointCheck {
        point: point.clone(),
        oracle: MultValue::Finite(0),
        second_oracle: None,
        bound: MultValue::Finite(0),
        verdict: Verdict::Excluded,
        note: Some(note),
    }
}

/// The full chain for one Pfaffian system at one point: builds `Γ(f; ω)`,
/// checks its degree profile against the closed-form bound, evaluates
/// `mult_p Γ` and compares it with the leaf oracle (and an optional second
/// oracle, which must agree with the leaf oracle).
pub fn verify_bound(
    f: &[MultiPoly],
    omegas: &[OneForm],
    p: &PointQ,
    second: Option<MultValue>,
    pack: &ParamPack,
    cap: u32,
    truncation: u32,
    halve_bounds: bool,
) -> Result<(PointCheck, Vec<u64>, Vec<Option<u128>>)> {
    let cycle = build_cycle(f, omegas, pack)?;
    let n = cycle.space_dim();
    let betas: Vec<u64> = f.iter().map(|g| g.total_degree().max(0) as u64).collect();
    let alphas: Vec<u64> = omegas.iter().map(|w| form_degree(w).max(0) as u64).collect();
    let bounds = bound_profile(n, omegas.len(), &betas, &alphas)?;
    let profile = cycle_degree_profile(&cycle);
    let bound = halve(cycle_mult_at(&cycle, p, pack, cap)?.value, halve_bounds);
    let order = match bound {
        MultValue::Finite(b) => truncation.max(b as u32 + 2),
        _ => truncation,
    };
    let oracle = match leaf_intersection_multiplicity(f, omegas, p, order, cap) {
        Ok(l) => l.result.value,
        Err(e @ (Error::TruncationUnstable { .. } | Error::NonIntegrable(_))) => {
            return Ok((excluded(p, e.to_string()), profile, bounds));
        }
        Err(e) => return Err(e),
    };
    let (mut verdict, mut note) = judge(oracle, bound);
    if let Some(s) = second {
        if s != oracle {
            verdict = Verdict::Fail;
            note = Some(format!("oracles disagree: leaf {oracle}, second {s}"));
        }
    }
    let check = PointCheck {
        point: p.clone(),
        oracle,
        second_oracle: second,
        bound,
        verdict,
        note,
    };
    Ok((check, profile, bounds))
}

fn small_int(rng: &mut ChaCha8Rng, h: i64) -> Rational {
    rat(rng.gen_range(-h..=h))
}

/// A random polynomial of degree at most `deg` with small integer coefficients,
/// each monomial present with probability one half.
fn small_poly(ctx: &Ctx, deg: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let terms: Vec<_> = (0..=deg)
        .flat_map(|d| monomials_of_degree(ctx.arity(), d))
        .filter_map(|m| rng.gen_bool(0.5).then(|| (m, small_int(rng, 3))))
        .collect();
    MultiPoly::from_terms(ctx, terms)
}

fn small_point(rng: &mut ChaCha8Rng, n: usize) -> PointQ {
    PointQ((0..n).map(|_| small_int(rng, 2)).collect())
}

/// A polynomial in `x − p` with no constant term; without linear part when
/// `tangent` is set.
fn local_poly(ctx: &Ctx, p: &PointQ, deg: u32, tangent: bool, rng: &mut ChaCha8Rng) -> MultiPoly {
    let lo = if tangent { 2 } else { 1 };
    let terms: Vec<_> = (lo..=deg)
        .flat_map(|d| monomials_of_degree(ctx.arity(), d))
        .map(|m| (m, small_int(rng, 3)))
        .collect();
    let neg: Vec<Rational> = p.coords().iter().map(|c| -c.clone()).collect();
    MultiPoly::from_terms(ctx, terms).translate(&neg)
}

fn shift_to(f: &MultiPoly, p: &PointQ) -> MultiPoly {
    f - &MultiPoly::constant(f.ctx(), f.eval(p.coords()))
}

fn error_report(mut report: InstanceReport, e: Error) -> InstanceReport {
    report.error = Some(e.to_string());
    report.finish()
}

/// `ω_i = dF_i` with `deg F_i ≤ 2` and `n − k` functions of degree `≤ 2`. At
/// each sample point the functions are shifted by constants to vanish there,
/// and every third instance makes them tangent to the leaf at the first point.
fn exact_forms_instance(
    opts: &CampaignOptions,
    pack: &ParamPack,
    rng: &mut ChaCha8Rng,
    index: usize,
) -> InstanceReport {
    let n = rng.gen_range(2..=3usize);
    let k = rng.gen_range(1..n);
    let x = VarContext::numbered("x", n);
    let p0 = small_point(rng, n);
    let potentials: Vec<MultiPoly> = loop {
        let fs: Vec<MultiPoly> = (0..k).map(|_| small_poly(&x, 2, rng)).collect();
        let omegas: Vec<OneForm> = fs.iter().map(d_of).collect();
        let report = crate::forms::integrability_check(&omegas, &p0);
        if matches!(report, Ok(r) if r.nonvanishing) {
            break fs;
        }
    };
    let omegas: Vec<OneForm> = potentials.iter().map(d_of).collect();
    let tangent = index.is_multiple_of(3);
    let f: Vec<MultiPoly> = (0..n - k)
        .map(|_| {
            let lin = potentials.iter().fold(MultiPoly::zero(&x), |acc, pf| {
                &acc + &shift_to(pf, &p0).scale(&small_int(rng, 2))
            });
            &lin + &local_poly(&x, &p0, 2, tangent, rng)
        })
        .collect();
    let mut points = vec![p0];
    points.extend((1..opts.points).map(|_| small_point(rng, n)));
    let mut report = InstanceReport::new(index, &format!("n={n} k={k}"), &x, &f).with_forms(&omegas);
    report.degree_bounds = Some(Vec::new());
    for p in &points {
        let fp: Vec<MultiPoly> = f.iter().map(|g| shift_to(g, p)).collect();
        if fp.iter().any(MultiPoly::is_constant) {
            report.checks.push(excluded(p, "function constant after shift".into()));
            continue;
        }
        let mut dual = fp.clone();
        dual.extend(potentials.iter().map(|pf| shift_to(pf, p)));
        let second = match PolySystem::new(&x, dual).and_then(|s| local_multiplicity(&s, p, opts.cap)) {
            Ok(r) => r.value,
            Err(e) => return error_report(report, e),
        };
        match verify_bound(
            &fp,
            &omegas,
            p,
            Some(second),
            pack,
            opts.cap,
            opts.truncation,
            opts.halve_bounds,
        ) {
            Ok((check, profile, bounds)) => {
                report.profile_ok &= profile_within_bounds(&profile, &bounds);
                report.merge_profile(profile);
                report.degree_bounds = Some(bounds);
                report.checks.push(check);
            }
            Err(e) => return error_report(report, e),
        }
    }
    report.finish()
}

/// A random one-form in the plane (always integrable) and a function through
/// the sample point; the Lie order along the kernel field is the second
/// oracle.
fn kernel_field_instance(
    opts: &CampaignOptions,
    pack: &ParamPack,
    rng: &mut ChaCha8Rng,
    index: usize,
) -> InstanceReport {
    let x = VarContext::numbered("x", 2);
    let (omega, p) = loop {
        let w = OneForm::new(&x, vec![small_poly(&x, 1, rng), small_poly(&x, 1, rng)]).expect("two coefficients");
        let p = small_point(rng, 2);
        if w.eval(p.coords()).iter().any(|c| !c.is_zero()) {
            break (w, p);
        }
    };
    let xi = kernel_vector_field(std::slice::from_ref(&omega)).expect("planar kernel field");
    let tangent = index.is_multiple_of(2);
    let f = loop {
        let mut g = local_poly(&x, &p, 2, true, rng);
        if tangent {
            // Linear part along ω(p): the zero set is tangent to the leaf.
            let w0 = omega.eval(p.coords());
            let lin = (0..2).fold(MultiPoly::zero(&x), |acc, i| {
                &acc + &MultiPoly::var(&x, i)
                    .scale(&w0[i])
                    .translate(&[-p.coords()[0].clone(), -p.coords()[1].clone()])
            });
            g = &g + &lin;
        } else {
            g = &g + &local_poly(&x, &p, 1, false, rng);
        }
        if !g.is_constant() {
            break g;
        }
    };
    let mut report = InstanceReport::new(
        index,
        if tangent { "tangent" } else { "transverse" },
        &x,
        std::slice::from_ref(&f),
    )
    .with_forms(std::slice::from_ref(&omega));
    report.field = Some(xi.components().iter().map(|c| c.to_string()).collect());
    let mut points = vec![p];
    points.extend((1..opts.points).map(|_| small_point(rng, 2)));
    for p in &points {
        if omega.eval(p.coords()).iter().all(Zero::is_zero) {
            report.checks.push(excluded(p, "form vanishes at the point".into()));
            continue;
        }
        let fp = shift_to(&f, p);
        let second = match lie_multiplicity(&xi, &fp, p, opts.cap) {
            Ok(r) => r.value,
            Err(e) => return error_report(report, e),
        };
        match verify_bound(
            &[fp],
            std::slice::from_ref(&omega),
            p,
            Some(second),
            pack,
            opts.cap,
            opts.truncation,
            opts.halve_bounds,
        ) {
            Ok((check, profile, bounds)) => {
                report.profile_ok &= profile_within_bounds(&profile, &bounds);
                report.merge_profile(profile);
                report.degree_bounds = Some(bounds);
                report.checks.push(check);
            }
            Err(e) => return error_report(report, e),
        }
    }
    report.finish()
}

/// `f = y − Σ_{i≤m} x^i/i!` against the leaf `y = e^x` of `−y dx + dy` through
/// `(0, 1)`: the order of contact is `m + 1`.
fn classic_chain_instance(opts: &CampaignOptions, pack: &ParamPack, index: usize) -> InstanceReport {
    let x = VarContext::new(&["x", "y"]).expect("valid names");
    let m = index + 1;
    let mut f = MultiPoly::var(&x, 1);
    let mut fact = rat(1);
    for i in 0..=m {
        if i > 0 {
            fact *= rat(i as i64);
        }
        f = &f - &MultiPoly::monomial(&x, &[i as u32, 0], rat(1) / fact.clone());
    }
    let omega = OneForm::new(&x, vec![-MultiPoly::var(&x, 1), MultiPoly::one(&x)]).expect("two coefficients");
    let p = PointQ::from_ints(&[0, 1]);
    let mut report = InstanceReport::new(index, &format!("taylor degree {m}"), &x, &[f.clone()])
        .with_forms(std::slice::from_ref(&omega));
    match verify_bound(
        &[f],
        &[omega],
        &p,
        None,
        pack,
        opts.cap,
        opts.truncation,
        opts.halve_bounds,
    ) {
        Ok((mut check, profile, bounds)) => {
            if check.oracle != MultValue::Finite(m as u64 + 1) {
                check.verdict = Verdict::Fail;
                check.note = Some(format!("expected contact order {}", m + 1));
            }
            report.profile_ok = profile_within_bounds(&profile, &bounds);
            report.degree_profile = profile;
            report.degree_bounds = Some(bounds);
            report.checks.push(check);
            report.finish()
        }
        Err(e) => error_report(report, e),
    }
}

/// `f = x^{k+1} + y² − e` with `k = index + 1`: Milnor number `k`, bounded by
/// the Betti cycle for `b_1`, whose degrees are bounded by `D_{2,0,0} d²`.
fn milnor_instance(opts: &CampaignOptions, pack: &ParamPack, index: usize) -> InstanceReport {
    let k = index + 1;
    let x = VarContext::new(&["x", "y"]).expect("valid names");
    let pk = &MultiPoly::monomial(&x, &[k as u32 + 1, 0], rat(1)) + &MultiPoly::monomial(&x, &[0, 2], rat(1));
    let f = &pk.lift_e() - &MultiPoly::e(&x.extend_e());
    let mut report = InstanceReport::new(index, &format!("A{k}"), &x, std::slice::from_ref(&f));
    let o = PointQ::origin(2);
    let run = || -> Result<(PointCheck, Vec<u64>, Vec<Option<u128>>)> {
        let mu = milnor_number(&pk, &o, opts.cap)?.value;
        let b = betti_bound(std::slice::from_ref(&f), &o, 1, pack, opts.cap)?;
        let bound = halve(b.value, opts.halve_bounds);
        let (mut verdict, mut note) = judge(mu, bound);
        if mu != MultValue::Finite(k as u64) {
            verdict = Verdict::Fail;
            note = Some(format!("expected Milnor number {k}"));
        }
        let d = pk.total_degree() as u64;
        let n = 2;
        let bounds = (0..=n)
            .map(|codim| {
                let j = n - codim;
                (j <= b.betti.k)
                    .then(|| milnor_degree_constant(n, 1, 1, j, d))
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        let check = PointCheck {
            point: o.clone(),
            oracle: mu,
            second_oracle: None,
            bound,
            verdict,
            note,
        };
        Ok((check, cycle_degree_profile(&b.betti.cycle), bounds))
    };
    match run() {
        Ok((check, profile, bounds)) => {
            report.profile_ok = profile_within_bounds(&profile, &bounds);
            report.degree_profile = profile;
            report.degree_bounds = Some(bounds);
            report.checks.push(check);
            report.finish()
        }
        Err(e) => error_report(report, e),
    }
}

/// Random planar `(P, ξ)` with `deg P ≤ 3`, `deg ξ ≤ 2` and a nonsingular point;
/// `P` is made to vanish there, to order two along `ξ` for every other
/// instance. Instance 0 is `P = y`, `ξ = (1, 2x)` at the origin.
fn vf_instance(opts: &CampaignOptions, pack: &ParamPack, rng: &mut ChaCha8Rng, index: usize) -> InstanceReport {
    let x = VarContext::new(&["x", "y"]).expect("valid names");
    let (p, xi, pt) = if index == 0 {
        let xi =
            VectorField::new(&x, vec![MultiPoly::one(&x), MultiPoly::monomial(&x, &[1, 0], rat(2))]).expect("field");
        (MultiPoly::var(&x, 1), xi, PointQ::origin(2))
    } else {
        let (xi, pt) = loop {
            let xi = VectorField::new(&x, vec![small_poly(&x, 2, rng), small_poly(&x, 2, rng)]).expect("field");
            let pt = small_point(rng, 2);
            if !xi.vanishes_at(&pt) {
                break (xi, pt);
            }
        };
        let mut p = loop {
            let p = shift_to(&small_poly(&x, 3, rng), &pt);
            if !p.is_constant() {
                break p;
            }
        };
        if index.is_multiple_of(2) {
            // Subtract a multiple of a coordinate moving along ξ to kill ξP(p).
            let i = (0..2)
                .find(|&i| !xi.components()[i].eval(pt.coords()).is_zero())
                .expect("nonsingular");
            let li = shift_to(&MultiPoly::var(&x, i), &pt);
            let c = xi.apply(&p).eval(pt.coords()) / xi.components()[i].eval(pt.coords());
            p = &p - &li.scale(&c);
        }
        (p, xi, pt)
    };
    let mut report = InstanceReport::new(
        index,
        if index.is_multiple_of(2) {
            "order>=2"
        } else {
            "order>=1"
        },
        &x,
        std::slice::from_ref(&p),
    );
    report.field = Some(xi.components().iter().map(|c| c.to_string()).collect());
    let run = || -> Result<(PointCheck, Vec<u64>)> {
        let oracle = lie_multiplicity(&xi, &p, &pt, opts.cap)?.value;
        if oracle == MultValue::Infinite {
            return Ok((excluded(&pt, "infinite oracle, excluded".into()), Vec::new()));
        }
        let b = vf_bound(&p, &xi, &pt, None, pack, opts.cap, VF_ATTEMPTS)?;
        let bound = halve(b.value, opts.halve_bounds);
        let (verdict, note) = judge(oracle, bound);
        let check = PointCheck {
            point: pt.clone(),
            oracle,
            second_oracle: None,
            bound,
            verdict,
            note,
        };
        Ok((check, cycle_degree_profile(&b.cycle.cycle)))
    };
    match run() {
        Ok((check, profile)) => {
            report.degree_profile = profile;
            report.checks.push(check);
            report.finish()
        }
        Err(e) => error_report(report, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn judging() {
        use MultValue::*;
        assert_eq!(judge(Finite(2), Finite(3)).0, Verdict::Pass);
        assert_eq!(judge(Finite(4), Finite(3)).0, Verdict::Fail);
        assert_eq!(judge(Infinite, Finite(3)).0, Verdict::Excluded);
        assert_eq!(judge(Finite(1), Infinite).0, Verdict::Pass);
        assert_eq!(judge(Finite(1), CapExceeded).0, Verdict::Excluded);
    }

    #[test]
    fn classic_chain_small() {
        let r = run_campaign(&CampaignOptions::new(Family::ClassicChain, 2, 1));
        assert!(r.all_pass, "{:?}", r.instances);
        assert_eq!(r.instances[0].checks[0].oracle, MultValue::Finite(2));
        assert_eq!(r.instances[1].checks[0].oracle, MultValue::Finite(3));
    }

    #[test]
    fn halving_breaks_the_chain() {
        let mut opts = CampaignOptions::new(Family::ClassicChain, 1, 1);
        opts.halve_bounds = true;
        let r = run_campaign(&opts);
        assert!(!r.all_pass);
        assert!(r.counterexample.is_some());
    }
}
