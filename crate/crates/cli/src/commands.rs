use std::path::Path;

use mcycle::algebra::{parse_poly, parse_rational, rat, Ctx, MultiPoly, PointQ};
use mcycle::campaign::{
    judge, run_campaign, verify_bound, CampaignOptions, PointCheck, Verdict, DEFAULT_TRUNCATION, VF_ATTEMPTS,
};
use mcycle::cycle::{
    bound_profile, build_cycle, cycle_degree_profile, cycle_mult_at, profile_within_bounds, simple_constant,
};
use mcycle::forms::{form_degree, integrability_check, OneForm};
use mcycle::groebner::{PolySystem, DEFAULT_BUDGET};
use mcycle::group::{extended_multiplicity_check, group_constant, moreau_check, subtori_up_to_height, Subtorus};
use mcycle::local::{local_multiplicity, MultResult, MultValue, DEFAULT_CAP};
use mcycle::milnor::{betti_bound, euler_bound, goodness, milnor_degree_constant, vf_bound};
use mcycle::oracle::{leaf_intersection_multiplicity, lie_multiplicity, milnor_number};
use mcycle::params::ParamPack;
use mcycle::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::{Manifest, Mode, MANIFEST_VERSION};
use crate::{CliError, GlobalOpts};

pub const MAX_CONSTANT_DIM: usize = 8;

pub struct Outcome {
    pub report: Value,
    pub code: u8,
}

pub fn load(path: &Path) -> Result<Manifest, CliError> {
    Manifest::load(path)
}

/// Effective settings: command-line flags override the manifest, which
/// overrides the defaults.
#[derive(Debug, Clone, Serialize)]
struct Settings {
    pack: ParamPack,
    cap: u32,
    budget: usize,
    truncation: u32,
}

impl Settings {
    fn resolve(m: &Manifest, opts: &GlobalOpts) -> Result<Settings, CliError> {
        let mut pack = ParamPack::new(opts.seed.or(m.seed).unwrap_or(0));
        if let Some(t) = opts.trials.or(m.trials) {
            pack = pack.with_trials(t);
        }
        if let Some(n) = m.n_exp {
            pack = pack.with_n_exp(n);
        }
        let cap = opts.cap.or(m.cap).unwrap_or(DEFAULT_CAP);
        if cap == 0 {
            return Err(Error::InvalidCap.into());
        }
        let truncation = opts.truncation.or(m.truncation).unwrap_or(DEFAULT_TRUNCATION);
        if truncation < 2 {
            return Err(Error::OrderTooSmall.into());
        }
        Ok(Settings {
            pack,
            cap,
            budget: opts.budget.or(m.budget).unwrap_or(DEFAULT_BUDGET),
            truncation,
        })
    }
}

fn envelope(command: &str, settings: Option<&Settings>, result: Value, code: u8) -> Outcome {
    let mut report = json!({
        "version": MANIFEST_VERSION,
        "command": command,
        "result": result,
        "exit_code": code,
    });
    if let Some(s) = settings {
        report["params"] = to_value(s);
    }
    Outcome { report, code }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

/// A validated Pfaffian instance: `n − k` functions and `k` forms.
struct Pfaffian {
    x: Ctx,
    f: Vec<MultiPoly>,
    omegas: Vec<OneForm>,
    points: Vec<PointQ>,
}

fn pfaffian(m: &Manifest) -> Result<Pfaffian, CliError> {
    let x = m.space()?;
    let f = m.functions(&x)?;
    let omegas = m.forms(&x)?;
    let n = x.arity();
    if f.len() + omegas.len() != n {
        return Err(CliError::Invalid(format!(
            "{} functions and {} forms do not add up to dimension {n}",
            f.len(),
            omegas.len()
        )));
    }
    let points = m.points(n)?;
    // Exact systems are integrable by construction; others must satisfy the
    // Frobenius chain condition.
    if m.mode == Mode::Frobenius && !integrability_check(&omegas, &PointQ::origin(n))?.frobenius_chain {
        return Err(Error::NonIntegrable("dω_i ∧ ω_1 ∧ ⋯ ∧ ω_i does not vanish identically".into()).into());
    }
    Ok(Pfaffian { x, f, omegas, points })
}

fn resource_code(values: impl IntoIterator<Item = MultValue>) -> u8 {
    if values.into_iter().any(|v| v == MultValue::CapExceeded) {
        3
    } else {
        0
    }
}

pub fn bound(m: &Manifest, opts: &GlobalOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(m, opts)?;
    let inst = pfaffian(m)?;
    let n = inst.x.arity();
    let cycle = build_cycle(&inst.f, &inst.omegas, &s.pack)?;
    let betas: Vec<u64> = inst.f.iter().map(|g| g.total_degree().max(0) as u64).collect();
    let alphas: Vec<u64> = inst.omegas.iter().map(|w| form_degree(w).max(0) as u64).collect();
    let bounds = bound_profile(n, inst.omegas.len(), &betas, &alphas)?;
    let profile = cycle_degree_profile(&cycle);
    let mut values = Vec::new();
    let mut points = Vec::new();
    for p in &inst.points {
        let eval = cycle_mult_at(&cycle, p, &s.pack, s.cap)?;
        values.push(eval.value);
        points.push(json!({"point": p, "mult": eval.value, "components": eval.components}));
    }
    let result = json!({
        "k": inst.omegas.len(),
        "degree_profile": profile,
        "degree_bounds": bounds.iter().map(|b| b.map(|v| v.to_string())).collect::<Vec<_>>(),
        "profile_within_bounds": profile_within_bounds(&profile, &bounds),
        "points": points,
        "cycle": cycle,
    });
    Ok(envelope("bound", Some(&s), result, resource_code(values)))
}

/// The dual-space oracle for exact systems: with `ω_i = dF_i`, the leaf
/// through `p` is `{F = F(p)}`, so the leaf multiplicity is the local
/// multiplicity of `f ∪ {F − F(p)}`.
fn dual_space_oracle(m: &Manifest, x: &Ctx, p: &PointQ, cap: u32) -> Result<Option<MultResult>, CliError> {
    if m.mode != Mode::Exact {
        return Ok(None);
    }
    let Ok(mut polys) = m
        .functions
        .iter()
        .map(|s| parse_poly(s, x))
        .collect::<Result<Vec<_>, _>>()
    else {
        return Ok(None);
    };
    for pf in m.potentials(x)? {
        let c = MultiPoly::constant(x, pf.eval(p.coords()));
        polys.push(&pf - &c);
    }
    Ok(Some(local_multiplicity(&PolySystem::new(x, polys)?, p, cap)?))
}

pub fn oracle(m: &Manifest, opts: &GlobalOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(m, opts)?;
    let mut values = Vec::new();
    let mut result = json!({});
    if m.p.is_some() || m.xi.is_some() {
        let x = m.space()?;
        let (p, xi) = m.vector_problem(&x)?;
        let mut rows = Vec::new();
        for pt in m.points(x.arity())? {
            let row = match lie_multiplicity(&xi, &p, &pt, s.cap) {
                Ok(r) => {
                    values.push(r.value);
                    json!({"point": pt, "lie": r})
                }
                Err(Error::Singular) => json!({"point": pt, "lie": {"value": MultValue::Infinite}, "singular": true}),
                Err(e) => return Err(e.into()),
            };
            rows.push(row);
        }
        result["lie"] = Value::Array(rows);
    }
    if !m.functions.is_empty() {
        let inst = pfaffian(m)?;
        let mut rows = Vec::new();
        for p in &inst.points {
            let leaf = leaf_intersection_multiplicity(&inst.f, &inst.omegas, p, s.truncation, s.cap)?;
            values.push(leaf.result.value);
            let mut row = json!({"point": p, "leaf": leaf});
            if let Some(d) = dual_space_oracle(m, &inst.x, p, s.cap)? {
                values.push(d.value);
                row["dual_space"] = to_value(&d);
            }
            rows.push(row);
        }
        result["leaf"] = Value::Array(rows);
    }
    if result.as_object().is_some_and(|o| o.is_empty()) {
        return Err(CliError::Invalid(
            "manifest has neither `functions` nor `P`/`xi`".into(),
        ));
    }
    Ok(envelope("oracle", Some(&s), result, resource_code(values)))
}

pub fn verify(m: &Manifest, opts: &GlobalOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(m, opts)?;
    if m.campaign.is_some() {
        let (family, spec) = m.family()?;
        let seed = opts.seed.or(spec.seed).or(m.seed).unwrap_or(0);
        let mut copts = CampaignOptions::new(family, spec.count, seed);
        copts.pack.slice_trials = s.pack.slice_trials;
        copts.pack.n_exp = s.pack.n_exp;
        copts.points = spec.points.unwrap_or(copts.points);
        copts.cap = s.cap;
        copts.truncation = s.truncation;
        copts.halve_bounds = opts.halve_bounds;
        let report = run_campaign(&copts);
        let code = if report.all_pass { 0 } else { 1 };
        let s = Settings {
            pack: copts.pack.clone(),
            ..s
        };
        return Ok(envelope("verify", Some(&s), to_value(&report), code));
    }
    let inst = pfaffian(m)?;
    let mut checks: Vec<PointCheck> = Vec::new();
    let mut profile = Vec::new();
    let mut bounds = Vec::new();
    for p in &inst.points {
        let second = dual_space_oracle(m, &inst.x, p, s.cap)?.map(|r| r.value);
        let (check, pr, b) = verify_bound(
            &inst.f,
            &inst.omegas,
            p,
            second,
            &s.pack,
            s.cap,
            s.truncation,
            opts.halve_bounds,
        )?;
        checks.push(check);
        profile = pr;
        bounds = b;
    }
    // Re-run with the smoothing exponent doubled; disagreement is a warning.
    let max_deg = inst.f.iter().map(MultiPoly::total_degree).max().unwrap_or(0);
    let n_exp = s.pack.smoothing_exponent(max_deg);
    let doubled_pack = s.pack.clone().with_n_exp(2 * n_exp);
    let doubled = build_cycle(&inst.f, &inst.omegas, &doubled_pack)?;
    let mut smoothing = Vec::new();
    let mut warnings = Vec::new();
    for c in &checks {
        let v = cycle_mult_at(&doubled, &c.point, &doubled_pack, s.cap)?.value;
        let agree = v == c.bound || opts.halve_bounds;
        if !agree {
            let at: Vec<String> = c.point.coords().iter().map(ToString::to_string).collect();
            warnings.push(format!(
                "bound at ({}) changes from {} to {v} when N doubles",
                at.join(", "),
                c.bound
            ));
        }
        smoothing.push(json!({"point": c.point, "bound": c.bound, "doubled_bound": v, "agree": agree}));
    }
    let profile_ok = profile_within_bounds(&profile, &bounds);
    let failed = !profile_ok || checks.iter().any(|c| c.verdict == Verdict::Fail);
    let result = json!({
        "degree_profile": profile,
        "degree_bounds": bounds.iter().map(|b| b.map(|v| v.to_string())).collect::<Vec<_>>(),
        "profile_ok": profile_ok,
        "checks": checks,
        "smoothing_check": {"n_exp": n_exp, "doubled_n_exp": 2 * n_exp, "points": smoothing},
        "warnings": warnings,
        "all_pass": !failed,
    });
    Ok(envelope("verify", Some(&s), result, if failed { 1 } else { 0 }))
}

pub fn constants(n_max: usize) -> Result<Outcome, CliError> {
    if n_max == 0 || n_max > MAX_CONSTANT_DIM {
        return Err(CliError::Invalid(format!("n must be between 1 and {MAX_CONSTANT_DIM}")));
    }
    let mut simple = Vec::new();
    let mut group = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            for j in 0..=k {
                simple.push(json!({"n": n, "k": k, "j": j, "C": simple_constant(n, k, j)?.to_string()}));
            }
        }
        group.push(json!({"n": n, "C_G": group_constant(n)?.to_string()}));
    }
    let result = json!({"simple": simple, "group": group});
    Ok(envelope("constants", None, result, 0))
}

pub fn milnor(m: &Manifest, opts: &GlobalOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(m, opts)?;
    let x = m.space()?;
    if m.functions.is_empty() {
        return Err(CliError::Invalid("`functions` must be a nonempty list".into()));
    }
    let f: Vec<MultiPoly> = m
        .functions
        .iter()
        .map(|t| parse_poly(t, &x))
        .collect::<Result<_, _>>()?;
    let (n, fm) = (x.arity(), f.len());
    if fm > n {
        return Err(CliError::Invalid(format!("{fm} functions in dimension {n}")));
    }
    if let Some(r) = m.r {
        if r > n - fm {
            return Err(CliError::Invalid(format!(
                "r = {r} exceeds the fiber dimension {}",
                n - fm
            )));
        }
    }
    let d = f.iter().map(|g| g.total_degree().max(0) as u64).max().unwrap_or(0);
    let rs: Vec<usize> = m.r.map(|r| vec![r]).unwrap_or_else(|| (0..=n - fm).collect());
    let mut degree_constants = Vec::new();
    for &r in &rs {
        for j in 0..=n - fm - r {
            degree_constants.push(json!({"r": r, "j": j, "D": milnor_degree_constant(n, fm, r, j, d)?.to_string()}));
        }
    }
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for p in m.points(n)? {
        if f.iter().any(|g| g.eval(p.coords()) != rat(0)) {
            return Err(CliError::Invalid(format!(
                "point {:?} is not on the zero set",
                p.coords()
            )));
        }
        let mut row = json!({"point": p, "goodness": goodness(&f, &p, s.budget)?});
        if fm == 1 {
            let mu = milnor_number(&f[0], &p, s.cap)?;
            values.push(mu.value);
            row["milnor_number"] = to_value(&mu);
        }
        match m.r {
            Some(r) => {
                let b = betti_bound(&f, &p, r, &s.pack, s.cap)?;
                values.push(b.value);
                row["betti_bound"] = to_value(&b);
            }
            None => {
                let e = euler_bound(&f, &p, &s.pack, s.cap)?;
                values.push(e.value);
                row["euler_bound"] = to_value(&e);
            }
        }
        rows.push(row);
    }
    let result = json!({"m": fm, "degree": d, "degree_constants": degree_constants, "points": rows});
    Ok(envelope("milnor", Some(&s), result, resource_code(values)))
}

pub fn vf(m: &Manifest, opts: &GlobalOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(m, opts)?;
    let x = m.space()?;
    let (p, xi) = m.vector_problem(&x)?;
    let n = x.arity();
    let mut failed = false;
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for pt in m.points(n)? {
        if xi.vanishes_at(&pt) {
            rows.push(json!({"point": pt, "singular": true, "verdict": Verdict::Excluded}));
            continue;
        }
        let oracle = lie_multiplicity(&xi, &p, &pt, s.cap)?;
        let bound = vf_bound(&p, &xi, &pt, m.q_degree, &s.pack, s.cap, VF_ATTEMPTS)?;
        let (verdict, note) = judge(oracle.value, bound.value);
        failed |= verdict == Verdict::Fail;
        values.extend([oracle.value, bound.value]);
        rows.push(json!({
            "point": pt,
            "oracle": oracle,
            "bound": bound.value,
            "per_r_breakdown": bound.per_part,
            "verdict": verdict,
            "note": note,
            "attempts": bound.attempts,
            "draws": bound.cycle,
            "eval": bound.eval,
        }));
    }
    let result = json!({
        "constants": {"C_G": group_constant(n)?.to_string(), "d": p.total_degree().max(0), "xi_degree": xi.degree().max(0)},
        "points": rows,
    });
    let code = if failed { 1 } else { resource_code(values) };
    Ok(envelope("vf", Some(&s), result, code))
}

pub fn group(m: &Manifest, opts: &GlobalOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(m, opts)?;
    let n = match (&m.sigma, m.variables.len()) {
        (Some(pts), 0) => pts.first().map(|p| p.dim()).unwrap_or(0),
        (_, v) => v,
    };
    if n == 0 {
        return Err(CliError::Invalid("cannot determine the torus dimension".into()));
    }
    let sigma = m.sigma(n)?;
    let subgroups: Vec<Subtorus> = match (m.subgroups(n)?, m.height) {
        (Some(list), None) => list,
        (None, Some(h)) => subtori_up_to_height(n, h)?
            .into_iter()
            .filter(Subtorus::is_proper)
            .collect(),
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid(
                "give either `subgroups` or `height`, not both".into(),
            ))
        }
        (None, None) => return Err(CliError::Invalid("missing `subgroups` or `height`".into())),
    };
    if m.p.is_some() {
        let x = m.space()?;
        let (p, xi) = m.vector_problem(&x)?;
        let t = m.t.ok_or_else(|| CliError::Invalid("missing `T`".into()))?;
        let report = extended_multiplicity_check(&sigma, &p, &xi, t, &subgroups, s.cap)?;
        let code = if report.consistent { 0 } else { 1 };
        return Ok(envelope("group", Some(&s), to_value(&report), code));
    }
    let d = m.d.ok_or_else(|| CliError::Invalid("missing `d`".into()))?;
    let weight = m
        .weight
        .as_deref()
        .ok_or_else(|| CliError::Invalid("missing `weight`".into()))?;
    let weight = parse_rational(weight)?;
    let report = moreau_check(&sigma, d, &weight, &subgroups);
    Ok(envelope("group", Some(&s), to_value(&report), 0))
}
