use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hodge_limit::dmodlocal::{
    build_truncated_quotient, char_multiplicity_local, generators_annihilated, kernel_generators_check,
    residue_representatives_agree, LocalModel,
};
use hodge_limit::exactcore::ExactMatrix;
use hodge_limit::fixtures::{kodaira, random_nilpotent};
use hodge_limit::hlcohomology::{cohomology, operator_identities, DifferentialPBHL};
use hodge_limit::mellinverify::{
    off_diagonal_vanishing, poincare_lelong_1d, primitive_pairing_constant, renormalization_residue, ModelChart, Profile,
    QuadratureConfig, SeparableTestFunction, TOL_CONSTANT, TOL_SINGLE_LOG,
};
use hodge_limit::sncdegeneration::{
    characteristic_cycle, characteristic_cycle_alpha, e2_page, eigenvalue_set, hard_lefschetz_check,
    limit_hodge_numbers, local_invariant_cycle_report, Alpha, Degeneration, DegenerationSpec, PbhlOutcome,
};
use hodge_limit::weightfilt::{verify_monodromy_axioms, Monodromy, NilpotentEndo};
use hodge_limit::Error;

use crate::input::{load, InputError};
use crate::report::{Check, Provenance, Report};
use crate::{Command, Global};

#[derive(Args, Debug, Clone)]
pub struct LocalModelArgs {
    /// Coordinates are `z_0..z_n`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Multiplicities of the divisor coordinates, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub e: Vec<u32>,
    /// Check only this `r`; every `r ≤ μ` otherwise.
    #[arg(long)]
    pub r: Option<usize>,
    /// Truncation degree.
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MellinCase {
    Renorm,
    Lelong,
    Constant,
    Offdiag,
}

#[derive(Args, Debug, Clone)]
pub struct MellinArgs {
    #[arg(long, value_enum)]
    pub case: MellinCase,
    /// Chart document; same as `--input`.
    #[arg(long)]
    pub chart: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SelftestArgs {
    /// Number of random nilpotent operators.
    #[arg(long, default_value_t = 24)]
    pub samples: u64,
}

/// Input of `mellin-verify`. `renorm` and `lelong` read `profile`;
/// `constant` and `offdiag` read `chart` and `eta`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MellinDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ModelChart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<SeparableTestFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
}

pub fn dispatch(g: &Global, cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Weightfilt => weightfilt(&load(required_input(g)?)?),
        Command::Cohomology => cohomology_report(&load(required_input(g)?)?),
        Command::Degeneration => {
            let spec: DegenerationSpec = load(required_input(g)?)?;
            degeneration(spec, g.alpha.as_deref())
        }
        Command::LocalModel(a) => local_model(g, a),
        Command::MellinVerify(a) => {
            let path = a.chart.as_deref().or(g.input.as_deref());
            let doc = match path {
                Some(p) => load(p)?,
                None => MellinDoc::default(),
            };
            mellin(a.case, &doc, g.tol_abs, g.tol_rel)
        }
        Command::Selftest(a) => selftest(g.seed, a.samples),
        Command::EmitGoldens(_) => unreachable!("handled before dispatch"),
    }
}

fn required_input(g: &Global) -> Result<&Path, InputError> {
    g.input.as_deref().ok_or_else(|| InputError::Config("--input is required".into()))
}

fn parse_alpha(s: &str) -> Result<Alpha, InputError> {
    s.parse().map_err(|e: Error| InputError::Config(e.to_string()))
}

fn spot_key((l, k): (i64, i64)) -> String {
    format!("{l},{k}")
}

fn spot_map(m: &BTreeMap<(i64, i64), usize>) -> BTreeMap<String, usize> {
    m.iter().map(|(&s, &d)| (spot_key(s), d)).collect()
}

fn set_key(j: &[impl ToString]) -> String {
    j.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Weights of a nilpotent operator from the ranks of its powers: there are
/// `rank N^{s−1} − 2 rank N^s + rank N^{s+1}` Jordan blocks of size `s`,
/// each contributing weights `s−1, s−3, …, 1−s`.
pub fn jordan_weights(n: &ExactMatrix) -> BTreeMap<i64, usize> {
    let d = n.rows();
    let mut ranks = vec![d];
    while *ranks.last().unwrap() > 0 {
        ranks.push(n.pow(ranks.len() as u32).rank());
    }
    ranks.push(0);
    let mut out = BTreeMap::new();
    for s in 1..ranks.len() - 1 {
        let blocks = ranks[s - 1] + ranks[s + 1] - 2 * ranks[s];
        if blocks == 0 {
            continue;
        }
        for i in 0..s {
            *out.entry(s as i64 - 1 - 2 * i as i64).or_insert(0) += blocks;
        }
    }
    out
}

pub fn weightfilt(matrix: &ExactMatrix) -> Result<Report> {
    let op = NilpotentEndo::new(matrix.clone())?;
    let mono = Monodromy::new(&op)?;
    let w = &mono.filtration;
    let top = op.nilpotency_index().max(1) as i64 - 1;
    let weights: Vec<i64> = (-top..=top).collect();
    let gr: Vec<usize> = weights.iter().map(|&k| w.gr_dim(k)).collect();
    let mut checks = Vec::new();

    let axioms = verify_monodromy_axioms(&op, w);
    checks.push(Check::new(
        "monodromy_axioms",
        axioms.is_ok(),
        json!(axioms.is_ok()),
        json!(true),
        Provenance::Formula,
        json!(axioms.err().map(|e| e.to_string())),
    ));

    let oracle = jordan_weights(matrix);
    let expected: Vec<usize> = weights.iter().map(|k| oracle.get(k).copied().unwrap_or(0)).collect();
    let first_bad = weights.iter().zip(gr.iter().zip(&expected)).find(|(_, (a, b))| a != b);
    checks.push(Check::new(
        "gr_dims_match_jordan_type",
        first_bad.is_none(),
        json!(gr),
        json!(expected),
        Provenance::Formula,
        json!(first_bad.map(|(k, (a, b))| json!({"weight": k, "measured": a, "expected": b}))),
    ));

    let primitive: BTreeMap<i64, usize> =
        (0..=top).map(|l| Ok((l, mono.primitive_part(l)?.dim()))).collect::<Result<_>>()?;
    let dec = mono.lefschetz_decomposition();
    checks.push(Check::new(
        "lefschetz_decomposition",
        dec.certified,
        json!(dec.certified),
        json!(true),
        Provenance::Formula,
        json!("direct sum certificate failed"),
    ));

    let x = mono.sl2_complete();
    checks.push(Check::new(
        "sl2_triple",
        x.is_ok(),
        json!(x.is_ok()),
        json!(true),
        Provenance::Formula,
        json!(x.as_ref().err().map(|e| e.to_string())),
    ));

    let bases: BTreeMap<String, Value> =
        (-top - 1..=top).map(|k| (k.to_string(), json!(w.w(k).vectors()))).collect();
    Ok(Report {
        command: "weightfilt".into(),
        checks,
        data: json!({
            "weights": weights,
            "gr_dims": gr,
            "primitive_dims": primitive,
            "W_bases": bases,
            "X_matrix": x.ok(),
        }),
    })
}

pub fn cohomology_report(dp: &DifferentialPBHL) -> Result<Report> {
    let c = cohomology(dp)?;
    let mut checks = Vec::new();
    let failure = c.verification.failure.as_ref();
    checks.push(Check::new(
        "pbhl_verify",
        failure.is_none(),
        json!(failure.map_or("passed", |f| f.condition)),
        json!("passed"),
        Provenance::Formula,
        json!(failure.map(|f| json!({"condition": f.condition, "detail": f.detail}))),
    ));
    checks.push(Check::new(
        "presentations_agree",
        c.presentations_agree,
        json!(c.presentations_agree),
        json!(true),
        Provenance::Formula,
        json!("harmonic and quotient presentations differ"),
    ));
    let expected = dp.d.cols() - 2 * dp.d.rank();
    let harmonic = c.harmonic_basis.cols();
    checks.push(Check::new(
        "harmonic_dimension",
        harmonic == expected,
        json!(harmonic),
        json!(expected),
        Provenance::Formula,
        json!({"harmonic": harmonic, "ker_minus_im": expected}),
    ));
    for (name, holds) in operator_identities(dp)? {
        checks.push(Check::new(
            format!("identity {name}"),
            holds,
            json!(holds),
            json!(true),
            Provenance::Formula,
            json!(name),
        ));
    }
    let parts: Vec<Value> = c
        .verification
        .primitive_parts
        .iter()
        .map(|((l, k), hodge)| json!({"spot": [l, k], "hodge_numbers": hodge}))
        .collect();
    Ok(Report {
        command: "cohomology".into(),
        checks,
        data: json!({"structure": c.structure, "primitive_parts": parts}),
    })
}

struct AlphaResult {
    data: Value,
    checks: Vec<Check>,
}

fn degeneration_alpha(deg: &Degeneration, alpha: &Alpha) -> Result<AlphaResult> {
    let tag = |name: &str| format!("{name} [alpha={alpha}]");
    let e2 = e2_page(deg, alpha)?;
    let mut checks = Vec::new();
    checks.push(Check::new(
        tag("euler"),
        e2.euler_e1 == e2.euler_e2,
        json!(e2.euler_e2),
        json!(e2.euler_e1),
        Provenance::Formula,
        json!({"e1": e2.euler_e1, "e2": e2.euler_e2}),
    ));
    let bad = e2.monodromy_weight.iter().find(|s| !s.holds());
    checks.push(Check::new(
        tag("monodromy_weight"),
        bad.is_none(),
        json!(e2.monodromy_weight.len()),
        json!(e2.monodromy_weight.len()),
        Provenance::Formula,
        json!(bad),
    ));

    match hard_lefschetz_check(deg, alpha) {
        Ok(hl) => {
            if let PbhlOutcome::Skipped { reason } = &hl.pbhl {
                checks.push(Check::skipped(tag("hard_lefschetz"), reason));
            } else {
                let witness = match (&hl.pbhl, hl.first_failure()) {
                    (_, Some(spot)) => json!({"spot": spot_key(spot)}),
                    (PbhlOutcome::Failed { reason }, None) => json!({"pbhl": reason}),
                    _ => json!({"dims_agree": false}),
                };
                checks.push(Check::new(
                    tag("hard_lefschetz"),
                    hl.passed(),
                    json!(hl.isomorphisms.iter().filter(|s| s.holds()).count()),
                    json!(hl.isomorphisms.len()),
                    Provenance::Formula,
                    witness,
                ));
            }
        }
        Err(e @ (Error::MissingLefschetzData(_) | Error::MissingHodgeData(_))) => {
            checks.push(Check::skipped(tag("hard_lefschetz"), &e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }

    if alpha.is_zero() {
        let inv = local_invariant_cycle_report(deg)?;
        let bad = inv.degrees.iter().find(|d| !d.exact());
        checks.push(Check::new(
            tag("local_invariant_cycle"),
            bad.is_none(),
            json!(inv.degrees.iter().map(|d| d.image).collect::<Vec<_>>()),
            json!(inv.degrees.iter().map(|d| d.ker_n).collect::<Vec<_>>()),
            Provenance::Formula,
            json!(bad),
        ));
    }

    let hodge = match limit_hodge_numbers(deg, alpha) {
        Ok(h) => json!(h),
        Err(Error::MissingHodgeData(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let cc_alpha: BTreeMap<String, u64> =
        characteristic_cycle_alpha(deg, alpha)?.iter().map(|(j, m)| (set_key(j), *m)).collect();
    let data = json!({
        "alpha": alpha,
        "cc_alpha": cc_alpha,
        "e1": spot_map(&e2.e1_dims),
        "d1_ranks": spot_map(&e2.d1_ranks),
        "e2": spot_map(&e2.dims),
        "limit_gr": e2.limit_gr,
        "limit_hodge_numbers": hodge,
        "degeneration_assumed": e2.degeneration_assumed,
    });
    Ok(AlphaResult { data, checks })
}

pub fn degeneration(spec: DegenerationSpec, selector: Option<&str>) -> Result<Report> {
    let deg = Degeneration::new(spec)?;
    let table = eigenvalue_set(&deg);
    let alphas = match selector {
        None | Some("all") => table.alphas(),
        Some(s) => {
            let a = parse_alpha(s)?;
            if table.i_alpha(&a).is_none() {
                return Err(Error::UnknownEigenvalue(a.to_string()).into());
            }
            vec![a]
        }
    };
    // Collected in eigenvalue order whatever the scheduling.
    let every = selector.is_none() || selector == Some("all");
    let results: Vec<AlphaResult> = alphas
        .par_iter()
        .map(|a| match degeneration_alpha(&deg, a) {
            // Under `all`, eigenvalues without strata data are reported, not fatal.
            Err(e) if every && matches!(e.downcast_ref::<Error>(), Some(Error::MissingStratum(_))) => Ok(AlphaResult {
                data: json!({"alpha": a, "skipped": e.to_string()}),
                checks: vec![Check::skipped(format!("pages [alpha={a}]"), &e.to_string())],
            }),
            other => other,
        })
        .collect::<Result<_>>()?;
    let cc: BTreeMap<String, u64> = characteristic_cycle(&deg).iter().map(|(j, m)| (set_key(j), *m)).collect();
    let eigen: Vec<Value> = table.entries.iter().map(|(a, i)| json!({"alpha": a, "i_alpha": i})).collect();
    let mut checks = Vec::new();
    let mut per_alpha = Vec::new();
    for r in results {
        checks.extend(r.checks);
        per_alpha.push(r.data);
    }
    Ok(Report {
        command: "degeneration".into(),
        checks,
        data: json!({"eigenvalues": eigen, "cc": cc, "pages": per_alpha}),
    })
}

fn local_model(g: &Global, a: &LocalModelArgs) -> Result<Report> {
    let model = match (&g.input, a.n) {
        (Some(p), _) => {
            let m: LocalModel = load(p)?;
            LocalModel::new(m.n, m.e, m.alpha, m.degree)?
        }
        (None, Some(n)) => {
            let alpha = match g.alpha.as_deref() {
                Some("all") => return Err(InputError::Config("local-model needs a single --alpha".into()).into()),
                Some(s) => parse_alpha(s)?,
                None => Alpha::zero(),
            };
            let degree = a.degree.ok_or_else(|| InputError::Config("--degree is required".into()))?;
            LocalModel::new(n, a.e.clone(), alpha, degree)?
        }
        (None, None) => return Err(InputError::Config("give --input or --n/--e/--degree".into()).into()),
    };
    local_model_report(&model, a.r)
}

pub fn local_model_report(m: &LocalModel, only_r: Option<usize>) -> Result<Report> {
    let rs: Vec<usize> = match only_r {
        Some(r) if r > m.mu() => {
            return Err(Error::InvalidInput(format!("r = {r} exceeds mu = {}", m.mu())).into());
        }
        Some(r) => vec![r],
        None => (0..=m.mu()).collect(),
    };
    let kernels: Vec<_> = rs.par_iter().map(|&r| kernel_generators_check(m, r)).collect::<Result<_, _>>()?;
    let mut checks = Vec::new();
    for kc in &kernels {
        checks.push(Check::new(
            format!("kernel_generators r={}", kc.r),
            kc.passed,
            json!(kc.degrees.iter().map(|d| d.kernel_dim).collect::<Vec<_>>()),
            json!(kc.degrees.iter().map(|d| d.generated_dim).collect::<Vec<_>>()),
            Provenance::Formula,
            json!(kc.witness),
        ));
        let ann = generators_annihilated(m, kc.r)?;
        checks.push(Check::new(
            format!("generators_annihilated r={}", kc.r),
            ann,
            json!(ann),
            json!(true),
            Provenance::Formula,
            json!(kc.generators),
        ));
    }
    let agree = residue_representatives_agree(m);
    checks.push(Check::new(
        "residue_representatives",
        agree,
        json!(agree),
        json!(true),
        Provenance::Formula,
        json!(m.alpha),
    ));
    for mask in 1u32..(1 << (m.k + 1)) {
        let j: Vec<usize> = (0..=m.k).filter(|i| mask & (1 << i) != 0).collect();
        let len = char_multiplicity_local(m, &j)?;
        let expected: u64 = j.iter().map(|&i| u64::from(m.e[i])).sum();
        checks.push(Check::new(
            format!("artinian_length J={}", set_key(&j)),
            len == expected,
            json!(len),
            json!(expected),
            Provenance::Formula,
            json!({"J": j, "length": len}),
        ));
    }
    let summary = build_truncated_quotient(m).summary();
    Ok(Report {
        command: "local-model".into(),
        checks,
        data: json!({"model": m, "i_alpha": m.i_alpha(), "mu": m.mu(), "quotient": summary, "kernels": kernels}),
    })
}

fn tolerance_check(name: &str, measured: f64, target: f64, abs: f64, rel: f64) -> Check {
    let err = (measured - target).abs();
    let tol = abs + rel * target.abs();
    Check::new(
        name,
        err <= tol,
        json!(measured),
        json!(target),
        Provenance::Tolerance,
        json!({"abs_error": err, "tolerance": tol}),
    )
}

pub fn mellin(case: MellinCase, doc: &MellinDoc, tol_abs: Option<f64>, tol_rel: Option<f64>) -> Result<Report> {
    let cfg = doc.quadrature.clone().unwrap_or_default();
    let rel = tol_rel.unwrap_or(0.0);
    let chart = || -> Result<(ModelChart, SeparableTestFunction)> {
        let chart = doc.chart.clone().ok_or_else(|| InputError::Config("chart document has no `chart`".into()))?;
        chart.validate()?;
        let eta = doc.eta.clone().unwrap_or_else(|| SeparableTestFunction::standard(chart.n + 1));
        Ok((chart, eta))
    };
    let profile = doc.profile.clone().unwrap_or_else(|| Profile::bump(1.0, 0.7));
    let (checks, data) = match case {
        MellinCase::Renorm => {
            let v = renormalization_residue(&profile, &cfg)?;
            let abs = tol_abs.unwrap_or(TOL_SINGLE_LOG);
            (vec![tolerance_check("renormalization_residue", v, profile.at_zero(), abs, rel)], json!({"profile": profile}))
        }
        MellinCase::Lelong => {
            let v = poincare_lelong_1d(&profile, &cfg)?;
            let abs = tol_abs.unwrap_or(TOL_SINGLE_LOG);
            (vec![tolerance_check("poincare_lelong", v, profile.at_zero(), abs, rel)], json!({"profile": profile}))
        }
        MellinCase::Constant => {
            let (chart, eta) = chart()?;
            let pc = primitive_pairing_constant(&chart, &eta, &cfg)?;
            let abs = tol_abs.unwrap_or(TOL_CONSTANT);
            let sign = if pc.r % 2 == 0 { 1.0 } else { -1.0 };
            let check = tolerance_check(&format!("pairing_constant r={}", pc.r), pc.ratio, pc.target, abs, rel);
            (vec![check], json!({"chart": chart, "constant": pc, "sign_over_c_j": sign / pc.c_j as f64}))
        }
        MellinCase::Offdiag => {
            let (chart, eta) = chart()?;
            let od = off_diagonal_vanishing(&chart, &eta, &cfg)?;
            let abs = tol_abs.unwrap_or(TOL_SINGLE_LOG);
            let order = Check::new(
                "offdiag_pole_order",
                od.pole_order == 0,
                json!(od.pole_order),
                json!(0),
                Provenance::Formula,
                json!({"pole_order": od.pole_order}),
            );
            (vec![order, tolerance_check("offdiag_residue", od.residue, 0.0, abs, rel)], json!({"chart": chart, "result": od}))
        }
    };
    Ok(Report { command: "mellin-verify".into(), checks, data })
}

fn selftest(seed: u64, samples: u64) -> Result<Report> {
    let mut checks = Vec::new();
    let mut mismatches = Vec::new();
    for i in 0..samples {
        let s = seed.wrapping_add(i);
        let (m, partition) = random_nilpotent(s, 1 + (s % 7) as usize);
        let r = weightfilt(&m)?;
        let mut expected = BTreeMap::new();
        for &p in &partition {
            for j in 0..p {
                *expected.entry(p as i64 - 1 - 2 * j as i64).or_insert(0usize) += 1;
            }
        }
        let top = *expected.keys().last().unwrap_or(&0);
        let want: Vec<usize> = (-top..=top).map(|k| expected.get(&k).copied().unwrap_or(0)).collect();
        if !r.passed() || r.data["gr_dims"] != json!(want) {
            mismatches.push(json!({"seed": s, "partition": partition}));
        }
    }
    checks.push(Check::new(
        "random_nilpotents",
        mismatches.is_empty(),
        json!(samples as usize - mismatches.len()),
        json!(samples),
        Provenance::Formula,
        json!(mismatches),
    ));
    let i3 = degeneration(kodaira(3), Some("0"))?;
    checks.push(Check::new(
        "kodaira_3",
        i3.passed(),
        json!(i3.checks.len()),
        json!(i3.checks.len()),
        Provenance::Formula,
        json!(i3.checks.iter().filter(|c| c.witness.is_some()).map(|c| &c.name).collect::<Vec<_>>()),
    ));
    let lm = local_model_report(&LocalModel::new(1, vec![2, 3], Alpha::zero(), 4)?, None)?;
    checks.push(Check::new(
        "local_model_two_three",
        lm.passed(),
        json!(lm.checks.len()),
        json!(lm.checks.len()),
        Provenance::Formula,
        json!(lm.checks.iter().filter(|c| c.witness.is_some()).map(|c| &c.name).collect::<Vec<_>>()),
    ));
    let doc = MellinDoc { chart: Some(ModelChart::with_sections(1, vec![1, 1], Alpha::zero(), &[1], &[1])?), ..Default::default() };
    checks.extend(mellin(MellinCase::Constant, &doc, None, None)?.checks);
    Ok(Report { command: "selftest".into(), checks, data: json!({"seed": seed, "samples": samples}) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hodge_limit::weightfilt::jordan_nilpotent;

    #[test]
    fn jordan_weights_of_j3_j1() {
        let w = jordan_weights(&jordan_nilpotent(&[3, 1]));
        assert_eq!(w, BTreeMap::from([(-2, 1), (0, 2), (2, 1)]));
    }

    #[test]
    fn jordan_weights_of_zero() {
        assert_eq!(jordan_weights(&ExactMatrix::zeros(3, 3)), BTreeMap::from([(0, 3)]));
    }

    #[test]
    fn unknown_alpha_is_rejected() {
        let err = degeneration(kodaira(3), Some("1/2")).unwrap_err();
        assert!(matches!(err.downcast_ref::<Error>(), Some(Error::UnknownEigenvalue(_))));
    }

    #[test]
    fn offdiag_needs_chart() {
        let err = mellin(MellinCase::Offdiag, &MellinDoc::default(), None, None).unwrap_err();
        assert!(err.downcast_ref::<InputError>().is_some());
    }
}
