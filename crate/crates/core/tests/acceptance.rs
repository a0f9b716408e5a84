//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured values next to the targets. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use hodge_limit::dmodlocal::{char_multiplicity_local, kernel_generators_check, LocalModel};
use hodge_limit::exactcore::ExactScalar;
use hodge_limit::fixtures::{graph_degeneration, kodaira, partitions, pbhl_fixtures, random_nilpotent, two_three, Curve};
use hodge_limit::hlcohomology::{cohomology, complex_decomposition, DifferentialPBHL};
use hodge_limit::hodgelefschetz::weil_element;
use hodge_limit::mellinverify::{
    off_diagonal_vanishing, poincare_lelong_1d, primitive_pairing_constant, renormalization_residue, ModelChart,
    Profile, QuadratureConfig, SeparableTestFunction,
};
use hodge_limit::sncdegeneration::{
    characteristic_cycle, characteristic_cycle_alpha, e1_page, e2_page, eigenvalue_set, hard_lefschetz_check,
    local_invariant_cycle_report, Alpha, Degeneration, PbhlOutcome,
};
use hodge_limit::weightfilt::{
    complete_lowering, coordinate_subspace, jordan_nilpotent, monodromy_filtration, sl2_relations_hold,
    verify_monodromy_axioms, weight_operator, weight_space, Monodromy, NilpotentEndo,
};

const RANDOM_NILPOTENTS: u64 = 200;
const MAX_RANDOM_DIM: u64 = 8;
const MAX_JORDAN_DIM: usize = 6;
const MAX_IRREDUCIBLE_DIM: usize = 7;
const MIN_PBHL_FIXTURES: usize = 20;
const DMOD_TRUNCATION: usize = 8;
const TOL_RESIDUE: f64 = 1e-6;
const TOL_LELONG: f64 = 1e-6;
const TOL_RATIO_REL: f64 = 1e-4;
const TOL_OFFDIAG: f64 = 1e-6;
const BUDGET_FILTRATION: Duration = Duration::from_secs(10);
const BUDGET_PBHL: Duration = Duration::from_secs(10);
const BUDGET_KODAIRA_PER_N: Duration = Duration::from_secs(1);
const BUDGET_DMOD: Duration = Duration::from_secs(60);
const BUDGET_MELLIN: Duration = Duration::from_secs(120);

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

fn within(t: Instant, budget: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < budget, format!("{:.2}s of {}s", e.as_secs_f64(), budget.as_secs()))
}

fn jordan_weights(partition: &[usize]) -> Vec<i64> {
    partition.iter().flat_map(|&l| (0..l).map(move |j| 2 * j as i64 - l as i64 + 1)).collect()
}

fn random_suite() -> Vec<NilpotentEndo> {
    (0..RANDOM_NILPOTENTS)
        .map(|seed| {
            let (m, _) = random_nilpotent(seed, 1 + (seed % MAX_RANDOM_DIM) as usize);
            NilpotentEndo::new(m).expect("fixture is nilpotent")
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut axioms = 0;
    for n in random_suite() {
        if monodromy_filtration(&n).and_then(|w| verify_monodromy_axioms(&n, &w)).is_ok() {
            axioms += 1;
        }
    }
    let (mut jordan, mut total) = (0, 0);
    for d in 1..=MAX_JORDAN_DIM {
        for p in partitions(d) {
            total += 1;
            let n = NilpotentEndo::new(jordan_nilpotent(&p)).unwrap();
            let w = monodromy_filtration(&n).unwrap();
            let wt = jordan_weights(&p);
            if (-(d as i64)..=d as i64).all(|k| w.w(k) == coordinate_subspace(d, (0..d).filter(|&i| wt[i] <= k))) {
                jordan += 1;
            }
        }
    }
    let (fast, time) = within(t, BUDGET_FILTRATION);
    Outcome::new(
        axioms == RANDOM_NILPOTENTS && jordan == total && fast,
        format!("axioms {axioms}/{RANDOM_NILPOTENTS}, Jordan oracle {jordan}/{total}, {time}"),
    )
}

fn criterion_2() -> Outcome {
    let (mut dims, mut brackets, mut count) = (0, 0, 0);
    let mut suite = random_suite();
    for d in 1..=MAX_JORDAN_DIM {
        suite.extend(partitions(d).iter().map(|p| NilpotentEndo::new(jordan_nilpotent(p)).unwrap()));
    }
    for n in &suite {
        count += 1;
        let m = Monodromy::new(n).unwrap();
        let g = &m.graded;
        let top = g.support().last().copied().unwrap_or(0);
        let ok = g.support().iter().all(|&l| {
            let sum: usize =
                (0i64.max(-l)..).take_while(|k| l + 2 * k <= top).map(|k| m.primitive_part(l + 2 * k).unwrap().dim()).sum();
            sum == g.gr_dim(l)
        });
        dims += ok as usize;
        let x = m.sl2_complete().unwrap();
        brackets += sl2_relations_hold(&x, &g.y, &g.weights) as usize;
    }
    let mut weil = 0;
    for d in 1..=MAX_IRREDUCIBLE_DIM {
        let y = jordan_nilpotent(&[d]);
        let weights: Vec<i64> = (0..d as i64).map(|j| 2 * j - d as i64 + 1).collect();
        let x = complete_lowering(&y, &weights).unwrap();
        let h = weight_operator(&weights);
        let w = weil_element(&x, &y).unwrap();
        let wi = w.inverse().unwrap();
        let mut ok = w.mul(&h).mul(&wi) == h.neg() && w.mul(&x).mul(&wi) == y.neg() && w.mul(&y).mul(&wi) == x.neg();
        // On the primitive a of weight −l: w(X^j a / j!) = (−1)^j X^{l−j} a / (l−j)!.
        let l = d as i64 - 1;
        let a = weight_space(&weights, -l).vectors().remove(0);
        let fact = |k: i64| (1..=k).product::<i64>();
        for j in 0..=l {
            let lhs = w.apply(&x.pow(j as u32).scale(&ExactScalar::frac(1, fact(j))).apply(&a));
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let rhs = x.pow((l - j) as u32).scale(&ExactScalar::frac(sign, fact(l - j))).apply(&a);
            ok &= lhs == rhs;
        }
        weil += ok as usize;
    }
    Outcome::new(
        dims == count && brackets == count && weil == MAX_IRREDUCIBLE_DIM,
        format!("gr dims {dims}/{count}, sl2 brackets {brackets}/{count}, Weil {weil}/{MAX_IRREDUCIBLE_DIM}"),
    )
}

fn e1_fixtures() -> Vec<(String, DifferentialPBHL)> {
    let mut specs: Vec<(String, _)> = (3..=5).map(|n| (format!("E1 of I_{n}"), kodaira(n))).collect();
    let curves = |g: &[usize]| g.iter().map(|&genus| Curve { genus, mult: 1 }).collect::<Vec<_>>();
    specs.push(("E1 of genus-1 pair".into(), graph_degeneration(&curves(&[1, 0]), &[(0, 1), (0, 1)], 0)));
    specs.push(("E1 of triangle x P1".into(), graph_degeneration(&curves(&[0, 0, 0]), &[(0, 1), (1, 2), (0, 2)], 1)));
    specs
        .into_iter()
        .map(|(name, spec)| {
            let deg = Degeneration::new(spec).unwrap();
            let page = hodge_limit::sncdegeneration::d1_assemble(&deg, &Alpha::zero()).unwrap();
            (name, page.differential_pbhl(&deg).unwrap())
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut fixtures = pbhl_fixtures();
    fixtures.extend(e1_fixtures());
    let mut failures = Vec::new();
    for (name, dp) in &fixtures {
        let c = cohomology(dp);
        let dec = complex_decomposition(dp);
        let ok = match (c, dec) {
            (Ok(c), Ok(dec)) => {
                let homology = dp.d.kernel().dim() - dp.d.image().dim();
                c.verification.passed() && c.presentations_agree && dec.harmonic == homology
            }
            _ => false,
        };
        if !ok {
            failures.push(name.clone());
        }
    }
    let (fast, time) = within(t, BUDGET_PBHL);
    let n = fixtures.len();
    Outcome::new(
        n >= MIN_PBHL_FIXTURES && failures.is_empty() && fast,
        format!("{}/{n} fixtures verified (need ≥ {MIN_PBHL_FIXTURES}), {time}, failing: {failures:?}", n - failures.len()),
    )
}

fn criterion_4() -> Outcome {
    let deg = Degeneration::new(two_three()).unwrap();
    let alphas = eigenvalue_set(&deg).alphas();
    let expected_alphas = vec![Alpha::new(0, 1), Alpha::new(1, 3), Alpha::new(1, 2), Alpha::new(2, 3)];
    let cc = characteristic_cycle(&deg);
    let expected_cc = BTreeMap::from([(vec![0], 2), (vec![1], 3), (vec![0, 1], 5)]);
    let mut summed: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for a in &alphas {
        for (j, m) in characteristic_cycle_alpha(&deg, a).unwrap() {
            *summed.entry(j).or_default() += m;
        }
    }
    // Second route: Artinian lengths on the local chart t = z0^2 z1^3.
    let model = LocalModel::new(1, vec![2, 3], Alpha::zero(), 4).unwrap();
    let local: BTreeMap<Vec<u32>, u64> = [vec![0usize], vec![1], vec![0, 1]]
        .into_iter()
        .map(|j| (j.iter().map(|&x| x as u32).collect(), char_multiplicity_local(&model, &j).unwrap()))
        .collect();
    let ok = alphas == expected_alphas && cc == expected_cc && summed == cc && local == cc;
    Outcome::new(ok, format!("eigenvalues {alphas:?}, cc {cc:?}, Σ_α cc_α {summed:?}, local lengths {local:?}"))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 3..=5u32 {
        let t = Instant::now();
        let deg = Degeneration::new(kodaira(n)).unwrap();
        let e2 = e2_page(&deg, &Alpha::zero()).unwrap();
        let inv = local_invariant_cycle_report(&deg).unwrap();
        let nn = n as usize;
        let spots = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        let e1_ok = spots.iter().all(|s| e2.e1_dims.get(s) == Some(&nn)) && e2.e1_dims.len() == 4;
        let ranks_ok = e2.d1_ranks.get(&(-1, 0)) == Some(&(nn - 1)) && e2.d1_ranks.get(&(0, 1)) == Some(&(nn - 1));
        let e2_ok = spots.iter().all(|s| e2.dims.get(s) == Some(&1)) && e2.dims.len() == 4;
        let gr_ok = e2.limit_gr.get(&1) == Some(&BTreeMap::from([(0, 1), (2, 1)]));
        let euler_ok = e2.euler_e1 == 0 && e2.euler_e2 == 0;
        let (fast, time) = within(t, BUDGET_KODAIRA_PER_N);
        let all = e1_ok && ranks_ok && e2_ok && gr_ok && euler_ok && inv.exact() && e2.monodromy_weight_holds() && fast;
        ok &= all;
        notes.push(format!(
            "I_{n}: E1 {:?} d1 {:?} E2 {:?} H1 gr {:?} χ ({},{}) inv {} mw {} {time}",
            e2.e1_dims.values().collect::<Vec<_>>(),
            e2.d1_ranks.values().filter(|&&r| r > 0).collect::<Vec<_>>(),
            e2.dims.values().collect::<Vec<_>>(),
            e2.limit_gr.get(&1),
            e2.euler_e1,
            e2.euler_e2,
            inv.exact(),
            e2.monodromy_weight_holds()
        ));
    }
    Outcome::new(ok, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let (mut passed, mut total) = (0, 0);
    let mut failures = Vec::new();
    for e in [vec![1, 1], vec![1, 1, 1], vec![2, 3], vec![2, 2]] {
        let k = e.len() - 1;
        for n in k..=3 {
            for alpha in LocalModel::eigenvalues(&e) {
                let m = LocalModel::new(n, e.clone(), alpha.clone(), DMOD_TRUNCATION).unwrap();
                for r in 0..=m.mu() {
                    total += 1;
                    match kernel_generators_check(&m, r) {
                        Ok(c) if c.passed => passed += 1,
                        other => failures.push(format!("n={n} e={e:?} α={alpha} r={r}: {other:?}")),
                    }
                }
            }
        }
    }
    let (fast, time) = within(t, BUDGET_DMOD);
    Outcome::new(passed == total && fast, format!("{passed}/{total} models, truncation {DMOD_TRUNCATION}, {time}, failing: {failures:?}"))
}

fn rel_close(got: f64, target: f64) -> bool {
    (got - target).abs() <= TOL_RATIO_REL * target.abs()
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let cfg = QuadratureConfig::default();
    let mut notes = Vec::new();
    let mut ok = true;

    let g = Profile::bump(1.0, 0.7);
    let res = renormalization_residue(&g, &cfg).unwrap();
    ok &= (res - 1.0).abs() <= TOL_RESIDUE;
    notes.push(format!("residue {res:.9} (target 1)"));

    let eta = Profile::new(0.6, vec![1.0, 0.4]).unwrap();
    let pl = poincare_lelong_1d(&eta, &cfg).unwrap();
    ok &= (pl - 1.0).abs() <= TOL_LELONG;
    notes.push(format!("Poincaré-Lelong {pl:.9} (target 1)"));

    let cases: Vec<(&str, ModelChart)> = vec![
        ("r=0 reduced n=1 k=1", ModelChart::with_sections(1, vec![1, 1], Alpha::zero(), &[1], &[1]).unwrap()),
        ("r=0 α=1/2 e=(2,1)", ModelChart::with_sections(1, vec![2, 1], Alpha::new(1, 2), &[], &[]).unwrap()),
        ("r=0 α=1/2 e=(2,3,1)", ModelChart::with_sections(2, vec![2, 3, 1], Alpha::new(1, 2), &[], &[]).unwrap()),
        ("r=1 reduced n=2 k=2", ModelChart::with_sections(2, vec![1, 1, 1], Alpha::zero(), &[2], &[2]).unwrap()),
        ("r=1 α=0 e=(2,3)", ModelChart::with_sections(1, vec![2, 3], Alpha::zero(), &[], &[]).unwrap()),
    ];
    for (name, chart) in &cases {
        let eta = SeparableTestFunction::standard(chart.n + 1);
        let pc = primitive_pairing_constant(chart, &eta, &cfg).unwrap();
        let good = rel_close(pc.ratio, pc.target);
        ok &= good;
        notes.push(format!(
            "{name} ratio {:.6} target {:.6} {}",
            pc.ratio,
            pc.target,
            if good { "ok" } else { "MISMATCH" }
        ));
    }

    let off = ModelChart::with_sections(2, vec![1, 1, 1], Alpha::zero(), &[1], &[2]).unwrap();
    let od = off_diagonal_vanishing(&off, &SeparableTestFunction::standard(3), &cfg).unwrap();
    ok &= od.vanishes(TOL_OFFDIAG);
    notes.push(format!("off-diagonal residue {:.1e} pole order {}", od.residue, od.pole_order));

    let (fast, time) = within(t, BUDGET_MELLIN);
    ok &= fast;
    notes.push(time);
    Outcome::new(ok, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 3..=5u32 {
        let deg = Degeneration::new(kodaira(n)).unwrap();
        let e2 = e2_page(&deg, &Alpha::zero()).unwrap();
        let rep = hard_lefschetz_check(&deg, &Alpha::zero()).unwrap();
        let e1 = e1_page(&deg, &Alpha::zero()).unwrap();
        let (agree, verified) = match &rep.pbhl {
            PbhlOutcome::Passed { dims_agree, dims } => {
                let same = dims.len() == e2.dims.values().filter(|&&d| d > 0).count();
                (*dims_agree && same, true)
            }
            _ => (false, false),
        };
        let good = agree && verified && rep.passed() && e1.dim() > 0;
        ok &= good;
        notes.push(format!("I_{n}: dims agree {agree}, pbhl {verified}"));
    }
    Outcome::new(ok, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("monodromy filtration", criterion_1),
        ("Lefschetz and sl2", criterion_2),
        ("differential pbHL closure", criterion_3),
        ("characteristic cycles", criterion_4),
        ("Kodaira I_N", criterion_5),
        ("local kernel generators", criterion_6),
        ("Mellin constants", criterion_7),
        ("pipeline self-consistency", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        failed += !out.ok as usize;
        println!("criterion {} [{name}]: {} | {}", i + 1, if out.ok { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
