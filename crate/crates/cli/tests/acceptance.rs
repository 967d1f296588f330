//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{brute_force_trees, fm_feasible, rational, read_fixture, tree_key, tree_violations, Ambient};
use evidential::{format, generate, json};
use evidential_core::lp::Decision;
use evidential_core::rationalize::ExplicitRationalization;
use evidential_core::trees::{children_partition_violations, TreeCondition};
use evidential_core::*;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn doc(name: &str) -> format::Document {
    format::parse(&read_fixture(name)).expect("fixture parses")
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn c1_ranks() -> Verdict {
    let d = doc("example_c.est");
    let s = &d.structure;
    let start = Instant::now();
    let r = rank(s).expect("axioms hold");
    let elapsed = start.elapsed();
    let at = |n: &str| r.rank[s.index_of(n).unwrap()];
    let oracle = Ambient::new(s).ranks();
    let agrees = (0..s.len()).all(|x| oracle[x] == Some(r.rank[x]));
    let ok = at("z") == 2 && at("y") == 3 && agrees && within(elapsed, Duration::from_millis(100));
    verdict(
        ok,
        format!("rank(z)={} rank(y)={} bfs-oracle={agrees} in {elapsed:.2?} (limit 100ms)", at("z"), at("y")),
    )
}

fn c2_no_trees() -> Verdict {
    let d = doc("example_j.est");
    let start = Instant::now();
    let found = find_trees(&d.structure, None);
    let elapsed = start.elapsed();
    let oracle = brute_force_trees(&d.structure);
    let out = Command::new(env!("CARGO_BIN_EXE_evidential"))
        .args(["trees", "find"])
        .arg(common::fixture("example_j.est"))
        .output()
        .expect("run the binary");
    let cli_empty = out.status.code() == Some(1) && String::from_utf8_lossy(&out.stdout).contains("no experimentation tree");
    let ok = found.is_empty() && oracle.is_empty() && cli_empty && within(elapsed, Duration::from_secs(1));
    verdict(
        ok,
        format!(
            "find_trees={} brute-force={} cli-exit={:?} in {elapsed:.2?} (limit 1s)",
            found.len(),
            oracle.len(),
            out.status.code()
        ),
    )
}

fn c3_tree_verdicts() -> Verdict {
    let d = doc("example_d.est");
    let s = &d.structure;
    let amb = Ambient::new(s);
    let start = Instant::now();
    let reports: Vec<_> = ["T1", "T2", "T3"]
        .iter()
        .map(|n| check_tree(s, &d.tree(n).unwrap().candidate))
        .collect();
    let elapsed = start.elapsed();
    let labels = |r: &evidential_core::trees::TreeReport| -> BTreeSet<&'static str> {
        r.failed_conditions().into_iter().map(TreeCondition::label).collect()
    };
    let got: Vec<BTreeSet<&str>> = reports.iter().map(labels).collect();
    let oracle: Vec<BTreeSet<&str>> = ["T1", "T2", "T3"]
        .iter()
        .map(|n| {
            let c = &d.tree(n).unwrap().candidate;
            tree_violations(&amb, &c.nodes, &c.edges)
        })
        .collect();
    let expected_t3: BTreeSet<&str> = ["t-incompat", "t-unbiased"].into();
    let ok = got[0].is_empty()
        && got[1].is_empty()
        && got[2] == expected_t3
        && got == oracle
        && within(elapsed, Duration::from_millis(100));
    verdict(
        ok,
        format!(
            "T1 fails {:?}, T2 fails {:?}, T3 fails {:?} (want T1 {{}}, T2 {{}}, T3 {expected_t3:?}); oracle agrees={} in {elapsed:.2?}",
            got[0],
            got[1],
            got[2],
            got == oracle
        ),
    )
}

fn c4_example_r() -> Verdict {
    let d = doc("example_r.est");
    let (s, p) = (&d.structure, d.plan.as_ref().unwrap());
    let isd = check_isd_plan(s, p);
    let nothing = s.index_of("nothing").unwrap();
    let fails_at_nothing = isd.violations.iter().any(|v| v.state == nothing);
    let decision = decide_rationalizable(s, p).expect("valid plan");
    let feasible = decision.result.is_feasible() && verify_certificate(&decision.system, &decision.result) == Ok(true);

    // The witness as stated: uniform mass on the five maximal states,
    // f_a = 1 on z1..z3 and f_b = 1 on z4, z5.
    let amb = Ambient::new(s);
    let atoms = amb.atoms();
    let idx = |n: &str| atoms.iter().position(|c| c.contains(&s.index_of(n).unwrap())).unwrap();
    let mut fa = vec![BigRational::zero(); atoms.len()];
    let mut fb = vec![BigRational::zero(); atoms.len()];
    for n in ["z1", "z2", "z3"] {
        fa[idx(n)] = BigRational::one();
    }
    for n in ["z4", "z5"] {
        fb[idx(n)] = BigRational::one();
    }
    let witness = ExplicitRationalization {
        weights: vec![rational(1, 5); atoms.len()],
        events: s.states().map(|x| amb.event(&atoms, x)).collect(),
        utilities: vec![fa, fb],
    };
    let direct = verify_rationalization(s, p, &witness).expect("well formed");
    let (file_witness, restricted) =
        json::read_rationalization(&read_fixture("example_r_witness.json"), s, p).expect("witness parses");
    let from_file = verify_rationalization(s, &restricted, &file_witness).expect("well formed");
    let ok = fails_at_nothing
        && feasible
        && direct.satisfied
        && direct.mass_is_one
        && from_file.satisfied
        && atoms.len() == 5;
    verdict(
        ok,
        format!(
            "ISD fails at nothing={fails_at_nothing}; feasible={feasible}; witness verifies={} (min margin {}), fixture witness={}",
            direct.satisfied,
            direct.min_margin.map(|m| json::rational(&m)).unwrap_or_default(),
            from_file.satisfied
        ),
    )
}

fn c5_example_t() -> Verdict {
    let d = doc("example_t.est");
    let (s, p) = (&d.structure, d.plan.as_ref().unwrap());
    let consistent = check_isd_plan(s, p).consistent();
    let Decision { system, result, .. } = decide_rationalizable(s, p).expect("valid plan");
    let infeasible = !result.is_feasible();
    let confirmed = verify_certificate(&system, &result) == Ok(true);
    let oracle = fm_feasible(s, p);
    let ok = consistent && infeasible && confirmed && !oracle;
    verdict(
        ok,
        format!("ISD consistent={consistent}; infeasible={infeasible}; certificate confirmed={confirmed}; FM feasible={oracle}"),
    )
}

/// Random tree with a total plan repaired to be ISD consistent (or broken).
fn tree_case(rng: &mut impl Rng, consistent: bool) -> (ExperimentationTree, Plan) {
    loop {
        let t = generate::tree(rng, 40);
        let k = rng.random_range(2..=4);
        let mut c = generate::choices(rng, t.len(), k);
        generate::make_isd_consistent(&t, &mut c);
        if !consistent {
            generate::make_isd_inconsistent(rng, &t, &mut c, k);
        }
        if t.len() >= 3 {
            return (t, generate::total_plan(k, &c));
        }
    }
}

fn c6_round_trip() -> Verdict {
    const CASES: usize = 200;
    let start = Instant::now();
    let mut rng = generate::rng(6);
    let mut verified = 0;
    let mut largest = 0;
    for _ in 0..CASES {
        let (t, p) = tree_case(&mut rng, true);
        largest = largest.max(t.len());
        let ok = check_isd_plan(t.structure(), &p).consistent()
            && construct_sceu(&t, &p)
                .ok()
                .and_then(|r| verify_rationalization(t.structure(), &p, &r.explicit()).ok())
                .is_some_and(|v| v.satisfied);
        verified += ok as usize;
    }
    let mut refuted = 0;
    for _ in 0..CASES {
        let (t, p) = tree_case(&mut rng, false);
        let ok = !check_isd_plan(t.structure(), &p).consistent()
            && decide_rationalizable(t.structure(), &p).is_ok_and(|d| {
                !d.result.is_feasible() && verify_certificate(&d.system, &d.result) == Ok(true)
            });
        refuted += ok as usize;
    }
    let elapsed = start.elapsed();
    let ok = verified == CASES && refuted == CASES && within(elapsed, Duration::from_secs(60));
    verdict(
        ok,
        format!(
            "consistent: {verified}/{CASES} constructed and verified; inconsistent: {refuted}/{CASES} infeasible; largest tree {largest} nodes; {elapsed:.2?} (limit 60s)"
        ),
    )
}

fn c7_weight_laws() -> Verdict {
    let mut rng = generate::rng(7);
    let mut cases = Vec::new();
    for _ in 0..200 {
        cases.push(tree_case(&mut rng, true));
    }
    let d = doc("example_d.est");
    let t2 = ExperimentationTree::new(&d.structure, &d.tree("T2").unwrap().candidate).expect("T2 is a tree");
    let mut c = generate::choices(&mut rng, t2.len(), 3);
    generate::make_isd_consistent(&t2, &mut c);
    cases.push((t2, generate::total_plan(3, &c)));

    let mut bad = Vec::new();
    for (i, (t, p)) in cases.iter().enumerate() {
        let Ok(r) = construct_sceu(t, p) else {
            bad.push(format!("case {i}: construction failed"));
            continue;
        };
        let amb = Ambient::new(t.structure());
        let n = r.points.len() as u32;
        let three = BigRational::from_integer(3.into());
        let denom = three.pow(n as i32) - BigRational::one();
        let formula_ok = (0..r.points.len()).all(|k| {
            let num = BigRational::from_integer(2.into()) * three.pow(n as i32 - 1 - k as i32);
            r.weights[k] == num / &denom
        });
        let total: BigRational = r.weights.iter().fold(BigRational::zero(), |a, w| a + w);
        let ordering = (0..r.points.len()).all(|i| {
            (0..r.points.len()).all(|j| !amb.sms(r.points[j].state, r.points[i].state) || i < j)
        });
        let dominance = (0..r.points.len()).all(|i| {
            let below = (0..r.points.len())
                .filter(|&j| amb.sms(r.points[j].state, r.points[i].state))
                .fold(BigRational::zero(), |a, j| a + &r.weights[j]);
            below < r.weights[i]
        });
        let first = r.prenormalized.first() == Some(&rational(2, 3));
        let library = r.ordering_violations(t).is_empty() && r.dominance_violations(t).is_empty();
        if !(total.is_one() && formula_ok && ordering && dominance && first && library) {
            bad.push(format!(
                "case {i}: sum=1 {} formula {formula_ok} (B) {ordering} (z) {dominance} p1=2/3 {first} library {library}",
                total.is_one()
            ));
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} rationalizations: sum 1, 2·3^(N-k)/(3^N-1), ordering, strict dominance, first weight 2/3", cases.len())
        } else {
            bad.join("; ")
        },
    )
}

fn c8_fm_agreement() -> Verdict {
    const CASES: usize = 1000;
    let mut rng = generate::rng(8);
    let mut disagree = Vec::new();
    let mut feasible = 0;
    let mut checked = 0;
    let mut extra = vec![doc("example_t.est")];
    extra.retain(|d| d.plan.is_some());
    for i in 0..CASES + extra.len() {
        let (s, p) = if i < CASES {
            let s = generate::set_family(&mut rng, 4, 9);
            let k = rng.random_range(2..=3);
            let p = generate::partial_plan(&mut rng, s.len(), k);
            (s, p)
        } else {
            let d = &extra[i - CASES];
            (d.structure.clone(), d.plan.clone().unwrap())
        };
        let atoms = Ambient::new(&s).atoms().len();
        if atoms > 4 || p.alternative_count() > 3 {
            continue;
        }
        checked += 1;
        let lp = decide_rationalizable(&s, &p).expect("valid plan").result.is_feasible();
        let fm = fm_feasible(&s, &p);
        feasible += lp as usize;
        if lp != fm {
            disagree.push(i);
        }
    }
    verdict(
        disagree.is_empty() && checked >= CASES,
        format!(
            "{}/{checked} systems agree ({feasible} feasible, {} infeasible){}",
            checked - disagree.len(),
            checked - feasible,
            if disagree.is_empty() {
                String::new()
            } else {
                format!("; disagreements at {disagree:?}")
            }
        ),
    )
}

fn canonical_ok(s: &EStructure) -> Result<(), String> {
    let c = build_canonical(s).map_err(|e| e.to_string())?;
    let g = verify_theorem_g(&c, s);
    if !g.passes() {
        return Err(format!("theorem g: {:?}", g));
    }
    let emb = verify_embedding(s, &c.all_atoms(), &c.events).map_err(|e| e.to_string())?;
    if !emb.passes() {
        return Err(format!("embedding: {:?}", emb));
    }
    // Independent count of atoms.
    if Ambient::new(s).atoms().len() != c.atom_count() {
        return Err("atom count differs from the oracle".into());
    }
    Ok(())
}

fn trees_ok(s: &EStructure) -> Result<usize, String> {
    let trees = find_trees(s, Some(50));
    for t in &trees {
        if !children_partition_violations(t).is_empty() {
            return Err(format!("children do not partition: {:?}", tree_key(t)));
        }
        let seq = partitions(t);
        if !seq.violations().is_empty() {
            return Err(format!("partition chain: {:?}", seq.violations()));
        }
    }
    Ok(trees.len())
}

fn c9_canonical() -> Verdict {
    const CASES: usize = 500;
    let mut failures = Vec::new();
    let mut trees = 0;
    let mut structures = 0;
    for (name, text) in evidential::fixtures::ALL {
        if !name.ends_with(".est") {
            continue;
        }
        let d = format::parse(text).expect("fixture parses");
        structures += 1;
        if let Err(e) = canonical_ok(&d.structure).and_then(|_| trees_ok(&d.structure)).map(|n| trees += n) {
            failures.push(format!("{name}: {e}"));
        }
    }
    let mut rng = generate::rng(9);
    for i in 0..CASES {
        let s = if i % 2 == 0 {
            generate::set_family(&mut rng, 5, 10)
        } else {
            generate::tree_structure(&mut rng, 10)
        };
        structures += 1;
        match canonical_ok(&s).and_then(|_| trees_ok(&s)) {
            Ok(n) => trees += n,
            Err(e) => failures.push(format!("random {i}: {e}")),
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{structures} structures, {trees} discovered trees, zero failures")
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 rank fixture", c1_ranks),
        ("2 no trees in example j", c2_no_trees),
        ("3 tree verdicts in example d", c3_tree_verdicts),
        ("4 example r: ISD fails, rationalizable", c4_example_r),
        ("5 example t: ISD holds, not rationalizable", c5_example_t),
        ("6 tree plan round trip", c6_round_trip),
        ("7 weight laws", c7_weight_laws),
        ("8 simplex vs Fourier-Motzkin", c8_fm_agreement),
        ("9 canonical spaces and tree partitions", c9_canonical),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        failed += !v.pass as usize;
        println!("{status} criterion {name}: {} [{:.2?}]", v.detail, start.elapsed());
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
