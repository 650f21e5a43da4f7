//! The acceptance gate: one criterion per check, one printed pass/fail line
//! each, all run from a single test so the summary reads as a block.

use std::process::Command;

use ramlab::asnf::{generator_criterion, GeneratorVerdict};
use ramlab::cli::execute_job;
use ramlab::extcheck::{
    composite_immediate_check, extension_invariants, layer_indices, tame_check,
    CompositeExtension, ExtensionSpec, Immediacy,
};
use ramlab::fieldcore::{Exponent, FieldElement, FieldModel};
use ramlab::ordval::{rat, rat_int, Divisibility, GroupDescriptor};
use ramlab::parse::parse_job;
use ramlab::poly::Poly;
use ramlab::suites::{
    asnf_suite, delta_suite, ext_suite, kummer_engine_sweep, kummer_sim_sweep,
    oneunit_suite, SuiteReport,
};

const SEED: u64 = 1;

fn suite_outcome(r: &SuiteReport) -> Result<(), String> {
    match r.cases.iter().find(|c| !c.pass) {
        None => Ok(()),
        Some(c) => Err(format!("{}: {}", c.id, c.detail)),
    }
}

// criterion 1: the delta-calculus property sweep, 1000 cases per p
fn criterion_delta() -> Result<(), String> {
    suite_outcome(&delta_suite(SEED, 3000))
}

// criterion 2: 1-unit shifts and the mod-8 square oracle, 400 cases per part
fn criterion_oneunit() -> Result<(), String> {
    suite_outcome(&oneunit_suite(SEED, 1200))
}

// criterion 3: 50 random Artin-Schreier normal forms plus the byte-exact
// worked instance f = t^-3 x^2
fn criterion_asnf() -> Result<(), String> {
    suite_outcome(&asnf_suite(SEED, 50))?;
    let job = parse_job(
        "[model]\nkind = perfect-hull\np = 2\n\n[stream]\ndefault-terms = 12\n\n\
         [task]\nkind = nf-as\nf = t^-3 * x^2\n",
    )
    .map_err(|e| e.to_string())?;
    let report = execute_job(&job).map_err(|e| e.message().to_string())?;
    if !report.all_verified() {
        return Err("worked instance report has failing witnesses".into());
    }
    let result = &report.to_json()["result"];
    for (field, expected) in [
        ("c", "1"),
        ("d", "t^(1/2)"),
        ("g", "t^(-3/2) + (t^-1) * z"),
    ] {
        let got = result[field].as_str().unwrap_or("<missing>");
        if got != expected {
            return Err(format!("worked instance {}: got `{}`, want `{}`", field, got, expected));
        }
    }
    Ok(())
}

// criterion 4: the unique-least-value generator criterion against brute
// force, exhaustively over all tail-coefficient lists of length <= 4 drawn
// from a 7-element grid (six monomial values plus zero)
fn criterion_generator() -> Result<(), String> {
    let m = FieldModel::perfect_hull(2, 1);
    let fq = m.residue_field();
    let grid: Vec<Option<(i64, i64)>> = vec![
        None,
        Some((-2, 1)),
        Some((-3, 2)),
        Some((-1, 1)),
        Some((-1, 2)),
        Some((1, 2)),
        Some((1, 1)),
    ];
    let make = |opt: &Option<(i64, i64)>| -> FieldElement {
        match opt {
            None => FieldElement::zero(&m),
            Some((n, d)) => FieldElement::monomial(&m, &fq.one(), Exponent::rank1(rat(*n, *d))),
        }
    };
    let mut total = 0usize;
    for len in 1..=4usize {
        let mut idx = vec![0usize; len];
        loop {
            // brute-force evaluation of the hypothesis
            let mut min: Option<(usize, (i64, i64), bool)> = None;
            for (i, gi) in idx.iter().enumerate() {
                let Some(v) = grid[*gi] else { continue };
                let vi = rat(v.0, v.1);
                min = match min {
                    None => Some((i + 1, v, true)),
                    Some((bi, bv, uniq)) => {
                        let b = rat(bv.0, bv.1);
                        if vi < b {
                            Some((i + 1, v, true))
                        } else if vi == b {
                            Some((bi, bv, false))
                        } else {
                            Some((bi, bv, uniq))
                        }
                    }
                };
            }
            let brute_holds = matches!(min, Some((i0, _, true)) if i0 % 2 == 1);
            let mut coeffs = vec![FieldElement::zero(&m)];
            coeffs.extend(idx.iter().map(|gi| make(&grid[*gi])));
            let verdict = generator_criterion(&coeffs, 2).map_err(|e| e.to_string())?;
            let agreed = match (&verdict, &min) {
                (GeneratorVerdict::Holds { i0 }, Some((bi, _, true))) => {
                    brute_holds && i0 == bi
                }
                (GeneratorVerdict::Fails { .. }, _) => !brute_holds,
                _ => false,
            };
            if !agreed {
                return Err(format!(
                    "disagreement at indices {:?}: engine said {:?}, brute force said {}",
                    idx, verdict, brute_holds
                ));
            }
            total += 1;
            // advance the odometer
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < grid.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == len {
                    break;
                }
            }
            if k == len {
                break;
            }
        }
    }
    if total != 7 + 49 + 343 + 2401 {
        return Err(format!("enumeration covered {} cases, expected 2800", total));
    }
    Ok(())
}

// criterion 5: the exact p = 2 engine on 21 admissible inputs at precision
// 2^12; shape, membership, and chain re-verification happen inside each
// case, and every completed run certifies its value trace entry-for-entry
// against the simulator (the engine aborts on any mismatch)
fn criterion_kummer_engine() -> Result<(), String> {
    suite_outcome(&kummer_engine_sweep(SEED, 21, 12))
}

// criterion 6: the value simulator, 500 random systems per p in {2, 3, 5},
// with termination and closed-form rechecks per case
fn criterion_value_sim() -> Result<(), String> {
    suite_outcome(&kummer_sim_sweep(SEED, 500))
}

// criterion 7: extension-invariant catalog cross-checks, including the
// X^2 - t tame/wild pair and layerwise immediacy on the rank-2 catalog
fn criterion_ext() -> Result<(), String> {
    suite_outcome(&ext_suite(SEED, 60))?;
    let x2_minus_t = |p: u64| -> Poly {
        let m = FieldModel::series(
            ramlab::fq::Fq::prime(p),
            GroupDescriptor::rank1(Divisibility::Integers),
        );
        let t = FieldElement::monomial(&m, &m.residue_field().one(), Exponent::rank1(rat_int(1)));
        Poly::new(
            m.clone(),
            vec![t.neg(), FieldElement::zero(&m), FieldElement::one(&m)],
        )
    };
    let tame3 = extension_invariants(&ExtensionSpec::new(x2_minus_t(3), None))
        .map_err(|e| e.to_string())?;
    if !(tame3.e == 2 && tame3.f == 1 && tame3.defect == 1 && tame_check(&tame3, 3)) {
        return Err("X^2 - t over F_3((t)) should be tame totally ramified".into());
    }
    let wild2 = extension_invariants(&ExtensionSpec::new(x2_minus_t(2), None))
        .map_err(|e| e.to_string())?;
    if !(wild2.e == 2 && wild2.defect == 1 && !tame_check(&wild2, 2)) {
        return Err("X^2 - t over F_2((t)) should be wild".into());
    }
    let l = FieldModel::iterated(2, 1);
    let catalog = [
        CompositeExtension::Trivial,
        CompositeExtension::ConstantField { k: 2 },
        CompositeExtension::ConstantField { k: 3 },
        CompositeExtension::TRoot { r: 2 },
        CompositeExtension::TRoot { r: 3 },
        CompositeExtension::URoot { r: 2 },
        CompositeExtension::URoot { r: 3 },
    ];
    for ext in &catalog {
        let (a, b, c) = layer_indices(ext);
        let layerwise = a == 1 && b == 1 && c == 1;
        let direct = composite_immediate_check(&l, ext).map_err(|e| e.to_string())?;
        if layerwise != (direct == Immediacy::Immediate) {
            return Err(format!("immediacy disagreement on {:?}", ext));
        }
    }
    Ok(())
}

// criterion 8: byte-deterministic CLI reports and the exit-code contract
fn criterion_cli() -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_ramlab");
    let job = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs/nf-kummer-sim.job");
    let job = job.to_str().unwrap();
    let run = |args: &[&str]| -> Result<(Option<i32>, Vec<u8>), String> {
        let out = Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        Ok((out.status.code(), out.stdout))
    };
    let (code1, out1) = run(&["run", job])?;
    let (code2, out2) = run(&["run", job])?;
    if code1 != Some(0) || code2 != Some(0) {
        return Err(format!("golden job exited with {:?} / {:?}", code1, code2));
    }
    if out1 != out2 {
        return Err("two runs of the same job differ byte-for-byte".into());
    }
    let bad = std::env::temp_dir().join("ramlab-acceptance-bad.job");
    std::fs::write(&bad, "[model]\nkind = nonsense\n").map_err(|e| e.to_string())?;
    let (code, _) = run(&["run", bad.to_str().unwrap()])?;
    let _ = std::fs::remove_file(&bad);
    if code != Some(2) {
        return Err(format!("malformed job exited with {:?}, want 2", code));
    }
    let comp = std::env::temp_dir().join("ramlab-acceptance-comp.job");
    std::fs::write(
        &comp,
        "[model]\nkind = padic\np = 2\n\n[stream]\nambient = 46420133 @prec 2^64\n\n\
         [task]\nkind = nf-kummer\nf = 8*x^2\n",
    )
    .map_err(|e| e.to_string())?;
    let (code, _) = run(&["run", comp.to_str().unwrap()])?;
    let _ = std::fs::remove_file(&comp);
    if code != Some(3) {
        return Err(format!("computation-error job exited with {:?}, want 3", code));
    }
    // exit 4 is the completed-report-with-failed-witness path
    let mut failing = ramlab::report::Report::new(serde_json::json!({"kind": "demo"}), serde_json::Value::Null);
    failing.add_witness("broken", serde_json::Value::Null, false);
    if ramlab::cli::exit_code_for(&failing) != 4 {
        return Err("a report with a failed recheck must map to exit 4".into());
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("1 delta-calculus suite (1000 cases per p in {2,3,5})", criterion_delta),
        ("2 one-unit shifts vs the mod-8 oracle (400 cases per part)", criterion_oneunit),
        ("3 Artin-Schreier normal forms (50 instances + worked example)", criterion_asnf),
        ("4 generator criterion vs brute force (2800 exhaustive cases)", criterion_generator),
        ("5 Kummer p=2 engine (21 admissible inputs at precision 2^12)", criterion_kummer_engine),
        ("6 value simulator (500 systems per p in {2,3,5})", criterion_value_sim),
        ("7 extension-invariant catalog cross-checks", criterion_ext),
        ("8 CLI byte-determinism and exit codes", criterion_cli),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(()) => println!("criterion {}: pass", name),
            Err(e) => {
                println!("criterion {}: FAIL ({})", name, e);
                failures.push(format!("{}: {}", name, e));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
