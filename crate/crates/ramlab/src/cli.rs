//! Command-line driver: parse job files, dispatch to the computation
//! modules, re-verify every witness, and emit deterministic JSON reports.
//!
//! Exit codes: 0 all verifications pass, 2 parse error, 3 computation
//! error, 4 verification failure.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use crate::approx::{default_xi, ApproximationType};
use crate::extcheck::{extension_invariants, tame_check, DeclaredData, ExtensionSpec};
use crate::fieldcore::{FieldElement, FieldModel, Witness};
use crate::kummer::{
    check_shape, kummer_normal_form_p2, split_p_part, value_sim_terminates,
    verify_membership, KummerOutcome, Rewrite, ValueMonomialSystem,
};
use crate::ordval::{compare, DeltaContext, Value};
use crate::parse::{
    parse_element_with_prec, parse_job, parse_poly_with_prec, JobFile, StreamSpec, TaskSpec,
};
use crate::report::Report;
use crate::suites::{run_suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: exit 2.
    Parse(String),
    /// The computation itself failed, with a structured reason: exit 3.
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Computation(_) => EXIT_COMPUTATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Computation(m) => m,
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

fn comp_err(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

#[derive(Parser)]
#[command(name = "ramlab", version, about = "Exact finite-precision valuation theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job file and print its JSON report.
    Run {
        jobfile: PathBuf,
        /// Also write the report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override the default p-adic precision of parsed elements.
        #[arg(long)]
        prec: Option<i64>,
        /// Override the confirmation count S.
        #[arg(long)]
        confirmations: Option<usize>,
    },
    /// Run a named verification suite.
    Verify {
        /// delta, oneunit, asnf, kummer, ext, or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        size: usize,
        /// Also write the report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path too
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let (report, json_path) = match cli.command {
        Command::Run { jobfile, json, prec, confirmations } => {
            let text = match std::fs::read_to_string(&jobfile) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {}", jobfile.display(), e);
                    return EXIT_PARSE;
                }
            };
            let mut job = match parse_job(&text) {
                Ok(j) => j,
                Err(e) => {
                    eprintln!("error: {}: {}", jobfile.display(), e);
                    return EXIT_PARSE;
                }
            };
            if let Some(p) = prec {
                job.prec = Some(p);
            }
            if let Some(s) = confirmations {
                job.confirmations = s;
            }
            match execute_job(&job) {
                Ok(r) => (r, json),
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    return e.exit_code();
                }
            }
        }
        Command::Verify { suite, seed, size, json } => match verify_report(&suite, seed, size) {
            Ok(r) => (r, json),
            Err(e) => {
                eprintln!("error: {}", e.message());
                return e.exit_code();
            }
        },
    };
    let rendered = report.render();
    print!("{}", rendered);
    if let Some(path) = json_path {
        if let Err(e) = std::fs::write(&path, &rendered) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return EXIT_COMPUTATION;
        }
    }
    exit_code_for(&report)
}

/// The exit-code contract on a completed report: 0 iff every witness
/// re-verified, 4 otherwise.
pub fn exit_code_for(report: &Report) -> i32 {
    if report.all_verified() {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

// ---------------------------------------------------------------------------
// job execution

fn model_json(model: &Arc<FieldModel>) -> Json {
    match &**model {
        FieldModel::Padic { p, .. } => json!({ "kind": "padic", "p": p }),
        FieldModel::IteratedSeries { fq } => {
            json!({ "kind": "iterated", "p": fq.p, "k": fq.k })
        }
        FieldModel::Series { fq, .. } => {
            json!({ "kind": "series", "p": fq.p, "k": fq.k, "rank": model.rank() })
        }
    }
}

fn build_stream(job: &JobFile) -> Result<Option<ApproximationType>, CliError> {
    match &job.stream {
        StreamSpec::None => Ok(None),
        StreamSpec::Default { terms } => Ok(Some(ApproximationType::from_ambient(
            default_xi(&job.model, *terms),
        ))),
        StreamSpec::Ambient { element } => {
            let amb = parse_element_with_prec(&job.model, element, job.prec)
                .map_err(parse_err)?;
            Ok(Some(ApproximationType::from_ambient(amb)))
        }
    }
}

fn require_stream(job: &JobFile) -> Result<ApproximationType, CliError> {
    build_stream(job)?
        .ok_or_else(|| CliError::Parse("this task needs a [stream] block".into()))
}

fn witness_json(w: &Witness) -> Json {
    match w {
        Witness::PthPower { root } => json!({ "kind": "pth-power", "root": root.render() }),
        Witness::UnitFactor { s } => json!({ "kind": "unit-factor", "s": s.render() }),
        Witness::WpPreimage { u } => json!({ "kind": "wp-preimage", "u": u.render() }),
    }
}

fn value_str(v: &Value) -> String {
    v.to_string()
}

pub fn execute_job(job: &JobFile) -> Result<Report, CliError> {
    match &job.task {
        TaskSpec::NfAs { f } => run_nf_as(job, f),
        TaskSpec::NfKummer { f } => run_nf_kummer(job, f),
        TaskSpec::NfKummerSim { p, vp, entries } => run_nf_kummer_sim(job, *p, vp, entries),
        TaskSpec::ExtInvariants { minpoly, declared_e, declared_f, declared_separable } => {
            run_ext_invariants(job, minpoly, *declared_e, *declared_f, *declared_separable)
        }
        TaskSpec::Hensel { minpoly, eta } => run_hensel(job, minpoly, *eta),
        TaskSpec::Verify { suite, seed, size } => verify_report(suite, *seed, *size),
    }
}

fn run_nf_as(job: &JobFile, f_text: &str) -> Result<Report, CliError> {
    let f = parse_poly_with_prec(&job.model, f_text, job.prec).map_err(parse_err)?;
    let mut at = require_stream(job)?;
    let nf = crate::asnf::as_normal_form(&f, &mut at, job.confirmations).map_err(comp_err)?;
    let g = nf.g_poly(&job.model);
    let task = json!({
        "kind": "nf-as",
        "model": model_json(&job.model),
        "f": f.render("x"),
        "confirmations": job.confirmations,
    });
    let result = json!({
        "g": g.render("z"),
        "c": nf.c.render(),
        "d": nf.d.render(),
        "coefficients": nf.coefficients.iter().map(FieldElement::render).collect::<Vec<_>>(),
        "i0": nf.i0,
        "witness": {
            "wp_argument": nf.witness.witness.render("x"),
            "absorbed": nf.witness.absorbed.iter().map(|t| json!({
                "index": t.index,
                "coefficient": t.coefficient.render(),
                "certified_at": t.certified_at.iter().map(value_str).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        },
    });
    let mut report = Report::new(task, result);
    let identity = crate::asnf::verify_normal_form(&f, &nf).map_err(comp_err)?;
    report.add_witness(
        "f(x) - g(z) - wp(W) - absorbed terms vanishes identically",
        json!({ "wp_argument": nf.witness.witness.render("x") }),
        identity,
    );
    for t in &nf.witness.absorbed {
        report.add_witness(
            format!(
                "absorbed coefficient a_{} certified at {} consecutive approximants",
                t.index,
                t.certified_at.len()
            ),
            json!({ "certified_at": t.certified_at.iter().map(value_str).collect::<Vec<_>>() }),
            t.certified_at.len() >= job.confirmations,
        );
    }
    Ok(report)
}

fn chain_json(chain: &[crate::kummer::ClassMove]) -> Json {
    Json::Array(
        chain
            .iter()
            .map(|mv| {
                json!({
                    "label": mv.label,
                    "num": mv.num.render(),
                    "den": mv.den.render(),
                    "witness": witness_json(&mv.witness),
                    "gamma": value_str(&mv.gamma),
                })
            })
            .collect(),
    )
}

fn sim_entries_json(sys: &ValueMonomialSystem) -> Json {
    Json::Array(
        sys.entries
            .iter()
            .map(|(i, v)| json!({ "index": i, "value": value_str(v) }))
            .collect(),
    )
}

fn rewrite_json(r: &Rewrite) -> Json {
    match r {
        Rewrite::Fold { index, target, steps, before, after } => json!({
            "kind": "fold", "index": index, "target": target, "steps": steps,
            "before": value_str(before), "after": value_str(after),
        }),
        Rewrite::Merge { from, to, steps, value } => json!({
            "kind": "merge", "from": from, "to": to, "steps": steps,
            "value": value_str(value),
        }),
    }
}

fn run_nf_kummer(job: &JobFile, f_text: &str) -> Result<Report, CliError> {
    let f = parse_poly_with_prec(&job.model, f_text, job.prec).map_err(parse_err)?;
    let mut at = require_stream(job)?;
    let out = kummer_normal_form_p2(&f, &mut at, job.confirmations).map_err(comp_err)?;
    let task = json!({
        "kind": "nf-kummer",
        "model": model_json(&job.model),
        "f": f.render("x"),
        "confirmations": job.confirmations,
    });
    let (c, d) = out.center();
    let trace_json = out.trace().map(|t| {
        json!({
            "initial": sim_entries_json(&t.initial),
            "folded": sim_entries_json(&t.folded),
            "merges": t.merges,
            "history": t.folded.history.iter().map(rewrite_json).collect::<Vec<_>>(),
        })
    });
    let result = match &out {
        KummerOutcome::NormalForm(nf) => json!({
            "outcome": "normal-form",
            "c": c.render(),
            "d": d.render(),
            "g": out.g_poly().render("z"),
            "coefficients": nf.coefficients.iter().map(FieldElement::render).collect::<Vec<_>>(),
            "i0": nf.i0,
            "prime_index_strengthening": nf.prime_index_strengthening,
            "distinct_value_strengthening": nf.distinct_value_strengthening,
            "chain": chain_json(&nf.chain),
            "trace": trace_json,
        }),
        KummerOutcome::Degenerate(df) => json!({
            "outcome": "degenerate",
            "c": c.render(),
            "d": d.render(),
            "constant": df.constant.as_ref().map(FieldElement::render),
            "chain": chain_json(&df.chain),
            "trace": trace_json,
        }),
    };
    let mut report = Report::new(task, result);
    for mv in out.chain() {
        report.add_witness(
            format!("{}: num = den * root^2 at gamma = {}", mv.label, mv.gamma),
            json!({
                "num": mv.num.render(),
                "den": mv.den.render(),
                "witness": witness_json(&mv.witness),
            }),
            mv.verify().map_err(comp_err)?,
        );
    }
    if let KummerOutcome::NormalForm(nf) = &out {
        report.add_witness(
            "output satisfies the normal-form shape requirements",
            json!({ "i0": nf.i0 }),
            check_shape(nf).is_ok(),
        );
    }
    let membership =
        verify_membership(&f, &out, &at, job.confirmations).map_err(comp_err)?;
    report.add_witness(
        "(1 + f(x)) / (1 + g(z)) is a square at the tested approximants",
        json!({ "tested": job.confirmations }),
        membership,
    );
    Ok(report)
}

fn run_nf_kummer_sim(
    _job: &JobFile,
    p: u32,
    vp_text: &str,
    entry_texts: &[(u64, String)],
) -> Result<Report, CliError> {
    let vp = Value::from_str(vp_text).map_err(parse_err)?;
    let mut entries = std::collections::BTreeMap::new();
    for (idx, text) in entry_texts {
        entries.insert(*idx, Value::from_str(text).map_err(parse_err)?);
    }
    let sys = ValueMonomialSystem::new(p as u64, vp.clone(), entries).map_err(comp_err)?;
    let sim = value_sim_terminates(&sys).map_err(comp_err)?;
    let task = json!({
        "kind": "nf-kummer-sim",
        "p": p,
        "vp": value_str(&vp),
        "entries": sim_entries_json(&sys),
    });
    let result = json!({
        "folded": sim_entries_json(&sim.folded),
        "merges": sim.merges,
        "history": sim.folded.history.iter().map(rewrite_json).collect::<Vec<_>>(),
    });
    let mut report = Report::new(task, result);
    report.add_witness(
        "the fold terminates with no more merges than initial monomials",
        json!({ "merges": sim.merges, "initial": sim.initial.entries.len() }),
        sim.merges <= sim.initial.entries.len(),
    );
    // closed-form recheck of every folded value
    let vp_q = vp.as_rank1().map_err(comp_err)?.clone();
    let dc = DeltaContext::new(p, vp_q);
    for (j, v) in &sim.folded.entries {
        let mut witnessed = false;
        for (n, w) in &sim.initial.entries {
            let (t, m) = split_p_part(p as u64, *n);
            if t == *j {
                let closed = dc.delta_iter(m as i64, w).map_err(comp_err)?;
                if compare(&closed, v).map_err(comp_err)? == std::cmp::Ordering::Equal {
                    witnessed = true;
                }
            }
        }
        report.add_witness(
            format!("folded value at index {} obeys the delta-iterate closed form", j),
            json!({ "index": j, "value": value_str(v) }),
            witnessed,
        );
    }
    Ok(report)
}

fn run_ext_invariants(
    job: &JobFile,
    minpoly_text: &str,
    declared_e: Option<u64>,
    declared_f: Option<u64>,
    declared_separable: Option<bool>,
) -> Result<Report, CliError> {
    let minpoly =
        parse_poly_with_prec(&job.model, minpoly_text, job.prec).map_err(parse_err)?;
    let declared = match (declared_e, declared_f) {
        (Some(e), Some(f)) => Some(DeclaredData {
            e,
            f,
            residue_separable: declared_separable.unwrap_or(true),
        }),
        (None, None) => None,
        _ => {
            return Err(CliError::Parse(
                "declared-e and declared-f must be given together".into(),
            ))
        }
    };
    let spec = ExtensionSpec { base: job.model.clone(), minpoly: minpoly.clone(), declared };
    let inv = extension_invariants(&spec).map_err(comp_err)?;
    let p = job.model.residue_char();
    let tame = tame_check(&inv, p);
    let task = json!({
        "kind": "ext-invariants",
        "model": model_json(&job.model),
        "minpoly": minpoly.render("X"),
    });
    let result = json!({
        "degree": inv.degree,
        "e": inv.e,
        "f": inv.f,
        "defect": inv.defect,
        "te1": inv.te1,
        "te2": inv.te2,
        "te3": inv.te3,
        "tame": tame,
    });
    let mut report = Report::new(task, result);
    report.add_witness(
        "degree = e * f * defect",
        json!({ "degree": inv.degree, "e": inv.e, "f": inv.f, "defect": inv.defect }),
        inv.degree == inv.e * inv.f * inv.defect,
    );
    let mut d = inv.defect;
    while d % p == 0 {
        d /= p;
    }
    report.add_witness(
        "the defect is a power of the residue characteristic",
        json!({ "defect": inv.defect, "p": p }),
        d == 1,
    );
    report.add_witness(
        "tame iff TE1 and TE2 and TE3",
        json!({ "te1": inv.te1, "te2": inv.te2, "te3": inv.te3 }),
        tame == (inv.te1 && inv.te2 && inv.te3),
    );
    Ok(report)
}

fn run_hensel(job: &JobFile, minpoly_text: &str, eta: usize) -> Result<Report, CliError> {
    let h = parse_poly_with_prec(&job.model, minpoly_text, job.prec).map_err(parse_err)?;
    let fq = job.model.residue_field();
    if eta as u64 >= fq.order() {
        return Err(CliError::Parse(format!(
            "eta index {} exceeds the residue-field order {}",
            eta,
            fq.order()
        )));
    }
    let eta_elem = fq.from_index(eta as u64);
    let verdict =
        crate::extcheck::henselian_element_test(&h, &eta_elem).map_err(comp_err)?;
    let task = json!({
        "kind": "hensel",
        "model": model_json(&job.model),
        "minpoly": h.render("X"),
        "eta": eta_elem.render(),
    });
    let mut report = Report::new(task, json!({ "henselian_element": verdict }));
    // re-verify directly on the residue polynomial
    let recheck = match h.residue_poly() {
        Ok(hbar) => {
            fq.is_zero(&hbar.eval(&eta_elem))
                && !fq.is_zero(&hbar.derivative().eval(&eta_elem))
        }
        Err(_) => false,
    };
    report.add_witness(
        "the residue of the generator is a simple root of the reduction",
        json!({ "eta": eta_elem.render() }),
        recheck == verdict,
    );
    Ok(report)
}

fn verify_report(suite: &str, seed: u64, size: usize) -> Result<Report, CliError> {
    let reports = run_suite(suite, seed, size).map_err(parse_err)?;
    let task = json!({ "kind": "verify", "suite": suite, "seed": seed, "size": size });
    let result = Json::Array(reports.iter().map(suite_json).collect());
    let mut report = Report::new(task, result);
    for r in &reports {
        report.add_witness(
            format!("suite {}: {}/{} cases pass", r.suite, r.passed(), r.cases.len()),
            json!({ "seed": r.seed, "size": r.size }),
            r.all_passed(),
        );
    }
    Ok(report)
}

fn suite_json(r: &SuiteReport) -> Json {
    json!({
        "suite": r.suite,
        "seed": r.seed,
        "size": r.size,
        "passed": r.passed(),
        "cases": r.cases.iter().map(|c| json!({
            "id": c.id,
            "pass": c.pass,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_contract_on_reports() {
        let mut ok = Report::new(json!({ "kind": "demo" }), Json::Null);
        ok.add_witness("fine", Json::Null, true);
        assert_eq!(exit_code_for(&ok), EXIT_OK);
        let mut bad = Report::new(json!({ "kind": "demo" }), Json::Null);
        bad.add_witness("broken", Json::Null, false);
        assert_eq!(exit_code_for(&bad), EXIT_VERIFICATION);
    }

    #[test]
    fn worked_as_instance_through_the_job_path() {
        let text = "\
[model]
kind = perfect-hull
p = 2

[stream]
default-terms = 12

[task]
kind = nf-as
f = t^-3 * x^2
";
        let job = parse_job(text).unwrap();
        let report = execute_job(&job).unwrap();
        assert!(report.all_verified());
        let result = &report.to_json()["result"];
        assert_eq!(result["c"], "1");
        assert_eq!(result["d"], "t^(1/2)");
        assert_eq!(result["coefficients"][0], "t^(-3/2)");
        assert_eq!(result["coefficients"][1], "t^-1");
    }

    #[test]
    fn sim_job_rechecks_closed_forms() {
        let text = "\
[model]
kind = padic
p = 2

[task]
kind = nf-kummer-sim
p = 2
vp = 1
entries = 4:3, 1:3
";
        let job = parse_job(text).unwrap();
        let report = execute_job(&job).unwrap();
        assert!(report.all_verified());
    }

    #[test]
    fn ext_job_and_inconsistent_data() {
        let text = "\
[model]
kind = series
p = 3

[task]
kind = ext-invariants
minpoly = x^2 + t*0 + -1*t
";
        let job = parse_job(text).unwrap();
        let report = execute_job(&job).unwrap();
        assert!(report.all_verified());
        let result = &report.to_json()["result"];
        assert_eq!(result["e"], 2);
        assert_eq!(result["tame"], true);
    }

    #[test]
    fn unknown_suite_is_a_parse_error() {
        match verify_report("mystery", 1, 1) {
            Err(CliError::Parse(_)) => {}
            other => panic!("expected a parse error, got {:?}", other),
        }
    }
}
