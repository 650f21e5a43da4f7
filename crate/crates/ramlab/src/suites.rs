//! Seeded verification suites: reproducible property sweeps over the
//! computation modules, driven by the ChaCha8 PRNG so every platform
//! generates the same instance stream for a given (seed, size).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::approx::{extend, ApproximationType};
use crate::fieldcore::{
    is_pth_power, one_unit_shift_a, one_unit_shift_c, verify_pth_power, FieldElement,
    FieldModel, PthPowerVerdict, Witness,
};
use crate::fq::Fq;
use crate::kummer::{
    check_shape, kummer_normal_form_p2, split_p_part, value_sim_terminates, verify_chain,
    verify_membership, KummerOutcome, ValueMonomialSystem,
};
use crate::ordval::{compare, rat, rat_int, DeltaContext, Divisibility, GroupDescriptor, Value};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite `{0}` (expected delta, oneunit, asnf, kummer, ext, or all)")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub size: usize,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }
}

pub const SUITE_NAMES: [&str; 5] = ["delta", "oneunit", "asnf", "kummer", "ext"];

/// Run one named suite, or all of them for `all`. Case lists are assembled
/// in case-id order, so output is deterministic for a fixed (seed, size).
pub fn run_suite(name: &str, seed: u64, size: usize) -> Result<Vec<SuiteReport>, SuiteError> {
    match name {
        "delta" => Ok(vec![delta_suite(seed, size)]),
        "oneunit" => Ok(vec![oneunit_suite(seed, size)]),
        "asnf" => Ok(vec![asnf_suite(seed, size)]),
        "kummer" => Ok(vec![kummer_suite(seed, size)]),
        "ext" => Ok(vec![ext_suite(seed, size)]),
        "all" => Ok(SUITE_NAMES
            .iter()
            .map(|n| run_suite(n, seed, size).expect("known name").remove(0))
            .collect()),
        other => Err(SuiteError::UnknownSuite(other.to_string())),
    }
}

fn case(cases: &mut Vec<CaseResult>, id: String, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => cases.push(CaseResult { id, pass: true, detail: "ok".into() }),
        Err(detail) => cases.push(CaseResult { id, pass: false, detail }),
    }
}

fn rng_for(suite: &str, seed: u64) -> ChaCha8Rng {
    // decouple the streams of the different suites under `all`
    let tag: u64 = suite.bytes().fold(0u64, |acc, b| acc.wrapping_mul(257).wrapping_add(b as u64));
    ChaCha8Rng::seed_from_u64(seed ^ tag)
}

// ---------------------------------------------------------------------------
// delta: the value calculus of the Delta operator

fn delta_case(rng: &mut ChaCha8Rng, p: u32) -> Result<(), String> {
    let vp = [rat_int(1), rat_int(2), rat(3, 2), rat(1, 2)][rng.gen_range(0..4)].clone();
    let ctx = DeltaContext::new(p, vp.clone());
    let gamma = Value::rank1(rat(rng.gen_range(-40..=40), rng.gen_range(1..=6)));

    // monotonicity
    let bump = Value::rank1(rat(rng.gen_range(1..=12), rng.gen_range(1..=4)));
    let gamma2 = gamma.add(&bump).map_err(|e| e.to_string())?;
    let d1 = ctx.delta(&gamma).map_err(|e| e.to_string())?;
    let d2 = ctx.delta(&gamma2).map_err(|e| e.to_string())?;
    if compare(&d1, &d2).map_err(|e| e.to_string())? != std::cmp::Ordering::Less {
        return Err(format!("delta is not monotone at {} < {}", gamma, gamma2));
    }

    // exact fixed point at (p/(p-1)) vp
    let fp = Value::rank1(ctx.fixed_point());
    let dfp = ctx.delta(&fp).map_err(|e| e.to_string())?;
    if dfp != fp {
        return Err(format!("fixed point drifts: delta({}) = {}", fp, dfp));
    }

    // closed form vs iteration, and the inverse law, for |i| <= 10
    let mut it = gamma.clone();
    for i in 0..=10i64 {
        let closed = ctx.delta_iter(i, &gamma).map_err(|e| e.to_string())?;
        if closed != it {
            return Err(format!(
                "closed form and iteration disagree at i = {}: {} vs {}",
                i, closed, it
            ));
        }
        let back = ctx.delta_iter(-i, &closed).map_err(|e| e.to_string())?;
        if back != gamma {
            return Err(format!("inverse law fails at i = {}", i));
        }
        it = ctx.delta(&it).map_err(|e| e.to_string())?;
    }
    Ok(())
}

pub fn delta_suite(seed: u64, size: usize) -> SuiteReport {
    let mut rng = rng_for("delta", seed);
    let mut cases = Vec::new();
    for i in 0..size {
        let p = [2u32, 3, 5][i % 3];
        case(&mut cases, format!("delta-{:04}", i), delta_case(&mut rng, p));
    }
    SuiteReport { suite: "delta".into(), seed, size, cases }
}

// ---------------------------------------------------------------------------
// oneunit: 1-unit shifts over Q_2 against the mod-8 square oracle

pub const ONEUNIT_PREC: i64 = 12;

fn padic(m: &Arc<FieldModel>, n: BigInt, prec: i64) -> FieldElement {
    FieldElement::padic_from_bigint(m, n, prec)
}

fn random_odd(rng: &mut ChaCha8Rng, bits: u32) -> BigInt {
    BigInt::from(rng.gen_range(0..(1u64 << (bits - 1))) * 2 + 1)
}

fn one_plus(x: &FieldElement) -> Result<FieldElement, String> {
    FieldElement::one(&x.model).add(x).map_err(|e| e.to_string())
}

fn expect_root(w: &Witness) -> Result<&FieldElement, String> {
    match w {
        Witness::PthPower { root } => Ok(root),
        other => Err(format!("unexpected witness shape {:?}", other)),
    }
}

fn oneunit_shift_case(rng: &mut ChaCha8Rng, m: &Arc<FieldModel>, part_a: bool) -> Result<(), String> {
    let jb = rng.gen_range(1..=4u32);
    let b = padic(m, random_odd(rng, 6) << jb, ONEUNIT_PREC);
    let (c, num, den) = if part_a {
        // v(c) > 2: the tail is deletable outright
        let jc = rng.gen_range(3..=6u32);
        let c = padic(m, random_odd(rng, 5) << jc, ONEUNIT_PREC);
        let num = one_plus(&b)?;
        let den = one_plus(&b.add(&c).map_err(|e| e.to_string())?)?;
        (c, num, den)
    } else {
        // 1+b-2c ~ 1+b+c^2 whenever v(b) >= 1 and v(c^2) > 1
        let jc = rng.gen_range(1..=4u32);
        let c = padic(m, random_odd(rng, 4) << jc, ONEUNIT_PREC);
        let two_c = c.add(&c).map_err(|e| e.to_string())?;
        let num = one_plus(&b.sub(&two_c).map_err(|e| e.to_string())?)?;
        let den = one_plus(&b.add(&c.mul(&c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?)?;
        (c, num, den)
    };
    let w = if part_a {
        one_unit_shift_a(&b, &c).map_err(|e| e.to_string())?
    } else {
        one_unit_shift_c(&b, &c).map_err(|e| e.to_string())?
    };
    let root = expect_root(&w)?;
    if !verify_pth_power(&num, &den, root, 2).map_err(|e| e.to_string())? {
        return Err("witness does not re-verify".into());
    }
    Ok(())
}

fn oneunit_oracle_case(rng: &mut ChaCha8Rng, m: &Arc<FieldModel>) -> Result<(), String> {
    // a 2-adic unit is a square iff it is 1 mod 8
    let u_int = random_odd(rng, 10);
    let u = padic(m, u_int.clone(), ONEUNIT_PREC);
    let expected = (&u_int % BigInt::from(8)) == BigInt::from(1);
    match is_pth_power(&u).map_err(|e| e.to_string())? {
        PthPowerVerdict::Yes { root } => {
            if !expected {
                return Err(format!("{} is not 1 mod 8 but was declared a square", u_int));
            }
            if !verify_pth_power(&u, &FieldElement::one(m), &root, 2)
                .map_err(|e| e.to_string())?
            {
                return Err("square root does not re-verify".into());
            }
            Ok(())
        }
        PthPowerVerdict::No => {
            if expected {
                return Err(format!("{} is 1 mod 8 but was declared a non-square", u_int));
            }
            Ok(())
        }
        PthPowerVerdict::Inconclusive { reason } => {
            Err(format!("inconclusive verdict on a full-precision unit: {}", reason))
        }
    }
}

pub fn oneunit_suite(seed: u64, size: usize) -> SuiteReport {
    let mut rng = rng_for("oneunit", seed);
    let m = FieldModel::padic(2);
    let mut cases = Vec::new();
    for i in 0..size {
        let outcome = match i % 3 {
            0 => oneunit_shift_case(&mut rng, &m, true),
            1 => oneunit_shift_case(&mut rng, &m, false),
            _ => oneunit_oracle_case(&mut rng, &m),
        };
        case(&mut cases, format!("oneunit-{:04}", i), outcome);
    }
    SuiteReport { suite: "oneunit".into(), seed, size, cases }
}

// ---------------------------------------------------------------------------
// asnf: random Artin-Schreier normal forms over the perfect hulls

fn random_asnf_poly(rng: &mut ChaCha8Rng, m: &Arc<FieldModel>, p: u64) -> Poly {
    // exponent grid: quarters for p = 2 (inside the 2-divisible group),
    // thirds for p = 3
    let den = if p == 2 { 4 } else { 3 };
    let span = 2 * den as i64;
    let fq = m.residue_field();
    let nterms = rng.gen_range(1..=3usize);
    let mut coeffs: Vec<FieldElement> = vec![FieldElement::zero(m); 7];
    for _ in 0..nterms {
        let deg = rng.gen_range(1..=6usize);
        let k = rng.gen_range(-span..=span);
        let mono = FieldElement::monomial(
            m,
            &fq.one(),
            crate::fieldcore::Exponent::rank1(rat(k, den as i64)),
        );
        coeffs[deg] = coeffs[deg].add(&mono).expect("same model");
    }
    Poly::new(m.clone(), coeffs)
}

fn asnf_shape_ok(nf: &crate::asnf::ASNormalForm, p: u64) -> Result<(), String> {
    let mut seen: Vec<Value> = Vec::new();
    for (i, a) in nf.coefficients.iter().enumerate().skip(1) {
        if a.is_zero_at_prec() {
            continue;
        }
        let v = a.value().map_err(|e| e.to_string())?;
        if v.is_positive() || v.is_zero() {
            return Err(format!("tail coefficient a_{} has non-negative value {}", i, v));
        }
        if (i as u64) % p == 0 {
            return Err(format!("tail index {} is divisible by p", i));
        }
        for w in &seen {
            if compare(&v, w).map_err(|e| e.to_string())? == std::cmp::Ordering::Equal {
                return Err(format!("tail value {} occurs twice", v));
            }
        }
        seen.push(v);
    }
    Ok(())
}

fn asnf_case(rng: &mut ChaCha8Rng, m: &Arc<FieldModel>, p: u64) -> Result<(), String> {
    let mut last = String::from("no attempt succeeded");
    for _ in 0..40 {
        let f = random_asnf_poly(rng, m, p);
        if f.degree().is_none() {
            continue;
        }
        let mut at =
            ApproximationType::from_ambient(crate::approx::default_xi(m, 12));
        match crate::asnf::as_normal_form(&f, &mut at, 3) {
            Ok(nf) => {
                if !crate::asnf::verify_normal_form(&f, &nf).map_err(|e| e.to_string())? {
                    return Err(format!(
                        "witness identity fails for {}",
                        f.render("x")
                    ));
                }
                asnf_shape_ok(&nf, p)
                    .map_err(|e| format!("{} (input {})", e, f.render("x")))?;
                for term in &nf.witness.absorbed {
                    if term.certified_at.len() < 3 {
                        return Err(format!(
                            "absorbed term a_{} certified at fewer than 3 approximants",
                            term.index
                        ));
                    }
                }
                return Ok(());
            }
            Err(e) => last = format!("{} (input {})", e, f.render("x")),
        }
    }
    Err(format!("no admissible instance found in 40 attempts; last: {}", last))
}

pub fn asnf_suite(seed: u64, size: usize) -> SuiteReport {
    let mut rng = rng_for("asnf", seed);
    let m2 = FieldModel::perfect_hull(2, 1);
    let m3 = FieldModel::perfect_hull(3, 1);
    let mut cases = Vec::new();
    for i in 0..size {
        let (m, p) = if i % 2 == 0 { (&m2, 2u64) } else { (&m3, 3u64) };
        case(&mut cases, format!("asnf-{:04}", i), asnf_case(&mut rng, m, p));
    }
    SuiteReport { suite: "asnf".into(), seed, size, cases }
}

// ---------------------------------------------------------------------------
// kummer: the p = 2 exact engine and the value simulator

pub const KUMMER_PREC: i64 = 12;

fn random_sim_system(rng: &mut ChaCha8Rng, p: u64) -> ValueMonomialSystem {
    let n = rng.gen_range(1..=8usize);
    let mut entries = BTreeMap::new();
    for _ in 0..n {
        let idx = rng.gen_range(1..=30u64);
        // values strictly above (p+1)/p * vp = (p+1)/p keep every
        // potential inverse rewriting legal
        let v = Value::rank1(rat(2, 1) + rat(rng.gen_range(0..=24), 4));
        entries.insert(idx, v);
    }
    ValueMonomialSystem::new(p, Value::rank1_int(1), entries).expect("valid system")
}

fn kummer_sim_case(rng: &mut ChaCha8Rng, p: u64) -> Result<(), String> {
    let sys = random_sim_system(rng, p);
    let report = value_sim_terminates(&sys).map_err(|e| e.to_string())?;
    if report.merges > sys.entries.len() {
        return Err("merge count exceeds the initial monomial count".into());
    }
    // every folded value obeys the delta-iterate closed form of a source
    let dc = DeltaContext::new(p as u32, rat_int(1));
    for (j, v) in &report.folded.entries {
        let mut witnessed = false;
        for (n, w) in &report.initial.entries {
            let (t, m) = split_p_part(p, *n);
            if t == *j {
                let closed = dc.delta_iter(m as i64, w).map_err(|e| e.to_string())?;
                if compare(&closed, v).map_err(|e| e.to_string())?
                    == std::cmp::Ordering::Equal
                {
                    witnessed = true;
                }
            }
        }
        if !witnessed {
            return Err(format!("folded value at index {} has no closed-form source", j));
        }
    }
    Ok(())
}

fn random_spread_xi(rng: &mut ChaCha8Rng, congruence: u64, prec: i64) -> BigInt {
    // low bits fixed by the congruence, then a dense random tail below the
    // precision bound so the truncation stream yields enough approximants
    let mut xi = congruence;
    let mut pos = rng.gen_range(3..=4u32);
    while pos < prec as u32 {
        if rng.gen_bool(0.7) {
            xi |= 1u64 << pos;
        }
        pos += rng.gen_range(1..=2u32);
    }
    BigInt::from(xi)
}

fn kummer_engine_case(rng: &mut ChaCha8Rng, m: &Arc<FieldModel>, prec: i64) -> Result<(), String> {
    let mut last = String::from("no attempt succeeded");
    for attempt in 0..12 {
        let linear = (attempt + rng.gen_range(0..2usize)) % 2 == 0;
        let (f, mut at) = if linear {
            // f = 2u x with an explicit gamma = 0 approximant at 2
            let u = rng.gen_range(0..64i64) * 2 + 1;
            let f = Poly::new(
                m.clone(),
                vec![
                    FieldElement::zero(m),
                    FieldElement::from_int(m, 2 * u),
                ],
            );
            let amb = padic(m, random_spread_xi(rng, 1, prec), prec);
            let base = ApproximationType::from_ambient(amb);
            let base = grow(base, 10);
            let mut approximants = vec![(FieldElement::from_int(m, 2), Value::zero(1))];
            approximants.extend(base.approximants.clone());
            let at = ApproximationType::new(m.clone(), approximants, None)
                .map_err(|e| e.to_string())?;
            (f, at)
        } else {
            // f = (x - 1) + 16 w x^2 over a stream with xi = 3 mod 4
            let w = rng.gen_range(1..16i64);
            let f = Poly::new(
                m.clone(),
                vec![
                    FieldElement::from_int(m, -1),
                    FieldElement::one(m),
                    FieldElement::from_int(m, 16 * w),
                ],
            );
            let amb = padic(m, random_spread_xi(rng, 3, prec), prec);
            let at = grow(ApproximationType::from_ambient(amb), 10);
            (f, at)
        };
        match kummer_normal_form_p2(&f, &mut at, 3) {
            Ok(out) => {
                if let KummerOutcome::NormalForm(nf) = &out {
                    check_shape(nf).map_err(|e| e.to_string())?;
                }
                if !verify_chain(out.chain()).map_err(|e| e.to_string())? {
                    return Err("witness chain does not re-verify".into());
                }
                if !verify_membership(&f, &out, &at, 3).map_err(|e| e.to_string())? {
                    return Err("membership check fails at the tested approximants".into());
                }
                return Ok(());
            }
            Err(e) => last = format!("{} (input {})", e, f.render("x")),
        }
    }
    Err(format!("no admissible instance found in 12 attempts; last: {}", last))
}

fn grow(mut at: ApproximationType, take: usize) -> ApproximationType {
    for _ in 0..take {
        match extend(&at, 1) {
            Ok(next) => at = next,
            Err(_) => break,
        }
    }
    at
}

/// Simulator-only sweep: `cases_per_p` random systems for each p in
/// {2, 3, 5}, checking termination and the delta-iterate closed forms.
pub fn kummer_sim_sweep(seed: u64, cases_per_p: usize) -> SuiteReport {
    let mut rng = rng_for("kummer-sim", seed);
    let mut cases = Vec::new();
    for (pi, p) in [2u64, 3, 5].into_iter().enumerate() {
        for i in 0..cases_per_p {
            case(
                &mut cases,
                format!("sim-p{}-{:04}", p, i),
                kummer_sim_case(&mut rng, p),
            );
        }
        let _ = pi;
    }
    SuiteReport { suite: "kummer-sim".into(), seed, size: 3 * cases_per_p, cases }
}

/// Exact-engine-only sweep over Q_2 at the given precision.
pub fn kummer_engine_sweep(seed: u64, size: usize, prec: i64) -> SuiteReport {
    let mut rng = rng_for("kummer-engine", seed);
    let m = FieldModel::padic(2);
    let mut cases = Vec::new();
    for i in 0..size {
        case(
            &mut cases,
            format!("engine-{:04}", i),
            kummer_engine_case(&mut rng, &m, prec),
        );
    }
    SuiteReport { suite: "kummer-engine".into(), seed, size, cases }
}

pub fn kummer_suite(seed: u64, size: usize) -> SuiteReport {
    let mut rng = rng_for("kummer", seed);
    let m = FieldModel::padic(2);
    let mut cases = Vec::new();
    for i in 0..size {
        let outcome = if i % 2 == 0 {
            let p = [2u64, 3, 5][(i / 2) % 3];
            kummer_sim_case(&mut rng, p)
        } else {
            kummer_engine_case(&mut rng, &m, KUMMER_PREC)
        };
        case(&mut cases, format!("kummer-{:04}", i), outcome);
    }
    SuiteReport { suite: "kummer".into(), seed, size, cases }
}

// ---------------------------------------------------------------------------
// ext: extension-invariant bookkeeping

fn laurent(p: u64) -> Arc<FieldModel> {
    FieldModel::series(Fq::prime(p), GroupDescriptor::rank1(Divisibility::Integers))
}

fn t_pow(m: &Arc<FieldModel>, k: i64) -> FieldElement {
    FieldElement::monomial(
        m,
        &m.residue_field().one(),
        crate::fieldcore::Exponent::rank1(rat_int(k)),
    )
}

fn ext_eisenstein_case(rng: &mut ChaCha8Rng, p: u64) -> Result<(), String> {
    let m = laurent(p);
    let n = rng.gen_range(2..=5usize);
    let mut coeffs = vec![FieldElement::zero(&m); n + 1];
    coeffs[0] = t_pow(&m, 1);
    coeffs[n] = FieldElement::one(&m);
    for c in coeffs.iter_mut().take(n).skip(1) {
        if rng.gen_bool(0.5) {
            *c = t_pow(&m, rng.gen_range(1..=3));
        }
    }
    let spec = crate::extcheck::ExtensionSpec::new(Poly::new(m, coeffs), None);
    let inv = crate::extcheck::extension_invariants(&spec).map_err(|e| e.to_string())?;
    ext_consistency(&inv, p)?;
    if (inv.e, inv.f) != (n as u64, 1) {
        return Err(format!("Eisenstein of degree {} got e = {}, f = {}", n, inv.e, inv.f));
    }
    if crate::extcheck::tame_check(&inv, p) != (n as u64 % p != 0) {
        return Err("tameness disagrees with p | e".into());
    }
    Ok(())
}

fn ext_consistency(inv: &crate::extcheck::ExtensionInvariants, p: u64) -> Result<(), String> {
    if inv.degree != inv.e * inv.f * inv.defect {
        return Err(format!(
            "degree {} != e*f*defect = {}",
            inv.degree,
            inv.e * inv.f * inv.defect
        ));
    }
    let mut d = inv.defect;
    while d % p == 0 {
        d /= p;
    }
    if d != 1 {
        return Err(format!("defect {} is not a power of {}", inv.defect, p));
    }
    if inv.te1 != (inv.e % p != 0) || inv.te3 != (inv.defect == 1) {
        return Err("tameness flags disagree with the invariants".into());
    }
    Ok(())
}

fn ext_fixed_case(which: usize) -> Result<(), String> {
    use crate::extcheck::*;
    match which {
        // unramified quadratics with hand-checked irreducible residues
        0 | 1 | 2 => {
            let p = [2u64, 3, 5][which];
            let m = laurent(p);
            let one = FieldElement::one(&m);
            let a0 = match p {
                2 => one.clone(),                       // X^2 + X + 1
                3 => one.clone(),                       // X^2 + 1
                _ => FieldElement::from_int(&m, 2),     // X^2 + 2
            };
            let a1 = if p == 2 { one.clone() } else { FieldElement::zero(&m) };
            let h = Poly::new(m, vec![a0, a1, one]);
            let inv = extension_invariants(&ExtensionSpec::new(h, None))
                .map_err(|e| e.to_string())?;
            ext_consistency(&inv, p)?;
            if (inv.e, inv.f) != (1, 2) || !tame_check(&inv, p) {
                return Err(format!("unramified quadratic over F_{} misclassified", p));
            }
            Ok(())
        }
        // Artin-Schreier X^p - X - t^-1
        3 | 4 => {
            let p = [2u64, 3][which - 3];
            let m = laurent(p);
            let one = FieldElement::one(&m);
            let mut coeffs = vec![FieldElement::zero(&m); p as usize + 1];
            coeffs[0] = t_pow(&m, -1).neg();
            coeffs[1] = coeffs[1].add(&one.neg()).map_err(|e| e.to_string())?;
            coeffs[p as usize] = coeffs[p as usize].add(&one).map_err(|e| e.to_string())?;
            let inv = extension_invariants(&ExtensionSpec::new(Poly::new(m, coeffs), None))
                .map_err(|e| e.to_string())?;
            ext_consistency(&inv, p)?;
            if (inv.e, inv.f) != (p, 1) || tame_check(&inv, p) {
                return Err(format!("Artin-Schreier over F_{} misclassified", p));
            }
            Ok(())
        }
        // composite immediacy catalog on the rank-2 model
        _ => {
            let l = FieldModel::iterated(2, 1);
            let catalog = [
                CompositeExtension::Trivial,
                CompositeExtension::ConstantField { k: 2 },
                CompositeExtension::TRoot { r: 2 },
                CompositeExtension::TRoot { r: 3 },
                CompositeExtension::URoot { r: 2 },
            ];
            for ext in &catalog {
                let (a, b, c) = layer_indices(ext);
                let expect = a == 1 && b == 1 && c == 1;
                let got = composite_immediate_check(&l, ext).map_err(|e| e.to_string())?;
                if expect != (got == Immediacy::Immediate) {
                    return Err(format!(
                        "immediacy of {:?} disagrees with the layer decomposition",
                        ext
                    ));
                }
            }
            Ok(())
        }
    }
}

fn ext_compose_case(rng: &mut ChaCha8Rng, p: u64) -> Result<(), String> {
    use crate::extcheck::*;
    let random_inv = |rng: &mut ChaCha8Rng| -> ExtensionInvariants {
        let e = [1u64, 2, 3, p][rng.gen_range(0..4)];
        let f = [1u64, 2, 3][rng.gen_range(0..3)];
        let defect = [1u64, p][rng.gen_range(0..2)];
        ExtensionInvariants {
            degree: e * f * defect,
            e,
            f,
            defect,
            te1: e % p != 0,
            te2: rng.gen_bool(0.8),
            te3: defect == 1,
        }
    };
    let a = random_inv(rng);
    let b = random_inv(rng);
    let c = compose(&a, &b, p).map_err(|e| e.to_string())?;
    ext_consistency(&c, p)?;
    if c.degree != a.degree * b.degree
        || c.e != a.e * b.e
        || c.f != a.f * b.f
        || c.defect != a.defect * b.defect
    {
        return Err("tower invariants are not multiplicative".into());
    }
    if tame_check(&c, p) != (tame_check(&a, p) && tame_check(&b, p)) {
        return Err("tameness is not multiplicative".into());
    }
    Ok(())
}

pub fn ext_suite(seed: u64, size: usize) -> SuiteReport {
    let mut rng = rng_for("ext", seed);
    let mut cases = Vec::new();
    for i in 0..size {
        let outcome = match i % 3 {
            0 => ext_eisenstein_case(&mut rng, [2u64, 3, 5][(i / 3) % 3]),
            1 => ext_fixed_case((i / 3) % 6),
            _ => ext_compose_case(&mut rng, [2u64, 3, 5][(i / 3) % 3]),
        };
        case(&mut cases, format!("ext-{:04}", i), outcome);
    }
    SuiteReport { suite: "ext".into(), seed, size, cases }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all_pass(reports: &[SuiteReport]) {
        for r in reports {
            for c in &r.cases {
                assert!(c.pass, "{} failed: {}", c.id, c.detail);
            }
        }
    }

    #[test]
    fn delta_suite_passes() {
        assert_all_pass(&run_suite("delta", 1, 60).unwrap());
    }

    #[test]
    fn oneunit_suite_passes() {
        assert_all_pass(&run_suite("oneunit", 7, 60).unwrap());
    }

    #[test]
    fn asnf_suite_passes() {
        assert_all_pass(&run_suite("asnf", 3, 10).unwrap());
    }

    #[test]
    fn kummer_suite_passes() {
        assert_all_pass(&run_suite("kummer", 5, 10).unwrap());
    }

    #[test]
    fn ext_suite_passes() {
        assert_all_pass(&run_suite("ext", 11, 40).unwrap());
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite("delta", 42, 30).unwrap();
        let b = run_suite("delta", 42, 30).unwrap();
        assert_eq!(a, b);
        let c = run_suite("delta", 43, 30).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(
            run_suite("mystery", 1, 1),
            Err(SuiteError::UnknownSuite(_))
        ));
    }
}
