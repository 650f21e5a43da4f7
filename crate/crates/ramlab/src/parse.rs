//! Text input: the element/polynomial grammar used in job files and the
//! line-oriented job-file format itself.
//!
//! Element syntax: series `1 + t^(1/2) + 2*t^3 @prec 5`, p-adics
//! `17 @prec 2^6`, rank-2 `u^-1*t + t^2 @prec (3,0)`. Polynomials add the
//! indeterminate `x`: `t^-3 * x^2 + x`. Values use the `ordval` syntax
//! (`3/2`, `inf`, `(1, -2/3)`).

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fieldcore::{Exponent, FieldElement, FieldModel, Prec};
use crate::ordval::{parse_rational, Divisibility, GroupDescriptor, Value};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Job { line: usize, message: String },
    #[error("invalid {what}: `{input}`: {message}")]
    Syntax { what: &'static str, input: String, message: String },
}

fn syntax(what: &'static str, input: &str, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { what, input: input.to_string(), message: message.into() }
}

// ---------------------------------------------------------------------------
// term grammar: sum of products of integer and variable-power factors

#[derive(Debug, Clone)]
struct Term {
    coeff: BigInt,
    /// variable -> exponent, for variables in {t, u, x}
    powers: BTreeMap<char, BigRational>,
}

/// Split on a separator at paren depth 0.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_exponent_literal(s: &str, input: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(s);
    parse_rational(inner).map_err(|_| syntax("exponent", input, format!("bad exponent `{}`", s)))
}

fn parse_factor(s: &str, input: &str, term: &mut Term) -> Result<(), ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(syntax("term", input, "empty factor"));
    }
    let first = s.chars().next().unwrap();
    if matches!(first, 't' | 'u' | 'x') {
        let exp = match &s[1..] {
            "" => BigRational::one(),
            rest => {
                let rest = rest
                    .trim_start()
                    .strip_prefix('^')
                    .ok_or_else(|| syntax("term", input, format!("bad factor `{}`", s)))?;
                parse_exponent_literal(rest, input)?
            }
        };
        let cur = term.powers.entry(first).or_insert_with(BigRational::zero);
        *cur += exp;
        return Ok(());
    }
    let n = BigInt::from_str(s)
        .map_err(|_| syntax("term", input, format!("bad factor `{}`", s)))?;
    term.coeff *= n;
    Ok(())
}

fn parse_terms(s: &str, input: &str) -> Result<Vec<Term>, ParseError> {
    let mut terms = Vec::new();
    for part in split_top(s, '+') {
        let part = part.trim();
        if part.is_empty() {
            return Err(syntax("sum", input, "empty term"));
        }
        let mut term = Term { coeff: BigInt::one(), powers: BTreeMap::new() };
        for factor in split_top(part, '*') {
            parse_factor(factor, input, &mut term)?;
        }
        terms.push(term);
    }
    Ok(terms)
}

// ---------------------------------------------------------------------------
// elements

fn split_prec(s: &str) -> (&str, Option<&str>) {
    match s.split_once("@prec") {
        Some((body, prec)) => (body.trim(), Some(prec.trim())),
        None => (s.trim(), None),
    }
}

fn parse_series_prec(model: &Arc<FieldModel>, s: &str, input: &str) -> Result<Prec, ParseError> {
    let v = Value::from_str(s)
        .map_err(|e| syntax("precision", input, e.to_string()))?;
    let e = Exponent::from_value(&v)
        .map_err(|_| syntax("precision", input, "precision bound must be finite"))?;
    if e.rank() != model.rank() {
        return Err(syntax("precision", input, "precision rank does not match the model"));
    }
    Ok(Prec::Finite(e))
}

fn parse_padic_prec(p: u64, s: &str, input: &str) -> Result<i64, ParseError> {
    // accept both `2^12` and a bare exponent `12`
    let exp = match s.split_once('^') {
        Some((base, exp)) => {
            let b: u64 = base
                .trim()
                .parse()
                .map_err(|_| syntax("precision", input, format!("bad precision `{}`", s)))?;
            if b != p {
                return Err(syntax(
                    "precision",
                    input,
                    format!("precision base {} does not match p = {}", b, p),
                ));
            }
            exp.trim()
        }
        None => s,
    };
    exp.parse()
        .map_err(|_| syntax("precision", input, format!("bad precision `{}`", s)))
}

fn series_term_element(
    model: &Arc<FieldModel>,
    term: &Term,
    input: &str,
) -> Result<FieldElement, ParseError> {
    let fq = model.residue_field();
    let rank = model.rank();
    let mut coords = vec![BigRational::zero(); rank];
    for (var, exp) in &term.powers {
        let idx = match (var, rank) {
            ('t', _) => 0,
            ('u', 2) => 1,
            ('x', _) => return Err(syntax("element", input, "`x` is not allowed in elements")),
            _ => {
                return Err(syntax(
                    "element",
                    input,
                    format!("variable `{}` is not defined in this model", var),
                ))
            }
        };
        coords[idx] = exp.clone();
    }
    let e = Exponent(coords);
    if !model.exponent_group().accepts(&e.to_value()) {
        return Err(syntax("element", input, "exponent outside the model's value group"));
    }
    let rem = num_integer::Integer::mod_floor(&term.coeff, &BigInt::from(fq.p))
        .to_i64()
        .expect("residue fits i64");
    Ok(FieldElement::monomial(model, &fq.from_i64(rem), e))
}

/// Parse one element in the given model. `default_prec` supplies the p-adic
/// precision when the text carries no `@prec` suffix.
pub fn parse_element_with_prec(
    model: &Arc<FieldModel>,
    input: &str,
    default_prec: Option<i64>,
) -> Result<FieldElement, ParseError> {
    let (body, prec) = split_prec(input);
    match &**model {
        FieldModel::Padic { p, .. } => {
            let terms = parse_terms(body, input)?;
            let mut n = BigInt::zero();
            for t in &terms {
                if !t.powers.is_empty() {
                    return Err(syntax("element", input, "p-adic elements are integers here"));
                }
                n += &t.coeff;
            }
            let prec = match prec {
                Some(s) => parse_padic_prec(*p, s, input)?,
                None => default_prec.unwrap_or(crate::fieldcore::padic::DEFAULT_PREC),
            };
            Ok(FieldElement::padic_from_bigint(model, n, prec))
        }
        _ => {
            let terms = parse_terms(body, input)?;
            let mut acc = FieldElement::zero(model);
            for t in &terms {
                if t.coeff.is_zero() {
                    continue;
                }
                acc = acc
                    .add(&series_term_element(model, t, input)?)
                    .expect("same model");
            }
            if let Some(s) = prec {
                acc = acc.truncate(&parse_series_prec(model, s, input)?);
            }
            Ok(acc)
        }
    }
}

pub fn parse_element(model: &Arc<FieldModel>, input: &str) -> Result<FieldElement, ParseError> {
    parse_element_with_prec(model, input, None)
}

/// Parse a polynomial in `x`; an optional `name =` prefix is skipped.
pub fn parse_poly_with_prec(
    model: &Arc<FieldModel>,
    input: &str,
    default_prec: Option<i64>,
) -> Result<Poly, ParseError> {
    let body = match input.split_once('=') {
        Some((name, rest)) if name.trim().chars().all(|c| c.is_alphanumeric() || c == '_') => {
            rest
        }
        _ => input,
    };
    let (body, prec) = split_prec(body);
    let terms = parse_terms(body, input)?;
    let mut coeffs: Vec<FieldElement> = Vec::new();
    for t in terms {
        let deg = match t.powers.get(&'x') {
            None => 0usize,
            Some(e) => {
                if !e.denom().is_one() || e.is_negative() {
                    return Err(syntax(
                        "polynomial",
                        input,
                        "powers of x must be nonnegative integers",
                    ));
                }
                e.numer()
                    .to_usize()
                    .ok_or_else(|| syntax("polynomial", input, "degree too large"))?
            }
        };
        let mut coeff_term = t.clone();
        coeff_term.powers.remove(&'x');
        let c = match &**model {
            FieldModel::Padic { .. } => {
                if !coeff_term.powers.is_empty() {
                    return Err(syntax("polynomial", input, "p-adic coefficients are integers"));
                }
                let prec_bits = match prec {
                    Some(s) => {
                        let p = model.residue_char();
                        parse_padic_prec(p, s, input)?
                    }
                    None => default_prec.unwrap_or(crate::fieldcore::padic::DEFAULT_PREC),
                };
                FieldElement::padic_from_bigint(model, coeff_term.coeff.clone(), prec_bits)
            }
            _ => {
                let mut e = series_term_element(model, &coeff_term, input)?;
                if let Some(s) = prec {
                    e = e.truncate(&parse_series_prec(model, s, input)?);
                }
                e
            }
        };
        while coeffs.len() <= deg {
            coeffs.push(FieldElement::zero(model));
        }
        coeffs[deg] = coeffs[deg].add(&c).expect("same model");
    }
    Ok(Poly::new(model.clone(), coeffs))
}

pub fn parse_poly(model: &Arc<FieldModel>, input: &str) -> Result<Poly, ParseError> {
    parse_poly_with_prec(model, input, None)
}

// ---------------------------------------------------------------------------
// job files

#[derive(Debug, Clone, PartialEq)]
pub enum StreamSpec {
    /// Truncations of an explicit ambient element.
    Ambient { element: String },
    /// The built-in test stream with the given term count.
    Default { terms: usize },
    /// No stream (tasks that do not need one).
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskSpec {
    NfAs { f: String },
    NfKummer { f: String },
    NfKummerSim { p: u32, vp: String, entries: Vec<(u64, String)> },
    ExtInvariants {
        minpoly: String,
        declared_e: Option<u64>,
        declared_f: Option<u64>,
        declared_separable: Option<bool>,
    },
    Hensel { minpoly: String, eta: usize },
    Verify { suite: String, seed: u64, size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobFile {
    pub model: Arc<FieldModel>,
    pub stream: StreamSpec,
    pub task: TaskSpec,
    pub confirmations: usize,
    pub prec: Option<i64>,
}

fn job_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Job { line, message: message.into() }
}

fn parse_kv(line: &str, n: usize) -> Result<(String, String), ParseError> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| job_err(n, "expected `key = value`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn build_model(
    fields: &BTreeMap<String, (usize, String)>,
    header_line: usize,
) -> Result<Arc<FieldModel>, ParseError> {
    let get = |k: &str| fields.get(k).map(|(_, v)| v.as_str());
    let kind = get("kind").ok_or_else(|| job_err(header_line, "[model] needs `kind`"))?;
    let num = |k: &str, default: u64| -> Result<u64, ParseError> {
        match fields.get(k) {
            None => Ok(default),
            Some((n, v)) => v
                .parse()
                .map_err(|_| job_err(*n, format!("bad integer for `{}`", k))),
        }
    };
    let p = num("p", 2)?;
    let k = num("k", 1)? as usize;
    match kind {
        "padic" => Ok(FieldModel::padic(p)),
        "perfect-hull" => Ok(FieldModel::perfect_hull(p, k)),
        "iterated" => Ok(FieldModel::iterated(p, k)),
        "series" => {
            let div = match get("exponents").unwrap_or("integers") {
                "integers" => Divisibility::Integers,
                "p-divisible" => Divisibility::PDivisibleIntegers(p as u32),
                "rationals" => Divisibility::Rationals,
                other => {
                    let n = fields.get("exponents").map(|(n, _)| *n).unwrap_or(header_line);
                    return Err(job_err(n, format!("unknown exponent group `{}`", other)));
                }
            };
            let fq = crate::fq::Fq::new(p, k)
                .map_err(|e| job_err(header_line, e.to_string()))?;
            Ok(FieldModel::series(fq, GroupDescriptor::rank1(div)))
        }
        other => Err(job_err(header_line, format!("unknown model kind `{}`", other))),
    }
}

/// Parse the `[model]` / `[stream]` / `[task]` job-file format. Lines are
/// `key = value`; `#` starts a comment; the model block must come first.
pub fn parse_job(text: &str) -> Result<JobFile, ParseError> {
    let mut blocks: Vec<(String, usize, BTreeMap<String, (usize, String)>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            blocks.push((name.trim().to_string(), n, BTreeMap::new()));
            continue;
        }
        let (k, v) = parse_kv(line, n)?;
        let Some(block) = blocks.last_mut() else {
            return Err(job_err(n, "content before the first block header"));
        };
        if block.2.insert(k.clone(), (n, v)).is_some() {
            return Err(job_err(n, format!("duplicate key `{}`", k)));
        }
    }

    let find = |name: &str| blocks.iter().find(|(b, _, _)| b == name);
    let (_, model_line, model_fields) =
        find("model").ok_or_else(|| job_err(1, "missing [model] block"))?;
    let model = build_model(model_fields, *model_line)?;

    let stream = match find("stream") {
        None => StreamSpec::None,
        Some((_, line, fields)) => {
            if let Some((_, v)) = fields.get("ambient") {
                StreamSpec::Ambient { element: v.clone() }
            } else if let Some((n, v)) = fields.get("default-terms") {
                let terms = v
                    .parse()
                    .map_err(|_| job_err(*n, "bad integer for `default-terms`"))?;
                StreamSpec::Default { terms }
            } else {
                return Err(job_err(*line, "[stream] needs `ambient` or `default-terms`"));
            }
        }
    };

    let (_, task_line, task_fields) =
        find("task").ok_or_else(|| job_err(1, "missing [task] block"))?;
    let get = |k: &str| task_fields.get(k);
    let require = |k: &str| -> Result<&(usize, String), ParseError> {
        get(k).ok_or_else(|| job_err(*task_line, format!("[task] needs `{}`", k)))
    };
    let kind = &require("kind")?.1;
    let task = match kind.as_str() {
        "nf-as" => TaskSpec::NfAs { f: require("f")?.1.clone() },
        "nf-kummer" => TaskSpec::NfKummer { f: require("f")?.1.clone() },
        "nf-kummer-sim" => {
            let (pn, pv) = require("p")?;
            let p: u32 = pv.parse().map_err(|_| job_err(*pn, "bad integer for `p`"))?;
            let vp = require("vp")?.1.clone();
            let (en, ev) = require("entries")?;
            let mut entries = Vec::new();
            for part in ev.split(',') {
                let (idx, val) = part
                    .split_once(':')
                    .ok_or_else(|| job_err(*en, "entries are `index:value` pairs"))?;
                let idx: u64 = idx
                    .trim()
                    .parse()
                    .map_err(|_| job_err(*en, format!("bad index `{}`", idx.trim())))?;
                entries.push((idx, val.trim().to_string()));
            }
            TaskSpec::NfKummerSim { p, vp, entries }
        }
        "ext-invariants" => {
            let opt_num = |k: &str| -> Result<Option<u64>, ParseError> {
                match get(k) {
                    None => Ok(None),
                    Some((n, v)) => v
                        .parse()
                        .map(Some)
                        .map_err(|_| job_err(*n, format!("bad integer for `{}`", k))),
                }
            };
            let declared_separable = match get("declared-separable") {
                None => None,
                Some((n, v)) => match v.as_str() {
                    "true" => Some(true),
                    "false" => Some(false),
                    _ => return Err(job_err(*n, "declared-separable must be true or false")),
                },
            };
            TaskSpec::ExtInvariants {
                minpoly: require("minpoly")?.1.clone(),
                declared_e: opt_num("declared-e")?,
                declared_f: opt_num("declared-f")?,
                declared_separable,
            }
        }
        "hensel" => {
            let (en, ev) = require("eta")?;
            let eta = ev
                .parse()
                .map_err(|_| job_err(*en, "bad residue index for `eta`"))?;
            TaskSpec::Hensel { minpoly: require("minpoly")?.1.clone(), eta }
        }
        "verify" => {
            let suite = require("suite")?.1.clone();
            let num = |k: &str, default: u64| -> Result<u64, ParseError> {
                match get(k) {
                    None => Ok(default),
                    Some((n, v)) => v
                        .parse()
                        .map_err(|_| job_err(*n, format!("bad integer for `{}`", k))),
                }
            };
            TaskSpec::Verify {
                suite,
                seed: num("seed", 1)?,
                size: num("size", 100)? as usize,
            }
        }
        other => {
            return Err(job_err(*task_line, format!("unknown task kind `{}`", other)))
        }
    };

    let confirmations = match get("confirmations") {
        None => crate::approx::DEFAULT_CONFIRMATIONS,
        Some((n, v)) => v
            .parse()
            .map_err(|_| job_err(*n, "bad integer for `confirmations`"))?,
    };
    let prec = match get("prec") {
        None => None,
        Some((n, v)) => Some(
            v.parse()
                .map_err(|_| job_err(*n, "bad integer for `prec`"))?,
        ),
    };
    if let Some(p) = prec {
        if p <= 0 {
            let n = get("prec").map(|(n, _)| *n).unwrap_or(*task_line);
            return Err(job_err(n, "precision must be positive"));
        }
    }

    Ok(JobFile { model, stream, task, confirmations, prec })
}
