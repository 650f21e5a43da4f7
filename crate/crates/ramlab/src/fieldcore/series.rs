//! Generalized power series over F_q: finitely many known terms plus an
//! absolute precision bound. Covers rank-1 Laurent/Puiseux series and the
//! rank-2 iterated model (lex exponents, t-coordinate first).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::fq::FqElem;
use crate::ordval::Value;

use super::{Exponent, FieldError, FieldModel, Prec};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRepr {
    /// Nonzero coefficients at exponents strictly below `prec`.
    pub terms: BTreeMap<Exponent, FqElem>,
    pub prec: Prec,
}

impl SeriesRepr {
    pub fn exact_zero() -> SeriesRepr {
        SeriesRepr { terms: BTreeMap::new(), prec: Prec::Unbounded }
    }
}

fn normalize(model: &Arc<FieldModel>, mut terms: BTreeMap<Exponent, FqElem>, prec: Prec) -> SeriesRepr {
    let fq = model.residue_field();
    terms.retain(|e, c| prec.admits(e) && !fq.is_zero(c));
    SeriesRepr { terms, prec }
}

/// Effective lower bound on the value: least term exponent, or the finite
/// precision bound if no terms are known. `None` means exact zero.
fn value_floor(a: &SeriesRepr) -> Option<Exponent> {
    if let Some(e) = a.terms.keys().next() {
        return Some(e.clone());
    }
    match &a.prec {
        Prec::Finite(b) => Some(b.clone()),
        Prec::Unbounded => None,
    }
}

pub fn value(a: &SeriesRepr) -> Result<Value, FieldError> {
    if let Some(e) = a.terms.keys().next() {
        return Ok(e.to_value());
    }
    match &a.prec {
        Prec::Unbounded => Ok(Value::Infinity),
        Prec::Finite(b) => Err(FieldError::InsufficientPrecision(format!(
            "element vanishes below precision {}",
            render_exp_bound(b)
        ))),
    }
}

pub fn add(model: &Arc<FieldModel>, a: &SeriesRepr, b: &SeriesRepr) -> SeriesRepr {
    let fq = model.residue_field();
    let prec = a.prec.min(&b.prec);
    let mut terms = a.terms.clone();
    for (e, c) in &b.terms {
        let cur = terms.entry(e.clone()).or_insert_with(|| fq.zero());
        *cur = fq.add(cur, c);
    }
    normalize(model, terms, prec)
}

pub fn neg(model: &Arc<FieldModel>, a: &SeriesRepr) -> SeriesRepr {
    let fq = model.residue_field();
    SeriesRepr {
        terms: a.terms.iter().map(|(e, c)| (e.clone(), fq.neg(c))).collect(),
        prec: a.prec.clone(),
    }
}

pub fn mul(model: &Arc<FieldModel>, a: &SeriesRepr, b: &SeriesRepr) -> SeriesRepr {
    let fq = model.residue_field();
    // pessimistic output bound: min(va + Pb, vb + Pa), with the precision
    // bound standing in for an undetermined value
    let prec = match (value_floor(a), value_floor(b)) {
        (None, _) | (_, None) => return SeriesRepr::exact_zero(),
        (Some(va), Some(vb)) => a.prec.shift(&vb).min(&b.prec.shift(&va)),
    };
    let mut terms: BTreeMap<Exponent, FqElem> = BTreeMap::new();
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e = ea.add(eb);
            if !prec.admits(&e) {
                continue;
            }
            let c = fq.mul(ca, cb);
            let cur = terms.entry(e).or_insert_with(|| fq.zero());
            *cur = fq.add(cur, &c);
        }
    }
    normalize(model, terms, prec)
}

pub fn inv(model: &Arc<FieldModel>, a: &SeriesRepr) -> Result<SeriesRepr, FieldError> {
    let fq = model.residue_field();
    let (v, lead) = match a.terms.iter().next() {
        Some((e, c)) => (e.clone(), c.clone()),
        None => return Err(FieldError::InvertZero),
    };
    let lead_inv = fq.inv(&lead)?;
    // single known term: the inverse monomial is exact up to the input's
    // own uncertainty
    if a.terms.len() == 1 {
        let prec = match &a.prec {
            Prec::Unbounded => Prec::Unbounded,
            // a = c t^v + O(P): 1/a = c^-1 t^-v (1 + O(P - v))^-1 = c^-1 t^-v + O(P - 2v)
            Prec::Finite(p) => Prec::Finite(p.add(&v.scale_int(2).neg())),
        };
        let mut terms = BTreeMap::new();
        let e = v.neg();
        if prec.admits(&e) {
            terms.insert(e, lead_inv);
        }
        return Ok(SeriesRepr { terms, prec });
    }
    // a = c t^v (1 + w), v(w) > 0: invert by the geometric series, truncated
    // at the guaranteed relative precision
    let rel = match &a.prec {
        Prec::Unbounded => {
            return Err(FieldError::ExactInverseNotRepresentable);
        }
        Prec::Finite(p) => p.add(&v.neg()),
    };
    let unit_prec = Prec::Finite(rel.clone());
    let mut w_terms: BTreeMap<Exponent, FqElem> = BTreeMap::new();
    for (e, c) in &a.terms {
        if e == &v {
            continue;
        }
        w_terms.insert(e.add(&v.neg()), fq.mul(c, &lead_inv));
    }
    let w = SeriesRepr { terms: w_terms, prec: unit_prec.clone() };
    let mut acc = SeriesRepr {
        terms: BTreeMap::from([(Exponent::zero(model.rank()), fq.one())]),
        prec: unit_prec.clone(),
    };
    let mut pw = acc.clone();
    let neg_w = neg(model, &w);
    loop {
        // keep the power pinned to the guaranteed relative precision so the
        // iteration terminates once v(w^k) passes it
        pw = truncate(&mul(model, &pw, &neg_w), &unit_prec);
        if pw.terms.is_empty() {
            break;
        }
        acc = add(model, &acc, &pw);
    }
    // shift by c^-1 t^-v
    let shift = SeriesRepr {
        terms: BTreeMap::from([(v.neg(), lead_inv)]),
        prec: Prec::Unbounded,
    };
    Ok(mul(model, &acc, &shift))
}

pub fn residue(model: &Arc<FieldModel>, a: &SeriesRepr) -> Result<FqElem, FieldError> {
    let fq = model.residue_field();
    let zero_exp = Exponent::zero(model.rank());
    if let Some(e) = a.terms.keys().next() {
        if e.is_negative() {
            return Err(FieldError::NegativeValue);
        }
    }
    match &a.prec {
        Prec::Finite(b) if *b <= zero_exp => Err(FieldError::InsufficientPrecision(
            "constant term not determined at this precision".into(),
        )),
        _ => Ok(a.terms.get(&zero_exp).cloned().unwrap_or_else(|| fq.zero())),
    }
}

pub fn truncate(a: &SeriesRepr, prec: &Prec) -> SeriesRepr {
    let prec = a.prec.min(prec);
    let terms = a
        .terms
        .iter()
        .filter(|(e, _)| prec.admits(e))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    SeriesRepr { terms, prec }
}

/// p-th root coefficientwise: root of each coefficient at exponent e/p.
/// Rejected when the exponent group is not closed under division by p.
pub fn pth_root(model: &Arc<FieldModel>, a: &SeriesRepr) -> Result<SeriesRepr, FieldError> {
    let fq = model.residue_field();
    let p = fq.p as i64;
    let group = model.exponent_group();
    let mut terms = BTreeMap::new();
    for (e, c) in &a.terms {
        let re = e.div_int(p);
        if !group.accepts(&re.to_value()) {
            return Err(FieldError::ExponentGroupNotPDivisible);
        }
        terms.insert(re, fq.pth_root(c));
    }
    let prec = match &a.prec {
        Prec::Unbounded => Prec::Unbounded,
        // the bound itself need not lie in the exponent group
        Prec::Finite(b) => Prec::Finite(b.div_int(p)),
    };
    Ok(SeriesRepr { terms, prec })
}

fn render_rational(q: &num_rational::BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn render_exp_bound(e: &Exponent) -> String {
    if e.rank() == 1 {
        render_rational(&e.0[0])
    } else {
        format!(
            "({})",
            e.0.iter().map(render_rational).collect::<Vec<_>>().join(", ")
        )
    }
}

/// One monomial in the element grammar, coefficient prefix included only
/// when it is not 1 or the monomial is constant.
fn render_term(model: &Arc<FieldModel>, e: &Exponent, c: &FqElem) -> String {
    let one = model.residue_field().one();
    let mut factors: Vec<String> = Vec::new();
    let vars: &[&str] = if e.rank() == 1 { &["t"] } else { &["t", "u"] };
    // rank-2 display order is u before t to keep the dominant variable last
    let order: Vec<usize> = if e.rank() == 1 { vec![0] } else { vec![1, 0] };
    for i in order {
        let q = &e.0[i];
        if q.is_zero() {
            continue;
        }
        let var = vars[i];
        if q.is_one() {
            factors.push(var.to_string());
        } else if q.denom().is_one() {
            factors.push(format!("{}^{}", var, q.numer()));
        } else {
            factors.push(format!("{}^({})", var, render_rational(q)));
        }
    }
    if factors.is_empty() {
        return c.render();
    }
    let mono = factors.join("*");
    if *c == one {
        mono
    } else {
        format!("{}*{}", c.render(), mono)
    }
}

pub fn render(model: &Arc<FieldModel>, a: &SeriesRepr) -> String {
    let mut out = if a.terms.is_empty() {
        "0".to_string()
    } else {
        a.terms
            .iter()
            .map(|(e, c)| render_term(model, e, c))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    if let Prec::Finite(b) = &a.prec {
        out.push_str(&format!(" @prec {}", render_exp_bound(b)));
    }
    out
}
