//! Manipulation of 1-units modulo p-th powers: shifting the tail of a
//! 1-unit without leaving its p-th-power class, with verifiable witnesses.
//! These operations require p-th roots of unity in the model, which for the
//! plain p-adic model means p = 2; char-p series models are rejected, where
//! the conditions degenerate.

use std::cmp::Ordering;

use crate::ordval::{rat, rat_int, Value};

use super::hensel::{is_pth_power, PthPowerVerdict};
use super::{verify_pth_power, FieldElement, FieldError, FieldModel, Prec, Witness};

fn require_kummer_model(x: &FieldElement) -> Result<u64, FieldError> {
    match &*x.model {
        FieldModel::Padic { p: 2, .. } => Ok(2),
        FieldModel::Padic { p, .. } => Err(FieldError::UnsupportedModel(format!(
            "Q_{} does not contain the p-th roots of unity; only p = 2 is supported",
            p
        ))),
        _ => Err(FieldError::UnsupportedModel(
            "1-unit shifts degenerate in residue characteristic; use a characteristic-0 model"
                .into(),
        )),
    }
}

/// Lower bound on the value that the element is guaranteed to satisfy:
/// its value if visible, otherwise its precision bound (Infinity for the
/// exact zero).
fn value_floor(x: &FieldElement) -> Value {
    match x.value() {
        Ok(v) => v,
        Err(_) => match x.precision() {
            Prec::Unbounded => Value::Infinity,
            Prec::Finite(b) => b.to_value(),
        },
    }
}

fn floor_exceeds(x: &FieldElement, bound: &Value, strict: bool) -> Result<bool, FieldError> {
    let f = value_floor(x);
    let ord = crate::ordval::compare(&f, bound)?;
    Ok(match ord {
        Ordering::Greater => true,
        Ordering::Equal => !strict,
        Ordering::Less => false,
    })
}

fn one_plus(x: &FieldElement) -> Result<FieldElement, FieldError> {
    FieldElement::one(&x.model).add(x)
}

/// Certify the claim num = den * r^p by locating the root of num/den.
fn certify_quotient(
    num: &FieldElement,
    den: &FieldElement,
    p: u64,
) -> Result<Witness, FieldError> {
    let q = num.div(den)?;
    match is_pth_power(&q)? {
        PthPowerVerdict::Yes { root } => {
            if !verify_pth_power(num, den, &root, p)? {
                return Err(FieldError::Certification(
                    "root does not re-verify at the stated precision".into(),
                ));
            }
            Ok(Witness::PthPower { root })
        }
        PthPowerVerdict::No => Err(FieldError::Certification(
            "quotient is provably not a p-th power".into(),
        )),
        PthPowerVerdict::Inconclusive { reason } => {
            Err(FieldError::InsufficientPrecision(reason))
        }
    }
}

/// 1+b and 1+b+c lie in the same p-th-power class whenever
/// v(c) > (p/(p-1)) v(p). Returns the root r with 1+b = (1+b+c) r^p.
pub fn one_unit_shift_a(
    b: &FieldElement,
    c: &FieldElement,
) -> Result<Witness, FieldError> {
    let p = require_kummer_model(b)?;
    b.same_model(c)?;
    if !floor_exceeds(b, &Value::zero(1), true)? {
        return Err(FieldError::Precondition("v(b) > 0 required".into()));
    }
    // (p/(p-1)) v(p) = 2 for p = 2
    let bound = Value::rank1(rat(p as i64, p as i64 - 1));
    if !floor_exceeds(c, &bound, true)? {
        return Err(FieldError::Precondition(
            "v(c) > (p/(p-1)) v(p) required".into(),
        ));
    }
    if c.is_zero_at_prec() {
        return Ok(Witness::trivial(&b.model));
    }
    certify_quotient(&one_plus(b)?, &one_plus(&b.add(c)?)?, p)
}

/// When 1+c is itself a p-th power (witnessed) and v(bc) > (p/(p-1)) v(p),
/// 1+b and 1+b+c lie in the same class. The supplied witness is re-verified
/// before use.
pub fn one_unit_shift_b(
    b: &FieldElement,
    c: &FieldElement,
    one_plus_c_witness: &Witness,
) -> Result<Witness, FieldError> {
    let p = require_kummer_model(b)?;
    b.same_model(c)?;
    let root = match one_plus_c_witness {
        Witness::PthPower { root } => root,
        _ => {
            return Err(FieldError::Precondition(
                "expected a p-th-power witness for 1+c".into(),
            ))
        }
    };
    if !verify_pth_power(&one_plus(c)?, &FieldElement::one(&b.model), root, p)? {
        return Err(FieldError::Certification(
            "supplied witness for 1+c does not re-verify".into(),
        ));
    }
    let bound = Value::rank1(rat(p as i64, p as i64 - 1));
    if !floor_exceeds(&b.mul(c)?, &bound, true)? {
        return Err(FieldError::Precondition(
            "v(bc) > (p/(p-1)) v(p) required".into(),
        ));
    }
    if c.is_zero_at_prec() {
        return Ok(Witness::trivial(&b.model));
    }
    certify_quotient(&one_plus(b)?, &one_plus(&b.add(c)?)?, p)
}

/// The subtraction-to-power shift: if v(b) >= v(p)/(p-1) and v(c^p) > v(p),
/// then 1+b-pc and 1+b+c^p lie in the same class.
pub fn one_unit_shift_c(
    b: &FieldElement,
    c: &FieldElement,
) -> Result<Witness, FieldError> {
    let p = require_kummer_model(b)?;
    b.same_model(c)?;
    // v(p)/(p-1) = 1 for p = 2
    let bound = Value::rank1(rat(1, p as i64 - 1));
    if !floor_exceeds(b, &bound, false)? {
        return Err(FieldError::Precondition(
            "v(b) >= v(p)/(p-1) required".into(),
        ));
    }
    let cp = c.pow(p)?;
    if !floor_exceeds(&cp, &Value::rank1(rat_int(1)), true)? {
        return Err(FieldError::Precondition("v(c^p) > v(p) required".into()));
    }
    if c.is_zero_at_prec() {
        return Ok(Witness::trivial(&b.model));
    }
    let pc = c.mul(&FieldElement::from_int(&b.model, p as i64))?;
    let num = one_plus(&b.sub(&pc)?)?;
    let den = one_plus(&b.add(&cp)?)?;
    certify_quotient(&num, &den, p)
}

/// Rewrite the perturbation d of a 1-unit into Delta^{-1}(d) = (-d/p)^p
/// without changing the p-th-power class; legal only when
/// delta^{-1}(v(d)) > v(p). Returns (Delta^{-1}(d), witness) with
/// 1 + b + d = (1 + b + Delta^{-1}(d)) r^p.
pub fn rewrite_delta_inverse(
    b: &FieldElement,
    d: &FieldElement,
) -> Result<(FieldElement, Witness), FieldError> {
    let p = require_kummer_model(b)?;
    b.same_model(d)?;
    let bound = Value::rank1(rat(1, p as i64 - 1));
    if !floor_exceeds(b, &bound, false)? {
        return Err(FieldError::Precondition(
            "v(b) >= v(p)/(p-1) required".into(),
        ));
    }
    if d.is_zero_at_prec() {
        return Ok((
            FieldElement::zero_at(&b.model, d.precision()),
            Witness::trivial(&b.model),
        ));
    }
    // delta^{-1}(v(d)) = p (v(d) - v(p)) must exceed v(p), i.e.
    // v(d) > (p+1)/p * v(p)
    let legal = Value::rank1(rat(p as i64 + 1, p as i64));
    if !floor_exceeds(d, &legal, true)? {
        return Err(FieldError::Precondition(
            "delta^{-1}(v(d)) > v(p) fails: the rewriting is not value-legal".into(),
        ));
    }
    let pinv = FieldElement::from_int(&b.model, p as i64).inv()?;
    let c = d.neg().mul(&pinv)?;
    let cp = c.pow(p)?;
    // 1+b+d = 1+b-pc, so the part-(c) witness certifies exactly this claim
    let w = one_unit_shift_c(b, &c)?;
    Ok((cp, w))
}
