//! Hensel lifting of simple residue roots, p-th roots in each model, and
//! the decidable-at-precision p-th-power test with verifiable roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ordval::Value;
use crate::poly::Poly;

use super::padic::{self, PadicRepr};
use super::{series, FieldElement, FieldError, FieldModel, Prec, Repr};

/// Lift a simple residue root of an integral polynomial to a root modulo
/// the target precision by Newton iteration.
pub fn hensel_lift(
    f: &Poly,
    r0: &crate::fq::FqElem,
    target: &Value,
) -> Result<FieldElement, FieldError> {
    let model = &f.model;
    let rp = f.residue_poly()?;
    if !rp.fq.is_zero(&rp.eval(r0)) {
        return Err(FieldError::Precondition(
            "given residue value is not a root of the residue polynomial".into(),
        ));
    }
    if rp.fq.is_zero(&rp.derivative().eval(r0)) {
        return Err(FieldError::MultipleResidueRoot);
    }
    let target_exp = super::Exponent::from_value(target)?;
    let target_prec = Prec::Finite(target_exp);
    let fprime = f.derivative()?;
    let mut x = FieldElement::from_residue_const(model, r0).truncate(&target_prec);
    for _ in 0..256 {
        let fx = f.eval(&x)?;
        match fx.value() {
            Ok(Value::Infinity) => return Ok(x.truncate(&target_prec)),
            Ok(v) => {
                if crate::ordval::compare(&v, target)? != std::cmp::Ordering::Less {
                    return Ok(x.truncate(&target_prec));
                }
                let step = fx.div(&fprime.eval(&x)?)?;
                x = x.sub(&step)?.truncate(&target_prec);
            }
            Err(FieldError::InsufficientPrecision(_)) => {
                // f(x) vanishes at the available precision; certified only
                // if that precision already covers the target
                if prec_covers(&fx.precision(), target) {
                    return Ok(x.truncate(&target_prec));
                }
                return Err(FieldError::InsufficientPrecision(
                    "input precision does not reach the requested root precision".into(),
                ));
            }
            Err(e) => return Err(e),
        }
    }
    Err(FieldError::Certification(
        "Newton iteration failed to converge".into(),
    ))
}

fn prec_covers(prec: &Prec, target: &Value) -> bool {
    match prec {
        Prec::Unbounded => true,
        Prec::Finite(b) => match target {
            Value::Infinity => false,
            Value::Finite(_) => {
                let bv = b.to_value();
                matches!(
                    crate::ordval::compare(&bv, target),
                    Ok(std::cmp::Ordering::Greater) | Ok(std::cmp::Ordering::Equal)
                )
            }
        },
    }
}

/// p-th root inside the model. Char-p series take coefficientwise Frobenius
/// inverses with exponents divided by p; p-adic elements go through the
/// unit-part criterion and a Newton lift.
pub fn pth_root(a: &FieldElement) -> Result<FieldElement, FieldError> {
    match &a.repr {
        Repr::Series(s) => {
            let repr = series::pth_root(&a.model, s)?;
            Ok(FieldElement { model: a.model.clone(), repr: Repr::Series(repr) })
        }
        Repr::Padic(pa) => padic_pth_root(a, pa),
    }
}

fn padic_pth_root(a: &FieldElement, pa: &PadicRepr) -> Result<FieldElement, FieldError> {
    let p = match &*a.model {
        FieldModel::Padic { p, .. } => *p,
        _ => unreachable!(),
    };
    if pa.mantissa.is_zero() {
        return Err(FieldError::InsufficientPrecision(
            "cannot extract a root of an element indistinguishable from 0".into(),
        ));
    }
    if pa.shift.rem_euclid(p as i64) != 0 {
        return Err(FieldError::NotAPthPower);
    }
    let rel = pa.prec - pa.shift;
    // the unit class modulo p^(2 v(p) + 1) = p^3 decides p-th powers
    if rel < 3 {
        return Err(FieldError::InsufficientPrecision(
            "need at least 3 digits of the unit part to decide p-th powers".into(),
        ));
    }
    let u = pa.mantissa.mod_floor(&BigInt::from(p).pow(rel as u32));
    let w0 = match unit_root_seed(p, &u) {
        Some(w) => w,
        None => return Err(FieldError::NotAPthPower),
    };
    let root_unit = newton_root_mod(p, &u, &w0, rel);
    // a unit known mod p^R pins its p-th root down mod p^(R-1)
    let root_shift = pa.shift / p as i64;
    let repr = PadicRepr::new(p, root_unit, root_shift, root_shift + rel - 1);
    Ok(FieldElement { model: a.model.clone(), repr: Repr::Padic(repr) })
}

/// Smallest unit w mod p^3 with w^p = u mod p^3, if any. Existence of such
/// a w certifies (by the Newton bound v(f(w)) > 2 v(f'(w))) that the unit
/// u is a p-th power.
fn unit_root_seed(p: u64, u: &BigInt) -> Option<BigInt> {
    let m = BigInt::from(p).pow(3);
    let um = u.mod_floor(&m);
    let mut w = BigInt::one();
    while w < m {
        if !(&w % p).is_zero() && w.modpow(&BigInt::from(p), &m) == um {
            return Some(w);
        }
        w += 1;
    }
    None
}

/// Newton iteration for X^p = u over the integers mod p^rel, starting from
/// a seed that satisfies the quadratic-convergence bound.
fn newton_root_mod(p: u64, u: &BigInt, w0: &BigInt, rel: i64) -> BigInt {
    let bp = BigInt::from(p);
    let modulus = bp.pow(rel as u32);
    let work = bp.pow((rel - 1) as u32);
    let mut x = w0.mod_floor(&work);
    for _ in 0..256 {
        let fx = (x.modpow(&bp, &modulus) - u).mod_floor(&modulus);
        if fx.is_zero() {
            break;
        }
        // x - f(x) / (p x^(p-1)), computed mod p^(rel-1)
        let t = &fx / &bp;
        let d = x.modpow(&BigInt::from(p - 1), &work);
        let dinv = padic::mod_inverse(&d, &work).expect("unit");
        x = (x - t * dinv).mod_floor(&work);
    }
    x
}

/// Three-valued p-th-power verdict; `Yes` carries a root usable as a
/// verifiable witness.
#[derive(Debug, Clone, PartialEq)]
pub enum PthPowerVerdict {
    Yes { root: FieldElement },
    No,
    Inconclusive { reason: String },
}

/// Decide whether `a` lies in (K^x)^p, at the available precision.
pub fn is_pth_power(a: &FieldElement) -> Result<PthPowerVerdict, FieldError> {
    let p = a.model.residue_char();
    match &a.repr {
        Repr::Series(s) => {
            if s.terms.is_empty() {
                return Ok(PthPowerVerdict::Inconclusive {
                    reason: "element is indistinguishable from 0 at precision".into(),
                });
            }
            let group = a.model.exponent_group();
            if group.is_p_divisible(p as u32) {
                // perfect-hull model: every nonzero element is a p-th power
                return Ok(PthPowerVerdict::Yes { root: pth_root(a)? });
            }
            let pb = BigInt::from(p);
            for e in s.terms.keys() {
                let divisible = e.0.iter().all(|q| {
                    q.denom().is_one() && (q.numer() % &pb).is_zero()
                });
                if !divisible {
                    return Ok(PthPowerVerdict::No);
                }
            }
            match &s.prec {
                Prec::Unbounded => Ok(PthPowerVerdict::Yes { root: pth_root(a)? }),
                Prec::Finite(_) => Ok(PthPowerVerdict::Inconclusive {
                    reason: "all known exponents are divisible by p but the tail is undetermined"
                        .into(),
                }),
            }
        }
        Repr::Padic(pa) => {
            if pa.mantissa.is_zero() {
                return Ok(PthPowerVerdict::Inconclusive {
                    reason: "element is indistinguishable from 0 at precision".into(),
                });
            }
            if pa.shift.rem_euclid(p as i64) != 0 {
                return Ok(PthPowerVerdict::No);
            }
            let rel = pa.prec - pa.shift;
            if rel < 3 {
                return Ok(PthPowerVerdict::Inconclusive {
                    reason: "unit part known to fewer than 3 digits".into(),
                });
            }
            let u = pa.mantissa.mod_floor(&BigInt::from(p).pow(rel as u32));
            match unit_root_seed(p, &u) {
                Some(_) => Ok(PthPowerVerdict::Yes { root: pth_root(a)? }),
                None => Ok(PthPowerVerdict::No),
            }
        }
    }
}
