//! Plain p-adic numbers at absolute precision N: an element is
//! m * p^shift + O(p^N) with 0 <= m < p^(N - shift). The canonical form
//! pulls the full power of p into the shift, so shift = v(element)
//! whenever the element is distinguishable from 0.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::fq::FqElem;
use crate::ordval::Value;

use super::{Exponent, FieldError, FieldModel, Prec};

/// Default absolute precision for elements constructed from integers.
pub const DEFAULT_PREC: i64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PadicRepr {
    pub p: u64,
    /// Unit part (p does not divide mantissa) or zero.
    pub mantissa: BigInt,
    /// Valuation when mantissa != 0.
    pub shift: i64,
    /// Absolute precision: the element is known modulo p^prec.
    pub prec: i64,
}

fn pow_p(p: u64, e: i64) -> BigInt {
    assert!(e >= 0, "negative power of p in mantissa arithmetic");
    BigInt::from(p).pow(e as u32)
}

impl PadicRepr {
    /// Canonicalize m * p^shift + O(p^prec).
    pub fn new(p: u64, mut m: BigInt, mut shift: i64, prec: i64) -> PadicRepr {
        assert!(shift <= prec, "shift beyond precision");
        let modulus = pow_p(p, prec - shift);
        m = m.mod_floor(&modulus);
        if m.is_zero() {
            return PadicRepr { p, mantissa: BigInt::zero(), shift: prec, prec };
        }
        let bp = BigInt::from(p);
        while (&m % &bp).is_zero() {
            m /= &bp;
            shift += 1;
        }
        PadicRepr { p, mantissa: m, shift, prec }
    }

    pub fn zero_at(prec: i64) -> PadicRepr {
        // p is irrelevant for a bare zero; filled on first combination
        PadicRepr { p: 0, mantissa: BigInt::zero(), shift: prec, prec }
    }

    /// The element as an exact rational m * p^shift (numerator, p-power
    /// denominator exponent).
    pub fn to_scaled_int(&self) -> (BigInt, i64) {
        if self.shift >= 0 {
            (&self.mantissa * pow_p(self.p.max(2), self.shift), 0)
        } else {
            (self.mantissa.clone(), -self.shift)
        }
    }
}

fn unify_p(a: &PadicRepr, b: &PadicRepr) -> u64 {
    if a.p != 0 {
        a.p
    } else {
        b.p
    }
}

pub fn add(a: &PadicRepr, b: &PadicRepr) -> PadicRepr {
    let p = unify_p(a, b);
    let prec = a.prec.min(b.prec);
    let shift = a.shift.min(b.shift).min(prec);
    let ma = if a.mantissa.is_zero() {
        BigInt::zero()
    } else {
        &a.mantissa * pow_p(p, a.shift - shift)
    };
    let mb = if b.mantissa.is_zero() {
        BigInt::zero()
    } else {
        &b.mantissa * pow_p(p, b.shift - shift)
    };
    PadicRepr::new(p, ma + mb, shift, prec)
}

pub fn neg(a: &PadicRepr) -> PadicRepr {
    if a.mantissa.is_zero() {
        return a.clone();
    }
    PadicRepr::new(a.p, -&a.mantissa, a.shift, a.prec)
}

pub fn mul(a: &PadicRepr, b: &PadicRepr) -> PadicRepr {
    let p = unify_p(a, b);
    // pessimistic bound min(va + Pb, vb + Pa); shift doubles as the value
    // floor when the mantissa vanishes
    let prec = (a.shift + b.prec).min(b.shift + a.prec);
    if a.mantissa.is_zero() || b.mantissa.is_zero() {
        return PadicRepr::zero_at(prec);
    }
    PadicRepr::new(p, &a.mantissa * &b.mantissa, a.shift + b.shift, prec)
}

pub fn inv(a: &PadicRepr) -> Result<PadicRepr, FieldError> {
    if a.mantissa.is_zero() {
        return Err(FieldError::InvertZero);
    }
    let rel = a.prec - a.shift;
    let modulus = pow_p(a.p, rel);
    let inv = mod_inverse(&a.mantissa, &modulus).expect("unit mantissa");
    // 1/(m p^v + O(p^P)) = m^-1 p^-v + O(p^(P - 2v))
    Ok(PadicRepr::new(a.p, inv, -a.shift, a.prec - 2 * a.shift))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

pub fn value(a: &PadicRepr) -> Result<Value, FieldError> {
    if a.mantissa.is_zero() {
        return Err(FieldError::InsufficientPrecision(format!(
            "element vanishes below precision p^{}",
            a.prec
        )));
    }
    Ok(Value::rank1(num_rational::BigRational::from(BigInt::from(a.shift))))
}

pub fn residue(model: &std::sync::Arc<FieldModel>, a: &PadicRepr) -> Result<FqElem, FieldError> {
    let fq = model.residue_field();
    if a.shift < 0 && !a.mantissa.is_zero() {
        return Err(FieldError::NegativeValue);
    }
    if a.prec < 1 {
        return Err(FieldError::InsufficientPrecision(
            "residue not determined at this precision".into(),
        ));
    }
    if a.mantissa.is_zero() || a.shift > 0 {
        return Ok(fq.zero());
    }
    let r = a.mantissa.mod_floor(&BigInt::from(fq.p));
    Ok(fq.from_u64(u64::try_from(r).expect("reduced residue")))
}

pub fn truncate(a: &PadicRepr, prec: i64) -> PadicRepr {
    let prec = a.prec.min(prec);
    if a.mantissa.is_zero() || a.shift >= prec {
        return PadicRepr::zero_at(prec);
    }
    PadicRepr::new(a.p, a.mantissa.clone(), a.shift, prec)
}

/// Convert a rank-1 precision bound to an integer p-adic exponent (rounded
/// up, since all p-adic values are integers).
pub fn prec_from(prec: &Prec) -> i64 {
    match prec {
        Prec::Unbounded => DEFAULT_PREC,
        Prec::Finite(Exponent(coords)) => {
            let q = &coords[0];
            let c = q.ceil();
            i64::try_from(c.to_integer()).expect("precision exponent fits i64")
        }
    }
}

pub fn render(a: &PadicRepr) -> String {
    let body = if a.mantissa.is_zero() {
        "0".to_string()
    } else if a.shift >= 0 {
        (&a.mantissa * pow_p(a.p, a.shift)).to_string()
    } else {
        format!("{}/{}^{}", a.mantissa, a.p, -a.shift)
    };
    format!("{} @prec {}^{}", body, if a.p == 0 { 2 } else { a.p }, a.prec)
}
