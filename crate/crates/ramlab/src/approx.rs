//! Approximation types: pseudo-Cauchy streams of approximants (c_nu,
//! gamma_nu) to a transcendental element x, generated by truncating an
//! ambient realization, with value-stabilization detection and center
//! selection under linear value constraints.
//!
//! Stabilization is *detected*, not proved: S consecutive confirmations
//! (default 3) are required, and downstream consumers re-verify every
//! claim with exact witnesses, so a wrong detection can only surface as a
//! verification failure.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fieldcore::{
    Exponent, FieldElement, FieldError, FieldModel, Prec, Repr,
};
use crate::ordval::{compare, OrdvalError, Value};
use crate::poly::Poly;

pub const DEFAULT_CONFIRMATIONS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("approximants exhausted before the requirement was met")]
    Exhausted,
    #[error("no ambient realization: the stream cannot be extended")]
    AmbientMissing,
    #[error("ambient precision exhausted: no further approximants available")]
    AmbientExhausted,
    #[error("stream invariant violated: {0}")]
    Invariant(String),
    #[error("contradictory constraints: {0}")]
    Contradictory(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ordval(#[from] OrdvalError),
}

/// A finite prefix of the family v(x - K), together with an optional
/// ambient element whose truncations generate further approximants.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationType {
    pub model: Arc<FieldModel>,
    /// (c_nu, gamma_nu) with gamma_nu = v(x - c_nu), strictly increasing.
    pub approximants: Vec<(FieldElement, Value)>,
    pub ambient: Option<FieldElement>,
}

/// Detected stabilization of v(h(c_nu)) along a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationCertificate {
    pub h: Poly,
    /// gamma of the first approximant from which the value is constant.
    pub alpha0: Value,
    pub stable_value: Value,
    /// 1-based index of the last approximant checked.
    pub checked_through: usize,
}

impl ApproximationType {
    pub fn new(
        model: Arc<FieldModel>,
        approximants: Vec<(FieldElement, Value)>,
        ambient: Option<FieldElement>,
    ) -> Result<ApproximationType, ApproxError> {
        let at = ApproximationType { model, approximants, ambient };
        at.check_invariants()?;
        Ok(at)
    }

    pub fn from_ambient(ambient: FieldElement) -> ApproximationType {
        ApproximationType {
            model: ambient.model.clone(),
            approximants: Vec::new(),
            ambient: Some(ambient),
        }
    }

    pub fn len(&self) -> usize {
        self.approximants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.approximants.is_empty()
    }

    fn check_invariants(&self) -> Result<(), ApproxError> {
        for w in self.approximants.windows(2) {
            if compare(&w[0].1, &w[1].1)? != Ordering::Less {
                return Err(ApproxError::Invariant(
                    "approximant values must be strictly increasing".into(),
                ));
            }
        }
        if let Some(xi) = &self.ambient {
            for (c, g) in &self.approximants {
                let d = xi.sub(c)?;
                match d.value() {
                    Ok(v) => {
                        if compare(&v, g)? != Ordering::Equal {
                            return Err(ApproxError::Invariant(
                                "gamma_nu != v(xi - c_nu)".into(),
                            ));
                        }
                    }
                    Err(FieldError::InsufficientPrecision(_)) => {
                        return Err(ApproxError::Invariant(
                            "ambient precision cannot confirm gamma_nu".into(),
                        ))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        // immediacy on the available prefix: once gamma exceeds v(c), both
        // v(c) and the residue are pinned by the ultrametric law
        for w in self.approximants.windows(2) {
            let (c0, g0) = &w[0];
            let (c1, _) = &w[1];
            if let Ok(v0) = c0.value() {
                if compare(g0, &v0)? == Ordering::Greater {
                    let v1 = c1.value().map_err(ApproxError::Field)?;
                    if compare(&v0, &v1)? != Ordering::Equal {
                        return Err(ApproxError::Invariant(
                            "v(c_nu) failed to remain constant".into(),
                        ));
                    }
                }
                if v0.is_zero() && compare(g0, &Value::zero(self.model.rank()))? == Ordering::Greater
                {
                    if c0.residue()? != c1.residue()? {
                        return Err(ApproxError::Invariant(
                            "residue(c_nu) failed to remain constant".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nonzero "digit" positions of the ambient element, in increasing order,
/// with the partial sums as truncations.
fn support_truncations(
    xi: &FieldElement,
    upto: usize,
) -> Result<Vec<FieldElement>, ApproxError> {
    match &xi.repr {
        Repr::Series(s) => {
            let mut out = Vec::new();
            let mut acc = FieldElement::zero(&xi.model);
            for (e, c) in s.terms.iter().take(upto) {
                acc = acc.add(&FieldElement::monomial(&xi.model, c, e.clone()))?;
                out.push(acc.clone());
            }
            Ok(out)
        }
        Repr::Padic(pa) => {
            let p = pa.p.max(2);
            let bp = BigInt::from(p);
            let mut out = Vec::new();
            let mut digits = pa.mantissa.clone();
            let mut rel: i64 = 0;
            let mut acc = BigInt::zero();
            while !digits.is_zero() && out.len() < upto && pa.shift + rel < pa.prec {
                let d = num_integer::Integer::mod_floor(&digits, &bp);
                if !d.is_zero() {
                    acc += &d * bp.pow(rel as u32);
                    let c = crate::fieldcore::PadicRepr::new(p, acc.clone(), pa.shift, pa.prec);
                    out.push(FieldElement {
                        model: xi.model.clone(),
                        repr: Repr::Padic(c),
                    });
                }
                digits = (digits - d) / &bp;
                rel += 1;
            }
            Ok(out)
        }
    }
}

/// Append `count` further truncations of the ambient element.
pub fn extend(at: &ApproximationType, count: usize) -> Result<ApproximationType, ApproxError> {
    if count == 0 {
        return Ok(at.clone());
    }
    let xi = at.ambient.as_ref().ok_or(ApproxError::AmbientMissing)?;
    let have = at.approximants.len();
    let truncs = support_truncations(xi, have + count)?;
    if truncs.len() < have + count {
        return Err(ApproxError::AmbientExhausted);
    }
    let mut approximants = at.approximants.clone();
    for c in truncs.into_iter().skip(have) {
        let gamma = match xi.sub(&c)?.value() {
            Ok(v) => v,
            Err(FieldError::InsufficientPrecision(_)) => {
                return Err(ApproxError::AmbientExhausted)
            }
            Err(e) => return Err(e.into()),
        };
        approximants.push((c, gamma));
    }
    ApproximationType::new(at.model.clone(), approximants, at.ambient.clone())
}

/// The default test stream: xi = sum_{i=0..terms} t^(1 - p^{-i}) in the
/// perfect-hull model, with precision bound 1 (the limit of the support).
pub fn default_xi(model: &Arc<FieldModel>, terms: usize) -> FieldElement {
    let p = model.residue_char();
    let fq = model.residue_field();
    let mut acc = FieldElement::zero(model);
    for i in 0..terms {
        let e = BigRational::one()
            - BigRational::new(BigInt::one(), BigInt::from(p).pow(i as u32));
        acc = acc
            .add(&FieldElement::monomial(model, &fq.one(), Exponent::rank1(e)))
            .expect("same model");
    }
    acc.truncate(&Prec::Finite(Exponent::rank1(BigRational::one())))
}

/// Detect stabilization of v(h(c_nu)): the least available gamma_nu from
/// which the value is constant, confirmed on at least `s` further
/// approximants; extends the stream on demand.
pub fn stabilize(
    at: &mut ApproximationType,
    h: &Poly,
    s: usize,
) -> Result<StabilizationCertificate, ApproxError> {
    if at.len() < 2 {
        let need = 2 - at.len();
        match extend(at, need) {
            Ok(next) => *at = next,
            Err(ApproxError::AmbientMissing | ApproxError::AmbientExhausted) => {
                return Err(ApproxError::Exhausted)
            }
            Err(e) => return Err(e),
        }
    }
    loop {
        let mut vals = Vec::with_capacity(at.len());
        for (c, _) in &at.approximants {
            vals.push(h.eval(c)?.value()?);
        }
        // least start index from which all available values agree
        let mut start = vals.len();
        for i in (0..vals.len()).rev() {
            if compare(&vals[i], vals.last().unwrap())? == Ordering::Equal {
                start = i;
            } else {
                break;
            }
        }
        if start < vals.len() && vals.len() - start >= s + 1 {
            return Ok(StabilizationCertificate {
                h: h.clone(),
                alpha0: at.approximants[start].1.clone(),
                stable_value: vals[start].clone(),
                checked_through: vals.len(),
            });
        }
        match extend(at, 1) {
            Ok(next) => *at = next,
            Err(ApproxError::AmbientMissing | ApproxError::AmbientExhausted) => {
                return Err(ApproxError::Exhausted)
            }
            Err(e) => return Err(e),
        }
    }
}

/// A linear requirement on the candidate value gamma = v(x - c).
#[derive(Debug, Clone, PartialEq)]
pub enum CenterConstraint {
    /// offset + slope * gamma != 0.
    NonZero { slope: BigRational, offset: Value },
    /// gamma > threshold (or >= when strict is false).
    Above { threshold: Value, strict: bool },
}

impl CenterConstraint {
    /// Distinctness of beta_i + i*gamma and beta_j + j*gamma as a NonZero
    /// constraint on their difference.
    pub fn distinct(
        beta_i: &Value,
        i: i64,
        beta_j: &Value,
        j: i64,
    ) -> Result<CenterConstraint, OrdvalError> {
        Ok(CenterConstraint::NonZero {
            slope: BigRational::from(BigInt::from(i - j)),
            offset: beta_i.add(&beta_j.neg()?)?,
        })
    }

    fn satisfied(&self, gamma: &Value) -> Result<bool, ApproxError> {
        match self {
            CenterConstraint::NonZero { slope, offset } => {
                let lhs = offset.add(&gamma.scale(slope)?)?;
                Ok(!lhs.is_zero())
            }
            CenterConstraint::Above { threshold, strict } => {
                let ord = compare(gamma, threshold)?;
                Ok(match ord {
                    Ordering::Greater => true,
                    Ordering::Equal => !strict,
                    Ordering::Less => false,
                })
            }
        }
    }

    /// Unsatisfiable for every gamma?
    fn contradictory(&self) -> bool {
        match self {
            CenterConstraint::NonZero { slope, offset } => {
                slope.is_zero() && offset.is_zero()
            }
            CenterConstraint::Above { threshold, strict } => {
                matches!(threshold, Value::Infinity) && *strict
            }
        }
    }
}

/// First available approximant whose gamma satisfies every constraint.
pub fn choose_center(
    at: &ApproximationType,
    constraints: &[CenterConstraint],
) -> Result<(FieldElement, Value), ApproxError> {
    for c in constraints {
        if c.contradictory() {
            return Err(ApproxError::Contradictory(
                "a constraint is violated by every candidate value".into(),
            ));
        }
    }
    'outer: for (c, gamma) in &at.approximants {
        for k in constraints {
            if !k.satisfied(gamma)? {
                continue 'outer;
            }
        }
        return Ok((c.clone(), gamma.clone()));
    }
    Err(ApproxError::Exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordval::{rat, rat_int};

    fn hull_stream(terms: usize) -> ApproximationType {
        let m = FieldModel::perfect_hull(2, 1);
        ApproximationType::from_ambient(default_xi(&m, terms))
    }

    #[test]
    fn extend_default_stream() {
        let at = extend(&hull_stream(4), 3).unwrap();
        let gammas: Vec<_> = at.approximants.iter().map(|(_, g)| g.clone()).collect();
        assert_eq!(
            gammas,
            vec![
                Value::rank1(rat(1, 2)),
                Value::rank1(rat(3, 4)),
                Value::rank1(rat(7, 8)),
            ]
        );
        assert_eq!(at.approximants[0].0.render(), "1");
        assert_eq!(at.approximants[1].0.render(), "1 + t^(1/2)");
        // extend by 0 is the identity
        assert_eq!(extend(&at, 0).unwrap(), at);
        // the final truncation equals the ambient at its precision, so no
        // further distance can be certified
        assert_eq!(extend(&at, 1), Err(ApproxError::AmbientExhausted));
    }

    #[test]
    fn ultrametric_consistency() {
        let at = extend(&hull_stream(5), 4).unwrap();
        for mu in 0..at.len() {
            for nu in (mu + 1)..at.len() {
                let d = at.approximants[nu].0.sub(&at.approximants[mu].0).unwrap();
                assert_eq!(d.value().unwrap(), at.approximants[mu].1);
            }
        }
    }

    #[test]
    fn stabilize_difference_with_second_approximant() {
        let mut at = extend(&hull_stream(8), 3).unwrap();
        let c2 = at.approximants[1].0.clone();
        let m = at.model.clone();
        // h = X - c_2: values gamma_min(nu,2), infinite at nu = 2, then 3/4
        let h = Poly::new(m, vec![c2.neg(), FieldElement::one(&at.model)]);
        let cert = stabilize(&mut at, &h, DEFAULT_CONFIRMATIONS).unwrap();
        assert_eq!(cert.stable_value, Value::rank1(rat(3, 4)));
        assert_eq!(cert.alpha0, Value::rank1(rat(7, 8)));
    }

    #[test]
    fn stabilize_identity_and_constant() {
        let mut at = extend(&hull_stream(8), 2).unwrap();
        let m = at.model.clone();
        let h = Poly::x(&m);
        let cert = stabilize(&mut at, &h, DEFAULT_CONFIRMATIONS).unwrap();
        assert_eq!(cert.stable_value, Value::zero(1));
        assert_eq!(cert.alpha0, Value::rank1(rat(1, 2)));
        let fq = m.residue_field();
        let a = FieldElement::monomial(&m, &fq.one(), Exponent::rank1(rat(-3, 2)));
        let hc = Poly::constant(a);
        let cert = stabilize(&mut at, &hc, DEFAULT_CONFIRMATIONS).unwrap();
        assert_eq!(cert.stable_value, Value::rank1(rat(-3, 2)));
    }

    #[test]
    fn choose_center_constraints() {
        let at = extend(&hull_stream(4), 3).unwrap();
        // beta_1 + gamma != 0 with beta_1 = -3/2: excludes gamma = 3/2 only
        let k = CenterConstraint::NonZero {
            slope: rat_int(1),
            offset: Value::rank1(rat(-3, 2)),
        };
        let (_, gamma) = choose_center(&at, &[k]).unwrap();
        assert_eq!(gamma, Value::rank1(rat(1, 2)));
        // empty constraints: first approximant
        let (_, gamma) = choose_center(&at, &[]).unwrap();
        assert_eq!(gamma, Value::rank1(rat(1, 2)));
        // gamma > 7/8 is not met on the 3-approximant prefix
        let k = CenterConstraint::Above {
            threshold: Value::rank1(rat(7, 8)),
            strict: true,
        };
        assert_eq!(choose_center(&at, &[k]), Err(ApproxError::Exhausted));
        // identically-zero nonzero-requirement is contradictory
        let k = CenterConstraint::NonZero { slope: rat_int(0), offset: Value::zero(1) };
        assert!(matches!(
            choose_center(&at, &[k]),
            Err(ApproxError::Contradictory(_))
        ));
    }

    #[test]
    fn padic_ambient_stream() {
        let m = FieldModel::padic(2);
        let xi = FieldElement::padic_from_bigint(&m, BigInt::from(1 + 4 + 32), 8);
        let at = extend(&ApproximationType::from_ambient(xi), 2).unwrap();
        let gammas: Vec<_> = at.approximants.iter().map(|(_, g)| g.clone()).collect();
        assert_eq!(gammas, vec![Value::rank1_int(2), Value::rank1_int(5)]);
        assert_eq!(at.approximants[1].0.render(), "5 @prec 2^8");
    }
}
