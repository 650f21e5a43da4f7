//! Concrete valued-field models with exact finite-precision arithmetic:
//! Laurent/Puiseux series over F_q (including the perfect-hull model with
//! p-divisible exponents), plain p-adics, and iterated rank-2 series.
//! Precision is tracked pessimistically per element; any question the
//! current precision cannot answer is an `InsufficientPrecision` error,
//! never a guess.

pub mod series;
pub mod padic;
pub mod hensel;
pub mod oneunit;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::fq::{Fq, FqElem, FqError};
use crate::ordval::{Divisibility, GroupDescriptor, OrdvalError, Value};

pub use hensel::{hensel_lift, is_pth_power, pth_root, PthPowerVerdict};
pub use oneunit::{
    one_unit_shift_a, one_unit_shift_b, one_unit_shift_c, rewrite_delta_inverse,
};
pub use padic::PadicRepr;
pub use series::SeriesRepr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("elements belong to different field models")]
    ModelMismatch,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("cannot invert an element indistinguishable from 0 at precision")]
    InvertZero,
    #[error("an exact inverse of a multi-term series is not finitely representable; supply a target precision")]
    ExactInverseNotRepresentable,
    #[error("residue undefined: element has negative value")]
    NegativeValue,
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("exponent group is not closed under division by p")]
    ExponentGroupNotPDivisible,
    #[error("polynomial has non-integral coefficients")]
    NonIntegralCoefficients,
    #[error("residue root is not simple")]
    MultipleResidueRoot,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("certification failed at precision: {0}")]
    Certification(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error(transparent)]
    Ordval(#[from] OrdvalError),
    #[error(transparent)]
    Fq(#[from] FqError),
}

/// Exponent of a series term: 1 or 2 exact rational coordinates,
/// ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(pub Vec<BigRational>);

impl Exponent {
    pub fn rank1(q: BigRational) -> Exponent {
        Exponent(vec![q])
    }

    pub fn zero(rank: usize) -> Exponent {
        Exponent(vec![BigRational::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Exponent {
        Exponent(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale_int(&self, n: i64) -> Exponent {
        let q = BigRational::from(BigInt::from(n));
        Exponent(self.0.iter().map(|a| a * &q).collect())
    }

    pub fn div_int(&self, n: i64) -> Exponent {
        let q = BigRational::from(BigInt::from(n));
        Exponent(self.0.iter().map(|a| a / &q).collect())
    }

    pub fn to_value(&self) -> Value {
        Value::Finite(self.0.clone())
    }

    pub fn from_value(v: &Value) -> Result<Exponent, FieldError> {
        match v {
            Value::Finite(c) => Ok(Exponent(c.clone())),
            Value::Infinity => Err(FieldError::Precondition("finite value required".into())),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|q| q.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|q| !q.is_zero()).is_some_and(|q| q.is_positive())
    }

    pub fn is_negative(&self) -> bool {
        self.0.iter().find(|q| !q.is_zero()).is_some_and(|q| q.is_negative())
    }
}

/// Absolute precision bound: all terms of exponent >= the bound are unknown.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Prec {
    Finite(Exponent),
    /// Exact element: every term is known.
    Unbounded,
}

impl Prec {
    pub fn min(&self, other: &Prec) -> Prec {
        match (self, other) {
            (Prec::Unbounded, o) => o.clone(),
            (s, Prec::Unbounded) => s.clone(),
            (Prec::Finite(a), Prec::Finite(b)) => {
                Prec::Finite(if a <= b { a.clone() } else { b.clone() })
            }
        }
    }

    /// Does the bound admit a term at exponent e (e < bound)?
    pub fn admits(&self, e: &Exponent) -> bool {
        match self {
            Prec::Unbounded => true,
            Prec::Finite(b) => e < b,
        }
    }

    pub fn shift(&self, by: &Exponent) -> Prec {
        match self {
            Prec::Unbounded => Prec::Unbounded,
            Prec::Finite(b) => Prec::Finite(b.add(by)),
        }
    }
}

/// Descriptor of a concrete valued field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldModel {
    /// F_q((t^Gamma)) with Gamma a rank-1 exponent group; characteristic p.
    Series { fq: Fq, exponents: GroupDescriptor },
    /// Plain Q_p (unramified). `eisenstein` optionally records a single
    /// Eisenstein step for the extension-invariant catalog; element
    /// arithmetic always takes place in the unramified base.
    Padic { p: u64, eisenstein: Option<Vec<BigInt>> },
    /// F_q((u))((t)) with rank-2 lex value group (t dominant).
    IteratedSeries { fq: Fq },
}

impl FieldModel {
    pub fn series(fq: Fq, exponents: GroupDescriptor) -> Arc<FieldModel> {
        Arc::new(FieldModel::Series { fq, exponents })
    }

    /// The perfect-hull series model: F_q((t)) with p-divisible exponents,
    /// closed under p-th roots.
    pub fn perfect_hull(p: u64, k: usize) -> Arc<FieldModel> {
        let fq = Fq::new(p, k).expect("table entry");
        FieldModel::series(
            fq,
            GroupDescriptor::rank1(Divisibility::PDivisibleIntegers(p as u32)),
        )
    }

    pub fn padic(p: u64) -> Arc<FieldModel> {
        Arc::new(FieldModel::Padic { p, eisenstein: None })
    }

    pub fn iterated(p: u64, k: usize) -> Arc<FieldModel> {
        Arc::new(FieldModel::IteratedSeries { fq: Fq::new(p, k).expect("table entry") })
    }

    pub fn residue_char(&self) -> u64 {
        match self {
            FieldModel::Series { fq, .. } | FieldModel::IteratedSeries { fq } => fq.p,
            FieldModel::Padic { p, .. } => *p,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldModel::Padic { .. } => 0,
            _ => self.residue_char(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            FieldModel::IteratedSeries { .. } => 2,
            _ => 1,
        }
    }

    pub fn residue_field(&self) -> Fq {
        match self {
            FieldModel::Series { fq, .. } | FieldModel::IteratedSeries { fq } => fq.clone(),
            FieldModel::Padic { p, .. } => Fq::prime(*p),
        }
    }

    pub fn exponent_group(&self) -> GroupDescriptor {
        match self {
            FieldModel::Series { exponents, .. } => exponents.clone(),
            FieldModel::Padic { .. } => GroupDescriptor::rank1(Divisibility::Integers),
            FieldModel::IteratedSeries { .. } => {
                GroupDescriptor::rank2(Divisibility::Integers, Divisibility::Integers)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    Series(SeriesRepr),
    Padic(PadicRepr),
}

/// A model-tagged exact-at-precision field element.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldElement {
    pub model: Arc<FieldModel>,
    pub repr: Repr,
}

impl FieldElement {
    pub fn same_model(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.model == other.model {
            Ok(())
        } else {
            Err(FieldError::ModelMismatch)
        }
    }

    pub fn zero(model: &Arc<FieldModel>) -> FieldElement {
        match &**model {
            FieldModel::Padic { .. } => {
                // exact zero is not representable p-adically; use a generous default
                FieldElement {
                    model: model.clone(),
                    repr: Repr::Padic(PadicRepr::zero_at(padic::DEFAULT_PREC)),
                }
            }
            _ => FieldElement {
                model: model.clone(),
                repr: Repr::Series(SeriesRepr::exact_zero()),
            },
        }
    }

    pub fn zero_at(model: &Arc<FieldModel>, prec: Prec) -> FieldElement {
        match &**model {
            FieldModel::Padic { .. } => {
                let n = padic::prec_from(&prec);
                FieldElement { model: model.clone(), repr: Repr::Padic(PadicRepr::zero_at(n)) }
            }
            _ => FieldElement {
                model: model.clone(),
                repr: Repr::Series(SeriesRepr { terms: Default::default(), prec }),
            },
        }
    }

    pub fn one(model: &Arc<FieldModel>) -> FieldElement {
        FieldElement::from_residue_const(model, &model.residue_field().one())
    }

    /// Constant-term element from a residue-field coefficient (series) or
    /// an integer representative (p-adics).
    pub fn from_residue_const(model: &Arc<FieldModel>, c: &FqElem) -> FieldElement {
        match &**model {
            FieldModel::Padic { .. } => FieldElement::padic_from_bigint(
                model,
                BigInt::from(c.0[0]),
                padic::DEFAULT_PREC,
            ),
            _ => {
                let mut terms = std::collections::BTreeMap::new();
                if !model.residue_field().is_zero(c) {
                    terms.insert(Exponent::zero(model.rank()), c.clone());
                }
                FieldElement {
                    model: model.clone(),
                    repr: Repr::Series(SeriesRepr { terms, prec: Prec::Unbounded }),
                }
            }
        }
    }

    pub fn from_int(model: &Arc<FieldModel>, n: i64) -> FieldElement {
        match &**model {
            FieldModel::Padic { .. } => {
                FieldElement::padic_from_bigint(model, BigInt::from(n), padic::DEFAULT_PREC)
            }
            _ => FieldElement::from_residue_const(model, &model.residue_field().from_i64(n)),
        }
    }

    pub fn padic_from_bigint(model: &Arc<FieldModel>, m: BigInt, prec: i64) -> FieldElement {
        let p = match &**model {
            FieldModel::Padic { p, .. } => *p,
            _ => panic!("padic_from_bigint on a series model"),
        };
        FieldElement {
            model: model.clone(),
            repr: Repr::Padic(PadicRepr::new(p, m, 0, prec)),
        }
    }

    pub fn monomial(model: &Arc<FieldModel>, c: &FqElem, e: Exponent) -> FieldElement {
        let mut terms = std::collections::BTreeMap::new();
        if !model.residue_field().is_zero(c) {
            terms.insert(e, c.clone());
        }
        FieldElement {
            model: model.clone(),
            repr: Repr::Series(SeriesRepr { terms, prec: Prec::Unbounded }),
        }
    }

    pub fn series_repr(&self) -> Option<&SeriesRepr> {
        match &self.repr {
            Repr::Series(s) => Some(s),
            _ => None,
        }
    }

    pub fn padic_repr(&self) -> Option<&PadicRepr> {
        match &self.repr {
            Repr::Padic(p) => Some(p),
            _ => None,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_model(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Series(a), Repr::Series(b)) => {
                Repr::Series(series::add(&self.model, a, b))
            }
            (Repr::Padic(a), Repr::Padic(b)) => Repr::Padic(padic::add(a, b)),
            _ => return Err(FieldError::ModelMismatch),
        };
        Ok(FieldElement { model: self.model.clone(), repr })
    }

    pub fn neg(&self) -> FieldElement {
        let repr = match &self.repr {
            Repr::Series(a) => Repr::Series(series::neg(&self.model, a)),
            Repr::Padic(a) => Repr::Padic(padic::neg(a)),
        };
        FieldElement { model: self.model.clone(), repr }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_model(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Series(a), Repr::Series(b)) => {
                Repr::Series(series::mul(&self.model, a, b))
            }
            (Repr::Padic(a), Repr::Padic(b)) => Repr::Padic(padic::mul(a, b)),
            _ => return Err(FieldError::ModelMismatch),
        };
        Ok(FieldElement { model: self.model.clone(), repr })
    }

    /// Exact inverse truncated to the guaranteed output precision.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        let repr = match &self.repr {
            Repr::Series(a) => Repr::Series(series::inv(&self.model, a)?),
            Repr::Padic(a) => Repr::Padic(padic::inv(a)?),
        };
        Ok(FieldElement { model: self.model.clone(), repr })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Result<FieldElement, FieldError> {
        let mut acc = FieldElement::one(&self.model);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Least exponent with a nonzero coefficient. `Infinity` for the exact
    /// zero; `InsufficientPrecision` when the element vanishes at a finite
    /// precision without being provably zero.
    pub fn value(&self) -> Result<Value, FieldError> {
        match &self.repr {
            Repr::Series(a) => series::value(a),
            Repr::Padic(a) => padic::value(a),
        }
    }

    /// Value if determined, or the finite precision bound as an error payload.
    pub fn is_zero_at_prec(&self) -> bool {
        match &self.repr {
            Repr::Series(a) => a.terms.is_empty(),
            Repr::Padic(a) => a.mantissa.is_zero(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match &self.repr {
            Repr::Series(a) => a.terms.is_empty() && a.prec == Prec::Unbounded,
            Repr::Padic(_) => false,
        }
    }

    pub fn precision(&self) -> Prec {
        match &self.repr {
            Repr::Series(a) => a.prec.clone(),
            Repr::Padic(a) => Prec::Finite(Exponent::rank1(BigRational::from(BigInt::from(a.prec)))),
        }
    }

    /// Coefficient at exponent 0, defined on the valuation ring.
    pub fn residue(&self) -> Result<FqElem, FieldError> {
        match &self.repr {
            Repr::Series(a) => series::residue(&self.model, a),
            Repr::Padic(a) => padic::residue(&self.model, a),
        }
    }

    /// Truncate to a (possibly lower) precision bound.
    pub fn truncate(&self, prec: &Prec) -> FieldElement {
        let repr = match &self.repr {
            Repr::Series(a) => Repr::Series(series::truncate(a, prec)),
            Repr::Padic(a) => Repr::Padic(padic::truncate(a, padic::prec_from(prec))),
        };
        FieldElement { model: self.model.clone(), repr }
    }

    /// p-th root within the model; see `hensel::pth_root`.
    pub fn pth_root(&self) -> Result<FieldElement, FieldError> {
        pth_root(self)
    }

    pub fn render(&self) -> String {
        match &self.repr {
            Repr::Series(a) => series::render(&self.model, a),
            Repr::Padic(a) => padic::render(a),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// A checkable claim artifact for a p-th-power-class manipulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Root r for the claim a = b * r^p.
    PthPower { root: FieldElement },
    /// Preimage u for the claim u^p - u = m.
    WpPreimage { u: FieldElement },
    /// Unit factor s for a class-preserving multiplication by s^p.
    UnitFactor { s: FieldElement },
}

impl Witness {
    pub fn trivial(model: &Arc<FieldModel>) -> Witness {
        Witness::PthPower { root: FieldElement::one(model) }
    }
}

/// Re-verify a = b * root^p by direct arithmetic at the guaranteed precision.
pub fn verify_pth_power(
    a: &FieldElement,
    b: &FieldElement,
    root: &FieldElement,
    p: u64,
) -> Result<bool, FieldError> {
    let rhs = b.mul(&root.pow(p)?)?;
    Ok(a.sub(&rhs)?.is_zero_at_prec())
}

/// Re-verify u^p - u = m at the guaranteed precision.
pub fn verify_wp_preimage(
    u: &FieldElement,
    m: &FieldElement,
    p: u64,
) -> Result<bool, FieldError> {
    let lhs = u.pow(p)?.sub(u)?;
    Ok(lhs.sub(m)?.is_zero_at_prec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordval::{rat, rat_int, Divisibility};
    use crate::poly::Poly;
    use num_traits::One;

    fn f2_laurent() -> Arc<FieldModel> {
        FieldModel::series(
            Fq::prime(2),
            GroupDescriptor::rank1(Divisibility::Integers),
        )
    }

    fn mono(model: &Arc<FieldModel>, c: i64, num: i64, den: i64) -> FieldElement {
        let fq = model.residue_field();
        FieldElement::monomial(model, &fq.from_i64(c), Exponent::rank1(rat(num, den)))
    }

    #[test]
    fn series_add_mul_precision() {
        let m = f2_laurent();
        // (1 + t + O(t^2)) * t^-1 = t^-1 + 1 + O(t^1)
        let a = FieldElement::one(&m)
            .add(&mono(&m, 1, 1, 1))
            .unwrap()
            .truncate(&Prec::Finite(Exponent::rank1(rat_int(2))));
        let b = mono(&m, 1, -1, 1);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.precision(), Prec::Finite(Exponent::rank1(rat_int(1))));
        assert_eq!(prod.value().unwrap(), Value::rank1_int(-1));
        assert_eq!(prod.render(), "t^-1 + 1 @prec 1");
    }

    #[test]
    fn series_inverse_geometric() {
        let m = f2_laurent();
        // 1/(1 + t) = 1 + t + t^2 + ... truncated at the input precision
        let a = FieldElement::one(&m)
            .add(&mono(&m, 1, 1, 1))
            .unwrap()
            .truncate(&Prec::Finite(Exponent::rank1(rat_int(4))));
        let inv = a.inv().unwrap();
        assert_eq!(inv.render(), "1 + t + t^2 + t^3 @prec 4");
        assert!(a.mul(&inv).unwrap().sub(&FieldElement::one(&m)).unwrap().is_zero_at_prec());
        // an exact multi-term series has no finite inverse representation
        let exact = FieldElement::one(&m).add(&mono(&m, 1, 1, 1)).unwrap();
        assert_eq!(exact.inv(), Err(FieldError::ExactInverseNotRepresentable));
    }

    #[test]
    fn perfect_hull_pth_root() {
        let m = FieldModel::perfect_hull(2, 1);
        let a = mono(&m, 1, 1, 2).add(&mono(&m, 1, 3, 1)).unwrap();
        let r = a.pth_root().unwrap();
        assert_eq!(r.render(), "t^(1/4) + t^(3/2)");
        assert_eq!(r.mul(&r).unwrap(), a);
        // the plain-integer model refuses roots that leave the group
        let mi = f2_laurent();
        let b = mono(&mi, 1, 3, 1);
        assert_eq!(b.pth_root(), Err(FieldError::ExponentGroupNotPDivisible));
    }

    #[test]
    fn padic_basic_arithmetic() {
        let m = FieldModel::padic(2);
        let three = FieldElement::padic_from_bigint(&m, BigInt::from(3), 5);
        let inv = three.inv().unwrap();
        assert_eq!(inv.render(), "11 @prec 2^5");
        // min(va + Pb, vb + Pa) for 17 + O(2^3) times 2 + O(2^4)
        let a = FieldElement::padic_from_bigint(&m, BigInt::from(17), 3);
        let b = FieldElement::padic_from_bigint(&m, BigInt::from(2), 4);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.render(), "2 @prec 2^4");
        assert_eq!(prod.value().unwrap(), Value::rank1_int(1));
    }

    #[test]
    fn padic_square_root_of_17() {
        let m = FieldModel::padic(2);
        let a = FieldElement::padic_from_bigint(&m, BigInt::from(17), 7);
        let r = a.pth_root().unwrap();
        assert_eq!(r.render(), "41 @prec 2^6");
        assert!(r.mul(&r).unwrap().sub(&a).unwrap().is_zero_at_prec());
        // 3 is not a square in Q_2
        let b = FieldElement::padic_from_bigint(&m, BigInt::from(3), 7);
        assert_eq!(b.pth_root(), Err(FieldError::NotAPthPower));
        assert_eq!(is_pth_power(&b).unwrap(), PthPowerVerdict::No);
    }

    #[test]
    fn hensel_lift_artin_schreier_root() {
        // X^2 + X + t over F_2((t)): the root t + t^2 + t^4 + t^8 + ...
        let m = f2_laurent();
        let f = Poly::new(
            m.clone(),
            vec![mono(&m, 1, 1, 1), FieldElement::one(&m), FieldElement::one(&m)],
        );
        let root = hensel_lift(&f, &m.residue_field().zero(), &Value::rank1_int(9)).unwrap();
        assert_eq!(root.render(), "t + t^2 + t^4 + t^8 @prec 9");
        let fx = f.eval(&root).unwrap();
        assert!(fx.is_zero_at_prec());
        // a multiple residue root is rejected
        let g = Poly::new(m.clone(), vec![mono(&m, 1, 1, 1), FieldElement::zero(&m), FieldElement::one(&m)]);
        assert_eq!(
            hensel_lift(&g, &m.residue_field().zero(), &Value::rank1_int(4)),
            Err(FieldError::MultipleResidueRoot)
        );
    }

    #[test]
    fn one_unit_shifts() {
        let m = FieldModel::padic(2);
        let two = FieldElement::from_int(&m, 2);
        let eight = FieldElement::from_int(&m, 8);
        // part a: 3 and 11 are in the same square class
        let w = one_unit_shift_a(&two, &eight).unwrap();
        let Witness::PthPower { root } = &w else { panic!() };
        let three = FieldElement::from_int(&m, 3);
        let eleven = FieldElement::from_int(&m, 11);
        assert!(verify_pth_power(&three, &eleven, root, 2).unwrap());
        // part a requires v(c) > 2
        assert!(matches!(
            one_unit_shift_a(&two, &FieldElement::from_int(&m, 4)),
            Err(FieldError::Precondition(_))
        ));
        // part c with b = c = 2: -1 and 7 are in the same square class
        let w = one_unit_shift_c(&two, &two).unwrap();
        let Witness::PthPower { root } = &w else { panic!() };
        let minus_one = FieldElement::from_int(&m, -1);
        let seven = FieldElement::from_int(&m, 7);
        assert!(verify_pth_power(&minus_one, &seven, root, 2).unwrap());
    }

    #[test]
    fn rewrite_requires_value_legality() {
        let m = FieldModel::padic(2);
        let two = FieldElement::from_int(&m, 2);
        // v(d) = 1: delta^{-1}(1) = 0 is not > v(p) = 1
        assert!(matches!(
            rewrite_delta_inverse(&two, &two),
            Err(FieldError::Precondition(_))
        ));
        // v(d) = 2 is legal: Delta^{-1}(d) = (-d/2)^2 = 4 and
        // 1 + 2 + 4 = (1 + 2 - 4) r^2
        let four = FieldElement::from_int(&m, 4);
        let (cp, w) = rewrite_delta_inverse(&two, &four.neg()).unwrap();
        assert_eq!(cp.value().unwrap(), Value::rank1_int(2));
        let Witness::PthPower { root } = &w else { panic!() };
        // 1 + b + d = -1, 1 + b + Delta^{-1}(d) = 7
        let lhs = FieldElement::from_int(&m, -1);
        let rhs = FieldElement::one(&m).add(&two).unwrap().add(&cp).unwrap();
        assert!(verify_pth_power(&lhs, &rhs, root, 2).unwrap());
    }

    #[test]
    fn rank2_lex_value_and_render() {
        let m = FieldModel::iterated(2, 1);
        let fq = m.residue_field();
        // u^-1 t + t^2, value (1, -1) under the lex order with t dominant
        let a = FieldElement::monomial(&m, &fq.one(), Exponent(vec![rat_int(1), rat_int(-1)]))
            .add(&FieldElement::monomial(&m, &fq.one(), Exponent(vec![rat_int(2), rat_int(0)])))
            .unwrap();
        assert_eq!(
            a.value().unwrap(),
            Value::Finite(vec![rat_int(1), rat_int(-1)])
        );
        assert_eq!(a.render(), "u^-1*t + t^2");
        let one = FieldElement::one(&m);
        assert!(BigRational::one().is_one());
        assert_eq!(one.value().unwrap(), Value::zero(2));
    }
}
