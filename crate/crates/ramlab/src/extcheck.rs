//! Invariants of finite extensions of valued fields: ramification index,
//! residue degree, Ostrowski defect, the three tameness conditions, the
//! henselian-element test, and immediacy of composite-place extensions on
//! the rank-2 iterated model.
//!
//! General valuation extension (Newton polygons over henselizations) is out
//! of scope; a small exactly-decidable catalog plus declared value data
//! covers the bookkeeping the computations need.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::fieldcore::{FieldError, FieldModel};
use crate::fq::FqElem;
use crate::ordval::{OrdvalError, Value};
use crate::poly::{Poly, ResiduePoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtcheckError {
    #[error("unsupported minimal-polynomial shape: {0}")]
    UnsupportedShape(String),
    #[error("inconsistent declared data: {0}")]
    InconsistentData(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ordval(#[from] OrdvalError),
}

/// The numerical bookkeeping of a finite extension E|K of valued fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionInvariants {
    pub degree: u64,
    /// Value-group index (vE : vK).
    pub e: u64,
    /// Residue degree [Ev : Kv].
    pub f: u64,
    /// Ostrowski defect degree/(e*f); a power of the residue characteristic.
    pub defect: u64,
    /// Ramification prime to the residue characteristic.
    pub te1: bool,
    /// Residue extension separable.
    pub te2: bool,
    /// Defectless.
    pub te3: bool,
}

/// Value/residue data supplied for shapes outside the decidable catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredData {
    pub e: u64,
    pub f: u64,
    pub residue_separable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSpec {
    pub base: Arc<FieldModel>,
    pub minpoly: Poly,
    pub declared: Option<DeclaredData>,
}

impl ExtensionSpec {
    pub fn new(minpoly: Poly, declared: Option<DeclaredData>) -> ExtensionSpec {
        ExtensionSpec { base: minpoly.model.clone(), minpoly, declared }
    }
}

fn is_monic(h: &Poly) -> Result<bool, ExtcheckError> {
    let Some(n) = h.degree() else { return Ok(false) };
    let lead = h.coeff(n);
    let one = crate::fieldcore::FieldElement::one(&h.model);
    Ok(lead.sub(&one)?.is_zero_at_prec())
}

fn rank1_int_value(v: &Value) -> Result<Option<i64>, ExtcheckError> {
    if !v.is_finite() {
        return Ok(None);
    }
    let q = v.as_rank1()?;
    if !q.denom().is_one() {
        return Ok(None);
    }
    Ok(q.numer().to_i64())
}

fn assemble(degree: u64, e: u64, f: u64, p: u64, te2: bool) -> Result<ExtensionInvariants, ExtcheckError> {
    if e == 0 || f == 0 || degree % (e * f) != 0 {
        return Err(ExtcheckError::InconsistentData(format!(
            "degree {} is not a multiple of e*f = {}",
            degree,
            e * f
        )));
    }
    let defect = degree / (e * f);
    // Ostrowski: the defect is a power of the residue characteristic
    let mut d = defect;
    while d % p == 0 {
        d /= p;
    }
    if d != 1 {
        return Err(ExtcheckError::InconsistentData(format!(
            "defect {} is not a power of the residue characteristic {}",
            defect, p
        )));
    }
    Ok(ExtensionInvariants {
        degree,
        e,
        f,
        defect,
        te1: e % p != 0,
        te2,
        te3: defect == 1,
    })
}

/// Decide (e, f, defect, TE1-TE3) for the supported catalog: Eisenstein,
/// unramified with irreducible separable residue polynomial, Artin-Schreier
/// with negative-value right-hand side, or explicitly declared data.
pub fn extension_invariants(spec: &ExtensionSpec) -> Result<ExtensionInvariants, ExtcheckError> {
    let h = &spec.minpoly;
    let n = h
        .degree()
        .ok_or_else(|| ExtcheckError::UnsupportedShape("zero polynomial".into()))?;
    if n < 1 {
        return Err(ExtcheckError::UnsupportedShape("degree must be at least 1".into()));
    }
    if !is_monic(h)? {
        return Err(ExtcheckError::UnsupportedShape("minimal polynomial must be monic".into()));
    }
    let p = spec.base.residue_char();
    let degree = n as u64;

    if let Some(decl) = &spec.declared {
        return assemble(degree, decl.e, decl.f, p, decl.residue_separable);
    }
    if n == 1 {
        return assemble(1, 1, 1, p, true);
    }

    // Artin-Schreier shape X^p - X - b with v(b) < 0 and v(b) not divisible
    // by p inside the value group: totally ramified of degree p
    if spec.base.characteristic() == p && degree == p {
        if let Some(b) = artin_schreier_rhs(h)? {
            let vb = b.value()?;
            if !vb.is_positive() && !vb.is_zero() {
                let group = spec.base.exponent_group();
                let divided = vb.scale(&crate::ordval::rat(1, p as i64))?;
                if group.accepts(&divided) {
                    return Err(ExtcheckError::UnsupportedShape(
                        "Artin-Schreier right-hand side has p-divisible value; \
                         the extension may carry defect and needs declared data"
                            .into(),
                    ));
                }
                return assemble(degree, p, 1, p, true);
            }
        }
    }

    // Eisenstein: positive-value lower coefficients, constant coefficient
    // of value coprime to the degree: totally ramified
    let mut eisenstein = true;
    let v0 = h.coeff(0).value();
    match &v0 {
        Ok(v) if v.is_positive() && v.is_finite() => {
            for i in 1..n {
                let c = h.coeff(i);
                if c.is_zero_at_prec() {
                    continue;
                }
                let vi = c.value()?;
                if crate::ordval::compare(&vi, v)? == std::cmp::Ordering::Less {
                    eisenstein = false;
                }
            }
            if eisenstein {
                match rank1_int_value(v)? {
                    Some(m) if m > 0 && (m as u64).gcd(&degree) == 1 => {
                        return assemble(degree, degree, 1, p, true);
                    }
                    _ => eisenstein = false,
                }
            }
        }
        _ => eisenstein = false,
    }
    let _ = eisenstein;

    // unramified: integral coefficients with irreducible (and separable)
    // residue polynomial
    match h.residue_poly() {
        Ok(hbar) => {
            if hbar.degree() == Some(n) && residue_irreducible(&hbar) {
                let te2 = residue_separable(&hbar);
                return assemble(degree, 1, degree, p, te2);
            }
        }
        Err(FieldError::NonIntegralCoefficients) => {}
        Err(e) => return Err(e.into()),
    }

    Err(ExtcheckError::UnsupportedShape(
        "not Eisenstein, unramified-irreducible, or catalog Artin-Schreier; \
         declared value data required"
            .into(),
    ))
}

/// TE1 and TE2 and TE3, recomputed against the given residue characteristic.
pub fn tame_check(inv: &ExtensionInvariants, p: u64) -> bool {
    inv.e % p != 0 && inv.te2 && inv.defect == 1
}

/// Invariants of a two-step tower: every component is multiplicative.
pub fn compose(
    top: &ExtensionInvariants,
    bottom: &ExtensionInvariants,
    p: u64,
) -> Result<ExtensionInvariants, ExtcheckError> {
    assemble(
        top.degree * bottom.degree,
        top.e * bottom.e,
        top.f * bottom.f,
        p,
        top.te2 && bottom.te2,
    )
}

/// Extract b from X^p - X - b, if the polynomial has that shape.
fn artin_schreier_rhs(h: &Poly) -> Result<Option<crate::fieldcore::FieldElement>, ExtcheckError> {
    let model = h.model.clone();
    let p = model.residue_char() as usize;
    if h.degree() != Some(p) {
        return Ok(None);
    }
    let one = crate::fieldcore::FieldElement::one(&model);
    for i in 1..p {
        let expected = if i == 1 { one.neg() } else { crate::fieldcore::FieldElement::zero(&model) };
        if !h.coeff(i).sub(&expected)?.is_zero_at_prec() {
            return Ok(None);
        }
    }
    Ok(Some(h.coeff(0).neg()))
}

// ---------------------------------------------------------------------------
// residue-polynomial factorization over the small finite fields

fn rp_rem(a: &ResiduePoly, b: &ResiduePoly) -> ResiduePoly {
    let fq = a.fq.clone();
    let db = b.degree().expect("nonzero divisor");
    let lead_inv = fq.inv(&b.coeffs[db]).expect("unit leading coefficient");
    let mut r = a.coeffs.clone();
    while r.len() > db {
        let k = r.len() - 1;
        let q = fq.mul(&r[k], &lead_inv);
        if !fq.is_zero(&q) {
            for (j, cb) in b.coeffs.iter().enumerate() {
                let idx = k - db + j;
                r[idx] = fq.sub(&r[idx], &fq.mul(&q, cb));
            }
        }
        r.pop();
    }
    ResiduePoly::new(fq, r)
}

fn rp_gcd_degree(a: &ResiduePoly, b: &ResiduePoly) -> Option<usize> {
    let mut x = a.clone();
    let mut y = b.clone();
    while y.degree().is_some() {
        let r = rp_rem(&x, &y);
        x = y;
        y = r;
    }
    x.degree()
}

/// All monic polynomials of exact degree d over the (small) residue field.
fn monic_polys(fq: &crate::fq::Fq, d: usize) -> Vec<ResiduePoly> {
    let q = fq.order();
    let mut out = Vec::new();
    let total = q.pow(d as u32);
    for idx in 0..total {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = idx;
        for _ in 0..d {
            coeffs.push(fq.from_index(rest % q));
            rest /= q;
        }
        coeffs.push(fq.one());
        out.push(ResiduePoly::new(fq.clone(), coeffs));
    }
    out
}

fn residue_irreducible(h: &ResiduePoly) -> bool {
    let Some(n) = h.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    for d in 1..=(n / 2) {
        for g in monic_polys(&h.fq, d) {
            if rp_rem(h, &g).degree().is_none() {
                return false;
            }
        }
    }
    true
}

fn residue_separable(h: &ResiduePoly) -> bool {
    // gcd(h, h') trivial; for irreducible h over a finite field this always
    // holds (finite fields are perfect), kept as the stated decision rule
    match h.degree() {
        None | Some(0) => false,
        _ => matches!(rp_gcd_degree(h, &h.derivative()), Some(0) | None),
    }
}

// ---------------------------------------------------------------------------
// henselian-element test

/// True iff h is monic with coefficients in the valuation ring and the
/// given residue of the generator is a simple root of the reduction.
pub fn henselian_element_test(h: &Poly, eta_residue: &FqElem) -> Result<bool, ExtcheckError> {
    if !is_monic(h)? {
        return Err(ExtcheckError::UnsupportedShape("polynomial must be monic".into()));
    }
    let hbar = match h.residue_poly() {
        Ok(hbar) => hbar,
        Err(FieldError::NonIntegralCoefficients) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    let fq = h.model.residue_field();
    if !fq.is_zero(&hbar.eval(eta_residue)) {
        return Ok(false);
    }
    Ok(!fq.is_zero(&hbar.derivative().eval(eta_residue)))
}

// ---------------------------------------------------------------------------
// composite-place immediacy on the rank-2 model

/// Supported extensions of L = F_q((u))((t)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositeExtension {
    Trivial,
    /// Enlarge the constant field to F_{q^k}.
    ConstantField { k: usize },
    /// Adjoin t^{1/r}.
    TRoot { r: u64 },
    /// Adjoin u^{1/r}.
    URoot { r: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Immediacy {
    Immediate,
    NotImmediate { reason: String },
}

/// Layer decomposition of a catalog extension under the composite place
/// P = Q1 Q2: (value index at Q1, value index at Q2 on the residue field,
/// residue degree at Q2).
pub fn layer_indices(ext: &CompositeExtension) -> (u64, u64, u64) {
    match ext {
        CompositeExtension::Trivial => (1, 1, 1),
        CompositeExtension::ConstantField { k } => (1, 1, *k as u64),
        CompositeExtension::TRoot { r } => (*r, 1, 1),
        CompositeExtension::URoot { r } => (1, *r, 1),
    }
}

/// Immediacy of (L'P | LP): the Q1 value groups must agree and the residue
/// extension at Q2 must itself be immediate.
pub fn composite_immediate_check(
    l: &Arc<FieldModel>,
    ext: &CompositeExtension,
) -> Result<Immediacy, ExtcheckError> {
    if l.rank() != 2 {
        return Err(ExtcheckError::UnsupportedShape(
            "composite places live on the rank-2 iterated model".into(),
        ));
    }
    match ext {
        CompositeExtension::ConstantField { k: 0 } => {
            return Err(ExtcheckError::UnsupportedShape("constant field of degree 0".into()))
        }
        CompositeExtension::TRoot { r: 0 } | CompositeExtension::URoot { r: 0 } => {
            return Err(ExtcheckError::UnsupportedShape("root of index 0".into()))
        }
        _ => {}
    }
    let (q1_value, q2_value, q2_residue) = layer_indices(ext);
    if q1_value != 1 {
        return Ok(Immediacy::NotImmediate {
            reason: format!("Q1 value index {}", q1_value),
        });
    }
    if q2_value != 1 {
        return Ok(Immediacy::NotImmediate {
            reason: format!("Q2-layer value index {}", q2_value),
        });
    }
    if q2_residue != 1 {
        return Ok(Immediacy::NotImmediate {
            reason: format!("Q2-layer residue degree {}", q2_residue),
        });
    }
    Ok(Immediacy::Immediate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcore::{Exponent, FieldElement};
    use crate::fq::Fq;
    use crate::ordval::{rat_int, Divisibility, GroupDescriptor};

    fn laurent(p: u64) -> Arc<FieldModel> {
        FieldModel::series(Fq::prime(p), GroupDescriptor::rank1(Divisibility::Integers))
    }

    fn t_power(m: &Arc<FieldModel>, k: i64) -> FieldElement {
        FieldElement::monomial(m, &m.residue_field().one(), Exponent::rank1(rat_int(k)))
    }

    fn x2_minus_t(m: &Arc<FieldModel>) -> Poly {
        Poly::new(
            m.clone(),
            vec![t_power(m, 1).neg(), FieldElement::zero(m), FieldElement::one(m)],
        )
    }

    #[test]
    fn eisenstein_tame_vs_wild() {
        // X^2 - t over F_3((t)): totally ramified, tame
        let m3 = laurent(3);
        let inv = extension_invariants(&ExtensionSpec::new(x2_minus_t(&m3), None)).unwrap();
        assert_eq!((inv.degree, inv.e, inv.f, inv.defect), (2, 2, 1, 1));
        assert!(inv.te1 && inv.te2 && inv.te3);
        assert!(tame_check(&inv, 3));
        // the same polynomial over F_2((t)): ramification divisible by p
        let m2 = laurent(2);
        let inv = extension_invariants(&ExtensionSpec::new(x2_minus_t(&m2), None)).unwrap();
        assert_eq!((inv.degree, inv.e, inv.f, inv.defect), (2, 2, 1, 1));
        assert!(!inv.te1);
        assert!(!tame_check(&inv, 2));
    }

    #[test]
    fn declared_defect_extension() {
        // degree 4 with declared e=2, f=1 over residue characteristic 2
        let m = laurent(2);
        let minpoly = Poly::new(
            m.clone(),
            vec![
                t_power(&m, 1),
                FieldElement::zero(&m),
                t_power(&m, 2),
                FieldElement::zero(&m),
                FieldElement::one(&m),
            ],
        );
        let spec = ExtensionSpec::new(
            minpoly,
            Some(DeclaredData { e: 2, f: 1, residue_separable: true }),
        );
        let inv = extension_invariants(&spec).unwrap();
        assert_eq!(inv.defect, 2);
        assert!(!inv.te3);
        assert!(!tame_check(&inv, 2));
        // inconsistent data is rejected: 4 / (3*1) is not integral
        let spec = ExtensionSpec::new(
            spec.minpoly.clone(),
            Some(DeclaredData { e: 3, f: 1, residue_separable: true }),
        );
        assert!(matches!(
            extension_invariants(&spec),
            Err(ExtcheckError::InconsistentData(_))
        ));
    }

    #[test]
    fn unramified_and_artin_schreier_catalog() {
        // X^2 + X + 1 over F_2((t)): unramified with residue degree 2
        let m = laurent(2);
        let one = FieldElement::one(&m);
        let h = Poly::new(m.clone(), vec![one.clone(), one.clone(), one.clone()]);
        let inv = extension_invariants(&ExtensionSpec::new(h, None)).unwrap();
        assert_eq!((inv.e, inv.f, inv.defect), (1, 2, 1));
        assert!(tame_check(&inv, 2));
        // X^2 - X - t^-1: Artin-Schreier, totally (wildly) ramified
        let h = Poly::new(
            m.clone(),
            vec![t_power(&m, -1).neg(), one.neg(), one.clone()],
        );
        let inv = extension_invariants(&ExtensionSpec::new(h, None)).unwrap();
        assert_eq!((inv.e, inv.f, inv.defect), (2, 1, 1));
        assert!(!inv.te1 && inv.te3);
        // over the perfect hull the right-hand value is 2-divisible: the
        // extension may carry defect, so the catalog refuses
        let ph = FieldModel::perfect_hull(2, 1);
        let one = FieldElement::one(&ph);
        let h = Poly::new(
            ph.clone(),
            vec![t_power(&ph, -1).neg(), one.neg(), one],
        );
        assert!(matches!(
            extension_invariants(&ExtensionSpec::new(h, None)),
            Err(ExtcheckError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn tame_check_table() {
        let p = 2;
        let mk = |e, f, defect, te2| ExtensionInvariants {
            degree: e * f * defect,
            e,
            f,
            defect,
            te1: e % p != 0,
            te2,
            te3: defect == 1,
        };
        assert!(tame_check(&mk(3, 1, 1, true), p));
        assert!(!tame_check(&mk(1, 1, 2, true), p));
        assert!(!tame_check(&mk(2, 1, 1, true), p));
        assert!(!tame_check(&mk(3, 1, 1, false), p));
    }

    #[test]
    fn tower_composition_is_multiplicative() {
        // catalog pairs: every invariant multiplies and the Ostrowski
        // relation survives composition
        let m3 = laurent(3);
        let one = FieldElement::one(&m3);
        let unram = Poly::new(
            m3.clone(),
            vec![one.clone(), FieldElement::zero(&m3), one.clone()],
        );
        let catalog = vec![
            extension_invariants(&ExtensionSpec::new(x2_minus_t(&m3), None)).unwrap(),
            extension_invariants(&ExtensionSpec::new(unram, None)).unwrap(),
            extension_invariants(&ExtensionSpec::new(
                Poly::new(m3.clone(), vec![t_power(&m3, 1), one]),
                Some(DeclaredData { e: 1, f: 1, residue_separable: true }),
            ))
            .unwrap(),
            // a declared defect step
            ExtensionInvariants {
                degree: 3,
                e: 1,
                f: 1,
                defect: 3,
                te1: true,
                te2: true,
                te3: false,
            },
        ];
        for a in &catalog {
            for b in &catalog {
                let c = compose(a, b, 3).unwrap();
                assert_eq!(c.degree, a.degree * b.degree);
                assert_eq!(c.e, a.e * b.e);
                assert_eq!(c.f, a.f * b.f);
                assert_eq!(c.defect, a.defect * b.defect);
                assert_eq!(c.degree, c.e * c.f * c.defect);
                assert_eq!(tame_check(&c, 3), tame_check(a, 3) && tame_check(b, 3));
            }
        }
    }

    #[test]
    fn henselian_element_examples() {
        let m = laurent(2);
        let fq = m.residue_field();
        let one = FieldElement::one(&m);
        // X^2 + X + t with residue 0: reduction X^2 + X has derivative 1
        let h = Poly::new(m.clone(), vec![t_power(&m, 1), one.clone(), one.clone()]);
        assert!(henselian_element_test(&h, &fq.zero()).unwrap());
        // X^2 - t with residue 0: double residue root
        assert!(!henselian_element_test(&x2_minus_t(&m), &fq.zero()).unwrap());
        // X - 5 over the 2-adics: linear, residue 1 is a simple root
        let q2 = FieldModel::padic(2);
        let h = Poly::new(
            q2.clone(),
            vec![FieldElement::from_int(&q2, -5), FieldElement::one(&q2)],
        );
        assert!(henselian_element_test(&h, &Fq::prime(2).one()).unwrap());
        // non-integral coefficient: not a henselian element
        let h = Poly::new(m.clone(), vec![t_power(&m, -1), one.clone(), one]);
        assert!(!henselian_element_test(&h, &fq.zero()).unwrap());
    }

    #[test]
    fn composite_immediacy_catalog() {
        let l = FieldModel::iterated(2, 1);
        assert_eq!(
            composite_immediate_check(&l, &CompositeExtension::Trivial).unwrap(),
            Immediacy::Immediate
        );
        assert_eq!(
            composite_immediate_check(&l, &CompositeExtension::ConstantField { k: 2 }).unwrap(),
            Immediacy::NotImmediate { reason: "Q2-layer residue degree 2".into() }
        );
        assert_eq!(
            composite_immediate_check(&l, &CompositeExtension::TRoot { r: 2 }).unwrap(),
            Immediacy::NotImmediate { reason: "Q1 value index 2".into() }
        );
        assert_eq!(
            composite_immediate_check(&l, &CompositeExtension::URoot { r: 2 }).unwrap(),
            Immediacy::NotImmediate { reason: "Q2-layer value index 2".into() }
        );
        // rank-1 models are rejected
        assert!(composite_immediate_check(
            &laurent(2),
            &CompositeExtension::Trivial
        )
        .is_err());
        // agreement with the layerwise decomposition across the catalog
        let catalog = vec![
            CompositeExtension::Trivial,
            CompositeExtension::ConstantField { k: 1 },
            CompositeExtension::ConstantField { k: 2 },
            CompositeExtension::TRoot { r: 2 },
            CompositeExtension::TRoot { r: 3 },
            CompositeExtension::URoot { r: 2 },
            CompositeExtension::URoot { r: 3 },
        ];
        for ext in &catalog {
            let (a, b, c) = layer_indices(ext);
            let layerwise = a == 1 && b == 1 && c == 1;
            let verdict = composite_immediate_check(&l, ext).unwrap();
            assert_eq!(layerwise, verdict == Immediacy::Immediate);
        }
    }
}
