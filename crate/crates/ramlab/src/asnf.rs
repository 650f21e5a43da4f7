//! Characteristic-p Artin-Schreier machinery: the wp-calculus
//! (wp(X) = X^p - X), Hasse-Taylor expansion, p-index folding, and the
//! degree-reducing normal form for wp-classes of polynomials in a
//! transcendental element. Every class move records its wp-preimage so the
//! final output carries an exactly checkable identity
//! f(x) = g(z) + wp(W) + (absorbed terms).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::approx::{
    choose_center, extend, stabilize, ApproxError, ApproximationType, CenterConstraint,
    StabilizationCertificate,
};
use crate::fieldcore::{hensel_lift, Exponent, FieldElement, FieldError, FieldModel, Prec};
use crate::ordval::{compare, rat_int, OrdvalError, Value};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsnfError {
    #[error("wp requires a characteristic-p model")]
    WrongCharacteristic,
    #[error("p-index folding requires a perfect coefficient model (p-divisible exponents)")]
    NotPerfect,
    #[error("normal-form shape violated: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Ordval(#[from] OrdvalError),
}

/// wp(a) = a^p - a on elements.
pub fn wp_element(a: &FieldElement) -> Result<FieldElement, AsnfError> {
    let p = a.model.characteristic();
    if p == 0 {
        return Err(AsnfError::WrongCharacteristic);
    }
    Ok(a.pow(p)?.sub(a)?)
}

/// wp(f) = f^p - f on polynomials.
pub fn wp_poly(f: &Poly) -> Result<Poly, AsnfError> {
    if f.model.characteristic() == 0 {
        return Err(AsnfError::WrongCharacteristic);
    }
    Ok(f.wp()?)
}

/// Hasse-Taylor coefficients: f(X) = sum_i f_i(X0) (X - X0)^i with f_i the
/// i-th divided derivative, returned as polynomials in X0.
pub fn hasse_taylor(f: &Poly) -> Result<Vec<Poly>, AsnfError> {
    let n = f.degree().unwrap_or(0);
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        out.push(f.hasse_derivative(i)?);
    }
    Ok(out)
}

/// One contribution poly(X0)^(p^-nu) to a folded coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldTerm {
    /// Number of fold steps applied: the contribution is the p^nu-th root
    /// of poly evaluated at the center.
    pub nu: u32,
    pub poly: Poly,
}

impl FoldTerm {
    pub fn eval(&self, c: &FieldElement) -> Result<FieldElement, AsnfError> {
        let mut v = self.poly.eval(c)?;
        for _ in 0..self.nu {
            v = v.pth_root()?;
        }
        Ok(v)
    }
}

/// One wp-witness summand poly(X0)^(p^-depth) (X - X0)^power produced by a
/// fold step (via u^p = wp(u) + u).
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTerm {
    pub depth: u32,
    pub power: u64,
    pub poly: Poly,
}

impl WitnessTerm {
    pub fn coefficient_at(&self, c: &FieldElement) -> Result<FieldElement, AsnfError> {
        let mut v = self.poly.eval(c)?;
        for _ in 0..self.depth {
            v = v.pth_root()?;
        }
        Ok(v)
    }
}

/// Result of folding all p-divisible Taylor indices down to indices prime
/// to p.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedForm {
    pub model: Arc<FieldModel>,
    /// Constant Taylor coefficient f_0(X0), untouched by folding.
    pub constant: Poly,
    /// j (prime to p) -> contributions whose sum is the folded coefficient.
    pub exprs: BTreeMap<u64, Vec<FoldTerm>>,
    pub witness_terms: Vec<WitnessTerm>,
}

impl FoldedForm {
    /// The folded coefficient b_j at a concrete center.
    pub fn coefficient_at(&self, j: u64, c: &FieldElement) -> Result<FieldElement, AsnfError> {
        let mut acc = FieldElement::zero(&self.model);
        if let Some(terms) = self.exprs.get(&j) {
            for t in terms {
                acc = acc.add(&t.eval(c)?)?;
            }
        }
        Ok(acc)
    }

    /// The p^lambda-th power of the folded coefficient as a genuine
    /// polynomial in X0 (lambda = max fold depth), usable for value
    /// stabilization; returns (polynomial, lambda).
    pub fn stabilization_poly(&self, j: u64) -> Result<(Poly, u32), AsnfError> {
        let p = self.model.residue_char();
        let terms = self.exprs.get(&j).cloned().unwrap_or_default();
        let lambda = terms.iter().map(|t| t.nu).max().unwrap_or(0);
        let mut acc = Poly::zero(&self.model);
        for t in terms {
            // (poly^(p^-nu))^(p^lambda) = poly^(p^(lambda-nu))
            acc = acc.add(&t.poly.pow(p.pow(lambda - t.nu))?)?;
        }
        Ok((acc, lambda))
    }
}

/// Fold every Taylor index i = j p^nu (p not dividing j, nu >= 1) down to
/// index j. Each step a (X-X0)^(p m) -> a^(1/p) (X-X0)^m is a wp-class move
/// with witness a^(1/p)(X-X0)^m; Frobenius additivity lets contributions
/// fold independently.
pub fn fold_p_indices(taylor: &[Poly], model: &Arc<FieldModel>) -> Result<FoldedForm, AsnfError> {
    let p = model.characteristic();
    if p == 0 {
        return Err(AsnfError::WrongCharacteristic);
    }
    if !model.exponent_group().is_p_divisible(p as u32) {
        return Err(AsnfError::NotPerfect);
    }
    let constant = taylor.first().cloned().unwrap_or_else(|| Poly::zero(model));
    let mut exprs: BTreeMap<u64, Vec<FoldTerm>> = BTreeMap::new();
    let mut witness_terms = Vec::new();
    for (i, fi) in taylor.iter().enumerate().skip(1) {
        if fi.is_zero() {
            continue;
        }
        let mut j = i as u64;
        let mut nu = 0u32;
        while j % p == 0 {
            j /= p;
            nu += 1;
        }
        for s in 1..=nu {
            witness_terms.push(WitnessTerm {
                depth: s,
                power: (i as u64) / p.pow(s),
                poly: fi.clone(),
            });
        }
        exprs.entry(j).or_default().push(FoldTerm { nu, poly: fi.clone() });
    }
    Ok(FoldedForm { model: model.clone(), constant, exprs, witness_terms })
}

/// Re-verify the fold identity at a concrete center:
/// sum_i f_i(c)(x-c)^i = sum_j b_j(c)(x-c)^j + wp(sum of witness terms),
/// as exact polynomials in x.
pub fn verify_fold(
    taylor: &[Poly],
    folded: &FoldedForm,
    c: &FieldElement,
) -> Result<bool, AsnfError> {
    let model = &folded.model;
    let base = Poly::new(model.clone(), vec![c.neg(), FieldElement::one(model)]);
    let mut lhs = Poly::zero(model);
    for (i, fi) in taylor.iter().enumerate().skip(1) {
        lhs = lhs.add(&base.pow(i as u64)?.scale(&fi.eval(c)?)?)?;
    }
    let mut rhs = Poly::zero(model);
    for (j, _) in &folded.exprs {
        let bj = folded.coefficient_at(*j, c)?;
        rhs = rhs.add(&base.pow(*j)?.scale(&bj)?)?;
    }
    let mut w = Poly::zero(model);
    for t in &folded.witness_terms {
        w = w.add(&base.pow(t.power)?.scale(&t.coefficient_at(c)?)?)?;
    }
    let diff = lhs.sub(&rhs)?.sub(&wp_poly(&w)?)?;
    Ok(diff.coeffs.iter().all(|a| a.is_zero_at_prec()))
}

/// A positive-value term moved into the henselization: the coefficient
/// a z^index, plus the approximant values at which the Hensel certificate
/// for wp(u) = term was re-checked.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbedTerm {
    pub coefficient: FieldElement,
    pub index: usize,
    pub certified_at: Vec<Value>,
}

/// The accumulated wp-class bookkeeping for a normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct WpClassElement {
    /// W as a polynomial in x: original = representative + wp(W) + absorbed.
    pub witness: Poly,
    pub absorbed: Vec<AbsorbedTerm>,
}

/// The normal form g(z) = a_0 + sum a_i z^i with z = (x-c)/d: all nonzero
/// tail coefficients have negative, pairwise distinct values at indices
/// prime to p.
#[derive(Debug, Clone, PartialEq)]
pub struct ASNormalForm {
    pub c: FieldElement,
    pub d: FieldElement,
    pub vxc: Value,
    /// a_0..a_n as coefficients in z.
    pub coefficients: Vec<FieldElement>,
    /// Index of the least-value nonzero tail coefficient, if any.
    pub i0: Option<usize>,
    pub witness: WpClassElement,
}

impl ASNormalForm {
    pub fn g_poly(&self, model: &Arc<FieldModel>) -> Poly {
        Poly::new(model.clone(), self.coefficients.clone())
    }
}

fn require_perfect_char_p(model: &Arc<FieldModel>) -> Result<u64, AsnfError> {
    let p = model.characteristic();
    if p == 0 {
        return Err(AsnfError::WrongCharacteristic);
    }
    if !model.exponent_group().is_p_divisible(p as u32) {
        return Err(AsnfError::NotPerfect);
    }
    Ok(p)
}

/// Fold p-divisible x-monomials of f itself (a x^(p m) -> a^(1/p) x^m with
/// witness a^(1/p) x^m), before any Taylor expansion. Returns the reduced
/// polynomial and the witness accumulated in x.
fn fold_x_monomials(f: &Poly) -> Result<(Poly, Poly), AsnfError> {
    let model = f.model.clone();
    let p = model.residue_char();
    let mut coeffs = f.coeffs.clone();
    let mut witness = Poly::zero(&model);
    loop {
        let mut target = None;
        for (i, a) in coeffs.iter().enumerate() {
            if i > 0 && (i as u64) % p == 0 && !a.is_zero_at_prec() {
                target = Some(i);
            }
        }
        let Some(i) = target else { break };
        let root = coeffs[i].pth_root()?;
        let m = i / p as usize;
        coeffs[i] = FieldElement::zero(&model);
        coeffs[m] = coeffs[m].add(&root)?;
        witness = witness.add(&Poly::monomial(root, m))?;
    }
    Ok((Poly::new(model, coeffs), witness))
}

fn scale_value(v: &Value, num: i64, den: i64) -> Result<Value, OrdvalError> {
    v.scale(&BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// The Lemma-nff pipeline: fold x-monomials, Hasse-Taylor at a symbolic
/// center, fold p-divisible Taylor indices, stabilize all coefficient
/// values along the stream, pick a center whose value gamma keeps all
/// beta_j + j gamma distinct, nonzero, and different from v(f(c)), then
/// normalize z = (x-c)/d and absorb positive-value tail coefficients with
/// per-center Hensel certificates.
pub fn as_normal_form(
    f: &Poly,
    at: &mut ApproximationType,
    confirmations: usize,
) -> Result<ASNormalForm, AsnfError> {
    let model = f.model.clone();
    let p = require_perfect_char_p(&model)?;
    let (fx, x_witness) = fold_x_monomials(f)?;
    let taylor = hasse_taylor(&fx)?;
    let folded = fold_p_indices(&taylor, &model)?;

    // stabilize v(f(c)) and each folded coefficient value beta_j
    let mut constraints: Vec<CenterConstraint> = Vec::new();
    let mut certs: Vec<StabilizationCertificate> = Vec::new();
    let beta0 = {
        let cert = stabilize(at, &folded.constant, confirmations)?;
        let v = cert.stable_value.clone();
        certs.push(cert);
        v
    };
    let mut betas: Vec<(u64, Value)> = Vec::new();
    for j in folded.exprs.keys() {
        let (bpoly, lambda) = folded.stabilization_poly(*j)?;
        let cert = stabilize(at, &bpoly, confirmations)?;
        let beta = scale_value(&cert.stable_value, 1, p.pow(lambda) as i64)?;
        certs.push(cert);
        if matches!(beta, Value::Infinity) {
            continue; // the folded coefficient vanishes identically
        }
        betas.push((*j, beta));
    }
    // (betaimu): all beta_j + j gamma distinct, nonzero, and != v(f(c))
    for (j, beta) in &betas {
        constraints.push(CenterConstraint::NonZero {
            slope: rat_int(*j as i64),
            offset: beta.clone(),
        });
        if beta0.is_finite() {
            constraints.push(CenterConstraint::NonZero {
                slope: rat_int(*j as i64),
                offset: beta.add(&beta0.neg()?)?,
            });
        }
    }
    for (a, (ja, ba)) in betas.iter().enumerate() {
        for (jb, bb) in betas.iter().skip(a + 1) {
            constraints.push(CenterConstraint::NonZero {
                slope: rat_int(*ja as i64 - *jb as i64),
                offset: ba.add(&bb.neg()?)?,
            });
        }
    }
    for cert in &certs {
        constraints.push(CenterConstraint::Above {
            threshold: cert.alpha0.clone(),
            strict: false,
        });
    }
    let (c, gamma) = choose_center(at, &constraints)?;
    let center_index = at
        .approximants
        .iter()
        .position(|(cc, _)| cc == &c)
        .expect("center comes from the stream");

    // d = t^gamma, so v(z) = v(x - c) - v(d) = 0
    let gamma_exp = Exponent::from_value(&gamma)?;
    let d = FieldElement::monomial(&model, &model.residue_field().one(), gamma_exp);

    // coefficients of g before absorption: a_0 = f(c), a_j = d^j b_j(c)
    let n = betas.iter().map(|(j, _)| *j as usize).max().unwrap_or(0);
    let mut coefficients = vec![FieldElement::zero(&model); n + 1];
    coefficients[0] = folded.constant.eval(&c)?;
    for (j, _) in &betas {
        let bj = folded.coefficient_at(*j, &c)?;
        coefficients[*j as usize] = d.pow(*j)?.mul(&bj)?;
    }

    // absorb tail coefficients of positive value, certifying wp(u) = m at
    // three approximants past the center
    let needed = center_index + 1 + 3;
    if at.len() < needed {
        *at = extend(at, needed - at.len())?;
    }
    let mut absorbed = Vec::new();
    for i in 1..=n {
        let a = coefficients[i].clone();
        if a.is_zero_at_prec() {
            continue;
        }
        let v = a.value()?;
        if !v.is_positive() {
            continue;
        }
        let mut certified_at = Vec::new();
        for (cnu, gnu) in at.approximants.iter().skip(center_index + 1).take(3) {
            let z_eval = cnu.sub(&c)?.div(&d)?;
            let m_eval = a.mul(&z_eval.pow(i as u64)?)?;
            // wp(X) - m has the simple residue root 0 since v(m) > 0
            let poly = Poly::new(
                model.clone(),
                vec![
                    m_eval.neg(),
                    FieldElement::one(&model).neg(),
                    FieldElement::zero(&model),
                ],
            );
            let mut coeffs = poly.coeffs.clone();
            coeffs.resize(p as usize + 1, FieldElement::zero(&model));
            coeffs[p as usize] = FieldElement::one(&model);
            let wp_poly = Poly::new(model.clone(), coeffs);
            let target = v.add(&Value::rank1(rat_int(2)))?;
            hensel_lift(&wp_poly, &model.residue_field().zero(), &target)?;
            certified_at.push(gnu.clone());
        }
        absorbed.push(AbsorbedTerm { coefficient: a, index: i, certified_at });
        coefficients[i] = FieldElement::zero(&model);
    }

    // materialize W in x: the x-fold witness plus each Taylor-fold witness
    // term evaluated at the chosen center
    let base = Poly::new(model.clone(), vec![c.neg(), FieldElement::one(&model)]);
    let mut witness = x_witness;
    for t in &folded.witness_terms {
        witness = witness.add(&base.pow(t.power)?.scale(&t.coefficient_at(&c)?)?)?;
    }

    let i0 = least_value_index(&coefficients)?;
    let nf = ASNormalForm {
        c,
        d,
        vxc: gamma,
        coefficients,
        i0,
        witness: WpClassElement { witness, absorbed },
    };
    check_shape(&nf, p)?;
    Ok(nf)
}

fn least_value_index(coefficients: &[FieldElement]) -> Result<Option<usize>, AsnfError> {
    let mut best: Option<(usize, Value)> = None;
    for (i, a) in coefficients.iter().enumerate().skip(1) {
        if a.is_zero_at_prec() {
            continue;
        }
        let v = a.value()?;
        best = match best {
            None => Some((i, v)),
            Some((bi, bv)) => {
                if compare(&v, &bv)? == std::cmp::Ordering::Less {
                    Some((i, v))
                } else {
                    Some((bi, bv))
                }
            }
        };
    }
    Ok(best.map(|(i, _)| i))
}

/// The four (nfh) shape requirements.
fn check_shape(nf: &ASNormalForm, p: u64) -> Result<(), AsnfError> {
    if compare(&nf.d.value()?, &nf.vxc)? != std::cmp::Ordering::Equal {
        return Err(AsnfError::Shape("v(d) != v(x - c), so v(z) != 0".into()));
    }
    let mut seen: Vec<Value> = Vec::new();
    for (i, a) in nf.coefficients.iter().enumerate().skip(1) {
        if a.is_zero_at_prec() {
            continue;
        }
        if (i as u64) % p == 0 {
            return Err(AsnfError::Shape(format!("nonzero coefficient at p-divisible index {}", i)));
        }
        let v = a.value()?;
        if !matches!(compare(&v, &Value::zero(1))?, std::cmp::Ordering::Less) {
            return Err(AsnfError::Shape(format!("v(a_{}) is not negative", i)));
        }
        for s in &seen {
            if compare(&v, s)? == std::cmp::Ordering::Equal {
                return Err(AsnfError::Shape("tail coefficient values are not distinct".into()));
            }
        }
        seen.push(v);
    }
    Ok(())
}

/// Exact witness identity f(x) - g(z) - wp(W) - sum(absorbed) = 0 after
/// substituting z = (x - c)/d, as polynomials in x.
pub fn verify_normal_form(f: &Poly, nf: &ASNormalForm) -> Result<bool, AsnfError> {
    let model = f.model.clone();
    let dinv = nf.d.inv()?;
    let shift = nf.c.neg().mul(&dinv)?;
    let g = nf.g_poly(&model).compose_linear(&dinv, &shift)?;
    let mut lhs = f.sub(&g)?.sub(&wp_poly(&nf.witness.witness)?)?;
    for term in &nf.witness.absorbed {
        let m = Poly::monomial(term.coefficient.clone(), term.index)
            .compose_linear(&dinv, &shift)?;
        lhs = lhs.sub(&m)?;
    }
    Ok(lhs.coeffs.iter().all(|a| a.is_zero_at_prec()))
}

/// Verdict of the unique-least-value generator criterion.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorVerdict {
    Holds { i0: usize },
    Fails { reason: String },
}

/// Holds iff some i0 in [1, n] with p not dividing i0 carries the strictly
/// least value among all nonzero tail coefficients.
pub fn generator_criterion(
    coefficients: &[FieldElement],
    p: u64,
) -> Result<GeneratorVerdict, AsnfError> {
    let mut least: Option<(usize, Value, bool)> = None; // (index, value, unique)
    for (i, a) in coefficients.iter().enumerate().skip(1) {
        if a.is_zero_at_prec() && matches!(a.precision(), Prec::Unbounded) {
            continue;
        }
        if a.is_zero_at_prec() {
            return Err(AsnfError::Field(FieldError::InsufficientPrecision(
                format!("coefficient a_{} is indistinguishable from 0", i),
            )));
        }
        let v = a.value()?;
        least = match least {
            None => Some((i, v, true)),
            Some((bi, bv, uniq)) => match compare(&v, &bv)? {
                std::cmp::Ordering::Less => Some((i, v, true)),
                std::cmp::Ordering::Equal => Some((bi, bv, false)),
                std::cmp::Ordering::Greater => Some((bi, bv, uniq)),
            },
        };
    }
    Ok(match least {
        None => GeneratorVerdict::Fails { reason: "no nonzero tail coefficient".into() },
        Some((_, _, false)) => {
            GeneratorVerdict::Fails { reason: "least value is not unique".into() }
        }
        Some((i, _, true)) if (i as u64) % p == 0 => GeneratorVerdict::Fails {
            reason: "least-value index is divisible by p".into(),
        },
        Some((i, _, true)) => GeneratorVerdict::Holds { i0: i },
    })
}

/// Outcome of the degree-p reduction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum ReductionOutcome {
    /// The normal form is a valid new generator: for theta with
    /// wp(theta) = f(x), theta' = theta - W (up to absorbed Hensel parts)
    /// satisfies wp(theta') = g(z), and the generator criterion holds at i0.
    NewGenerator { normal_form: ASNormalForm, i0: usize },
    /// g is constant: the class is defined over the base field already.
    Degenerate { normal_form: ASNormalForm },
    /// g is non-constant but the criterion hypothesis fails.
    CriterionFails { normal_form: ASNormalForm, reason: String },
}

pub fn reduce_degree_p_extension(
    f: &Poly,
    at: &mut ApproximationType,
    confirmations: usize,
) -> Result<ReductionOutcome, AsnfError> {
    let p = f.model.residue_char();
    let nf = as_normal_form(f, at, confirmations)?;
    let tail_empty = nf
        .coefficients
        .iter()
        .skip(1)
        .all(|a| a.is_zero_at_prec());
    if tail_empty {
        return Ok(ReductionOutcome::Degenerate { normal_form: nf });
    }
    match generator_criterion(&nf.coefficients, p)? {
        GeneratorVerdict::Holds { i0 } => {
            Ok(ReductionOutcome::NewGenerator { normal_form: nf, i0 })
        }
        GeneratorVerdict::Fails { reason } => {
            Ok(ReductionOutcome::CriterionFails { normal_form: nf, reason })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::default_xi;
    use crate::ordval::rat;

    fn hull() -> Arc<FieldModel> {
        FieldModel::perfect_hull(2, 1)
    }

    fn mono(model: &Arc<FieldModel>, num: i64, den: i64) -> FieldElement {
        FieldElement::monomial(
            model,
            &model.residue_field().one(),
            Exponent::rank1(rat(num, den)),
        )
    }

    fn stream(model: &Arc<FieldModel>) -> ApproximationType {
        ApproximationType::from_ambient(default_xi(model, 12))
    }

    #[test]
    fn wp_basics() {
        let m = hull();
        let a = mono(&m, -1, 1);
        assert_eq!(wp_element(&a).unwrap().render(), "t^-2 + t^-1");
        assert!(wp_element(&FieldElement::zero(&m)).unwrap().is_zero_at_prec());
        assert!(wp_element(&FieldElement::one(&m)).unwrap().is_zero_at_prec());
    }

    #[test]
    fn hasse_taylor_char2() {
        let m = hull();
        // X^3: [X0^3, X0^2, X0, 1]
        let f = Poly::monomial(FieldElement::one(&m), 3);
        let t = hasse_taylor(&f).unwrap();
        let render: Vec<_> = t.iter().map(|p| p.render("X0")).collect();
        assert_eq!(render, vec!["X0^3", "X0^2", "X0", "1"]);
        // X^4: middle binomials vanish mod 2
        let f = Poly::monomial(FieldElement::one(&m), 4);
        let t = hasse_taylor(&f).unwrap();
        let render: Vec<_> = t.iter().map(|p| p.render("X0")).collect();
        assert_eq!(render, vec!["X0^4", "0", "0", "0", "1"]);
        // X^2 + X: [X0^2 + X0, 1, 1]
        let f = Poly::new(
            m.clone(),
            vec![FieldElement::zero(&m), FieldElement::one(&m), FieldElement::one(&m)],
        );
        let t = hasse_taylor(&f).unwrap();
        let render: Vec<_> = t.iter().map(|p| p.render("X0")).collect();
        assert_eq!(render, vec!["X0 + X0^2", "1", "1"]);
    }

    #[test]
    fn fold_cubic() {
        let m = hull();
        let f = Poly::monomial(FieldElement::one(&m), 3);
        let taylor = hasse_taylor(&f).unwrap();
        let folded = fold_p_indices(&taylor, &m).unwrap();
        // j = 1 collects f_1 = X0^2 and the folded f_2 = X0 at depth 1
        let j1 = &folded.exprs[&1];
        assert_eq!(j1.len(), 2);
        assert_eq!((j1[0].nu, j1[0].poly.render("X0")), (0, "X0^2".into()));
        assert_eq!((j1[1].nu, j1[1].poly.render("X0")), (1, "X0".into()));
        // j = 3 keeps the leading 1
        assert_eq!(folded.exprs[&3].len(), 1);
        // at c = t^2: b_1 = t^4 + t (root of t^2)
        let c = mono(&m, 2, 1);
        assert_eq!(folded.coefficient_at(1, &c).unwrap().render(), "t + t^4");
        assert!(verify_fold(&taylor, &folded, &c).unwrap());
    }

    #[test]
    fn fold_quartic_double() {
        let m = hull();
        let f = Poly::monomial(FieldElement::one(&m), 4);
        let taylor = hasse_taylor(&f).unwrap();
        let folded = fold_p_indices(&taylor, &m).unwrap();
        // the i = 4 term folds twice onto j = 1 with coefficient 1^(1/4) = 1
        let j1 = &folded.exprs[&1];
        assert_eq!(j1.len(), 1);
        assert_eq!(j1[0].nu, 2);
        let c = mono(&m, 1, 2);
        assert_eq!(folded.coefficient_at(1, &c).unwrap().render(), "1");
        assert!(verify_fold(&taylor, &folded, &c).unwrap());
        // linear polynomials are untouched
        let lin = Poly::x(&m);
        let t = hasse_taylor(&lin).unwrap();
        let folded = fold_p_indices(&t, &m).unwrap();
        assert_eq!(folded.exprs[&1].len(), 1);
        assert_eq!(folded.exprs[&1][0].nu, 0);
        assert!(folded.witness_terms.is_empty());
    }

    #[test]
    fn normal_form_worked_instance() {
        // f = t^-3 x^2 -> g = t^(-3/2) + t^-1 z at c = 1, d = t^(1/2)
        let m = hull();
        let f = Poly::monomial(mono(&m, -3, 1), 2);
        let mut at = stream(&m);
        let nf = as_normal_form(&f, &mut at, 3).unwrap();
        assert_eq!(nf.c.render(), "1");
        assert_eq!(nf.d.render(), "t^(1/2)");
        assert_eq!(nf.coefficients[0].render(), "t^(-3/2)");
        assert_eq!(nf.coefficients[1].render(), "t^-1");
        assert_eq!(nf.i0, Some(1));
        assert!(nf.witness.absorbed.is_empty());
        assert_eq!(nf.witness.witness.render("x"), "(t^(-3/2)) * x");
        assert!(verify_normal_form(&f, &nf).unwrap());
    }

    #[test]
    fn normal_form_absorption_instance() {
        // f = x^2 + t -> constant g = 1 + t with t^(1/2) z absorbed
        let m = hull();
        let f = Poly::new(
            m.clone(),
            vec![mono(&m, 1, 1), FieldElement::zero(&m), FieldElement::one(&m)],
        );
        let mut at = stream(&m);
        let nf = as_normal_form(&f, &mut at, 3).unwrap();
        assert_eq!(nf.coefficients[0].render(), "1 + t");
        assert!(nf.coefficients.iter().skip(1).all(|a| a.is_zero_at_prec()));
        assert_eq!(nf.witness.witness.render("x"), "x");
        assert_eq!(nf.witness.absorbed.len(), 1);
        assert_eq!(nf.witness.absorbed[0].index, 1);
        assert_eq!(nf.witness.absorbed[0].coefficient.render(), "t^(1/2)");
        assert_eq!(nf.witness.absorbed[0].certified_at.len(), 3);
        assert!(verify_normal_form(&f, &nf).unwrap());
        // the reduction pipeline reports this as degenerate
        let mut at = stream(&m);
        let out = reduce_degree_p_extension(&f, &mut at, 3).unwrap();
        assert!(matches!(out, ReductionOutcome::Degenerate { .. }));
    }

    #[test]
    fn normal_form_wp_image_is_zero() {
        let m = hull();
        // f = wp(x) = x^2 + x
        let f = wp_poly(&Poly::x(&m)).unwrap();
        let mut at = stream(&m);
        let nf = as_normal_form(&f, &mut at, 3).unwrap();
        assert!(nf.coefficients.iter().all(|a| a.is_zero_at_prec()));
        assert!(verify_normal_form(&f, &nf).unwrap());
        let mut at = stream(&m);
        let out = reduce_degree_p_extension(&f, &mut at, 3).unwrap();
        assert!(matches!(out, ReductionOutcome::Degenerate { .. }));
    }

    #[test]
    fn generator_criterion_cases() {
        let m = hull();
        let z = FieldElement::zero(&m);
        // single odd-index tail coefficient
        let v = generator_criterion(&[mono(&m, -3, 2), mono(&m, -1, 1)], 2).unwrap();
        assert_eq!(v, GeneratorVerdict::Holds { i0: 1 });
        // only an even index
        let v = generator_criterion(&[z.clone(), z.clone(), mono(&m, -1, 1)], 2).unwrap();
        assert!(matches!(v, GeneratorVerdict::Fails { .. }));
        // tie in least value
        let v = generator_criterion(
            &[z.clone(), mono(&m, -1, 1), z.clone(), mono(&m, -1, 1)],
            2,
        )
        .unwrap();
        assert!(matches!(v, GeneratorVerdict::Fails { .. }));
    }

    #[test]
    fn reduction_certificate_for_worked_instance() {
        let m = hull();
        let f = Poly::monomial(mono(&m, -3, 1), 2);
        let mut at = stream(&m);
        let out = reduce_degree_p_extension(&f, &mut at, 3).unwrap();
        match out {
            ReductionOutcome::NewGenerator { normal_form, i0 } => {
                assert_eq!(i0, 1);
                assert_eq!(normal_form.coefficients[0].render(), "t^(-3/2)");
            }
            other => panic!("unexpected outcome: {:?}", other),
        }
    }
}
