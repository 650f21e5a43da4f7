//! Dense univariate polynomials over a field model, plus the residue
//! polynomial over F_q used for Hensel-style checks. Hasse (divided)
//! derivatives are provided directly since ordinary derivatives degenerate
//! in small characteristic.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::fieldcore::{FieldElement, FieldError, FieldModel};
use crate::fq::{Fq, FqElem};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub model: Arc<FieldModel>,
    /// coeffs[i] is the coefficient of X^i; trailing coefficients that are
    /// zero at their precision are trimmed.
    pub coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn new(model: Arc<FieldModel>, mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero_at_prec()) {
            coeffs.pop();
        }
        Poly { model, coeffs }
    }

    pub fn zero(model: &Arc<FieldModel>) -> Poly {
        Poly { model: model.clone(), coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Poly {
        Poly::new(c.model.clone(), vec![c])
    }

    /// The monomial c X^i.
    pub fn monomial(c: FieldElement, i: usize) -> Poly {
        let model = c.model.clone();
        let mut coeffs = vec![FieldElement::zero(&model); i];
        coeffs.push(c);
        Poly::new(model, coeffs)
    }

    /// X itself.
    pub fn x(model: &Arc<FieldModel>) -> Poly {
        Poly::monomial(FieldElement::one(model), 1)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.model))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, FieldError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i))?);
        }
        Ok(Poly::new(self.model.clone(), out))
    }

    pub fn neg(&self) -> Poly {
        Poly {
            model: self.model.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, FieldError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, FieldError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.model));
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![FieldElement::zero(&self.model); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(Poly::new(self.model.clone(), out))
    }

    pub fn scale(&self, s: &FieldElement) -> Result<Poly, FieldError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.mul(s)?);
        }
        Ok(Poly::new(self.model.clone(), out))
    }

    pub fn pow(&self, e: u64) -> Result<Poly, FieldError> {
        let mut acc = Poly::constant(FieldElement::one(&self.model));
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        let mut acc = FieldElement::zero(&self.model);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    /// Substitute X := a*Y + b, returning a polynomial in Y.
    pub fn compose_linear(&self, a: &FieldElement, b: &FieldElement) -> Result<Poly, FieldError> {
        let lin = Poly::new(
            self.model.clone(),
            vec![b.clone(), a.clone()],
        );
        let mut acc = Poly::zero(&self.model);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin)?.add(&Poly::constant(c.clone()))?;
        }
        Ok(acc)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Result<Poly, FieldError> {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let n = FieldElement::from_int(&self.model, i as i64);
            out.push(c.mul(&n)?);
        }
        Ok(Poly::new(self.model.clone(), out))
    }

    /// i-th Hasse derivative: sum_j binom(j, i) c_j X^(j-i), the divided
    /// derivative f^(i)/i! computed without dividing by i!.
    pub fn hasse_derivative(&self, i: usize) -> Result<Poly, FieldError> {
        let mut out = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate().skip(i) {
            let b = binomial(j as u64, i as u64);
            let bf = big_to_elem(&self.model, &b);
            out.push(c.mul(&bf)?);
        }
        Ok(Poly::new(self.model.clone(), out))
    }

    /// The image under the Artin-Schreier operator: f^p - f (coefficientwise
    /// composition is NOT intended here; this is the polynomial identity).
    pub fn wp(&self) -> Result<Poly, FieldError> {
        let p = self.model.residue_char();
        self.pow(p)?.sub(self)
    }

    /// Residue polynomial over F_q; requires all coefficients integral.
    pub fn residue_poly(&self) -> Result<ResiduePoly, FieldError> {
        let fq = self.model.residue_field();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            match c.residue() {
                Ok(r) => coeffs.push(r),
                Err(FieldError::NegativeValue) => {
                    return Err(FieldError::NonIntegralCoefficients)
                }
                Err(e) => return Err(e),
            }
        }
        Ok(ResiduePoly::new(fq, coeffs))
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero_at_prec() && !matches!(c.precision(), crate::fieldcore::Prec::Unbounded) {
                // keep explicitly imprecise zeros visible
            } else if c.is_zero_at_prec() {
                continue;
            }
            let cs = c.render();
            let body = match i {
                0 => cs,
                1 if cs == "1" => var.to_string(),
                1 => format!("({}) * {}", cs, var),
                _ if cs == "1" => format!("{}^{}", var, i),
                _ => format!("({}) * {}^{}", cs, var, i),
            };
            parts.push(body);
        }
        parts.join(" + ")
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn big_to_elem(model: &Arc<FieldModel>, n: &BigInt) -> FieldElement {
    match &**model {
        FieldModel::Padic { .. } => {
            FieldElement::padic_from_bigint(model, n.clone(), crate::fieldcore::padic::DEFAULT_PREC)
        }
        _ => {
            let fq = model.residue_field();
            let r = num_integer::Integer::mod_floor(n, &BigInt::from(fq.p));
            FieldElement::from_residue_const(model, &fq.from_u64(u64::try_from(r).unwrap()))
        }
    }
}

/// Polynomial over the residue field.
#[derive(Debug, Clone, PartialEq)]
pub struct ResiduePoly {
    pub fq: Fq,
    pub coeffs: Vec<FqElem>,
}

impl ResiduePoly {
    pub fn new(fq: Fq, mut coeffs: Vec<FqElem>) -> ResiduePoly {
        while coeffs.last().is_some_and(|c| fq.is_zero(c)) {
            coeffs.pop();
        }
        ResiduePoly { fq, coeffs }
    }

    pub fn eval(&self, x: &FqElem) -> FqElem {
        let mut acc = self.fq.zero();
        for c in self.coeffs.iter().rev() {
            acc = self.fq.add(&self.fq.mul(&acc, x), c);
        }
        acc
    }

    pub fn derivative(&self) -> ResiduePoly {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let n = self.fq.from_u64(i as u64);
            out.push(self.fq.mul(c, &n));
        }
        ResiduePoly::new(self.fq.clone(), out)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn roots(&self) -> Vec<FqElem> {
        self.fq
            .elements()
            .filter(|x| self.fq.is_zero(&self.eval(x)))
            .collect()
    }
}
