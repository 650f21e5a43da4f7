//! Finite fields F_{p^k} built as polynomial quotients over a fixed,
//! deterministically chosen table of irreducible polynomials, so that
//! coefficient arithmetic is reproducible across implementations.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FqError {
    #[error("no irreducible polynomial in the shipped table for p={0}, k={1}")]
    NoTableEntry(u64, usize),
    #[error("division by zero in F_q")]
    DivisionByZero,
    #[error("field mismatch")]
    FieldMismatch,
}

/// Shipped irreducible polynomials, low-degree coefficients first,
/// degree-k coefficient (always 1) omitted.
const IRREDUCIBLE_TABLE: &[(u64, usize, &[u64])] = &[
    (2, 1, &[0]),             // x
    (2, 2, &[1, 1]),          // x^2 + x + 1
    (2, 3, &[1, 1, 0]),       // x^3 + x + 1
    (2, 4, &[1, 1, 0, 0]),    // x^4 + x + 1
    (3, 1, &[0]),             // x
    (3, 2, &[1, 0]),          // x^2 + 1
    (3, 3, &[1, 2, 0]),       // x^3 + 2x + 1
    (5, 1, &[0]),             // x
    (5, 2, &[2, 0]),          // x^2 + 2
    (5, 3, &[1, 1, 0]),       // x^3 + x + 1
];

/// Descriptor of F_{p^k}. For k = 1 the modulus is the trivial `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fq {
    pub p: u64,
    pub k: usize,
    /// Low k coefficients of the monic degree-k modulus.
    modulus: Vec<u64>,
}

/// Element of F_{p^k}: k coefficients mod p in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqElem(pub Vec<u64>);

impl Fq {
    pub fn new(p: u64, k: usize) -> Result<Fq, FqError> {
        for (tp, tk, m) in IRREDUCIBLE_TABLE {
            if *tp == p && *tk == k {
                return Ok(Fq { p, k, modulus: m.to_vec() });
            }
        }
        Err(FqError::NoTableEntry(p, k))
    }

    pub fn prime(p: u64) -> Fq {
        Fq { p, k: 1, modulus: vec![0] }
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn zero(&self) -> FqElem {
        FqElem(vec![0; self.k])
    }

    pub fn one(&self) -> FqElem {
        let mut v = vec![0; self.k];
        v[0] = 1;
        FqElem(v)
    }

    pub fn from_u64(&self, n: u64) -> FqElem {
        let mut v = vec![0; self.k];
        v[0] = n % self.p;
        FqElem(v)
    }

    pub fn from_i64(&self, n: i64) -> FqElem {
        let m = n.rem_euclid(self.p as i64) as u64;
        self.from_u64(m)
    }

    /// Element from its index in [0, p^k): base-p digits are the coefficients.
    pub fn from_index(&self, mut idx: u64) -> FqElem {
        let mut v = vec![0; self.k];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FqElem(v)
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        FqElem(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        // schoolbook product, then reduce modulo the table polynomial
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for i in (self.k..2 * self.k).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            // x^k = -modulus_low  =>  x^i = -modulus_low * x^{i-k}
            for (j, &m) in self.modulus.iter().enumerate() {
                let t = (c * (self.p - m % self.p)) % self.p;
                prod[i - self.k + j] = (prod[i - self.k + j] + t) % self.p;
            }
        }
        prod.truncate(self.k);
        FqElem(prod)
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem, FqError> {
        if self.is_zero(a) {
            return Err(FqError::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    pub fn frobenius(&self, a: &FqElem) -> FqElem {
        self.pow(a, self.p)
    }

    /// Unique p-th root: the inverse of Frobenius, a^{p^{k-1}}.
    pub fn pth_root(&self, a: &FqElem) -> FqElem {
        self.pow(a, self.p.pow(self.k as u32 - 1))
    }

    /// All elements, for small exhaustive sweeps.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.order()).map(|i| self.from_index(i))
    }
}

impl FqElem {
    /// Display form: single digit for prime fields, `[c0,c1,..]` otherwise.
    pub fn render(&self) -> String {
        if self.0.len() == 1 {
            format!("{}", self.0[0])
        } else {
            format!(
                "[{}]",
                self.0
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_arithmetic() {
        let f4 = Fq::new(2, 2).unwrap();
        let g = f4.from_index(2); // x
        let g2 = f4.mul(&g, &g); // x^2 = x + 1
        assert_eq!(g2, f4.from_index(3));
        let inv = f4.inv(&g).unwrap();
        assert_eq!(f4.mul(&g, &inv), f4.one());
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        for (p, k) in [(2u64, 3usize), (3, 2), (5, 2)] {
            let f = Fq::new(p, k).unwrap();
            for a in f.elements() {
                let r = f.pth_root(&a);
                assert_eq!(f.pow(&r, p), a);
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        let f = Fq::new(3, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                if !f.is_zero(&b) {
                    let q = f.mul(&a, &f.inv(&b).unwrap());
                    assert_eq!(f.mul(&q, &b), a);
                }
            }
        }
    }
}
