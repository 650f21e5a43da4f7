//! Ordered abelian value groups (rank 1 and lex rank 2) and the delta
//! value calculus: delta(gamma) = vp + gamma/p, its iterates, and the
//! value law v(Delta(a)) = delta(va).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdvalError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("operation requires a finite value")]
    InfiniteInput,
    #[error("operation is defined on rank-1 values only")]
    NotRank1,
    #[error("value group is not p-divisible for p = {0}")]
    NonPDivisibleGroup(u32),
    #[error("value violates the group divisibility constraint")]
    DivisibilityViolation,
    #[error("cannot parse value: {0}")]
    Parse(String),
}

/// Element of an ordered abelian group with a maximal absorbing infinity.
/// Finite values are tuples of exact rationals, compared lexicographically;
/// length 1 for rank 1, length 2 for lex rank 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(Vec<BigRational>),
    Infinity,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

impl Value {
    pub fn rank1(q: BigRational) -> Value {
        Value::Finite(vec![q])
    }

    pub fn rank1_int(n: i64) -> Value {
        Value::rank1(rat_int(n))
    }

    pub fn rank2(a: BigRational, b: BigRational) -> Value {
        Value::Finite(vec![a, b])
    }

    pub fn zero(rank: usize) -> Value {
        Value::Finite(vec![BigRational::zero(); rank])
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            Value::Finite(c) => Some(c.len()),
            Value::Infinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Finite(_))
    }

    /// The single coordinate of a finite rank-1 value.
    pub fn as_rank1(&self) -> Result<&BigRational, OrdvalError> {
        match self {
            Value::Finite(c) if c.len() == 1 => Ok(&c[0]),
            Value::Finite(_) => Err(OrdvalError::NotRank1),
            Value::Infinity => Err(OrdvalError::InfiniteInput),
        }
    }

    pub fn coords(&self) -> Result<&[BigRational], OrdvalError> {
        match self {
            Value::Finite(c) => Ok(c),
            Value::Infinity => Err(OrdvalError::InfiniteInput),
        }
    }

    /// Componentwise addition; infinity is absorbing.
    pub fn add(&self, other: &Value) -> Result<Value, OrdvalError> {
        match (self, other) {
            (Value::Infinity, _) | (_, Value::Infinity) => Ok(Value::Infinity),
            (Value::Finite(a), Value::Finite(b)) => {
                if a.len() != b.len() {
                    return Err(OrdvalError::RankMismatch(a.len(), b.len()));
                }
                Ok(Value::Finite(
                    a.iter().zip(b).map(|(x, y)| x + y).collect(),
                ))
            }
        }
    }

    pub fn neg(&self) -> Result<Value, OrdvalError> {
        match self {
            Value::Infinity => Err(OrdvalError::InfiniteInput),
            Value::Finite(a) => Ok(Value::Finite(a.iter().map(|x| -x).collect())),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Result<Value, OrdvalError> {
        match self {
            Value::Infinity => Ok(Value::Infinity),
            Value::Finite(a) => Ok(Value::Finite(a.iter().map(|x| x * q).collect())),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Value::Finite(c) if c.iter().all(|x| x.is_zero()))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Infinity => true,
            v => compare(v, &Value::zero(v.rank().unwrap())).unwrap() == Ordering::Greater,
        }
    }
}

/// Total order: lexicographic on coordinates, infinity strictly maximal.
pub fn compare(a: &Value, b: &Value) -> Result<Ordering, OrdvalError> {
    match (a, b) {
        (Value::Infinity, Value::Infinity) => Ok(Ordering::Equal),
        (Value::Infinity, Value::Finite(_)) => Ok(Ordering::Greater),
        (Value::Finite(_), Value::Infinity) => Ok(Ordering::Less),
        (Value::Finite(x), Value::Finite(y)) => {
            if x.len() != y.len() {
                return Err(OrdvalError::RankMismatch(x.len(), y.len()));
            }
            Ok(x.cmp(y))
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Infinity => write!(f, "inf"),
            Value::Finite(c) if c.len() == 1 => write!(f, "{}", c[0]),
            Value::Finite(c) => {
                write!(f, "(")?;
                for (i, q) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", q)?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, OrdvalError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| OrdvalError::Parse(s.to_string()))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| OrdvalError::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(OrdvalError::Parse(s.to_string()));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|_| OrdvalError::Parse(s.to_string()))?;
        Ok(BigRational::from(n))
    }
}

impl FromStr for Value {
    type Err = OrdvalError;

    /// Textual syntax: `3/2`, `inf`, `(1, -2/3)` for rank 2.
    fn from_str(s: &str) -> Result<Value, OrdvalError> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Value::Infinity);
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let coords: Result<Vec<_>, _> = inner.split(',').map(parse_rational).collect();
            let coords = coords?;
            if coords.len() != 2 {
                return Err(OrdvalError::Parse(s.to_string()));
            }
            return Ok(Value::Finite(coords));
        }
        Ok(Value::rank1(parse_rational(s)?))
    }
}

/// Per-coordinate divisibility constraint of a value group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divisibility {
    Integers,
    /// Rationals whose denominator is a power of p.
    PDivisibleIntegers(u32),
    Rationals,
}

impl Divisibility {
    pub fn accepts(&self, q: &BigRational) -> bool {
        match self {
            Divisibility::Rationals => true,
            Divisibility::Integers => q.denom().is_one(),
            Divisibility::PDivisibleIntegers(p) => {
                let p = BigInt::from(*p);
                let mut d = q.denom().abs();
                while (&d % &p).is_zero() {
                    d /= &p;
                }
                d.is_one()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub divisibility: Vec<Divisibility>,
}

impl GroupDescriptor {
    pub fn rank1(d: Divisibility) -> GroupDescriptor {
        GroupDescriptor { divisibility: vec![d] }
    }

    pub fn rank2(d0: Divisibility, d1: Divisibility) -> GroupDescriptor {
        GroupDescriptor { divisibility: vec![d0, d1] }
    }

    pub fn rank(&self) -> usize {
        self.divisibility.len()
    }

    pub fn accepts(&self, v: &Value) -> bool {
        match v {
            Value::Infinity => true,
            Value::Finite(c) => {
                c.len() == self.divisibility.len()
                    && c.iter().zip(&self.divisibility).all(|(q, d)| d.accepts(q))
            }
        }
    }

    pub fn is_p_divisible(&self, p: u32) -> bool {
        self.divisibility.iter().all(|d| {
            matches!(d, Divisibility::Rationals)
                || matches!(d, Divisibility::PDivisibleIntegers(q) if *q == p)
        })
    }
}

/// Context for the delta function delta(gamma) = vp + gamma/p on a
/// rank-1 p-divisible value group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaContext {
    pub p: u32,
    pub vp: BigRational,
}

impl DeltaContext {
    pub fn new(p: u32, vp: BigRational) -> DeltaContext {
        assert!(p >= 2, "p must be a prime >= 2");
        assert!(vp.is_positive(), "vp must be positive");
        DeltaContext { p, vp }
    }

    /// The unique fixed point (p/(p-1)) vp of delta.
    pub fn fixed_point(&self) -> BigRational {
        &self.vp * rat(self.p as i64, self.p as i64 - 1)
    }

    /// delta(gamma) = vp + gamma/p.
    pub fn delta(&self, gamma: &Value) -> Result<Value, OrdvalError> {
        let g = gamma.as_rank1()?;
        Ok(Value::rank1(&self.vp + g / rat_int(self.p as i64)))
    }

    /// delta^i(0) = ((1 + p + ... + p^{i-1}) / p^{i-1}) vp for i >= 1,
    /// 0 for i = 0, and the inverse closed form for i < 0.
    pub fn delta_iter_zero(&self, i: i64) -> BigRational {
        if i == 0 {
            return BigRational::zero();
        }
        if i > 0 {
            let p = BigInt::from(self.p);
            // (p^i - 1)/(p - 1) / p^{i-1}
            let num = p.pow(i as u32) - BigInt::one();
            let den = (&p - BigInt::one()) * p.pow(i as u32 - 1);
            BigRational::new(num, den) * &self.vp
        } else {
            // delta^{-i}(delta^i(0)) = 0  =>  delta^{-i}(0) = -p^i * delta^i(0)
            let j = -i;
            let pj = BigRational::from(BigInt::from(self.p).pow(j as u32));
            -(self.delta_iter_zero(j) * pj)
        }
    }

    /// delta^i(gamma) = delta^i(0) + gamma / p^i (any sign of i).
    pub fn delta_iter(&self, i: i64, gamma: &Value) -> Result<Value, OrdvalError> {
        let g = gamma.as_rank1()?;
        let p = BigInt::from(self.p);
        let scale = if i >= 0 {
            BigRational::new(BigInt::one(), p.pow(i as u32))
        } else {
            BigRational::from(p.pow((-i) as u32))
        };
        Ok(Value::rank1(self.delta_iter_zero(i) + g * scale))
    }

    /// Value law for the Delta operator: v(Delta(a)) = v(-p a^{1/p}) = delta(va).
    /// Requires the ambient group to be p-divisible.
    pub fn delta_value_law(
        &self,
        group: &GroupDescriptor,
        va: &Value,
    ) -> Result<Value, OrdvalError> {
        if !group.is_p_divisible(self.p) {
            return Err(OrdvalError::NonPDivisibleGroup(self.p));
        }
        self.delta(va)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_examples() {
        let z = Value::rank1_int(0);
        assert_eq!(compare(&z, &z).unwrap(), Ordering::Equal);
        let a = Value::rank2(rat_int(1), rat_int(0));
        let b = Value::rank2(rat_int(0), rat_int(5));
        assert_eq!(compare(&a, &b).unwrap(), Ordering::Greater);
        let big = Value::rank1_int(1_000_000);
        assert_eq!(compare(&Value::Infinity, &big).unwrap(), Ordering::Greater);
    }

    #[test]
    fn compare_rank_mismatch() {
        let a = Value::rank1_int(1);
        let b = Value::rank2(rat_int(1), rat_int(0));
        assert!(matches!(compare(&a, &b), Err(OrdvalError::RankMismatch(1, 2))));
    }

    #[test]
    fn delta_examples() {
        let ctx = DeltaContext::new(2, rat_int(1));
        assert_eq!(ctx.delta(&Value::rank1_int(0)).unwrap(), Value::rank1_int(1));
        // fixed point at (p/(p-1)) vp = 2
        assert_eq!(ctx.delta(&Value::rank1_int(2)).unwrap(), Value::rank1_int(2));
        let ctx3 = DeltaContext::new(3, rat_int(1));
        assert_eq!(ctx3.delta(&Value::rank1_int(3)).unwrap(), Value::rank1_int(2));
        assert!(ctx.delta(&Value::Infinity).is_err());
    }

    #[test]
    fn delta_iter_examples() {
        let ctx = DeltaContext::new(2, rat_int(1));
        // delta^2(0) = (1+2)/2
        assert_eq!(
            ctx.delta_iter(2, &Value::rank1_int(0)).unwrap(),
            Value::rank1(rat(3, 2))
        );
        // invert delta(1) = 3/2
        assert_eq!(
            ctx.delta_iter(-1, &Value::rank1(rat(3, 2))).unwrap(),
            Value::rank1_int(1)
        );
        let g = Value::rank1(rat(7, 4));
        assert_eq!(ctx.delta_iter(0, &g).unwrap(), g);
    }

    #[test]
    fn delta_value_law_examples() {
        let ctx = DeltaContext::new(2, rat_int(1));
        let grp = GroupDescriptor::rank1(Divisibility::Rationals);
        // v(-2 a^{1/2}) = 1 + 4/2
        assert_eq!(
            ctx.delta_value_law(&grp, &Value::rank1_int(4)).unwrap(),
            Value::rank1_int(3)
        );
        assert_eq!(
            ctx.delta_value_law(&grp, &Value::rank1_int(2)).unwrap(),
            Value::rank1_int(2)
        );
        let ctx3 = DeltaContext::new(3, rat_int(1));
        let grp3 = GroupDescriptor::rank1(Divisibility::PDivisibleIntegers(3));
        assert_eq!(
            ctx3.delta_value_law(&grp3, &Value::rank1_int(0)).unwrap(),
            Value::rank1_int(1)
        );
        let ints = GroupDescriptor::rank1(Divisibility::Integers);
        assert!(ctx.delta_value_law(&ints, &Value::rank1_int(4)).is_err());
    }

    #[test]
    fn divisibility() {
        let d = Divisibility::PDivisibleIntegers(2);
        assert!(d.accepts(&rat(3, 4)));
        assert!(!d.accepts(&rat(1, 3)));
        assert!(Divisibility::Integers.accepts(&rat_int(-7)));
        assert!(!Divisibility::Integers.accepts(&rat(1, 2)));
    }

    #[test]
    fn value_text_roundtrip() {
        for s in ["3/2", "inf", "-5", "(1, -2/3)"] {
            let v: Value = s.parse().unwrap();
            let v2: Value = v.to_string().parse().unwrap();
            assert_eq!(v, v2);
        }
    }
}
