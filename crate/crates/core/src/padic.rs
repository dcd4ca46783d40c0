//! Truncated p-adic numbers in `Q_p`, known modulo an absolute precision.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspec::{ExponentResult, ExtInt};

/// Absolute precision used when none is given.
pub const DEFAULT_PRECISION: i64 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Exactly zero.
    Zero,
    /// `p^valuation · unit + O(p^precision)`, with `unit` reduced modulo
    /// `p^(precision - valuation)`. `unit == 0` means zero within precision,
    /// in which case `valuation == precision`.
    Approx { valuation: i64, unit: BigUint, precision: i64 },
}

/// An element of `Q_p` up to `O(p^a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdic {
    prime: u64,
    repr: Repr,
}

fn pow(p: u64, e: i64) -> BigUint {
    assert!(e >= 0, "negative exponent {e}");
    num_traits::pow(BigUint::from(p), e as usize)
}

/// Splits `n != 0` into `(v_p(n), n / p^v)`.
fn split_p(p: u64, mut n: BigUint) -> (i64, BigUint) {
    let bp = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&bp);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if p < 2 || !(2..).take_while(|d| d * d <= p).all(|d| p % d != 0) {
        return Err(Error::InvalidInput(format!("{p} is not a prime")));
    }
    Ok(())
}

impl PAdic {
    pub fn zero(prime: u64) -> PAdic {
        PAdic { prime, repr: Repr::Zero }
    }

    /// `0 + O(p^a)`.
    pub fn zero_mod(prime: u64, a: i64) -> PAdic {
        PAdic { prime, repr: Repr::Approx { valuation: a, unit: BigUint::zero(), precision: a } }
    }

    /// `p^v · n + O(p^a)` from an arbitrary integer `n` (reduced and normalized).
    fn from_scaled(prime: u64, v: i64, n: &BigInt, a: i64) -> PAdic {
        if a <= v {
            return PAdic::zero_mod(prime, a);
        }
        let m = pow(prime, a - v);
        let r = n.mod_floor(&BigInt::from_biguint(Sign::Plus, m.clone()));
        let r = r.to_biguint().expect("non-negative after mod_floor");
        if r.is_zero() {
            return PAdic::zero_mod(prime, a);
        }
        let (e, unit) = split_p(prime, r);
        let valuation = v + e;
        let unit = unit % pow(prime, a - valuation);
        PAdic { prime, repr: Repr::Approx { valuation, unit, precision: a } }
    }

    /// The rational `num/den` modulo `p^a`; requires `p ∤ den` after reduction.
    pub fn from_rational(prime: u64, num: &BigInt, den: &BigInt, a: i64) -> Result<PAdic> {
        check_prime(prime)?;
        if den.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        if num.is_zero() {
            return Ok(PAdic::zero(prime));
        }
        let g = num.gcd(den);
        let (mut num, mut den) = (num / &g, den / &g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let bp = BigInt::from(prime);
        if (&den % &bp).is_zero() {
            return Err(Error::InvalidInput(format!("denominator {den} is divisible by p = {prime}")));
        }
        let (v, _) = split_p(prime, num.magnitude().clone());
        if a <= v {
            return Ok(PAdic::zero_mod(prime, a));
        }
        let m = BigInt::from_biguint(Sign::Plus, pow(prime, a));
        let inv = mod_inverse(&den, &m);
        Ok(PAdic::from_scaled(prime, 0, &(num * inv), a))
    }

    pub fn from_i64(prime: u64, n: i64, a: i64) -> Result<PAdic> {
        PAdic::from_rational(prime, &BigInt::from(n), &BigInt::one(), a)
    }

    /// `p^v · num/den` for an exactly written literal: the result carries at
    /// least `digits` digits of absolute precision and at least `digits`
    /// significant digits.
    pub fn literal(prime: u64, num: &BigInt, den: &BigInt, v: i64, digits: i64) -> Result<PAdic> {
        check_prime(prime)?;
        if num.is_zero() {
            return PAdic::from_rational(prime, num, den, 0);
        }
        let g = num.gcd(den);
        let (w, _) = split_p(prime, (num / &g).magnitude().clone());
        let a = Self::literal_precision(v + w, digits);
        PAdic::from_rational(prime, num, den, a - v).map(|x| x.mul_p_power(v))
    }

    /// Precision given to a literal of valuation `v`.
    pub fn literal_precision(v: i64, digits: i64) -> i64 {
        digits.max(v + digits)
    }

    /// `p^k` as a literal.
    pub fn p_power(prime: u64, k: i64, digits: i64) -> PAdic {
        PAdic {
            prime,
            repr: Repr::Approx {
                valuation: k,
                unit: BigUint::one() % pow(prime, Self::literal_precision(k, digits) - k),
                precision: Self::literal_precision(k, digits),
            },
        }
        .normalized()
    }

    /// `p^v · u + O(p^a)` for an integer unit representative `u`.
    pub fn from_parts(prime: u64, v: i64, u: &BigInt, a: i64) -> PAdic {
        PAdic::from_scaled(prime, v, u, a)
    }

    fn normalized(self) -> PAdic {
        match &self.repr {
            Repr::Approx { valuation, unit, precision } => {
                PAdic::from_scaled(self.prime, *valuation, &BigInt::from(unit.clone()), *precision)
            }
            Repr::Zero => self,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_exact_zero(&self) -> bool {
        self.repr == Repr::Zero
    }

    /// Zero modulo its precision (but not known to be exactly zero).
    pub fn is_zero_within(&self) -> bool {
        matches!(&self.repr, Repr::Approx { unit, .. } if unit.is_zero())
    }

    /// Known to be nonzero.
    pub fn is_nonzero(&self) -> bool {
        !self.is_exact_zero() && !self.is_zero_within()
    }

    /// Absolute precision; `None` for exact zero.
    pub fn precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Approx { precision, .. } => Some(precision),
        }
    }

    /// `v_p(x)` when it is determined: `+∞` for exact zero, `None` when the
    /// element is zero within its precision.
    pub fn exact_valuation(&self) -> Option<ExtInt> {
        match &self.repr {
            Repr::Zero => Some(ExtInt::PosInf),
            Repr::Approx { unit, .. } if unit.is_zero() => None,
            Repr::Approx { valuation, .. } => Some(ExtInt::Finite(*valuation)),
        }
    }

    /// A certified lower bound for `v_p(x)`.
    pub fn valuation_lower_bound(&self) -> ExtInt {
        match self.repr {
            Repr::Zero => ExtInt::PosInf,
            Repr::Approx { valuation, .. } => ExtInt::Finite(valuation),
        }
    }

    /// `e` with `|x| = q^e`, or an upper bound when `x` is zero within precision.
    pub fn abs_exponent(&self) -> ExponentResult {
        match self.exact_valuation() {
            Some(v) => ExponentResult::exact(-v),
            None => ExponentResult::upper_bound(-self.valuation_lower_bound()),
        }
    }

    /// Unit part reduced modulo `p^(precision - valuation)`; zero if unknown.
    pub fn unit(&self) -> BigUint {
        match &self.repr {
            Repr::Zero => BigUint::zero(),
            Repr::Approx { unit, .. } => unit.clone(),
        }
    }

    /// Base-`p` digits of the unit, lowest first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut n = self.unit();
        let bp = BigUint::from(self.prime);
        let mut out = Vec::new();
        while !n.is_zero() {
            let (q, r) = n.div_rem(&bp);
            out.push(r.to_u64().expect("digit below p"));
            n = q;
        }
        out
    }

    /// Unit representative in `(-p^r/2, p^r/2]`, `r` the relative precision.
    pub fn signed_unit(&self) -> BigInt {
        match &self.repr {
            Repr::Zero => BigInt::zero(),
            Repr::Approx { valuation, unit, precision } => {
                let m = pow(self.prime, precision - valuation);
                let u = BigInt::from(unit.clone());
                if &u * 2 > BigInt::from(m.clone()) {
                    u - BigInt::from(m)
                } else {
                    u
                }
            }
        }
    }

    pub fn with_precision_cap(&self, a: i64) -> PAdic {
        match &self.repr {
            Repr::Zero => PAdic::zero_mod(self.prime, a),
            Repr::Approx { valuation, unit, precision } => {
                if *precision <= a {
                    self.clone()
                } else {
                    PAdic::from_scaled(self.prime, *valuation, &BigInt::from(unit.clone()), a)
                }
            }
        }
    }

    /// `p^k · x`.
    pub fn mul_p_power(&self, k: i64) -> PAdic {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Approx { valuation, unit, precision } => PAdic {
                prime: self.prime,
                repr: Repr::Approx { valuation: valuation + k, unit: unit.clone(), precision: precision + k },
            },
        }
    }

    fn same_prime(&self, other: &PAdic) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::IncompatiblePrimes(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn add(&self, other: &PAdic) -> Result<PAdic> {
        self.same_prime(other)?;
        let (
            Repr::Approx { valuation: vx, unit: ux, precision: ax },
            Repr::Approx { valuation: vy, unit: uy, precision: ay },
        ) = (&self.repr, &other.repr)
        else {
            return Ok(if self.is_exact_zero() { other.clone() } else { self.clone() });
        };
        let a = (*ax).min(*ay);
        let base = (*vx).min(*vy);
        if a <= base {
            return Ok(PAdic::zero_mod(self.prime, a));
        }
        let n = BigInt::from(ux * pow(self.prime, vx - base)) + BigInt::from(uy * pow(self.prime, vy - base));
        Ok(PAdic::from_scaled(self.prime, base, &n, a))
    }

    pub fn neg(&self) -> PAdic {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Approx { valuation, unit, precision } => {
                PAdic::from_scaled(self.prime, *valuation, &-BigInt::from(unit.clone()), *precision)
            }
        }
    }

    pub fn sub(&self, other: &PAdic) -> Result<PAdic> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PAdic) -> Result<PAdic> {
        self.same_prime(other)?;
        let (
            Repr::Approx { valuation: vx, unit: ux, precision: ax },
            Repr::Approx { valuation: vy, unit: uy, precision: ay },
        ) = (&self.repr, &other.repr)
        else {
            return Ok(PAdic::zero(self.prime));
        };
        let a = (vx + ay).min(vy + ax);
        Ok(PAdic::from_scaled(self.prime, vx + vy, &BigInt::from(ux * uy), a))
    }

    /// Standalone JSON value (includes the prime).
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(CoeffJson::from(self)).expect("serializable");
        v["prime"] = self.prime.into();
        v
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => f.write_str("0"),
            Repr::Approx { valuation, precision, .. } => {
                let u = self.signed_unit();
                if u.is_zero() {
                    write!(f, "O(p^{precision})")
                } else {
                    write!(f, "({u}*p^{valuation} + O(p^{precision}))")
                }
            }
        }
    }
}

/// JSON form of a coefficient; the prime comes from the enclosing object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub prec: ExtInt,
    pub unit: String,
    pub val: ExtInt,
}

impl From<&PAdic> for CoeffJson {
    fn from(x: &PAdic) -> Self {
        match &x.repr {
            Repr::Zero => CoeffJson { prec: ExtInt::PosInf, unit: "0".into(), val: ExtInt::PosInf },
            Repr::Approx { valuation, unit, precision } => CoeffJson {
                prec: ExtInt::Finite(*precision),
                unit: unit.to_string(),
                val: ExtInt::Finite(*valuation),
            },
        }
    }
}

impl CoeffJson {
    pub fn into_padic(self, prime: u64) -> Result<PAdic> {
        check_prime(prime)?;
        let unit: BigUint = self
            .unit
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unit `{}` is not a non-negative integer", self.unit)))?;
        match (self.val, self.prec) {
            (ExtInt::PosInf, ExtInt::PosInf) if unit.is_zero() => Ok(PAdic::zero(prime)),
            (ExtInt::Finite(v), ExtInt::Finite(a)) if v <= a => {
                let x = PAdic::from_scaled(prime, v, &BigInt::from(unit.clone()), a);
                // Only canonical encodings are accepted, so JSON round-trips byte-exactly.
                if CoeffJson::from(&x) != (CoeffJson { prec: self.prec, unit: unit.to_string(), val: self.val }) {
                    return Err(Error::InvalidInput(format!(
                        "coefficient (val {v}, unit {unit}, prec {a}) is not in canonical form"
                    )));
                }
                Ok(x)
            }
            _ => Err(Error::InvalidInput("inconsistent coefficient valuation/precision".into())),
        }
    }
}
