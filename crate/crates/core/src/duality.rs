//! The pairing `π_x(y) = Σ_i x_i y_{-i}`, polars and the dual seminorm.
//!
//! A continuous functional is always represented by the series `x` with
//! `π_x` equal to it; there is no separate functional type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PAdic;
use crate::seminorm::SeminormSpec;
use crate::seqspec::{minplus_convolve, reflect_affine, ExtInt};
use crate::series::{EqualCharSeries, FieldKind, LeftTail, MixedSeries, RightTail, Series};
use crate::submodule::SubmoduleSpec;

/// `Σ_i x_i y_{-i}`, the `t^0` coefficient of `xy`.
///
/// For `K{{t}}` the tails of `x` and `y` must certify the sum modulo
/// `p^target`; the result carries the best precision the tails allow.
pub fn pairing(x: &Series, y: &Series, target: i64) -> Result<PAdic> {
    match (x, y) {
        (Series::Equal(a), Series::Equal(b)) => pairing_equal(a, b),
        (Series::Mixed(a), Series::Mixed(b)) => pairing_mixed(a, b, target),
        _ => Err(Error::KindMismatch("cannot pair an equal and a mixed characteristic series".into())),
    }
}

fn pairing_equal(x: &EqualCharSeries, y: &EqualCharSeries) -> Result<PAdic> {
    if x.prime() != y.prime() {
        return Err(Error::IncompatiblePrimes(x.prime(), y.prime()));
    }
    let mut acc = PAdic::zero(x.prime());
    if x.is_exact_zero() || y.is_exact_zero() {
        return Ok(acc);
    }
    for i in x.order()..=-y.order() {
        let (a, b) = (x.coeff(i), y.coeff(-i));
        if a.as_ref().is_some_and(PAdic::is_exact_zero) || b.as_ref().is_some_and(PAdic::is_exact_zero) {
            continue;
        }
        match (a, b) {
            (Some(a), Some(b)) => acc = acc.add(&a.mul(&b)?)?,
            _ => {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient of t^{} or t^{} is beyond the truncation",
                    i, -i
                )))
            }
        }
    }
    Ok(acc)
}

fn pairing_mixed(x: &MixedSeries, y: &MixedSeries, target: i64) -> Result<PAdic> {
    if x.prime() != y.prime() {
        return Err(Error::IncompatiblePrimes(x.prime(), y.prime()));
    }
    let cap_x = minplus_convolve(&x.tail_spec(), &y.bound_spec())?.value_at(0);
    let cap_y = minplus_convolve(&x.bound_spec(), &y.tail_spec())?.value_at(0);
    let cap = cap_x.min(cap_y);
    if cap < ExtInt::Finite(target) {
        return Err(Error::PrecisionExhausted(format!(
            "tails only certify the pairing modulo p^{cap}, below the target p^{target}"
        )));
    }
    let mut acc = PAdic::zero(x.prime());
    for i in x.lo().max(-y.hi())..=x.hi().min(-y.lo()) {
        let (a, b) = (x.coeff_at(i), y.coeff_at(-i));
        if !a.is_exact_zero() && !b.is_exact_zero() {
            acc = acc.add(&a.mul(&b)?)?;
        }
    }
    Ok(match cap {
        ExtInt::Finite(c) => acc.with_precision_cap(c),
        _ => acc,
    })
}

/// `A^γ = Σ_i p^{1 - k_{-i}} t^i`: the series `x` with `|π_x(y)| < 1` on `A`.
pub fn pseudo_polar(m: &SubmoduleSpec) -> SubmoduleSpec {
    SubmoduleSpec::new(reflect_affine(&m.seq, 1), m.field)
}

/// `Σ_i p^{-k_{-i}} t^i`: the series `x` with `|π_x(y)| ≤ 1` on `A`.
pub fn polar(m: &SubmoduleSpec) -> SubmoduleSpec {
    SubmoduleSpec::new(reflect_affine(&m.seq, 0), m.field)
}

/// The seminorm `n_i = -k_{-i}` whose ball is the polar of `b`, so that
/// `‖x‖_n = sup_{y ∈ b} |π_x(y)|`.
pub fn dual_seminorm(b: &SubmoduleSpec) -> Result<SeminormSpec> {
    match b.field {
        FieldKind::MixedChar if !b.is_compactoid() => return Err(Error::NotCompactoid),
        FieldKind::EqualChar if !b.is_bounded() => return Err(Error::NotBounded),
        _ => {}
    }
    let n = SeminormSpec::new(reflect_affine(&b.seq, 0), b.field);
    n.validate()?;
    Ok(n)
}

/// What is known about `a_i` outside the explicit window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueTail {
    /// All values are zero.
    Zero,
    /// `v(a_i) ≥ base + slope·d` at distance `d ≥ 1` from the window.
    Bound { slope: i64, base: i64 },
    Unknown,
}

/// The values `a_i = w(t^{-i})` of a functional `w` on the monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalValues {
    pub prime: u64,
    pub field: FieldKind,
    pub lo: i64,
    pub values: Vec<PAdic>,
    pub left: ValueTail,
    pub right: ValueTail,
}

/// Assembles `x = Σ a_i t^i`, the series with `π_x(t^{-i}) = a_i`.
pub fn functional_from_values(a: &FunctionalValues) -> Result<Series> {
    let bad = |msg: &str| Err(Error::NonConvergentValues(msg.to_string()));
    match a.field {
        FieldKind::EqualChar => {
            if a.left != ValueTail::Zero {
                return bad("values must vanish for all sufficiently negative indices");
            }
            let trunc = match a.right {
                ValueTail::Zero => None,
                _ => Some(a.lo + a.values.len() as i64),
            };
            Ok(EqualCharSeries::new(a.prime, a.lo, a.values.clone(), trunc)?.into())
        }
        FieldKind::MixedChar => {
            let left = match a.left {
                ValueTail::Zero => LeftTail::Zero,
                ValueTail::Bound { slope, base } if slope >= 1 => LeftTail::Bound { slope, base },
                ValueTail::Bound { .. } => return bad("values do not tend to zero to the left"),
                ValueTail::Unknown => return bad("left values are not certified to tend to zero"),
            };
            let right = match a.right {
                ValueTail::Zero => RightTail::Zero,
                ValueTail::Bound { slope, base } if slope >= 0 => RightTail::Bound { floor: base + slope },
                ValueTail::Bound { .. } => return bad("values are unbounded to the right"),
                ValueTail::Unknown => return bad("right values are not certified to be bounded"),
            };
            let values = if a.values.is_empty() { vec![PAdic::zero(a.prime)] } else { a.values.clone() };
            Ok(MixedSeries::new(a.prime, a.lo, values, left, right)?.into())
        }
    }
}
