//! Admissible seminorms `‖x‖ = sup_i |x_i| q^{n_i}` in log-`q` scale.
//!
//! The exponent of `‖x‖` is `sup_i (n_i - v(x_i))`. For the equal
//! characteristic the sequence must be `-∞` eventually to the right; for
//! the mixed characteristic it must be bounded above and tend to `-∞` to the
//! right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspec::{ExponentResult, Exactness, ExtInt, SeqSpec, TailSpec};
use crate::series::{CoeffInfo, FieldKind, MixedSeries, Profile, Series};

/// A seminorm given by its exponent sequence `(n_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeminormSpec {
    #[serde(flatten)]
    pub seq: SeqSpec,
    pub field: FieldKind,
}

/// Outcome of a closed-ball membership test `‖x‖ ≤ q^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallTest {
    Inside,
    Outside,
    Unknown,
}

impl SeminormSpec {
    pub fn new(seq: SeqSpec, field: FieldKind) -> SeminormSpec {
        SeminormSpec { seq, field }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.seq;
        if s.contains_value(ExtInt::PosInf) {
            return Err(Error::NonAdmissibleSequence("seminorm exponents must not take the value +inf".into()));
        }
        match self.field {
            FieldKind::EqualChar => {
                if s.right() != TailSpec::Const(ExtInt::NegInf) {
                    return Err(Error::NonAdmissibleSequence(
                        "equal characteristic requires n_i = -inf for all sufficiently large i".into(),
                    ));
                }
            }
            FieldKind::MixedChar => {
                if s.supremum() == ExtInt::PosInf {
                    return Err(Error::NonAdmissibleSequence(
                        "mixed characteristic requires n_i to be bounded above".into(),
                    ));
                }
                if !s.right_tends_to_neg_inf() {
                    return Err(Error::NonAdmissibleSequence(
                        "mixed characteristic requires n_i -> -inf as i -> +inf".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().is_ok()
    }

    /// Exponent of `‖x‖`.
    pub fn eval_exponent(&self, x: &Series) -> Result<ExponentResult> {
        if x.kind() != self.field {
            return Err(Error::KindMismatch(format!(
                "{} seminorm applied to a {} series",
                self.field.name(),
                x.kind().name()
            )));
        }
        self.validate()?;
        let e = excess(&self.seq, &x.profile());
        if e.bound == ExtInt::PosInf {
            return Err(Error::PrecisionExhausted(match x {
                Series::Equal(_) => "the series is truncated below the last index with n_i > -inf".into(),
                Series::Mixed(_) => "tail bounds do not bound the seminorm".into(),
            }));
        }
        Ok(if e.bound <= e.exact { ExponentResult::exact(e.exact) } else { ExponentResult::upper_bound(e.bound) })
    }

    /// `‖x‖ ≤ q^e`?
    pub fn closed_ball_test(&self, x: &Series, e: i64) -> BallTest {
        match self.eval_exponent(x) {
            Ok(r) if r.exponent <= ExtInt::Finite(e) => BallTest::Inside,
            Ok(r) if r.exactness == Exactness::Exact => BallTest::Outside,
            _ => BallTest::Unknown,
        }
    }

    /// `sup_i (n_i - k_i)`: the exponent of the supremum of `‖·‖` over
    /// `Σ p^{k_i} t^i`.
    pub fn sup_over_module(&self, k: &SeqSpec) -> ExtInt {
        excess(&self.seq, &Profile::exact(k)).exact
    }
}

/// Exponent of the sup-norm `sup_i |x_i| = q^{-v_F(x)}` on `K{{t}}`.
pub fn sup_norm_exponent(x: &MixedSeries) -> ExponentResult {
    let v = x.field_valuation();
    if v.exact {
        ExponentResult::exact(-v.value)
    } else {
        ExponentResult::upper_bound(-v.value)
    }
}

/// Exponent of `sup { sup-norm(x) : x ∈ Σ p^{k_i} t^i } = sup_i q^{-k_i}`.
pub fn sup_norm_bound(k: &SeqSpec) -> ExtInt {
    -k.infimum()
}

/// The sup-norm as a sequence (`n_i = 0`): bounded on bounded sets but not
/// admissible, since it does not tend to `-∞`.
pub fn sup_norm_sequence() -> SeminormSpec {
    SeminormSpec::new(SeqSpec::constant(0), FieldKind::MixedChar)
}

/// Separate maxima of the exactly known terms and of the bound-only terms of
/// `n_i - v(x_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Excess {
    pub exact: ExtInt,
    pub bound: ExtInt,
}

fn term(n: ExtInt, info: CoeffInfo) -> (ExtInt, bool) {
    use ExtInt::*;
    match info {
        CoeffInfo::Exact(PosInf) | CoeffInfo::AtLeast(PosInf) => (NegInf, true),
        _ if n == NegInf => (NegInf, true),
        CoeffInfo::Exact(v) => (diff(n, v), true),
        CoeffInfo::AtLeast(a) => (diff(n, a), false),
    }
}

/// `n - v` with `v < +∞`, `n > -∞`.
fn diff(n: ExtInt, v: ExtInt) -> ExtInt {
    match (n, v) {
        (ExtInt::Finite(a), ExtInt::Finite(b)) => ExtInt::Finite(a - b),
        _ => ExtInt::PosInf,
    }
}

pub(crate) fn excess(n: &SeqSpec, x: &Profile) -> Excess {
    let mut out = Excess { exact: ExtInt::NegInf, bound: ExtInt::NegInf };
    let mut push = |(v, exact): (ExtInt, bool)| {
        let slot = if exact { &mut out.exact } else { &mut out.bound };
        *slot = (*slot).max(v);
    };
    let at = |i: i64| term(n.value_at(i), x.at(i));
    let lo = n.window_lo().min(x.lo);
    let hi = n.window_hi().max(x.end() - 1);
    for i in lo..=hi {
        push(at(i));
    }
    for (near, far) in [(lo - 1, lo - 2), (hi + 1, hi + 2)] {
        let (a, exact) = at(near);
        let (b, _) = at(far);
        push((if b > a { ExtInt::PosInf } else { a }, exact));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PAdic;
    use crate::series::{EqualCharSeries, LeftTail, RightTail};
    use ExtInt::{Finite as F, NegInf};

    const P: u64 = 5;

    fn pp(k: i64) -> PAdic {
        PAdic::p_power(P, k, 32)
    }

    fn c(n: i64) -> PAdic {
        PAdic::from_i64(P, n, 32).unwrap()
    }

    fn mixed(terms: &[(i64, PAdic)]) -> Series {
        MixedSeries::from_terms(P, terms, LeftTail::Zero, RightTail::Zero).unwrap().into()
    }

    fn neg_inf() -> TailSpec {
        TailSpec::Const(NegInf)
    }

    #[test]
    fn validation_examples() {
        let s = SeminormSpec::new(SeqSpec::constant(0), FieldKind::MixedChar);
        assert!(matches!(s.validate(), Err(Error::NonAdmissibleSequence(m)) if m.contains("-inf as i -> +inf")));
        let s = SeminormSpec::new(
            SeqSpec::new(0, vec![], TailSpec::affine(-1, 0), neg_inf()).unwrap(),
            FieldKind::EqualChar,
        );
        assert!(s.validate().is_ok());
        let s = SeminormSpec::new(
            SeqSpec::new(0, vec![F(0)], TailSpec::constant(0), TailSpec::affine(-1, 0)).unwrap(),
            FieldKind::MixedChar,
        );
        assert!(s.validate().is_ok());
        let s = SeminormSpec::new(
            SeqSpec::new(0, vec![F(0)], TailSpec::affine(-1, 0), TailSpec::affine(-1, 0)).unwrap(),
            FieldKind::MixedChar,
        );
        assert!(s.validate().is_err(), "unbounded above on the left");
    }

    #[test]
    fn equal_char_evaluation() {
        let n = SeminormSpec::new(
            SeqSpec::new(-1, vec![F(3), NegInf, NegInf, F(1)], neg_inf(), neg_inf()).unwrap(),
            FieldKind::EqualChar,
        );
        let x: Series = EqualCharSeries::from_terms(P, &[(-1, pp(2)), (2, c(7))], None).unwrap().into();
        assert_eq!(n.eval_exponent(&x).unwrap(), ExponentResult::exact(F(1)));
        assert_eq!(n.eval_exponent(&Series::zero(FieldKind::EqualChar, P)).unwrap(), ExponentResult::exact(NegInf));
        let t: Series = EqualCharSeries::from_terms(P, &[(-1, pp(2))], Some(2)).unwrap().into();
        assert!(matches!(n.eval_exponent(&t), Err(Error::PrecisionExhausted(_))));
        let t: Series = EqualCharSeries::from_terms(P, &[(-1, pp(2))], Some(3)).unwrap().into();
        assert_eq!(n.eval_exponent(&t).unwrap(), ExponentResult::exact(F(1)));
    }

    #[test]
    fn mixed_evaluation() {
        let n = SeminormSpec::new(SeqSpec::new(1, vec![], TailSpec::constant(0), neg_inf()).unwrap(), FieldKind::MixedChar);
        let x = mixed(&[(-3, pp(-1)), (5, c(1))]);
        assert_eq!(n.eval_exponent(&x).unwrap(), ExponentResult::exact(F(1)));
        // tails: v(x_i) ≥ 2 + (0 - i) on the left contributes at most -3
        let y: Series = MixedSeries::new(P, 0, vec![c(1)], LeftTail::Bound { slope: 1, base: 2 }, RightTail::Bound { floor: 0 })
            .unwrap()
            .into();
        assert_eq!(n.eval_exponent(&y).unwrap(), ExponentResult::exact(F(0)));
        let z: Series = MixedSeries::new(P, 0, vec![pp(3)], LeftTail::Bound { slope: 1, base: 0 }, RightTail::Zero)
            .unwrap()
            .into();
        assert_eq!(n.eval_exponent(&z).unwrap(), ExponentResult::upper_bound(F(-1)));
        // ties between an exact term and a bound are exact
        let w: Series = MixedSeries::new(P, 0, vec![pp(1)], LeftTail::Bound { slope: 1, base: 0 }, RightTail::Zero)
            .unwrap()
            .into();
        assert_eq!(n.eval_exponent(&w).unwrap(), ExponentResult::exact(F(-1)));
    }

    #[test]
    fn ball_tests() {
        let n = SeminormSpec::new(SeqSpec::new(1, vec![], TailSpec::constant(0), neg_inf()).unwrap(), FieldKind::MixedChar);
        let x = mixed(&[(-3, pp(-1))]);
        assert_eq!(n.closed_ball_test(&x, 1), BallTest::Inside);
        assert_eq!(n.closed_ball_test(&x, 0), BallTest::Outside);
        let z: Series = MixedSeries::new(P, 0, vec![PAdic::zero_mod(P, 8)], LeftTail::Zero, RightTail::Zero).unwrap().into();
        assert_eq!(n.eval_exponent(&z).unwrap(), ExponentResult::upper_bound(F(-8)));
        assert_eq!(n.closed_ball_test(&z, -10), BallTest::Unknown);
    }

    #[test]
    fn sup_norm_helpers() {
        let x = MixedSeries::from_terms(P, &[(-1, pp(2)), (1, c(1))], LeftTail::Zero, RightTail::Zero).unwrap();
        assert_eq!(sup_norm_exponent(&x), ExponentResult::exact(F(0)));
        assert_eq!(sup_norm_bound(&SeqSpec::constant(0)), F(0));
        assert!(!sup_norm_sequence().is_admissible());
    }

    #[test]
    fn json_adds_field() {
        let n = SeminormSpec::new(SeqSpec::new(1, vec![], TailSpec::constant(0), neg_inf()).unwrap(), FieldKind::MixedChar);
        let text = crate::json::to_canonical(&n);
        assert_eq!(
            text,
            r#"{"field":"mixed","left":{"kind":"const","value":0},"right":{"kind":"const","value":"-inf"},"window":{"0":0}}"#
        );
        let back: SeminormSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, n);
    }

    #[test]
    fn sup_over_module_examples() {
        let n = SeminormSpec::new(SeqSpec::new(0, vec![F(0)], TailSpec::constant(0), TailSpec::affine(-1, 0)).unwrap(), FieldKind::MixedChar);
        assert_eq!(n.sup_over_module(&SeqSpec::constant(0)), F(0));
        assert_eq!(n.sup_over_module(&SeqSpec::constant(-3)), F(3));
        let unbounded = SeqSpec::new(0, vec![F(0)], TailSpec::affine(1, 0), TailSpec::constant(0)).unwrap();
        assert_eq!(n.sup_over_module(&unbounded), ExtInt::PosInf);
    }
}
