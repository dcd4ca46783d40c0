//! Brute-force reference implementations over finite windows, and
//! deterministic sampling.
//!
//! Everything here enumerates indices directly and shares no code with the
//! symbolic tail arithmetic it is used to check. Randomness is SplitMix64
//! seeded with the configured 64-bit seed; ranges are reduced modulo.

use num_bigint::{BigInt, BigUint};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PAdic;
use crate::seminorm::SeminormSpec;
use crate::seqspec::{ExtInt, SeqSpec, TailSpec};
use crate::series::{EqualCharSeries, FieldKind, LeftTail, MixedSeries, RightTail, Series};
use crate::submodule::{Membership, SubmoduleSpec};

/// Inclusive index range.
pub type Window = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    pub window: Window,
    /// Relative p-adic digits of sampled coefficients.
    pub precision: i64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0, count: 8, window: (-20, 20), precision: crate::padic::DEFAULT_PRECISION }
    }
}

/// Deterministic generator used by every sampler.
#[derive(Clone, Debug)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// In `[lo, hi]`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// True with probability `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// `max_{i ∈ window} (n_i - v(x_i))` over exactly known coefficients.
pub fn brute_seminorm(spec: &SeminormSpec, x: &Series, window: Window) -> ExtInt {
    let mut best = ExtInt::NegInf;
    for i in window.0..=window.1 {
        let Some(c) = x.coeff(i) else { continue };
        let term = match (spec.seq.value_at(i), c.exact_valuation()) {
            (_, None) => continue,
            (ExtInt::NegInf, _) | (_, Some(ExtInt::PosInf)) => ExtInt::NegInf,
            (ExtInt::Finite(n), Some(ExtInt::Finite(v))) => ExtInt::Finite(n - v),
            (ExtInt::PosInf, Some(_)) => ExtInt::PosInf,
            (_, Some(ExtInt::NegInf)) => unreachable!("valuations are never -inf"),
        };
        best = best.max(term);
    }
    best
}

/// `min_{i ∈ window} a(i) + b(k - i)`, where `+∞` absorbs.
///
/// The window must reach far enough that, outside it, both sequences follow
/// their tails. The exterior terms then form an affine function of `i`, so
/// two points on each side decide it: non-decreasing outward means the
/// nearest point is the exterior minimum, decreasing means the infimum is `-∞`.
pub fn brute_minplus(a: &SeqSpec, b: &SeqSpec, k: i64, window: Window) -> Result<ExtInt> {
    let (w0, w1) = window;
    let term = |i: i64| a.value_at(i).add_ideal(b.value_at(k - i));
    let insufficient = |side: &str| Err(Error::WindowInsufficient(format!("{side} end of [{w0}, {w1}] at k = {k}")));
    let mut best = ExtInt::PosInf;
    for i in w0..=w1 {
        best = best.min(term(i)?);
    }
    if w0 > a.window_lo() || k - w0 < b.window_hi() {
        return insufficient("left");
    }
    let (near, far) = (term(w0 - 1)?, term(w0 - 2)?);
    if far < near {
        return Ok(ExtInt::NegInf);
    }
    best = best.min(near);
    if w1 < a.window_hi() || k - w1 > b.window_lo() {
        return insufficient("right");
    }
    let (near, far) = (term(w1 + 1)?, term(w1 + 2)?);
    if far < near {
        return Ok(ExtInt::NegInf);
    }
    Ok(best.min(near))
}

/// `Σ_{i ∈ window} x_i y_{-i}`; unknown coefficients are an error.
pub fn brute_pairing(x: &Series, y: &Series, window: Window) -> Result<PAdic> {
    if x.kind() != y.kind() {
        return Err(Error::KindMismatch("pairing across field kinds".into()));
    }
    if x.prime() != y.prime() {
        return Err(Error::IncompatiblePrimes(x.prime(), y.prime()));
    }
    let mut acc = PAdic::zero(x.prime());
    for i in window.0..=window.1 {
        match (x.coeff(i), y.coeff(-i)) {
            (Some(a), Some(b)) => acc = acc.add(&a.mul(&b)?)?,
            _ => return Err(Error::PrecisionExhausted(format!("coefficient at {i} is not known"))),
        }
    }
    Ok(acc)
}

/// A random unit `u` with `0 < u < p^digits`, `p ∤ u`.
pub fn random_unit(rng: &mut Rng, prime: u64, digits: i64) -> BigInt {
    let mut u = BigUint::from(0u32);
    let mut place = BigUint::from(1u32);
    for d in 0..digits.max(1) {
        let digit = if d == 0 { 1 + rng.below(prime - 1) } else { rng.below(prime) };
        u += &place * digit;
        place *= prime;
    }
    u.into()
}

/// A random element with exact valuation `v` and `digits` relative digits.
pub fn random_coeff(rng: &mut Rng, prime: u64, v: i64, digits: i64) -> PAdic {
    PAdic::from_parts(prime, v, &random_unit(rng, prime, digits), v + digits)
}

/// Elements of `m`: the boundary monomials `p^{k_i} t^i` for `i` in the
/// window, then `count` random elements whose coefficients sit on or just
/// above the bounds, some of them with certified tails.
pub fn sample_elements(m: &SubmoduleSpec, prime: u64, cfg: &SampleConfig) -> Vec<Series> {
    let mut rng = Rng::new(cfg.seed);
    let k = &m.seq;
    let digits = cfg.precision;
    let mut out = vec![Series::zero(m.field, prime)];
    for i in cfg.window.0..=cfg.window.1 {
        if let ExtInt::Finite(ki) = k.value_at(i) {
            out.push(Series::monomial(m.field, PAdic::p_power(prime, ki, digits), i));
        }
    }
    let lo = cfg.window.0.min(k.window_lo());
    let hi = cfg.window.1.max(k.window_hi());
    for _ in 0..cfg.count {
        let coeffs: Vec<PAdic> = (lo..=hi)
            .map(|i| match k.value_at(i) {
                ExtInt::PosInf => PAdic::zero(prime),
                _ if rng.chance(1, 4) => PAdic::zero(prime),
                ExtInt::Finite(ki) => {
                    let v = ki + rng.range(0, 2);
                    random_coeff(&mut rng, prime, v, digits)
                }
                ExtInt::NegInf => {
                    let v = rng.range(-6, 6);
                    random_coeff(&mut rng, prime, v, digits)
                }
            })
            .collect();
        let x: Series = match m.field {
            FieldKind::EqualChar => {
                let trunc = (k.right() == TailSpec::Const(ExtInt::NegInf) && rng.chance(1, 2)).then_some(hi + 1);
                EqualCharSeries::new(prime, lo, coeffs, trunc).expect("valid sample").into()
            }
            FieldKind::MixedChar => {
                let left = if rng.chance(1, 2) { left_tail_within(&mut rng, k, lo) } else { LeftTail::Zero };
                let right = if rng.chance(1, 2) { right_tail_within(&mut rng, k, hi) } else { RightTail::Zero };
                MixedSeries::new(prime, lo, coeffs, left, right).expect("valid sample").into()
            }
        };
        out.push(x);
    }
    for x in &out {
        assert_eq!(m.membership(x), Membership::In, "sampled element escaped the module: {x:?}");
    }
    out
}

/// A left tail bound that stays inside the module for every `i < lo`.
fn left_tail_within(rng: &mut Rng, k: &SeqSpec, lo: i64) -> LeftTail {
    match k.left() {
        TailSpec::Const(ExtInt::PosInf) => LeftTail::Zero,
        TailSpec::Const(ExtInt::NegInf) => LeftTail::Bound { slope: rng.range(1, 3), base: rng.range(-3, 3) },
        t => {
            let slope = 1.max(-t.slope()) + rng.range(0, 1);
            let at = t.value_at(lo - 1).finite().expect("finite tail");
            LeftTail::Bound { slope, base: at - slope + rng.range(0, 2) }
        }
    }
}

/// A right tail bound that stays inside the module for every `i > hi`.
fn right_tail_within(rng: &mut Rng, k: &SeqSpec, hi: i64) -> RightTail {
    match k.right() {
        TailSpec::Const(ExtInt::NegInf) => RightTail::Bound { floor: rng.range(-3, 6) },
        TailSpec::Const(ExtInt::Finite(c)) => RightTail::Bound { floor: c + rng.range(0, 2) },
        t @ TailSpec::Affine { slope, .. } if slope < 0 => {
            RightTail::Bound { floor: t.value_at(hi + 1).finite().expect("finite") + rng.range(0, 2) }
        }
        _ => RightTail::Zero,
    }
}

/// Random generators for property tests and the acceptance suite.
pub mod gen {
    use super::*;

    fn finite(rng: &mut Rng) -> ExtInt {
        ExtInt::Finite(rng.range(-6, 6))
    }

    fn nonzero_slope(rng: &mut Rng, lo: i64, hi: i64) -> i64 {
        loop {
            let s = rng.range(lo, hi);
            if s != 0 {
                return s;
            }
        }
    }

    fn affine(rng: &mut Rng, slopes: (i64, i64)) -> TailSpec {
        TailSpec::affine(nonzero_slope(rng, slopes.0, slopes.1), rng.range(-6, 6))
    }

    fn assemble(rng: &mut Rng, values: &[ExtInt], left: TailSpec, right: TailSpec) -> SeqSpec {
        let lo = rng.range(-6, 6);
        let len = rng.range(0, 6);
        let vals = (0..len).map(|_| *rng.pick(values)).collect();
        SeqSpec::new(lo, vals, left, right).expect("small generated sequence")
    }

    /// Any sequence, including infinite values and tails.
    pub fn seq(rng: &mut Rng) -> SeqSpec {
        let values = [ExtInt::PosInf, ExtInt::NegInf, finite(rng), finite(rng), finite(rng), finite(rng)];
        let tail = |rng: &mut Rng| match rng.below(5) {
            0 => TailSpec::Const(ExtInt::PosInf),
            1 => TailSpec::Const(ExtInt::NegInf),
            2 => TailSpec::Const(finite(rng)),
            _ => affine(rng, (-3, 3)),
        };
        let (l, r) = (tail(rng), tail(rng));
        assemble(rng, &values, l, r)
    }

    /// A sequence with finite values only (tails included).
    pub fn finite_seq(rng: &mut Rng) -> SeqSpec {
        let values = [finite(rng), finite(rng), finite(rng), finite(rng)];
        let tail = |rng: &mut Rng| if rng.chance(1, 3) { TailSpec::Const(finite(rng)) } else { affine(rng, (-3, 3)) };
        let (l, r) = (tail(rng), tail(rng));
        assemble(rng, &values, l, r)
    }

    pub fn submodule(rng: &mut Rng, field: FieldKind) -> SubmoduleSpec {
        SubmoduleSpec::new(seq(rng), field)
    }

    /// Open lattices; their sequences are exactly the admissible seminorms.
    pub fn open_lattice(rng: &mut Rng, field: FieldKind) -> SubmoduleSpec {
        let values = [ExtInt::NegInf, finite(rng), finite(rng), finite(rng)];
        let left = match (field, rng.below(4)) {
            (_, 0) => TailSpec::Const(ExtInt::NegInf),
            (_, 1) => TailSpec::Const(finite(rng)),
            (FieldKind::MixedChar, _) => affine(rng, (1, 3)),
            (FieldKind::EqualChar, _) => affine(rng, (-3, 3)),
        };
        let right = match (field, rng.below(2)) {
            (FieldKind::MixedChar, 0) => affine(rng, (-3, -1)),
            _ => TailSpec::Const(ExtInt::NegInf),
        };
        let m = SubmoduleSpec::new(assemble(rng, &values, left, right), field);
        debug_assert!(m.is_open_lattice());
        m
    }

    pub fn seminorm(rng: &mut Rng, field: FieldKind) -> SeminormSpec {
        SeminormSpec::new(open_lattice(rng, field).seq, field)
    }

    pub fn bounded(rng: &mut Rng, field: FieldKind) -> SubmoduleSpec {
        let values = [ExtInt::PosInf, finite(rng), finite(rng), finite(rng)];
        let (left, right) = match field {
            FieldKind::MixedChar => {
                let left = match rng.below(3) {
                    0 => TailSpec::Const(ExtInt::PosInf),
                    1 => TailSpec::Const(finite(rng)),
                    _ => affine(rng, (-3, -1)),
                };
                let right = match rng.below(3) {
                    0 => TailSpec::Const(ExtInt::PosInf),
                    1 => TailSpec::Const(finite(rng)),
                    _ => affine(rng, (1, 3)),
                };
                (left, right)
            }
            FieldKind::EqualChar => {
                let right = match rng.below(3) {
                    0 => TailSpec::Const(ExtInt::PosInf),
                    1 => TailSpec::Const(finite(rng)),
                    _ => affine(rng, (-3, 3)),
                };
                (TailSpec::Const(ExtInt::PosInf), right)
            }
        };
        let m = SubmoduleSpec::new(assemble(rng, &values, left, right), field);
        debug_assert!(m.is_bounded());
        m
    }

    pub fn compactoid(rng: &mut Rng, field: FieldKind) -> SubmoduleSpec {
        loop {
            let m = bounded(rng, field);
            if m.is_compactoid() {
                return m;
            }
        }
    }

    pub fn unbounded(rng: &mut Rng, field: FieldKind) -> SubmoduleSpec {
        loop {
            let m = submodule(rng, field);
            if !m.is_bounded() {
                return m;
            }
        }
    }

    /// A random series on `window`; with `tails`, mixed series may carry
    /// tail bounds and equal series a truncation.
    pub fn series(rng: &mut Rng, field: FieldKind, prime: u64, window: Window, digits: i64, tails: bool) -> Series {
        let coeffs: Vec<PAdic> = (window.0..=window.1)
            .map(|_| {
                if rng.chance(1, 4) {
                    PAdic::zero(prime)
                } else {
                    let v = rng.range(-6, 6);
                    random_coeff(rng, prime, v, digits)
                }
            })
            .collect();
        match field {
            FieldKind::EqualChar => {
                let trunc = (tails && rng.chance(1, 2)).then_some(window.1 + 1);
                EqualCharSeries::new(prime, window.0, coeffs, trunc).expect("valid series").into()
            }
            FieldKind::MixedChar => {
                let left = if tails && rng.chance(1, 2) {
                    LeftTail::Bound { slope: rng.range(1, 3), base: rng.range(-3, 6) }
                } else {
                    LeftTail::Zero
                };
                let right =
                    if tails && rng.chance(1, 2) { RightTail::Bound { floor: rng.range(-3, 6) } } else { RightTail::Zero };
                MixedSeries::new(prime, window.0, coeffs, left, right).expect("valid series").into()
            }
        }
    }

    pub fn field(rng: &mut Rng) -> FieldKind {
        if rng.chance(1, 2) {
            FieldKind::EqualChar
        } else {
            FieldKind::MixedChar
        }
    }

    /// A small prime.
    pub fn prime(rng: &mut Rng) -> u64 {
        *rng.pick(&[2, 3, 5, 7, 11])
    }
}
