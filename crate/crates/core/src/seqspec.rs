//! Extended integers and finitely presented integer sequences.
//!
//! A [`SeqSpec`] is a map `Z -> Z ∪ {±∞}` given by a finite window of explicit
//! values and two tails, each either constant or affine. Exponent sequences of
//! seminorms (`n_i`) and of submodules (`k_i`) are both stored this way.
//!
//! Every `SeqSpec` is kept in a canonical form (minimal window, normalized
//! tails), so structural equality coincides with pointwise equality and the
//! canonical JSON rendering is byte-stable.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest window a single operation is allowed to materialize.
pub const MAX_WINDOW: u64 = 1 << 20;

/// An element of `Z ∪ {-∞, +∞}`.
///
/// The derived order is the natural one: `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl ExtInt {
    pub const ZERO: ExtInt = ExtInt::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// Saturating addition. `+∞ + -∞` is an error.
    pub fn checked_add(self, rhs: ExtInt) -> Result<ExtInt> {
        use ExtInt::*;
        match (self, rhs) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::Indeterminate),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => a.checked_add(b).map(Finite).ok_or(Error::Overflow),
        }
    }

    pub fn checked_sub(self, rhs: ExtInt) -> Result<ExtInt> {
        self.checked_add(-rhs)
    }

    /// Addition of ideal exponents: `p^a · p^b = p^(a+b)` with `p^∞ = {0}`
    /// absorbing, so `+∞ + -∞ = +∞` here.
    pub fn add_ideal(self, rhs: ExtInt) -> Result<ExtInt> {
        if self == ExtInt::PosInf || rhs == ExtInt::PosInf {
            Ok(ExtInt::PosInf)
        } else {
            self.checked_add(rhs)
        }
    }

    /// `self + c` for a finite shift; infinities are fixed points.
    pub fn shift(self, c: i64) -> Result<ExtInt> {
        self.checked_add(ExtInt::Finite(c))
    }
}

impl Neg for ExtInt {
    type Output = ExtInt;

    fn neg(self) -> ExtInt {
        match self {
            ExtInt::NegInf => ExtInt::PosInf,
            ExtInt::PosInf => ExtInt::NegInf,
            ExtInt::Finite(n) => ExtInt::Finite(-n),
        }
    }
}

impl From<i64> for ExtInt {
    fn from(n: i64) -> Self {
        ExtInt::Finite(n)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => f.write_str("-inf"),
            ExtInt::PosInf => f.write_str("+inf"),
            ExtInt::Finite(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for ExtInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtInt::Finite(n) => s.serialize_i64(*n),
            ExtInt::PosInf => s.serialize_str("+inf"),
            ExtInt::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(ExtInt::Finite(n)),
            Raw::Str(s) => match s.as_str() {
                "+inf" => Ok(ExtInt::PosInf),
                "-inf" => Ok(ExtInt::NegInf),
                other => Err(serde::de::Error::custom(format!(
                    "expected an integer, \"+inf\" or \"-inf\", found \"{other}\""
                ))),
            },
        }
    }
}

/// Whether a value is exactly known or only bounded from above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    UpperBound,
}

/// A quantity `q^exponent` in log-`q` scale; `-∞` stands for `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentResult {
    pub exponent: ExtInt,
    pub exactness: Exactness,
}

impl ExponentResult {
    pub fn exact(exponent: ExtInt) -> Self {
        ExponentResult { exponent, exactness: Exactness::Exact }
    }

    pub fn upper_bound(exponent: ExtInt) -> Self {
        ExponentResult { exponent, exactness: Exactness::UpperBound }
    }

    pub fn is_exact(&self) -> bool {
        self.exactness == Exactness::Exact
    }
}

impl Serialize for ExponentResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExponentResult", 2)?;
        st.serialize_field("exact", &self.is_exact())?;
        st.serialize_field("exponent", &self.exponent)?;
        st.end()
    }
}

/// Behaviour of a sequence outside its window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TailSpec {
    Const(ExtInt),
    /// `slope·i + offset`; always finite.
    Affine { slope: i64, offset: i64 },
}

impl TailSpec {
    pub fn affine(slope: i64, offset: i64) -> TailSpec {
        TailSpec::Affine { slope, offset }.normalized()
    }

    pub fn constant(value: impl Into<ExtInt>) -> TailSpec {
        TailSpec::Const(value.into())
    }

    fn normalized(self) -> TailSpec {
        match self {
            TailSpec::Affine { slope: 0, offset } => TailSpec::Const(ExtInt::Finite(offset)),
            t => t,
        }
    }

    pub fn value_at(&self, i: i64) -> ExtInt {
        match *self {
            TailSpec::Const(c) => c,
            TailSpec::Affine { slope, offset } => {
                let v = (slope as i128) * (i as i128) + offset as i128;
                ExtInt::Finite(i64::try_from(v).expect("affine tail value exceeds i64"))
            }
        }
    }

    /// `(slope, offset)` when the tail is finite-valued.
    pub fn linear_parts(&self) -> Option<(i64, i64)> {
        match *self {
            TailSpec::Const(ExtInt::Finite(c)) => Some((0, c)),
            TailSpec::Affine { slope, offset } => Some((slope, offset)),
            TailSpec::Const(_) => None,
        }
    }

    pub fn slope(&self) -> i64 {
        self.linear_parts().map_or(0, |(s, _)| s)
    }

    fn shifted(self, c: i64) -> Result<TailSpec> {
        Ok(match self {
            TailSpec::Const(v) => TailSpec::Const(v.shift(c)?),
            TailSpec::Affine { slope, offset } => TailSpec::Affine {
                slope,
                offset: offset.checked_add(c).ok_or(Error::Overflow)?,
            },
        })
    }
}

/// Indices `⌊x⌋, ⌈x⌉` where two finite tails cross, if they are not parallel.
fn crossing(a: &TailSpec, b: &TailSpec) -> Option<(i64, i64)> {
    let (s1, o1) = a.linear_parts()?;
    let (s2, o2) = b.linear_parts()?;
    if s1 == s2 {
        return None;
    }
    let num = o2 - o1;
    let den = s1 - s2;
    Some((Integer::div_floor(&num, &den), Integer::div_ceil(&num, &den)))
}

/// A finitely presented sequence `Z -> Z ∪ {±∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqSpec {
    lo: i64,
    values: Vec<ExtInt>,
    left: TailSpec,
    right: TailSpec,
}

impl SeqSpec {
    /// Builds the canonical spec whose window starts at `lo`. `left` applies
    /// below `lo`, `right` above the last window index. An empty `values`
    /// places the split between `lo - 1` (left) and `lo` (right).
    pub fn new(lo: i64, values: Vec<ExtInt>, left: TailSpec, right: TailSpec) -> Result<SeqSpec> {
        let hi = lo + values.len() as i64 - 1;
        SeqSpec::from_fn(lo, hi, |i| values[(i - lo) as usize], left, right)
    }

    /// The same tail on both sides, e.g. `Const 0` for `O{{t}}`.
    pub fn uniform(tail: TailSpec) -> SeqSpec {
        SeqSpec::new(0, vec![], tail, tail).expect("uniform spec is representable")
    }

    pub fn constant(value: impl Into<ExtInt>) -> SeqSpec {
        SeqSpec::uniform(TailSpec::Const(value.into()))
    }

    /// Canonical spec of the function equal to `f` on `[lo, hi]` and to the
    /// tails outside it (`hi < lo` means an empty window).
    pub fn from_fn(
        lo: i64,
        hi: i64,
        f: impl Fn(i64) -> ExtInt,
        left: TailSpec,
        right: TailSpec,
    ) -> Result<SeqSpec> {
        let left = left.normalized();
        let right = right.normalized();
        let len = (hi as i128 - lo as i128 + 1).max(0);
        if len as u128 > MAX_WINDOW as u128 {
            return Err(Error::WindowTooLarge(len as u64));
        }
        let eval = |i: i64| {
            if i < lo {
                left.value_at(i)
            } else if i > hi {
                right.value_at(i)
            } else {
                f(i)
            }
        };

        // First index where the function leaves the left tail.
        let mut lo_max = (lo..=hi).find(|&i| eval(i) != left.value_at(i));
        if lo_max.is_none() && left != right {
            lo_max = (hi + 1..=hi + 2).find(|&i| right.value_at(i) != left.value_at(i));
        }
        // Last index where the function differs from the right tail.
        let mut hi_min = (lo..=hi).rev().find(|&i| eval(i) != right.value_at(i));
        if hi_min.is_none() && left != right {
            hi_min = (lo - 2..=lo - 1).rev().find(|&i| left.value_at(i) != right.value_at(i));
        }

        let (new_lo, new_hi) = match (lo_max, hi_min) {
            (Some(a), Some(b)) if a <= b => (a, b),
            (a, b) => {
                let lower = b.unwrap_or(i64::MIN);
                let upper = a.unwrap_or(i64::MAX);
                let j = 0i64.clamp(lower.min(upper), upper);
                (j, j)
            }
        };
        let values = (new_lo..=new_hi).map(eval).collect();
        Ok(SeqSpec { lo: new_lo, values, left, right })
    }

    pub fn window_lo(&self) -> i64 {
        self.lo
    }

    pub fn window_hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn window_values(&self) -> &[ExtInt] {
        &self.values
    }

    pub fn left(&self) -> TailSpec {
        self.left
    }

    pub fn right(&self) -> TailSpec {
        self.right
    }

    pub fn value_at(&self, i: i64) -> ExtInt {
        if i < self.lo {
            self.left.value_at(i)
        } else if i > self.window_hi() {
            self.right.value_at(i)
        } else {
            self.values[(i - self.lo) as usize]
        }
    }

    /// Iterator over the explicit window as `(index, value)` pairs.
    pub fn window(&self) -> impl Iterator<Item = (i64, ExtInt)> + '_ {
        self.values.iter().enumerate().map(move |(n, v)| (self.lo + n as i64, *v))
    }

    pub fn contains_value(&self, v: ExtInt) -> bool {
        self.values.contains(&v) || self.left == TailSpec::Const(v) || self.right == TailSpec::Const(v)
    }

    /// `inf_i s(i)`.
    pub fn infimum(&self) -> ExtInt {
        let window = self.values.iter().copied().min().unwrap_or(ExtInt::PosInf);
        let left = match self.left {
            TailSpec::Const(c) => c,
            TailSpec::Affine { slope, .. } if slope > 0 => ExtInt::NegInf,
            t => t.value_at(self.lo - 1),
        };
        let right = match self.right {
            TailSpec::Const(c) => c,
            TailSpec::Affine { slope, .. } if slope < 0 => ExtInt::NegInf,
            t => t.value_at(self.window_hi() + 1),
        };
        window.min(left).min(right)
    }

    /// `sup_i s(i)`.
    pub fn supremum(&self) -> ExtInt {
        -self.negated().infimum()
    }

    fn negated(&self) -> SeqSpec {
        let neg_tail = |t: TailSpec| match t {
            TailSpec::Const(c) => TailSpec::Const(-c),
            TailSpec::Affine { slope, offset } => TailSpec::Affine { slope: -slope, offset: -offset },
        };
        SeqSpec {
            lo: self.lo,
            values: self.values.iter().map(|v| -*v).collect(),
            left: neg_tail(self.left),
            right: neg_tail(self.right),
        }
    }

    /// `s(i) -> +∞` as `i -> -∞`.
    pub fn left_tends_to_pos_inf(&self) -> bool {
        matches!(self.left, TailSpec::Const(ExtInt::PosInf)) || self.left.slope() < 0
    }

    /// `s(i) -> -∞` as `i -> +∞`.
    pub fn right_tends_to_neg_inf(&self) -> bool {
        matches!(self.right, TailSpec::Const(ExtInt::NegInf)) || self.right.slope() < 0
    }

    /// `s(i) -> -∞` as `i -> -∞`.
    pub fn left_tends_to_neg_inf(&self) -> bool {
        matches!(self.left, TailSpec::Const(ExtInt::NegInf)) || self.left.slope() > 0
    }

    /// `s(i) -> +∞` as `i -> +∞`.
    pub fn right_tends_to_pos_inf(&self) -> bool {
        matches!(self.right, TailSpec::Const(ExtInt::PosInf)) || self.right.slope() > 0
    }
}

fn combine(a: &SeqSpec, b: &SeqSpec, pick: fn(ExtInt, ExtInt) -> ExtInt) -> Result<SeqSpec> {
    let mut lo = a.lo.min(b.lo);
    let mut hi = a.window_hi().max(b.window_hi());
    if let Some((x, _)) = crossing(&a.left, &b.left) {
        lo = lo.min(x);
    }
    if let Some((_, x)) = crossing(&a.right, &b.right) {
        hi = hi.max(x);
    }
    let choose = |ta: TailSpec, tb: TailSpec, at: i64| {
        if pick(ta.value_at(at), tb.value_at(at)) == ta.value_at(at) {
            ta
        } else {
            tb
        }
    };
    let left = choose(a.left, b.left, lo - 1);
    let right = choose(a.right, b.right, hi + 1);
    SeqSpec::from_fn(lo, hi, |i| pick(a.value_at(i), b.value_at(i)), left, right)
}

/// Pointwise minimum; the exponent sequence of a module sum.
pub fn pointwise_min(a: &SeqSpec, b: &SeqSpec) -> Result<SeqSpec> {
    combine(a, b, std::cmp::min)
}

/// Pointwise maximum; the exponent sequence of a module intersection.
pub fn pointwise_max(a: &SeqSpec, b: &SeqSpec) -> Result<SeqSpec> {
    combine(a, b, std::cmp::max)
}

fn reflect_value(a: i64, v: ExtInt) -> ExtInt {
    match v {
        ExtInt::PosInf => ExtInt::NegInf,
        ExtInt::NegInf => ExtInt::PosInf,
        ExtInt::Finite(n) => ExtInt::Finite(a - n),
    }
}

fn reflect_tail(a: i64, t: TailSpec) -> TailSpec {
    match t {
        TailSpec::Const(c) => TailSpec::Const(reflect_value(a, c)),
        // a - (s·(-i) + o) = s·i + (a - o)
        TailSpec::Affine { slope, offset } => TailSpec::Affine { slope, offset: a - offset },
    }
}

/// `i ↦ a - s(-i)`, saturating `a - (±∞) = ∓∞`.
pub fn reflect_affine(s: &SeqSpec, a: i64) -> SeqSpec {
    SeqSpec::from_fn(
        -s.window_hi(),
        -s.lo,
        |i| reflect_value(a, s.value_at(-i)),
        reflect_tail(a, s.right),
        reflect_tail(a, s.left),
    )
    .expect("reflection preserves the window size")
}

/// `i ↦ s(i) + c`.
pub fn shift_add(s: &SeqSpec, c: i64) -> Result<SeqSpec> {
    let values = s.values.iter().map(|v| v.shift(c)).collect::<Result<Vec<_>>>()?;
    SeqSpec::new(s.lo, values, s.left.shifted(c)?, s.right.shifted(c)?)
}

/// `i ↦ s(i + c)`: re-indexing, as caused by multiplication with `t^c`
/// on exponents read at `i + c`.
pub fn translate(s: &SeqSpec, c: i64) -> Result<SeqSpec> {
    let move_tail = |t: TailSpec| -> Result<TailSpec> {
        Ok(match t {
            TailSpec::Const(v) => TailSpec::Const(v),
            TailSpec::Affine { slope, offset } => TailSpec::Affine {
                slope,
                offset: slope
                    .checked_mul(c)
                    .and_then(|x| x.checked_add(offset))
                    .ok_or(Error::Overflow)?,
            },
        })
    };
    SeqSpec::new(s.lo - c, s.values.clone(), move_tail(s.left)?, move_tail(s.right)?)
}

// ---------------------------------------------------------------------------
// min-plus convolution

#[derive(Clone, Copy, Debug)]
enum Piece {
    Point(i64, ExtInt),
    /// indices `..=end`
    Left(i64, TailSpec),
    /// indices `start..`
    Right(i64, TailSpec),
}

/// Candidate values `func(k)` for `k` in `[from, to]`; `None` is unbounded.
#[derive(Clone, Copy, Debug)]
struct Segment {
    from: Option<i64>,
    to: Option<i64>,
    func: TailSpec,
}

impl Segment {
    fn new(from: Option<i64>, to: Option<i64>, func: TailSpec) -> Segment {
        Segment { from, to, func: func.normalized() }
    }

    fn covers(&self, k: i64) -> bool {
        self.from.map_or(true, |f| f <= k) && self.to.map_or(true, |t| k <= t)
    }
}

fn pieces(s: &SeqSpec) -> Vec<Piece> {
    let mut out = vec![Piece::Left(s.lo - 1, s.left), Piece::Right(s.window_hi() + 1, s.right)];
    out.extend(s.window().map(|(i, v)| Piece::Point(i, v)));
    out
}

/// The function `k ↦ u + f(k - i)`; `None` when it is identically `+∞`.
fn shift_tail(f: TailSpec, i: i64, u: ExtInt) -> Result<Option<TailSpec>> {
    Ok(match (u, f) {
        (ExtInt::PosInf, _) | (_, TailSpec::Const(ExtInt::PosInf)) => None,
        (ExtInt::NegInf, _) | (_, TailSpec::Const(ExtInt::NegInf)) => Some(TailSpec::Const(ExtInt::NegInf)),
        (ExtInt::Finite(u), TailSpec::Const(ExtInt::Finite(c))) => Some(TailSpec::Const(ExtInt::Finite(u + c))),
        (ExtInt::Finite(u), TailSpec::Affine { slope, offset }) => Some(TailSpec::Affine {
            slope,
            offset: offset
                .checked_add(u)
                .and_then(|x| x.checked_sub(slope.checked_mul(i)?))
                .ok_or(Error::Overflow)?,
        }),
    })
}

enum RayPair {
    Skip,
    NegInf,
    Linear((i64, i64), (i64, i64)),
}

fn classify_rays(f: TailSpec, g: TailSpec) -> RayPair {
    if f == TailSpec::Const(ExtInt::PosInf) || g == TailSpec::Const(ExtInt::PosInf) {
        return RayPair::Skip;
    }
    match (f.linear_parts(), g.linear_parts()) {
        (Some(a), Some(b)) => RayPair::Linear(a, b),
        _ => RayPair::NegInf,
    }
}

fn convolve_pair(p: Piece, q: Piece, out: &mut Vec<Segment>) -> Result<()> {
    use Piece::*;
    let neg = TailSpec::Const(ExtInt::NegInf);
    match (p, q) {
        (Point(i, u), Point(j, w)) => {
            let v = u.add_ideal(w)?;
            if v != ExtInt::PosInf {
                out.push(Segment::new(Some(i + j), Some(i + j), TailSpec::Const(v)));
            }
        }
        (Point(i, u), Left(e, f)) | (Left(e, f), Point(i, u)) => {
            if let Some(func) = shift_tail(f, i, u)? {
                out.push(Segment::new(None, Some(i + e), func));
            }
        }
        (Point(i, u), Right(st, f)) | (Right(st, f), Point(i, u)) => {
            if let Some(func) = shift_tail(f, i, u)? {
                out.push(Segment::new(Some(i + st), None, func));
            }
        }
        (Left(ea, f), Left(eb, g)) => match classify_rays(f, g) {
            RayPair::Skip => {}
            RayPair::NegInf => out.push(Segment::new(None, Some(ea + eb), neg)),
            RayPair::Linear((s1, o1), (s2, o2)) => {
                // i ranges over [k - eb, ea]; the linear objective is minimal at an end.
                let func = if s1 >= s2 {
                    TailSpec::Affine { slope: s1, offset: o1 + o2 + (s2 - s1) * eb }
                } else {
                    TailSpec::Affine { slope: s2, offset: o1 + o2 + (s1 - s2) * ea }
                };
                out.push(Segment::new(None, Some(ea + eb), func));
            }
        },
        (Right(sa, f), Right(sb, g)) => match classify_rays(f, g) {
            RayPair::Skip => {}
            RayPair::NegInf => out.push(Segment::new(Some(sa + sb), None, neg)),
            RayPair::Linear((s1, o1), (s2, o2)) => {
                // i ranges over [sa, k - sb].
                let func = if s1 >= s2 {
                    TailSpec::Affine { slope: s2, offset: o1 + o2 + (s1 - s2) * sa }
                } else {
                    TailSpec::Affine { slope: s1, offset: o1 + o2 + (s2 - s1) * sb }
                };
                out.push(Segment::new(Some(sa + sb), None, func));
            }
        },
        (Left(ea, f), Right(sb, g)) | (Right(sb, g), Left(ea, f)) => match classify_rays(f, g) {
            RayPair::Skip => {}
            RayPair::NegInf => out.push(Segment::new(None, None, neg)),
            RayPair::Linear((s1, o1), (s2, o2)) => {
                // i ranges over (-∞, min(ea, k - sb)].
                match (s1 - s2).cmp(&0) {
                    Ordering::Greater => out.push(Segment::new(None, None, neg)),
                    Ordering::Equal => {
                        out.push(Segment::new(None, None, TailSpec::Affine { slope: s2, offset: o1 + o2 }))
                    }
                    Ordering::Less => {
                        let b = ea + sb;
                        out.push(Segment::new(
                            None,
                            Some(b),
                            TailSpec::Affine { slope: s1, offset: o1 + o2 + (s2 - s1) * sb },
                        ));
                        out.push(Segment::new(
                            Some(b),
                            None,
                            TailSpec::Affine { slope: s2, offset: o1 + o2 + (s1 - s2) * ea },
                        ));
                    }
                }
            }
        },
    }
    Ok(())
}

fn lowest_at(funcs: &[TailSpec], k: i64) -> TailSpec {
    funcs
        .iter()
        .copied()
        .min_by_key(|f| f.value_at(k))
        .unwrap_or(TailSpec::Const(ExtInt::PosInf))
}

/// `(a ⊞ b)(k) = inf_{i+j=k} a(i) + b(j)`, where a pair containing `+∞`
/// contributes `+∞` (the ideal `p^∞ = {0}` annihilates everything).
pub fn minplus_convolve(a: &SeqSpec, b: &SeqSpec) -> Result<SeqSpec> {
    let mut segments = Vec::new();
    for p in pieces(a) {
        for q in pieces(b) {
            convolve_pair(p, q, &mut segments)?;
        }
    }

    let left_funcs: Vec<TailSpec> = segments.iter().filter(|s| s.from.is_none()).map(|s| s.func).collect();
    let right_funcs: Vec<TailSpec> = segments.iter().filter(|s| s.to.is_none()).map(|s| s.func).collect();

    let mut marks: Vec<i64> = segments.iter().flat_map(|s| [s.from, s.to]).flatten().collect();
    for (n, f) in left_funcs.iter().enumerate() {
        for g in &left_funcs[n + 1..] {
            if let Some((x, y)) = crossing(f, g) {
                marks.extend([x, y]);
            }
        }
    }
    for (n, f) in right_funcs.iter().enumerate() {
        for g in &right_funcs[n + 1..] {
            if let Some((x, y)) = crossing(f, g) {
                marks.extend([x, y]);
            }
        }
    }
    let lo = marks.iter().copied().min().unwrap_or(0);
    let hi = marks.iter().copied().max().unwrap_or(0);
    let len = (hi as i128 - lo as i128 + 1) as u128;
    if len > MAX_WINDOW as u128 {
        return Err(Error::WindowTooLarge(len as u64));
    }

    let direct = |k: i64| {
        segments
            .iter()
            .filter(|s| s.covers(k))
            .map(|s| s.func.value_at(k))
            .min()
            .unwrap_or(ExtInt::PosInf)
    };
    let mut window = vec![ExtInt::PosInf; len as usize];
    for s in &segments {
        let from = s.from.unwrap_or(lo).max(lo);
        let to = s.to.unwrap_or(hi).min(hi);
        for k in from..=to {
            let slot = &mut window[(k - lo) as usize];
            *slot = (*slot).min(s.func.value_at(k));
        }
    }

    let left = lowest_at(&left_funcs, lo - 1);
    let right = lowest_at(&right_funcs, hi + 1);
    for k in [lo - 1, lo - 2] {
        if left.value_at(k) != direct(k) {
            return Err(Error::NonRepresentableTail(format!("left tail disagrees at {k}")));
        }
    }
    for k in [hi + 1, hi + 2] {
        if right.value_at(k) != direct(k) {
            return Err(Error::NonRepresentableTail(format!("right tail disagrees at {k}")));
        }
    }
    SeqSpec::new(lo, window, left, right)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TailJson {
    Const { value: ExtInt },
    Affine { slope: i64, offset: i64 },
}

impl From<TailSpec> for TailJson {
    fn from(t: TailSpec) -> Self {
        match t {
            TailSpec::Const(value) => TailJson::Const { value },
            TailSpec::Affine { slope, offset } => TailJson::Affine { slope, offset },
        }
    }
}

impl From<TailJson> for TailSpec {
    fn from(t: TailJson) -> Self {
        match t {
            TailJson::Const { value } => TailSpec::Const(value),
            TailJson::Affine { slope, offset } => TailSpec::affine(slope, offset),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SeqSpecJson {
    window: BTreeMap<String, ExtInt>,
    left: TailJson,
    right: TailJson,
}

impl From<SeqSpec> for SeqSpecJson {
    fn from(s: SeqSpec) -> Self {
        SeqSpecJson {
            window: s.window().map(|(i, v)| (i.to_string(), v)).collect(),
            left: s.left.into(),
            right: s.right.into(),
        }
    }
}

impl TryFrom<SeqSpecJson> for SeqSpec {
    type Error = Error;

    /// An empty window puts index 0 on the left tail: `left` covers `i <= 0`
    /// and `right` covers `i > 0`.
    fn try_from(j: SeqSpecJson) -> Result<SeqSpec> {
        let mut entries = j
            .window
            .iter()
            .map(|(k, v)| {
                k.parse::<i64>()
                    .map(|i| (i, *v))
                    .map_err(|_| Error::InvalidInput(format!("window key `{k}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by_key(|e| e.0);
        let left = TailSpec::from(j.left);
        let right = TailSpec::from(j.right);
        if let Some(&(first, _)) = entries.first() {
            for (n, &(i, _)) in entries.iter().enumerate() {
                if i != first + n as i64 {
                    return Err(Error::InvalidInput(format!("window indices are not contiguous at {i}")));
                }
            }
            SeqSpec::new(first, entries.into_iter().map(|e| e.1).collect(), left, right)
        } else {
            SeqSpec::new(1, vec![], left, right)
        }
    }
}

impl Serialize for SeqSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeqSpecJson::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeqSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeqSpecJson::deserialize(d)?;
        SeqSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}
