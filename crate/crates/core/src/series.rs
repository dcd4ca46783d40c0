//! Elements of `K((t))` (equal characteristic) and `K{{t}}` (mixed
//! characteristic) over `K = Q_p`.
//!
//! Equal-characteristic elements are Laurent series known modulo `t^N`.
//! Mixed-characteristic elements are doubly infinite; outside an explicit
//! window only valuation lower bounds of the coefficients are known.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{CoeffJson, PAdic};
use crate::seqspec::{minplus_convolve, ExtInt, SeqSpec, TailSpec, MAX_WINDOW};

/// Which of the two fields an object lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    /// `K((t))`
    #[serde(rename = "equal")]
    EqualChar,
    /// `K{{t}}`
    #[serde(rename = "mixed")]
    MixedChar,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::EqualChar => "equal",
            FieldKind::MixedChar => "mixed",
        }
    }
}

impl std::str::FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(FieldKind::EqualChar),
            "mixed" => Ok(FieldKind::MixedChar),
            other => Err(Error::InvalidInput(format!("unknown field kind `{other}` (expected equal|mixed)"))),
        }
    }
}

/// A valuation together with whether it is exact or only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Valuation {
    pub value: ExtInt,
    pub exact: bool,
}

fn check_len(lo: i64, hi: i64) -> Result<()> {
    let len = hi as i128 - lo as i128 + 1;
    if len > MAX_WINDOW as i128 {
        return Err(Error::WindowTooLarge(len as u64));
    }
    Ok(())
}

fn same_prime(a: u64, b: u64) -> Result<()> {
    if a != b {
        return Err(Error::IncompatiblePrimes(a, b));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// K((t))

/// `Σ_{i ≥ order} x_i t^i`, known modulo `t^trunc` (`trunc = None`: exact).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualCharSeries {
    prime: u64,
    order: i64,
    coeffs: Vec<PAdic>,
    trunc: Option<i64>,
}

impl EqualCharSeries {
    /// Coefficients for `order, order + 1, ...`; with a truncation `N`, any
    /// index in `[order + len, N)` is an exact zero.
    pub fn new(prime: u64, order: i64, mut coeffs: Vec<PAdic>, trunc: Option<i64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::IncompatiblePrimes(prime, c.prime()));
        }
        if let Some(n) = trunc {
            let end = order + coeffs.len() as i64;
            if end > n {
                return Err(Error::InvalidInput(format!("coefficient at {} lies beyond O(t^{n})", end - 1)));
            }
            check_len(order, n)?;
            coeffs.resize((n - order) as usize, PAdic::zero(prime));
        }
        Ok(Self::canonical(prime, order, coeffs, trunc))
    }

    fn canonical(prime: u64, mut order: i64, mut coeffs: Vec<PAdic>, trunc: Option<i64>) -> Self {
        let lead = coeffs.iter().take_while(|c| c.is_exact_zero()).count();
        coeffs.drain(..lead);
        order += lead as i64;
        if trunc.is_none() {
            while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
                coeffs.pop();
            }
        }
        if coeffs.is_empty() {
            order = trunc.unwrap_or(0);
        }
        EqualCharSeries { prime, order, coeffs, trunc }
    }

    pub fn zero(prime: u64) -> Self {
        EqualCharSeries { prime, order: 0, coeffs: vec![], trunc: None }
    }

    pub fn monomial(c: PAdic, i: i64) -> Self {
        let prime = c.prime();
        Self::canonical(prime, i, vec![c], None)
    }

    /// Sum of `c t^i` terms (repeated indices are added).
    pub fn from_terms(prime: u64, terms: &[(i64, PAdic)], trunc: Option<i64>) -> Result<Self> {
        let mut acc: BTreeMap<i64, PAdic> = BTreeMap::new();
        for (i, c) in terms {
            same_prime(prime, c.prime())?;
            if trunc.is_some_and(|n| *i >= n) {
                continue;
            }
            let e = acc.entry(*i).or_insert_with(|| PAdic::zero(prime));
            *e = e.add(c)?;
        }
        let order = acc.keys().next().copied().or(trunc).unwrap_or(0);
        let end = acc.keys().next_back().map_or(order, |k| k + 1);
        check_len(order, end)?;
        let coeffs = (order..end).map(|i| acc.get(&i).cloned().unwrap_or_else(|| PAdic::zero(prime))).collect();
        Self::new(prime, order, coeffs, trunc)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Lower bound for the index of the first nonzero coefficient.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn coeffs(&self) -> &[PAdic] {
        &self.coeffs
    }

    /// One past the last stored index.
    pub fn known_end(&self) -> i64 {
        self.order + self.coeffs.len() as i64
    }

    /// Coefficient of `t^i`, `None` when `i` is at or beyond the truncation.
    pub fn coeff(&self, i: i64) -> Option<PAdic> {
        if self.trunc.is_some_and(|n| i >= n) {
            return None;
        }
        if i < self.order || i >= self.known_end() {
            return Some(PAdic::zero(self.prime));
        }
        Some(self.coeffs[(i - self.order) as usize].clone())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.trunc.is_none() && self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_prime(self.prime, other.prime)?;
        let trunc = match (self.trunc, other.trunc) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let order = self.order.min(other.order);
        let end = trunc.unwrap_or_else(|| self.known_end().max(other.known_end())).max(order);
        check_len(order, end)?;
        let coeffs = (order..end)
            .map(|i| self.coeff(i).expect("below truncation").add(&other.coeff(i).expect("below truncation")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.prime, order, coeffs, trunc)
    }

    pub fn neg(&self) -> Self {
        EqualCharSeries { coeffs: self.coeffs.iter().map(PAdic::neg).collect(), ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_prime(self.prime, other.prime)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        let (ox, oy) = (self.order, other.order);
        let trunc = match (self.trunc.map(|t| oy + t), other.trunc.map(|t| ox + t)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let order = ox + oy;
        let end = trunc.unwrap_or(self.known_end() + other.known_end() - 1).max(order);
        check_len(order, end)?;
        let mut coeffs = Vec::with_capacity((end - order) as usize);
        for k in order..end {
            let mut acc = PAdic::zero(self.prime);
            for i in ox..=k - oy {
                let (a, b) = (self.coeff(i).expect("below truncation"), other.coeff(k - i).expect("below truncation"));
                if !a.is_exact_zero() && !b.is_exact_zero() {
                    acc = acc.add(&a.mul(&b)?)?;
                }
            }
            coeffs.push(acc);
        }
        Self::new(self.prime, order, coeffs, trunc)
    }

    /// `S_n = Σ_{i ≤ n} x_i t^i`.
    pub fn partial_sum(&self, n: i64) -> Self {
        let keep = (n + 1 - self.order).clamp(0, self.coeffs.len() as i64) as usize;
        let trunc = self.trunc.filter(|&t| t <= n);
        let coeffs = self.coeffs[..keep].to_vec();
        Self::canonical(self.prime, self.order, coeffs, trunc)
    }

    /// `x - S_n = Σ_{i > n} x_i t^i`.
    pub fn remainder(&self, n: i64) -> Self {
        let start = (n + 1).max(self.order);
        let skip = ((start - self.order) as usize).min(self.coeffs.len());
        let order = if let Some(t) = self.trunc { start.min(t) } else { start };
        Self::canonical(self.prime, order, self.coeffs[skip..].to_vec(), self.trunc)
    }

    /// The rank-two valuation `(i₀, v_p(a_{i₀}))` at the first nonzero coefficient.
    pub fn rank2(&self) -> Result<(ExtInt, ExtInt)> {
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            return match c.exact_valuation() {
                Some(v) => Ok((ExtInt::Finite(self.order + n as i64), v)),
                None => Err(Error::PrecisionExhausted(format!(
                    "coefficient of t^{} is zero only modulo p^{}",
                    self.order + n as i64,
                    c.precision().unwrap_or(0)
                ))),
            };
        }
        match self.trunc {
            None => Err(Error::ZeroElement),
            Some(n) => Err(Error::PrecisionExhausted(format!("no nonzero coefficient below t^{n}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// K{{t}}

/// Guarantee for coefficients left of the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeftTail {
    Zero,
    /// `v(x_i) ≥ base + slope·(lo - i)` for `i < lo`; `slope ≥ 1`.
    Bound { slope: i64, base: i64 },
}

/// Guarantee for coefficients right of the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RightTail {
    Zero,
    /// `v(x_i) ≥ floor` for `i > hi`.
    Bound { floor: i64 },
}

/// `Σ_{i ∈ Z} x_i t^i` with `inf v(x_i) > -∞` and `x_i → 0` as `i → -∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedSeries {
    prime: u64,
    lo: i64,
    coeffs: Vec<PAdic>,
    left: LeftTail,
    right: RightTail,
}

impl MixedSeries {
    pub fn new(prime: u64, lo: i64, coeffs: Vec<PAdic>, left: LeftTail, right: RightTail) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("a mixed series needs at least one window coefficient".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::IncompatiblePrimes(prime, c.prime()));
        }
        if let LeftTail::Bound { slope, .. } = left {
            if slope < 1 {
                return Err(Error::InvalidInput(format!(
                    "left tail slope must be at least 1 for coefficients to tend to 0, got {slope}"
                )));
            }
        }
        check_len(lo, lo + coeffs.len() as i64 - 1)?;
        Ok(Self::canonical(prime, lo, coeffs, left, right))
    }

    fn canonical(prime: u64, mut lo: i64, mut coeffs: Vec<PAdic>, left: LeftTail, right: RightTail) -> Self {
        if left == LeftTail::Zero {
            let lead = coeffs.iter().take_while(|c| c.is_exact_zero()).count().min(coeffs.len() - 1);
            coeffs.drain(..lead);
            lo += lead as i64;
        }
        if right == RightTail::Zero {
            while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_exact_zero()) {
                coeffs.pop();
            }
        }
        if coeffs.len() == 1 && coeffs[0].is_exact_zero() && left == LeftTail::Zero && right == RightTail::Zero {
            lo = 0;
        }
        MixedSeries { prime, lo, coeffs, left, right }
    }

    pub fn zero(prime: u64) -> Self {
        MixedSeries { prime, lo: 0, coeffs: vec![PAdic::zero(prime)], left: LeftTail::Zero, right: RightTail::Zero }
    }

    pub fn monomial(c: PAdic, i: i64) -> Self {
        let prime = c.prime();
        Self::canonical(prime, i, vec![c], LeftTail::Zero, RightTail::Zero)
    }

    /// Finite sum of `c t^i` terms with the given tails; the window is the
    /// range of the term indices (or `{0}` when there are none).
    pub fn from_terms(prime: u64, terms: &[(i64, PAdic)], left: LeftTail, right: RightTail) -> Result<Self> {
        let mut acc: BTreeMap<i64, PAdic> = BTreeMap::new();
        for (i, c) in terms {
            same_prime(prime, c.prime())?;
            let e = acc.entry(*i).or_insert_with(|| PAdic::zero(prime));
            *e = e.add(c)?;
        }
        let lo = acc.keys().next().copied().unwrap_or(0);
        let hi = acc.keys().next_back().copied().unwrap_or(0);
        check_len(lo, hi)?;
        let coeffs = (lo..=hi).map(|i| acc.get(&i).cloned().unwrap_or_else(|| PAdic::zero(prime))).collect();
        Self::new(prime, lo, coeffs, left, right)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[PAdic] {
        &self.coeffs
    }

    pub fn left(&self) -> LeftTail {
        self.left
    }

    pub fn right(&self) -> RightTail {
        self.right
    }

    pub fn is_exact_zero(&self) -> bool {
        self.left == LeftTail::Zero
            && self.right == RightTail::Zero
            && self.coeffs.iter().all(PAdic::is_exact_zero)
    }

    /// Certified lower bound for `v(x_i)` coming from the tails (`+∞` for zero tails).
    pub fn tail_bound_at(&self, i: i64) -> ExtInt {
        if i < self.lo {
            match self.left {
                LeftTail::Zero => ExtInt::PosInf,
                LeftTail::Bound { slope, base } => ExtInt::Finite(base + slope * (self.lo - i)),
            }
        } else if i > self.hi() {
            match self.right {
                RightTail::Zero => ExtInt::PosInf,
                RightTail::Bound { floor } => ExtInt::Finite(floor),
            }
        } else {
            ExtInt::NegInf
        }
    }

    /// Coefficient of `t^i`; tail coefficients are `0 + O(p^bound)`.
    pub fn coeff_at(&self, i: i64) -> PAdic {
        if (self.lo..=self.hi()).contains(&i) {
            return self.coeffs[(i - self.lo) as usize].clone();
        }
        match self.tail_bound_at(i) {
            ExtInt::Finite(b) => PAdic::zero_mod(self.prime, b),
            _ => PAdic::zero(self.prime),
        }
    }

    /// `inf_i` of the certified coefficient lower bounds.
    pub fn valuation_floor(&self) -> ExtInt {
        let window = self.coeffs.iter().map(PAdic::valuation_lower_bound).min().unwrap_or(ExtInt::PosInf);
        window.min(self.tail_bound_at(self.lo - 1)).min(self.tail_bound_at(self.hi() + 1))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_prime(self.prime, other.prime)?;
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        check_len(lo, hi)?;
        let coeffs = (lo..=hi).map(|i| self.coeff_at(i).add(&other.coeff_at(i))).collect::<Result<Vec<_>>>()?;
        let rebase = |x: &Self| match x.left {
            LeftTail::Zero => None,
            LeftTail::Bound { slope, base } => Some((slope, base + slope * (x.lo - lo))),
        };
        let left = match (rebase(self), rebase(other)) {
            (None, None) => LeftTail::Zero,
            (Some((s, b)), None) | (None, Some((s, b))) => LeftTail::Bound { slope: s, base: b },
            (Some((s1, b1)), Some((s2, b2))) => LeftTail::Bound { slope: s1.min(s2), base: b1.min(b2) },
        };
        let right = match (self.right, other.right) {
            (RightTail::Zero, r) | (r, RightTail::Zero) => r,
            (RightTail::Bound { floor: a }, RightTail::Bound { floor: b }) => RightTail::Bound { floor: a.min(b) },
        };
        Self::new(self.prime, lo, coeffs, left, right)
    }

    pub fn neg(&self) -> Self {
        MixedSeries { coeffs: self.coeffs.iter().map(PAdic::neg).collect(), ..self.clone() }
    }

    /// Valuation lower bounds as a sequence (`+∞` marks certified zeros).
    pub(crate) fn bound_spec(&self) -> SeqSpec {
        let values = self.coeffs.iter().map(PAdic::valuation_lower_bound).collect();
        self.with_window_values(values)
    }

    /// Tail bounds only; the window is `+∞`.
    pub(crate) fn tail_spec(&self) -> SeqSpec {
        self.with_window_values(vec![ExtInt::PosInf; self.coeffs.len()])
    }

    fn with_window_values(&self, values: Vec<ExtInt>) -> SeqSpec {
        let left = match self.left {
            LeftTail::Zero => TailSpec::Const(ExtInt::PosInf),
            LeftTail::Bound { slope, base } => TailSpec::affine(-slope, base + slope * self.lo),
        };
        let right = match self.right {
            RightTail::Zero => TailSpec::Const(ExtInt::PosInf),
            RightTail::Bound { floor } => TailSpec::constant(floor),
        };
        SeqSpec::new(self.lo, values, left, right).expect("window already validated")
    }

    /// Default precision target for products: `floor(x) + floor(y) + 16`.
    pub fn default_mul_target(&self, other: &Self) -> i64 {
        let f = |x: &Self| x.valuation_floor().finite().unwrap_or(0);
        f(self) + f(other) + 16
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with_target(other, None)
    }

    /// `z_k = Σ_{i+j=k} x_i y_j`. Window pairs are summed exactly; pairs
    /// involving a tail only contribute to the precision of `z_k`, which is
    /// capped at `target` but never below the certified bound for `z_k`.
    pub fn mul_with_target(&self, other: &Self, target: Option<i64>) -> Result<Self> {
        same_prime(self.prime, other.prime)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.prime));
        }
        let target = target.unwrap_or_else(|| self.default_mul_target(other));
        let (vx, vy) = (self.bound_spec(), other.bound_spec());
        let vz = minplus_convolve(&vx, &vy)?;
        let cap_x = minplus_convolve(&self.tail_spec(), &vy)?;
        let cap_y = minplus_convolve(&vx, &other.tail_spec())?;

        let lo = vz.window_lo().min(self.lo + other.lo);
        let hi = vz.window_hi().max(self.hi() + other.hi());
        check_len(lo, hi)?;
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for k in lo..=hi {
            let mut acc = PAdic::zero(self.prime);
            let from = self.lo.max(k - other.hi());
            let to = self.hi().min(k - other.lo);
            for i in from..=to {
                let (a, b) = (&self.coeffs[(i - self.lo) as usize], &other.coeffs[(k - i - other.lo) as usize]);
                if !a.is_exact_zero() && !b.is_exact_zero() {
                    acc = acc.add(&a.mul(b)?)?;
                }
            }
            let cap = cap_x.value_at(k).min(cap_y.value_at(k));
            if let ExtInt::Finite(c) = cap {
                let floor = vz.value_at(k).finite().unwrap_or(c);
                acc = acc.with_precision_cap(c.min(target).max(floor));
            }
            coeffs.push(acc);
        }

        let left = match vz.left() {
            TailSpec::Const(ExtInt::PosInf) => LeftTail::Zero,
            TailSpec::Affine { slope, offset } if slope <= -1 => LeftTail::Bound { slope: -slope, base: offset + slope * lo },
            t => return Err(Error::NonRepresentableTail(format!("product left tail {t:?} does not tend to +inf"))),
        };
        let right = match vz.right() {
            TailSpec::Const(ExtInt::PosInf) => RightTail::Zero,
            TailSpec::Const(ExtInt::Finite(d)) => RightTail::Bound { floor: d },
            t @ TailSpec::Affine { slope, .. } if slope > 0 => {
                RightTail::Bound { floor: t.value_at(hi + 1).finite().expect("affine") }
            }
            t => return Err(Error::NonRepresentableTail(format!("product right tail {t:?} is unbounded below"))),
        };
        Self::new(self.prime, lo, coeffs, left, right)
    }

    /// `S_n = Σ_{i ≤ n} x_i t^i`.
    pub fn partial_sum(&self, n: i64) -> Result<Self> {
        if n < self.lo {
            return match self.left {
                LeftTail::Zero => Ok(Self::zero(self.prime)),
                LeftTail::Bound { slope, base } => {
                    let base = base + slope * (self.lo - n);
                    Self::new(self.prime, n, vec![PAdic::zero_mod(self.prime, base)], LeftTail::Bound { slope, base }, RightTail::Zero)
                }
            };
        }
        check_len(self.lo, n.min(self.hi().max(n)))?;
        let end = match self.right {
            RightTail::Zero => n.min(self.hi()),
            RightTail::Bound { .. } => n,
        };
        let coeffs = (self.lo..=end).map(|i| self.coeff_at(i)).collect();
        Self::new(self.prime, self.lo, coeffs, self.left, RightTail::Zero)
    }

    /// `x - S_n = Σ_{i > n} x_i t^i`.
    pub fn remainder(&self, n: i64) -> Result<Self> {
        if n >= self.hi() {
            return match self.right {
                RightTail::Zero => Ok(Self::zero(self.prime)),
                RightTail::Bound { floor } => {
                    Self::new(self.prime, n + 1, vec![PAdic::zero_mod(self.prime, floor)], LeftTail::Zero, self.right)
                }
            };
        }
        check_len(n + 1, self.hi())?;
        let start = if self.left == LeftTail::Zero { (n + 1).max(self.lo) } else { n + 1 };
        let coeffs = (start..=self.hi()).map(|i| self.coeff_at(i)).collect();
        Self::new(self.prime, start, coeffs, LeftTail::Zero, self.right)
    }

    /// `v_F(x) = inf_i v_p(x_i)`, exact when an exactly known coefficient
    /// attains the infimum of all certified bounds.
    pub fn field_valuation(&self) -> Valuation {
        let exact = self
            .coeffs
            .iter()
            .filter(|c| c.is_nonzero())
            .filter_map(PAdic::exact_valuation)
            .min()
            .unwrap_or(ExtInt::PosInf);
        let bounds = self
            .coeffs
            .iter()
            .filter(|c| c.is_zero_within())
            .map(PAdic::valuation_lower_bound)
            .chain([self.tail_bound_at(self.lo - 1), self.tail_bound_at(self.hi() + 1)])
            .min()
            .unwrap_or(ExtInt::PosInf);
        if exact <= bounds {
            Valuation { value: exact, exact: true }
        } else {
            Valuation { value: bounds, exact: false }
        }
    }

    /// The rank-two valuation `(v1, v2)` with `v1 = inf v_p(x_i)` and
    /// `v2 = inf{ i : x_i ∉ p^{v1+1} }`.
    pub fn rank2(&self) -> Result<(ExtInt, ExtInt)> {
        if self.is_exact_zero() {
            return Err(Error::ZeroElement);
        }
        let v = self.field_valuation();
        let ExtInt::Finite(v1) = v.value else {
            return Err(Error::ZeroElement);
        };
        if !v.exact {
            return Err(Error::PrecisionExhausted(format!("v_F is only known to be at least {v1}")));
        }
        if self.tail_bound_at(self.lo - 1) <= ExtInt::Finite(v1) {
            return Err(Error::PrecisionExhausted("left tail may contain a coefficient of minimal valuation".into()));
        }
        for (n, c) in self.coeffs.iter().enumerate() {
            match c.exact_valuation() {
                Some(ExtInt::Finite(w)) if w == v1 => return Ok((v.value, ExtInt::Finite(self.lo + n as i64))),
                None if c.valuation_lower_bound() <= ExtInt::Finite(v1) => {
                    return Err(Error::PrecisionExhausted(format!(
                        "coefficient of t^{} is undetermined at valuation {v1}",
                        self.lo + n as i64
                    )))
                }
                _ => {}
            }
        }
        unreachable!("an exact v_F is attained in the window")
    }
}

// ---------------------------------------------------------------------------
// Either field

/// An element of `K((t))` or `K{{t}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Series {
    Equal(EqualCharSeries),
    Mixed(MixedSeries),
}

impl From<EqualCharSeries> for Series {
    fn from(x: EqualCharSeries) -> Self {
        Series::Equal(x)
    }
}

impl From<MixedSeries> for Series {
    fn from(x: MixedSeries) -> Self {
        Series::Mixed(x)
    }
}

fn mismatch() -> Error {
    Error::KindMismatch("cannot combine an equal-characteristic and a mixed-characteristic series".into())
}

impl Series {
    pub fn zero(kind: FieldKind, prime: u64) -> Series {
        match kind {
            FieldKind::EqualChar => EqualCharSeries::zero(prime).into(),
            FieldKind::MixedChar => MixedSeries::zero(prime).into(),
        }
    }

    pub fn monomial(kind: FieldKind, c: PAdic, i: i64) -> Series {
        match kind {
            FieldKind::EqualChar => EqualCharSeries::monomial(c, i).into(),
            FieldKind::MixedChar => MixedSeries::monomial(c, i).into(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            Series::Equal(_) => FieldKind::EqualChar,
            Series::Mixed(_) => FieldKind::MixedChar,
        }
    }

    pub fn prime(&self) -> u64 {
        match self {
            Series::Equal(x) => x.prime(),
            Series::Mixed(x) => x.prime(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Series::Equal(x) => x.is_exact_zero(),
            Series::Mixed(x) => x.is_exact_zero(),
        }
    }

    /// Coefficient of `t^i`; `None` only beyond an equal-characteristic truncation.
    pub fn coeff(&self, i: i64) -> Option<PAdic> {
        match self {
            Series::Equal(x) => x.coeff(i),
            Series::Mixed(x) => Some(x.coeff_at(i)),
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        match (self, other) {
            (Series::Equal(a), Series::Equal(b)) => a.add(b).map(Into::into),
            (Series::Mixed(a), Series::Mixed(b)) => a.add(b).map(Into::into),
            _ => Err(mismatch()),
        }
    }

    pub fn neg(&self) -> Series {
        match self {
            Series::Equal(x) => x.neg().into(),
            Series::Mixed(x) => x.neg().into(),
        }
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.mul_with_target(other, None)
    }

    /// Product; `target` only affects mixed-characteristic precision.
    pub fn mul_with_target(&self, other: &Series, target: Option<i64>) -> Result<Series> {
        match (self, other) {
            (Series::Equal(a), Series::Equal(b)) => a.mul(b).map(Into::into),
            (Series::Mixed(a), Series::Mixed(b)) => a.mul_with_target(b, target).map(Into::into),
            _ => Err(mismatch()),
        }
    }

    /// `λ·x` for a constant `λ ∈ K`.
    pub fn scale(&self, c: &PAdic) -> Result<Series> {
        self.mul(&Series::monomial(self.kind(), c.clone(), 0))
    }

    pub fn partial_sum(&self, n: i64) -> Result<Series> {
        match self {
            Series::Equal(x) => Ok(x.partial_sum(n).into()),
            Series::Mixed(x) => x.partial_sum(n).map(Into::into),
        }
    }

    pub fn remainder(&self, n: i64) -> Result<Series> {
        match self {
            Series::Equal(x) => Ok(x.remainder(n).into()),
            Series::Mixed(x) => x.remainder(n).map(Into::into),
        }
    }

    /// Per-index valuation information used by seminorm evaluation.
    pub(crate) fn profile(&self) -> Profile {
        let info = |c: &PAdic| match c.exact_valuation() {
            Some(v) => CoeffInfo::Exact(v),
            None => CoeffInfo::AtLeast(c.valuation_lower_bound()),
        };
        match self {
            Series::Equal(x) => Profile {
                lo: x.order,
                window: x.coeffs.iter().map(info).collect(),
                left: RayInfo::Exact(TailSpec::Const(ExtInt::PosInf)),
                right: if x.trunc.is_some() { RayInfo::Unknown } else { RayInfo::Exact(TailSpec::Const(ExtInt::PosInf)) },
            },
            Series::Mixed(x) => {
                let spec = x.tail_spec();
                let ray = |t: TailSpec| match t {
                    TailSpec::Const(ExtInt::PosInf) => RayInfo::Exact(t),
                    t => RayInfo::AtLeast(t),
                };
                Profile {
                    lo: x.lo,
                    window: x.coeffs.iter().map(info).collect(),
                    left: ray(spec.left()),
                    right: ray(spec.right()),
                }
            }
        }
    }
}

/// What is known about `v(x_i)` at one index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CoeffInfo {
    /// Exact valuation; `+∞` is a certified zero.
    Exact(ExtInt),
    /// Lower bound only.
    AtLeast(ExtInt),
}

/// What is known about `v(x_i)` along a ray outside the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RayInfo {
    Exact(TailSpec),
    AtLeast(TailSpec),
    Unknown,
}

/// Valuation information of a series: window `[lo, lo + len)`, left ray
/// `i < lo`, right ray `i ≥ lo + len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Profile {
    pub lo: i64,
    pub window: Vec<CoeffInfo>,
    pub left: RayInfo,
    pub right: RayInfo,
}

impl Profile {
    /// Exact valuations given by a sequence (used for module generators `p^{k_i} t^i`).
    pub fn exact(s: &SeqSpec) -> Profile {
        Profile {
            lo: s.window_lo(),
            window: s.window_values().iter().map(|v| CoeffInfo::Exact(*v)).collect(),
            left: RayInfo::Exact(s.left()),
            right: RayInfo::Exact(s.right()),
        }
    }

    pub fn end(&self) -> i64 {
        self.lo + self.window.len() as i64
    }

    pub fn at(&self, i: i64) -> CoeffInfo {
        let ray = |r: RayInfo| match r {
            RayInfo::Exact(t) => CoeffInfo::Exact(t.value_at(i)),
            RayInfo::AtLeast(t) => CoeffInfo::AtLeast(t.value_at(i)),
            RayInfo::Unknown => CoeffInfo::AtLeast(ExtInt::NegInf),
        };
        if i < self.lo {
            ray(self.left)
        } else if i >= self.end() {
            ray(self.right)
        } else {
            self.window[(i - self.lo) as usize]
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum LeftJson {
    Zero,
    Bound { slope: i64, base: i64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RightJson {
    Zero,
    Bound { floor: i64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SeriesJson {
    Equal { prime: u64, order: i64, coeffs: Vec<CoeffJson>, trunc: Option<i64> },
    Mixed { prime: u64, lo: i64, coeffs: Vec<CoeffJson>, left: LeftJson, right: RightJson },
}

impl From<&Series> for SeriesJson {
    fn from(s: &Series) -> Self {
        match s {
            Series::Equal(x) => SeriesJson::Equal {
                prime: x.prime,
                order: x.order,
                coeffs: x.coeffs.iter().map(CoeffJson::from).collect(),
                trunc: x.trunc,
            },
            Series::Mixed(x) => SeriesJson::Mixed {
                prime: x.prime,
                lo: x.lo,
                coeffs: x.coeffs.iter().map(CoeffJson::from).collect(),
                left: match x.left {
                    LeftTail::Zero => LeftJson::Zero,
                    LeftTail::Bound { slope, base } => LeftJson::Bound { slope, base },
                },
                right: match x.right {
                    RightTail::Zero => RightJson::Zero,
                    RightTail::Bound { floor } => RightJson::Bound { floor },
                },
            },
        }
    }
}

impl TryFrom<SeriesJson> for Series {
    type Error = Error;

    fn try_from(j: SeriesJson) -> Result<Series> {
        let coeffs = |prime: u64, cs: Vec<CoeffJson>| cs.into_iter().map(|c| c.into_padic(prime)).collect::<Result<Vec<_>>>();
        let s: Series = match j {
            SeriesJson::Equal { prime, order, coeffs: cs, trunc } => {
                EqualCharSeries::new(prime, order, coeffs(prime, cs)?, trunc)?.into()
            }
            SeriesJson::Mixed { prime, lo, coeffs: cs, left, right } => {
                let left = match left {
                    LeftJson::Zero => LeftTail::Zero,
                    LeftJson::Bound { slope, base } => LeftTail::Bound { slope, base },
                };
                let right = match right {
                    RightJson::Zero => RightTail::Zero,
                    RightJson::Bound { floor } => RightTail::Bound { floor },
                };
                MixedSeries::new(prime, lo, coeffs(prime, cs)?, left, right)?.into()
            }
        };
        Ok(s)
    }
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Series::try_from(SeriesJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
