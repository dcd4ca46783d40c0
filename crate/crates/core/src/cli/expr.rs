//! Series literals: parsing and rendering.
//!
//! ```text
//! series   = [sign] item { sign item } ;
//! item     = "O" "(" "t" "^" exponent ")"
//!          | "tail_left" "(" exponent "," exponent "," exponent ")"
//!          | "tail_right" "(" exponent "," exponent ")"
//!          | term ;
//! term     = factor { ("*" | "/") factor } ;
//! factor   = integer | "p" [ "^" exponent ] | "t" [ "^" exponent ] | "(" coeff ")" ;
//! coeff    = bigo_p | [sign] cterm { sign cterm } [ "+" bigo_p ] ;
//! bigo_p   = "O" "(" "p" [ "^" exponent ] ")" ;
//! cterm    = cfactor { ("*" | "/") cfactor } ;
//! cfactor  = integer | "p" [ "^" exponent ] ;
//! exponent = [ "-" ] integer ;
//! sign     = "+" | "-" ;
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::PAdic;
use crate::series::{EqualCharSeries, FieldKind, LeftTail, MixedSeries, RightTail, Series};

/// Largest accepted `|exponent|` in a literal.
const MAX_EXPONENT: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            Tok::Int(text.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if "+-*/^(),".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(parse_error(l0, c0, format!("unexpected character `{c}`")));
        };
        column += i - start;
        out.push(Token { tok, line: l0, column: c0 });
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Exact value `num/den · p^v` with `p ∤ num·den`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lit {
    num: BigInt,
    den: BigInt,
    v: i64,
}

impl Lit {
    fn one() -> Lit {
        Lit { num: BigInt::one(), den: BigInt::one(), v: 0 }
    }

    fn normalized(num: BigInt, den: BigInt, v: i64, p: u64) -> Lit {
        if num.is_zero() {
            return Lit { num, den: BigInt::one(), v: 0 };
        }
        let bp = BigInt::from(p);
        let (mut num, mut den, mut v) = (num, den, v);
        while (&num % &bp).is_zero() {
            num /= &bp;
            v += 1;
        }
        while (&den % &bp).is_zero() {
            den /= &bp;
            v -= 1;
        }
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Lit { num, den, v }
    }

    fn mul(&self, o: &Lit, p: u64) -> Lit {
        Lit::normalized(&self.num * &o.num, &self.den * &o.den, self.v + o.v, p)
    }

    fn div(&self, o: &Lit, p: u64) -> Lit {
        Lit::normalized(&self.num * &o.den, &self.den * &o.num, self.v - o.v, p)
    }

    fn add(&self, o: &Lit, p: u64) -> Lit {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        let v = self.v.min(o.v);
        let scale = |x: &Lit| &x.num * BigInt::from(p).pow((x.v - v) as u32);
        let num = scale(self) * &o.den + scale(o) * &self.den;
        Lit::normalized(num, &self.den * &o.den, v, p)
    }

    fn neg(&self) -> Lit {
        Lit { num: -&self.num, ..self.clone() }
    }
}

/// A coefficient factor: exact value plus an optional absolute precision.
struct Group {
    value: Lit,
    precision: Option<i64>,
}

struct Term {
    index: i64,
    coeff: PAdic,
}

enum Item {
    Term(Term),
    Trunc(i64),
    Left { lo: i64, slope: i64, base: i64 },
    Right { hi: i64, floor: i64 },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    prime: u64,
    digits: i64,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> Error {
        let t = self.peek();
        parse_error(t.line, t.column, message)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == name)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected `{c}`")))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<()> {
        if self.is_ident(name) {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected `{name}`")))
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = if self.is_sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let t = self.peek().clone();
        let Tok::Int(n) = &t.tok else {
            return Err(self.err_here("expected an integer exponent"));
        };
        let n = n.to_i64().filter(|n| *n <= MAX_EXPONENT).ok_or_else(|| {
            parse_error(t.line, t.column, format!("exponent exceeds {MAX_EXPONENT} in absolute value"))
        })?;
        self.bump();
        Ok(if neg { -n } else { n })
    }

    fn optional_power(&mut self) -> Result<i64> {
        if self.is_sym('^') {
            self.bump();
            self.exponent()
        } else {
            Ok(1)
        }
    }

    fn p_power(&self, e: i64) -> Lit {
        Lit { num: BigInt::one(), den: BigInt::one(), v: e }
    }

    /// `O(p^a)` after the `O` has been seen.
    fn bigo_p(&mut self) -> Result<i64> {
        self.expect_ident("O")?;
        self.expect_sym('(')?;
        self.expect_ident("p")?;
        let a = self.optional_power()?;
        self.expect_sym(')')?;
        Ok(a)
    }

    fn cfactor(&mut self) -> Result<Lit> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Lit::normalized(n.clone(), BigInt::one(), 0, self.prime))
            }
            Tok::Ident(s) if s == "p" => {
                self.bump();
                let e = self.optional_power()?;
                Ok(self.p_power(e))
            }
            _ => Err(self.err_here("expected an integer or `p`")),
        }
    }

    fn divide(&self, a: &Lit, b: &Lit, at: &Token) -> Result<Lit> {
        if b.num.is_zero() {
            return Err(parse_error(at.line, at.column, "division by zero"));
        }
        Ok(a.div(b, self.prime))
    }

    fn cterm(&mut self) -> Result<Lit> {
        let mut acc = self.cfactor()?;
        loop {
            if self.is_sym('*') {
                self.bump();
                acc = acc.mul(&self.cfactor()?, self.prime);
            } else if self.is_sym('/') {
                self.bump();
                let at = self.peek().clone();
                let f = self.cfactor()?;
                acc = self.divide(&acc, &f, &at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    /// Contents of a parenthesised coefficient.
    fn coeff(&mut self) -> Result<Group> {
        if self.is_ident("O") {
            let a = self.bigo_p()?;
            return Ok(Group { value: Lit::normalized(BigInt::zero(), BigInt::one(), 0, self.prime), precision: Some(a) });
        }
        let mut neg = false;
        if self.is_sym('-') || self.is_sym('+') {
            neg = self.bump().tok == Tok::Sym('-');
        }
        let first = self.cterm()?;
        let mut acc = if neg { first.neg() } else { first };
        let mut precision = None;
        while self.is_sym('+') || self.is_sym('-') {
            let minus = self.bump().tok == Tok::Sym('-');
            if !minus && self.is_ident("O") {
                precision = Some(self.bigo_p()?);
                break;
            }
            let t = self.cterm()?;
            acc = acc.add(&if minus { t.neg() } else { t }, self.prime);
        }
        Ok(Group { value: acc, precision })
    }

    fn term(&mut self) -> Result<Term> {
        let mut value = Lit::one();
        let mut index = 0i64;
        let mut group: Option<Option<i64>> = None;
        // valuation contributed by the factors outside the group
        let mut rest_v = 0i64;
        let mut divide = false;
        loop {
            let t = self.peek().clone();
            let factor = match &t.tok {
                Tok::Int(n) => {
                    self.bump();
                    Lit::normalized(n.clone(), BigInt::one(), 0, self.prime)
                }
                Tok::Ident(s) if s == "p" => {
                    self.bump();
                    let e = self.optional_power()?;
                    self.p_power(e)
                }
                Tok::Ident(s) if s == "t" => {
                    self.bump();
                    let e = self.optional_power()?;
                    index = if divide { index.checked_sub(e) } else { index.checked_add(e) }
                        .filter(|i| i.abs() <= MAX_EXPONENT)
                        .ok_or_else(|| parse_error(t.line, t.column, "index out of range"))?;
                    Lit::one()
                }
                Tok::Sym('(') => {
                    if divide {
                        return Err(parse_error(t.line, t.column, "cannot divide by a parenthesised coefficient"));
                    }
                    if group.is_some() {
                        return Err(parse_error(t.line, t.column, "at most one parenthesised coefficient per term"));
                    }
                    self.bump();
                    let g = self.coeff()?;
                    self.expect_sym(')')?;
                    group = Some(g.precision);
                    value = value.mul(&g.value, self.prime);
                    if self.is_sym('*') || self.is_sym('/') {
                        divide = self.bump().tok == Tok::Sym('/');
                        continue;
                    }
                    break;
                }
                _ => return Err(self.err_here("expected an integer, `p`, `t` or `(`")),
            };
            rest_v += if divide { -factor.v } else { factor.v };
            value = if divide { self.divide(&value, &factor, &t)? } else { value.mul(&factor, self.prime) };
            if self.is_sym('*') {
                self.bump();
                divide = false;
            } else if self.is_sym('/') {
                self.bump();
                divide = true;
            } else {
                break;
            }
        }
        let coeff = match group {
            Some(Some(a)) => exact(self.prime, &value, a + rest_v)?,
            _ => literal(self.prime, &value, self.digits)?,
        };
        Ok(Term { index, coeff })
    }

    fn item(&mut self, negative: bool) -> Result<Item> {
        let t = self.peek().clone();
        let special = matches!(&t.tok, Tok::Ident(s) if s == "O" || s == "tail_left" || s == "tail_right");
        if special && negative {
            return Err(parse_error(t.line, t.column, "a bound term cannot be negated"));
        }
        match &t.tok {
            Tok::Ident(s) if s == "O" => {
                self.bump();
                self.expect_sym('(')?;
                self.expect_ident("t")?;
                let n = self.optional_power()?;
                self.expect_sym(')')?;
                Ok(Item::Trunc(n))
            }
            Tok::Ident(s) if s == "tail_left" => {
                self.bump();
                self.expect_sym('(')?;
                let lo = self.exponent()?;
                self.expect_sym(',')?;
                let slope = self.exponent()?;
                self.expect_sym(',')?;
                let base = self.exponent()?;
                self.expect_sym(')')?;
                Ok(Item::Left { lo, slope, base })
            }
            Tok::Ident(s) if s == "tail_right" => {
                self.bump();
                self.expect_sym('(')?;
                let hi = self.exponent()?;
                self.expect_sym(',')?;
                let floor = self.exponent()?;
                self.expect_sym(')')?;
                Ok(Item::Right { hi, floor })
            }
            _ => {
                let mut term = self.term()?;
                if negative {
                    term.coeff = term.coeff.neg();
                }
                Ok(Item::Term(term))
            }
        }
    }
}

fn exact(prime: u64, value: &Lit, a: i64) -> Result<PAdic> {
    if value.num.is_zero() || a <= value.v {
        return Ok(PAdic::zero_mod(prime, a));
    }
    Ok(PAdic::from_rational(prime, &value.num, &value.den, a - value.v)?.mul_p_power(value.v))
}

fn literal(prime: u64, value: &Lit, digits: i64) -> Result<PAdic> {
    PAdic::literal(prime, &value.num, &value.den, value.v, digits)
}

/// Parses a series literal. Without `field`, a truncation `O(t^n)` selects
/// `K((t))` and anything else `K{{t}}`.
pub fn parse_series(input: &str, prime: u64, digits: i64, field: Option<FieldKind>) -> Result<Series> {
    crate::padic::check_prime(prime)?;
    let mut ps = Parser { toks: lex(input)?, pos: 0, prime, digits };
    let mut items = Vec::new();
    let mut negative = false;
    if ps.is_sym('-') || ps.is_sym('+') {
        negative = ps.bump().tok == Tok::Sym('-');
    }
    loop {
        let at = ps.peek().clone();
        items.push((at, ps.item(negative)?));
        if ps.is_sym('+') || ps.is_sym('-') {
            negative = ps.bump().tok == Tok::Sym('-');
        } else if ps.peek().tok == Tok::End {
            break;
        } else {
            return Err(ps.err_here("expected `+`, `-` or end of input"));
        }
    }

    let mut terms = Vec::new();
    let (mut trunc, mut left, mut right) = (None, None, None);
    let mut kind_hint: Option<(FieldKind, Token)> = None;
    for (at, item) in items {
        let twice = |what: &str| parse_error(at.line, at.column, format!("{what} given twice"));
        match item {
            Item::Term(t) => terms.push(t),
            Item::Trunc(n) => {
                if trunc.replace(n).is_some() {
                    return Err(twice("O(t^n)"));
                }
                kind_hint = Some((FieldKind::EqualChar, at));
            }
            Item::Left { lo, slope, base } => {
                if left.replace((lo, slope, base)).is_some() {
                    return Err(twice("tail_left"));
                }
                kind_hint = Some((FieldKind::MixedChar, at));
            }
            Item::Right { hi, floor } => {
                if right.replace((hi, floor)).is_some() {
                    return Err(twice("tail_right"));
                }
                kind_hint = Some((FieldKind::MixedChar, at));
            }
        }
    }
    if trunc.is_some() && (left.is_some() || right.is_some()) {
        let (_, at) = kind_hint.expect("hint recorded");
        return Err(parse_error(at.line, at.column, "O(t^n) and tail bounds cannot be combined"));
    }
    let kind = match (field, &kind_hint) {
        (Some(f), Some((h, at))) if f != *h => {
            return Err(parse_error(at.line, at.column, format!("not allowed in a {} characteristic series", f.name())))
        }
        (Some(f), _) => f,
        (None, Some((h, _))) => *h,
        (None, None) => FieldKind::MixedChar,
    };
    let pairs: Vec<(i64, PAdic)> = terms.into_iter().map(|t| (t.index, t.coeff)).collect();
    match kind {
        FieldKind::EqualChar => Ok(EqualCharSeries::from_terms(prime, &pairs, trunc)?.into()),
        FieldKind::MixedChar => {
            let idx_lo = pairs.iter().map(|p| p.0).min();
            let idx_hi = pairs.iter().map(|p| p.0).max();
            let lo = left.map(|l| l.0).or(idx_lo).or(right.map(|r| r.0)).unwrap_or(0);
            let hi = right.map(|r| r.0).or(idx_hi).unwrap_or(lo).max(lo);
            if idx_lo.is_some_and(|i| i < lo) || idx_hi.is_some_and(|i| i > hi) {
                return Err(parse_error(1, 1, "a term lies inside a declared tail"));
            }
            let len = (hi - lo + 1) as usize;
            let mut coeffs = vec![PAdic::zero(prime); len];
            for (i, c) in pairs {
                let slot = &mut coeffs[(i - lo) as usize];
                *slot = slot.add(&c)?;
            }
            let left = match left {
                Some((_, slope, base)) => LeftTail::Bound { slope, base },
                None => LeftTail::Zero,
            };
            let right = match right {
                Some((_, floor)) => RightTail::Bound { floor },
                None => RightTail::Zero,
            };
            Ok(MixedSeries::new(prime, lo, coeffs, left, right)?.into())
        }
    }
}

fn monomial_text(magnitude: &BigInt, v: i64, i: i64) -> String {
    let mut parts = Vec::new();
    if !magnitude.is_one() {
        parts.push(magnitude.to_string());
    }
    match v {
        0 => {}
        1 => parts.push("p".into()),
        v => parts.push(format!("p^{v}")),
    }
    match i {
        0 => {}
        1 => parts.push("t".into()),
        i => parts.push(format!("t^{i}")),
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn index_suffix(i: i64) -> String {
    match i {
        0 => String::new(),
        1 => "*t".into(),
        i => format!("*t^{i}"),
    }
}

/// `(negative, text)` for `c t^i`, or `None` for an exact zero.
fn render_term(c: &PAdic, i: i64, digits: i64) -> Option<(bool, String)> {
    if c.is_exact_zero() {
        return None;
    }
    let a = c.precision().expect("inexact");
    let Some(crate::seqspec::ExtInt::Finite(v)) = c.exact_valuation() else {
        return Some((false, format!("(O(p^{a})){}", index_suffix(i))));
    };
    let u = c.signed_unit();
    if a == PAdic::literal_precision(v, digits) {
        Some((u.is_negative(), monomial_text(&u.abs(), v, i)))
    } else {
        let inner = if u.is_negative() {
            format!("-{}", monomial_text(&u.abs(), v, 0))
        } else {
            monomial_text(&u, v, 0)
        };
        Some((false, format!("({inner} + O(p^{a})){}", index_suffix(i))))
    }
}

/// Text that [`parse_series`] reads back as an equal series (given the same
/// prime and digits). Precisions equal to the literal default are omitted.
pub fn render_series(x: &Series, digits: i64) -> String {
    let mut pieces: Vec<(bool, String)> = Vec::new();
    match x {
        Series::Equal(s) => {
            for (n, c) in s.coeffs().iter().enumerate() {
                pieces.extend(render_term(c, s.order() + n as i64, digits));
            }
            if let Some(n) = s.trunc() {
                pieces.push((false, format!("O(t^{n})")));
            }
        }
        Series::Mixed(s) => {
            for (n, c) in s.coeffs().iter().enumerate() {
                pieces.extend(render_term(c, s.lo() + n as i64, digits));
            }
            if let LeftTail::Bound { slope, base } = s.left() {
                pieces.push((false, format!("tail_left({}, {slope}, {base})", s.lo())));
            }
            if let RightTail::Bound { floor } = s.right() {
                pieces.push((false, format!("tail_right({}, {floor})", s.hi())));
            }
        }
    }
    if pieces.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, (neg, text)) in pieces.into_iter().enumerate() {
        match (n, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&text);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{gen, Rng};
    use crate::seqspec::ExtInt;

    fn mixed(s: &str, p: u64) -> MixedSeries {
        match parse_series(s, p, 32, None).unwrap() {
            Series::Mixed(m) => m,
            other => panic!("expected mixed, got {other:?}"),
        }
    }

    #[test]
    fn literal_examples() {
        let m = mixed("p^2*t^-1 + t", 5);
        assert_eq!(m.lo(), -1);
        assert_eq!(m.coeff_at(-1), PAdic::p_power(5, 2, 32));
        assert_eq!(m.coeff_at(0), PAdic::zero(5));
        assert_eq!(m.coeff_at(1), PAdic::p_power(5, 0, 32));
        assert_eq!((m.left(), m.right()), (LeftTail::Zero, RightTail::Zero));

        let Series::Equal(e) = parse_series("1 + t + O(t^6)", 5, 32, None).unwrap() else { panic!() };
        assert_eq!(e.trunc(), Some(6));
        assert_eq!(e.coeff(1), Some(PAdic::p_power(5, 0, 32)));

        let Err(Error::Parse { line, column, .. }) = parse_series("t^^2", 5, 32, None) else { panic!() };
        assert_eq!((line, column), (1, 3));

        let m = mixed("t^-3/p", 7);
        assert_eq!(m.coeff_at(-3).exact_valuation(), Some(ExtInt::Finite(-1)));
    }

    #[test]
    fn coefficient_groups() {
        let m = mixed("(3 + 2*p + O(p^5))*t^2 - 1/2", 5);
        let c = m.coeff_at(2);
        assert_eq!(c.precision(), Some(5));
        assert_eq!(c, PAdic::from_i64(5, 13, 5).unwrap());
        assert_eq!(m.coeff_at(0), PAdic::from_rational(5, &BigInt::from(-1), &BigInt::from(2), 32).unwrap());
        let z = mixed("(O(p^4))*t", 5);
        assert!(z.coeff_at(1).is_zero_within());
        let tails = mixed("p*t^-1 + tail_left(-2, 1, 3) + tail_right(4, 0)", 3);
        assert_eq!((tails.lo(), tails.hi()), (-2, 4));
        assert_eq!(tails.left(), LeftTail::Bound { slope: 1, base: 3 });
        assert!(matches!(parse_series("t^-5 + tail_left(-2, 1, 3)", 3, 32, None), Err(Error::Parse { .. })));
        assert!(matches!(parse_series("1 + O(t^3)", 3, 32, Some(FieldKind::MixedChar)), Err(Error::Parse { .. })));
        let Err(Error::Parse { line, column, .. }) = parse_series("1 +\n  t^x", 3, 32, None) else { panic!() };
        assert_eq!((line, column), (2, 5));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_series(&parse_series("p^2*t^-1 + t", 5, 32, None).unwrap(), 32), "p^2*t^-1 + t");
        assert_eq!(render_series(&parse_series("-3*t^2 + O(t^6)", 5, 32, None).unwrap(), 32), "-3*t^2 + O(t^6)");
        assert_eq!(render_series(&parse_series("(2 + O(p^3))", 5, 32, None).unwrap(), 32), "(2 + O(p^3))");
        assert_eq!(render_series(&Series::zero(FieldKind::MixedChar, 5), 32), "0");
    }

    #[test]
    fn render_parse_round_trip() {
        let mut rng = Rng::new(3);
        for _ in 0..300 {
            let p = gen::prime(&mut rng);
            let f = gen::field(&mut rng);
            let digits = rng.range(1, 12);
            let lo = rng.range(-8, 8);
            let (hi, sd) = (lo + rng.range(0, 6), rng.range(1, 12));
            let x = gen::series(&mut rng, f, p, (lo, hi), sd, true);
            let text = render_series(&x, digits);
            let y = parse_series(&text, p, digits, Some(f)).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(y, x, "{text}");
        }
    }
}
