//! `O`-submodules `Σ_i p^{k_i} t^i` of `K((t))` and `K{{t}}`.
//!
//! `k_i = +∞` means the coordinate is `{0}`, `k_i = -∞` means it is all of
//! `K`. Classification predicates are decided from the finite presentation
//! of `(k_i)`; completeness and c-compactness are not decidable this way and
//! are only reported for the named modules, as asserted in the literature.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PAdic, DEFAULT_PRECISION};
use crate::seminorm::SeminormSpec;
use crate::seqspec::{minplus_convolve, pointwise_max, pointwise_min, shift_add, ExtInt, SeqSpec, TailSpec};
use crate::series::{CoeffInfo, FieldKind, Profile, RayInfo, Series};

/// The module `Σ_i p^{k_i} t^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubmoduleSpec {
    pub seq: SeqSpec,
    pub field: FieldKind,
}

/// Tri-state answer for questions about partially known elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

impl Membership {
    fn and(self, other: Membership) -> Membership {
        use Membership::*;
        match (self, other) {
            (Out, _) | (_, Out) => Out,
            (Unknown, _) | (_, Unknown) => Unknown,
            _ => In,
        }
    }
}

/// Computed classification of a module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub open_lattice: bool,
    pub bounded: bool,
    pub compactoid: bool,
}

/// Classification of a named module: computed flags plus the properties
/// asserted in the literature (`None` where nothing is asserted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedClassification {
    pub name: String,
    pub open_lattice: bool,
    pub bounded: bool,
    pub compactoid: bool,
    pub complete: Option<bool>,
    pub c_compact: Option<bool>,
    pub closed: Option<bool>,
}

/// Names accepted by [`SubmoduleSpec::named`].
pub const NAMED_MODULES: [&str; 6] = ["K[[t]]", "O+tK[[t]]", "O{{t}}", "p{{t}}", "rank2_mixed", "tK[[t]]"];

impl SubmoduleSpec {
    pub fn new(seq: SeqSpec, field: FieldKind) -> SubmoduleSpec {
        SubmoduleSpec { seq, field }
    }

    /// A module from the fixed catalogue; whitespace in `name` is ignored.
    pub fn named(name: &str) -> Result<SubmoduleSpec> {
        use ExtInt::{NegInf, PosInf};
        let key: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let c = TailSpec::Const;
        let (seq, field) = match key.as_str() {
            "K[[t]]" => (SeqSpec::new(0, vec![], c(PosInf), c(NegInf)), FieldKind::EqualChar),
            "O+tK[[t]]" => (SeqSpec::new(0, vec![ExtInt::ZERO], c(PosInf), c(NegInf)), FieldKind::EqualChar),
            "tK[[t]]" => (SeqSpec::new(1, vec![], c(PosInf), c(NegInf)), FieldKind::EqualChar),
            "O{{t}}" => (Ok(SeqSpec::constant(0)), FieldKind::MixedChar),
            "p{{t}}" => (Ok(SeqSpec::constant(1)), FieldKind::MixedChar),
            "rank2_mixed" => (SeqSpec::new(0, vec![], TailSpec::constant(1), TailSpec::constant(0)), FieldKind::MixedChar),
            _ => return Err(Error::UnknownName(name.to_string())),
        };
        Ok(SubmoduleSpec::new(seq?, field))
    }

    /// Computed flags together with the completeness, c-compactness and
    /// closedness results known for the named module.
    pub fn known_classification(name: &str) -> Result<NamedClassification> {
        let m = SubmoduleSpec::named(name)?;
        let key: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let (complete, c_compact, closed) = match key.as_str() {
            // complete ring of integers, c-compact, closed in K((t))
            "K[[t]]" => (Some(true), Some(true), Some(true)),
            // rank-two ring of integers: complete, c-compact, closed in K[[t]]
            "O+tK[[t]]" => (Some(true), Some(true), Some(true)),
            // complete, closed but not open, neither compactoid nor c-compact
            "O{{t}}" => (Some(true), Some(false), Some(true)),
            // rank-two ring of integers of K{{t}}
            "rank2_mixed" => (Some(true), Some(false), Some(true)),
            _ => (None, None, None),
        };
        let c = m.classify();
        Ok(NamedClassification {
            name: key,
            open_lattice: c.open_lattice,
            bounded: c.bounded,
            compactoid: c.compactoid,
            complete,
            c_compact,
            closed,
        })
    }

    fn same_field(&self, other: &SubmoduleSpec) -> Result<()> {
        if self.field != other.field {
            return Err(Error::KindMismatch(format!(
                "{} and {} submodules cannot be combined",
                self.field.name(),
                other.field.name()
            )));
        }
        Ok(())
    }

    /// A lattice that generates the locally convex topology.
    pub fn is_open_lattice(&self) -> bool {
        let s = &self.seq;
        if s.contains_value(ExtInt::PosInf) {
            return false;
        }
        match self.field {
            FieldKind::EqualChar => s.right() == TailSpec::Const(ExtInt::NegInf),
            FieldKind::MixedChar => s.supremum() < ExtInt::PosInf && s.right_tends_to_neg_inf(),
        }
    }

    /// Absorbs every element of the field (open or not).
    pub fn is_lattice(&self) -> bool {
        match self.field {
            FieldKind::EqualChar => self.is_open_lattice(),
            FieldKind::MixedChar => self.seq.supremum() < ExtInt::PosInf,
        }
    }

    pub fn is_bounded(&self) -> bool {
        let s = &self.seq;
        match self.field {
            FieldKind::EqualChar => {
                s.left() == TailSpec::Const(ExtInt::PosInf) && !s.contains_value(ExtInt::NegInf)
            }
            FieldKind::MixedChar => s.infimum() > ExtInt::NegInf,
        }
    }

    pub fn is_compactoid(&self) -> bool {
        match self.field {
            FieldKind::EqualChar => self.is_bounded(),
            FieldKind::MixedChar => self.is_bounded() && self.seq.left_tends_to_pos_inf(),
        }
    }

    pub fn classify(&self) -> Classification {
        Classification {
            open_lattice: self.is_open_lattice(),
            bounded: self.is_bounded(),
            compactoid: self.is_compactoid(),
        }
    }

    /// Is `v(x_i) ≥ k_i` for every `i`?
    pub fn membership(&self, x: &Series) -> Membership {
        if x.kind() != self.field {
            return Membership::Out;
        }
        let prof = x.profile();
        let k = &self.seq;
        let lo = k.window_lo().min(prof.lo);
        let hi = k.window_hi().max(prof.end() - 1);
        let mut out = Membership::In;
        for i in lo..=hi {
            out = out.and(coordinate(k.value_at(i), prof.at(i)));
            if out == Membership::Out {
                return out;
            }
        }
        out.and(ray(k, &prof, lo - 1, -1)).and(ray(k, &prof, hi + 1, 1))
    }

    pub fn sum(&self, other: &SubmoduleSpec) -> Result<SubmoduleSpec> {
        self.same_field(other)?;
        Ok(SubmoduleSpec::new(pointwise_min(&self.seq, &other.seq)?, self.field))
    }

    pub fn intersect(&self, other: &SubmoduleSpec) -> Result<SubmoduleSpec> {
        self.same_field(other)?;
        Ok(SubmoduleSpec::new(pointwise_max(&self.seq, &other.seq)?, self.field))
    }

    /// `a · M`.
    pub fn scale(&self, a: &PAdic) -> Result<SubmoduleSpec> {
        match a.exact_valuation() {
            Some(ExtInt::PosInf) => Ok(SubmoduleSpec::new(SeqSpec::constant(ExtInt::PosInf), self.field)),
            Some(ExtInt::Finite(v)) => Ok(SubmoduleSpec::new(shift_add(&self.seq, v)?, self.field)),
            _ => Err(Error::PrecisionExhausted(format!("scalar {a} has no exactly known valuation"))),
        }
    }

    /// `π^c · M`, i.e. `k_i ↦ k_i + c`.
    pub fn shift(&self, c: i64) -> Result<SubmoduleSpec> {
        Ok(SubmoduleSpec::new(shift_add(&self.seq, c)?, self.field))
    }

    /// A module containing `{ xy : x ∈ self, y ∈ other }`.
    pub fn product_bound(&self, other: &SubmoduleSpec) -> Result<SubmoduleSpec> {
        self.same_field(other)?;
        Ok(SubmoduleSpec::new(minplus_convolve(&self.seq, &other.seq)?, self.field))
    }

    /// Is `self ⊆ other`, i.e. `k_i ≥ k'_i` for all `i`?
    pub fn is_subset_of(&self, other: &SubmoduleSpec) -> bool {
        self.field == other.field
            && pointwise_max(&self.seq, &other.seq).map(|m| m == self.seq).unwrap_or(false)
    }
}

fn coordinate(k: ExtInt, info: CoeffInfo) -> Membership {
    match info {
        CoeffInfo::Exact(ExtInt::PosInf) | CoeffInfo::AtLeast(ExtInt::PosInf) => Membership::In,
        _ if k == ExtInt::NegInf => Membership::In,
        CoeffInfo::Exact(v) if v >= k => Membership::In,
        CoeffInfo::Exact(_) => Membership::Out,
        CoeffInfo::AtLeast(a) if a >= k => Membership::In,
        CoeffInfo::AtLeast(_) => Membership::Unknown,
    }
}

/// Checks the ray starting at `start` in direction `dir`, where both the
/// module sequence and the element profile follow their tails.
fn ray(k: &SeqSpec, prof: &Profile, start: i64, dir: i64) -> Membership {
    let exact = match if dir < 0 { prof.left } else { prof.right } {
        RayInfo::Exact(_) => true,
        RayInfo::AtLeast(_) | RayInfo::Unknown => false,
    };
    let near = coordinate(k.value_at(start), prof.at(start));
    let far = coordinate(k.value_at(start + dir), prof.at(start + dir));
    let verdict = near.and(far);
    if verdict != Membership::In {
        return verdict;
    }
    let gap = |i: i64| match (prof.at(i), k.value_at(i)) {
        (CoeffInfo::Exact(ExtInt::Finite(v)) | CoeffInfo::AtLeast(ExtInt::Finite(v)), ExtInt::Finite(b)) => Some(v - b),
        _ => None,
    };
    match (gap(start), gap(start + dir)) {
        (Some(a), Some(b)) if b < a => {
            if exact {
                Membership::Out
            } else {
                Membership::Unknown
            }
        }
        _ => Membership::In,
    }
}

// ---------------------------------------------------------------------------
// unboundedness witnesses

/// Which construction produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum WitnessCase {
    /// Some coordinate of the module is all of `K`.
    FullCoordinate { index: i64 },
    /// Equal characteristic: the module has nonzero coordinates arbitrarily far left.
    EqualLeftTail,
    /// Mixed characteristic: `k_i → -∞` as `i → -∞`.
    MixedLeftTail,
    /// Mixed characteristic: `k_i → -∞` as `i → +∞`.
    MixedRightTail,
}

/// An admissible seminorm together with elements of the module on which it
/// reaches at least the requested exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnboundednessWitness {
    pub case: WitnessCase,
    pub seminorm: SeminormSpec,
    pub elements: Vec<Series>,
}

const WITNESS_ELEMENTS: i64 = 3;

fn monomial(field: FieldKind, prime: u64, k: i64, i: i64) -> Series {
    Series::monomial(field, PAdic::p_power(prime, k, DEFAULT_PRECISION), i)
}

fn finite_at(k: &SeqSpec, i: i64) -> i64 {
    k.value_at(i).finite().expect("finite tail value")
}

impl SubmoduleSpec {
    /// Builds an admissible seminorm `n` and elements `x_j` of the module
    /// with exponent of `‖x_j‖_n` at least `target + j`, showing that the
    /// module is not bounded.
    pub fn unboundedness_witness(&self, prime: u64, target: i64) -> Result<UnboundednessWitness> {
        use ExtInt::NegInf;
        if self.is_bounded() {
            return Err(Error::InvalidInput("the module is bounded".into()));
        }
        let k = &self.seq;
        let field = self.field;
        let neg = TailSpec::Const(NegInf);
        let targets = (0..WITNESS_ELEMENTS).map(|j| target + j);

        let full = k.window().find(|(_, v)| *v == NegInf).map(|(i, _)| i).or_else(|| {
            if k.left() == neg {
                Some(k.window_lo() - 1)
            } else if k.right() == neg {
                Some(k.window_hi() + 1)
            } else {
                None
            }
        });
        if let Some(i0) = full {
            let seq = match field {
                FieldKind::EqualChar => SeqSpec::new(i0, vec![ExtInt::ZERO], neg, neg)?,
                FieldKind::MixedChar => SeqSpec::new(i0, vec![ExtInt::ZERO], TailSpec::constant(0), neg)?,
            };
            return Ok(UnboundednessWitness {
                case: WitnessCase::FullCoordinate { index: i0 },
                seminorm: SeminormSpec::new(seq, field),
                elements: targets.map(|t| monomial(field, prime, -t, i0)).collect(),
            });
        }

        let lo = k.window_lo();
        match field {
            FieldKind::EqualChar => {
                // n_i = -i + k_i on the left ray, -∞ elsewhere
                let (s, o) = k.left().linear_parts().expect("finite left tail of an unbounded module");
                let seq = SeqSpec::new(lo, vec![], TailSpec::affine(s - 1, o), neg)?;
                let elements = targets
                    .map(|t| {
                        let i = (lo - 1).min(-t);
                        monomial(field, prime, finite_at(k, i), i)
                    })
                    .collect();
                Ok(UnboundednessWitness {
                    case: WitnessCase::EqualLeftTail,
                    seminorm: SeminormSpec::new(seq, field),
                    elements,
                })
            }
            FieldKind::MixedChar if k.left_tends_to_neg_inf() => {
                // n_i = 0 for i ≤ 0, -∞ after; elements p^{k_i} t^i with k_i ≤ -target
                let (s, o) = k.left().linear_parts().expect("affine left tail");
                let seq = SeqSpec::new(0, vec![ExtInt::ZERO], TailSpec::constant(0), neg)?;
                let elements = targets
                    .map(|t| {
                        let i = (lo - 1).min(0).min(Integer::div_floor(&(-t - o), &s));
                        monomial(field, prime, finite_at(k, i), i)
                    })
                    .collect();
                Ok(UnboundednessWitness {
                    case: WitnessCase::MixedLeftTail,
                    seminorm: SeminormSpec::new(seq, field),
                    elements,
                })
            }
            FieldKind::MixedChar => {
                // n_i = ⌊k_i / 2⌋ on [start, N] so that n_i - k_i = ⌈-k_i / 2⌉,
                // then the tail of k itself, which still tends to -∞.
                let (s, o) = k.right().linear_parts().expect("affine right tail");
                debug_assert!(s < 0);
                let start = k.window_hi() + 1;
                let index_for = |t: i64| {
                    // smallest i ≥ start with s·i + o ≤ -2t
                    start.max(Integer::div_ceil(&(-2 * t - o), &s))
                };
                let last_target = target + WITNESS_ELEMENTS - 1;
                let end = index_for(last_target);
                let seq = SeqSpec::from_fn(
                    start,
                    end,
                    |i| ExtInt::Finite(Integer::div_floor(&finite_at(k, i), &2)),
                    neg,
                    k.right(),
                )?;
                let elements = targets
                    .map(|t| {
                        let i = index_for(t);
                        monomial(field, prime, finite_at(k, i), i)
                    })
                    .collect();
                Ok(UnboundednessWitness {
                    case: WitnessCase::MixedRightTail,
                    seminorm: SeminormSpec::new(seq, field),
                    elements,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

fn submodule_role() -> String {
    "submodule".into()
}

#[derive(Serialize, Deserialize)]
struct SubmoduleJson {
    #[serde(flatten)]
    seq: SeqSpec,
    field: FieldKind,
    #[serde(default = "submodule_role")]
    role: String,
}

impl Serialize for SubmoduleSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubmoduleJson { seq: self.seq.clone(), field: self.field, role: submodule_role() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubmoduleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SubmoduleJson::deserialize(d)?;
        if j.role != "submodule" {
            return Err(serde::de::Error::custom(format!("expected role \"submodule\", found \"{}\"", j.role)));
        }
        Ok(SubmoduleSpec::new(j.seq, j.field))
    }
}
