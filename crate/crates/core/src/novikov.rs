//! Generalized Laurent series over the two-element field, with rational
//! exponents drawn from a finitely generated subgroup of ℚ, and the Laurent
//! ring those series generate in one graded formal variable.
//!
//! A series is a formal sum `Σ s^θ` over a finite set of exponents (the
//! coefficient field is 𝔽₂, so a coefficient is presence/absence and
//! addition is symmetric difference). Infinite upper-finite series never
//! appear explicitly: they are handled through explicit truncation
//! bookkeeping — every series carries a [`Cutoff`] recording from which
//! exponent downward its coefficients are unknown. Operations propagate the
//! tightest sound cutoff, so a computed coefficient is either exactly right
//! or reported as unknown, never silently wrong.
//!
//! [`LaurentElement`] adds a formal variable `q` with integer powers and a
//! degree per power ([`QGrading`]); series coefficients sit on each power.
//! Units are exact monomials `s^a·q^b`, and the variable can be renamed
//! `q ↦ s^δ·q^{-1}` without changing degrees.

use crate::rat::{fmt_rat, Rat};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Errors for series and Laurent-ring arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NovikovError {
    /// Binary operations require both operands over the same period group.
    #[error("period groups differ (generators {left} and {right})")]
    IncompatiblePeriodGroup { left: String, right: String },
    /// Inversion needs a visible leading term: the series is exactly zero, or
    /// truncated with empty known part.
    #[error("cannot invert: no known leading term (zero or fully truncated series)")]
    DivisionByZero,
    /// Monomial exponents must lie in the period group.
    #[error("exponent {exponent} lies outside the period group (generator {generator})")]
    ExponentOutsideGroup { exponent: String, generator: String },
    /// The requested coefficient sits below the series cutoff.
    #[error("coefficient at {exponent} is below the cutoff {cutoff} and unknown")]
    BelowCutoff { exponent: String, cutoff: String },
    /// Period groups are generated by positive rationals.
    #[error("period-group generators must be positive")]
    NonPositiveGenerator,
    /// Laurent operations require both operands in the same grading.
    #[error("q-gradings differ ({left} vs {right} per power)")]
    GradingMismatch { left: i64, right: i64 },
    /// Only exact monomials `s^a·q^b` are invertible in the Laurent ring.
    #[error("element is not an exact monomial unit")]
    NotAUnit,
}

/// A finitely generated subgroup of (ℚ, +). Such a group is cyclic; it is
/// stored by its canonical nonnegative generator (`0` for the trivial group).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodGroup {
    generator: Rat,
}

impl PeriodGroup {
    /// The trivial group `{0}`.
    pub fn trivial() -> Self {
        PeriodGroup {
            generator: Rat::zero(),
        }
    }

    /// The group generated by a list of positive rationals: for generators
    /// `p_i/q_i` the canonical generator is `gcd(p_i·L/q_i)/L` with
    /// `L = lcm(q_i)`. An empty list gives the trivial group.
    pub fn generated_by(generators: &[Rat]) -> Result<Self, NovikovError> {
        let mut canonical = Rat::zero();
        for g in generators {
            if !g.is_positive() {
                return Err(NovikovError::NonPositiveGenerator);
            }
            canonical = rat_gcd(&canonical, g);
        }
        Ok(PeriodGroup {
            generator: canonical,
        })
    }

    /// The cyclic group generated by a single positive rational.
    pub fn cyclic(generator: Rat) -> Result<Self, NovikovError> {
        PeriodGroup::generated_by(&[generator])
    }

    /// The canonical nonnegative generator (`0` for the trivial group).
    pub fn generator(&self) -> &Rat {
        &self.generator
    }

    /// Membership test: `x ∈ Γ` iff `x` is an integer multiple of the
    /// generator (for the trivial group, iff `x = 0`).
    pub fn contains(&self, x: &Rat) -> bool {
        if self.generator.is_zero() {
            return x.is_zero();
        }
        (x / self.generator).is_integer()
    }

    fn require_member(&self, x: &Rat) -> Result<(), NovikovError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(NovikovError::ExponentOutsideGroup {
                exponent: fmt_rat(x),
                generator: fmt_rat(&self.generator),
            })
        }
    }

    fn require_same(&self, other: &PeriodGroup) -> Result<(), NovikovError> {
        if self == other {
            Ok(())
        } else {
            Err(NovikovError::IncompatiblePeriodGroup {
                left: fmt_rat(&self.generator),
                right: fmt_rat(&other.generator),
            })
        }
    }
}

/// gcd on nonnegative rationals: `gcd(a, b)` generates the group generated by
/// `a` and `b` together; `gcd(0, b) = b`.
fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    if a.is_zero() {
        return *b;
    }
    if b.is_zero() {
        return *a;
    }
    let l = a.denom().lcm(b.denom());
    let na = a.numer() * (l / a.denom());
    let nb = b.numer() * (l / b.denom());
    Rat::new(na.gcd(&nb), l)
}

/// Truncation marker: either the series is known exactly, or only its
/// coefficients at exponents `≥ c` are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// Every coefficient is known.
    Exact,
    /// Coefficients below this exponent are unknown.
    At(Rat),
}

impl Cutoff {
    /// The coarser of two cutoffs: the region where both series are known.
    pub fn join(&self, other: &Cutoff) -> Cutoff {
        match (self, other) {
            (Cutoff::Exact, c) => *c,
            (c, Cutoff::Exact) => *c,
            (Cutoff::At(a), Cutoff::At(b)) => Cutoff::At(*a.max(b)),
        }
    }

    /// Whether an exponent lies in the known region.
    pub fn admits(&self, exponent: &Rat) -> bool {
        match self {
            Cutoff::Exact => true,
            Cutoff::At(c) => exponent >= c,
        }
    }
}

impl std::fmt::Display for Cutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cutoff::Exact => write!(f, "exact"),
            Cutoff::At(c) => write!(f, "{}", fmt_rat(c)),
        }
    }
}

/// A series `Σ_θ s^θ` with 𝔽₂ coefficients, exponents in a fixed period
/// group, finite stored support, and explicit truncation bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovSeries {
    group: PeriodGroup,
    support: BTreeSet<Rat>,
    cutoff: Cutoff,
}

impl NovikovSeries {
    /// The exact zero series.
    pub fn zero(group: PeriodGroup) -> Self {
        NovikovSeries {
            group,
            support: BTreeSet::new(),
            cutoff: Cutoff::Exact,
        }
    }

    /// The exact unit series `s^0`.
    pub fn one(group: PeriodGroup) -> Self {
        NovikovSeries {
            group,
            support: BTreeSet::from([Rat::zero()]),
            cutoff: Cutoff::Exact,
        }
    }

    /// The exact monomial `s^exponent`; the exponent must lie in the group.
    pub fn monomial(group: PeriodGroup, exponent: Rat) -> Result<Self, NovikovError> {
        group.require_member(&exponent)?;
        Ok(NovikovSeries {
            group,
            support: BTreeSet::from([exponent]),
            cutoff: Cutoff::Exact,
        })
    }

    /// The exact sum of monomials `Σ s^θ` over the given exponents
    /// (𝔽₂ addition: exponents appearing an even number of times cancel).
    pub fn from_exponents(group: PeriodGroup, exponents: &[Rat]) -> Result<Self, NovikovError> {
        let mut support = BTreeSet::new();
        for e in exponents {
            group.require_member(e)?;
            if !support.remove(e) {
                support.insert(*e);
            }
        }
        Ok(NovikovSeries {
            group,
            support,
            cutoff: Cutoff::Exact,
        })
    }

    /// The period group of the exponents.
    pub fn group(&self) -> &PeriodGroup {
        &self.group
    }

    /// The truncation state.
    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    /// True when the series is exactly zero (empty support, no truncation).
    pub fn is_zero(&self) -> bool {
        self.support.is_empty() && self.cutoff == Cutoff::Exact
    }

    /// True when no terms are known (the series may still be nonzero below a
    /// cutoff).
    pub fn known_support_is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Largest exponent with nonzero coefficient, if any term is known.
    pub fn leading_exponent(&self) -> Option<Rat> {
        self.support.iter().next_back().copied()
    }

    /// Known exponents in decreasing order.
    pub fn exponents_desc(&self) -> Vec<Rat> {
        self.support.iter().rev().copied().collect()
    }

    /// The coefficient at an exponent (`true` = 1, `false` = 0); errs when
    /// the exponent lies below the cutoff, where the coefficient is unknown.
    pub fn coeff(&self, exponent: &Rat) -> Result<bool, NovikovError> {
        match &self.cutoff {
            Cutoff::At(c) if exponent < c => Err(NovikovError::BelowCutoff {
                exponent: fmt_rat(exponent),
                cutoff: fmt_rat(c),
            }),
            _ => Ok(self.support.contains(exponent)),
        }
    }

    fn normalized(group: PeriodGroup, mut support: BTreeSet<Rat>, cutoff: Cutoff) -> Self {
        if let Cutoff::At(c) = &cutoff {
            support.retain(|e| e >= c);
        }
        NovikovSeries {
            group,
            support,
            cutoff,
        }
    }

    /// Sum (𝔽₂: symmetric difference of supports); the result is known where
    /// both inputs are.
    pub fn add(&self, other: &NovikovSeries) -> Result<NovikovSeries, NovikovError> {
        self.group.require_same(&other.group)?;
        let cutoff = self.cutoff.join(&other.cutoff);
        let support: BTreeSet<Rat> = self
            .support
            .symmetric_difference(&other.support)
            .copied()
            .collect();
        Ok(NovikovSeries::normalized(
            self.group.clone(),
            support,
            cutoff,
        ))
    }

    /// Product. For truncated operands the result carries the tightest sound
    /// cutoff: unknown terms of one factor, multiplied by the other factor's
    /// leading term, first pollute the exponent `cutoff + leading`, so the
    /// result is known strictly above the worst such bound.
    pub fn mul(&self, other: &NovikovSeries) -> Result<NovikovSeries, NovikovError> {
        self.group.require_same(&other.group)?;
        if self.is_zero() || other.is_zero() {
            return Ok(NovikovSeries::zero(self.group.clone()));
        }
        let cutoff = match (pollution_bound(self, other), pollution_bound(other, self)) {
            (None, None) => Cutoff::Exact,
            (Some(c), None) | (None, Some(c)) => Cutoff::At(c),
            (Some(a), Some(b)) => Cutoff::At(a.max(b)),
        };
        let support = convolve(&self.support, &other.support, &cutoff);
        Ok(NovikovSeries::normalized(
            self.group.clone(),
            support,
            cutoff,
        ))
    }

    /// Multiplication by the exact monomial `s^delta`: every exponent (and
    /// any cutoff) shifts by `delta`, which must lie in the group.
    pub fn shift(&self, delta: &Rat) -> Result<NovikovSeries, NovikovError> {
        self.group.require_member(delta)?;
        let support = self.support.iter().map(|e| e + delta).collect();
        let cutoff = match &self.cutoff {
            Cutoff::Exact => Cutoff::Exact,
            Cutoff::At(c) => Cutoff::At(c + delta),
        };
        Ok(NovikovSeries {
            group: self.group.clone(),
            support,
            cutoff,
        })
    }

    /// Coarsens the truncation to (at most) the given cutoff, dropping the
    /// terms below it. A finer existing cutoff is kept.
    pub fn truncate(&self, cutoff: Rat) -> NovikovSeries {
        let joined = self.cutoff.join(&Cutoff::At(cutoff));
        NovikovSeries::normalized(self.group.clone(), self.support.clone(), joined)
    }

    /// Multiplicative inverse, computed at least down to `requested_cutoff`.
    ///
    /// Factor the leading monomial: `a = s^{θ₀}·(1 + u)` with all exponents
    /// of `u` negative; then `a^{-1} = s^{-θ₀}·Σ_j u^j` (the sign-free
    /// geometric series — the coefficient field has characteristic 2), and
    /// the sum is finite above any threshold. The result is `Exact` only
    /// for exact monomials. For a truncated input the result cutoff is the
    /// sound bound `max(requested, cutoff - 2·θ₀)`: the input's unknown tail
    /// perturbs the inverse below that exponent.
    pub fn invert(&self, requested_cutoff: Rat) -> Result<NovikovSeries, NovikovError> {
        let Some(theta0) = self.leading_exponent() else {
            return Err(NovikovError::DivisionByZero);
        };
        let result_cutoff = match &self.cutoff {
            Cutoff::Exact => requested_cutoff,
            Cutoff::At(c) => requested_cutoff.max(c - theta0 - theta0),
        };
        let u: BTreeSet<Rat> = self
            .support
            .iter()
            .filter(|&e| *e != theta0)
            .map(|e| e - theta0)
            .collect();
        if u.is_empty() && self.cutoff == Cutoff::Exact {
            // Exact monomial: the inverse is the exact monomial s^{-θ₀}.
            return NovikovSeries::monomial(self.group.clone(), -theta0);
        }
        // Accumulate Σ_j u^j keeping exponents ≥ τ; u's exponents are all
        // negative, so powers sink monotonically and the loop terminates.
        let tau = Cutoff::At(result_cutoff + theta0);
        let mut acc = BTreeSet::from([Rat::zero()]);
        let mut power: BTreeSet<Rat> = u.iter().filter(|e| tau.admits(e)).copied().collect();
        while !power.is_empty() {
            for e in &power {
                if !acc.remove(e) {
                    acc.insert(*e);
                }
            }
            power = convolve(&power, &u, &tau);
        }
        let support: BTreeSet<Rat> = acc.iter().map(|e| e - theta0).collect();
        Ok(NovikovSeries::normalized(
            self.group.clone(),
            support,
            Cutoff::At(result_cutoff),
        ))
    }

    /// Whether two series agree everywhere both are known (full equality when
    /// both are exact).
    pub fn agrees_with(&self, other: &NovikovSeries) -> Result<bool, NovikovError> {
        self.group.require_same(&other.group)?;
        let region = self.cutoff.join(&other.cutoff);
        let mine: BTreeSet<&Rat> = self.support.iter().filter(|e| region.admits(e)).collect();
        let theirs: BTreeSet<&Rat> = other.support.iter().filter(|e| region.admits(e)).collect();
        Ok(mine == theirs)
    }
}

/// Exponents at which `hidden × known` products can first appear, when
/// `hidden` is truncated: strictly below `hidden.cutoff + known.leading`
/// (`known.cutoff` bounds the leading when no term of `known` is visible).
/// None when `hidden` is exact (no unknown terms at all).
fn pollution_bound(hidden: &NovikovSeries, known: &NovikovSeries) -> Option<Rat> {
    match &hidden.cutoff {
        Cutoff::Exact => None,
        Cutoff::At(c) => {
            let lead = match known.leading_exponent() {
                Some(l) => l,
                None => match &known.cutoff {
                    // No visible term: every true term sits below the cutoff.
                    Cutoff::At(kc) => *kc,
                    Cutoff::Exact => return None, // known is exactly zero
                },
            };
            Some(c + lead)
        }
    }
}

/// 𝔽₂ convolution of two supports, keeping only admitted exponents.
fn convolve(a: &BTreeSet<Rat>, b: &BTreeSet<Rat>, keep: &Cutoff) -> BTreeSet<Rat> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            let e = x + y;
            if keep.admits(&e) && !out.remove(&e) {
                out.insert(e);
            }
        }
    }
    out
}

impl std::fmt::Display for NovikovSeries {
    /// Known terms in decreasing exponent order (`1` for `s^0`, `s` for
    /// `s^1`), then a `+ O(s^c)` marker when truncated.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.support.is_empty() {
            match &self.cutoff {
                Cutoff::Exact => return write!(f, "0"),
                Cutoff::At(c) => return write!(f, "O(s^{})", fmt_rat(c)),
            }
        }
        let mut first = true;
        for e in self.support.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "1")?;
            } else if *e == Rat::from_integer(1) {
                write!(f, "s")?;
            } else {
                write!(f, "s^{}", fmt_rat(e))?;
            }
        }
        if let Cutoff::At(c) = &self.cutoff {
            write!(f, " + O(s^{})", fmt_rat(c))?;
        }
        Ok(())
    }
}

/// Degree bookkeeping for the formal variable: each `q`-power carries a fixed
/// even degree. The series variable `s` has degree 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QGrading {
    per_power: i64,
}

impl QGrading {
    /// Grading where `q` has degree `2·chern` (the storage normal form for
    /// the product rings in [`crate::qh`]).
    pub fn chern(chern: u64) -> Self {
        QGrading {
            per_power: 2 * chern as i64,
        }
    }

    /// Degree carried by one power of `q`.
    pub fn per_power(&self) -> i64 {
        self.per_power
    }

    /// The grading of the renamed variable `q' = s^δ·q^{-1}`, which carries
    /// exactly the opposite degree so that renaming preserves every degree.
    pub fn renamed(&self) -> QGrading {
        QGrading {
            per_power: -self.per_power,
        }
    }
}

/// Degree of a Laurent element: zero element, homogeneous of one degree, or
/// mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDegree {
    Zero,
    Homogeneous(i64),
    Mixed,
}

impl ElementDegree {
    /// The degree when homogeneous, else None.
    pub fn homogeneous(&self) -> Option<i64> {
        match self {
            ElementDegree::Homogeneous(d) => Some(*d),
            _ => None,
        }
    }
}

/// An element of the Laurent ring `K[q, q^{-1}]`: finitely many `q`-powers,
/// each carrying a series coefficient, with a fixed degree per power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentElement {
    group: PeriodGroup,
    grading: QGrading,
    terms: BTreeMap<i64, NovikovSeries>,
}

impl LaurentElement {
    /// The zero element.
    pub fn zero(group: PeriodGroup, grading: QGrading) -> Self {
        LaurentElement {
            group,
            grading,
            terms: BTreeMap::new(),
        }
    }

    /// The unit `s^0·q^0`.
    pub fn one(group: PeriodGroup, grading: QGrading) -> Self {
        let one = NovikovSeries::one(group.clone());
        LaurentElement {
            group,
            grading,
            terms: BTreeMap::from([(0, one)]),
        }
    }

    /// The exact monomial `s^{s_exp}·q^{q_pow}`.
    pub fn monomial(
        group: PeriodGroup,
        grading: QGrading,
        s_exp: Rat,
        q_pow: i64,
    ) -> Result<Self, NovikovError> {
        let series = NovikovSeries::monomial(group.clone(), s_exp)?;
        Ok(LaurentElement {
            group,
            grading,
            terms: BTreeMap::from([(q_pow, series)]),
        })
    }

    /// Builds an element by summing `series·q^{q_pow}` terms.
    pub fn from_terms(
        group: PeriodGroup,
        grading: QGrading,
        terms: Vec<(i64, NovikovSeries)>,
    ) -> Result<Self, NovikovError> {
        let mut out = LaurentElement::zero(group, grading);
        for (q_pow, series) in terms {
            let addend = LaurentElement {
                group: series.group().clone(),
                grading,
                terms: BTreeMap::from([(q_pow, series)]),
            };
            out = out.add(&addend)?;
        }
        Ok(out)
    }

    /// The coefficient series at a `q`-power, if present.
    pub fn coefficient(&self, q_pow: i64) -> Option<&NovikovSeries> {
        self.terms.get(&q_pow)
    }

    /// Stored `(q_pow, series)` pairs in increasing `q`-power order.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &NovikovSeries)> {
        self.terms.iter()
    }

    /// The grading in force.
    pub fn grading(&self) -> &QGrading {
        &self.grading
    }

    /// The period group of the coefficients.
    pub fn group(&self) -> &PeriodGroup {
        &self.group
    }

    /// True when no terms are stored (exactly zero; truncated-empty
    /// coefficients are kept, so they prevent this).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for exact monomials `s^a·q^b` — precisely the units of the ring
    /// (over 𝔽₂ the only nonzero scalar is 1).
    pub fn is_unit(&self) -> bool {
        if self.terms.len() != 1 {
            return false;
        }
        let series = self.terms.values().next().expect("one term");
        series.cutoff() == &Cutoff::Exact && series.exponents_desc().len() == 1
    }

    /// Inverse of an exact monomial unit; [`NovikovError::NotAUnit`]
    /// otherwise.
    pub fn invert_unit(&self) -> Result<LaurentElement, NovikovError> {
        if !self.is_unit() {
            return Err(NovikovError::NotAUnit);
        }
        let (&q_pow, series) = self.terms.iter().next().expect("one term");
        let s_exp = series.leading_exponent().expect("one exponent");
        LaurentElement::monomial(self.group.clone(), self.grading, -s_exp, -q_pow)
    }

    /// Degree classification: every stored term at `q`-power `e` is
    /// homogeneous of degree `e·per_power` (the series variable carries
    /// degree 0), so the element is homogeneous iff one `q`-power is present.
    pub fn degree(&self) -> ElementDegree {
        let mut powers = self.terms.keys();
        match (powers.next(), powers.next()) {
            (None, _) => ElementDegree::Zero,
            (Some(&e), None) => ElementDegree::Homogeneous(e * self.grading.per_power()),
            _ => ElementDegree::Mixed,
        }
    }

    fn require_compatible(&self, other: &LaurentElement) -> Result<(), NovikovError> {
        self.group.require_same(&other.group)?;
        if self.grading != other.grading {
            return Err(NovikovError::GradingMismatch {
                left: self.grading.per_power(),
                right: other.grading.per_power(),
            });
        }
        Ok(())
    }

    fn insert_normalized(terms: &mut BTreeMap<i64, NovikovSeries>, q_pow: i64, series: NovikovSeries) {
        // Exactly-zero coefficients are dropped; truncated-empty ones carry
        // real information (the power may be nonzero below the cutoff).
        if !series.is_zero() {
            terms.insert(q_pow, series);
        }
    }

    /// Sum of elements (coefficientwise series addition).
    pub fn add(&self, other: &LaurentElement) -> Result<LaurentElement, NovikovError> {
        self.require_compatible(other)?;
        let mut terms = self.terms.clone();
        for (&q_pow, series) in &other.terms {
            let combined = match terms.remove(&q_pow) {
                Some(existing) => existing.add(series)?,
                None => series.clone(),
            };
            LaurentElement::insert_normalized(&mut terms, q_pow, combined);
        }
        Ok(LaurentElement {
            group: self.group.clone(),
            grading: self.grading,
            terms,
        })
    }

    /// Product of elements (convolution over `q`-powers).
    pub fn mul(&self, other: &LaurentElement) -> Result<LaurentElement, NovikovError> {
        self.require_compatible(other)?;
        let mut terms: BTreeMap<i64, NovikovSeries> = BTreeMap::new();
        for (&ea, sa) in &self.terms {
            for (&eb, sb) in &other.terms {
                let product = sa.mul(sb)?;
                let q_pow = ea + eb;
                let combined = match terms.remove(&q_pow) {
                    Some(existing) => existing.add(&product)?,
                    None => product,
                };
                LaurentElement::insert_normalized(&mut terms, q_pow, combined);
            }
        }
        Ok(LaurentElement {
            group: self.group.clone(),
            grading: self.grading,
            terms,
        })
    }

    /// Scales by the exact monomial `s^{s_exp}·q^{q_pow}`.
    pub fn scale_monomial(
        &self,
        s_exp: &Rat,
        q_pow: i64,
    ) -> Result<LaurentElement, NovikovError> {
        let mut terms = BTreeMap::new();
        for (&e, series) in &self.terms {
            LaurentElement::insert_normalized(&mut terms, e + q_pow, series.shift(s_exp)?);
        }
        Ok(LaurentElement {
            group: self.group.clone(),
            grading: self.grading,
            terms,
        })
    }

    /// Rewrites the element in the renamed variable `q' = s^{delta}·q^{-1}`
    /// (so `q = s^{delta}·q'^{-1}`): the term `a·q^e` becomes
    /// `a·s^{e·delta}·q'^{-e}`. The renamed grading flips the per-power sign,
    /// so every degree is preserved; `delta` must lie in the period group.
    pub fn rename_variable(&self, delta: &Rat) -> Result<LaurentElement, NovikovError> {
        let mut terms = BTreeMap::new();
        for (&e, series) in &self.terms {
            let shift = delta * Rat::from_integer(e);
            self.group.require_member(&shift)?;
            LaurentElement::insert_normalized(&mut terms, -e, series.shift(&shift)?);
        }
        Ok(LaurentElement {
            group: self.group.clone(),
            grading: self.grading.renamed(),
            terms,
        })
    }
}

impl std::fmt::Display for LaurentElement {
    /// Exact monomials render as `s^a*q^b` products ('+'-joined, decreasing
    /// `q`-power then decreasing `s`-exponent; `s^0`/`q^0` factors elided);
    /// truncated coefficients append their `O(s^c)` marker times the power.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&q_pow, series) in self.terms.iter().rev() {
            for e in series.exponents_desc() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let mut factors: Vec<String> = Vec::new();
                if !e.is_zero() {
                    factors.push(format!("s^{}", fmt_rat(&e)));
                }
                if q_pow != 0 {
                    factors.push(format!("q^{q_pow}"));
                }
                if factors.is_empty() {
                    write!(f, "1")?;
                } else {
                    write!(f, "{}", factors.join("*"))?;
                }
            }
            if let Cutoff::At(c) = series.cutoff() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if q_pow != 0 {
                    write!(f, "O(s^{})*q^{q_pow}", fmt_rat(c))?;
                } else {
                    write!(f, "O(s^{})", fmt_rat(c))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use proptest::prelude::*;

    fn group_one() -> PeriodGroup {
        PeriodGroup::cyclic(rat(1, 1)).unwrap()
    }

    fn series(exps: &[(i64, i64)]) -> NovikovSeries {
        NovikovSeries::from_exponents(group_one(), &exps.iter().map(|&(p, q)| rat(p, q)).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn period_group_canonical_generator() {
        let g = PeriodGroup::generated_by(&[rat(1, 2), rat(1, 3)]).unwrap();
        assert_eq!(g.generator(), &rat(1, 6));
        let g2 = PeriodGroup::generated_by(&[rat(2, 3), rat(1, 2)]).unwrap();
        assert_eq!(g2.generator(), &rat(1, 6));
        let g3 = PeriodGroup::generated_by(&[rat(4, 6)]).unwrap();
        assert_eq!(g3.generator(), &rat(2, 3));
        assert_eq!(PeriodGroup::trivial().generator(), &rat(0, 1));
        assert_eq!(
            PeriodGroup::generated_by(&[rat(-1, 2)]),
            Err(NovikovError::NonPositiveGenerator)
        );
        assert_eq!(
            PeriodGroup::generated_by(&[rat(0, 1)]),
            Err(NovikovError::NonPositiveGenerator)
        );
    }

    #[test]
    fn period_group_membership() {
        let g = PeriodGroup::cyclic(rat(1, 6)).unwrap();
        assert!(g.contains(&rat(1, 2)));
        assert!(g.contains(&rat(-5, 6)));
        assert!(g.contains(&rat(0, 1)));
        assert!(!g.contains(&rat(1, 4)));
        let t = PeriodGroup::trivial();
        assert!(t.contains(&rat(0, 1)));
        assert!(!t.contains(&rat(1, 1)));
    }

    #[test]
    fn monomial_exponent_must_lie_in_group() {
        let g = PeriodGroup::cyclic(rat(1, 2)).unwrap();
        assert!(NovikovSeries::monomial(g.clone(), rat(3, 2)).is_ok());
        assert!(matches!(
            NovikovSeries::monomial(g, rat(1, 3)),
            Err(NovikovError::ExponentOutsideGroup { .. })
        ));
    }

    #[test]
    fn addition_is_characteristic_two() {
        let a = series(&[(1, 1), (0, 1), (-1, 1)]);
        let sum = a.add(&a).unwrap();
        assert!(sum.is_zero());
        let b = series(&[(0, 1), (-2, 1)]);
        let c = a.add(&b).unwrap();
        assert_eq!(c.exponents_desc(), vec![rat(1, 1), rat(-1, 1), rat(-2, 1)]);
    }

    #[test]
    fn product_of_exact_series_is_exact() {
        let a = series(&[(1, 1), (0, 1)]);
        let b = series(&[(0, 1), (-1, 1)]);
        // (s + 1)(1 + s^-1) = s + 1 + 1 + s^-1 = s + s^-1 over F2.
        let p = a.mul(&b).unwrap();
        assert_eq!(p.cutoff(), &Cutoff::Exact);
        assert_eq!(p.exponents_desc(), vec![rat(1, 1), rat(-1, 1)]);
    }

    #[test]
    fn coeff_respects_cutoff() {
        let a = series(&[(0, 1), (-3, 1)]).truncate(rat(-2, 1));
        assert_eq!(a.coeff(&rat(0, 1)), Ok(true));
        assert_eq!(a.coeff(&rat(-1, 1)), Ok(false));
        assert_eq!(a.coeff(&rat(-2, 1)), Ok(false));
        assert!(matches!(
            a.coeff(&rat(-3, 1)),
            Err(NovikovError::BelowCutoff { .. })
        ));
    }

    #[test]
    fn invert_worked_example_three_terms() {
        // (s + 1 + s^-1)^{-1} down to -2 is s^-1 + s^-2 (+ unknown below).
        let a = series(&[(1, 1), (0, 1), (-1, 1)]);
        let inv = a.invert(rat(-2, 1)).unwrap();
        assert_eq!(inv.exponents_desc(), vec![rat(-1, 1), rat(-2, 1)]);
        assert_eq!(inv.cutoff(), &Cutoff::At(rat(-2, 1)));

        // Multiplying back matches 1 on every exponent ≥ -2 that survives.
        let product = a.mul(&inv).unwrap();
        let surviving: Vec<Rat> = product
            .exponents_desc()
            .into_iter()
            .filter(|e| e >= &rat(-2, 1))
            .collect();
        assert_eq!(surviving, vec![rat(0, 1)]);
    }

    #[test]
    fn invert_geometric_series() {
        // (1 + s^-1)^{-1} = 1 + s^-1 + s^-2 + ... : every exponent down to
        // the cutoff appears.
        let a = series(&[(0, 1), (-1, 1)]);
        let inv = a.invert(rat(-10, 1)).unwrap();
        let want: Vec<Rat> = (0..=10).map(|j| rat(-j, 1)).collect();
        assert_eq!(inv.exponents_desc(), want);
        assert_eq!(inv.cutoff(), &Cutoff::At(rat(-10, 1)));
    }

    #[test]
    fn invert_exact_monomial_is_exact() {
        let g = PeriodGroup::cyclic(rat(1, 3)).unwrap();
        let m = NovikovSeries::monomial(g, rat(-2, 3)).unwrap();
        let inv = m.invert(rat(-50, 1)).unwrap();
        assert_eq!(inv.cutoff(), &Cutoff::Exact);
        assert_eq!(inv.exponents_desc(), vec![rat(2, 3)]);
    }

    #[test]
    fn invert_rejects_zero_and_unknown() {
        let z = NovikovSeries::zero(group_one());
        assert_eq!(z.invert(rat(-5, 1)), Err(NovikovError::DivisionByZero));
        let hidden = series(&[(-4, 1)]).truncate(rat(-2, 1));
        assert!(hidden.known_support_is_empty());
        assert_eq!(hidden.invert(rat(-5, 1)), Err(NovikovError::DivisionByZero));
    }

    #[test]
    fn truncated_input_inverse_carries_sound_cutoff() {
        // Input truncated at c, leading θ₀: the inverse is only known above
        // c - 2θ₀ even if a deeper cutoff was requested.
        let a = series(&[(1, 1), (0, 1)]).truncate(rat(-1, 1));
        let inv = a.invert(rat(-20, 1)).unwrap();
        assert_eq!(inv.cutoff(), &Cutoff::At(rat(-3, 1)));
    }

    #[test]
    fn incompatible_groups_are_rejected() {
        let a = NovikovSeries::one(PeriodGroup::cyclic(rat(1, 2)).unwrap());
        let b = NovikovSeries::one(PeriodGroup::cyclic(rat(1, 3)).unwrap());
        assert!(matches!(
            a.add(&b),
            Err(NovikovError::IncompatiblePeriodGroup { .. })
        ));
        assert!(matches!(
            a.mul(&b),
            Err(NovikovError::IncompatiblePeriodGroup { .. })
        ));
    }

    #[test]
    fn display_forms() {
        assert_eq!(series(&[]).to_string(), "0");
        assert_eq!(series(&[(0, 1)]).to_string(), "1");
        assert_eq!(series(&[(1, 1)]).to_string(), "s");
        let halves = NovikovSeries::from_exponents(
            PeriodGroup::cyclic(rat(1, 2)).unwrap(),
            &[rat(3, 2), rat(0, 1), rat(-1, 1)],
        )
        .unwrap();
        assert_eq!(halves.to_string(), "s^3/2 + 1 + s^-1");
        assert_eq!(
            series(&[(0, 1), (-3, 1)]).truncate(rat(-2, 1)).to_string(),
            "1 + O(s^-2)"
        );
    }

    fn exact_series_strategy() -> impl Strategy<Value = NovikovSeries> {
        prop::collection::btree_set(-12i64..=12, 0..=6).prop_map(|set| {
            NovikovSeries::from_exponents(
                group_one(),
                &set.into_iter().map(|e| rat(e, 1)).collect::<Vec<_>>(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_axioms_on_exact_series(
            a in exact_series_strategy(),
            b in exact_series_strategy(),
            c in exact_series_strategy(),
        ) {
            // Commutativity and associativity of both operations.
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            // Distributivity.
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            // Characteristic 2 and neutral elements.
            prop_assert!(a.add(&a).unwrap().is_zero());
            let one = NovikovSeries::one(group_one());
            let zero = NovikovSeries::zero(group_one());
            prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
            prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
            prop_assert!(a.mul(&zero).unwrap().is_zero());
        }

        #[test]
        fn leading_exponent_is_multiplicative(
            a in exact_series_strategy(),
            b in exact_series_strategy(),
        ) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let p = a.mul(&b).unwrap();
            prop_assert_eq!(
                p.leading_exponent().unwrap(),
                a.leading_exponent().unwrap() + b.leading_exponent().unwrap()
            );
        }

        /// Soundness of cutoff propagation: operating on truncated inputs
        /// agrees with the exact result everywhere the result claims to be
        /// known.
        #[test]
        fn truncation_soundness_for_add_and_mul(
            a in exact_series_strategy(),
            b in exact_series_strategy(),
            ca in -10i64..=2,
            cb in -10i64..=2,
        ) {
            let ta = a.truncate(rat(ca, 1));
            let tb = b.truncate(rat(cb, 1));

            let exact_sum = a.add(&b).unwrap();
            let trunc_sum = ta.add(&tb).unwrap();
            prop_assert!(trunc_sum.agrees_with(&exact_sum).unwrap());

            let exact_prod = a.mul(&b).unwrap();
            let trunc_prod = ta.mul(&tb).unwrap();
            prop_assert!(trunc_prod.agrees_with(&exact_prod).unwrap());
        }

        /// Inverses verify: a · a^{-1} agrees with 1 above the product's own
        /// cutoff, for exact and for truncated inputs.
        #[test]
        fn inverse_multiplies_back_to_one(
            a in exact_series_strategy(),
            depth in 3i64..=12,
            trunc in -14i64..=-6,
        ) {
            prop_assume!(!a.is_zero());
            let lead = a.leading_exponent().unwrap();
            let req = lead - rat(depth, 1);
            let one = NovikovSeries::one(group_one());

            let inv = a.invert(req).unwrap();
            let product = a.mul(&inv).unwrap();
            prop_assert!(product.agrees_with(&one).unwrap());

            let ta = a.truncate(rat(trunc, 1));
            prop_assume!(!ta.known_support_is_empty());
            let tinv = ta.invert(req).unwrap();
            let tproduct = ta.mul(&tinv).unwrap();
            prop_assert!(tproduct.agrees_with(&one).unwrap());
        }

        /// Truncated-inverse soundness: the inverse of a truncated series
        /// agrees with the exactly-computed inverse wherever it claims
        /// knowledge.
        #[test]
        fn truncation_soundness_for_invert(
            a in exact_series_strategy(),
            cut in -9i64..=-1,
        ) {
            prop_assume!(!a.is_zero());
            let lead = a.leading_exponent().unwrap();
            let deep = lead - rat(30, 1);
            let exact_inv = a.invert(deep).unwrap();
            let ta = a.truncate(rat(cut, 1));
            prop_assume!(!ta.known_support_is_empty());
            let trunc_inv = ta.invert(deep).unwrap();
            prop_assert!(trunc_inv.agrees_with(&exact_inv).unwrap());
        }
    }

    // ----- Laurent layer -----

    fn lgroup() -> PeriodGroup {
        PeriodGroup::cyclic(rat(1, 1)).unwrap()
    }

    fn lmono(s_num: i64, q_pow: i64) -> LaurentElement {
        LaurentElement::monomial(lgroup(), QGrading::chern(2), rat(s_num, 1), q_pow).unwrap()
    }

    #[test]
    fn laurent_unit_and_degree() {
        let one = LaurentElement::one(lgroup(), QGrading::chern(2));
        assert_eq!(one.degree(), ElementDegree::Homogeneous(0));
        assert!(one.is_unit());

        let alpha = lmono(-1, -1); // s^-1 * q^-1 under deg q = 4
        assert_eq!(alpha.degree(), ElementDegree::Homogeneous(-4));
        assert!(alpha.is_unit());
        let inv = alpha.invert_unit().unwrap();
        assert_eq!(inv, lmono(1, 1));
        assert_eq!(alpha.mul(&inv).unwrap(), one);

        let mixed = alpha.add(&one).unwrap();
        assert_eq!(mixed.degree(), ElementDegree::Mixed);
        assert!(!mixed.is_unit());
        assert!(matches!(mixed.invert_unit(), Err(NovikovError::NotAUnit)));

        let zero = LaurentElement::zero(lgroup(), QGrading::chern(2));
        assert_eq!(zero.degree(), ElementDegree::Zero);
        assert_eq!(alpha.add(&alpha).unwrap(), zero);
    }

    #[test]
    fn laurent_display() {
        let a = lmono(-1, -1);
        assert_eq!(a.to_string(), "s^-1*q^-1");
        let b = a.add(&lmono(0, 0)).unwrap();
        assert_eq!(b.to_string(), "1 + s^-1*q^-1");
        assert_eq!(
            LaurentElement::zero(lgroup(), QGrading::chern(2)).to_string(),
            "0"
        );
        let c = lmono(2, 1).add(&lmono(0, 1)).unwrap();
        assert_eq!(c.to_string(), "s^2*q^1 + q^1");
    }

    #[test]
    fn grading_mismatch_is_rejected() {
        let a = LaurentElement::one(lgroup(), QGrading::chern(2));
        let b = LaurentElement::one(lgroup(), QGrading::chern(3));
        assert!(matches!(
            a.add(&b),
            Err(NovikovError::GradingMismatch { .. })
        ));
    }

    #[test]
    fn rename_variable_preserves_degree_and_is_involutive() {
        let delta = rat(-1, 1); // q = s^{-1}·q'^{-1}
        for element in [
            lmono(0, 0),
            lmono(-1, -1),
            lmono(3, 2),
            lmono(2, 1).add(&lmono(-2, 1)).unwrap(),
        ] {
            let renamed = element.rename_variable(&delta).unwrap();
            assert_eq!(renamed.degree(), element.degree());
            let back = renamed.rename_variable(&delta).unwrap();
            assert_eq!(back.terms.len(), element.terms.len());
            assert_eq!(back, element);
        }
        // The worked case: q^{-1} ↦ s^{-δ}... concretely with δ = -1:
        // a·q^{-1} becomes a·s^{1}·q'^{1}.
        let moved = lmono(0, -1).rename_variable(&delta).unwrap();
        assert_eq!(moved.coefficient(1).unwrap().exponents_desc(), vec![rat(1, 1)]);
    }

    proptest! {
        /// Degree additivity: products of homogeneous elements are
        /// homogeneous of the summed degree (or zero).
        #[test]
        fn laurent_degree_is_additive(
            sa in -6i64..=6, qa in -3i64..=3,
            sb in -6i64..=6, qb in -3i64..=3,
            chern in 1u64..=4,
        ) {
            let g = lgroup();
            let a = LaurentElement::monomial(g.clone(), QGrading::chern(chern), rat(sa, 1), qa).unwrap();
            let b = LaurentElement::monomial(g, QGrading::chern(chern), rat(sb, 1), qb).unwrap();
            let p = a.mul(&b).unwrap();
            let (da, db) = (a.degree().homogeneous().unwrap(), b.degree().homogeneous().unwrap());
            prop_assert_eq!(p.degree(), ElementDegree::Homogeneous(da + db));
        }
    }
}
