//! Finite-basis graded quantum product rings over the char-2 Novikov
//! coefficients of [`crate::novikov`].
//!
//! A [`RingSpec`] fixes a graded basis, a distinguished unit and point class,
//! and a full table of structure constants with Laurent coefficients; the
//! constructor validates the unit axiom and the degree rule
//! `deg(e_i) + deg(e_j) - 2n = deg(e_k) + deg(coefficient)` for every table
//! entry. [`cp_spec`] builds the projective-space family: basis
//! `u0, …, un` with `deg(u_a) = 2(n-a)`, products adding subscripts and
//! wrapping past `n` at the cost of one `s^{-ω₀}·q^{-1}` factor.
//!
//! On top of the ring sit the two degree instruments:
//! [`verify_point_identity`] computes the `N`-th power of the point class and
//! checks it is a unit multiple of the fundamental class, and
//! [`replay_theorem`] runs the degree bookkeeping that pins the even Betti
//! numbers once a degree `≡ -2 (mod 2N)` class has to exist.

use crate::novikov::{
    Cutoff, ElementDegree, LaurentElement, NovikovError, PeriodGroup, QGrading,
};
use crate::rat::{fmt_rat, parse_rat, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::hash::{DefaultHasher, Hash, Hasher};

/// Errors for ring construction and degree arguments.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QhError {
    /// The classes involved were built over different ring specs.
    #[error("operands belong to different ring specs")]
    SpecMismatch,
    /// An orbit index must agree with the half-dimension modulo 2.
    #[error("index {mu} has the wrong parity for half-dimension {n} (they must agree mod 2)")]
    ParityViolation { n: u64, mu: i64 },
    /// Betti input failed its shape checks.
    #[error("malformed Betti data: {reason}")]
    MalformedBetti { reason: String },
    /// The degree replay runs under the standing bound `N ≥ n+1`.
    #[error("the degree replay needs minimal Chern number at least n+1 (n={n}, N={chern})")]
    ChernTooSmall { n: u64, chern: u64 },
    /// A ring spec failed validation.
    #[error("invalid ring spec: {reason}")]
    InvalidSpec { reason: String },
    /// A ring spec file could not be parsed.
    #[error("cannot parse ring spec: {reason}")]
    ParseSpec { reason: String },
    /// Coefficient arithmetic failed.
    #[error(transparent)]
    Novikov(#[from] NovikovError),
}

/// One basis class: a name and an (even, for the rings built here) degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisClass {
    pub name: String,
    pub degree: i64,
}

/// A linear combination of basis classes with Laurent coefficients, indexed
/// by basis position. Zero coefficients are never stored.
type Combination = BTreeMap<usize, LaurentElement>;

/// A validated graded product ring on a finite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    half_dim: u64,
    chern: u64,
    omega: Rat,
    group: PeriodGroup,
    basis: Vec<BasisClass>,
    unit: usize,
    point: usize,
    structure: BTreeMap<(usize, usize), Combination>,
    fingerprint: u64,
}

impl RingSpec {
    /// Validates and seals a ring description. Checks, for every pair
    /// `(i, j)` of basis indices (all pairs must be present, possibly with an
    /// empty product):
    ///
    /// - coefficients are exact, over the spec's period group and grading;
    /// - every coefficient is homogeneous, and the degree rule
    ///   `deg(e_i) + deg(e_j) - 2n = deg(e_k) + deg(c)` holds;
    /// - the unit row and column are identities.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        half_dim: u64,
        chern: u64,
        omega: Rat,
        group: PeriodGroup,
        basis: Vec<BasisClass>,
        unit: usize,
        point: usize,
        structure: BTreeMap<(usize, usize), Combination>,
    ) -> Result<Self, QhError> {
        let invalid = |reason: String| QhError::InvalidSpec { reason };
        if half_dim < 1 {
            return Err(invalid("half-dimension must be at least 1".into()));
        }
        if chern < 1 {
            return Err(invalid("minimal Chern number must be at least 1".into()));
        }
        if !omega.is_positive() {
            return Err(invalid("omega must be positive".into()));
        }
        if !group.contains(&omega) {
            return Err(invalid(format!(
                "omega {} must lie in the period group (generator {})",
                fmt_rat(&omega),
                fmt_rat(group.generator())
            )));
        }
        if basis.is_empty() {
            return Err(invalid("basis must be nonempty".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.name.is_empty()
                || !b
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(invalid(format!("basis name {:?} (index {i}) is invalid", b.name)));
            }
            if basis.iter().skip(i + 1).any(|other| other.name == b.name) {
                return Err(invalid(format!("duplicate basis name {:?}", b.name)));
            }
        }
        if unit >= basis.len() || point >= basis.len() {
            return Err(invalid("unit/point index out of range".into()));
        }
        let grading = QGrading::chern(chern);
        let dim_shift = 2 * half_dim as i64;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let Some(combo) = structure.get(&(i, j)) else {
                    return Err(invalid(format!(
                        "missing product {}*{}",
                        basis[i].name, basis[j].name
                    )));
                };
                for (&k, coefficient) in combo {
                    if k >= basis.len() {
                        return Err(invalid("product component out of range".into()));
                    }
                    if coefficient.group() != &group {
                        return Err(invalid(format!(
                            "product {}*{} has a coefficient over a different period group",
                            basis[i].name, basis[j].name
                        )));
                    }
                    if coefficient.grading() != &grading {
                        return Err(invalid(format!(
                            "product {}*{} has a coefficient in a different grading",
                            basis[i].name, basis[j].name
                        )));
                    }
                    if coefficient
                        .terms()
                        .any(|(_, series)| series.cutoff() != &Cutoff::Exact)
                    {
                        return Err(invalid(format!(
                            "product {}*{} has a truncated coefficient",
                            basis[i].name, basis[j].name
                        )));
                    }
                    match coefficient.degree() {
                        ElementDegree::Zero => {
                            return Err(invalid(format!(
                                "product {}*{} stores an exactly-zero coefficient",
                                basis[i].name, basis[j].name
                            )))
                        }
                        ElementDegree::Mixed => {
                            return Err(invalid(format!(
                                "product {}*{} has an inhomogeneous coefficient",
                                basis[i].name, basis[j].name
                            )))
                        }
                        ElementDegree::Homogeneous(dc) => {
                            let lhs = basis[i].degree + basis[j].degree - dim_shift;
                            let rhs = basis[k].degree + dc;
                            if lhs != rhs {
                                return Err(invalid(format!(
                                    "degree rule fails for {}*{} -> {}: {lhs} vs {rhs}",
                                    basis[i].name, basis[j].name, basis[k].name
                                )));
                            }
                        }
                    }
                }
            }
        }
        // Unit axiom: multiplying by the unit must reproduce the other factor
        // with coefficient exactly one.
        for j in 0..basis.len() {
            for (a, b) in [(unit, j), (j, unit)] {
                let combo = &structure[&(a, b)];
                let ok = combo.len() == 1
                    && combo
                        .get(&j)
                        .is_some_and(|c| c == &LaurentElement::one(group.clone(), grading));
                if !ok {
                    return Err(invalid(format!(
                        "unit axiom fails at {}*{}",
                        basis[a].name, basis[b].name
                    )));
                }
            }
        }
        let mut spec = RingSpec {
            half_dim,
            chern,
            omega,
            group,
            basis,
            unit,
            point,
            structure,
            fingerprint: 0,
        };
        let mut hasher = DefaultHasher::new();
        spec.to_text().hash(&mut hasher);
        spec.fingerprint = hasher.finish();
        Ok(spec)
    }

    /// Half the real dimension `n`.
    pub fn half_dim(&self) -> u64 {
        self.half_dim
    }

    /// The minimal Chern number `N` (the `q`-power degree step is `2N`).
    pub fn chern(&self) -> u64 {
        self.chern
    }

    /// The symplectic area parameter `ω₀` carried by one `q^{-1}` wrap.
    pub fn omega(&self) -> &Rat {
        &self.omega
    }

    /// The coefficient period group.
    pub fn group(&self) -> &PeriodGroup {
        &self.group
    }

    /// The grading in force (`deg q = 2N`).
    pub fn grading(&self) -> QGrading {
        QGrading::chern(self.chern)
    }

    /// The basis, in storage order.
    pub fn basis(&self) -> &[BasisClass] {
        &self.basis
    }

    /// Index of the unit (fundamental) class.
    pub fn unit_index(&self) -> usize {
        self.unit
    }

    /// Index of the point class.
    pub fn point_index(&self) -> usize {
        self.point
    }

    /// Structure fingerprint; classes remember it so cross-spec arithmetic
    /// is caught instead of silently misinterpreted.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// The basis class at `index` as a [`GradedClass`].
    pub fn class(&self, index: usize) -> GradedClass {
        assert!(index < self.basis.len(), "basis index out of range");
        let one = LaurentElement::one(self.group.clone(), self.grading());
        GradedClass {
            fingerprint: self.fingerprint,
            components: BTreeMap::from([(index, one)]),
        }
    }

    /// The zero class.
    pub fn zero_class(&self) -> GradedClass {
        GradedClass {
            fingerprint: self.fingerprint,
            components: BTreeMap::new(),
        }
    }

    /// Looks a class up by basis name; `M` and `pt` are accepted as aliases
    /// for the unit and point class whatever their proper names.
    pub fn class_by_name(&self, name: &str) -> Option<GradedClass> {
        if let Some(i) = self.basis.iter().position(|b| b.name == name) {
            return Some(self.class(i));
        }
        match name {
            "M" => Some(self.class(self.unit)),
            "pt" => Some(self.class(self.point)),
            _ => None,
        }
    }

    /// Serializes the spec as deterministic line-oriented text (see
    /// [`RingSpec::from_text`] for the format).
    pub fn to_text(&self) -> String {
        let mut out = String::from("ringspec v1\n");
        out.push_str(&format!("n={}\n", self.half_dim));
        out.push_str(&format!("N={}\n", self.chern));
        out.push_str(&format!("omega={}\n", fmt_rat(&self.omega)));
        out.push_str(&format!("gamma={}\n", fmt_rat(self.group.generator())));
        let basis_items: Vec<String> = self
            .basis
            .iter()
            .map(|b| format!("{}:{}", b.name, b.degree))
            .collect();
        out.push_str(&format!("basis={}\n", basis_items.join(",")));
        out.push_str(&format!("unit={}\n", self.basis[self.unit].name));
        out.push_str(&format!("point={}\n", self.basis[self.point].name));
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                out.push_str(&format!(
                    "sc {}*{}={}\n",
                    self.basis[i].name,
                    self.basis[j].name,
                    self.render_combination(&self.structure[&(i, j)])
                ));
            }
        }
        out
    }

    fn render_combination(&self, combo: &Combination) -> String {
        if combo.is_empty() {
            return "0".to_string();
        }
        let mut pieces = Vec::new();
        for (&k, coefficient) in combo {
            for (&q_pow, series) in coefficient.terms() {
                for s_exp in series.exponents_desc() {
                    let mut factors = Vec::new();
                    if !s_exp.is_zero() {
                        factors.push(format!("s^{}", fmt_rat(&s_exp)));
                    }
                    if q_pow != 0 {
                        factors.push(format!("q^{q_pow}"));
                    }
                    factors.push(self.basis[k].name.clone());
                    pieces.push(factors.join("*"));
                }
            }
        }
        pieces.join("+")
    }

    /// Renders a class in the same monomial syntax used by spec files.
    pub fn render_class(&self, class: &GradedClass) -> Result<String, QhError> {
        self.check_class(class)?;
        Ok(self.render_combination(&class.components))
    }

    fn check_class(&self, class: &GradedClass) -> Result<(), QhError> {
        if class.fingerprint != self.fingerprint {
            return Err(QhError::SpecMismatch);
        }
        Ok(())
    }

    /// Parses the textual format produced by [`RingSpec::to_text`]:
    ///
    /// ```text
    /// ringspec v1
    /// n=1
    /// N=2
    /// omega=1
    /// gamma=1
    /// basis=u0:2,u1:0
    /// unit=u0
    /// point=u1
    /// sc u0*u0=u0
    /// sc u0*u1=u1
    /// sc u1*u0=u1
    /// sc u1*u1=s^-1*q^-1*u0
    /// ```
    ///
    /// Blank lines and `#` comments are allowed. The parsed spec passes
    /// through full validation.
    pub fn from_text(text: &str) -> Result<Self, QhError> {
        let parse_err = |reason: String| QhError::ParseSpec { reason };
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("ringspec v1") {
            return Err(parse_err("missing `ringspec v1` header".into()));
        }
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        let mut sc_lines: Vec<(String, String, String)> = Vec::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("sc ") {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| parse_err(format!("malformed product line {line:?}")))?;
                let (a, b) = lhs
                    .trim()
                    .split_once('*')
                    .ok_or_else(|| parse_err(format!("malformed product pair {lhs:?}")))?;
                sc_lines.push((a.trim().into(), b.trim().into(), rhs.trim().into()));
            } else if let Some((key, value)) = line.split_once('=') {
                if fields
                    .insert(key.trim().into(), value.trim().into())
                    .is_some()
                {
                    return Err(parse_err(format!("duplicate field {key:?}")));
                }
            } else {
                return Err(parse_err(format!("unrecognized line {line:?}")));
            }
        }
        let take = |key: &str| -> Result<String, QhError> {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| parse_err(format!("missing field {key:?}")))
        };
        let half_dim: u64 = take("n")?
            .parse()
            .map_err(|_| parse_err("field n must be a positive integer".into()))?;
        let chern: u64 = take("N")?
            .parse()
            .map_err(|_| parse_err("field N must be a positive integer".into()))?;
        let omega = parse_rat(&take("omega")?)
            .map_err(|e| parse_err(format!("field omega: {e}")))?;
        let gamma = parse_rat(&take("gamma")?)
            .map_err(|e| parse_err(format!("field gamma: {e}")))?;
        let group = PeriodGroup::cyclic(gamma).map_err(QhError::Novikov)?;
        let mut basis = Vec::new();
        for item in take("basis")?.split(',') {
            let (name, degree) = item
                .split_once(':')
                .ok_or_else(|| parse_err(format!("malformed basis item {item:?}")))?;
            let degree: i64 = degree
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad degree in basis item {item:?}")))?;
            basis.push(BasisClass {
                name: name.trim().into(),
                degree,
            });
        }
        let index_of = |name: &str| -> Result<usize, QhError> {
            basis
                .iter()
                .position(|b| b.name == name)
                .ok_or_else(|| parse_err(format!("unknown basis name {name:?}")))
        };
        let unit = index_of(&take("unit")?)?;
        let point = index_of(&take("point")?)?;
        let grading = QGrading::chern(chern);
        let mut structure: BTreeMap<(usize, usize), Combination> = BTreeMap::new();
        for (a, b, rhs) in sc_lines {
            let key = (index_of(&a)?, index_of(&b)?);
            if structure.contains_key(&key) {
                return Err(parse_err(format!("duplicate product line for {a}*{b}")));
            }
            let mut combo: Combination = BTreeMap::new();
            if rhs != "0" {
                for piece in rhs.split('+') {
                    let mut s_exp = Rat::zero();
                    let mut q_pow = 0i64;
                    let mut target: Option<usize> = None;
                    for factor in piece.split('*') {
                        let factor = factor.trim();
                        if let Some(exp) = factor.strip_prefix("s^") {
                            s_exp += parse_rat(exp)
                                .map_err(|e| parse_err(format!("bad s-exponent: {e}")))?;
                        } else if let Some(pow) = factor.strip_prefix("q^") {
                            q_pow += pow.parse::<i64>().map_err(|_| {
                                parse_err(format!("bad q-power {pow:?} in {piece:?}"))
                            })?;
                        } else if target.is_none() {
                            target = Some(index_of(factor)?);
                        } else {
                            return Err(parse_err(format!(
                                "two basis names in monomial {piece:?}"
                            )));
                        }
                    }
                    let target = target.ok_or_else(|| {
                        parse_err(format!("monomial {piece:?} names no basis class"))
                    })?;
                    let monomial =
                        LaurentElement::monomial(group.clone(), grading, s_exp, q_pow)
                            .map_err(QhError::Novikov)?;
                    let updated = match combo.remove(&target) {
                        Some(existing) => existing.add(&monomial).map_err(QhError::Novikov)?,
                        None => monomial,
                    };
                    if !updated.is_zero() {
                        combo.insert(target, updated);
                    }
                }
            }
            structure.insert(key, combo);
        }
        RingSpec::new(half_dim, chern, omega, group, basis, unit, point, structure)
    }
}

/// The projective-space family with unit area: basis `u0, …, un` of degrees
/// `2n, 2n-2, …, 0`, minimal Chern number `N = n+1`, and products
/// `u_a·u_b = u_{a+b}` below the wrap and `s^{-ω₀}·q^{-1}·u_{a+b-n-1}` above
/// it. Equivalent to [`cp_spec_with_omega`] at `ω₀ = 1`.
pub fn cp_spec(n: u64) -> RingSpec {
    cp_spec_with_omega(n, Rat::from_integer(1)).expect("unit area is valid")
}

/// The projective-space family with an arbitrary positive area parameter
/// `ω₀`; the period group is the cyclic group it generates.
pub fn cp_spec_with_omega(n: u64, omega: Rat) -> Result<RingSpec, QhError> {
    assert!(n >= 1, "half-dimension must be at least 1");
    let group = PeriodGroup::cyclic(omega).map_err(QhError::Novikov)?;
    let chern = n + 1;
    let grading = QGrading::chern(chern);
    let size = (n + 1) as usize;
    let basis: Vec<BasisClass> = (0..size)
        .map(|a| BasisClass {
            name: format!("u{a}"),
            degree: 2 * (n as i64 - a as i64),
        })
        .collect();
    let mut structure: BTreeMap<(usize, usize), Combination> = BTreeMap::new();
    for a in 0..size {
        for b in 0..size {
            let coefficient;
            let target;
            if a + b <= n as usize {
                target = a + b;
                coefficient = LaurentElement::one(group.clone(), grading);
            } else {
                target = a + b - size; // a+b-(n+1)
                coefficient =
                    LaurentElement::monomial(group.clone(), grading, -omega, -1)
                        .map_err(QhError::Novikov)?;
            }
            structure.insert((a, b), BTreeMap::from([(target, coefficient)]));
        }
    }
    RingSpec::new(n, chern, omega, group, basis, 0, size - 1, structure)
}

/// A linear combination of a spec's basis classes, tagged with the spec's
/// fingerprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedClass {
    fingerprint: u64,
    components: BTreeMap<usize, LaurentElement>,
}

impl GradedClass {
    /// The stored `(basis index, coefficient)` pairs, ascending by index.
    pub fn components(&self) -> impl Iterator<Item = (&usize, &LaurentElement)> {
        self.components.iter()
    }

    /// The coefficient at a basis index, if nonzero.
    pub fn coefficient(&self, index: usize) -> Option<&LaurentElement> {
        self.components.get(&index)
    }

    /// True when no components are stored.
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }
}

/// Sum of two classes over the same spec.
pub fn add_classes(
    spec: &RingSpec,
    x: &GradedClass,
    y: &GradedClass,
) -> Result<GradedClass, QhError> {
    spec.check_class(x)?;
    spec.check_class(y)?;
    let mut components = x.components.clone();
    for (&k, coefficient) in &y.components {
        let combined = match components.remove(&k) {
            Some(existing) => existing.add(coefficient)?,
            None => coefficient.clone(),
        };
        if !combined.is_zero() {
            components.insert(k, combined);
        }
    }
    Ok(GradedClass {
        fingerprint: spec.fingerprint,
        components,
    })
}

/// Quantum product of two classes: bilinear extension of the spec's
/// structure table.
pub fn product(spec: &RingSpec, x: &GradedClass, y: &GradedClass) -> Result<GradedClass, QhError> {
    spec.check_class(x)?;
    spec.check_class(y)?;
    let mut components: BTreeMap<usize, LaurentElement> = BTreeMap::new();
    for (&i, ci) in &x.components {
        for (&j, cj) in &y.components {
            let scalar = ci.mul(cj)?;
            for (&k, sc) in &spec.structure[&(i, j)] {
                let contribution = scalar.mul(sc)?;
                let combined = match components.remove(&k) {
                    Some(existing) => existing.add(&contribution)?,
                    None => contribution,
                };
                if !combined.is_zero() {
                    components.insert(k, combined);
                }
            }
        }
    }
    Ok(GradedClass {
        fingerprint: spec.fingerprint,
        components,
    })
}

/// The `r`-th power of a class, `r ≥ 1`.
pub fn power(spec: &RingSpec, x: &GradedClass, r: u64) -> Result<GradedClass, QhError> {
    assert!(r >= 1, "power must be positive");
    let mut acc = x.clone();
    for _ in 1..r {
        acc = product(spec, &acc, x)?;
    }
    Ok(acc)
}

/// Degree classification of a class: each component contributes
/// `deg(basis) + deg(coefficient)`.
pub fn class_degree(spec: &RingSpec, x: &GradedClass) -> Result<ElementDegree, QhError> {
    spec.check_class(x)?;
    let mut found: Option<i64> = None;
    for (&k, coefficient) in &x.components {
        let d = match coefficient.degree() {
            ElementDegree::Zero => continue,
            ElementDegree::Mixed => return Ok(ElementDegree::Mixed),
            ElementDegree::Homogeneous(d) => d + spec.basis[k].degree,
        };
        match found {
            None => found = Some(d),
            Some(existing) if existing == d => {}
            Some(_) => return Ok(ElementDegree::Mixed),
        }
    }
    Ok(match found {
        None => ElementDegree::Zero,
        Some(d) => ElementDegree::Homogeneous(d),
    })
}

/// Outcome of the point-power computation `[pt]^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointIdentityReport {
    /// Whether `[pt]^N` is exactly `α · [unit]` for a single coefficient α.
    pub holds: bool,
    /// The coefficient α (zero element when the identity fails).
    pub alpha: LaurentElement,
    /// Whether α is a unit (an exact monomial `s^a·q^b`).
    pub alpha_invertible: bool,
    /// Degree of α when homogeneous.
    pub alpha_degree: Option<i64>,
    /// Whether `α·α^{-1} = 1` was recomputed successfully (false whenever α
    /// is not invertible).
    pub inverse_check: bool,
}

/// Computes `[pt]^N` and checks it is a unit multiple of the unit class.
/// For the projective-space family the coefficient is
/// `α = s^{-n·ω₀}·q^{-n}` of degree `-2Nn`.
pub fn verify_point_identity(spec: &RingSpec) -> Result<PointIdentityReport, QhError> {
    let point = spec.class(spec.point_index());
    let pow = power(spec, &point, spec.chern())?;
    let zero = LaurentElement::zero(spec.group().clone(), spec.grading());
    let alpha = match (pow.components.len(), pow.coefficient(spec.unit_index())) {
        (1, Some(coefficient)) => coefficient.clone(),
        _ => {
            return Ok(PointIdentityReport {
                holds: false,
                alpha: zero,
                alpha_invertible: false,
                alpha_degree: None,
                inverse_check: false,
            })
        }
    };
    let alpha_invertible = alpha.is_unit();
    let alpha_degree = alpha.degree().homogeneous();
    let inverse_check = if alpha_invertible {
        let inverse = alpha.invert_unit()?;
        alpha.mul(&inverse)? == LaurentElement::one(spec.group().clone(), spec.grading())
    } else {
        false
    };
    Ok(PointIdentityReport {
        holds: true,
        alpha,
        alpha_invertible,
        alpha_degree,
        inverse_check,
    })
}

/// Homology degree slot of an orbit with index `mu` on a `2n`-dimensional
/// manifold with minimal Chern number `chern`: the residue
/// `(n + mu) mod 2N` in `[0, 2N)`. The index must agree with `n` modulo 2.
pub fn orbit_class_degree(n: u64, chern: u64, mu: i64) -> Result<u64, QhError> {
    assert!(n >= 1 && chern >= 1);
    let shifted = n as i64 + mu;
    if shifted.rem_euclid(2) != 0 {
        return Err(QhError::ParityViolation { n, mu });
    }
    Ok(shifted.rem_euclid(2 * chern as i64) as u64)
}

/// Verdict of the degree replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremVerdict {
    pub half_dim: u64,
    pub chern: u64,
    /// Input Betti numbers `b_0, …, b_{2n}`, echoed unchanged.
    pub betti: Vec<u64>,
    pub outcome: TheoremOutcome,
    /// `(homology degree, forced dimension)` pairs established on the way
    /// (empty when the replay stops before forcing anything).
    pub forced: Vec<(u64, u64)>,
    /// Set when odd-degree Betti numbers are nonzero: the even-degree replay
    /// does not constrain them.
    pub odd_note: Option<String>,
}

/// Consistency outcome of the replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremOutcome {
    Consistent { conclusion: String },
    Contradiction { reason: String },
}

impl TheoremVerdict {
    /// True when the replay ended without contradiction.
    pub fn is_consistent(&self) -> bool {
        matches!(self.outcome, TheoremOutcome::Consistent { .. })
    }
}

/// Replays the degree argument on Betti data `b_0, …, b_{2n}` under the
/// standing bound `N ≥ n+1`.
///
/// A nonzero invariant class of degree `≡ -2 (mod 2N)` has to exist; since
/// homology degrees live in `[0, 2n]` and the residue of `-2` is `2N-2`,
/// that is impossible for `N > n+1` (contradiction), and for `N = n+1` the
/// class lands in degree `2n`. Iterating the wrap then forces
/// `dim H_{2n-2i} = 1` for `i = 1..n`; Betti input violating a forced slot is
/// reported as a contradiction at that degree. Odd-degree input entries are
/// echoed with a note; the even-degree argument does not touch them.
pub fn replay_theorem(n: u64, chern: u64, betti: &[u64]) -> Result<TheoremVerdict, QhError> {
    assert!(n >= 1, "half-dimension must be at least 1");
    if chern < n + 1 {
        return Err(QhError::ChernTooSmall { n, chern });
    }
    let expected_len = (2 * n + 1) as usize;
    if betti.len() != expected_len {
        return Err(QhError::MalformedBetti {
            reason: format!(
                "need {} entries b_0..b_{}, got {}",
                expected_len,
                2 * n,
                betti.len()
            ),
        });
    }
    if betti[0] != 1 {
        return Err(QhError::MalformedBetti {
            reason: format!("b_0 must be 1 for a closed connected manifold, got {}", betti[0]),
        });
    }
    if betti[2 * n as usize] != 1 {
        return Err(QhError::MalformedBetti {
            reason: format!("b_{} must be 1, got {}", 2 * n, betti[2 * n as usize]),
        });
    }
    let odd_degrees: Vec<u64> = (0..=2 * n)
        .filter(|d| d % 2 == 1 && betti[*d as usize] != 0)
        .collect();
    let odd_note = if odd_degrees.is_empty() {
        None
    } else {
        Some(format!(
            "odd-degree Betti numbers at degrees {:?} are echoed untouched; the even-degree replay does not constrain them",
            odd_degrees
        ))
    };

    // Step 1: a nonzero class of degree ≡ -2 (mod 2N) must exist among the
    // homology degrees 0..2n.
    let slot = (-2i64).rem_euclid(2 * chern as i64) as u64;
    if slot > 2 * n {
        return Ok(TheoremVerdict {
            half_dim: n,
            chern,
            betti: betti.to_vec(),
            outcome: TheoremOutcome::Contradiction {
                reason: format!(
                    "a nonzero class of degree -2 mod {} is required, but its only slot {} exceeds the top homology degree {}; no such class can exist (forces N = n+1, here N = {})",
                    2 * chern,
                    slot,
                    2 * n,
                    chern
                ),
            },
            forced: Vec::new(),
            odd_note,
        });
    }
    // Here N = n+1 (slot = 2n). Step 2: the wrap forces one-dimensional even
    // slots all the way down.
    let mut forced = Vec::new();
    let mut violations = Vec::new();
    for i in 1..=n {
        let degree = 2 * n - 2 * i;
        forced.push((degree, 1));
        let found = betti[degree as usize];
        if found != 1 {
            violations.push(format!(
                "degree {degree} has dimension {found}, forced to 1"
            ));
        }
    }
    let outcome = if violations.is_empty() {
        TheoremOutcome::Consistent {
            conclusion: format!(
                "even Betti numbers b_0 through b_{} all equal 1, matching the projective-space pattern; minimal Chern number is exactly n+1 = {} and the quantum ring has the projective-space structure",
                2 * n,
                chern
            ),
        }
    } else {
        TheoremOutcome::Contradiction {
            reason: violations.join("; "),
        }
    };
    Ok(TheoremVerdict {
        half_dim: n,
        chern,
        betti: betti.to_vec(),
        outcome,
        forced,
        odd_note,
    })
}
