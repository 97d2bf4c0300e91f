//! Weighted-boundary models, the multiplicity predicate that defines the
//! points we count, and the predicted growth invariants.
//!
//! Three built-in models share the same shape: projective n-space with a
//! dense group orbit and the single boundary hyperplane where the first
//! coordinate vanishes. Boundary weights are `1 - 1/m` for a finite
//! multiplicity `m`, or `1` (the integral-point case, written as infinite
//! multiplicity).

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, PrimitivePoint, Rational};
use crate::error::{Error, Result};

/// Per-divisor multiplicity: finite `m >= 1`, or infinite (weight 1,
/// integral points).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(u32),
    Infinity,
}

impl Multiplicity {
    /// The boundary weight `1 - 1/m`, or `1` for infinite multiplicity.
    pub fn epsilon(&self) -> Rational {
        match self {
            Multiplicity::Finite(m) => {
                assert!(*m >= 1);
                Rational::one() - Rational::new(BigInt::one(), BigInt::from(*m))
            }
            Multiplicity::Infinity => Rational::one(),
        }
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            Multiplicity::Finite(m) => Some(*m),
            Multiplicity::Infinity => None,
        }
    }

    /// True iff the local condition `n_p = 0 or n_p >= m` is satisfied.
    pub fn admits(&self, n_p: u32) -> bool {
        match self {
            Multiplicity::Finite(m) => n_p == 0 || n_p >= *m,
            Multiplicity::Infinity => n_p == 0,
        }
    }
}

impl std::str::FromStr for Multiplicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Multiplicity::Infinity),
            _ => s
                .parse::<u32>()
                .ok()
                .filter(|m| *m >= 1)
                .map(Multiplicity::Finite)
                .ok_or_else(|| Error::UnknownModel(format!("bad multiplicity {s:?}"))),
        }
    }
}

impl std::fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiplicity::Finite(m) => write!(f, "{m}"),
            Multiplicity::Infinity => write!(f, "infinity"),
        }
    }
}

/// The finite set of places where the multiplicity condition is waived.
/// The archimedean place is always a member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaceSet {
    finite: BTreeSet<u64>,
}

impl PlaceSet {
    /// `S = {infinity}`, the minimal choice.
    pub fn archimedean_only() -> Self {
        PlaceSet::default()
    }

    pub fn with_primes<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let mut finite = BTreeSet::new();
        for p in primes {
            if !arith::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            finite.insert(p);
        }
        Ok(PlaceSet { finite })
    }

    /// Comma-separated finite primes, e.g. `"2,5"`; `"inf"` entries are
    /// accepted and ignored since the archimedean place is always present.
    pub fn parse(s: &str) -> Result<Self> {
        let mut primes = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if matches!(part, "inf" | "infinity" | "∞") {
                continue;
            }
            let p = part
                .parse::<u64>()
                .map_err(|_| Error::UnknownModel(format!("bad place {part:?}")))?;
            primes.push(p);
        }
        PlaceSet::with_primes(primes)
    }

    pub fn finite_primes(&self) -> &BTreeSet<u64> {
        &self.finite
    }

    pub fn contains_prime(&self, p: u64) -> bool {
        self.finite.contains(&p)
    }

    /// Number of places including the archimedean one.
    pub fn place_count(&self) -> usize {
        1 + self.finite.len()
    }
}

impl std::fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{inf")?;
        for p in &self.finite {
            write!(f, ",{p}")?;
        }
        write!(f, "}}")
    }
}

/// One boundary component with its anticanonical coefficient, its
/// coefficient in the counting line bundle, and its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryDivisor {
    label: &'static str,
    kappa: u32,
    lambda: u32,
    multiplicity: Multiplicity,
}

impl BoundaryDivisor {
    pub fn label(&self) -> &'static str {
        self.label
    }

    /// Coefficient in the anticanonical class.
    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// Coefficient in the counting line bundle L.
    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn multiplicity(&self) -> Multiplicity {
        self.multiplicity
    }

    pub fn epsilon(&self) -> Rational {
        self.multiplicity.epsilon()
    }
}

/// Which built-in geometry a model instance is based on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// Projective 3-space, dense Heisenberg orbit.
    P3Heisenberg,
    /// Projective plane, dense orbit of the 2-dimensional vector group;
    /// carries the one-variable character twist.
    P2Unipotent,
    /// Projective line, dense orbit of the 1-dimensional vector group.
    P1Vector,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::P3Heisenberg => "p3-heisenberg",
            ModelKind::P2Unipotent => "p2-unipotent",
            ModelKind::P1Vector => "p1-vector",
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            ModelKind::P3Heisenberg => 3,
            ModelKind::P2Unipotent => 2,
            ModelKind::P1Vector => 1,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "p3-heisenberg" | "p3" => Ok(ModelKind::P3Heisenberg),
            "p2-unipotent" | "p2" => Ok(ModelKind::P2Unipotent),
            "p1-vector" | "p1" => Ok(ModelKind::P1Vector),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

/// A built-in geometry equipped with a multiplicity and a counting line
/// bundle. Immutable after construction; all predicates are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldModel {
    kind: ModelKind,
    divisors: Vec<BoundaryDivisor>,
}

impl OrbifoldModel {
    /// Builds a model with boundary multiplicity `m` and counting bundle
    /// `L = lambda * H`. `lambda = None` picks the default: 1 for finite
    /// multiplicity, and the log-anticanonical degree `kappa - 1` for
    /// infinite multiplicity (the case the refined prediction covers).
    pub fn new(kind: ModelKind, m: Multiplicity, lambda: Option<u32>) -> Result<Self> {
        let kappa = kind.dim() + 1;
        let lambda = lambda.unwrap_or(match m {
            Multiplicity::Finite(_) => 1,
            Multiplicity::Infinity => kappa - 1,
        });
        if lambda == 0 {
            return Err(Error::IneffectiveL);
        }
        if let Multiplicity::Finite(fm) = m {
            assert!(fm >= 1, "finite multiplicity must be >= 1");
        }
        Ok(OrbifoldModel {
            kind,
            divisors: vec![BoundaryDivisor {
                label: "D",
                kappa,
                lambda,
                multiplicity: m,
            }],
        })
    }

    pub fn p3_heisenberg(m: Multiplicity) -> Self {
        OrbifoldModel::new(ModelKind::P3Heisenberg, m, None).unwrap()
    }

    pub fn p2_unipotent(m: Multiplicity) -> Self {
        OrbifoldModel::new(ModelKind::P2Unipotent, m, None).unwrap()
    }

    pub fn p1_vector(m: Multiplicity) -> Self {
        OrbifoldModel::new(ModelKind::P1Vector, m, None).unwrap()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Dimension of the ambient projective space.
    pub fn dim(&self) -> u32 {
        self.kind.dim()
    }

    /// Anticanonical degree, `dim + 1`.
    pub fn kappa(&self) -> u32 {
        self.kind.dim() + 1
    }

    pub fn divisors(&self) -> &[BoundaryDivisor] {
        &self.divisors
    }

    /// The unique boundary divisor of the built-in models.
    pub fn divisor(&self) -> &BoundaryDivisor {
        &self.divisors[0]
    }

    pub fn multiplicity(&self) -> Multiplicity {
        self.divisor().multiplicity
    }

    pub fn lambda(&self) -> u32 {
        self.divisor().lambda
    }

    fn divisor_index(&self, label: &str) -> Result<usize> {
        self.divisors
            .iter()
            .position(|d| d.label == label)
            .ok_or_else(|| Error::UnknownDivisor {
                model: self.name().to_string(),
                label: label.to_string(),
            })
    }

    /// Number of homogeneous coordinates, `dim + 1`.
    pub fn coordinate_count(&self) -> usize {
        self.kind.dim() as usize + 1
    }

    fn check_point<'a>(&self, point: &'a PrimitivePoint) -> &'a [BigInt] {
        assert_eq!(
            point.coords().len(),
            self.coordinate_count(),
            "point dimension does not match model {}",
            self.name()
        );
        point.coords()
    }

    /// Counts points of the reduction mod p stratified by the exact subset
    /// of boundary divisors containing them, by brute-force enumeration of
    /// projective space over the field with p elements.
    pub fn stratum_counts(&self, p: u64) -> Result<StratumCounts> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = self.dim() as usize;
        let mut by_subset: BTreeMap<Vec<&'static str>, u64> = BTreeMap::new();
        // canonical representatives: leading coordinate 1, zeros before it
        let mut coords = vec![0u64; n + 1];
        for lead in 0..=n {
            coords.iter_mut().for_each(|c| *c = 0);
            coords[lead] = 1;
            loop {
                // every built-in boundary divisor is cut out by the first
                // coordinate
                let subset: Vec<&'static str> = if coords[0] == 0 {
                    self.divisors.iter().map(|d| d.label).collect()
                } else {
                    Vec::new()
                };
                *by_subset.entry(subset).or_insert(0) += 1;
                // odometer over the free positions after the leading 1
                let mut pos = n;
                loop {
                    if pos <= lead {
                        break;
                    }
                    coords[pos] += 1;
                    if coords[pos] < p {
                        break;
                    }
                    coords[pos] = 0;
                    pos -= 1;
                }
                if pos <= lead {
                    break;
                }
            }
        }
        Ok(StratumCounts { by_subset })
    }

    /// The same stratum counts from the point-count formulas for
    /// projective space, used where enumeration would be too slow. Checked
    /// against `stratum_counts` in the tests.
    pub fn stratum_counts_formula(&self, p: u64) -> StratumCounts {
        let n = self.dim();
        let open = p.pow(n);
        // points of the boundary hyperplane, a projective space of one
        // dimension less: 1 + p + ... + p^(n-1)
        let divisor: u64 = (0..n).map(|i| p.pow(i)).sum();
        let mut by_subset = BTreeMap::new();
        by_subset.insert(Vec::new(), open);
        by_subset.insert(vec![self.divisor().label], divisor);
        StratumCounts { by_subset }
    }
}

/// Point counts of the mod-p strata, keyed by sorted divisor-label subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumCounts {
    pub by_subset: BTreeMap<Vec<&'static str>, u64>,
}

impl StratumCounts {
    pub fn open_orbit(&self) -> u64 {
        self.by_subset.get(&Vec::new()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.by_subset.values().sum()
    }
}

/// The local intersection number of a point with a boundary divisor at p:
/// the p-adic valuation of the divisor's defining form on primitive
/// coordinates.
pub fn intersection_multiplicity(
    model: &OrbifoldModel,
    point: &PrimitivePoint,
    divisor_label: &str,
    p: u64,
) -> Result<u32> {
    model.divisor_index(divisor_label)?;
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let coords = model.check_point(point);
    let a = &coords[0];
    if a.is_zero() {
        return Err(Error::BoundaryPoint(point.to_string()));
    }
    Ok(bigint_valuation(a, p))
}

fn bigint_valuation(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Full prime factorization of a nonzero integer by trial division;
/// adequate for the coordinate sizes arising in enumeration.
fn factor_bigint(n: &BigInt) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let e = bigint_valuation(&n, d);
        if e > 0 {
            out.push((d, e));
            n /= BigInt::from(d).pow(e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let p = n.to_u64().expect("prime cofactor exceeds u64");
        out.push((p, 1));
    }
    out
}

/// True iff the point satisfies the multiplicity condition at every prime
/// outside S: intersection number 0 or >= m for finite m, and exactly 0
/// for infinite multiplicity.
pub fn is_campana(model: &OrbifoldModel, point: &PrimitivePoint, s: &PlaceSet) -> Result<bool> {
    let coords = model.check_point(point);
    let a = &coords[0];
    if a.is_zero() {
        return Err(Error::BoundaryPoint(point.to_string()));
    }
    let m = model.multiplicity();
    if m == Multiplicity::Finite(1) {
        return Ok(true);
    }
    for (p, e) in factor_bigint(a) {
        if !s.contains_prime(p) && !m.admits(e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The growth invariants read off from the model data: pole location
/// `a_bar`, pole order `b_bar`, and when the boundary has weight-1
/// components and L is log-anticanonical, the refined order `b_prime`
/// that also counts the places of S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedInvariants {
    pub a_bar: Rational,
    pub b_bar: usize,
    pub b_prime: Option<usize>,
    /// Labels of the divisors achieving the maximum in `a_bar`.
    pub maximal_divisors: Vec<&'static str>,
}

impl PredictedInvariants {
    /// The pole order that feeds the counting law: `b_prime` when the
    /// refined prediction applies, else `b_bar`.
    pub fn log_power(&self) -> usize {
        self.b_prime.unwrap_or(self.b_bar)
    }
}

/// Computes `a_bar = max (kappa - epsilon)/lambda` over the divisors, the
/// argmax count `b_bar`, and the refined `b_prime` in the weight-1 case
/// with log-anticanonical L.
pub fn predict_invariants(model: &OrbifoldModel, s: &PlaceSet) -> Result<PredictedInvariants> {
    let mut a_bar: Option<Rational> = None;
    let mut maximal: Vec<&'static str> = Vec::new();
    for d in model.divisors() {
        if d.lambda() == 0 {
            return Err(Error::IneffectiveL);
        }
        let value = (Rational::from_integer(d.kappa().into()) - d.epsilon())
            / Rational::from_integer(d.lambda().into());
        match &a_bar {
            Some(best) if value < *best => {}
            Some(best) if value == *best => maximal.push(d.label()),
            _ => {
                a_bar = Some(value);
                maximal = vec![d.label()];
            }
        }
    }
    let a_bar = a_bar.ok_or(Error::IneffectiveL)?;
    let b_bar = maximal.len();

    // the refined order applies when some weight is 1 and L equals the
    // log-anticanonical bundle, lambda = kappa - epsilon on every divisor
    let has_weight_one = model
        .divisors()
        .iter()
        .any(|d| d.multiplicity() == Multiplicity::Infinity);
    let log_anticanonical = model.divisors().iter().all(|d| {
        Rational::from_integer(d.lambda().into())
            == Rational::from_integer(d.kappa().into()) - d.epsilon()
    });
    let b_prime = if has_weight_one && log_anticanonical {
        let klt_count = model
            .divisors()
            .iter()
            .filter(|d| d.multiplicity() != Multiplicity::Infinity)
            .count();
        // per place of S: the largest subset of weight-1 divisors with a
        // common local point; a single hyperplane has points everywhere,
        // so each place contributes exactly 1
        Some(klt_count + s.place_count())
    } else {
        None
    };

    Ok(PredictedInvariants {
        a_bar,
        b_bar,
        b_prime,
        maximal_divisors: maximal,
    })
}
