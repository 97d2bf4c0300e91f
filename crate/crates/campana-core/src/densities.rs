//! Local height integrals as exact rational functions, their brute-force
//! oracles, character-twisted variants, Euler products with explicit tail
//! bounds, the archimedean factor, and the leading constant of the
//! counting law.
//!
//! Good-reduction factors are carried as rational functions in the formal
//! variable `t = p^(-(s - kappa + 1))`; equality checks against the
//! oracles are exact. Floating point enters only when an Euler product or
//! the archimedean integral is evaluated at a numeric exponent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::orbifold::{Multiplicity, OrbifoldModel, PlaceSet};
use crate::poly::{Poly, RationalFunction, RootOfUnitySum};
use crate::report::{fmt_sig, JsonObject};

/// A local factor as an exact rational function of `t = p^(-(s-shift))`
/// where `shift = kappa - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFactor {
    function: RationalFunction,
    prime: u64,
    shift: u32,
}

impl LocalFactor {
    fn new(function: RationalFunction, prime: u64, shift: u32) -> Self {
        LocalFactor {
            function,
            prime,
            shift,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// The exponent shift in `t = p^(-(s - shift))`.
    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn numerator_coeffs(&self) -> Vec<Rational> {
        self.function.num.coeffs().to_vec()
    }

    pub fn denominator_coeffs(&self) -> Vec<Rational> {
        self.function.den.coeffs().to_vec()
    }

    /// Power-series coefficients in `t` through degree `n`.
    pub fn series(&self, n: usize) -> Vec<Rational> {
        self.function.series(n)
    }

    pub fn eval_t(&self, t: &Rational) -> Rational {
        self.function.eval(t)
    }

    pub fn eval_t_f64(&self, t: f64) -> f64 {
        self.function.eval_f64(t)
    }

    /// Evaluates at a numeric exponent s via `t = p^(-(s - shift))`.
    pub fn eval_s(&self, s: f64) -> f64 {
        self.eval_t_f64((self.prime as f64).powf(-(s - self.shift as f64)))
    }

    fn multiply_poly(&self, p: &Poly) -> LocalFactor {
        LocalFactor::new(self.function.mul_poly(p), self.prime, self.shift)
    }
}

fn ensure_prime(p: u64) -> Result<()> {
    if arith::is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// The good-reduction local density as a closed-form rational function:
/// a sum over boundary strata of their normalized point counts times, for
/// each divisor met with finite multiplicity m, the admissible-valuation
/// series `(1 - 1/p) t^m / (1 - t)`; divisors of weight 1 contribute 0.
pub fn local_density_closed(model: &OrbifoldModel, p: u64) -> Result<LocalFactor> {
    ensure_prime(p)?;
    let n = model.dim();
    let counts = model.stratum_counts_formula(p);
    let one_minus_t = Poly::from_i64(&[1, -1]);
    let mut total = RationalFunction::from_poly(Poly::zero());
    for (subset, count) in &counts.by_subset {
        // #D°_B / p^(n - #B), the normalized stratum volume
        let scale = Rational::new(
            BigInt::from(*count),
            BigInt::from(p).pow(n - subset.len() as u32),
        );
        let mut term = RationalFunction::from_poly(Poly::new(vec![scale]));
        for label in subset {
            let divisor = model
                .divisors()
                .iter()
                .find(|d| d.label() == *label)
                .expect("stratum label refers to a model divisor");
            match divisor.multiplicity() {
                Multiplicity::Finite(m) => {
                    let coeff = Rational::new(BigInt::from(p - 1), BigInt::from(p));
                    term = term.mul(&RationalFunction::new(
                        Poly::monomial(coeff, m as usize),
                        one_minus_t.clone(),
                    ));
                }
                // weight-1 divisors admit no positive multiplicity at all:
                // the stratum contributes nothing
                Multiplicity::Infinity => {
                    term = RationalFunction::from_poly(Poly::zero());
                }
            }
        }
        total = RationalFunction::new(
            total.num.mul(&term.den).add(&term.num.mul(&total.den)),
            total.den.mul(&term.den),
        );
    }
    Ok(LocalFactor::new(total, p, model.kappa() - 1))
}

/// Independent check of the closed form: the coefficient of `t^k` is the
/// normalized volume of the valuation-k stratum, computed from residue
/// counts mod p^k (tuples with at least one unit coordinate) rather than
/// from the stratum formula.
pub fn local_density_oracle(model: &OrbifoldModel, p: u64, depth: usize) -> Result<Vec<Rational>> {
    ensure_prime(p)?;
    let n = model.dim();
    let m = model.multiplicity();
    let mut coeffs = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        if k == 0 {
            coeffs.push(Rational::one());
            continue;
        }
        if !m.admits(k as u32) {
            coeffs.push(Rational::zero());
            continue;
        }
        // residues mod p^k in n coordinates with at least one unit entry,
        // normalized by the total count
        let total = BigInt::from(p).pow(k as u32 * n);
        let all_divisible = BigInt::from(p).pow((k as u32 - 1) * n);
        coeffs.push(Rational::new(&total - all_divisible, total));
    }
    Ok(coeffs)
}

/// The closed-form factor times `1 - t^m` for every finite-multiplicity
/// divisor, removing the zeta-type pole so the Euler product converges
/// past it.
pub fn regularized_local_factor(model: &OrbifoldModel, p: u64) -> Result<LocalFactor> {
    let mut factor = local_density_closed(model, p)?;
    for d in model.divisors() {
        if let Multiplicity::Finite(m) = d.multiplicity() {
            let mut reg = vec![Rational::zero(); m as usize + 1];
            reg[0] = Rational::one();
            reg[m as usize] = -Rational::one();
            factor = factor.multiply_poly(&Poly::new(reg));
        }
    }
    Ok(factor)
}

/// A character twist along the affine coordinates of the open orbit: the
/// i-th entry multiplies coordinate i inside the additive character. Zero
/// entries leave a coordinate untwisted.
pub type Twist = Vec<Rational>;

/// Twist for the 3-space model: character on the two abelianized
/// coordinates `(x, y)` of `[1:x:y:z]`.
pub fn heisenberg_twist(a1: &Rational, a2: &Rational) -> Twist {
    vec![a1.clone(), a2.clone(), Rational::zero()]
}

/// Twist for the plane model: character on the second affine coordinate
/// `z` of `[1:y:z]`.
pub fn unipotent_twist(a: &Rational) -> Twist {
    vec![Rational::zero(), a.clone()]
}

fn twist_min_valuation(twist: &[Rational], p: u64) -> Result<Option<i64>> {
    let mut min: Option<i64> = None;
    for u in twist {
        if u.is_zero() {
            continue;
        }
        let v = arith::padic_valuation(u, p)?;
        min = Some(min.map_or(v, |m| m.min(v)));
    }
    Ok(min)
}

/// Closed form of the character-twisted local density. With `j` the
/// smallest valuation among the twist entries, cancellation kills every
/// valuation stratum past `j + 1`, the stratum at exactly `j + 1`
/// contributes `-p^(-n) t^(j+1)`, and lower strata are untouched; the
/// multiplicity condition then filters the admissible powers.
pub fn twisted_density_closed(model: &OrbifoldModel, p: u64, twist: &Twist) -> Result<LocalFactor> {
    ensure_prime(p)?;
    assert_eq!(
        twist.len(),
        model.dim() as usize,
        "one twist entry per affine coordinate"
    );
    let Some(j) = twist_min_valuation(twist, p)? else {
        return local_density_closed(model, p);
    };
    let n = model.dim();
    let m = model.multiplicity();
    let p_negn = Rational::new(BigInt::one(), BigInt::from(p).pow(n));
    let mut coeffs: Vec<Rational> = vec![Rational::zero()];
    if j >= 0 {
        coeffs[0] = Rational::one();
        for k in 1..=(j + 1) {
            let c = if m.admits(k as u32) {
                if k <= j {
                    Rational::one() - &p_negn
                } else {
                    -p_negn.clone()
                }
            } else {
                Rational::zero()
            };
            coeffs.push(c);
        }
    }
    // j < 0 means the character is already nontrivial on integral points
    // and every stratum vanishes
    Ok(LocalFactor::new(
        RationalFunction::from_poly(Poly::new(coeffs)),
        p,
        model.kappa() - 1,
    ))
}

/// `integral of psi(u x) over |x| <= p^K`, by brute-force enumeration of
/// the character over residues and exact reduction of the resulting sum
/// of roots of unity.
fn character_box_integral(u: &Rational, p: u64, k_box: u32) -> Rational {
    let pk = Rational::from_integer(BigInt::from(p).pow(k_box));
    if u.is_zero() {
        return pk;
    }
    let j = arith::padic_valuation(u, p).expect("twist entry is nonzero");
    let level = k_box as i64 - j;
    if level <= 0 {
        return pk;
    }
    let level = level as u32;
    let order = BigInt::from(p).pow(level);
    let order_u64 = order.to_u64().expect("character sum order fits u64");
    assert!(
        order_u64 <= 100_000_000,
        "character sum of order {order_u64} is too large to enumerate"
    );
    // strip the power of p: u = p^j A/B with A, B units, so u p^-j = A/B
    let unit = if j >= 0 {
        u / Rational::from_integer(BigInt::from(p).pow(j as u32))
    } else {
        u * Rational::from_integer(BigInt::from(p).pow(j.unsigned_abs() as u32))
    };
    let a = unit
        .numer()
        .mod_floor(&order)
        .to_u64()
        .expect("reduced numerator fits u64");
    let b = unit
        .denom()
        .mod_floor(&order)
        .to_u64()
        .expect("reduced denominator fits u64");
    let b_inv = arith::mod_inverse_u64(b, order_u64);
    let c = (a as u128 * b_inv as u128 % order_u64 as u128) as u64;
    let mut sum = RootOfUnitySum::new(p, level);
    for w in 0..order_u64 {
        sum.add_exponent(((c as u128 * w as u128) % order_u64 as u128) as u64);
    }
    let value = sum
        .rational_value()
        .expect("complete residue character sums are rational");
    // the sum averaged over the box, rescaled to its volume
    pk * value / Rational::from_integer(order)
}

/// Brute-force oracle for the twisted densities: stratified character
/// sums over residues, assembled from per-coordinate box integrals, with
/// the same valuation-stratum weights as the untwisted oracle.
pub fn twisted_density_oracle(
    model: &OrbifoldModel,
    p: u64,
    twist: &Twist,
    depth: usize,
) -> Result<Vec<Rational>> {
    ensure_prime(p)?;
    assert_eq!(
        twist.len(),
        model.dim() as usize,
        "one twist entry per affine coordinate"
    );
    for u in twist {
        if !u.is_zero() {
            arith::padic_valuation(u, p)?;
        }
    }
    let n = model.dim();
    let m = model.multiplicity();
    let box_integral = |k_box: u32| -> Rational {
        twist
            .iter()
            .map(|u| character_box_integral(u, p, k_box))
            .product()
    };
    let mut coeffs = Vec::with_capacity(depth + 1);
    let mut previous_box = box_integral(0);
    for k in 0..=depth {
        if k == 0 {
            coeffs.push(previous_box.clone());
            continue;
        }
        let current_box = box_integral(k as u32);
        let stratum = &current_box - &previous_box;
        previous_box = current_box;
        if !m.admits(k as u32) {
            coeffs.push(Rational::zero());
            continue;
        }
        let weight = Rational::new(BigInt::one(), BigInt::from(p).pow(k as u32 * n));
        coeffs.push(stratum * weight);
    }
    Ok(coeffs)
}

/// An evaluated Euler product with an explicit bound on the logarithm of
/// the omitted tail.
#[derive(Clone, Debug)]
pub struct DensityReport {
    pub model: String,
    pub m: Multiplicity,
    pub s: f64,
    pub prime_bound: u64,
    pub value: f64,
    pub tail_bound: f64,
    pub factors: Vec<(u64, f64)>,
}

impl DensityReport {
    pub fn to_json(&self) -> String {
        let factors: Vec<String> = self
            .factors
            .iter()
            .map(|(p, f)| format!("[{}, {}]", p, fmt_sig(*f, 12)))
            .collect();
        JsonObject::new()
            .string("model", &self.model)
            .string("m", &self.m.to_string())
            .number("s", self.s)
            .integer("prime_bound", self.prime_bound as i64)
            .number("value", self.value)
            .number("tail_bound", self.tail_bound)
            .raw("factors", format!("[{}]", factors.join(", ")))
            .finish()
    }
}

/// The exponent-gap at evaluation point `s`: the regularized factor is
/// `1 + O(p^-(1+delta))` with `delta = min(n + m w, (m+1) w) - 1` and
/// `w = s - kappa + 1`. Positive `delta` is the convergence window.
fn regularized_decay_exponent(model: &OrbifoldModel, s: f64) -> f64 {
    let n = model.dim() as f64;
    let w = s - (model.kappa() as f64 - 1.0);
    match model.multiplicity() {
        Multiplicity::Finite(m) => {
            let m = m as f64;
            (n + m * w).min((m + 1.0) * w) - 1.0
        }
        // the weight-1 factor is exactly 1 at good reduction
        Multiplicity::Infinity => f64::INFINITY,
    }
}

/// Evaluates the product of regularized local factors over `p <= p_max`
/// at a numeric exponent. Factors are computed in parallel but multiplied
/// in ascending prime order, so results are reproducible bit-for-bit.
pub fn euler_product(model: &OrbifoldModel, s: f64, p_max: u64) -> Result<DensityReport> {
    let w = s - (model.kappa() as f64 - 1.0);
    let delta = regularized_decay_exponent(model, s);
    if w <= 0.0 || delta <= 0.0 {
        return Err(Error::Divergent(format!(
            "euler product at s = {s} is outside the convergence window"
        )));
    }
    let primes = arith::primes_up_to(p_max);
    let factors: Result<Vec<(u64, f64)>> = primes
        .par_iter()
        .map(|&p| {
            let f = regularized_local_factor(model, p)?;
            Ok((p, f.eval_s(s)))
        })
        .collect();
    let factors = factors?;
    let mut value = 1.0;
    for (_, f) in &factors {
        value *= f;
    }
    let tail_bound = euler_tail_bound(&factors, p_max, delta);
    Ok(DensityReport {
        model: model.name().to_string(),
        m: model.multiplicity(),
        s,
        prime_bound: p_max,
        value,
        tail_bound,
        factors,
    })
}

/// Bound on `|log prod_{p > p_max} factor_p|`: the decay constant is
/// measured on the last decade of computed factors and the prime tail sum
/// is bounded by the integral estimate.
fn euler_tail_bound(factors: &[(u64, f64)], p_max: u64, delta: f64) -> f64 {
    if factors.is_empty() || !delta.is_finite() {
        return 0.0;
    }
    let cutoff = p_max / 10;
    let mut constant: f64 = 0.0;
    for &(p, f) in factors.iter().rev() {
        if p <= cutoff && constant > 0.0 {
            break;
        }
        constant = constant.max((f - 1.0).abs() * (p as f64).powf(1.0 + delta));
    }
    // sum over p > P of p^-(1+delta) is at most P^-delta / delta, and
    // |log(1+x)| <= 2|x| on the factor range
    2.0 * constant * (p_max as f64).powf(-delta) / delta
}

/// Closed form of the archimedean local integral for a model of dimension
/// n: the integral over real affine space of `max(1, |coords|)^(-sigma)`,
/// which splits into the unit box plus one beam per coordinate exceeding
/// 1, giving `2^n (1 + n/(sigma - n))` for `sigma > n`.
pub fn archimedean_density(model: &OrbifoldModel, sigma: f64) -> Result<f64> {
    let n = model.dim() as f64;
    if sigma <= n {
        return Err(Error::Divergent(format!(
            "archimedean integral diverges at sigma = {sigma} <= {n}"
        )));
    }
    Ok(2f64.powi(model.dim() as i32) * (1.0 + n / (sigma - n)))
}

fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
    depth: u32,
) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Quadrature(format!(
                "refinement limit reached on [{a}, {b}]"
            )));
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, eps, depth)
}

/// Numerical oracle for the archimedean factor: integrates
/// `max(1,|coords|)^(-sigma)` directly. The region splits by how many
/// coordinates exceed 1; on the piece where k do, logarithmic coordinates
/// and the symmetry that puts the largest first reduce it to a nested
/// integral over `w_1 > w_i > 0`, evaluated by nested adaptive Simpson
/// rule with an explicit truncation bound folded into the tolerance.
pub fn archimedean_quadrature(model: &OrbifoldModel, sigma: f64, tol: f64) -> Result<f64> {
    let n = model.dim() as usize;
    let nf = n as f64;
    if sigma <= nf {
        return Err(Error::Divergent(format!(
            "archimedean integral diverges at sigma = {sigma} <= {nf}"
        )));
    }
    let mut total = 1.0; // the unit box, normalized volume 1
    for k in 1..=n {
        let kf = k as f64;
        // split the tolerance over the patches and the final 2^n scaling,
        // half for truncation and half for quadrature error
        let budget = tol / (2f64.powi(n as i32) * 4.0 * nf * binomial(n, k) as f64);
        // truncation W of the outer (maximal) log coordinate: the tail of
        // the patch integral is below k exp(-(sigma-k) W)/(sigma-k)
        let w_max = (kf / ((sigma - kf) * budget)).ln() / (sigma - kf);
        // patch where k coordinates exceed 1; the largest is w1 by
        // symmetry (factor k), the rest fill (0, w1) freely
        let patch = nested_patch_integral(sigma, k, w_max, budget)? * kf;
        total += binomial(n, k) as f64 * patch;
    }
    Ok(2f64.powi(n as i32) * total)
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// The patch integral `int_0^W exp((1-sigma) w1) (int_0^{w1} exp(w) dw)^(k-1)
/// dw1` by nested adaptive Simpson integration. Substituting z = w1 - w in
/// the inner integral pulls its exponential growth out as exp((k-1) w1),
/// leaving the bounded kernel J(w1) = int_0^{w1} exp(-z) dz, so both levels
/// integrate functions of size at most 1.
fn nested_patch_integral(sigma: f64, k: usize, w_max: f64, tol: f64) -> Result<f64> {
    let eps = tol / 2.0;
    let inner_eps = eps / (2.0 * k as f64 * w_max.max(1.0));
    let mut outer = |w1: f64| -> f64 {
        let mut value = (-(sigma - k as f64) * w1).exp();
        if k > 1 {
            let mut f = |z: f64| (-z).exp();
            let kernel = adaptive_simpson(&mut f, 0.0, w1, inner_eps, 48)
                .expect("bounded smooth inner integrand");
            value *= kernel.powi(k as i32 - 1);
        }
        value
    };
    adaptive_simpson(&mut outer, 0.0, w_max, eps, 48)
}

/// The fully assembled leading constant of the counting law and its
/// Tauberian normalization.
#[derive(Clone, Debug)]
pub struct LeadingConstant {
    pub model: String,
    pub m: Multiplicity,
    pub a_bar: f64,
    pub log_power: usize,
    pub c_bar: f64,
    pub tauberian: f64,
    pub tail_bound: f64,
    pub archimedean: f64,
    pub finite_product: f64,
    pub s_place_factor: f64,
    pub zeta_residue: f64,
    pub prime_bound: u64,
}

impl LeadingConstant {
    pub fn to_json(&self) -> String {
        JsonObject::new()
            .string("model", &self.model)
            .string("m", &self.m.to_string())
            .number("a_bar", self.a_bar)
            .integer("log_power", self.log_power as i64)
            .number("c_bar", self.c_bar)
            .number("tauberian", self.tauberian)
            .number("tail_bound", self.tail_bound)
            .number("archimedean", self.archimedean)
            .number("finite_product", self.finite_product)
            .number("s_place_factor", self.s_place_factor)
            .number("zeta_residue", self.zeta_residue)
            .integer("prime_bound", self.prime_bound as i64)
            .finish()
    }
}

/// Assembles the leading constant as the residue of the height zeta
/// function at its rightmost pole: a zeta residue per finite-multiplicity
/// divisor, the archimedean density at the pole, the regularized Euler
/// product outside S, and one unrestricted factor per finite place of S.
///
/// With weight-1 boundary the finite factors outside S are 1 and every
/// place of S raises the pole order by one instead; the constant then
/// collects the archimedean residue and a logarithmic residue per finite
/// S-place.
pub fn leading_constant(
    model: &OrbifoldModel,
    s_places: &PlaceSet,
    p_max: u64,
) -> Result<LeadingConstant> {
    let invariants = crate::orbifold::predict_invariants(model, s_places)?;
    let a_bar = invariants.a_bar.to_f64().expect("pole location fits f64");
    let lambda = model.lambda() as f64;
    let n = model.dim() as f64;
    match model.multiplicity() {
        Multiplicity::Finite(m) => {
            // the pole in the height variable sits where the effective
            // exponent lambda*s equals kappa - epsilon = n + 1/m
            let sigma = lambda * a_bar;
            let archimedean = archimedean_density(model, sigma)?;
            let w = sigma - (model.kappa() as f64 - 1.0);
            let delta = regularized_decay_exponent(model, sigma);
            debug_assert!(w > 0.0 && delta > 0.0);
            let primes = arith::primes_up_to(p_max);
            let factors: Result<Vec<(u64, f64)>> = primes
                .par_iter()
                .map(|&p| {
                    let f = regularized_local_factor(model, p)?;
                    Ok((p, f.eval_t_f64((p as f64).powf(-w))))
                })
                .collect();
            let factors = factors?;
            let mut finite_product = 1.0;
            let mut s_place_factor = 1.0;
            let unrestricted = OrbifoldModel::new(model.kind(), Multiplicity::Finite(1), None)?;
            for &(p, f) in &factors {
                if s_places.contains_prime(p) {
                    // no multiplicity condition at p: unrestricted local
                    // density, regularized by the zeta factor it no
                    // longer occupies
                    let t = (p as f64).powf(-w);
                    let z_unr = local_density_closed(&unrestricted, p)?.eval_t_f64(t);
                    s_place_factor *= (1.0 - t.powi(m as i32)) * z_unr;
                } else {
                    finite_product *= f;
                }
            }
            let tail_bound = euler_tail_bound(&factors, p_max, delta);
            let zeta_residue = 1.0 / (m as f64 * lambda);
            let c_bar = zeta_residue * archimedean * finite_product * s_place_factor;
            assert!(c_bar > 0.0, "leading constant must be positive");
            let b = invariants.log_power();
            let tauberian = c_bar / (a_bar * factorial(b.saturating_sub(1)));
            Ok(LeadingConstant {
                model: model.name().to_string(),
                m: model.multiplicity(),
                a_bar,
                log_power: b,
                c_bar,
                tauberian,
                tail_bound,
                archimedean,
                finite_product,
                s_place_factor,
                zeta_residue,
                prime_bound: p_max,
            })
        }
        Multiplicity::Infinity => {
            // outside S every local factor is exactly 1; the pole is
            // carried by the archimedean beam integral, residue
            // 2^n n / lambda, and each finite S-place contributes a
            // logarithmic pole with residue (1 - p^-n)/(lambda ln p)
            let archimedean = 2f64.powi(model.dim() as i32) * n / lambda;
            let mut s_place_factor = 1.0;
            for &p in s_places.finite_primes() {
                s_place_factor *=
                    (1.0 - (p as f64).powi(-(model.dim() as i32))) / (lambda * (p as f64).ln());
            }
            let c_bar = archimedean * s_place_factor;
            assert!(c_bar > 0.0, "leading constant must be positive");
            let b = 1 + s_places.finite_primes().len();
            let tauberian = c_bar / (a_bar * factorial(b - 1));
            Ok(LeadingConstant {
                model: model.name().to_string(),
                m: model.multiplicity(),
                a_bar,
                log_power: b,
                c_bar,
                tauberian,
                tail_bound: 0.0,
                archimedean,
                finite_product: 1.0,
                s_place_factor,
                zeta_residue: 1.0,
                prime_bound: p_max,
            })
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
