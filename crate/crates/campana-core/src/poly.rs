//! Dense polynomials and rational functions with exact rational
//! coefficients, plus exact sums of p-power roots of unity for the
//! character-sum oracles.

use num_traits::{One, ToPrimitive, Zero};

use crate::arith::Rational;

/// Polynomial in one variable, dense coefficient vector, constant term
/// first, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Rational::one()])
    }

    pub fn monomial(coeff: Rational, degree: usize) -> Self {
        if coeff.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); degree + 1];
        v[degree] = coeff;
        Poly(v)
    }

    fn trim(&mut self) {
        while self.0.last().map_or(false, Rational::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * t + c.to_f64().expect("coefficient fits f64");
        }
        acc
    }
}

/// Ratio of two polynomials, normalized so the denominator has constant
/// term 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        let c0 = den.coeff(0);
        assert!(!c0.is_zero(), "denominator must be a unit at 0");
        if c0.is_one() {
            return RationalFunction { num, den };
        }
        let inv = Rational::one() / c0;
        let scale = |p: &Poly| Poly::new(p.coeffs().iter().map(|c| c * &inv).collect());
        RationalFunction {
            num: scale(&num),
            den: scale(&den),
        }
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalFunction {
            num,
            den: Poly::one(),
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn mul_poly(&self, p: &Poly) -> RationalFunction {
        RationalFunction::new(self.num.mul(p), self.den.clone())
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.num.eval(t) / self.den.eval(t)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.num.eval_f64(t) / self.den.eval_f64(t)
    }

    /// Power-series coefficients of `num/den` through degree `n`.
    pub fn series(&self, n: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut c = self.num.coeff(i);
            for j in 1..=i {
                let d = self.den.coeff(j);
                if !d.is_zero() {
                    c -= d * &out[i - j];
                }
            }
            // den.coeff(0) is 1 by normalization
            out.push(c);
        }
        out
    }
}

/// An exact element of the cyclotomic field of p^level-th roots of unity,
/// stored as integer coordinates on the basis of all p^level-th roots
/// (redundant until reduced). Accumulates character sums, then decides
/// rationality exactly.
pub(crate) struct RootOfUnitySum {
    p: u64,
    level: u32,
    /// coefficient of exp(2 pi i j / p^level) at index j
    coeffs: Vec<i64>,
}

impl RootOfUnitySum {
    pub fn new(p: u64, level: u32) -> Self {
        let order = p.pow(level) as usize;
        RootOfUnitySum {
            p,
            level,
            coeffs: vec![0; order],
        }
    }

    /// Adds exp(2 pi i numerator / p^level).
    pub fn add_exponent(&mut self, numerator: u64) {
        let order = self.coeffs.len() as u64;
        self.coeffs[(numerator % order) as usize] += 1;
    }

    /// Reduces against the minimal polynomial of a primitive p^level-th
    /// root and returns the value if it is rational, which for complete
    /// residue sums it always is.
    ///
    /// The reduction uses x^((p-1)p^(level-1)) = -(1 + x^(p^(level-1)) +
    /// ... + x^((p-2)p^(level-1))) repeatedly; coordinates on the basis
    /// 1, x, ..., x^(phi-1) are then unique, so the sum is rational iff
    /// every non-constant coordinate vanishes.
    pub fn rational_value(mut self) -> Option<Rational> {
        if self.level == 0 {
            return Some(Rational::from_integer(self.coeffs[0].into()));
        }
        let stride = self.p.pow(self.level - 1) as usize;
        let phi = stride * (self.p as usize - 1);
        for i in (phi..self.coeffs.len()).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            self.coeffs[i] = 0;
            let e = i - phi;
            for j in 0..(self.p as usize - 1) {
                self.coeffs[e + j * stride] -= c;
            }
        }
        if self.coeffs[1..phi].iter().any(|&c| c != 0) {
            return None;
        }
        Some(Rational::from_integer(self.coeffs[0].into()))
    }
}
