//! Complex-coefficient Laurent polynomials and their behaviour on the unit circle.
//!
//! A [`LaurentPoly`] stores a dense coefficient window `[min_degree, degree]`.
//! Everything else in the crate (Fourier truncations, completion, QSP
//! sequences) passes these around.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which edge coefficients are dropped.
pub const TRIM_REL: f64 = 1e-14;

/// Tolerance on `|z| = 1` accepted by [`LaurentPoly::eval`].
pub const CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: i64) -> Parity {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// `sum_j coeffs[j] * w^(min_degree + j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLaurent")]
pub struct LaurentPoly {
    min_degree: i64,
    coeffs: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawLaurent {
    min_degree: i64,
    coeffs: Vec<Complex64>,
}

impl TryFrom<RawLaurent> for LaurentPoly {
    type Error = String;

    fn try_from(raw: RawLaurent) -> std::result::Result<Self, Self::Error> {
        if raw
            .coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err("non-finite coefficient".into());
        }
        Ok(LaurentPoly::new(raw.min_degree, raw.coeffs))
    }
}

impl LaurentPoly {
    pub fn new(min_degree: i64, coeffs: Vec<Complex64>) -> Self {
        let mut p = LaurentPoly { min_degree, coeffs };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        LaurentPoly {
            min_degree: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::new(k, vec![c])
    }

    /// Builds `sum_{k=lo}^{hi} f(k) w^k`.
    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> Complex64) -> Self {
        if hi < lo {
            return Self::zero();
        }
        Self::new(lo, (lo..=hi).map(f).collect())
    }

    /// Real coefficients, lowest exponent first.
    pub fn from_real(min_degree: i64, coeffs: &[f64]) -> Self {
        Self::new(
            min_degree,
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    fn normalize(&mut self) {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            *self = LaurentPoly::zero();
            return;
        }
        let cut = TRIM_REL * max;
        let first = self.coeffs.iter().position(|c| c.norm() >= cut).unwrap();
        let last = self.coeffs.iter().rposition(|c| c.norm() >= cut).unwrap();
        self.coeffs.truncate(last + 1);
        self.coeffs.drain(..first);
        self.min_degree += first as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    /// Largest exponent. The zero polynomial reports `min_degree - 1`.
    pub fn degree(&self) -> i64 {
        self.min_degree + self.coeffs.len() as i64 - 1
    }

    /// `max(|degree|, |min_degree|)`, the number of `w~` factors a QSP
    /// sequence needs for this polynomial.
    pub fn abs_degree(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.degree()
                .unsigned_abs()
                .max(self.min_degree.unsigned_abs()) as usize
        }
    }

    /// `degree - min_degree`, zero for constants and the zero polynomial.
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let j = k - self.min_degree;
        if j < 0 || j >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[j as usize]
        }
    }

    /// Iterates `(exponent, coefficient)` over the stored window.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(j, &c)| (self.min_degree + j as i64, c))
    }

    /// Evaluates at a point of the unit circle.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let dev = z.norm() - 1.0;
        if dev.abs() > CIRCLE_TOL {
            return Err(Error::OffCircle {
                re: z.re,
                im: z.im,
                deviation: dev,
            });
        }
        Ok(self.eval_anywhere(z))
    }

    /// Evaluation without the unit-modulus check; `z` must be nonzero when
    /// negative exponents are present.
    pub fn eval_anywhere(&self, z: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if self.is_zero() {
            return zero;
        }
        // Horner on the w part and on the w^-1 part separately.
        let mut pos = zero;
        for (j, &c) in self.coeffs.iter().enumerate().rev() {
            if self.min_degree + (j as i64) < 0 {
                break;
            }
            pos = pos * z + c;
        }
        if self.min_degree > 0 {
            pos *= z.powi(self.min_degree as i32);
        }
        let mut neg = zero;
        if self.min_degree < 0 {
            let zi = z.inv();
            for (_, c) in self.terms().take_while(|&(k, _)| k < 0) {
                neg = (neg + c) * zi;
            }
            if self.degree() < -1 {
                neg *= zi.powi((-1 - self.degree()) as i32);
            }
        }
        pos + neg
    }

    /// Value at `e^{i theta}`.
    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        self.eval_anywhere(Complex64::from_polar(1.0, theta))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(
            self.min_degree,
            self.coeffs.iter().map(|&c| c * s).collect(),
        )
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Multiplies by `w^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            min_degree: self.min_degree + k,
            coeffs: self.coeffs.clone(),
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.is_zero() {
            return other.scale_real(sign);
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.degree().max(other.degree());
        Self::from_fn(lo, hi, |k| self.coeff(k) + other.coeff(k) * sign)
    }

    /// Exact coefficient convolution.
    pub fn mul_poly(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.min_degree + other.min_degree, out)
    }

    /// `p*(w)`: conjugated coefficients with `w -> 1/w`, so that on the unit
    /// circle `p*(z) = conj(p(z))`.
    pub fn conj_reciprocal(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(
            -self.degree(),
            self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        )
    }

    /// `p(1/w)` with unchanged coefficients.
    pub fn reciprocal(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(-self.degree(), self.coeffs.iter().rev().copied().collect())
    }

    /// Splits into even-exponent and odd-exponent parts.
    pub fn parity_split(&self) -> (Self, Self) {
        let zero = Complex64::new(0.0, 0.0);
        let pick = |parity: Parity| {
            Self::new(
                self.min_degree,
                self.terms()
                    .map(|(k, c)| if Parity::of(k) == parity { c } else { zero })
                    .collect(),
            )
        };
        (pick(Parity::Even), pick(Parity::Odd))
    }

    /// `Some` when every stored exponent has the same parity. The zero
    /// polynomial is reported as even.
    pub fn parity(&self) -> Option<Parity> {
        let zero_tol = TRIM_REL * self.max_abs_coeff();
        let mut found: Option<Parity> = None;
        for (k, c) in self.terms() {
            if c.norm() <= zero_tol {
                continue;
            }
            let p = Parity::of(k);
            match found {
                None => found = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or(Parity::Even))
    }

    /// `c_{-k} = conj(c_k)` for every `k`, i.e. the polynomial is real on the circle.
    pub fn is_real_on_circle(&self, tol: f64) -> bool {
        self.symmetric_defect(|c| c.conj()) <= tol
    }

    /// `c_{-k} = c_k` for every `k`.
    pub fn is_reciprocal(&self, tol: f64) -> bool {
        self.symmetric_defect(|c| c) <= tol
    }

    fn symmetric_defect(&self, map: impl Fn(Complex64) -> Complex64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let n = self.abs_degree() as i64;
        (-n..=n)
            .map(|k| (self.coeff(-k) - map(self.coeff(k))).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum |c_k| |k|^order`, a bound on `|d^order/dθ^order p(e^{iθ})|`.
    pub fn weighted_l1(&self, order: i32) -> f64 {
        self.terms()
            .map(|(k, c)| c.norm() * (k.abs() as f64).powi(order))
            .sum()
    }

    /// Real part of every coefficient; used when a polynomial is known to
    /// have real coefficients up to rounding.
    pub fn real_coeffs(&self) -> Self {
        Self::new(
            self.min_degree,
            self.coeffs
                .iter()
                .map(|c| Complex64::new(c.re, 0.0))
                .collect(),
        )
    }

    /// Values at the `m`-th roots of unity `e^{2πij/m}`, `j = 0..m`, by one FFT.
    /// Exponents are folded modulo `m`, which is exact on the grid.
    pub fn eval_on_roots_of_unity(&self, m: usize) -> Vec<Complex64> {
        let mut bins = vec![Complex64::new(0.0, 0.0); m];
        if m == 0 {
            return bins;
        }
        for (k, c) in self.terms() {
            bins[k.rem_euclid(m as i64) as usize] += c;
        }
        let fft = FftPlanner::new().plan_fft_inverse(m);
        fft.process(&mut bins);
        bins
    }

    /// Grid maximum of `|p|` with a certified slack; see [`SupNorm`].
    pub fn sup_norm_on_circle(&self, grid: &CircleGrid) -> Result<SupNorm> {
        let required = 8 * self.span().max(1);
        if grid.size < required {
            return Err(Error::GridTooCoarse {
                size: grid.size,
                span: self.span(),
                required,
            });
        }
        let vals = self.eval_on_roots_of_unity(grid.size);
        let value = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let step = 2.0 * PI / grid.size as f64;
        let slack = modulus_slack(
            value,
            step,
            self.weighted_l1(0),
            self.weighted_l1(1),
            self.weighted_l1(2),
        );
        Ok(SupNorm { value, slack })
    }
}

/// Certified slack between the grid maximum of `|p|` and its true maximum.
///
/// First order: `|p|` is `L1`-Lipschitz in θ, so the true max exceeds the
/// grid max by at most `L1·step/2`. Second order: `h = |p|²` has
/// `|h''| ≤ 2(L1² + L0·L2)` and `h' = 0` at an interior maximum, so the true
/// max of `h` exceeds the grid max by at most `|h''|·step²/8`. The smaller
/// of the two is reported.
pub(crate) fn modulus_slack(grid_max: f64, step: f64, l0: f64, l1: f64, l2: f64) -> f64 {
    let first = l1 * step / 2.0;
    let h2 = 2.0 * (l1 * l1 + l0 * l2);
    let second = (grid_max * grid_max + h2 * step * step / 8.0).sqrt() - grid_max;
    first.min(second)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    /// Largest modulus seen on the grid.
    pub value: f64,
    /// Additive bound on how far the true sup can exceed `value`.
    pub slack: f64,
}

impl SupNorm {
    pub fn bound(&self) -> f64 {
        self.value + self.slack
    }
}

/// The `size`-th roots of unity, used as a sup-norm estimation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    size: usize,
}

impl CircleGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::param("grid size", "must be positive"));
        }
        Ok(CircleGrid { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.size as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.size).map(|j| self.point(j))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.mul_poly(rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale_real(-1.0)
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn w() -> LaurentPoly {
        LaurentPoly::monomial(1, c(1.0, 0.0))
    }

    fn winv() -> LaurentPoly {
        LaurentPoly::monomial(-1, c(1.0, 0.0))
    }

    fn one() -> LaurentPoly {
        LaurentPoly::constant(c(1.0, 0.0))
    }

    #[test]
    fn eval_examples() {
        let p = &w() + &winv();
        assert!(p.eval(c(0.0, 1.0)).unwrap().norm() < 1e-15);

        let z = Complex64::from_polar(1.0, PI / 3.0);
        assert!((w().eval(z).unwrap() - z).norm() < 1e-15);

        let q = LaurentPoly::from_real(0, &[1.0, 0.0, -1.0]);
        assert!(q.eval(c(1.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn eval_rejects_off_circle() {
        assert!(matches!(
            w().eval(c(1.1, 0.0)),
            Err(Error::OffCircle { .. })
        ));
    }

    #[test]
    fn eval_negative_only_window() {
        let p = LaurentPoly::from_real(-3, &[2.0, 0.0]);
        let z = Complex64::from_polar(1.0, 0.4);
        let expect = z.powi(-3) * 2.0;
        assert!((p.eval(z).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn add_and_scale_examples() {
        let s = &w() + &winv();
        assert_eq!(s.min_degree(), -1);
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);

        assert!((&w() + &one()).scale(c(0.0, 0.0)).is_zero());

        let cancel = &(&one() - &w()) + &w();
        assert_eq!(cancel, one());
    }

    #[test]
    fn mul_examples() {
        let a = &w() - &one();
        let b = &winv() - &one();
        let expect = LaurentPoly::from_real(-1, &[-1.0, 2.0, -1.0]);
        assert_eq!(&a * &b, expect);
        assert!((&a * &LaurentPoly::zero()).is_zero());
    }

    #[test]
    fn mul_conjugate_pair_matches_grid() {
        let e = LaurentPoly::from_real(0, &[-0.5, 1.0]);
        let prod = &e * &e.conj_reciprocal();
        let direct_a = &w() - &LaurentPoly::constant(c(0.5, 0.0));
        let direct_b = &winv() - &LaurentPoly::constant(c(0.5, 0.0));
        let grid = CircleGrid::new(64).unwrap();
        for z in grid.points() {
            let lhs = prod.eval(z).unwrap();
            let rhs = direct_a.eval(z).unwrap() * direct_b.eval(z).unwrap();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn conj_reciprocal_examples() {
        let p = LaurentPoly::monomial(1, c(0.0, 1.0));
        assert_eq!(p.conj_reciprocal(), LaurentPoly::monomial(-1, c(0.0, -1.0)));
        let r = &w() + &winv();
        assert_eq!(r.conj_reciprocal(), r);
    }

    #[test]
    fn parity_split_examples() {
        let p = &w() + &LaurentPoly::monomial(2, c(1.0, 0.0));
        let (e, o) = p.parity_split();
        assert_eq!(e, LaurentPoly::monomial(2, c(1.0, 0.0)));
        assert_eq!(o, w());

        let even = LaurentPoly::from_real(-2, &[1.0, 0.0, 0.0, 0.0, 1.0]);
        let (e, o) = even.parity_split();
        assert_eq!(e, even);
        assert!(o.is_zero());
        assert_eq!(even.parity(), Some(Parity::Even));
        assert_eq!(p.parity(), None);
    }

    #[test]
    fn symmetry_predicates() {
        let cos2 = &w() + &winv();
        assert!(cos2.is_real_on_circle(1e-15));
        assert!(cos2.is_reciprocal(1e-15));

        let sine = (&w() - &winv()).scale(c(0.0, 1.0));
        assert!(sine.is_real_on_circle(1e-15));
        assert!(!sine.is_reciprocal(1e-15));
        // i(w - 1/w) at e^{iθ} is -2 sin θ
        let th = 0.7;
        assert!((sine.eval_angle(th).re + 2.0 * th.sin()).abs() < 1e-14);

        assert!(!w().is_real_on_circle(1e-15));
        assert!(!w().is_reciprocal(1e-15));
    }

    #[test]
    fn sup_norm_examples() {
        let grid = CircleGrid::new(64).unwrap();
        let s = w().sup_norm_on_circle(&grid).unwrap();
        assert!((s.value - 1.0).abs() < 1e-15);

        let cos = (&w() + &winv()).scale_real(0.5);
        let s = cos.sup_norm_on_circle(&grid).unwrap();
        assert!((s.value - 1.0).abs() < 1e-15);
        assert!(s.slack >= 0.0);
    }

    #[test]
    fn sup_norm_rejects_coarse_grid() {
        let p = LaurentPoly::from_real(-4, &[1.0; 9]);
        let grid = CircleGrid::new(32).unwrap();
        assert!(matches!(
            p.sup_norm_on_circle(&grid),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn fft_grid_matches_horner() {
        let p = LaurentPoly::new(
            -3,
            (0..8)
                .map(|j| c(j as f64 * 0.3 - 1.0, 0.1 * j as f64))
                .collect(),
        );
        let m = 20;
        let grid = CircleGrid::new(m).unwrap();
        let vals = p.eval_on_roots_of_unity(m);
        for (j, z) in grid.points().enumerate() {
            assert!((vals[j] - p.eval(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let p = LaurentPoly::new(-1, vec![c(1.5, -0.25), c(0.0, 2.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"min_degree":-1,"coeffs":[[1.5,-0.25],[0.0,2.0]]}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let zero = serde_json::to_string(&LaurentPoly::zero()).unwrap();
        assert_eq!(zero, r#"{"min_degree":0,"coeffs":[]}"#);
    }
}
