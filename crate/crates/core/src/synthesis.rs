//! Completion of a target into an SU(2)-valued Laurent polynomial and its
//! factorization into QSP rotations.
//!
//! Conventions: an [`SU2LaurentPoly`] `(a, b, c, d)` takes the value
//! `a(z) + b(z)·iX + c(z)·iY + d(z)·iZ` at `|z| = 1`, so the top-left entry is
//! `f = a + i·d` and the bottom-right entry is `f*(z) = conj(f(z))`. A
//! [`RotationSequence`] `[Q_0, …, Q_n]` stands for
//! `Q_n w̃ Q_n† ⋯ Q_1 w̃ Q_1† Q_0` with `w̃ = diag(z, 1/z)`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{CircleGrid, LaurentPoly, Parity, CIRCLE_TOL};
use crate::mat2::Mat2;

/// Largest polynomial degree accepted by [`complete`] and [`decompose`].
pub const MAX_SYNTHESIS_DEGREE: usize = 512;

/// Roots with `|r| >= 1 - ROOT_GAP` are treated as on the circle.
pub const ROOT_GAP: f64 = 1e-8;

/// Symmetry tolerance for completion inputs.
const SYMMETRY_TOL: f64 = 1e-10;

/// Tolerance on the unitarity of decomposition inputs.
const UNITARY_TOL: f64 = 1e-8;

/// Tolerance on what peeling is allowed to discard.
const PEEL_TOL: f64 = 1e-7;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Scales `f` by `(1 - eta) / max(1, sup|f|)` so that `|f| <= 1 - eta` on
/// the circle. The sup is the certified bound of a dense grid scan.
pub fn rescale_to_admissible(f: &LaurentPoly, eta: f64) -> Result<LaurentPoly> {
    check_eta(eta)?;
    Ok(f.scale_real((1.0 - eta) / sup_bound(f)?.max(1.0)))
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", format!("{eta} is not in (0, 1)")));
    }
    Ok(())
}

/// Certified upper bound on `sup |f|` over the circle.
pub fn sup_bound(f: &LaurentPoly) -> Result<f64> {
    let size = (64 * f.span().max(1)).next_power_of_two().max(1 << 14);
    Ok(f.sup_norm_on_circle(&CircleGrid::new(size)?)?.bound())
}

/// `a(z)·1 + b(z)·iX + c(z)·iY + d(z)·iZ` with real-on-circle components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SU2LaurentPoly {
    a: LaurentPoly,
    b: LaurentPoly,
    c: LaurentPoly,
    d: LaurentPoly,
}

impl SU2LaurentPoly {
    pub fn new(a: LaurentPoly, b: LaurentPoly, c: LaurentPoly, d: LaurentPoly) -> Self {
        SU2LaurentPoly { a, b, c, d }
    }

    pub fn a(&self) -> &LaurentPoly {
        &self.a
    }

    pub fn b(&self) -> &LaurentPoly {
        &self.b
    }

    pub fn c(&self) -> &LaurentPoly {
        &self.c
    }

    pub fn d(&self) -> &LaurentPoly {
        &self.d
    }

    /// The top-left entry `a + i·d`.
    pub fn f(&self) -> LaurentPoly {
        &self.a + &self.d.scale(I)
    }

    fn parts(&self) -> [&LaurentPoly; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Largest `|exponent|` over the four components.
    pub fn degree(&self) -> usize {
        self.parts()
            .iter()
            .map(|p| p.abs_degree())
            .max()
            .unwrap_or(0)
    }

    /// Common exponent parity of all four components, if any.
    pub fn parity(&self) -> Option<Parity> {
        let mut found = None;
        for p in self.parts() {
            if p.is_zero() {
                continue;
            }
            let q = p.parity()?;
            match found {
                None => found = Some(q),
                Some(r) if r != q => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or(Parity::Even))
    }

    pub fn matrix_at(&self, z: Complex64) -> Result<Mat2> {
        let dev = z.norm() - 1.0;
        if dev.abs() > CIRCLE_TOL {
            return Err(Error::OffCircle {
                re: z.re,
                im: z.im,
                deviation: dev,
            });
        }
        let [a, b, c, d] = self.parts().map(|p| p.eval_anywhere(z));
        Ok(Mat2::from_quaternion(a, b, c, d))
    }

    /// `max |a² + b² + c² + d² - 1|` over `points` roots of unity.
    pub fn unitarity_defect(&self, points: usize) -> f64 {
        let vals = self.parts().map(|p| p.eval_on_roots_of_unity(points));
        (0..points)
            .map(|j| {
                let s: Complex64 = vals.iter().map(|v| v[j] * v[j]).sum();
                (s - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Matrix coefficients `C_k` for `k` in `[-n, n]`, `n = degree()`.
    pub fn coefficient_matrices(&self) -> Vec<Mat2> {
        let n = self.degree() as i64;
        (-n..=n)
            .map(|k| {
                let [a, b, c, d] = self.parts().map(|p| p.coeff(k));
                Mat2::from_quaternion(a, b, c, d)
            })
            .collect()
    }

    /// Inverse of [`coefficient_matrices`](Self::coefficient_matrices) for
    /// coefficients starting at exponent `min_degree`.
    pub fn from_coefficient_matrices(min_degree: i64, coeffs: &[Mat2]) -> Self {
        let part = |g: &dyn Fn(&Mat2) -> Complex64| {
            LaurentPoly::new(min_degree, coeffs.iter().map(g).collect())
        };
        SU2LaurentPoly {
            a: part(&|m| (m.0[0][0] + m.0[1][1]) / 2.0),
            b: part(&|m| (m.0[0][1] + m.0[1][0]) / (2.0 * I)),
            c: part(&|m| (m.0[0][1] - m.0[1][0]) / 2.0),
            d: part(&|m| (m.0[0][0] - m.0[1][1]) / (2.0 * I)),
        }
    }

    /// Expands a rotation sequence into its matrix Laurent polynomial.
    pub fn from_sequence(seq: &RotationSequence) -> Self {
        // Coefficients of the running product, lowest exponent first.
        let mut coeffs = vec![seq.factors[0]];
        let mut lo = 0i64;
        for q in &seq.factors[1..] {
            let p = *q * Mat2::diag(Complex64::new(1.0, 0.0), ZERO) * q.adjoint();
            let pc = Mat2::identity() - p;
            let mut next = vec![Mat2::zero(); coeffs.len() + 2];
            for (j, c) in coeffs.iter().enumerate() {
                next[j + 2] = next[j + 2] + p * *c;
                next[j] = next[j] + pc * *c;
            }
            coeffs = next;
            lo -= 1;
        }
        Self::from_coefficient_matrices(lo, &coeffs)
    }
}

/// Roots of `p(w) = 1 - a² - d²` strictly inside the unit disk, and the
/// positive constant `α` with `p(w) = α ∏_{r} (w - r)(1/w - r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootMultiset {
    pub roots: Vec<Complex64>,
    pub alpha: f64,
}

/// Parlett–Reinsch diagonal balancing; leaves eigenvalues unchanged.
fn balance(m: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / RADIX {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            while c > r * RADIX {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn horner_with_derivative(q: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = ZERO;
    let mut der = ZERO;
    for &c in q.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

/// All roots of the real polynomial `Σ q_j w^j` (lowest power first), from
/// the eigenvalues of its balanced companion matrix, Newton-polished.
pub fn polynomial_roots(q: &[f64]) -> Result<Vec<Complex64>> {
    let deg = q.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = q[deg];
    if lead == 0.0 {
        return Err(Error::RootFinding("zero leading coefficient".into()));
    }
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -q[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    balance(&mut comp);
    let schur = Schur::try_new(comp, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::RootFinding("Schur iteration did not converge".into()))?;
    let mut roots: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let (v, dv) = horner_with_derivative(q, *r);
            if dv.norm() == 0.0 {
                break;
            }
            let cand = *r - v / dv;
            if horner_with_derivative(q, cand).0.norm() < v.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}

/// Coefficients of `1 - a·a - d·d` for exponents `-2n..=2n`, `n` the larger
/// degree, forced real and symmetric. Deliberately untrimmed: tiny edge terms
/// still carry a root pair.
fn complement(a: &LaurentPoly, d: &LaurentPoly) -> Vec<f64> {
    let n = a.abs_degree().max(d.abs_degree()) as i64;
    let mut acc = vec![Complex64::new(0.0, 0.0); (4 * n + 1) as usize];
    for x in [a, d] {
        for (i, ci) in x.terms() {
            for (j, cj) in x.terms() {
                acc[(i + j + 2 * n) as usize] += ci * cj;
            }
        }
    }
    acc[(2 * n) as usize] -= 1.0;
    let m = acc.len();
    (0..m)
        .map(|k| -0.5 * (acc[k].re + acc[m - 1 - k].re))
        .collect()
}

/// Roots inside the disk of `1 - a² - d²` (times a power of `w`), and `α`.
///
/// When `a` and `d` share a definite parity the complement is a polynomial in
/// `w²` and is solved for `u = w²` at half the degree.
pub fn completion_roots(a: &LaurentPoly, d: &LaurentPoly) -> Result<RootMultiset> {
    roots_of_complement(&complement(a, d))
}

fn roots_of_complement(p: &[f64]) -> Result<RootMultiset> {
    let in_w_squared = p.iter().skip(1).step_by(2).all(|&c| c == 0.0);
    let mut q: Vec<f64> = if in_w_squared {
        p.iter().step_by(2).copied().collect()
    } else {
        p.to_vec()
    };
    while q.len() > 1 && q[0] == 0.0 && q[q.len() - 1] == 0.0 {
        q.pop();
        q.remove(0);
    }
    // q is palindromic of degree 2h, so h of its roots lie inside the disk.
    let half = (q.len() - 1) / 2;
    let found = polynomial_roots(&q)?;
    let (n, all): (usize, Vec<Complex64>) = if in_w_squared {
        let roots = found
            .into_iter()
            .flat_map(|u| {
                let w = u.sqrt();
                [w, -w]
            })
            .collect();
        (2 * half, roots)
    } else {
        (half, found)
    };
    let mut inside = Vec::with_capacity(n);
    for r in all {
        let m = r.norm();
        if (m - 1.0).abs() <= ROOT_GAP {
            return Err(Error::RootOnCircle {
                distance: (m - 1.0).abs(),
            });
        }
        if m < 1.0 {
            inside.push(r);
        }
    }
    if inside.len() != n {
        return Err(Error::RootFinding(format!(
            "{} roots inside the disk, expected {n}",
            inside.len()
        )));
    }
    let worst_pair = inside
        .iter()
        .map(|r| {
            inside
                .iter()
                .map(|s| (s - r.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    if worst_pair > 1e-8 {
        return Err(Error::RootFinding(format!(
            "roots not closed under conjugation (defect {worst_pair:e})"
        )));
    }
    let p1: f64 = p.iter().sum();
    let log_prod: f64 = inside.iter().map(|r| (1.0 - r).norm().ln()).sum();
    let alpha = p1.signum() * (p1.abs().ln() - 2.0 * log_prod).exp();
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    Ok(RootMultiset {
        roots: inside,
        alpha,
    })
}

/// Completes `f = a + i·d` into an SU(2)-valued Laurent polynomial.
///
/// With `p = 1 - a² - d² = α ∏ (w - r)(1/w - r)` over the roots inside the
/// disk, `e(w) = √α w^{-n'/2} ∏ (w - r)` has real coefficients and
/// `e(w) e(1/w) = p`, so `b = (e(w) + e(1/w))/2` and
/// `c = (e(w) - e(1/w))/(2i)` satisfy `b² + c² = p` on the circle.
pub fn complete(a: &LaurentPoly, d: &LaurentPoly) -> Result<SU2LaurentPoly> {
    let degree = a.abs_degree().max(d.abs_degree());
    if degree > MAX_SYNTHESIS_DEGREE {
        return Err(Error::SynthesisDegree {
            degree,
            cap: MAX_SYNTHESIS_DEGREE,
        });
    }
    for (name, x) in [("a", a), ("d", d)] {
        if !x.is_real_on_circle(SYMMETRY_TOL) {
            return Err(Error::NotAdmissible(format!(
                "{name} is not real on the circle"
            )));
        }
    }
    let raw = &(a.mul_poly(a)) + &(d.mul_poly(d));
    if !raw.is_reciprocal(SYMMETRY_TOL) {
        return Err(Error::NotAdmissible("a² + d² is not reciprocal".into()));
    }
    let parity = SU2LaurentPoly::new(
        a.clone(),
        LaurentPoly::zero(),
        LaurentPoly::zero(),
        d.clone(),
    )
    .parity();
    // Exact projection, so the complement has no wrong-parity rounding.
    let project = |x: &LaurentPoly| {
        let (even, odd) = x.parity_split();
        match parity {
            Some(Parity::Even) => even,
            Some(Parity::Odd) => odd,
            None => x.clone(),
        }
    };
    let (a, d) = (&project(a), &project(d));
    let p = complement(a, d);
    let roots = roots_of_complement(&p)?;
    let n = roots.roots.len();
    // Centre e's exponents. With a definite parity the shift also fixes e's
    // parity, which must match the target's.
    let mut shift = n / 2;
    if parity.is_some_and(|par| Parity::of(shift as i64) != par) {
        shift += 1;
    }
    let e = spectral_factor(&roots, shift);
    // Roots come in ± pairs then, so e has exactly the parity of its shift;
    // drop the rounding noise on the other parity.
    let e = project(&e);
    let m = e.abs_degree() as i64;
    let b = LaurentPoly::from_fn(-m, m, |k| (e.coeff(k) + e.coeff(-k)) / 2.0);
    let c = LaurentPoly::from_fn(-m, m, |k| (e.coeff(k) - e.coeff(-k)) / (2.0 * I));
    Ok(SU2LaurentPoly::new(a.clone(), b, c, d.clone()))
}

/// `√α w^{-shift} ∏ (w - r)`, built from its values on a roots-of-unity
/// grid in the log domain, so intermediate products never overflow.
fn spectral_factor(roots: &RootMultiset, shift: usize) -> LaurentPoly {
    let n = roots.roots.len();
    let m = (2 * (n + 1)).next_power_of_two().max(64);
    let log_scale = 0.5 * roots.alpha.ln();
    let mut vals: Vec<Complex64> = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let z = Complex64::from_polar(1.0, theta);
            let log: Complex64 = roots.roots.iter().map(|r| (z - r).ln()).sum();
            (log + log_scale - I * (shift as f64 * theta)).exp()
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut vals);
    let lo = -(shift as i64);
    let hi = n as i64 - shift as i64;
    LaurentPoly::from_fn(lo, hi, |k| {
        Complex64::new(vals[k.rem_euclid(m as i64) as usize].re / m as f64, 0.0)
    })
}

/// The factors `Q_0 … Q_n` of `Q_n w̃ Q_n† ⋯ Q_1 w̃ Q_1† Q_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RotationSequence {
    factors: Vec<Mat2>,
}

impl RotationSequence {
    pub fn new(factors: Vec<Mat2>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::param("factors", "a sequence needs at least Q_0"));
        }
        Ok(RotationSequence { factors })
    }

    /// `Q_i = exp(i φ_i X)`.
    pub fn from_x_angles(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| Mat2::x_rotation(a)).collect())
    }

    pub fn factors(&self) -> &[Mat2] {
        &self.factors
    }

    /// Number of signal factors `w̃`, i.e. calls to the controlled unitary.
    pub fn degree(&self) -> usize {
        self.factors.len() - 1
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Angles `φ_i` with `Q_i = exp(i φ_i X)`, when every factor is an
    /// X-rotation within `tol`.
    pub fn x_angles(&self, tol: f64) -> Result<Vec<f64>> {
        self.factors
            .iter()
            .map(|q| {
                let m = &q.0;
                let dev = [
                    (m[0][0] - m[1][1]).norm(),
                    (m[0][1] - m[1][0]).norm(),
                    m[0][0].im.abs(),
                    m[0][1].re.abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                if dev > tol {
                    return Err(Error::NotXRotations(dev));
                }
                Ok(m[1][0].im.atan2(m[0][0].re))
            })
            .collect()
    }

    /// Largest unitarity defect over the factors.
    pub fn unitarity_defect(&self) -> f64 {
        self.factors
            .iter()
            .map(|q| q.unitarity_defect())
            .fold(0.0, f64::max)
    }
}

/// Unit vector spanning the range of `top`, or the complement of the range of
/// `bottom` when that is the larger coefficient. Read straight off the
/// dominant column: going through `C C†` would square magnitudes that can be
/// as small as 1e-8 for long sequences.
fn peel_direction(top: &Mat2, bottom: &Mat2) -> [Complex64; 2] {
    let column = |m: &Mat2| {
        let c0 = [m.0[0][0], m.0[1][0]];
        let c1 = [m.0[0][1], m.0[1][1]];
        let n = |c: &[Complex64; 2]| c[0].norm_sqr() + c[1].norm_sqr();
        if n(&c0) >= n(&c1) {
            c0
        } else {
            c1
        }
    };
    let (nt, nb) = (top.frobenius(), bottom.frobenius());
    let v = if nt == 0.0 && nb == 0.0 {
        return [Complex64::new(1.0, 0.0), ZERO];
    } else if nt >= nb {
        column(top)
    } else {
        let u = column(bottom);
        [-u[1].conj(), u[0].conj()]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    // Phase: the larger component real positive (first) or positive
    // imaginary (second), which keeps X-rotations in X-rotation form.
    let phase = if v[0].norm() >= v[1].norm() {
        v[0].conj() / v[0].norm()
    } else {
        I * v[1].conj() / v[1].norm()
    };
    [v[0] * phase / norm, v[1] * phase / norm]
}

/// Factors `F` into a rotation sequence by peeling one degree at a time.
///
/// The leading coefficients `C_n`, `C_{-n}` of a unitary-valued polynomial
/// have orthogonal rank-one ranges. `P = |v⟩⟨v|` projects onto the range of
/// `C_n` (equivalently the kernel of `C_{-n}†`), and `F` is replaced by
/// `(w^{-1} P + w (1 - P)) F`.
pub fn decompose(f: &SU2LaurentPoly) -> Result<RotationSequence> {
    let n = f.degree();
    if n > MAX_SYNTHESIS_DEGREE {
        return Err(Error::SynthesisDegree {
            degree: n,
            cap: MAX_SYNTHESIS_DEGREE,
        });
    }
    if f.parity().is_none() {
        return Err(Error::NoDefiniteParity);
    }
    let defect = f.unitarity_defect((16 * (n + 1)).next_power_of_two().max(256));
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }

    let mut coeffs = f.coefficient_matrices();
    let mut peeled = Vec::with_capacity(n);
    let mut discarded = 0.0f64;
    for level in (1..=n).rev() {
        let top = coeffs[2 * level];
        let bottom = coeffs[0];
        let (_, s_top) = top.singular_values();
        let (_, s_bottom) = bottom.singular_values();
        let rank_defect = s_top.max(s_bottom);
        if rank_defect > PEEL_TOL {
            return Err(Error::NotRankOne(rank_defect));
        }
        let v = peel_direction(&top, &bottom);
        let p = Mat2::new(
            v[0] * v[0].conj(),
            v[0] * v[1].conj(),
            v[1] * v[0].conj(),
            v[1] * v[1].conj(),
        );
        let pc = Mat2::identity() - p;
        discarded = discarded
            .max((pc * top).max_abs())
            .max((p * bottom).max_abs());
        // New window [-(level-1), level-1]; old index of exponent k is k + level.
        coeffs = (0..2 * level - 1)
            .map(|j| p * coeffs[j + 2] + pc * coeffs[j])
            .collect();
        peeled.push(Mat2::su2_with_first_column(v));
    }
    if discarded > PEEL_TOL {
        return Err(Error::NonConstantResidual(discarded));
    }
    let q0 = coeffs[0].unitarize();
    let mut factors = vec![q0];
    factors.extend(peeled.into_iter().rev());
    RotationSequence::new(factors)
}

/// `Q_n w̃ Q_n† ⋯ Q_1 w̃ Q_1† Q_0` at `w̃ = diag(z, 1/z)`.
pub fn reconstruct(seq: &RotationSequence, z: Complex64) -> Result<Mat2> {
    let dev = z.norm() - 1.0;
    if dev.abs() > CIRCLE_TOL {
        return Err(Error::OffCircle {
            re: z.re,
            im: z.im,
            deviation: dev,
        });
    }
    Ok(reconstruct_unchecked(seq, z))
}

pub(crate) fn reconstruct_unchecked(seq: &RotationSequence, z: Complex64) -> Mat2 {
    let signal = Mat2::signal(z);
    seq.factors[1..]
        .iter()
        .fold(seq.factors[0], |acc, q| *q * signal * q.adjoint() * acc)
}

/// Largest entrywise distance between `reconstruct(seq, z)` and `F(z)` over
/// `points` roots of unity.
pub fn round_trip_residual(seq: &RotationSequence, f: &SU2LaurentPoly, points: usize) -> f64 {
    let grid = CircleGrid::new(points).expect("positive grid size");
    grid.points()
        .map(|z| {
            let want = f.matrix_at(z).expect("grid points lie on the circle");
            (reconstruct_unchecked(seq, z) - want).max_abs()
        })
        .fold(0.0, f64::max)
}

/// A completed target together with its rotation sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Synthesis {
    pub completed: SU2LaurentPoly,
    pub sequence: RotationSequence,
    /// Round-trip residual on a dense grid.
    pub residual: f64,
}

/// Completes `f` (taken as `a`, with `d = 0`) and decomposes the result.
pub fn synthesize(f: &LaurentPoly) -> Result<Synthesis> {
    let completed = complete(f, &LaurentPoly::zero())?;
    let sequence = decompose(&completed)?;
    let points = (16 * (completed.degree() + 1)).next_power_of_two().max(256);
    let residual = round_trip_residual(&sequence, &completed, points);
    Ok(Synthesis {
        completed,
        sequence,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rescale_examples() {
        let half = LaurentPoly::monomial(1, c(0.5));
        let r = rescale_to_admissible(&half, 0.01).unwrap();
        assert!((r.coeff(1) - c(0.495)).norm() < 1e-12);
        assert!(rescale_to_admissible(&LaurentPoly::zero(), 0.1)
            .unwrap()
            .is_zero());
        let two = LaurentPoly::monomial(1, c(2.0));
        let r = rescale_to_admissible(&two, 0.1).unwrap();
        assert!((r.coeff(1) - c(0.9)).norm() < 1e-6);
        assert!(r.coeff(1).re <= 0.9);
        assert!(rescale_to_admissible(&two, 1.0).is_err());
    }

    #[test]
    fn complete_trivial() {
        let f = complete(&LaurentPoly::zero(), &LaurentPoly::zero()).unwrap();
        assert!((f.b().coeff(0) - c(1.0)).norm() < 1e-15);
        assert!(f.c().is_zero());
    }

    #[test]
    fn complete_cosine() {
        let a = LaurentPoly::from_real(-1, &[0.25, 0.0, 0.25]);
        let f = complete(&a, &LaurentPoly::zero()).unwrap();
        assert!(f.unitarity_defect(1024) < 1e-12);
        assert!(f.b().abs_degree() <= 1 && f.c().abs_degree() <= 1);
    }

    #[test]
    fn complete_rejects_boundary() {
        // |a| reaches 1 at z = 1.
        let a = LaurentPoly::from_real(-1, &[0.5, 0.0, 0.5]);
        let err = complete(&a, &LaurentPoly::zero()).unwrap_err();
        assert!(err.is_numerical_abort(), "{err}");
        let not_real = LaurentPoly::monomial(1, c(0.3));
        assert!(matches!(
            complete(&not_real, &LaurentPoly::zero()),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn decompose_signal() {
        let f = SU2LaurentPoly::from_coefficient_matrices(
            -1,
            &[
                Mat2::diag(ZERO, c(1.0)),
                Mat2::zero(),
                Mat2::diag(c(1.0), ZERO),
            ],
        );
        let seq = decompose(&f).unwrap();
        assert_eq!(seq.len(), 2);
        for q in seq.factors() {
            assert!((*q - Mat2::identity()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn decompose_constant() {
        let r = Mat2::x_rotation(0.4);
        let f = SU2LaurentPoly::from_coefficient_matrices(0, &[r]);
        let seq = decompose(&f).unwrap();
        assert_eq!(seq.len(), 1);
        assert!((seq.factors()[0] - r).max_abs() < 1e-15);
    }

    #[test]
    fn reconstruct_identity_pair() {
        let seq = RotationSequence::new(vec![Mat2::identity(); 2]).unwrap();
        let z = Complex64::from_polar(1.0, 0.7);
        let m = reconstruct(&seq, z).unwrap();
        assert!((m - Mat2::signal(z)).max_abs() < 1e-15);
        assert!(reconstruct(&seq, c(1.1)).is_err());
    }

    #[test]
    fn low_algebra_gives_x_rotations() {
        let a = LaurentPoly::from_real(-2, &[0.1, 0.0, 0.3, 0.0, 0.1]);
        let syn = synthesize(&a).unwrap();
        assert!(syn.residual < 1e-10);
        let angles = syn.sequence.x_angles(1e-8).unwrap();
        let rebuilt = RotationSequence::from_x_angles(&angles).unwrap();
        for j in 0..16 {
            let z = Complex64::from_polar(1.0, 0.4 * j as f64);
            let diff = reconstruct(&rebuilt, z).unwrap() - reconstruct(&syn.sequence, z).unwrap();
            assert!(diff.max_abs() < 1e-8);
        }
    }

    #[test]
    fn expand_sequence_matches_product() {
        let seq = RotationSequence::new(vec![
            Mat2::x_rotation(0.3),
            Mat2::su2_with_first_column([c(0.6), Complex64::new(0.0, 0.8)]),
            Mat2::z_rotation(0.2) * Mat2::x_rotation(1.0),
        ])
        .unwrap();
        let f = SU2LaurentPoly::from_sequence(&seq);
        assert_eq!(f.degree(), 2);
        assert!(round_trip_residual(&seq, &f, 64) < 1e-14);
    }

    #[test]
    fn roots_of_quadratic() {
        // (w - 0.5)(w - 2) = w² - 2.5w + 1
        let mut r = polynomial_roots(&[1.0, -2.5, 1.0]).unwrap();
        r.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        assert!((r[0] - c(0.5)).norm() < 1e-14 && (r[1] - c(2.0)).norm() < 1e-14);
    }
}
