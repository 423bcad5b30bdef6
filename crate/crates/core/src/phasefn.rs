//! Target phase functions and their Fourier (Laurent) truncations.
//!
//! The smoothed sawtooth `g_p` equals `x/π` away from `±π` and bends back
//! inside `I = (π-δ, π+δ)` so that it is 2π-periodic and `C^p`. Its
//! `(p+1)`-th derivative is piecewise constant on `2^p` equal slices of
//! `I`, so the whole function is an exact piecewise polynomial. Fourier
//! coefficients are integrated in closed form piece by piece.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Number of points in the dense residual scan (2^20 ≥ 10^6).
pub const DENSE_SCAN_POINTS: usize = 1 << 20;

/// Default cap for [`degree_for_epsilon`].
pub const DEFAULT_DEGREE_CAP: usize = 1 << 16;

/// A 2π-periodic function given by one real polynomial per interval of
/// `[-π, π)`. Piece `j` lives on `[breakpoints[j], breakpoints[j+1]]` and is
/// stored in the local variable `t = x - breakpoints[j]`, lowest power first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise")]
pub struct PiecewisePeriodicFn {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    /// Claimed smoothness `C^p`; `-1` for a function with jumps.
    smoothness_class: i32,
}

#[derive(Deserialize)]
struct RawPiecewise {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    smoothness_class: i32,
}

impl TryFrom<RawPiecewise> for PiecewisePeriodicFn {
    type Error = String;

    fn try_from(raw: RawPiecewise) -> std::result::Result<Self, Self::Error> {
        PiecewisePeriodicFn::new(raw.breakpoints, raw.pieces, raw.smoothness_class)
            .map_err(|e| e.to_string())
    }
}

fn eval_poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, &c)| c * m as f64)
        .collect()
}

impl PiecewisePeriodicFn {
    pub fn new(
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
        smoothness_class: i32,
    ) -> Result<Self> {
        if breakpoints.len() < 2 || pieces.len() != breakpoints.len() - 1 {
            return Err(Error::param(
                "breakpoints",
                "need one more breakpoint than pieces",
            ));
        }
        let first = breakpoints[0];
        let last = *breakpoints.last().unwrap();
        if (first + PI).abs() > 1e-12 || (last - PI).abs() > 1e-12 {
            return Err(Error::param("breakpoints", "must start at -π and end at π"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("breakpoints", "must be strictly increasing"));
        }
        if pieces.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::param("pieces", "non-finite coefficient"));
        }
        Ok(PiecewisePeriodicFn {
            breakpoints,
            pieces,
            smoothness_class,
        })
    }

    /// The raw sawtooth `x/π` on `[-π, π)`, discontinuous at `±π`.
    pub fn sawtooth() -> Self {
        PiecewisePeriodicFn {
            breakpoints: vec![-PI, PI],
            pieces: vec![vec![-1.0, 1.0 / PI]],
            smoothness_class: -1,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn smoothness_class(&self) -> i32 {
        self.smoothness_class
    }

    fn piece_len(&self, j: usize) -> f64 {
        self.breakpoints[j + 1] - self.breakpoints[j]
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let y = (x + PI).rem_euclid(2.0 * PI) - PI;
        let j = self
            .breakpoints
            .partition_point(|&b| b <= y)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        (j, y - self.breakpoints[j])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        eval_poly(&self.pieces[j], t)
    }

    /// The `order`-th derivative as another piecewise function.
    pub fn derivative(&self, order: usize) -> Self {
        let mut pieces = self.pieces.clone();
        for _ in 0..order {
            pieces = pieces.iter().map(|p| differentiate(p)).collect();
        }
        PiecewisePeriodicFn {
            breakpoints: self.breakpoints.clone(),
            pieces,
            smoothness_class: self.smoothness_class - order as i32,
        }
    }

    /// Largest absolute coefficient-level bound `Σ|a_m| L^m` over pieces; an
    /// upper bound on `sup |f|`, exact for piecewise constants.
    pub fn sup_abs_bound(&self) -> f64 {
        (0..self.pieces.len())
            .map(|j| {
                let len = self.piece_len(j);
                self.pieces[j]
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c.abs() * len.powi(m as i32))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Largest one-sided mismatch `|f^(k)(b-) - f^(k)(b+)|` over all
    /// breakpoints (the seam at `±π` included) and orders `0..=order`.
    pub fn max_seam_mismatch(&self, order: usize) -> f64 {
        let n = self.pieces.len();
        let mut worst = 0.0f64;
        let mut fk = self.clone();
        for _ in 0..=order {
            for j in 0..n {
                let left = eval_poly(&fk.pieces[j], self.piece_len(j));
                let right = eval_poly(&fk.pieces[(j + 1) % n], 0.0);
                worst = worst.max((left - right).abs());
            }
            fk = fk.derivative(1);
        }
        worst
    }

    /// Exact integral over one period.
    pub fn integral(&self) -> f64 {
        (0..self.pieces.len())
            .map(|j| {
                let len = self.piece_len(j);
                self.pieces[j]
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * len.powi(m as i32 + 1) / (m as f64 + 1.0))
                    .sum::<f64>()
            })
            .sum()
    }

    /// `c_k = (1/2π) ∫ f(x) e^{-ikx} dx`, integrated exactly per piece by
    /// repeated integration by parts.
    pub fn fourier_coeff(&self, k: i64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        if k == 0 {
            return Complex64::new(self.integral() / (2.0 * PI), 0.0);
        }
        // ∫_0^L q(t) e^{st} dt = [e^{st} Σ_m (-1)^m q^(m)(t) / s^{m+1}]_0^L, s = -ik
        let s = Complex64::new(0.0, -(k as f64));
        let sinv = s.inv();
        let kf = k as f64;
        for (j, piece) in self.pieces.iter().enumerate() {
            let len = self.piece_len(j);
            let mut q = piece.clone();
            let mut at_end = Complex64::new(0.0, 0.0);
            let mut at_start = Complex64::new(0.0, 0.0);
            let mut factor = sinv;
            while !q.is_empty() {
                at_end += factor * eval_poly(&q, len);
                at_start += factor * q[0];
                factor *= -sinv;
                q = differentiate(&q);
            }
            let e_end = Complex64::from_polar(1.0, -kf * self.breakpoints[j + 1]);
            let e_start = Complex64::from_polar(1.0, -kf * self.breakpoints[j]);
            total += e_end * at_end - e_start * at_start;
        }
        total / (2.0 * PI)
    }
}

/// `(p, δ)` of the smoothing construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSpec {
    p: usize,
    delta: f64,
}

impl SmoothingSpec {
    pub fn new(p: usize, delta: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::param("p", "smoothness order must be at least 1"));
        }
        check_delta(delta)?;
        Ok(SmoothingSpec { p, delta })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::param("delta", format!("{delta} is not in (0, π)")));
    }
    Ok(())
}

/// `φ_δ`: `x/π` on `(-π+δ, π-δ)`, with a piecewise-linear derivative hat
/// on the δ-neighbourhood of `±π`.
pub fn build_phi_delta(delta: f64) -> Result<PiecewisePeriodicFn> {
    check_delta(delta)?;
    Ok(build_g_p(SmoothingSpec { p: 1, delta }))
}

/// Values of `g_p^(p+1)` on the `2^p` equal slices of `I`, left to right.
///
/// For `p = 1` the second derivative is `∓K` on the two halves of `I`, with
/// `K` fixed by the area condition: the dip of `g'` below `1/π` must absorb
/// the jump of 2 that the sawtooth makes at `π`, i.e. `K δ² = 2`. Each step
/// `p -> p+1` replaces every rectangle of height `h` and width `w` by the
/// triangle of equal area (height `2h`), whose slopes `±4h/w` are the new
/// piecewise-constant top derivative on slices of width `w/2`.
pub fn top_derivative_heights(spec: SmoothingSpec) -> Vec<f64> {
    let delta = spec.delta;
    let k1 = 2.0 / (delta * delta);
    let mut heights = vec![-k1, k1];
    let mut width = delta;
    for _ in 1..spec.p {
        let slope = |h: f64| 4.0 * h / width;
        heights = heights
            .iter()
            .flat_map(|&h| [slope(h), -slope(h)])
            .collect();
        width /= 2.0;
    }
    heights
}

/// The `C^p` smoothed sawtooth `g_p`; `g_1 = φ_δ`.
pub fn build_g_p(spec: SmoothingSpec) -> PiecewisePeriodicFn {
    let SmoothingSpec { p, delta } = spec;
    let heights = top_derivative_heights(spec);
    let slices = heights.len();
    let width = 2.0 * delta / slices as f64;

    let mut factorial = vec![1.0f64; p + 2];
    for m in 1..p + 2 {
        factorial[m] = factorial[m - 1] * m as f64;
    }

    // Derivatives g^(0..=p) at the left end of I, inherited from x/π.
    let mut state = vec![0.0f64; p + 1];
    state[0] = (PI - delta) / PI;
    state[1] = 1.0 / PI;

    let mut slice_pieces = Vec::with_capacity(slices);
    for &h in &heights {
        let mut full = state.clone();
        full.push(h);
        slice_pieces.push(
            full.iter()
                .zip(&factorial)
                .map(|(d, f)| d / f)
                .collect::<Vec<_>>(),
        );
        for k in 0..=p {
            state[k] = (k..=p + 1)
                .map(|m| full[m] * width.powi((m - k) as i32) / factorial[m - k])
                .sum();
        }
    }

    // The second half of I sits past π; wrap it to [-π, -π+δ).
    let half = slices / 2;
    let mut breakpoints = Vec::with_capacity(slices + 2);
    let mut pieces = Vec::with_capacity(slices + 1);
    for (j, piece) in slice_pieces.iter().enumerate().skip(half) {
        breakpoints.push(-PI + (j - half) as f64 * width);
        pieces.push(piece.clone());
    }
    breakpoints.push(-PI + delta);
    pieces.push(vec![(-PI + delta) / PI, 1.0 / PI]);
    for (j, piece) in slice_pieces.iter().enumerate().take(half) {
        breakpoints.push(PI - delta + j as f64 * width);
        pieces.push(piece.clone());
    }
    breakpoints.push(PI);

    PiecewisePeriodicFn {
        breakpoints,
        pieces,
        smoothness_class: p as i32,
    }
}

/// `K_p = √2^{p(p+1)} / δ^{p+1}`, the Lipschitz constant of `g_p^(p)`.
pub fn lipschitz_constant(spec: SmoothingSpec) -> f64 {
    let p = spec.p as f64;
    2f64.powf(p * (p + 1.0) / 2.0) / spec.delta.powi(spec.p as i32 + 1)
}

/// Samples of a periodic function on `x_j = -π + 2πj/M`, kept for repeated
/// residual checks against truncations of different degree.
#[derive(Debug, Clone)]
pub struct DenseScan {
    samples: Vec<f64>,
    d1_bound: f64,
    d2_bound: f64,
    smoothness: i32,
}

impl DenseScan {
    pub fn new(f: &PiecewisePeriodicFn, points: usize) -> Self {
        let step = 2.0 * PI / points as f64;
        let samples = (0..points).map(|j| f.eval(-PI + j as f64 * step)).collect();
        DenseScan {
            samples,
            d1_bound: f.derivative(1).sup_abs_bound(),
            d2_bound: f.derivative(2).sup_abs_bound(),
            smoothness: f.smoothness_class(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Certified `sup_x |S(e^{ix}) - f(x)|`: the grid maximum plus a
    /// derivative-based slack. Infinite for discontinuous `f`.
    pub fn certified_error(&self, poly: &LaurentPoly) -> f64 {
        let m = self.samples.len();
        let mut bins = vec![Complex64::new(0.0, 0.0); m];
        // x_j = -π + 2πj/M, so e^{ik x_j} = (-1)^k ω^{jk}
        for (k, c) in poly.terms() {
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            bins[k.rem_euclid(m as i64) as usize] += c * sign;
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut bins);
        let grid_max = bins
            .iter()
            .zip(&self.samples)
            .map(|(s, f)| (s - f).norm())
            .fold(0.0, f64::max);
        if self.smoothness < 1 {
            return f64::INFINITY;
        }
        let step = 2.0 * PI / m as f64;
        // The residual is real with Lipschitz derivative; at an interior
        // extremum r' = 0, so |r| drops by at most L2·(step/2)²/2 to the
        // nearest grid point.
        let l1 = poly.weighted_l1(1) + self.d1_bound;
        let l2 = poly.weighted_l1(2) + self.d2_bound;
        grid_max + (l1 * step / 2.0).min(l2 * step * step / 8.0)
    }
}

/// Degree-`d` Fourier truncation of a real periodic function, as a
/// Laurent polynomial with a certified uniform error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierTruncation {
    pub source: PiecewisePeriodicFn,
    pub degree: usize,
    pub poly: LaurentPoly,
    pub sup_error: f64,
}

/// Closed-form coefficients `c_0..=c_d`; `c_{-k} = conj(c_k)` for real `f`.
fn nonnegative_coeffs(f: &PiecewisePeriodicFn, d: usize) -> Vec<Complex64> {
    (0..=d as i64).map(|k| f.fourier_coeff(k)).collect()
}

fn truncation_from(coeffs: &[Complex64], d: usize) -> LaurentPoly {
    LaurentPoly::from_fn(-(d as i64), d as i64, |k| {
        if k >= 0 {
            coeffs[k as usize]
        } else {
            coeffs[(-k) as usize].conj()
        }
    })
}

pub fn fourier_coeffs(f: &PiecewisePeriodicFn, d: usize) -> FourierTruncation {
    let scan = DenseScan::new(f, DENSE_SCAN_POINTS);
    fourier_coeffs_with_scan(f, d, &scan)
}

pub fn fourier_coeffs_with_scan(
    f: &PiecewisePeriodicFn,
    d: usize,
    scan: &DenseScan,
) -> FourierTruncation {
    let poly = truncation_from(&nonnegative_coeffs(f, d), d);
    let sup_error = scan.certified_error(&poly);
    FourierTruncation {
        source: f.clone(),
        degree: d,
        poly,
        sup_error,
    }
}

/// `(S0, S1)`: the even-exponent (π-periodic) and odd-exponent
/// (π-antiperiodic) parts of a truncation.
pub fn parity_components(trunc: &FourierTruncation) -> (LaurentPoly, LaurentPoly) {
    trunc.poly.parity_split()
}

/// Smallest degree whose truncation of `g_p` has certified error `<= eps`.
///
/// Doubles `d` until the target is met, then bisects. Fails with
/// [`Error::DegreeCap`] past `cap`.
pub fn degree_for_epsilon(
    spec: SmoothingSpec,
    eps: f64,
    cap: usize,
) -> Result<(usize, FourierTruncation)> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::param("eps", "must be positive"));
    }
    let f = build_g_p(spec);
    let scan = DenseScan::new(&f, DENSE_SCAN_POINTS);
    let coeffs = RefCell::new(vec![f.fourier_coeff(0)]);
    let error_at = |d: usize| {
        let mut cache = coeffs.borrow_mut();
        while cache.len() <= d {
            let k = cache.len() as i64;
            cache.push(f.fourier_coeff(k));
        }
        let poly = truncation_from(&cache, d);
        let err = scan.certified_error(&poly);
        (poly, err)
    };

    let mut best = f64::INFINITY;
    let mut lo: Option<usize> = None;
    let mut d = 0usize;
    let hi = loop {
        if d > cap {
            return Err(Error::DegreeCap {
                cap,
                target: eps,
                best,
            });
        }
        let (_, err) = error_at(d);
        best = best.min(err);
        if err <= eps {
            break d;
        }
        lo = Some(d);
        d = if d == 0 {
            1
        } else {
            (2 * d).min(cap.max(d + 1))
        };
        if lo == Some(cap) {
            return Err(Error::DegreeCap {
                cap,
                target: eps,
                best,
            });
        }
    };

    // Invariant: err(lo) > eps, err(hi) <= eps.
    let mut hi = hi;
    if let Some(mut lo) = lo {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if error_at(mid).1 <= eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let (poly, sup_error) = error_at(hi);
    Ok((
        hi,
        FourierTruncation {
            source: f.clone(),
            degree: hi,
            poly,
            sup_error,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub p: usize,
    pub delta: f64,
    pub d: usize,
    pub sup_error: f64,
}

/// Certified truncation error of `g_p` for every `d` in `degrees`.
pub fn convergence_sweep(spec: SmoothingSpec, degrees: &[usize]) -> Vec<ConvergenceRow> {
    let f = build_g_p(spec);
    let scan = DenseScan::new(&f, DENSE_SCAN_POINTS);
    let max_d = degrees.iter().copied().max().unwrap_or(0);
    let coeffs = nonnegative_coeffs(&f, max_d);
    degrees
        .iter()
        .map(|&d| ConvergenceRow {
            p: spec.p,
            delta: spec.delta,
            d,
            sup_error: scan.certified_error(&truncation_from(&coeffs[..=d], d)),
        })
        .collect()
}

/// Writes rows as CSV with header `p,delta,d,sup_error`.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
