//! Boundary for digraphs built from two cycle species.
//!
//! For each `phi1` the unknowns `(t1, t2, phi2)` solve three real equations:
//!
//! ```text
//! (1 - d1 - d2) S1 S2 - (d1 - 1) S1 - (d2 - 1) S2 + 1 = 0,   S_r = sum_{l=1}^{k_r-1} t_r^{2l}
//! E1(t1, phi1) = E2(t2, phi2),   E_r(t, phi) = (w_r / t) e^{-i phi} - w_r t^{k_r-1} e^{i (k_r-1) phi}
//! ```
//!
//! The curve is traced by Newton continuation in `phi1`, starting from the real
//! solution at `phi1 = 0`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{check_samples, BoundaryCurve, BoundaryLaw, CurveSample};
use crate::error::{Error, Result};
use crate::scalar::{cis, lit, tol, to_f64, Scalar};

const MAX_NEWTON_ITERS: usize = 100;
const MAX_HALVINGS: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedSpecies<T> {
    /// Cycles of this species per node (real so that large-degree limits can
    /// be explored continuously).
    pub d: T,
    pub k: usize,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedCycleParams<T> {
    pub species: [MixedSpecies<T>; 2],
}

/// Accepted solution at one continuation parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedSolution<T> {
    pub phi1: T,
    pub t1: T,
    pub t2: T,
    /// Continuous (unwrapped) along the sweep.
    pub phi2: T,
    /// Euclidean norm of the three equation residuals.
    pub residual: T,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinuationDiagnostics {
    pub steps: usize,
    /// Total step halvings over the sweep.
    pub halvings: usize,
    pub max_newton_iterations: usize,
    pub max_residual: f64,
    /// `|z(2 pi) - z(0)|` after continuing once around.
    pub closure_gap: f64,
}

impl<T: Scalar> MixedCycleParams<T> {
    pub fn new(a: MixedSpecies<T>, b: MixedSpecies<T>) -> Result<Self> {
        let p = MixedCycleParams { species: [a, b] };
        p.validate()?;
        Ok(p)
    }

    /// Both species share one weight.
    pub fn unit(d1: T, k1: usize, d2: T, k2: usize) -> Result<Self> {
        Self::new(
            MixedSpecies { d: d1, k: k1, weight: T::one() },
            MixedSpecies { d: d2, k: k2, weight: T::one() },
        )
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.species {
            if s.k < 2 {
                return Err(Error::spec(format!("cycle length must be >= 2, got {}", s.k)));
            }
            if !(s.d >= T::zero()) || !s.d.is_finite() {
                return Err(Error::spec(format!("cycle count must be >= 0, got {}", s.d)));
            }
            if !s.weight.is_finite() || s.weight == T::zero() {
                return Err(Error::spec(format!("weight must be finite and nonzero, got {}", s.weight)));
            }
        }
        let [a, b] = &self.species;
        if !(a.d + b.d > T::one()) {
            return Err(Error::spec("mixed-cycle law needs d1 + d2 > 1"));
        }
        Ok(())
    }

    /// `sqrt(d1 w1^2 + d2 w2^2)`.
    pub fn mean_scale(&self) -> T {
        self.species.iter().map(|s| s.d * s.weight * s.weight).sum::<T>().sqrt()
    }

    fn extra(&self, r: usize, t: T, phi: T) -> Complex<T> {
        let s = &self.species[r];
        let m = s.k - 1;
        cis(-phi) * (s.weight / t) - cis(phi * lit(m as f64)) * (s.weight * t.powi(m as i32))
    }

    fn extra_dt(&self, r: usize, t: T, phi: T) -> Complex<T> {
        let s = &self.species[r];
        let m = s.k - 1;
        let mf: T = lit(m as f64);
        -cis(-phi) * (s.weight / (t * t)) - cis(phi * mf) * (s.weight * mf * t.powi(m as i32 - 1))
    }

    fn extra_dphi(&self, r: usize, t: T, phi: T) -> Complex<T> {
        let s = &self.species[r];
        let m = s.k - 1;
        let mf: T = lit(m as f64);
        let i = Complex::new(T::zero(), T::one());
        -i * (cis(-phi) * (s.weight / t) + cis(phi * mf) * (mf * s.weight * t.powi(m as i32)))
    }

    /// `(S, dS/dt)` for species `r`.
    fn sigma(&self, r: usize, t: T) -> (T, T) {
        let m = self.species[r].k - 1;
        let u = t * t;
        let (mut s, mut ds) = (T::zero(), T::zero());
        for _ in 0..m {
            ds = ds * u + s + T::one();
            s = (s + T::one()) * u;
        }
        (s, ds * lit(2.0) * t)
    }

    fn condt(&self, t1: T, t2: T) -> (T, T, T) {
        let [a, b] = &self.species;
        let c = T::one() - a.d - b.d;
        let (s1, ds1) = self.sigma(0, t1);
        let (s2, ds2) = self.sigma(1, t2);
        let f = c * s1 * s2 - (a.d - T::one()) * s1 - (b.d - T::one()) * s2 + T::one();
        (f, (c * s2 - (a.d - T::one())) * ds1, (c * s1 - (b.d - T::one())) * ds2)
    }

    /// Residual vector of the three real equations.
    pub fn residuals(&self, phi1: T, t1: T, t2: T, phi2: T) -> [T; 3] {
        let f = self.condt(t1, t2).0;
        let e = self.extra(0, t1, phi1) - self.extra(1, t2, phi2);
        [f, e.re, e.im]
    }

    fn scale(&self) -> T {
        T::one().max(self.mean_scale())
    }

    /// Boundary point for an accepted solution.
    pub fn point(&self, sol: &MixedSolution<T>) -> Complex<T> {
        let half: T = lit(0.5);
        let term = |r: usize, t: T, phi: T| {
            let s = &self.species[r];
            let m = s.k - 1;
            cis(-phi) * (s.weight * half / t)
                + cis(phi * lit(m as f64)) * ((s.d - half) * s.weight * t.powi(m as i32))
        };
        term(0, sol.t1, sol.phi1) + term(1, sol.t2, sol.phi2)
    }

    fn newton(&self, phi1: T, guess: [T; 3]) -> Option<(MixedSolution<T>, usize)> {
        let target = tol::<T>(1e-12) * self.scale();
        let norm = |r: [T; 3]| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        let [mut t1, mut t2, mut phi2] = guess;
        let mut res = norm(self.residuals(phi1, t1, t2, phi2));
        for it in 0..=MAX_NEWTON_ITERS {
            if res <= target {
                return Some((MixedSolution { phi1, t1, t2, phi2, residual: res }, it));
            }
            if it == MAX_NEWTON_ITERS {
                break;
            }
            let r = self.residuals(phi1, t1, t2, phi2);
            let (_, f_t1, f_t2) = self.condt(t1, t2);
            let e_t1 = self.extra_dt(0, t1, phi1);
            let e_t2 = -self.extra_dt(1, t2, phi2);
            let e_p2 = -self.extra_dphi(1, t2, phi2);
            let jac = [
                [f_t1, f_t2, T::zero()],
                [e_t1.re, e_t2.re, e_p2.re],
                [e_t1.im, e_t2.im, e_p2.im],
            ];
            let delta = solve3(jac, [-r[0], -r[1], -r[2]])?;
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..30 {
                let c = [t1 + delta[0] * lambda, t2 + delta[1] * lambda, phi2 + delta[2] * lambda];
                if c[0] > T::zero() && c[1] > T::zero() {
                    let cr = norm(self.residuals(phi1, c[0], c[1], c[2]));
                    if cr.is_finite() && (cr < res || cr <= target) {
                        t1 = c[0];
                        t2 = c[1];
                        phi2 = c[2];
                        res = cr;
                        accepted = true;
                        break;
                    }
                }
                lambda = lambda * lit(0.5);
            }
            if !accepted {
                // stagnation at rounding level still counts if the spec tolerance is met
                let loose = tol::<T>(1e-10) * self.scale();
                return (res <= loose)
                    .then_some((MixedSolution { phi1, t1, t2, phi2, residual: res }, it));
            }
        }
        None
    }

    /// Real solution at `phi1 = phi2 = 0`: for each `t1` the real extra
    /// condition fixes `t2` uniquely, leaving a scalar root in `t1`.
    fn seed(&self) -> Result<MixedSolution<T>> {
        let fail = |reason: &str| Error::ContinuationFailure {
            last_good_phi: 0.0,
            reason: reason.to_string(),
        };
        let w2 = self.species[1].weight;
        let m2 = (self.species[1].k - 1) as i32;
        let t2_of = |t1: T| -> T {
            let target = self.extra(0, t1, T::zero()).re;
            // w2 (1/t - t^m) is monotone in t; bisect on log t
            let g = |ln_t: T| {
                let t = ln_t.exp();
                (w2 * (T::one() / t - t.powi(m2)) - target) * w2.signum()
            };
            let (mut lo, mut hi): (T, T) = (lit(-60.0), lit(60.0));
            for _ in 0..200 {
                let mid = (lo + hi) * lit(0.5);
                if g(mid) > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ((lo + hi) * lit(0.5)).exp()
        };
        let f = |ln_t1: T| {
            let t1 = ln_t1.exp();
            self.condt(t1, t2_of(t1)).0
        };
        let step: T = lit(0.05);
        let mut lo: T = lit(-20.0);
        if !(f(lo) > T::zero()) {
            return Err(fail("no sign change in the seed equation"));
        }
        let mut hi = lo;
        loop {
            hi = hi + step;
            if hi > lit(20.0) {
                return Err(fail("no real seed solution found"));
            }
            let f_hi = f(hi);
            if f_hi <= T::zero() {
                break;
            }
            lo = hi;
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if f(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t1 = ((lo + hi) * lit(0.5)).exp();
        let t2 = t2_of(t1);
        self.newton(T::zero(), [t1, t2, T::zero()])
            .map(|(s, _)| s)
            .ok_or_else(|| fail("Newton polish of the seed did not converge"))
    }

    /// Advances `from` to `phi1`, halving the step on failure.
    fn advance(
        &self,
        from: &MixedSolution<T>,
        phi1: T,
        diag: &mut ContinuationDiagnostics,
    ) -> Result<MixedSolution<T>> {
        let mut cur = *from;
        let mut halvings = 0u32;
        while cur.phi1 < phi1 {
            let h = (phi1 - from.phi1) / lit(f64::from(1u32 << halvings));
            let next = (cur.phi1 + h).min(phi1);
            match self.newton(next, [cur.t1, cur.t2, cur.phi2 + (next - cur.phi1)]) {
                Some((sol, iters)) => {
                    diag.max_newton_iterations = diag.max_newton_iterations.max(iters);
                    cur = sol;
                }
                None => {
                    halvings += 1;
                    diag.halvings += 1;
                    if halvings > MAX_HALVINGS {
                        return Err(Error::ContinuationFailure {
                            last_good_phi: to_f64(cur.phi1),
                            reason: format!(
                                "Newton did not converge within {MAX_NEWTON_ITERS} iterations after {MAX_HALVINGS} step halvings"
                            ),
                        });
                    }
                }
            }
        }
        Ok(cur)
    }
}

/// Gaussian elimination with partial pivoting.
fn solve3<T: Scalar>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col] == T::zero() || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] = a[row][c] - f * a[col][c];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let s = (row + 1..3).fold(b[row], |acc, c| acc - a[row][c] * x[c]);
        x[row] = s / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Solution `(t1, t2, phi2)` at `phi1`, continued from the real seed at 0.
pub fn mixed_cycle_solve<T: Scalar>(params: &MixedCycleParams<T>, phi1: T) -> Result<MixedSolution<T>> {
    params.validate()?;
    if !phi1.is_finite() {
        return Err(Error::input("phi1 must be finite"));
    }
    let mut diag = ContinuationDiagnostics::default();
    let seed = params.seed()?;
    let target = phi1.abs();
    let step = T::TAU() / lit(super::MIN_SAMPLES as f64);
    let mut cur = seed;
    while cur.phi1 < target {
        let next = (cur.phi1 + step).min(target);
        cur = params.advance(&cur, next, &mut diag)?;
    }
    if phi1 < T::zero() {
        // complex conjugation symmetry of the real system
        cur = MixedSolution { phi1, phi2: -cur.phi2, ..cur };
    }
    Ok(cur)
}

/// Solutions at `phi1 = 2 pi j / n` for `j = 0..=n` (the last closes the loop).
pub fn mixed_cycle_trace<T: Scalar>(
    params: &MixedCycleParams<T>,
    n_samples: usize,
) -> Result<(Vec<MixedSolution<T>>, ContinuationDiagnostics)> {
    params.validate()?;
    check_samples(n_samples)?;
    let mut diag = ContinuationDiagnostics::default();
    let mut sols = Vec::with_capacity(n_samples + 1);
    sols.push(params.seed()?);
    let step = T::TAU() / lit(n_samples as f64);
    for j in 1..=n_samples {
        let phi1 = if j == n_samples { T::TAU() } else { step * lit(j as f64) };
        let next = params.advance(&sols[j - 1], phi1, &mut diag)?;
        sols.push(next);
    }
    diag.steps = n_samples;
    diag.max_residual = sols.iter().map(|s| to_f64(s.residual)).fold(0.0, f64::max);
    let first = params.point(&sols[0]);
    let last = params.point(&sols[n_samples]);
    diag.closure_gap = to_f64((last - first).norm());
    Ok((sols, diag))
}

pub fn mixed_cycle_boundary<T: Scalar>(
    params: &MixedCycleParams<T>,
    n_samples: usize,
) -> Result<BoundaryCurve<T>> {
    let (sols, diagnostics) = mixed_cycle_trace(params, n_samples)?;
    let samples = sols[..n_samples]
        .iter()
        .map(|s| CurveSample { phi: s.phi1, z: params.point(s) })
        .collect();
    Ok(BoundaryCurve {
        samples,
        law: BoundaryLaw::MixedCycle { params: params.clone(), diagnostics },
    })
}

/// Large-degree form:
/// `z / D = e^{-i phi} + sum_r d_r (w_r / D)^{k_r} e^{i (k_r - 1) phi}` with
/// `D = sqrt(d1 w1^2 + d2 w2^2)`.
pub fn mixed_cycle_asymptotic<T: Scalar>(
    params: &MixedCycleParams<T>,
    n_samples: usize,
) -> Result<BoundaryCurve<T>> {
    let dbar = params.mean_scale();
    if !(dbar > T::zero()) {
        return Err(Error::spec("mean scale sqrt(d1 w1^2 + d2 w2^2) is zero"));
    }
    let coeffs: Vec<(T, usize)> = params
        .species
        .iter()
        .map(|s| (s.d * (s.weight / dbar).powi(s.k as i32), s.k - 1))
        .collect();
    BoundaryCurve::from_fn(n_samples, BoundaryLaw::MixedAsymptotic(params.clone()), |phi| {
        let mut z = cis(-phi);
        for &(c, m) in &coeffs {
            z = z + cis(phi * lit(m as f64)) * c;
        }
        z * dbar
    })
}
