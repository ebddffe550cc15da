//! The Selberg integral J_f(N, h) and the symmetry integral I_f(N, h).
//!
//! ```text
//! J_f(N,h) = ∫_N^{2N} | Σ_{0<|n−x|≤h} f(n) − M |² dx
//! I_f(N,h) = ∫_N^{2N} | Σ_{|n−x|≤h} sgn(n−x) f(n) |² dx      (sgn(0) = 0)
//! ```
//!
//! Both integrands are constant on every open unit interval (m, m+1): for
//! x ∈ (m, m+1) the integers n with |n − x| ≤ h are exactly m−h+1 ..= m+h,
//! with n > x iff n ≥ m+1 (endpoints form a measure-zero set, and n = x
//! cannot happen for non-integer x). The integrals therefore reduce to
//!
//! ```text
//! J = Σ_{m=N}^{2N−1} (Σ_{n=m−h+1}^{m+h} f(n) − M)²
//! I = Σ_{m=N}^{2N−1} (Σ_{n=m+1}^{m+h} f(n) − Σ_{n=m−h+1}^{m} f(n))²
//! ```
//!
//! computed with sliding windows in O(N) additions. The reduction is not
//! taken on faith: [`quadrature_oracle`] integrates the literal definitions
//! by midpoint sampling (exact for step functions at any sampling density),
//! and the test suites assert exact agreement.

use crate::arith::SieveTable;
use crate::error::{Error, Result};
use crate::parallel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    Selberg,
    Symmetry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult<T: Scalar> {
    pub kind: IntegralKind,
    pub value: T,
    pub n: u64,
    pub h: u64,
    /// The mean M the window sums were centered on (Selberg only).
    pub mean_used: Option<T>,
}

fn check_args<T: Scalar>(f: &SieveTable<T>, n: u64, h: u64) -> Result<()> {
    if h < 1 {
        return Err(Error::InvalidParam("h must be >= 1".into()));
    }
    if n < h {
        // the window at m = N would reach below 1
        return Err(Error::InvalidParam(format!(
            "window underflow: need N >= h, got N = {n}, h = {h}"
        )));
    }
    f.require(n - h + 1, 2 * n + h)
}

/// J_f(N, h) with the window sums centered on `mean`.
///
/// Callers usually pass `mean_value(g, h)`; the parameter is free so the
/// quadratic dependence J(M') = J(M) + N(M'−M)² − 2(M'−M)Σ(window − M) can
/// be exercised directly.
pub fn selberg_integral<T: Scalar>(
    f: &SieveTable<T>,
    n: u64,
    h: u64,
    mean: T,
) -> Result<IntegralResult<T>> {
    check_args(f, n, h)?;
    let value = parallel::chunked_sum(n, 2 * n, T::zero(), |m_lo, m_hi| {
        // window at m: n ∈ [m−h+1, m+h]
        let mut window = T::zero();
        for k in (m_lo - h + 1)..=(m_lo + h) {
            window += f.value(k).clone();
        }
        let mut acc = T::zero();
        let mut m = m_lo;
        loop {
            let dev = window.clone() - mean.clone();
            acc += dev.clone() * dev;
            m += 1;
            if m >= m_hi {
                break;
            }
            window += f.value(m + h).clone();
            window -= f.value(m - h).clone();
        }
        acc
    });
    Ok(IntegralResult {
        kind: IntegralKind::Selberg,
        value,
        n,
        h,
        mean_used: Some(mean),
    })
}

/// I_f(N, h): mean square of the right-minus-left window sum.
pub fn symmetry_integral<T: Scalar>(f: &SieveTable<T>, n: u64, h: u64) -> Result<IntegralResult<T>> {
    check_args(f, n, h)?;
    let value = parallel::chunked_sum(n, 2 * n, T::zero(), |m_lo, m_hi| {
        let mut right = T::zero(); // Σ_{n=m+1}^{m+h} f(n)
        let mut left = T::zero(); // Σ_{n=m−h+1}^{m} f(n)
        for k in (m_lo + 1)..=(m_lo + h) {
            right += f.value(k).clone();
        }
        for k in (m_lo - h + 1)..=m_lo {
            left += f.value(k).clone();
        }
        let mut acc = T::zero();
        let mut m = m_lo;
        loop {
            let dev = right.clone() - left.clone();
            acc += dev.clone() * dev;
            m += 1;
            if m >= m_hi {
                break;
            }
            right -= f.value(m).clone();
            right += f.value(m + h).clone();
            left += f.value(m).clone();
            left -= f.value(m - h).clone();
        }
        acc
    });
    Ok(IntegralResult {
        kind: IntegralKind::Symmetry,
        value,
        n,
        h,
        mean_used: None,
    })
}

/// Integrate the literal definition by sampling x at the midpoints of
/// `samples_per_unit` equal subintervals of each (m, m+1).
///
/// Every sample point x = m + (2k+1)/(2s) is a non-integer rational; the
/// window bounds and the sign of n − x are decided in exact integer
/// arithmetic on 2s·x, so this path shares nothing with the sliding-window
/// reduction. For integrands constant on unit intervals the midpoint rule
/// is exact at any density, which is precisely what the equality tests
/// against [`selberg_integral`] / [`symmetry_integral`] certify.
pub fn quadrature_oracle<T: Scalar>(
    f: &SieveTable<T>,
    n: u64,
    h: u64,
    kind: IntegralKind,
    mean: Option<T>,
    samples_per_unit: u32,
) -> Result<T> {
    check_args(f, n, h)?;
    if samples_per_unit < 1 {
        return Err(Error::InvalidParam("samples_per_unit must be >= 1".into()));
    }
    if kind == IntegralKind::Selberg && mean.is_none() {
        return Err(Error::InvalidParam(
            "selberg quadrature requires the mean M".into(),
        ));
    }
    let s = samples_per_unit as u64;
    let weight = T::ratio(1, s as i64);
    let mean = mean.unwrap_or_else(T::zero);

    let total = parallel::chunked_sum(n, 2 * n, T::zero(), |m_lo, m_hi| {
        let mut acc = T::zero();
        for m in m_lo..m_hi {
            for k in 0..s {
                // x = m + (2k+1)/(2s), scaled: 2s·x = 2s·m + 2k + 1
                let x2s = 2 * s * m + 2 * k + 1;
                // n ranges over x−h ≤ n ≤ x+h i.e. 2s·n ∈ [x2s − 2s·h, x2s + 2s·h]
                let lo = (x2s - 2 * s * h).div_ceil(2 * s);
                let hi = (x2s + 2 * s * h) / (2 * s);
                let v = match kind {
                    IntegralKind::Selberg => {
                        let mut w = T::zero();
                        for nn in lo..=hi {
                            // 0 < |n−x| always holds: x is not an integer
                            w += f.value(nn).clone();
                        }
                        w - mean.clone()
                    }
                    IntegralKind::Symmetry => {
                        let mut w = T::zero();
                        for nn in lo..=hi {
                            if 2 * s * nn > x2s {
                                w += f.value(nn).clone();
                            } else {
                                w -= f.value(nn).clone();
                            }
                        }
                        w
                    }
                };
                acc += v.clone() * v;
            }
        }
        acc
    });
    Ok(total * weight)
}
