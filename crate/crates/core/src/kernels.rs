//! The correlation weights W and S and their exponential sums.
//!
//! Both weights are even, integer-valued and supported in `[-2h, 2h]`:
//!
//! ```text
//! W(a) = 2h - 3|a|  (0 <= |a| <= h),   |a| - 2h  (h <= |a| <= 2h),   0 beyond
//! S(a) = max(2h - |a|, 0)
//! ```
//!
//! so `W(0) = S(0) = 2h`, `Σ_a W(a) = 0` and `Σ_a S(a) = 4h²`. The closed
//! forms below (multiple sums, Fourier transforms, the scaled-lattice
//! transform with its fractional-part case split, and the Fejér sum for S)
//! are each paired with a direct-summation fallback: the closed forms have
//! `sin²(πβ)` denominators that degenerate at integer β, and the direct sum
//! is the defining value there.
//!
//! Kernel values are exact integers; trigonometric sums are f64 with
//! compensated summation.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Distance below which β counts as an integer and closed forms switch to
/// direct summation.
pub const SINGULARITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    W,
    S,
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelFamily::W => "W",
            KernelFamily::S => "S",
        })
    }
}

/// A weight family with its half-width h.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelSpec {
    family: KernelFamily,
    h: u64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, h: u64) -> Result<Self> {
        if h < 1 {
            return Err(Error::InvalidParam("kernel half-width h must be >= 1".into()));
        }
        Ok(KernelSpec { family, h })
    }

    pub fn w(h: u64) -> Result<Self> {
        Self::new(KernelFamily::W, h)
    }

    pub fn s(h: u64) -> Result<Self> {
        Self::new(KernelFamily::S, h)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// Support radius 2h: the weight vanishes for |a| > 2h.
    pub fn support_radius(&self) -> u64 {
        2 * self.h
    }

    /// Exact pointwise value; even in a.
    pub fn value(&self, a: i64) -> i64 {
        match self.family {
            KernelFamily::W => w_value(self.h, a),
            KernelFamily::S => s_value(self.h, a),
        }
    }
}

/// W(a), exactly.
pub fn w_value(h: u64, a: i64) -> i64 {
    let a = a.unsigned_abs();
    let h2 = 2 * h;
    if a <= h {
        2 * h as i64 - 3 * a as i64
    } else if a <= h2 {
        a as i64 - 2 * h as i64
    } else {
        0
    }
}

/// S(a) = max(2h − |a|, 0), exactly.
pub fn s_value(h: u64, a: i64) -> i64 {
    let a = a.unsigned_abs();
    let h2 = 2 * h;
    if a <= h2 {
        (h2 - a) as i64
    } else {
        0
    }
}

/// Σ_{a ≡ 0 (mod q)} W(a) = 2q‖h/q‖. The right side is the even integer
/// 2·min(h mod q, q − h mod q), so the result is exact.
pub fn sum_w_over_multiples(h: u64, q: u64) -> i64 {
    assert!(q >= 1, "q must be >= 1");
    let r = h % q;
    2 * r.min(q - r) as i64
}

/// ‖r‖: distance from r to the nearest integer, in [0, 1/2].
pub fn dist_to_int(r: f64) -> f64 {
    (r - r.round()).abs()
}

/// A frequency: a raw real β, or an exact rational j/q. No reduction of
/// j/q is ever needed; e_q(j·) depends on j only through j mod q, and the
/// evaluators treat the rational case exactly (in particular, whether β is
/// an integer is decided by q | j, not by a tolerance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrigPoint {
    Real(f64),
    Rational { j: i64, q: u64 },
}

impl TrigPoint {
    pub fn rational(j: i64, q: u64) -> Self {
        assert!(q >= 1, "q must be >= 1");
        TrigPoint::Rational { j, q }
    }

    pub fn value(&self) -> f64 {
        match *self {
            TrigPoint::Real(b) => b,
            TrigPoint::Rational { j, q } => j as f64 / q as f64,
        }
    }

    /// ‖β‖, exact in the rational case.
    pub fn dist_to_int(&self) -> f64 {
        match *self {
            TrigPoint::Real(b) => dist_to_int(b),
            TrigPoint::Rational { j, q } => {
                let r = j.rem_euclid(q as i64) as u64;
                r.min(q - r) as f64 / q as f64
            }
        }
    }

    pub fn is_integer(&self) -> bool {
        match *self {
            TrigPoint::Real(b) => dist_to_int(b) < SINGULARITY_TOL,
            TrigPoint::Rational { j, q } => j.rem_euclid(q as i64) == 0,
        }
    }
}

/// Σ_a W(a) e(aβ) at a [`TrigPoint`]; rational points route integer β
/// through the exact direct sum rather than the tolerance check.
pub fn fourier_w_at(h: u64, beta: &TrigPoint) -> f64 {
    if beta.is_integer() {
        return fourier_w_direct(h, beta.value());
    }
    fourier_w(h, beta.value())
}

/// Σ_a S(a) e(aβ) at a [`TrigPoint`].
pub fn fejer_s_at(h: u64, beta: &TrigPoint) -> f64 {
    match *beta {
        TrigPoint::Rational { j, q } => fejer_s(h, j, q),
        TrigPoint::Real(b) => {
            if dist_to_int(b) < SINGULARITY_TOL {
                (4 * h * h) as f64
            } else {
                let num = (2.0 * PI * b * h as f64).sin();
                let den = (PI * b).sin();
                (num * num) / (den * den)
            }
        }
    }
}

/// Compensated (Kahan) accumulator for the trigonometric sums.
#[derive(Clone, Copy, Debug, Default)]
struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// C_X(θ) = Σ_{n ≤ X} cos(2πnθ) in closed form:
/// sin(2πθX)/(2 tan πθ) − (1 − cos(2πθX))/2; X when θ is an integer.
pub fn cos_sum(x: u64, theta: f64) -> f64 {
    if dist_to_int(theta) < SINGULARITY_TOL {
        return x as f64;
    }
    let tx = 2.0 * PI * theta * x as f64;
    tx.sin() / (2.0 * (PI * theta).tan()) - (1.0 - tx.cos()) / 2.0
}

/// S_X(θ) = Σ_{n ≤ X} sin(2πnθ) = sin²(πθX)/tan(πθ) + sin(2πθX)/2; 0 when
/// θ is an integer.
pub fn sin_sum(x: u64, theta: f64) -> f64 {
    if dist_to_int(theta) < SINGULARITY_TOL {
        return 0.0;
    }
    let s = (PI * theta * x as f64).sin();
    s * s / (PI * theta).tan() + (2.0 * PI * theta * x as f64).sin() / 2.0
}

/// Direct Σ_{n ≤ X} cos(2πnθ), the oracle for [`cos_sum`].
pub fn cos_sum_direct(x: u64, theta: f64) -> f64 {
    let mut acc = KahanSum::default();
    for n in 1..=x {
        acc.add((2.0 * PI * theta * n as f64).cos());
    }
    acc.value()
}

/// Direct Σ_{n ≤ X} sin(2πnθ), the oracle for [`sin_sum`].
pub fn sin_sum_direct(x: u64, theta: f64) -> f64 {
    let mut acc = KahanSum::default();
    for n in 1..=x {
        acc.add((2.0 * PI * theta * n as f64).sin());
    }
    acc.value()
}

/// E_X(β) = Σ_{0 ≤ |a| ≤ X} e(aβ) = 1 + 2 C_X(β) (real since the range is
/// symmetric). X may be fractional; the sum runs over |a| ≤ ⌊X⌋.
fn symmetric_exp_sum(x_floor: u64, beta: f64) -> f64 {
    1.0 + 2.0 * cos_sum(x_floor, beta)
}

/// Σ_{0 ≤ |a| ≤ 2h} W(a) e(aβ) = 4 sin⁴(πhβ)/sin²(πβ), falling back to the
/// direct sum within [`SINGULARITY_TOL`] of an integer β.
pub fn fourier_w(h: u64, beta: f64) -> f64 {
    if dist_to_int(beta) < SINGULARITY_TOL {
        return fourier_w_direct(h, beta);
    }
    let sh = (PI * (h as f64) * beta).sin();
    let sb = (PI * beta).sin();
    4.0 * sh.powi(4) / (sb * sb)
}

/// Direct Σ W(a) cos(2πaβ), the oracle for [`fourier_w`].
pub fn fourier_w_direct(h: u64, beta: f64) -> f64 {
    let mut acc = KahanSum::default();
    acc.add(w_value(h, 0) as f64);
    for a in 1..=(2 * h) as i64 {
        acc.add(2.0 * w_value(h, a) as f64 * (2.0 * PI * beta * a as f64).cos());
    }
    acc.value()
}

/// (1/ℓ) Σ_a W(aℓ) e(aβ) by the scaled-lattice closed form, split on the
/// fractional part of h/ℓ:
///
/// ```text
/// 4 sin⁴(πβ[h/ℓ])/sin²(πβ)                       (Fejér block, both cases)
///   − [2{h/ℓ} ≥ 1] · E_{2[h/ℓ]}(β)               (only when {h/ℓ} ≥ 1/2)
///   + 4{h/ℓ} E_{h/ℓ}(β) − {2h/ℓ} E_{2h/ℓ}(β)     (corrections; vanish at ℓ=1)
/// ```
///
/// The case split is decided exactly on integers: {h/ℓ} ≥ 1/2 iff
/// 2(h mod ℓ) ≥ ℓ, where 2{h/ℓ} − {2h/ℓ} is exactly 1 (and 0 otherwise).
pub fn fourier_w_scaled(h: u64, ell: u64, beta: f64) -> f64 {
    assert!(ell >= 1, "ell must be >= 1");
    if dist_to_int(beta) < SINGULARITY_TOL {
        return fourier_w_scaled_direct(h, ell, beta);
    }
    let h_fl = h / ell; // [h/ℓ]
    let h2_fl = 2 * h / ell; // [2h/ℓ]
    let r = h % ell;
    let frac_h = r as f64 / ell as f64; // {h/ℓ}
    let frac_2h = (2 * h % ell) as f64 / ell as f64; // {2h/ℓ}

    let sb = (PI * beta).sin();
    let s_h = (PI * beta * h_fl as f64).sin();
    let fejer_block = 4.0 * s_h.powi(4) / (sb * sb);

    let upper_half = 2 * r >= ell; // {h/ℓ} >= 1/2, i.e. 2{h/ℓ} − {2h/ℓ} = 1
    let bracket = if upper_half {
        symmetric_exp_sum(2 * h_fl, beta)
    } else {
        0.0
    };

    fejer_block - bracket + 4.0 * frac_h * symmetric_exp_sum(h_fl, beta)
        - frac_2h * symmetric_exp_sum(h2_fl, beta)
}

/// Direct (1/ℓ) Σ W(aℓ) cos(2πaβ), the oracle for [`fourier_w_scaled`].
pub fn fourier_w_scaled_direct(h: u64, ell: u64, beta: f64) -> f64 {
    assert!(ell >= 1, "ell must be >= 1");
    let mut acc = KahanSum::default();
    acc.add(w_value(h, 0) as f64);
    for a in 1..=(2 * h / ell) as i64 {
        acc.add(2.0 * w_value(h, a * ell as i64) as f64 * (2.0 * PI * beta * a as f64).cos());
    }
    acc.value() / ell as f64
}

/// Σ_b W(ℓb) e(bα) evaluated by direct summation (the definition); used by
/// the nonnegativity check.
pub fn w_spectrum_direct(h: u64, ell: u64, alpha: f64) -> f64 {
    ell as f64 * fourier_w_scaled_direct(h, ell, alpha)
}

/// True iff Σ_b W(ℓb) cos(2πbα) ≥ −1e−9·(2h)² at every sampled α.
pub fn spectrum_nonneg_check(h: u64, ell: u64, alphas: &[f64]) -> bool {
    assert!(ell >= 1, "ell must be >= 1");
    let floor = -1e-9 * (2 * h) as f64 * (2 * h) as f64;
    alphas.iter().all(|&a| w_spectrum_direct(h, ell, a) >= floor)
}

/// Direct Σ_a S(a) cos(2πaj/q), the oracle for [`fejer_s`].
pub fn fejer_s_direct(h: u64, j: i64, q: u64) -> f64 {
    let beta = j as f64 / q as f64;
    let mut acc = KahanSum::default();
    acc.add(s_value(h, 0) as f64);
    for a in 1..=(2 * h) as i64 {
        acc.add(2.0 * s_value(h, a) as f64 * (2.0 * PI * beta * a as f64).cos());
    }
    acc.value()
}

/// Σ_a S(a) e_q(ja): the Fejér kernel sin²(2πjh/q)/sin²(πj/q) when q ∤ j,
/// and Σ_a S(a) = 4h² when q | j. Always ≥ 0.
pub fn fejer_s(h: u64, j: i64, q: u64) -> f64 {
    assert!(q >= 1, "q must be >= 1");
    let jm = j.rem_euclid(q as i64) as u64;
    if jm == 0 {
        return (4 * h * h) as f64;
    }
    let num = (2.0 * PI * jm as f64 * h as f64 / q as f64).sin();
    let den = (PI * jm as f64 / q as f64).sin();
    (num * num) / (den * den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn kernel_values_examples() {
        assert_eq!(w_value(5, 0), 10);
        assert_eq!(w_value(5, 7), -3);
        assert_eq!(w_value(5, -7), -3);
        assert_eq!(s_value(5, 12), 0);
        assert_eq!(s_value(5, 0), 10);
        let k = KernelSpec::w(5).unwrap();
        assert_eq!(k.value(7), -3);
        assert_eq!(k.support_radius(), 10);
    }

    #[test]
    fn kernel_sums_exact() {
        for h in 1..=100u64 {
            let mut w_sum = 0i64;
            let mut s_sum = 0i64;
            for a in -(2 * h as i64)..=(2 * h as i64) {
                w_sum += w_value(h, a);
                s_sum += s_value(h, a);
            }
            assert_eq!(w_sum, 0, "sum W, h={h}");
            assert_eq!(s_sum, (4 * h * h) as i64, "sum S, h={h}");
        }
    }

    #[test]
    fn w_multiples_examples() {
        assert_eq!(sum_w_over_multiples(3, 2), 2);
        assert_eq!(sum_w_over_multiples(3, 7), 6);
        assert_eq!(sum_w_over_multiples(4, 1), 0);
    }

    #[test]
    fn w_multiples_match_direct() {
        for h in 1..=50u64 {
            for q in 1..=50u64 {
                let mut direct = w_value(h, 0);
                let mut a = q as i64;
                while a <= 2 * h as i64 {
                    direct += 2 * w_value(h, a);
                    a += q as i64;
                }
                assert_eq!(sum_w_over_multiples(h, q), direct, "h={h} q={q}");
            }
        }
    }

    #[test]
    fn dist_to_int_examples() {
        assert_eq!(dist_to_int(1.5), 0.5);
        assert_eq!(dist_to_int(3.0), 0.0);
        assert_eq!(dist_to_int(-0.25), 0.25);
    }

    #[test]
    fn fourier_w_examples() {
        assert!(close(fourier_w(1, 0.5), 4.0, 1e-12));
        assert!(close(fourier_w(1, 1.0 / 3.0), 3.0, 1e-12));
        assert_eq!(fourier_w(7, 0.0), 0.0); // Σ W = 0 via the direct fallback
    }

    #[test]
    fn fourier_w_scaled_examples() {
        assert!(close(fourier_w_scaled(3, 2, 0.5), 1.0, 1e-12));
        let b = 1.0 / 3.0;
        assert!(close(fourier_w_scaled(4, 1, b), fourier_w(4, b), 1e-12));
        assert!(close(
            fourier_w_scaled(5, 3, 0.137),
            fourier_w_scaled_direct(5, 3, 0.137),
            1e-12
        ));
    }

    #[test]
    fn fourier_w_scaled_large_ell() {
        // ℓ > 2h leaves only the a = 0 term: (1/ℓ)·W(0) = 2h/ℓ.
        assert!(close(fourier_w_scaled(3, 11, 0.3), 6.0 / 11.0, 1e-12));
    }

    #[test]
    fn fejer_examples() {
        assert!(fejer_s(1, 1, 2).abs() < 1e-12);
        assert!(close(fejer_s(2, 1, 3), 1.0, 1e-12));
        assert_eq!(fejer_s(3, 0, 5), 36.0);
        assert_eq!(fejer_s(3, 10, 5), 36.0); // q | j
    }

    #[test]
    fn trig_point_cases() {
        let p = TrigPoint::rational(1, 2);
        assert_eq!(p.dist_to_int(), 0.5);
        assert!(!p.is_integer());
        assert!(TrigPoint::rational(-10, 5).is_integer());
        assert_eq!(TrigPoint::rational(7, 4).dist_to_int(), 0.25);
        assert_eq!(TrigPoint::Real(1.5).dist_to_int(), 0.5);

        // rational evaluation agrees with the raw-real path away from
        // singularities, and is exact at them
        let r = TrigPoint::rational(1, 3);
        assert!(close(fourier_w_at(1, &r), 3.0, 1e-12));
        assert!(close(fejer_s_at(2, &r), fejer_s(2, 1, 3), 1e-12));
        assert_eq!(fourier_w_at(7, &TrigPoint::rational(6, 3)), 0.0); // Σ W = 0
        assert_eq!(fejer_s_at(3, &TrigPoint::rational(10, 5)), 36.0); // Σ S = 4h²
    }

    #[test]
    fn trig_sum_examples() {
        assert!(cos_sum(1, 0.25).abs() < 1e-12);
        assert!(close(cos_sum(2, 0.25), -1.0, 1e-12));
        assert!(close(sin_sum(1, 0.25), 1.0, 1e-12));
        assert_eq!(cos_sum(9, 2.0), 9.0);
        assert_eq!(sin_sum(9, 2.0), 0.0);
    }

    #[test]
    fn closed_forms_match_direct_sums_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..4000 {
            let h = rng.random_range(1..=50u64);
            let ell = rng.random_range(1..=2 * h);
            let beta: f64 = rng.random::<f64>();
            let q = rng.random_range(1..=60u64);
            let j = rng.random_range(-(2 * q as i64)..=2 * q as i64);
            let x = rng.random_range(1..=200u64);

            assert!(
                close(fourier_w(h, beta), fourier_w_direct(h, beta), 1e-9),
                "fourier_w h={h} beta={beta}"
            );
            assert!(
                close(
                    fourier_w_scaled(h, ell, beta),
                    fourier_w_scaled_direct(h, ell, beta),
                    1e-9
                ),
                "fourier_w_scaled h={h} ell={ell} beta={beta}"
            );
            assert!(
                close(fejer_s(h, j, q), fejer_s_direct(h, j, q), 1e-9),
                "fejer h={h} j={j} q={q}"
            );
            assert!(
                close(cos_sum(x, beta), cos_sum_direct(x, beta), 1e-9),
                "cos_sum X={x} theta={beta}"
            );
            assert!(
                close(sin_sum(x, beta), sin_sum_direct(x, beta), 1e-9),
                "sin_sum X={x} theta={beta}"
            );
        }
    }

    #[test]
    fn spectrum_nonneg_examples() {
        let grid: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(spectrum_nonneg_check(3, 1, &grid));
        assert!(spectrum_nonneg_check(1, 1, &[0.5]));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let alphas: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        assert!(spectrum_nonneg_check(6, 4, &alphas));
    }

    proptest! {
        #[test]
        fn w_even_and_supported(h in 1u64..80, a in -200i64..200) {
            prop_assert_eq!(w_value(h, a), w_value(h, -a));
            prop_assert_eq!(s_value(h, a), s_value(h, -a));
            if a.unsigned_abs() > 2 * h {
                prop_assert_eq!(w_value(h, a), 0);
                prop_assert_eq!(s_value(h, a), 0);
            }
            prop_assert!(s_value(h, a) >= 0);
        }

        #[test]
        fn w_multiples_closed_form(h in 1u64..50, q in 1u64..50) {
            let mut direct = w_value(h, 0);
            let mut a = q as i64;
            while a <= 2 * h as i64 {
                direct += 2 * w_value(h, a);
                a += q as i64;
            }
            prop_assert_eq!(sum_w_over_multiples(h, q), direct);
        }

        #[test]
        fn fejer_nonneg(h in 1u64..50, j in -100i64..100, q in 1u64..50) {
            prop_assert!(fejer_s(h, j, q) >= 0.0);
        }
    }
}
