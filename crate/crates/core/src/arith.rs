//! Sieve functions f = g ∗ 1.
//!
//! `g` is a finitely supported rational-valued function on `[1, Q]`; the
//! sieve function is its Dirichlet convolution with the constant function 1,
//! `f(n) = Σ_{d | n} g(d)`. This module builds the four `g` presets, sieves
//! `f` over a contiguous range with the standard multiples sweep, and
//! evaluates the window mean value `M_f(2h) = 2h Σ_d g(d)/d` and dyadic sums
//! `Σ_{N < n ≤ 2N} f(n)`.

use std::fmt;
use std::str::FromStr;

use num::traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{rat_i64, rat_u64, Rat, Scalar};

/// The built-in seed functions g.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// g = (1, 0, 0, …): the Dirichlet identity, so f ≡ 1.
    Delta1,
    /// g ≡ 1 on [1, Q]: f(n) counts divisors of n up to Q.
    Ones,
    /// g = Möbius function truncated at Q: integer-valued, sign-oscillating.
    Moebius,
    /// g drawn uniformly from {−B, …, B} ∩ ℤ, reproducibly from a seed.
    RandomBounded,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Delta1,
        Preset::Ones,
        Preset::Moebius,
        Preset::RandomBounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Delta1 => "delta1",
            Preset::Ones => "ones",
            Preset::Moebius => "moebius",
            Preset::RandomBounded => "random_bounded",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta1" => Ok(Preset::Delta1),
            "ones" => Ok(Preset::Ones),
            "moebius" => Ok(Preset::Moebius),
            "random_bounded" => Ok(Preset::RandomBounded),
            other => Err(Error::InvalidParam(format!("unknown preset `{other}`"))),
        }
    }
}

/// A seed function g: exact rational values on `[1, Q]`, zero beyond.
#[derive(Clone, Debug, PartialEq)]
pub struct GFunction {
    support_bound: u64,
    values: Vec<Rat>,
    preset: Preset,
    seed: Option<u64>,
    bound: Rat,
}

impl GFunction {
    /// Q: largest q with g(q) possibly nonzero.
    pub fn support_bound(&self) -> u64 {
        self.support_bound
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Declared bound B with |g(q)| ≤ B for all q.
    pub fn bound(&self) -> &Rat {
        &self.bound
    }

    /// g(q); q ≥ 1. Zero for q > Q (never stored).
    pub fn value(&self, q: u64) -> Rat {
        assert!(q >= 1, "g is defined on q >= 1");
        if q > self.support_bound {
            Rat::zero()
        } else {
            self.values[(q - 1) as usize].clone()
        }
    }

    pub fn is_zero_at(&self, q: u64) -> bool {
        q > self.support_bound || self.values[(q - 1) as usize].is_zero()
    }

    /// Stored values g(1)..g(Q).
    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Values converted into the requested arithmetic mode.
    pub fn values_as<T: Scalar>(&self) -> Vec<T> {
        self.values.iter().map(T::from_rat).collect()
    }

    /// Σ_{d ≤ Q} g(d)/d, exactly.
    pub fn harmonic_weight(&self) -> Rat {
        let mut acc = Rat::zero();
        for (i, v) in self.values.iter().enumerate() {
            if !v.is_zero() {
                acc += v * Rat::new(1.into(), (i as u64 + 1).into());
            }
        }
        acc
    }
}

/// Build a preset g. `seed` is required (and only used) by
/// [`Preset::RandomBounded`]; `bound` defaults to 1 there and is ignored
/// elsewhere.
pub fn make_g(preset: Preset, q: u64, seed: Option<u64>, bound: Option<Rat>) -> Result<GFunction> {
    if q < 1 {
        return Err(Error::InvalidParam("support bound Q must be >= 1".into()));
    }
    let (values, declared_bound): (Vec<Rat>, Rat) = match preset {
        Preset::Delta1 => {
            let mut v = vec![Rat::zero(); q as usize];
            v[0] = Rat::from_integer(1.into());
            (v, rat_i64(1))
        }
        Preset::Ones => (vec![Rat::from_integer(1.into()); q as usize], rat_i64(1)),
        Preset::Moebius => (
            moebius_values(q).into_iter().map(rat_i64).collect(),
            rat_i64(1),
        ),
        Preset::RandomBounded => {
            let seed = seed.ok_or_else(|| {
                Error::InvalidParam("preset random_bounded requires a seed".into())
            })?;
            let bound = bound.unwrap_or_else(|| rat_i64(1));
            if bound < Rat::zero() {
                return Err(Error::InvalidParam("bound must be nonnegative".into()));
            }
            let b = bound.floor().to_integer();
            let b: i64 = i64::try_from(&b)
                .map_err(|_| Error::InvalidParam("bound too large".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = (0..q).map(|_| rat_i64(rng.random_range(-b..=b))).collect();
            (v, bound)
        }
    };
    Ok(GFunction {
        support_bound: q,
        values,
        preset,
        seed: if preset == Preset::RandomBounded {
            seed
        } else {
            None
        },
        bound: declared_bound,
    })
}

/// μ(1..=q) by the classic composite-marking sieve.
fn moebius_values(q: u64) -> Vec<i64> {
    let n = q as usize;
    let mut mu = vec![1i64; n + 1];
    let mut is_comp = vec![false; n + 1];
    for p in 2..=n {
        if !is_comp[p] {
            for m in (p..=n).step_by(p) {
                if m > p {
                    is_comp[m] = true;
                }
                mu[m] = -mu[m];
            }
            let p2 = p.saturating_mul(p);
            if p2 <= n {
                for m in (p2..=n).step_by(p2) {
                    mu[m] = 0;
                }
            }
        }
    }
    mu[1..=n].to_vec()
}

/// The sieved values f(lo)..f(hi) with their exact sup-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SieveTable<T: Scalar> {
    lo: u64,
    hi: u64,
    values: Vec<T>,
    sup_norm: T,
    g: GFunction,
}

impl<T: Scalar> SieveTable<T> {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn g(&self) -> &GFunction {
        &self.g
    }

    /// max |f(n)| over the whole table.
    pub fn sup_norm(&self) -> &T {
        &self.sup_norm
    }

    pub fn covers(&self, lo: u64, hi: u64) -> bool {
        self.lo <= lo && hi <= self.hi
    }

    pub(crate) fn require(&self, lo: u64, hi: u64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::RangeShortfall {
                need_lo: lo,
                need_hi: hi,
                have_lo: self.lo,
                have_hi: self.hi,
            })
        }
    }

    /// f(n); n must lie in the table range.
    pub fn value(&self, n: u64) -> &T {
        debug_assert!(n >= self.lo && n <= self.hi, "n = {n} outside table");
        &self.values[(n - self.lo) as usize]
    }

    /// The contiguous slice f(lo..=hi); bounds are checked.
    pub fn slice(&self, lo: u64, hi: u64) -> Result<&[T]> {
        self.require(lo, hi)?;
        Ok(&self.values[(lo - self.lo) as usize..=(hi - self.lo) as usize])
    }

    /// max |f(n)| over `[lo, hi]` ∩ table range.
    pub fn sup_norm_range(&self, lo: u64, hi: u64) -> T {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi);
        let mut best = T::zero();
        if lo > hi {
            return best;
        }
        for v in &self.values[(lo - self.lo) as usize..=(hi - self.lo) as usize] {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
        best
    }
}

/// Sieve f = g ∗ 1 on `[lo, hi]` by the multiples sweep: for each d ≤ Q add
/// g(d) to every multiple of d in range. Cost O((hi−lo)·H(Q) + Q).
///
/// The range is split into fixed-size chunks swept independently (each
/// element still receives its increments in ascending d order), so the
/// result is independent of how the chunks are scheduled.
pub fn sieve_f<T: Scalar>(g: &GFunction, lo: u64, hi: u64) -> Result<SieveTable<T>> {
    if lo < 1 || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let gv: Vec<T> = g.values_as();
    let q = g.support_bound();
    let len = (hi - lo + 1) as usize;
    let mut values = vec![T::zero(); len];

    const SIEVE_CHUNK: usize = 1 << 15;
    values
        .par_chunks_mut(SIEVE_CHUNK)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let c_lo = lo + (ci * SIEVE_CHUNK) as u64;
            let c_hi = c_lo + chunk.len() as u64 - 1;
            for d in 1..=q.min(c_hi) {
                let gd = &gv[(d - 1) as usize];
                if gd.is_zero() {
                    continue;
                }
                let mut m = c_lo.div_ceil(d) * d;
                while m <= c_hi {
                    chunk[(m - c_lo) as usize] += gd.clone();
                    m += d;
                }
            }
        });

    let mut sup = T::zero();
    for v in &values {
        let a = v.abs();
        if a > sup {
            sup = a;
        }
    }
    Ok(SieveTable {
        lo,
        hi,
        values,
        sup_norm: sup,
        g: g.clone(),
    })
}

/// Sieve the full working range `[1, 2N + 4h]` used by a complete
/// experiment cell: correlations up to lag 3h and integrals with overhang h
/// all read within bounds.
pub fn sieve_for_experiment<T: Scalar>(g: &GFunction, n: u64, h: u64) -> Result<SieveTable<T>> {
    sieve_f(g, 1, 2 * n + 4 * h)
}

/// M_f(2h) = 2h Σ_{d ≤ Q} g(d)/d, exactly.
pub fn mean_value(g: &GFunction, h: u64) -> Result<Rat> {
    if h < 1 {
        return Err(Error::InvalidParam("h must be >= 1".into()));
    }
    Ok(g.harmonic_weight() * rat_u64(2 * h))
}

/// Σ_{N < n ≤ 2N} f(n) read off the sieve table.
pub fn dyadic_sum<T: Scalar>(f: &SieveTable<T>, n: u64) -> Result<T> {
    f.require(n + 1, 2 * n)?;
    let vals = f.slice(n + 1, 2 * n)?;
    let mut acc = T::zero();
    for v in vals {
        acc += v.clone();
    }
    Ok(acc)
}

/// The same dyadic sum in closed form: Σ_d g(d)(⌊2N/d⌋ − ⌊N/d⌋).
pub fn dyadic_sum_closed(g: &GFunction, n: u64) -> Rat {
    let mut acc = Rat::zero();
    for (i, v) in g.values().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let d = i as u64 + 1;
        let count = 2 * n / d - n / d;
        acc += v * rat_u64(count);
    }
    acc
}

/// Scale parameters of one experiment cell, with the effective exponents
/// θ = log h / log N and λ = log Q / log N re-derived from the rounded
/// integer values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleParams {
    pub n: u64,
    pub h: u64,
    pub q: u64,
    pub theta: f64,
    pub lambda: f64,
}

impl ScaleParams {
    /// Validates the artifact's window: 1 ≤ h ≤ N/4 and Q ≤ 2N.
    pub fn new(n: u64, h: u64, q: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam("N must be >= 2".into()));
        }
        if h < 1 || 4 * h > n {
            return Err(Error::InvalidParam(format!(
                "h = {h} outside the validity window 1 <= h <= N/4 (N = {n})"
            )));
        }
        if q < 1 || q > 2 * n {
            return Err(Error::InvalidParam(format!("Q = {q} outside 1 <= Q <= 2N")));
        }
        let ln_n = (n as f64).ln();
        Ok(ScaleParams {
            n,
            h,
            q,
            theta: (h as f64).ln() / ln_n,
            lambda: (q as f64).ln() / ln_n,
        })
    }

    /// h = ⌊N^θ + 1/2⌋, Q = ⌊N^λ + 1/2⌋ from intended exponents.
    pub fn from_exponents(n: u64, theta: f64, lambda: f64) -> Result<Self> {
        let h = ((n as f64).powf(theta) + 0.5).floor() as u64;
        let q = ((n as f64).powf(lambda) + 0.5).floor() as u64;
        Self::new(n, h.max(1), q.max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn brute_f(g: &GFunction, n: u64) -> Rat {
        let mut acc = Rat::zero();
        for d in 1..=n.min(g.support_bound()) {
            if n % d == 0 {
                acc += g.value(d);
            }
        }
        acc
    }

    #[test]
    fn presets_delta1_and_ones() {
        let d = make_g(Preset::Delta1, 5, None, None).unwrap();
        assert_eq!(d.values(), &[rat_i64(1), rat_i64(0), rat_i64(0), rat_i64(0), rat_i64(0)]);
        let o = make_g(Preset::Ones, 3, None, None).unwrap();
        assert_eq!(o.values(), vec![rat_i64(1); 3].as_slice());
    }

    #[test]
    fn moebius_matches_brute_force() {
        // oracle: μ(n) from the factorization of n
        fn mu_slow(mut n: u64) -> i64 {
            let mut k = 0;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    n /= p;
                    if n % p == 0 {
                        return 0;
                    }
                    k += 1;
                }
                p += 1;
            }
            if n > 1 {
                k += 1;
            }
            if k % 2 == 0 {
                1
            } else {
                -1
            }
        }
        let g = make_g(Preset::Moebius, 200, None, None).unwrap();
        for q in 1..=200u64 {
            assert_eq!(g.value(q), rat_i64(mu_slow(q)), "mu({q})");
        }
    }

    #[test]
    fn random_bounded_is_deterministic_and_bounded() {
        let a = make_g(Preset::RandomBounded, 4, Some(7), Some(rat_i64(2))).unwrap();
        let b = make_g(Preset::RandomBounded, 4, Some(7), Some(rat_i64(2))).unwrap();
        assert_eq!(a, b);
        for v in a.values() {
            assert!(Scalar::abs(v) <= rat_i64(2));
        }
        let c = make_g(Preset::RandomBounded, 4, Some(8), Some(rat_i64(2))).unwrap();
        assert_ne!(a, c, "different seeds should disagree somewhere");
    }

    #[test]
    fn random_bounded_requires_seed() {
        assert!(make_g(Preset::RandomBounded, 4, None, None).is_err());
    }

    #[test]
    fn q_zero_rejected() {
        assert!(make_g(Preset::Ones, 0, None, None).is_err());
    }

    #[test]
    fn sieve_examples() {
        let o3 = make_g(Preset::Ones, 3, None, None).unwrap();
        let t = sieve_f::<Rat>(&o3, 12, 12).unwrap();
        assert_eq!(*t.value(12), rat_i64(3));

        let d = make_g(Preset::Delta1, 5, None, None).unwrap();
        let t = sieve_f::<Rat>(&d, 1, 10).unwrap();
        for n in 1..=10 {
            assert_eq!(*t.value(n), rat_i64(1));
        }

        let t = sieve_f::<Rat>(&o3, 7, 9).unwrap();
        assert_eq!(*t.value(7), rat_i64(1));
        assert_eq!(*t.value(8), rat_i64(2));
        assert_eq!(*t.value(9), rat_i64(2));
    }

    #[test]
    fn sieve_matches_trial_division() {
        for preset in Preset::ALL {
            let g = make_g(preset, 12, Some(3), Some(rat_i64(2))).unwrap();
            let t = sieve_f::<Rat>(&g, 1, 400).unwrap();
            for n in [1u64, 2, 3, 17, 36, 97, 120, 121, 359, 360, 400] {
                assert_eq!(*t.value(n), brute_f(&g, n), "{preset} f({n})");
            }
        }
    }

    #[test]
    fn sieve_sup_norm_exact() {
        let g = make_g(Preset::Ones, 6, None, None).unwrap();
        let t = sieve_f::<Rat>(&g, 1, 60).unwrap();
        let mut best = Rat::zero();
        for n in 1..=60 {
            let a = Scalar::abs(t.value(n));
            if a > best {
                best = a;
            }
        }
        assert_eq!(*t.sup_norm(), best);
        assert_eq!(t.sup_norm_range(1, 60), best);
    }

    #[test]
    fn sieve_rejects_bad_range() {
        let g = make_g(Preset::Ones, 2, None, None).unwrap();
        assert!(sieve_f::<Rat>(&g, 0, 5).is_err());
        assert!(sieve_f::<Rat>(&g, 9, 5).is_err());
    }

    #[test]
    fn mean_value_examples() {
        let d = make_g(Preset::Delta1, 5, None, None).unwrap();
        assert_eq!(mean_value(&d, 5).unwrap(), rat_i64(10));
        let o3 = make_g(Preset::Ones, 3, None, None).unwrap();
        assert_eq!(mean_value(&o3, 2).unwrap(), rat(22, 3));
        let o2 = make_g(Preset::Ones, 2, None, None).unwrap();
        assert_eq!(mean_value(&o2, 1).unwrap(), rat_i64(3));
    }

    #[test]
    fn mean_value_linear_in_h() {
        for preset in Preset::ALL {
            let g = make_g(preset, 9, Some(2), Some(rat_i64(3))).unwrap();
            for h in [1u64, 2, 7, 30] {
                assert_eq!(
                    mean_value(&g, 2 * h).unwrap(),
                    rat_i64(2) * mean_value(&g, h).unwrap(),
                    "{preset} h={h}"
                );
            }
        }
    }

    #[test]
    fn dyadic_sum_examples_and_identity() {
        let d = make_g(Preset::Delta1, 3, None, None).unwrap();
        let t = sieve_f::<Rat>(&d, 1, 40).unwrap();
        assert_eq!(dyadic_sum(&t, 10).unwrap(), rat_i64(10));

        for preset in Preset::ALL {
            let g = make_g(preset, 7, Some(11), Some(rat_i64(3))).unwrap();
            let t = sieve_f::<Rat>(&g, 1, 600).unwrap();
            for n in [1u64, 9, 10, 50, 300] {
                assert_eq!(
                    dyadic_sum(&t, n).unwrap(),
                    dyadic_sum_closed(&g, n),
                    "{preset} N={n}"
                );
            }
        }
    }

    #[test]
    fn dyadic_sum_needs_coverage() {
        let g = make_g(Preset::Ones, 2, None, None).unwrap();
        let t = sieve_f::<Rat>(&g, 1, 15).unwrap();
        assert!(dyadic_sum(&t, 10).is_err());
    }

    #[test]
    fn scale_params_window() {
        let s = ScaleParams::new(1000, 10, 30).unwrap();
        assert!((s.theta - 10f64.ln() / 1000f64.ln()).abs() < 1e-15);
        assert!(ScaleParams::new(1000, 251, 30).is_err()); // h > N/4
        assert!(ScaleParams::new(1000, 250, 30).is_ok()); // h = N/4 allowed
        assert!(ScaleParams::new(4, 1, 9).is_err()); // Q > 2N
        assert!(ScaleParams::new(4, 1, 3).is_ok()); // the hand-check scale
    }

    #[test]
    fn float_sieve_matches_exact() {
        let g = make_g(Preset::Moebius, 10, None, None).unwrap();
        let exact = sieve_f::<Rat>(&g, 1, 200).unwrap();
        let float = sieve_f::<f64>(&g, 1, 200).unwrap();
        for n in 1..=200 {
            assert_eq!(exact.value(n).to_f64(), *float.value(n));
        }
    }
}
