//! Truncated Taylor-series kernels for the three hyperbolic
//! trigonometric functions, their exact counterparts, and the relative
//! approximation error η.
//!
//! The series are
//!
//! ```text
//! tanh(x)   ≈ Σ_{i=1..n} (-1)^{i-1} 2^{2i}(2^{2i}-1) |B_{2i}| x^{2i-1} / (2i)!
//! artanh(x) ≈ Σ_{i=1..n} x^{2i-1} / (2i-1)
//! arcosh(x) ≈ Σ_{i=1..n} [ (-1)^{i+1}(2x-1)^i/i − (Π_{j≤i}(2j-1)/(2j)) / (2i·x^{2i}) ]
//! η(f, x)   = |f(x) − series(x)| / |f(x) + ε|
//! ```
//!
//! Coefficients are derived once from an exact Bernoulli-number
//! recurrence over rationals and cached; evaluation of the odd/even
//! power series uses Horner's scheme on x².

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::{r, Real};
use crate::tensor::Tensor;

/// Largest Bernoulli index the exact recurrence serves.
pub const MAX_BERNOULLI: u32 = 64;

/// Largest series term count; tanh terms need `B_{2n}`, so this is
/// tied to [`MAX_BERNOULLI`].
pub const MAX_TERMS: usize = (MAX_BERNOULLI / 2) as usize;

/// The three kernel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SeriesFn {
    Tanh,
    Artanh,
    Arcosh,
}

impl fmt::Display for SeriesFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesFn::Tanh => write!(f, "tanh"),
            SeriesFn::Artanh => write!(f, "artanh"),
            SeriesFn::Arcosh => write!(f, "arcosh"),
        }
    }
}

impl std::str::FromStr for SeriesFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(SeriesFn::Tanh),
            "artanh" => Ok(SeriesFn::Artanh),
            "arcosh" => Ok(SeriesFn::Arcosh),
            other => Err(Error::Config(format!("unknown function {other:?}"))),
        }
    }
}

/// How the activation wrapper interprets the printed formula; see the
/// layers module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ActivationMode {
    /// Evaluate the sigmoid-of-norm scale exactly as written.
    Literal,
    /// Compose the activation between the origin log/exp scalings.
    MapCompose,
}

impl fmt::Display for ActivationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivationMode::Literal => write!(f, "literal"),
            ActivationMode::MapCompose => write!(f, "map-compose"),
        }
    }
}

impl std::str::FromStr for ActivationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ActivationMode::Literal),
            "map-compose" => Ok(ActivationMode::MapCompose),
            other => Err(Error::Config(format!("unknown activation mode {other:?}"))),
        }
    }
}

/// Shared configuration threaded through every series-based operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtseConfig<T> {
    /// Series term count, `1 ..= MAX_TERMS`.
    pub n: usize,
    /// Ball curvature, `> 0`.
    pub c: T,
    /// Weight of the L1 output regularizer, `≥ 0`.
    pub lambda: T,
    /// Relative-error guard and divide-by-zero epsilon, `0 < eps < 1e-6`.
    pub eps: T,
    pub activation_mode: ActivationMode,
}

impl<T: Real> PtseConfig<T> {
    pub fn new(n: usize, c: T, lambda: T) -> Result<Self> {
        let cfg = Self {
            n,
            c,
            lambda,
            eps: r(1e-9),
            activation_mode: ActivationMode::Literal,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// n terms, curvature 1, no regularization.
    pub fn with_terms(n: usize) -> Result<Self> {
        Self::new(n, T::one(), T::zero())
    }

    pub fn with_eps(mut self, eps: T) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_activation_mode(mut self, mode: ActivationMode) -> Self {
        self.activation_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n > MAX_TERMS {
            return Err(Error::Config(format!(
                "term count n={} outside 1..={MAX_TERMS}",
                self.n
            )));
        }
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(Error::Config(format!("curvature c={} must be > 0", self.c)));
        }
        if self.lambda < T::zero() || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda={} must be ≥ 0", self.lambda)));
        }
        if !(self.eps > T::zero()) || !(self.eps < r(1e-6)) {
            return Err(Error::Config(format!(
                "eps={} must satisfy 0 < eps < 1e-6",
                self.eps
            )));
        }
        Ok(())
    }

    pub fn sqrt_c(&self) -> T {
        self.c.sqrt()
    }
}

// ---------------------------------------------------------------------------
// Bernoulli numbers, exact over rationals.
// ---------------------------------------------------------------------------

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// Exact `B_k` with the convention `B_1 = -1/2`, via the recurrence
/// `B_m = -(1/(m+1)) Σ_{j<m} C(m+1, j) B_j`.
pub fn bernoulli_rational(k: u32) -> Result<BigRational> {
    if k > MAX_BERNOULLI {
        return Err(Error::CoefficientOverflow(k));
    }
    let cache = BERNOULLI.get_or_init(|| Mutex::new(vec![BigRational::from_integer(1.into())]));
    let mut table = cache.lock().expect("bernoulli cache poisoned");
    while table.len() <= k as usize {
        let m = table.len(); // computing B_m
        let mut acc = BigRational::from_integer(0.into());
        // binom tracks C(m+1, j) as j advances.
        let mut binom = BigInt::from(1);
        for (j, b) in table.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m as i64 + 1 - j as i64) / BigInt::from(j as i64 + 1);
        }
        let b_m = -acc / BigRational::from_integer((m as i64 + 1).into());
        table.push(b_m);
    }
    Ok(table[k as usize].clone())
}

/// `B_k` rounded to the scalar type.
pub fn bernoulli<T: Real>(k: u32) -> Result<T> {
    let b = bernoulli_rational(k)?;
    Ok(r(b.to_f64().ok_or_else(|| {
        Error::Numerical(format!("B_{k} not representable"))
    })?))
}

// ---------------------------------------------------------------------------
// Series coefficients.
// ---------------------------------------------------------------------------

/// Per-function series coefficients for term indices `i = 1..=n`.
///
/// For `tanh` and `artanh` the entries are the coefficients of
/// `x^{2i-1}`. For `arcosh` the entries interleave the two printed
/// sub-series: `[a_1, b_1, a_2, b_2, ..]` with `a_i = (-1)^{i+1}/i`
/// (coefficient of `(2x-1)^i`) and `b_i = (Π_{j≤i}(2j-1)/(2j))/(2i)`
/// (coefficient of `x^{-2i}`).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients<T> {
    pub fn_id: SeriesFn,
    pub coeffs: Vec<T>,
}

static COEFF_CACHE: OnceLock<Mutex<HashMap<(SeriesFn, usize), Arc<Vec<f64>>>>> = OnceLock::new();

fn coefficients_f64(fn_id: SeriesFn, n: usize) -> Result<Arc<Vec<f64>>> {
    if n < 1 || n > MAX_TERMS {
        return Err(Error::Config(format!(
            "term count n={n} outside 1..={MAX_TERMS}"
        )));
    }
    let cache = COEFF_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("coefficient cache poisoned");
    if let Some(existing) = map.get(&(fn_id, n)) {
        return Ok(existing.clone());
    }
    let values = match fn_id {
        SeriesFn::Tanh => {
            let mut out = Vec::with_capacity(n);
            // factorial (2i)! and power 2^{2i} advance incrementally.
            let mut fact = BigInt::from(1);
            for i in 1..=n as u32 {
                fact *= BigInt::from(2 * i - 1) * BigInt::from(2 * i);
                let pow = BigInt::from(1) << (2 * i);
                let num = BigRational::from_integer(pow.clone() * (pow - BigInt::from(1)))
                    * bernoulli_rational(2 * i)?.abs();
                let mut c = num / BigRational::from_integer(fact.clone());
                if i % 2 == 0 {
                    c = -c;
                }
                out.push(c.to_f64().ok_or_else(|| {
                    Error::Numerical(format!("tanh coefficient {i} not representable"))
                })?);
            }
            out
        }
        SeriesFn::Artanh => (1..=n).map(|i| 1.0 / (2 * i - 1) as f64).collect(),
        SeriesFn::Arcosh => {
            let mut out = Vec::with_capacity(2 * n);
            let mut prod = BigRational::from_integer(1.into());
            for i in 1..=n as i64 {
                prod *= BigRational::new((2 * i - 1).into(), (2 * i).into());
                let a = if i % 2 == 1 { 1.0 } else { -1.0 } / i as f64;
                let b = (prod.clone() / BigRational::from_integer((2 * i).into()))
                    .to_f64()
                    .ok_or_else(|| {
                        Error::Numerical(format!("arcosh coefficient {i} not representable"))
                    })?;
                out.push(a);
                out.push(b);
            }
            out
        }
    };
    let arc = Arc::new(values);
    map.insert((fn_id, n), arc.clone());
    Ok(arc)
}

impl<T: Real> SeriesCoefficients<T> {
    pub fn for_fn(fn_id: SeriesFn, n: usize) -> Result<Self> {
        let master = coefficients_f64(fn_id, n)?;
        Ok(Self {
            fn_id,
            coeffs: master.iter().map(|&c| r(c)).collect(),
        })
    }

    pub fn tanh(n: usize) -> Result<Self> {
        Self::for_fn(SeriesFn::Tanh, n)
    }

    pub fn artanh(n: usize) -> Result<Self> {
        Self::for_fn(SeriesFn::Artanh, n)
    }

    pub fn terms(&self) -> usize {
        match self.fn_id {
            SeriesFn::Arcosh => self.coeffs.len() / 2,
            _ => self.coeffs.len(),
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial evaluation.
// ---------------------------------------------------------------------------

/// `Σ_i coeffs[i-1] · x^{2i-1}` by Horner's scheme on x².
pub fn polyval_odd<T: Real>(coeffs: &[T], x: T) -> T {
    let x2 = x * x;
    let mut acc = T::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x2 + c;
    }
    acc * x
}

/// `Σ_i coeffs[i-1] · x^{2i-2}` by Horner's scheme on x².
pub fn polyval_even<T: Real>(coeffs: &[T], x: T) -> T {
    let x2 = x * x;
    let mut acc = T::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x2 + c;
    }
    acc
}

/// Naive ascending term-by-term evaluation of the odd series; reference
/// route for checking the Horner path.
pub fn polyval_odd_terms<T: Real>(coeffs: &[T], x: T) -> T {
    let x2 = x * x;
    let mut acc = T::zero();
    let mut p = x;
    for &c in coeffs {
        acc = acc + c * p;
        p = p * x2;
    }
    acc
}

// ---------------------------------------------------------------------------
// Kernels.
// ---------------------------------------------------------------------------

/// Out-of-domain note attached to an evaluation instead of failing it:
/// the series deliberately extend past the exact functions' domains.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainWarning {
    pub fn_id: SeriesFn,
    pub x: f64,
}

impl fmt::Display for DomainWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} series evaluated outside the exact function's domain at x={}",
            self.fn_id, self.x
        )
    }
}

/// Truncated tanh series. Total: defined for every real x, with
/// accuracy degrading outside |x| < π/2.
pub fn tanh_ptse<T: Real>(x: T, cfg: &PtseConfig<T>) -> T {
    let coeffs = SeriesCoefficients::<T>::tanh(cfg.n).expect("validated config");
    polyval_odd(&coeffs.coeffs, x)
}

/// Truncated artanh series. Total; callers that care about leaving
/// |x| < 1 use [`artanh_ptse_reported`].
pub fn artanh_ptse<T: Real>(x: T, cfg: &PtseConfig<T>) -> T {
    let coeffs = SeriesCoefficients::<T>::artanh(cfg.n).expect("validated config");
    polyval_odd(&coeffs.coeffs, x)
}

/// Like [`artanh_ptse`], additionally reporting when |x| ≥ 1 (where the
/// full series diverges; the truncation still evaluates).
pub fn artanh_ptse_reported<T: Real>(x: T, cfg: &PtseConfig<T>) -> (T, Option<DomainWarning>) {
    let value = artanh_ptse(x, cfg);
    let warning = (x.abs() >= T::one()).then(|| DomainWarning {
        fn_id: SeriesFn::Artanh,
        x: x.to_f64_lossy(),
    });
    (value, warning)
}

/// Truncated arcosh series, defined for x ≥ 1 exactly as printed.
pub fn arcosh_ptse<T: Real>(x: T, cfg: &PtseConfig<T>) -> Result<T> {
    if x < T::one() {
        return Err(Error::Domain(format!("arcosh series requires x ≥ 1, got {x}")));
    }
    let coeffs = SeriesCoefficients::<T>::for_fn(SeriesFn::Arcosh, cfg.n)?;
    let two_x_m1 = (x + x) - T::one();
    let inv_x2 = (T::one() / x) * (T::one() / x);
    let mut acc = T::zero();
    let mut p_ln = T::one(); // (2x-1)^i
    let mut p_inv = T::one(); // x^{-2i}
    for i in 0..cfg.n {
        p_ln = p_ln * two_x_m1;
        p_inv = p_inv * inv_x2;
        let a = coeffs.coeffs[2 * i];
        let b = coeffs.coeffs[2 * i + 1];
        acc = acc + (a * p_ln - b * p_inv);
    }
    Ok(acc)
}

/// High-accuracy reference for the three kernels via the platform's
/// standard math routines. Test/η helper only.
pub fn exact_kernel<T: Real>(fn_id: SeriesFn, x: T) -> Result<T> {
    match fn_id {
        SeriesFn::Tanh => Ok(x.tanh()),
        SeriesFn::Artanh => {
            if x.abs() >= T::one() {
                Err(Error::Domain(format!("artanh requires |x| < 1, got {x}")))
            } else {
                Ok(x.atanh())
            }
        }
        SeriesFn::Arcosh => {
            if x < T::one() {
                Err(Error::Domain(format!("arcosh requires x ≥ 1, got {x}")))
            } else {
                Ok(x.acosh())
            }
        }
    }
}

/// Truncated-series value for `fn_id` at `x` (the PTSE side of η).
pub fn series_kernel<T: Real>(fn_id: SeriesFn, x: T, cfg: &PtseConfig<T>) -> Result<T> {
    match fn_id {
        SeriesFn::Tanh => Ok(tanh_ptse(x, cfg)),
        SeriesFn::Artanh => Ok(artanh_ptse(x, cfg)),
        SeriesFn::Arcosh => arcosh_ptse(x, cfg),
    }
}

/// Relative approximation error `|f(x) − series(x)| / |f(x) + ε|`.
pub fn eta<T: Real>(fn_id: SeriesFn, x: T, cfg: &PtseConfig<T>) -> Result<T> {
    let exact = exact_kernel(fn_id, x)?;
    let approx = series_kernel(fn_id, x, cfg)?;
    Ok(((exact - approx) / (exact + cfg.eps)).abs())
}

/// Elementwise series evaluation over a tensor; coefficients are
/// resolved once per call.
pub fn series_kernel_elem<T: Real>(
    fn_id: SeriesFn,
    x: &Tensor<T>,
    cfg: &PtseConfig<T>,
) -> Result<Tensor<T>> {
    match fn_id {
        SeriesFn::Tanh => {
            let coeffs = SeriesCoefficients::<T>::tanh(cfg.n)?;
            Ok(x.map(|v| polyval_odd(&coeffs.coeffs, v)))
        }
        SeriesFn::Artanh => {
            let coeffs = SeriesCoefficients::<T>::artanh(cfg.n)?;
            Ok(x.map(|v| polyval_odd(&coeffs.coeffs, v)))
        }
        SeriesFn::Arcosh => {
            let mut out = Vec::with_capacity(x.len());
            for &v in x.data() {
                out.push(arcosh_ptse(v, cfg)?);
            }
            Tensor::new(x.shape().to_vec(), out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: usize) -> PtseConfig<f64> {
        PtseConfig::with_terms(n).unwrap()
    }

    #[test]
    fn bernoulli_base_cases() {
        assert_eq!(bernoulli::<f64>(0).unwrap(), 1.0);
        assert_eq!(bernoulli::<f64>(1).unwrap(), -0.5);
        // frozen from the exact rational recurrence
        assert!((bernoulli::<f64>(2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((bernoulli::<f64>(4).unwrap() + 1.0 / 30.0).abs() < 1e-15);
        for k in [3u32, 5, 7, 9, 33] {
            assert_eq!(bernoulli::<f64>(k).unwrap(), 0.0, "odd B_{k}");
        }
    }

    #[test]
    fn bernoulli_overflow_guard() {
        assert!(bernoulli::<f64>(64).is_ok());
        assert!(matches!(
            bernoulli::<f64>(65),
            Err(Error::CoefficientOverflow(65))
        ));
    }

    #[test]
    fn tanh_coefficients_first_five() {
        let c = SeriesCoefficients::<f64>::tanh(5).unwrap();
        let expected = [1.0, -1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0, 62.0 / 2835.0];
        for (got, want) in c.coeffs.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn artanh_coefficients() {
        let c = SeriesCoefficients::<f64>::artanh(4).unwrap();
        assert_eq!(c.coeffs, vec![1.0, 1.0 / 3.0, 1.0 / 5.0, 1.0 / 7.0]);
    }

    #[test]
    fn tanh_series_hand_values() {
        assert_eq!(tanh_ptse(0.0, &cfg(4)), 0.0);
        // 0.5 - 0.5³/3 and + 2·0.5⁵/15, hand-derived
        assert!((tanh_ptse(0.5, &cfg(2)) - 0.458333333333333).abs() < 1e-14);
        assert!((tanh_ptse(0.5, &cfg(3)) - 0.4625).abs() < 1e-14);
    }

    #[test]
    fn artanh_series_hand_values() {
        assert_eq!(artanh_ptse(0.0, &cfg(3)), 0.0);
        assert!((artanh_ptse(0.5, &cfg(3)) - 0.547916666666667).abs() < 1e-14);
        // truncation error at x=0.9, n=10, frozen from a 40-digit oracle
        let err = (artanh_ptse(0.9, &cfg(10)) - 0.9f64.atanh()).abs();
        assert!((err - 0.021019662).abs() < 1e-7, "err={err}");
    }

    #[test]
    fn artanh_domain_warning_metadata() {
        let (v, warn) = artanh_ptse_reported(1.5, &cfg(3));
        assert!(v.is_finite());
        assert!(warn.is_some());
        let (_, none) = artanh_ptse_reported(0.5, &cfg(3));
        assert!(none.is_none());
    }

    #[test]
    fn arcosh_series_hand_values() {
        // 1/1 − (1/2)/2 at x=1, n=1
        assert!((arcosh_ptse(1.0, &cfg(1)).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(
            arcosh_ptse(0.99, &cfg(3)),
            Err(Error::Domain(_))
        ));
        // residual at x=1 shrinks with n (exact arcosh(1) = 0)
        let r1 = arcosh_ptse(1.0, &cfg(1)).unwrap().abs();
        let r8 = arcosh_ptse(1.0, &cfg(8)).unwrap().abs();
        let r32 = arcosh_ptse(1.0, &cfg(32)).unwrap().abs();
        assert!(r8 < r1 && r32 < r8);
        assert!(r32 < 0.02, "slow alternating tail, got {r32}");
    }

    #[test]
    fn exact_kernel_values() {
        assert_eq!(exact_kernel(SeriesFn::Tanh, 0.0).unwrap(), 0.0);
        assert!((exact_kernel(SeriesFn::Artanh, 0.5).unwrap() - 0.549306144334055).abs() < 1e-14);
        // ln(x + √(x²−1)) oracle value
        assert!((exact_kernel(SeriesFn::Arcosh, 1.43473).unwrap() - 0.901599370922641).abs() < 1e-12);
        assert!(exact_kernel(SeriesFn::Artanh, 1.0).is_err());
        assert!(exact_kernel(SeriesFn::Arcosh, 0.5).is_err());
    }

    #[test]
    fn eta_hand_values() {
        assert_eq!(eta(SeriesFn::Tanh, 0.0, &cfg(5)).unwrap(), 0.0);
        // |tanh(0.5) − series(0.5, n=2)| / tanh(0.5)
        let e = eta(SeriesFn::Tanh, 0.5, &cfg(2)).unwrap();
        assert!((e - 0.0081880187).abs() < 1e-8, "eta={e}");
        assert!(eta(SeriesFn::Artanh, 0.5, &cfg(20)).unwrap() < 1e-9);
        // arcosh η against the oracle at x=1.05, n=3
        let e = eta(SeriesFn::Arcosh, 1.05, &cfg(3)).unwrap();
        let exact = 1.05f64.acosh();
        let expect = (exact - arcosh_ptse(1.05, &cfg(3)).unwrap()).abs() / (exact + 1e-9);
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn eta_monotone_in_terms_inside_radius() {
        for &x in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let mut prev = f64::INFINITY;
            for n in 1..=12 {
                let e = eta(SeriesFn::Tanh, x, &cfg(n)).unwrap();
                assert!(e <= prev + 1e-12, "tanh x={x} n={n}: {e} > {prev}");
                prev = e;
            }
            let mut prev = f64::INFINITY;
            for n in 1..=12 {
                let e = eta(SeriesFn::Artanh, x, &cfg(n)).unwrap();
                assert!(e <= prev + 1e-12, "artanh x={x} n={n}: {e} > {prev}");
                prev = e;
            }
        }
    }

    #[test]
    fn eta_grows_with_argument() {
        let grid = [0.1, 0.3, 0.5, 0.7];
        let mut prev = -1.0;
        for &x in &grid {
            let e = eta(SeriesFn::Tanh, x, &cfg(3)).unwrap();
            assert!(e >= prev, "η not non-decreasing at x={x}");
            prev = e;
        }
    }

    #[test]
    fn convergence_bounds() {
        // |x| ≤ 0.5 at n=10 within 1e-6; |x| ≤ 0.9 within 1e-3 (tanh)
        let c10 = cfg(10);
        let mut x = -0.9;
        while x <= 0.9 {
            let err = (tanh_ptse(x, &c10) - x.tanh()).abs();
            assert!(err < 1e-3, "tanh x={x} err={err}");
            if x.abs() <= 0.5 {
                assert!(err < 1e-6, "tanh x={x} err={err}");
                let aerr = (artanh_ptse(x, &c10) - x.atanh()).abs();
                assert!(aerr < 1e-6, "artanh x={x} err={aerr}");
            }
            x += 0.01;
        }
    }

    #[test]
    fn unclamped_outside_exact_range() {
        // The truncated polynomial must track the polynomial, not the
        // bounded exact function: no clamping anywhere.
        assert!(tanh_ptse(3.0, &cfg(6)) > 1.0);
        assert!(artanh_ptse(1.5, &cfg(4)).is_finite());
    }

    #[test]
    fn coefficient_cache_is_threadsafe() {
        let handles: Vec<_> = (0..8)
            .map(|i| {
                std::thread::spawn(move || {
                    let c = SeriesCoefficients::<f64>::tanh(1 + (i % 12)).unwrap();
                    c.coeffs[0]
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), 1.0);
        }
    }

    #[test]
    fn f32_instantiation() {
        let cfg32 = PtseConfig::<f32>::with_terms(3).unwrap();
        assert!((tanh_ptse(0.5f32, &cfg32) - 0.4625).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        assert!(PtseConfig::<f64>::with_terms(0).is_err());
        assert!(PtseConfig::<f64>::with_terms(33).is_err());
        assert!(PtseConfig::<f64>::new(3, 0.0, 0.0).is_err());
        assert!(PtseConfig::<f64>::new(3, 1.0, -0.1).is_err());
        assert!(PtseConfig::<f64>::with_terms(3)
            .unwrap()
            .with_eps(1e-5)
            .is_err());
        assert!(PtseConfig::<f64>::with_terms(3)
            .unwrap()
            .with_eps(1e-12)
            .is_ok());
    }

    proptest! {
        #[test]
        fn odd_symmetry(x in -3.0f64..3.0, n in 1usize..16) {
            let c = cfg(n);
            prop_assert_eq!(tanh_ptse(-x, &c), -tanh_ptse(x, &c));
            prop_assert_eq!(artanh_ptse(-x, &c), -artanh_ptse(x, &c));
        }

        #[test]
        fn horner_matches_naive(x in -2.0f64..2.0, n in 1usize..=16) {
            let coeffs = SeriesCoefficients::<f64>::tanh(n).unwrap();
            let h = polyval_odd(&coeffs.coeffs, x);
            let t = polyval_odd_terms(&coeffs.coeffs, x);
            let scale = h.abs().max(t.abs()).max(1e-300);
            prop_assert!((h - t).abs() / scale < 1e-12, "h={} t={}", h, t);
        }
    }
}
