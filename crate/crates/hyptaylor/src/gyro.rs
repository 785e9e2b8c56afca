//! Poincaré-ball gyrovector operations: the closed-form Möbius
//! addition, the series-scaled (PTSE) maps and distances, and exact
//! closed-form oracles used for validation.
//!
//! The series-scaled operations deliberately accept vectors of any
//! norm — nothing here projects onto or clamps to the ball. Only the
//! exact oracles enforce ball membership, via [`PoincarePoint`].

use crate::error::{Error, Result};
use crate::scalar::{r, Real};
use crate::series::{polyval_odd, PtseConfig, SeriesCoefficients, SeriesFn};
use crate::tensor::Tensor;

/// Möbius denominators below this magnitude are reported as singular;
/// attainable only with near-boundary antipodal inputs.
pub const NEAR_SINGULAR: f64 = 1e-12;

/// A point validated to lie strictly inside the ball of curvature `c`
/// (`√c·‖v‖ < 1`). Exact oracles take their ball-valued inputs through
/// this check.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincarePoint<T> {
    v: Tensor<T>,
    c: T,
}

impl<T: Real> PoincarePoint<T> {
    pub fn new(v: Tensor<T>, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::Config(format!("curvature c={c} must be > 0")));
        }
        let radius = c.sqrt() * v.norm();
        if radius >= T::one() {
            return Err(Error::Domain(format!(
                "point with √c‖v‖ = {radius} is not inside the ball"
            )));
        }
        Ok(Self { v, c })
    }

    pub fn vector(&self) -> &Tensor<T> {
        &self.v
    }

    pub fn curvature(&self) -> T {
        self.c
    }
}

/// Conformal factor λ_x = 1/(1 − c‖x‖²); λ_0 = 1.
///
/// This normalization makes the series-scaled exponential map at the
/// origin reduce term-by-term to tanh scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalFactor<T> {
    value: T,
}

impl<T: Real> ConformalFactor<T> {
    pub fn at(x: &Tensor<T>, c: T) -> Self {
        Self {
            value: T::one() / (T::one() - c * x.norm_sq()),
        }
    }

    pub fn value(&self) -> T {
        self.value
    }
}

/// Ascending series accumulator; switches to Kahan compensation for
/// long sums (n > 8).
struct SeriesSum<T> {
    sum: T,
    comp: T,
    compensated: bool,
}

impl<T: Real> SeriesSum<T> {
    fn new(n: usize) -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
            compensated: n > 8,
        }
    }

    fn add(&mut self, term: T) {
        if self.compensated {
            let y = term - self.comp;
            let t = self.sum + y;
            self.comp = (t - self.sum) - y;
            self.sum = t;
        } else {
            self.sum = self.sum + term;
        }
    }

    fn value(self) -> T {
        self.sum
    }
}

/// `Σ_{i=1..n} coeffs[i-1] · base^{2i-2}`, ascending with the power of
/// `base` computed once per term.
fn even_series<T: Real>(coeffs: &[T], base: T) -> T {
    let b2 = base * base;
    let mut acc = SeriesSum::new(coeffs.len());
    let mut p = T::one();
    for &c in coeffs {
        acc.add(c * p);
        p = p * b2;
    }
    acc.value()
}

/// `Σ_{i=1..n} coeffs[i-1] · base^{2i-1}`.
fn odd_series<T: Real>(coeffs: &[T], base: T) -> T {
    let b2 = base * base;
    let mut acc = SeriesSum::new(coeffs.len());
    let mut p = base;
    for &c in coeffs {
        acc.add(c * p);
        p = p * b2;
    }
    acc.value()
}

fn check_same_dim<T: Real>(x: &Tensor<T>, y: &Tensor<T>) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::Shape(format!(
            "gyrovector operands {:?} vs {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(())
}

/// Möbius addition x ⊕ y (closed form, no series):
/// `[(1+2c⟨x,y⟩+c‖y‖²)x + (1−c‖x‖²)y] / (1+2c⟨x,y⟩+c²‖x‖²‖y‖²)`.
pub fn mobius_add<T: Real>(x: &Tensor<T>, y: &Tensor<T>, c: T) -> Result<Tensor<T>> {
    check_same_dim(x, y)?;
    let xy = x.dot(y)?;
    let x2 = x.norm_sq();
    let y2 = y.norm_sq();
    let two = r::<T>(2.0);
    let kx = T::one() + two * c * xy + c * y2;
    let ky = T::one() - c * x2;
    let den = T::one() + two * c * xy + c * c * x2 * y2;
    if den.abs() < r(NEAR_SINGULAR) {
        return Err(Error::NearSingular {
            value: den.to_f64_lossy(),
            threshold: NEAR_SINGULAR,
        });
    }
    x.scale(kx / den).add(&y.scale(ky / den))
}

/// The two polynomial weights (K_x, K_y) of Möbius addition, shared by
/// the fused layer pipelines.
pub fn mobius_weights<T: Real>(x: &Tensor<T>, y: &Tensor<T>, c: T) -> Result<(T, T)> {
    check_same_dim(x, y)?;
    let xy = x.dot(y)?;
    let x2 = x.norm_sq();
    let y2 = y.norm_sq();
    let two = r::<T>(2.0);
    let den = T::one() + two * c * xy + c * c * x2 * y2;
    if den.abs() < r(NEAR_SINGULAR) {
        return Err(Error::NearSingular {
            value: den.to_f64_lossy(),
            threshold: NEAR_SINGULAR,
        });
    }
    let kx = (T::one() + two * c * xy + c * y2) / den;
    let ky = (T::one() - c * x2) / den;
    Ok((kx, ky))
}

/// Scalar factor of the origin log scaling: `Σ_i y^{2i-2}/(2i-1)`.
pub fn log0_scale<T: Real>(y: T, cfg: &PtseConfig<T>) -> T {
    let coeffs = SeriesCoefficients::<T>::artanh(cfg.n).expect("validated config");
    even_series(&coeffs.coeffs, y)
}

/// Scalar factor of the origin exp scaling: `Σ_i c_i y^{2i-2}` with the
/// tanh series coefficients.
pub fn exp0_scale<T: Real>(y: T, cfg: &PtseConfig<T>) -> T {
    let coeffs = SeriesCoefficients::<T>::tanh(cfg.n).expect("validated config");
    even_series(&coeffs.coeffs, y)
}

/// Series-scaled exponential map:
/// `x ⊕ [Σ_i c_i λ_x^{2i-1} (√c‖v‖)^{2i-2}] v`. Returns `x` at `v = 0`.
pub fn exp_map_ptse<T: Real>(
    x: &Tensor<T>,
    v: &Tensor<T>,
    cfg: &PtseConfig<T>,
) -> Result<Tensor<T>> {
    check_same_dim(x, v)?;
    let lambda = ConformalFactor::at(x, cfg.c).value();
    let y = cfg.sqrt_c() * v.norm();
    // λ^{2i-1} y^{2i-2} = λ·(λy)^{2i-2}
    let coeffs = SeriesCoefficients::<T>::tanh(cfg.n)?;
    let s = lambda * even_series(&coeffs.coeffs, lambda * y);
    mobius_add(x, &v.scale(s), cfg.c)
}

/// Series-scaled logarithmic map:
/// `[Σ_i λ_x^{2i-1} (√c‖u‖)^{2i-2}/(2i-1)] u` with `u = (−x) ⊕ y`.
pub fn log_map_ptse<T: Real>(
    x: &Tensor<T>,
    y: &Tensor<T>,
    cfg: &PtseConfig<T>,
) -> Result<Tensor<T>> {
    check_same_dim(x, y)?;
    let u = mobius_add(&x.neg(), y, cfg.c)?;
    let lambda = ConformalFactor::at(x, cfg.c).value();
    let w = cfg.sqrt_c() * u.norm();
    let coeffs = SeriesCoefficients::<T>::artanh(cfg.n)?;
    let s = lambda * even_series(&coeffs.coeffs, lambda * w);
    Ok(u.scale(s))
}

/// Series-scaled Möbius scalar multiplication, exactly as printed:
/// `Σ_i c_i (√c‖a·r·x‖)^{2i-2} · (√c‖x‖)^{2i-2}/(2i-1) · r·x` where
/// `a = Σ_j (√c‖x‖)^{2j-2}/(2j-1)`.
pub fn scalar_mul_ptse<T: Real>(scalar: T, x: &Tensor<T>, cfg: &PtseConfig<T>) -> Tensor<T> {
    let y = cfg.sqrt_c() * x.norm();
    let a = log0_scale(y, cfg);
    // norm of a·r·x, then the combined per-term base z·y
    let z = cfg.sqrt_c() * (a * scalar).abs() * x.norm();
    let tanh_c = SeriesCoefficients::<T>::tanh(cfg.n).expect("validated config");
    let mut acc = SeriesSum::new(cfg.n);
    let mut p = T::one(); // (z·y)^{2i-2}
    let zy2 = (z * y) * (z * y);
    for (i, &ci) in tanh_c.coeffs.iter().enumerate() {
        let inv = T::one() / r::<T>((2 * i + 1) as f64);
        acc.add(ci * inv * p);
        p = p * zy2;
    }
    x.scale(scalar * acc.value())
}

/// The scalar weight of the series matrix-vector product:
/// `K = Σ_i c_i a^{2i-1}` with `a = Σ_j (√c‖v‖)^{2j-2}/(2j-1)`.
pub fn matvec_scale<T: Real>(v_norm: T, cfg: &PtseConfig<T>) -> T {
    let a = log0_scale(cfg.sqrt_c() * v_norm, cfg);
    let tanh_c = SeriesCoefficients::<T>::tanh(cfg.n).expect("validated config");
    odd_series(&tanh_c.coeffs, a)
}

/// Series-scaled matrix-vector product `K·(Mv)`. Total on `Mv = 0` and
/// `v = 0`.
pub fn matvec_ptse<T: Real>(
    m: &Tensor<T>,
    v: &Tensor<T>,
    cfg: &PtseConfig<T>,
) -> Result<Tensor<T>> {
    let mv = m.matmul(v)?;
    let k = matvec_scale(v.norm(), cfg);
    Ok(mv.scale(k))
}

/// Series-scaled parallel transport from the origin, as printed:
/// `[Σ_i ‖m‖^{2i-1}/(2i-1)] m` with
/// `m = x ⊕ [Σ_i c_i (√c‖v‖)^{2i-2}] v`.
pub fn parallel_transport_ptse<T: Real>(
    x: &Tensor<T>,
    v: &Tensor<T>,
    cfg: &PtseConfig<T>,
) -> Result<Tensor<T>> {
    check_same_dim(x, v)?;
    let s = exp0_scale(cfg.sqrt_c() * v.norm(), cfg);
    let m = mobius_add(x, &v.scale(s), cfg.c)?;
    let artanh_c = SeriesCoefficients::<T>::artanh(cfg.n)?;
    let t = odd_series(&artanh_c.coeffs, m.norm());
    Ok(m.scale(t))
}

/// Series distance `d1 = (2/√c)·Σ_i (√c‖(−x)⊕y‖)^{2i-1}/(2i-1)`.
pub fn dist1_ptse<T: Real>(x: &Tensor<T>, y: &Tensor<T>, cfg: &PtseConfig<T>) -> Result<T> {
    let u = mobius_add(&x.neg(), y, cfg.c)?;
    let artanh_c = SeriesCoefficients::<T>::artanh(cfg.n)?;
    let s = odd_series(&artanh_c.coeffs, cfg.sqrt_c() * u.norm());
    Ok(r::<T>(2.0) / cfg.sqrt_c() * s)
}

fn dist2_arg<T: Real>(x: &Tensor<T>, y: &Tensor<T>) -> Result<T> {
    check_same_dim(x, y)?;
    let nx = x.norm_sq();
    let ny = y.norm_sq();
    if nx >= T::one() || ny >= T::one() {
        return Err(Error::Domain(format!(
            "d2 requires ‖x‖ < 1 and ‖y‖ < 1, got {} and {}",
            nx.sqrt(),
            ny.sqrt()
        )));
    }
    let diff = x.sub(y)?;
    Ok(T::one() + r::<T>(2.0) * diff.norm_sq() / ((T::one() - nx) * (T::one() - ny)))
}

/// Series distance `d2 = arcosh-series(1 + 2‖x−y‖²/((1−‖x‖²)(1−‖y‖²)))`.
pub fn dist2_ptse<T: Real>(x: &Tensor<T>, y: &Tensor<T>, cfg: &PtseConfig<T>) -> Result<T> {
    crate::series::arcosh_ptse(dist2_arg(x, y)?, cfg)
}

/// Exact counterpart of [`dist2_ptse`].
pub fn dist2_exact<T: Real>(x: &Tensor<T>, y: &Tensor<T>) -> Result<T> {
    Ok(dist2_arg(x, y)?.acosh())
}

// ---------------------------------------------------------------------------
// Exact oracles (validation only). These enforce ball membership and use
// the platform tanh/artanh; the standard literature conformal factor
// 2/(1−c‖x‖²) applies at general base points, reducing to the origin
// closed forms at x = 0.
// ---------------------------------------------------------------------------

fn require_in_ball<T: Real>(x: &Tensor<T>, c: T) -> Result<()> {
    PoincarePoint::new(x.clone(), c).map(|_| ())
}

/// Exact exponential map `exp_x(v)`; at the origin
/// `tanh(√c‖v‖)·v/(√c‖v‖)`.
pub fn exp_map_exact<T: Real>(x: &Tensor<T>, v: &Tensor<T>, c: T) -> Result<Tensor<T>> {
    check_same_dim(x, v)?;
    require_in_ball(x, c)?;
    let vn = v.norm();
    if vn == T::zero() {
        return Ok(x.clone());
    }
    let sc = c.sqrt();
    let lambda = r::<T>(2.0) / (T::one() - c * x.norm_sq());
    let t = (sc * lambda * vn / r(2.0)).tanh();
    mobius_add(x, &v.scale(t / (sc * vn)), c)
}

/// Exact logarithmic map `log_x(y)`; at the origin
/// `artanh(√c‖y‖)·y/(√c‖y‖)`.
pub fn log_map_exact<T: Real>(x: &Tensor<T>, y: &Tensor<T>, c: T) -> Result<Tensor<T>> {
    check_same_dim(x, y)?;
    require_in_ball(x, c)?;
    require_in_ball(y, c)?;
    let u = mobius_add(&x.neg(), y, c)?;
    let un = u.norm();
    if un == T::zero() {
        return Ok(Tensor::zeros(x.shape().to_vec()));
    }
    let sc = c.sqrt();
    let lambda = r::<T>(2.0) / (T::one() - c * x.norm_sq());
    let s = (r::<T>(2.0) / (sc * lambda)) * (sc * un).atanh();
    Ok(u.scale(s / un))
}

/// Exact Möbius scalar multiplication
/// `tanh(r·artanh(√c‖x‖))·x/(√c‖x‖)`.
pub fn scalar_mul_exact<T: Real>(scalar: T, x: &Tensor<T>, c: T) -> Result<Tensor<T>> {
    require_in_ball(x, c)?;
    let xn = x.norm();
    if xn == T::zero() {
        return Ok(x.clone());
    }
    let sc = c.sqrt();
    let t = (scalar * (sc * xn).atanh()).tanh();
    Ok(x.scale(t / (sc * xn)))
}

/// Exact Poincaré distance `(2/√c)·artanh(√c‖(−x)⊕y‖)`.
pub fn dist_exact<T: Real>(x: &Tensor<T>, y: &Tensor<T>, c: T) -> Result<T> {
    require_in_ball(x, c)?;
    require_in_ball(y, c)?;
    let u = mobius_add(&x.neg(), y, c)?;
    Ok(r::<T>(2.0) / c.sqrt() * (c.sqrt() * u.norm()).atanh())
}

/// Reference odd-series evaluation used by self-consistency tests.
pub fn artanh_odd_series<T: Real>(base: T, cfg: &PtseConfig<T>) -> T {
    let coeffs = SeriesCoefficients::<T>::artanh(cfg.n).expect("validated config");
    polyval_odd(&coeffs.coeffs, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{artanh_ptse, tanh_ptse};
    use proptest::prelude::*;

    fn cfg(n: usize) -> PtseConfig<f64> {
        PtseConfig::with_terms(n).unwrap()
    }

    fn v2(a: f64, b: f64) -> Tensor<f64> {
        Tensor::from_slice(&[a, b])
    }

    /// Verbose nested-sum reference for the scalar product, following
    /// the printed double series term by term.
    fn scalar_mul_reference(r_: f64, x: &Tensor<f64>, cfg: &PtseConfig<f64>) -> Tensor<f64> {
        let sc = cfg.c.sqrt();
        let y = sc * x.norm();
        let mut a = 0.0;
        for j in 1..=cfg.n {
            a += y.powi(2 * j as i32 - 2) / (2 * j - 1) as f64;
        }
        let rax = x.scale(r_ * a);
        let z = sc * rax.norm();
        let tanh_c = SeriesCoefficients::<f64>::tanh(cfg.n).unwrap();
        let mut k = 0.0;
        for i in 1..=cfg.n {
            k += tanh_c.coeffs[i - 1] * z.powi(2 * i as i32 - 2) * y.powi(2 * i as i32 - 2)
                / (2 * i - 1) as f64;
        }
        x.scale(r_ * k)
    }

    /// Verbose reference for the matrix product weight.
    fn matvec_reference(m: &Tensor<f64>, v: &Tensor<f64>, cfg: &PtseConfig<f64>) -> Tensor<f64> {
        let y = cfg.c.sqrt() * v.norm();
        let mut a = 0.0;
        for j in 1..=cfg.n {
            a += y.powi(2 * j as i32 - 2) / (2 * j - 1) as f64;
        }
        let tanh_c = SeriesCoefficients::<f64>::tanh(cfg.n).unwrap();
        let mut k = 0.0;
        for i in 1..=cfg.n {
            k += tanh_c.coeffs[i - 1] * a.powi(2 * i as i32 - 1);
        }
        m.matmul(v).unwrap().scale(k)
    }

    #[test]
    fn mobius_add_hand_values() {
        let out = mobius_add(&v2(0.1, 0.0), &v2(0.0, 0.0), 1.0).unwrap();
        assert_eq!(out.data(), &[0.1, 0.0]);
        let out = mobius_add(&v2(0.1, 0.0), &v2(0.2, 0.0), 1.0).unwrap();
        assert!((out.data()[0] - 0.2941176470588235).abs() < 1e-15); // 0.306/1.0404
        let x = v2(0.3, 0.1);
        let out = mobius_add(&x.neg(), &x, 1.0).unwrap();
        assert!(out.norm() < 1e-15);
    }

    #[test]
    fn mobius_near_singular_guard() {
        let a = 0.99999999;
        let err = mobius_add(&v2(a, 0.0), &v2(-a, 0.0), 1.0);
        assert!(matches!(err, Err(Error::NearSingular { .. })));
    }

    #[test]
    fn exp_map_series_cases() {
        let x = v2(0.2, 0.0);
        let out = exp_map_ptse(&x, &v2(0.0, 0.0), &cfg(5)).unwrap();
        assert_eq!(out.data(), &[0.2, 0.0]);

        // at the origin the series collapses to tanh scaling
        let o = v2(0.0, 0.0);
        let out = exp_map_ptse(&o, &v2(0.3, 0.0), &cfg(8)).unwrap();
        assert!((out.data()[0] - 0.3f64.tanh()).abs() < 1e-9, "{}", out.data()[0]);
        assert_eq!(out.data()[1], 0.0);

        // n=1 is identity scaling
        let out = exp_map_ptse(&o, &v2(0.3, 0.0), &cfg(1)).unwrap();
        assert!((out.data()[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn log_map_series_cases() {
        let x = v2(0.2, 0.1);
        let out = log_map_ptse(&x, &x, &cfg(6)).unwrap();
        assert!(out.norm() < 1e-15);

        let o = v2(0.0, 0.0);
        let y = exp_map_ptse(&o, &v2(0.3, 0.0), &cfg(10)).unwrap();
        let back = log_map_ptse(&o, &y, &cfg(10)).unwrap();
        assert!((back.data()[0] - 0.3).abs() < 1e-8);

        let out = log_map_ptse(&o, &v2(0.5, 0.0), &cfg(3)).unwrap();
        assert!((out.data()[0] - artanh_ptse(0.5, &cfg(3))).abs() < 1e-15);
    }

    #[test]
    fn scalar_mul_cases() {
        assert_eq!(scalar_mul_ptse(0.0, &v2(0.4, 0.2), &cfg(4)).data(), &[0.0, 0.0]);
        assert_eq!(scalar_mul_ptse(1.0, &v2(0.0, 0.0), &cfg(4)).data(), &[0.0, 0.0]);

        // printed double series against the verbose reference, and η
        // against the exact oracle
        let x = v2(0.1, 0.0);
        let c5 = cfg(5);
        let got = scalar_mul_ptse(2.0, &x, &c5);
        let reference = scalar_mul_reference(2.0, &x, &c5);
        assert!((got.data()[0] - reference.data()[0]).abs() < 1e-14);
        let exact = scalar_mul_exact(2.0, &x, 1.0).unwrap();
        assert!((exact.data()[0] - 0.198019801980198).abs() < 1e-14); // tanh(2·artanh(0.1))
        let eta = (got.data()[0] - exact.data()[0]).abs() / exact.data()[0];
        assert!(eta < 0.05, "recorded η = {eta}");
    }

    #[test]
    fn matvec_cases() {
        let m = Tensor::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let zero = v2(0.0, 0.0);
        assert_eq!(matvec_ptse(&m, &zero, &cfg(5)).unwrap().data(), &[0.0, 0.0]);

        let eye = Tensor::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let out = matvec_ptse(&eye, &v2(0.2, 0.0), &cfg(1)).unwrap();
        assert_eq!(out.data(), &[0.2, 0.0]); // n=1 degeneracy, exact

        let two = Tensor::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let v = v2(0.1, 0.0);
        let got = matvec_ptse(&two, &v, &cfg(3)).unwrap();
        let reference = matvec_reference(&two, &v, &cfg(3));
        assert!((got.data()[0] - reference.data()[0]).abs() < 1e-15);

        assert!(matvec_ptse(&two, &Tensor::from_slice(&[1.0, 2.0, 3.0]), &cfg(3)).is_err());
    }

    #[test]
    fn parallel_transport_cases() {
        let o = v2(0.0, 0.0);
        assert_eq!(
            parallel_transport_ptse(&o, &o, &cfg(4)).unwrap().data(),
            &[0.0, 0.0]
        );

        // n=1, x=0: m=(0.3,0), output ‖m‖·m = (0.09, 0)
        let out = parallel_transport_ptse(&o, &v2(0.3, 0.0), &cfg(1)).unwrap();
        assert!((out.data()[0] - 0.09).abs() < 1e-15);

        // v=0: m = x, output is the artanh-like scaling of m
        let x = v2(0.1, 0.0);
        let out = parallel_transport_ptse(&x, &v2(0.0, 0.0), &cfg(4)).unwrap();
        let expect = artanh_odd_series(0.1, &cfg(4)) * 0.1;
        assert!((out.data()[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn dist1_hand_values() {
        let x = v2(0.1, 0.0);
        let y = v2(0.2, 0.0);
        assert_eq!(dist1_ptse(&x, &x, &cfg(5)).unwrap(), 0.0);
        // exact Poincaré distance 2·artanh(5/49), oracle-frozen
        let d = dist1_ptse(&x, &y, &cfg(10)).unwrap();
        assert!((d - 0.2047944126316771).abs() < 1e-6, "d={d}");
        let d1 = dist1_ptse(&x, &y, &cfg(1)).unwrap();
        assert!((d1 - 0.2040816326530612).abs() < 1e-14, "2·5/49, got {d1}");
    }

    #[test]
    fn dist2_cases() {
        let x = v2(0.3, 0.0);
        assert_eq!(dist2_exact(&x, &x).unwrap(), 0.0);
        let y = v2(0.0, 0.3);
        // arg = 1 + 0.36/0.8281; the exact value is oracle-frozen
        let d = dist2_exact(&x, &y).unwrap();
        assert!((d - 0.9015994730420073).abs() < 1e-12, "d={d}");
        let dp = dist2_ptse(&x, &y, &cfg(3)).unwrap();
        let eta = (dp - d).abs() / (d + 1e-9);
        assert!(eta.is_finite(), "recorded η = {eta}");
        assert!(dist2_exact(&v2(1.0, 0.0), &y).is_err());
    }

    #[test]
    fn exact_oracle_identities() {
        let o = v2(0.0, 0.0);
        let v = v2(0.3, 0.1);
        let y = exp_map_exact(&o, &v, 1.0).unwrap();
        let back = log_map_exact(&o, &y, 1.0).unwrap();
        assert!(back.sub(&v).unwrap().norm() < 1e-12);

        let x = v2(0.5, -0.2);
        let same = scalar_mul_exact(1.0, &x, 1.0).unwrap();
        assert!(same.sub(&x).unwrap().norm() < 1e-12);

        let d = dist_exact(&v2(0.1, 0.0), &v2(0.2, 0.0), 1.0).unwrap();
        assert!((d - 0.2047944126316771).abs() < 1e-12);
    }

    #[test]
    fn poincare_point_validation() {
        assert!(PoincarePoint::new(v2(0.9, 0.0), 1.0).is_ok());
        assert!(PoincarePoint::new(v2(1.0, 0.0), 1.0).is_err());
        assert!(PoincarePoint::new(v2(0.8, 0.0), 2.0).is_err()); // √2·0.8 > 1
        assert!(exp_map_exact(&v2(1.1, 0.0), &v2(0.1, 0.0), 1.0).is_err());
    }

    #[test]
    fn conformal_factor_convention() {
        assert_eq!(ConformalFactor::at(&v2(0.0, 0.0), 1.0).value(), 1.0);
        let l = ConformalFactor::at(&v2(0.5, 0.0), 1.0).value();
        assert!((l - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn origin_equivalence_and_roundtrip() {
        let o = v2(0.0, 0.0);
        let c8 = cfg(8);
        for &(a, b) in &[(0.1, 0.05), (0.25, -0.2), (0.39, 0.05), (-0.3, 0.2)] {
            let v = v2(a, b);
            if v.norm() > 0.4 {
                continue;
            }
            let p = exp_map_ptse(&o, &v, &c8).unwrap();
            let e = exp_map_exact(&o, &v, 1.0).unwrap();
            assert!(p.sub(&e).unwrap().norm() < 1e-6);
            let lp = log_map_ptse(&o, &p, &c8).unwrap();
            assert!(lp.sub(&v).unwrap().norm() < 1e-5);
        }
    }

    #[test]
    fn matvec_scale_unclamped() {
        // large-norm input: the polynomial weight is not range-limited
        let k = matvec_scale(25.0, &cfg(5));
        assert!(k.is_finite() && k.abs() > 1.0);
    }

    proptest! {
        #[test]
        fn mobius_identities(
            xs in prop::collection::vec(-0.63f64..0.63, 2),
            ys in prop::collection::vec(-0.63f64..0.63, 2),
        ) {
            // ‖·‖ ≤ 0.9 after the per-coordinate bound
            let x = Tensor::from_slice(&xs);
            let y = Tensor::from_slice(&ys);
            let zero = Tensor::zeros(vec![2]);
            let right = mobius_add(&x, &zero, 1.0).unwrap();
            prop_assert_eq!(right.data(), x.data());
            let left = mobius_add(&zero, &y, 1.0).unwrap();
            prop_assert_eq!(left.data(), y.data());
            let inv = mobius_add(&x.neg(), &x, 1.0).unwrap();
            prop_assert!(inv.norm() < 1e-12);
        }

        #[test]
        fn dist_symmetry(
            xs in prop::collection::vec(-0.6f64..0.6, 3),
            ys in prop::collection::vec(-0.6f64..0.6, 3),
        ) {
            let x = Tensor::from_slice(&xs);
            let y = Tensor::from_slice(&ys);
            let c3 = cfg(3);
            let d_xy = dist1_ptse(&x, &y, &c3).unwrap();
            let d_yx = dist1_ptse(&y, &x, &c3).unwrap();
            prop_assert!((d_xy - d_yx).abs() < 1e-12);
            prop_assert!(dist1_ptse(&x, &x, &c3).unwrap() < 1e-12);
        }

        #[test]
        fn n1_degeneracy(vs in prop::collection::vec(-2.0f64..2.0, 3)) {
            // with one term every polynomial weight equals 1
            let m = Tensor::from_rows(&[
                vec![0.3, -0.1, 0.2],
                vec![0.0, 0.5, -0.4],
            ]).unwrap();
            let v = Tensor::from_slice(&vs);
            let out = matvec_ptse(&m, &v, &cfg(1)).unwrap();
            prop_assert_eq!(out.data(), m.matmul(&v).unwrap().data());
        }

        #[test]
        fn tanh_scale_consistency(norm in 0.0f64..0.9, n in 1usize..10) {
            // matvec weight at unit "a" equals tanh series of a
            let c = cfg(n);
            let a = log0_scale(norm, &c);
            let k = matvec_scale(norm, &c);
            prop_assert!((k - tanh_ptse(a, &c)).abs() <= 1e-12 * k.abs().max(1.0));
        }
    }
}
