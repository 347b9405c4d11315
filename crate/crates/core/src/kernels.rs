//! Smoothing kernels and their acceptance machinery.
//!
//! A kernel `K` is a symmetric density with zero mean and finite variance;
//! the scaled version is `K_h(u) = K(u/h) / h`. Rejection samplers use the
//! acceptance ratio `K_h(rho) / K_h(0)` to turn a distance into an
//! acceptance probability, and the adaptive sampler inverts that ratio to
//! find the smallest scale at which a particle survives.
//!
//! The limit `h -> 0` is treated as a point mass at the origin; samplers
//! special-case it as an exact-match indicator rather than calling into
//! this module with `h = 0`.

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.5066282746310002;

/// Kernel families.
///
/// All compact kernels live on `[-1, 1]`. The Biweight uses the quartic
/// form `(15/16)(1 - u^2)^2`, which integrates to one (the cubed variant
/// occasionally seen in print integrates to 6/7 and is not a density).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SmoothingKernel {
    Uniform,
    Triangular,
    Epanechnikov,
    Biweight,
    Gaussian,
}

impl SmoothingKernel {
    pub const ALL: [SmoothingKernel; 5] = [
        SmoothingKernel::Uniform,
        SmoothingKernel::Triangular,
        SmoothingKernel::Epanechnikov,
        SmoothingKernel::Biweight,
        SmoothingKernel::Gaussian,
    ];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Self::Uniform),
            "triangular" => Ok(Self::Triangular),
            "epanechnikov" => Ok(Self::Epanechnikov),
            "biweight" => Ok(Self::Biweight),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(Error::UnknownKernel(other.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Triangular => "triangular",
            Self::Epanechnikov => "epanechnikov",
            Self::Biweight => "biweight",
            Self::Gaussian => "gaussian",
        }
    }

    /// True if the kernel has support `[-1, 1]` rather than the whole line.
    pub fn is_compact(self) -> bool {
        !matches!(self, Self::Gaussian)
    }

    /// Base density `K(u)`.
    pub fn eval_base(self, u: f64) -> f64 {
        let a = u.abs();
        match self {
            Self::Uniform => {
                if a <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Self::Triangular => {
                if a <= 1.0 {
                    1.0 - a
                } else {
                    0.0
                }
            }
            Self::Epanechnikov => {
                if a <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            Self::Biweight => {
                if a <= 1.0 {
                    let t = 1.0 - u * u;
                    (15.0 / 16.0) * t * t
                } else {
                    0.0
                }
            }
            Self::Gaussian => (-0.5 * u * u).exp() / SQRT_2PI,
        }
    }

    /// Scaled density `K_h(u) = K(u/h) / h` for `h > 0`.
    pub fn eval_scaled(self, h: f64, u: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidScale(h));
        }
        Ok(self.eval_base(u / h) / h)
    }

    /// Acceptance ratio `K_h(rho) / K_h(0) = K(rho/h) / K(0)`.
    ///
    /// Equals 1 at `rho = 0` and is non-increasing in `rho`.
    pub fn acceptance_ratio(self, h: f64, rho: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidScale(h));
        }
        Ok(self.eval_base(rho / h) / self.eval_base(0.0))
    }

    /// Second moment of the base kernel, `sigma^2_K = int u^2 K(u) du`.
    pub fn variance(self) -> f64 {
        match self {
            Self::Uniform => 1.0 / 3.0,
            Self::Triangular => 1.0 / 6.0,
            Self::Epanechnikov => 1.0 / 5.0,
            Self::Biweight => 1.0 / 7.0,
            Self::Gaussian => 1.0,
        }
    }

    /// Smallest scale `h` at which a particle with distance `rho` and
    /// acceptance draw `u` survives, i.e. `u <= K_h(rho) / K_h(0)`.
    ///
    /// Closed form for the uniform (`h = rho`) and Gaussian
    /// (`h = sqrt(-rho^2 / (2 ln u))`) families; monotone bisection on `h`
    /// otherwise. Returns 0 for `rho = 0` (accepted at any scale) and
    /// infinity when no finite scale achieves the ratio (`u = 1` with a
    /// non-flat kernel and `rho > 0`).
    pub fn min_scale_to_accept(self, rho: f64, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::InvalidAcceptanceDraw(u));
        }
        if rho < 0.0 {
            return Err(Error::Domain(format!("distance must be >= 0, got {rho}")));
        }
        if rho == 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::Uniform => Ok(rho),
            Self::Gaussian => {
                if u == 1.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok((-rho * rho / (2.0 * u.ln())).sqrt())
                }
            }
            _ => self.bisect_min_scale(rho, u),
        }
    }

    // Solve K(rho/h)/K(0) = u for the smallest such h. The ratio is
    // continuous and non-decreasing in h for every compact family here, so
    // plain bisection on the predicate `ratio >= u` converges to the
    // infimum. The initial bracket [rho, rho * 1e6] is widened if needed.
    fn bisect_min_scale(self, rho: f64, u: f64) -> Result<f64> {
        let ratio = |h: f64| self.eval_base(rho / h) / self.eval_base(0.0);
        let mut lo = rho;
        let mut hi = rho * 1e6;
        if ratio(lo) >= u {
            return Ok(lo);
        }
        while ratio(hi) < u {
            hi *= 1e3;
            if !hi.is_finite() {
                return Ok(f64::INFINITY);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use proptest::prelude::*;

    #[test]
    fn base_values() {
        assert_eq!(SmoothingKernel::Uniform.eval_base(0.5), 0.5);
        assert!((SmoothingKernel::Gaussian.eval_base(0.0) - 0.3989422804014327).abs() < 1e-12);
        assert_eq!(SmoothingKernel::Epanechnikov.eval_base(1.2), 0.0);
        assert_eq!(SmoothingKernel::Triangular.eval_base(-0.25), 0.75);
        assert!((SmoothingKernel::Biweight.eval_base(0.0) - 15.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_values() {
        assert_eq!(SmoothingKernel::Uniform.eval_scaled(2.0, 1.0).unwrap(), 0.25);
        assert!(
            (SmoothingKernel::Gaussian.eval_scaled(0.5, 0.0).unwrap() - 0.7978845608028654).abs()
                < 1e-12
        );
        assert_eq!(
            SmoothingKernel::Triangular.eval_scaled(1.0, 0.25).unwrap(),
            0.75
        );
        assert!(matches!(
            SmoothingKernel::Uniform.eval_scaled(0.0, 0.1),
            Err(Error::InvalidScale(_))
        ));
        assert!(matches!(
            SmoothingKernel::Uniform.eval_scaled(-1.0, 0.1),
            Err(Error::InvalidScale(_))
        ));
    }

    #[test]
    fn scaled_density_integrates_to_one() {
        for kernel in SmoothingKernel::ALL {
            for h in [0.1, 1.0, 10.0] {
                let lim = if kernel.is_compact() { h } else { 14.0 * h };
                let mass = integrate(
                    &|u| kernel.eval_scaled(h, u).unwrap(),
                    -lim,
                    lim,
                    1e-10,
                )
                .unwrap();
                assert!(
                    (mass - 1.0).abs() < 1e-6,
                    "{} h={h}: mass {mass}",
                    kernel.name()
                );
            }
        }
    }

    #[test]
    fn acceptance_ratio_values() {
        assert_eq!(
            SmoothingKernel::Uniform.acceptance_ratio(1.0, 0.9).unwrap(),
            1.0
        );
        assert_eq!(
            SmoothingKernel::Uniform.acceptance_ratio(1.0, 1.1).unwrap(),
            0.0
        );
        assert!(
            (SmoothingKernel::Gaussian.acceptance_ratio(1.0, 1.0).unwrap()
                - (-0.5f64).exp())
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn variance_matches_quadrature() {
        for kernel in SmoothingKernel::ALL {
            let lim = if kernel.is_compact() { 1.0 } else { 16.0 };
            let second = integrate(&|u| u * u * kernel.eval_base(u), -lim, lim, 1e-11).unwrap();
            assert!(
                (second - kernel.variance()).abs() < 1e-8,
                "{}: {second} vs {}",
                kernel.name(),
                kernel.variance()
            );
        }
    }

    #[test]
    fn min_scale_closed_forms() {
        assert_eq!(
            SmoothingKernel::Uniform.min_scale_to_accept(0.3, 0.7).unwrap(),
            0.3
        );
        let h = SmoothingKernel::Gaussian
            .min_scale_to_accept(1.0, (-2.0f64).exp())
            .unwrap();
        assert!((h - 0.5).abs() < 1e-12);
        for kernel in SmoothingKernel::ALL {
            assert_eq!(kernel.min_scale_to_accept(0.0, 0.37).unwrap(), 0.0);
        }
        assert!(matches!(
            SmoothingKernel::Uniform.min_scale_to_accept(0.3, 0.0),
            Err(Error::InvalidAcceptanceDraw(_))
        ));
    }

    #[test]
    fn min_scale_bisection_matches_algebra() {
        // Triangular: ratio = 1 - rho/h  =>  h = rho / (1 - u).
        let h = SmoothingKernel::Triangular.min_scale_to_accept(0.4, 0.25).unwrap();
        assert!((h - 0.4 / 0.75).abs() < 1e-9 * h);
        // Epanechnikov: ratio = 1 - (rho/h)^2  =>  h = rho / sqrt(1 - u).
        let h = SmoothingKernel::Epanechnikov.min_scale_to_accept(0.4, 0.25).unwrap();
        assert!((h - 0.4 / 0.75f64.sqrt()).abs() < 1e-9 * h);
        // Biweight: ratio = (1 - (rho/h)^2)^2  =>  h = rho / sqrt(1 - sqrt(u)).
        let h = SmoothingKernel::Biweight.min_scale_to_accept(0.4, 0.25).unwrap();
        assert!((h - 0.4 / 0.5f64.sqrt()).abs() < 1e-9 * h);
    }

    proptest! {
        #[test]
        fn ratio_non_increasing_in_rho(
            kernel_idx in 0usize..5,
            h in 1e-3f64..1e3,
            rho in 0.0f64..10.0,
            bump in 1e-6f64..5.0,
        ) {
            let kernel = SmoothingKernel::ALL[kernel_idx];
            let near = kernel.acceptance_ratio(h, rho).unwrap();
            let far = kernel.acceptance_ratio(h, rho + bump).unwrap();
            prop_assert!(far <= near + 1e-12);
            prop_assert!((kernel.acceptance_ratio(h, 0.0).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ratio_equals_rescaled_base(
            kernel_idx in 0usize..5,
            h in 1e-3f64..1e3,
            rho in 0.0f64..10.0,
        ) {
            let kernel = SmoothingKernel::ALL[kernel_idx];
            let lhs = kernel.acceptance_ratio(h, rho).unwrap();
            let rhs = kernel.eval_base(rho / h) / kernel.eval_base(0.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn min_scale_round_trip(
            kernel_idx in 0usize..5,
            rho in 1e-3f64..10.0,
            u in 1e-3f64..0.999,
        ) {
            let kernel = SmoothingKernel::ALL[kernel_idx];
            let h = kernel.min_scale_to_accept(rho, u).unwrap();
            prop_assert!(kernel.acceptance_ratio(h, rho).unwrap() >= u - 1e-9);
            // Continuous-ratio kernels achieve the ratio with near equality.
            if kernel != SmoothingKernel::Uniform {
                prop_assert!((kernel.acceptance_ratio(h, rho).unwrap() - u).abs() < 1e-9);
            }
        }
    }
}
