//! Adaptive one-dimensional quadrature.
//!
//! Gauss–Kronrod 7–15 panels refined by interval bisection. The embedded
//! 7-point Gauss rule provides the error estimate for each panel.

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1] side of [-1, 1] (symmetric).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
// Gauss weights for Kronrod abscissae 1, 3, 5 and the centre point.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod 7–15 panel on `[a, b]`: returns (estimate, error estimate).
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(centre - x) + f(centre + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }

    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// Panel bisection continues until the summed error estimate falls below
/// `rel_tol * |integral|`. Fails if the tolerance is unreachable within
/// the panel budget. Integrals expected to be near zero need
/// [`integrate_with`] and an absolute tolerance instead.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    integrate_with(f, a, b, rel_tol, 0.0)
}

/// [`integrate`] with an additional absolute error target; refinement
/// stops once either tolerance is met.
pub fn integrate_with<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature limits must be finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }

    const MAX_PANELS: usize = 4096;
    let mut panels = vec![{
        let (v, e) = gk15(f, a, b);
        (a, b, v, e)
    }];

    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let target = (rel_tol * total.abs()).max(abs_tol).max(1e-300);
        if err <= target {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureTolerance {
                achieved: err / total.abs().max(1e-300),
                requested: rel_tol,
            });
        }
        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(f, pa, mid);
        let (v2, e2) = gk15(f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_density_mass() {
        let v = integrate(
            &|x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -10.0,
            10.0,
            1e-12,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kinked_integrand_converges() {
        // |x| has a corner at 0; bisection should still hit the tolerance.
        let v = integrate(&|x: f64| x.abs(), -1.0, 2.0, 1e-10).unwrap();
        assert!((v - 2.5).abs() < 1e-9);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(&|_| 1.0, 1.5, 1.5, 1e-9).unwrap(), 0.0);
    }
}
