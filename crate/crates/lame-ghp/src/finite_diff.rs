//! Fourth-order central finite differences of complex vector fields on the plane.
//!
//! These stencils are the independent differentiation path used to check the
//! analytic gradients, the Lamé residual and the Helmholtz split.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::Result;

/// Complex 2-vector.
pub type CVec2 = Vector2<Complex64>;
/// Complex 2x2 matrix.
pub type CMat2 = Matrix2<Complex64>;

/// Second partial derivatives of a vector field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivatives {
    /// `∂₁∂₁ u`.
    pub xx: CVec2,
    /// `∂₂∂₂ u`.
    pub yy: CVec2,
    /// `∂₁∂₂ u`.
    pub xy: CVec2,
}

/// Jacobian with entries `(i, j) = ∂_j u_i` from the five-point stencil
/// `(-f₂ + 8f₁ - 8f₋₁ + f₋₂) / (12h)` along each axis.
///
/// # Errors
/// Propagates failures of `field`.
pub fn jacobian<F>(field: F, x: [f64; 2], step: f64) -> Result<CMat2>
where
    F: Fn([f64; 2]) -> Result<CVec2>,
{
    let mut jac = CMat2::zeros();
    for axis in 0..2 {
        let shifted = |offset: f64| {
            let mut y = x;
            y[axis] += offset;
            field(y)
        };
        let d = (shifted(-2.0 * step)? - shifted(2.0 * step)?
            + (shifted(step)? - shifted(-step)?).scale(8.0))
        .unscale(12.0 * step);
        jac.set_column(axis, &d);
    }
    Ok(jac)
}

/// Directional derivative `(d·∇) u` from the five-point stencil.
///
/// # Errors
/// Propagates failures of `field`.
pub fn directional<F>(field: F, x: [f64; 2], direction: [f64; 2], step: f64) -> Result<CVec2>
where
    F: Fn([f64; 2]) -> Result<CVec2>,
{
    let at = |t: f64| field([x[0] + t * direction[0], x[1] + t * direction[1]]);
    Ok(
        (at(-2.0 * step)? - at(2.0 * step)? + (at(step)? - at(-step)?).scale(8.0))
            .unscale(12.0 * step),
    )
}

fn mixed_estimate<F>(field: &F, x: [f64; 2], h: f64) -> Result<CVec2>
where
    F: Fn([f64; 2]) -> Result<CVec2>,
{
    let at = |dx: f64, dy: f64| field([x[0] + dx, x[1] + dy]);
    Ok((at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?).unscale(4.0 * h * h))
}

/// Second derivatives from the stencil `(-f₂ + 16f₁ - 30f₀ + 16f₋₁ - f₋₂) / (12h²)`
/// on each axis and a Richardson-extrapolated mixed difference
/// `(4D(h) - D(2h)) / 3`.
///
/// # Errors
/// Propagates failures of `field`.
pub fn second_derivatives<F>(field: F, x: [f64; 2], step: f64) -> Result<SecondDerivatives>
where
    F: Fn([f64; 2]) -> Result<CVec2>,
{
    let centre = field(x)?;
    let pure = |axis: usize| -> Result<CVec2> {
        let shifted = |offset: f64| {
            let mut y = x;
            y[axis] += offset;
            field(y)
        };
        Ok(((shifted(step)? + shifted(-step)?).scale(16.0)
            - shifted(2.0 * step)?
            - shifted(-2.0 * step)?
            - centre.scale(30.0))
        .unscale(12.0 * step * step))
    };
    let xx = pure(0)?;
    let yy = pure(1)?;
    let xy = (mixed_estimate(&field, x, step)?.scale(4.0) - mixed_estimate(&field, x, 2.0 * step)?)
        .unscale(3.0);
    Ok(SecondDerivatives { xx, yy, xy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(x: [f64; 2]) -> Result<CVec2> {
        let i = Complex64::i();
        Ok(CVec2::new(
            (i * (0.7 * x[0] - 0.4 * x[1])).exp(),
            Complex64::new(x[0] * x[0] * x[1], x[1].sin()),
        ))
    }

    #[test]
    fn jacobian_of_smooth_field() {
        let x = [0.3, -0.2];
        let jac = jacobian(sample, x, 1e-3).unwrap();
        let i = Complex64::i();
        let phase = (i * (0.7 * x[0] - 0.4 * x[1])).exp();
        assert!((jac[(0, 0)] - i * 0.7 * phase).norm() < 1e-11);
        assert!((jac[(0, 1)] + i * 0.4 * phase).norm() < 1e-11);
        assert!((jac[(1, 0)] - Complex64::new(2.0 * x[0] * x[1], 0.0)).norm() < 1e-11);
        assert!((jac[(1, 1)] - Complex64::new(x[0] * x[0], x[1].cos())).norm() < 1e-11);
        let d = directional(sample, x, [0.6, 0.8], 1e-3).unwrap();
        let expected = jac.column(0).scale(0.6) + jac.column(1).scale(0.8);
        assert!((d - expected).norm() < 1e-11);
    }

    #[test]
    fn second_derivatives_of_smooth_field() {
        let x = [0.3, -0.2];
        let d = second_derivatives(sample, x, 1e-3).unwrap();
        assert!((d.xx[1] - Complex64::new(2.0 * x[1], 0.0)).norm() < 1e-8);
        assert!((d.yy[1] - Complex64::new(0.0, -x[1].sin())).norm() < 1e-8);
        assert!((d.xy[1] - Complex64::new(2.0 * x[0], 0.0)).norm() < 1e-8);
        let phase = (Complex64::i() * (0.7 * x[0] - 0.4 * x[1])).exp();
        assert!((d.xy[0] - phase * 0.28).norm() < 1e-8);
    }
}
