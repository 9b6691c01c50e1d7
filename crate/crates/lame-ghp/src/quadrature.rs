//! Composite Gauss–Legendre rules for complex-valued integrands.

use std::num::NonZeroUsize;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule of a fixed order, reusable on any interval.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    order: usize,
    /// Nodes and weights on `[-1, 1]`.
    pairs: Vec<(f64, f64)>,
}

impl GaussLegendre {
    /// Rule with `order` nodes.
    ///
    /// # Errors
    /// [`Error::Precondition`] for `order < 2`.
    pub fn new(order: usize) -> Result<Self> {
        let nodes = NonZeroUsize::new(order)
            .filter(|n| n.get() >= 2)
            .ok_or_else(|| {
                Error::Precondition(format!("quadrature order must be >= 2, got {order}"))
            })?;
        let rule = gauss_quad::GaussLegendre::new(nodes);
        Ok(Self {
            order,
            pairs: rule.as_node_weight_pairs().to_vec(),
        })
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `∫_a^b f`.
    ///
    /// # Errors
    /// Propagates failures of `f`.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut sum = Complex64::default();
        for &(x, w) in &self.pairs {
            sum += f(mid + half * x)? * w;
        }
        Ok(sum * half)
    }

    /// `∫_a^b f` over `panels` equal panels.
    ///
    /// # Errors
    /// Propagates failures of `f`.
    pub fn integrate_uniform<F>(&self, a: f64, b: f64, panels: usize, mut f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut sum = Complex64::default();
        for k in 0..panels {
            let lo = a + k as f64 * width;
            sum += self.integrate(lo, lo + width, &mut f)?;
        }
        Ok(sum)
    }

    /// `∫_0^b f` over panels with breakpoints `b·2^{-j}`, `j = 0..panels`,
    /// refining towards the origin where the integrands concentrate.
    ///
    /// # Errors
    /// Propagates failures of `f`.
    pub fn integrate_graded<F>(&self, b: f64, panels: usize, mut f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let panels = panels.max(1);
        let mut hi = b;
        let mut sum = Complex64::default();
        for _ in 1..panels {
            let lo = 0.5 * hi;
            sum += self.integrate(lo, hi, &mut f)?;
            hi = lo;
        }
        sum += self.integrate(0.0, hi, &mut f)?;
        Ok(sum)
    }
}
