//! Bessel functions of the first kind of integer order, their exact ascending
//! series coefficients, and the Gamma function on the half-integer lattice.
//!
//! `J_m(t)` is summed from the ascending series for `t <= SERIES_CUTOFF`, where
//! the alternating terms stay below roughly `e^t / t` and cancellation costs at
//! most a few digits. Larger arguments (up to [`BESSEL_T_MAX`]) use Miller's
//! backward recurrence normalised by `J_0 + 2 Σ J_{2k} = 1`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Upper end of the supported argument interval `[0, t_max]`.
pub const BESSEL_T_MAX: f64 = 50.0;

/// Largest `order + index` for which exact series coefficients are produced.
pub const EXACT_COEFFICIENT_LIMIT: u32 = 40;

/// Arguments up to this value are summed from the ascending series.
const SERIES_CUTOFF: f64 = 8.0;

/// Relative stopping threshold for the ascending series.
const SERIES_STOP: f64 = 1e-18;

/// Largest `n` with finite `Γ(n)` in double precision.
const GAMMA_INT_MAX: u32 = 171;

fn check_argument(t: f64) -> Result<()> {
    if !(0.0..=BESSEL_T_MAX).contains(&t) {
        return Err(Error::BesselDomain {
            value: t,
            max: BESSEL_T_MAX,
        });
    }
    Ok(())
}

/// Sign `(-1)^n` for an integer exponent.
fn parity_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 }
}

/// Ascending series of `J_m(t)` for `m >= 0` with adaptive term count.
fn series_j(m: u32, t: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * t;
    let mut term = 1.0;
    for j in 1..=m {
        term *= half / f64::from(j);
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 1u32;
    loop {
        let denom = f64::from(k) * f64::from(m + k);
        term *= -q / denom;
        sum += term;
        if denom > q && term.abs() <= SERIES_STOP * sum.abs() {
            break;
        }
        if term == 0.0 {
            break;
        }
        k += 1;
    }
    sum
}

/// Miller backward recurrence returning `J_0(t) ..= J_{max_order}(t)` for `t > 0`.
fn miller_sequence(max_order: usize, t: f64) -> Vec<f64> {
    let reach = (max_order as f64).max(t);
    let mut start = (reach + 30.0 + (40.0 * reach).sqrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut values = vec![0.0; start + 2];
    values[start + 1] = 0.0;
    values[start] = 1e-300;
    for n in (1..=start).rev() {
        values[n - 1] = 2.0 * n as f64 / t * values[n] - values[n + 1];
        if values[n - 1].abs() > 1e250 {
            for v in values[n - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = values[0] + 2.0 * values.iter().skip(2).step_by(2).sum::<f64>();
    values.truncate(max_order + 1);
    values.iter_mut().for_each(|v| *v /= norm);
    values
}

/// Bessel function of the first kind `J_order(t)` for any integer order.
///
/// Negative orders use `J_{-m}(t) = (-1)^m J_m(t)`.
///
/// # Errors
/// [`Error::BesselDomain`] when `t < 0` or `t > BESSEL_T_MAX`.
pub fn bessel_j(order: i32, t: f64) -> Result<f64> {
    check_argument(t)?;
    let m = order.unsigned_abs();
    let value = if t <= SERIES_CUTOFF {
        series_j(m, t)
    } else {
        miller_sequence(m as usize, t)[m as usize]
    };
    Ok(if order < 0 {
        parity_sign(i64::from(m)) * value
    } else {
        value
    })
}

/// Values `J_0(t) ..= J_{max_order}(t)` computed in one pass.
///
/// # Errors
/// [`Error::BesselDomain`] when `t` is outside `[0, BESSEL_T_MAX]`.
pub fn bessel_j_orders(max_order: usize, t: f64) -> Result<Vec<f64>> {
    check_argument(t)?;
    if t <= SERIES_CUTOFF {
        Ok((0..=max_order as u32).map(|m| series_j(m, t)).collect())
    } else {
        Ok(miller_sequence(max_order, t))
    }
}

fn factorial_big(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

fn exact_coefficient(m: u32, k: u32) -> BigRational {
    let denom = (BigInt::one() << (m + 2 * k) as usize) * factorial_big(k) * factorial_big(m + k);
    let numer = if k.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    BigRational::new(numer, denom)
}

/// Exact coefficient of `t^{m+2k}` in `J_m(t)`: `(-1)^k / (2^{m+2k} k! (m+k)!)`.
///
/// # Errors
/// [`Error::CoefficientOverflow`] when `m + k > EXACT_COEFFICIENT_LIMIT`.
pub fn bessel_series_coefficient(m: u32, k: u32) -> Result<BigRational> {
    if m + k > EXACT_COEFFICIENT_LIMIT {
        return Err(Error::CoefficientOverflow {
            order: m,
            index: k,
            limit: EXACT_COEFFICIENT_LIMIT,
        });
    }
    Ok(exact_coefficient(m, k))
}

/// Rounded exact coefficients indexed by `[m][k]` for `m + k <= EXACT_COEFFICIENT_LIMIT`.
fn coefficient_table() -> &'static Vec<Vec<f64>> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=EXACT_COEFFICIENT_LIMIT)
            .map(|m| {
                (0..=EXACT_COEFFICIENT_LIMIT - m)
                    .map(|k| {
                        exact_coefficient(m, k)
                            .to_f64()
                            .expect("rational coefficient rounds to a finite double")
                    })
                    .collect()
            })
            .collect()
    })
}

/// Coefficient of `t^power` in `J_order(t)` rounded to double precision.
///
/// Zero unless `power >= |order|` and `power - |order|` is even. Within the
/// exact range the value is the rounded exact rational; beyond it the
/// coefficient is generated by the term ratio `-1/(4k(m+k))` in floating point.
pub fn bessel_power_coefficient(order: i32, power: u32) -> f64 {
    let m = order.unsigned_abs();
    if power < m || (power - m) % 2 == 1 {
        return 0.0;
    }
    let k = (power - m) / 2;
    let sign = if order < 0 {
        parity_sign(i64::from(m))
    } else {
        1.0
    };
    let magnitude = if m + k <= EXACT_COEFFICIENT_LIMIT {
        coefficient_table()[m as usize][k as usize]
    } else {
        let mut c = 1.0;
        for j in 1..=m {
            c *= 0.5 / f64::from(j);
        }
        for j in 1..=k {
            c *= -0.25 / (f64::from(j) * f64::from(m + j));
        }
        c
    };
    sign * magnitude
}

/// Truncated ascending series `J_m(t) = (t/2)^m Σ_k c_k (t/2)^{2k}` with
/// `c_k = (-1)^k / (k! (m+k)!)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselSeries {
    order: u32,
    coefficients: Vec<f64>,
}

impl BesselSeries {
    /// Series of `J_order` with `term_count` terms (at least one).
    pub fn new(order: u32, term_count: usize) -> Self {
        let term_count = term_count.max(1);
        let mut coefficients = Vec::with_capacity(term_count);
        let mut c = (1..=order).fold(1.0, |acc, j| acc / f64::from(j));
        for k in 0..term_count {
            if k > 0 {
                let k = k as f64;
                c *= -1.0 / (k * (f64::from(order) + k));
            }
            coefficients.push(c);
        }
        Self {
            order,
            coefficients,
        }
    }

    /// Order `m` of the represented Bessel function.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of retained terms.
    pub fn term_count(&self) -> usize {
        self.coefficients.len()
    }

    /// Coefficients `c_k` after factoring out `(t/2)^m`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Partial sum at `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        let half = 0.5 * t;
        let q = half * half;
        let inner = self
            .coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * q + c);
        half.powi(self.order as i32) * inner
    }

    /// Magnitude of the first omitted term at `t`.
    pub fn first_omitted_term(&self, t: f64) -> f64 {
        let k = self.coefficients.len();
        let next = BesselSeries::new(self.order, k + 1);
        next.coefficients[k].abs() * (0.5 * t).powi((self.order as usize + 2 * k) as i32)
    }

    /// Whether the omitted terms alternate with decreasing magnitude at `t`,
    /// which makes [`first_omitted_term`](Self::first_omitted_term) a rigorous
    /// truncation bound.
    pub fn is_alternating_regime(&self, t: f64) -> bool {
        let k = self.coefficients.len() as f64;
        0.25 * t * t < k * (f64::from(self.order) + k)
    }
}

/// `Γ(n) = (n-1)!` for integer `n >= 1`.
///
/// # Errors
/// [`Error::Precondition`] for `n = 0`; [`Error::GammaOverflow`] for `n > 170`.
pub fn gamma_int(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("Gamma(n) requires n >= 1".into()));
    }
    if n >= GAMMA_INT_MAX {
        return Err(Error::GammaOverflow {
            argument: f64::from(n),
        });
    }
    Ok((1..n).fold(1.0, |acc, j| acc * f64::from(j)))
}

/// `Γ(x)` for `x` a positive integer or half-integer.
///
/// # Errors
/// [`Error::Precondition`] when `2x` is not a positive integer;
/// [`Error::GammaOverflow`] when the value exceeds double precision.
pub fn gamma_half_integer(x: f64) -> Result<f64> {
    let twice = 2.0 * x;
    if !(twice >= 1.0 && (twice - twice.round()).abs() < 1e-12) {
        return Err(Error::Precondition(format!(
            "Gamma is provided on the half-integer lattice only, got {x}"
        )));
    }
    let twice = twice.round() as u32;
    if twice.is_multiple_of(2) {
        return gamma_int(twice / 2);
    }
    if twice / 2 >= GAMMA_INT_MAX {
        return Err(Error::GammaOverflow { argument: x });
    }
    let mut value = std::f64::consts::PI.sqrt();
    let mut y = 0.5;
    while y + 0.5 < x {
        value *= y;
        y += 1.0;
    }
    Ok(value)
}
