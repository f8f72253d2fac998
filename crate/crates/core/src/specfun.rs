//! Complex log-Gamma and the Gauss hypergeometric function on the real
//! arguments reached by the chart solutions: `z <= 1/2`, and `z = 1` when the
//! Gauss sum converges.
//!
//! `2F1` is evaluated by summing one or more Maclaurin series. Several exact
//! representations are available for most arguments (direct series, the two
//! Pfaff transformations, and their `w -> 1 - w` or `z -> 1/z` connection
//! formulas). With large imaginary parameters a single representation can
//! lose many digits to cancellation, so every applicable route is summed and
//! the one with the smallest condition estimate `sum |term| / |value|` wins.

use crate::{Complex, Error, Result};

/// `ln sqrt(2 pi)`.
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling-series coefficients `B_{2k} / (2k (2k - 1))`, k = 1..=10, from the
/// Bernoulli numbers B_2 = 1/6 through B_20 = -174611/330.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this real part the argument is shifted up by the recurrence before
/// the Stirling series is applied. The first omitted term is below 1e-20.
const STIRLING_MIN_RE: f64 = 10.0;

/// Principal branch of `ln Gamma(z)`, continuous off the negative real axis.
pub fn log_gamma(z: Complex) -> Result<Complex> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma({z})")));
    }
    if is_non_positive_integer(z) {
        return Err(Error::Pole(z));
    }
    // ln Gamma(z) = ln Gamma(z + n) - sum_{k<n} ln(z + k). Summing principal
    // logarithms keeps the result on the principal branch.
    let mut shift = Complex::new(0.0, 0.0);
    let mut x = z;
    while x.re < STIRLING_MIN_RE {
        shift += x.ln();
        x += 1.0;
    }
    let inv = x.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(0.0, 0.0);
    let mut power = inv;
    for coeff in STIRLING {
        series += power * coeff;
        power *= inv2;
    }
    Ok((x - 0.5) * x.ln() - x + LN_SQRT_2PI + series - shift)
}

pub fn gamma(z: Complex) -> Result<Complex> {
    Ok(log_gamma(z)?.exp())
}

fn is_non_positive_integer(z: Complex) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn is_integer(z: Complex) -> bool {
    z.im == 0.0 && z.re == z.re.round()
}

/// `prod Gamma(num) / prod Gamma(den)`; zero when a denominator argument sits
/// on a pole.
fn gamma_ratio(num: &[Complex], den: &[Complex]) -> Result<Complex> {
    if den.iter().any(|&d| is_non_positive_integer(d)) {
        for &n in num {
            log_gamma(n)?;
        }
        return Ok(Complex::new(0.0, 0.0));
    }
    let mut acc = Complex::new(0.0, 0.0);
    for &n in num {
        acc += log_gamma(n)?;
    }
    for &d in den {
        acc -= log_gamma(d)?;
    }
    Ok(acc.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Stop once a term falls below this fraction of the partial sum.
    pub tolerance: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            max_terms: 100_000,
            tolerance: 1e-14,
        }
    }
}

/// Arguments of `2F1(a, b; c; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypArgs {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub z: Complex,
}

impl HypArgs {
    pub fn new(a: Complex, b: Complex, c: Complex, z: f64) -> Self {
        Self {
            a,
            b,
            c,
            z: Complex::new(z, 0.0),
        }
    }

    pub fn max_parameter_norm(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm())
    }
}

/// The representation a value was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `z = 0`, or `a` or `b` vanishes.
    Trivial,
    Maclaurin,
    /// `(1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`.
    PfaffA,
    /// `(1-z)^{-b} 2F1(c-a, b; c; z/(z-1))`.
    PfaffB,
    /// Pfaff A, then the `w -> 1-w` connection formula.
    PfaffAReflected,
    PfaffBReflected,
    /// The `z -> 1/z` connection formula.
    Reciprocal,
    GaussSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Eval {
    pub value: Complex,
    /// `sum |terms| / |value|` over every series that contributed; the
    /// expected relative error is about this times machine epsilon.
    pub condition: f64,
    pub route: Route,
}

/// Result of summing one Maclaurin series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex,
    /// `sum |term_n|`, including the leading 1.
    pub abs_sum: f64,
    pub terms: usize,
}

/// Direct Maclaurin sum of `2F1(a, b; c; z)` for real `|z| < 1`.
pub fn hyp2f1_series(
    a: Complex,
    b: Complex,
    c: Complex,
    z: f64,
    cfg: &SeriesConfig,
) -> Result<SeriesSum> {
    if is_non_positive_integer(c) {
        return Err(Error::Pole(c));
    }
    if z.abs() >= 1.0 || !z.is_finite() {
        return Err(Error::Domain(format!(
            "Maclaurin series needs |z| < 1, got {z}"
        )));
    }
    let mut term = Complex::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    // Past this index |a + n|, |b + n| and |c + n| grow monotonically, so a
    // small term cannot be an accident of a near-cancelling factor.
    let settle = (-a.re).max(-b.re).max(-c.re).max(0.0).ceil() as usize + 1;
    let mut quiet = 0;
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        let size = term.norm();
        abs_sum += size;
        if size == 0.0 {
            // a or b is a non-positive integer: the series is a polynomial.
            return Ok(SeriesSum {
                value: sum,
                abs_sum,
                terms: n + 1,
            });
        }
        let small = size <= cfg.tolerance * sum.norm().max(f64::EPSILON * abs_sum);
        if n >= settle && ratio.norm() < 1.0 && small {
            quiet += 1;
            if quiet == 2 {
                return Ok(SeriesSum {
                    value: sum,
                    abs_sum,
                    terms: n + 1,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence {
        terms: cfg.max_terms,
    })
}

pub fn hyp2f1(args: HypArgs) -> Result<Complex> {
    Ok(hyp2f1_with(args, &SeriesConfig::default())?.value)
}

/// `d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z)`.
pub fn hyp2f1_derivative(args: HypArgs) -> Result<Complex> {
    Ok(hyp2f1_derivative_with(args, &SeriesConfig::default())?.value)
}

pub fn hyp2f1_derivative_with(args: HypArgs, cfg: &SeriesConfig) -> Result<Hyp2f1Eval> {
    let HypArgs { a, b, c, z } = args;
    if is_non_positive_integer(c) {
        return Err(Error::Pole(c));
    }
    if a == Complex::new(0.0, 0.0) || b == Complex::new(0.0, 0.0) {
        return Ok(Hyp2f1Eval {
            value: Complex::new(0.0, 0.0),
            condition: 1.0,
            route: Route::Trivial,
        });
    }
    let inner = hyp2f1_with(
        HypArgs {
            a: a + 1.0,
            b: b + 1.0,
            c: c + 1.0,
            z,
        },
        cfg,
    )?;
    Ok(Hyp2f1Eval {
        value: inner.value * a * b / c,
        ..inner
    })
}

pub fn hyp2f1_with(args: HypArgs, cfg: &SeriesConfig) -> Result<Hyp2f1Eval> {
    let HypArgs { a, b, c, z } = args;
    for v in [a, b, c, z] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite argument {v}")));
        }
    }
    if z.im != 0.0 {
        return Err(Error::Domain(format!("complex argument z = {z}")));
    }
    if is_non_positive_integer(c) {
        return Err(Error::Pole(c));
    }
    let x = z.re;
    let zero = Complex::new(0.0, 0.0);
    if x == 0.0 || a == zero || b == zero {
        return Ok(Hyp2f1Eval {
            value: Complex::new(1.0, 0.0),
            condition: 1.0,
            route: Route::Trivial,
        });
    }
    if x == 1.0 {
        return gauss_sum(a, b, c);
    }
    if x > 0.5 {
        return Err(Error::Domain(format!(
            "z = {x} in (1/2, 1) or beyond 1 is not supported"
        )));
    }

    let mut best: Option<Hyp2f1Eval> = None;
    let mut first_err: Option<Error> = None;
    let mut consider = |candidate: Result<Hyp2f1Eval>| match candidate {
        Ok(ev) if ev.value.re.is_finite() && ev.value.im.is_finite() => {
            if best.as_ref().map(|b| ev.condition < b.condition) != Some(false) {
                best = Some(ev);
            }
        }
        Ok(_) => {}
        Err(e) => {
            first_err.get_or_insert(e);
        }
    };

    if x.abs() <= 0.5 {
        consider(hyp2f1_series(a, b, c, x, cfg).map(|s| from_series(s, Route::Maclaurin)));
    }
    if x < 0.0 {
        let w = x / (x - 1.0);
        let scale_a = Complex::new(1.0 - x, 0.0).powc(-a);
        let scale_b = Complex::new(1.0 - x, 0.0).powc(-b);
        // Both connection formulas break down when a - b is an integer; the
        // slowly converging direct series is the fallback.
        let degenerate = is_integer(a - b);
        let pfaff = [
            (a, c - b, scale_a, Route::PfaffA, Route::PfaffAReflected),
            (c - a, b, scale_b, Route::PfaffB, Route::PfaffBReflected),
        ];
        for (pa, pb, scale, direct, reflected) in pfaff {
            if w <= 2.0 / 3.0 || degenerate {
                consider(
                    hyp2f1_series(pa, pb, c, w, cfg).map(|s| scaled(from_series(s, direct), scale)),
                );
            }
            if w >= 1.0 / 3.0 {
                consider(reflect(pa, pb, c, w, cfg).map(|ev| {
                    scaled(
                        Hyp2f1Eval {
                            route: reflected,
                            ..ev
                        },
                        scale,
                    )
                }));
            }
        }
    }
    if x <= -2.0 {
        consider(reciprocal(a, b, c, x, cfg));
    }
    match (best, first_err) {
        (Some(ev), _) => Ok(ev),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::Domain(format!("no route for z = {x}"))),
    }
}

fn from_series(s: SeriesSum, route: Route) -> Hyp2f1Eval {
    Hyp2f1Eval {
        value: s.value,
        condition: s.abs_sum / s.value.norm(),
        route,
    }
}

fn scaled(ev: Hyp2f1Eval, factor: Complex) -> Hyp2f1Eval {
    Hyp2f1Eval {
        value: ev.value * factor,
        ..ev
    }
}

/// `2F1(a,b;c;1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))`.
fn gauss_sum(a: Complex, b: Complex, c: Complex) -> Result<Hyp2f1Eval> {
    let s = c - a - b;
    if s.re <= 0.0 {
        return Err(Error::Domain(format!(
            "Gauss sum at z = 1 needs Re(c - a - b) > 0, got {}",
            s.re
        )));
    }
    let value = gamma_ratio(&[c, s], &[c - a, c - b])?;
    Ok(Hyp2f1Eval {
        value,
        condition: 1.0,
        route: Route::GaussSum,
    })
}

/// Connection between `w` and `1 - w`:
///
/// `2F1(a,b;c;w) = G1 2F1(a,b;a+b-c+1;1-w) + G2 (1-w)^{c-a-b} 2F1(c-a,c-b;c-a-b+1;1-w)`
///
/// with `G1 = Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b))` and
/// `G2 = Gamma(c)Gamma(a+b-c)/(Gamma(a)Gamma(b))`. Needs `c-a-b` non-integer.
fn reflect(a: Complex, b: Complex, c: Complex, w: f64, cfg: &SeriesConfig) -> Result<Hyp2f1Eval> {
    let s = c - a - b;
    if is_integer(s) {
        return Err(Error::Domain("c - a - b is an integer".into()));
    }
    let g1 = gamma_ratio(&[c, s], &[c - a, c - b])?;
    let g2 = gamma_ratio(&[c, -s], &[a, b])? * Complex::new(1.0 - w, 0.0).powc(s);
    let mut value = Complex::new(0.0, 0.0);
    let mut abs = 0.0;
    if g1 != Complex::new(0.0, 0.0) {
        let s1 = hyp2f1_series(a, b, 1.0 - s, 1.0 - w, cfg)?;
        value += g1 * s1.value;
        abs += g1.norm() * s1.abs_sum;
    }
    if g2 != Complex::new(0.0, 0.0) {
        let s2 = hyp2f1_series(c - a, c - b, s + 1.0, 1.0 - w, cfg)?;
        value += g2 * s2.value;
        abs += g2.norm() * s2.abs_sum;
    }
    Ok(Hyp2f1Eval {
        value,
        condition: abs / value.norm(),
        route: Route::PfaffAReflected,
    })
}

/// Connection between `z` and `1/z` for `z < -1`:
///
/// `2F1(a,b;c;z) = Gamma(c)Gamma(b-a)/(Gamma(b)Gamma(c-a)) (-z)^{-a} 2F1(a, a-c+1; a-b+1; 1/z)`
/// `             + (a <-> b)`.
fn reciprocal(
    a: Complex,
    b: Complex,
    c: Complex,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<Hyp2f1Eval> {
    if is_integer(b - a) {
        return Err(Error::Domain("b - a is an integer".into()));
    }
    let mz = Complex::new(-x, 0.0);
    let inv = 1.0 / x;
    let mut value = Complex::new(0.0, 0.0);
    let mut abs = 0.0;
    for (p, r) in [(a, b), (b, a)] {
        let g = gamma_ratio(&[c, r - p], &[r, c - p])? * mz.powc(-p);
        if g == Complex::new(0.0, 0.0) {
            continue;
        }
        let s = hyp2f1_series(p, p - c + 1.0, p - r + 1.0, inv, cfg)?;
        value += g * s.value;
        abs += g.norm() * s.abs_sum;
    }
    Ok(Hyp2f1Eval {
        value,
        condition: abs / value.norm(),
        route: Route::Reciprocal,
    })
}
