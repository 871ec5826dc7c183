//! Adaptive Simpson quadrature, scalar and jet-valued.

use crate::error::{Error, Result};
use crate::jet::Jet;

pub const REL_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;

/// Integrate a scalar function over [a, b] to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().max(1e-8);
    rec(f, a, fa, b, fb, m, fm, whole, rel_tol * scale, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn rec<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || depth == 0 {
        if depth == 0 && err.abs() > 15.0 * tol.max(1e-9) {
            return Err(Error::Quadrature(format!(
                "max depth reached on [{a}, {b}], err {err:.3e}"
            )));
        }
        return Ok(left + right + err / 15.0);
    }
    Ok(rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)?
        + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)?)
}

/// Integrate a jet-valued function componentwise over [a, b].
/// Convergence is controlled on the max coefficient norm.
pub fn integrate_jet<F: Fn(f64) -> Result<Jet>>(
    f: &F,
    a: f64,
    b: f64,
    order: usize,
    rel_tol: f64,
) -> Result<Jet> {
    if a == b {
        return Ok(Jet::constant(0.0, order));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = jsimpson(a, b, &fa, &fm, &fb, order);
    let scale = whole.max_abs_coeff().max(1e-8);
    jrec(
        f,
        a,
        &fa,
        b,
        &fb,
        m,
        &fm,
        &whole,
        order,
        rel_tol * scale,
        MAX_DEPTH,
    )
}

fn jsimpson(a: f64, b: f64, fa: &Jet, fm: &Jet, fb: &Jet, order: usize) -> Jet {
    let h = (b - a) / 6.0;
    let mut out = Jet::constant(0.0, order);
    out.axpy(h, fa);
    out.axpy(4.0 * h, fm);
    out.axpy(h, fb);
    out
}

#[allow(clippy::too_many_arguments)]
fn jrec<F: Fn(f64) -> Result<Jet>>(
    f: &F,
    a: f64,
    fa: &Jet,
    b: f64,
    fb: &Jet,
    m: f64,
    fm: &Jet,
    whole: &Jet,
    order: usize,
    tol: f64,
    depth: u32,
) -> Result<Jet> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = jsimpson(a, m, fa, &flm, fm, order);
    let right = jsimpson(m, b, fm, &frm, fb, order);
    let mut sum = left;
    sum.axpy(1.0, &right);
    let err = sum.dist(whole);
    if err <= 15.0 * tol || depth == 0 {
        if depth == 0 && err > 15.0 * tol.max(1e-9) {
            return Err(Error::Quadrature(format!(
                "max depth reached on [{a}, {b}], err {err:.3e}"
            )));
        }
        let mut refined = sum;
        refined.axpy(1.0 / 15.0, &sum);
        refined.axpy(-1.0 / 15.0, whole);
        return Ok(refined);
    }
    let l = jrec(f, a, fa, m, fm, lm, &flm, &left, order, tol / 2.0, depth - 1)?;
    let r = jrec(f, m, fm, b, fb, rm, &frm, &right, order, tol / 2.0, depth - 1)?;
    let mut out = l;
    out.axpy(1.0, &r);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential() {
        let v = integrate(&|x: f64| Ok(x.exp()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn jet_integral_matches_leibniz() {
        // I(x) = int_0^1 sin(x t) dt; dI/dx = int t cos(x t) dt
        let x0 = 0.7;
        let f = |t: f64| {
            let x = Jet::variable(x0, 0, 2);
            Ok(x.scale(t).sin())
        };
        let jet = integrate_jet(&f, 0.0, 1.0, 2, 1e-12).unwrap();
        let exact = (1.0 - x0.cos()) / x0;
        let dexact = (x0.sin() - (1.0 - x0.cos()) / x0) / x0;
        assert!((jet.value() - exact).abs() < 1e-11);
        assert!((jet.partial([1, 0, 0, 0]) - dexact).abs() < 1e-10);
    }
}
