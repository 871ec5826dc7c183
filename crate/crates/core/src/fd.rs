//! Central finite differences with one Richardson level.
//!
//! This backend exists as an independent oracle for the jet engine in tests;
//! production paths never use it.

use crate::error::Result;
use crate::field::{Field, Point};

pub const STEP: f64 = 1e-4;

fn shift(p: Point, d: usize, h: f64) -> Point {
    let mut q = p;
    q.0[d] += h;
    q
}

/// Central first derivative with Richardson extrapolation.
pub fn d1(f: &Field, p: Point, d: usize, h: f64) -> Result<f64> {
    let c = |h: f64| -> Result<f64> {
        Ok((f.eval(shift(p, d, h))? - f.eval(shift(p, d, -h))?) / (2.0 * h))
    };
    let a = c(h)?;
    let b = c(h / 2.0)?;
    Ok((4.0 * b - a) / 3.0)
}

/// Central second derivative in one direction.
pub fn d2(f: &Field, p: Point, d: usize, h: f64) -> Result<f64> {
    let c = |h: f64| -> Result<f64> {
        Ok((f.eval(shift(p, d, h))? - 2.0 * f.eval(p)? + f.eval(shift(p, d, -h))?) / (h * h))
    };
    let a = c(h)?;
    let b = c(h / 2.0)?;
    Ok((4.0 * b - a) / 3.0)
}

/// Mixed second derivative d^2 f / (du_a du_b), a != b.
pub fn d2_mixed(f: &Field, p: Point, a: usize, b: usize, h: f64) -> Result<f64> {
    let c = |h: f64| -> Result<f64> {
        let pp = f.eval(shift(shift(p, a, h), b, h))?;
        let pm = f.eval(shift(shift(p, a, h), b, -h))?;
        let mp = f.eval(shift(shift(p, a, -h), b, h))?;
        let mm = f.eval(shift(shift(p, a, -h), b, -h))?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    };
    let x = c(h)?;
    let y = c(h / 2.0)?;
    Ok((4.0 * y - x) / 3.0)
}

/// Third derivative in one direction (5-point), no Richardson.
pub fn d3(f: &Field, p: Point, d: usize, h: f64) -> Result<f64> {
    let v = |k: f64| f.eval(shift(p, d, k * h));
    Ok((-v(-2.0)? + 2.0 * v(-1.0)? - 2.0 * v(1.0)? + v(2.0)?) / (-2.0 * h * h * h))
}
