//! Scalar fields: lazily evaluated maps from chart points to jets.
//!
//! A [`Field`] is a cheap handle on an evaluation rule. Everything built from
//! fields stays pure and reentrant, so grid sweeps can evaluate the same
//! field from many threads.

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use std::sync::Arc;

/// A point of the chart u = (x1, x2, v, y4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point(pub [f64; 4]);

impl Point {
    pub fn new(u1: f64, u2: f64, u3: f64, u4: f64) -> Self {
        Point([u1, u2, u3, u4])
    }
    pub fn zero() -> Self {
        Point([0.0; 4])
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Which of the four coordinates a field may depend on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepMask(pub u8);

impl DepMask {
    pub const NONE: DepMask = DepMask(0);
    pub const X: DepMask = DepMask(0b0011);
    pub const XV: DepMask = DepMask(0b0111);
    pub const ALL: DepMask = DepMask(0b1111);

    pub fn slot(i: usize) -> DepMask {
        DepMask(1 << i)
    }
    pub fn union(self, o: DepMask) -> DepMask {
        DepMask(self.0 | o.0)
    }
    pub fn depends_on(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }
}

trait ScalarFn: Send + Sync {
    fn jet(&self, p: Point, order: usize) -> Result<Jet>;
    fn deps(&self) -> DepMask;
}

/// A scalar field over the chart, evaluable to any jet order up to
/// [`MAX_ORDER`]. Cloning shares the underlying rule.
#[derive(Clone)]
pub struct Field(Arc<dyn ScalarFn>);

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field(deps {:04b})", self.deps().0)
    }
}

struct Constant(f64);
impl ScalarFn for Constant {
    fn jet(&self, _p: Point, order: usize) -> Result<Jet> {
        Ok(Jet::constant(self.0, order))
    }
    fn deps(&self) -> DepMask {
        DepMask::NONE
    }
}

struct Coord(usize);
impl ScalarFn for Coord {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        Ok(Jet::variable(p.0[self.0], self.0, order))
    }
    fn deps(&self) -> DepMask {
        DepMask::slot(self.0)
    }
}

struct FromFn<F> {
    f: F,
    deps: DepMask,
}
impl<F: Fn(Point, usize) -> Result<Jet> + Send + Sync> ScalarFn for FromFn<F> {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        (self.f)(p, order)
    }
    fn deps(&self) -> DepMask {
        self.deps
    }
}

struct Binary {
    a: Field,
    b: Field,
    op: BinOp,
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ScalarFn for Binary {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        let a = self.a.jet(p, order)?;
        let b = self.b.jet(p, order)?;
        match self.op {
            BinOp::Add => Ok(a.add(&b)),
            BinOp::Sub => Ok(a.sub(&b)),
            BinOp::Mul => Ok(a.mul(&b)),
            BinOp::Div => a.div(&b),
        }
    }
    fn deps(&self) -> DepMask {
        self.a.deps().union(self.b.deps())
    }
}

struct Unary {
    a: Field,
    op: UnOp,
}

#[derive(Clone, Copy)]
enum UnOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sech,
}

impl ScalarFn for Unary {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        let a = self.a.jet(p, order)?;
        match self.op {
            UnOp::Neg => Ok(a.neg()),
            UnOp::Exp => Ok(a.exp()),
            UnOp::Ln => a.ln(),
            UnOp::Sqrt => a.sqrt(),
            UnOp::Abs => a.abs(),
            UnOp::Sin => Ok(a.sin()),
            UnOp::Cos => Ok(a.cos()),
            UnOp::Tan => a.tan(),
            UnOp::Sinh => Ok(a.sinh()),
            UnOp::Cosh => Ok(a.cosh()),
            UnOp::Tanh => Ok(a.tanh()),
            UnOp::Sech => Ok(a.sech()),
        }
    }
    fn deps(&self) -> DepMask {
        self.a.deps()
    }
}

struct Deriv {
    a: Field,
    dir: usize,
}

impl ScalarFn for Deriv {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        if order + 1 > MAX_ORDER {
            return Err(Error::OrderExceeded {
                requested: order + 1,
                max: MAX_ORDER,
            });
        }
        Ok(self.a.jet(p, order + 1)?.deriv(self.dir))
    }
    fn deps(&self) -> DepMask {
        self.a.deps()
    }
}

struct Pow {
    a: Field,
    exponent: f64,
}

impl ScalarFn for Pow {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        self.a.jet(p, order)?.powf(self.exponent)
    }
    fn deps(&self) -> DepMask {
        self.a.deps()
    }
}

impl Field {
    pub fn constant(v: f64) -> Field {
        Field(Arc::new(Constant(v)))
    }

    pub fn coord(i: usize) -> Field {
        assert!(i < 4);
        Field(Arc::new(Coord(i)))
    }

    /// Wrap an arbitrary jet rule. The rule must be pure.
    pub fn from_fn<F>(deps: DepMask, f: F) -> Field
    where
        F: Fn(Point, usize) -> Result<Jet> + Send + Sync + 'static,
    {
        Field(Arc::new(FromFn { f, deps }))
    }

    pub fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        if order > MAX_ORDER {
            return Err(Error::OrderExceeded {
                requested: order,
                max: MAX_ORDER,
            });
        }
        let j = self.0.jet(p, order)?;
        debug_assert_eq!(j.order(), order);
        Ok(j)
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        Ok(self.jet(p, 0)?.value())
    }

    pub fn deps(&self) -> DepMask {
        self.0.deps()
    }

    fn bin(self, other: Field, op: BinOp) -> Field {
        Field(Arc::new(Binary {
            a: self,
            b: other,
            op,
        }))
    }

    fn un(self, op: UnOp) -> Field {
        Field(Arc::new(Unary { a: self, op }))
    }

    pub fn add(&self, o: &Field) -> Field {
        self.clone().bin(o.clone(), BinOp::Add)
    }
    pub fn sub(&self, o: &Field) -> Field {
        self.clone().bin(o.clone(), BinOp::Sub)
    }
    pub fn mul(&self, o: &Field) -> Field {
        self.clone().bin(o.clone(), BinOp::Mul)
    }
    pub fn div(&self, o: &Field) -> Field {
        self.clone().bin(o.clone(), BinOp::Div)
    }
    pub fn neg(&self) -> Field {
        self.clone().un(UnOp::Neg)
    }
    pub fn exp(&self) -> Field {
        self.clone().un(UnOp::Exp)
    }
    pub fn ln(&self) -> Field {
        self.clone().un(UnOp::Ln)
    }
    pub fn sqrt(&self) -> Field {
        self.clone().un(UnOp::Sqrt)
    }
    pub fn abs(&self) -> Field {
        self.clone().un(UnOp::Abs)
    }
    pub fn sin(&self) -> Field {
        self.clone().un(UnOp::Sin)
    }
    pub fn cos(&self) -> Field {
        self.clone().un(UnOp::Cos)
    }
    pub fn tan(&self) -> Field {
        self.clone().un(UnOp::Tan)
    }
    pub fn sinh(&self) -> Field {
        self.clone().un(UnOp::Sinh)
    }
    pub fn cosh(&self) -> Field {
        self.clone().un(UnOp::Cosh)
    }
    pub fn tanh(&self) -> Field {
        self.clone().un(UnOp::Tanh)
    }
    pub fn sech(&self) -> Field {
        self.clone().un(UnOp::Sech)
    }

    pub fn powf(&self, exponent: f64) -> Field {
        Field(Arc::new(Pow {
            a: self.clone(),
            exponent,
        }))
    }

    pub fn powi(&self, n: i32) -> Field {
        self.powf(n as f64)
    }

    pub fn scale(&self, s: f64) -> Field {
        self.mul(&Field::constant(s))
    }

    pub fn add_scalar(&self, s: f64) -> Field {
        self.add(&Field::constant(s))
    }

    /// Partial-derivative field in coordinate direction `dir`. Evaluating it
    /// at order k consumes one order of jet budget from the parent.
    pub fn deriv(&self, dir: usize) -> Field {
        Field(Arc::new(Deriv {
            a: self.clone(),
            dir,
        }))
    }

    /// Enforce a declared dependence mask: derivatives along masked-out
    /// coordinates are exactly zero by construction here (the parent rule is
    /// trusted for the rest).
    pub fn with_deps(&self, deps: DepMask) -> Field {
        let inner = self.clone();
        Field::from_fn(deps, move |p, order| inner.jet(p, order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_field_has_unit_slope() {
        let v = Field::coord(2);
        let j = v.jet(Point::new(0.0, 0.0, 2.0, 0.0), 2).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.partial([0, 0, 1, 0]), 1.0);
        assert_eq!(j.partial([0, 0, 2, 0]), 0.0);
    }

    #[test]
    fn masked_dependence_is_exactly_zero() {
        // field built from x1 and v only: all y4 partials vanish
        let f = Field::coord(0).sin().mul(&Field::coord(2).exp());
        assert!(!f.deps().depends_on(3));
        let j = f.jet(Point::new(0.3, 0.0, 0.1, 7.0), 3).unwrap();
        assert_eq!(j.partial([0, 0, 0, 1]), 0.0);
        assert_eq!(j.partial([1, 0, 0, 1]), 0.0);
    }

    #[test]
    fn deriv_field_consumes_order_budget() {
        let f = Field::coord(0).sin();
        let df = f.deriv(0);
        let p = Point::new(0.7, 0.0, 0.0, 0.0);
        assert!((df.eval(p).unwrap() - 0.7f64.cos()).abs() < 1e-15);
        assert!(df.jet(p, MAX_ORDER).is_err());
    }
}
