//! Truncated multivariate Taylor arithmetic in the four chart coordinates.
//!
//! A [`Jet`] stores the Taylor coefficients of a scalar field around a point,
//! complete through total degree `order` (at most [`MAX_ORDER`]). All
//! arithmetic truncates at that degree, so derivatives of analytic
//! expressions come out exact to rounding instead of carrying a
//! finite-difference truncation error.

use crate::error::{Error, Result};
use std::sync::LazyLock;

/// Spacetime dimension; charts are (x1, x2, v = y3, y4).
pub const DIM: usize = 4;
/// Highest supported total derivative order.
pub const MAX_ORDER: usize = 4;
/// Coefficients of a degree-4 polynomial in 4 variables.
pub const N_COEFFS: usize = 70;

/// Multi-index over the four coordinates.
pub type MultiIndex = [u8; DIM];

struct Tables {
    /// All multi-indices with |alpha| <= MAX_ORDER, graded lexicographic.
    idx: Vec<MultiIndex>,
    /// Degree of each multi-index.
    deg: Vec<u8>,
    /// Lookup: packed multi-index -> position in `idx`.
    pos: Vec<u16>,
    /// (i, j, k, deg_k) with idx[i]+idx[j] = idx[k], deg_k <= MAX_ORDER.
    products: Vec<(u16, u16, u16, u8)>,
    /// alpha! for each entry.
    factorial: Vec<f64>,
    /// For each direction d: list of (src, dst, scale) with
    /// d/du_d of coefficient `src` contributing `scale * c[src]` to `dst`.
    shift: [Vec<(u16, u16, f64)>; DIM],
}

fn pack(a: MultiIndex) -> usize {
    a[0] as usize + 5 * (a[1] as usize + 5 * (a[2] as usize + 5 * a[3] as usize))
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut idx = Vec::new();
    for total in 0..=MAX_ORDER as u8 {
        for a0 in (0..=total).rev() {
            for a1 in (0..=total - a0).rev() {
                for a2 in (0..=total - a0 - a1).rev() {
                    let a3 = total - a0 - a1 - a2;
                    idx.push([a0, a1, a2, a3]);
                }
            }
        }
    }
    debug_assert_eq!(idx.len(), N_COEFFS);
    let deg: Vec<u8> = idx.iter().map(|a| a.iter().sum()).collect();
    let mut pos = vec![u16::MAX; 625];
    for (k, a) in idx.iter().enumerate() {
        pos[pack(*a)] = k as u16;
    }
    let mut products = Vec::new();
    for i in 0..idx.len() {
        for j in 0..idx.len() {
            if deg[i] + deg[j] <= MAX_ORDER as u8 {
                let sum = [
                    idx[i][0] + idx[j][0],
                    idx[i][1] + idx[j][1],
                    idx[i][2] + idx[j][2],
                    idx[i][3] + idx[j][3],
                ];
                let k = pos[pack(sum)];
                products.push((i as u16, j as u16, k, deg[i] + deg[j]));
            }
        }
    }
    let factorial = idx
        .iter()
        .map(|a| a.iter().map(|&q| FACT[q as usize]).product())
        .collect();
    let shift = std::array::from_fn(|d| {
        let mut v = Vec::new();
        for (k, a) in idx.iter().enumerate() {
            if a[d] > 0 {
                let mut b = *a;
                b[d] -= 1;
                // Taylor coefficient of the derivative: c'_b = (b_d + 1) c_a
                v.push((k as u16, pos[pack(b)], a[d] as f64));
            }
        }
        v
    });
    Tables {
        idx,
        deg,
        pos,
        products,
        factorial,
        shift,
    }
});

const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Truncated Taylor expansion of a scalar field at a point.
#[derive(Clone, Copy)]
pub struct Jet {
    order: u8,
    c: [f64; N_COEFFS],
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Jet(order {}, value {:.6e})", self.order, self.value())
    }
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        debug_assert!(order <= MAX_ORDER);
        let mut c = [0.0; N_COEFFS];
        c[0] = value;
        Jet {
            order: order as u8,
            c,
        }
    }

    /// Seed for the coordinate `slot` (0..4).
    pub fn variable(value: f64, slot: usize, order: usize) -> Self {
        let mut j = Jet::constant(value, order);
        if order >= 1 {
            j.c[1 + slot] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Number of stored coefficients for this order.
    pub fn len(&self) -> usize {
        let t = &*TABLES;
        t.deg.iter().filter(|&&d| d <= self.order).count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Partial derivative for a multi-index (value of d^alpha f, not the
    /// Taylor coefficient).
    pub fn partial(&self, alpha: MultiIndex) -> f64 {
        let t = &*TABLES;
        let total: u8 = alpha.iter().sum();
        debug_assert!(total <= self.order, "partial beyond stored order");
        let k = t.pos[pack(alpha)] as usize;
        self.c[k] * t.factorial[k]
    }

    /// Taylor coefficient by multi-index.
    pub fn coeff(&self, alpha: MultiIndex) -> f64 {
        let t = &*TABLES;
        self.c[t.pos[pack(alpha)] as usize]
    }

    /// First partial in direction `d`.
    pub fn d1(&self, d: usize) -> f64 {
        debug_assert!(self.order >= 1);
        self.c[1 + d]
    }

    /// The jet of the partial derivative in direction `d`; drops one order.
    pub fn deriv(&self, d: usize) -> Jet {
        debug_assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let t = &*TABLES;
        let mut out = Jet::constant(0.0, self.order as usize - 1);
        for &(src, dst, scale) in &t.shift[d] {
            if t.deg[src as usize] <= self.order {
                out.c[dst as usize] += scale * self.c[src as usize];
            }
        }
        out
    }

    /// Truncate to a lower order.
    pub fn trim(&self, order: usize) -> Jet {
        debug_assert!(order <= self.order as usize);
        let t = &*TABLES;
        let mut out = *self;
        out.order = order as u8;
        for k in 0..N_COEFFS {
            if t.deg[k] > out.order {
                out.c[k] = 0.0;
            }
        }
        out
    }

    fn binary_order(&self, rhs: &Jet) -> u8 {
        debug_assert_eq!(
            self.order, rhs.order,
            "jet arithmetic requires equal orders"
        );
        self.order
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let order = self.binary_order(rhs);
        let t = &*TABLES;
        let mut out = Jet::constant(0.0, order as usize);
        for &(i, j, k, dk) in &t.products {
            if dk <= order {
                out.c[k as usize] += self.c[i as usize] * rhs.c[j as usize];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        for c in out.c.iter_mut() {
            *c *= s;
        }
        out
    }

    /// Nilpotent part (all coefficients of degree >= 1).
    fn nilpotent(&self) -> Jet {
        let mut p = *self;
        p.c[0] = 0.0;
        p
    }

    /// Compose a univariate function given its derivative values at
    /// `self.value()` (derivs[k] = g^(k)), through the jet's order.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let order = self.order as usize;
        let p = self.nilpotent();
        let mut out = Jet::constant(derivs[0], order);
        let mut pk = Jet::constant(1.0, order);
        for (k, d) in derivs.iter().enumerate().take(order + 1).skip(1) {
            pk = pk.mul(&p);
            out = out.add(&pk.scale(d / FACT[k]));
        }
        out
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let order = self.binary_order(rhs);
        let mut out = Jet::constant(0.0, order as usize);
        for k in 0..N_COEFFS {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        let order = self.binary_order(rhs);
        let mut out = Jet::constant(0.0, order as usize);
        for k in 0..N_COEFFS {
            out.c[k] = self.c[k] - rhs.c[k];
        }
        out
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn recip(&self) -> Result<Jet> {
        let v = self.value();
        if v == 0.0 {
            return Err(Error::Domain {
                func: "recip",
                arg: v,
                reason: "division by zero",
            });
        }
        let mut d = [0.0; MAX_ORDER + 1];
        let mut cur = 1.0 / v;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = cur;
            cur *= -((k + 1) as f64) / v;
        }
        Ok(self.compose(&d))
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; MAX_ORDER + 1])
    }

    pub fn ln(&self) -> Result<Jet> {
        let v = self.value();
        if v <= 0.0 {
            return Err(Error::Domain {
                func: "ln",
                arg: v,
                reason: "argument must be positive",
            });
        }
        let mut d = [0.0; MAX_ORDER + 1];
        d[0] = v.ln();
        let mut cur = 1.0 / v;
        for k in 1..=MAX_ORDER {
            d[k] = cur;
            cur *= -(k as f64) / v;
        }
        Ok(self.compose(&d))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let v = self.value();
        if v <= 0.0 {
            return Err(Error::Domain {
                func: "sqrt",
                arg: v,
                reason: "argument must be positive",
            });
        }
        let s = v.sqrt();
        let mut d = [0.0; MAX_ORDER + 1];
        d[0] = s;
        // g^(k) = s * prod_{m<k} (1/2 - m) / v^k
        let mut coef = 1.0;
        for k in 1..=MAX_ORDER {
            coef *= 0.5 - (k as f64 - 1.0);
            d[k] = s * coef / v.powi(k as i32);
        }
        Ok(self.compose(&d))
    }

    /// |f| with the branch locked to the sign at the expansion point.
    pub fn abs(&self) -> Result<Jet> {
        let v = self.value();
        if v == 0.0 {
            return Err(Error::Domain {
                func: "abs",
                arg: v,
                reason: "not differentiable at zero",
            });
        }
        Ok(self.scale(v.signum()))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn tan(&self) -> Result<Jet> {
        let c = self.cos();
        if c.value() == 0.0 {
            return Err(Error::Domain {
                func: "tan",
                arg: self.value(),
                reason: "cos vanishes",
            });
        }
        self.sin().div(&c)
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(&[s, c, s, c, s])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(&[c, s, c, s, c])
    }

    pub fn tanh(&self) -> Jet {
        // cosh >= 1, division is always safe
        self.sinh().div(&self.cosh()).expect("cosh >= 1")
    }

    pub fn sech(&self) -> Jet {
        Jet::constant(1.0, self.order as usize)
            .div(&self.cosh())
            .expect("cosh >= 1")
    }

    pub fn powi(&self, n: i32) -> Result<Jet> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut out = Jet::constant(1.0, self.order as usize);
        for _ in 0..n {
            out = out.mul(self);
        }
        Ok(out)
    }

    pub fn powf(&self, r: f64) -> Result<Jet> {
        if r == r.trunc() && r.abs() <= 16.0 {
            return self.powi(r as i32);
        }
        let v = self.value();
        if v <= 0.0 {
            return Err(Error::Domain {
                func: "powf",
                arg: v,
                reason: "base must be positive for non-integer exponents",
            });
        }
        let mut d = [0.0; MAX_ORDER + 1];
        let mut coef = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = coef * v.powf(r - k as f64);
            coef *= r - k as f64;
        }
        Ok(self.compose(&d))
    }

    /// Largest |coefficient|; handy for residual reductions in tests.
    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Zero every coefficient that involves direction `d`: the jet of the
    /// field with coordinate `d` frozen at the expansion point.
    pub fn freeze_dir(&self, d: usize) -> Jet {
        let t = &*TABLES;
        let mut out = *self;
        for (k, a) in t.idx.iter().enumerate() {
            if a[d] > 0 {
                out.c[k] = 0.0;
            }
        }
        out
    }


    /// Replace one Taylor coefficient (by multi-index).
    pub fn with_coeff(&self, alpha: MultiIndex, value: f64) -> Jet {
        let t = &*TABLES;
        let mut out = *self;
        out.c[t.pos[pack(alpha)] as usize] = value;
        out
    }

    /// Linear combination helper used by vector quadrature.
    pub fn axpy(&mut self, s: f64, other: &Jet) {
        for (c, o) in self.c.iter_mut().zip(other.c.iter()) {
            *c += s * o;
        }
    }

    /// Max |coefficient| difference, for convergence tests.
    pub fn dist(&self, other: &Jet) -> f64 {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// All multi-indices of total degree <= `order`.
pub fn multi_indices(order: usize) -> impl Iterator<Item = MultiIndex> {
    let t = &*TABLES;
    t.idx
        .iter()
        .zip(t.deg.iter())
        .filter(move |(_, &d)| d as usize <= order)
        .map(|(a, _)| *a)
        .collect::<Vec<_>>()
        .into_iter()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_partials_are_exact() {
        // f = u3^2 at u3 = 2
        let u3 = Jet::variable(2.0, 2, 2);
        let f = u3.mul(&u3);
        assert_eq!(f.value(), 4.0);
        assert_eq!(f.partial([0, 0, 1, 0]), 4.0);
        assert_eq!(f.partial([0, 0, 2, 0]), 2.0);
    }

    #[test]
    fn constants_have_zero_derivatives() {
        let c = Jet::constant(6.5, 2);
        let f = c.exp();
        assert_eq!(f.partial([1, 0, 0, 0]), 0.0);
        assert_eq!(f.partial([0, 1, 1, 0]), 0.0);
        assert_eq!(f.value(), 6.5f64.exp());
    }

    #[test]
    fn exp_series_matches_hand_values() {
        let x = Jet::variable(0.0, 0, 4);
        let f = x.exp();
        for k in 0..=4u8 {
            let mut alpha = [0u8; 4];
            alpha[0] = k;
            assert!((f.partial(alpha) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_product_rule() {
        // f = sin(u1) * exp(u3), partials factor
        let p = [0.3f64, 0.0, 0.1, 0.0];
        let u1 = Jet::variable(p[0], 0, 3);
        let u3 = Jet::variable(p[2], 2, 3);
        let f = u1.sin().mul(&u3.exp());
        let e = p[2].exp();
        assert!((f.partial([1, 0, 0, 0]) - p[0].cos() * e).abs() < 1e-14);
        assert!((f.partial([1, 0, 1, 0]) - p[0].cos() * e).abs() < 1e-14);
        assert!((f.partial([2, 0, 1, 0]) + p[0].sin() * e).abs() < 1e-14);
        assert!((f.partial([1, 0, 2, 0]) - p[0].cos() * e).abs() < 1e-14);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Jet::variable(1.3, 0, 4);
        let b = Jet::variable(0.7, 2, 4).exp();
        let prod = a.mul(&b);
        let back = prod.div(&b).unwrap();
        for alpha in multi_indices(4) {
            assert!((back.coeff(alpha) - a.coeff(alpha)).abs() < 1e-13);
        }
    }

    #[test]
    fn deriv_jet_shifts_orders() {
        let x = Jet::variable(0.4, 1, 3);
        let f = x.sin();
        let df = f.deriv(1);
        assert_eq!(df.order(), 2);
        assert!((df.value() - 0.4f64.cos()).abs() < 1e-15);
        assert!((df.partial([0, 1, 0, 0]) + 0.4f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn abs_locks_branch() {
        let x = Jet::variable(-2.0, 0, 2);
        let f = x.abs().unwrap();
        assert_eq!(f.value(), 2.0);
        assert_eq!(f.d1(0), -1.0);
        assert!(Jet::variable(0.0, 0, 2).abs().is_err());
    }
}
