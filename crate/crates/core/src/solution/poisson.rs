//! Dirichlet Poisson solver for the h-sector exponent equation
//! eps1 psi_x1x1 + eps2 psi_x2x2 = ups4 on a rectangle, 5-point stencil,
//! direct banded Cholesky solve, bicubic-interpolating field output.

use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::jet::Jet;
use std::sync::Arc;

/// Node-based rectangular grid over (x1, x2): `nx`, `ny` count cells, so
/// there are (nx + 1) x (ny + 1) nodes including the boundary.
#[derive(Clone, Copy, Debug)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Rect {
    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }
    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + i as f64 * self.hx(),
            self.y_min + j as f64 * self.hy(),
        )
    }
}

/// Solve eps1 psi_x1x1 + eps2 psi_x2x2 = ups4 with Dirichlet data taken from
/// `boundary` on the rectangle edge. Only the elliptic sign pair
/// eps1 = eps2 = +1 is supported. The discrete interior residual of the
/// returned nodal values is at solver precision; the result is wrapped as a
/// local-bicubic interpolating field.
pub fn solve_psi(
    upsilon4: &Field,
    boundary: &Field,
    grid: &Rect,
    signs: (i8, i8),
) -> Result<Field> {
    if signs != (1, 1) {
        return Err(Error::Unsupported(format!(
            "psi equation solver handles the elliptic pair (+1, +1) only, got {signs:?}"
        )));
    }
    let (nx, ny) = (grid.nx, grid.ny);
    if nx < 2 || ny < 2 {
        return Err(Error::Grid("need at least 2 cells per direction".into()));
    }
    if nx > 256 || ny > 256 {
        return Err(Error::Grid(format!(
            "direct solve is capped at 256^2 cells, got {nx} x {ny}"
        )));
    }
    let (hx, hy) = (grid.hx(), grid.hy());
    let (cx, cy) = (1.0 / (hx * hx), 1.0 / (hy * hy));

    // nodal table with Dirichlet boundary filled in
    let mut psi = vec![0.0f64; (nx + 1) * (ny + 1)];
    let at = |i: usize, j: usize| j * (nx + 1) + i;
    for j in 0..=ny {
        for i in 0..=nx {
            if i == 0 || i == nx || j == 0 || j == ny {
                let (x, y) = grid.node(i, j);
                psi[at(i, j)] = boundary.eval(Point::new(x, y, 0.0, 0.0))?;
            }
        }
    }

    // assemble -Laplace psi = -f as SPD banded system over interior nodes
    let (mx, my) = (nx - 1, ny - 1);
    let n = mx * my;
    let b = mx; // half bandwidth
    let idx = |i: usize, j: usize| (j - 1) * mx + (i - 1);
    let mut band = vec![0.0f64; n * (b + 1)]; // band[k*(b+1)+d] = A[k][k+d]
    let mut rhs = vec![0.0f64; n];
    for j in 1..my + 1 {
        for i in 1..mx + 1 {
            let k = idx(i, j);
            band[k * (b + 1)] = 2.0 * (cx + cy);
            let (x, y) = grid.node(i, j);
            rhs[k] = -upsilon4.eval(Point::new(x, y, 0.0, 0.0))?;
            // east
            if i + 1 <= mx {
                band[k * (b + 1) + 1] = -cx;
            } else {
                rhs[k] += cx * psi[at(i + 1, j)];
            }
            // west contributes symmetrically (stored once)
            if i == 1 {
                rhs[k] += cx * psi[at(i - 1, j)];
            }
            // north
            if j + 1 <= my {
                band[k * (b + 1) + b] = -cy;
            } else {
                rhs[k] += cy * psi[at(i, j + 1)];
            }
            // south
            if j == 1 {
                rhs[k] += cy * psi[at(i, j - 1)];
            }
        }
    }

    banded_cholesky_solve(&mut band, &mut rhs, n, b)?;

    for j in 1..my + 1 {
        for i in 1..mx + 1 {
            psi[at(i, j)] = rhs[idx(i, j)];
        }
    }

    Ok(nodal_field(*grid, psi))
}

/// In-place banded Cholesky A = L L^T and solve; `band` holds the upper
/// band row-wise and is overwritten with L^T.
fn banded_cholesky_solve(band: &mut [f64], rhs: &mut [f64], n: usize, b: usize) -> Result<()> {
    let w = b + 1;
    for k in 0..n {
        // diagonal
        let mut d = band[k * w];
        let lo = k.saturating_sub(b);
        for m in lo..k {
            let l = band[m * w + (k - m)];
            d -= l * l;
        }
        if d <= 0.0 {
            return Err(Error::Unsupported(
                "discrete Laplacian lost positive definiteness".into(),
            ));
        }
        let dk = d.sqrt();
        band[k * w] = dk;
        for i in (k + 1)..(k + 1 + b).min(n) {
            let mut s = band[k * w + (i - k)];
            let lo2 = i.saturating_sub(b).max(lo);
            for m in lo2..k {
                s -= band[m * w + (i - m)] * band[m * w + (k - m)];
            }
            band[k * w + (i - k)] = s / dk;
        }
    }
    // forward solve L y = rhs
    for k in 0..n {
        let lo = k.saturating_sub(b);
        let mut s = rhs[k];
        for m in lo..k {
            s -= band[m * w + (k - m)] * rhs[m];
        }
        rhs[k] = s / band[k * w];
    }
    // back solve L^T x = y
    for k in (0..n).rev() {
        let hi = (k + b).min(n - 1);
        let mut s = rhs[k];
        for i in (k + 1)..=hi {
            s -= band[k * w + (i - k)] * rhs[i];
        }
        rhs[k] = s / band[k * w];
    }
    Ok(())
}

struct NodalField {
    grid: Rect,
    values: Vec<f64>,
}

impl NodalField {
    fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        let g = &self.grid;
        let (hx, hy) = (g.hx(), g.hy());
        let fx = (p[0] - g.x_min) / hx;
        let fy = (p[1] - g.y_min) / hy;
        if !(-(1e-9)..=g.nx as f64 + 1e-9).contains(&fx)
            || !(-(1e-9)..=g.ny as f64 + 1e-9).contains(&fy)
        {
            return Err(Error::Grid(format!(
                "point ({}, {}) outside the solved rectangle",
                p[0], p[1]
            )));
        }
        // 4-node stencil starting index, clamped to stay in range
        let si = (fx.floor() as isize - 1).clamp(0, g.nx as isize - 3) as usize;
        let sj = (fy.floor() as isize - 1).clamp(0, g.ny as isize - 3) as usize;
        let xj = Jet::variable(p[0], 0, order);
        let yj = Jet::variable(p[1], 1, order);
        let lx = lagrange4(&xj, g.x_min + si as f64 * hx, hx, order);
        let ly = lagrange4(&yj, g.y_min + sj as f64 * hy, hy, order);
        let mut out = Jet::constant(0.0, order);
        for (dj, lyj) in ly.iter().enumerate() {
            for (di, lxi) in lx.iter().enumerate() {
                let v = self.values[(sj + dj) * (g.nx + 1) + (si + di)];
                out = out.add(&lxi.mul(lyj).scale(v));
            }
        }
        Ok(out)
    }
}

/// Cubic Lagrange basis jets over 4 equispaced nodes starting at t0.
fn lagrange4(x: &Jet, t0: f64, h: f64, order: usize) -> [Jet; 4] {
    std::array::from_fn(|m| {
        let tm = t0 + m as f64 * h;
        let mut out = Jet::constant(1.0, order);
        for k in 0..4 {
            if k != m {
                let tk = t0 + k as f64 * h;
                out = out.mul(&x.sub(&Jet::constant(tk, order)).scale(1.0 / (tm - tk)));
            }
        }
        out
    })
}

/// Wrap a nodal table as a differentiable field over (x1, x2).
pub fn nodal_field(grid: Rect, values: Vec<f64>) -> Field {
    let nf = Arc::new(NodalField { grid, values });
    Field::from_fn(DepMask::X, move |p, order| nf.jet(p, order))
}
