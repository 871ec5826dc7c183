//! Off-diagonal metrics in N-adapted form and their frame algebra.
//!
//! A [`DMetric`] holds the coefficient data (g_i, h_a, omega, N_i^a) of a
//! 2+2 split metric
//!
//! ```text
//! g = g_i dx^i (x) dx^i + omega^2 h_a e^a (x) e^a,
//! e^3 = dv  + w_i dx^i,   e^4 = dy4 + n_i dx^i,
//! ```
//!
//! block diagonal in the N-adapted frame e_i = d_i - w_i d_v - n_i d_4,
//! e_a = d_a, and generic off-diagonal in coordinates.

use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::jet::Jet;
use crate::linalg::{mat_det, mat_inv, mat_mul, symmetric_inertia, JetMat4, Mat4};
use crate::tensor::{TensorComponents, Variance};

/// Determinant threshold under which an assembled metric is rejected.
pub const DET_EPS: f64 = 1e-12;

/// Coefficient data of one off-diagonal spacetime.
#[derive(Clone, Debug)]
pub struct DMetric {
    /// h-block coefficients g_1(x), g_2(x).
    pub g: [Field; 2],
    /// v-block coefficients h_3(x, v), h_4(x, v) (without the omega factor).
    pub h: [Field; 2],
    /// Conformal v-factor omega(x, v, y4); 1 for Killing-symmetric metrics.
    pub omega: Field,
    /// N_i^3 = w_i(x, v).
    pub w: [Field; 2],
    /// N_i^4 = n_i(x, v).
    pub n: [Field; 2],
    /// Declared diagonal signature of (g_1, g_2, h_3, h_4).
    pub signature: [i8; 4],
}

/// Jets of all metric coefficients at one point. The v-block entries carry
/// the omega^2 factor already.
#[derive(Clone, Copy, Debug)]
pub struct CoeffJets {
    pub g: [Jet; 2],
    /// omega^2 h_a
    pub hv: [Jet; 2],
    pub w: [Jet; 2],
    pub n: [Jet; 2],
}

impl DMetric {
    /// Minkowski-like diagonal metric with constant coefficients.
    pub fn flat(signature: [i8; 4]) -> DMetric {
        DMetric {
            g: [
                Field::constant(signature[0] as f64),
                Field::constant(signature[1] as f64),
            ],
            h: [
                Field::constant(signature[2] as f64),
                Field::constant(signature[3] as f64),
            ],
            omega: Field::constant(1.0),
            w: [Field::constant(0.0), Field::constant(0.0)],
            n: [Field::constant(0.0), Field::constant(0.0)],
            signature,
        }
    }

    /// Diagonal metric from four coefficient fields (N = 0, omega = 1).
    pub fn diagonal(g1: Field, g2: Field, h3: Field, h4: Field, signature: [i8; 4]) -> DMetric {
        DMetric {
            g: [g1, g2],
            h: [h3, h4],
            omega: Field::constant(1.0),
            w: [Field::constant(0.0), Field::constant(0.0)],
            n: [Field::constant(0.0), Field::constant(0.0)],
            signature,
        }
    }

    /// Evaluate all coefficient jets at `p`.
    pub fn coeff_jets(&self, p: Point, order: usize) -> Result<CoeffJets> {
        let om = self.omega.jet(p, order)?;
        let om2 = om.mul(&om);
        Ok(CoeffJets {
            g: [self.g[0].jet(p, order)?, self.g[1].jet(p, order)?],
            hv: [
                om2.mul(&self.h[0].jet(p, order)?),
                om2.mul(&self.h[1].jet(p, order)?),
            ],
            w: [self.w[0].jet(p, order)?, self.w[1].jet(p, order)?],
            n: [self.n[0].jet(p, order)?, self.n[1].jet(p, order)?],
        })
    }

    /// N_i^a as a field (i in 0..2, a in 2..4).
    pub fn n_coeff(&self, i: usize, a: usize) -> &Field {
        match a {
            2 => &self.w[i],
            3 => &self.n[i],
            _ => panic!("v-slot expected"),
        }
    }

    /// Assembled coordinate-frame matrix at `p`, the generic off-diagonal
    /// parametrization of the metric.
    pub fn assemble(&self, p: Point) -> Result<Mat4> {
        let j = self.assemble_jets(p, 0)?;
        let mut m = [[0.0; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = j[r][c].value();
            }
        }
        let det = mat_det(&m);
        if det.abs() < DET_EPS {
            return Err(Error::SingularMetric { det });
        }
        Ok(m)
    }

    /// Assembled matrix with jet entries.
    pub fn assemble_jets(&self, p: Point, order: usize) -> Result<JetMat4> {
        let c = self.coeff_jets(p, order)?;
        let zero = Jet::constant(0.0, order);
        let mut m = [[zero; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                let mut val = c.hv[0].mul(&c.w[i]).mul(&c.w[j]).add(&c.hv[1].mul(&c.n[i]).mul(&c.n[j]));
                if i == j {
                    val = val.add(&c.g[i]);
                }
                m[i][j] = val;
            }
        }
        for i in 0..2 {
            m[i][2] = c.hv[0].mul(&c.w[i]);
            m[2][i] = m[i][2];
            m[i][3] = c.hv[1].mul(&c.n[i]);
            m[3][i] = m[i][3];
        }
        m[2][2] = c.hv[0];
        m[3][3] = c.hv[1];
        // m[2][3] = m[3][2] = 0 by the block structure
        Ok(m)
    }

    /// Validate nondegeneracy and the declared signature at `p`.
    pub fn validate_at(&self, p: Point) -> Result<()> {
        let m = self.assemble(p)?;
        let inertia = symmetric_inertia(&m)?;
        let mut expected = self.signature;
        let mut found = inertia;
        expected.sort_unstable();
        found.sort_unstable();
        if expected != found {
            return Err(Error::Signature {
                expected: self.signature,
                found: inertia,
            });
        }
        Ok(())
    }

    /// Block-diagonal N-adapted metric components diag(g_1, g_2, w^2 h_3, w^2 h_4).
    pub fn nadapted_diag(&self, p: Point) -> Result<[f64; 4]> {
        let c = self.coeff_jets(p, 0)?;
        Ok([
            c.g[0].value(),
            c.g[1].value(),
            c.hv[0].value(),
            c.hv[1].value(),
        ])
    }
}

/// Frame and coframe component matrices at a point.
///
/// `frame[alpha][mu]` are the coordinate components of e_alpha, and
/// `coframe[alpha][mu]` those of the dual 1-form e^alpha; the rows satisfy
/// e^alpha(e_beta) = delta.
#[derive(Clone, Debug)]
pub struct FramePair {
    pub frame: Mat4,
    pub coframe: Mat4,
}

/// N-adapted frame pair at `p`.
pub fn nadapted_frames(m: &DMetric, p: Point) -> Result<FramePair> {
    let c = m.coeff_jets(p, 0)?;
    let mut frame = [[0.0; 4]; 4];
    let mut coframe = [[0.0; 4]; 4];
    for i in 0..4 {
        frame[i][i] = 1.0;
        coframe[i][i] = 1.0;
    }
    for i in 0..2 {
        frame[i][2] = -c.w[i].value();
        frame[i][3] = -c.n[i].value();
        coframe[2][i] = c.w[i].value();
        coframe[3][i] = c.n[i].value();
    }
    Ok(FramePair { frame, coframe })
}

/// Frame (rows e_alpha) and coframe (rows e^alpha) with jet entries.
pub fn frame_jets(c: &CoeffJets, order: usize) -> (JetMat4, JetMat4) {
    let zero = Jet::constant(0.0, order);
    let one = Jet::constant(1.0, order);
    let mut frame = [[zero; 4]; 4];
    let mut coframe = [[zero; 4]; 4];
    for i in 0..4 {
        frame[i][i] = one;
        coframe[i][i] = one;
    }
    for i in 0..2 {
        frame[i][2] = c.w[i].trim(order).neg();
        frame[i][3] = c.n[i].trim(order).neg();
        coframe[2][i] = c.w[i].trim(order);
        coframe[3][i] = c.n[i].trim(order);
    }
    (frame, coframe)
}

/// Apply the N-adapted frame derivative e_alpha to a jet; drops one order.
pub fn frame_deriv(f: &Jet, alpha: usize, c: &CoeffJets) -> Jet {
    match alpha {
        0 | 1 => {
            let o = f.order() - 1;
            f.deriv(alpha)
                .sub(&c.w[alpha].trim(o).mul(&f.deriv(2)))
                .sub(&c.n[alpha].trim(o).mul(&f.deriv(3)))
        }
        _ => f.deriv(alpha),
    }
}

/// Anholonomy coefficients W^gamma_{alpha beta} of the N-adapted frame,
/// defined by [e_alpha, e_beta] = W^gamma_{alpha beta} e_gamma.
///
/// Nonzero blocks: W^b_{ia} = d_a N_i^b (and its antisymmetric partner) and
/// W^a_{ij} = Omega^a_{ij} = e_j(N_i^a) - e_i(N_j^a), the N-connection
/// curvature.
pub fn anholonomy(m: &DMetric, p: Point) -> Result<TensorComponents> {
    let c = m.coeff_jets(p, 1)?;
    let w = anholonomy_jets(&c, 0);
    let mut t = TensorComponents::zeros(&[Variance::Contra, Variance::Co, Variance::Co]);
    for g in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                t.set(&[g, a, b], w[g][a][b].value());
            }
        }
    }
    Ok(t)
}

/// Jet-valued anholonomy coefficients; input jets must carry order+1.
pub fn anholonomy_jets(c: &CoeffJets, order: usize) -> Box<[[[Jet; 4]; 4]; 4]> {
    let zero = Jet::constant(0.0, order);
    let mut w = Box::new([[[zero; 4]; 4]; 4]);
    // W^b_{ia} = d_a N_i^b
    for i in 0..2 {
        for a in 2..4 {
            for b in 2..4 {
                let nb = if b == 2 { &c.w[i] } else { &c.n[i] };
                let d = nb.deriv(a);
                w[b][i][a] = d;
                w[b][a][i] = d.neg();
            }
        }
    }
    // W^a_{ij} = e_j(N_i^a) - e_i(N_j^a)
    for a in 2..4 {
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    continue;
                }
                let ni = if a == 2 { &c.w[i] } else { &c.n[i] };
                let nj = if a == 2 { &c.w[j] } else { &c.n[j] };
                let om = frame_deriv(ni, j, c).sub(&frame_deriv(nj, i, c));
                w[a][i][j] = om;
            }
        }
    }
    w
}

/// Congruence transform g'_{alpha beta} = e_alpha^mu e_beta^nu g_{mu nu}.
pub fn frame_transform(g_under: &Mat4, vierbein: &Mat4) -> Result<Mat4> {
    let det = mat_det(vierbein);
    if det.abs() < DET_EPS {
        return Err(Error::SingularMetric { det });
    }
    let mut out = [[0.0; 4]; 4];
    for al in 0..4 {
        for be in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    s += vierbein[al][mu] * vierbein[be][nu] * g_under[mu][nu];
                }
            }
            out[al][be] = s;
        }
    }
    Ok(out)
}

/// Check e^alpha(e_beta) = delta for a frame pair.
pub fn duality_defect(fp: &FramePair) -> f64 {
    let prod = mat_mul(&fp.coframe, &transpose(&fp.frame));
    let mut worst = 0.0f64;
    for (i, row) in prod.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x - expect).abs());
        }
    }
    worst
}

fn transpose(a: &Mat4) -> Mat4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Inverse of the assembled coordinate metric at `p`.
pub fn inverse_metric(m: &DMetric, p: Point) -> Result<Mat4> {
    mat_inv(&m.assemble(p)?)
}

/// Helper: fields for a custom ansatz with explicit dependence masks.
pub struct DMetricBuilder {
    pub g1: Field,
    pub g2: Field,
    pub h3: Field,
    pub h4: Field,
    pub omega: Field,
    pub w1: Field,
    pub w2: Field,
    pub n1: Field,
    pub n2: Field,
    pub signature: [i8; 4],
}

impl DMetricBuilder {
    pub fn build(self) -> DMetric {
        DMetric {
            g: [self.g1.with_deps(DepMask::X), self.g2.with_deps(DepMask::X)],
            h: [self.h3, self.h4],
            omega: self.omega,
            w: [self.w1, self.w2],
            n: [self.n1, self.n2],
            signature: self.signature,
        }
    }
}
