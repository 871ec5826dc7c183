//! Coordinate-metric abstraction shared by the hidden-symmetry checks.
//!
//! The checks run both on ansatz d-metrics (through their assembled matrix)
//! and on the primary twisted-black-hole geometry, which carries a
//! frame-dragging block no d-metric can express; this trait is the common
//! surface.

use crate::connection::{christoffel_of_matrix, GammaJets};
use crate::error::Result;
use crate::field::Point;
use crate::jet::Jet;
use crate::linalg::{jet_mat_inv, JetMat4, Mat4};
use crate::metric::DMetric;

/// Anything that yields a coordinate metric matrix with jets at a point.
pub trait MatrixMetric: Sync {
    fn metric_jets(&self, p: Point, order: usize) -> Result<JetMat4>;

    fn metric(&self, p: Point) -> Result<Mat4> {
        let j = self.metric_jets(p, 0)?;
        let mut m = [[0.0; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = j[r][c].value();
            }
        }
        Ok(m)
    }

    fn inverse_metric(&self, p: Point) -> Result<Mat4> {
        crate::linalg::mat_inv(&self.metric(p)?)
    }

    /// Levi-Civita Christoffel jets of this metric.
    fn christoffel_jets(&self, p: Point, order: usize) -> Result<GammaJets> {
        christoffel_of_matrix(&self.metric_jets(p, order + 1)?, order)
    }

    /// Coordinate Ricci tensor (standard sign: unit sphere positive).
    fn ricci(&self, p: Point) -> Result<Mat4> {
        let order = 0;
        let gamma = self.christoffel_jets(p, order + 1)?;
        let mut ric = [[0.0; 4]; 4];
        for al in 0..4 {
            for be in 0..4 {
                let mut s = 0.0;
                for t in 0..4 {
                    let mut r = gamma[t][al][be].d1(t) - gamma[t][al][t].d1(be);
                    for mu in 0..4 {
                        r += gamma[mu][al][be].value() * gamma[t][mu][t].value()
                            - gamma[mu][al][t].value() * gamma[t][mu][be].value();
                    }
                    s += r;
                }
                ric[al][be] = s;
            }
        }
        Ok(ric)
    }
}

impl MatrixMetric for DMetric {
    fn metric_jets(&self, p: Point, order: usize) -> Result<JetMat4> {
        self.assemble_jets(p, order)
    }
}

/// A metric given directly as a jet-matrix rule.
pub struct MatrixMetricFn<F>(pub F);

impl<F> MatrixMetric for MatrixMetricFn<F>
where
    F: Fn(Point, usize) -> Result<JetMat4> + Sync,
{
    fn metric_jets(&self, p: Point, order: usize) -> Result<JetMat4> {
        (self.0)(p, order)
    }
}

/// Inverse metric as jets.
pub fn inverse_metric_jets(g: &dyn MatrixMetric, p: Point, order: usize) -> Result<JetMat4> {
    jet_mat_inv(&g.metric_jets(p, order)?, order)
}

/// Max |R_{ab}| of the coordinate Ricci; the vacuum residual.
pub fn max_ricci(g: &dyn MatrixMetric, p: Point) -> Result<f64> {
    let r = g.ricci(p)?;
    Ok(r.iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs())))
}

/// Jet helper: value-parts of a jet matrix.
pub fn values_of(m: &JetMat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = m[r][c].value();
        }
    }
    out
}

/// Jet helper: a constant jet matrix.
pub fn constant_matrix(m: &Mat4, order: usize) -> JetMat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| Jet::constant(m[r][c], order)))
}
