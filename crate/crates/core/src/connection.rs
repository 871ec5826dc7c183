//! Canonical d-connection, torsion, distortion, Levi-Civita variants and
//! metric-compatibility residuals.
//!
//! Connection coefficients are stored as `gamma[c][b][a]`, meaning the
//! covariant derivative of the frame vector e_b along direction e_a has
//! component c: D_{e_a} e_b = Gamma^c_{b a} e_c.

use crate::error::Result;
use crate::field::Point;
use crate::jet::Jet;
use crate::linalg::jet_mat_inv;
use crate::metric::{anholonomy_jets, frame_deriv, CoeffJets, DMetric};
use crate::tensor::{TensorComponents, Variance};

/// Which connection a coefficient block represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// The canonical d-connection (metric compatible, zero pure-h/pure-v torsion).
    Canonical,
    /// The distortion from the canonical to the Levi-Civita connection.
    Distortion,
    /// Levi-Civita in the N-adapted frame (canonical + distortion).
    LcAdapted,
    /// Christoffel symbols of the assembled matrix in the coordinate frame.
    ChristoffelCoordinate,
}

pub type GammaJets = Box<[[[Jet; 4]; 4]; 4]>;

/// Connection coefficients at a point.
#[derive(Clone, Debug)]
pub struct ConnectionCoefficients {
    pub gamma: Box<[[[f64; 4]; 4]; 4]>,
    pub flavor: Flavor,
}

impl ConnectionCoefficients {
    pub fn get(&self, c: usize, b: usize, a: usize) -> f64 {
        self.gamma[c][b][a]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    fn from_jets(j: &GammaJets, flavor: Flavor) -> Self {
        let mut gamma = Box::new([[[0.0; 4]; 4]; 4]);
        for c in 0..4 {
            for b in 0..4 {
                for a in 0..4 {
                    gamma[c][b][a] = j[c][b][a].value();
                }
            }
        }
        ConnectionCoefficients { gamma, flavor }
    }
}

fn zero_gamma(order: usize) -> GammaJets {
    let z = Jet::constant(0.0, order);
    Box::new([[[z; 4]; 4]; 4])
}

/// Canonical d-connection coefficients as jets of the requested order.
/// Consumes coefficient jets of order `order + 1`.
pub fn canonical_gamma_jets(c: &CoeffJets, order: usize) -> Result<GammaJets> {
    let ghi = [c.g[0].recip()?, c.g[1].recip()?];
    let hvi = [c.hv[0].recip()?, c.hv[1].recip()?];
    let mut gm = zero_gamma(order);
    let ef = |f: &Jet, al: usize| frame_deriv(f, al, c);

    // L^i_{jk} = 1/2 g^{ir}(e_k g_jr + e_j g_kr - e_r g_jk), diagonal blocks
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut s = Jet::constant(0.0, order);
                if j == i {
                    s = s.add(&ef(&c.g[j], k));
                }
                if k == i {
                    s = s.add(&ef(&c.g[k], j));
                }
                if j == k {
                    s = s.sub(&ef(&c.g[j], i));
                }
                gm[i][j][k] = ghi[i].trim(order).mul(&s).scale(0.5);
            }
        }
    }
    // L^a_{bk} = e_b(N_k^a) + 1/2 h^{ac}(e_k h_bc - h_dc e_b N_k^d - h_db e_c N_k^d)
    for a in 2..4 {
        for b in 2..4 {
            for k in 0..2 {
                let na = if a == 2 { &c.w[k] } else { &c.n[k] };
                let nb = if b == 2 { &c.w[k] } else { &c.n[k] };
                let mut s = Jet::constant(0.0, order);
                if b == a {
                    s = s.add(&ef(&c.hv[a - 2], k));
                }
                // c = a term of -h_dc e_b N_k^d with d = a
                s = s.sub(&c.hv[a - 2].trim(order).mul(&na.deriv(b).trim(order)));
                // -h_db e_c N_k^d with d = b, c = a
                s = s.sub(&c.hv[b - 2].trim(order).mul(&nb.deriv(a).trim(order)));
                gm[a][b][k] = na
                    .deriv(b)
                    .trim(order)
                    .add(&hvi[a - 2].trim(order).mul(&s).scale(0.5));
            }
        }
    }
    // C^i_{jc} = 1/2 g^{ik} e_c g_jk
    for i in 0..2 {
        for j in 0..2 {
            if j != i {
                continue;
            }
            for cc in 2..4 {
                gm[i][j][cc] = ghi[i]
                    .trim(order)
                    .mul(&c.g[j].deriv(cc).trim(order))
                    .scale(0.5);
            }
        }
    }
    // C^a_{bc} = 1/2 h^{ad}(e_c h_bd + e_b h_cd - e_d h_bc), symmetrized form
    for a in 2..4 {
        for b in 2..4 {
            for cc in 2..4 {
                let mut s = Jet::constant(0.0, order);
                if b == a {
                    s = s.add(&c.hv[b - 2].deriv(cc).trim(order));
                }
                if cc == a {
                    s = s.add(&c.hv[cc - 2].deriv(b).trim(order));
                }
                if b == cc {
                    s = s.sub(&c.hv[b - 2].deriv(a).trim(order));
                }
                gm[a][b][cc] = hvi[a - 2].trim(order).mul(&s).scale(0.5);
            }
        }
    }
    Ok(gm)
}

/// Distortion tensor Z with LC = canonical + Z, as jets.
/// Consumes coefficient jets of order `order + 1`.
pub fn distortion_gamma_jets(c: &CoeffJets, order: usize) -> Result<GammaJets> {
    let canonical = canonical_gamma_jets(c, order)?;
    let ghi = [c.g[0].recip()?, c.g[1].recip()?];
    let hvi = [c.hv[0].recip()?, c.hv[1].recip()?];
    let w = anholonomy_jets(c, order);
    let mut z = zero_gamma(order);

    // Z^a_{jk} = -1/2 h^{ab} e_b(g_jk) - 1/2 Omega^a_{jk}
    for a in 2..4 {
        for j in 0..2 {
            for k in 0..2 {
                let mut s = w[a][j][k].scale(-0.5);
                if j == k {
                    s = s.sub(
                        &hvi[a - 2]
                            .trim(order)
                            .mul(&c.g[j].deriv(a).trim(order))
                            .scale(0.5),
                    );
                }
                z[a][j][k] = s;
            }
        }
    }
    // Z^i_{jc} = -1/2 g^{ii} Omega^c'_{ji} hv_c' delta_{c'c} (vector j, direction c)
    for i in 0..2 {
        for j in 0..2 {
            for cc in 2..4 {
                z[i][j][cc] = ghi[i]
                    .trim(order)
                    .mul(&w[cc][j][i])
                    .mul(&c.hv[cc - 2].trim(order))
                    .scale(-0.5);
            }
        }
    }
    // Z^i_{bj} = C^i_{jb} - 1/2 g^{ii} Omega^b_{ji} hv_b (vector b, direction j)
    for i in 0..2 {
        for b in 2..4 {
            for j in 0..2 {
                let chat = if j == i {
                    ghi[i]
                        .trim(order)
                        .mul(&c.g[j].deriv(b).trim(order))
                        .scale(0.5)
                } else {
                    Jet::constant(0.0, order)
                };
                z[i][b][j] = chat.sub(
                    &ghi[i]
                        .trim(order)
                        .mul(&w[b][j][i])
                        .mul(&c.hv[b - 2].trim(order))
                        .scale(0.5),
                );
            }
        }
    }
    // Z^a_{jc} = L^a_{cj} - e_c(N_j^a)  (vector j, direction c)
    for a in 2..4 {
        for j in 0..2 {
            for cc in 2..4 {
                let na = if a == 2 { &c.w[j] } else { &c.n[j] };
                z[a][j][cc] = canonical[a][cc][j].sub(&na.deriv(cc).trim(order));
            }
        }
    }
    // Z^i_{bc} = 1/2 g^{ii} [ -e_i(hv_b) delta_bc + hv_b e_c(N_i^b) + hv_c e_b(N_i^c) ]
    for i in 0..2 {
        for b in 2..4 {
            for cc in 2..4 {
                let nb = if b == 2 { &c.w[i] } else { &c.n[i] };
                let nc = if cc == 2 { &c.w[i] } else { &c.n[i] };
                let mut s = c.hv[b - 2]
                    .trim(order)
                    .mul(&nb.deriv(cc).trim(order))
                    .add(&c.hv[cc - 2].trim(order).mul(&nc.deriv(b).trim(order)));
                if b == cc {
                    s = s.sub(&frame_deriv(&c.hv[b - 2], i, c));
                }
                z[i][b][cc] = ghi[i].trim(order).mul(&s).scale(0.5);
            }
        }
    }
    // Z^i_{jk} = Z^a_{bk} = Z^a_{bc} = 0 identically
    Ok(z)
}

fn add_gamma(a: &GammaJets, b: &GammaJets) -> GammaJets {
    let order = a[0][0][0].order();
    let mut out = zero_gamma(order);
    for c in 0..4 {
        for v in 0..4 {
            for d in 0..4 {
                out[c][v][d] = a[c][v][d].add(&b[c][v][d]);
            }
        }
    }
    out
}

/// Christoffel symbols of a coordinate metric given as a jet matrix of
/// order `order + 1`.
pub fn christoffel_of_matrix(gj: &crate::linalg::JetMat4, order: usize) -> Result<GammaJets> {
    let gi = jet_mat_inv(gj, order + 1)?;
    let mut out = zero_gamma(order);
    for mu in 0..4 {
        for nu in 0..4 {
            for la in 0..4 {
                let mut s = Jet::constant(0.0, order);
                for rho in 0..4 {
                    let t = gj[nu][rho]
                        .deriv(la)
                        .trim(order)
                        .add(&gj[la][rho].deriv(nu).trim(order))
                        .sub(&gj[nu][la].deriv(rho).trim(order));
                    s = s.add(&gi[mu][rho].trim(order).mul(&t));
                }
                out[mu][nu][la] = s.scale(0.5);
            }
        }
    }
    Ok(out)
}

/// Christoffel symbols of the assembled coordinate metric, as jets.
pub fn coordinate_gamma_jets(m: &DMetric, p: Point, order: usize) -> Result<GammaJets> {
    christoffel_of_matrix(&m.assemble_jets(p, order + 1)?, order)
}

/// Connection coefficients of the requested flavor as jets.
pub fn gamma_jets(m: &DMetric, p: Point, flavor: Flavor, order: usize) -> Result<GammaJets> {
    match flavor {
        Flavor::Canonical => {
            let c = m.coeff_jets(p, order + 1)?;
            canonical_gamma_jets(&c, order)
        }
        Flavor::Distortion => {
            let c = m.coeff_jets(p, order + 1)?;
            distortion_gamma_jets(&c, order)
        }
        Flavor::LcAdapted => {
            let c = m.coeff_jets(p, order + 1)?;
            Ok(add_gamma(
                &canonical_gamma_jets(&c, order)?,
                &distortion_gamma_jets(&c, order)?,
            ))
        }
        Flavor::ChristoffelCoordinate => coordinate_gamma_jets(m, p, order),
    }
}

/// Canonical d-connection at a point.
pub fn canonical_dconnection(m: &DMetric, p: Point) -> Result<ConnectionCoefficients> {
    Ok(ConnectionCoefficients::from_jets(
        &gamma_jets(m, p, Flavor::Canonical, 0)?,
        Flavor::Canonical,
    ))
}

/// Distortion tensor at a point.
pub fn distortion(m: &DMetric, p: Point) -> Result<ConnectionCoefficients> {
    Ok(ConnectionCoefficients::from_jets(
        &gamma_jets(m, p, Flavor::Distortion, 0)?,
        Flavor::Distortion,
    ))
}

/// Levi-Civita connection in the N-adapted frame (canonical + distortion).
pub fn lc_adapted(m: &DMetric, p: Point) -> Result<ConnectionCoefficients> {
    Ok(ConnectionCoefficients::from_jets(
        &gamma_jets(m, p, Flavor::LcAdapted, 0)?,
        Flavor::LcAdapted,
    ))
}

/// Coordinate Christoffel symbols of the assembled matrix.
pub fn christoffel_coordinate(m: &DMetric, p: Point) -> Result<ConnectionCoefficients> {
    Ok(ConnectionCoefficients::from_jets(
        &gamma_jets(m, p, Flavor::ChristoffelCoordinate, 0)?,
        Flavor::ChristoffelCoordinate,
    ))
}

/// Torsion T^c_{ab} of a connection in the N-adapted frame:
/// T(e_a, e_b) = D_a e_b - D_b e_a - [e_a, e_b].
pub fn torsion_of(gamma: &GammaJets, c: &CoeffJets, order: usize) -> TensorComponents {
    let w = anholonomy_jets(c, order);
    let mut t = TensorComponents::zeros(&[Variance::Contra, Variance::Co, Variance::Co]);
    for g in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let val =
                    gamma[g][b][a].value() - gamma[g][a][b].value() - w[g][a][b].value();
                t.set(&[g, a, b], val);
            }
        }
    }
    t
}

/// Canonical d-torsion of the metric at `p`. The pure-h and pure-v blocks
/// vanish identically; the mixed blocks are the nonholonomically induced
/// torsion.
pub fn dtorsion(m: &DMetric, p: Point) -> Result<TensorComponents> {
    let c = m.coeff_jets(p, 1)?;
    let gamma = canonical_gamma_jets(&c, 0)?;
    Ok(torsion_of(&gamma, &c, 0))
}

/// Max |D_c g_{ab}| over all slots for the given connection coefficients.
pub fn compat_residual_of(gamma: &ConnectionCoefficients, m: &DMetric, p: Point) -> Result<f64> {
    let c = m.coeff_jets(p, 1)?;
    let diag = [c.g[0], c.g[1], c.hv[0], c.hv[1]];
    let mut worst = 0.0f64;
    for ga in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                let mut r = if al == be {
                    frame_deriv(&diag[al], ga, &c).value()
                } else {
                    0.0
                };
                // -Gamma^rho_{al ga} g_{rho be} - Gamma^rho_{be ga} g_{al rho}
                r -= gamma.get(be, al, ga) * diag[be].value();
                r -= gamma.get(al, be, ga) * diag[al].value();
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Metric-compatibility residual of the canonical d-connection.
pub fn metric_compat_residual(m: &DMetric, p: Point) -> Result<f64> {
    let gamma = canonical_dconnection(m, p)?;
    compat_residual_of(&gamma, m, p)
}

/// Transform N-adapted connection coefficients to the coordinate frame:
/// Gamma_coord^lam_{nu mu} for D_{d_mu} d_nu, including the inhomogeneous
/// frame-derivative term. Needs gamma as jets of order >= 0 and coefficient
/// jets of order >= 1.
pub fn to_coordinate_frame(
    gamma: &GammaJets,
    c: &CoeffJets,
) -> Box<[[[f64; 4]; 4]; 4]> {
    let order = gamma[0][0][0].order();
    // coframe matrix rows: G[alpha][mu]; d_mu = sum_alpha G_t[mu][alpha] e_alpha
    // where G_t is the coframe transposed in the (alpha, mu) sense below.
    // d_i = e_i + w_i e_3 + n_i e_4, d_a = e_a:
    // Cm[mu][alpha]: d_mu = Cm[mu][al] e_al
    let zero = Jet::constant(0.0, order + 1);
    let one = Jet::constant(1.0, order + 1);
    let mut cm = [[zero; 4]; 4];
    for mu in 0..4 {
        cm[mu][mu] = one;
    }
    for i in 0..2 {
        cm[i][2] = c.w[i];
        cm[i][3] = c.n[i];
    }
    // frame rows F[alpha][mu]: e_al = F[al][mu] d_mu
    let mut fm = [[0.0; 4]; 4];
    for al in 0..4 {
        fm[al][al] = 1.0;
    }
    for i in 0..2 {
        fm[i][2] = -c.w[i].value();
        fm[i][3] = -c.n[i].value();
    }
    let mut out = Box::new([[[0.0; 4]; 4]; 4]);
    for la in 0..4 {
        for nu in 0..4 {
            for mu in 0..4 {
                let mut s = 0.0;
                for al in 0..4 {
                    for ga in 0..4 {
                        let mut inner = frame_deriv(&cm[nu][ga], al, c).value();
                        for be in 0..4 {
                            inner += cm[nu][be].value() * gamma[ga][be][al].value();
                        }
                        s += cm[la][al].value() * inner * fm[ga][mu];
                    }
                }
                out[mu][nu][la] = s;
            }
        }
    }
    out
}
