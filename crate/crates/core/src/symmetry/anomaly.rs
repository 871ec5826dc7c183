//! Quantum-anomaly commutator coefficients for rank-2 hidden symmetries and
//! their vanishing on Einstein solutions.

use super::killing::SymTensorField;
use crate::connection::{gamma_jets, Flavor, GammaJets};
use crate::curvature::{einstein_residual, ricci_jets};
use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::jet::Jet;
use crate::metric::{frame_deriv, CoeffJets, DMetric};
use crate::solution::SourceSpec;

type Mat4J = [[Jet; 4]; 4];

fn inv_diag(c: &CoeffJets) -> Result<[Jet; 4]> {
    Ok([
        c.g[0].recip()?,
        c.g[1].recip()?,
        c.hv[0].recip()?,
        c.hv[1].recip()?,
    ])
}

/// Contravariant jets of a covariant symmetric field (diag d-metric raise).
fn contra_k_jets(m: &DMetric, k: &SymTensorField, p: Point, order: usize) -> Result<Mat4J> {
    let c = m.coeff_jets(p, order)?;
    let inv = inv_diag(&c)?;
    let kk = k.jet_matrix(p, order)?;
    let mut out = [[Jet::constant(0.0, order); 4]; 4];
    for al in 0..4 {
        for be in 0..4 {
            out[al][be] = inv[al].mul(&inv[be]).mul(&kk[al][be]);
        }
    }
    Ok(out)
}

/// The antisymmetrized Ricci-Killing product M^{cb} = Ric^{[c}_n K^{b]n}
/// as jets: the quantity whose vanishing kills the rank-2 anomaly.
fn antisym_ricci_k(
    m: &DMetric,
    k: &SymTensorField,
    p: Point,
    order: usize,
) -> Result<Mat4J> {
    let ric = ricci_jets(m, p, Flavor::Canonical, order)?;
    let c = m.coeff_jets(p, order)?;
    let inv = inv_diag(&c)?;
    let kup = contra_k_jets(m, k, p, order)?;
    // Ric^c_n = g^{cc} Ric_{c n}; K^{bn}; M0^{cb} = Ric^c_n K^{bn}
    let mut m0 = [[Jet::constant(0.0, order); 4]; 4];
    for cc in 0..4 {
        for b in 0..4 {
            let mut s = Jet::constant(0.0, order);
            for n in 0..4 {
                s = s.add(&inv[cc].mul(&ric[cc][n]).mul(&kup[b][n]));
            }
            m0[cc][b] = s;
        }
    }
    let mut out = [[Jet::constant(0.0, order); 4]; 4];
    for cc in 0..4 {
        for b in 0..4 {
            out[cc][b] = m0[cc][b].sub(&m0[b][cc]).scale(0.5);
        }
    }
    Ok(out)
}

/// Pointwise max |Ric^{[c}_n K^{b]n}|; the antisymmetrized-symmetric
/// nullity on Einstein solutions.
pub fn sk_antisym_defect(m: &DMetric, k: &SymTensorField, p: Point) -> Result<f64> {
    let mm = antisym_ricci_k(m, k, p, 0)?;
    Ok(mm
        .iter()
        .flatten()
        .fold(0.0f64, |a, j| a.max(j.value().abs())))
}

/// Divergence of a (2,0)-tensor jet matrix: D_c T^{cb} (values).
fn divergence2(
    t: &Mat4J,
    gamma: &GammaJets,
    c: &CoeffJets,
) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (b, ob) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for cc in 0..4 {
            s += frame_deriv(&t[cc][b], cc, c).value();
            for rho in 0..4 {
                s += gamma[cc][rho][cc].value() * t[rho][b].value();
                s += gamma[b][rho][cc].value() * t[cc][rho].value();
            }
        }
        *ob = s;
    }
    out
}

/// A^b = -(4/3) D_c ( Ric^{[c}_n K^{b]n} ) for the canonical d-connection.
pub fn sk_anomaly(m: &DMetric, k: &SymTensorField, p: Point) -> Result<[f64; 4]> {
    let mm = antisym_ricci_k(m, k, p, 1)?;
    let c = m.coeff_jets(p, 2)?;
    let gamma = gamma_jets(m, p, Flavor::Canonical, 0)?;
    let div = divergence2(&mm, &gamma, &c);
    Ok(std::array::from_fn(|b| -4.0 / 3.0 * div[b]))
}

/// Fully symmetrized first covariant gradient S^{cab} = D^{(c} K^{ab)},
/// as jets of the given order. Consumes K jets of order + 1.
fn sym_grad_jets(
    m: &DMetric,
    k: &SymTensorField,
    p: Point,
    order: usize,
) -> Result<Box<[[[Jet; 4]; 4]; 4]>> {
    let c = m.coeff_jets(p, order + 1)?;
    let inv = inv_diag(&c)?;
    let gamma = gamma_jets(m, p, Flavor::Canonical, order)?;
    let kup = contra_k_jets(m, k, p, order + 1)?;
    // D^c K^{ab} = g^{cc} [ e_c K^{ab} + G^a_{rc} K^{rb} + G^b_{rc} K^{ar} ]
    let mut dk = Box::new([[[Jet::constant(0.0, order); 4]; 4]; 4]);
    for cc in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = frame_deriv(&kup[a][b], cc, &c);
                for rho in 0..4 {
                    s = s.add(&gamma[a][rho][cc].mul(&kup[rho][b].trim(order)));
                    s = s.add(&gamma[b][rho][cc].mul(&kup[a][rho].trim(order)));
                }
                dk[cc][a][b] = inv[cc].trim(order).mul(&s);
            }
        }
    }
    // full symmetrization over the three slots
    let mut out = Box::new([[[Jet::constant(0.0, order); 4]; 4]; 4]);
    for cc in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let s = dk[cc][a][b]
                    .add(&dk[a][b][cc])
                    .add(&dk[b][cc][a])
                    .add(&dk[cc][b][a])
                    .add(&dk[a][cc][b])
                    .add(&dk[b][a][cc])
                    .scale(1.0 / 6.0);
                out[cc][a][b] = s;
            }
        }
    }
    Ok(out)
}

/// The three coefficient blocks of the wave-operator commutator with a
/// rank-2 flow D_a K^{ab} D_b: the three-derivative block 2 D^{(c}K^{ab)},
/// the two-derivative block 3 D_m D^{(c}K^{mb)}, and the one-derivative
/// block combining the curvature term with second gradients.
pub struct CommutatorBlocks {
    pub three: Box<[[[f64; 4]; 4]; 4]>,
    pub two: [[f64; 4]; 4],
    pub one: [f64; 4],
}

pub fn rank2_commutator_coeffs(
    m: &DMetric,
    k: &SymTensorField,
    p: Point,
) -> Result<CommutatorBlocks> {
    let c2 = m.coeff_jets(p, 2)?;
    let gamma0 = gamma_jets(m, p, Flavor::Canonical, 0)?;
    let gamma1 = gamma_jets(m, p, Flavor::Canonical, 1)?;

    let s2 = sym_grad_jets(m, k, p, 2)?;
    let mut three = Box::new([[[0.0; 4]; 4]; 4]);
    for cc in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                three[cc][a][b] = 2.0 * s2[cc][a][b].value();
            }
        }
    }

    // two^{cb} = 3 D_m S^{cmb}
    let mut two = [[0.0; 4]; 4];
    for cc in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                s += frame_deriv(&s2[cc][mu][b].trim(1), mu, &c2).value();
                for rho in 0..4 {
                    s += gamma0[cc][rho][mu].value() * s2[rho][mu][b].value();
                    s += gamma0[mu][rho][mu].value() * s2[cc][rho][b].value();
                    s += gamma0[b][rho][mu].value() * s2[cc][mu][rho].value();
                }
            }
            two[cc][b] = 3.0 * s;
        }
    }

    // U^{cb} = 1/2 g_{mt} (D^c S^{mtb} - D^b S^{mct}) + D_a S^{cab}, as jets
    // of order 1, then one^b = -(4/3) D_c M^{cb} + D_c U^{cb}.
    let c1 = m.coeff_jets(p, 1)?;
    let inv1 = inv_diag(&c1)?;
    let diag1 = [c1.g[0], c1.g[1], c1.hv[0], c1.hv[1]];
    let ds = |up: usize, a: usize, b: usize, cdir: usize| -> Jet {
        // D_cdir S^{up a b} at order 1
        let mut s = frame_deriv(&s2[up][a][b], cdir, &c2);
        for rho in 0..4 {
            s = s.add(&gamma1[up][rho][cdir].mul(&s2[rho][a][b].trim(1)));
            s = s.add(&gamma1[a][rho][cdir].mul(&s2[up][rho][b].trim(1)));
            s = s.add(&gamma1[b][rho][cdir].mul(&s2[up][a][rho].trim(1)));
        }
        s
    };
    let mut u = [[Jet::constant(0.0, 1); 4]; 4];
    for cc in 0..4 {
        for b in 0..4 {
            let mut s = Jet::constant(0.0, 1);
            // 1/2 g_{mt} (D^c S^{mtb} - D^b S^{mct}), diag metric
            for mt in 0..4 {
                let dc = inv1[cc].mul(&ds(mt, mt, b, cc));
                let db = inv1[b].mul(&ds(mt, cc, mt, b));
                s = s.add(&diag1[mt].mul(&dc.sub(&db)).scale(0.5));
            }
            // + D_a S^{cab}
            for a in 0..4 {
                s = s.add(&ds(cc, a, b, a));
            }
            u[cc][b] = s;
        }
    }
    let mm = antisym_ricci_k(m, k, p, 1)?;
    let div_m = divergence2(&mm, &gamma0, &c1);
    let div_u = divergence2(&u, &gamma0, &c1);
    let one = std::array::from_fn(|b| -4.0 / 3.0 * div_m[b] + div_u[b]);

    Ok(CommutatorBlocks { three, two, one })
}

/// The wave operator as a scalar field (canonical d-connection).
pub fn box_field(m: &DMetric, f: &Field) -> Field {
    let m = m.clone();
    let f = f.clone();
    Field::from_fn(DepMask::ALL, move |p, order| {
        let c = m.coeff_jets(p, order + 2)?;
        let inv = inv_diag(&c)?;
        let gamma = gamma_jets(&m, p, Flavor::Canonical, order)?;
        let fj = f.jet(p, order + 2)?;
        let ef: [Jet; 4] = std::array::from_fn(|al| frame_deriv(&fj, al, &c));
        let mut s = Jet::constant(0.0, order);
        for b in 0..4 {
            let mut t = frame_deriv(&ef[b], b, &c);
            for mu in 0..4 {
                t = t.sub(&gamma[mu][b][b].mul(&ef[mu].trim(order)));
            }
            s = s.add(&inv[b].trim(order).mul(&t));
        }
        Ok(s)
    })
}

/// The rank-2 flow operator Q f = D_a (K^{ab} D_b f) as a scalar field.
pub fn flow_field(m: &DMetric, k: &SymTensorField, f: &Field) -> Field {
    let m = m.clone();
    let k = k.clone();
    let f = f.clone();
    Field::from_fn(DepMask::ALL, move |p, order| {
        let c = m.coeff_jets(p, order + 2)?;
        let gamma = gamma_jets(&m, p, Flavor::Canonical, order)?;
        let kup = contra_k_jets(&m, &k, p, order + 1)?;
        let fj = f.jet(p, order + 2)?;
        // T^a = K^{ab} e_b f at order + 1
        let mut t = [Jet::constant(0.0, order + 1); 4];
        for (a, ta) in t.iter_mut().enumerate() {
            let mut s = Jet::constant(0.0, order + 1);
            for b in 0..4 {
                s = s.add(&kup[a][b].mul(&frame_deriv(&fj, b, &c).trim(order + 1)));
            }
            *ta = s;
        }
        // Q f = e_a T^a + G^a_{ra} T^r
        let mut s = Jet::constant(0.0, order);
        for a in 0..4 {
            s = s.add(&frame_deriv(&t[a], a, &c));
            for rho in 0..4 {
                s = s.add(&gamma[a][rho][a].mul(&t[rho].trim(order)));
            }
        }
        Ok(s)
    })
}

/// Direct nested evaluation of the commutator [box, Q] f at a point.
pub fn commutator_probe(m: &DMetric, k: &SymTensorField, f: &Field, p: Point) -> Result<f64> {
    let qf = flow_field(m, k, f);
    let bf = box_field(m, f);
    let b_of_q = box_field(m, &qf).eval(p)?;
    let q_of_b = flow_field(m, k, &bf).eval(p)?;
    Ok(b_of_q - q_of_b)
}

/// Contract the coefficient blocks against covariant derivatives of f;
/// the oracle partner of [`commutator_probe`].
pub fn blocks_applied(
    m: &DMetric,
    blocks: &CommutatorBlocks,
    f: &Field,
    p: Point,
) -> Result<f64> {
    let c = m.coeff_jets(p, 3)?;
    let gamma = gamma_jets(m, p, Flavor::Canonical, 1)?;
    let fj = f.jet(p, 3)?;
    // D f (order 2), D^2 f (order 1), D^3 f (values)
    let df: [Jet; 4] = std::array::from_fn(|b| frame_deriv(&fj, b, &c));
    let mut d2 = [[Jet::constant(0.0, 1); 4]; 4];
    for al in 0..4 {
        for be in 0..4 {
            let mut s = frame_deriv(&df[be], al, &c);
            for rho in 0..4 {
                s = s.sub(&gamma[rho][be][al].mul(&df[rho].trim(1)));
            }
            d2[al][be] = s;
        }
    }
    let mut d3 = [[[0.0; 4]; 4]; 4];
    for ga in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                let mut s = frame_deriv(&d2[al][be], ga, &c).value();
                for rho in 0..4 {
                    s -= gamma[rho][al][ga].value() * d2[rho][be].value();
                    s -= gamma[rho][be][ga].value() * d2[al][rho].value();
                }
                d3[ga][al][be] = s;
            }
        }
    }
    let mut total = 0.0;
    for ga in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                total += blocks.three[ga][al][be] * d3[ga][al][be];
            }
        }
    }
    for ga in 0..4 {
        for be in 0..4 {
            total += blocks.two[ga][be] * d2[be][ga].value();
        }
    }
    for (be, b1) in blocks.one.iter().enumerate() {
        total += b1 * df[be].value();
    }
    Ok(total)
}

/// Grid-level anomaly verdict on an Einstein-verified solution.
#[derive(Clone, Debug)]
pub struct AnomalyReport {
    pub einstein_max: f64,
    pub anomaly_max: f64,
    pub antisym_max: f64,
    pub lc_max: f64,
    /// True when the zero-torsion constraints also hold, i.e. the vanishing
    /// extends to the Levi-Civita branch.
    pub lc_branch: bool,
}

/// Check max |sk_anomaly| over sampled points of an Einstein solution;
/// refuses when the Einstein residual precondition fails.
pub fn anomaly_vanishing_check(
    solution: &DMetric,
    lambda: f64,
    k: &SymTensorField,
    points: &[Point],
) -> Result<AnomalyReport> {
    let src = SourceSpec::cosmological(lambda);
    let mut einstein_max = 0.0f64;
    let mut anomaly_max = 0.0f64;
    let mut antisym_max = 0.0f64;
    let mut lc_max = 0.0f64;
    for &p in points {
        let e = einstein_residual(solution, &src, p)?.max_abs();
        einstein_max = einstein_max.max(e);
        if e > 1e-7 {
            return Err(Error::Branch(format!(
                "not an Einstein-verified solution: |Ric - lambda g| = {e:.3e} at {:?}",
                p.0
            )));
        }
    }
    for &p in points {
        let a = sk_anomaly(solution, k, p)?;
        anomaly_max = anomaly_max.max(a.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        antisym_max = antisym_max.max(sk_antisym_defect(solution, k, p)?);
        let lc = crate::solution::lc_condition_residual(solution, p)?;
        lc_max = lc_max.max(lc.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    Ok(AnomalyReport {
        einstein_max,
        anomaly_max,
        antisym_max,
        lc_max,
        lc_branch: lc_max < 1e-9,
    })
}
