//! Surface waves along an arbitrary in-plane direction θ (from [100]) on
//! the (001) face.
//!
//! For each trial velocity the sextic `det M(q) = 0` of the rotated
//! Christoffel matrix is solved, decaying partials are kept, and the
//! stress-free boundary matrix B is assembled. The surface velocity is the
//! lowest minimum of `|det B|` over the scan window.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::MaterialRecord;
use crate::poly;

const SCAN_POINTS: usize = 2000;
const KEEP_RE: f64 = 1e-9;
/// Minima where a partial is close to grazing (`|q| → 0`) are bulk-branch
/// artefacts, not surface modes.
const GRAZING_Q: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralModeSolution {
    pub theta: f64,
    pub c: f64,
    /// Decaying roots (Re q > 0).
    pub roots: Vec<Complex64>,
    /// Unit displacement polarization `(ξ, η, ζ)` per decaying root.
    pub amplitude_vectors: Vec<[Complex64; 3]>,
    /// Non-decaying partials that complete the boundary problem when fewer
    /// than three roots decay (decoupled bulk polarizations).
    pub bulk_roots: Vec<Complex64>,
    /// Null vector of B: weights of the partials, decaying ones first.
    #[serde(rename = "K")]
    pub k: [Complex64; 3],
    pub det_b: f64,
}

type Tensor = [[[[f64; 3]; 3]; 3]; 3];

/// Cubic stiffness tensor scaled by c11, rotated by θ about [001].
fn rotated_tensor(c11: f64, c12: f64, c44: f64, theta: f64) -> Tensor {
    let mut c = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    c[i][j][k][l] = if i == j && k == l {
                        if i == k {
                            1.0
                        } else {
                            c12 / c11
                        }
                    } else if (i == k && j == l) || (i == l && j == k) {
                        c44 / c11
                    } else {
                        0.0
                    };
                }
            }
        }
    }
    let (s, co) = theta.sin_cos();
    let r = [[co, s, 0.0], [-s, co, 0.0], [0.0, 0.0, 1.0]];
    let mut out = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                for d in 0..3 {
                    let mut acc = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            for k in 0..3 {
                                for l in 0..3 {
                                    acc += r[a][i] * r[b][j] * r[cc][k] * r[d][l] * c[i][j][k][l];
                                }
                            }
                        }
                    }
                    out[a][b][cc][d] = acc;
                }
            }
        }
    }
    out
}

struct Problem {
    c: Tensor,
    /// ρ/c11 [s²/m²].
    rho_over_c11: f64,
}

type PolyMatrix = [[Vec<Complex64>; 3]; 3];

impl Problem {
    /// `M(q)` entries as polynomials in q (ascending): with ∂ → ik m,
    /// `m = (1, 0, iq)`, `M_ik = C_i1k1 + iq(C_i1k3 + C_i3k1) − q² C_i3k3 − X δ_ik`.
    fn christoffel(&self, x: f64) -> PolyMatrix {
        let c = &self.c;
        let i = Complex64::i();
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let delta = if a == b { x } else { 0.0 };
                vec![
                    Complex64::new(c[a][0][b][0] - delta, 0.0),
                    i * (c[a][0][b][2] + c[a][2][b][0]),
                    Complex64::new(-c[a][2][b][2], 0.0),
                ]
            })
        })
    }

    fn eval(pm: &PolyMatrix, q: Complex64) -> Matrix3<Complex64> {
        Matrix3::from_fn(|a, b| poly::eval(&pm[a][b], q))
    }

    fn sextic(pm: &PolyMatrix) -> Vec<Complex64> {
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
            poly::add(
                &poly::mul(&pm[r1][c1], &pm[r2][c2]),
                &poly::scale(&poly::mul(&pm[r1][c2], &pm[r2][c1]), Complex64::new(-1.0, 0.0)),
            )
        };
        let t0 = poly::mul(&pm[0][0], &minor(1, 2, 1, 2));
        let t1 = poly::mul(&pm[0][1], &minor(1, 2, 0, 2));
        let t2 = poly::mul(&pm[0][2], &minor(1, 2, 0, 1));
        poly::add(&poly::add(&t0, &poly::scale(&t1, Complex64::new(-1.0, 0.0))), &t2)
    }

    /// Traction column `T_i3 = C_i3kl m_l A_k` for a partial.
    fn traction(&self, q: Complex64, amp: &Vector3<Complex64>) -> Vector3<Complex64> {
        let m = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::i() * q];
        Vector3::from_fn(|i, _| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..3 {
                for l in 0..3 {
                    acc += self.c[i][2][k][l] * m[l] * amp[k];
                }
            }
            acc
        })
    }
}

fn cofactor_kernel(m: &Matrix3<Complex64>) -> Vector3<Complex64> {
    let mut best = Vector3::zeros();
    let mut best_norm = -1.0;
    for r in 0..3 {
        let (a, b) = ((r + 1) % 3, (r + 2) % 3);
        let v = Vector3::new(
            m[(a, 1)] * m[(b, 2)] - m[(a, 2)] * m[(b, 1)],
            m[(a, 2)] * m[(b, 0)] - m[(a, 0)] * m[(b, 2)],
            m[(a, 0)] * m[(b, 1)] - m[(a, 1)] * m[(b, 0)],
        );
        let n = v.norm();
        if n > best_norm {
            best_norm = n;
            best = v;
        }
    }
    best / Complex64::new(best_norm, 0.0)
}

/// Right null space of dimension `dim` from the SVD.
fn svd_kernel(m: &Matrix3<Complex64>, dim: usize) -> Vec<Vector3<Complex64>> {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    idx.into_iter()
        .take(dim)
        .map(|r| vt.row(r).adjoint().into_owned())
        .collect()
}

struct Partials {
    decaying: Vec<Complex64>,
    bulk: Vec<Complex64>,
    amps: Vec<Vector3<Complex64>>,
    b: Matrix3<Complex64>,
}

fn partials(p: &Problem, x: f64) -> Option<Partials> {
    let pm = p.christoffel(x);
    let roots = poly::roots(&Problem::sextic(&pm)).ok()?;
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut decaying: Vec<Complex64> = roots.iter().copied().filter(|q| q.re > KEEP_RE * scale).collect();
    let mut bulk: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|q| q.re.abs() <= KEEP_RE * scale && q.im >= 0.0)
        .collect();
    decaying.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    bulk.sort_by(|a, b| a.im.total_cmp(&b.im));
    if decaying.len() > 3 {
        return None;
    }
    bulk.truncate(3 - decaying.len());
    let all: Vec<Complex64> = decaying.iter().chain(bulk.iter()).copied().collect();
    if all.len() != 3 {
        return None;
    }

    // Clusters of (numerically) repeated roots share a multi-dimensional kernel.
    let mut amps: Vec<Option<Vector3<Complex64>>> = vec![None; 3];
    let mut qs = all.clone();
    for i in 0..3 {
        if amps[i].is_some() {
            continue;
        }
        let cluster: Vec<usize> = (i..3)
            .filter(|&j| amps[j].is_none() && (all[j] - all[i]).norm() < 1e-6 * (1.0 + all[i].norm()))
            .collect();
        let mean = cluster.iter().map(|&j| all[j]).sum::<Complex64>() / cluster.len() as f64;
        let m = Problem::eval(&pm, mean);
        if cluster.len() == 1 {
            amps[i] = Some(cofactor_kernel(&m));
        } else {
            for (&j, v) in cluster.iter().zip(svd_kernel(&m, cluster.len())) {
                amps[j] = Some(v);
                qs[j] = mean;
            }
        }
    }
    let amps: Vec<Vector3<Complex64>> = amps.into_iter().map(|a| a.expect("filled")).collect();
    let cols: Vec<Vector3<Complex64>> = qs.iter().zip(&amps).map(|(&q, a)| p.traction(q, a)).collect();
    let b = Matrix3::from_columns(&cols);
    let n_dec = decaying.len();
    Some(Partials {
        decaying: qs[..n_dec].to_vec(),
        bulk: qs[n_dec..].to_vec(),
        amps,
        b,
    })
}

fn det_measure(p: &Problem, c: f64) -> Option<(f64, f64)> {
    let parts = partials(p, p.rho_over_c11 * c * c)?;
    let min_q = parts
        .decaying
        .iter()
        .chain(parts.bulk.iter())
        .map(|q| q.norm())
        .fold(f64::INFINITY, f64::min);
    Some((parts.b.determinant().norm(), min_q))
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > rel_tol * 0.5 * (a + b).abs() {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// `|det B|` and the smallest partial `|q|` at trial velocity `c`.
pub fn boundary_det(m: &MaterialRecord, theta: f64, c: f64) -> Option<(f64, f64)> {
    let (c11, c12, c44) = m.elastic()?;
    let p = Problem {
        c: rotated_tensor(c11, c12, c44, theta),
        rho_over_c11: m.density / c11,
    };
    det_measure(&p, c)
}

/// Default scan window `[0.5, 1.0]·√(c44/ρ)`.
pub fn default_window(m: &MaterialRecord) -> Option<(f64, f64)> {
    let v = (m.c44? / m.density).sqrt();
    Some((0.5 * v, v))
}

pub fn solve_general(m: &MaterialRecord, theta: f64, c_window: (f64, f64)) -> Result<GeneralModeSolution> {
    let (c11, c12, c44) = m.elastic().ok_or_else(|| Error::MissingElastic(m.name.clone()))?;
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside [0, π/2]")));
    }
    let (lo, hi) = c_window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad velocity window ({lo}, {hi})")));
    }
    let p = Problem {
        c: rotated_tensor(c11, c12, c44, theta),
        rho_over_c11: m.density / c11,
    };
    let measure = |c: f64| det_measure(&p, c).map(|d| d.0).unwrap_or(f64::INFINITY);

    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&c| measure(c)).collect();
    let scan_max = vals.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let tol = 1e-4 * scan_max;

    let mut best = f64::INFINITY;
    for i in 1..SCAN_POINTS - 1 {
        if !(vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i].is_finite()) {
            continue;
        }
        let c = golden_min(measure, grid[i - 1], grid[i + 1], 1e-6);
        let Some((d, min_q)) = det_measure(&p, c) else {
            continue;
        };
        best = best.min(d);
        if d > tol || min_q < GRAZING_Q {
            continue;
        }
        let parts = partials(&p, p.rho_over_c11 * c * c).expect("evaluated above");
        let kv = svd_kernel(&parts.b, 1).remove(0);
        let to_arr = |v: &Vector3<Complex64>| [v[0], v[1], v[2]];
        let n_dec = parts.decaying.len();
        return Ok(GeneralModeSolution {
            theta,
            c,
            amplitude_vectors: parts.amps[..n_dec].iter().map(to_arr).collect(),
            roots: parts.decaying,
            bulk_roots: parts.bulk,
            k: to_arr(&kv),
            det_b: d,
        });
    }
    Err(Error::NoSurfaceMode { lo, hi, best })
}

/// Rayleigh speed ratio `c_R/c_T` of an isotropic solid with `κ = c_T/c_L`,
/// from `(2−ξ²)² = 4√(1−ξ²)√(1−κ²ξ²)`.
pub fn isotropic_rayleigh_ratio(kappa: f64) -> f64 {
    let f = |x: f64| {
        let x2 = x * x;
        (2.0 - x2).powi(2) - 4.0 * (1.0 - x2).sqrt() * (1.0 - kappa * kappa * x2).sqrt()
    };
    let (mut a, mut b) = (0.1, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
