//! The coherence-vector form of the Lindblad master equation.
//!
//! A channel is a complex vector g with jump operator γ̂ = g·λ (the identity
//! component is not modeled). Inserting ρ = 𝟙/N + x·λ into
//!
//!   ∂_t ρ = (1/i)[H, ρ] + Σ_k ( γ̂_k ρ γ̂_k† − ½{γ̂_k†γ̂_k, ρ} )
//!
//! and matching generator components yields the affine flow ẋ = M x + b with
//!
//!   M = M⁽⁰⁾ + Σ_k (G⁽⁺⁾_k + G⁽⁻⁾_k),      b = Σ_k b_k,
//!   M⁽⁰⁾_rt = 2 f_rst ω_s,
//!   G⁽⁺⁾_rt = f_rsm f_mvt C⁽⁺⁾_sv,
//!   G⁽⁻⁾_rt = (i/4)(d_rms f_mvt − d_rmt f_msv + 3 f_rms d_mvt) C⁽⁻⁾_sv,
//!   C⁽±⁾_sv = g*_s g_v ± g_s g*_v,
//!   b_k     = (2i/N) g_k ∧ g_k*.
//!
//! The source term b_k is computed from the wedge form; the alternative
//! component contraction f_rvs C⁽⁻⁾_sv evaluates to 2(g ∧ g*)_r = −3i·b_k,
//! which is purely imaginary and cannot be the real source — see
//! [`b_row_contraction`], kept for the verification report.
//!
//! [`liouvillian_direct`] applies the superoperator on N×N matrices and is
//! the independent oracle every assembled model is tested against.

use nalgebra::{DMatrix, DVector};

use crate::su_algebra::{
    wedge, CoherenceVector, DensityMatrix, GellMannBasis, HamiltonianDecomposition,
    StructureConstants,
};
use crate::{Complex, Error, Result};

/// Residual tolerance when extracting real parts of structurally real
/// quantities.
const REALITY_TOL: f64 = 1e-10;

/// One open-system channel: jump operator γ̂ = g·λ with the rate carried by
/// |g|² (units γ).
#[derive(Debug, Clone)]
pub struct LindbladChannel {
    pub label: String,
    pub g: DVector<Complex>,
}

impl LindbladChannel {
    pub fn new(label: impl Into<String>, g: DVector<Complex>) -> Self {
        Self { label: label.into(), g }
    }

    /// Matrix form γ̂ = g·λ.
    pub fn operator(&self, basis: &GellMannBasis) -> Result<DMatrix<Complex>> {
        basis.contract(&self.g)
    }
}

/// The symmetric (real) and antisymmetric (purely imaginary) channel
/// matrices C⁽±⁾_sv = g*_s g_v ± g_s g*_v.
#[derive(Debug, Clone)]
pub struct CMatrices {
    pub c_plus: DMatrix<f64>,
    pub c_minus: DMatrix<Complex>,
}

/// Build C⁽±⁾ for one channel.
pub fn c_matrices(ch: &LindbladChannel) -> CMatrices {
    let n = ch.g.len();
    let mut c_plus = DMatrix::zeros(n, n);
    let mut c_minus = DMatrix::zeros(n, n);
    for s in 0..n {
        for v in 0..n {
            let a = ch.g[s].conj() * ch.g[v];
            let b = ch.g[s] * ch.g[v].conj();
            c_plus[(s, v)] = (a + b).re;
            c_minus[(s, v)] = a - b;
        }
    }
    CMatrices { c_plus, c_minus }
}

/// Evolution model ẋ = M x + b (units γ).
#[derive(Debug, Clone)]
pub struct EvolutionModel {
    pub m: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl EvolutionModel {
    pub fn dim(&self) -> usize {
        self.b.len()
    }
}

/// Hamiltonian generator M⁽⁰⁾_rt = 2 f_rst ω_s, an antisymmetric matrix
/// generating a rotation of the coherence vector.
pub fn hamiltonian_generator(omega: &DVector<f64>, sc: &StructureConstants) -> Result<DMatrix<f64>> {
    let n = sc.n_generators();
    if omega.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: omega.len() });
    }
    let mut m0 = DMatrix::zeros(n, n);
    for s in 0..n {
        if omega[s] == 0.0 {
            continue;
        }
        for r in 0..n {
            for t in 0..n {
                let c = sc.f.get(r, s, t);
                if c != 0.0 {
                    m0[(r, t)] += 2.0 * c * omega[s];
                }
            }
        }
    }
    Ok(m0)
}

/// Generator matrices and source vector of one channel:
/// (G⁽⁺⁾, G⁽⁻⁾, b_k). G⁽⁺⁾ is symmetric; G⁽⁻⁾ and b_k vanish for real g.
pub fn channel_generators(
    ch: &LindbladChannel,
    sc: &StructureConstants,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)> {
    let n = sc.n_generators();
    if ch.g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ch.g.len() });
    }
    let cm = c_matrices(ch);

    // G+_rt = f_rsm f_mvt C+_sv, contracted via tmp[m][t] per s
    let mut g_plus = DMatrix::zeros(n, n);
    for s in 0..n {
        // skip rows of C+ that vanish
        if (0..n).all(|v| cm.c_plus[(s, v)] == 0.0) {
            continue;
        }
        let mut tmp = DMatrix::<f64>::zeros(n, n); // tmp[m][t] = Σ_v f_mvt C+_sv
        for m in 0..n {
            for v in 0..n {
                let c = cm.c_plus[(s, v)];
                if c == 0.0 {
                    continue;
                }
                for t in 0..n {
                    let fv = sc.f.get(m, v, t);
                    if fv != 0.0 {
                        tmp[(m, t)] += fv * c;
                    }
                }
            }
        }
        for r in 0..n {
            for m in 0..n {
                let fr = sc.f.get(r, s, m);
                if fr == 0.0 {
                    continue;
                }
                for t in 0..n {
                    g_plus[(r, t)] += fr * tmp[(m, t)];
                }
            }
        }
    }

    // G-_rt = (i/4)(d_rms f_mvt − d_rmt f_msv + 3 f_rms d_mvt) C-_sv
    let mut g_minus_c = DMatrix::<Complex>::zeros(n, n);
    for s in 0..n {
        for v in 0..n {
            let c = cm.c_minus[(s, v)];
            if c == Complex::new(0.0, 0.0) {
                continue;
            }
            for r in 0..n {
                for m in 0..n {
                    let d_rm_s = sc.d.get(r, m, s);
                    let f_rm_s = sc.f.get(r, m, s);
                    let f_msv = sc.f.get(m, s, v);
                    for t in 0..n {
                        let mut coeff = 0.0;
                        if d_rm_s != 0.0 {
                            coeff += d_rm_s * sc.f.get(m, v, t);
                        }
                        let d_rmt = sc.d.get(r, m, t);
                        if d_rmt != 0.0 && f_msv != 0.0 {
                            coeff -= d_rmt * f_msv;
                        }
                        if f_rm_s != 0.0 {
                            coeff += 3.0 * f_rm_s * sc.d.get(m, v, t);
                        }
                        if coeff != 0.0 {
                            g_minus_c[(r, t)] += Complex::new(0.0, 0.25) * coeff * c;
                        }
                    }
                }
            }
        }
    }
    let g_minus = real_part(&g_minus_c, "G-")?;

    // b_k = (2i/N) g ∧ g*
    let w = wedge(&ch.g, &ch.g.map(|z| z.conj()), sc)?;
    let pref = Complex::new(0.0, 2.0 / sc.dim() as f64);
    let b_k_c = w.map(|z| pref * z);
    let b_k = real_vector(&b_k_c, "b_k")?;

    Ok((g_plus, g_minus, b_k))
}

/// The source-row component contraction b_r = f_rvs C⁽⁻⁾_sv.
///
/// This evaluates to 2(g ∧ g*)_r — purely imaginary — and therefore cannot
/// be the real source vector; it is retained only so the verification report
/// can measure the deviation from the wedge-form source used by
/// [`channel_generators`].
pub fn b_row_contraction(ch: &LindbladChannel, sc: &StructureConstants) -> Result<DVector<Complex>> {
    let n = sc.n_generators();
    if ch.g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ch.g.len() });
    }
    let cm = c_matrices(ch);
    let mut out = DVector::<Complex>::zeros(n);
    for r in 0..n {
        let mut acc = Complex::new(0.0, 0.0);
        for v in 0..n {
            for s in 0..n {
                let c = sc.f.get(r, v, s);
                if c != 0.0 {
                    acc += c * cm.c_minus[(s, v)];
                }
            }
        }
        out[r] = acc;
    }
    Ok(out)
}

/// Assemble the full evolution model from a Hamiltonian vector and a channel
/// set.
pub fn assemble(
    omega: &DVector<f64>,
    channels: &[LindbladChannel],
    sc: &StructureConstants,
) -> Result<EvolutionModel> {
    let n = sc.n_generators();
    let mut m = hamiltonian_generator(omega, sc)?;
    let mut b = DVector::zeros(n);
    for ch in channels {
        let (gp, gm, bk) = channel_generators(ch, sc)?;
        m += gp + gm;
        b += bk;
    }
    Ok(EvolutionModel { m, b })
}

/// Right-hand side ẋ = M x + b.
pub fn rhs(x: &CoherenceVector, model: &EvolutionModel) -> Result<DVector<f64>> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: x.len() });
    }
    Ok(&model.m * &x.0 + &model.b)
}

/// Direct superoperator: (1/i)[H, ρ] + Σ_k (γ̂_k ρ γ̂_k† − ½{γ̂_k†γ̂_k, ρ})
/// with H = ω₀𝟙 + ω·λ and γ̂_k = g_k·λ. Returns dρ/dt as an N×N matrix; the
/// result is Hermitian and traceless.
pub fn liouvillian_direct(
    rho: &DensityMatrix,
    decomp: &HamiltonianDecomposition,
    channels: &[LindbladChannel],
    basis: &GellMannBasis,
) -> Result<DMatrix<Complex>> {
    let h = basis.contract_real(&decomp.omega)?
        + DMatrix::<Complex>::identity(basis.dim(), basis.dim())
            * Complex::new(decomp.omega0, 0.0);
    let r = rho.matrix();
    let mut out = (&h * r - r * &h) * Complex::new(0.0, -1.0);
    for ch in channels {
        let gam = ch.operator(basis)?;
        let gd = gam.adjoint();
        let gdg = &gd * &gam;
        out += &gam * r * &gd
            - (&gdg * r + r * &gdg) * Complex::new(0.5, 0.0);
    }
    Ok(out)
}

fn real_part(m: &DMatrix<Complex>, what: &str) -> Result<DMatrix<f64>> {
    let imax = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imax > REALITY_TOL {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {imax:.3e}"
        )));
    }
    Ok(m.map(|z| z.re))
}

fn real_vector(v: &DVector<Complex>, what: &str) -> Result<DVector<f64>> {
    let imax = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imax > REALITY_TOL {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {imax:.3e}"
        )));
    }
    Ok(v.map(|z| z.re))
}
