//! Generalized Gell-Mann bases, SU(N) structure constants, the wedge/star
//! vector products, and conversions between density matrices and coherence
//! vectors.
//!
//! Generators are Hermitian, traceless and normalized to Tr[λ_r λ_s] = 2δ_rs.
//! For N = 3 the ordering is the conventional λ₁…λ₈ on the ordered basis
//! {|b⟩, |c⟩, |a⟩}; for other N all symmetric pairs come first, then all
//! antisymmetric pairs, then the diagonal generators.
//!
//! The structure constants are computed from the trace formulas
//! f_rst = Tr([λ_r, λ_s] λ_t)/(4i) and d_rst = Tr({λ_r, λ_s} λ_t)/4 and
//! thresholded at 1e-12; no tabulated values are hard-coded.

use nalgebra::{DMatrix, DVector};

use crate::{Complex, Error, Result};

/// Entries below this magnitude are treated as float noise and zeroed.
pub const NOISE_THRESHOLD: f64 = 1e-12;

/// Hermiticity/trace tolerance for state validation.
const STATE_TOL: f64 = 1e-9;

/// The N²−1 traceless Hermitian generators of SU(N).
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    dim: usize,
    generators: Vec<DMatrix<Complex>>,
}

impl GellMannBasis {
    /// Build the generator basis for SU(N).
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let sym = |j: usize, k: usize| {
            let mut m = DMatrix::<Complex>::zeros(dim, dim);
            m[(j, k)] = Complex::new(1.0, 0.0);
            m[(k, j)] = Complex::new(1.0, 0.0);
            m
        };
        let asym = |j: usize, k: usize| {
            let mut m = DMatrix::<Complex>::zeros(dim, dim);
            m[(j, k)] = Complex::new(0.0, -1.0);
            m[(k, j)] = Complex::new(0.0, 1.0);
            m
        };
        let diag = |l: usize| {
            let mut m = DMatrix::<Complex>::zeros(dim, dim);
            let norm = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
            for i in 0..l {
                m[(i, i)] = Complex::new(norm, 0.0);
            }
            m[(l, l)] = Complex::new(-(l as f64) * norm, 0.0);
            m
        };

        let mut generators = Vec::with_capacity(dim * dim - 1);
        if dim == 3 {
            // conventional ordering, pinned
            generators.push(sym(0, 1));
            generators.push(asym(0, 1));
            generators.push(diag(1));
            generators.push(sym(0, 2));
            generators.push(asym(0, 2));
            generators.push(sym(1, 2));
            generators.push(asym(1, 2));
            generators.push(diag(2));
        } else {
            for j in 0..dim {
                for k in (j + 1)..dim {
                    generators.push(sym(j, k));
                }
            }
            for j in 0..dim {
                for k in (j + 1)..dim {
                    generators.push(asym(j, k));
                }
            }
            for l in 1..dim {
                generators.push(diag(l));
            }
        }
        Ok(Self { dim, generators })
    }

    /// Hilbert-space dimension N.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, N²−1.
    pub fn n_generators(&self) -> usize {
        self.dim * self.dim - 1
    }

    /// The r-th generator (0-based).
    pub fn generator(&self, r: usize) -> &DMatrix<Complex> {
        &self.generators[r]
    }

    /// All generators in order.
    pub fn generators(&self) -> &[DMatrix<Complex>] {
        &self.generators
    }

    /// Contract a coefficient vector with the generators: Σ_r v_r λ_r.
    pub fn contract(&self, v: &DVector<Complex>) -> Result<DMatrix<Complex>> {
        if v.len() != self.n_generators() {
            return Err(Error::DimensionMismatch {
                expected: self.n_generators(),
                got: v.len(),
            });
        }
        let mut out = DMatrix::<Complex>::zeros(self.dim, self.dim);
        for (r, g) in self.generators.iter().enumerate() {
            out += g * v[r];
        }
        Ok(out)
    }

    /// Σ_r v_r λ_r for a real coefficient vector.
    pub fn contract_real(&self, v: &DVector<f64>) -> Result<DMatrix<Complex>> {
        self.contract(&v.map(|x| Complex::new(x, 0.0)))
    }
}

/// Dense rank-3 tensor over the generator indices.
#[derive(Debug, Clone)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, s: usize, t: usize) -> f64 {
        self.data[(r * self.n + s) * self.n + t]
    }

    #[inline]
    fn set(&mut self, r: usize, s: usize, t: usize, v: f64) {
        self.data[(r * self.n + s) * self.n + t] = v;
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// The totally antisymmetric (f) and totally symmetric (d) structure
/// constants of su(N).
#[derive(Debug, Clone)]
pub struct StructureConstants {
    dim: usize,
    pub f: Tensor3,
    pub d: Tensor3,
}

impl StructureConstants {
    /// Compute f and d from the trace formulas applied to `basis`, then
    /// (anti)symmetrize over index permutations and threshold, so the
    /// tensors carry their symmetries exactly rather than to float noise.
    pub fn new(basis: &GellMannBasis) -> Result<Self> {
        let n = basis.n_generators();
        let mut f = Tensor3::zeros(n);
        let mut d = Tensor3::zeros(n);
        // precompute all pair products once
        let mut prod = vec![DMatrix::<Complex>::zeros(basis.dim(), basis.dim()); n * n];
        for r in 0..n {
            for s in 0..n {
                prod[r * n + s] = basis.generator(r) * basis.generator(s);
            }
        }
        for r in 0..n {
            for s in 0..n {
                let co = &prod[r * n + s] - &prod[s * n + r];
                let ac = &prod[r * n + s] + &prod[s * n + r];
                for t in 0..n {
                    let lt = basis.generator(t);
                    let fv = (&co * lt).trace() / Complex::new(0.0, 4.0);
                    let dv = (&ac * lt).trace() / Complex::new(4.0, 0.0);
                    if fv.im.abs() > NOISE_THRESHOLD || dv.im.abs() > NOISE_THRESHOLD {
                        return Err(Error::Numerical(format!(
                            "structure constant ({r},{s},{t}) has imaginary residue"
                        )));
                    }
                    f.set(r, s, t, fv.re);
                    d.set(r, s, t, dv.re);
                }
            }
        }
        symmetrize(&mut f, &mut d, n);
        Ok(Self { dim: basis.dim(), f, d })
    }

    /// Hilbert-space dimension N of the underlying basis.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generator indices, N²−1.
    pub fn n_generators(&self) -> usize {
        self.f.n()
    }
}

#[inline]
fn chop(x: f64) -> f64 {
    if x.abs() < NOISE_THRESHOLD {
        0.0
    } else {
        x
    }
}

/// Average f over signed and d over unsigned index permutations, writing the
/// exact-(anti)symmetric values back, then chop noise.
fn symmetrize(f: &mut Tensor3, d: &mut Tensor3, n: usize) {
    for r in 0..n {
        for s in r..n {
            for t in s..n {
                let perms = [
                    ([r, s, t], 1.0),
                    ([s, t, r], 1.0),
                    ([t, r, s], 1.0),
                    ([s, r, t], -1.0),
                    ([r, t, s], -1.0),
                    ([t, s, r], -1.0),
                ];
                let fa = perms
                    .iter()
                    .map(|([a, b, c], sign)| sign * f.get(*a, *b, *c))
                    .sum::<f64>()
                    / 6.0;
                let da = perms
                    .iter()
                    .map(|([a, b, c], _)| d.get(*a, *b, *c))
                    .sum::<f64>()
                    / 6.0;
                for ([a, b, c], sign) in perms {
                    f.set(a, b, c, chop(sign * fa));
                    d.set(a, b, c, chop(da));
                }
            }
        }
    }
}

fn check_len(sc: &StructureConstants, len: usize) -> Result<()> {
    if len != sc.n_generators() {
        return Err(Error::DimensionMismatch {
            expected: sc.n_generators(),
            got: len,
        });
    }
    Ok(())
}

/// Wedge product (a ∧ b)_r = f_rst a_s b_t, the su(N) analog of the
/// three-dimensional cross product.
pub fn wedge(a: &DVector<Complex>, b: &DVector<Complex>, sc: &StructureConstants) -> Result<DVector<Complex>> {
    check_len(sc, a.len())?;
    check_len(sc, b.len())?;
    let n = sc.n_generators();
    let mut out = DVector::<Complex>::zeros(n);
    for r in 0..n {
        let mut acc = Complex::new(0.0, 0.0);
        for s in 0..n {
            if a[s] == Complex::new(0.0, 0.0) {
                continue;
            }
            for t in 0..n {
                let c = sc.f.get(r, s, t);
                if c != 0.0 {
                    acc += c * a[s] * b[t];
                }
            }
        }
        out[r] = acc;
    }
    Ok(out)
}

/// Star product (a ⋆ b)_r = d_rst a_s b_t, built from the symmetric tensor.
pub fn star(a: &DVector<Complex>, b: &DVector<Complex>, sc: &StructureConstants) -> Result<DVector<Complex>> {
    check_len(sc, a.len())?;
    check_len(sc, b.len())?;
    let n = sc.n_generators();
    let mut out = DVector::<Complex>::zeros(n);
    for r in 0..n {
        let mut acc = Complex::new(0.0, 0.0);
        for s in 0..n {
            if a[s] == Complex::new(0.0, 0.0) {
                continue;
            }
            for t in 0..n {
                let c = sc.d.get(r, s, t);
                if c != 0.0 {
                    acc += c * a[s] * b[t];
                }
            }
        }
        out[r] = acc;
    }
    Ok(out)
}

/// Real coherence vector x with ρ = 𝟙/N + x·λ.
///
/// For N = 3, 0 ≤ |x|² ≤ 1/3 with equality at 1/3 exactly for pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceVector(pub DVector<f64>);

impl CoherenceVector {
    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Squared Euclidean length |x|².
    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// Validated density matrix: Hermitian, unit trace, eigenvalues ≥ −1e-10.
#[derive(Debug, Clone)]
pub struct DensityMatrix(DMatrix<Complex>);

impl DensityMatrix {
    /// Positivity tolerance on eigenvalues.
    pub const POSITIVITY_TOL: f64 = 1e-10;

    /// Validate and wrap `rho`. Hermiticity and unit trace are enforced to
    /// 1e-9; eigenvalues to −1e-10.
    pub fn new(rho: DMatrix<Complex>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let herm_res = (&rho - rho.adjoint()).norm();
        if herm_res > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm_res:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace = {tr} != 1")));
        }
        let herm = (&rho + rho.adjoint()) * Complex::new(0.5, 0.0);
        let eigs = herm.symmetric_eigenvalues();
        if eigs.iter().any(|&e| e < -Self::POSITIVITY_TOL) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                eigs.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(Self(rho))
    }

    /// Wrap without validation; for trusted intermediate values.
    pub fn new_unchecked(rho: DMatrix<Complex>) -> Self {
        Self(rho)
    }

    /// Pure-state projector |ψ⟩⟨ψ| (input is normalized first).
    pub fn pure(psi: &DVector<Complex>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi / Complex::new(n, 0.0);
        let mut rho = DMatrix::<Complex>::zeros(psi.len(), psi.len());
        for i in 0..psi.len() {
            for j in 0..psi.len() {
                rho[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(Self(rho))
    }

    /// Maximally mixed state 𝟙/N.
    pub fn maximally_mixed(n: usize) -> Self {
        Self(DMatrix::identity(n, n) * Complex::new(1.0 / n as f64, 0.0))
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.0
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.0 + self.0.adjoint()) * Complex::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Purity Tr(ρ²).
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// Forward map x_r = Tr[ρ λ_r]/2.
pub fn to_coherence(rho: &DensityMatrix, basis: &GellMannBasis) -> Result<CoherenceVector> {
    if rho.matrix().nrows() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: rho.matrix().nrows(),
        });
    }
    let mut x = DVector::zeros(basis.n_generators());
    for r in 0..basis.n_generators() {
        x[r] = (rho.matrix() * basis.generator(r)).trace().re / 2.0;
    }
    Ok(CoherenceVector(x))
}

/// Inverse map ρ = 𝟙/N + x·λ. Hermitian with unit trace for any real x.
pub fn from_coherence(x: &CoherenceVector, basis: &GellMannBasis) -> Result<DensityMatrix> {
    let body = basis.contract_real(&x.0)?;
    let n = basis.dim();
    let rho = DMatrix::<Complex>::identity(n, n) * Complex::new(1.0 / n as f64, 0.0) + body;
    Ok(DensityMatrix::new_unchecked(rho))
}

/// H = ω₀𝟙 + ω·λ split of a Hermitian matrix (ħ = 1).
#[derive(Debug, Clone)]
pub struct HamiltonianDecomposition {
    /// Scalar part, ω₀ = Tr(H)/N.
    pub omega0: f64,
    /// Real traceless part in the generator basis, ω_r = Tr(H λ_r)/2.
    pub omega: DVector<f64>,
}

/// Decompose a Hermitian matrix into its identity and generator components.
pub fn decompose_hamiltonian(
    h: &DMatrix<Complex>,
    basis: &GellMannBasis,
) -> Result<HamiltonianDecomposition> {
    if h.nrows() != basis.dim() || h.ncols() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: h.nrows(),
        });
    }
    let res = (h - h.adjoint()).norm();
    if res > STATE_TOL {
        return Err(Error::InvalidOperator(format!(
            "not Hermitian (residual {res:.3e})"
        )));
    }
    let omega0 = h.trace().re / basis.dim() as f64;
    let mut omega = DVector::zeros(basis.n_generators());
    for r in 0..basis.n_generators() {
        omega[r] = (h * basis.generator(r)).trace().re / 2.0;
    }
    Ok(HamiltonianDecomposition { omega0, omega })
}
