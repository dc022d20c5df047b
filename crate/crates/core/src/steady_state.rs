//! Time evolution of coherence vectors, spectral analysis of the evolution
//! matrix, and the asymptotic state x∞ = −M⁻¹ b.
//!
//! The flow is integrated with an adaptive Dormand–Prince 5(4) scheme
//! (absolute/relative tolerances 1e-12/1e-10); no Jordan decomposition is
//! attempted — the spectrum report carries the sign information and the
//! asymptotic state comes from a direct linear solve. When M is singular to
//! within [`SINGULARITY_TOL`] the solver refuses: the asymptotic state is
//! then genuinely dependent on the initial condition and −M⁻¹b does not
//! describe it.

use nalgebra::linalg::{Schur, SymmetricEigen, LU, SVD};
use nalgebra::{DMatrix, DVector};

use crate::master_equation::EvolutionModel;
use crate::su_algebra::CoherenceVector;
use crate::{Complex, Error, Result};

/// Relative singular-value threshold below which M is treated as singular.
pub const SINGULARITY_TOL: f64 = 1e-10;

/// |Re| and |Im| threshold for counting an eigenvalue as a zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-9;

/// Condition-number limit on the eigenvector matrix for declaring M
/// diagonalizable.
pub const DIAGONALIZABLE_COND_LIMIT: f64 = 1e8;

/// Integrator tolerances.
const ABS_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-10;

/// Spectral summary of an evolution matrix.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Eigenvalues sorted by descending real part (units γ).
    pub eigenvalues: Vec<Complex>,
    pub max_real_part: f64,
    /// Numerical rank test: condition number of the eigenvector matrix below
    /// [`DIAGONALIZABLE_COND_LIMIT`].
    pub diagonalizable: bool,
    /// Count of eigenvalues with |Re| and |Im| below [`ZERO_MODE_TOL`].
    pub zero_modes: usize,
}

/// Eigenvalues, diagonalizability and zero-mode count of M.
pub fn spectrum(model: &EvolutionModel) -> Result<SpectrumReport> {
    let n = model.dim();
    let mut eigenvalues: Vec<Complex> = if model.m.norm() == 0.0 {
        vec![Complex::new(0.0, 0.0); n]
    } else {
        let schur = Schur::try_new(model.m.clone(), 1e-14, 0)
            .ok_or_else(|| Error::Numerical("Schur iteration failed to converge".into()))?;
        schur.complex_eigenvalues().iter().cloned().collect()
    };
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let max_real_part = eigenvalues.first().map(|e| e.re).unwrap_or(0.0);
    let zero_modes = eigenvalues
        .iter()
        .filter(|e| e.re.abs() < ZERO_MODE_TOL && e.im.abs() < ZERO_MODE_TOL)
        .count();

    let vecs = eigenvector_matrix(&model.m, &eigenvalues)?;
    let gram = vecs.adjoint() * &vecs;
    let sv = SymmetricEigen::new(gram).eigenvalues;
    let smax = sv.iter().cloned().fold(0.0, f64::max).max(0.0);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let diagonalizable = smin > 0.0 && (smax / smin).sqrt() < DIAGONALIZABLE_COND_LIMIT;

    Ok(SpectrumReport { eigenvalues, max_real_part, diagonalizable, zero_modes })
}

/// Eigenvectors by shifted inverse iteration, one per eigenvalue. Degenerate
/// eigenvalues get independent pseudo-random starting vectors; a defective M
/// then yields a rank-deficient eigenvector matrix, which the caller detects
/// through its condition number.
fn eigenvector_matrix(m: &DMatrix<f64>, eigenvalues: &[Complex]) -> Result<DMatrix<Complex>> {
    let n = m.nrows();
    let mc = m.map(|x| Complex::new(x, 0.0));
    let scale = m.norm().max(1.0);
    let mut vecs = DMatrix::<Complex>::zeros(n, n);
    let mut rng = 0x853C49E6748FEA9Bu64;
    let mut next = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng as f64 / u64::MAX as f64) * 2.0 - 1.0
    };
    for (k, &ev) in eigenvalues.iter().enumerate() {
        let mut v = DVector::from_fn(n, |_, _| Complex::new(next(), next()));
        v /= Complex::new(v.norm(), 0.0);
        let mut shift_eps = 1e-12 * scale;
        let mut done = false;
        while !done {
            let shifted = &mc
                - DMatrix::<Complex>::identity(n, n)
                    * (ev + Complex::new(shift_eps, shift_eps));
            let lu = LU::new(shifted);
            let mut ok = true;
            for _ in 0..3 {
                match lu.solve(&v) {
                    Some(w) => {
                        let norm = w.norm();
                        if !norm.is_finite() || norm == 0.0 {
                            ok = false;
                            break;
                        }
                        v = w / Complex::new(norm, 0.0);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                done = true;
            } else {
                shift_eps *= 100.0;
                if shift_eps > 1e-3 * scale {
                    return Err(Error::Numerical(format!(
                        "inverse iteration failed for eigenvalue {ev}"
                    )));
                }
            }
        }
        vecs.set_column(k, &v);
    }
    Ok(vecs)
}

/// Integrate ẋ = M x + b from `x0` over `[0, t]`.
pub fn evolve(x0: &CoherenceVector, model: &EvolutionModel, t: f64) -> Result<CoherenceVector> {
    if x0.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: x0.len() });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidConfig(format!("evolution time {t} must be finite and >= 0")));
    }
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let f = |x: &DVector<f64>| &model.m * x + &model.b;
    dormand_prince(f, x0.0.clone(), t).map(CoherenceVector)
}

/// Asymptotic state x∞ = −M⁻¹ b. Errors with [`Error::SingularEvolution`]
/// when the smallest singular value of M falls below
/// [`SINGULARITY_TOL`] × the largest.
pub fn asymptotic(model: &EvolutionModel) -> Result<CoherenceVector> {
    let svd = SVD::new(model.m.clone(), false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin < SINGULARITY_TOL * smax {
        return Err(Error::SingularEvolution(if smax == 0.0 { 0.0 } else { smin / smax }));
    }
    let lu = LU::new(model.m.clone());
    let x = lu
        .solve(&(-&model.b))
        .ok_or_else(|| Error::Numerical("LU solve failed on nonsingular M".into()))?;
    Ok(CoherenceVector(x))
}

/// Dormand–Prince 5(4) with PI-free basic step control.
fn dormand_prince<F>(f: F, mut y: DVector<f64>, t_end: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    // fifth-order weights equal the last A row; fourth-order weights below
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let n = y.len();
    let mut t = 0.0;
    let mut h = (t_end / 100.0).clamp(1e-6, 0.1);
    let mut k = vec![DVector::<f64>::zeros(n); 7];
    k[0] = f(&y);

    let min_step = t_end * 1e-15 + 1e-300;
    let mut steps = 0usize;
    // terminate once within rounding distance of the endpoint; the final
    // t += h can land an ulp short of t_end
    while t_end - t > t_end * 1e-14 {
        if steps > 50_000_000 {
            return Err(Error::Numerical("integrator step budget exhausted".into()));
        }
        steps += 1;
        if h < min_step {
            return Err(Error::Stiffness(t));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = A[i - 1][j];
                if a != 0.0 {
                    yi += kj * (a * h);
                }
            }
            k[i] = f(&yi);
        }
        // k[6] is f at the fifth-order solution point (FSAL)
        let mut y5 = y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                y5 += kj * (a * h);
            }
        }
        let mut y4 = y.clone();
        for (j, kj) in k.iter().enumerate() {
            if B4[j] != 0.0 {
                y4 += kj * (B4[j] * h);
            }
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let sc = ABS_TOL + REL_TOL * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / sc;
            err += e * e;
        }
        err = (err / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
            k[0] = k[6].clone();
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{omega_vector, standard_channels, ChannelRates, LambdaParams};
    use crate::master_equation::assemble;
    use crate::su_algebra::{from_coherence, GellMannBasis, StructureConstants};

    fn re(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    fn sc3() -> StructureConstants {
        StructureConstants::new(&GellMannBasis::new(3).unwrap()).unwrap()
    }

    fn fig_model(rates: ChannelRates) -> EvolutionModel {
        let p = LambdaParams::new(0.0, 0.0, re(1.6e-5), re(0.16), 0.5, 0.5).unwrap();
        let sc = sc3();
        assemble(
            &omega_vector(&p).omega,
            &standard_channels(&p, &rates).unwrap(),
            &sc,
        )
        .unwrap()
    }

    #[test]
    fn zero_matrix_spectrum() {
        let model = EvolutionModel { m: DMatrix::zeros(8, 8), b: DVector::zeros(8) };
        let rep = spectrum(&model).unwrap();
        assert_eq!(rep.eigenvalues.len(), 8);
        assert_eq!(rep.zero_modes, 8);
        assert!(rep.diagonalizable);
        assert_eq!(rep.max_real_part, 0.0);
    }

    #[test]
    fn full_rate_spectrum_is_strictly_stable() {
        let model = fig_model(ChannelRates {
            eta_z: 0.1,
            eta_depol: 0.1,
            eta_bc: 0.1,
            eta_cb: 0.1,
            ..Default::default()
        });
        let rep = spectrum(&model).unwrap();
        assert_eq!(rep.zero_modes, 0);
        assert!(rep.max_real_part < 0.0);
        assert!(rep.diagonalizable);
        // sorted descending by real part
        for w in rep.eigenvalues.windows(2) {
            assert!(w[0].re >= w[1].re - 1e-15);
        }
    }

    #[test]
    fn undriven_decay_has_stationary_ground_manifold() {
        let p = LambdaParams::new(0.0, 0.0, re(0.0), re(0.0), 0.5, 0.5).unwrap();
        let sc = sc3();
        let model = assemble(
            &omega_vector(&p).omega,
            &standard_channels(&p, &ChannelRates::default()).unwrap(),
            &sc,
        )
        .unwrap();
        let rep = spectrum(&model).unwrap();
        assert!(rep.zero_modes >= 1);
        assert!(matches!(asymptotic(&model), Err(Error::SingularEvolution(_))));
    }

    #[test]
    fn optical_pumping_into_dark_ground_state() {
        let p = LambdaParams::new(0.0, 0.0, re(0.0), re(0.16), 0.5, 0.5).unwrap();
        let sc = sc3();
        let model = assemble(
            &omega_vector(&p).omega,
            &standard_channels(&p, &ChannelRates::default()).unwrap(),
            &sc,
        )
        .unwrap();
        let x = asymptotic(&model).unwrap();
        let mut expect = DVector::zeros(8);
        expect[2] = 0.5;
        expect[7] = 0.5 / 3f64.sqrt();
        assert!((x.0 - expect).norm() < 1e-10);
    }

    #[test]
    fn evolve_identity_at_zero_time() {
        let model = fig_model(ChannelRates { eta_z: 0.1, ..Default::default() });
        let x0 = CoherenceVector(DVector::from_vec(vec![
            0.1, -0.2, 0.05, 0.0, 0.3, -0.1, 0.2, 0.02,
        ]));
        let x = evolve(&x0, &model, 0.0).unwrap();
        assert_eq!(x, x0);
    }

    #[test]
    fn pure_rotation_preserves_length() {
        let sc = sc3();
        let p = LambdaParams::new(0.3, -0.2, re(0.05), re(0.16), 0.5, 0.5).unwrap();
        let model = assemble(&omega_vector(&p).omega, &[], &sc).unwrap();
        assert_eq!(model.b.norm(), 0.0);
        let x0 = CoherenceVector(DVector::from_vec(vec![
            0.1, -0.2, 0.05, 0.0, 0.3, -0.1, 0.2, 0.02,
        ]));
        let r0 = x0.norm_squared();
        let x = evolve(&x0, &model, 25.0).unwrap();
        assert!((x.norm_squared() - r0).abs() < 1e-9);
    }

    #[test]
    fn evolve_reaches_asymptotic_state() {
        let model = fig_model(ChannelRates {
            eta_z: 0.1,
            eta_depol: 0.1,
            eta_bc: 0.1,
            eta_cb: 0.1,
            ..Default::default()
        });
        let x_inf = asymptotic(&model).unwrap();
        // steady state satisfies M x + b = 0
        let resid = &model.m * &x_inf.0 + &model.b;
        assert!(resid.norm() < 1e-10);

        let x0 = CoherenceVector(DVector::from_vec(vec![
            0.2, 0.1, -0.15, 0.05, -0.1, 0.25, 0.0, -0.3,
        ]));
        let x = evolve(&x0, &model, 200.0).unwrap();
        assert!((x.0 - &x_inf.0).norm() < 1e-6);
    }

    #[test]
    fn evolved_state_remains_physical() {
        let basis = GellMannBasis::new(3).unwrap();
        let model = fig_model(ChannelRates { eta_bc: 0.1, eta_cb: 0.1, ..Default::default() });
        // pure excited state
        let mut x0 = DVector::zeros(8);
        x0[7] = -1.0 / 3f64.sqrt();
        let x0 = CoherenceVector(x0);
        for &t in &[0.5, 2.0, 10.0, 50.0] {
            let x = evolve(&x0, &model, t).unwrap();
            let rho = from_coherence(&x, &basis).unwrap();
            assert!(rho.min_eigenvalue() > -1e-8, "t = {t}");
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
