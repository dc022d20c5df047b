//! Linear optical response of the probe transition.
//!
//! The susceptibility is χ = κ ρ_ab^∞ / Ω_b with ρ_ab^∞ = x₄^∞ + i x₅^∞,
//! valid for a weak probe (|Ω_b| ≪ |Ω_c|). [`susceptibility_numeric`]
//! evaluates it from the steady-state solve and is the authoritative path;
//! [`chi_closed_form`] evaluates the published analytic expressions, one per
//! channel family plus a general form, which are regression-tested against
//! the numeric path. Re χ carries dispersion (the group-index integrand is
//! ∂_δ Re χ), Im χ absorption (negative means gain).

use crate::lambda::{derived_params, standard_channels, ChannelRates, LambdaParams};
use crate::master_equation::assemble;
use crate::steady_state::asymptotic;
use crate::su_algebra::StructureConstants;
use crate::{Complex, Error, Result};

/// Maximum probe-to-control amplitude ratio accepted as linear response.
pub const LINEAR_REGIME_RATIO: f64 = 1e-3;

/// Default probe amplitude ratio |Ω_b|/|Ω_c| used by the sweep front end.
pub const DEFAULT_PROBE_RATIO: f64 = 1e-4;

/// Relative threshold for declaring a closed-form denominator a pole.
const POLE_TOL: f64 = 1e-12;

/// The channel families with analytic susceptibilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// No open-system interaction on the ground subspace.
    Ideal,
    /// Pure dephasing along the population-difference axis (rate η_z).
    Dephase,
    /// Isotropic depolarization (total rate η).
    Depol,
    /// Amplitude damping c → b (rate η_bc).
    DampBc,
    /// Amplitude damping b → c (rate η_cb).
    DampCb,
    /// Population exchange: both dampings at the equal rate η_pe.
    Popex,
    /// Arbitrary rate combination; closed form in the derived parameters.
    General,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 7] = [
        ChannelKind::Ideal,
        ChannelKind::Dephase,
        ChannelKind::Depol,
        ChannelKind::DampBc,
        ChannelKind::DampCb,
        ChannelKind::Popex,
        ChannelKind::General,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Ideal => "ideal",
            ChannelKind::Dephase => "dephase",
            ChannelKind::Depol => "depol",
            ChannelKind::DampBc => "damp_bc",
            ChannelKind::DampCb => "damp_cb",
            ChannelKind::Popex => "popex",
            ChannelKind::General => "general",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(ChannelKind::Ideal),
            "dephase" => Ok(ChannelKind::Dephase),
            "depol" => Ok(ChannelKind::Depol),
            "damp_bc" => Ok(ChannelKind::DampBc),
            "damp_cb" => Ok(ChannelKind::DampCb),
            "popex" => Ok(ChannelKind::Popex),
            "general" => Ok(ChannelKind::General),
            other => Err(Error::InvalidConfig(format!("unknown channel kind '{other}'"))),
        }
    }

    /// Rate record with this kind's single rate set to `rate`.
    pub fn rates(&self, rate: f64) -> Result<ChannelRates> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidRate(format!("rate = {rate}")));
        }
        let mut r = ChannelRates::default();
        match self {
            ChannelKind::Ideal => {}
            ChannelKind::Dephase => r.eta_z = rate,
            ChannelKind::Depol => r.eta_depol = rate,
            ChannelKind::DampBc => r.eta_bc = rate,
            ChannelKind::DampCb => r.eta_cb = rate,
            ChannelKind::Popex => {
                r.eta_bc = rate;
                r.eta_cb = rate;
            }
            ChannelKind::General => {
                return Err(Error::InvalidConfig(
                    "kind 'general' takes explicit rates, not a single rate".into(),
                ))
            }
        }
        Ok(r)
    }

    /// Check that `r` only populates the rates this kind describes.
    fn validate_rates(&self, r: &ChannelRates) -> Result<()> {
        r.validate()?;
        if r.eta_x != 0.0 || r.eta_y != 0.0 {
            return Err(Error::InvalidRate(
                "closed forms cover eta_x = eta_y = 0 only".into(),
            ));
        }
        let ok = match self {
            ChannelKind::Ideal => {
                r.eta_z == 0.0 && r.eta_depol == 0.0 && r.eta_bc == 0.0 && r.eta_cb == 0.0
            }
            ChannelKind::Dephase => r.eta_depol == 0.0 && r.eta_bc == 0.0 && r.eta_cb == 0.0,
            ChannelKind::Depol => r.eta_z == 0.0 && r.eta_bc == 0.0 && r.eta_cb == 0.0,
            ChannelKind::DampBc => r.eta_z == 0.0 && r.eta_depol == 0.0 && r.eta_cb == 0.0,
            ChannelKind::DampCb => r.eta_z == 0.0 && r.eta_depol == 0.0 && r.eta_bc == 0.0,
            ChannelKind::Popex => {
                r.eta_z == 0.0 && r.eta_depol == 0.0 && r.eta_bc == r.eta_cb
            }
            ChannelKind::General => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRate(format!(
                "rates {r:?} do not match channel kind '{}'",
                self.name()
            )))
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Steady-state susceptibility in units of κ: (x₄^∞ + i x₅^∞)/Ω_b.
///
/// Requires 0 < |Ω_b| ≤ 1e-3 |Ω_c|; outside that window the linear-response
/// reading of the steady state is not guaranteed.
pub fn susceptibility_numeric(
    p: &LambdaParams,
    r: &ChannelRates,
    sc: &StructureConstants,
) -> Result<Complex> {
    let ob = p.omega_b.norm();
    if ob == 0.0 {
        return Err(Error::Regime("probe amplitude is zero".into()));
    }
    if ob > LINEAR_REGIME_RATIO * p.omega_c.norm() {
        return Err(Error::Regime(format!(
            "|omega_b| = {ob:.3e} exceeds {LINEAR_REGIME_RATIO:.0e} x |omega_c| = {:.3e}",
            p.omega_c.norm()
        )));
    }
    let channels = standard_channels(p, r)?;
    let model = assemble(&crate::lambda::omega_vector(p).omega, &channels, sc)?;
    let x = asymptotic(&model)?;
    Ok(Complex::new(x.0[3], x.0[4]) / p.omega_b)
}

fn pole_check(den: Complex, scale: f64, delta: f64) -> Result<Complex> {
    if den.norm() <= POLE_TOL * scale.max(f64::MIN_POSITIVE) {
        Err(Error::Pole { delta })
    } else {
        Ok(den)
    }
}

/// Evaluate the published closed-form susceptibility for `kind` at the given
/// two-photon detuning δ and mean detuning Δ (units of κ).
///
/// The expressions are kept verbatim; deviations from the numeric oracle are
/// what the verification report measures. Specialized kinds require the
/// rates of all other channels to vanish.
pub fn chi_closed_form(
    kind: ChannelKind,
    delta: f64,
    mean: f64,
    p: &LambdaParams,
    r: &ChannelRates,
) -> Result<Complex> {
    kind.validate_rates(r)?;
    let g = p.gamma();
    let o2 = p.omega_c.norm_sqr();
    let i = Complex::i();
    let dl = Complex::new(delta, 0.0);
    let dm = Complex::new(mean, 0.0);

    match kind {
        ChannelKind::Ideal => {
            let den = 2.0 * dl * (dl + dm + i * g) - o2;
            let scale = 2.0 * delta.abs() * (delta.abs() + mean.abs() + g) + o2;
            Ok(-2.0 * dl / pole_check(den, scale, delta)?)
        }
        ChannelKind::Dephase => {
            let ez = r.eta_z;
            let num = dl + i * ez;
            let den = num * (dl + dm + i * (g + 0.5 * ez)) - 0.5 * o2;
            let scale = num.norm() * (delta.abs() + mean.abs() + g + 0.5 * ez) + 0.5 * o2;
            Ok(-num / pole_check(den, scale, delta)?)
        }
        ChannelKind::DampBc => {
            let e = r.eta_bc;
            let num = dl + i * (0.25 * e);
            let den = num * (dl + dm + i * g) - 0.5 * o2;
            let scale = num.norm() * (delta.abs() + mean.abs() + g) + 0.5 * o2;
            Ok(-num / pole_check(den, scale, delta)?)
        }
        ChannelKind::DampCb => {
            let e = r.eta_cb;
            let num =
                2.0 * (g * (4.0 * i * dl + e) + e * (Complex::new(e, 0.0) - 2.0 * i * (dl + dm)))
                    * o2;
            let d1 = (Complex::new(e, 0.0) - 4.0 * i * dl)
                * (2.0 * i * g + 2.0 * (dl + dm) + i * e)
                + 4.0 * i * o2;
            let d2 = Complex::new(
                (g * g + (delta - mean) * (delta - mean)) * e + (g + 2.0 * e) * o2,
                0.0,
            );
            let s1 = (e + 4.0 * delta.abs()) * (2.0 * g + 2.0 * (delta.abs() + mean.abs()) + e)
                + 4.0 * o2;
            let s2 = d2.norm();
            let den = pole_check(d1 * d2, s1 * s2, delta)?;
            Ok(num / den)
        }
        ChannelKind::Popex => {
            let e = r.eta_bc; // = eta_cb
            let quad = 4.0 * (delta - mean) * (delta - mean) + (2.0 * g + e) * (2.0 * g + e);
            let num = -g * e * (2.0 * dl + i * e) * quad
                + 4.0 * g * Complex::new(-2.0 * g * delta + (-2.0 * delta + mean) * e, 0.0) * o2;
            let d1 = (2.0 * dl + i * e) * (2.0 * i * g + 2.0 * (dl + dm) + i * e) - 2.0 * o2;
            let d2 = Complex::new(g * e * quad + (2.0 * g + e) * (g + 3.0 * e) * o2, 0.0);
            let s1 = (2.0 * delta.abs() + e) * (2.0 * g + 2.0 * (delta.abs() + mean.abs()) + e)
                + 2.0 * o2;
            let den = pole_check(d1 * d2, s1 * d2.norm(), delta)?;
            Ok(num / den)
        }
        ChannelKind::Depol => {
            let e = r.eta_depol;
            let quad = 4.0 * (delta - mean) * (delta - mean) + (2.0 * g + e) * (2.0 * g + e);
            let num = 2.0 * i
                * g
                * (e * (3.0 * dl + 2.0 * i * e) * quad
                    + 3.0 * (g * (6.0 * dl + 2.0 * i * e) + (5.0 * dl - 2.0 * dm + i * e) * e)
                        * o2);
            let d1 = (3.0 * dl + 2.0 * i * e) * (2.0 * g - 2.0 * i * (dl + dm) + e) + 3.0 * i * o2;
            let d2 = Complex::new(
                2.0 * g * e * quad + 3.0 * (2.0 * g + e) * (g + 2.0 * e) * o2,
                0.0,
            );
            let s1 = (3.0 * delta.abs() + 2.0 * e)
                * (2.0 * g + 2.0 * (delta.abs() + mean.abs()) + e)
                + 3.0 * o2;
            let den = pole_check(d1 * d2, s1 * d2.norm(), delta)?;
            Ok(num / den)
        }
        ChannelKind::General => {
            let pp = LambdaParams::from_two_photon(
                delta,
                mean,
                p.omega_b,
                p.omega_c,
                p.gamma_b,
                p.gamma_c,
            )?;
            let dp = derived_params(&pp, r)?;
            let (em, ep) = (dp.eta_minus, dp.eta_plus);
            let (gt, gb, gc) = (dp.big_gamma, dp.big_gamma_b, dp.big_gamma_c);
            let num = i
                * (o2 * (2.0 * gt.conj() * gc.re * (g + 2.0 * em)
                    + g * gc.conj() * (2.0 * em - ep))
                    + g * (2.0 * em + ep) * gt.conj() * gc.norm_sqr());
            let d1 = Complex::new(o2, 0.0) + gt.conj() * gb.conj();
            let d2 = Complex::new(
                o2 * gc.re * (2.0 * g - 2.0 * em + 3.0 * ep) + 2.0 * g * ep * gc.norm_sqr(),
                0.0,
            );
            let s1 = o2 + gt.norm() * gb.norm();
            let s2 = o2 * gc.re.abs() * (2.0 * g + 2.0 * em.abs() + 3.0 * ep) + 2.0 * g * ep * gc.norm_sqr();
            let den = pole_check(d1 * d2, s1 * s2.max(o2 * gc.re.abs() * g), delta)?;
            Ok(num / den)
        }
    }
}

/// Group-index integrand ∂_δ Re χ at the operating point of `p`, from the
/// steady-state path: central finite difference with one Richardson
/// extrapolation, cross-checked at half step (relative agreement 1e-5).
pub fn ng_integrand(
    kind: ChannelKind,
    p: &LambdaParams,
    r: &ChannelRates,
    sc: &StructureConstants,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig(format!("step = {step} must be > 0")));
    }
    kind.validate_rates(r)?;
    let delta0 = p.two_photon_detuning();
    let mean = p.mean_detuning();
    let chi_at = |d: f64| -> Result<Complex> {
        let pp =
            LambdaParams::from_two_photon(d, mean, p.omega_b, p.omega_c, p.gamma_b, p.gamma_c)?;
        susceptibility_numeric(&pp, r, sc).map_err(|e| match e {
            Error::SingularEvolution(_) => Error::Stencil { delta: d },
            other => other,
        })
    };
    let central = |h: f64| -> Result<f64> {
        Ok((chi_at(delta0 + h)?.re - chi_at(delta0 - h)?.re) / (2.0 * h))
    };
    let richardson = |h: f64| -> Result<f64> {
        Ok((4.0 * central(h / 2.0)? - central(h)?) / 3.0)
    };
    let d1 = richardson(step)?;
    let d2 = richardson(step / 2.0)?;
    let scale = d1.abs().max(d2.abs()).max(1e-300);
    if (d1 - d2).abs() / scale > 1e-5 {
        return Err(Error::Numerical(format!(
            "finite-difference derivative not converged: {d1} vs {d2}"
        )));
    }
    Ok(d2)
}

/// Group index n_g = ω ∂_δ Re χ / 2 at probe angular frequency `omega_probe`.
pub fn group_index(
    kind: ChannelKind,
    p: &LambdaParams,
    r: &ChannelRates,
    sc: &StructureConstants,
    omega_probe: f64,
    step: f64,
) -> Result<f64> {
    Ok(0.5 * omega_probe * ng_integrand(kind, p, r, sc, step)?)
}

/// Default finite-difference step: 1e-4 · max(γ, |Ω_c|²/γ).
pub fn default_fd_step(p: &LambdaParams) -> f64 {
    1e-4 * p.gamma().max(p.omega_c.norm_sqr() / p.gamma())
}

/// Finite-difference step resolving the narrower of the linewidth and the
/// transparency window, 5e-4 · min(γ, |Ω_c|²/γ). The default step fails the
/// step-halving consistency check once |Ω_c|²/γ drops near 1e-4·γ, so weak
/// control fields need this one.
pub fn feature_fd_step(p: &LambdaParams) -> f64 {
    5e-4 * p.gamma().min(p.omega_c.norm_sqr() / p.gamma())
}

/// Absorption coefficient α = (2π/λ) Im χ.
pub fn absorption(chi: Complex, wavelength: f64) -> Result<f64> {
    if wavelength <= 0.0 || wavelength.is_nan() {
        return Err(Error::NonpositiveWavelength(wavelength));
    }
    Ok(2.0 * std::f64::consts::PI / wavelength * chi.im)
}

/// The matched-rate settings derived from a dephasing rate η_z:
/// η_bc = η_cb = η_pe = 4η_z and η = 3η_z/2.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedRates {
    pub dephase: ChannelRates,
    pub damp_bc: ChannelRates,
    pub damp_cb: ChannelRates,
    pub popex: ChannelRates,
    pub depol: ChannelRates,
}

/// Build the matched-rate settings for a given η_z ≥ 0.
pub fn normalized_rates(eta_z: f64) -> Result<NormalizedRates> {
    if !(eta_z >= 0.0 && eta_z.is_finite()) {
        return Err(Error::InvalidRate(format!("eta_z = {eta_z}")));
    }
    Ok(NormalizedRates {
        dephase: ChannelKind::Dephase.rates(eta_z)?,
        damp_bc: ChannelKind::DampBc.rates(4.0 * eta_z)?,
        damp_cb: ChannelKind::DampCb.rates(4.0 * eta_z)?,
        popex: ChannelKind::Popex.rates(4.0 * eta_z)?,
        depol: ChannelKind::Depol.rates(1.5 * eta_z)?,
    })
}

impl NormalizedRates {
    /// The rate record for a kind, `None` for `General`.
    pub fn for_kind(&self, kind: ChannelKind) -> Option<ChannelRates> {
        match kind {
            ChannelKind::Ideal => Some(ChannelRates::default()),
            ChannelKind::Dephase => Some(self.dephase),
            ChannelKind::DampBc => Some(self.damp_bc),
            ChannelKind::DampCb => Some(self.damp_cb),
            ChannelKind::Popex => Some(self.popex),
            ChannelKind::Depol => Some(self.depol),
            ChannelKind::General => None,
        }
    }
}

/// Full response record at one operating point.
#[derive(Debug, Clone, Copy)]
pub struct OpticalResponse {
    /// Susceptibility, κ applied.
    pub chi: Complex,
    /// ∂_δ Re χ (κ applied; units 1/γ).
    pub ng_integrand: f64,
    /// Absorption (2π/λ)·Im χ.
    pub alpha: f64,
    pub kappa: f64,
    pub wavelength: f64,
}

impl OpticalResponse {
    /// Evaluate χ, the group-index integrand and the absorption at the
    /// operating point of `p`.
    pub fn evaluate(
        kind: ChannelKind,
        p: &LambdaParams,
        r: &ChannelRates,
        sc: &StructureConstants,
        kappa: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let chi = susceptibility_numeric(p, r, sc)? * kappa;
        let ng = kappa * ng_integrand(kind, p, r, sc, feature_fd_step(p))?;
        let alpha = absorption(chi, wavelength)?;
        Ok(Self { chi, ng_integrand: ng, alpha, kappa, wavelength })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su_algebra::GellMannBasis;

    fn re(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    fn sc3() -> StructureConstants {
        StructureConstants::new(&GellMannBasis::new(3).unwrap()).unwrap()
    }

    fn fig_params(delta: f64, mean: f64) -> LambdaParams {
        LambdaParams::from_two_photon(delta, mean, re(1.6e-5), re(0.16), 0.5, 0.5).unwrap()
    }

    #[test]
    fn regime_enforcement() {
        let sc = sc3();
        let p = LambdaParams::new(0.0, 0.0, re(0.01), re(0.16), 0.5, 0.5).unwrap();
        assert!(matches!(
            susceptibility_numeric(&p, &ChannelRates::default(), &sc),
            Err(Error::Regime(_))
        ));
        let p = LambdaParams::new(0.0, 0.0, re(0.0), re(0.16), 0.5, 0.5).unwrap();
        assert!(matches!(
            susceptibility_numeric(&p, &ChannelRates::default(), &sc),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn ideal_transparency_at_resonance() {
        let sc = sc3();
        let chi = susceptibility_numeric(&fig_params(0.0, 0.0), &ChannelRates::default(), &sc)
            .unwrap();
        assert!(chi.norm() < 1e-8);
        let cf = chi_closed_form(ChannelKind::Ideal, 0.0, 0.0, &fig_params(0.0, 0.0),
            &ChannelRates::default()).unwrap();
        assert_eq!(cf, Complex::new(0.0, 0.0));
    }

    #[test]
    fn dephasing_resonance_spot_value() {
        let sc = sc3();
        let r = ChannelKind::Dephase.rates(0.1).unwrap();
        let p = fig_params(0.0, 0.0);
        let numeric = susceptibility_numeric(&p, &r, &sc).unwrap();
        let closed = chi_closed_form(ChannelKind::Dephase, 0.0, 0.0, &p, &r).unwrap();
        // i η_z / (η_z γ + η_z²/2 + |Ω_c|²/2)
        let expect = 0.1 / (0.1 + 0.005 + 0.0128);
        assert!((numeric.im - expect).abs() < 1e-6);
        assert!(numeric.re.abs() < 1e-9);
        assert!((closed - numeric).norm() / numeric.norm() < 1e-6);
    }

    #[test]
    fn reverse_damping_shows_gain() {
        let sc = sc3();
        let r = ChannelKind::DampCb.rates(0.1).unwrap();
        let p = fig_params(0.0, 0.0);
        let numeric = susceptibility_numeric(&p, &r, &sc).unwrap();
        let closed = chi_closed_form(ChannelKind::DampCb, 0.0, 0.0, &p, &r).unwrap();
        assert!(numeric.im < 0.0);
        assert!((numeric.im + 0.1379).abs() < 1e-3);
        assert!((closed - numeric).norm() / numeric.norm() < 1e-6);
    }

    #[test]
    fn exchange_absorption_lies_between_dampings() {
        let sc = sc3();
        let p = fig_params(0.0, 0.0);
        let im_bc = susceptibility_numeric(&p, &ChannelKind::DampBc.rates(0.1).unwrap(), &sc)
            .unwrap()
            .im;
        let im_pe = susceptibility_numeric(&p, &ChannelKind::Popex.rates(0.1).unwrap(), &sc)
            .unwrap()
            .im;
        let im_cb = susceptibility_numeric(&p, &ChannelKind::DampCb.rates(0.1).unwrap(), &sc)
            .unwrap()
            .im;
        assert!(im_bc >= im_pe && im_pe >= im_cb);
    }

    #[test]
    fn general_form_reduces_to_ideal() {
        let p = fig_params(0.0, 0.0);
        let r = ChannelRates::default();
        let mut state = 0xDEADBEEFCAFEu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) - 0.5
        };
        for _ in 0..50 {
            let d = next();
            let m = 0.6 * next();
            let gen = chi_closed_form(ChannelKind::General, d, m, &p, &r).unwrap();
            let ideal = chi_closed_form(ChannelKind::Ideal, d, m, &p, &r).unwrap();
            assert!(
                (gen - ideal).norm() <= 1e-10 * ideal.norm().max(1e-12),
                "delta={d} mean={m}: {gen} vs {ideal}"
            );
        }
    }

    #[test]
    fn ideal_susceptibility_vanishes_off_resonance() {
        let p = fig_params(0.0, 0.0);
        let chi = chi_closed_form(ChannelKind::Ideal, 50.0, 0.0, &p, &ChannelRates::default())
            .unwrap();
        assert!(chi.norm() < 0.03);
        let chi2 = chi_closed_form(ChannelKind::Ideal, 500.0, 0.0, &p, &ChannelRates::default())
            .unwrap();
        assert!(chi2.norm() < chi.norm());
    }

    #[test]
    fn closed_form_rejects_mismatched_rates() {
        let p = fig_params(0.0, 0.0);
        let r = ChannelRates { eta_z: 0.1, eta_bc: 0.1, ..Default::default() };
        assert!(matches!(
            chi_closed_form(ChannelKind::Dephase, 0.0, 0.0, &p, &r),
            Err(Error::InvalidRate(_))
        ));
        let r = ChannelRates { eta_bc: 0.1, eta_cb: 0.2, ..Default::default() };
        assert!(matches!(
            chi_closed_form(ChannelKind::Popex, 0.0, 0.0, &p, &r),
            Err(Error::InvalidRate(_))
        ));
    }

    #[test]
    fn ideal_pole_detected() {
        // for γ > 0 the iγ term keeps every real-δ denominator finite; as
        // γ → 0 the ideal denominator 2δ² − Ω² collapses at δ = Ω/√2
        let p = LambdaParams::from_two_photon(0.0, 0.0, re(1.6e-5), re(0.16), 2.5e-17, 2.5e-17)
            .unwrap();
        let pole_delta = 0.16 / 2f64.sqrt();
        assert!(matches!(
            chi_closed_form(ChannelKind::Ideal, pole_delta, 0.0, &p, &ChannelRates::default()),
            Err(Error::Pole { .. })
        ));
        // finite γ: no pole on the real axis
        let p = fig_params(0.0, 0.0);
        assert!(chi_closed_form(ChannelKind::Ideal, pole_delta, 0.0, &p, &ChannelRates::default())
            .is_ok());
    }

    #[test]
    fn probe_halving_stability() {
        let sc = sc3();
        let r = ChannelKind::Dephase.rates(0.1).unwrap();
        let p1 = LambdaParams::from_two_photon(0.1, -0.05, re(1.6e-5), re(0.16), 0.5, 0.5).unwrap();
        let p2 = LambdaParams::from_two_photon(0.1, -0.05, re(0.8e-5), re(0.16), 0.5, 0.5).unwrap();
        let c1 = susceptibility_numeric(&p1, &r, &sc).unwrap();
        let c2 = susceptibility_numeric(&p2, &r, &sc).unwrap();
        assert!((c1 - c2).norm() / c1.norm() < 1e-4);
    }

    #[test]
    fn phase_independence() {
        let sc = sc3();
        let r = ChannelKind::Depol.rates(0.1).unwrap();
        let base = susceptibility_numeric(&fig_params(0.1, -0.05), &r, &sc).unwrap();
        let p = LambdaParams::from_two_photon(
            0.1,
            -0.05,
            Complex::from_polar(1.6e-5, 2.3),
            Complex::from_polar(0.16, -0.9),
            0.5,
            0.5,
        )
        .unwrap();
        let rotated = susceptibility_numeric(&p, &r, &sc).unwrap();
        assert!((base - rotated).norm() < 1e-9);
    }

    #[test]
    fn ideal_group_index_integrand() {
        let sc = sc3();
        let p = fig_params(0.0, 0.0);
        let d = ng_integrand(ChannelKind::Ideal, &p, &ChannelRates::default(), &sc,
            default_fd_step(&p)).unwrap();
        assert!((d - 2.0 / (0.16 * 0.16)).abs() / 78.125 < 1e-6);
        // group index at probe frequency 2 equals the integrand
        let ng = group_index(ChannelKind::Ideal, &p, &ChannelRates::default(), &sc, 2.0,
            default_fd_step(&p)).unwrap();
        assert!((ng - d).abs() < 1e-12);
    }

    #[test]
    fn absorption_sign_and_scale() {
        assert_eq!(absorption(Complex::new(0.3, 0.0), 1.0).unwrap(), 0.0);
        let a = absorption(Complex::new(0.0, 0.5), 2.0 * std::f64::consts::PI).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        assert!(absorption(Complex::new(0.0, -0.2), 2.0 * std::f64::consts::PI).unwrap() < 0.0);
        assert!(matches!(
            absorption(Complex::new(0.0, 0.5), 0.0),
            Err(Error::NonpositiveWavelength(_))
        ));
    }

    #[test]
    fn slowdown_expansion_holds_for_small_rates() {
        // the first-order form 2κ/(4γη_z + Ω²) becomes exact as η_z → 0
        let sc = sc3();
        let p = fig_params(0.0, 0.0);
        let eta_z = 1e-4;
        let slope = ng_integrand(
            ChannelKind::Dephase,
            &p,
            &ChannelKind::Dephase.rates(eta_z).unwrap(),
            &sc,
            default_fd_step(&p),
        )
        .unwrap();
        let approx = 2.0 / (4.0 * eta_z + 0.16 * 0.16);
        assert!(
            (slope - approx).abs() / approx < 1e-3,
            "slope {slope} vs expansion {approx}"
        );
    }

    #[test]
    fn dephasing_and_forward_damping_absorb_alike_at_matched_rates() {
        // |α_dephase(η_z) − α_bc(4η_z)| / α < 3η_z/γ for η_z ≤ 0.05γ
        let sc = sc3();
        let p = fig_params(0.0, 0.0);
        for eta_z in [0.01, 0.03, 0.05] {
            let a1 = susceptibility_numeric(&p, &ChannelKind::Dephase.rates(eta_z).unwrap(), &sc)
                .unwrap()
                .im;
            let a2 = susceptibility_numeric(&p, &ChannelKind::DampBc.rates(4.0 * eta_z).unwrap(), &sc)
                .unwrap()
                .im;
            let rel = (a1 - a2).abs() / a2.abs();
            assert!(rel < 3.0 * eta_z, "eta_z = {eta_z}: rel = {rel}");
        }
    }

    #[test]
    fn absorption_ordering_at_matched_rates() {
        // α_cb < α_depol ≈ α_popex < α_dephase ≈ α_bc on resonance
        let sc = sc3();
        let p = fig_params(0.0, 0.0);
        let n = normalized_rates(0.01).unwrap();
        let alpha = |r: &ChannelRates| susceptibility_numeric(&p, r, &sc).unwrap().im;
        let (cb, dp, pe, dz, bc) = (
            alpha(&n.damp_cb),
            alpha(&n.depol),
            alpha(&n.popex),
            alpha(&n.dephase),
            alpha(&n.damp_bc),
        );
        assert!(cb < dp && cb < pe);
        assert!((dp - pe).abs() < 0.25 * dp.max(pe));
        assert!(dp.max(pe) < dz && dp.max(pe) < bc);
        assert!((dz - bc).abs() < 0.05 * bc);
    }

    #[test]
    fn no_gain_without_reverse_damping() {
        // weak Kramers–Kronig form: Im χ ≥ 0 along δ sweeps for every
        // channel except the reverse damping
        let sc = sc3();
        let kinds = [
            (ChannelKind::Ideal, ChannelRates::default()),
            (ChannelKind::Dephase, ChannelKind::Dephase.rates(0.1).unwrap()),
            (ChannelKind::DampBc, ChannelKind::DampBc.rates(0.1).unwrap()),
            (ChannelKind::Popex, ChannelKind::Popex.rates(0.1).unwrap()),
            (ChannelKind::Depol, ChannelKind::Depol.rates(0.1).unwrap()),
        ];
        for i in 0..=32 {
            let delta = -0.5 + i as f64 / 32.0;
            let p = fig_params(delta, 0.0);
            for (kind, r) in &kinds {
                let im = susceptibility_numeric(&p, r, &sc).unwrap().im;
                assert!(im >= -1e-10, "{} at delta = {delta}: Im = {im:.3e}", kind.name());
            }
        }
    }

    #[test]
    fn normalized_rate_map() {
        let n = normalized_rates(0.1).unwrap();
        assert!((n.damp_bc.eta_bc - 0.4).abs() < 1e-15);
        assert!((n.damp_cb.eta_cb - 0.4).abs() < 1e-15);
        assert!((n.popex.eta_bc - 0.4).abs() < 1e-15);
        assert!((n.popex.eta_cb - 0.4).abs() < 1e-15);
        assert!((n.depol.eta_depol - 0.15).abs() < 1e-15);
        assert!((n.dephase.eta_z - 0.1).abs() < 1e-15);

        let z = normalized_rates(0.0).unwrap();
        assert_eq!(z.damp_bc, ChannelRates::default());
        assert!(normalized_rates(-0.1).is_err());
    }
}
