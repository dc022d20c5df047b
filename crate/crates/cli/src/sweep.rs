//! Detuning and control-field sweeps emitting CSV.
//!
//! Output layout: `#`-prefixed metadata lines carrying the full parameter
//! set, one header row, then one data row per grid point sorted ascending in
//! the sweep variable. Delta sweeps emit `(delta, re_chi_*, im_chi_*)` per
//! channel kind; control sweeps emit `(omega_c, ng_*, alpha_*)` per kind at
//! δ = Δ = 0 with matched rates. Floats carry 12
//! significant digits; a point whose solve fails is kept as a NaN row and
//! reported on the diagnostic stream, so curve files keep uniform length.
//! Rows are evaluated in parallel; output order and content are independent
//! of the thread count.

use eit_core::response::{
    absorption, feature_fd_step, ng_integrand, normalized_rates, susceptibility_numeric,
    ChannelKind, NormalizedRates,
};
use eit_core::su_algebra::{GellMannBasis, StructureConstants};
use eit_core::ChannelRates;
use rayon::prelude::*;

use crate::config::{grid_point, ScenarioConfig, SweepAxis};

pub struct SweepResult {
    pub csv: String,
    pub warnings: Vec<String>,
}

/// One data row: axis value, (col_a, col_b) per kind, warnings.
type Row = (f64, Vec<(f64, f64)>, Vec<String>);

/// Format with 12 significant digits; NaN prints as the literal sentinel.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn push_meta(out: &mut String, key: &str, value: impl AsRef<str>) {
    out.push_str("# ");
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(value.as_ref());
    out.push('\n');
}

/// Run the configured sweep on `jobs` threads (current pool when `None`).
pub fn run_sweep(
    cfg: &ScenarioConfig,
    kinds: &[ChannelKind],
    jobs: Option<usize>,
) -> anyhow::Result<SweepResult> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("config has no [sweep] section"))?;
    let sc = StructureConstants::new(&GellMannBasis::new(3)?)?;

    let rows: Vec<Row> = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| compute_rows(cfg, kinds, &sc)),
        None => compute_rows(cfg, kinds, &sc),
    }?;

    let mut csv = String::new();
    let p = &cfg.physical;
    push_meta(&mut csv, "artifact", format!("eit-cli {}", env!("CARGO_PKG_VERSION")));
    push_meta(&mut csv, "axis", match sweep.axis {
        SweepAxis::Delta => "delta",
        SweepAxis::Control => "control",
    });
    push_meta(&mut csv, "min", fmt(sweep.min));
    push_meta(&mut csv, "max", fmt(sweep.max));
    push_meta(&mut csv, "count", sweep.count.to_string());
    push_meta(&mut csv, "gamma_b", fmt(p.gamma_b));
    push_meta(&mut csv, "gamma_c", fmt(p.gamma_c));
    push_meta(&mut csv, "mean_detuning", fmt(p.mean_detuning));
    push_meta(&mut csv, "omega_c", fmt(p.omega_c));
    push_meta(&mut csv, "phi_b", fmt(p.phi_b));
    push_meta(&mut csv, "phi_c", fmt(p.phi_c));
    match p.omega_b {
        Some(ob) => push_meta(&mut csv, "omega_b", fmt(ob)),
        None => push_meta(&mut csv, "probe_ratio", fmt(p.probe_ratio)),
    }
    push_meta(&mut csv, "kappa", fmt(p.kappa));
    push_meta(&mut csv, "wavelength", fmt(p.wavelength));
    push_meta(
        &mut csv,
        "channels",
        kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
    );
    match sweep.axis {
        SweepAxis::Delta => push_meta(&mut csv, "rate_base", fmt(cfg.rates.base)),
        SweepAxis::Control => {
            push_meta(&mut csv, "eta_z_normalized", fmt(cfg.rates.eta_z_normalized))
        }
    }
    if kinds.contains(&ChannelKind::General) {
        let r = cfg.rates.explicit();
        for (k, v) in [
            ("eta_x", r.eta_x),
            ("eta_y", r.eta_y),
            ("eta_z", r.eta_z),
            ("eta_depol", r.eta_depol),
            ("eta_bc", r.eta_bc),
            ("eta_cb", r.eta_cb),
        ] {
            push_meta(&mut csv, k, fmt(v));
        }
    }

    let (axis_name, col_a, col_b) = match sweep.axis {
        SweepAxis::Delta => ("delta", "re_chi", "im_chi"),
        SweepAxis::Control => ("omega_c", "ng", "alpha"),
    };
    csv.push_str(axis_name);
    for kind in kinds {
        csv.push_str(&format!(",{}_{},{}_{}", col_a, kind.name(), col_b, kind.name()));
    }
    csv.push('\n');

    let mut warnings = Vec::new();
    for (axis_value, cells, warns) in rows {
        csv.push_str(&fmt(axis_value));
        for (a, b) in cells {
            csv.push(',');
            csv.push_str(&fmt(a));
            csv.push(',');
            csv.push_str(&fmt(b));
        }
        csv.push('\n');
        warnings.extend(warns);
    }
    Ok(SweepResult { csv, warnings })
}

fn compute_rows(
    cfg: &ScenarioConfig,
    kinds: &[ChannelKind],
    sc: &StructureConstants,
) -> anyhow::Result<Vec<Row>> {
    let sweep = cfg.sweep.as_ref().expect("checked by caller");
    let matched = normalized_rates(cfg.rates.eta_z_normalized)?;
    (0..sweep.count)
        .into_par_iter()
        .map(|i| {
            let v = grid_point(sweep.min, sweep.max, sweep.count, i);
            match sweep.axis {
                SweepAxis::Delta => delta_row(cfg, kinds, sc, v),
                SweepAxis::Control => control_row(cfg, kinds, sc, &matched, v),
            }
        })
        .collect()
}

fn delta_row(
    cfg: &ScenarioConfig,
    kinds: &[ChannelKind],
    sc: &StructureConstants,
    delta: f64,
) -> anyhow::Result<Row> {
    let p = cfg.params_at_delta(delta)?;
    let kappa = cfg.physical.kappa;
    let mut cells = Vec::with_capacity(kinds.len());
    let mut warns = Vec::new();
    for &kind in kinds {
        let rates = cfg.rates_for_kind(kind)?;
        match susceptibility_numeric(&p, &rates, sc) {
            Ok(chi) => cells.push(((kappa * chi).re, (kappa * chi).im)),
            Err(e) => {
                warns.push(format!("delta = {delta:.6}: {} solve failed: {e}", kind.name()));
                cells.push((f64::NAN, f64::NAN));
            }
        }
    }
    Ok((delta, cells, warns))
}

fn control_row(
    cfg: &ScenarioConfig,
    kinds: &[ChannelKind],
    sc: &StructureConstants,
    matched: &NormalizedRates,
    omega_c: f64,
) -> anyhow::Result<Row> {
    let kappa = cfg.physical.kappa;
    let lambda = cfg.physical.wavelength;
    let mut cells = Vec::with_capacity(kinds.len());
    let mut warns = Vec::new();
    for &kind in kinds {
        let rates: ChannelRates = match matched.for_kind(kind) {
            Some(r) => r,
            None => cfg.rates.explicit(),
        };
        let point = || -> eit_core::Result<(f64, f64)> {
            let p = cfg
                .params_at_control(omega_c)
                .map_err(|e| eit_core::Error::InvalidConfig(e.to_string()))?;
            let chi = susceptibility_numeric(&p, &rates, sc)? * kappa;
            let ng = kappa * ng_integrand(kind, &p, &rates, sc, feature_fd_step(&p))?;
            Ok((ng, absorption(chi, lambda)?))
        };
        match point() {
            Ok(cell) => cells.push(cell),
            Err(e) => {
                warns.push(format!(
                    "omega_c = {omega_c:.6}: {} solve failed: {e}",
                    kind.name()
                ));
                cells.push((f64::NAN, f64::NAN));
            }
        }
    }
    Ok((omega_c, cells, warns))
}
