//! Verification report: oracle-equivalence of the assembled flow, reference
//! block-matrix diffs under both decay normalizations, and the closed-form
//! susceptibility regression.
//!
//! A check that lands outside its tolerance is *expected* when the errata
//! ledger carries an entry for it (matched through the entry's `check`
//! field); expected deviations do not affect the exit code. Any other
//! failure exits nonzero.

use std::path::Path;

use eit_core::lambda::{
    compare_blocks, jump_rate_channels, standard_channels, ChannelRates, LambdaParams,
};
use eit_core::master_equation::{
    assemble, b_row_contraction, channel_generators, liouvillian_direct, rhs, LindbladChannel,
};
use eit_core::response::{chi_closed_form, susceptibility_numeric, ChannelKind};
use eit_core::su_algebra::{
    from_coherence, to_coherence, CoherenceVector, DensityMatrix, GellMannBasis,
    HamiltonianDecomposition, StructureConstants,
};
use eit_core::Complex;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

#[derive(Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub section: String,
    pub measured: String,
    pub tolerance: String,
    pub within_tolerance: bool,
    /// "pass" | "expected-deviation" | "fail"
    pub status: String,
    /// Ledger entries covering this check when it deviates.
    pub ledger_ids: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub exit_code: i32,
}

#[derive(Debug, Deserialize)]
struct ErrataFile {
    #[serde(default)]
    entry: Vec<ErratumEntry>,
    #[serde(default)]
    #[allow(dead_code)]
    note: Vec<toml::Value>,
}

#[derive(Debug, Deserialize)]
struct ErratumEntry {
    id: String,
    #[allow(dead_code)]
    module: String,
    check: String,
    #[allow(dead_code)]
    description: String,
    #[allow(dead_code)]
    measured: String,
}

struct Ledger {
    entries: Vec<ErratumEntry>,
}

impl Ledger {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read errata ledger {}: {e}", path.display()))?;
        let file: ErrataFile = toml::from_str(&text)?;
        Ok(Self { entries: file.entry })
    }

    fn covering(&self, check_name: &str) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.check == check_name)
            .map(|e| e.id.clone())
            .collect()
    }
}

struct Reporter {
    ledger: Ledger,
    checks: Vec<Check>,
}

impl Reporter {
    fn add(
        &mut self,
        section: &str,
        id: &str,
        check_name: &str,
        within_tolerance: bool,
        measured: String,
        tolerance: &str,
    ) {
        let ledger_ids = if within_tolerance {
            Vec::new()
        } else {
            self.ledger.covering(check_name)
        };
        let status = if within_tolerance {
            "pass"
        } else if ledger_ids.is_empty() {
            "fail"
        } else {
            "expected-deviation"
        };
        self.checks.push(Check {
            id: id.to_string(),
            section: section.to_string(),
            measured,
            tolerance: tolerance.to_string(),
            within_tolerance,
            status: status.to_string(),
            ledger_ids,
        });
    }
}

pub fn run_verify(cfg: &ScenarioConfig, errata_path: &Path) -> anyhow::Result<VerifyReport> {
    let basis = GellMannBasis::new(3)?;
    let sc = StructureConstants::new(&basis)?;
    let mut rep = Reporter { ledger: Ledger::load(errata_path)?, checks: Vec::new() };

    check_vector_form(&mut rep, &basis, &sc);
    check_source_row(&mut rep, &sc);
    check_blocks(&mut rep, cfg, &sc)?;
    check_closed_forms(&mut rep, cfg, &sc)?;

    let exit_code = i32::from(rep.checks.iter().any(|c| c.status == "fail"));
    Ok(VerifyReport { checks: rep.checks, exit_code })
}

fn check_vector_form(rep: &mut Reporter, basis: &GellMannBasis, sc: &StructureConstants) {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5EED);
    let mut max_err: f64 = 0.0;
    for _ in 0..1000 {
        let omega = DVector::from_fn(8, |_, _| rng.gen_range(-1.5..1.5));
        let channels: Vec<_> = (0..2)
            .map(|k| {
                LindbladChannel::new(
                    format!("g{k}"),
                    DVector::from_fn(8, |_, _| {
                        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    }),
                )
            })
            .collect();
        let x = CoherenceVector(DVector::from_fn(8, |_, _| rng.gen_range(-0.08..0.08)));
        let model = assemble(&omega, &channels, sc).unwrap();
        let lhs = rhs(&x, &model).unwrap();
        let rho = from_coherence(&x, basis).unwrap();
        let decomp = HamiltonianDecomposition { omega0: 0.0, omega };
        let drho = liouvillian_direct(&rho, &decomp, &channels, basis).unwrap();
        let direct = to_coherence(&DensityMatrix::new_unchecked(drho), basis).unwrap();
        max_err = max_err.max((lhs - direct.0).amax());
    }
    rep.add(
        "vector-form",
        "vector-rhs-vs-superoperator",
        "vector_form",
        max_err < 1e-10,
        format!("max |vector RHS - superoperator RHS| = {max_err:.3e} over 1000 random triples"),
        "1e-10",
    );
}

fn check_source_row(rep: &mut Reporter, sc: &StructureConstants) {
    let mut rng = ChaCha20Rng::seed_from_u64(0xB0B);
    let mut max_rel: f64 = 0.0;
    for _ in 0..50 {
        let g = DVector::from_fn(8, |_, _| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let ch = LindbladChannel::new("g", g);
        let row = b_row_contraction(&ch, sc).unwrap();
        let (_, _, source) = channel_generators(&ch, sc).unwrap();
        let source_c = source.map(|x| Complex::new(x, 0.0));
        let rel = (row - &source_c).norm() / source_c.norm().max(1e-300);
        max_rel = max_rel.max(rel);
    }
    rep.add(
        "vector-form",
        "source-row-contraction-vs-wedge-source",
        "source_row",
        max_rel < 1e-10,
        format!(
            "component contraction deviates from the wedge-form source by relative {max_rel:.3e} \
             (it evaluates to 2(g^g*), purely imaginary)"
        ),
        "1e-10",
    );
}

fn fmt_entries(cmp: &eit_core::lambda::BlockComparison) -> String {
    let mut parts = Vec::new();
    for e in &cmp.m_entries {
        parts.push(format!(
            "M'({},{}) oracle {:+.6} ref {:+.6}",
            e.row, e.col, e.oracle, e.reference
        ));
    }
    for e in &cmp.b_entries {
        parts.push(format!("b'({}) oracle {:+.6} ref {:+.6}", e.row, e.oracle, e.reference));
    }
    if parts.is_empty() {
        "no deviating entries".to_string()
    } else {
        parts.join("; ")
    }
}

fn check_blocks(
    rep: &mut Reporter,
    cfg: &ScenarioConfig,
    sc: &StructureConstants,
) -> anyhow::Result<()> {
    let g = cfg.physical.gamma_b + cfg.physical.gamma_c;
    let rates = ChannelRates {
        eta_z: 0.07 * g,
        eta_depol: 0.09 * g,
        eta_bc: 0.04 * g,
        eta_cb: 0.13 * g,
        ..Default::default()
    };
    let equal = LambdaParams::from_two_photon(
        0.17 * g,
        0.06 * g,
        Complex::from_polar(0.01 * g, 0.4),
        Complex::from_polar(cfg.physical.omega_c, -1.1),
        0.5 * g,
        0.5 * g,
    )?;
    let split = LambdaParams::from_two_photon(
        0.17 * g,
        0.06 * g,
        Complex::from_polar(0.01 * g, 0.4),
        Complex::from_polar(cfg.physical.omega_c, -1.1),
        0.3 * g,
        0.7 * g,
    )?;

    // standard normalization, equal and asymmetric decay splits
    let cmp_eq = compare_blocks(&equal, &rates, &standard_channels(&equal, &rates)?, sc)?;
    let cmp_sp = compare_blocks(&split, &rates, &standard_channels(&split, &rates)?, sc)?;

    rep.add(
        "blocks",
        "drive-coupling-block-exact",
        "c_block",
        cmp_eq.max_c_block_diff < 1e-12 && cmp_sp.max_c_block_diff < 1e-12,
        format!(
            "max |C block diff| = {:.3e}",
            cmp_eq.max_c_block_diff.max(cmp_sp.max_c_block_diff)
        ),
        "1e-12",
    );

    let known_m = |row: usize, col: usize| (row, col) == (3, 4);
    let known_b = |row: usize| row == 3;
    let scope_ok = cmp_eq.m_entries.iter().chain(&cmp_sp.m_entries).all(|e| known_m(e.row, e.col))
        && cmp_eq.b_entries.iter().chain(&cmp_sp.b_entries).all(|e| known_b(e.row));
    rep.add(
        "blocks",
        "standard-blocks-scope",
        "blocks_standard_scope",
        scope_ok,
        format!(
            "deviations confined to M'(3,4) and b'(3): equal split [{}]; asymmetric split [{}]",
            fmt_entries(&cmp_eq),
            fmt_entries(&cmp_sp)
        ),
        "only the ledgered entries may deviate",
    );

    let standard_clean = cmp_eq.m_entries.is_empty()
        && cmp_sp.m_entries.is_empty()
        && cmp_eq.b_entries.is_empty()
        && cmp_sp.b_entries.is_empty();
    rep.add(
        "blocks",
        "standard-blocks-vs-reference",
        "blocks_standard",
        standard_clean,
        format!(
            "equal split: [{}]; asymmetric split: [{}]",
            fmt_entries(&cmp_eq),
            fmt_entries(&cmp_sp)
        ),
        "1e-10 per entry",
    );

    // literal jump-rate normalization: decay-generated entries halve
    let cmp_jr = compare_blocks(&equal, &rates, &jump_rate_channels(&equal, &rates)?, sc)?;
    let decay_rows = [(4usize, 4usize), (5, 5), (6, 6), (7, 7), (8, 8), (3, 4)];
    let jr_scope = cmp_jr.m_entries.iter().all(|e| decay_rows.contains(&(e.row, e.col)))
        && cmp_jr.b_entries.iter().all(|e| e.row == 3 || e.row == 4);
    rep.add(
        "blocks",
        "jump-rate-blocks-scope",
        "blocks_jump_rate_scope",
        jr_scope,
        format!("deviations confined to decay-generated entries: [{}]", fmt_entries(&cmp_jr)),
        "only decay-generated entries may deviate",
    );
    rep.add(
        "blocks",
        "jump-rate-blocks-vs-reference",
        "blocks_jump_rate",
        cmp_jr.m_entries.is_empty() && cmp_jr.b_entries.is_empty(),
        format!("[{}]", fmt_entries(&cmp_jr)),
        "1e-10 per entry",
    );
    Ok(())
}

fn check_closed_forms(
    rep: &mut Reporter,
    cfg: &ScenarioConfig,
    sc: &StructureConstants,
) -> anyhow::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let grid: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.3..0.3)))
        .collect();
    let base = if cfg.rates.base > 0.0 { cfg.rates.base } else { 0.1 };
    let mixed_cfg = cfg.rates.explicit();
    let mixed = if mixed_cfg == ChannelRates::default() {
        ChannelRates {
            eta_z: 0.03,
            eta_depol: 0.06,
            eta_bc: 0.02,
            eta_cb: 0.05,
            ..Default::default()
        }
    } else {
        mixed_cfg
    };

    let cases: Vec<(ChannelKind, ChannelRates)> = vec![
        (ChannelKind::Ideal, ChannelRates::default()),
        (ChannelKind::Dephase, ChannelKind::Dephase.rates(base)?),
        (ChannelKind::DampBc, ChannelKind::DampBc.rates(base)?),
        (ChannelKind::DampCb, ChannelKind::DampCb.rates(base)?),
        (ChannelKind::Popex, ChannelKind::Popex.rates(base)?),
        (ChannelKind::Depol, ChannelKind::Depol.rates(base)?),
        (ChannelKind::General, mixed),
    ];

    for (kind, rates) in cases {
        let mut max_rel: f64 = 0.0;
        for &(delta, mean) in &grid {
            let p = LambdaParams::from_two_photon(
                delta,
                mean,
                Complex::new(cfg.physical.probe_ratio * cfg.physical.omega_c, 0.0),
                Complex::new(cfg.physical.omega_c, 0.0),
                0.5 * (cfg.physical.gamma_b + cfg.physical.gamma_c),
                0.5 * (cfg.physical.gamma_b + cfg.physical.gamma_c),
            )?;
            let numeric = susceptibility_numeric(&p, &rates, sc)?;
            let closed = chi_closed_form(kind, delta, mean, &p, &rates)?;
            max_rel = max_rel.max((numeric - closed).norm() / closed.norm().max(1e-12));
        }
        rep.add(
            "closed-forms",
            &format!("chi-{}", kind.name()),
            &format!("chi_{}", kind.name()),
            max_rel < 1e-6,
            format!("max relative |numeric - closed| = {max_rel:.3e} over 20 (delta, Delta) points"),
            "1e-6",
        );
    }
    Ok(())
}

pub fn render_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    let mut section = "";
    for c in &report.checks {
        if c.section != section {
            section = &c.section;
            out.push_str(&format!("== {section} ==\n"));
        }
        let tag = match c.status.as_str() {
            "pass" => "PASS    ".to_string(),
            "expected-deviation" => format!("EXPECTED [{}]", c.ledger_ids.join(", ")),
            _ => "FAIL    ".to_string(),
        };
        out.push_str(&format!(
            "{tag} {id}\n         measured:  {m}\n         tolerance: {t}\n",
            id = c.id,
            m = c.measured,
            t = c.tolerance
        ));
    }
    let pass = report.checks.iter().filter(|c| c.status == "pass").count();
    let expected = report
        .checks
        .iter()
        .filter(|c| c.status == "expected-deviation")
        .count();
    let fail = report.checks.iter().filter(|c| c.status == "fail").count();
    out.push_str(&format!(
        "verify: {} checks — {pass} pass, {expected} expected deviations (ledgered), {fail} failures; exit {}\n",
        report.checks.len(),
        report.exit_code
    ));
    out
}
