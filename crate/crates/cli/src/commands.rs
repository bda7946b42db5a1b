//! Subcommand bodies. Each returns the files it wrote and a one-line summary;
//! printing and exit codes are left to the binary.

use std::fs::File;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use log::info;
use mmfpls::channel::{LinkConfig, TapKind, TapProfile};
use mmfpls::fiber::{solve_modes, ModeBasis};
use mmfpls::linalg::MatrixFile;
use mmfpls::security::{noise_sweep, secure_mdm_trial, MdmMessage, MdmSummary, SecureChannelReport, Side, SweepReport};

use crate::config::Experiment;
use crate::output::{write_atomic, write_json};
use crate::svg;

pub const MODES_FILE: &str = "modes.json";
pub const T_AB_FILE: &str = "t_ab.json";
pub const T_AE_FILE: &str = "t_ae.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const BOB_HEATMAP_FILE: &str = "sweep_bob.svg";
pub const EVE_HEATMAP_FILE: &str = "sweep_eve.svg";
pub const SECURE_FILE: &str = "secure.json";
pub const MDM_FILE: &str = "mdm.json";

/// Label stored in exported matrix files.
pub const BASIS_LABEL: &str = "LP";

#[derive(Debug, Clone)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub summary: String,
}

fn out_path(exp: &Experiment, name: &str) -> PathBuf {
    exp.out_dir().join(name)
}

pub fn solve(exp: &Experiment) -> Result<ModeBasis> {
    let basis = solve_modes(&exp.config.fiber).context("solving fiber modes")?;
    info!("{} guided modes at V = {:.4}", basis.len(), exp.config.fiber.v_number());
    Ok(basis)
}

fn dimension(exp: &Experiment, basis: &ModeBasis) -> Result<usize> {
    match exp.config.dimension {
        Some(n) if n != basis.len() && exp.config.link.tap.kind == TapKind::EdgePower => bail!(
            "dimension: {n} differs from the fiber's {} modes; the edge-power tap needs one entry per mode",
            basis.len()
        ),
        Some(n) => Ok(n),
        None => Ok(basis.len()),
    }
}

/// Assemble the link described by the config.
pub fn build_link(exp: &Experiment) -> Result<LinkConfig> {
    let basis = solve(exp)?;
    let n = dimension(exp, &basis)?;
    let doc = &exp.config.link;
    let tap = match doc.tap.kind {
        TapKind::EdgePower => doc.tap.build(&basis).context("building tap matrix")?,
        TapKind::Identity => TapProfile::identity(n),
    };
    doc.build_with_tap(n, tap, &exp.base_dir).context("building link")
}

pub fn cmd_modes(exp: &Experiment) -> Result<Outcome> {
    let basis = solve(exp)?;
    let table = basis.table(exp.config.link.tap.rho)?;
    let max_l = basis.modes.iter().map(|m| m.l).max().unwrap_or(0);
    let path = write_json(&out_path(exp, MODES_FILE), &table)?;
    Ok(Outcome {
        summary: format!(
            "{} modes (V = {:.4}, max l = {max_l}) written to {}",
            basis.len(),
            exp.config.fiber.v_number(),
            path.display()
        ),
        written: vec![path],
    })
}

pub fn cmd_tm_gen(exp: &Experiment) -> Result<Outcome> {
    let n = match exp.config.dimension {
        Some(n) => n,
        None => solve(exp)?.len(),
    };
    let doc = &exp.config.link;
    let mut written = Vec::new();
    for (name, spec) in [(T_AB_FILE, Some(&doc.t_ab)), (T_AE_FILE, doc.t_ae.as_ref())] {
        let Some(spec) = spec else { continue };
        let m = spec.realize(n, &exp.base_dir)?;
        let file = MatrixFile::from_matrix(&m, BASIS_LABEL)?;
        let path = write_atomic(&out_path(exp, name), |w| Ok(file.write_json(w)?))?;
        // Read back so a zero exit status means the file is loadable.
        let back = MatrixFile::read_json(File::open(&path)?)?.to_matrix()?;
        if back.max_abs_diff(&m) != 0.0 {
            bail!("{} did not round-trip exactly", path.display());
        }
        written.push(path);
    }
    Ok(Outcome {
        summary: format!("{n}x{n} transmission matrix written to {}", written[0].display()),
        written,
    })
}

pub fn run_sweep(exp: &Experiment) -> Result<SweepReport> {
    let link = build_link(exp)?;
    let c = &exp.config;
    info!(
        "sweeping {} channels x {} levels at {} trials",
        link.dimension(),
        c.noise_levels.len(),
        c.trials
    );
    Ok(noise_sweep(&link, &c.noise_levels, c.trials, c.seed)?)
}

fn write_report(exp: &Experiment, report: &SweepReport) -> Result<Vec<PathBuf>> {
    let csv_path = write_atomic(&out_path(exp, SWEEP_FILE), |w| Ok(report.write_csv(w)?))?;
    let back = SweepReport::read_csv(File::open(&csv_path)?)?;
    if back != report.rounded() {
        bail!("{} did not parse back into the same report", csv_path.display());
    }
    let mut written = vec![csv_path];
    if exp.config.output.heatmaps {
        let range = svg::db_range(report);
        for (side, name) in [(Side::Bob, BOB_HEATMAP_FILE), (Side::Eve, EVE_HEATMAP_FILE)] {
            let doc = svg::heatmap(report, side, range);
            written.push(write_atomic(&out_path(exp, name), |w| Ok(w.write_all(doc.as_bytes())?))?);
        }
    }
    Ok(written)
}

pub fn cmd_sweep(exp: &Experiment) -> Result<Outcome> {
    let report = run_sweep(exp)?;
    let written = write_report(exp, &report)?;
    let rows = report.channels.len() * report.noise_levels.len() * 2;
    Ok(Outcome {
        summary: format!("{rows} rows written to {}", written[0].display()),
        written,
    })
}

/// Classify channels at the configured level, reading `report` if given and
/// otherwise running (and saving) a fresh sweep.
pub fn cmd_secure(exp: &Experiment) -> Result<(Outcome, SecureChannelReport)> {
    let s = &exp.config.secure;
    let mut written = Vec::new();
    let report = match &s.report {
        Some(p) => {
            let p = exp.resolve(p);
            SweepReport::read_csv(File::open(&p).with_context(|| format!("opening {}", p.display()))?)
                .with_context(|| format!("reading {}", p.display()))?
        }
        None => {
            let report = run_sweep(exp)?;
            written.extend(write_report(exp, &report)?);
            report
        }
    };
    let secure = SecureChannelReport::from_report(&report, s.noise_level, s.eve_fail_min, s.bob_success_min)?;
    let path = write_json(&out_path(exp, SECURE_FILE), &secure)?;
    written.push(path.clone());
    let summary = format!(
        "secure channels at {}% noise (Eve fails >= {}, Bob succeeds >= {}): {:?} written to {}",
        s.noise_level * 100.0,
        s.eve_fail_min,
        s.bob_success_min,
        secure.channels,
        path.display()
    );
    Ok((Outcome { written, summary }, secure))
}

pub fn cmd_mdm(exp: &Experiment) -> Result<(Outcome, MdmSummary)> {
    let link = build_link(exp)?;
    let c = &exp.config;
    let message = MdmMessage::new(c.mdm.active_channels()?, link.dimension())?;
    let levels = c.mdm.noise_levels.as_ref().unwrap_or(&c.noise_levels);
    let summary = secure_mdm_trial(&link, &message, levels, c.trials, c.seed, c.mdm.thresholds())?;
    let path = write_json(&out_path(exp, MDM_FILE), &summary)?;
    let verdict = match summary.secure_from {
        Some(l) => format!("protected from {}% noise", l * 100.0),
        None => "not protected at any level".into(),
    };
    Ok((
        Outcome {
            summary: format!("message on channels {:?} {verdict}; transcript written to {}", summary.channels, path.display()),
            written: vec![path],
        },
        summary,
    ))
}
