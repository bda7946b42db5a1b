//! Detection, SNR metrics and the Monte-Carlo sweeps over channels and
//! artificial-noise levels.
//!
//! Channels are zero-based in memory and one-based in every exported report.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::{eve_equalize, LinkConfig};
use crate::error::{Error, Result};
use crate::rng::Seed;

pub const SNR_CAP_DB: f64 = 200.0;
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_EVE_FAIL_MIN: f64 = 0.99;
pub const DEFAULT_BOB_SUCCESS_MIN: f64 = 0.99;

/// Slack for comparing rates that are ratios of small integers.
const RATE_EPS: f64 = 1e-12;

/// `10·log10(mean signal power / mean background power)`, clamped to ±`cap`.
pub fn snr_db_capped(y: &[Complex64], signal_set: &[usize], cap: f64) -> Result<f64> {
    let n = y.len();
    let members = index_set(signal_set, n)?;
    if members.len() == n {
        return Err(Error::param("signal_set", "must leave at least one background index"));
    }
    let mut signal = 0.0;
    let mut background = 0.0;
    for (i, z) in y.iter().enumerate() {
        if members.contains(&i) {
            signal += z.norm_sqr();
        } else {
            background += z.norm_sqr();
        }
    }
    let signal = signal / members.len() as f64;
    let background = background / (n - members.len()) as f64;
    if background == 0.0 {
        return Ok(if signal == 0.0 { 0.0 } else { cap });
    }
    if signal == 0.0 {
        return Ok(-cap);
    }
    Ok((10.0 * (signal / background).log10()).clamp(-cap, cap))
}

pub fn snr_db(y: &[Complex64], signal_set: &[usize]) -> Result<f64> {
    snr_db_capped(y, signal_set, SNR_CAP_DB)
}

fn index_set(indices: &[usize], n: usize) -> Result<BTreeSet<usize>> {
    if indices.is_empty() {
        return Err(Error::param("signal_set", "must not be empty"));
    }
    let mut set = BTreeSet::new();
    for &i in indices {
        if i >= n {
            return Err(Error::param("signal_set", format!("index {i} out of range for {n} channels")));
        }
        if !set.insert(i) {
            return Err(Error::param("signal_set", format!("duplicate index {i}")));
        }
    }
    Ok(set)
}

/// Indices of the `k` largest magnitudes, ascending; ties go to the lower index.
pub fn detect_topk(y: &[Complex64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[b].norm_sqr().total_cmp(&y[a].norm_sqr()).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Indices with `|y_i| ≥ tau`.
pub fn detect_threshold(y: &[Complex64], tau: f64) -> Vec<usize> {
    y.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() >= tau)
        .map(|(i, _)| i)
        .collect()
}

/// Mean SNR of a grid cell, or the failure sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Db(f64),
    Failed,
}

impl Snr {
    pub fn is_failed(&self) -> bool {
        matches!(self, Snr::Failed)
    }

    /// dB value, with `Failed` mapped to −∞.
    pub fn value(&self) -> f64 {
        match *self {
            Snr::Db(v) => v,
            Snr::Failed => f64::NEG_INFINITY,
        }
    }

    pub fn db(&self) -> Option<f64> {
        match *self {
            Snr::Db(v) => Some(v),
            Snr::Failed => None,
        }
    }

    /// Round to the 3 decimals used in CSV exports.
    pub fn rounded(&self) -> Snr {
        match *self {
            Snr::Db(v) => Snr::Db(format!("{v:.3}").parse().expect("formatted float parses")),
            Snr::Failed => Snr::Failed,
        }
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Snr::Db(v) => write!(f, "{v:.3}"),
            Snr::Failed => f.write_str("-inf"),
        }
    }
}

impl std::str::FromStr for Snr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-inf" {
            return Ok(Snr::Failed);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Snr::Db(v)),
            _ => Err(Error::MalformedReport(format!("bad SNR value `{s}`"))),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Snr::Db(v) => serializer.serialize_f64(v),
            Snr::Failed => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(Snr::Db(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub detected_channels: Vec<usize>,
    pub success: bool,
    pub snr_db: Snr,
}

impl DetectionResult {
    /// Top-k detection against the sent set, SNR only on success.
    pub fn evaluate(y: &[Complex64], sent: &[usize]) -> Result<Self> {
        let mut expected = sent.to_vec();
        expected.sort_unstable();
        let detected = detect_topk(y, sent.len());
        let success = detected == expected;
        let snr_db = if success { Snr::Db(snr_db(y, sent)?) } else { Snr::Failed };
        Ok(DetectionResult {
            detected_channels: detected,
            success,
            snr_db,
        })
    }
}

/// Equal-weight superposition over distinct channels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdmMessage {
    active_channels: Vec<usize>,
}

impl MdmMessage {
    pub fn new(active_channels: Vec<usize>, n: usize) -> Result<Self> {
        if active_channels.is_empty() || active_channels.len() > n {
            return Err(Error::param(
                "channels",
                format!("need between 1 and {n} active channels, got {}", active_channels.len()),
            ));
        }
        let mut seen = BTreeSet::new();
        for &c in &active_channels {
            if c >= n {
                return Err(Error::param("channels", format!("channel index {c} out of range for {n} modes")));
            }
            if !seen.insert(c) {
                return Err(Error::param("channels", format!("channel {} listed twice", c + 1)));
            }
        }
        Ok(MdmMessage { active_channels })
    }

    pub fn single(channel: usize, n: usize) -> Result<Self> {
        MdmMessage::new(vec![channel], n)
    }

    /// Activate `channels[i]` wherever `bits[i]` is set.
    pub fn from_bits(channels: &[usize], bits: &[bool], n: usize) -> Result<Self> {
        if channels.len() != bits.len() {
            return Err(Error::param(
                "bits",
                format!("{} bits for {} channels", bits.len(), channels.len()),
            ));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = channels.iter().find(|&&c| !seen.insert(c)) {
            return Err(Error::param("channels", format!("channel {} listed twice", dup + 1)));
        }
        let active: Vec<usize> = channels.iter().zip(bits).filter(|(_, &b)| b).map(|(&c, _)| c).collect();
        MdmMessage::new(active, n)
    }

    pub fn channels(&self) -> &[usize] {
        &self.active_channels
    }

    pub fn k(&self) -> usize {
        self.active_channels.len()
    }

    /// Per-channel amplitude 1/√k.
    pub fn amplitude(&self) -> f64 {
        1.0 / (self.k() as f64).sqrt()
    }

    pub fn to_vector(&self, n: usize) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for &c in &self.active_channels {
            x[c] = Complex64::new(self.amplitude(), 0.0);
        }
        x
    }
}

/// One transmission: precode, deliver to both receivers, detect.
pub fn run_trial(link: &LinkConfig, message: &MdmMessage, seed: Seed) -> Result<(DetectionResult, DetectionResult)> {
    let n = link.dimension();
    if let Some(&c) = message.channels().iter().find(|&&c| c >= n) {
        return Err(Error::param("channels", format!("channel index {c} out of range for {n} modes")));
    }
    let x = message.to_vector(n);
    let xp = link.precode(&x, seed.derive(&[0]))?;
    let y_b = link.observe_bob(&xp, seed.derive(&[1]))?;
    let y_e = eve_equalize(link, &link.observe_eve(&xp, seed.derive(&[2]))?)?;
    Ok((
        DetectionResult::evaluate(&y_b, message.channels())?,
        DetectionResult::evaluate(&y_e, message.channels())?,
    ))
}

/// Seed of trial `t` for a message on `channels` at `level`.
pub fn trial_seed(base: Seed, channels: &[usize], level: f64, t: usize) -> Seed {
    let mut tags: Vec<u64> = channels.iter().map(|&c| c as u64).collect();
    tags.push(level.to_bits());
    tags.push(t as u64);
    base.derive(&tags)
}

/// Accumulated statistics of one side in one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub success_rate: f64,
    pub mean_snr: Snr,
}

#[derive(Default)]
struct Tally {
    successes: usize,
    snr_sum: f64,
}

impl Tally {
    fn add(&mut self, r: &DetectionResult) {
        if let Snr::Db(v) = r.snr_db {
            self.successes += 1;
            self.snr_sum += v;
        }
    }

    /// Majority rule: fewer than half successful trials marks the cell FAILED.
    fn finish(&self, trials: usize) -> CellStats {
        let success_rate = self.successes as f64 / trials as f64;
        let mean_snr = if self.successes == 0 || success_rate < 0.5 {
            Snr::Failed
        } else {
            Snr::Db(self.snr_sum / self.successes as f64)
        };
        CellStats { success_rate, mean_snr }
    }
}

fn run_cell(link: &LinkConfig, message: &MdmMessage, trials: usize, seed: Seed) -> Result<(CellStats, CellStats)> {
    let level = link.settings().artificial_noise_level;
    let mut bob = Tally::default();
    let mut eve = Tally::default();
    for t in 0..trials {
        let (b, e) = run_trial(link, message, trial_seed(seed, message.channels(), level, t))?;
        bob.add(&b);
        eve.add(&e);
    }
    Ok((bob.finish(trials), eve.finish(trials)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bob,
    Eve,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Bob => "bob",
            Side::Eve => "eve",
        }
    }
}

/// Detection results over a (channel × noise level) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Zero-based channel indices, one grid row each.
    pub channels: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub bob_snr: Vec<Vec<Snr>>,
    pub eve_snr: Vec<Vec<Snr>>,
    pub bob_success_rate: Vec<Vec<f64>>,
    pub eve_success_rate: Vec<Vec<f64>>,
    pub trials_per_cell: usize,
    pub seed: Seed,
}

/// CSV columns; `channel` is one-based.
#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    channel: usize,
    noise_level: f64,
    side: Side,
    mean_snr_db: String,
    success_rate: f64,
    trials: usize,
    seed: u64,
}

impl SweepReport {
    pub fn level_index(&self, noise_level: f64) -> Result<usize> {
        self.noise_levels
            .iter()
            .position(|&l| (l - noise_level).abs() <= 1e-12)
            .ok_or_else(|| Error::NoiseLevelNotInReport {
                requested: noise_level,
                available: self.noise_levels.clone(),
            })
    }

    pub fn snr(&self, side: Side) -> &Vec<Vec<Snr>> {
        match side {
            Side::Bob => &self.bob_snr,
            Side::Eve => &self.eve_snr,
        }
    }

    pub fn success_rate(&self, side: Side) -> &Vec<Vec<f64>> {
        match side {
            Side::Bob => &self.bob_success_rate,
            Side::Eve => &self.eve_success_rate,
        }
    }

    /// Copy with SNR values rounded as in the CSV export.
    pub fn rounded(&self) -> SweepReport {
        let round = |g: &Vec<Vec<Snr>>| g.iter().map(|row| row.iter().map(Snr::rounded).collect()).collect();
        SweepReport {
            bob_snr: round(&self.bob_snr),
            eve_snr: round(&self.eve_snr),
            ..self.clone()
        }
    }

    /// One row per (channel, noise level, side), channel-major.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for (ci, &channel) in self.channels.iter().enumerate() {
            for (li, &noise_level) in self.noise_levels.iter().enumerate() {
                for side in [Side::Bob, Side::Eve] {
                    csv.serialize(CsvRow {
                        channel: channel + 1,
                        noise_level,
                        side,
                        mean_snr_db: self.snr(side)[ci][li].to_string(),
                        success_rate: self.success_rate(side)[ci][li],
                        trials: self.trials_per_cell,
                        seed: self.seed.0,
                    })?;
                }
            }
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<SweepReport> {
        let mut rows = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: CsvRow = row?;
            if row.channel == 0 {
                return Err(Error::MalformedReport("channel labels are one-based".into()));
            }
            rows.push(row);
        }
        let first = rows.first().ok_or_else(|| Error::MalformedReport("no rows".into()))?;
        let (trials, seed) = (first.trials, first.seed);
        let mut channels: Vec<usize> = Vec::new();
        let mut levels: Vec<f64> = Vec::new();
        for r in &rows {
            if !channels.contains(&(r.channel - 1)) {
                channels.push(r.channel - 1);
            }
            if !levels.iter().any(|&l| l.to_bits() == r.noise_level.to_bits()) {
                levels.push(r.noise_level);
            }
            if r.trials != trials || r.seed != seed {
                return Err(Error::MalformedReport("trials and seed must be constant".into()));
            }
        }
        let (nc, nl) = (channels.len(), levels.len());
        if rows.len() != nc * nl * 2 {
            return Err(Error::MalformedReport(format!(
                "{} rows for {nc} channels × {nl} levels × 2 sides",
                rows.len()
            )));
        }
        let mut snr = [vec![vec![None; nl]; nc], vec![vec![None; nl]; nc]];
        let mut rate = [vec![vec![0.0; nl]; nc], vec![vec![0.0; nl]; nc]];
        for r in &rows {
            let ci = channels.iter().position(|&c| c == r.channel - 1).expect("collected above");
            let li = levels.iter().position(|l| l.to_bits() == r.noise_level.to_bits()).expect("collected above");
            let side = r.side as usize;
            if snr[side][ci][li].is_some() {
                return Err(Error::MalformedReport(format!(
                    "duplicate row for channel {} level {} side {}",
                    r.channel,
                    r.noise_level,
                    r.side.as_str()
                )));
            }
            if !(0.0..=1.0).contains(&r.success_rate) {
                return Err(Error::MalformedReport(format!("success rate {} outside [0, 1]", r.success_rate)));
            }
            snr[side][ci][li] = Some(r.mean_snr_db.parse::<Snr>()?);
            rate[side][ci][li] = r.success_rate;
        }
        let unwrap = |g: &Vec<Vec<Option<Snr>>>| -> Vec<Vec<Snr>> {
            g.iter().map(|row| row.iter().map(|c| c.expect("every cell filled")).collect()).collect()
        };
        let [bob_rate, eve_rate] = rate;
        Ok(SweepReport {
            channels,
            noise_levels: levels,
            bob_snr: unwrap(&snr[0]),
            eve_snr: unwrap(&snr[1]),
            bob_success_rate: bob_rate,
            eve_success_rate: eve_rate,
            trials_per_cell: trials,
            seed: Seed(seed),
        })
    }
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::param("noise_levels", "must not be empty"));
    }
    if let Some(bad) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::param("noise_levels", format!("level {bad} outside [0, 1]")));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("noise_levels", "must be strictly ascending"));
    }
    Ok(())
}

/// Single-channel trials on every mode at the link's artificial-noise level.
pub fn channel_sweep(link: &LinkConfig, trials: usize, seed: Seed) -> Result<SweepReport> {
    noise_sweep(link, &[link.settings().artificial_noise_level], trials, seed)
}

/// Single-channel trials on every mode at every noise level; cells run in
/// parallel with seeds derived from the cell coordinates.
pub fn noise_sweep(link: &LinkConfig, noise_levels: &[f64], trials: usize, seed: Seed) -> Result<SweepReport> {
    let channels: Vec<usize> = (0..link.dimension()).collect();
    sweep_channels(link, &channels, noise_levels, trials, seed)
}

/// [`noise_sweep`] restricted to a subset of channels.
pub fn sweep_channels(link: &LinkConfig, channels: &[usize], noise_levels: &[f64], trials: usize, seed: Seed) -> Result<SweepReport> {
    validate_levels(noise_levels)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let n = link.dimension();
    let links = noise_levels
        .iter()
        .map(|&l| link.with_artificial_noise(l))
        .collect::<Result<Vec<_>>>()?;
    let messages = channels
        .iter()
        .map(|&c| MdmMessage::single(c, n))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> = (0..channels.len())
        .flat_map(|c| (0..noise_levels.len()).map(move |l| (c, l)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(c, l)| run_cell(&links[l], &messages[c], trials, seed))
        .collect::<Result<Vec<_>>>()?;

    let nl = noise_levels.len();
    let grid = |f: &dyn Fn(&(CellStats, CellStats)) -> CellStats| -> Vec<Vec<CellStats>> {
        results.chunks(nl).map(|row| row.iter().map(f).collect()).collect()
    };
    let bob = grid(&|r| r.0);
    let eve = grid(&|r| r.1);
    let snr = |g: &Vec<Vec<CellStats>>| g.iter().map(|row| row.iter().map(|c| c.mean_snr).collect()).collect();
    let rate = |g: &Vec<Vec<CellStats>>| g.iter().map(|row| row.iter().map(|c| c.success_rate).collect()).collect();
    Ok(SweepReport {
        channels: channels.to_vec(),
        noise_levels: noise_levels.to_vec(),
        bob_snr: snr(&bob),
        eve_snr: snr(&eve),
        bob_success_rate: rate(&bob),
        eve_success_rate: rate(&eve),
        trials_per_cell: trials,
        seed,
    })
}

/// Channels where Eve fails at least `eve_fail_min` of the time while Bob
/// succeeds at least `bob_success_min` of the time.
pub fn secure_channels(report: &SweepReport, noise_level: f64, eve_fail_min: f64, bob_success_min: f64) -> Result<Vec<usize>> {
    let li = report.level_index(noise_level)?;
    Ok(report
        .channels
        .iter()
        .enumerate()
        .filter(|&(ci, _)| {
            1.0 - report.eve_success_rate[ci][li] >= eve_fail_min - RATE_EPS
                && report.bob_success_rate[ci][li] >= bob_success_min - RATE_EPS
        })
        .map(|(_, &c)| c)
        .collect())
}

/// Exported secure-channel set with the thresholds that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecureChannelReport {
    pub noise_level: f64,
    pub eve_fail_min: f64,
    pub bob_success_min: f64,
    pub trials_per_cell: usize,
    pub seed: Seed,
    /// One-based channel labels.
    pub channels: Vec<usize>,
}

impl SecureChannelReport {
    pub fn from_report(report: &SweepReport, noise_level: f64, eve_fail_min: f64, bob_success_min: f64) -> Result<Self> {
        let channels = secure_channels(report, noise_level, eve_fail_min, bob_success_min)?;
        Ok(SecureChannelReport {
            noise_level,
            eve_fail_min,
            bob_success_min,
            trials_per_cell: report.trials_per_cell,
            seed: report.seed,
            channels: channels.into_iter().map(|c| c + 1).collect(),
        })
    }
}

/// Ordered count `n·(n−1)·…·(n−k+1)` of k-channel symbols.
pub fn mdm_symbol_count(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Err(Error::param("k", format!("cannot pick {k} of {n} channels")));
    }
    (n - k + 1..=n).try_fold(1u128, |acc, f| acc.checked_mul(f as u128)).ok_or_else(|| Error::param("n", "symbol count overflows u128"))
}

/// Success thresholds for declaring a message protected at a noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdmThresholds {
    /// Eve's message-level success rate must be strictly below this.
    pub eve_success_max: f64,
    /// Bob's message-level success rate must reach this.
    pub bob_success_min: f64,
}

impl Default for MdmThresholds {
    fn default() -> Self {
        MdmThresholds {
            eve_success_max: 0.05,
            bob_success_min: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdmLevel {
    pub noise_level: f64,
    pub bob_success_rate: f64,
    pub eve_success_rate: f64,
    pub bob_mean_snr_db: Snr,
    pub eve_mean_snr_db: Snr,
    pub protected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdmSummary {
    /// One-based labels of the active channels.
    pub channels: Vec<usize>,
    pub trials: usize,
    pub seed: Seed,
    pub thresholds: MdmThresholds,
    pub levels: Vec<MdmLevel>,
    /// Lowest level at which the message is protected, if any.
    pub secure_from: Option<f64>,
}

/// Sweep the artificial-noise level for a fixed message and report where
/// Eve's message-level detection breaks down while Bob's holds.
pub fn secure_mdm_trial(
    link: &LinkConfig,
    message: &MdmMessage,
    noise_levels: &[f64],
    trials: usize,
    seed: Seed,
    thresholds: MdmThresholds,
) -> Result<MdmSummary> {
    validate_levels(noise_levels)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    MdmMessage::new(message.channels().to_vec(), link.dimension())?;
    let levels = noise_levels
        .par_iter()
        .map(|&level| {
            let (bob, eve) = run_cell(&link.with_artificial_noise(level)?, message, trials, seed)?;
            Ok(MdmLevel {
                noise_level: level,
                bob_success_rate: bob.success_rate,
                eve_success_rate: eve.success_rate,
                bob_mean_snr_db: bob.mean_snr,
                eve_mean_snr_db: eve.mean_snr,
                protected: eve.success_rate < thresholds.eve_success_max
                    && bob.success_rate >= thresholds.bob_success_min - RATE_EPS,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let secure_from = levels.iter().find(|l| l.protected).map(|l| l.noise_level);
    Ok(MdmSummary {
        channels: message.channels().iter().map(|c| c + 1).collect(),
        trials,
        seed,
        thresholds,
        levels,
        secure_from,
    })
}
