//! Parameter sweeps over profile width and momentum mismatch, the Fock-space
//! cross-check and state dumps behind the command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{oracle_density_matrix, MomentumGrid};
use crate::measures::{negativity, EntanglementReport};
use crate::overlaps::{overlap_quad, OverlapMethod, OverlapQuad, PairProfiles, ProfileFamily, ProfileShape, ProfileSpec};
use crate::photon::{assemble_density_matrix, map_to_polarization, MatrixRecord, SelectionRuleTable, TwoQubitDM};

pub const CSV_HEADER: &str = "family,width_e,width_h,d,L,M,Ltilde,Mtilde,concurrence,negativity";

/// Largest grid the oracle check accepts.
pub const MAX_ORACLE_POINTS: usize = 2001;

pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-3;

/// `start:stop:steps`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl DRange {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(Error::Spec(format!("d-range must be start:stop:steps, got `{s}`")));
        };
        let num = |v: &str| v.parse::<f64>().map_err(|e| Error::Spec(format!("d-range `{v}`: {e}")));
        let range = DRange {
            start: num(start)?,
            stop: num(stop)?,
            steps: steps
                .parse()
                .map_err(|e| Error::Spec(format!("d-range steps `{steps}`: {e}")))?,
        };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Spec(format!("d-range needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start < 0.0 {
            return Err(Error::Spec(format!("d-range start must be >= 0, got {}", self.start)));
        }
        if self.stop < self.start {
            return Err(Error::Spec(format!("d-range stop {} below start {}", self.stop, self.start)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Grid used by the Fock-space cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub span: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 1001,
            span: 40.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<MomentumGrid> {
        if self.points > MAX_ORACLE_POINTS {
            return Err(Error::Spec(format!(
                "grid of {} points is too large for the Fock-space oracle (limit {MAX_ORACLE_POINTS}); \
                 states grow as points² and the check would not finish in reasonable time",
                self.points
            )));
        }
        MomentumGrid::symmetric(self.span, self.points).map_err(|e| Error::Spec(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub profile: ProfileSpec,
    /// Electron widths; one curve each. Ignored for tabulated profiles.
    pub widths: Vec<f64>,
    /// Hole widths paired with `widths`; holes share the electron width when absent.
    pub hole_widths: Option<Vec<f64>>,
    pub d_range: DRange,
    pub method: OverlapMethod,
    pub oracle_check: Option<GridSpec>,
    pub output: Option<PathBuf>,
    pub jobs: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.d_range.validate()?;
        if self.jobs == 0 {
            return Err(Error::Spec("jobs must be at least 1".into()));
        }
        if self.profile.family == ProfileFamily::Tabulated {
            return Ok(());
        }
        if self.widths.is_empty() {
            return Err(Error::Spec("at least one width is required".into()));
        }
        let holes = self.hole_widths.as_deref().unwrap_or(&[]);
        for &w in self.widths.iter().chain(holes) {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Spec(format!("widths must be positive, got {w}")));
            }
        }
        if let Some(h) = &self.hole_widths {
            if h.len() != self.widths.len() {
                return Err(Error::Spec(format!(
                    "{} hole widths given for {} electron widths",
                    h.len(),
                    self.widths.len()
                )));
            }
        }
        Ok(())
    }

    /// `(electron shape, hole shape)` per curve.
    fn curves(&self) -> Result<Vec<(ProfileShape, ProfileShape)>> {
        let spec_err = |e: Error| match e {
            Error::Io(_) => e,
            other => Error::Spec(other.to_string()),
        };
        if self.profile.family == ProfileFamily::Tabulated {
            let shape = ProfileShape::from_spec(&self.profile, None).map_err(spec_err)?;
            return Ok(vec![(shape.clone(), shape)]);
        }
        self.widths
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let hw = self.hole_widths.as_ref().map_or(w, |h| h[i]);
                Ok((
                    ProfileShape::from_spec(&self.profile, Some(w)).map_err(spec_err)?,
                    ProfileShape::from_spec(&self.profile, Some(hw)).map_err(spec_err)?,
                ))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: ProfileFamily,
    pub width_e: f64,
    pub width_h: f64,
    pub d: f64,
    pub overlaps: Option<OverlapQuad>,
    pub concurrence: f64,
    pub negativity: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub oracle_reports: Vec<OracleReport>,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }

    pub fn oracle_failures(&self) -> usize {
        self.oracle_reports.iter().filter(|r| !r.pass).count()
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

fn evaluate_point(electron: &ProfileShape, hole: &ProfileShape, d: f64, method: OverlapMethod) -> SweepRow {
    let mut row = SweepRow {
        family: electron.family(),
        width_e: electron.width(),
        width_h: hole.width(),
        d,
        overlaps: None,
        concurrence: f64::NAN,
        negativity: f64::NAN,
        failure: None,
    };
    let result = (|| -> Result<(OverlapQuad, f64, f64)> {
        let q = overlap_quad(&PairProfiles::symmetric(electron, hole, d)?, method)?;
        let spin = assemble_density_matrix(&q)?.normalize()?;
        let photon = map_to_polarization(&spin, &SelectionRuleTable::default())?;
        let report = EntanglementReport::from_state(&photon, &q)?;
        Ok((q, report.concurrence, negativity(&photon)?))
    })();
    match result {
        Ok((q, c, n)) => {
            row.overlaps = Some(q);
            row.concurrence = c;
            row.negativity = n;
        }
        Err(e) => row.failure = Some(e.to_string()),
    }
    row
}

/// Evaluate every (width, d) point. Rows come back ordered by curve, then by
/// `d`, whatever order the workers finish in. Per-point numerical failures are
/// recorded on the row; spec problems abort.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let curves = spec.curves()?;
    let ds = spec.d_range.values();
    let points: Vec<(usize, f64)> = (0..curves.len()).flat_map(|c| ds.iter().map(move |&d| (c, d))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::Spec(format!("cannot start {} workers: {e}", spec.jobs)))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|&(c, d)| evaluate_point(&curves[c].0, &curves[c].1, d, spec.method))
            .collect()
    });

    let mut oracle_reports = Vec::new();
    if let Some(grid) = spec.oracle_check {
        for (electron, hole) in &curves {
            for d in [spec.d_range.start, electron.width().min(spec.d_range.stop)] {
                oracle_reports.push(compare_with_oracle(electron, hole, d, grid, DEFAULT_ORACLE_TOLERANCE)?);
            }
        }
    }
    Ok(SweepOutcome { rows, oracle_reports })
}

/// Nine significant digits, fixed notation for moderate magnitudes.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = v.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    let exp = exp.max(rounded.abs().log10().floor() as i32);
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.8e}")
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 120);
    out.push_str(CSV_HEADER);
    out.push('\n');
    let nan = f64::NAN;
    for r in rows {
        let q = r.overlaps.unwrap_or(OverlapQuad {
            l: nan,
            m: nan,
            l_tilde: nan,
            m_tilde: nan,
        });
        let fields = [
            r.family.to_string(),
            format_sig9(r.width_e),
            format_sig9(r.width_h),
            format_sig9(r.d),
            format_sig9(q.l),
            format_sig9(q.m),
            format_sig9(q.l_tilde),
            format_sig9(q.m_tilde),
            format_sig9(r.concurrence),
            format_sig9(r.negativity),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheckSpec {
    pub profile: ProfileSpec,
    pub width: Option<f64>,
    pub hole_width: Option<f64>,
    pub d: f64,
    pub grid: GridSpec,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub width_e: f64,
    pub width_h: f64,
    pub d: f64,
    pub grid: GridSpec,
    pub analytic: TwoQubitDM,
    pub oracle: TwoQubitDM,
    /// Largest entrywise deviation, relative to the analytic entry (or to the
    /// largest analytic entry where the analytic value is zero).
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn summary(&self) -> String {
        format!(
            "oracle check width_e={} width_h={} d={} grid={}x±{}: max relative deviation {:.3e} (tolerance {:.1e}) {}",
            self.width_e,
            self.width_h,
            self.d,
            self.grid.points,
            self.grid.span,
            self.max_deviation,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Entrywise relative deviation of `other` from `reference`.
pub fn max_relative_deviation(reference: &TwoQubitDM, other: &TwoQubitDM) -> f64 {
    let a = reference.entries();
    let b = other.entries();
    let scale = a.map(|z| z.norm()).max();
    let floor = 1e-12 * scale;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let diff = (a[(i, j)] - b[(i, j)]).norm();
            let denom = if a[(i, j)].norm() > floor { a[(i, j)].norm() } else { scale };
            worst = worst.max(diff / denom);
        }
    }
    worst
}

fn compare_with_oracle(
    electron: &ProfileShape,
    hole: &ProfileShape,
    d: f64,
    grid: GridSpec,
    tolerance: f64,
) -> Result<OracleReport> {
    let momentum_grid = grid.build()?;
    let profiles = PairProfiles::symmetric(electron, hole, d)?;
    let q = overlap_quad(&profiles, OverlapMethod::Auto)?;
    let analytic = assemble_density_matrix(&q)?.normalize()?;
    let oracle = oracle_density_matrix(&profiles, &momentum_grid)?.normalize()?;
    let max_deviation = max_relative_deviation(&analytic, &oracle);
    Ok(OracleReport {
        width_e: electron.width(),
        width_h: hole.width(),
        d,
        grid,
        analytic,
        oracle,
        max_deviation,
        tolerance,
        pass: max_deviation <= tolerance,
    })
}

pub fn run_oracle_check(spec: &OracleCheckSpec) -> Result<OracleReport> {
    if !(spec.d.is_finite() && spec.d >= 0.0) {
        return Err(Error::Spec(format!("d must be >= 0, got {}", spec.d)));
    }
    if !(spec.tolerance > 0.0) {
        return Err(Error::Spec(format!("tolerance must be positive, got {}", spec.tolerance)));
    }
    let electron = ProfileShape::from_spec(&spec.profile, spec.width).map_err(|e| Error::Spec(e.to_string()))?;
    let hole = ProfileShape::from_spec(&spec.profile, spec.hole_width.or(spec.width))
        .map_err(|e| Error::Spec(e.to_string()))?;
    compare_with_oracle(&electron, &hole, spec.d, spec.grid, spec.tolerance)
}

#[derive(Debug, Clone, Serialize)]
pub struct StateDump {
    pub family: ProfileFamily,
    pub width_e: f64,
    pub width_h: f64,
    pub d: f64,
    pub overlaps: OverlapQuad,
    pub spin: MatrixRecord,
    pub photon: MatrixRecord,
    pub report: EntanglementReport,
}

pub fn dump_state(profile: &ProfileSpec, width: Option<f64>, hole_width: Option<f64>, d: f64) -> Result<StateDump> {
    let electron = ProfileShape::from_spec(profile, width).map_err(|e| Error::Spec(e.to_string()))?;
    let hole = ProfileShape::from_spec(profile, hole_width.or(width)).map_err(|e| Error::Spec(e.to_string()))?;
    let q = overlap_quad(&PairProfiles::symmetric(&electron, &hole, d)?, OverlapMethod::Auto)?;
    let spin = assemble_density_matrix(&q)?.normalize()?;
    let photon = map_to_polarization(&spin, &SelectionRuleTable::default())?;
    Ok(StateDump {
        family: electron.family(),
        width_e: electron.width(),
        width_h: hole.width(),
        d,
        overlaps: q,
        spin: spin.to_record(),
        photon: photon.to_record(),
        report: EntanglementReport::from_state(&photon, &q)?,
    })
}

/// `key = value` lines; `#` comments and blank lines are skipped. Keys are
/// flag names without the leading dashes.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Spec(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Spec(format!("config line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(out)
}

/// Human-readable matrix table for terminal output.
pub fn format_matrix(dm: &TwoQubitDM) -> String {
    let mut s = String::new();
    let labels = dm.basis().labels();
    for (i, label) in labels.iter().enumerate() {
        let _ = write!(s, "{label:>8}");
        for j in 0..4 {
            let z = dm.entries()[(i, j)];
            let _ = write!(s, "  {:>12.9}{:+.2e}i", z.re, z.im);
        }
        s.push('\n');
    }
    s
}
