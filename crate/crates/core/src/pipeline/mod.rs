//! End-to-end certification, the command implementations behind the CLI,
//! and file output.

mod certificate;
pub mod mtx;
pub mod spy;

pub use certificate::{
    Certificate, Check, MatrixSummary, NullColumnSummary, Parameters, ReorderSummary, RobustnessSummary, Severity,
    SprankSummary, StageError, Status, StencilManifest, SystemSummary, TargetSummary,
};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::combinatorics::{count_e, count_f, count_g, count_h};
use crate::exactrank::{certify_full_rank, CertifyOptions, DEFAULT_BAREISS_CAP};
use crate::pdesystem::{
    build_eliminated_system, build_trajectory, check_trajectory_pde, crosscheck_syst1, Equation, Term, UnknownId,
};
use crate::polyring::{certification_point, format_rational, DerivationParams, Point, Poly, Pretty};
use crate::prolongation::{polymtx, prolong, submatrix_blocks, to_jet_system, PolyMatrix};
use crate::structural::{
    evaluate_matrix, first_order_columns, good_reordering, null_columns, sprank, target_column_check, Evaluated,
    RatMatrix, Reordering, SubSelection,
};

pub const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Mtx(#[from] mtx::MtxError),
    #[error("{stage}: {message}")]
    Stage { stage: String, message: String },
}

impl From<StageError> for PipelineError {
    fn from(e: StageError) -> Self {
        Self::Stage { stage: e.stage, message: e.message }
    }
}

/// Published values for the default run (19 levels, sub-selection 15).
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub nnz: usize,
    pub avg_nnz_per_row: &'static str,
    pub null_columns: usize,
    pub sprank: usize,
    pub square_block: usize,
    pub blocks: usize,
    pub last_block: usize,
    /// Offset of `∂iz2` relative to `∂iz1` among P's columns.
    pub z2_offset: usize,
    pub operator_order: u32,
}

impl Reference {
    pub fn published() -> Self {
        Self {
            nnz: 651_128,
            avg_nnz_per_row: "21.44",
            null_columns: 140,
            sprank: 28_654,
            square_block: 9050,
            blocks: 352,
            last_block: 7321,
            z2_offset: 3632,
            operator_order: 17,
        }
    }

    pub fn for_run(levels: u32, sub_level: u32) -> Option<Self> {
        (levels == 19 && sub_level == 15).then(Self::published)
    }
}

/// Flips the sign of one coefficient of the pressure-free system before
/// anything else runs; used to check that corruption is caught.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corruption {
    /// 1-based equation number.
    pub equation: usize,
    pub term: Term,
}

#[derive(Debug, Clone)]
pub struct CertifyConfig {
    pub levels: u32,
    pub sub_level: u32,
    pub params: DerivationParams,
    pub point: Point,
    pub primes: Vec<u64>,
    /// Run the exact rank stages (the expensive part).
    pub ranks: bool,
    /// Also rank the square overdetermined block.
    pub square_block_rank: bool,
    pub float_check: bool,
    pub corruption: Option<Corruption>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            levels: 19,
            sub_level: 15,
            params: DerivationParams::default(),
            point: certification_point(),
            primes: CertifyOptions::default().primes,
            ranks: true,
            square_block_rank: true,
            float_check: false,
            corruption: None,
        }
    }
}

impl CertifyConfig {
    fn parameters(&self) -> Parameters {
        Parameters {
            levels: self.levels,
            sub_level: self.sub_level,
            nu: format_rational(&self.params.nu),
            point: self.point.iter().map(format_rational).collect(),
            primes: self.primes.clone(),
        }
    }

    fn rank_options(&self, primes: &[u64]) -> CertifyOptions {
        CertifyOptions { primes: primes.to_vec(), bareiss_cap: DEFAULT_BAREISS_CAP, float_check: self.float_check }
    }
}

/// Everything a run produced, for callers that want more than the JSON.
#[derive(Debug, Clone)]
pub struct Run {
    pub system: Option<[Equation<Poly>; 3]>,
    pub matrix: Option<PolyMatrix>,
    pub evaluated: Option<Evaluated>,
    pub reordering: Option<Reordering>,
    pub p0: Option<RatMatrix>,
    pub certificate: Certificate,
}

fn stage_err(stage: &str) -> impl Fn(&dyn std::fmt::Display) -> StageError + '_ {
    move |e| StageError { stage: stage.to_string(), message: e.to_string() }
}

/// Runs the whole chain: system → build → evaluation → null columns →
/// structural rank → reordering → robustness → targets → exact ranks.
///
/// A failing stage is recorded and ends the run; the checks of stages that
/// did not run fail.
pub fn run(cfg: &CertifyConfig) -> Run {
    let mut run = Run {
        system: None,
        matrix: None,
        evaluated: None,
        reordering: None,
        p0: None,
        certificate: Certificate::new(TOOL.to_string(), cfg.parameters()),
    };
    if let Err(e) = execute(cfg, &mut run) {
        run.certificate.errors.push(e);
    }
    run.certificate.checks = checks(&run.certificate, cfg);
    run.certificate.settle();
    run
}

fn execute(cfg: &CertifyConfig, run: &mut Run) -> Result<(), StageError> {
    let cert = &mut run.certificate;

    let err = stage_err("system");
    let trajectory = build_trajectory(&cfg.params).map_err(|e| err(&e))?;
    let trajectory_holds = check_trajectory_pde(&trajectory, &cfg.params).map_err(|e| err(&e))?.holds();
    let mut system = build_eliminated_system(&cfg.params).map_err(|e| err(&e))?;
    if let Some(c) = cfg.corruption {
        let eq = system.get_mut(c.equation.wrapping_sub(1)).ok_or_else(|| err(&"corruption targets no equation"))?;
        let coef = eq.lhs.get_mut(&c.term).ok_or_else(|| err(&"corruption targets a missing term"))?;
        *coef = -&*coef;
    }
    let report = crosscheck_syst1(&system);
    cert.system = Some(SystemSummary {
        trajectory_holds,
        crosscheck_matched: report.matched,
        documented_deviations: report.deviations.iter().filter_map(|d| d.typo.map(String::from)).collect(),
        undocumented_deviations: report
            .undocumented()
            .map(|d| format!("eq{} {}: generated {} vs printed {}", d.equation, d.term, Pretty(&d.generated), Pretty(&d.literal)))
            .collect(),
    });

    let err = stage_err("build");
    let jets = to_jet_system(&system).map_err(|e| err(&e))?;
    run.system = Some(system);
    let pm = prolong(&jets, cfg.levels, &cfg.params).map_err(|e| err(&e))?;
    let blocks = submatrix_blocks(&pm).map_err(|e| err(&e))?;
    cert.hashes.insert("l0.polymtx".into(), mtx::sha256_of(|w| polymtx::write_polymtx(&pm, &mut { w })));

    let err = stage_err("evaluate");
    let ev = evaluate_matrix(&pm, &cfg.point, &cfg.params).map_err(|e| err(&e))?;
    let stats = crate::prolongation::MatrixStats::from_counts(pm.nrows(), pm.ncols(), ev.matrix.nnz());
    cert.matrix = Some(MatrixSummary {
        rows: pm.nrows(),
        cols: pm.ncols(),
        a1: [blocks.a[0].nrows(), blocks.a[0].ncols()],
        nnz_symbolic: pm.nnz(),
        nnz_evaluated: ev.matrix.nnz(),
        avg_nnz_per_row: stats.avg_nnz_per_row,
    });
    cert.hashes.insert("l0-evaluated".into(), mtx::sha256_of(|w| mtx::write_exact(&ev.matrix, &mut { w })));

    let nc = null_columns(&pm, &ev.matrix);
    cert.null_columns = Some(NullColumnSummary {
        count: nc.count(),
        all_symbolically_null: nc.all_symbolically_null,
        symbolic_survivors: nc.symbolic_survivors.clone(),
    });
    let pattern = ev.matrix.pattern();
    // Null columns carry no entries, so they do not change the matching.
    cert.sprank = Some(SprankSummary { rows: pm.nrows(), cols: pm.ncols() - nc.count(), sprank: sprank(&pattern) });

    let err = stage_err("reorder");
    let r = good_reordering(&pm, &pattern, SubSelection::for_level(cfg.sub_level)).map_err(|e| err(&e))?;
    let sizes = r.block_sizes();
    let (p_rows, p_cols) = r.partition.p_size();
    cert.reordering = Some(ReorderSummary {
        selected: [r.selected_rows.len(), r.selected_cols.len()],
        coarse_parts: r.coarse.part_sizes(),
        overdetermined_unmatched_rows: r.coarse.over_unmatched_rows().len(),
        square_block: [r.lbar_rows.len(), r.lbar_cols.len()],
        square_block_sprank: sprank(&pattern.select(&r.lbar_rows, &r.lbar_cols)),
        block_count: sizes.len(),
        largest_block: sizes.iter().copied().max().unwrap_or(0),
        last_block: [p_rows, p_cols],
        zero_block: {
            let (a, b) = r.partition.zero_block_size();
            [a, b]
        },
    });
    let violations = r.partition.robustness(&pm);
    cert.robustness = Some(RobustnessSummary {
        lost_entries: ev.theta_minus_theta0.len(),
        violations: violations.len(),
        first_violations: violations.iter().take(10).map(|v| [v.row, v.col]).collect(),
    });
    let targets = first_order_columns(pm.col_ids()).ok_or_else(|| err(&"first-order columns missing"))?;
    let tc = target_column_check(&r.partition, &targets);
    cert.targets = Some(TargetSummary {
        all_in_p: tc.all_in_p,
        positions: tc.positions,
        z1_columns_in_p: r.partition.p_cols.iter().filter(|&&j| pm.col_ids()[j].unknown == UnknownId::Z1).count(),
    });
    cert.manifest = Some(manifest(&pm, &r));

    let p0 = ev.matrix.select(&r.partition.p_rows, &r.partition.p_cols);
    cert.hashes.insert("p0".into(), mtx::sha256_of(|w| mtx::write_exact(&p0, &mut { w })));
    if cfg.ranks {
        cert.p_rank = Some(certify_full_rank(&p0, &cfg.rank_options(&cfg.primes)));
        if cfg.square_block_rank {
            let bar = ev.matrix.select(&r.lbar_rows, &r.lbar_cols);
            let first = &cfg.primes[..cfg.primes.len().min(1)];
            cert.square_block_rank = Some(certify_full_rank(&bar, &cfg.rank_options(first)));
        }
    }
    run.matrix = Some(pm);
    run.evaluated = Some(ev);
    run.reordering = Some(r);
    run.p0 = Some(p0);
    Ok(())
}

/// Stencil manifest of P.
pub fn manifest(pm: &PolyMatrix, r: &Reordering) -> StencilManifest {
    let mut levels = BTreeMap::new();
    let (mut max_row_level, mut operator_order) = (0, 0);
    for &i in &r.partition.p_rows {
        let id = pm.row_ids()[i];
        let level = id.applied.degree();
        max_row_level = max_row_level.max(level);
        // The first two pressure-free equations are a derivative of the
        // momentum equations.
        operator_order = operator_order.max(level + u32::from(id.base_eq <= 2));
        *levels.entry(format!("eq{}/{}", id.base_eq, level)).or_insert(0) += 1;
    }
    StencilManifest {
        rows: r.partition.p_rows.iter().map(|&i| pm.row_ids()[i].to_string()).collect(),
        cols: r.partition.p_cols.iter().map(|&j| pm.col_ids()[j].to_string()).collect(),
        max_row_level,
        operator_order,
        levels,
    }
}

fn not_computed() -> &'static str {
    "not computed"
}

/// Hard checks always; soft checks against [`Reference`] when it applies.
pub fn checks(cert: &Certificate, cfg: &CertifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let n = u64::from(cfg.levels);
    let nc = not_computed();
    match &cert.system {
        Some(s) => {
            out.push(Check::hard("trajectory", s.trajectory_holds, "momentum residuals and divergence vanish", s.trajectory_holds));
            out.push(Check::hard(
                "system-crosscheck",
                s.undocumented_deviations.is_empty(),
                "0 undocumented deviations",
                format!("{} undocumented deviations", s.undocumented_deviations.len()),
            ));
        }
        None => {
            out.push(Check::hard("trajectory", false, "momentum residuals and divergence vanish", nc));
            out.push(Check::hard("system-crosscheck", false, "0 undocumented deviations", nc));
        }
    }
    let g = count_g(n).unwrap_or(0) as usize;
    let h = count_h(n).unwrap_or(0) as usize;
    let (f_rows, f_cols) = (count_f(n).unwrap_or(0) as usize, count_f(n + 3).unwrap_or(0) as usize);
    let dims = cert.matrix.as_ref().map(|m| (m.rows, m.cols));
    out.push(Check::hard("dimensions", dims == Some((g, h)), format!("{g}x{h}"), fmt_pair(dims)));
    let a1 = cert.matrix.as_ref().map(|m| (m.a1[0], m.a1[1]));
    out.push(Check::hard("a1-block", a1 == Some((f_rows, f_cols)), format!("{f_rows}x{f_cols}"), fmt_pair(a1)));
    let nullity = cert.null_columns.as_ref().map(|c| c.all_symbolically_null);
    out.push(Check::hard(
        "null-columns-symbolic",
        nullity == Some(true),
        "every evaluated-null column is symbolically null",
        nullity.map_or(nc.to_string(), |b| b.to_string()),
    ));
    let square = cert.reordering.as_ref().map(|r| (r.square_block, r.square_block_sprank));
    out.push(Check::hard(
        "square-overdetermined-block",
        matches!(square, Some(([a, b], s)) if a == b && a > 0 && s == a),
        "square with full structural rank",
        square.map_or(nc.to_string(), |([a, b], s)| format!("{a}x{b}, sprank {s}")),
    ));
    let last = cert.reordering.as_ref().map(|r| r.last_block);
    out.push(Check::hard(
        "final-block",
        matches!(last, Some([a, b]) if a == b && a > 0),
        "nonempty square final block",
        last.map_or(nc.to_string(), |[a, b]| format!("{a}x{b}")),
    ));
    out.push(Check::hard(
        "p-full-rank",
        cert.p_rank.as_ref().is_some_and(|c| c.is_full_rank()),
        last.map_or("full rank".to_string(), |[a, _]| format!("certified rank {a}")),
        cert.p_rank.as_ref().map_or(nc.to_string(), |c| {
            format!("rank >= {} ({})", c.rank, serde_json::to_value(c.conclusion).unwrap().as_str().unwrap_or(""))
        }),
    ));
    let targets = cert.targets.as_ref();
    out.push(Check::hard(
        "targets-in-p",
        targets.is_some_and(|t| t.all_in_p),
        "all six first-order columns inside P",
        targets.map_or(nc.to_string(), |t| fmt_positions(&t.positions)),
    ));
    let rob = cert.robustness.as_ref();
    out.push(Check::hard(
        "robustness",
        rob.is_some_and(|r| r.violations == 0),
        "no symbolic entry in the zero block",
        rob.map_or(nc.to_string(), |r| format!("{} violations", r.violations)),
    ));

    let Some(reference) = Reference::for_run(cfg.levels, cfg.sub_level) else {
        return out;
    };
    let or_nc = |v: Option<String>| v.unwrap_or_else(|| nc.to_string());
    let m = cert.matrix.as_ref();
    out.push(Check::soft("nnz", reference.nnz, or_nc(m.map(|m| m.nnz_evaluated.to_string()))));
    out.push(Check::soft(
        "avg-nnz-per-row",
        reference.avg_nnz_per_row,
        or_nc(m.map(|m| format!("{:.2}", m.avg_nnz_per_row))),
    ));
    out.push(Check::soft(
        "null-column-count",
        reference.null_columns,
        or_nc(cert.null_columns.as_ref().map(|c| c.count.to_string())),
    ));
    out.push(Check::soft("sprank", reference.sprank, or_nc(cert.sprank.as_ref().map(|s| s.sprank.to_string()))));
    let r = cert.reordering.as_ref();
    out.push(Check::soft("square-block-size", reference.square_block, or_nc(r.map(|r| r.square_block[0].to_string()))));
    out.push(Check::soft("block-count", reference.blocks, or_nc(r.map(|r| r.block_count.to_string()))));
    out.push(Check::soft("last-block-size", reference.last_block, or_nc(r.map(|r| r.last_block[0].to_string()))));
    let expected: Vec<Option<usize>> =
        (1..=3).map(Some).chain((1..=3).map(|i| Some(reference.z2_offset + i))).collect();
    out.push(Check::soft(
        "target-offsets",
        fmt_positions(&expected),
        or_nc(targets.map(|t| fmt_positions(&t.positions))),
    ));
    out.push(Check::soft(
        "operator-order",
        reference.operator_order,
        or_nc(cert.manifest.as_ref().map(|m| m.operator_order.to_string())),
    ));
    if cfg.ranks && cfg.square_block_rank {
        out.push(Check::soft(
            "square-block-rank-deficient",
            "deficient",
            or_nc(cert.square_block_rank.as_ref().map(|c| {
                if c.rank < c.nrows.min(c.ncols) { "deficient" } else { "full" }.to_string()
            })),
        ));
    }
    out
}

fn fmt_pair(p: Option<(usize, usize)>) -> String {
    p.map_or(not_computed().to_string(), |(a, b)| format!("{a}x{b}"))
}

fn fmt_positions(p: &[Option<usize>]) -> String {
    let items: Vec<String> = p.iter().map(|x| x.map_or("-".to_string(), |v| v.to_string())).collect();
    format!("[{}]", items.join(", "))
}

/// Matrix artifact format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Symbolic entries, exact.
    Polymtx,
    /// Evaluated entries as doubles.
    Mtx,
    /// Evaluated entries as exact rationals.
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Polymtx => "polymtx",
            Format::Mtx => "mtx",
            Format::Json => "json",
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes `pm` (or its evaluation) in `format`.
pub fn write_matrix(pm: &PolyMatrix, evaluated: Option<&RatMatrix>, format: Format, path: &Path) -> Result<(), PipelineError> {
    let mut out = create(path)?;
    match (format, evaluated) {
        (Format::Polymtx, _) => polymtx::write_polymtx(pm, &mut out)?,
        (Format::Mtx, Some(m)) => mtx::write_matrix_market(m, &mut out)?,
        (Format::Json, Some(m)) => mtx::write_json(m, &mut out)?,
        _ => {
            return Err(PipelineError::Stage { stage: "write".into(), message: "evaluated matrix required".into() })
        }
    }
    out.flush()?;
    Ok(())
}

/// Table of `E, F, G, H` for `0..=max`.
pub fn cmd_counts(max: u32, out: &mut impl Write) -> Result<(), PipelineError> {
    writeln!(out, "{:>3} {:>8} {:>8} {:>8} {:>8} {:>7}", "n", "E(n)", "F(n)", "G(n)", "H(n)", "G-H")?;
    for n in 0..=u64::from(max) {
        let bad = |e: crate::combinatorics::CombinatoricsError| PipelineError::Stage {
            stage: "counts".into(),
            message: e.to_string(),
        };
        let (e, f, g, h) = (count_e(n).map_err(bad)?, count_f(n).map_err(bad)?, count_g(n).map_err(bad)?, count_h(n).map_err(bad)?);
        writeln!(out, "{n:>3} {e:>8} {f:>8} {g:>8} {h:>8} {:>7}", g as i64 - h as i64)?;
    }
    Ok(())
}

/// The pressure-free system, one term per line.
pub fn cmd_dump_system(params: &DerivationParams, out: &mut impl Write) -> Result<(), PipelineError> {
    let system = build_eliminated_system(params).map_err(|e| stage_err("system")(&e))?;
    for (k, eq) in system.iter().enumerate() {
        writeln!(out, "eq{}:", k + 1)?;
        for (t, c) in &eq.lhs {
            writeln!(out, "  ({}) {}", Pretty(c), t)?;
        }
        for (t, c) in &eq.rhs {
            writeln!(out, "  = ({}) {}", Pretty(c), t)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BuildMeta {
    pub tool: String,
    pub levels: u32,
    pub nu: String,
    pub point: Vec<String>,
    pub format: String,
    pub rows: usize,
    pub cols: usize,
    pub nnz_symbolic: usize,
    pub nnz_evaluated: usize,
    pub sha256: String,
}

/// Builds the prolonged matrix and writes it plus a `.meta.json` next to it.
/// Returns the path of the matrix file.
pub fn cmd_build(
    levels: u32,
    params: &DerivationParams,
    point: &Point,
    format: Format,
    out_dir: &Path,
) -> Result<(PathBuf, BuildMeta), PipelineError> {
    let err = stage_err("build");
    let system = build_eliminated_system(params).map_err(|e| err(&e))?;
    let pm = prolong(&to_jet_system(&system).map_err(|e| err(&e))?, levels, params).map_err(|e| err(&e))?;
    let ev = evaluate_matrix(&pm, point, params).map_err(|e| err(&e))?;
    let path = out_dir.join(format!("l0_n{levels}.{}", format.extension()));
    write_matrix(&pm, Some(&ev.matrix), format, &path)?;
    let meta = BuildMeta {
        tool: TOOL.to_string(),
        levels,
        nu: format_rational(&params.nu),
        point: point.iter().map(format_rational).collect(),
        format: format.extension().to_string(),
        rows: pm.nrows(),
        cols: pm.ncols(),
        nnz_symbolic: pm.nnz(),
        nnz_evaluated: ev.matrix.nnz(),
        sha256: mtx::sha256_of(|w| io::copy(&mut File::open(&path)?, w).map(drop)),
    };
    let mut out = create(&path.with_extension("meta.json"))?;
    serde_json::to_writer_pretty(&mut out, &meta).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok((path, meta))
}

/// Runs [`run`], writes `certificate.json` and P in `format` into
/// `out_dir`.
pub fn cmd_certify(cfg: &CertifyConfig, format: Format, out_dir: &Path) -> Result<Run, PipelineError> {
    let run = run(cfg);
    let mut out = create(&out_dir.join("certificate.json"))?;
    out.write_all(run.certificate.to_json().as_bytes())?;
    out.flush()?;
    if let (Some(pm), Some(r), Some(p0)) = (&run.matrix, &run.reordering, &run.p0) {
        let p = pm.select(&r.partition.p_rows, &r.partition.p_cols);
        write_matrix(&p, Some(p0), format, &out_dir.join(format!("p.{}", format.extension())))?;
    }
    Ok(run)
}

/// Writes a spy plot of `positions`; the format follows the extension
/// (`.svg` or `.pgm`).
pub fn cmd_spy(
    nrows: usize,
    ncols: usize,
    positions: impl IntoIterator<Item = (usize, usize)>,
    title: &str,
    max_px: usize,
    out_path: &Path,
) -> Result<spy::Raster, PipelineError> {
    let raster = spy::Raster::new(nrows, ncols, positions, max_px);
    let mut out = create(out_path)?;
    match out_path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => spy::write_pgm(&raster, &mut out)?,
        Some("svg") => spy::write_svg(&raster, title, &mut out)?,
        _ => {
            return Err(PipelineError::Stage { stage: "spy".into(), message: "output must end in .svg or .pgm".into() })
        }
    }
    out.flush()?;
    Ok(raster)
}
