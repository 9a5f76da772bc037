use crate::config::{random_probe_battery, CheckEntry, ConfigError, ExperimentConfig};
use ballspace::grid::GridFunction;
use ballspace::harness::{
    convergence_check, extrapolation_check, proof_chain_suite, riesz_boundedness_check, translated_indicators,
    vector_valued_check, wavelet_equivalence_check, PairGenerator,
};
use ballspace::operators::{MaximalKind, Normalization};
use ballspace::report::VerificationReport;
use ballspace::spaces::axioms_check;
use ballspace::{Expr, Grid};
use std::fs;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "BALLSPACE_OUT_DIR";

/// Result of one configured check.
pub struct Outcome {
    pub name: String,
    pub report: Result<VerificationReport, String>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        matches!(&self.report, Ok(r) if r.ok())
    }
}

fn normalize(kind: &mut MaximalKind, n: Normalization) {
    if let MaximalKind::Centered(o) = kind {
        o.normalization = n;
    }
}

fn run_check(cfg: &ExperimentConfig, grid: &Grid, entry: &CheckEntry) -> ballspace::Result<VerificationReport> {
    let space = cfg.space(entry.space()).map_err(|e| ballspace::Error::InvalidParameter(e.to_string()))?;
    let norm = cfg.harness.normalization;
    let wavelet = cfg.wavelet.spec();
    match entry.clone() {
        CheckEntry::Axioms { .. } => axioms_check(&space.build(grid)?, cfg.seed()),
        CheckEntry::Extrapolation { mut family, mut options, .. } => {
            normalize(&mut options.kind, norm);
            if let PairGenerator::MaximalPairs { kind } = &mut family.generator {
                normalize(kind, norm);
            }
            extrapolation_check(&family, space, grid, &options)
        }
        CheckEntry::ProofChain { p, triples, options, .. } => {
            proof_chain_suite(grid, space, &p, triples, cfg.seed(), &options)
        }
        CheckEntry::WaveletEquivalence { battery, mut options, .. } => {
            options.j_max = options.j_max.or(cfg.wavelet.j_max);
            wavelet_equivalence_check(space, grid, &wavelet, &battery, &options)
        }
        CheckEntry::Convergence { probe, mut options, .. } => {
            options.j_max = options.j_max.or(cfg.wavelet.j_max);
            let f = match probe {
                Some(src) => GridFunction::sample(&Expr::parse(&src)?, *grid)?,
                None => random_probe_battery(cfg.seed()).generate(grid)?.remove(0).1,
            };
            convergence_check(space, &wavelet, &f, &options)
        }
        CheckEntry::VectorValued { sizes, width, mut options, .. } => {
            normalize(&mut options.kind, norm);
            let batteries = sizes
                .iter()
                .map(|&k| Ok((format!("translates_{k}"), translated_indicators(grid, k, width)?)))
                .collect::<ballspace::Result<Vec<_>>>()?;
            vector_valued_check(space, &batteries, &options)
        }
        CheckEntry::RieszBoundedness { battery, options, .. } => riesz_boundedness_check(space, grid, &battery, &options),
    }
}

/// Runs every check on a pool of `harness.workers` threads.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<Outcome>, ConfigError> {
    let grid = cfg.build_grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.harness.workers)
        .build()
        .map_err(|e| ConfigError::Validation(format!("harness.workers: {e}")))?;
    Ok(pool.install(|| {
        cfg.harness
            .checks
            .iter()
            .enumerate()
            .map(|(i, entry)| Outcome {
                name: entry.name(i),
                report: run_check(cfg, &grid, entry).map_err(|e| e.to_string()),
            })
            .collect()
    }))
}

pub fn out_dir(cfg: &ExperimentConfig, cli: Option<&Path>) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ballspace-out"))
}

/// Writes `<name>.json` per check, `report.txt` and `plot.csv`.
pub fn write_outputs(cfg: &ExperimentConfig, dir: &Path, outcomes: &[Outcome]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let want = |f: &str| cfg.output.formats.is_empty() || cfg.output.formats.iter().any(|x| x == f);
    let mut table = String::new();
    let mut csv = String::from("check,probe_id,x,value\n");
    for o in outcomes {
        match &o.report {
            Ok(r) => {
                if want("json") {
                    fs::write(dir.join(format!("{}.json", o.name)), r.to_json())?;
                }
                table.push_str(&format!("[{}]\n", o.name));
                table.push_str(&r.to_table());
                for row in r.plot_rows() {
                    csv.push_str(&row);
                    csv.push('\n');
                }
            }
            Err(e) => table.push_str(&format!("[{}]\n== ERROR {e}\n", o.name)),
        }
        table.push('\n');
    }
    if want("table") {
        fs::write(dir.join("report.txt"), table)?;
    }
    if want("csv") {
        fs::write(dir.join("plot.csv"), csv)?;
    }
    Ok(())
}
