//! Experiment configuration, batch runs and report files.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::attacks::{make_attack, AttackSpec};
use crate::complexity::ComplexityProfile;
use crate::error::{Error, Result};
use crate::linalg::{total_dim, ComplexMatrix, C64};
use crate::protocol::{Message, ProtocolInstance, Side, DENSE_THETA_MAX_N, MAX_N};
use crate::random::{random_density, random_projector, seeded_rng};
use crate::state::{DensityOperator, Projector};
use crate::tolerance::Tolerances;
use crate::tradeoff::{
    analyze_side, conjugate_overlap_norm, format_sig, landau_pollak_check, tradeoff_bound, verify_tradeoff,
    TradeoffReport, VerifyOptions,
};

fn default_dir() -> PathBuf {
    PathBuf::from("qid_out")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv]
}

fn default_dense_limit() -> usize {
    DENSE_THETA_MAX_N
}

fn default_random_lp() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            formats: default_formats(),
        }
    }
}

/// One experiment, read from JSON.
///
/// `n` runs a single message length; `n_values` lists several for a sweep.
/// `attack` is shorthand for a one-element `attacks` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub attacks: Vec<AttackSpec>,
    #[serde(default)]
    pub attack: Option<AttackSpec>,
    #[serde(default)]
    pub c_offset: i32,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default = "default_dense_limit")]
    pub dense_limit: usize,
    #[serde(default)]
    pub seed: u64,
    /// Random Landau-Pollak instances checked alongside the attacks.
    #[serde(default = "default_random_lp")]
    pub random_lp_instances: usize,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Message lengths to run, in order.
    pub fn lengths(&self) -> Vec<usize> {
        let mut out = self.n_values.clone();
        if let Some(n) = self.n {
            if !out.contains(&n) {
                out.insert(0, n);
            }
        }
        out
    }

    pub fn attack_list(&self) -> Vec<AttackSpec> {
        let mut out = self.attacks.clone();
        if let Some(a) = self.attack {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<()> {
        let lengths = self.lengths();
        if lengths.is_empty() {
            return Err(Error::Config("config needs `n` or `n_values`".into()));
        }
        if lengths.contains(&0) {
            return Err(Error::Config("message length must be at least 1".into()));
        }
        if self.attack_list().is_empty() {
            return Err(Error::Config("config needs `attacks` or `attack`".into()));
        }
        for a in self.attack_list() {
            a.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.outputs.formats.is_empty() {
            return Err(Error::Config("no output formats selected".into()));
        }
        let t = &self.tolerances;
        if [t.structural, t.spectral, t.decision].iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::Config(format!("tolerances must lie in (0, 1): {t:?}")));
        }
        if self.dense_limit > DENSE_THETA_MAX_N {
            return Err(Error::Capacity(format!(
                "dense_limit {} exceeds the dense cap of {DENSE_THETA_MAX_N}",
                self.dense_limit
            )));
        }
        if let Some(&n) = lengths.iter().find(|&&n| n > MAX_N) {
            return Err(Error::Capacity(format!("N = {n} exceeds the supported maximum {MAX_N}")));
        }
        Ok(())
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            c_offset: self.c_offset,
            tolerances: self.tolerances,
            dense_limit: self.dense_limit,
        }
    }
}

/// Exit status for an error raised while loading or running a config.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Capacity(_) => 3,
        Error::Config(_) | Error::Json(_) | Error::Io(_) | Error::InvalidParameter(_) => 2,
        _ => 1,
    }
}

/// Seeded Landau-Pollak spot checks on random families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomLpSummary {
    pub seed: u64,
    pub instances: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen.
    pub min_margin: f64,
}

/// `count` random instances: dimension in `2..=16`, two to four projectors
/// of random rank, and a random mixed state.
pub fn random_lp_suite(seed: u64, count: usize) -> Result<RandomLpSummary> {
    let mut rng = seeded_rng(seed);
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..count {
        let d = rng.random_range(2..=16);
        let k = rng.random_range(2..=4);
        let family = (0..k)
            .map(|_| {
                let rank = rng.random_range(1..=d);
                Projector::new(random_projector(&mut rng, d, rank), vec![d])
            })
            .collect::<Result<Vec<_>>>()?;
        let rho = DensityOperator::new(random_density(&mut rng, d), vec![d])?;
        let out = landau_pollak_check(&family, &rho)?;
        if !out.holds {
            violations += 1;
        }
        min_margin = min_margin.min(out.rhs - out.lhs);
    }
    Ok(RandomLpSummary {
        seed,
        instances: count,
        violations,
        min_margin,
    })
}

/// Report plus the two complexity profiles it was computed from.
#[derive(Debug, Clone)]
pub struct AttackRun {
    pub report: TradeoffReport,
    pub profile_b: ComplexityProfile,
    pub profile_e: ComplexityProfile,
}

impl AttackRun {
    fn stem(&self) -> String {
        format!("{}_n{}", self.report.attack.slug(), self.report.n)
    }
}

pub fn run_attack(attack: &AttackSpec, n: usize, opts: &VerifyOptions) -> Result<AttackRun> {
    let inst = ProtocolInstance::new(n, make_attack(attack, n)?)?;
    let report = verify_tradeoff(&inst, attack, opts)?;
    let profile_b = analyze_side(&inst, Side::B, opts.tolerances.decision)?.profile;
    let profile_e = analyze_side(&inst, Side::E, opts.tolerances.decision)?.profile;
    Ok(AttackRun {
        report,
        profile_b,
        profile_e,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummaryEntry {
    pub n: usize,
    pub attack: AttackSpec,
    pub all_hold: bool,
    pub grid_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub c_offset: i32,
    pub runs: Vec<RunSummaryEntry>,
    pub random_lp: RandomLpSummary,
    pub all_hold: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub exit_code: i32,
    pub summary: RunSummary,
    pub runs: Vec<AttackRun>,
    pub files: Vec<PathBuf>,
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            let rounded: f64 = format_sig(x).parse().expect("formatted float parses");
            // drop the sign of negative zero so tiny negative round-off prints as 0
            let rounded = if rounded == 0.0 { 0.0 } else { rounded };
            if let Some(n) = serde_json::Number::from_f64(rounded) {
                *num = n;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Columnar plot data: `count_B` against `l`, `count_E` against `m`, and the
/// bound surface over `(l, m)`.
pub fn plot_csv(report: &TradeoffReport) -> String {
    let mut out = String::from("series,l,m,value\n");
    let top = report.n + 1;
    for g in report.grid.iter().filter(|g| g.m == 0) {
        out.push_str(&format!("count_B,{},,{}\n", g.l, g.count_b));
    }
    for g in report.grid.iter().filter(|g| g.l == 0) {
        out.push_str(&format!("count_E,,{},{}\n", g.m, g.count_e));
    }
    for l in 0..=top {
        for m in 0..=top {
            let b = tradeoff_bound(l, m, report.n, report.c_offset);
            out.push_str(&format!("bound,{l},{m},{}\n", format_sig(b)));
        }
    }
    out
}

fn write(path: PathBuf, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

/// Runs every `(N, attack)` pair of the config and writes the artifacts to
/// `out_dir` (or the configured directory). Errors are returned only for
/// problems that stop the run; failed checks show up in the exit code.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let opts = cfg.verify_options();
    let jobs: Vec<(usize, AttackSpec)> = cfg
        .lengths()
        .into_iter()
        .flat_map(|n| cfg.attack_list().into_iter().map(move |a| (n, a)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|(n, a)| run_attack(a, *n, &opts))
        .collect::<Result<Vec<_>>>()?;
    let random_lp = random_lp_suite(cfg.seed, cfg.random_lp_instances)?;

    let entries: Vec<RunSummaryEntry> = runs
        .iter()
        .map(|r| RunSummaryEntry {
            n: r.report.n,
            attack: r.report.attack,
            all_hold: r.report.all_hold(),
            grid_violations: r.report.grid.iter().filter(|g| !g.holds).count(),
        })
        .collect();
    let all_hold = entries.iter().all(|e| e.all_hold) && random_lp.violations == 0;
    let summary = RunSummary {
        seed: cfg.seed,
        c_offset: cfg.c_offset,
        runs: entries,
        random_lp,
        all_hold,
    };

    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.outputs.dir.clone());
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let json = cfg.outputs.formats.contains(&OutputFormat::Json);
    let csv = cfg.outputs.formats.contains(&OutputFormat::Csv);
    for run in &runs {
        let stem = run.stem();
        if json {
            write(dir.join(format!("report_{stem}.json")), &to_report_json(&run.report)?, &mut files)?;
        }
        if csv {
            write(dir.join(format!("grid_{stem}.csv")), &run.report.to_csv(), &mut files)?;
            write(dir.join(format!("plot_{stem}.csv")), &plot_csv(&run.report), &mut files)?;
            write(dir.join(format!("profile_{stem}_B.csv")), &run.profile_b.to_csv(), &mut files)?;
            write(dir.join(format!("profile_{stem}_E.csv")), &run.profile_e.to_csv(), &mut files)?;
        }
    }
    if csv {
        let mut all = format!("{}\n", TradeoffReport::CSV_HEADER);
        for run in &runs {
            run.report.write_csv_rows(&mut all);
        }
        write(dir.join("grid_all.csv"), &all, &mut files)?;
    }
    write(dir.join("summary.json"), &to_report_json(&summary)?, &mut files)?;

    Ok(ExperimentOutcome {
        exit_code: if all_hold { 0 } else { 1 },
        summary,
        runs,
        files,
    })
}

/// `x,z,norm` rows of `||X_x Z_z X_x||` for every pair at length `n`.
pub fn overlap_table_csv(n: usize) -> Result<String> {
    if n == 0 || n > MAX_N {
        return Err(Error::Capacity(format!("overlap table for N = {n} outside 1..={MAX_N}")));
    }
    let mut out = String::from("x,z,norm\n");
    for x in Message::all(n) {
        for z in Message::all(n) {
            out.push_str(&format!("{x},{z},{}\n", format_sig(conjugate_overlap_norm(x, z, n)?)));
        }
    }
    Ok(out)
}

/// Serialized operator: subsystem dims and a row-major list of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub matrix: Vec<[f64; 2]>,
}

/// Serialized projector family sharing one set of dims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub dims: Vec<usize>,
    pub projectors: Vec<Vec<[f64; 2]>>,
}

fn square_from_json(dims: &[usize], entries: &[[f64; 2]]) -> Result<ComplexMatrix> {
    let d = total_dim(dims)?;
    let data = entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(d, d, data)
}

impl OperatorJson {
    pub fn from_matrix(m: &ComplexMatrix, dims: Vec<usize>) -> Self {
        Self {
            dims,
            matrix: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Parses the inputs of a standalone uncertainty-relation check.
pub fn load_lp_inputs(family: &str, state: &str) -> Result<(Vec<Projector>, DensityOperator)> {
    let fam: FamilyJson = serde_json::from_str(family).map_err(|e| Error::Config(format!("family: {e}")))?;
    let st: OperatorJson = serde_json::from_str(state).map_err(|e| Error::Config(format!("state: {e}")))?;
    // A malformed operator in an input file is a bad input, not a failed check.
    let as_input = |what: &str, e: Error| match e {
        Error::Capacity(_) => e,
        other => Error::Config(format!("{what}: {other}")),
    };
    let projectors = fam
        .projectors
        .iter()
        .enumerate()
        .map(|(i, p)| {
            square_from_json(&fam.dims, p)
                .and_then(|m| Projector::new(m, fam.dims.clone()))
                .map_err(|e| as_input(&format!("projector {i}"), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let rho = square_from_json(&st.dims, &st.matrix)
        .and_then(|m| DensityOperator::new(m, st.dims))
        .map_err(|e| as_input("state", e))?;
    Ok((projectors, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_config() {
        let cfg = ExperimentConfig::from_json(r#"{"n": 2, "attacks": [{"kind": "cnot_probe"}]}"#).unwrap();
        assert_eq!(cfg.lengths(), vec![2]);
        assert_eq!(cfg.dense_limit, 2);
        assert_eq!(cfg.outputs.formats, default_formats());
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_field_is_a_config_error() {
        let err = ExperimentConfig::from_json(r#"{"n": 2, "atacks": []}"#).unwrap_err();
        assert_eq!(exit_code_for(&err), 2);
    }

    #[test]
    fn capacity_errors() {
        let cfg = ExperimentConfig::from_json(r#"{"n": 9, "attack": {"kind": "identity"}}"#).unwrap();
        assert_eq!(exit_code_for(&cfg.validate().unwrap_err()), 3);
        let cfg = ExperimentConfig::from_json(r#"{"n": 1, "attack": {"kind": "identity"}, "dense_limit": 3}"#).unwrap();
        assert_eq!(exit_code_for(&cfg.validate().unwrap_err()), 3);
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        let mut v = serde_json::json!({"a": [std::f64::consts::PI, 1.0, 3]});
        round_floats(&mut v);
        assert_eq!(v["a"][0].to_string(), "3.14159265359");
        assert_eq!(v["a"][2].as_u64().unwrap(), 3);
    }

    #[test]
    fn overlap_csv_shape() {
        let csv = overlap_table_csv(1).unwrap();
        assert_eq!(csv, "x,z,norm\n0,0,0.5\n0,1,0.5\n1,0,0.5\n1,1,0.5\n");
    }
}
