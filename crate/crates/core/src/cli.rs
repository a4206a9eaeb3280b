//! Command layer behind the `projconst` binary: input documents, run
//! reports with canonical JSON, and the exit-code contract.
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success (status `ok` or `inconclusive`)   |
//! | 1    | selftest failure                          |
//! | 2    | malformed input or invalid argument       |
//! | 3    | rank-deficient basis                      |
//! | 4    | solver or integrity check failure         |
//! | 5    | LP budget exceeded                        |
//! | 6    | base constant does not match the plan     |
//! | 7    | parameter `a` admits no exact parameters  |

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::acceptance::{run_all, SelftestOptions};
use crate::bm::{
    bm_params, bm_params_rat, check_model, compare_with_prior_bound, optimize_closed_form,
    optimize_numeric,
};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::minproj::{projection_constant_within, LpBudget};
use crate::oracle::{float_oracle_with, OracleConfig};
use crate::planner::{demonstrate_schedule, plan_parameters, AmplificationPlan};
use crate::rat::Rat;
use crate::zero_sum::{mu, sigma_subspace, verify_multiplication_law, MAX_SYMMETRIZE_COPIES};

/// JSON form of a subspace: `{"ambient_dim": n, "basis": [["p/q", ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceDocument {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<Rat>>,
}

impl SubspaceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_subspace(subspace: &Subspace) -> Self {
        SubspaceDocument {
            ambient_dim: subspace.ambient_dim(),
            basis: subspace.basis().to_rows(),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace> {
        if self.ambient_dim == 0 || self.basis.is_empty() {
            return Err(Error::InvalidArgument(
                "a subspace needs a positive ambient dimension and at least one basis vector"
                    .into(),
            ));
        }
        if let Some((i, row)) = self
            .basis
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.ambient_dim)
        {
            return Err(Error::Dimension(format!(
                "basis row {i} has {} entries, expected {}",
                row.len(),
                self.ambient_dim
            )));
        }
        Subspace::from_rows(self.basis.clone())
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }
}

pub fn read_subspace(path: &Path) -> Result<(Subspace, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((SubspaceDocument::parse(text)?.to_subspace()?, bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Inconclusive,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub outputs: Value,
    pub status: Status,
    /// Omitted unless timing is requested, so reports stay byte-reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        canonical_json(self)
    }
}

/// Compact JSON with object keys in sorted order.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report values serialize");
    serde_json::to_string(&v).expect("JSON values serialize")
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::RankDeficient { .. } => 3,
        Error::SolverIntegrity(_)
        | Error::Integrity(_)
        | Error::NotZeroSumProjection(_)
        | Error::NotSymmetrized(_)
        | Error::OracleInconclusive(_) => 4,
        Error::BudgetExceeded(_) => 5,
        Error::BaseConstantMismatch { .. } => 6,
        Error::NotExact(_) => 7,
        Error::DivisionByZero
        | Error::Parse(_)
        | Error::Dimension(_)
        | Error::InvalidPermutation(_)
        | Error::InvalidArgument(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
    }
}

/// Parses `AMBIENT` or `AMBIENT,DIM`.
pub fn parse_budget(text: &str) -> Result<LpBudget> {
    let bad = || {
        Error::InvalidArgument(format!(
            "budget must be AMBIENT or AMBIENT,DIM, got {text:?}"
        ))
    };
    let mut parts = text.split(',');
    let ambient = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(bad)?;
    let dim = match parts.next() {
        Some(s) => s.trim().parse().map_err(|_| bad())?,
        None => LpBudget::default().max_subspace_dim,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(LpBudget {
        max_ambient_dim: ambient,
        max_subspace_dim: dim,
    })
}

#[derive(Debug, Clone, Default)]
pub struct GlobalOptions {
    pub budget: LpBudget,
    pub seed: u64,
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub enum Command {
    Minproj {
        input: PathBuf,
        oracle: bool,
        tol: f64,
    },
    Zerosum {
        input: PathBuf,
        copies: usize,
    },
    Plan {
        lambda: String,
        /// Ad-hoc plan with this many copies instead of the minimal one.
        copies: Option<usize>,
        rounds: Option<u32>,
        demo: Option<PathBuf>,
        steps: Option<u32>,
    },
    BmOptimize,
    BmParams {
        a: String,
    },
    BmModel {
        a: String,
        window: usize,
        basis: usize,
    },
    Selftest {
        inject_fault: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Minproj { .. } => "minproj",
            Command::Zerosum { .. } => "zerosum",
            Command::Plan { .. } => "plan",
            Command::BmOptimize | Command::BmParams { .. } | Command::BmModel { .. } => "bm",
            Command::Selftest { .. } => "selftest",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

impl Outcome {
    /// `--json` output is the canonical report; otherwise one `key: value`
    /// line per output field.
    pub fn render(&self, json: bool) -> String {
        if json {
            return self.report.to_json();
        }
        let mut out = format!(
            "{} [{}]\n",
            self.report.command,
            status_name(self.report.status)
        );
        match &self.report.outputs {
            Value::Object(map) if self.report.command == "selftest" => {
                for line in map
                    .get("lines")
                    .and_then(Value::as_array)
                    .into_iter()
                    .flatten()
                {
                    out.push_str(line.as_str().unwrap_or_default());
                    out.push('\n');
                }
            }
            Value::Object(map) => {
                for (k, v) in map {
                    let shown = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k}: {shown}\n"));
                }
            }
            other => out.push_str(&format!("{other}\n")),
        }
        out.pop();
        out
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Inconclusive => "inconclusive",
        Status::Error => "error",
    }
}

struct Produced {
    outputs: Value,
    status: Status,
    exit_code: i32,
}

impl Produced {
    fn ok(outputs: Value) -> Self {
        Produced {
            outputs,
            status: Status::Ok,
            exit_code: 0,
        }
    }
}

pub fn run(cmd: &Command, opts: &GlobalOptions) -> Outcome {
    let start = Instant::now();
    let mut hasher = Sha256::new();
    hasher.update(cmd.name().as_bytes());
    hasher.update(format!("{cmd:?}|{:?}|{}", opts.budget, opts.seed).as_bytes());
    let produced = execute(cmd, opts, &mut hasher).unwrap_or_else(|err| Produced {
        outputs: json!({ "error": err.to_string() }),
        status: Status::Error,
        exit_code: exit_code(&err),
    });
    Outcome {
        report: RunReport {
            command: cmd.name().to_string(),
            inputs_digest: hex::encode(hasher.finalize()),
            outputs: produced.outputs,
            status: produced.status,
            wall_time_ms: opts.timing.then(|| start.elapsed().as_millis()),
        },
        exit_code: produced.exit_code,
    }
}

fn load(path: &Path, hasher: &mut Sha256) -> Result<Subspace> {
    let (subspace, bytes) = read_subspace(path)?;
    hasher.update(&bytes);
    Ok(subspace)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn execute(cmd: &Command, opts: &GlobalOptions, hasher: &mut Sha256) -> Result<Produced> {
    match cmd {
        Command::Minproj { input, oracle, tol } => {
            minproj(&load(input, hasher)?, *oracle, *tol, opts)
        }
        Command::Zerosum { input, copies } => zerosum(&load(input, hasher)?, *copies, opts),
        Command::Plan {
            lambda,
            copies,
            rounds,
            demo,
            steps,
        } => {
            let base = demo.as_deref().map(|p| load(p, hasher)).transpose()?;
            plan(lambda, *copies, *rounds, base.as_ref(), *steps, opts)
        }
        Command::BmOptimize => bm_optimize(),
        Command::BmParams { a } => bm_parameters(a),
        Command::BmModel { a, window, basis } => {
            let a: Rat = a.parse()?;
            Ok(Produced::ok(to_value(&check_model(&a, *basis, *window)?)?))
        }
        Command::Selftest { inject_fault } => selftest(*inject_fault, opts),
    }
}

fn minproj(subspace: &Subspace, oracle: bool, tol: f64, opts: &GlobalOptions) -> Result<Produced> {
    let result = projection_constant_within(subspace, &opts.budget)?;
    let mut outputs = to_value(&result)?;
    outputs["subspace"] = to_value(&SubspaceDocument::from_subspace(subspace))?;
    let mut produced = Produced::ok(Value::Null);
    if oracle {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let config = OracleConfig {
            seed: opts.seed,
            ..OracleConfig::with_tol(tol)
        };
        let exact = result.lambda.to_f64();
        outputs["oracle"] = match float_oracle_with(subspace, &config) {
            Ok(est) => {
                let agrees = (est.value - exact).abs() <= tol;
                if !agrees {
                    produced.status = Status::Error;
                    produced.exit_code = 4;
                }
                json!({ "estimate": est.value, "lower": est.lower, "tol": tol, "agrees": agrees })
            }
            Err(Error::OracleInconclusive(msg)) => {
                produced.status = Status::Inconclusive;
                json!({ "inconclusive": msg, "tol": tol, "agrees": null })
            }
            Err(e) => return Err(e),
        };
    }
    produced.outputs = outputs;
    Ok(produced)
}

fn zerosum(base: &Subspace, copies: usize, opts: &GlobalOptions) -> Result<Produced> {
    if !(2..=MAX_SYMMETRIZE_COPIES).contains(&copies) {
        return Err(Error::InvalidArgument(format!(
            "--copies must lie in 2..={MAX_SYMMETRIZE_COPIES}, got {copies}"
        )));
    }
    let report = verify_multiplication_law(base, copies, &opts.budget)?;
    let space = sigma_subspace(base, copies)?.space;
    let mut outputs = to_value(&report)?;
    outputs["subspace"] = to_value(&SubspaceDocument::from_subspace(&space))?;
    let (status, exit_code) = if report.inconclusive {
        (Status::Inconclusive, 5)
    } else if report.equal {
        (Status::Ok, 0)
    } else {
        (Status::Error, 4)
    };
    Ok(Produced {
        outputs,
        status,
        exit_code,
    })
}

fn plan(
    lambda: &str,
    copies: Option<usize>,
    rounds: Option<u32>,
    base: Option<&Subspace>,
    steps: Option<u32>,
    opts: &GlobalOptions,
) -> Result<Produced> {
    let lambda: Rat = lambda.parse()?;
    let plan = match copies {
        Some(n) => {
            let m = rounds.unwrap_or(1);
            if n < 2 || !lambda.is_positive() {
                return Err(Error::InvalidArgument(
                    "an ad-hoc plan needs at least 2 copies and a positive target".into(),
                ));
            }
            AmplificationPlan::with_copies(&lambda / &mu(n).pow(m), n, m)?
        }
        None if rounds.is_some() => {
            return Err(Error::InvalidArgument("--rounds requires --copies".into()))
        }
        None => plan_parameters(&lambda)?,
    };
    let mut outputs = json!({ "plan": to_value(&plan)? });
    let mut produced = Produced::ok(Value::Null);
    if let Some(base) = base {
        let report = demonstrate_schedule(base, &plan, steps.unwrap_or(plan.m), &opts.budget)?;
        if !report.all_equal() {
            produced.status = Status::Error;
            produced.exit_code = 4;
        } else if report.truncated {
            produced.status = Status::Inconclusive;
            produced.exit_code = 5;
        }
        outputs["demo"] = to_value(&report)?;
    } else if steps.is_some() {
        return Err(Error::InvalidArgument("--steps requires --demo".into()));
    }
    produced.outputs = outputs;
    Ok(produced)
}

fn bm_optimize() -> Result<Produced> {
    let closed = optimize_closed_form();
    let numeric = optimize_numeric(0.1, 10.0, 1e-8)?;
    let cmp = compare_with_prior_bound();
    Ok(Produced::ok(json!({
        "a_star": closed.a_star,
        "g_star": closed.g_star,
        "cubic_residual": closed.cubic_residual,
        "a_numeric": numeric.a_hat,
        "g_numeric": numeric.g_hat,
        "prior_bound": cmp.prior,
        "improvement": cmp.improvement,
    })))
}

fn bm_parameters(a: &str) -> Result<Produced> {
    let set = match a.parse::<Rat>() {
        Ok(r) => bm_params_rat(&r)?,
        Err(_) => match a.parse::<f64>() {
            Ok(x) => bm_params(x)?,
            Err(_) => return Err(Error::Parse(format!("cannot read {a:?} as a number"))),
        },
    };
    Ok(Produced::ok(to_value(&set)?))
}

fn selftest(inject_fault: bool, opts: &GlobalOptions) -> Result<Produced> {
    let outcomes = run_all(&SelftestOptions {
        seed: opts.seed,
        corrupt_mu: inject_fault,
    });
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    let lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
    Ok(Produced {
        status: if failed.is_empty() {
            Status::Ok
        } else {
            Status::Error
        },
        exit_code: if failed.is_empty() { 0 } else { 1 },
        outputs: json!({
            "criteria": to_value(&outcomes)?,
            "passed": outcomes.len() - failed.len(),
            "failed": failed,
            "lines": lines,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> Result<Subspace> {
        SubspaceDocument::parse(text)?.to_subspace()
    }

    #[test]
    fn document_accepts_strings_and_integers() {
        let s =
            doc(r#"{"ambient_dim": 3, "basis": [["1", -1, "0"], [0, "1/2", "-1/2"]]}"#).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis()[(1, 1)], Rat::frac(1, 2));
    }

    #[test]
    fn malformed_documents_map_to_exit_two() {
        for text in [
            r#"{"ambient_dim": 3, "basis": [["1", "1"]]}"#,
            r#"{"ambient_dim": 2, "basis": [["1", "x"]]}"#,
            r#"{"ambient_dim": 2, "basis": []}"#,
            r#"{"ambient_dim": 2}"#,
            r#"{"ambient_dim": 2, "basis": [["1", "1/0"]]}"#,
            "not json",
        ] {
            let err = doc(text).unwrap_err();
            assert_eq!(exit_code(&err), 2, "{text}: {err}");
        }
    }

    #[test]
    fn dependent_rows_map_to_exit_three() {
        let err = doc(r#"{"ambient_dim": 2, "basis": [["1", "2"], ["2", "4"]]}"#).unwrap_err();
        assert_eq!(exit_code(&err), 3);
    }

    #[test]
    fn document_round_trips() {
        let s = Subspace::from_rows(vec![
            vec![Rat::frac(1, 3), Rat::int(0), Rat::int(-2)],
            vec![Rat::int(0), Rat::int(1), Rat::frac(7, 5)],
        ])
        .unwrap();
        let text = SubspaceDocument::from_subspace(&s).to_json();
        assert_eq!(
            text,
            r#"{"ambient_dim":3,"basis":[["1/3","0","-2"],["0","1","7/5"]]}"#
        );
        assert_eq!(doc(&text).unwrap(), s);
    }

    #[test]
    fn budget_syntax() {
        assert_eq!(parse_budget("9").unwrap().max_ambient_dim, 9);
        assert_eq!(parse_budget("9,3").unwrap().max_subspace_dim, 3);
        assert!(parse_budget("9,x").is_err());
        assert!(parse_budget("1,2,3").is_err());
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let out = run(
            &Command::BmParams { a: "4".into() },
            &GlobalOptions::default(),
        );
        assert_eq!(out.exit_code, 0);
        let text = out.report.to_json();
        assert!(text.starts_with(r#"{"command":"bm","inputs_digest":""#));
        assert!(
            text.contains(r#""outputs":{"K":4.5,"a":4.0,"b":"#),
            "{text}"
        );
        assert!(text.contains(r#""exact":{"K":"9/2","a":"4","#), "{text}");
        assert!(!text.contains("wall_time_ms"));
    }

    #[test]
    fn argument_errors() {
        let g = GlobalOptions::default();
        let cases = [
            (
                Command::BmModel {
                    a: "1".into(),
                    window: 64,
                    basis: 8,
                },
                7,
            ),
            (Command::BmParams { a: "-1".into() }, 2),
            (Command::BmParams { a: "two".into() }, 2),
            (
                Command::Plan {
                    lambda: "1".into(),
                    copies: None,
                    rounds: None,
                    demo: None,
                    steps: None,
                },
                2,
            ),
            (
                Command::Plan {
                    lambda: "3".into(),
                    copies: None,
                    rounds: None,
                    demo: None,
                    steps: Some(1),
                },
                2,
            ),
        ];
        for (cmd, code) in cases {
            let out = run(&cmd, &g);
            assert_eq!(out.exit_code, code, "{cmd:?}: {}", out.report.to_json());
            assert_eq!(out.report.status, Status::Error);
        }
    }

    #[test]
    fn plan_report_shape() {
        let cmd = Command::Plan {
            lambda: "3".into(),
            copies: None,
            rounds: None,
            demo: None,
            steps: None,
        };
        let out = run(&cmd, &GlobalOptions::default());
        let plan = &out.report.outputs["plan"];
        assert_eq!(plan["N"], json!(5));
        assert_eq!(plan["alpha"], json!("15/8"));
        assert_eq!(plan["m"], json!(1));
    }
}
