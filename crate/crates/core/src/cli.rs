//! The `surgelens` command line. [`run`] takes the arguments and output
//! streams and returns the process exit code, so it can be driven in tests.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::alexander::{hat_k_alexander, LinkModel};
use crate::catalog::{LensSpace, Outcome};
use crate::cyclo::CycNum;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::obstruct::lens_candidate_filter;
use crate::scan::{classify, default_parallelism, family_link, write_scan, ScanConfig};
use crate::surgery::{h1_surgery, lens_torsion_test, SurgerySlope, SurgerySpec};
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "surgelens", version, about = "Lens-space surgeries along Brunnian-type links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one surgery from the closed-form tables.
    Classify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated slopes, e.g. `1/1,1/1,7/1`.
        #[arg(long, allow_hyphen_values = true)]
        slopes: String,
        /// Attach the obstruction pipeline's verdicts.
        #[arg(long)]
        evidence: bool,
    },
    /// Run the obstruction pipeline on a JSON surgery spec.
    Obstruct {
        /// File holding `{"link": {...}, "slopes": [...]}`.
        spec: PathBuf,
        /// 1-based component indices; all components when omitted.
        #[arg(short, long)]
        k: Vec<usize>,
        /// Run the targeted torsion test against `L(p,q)`, given as `p,q`.
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
    },
    /// Classify and obstruct every slope tuple in a box.
    Scan(ScanArgs),
    /// Field norm of a polynomial evaluated at a primitive d-th root of unity.
    Norm {
        #[arg(long)]
        d: u64,
        /// One-variable polynomial, e.g. `1-u`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Print a family's Alexander polynomial.
    Alex {
        #[command(flatten)]
        family: FamilyArgs,
        /// Also print the knot left in component k (1-based) after `1/q`
        /// fillings of the others, given as `--hat-q q,q,...`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        hat_q: Option<String>,
    },
    /// Run the acceptance suite.
    VerifyPaper {
        /// Only these criteria (1 to 7).
        #[arg(long)]
        only: Vec<u8>,
        #[arg(long)]
        parallelism: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct FamilyArgs {
    /// milnor3, milnor, whitehead or brunnian_type.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    components: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    twists: Option<i64>,
    /// The f polynomial for brunnian_type, in `t1, t2, ...`.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
}

impl FamilyArgs {
    fn link(&self) -> Result<LinkModel> {
        let family = self.family.as_deref().ok_or_else(|| Error::Parse("--family is required".into()))?;
        family_link(family, self.components, self.twists, self.f.as_deref())
    }
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// `key=value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    max_abs_p: Option<u64>,
    #[arg(long)]
    max_abs_q: Option<u64>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

impl ScanArgs {
    fn config(&self) -> Result<ScanConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScanConfig::parse(&read(path)?)?,
            None => ScanConfig::new(
                self.family.link()?,
                self.max_abs_p.ok_or_else(|| Error::Parse("--max-abs-p is required".into()))?,
                self.max_abs_q.ok_or_else(|| Error::Parse("--max-abs-q is required".into()))?,
            ),
        };
        if self.config.is_some() && self.family.family.is_some() {
            cfg.link = self.family.link()?;
        }
        if let Some(p) = self.max_abs_p {
            cfg.max_abs_p = p;
        }
        if let Some(q) = self.max_abs_q {
            cfg.max_abs_q = q;
        }
        if let Some(n) = self.parallelism {
            cfg.parallelism = n;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Error {
    Error::Precondition(format!("write failed: {e}"))
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable")).map_err(io)
}

/// Exit codes: 0 success, 1 error, 2 non-cyclic homology (classify), 3 scan
/// inconsistency, 4 a failed acceptance criterion.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Classify { family, slopes, evidence } => {
            let link = family.link()?;
            let slopes = SurgerySlope::parse_list(&slopes)?;
            let mut verdict = classify(&link, &slopes)?;
            if evidence && verdict.outcome != Outcome::NotCyclicH1 && link.component_count() >= 3 {
                let spec = SurgerySpec::new(link, slopes)?;
                verdict.evidence = Some((0..spec.lambda()).map(|k| lens_candidate_filter(&spec, k)).collect::<Result<_>>()?);
            }
            print_json(out, &verdict.to_json())?;
            Ok(if verdict.outcome == Outcome::NotCyclicH1 { 2 } else { 0 })
        }
        Command::Obstruct { spec, k, target } => {
            let text = read(&spec)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let spec = SurgerySpec::from_json(&value)?;
            if h1_surgery(&spec).cyclic_order().is_none() {
                return Err(Error::NotCyclic);
            }
            let target = target.map(|t| parse_lens(&t)).transpose()?;
            let ks: Vec<usize> = if k.is_empty() { (1..=spec.lambda()).collect() } else { k };
            for k in ks {
                if k == 0 || k > spec.lambda() {
                    return Err(Error::Precondition(format!("component {k} out of range 1..={}", spec.lambda())));
                }
                let mut v = lens_candidate_filter(&spec, k - 1)?.to_json();
                if let Some(l) = &target {
                    if spec.slopes[k - 1].p().abs() >= 2 {
                        let r = lens_torsion_test(&spec, k - 1, Some(l))?;
                        v["targeted"] = r.to_json();
                    }
                }
                writeln!(out, "{v}").map_err(io)?;
            }
            Ok(0)
        }
        Command::Scan(args) => {
            let cfg = args.config()?;
            let start = Instant::now();
            let summary = match &cfg.output {
                Some(path) => {
                    let f = File::create(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
                    let mut w = BufWriter::new(f);
                    let s = write_scan(&cfg, &mut w)?;
                    w.flush().map_err(io)?;
                    s
                }
                None => write_scan(&cfg, out)?,
            };
            let _ = writeln!(
                err,
                "scanned {} of {} grid points in {:.2} s; {} needs_review, {} disagreements",
                summary.scanned,
                summary.grid_points,
                start.elapsed().as_secs_f64(),
                summary.needs_review.len(),
                summary.disagreements.len()
            );
            Ok(if summary.disagreements.is_empty() { 0 } else { 3 })
        }
        Command::Norm { d, poly } => {
            if d == 0 {
                return Err(Error::Precondition("d must be positive".into()));
            }
            let (p, names) = LaurentPoly::parse_auto(&poly)?;
            if names.len() > 1 {
                return Err(Error::BadArity(format!("expected one variable, got {}", names.join(", "))));
            }
            let p = if p.nvars() == 0 { LaurentPoly::constant(1, p.as_constant().unwrap_or_default()) } else { p };
            let n = CycNum::from_laurent(d, &p).d_norm();
            print_json(out, &json!({"d": d, "poly": poly, "norm": n.to_string()}))?;
            Ok(0)
        }
        Command::Alex { family, k, hat_q } => {
            let link = family.link()?;
            let mut v = json!({
                "link": link.to_json(),
                "alexander": link.alexander().to_string(),
                "f": link.f_part().to_string(),
            });
            if let Some(k) = k {
                let n = link.component_count();
                if k == 0 || k > n {
                    return Err(Error::Precondition(format!("component {k} out of range 1..={n}")));
                }
                let qs: Vec<i64> = match hat_q {
                    Some(t) => t
                        .split(',')
                        .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad integer `{s}`"))))
                        .collect::<Result<_>>()?,
                    None => vec![1; n - 1],
                };
                v["hat_k"] = json!(hat_k_alexander(&link.f_k(k - 1), &qs, n)?.to_string());
            }
            print_json(out, &v)?;
            Ok(0)
        }
        Command::VerifyPaper { only, parallelism, json } => {
            let par = parallelism.unwrap_or_else(default_parallelism);
            let wanted = |i: u8| only.is_empty() || only.contains(&i);
            let mut results = Vec::new();
            for i in 1..=7u8 {
                if !wanted(i) {
                    continue;
                }
                let r = match i {
                    1 => verify::criterion1(par),
                    2 => verify::criterion2(),
                    3 => verify::criterion3(),
                    4 => verify::criterion4(),
                    5 => verify::criterion5(par),
                    6 => verify::criterion6(verify::CRITERION6_SEED, 200),
                    _ => verify::criterion7(),
                };
                if !json {
                    writeln!(out, "{}", r.line()).map_err(io)?;
                    out.flush().map_err(io)?;
                }
                results.push(r);
            }
            if json {
                print_json(out, &Value::Array(results.iter().map(verify::CriterionResult::to_json).collect()))?;
            }
            Ok(if results.iter().all(|r| r.pass) { 0 } else { 4 })
        }
    }
}

fn parse_lens(text: &str) -> Result<LensSpace> {
    let parts: Vec<&str> = text.trim_start_matches("L(").trim_end_matches(')').split(',').collect();
    let [p, q] = parts.as_slice() else {
        return Err(Error::Parse(format!("expected `p,q`, got `{text}`")));
    };
    let num = |s: &str| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad integer `{s}`")));
    LensSpace::new(num(p)?, num(q)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["surgelens"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_examples() {
        let (code, out, _) = call(&["classify", "--family", "milnor3", "--slopes", "1/1,1/1,7/1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["lens"], json!([7, 2]));
        let (code, out, _) = call(&["classify", "--family", "whitehead", "--twists", "2", "--slopes", "3/1,5/1"]);
        assert_eq!(code, 0);
        assert!(out.contains("not_lens"));
        let (code, _, _) = call(&["classify", "--family", "milnor3", "--slopes", "2/1,4/1,1/1"]);
        assert_eq!(code, 2);
        let (code, _, err) = call(&["classify", "--family", "milnor3", "--slopes", "1/0,1,1"]);
        assert_eq!(code, 1);
        assert!(err.contains("error"));
        let (code, out, _) = call(&["classify", "--family", "milnor3", "--slopes", "0/1,1/1,-1/1"]);
        assert_eq!(code, 0);
        assert!(out.contains("not_lens"));
    }

    #[test]
    fn norm_and_alex() {
        let (code, out, _) = call(&["norm", "--d", "9", "--poly", "1-u"]);
        assert_eq!(code, 0);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["norm"], "3");
        let (_, out, _) = call(&["norm", "--d", "2", "--poly", "u"]);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["norm"], "-1");
        let (code, out, _) = call(&["alex", "--family", "milnor", "--components", "4"]);
        assert_eq!(code, 0);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["alexander"], "0");
        let (_, out, _) = call(&["alex", "--family", "milnor3", "--k", "3"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["hat_k"], LaurentPoly::from_coeffs(&[1, -1, 1]).to_string());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["classify"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }
}
