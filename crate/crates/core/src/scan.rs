//! Grid scans: every slope tuple in a box is classified and run through the
//! obstruction pipeline, and the two are compared.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::alexander::LinkModel;
use crate::catalog::{classify_milnor, classify_milnor3, classify_twisted_whitehead, ClassificationVerdict, Outcome};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::obstruct::{lens_candidate_filter, Stage};
use crate::surgery::{h1_surgery, lens_torsion_test, others_products, LensTestReport, SurgerySlope, SurgerySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub link: LinkModel,
    pub max_abs_p: u64,
    pub max_abs_q: u64,
    pub parallelism: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ScanConfig {
    pub fn new(link: LinkModel, max_abs_p: u64, max_abs_q: u64) -> Self {
        ScanConfig {
            link,
            max_abs_p,
            max_abs_q,
            parallelism: default_parallelism(),
            output: None,
            format: Format::Json,
        }
    }

    pub fn components(&self) -> usize {
        self.link.component_count()
    }

    /// Reads `key=value` lines; `#` starts a comment. Keys: `family`,
    /// `components`, `twists`, `f`, `max_abs_p`, `max_abs_q`, `parallelism`,
    /// `output`, `format`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str| -> Result<Option<u64>> {
            get(k).map(|v| v.parse().map_err(|_| Error::Parse(format!("`{k}` must be a nonnegative integer")))).transpose()
        };
        let family = get("family").ok_or_else(|| Error::Parse("config needs `family`".into()))?;
        let twists = get("twists")
            .map(|v| v.parse::<i64>().map_err(|_| Error::Parse("`twists` must be an integer".into())))
            .transpose()?;
        let link = family_link(family, num("components")?.map(|c| c as usize), twists, get("f"))?;
        let mut cfg = ScanConfig::new(
            link,
            num("max_abs_p")?.ok_or_else(|| Error::Parse("config needs `max_abs_p`".into()))?,
            num("max_abs_q")?.ok_or_else(|| Error::Parse("config needs `max_abs_q`".into()))?,
        );
        if let Some(p) = num("parallelism")? {
            cfg.parallelism = p as usize;
        }
        if let Some(o) = get("output") {
            cfg.output = Some(PathBuf::from(o));
        }
        if let Some(f) = get("format") {
            cfg.format = f.parse()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            return Err(Error::Precondition("parallelism must be positive".into()));
        }
        if self.max_abs_q == 0 && self.max_abs_p > 0 {
            return Err(Error::Precondition("max_abs_q must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "link": self.link.to_json(),
            "max_abs_p": self.max_abs_p,
            "max_abs_q": self.max_abs_q,
        })
    }
}

/// `SURGELENS_THREADS`, else the number of CPUs.
pub fn default_parallelism() -> usize {
    std::env::var("SURGELENS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Builds a link from the CLI family vocabulary.
pub fn family_link(family: &str, components: Option<usize>, twists: Option<i64>, f: Option<&str>) -> Result<LinkModel> {
    match family {
        "milnor3" => LinkModel::milnor(3),
        "milnor" => LinkModel::milnor(components.ok_or_else(|| Error::Parse("milnor needs a component count".into()))?),
        "whitehead" => LinkModel::twisted_whitehead(twists.unwrap_or(1)),
        "brunnian_type" => {
            let n = components.ok_or_else(|| Error::Parse("brunnian_type needs a component count".into()))?;
            let f = f.ok_or_else(|| Error::Parse("brunnian_type needs `f`".into()))?;
            LinkModel::brunnian_type(n, LaurentPoly::parse_in(f, n)?)
        }
        other => Err(Error::Parse(format!("unknown family `{other}`"))),
    }
}

/// Reduced slopes `p/q` with `|p| ≤ max_p`, `1 ≤ q ≤ max_q`, sorted.
pub fn grid_slopes(max_p: u64, max_q: u64) -> Vec<SurgerySlope> {
    let mp = max_p as i64;
    let mut out = Vec::new();
    for p in -mp..=mp {
        for q in 1..=max_q.max(1) as i64 {
            if p.gcd(&q) == 1 {
                out.push(SurgerySlope::new(p, q).unwrap());
            }
        }
    }
    out.sort();
    out
}

/// The classifier that applies to a link family.
pub fn classify(link: &LinkModel, slopes: &[SurgerySlope]) -> Result<ClassificationVerdict> {
    match link {
        LinkModel::Milnor { components: 3 } => classify_milnor3(slopes),
        LinkModel::Milnor { components } => classify_milnor(*components, slopes, false),
        LinkModel::TwistedWhitehead { twists } => classify_twisted_whitehead(*twists, slopes),
        _ => Ok(ClassificationVerdict {
            outcome: if h1_surgery(&SurgerySpec::new(link.clone(), slopes.to_vec())?).is_cyclic() {
                Outcome::OutOfTableRange
            } else {
                Outcome::NotCyclicH1
            },
            matched: None,
            source: crate::catalog::Source::PaperTheorem,
            evidence: None,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    pub slopes: Vec<SurgerySlope>,
    pub h1: u64,
    pub verdict: ClassificationVerdict,
    /// Pipeline stage excluding each component, `None` for candidates and
    /// untested components. Empty when the pipeline does not apply.
    pub stages: Vec<Option<Stage>>,
    /// Targeted torsion reports for lens verdicts.
    pub certificates: Vec<LensTestReport>,
    pub needs_review: bool,
    pub agreement: bool,
}

impl ScanRecord {
    pub fn excluded_by(&self) -> Option<Stage> {
        self.stages.iter().flatten().next().copied()
    }

    pub fn torsion_pass(&self) -> bool {
        !self.stages.is_empty() && self.stages.iter().all(Option::is_none)
    }

    pub fn slope_key(&self) -> String {
        self.slopes.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }

    pub fn to_json(&self) -> Value {
        let l = self.verdict.outcome.lens();
        json!({
            "slopes": self.slopes.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "h1": self.h1,
            "verdict": self.verdict.outcome.tag(),
            "lens": l.map(|l| json!([l.p(), l.q()])),
            "case": self.verdict.matched.as_ref().map(|m| m.case),
            "excluded_by": self.excluded_by().map(|s| s.tag()),
            "needs_review": self.needs_review,
            "agreement": self.agreement,
            "certificates": self.certificates.iter().map(LensTestReport::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn csv_row(&self) -> String {
        let mut cols: Vec<String> = Vec::new();
        for s in &self.slopes {
            cols.push(s.p().to_string());
            cols.push(s.q().to_string());
        }
        let l = self.verdict.outcome.lens();
        cols.push(self.verdict.outcome.tag().to_string());
        cols.push(l.map_or(String::new(), |l| l.p().to_string()));
        cols.push(l.map_or(String::new(), |l| l.q().to_string()));
        cols.push(self.verdict.matched.as_ref().map_or(String::new(), |m| m.case.to_string()));
        cols.push(self.excluded_by().map_or(String::new(), |s| s.tag().to_string()));
        cols.push(self.needs_review.to_string());
        cols.join(",")
    }
}

pub fn csv_header(components: usize) -> String {
    let mut cols: Vec<String> = (1..=components).flat_map(|i| [format!("p{i}"), format!("q{i}")]).collect();
    cols.extend(["verdict", "lens_p", "lens_q", "case", "excluded_by", "needs_review"].map(String::from));
    cols.join(",")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanSummary {
    pub grid_points: u64,
    pub scanned: u64,
    pub skipped: u64,
    pub outcomes: BTreeMap<String, u64>,
    pub excluded: BTreeMap<String, u64>,
    pub needs_review: Vec<String>,
    pub disagreements: Vec<String>,
}

impl ScanSummary {
    fn add(&mut self, r: &ScanRecord) {
        self.scanned += 1;
        *self.outcomes.entry(r.verdict.outcome.tag().to_string()).or_default() += 1;
        if let Some(s) = r.excluded_by() {
            *self.excluded.entry(s.tag().to_string()).or_default() += 1;
        }
        if r.needs_review {
            self.needs_review.push(r.slope_key());
        }
        if !r.agreement {
            self.disagreements.push(r.slope_key());
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "grid_points": self.grid_points,
            "scanned": self.scanned,
            "skipped": self.skipped,
            "outcomes": self.outcomes,
            "excluded_by": self.excluded,
            "needs_review_count": self.needs_review.len(),
            "needs_review": self.needs_review,
            "disagreements": self.disagreements,
        })
    }
}

/// Everything the pipeline status of one component depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct StatusKey {
    k: usize,
    p_k: i64,
    q_mod: i64,
    eta: i64,
    p_prime: i64,
    others_unit: bool,
}

/// Shared memo of pipeline statuses for one link.
#[derive(Default)]
pub struct StatusCache {
    map: Mutex<HashMap<StatusKey, Option<Stage>>>,
}

impl StatusCache {
    pub fn status(&self, spec: &SurgerySpec, k: usize) -> Result<Option<Stage>> {
        let s = spec.slopes[k];
        if s.p().abs() < 2 {
            return Ok(None);
        }
        let (eta, pp) = others_products(spec, k);
        let (Some(eta), Some(pp)) = (eta.to_i64(), pp.to_i64()) else {
            return Ok(lens_candidate_filter(spec, k)?.excluded_by());
        };
        let key = StatusKey {
            k,
            p_k: s.p(),
            q_mod: s.q().rem_euclid(s.p().abs()),
            eta,
            p_prime: pp,
            others_unit: spec.slopes.iter().enumerate().all(|(j, x)| j == k || x.p().abs() == 1),
        };
        if let Some(v) = self.map.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = lens_candidate_filter(spec, k)?.excluded_by();
        self.map.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

/// Classifies one grid point and runs the pipeline; `None` when `H_1` is
/// not cyclic of order at least 2.
pub fn scan_point(link: &LinkModel, slopes: &[SurgerySlope], cache: &StatusCache) -> Result<Option<ScanRecord>> {
    let spec = SurgerySpec::new(link.clone(), slopes.to_vec())?;
    let Some(h1) = h1_surgery(&spec).cyclic_order() else {
        return Ok(None);
    };
    let verdict = classify(link, slopes)?;
    let pipeline = spec.lambda() >= 3;
    let stages = if pipeline {
        (0..spec.lambda()).map(|k| cache.status(&spec, k)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let excluded = stages.iter().any(Option::is_some);
    let mut certificates = Vec::new();
    let mut agreement = true;
    if let (Some(lens), true) = (verdict.outcome.lens(), pipeline) {
        agreement = !excluded;
        for k in 0..spec.lambda() {
            if spec.slopes[k].p().abs() < 2 {
                continue;
            }
            let report = lens_torsion_test(&spec, k, Some(&lens))?;
            agreement &= report.aggregate();
            certificates.push(report);
        }
    }
    let needs_review = pipeline && verdict.outcome == Outcome::NotLens && !excluded;
    Ok(Some(ScanRecord {
        slopes: slopes.to_vec(),
        h1,
        verdict,
        stages,
        certificates,
        needs_review,
        agreement,
    }))
}

/// Runs the scan, handing records to `emit` in lexicographic slope order.
pub fn run_scan(config: &ScanConfig, mut emit: impl FnMut(&ScanRecord) -> Result<()>) -> Result<ScanSummary> {
    config.validate()?;
    let mut summary = ScanSummary::default();
    if config.max_abs_p == 0 && config.max_abs_q == 0 {
        return Ok(summary);
    }
    let slopes = grid_slopes(config.max_abs_p, config.max_abs_q);
    let n = config.components();
    summary.grid_points = (slopes.len() as u64).pow(n as u32);
    let cache = StatusCache::default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let window = 4 * config.parallelism;
    let firsts: Vec<usize> = (0..slopes.len()).collect();
    for group in firsts.chunks(window) {
        let results: Vec<Result<Vec<ScanRecord>>> = pool.install(|| {
            group
                .par_iter()
                .map(|&i| scan_chunk(&config.link, &slopes, i, n, &cache))
                .collect()
        });
        for chunk in results {
            for r in chunk? {
                summary.add(&r);
                emit(&r)?;
            }
        }
    }
    summary.skipped = summary.grid_points - summary.scanned;
    Ok(summary)
}

fn scan_chunk(link: &LinkModel, slopes: &[SurgerySlope], first: usize, n: usize, cache: &StatusCache) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    idx[0] = first;
    let m = slopes.len();
    loop {
        let tuple: Vec<SurgerySlope> = idx.iter().map(|&i| slopes[i]).collect();
        if let Some(r) = scan_point(link, &tuple, cache)? {
            out.push(r);
        }
        // odometer over positions 1..n
        let mut pos = n;
        loop {
            if pos == 1 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
        if n == 1 {
            return Ok(out);
        }
    }
}

/// Runs the scan and writes the report in the configured format.
pub fn write_scan(config: &ScanConfig, out: &mut dyn Write) -> Result<ScanSummary> {
    let io = |e: std::io::Error| Error::Precondition(format!("write failed: {e}"));
    match config.format {
        Format::Csv => {
            writeln!(out, "{}", csv_header(config.components())).map_err(io)?;
            run_scan(config, |r| writeln!(out, "{}", r.csv_row()).map_err(io))
        }
        Format::Json => {
            write!(out, "{{\"config\":{},\"records\":[", config.to_json()).map_err(io)?;
            let mut first = true;
            let summary = run_scan(config, |r| {
                if !first {
                    out.write_all(b",").map_err(io)?;
                }
                first = false;
                write!(out, "{}", r.to_json()).map_err(io)
            })?;
            writeln!(out, "],\"summary\":{}}}", summary.to_json()).map_err(io)?;
            Ok(summary)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn milnor3(p: u64, q: u64) -> ScanConfig {
        let mut c = ScanConfig::new(LinkModel::milnor(3).unwrap(), p, q);
        c.parallelism = 2;
        c
    }

    #[test]
    fn grid_is_reduced_and_sorted() {
        let g = grid_slopes(4, 3);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|s| s.p().gcd(&s.q()) == 1 && s.q() >= 1));
        assert!(g.contains(&SurgerySlope::new(0, 1).unwrap()));
        assert!(!g.iter().any(|s| s.p() == 0 && s.q() > 1));
    }

    #[test]
    fn empty_grid() {
        let mut out = Vec::new();
        let s = write_scan(&milnor3(0, 0), &mut out).unwrap();
        assert_eq!(s.scanned, 0);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert!(v["records"].as_array().unwrap().is_empty());
        let s = run_scan(&milnor3(0, 4), |_| Ok(())).unwrap();
        assert_eq!(s.scanned, 0);
        assert_eq!(s.skipped, 1);
    }

    #[test]
    fn small_milnor3_scan_agrees() {
        let s = run_scan(&milnor3(7, 2), |_| Ok(())).unwrap();
        assert!(s.disagreements.is_empty());
        assert!(s.outcomes["lens"] > 0);
    }

    #[test]
    fn output_is_deterministic_across_parallelism() {
        let mut a = milnor3(5, 2);
        a.format = Format::Csv;
        let mut b = a.clone();
        a.parallelism = 1;
        b.parallelism = 3;
        let (mut oa, mut ob) = (Vec::new(), Vec::new());
        write_scan(&a, &mut oa).unwrap();
        write_scan(&b, &mut ob).unwrap();
        assert_eq!(oa, ob);
        let text = String::from_utf8(oa).unwrap();
        assert!(text.starts_with("p1,q1,p2,q2,p3,q3,verdict,lens_p,lens_q,case,excluded_by,needs_review\n"));
    }

    #[test]
    fn cached_status_matches_direct_pipeline() {
        let link = LinkModel::milnor(3).unwrap();
        let cache = StatusCache::default();
        for s in ["1/1,1/1,7/1", "1/1,2/1,9/2", "2/1,3/1,5/1", "1/1,1/1,7/8", "-1/1,3/1,4/1", "1/1,3/2,5/3"] {
            let spec = SurgerySpec::new(link.clone(), SurgerySlope::parse_list(s).unwrap()).unwrap();
            for k in 0..3 {
                let direct = lens_candidate_filter(&spec, k).unwrap().excluded_by();
                assert_eq!(cache.status(&spec, k).unwrap(), direct);
                assert_eq!(cache.status(&spec, k).unwrap(), direct);
            }
        }
    }

    #[test]
    fn config_parsing() {
        let c = ScanConfig::parse("family=milnor\ncomponents=4\nmax_abs_p=6 # box\nmax_abs_q=4\nformat=csv\nparallelism=2\n").unwrap();
        assert_eq!(c.components(), 4);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.parallelism, 2);
        assert!(ScanConfig::parse("family=milnor3\nmax_abs_p=3").is_err());
        assert!(ScanConfig::parse("family=nope\nmax_abs_p=3\nmax_abs_q=1").is_err());
        assert!(ScanConfig::parse("garbage").is_err());
    }
}
