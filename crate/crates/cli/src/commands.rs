//! The commands, returning their report text and exit code instead of printing.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use facered::batch::map_instances;
use facered::cones::FaceRep;
use facered::facial::{facial_reduction_with, validate_certificate, ConicSystem, Mode, SingularityReport, Tolerances};
use facered::rigidity::{
    gen_chordal, gen_ladder_sdp, gen_laman, gen_maximal_planar, random_generic_config, rigidity_verdicts, Framework, RigidityVerdict,
};

use crate::error::{CliError, EXIT_FAILED, EXIT_OK};
use crate::files::{read_json, write_json, CertificateFile, FrameworkFile, ProblemFile};
use crate::svg;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { code: EXIT_OK, text }
    }

    fn from_result(r: Result<Outcome, CliError>) -> Self {
        r.unwrap_or_else(|e| Outcome { code: e.exit_code(), text: format!("error: {e}\n") })
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Size of a face: support size for orthants, order of the basis for PSD faces.
fn face_size(face: &FaceRep) -> usize {
    match face {
        FaceRep::Orthant { support, .. } => support.len(),
        FaceRep::Psd { basis } => basis.cols(),
        FaceRep::Product(parts) => parts.iter().map(face_size).sum(),
        FaceRep::Fig1(f) => f.dim(),
    }
}

pub fn describe_face(face: &FaceRep) -> String {
    match face {
        FaceRep::Orthant { n, support } => format!("orthant({n}) support {support:?}"),
        FaceRep::Psd { basis } => format!("psd({}) order {}", basis.rows(), basis.cols()),
        FaceRep::Product(parts) => format!("product [{}]", parts.iter().map(describe_face).collect::<Vec<_>>().join(", ")),
        FaceRep::Fig1(f) => format!("fig1 {}", f.name()),
    }
}

pub fn reduce_report(sys: &ConicSystem, report: &SingularityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sd: {}", report.sd);
    let _ = writeln!(out, "status: {}", if report.exact { "exact" } else { "upper bound" });
    let _ = writeln!(out, "arithmetic: {}", if report.exact_arithmetic { "rational" } else { "float" });
    let _ = writeln!(out, "strictly feasible: {}", yes(report.strictly_feasible));
    let mut prev = face_size(&sys.cone.whole_face());
    for (k, step) in report.certificate.steps.iter().enumerate() {
        let size = face_size(&step.face);
        let _ = writeln!(out, "rank: step {} exposer rank {} face {}", k + 1, prev.saturating_sub(size), describe_face(&step.face));
        prev = size;
    }
    let _ = writeln!(out, "face: {}", describe_face(&report.minimal_face));
    if let Some(m) = report.margins.last() {
        let _ = writeln!(out, "margin: {m:.3e}");
    }
    out
}

pub struct ReduceOptions {
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub certificate_out: Option<PathBuf>,
}

pub fn reduce(problem: &Path, opts: &ReduceOptions) -> Outcome {
    Outcome::from_result((|| {
        let file: ProblemFile = read_json(problem)?;
        let sys = file.to_system(opts.mode)?;
        let mut tol = Tolerances::default();
        if let Some(t) = opts.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Parse(format!("tolerance {t} must be positive")));
            }
            tol.aux = t;
        }
        let report = facial_reduction_with(&sys, &tol)?;
        if let Some(path) = &opts.certificate_out {
            write_json(path, &CertificateFile::from_report(&report, sys.mode)?)?;
        }
        Ok(Outcome::ok(reduce_report(&sys, &report)))
    })())
}

pub fn validate(problem: &Path, certificate: &Path) -> Outcome {
    Outcome::from_result((|| {
        let sys = read_json::<ProblemFile>(problem)?.to_system(None)?;
        let file: CertificateFile = read_json(certificate)?;
        let (cert, witnesses) = file.to_certificate(&sys.cone)?;
        let report = validate_certificate(&sys, &cert, &witnesses);
        let mut out = String::new();
        for (k, s) in report.steps.iter().enumerate() {
            let _ = write!(
                out,
                "step {}: {} reconstruction {:.2e} dual {} reduces {} orthogonal {} face {}",
                k + 1,
                if s.ok { "ok" } else { "FAIL" },
                s.reconstruction,
                yes(s.in_dual),
                yes(s.reduces),
                yes(s.orthogonal_to_b),
                yes(s.face_matches)
            );
            if let Some(note) = &s.note {
                let _ = write!(out, " ({note})");
            }
            out.push('\n');
        }
        let count_ok = file.sd == cert.steps.len();
        if !count_ok {
            let _ = writeln!(out, "sd field {} does not match {} steps", file.sd, cert.steps.len());
        }
        let _ = writeln!(out, "witnesses in face: {}", yes(report.witnesses_in_face));
        let ok = report.ok && count_ok;
        let _ = writeln!(out, "verdict: {}", if ok { "valid" } else { "invalid" });
        Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_FAILED }, text: out })
    })())
}

pub fn rigidity_report(f: &Framework, v: &RigidityVerdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sd: {}", v.sd);
    let _ = writeln!(out, "sd range form: {}", v.sd_range);
    let ranks: Vec<String> = v.stress_sequence.iter().map(|l| l.rank.to_string()).collect();
    let _ = writeln!(out, "rank: {}", if ranks.is_empty() { "none".to_string() } else { ranks.join(" ") });
    for (k, l) in v.stress_sequence.iter().enumerate() {
        let _ = writeln!(
            out,
            "level {}: rank {} face min eigenvalue {:.3e} gap {:.3e} proper {} verified {}",
            k + 1,
            l.rank,
            l.face_lambda_min,
            l.gap,
            yes(l.proper),
            yes(l.verified)
        );
    }
    let _ = writeln!(out, "vertices: {} edges: {} dim: {} affine dim: {}", f.n(), f.graph.m(), f.dim, v.affine_dim);
    let _ = writeln!(out, "laman: {}", v.laman.map_or("n/a", yes));
    let _ = writeln!(out, "chordal: {}", yes(v.chordal));
    let _ = writeln!(out, "a priori bound: {}", v.a_priori_bound.map_or("none".to_string(), |b| b.to_string()));
    let _ = writeln!(out, "infinitesimal rank: {} of {}", v.infinitesimal.rank, v.infinitesimal.required);
    let _ = writeln!(out, "affine flex dim: {}", v.affine_flex_dim);
    let _ = writeln!(out, "verdict: infinitesimally rigid {}", yes(v.infinitesimal.rigid));
    let _ = writeln!(out, "verdict: dimensionally rigid {}", yes(v.dimensionally_rigid));
    let _ = writeln!(out, "verdict: universally rigid {}", yes(v.universally_rigid_certified));
    let _ = writeln!(out, "verdict: super stable {}", yes(v.super_stable));
    let _ = writeln!(out, "verdict: proper {}", yes(v.proper));
    let _ = writeln!(out, "verdict: certified {}", yes(v.certified && v.levels_verified));
    out
}

pub fn rigidity(framework: &Path, svg_out: Option<&Path>) -> Outcome {
    Outcome::from_result((|| {
        let f = read_json::<FrameworkFile>(framework)?.to_framework()?;
        let v = rigidity_verdicts(&f)?;
        if let Some(path) = svg_out {
            let stress = v.stress_sequence.first().map(|l| l.stress.as_slice());
            std::fs::write(path, svg::render(&f, stress)).map_err(|e| CliError::io(path, e))?;
        }
        Ok(Outcome::ok(rigidity_report(&f, &v)))
    })())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Laman,
    Chordal,
    Planar,
    Ladder,
}

impl GenKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "laman" => Some(GenKind::Laman),
            "chordal" => Some(GenKind::Chordal),
            "planar" => Some(GenKind::Planar),
            "ladder" => Some(GenKind::Ladder),
            _ => None,
        }
    }
}

/// JSON text of a generated instance.
pub fn generate(kind: GenKind, n: usize, seed: u64, density: f64) -> Result<String, CliError> {
    let framework = |g, dim, tag: &str| -> Result<String, CliError> {
        let f = random_generic_config(&g, dim, seed)?.with_provenance(format!("{tag} n {n} seed {seed}"));
        Ok(serde_json::to_string_pretty(&FrameworkFile::from_framework(&f, Some(seed)))?)
    };
    match kind {
        GenKind::Laman => framework(gen_laman(n, seed)?, 2, "laman"),
        GenKind::Chordal => framework(gen_chordal(n, density, seed)?, 2, "chordal"),
        // the a-priori bound for planar graphs keys on this provenance prefix
        GenKind::Planar => framework(gen_maximal_planar(n, seed)?, 3, "maximal-planar"),
        GenKind::Ladder => Ok(serde_json::to_string_pretty(&ProblemFile::from_system(&gen_ladder_sdp(n)?)?)?),
    }
}

pub fn gen(kind: GenKind, n: usize, seed: u64, density: f64, out: Option<&Path>) -> Outcome {
    Outcome::from_result((|| {
        let text = generate(kind, n, seed, density)? + "\n";
        match out {
            Some(path) => {
                std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
                Ok(Outcome::ok(format!("wrote {}\n", path.display())))
            }
            None => Ok(Outcome::ok(text)),
        }
    })())
}

enum Job {
    Problem(ConicSystem),
    Framework(Framework),
    Unreadable(CliError),
}

fn load_job(path: &Path) -> Job {
    let value: serde_json::Value = match read_json(path) {
        Ok(v) => v,
        Err(e) => return Job::Unreadable(e),
    };
    let loaded = if value.get("vertices").is_some() {
        serde_json::from_value::<FrameworkFile>(value).map_err(CliError::from).and_then(|f| f.to_framework()).map(Job::Framework)
    } else {
        serde_json::from_value::<ProblemFile>(value).map_err(CliError::from).and_then(|p| p.to_system(None)).map(Job::Problem)
    };
    loaded.unwrap_or_else(Job::Unreadable)
}

fn run_job(job: &Job) -> (i32, String) {
    let r = match job {
        Job::Problem(sys) => facial_reduction_with(sys, &Tolerances::default())
            .map(|r| format!("sd: {} {}", r.sd, if r.exact { "exact" } else { "upper bound" }))
            .map_err(CliError::from),
        Job::Framework(f) => rigidity_verdicts(f)
            .map(|v| format!("sd: {} verdict: universally rigid {}", v.sd, yes(v.universally_rigid_certified)))
            .map_err(CliError::from),
        Job::Unreadable(e) => Err(CliError::Parse(e.to_string())),
    };
    match r {
        Ok(line) => (EXIT_OK, line),
        Err(e) => (e.exit_code(), format!("error: {e}")),
    }
}

/// Analyze every `*.json` file of a directory, in name order, `jobs` instances at a time.
pub fn batch(dir: &Path, jobs: Option<usize>) -> Outcome {
    Outcome::from_result((|| {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| CliError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let loaded: Vec<Job> = paths.iter().map(|p| load_job(p)).collect();
        let results = map_instances(&loaded, jobs, run_job);
        let mut out = String::new();
        let mut code = EXIT_OK;
        for (p, (c, line)) in paths.iter().zip(results) {
            let name = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
            let _ = writeln!(out, "{name}: {line}");
            code = code.max(c);
        }
        let _ = writeln!(out, "instances: {}", paths.len());
        Ok(Outcome { code, text: out })
    })())
}
