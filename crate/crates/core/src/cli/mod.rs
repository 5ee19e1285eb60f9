//! Command line front end: scene loading, dispatch and report emission.

pub mod emit;
pub mod scene;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_value::Value;

use crate::distance::{check_distance_inequalities, d1_sets, d2_sets, d3_sets, localized_distance, DistanceInput};
use crate::ekeland::{agevp, agevp_n, evp, gevp, FiniteMetricSpace};
use crate::error::{Error, Result};
use crate::geometry::{dist_point_set, NormalKind};
use crate::oracle::{emptiness_oracle, evp_exhaustive_check, grid_distance_oracle};
use crate::stationarity::{
    alpha_stationarity_test, dual_alpha_sup, dual_certificate_search, separation_certificate_t51, separation_certificate_t57,
    transversality_modulus, zheng_ng_certificate, AlphaSupForm, DualForm, SearchOutcome, SeparationParams, SolveOptions,
    StationarityOutcome,
};
use crate::translation::{
    check_primal_condition, dual_to_primal_symmetric, dual_to_primal_translations, localized_reversal, p2_to_p9, p9_to_p7,
    theta_rho, translate, translations_from_near_closest, PrimalInstance, PrimalKind,
};
pub use scene::{NamedSet, Params, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plot,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Plot => "dat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Distances d1, d2, d3 or the localized distance, with the inequality chains.
    Distance,
    /// Translation constructions and primal condition checks.
    Translate,
    /// Bracket for the largest shift size that keeps the sets meeting near x_bar.
    Theta,
    /// Finite Ekeland principles on point clouds.
    Ekeland,
    /// Search for translations witnessing approximate alpha-stationarity.
    Stationarity,
    /// Bracket for the transversality modulus.
    Modulus,
    /// Dual certificate search, alpha-sup and separation certificates.
    Certify,
    /// Brute-force grid distances and emptiness decisions.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Distance => "distance",
            Command::Translate => "translate",
            Command::Theta => "theta",
            Command::Ekeland => "ekeland",
            Command::Stationarity => "stationarity",
            Command::Modulus => "modulus",
            Command::Certify => "certify",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "transversal", version, about = "Extremality, stationarity and transversality of set collections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scene file (JSON).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Overrides the scene seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for the report file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Shorthand for `--param which=...`.
    #[arg(long, global = true)]
    pub which: Option<String>,
    /// Shorthand for `--param form=...`.
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Parameter override `key=value`; the value is parsed as JSON when possible.
    #[arg(long = "param", global = true, value_parser = parse_kv)]
    pub params: Vec<(String, String)>,
}

fn parse_kv(s: &str) -> std::result::Result<(String, String), String> {
    s.split_once('=').map(|(k, v)| (k.trim().to_string(), v.to_string())).ok_or_else(|| format!("expected key=value, got `{s}`"))
}

/// A rendered report and whether the command produced its object (exit code 3 otherwise).
#[derive(Debug, Clone)]
pub struct RunReport {
    pub value: Value,
    pub found: bool,
}

impl RunReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => emit::json(&self.value),
            Format::Csv => emit::csv(&self.value),
            Format::Plot => emit::plot(&self.value),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.found {
            0
        } else {
            3
        }
    }
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::invalid(format!("parameter `{name}` is required")))
}

fn x_bar(scene: &Scene) -> Result<Vec<f64>> {
    need(&scene.x_bar, "x_bar")
}

fn parse_word<T: DeserializeOwned>(s: &str, what: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| Error::invalid(format!("unknown {what} `{s}`")))
}

fn val<T: Serialize>(v: &T) -> Result<Value> {
    emit::to_value(v)
}

fn entry(m: &mut BTreeMap<Value, Value>, k: &str, v: Value) {
    m.insert(Value::String(k.to_string()), v);
}

/// Runs one command on a parsed scene.
pub fn run(command: Command, scene: &Scene) -> Result<RunReport> {
    let (results, found) = dispatch(command, scene)?;
    let mut m = BTreeMap::new();
    entry(&mut m, "command", Value::String(command.name().into()));
    entry(&mut m, "scene_digest", Value::String(scene.digest()?));
    entry(&mut m, "seed", Value::U64(scene.seed));
    entry(&mut m, "tool_version", Value::String(env!("CARGO_PKG_VERSION").into()));
    entry(&mut m, "status", Value::String(if found { "ok" } else { "not-found-at-budget" }.into()));
    entry(&mut m, "results", results);
    Ok(RunReport { value: Value::Map(m), found })
}

fn dispatch(command: Command, scene: &Scene) -> Result<(Value, bool)> {
    let p = &scene.params;
    let sets = scene.sets();
    let norm = scene.norm;
    let seed = scene.seed;
    match command {
        Command::Distance => {
            let which = p.which.as_deref().unwrap_or("all");
            let r = match which {
                "d1" => val(&d1_sets(&sets, norm)?)?,
                "d2" => val(&d2_sets(&sets, norm)?)?,
                "d3" => val(&d3_sets(&sets, norm)?)?,
                "localized" => val(&localized_distance(&sets, &need(&p.anchor, "anchor")?, norm)?)?,
                "all" => val(&check_distance_inequalities(&DistanceInput::Sets(sets), norm)?)?,
                other => return Err(Error::invalid(format!("unknown distance `{other}`"))),
            };
            Ok((r, true))
        }
        Command::Translate => {
            let eps = need(&p.eps, "eps")?;
            let tau = p.tau.unwrap_or(0.9);
            let r = match p.mode.as_deref().unwrap_or("near-closest") {
                "near-closest" => val(&translations_from_near_closest(&sets, &need(&p.points, "points")?, eps, norm)?)?,
                "p2-to-p9" => val(&p2_to_p9(&sets, &x_bar(scene)?, &need(&p.shifts, "shifts")?, eps, need(&p.rho, "rho")?, norm)?)?,
                "p9-to-p7" => val(&p9_to_p7(&sets, &x_bar(scene)?, &need(&p.shifts, "shifts")?, eps, need(&p.rho, "rho")?, norm)?)?,
                "reversal" => val(&dual_to_primal_translations(&sets, &need(&p.points, "points")?, &need(&p.duals, "duals")?, eps, p.rho, tau, norm)?)?,
                "symmetric-reversal" => val(&dual_to_primal_symmetric(&sets, &need(&p.points, "points")?, &need(&p.duals, "duals")?, eps, p.rho, tau, norm)?)?,
                "localized-reversal" => val(&localized_reversal(&sets, &need(&p.points, "points")?, &need(&p.duals, "duals")?, eps, p.rho, tau, norm)?)?,
                "check" => {
                    let kind: PrimalKind = parse_word(&need(&p.condition, "condition")?, "primal condition")?;
                    val(&check_primal_condition(&PrimalInstance {
                        kind,
                        sets,
                        norm,
                        x_bar: x_bar(scene)?,
                        shifts: need(&p.shifts, "shifts")?,
                        points: p.points.clone(),
                        x: None,
                        rho: p.rho.unwrap_or(f64::INFINITY),
                        eps,
                        alpha: p.alpha,
                    })?)?
                }
                other => return Err(Error::invalid(format!("unknown translate mode `{other}`"))),
            };
            Ok((r, true))
        }
        Command::Theta => {
            let r = theta_rho(&sets, &x_bar(scene)?, need(&p.rho, "rho")?, norm, p.budget.unwrap_or(2000), seed)?;
            Ok((val(&r)?, true))
        }
        Command::Ekeland => {
            let eps = need(&p.eps, "eps")?;
            let lambda = need(&p.lambda, "lambda")?;
            let mode = p.mode.as_deref().unwrap_or("evp");
            if mode == "evp" {
                let pts = sets[0].finite_points().ok_or_else(|| Error::invalid("evp needs the first set to be a point cloud"))?;
                let space = FiniteMetricSpace::from_points(pts, norm)?;
                let f = need(&p.f, "f")?;
                let start = p.start.unwrap_or(0);
                let r = evp(&space, &f, start, eps, lambda)?;
                let check = evp_exhaustive_check(&space, &f, start, &r, eps, lambda)?;
                let mut m = BTreeMap::new();
                entry(&mut m, "result", val(&r)?);
                entry(&mut m, "exhaustive_check", val(&check)?);
                return Ok((Value::Map(m), true));
            }
            let pts = need(&p.points, "points")?;
            let r = match mode {
                "gevp" | "agevp" if sets.len() != 2 || pts.len() != 2 => return Err(Error::invalid("two sets and two points are required")),
                "gevp" => gevp(&sets[0], &sets[1], &pts[0], &pts[1], eps, lambda, norm)?,
                "agevp" => agevp(&sets[0], &sets[1], &pts[0], &pts[1], eps, lambda, p.rho.unwrap_or(lambda), norm)?,
                "agevp-n" => agevp_n(&sets, &pts, eps, lambda, p.rho.unwrap_or(lambda), norm)?,
                other => return Err(Error::invalid(format!("unknown ekeland mode `{other}`"))),
            };
            Ok((val(&r)?, true))
        }
        Command::Stationarity => {
            let out = alpha_stationarity_test(&sets, &x_bar(scene)?, need(&p.alpha, "alpha")?, need(&p.eps, "eps")?, norm, p.budget.unwrap_or(2000), seed)?;
            let found = matches!(out, StationarityOutcome::Found { .. });
            Ok((val(&out)?, found))
        }
        Command::Modulus => {
            let r = transversality_modulus(&sets, &x_bar(scene)?, need(&p.eps, "eps")?, p.samples.unwrap_or(10_000), seed, norm)?;
            Ok((val(&r)?, true))
        }
        Command::Certify => certify(scene, sets),
        Command::Oracle => match p.mode.as_deref().unwrap_or("distance") {
            "distance" => {
                let x = x_bar(scene)?;
                let mut rows = Vec::new();
                for ns in &scene.sets {
                    let mut m = BTreeMap::new();
                    let bracket = grid_distance_oracle(&x, &ns.set, p.spacing, norm)?;
                    let main = dist_point_set(&x, &ns.set, norm)?;
                    entry(&mut m, "name", Value::String(ns.name.clone()));
                    entry(&mut m, "agrees", Value::Bool(bracket.contains(main, crate::tol::OBJ)));
                    entry(&mut m, "oracle", val(&bracket)?);
                    entry(&mut m, "main_path", Value::F64(main));
                    rows.push(Value::Map(m));
                }
                Ok((Value::Seq(rows), true))
            }
            "emptiness" => {
                let moved = match &p.shifts {
                    Some(sh) => sets.iter().zip(sh).map(|(s, a)| translate(s, a)).collect(),
                    None => sets,
                };
                Ok((val(&emptiness_oracle(&moved, p.region.clone(), p.spacing)?)?, true))
            }
            other => Err(Error::invalid(format!("unknown oracle mode `{other}`"))),
        },
    }
}

fn certify(scene: &Scene, sets: Vec<crate::geometry::SetRep>) -> Result<(Value, bool)> {
    let p = &scene.params;
    let norm = scene.norm;
    let eps = need(&p.eps, "eps")?;
    let kind: NormalKind = parse_word(p.kind.as_deref().unwrap_or("frechet"), "normal cone kind")?;
    let opts = SolveOptions { seed: scene.seed, ..SolveOptions::default() };
    let separation = || -> Result<SeparationParams> {
        let mut sp = SeparationParams::new(eps, need(&p.lambda, "lambda")?, need(&p.rho, "rho")?, p.tau.unwrap_or(0.9), norm);
        sp.kind = kind;
        sp.opts = opts.clone();
        Ok(sp)
    };
    let outcome = match p.mode.as_deref().unwrap_or("search") {
        "search" => {
            let form: DualForm = parse_word(p.form.as_deref().unwrap_or("D1"), "dual form")?;
            dual_certificate_search(&sets, &x_bar(scene)?, eps, p.alpha.unwrap_or(eps), form, kind, norm, &opts)?
        }
        "alpha-sup" => {
            let form: AlphaSupForm = parse_word(p.form.as_deref().unwrap_or("sum-norm"), "alpha-sup form")?;
            let r = dual_alpha_sup(&sets, &x_bar(scene)?, eps, form, kind, norm, &opts)?;
            return Ok((val(&r)?, true));
        }
        "separation" => separation_certificate_t51(&sets, &x_bar(scene)?, &need(&p.shifts, "shifts")?, &separation()?)?,
        "symmetric-separation" => separation_certificate_t57(&sets, &x_bar(scene)?, &need(&p.shifts, "shifts")?, &separation()?)?,
        "zheng-ng" => zheng_ng_certificate(&sets, &need(&p.points, "points")?, &separation()?)?,
        other => return Err(Error::invalid(format!("unknown certify mode `{other}`"))),
    };
    let found = matches!(outcome, SearchOutcome::Found { .. });
    Ok((val(&outcome)?, found))
}

/// Reads the scene named on the command line and applies the flag overrides.
pub fn load(cli: &Cli) -> Result<Scene> {
    let path = cli.scene.as_ref().ok_or_else(|| Error::invalid("--scene is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut overrides = cli.params.clone();
    if let Some(w) = &cli.which {
        overrides.push(("which".into(), format!("\"{w}\"")));
    }
    if let Some(f) = &cli.form {
        overrides.push(("form".into(), format!("\"{f}\"")));
    }
    let mut scene = Scene::parse(&text, &overrides)?;
    if let Some(s) = cli.seed {
        scene.seed = s;
    }
    Ok(scene)
}

/// Full command line run; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let outcome = load(&cli).and_then(|scene| run(cli.command, &scene));
    match outcome {
        Ok(report) => {
            let text = report.render(cli.format);
            if let Some(dir) = &cli.out {
                let path = dir.join(format!("{}.{}", cli.command.name(), cli.format.extension()));
                if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &text)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            } else {
                print!("{text}");
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the worker pool from `TRANSVERSAL_THREADS`.
pub fn configure_threads() {
    if let Some(n) = std::env::var("TRANSVERSAL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
