//! `asdim`: batch harness for graph generation, growth profiles, cover
//! construction and verification, the point-cloud pipeline and the
//! Assouad-Nagata scaling probe.
//!
//! Exit codes: 0 success, 1 I/O, 2 verification failure, 3 growth
//! hypothesis failure, 4 cap or resource limit, 5 malformed input.

mod config;
mod error;
mod families;
mod output;

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use asdim::cover::{asdim_certificate, construct_cover, rescale_transfer, verify_cover, Cover};
use asdim::generators::{grid_ball, rescaled_grid_ball, LevelTree, DEFAULT_CAP};
use asdim::graph::{Graph, VertexSet};
use asdim::growth::{growth_function, loglog_slope, Centers, GrowthProfile};
use asdim::io::{read_graph_file, write_graph, write_long_edge_graph};
use asdim::metric::{cloud_pipeline, greedy_net, t_growth, validate_net, PointCloud};

use error::CliError;
use families::{Built, Family, FamilyArgs};
use output::{comment_lines, emit, meta, sidecar, with_meta, write_atomic};

/// Comma-separated list flag. Parsed as one value so a later flag replaces
/// an earlier one (including values from a config file).
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<T>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

#[derive(Parser)]
#[command(name = "asdim", version, about = "Growth profiles, separators and bounded-multiplicity covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph family as a graph file (plus a JSON sidecar with --out).
    Gen(GenArgs),
    /// Growth profile as CSV with columns r,gamma,mode (mode: exact, sampled or estimate).
    Growth(GrowthArgs),
    /// Build a cover at one scale, or a certificate over several scales.
    Cover(CoverArgs),
    /// Re-verify a cover JSON against a graph file.
    Verify(VerifyArgs),
    /// Greedy net of a point cloud with both validators.
    Net(NetArgs),
    /// Net, scale graph, graph cover and pulled-back cloud cover.
    Pipeline(PipelineArgs),
    /// CSV with columns leg,scale,radius,max_diameter,diameter_over_scale,multiplicity,cells,passed.
    ProbeAn(ProbeArgs),
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    /// Materialize long edges as unit paths.
    #[arg(long)]
    subdivide: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GraphSource {
    /// Graph file; otherwise the graph comes from --family.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
}

#[derive(Args, Serialize)]
struct CloudSource {
    /// Point cloud CSV (coordinates, or `matrix` followed by a distance matrix).
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Without --cloud: sample this many points uniformly in a disc.
    #[arg(long, default_value_t = 5000)]
    disc_points: usize,
    #[arg(long, default_value_t = 50.0)]
    disc_radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct GrowthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: GraphSource,
    /// Point cloud CSV; switches to the t-growth estimate.
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Comma-separated radii.
    #[arg(long)]
    radii: List<f64>,
    /// Evaluate ptree growth exactly without materializing it.
    #[arg(long)]
    implicit: bool,
    /// Net scale for cloud growth.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `lo,hi` window for a log-log slope fit, appended as a comment line.
    #[arg(long)]
    fit: Option<List<u64>>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: GraphSource,
    /// Growth exponent: covers have multiplicity at most this at radius s/2.
    #[arg(long)]
    exponent: u32,
    /// Comma-separated scales s.
    #[arg(long, default_value = "2")]
    scale: List<u32>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap_vertices: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct NetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    cloud: CloudSource,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    /// Separation; defaults to eps.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    cloud: CloudSource,
    /// Net scale.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Metric scale m: scale-graph edges join members within 2m.
    #[arg(long, default_value_t = 4)]
    scale: u32,
    #[arg(long, default_value_t = 3)]
    exponent: u32,
    /// Chain scale used on the scale graph.
    #[arg(long, default_value_t = 2)]
    graph_scale: u32,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ProbeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 2)]
    exponent: u32,
    /// Comma-separated scales.
    #[arg(long)]
    scale: List<u32>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn main() {
    let code = match config::expand(std::env::args().collect()).and_then(run) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(args: Vec<String>) -> Result<(), CliError> {
    let mut command = Cli::command();
    let names: Vec<String> = command.get_subcommands().map(|c| c.get_name().to_string()).collect();
    for name in names {
        command = command.mut_subcommand(name, |c| c.args_override_self(true));
    }
    let matches = match command.try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Growth(a) => cmd_growth(&a),
        Command::Cover(a) => cmd_cover(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Net(a) => cmd_net(&a),
        Command::Pipeline(a) => cmd_pipeline(&a),
        Command::ProbeAn(a) => cmd_probe_an(&a),
    }
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let m = meta("gen", a, None);
    let built = a.family.build()?;
    let comments = comment_lines(&m);
    let (text, stats) = match built {
        Built::Unit(g) => (write_graph(&g, &comments), graph_stats(&g)),
        Built::Long(g) if a.subdivide => {
            let g = g.subdivide(a.family.cap_vertices)?;
            (write_graph(&g, &comments), graph_stats(&g))
        }
        Built::Long(g) => (
            write_long_edge_graph(&g, &comments),
            json!({
                "junctions": g.junction_count(),
                "edges": g.edge_count(),
                "max_degree": g.max_degree(),
                "subdivided_vertices": g.subdivided_vertex_count().to_string(),
            }),
        ),
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(out) = &a.out {
        write_atomic(&sidecar(out), &with_meta(&json!({ "graph": stats }), m)?)?;
    }
    Ok(())
}

fn graph_stats(g: &Graph) -> serde_json::Value {
    json!({ "vertices": g.vertex_count(), "edges": g.edge_count(), "max_degree": g.max_degree() })
}

fn load_graph(src: &GraphSource) -> Result<(Graph, String), CliError> {
    if let Some(path) = &src.graph {
        let text = std::fs::read_to_string(path)?;
        let g = read_graph_file(&text)?.into_graph(src.family.cap_vertices)?;
        return Ok((g, path.display().to_string()));
    }
    let g = src.family.build()?.into_graph(src.family.cap_vertices)?;
    Ok((g, src.family.label()))
}

fn load_cloud(src: &CloudSource) -> Result<PointCloud, CliError> {
    match &src.cloud {
        Some(path) => Ok(PointCloud::from_csv(&std::fs::read_to_string(path)?)?),
        None => Ok(PointCloud::disc(src.disc_points, src.disc_radius, src.seed)),
    }
}

fn integer_radii(radii: &[f64]) -> Result<Vec<u64>, CliError> {
    let mut out: Vec<u64> = radii
        .iter()
        .map(|&r| {
            if r >= 0.0 && r.fract() == 0.0 {
                Ok(r as u64)
            } else {
                Err(CliError::Usage(format!("graph radii must be non-negative integers, got {r}")))
            }
        })
        .collect::<Result<_, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn cmd_growth(a: &GrowthArgs) -> Result<(), CliError> {
    if let Some(path) = &a.cloud {
        let m = meta("growth", a, Some(a.seed));
        let cloud = PointCloud::from_csv(&std::fs::read_to_string(path)?)?;
        let g = t_growth(&cloud, a.t, &a.radii.0, a.restarts, a.seed)?;
        let mut text: String = comment_lines(&m).iter().map(|l| format!("# {l}\n")).collect();
        text.push_str(&format!("# estimate: max over {} greedy nets, sizes {:?}\n", g.restarts, g.net_sizes));
        text.push_str(&g.to_csv());
        return emit(a.out.as_deref(), &text);
    }
    let m = meta("growth", a, None);
    let radii = integer_radii(&a.radii.0)?;
    let profile: GrowthProfile = if a.implicit {
        if a.source.family.family != Some(Family::Ptree) {
            return Err(CliError::Usage("--implicit needs --family ptree".into()));
        }
        let (k, depth) = a.source.family.ptree_params();
        LevelTree::ptree(k, depth)?.growth(&radii)
    } else {
        let (g, _) = load_graph(&a.source)?;
        growth_function(&g, &VertexSet::all(g.vertex_count()), &radii, &Centers::All)?
    };
    let mut text: String = comment_lines(&m).iter().map(|l| format!("# {l}\n")).collect();
    text.push_str(&profile.to_csv());
    if let Some(List(window)) = &a.fit {
        let [lo, hi] = window[..] else {
            return Err(CliError::Usage("--fit takes lo,hi".into()));
        };
        let fit = loglog_slope(&profile, lo, hi)?;
        text.push_str(&format!(
            "# fit lo={lo} hi={hi} slope={:.6} intercept={:.6} residual={:.6} points={}\n",
            fit.slope, fit.intercept, fit.residual, fit.points
        ));
    }
    emit(a.out.as_deref(), &text)
}

fn cmd_cover(a: &CoverArgs) -> Result<(), CliError> {
    let m = meta("cover", a, None);
    let (g, id) = load_graph(&a.source)?;
    let scales = &a.scale.0;
    let text = match scales[..] {
        [] => return Err(CliError::Usage("--scale needs at least one value".into())),
        [s] => {
            let cover = construct_cover(&g, &VertexSet::all(g.vertex_count()), a.exponent, s)?;
            let report = verify_cover(&g, &cover);
            if !report.passed {
                return Err(CliError::Verification(report.violations().join("; ")));
            }
            with_meta(&cover, m)?
        }
        _ => {
            if a.exponent == 0 {
                return Err(CliError::Usage("--exponent must be >= 1".into()));
            }
            with_meta(&asdim_certificate(&g, &id, a.exponent - 1, scales)?, m)?
        }
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let m = meta("verify", a, None);
    let g = read_graph_file(&std::fs::read_to_string(&a.graph)?)?.into_graph(a.cap_vertices)?;
    let cover = Cover::from_json(&std::fs::read_to_string(&a.cover)?)?;
    let report = verify_cover(&g, &cover);
    emit(a.out.as_deref(), &with_meta(&report, m)?)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(report.violations().join("; ")))
    }
}

fn cmd_net(a: &NetArgs) -> Result<(), CliError> {
    let m = meta("net", a, Some(a.cloud.seed));
    let cloud = load_cloud(&a.cloud)?;
    let net = greedy_net(&cloud, a.eps, a.delta.unwrap_or(a.eps))?;
    let report = validate_net(&cloud, &net);
    emit(a.out.as_deref(), &with_meta(&json!({ "net": net, "report": report }), m)?)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{report:?}")))
    }
}

fn cmd_pipeline(a: &PipelineArgs) -> Result<(), CliError> {
    let m = meta("pipeline", a, Some(a.cloud.seed));
    let cloud = load_cloud(&a.cloud)?;
    let p = cloud_pipeline(&cloud, a.t, a.scale, a.exponent, a.graph_scale)?;
    let body = json!({
        "net": { "members": p.net.members, "eps": p.net.eps, "delta": p.net.delta },
        "net_report": p.net_report,
        "scale_graph": graph_stats(&p.graph),
        "graph_cover": p.graph_cover,
        "graph_report": p.graph_report,
        "cells": p.cells,
        "report": p.report,
    });
    emit(a.out.as_deref(), &with_meta(&body, m)?)?;
    if p.report.passed && p.graph_report.passed {
        Ok(())
    } else {
        Err(CliError::Verification("pullback cover failed its own check".into()))
    }
}

fn probe_row(leg: &str, s: u32, g: &Graph, cover: &Cover) -> String {
    let report = verify_cover(g, cover);
    let d = report.max_diameter.map_or("disconnected".to_string(), |d| d.to_string());
    let ratio = report.max_diameter.map_or("inf".to_string(), |d| format!("{:.4}", d as f64 / s.max(1) as f64));
    format!(
        "{leg},{s},{},{d},{ratio},{},{},{}\n",
        cover.radius,
        report.multiplicity,
        cover.cells.len(),
        report.passed
    )
}

fn cmd_probe_an(a: &ProbeArgs) -> Result<(), CliError> {
    let m = meta("probe-an", a, None);
    let mut text: String = comment_lines(&m).iter().map(|l| format!("# {l}\n")).collect();
    text.push_str("# achieved upper bounds only; a finite probe cannot certify infinite Assouad-Nagata dimension\n");
    text.push_str("leg,scale,radius,max_diameter,diameter_over_scale,multiplicity,cells,passed\n");
    let (g, _) = load_graph(&a.source)?;
    let all = VertexSet::all(g.vertex_count());
    let mut failed = false;
    for &s in &a.scale.0 {
        let cover = construct_cover(&g, &all, a.exponent, s)?;
        let row = probe_row("direct", s, &g, &cover);
        failed |= row.ends_with("false\n");
        text.push_str(&row);
    }
    if a.source.graph.is_none() && a.source.family.family == Some(Family::RescaledGridBall) {
        let (n, k) = a.source.family.ball_params();
        let cap = a.source.family.cap_vertices;
        let sub = rescaled_grid_ball(n, k, cap)?.subdivide(cap)?;
        let base = grid_ball(n, k as u64, 1, cap)?.subdivide(cap)?;
        let factor = 1u64 << k;
        for &s in &a.scale.0 {
            let cover = construct_cover(&sub, &VertexSet::all(sub.vertex_count()), a.exponent, s)?;
            let moved = rescale_transfer(&sub, &cover, factor)?;
            let row = probe_row("transfer", s, &base, &moved);
            failed |= row.ends_with("false\n");
            text.push_str(&row);
        }
    }
    emit(a.out.as_deref(), &text)?;
    if failed {
        Err(CliError::Verification("a probed cover failed verification".into()))
    } else {
        Ok(())
    }
}

