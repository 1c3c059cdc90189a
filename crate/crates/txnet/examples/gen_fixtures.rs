//! Regenerates the bundled six-hour capture fixture and its golden outputs.
//!
//! ```bash
//! cargo run --release -p txnet --example gen_fixtures
//! ```
//!
//! The capture log comes from the default [`FeedSpec`] (seed 20170704); the
//! goldens are the metrics report of the full six-hour graph, the xmin=4
//! power-law fit with a 100-replicate bootstrap (seed 42), and the link
//! communities of the six-hour giant component. Regeneration is
//! deterministic: rerunning this binary must leave the files unchanged.

use std::fs;
use std::path::PathBuf;

use txnet::distfit::{fit_power_law, gof_bootstrap, FitDocument, XminMode};
use txnet::graph::TxGraph;
use txnet::ingest::{replay, Edge};
use txnet::ledger::EdgeList;
use txnet::linkcomm::{community_report, detect_link_communities};
use txnet::metrics::{degree_sequence, snapshot_report, DegreeMode, DistanceMode};
use txnet::synth::feed::{write_capture_log, FeedSpec};

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let fixtures = root.join("fixtures");
    let golden = fixtures.join("golden");
    fs::create_dir_all(&golden).expect("create fixtures/golden");

    let spec = FeedSpec::default();
    let log_path = fixtures.join("capture_6h.log");
    let mut log = Vec::new();
    let n = write_capture_log(&spec, &mut log).expect("generate feed");
    fs::write(&log_path, &log).expect("write capture log");
    println!("wrote {} ({} records, {} bytes)", log_path.display(), n, log.len());

    let mut edges: Vec<Edge> = Vec::new();
    let summary = replay(&log_path, &mut edges).expect("replay");
    println!("replay: {summary:?}");
    let list = EdgeList::from_edges(edges).expect("ordered");

    let graph = TxGraph::build(&list).expect("build graph");
    println!("graph: {} nodes, {} arcs", graph.node_count(), graph.arc_count());

    let report = snapshot_report(&graph, "6h", DistanceMode::Directed).expect("metrics");
    fs::write(golden.join("metrics_6h.json"), report.to_json()).expect("write metrics golden");
    println!(
        "metrics: diameter {:?}, mean_distance {:?}, triangles {}, dyads {}",
        report.diameter, report.mean_distance, report.triangles, report.dyads_connected
    );

    let degrees = degree_sequence(&graph, DegreeMode::Total);
    let fit = fit_power_law(&degrees, XminMode::Fixed(4)).expect("fit");
    let gof = gof_bootstrap(&degrees, &fit, 100, 42).expect("gof");
    println!(
        "fit: alpha {:?}, n_tail {}, ks {:.4}, p {:.2}",
        fit.alpha(),
        fit.n_tail,
        fit.ks_stat,
        gof.p_value
    );
    let doc = FitDocument { fit, gof: Some(gof) };
    fs::write(golden.join("fit_6h.json"), doc.to_json()).expect("write fit golden");

    let giant = graph.giant_component().expect("giant");
    println!(
        "giant: {} nodes, {} arcs ({:.1}% of nodes)",
        giant.node_count(),
        giant.arc_count(),
        100.0 * giant.node_count() as f64 / graph.node_count() as f64
    );
    let partition = detect_link_communities(&giant).expect("communities");
    println!(
        "communities: {} (density {:.4})",
        partition.communities.len(),
        partition.partition_density
    );
    let communities = community_report(&giant, &partition).expect("report");
    fs::write(golden.join("communities_6h.json"), communities.to_json())
        .expect("write communities golden");

    // growth-curve diagnostics (criterion: logarithmic R^2 > 0.9 on this fixture)
    let series = txnet::distfit::growth_series(&list, 60);
    let nodes: Vec<(f64, f64)> = series
        .iter()
        .map(|p| (p.t_s as f64, p.cumulative_nodes as f64))
        .collect();
    let e: Vec<(f64, f64)> = series
        .iter()
        .map(|p| (p.t_s as f64, p.cumulative_edges as f64))
        .collect();
    let nf = txnet::distfit::fit_log_growth(&nodes).expect("node fit");
    let ef = txnet::distfit::fit_log_growth(&e).expect("edge fit");
    println!("growth: node R2 {:.4}, edge R2 {:.4}", nf.r_squared, ef.r_squared);
}
