use std::path::Path;

use stochlab_cli::params::Raw;
use stochlab_cli::{execute, resolve_request, Manifest, Request};

/// Every experiment (and every task/model switch) at sizes that run in
/// well under a second.
pub fn small_runs() -> Vec<(&'static str, Vec<(&'static str, &'static str)>)> {
    vec![
        ("interfere", vec![("points", "201")]),
        ("decay", vec![("atoms", "500"), ("bins", "10")]),
        ("uncertainty", vec![("states", "20"), ("points", "256")]),
        ("spectrum", vec![("points", "201"), ("levels", "3")]),
        ("spectrum", vec![("potential", "double_well"), ("points", "201"), ("commuting", "true")]),
        (
            "paths",
            vec![("n_t", "256"), ("sweeps", "100"), ("thermalization", "20"), ("chains", "10"), ("samples_per_chain", "10")],
        ),
        ("diffuse", vec![("a_s", "1"), ("walkers", "400000")]),
        ("sandpile", vec![("width", "12"), ("height", "12"), ("warmup", "500"), ("drops", "3000"), ("segments", "4")]),
        ("resonance", vec![("periods", "96"), ("levels", "5")]),
        ("memory", vec![("trials", "30")]),
        ("memory", vec![("task", "anneal"), ("sk_n", "8"), ("instances", "5"), ("schedule_levels", "20"), ("sweeps_per_level", "5")]),
        ("memory", vec![("task", "thermo"), ("sk_n", "6"), ("temperatures", "5")]),
        ("network", vec![("n", "60"), ("k", "4"), ("p_values", "0,0.1,1"), ("edges", "true")]),
        ("network", vec![("model", "ba"), ("n", "300"), ("d_min", "2"), ("d_max", "20"), ("edges", "true")]),
        ("search", vec![("sides", "8"), ("target_counts", "1,4"), ("radii", "0"), ("replicas", "100")]),
        ("mcint", vec![("samples", "5000")]),
        ("clt", vec![("distribution", "exponential"), ("n_values", "4,16,64"), ("replicas", "200")]),
    ]
}

pub fn request(name: &str, kv: &[(&str, &str)], seed: u64) -> Request {
    Request {
        experiment: name.into(),
        seed: Some(seed),
        overrides: kv.iter().map(|(k, v)| (k.to_string(), Raw::Text(v.to_string()))).collect(),
        ..Default::default()
    }
}

pub fn run_into(req: &Request, out: &Path) -> Manifest {
    let (exp, config) = resolve_request(req).unwrap_or_else(|e| panic!("{}: {e}", req.experiment));
    execute(&exp, &config, out).unwrap_or_else(|e| panic!("{}: {e}", req.experiment))
}
