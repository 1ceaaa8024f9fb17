// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


use std::error::Error;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spanning_embed::decompose::{decompose_bounded, decompose_degenerate, verify_decomposition};
use spanning_embed::density::{m1_density_with, m_density_with, rooted_density_with, Backend};
use spanning_embed::embed::{embed_bounded, embed_degenerate, embed_direct, verify_embedding, EmbedConfig, ExposureMode, Scope};
use spanning_embed::graph::io::{format_edge_list, read_edge_list};
use spanning_embed::graph::{Graph, VertexSubset};
use spanning_embed::harness::{generate_test_graph, sweep, write_csv, ExperimentConfig, TargetSpec};
use spanning_embed::random::{sample_gnp, split_host, RandomSource};
use spanning_embed::robust::{build_absorber_template, sample_robust_template, verify_y_robust, BipartiteTemplate, RobustMode};

#[derive(Parser)]
#[command(name = "spanning-embed", version, about = "Spanning embeddings into G(n,p): generators, densities, decompositions, absorbers, pipelines")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample G(n,p) as an edge list.
    GenGnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a target graph from a JSON family description, e.g. '{"kind":"clique_factor"}'.
    GenTarget {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact densities m, m1 or rooted m.
    Density {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DensityMode::M)]
        mode: DensityMode,
        /// Comma-separated roots for --mode rooted.
        #[arg(long, value_delimiter = ',')]
        roots: Vec<usize>,
        #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
        backend: BackendArg,
    },
    /// Anchor set and pockets of a target.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: DecomposeArg,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        delta: usize,
        /// Anchor separation; defaults to 20d² or 4Δ+5.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Robust bipartite templates.
    Absorber {
        #[command(subcommand)]
        cmd: AbsorberCmd,
    },
    /// Embed a target into a host, both edge lists.
    Embed {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        delta: usize,
        /// Edge probability of the host, used to split it into exposures.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Phases see only their own exposure (split) or the union so far.
        #[arg(long, value_enum, default_value_t = ExposureArg::Split)]
        exposure: ExposureArg,
        /// JSON file receiving the per-phase trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write `target_vertex host_vertex` lines here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// p-sweep from a JSON ExperimentConfig, CSV on stdout or --out.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AbsorberCmd {
    /// Sample a robust base template; with --length, split and subdivide it.
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        z_degree: usize,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        attempts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check Y-robustness of a template file.
    Verify {
        #[arg(long)]
        template: PathBuf,
        /// Sample this many Y' instead of enumerating.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DensityMode {
    M,
    M1,
    Rooted,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Exhaustive,
    Flow,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecomposeArg {
    Degenerate,
    Bounded,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Degenerate,
    Bounded,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExposureArg {
    Split,
    Cumulative,
}

fn emit(text: &str, out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn load(path: &Path) -> Result<Graph, Box<dyn Error>> {
    read_edge_list(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    match cli.cmd {
        Cmd::GenGnp { n, p, seed, out } => {
            let g = sample_gnp(n, p, RandomSource::new(seed, 0))?;
            emit(&format_edge_list(&g), out.as_ref())?;
        }
        Cmd::GenTarget { kind, n, delta, seed, out } => {
            let family: TargetSpec = serde_json::from_str(&kind)?;
            let g = generate_test_graph(&family, n, delta, RandomSource::new(seed, 0))?;
            emit(&format_edge_list(&g), out.as_ref())?;
        }
        Cmd::Density { input, mode, roots, backend } => {
            let g = load(&input)?;
            let backend = match backend {
                BackendArg::Auto => Backend::Auto,
                BackendArg::Exhaustive => Backend::Exhaustive,
                BackendArg::Flow => Backend::Flow,
            };
            let v = match mode {
                DensityMode::M => m_density_with(&g, backend)?,
                DensityMode::M1 => m1_density_with(&g, backend)?,
                DensityMode::Rooted => rooted_density_with(&g, &VertexSubset::new(g.n(), roots)?, backend)?,
            };
            println!("{}", v.value);
            println!("witness {:?}", v.witness.as_slice());
        }
        Cmd::Decompose { input, mode, d, delta, k } => {
            let h = load(&input)?;
            let dec = match mode {
                DecomposeArg::Degenerate => decompose_degenerate(&h, d, delta, k.unwrap_or(20 * d * d))?,
                DecomposeArg::Bounded => decompose_bounded(&h, delta, k.unwrap_or(4 * delta + 5))?,
            };
            let report = verify_decomposition(&h, &dec, dec.mode);
            println!("|D| = {}  K_effective = {:.2}", dec.pockets.len(), dec.k_effective);
            println!("buckets {:?}", dec.histogram);
            println!("F* (root {}):", dec.z_star);
            print!("{}", format_edge_list(&dec.f_star));
            println!("checks D1 {} D2 {} D3 {} D4 {} caps {}", report.d1.pass, report.d2.pass, report.d3.pass, report.d4.pass, report.caps.pass);
        }
        Cmd::Absorber { cmd } => match cmd {
            AbsorberCmd::Build { m, z_degree, length, seed, attempts, out } => {
                let src = RandomSource::new(seed, 0);
                let b = match length {
                    Some(l) => build_absorber_template(m, z_degree, l, src, attempts)?,
                    None => sample_robust_template(m, z_degree, src, attempts)?,
                };
                emit(&b.to_text(), out.as_ref())?;
            }
            AbsorberCmd::Verify { template, samples, seed } => {
                let b = BipartiteTemplate::read(&template)?;
                let mode = match samples {
                    Some(trials) => RobustMode::Sampled { trials, seed },
                    None => RobustMode::Auto,
                };
                println!("{:?}", verify_y_robust(&b, mode)?);
            }
        },
        Cmd::Embed { host, target, mode, d, delta, p, seed, exposure, trace, out } => {
            let g = load(&host)?;
            let h = load(&target)?;
            let cfg = EmbedConfig {
                exposure: match exposure {
                    ExposureArg::Split => ExposureMode::Split,
                    ExposureArg::Cumulative => ExposureMode::Cumulative,
                },
                ..EmbedConfig::default()
            };
            let src = RandomSource::new(seed, 0);
            let rounds = match mode {
                ModeArg::Degenerate => 3,
                ModeArg::Bounded => 2,
                ModeArg::Direct => 1,
            };
            let exposures = split_host(&g, p, rounds, src.child(0))?;
            let result = match mode {
                ModeArg::Degenerate => embed_degenerate(&exposures, &h, d, delta, &cfg, src.child(1)),
                ModeArg::Bounded => embed_bounded(&exposures, &h, delta, &cfg, src.child(1)),
                ModeArg::Direct => embed_direct(&exposures, &h, delta, &cfg, src.child(1)),
            };
            let outcome = result?;
            let padded: Graph = h.with_isolated(g.n() - h.n());
            let verdict = verify_embedding(&g, &padded, &outcome.phi, &Scope::Full);
            if let Some(path) = trace {
                fs::write(path, serde_json::to_string_pretty(&outcome.trace)?)?;
            }
            let mut lines = String::new();
            for v in 0..h.n() {
                lines.push_str(&format!("{v} {}\n", outcome.phi.get(v).expect("total embedding")));
            }
            if let Some(path) = out {
                fs::write(path, lines)?;
            }
            println!(
                "route {:?} t = {} attempts = {} degraded = {:?} verify {:?}",
                outcome.route, outcome.t, outcome.attempts, outcome.degraded, verdict
            );
        }
        Cmd::Sweep { config, out } => {
            let cfg = ExperimentConfig::from_json(&fs::read_to_string(config)?)?;
            let rows = sweep(&cfg)?;
            match out {
                Some(p) => write_csv(&rows, fs::File::create(p)?)?,
                None => write_csv(&rows, io::stdout().lock())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
