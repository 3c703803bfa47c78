use std::fs;
use std::io::{self, BufWriter, Cursor, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ftlabel::archive::{self, ArchiveError, ArchiveReader, BuildConfig, Fault, Labels, QueryError, QueryTrace, Scheme};
use ftlabel::bits::{Codec, Widths};
use ftlabel::gen;
use ftlabel::graph::{component_ids, mask_of, Graph, Vertex};
use ftlabel::vft2::Branch;
use ftlabel::vftf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "ftlb", version, about = "Fault-tolerant connectivity labels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build labels for a graph and write an archive.
    Build(BuildArgs),
    /// Answer one connectivity query from an archive.
    Query(QueryArgs),
    /// Compare decoded answers with a brute-force oracle.
    Verify(VerifyArgs),
    /// Label sizes over a graph family, as CSV.
    Stats(StatsArgs),
    /// Same as `stats`.
    Bench(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long, value_parser = parse_scheme)]
    scheme: Scheme,
    /// Fault budget; required for fvft.
    #[arg(long = "f")]
    f: Option<u32>,
    #[arg(long, env = "FTLB_SEED")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "off")]
    certificate: OnOff,
}

impl SchemeArgs {
    fn config(&self) -> BuildConfig {
        BuildConfig {
            scheme: self.scheme,
            f: self.f,
            seed: self.seed,
            certificate: matches!(self.certificate, OnOff::On),
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    u: Vertex,
    #[arg(long)]
    v: Vertex,
    /// Failed vertices, or edges written `a-b` for eft archives.
    #[arg(long, value_delimiter = ',')]
    fail: Vec<Fault>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    #[arg(long)]
    samples: Option<usize>,
    /// Largest n accepted by --exhaustive.
    #[arg(long, default_value_t = 25)]
    cap: usize,
    /// Flips one byte inside this vertex's record before decoding.
    #[arg(long, hide = true)]
    corrupt: Option<Vertex>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "1vft")]
    scheme: Scheme,
    #[arg(long = "f")]
    f: Option<u32>,
    #[arg(long, default_value = "gnp")]
    family: String,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    n_list: Vec<usize>,
    #[arg(long, env = "FTLB_SEED", default_value_t = 1)]
    seed: u64,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

/// An error with its exit status.
struct Fail(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(2, e.into())
    }
}

fn fail(code: u8, e: impl Into<anyhow::Error>) -> Fail {
    Fail(code, e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Build(a) => build(a),
        Cmd::Query(a) => query(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Stats(a) | Cmd::Bench(a) => stats(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, e)) => {
            eprintln!("ftlb: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn read_graph(path: &PathBuf) -> Result<Graph, Fail> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse(&text).with_context(|| format!("parsing {}", path.display())).map_err(|e| fail(2, e))
}

fn build_labels(g: &Graph, a: &SchemeArgs) -> Result<Labels, Fail> {
    archive::build(g, &a.config()).map_err(|e| fail(3, e))
}

fn build(a: BuildArgs) -> Result<u8, Fail> {
    let g = read_graph(&a.input)?;
    let t = Instant::now();
    let labels = build_labels(&g, &a.scheme)?;
    let ms = t.elapsed().as_secs_f64() * 1e3;
    let mut out = BufWriter::new(fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?);
    labels.write_archive(matches!(a.scheme.certificate, OnOff::On), &mut out)?;
    out.flush()?;
    let (max, mean) = size_summary(&labels);
    println!(
        "n={} m={} scheme={} max_bits={} mean_bits={:.1} build_ms={:.1}",
        g.n(),
        g.m(),
        labels.scheme(),
        max,
        mean,
        ms
    );
    Ok(0)
}

fn size_summary(l: &Labels) -> (usize, f64) {
    let bits: Vec<usize> = (0..l.n() as Vertex).map(|v| l.label_bits(v)).collect();
    let max = bits.iter().copied().max().unwrap_or(0);
    (max, bits.iter().sum::<usize>() as f64 / bits.len().max(1) as f64)
}

fn query_code(e: QueryError) -> Fail {
    let code = match e {
        QueryError::Budget { .. } | QueryError::Unsupported(..) => 3,
        QueryError::Archive(ArchiveError::Io(_)) => 2,
        _ => 4,
    };
    fail(code, e)
}

fn query(a: QueryArgs) -> Result<u8, Fail> {
    let file = fs::File::open(&a.labels).with_context(|| format!("opening {}", a.labels.display()))?;
    let mut ar = ArchiveReader::open(io::BufReader::new(file)).map_err(|e| fail(4, e))?;
    let ok = archive::query(&mut ar, a.u, a.v, &a.fail).map_err(query_code)?;
    println!("{}", if ok { "connected" } else { "disconnected" });
    Ok(if ok { 0 } else { 1 })
}

/// Queries grouped by fault set, so the oracle runs once per set.
enum FaultSet {
    Vertices(Vec<Vertex>),
    Edges(Vec<(Vertex, Vertex)>),
}

impl FaultSet {
    fn faults(&self) -> Vec<Fault> {
        match self {
            FaultSet::Vertices(v) => v.iter().map(|&x| Fault::Vertex(x)).collect(),
            FaultSet::Edges(e) => e.iter().map(|&(a, b)| Fault::Edge(a, b)).collect(),
        }
    }

    fn components(&self, g: &Graph) -> Vec<Option<Vertex>> {
        match self {
            FaultSet::Vertices(v) => component_ids(g, &mask_of(g.n(), v)),
            FaultSet::Edges(e) => {
                let h = g.edge_subgraph(g.edges().filter(|x| !e.contains(x)));
                component_ids(&h, &vec![false; g.n()])
            }
        }
    }
}

fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![(vec![], 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for (s, start) in frontier {
            for (i, &item) in items.iter().enumerate().skip(start) {
                let mut t: Vec<T> = s.clone();
                t.push(item);
                out.push(t.clone());
                next.push((t, i + 1));
            }
        }
        frontier = next;
    }
    out
}

#[derive(Default)]
struct Tally {
    queries: u64,
    mismatches: u64,
}

fn verify(a: VerifyArgs) -> Result<u8, Fail> {
    let g = read_graph(&a.input)?;
    let n = g.n();
    let scheme = a.scheme.scheme;
    if a.exhaustive == a.samples.is_some() {
        return Err(fail(3, anyhow::anyhow!("pass exactly one of --exhaustive and --samples")));
    }
    if a.exhaustive && n > a.cap {
        return Err(fail(3, anyhow::anyhow!("--exhaustive refused: n = {n} exceeds cap {}", a.cap)));
    }
    let labels = build_labels(&g, &a.scheme)?;
    let mut bytes = labels.to_archive_bytes(matches!(a.scheme.certificate, OnOff::On));
    if let Some(v) = a.corrupt {
        corrupt(&mut bytes, v)?;
    }
    let mut ar = ArchiveReader::open(Cursor::new(bytes)).map_err(|e| fail(4, e))?;
    let budget = scheme.budget(a.scheme.f.unwrap_or(0));
    let vs: Vec<Vertex> = (0..n as Vertex).collect();
    let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(a.scheme.seed.unwrap_or(0));

    let sets: Vec<(FaultSet, Vec<(Vertex, Vertex)>)> = if a.exhaustive {
        let all_pairs: Vec<(Vertex, Vertex)> = if scheme == Scheme::Ss2 {
            vs.iter().map(|&u| (u, u)).collect()
        } else {
            vs.iter().flat_map(|&u| vs.iter().map(move |&v| (u, v))).filter(|(u, v)| u <= v).collect()
        };
        let fsets: Vec<FaultSet> = match budget {
            Some(k) => subsets(&vs, k).into_iter().map(FaultSet::Vertices).collect(),
            None => subsets(&edges, 2).into_iter().map(FaultSet::Edges).collect(),
        };
        fsets.into_iter().map(|f| (f, all_pairs.clone())).collect()
    } else {
        let total = a.samples.unwrap();
        (0..total)
            .map(|_| {
                let u = rng.gen_range(0..n as Vertex);
                let v = rng.gen_range(0..n as Vertex);
                let f = match budget {
                    Some(k) => {
                        let mut x: Vec<Vertex> = (0..rng.gen_range(0..=k)).map(|_| rng.gen_range(0..n as Vertex)).collect();
                        x.sort_unstable();
                        x.dedup();
                        FaultSet::Vertices(x)
                    }
                    None => {
                        let c = rng.gen_range(0..=4.min(edges.len()));
                        let mut x: Vec<_> = (0..c).map(|_| edges[rng.gen_range(0..edges.len())]).collect();
                        x.sort_unstable();
                        x.dedup();
                        FaultSet::Edges(x)
                    }
                };
                (f, vec![(u, v)])
            })
            .collect()
    };

    let mut trace = QueryTrace::default();
    let mut tally = Tally::default();
    for (fs, pairs) in &sets {
        let comp = fs.components(&g);
        let faults = fs.faults();
        for &(u, v) in pairs {
            let (u, v) = match (scheme, &*ar.get(u).map_err(|e| fail(4, e))?) {
                (Scheme::Ss2, archive::Record::Ss2(l)) => (u, l.body.owner().root),
                _ => (u, v),
            };
            let want = comp[u as usize].is_some() && comp[u as usize] == comp[v as usize];
            let got = archive::query_traced(&mut ar, u, v, &faults, &mut trace).map_err(query_code)?;
            tally.queries += 1;
            tally.mismatches += (got != want) as u64;
        }
    }
    let rate = tally.mismatches as f64 / tally.queries.max(1) as f64;
    println!("scheme={scheme} n={n} m={} queries={} mismatches={} error_rate={rate:.3e}", g.m(), tally.queries, tally.mismatches);
    match scheme {
        Scheme::Vft2 => {
            for b in Branch::ALL {
                println!("coverage {b:?}={}", trace.vft2.get(b));
            }
        }
        Scheme::Fvft => println!("coverage exact={} eft={} recursions={}", trace.fvft_exact, trace.fvft_eft, trace.fvft.recursions),
        _ => {}
    }
    Ok(if tally.mismatches > 0 && !scheme.randomized() { 1 } else { 0 })
}

/// Flips the first payload byte of one record.
fn corrupt(bytes: &mut [u8], v: Vertex) -> Result<(), Fail> {
    let ar = ArchiveReader::open(Cursor::new(&*bytes)).map_err(|e| fail(4, e))?;
    let (off, _) = ar.record_span(v).map_err(|e| fail(4, e))?;
    bytes[off as usize + 4] ^= 0xFF;
    Ok(())
}

fn stats(a: StatsArgs) -> Result<u8, Fail> {
    if a.family.is_empty() {
        return Err(fail(3, anyhow::anyhow!("empty family")));
    }
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record([
        "scheme", "family", "n", "m", "max_bits", "mean_bits", "bits_per_log2n", "bits_per_log3n", "predicted_ratio", "build_ms", "eft_bits", "edge_bits", "nested_bits",
    ])?;
    let mut points = Vec::new();
    for &n in &a.n_list {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ n as u64);
        let g = gen::family(&a.family, n, &mut rng).ok_or_else(|| fail(3, anyhow::anyhow!("unknown family {:?}", a.family)))?;
        let cfg = BuildConfig { scheme: a.scheme, f: a.f, seed: Some(a.seed), certificate: false };
        let t = Instant::now();
        let labels = archive::build(&g, &cfg).map_err(|e| fail(3, e))?;
        let ms = t.elapsed().as_secs_f64() * 1e3;
        let (max, mean) = size_summary(&labels);
        let l2 = (g.n() as f64).log2();
        let (ratio, parts) = match &labels {
            Labels::Fvft { f, enc } => {
                let c = vftf::eft_constant(enc, g.n());
                let w = Widths::new(g.n());
                let top = enc.labels.iter().max_by_key(|l| l.bit_len(&w)).unwrap();
                let b = vftf::size_breakdown(top, &w);
                (
                    format!("{:.4}", max as f64 / vftf::predicted_size_bound(*f, g.n(), c)),
                    [b.eft, b.edges, b.nested + b.base].map(|x| x.to_string()),
                )
            }
            _ => (String::new(), Default::default()),
        };
        points.push(((g.n() as f64).ln(), (max as f64).ln()));
        out.write_record([
            a.scheme.to_string(),
            a.family.clone(),
            g.n().to_string(),
            g.m().to_string(),
            max.to_string(),
            format!("{mean:.1}"),
            format!("{:.3}", max as f64 / l2.powi(2)),
            format!("{:.3}", max as f64 / l2.powi(3)),
            ratio,
            format!("{ms:.1}"),
            parts[0].clone(),
            parts[1].clone(),
            parts[2].clone(),
        ])?;
    }
    out.flush()?;
    if points.len() >= 2 {
        eprintln!("log-log slope of max_bits vs n: {:.3}", slope(&points));
    }
    Ok(0)
}

fn slope(p: &[(f64, f64)]) -> f64 {
    let k = p.len() as f64;
    let (mx, my) = (p.iter().map(|x| x.0).sum::<f64>() / k, p.iter().map(|x| x.1).sum::<f64>() / k);
    let num: f64 = p.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = p.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}
