use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use skelshape::apply::{apply_character, complete_shape};
use skelshape::generalize::{generalize_set, Grts};
use skelshape::harness::synth::{kimia_like, tari_like};
use skelshape::harness::{build_gallery, cross_classify, evaluate, load_dataset, retrieve, Config, Entry, Layout};
use skelshape::metric::MatchParams;
use skelshape::osb::match_shapes;
use skelshape::raster::{load_silhouette, BinaryShape};
use skelshape::render;
use skelshape::rts::{analyze, graph_json, Rts};
use skelshape::{Error, Result};

#[derive(Parser)]
#[command(name = "skelshape", version, about = "Skeleton-based shape representation, matching and generalization")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// TOML file with [load], [rts], [match] and [datasets.*] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Config dataset section whose weights apply (e.g. tari56, kimia99).
    #[arg(long, global = true)]
    dataset: Option<String>,
    /// Gray level at or above which a pixel is foreground.
    #[arg(long, global = true)]
    threshold: Option<u8>,
    /// Spur pruning significance relative to the maximal radius.
    #[arg(long, global = true)]
    prune_significance: Option<f64>,
    /// Weight of the mass-length term in the endpoint distance.
    #[arg(long, global = true)]
    beta1: Option<f64>,
    /// Weight of the spine-alignment term in the endpoint distance.
    #[arg(long, global = true)]
    beta2: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Tari56,
    Kimia99,
    FlatLabeled,
}

impl From<LayoutArg> for Layout {
    fn from(l: LayoutArg) -> Layout {
        match l {
            LayoutArg::Tari56 => Layout::Tari56,
            LayoutArg::Kimia99 => Layout::Kimia99,
            LayoutArg::FlatLabeled => Layout::FlatLabeled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Tari,
    Kimia,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the representation of one silhouette.
    Build {
        image: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the skeleton graph and tree as JSON.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Also write an SVG of the end paths and spine axis.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Match two shapes (images or representation JSON).
    Match {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank a dataset by distance to a query shape.
    Retrieve {
        query: PathBuf,
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "tari56")]
        layout: LayoutArg,
        #[arg(short, default_value_t = 10)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Leave-in retrieval evaluation of a labelled dataset.
    Eval {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "tari56")]
        layout: LayoutArg,
        /// JSON report path.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// SVG grid of the top results per query.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Generalize same-class shapes into one prototype.
    Generalize {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "tari56")]
        layout: LayoutArg,
        /// Only use samples with this label.
        #[arg(long)]
        label: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// SVG of the merge tree.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Assign each query to the nearest class prototype.
    Classify {
        queries: PathBuf,
        #[arg(long, value_enum, default_value = "kimia99")]
        query_layout: LayoutArg,
        /// Prototype JSON files; the file stem is the class label.
        #[arg(required = true)]
        prototypes: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Project a prototype onto an instance; writes overlay.png, apply.svg and report.json.
    Apply {
        grts: PathBuf,
        image: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Draw in prototype parts missing from an instance.
    Complete {
        grts: PathBuf,
        image: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a procedural stand-in dataset as PNG files.
    Synth {
        kind: SynthKind,
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

struct Ctx {
    config: Config,
    params: MatchParams,
}

impl Ctx {
    fn new(g: &Global) -> Result<Ctx> {
        let mut config = match &g.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(t) = g.threshold {
            config.load.threshold = t;
        }
        if let Some(s) = g.prune_significance {
            config.rts.prune_significance = s;
        }
        let mut params = match &g.dataset {
            Some(d) => config.params_for(d),
            None => config.matching,
        };
        params.beta1 = g.beta1.unwrap_or(params.beta1);
        params.beta2 = g.beta2.unwrap_or(params.beta2);
        Ok(Ctx { config, params })
    }

    fn image(&self, path: &Path) -> Result<BinaryShape> {
        let mut shape = load_silhouette(&fs::read(path)?, &self.config.load)?;
        shape.set_source_id(path.file_stem().and_then(|s| s.to_str()).unwrap_or_default());
        Ok(shape)
    }

    /// Reads representation JSON, or builds it from an image.
    fn rts(&self, path: &Path) -> Result<Rts> {
        if is_json(path) {
            Rts::from_json(&fs::read_to_string(path)?)
        } else {
            Ok(analyze(&self.image(path)?, &self.config.rts)?.rts)
        }
    }

    fn gallery(&self, dir: &Path, layout: LayoutArg) -> Result<Vec<Entry>> {
        let ds = load_dataset(dir, layout.into(), &self.config.load)?;
        for (p, e) in &ds.errors {
            log::warn!("{}: {e}", p.display());
        }
        let (entries, errors) = build_gallery(&ds, &self.config.rts);
        for (id, e) in errors {
            log::warn!("{id}: {e}");
        }
        Ok(entries)
    }
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => write_file(p, text),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn write_file(p: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(fs::write(p, contents)?)
}

fn save_png(img: &image::RgbaImage, p: &Path) -> Result<()> {
    img.save(p).map_err(|e| Error::Decode(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::new(&cli.global)?;
    match cli.cmd {
        Cmd::Build { image, output, graph, svg } => {
            let shape = ctx.image(&image)?;
            let a = analyze(&shape, &ctx.config.rts)?;
            if let Some(p) = graph {
                write_file(&p, serde_json::to_string_pretty(&graph_json(&a))?)?;
            }
            if let Some(p) = svg {
                write_file(&p, render::rts_svg(&shape, &a.rts))?;
            }
            emit(&a.rts, output.as_deref())
        }
        Cmd::Match { a, b, output } => {
            let m = match_shapes(&ctx.rts(&a)?, &ctx.rts(&b)?, &ctx.params)?;
            emit(&m, output.as_deref())
        }
        Cmd::Retrieve { query, dir, layout, k, output } => {
            let gallery = ctx.gallery(&dir, layout)?;
            let mut ranked = retrieve(&ctx.rts(&query)?, &gallery, &ctx.params)?;
            ranked.truncate(k);
            emit(&ranked, output.as_deref())
        }
        Cmd::Eval { dir, layout, output, svg } => {
            let gallery = ctx.gallery(&dir, layout)?;
            let report = evaluate(&gallery, &ctx.params)?;
            eprintln!("{}", report.table_row("ours"));
            if let Some(p) = svg {
                let k = 2 * gallery.iter().filter(|e| e.label == gallery[0].label).count();
                write_file(&p, render::retrieval_grid_svg(&report, k))?;
            }
            match output {
                Some(p) => emit(&report, Some(&p)),
                None => emit(&report.with_self, None),
            }
        }
        Cmd::Generalize { dir, layout, label, output, svg } => {
            let gallery = ctx.gallery(&dir, layout)?;
            let set: Vec<(String, Rts)> = gallery
                .into_iter()
                .filter(|e| label.as_deref().is_none_or(|l| e.label == l))
                .map(|e| (e.id, e.rts))
                .collect();
            let g = generalize_set(&set, &ctx.params)?;
            if let Some(p) = svg {
                write_file(&p, render::merge_tree_svg(&g.merge_tree))?;
            }
            emit(&g, output.as_deref())
        }
        Cmd::Classify { queries, query_layout, prototypes, output } => {
            let q = ctx.gallery(&queries, query_layout)?;
            let protos = prototypes
                .iter()
                .map(|p| {
                    let label = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                    Ok((label, Grts::from_json(&fs::read_to_string(p)?)?))
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&cross_classify(&q, &protos, &ctx.params)?, output.as_deref())
        }
        Cmd::Apply { grts, image, output } => {
            let g = Grts::from_json(&fs::read_to_string(&grts)?)?;
            let shape = ctx.image(&image)?;
            let x = analyze(&shape, &ctx.config.rts)?.rts;
            let cm = apply_character(&g, &x, shape.width(), shape.height(), &ctx.params)?;
            fs::create_dir_all(&output)?;
            save_png(&render::overlay_png(&shape, &cm.mask, [40, 110, 220], 0.55), &output.join("overlay.png"))?;
            write_file(&output.join("apply.svg"), render::apply_svg(&shape, &g, &x, &cm))?;
            emit(&cm, Some(&output.join("report.json")))
        }
        Cmd::Complete { grts, image, output } => {
            let g = Grts::from_json(&fs::read_to_string(&grts)?)?;
            let shape = ctx.image(&image)?;
            let x = analyze(&shape, &ctx.config.rts)?.rts;
            let c = complete_shape(&g, &x, &shape, &ctx.params)?;
            fs::create_dir_all(&output)?;
            save_png(&render::overlay_png(&shape, &c.mask, [220, 60, 40], 0.55), &output.join("completed.png"))?;
            write_file(&output.join("complete.svg"), render::completion_svg(&shape, &c))?;
            emit(&c, Some(&output.join("report.json")))
        }
        Cmd::Synth { kind, dir, seed } => {
            let (ds, layout) = match kind {
                SynthKind::Tari => (tari_like(seed), Layout::Tari56),
                SynthKind::Kimia => (kimia_like(seed), Layout::Kimia99),
            };
            ds.save(&dir, layout)?;
            eprintln!("wrote {} shapes to {}", ds.samples.len(), dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
