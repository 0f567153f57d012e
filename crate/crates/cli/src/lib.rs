//! The `tessera` command line: catalog listing, verification, analysis,
//! rendering, projection and digit expansion.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use tessera::analysis::{
    aperiodicity_by_integer_gap, aperiodicity_by_irrationality, dominant_eigen, silver_identity_check,
    single_power_exponent, z_rho_member, Method, DEFAULT_Z_RHO_DEGREE,
};
use tessera::engine::{
    decompose, expansion_from_pieces, expansions, inflate_outward, path, project_to_1d, verify_geometry, Tiling,
    DEFAULT_TILE_CAP,
};
use tessera::numberfield::{FieldElement, SilverIndex, DEFAULT_PRECISION_BITS};
use tessera::render::{pinwheel, render_barcode, render_decorations, render_path, render_points, render_tiling, Style};
use tessera::rules::{catalog, list, load_rule, rule_to_json, validate_measure, Radix, RuleSystem};
use tessera::Error;

pub const REPORT_FORMAT: &str = "tessera-report/1";

const RULE_HELP: &str = "Rules are catalog names (see `tessera list`) or paths to rule JSON files.\n\
Parametric names: silver-1d:<bits> with bits b_1..b_N, b_N = 1 (e.g. silver-1d:111), and\n\
cartesian:<bits>[:<equivalence>] with equivalence translation-only, rotation-only or isometry\n\
(default isometry), e.g. cartesian:11:translation-only.";

#[derive(Parser, Debug)]
#[command(name = "tessera", version, about = "Inflationary tilings as positional number systems", after_help = RULE_HELP)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bits used when printing exact field elements as decimals.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Largest number of tiles or expansions an expansion may produce.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the catalog.
    List,
    /// Check the measure equation, area law and disjointness of a patch.
    Verify {
        rule: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Root type, by name or 1-based position.
        #[arg(long = "type")]
        root: Option<String>,
    },
    /// Spectral data and aperiodicity evidence.
    Analyze {
        rule: String,
        /// Degree bound of the Z[ρ] search.
        #[arg(long, default_value_t = DEFAULT_Z_RHO_DEGREE)]
        bound: u32,
    },
    /// Write an SVG figure.
    Render {
        rule: String,
        #[arg(value_enum)]
        view: View,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Root type, by name or 1-based position.
        #[arg(long = "type")]
        root: Option<String>,
        /// decompose (inside the reference shape) or inflate (magnified).
        #[arg(long, value_enum, default_value_t = ModeArg::Decompose)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compose this many rotated copies about the origin.
        #[arg(long)]
        pinwheel: Option<u32>,
        /// With the curves view, omit the tiles underneath.
        #[arg(long)]
        curves_only: bool,
        /// With the path view: comma-separated piece indices from the root.
        #[arg(long)]
        pieces: Option<String>,
    },
    /// Write the measure-preserving 1-D projection of a 2-D rule.
    Project {
        rule: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print digit expansions as JSON.
    Expand {
        rule: String,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Root type, by name or 1-based position.
        #[arg(long = "type")]
        root: Option<String>,
        /// Comma-separated piece indices; replaces the full expansion tree.
        #[arg(long)]
        pieces: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum View {
    Tiles,
    Barcode,
    Points,
    Curves,
    Path,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Decompose,
    Inflate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub precision_bits: u32,
    pub eps_geo: f64,
    pub tile_cap: u64,
    pub style: Style,
    pub output_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            precision_bits: DEFAULT_PRECISION_BITS,
            eps_geo: tessera::geometry::EPS_GEO,
            tile_cap: DEFAULT_TILE_CAP,
            style: Style::default(),
            output_dir: None,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let cfg: Config =
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.precision_bits == 0 || self.eps_geo.is_nan() || self.eps_geo <= 0.0 || self.tile_cap == 0 {
            return Err(Failure::usage("config values must be positive"));
        }
        self.style.validate().map_err(Failure::from)
    }

    fn out_path(&self, p: &Path) -> PathBuf {
        match &self.output_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }
}

/// Result of one invocation: exit code and the text for each stream.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if matches!(e, Error::CapExceeded { .. }) { 2 } else { 1 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the command line given in `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    ..Outcome::default()
                }
            } else {
                Outcome {
                    code,
                    stderr: text,
                    ..Outcome::default()
                }
            };
        }
    };
    match execute(cli) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn execute(cli: Cli) -> Result<(i32, String), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(p) = cli.precision {
        cfg.precision_bits = p;
    }
    if let Some(c) = cli.cap {
        cfg.tile_cap = c;
    }
    cfg.validate()?;
    match cli.command {
        Command::List => Ok((0, cmd_list())),
        Command::Verify { rule, depth, root } => cmd_verify(&cfg, &rule, depth, root.as_deref()),
        Command::Analyze { rule, bound } => cmd_analyze(&cfg, &rule, bound).map(|s| (0, s)),
        Command::Render {
            rule,
            view,
            depth,
            root,
            mode,
            out,
            pinwheel,
            curves_only,
            pieces,
        } => {
            let opts = RenderOpts {
                view,
                depth,
                root,
                mode,
                pinwheel,
                curves_only,
                pieces,
            };
            cmd_render(&cfg, &rule, &opts, out.as_deref()).map(|s| (0, s))
        }
        Command::Project { rule, out } => cmd_project(&cfg, &rule, out.as_deref()).map(|s| (0, s)),
        Command::Expand {
            rule,
            depth,
            root,
            pieces,
        } => cmd_expand(&cfg, &rule, depth, root.as_deref(), pieces.as_deref()).map(|s| (0, s)),
    }
}

/// A catalog name, or a path to a rule file.
pub fn resolve_rule(arg: &str) -> Result<RuleSystem, Failure> {
    let p = Path::new(arg);
    if arg.ends_with(".json") || (p.is_file() && catalog(arg).is_err()) {
        return Ok(load_rule(p)?);
    }
    Ok(catalog(arg)?)
}

fn root_index(rule: &RuleSystem, root: Option<&str>) -> Result<usize, Failure> {
    match root {
        None => Ok(0),
        Some(name) => rule.type_index(name).ok_or_else(|| {
            let names: Vec<&str> = rule.types.iter().map(|t| t.name.as_str()).collect();
            Failure::usage(format!("unknown type '{name}'; types are {}", names.join(", ")))
        }),
    }
}

fn parse_pieces(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Failure::usage(format!("bad piece index '{t}'")))
        })
        .collect()
}

fn report(command: &str, body: Value) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("format".into(), json!(REPORT_FORMAT));
    obj.insert("command".into(), json!(command));
    if let Value::Object(m) = body {
        obj.extend(m);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("reports serialize");
    s.push('\n');
    s
}

fn planar(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmd_list() -> String {
    let entries = list();
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for e in entries {
        let types = e.types.map_or("-".to_string(), |n| n.to_string());
        out.push_str(&format!(
            "{:<width$}  d={}  radix={}  types={}  {}\n",
            e.name, e.dimension, e.radix, types, e.summary
        ));
    }
    out
}

fn cmd_verify(cfg: &Config, name: &str, depth: u32, root: Option<&str>) -> Result<(i32, String), Failure> {
    let rule = resolve_rule(name)?;
    let root = root_index(&rule, root)?;
    let measure = validate_measure(&rule, cfg.eps_geo)?;
    let tiling = decompose(&rule, root, depth, cfg.tile_cap)?;
    let (geometry, pass) = if rule.has_geometry() {
        let g = verify_geometry(&tiling)?;
        let tol = cfg.eps_geo * depth.max(1) as f64;
        let ok = g.area_deficit <= tol && g.max_overlap <= cfg.eps_geo && g.outside == 0;
        (Some(g), ok)
    } else {
        (None, true)
    };
    let body = json!({
        "rule": rule.name,
        "root": rule.types[root].name,
        "depth": depth,
        "measure_check": {
            "pass": true,
            "exact": measure.exact,
            "digit_count": measure.digit_count,
            "digit_bound": measure.digit_bound,
        },
        "tile_count": tiling.tiles.len(),
        "area_deficit": geometry.as_ref().map(|g| g.area_deficit),
        "max_overlap": geometry.as_ref().map(|g| g.max_overlap),
        "tiles_outside": geometry.as_ref().map(|g| g.outside),
        "pass": pass,
    });
    Ok((if pass { 0 } else { 1 }, report("verify", body)))
}

fn silver_bits(rule: &RuleSystem) -> Option<SilverIndex> {
    let rest = rule
        .name
        .strip_prefix("silver-1d:")
        .or_else(|| rule.name.strip_prefix("cartesian:"))?;
    SilverIndex::parse(rest.split(':').next()?).ok()
}

fn cmd_analyze(cfg: &Config, name: &str, bound: u32) -> Result<String, Failure> {
    let rule = resolve_rule(name)?;
    let u = rule.partition_matrix();
    let eig = dominant_eigen(&u)?;
    let verdict = aperiodicity_by_irrationality(&rule)?;
    let headline = if verdict.method == Method::Inapplicable {
        "inapplicable"
    } else {
        verdict.verdict.as_str()
    };
    let mult = rule.multiplier();
    let generator = FieldElement::generator(&rule.field);
    let probe = match &rule.radix {
        Radix::Real(r) if *r == generator && r.to_f64() > 1.0 => {
            let two = FieldElement::from_int(&rule.field, 2);
            let witness = z_rho_member(&two, bound)?;
            Some(json!({
                "bound": bound,
                "witness": witness.map(|w| w.to_string()),
                "power_of_rho": single_power_exponent(&two, bound),
            }))
        }
        _ => None,
    };
    let gap = aperiodicity_by_integer_gap(&rule, bound)?;
    let identity = match silver_bits(&rule) {
        Some(b) => {
            let r = silver_identity_check(&b)?;
            Some(json!({ "index": r.index, "holds": r.holds(), "chain": r.chain }))
        }
        None => None,
    };
    let body = json!({
        "rule": rule.name,
        "dimension": rule.dimension,
        "types": rule.type_count(),
        "radix": rule.radix.describe(),
        "multiplier": {
            "exact": mult.to_string(),
            "decimal": mult.to_decimal_string(cfg.precision_bits),
            "min_poly": verdict.evidence.min_poly.clone(),
        },
        "partition_matrix": u,
        "eigen": eig,
        "verdict": headline,
        "aperiodicity": verdict,
        "integer_gap": gap,
        "two_in_z_rho": probe,
        "silver_identity": identity,
    });
    Ok(report("analyze", body))
}

struct RenderOpts {
    view: View,
    depth: u32,
    root: Option<String>,
    mode: ModeArg,
    pinwheel: Option<u32>,
    curves_only: bool,
    pieces: Option<String>,
}

fn build_tiling(cfg: &Config, rule: &RuleSystem, root: usize, depth: u32, mode: ModeArg) -> Result<Tiling, Failure> {
    Ok(match mode {
        ModeArg::Decompose => decompose(rule, root, depth, cfg.tile_cap)?,
        ModeArg::Inflate => inflate_outward(rule, root, depth, cfg.tile_cap)?,
    })
}

fn cmd_render(cfg: &Config, name: &str, o: &RenderOpts, out: Option<&Path>) -> Result<String, Failure> {
    let rule = resolve_rule(name)?;
    let root = root_index(&rule, o.root.as_deref())?;
    let style = &cfg.style;
    let mut notes = Vec::new();
    let (svg, items) = match o.view {
        View::Tiles | View::Curves | View::Barcode => {
            let mut t = build_tiling(cfg, &rule, root, o.depth, o.mode)?;
            if let Some(k) = o.pinwheel {
                let total = t.tiles.len() as u64 * k as u64;
                if total > cfg.tile_cap {
                    return Err(Error::CapExceeded {
                        count: total.to_string(),
                        cap: cfg.tile_cap,
                    }
                    .into());
                }
                t = pinwheel(&t, k)?;
            }
            let n = t.tiles.len();
            let svg = match o.view {
                View::Tiles => render_tiling(&t, style)?,
                View::Barcode => render_barcode(&t, style)?,
                _ => {
                    let (svg, w) = render_decorations(&t, style, o.curves_only)?;
                    notes.extend(w);
                    svg
                }
            };
            (svg, n)
        }
        View::Points => {
            if o.depth == 0 {
                return Err(Failure::usage("points need --depth of at least 1"));
            }
            let mut es = Vec::new();
            for d in 1..=o.depth {
                es.extend(expansions(&rule, root, d, cfg.tile_cap)?);
                if es.len() as u64 > cfg.tile_cap {
                    return Err(Error::CapExceeded {
                        count: es.len().to_string(),
                        cap: cfg.tile_cap,
                    }
                    .into());
                }
            }
            (render_points(&es, style)?, es.len())
        }
        View::Path => {
            let pieces = match &o.pieces {
                Some(s) => parse_pieces(s)?,
                None => return Err(Failure::usage("the path view needs --pieces")),
            };
            let e = expansion_from_pieces(&rule, root, &pieces)?;
            let p = path(&e)?;
            let context = build_tiling(cfg, &rule, root, o.depth.min(pieces.len() as u32), ModeArg::Decompose)?;
            (render_path(&p, &context, style)?, pieces.len())
        }
    };
    let mut stdout = String::new();
    for n in &notes {
        stdout.push_str(&format!("warning: {n}\n"));
    }
    match out {
        Some(p) => {
            let p = cfg.out_path(p);
            std::fs::write(&p, svg).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            stdout.push_str(&format!(
                "wrote {} ({} elements from {})\n",
                p.display(),
                items,
                rule.name
            ));
            Ok(stdout)
        }
        None => {
            stdout.push_str(&svg);
            Ok(stdout)
        }
    }
}

fn cmd_project(cfg: &Config, name: &str, out: Option<&Path>) -> Result<String, Failure> {
    let rule = resolve_rule(name)?;
    if rule.dimension != 2 {
        return Err(Failure::usage(format!("rule '{}' is already 1-D", rule.name)));
    }
    let proj = project_to_1d(&rule)?;
    let text = rule_to_json(&proj.rule)?;
    let mut stdout = String::new();
    for w in &proj.warnings {
        stdout.push_str(&format!("warning: {w}\n"));
    }
    match out {
        Some(p) => {
            let p = cfg.out_path(p);
            std::fs::write(&p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            stdout.push_str(&format!("wrote {}\n", p.display()));
            stdout.push_str(&format!(
                "partition matrix of {}:\n{}",
                proj.rule.name,
                proj.rule.partition_matrix()
            ));
            let digits: Vec<String> = proj
                .rule
                .pieces
                .iter()
                .flatten()
                .map(|p| p.digit.expression())
                .collect();
            let mut uniq: Vec<String> = Vec::new();
            for d in digits {
                if !uniq.contains(&d) {
                    uniq.push(d);
                }
            }
            stdout.push_str(&format!("digits: {}\n", uniq.join(", ")));
        }
        None => stdout.push_str(&text),
    }
    Ok(stdout)
}

fn cmd_expand(
    cfg: &Config,
    name: &str,
    depth: u32,
    root: Option<&str>,
    pieces: Option<&str>,
) -> Result<String, Failure> {
    let rule = resolve_rule(name)?;
    let root = root_index(&rule, root)?;
    let es = match pieces {
        Some(s) => vec![expansion_from_pieces(&rule, root, &parse_pieces(s)?)?],
        None => expansions(&rule, root, depth, cfg.tile_cap)?,
    };
    let digits: Vec<Value> = rule.digit_set().into_iter().map(planar).collect();
    let items: Vec<Value> = es
        .iter()
        .map(|e| {
            json!({
                "pieces": e.steps.iter().map(|s| s.piece).collect::<Vec<_>>(),
                "digits": e.steps.iter().map(|s| s.digit).collect::<Vec<_>>(),
                "rot": e.steps.iter().map(|s| s.rot).collect::<Vec<_>>(),
                "conj": e.steps.iter().map(|s| s.conj).collect::<Vec<_>>(),
                "value": planar(e.value()),
            })
        })
        .collect();
    let body = json!({
        "rule": rule.name,
        "root": rule.types[root].name,
        "depth": es.first().map_or(0, |e| e.len()),
        "digit_set": digits,
        "expansions": items,
    });
    Ok(report("expand", body))
}
