use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ammann::format::{emit_atf, parse_atf};
use ammann::geometry::{Placement, Point, Rect, SizeClass};
use ammann::lines::{self, assemble_lines, deflate_family, interval_sequence, interval_word, LineFamily};
use ammann::shadow::{self, extract_shadow, parse_blocks, reconstruct_strip, recover_orientation, ShadowSeq};
use ammann::subshift::{self, build_alphabet, build_grid, index_grid, motifs, periodic_search};
use ammann::svg::{render_svg, SvgOptions};
use ammann::tiling::{
    admissible_pairs, check_almost_proper, check_proper, forbidden_pair_scan, pair_classes, standard_tiling, AxisLine,
    CoarsenPolicy, PairKind,
};
use ammann::words::{classify, equivalent, full_address, generate_patch, symmetric_union, EPWord, SymmetryKind, Word};
use ammann::{PlacedHexagon, RingElem, Tiling};

#[derive(Parser)]
#[command(name = "ammann", version, about = "Ammann hexagon tilings in exact arithmetic")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "AMMANN_THREADS", default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// ATF file; standard input when omitted or `-`.
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a patch.
    Gen(GenArgs),
    /// Refine a patch.
    Refine {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'n', long, default_value_t = 1)]
        times: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Coarsen a patch.
    Coarsen {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Policy::Strict)]
        policy: Policy,
        #[command(flatten)]
        output: Output,
    },
    /// Validate a patch.
    Check(CheckArgs),
    /// Adjacent pair classes of a patch or of a standard tiling.
    Pairs {
        #[command(flatten)]
        input: Input,
        /// Use the level-n standard tiling instead of an input patch.
        #[arg(long)]
        level: Option<i64>,
    },
    /// Region covered by the standard tiling of an eventually periodic word.
    Classify { word: String },
    /// Whether two eventually periodic words give the same tiling up to isometry.
    Equiv {
        a: String,
        b: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        offset: i64,
    },
    /// Address of a hexagon inside its patch.
    Address {
        #[command(flatten)]
        input: Input,
        /// Hexagon index in ATF order; the hexagon at the front end of the
        /// bottom side when omitted.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Edge shadows.
    #[command(subcommand)]
    Shadow(ShadowCmd),
    /// Ammann lines.
    #[command(subcommand)]
    Lines(LinesCmd),
    /// The parallelogram subshift.
    #[command(subcommand)]
    Sft(SftCmd),
    /// Render a patch as SVG.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        decorations: bool,
        #[arg(long)]
        lines: bool,
        /// Overlay the parallelogram grid inside the patch's bounding box.
        #[arg(long)]
        grid: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Standard tiling of this level.
    #[arg(long, conflicts_with_all = ["word", "random"], allow_hyphen_values = true)]
    level: Option<i64>,
    /// Patch `{H}w` of a word over `l` and `s`.
    #[arg(long)]
    word: Option<String>,
    /// Patch of a random word of this length (uses --seed).
    #[arg(long)]
    random: Option<usize>,
    /// Start from a Small hexagon instead of a Large one.
    #[arg(long)]
    small: bool,
    /// Union of mirror copies of the word patch.
    #[arg(long, value_enum, requires = "word")]
    symmetric: Option<Symmetry>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, group = "mode")]
    proper: bool,
    #[arg(long, group = "mode")]
    almost: bool,
    #[arg(long, group = "mode")]
    forbidden: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Strict,
    Trim,
}

#[derive(Clone, Copy, ValueEnum)]
enum Symmetry {
    Two,
    Four,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeflateSide {
    Lower,
    Higher,
}

#[derive(Subcommand)]
enum ShadowCmd {
    /// Shadow of a patch on an axis line such as `y=0` or `x=0`.
    Extract {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        line: String,
    },
    /// Split a shadow into witness blocks.
    Parse {
        shadow: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        unit: i64,
    },
    /// Rebuild the strip of hexagons along a shadow.
    Reconstruct {
        shadow: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        unit: i64,
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Recover arrows from a sequence of unoriented edge symbols such as `0 1 3`.
    Recover { kinds: String },
    /// Two edge sequences that agree on a long stretch but differ in orientation.
    Counterexample {
        #[arg(short, default_value_t = 4)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum LinesCmd {
    /// Families of solid lines: one row `slope offset` per line, then defects.
    Assemble {
        #[command(flatten)]
        input: Input,
    },
    /// Interval lengths between consecutive lines, as a word over `l` and `s`.
    Intervals {
        #[command(flatten)]
        input: Input,
    },
    /// Deflate each family once.
    Deflate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = DeflateSide::Lower)]
        side: DeflateSide,
    },
}

#[derive(Args)]
struct SftSource {
    /// Level of the standard tiling the grid is cut from.
    #[arg(long, default_value_t = 12)]
    level: i64,
    /// Use the periodic lattice tiling of this radius instead.
    #[arg(long)]
    control: Option<i64>,
}

#[derive(Subcommand)]
enum SftCmd {
    /// Size of the cell alphabet.
    Alphabet {
        #[command(flatten)]
        source: SftSource,
    },
    /// Number of allowed n×n motifs.
    Motifs {
        #[command(flatten)]
        source: SftSource,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Search for periodic configurations on small tori.
    Search {
        #[command(flatten)]
        source: SftSource,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Write the alphabet and the 3×3 motifs.
    Export {
        #[command(flatten)]
        source: SftSource,
        #[command(flatten)]
        output: Output,
    },
}

/// `println!` that ignores a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout(), $($t)*);
    }};
}

enum Failure {
    Usage(String),
    Validation(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn invalid(e: impl ToString) -> Failure {
    Failure::Validation(e.to_string())
}

fn read_input(input: &Input) -> Result<String, Failure> {
    match input.input.as_ref().filter(|p| p.as_os_str() != "-") {
        Some(p) => fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(usage)?;
            Ok(s)
        }
    }
}

fn read_tiling(input: &Input) -> Result<Tiling, Failure> {
    parse_atf(&read_input(input)?).map_err(usage)
}

fn write_output(output: &Output, text: &str) -> Outcome {
    match &output.output {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => match io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(usage(e)),
            _ => Ok(()),
        },
    }
}

fn word(s: &str) -> Result<Word, Failure> {
    s.parse().map_err(usage)
}

fn ep_word(s: &str) -> Result<EPWord, Failure> {
    s.parse().map_err(usage)
}

fn gen(args: &GenArgs, seed: u64) -> Outcome {
    let base = PlacedHexagon::canonical(if args.small { SizeClass::Small } else { SizeClass::Large });
    let t = if let Some(level) = args.level {
        standard_tiling(level, &Placement::identity()).map_err(invalid)?
    } else {
        let w = match (&args.word, args.random) {
            (Some(w), _) => word(w)?,
            (None, Some(n)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let letters: String = (0..n).map(|_| if rng.gen_bool(0.5) { 'l' } else { 's' }).collect();
                word(&letters)?
            }
            (None, None) => return Err(usage("one of --level, --word or --random is required")),
        };
        match args.symmetric {
            Some(Symmetry::Two) => symmetric_union(SymmetryKind::Two, &w),
            Some(Symmetry::Four) => symmetric_union(SymmetryKind::Four, &w),
            None => generate_patch(&base, &w).map_err(invalid)?,
        }
    };
    write_output(&args.output, &emit_atf(&t))
}

fn check(args: &CheckArgs) -> Outcome {
    let t = read_tiling(&args.input)?;
    let mut lines = Vec::new();
    if !t.check_disjoint() {
        for (a, b) in t.overlapping_pairs() {
            lines.push(format!("overlap {a} {b}"));
        }
    }
    if args.forbidden {
        for f in forbidden_pair_scan(&t) {
            lines.push(format!("forbidden {} {} {} {}", f.a, f.b, f.start, f.end));
        }
    } else {
        let report = if args.almost { check_almost_proper(&t) } else { check_proper(&t) };
        for v in &report.violations {
            lines.push(format!("{:?} {} {} {} {}", v.kind, v.a, v.b, v.start, v.end).to_lowercase());
        }
    }
    for l in &lines {
        out!("{l}");
    }
    if lines.is_empty() {
        out!("ok {} hexagons", t.len());
        Ok(())
    } else {
        Err(invalid(format!("{} violations", lines.len())))
    }
}

fn pairs(input: &Input, level: Option<i64>) -> Outcome {
    let classes = match level {
        Some(n) => admissible_pairs(n),
        None => pair_classes(&read_tiling(input)?),
    };
    let count = |k: PairKind| classes.iter().filter(|c| c.kind() == k).count();
    out!(
        "SS {} LL {} SL {} total {}",
        count(PairKind::SmallSmall),
        count(PairKind::LargeLarge),
        count(PairKind::SmallLarge),
        classes.len()
    );
    for c in &classes {
        out!("{}{} {}", c.first.letter(), c.second.letter(), c.relative);
    }
    Ok(())
}

/// The hexagon at the front end of the patch's bottom side, the
/// bottom-left corner when the patch is drawn with its back on the right.
fn bottom_corner(t: &Tiling) -> usize {
    let bb = t.bbox();
    let corner = t
        .hexes()
        .iter()
        .flat_map(|h| h.vertices())
        .filter(|q| q.y == bb.min.y)
        .max_by(|a, b| a.x.cmp_value(&b.x))
        .expect("patch is not empty");
    t.hexes().iter().position(|h| h.vertices().contains(&corner)).unwrap_or(0)
}

fn address(input: &Input, index: Option<usize>) -> Outcome {
    let t = read_tiling(input)?;
    let i = index.unwrap_or_else(|| bottom_corner(&t));
    let h = t.hexes().get(i).ok_or_else(|| usage(format!("--index {i} out of range")))?;
    let w = full_address(&t, h).map_err(invalid)?;
    out!("{w}");
    Ok(())
}

fn parse_line(s: &str) -> Result<AxisLine, Failure> {
    let (axis, value) = s.split_once('=').ok_or_else(|| usage("--line expects `x=<ring>` or `y=<ring>`"))?;
    let coord: RingElem = value.parse().map_err(usage)?;
    match axis.trim() {
        "x" => Ok(AxisLine { vertical: true, coord }),
        "y" => Ok(AxisLine { vertical: false, coord }),
        other => Err(usage(format!("--line: unknown axis {other:?}"))),
    }
}

fn shadow_seq(s: &str, unit: i64) -> Result<ShadowSeq, Failure> {
    let parsed: ShadowSeq = s.parse().map_err(usage)?;
    ShadowSeq::from_tokens(&parsed.tokens(), unit, Placement::identity(), RingElem::zero()).map_err(invalid)
}

fn shadow_cmd(cmd: &ShadowCmd) -> Outcome {
    match cmd {
        ShadowCmd::Extract { input, line } => {
            let t = read_tiling(input)?;
            let s = extract_shadow(&t, &parse_line(line)?).map_err(invalid)?;
            out!("{s}");
        }
        ShadowCmd::Parse { shadow, unit } => {
            let s = shadow_seq(shadow, *unit)?;
            for b in parse_blocks(&s).map_err(invalid)? {
                let toks: Vec<String> =
                    b.tokens().iter().map(|&(c, f)| format!("{}{c}", if f { '>' } else { '<' })).collect();
                out!("{:?}{} {}", b.witness, if b.reversed { " reversed" } else { "" }, toks.join(" "));
            }
        }
        ShadowCmd::Reconstruct { shadow, unit, depth, output } => {
            let s = shadow_seq(shadow, *unit)?;
            let t = reconstruct_strip(&s, *depth).map_err(invalid)?;
            write_output(output, &emit_atf(&t))?;
        }
        ShadowCmd::Recover { kinds } => {
            let k: Vec<u8> = kinds
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse().map_err(|_| usage(format!("bad edge symbol {x:?}"))))
                .collect::<Result<_, _>>()?;
            out!("{}", recover_orientation(&k).map_err(invalid)?);
        }
        ShadowCmd::Counterexample { n } => {
            let (a, b, shared) = shadow::counterexample(*n);
            out!("{a}\n{b}\n{shared}");
        }
    }
    Ok(())
}

fn families(input: &Input) -> Result<Vec<LineFamily>, Failure> {
    let t = read_tiling(input)?;
    let a = assemble_lines(&t).map_err(invalid)?;
    if !a.defects.is_empty() {
        for d in &a.defects {
            out!("defect {} {}", d.slope, d.point);
        }
        return Err(invalid(format!("{} line defects", a.defects.len())));
    }
    Ok(a.families)
}

fn lines_cmd(cmd: &LinesCmd) -> Outcome {
    match cmd {
        LinesCmd::Assemble { input } => {
            for f in families(input)? {
                for l in &f.lines {
                    out!("{} {}", f.slope, l.offset);
                }
            }
        }
        LinesCmd::Intervals { input } => {
            for f in families(input)? {
                let iv = interval_sequence(&f).map_err(invalid)?;
                match interval_word(&iv) {
                    Some(w) => out!("{} {}", f.slope, w.word),
                    None => return Err(invalid(format!("intervals on slope {} take more than two values", f.slope))),
                }
            }
        }
        LinesCmd::Deflate { input, side } => {
            let side = match side {
                DeflateSide::Lower => lines::Side::Lower,
                DeflateSide::Higher => lines::Side::Higher,
            };
            for f in families(input)? {
                let d = deflate_family(&f, side).map_err(invalid)?;
                for l in &d.lines {
                    out!("{} {}", d.slope, l.offset);
                }
            }
        }
    }
    Ok(())
}

fn sft_source(src: &SftSource) -> Result<(subshift::Grid, subshift::Alphabet), Failure> {
    let grid = match src.control {
        Some(radius) => {
            let (t, r) = subshift::control_patch(radius);
            subshift::build_grid_unchecked(&t, &r).map_err(invalid)?
        }
        None => {
            let t = standard_tiling(src.level, &Placement::identity()).map_err(invalid)?;
            let m = lines::interior_margin(&t);
            let top = Point::new(&RingElem::psi_pow(3) - &m, &RingElem::one() - &m);
            build_grid(&t, &Rect::from_corners(&Point::new(m.clone(), m.clone()), &top)).map_err(invalid)?
        }
    };
    let a = build_alphabet([&grid]);
    Ok((grid, a))
}

fn sft_cmd(cmd: &SftCmd) -> Outcome {
    match cmd {
        SftCmd::Alphabet { source } => {
            let (g, a) = sft_source(source)?;
            out!("letters {} cells {}", a.len(), g.cell_count());
        }
        SftCmd::Motifs { source, window } => {
            if *window == 0 {
                return Err(usage("--window must be at least 1"));
            }
            let (g, a) = sft_source(source)?;
            out!("motifs {}", motifs(&index_grid(&g, &a), *window).len());
        }
        SftCmd::Search { source, max_m, max_n } => {
            if *max_m == 0 || *max_n == 0 {
                return Err(usage("torus bounds must be at least 1"));
            }
            let (g, a) = sft_source(source)?;
            let m3 = motifs(&index_grid(&g, &a), 3);
            match periodic_search(&m3, *max_m, *max_n) {
                Some(t) => {
                    out!("torus {}x{}", t.rows, t.cols);
                    for row in &t.cells {
                        let r: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                        out!("{}", r.join(" "));
                    }
                }
                None => out!("none up to {max_m}x{max_n}"),
            }
        }
        SftCmd::Export { source, output } => {
            let (g, a) = sft_source(source)?;
            let m3 = motifs(&index_grid(&g, &a), 3);
            write_output(output, &subshift::sft_string(&a, &m3))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Gen(args) => gen(args, cli.seed),
        Command::Refine { input, times, output } => {
            let t = read_tiling(input)?;
            write_output(output, &emit_atf(&t.refine_n(*times)))
        }
        Command::Coarsen { input, policy, output } => {
            let t = read_tiling(input)?;
            let p = match policy {
                Policy::Strict => CoarsenPolicy::Strict,
                Policy::Trim => CoarsenPolicy::TrimBoundary,
            };
            write_output(output, &emit_atf(&t.coarsen(p).map_err(invalid)?))
        }
        Command::Check(args) => check(args),
        Command::Pairs { input, level } => pairs(input, *level),
        Command::Classify { word } => {
            out!("{}", classify(&ep_word(word)?));
            Ok(())
        }
        Command::Equiv { a, b, offset } => {
            if equivalent(&ep_word(a)?, &ep_word(b)?, *offset) {
                out!("equivalent");
                Ok(())
            } else {
                out!("not equivalent");
                Err(invalid("words are not equivalent"))
            }
        }
        Command::Address { input, index } => address(input, *index),
        Command::Shadow(cmd) => shadow_cmd(cmd),
        Command::Lines(cmd) => lines_cmd(cmd),
        Command::Sft(cmd) => sft_cmd(cmd),
        Command::Render { input, decorations, lines, grid, output } => {
            let t = read_tiling(input)?;
            let grid = grid.then(|| t.bbox());
            let opts = SvgOptions { decorations: *decorations, lines: *lines, grid };
            write_output(output, &render_svg(&t, &opts))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
