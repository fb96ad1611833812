//! Argument parsing and the six subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use qfractal_core::basin::{RegionMap, RegionParams, Window, DEFAULT_MAX_ITER, DEFAULT_TOL};
use qfractal_core::cycles::{critical_purity, cycle_name, find_all_cycles, DEFAULT_GRID};
use qfractal_core::fractal::{
    dimension_at_purity, purity_grid, purity_sweep, CountOptions, SweepResult, WindowPolicy,
};
use qfractal_core::inverse::{julia_sample, RNG_NAME, Z_C2};
use qfractal_core::{bloch::pure_to_complex, ExtComplex};

use crate::backward::{ensemble, run_ensemble, summarize};
use crate::config::{
    load_config_file, Band, FilterArg, PolicyArg, Resolution, Resolver, RunConfig, Scales, StrategyArg, SweepRange,
    WindowArg,
};
use crate::error::{CliError, Result};
use crate::output::{real, sibling, write_atomic, write_ppm, ColorTable};
use crate::par::Parallel;
use crate::trace::{alignment, overlay_image, region_image, run_trace, Family, TraceSettings};

#[derive(Parser, Debug)]
#[command(name = "qfractal", version, about = "Basins, fractal borders and backward orbits of the iterated qubit map")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Purity of the projected sphere, in (0.5, 1]
    #[arg(long, global = true)]
    pub purity: Option<f64>,
    /// Projection-plane window x0,x1,y0,y1
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<WindowArg>,
    /// Raster size WxH
    #[arg(long, global = true)]
    pub resolution: Option<Resolution>,
    /// Convergence radius of orbit classification
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration cap of orbit classification
    #[arg(long, global = true)]
    pub max_iter: Option<u32>,
    /// Box sizes in pixels, comma separated, or `auto`
    #[arg(long, global = true)]
    pub scales: Option<Scales>,
    /// Master seed of the random branch strategy
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Inverse-iteration depth
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Branch strategy: plus, minus or random (default: all three)
    #[arg(long, global = true)]
    pub strategy: Option<StrategyArg>,
    /// Worker threads (default: logical cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Render the convergence regions of a purity sphere or of the invariant plane
    Regions {
        /// Render the (u, 0, w) plane instead of a sphere
        #[arg(long)]
        plane: bool,
    },
    /// Box-counting dimension of the region border, at one purity or over a sweep
    Dimension {
        /// Purity sweep start,end,step (ignored when --purity is set)
        #[arg(long)]
        sweep: Option<SweepRange>,
        /// Sweep window: `axis` follows the border point on the projected plane, `fixed` uses --window
        #[arg(long)]
        window_policy: Option<PolicyArg>,
        /// Half-width of the `axis` windows
        #[arg(long)]
        half_width: Option<f64>,
        /// Average box counts over four grid offsets
        #[arg(long)]
        offset_average: bool,
        /// Border type: any, blue-blue or red-blue
        #[arg(long)]
        filter: Option<FilterArg>,
    },
    /// Fixed points and 2-cycles with their stability
    Cycles {
        /// Seeds per axis of the Newton search lattice
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Purity along backward orbits of states near the Julia set
    Backward {
        /// Backward steps per orbit
        #[arg(long)]
        steps: Option<usize>,
        /// Purity the Julia points are shrunk to
        #[arg(long)]
        start_purity: Option<f64>,
    },
    /// Pre-image clouds of Julia-vicinity and plane-border seeds over a region map
    Trace {
        /// Purity the Julia seeds are shrunk to
        #[arg(long)]
        seed_purity: Option<f64>,
        /// Purity band lo,hi of the kept pre-images
        #[arg(long)]
        band: Option<Band>,
        /// Rays searched for plane-border seeds
        #[arg(long)]
        plane_seeds: Option<usize>,
        /// Distance of the plane seeds from the plane
        #[arg(long)]
        offset: Option<f64>,
    },
    /// Pure states on the Julia set by inverse iteration
    Julia,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Regions { .. } => "regions",
            Command::Dimension { .. } => "dimension",
            Command::Cycles { .. } => "cycles",
            Command::Backward { .. } => "backward",
            Command::Trace { .. } => "trace",
            Command::Julia => "julia",
        }
    }
}

/// Parses the command line and runs it, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let file = match &cli.common.config {
        Some(p) => load_config_file(p)?,
        None => Default::default(),
    };
    let r = Resolver::new(file);
    let threads = r.get(cli.common.threads, "threads", 0usize)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| dispatch(cli, &r))
}

fn dispatch(cli: &Cli, r: &Resolver) -> Result<()> {
    let c = &cli.common;
    let unused = |flags: &[(&str, bool)]| {
        for (name, given) in flags {
            if *given {
                warn!("--{name} has no effect on `{}`", cli.command.name());
            }
        }
    };
    match &cli.command {
        Command::Regions { plane } => {
            unused(&[("scales", c.scales.is_some()), ("seed", c.seed.is_some()), ("depth", c.depth.is_some()), ("strategy", c.strategy.is_some())]);
            cmd_regions(c, r, *plane)
        }
        Command::Dimension { sweep, window_policy, half_width, offset_average, filter } => {
            unused(&[("seed", c.seed.is_some()), ("depth", c.depth.is_some()), ("strategy", c.strategy.is_some())]);
            let opts = DimensionOpts {
                sweep: r.opt(*sweep, "sweep")?,
                policy: r.opt(*window_policy, "window-policy")?,
                half_width: r.get(*half_width, "half-width", DEFAULT_HALF_WIDTH)?,
                offset_average: r.switch(*offset_average, "offset-average")?,
                filter: r.get(*filter, "filter", FilterArg::Any)?,
            };
            cmd_dimension(c, r, opts)
        }
        Command::Cycles { grid } => {
            unused(&[("purity", c.purity.is_some()), ("window", c.window.is_some()), ("resolution", c.resolution.is_some()), ("seed", c.seed.is_some()), ("strategy", c.strategy.is_some())]);
            cmd_cycles(c, r, r.get(*grid, "grid", DEFAULT_GRID)?)
        }
        Command::Backward { steps, start_purity } => {
            unused(&[("purity", c.purity.is_some()), ("window", c.window.is_some()), ("resolution", c.resolution.is_some()), ("scales", c.scales.is_some())]);
            cmd_backward(c, r, r.get(*steps, "steps", 200usize)?, r.get(*start_purity, "start-purity", 0.99)?)
        }
        Command::Trace { seed_purity, band, plane_seeds, offset } => {
            unused(&[("scales", c.scales.is_some()), ("seed", c.seed.is_some()), ("strategy", c.strategy.is_some())]);
            let d = TraceSettings::default();
            let band = r.get(*band, "band", Band(d.band.0, d.band.1))?;
            let s = TraceSettings {
                seed_purity: r.get(*seed_purity, "seed-purity", d.seed_purity)?,
                band: (band.0, band.1),
                plane_rays: r.get(*plane_seeds, "plane-seeds", d.plane_rays)?,
                offset: r.get(*offset, "offset", d.offset)?,
                ..d
            };
            cmd_trace(c, r, s)
        }
        Command::Julia => {
            unused(&[("purity", c.purity.is_some()), ("window", c.window.is_some()), ("resolution", c.resolution.is_some()), ("seed", c.seed.is_some())]);
            cmd_julia(c, r)
        }
    }
}

/// Default half-width of the windows of the `axis` sweep policy.
pub const DEFAULT_HALF_WIDTH: f64 = 1e-4;
pub const DEFAULT_SWEEP: SweepRange = SweepRange { start: 0.70, end: 1.00, step: 0.01 };

fn check_purity(p: f64) -> Result<f64> {
    if p > 0.5 && p <= 1.0 {
        Ok(p)
    } else {
        Err(CliError::usage(format!("purity {p} is outside (0.5, 1]")))
    }
}

fn check_tol(tol: f64) -> Result<f64> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(CliError::usage("--tol must be positive"))
    }
}

fn out_path(c: &Common, r: &Resolver, default: &str) -> Result<PathBuf> {
    r.get(c.out.clone(), "out", PathBuf::from(default))
}

fn write_sidecar(out: &Path, config: &RunConfig) -> Result<()> {
    let path = sibling(out, "cfg");
    write_atomic(&path, |w| w.write_all(config.sidecar().as_bytes()))?;
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w)
}

/// Writes a CSV atomically from a header and rows of already formatted fields.
fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut failure = None;
    write_atomic(path, |w| {
        let mut out = csv_writer(w);
        let res = (|| -> csv::Result<()> {
            out.write_record(header)?;
            for row in rows {
                out.write_record(&row)?;
            }
            out.flush()?;
            Ok(())
        })();
        res.map_err(|e| {
            let io = std::io::Error::other(e.to_string());
            failure = Some(e);
            io
        })
    })
    .map_err(|e| match failure.take() {
        Some(c) => CliError::Csv(c),
        None => CliError::Io(e),
    })
}

struct RasterSettings {
    window: Window,
    resolution: Resolution,
    tol: f64,
    max_iter: u32,
}

fn raster_settings(c: &Common, r: &Resolver, window: Window) -> Result<RasterSettings> {
    Ok(RasterSettings {
        window: r.get(c.window, "window", WindowArg(window))?.0,
        resolution: r.get(c.resolution, "resolution", Resolution { width: 1024, height: 1024 })?,
        tol: check_tol(r.get(c.tol, "tol", DEFAULT_TOL)?)?,
        max_iter: r.get(c.max_iter, "max-iter", DEFAULT_MAX_ITER)?,
    })
}

fn push_raster(cfg: &mut RunConfig, s: &RasterSettings) {
    cfg.push("window", WindowArg(s.window));
    cfg.push("resolution", s.resolution);
    cfg.push("tol", s.tol);
    cfg.push("max-iter", s.max_iter);
}

fn cmd_regions(c: &Common, r: &Resolver, plane_flag: bool) -> Result<()> {
    let plane = r.switch(plane_flag, "plane")?;
    let purity = r.opt(c.purity, "purity")?;
    if plane && purity.is_some() {
        return Err(CliError::usage("--plane and --purity are mutually exclusive"));
    }
    let default_window = if plane { Window::square(1.0) } else { Window::square(3.0) };
    let s = raster_settings(c, r, default_window)?;
    let out = out_path(c, r, "regions.ppm")?;
    let mut cfg = RunConfig::new("regions");
    let params = if plane {
        cfg.push("plane", true);
        RegionParams { tol: s.tol, max_iter: s.max_iter, ..RegionParams::plane(s.window, s.resolution.width, s.resolution.height) }
    } else {
        let p = check_purity(purity.unwrap_or(1.0))?;
        cfg.push("purity", p);
        RegionParams { tol: s.tol, max_iter: s.max_iter, ..RegionParams::sphere(p, s.window, s.resolution.width, s.resolution.height) }
    };
    push_raster(&mut cfg, &s);
    cfg.push("out", out.display());
    let map = qfractal_core::Rasterizer::render(&Parallel, &params);
    write_region_outputs(&out, &cfg, &map)?;
    let h = map.histogram();
    println!(
        "wrote {} ({}x{}): MixedC0 {} PureC3A {} PureC3B {} NonConvergent {} OutsideDomain {}",
        out.display(),
        map.width(),
        map.height(),
        h[0],
        h[1],
        h[2],
        h[3],
        h[4]
    );
    Ok(())
}

fn write_region_outputs(out: &Path, cfg: &RunConfig, map: &RegionMap) -> Result<()> {
    let colors = ColorTable::default();
    let rgb = region_image(map, &colors);
    write_atomic(out, |w| write_ppm(w, map.width(), map.height(), &cfg.line(), &rgb))?;
    let p = &map.params;
    let rows = (0..map.height()).flat_map(move |j| {
        (0..map.width()).map(move |i| {
            let (x, y) = p.pixel_center(i, j);
            let k = j * map.width() + i;
            let (u, v, w) = match p.pixel_state(i, j) {
                Some(s) => (real(s.u), real(s.v), real(s.w)),
                None => (String::new(), String::new(), String::new()),
            };
            vec![
                i.to_string(),
                j.to_string(),
                real(x),
                real(y),
                u,
                v,
                w,
                map.labels[k].name().to_string(),
                map.iterations_used[k].to_string(),
            ]
        })
    });
    write_csv(
        &sibling(out, "csv"),
        &["pixel_i", "pixel_j", "x", "y", "u", "v", "w", "label", "iterations"],
        rows,
    )?;
    write_sidecar(out, cfg)
}

struct DimensionOpts {
    sweep: Option<SweepRange>,
    policy: Option<PolicyArg>,
    half_width: f64,
    offset_average: bool,
    filter: FilterArg,
}

fn cmd_dimension(c: &Common, r: &Resolver, o: DimensionOpts) -> Result<()> {
    let s = raster_settings(c, r, Window::square(3.0))?;
    let scales_arg = r.get(c.scales.clone(), "scales", Scales::Auto)?;
    let scales = scales_arg.resolve(s.resolution.width, s.resolution.height);
    let out = out_path(c, r, "dimension.csv")?;
    let options = CountOptions { filter: o.filter.into(), offset_average: o.offset_average };
    let purity = r.opt(c.purity, "purity")?;
    let mut cfg = RunConfig::new("dimension");
    let base = RegionParams { tol: s.tol, max_iter: s.max_iter, ..RegionParams::sphere(1.0, s.window, s.resolution.width, s.resolution.height) };

    if let Some(p) = purity {
        let p = check_purity(p)?;
        cfg.push("purity", p);
        push_raster(&mut cfg, &s);
        cfg.push("scales", &scales_arg);
        cfg.push("filter", o.filter);
        cfg.push("offset-average", o.offset_average);
        cfg.push("out", out.display());
        let params = RegionParams { surface: qfractal_core::Surface::Sphere { purity: p }, ..base };
        let est = dimension_at_purity(&Parallel, &params, &scales, options)?;
        let mut rows: Vec<Vec<String>> = est
            .scales
            .iter()
            .zip(&est.counts)
            .map(|(s, n)| vec!["box".into(), s.to_string(), real(*n), String::new(), String::new(), String::new()])
            .collect();
        rows.push(vec![
            "fit".into(),
            String::new(),
            String::new(),
            real(est.slope),
            real(est.r_squared),
            est.border_pixels.to_string(),
        ]);
        write_csv(&out, &["kind", "scale", "count", "dimension", "r_squared", "border_pixels"], rows)?;
        write_sidecar(&out, &cfg)?;
        println!("D_bc = {:.4} (r^2 = {:.4}, {} border pixels) -> {}", est.slope, est.r_squared, est.border_pixels, out.display());
        return Ok(());
    }

    let sweep = o.sweep.unwrap_or(DEFAULT_SWEEP);
    let purities = purity_grid(sweep.start, sweep.end, sweep.step);
    if purities.iter().any(|p| !(*p > 0.5 && *p <= 1.0)) {
        return Err(CliError::usage(format!("sweep {sweep} leaves (0.5, 1]")));
    }
    let policy_arg = o.policy.unwrap_or(PolicyArg::Axis);
    let policy = match policy_arg {
        PolicyArg::Fixed => WindowPolicy::Fixed(s.window),
        PolicyArg::Axis => {
            if r.opt(c.window, "window")?.is_some() {
                return Err(CliError::usage("--window needs --window-policy fixed"));
            }
            if !o.half_width.is_finite() || o.half_width <= 0.0 {
                return Err(CliError::usage("--half-width must be positive"));
            }
            WindowPolicy::AxisBorder { half_width: o.half_width }
        }
    };
    cfg.push("sweep", sweep);
    cfg.push("window-policy", policy_arg);
    match policy_arg {
        PolicyArg::Fixed => cfg.push("window", WindowArg(s.window)),
        PolicyArg::Axis => cfg.push("half-width", o.half_width),
    }
    cfg.push("resolution", s.resolution);
    cfg.push("tol", s.tol);
    cfg.push("max-iter", s.max_iter);
    cfg.push("scales", &scales_arg);
    cfg.push("filter", o.filter);
    cfg.push("offset-average", o.offset_average);
    cfg.push("out", out.display());
    let result = purity_sweep(&Parallel, &purities, &base, policy, &scales, options)?;
    write_sweep_csv(&out, &result, s.resolution)?;
    write_sidecar(&out, &cfg)?;
    for row in &result.rows {
        info!("P = {:.3}: D_bc = {:.4} r^2 = {:.4} ({} px)", row.purity, row.dimension, row.r_squared, row.border_pixels);
    }
    println!(
        "transition between P = {} and {} (estimate {:.4}; purity of C1 {:.5}) -> {}",
        result.transition_interval.0,
        result.transition_interval.1,
        result.transition_estimate,
        critical_purity(),
        out.display()
    );
    Ok(())
}

fn write_sweep_csv(out: &Path, result: &SweepResult, res: Resolution) -> Result<()> {
    let mut rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|row| {
            vec![
                "sample".into(),
                real(row.purity),
                real(row.dimension),
                real(row.r_squared),
                row.border_pixels.to_string(),
                res.to_string(),
                String::new(),
                String::new(),
            ]
        })
        .collect();
    rows.push(vec![
        "transition_estimate".into(),
        real(result.transition_estimate),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        real(result.transition_interval.0),
        real(result.transition_interval.1),
    ]);
    write_csv(
        out,
        &["kind", "purity", "dimension", "r_squared", "border_pixels", "resolution", "interval_lo", "interval_hi"],
        rows,
    )
}

fn cmd_cycles(c: &Common, r: &Resolver, grid: usize) -> Result<()> {
    if grid < 2 {
        return Err(CliError::usage("--grid must be at least 2"));
    }
    let out = out_path(c, r, "cycles.csv")?;
    let mut cfg = RunConfig::new("cycles");
    cfg.push("grid", grid);
    cfg.push("out", out.display());
    let (records, stats) = find_all_cycles(grid)?;
    info!("{} seeds, {} converged, {} dropped, {} rejected", stats.seeds, stats.converged, stats.dropped, stats.rejected);
    let rows = records.iter().map(|rec| {
        let mut row = vec![cycle_name(rec).unwrap_or("unnamed").to_string(), rec.len().to_string()];
        for k in 0..2 {
            match rec.points.get(k) {
                Some(p) => row.extend([real(p.u), real(p.v), real(p.w), real(rec.purities[k])]),
                None => row.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        row.push(rec.stability.map(|s| s.name()).unwrap_or("marginal").to_string());
        row.extend(rec.multipliers.iter().map(|m| real(*m)));
        row.push(real(rec.residual));
        row
    });
    write_csv(
        &out,
        &[
            "name", "period", "u1", "v1", "w1", "purity1", "u2", "v2", "w2", "purity2", "stability", "multiplier1",
            "multiplier2", "multiplier3", "residual",
        ],
        rows,
    )?;
    write_sidecar(&out, &cfg)?;
    for rec in &records {
        let p = rec.points[0];
        println!(
            "{:>3}  period {}  ({:.3}, {:.3}, {:.3})  P = {:.3}  {}",
            cycle_name(rec).unwrap_or("?"),
            rec.len(),
            p.u,
            p.v,
            p.w,
            rec.purities[0],
            rec.stability.map(|s| s.name()).unwrap_or("marginal")
        );
    }
    Ok(())
}

fn cmd_backward(c: &Common, r: &Resolver, steps: usize, start_purity: f64) -> Result<()> {
    let depth = r.get(c.depth, "depth", 10usize)?;
    let seed = r.get(c.seed, "seed", 0u64)?;
    let strategy = r.opt(c.strategy, "strategy")?;
    let start_purity = check_purity(start_purity)?;
    if steps < 1 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let kinds = match strategy {
        Some(k) => vec![k],
        None => vec![StrategyArg::Plus, StrategyArg::Minus, StrategyArg::Random],
    };
    let out = out_path(c, r, "backward.csv")?;
    let mut cfg = RunConfig::new("backward");
    cfg.push("depth", depth);
    cfg.push("start-purity", start_purity);
    cfg.push("steps", steps);
    cfg.push("strategy", kinds.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    cfg.push("seed", seed);
    cfg.push("rng", RNG_NAME);
    cfg.push("out", out.display());
    let starts = ensemble(depth, start_purity)?;
    let runs = run_ensemble(&starts, &kinds, steps, seed)?;
    let rows = runs.iter().flat_map(|run| {
        run.trace.steps.iter().map(move |st| {
            vec![
                run.strategy.to_string(),
                run.orbit.to_string(),
                st.index.to_string(),
                real(st.point.u),
                real(st.point.v),
                real(st.point.w),
                real(st.purity),
            ]
        })
    });
    write_csv(&out, &["strategy", "orbit", "step", "u", "v", "w", "purity"], rows)?;
    write_sidecar(&out, &cfg)?;
    for k in &kinds {
        let s = summarize(&runs, *k);
        println!(
            "{:>6}: {} orbits, min purity {:.6}, final purity in [{:.6}, {:.6}], {} truncated",
            k.to_string(),
            s.orbits,
            s.min_purity,
            s.min_final_purity,
            s.max_final_purity,
            s.truncated
        );
    }
    println!("purity of C1 {:.6} -> {}", critical_purity(), out.display());
    Ok(())
}

fn cmd_trace(c: &Common, r: &Resolver, base: TraceSettings) -> Result<()> {
    let purity = check_purity(r.get(c.purity, "purity", base.purity)?)?;
    let raster = raster_settings(c, r, base.window)?;
    let depth = r.get(c.depth, "depth", base.depth)?;
    let s = TraceSettings {
        purity,
        window: raster.window,
        width: raster.resolution.width,
        height: raster.resolution.height,
        tol: raster.tol,
        max_iter: raster.max_iter,
        depth,
        ..base
    };
    check_purity(s.seed_purity)?;
    let out = out_path(c, r, "trace.ppm")?;
    let mut cfg = RunConfig::new("trace");
    cfg.push("purity", s.purity);
    push_raster(&mut cfg, &raster);
    cfg.push("julia-depth", s.julia_depth);
    cfg.push("seed-purity", s.seed_purity);
    cfg.push("depth", s.depth);
    cfg.push("band", Band(s.band.0, s.band.1));
    cfg.push("plane-seeds", s.plane_rays);
    cfg.push("offset", s.offset);
    cfg.push("out", out.display());
    let result = run_trace(&Parallel, &s)?;
    let rgb = overlay_image(&result, &ColorTable::default());
    write_atomic(&out, |w| write_ppm(w, s.width, s.height, &cfg.line(), &rgb))?;
    let rows = result.points.iter().map(|p| {
        let (i, j) = match p.pixel {
            Some((i, j)) => (i.to_string(), j.to_string()),
            None => (String::new(), String::new()),
        };
        vec![
            p.family.name().to_string(),
            p.seed.to_string(),
            p.depth.to_string(),
            real(p.point.u),
            real(p.point.v),
            real(p.point.w),
            real(qfractal_core::purity(p.point)),
            real(p.x),
            real(p.y),
            i,
            j,
        ]
    });
    write_csv(
        &sibling(&out, "csv"),
        &["family", "seed", "depth", "u", "v", "w", "purity", "x", "y", "pixel_i", "pixel_j"],
        rows,
    )?;
    write_sidecar(&out, &cfg)?;
    for family in [Family::Julia, Family::Plane] {
        let a = alignment(&result, family, 2);
        println!(
            "{}: {} points in window, {:.2}% within 2 px of the {:?} border",
            family.name(),
            a.in_window,
            100.0 * a.fraction(),
            family.border()
        );
    }
    println!("-> {}", out.display());
    Ok(())
}

fn cmd_julia(c: &Common, r: &Resolver) -> Result<()> {
    let depth = r.get(c.depth, "depth", 10usize)?;
    let out = out_path(c, r, "julia.csv")?;
    let mut cfg = RunConfig::new("julia");
    cfg.push("depth", depth);
    cfg.push("seed-point", Z_C2);
    cfg.push("out", out.display());
    let sample = julia_sample(num_complex::Complex64::new(Z_C2, 0.0), depth)?;
    let rows = sample.points.iter().enumerate().map(|(k, p)| {
        let (re, im) = match pure_to_complex(*p) {
            ExtComplex::Finite(z) => (real(z.re), real(z.im)),
            ExtComplex::Infinity => ("inf".to_string(), "inf".to_string()),
        };
        vec![k.to_string(), re, im, real(p.u), real(p.v), real(p.w)]
    });
    write_csv(&out, &["index", "re", "im", "u", "v", "w"], rows)?;
    write_sidecar(&out, &cfg)?;
    println!("{} points at depth {} -> {}", sample.points.len(), depth, out.display());
    Ok(())
}
