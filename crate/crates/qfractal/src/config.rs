//! Resolved run configuration: flags, an optional `key=value` file, defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use qfractal_core::{BorderFilter, Window};

use crate::error::{CliError, Result};

/// Every key accepted in a config file; the same names as the long flags.
pub const KEYS: &[&str] = &[
    "purity", "window", "resolution", "tol", "max-iter", "scales", "seed", "depth", "strategy", "threads", "out",
    "plane", "sweep", "window-policy", "half-width", "offset-average", "filter", "grid", "steps", "start-purity",
    "seed-purity", "band", "plane-seeds", "offset",
];

/// Keys that runs echo for the record but that cannot be changed.
pub const ECHO_ONLY_KEYS: &[&str] = &["julia-depth", "seed-point", "rng"];

fn parse_reals<const N: usize>(s: &str, what: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("{what} needs {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !o.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

/// `x0,x1,y0,y1`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct WindowArg(pub Window);

impl FromStr for WindowArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let [x0, x1, y0, y1] = parse_reals::<4>(s, "window")?;
        if !(x0 < x1 && y0 < y1) {
            return Err(format!("window `{s}` is empty"));
        }
        Ok(WindowArg(Window::new(x0, x1, y0, y1)))
    }
}

impl fmt::Display for WindowArg {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let w = self.0;
        write!(f, "{},{},{},{}", w.x_min, w.x_max, w.y_min, w.y_max)
    }
}

/// `WxH`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Resolution {
    pub width: usize,
    pub height: usize,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("resolution `{s}` is not WxH"))?;
        let width: usize = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
        let height: usize = h.trim().parse().map_err(|_| format!("bad height `{h}`"))?;
        if width == 0 || height == 0 {
            return Err("resolution must be positive".into());
        }
        Ok(Resolution { width, height })
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Comma-separated box sizes, or `auto`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scales {
    Auto,
    List(Vec<usize>),
}

impl FromStr for Scales {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(Scales::Auto);
        }
        s.split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad box size `{p}`")))
            .collect::<std::result::Result<Vec<usize>, String>>()
            .map(Scales::List)
    }
}

impl fmt::Display for Scales {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Scales::Auto => f.write_str("auto"),
            Scales::List(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

impl Scales {
    pub fn resolve(&self, width: usize, height: usize) -> Vec<usize> {
        match self {
            Scales::Auto => qfractal_core::fractal::default_scales(width, height),
            Scales::List(v) => v.clone(),
        }
    }
}

/// `start,end,step`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SweepRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let [start, end, step] = parse_reals::<3>(s, "sweep")?;
        if !(step > 0.0 && start < end) {
            return Err(format!("sweep `{s}` must have start < end and a positive step"));
        }
        Ok(SweepRange { start, end, step })
    }
}

impl fmt::Display for SweepRange {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{},{},{}", self.start, self.end, self.step)
    }
}

/// `lo,hi`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Band(pub f64, pub f64);

impl FromStr for Band {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let [lo, hi] = parse_reals::<2>(s, "band")?;
        if lo > hi {
            return Err(format!("band `{s}` is reversed"));
        }
        Ok(Band(lo, hi))
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, PartialEq, Eq, Debug)]
        pub enum $name { $($variant),+ }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.trim() {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("unknown value `{other}`, expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $text),+ })
            }
        }
    };
}

keyword_enum!(StrategyArg { Plus => "plus", Minus => "minus", Random => "random" });
keyword_enum!(PolicyArg { Fixed => "fixed", Axis => "axis" });
keyword_enum!(FilterArg { Any => "any", BlueBlue => "blue-blue", RedBlue => "red-blue" });

impl From<FilterArg> for BorderFilter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::Any => BorderFilter::Any,
            FilterArg::BlueBlue => BorderFilter::BlueBlue,
            FilterArg::RedBlue => BorderFilter::RedBlue,
        }
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().to_string();
        if ECHO_ONLY_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!("config line {}: unknown key `{key}`", n + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Picks each setting from the flag, then the config file, then the default.
#[derive(Clone, Debug, Default)]
pub struct Resolver {
    pub file: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Resolver { file }
    }

    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    /// A switch is on if the flag was given or the file says `true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        self.get(None, key, false)
    }
}

/// Fully resolved settings of one run, in echo order.
#[derive(Clone, PartialEq, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub entries: Vec<(&'static str, String)>,
}

impl RunConfig {
    pub fn new(command: &'static str) -> Self {
        RunConfig { command, entries: Vec::new() }
    }

    pub fn push(&mut self, key: &'static str, value: impl fmt::Display) {
        self.entries.push((key, value.to_string()));
    }

    /// One line for image headers.
    pub fn line(&self) -> String {
        let mut s = format!("qfractal {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.entries {
            s.push(' ');
            s.push_str(k);
            s.push('=');
            s.push_str(v);
        }
        s
    }

    /// Sidecar text in the config-file syntax, so it can be fed back with `--config`.
    pub fn sidecar(&self) -> String {
        let mut s = format!("# qfractal {} {}\n", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.entries {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}
