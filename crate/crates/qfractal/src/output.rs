//! Atomic file output, binary PPM and CSV number formatting.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use qfractal_core::ConvergenceLabel;

pub type Rgb = [u8; 3];

/// Colours of the five labels and the two overlay families.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ColorTable {
    pub labels: [Rgb; 5],
    /// Pre-images of Julia-vicinity seeds.
    pub overlay_julia: Rgb,
    /// Pre-images of plane-border seeds.
    pub overlay_plane: Rgb,
}

impl Default for ColorTable {
    fn default() -> Self {
        ColorTable {
            labels: [[220, 30, 30], [120, 200, 255], [20, 40, 160], [0, 0, 0], [255, 255, 255]],
            overlay_julia: [255, 255, 0],
            overlay_plane: [10, 10, 10],
        }
    }
}

impl ColorTable {
    pub fn color(&self, label: ConvergenceLabel) -> Rgb {
        self.labels[label as usize]
    }

    pub fn all(&self) -> Vec<Rgb> {
        let mut v = self.labels.to_vec();
        v.push(self.overlay_julia);
        v.push(self.overlay_plane);
        v
    }
}

/// Writes `path` through a temporary file in the same directory that is
/// renamed into place only once `body` has succeeded.
pub fn write_atomic<F>(path: &Path, body: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<&mut File>) -> io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w)?;
        w.flush()?;
    }
    // Temporary files are created owner-only; give the result normal permissions.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Binary P6 image with a single comment line.
pub fn write_ppm<W: Write>(w: &mut W, width: usize, height: usize, comment: &str, rgb: &[u8]) -> io::Result<()> {
    if rgb.len() != width * height * 3 {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "pixel buffer does not match the image size"));
    }
    if comment.contains(['\n', '\r']) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "ppm comment must be a single line"));
    }
    write!(w, "P6\n# {comment}\n{width} {height}\n255\n")?;
    w.write_all(rgb)
}

/// Decoded P6 image, used to read back our own output.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ppm {
    pub width: usize,
    pub height: usize,
    pub comment: String,
    pub rgb: Vec<u8>,
}

impl Ppm {
    pub fn pixel(&self, i: usize, j: usize) -> Rgb {
        let k = 3 * (j * self.width + i);
        [self.rgb[k], self.rgb[k + 1], self.rgb[k + 2]]
    }
}

/// Parses the layout written by [`write_ppm`].
pub fn read_ppm(bytes: &[u8]) -> Option<Ppm> {
    let mut lines = 0;
    let mut header_end = 0;
    for (k, b) in bytes.iter().enumerate() {
        if *b == b'\n' {
            lines += 1;
            if lines == 4 {
                header_end = k + 1;
                break;
            }
        }
    }
    let header = std::str::from_utf8(&bytes[..header_end]).ok()?;
    let mut it = header.lines();
    if it.next()? != "P6" {
        return None;
    }
    let comment = it.next()?.strip_prefix("# ")?.to_string();
    let mut dims = it.next()?.split(' ');
    let width = dims.next()?.parse().ok()?;
    let height = dims.next()?.parse().ok()?;
    if it.next()? != "255" {
        return None;
    }
    let rgb = bytes[header_end..].to_vec();
    (rgb.len() == width * height * 3).then_some(Ppm { width, height, comment, rgb })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `out` with its extension replaced.
pub fn sibling(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(ext)
}
