//! Bit-exact file formats: probability maps and three-class masks as 8-bit
//! RGB PNG, label maps as 16-bit grayscale PNG, binary masks as 8-bit
//! grayscale PNG, centroids as `x,y` text lines, and a tab-separated
//! manifest table.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use crate::probmap::{ClassMap, PixelClass, ProbabilityMap, SUM_TOLERANCE};
use crate::raster::{BinaryMask, LabelMap, Point};

/// Three-class mask colors: black tissue, blue neuron, green contour.
pub const COLOR_TISSUE: [u8; 3] = [0, 0, 0];
pub const COLOR_NEURON: [u8; 3] = [0, 0, 255];
pub const COLOR_CONTOUR: [u8; 3] = [0, 255, 0];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    BadFormat { path: PathBuf, detail: String },
    #[error("{path}: expected an 8-bit 3-channel image")]
    NotThreeChannel { path: PathBuf },
    #[error("{path}: label {label} exceeds the 16-bit limit")]
    LabelOverflow { path: PathBuf, label: u32 },
    #[error("{path}:{line}: cannot parse point")]
    ParseError { path: PathBuf, line: usize },
    #[error("{path}:{line}: point outside the {width}x{height} image")]
    OutOfBounds { path: PathBuf, line: usize, width: u32, height: u32 },
    #[error("{path}:{line}: duplicate point")]
    DuplicatePoint { path: PathBuf, line: usize },
    #[error("{path}:{line}: duplicate image id `{id}`")]
    DuplicateId { path: PathBuf, line: usize, id: String },
    #[error("{path}:{line}: referenced file {missing} does not exist")]
    MissingFile { path: PathBuf, line: usize, missing: PathBuf },
    #[error("{path}: unknown color ({r}, {g}, {b}) at ({x}, {y})")]
    UnknownColor { path: PathBuf, x: u32, y: u32, r: u8, g: u8, b: u8 },
}

fn open(path: &Path) -> Result<DynamicImage, IoError> {
    image::open(path).map_err(|source| IoError::Image { path: path.to_path_buf(), source })
}

/// Reads an 8-bit RGB PNG as a probability map: R background, G contour,
/// B neuron, each value v/255. Raw per-pixel sums must stay within the
/// quantization tolerance of 1 before the pixel is renormalized.
pub fn read_probability_map(path: &Path) -> Result<ProbabilityMap, IoError> {
    let img = match open(path)? {
        DynamicImage::ImageRgb8(img) => img,
        _ => return Err(IoError::NotThreeChannel { path: path.to_path_buf() }),
    };
    let (w, h) = img.dimensions();
    let n = w as usize * h as usize;
    let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for (x, y, Rgb([r, g, b])) in img.enumerate_pixels() {
        let sum = u32::from(*r) + u32::from(*g) + u32::from(*b);
        if (f64::from(sum) / 255.0 - 1.0).abs() > SUM_TOLERANCE {
            return Err(IoError::BadFormat {
                path: path.to_path_buf(),
                detail: format!("channel sum {sum}/255 at ({x}, {y}) outside 1 ± {SUM_TOLERANCE}"),
            });
        }
        planes[0].push(f64::from(*r) / 255.0);
        planes[1].push(f64::from(*g) / 255.0);
        planes[2].push(f64::from(*b) / 255.0);
    }
    let [bg, contour, neuron] = planes;
    ProbabilityMap::from_planes(w, h, bg, contour, neuron).map_err(|e| IoError::BadFormat {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// Quantizes to 8-bit RGB with rounding; the written sums stay within the
/// read tolerance.
pub fn write_probability_map(path: &Path, pm: &ProbabilityMap) -> Result<(), IoError> {
    let mut img = ImageBuffer::new(pm.width(), pm.height());
    for (x, y, pixel) in img.enumerate_pixels_mut() {
        let [b, c, n] = pm.get(x, y);
        *pixel = Rgb([
            (b * 255.0).round() as u8,
            (c * 255.0).round() as u8,
            (n * 255.0).round() as u8,
        ]);
    }
    img.save(path).map_err(|source| IoError::Image { path: path.to_path_buf(), source })
}

/// Reads a 16-bit grayscale PNG as a label map, value = label id.
pub fn read_label_map(path: &Path) -> Result<LabelMap, IoError> {
    let img = match open(path)? {
        DynamicImage::ImageLuma16(img) => img,
        _ => {
            return Err(IoError::BadFormat {
                path: path.to_path_buf(),
                detail: "expected a 16-bit grayscale image".into(),
            })
        }
    };
    let (w, h) = img.dimensions();
    let labels = img.pixels().map(|Luma([v])| u32::from(*v)).collect();
    Ok(LabelMap::from_vec(w, h, labels))
}

pub fn write_label_map(path: &Path, lm: &LabelMap) -> Result<(), IoError> {
    if let Some(&label) = lm.labels().iter().find(|&&l| l > u32::from(u16::MAX)) {
        return Err(IoError::LabelOverflow { path: path.to_path_buf(), label });
    }
    let mut img: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::new(lm.width(), lm.height());
    for (x, y, pixel) in img.enumerate_pixels_mut() {
        *pixel = Luma([lm.get(x, y) as u16]);
    }
    img.save(path).map_err(|source| IoError::Image { path: path.to_path_buf(), source })
}

/// Reads an 8-bit grayscale PNG with values 0/255 as a binary mask.
pub fn read_binary_mask(path: &Path) -> Result<BinaryMask, IoError> {
    let img = match open(path)? {
        DynamicImage::ImageLuma8(img) => img,
        _ => {
            return Err(IoError::BadFormat {
                path: path.to_path_buf(),
                detail: "expected an 8-bit grayscale image".into(),
            })
        }
    };
    let (w, h) = img.dimensions();
    let mut mask = BinaryMask::new(w, h);
    for (x, y, Luma([v])) in img.enumerate_pixels() {
        match v {
            0 => {}
            255 => mask.set(x, y, true),
            other => {
                return Err(IoError::BadFormat {
                    path: path.to_path_buf(),
                    detail: format!("value {other} at ({x}, {y}) is neither 0 nor 255"),
                })
            }
        }
    }
    Ok(mask)
}

pub fn write_binary_mask(path: &Path, mask: &BinaryMask) -> Result<(), IoError> {
    let mut img: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::new(mask.width(), mask.height());
    for (x, y, pixel) in img.enumerate_pixels_mut() {
        *pixel = Luma([if mask.get(x, y) { 255 } else { 0 }]);
    }
    img.save(path).map_err(|source| IoError::Image { path: path.to_path_buf(), source })
}

/// Reads an 8-bit RGB PNG as a three-class mask using the fixed colors.
pub fn read_class_map(path: &Path) -> Result<ClassMap, IoError> {
    let img = match open(path)? {
        DynamicImage::ImageRgb8(img) => img,
        _ => return Err(IoError::NotThreeChannel { path: path.to_path_buf() }),
    };
    let (w, h) = img.dimensions();
    let mut map = ClassMap::new(w, h);
    for (x, y, Rgb(rgb)) in img.enumerate_pixels() {
        let class = match *rgb {
            COLOR_TISSUE => PixelClass::Background,
            COLOR_NEURON => PixelClass::Neuron,
            COLOR_CONTOUR => PixelClass::Contour,
            [r, g, b] => {
                return Err(IoError::UnknownColor { path: path.to_path_buf(), x, y, r, g, b })
            }
        };
        map.set(x, y, class);
    }
    Ok(map)
}

pub fn write_class_map(path: &Path, map: &ClassMap) -> Result<(), IoError> {
    let mut img = ImageBuffer::new(map.width(), map.height());
    for (x, y, pixel) in img.enumerate_pixels_mut() {
        *pixel = Rgb(match map.get(x, y) {
            PixelClass::Background => COLOR_TISSUE,
            PixelClass::Neuron => COLOR_NEURON,
            PixelClass::Contour => COLOR_CONTOUR,
        });
    }
    img.save(path).map_err(|source| IoError::Image { path: path.to_path_buf(), source })
}

/// Reads centroid annotations: one `x,y` integer pair per line, `#` starts a
/// comment. Points are bounds-checked against the target image and must be
/// unique.
pub fn read_points(path: &Path, width: u32, height: u32) -> Result<Vec<Point>, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.to_path_buf(), source })?;
    let mut points = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split(',');
        let parse = |field: Option<&str>| -> Option<u32> { field?.trim().parse().ok() };
        let (x, y) = match (parse(parts.next()), parse(parts.next()), parts.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => return Err(IoError::ParseError { path: path.to_path_buf(), line }),
        };
        if x >= width || y >= height {
            return Err(IoError::OutOfBounds { path: path.to_path_buf(), line, width, height });
        }
        if !seen.insert((x, y)) {
            return Err(IoError::DuplicatePoint { path: path.to_path_buf(), line });
        }
        points.push(Point::new(x, y));
    }
    Ok(points)
}

pub fn write_points(path: &Path, points: &[Point]) -> Result<(), IoError> {
    let mut text = String::new();
    for p in points {
        text.push_str(&format!("{},{}\n", p.x, p.y));
    }
    std::fs::write(path, text).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub probability_map: PathBuf,
    pub centroids: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
}

/// Image batch manifest: one `id<TAB>probmap[<TAB>centroids[<TAB>gt]]` line
/// per image. Ids must be unique and every referenced path must exist;
/// relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

pub fn read_manifest(path: &Path) -> Result<Manifest, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries = Vec::new();
    let mut ids = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim_end();
        if content.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 4 || fields[0].is_empty() {
            return Err(IoError::ParseError { path: path.to_path_buf(), line });
        }
        let id = fields[0].to_string();
        if !ids.insert(id.clone()) {
            return Err(IoError::DuplicateId { path: path.to_path_buf(), line, id });
        }
        let resolve = |field: &str| -> PathBuf {
            let p = Path::new(field);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let mut paths = Vec::new();
        for &field in &fields[1..] {
            if field.is_empty() || field == "-" {
                paths.push(None);
                continue;
            }
            let resolved = resolve(field);
            if !resolved.exists() {
                return Err(IoError::MissingFile {
                    path: path.to_path_buf(),
                    line,
                    missing: resolved,
                });
            }
            paths.push(Some(resolved));
        }
        let probability_map = match paths.first().cloned().flatten() {
            Some(p) => p,
            None => return Err(IoError::ParseError { path: path.to_path_buf(), line }),
        };
        entries.push(ManifestEntry {
            id,
            probability_map,
            centroids: paths.get(1).cloned().flatten(),
            ground_truth: paths.get(2).cloned().flatten(),
        });
    }
    Ok(Manifest { entries })
}
