//! IDX (MNIST) parsing and non-overlapping per-digit sampling.

use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, IdxError, Result};
use crate::points::PointSet;
use crate::rng::SeededRng;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Raw images, row-major, one byte per pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let len = self.rows * self.cols;
        &self.pixels[i * len..(i + 1) * len]
    }
}

fn header(bytes: &[u8], words: usize, magic: u32) -> Result<Vec<u32>, IdxError> {
    if let Some(m) = bytes.get(..4) {
        let found = u32::from_be_bytes([m[0], m[1], m[2], m[3]]);
        if found != magic {
            return Err(IdxError::BadMagic { expected: magic, found });
        }
    }
    if bytes.len() < 4 * words {
        return Err(IdxError::Truncated {
            expected: 4 * words,
            found: bytes.len(),
        });
    }
    let out = bytes[..4 * words]
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(out)
}

fn body(bytes: &[u8], offset: usize, len: usize) -> Result<&[u8], IdxError> {
    let expected = offset + len;
    if bytes.len() < expected {
        return Err(IdxError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    Ok(&bytes[offset..expected])
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages, IdxError> {
    let h = header(bytes, 4, IMAGE_MAGIC)?;
    let (count, rows, cols) = (h[1] as usize, h[2] as usize, h[3] as usize);
    let pixels = body(bytes, 16, count * rows * cols)?.to_vec();
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels,
    })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    let h = header(bytes, 2, LABEL_MAGIC)?;
    let labels = body(bytes, 8, h[1] as usize)?;
    if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
        return Err(IdxError::BadLabel(bad));
    }
    Ok(labels.to_vec())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::file(path, e))
}

/// Images as raw 0..=255 values, one `rows * cols` vector per image.
pub fn load_mnist_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<PointSet> {
    let images = parse_idx_images(&read(images_path.as_ref())?)?;
    let labels = parse_idx_labels(&read(labels_path.as_ref())?)?;
    if images.count != labels.len() {
        return Err(IdxError::CountMismatch {
            images: images.count,
            labels: labels.len(),
        }
        .into());
    }
    let dim = images.rows * images.cols;
    if dim == 0 || images.count == 0 {
        return Err(Error::DegenerateInput("IDX file holds no pixels".into()));
    }
    let coords = images.pixels.iter().map(|&p| f64::from(p)).collect();
    // Labels stay as digits, so they must be dense 0..=max.
    PointSet::new(coords, dim)?.with_labels(labels.iter().map(|&l| l as usize).collect())
}

/// `repeats` disjoint index sets with `per_class` points of every digit in
/// `digits`, cut from one seeded shuffle per digit. Within a set, indices
/// are grouped by digit in the order given.
pub fn sample_digit_indices(
    labels: &[usize],
    digits: &[usize],
    per_class: usize,
    repeats: usize,
    rng: &mut SeededRng,
) -> Result<Vec<Vec<usize>>> {
    if digits.is_empty() || per_class == 0 || repeats == 0 {
        return Err(Error::param("need at least one digit, per_class >= 1 and repeats >= 1"));
    }
    let mut seen = digits.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param(format!("duplicate digits in {digits:?}")));
    }
    let needed = per_class * repeats;
    let mut out = vec![Vec::with_capacity(per_class * digits.len()); repeats];
    for &digit in digits {
        let mut pool: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == digit).collect();
        if pool.len() < needed {
            return Err(Error::InsufficientSamples {
                class: digit,
                needed,
                available: pool.len(),
            });
        }
        pool.shuffle(rng);
        for (r, chunk) in pool[..needed].chunks_exact(per_class).enumerate() {
            out[r].extend_from_slice(chunk);
        }
    }
    Ok(out)
}

/// Subsets for [`sample_digit_indices`]; labels become the digit's position
/// in `digits`.
pub fn sample_digit_subsets(
    ps: &PointSet,
    digits: &[usize],
    per_class: usize,
    repeats: usize,
    rng: &mut SeededRng,
) -> Result<Vec<PointSet>> {
    let labels = ps
        .labels()
        .ok_or_else(|| Error::param("digit sampling needs a labeled point set"))?;
    let sets = sample_digit_indices(labels, digits, per_class, repeats, rng)?;
    sets.iter()
        .map(|idx| {
            let mut coords = Vec::with_capacity(idx.len() * ps.dim());
            for &i in idx {
                coords.extend_from_slice(ps.point(i));
            }
            let local = idx
                .iter()
                .map(|&i| digits.iter().position(|&d| d == labels[i]).unwrap())
                .collect();
            PointSet::new(coords, ps.dim())?.with_labels(local)
        })
        .collect()
}
