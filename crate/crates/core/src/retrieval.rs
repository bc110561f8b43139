//! Chi-square retrieval over a labeled gallery and its on-disk index.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::{Descriptor, Histogram};
use crate::geometry::{build_geometry, RtlnpParams, THETA_ZERO_DEG};
use crate::imaging::load_grayscale;
use crate::{Error, Result};

pub const INDEX_FORMAT_VERSION: u32 = 1;

/// `1/2 * sum (x_i - y_i)^2 / (x_i + y_i)`, skipping bins where both are zero.
pub fn chi_square(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(chi_square_unchecked(x, y))
}

#[inline]
fn chi_square_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let s = a + b;
        if s != 0.0 {
            let d = a - b;
            acc += d * d / s;
        }
    }
    0.5 * acc
}

/// Descriptor choice as recorded in an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescriptorKind {
    Rtlnp(RtlnpParams),
    Lbp,
}

impl DescriptorKind {
    pub fn instantiate(self) -> Result<Descriptor> {
        Ok(match self {
            DescriptorKind::Rtlnp(p) => Descriptor::Rtlnp(build_geometry(p)?),
            DescriptorKind::Lbp => Descriptor::Lbp,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            DescriptorKind::Rtlnp(_) => "rtlnp",
            DescriptorKind::Lbp => "lbp",
        }
    }

    pub fn histogram_len(self) -> usize {
        match self {
            DescriptorKind::Rtlnp(p) => 1 << p.sector_count(),
            DescriptorKind::Lbp => 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryEntry {
    pub id: usize,
    /// Source path relative to the dataset root, `/`-separated.
    pub path: String,
    pub class_label: String,
    pub raw: Histogram,
    /// L1-normalized `raw`.
    pub feature: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryIndex {
    kind: DescriptorKind,
    entries: Vec<GalleryEntry>,
}

impl GalleryIndex {
    /// Builds an index from already computed histograms; ids follow input order.
    pub fn from_histograms(
        kind: DescriptorKind,
        items: impl IntoIterator<Item = (String, String, Histogram)>,
    ) -> Result<Self> {
        let len = kind.histogram_len();
        let entries = items
            .into_iter()
            .enumerate()
            .map(|(id, (path, class_label, raw))| {
                if raw.len() != len {
                    return Err(Error::LengthMismatch(raw.len(), len));
                }
                let feature = raw.normalized();
                Ok(GalleryEntry { id, path, class_label, raw, feature })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GalleryIndex { kind, entries })
    }

    pub fn kind(&self) -> DescriptorKind {
        self.kind
    }

    pub fn descriptor_name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn entries(&self) -> &[GalleryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every entry ranked against `feature`, nearest first, ties by id.
    pub fn rank_feature(&self, feature: &[f64]) -> Result<Vec<(usize, f64)>> {
        if feature.len() != self.kind.histogram_len() {
            return Err(Error::LengthMismatch(feature.len(), self.kind.histogram_len()));
        }
        let mut scored: Vec<(usize, f64)> =
            self.entries.iter().map(|e| (e.id, chi_square_unchecked(feature, &e.feature))).collect();
        sort_scored(&mut scored);
        Ok(scored)
    }

    /// Serialized index document. Re-serializing a loaded document
    /// reproduces it byte for byte.
    pub fn to_document(&self) -> String {
        let params = match self.kind {
            DescriptorKind::Rtlnp(p) => serde_json::to_string(&ParamsDoc {
                r_in: p.r_in,
                r_out: p.r_out,
                delta_theta: p.delta_theta,
                theta_zero: THETA_ZERO_DEG,
            }),
            DescriptorKind::Lbp => Ok("null".to_owned()),
        }
        .expect("params serialize");
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"format_version\": {INDEX_FORMAT_VERSION},\n"));
        out.push_str(&format!("  \"descriptor_name\": \"{}\",\n", self.kind.name()));
        out.push_str(&format!("  \"params\": {params},\n"));
        out.push_str(&format!("  \"histogram_len\": {},\n", self.kind.histogram_len()));
        out.push_str("  \"entries\": [");
        for (i, e) in self.entries.iter().enumerate() {
            let doc = EntryDoc {
                id: e.id,
                path: e.path.clone(),
                class_label: e.class_label.clone(),
                raw_bins: e.raw.bins().to_vec(),
                total: e.raw.total(),
            };
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&serde_json::to_string(&doc).expect("entry serializes"));
        }
        out.push_str(if self.entries.is_empty() { "]\n" } else { "\n  ]\n" });
        out.push_str("}\n");
        out
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let doc: IndexDoc = serde_json::from_str(text).map_err(|e| Error::IndexFormat(e.to_string()))?;
        if doc.format_version != INDEX_FORMAT_VERSION {
            return Err(Error::IndexFormat(format!("unsupported format_version {}", doc.format_version)));
        }
        let kind = match (doc.descriptor_name.as_str(), doc.params) {
            ("rtlnp", Some(p)) => {
                if p.theta_zero != THETA_ZERO_DEG {
                    return Err(Error::IndexFormat(format!("theta_zero {} is not supported", p.theta_zero)));
                }
                DescriptorKind::Rtlnp(RtlnpParams::new(p.r_in, p.r_out, p.delta_theta)?)
            }
            ("lbp", None) => DescriptorKind::Lbp,
            (name, _) => return Err(Error::IndexFormat(format!("bad descriptor/params combination for {name:?}"))),
        };
        if doc.histogram_len != kind.histogram_len() {
            return Err(Error::IndexFormat(format!(
                "histogram_len {} does not match descriptor ({})",
                doc.histogram_len,
                kind.histogram_len()
            )));
        }
        let mut items = Vec::with_capacity(doc.entries.len());
        for (i, e) in doc.entries.into_iter().enumerate() {
            if e.id != i {
                return Err(Error::IndexFormat(format!("entry {i} has id {}; ids must be 0..N-1 in order", e.id)));
            }
            let raw = Histogram::from_bins(e.raw_bins);
            if raw.total() != e.total {
                return Err(Error::IndexFormat(format!("entry {i}: total {} != sum of bins {}", e.total, raw.total())));
            }
            items.push((e.path, e.class_label, raw));
        }
        GalleryIndex::from_histograms(kind, items).map_err(|e| Error::IndexFormat(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_document()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GalleryIndex::from_document(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsDoc {
    r_in: u32,
    r_out: u32,
    delta_theta: u32,
    theta_zero: u32,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    id: usize,
    path: String,
    class_label: String,
    raw_bins: Vec<u64>,
    total: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexDoc {
    format_version: u32,
    descriptor_name: String,
    params: Option<ParamsDoc>,
    histogram_len: usize,
    entries: Vec<EntryDoc>,
}

fn sort_scored(scored: &mut [(usize, f64)]) {
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
}

/// Gallery ordering for one query under leave-one-out.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: usize,
    /// Entry ids, nearest first, query excluded.
    pub ids: Vec<usize>,
    pub distances: Vec<f64>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// 1-based rank of `id`, `None` for the query itself.
    pub fn rank_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&i| i == id).map(|p| p + 1)
    }
}

pub fn rank_gallery(query_id: usize, index: &GalleryIndex) -> Result<RankedList> {
    let query = index.entries.get(query_id).ok_or(Error::UnknownQuery(query_id))?;
    let mut scored: Vec<(usize, f64)> = index
        .entries
        .iter()
        .filter(|e| e.id != query_id)
        .map(|e| (e.id, chi_square_unchecked(&query.feature, &e.feature)))
        .collect();
    sort_scored(&mut scored);
    let (ids, distances) = scored.into_iter().unzip();
    Ok(RankedList { query_id, ids, distances })
}

/// One image of a `root/<class>/<file>` dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetItem {
    pub class_label: String,
    pub relative_path: String,
    pub path: PathBuf,
}

/// Lists `root/<class>/<file>` in lexicographic (class, file) order.
/// Hidden entries (leading `.`) are ignored.
pub fn scan_dataset(root: impl AsRef<Path>) -> Result<Vec<DatasetItem>> {
    let root = root.as_ref();
    let read = |dir: &Path| -> Result<Vec<(String, PathBuf)>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if !name.starts_with('.') {
                out.push((name, entry.path()));
            }
        }
        out.sort();
        Ok(out)
    };

    let mut items = Vec::new();
    for (class, dir) in read(root)? {
        if !dir.is_dir() {
            continue;
        }
        let files: Vec<_> = read(&dir)?.into_iter().filter(|(_, p)| p.is_file()).collect();
        if files.is_empty() {
            return Err(Error::Dataset(format!("class directory {} holds no images", dir.display())));
        }
        for (file, path) in files {
            items.push(DatasetItem { relative_path: format!("{class}/{file}"), class_label: class.clone(), path });
        }
    }
    if items.is_empty() {
        return Err(Error::Dataset(format!("no class directories with images under {}", root.display())));
    }
    Ok(items)
}

/// Extracts one histogram per dataset image on the current rayon pool.
/// Fails on the first unreadable or undersized image in dataset order.
pub fn build_index(dataset_root: impl AsRef<Path>, kind: DescriptorKind) -> Result<GalleryIndex> {
    let items = scan_dataset(dataset_root)?;
    let descriptor = kind.instantiate()?;
    let hists: Vec<Result<Histogram>> = items
        .par_iter()
        .map(|item| {
            let img = load_grayscale(&item.path)?;
            descriptor.histogram(&img).map_err(|e| match e {
                Error::ImageTooSmall { .. } => Error::Dataset(format!("{}: {e}", item.path.display())),
                other => other,
            })
        })
        .collect();
    let mut out = Vec::with_capacity(items.len());
    for (item, h) in items.into_iter().zip(hists) {
        out.push((item.relative_path, item.class_label, h?));
    }
    GalleryIndex::from_histograms(kind, out)
}
