//! Finding generated suites on disk and pairing them with their classes under test.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::error::IngestError;

const SUITE_SUFFIX: &str = "_ESTest.java";
const SCAFFOLDING_SUFFIX: &str = "_ESTest_scaffolding.java";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusLayout {
    pub test_root: PathBuf,
    /// Where class-under-test sources live; `test_root` when absent.
    pub cut_root: Option<PathBuf>,
    /// Project label for suites directly under `test_root`.
    pub project_name: String,
    /// Explicit suite-to-source pairs, tried when the file-name convention finds nothing.
    pub mapping: BTreeMap<String, PathBuf>,
    /// Suite path prefixes (relative to `test_root`) mapped to project names.
    pub projects: BTreeMap<String, String>,
}

impl CorpusLayout {
    pub fn new(test_root: impl Into<PathBuf>) -> Self {
        CorpusLayout { test_root: test_root.into(), project_name: "default".into(), ..Default::default() }
    }

    pub fn cut_root(&self) -> &Path {
        self.cut_root.as_deref().unwrap_or(&self.test_root)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.project_name.trim().is_empty() {
            return Err(IngestError::InvalidLayout("project name is empty".into()));
        }
        for root in [&self.test_root, &self.cut_root().to_path_buf()] {
            fs::read_dir(root).map_err(|source| IngestError::UnreadableRoot { path: root.clone(), source })?;
        }
        Ok(())
    }

    /// Loads a mapping file of `SuiteName = path/to/Cut.java` lines. Paths are
    /// relative to the cut root unless absolute. Keys may be the suite's class
    /// name (`Foo_ESTest`) or its path relative to the test root.
    pub fn load_mapping(&mut self, file: &Path) -> Result<(), IngestError> {
        for (key, value) in read_pairs(file)? {
            self.mapping.insert(key, PathBuf::from(value));
        }
        Ok(())
    }

    /// Loads a project manifest of `path/prefix = project` lines.
    pub fn load_projects(&mut self, file: &Path) -> Result<(), IngestError> {
        for (key, value) in read_pairs(file)? {
            self.projects.insert(key.trim_end_matches('/').to_string(), value);
        }
        Ok(())
    }
}

fn read_pairs(file: &Path) -> Result<Vec<(String, String)>, IngestError> {
    let text = fs::read_to_string(file).map_err(|source| IngestError::UnreadableRoot { path: file.to_path_buf(), source })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| IngestError::InvalidLayout(format!("{}:{}: expected `key = value`", file.display(), i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// A generated suite and, when found, the source of its class under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuitePairing {
    pub suite_path: PathBuf,
    /// `suite_path` relative to the test root with `/` separators. Findings
    /// and reports identify suites by this.
    pub suite_id: String,
    pub cut_path: Option<PathBuf>,
    /// Class under test derived from the suite file name.
    pub cut_name: String,
    pub project: String,
}

fn relative_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Java sources under a root, by simple class name, for CUT and ancestor lookup.
#[derive(Debug, Clone, Default)]
pub struct SourceIndex {
    by_name: BTreeMap<String, Vec<PathBuf>>,
}

impl SourceIndex {
    /// Indexes every `.java` file that is not a generated suite or scaffolding.
    pub fn build(root: &Path) -> Self {
        let mut by_name: BTreeMap<String, Vec<PathBuf>> = BTreeMap::new();
        for entry in WalkDir::new(root).sort_by_file_name().into_iter().filter_map(Result::ok) {
            let name = entry.file_name().to_string_lossy();
            if !entry.file_type().is_file() || name.ends_with(SUITE_SUFFIX) || name.ends_with(SCAFFOLDING_SUFFIX) {
                continue;
            }
            if let Some(stem) = name.strip_suffix(".java") {
                by_name.entry(stem.to_string()).or_default().push(entry.into_path());
            }
        }
        SourceIndex { by_name }
    }

    /// Source declaring `class_name`, preferring one in `near`, else the
    /// first in path order.
    pub fn find(&self, class_name: &str, near: Option<&Path>) -> Option<&Path> {
        let candidates = self.by_name.get(class_name)?;
        near.and_then(|dir| candidates.iter().find(|p| p.parent() == Some(dir)))
            .or_else(|| candidates.first())
            .map(PathBuf::as_path)
    }
}

/// Lists every generated suite under the test root in path order, paired
/// with its class-under-test source: the mirrored path under the cut root,
/// else any same-named source there, else the mapping file's entry.
pub fn scan_corpus(layout: &CorpusLayout) -> Result<Vec<SuitePairing>, IngestError> {
    layout.validate()?;
    let root = &layout.test_root;
    let cut_root = layout.cut_root();
    let index = SourceIndex::build(cut_root);
    let mut out = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            IngestError::UnreadableRoot { path, source: e.into() }
        })?;
        let file_name = entry.file_name().to_string_lossy();
        if !entry.file_type().is_file() || !file_name.ends_with(SUITE_SUFFIX) {
            continue;
        }
        let cut_name = file_name.trim_end_matches(SUITE_SUFFIX).to_string();
        let suite_path = entry.path().to_path_buf();
        let suite_id = relative_id(root, &suite_path);
        let rel_dir = suite_path.parent().and_then(|d| d.strip_prefix(root).ok()).unwrap_or(Path::new(""));
        let mirrored = cut_root.join(rel_dir).join(format!("{cut_name}.java"));
        let suite_stem = file_name.trim_end_matches(".java");
        let cut_path = if mirrored.is_file() {
            Some(mirrored)
        } else if let Some(p) = index.find(&cut_name, Some(&cut_root.join(rel_dir))) {
            Some(p.to_path_buf())
        } else {
            layout
                .mapping
                .get(&suite_id)
                .or_else(|| layout.mapping.get(suite_stem))
                .map(|p| if p.is_absolute() { p.clone() } else { cut_root.join(p) })
        };
        let project = project_of(layout, &suite_id);
        out.push(SuitePairing { suite_path, suite_id, cut_path, cut_name, project });
    }
    if out.is_empty() {
        return Err(IngestError::NoSuitesFound(root.clone()));
    }
    Ok(out)
}

/// Longest matching manifest prefix, else the top-level directory, else the
/// layout's project name.
fn project_of(layout: &CorpusLayout, suite_id: &str) -> String {
    let from_manifest = layout
        .projects
        .iter()
        .filter(|(prefix, _)| suite_id == prefix.as_str() || suite_id.starts_with(&format!("{prefix}/")))
        .max_by_key(|(prefix, _)| prefix.len())
        .map(|(_, project)| project.clone());
    from_manifest.unwrap_or_else(|| match suite_id.split_once('/') {
        Some((top, _)) => top.to_string(),
        None => layout.project_name.clone(),
    })
}
