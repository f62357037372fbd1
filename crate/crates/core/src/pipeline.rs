//! Scan, parse, summarize, detect, aggregate.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::AnalysisConfig;
use crate::corpus::{scan_corpus, CorpusLayout, SourceIndex, SuitePairing};
use crate::cut::{summarize_cut, CutModel};
use crate::detect::{detect_suite, sort_findings, IssueFinding};
use crate::error::{AnalysisError, SourceError};
use crate::java::syntax::ClassDecl;
use crate::report::{AnalysisReport, CorpusEntry, Diagnostic};
use crate::source::{parse_cut_class, parse_test_class};

/// Guards against absurd or cyclic hierarchies.
const MAX_ANCESTORS: usize = 32;

fn find_class<'a>(classes: &'a [ClassDecl], name: &str) -> Option<&'a ClassDecl> {
    classes.iter().find_map(|c| if c.name == name { Some(c) } else { find_class(&c.nested, name) })
}

/// The class named `cut_name` from `classes` (or the first class) followed by
/// every ancestor `lookup` can supply, nearest first, plus the name of the
/// first ancestor it could not.
pub fn resolve_hierarchy(
    cut_name: &str,
    classes: &[ClassDecl],
    mut lookup: impl FnMut(&str) -> Option<ClassDecl>,
) -> (Vec<ClassDecl>, Option<String>) {
    let Some(cut) = find_class(classes, cut_name).or(classes.first()) else {
        return (Vec::new(), None);
    };
    let mut chain = vec![cut.clone()];
    let mut seen = BTreeSet::from([cut.name.clone()]);
    while chain.len() < MAX_ANCESTORS {
        let Some(sup) = &chain.last().unwrap().superclass else {
            break;
        };
        let name = sup.simple_name().to_string();
        if name == "Object" || !seen.insert(name.clone()) {
            break;
        }
        match find_class(classes, &name).cloned().or_else(|| lookup(&name)) {
            Some(class) => chain.push(class),
            None => return (chain, Some(name)),
        }
    }
    (chain, None)
}

/// Builds the model for a class under test from in-memory sources: the
/// first source declares the class, the others may declare its ancestors.
/// Sources that fail to parse are ignored.
pub fn model_from_sources(cut_name: &str, sources: &[&str], depth: usize) -> CutModel {
    let units: Vec<Vec<ClassDecl>> = sources.iter().filter_map(|s| parse_cut_class(s).ok().map(|u| u.classes)).collect();
    let Some(first) = units.first() else {
        return CutModel::without_source(cut_name);
    };
    let (chain, unresolved) =
        resolve_hierarchy(cut_name, first, |name| units.iter().find_map(|u| find_class(u, name)).cloned());
    summarize_cut(&chain, unresolved.as_deref(), depth)
}

/// The model for a paired suite. The message explains a fallback to
/// name-based analysis when the source exists but cannot be used.
fn model_for(pairing: &SuitePairing, index: &SourceIndex, depth: usize) -> (CutModel, Option<String>) {
    let Some(path) = &pairing.cut_path else {
        return (CutModel::without_source(&pairing.cut_name), None);
    };
    let unit = fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| parse_cut_class(&t).map_err(|e| e.to_string()));
    let unit = match unit {
        Ok(u) => u,
        Err(e) => {
            let msg = format!("class under test {} unusable ({e}); analyzed without source", path.display());
            return (CutModel::without_source(&pairing.cut_name), Some(msg));
        }
    };
    let mut near = path.parent().map(Path::to_path_buf);
    let (chain, unresolved) = resolve_hierarchy(&pairing.cut_name, &unit.classes, |name| {
        let file = index.find(name, near.as_deref())?.to_path_buf();
        let parsed = parse_cut_class(&fs::read_to_string(&file).ok()?).ok()?;
        near = file.parent().map(Path::to_path_buf);
        find_class(&parsed.classes, name).cloned()
    });
    (summarize_cut(&chain, unresolved.as_deref(), depth), None)
}

/// Parses one suite and runs every enabled detector on it.
pub fn analyze_suite_source(
    suite_id: &str,
    test_source: &str,
    cut: &CutModel,
    config: &AnalysisConfig,
) -> Result<(usize, Vec<IssueFinding>), SourceError> {
    let suite = parse_test_class(test_source)?;
    Ok((suite.tests.len(), detect_suite(suite_id, &suite, cut, config)))
}

struct SuiteOutcome {
    entry: Option<CorpusEntry>,
    findings: Vec<IssueFinding>,
    diagnostics: Vec<Diagnostic>,
}

fn analyze_pairing(pairing: &SuitePairing, index: &SourceIndex, config: &AnalysisConfig) -> SuiteOutcome {
    let diagnostic = |message: String| Diagnostic { suite: pairing.suite_id.clone(), message };
    let mut diagnostics = Vec::new();
    let text = match fs::read_to_string(&pairing.suite_path) {
        Ok(t) => t,
        Err(e) => {
            let d = diagnostic(format!("cannot read suite: {e}"));
            return SuiteOutcome { entry: None, findings: Vec::new(), diagnostics: vec![d] };
        }
    };
    let (cut, warning) = model_for(pairing, index, config.side_effect_depth);
    diagnostics.extend(warning.map(diagnostic));
    match analyze_suite_source(&pairing.suite_id, &text, &cut, config) {
        Ok((test_methods, findings)) => {
            let entry = CorpusEntry { suite: pairing.suite_id.clone(), project: pairing.project.clone(), test_methods };
            SuiteOutcome { entry: Some(entry), findings, diagnostics }
        }
        Err(e) => {
            diagnostics.push(diagnostic(format!("skipped: {e}")));
            SuiteOutcome { entry: None, findings: Vec::new(), diagnostics }
        }
    }
}

/// Analyzes every suite under the layout. Suites that cannot be parsed are
/// left out of the totals and listed in the report's diagnostics.
pub fn run_analysis(layout: &CorpusLayout, config: &AnalysisConfig) -> Result<AnalysisReport, AnalysisError> {
    config.validate()?;
    let pairings = scan_corpus(layout)?;
    let index = SourceIndex::build(layout.cut_root());
    let outcomes: Vec<SuiteOutcome> = pairings.par_iter().map(|p| analyze_pairing(p, &index, config)).collect();
    let mut corpus = Vec::new();
    let mut findings = Vec::new();
    let mut diagnostics = Vec::new();
    for o in outcomes {
        corpus.extend(o.entry);
        findings.extend(o.findings);
        diagnostics.extend(o.diagnostics);
    }
    sort_findings(&mut findings);
    diagnostics.sort();
    Ok(AnalysisReport::new(findings, &corpus, config.hash(), diagnostics)?)
}
