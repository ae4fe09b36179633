use std::sync::Arc;

use crate::ir::{parse_program, Decl};

/// A bundled benchmark program.
#[derive(Debug, Clone)]
pub struct CorpusProgram {
    pub name: String,
    pub source: &'static str,
    pub decl: Arc<Decl>,
}

const SOURCES: &[(&str, &str)] = &[
    ("arrays", include_str!("../../corpus/arrays.njs")),
    ("callbacks", include_str!("../../corpus/callbacks.njs")),
    ("closures", include_str!("../../corpus/closures.njs")),
    ("context_identity", include_str!("../../corpus/context_identity.njs")),
    ("error_seeded", include_str!("../../corpus/error_seeded.njs")),
    ("eval_use", include_str!("../../corpus/eval_use.njs")),
    ("exceptions", include_str!("../../corpus/exceptions.njs")),
    ("forin", include_str!("../../corpus/forin.njs")),
    ("labels", include_str!("../../corpus/labels.njs")),
    ("methods", include_str!("../../corpus/methods.njs")),
    ("mutual_recursion", include_str!("../../corpus/mutual_recursion.njs")),
    ("nested_closures", include_str!("../../corpus/nested_closures.njs")),
    ("prototypes", include_str!("../../corpus/prototypes.njs")),
    ("recursion", include_str!("../../corpus/recursion.njs")),
    ("straight_line", include_str!("../../corpus/straight_line.njs")),
    ("straight_objects", include_str!("../../corpus/straight_objects.njs")),
    ("string_keys", include_str!("../../corpus/string_keys.njs")),
];

/// The hand-written mini-corpus shipped with the crate, sorted by name.
pub fn corpus() -> Vec<CorpusProgram> {
    SOURCES
        .iter()
        .map(|&(name, source)| CorpusProgram {
            name: name.to_string(),
            source,
            decl: Arc::new(parse_program(source).unwrap_or_else(|e| panic!("corpus program {name}: {e}"))),
        })
        .collect()
}
