#![allow(dead_code)]

use std::path::PathBuf;

use l42mu::ast::{CodeLiteral, DeclarationTable};
use l42mu::parser::parse_source;
use l42mu::pipeline::{compile_files, front_end, Failure, Options, Program};

pub fn corpus_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(file)
}

pub fn read(file: &str) -> String {
    std::fs::read_to_string(corpus_path(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

/// All program files of the corpus, sorted.
pub fn programs() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(corpus_path(""))
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".l42mu"))
        .collect();
    out.sort();
    out
}

pub fn compile_with(file: &str, opts: Options) -> Result<Program, Failure> {
    compile_files(&[(file.to_string(), read(file))], opts)
}

pub fn compile(file: &str) -> Result<Program, Failure> {
    compile_with(file, Options::default())
}

pub fn flatten_only(file: &str) -> Program {
    let opts = Options {
        final_check: false,
        ..Options::default()
    };
    compile_with(file, opts).unwrap_or_else(|f| panic!("{}", f.render().join("\n")))
}

pub fn top_literal<'a>(t: &'a DeclarationTable, name: &str) -> &'a CodeLiteral {
    t.literal(name).unwrap_or_else(|| panic!("no flat declaration {name}"))
}

/// The declarations of an expected-output file, resolved in the context
/// of the program they were written for: each replaces the program's
/// declaration of the same name before names are qualified.
pub fn expected_in_context(program: &str, expected: &str) -> Vec<(String, CodeLiteral)> {
    let mut table = parse_source(&read(program), 0).unwrap();
    let exp = parse_source(&read(expected), 1).unwrap();
    for d in &exp.decls {
        match table.index_of(&d.name) {
            Some(i) => table.decls[i] = d.clone(),
            None => table.decls.push(d.clone()),
        }
    }
    let q = front_end(&table, &Options::default()).unwrap_or_else(|e| panic!("{e:?}"));
    exp.decls
        .iter()
        .map(|d| (d.name.clone(), q.literal(&d.name).unwrap().clone()))
        .collect()
}
