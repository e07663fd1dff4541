//! The certificate checker may rely on terms, single reduction steps and
//! witness replay, but never on the conversion procedure, the arithmetic
//! search or the type checker.

use std::fs;
use std::path::Path;

const ALLOWED: &[&str] = &["crate::term", "crate::reduce", "crate::arith::witness", "crate::arith::{cap, Atom, LinEq}", "crate::arith::Atom;", "super::"];
const FORBIDDEN: &[&str] = &["congruence", "typecheck", "solve", "entails", "normalize", "script", "emit"];

fn imports(file: &str) -> Vec<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("src/cert").join(file);
    let src = fs::read_to_string(path).unwrap();
    src.lines()
        .map(str::trim)
        .filter(|l| l.starts_with("use ") && (l.contains("crate::") || l.contains("super::")))
        .map(str::to_string)
        .collect()
}

#[test]
fn checker_imports_only_the_trusted_base() {
    for file in ["verify.rs", "text.rs"] {
        let uses = imports(file);
        assert!(!uses.is_empty());
        for u in uses {
            assert!(ALLOWED.iter().any(|a| u.contains(a)), "{file}: unexpected import `{u}`");
            assert!(!FORBIDDEN.iter().any(|f| u.contains(f)), "{file}: forbidden import `{u}`");
        }
    }
}
