//! Browser bindings for the kernel demo page.

use ccnat_core::cert;
use ccnat_core::congruence::Conversion;
use ccnat_core::reduce::{normalize, Status};
use ccnat_core::script::{self, Exit, Options, DEFAULT_FUEL};
use ccnat_core::syntax::print_in_context;
use wasm_bindgen::prelude::*;

fn exit_name(e: Exit) -> &'static str {
    match e {
        Exit::Success => "exit 0",
        Exit::Rejected => "exit 1 (rejected)",
        Exit::Limit => "exit 2 (resource limit)",
    }
}

/// Run a whole script and return its report, with `MERGE` lines when
/// `explain` is set.
#[wasm_bindgen]
pub fn run_script(src: &str, explain: bool) -> String {
    match script::parse(src) {
        Ok(s) => {
            let out = script::run(&s, &Options { explain, ..Options::default() });
            format!("{}{}\n", out.report(), exit_name(out.exit))
        }
        Err(e) => format!("parse error {e}\n"),
    }
}

/// Decide `t ~ u` under the declarations of `context`, and when it holds
/// print the certificate followed by the verdict of the independent checker.
#[wasm_bindgen]
pub fn certify(context: &str, goal: &str) -> String {
    let s = match script::parse(context) {
        Ok(s) => s,
        Err(e) => return format!("context: parse error {e}\n"),
    };
    let (t, u) = match script::parse_goal(&s, goal) {
        Ok(g) => g,
        Err(e) => return format!("goal: parse error {e}\n"),
    };
    match Conversion::default().judge(&s.context, &t, &u, true) {
        Ok(j) => match j.proof {
            Some(p) => {
                let c = cert::emit(&s.context, &p);
                let verdict = match cert::check(&s.context, &c, &t, &u) {
                    Ok(()) => "CERT ok".to_string(),
                    Err(e) => format!("CERT fail {e}"),
                };
                format!("CONVERT yes\n{}{verdict}\n", cert::print(&c))
            }
            None => "CONVERT no\n".into(),
        },
        Err(e) => format!("CONVERT unknown {e}\n"),
    }
}

/// βι-normal form of `term` under the declarations of `context`.
#[wasm_bindgen]
pub fn normal_form(context: &str, term: &str) -> String {
    let s = match script::parse(context) {
        Ok(s) => s,
        Err(e) => return format!("context: parse error {e}\n"),
    };
    match script::parse_term_in(&s, term) {
        Ok(t) => {
            let r = normalize(&t, DEFAULT_FUEL);
            match r.status {
                Status::NormalForm => format!("{}\n({} steps)\n", print_in_context(&s.context, &r.term), r.steps),
                Status::FuelExhausted => format!("no normal form within {} steps\n", r.steps),
            }
        }
        Err(e) => format!("term: parse error {e}\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CTX: &str = "(decl x u nat)\n(decl y u nat)\n(decl p r (eq nat x (S y)))\n";

    #[test]
    fn operations() {
        assert_eq!(run_script("(check 0 nat)", false), "CHECK ok\nexit 0\n");
        let c = certify(CTX, "(+ x 1) ~ (+ y 2)");
        assert!(c.starts_with("CONVERT yes\nccnat-cert v1\n") && c.ends_with("CERT ok\n"), "{c}");
        assert_eq!(certify(CTX, "x ~ y"), "CONVERT no\n");
        assert_eq!(normal_form(CTX, "(app (lam n u nat (+ n n)) x)"), "(+ x x)\n(1 steps)\n");
        assert!(run_script("(check", false).starts_with("parse error"));
    }
}
