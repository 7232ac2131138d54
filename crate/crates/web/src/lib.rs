//! WebAssembly entry points for the browser demo. Each takes the text of a
//! `.site` spec and returns a JSON string: the command report, or
//! `{"error": {...}}` with a position when the input does not parse.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ltsheaf_cli::{load, parse_command, run, summarize, to_json_string, Diagnostic, Options};

fn input_error(d: &Diagnostic) -> String {
    let mut e = d.to_json();
    e["kind"] = Value::from("input");
    to_json_string(&json!({ "error": e }))
}

/// Runs one command against a spec.
#[wasm_bindgen]
pub fn run_command(spec: &str, command: &str) -> String {
    let site = match load(spec) {
        Ok(s) => s,
        Err(d) => return input_error(&d),
    };
    let cmd = match parse_command(command) {
        Ok(c) => c,
        Err(d) => return input_error(&d),
    };
    match run(&site, &cmd, &Options::default()) {
        Ok(r) => to_json_string(&summarize(&[r])),
        Err(d) => input_error(&d),
    }
}

#[wasm_bindgen]
pub fn check_coverage(spec: &str) -> String {
    run_command(spec, "check-coverage")
}

#[wasm_bindgen]
pub fn sheafify(spec: &str, presheaf: &str) -> String {
    run_command(spec, &format!("sheafify {presheaf}"))
}

#[wasm_bindgen]
pub fn verify_axioms(spec: &str) -> String {
    run_command(spec, "verify-axioms")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = "poset { u: 0 <= 1 }\ncoverage dense\npresheaf K { 0: 1, 1: 2, u: [0, 0] }\nuniverse auto(1)\n";

    fn parsed(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn operations_return_reports() {
        let v = parsed(check_coverage(SPEC));
        assert_eq!(v["commands"][0]["report"], json!({"valid": true, "violations": []}));
        let v = parsed(sheafify(SPEC, "K"));
        assert_eq!(v["commands"][0]["report"]["sheaf"]["sizes"], json!({"0": 1, "1": 1}));
        let v = parsed(verify_axioms(SPEC));
        assert_eq!(v["passed"], true);
    }

    #[test]
    fn input_errors_carry_positions() {
        let v = parsed(check_coverage("poset { u: 0 <= }"));
        assert_eq!(v["error"]["kind"], "input");
        assert_eq!(v["error"]["line"], 1);
        let v = parsed(sheafify(SPEC, "Q"));
        assert!(v["error"]["message"].as_str().unwrap().contains("`Q`"));
    }
}
