use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ModelError, Rel, RelationalModel, TopSpec};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    states: usize,
    #[serde(default = "full")]
    top: TopJson,
    #[serde(default)]
    actions: BTreeMap<String, Vec<(usize, usize)>>,
    #[serde(default)]
    tests: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TopJson {
    Keyword(String),
    Pairs(Vec<(usize, usize)>),
}

fn full() -> TopJson {
    TopJson::Keyword("full".into())
}

pub fn rel_to_pairs(r: &Rel) -> Value {
    Value::Array(r.pairs().into_iter().map(|(i, j)| Value::from(vec![i, j])).collect())
}

pub fn model_to_json(m: &RelationalModel) -> Value {
    let top = match m.top_spec() {
        TopSpec::Full => Value::from("full"),
        TopSpec::Explicit(r) => rel_to_pairs(r),
    };
    let actions: serde_json::Map<String, Value> =
        m.actions().iter().map(|(k, r)| (k.clone(), rel_to_pairs(r))).collect();
    let tests: serde_json::Map<String, Value> =
        m.tests().iter().map(|(k, &s)| (k.clone(), Value::from(super::states_of(s)))).collect();
    serde_json::json!({
        "states": m.states(),
        "top": top,
        "actions": actions,
        "tests": tests,
    })
}

pub fn model_from_json(text: &str) -> Result<RelationalModel, ModelError> {
    let raw: ModelJson = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
    let n = raw.states;
    if n == 0 || n > super::MAX_STATES {
        return Err(ModelError::BadSize(n));
    }
    let mut actions = BTreeMap::new();
    for (name, pairs) in raw.actions {
        let r = Rel::from_pairs(n, &pairs)?;
        actions.insert(name, r);
    }
    let mut tests = BTreeMap::new();
    for (name, states) in raw.tests {
        let mut set = 0u64;
        for s in states {
            if s >= n {
                return Err(ModelError::StateOutOfRange { state: s, n });
            }
            set |= 1 << s;
        }
        tests.insert(name, set);
    }
    let top = match raw.top {
        TopJson::Keyword(k) if k == "full" => TopSpec::Full,
        TopJson::Keyword(k) => return Err(ModelError::Json(format!("unknown top `{k}`"))),
        TopJson::Pairs(pairs) => TopSpec::Explicit(Rel::from_pairs(n, &pairs)?),
    };
    RelationalModel::new(n, actions, tests, top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = r#"{"states": 2, "top": [[0,0],[1,1],[0,1]], "actions": {"p": [[0,1]]}, "tests": {"b": [0]}}"#;
        let m = model_from_json(text).unwrap();
        assert_eq!(m.action("p").unwrap().pairs(), vec![(0, 1)]);
        assert_eq!(m.test("b"), Some(1));
        let back = model_from_json(&model_to_json(&m).to_string()).unwrap();
        assert_eq!(back, m);
        let full = model_from_json(r#"{"states": 1}"#).unwrap();
        assert_eq!(full.top_spec(), &TopSpec::Full);
        assert!(model_from_json(r#"{"states": 2, "actions": {"p": [[0,2]]}}"#).is_err());
        assert!(model_from_json(r#"{"states": 2, "top": "none"}"#).is_err());
    }
}
