//! Relation-keyed statement templates.

use std::collections::BTreeMap;
use std::io::Read;

use kg_core::Triplet;

use crate::error::PromptError;

const SUB: &str = "{sub}";
const OBJ: &str = "{obj}";

/// Statement templates keyed by relation name. Each template contains the
/// placeholders `{sub}` and `{obj}` exactly once, e.g.
/// `"{sub} made a visit to {obj}."`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateMap {
    templates: BTreeMap<String, String>,
}

impl TemplateMap {
    /// Builds a map after validating every template.
    pub fn new(
        templates: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, PromptError> {
        let templates: BTreeMap<String, String> = templates.into_iter().collect();
        for (relation, template) in &templates {
            validate(relation, template)?;
        }
        Ok(TemplateMap { templates })
    }

    /// Reads a `{"relation": "template", ...}` JSON object.
    pub fn from_json_reader(reader: impl Read) -> Result<Self, PromptError> {
        let raw: BTreeMap<String, String> = serde_json::from_reader(reader)
            .map_err(|e| PromptError::InvalidConfig(format!("template file: {e}")))?;
        TemplateMap::new(raw)
    }

    pub fn get(&self, relation: &str) -> Option<&str> {
        self.templates.get(relation).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn relations(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    /// Renders the plain statement for a triplet: head into `{sub}`, tail
    /// into `{obj}`.
    pub fn instantiate(&self, triplet: &Triplet) -> Result<String, PromptError> {
        let template = self
            .get(&triplet.relation)
            .ok_or_else(|| PromptError::MissingTemplate(triplet.relation.clone()))?;
        Ok(render(template, &triplet.head, &triplet.tail))
    }

    /// Renders the dated statement for a timestamped triplet: the plain
    /// statement with ` on YYYY-MM-DD` inserted before the closing period
    /// (or appended when there is none). A triplet without a timestamp is an
    /// error.
    pub fn instantiate_temporal(&self, triplet: &Triplet) -> Result<String, PromptError> {
        let date = triplet.timestamp.ok_or_else(|| {
            PromptError::MissingTimestamp(format!(
                "({}, {}, {})",
                triplet.head, triplet.relation, triplet.tail
            ))
        })?;
        let plain = self.instantiate(triplet)?;
        let suffix = format!(" on {}", date.format("%Y-%m-%d"));
        Ok(match plain.strip_suffix('.') {
            Some(body) => format!("{body}{suffix}."),
            None => format!("{plain}{suffix}"),
        })
    }
}

fn validate(relation: &str, template: &str) -> Result<(), PromptError> {
    for placeholder in [SUB, OBJ] {
        match template.matches(placeholder).count() {
            1 => {}
            0 => {
                return Err(PromptError::InvalidTemplate {
                    relation: relation.to_string(),
                    reason: format!("missing {placeholder}"),
                })
            }
            n => {
                return Err(PromptError::InvalidTemplate {
                    relation: relation.to_string(),
                    reason: format!("{placeholder} appears {n} times"),
                })
            }
        }
    }
    Ok(())
}

/// Splices entity names into placeholder positions located in the template
/// itself, so names containing placeholder-like text are inserted verbatim.
fn render(template: &str, sub: &str, obj: &str) -> String {
    let sub_pos = template.find(SUB).expect("validated template");
    let obj_pos = template.find(OBJ).expect("validated template");
    let (first_pos, first_len, first_val, second_pos, second_len, second_val) =
        if sub_pos < obj_pos {
            (sub_pos, SUB.len(), sub, obj_pos, OBJ.len(), obj)
        } else {
            (obj_pos, OBJ.len(), obj, sub_pos, SUB.len(), sub)
        };
    let mut out = String::with_capacity(template.len() + sub.len() + obj.len());
    out.push_str(&template[..first_pos]);
    out.push_str(first_val);
    out.push_str(&template[first_pos + first_len..second_pos]);
    out.push_str(second_val);
    out.push_str(&template[second_pos + second_len..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> TemplateMap {
        TemplateMap::new([(
            "visited".to_string(),
            "{sub} made a visit to {obj}.".to_string(),
        )])
        .unwrap()
    }

    #[test]
    fn plain_statement() {
        let t = Triplet::new("Donald Trump", "visited", "China");
        assert_eq!(
            map().instantiate(&t).unwrap(),
            "Donald Trump made a visit to China."
        );
    }

    #[test]
    fn temporal_statement_keeps_final_period() {
        let t = Triplet::new("Donald Trump", "visited", "China")
            .with_timestamp("2017-11-08".parse().unwrap());
        assert_eq!(
            map().instantiate_temporal(&t).unwrap(),
            "Donald Trump made a visit to China on 2017-11-08."
        );
    }

    #[test]
    fn temporal_without_period_appends() {
        let m = TemplateMap::new([("r".to_string(), "{sub} met {obj}".to_string())]).unwrap();
        let t = Triplet::new("A", "r", "B").with_timestamp("2020-01-02".parse().unwrap());
        assert_eq!(m.instantiate_temporal(&t).unwrap(), "A met B on 2020-01-02");
    }

    #[test]
    fn temporal_requires_timestamp() {
        let t = Triplet::new("A", "visited", "B");
        assert!(matches!(
            map().instantiate_temporal(&t),
            Err(PromptError::MissingTimestamp(_))
        ));
    }

    #[test]
    fn missing_relation_is_an_error() {
        let t = Triplet::new("A", "unknown_rel", "B");
        assert!(matches!(
            map().instantiate(&t),
            Err(PromptError::MissingTemplate(r)) if r == "unknown_rel"
        ));
    }

    #[test]
    fn object_can_precede_subject() {
        let m =
            TemplateMap::new([("led_by".to_string(), "{obj} leads {sub}.".to_string())]).unwrap();
        let t = Triplet::new("the team", "led_by", "Ana");
        assert_eq!(m.instantiate(&t).unwrap(), "Ana leads the team.");
    }

    #[test]
    fn placeholder_like_entity_names_stay_verbatim() {
        let m = TemplateMap::new([("r".to_string(), "{sub} vs {obj}.".to_string())]).unwrap();
        let t = Triplet::new("{obj}", "r", "B");
        assert_eq!(m.instantiate(&t).unwrap(), "{obj} vs B.");
    }

    #[test]
    fn validation_rejects_missing_or_repeated_placeholders() {
        assert!(TemplateMap::new([("r".to_string(), "{sub} only".to_string())]).is_err());
        assert!(
            TemplateMap::new([("r".to_string(), "{sub} {obj} {obj}".to_string())]).is_err()
        );
    }

    #[test]
    fn json_loading() {
        let json = r#"{"visited": "{sub} made a visit to {obj}."}"#;
        let m = TemplateMap::from_json_reader(json.as_bytes()).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.get("visited").is_some());
    }
}
