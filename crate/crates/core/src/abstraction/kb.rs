//! Knowledge-based state abstraction: expert cutoffs per concept and
//! context, plus interpolation validity windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ValidityWindow;

/// Selector used when a concept's bins do not depend on context.
pub const ANY_CONTEXT: &str = "*";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KbBin {
    pub value: String,
    /// Lower bound, inclusive unless `low_open`; `None` is −∞.
    pub low: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub low_open: bool,
    /// Inclusive upper bound; `None` is +∞.
    pub high: Option<f64>,
    /// Severity order; the highest-ranked matching bin wins on overlaps.
    pub rank: i32,
}

impl KbBin {
    fn matches(&self, v: f64) -> bool {
        let above = match self.low {
            None => true,
            Some(l) if self.low_open => v > l,
            Some(l) => v >= l,
        };
        above && self.high.is_none_or(|h| v <= h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KbContext {
    pub selector: String,
    pub bins: Vec<KbBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KbConcept {
    pub id: String,
    pub contexts: Vec<KbContext>,
    pub validity: ValidityWindow,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub concepts: Vec<KbConcept>,
}

impl KnowledgeBase {
    pub fn from_json(text: &str) -> Result<Self> {
        let kb: KnowledgeBase = serde_json::from_str(text)?;
        kb.validate()?;
        Ok(kb)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.concepts {
            if c.contexts.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "concept `{}` has no contexts",
                    c.id
                )));
            }
            for ctx in &c.contexts {
                let mut ranks: Vec<i32> = ctx.bins.iter().map(|b| b.rank).collect();
                ranks.sort_unstable();
                if ranks.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidArgument(format!(
                        "concept `{}` context `{}` has duplicate ranks",
                        c.id, ctx.selector
                    )));
                }
                if let Some(b) = ctx
                    .bins
                    .iter()
                    .find(|b| matches!((b.low, b.high), (Some(l), Some(h)) if l > h))
                {
                    return Err(Error::InvalidArgument(format!(
                        "concept `{}` bin `{}` has low above high",
                        c.id, b.value
                    )));
                }
            }
            if c.validity.before < 0 || c.validity.after < 0 {
                return Err(Error::InvalidArgument(format!(
                    "concept `{}` has a negative validity window",
                    c.id
                )));
            }
        }
        Ok(())
    }

    pub fn concept(&self, id: &str) -> Option<&KbConcept> {
        self.concepts.iter().find(|c| c.id == id)
    }

    /// The context block used for `selector`, falling back to `*`.
    pub fn context(&self, concept: &str, selector: &str) -> Option<&KbContext> {
        let c = self.concept(concept)?;
        c.contexts
            .iter()
            .find(|x| x.selector == selector)
            .or_else(|| c.contexts.iter().find(|x| x.selector == ANY_CONTEXT))
    }

    /// Name of the (context-qualified) concept that states of `concept`
    /// under `selector` are emitted as.
    pub fn qualified_concept(&self, concept: &str, selector: &str) -> Option<String> {
        let ctx = self.context(concept, selector)?;
        Some(if ctx.selector == ANY_CONTEXT {
            concept.to_string()
        } else {
            format!("{concept}@{}", ctx.selector)
        })
    }
}

/// State of `value` for `concept` under `context`. Bounds are inclusive and
/// overlapping bins resolve to the highest rank.
pub fn kb_state<'a>(
    concept: &str,
    context: &str,
    value: f64,
    kb: &'a KnowledgeBase,
) -> Result<&'a str> {
    let ctx = kb
        .context(concept, context)
        .ok_or_else(|| Error::UnknownConcept(concept.to_string()))?;
    ctx.bins
        .iter()
        .filter(|b| b.matches(value))
        .max_by_key(|b| b.rank)
        .map(|b| b.value.as_str())
        .ok_or_else(|| Error::NoMatchingBin {
            concept: concept.to_string(),
            context: context.to_string(),
            value,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled(name: &str) -> KnowledgeBase {
        let path = format!("{}/../../data/kb/{name}", env!("CARGO_MANIFEST_DIR"));
        KnowledgeBase::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn oncology_table() {
        let kb = bundled("oncology.json");
        assert_eq!(kb_state("Hemoglobin", "*", 12.0, &kb).unwrap(), "Normal");
        assert_eq!(kb_state("Platelet", "*", 400.0, &kb).unwrap(), "High");
        assert_eq!(kb_state("Platelet", "*", 399.0, &kb).unwrap(), "Normal");
        assert_eq!(kb_state("Platelet", "*", 20.0, &kb).unwrap(), "Low");
        assert_eq!(kb_state("Platelet", "*", 19.9, &kb).unwrap(), "Very_Low");
        assert_eq!(
            kb.concept("WBC").unwrap().validity,
            ValidityWindow::symmetric(1)
        );
    }

    #[test]
    fn diabetes_context_dependent_bins() {
        let kb = bundled("diabetes.json");
        assert_eq!(kb_state("CREATININE", "Male", 1.1, &kb).unwrap(), "Normal");
        assert_eq!(
            kb_state("CREATININE", "Female", 1.1, &kb).unwrap(),
            "Moderately_High"
        );
        assert_eq!(
            kb.qualified_concept("CREATININE", "Female").unwrap(),
            "CREATININE@Female"
        );
        assert_eq!(kb.qualified_concept("HbA1c", "Female").unwrap(), "HbA1c");
        assert_eq!(
            kb.concept("HbA1c").unwrap().validity,
            ValidityWindow::symmetric(120)
        );
        // strict lower bound on the top bin
        assert_eq!(kb_state("HbA1c", "*", 10.5, &kb).unwrap(), "High");
        assert_eq!(
            kb_state("Albuminuria_ACR", "Male", 14.0, &kb).unwrap(),
            "Normo-High"
        );
        assert_eq!(
            kb_state("Albuminuria_ACR", "Female", 14.0, &kb).unwrap(),
            "Normo-Low"
        );
    }

    #[test]
    fn hepatitis_table() {
        let kb = bundled("hepatitis.json");
        assert_eq!(kb_state("GOT", "*", 40.0, &kb).unwrap(), "High");
        assert_eq!(kb_state("GOT", "*", 6.9, &kb).unwrap(), "Low");
        assert_eq!(kb_state("D-BIL", "*", 2.0, &kb).unwrap(), "Normal");
        assert_eq!(kb.concepts.len(), 10);
        assert_eq!(
            kb.concept("ALB").unwrap().validity,
            ValidityWindow::symmetric(15)
        );
    }

    #[test]
    fn unknown_concept_and_gap_errors() {
        let kb = KnowledgeBase {
            concepts: vec![KbConcept {
                id: "X".into(),
                contexts: vec![KbContext {
                    selector: "*".into(),
                    bins: vec![KbBin {
                        value: "Low".into(),
                        low: None,
                        low_open: false,
                        high: Some(1.0),
                        rank: 0,
                    }],
                }],
                validity: ValidityWindow::symmetric(1),
            }],
        };
        assert!(matches!(
            kb_state("Y", "*", 0.0, &kb),
            Err(Error::UnknownConcept(_))
        ));
        let err = kb_state("X", "*", 5.0, &kb).unwrap_err();
        assert!(err.to_string().contains("`X`") && err.to_string().contains('5'));
    }
}
