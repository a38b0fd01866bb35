//! The bundled Sanjeevani knowledge base (natural treatment of diabetes).

use crate::model::KnowledgeBase;
use crate::parser::parse_kb;

/// Source of `kbs/sanjeevani.kb`.
pub const SOURCE: &str = include_str!("../../../kbs/sanjeevani.kb");

/// Name under which the service registers the bundled KB.
pub const NAME: &str = "sanjeevani";

/// Each `diabetesop` value and the section holding its advice.
pub const TREATMENTS: [(&str, &str); 5] = [
    ("naturalcare", "treatdiabetesnatural"),
    ("acupuncture", "treatdiabetesacupuncture"),
    ("homeopathic", "treatdiabeteshomeopathic"),
    ("massage", "treatdiabetesmassage"),
    ("gems", "treatdiabetesgems"),
];

pub fn builtin_kb() -> KnowledgeBase {
    let parsed = parse_kb(SOURCE);
    assert!(
        parsed.diagnostics.is_empty(),
        "bundled knowledge base is invalid: {:?}",
        parsed.diagnostics
    );
    parsed.kb
}
