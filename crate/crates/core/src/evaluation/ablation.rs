use std::collections::BTreeSet;

use crate::corpus::DocType;
use crate::error::{Error, Result};
use crate::graphgen::QueryResult;

/// Drops the excluded first-person document types from a query result.
pub fn ablation_filter(result: &QueryResult, exclude: &BTreeSet<DocType>) -> Result<QueryResult> {
    if let Some(t) = exclude.iter().find(|t| !t.is_first_person()) {
        return Err(Error::Validation(format!(
            "only tweets, press releases and perspectives can be ablated, not {t}"
        )));
    }
    if exclude.len() == 3 {
        return Err(Error::Validation(
            "excluding every first-person type leaves authors without discourse".into(),
        ));
    }
    let mut out = result.clone();
    out.documents.retain(|d| !exclude.contains(&d.doc_type));
    Ok(out)
}

/// Named ablation settings: full, without each type, and each type alone.
pub fn ablation_configurations() -> Vec<(String, BTreeSet<DocType>)> {
    let types = [DocType::Tweet, DocType::PressRelease, DocType::Perspective];
    let mut out = vec![("full".to_string(), BTreeSet::new())];
    for t in types {
        out.push((format!("without_{t}"), BTreeSet::from([t])));
    }
    for t in types {
        out.push((
            format!("only_{t}"),
            types.iter().copied().filter(|&x| x != t).collect(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn background_cannot_be_ablated() {
        let r = QueryResult::default();
        assert!(ablation_filter(&r, &BTreeSet::from([DocType::News])).is_err());
    }

    #[test]
    fn seven_configurations() {
        let c = ablation_configurations();
        assert_eq!(c.len(), 7);
        assert_eq!(c[6].0, "only_perspective");
        assert_eq!(c[6].1, BTreeSet::from([DocType::Tweet, DocType::PressRelease]));
    }
}
