//! Extracting a binary verdict from a model response.

use crate::error::PromptError;

/// Parses a True/False response into 1/0.
///
/// The response is split into alphabetic words (case-insensitive). It parses
/// when exactly one of the two verdict words occurs — possibly repeated —
/// so `"True"`, `"true."`, and `"Answer: TRUE"` all parse to 1, while an
/// empty response, `"maybe"`, or a response containing both `"true"` and
/// `"false"` are rejected as unparseable.
pub fn parse_verdict(response: &str) -> Result<u8, PromptError> {
    let mut saw_true = false;
    let mut saw_false = false;
    for word in response.split(|c: char| !c.is_ascii_alphabetic()) {
        if word.eq_ignore_ascii_case("true") {
            saw_true = true;
        } else if word.eq_ignore_ascii_case("false") {
            saw_false = true;
        }
    }
    match (saw_true, saw_false) {
        (true, false) => Ok(1),
        (false, true) => Ok(0),
        _ => Err(PromptError::UnparseableVerdict(response.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_words() {
        assert_eq!(parse_verdict("True").unwrap(), 1);
        assert_eq!(parse_verdict("false").unwrap(), 0);
        assert_eq!(parse_verdict("FALSE").unwrap(), 0);
    }

    #[test]
    fn punctuation_and_prefixes() {
        assert_eq!(parse_verdict("True.").unwrap(), 1);
        assert_eq!(parse_verdict("Answer: False\n").unwrap(), 0);
        assert_eq!(parse_verdict("The statement is true").unwrap(), 1);
    }

    #[test]
    fn ambiguous_or_empty_responses_fail() {
        assert!(parse_verdict("").is_err());
        assert!(parse_verdict("maybe").is_err());
        assert!(parse_verdict("it could be true or false").is_err());
        // Verdict words embedded in larger words do not count.
        assert!(parse_verdict("truthful").is_err());
    }
}
