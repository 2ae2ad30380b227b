use serde::{Deserialize, Serialize};

use crate::corpus::is_pincode;

/// Tokenized address after cleaning.
///
/// `tokens` already ends with the pincode when one was found; `pincode`
/// repeats it so callers do not need to re-detect it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanAddress {
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pincode: Option<String>,
}

impl CleanAddress {
    pub fn from_body(body: Vec<String>, pincode: Option<String>) -> Self {
        let mut tokens = body;
        if let Some(p) = &pincode {
            tokens.push(p.clone());
        }
        CleanAddress { tokens, pincode }
    }

    /// Tokens without the trailing pincode.
    pub fn body(&self) -> &[String] {
        match self.pincode {
            Some(_) => &self.tokens[..self.tokens.len() - 1],
            None => &self.tokens,
        }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn fold_char(c: char) -> Option<char> {
    if c.is_ascii() {
        return Some(c);
    }
    let folded = match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' | 'ā' | 'À' | 'Á' | 'Â' | 'Ã' | 'Ä' | 'Å' | 'Ā' => 'a',
        'ç' | 'Ç' => 'c',
        'è' | 'é' | 'ê' | 'ë' | 'ē' | 'È' | 'É' | 'Ê' | 'Ë' | 'Ē' => 'e',
        'ì' | 'í' | 'î' | 'ï' | 'ī' | 'Ì' | 'Í' | 'Î' | 'Ï' | 'Ī' => 'i',
        'ñ' | 'Ñ' => 'n',
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ō' | 'Ò' | 'Ó' | 'Ô' | 'Õ' | 'Ö' | 'Ō' => 'o',
        'ù' | 'ú' | 'û' | 'ü' | 'ū' | 'Ù' | 'Ú' | 'Û' | 'Ü' | 'Ū' => 'u',
        'ý' | 'ÿ' | 'Ý' => 'y',
        _ => return None,
    };
    Some(folded)
}

/// Lowercase, replace anything outside `[a-z0-9]` by whitespace, split, drop
/// all-digit tokens longer than six, and move the last six-digit token to the
/// end as the pincode.
pub fn basic_clean(raw: &str) -> CleanAddress {
    let normalized: String = raw
        .chars()
        .map(|c| match fold_char(c) {
            Some(c) if c.is_ascii_alphanumeric() => c.to_ascii_lowercase(),
            _ => ' ',
        })
        .collect();

    let mut body: Vec<String> = normalized
        .split_whitespace()
        .filter(|t| !(t.len() > 6 && t.bytes().all(|b| b.is_ascii_digit())))
        .map(String::from)
        .collect();

    let pincode = body
        .iter()
        .rposition(|t| is_pincode(t))
        .map(|i| body.remove(i));
    CleanAddress::from_body(body, pincode)
}
