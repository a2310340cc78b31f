use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{GenError, HiddenType};

const CHINESE: &str = include_str!("../../assets/charsets/chinese.txt");
const WORDS: &str = include_str!("../../assets/charsets/words.txt");

pub const BUILTIN_CHARSETS: [&str; 8] = [
    "words",
    "digits",
    "letters",
    "letters_upper",
    "letters_lower",
    "chinese",
    "chinese_simple",
    "chinese_complex",
];

/// One line per entry; blank lines and surrounding whitespace are ignored.
pub fn parse_charset(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Builtin lists. The Chinese list holds 85 characters of 3–9 strokes
/// followed by 85 of 13 or more.
pub fn builtin_charset(name: &str) -> Option<(HiddenType, Vec<String>)> {
    let chars = |s: &str| s.chars().map(String::from).collect::<Vec<_>>();
    let set = match name {
        "digits" => (HiddenType::Digit, chars("0123456789")),
        "letters" => (
            HiddenType::Letter,
            chars("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"),
        ),
        "letters_upper" => (HiddenType::Letter, chars("ABCDEFGHIJKLMNOPQRSTUVWXYZ")),
        "letters_lower" => (HiddenType::Letter, chars("abcdefghijklmnopqrstuvwxyz")),
        "chinese" => (HiddenType::Chinese, parse_charset(CHINESE)),
        "chinese_simple" => (HiddenType::Chinese, parse_charset(CHINESE)[..85].to_vec()),
        "chinese_complex" => (HiddenType::Chinese, parse_charset(CHINESE)[85..].to_vec()),
        "words" => (HiddenType::Word, parse_charset(WORDS)),
        _ => return None,
    };
    Some(set)
}

/// Where a dataset's characters come from: a builtin list, a UTF-8 file,
/// or inline entries. Exactly one source must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharsetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_type: Option<HiddenType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<String>>,
    /// Keep only the first `limit` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
}

impl CharsetSpec {
    pub fn builtin(name: &str) -> Self {
        Self {
            hidden_type: None,
            builtin: Some(name.to_string()),
            file: None,
            entries: None,
            limit: None,
        }
    }

    pub fn inline(hidden_type: HiddenType, entries: Vec<String>) -> Self {
        Self {
            hidden_type: Some(hidden_type),
            builtin: None,
            file: None,
            entries: Some(entries),
            limit: None,
        }
    }

    pub fn resolve(&self) -> Result<(HiddenType, Vec<String>), GenError> {
        let sources = [self.builtin.is_some(), self.file.is_some(), self.entries.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(GenError::Charset(
                "give exactly one of builtin, file or entries".into(),
            ));
        }
        let need_type = || {
            self.hidden_type
                .ok_or_else(|| GenError::Charset("hidden_type is required for file and inline charsets".into()))
        };
        let (ty, mut entries) = if let Some(name) = &self.builtin {
            let (default_ty, list) =
                builtin_charset(name).ok_or_else(|| GenError::Charset(format!("unknown builtin charset {name:?}")))?;
            (self.hidden_type.unwrap_or(default_ty), list)
        } else if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path).map_err(|e| GenError::io(path, e))?;
            (need_type()?, parse_charset(&text))
        } else {
            let list = self.entries.clone().unwrap_or_default();
            (need_type()?, list.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
        };
        if let Some(n) = self.limit {
            entries.truncate(n);
        }
        if entries.is_empty() {
            return Err(GenError::Charset("charset is empty".into()));
        }
        Ok((ty, entries))
    }
}
