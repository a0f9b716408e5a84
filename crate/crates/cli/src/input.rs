use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

/// A usage or input problem; maps to exit code 2.
#[derive(Debug)]
pub enum InputError {
    Config(String),
    Parse { path: PathBuf, line: usize, column: usize, message: String },
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Config(m) => write!(f, "configuration error: {m}"),
            InputError::Parse { path, line, column, message } => {
                write!(f, "parse error in {} at line {line} column {column}: {message}", path.display())
            }
        }
    }
}

impl std::error::Error for InputError {}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn is_toml(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"))
}

pub fn parse_str<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, InputError> {
    if is_toml(path) {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            InputError::Parse { path: path.to_owned(), line, column, message: e.message().to_string() }
        })
    } else {
        serde_json::from_str(text).map_err(|e| InputError::Parse {
            path: path.to_owned(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// Reads a JSON document, or TOML when the extension is `.toml`.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_str(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(serde::Deserialize, Debug)]
    struct Doc {
        #[allow(dead_code)]
        n: u32,
    }

    #[test]
    fn json_error_location() {
        let err = parse_str::<Doc>(Path::new("x.json"), "{\n  \"n\": ,\n}").unwrap_err();
        match err {
            InputError::Parse { line, column, .. } => assert_eq!((line, column), (2, 8)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn toml_error_location() {
        let err = parse_str::<Doc>(Path::new("x.toml"), "# c\nn = \"a\"\n").unwrap_err();
        match err {
            InputError::Parse { line, column, .. } => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn line_column_counts_from_one() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }
}
