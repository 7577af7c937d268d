//! Model files: a magic header line naming the model kind, then JSON.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::NluError;

pub const MAGIC: &str = "SCHOLARBOT-MODEL";
pub const FORMAT_VERSION: u32 = 1;

pub fn to_model_string<M: Serialize>(kind: &str, model: &M) -> Result<String, NluError> {
    let body = serde_json::to_string(model).map_err(|e| NluError::Parse(e.to_string()))?;
    Ok(format!("{MAGIC} {FORMAT_VERSION} {kind}\n{body}\n"))
}

pub fn from_model_str<M: DeserializeOwned>(kind: &str, text: &str) -> Result<M, NluError> {
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| NluError::Parse("model file has no header line".into()))?;
    let mut parts = header.split(' ');
    if parts.next() != Some(MAGIC) {
        return Err(NluError::Parse("not a model file".into()));
    }
    let version: u32 = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| NluError::Parse("bad model format version".into()))?;
    if version != FORMAT_VERSION {
        return Err(NluError::Version(version));
    }
    let found = parts.next().unwrap_or_default();
    if found != kind {
        return Err(NluError::Parse(format!("expected a {kind} model, found {found:?}")));
    }
    serde_json::from_str(body).map_err(|e| NluError::Parse(e.to_string()))
}

pub fn save_model<M: Serialize>(path: impl AsRef<Path>, kind: &str, model: &M) -> Result<(), NluError> {
    let path = path.as_ref();
    std::fs::write(path, to_model_string(kind, model)?)
        .map_err(|e| NluError::Io(format!("{}: {e}", path.display())))
}

pub fn load_model<M: DeserializeOwned>(path: impl AsRef<Path>, kind: &str) -> Result<M, NluError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| NluError::Io(format!("{}: {e}", path.display())))?;
    from_model_str(kind, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_checked() {
        let s = to_model_string("svm", &vec![1.0f64, 2.0]).unwrap();
        assert!(s.starts_with("SCHOLARBOT-MODEL 1 svm\n"));
        assert_eq!(from_model_str::<Vec<f64>>("svm", &s).unwrap(), vec![1.0, 2.0]);
        assert!(from_model_str::<Vec<f64>>("hmm", &s).is_err());
        assert!(matches!(
            from_model_str::<Vec<f64>>("svm", "SCHOLARBOT-MODEL 9 svm\n[]"),
            Err(NluError::Version(9))
        ));
        assert!(from_model_str::<Vec<f64>>("svm", "[1.0]").is_err());
    }
}
