use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::dto::Object;
use crate::error::CliError;

/// Loaded objects keyed by source name, plus the global settings.
pub struct Workspace {
    pub tol: f64,
    pub seed: u64,
    registry: BTreeMap<String, Object>,
}

impl Workspace {
    pub fn new(tol: f64, seed: u64) -> Self {
        Self { tol, seed, registry: BTreeMap::new() }
    }

    /// Reads an object from a file, or from stdin for `None` and `-`. Each
    /// source is read once.
    pub fn load(&mut self, path: Option<&Path>) -> Result<Object, CliError> {
        let name = match path {
            Some(p) if p.as_os_str() != "-" => p.display().to_string(),
            _ => "<stdin>".to_string(),
        };
        if let Some(obj) = self.registry.get(&name) {
            return Ok(obj.clone());
        }
        let text = if name == "<stdin>" {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::input(&name, &format!("cannot read: {e}")))?;
            s
        } else {
            std::fs::read_to_string(&name).map_err(|e| CliError::input(&name, &format!("cannot read: {e}")))?
        };
        let obj = parse(&text, &name)?;
        self.registry.insert(name, obj.clone());
        Ok(obj)
    }
}

pub fn parse(text: &str, source: &str) -> Result<Object, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let where_ = if path == "." { source.to_string() } else { format!("{source}:{path}") };
        CliError::input(&where_, &e.into_inner().to_string())
    })
}
