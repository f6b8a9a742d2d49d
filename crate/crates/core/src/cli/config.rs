use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

/// `key=value` pairs read from a config file, with the line each came from.
#[derive(Debug, Default)]
pub struct ConfigFile {
    origin: String,
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        ConfigFile::parse(&path.display().to_string(), &text)
    }

    pub fn parse(origin: &str, text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!("{origin}:{}: expected key=value, found {line:?}", i + 1)));
            };
            let key = key.trim().replace('_', "-");
            if let Some((prev, _)) = entries.insert(key.clone(), (i + 1, value.trim().to_string())) {
                return Err(CliError::usage(format!("{origin}:{}: field {key} already set on line {prev}", i + 1)));
            }
        }
        Ok(ConfigFile { origin: origin.to_string(), entries })
    }

    /// Remove and parse `key`.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("{}:{line}: field {key}: {e}", self.origin))),
        }
    }

    /// A flag value if given, else the config value. The config entry is
    /// consumed either way.
    pub fn pick<T: FromStr>(&mut self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let from_file = self.take(key)?;
        Ok(flag.or(from_file))
    }

    pub fn pick_switch(&mut self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.take::<bool>(key)?.unwrap_or(false))
    }

    /// Fail on any entry no command consumed.
    pub fn finish(self) -> Result<(), CliError> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(CliError::usage(format!("{}:{line}: unknown field {key}", self.origin))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_and_file_fills_gaps() {
        let mut c = ConfigFile::parse("c.txt", "depth = 8\ntheta=1/3 # basilica\n").unwrap();
        assert_eq!(c.pick(Some(4usize), "depth").unwrap(), Some(4));
        assert_eq!(c.pick::<String>(None, "theta").unwrap().as_deref(), Some("1/3"));
        c.finish().unwrap();
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let mut c = ConfigFile::parse("c.txt", "\ndepth=x\n").unwrap();
        let e = c.take::<usize>("depth").unwrap_err();
        assert!(e.message.starts_with("c.txt:2: field depth"), "{}", e.message);
        let e = ConfigFile::parse("c.txt", "depth 3\n").unwrap_err();
        assert!(e.message.starts_with("c.txt:1:"));
        let e = ConfigFile::parse("c.txt", "speed=3\n").unwrap().finish().unwrap_err();
        assert_eq!(e.message, "c.txt:1: unknown field speed");
    }
}
