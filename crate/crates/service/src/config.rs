use std::path::PathBuf;

pub const ENV_PORT: &str = "BURNOUT_PORT";
pub const ENV_DATA_DIR: &str = "BURNOUT_DATA_DIR";
pub const ENV_MODEL_DIR: &str = "BURNOUT_MODEL_DIR";

pub const DEFAULT_PORT: u16 = 8080;
/// Subdirectory of the data dir holding the review packets.
pub const PACKET_DIR: &str = "packets";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{ENV_PORT}={0} is not a valid port")]
    Port(String),
    #[error("model directory {} does not exist", .0.display())]
    MissingModelDir(PathBuf),
    #[error("cannot create data directory {}: {source}", path.display())]
    DataDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub port: u16,
    pub data_dir: PathBuf,
    pub model_dir: PathBuf,
}

impl ServiceConfig {
    pub fn new(port: u16, data_dir: impl Into<PathBuf>, model_dir: impl Into<PathBuf>) -> Self {
        Self {
            port,
            data_dir: data_dir.into(),
            model_dir: model_dir.into(),
        }
    }

    /// Reads the three `BURNOUT_*` variables, falling back to port 8080,
    /// `./data` and `./models`.
    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let port = match get(ENV_PORT) {
            Some(p) => p.trim().parse().map_err(|_| ConfigError::Port(p))?,
            None => DEFAULT_PORT,
        };
        Ok(Self {
            port,
            data_dir: get(ENV_DATA_DIR).map_or_else(|| "data".into(), PathBuf::from),
            model_dir: get(ENV_MODEL_DIR).map_or_else(|| "models".into(), PathBuf::from),
        })
    }

    /// The model dir must already exist; the data dir is created.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.model_dir.is_dir() {
            return Err(ConfigError::MissingModelDir(self.model_dir.clone()));
        }
        std::fs::create_dir_all(&self.data_dir).map_err(|source| ConfigError::DataDir {
            path: self.data_dir.clone(),
            source,
        })
    }

    pub fn packet_dir(&self) -> PathBuf {
        self.data_dir.join(PACKET_DIR)
    }
}
