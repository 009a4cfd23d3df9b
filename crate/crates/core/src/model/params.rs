use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use safetensors::tensor::{Dtype, TensorView};
use safetensors::SafeTensors;

use super::ModelError;

/// Named 2-D parameter tensors. Vectors (biases) are stored as `1 x n`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    tensors: BTreeMap<String, Array2<f64>>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Array2<f64>) {
        self.tensors.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> &Array2<f64> {
        self.tensors
            .get(name)
            .unwrap_or_else(|| panic!("parameter '{name}' missing"))
    }

    pub fn get_mut(&mut self, name: &str) -> &mut Array2<f64> {
        self.tensors
            .get_mut(name)
            .unwrap_or_else(|| panic!("parameter '{name}' missing"))
    }

    pub fn try_get(&self, name: &str) -> Option<&Array2<f64>> {
        self.tensors.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tensors.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array2<f64>)> {
        self.tensors.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Array2<f64>)> {
        self.tensors.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.keys().map(String::as_str)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            tensors: self
                .tensors
                .iter()
                .map(|(k, v)| (k.clone(), Array2::zeros(v.raw_dim())))
                .collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for t in self.tensors.values_mut() {
            t.fill(0.0);
        }
    }

    pub fn num_values(&self) -> usize {
        self.tensors.values().map(|t| t.len()).sum()
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors
            .values()
            .map(|t| t.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors.values_mut() {
            t.mapv_inplace(|v| v * factor);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors.values().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn write_safetensors(&self, path: &Path) -> Result<(), ModelError> {
        let bytes: Vec<(String, Vec<u8>, Vec<usize>)> = self
            .tensors
            .iter()
            .map(|(name, t)| {
                let data = t.iter().flat_map(|v| v.to_le_bytes()).collect();
                (name.clone(), data, t.shape().to_vec())
            })
            .collect();
        let views = bytes
            .iter()
            .map(|(name, data, shape)| {
                TensorView::new(Dtype::F64, shape.clone(), data)
                    .map(|v| (name.clone(), v))
                    .map_err(|e| ModelError::Format(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let out = safetensors::serialize(views, &None::<HashMap<String, String>>)
            .map_err(|e| ModelError::Format(e.to_string()))?;
        std::fs::write(path, out).map_err(|e| ModelError::io(path, e))
    }

    pub fn read_safetensors(path: &Path) -> Result<Self, ModelError> {
        let bytes = std::fs::read(path).map_err(|e| ModelError::io(path, e))?;
        let st = SafeTensors::deserialize(&bytes).map_err(|e| ModelError::Format(e.to_string()))?;
        let mut params = Params::new();
        for (name, view) in st.tensors() {
            if view.dtype() != Dtype::F64 || view.shape().len() != 2 {
                return Err(ModelError::Format(format!(
                    "tensor '{name}' must be a 2-D f64 tensor"
                )));
            }
            let values: Vec<f64> = view
                .data()
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            let shape = (view.shape()[0], view.shape()[1]);
            let arr = Array2::from_shape_vec(shape, values)
                .map_err(|e| ModelError::Format(e.to_string()))?;
            params.insert(name, arr);
        }
        Ok(params)
    }
}

pub(crate) fn normal_matrix<R: Rng>(rows: usize, cols: usize, std: f64, rng: &mut R) -> Array2<f64> {
    let dist = Normal::new(0.0, std).expect("positive std");
    Array2::from_shape_fn((rows, cols), |_| dist.sample(rng))
}
