//! The learnable graph scoring model and its comparator.

mod adam;
mod model;
mod params;
mod persist;
mod scalar;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use model::{
    accumulate_pair_grad, backward, compare, pair_loss, pair_loss_and_grad, pair_loss_from_logits,
    score, score_graph, ForwardTrace, NonFiniteError, LAYER_NORM_EPS,
};
pub use params::{GemLayer, Geometry, GeometryError, HiddenLayer, LayerNorm, Linear, Params};
pub use persist::{
    decode_params, encode_params, load_params, load_params_file, save_params, save_params_file,
    PersistError, MAGIC,
};
pub use scalar::{gelu, gelu_grad, Scalar};
