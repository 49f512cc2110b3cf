from plugins.rede.checkpoint import load_checkpoint, save_checkpoint
from plugins.rede.siamesa import (
    ModoCompartilhamento,
    ParametrosRede,
    embed_image,
    embed_shape,
    init_params,
    pair_distance,
)

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "ModoCompartilhamento",
    "ParametrosRede",
    "embed_image",
    "embed_shape",
    "init_params",
    "pair_distance",
]
