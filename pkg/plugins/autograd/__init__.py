from plugins.autograd.operacoes import (
    contrastive_loss,
    conv2d,
    cosine_distance,
    dense,
    elementwise_max,
    global_maxpool,
    l2_normalize,
    maxpool2d,
    relu,
)
from plugins.autograd.otimizador import Adam, EstadoAdam, adam_step
from plugins.autograd.tensor import Grafo, Tensor, parametro, precisao, sem_grad

__all__ = [
    "Tensor",
    "Grafo",
    "parametro",
    "precisao",
    "sem_grad",
    "conv2d",
    "relu",
    "maxpool2d",
    "global_maxpool",
    "dense",
    "elementwise_max",
    "l2_normalize",
    "cosine_distance",
    "contrastive_loss",
    "Adam",
    "EstadoAdam",
    "adam_step",
]
