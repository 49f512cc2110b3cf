"""
Adam com correção de viés e weight decay acoplado (grad += wd·param).

Atualiza `dados` in-place: parâmetros compartilhados entre ramos (mesmo
Tensor) recebem uma única atualização.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from plugins.autograd.tensor import Tensor


@dataclass
class EstadoAdam:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adam_step(
    parametros: Mapping[str, Tensor],
    estado: EstadoAdam,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> EstadoAdam:
    """
    Um passo de Adam usando `param.grad` (ausente = zero).

    Tensores repetidos no mapeamento são atualizados uma vez só.
    """
    estado.t += 1
    correcao1 = 1.0 - beta1 ** estado.t
    correcao2 = 1.0 - beta2 ** estado.t
    vistos = set()
    for nome, param in parametros.items():
        if id(param) in vistos:
            continue
        vistos.add(id(param))
        dados = param.dados
        grad = param.grad if param.grad is not None else np.zeros_like(dados)
        if weight_decay:
            grad = grad + weight_decay * dados
        m = estado.m.get(nome)
        v = estado.v.get(nome)
        if m is None:
            m = np.zeros_like(dados)
            v = np.zeros_like(dados)
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        m_hat = m / correcao1
        v_hat = v / correcao2
        dados -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(dados.dtype)
        estado.m[nome] = m.astype(dados.dtype)
        estado.v[nome] = v.astype(dados.dtype)
    return estado


class Adam:
    """Envoltório com hiperparâmetros fixos sobre adam_step."""

    def __init__(
        self,
        parametros: Mapping[str, Tensor],
        lr: float = 5e-5,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 1e-5,
        estado: EstadoAdam = None,
    ):
        self.parametros = parametros
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.estado = estado or EstadoAdam()

    def zerar_grad(self) -> None:
        for param in self.parametros.values():
            param.zerar_grad()

    def passo(self) -> None:
        adam_step(self.parametros, self.estado, self.lr, self.beta1, self.beta2, self.eps, self.weight_decay)
