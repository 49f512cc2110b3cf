"""
Tensor com diferenciação automática em modo reverso.

Cada operação registra os pais e um fechamento `_retropropagar(grad_saida)`
que acumula (+=) as contribuições nos gradientes dos pais. `backward()`
percorre o grafo em ordem topológica reversa exata.
"""

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.erros import ErroBackwardNaoEscalar, ErroFormaIncompativel

# Precisão de treino; a verificação de gradientes usa float64
_PRECISAO = {"padrao": np.float32}
# Gravação do grafo por thread (inferência concorrente não interfere no treino)
_GRAFO = threading.local()


def _grafo_ativo() -> bool:
    return getattr(_GRAFO, "ativo", True)


def precisao_padrao() -> np.dtype:
    return np.dtype(_PRECISAO["padrao"])


def definir_precisao(dtype) -> None:
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"precisão suportada: float32 ou float64 (recebido {dtype})")
    _PRECISAO["padrao"] = dtype.type


@contextmanager
def precisao(dtype):
    """Altera temporariamente a precisão padrão de novos tensores."""
    anterior = _PRECISAO["padrao"]
    definir_precisao(dtype)
    try:
        yield
    finally:
        _PRECISAO["padrao"] = anterior


@contextmanager
def sem_grad():
    """Desliga a gravação do grafo (inferência)."""
    anterior = _grafo_ativo()
    _GRAFO.ativo = False
    try:
        yield
    finally:
        _GRAFO.ativo = anterior


Operando = Union["Tensor", float, int, np.ndarray]


class Tensor:
    """
    Attributes:
        dados: np.ndarray (float32 ou float64)
        requer_grad: participa do backward
        grad: mesmo formato de `dados`, preenchido por backward()
    """

    __slots__ = ("dados", "requer_grad", "grad", "_pais", "_retropropagar", "_op")

    def __init__(
        self,
        dados,
        requer_grad: bool = False,
        _pais: Tuple["Tensor", ...] = (),
        _op: str = "",
        dtype=None,
    ):
        if isinstance(dados, Tensor):
            dados = dados.dados
        arr = np.asarray(dados)
        if dtype is None:
            dtype = arr.dtype if np.issubdtype(arr.dtype, np.floating) else precisao_padrao()
        self.dados = np.asarray(arr, dtype=dtype)
        self.requer_grad = requer_grad
        self.grad: Optional[np.ndarray] = None
        self._pais = _pais
        self._retropropagar: Optional[Callable[[np.ndarray], None]] = None
        self._op = _op

    # --------------------------------------------------------
    # Propriedades
    # --------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.dados.shape

    @property
    def dtype(self) -> np.dtype:
        return self.dados.dtype

    @property
    def ndim(self) -> int:
        return self.dados.ndim

    @property
    def size(self) -> int:
        return self.dados.size

    def item(self) -> float:
        return float(self.dados.reshape(-1)[0])

    def zerar_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requer_grad={self.requer_grad}, op='{self._op}')"

    # --------------------------------------------------------
    # Grafo
    # --------------------------------------------------------

    def _acumular(self, contribuicao: np.ndarray) -> None:
        if not self.requer_grad:
            return
        contribuicao = np.asarray(contribuicao, dtype=self.dados.dtype).reshape(self.dados.shape)
        if self.grad is None:
            self.grad = contribuicao.copy()
        else:
            self.grad = self.grad + contribuicao

    def backward(self) -> "Grafo":
        """
        Retropropaga a partir deste escalar.

        Raises:
            ErroBackwardNaoEscalar: tensor com mais de um elemento
        """
        if self.size != 1:
            raise ErroBackwardNaoEscalar(f"backward exige escalar (formato {self.shape})")
        grafo = Grafo.de_raiz(self)
        self.grad = np.ones_like(self.dados)
        for no in reversed(grafo.nos):
            if no._retropropagar is not None and no.grad is not None:
                no._retropropagar(no.grad)
        return grafo

    # --------------------------------------------------------
    # Aritmética
    # --------------------------------------------------------

    def __add__(self, outro: Operando) -> "Tensor":
        outro = como_tensor(outro, self.dtype)
        saida = _novo(self.dados + outro.dados, (self, outro), "add")

        def _retropropagar(g):
            self._acumular(_reduzir_broadcast(g, self.shape))
            outro._acumular(_reduzir_broadcast(g, outro.shape))

        saida._retropropagar = _retropropagar
        return saida

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        saida = _novo(-self.dados, (self,), "neg")
        saida._retropropagar = lambda g: self._acumular(-g)
        return saida

    def __sub__(self, outro: Operando) -> "Tensor":
        return self + (-como_tensor(outro, self.dtype))

    def __rsub__(self, outro: Operando) -> "Tensor":
        return como_tensor(outro, self.dtype) + (-self)

    def __mul__(self, outro: Operando) -> "Tensor":
        outro = como_tensor(outro, self.dtype)
        saida = _novo(self.dados * outro.dados, (self, outro), "mul")

        def _retropropagar(g):
            self._acumular(_reduzir_broadcast(g * outro.dados, self.shape))
            outro._acumular(_reduzir_broadcast(g * self.dados, outro.shape))

        saida._retropropagar = _retropropagar
        return saida

    __rmul__ = __mul__

    def soma(self) -> "Tensor":
        saida = _novo(np.sum(self.dados), (self,), "soma")
        saida._retropropagar = lambda g: self._acumular(np.broadcast_to(g, self.shape))
        return saida

    def media(self) -> "Tensor":
        n = self.size
        saida = _novo(np.mean(self.dados), (self,), "media")
        saida._retropropagar = lambda g: self._acumular(np.broadcast_to(g / n, self.shape))
        return saida

    def reshape(self, *forma) -> "Tensor":
        forma_original = self.shape
        saida = _novo(self.dados.reshape(*forma), (self,), "reshape")
        saida._retropropagar = lambda g: self._acumular(np.reshape(g, forma_original))
        return saida


@dataclass
class Grafo:
    """Registro topologicamente ordenado (pais antes dos filhos) das operações."""

    nos: List[Tensor] = field(default_factory=list)

    @classmethod
    def de_raiz(cls, raiz: Tensor) -> "Grafo":
        # DFS iterativa em pós-ordem
        ordem: List[Tensor] = []
        visitados = set()
        pilha = [(raiz, False)]
        while pilha:
            no, expandido = pilha.pop()
            if expandido:
                ordem.append(no)
                continue
            if id(no) in visitados:
                continue
            visitados.add(id(no))
            pilha.append((no, True))
            for pai in reversed(no._pais):
                if id(pai) not in visitados:
                    pilha.append((pai, False))
        return cls(ordem)

    def __len__(self) -> int:
        return len(self.nos)


# ============================================================
# AUXILIARES
# ============================================================

def como_tensor(valor: Operando, dtype=None) -> Tensor:
    if isinstance(valor, Tensor):
        return valor
    return Tensor(np.asarray(valor, dtype=dtype or precisao_padrao()))


def _novo(dados: np.ndarray, pais: Sequence[Tensor], op: str) -> Tensor:
    requer = _grafo_ativo() and any(p.requer_grad for p in pais)
    return Tensor(np.asarray(dados), requer_grad=requer, _pais=tuple(pais) if requer else (), _op=op)


def _reduzir_broadcast(grad: np.ndarray, forma: Tuple[int, ...]) -> np.ndarray:
    """Soma os eixos expandidos por broadcast para voltar a `forma`."""
    grad = np.asarray(grad)
    while grad.ndim > len(forma):
        grad = grad.sum(axis=0)
    for eixo, tamanho in enumerate(forma):
        if tamanho == 1 and grad.shape[eixo] != 1:
            grad = grad.sum(axis=eixo, keepdims=True)
    if grad.shape != tuple(forma):
        raise ErroFormaIncompativel(f"gradiente {grad.shape} incompatível com {forma}")
    return grad


def parametro(dados, dtype=None) -> Tensor:
    """Tensor folha treinável."""
    return Tensor(dados, requer_grad=True, dtype=dtype or precisao_padrao())
