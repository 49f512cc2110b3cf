"""
Operadores diferenciáveis usados pela rede siamesa.

Convenções: imagens/mapas de ativação são (C, H, W) sem dimensão de lote.
Empates nos operadores de máximo vão para o primeiro elemento em ordem de
varredura (argmax do numpy).
"""

from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from plugins.autograd.tensor import Tensor, _novo, como_tensor
from utils.erros import ErroFormaIncompativel, ErroParametroInvalido
from utils.logging_config import get_logger

logger = get_logger(__name__)


# ============================================================
# CONVOLUÇÃO
# ============================================================

def _janelas(x: np.ndarray, k: int, passo: int) -> np.ndarray:
    """(C, H, W) -> visão (C, Ho, Wo, k, k) sem cópia."""
    return sliding_window_view(x, (k, k), axis=(1, 2))[:, ::passo, ::passo]


def conv2d(x: Tensor, peso: Tensor, vies: Tensor, passo: int = 1, padding: int = 0) -> Tensor:
    """
    Correlação cruzada 2D mais viés (im2col + produto matricial).

    Raises:
        ErroFormaIncompativel: formas inconsistentes, kernel par ou saída não inteira
    """
    if x.ndim != 3 or peso.ndim != 4 or vies.ndim != 1:
        raise ErroFormaIncompativel(f"conv2d espera (C,H,W), (O,C,k,k), (O,); recebido {x.shape}, {peso.shape}, {vies.shape}")
    c_in, altura, largura = x.shape
    c_out, c_peso, k, k2 = peso.shape
    if c_peso != c_in or k != k2 or k % 2 == 0 or vies.shape[0] != c_out:
        raise ErroFormaIncompativel(f"conv2d incompatível: entrada {x.shape}, peso {peso.shape}, viés {vies.shape}")
    if passo < 1 or padding < 0:
        raise ErroParametroInvalido(f"passo/padding inválidos: {passo}, {padding}")
    alt_p, larg_p = altura + 2 * padding, largura + 2 * padding
    if alt_p < k or larg_p < k or (alt_p - k) % passo or (larg_p - k) % passo:
        raise ErroFormaIncompativel(f"saída não inteira para entrada {x.shape}, k={k}, passo={passo}, padding={padding}")
    alt_s, larg_s = (alt_p - k) // passo + 1, (larg_p - k) // passo + 1

    xp = np.pad(x.dados, ((0, 0), (padding, padding), (padding, padding))) if padding else x.dados
    colunas = _janelas(xp, k, passo).transpose(1, 2, 0, 3, 4).reshape(alt_s * larg_s, c_in * k * k)
    matriz_peso = peso.dados.reshape(c_out, -1)
    saida_dados = (colunas @ matriz_peso.T).T.reshape(c_out, alt_s, larg_s) + vies.dados[:, None, None]
    saida = _novo(saida_dados, (x, peso, vies), "conv2d")
    logger.trace("[autograd] conv2d %s * %s -> %s (passo %d, padding %d)", x.shape, peso.shape, saida.shape, passo, padding)

    def _retropropagar(g):
        g2 = g.reshape(c_out, -1)
        peso._acumular((g2 @ colunas).reshape(peso.shape))
        vies._acumular(g.sum(axis=(1, 2)))
        if not x.requer_grad:
            return
        dcolunas = (g2.T @ matriz_peso).reshape(alt_s, larg_s, c_in, k, k)
        dxp = np.zeros((c_in, alt_p, larg_p), dtype=g.dtype)
        # col2im: k² somas com passo
        for i in range(k):
            for j in range(k):
                dxp[:, i:i + passo * alt_s:passo, j:j + passo * larg_s:passo] += dcolunas[:, :, :, i, j].transpose(2, 0, 1)
        if padding:
            dxp = dxp[:, padding:padding + altura, padding:padding + largura]
        x._acumular(dxp)

    saida._retropropagar = _retropropagar
    return saida


# ============================================================
# ATIVAÇÃO E POOLING
# ============================================================

def relu(x: Tensor) -> Tensor:
    ativo = x.dados > 0
    saida = _novo(np.where(ativo, x.dados, 0).astype(x.dtype), (x,), "relu")
    saida._retropropagar = lambda g: x._acumular(g * ativo)
    return saida


def maxpool2d(x: Tensor, janela: int = 2, passo: int = 2) -> Tensor:
    if x.ndim != 3:
        raise ErroFormaIncompativel(f"maxpool2d espera (C,H,W): {x.shape}")
    c, altura, largura = x.shape
    if altura < janela or largura < janela:
        raise ErroFormaIncompativel(f"entrada {x.shape} menor que a janela {janela}")
    alt_s, larg_s = (altura - janela) // passo + 1, (largura - janela) // passo + 1
    blocos = _janelas(x.dados, janela, passo)[:, :alt_s, :larg_s].reshape(c, alt_s, larg_s, janela * janela)
    argmax = np.argmax(blocos, axis=-1)
    saida = _novo(np.take_along_axis(blocos, argmax[..., None], axis=-1)[..., 0], (x,), "maxpool2d")

    def _retropropagar(g):
        canais, linhas_s, colunas_s = np.indices(argmax.shape)
        linhas = linhas_s * passo + argmax // janela
        colunas = colunas_s * passo + argmax % janela
        dx = np.zeros(x.shape, dtype=g.dtype)
        np.add.at(dx, (canais, linhas, colunas), g)
        x._acumular(dx)

    saida._retropropagar = _retropropagar
    return saida


def global_maxpool(x: Tensor) -> Tensor:
    """(C, H, W) -> (C,)."""
    if x.ndim != 3:
        raise ErroFormaIncompativel(f"global_maxpool espera (C,H,W): {x.shape}")
    plano = x.dados.reshape(x.shape[0], -1)
    argmax = np.argmax(plano, axis=1)
    canais = np.arange(x.shape[0])
    saida = _novo(plano[canais, argmax], (x,), "global_maxpool")

    def _retropropagar(g):
        dx = np.zeros(plano.shape, dtype=g.dtype)
        dx[canais, argmax] = g
        x._acumular(dx.reshape(x.shape))

    saida._retropropagar = _retropropagar
    return saida


def dense(x: Tensor, peso: Tensor, vies: Tensor) -> Tensor:
    """W·x + b com x (N,), W (M, N), b (M,)."""
    if x.ndim != 1 or peso.ndim != 2 or peso.shape[1] != x.shape[0] or vies.shape != (peso.shape[0],):
        raise ErroFormaIncompativel(f"dense incompatível: x {x.shape}, W {peso.shape}, b {vies.shape}")
    saida = _novo(peso.dados @ x.dados + vies.dados, (x, peso, vies), "dense")

    def _retropropagar(g):
        x._acumular(peso.dados.T @ g)
        peso._acumular(np.outer(g, x.dados))
        vies._acumular(g)

    saida._retropropagar = _retropropagar
    return saida


# ============================================================
# MÁXIMO ENTRE TENSORES
# ============================================================

def empilhar(tensores: Sequence[Tensor]) -> Tensor:
    """Lista de K tensores de mesma forma -> (K, ...)."""
    if not tensores:
        raise ErroParametroInvalido("empilhar exige ao menos um tensor")
    forma = tensores[0].shape
    if any(t.shape != forma for t in tensores):
        raise ErroFormaIncompativel(f"formas diferentes: {[t.shape for t in tensores]}")
    saida = _novo(np.stack([t.dados for t in tensores]), tuple(tensores), "empilhar")

    def _retropropagar(g):
        for indice, tensor in enumerate(tensores):
            tensor._acumular(g[indice])

    saida._retropropagar = _retropropagar
    return saida


def max_eixo0(x: Tensor) -> Tensor:
    argmax = np.argmax(x.dados, axis=0)
    saida = _novo(np.take_along_axis(x.dados, argmax[None], axis=0)[0], (x,), "max_eixo0")

    def _retropropagar(g):
        dx = np.zeros(x.shape, dtype=g.dtype)
        np.put_along_axis(dx, argmax[None], np.asarray(g)[None], axis=0)
        x._acumular(dx)

    saida._retropropagar = _retropropagar
    return saida


def elementwise_max(tensores: Sequence[Tensor]) -> Tensor:
    """
    Máximo elemento a elemento de K tensores (gradiente só para o vencedor).

    Raises:
        ErroParametroInvalido: lista vazia
        ErroFormaIncompativel: formas diferentes
    """
    return max_eixo0(empilhar(tensores))


# ============================================================
# MÉTRICA E PERDA
# ============================================================

def l2_normalize(x: Tensor, eps: float = 1e-12) -> Tensor:
    """x / max(‖x‖₂, eps)."""
    norma = float(np.sqrt(np.sum(x.dados.astype(np.float64) ** 2)))
    denominador = max(norma, eps)
    y = x.dados / x.dtype.type(denominador)
    saida = _novo(y, (x,), "l2_normalize")

    def _retropropagar(g):
        if norma > eps:
            x._acumular((g - y * np.dot(y.ravel(), np.ravel(g))) / denominador)
        else:
            x._acumular(g / denominador)

    saida._retropropagar = _retropropagar
    return saida


def produto_escalar(u: Tensor, v: Tensor) -> Tensor:
    if u.shape != v.shape:
        raise ErroFormaIncompativel(f"produto escalar entre {u.shape} e {v.shape}")
    saida = _novo(np.dot(u.dados.ravel(), v.dados.ravel()), (u, v), "dot")

    def _retropropagar(g):
        u._acumular(g * v.dados)
        v._acumular(g * u.dados)

    saida._retropropagar = _retropropagar
    return saida


def cosine_distance(u: Tensor, v: Tensor) -> Tensor:
    """1 − u·v para vetores unitários (faixa [0, 2])."""
    return 1.0 - produto_escalar(u, v)


def contrastive_loss(d: Tensor, igual: int, margem: float = 1.0) -> Tensor:
    """igual=1: d²; igual=0: max(0, margem − d)²."""
    d = como_tensor(d)
    if igual:
        return d * d
    folga = relu(margem - d)
    return folga * folga


def media_escalares(valores: Sequence[Tensor]) -> Tensor:
    return empilhar([v.reshape(()) for v in valores]).media()
