"""
Aumento de dados em tempo de treino: flips, translação, rotação, escala,
contraste e brilho. Parâmetros sorteados deterministicamente por semente.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from plugins.renderizacao.imagem import Imagem

# ============================================================
# FAIXAS DOS PARÂMETROS
# ============================================================

PROB_FLIP = 0.5
TRANSLACAO_MAX = 0.10  # fração do lado
ROTACAO_MAX = np.deg2rad(15.0)
ESCALA_MIN, ESCALA_MAX = 0.8, 1.25
CONTRASTE_MIN, CONTRASTE_MAX = 0.7, 1.3
BRILHO_MAX = 0.2


@dataclass(frozen=True)
class ParametrosAumento:
    flip_horizontal: bool = False
    flip_vertical: bool = False
    translacao_x: float = 0.0
    translacao_y: float = 0.0
    rotacao: float = 0.0
    escala: float = 1.0
    contraste: float = 1.0
    brilho: float = 0.0

    @classmethod
    def identidade(cls) -> "ParametrosAumento":
        return cls()

    @property
    def afim_identidade(self) -> bool:
        return (
            self.translacao_x == 0.0
            and self.translacao_y == 0.0
            and self.rotacao == 0.0
            and self.escala == 1.0
        )


def amostrar_parametros_aumento(semente: int) -> ParametrosAumento:
    rng = np.random.default_rng(semente)
    return ParametrosAumento(
        flip_horizontal=bool(rng.random() < PROB_FLIP),
        flip_vertical=bool(rng.random() < PROB_FLIP),
        translacao_x=float(rng.uniform(-TRANSLACAO_MAX, TRANSLACAO_MAX)),
        translacao_y=float(rng.uniform(-TRANSLACAO_MAX, TRANSLACAO_MAX)),
        rotacao=float(rng.uniform(-ROTACAO_MAX, ROTACAO_MAX)),
        # log-uniforme: simétrica entre reduzir e ampliar
        escala=float(np.exp(rng.uniform(np.log(ESCALA_MIN), np.log(ESCALA_MAX)))),
        contraste=float(rng.uniform(CONTRASTE_MIN, CONTRASTE_MAX)),
        brilho=float(rng.uniform(-BRILHO_MAX, BRILHO_MAX)),
    )


def _afim(dados: np.ndarray, p: ParametrosAumento) -> np.ndarray:
    altura, largura, _ = dados.shape
    centro = np.array([(altura - 1) / 2.0, (largura - 1) / 2.0])
    deslocamento = np.array([p.translacao_y * altura, p.translacao_x * largura])
    c, s = np.cos(p.rotacao), np.sin(p.rotacao)
    rotacao = np.array([[c, -s], [s, c]])
    # Mapeamento saída -> entrada: in = c + R⁻¹(out - c - t)/escala
    matriz = rotacao.T / p.escala
    offset = centro - matriz @ (centro + deslocamento)
    return np.stack(
        [
            ndimage.affine_transform(dados[:, :, k], matriz, offset=offset, order=1, mode="nearest")
            for k in range(dados.shape[2])
        ],
        axis=-1,
    )


def aplicar_aumento(imagem: Imagem, params: ParametrosAumento) -> Imagem:
    dados = imagem.dados
    if params.flip_horizontal:
        dados = dados[:, ::-1]
    if params.flip_vertical:
        dados = dados[::-1]
    if not params.afim_identidade:
        dados = _afim(dados, params)
    if params.contraste != 1.0 or params.brilho != 0.0:
        media = dados.mean()
        dados = (dados - media) * params.contraste + media + params.brilho
    return Imagem(np.clip(dados, 0.0, 1.0))


def augment(imagem: Imagem, semente: int) -> Imagem:
    """Aplica o aumento sorteado para `semente`; dimensões e canais preservados."""
    return aplicar_aumento(imagem, amostrar_parametros_aumento(semente))
