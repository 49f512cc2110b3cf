"""
Imagem raster densa (1 ou 3 canais, valores em [0, 1]) e exportação PNG.

A quantização round(v·255) acontece somente na exportação; o pipeline
interno trabalha em ponto flutuante.
"""

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image as ImagemPil
from scipy import ndimage

from utils.erros import ErroArquivoCorrompido, ErroFormaIncompativel, ErroParametroInvalido

# Tolerância para valores ligeiramente fora de [0, 1] por arredondamento
_TOLERANCIA_FAIXA = 1e-9


class Imagem:
    """
    Imagem row-major com forma (altura, largura, canais).

    Attributes:
        dados: np.ndarray float (H, W, C), C em {1, 3}
    """

    __slots__ = ("dados",)

    def __init__(self, dados: np.ndarray):
        dados = np.asarray(dados, dtype=np.float64)
        if dados.ndim == 2:
            dados = dados[:, :, None]
        if dados.ndim != 3 or dados.shape[2] not in (1, 3):
            raise ErroFormaIncompativel(f"imagem deve ter forma (H, W, 1|3), recebido {dados.shape}")
        if dados.size:
            minimo, maximo = float(dados.min()), float(dados.max())
            if minimo < -_TOLERANCIA_FAIXA or maximo > 1.0 + _TOLERANCIA_FAIXA or not np.isfinite(dados).all():
                raise ErroParametroInvalido(f"valores fora de [0, 1]: [{minimo}, {maximo}]")
            dados = np.clip(dados, 0.0, 1.0)
        self.dados = dados

    @classmethod
    def preenchida(cls, largura: int, altura: int, canais: int = 1, valor: float = 0.0) -> "Imagem":
        return cls(np.full((altura, largura, canais), float(valor)))

    @property
    def altura(self) -> int:
        return self.dados.shape[0]

    @property
    def largura(self) -> int:
        return self.dados.shape[1]

    @property
    def canais(self) -> int:
        return self.dados.shape[2]

    def para_uint8(self) -> np.ndarray:
        return np.round(self.dados * 255.0).astype(np.uint8)

    def __eq__(self, outra) -> bool:
        return isinstance(outra, Imagem) and np.array_equal(self.dados, outra.dados)

    def __repr__(self) -> str:
        return f"<Imagem {self.largura}x{self.altura}x{self.canais}>"


def redimensionar(imagem: Imagem, largura: int, altura: int) -> Imagem:
    """Reamostragem bilinear alinhando os centros dos pixels de canto a canto."""
    if (imagem.largura, imagem.altura) == (largura, altura):
        return imagem
    if largura <= 0 or altura <= 0:
        raise ErroParametroInvalido(f"tamanho inválido: {largura}x{altura}")
    ys = (np.arange(altura) + 0.5) * imagem.altura / altura - 0.5
    xs = (np.arange(largura) + 0.5) * imagem.largura / largura - 0.5
    grade_y, grade_x = np.meshgrid(ys, xs, indexing="ij")
    canais = [
        ndimage.map_coordinates(imagem.dados[:, :, c], [grade_y, grade_x], order=1, mode="nearest")
        for c in range(imagem.canais)
    ]
    return Imagem(np.clip(np.stack(canais, axis=-1), 0.0, 1.0))


def salvar_png(imagem: Imagem, caminho: Union[str, Path]) -> Path:
    """Grava PNG 8 bits (L para 1 canal, RGB para 3)."""
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    pixels = imagem.para_uint8()
    if imagem.canais == 1:
        ImagemPil.fromarray(pixels[:, :, 0], mode="L").save(caminho)
    else:
        ImagemPil.fromarray(pixels, mode="RGB").save(caminho)
    return caminho


def carregar_png(caminho: Union[str, Path], canais: int = 3) -> Imagem:
    """
    Lê um PNG como Imagem com `canais` canais (1 ou 3).

    Raises:
        ErroArquivoCorrompido: arquivo ilegível
    """
    try:
        with ImagemPil.open(caminho) as pil:
            pil = pil.convert("L" if canais == 1 else "RGB")
            pixels = np.asarray(pil, dtype=np.float64) / 255.0
    except (OSError, ValueError) as e:
        raise ErroArquivoCorrompido(f"falha ao ler imagem {caminho}: {e}") from e
    return Imagem(pixels)
