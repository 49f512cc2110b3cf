"""
Vistas em tons de cinza de uma malha a partir do rig icosaédrico.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
from scipy import ndimage

from plugins.geometria.malha import Malha, RigCameras, look_at
from plugins.renderizacao.imagem import Imagem
from plugins.renderizacao.rasterizador import Camera, ModoSombreamento, Sombreamento, rasterize
from utils.erros import ErroDirecaoDegenerada, ErroMascaraVazia, ErroParametroInvalido

# ============================================================
# PARÂMETROS PADRÃO DAS VISTAS
# ============================================================

FOV_VISTAS = np.deg2rad(40.0)
RESOLUCAO_VISTAS = 128
FRACAO_PREENCHIMENTO = 0.7
AMBIENTE_VISTAS = 0.15
ALBEDO_VISTAS = 0.85

# Up alternativo quando o olho é paralelo ao up_hint do rig
_UPS_ALTERNATIVOS = (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))


def crop_to_extent(
    imagem: Imagem,
    mascara: np.ndarray,
    fracao: float = FRACAO_PREENCHIMENTO,
    lado_saida: Optional[int] = None,
    fundo: float = 0.0,
) -> Imagem:
    """
    Reamostra a imagem em um quadrado onde a maior dimensão do objeto ocupa
    `fracao` do lado, com o objeto centralizado (bilinear).

    Raises:
        ErroMascaraVazia: máscara sem pixels
        ErroParametroInvalido: fracao fora de (0, 1]
    """
    if not 0.0 < fracao <= 1.0:
        raise ErroParametroInvalido(f"fração deve estar em (0, 1]: {fracao}")
    mascara = np.asarray(mascara, dtype=bool)
    if not mascara.any():
        raise ErroMascaraVazia("máscara de cobertura vazia")

    linhas = np.nonzero(mascara.any(axis=1))[0]
    colunas = np.nonzero(mascara.any(axis=0))[0]
    l0, l1, c0, c1 = linhas[0], linhas[-1], colunas[0], colunas[-1]
    lado_objeto = max(l1 - l0 + 1, c1 - c0 + 1)

    lado = int(lado_saida or imagem.altura)
    escala = lado_objeto / (fracao * lado)
    centro_y = (l0 + l1 + 1) / 2.0
    centro_x = (c0 + c1 + 1) / 2.0

    u = np.arange(lado) + 0.5 - lado / 2.0
    ys = centro_y + u * escala - 0.5
    xs = centro_x + u * escala - 0.5
    grade_y, grade_x = np.meshgrid(ys, xs, indexing="ij")
    canais = [
        ndimage.map_coordinates(imagem.dados[:, :, c], [grade_y, grade_x], order=1, mode="constant", cval=fundo)
        for c in range(imagem.canais)
    ]
    return Imagem(np.clip(np.stack(canais, axis=-1), 0.0, 1.0))


def camera_da_vista(olho: np.ndarray, rig: RigCameras, resolucao: int, fov: float = FOV_VISTAS) -> Camera:
    """Câmera no olho `olho·raio` apontada para a origem."""
    posicao = np.asarray(olho, dtype=np.float64) * rig.raio
    for up in (rig.up_hint, *_UPS_ALTERNATIVOS):
        try:
            pose = look_at(posicao, np.zeros(3), up)
            break
        except ErroDirecaoDegenerada:
            continue
    return Camera(pose, fov, perto=0.1, longe=100.0, resolucao=(resolucao, resolucao))


def _renderizar_vista(malha, olho, rig, resolucao, lado_saida, fracao, sombreamento) -> Imagem:
    camera = camera_da_vista(olho, rig, resolucao)
    resultado = rasterize(malha, camera, sombreamento, fundo=0.0, canais=1)
    return crop_to_extent(resultado.imagem, resultado.mascara, fracao, lado_saida, fundo=0.0)


def render_views(
    malha: Malha,
    rig: RigCameras,
    resolucao: int = RESOLUCAO_VISTAS,
    lado_saida: Optional[int] = None,
    fracao: float = FRACAO_PREENCHIMENTO,
    sombreamento: Optional[Sombreamento] = None,
    n_threads: int = 1,
) -> List[Imagem]:
    """
    Renderiza uma vista por câmera do rig, na ordem fixa dos olhos.

    Cada vista usa headlight Lambert (ambiente 0.15, albedo 0.85), fundo 0 e
    é recortada por crop_to_extent.
    """
    sombreamento = sombreamento or Sombreamento(
        ModoSombreamento.HEADLIGHT, ambiente=AMBIENTE_VISTAS, albedo=ALBEDO_VISTAS
    )

    def renderizar(olho):
        return _renderizar_vista(malha, olho, rig, resolucao, lado_saida, fracao, sombreamento)

    if n_threads <= 1:
        return [renderizar(olho) for olho in rig.olhos]
    with ThreadPoolExecutor(max_workers=n_threads) as executor:
        return list(executor.map(renderizar, rig.olhos))
