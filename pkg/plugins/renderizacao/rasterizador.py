"""
Rasterizador por software: projeção perspectiva, recorte no plano próximo,
z-buffer e sombreamento Lambertiano por pixel (deferred).

Convenção de tela: pixel (coluna i, linha j) tem centro em (i + 0.5, j + 0.5);
y cresce para baixo. Profundidade = -z no referencial da câmera.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from plugins.geometria.malha import Malha, TransformacaoRigida, look_at
from plugins.renderizacao.imagem import Imagem
from utils.erros import ErroAtrasDaCamera, ErroParametroInvalido, ErroResolucaoZero
from utils.logging_config import get_logger

logger = get_logger(__name__)

# Albedo escalar ou textura avaliada em coordenadas do objeto (N, 3) -> (N, C)
Albedo = Union[float, Callable[[np.ndarray], np.ndarray]]
Fundo = Union[float, Sequence[float], np.ndarray]

_EPS_AREA = 1e-12


# ============================================================
# TIPOS
# ============================================================

@dataclass(frozen=True)
class Camera:
    """
    Câmera pinhole.

    Attributes:
        pose: transformação mundo -> câmera
        fov_vertical: campo de visão vertical em radianos
        perto, longe: profundidades de recorte (0 < perto < longe)
        resolucao: (largura, altura) em pixels
    """

    pose: TransformacaoRigida
    fov_vertical: float
    perto: float = 0.05
    longe: float = 100.0
    resolucao: Tuple[int, int] = (128, 128)

    def __post_init__(self):
        if not 0.0 < self.fov_vertical < np.pi:
            raise ErroParametroInvalido(f"fov deve estar em (0, π): {self.fov_vertical}")
        if not 0.0 < self.perto < self.longe:
            raise ErroParametroInvalido(f"exige 0 < perto < longe: {self.perto}, {self.longe}")
        largura, altura = (int(v) for v in self.resolucao)
        object.__setattr__(self, "resolucao", (largura, altura))

    @classmethod
    def olhando_para(cls, olho, alvo, up, fov_vertical: float, resolucao=(128, 128), **kwargs) -> "Camera":
        return cls(look_at(olho, alvo, up), fov_vertical, resolucao=resolucao, **kwargs)

    @property
    def largura(self) -> int:
        return self.resolucao[0]

    @property
    def altura(self) -> int:
        return self.resolucao[1]

    @property
    def focal_px(self) -> float:
        return (self.altura / 2.0) / np.tan(self.fov_vertical / 2.0)

    @property
    def olho(self) -> np.ndarray:
        return self.pose.origem_inversa


class ModoSombreamento(str, Enum):
    HEADLIGHT = "headlight_lambert"
    DIRECIONAL = "directional_lambert"


@dataclass(frozen=True)
class Sombreamento:
    """
    Lambert com piso ambiente.

    Albedo escalar a: valor = ambiente + a·max(0, n·l).
    Albedo textura t(p): valor = t(p)·(ambiente + (1 - ambiente)·max(0, n·l)).
    Resultado sempre limitado a [0, 1].
    """

    modo: ModoSombreamento = ModoSombreamento.HEADLIGHT
    direcao_luz: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    ambiente: float = 0.15
    albedo: Albedo = 0.85

    def __post_init__(self):
        object.__setattr__(self, "modo", ModoSombreamento(self.modo))
        direcao = np.asarray(self.direcao_luz, dtype=np.float64).reshape(3)
        norma = np.linalg.norm(direcao)
        if norma < 1e-12:
            raise ErroParametroInvalido("direção de luz nula")
        object.__setattr__(self, "direcao_luz", direcao / norma)
        if not 0.0 <= self.ambiente <= 1.0:
            raise ErroParametroInvalido(f"ambiente deve estar em [0, 1]: {self.ambiente}")

    @property
    def texturizado(self) -> bool:
        return callable(self.albedo)


@dataclass
class ResultadoRasterizacao:
    imagem: Imagem
    profundidade: np.ndarray  # (H, W); inf onde não há cobertura
    mascara: np.ndarray  # (H, W) bool


# ============================================================
# PROJEÇÃO
# ============================================================

def _projetar(camera: Camera, pontos_camera: np.ndarray) -> np.ndarray:
    """(N, 3) no referencial da câmera -> (N, 3) com (x, y, profundidade)."""
    d = -pontos_camera[:, 2]
    f = camera.focal_px
    x = camera.largura / 2.0 + f * pontos_camera[:, 0] / d
    y = camera.altura / 2.0 - f * pontos_camera[:, 1] / d
    return np.stack([x, y, d], axis=1)


def project_vertex(camera: Camera, ponto) -> Tuple[float, float, float]:
    """
    Projeta um ponto do mundo em coordenadas de pixel.

    Raises:
        ErroAtrasDaCamera: profundidade <= plano próximo
    """
    p_cam = camera.pose.aplicar(np.asarray(ponto, dtype=np.float64).reshape(1, 3))
    profundidade = -p_cam[0, 2]
    if profundidade <= camera.perto:
        raise ErroAtrasDaCamera(f"profundidade {profundidade:.6g} <= perto {camera.perto}")
    x, y, d = _projetar(camera, p_cam)[0]
    return float(x), float(y), float(d)


# ============================================================
# RECORTE NO PLANO PRÓXIMO
# ============================================================

def _recortar_poligono(atributos: np.ndarray, perto: float) -> List[np.ndarray]:
    """
    Sutherland–Hodgman contra o plano d = perto.

    `atributos` (3, K): coluna 2 é z da câmera; retorna triângulos em leque.
    """
    dentro = -atributos[:, 2] > perto
    saida = []
    for i in range(3):
        atual, proximo = atributos[i], atributos[(i + 1) % 3]
        dentro_atual, dentro_proximo = dentro[i], dentro[(i + 1) % 3]
        if dentro_atual:
            saida.append(atual)
        if dentro_atual != dentro_proximo:
            da, dp = -atual[2] - perto, -proximo[2] - perto
            t = da / (da - dp)
            saida.append(atual + t * (proximo - atual))
    return [np.stack([saida[0], saida[k], saida[k + 1]]) for k in range(1, len(saida) - 1)]


# ============================================================
# RASTERIZAÇÃO
# ============================================================

def _preparar_fundo(fundo: Fundo, altura: int, largura: int, canais: int) -> np.ndarray:
    fundo_arr = np.asarray(fundo, dtype=np.float64)
    if fundo_arr.ndim == 0:
        return np.full((altura, largura, canais), float(fundo_arr))
    if fundo_arr.ndim == 1:
        return np.broadcast_to(fundo_arr[:canais], (altura, largura, canais)).copy()
    if fundo_arr.ndim == 2:
        fundo_arr = fundo_arr[:, :, None]
    if fundo_arr.shape[:2] != (altura, largura):
        raise ErroParametroInvalido(f"fundo {fundo_arr.shape} incompatível com {largura}x{altura}")
    if fundo_arr.shape[2] != canais:
        fundo_arr = np.repeat(fundo_arr[:, :, :1], canais, axis=2)
    return fundo_arr.copy()


def _canais_saida(sombreamento: Sombreamento, fundo: Fundo, canais: Optional[int]) -> int:
    if canais is not None:
        return canais
    fundo_arr = np.asarray(fundo)
    if sombreamento.texturizado:
        return 3
    if fundo_arr.ndim == 1 and fundo_arr.size == 3:
        return 3
    if fundo_arr.ndim == 3 and fundo_arr.shape[2] == 3:
        return 3
    return 1


def rasterize(
    malha: Malha,
    camera: Camera,
    sombreamento: Sombreamento,
    fundo: Fundo = 0.0,
    coordenadas_textura: Optional[np.ndarray] = None,
    canais: Optional[int] = None,
) -> ResultadoRasterizacao:
    """
    Rasteriza a malha (já em coordenadas do mundo) vista pela câmera.

    Interpolação perspectivamente correta de normais, posições e coordenadas
    de textura; teste de profundidade estrito (empate: primeiro triângulo vence).

    Args:
        coordenadas_textura: (V, 3) posições onde o albedo-textura é avaliado;
            padrão são os próprios vértices
        canais: força 1 ou 3 canais na saída

    Raises:
        ErroResolucaoZero: largura ou altura nula
    """
    largura, altura = camera.resolucao
    if largura <= 0 or altura <= 0:
        raise ErroResolucaoZero(f"resolução inválida: {largura}x{altura}")

    n_canais = _canais_saida(sombreamento, fundo, canais)
    imagem = _preparar_fundo(fundo, altura, largura, n_canais)
    profundidade = np.full((altura, largura), np.inf)
    mascara = np.zeros((altura, largura), dtype=bool)

    if malha.n_triangulos == 0:
        return ResultadoRasterizacao(Imagem(np.clip(imagem, 0.0, 1.0)), profundidade, mascara)

    if coordenadas_textura is None:
        coordenadas_textura = malha.vertices
    posicoes_cam = camera.pose.aplicar(malha.vertices)
    normais_cam = camera.pose.aplicar_direcoes(malha.normais)
    # Atributos por vértice: [x, y, z câmera | normal câmera | coord textura]
    atributos = np.concatenate([posicoes_cam, normais_cam, np.asarray(coordenadas_textura, dtype=np.float64)], axis=1)

    buffer_atributos = np.zeros((altura, largura, 9))
    profundidades_tri = -posicoes_cam[malha.triangulos, 2]

    for indice, triangulo in enumerate(malha.triangulos):
        d_tri = profundidades_tri[indice]
        if np.all(d_tri <= camera.perto):
            continue
        if np.all(d_tri > camera.perto):
            pedacos = [atributos[triangulo]]
        else:
            pedacos = _recortar_poligono(atributos[triangulo], camera.perto)
        for pedaco in pedacos:
            _rasterizar_triangulo(pedaco, camera, profundidade, mascara, buffer_atributos)

    _sombrear(imagem, mascara, buffer_atributos, sombreamento, camera)
    logger.trace(
        "[render] %s: %d triângulos, %d pixels cobertos em %dx%d",
        malha.nome, malha.n_triangulos, int(mascara.sum()), largura, altura,
    )
    return ResultadoRasterizacao(Imagem(np.clip(imagem, 0.0, 1.0)), profundidade, mascara)


def _rasterizar_triangulo(
    atributos: np.ndarray,
    camera: Camera,
    profundidade: np.ndarray,
    mascara: np.ndarray,
    buffer_atributos: np.ndarray,
) -> None:
    largura, altura = camera.resolucao
    tela = _projetar(camera, atributos[:, :3])
    (x0, y0, d0), (x1, y1, d1), (x2, y2, d2) = tela
    area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if abs(area) < _EPS_AREA:
        return

    col_min = max(int(np.ceil(min(x0, x1, x2) - 0.5)), 0)
    col_max = min(int(np.floor(max(x0, x1, x2) - 0.5)), largura - 1)
    lin_min = max(int(np.ceil(min(y0, y1, y2) - 0.5)), 0)
    lin_max = min(int(np.floor(max(y0, y1, y2) - 0.5)), altura - 1)
    if col_min > col_max or lin_min > lin_max:
        return

    px = np.arange(col_min, col_max + 1) + 0.5
    py = np.arange(lin_min, lin_max + 1)[:, None] + 0.5
    w0 = ((x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)) / area
    w1 = ((x2 - px) * (y0 - py) - (x0 - px) * (y2 - py)) / area
    w2 = 1.0 - w0 - w1
    dentro = (w0 >= 0.0) & (w1 >= 0.0) & (w2 >= 0.0)
    if not dentro.any():
        return

    # Interpolação com 1/d (perspectivamente correta)
    inv_d = w0 / d0 + w1 / d1 + w2 / d2
    d = 1.0 / np.where(dentro, inv_d, 1.0)
    janela_prof = profundidade[lin_min:lin_max + 1, col_min:col_max + 1]
    visivel = dentro & (d < janela_prof) & (d <= camera.longe)
    if not visivel.any():
        return

    linhas, colunas = np.nonzero(visivel)
    pesos = np.stack([w0[visivel] / d0, w1[visivel] / d1, w2[visivel] / d2], axis=1) * d[visivel][:, None]
    janela_prof[linhas, colunas] = d[visivel]
    mascara[lin_min + linhas, col_min + colunas] = True
    buffer_atributos[lin_min + linhas, col_min + colunas] = pesos @ atributos


def _sombrear(
    imagem: np.ndarray,
    mascara: np.ndarray,
    buffer_atributos: np.ndarray,
    sombreamento: Sombreamento,
    camera: Camera,
) -> None:
    """Sombreia de uma vez todos os pixels cobertos."""
    if not mascara.any():
        return
    amostras = buffer_atributos[mascara]
    posicoes, normais, coordenadas = amostras[:, :3], amostras[:, 3:6], amostras[:, 6:9]
    normais = normais / np.maximum(np.linalg.norm(normais, axis=1, keepdims=True), 1e-12)

    if sombreamento.modo == ModoSombreamento.HEADLIGHT:
        luz = -posicoes / np.maximum(np.linalg.norm(posicoes, axis=1, keepdims=True), 1e-12)
    else:
        luz = np.broadcast_to(camera.pose.aplicar_direcoes(sombreamento.direcao_luz), normais.shape)
    difuso = np.maximum(0.0, np.einsum("ij,ij->i", normais, luz))[:, None]

    n_canais = imagem.shape[2]
    if sombreamento.texturizado:
        cor = np.asarray(sombreamento.albedo(coordenadas), dtype=np.float64).reshape(len(amostras), -1)
        if cor.shape[1] != n_canais:
            cor = np.repeat(cor.mean(axis=1, keepdims=True), n_canais, axis=1)
        valores = cor * (sombreamento.ambiente + (1.0 - sombreamento.ambiente) * difuso)
    else:
        valores = np.repeat(sombreamento.ambiente + float(sombreamento.albedo) * difuso, n_canais, axis=1)
    imagem[mascara] = np.clip(valores, 0.0, 1.0)
