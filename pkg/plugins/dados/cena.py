"""
Randomização de domínio: amostragem de cenas e renderização colorida.

Modo estruturado: objeto em repouso (yaw aleatório) dentro de uma sala de
cinco paredes texturizadas, câmera no hemisfério superior mirando um pouco
acima do objeto, uma luz direcional.
Modo caótico: orientação uniforme sobre SO(3), câmera em qualquer direção,
fundo procedural plano composto atrás do objeto.
"""

import zlib
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Tuple, Union

import numpy as np

from plugins.dados.texturas import EspecTextura, TipoTextura, textura_aleatoria
from plugins.geometria.malha import Malha, TransformacaoRigida, look_at
from plugins.renderizacao.imagem import Imagem
from plugins.renderizacao.rasterizador import (
    Camera,
    ModoSombreamento,
    ResultadoRasterizacao,
    Sombreamento,
    rasterize,
)
from utils.erros import ErroDirecaoDegenerada, ErroObjetoDesconhecido, ErroParametroInvalido

# ============================================================
# CONSTANTES DE CENA
# ============================================================

FOV_CENA = np.deg2rad(60.0)
ESCALA_OBJETO = 0.5
ELEVACAO_MIN, ELEVACAO_MAX = np.deg2rad(15.0), np.deg2rad(75.0)
RAIO_MIN, RAIO_MAX = 2.5, 4.5
# Inclinação da mira acima do centro do objeto (objeto no terço inferior)
INCLINACAO_MIRA = np.deg2rad(7.0)
MEIO_LADO_SALA = 6.0
ALTURA_SALA = 10.0
FATOR_CHAO = 0.6
AMBIENTE_CENA = 0.3
RESOLUCAO_CENA = 64


class ModoCena(str, Enum):
    ESTRUTURADO = "structured"
    CAOTICO = "chaotic"

    def __str__(self):
        return self.value


_INDICE_MODO = {ModoCena.ESTRUTURADO: 0, ModoCena.CAOTICO: 1}


@dataclass(frozen=True)
class EspecCena:
    """Determina completamente a imagem colorida (junto do catálogo de malhas)."""

    object_id: str
    pose_objeto: TransformacaoRigida
    camera: Camera
    modo: ModoCena
    textura_objeto: EspecTextura
    textura_fundo: EspecTextura
    direcao_luz: Tuple[float, float, float]
    semente: int
    escala_objeto: float = ESCALA_OBJETO
    textura_chao: Optional[EspecTextura] = None


# ============================================================
# AMOSTRAGEM
# ============================================================

def _rng_cena(object_id: str, modo: ModoCena, semente: int) -> np.random.Generator:
    return np.random.default_rng([semente & 0xFFFFFFFFFFFFFFFF, zlib.crc32(object_id.encode("utf-8")), _INDICE_MODO[modo]])


def rotacao_uniforme(rng: np.random.Generator) -> np.ndarray:
    """Rotação uniforme via quaternion unitário de gaussiana 4D."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def rotacao_yaw(angulo: float) -> np.ndarray:
    c, s = np.cos(angulo), np.sin(angulo)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _direcao_esferica(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _look_at_robusto(olho, alvo) -> TransformacaoRigida:
    try:
        return look_at(olho, alvo, (0.0, 1.0, 0.0))
    except ErroDirecaoDegenerada:
        return look_at(olho, alvo, (0.0, 0.0, 1.0))


def camera_estruturada(elevacao: float, azimute: float, raio: float, resolucao: int) -> Camera:
    """Câmera no hemisfério superior inclinada INCLINACAO_MIRA acima do centro."""
    olho = raio * np.array([
        np.cos(elevacao) * np.sin(azimute),
        np.sin(elevacao),
        np.cos(elevacao) * np.cos(azimute),
    ])
    frente = -olho / raio
    cima = np.array([0.0, 1.0, 0.0]) - frente * frente[1]
    cima /= np.linalg.norm(cima)
    frente_inclinada = np.cos(INCLINACAO_MIRA) * frente + np.sin(INCLINACAO_MIRA) * cima
    pose = look_at(olho, olho + frente_inclinada * raio, (0.0, 1.0, 0.0))
    return Camera(pose, FOV_CENA, perto=0.05, longe=100.0, resolucao=(resolucao, resolucao))


def randomize_scene(object_id: str, modo, semente: int, resolucao: int = RESOLUCAO_CENA) -> EspecCena:
    """Amostra uma cena determinística para (object_id, modo, semente)."""
    modo = ModoCena(str(modo))
    rng = _rng_cena(object_id, modo, semente)

    if modo == ModoCena.ESTRUTURADO:
        pose = TransformacaoRigida(rotacao_yaw(rng.uniform(0.0, 2 * np.pi)), np.zeros(3))
        elevacao = rng.uniform(ELEVACAO_MIN, ELEVACAO_MAX)
        azimute = rng.uniform(0.0, 2 * np.pi)
        raio = rng.uniform(RAIO_MIN, RAIO_MAX)
        camera = camera_estruturada(elevacao, azimute, raio, resolucao)
        textura_parede = textura_aleatoria(rng)
        textura_objeto = textura_aleatoria(rng)
        # Luz vinda de cima (elevação 30°–80°)
        elev_luz = rng.uniform(np.deg2rad(30.0), np.deg2rad(80.0))
        az_luz = rng.uniform(0.0, 2 * np.pi)
        luz = (np.cos(elev_luz) * np.sin(az_luz), np.sin(elev_luz), np.cos(elev_luz) * np.cos(az_luz))
        return EspecCena(
            object_id=object_id,
            pose_objeto=pose,
            camera=camera,
            modo=modo,
            textura_objeto=textura_objeto,
            textura_fundo=textura_parede,
            direcao_luz=tuple(float(c) for c in luz),
            semente=semente,
            textura_chao=textura_parede.escurecida(FATOR_CHAO),
        )

    pose = TransformacaoRigida(rotacao_uniforme(rng), np.zeros(3))
    olho = _direcao_esferica(rng) * rng.uniform(RAIO_MIN, RAIO_MAX)
    camera = Camera(_look_at_robusto(olho, np.zeros(3)), FOV_CENA, perto=0.05, longe=100.0,
                    resolucao=(resolucao, resolucao))
    textura_objeto = textura_aleatoria(rng)
    textura_fundo = textura_aleatoria(rng)
    luz = _direcao_esferica(rng)
    return EspecCena(
        object_id=object_id,
        pose_objeto=pose,
        camera=camera,
        modo=modo,
        textura_objeto=textura_objeto,
        textura_fundo=textura_fundo,
        direcao_luz=tuple(float(c) for c in luz),
        semente=semente,
    )


# ============================================================
# GEOMETRIA DA SALA
# ============================================================

def _quad(cantos: np.ndarray, normal: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadrilátero (4 cantos em ordem) com triângulos orientados para `normal`."""
    triangulos = np.array([[0, 1, 2], [0, 2, 3]])
    a, b, c = cantos[0], cantos[1], cantos[2]
    if np.dot(np.cross(b - a, c - a), normal) < 0:
        triangulos = triangulos[:, ::-1]
    return cantos, np.tile(normal, (4, 1)), triangulos


def _malha_de_quads(quads, nome: str) -> Malha:
    vertices, normais, triangulos = [], [], []
    deslocamento = 0
    for cantos, nrm, tris in quads:
        vertices.append(cantos)
        normais.append(nrm)
        triangulos.append(tris + deslocamento)
        deslocamento += len(cantos)
    return Malha(np.concatenate(vertices), np.concatenate(normais), np.concatenate(triangulos), nome)


def construir_sala(y_chao: float) -> Tuple[Malha, Malha]:
    """Chão e quatro paredes laterais (normais para dentro); sem teto."""
    s, topo = MEIO_LADO_SALA, y_chao + ALTURA_SALA
    chao = _malha_de_quads([_quad(
        np.array([[-s, y_chao, -s], [s, y_chao, -s], [s, y_chao, s], [-s, y_chao, s]]),
        np.array([0.0, 1.0, 0.0]),
    )], "chao")
    paredes = []
    for eixo, sinal in ((0, 1.0), (0, -1.0), (2, 1.0), (2, -1.0)):
        outro = 2 - eixo
        cantos = np.zeros((4, 3))
        cantos[:, eixo] = sinal * s
        cantos[:, outro] = [-s, s, s, -s]
        cantos[:, 1] = [y_chao, y_chao, topo, topo]
        normal = np.zeros(3)
        normal[eixo] = -sinal
        paredes.append(_quad(cantos, normal))
    return chao, _malha_de_quads(paredes, "paredes")


# ============================================================
# RENDERIZAÇÃO COLORIDA
# ============================================================

def _compor(camadas) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composição por profundidade; camada anterior vence empates."""
    base = camadas[0]
    dados = base.imagem.dados.copy()
    profundidade = base.profundidade.copy()
    indice = np.where(base.mascara, 0, -1)
    for numero, camada in enumerate(camadas[1:], start=1):
        frente = camada.mascara & (camada.profundidade < profundidade)
        dados[frente] = camada.imagem.dados[frente]
        profundidade[frente] = camada.profundidade[frente]
        indice[frente] = numero
    return dados, profundidade, indice


def _fundo_plano(textura: EspecTextura, camera: Camera) -> np.ndarray:
    largura, altura = camera.resolucao
    ys, xs = np.mgrid[0:altura, 0:largura]
    uv = np.stack([(xs.ravel() + 0.5) / largura, (ys.ravel() + 0.5) / altura], axis=1) * 4.0
    return textura(uv).reshape(altura, largura, 3)


def _malha_do_objeto(spec: EspecCena, catalogo: Mapping[str, Malha]) -> Tuple[Malha, np.ndarray]:
    if spec.object_id not in catalogo:
        raise ErroObjetoDesconhecido(f"objeto desconhecido: {spec.object_id}")
    original = catalogo[spec.object_id]
    if original.n_triangulos == 0:
        raise ErroParametroInvalido(f"malha vazia: {spec.object_id}")
    posicionada = original.escalar(spec.escala_objeto).transformar(spec.pose_objeto)
    return posicionada, original.vertices


def render_colour(
    spec: EspecCena,
    catalogo: Mapping[str, Malha],
    retornar_mascara: bool = False,
) -> Union[Imagem, Tuple[Imagem, np.ndarray]]:
    """
    Renderiza a cena colorida (3 canais).

    Raises:
        ErroObjetoDesconhecido: object_id fora do catálogo
    """
    malha, coords_objeto = _malha_do_objeto(spec, catalogo)
    luz = np.asarray(spec.direcao_luz)
    sombreamento_objeto = Sombreamento(
        ModoSombreamento.DIRECIONAL, luz, ambiente=AMBIENTE_CENA, albedo=spec.textura_objeto
    )

    if spec.modo == ModoCena.CAOTICO:
        fundo = _fundo_plano(spec.textura_fundo, spec.camera)
        resultado = rasterize(malha, spec.camera, sombreamento_objeto, fundo=fundo,
                              coordenadas_textura=coords_objeto, canais=3)
        if retornar_mascara:
            return resultado.imagem, resultado.mascara
        return resultado.imagem

    y_chao = float(malha.vertices[:, 1].min()) - 1e-3
    chao, paredes = construir_sala(y_chao)
    textura_chao = spec.textura_chao or spec.textura_fundo
    cor_fundo = np.asarray(spec.textura_fundo.cores).mean(axis=0)
    camadas = [
        rasterize(malha, spec.camera, sombreamento_objeto, fundo=cor_fundo,
                  coordenadas_textura=coords_objeto, canais=3),
        rasterize(paredes, spec.camera,
                  Sombreamento(ModoSombreamento.DIRECIONAL, luz, AMBIENTE_CENA, spec.textura_fundo),
                  fundo=cor_fundo, canais=3),
        rasterize(chao, spec.camera,
                  Sombreamento(ModoSombreamento.DIRECIONAL, luz, AMBIENTE_CENA, textura_chao),
                  fundo=cor_fundo, canais=3),
    ]
    dados, _, indice = _compor(camadas)
    imagem = Imagem(np.clip(dados, 0.0, 1.0))
    if retornar_mascara:
        return imagem, indice == 0
    return imagem


def textura_solida(cor) -> EspecTextura:
    """Atalho para textura de cor única."""
    return EspecTextura(TipoTextura.SOLIDA, (tuple(cor), tuple(cor)))
