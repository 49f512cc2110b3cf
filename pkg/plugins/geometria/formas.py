"""
Gerador procedural de formas de brinquedo (corpus sintético de malhas).

Famílias e parâmetros (ordem da lista `params`):
- box:      [largura, altura, profundidade]                 todos > 0
- cylinder: [raio, altura, segmentos]                       raio, altura > 0; segmentos >= 3
- cone:     [raio, altura, segmentos]                       raio, altura > 0; segmentos >= 3
- torus:    [raio_maior, raio_menor, seg_maior, seg_menor]  raio_maior > raio_menor > 0; segs >= 3
- lspline:  [altura, raio_medio, amplitude, segmentos, aneis]
            altura, raio_medio > 0; 0 <= amplitude < 0.9; segmentos >= 3; aneis >= 2

`lspline` é um sólido de revolução cujo perfil é uma spline cúbica com
pontos de controle sorteados pela semente. As demais famílias não dependem
da semente.

Todas as malhas são fechadas, com faces orientadas para fora.
"""

from enum import Enum
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from plugins.geometria.malha import Malha, _arestas_icosaedro, icosahedron_vertices, normalize_mesh
from utils.erros import ErroParametroInvalido


class FamiliaForma(str, Enum):
    BOX = "box"
    CYLINDER = "cylinder"
    CONE = "cone"
    TORUS = "torus"
    LSPLINE = "lspline"

    def __str__(self):
        return self.value


N_PARAMETROS: Dict[FamiliaForma, int] = {
    FamiliaForma.BOX: 3,
    FamiliaForma.CYLINDER: 3,
    FamiliaForma.CONE: 3,
    FamiliaForma.TORUS: 4,
    FamiliaForma.LSPLINE: 5,
}

# Pontos de controle do perfil da lspline
_CONTROLES_LSPLINE = 5


def _inteiro(valor: float, nome: str, minimo: int) -> int:
    inteiro = int(round(float(valor)))
    if abs(float(valor) - inteiro) > 1e-9 or inteiro < minimo:
        raise ErroParametroInvalido(f"{nome} deve ser inteiro >= {minimo} (recebido {valor})")
    return inteiro


def _positivo(valor: float, nome: str) -> float:
    valor = float(valor)
    if not np.isfinite(valor) or valor <= 0:
        raise ErroParametroInvalido(f"{nome} deve ser positivo (recebido {valor})")
    return valor


# ============================================================
# CONSTRUTORES
# ============================================================

def _revolucao(
    aneis: Sequence[Tuple[float, float]],
    polo_inferior: float,
    polo_superior: float,
    segmentos: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sólido de revolução em torno de +Y.

    Args:
        aneis: (raio, y) de baixo para cima, raios > 0
        polo_inferior / polo_superior: altura dos vértices polares
        segmentos: divisões angulares

    Returns:
        (vertices, triangulos); anéis primeiro, depois polo inferior e superior
    """
    angulos = 2.0 * np.pi * np.arange(segmentos) / segmentos
    cos, sen = np.cos(angulos), np.sin(angulos)
    vertices = [np.column_stack([r * cos, np.full(segmentos, y), r * sen]) for r, y in aneis]
    vertices.append(np.array([[0.0, polo_inferior, 0.0], [0.0, polo_superior, 0.0]]))
    vertices = np.vstack(vertices)

    n_aneis = len(aneis)
    inferior = n_aneis * segmentos
    superior = inferior + 1
    triangulos = []
    for a in range(n_aneis - 1):
        for k in range(segmentos):
            k1 = (k + 1) % segmentos
            b0, b1 = a * segmentos + k, a * segmentos + k1
            t0, t1 = (a + 1) * segmentos + k, (a + 1) * segmentos + k1
            triangulos.append((b0, t0, b1))
            triangulos.append((t0, t1, b1))
    ultimo = (n_aneis - 1) * segmentos
    for k in range(segmentos):
        k1 = (k + 1) % segmentos
        triangulos.append((inferior, k, k1))
        triangulos.append((superior, ultimo + k1, ultimo + k))
    return vertices, np.asarray(triangulos, dtype=np.int64)


def _caixa(largura: float, altura: float, profundidade: float):
    x, y, z = largura / 2.0, altura / 2.0, profundidade / 2.0
    vertices = np.array([
        (-x, -y, -z), (x, -y, -z), (x, y, -z), (-x, y, -z),
        (-x, -y, z), (x, -y, z), (x, y, z), (-x, y, z),
    ])
    quads = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (3, 7, 6, 2), (0, 4, 7, 3), (1, 2, 6, 5)]
    triangulos = []
    for a, b, c, d in quads:
        triangulos += [(a, b, c), (a, c, d)]
    return vertices, np.asarray(triangulos, dtype=np.int64)


def _toro(raio_maior: float, raio_menor: float, seg_maior: int, seg_menor: int):
    theta = 2.0 * np.pi * np.arange(seg_maior) / seg_maior
    phi = 2.0 * np.pi * np.arange(seg_menor) / seg_menor
    t, p = np.meshgrid(theta, phi, indexing="ij")
    anel = raio_maior + raio_menor * np.cos(p)
    vertices = np.stack([anel * np.cos(t), raio_menor * np.sin(p), anel * np.sin(t)], axis=-1)
    vertices = vertices.reshape(-1, 3)

    def indice(i, j):
        return (i % seg_maior) * seg_menor + (j % seg_menor)

    triangulos = []
    for i in range(seg_maior):
        for j in range(seg_menor):
            a, b = indice(i, j), indice(i, j + 1)
            c, d = indice(i + 1, j), indice(i + 1, j + 1)
            triangulos.append((a, b, c))
            triangulos.append((b, d, c))
    return vertices, np.asarray(triangulos, dtype=np.int64)


def _perfil_lspline(altura, raio_medio, amplitude, aneis, semente):
    rng = np.random.default_rng(semente)
    controles_y = np.linspace(-altura / 2.0, altura / 2.0, _CONTROLES_LSPLINE)
    controles_r = raio_medio * (1.0 + amplitude * rng.uniform(-1.0, 1.0, _CONTROLES_LSPLINE))
    spline = CubicSpline(controles_y, controles_r, bc_type="natural")
    ys = np.linspace(-altura / 2.0, altura / 2.0, aneis)
    raios = np.clip(spline(ys), 0.05 * raio_medio, None)
    return list(zip(raios.tolist(), ys.tolist()))


def generate_toy_shape(familia, params: Sequence[float], semente: int = 0, nome: str = "") -> Malha:
    """
    Gera uma malha de brinquedo determinística para (família, params, semente).

    Raises:
        ErroParametroInvalido: família desconhecida ou parâmetros fora da faixa
    """
    try:
        familia = FamiliaForma(str(familia))
    except ValueError as e:
        raise ErroParametroInvalido(f"família desconhecida: {familia}") from e

    params = [float(p) for p in params]
    if len(params) != N_PARAMETROS[familia]:
        raise ErroParametroInvalido(
            f"{familia} espera {N_PARAMETROS[familia]} parâmetros (recebido {len(params)})"
        )

    if familia == FamiliaForma.BOX:
        vertices, triangulos = _caixa(*(_positivo(v, n) for v, n in zip(params, ("largura", "altura", "profundidade"))))
    elif familia in (FamiliaForma.CYLINDER, FamiliaForma.CONE):
        raio = _positivo(params[0], "raio")
        altura = _positivo(params[1], "altura")
        segmentos = _inteiro(params[2], "segmentos", 3)
        if familia == FamiliaForma.CYLINDER:
            aneis = [(raio, -altura / 2.0), (raio, altura / 2.0)]
        else:
            aneis = [(raio, -altura / 2.0)]
        vertices, triangulos = _revolucao(aneis, -altura / 2.0, altura / 2.0, segmentos)
    elif familia == FamiliaForma.TORUS:
        raio_maior = _positivo(params[0], "raio_maior")
        raio_menor = _positivo(params[1], "raio_menor")
        if raio_menor >= raio_maior:
            raise ErroParametroInvalido("torus exige raio_maior > raio_menor > 0")
        vertices, triangulos = _toro(
            raio_maior, raio_menor, _inteiro(params[2], "seg_maior", 3), _inteiro(params[3], "seg_menor", 3)
        )
    else:
        altura = _positivo(params[0], "altura")
        raio_medio = _positivo(params[1], "raio_medio")
        amplitude = float(params[2])
        if not 0.0 <= amplitude < 0.9:
            raise ErroParametroInvalido(f"amplitude deve estar em [0, 0.9) (recebido {amplitude})")
        segmentos = _inteiro(params[3], "segmentos", 3)
        aneis = _inteiro(params[4], "aneis", 2)
        perfil = _perfil_lspline(altura, raio_medio, amplitude, aneis, semente)
        vertices, triangulos = _revolucao(perfil, -altura / 2.0, altura / 2.0, segmentos)

    return Malha.de_arrays(vertices, triangulos, nome or f"{familia}")


# ============================================================
# CORPUS
# ============================================================

def amostrar_parametros(familia: FamiliaForma, rng: np.random.Generator) -> List[float]:
    """Sorteia parâmetros dentro de faixas que geram formas bem proporcionadas."""
    familia = FamiliaForma(str(familia))
    if familia == FamiliaForma.BOX:
        return rng.uniform(0.3, 2.0, 3).tolist()
    if familia == FamiliaForma.CYLINDER:
        return [rng.uniform(0.2, 1.0), rng.uniform(0.4, 2.5), float(rng.integers(8, 25))]
    if familia == FamiliaForma.CONE:
        return [rng.uniform(0.3, 1.2), rng.uniform(0.5, 2.5), float(rng.integers(8, 25))]
    if familia == FamiliaForma.TORUS:
        raio_maior = rng.uniform(0.6, 1.2)
        return [raio_maior, raio_maior * rng.uniform(0.15, 0.6),
                float(rng.integers(12, 25)), float(rng.integers(6, 13))]
    return [rng.uniform(0.8, 2.5), rng.uniform(0.3, 1.0), rng.uniform(0.1, 0.6),
            float(rng.integers(10, 21)), float(rng.integers(4, 9))]


def gerar_corpus(quantidade: int, semente: int) -> List[Malha]:
    """
    Gera `quantidade` formas normalizadas, alternando as cinco famílias.

    Identificadores: `{familia}_{indice:03d}` (ex.: `torus_003`).
    """
    if quantidade < 1:
        raise ErroParametroInvalido(f"quantidade deve ser >= 1 (recebido {quantidade})")
    familias = list(FamiliaForma)
    malhas = []
    for indice in range(quantidade):
        rng = np.random.default_rng([semente, indice])
        familia = familias[indice % len(familias)]
        params = amostrar_parametros(familia, rng)
        semente_forma = int(rng.integers(0, 2**31 - 1))
        nome = f"{familia}_{indice:03d}"
        malhas.append(normalize_mesh(generate_toy_shape(familia, params, semente_forma, nome)))
    return malhas


def icosfera(subdivisoes: int = 3, nome: str = "esfera") -> Malha:
    """Esfera unitária por subdivisão do icosaedro (normais radiais exatas)."""
    vertices = [tuple(v) for v in icosahedron_vertices()]
    arestas = set(_arestas_icosaedro(np.array(vertices)))
    faces = []
    for i, j, k in combinations(range(12), 3):
        if (i, j) in arestas and (i, k) in arestas and (j, k) in arestas:
            a, b, c = np.array(vertices[i]), np.array(vertices[j]), np.array(vertices[k])
            # Orienta para fora
            if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
                j, k = k, j
            faces.append((i, j, k))

    for _ in range(subdivisoes):
        cache: Dict[Tuple[int, int], int] = {}

        def meio(a: int, b: int) -> int:
            chave = (min(a, b), max(a, b))
            if chave not in cache:
                p = (np.array(vertices[a]) + np.array(vertices[b])) / 2.0
                vertices.append(tuple(p / np.linalg.norm(p)))
                cache[chave] = len(vertices) - 1
            return cache[chave]

        novas = []
        for a, b, c in faces:
            ab, bc, ca = meio(a, b), meio(b, c), meio(c, a)
            novas += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = novas

    v = np.array(vertices)
    return Malha(v, v / np.linalg.norm(v, axis=1, keepdims=True), np.array(faces), nome)
