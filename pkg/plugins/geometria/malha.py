"""
Malhas de triângulos, transformações rígidas e rig de câmeras icosaédrico.

Subconjunto OBJ suportado: registros `v`, `vn` e `f` (formas `f v`,
`f v//vn` e `f v/vt/vn`). Demais registros (vt, mtllib, usemtl, o, g, s, l)
são ignorados.
"""

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from utils.erros import (
    ErroDirecaoDegenerada,
    ErroExtensaoDegenerada,
    ErroMalhaVazia,
    ErroParametroInvalido,
    ErroParseObj,
)

PHI = (1.0 + np.sqrt(5.0)) / 2.0

# Lado da caixa canônica após normalize_mesh (vértices em [-1, 1])
LADO_CANONICO = 2.0


# ============================================================
# TRANSFORMAÇÃO RÍGIDA
# ============================================================

@dataclass(frozen=True, eq=False)
class TransformacaoRigida:
    """
    Transformação x -> R·x + t com R ortonormal e det(R) = +1.

    Usada como pose de objeto (objeto -> mundo) e como pose de câmera
    (mundo -> câmera).
    """

    rotacao: np.ndarray
    translacao: np.ndarray

    def __post_init__(self):
        rotacao = np.asarray(self.rotacao, dtype=np.float64).reshape(3, 3)
        translacao = np.asarray(self.translacao, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotacao", rotacao)
        object.__setattr__(self, "translacao", translacao)

    def __eq__(self, outra) -> bool:
        if not isinstance(outra, TransformacaoRigida):
            return NotImplemented
        return np.array_equal(self.rotacao, outra.rotacao) and np.array_equal(self.translacao, outra.translacao)

    __hash__ = None

    @classmethod
    def identidade(cls) -> "TransformacaoRigida":
        return cls(np.eye(3), np.zeros(3))

    def validar(self, tolerancia: float = 1e-6) -> None:
        """Levanta ErroParametroInvalido se R não for uma rotação própria."""
        r = self.rotacao
        if not np.allclose(r.T @ r, np.eye(3), atol=tolerancia):
            raise ErroParametroInvalido("rotação não ortonormal (RᵀR ≠ I)")
        if abs(np.linalg.det(r) - 1.0) > tolerancia:
            raise ErroParametroInvalido("rotação com determinante diferente de +1")

    def aplicar(self, pontos: np.ndarray) -> np.ndarray:
        return np.asarray(pontos, dtype=np.float64) @ self.rotacao.T + self.translacao

    def aplicar_direcoes(self, direcoes: np.ndarray) -> np.ndarray:
        return np.asarray(direcoes, dtype=np.float64) @ self.rotacao.T

    def inversa(self) -> "TransformacaoRigida":
        rt = self.rotacao.T
        return TransformacaoRigida(rt, -rt @ self.translacao)

    def compor(self, outra: "TransformacaoRigida") -> "TransformacaoRigida":
        """Retorna self ∘ outra (aplica `outra` primeiro)."""
        return TransformacaoRigida(
            self.rotacao @ outra.rotacao,
            self.rotacao @ outra.translacao + self.translacao,
        )

    @property
    def origem_inversa(self) -> np.ndarray:
        """Ponto que a transformação leva à origem (posição do olho em poses de câmera)."""
        return -self.rotacao.T @ self.translacao


# ============================================================
# MALHA
# ============================================================

@dataclass(frozen=True)
class Malha:
    """
    Malha indexada de triângulos.

    Attributes:
        vertices: (V, 3) posições em unidades do modelo
        normais: (V, 3) normais unitárias, uma por vértice
        triangulos: (F, 3) índices inteiros
        nome: identificador (object_id)
    """

    vertices: np.ndarray
    normais: np.ndarray
    triangulos: np.ndarray
    nome: str = ""

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        normais = np.asarray(self.normais, dtype=np.float64).reshape(-1, 3)
        triangulos = np.asarray(self.triangulos, dtype=np.int64).reshape(-1, 3)
        if normais.shape != vertices.shape:
            raise ErroParametroInvalido(
                f"normais {normais.shape} não correspondem aos vértices {vertices.shape}"
            )
        if triangulos.size and (triangulos.min() < 0 or triangulos.max() >= len(vertices)):
            raise ErroParametroInvalido("índice de triângulo fora do intervalo de vértices")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "normais", normais)
        object.__setattr__(self, "triangulos", triangulos)

    @classmethod
    def vazia(cls, nome: str = "") -> "Malha":
        return cls(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), nome)

    @classmethod
    def de_arrays(cls, vertices, triangulos, nome: str = "") -> "Malha":
        """Constrói a malha calculando normais ponderadas por área."""
        vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        triangulos = np.asarray(triangulos, dtype=np.int64).reshape(-1, 3)
        return cls(vertices, calcular_normais(vertices, triangulos), triangulos, nome)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangulos(self) -> int:
        return len(self.triangulos)

    def caixa_envolvente(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.n_vertices == 0:
            raise ErroMalhaVazia(f"malha '{self.nome}' sem vértices")
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def transformar(self, transformacao: TransformacaoRigida) -> "Malha":
        return Malha(
            transformacao.aplicar(self.vertices),
            transformacao.aplicar_direcoes(self.normais),
            self.triangulos,
            self.nome,
        )

    def escalar(self, fator: float) -> "Malha":
        if fator <= 0:
            raise ErroParametroInvalido(f"fator de escala deve ser positivo: {fator}")
        return Malha(self.vertices * fator, self.normais, self.triangulos, self.nome)


def calcular_normais(vertices: np.ndarray, triangulos: np.ndarray) -> np.ndarray:
    """
    Normais por vértice como média ponderada por área das normais das faces.

    O produto vetorial não normalizado já carrega o peso (2 × área).
    Vértices sem faces incidentes recebem (0, 0, 1).
    """
    normais = np.zeros_like(vertices, dtype=np.float64)
    if len(triangulos):
        v = vertices[triangulos]
        faces = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        for canto in range(3):
            np.add.at(normais, triangulos[:, canto], faces)
    comprimento = np.linalg.norm(normais, axis=1)
    validas = comprimento > 1e-15
    normais[validas] /= comprimento[validas, None]
    normais[~validas] = (0.0, 0.0, 1.0)
    return normais


# ============================================================
# OBJ
# ============================================================

def _ler_floats(campos: List[str], numero_linha: int, registro: str) -> List[float]:
    if len(campos) < 3:
        raise ErroParseObj(f"registro '{registro}' com menos de 3 coordenadas", numero_linha)
    try:
        return [float(c) for c in campos[:3]]
    except ValueError as e:
        raise ErroParseObj(f"coordenada inválida em '{registro}': {e}", numero_linha) from e


def _resolver_indice(texto: str, total: int, numero_linha: int, tipo: str) -> int:
    try:
        indice = int(texto)
    except ValueError as e:
        raise ErroParseObj(f"índice de {tipo} inválido: '{texto}'", numero_linha) from e
    if indice == 0:
        raise ErroParseObj(f"índice de {tipo} 0 (OBJ é 1-indexado)", numero_linha)
    resolvido = total + indice if indice < 0 else indice - 1
    if not 0 <= resolvido < total:
        raise ErroParseObj(
            f"índice de {tipo} {indice} fora do intervalo (total {total})", numero_linha
        )
    return resolvido


def _malha_por_face(posicoes: np.ndarray, cantos: List[List[Tuple[int, int]]], nome: str) -> Malha:
    """Cada polígono recebe cópias próprias dos seus vértices; arestas vivas ficam vivas."""
    indices: List[int] = []
    triangulos: List[Tuple[int, int, int]] = []
    for face in cantos:
        base = len(indices)
        indices.extend(iv for iv, _ in face)
        triangulos.extend((base, base + k, base + k + 1) for k in range(1, len(face) - 1))
    vertices = posicoes[indices]
    triangulos_arr = np.asarray(triangulos, dtype=np.int64)
    return Malha(vertices, calcular_normais(vertices, triangulos_arr), triangulos_arr, nome)


def load_obj(caminho: Union[str, Path], nome: Optional[str] = None) -> Malha:
    """
    Carrega um arquivo Wavefront OBJ.

    Polígonos com mais de 3 vértices são triangulados em leque
    ((1,2,3), (1,3,4), ...). Quando há registros `vn`, cada par distinto
    (vértice, normal) vira um vértice da malha, na ordem crescente do par.
    Sem `vn`, cada polígono tem vértices próprios e a média por área dentro
    dele dá a normal da face (um cubo de 8 vértices sai com normais nos eixos).

    Raises:
        ErroParseObj: registro malformado ou índice fora do intervalo
        ErroMalhaVazia: arquivo sem `v` ou sem `f`
    """
    caminho = Path(caminho)
    posicoes: List[List[float]] = []
    normais_arquivo: List[List[float]] = []
    cantos: List[List[Tuple[int, int]]] = []

    with open(caminho, "r", encoding="utf-8") as arquivo:
        for numero_linha, linha_bruta in enumerate(arquivo, start=1):
            linha = linha_bruta.strip()
            if not linha or linha.startswith("#"):
                continue
            campos = linha.split()
            registro, parametros = campos[0], campos[1:]

            if registro == "v":
                posicoes.append(_ler_floats(parametros, numero_linha, "v"))
            elif registro == "vn":
                normais_arquivo.append(_ler_floats(parametros, numero_linha, "vn"))
            elif registro == "f":
                if len(parametros) < 3:
                    raise ErroParseObj("face com menos de 3 vértices", numero_linha)
                face = []
                for parametro in parametros:
                    partes = parametro.split("/")
                    if len(partes) > 3 or not partes[0]:
                        raise ErroParseObj(f"canto de face malformado: '{parametro}'", numero_linha)
                    iv = _resolver_indice(partes[0], len(posicoes), numero_linha, "vértice")
                    inn = -1
                    if len(partes) == 3 and partes[2]:
                        inn = _resolver_indice(partes[2], len(normais_arquivo), numero_linha, "normal")
                    face.append((iv, inn))
                cantos.append(face)

    if not posicoes or not cantos:
        raise ErroMalhaVazia(f"{caminho.name}: arquivo OBJ sem vértices ou sem faces")

    posicoes_arr = np.asarray(posicoes, dtype=np.float64)
    nome = nome if nome is not None else caminho.stem

    # Triangulação em leque
    triangulos_cantos = []
    for face in cantos:
        for k in range(1, len(face) - 1):
            triangulos_cantos.append((face[0], face[k], face[k + 1]))

    if not normais_arquivo:
        return _malha_por_face(posicoes_arr, cantos, nome)

    chaves = sorted({c for tri in triangulos_cantos for c in tri})
    mapa = {chave: i for i, chave in enumerate(chaves)}
    vertices = posicoes_arr[[c[0] for c in chaves]]
    triangulos = np.array([[mapa[c] for c in tri] for tri in triangulos_cantos], dtype=np.int64)

    normais = calcular_normais(vertices, triangulos)
    normais_arr = np.asarray(normais_arquivo, dtype=np.float64)
    for i, (_, inn) in enumerate(chaves):
        if inn < 0:
            continue
        comprimento = np.linalg.norm(normais_arr[inn])
        if comprimento > 1e-15:
            normais[i] = normais_arr[inn] / comprimento
    return Malha(vertices, normais, triangulos, nome)


def save_obj(malha: Malha, caminho: Union[str, Path]) -> Path:
    """Grava a malha como OBJ com `v`, `vn` e faces `f v//vn`."""
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    linhas = [f"# {malha.nome}" if malha.nome else "# malha"]
    linhas += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in malha.vertices]
    linhas += [f"vn {x:.17g} {y:.17g} {z:.17g}" for x, y, z in malha.normais]
    linhas += [
        f"f {a + 1}//{a + 1} {b + 1}//{b + 1} {c + 1}//{c + 1}" for a, b, c in malha.triangulos
    ]
    caminho.write_text("\n".join(linhas) + "\n", encoding="utf-8")
    return caminho


# ============================================================
# NORMALIZAÇÃO
# ============================================================

def normalize_mesh(malha: Malha) -> Malha:
    """
    Centraliza a caixa envolvente na origem e escala o maior lado para 2.0.

    Raises:
        ErroMalhaVazia: malha sem vértices
        ErroExtensaoDegenerada: todos os vértices coincidem
    """
    minimo, maximo = malha.caixa_envolvente()
    lado = float(np.max(maximo - minimo))
    if lado <= 1e-12:
        raise ErroExtensaoDegenerada(f"malha '{malha.nome}' com extensão nula")
    centro = (minimo + maximo) / 2.0
    vertices = (malha.vertices - centro) * (LADO_CANONICO / lado)
    return Malha(vertices, malha.normais, malha.triangulos, malha.nome)


# ============================================================
# RIG DE CÂMERAS
# ============================================================

def icosahedron_vertices() -> np.ndarray:
    """Os 12 vértices unitários do icosaedro, em ordem fixa."""
    sinais = [(1.0, PHI), (1.0, -PHI), (-1.0, PHI), (-1.0, -PHI)]
    vertices = [(0.0, a, b) for a, b in sinais]
    vertices += [(a, b, 0.0) for a, b in sinais]
    vertices += [(b, 0.0, a) for a, b in sinais]
    arr = np.array(vertices, dtype=np.float64)
    return arr / np.linalg.norm(arr, axis=1, keepdims=True)


def _arestas_icosaedro(vertices: np.ndarray) -> List[Tuple[int, int]]:
    distancias = np.linalg.norm(vertices[:, None] - vertices[None], axis=2)
    menor = np.min(distancias[distancias > 1e-9])
    return [
        (i, j)
        for i, j in combinations(range(len(vertices)), 2)
        if abs(distancias[i, j] - menor) < 1e-9
    ]


def _normalizar_linhas(pontos: np.ndarray) -> np.ndarray:
    return pontos / np.linalg.norm(pontos, axis=1, keepdims=True)


def direcoes_rig(n_vistas: int = 12) -> np.ndarray:
    """
    Direções de câmera: 12 (vértices), 20 (centros das faces) ou
    42 (vértices + pontos médios das arestas, uma subdivisão).
    """
    vertices = icosahedron_vertices()
    if n_vistas == 12:
        return vertices
    arestas = _arestas_icosaedro(vertices)
    if n_vistas == 42:
        medios = np.array([(vertices[i] + vertices[j]) / 2.0 for i, j in arestas])
        return np.vstack([vertices, _normalizar_linhas(medios)])
    if n_vistas == 20:
        conjunto = set(arestas)
        faces = [
            (i, j, k)
            for i, j, k in combinations(range(12), 3)
            if (i, j) in conjunto and (i, k) in conjunto and (j, k) in conjunto
        ]
        centros = np.array([vertices[list(f)].mean(axis=0) for f in faces])
        return _normalizar_linhas(centros)
    raise ErroParametroInvalido(f"rig suporta 12, 20 ou 42 vistas (recebido {n_vistas})")


@dataclass(frozen=True)
class RigCameras:
    """Direções unitárias das câmeras, raio da esfera e vetor up sugerido."""

    olhos: np.ndarray
    raio: float = 3.0
    up_hint: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))

    def __post_init__(self):
        olhos = np.asarray(self.olhos, dtype=np.float64).reshape(-1, 3)
        up = np.asarray(self.up_hint, dtype=np.float64).reshape(3)
        if self.raio <= 0:
            raise ErroParametroInvalido(f"raio do rig deve ser positivo: {self.raio}")
        if len(olhos) == 0:
            raise ErroParametroInvalido("rig sem câmeras")
        if not np.allclose(np.linalg.norm(olhos, axis=1), 1.0, atol=1e-9):
            raise ErroParametroInvalido("direções do rig devem ser unitárias")
        distancias = np.linalg.norm(olhos[:, None] - olhos[None], axis=2)
        np.fill_diagonal(distancias, np.inf)
        if np.min(distancias) < 1e-9:
            raise ErroParametroInvalido("direções do rig repetidas")
        object.__setattr__(self, "olhos", olhos)
        object.__setattr__(self, "up_hint", up)

    @property
    def n_vistas(self) -> int:
        return len(self.olhos)

    def rotacionar(self, rotacao: np.ndarray) -> "RigCameras":
        """Rig com olhos e up_hint rotacionados por R."""
        rotacao = np.asarray(rotacao, dtype=np.float64)
        return RigCameras(self.olhos @ rotacao.T, self.raio, rotacao @ self.up_hint)


def rig_icosaedrico(n_vistas: int = 12, raio: float = 3.0) -> RigCameras:
    return RigCameras(direcoes_rig(n_vistas), raio)


def look_at(olho, alvo, up_hint) -> TransformacaoRigida:
    """
    Transformação mundo -> câmera.

    Convenção: câmera olha para -Z, +Y para cima, +X à direita (destro).
    Pontos à frente da câmera têm z negativo; profundidade = -z.

    Raises:
        ErroDirecaoDegenerada: olho == alvo ou up_hint paralelo à visada
    """
    olho = np.asarray(olho, dtype=np.float64)
    alvo = np.asarray(alvo, dtype=np.float64)
    up = np.asarray(up_hint, dtype=np.float64)

    frente = alvo - olho
    norma_frente = np.linalg.norm(frente)
    if norma_frente < 1e-12:
        raise ErroDirecaoDegenerada("olho coincide com o alvo")
    frente = frente / norma_frente

    direita = np.cross(frente, up)
    norma_direita = np.linalg.norm(direita)
    if norma_direita < 1e-9 * max(np.linalg.norm(up), 1e-300):
        raise ErroDirecaoDegenerada("up_hint paralelo à direção de visada")
    direita = direita / norma_direita
    cima = np.cross(direita, frente)

    rotacao = np.stack([direita, cima, -frente])
    return TransformacaoRigida(rotacao, -rotacao @ olho)
