"""
Índice de descritores de forma e consulta por similaridade cosseno.

Formato binário:
    magic "SRIX" | versão u32 | contagem u32 | dimensão u32
    por entrada: tamanho do nome u16 | nome UTF-8 | dimensão × f32 little-endian
"""

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from plugins.autograd.tensor import sem_grad
from plugins.geometria.malha import Malha, RigCameras
from plugins.renderizacao.imagem import Imagem
from plugins.renderizacao.vistas import RESOLUCAO_VISTAS, render_views
from plugins.rede.siamesa import ParametrosRede, embed_image, embed_shape
from utils.erros import ErroArquivoCorrompido, ErroParametroInvalido, ErroVersaoIncompativel
from utils.logging_config import get_logger

logger = get_logger(__name__)

MAGIC_INDICE = b"SRIX"
VERSAO_INDICE = 1


@dataclass
class IndiceDescritores:
    """
    Attributes:
        ids: object_ids únicos, na ordem de construção
        vetores: (N, D) float32 unitários
        hash_checkpoint: hash da arquitetura que gerou os vetores (não persistido)
    """

    ids: List[str]
    vetores: np.ndarray
    hash_checkpoint: Optional[int] = None

    def __post_init__(self):
        vetores = np.asarray(self.vetores, dtype=np.float32)
        if not self.ids:
            vetores = vetores.reshape(0, vetores.shape[-1] if vetores.ndim == 2 else 0)
        self.vetores = vetores.reshape(len(self.ids), -1)
        if len(set(self.ids)) != len(self.ids):
            repetidos = sorted({i for i in self.ids if self.ids.count(i) > 1})
            raise ErroParametroInvalido(f"object_ids repetidos no índice: {repetidos}")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dimensao(self) -> int:
        return self.vetores.shape[1]

    def vetor(self, object_id: str) -> np.ndarray:
        return self.vetores[self.ids.index(object_id)]


@dataclass
class ResultadoBusca:
    """Ranking (object_id, similaridade) decrescente; empates por id ascendente."""

    consulta: str
    ranking: List[Tuple[str, float]] = field(default_factory=list)

    def posicao(self, object_id: str) -> Optional[int]:
        """Posição 1-based do id no ranking (None se ausente)."""
        for posicao, (candidato, _) in enumerate(self.ranking, start=1):
            if candidato == object_id:
                return posicao
        return None

    @property
    def top1(self) -> Optional[str]:
        return self.ranking[0][0] if self.ranking else None


# ============================================================
# CONSTRUÇÃO
# ============================================================

def indice_de_vistas(
    params: ParametrosRede,
    vistas_por_objeto: Mapping[str, Sequence[Imagem]],
    n_threads: int = 1,
) -> IndiceDescritores:
    """Um embed_shape por objeto a partir de vistas já renderizadas."""
    ids = list(vistas_por_objeto)

    def descrever(object_id):
        with sem_grad():
            return embed_shape(params, vistas_por_objeto[object_id], params.n_vistas).dados

    if n_threads <= 1:
        vetores = [descrever(i) for i in ids]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as executor:
            vetores = list(executor.map(descrever, ids))
    return IndiceDescritores(ids, np.stack(vetores) if vetores else np.zeros((0, 0)), params.hash)


def build_index(
    params: ParametrosRede,
    malhas: Union[Mapping[str, Malha], Sequence[Malha]],
    rig: RigCameras,
    resolucao: int = RESOLUCAO_VISTAS,
    n_threads: int = 1,
) -> IndiceDescritores:
    """
    Renderiza as vistas de cada malha e calcula seu descritor.

    Raises:
        ErroParametroInvalido: conjunto vazio ou object_id repetido
    """
    if isinstance(malhas, Mapping):
        pares = list(malhas.items())
    else:
        pares = [(m.nome, m) for m in malhas]
    if not pares:
        raise ErroParametroInvalido("conjunto de malhas vazio")
    ids = [object_id for object_id, _ in pares]
    if len(set(ids)) != len(ids):
        raise ErroParametroInvalido(f"object_ids repetidos: {sorted({i for i in ids if ids.count(i) > 1})}")

    vistas = {
        object_id: render_views(malha, rig, resolucao, lado_saida=params.tamanho_entrada, n_threads=n_threads)
        for object_id, malha in pares
    }
    indice = indice_de_vistas(params, vistas, n_threads)
    logger.info(f"[avaliacao] índice com {len(indice)} objetos ({rig.n_vistas} vistas cada)")
    return indice


# ============================================================
# CONSULTA
# ============================================================

def ranquear(indice: IndiceDescritores, vetor: np.ndarray, k: int, consulta: str = "") -> ResultadoBusca:
    """Top-k por produto escalar, ordenado por (-score, id)."""
    if not 1 <= k <= len(indice):
        raise ErroParametroInvalido(f"k deve estar em [1, {len(indice)}] (recebido {k})")
    scores = indice.vetores.astype(np.float64) @ np.asarray(vetor, dtype=np.float64).reshape(-1)
    scores = np.clip(scores, -1.0, 1.0)
    ordem = sorted(range(len(indice)), key=lambda i: (-scores[i], indice.ids[i]))
    return ResultadoBusca(consulta, [(indice.ids[i], float(scores[i])) for i in ordem[:k]])


def query(
    indice: IndiceDescritores,
    params: ParametrosRede,
    imagem: Imagem,
    k: int,
    consulta: str = "",
) -> ResultadoBusca:
    """Embedding da imagem e ranking contra o índice."""
    with sem_grad():
        vetor = embed_image(params, imagem).dados
    return ranquear(indice, vetor, k, consulta)


# ============================================================
# PERSISTÊNCIA
# ============================================================

def salvar_indice(indice: IndiceDescritores, caminho: Union[str, Path]) -> Path:
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    with open(caminho, "wb") as arquivo:
        arquivo.write(MAGIC_INDICE)
        arquivo.write(struct.pack("<III", VERSAO_INDICE, len(indice), indice.dimensao))
        for object_id, vetor in zip(indice.ids, indice.vetores):
            nome = object_id.encode("utf-8")
            arquivo.write(struct.pack("<H", len(nome)))
            arquivo.write(nome)
            arquivo.write(np.ascontiguousarray(vetor, dtype="<f4").tobytes())
    return caminho


def carregar_indice(caminho: Union[str, Path], hash_checkpoint: Optional[int] = None) -> IndiceDescritores:
    """
    Raises:
        ErroArquivoCorrompido: magic errado, truncado ou bytes sobrando
        ErroVersaoIncompativel: versão de formato diferente
    """
    caminho = Path(caminho)
    try:
        dados = caminho.read_bytes()
    except OSError as e:
        raise ErroArquivoCorrompido(f"falha ao ler índice {caminho}: {e}") from e
    if len(dados) < 16 or dados[:4] != MAGIC_INDICE:
        raise ErroArquivoCorrompido(f"{caminho}: não é um índice (magic inválido)")
    versao, contagem, dimensao = struct.unpack_from("<III", dados, 4)
    if versao != VERSAO_INDICE:
        raise ErroVersaoIncompativel(f"{caminho}: versão {versao}, esperado {VERSAO_INDICE}")

    posicao = 16
    ids, vetores = [], []
    try:
        for _ in range(contagem):
            (tamanho,) = struct.unpack_from("<H", dados, posicao)
            posicao += 2
            if posicao + tamanho + 4 * dimensao > len(dados):
                raise ErroArquivoCorrompido(f"{caminho}: arquivo truncado")
            ids.append(dados[posicao:posicao + tamanho].decode("utf-8"))
            posicao += tamanho
            vetores.append(np.frombuffer(dados, dtype="<f4", count=dimensao, offset=posicao))
            posicao += 4 * dimensao
    except (struct.error, UnicodeDecodeError) as e:
        raise ErroArquivoCorrompido(f"{caminho}: registro ilegível: {e}") from e
    if posicao != len(dados):
        raise ErroArquivoCorrompido(f"{caminho}: {len(dados) - posicao} bytes sobrando")
    matriz = np.stack(vetores) if vetores else np.zeros((0, dimensao), dtype=np.float32)
    return IndiceDescritores(ids, matriz, hash_checkpoint)
