"""
Rede siamesa de dois ramos: imagem colorida e vistas da forma.

Arquitetura:
    stem  = conv 3→16 k3 p1, relu, maxpool2, conv 16→32 k3 p1, relu, maxpool2
    trunk = conv 32→64 k3 p1, relu, maxpool2, conv 64→128 k3 p1, relu, global_maxpool
    head  = dense 128→128, seguido de l2_normalize

Stems são sempre privados de cada ramo. No modo `shared`, trunk e head são o
mesmo Tensor nos dois ramos; no modo `separate` cada ramo tem os seus.
O max-pooling entre vistas acontece na característica de 128 dimensões
anterior ao head.
"""

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from plugins.autograd.operacoes import (
    conv2d,
    cosine_distance,
    dense,
    elementwise_max,
    global_maxpool,
    l2_normalize,
    maxpool2d,
    relu,
)
from plugins.autograd.tensor import Tensor, parametro, precisao_padrao
from plugins.renderizacao.imagem import Imagem
from utils.erros import ErroFormaIncompativel, ErroParametroInvalido

CANAIS_PADRAO = (16, 32, 64, 128)
DIM_EMBEDDING = 128
TAMANHO_ENTRADA_PADRAO = 64

RAMO_IMAGEM = "img"
RAMO_VISTA = "view"


class ModoCompartilhamento(str, Enum):
    SHARED = "shared"
    SEPARATE = "separate"

    def __str__(self):
        return self.value


# ============================================================
# PARÂMETROS
# ============================================================

def _formas_grupo(grupo: str, canais: Tuple[int, ...], dim: int) -> List[Tuple[str, Tuple[int, ...]]]:
    """(sufixo, forma) dos tensores de um grupo, em ordem fixa."""
    c1, c2, c3, c4 = canais
    if grupo == "stem":
        return [("conv1.peso", (c1, 3, 3, 3)), ("conv1.vies", (c1,)),
                ("conv2.peso", (c2, c1, 3, 3)), ("conv2.vies", (c2,))]
    if grupo == "trunk":
        return [("conv3.peso", (c3, c2, 3, 3)), ("conv3.vies", (c3,)),
                ("conv4.peso", (c4, c3, 3, 3)), ("conv4.vies", (c4,))]
    return [("peso", (dim, c4)), ("vies", (dim,))]


def nomes_grupos(modo: ModoCompartilhamento) -> Dict[str, Dict[str, str]]:
    """Prefixo de cada grupo por ramo."""
    modo = ModoCompartilhamento(str(modo))
    if modo == ModoCompartilhamento.SHARED:
        return {
            RAMO_IMAGEM: {"stem": "stem_img", "trunk": "trunk", "head": "head"},
            RAMO_VISTA: {"stem": "stem_view", "trunk": "trunk", "head": "head"},
        }
    return {
        RAMO_IMAGEM: {"stem": "stem_img", "trunk": "trunk_img", "head": "head_img"},
        RAMO_VISTA: {"stem": "stem_view", "trunk": "trunk_view", "head": "head_view"},
    }


def formas_parametros(
    modo: ModoCompartilhamento, canais: Tuple[int, ...] = CANAIS_PADRAO, dim: int = DIM_EMBEDDING
) -> List[Tuple[str, Tuple[int, ...]]]:
    """Nomes e formas de todos os tensores distintos, na ordem canônica."""
    prefixos = []
    for ramo in (RAMO_IMAGEM, RAMO_VISTA):
        for grupo in ("stem", "trunk", "head"):
            prefixo = nomes_grupos(modo)[ramo][grupo]
            if (prefixo, grupo) not in prefixos:
                prefixos.append((prefixo, grupo))
    # stems primeiro, depois trunk(s), depois head(s)
    ordem_grupo = {"stem": 0, "trunk": 1, "head": 2}
    prefixos.sort(key=lambda par: ordem_grupo[par[1]])
    return [
        (f"{prefixo}.{sufixo}", forma)
        for prefixo, grupo in prefixos
        for sufixo, forma in _formas_grupo(grupo, canais, dim)
    ]


def hash_arquitetura(modo: ModoCompartilhamento, formas: Sequence[Tuple[str, Tuple[int, ...]]]) -> int:
    """blake2b de 8 bytes sobre modo, nomes e formas."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(ModoCompartilhamento(str(modo))).encode("utf-8"))
    for nome, forma in formas:
        h.update(f"|{nome}:{'x'.join(str(d) for d in forma)}".encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


@dataclass
class ParametrosRede:
    """
    Attributes:
        tensores: nome -> Tensor treinável (cada armazenamento aparece uma vez)
        modo: shared | separate
        tamanho_entrada: lado das imagens de entrada
        n_vistas: número de vistas esperado por embed_shape (None = qualquer)
    """

    tensores: Dict[str, Tensor]
    modo: ModoCompartilhamento
    tamanho_entrada: int = TAMANHO_ENTRADA_PADRAO
    n_vistas: Optional[int] = 12

    def __post_init__(self):
        self.modo = ModoCompartilhamento(str(self.modo))
        formas = {nome: tuple(t.shape) for nome, t in self.tensores.items()}
        try:
            esperado = dict(formas_parametros(self.modo, self.canais, self.dim_embedding))
        except KeyError as e:
            raise ErroFormaIncompativel(f"parâmetro ausente: {e}") from e
        if formas != esperado:
            faltando = sorted(set(esperado) - set(formas))
            extras = sorted(set(formas) - set(esperado))
            raise ErroFormaIncompativel(f"parâmetros inconsistentes: faltando {faltando}, extras {extras}")

    @property
    def canais(self) -> Tuple[int, ...]:
        stem = self.tensores["stem_img.conv1.peso"].shape[0], self.tensores["stem_img.conv2.peso"].shape[0]
        trunk = nomes_grupos(self.modo)[RAMO_IMAGEM]["trunk"]
        return (
            stem[0],
            stem[1],
            self.tensores[f"{trunk}.conv3.peso"].shape[0],
            self.tensores[f"{trunk}.conv4.peso"].shape[0],
        )

    @property
    def dim_embedding(self) -> int:
        head = nomes_grupos(self.modo)[RAMO_IMAGEM]["head"]
        return self.tensores[f"{head}.peso"].shape[0]

    @property
    def hash(self) -> int:
        return hash_arquitetura(self.modo, formas_parametros(self.modo, self.canais, self.dim_embedding))

    def do_ramo(self, ramo: str) -> Dict[str, Tensor]:
        """Visão do ramo: `stem.*`, `trunk.*`, `head.*` -> Tensor."""
        visao = {}
        for grupo, prefixo in nomes_grupos(self.modo)[ramo].items():
            for nome, tensor in self.tensores.items():
                if nome.startswith(prefixo + "."):
                    visao[f"{grupo}.{nome[len(prefixo) + 1:]}"] = tensor
        return visao

    def n_parametros_por_ramo(self) -> int:
        return sum(t.size for t in self.do_ramo(RAMO_IMAGEM).values())

    def n_armazenamentos(self) -> int:
        return len({id(t) for t in self.tensores.values()})

    def copiar(self) -> "ParametrosRede":
        return ParametrosRede(
            {nome: parametro(t.dados.copy(), dtype=t.dtype) for nome, t in self.tensores.items()},
            self.modo,
            self.tamanho_entrada,
            self.n_vistas,
        )


def init_params(
    semente: int,
    modo: ModoCompartilhamento = ModoCompartilhamento.SHARED,
    tamanho_entrada: int = TAMANHO_ENTRADA_PADRAO,
    n_vistas: Optional[int] = 12,
    canais: Tuple[int, ...] = CANAIS_PADRAO,
    dim: int = DIM_EMBEDDING,
    dtype=None,
) -> ParametrosRede:
    """He-uniforme (limite √(6/fan_in)) para pesos, vieses zero, ordem fixa de sorteio."""
    dtype = dtype or precisao_padrao()
    rng = np.random.default_rng(semente)
    tensores = {}
    for nome, forma in formas_parametros(modo, tuple(canais), dim):
        if nome.endswith("vies"):
            valores = np.zeros(forma)
        else:
            fan_in = int(np.prod(forma[1:]))
            limite = np.sqrt(6.0 / fan_in)
            valores = rng.uniform(-limite, limite, size=forma)
        tensores[nome] = parametro(valores, dtype=dtype)
    return ParametrosRede(tensores, modo, tamanho_entrada, n_vistas)


# ============================================================
# PASSAGEM PARA A FRENTE
# ============================================================

def _como_entrada(imagem: Union[Imagem, np.ndarray], tamanho: int, dtype) -> Tensor:
    dados = imagem.dados if isinstance(imagem, Imagem) else np.asarray(imagem)
    if dados.ndim == 2:
        dados = dados[:, :, None]
    if dados.shape[:2] != (tamanho, tamanho):
        raise ErroFormaIncompativel(f"imagem {dados.shape[:2]} difere da entrada {tamanho}x{tamanho}")
    if dados.shape[2] == 1:
        dados = np.repeat(dados, 3, axis=2)
    if dados.shape[2] != 3:
        raise ErroFormaIncompativel(f"imagem com {dados.shape[2]} canais")
    return Tensor(np.ascontiguousarray(dados.transpose(2, 0, 1)), dtype=dtype)


def _caracteristica(p: Dict[str, Tensor], x: Tensor) -> Tensor:
    """stem -> trunk: característica de 128 dimensões antes do head."""
    x = maxpool2d(relu(conv2d(x, p["stem.conv1.peso"], p["stem.conv1.vies"], 1, 1)))
    x = maxpool2d(relu(conv2d(x, p["stem.conv2.peso"], p["stem.conv2.vies"], 1, 1)))
    x = maxpool2d(relu(conv2d(x, p["trunk.conv3.peso"], p["trunk.conv3.vies"], 1, 1)))
    x = relu(conv2d(x, p["trunk.conv4.peso"], p["trunk.conv4.vies"], 1, 1))
    return global_maxpool(x)


def _head(p: Dict[str, Tensor], caracteristica: Tensor) -> Tensor:
    return l2_normalize(dense(caracteristica, p["head.peso"], p["head.vies"]))


def _dtype(p: ParametrosRede):
    return next(iter(p.tensores.values())).dtype


def embed_image(p: ParametrosRede, imagem: Union[Imagem, np.ndarray]) -> Tensor:
    """
    Embedding unitário de uma imagem colorida.

    Raises:
        ErroFormaIncompativel: tamanho diferente da entrada configurada
    """
    ramo = p.do_ramo(RAMO_IMAGEM)
    return _head(ramo, _caracteristica(ramo, _como_entrada(imagem, p.tamanho_entrada, _dtype(p))))


def caracteristicas_agrupadas(p: ParametrosRede, vistas: Sequence[Union[Imagem, np.ndarray]]) -> Tensor:
    """Máximo elemento a elemento das características pré-head das vistas."""
    if not vistas:
        raise ErroParametroInvalido("lista de vistas vazia")
    ramo = p.do_ramo(RAMO_VISTA)
    dtype = _dtype(p)
    # Uma vista por vez: o resultado não depende da ordem
    return elementwise_max([_caracteristica(ramo, _como_entrada(v, p.tamanho_entrada, dtype)) for v in vistas])


def embed_shape(
    p: ParametrosRede,
    vistas: Sequence[Union[Imagem, np.ndarray]],
    n_esperado: Optional[int] = None,
) -> Tensor:
    """
    Descritor da forma a partir das vistas em tons de cinza.

    Raises:
        ErroParametroInvalido: número de vistas diferente do esperado
        ErroFormaIncompativel: vistas de tamanho errado
    """
    if n_esperado is not None and len(vistas) != n_esperado:
        raise ErroParametroInvalido(f"esperado {n_esperado} vistas, recebido {len(vistas)}")
    return _head(p.do_ramo(RAMO_VISTA), caracteristicas_agrupadas(p, vistas))


def pair_distance(p: ParametrosRede, vistas, imagem) -> Tensor:
    """Distância cosseno (em [0, 2]) entre descritor da forma e da imagem."""
    return cosine_distance(embed_shape(p, vistas), embed_image(p, imagem))
