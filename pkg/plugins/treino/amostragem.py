"""
Conjunto de treino em memória e sorteio de lotes por âncora.

Um lote = vistas da forma âncora + N positivos (imagens do próprio objeto,
sem reposição) + N negativos (de objetos distintos sempre que possível).
"""

from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from plugins.dados.aumento import augment
from plugins.dados.manifesto import Manifesto
from plugins.renderizacao.imagem import Imagem, carregar_png, redimensionar
from utils.erros import ErroImagensInsuficientes, ErroObjetoDesconhecido
from utils.logging_config import get_logger

logger = get_logger(__name__)

POSITIVOS_PADRAO = 6

# (object_id, índice da imagem no conjunto de treino do objeto)
Origem = Tuple[str, int]


@dataclass
class ConjuntoTreino:
    """
    Attributes:
        imagens: object_id -> imagens de treino (já no tamanho de entrada)
        validacao: object_id -> imagens retidas para validação
    """

    imagens: Dict[str, List[Imagem]]
    validacao: Dict[str, List[Imagem]] = field(default_factory=dict)

    @property
    def object_ids(self) -> List[str]:
        return list(self.imagens)

    @property
    def n_validacao(self) -> int:
        return sum(len(v) for v in self.validacao.values())

    @classmethod
    def do_manifesto(
        cls,
        manifesto: Manifesto,
        tamanho_entrada: int,
        fracao_validacao: float = 0.0,
        semente_validacao: int = 0,
        minimo_treino: int = POSITIVOS_PADRAO,
    ) -> "ConjuntoTreino":
        """
        Carrega as imagens do manifesto e separa a validação.

        Por objeto são retidas round(fração·n) imagens sorteadas, desde que
        sobrem ao menos `minimo_treino` para treino.
        """
        rng = np.random.default_rng(semente_validacao)
        imagens, validacao = {}, {}
        for object_id, entradas in manifesto.por_objeto().items():
            carregadas = [_carregar(manifesto.caminho_absoluto(e), tamanho_entrada) for e in entradas]
            n_val = int(np.floor(fracao_validacao * len(carregadas) + 0.5))
            n_val = max(0, min(n_val, len(carregadas) - minimo_treino))
            retidas = set(rng.permutation(len(carregadas))[:n_val].tolist())
            imagens[object_id] = [img for i, img in enumerate(carregadas) if i not in retidas]
            validacao[object_id] = [img for i, img in enumerate(carregadas) if i in retidas]
        conjunto = cls(imagens, validacao)
        logger.info(
            f"[treino] {len(imagens)} objetos, {sum(len(v) for v in imagens.values())} imagens de treino, "
            f"{conjunto.n_validacao} de validação"
        )
        return conjunto


def _carregar(caminho, tamanho: int) -> Imagem:
    imagem = carregar_png(caminho, canais=3)
    if (imagem.largura, imagem.altura) != (tamanho, tamanho):
        imagem = redimensionar(imagem, tamanho, tamanho)
    return imagem


@dataclass
class LoteAncora:
    ancora: str
    vistas: Sequence[Imagem]
    positivos: List[Imagem]
    negativos: List[Imagem]
    origens_positivas: List[Origem]
    origens_negativas: List[Origem]

    @property
    def n_pares(self) -> int:
        return len(self.positivos) + len(self.negativos)


def _objetos_negativos(outros: List[str], quantidade: int, rng: np.random.Generator) -> List[str]:
    """Objetos distintos quando há suficientes; senão permutações encadeadas."""
    escolhidos: List[str] = []
    while len(escolhidos) < quantidade:
        faltam = quantidade - len(escolhidos)
        ordem = rng.permutation(len(outros))[:faltam]
        escolhidos.extend(outros[i] for i in ordem)
    return escolhidos


def sample_anchor_batch(
    conjunto: ConjuntoTreino,
    ancora: str,
    rng: np.random.Generator,
    n_positivos: int = POSITIVOS_PADRAO,
    vistas: Sequence[Imagem] = (),
    executor: Optional[Executor] = None,
) -> LoteAncora:
    """
    Sorteia positivos e negativos da âncora e aplica augment com sementes novas.

    Todos os sorteios saem de `rng` na thread chamadora; só a aplicação do
    augment vai para o executor, então o lote não depende do paralelismo.

    Raises:
        ErroObjetoDesconhecido: âncora fora do conjunto
        ErroImagensInsuficientes: âncora com menos de n_positivos imagens ou
            conjunto com um único objeto
    """
    if ancora not in conjunto.imagens:
        raise ErroObjetoDesconhecido(f"âncora desconhecida: {ancora}")
    if len(conjunto.imagens) < 2:
        raise ErroImagensInsuficientes("são necessários ao menos 2 objetos para sortear negativos")
    proprias = conjunto.imagens[ancora]
    if len(proprias) < n_positivos:
        raise ErroImagensInsuficientes(
            f"{ancora}: {len(proprias)} imagens de treino, necessárias {n_positivos}"
        )

    origens_pos = [(ancora, int(i)) for i in rng.choice(len(proprias), n_positivos, replace=False)]
    outros = [object_id for object_id in conjunto.imagens if object_id != ancora]
    origens_neg = [
        (object_id, int(rng.integers(len(conjunto.imagens[object_id]))))
        for object_id in _objetos_negativos(outros, n_positivos, rng)
    ]
    sementes = rng.integers(0, np.iinfo(np.int64).max, size=2 * n_positivos, dtype=np.int64)

    trabalhos = [
        (conjunto.imagens[object_id][indice], int(semente))
        for (object_id, indice), semente in zip(origens_pos + origens_neg, sementes)
    ]
    if executor is None:
        aumentadas = [augment(imagem, semente) for imagem, semente in trabalhos]
    else:
        aumentadas = list(executor.map(lambda t: augment(*t), trabalhos))

    return LoteAncora(
        ancora=ancora,
        vistas=vistas,
        positivos=aumentadas[:n_positivos],
        negativos=aumentadas[n_positivos:],
        origens_positivas=origens_pos,
        origens_negativas=origens_neg,
    )
