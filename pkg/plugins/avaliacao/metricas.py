"""Top-k accuracy, avaliação de manifestos de consulta e divisão zero-shot."""

from concurrent.futures import ThreadPoolExecutor
from typing import Collection, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from plugins.avaliacao.indice import IndiceDescritores, ResultadoBusca, query
from plugins.dados.manifesto import Manifesto
from plugins.rede.siamesa import ParametrosRede
from plugins.renderizacao.imagem import carregar_png, redimensionar
from utils.erros import ErroContagemInvalida, ErroVerdadeAusente


def topk_accuracy(
    resultados: Sequence[ResultadoBusca],
    verdade: Mapping[str, str],
    k: int,
    ids_indice: Optional[Collection[str]] = None,
) -> float:
    """
    Fração das consultas com o id verdadeiro entre os k primeiros.

    Args:
        ids_indice: object_ids do índice consultado; sem ele, valem os ids
            presentes nos rankings (rankings completos)

    Raises:
        ErroVerdadeAusente: consulta sem rótulo ou rótulo fora do índice
    """
    if not resultados:
        return 0.0
    if ids_indice is None:
        ids_indice = {object_id for resultado in resultados for object_id, _ in resultado.ranking}
    ids_indice = set(ids_indice)
    acertos = 0
    for resultado in resultados:
        if resultado.consulta not in verdade:
            raise ErroVerdadeAusente(f"consulta sem verdade: {resultado.consulta}")
        if verdade[resultado.consulta] not in ids_indice:
            raise ErroVerdadeAusente(
                f"{resultado.consulta}: verdade '{verdade[resultado.consulta]}' ausente do índice"
            )
        posicao = resultado.posicao(verdade[resultado.consulta])
        if posicao is not None and posicao <= k:
            acertos += 1
    return acertos / len(resultados)


def tabela_topk(
    resultados: Sequence[ResultadoBusca],
    verdade: Mapping[str, str],
    ks: Sequence[int],
    ids_indice: Optional[Collection[str]] = None,
) -> Dict[int, float]:
    return {k: topk_accuracy(resultados, verdade, k, ids_indice) for k in ks}


def detalhes_consultas(resultados: Sequence[ResultadoBusca], verdade: Mapping[str, str]) -> List[Tuple[str, str, int, str]]:
    """(consulta, verdade, posição da verdade ou 0, top1) por consulta."""
    linhas = []
    for resultado in resultados:
        if resultado.consulta not in verdade:
            raise ErroVerdadeAusente(f"consulta sem verdade: {resultado.consulta}")
        alvo = verdade[resultado.consulta]
        linhas.append((resultado.consulta, alvo, resultado.posicao(alvo) or 0, resultado.top1 or ""))
    return linhas


def zero_shot_split(object_ids: Sequence[str], n_retidos: int, semente: int) -> Tuple[List[str], List[str]]:
    """
    Divide os ids em (treino, teste) disjuntos; ordem original preservada.

    Raises:
        ErroContagemInvalida: n_retidos fora de [0, total - 1]
    """
    object_ids = list(object_ids)
    if not 0 <= n_retidos < len(object_ids):
        raise ErroContagemInvalida(f"n_retidos deve estar em [0, {len(object_ids) - 1}] (recebido {n_retidos})")
    permutacao = np.random.default_rng(semente).permutation(len(object_ids))
    retidos = set(permutacao[:n_retidos].tolist())
    treino = [i for n, i in enumerate(object_ids) if n not in retidos]
    teste = [i for n, i in enumerate(object_ids) if n in retidos]
    return treino, teste


def consultar_manifesto(
    indice: IndiceDescritores,
    params: ParametrosRede,
    manifesto: Manifesto,
    n_threads: int = 1,
) -> Tuple[List[ResultadoBusca], Dict[str, str]]:
    """
    Uma consulta por imagem do manifesto, ranqueando o índice inteiro.

    A consulta é identificada pelo caminho relativo da imagem; a verdade é o
    object_id da entrada.
    """
    tamanho = params.tamanho_entrada

    def consultar(entrada) -> ResultadoBusca:
        imagem = redimensionar(carregar_png(manifesto.caminho_absoluto(entrada), canais=3), tamanho, tamanho)
        return query(indice, params, imagem, len(indice), entrada.caminho)

    if n_threads <= 1:
        resultados = [consultar(e) for e in manifesto.entradas]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as executor:
            resultados = list(executor.map(consultar, manifesto.entradas))
    verdade = {e.caminho: e.object_id for e in manifesto.entradas}
    return resultados, verdade
