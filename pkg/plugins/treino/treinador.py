"""
Laço de treino da rede siamesa.

Uma época percorre todos os objetos como âncora, em ordem embaralhada pela
semente [semente, época]. Cada âncora gera um passo do otimizador com os
pares positivos e negativos do seu lote. Ao fim de cada época a validação
mede Top-1/2/5 e o melhor Top-1 define o checkpoint devolvido (empate fica
com a época anterior).
"""

import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from plugins.autograd.operacoes import contrastive_loss, cosine_distance, media_escalares
from plugins.autograd.otimizador import Adam, EstadoAdam
from plugins.autograd.tensor import precisao, sem_grad
from plugins.avaliacao.indice import indice_de_vistas, ranquear
from plugins.avaliacao.metricas import tabela_topk
from plugins.dados.manifesto import Manifesto
from plugins.geometria.malha import rig_icosaedrico
from plugins.rede.siamesa import ParametrosRede, embed_image, embed_shape, init_params
from plugins.renderizacao.imagem import Imagem
from plugins.renderizacao.vistas import render_views
from plugins.treino.amostragem import ConjuntoTreino, LoteAncora, sample_anchor_batch
from plugins.treino.config import ConfigTreino
from utils.logging_config import get_logger
from utils.progress_helper import get_progress_helper

logger = get_logger(__name__)

KS_VALIDACAO = (1, 2, 5)


@dataclass
class EstatisticasEpoca:
    epoca: int
    perda: float
    top1: float
    top2: float
    top5: float
    tempo: float = 0.0

    def linha(self) -> str:
        """Linha do log de estatísticas (tempo fica de fora)."""
        return f"{self.epoca}\t{self.perda:.6f}\t{self.top1:.6f}\t{self.top2:.6f}\t{self.top5:.6f}"


@dataclass
class ResultadoTreino:
    params: ParametrosRede
    estado: EstadoAdam
    estatisticas: List[EstatisticasEpoca] = field(default_factory=list)
    melhor_epoca: int = 0

    @property
    def melhor(self) -> Optional[EstatisticasEpoca]:
        for stats in self.estatisticas:
            if stats.epoca == self.melhor_epoca:
                return stats
        return None


def copiar_estado(estado: EstadoAdam) -> EstadoAdam:
    return EstadoAdam(
        m={nome: valores.copy() for nome, valores in estado.m.items()},
        v={nome: valores.copy() for nome, valores in estado.v.items()},
        t=estado.t,
    )


# ============================================================
# PASSO
# ============================================================

def perda_do_lote(params: ParametrosRede, lote: LoteAncora, margem: float):
    """Média da perda contrastiva nos pares do lote (descritor da forma calculado uma vez)."""
    descritor = embed_shape(params, lote.vistas, params.n_vistas)
    perdas = [
        contrastive_loss(cosine_distance(descritor, embed_image(params, imagem)), igual, margem)
        for imagens, igual in ((lote.positivos, 1), (lote.negativos, 0))
        for imagem in imagens
    ]
    return media_escalares(perdas)


def train_step(params: ParametrosRede, lote: LoteAncora, config: ConfigTreino, otimizador: Adam) -> float:
    """Um backward e um passo de Adam; devolve a perda do lote."""
    otimizador.zerar_grad()
    perda = perda_do_lote(params, lote, config.margem)
    perda.backward()
    otimizador.passo()
    logger.trace("[treino] passo %d da âncora %s: perda %.6f (%d pares)", otimizador.estado.t, lote.ancora, perda.item(), lote.n_pares)
    return perda.item()


# ============================================================
# VALIDAÇÃO
# ============================================================

def validar(
    params: ParametrosRede,
    vistas: Mapping[str, Sequence[Imagem]],
    validacao: Mapping[str, Sequence[Imagem]],
    ks: Sequence[int] = KS_VALIDACAO,
    n_threads: int = 1,
) -> Dict[int, float]:
    """Top-k das imagens de validação contra o índice das vistas atuais."""
    if not any(validacao.values()):
        return {k: 0.0 for k in ks}
    indice = indice_de_vistas(params, vistas, n_threads)
    resultados, verdade = [], {}
    with sem_grad():
        for object_id, imagens in validacao.items():
            for j, imagem in enumerate(imagens):
                consulta = f"{object_id}#{j}"
                verdade[consulta] = object_id
                vetor = embed_image(params, imagem).dados
                resultados.append(ranquear(indice, vetor, len(indice), consulta))
    return tabela_topk(resultados, verdade, ks, indice.ids)


# ============================================================
# TREINO
# ============================================================

def renderizar_vistas_treino(
    catalogo: Mapping, object_ids: Sequence[str], config: ConfigTreino, n_threads: int = 1
) -> Dict[str, List[Imagem]]:
    """Vistas fixas por objeto, no tamanho de entrada da rede."""
    rig = rig_icosaedrico(config.n_vistas)
    return {
        object_id: render_views(
            catalogo[object_id], rig, config.resolucao_render, lado_saida=config.tamanho_entrada, n_threads=n_threads
        )
        for object_id in object_ids
    }


def train(
    config: ConfigTreino,
    manifesto: Manifesto,
    caminho_stats: Optional[Union[str, Path]] = None,
    n_threads: Optional[int] = None,
    cancelado: Optional[Callable[[], bool]] = None,
) -> ResultadoTreino:
    """
    Treina a partir do manifesto e devolve o melhor checkpoint por Top-1 de validação.

    Args:
        caminho_stats: log `epoch<TAB>loss<TAB>top1<TAB>top2<TAB>top5`, uma linha por época
        n_threads: sobrepõe config.threads
        cancelado: consultado entre âncoras; True encerra após a época corrente

    Raises:
        ErroImagensInsuficientes: objeto com menos imagens que os positivos por âncora
        ErroObjetoDesconhecido: malha ausente sob o diretório do manifesto
    """
    n_threads = n_threads or config.threads
    with ExitStack() as pilha:
        pilha.enter_context(precisao(config.precisao))
        executor = pilha.enter_context(ThreadPoolExecutor(max_workers=n_threads)) if n_threads > 1 else None
        arquivo_stats = None
        if caminho_stats is not None:
            caminho_stats = Path(caminho_stats)
            caminho_stats.parent.mkdir(parents=True, exist_ok=True)
            arquivo_stats = pilha.enter_context(open(caminho_stats, "w", encoding="utf-8", newline="\n"))

        conjunto = ConjuntoTreino.do_manifesto(
            manifesto,
            config.tamanho_entrada,
            config.fracao_validacao,
            config.semente_validacao,
            minimo_treino=config.positivos_por_ancora,
        )
        if conjunto.n_validacao == 0:
            logger.warning("[treino] sem imagens de validação: Top-k registrado como 0 e a época 1 é mantida")
        catalogo = manifesto.carregar_catalogo()
        vistas = renderizar_vistas_treino(catalogo, conjunto.object_ids, config, n_threads)

        params = init_params(config.semente, config.modo, config.tamanho_entrada, config.n_vistas)
        otimizador = Adam(params.tensores, lr=config.taxa_aprendizado, weight_decay=config.weight_decay)
        logger.info(
            f"[treino] {config.modo} | {params.n_parametros_por_ramo()} parâmetros por ramo | "
            f"{config.epocas} épocas | hash {params.hash:#018x}"
        )

        resultado: Optional[ResultadoTreino] = None
        estatisticas: List[EstatisticasEpoca] = []
        progresso = get_progress_helper()
        interrompido = False
        for epoca in range(1, config.epocas + 1):
            inicio = time.perf_counter()
            rng = np.random.default_rng([config.semente, epoca])
            ordem = [conjunto.object_ids[i] for i in rng.permutation(len(conjunto.object_ids))]
            perdas = []
            with progresso.progress_bar(len(ordem), f"Época {epoca}/{config.epocas}"):
                for ancora in ordem:
                    lote = sample_anchor_batch(
                        conjunto, ancora, rng, config.positivos_por_ancora, vistas[ancora], executor
                    )
                    perdas.append(train_step(params, lote, config, otimizador))
                    progresso.update()
                    if cancelado is not None and cancelado():
                        interrompido = True

            topk = validar(params, vistas, conjunto.validacao, KS_VALIDACAO, n_threads)
            stats = EstatisticasEpoca(
                epoca, float(np.mean(perdas)), topk[1], topk[2], topk[5], time.perf_counter() - inicio
            )
            estatisticas.append(stats)
            if arquivo_stats is not None:
                arquivo_stats.write(stats.linha() + "\n")
                arquivo_stats.flush()
            logger.info(
                f"[treino] época {epoca}: perda {stats.perda:.4f} | top1 {stats.top1:.3f} "
                f"top2 {stats.top2:.3f} top5 {stats.top5:.3f} | {stats.tempo:.1f}s"
            )

            if resultado is None or stats.top1 > resultado.melhor.top1:
                resultado = ResultadoTreino(params.copiar(), copiar_estado(otimizador.estado), estatisticas, epoca)
            if interrompido:
                logger.warning(f"[treino] cancelado após a época {epoca}")
                break

    logger.info(f"[treino] melhor época {resultado.melhor_epoca} (top1 {resultado.melhor.top1:.3f})")
    return resultado
