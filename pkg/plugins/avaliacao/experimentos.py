"""
Experimentos controlados: varredura de mistura de dados, ablação de
compartilhamento de parâmetros e varredura do número de objetos de treino.

Por semente:
    1. gera o corpus de formas e separa os objetos de teste (zero_shot_split);
    2. gera um conjunto de consultas coloridas dos objetos de teste, comum a
       todos os braços;
    3. para cada braço gera os dados de treino, treina, indexa os objetos de
       teste e mede Top-1/2/5.

Saídas em `<saida>/`: `resultados.tsv` (média entre sementes, um braço por
linha) e `resultados_por_semente.tsv`.
"""

from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from plugins.avaliacao.indice import build_index
from plugins.avaliacao.metricas import consultar_manifesto, tabela_topk, zero_shot_split
from plugins.dados.manifesto import Manifesto, generate_dataset
from plugins.geometria.formas import gerar_corpus
from plugins.geometria.malha import Malha, rig_icosaedrico
from plugins.rede.checkpoint import save_checkpoint
from plugins.rede.siamesa import ModoCompartilhamento
from plugins.treino.config import ConfigTreino
from plugins.treino.treinador import train
from utils.arquivo_config import ler_chave_valor, mesclar
from utils.erros import ErroConfiguracao, ErroProtocolo
from utils.logging_config import get_logger

logger = get_logger(__name__)

KS_EXPERIMENTO = (1, 2, 5)
MIX_CONSULTAS = 0.5
NOME_RESULTADOS = "resultados.tsv"
NOME_RESULTADOS_SEMENTE = "resultados_por_semente.tsv"


class TipoExperimento(str, Enum):
    DATA_MIX = "data_mix"
    SHARE_MODE = "share_mode"
    OBJECT_COUNT = "object_count"


class ModoExperimento(str, Enum):
    INSTANCE = "instance"
    ZERO_SHOT = "zero_shot"


@dataclass
class EspecExperimento:
    """Chaves do arquivo de especificação, com os mesmos nomes."""

    kind: str = TipoExperimento.DATA_MIX.value
    seeds: Tuple[int, ...] = (0, 1, 2)
    mode: str = ModoExperimento.INSTANCE.value
    train_objects: int = 40
    test_objects: int = 10
    images_per_object: int = 20
    test_images_per_object: int = 5
    epochs: int = 15
    mix: float = 0.5
    mixes: Tuple[float, ...] = (0.0, 0.5, 1.0)
    counts: Tuple[int, ...] = (15, 30, 60, 120)
    share_mode: str = ModoCompartilhamento.SHARED.value
    input_size: int = 64
    view_count: int = 12
    include_instance_reference: bool = False

    def __post_init__(self):
        try:
            self.tipo = TipoExperimento(self.kind)
            self.modo = ModoExperimento(self.mode)
            ModoCompartilhamento(self.share_mode)
        except ValueError as e:
            raise ErroConfiguracao(f"especificação de experimento inválida: {e}") from e
        if not self.seeds:
            raise ErroConfiguracao("seeds não pode ser vazio")
        if self.test_objects < 1 or self.test_images_per_object < 2:
            raise ErroConfiguracao("test_objects >= 1 e test_images_per_object >= 2")
        if any(not 0.0 <= m <= 1.0 for m in (self.mix, *self.mixes)):
            raise ErroConfiguracao("mix/mixes devem estar em [0, 1]")
        contagens = self.counts if self.tipo == TipoExperimento.OBJECT_COUNT else (self.train_objects,)
        if not contagens or min(contagens) < 2:
            raise ErroConfiguracao("são necessários ao menos 2 objetos de treino por braço")
        if self.modo == ModoExperimento.INSTANCE and min(contagens) < self.test_objects:
            raise ErroConfiguracao("no modo instance os objetos de treino incluem os de teste")

    @classmethod
    def de_arquivo(cls, caminho: Union[str, Path], sobrescritas: Optional[Mapping[str, Any]] = None):
        padroes = {f.name: f.default for f in fields(cls)}
        valores = mesclar(padroes, ler_chave_valor(caminho), sobrescritas, origem=str(caminho))
        return cls(**valores)


@dataclass
class Braco:
    """Um braço: nome, objetos de treino e configuração (só o fator nomeado muda)."""

    nome: str
    mix: float
    modo_compartilhamento: str
    n_objetos: int
    modo: ModoExperimento


def bracos(spec: EspecExperimento) -> List[Braco]:
    if spec.tipo == TipoExperimento.DATA_MIX:
        return [Braco(f"mix_{m:g}", m, spec.share_mode, spec.train_objects, spec.modo) for m in spec.mixes]
    if spec.tipo == TipoExperimento.SHARE_MODE:
        return [
            Braco(str(modo), spec.mix, modo.value, spec.train_objects, spec.modo)
            for modo in (ModoCompartilhamento.SEPARATE, ModoCompartilhamento.SHARED)
        ]
    lista = [Braco(f"objetos_{c}", spec.mix, spec.share_mode, c, spec.modo) for c in spec.counts]
    if spec.include_instance_reference:
        maior = max(spec.counts)
        lista.append(Braco(f"instancia_{maior}", spec.mix, spec.share_mode, maior, ModoExperimento.INSTANCE))
    return lista


def _derivar_semente(semente: int, fluxo: int) -> int:
    return int(np.random.SeedSequence([semente, fluxo]).generate_state(1, dtype=np.uint32)[0])


def objetos_de_treino(braco: Braco, teste: Sequence[str], restantes: Sequence[str]) -> List[str]:
    """Instance: teste + primeiros restantes; zero-shot: só restantes (subconjuntos aninhados)."""
    if braco.modo == ModoExperimento.INSTANCE:
        return list(teste) + list(restantes[: braco.n_objetos - len(teste)])
    return list(restantes[: braco.n_objetos])


def verificar_zero_shot(manifesto: Manifesto, teste: Sequence[str]) -> None:
    """
    Raises:
        ErroProtocolo: algum objeto de teste no manifesto de treino
    """
    vazados = sorted(set(manifesto.object_ids) & set(teste))
    if vazados:
        raise ErroProtocolo(f"objetos de teste no treino zero-shot: {vazados}")


def _executar_braco(
    spec: EspecExperimento,
    braco: Braco,
    semente: int,
    corpus: Dict[str, Malha],
    teste: List[str],
    restantes: List[str],
    consultas: Manifesto,
    diretorio: Path,
    n_threads: int,
) -> Dict[str, Any]:
    ids_treino = objetos_de_treino(braco, teste, restantes)
    manifesto = generate_dataset(
        {object_id: corpus[object_id] for object_id in ids_treino},
        spec.images_per_object,
        braco.mix,
        _derivar_semente(semente, 1),
        diretorio / "dados",
        n_threads,
    )
    if braco.modo == ModoExperimento.ZERO_SHOT:
        verificar_zero_shot(Manifesto.carregar(diretorio / "dados"), teste)

    config = ConfigTreino(
        epocas=spec.epochs,
        semente=semente,
        semente_validacao=semente,
        tamanho_entrada=spec.input_size,
        n_vistas=spec.view_count,
        modo_compartilhamento=braco.modo_compartilhamento,
        threads=n_threads,
    )
    resultado = train(config, manifesto, diretorio / "stats.tsv", n_threads)
    save_checkpoint(resultado.params, resultado.estado, diretorio / "checkpoint.srck")

    indice = build_index(
        resultado.params,
        {object_id: corpus[object_id] for object_id in teste},
        rig_icosaedrico(spec.view_count),
        config.resolucao_render,
        n_threads,
    )
    resultados, verdade = consultar_manifesto(indice, resultado.params, consultas, n_threads)
    topk = tabela_topk(resultados, verdade, KS_EXPERIMENTO, indice.ids)
    logger.info(
        f"[experimento] {braco.nome} semente {semente}: "
        + " ".join(f"top{k} {v:.3f}" for k, v in topk.items())
    )
    return {
        "arm": braco.nome,
        "seed": semente,
        **{f"top{k}": v for k, v in topk.items()},
        "best_epoch": resultado.melhor_epoca,
        "train_objects": len(ids_treino),
    }


def run_experiment(spec: EspecExperimento, saida: Union[str, Path], n_threads: int = 1) -> pd.DataFrame:
    """
    Executa todos os braços para todas as sementes e grava as tabelas.

    Returns:
        DataFrame com a média de Top-1/2/5 por braço (ordem dos braços preservada)
    """
    saida = Path(saida)
    saida.mkdir(parents=True, exist_ok=True)
    lista_bracos = bracos(spec)
    maior = max(b.n_objetos for b in lista_bracos)
    n_corpus = maior + spec.test_objects
    logger.info(
        f"[experimento] {spec.tipo.value} ({spec.modo.value}): {len(lista_bracos)} braços × "
        f"{len(spec.seeds)} sementes, corpus de {n_corpus} formas"
    )

    linhas = []
    for semente in spec.seeds:
        base = saida / f"semente_{semente}"
        corpus = {malha.nome: malha for malha in gerar_corpus(n_corpus, semente)}
        restantes, teste = zero_shot_split(list(corpus), spec.test_objects, semente)
        consultas = generate_dataset(
            {object_id: corpus[object_id] for object_id in teste},
            spec.test_images_per_object,
            MIX_CONSULTAS,
            _derivar_semente(semente, 2),
            base / "consultas",
            n_threads,
        )
        for braco in lista_bracos:
            linhas.append(
                _executar_braco(spec, braco, semente, corpus, teste, restantes, consultas, base / braco.nome, n_threads)
            )

    por_semente = pd.DataFrame(linhas)
    colunas = [f"top{k}" for k in KS_EXPERIMENTO]
    medias = por_semente.groupby("arm", sort=False)[colunas].mean().reset_index()
    por_semente.to_csv(saida / NOME_RESULTADOS_SEMENTE, sep="\t", index=False, float_format="%.6f")
    medias.to_csv(saida / NOME_RESULTADOS, sep="\t", index=False, float_format="%.6f")
    logger.info(f"[experimento] tabelas gravadas em {saida}")
    return medias
