from plugins.avaliacao.indice import (
    IndiceDescritores,
    ResultadoBusca,
    build_index,
    carregar_indice,
    query,
    ranquear,
    salvar_indice,
)
from plugins.avaliacao.metricas import (
    consultar_manifesto,
    detalhes_consultas,
    tabela_topk,
    topk_accuracy,
    zero_shot_split,
)

__all__ = [
    "IndiceDescritores",
    "ResultadoBusca",
    "build_index",
    "carregar_indice",
    "query",
    "ranquear",
    "salvar_indice",
    "consultar_manifesto",
    "detalhes_consultas",
    "tabela_topk",
    "topk_accuracy",
    "zero_shot_split",
]
