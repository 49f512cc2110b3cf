from plugins.treino.amostragem import ConjuntoTreino, LoteAncora, sample_anchor_batch
from plugins.treino.config import CHAVES_TREINO, ConfigTreino
from plugins.treino.treinador import (
    EstatisticasEpoca,
    ResultadoTreino,
    perda_do_lote,
    train,
    train_step,
    validar,
)

__all__ = [
    "ConjuntoTreino",
    "LoteAncora",
    "sample_anchor_batch",
    "CHAVES_TREINO",
    "ConfigTreino",
    "EstatisticasEpoca",
    "ResultadoTreino",
    "perda_do_lote",
    "train",
    "train_step",
    "validar",
]
