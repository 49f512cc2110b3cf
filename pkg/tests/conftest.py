"""Fixtures compartilhadas pelos testes do ShapeRetrieval."""

import logging
from typing import List

import numpy as np
import pytest

from plugins.geometria.formas import generate_toy_shape, icosfera
from plugins.geometria.malha import normalize_mesh
from utils.log_helper import TRACE_LEVEL
from utils.logging_config import get_logger
from utils.progress_helper import disable_progress, enable_progress

MODULOS_COM_TRACE = (
    "plugins.autograd.operacoes",
    "plugins.renderizacao.rasterizador",
    "plugins.treino.treinador",
)


class ColetorRegistros(logging.Handler):
    def __init__(self):
        super().__init__(logging.NOTSET)
        self.registros: List[logging.LogRecord] = []

    def emit(self, record):
        self.registros.append(record)

    def mensagens(self, nivel: int) -> List[str]:
        return [r.getMessage() for r in self.registros if r.levelno == nivel]


@pytest.fixture(autouse=True)
def sem_barra_progresso():
    disable_progress()
    yield
    enable_progress()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cubo():
    """Cubo normalizado (lado 2, centrado na origem)."""
    return normalize_mesh(generate_toy_shape("box", [2.0, 2.0, 2.0], nome="cubo"))


@pytest.fixture
def esfera():
    return icosfera(2, nome="esfera")


@pytest.fixture
def diretorio_logs(tmp_path):
    caminho = tmp_path / "logs"
    caminho.mkdir()
    return caminho


@pytest.fixture
def arquivo_obj(tmp_path):
    """Escreve um OBJ a partir do texto e devolve o caminho."""

    def _escrever(texto: str, nome: str = "malha.obj"):
        caminho = tmp_path / nome
        caminho.write_text(texto, encoding="utf-8")
        return caminho

    return _escrever


@pytest.fixture
def coletor_trace():
    """Liga TRACE nos loggers dos kernels e coleta o que eles emitem."""
    coletor = ColetorRegistros()
    loggers = [get_logger(nome) for nome in MODULOS_COM_TRACE]
    niveis = [logger.level for logger in loggers]
    for logger in loggers:
        logger.setLevel(TRACE_LEVEL)
        logger.addHandler(coletor)
    yield coletor
    for logger, nivel in zip(loggers, niveis):
        logger.removeHandler(coletor)
        logger.setLevel(nivel)
