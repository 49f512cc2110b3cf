"""
Configuração de logging para funções de módulo.

Os plugins recebem o logger do GerenciadorLog; as funções puras (rasterize,
train, generate_dataset...) usam get_logger(__name__), que escreve em stderr
e, depois de GerenciadorLog.conectar_modulos(), também no arquivo do tipo de
log correspondente ao pacote do módulo.
"""

import logging
import os
import sys
from typing import Callable, Dict, Optional, Union

from utils.log_helper import TRACE_LEVEL, SmartFormatter

_FORMATO = "[%(asctime)s] [%(name)s] [%(levelname)s] %(message)s"
_FORMATO_DATA = "%d-%m-%Y %H:%M:%S"

# Pacote -> tipo de log do GerenciadorLog (o resto vai para "system")
TIPO_LOG_POR_PACOTE = (
    ("plugins.geometria", "geometria"),
    ("plugins.renderizacao", "render"),
    ("plugins.dados", "dados"),
    ("plugins.autograd", "treino"),
    ("plugins.rede", "treino"),
    ("plugins.treino", "treino"),
    ("plugins.avaliacao", "avaliacao"),
)

# Loggers criados aqui, para ajuste global de nível (--verbose / --quiet)
_LOGGERS_CRIADOS = set()
_NIVEL_GLOBAL: Optional[int] = None

# tipo_log -> handler de arquivo; definido por conectar_arquivos()
_fabrica_arquivo: Optional[Callable[[str], logging.Handler]] = None
_HANDLERS_ANEXADOS: Dict[str, logging.Handler] = {}


def nivel_de_texto(nivel: Union[str, int, None], padrao: int = logging.INFO) -> int:
    """Converte 'DEBUG', 'info', 'TRACE' ou int em nível numérico."""
    if nivel is None or nivel == "":
        return padrao
    if isinstance(nivel, int):
        return nivel
    texto = str(nivel).strip().upper()
    if texto == "TRACE":
        return TRACE_LEVEL
    valor = logging.getLevelName(texto)
    return valor if isinstance(valor, int) else padrao


def tipo_log_do_modulo(nome: str) -> str:
    for prefixo, tipo_log in TIPO_LOG_POR_PACOTE:
        if nome == prefixo or nome.startswith(prefixo + "."):
            return tipo_log
    return "system"


def _anexar_arquivo(logger: logging.Logger) -> None:
    if _fabrica_arquivo is None or logger.name in _HANDLERS_ANEXADOS:
        return
    handler = _fabrica_arquivo(tipo_log_do_modulo(logger.name))
    logger.addHandler(handler)
    _HANDLERS_ANEXADOS[logger.name] = handler


def get_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """
    Logger de console (stderr) para uso fora do ciclo de vida dos plugins.

    Args:
        name: Nome do módulo/componente
        level: Nível de log; padrão vem de SHAPE_RETRIEVAL_LOG_LEVEL ou INFO
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    if level is None and _NIVEL_GLOBAL is not None:
        level = _NIVEL_GLOBAL
    elif level is None:
        level = nivel_de_texto(os.getenv("SHAPE_RETRIEVAL_LOG_LEVEL"))
    logger.setLevel(level)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.NOTSET)
    console_handler.setFormatter(SmartFormatter(_FORMATO, datefmt=_FORMATO_DATA, stream=sys.stderr))
    logger.addHandler(console_handler)
    logger.propagate = False

    _LOGGERS_CRIADOS.add(name)
    _anexar_arquivo(logger)
    return logger


def conectar_arquivos(fabrica: Callable[[str], logging.Handler]) -> None:
    """
    Anexa aos loggers de módulo, já criados ou futuros, o handler devolvido
    por `fabrica(tipo_log)`.
    """
    global _fabrica_arquivo
    desconectar_arquivos()
    _fabrica_arquivo = fabrica
    for nome in sorted(_LOGGERS_CRIADOS):
        _anexar_arquivo(logging.getLogger(nome))


def desconectar_arquivos() -> None:
    """Remove os handlers anexados (não os fecha: quem os criou fecha)."""
    global _fabrica_arquivo
    for nome, handler in _HANDLERS_ANEXADOS.items():
        logging.getLogger(nome).removeHandler(handler)
    _HANDLERS_ANEXADOS.clear()
    _fabrica_arquivo = None


def definir_nivel_global(level: int) -> None:
    """Aplica o nível a todos os loggers criados por get_logger."""
    global _NIVEL_GLOBAL
    _NIVEL_GLOBAL = level
    for nome in _LOGGERS_CRIADOS:
        logging.getLogger(nome).setLevel(level)
