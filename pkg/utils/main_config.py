# =============================================================
# CONFIGURAÇÃO CENTRALIZADA DO SHAPE_RETRIEVAL
# =============================================================
# Variáveis de ambiente são lidas APENAS aqui.
#
# VARIÁVEIS DO .ENV (todas opcionais):
#   SHAPE_RETRIEVAL_LOG_DIR=logs        # diretório base do GerenciadorLog
#   SHAPE_RETRIEVAL_LOG_LEVEL=INFO      # TRACE, DEBUG, INFO, WARNING, ERROR
#   SHAPE_RETRIEVAL_THREADS=1           # threads de renderização/embedding
#
# Parâmetros de experimento e de treino NÃO vêm do .env: vêm dos arquivos
# key=value passados na CLI (--config, --spec), com flags por cima.
# =============================================================

import os
from typing import Any, Dict

from dotenv import load_dotenv

from utils.logging_config import get_logger, nivel_de_texto

try:
    load_dotenv(encoding="utf-8")
except UnicodeDecodeError:
    load_dotenv(encoding="latin-1")

logger = get_logger(__name__)

_config_cache = None


def _inteiro_env(chave: str, padrao: int) -> int:
    valor = os.getenv(chave, "").strip()
    if not valor:
        return padrao
    try:
        return int(valor)
    except ValueError as e:
        raise ValueError(f"{chave} deve ser inteiro (recebido '{valor}')") from e


class ConfigManager:
    """
    Gerenciador de configuração singleton.

    Seções: sistema, render, dados, avaliacao.

    Ângulo de visão, sombreamento e recorte das vistas e das cenas são
    constantes de plugins.renderizacao.vistas e plugins.dados.cena.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._config = {}
        return cls._instance

    def carregar_config(self, force_reload: bool = False) -> Dict[str, Any]:
        """
        Monta o dicionário de configuração (com cache).

        Raises:
            ValueError: variável de ambiente ou valor padrão inválido
        """
        global _config_cache
        if _config_cache is not None and not force_reload:
            return _config_cache

        config: Dict[str, Any] = {}

        # ============================================================
        # SISTEMA
        # ============================================================
        config["sistema"] = {
            "log_dir": os.getenv("SHAPE_RETRIEVAL_LOG_DIR", "logs"),
            "log_nivel": nivel_de_texto(os.getenv("SHAPE_RETRIEVAL_LOG_LEVEL")),
            "threads": _inteiro_env("SHAPE_RETRIEVAL_THREADS", 1),
        }

        # ============================================================
        # RENDERIZAÇÃO DE VISTAS (tons de cinza, headlight)
        # ============================================================
        config["render"] = {
            "raio": 3.0,
            "resolucao": 128,
            "n_vistas": 12,
        }

        # ============================================================
        # DADOS SINTÉTICOS (cenas coloridas)
        # ============================================================
        config["dados"] = {
            "tamanho_entrada": 64,
        }

        config["avaliacao"] = {
            "topk": [1, 2, 5],
        }

        # ============================================================
        # VALIDAÇÕES FINAIS
        # ============================================================
        if config["sistema"]["threads"] < 1:
            raise ValueError("SHAPE_RETRIEVAL_THREADS deve ser >= 1.")
        if config["render"]["n_vistas"] not in (12, 20, 42):
            raise ValueError("O número de vistas deve ser 12, 20 ou 42.")
        if not config["avaliacao"]["topk"] or min(config["avaliacao"]["topk"]) < 1:
            raise ValueError("A lista de top-k deve ter valores >= 1.")

        _config_cache = config
        self._config = config
        logger.debug("[main_config] Configuração carregada")
        return config


config_manager = ConfigManager()

carregar_config = config_manager.carregar_config
