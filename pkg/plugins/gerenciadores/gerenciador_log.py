"""
Gerenciador de Logs do ShapeRetrieval.

Cada etapa do pipeline grava no seu próprio diretório:
- logs/system/     : CLI, inicialização, configuração
- logs/geometria/  : corpus de formas, leitura/escrita de OBJ
- logs/render/     : vistas e rasterização
- logs/dados/      : geração de imagens sintéticas e manifestos
- logs/treino/     : épocas, perdas, validação
- logs/avaliacao/  : índices, consultas, experimentos
- logs/erros/, logs/warnings/, logs/critical/

Cada arquivo leva o nome {tipo_log}_AAAA-MM-DD.log.
Rotação a cada 5MB (10 backups); compactação gzip após 30 dias.
O console vai para stderr: stdout fica livre para resultados.
"""

import gzip
import inspect
import logging
import shutil
import sys
from datetime import datetime
from enum import Enum
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

import pytz

from utils.log_helper import SmartFormatter
from utils.logging_config import conectar_arquivos, desconectar_arquivos

TIPOS_LOG = (
    "system",
    "geometria",
    "render",
    "dados",
    "treino",
    "avaliacao",
    "erros",
    "warnings",
    "critical",
)

# Só arquivo: o console já recebe a mensagem original ou o diagnóstico da CLI
TIPOS_SO_ARQUIVO = ("erros", "warnings", "critical")


class CategoriaLog(Enum):
    """Categorias por responsabilidade funcional (não por nível)."""
    CORE = "CORE"             # CLI, ciclo de vida, configuração
    PLUGIN = "PLUGIN"         # Execução de plugins
    GEOMETRIA = "GEOMETRIA"   # Malhas, corpus, rig de câmeras
    RENDER = "RENDER"         # Rasterização e vistas
    DADOS = "DADOS"           # Cenas, texturas, aumento, manifesto
    TREINO = "TREINO"         # Épocas, perdas, checkpoints
    AVALIACAO = "AVALIACAO"   # Índice, Top-k, experimentos
    UTIL = "UTIL"             # Utilitários


class GerenciadorLog:
    """
    Gerenciador centralizado de logs.

    Atributos:
        base_path (Path): Diretório base dos logs
        loggers (dict): Cache de loggers criados
        nivel_console (int): Nível mínimo do console (stderr)
        retencao_arquivo_dias (int): Dias antes de compactar arquivos diários
    """

    def __init__(
        self,
        base_path: str = "logs",
        nivel_console: int = logging.INFO,
        retencao_arquivo_dias: int = 30,
    ):
        self.base_path = Path(base_path)
        self.loggers: Dict[str, logging.Logger] = {}
        # tipo_log -> handler compartilhado pelos loggers de módulo
        self.handlers_modulo: Dict[str, RotatingFileHandler] = {}
        self.nivel_console = nivel_console
        self.timezone_sp = pytz.timezone('America/Sao_Paulo')

        self.formato_padrao = (
            "[%(asctime)s.%(msecs)03d BRT] [%(name)s] [%(levelname)s] [%(filename)s:%(lineno)d] %(message)s"
        )
        self.formato_console = "[%(asctime)s BRT] [%(name)s] [%(levelname)s] %(message)s"
        self.data_format = "%Y-%m-%d %H:%M:%S"
        self.retencao_arquivo_dias = retencao_arquivo_dias

        self._criar_estrutura_diretorios()
        self._compactar_logs_antigos()

    def _criar_estrutura_diretorios(self):
        for tipo_log in TIPOS_LOG:
            (self.base_path / tipo_log).mkdir(parents=True, exist_ok=True)

    def get_logger(
        self,
        nome: str,
        tipo_log: str = "system",
        nivel: int = logging.INFO,
    ) -> logging.Logger:
        """
        Obtém ou cria um logger com arquivo por tipo e console em stderr.

        Args:
            nome: Nome do logger (geralmente PLUGIN_NAME)
            tipo_log: Um de TIPOS_LOG (desconhecido vira "system")
            nivel: Nível do arquivo
        """
        if tipo_log not in TIPOS_LOG:
            tipo_log = "system"

        cache_key = f"{nome}_{tipo_log}"
        if cache_key in self.loggers:
            return self.loggers[cache_key]

        logger = logging.getLogger(cache_key)
        logger.setLevel(min(nivel, self.nivel_console))
        logger.handlers.clear()

        arquivo_log = self._obter_caminho_arquivo(tipo_log)
        logger.addHandler(self._criar_handler_arquivo(arquivo_log, nivel))

        if tipo_log not in TIPOS_SO_ARQUIVO:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(self.nivel_console)
            console_handler.setFormatter(
                SmartFormatter(self.formato_console, datefmt=self.data_format, timezone_sp=self.timezone_sp, stream=sys.stderr)
            )
            logger.addHandler(console_handler)
        logger.propagate = False

        self.loggers[cache_key] = logger
        logger.debug(f"[{nome}] Logger inicializado para tipo '{tipo_log}' -> {arquivo_log.name}")
        return logger

    def _criar_handler_arquivo(self, arquivo_log: Path, nivel: int) -> RotatingFileHandler:
        file_handler = RotatingFileHandler(
            str(arquivo_log),
            maxBytes=5 * 1024 * 1024,
            backupCount=10,
            encoding="utf-8",
        )
        file_handler.setLevel(nivel)
        file_handler.setFormatter(
            SmartFormatter(self.formato_padrao, datefmt=self.data_format, timezone_sp=self.timezone_sp, use_colors=False)
        )
        return file_handler

    def handler_modulo(self, tipo_log: str) -> RotatingFileHandler:
        """Handler de arquivo (sem filtro de nível) para os loggers de utils.logging_config."""
        if tipo_log not in TIPOS_LOG:
            tipo_log = "system"
        if tipo_log not in self.handlers_modulo:
            self.handlers_modulo[tipo_log] = self._criar_handler_arquivo(
                self._obter_caminho_arquivo(tipo_log), logging.NOTSET
            )
        return self.handlers_modulo[tipo_log]

    def conectar_modulos(self) -> None:
        """
        Faz rasterize, train, generate_dataset e as demais funções de módulo
        gravarem também em logs/{tipo}/, com o tipo escolhido pelo pacote.
        """
        conectar_arquivos(self.handler_modulo)

    def _obter_caminho_arquivo(self, tipo_log: str) -> Path:
        """logs/{tipo_log}/{tipo_log}_AAAA-MM-DD.log"""
        data_atual = datetime.now(self.timezone_sp).strftime("%Y-%m-%d")
        diretorio = self.base_path / tipo_log
        diretorio.mkdir(parents=True, exist_ok=True)
        return diretorio / f"{tipo_log}_{data_atual}.log"

    @staticmethod
    def _flush(logger: logging.Logger) -> None:
        for handler in logger.handlers:
            handler.flush()

    @staticmethod
    def _juntar_detalhes(mensagem: str, detalhes: Optional[Dict[str, Any]]) -> str:
        if not detalhes:
            return mensagem
        return f"{mensagem} | Detalhes: " + ", ".join(f"{k}: {v}" for k, v in detalhes.items())

    def log_evento(
        self,
        tipo_log: str,
        nome_origem: str,
        tipo_evento: str,
        mensagem: str,
        detalhes: Optional[Dict[str, Any]] = None,
        nivel: int = logging.INFO,
    ):
        """
        Registra um evento estruturado: "[tipo_evento] mensagem | Detalhes: k: v".

        Avisos também vão para logs/warnings.
        """
        logger = self.get_logger(nome_origem, tipo_log, nivel)
        texto = f"[{tipo_evento}] {self._juntar_detalhes(mensagem, detalhes)}"

        if nivel == logging.WARNING:
            logger_warning = self.get_logger(nome_origem, "warnings", logging.WARNING)
            logger_warning.warning(texto)
            self._flush(logger_warning)
        logger.log(nivel, texto)
        self._flush(logger)

    def log_categoria(
        self,
        categoria: CategoriaLog,
        nome_origem: str,
        mensagem: str,
        nivel: int = logging.INFO,
        tipo_log: str = "system",
        detalhes: Optional[Dict[str, Any]] = None,
        plugin_nome: Optional[str] = None,
    ):
        """
        Registra um log com categoria funcional; a categoria substitui o nível
        na linha formatada.
        """
        logger = self.get_logger(nome_origem, tipo_log, nivel)

        categoria_str = categoria.value
        if categoria == CategoriaLog.PLUGIN and plugin_nome:
            categoria_str = f"PLUGIN:{plugin_nome}"

        frame = inspect.currentframe().f_back
        record = logging.LogRecord(
            name=logger.name,
            level=nivel,
            pathname=frame.f_code.co_filename if frame else "",
            lineno=frame.f_lineno if frame else 0,
            msg=f"[{categoria_str}] {self._juntar_detalhes(mensagem, detalhes)}",
            args=(),
            exc_info=None,
        )
        record._categoria_log = categoria_str
        if logger.isEnabledFor(nivel):
            logger.handle(record)
        self._flush(logger)

    def log_erro_critico(
        self,
        plugin_name: str,
        mensagem: str,
        exc_info: bool = True,
        detalhes: Optional[Dict[str, Any]] = None,
    ):
        """Erro crítico em logs/critical com stack trace."""
        logger = self.get_logger("ERROS_SISTEMA", "critical", logging.CRITICAL)
        logger.critical(
            f"[{plugin_name}] [ERRO_CRITICO] {self._juntar_detalhes(mensagem, detalhes)}",
            exc_info=exc_info,
        )
        self._flush(logger)

    def log_erro(self, origem: str, mensagem: str, detalhes: Optional[Dict[str, Any]] = None, exc_info: bool = False):
        """Erro de execução em logs/erros (diagnóstico da CLI)."""
        logger = self.get_logger(f"{origem}_ERROR", "erros", logging.ERROR)
        logger.error(f"[{origem}] ERRO: {self._juntar_detalhes(mensagem, detalhes)}", exc_info=exc_info)
        self._flush(logger)

    def log_inicializacao(self, componente: str, sucesso: bool, detalhes: Optional[Dict[str, Any]] = None):
        self.log_evento(
            tipo_log="system",
            nome_origem=componente,
            tipo_evento="inicializacao",
            mensagem=f"Iniciando {componente}" if sucesso else f"Falha ao inicializar {componente}",
            detalhes=detalhes,
            nivel=logging.DEBUG if sucesso else logging.ERROR,
        )

    def _compactar_logs_antigos(self):
        """Compacta em .log.gz os arquivos diários mais antigos que retencao_arquivo_dias."""
        agora = datetime.now(self.timezone_sp)
        for tipo_log in TIPOS_LOG:
            diretorio = self.base_path / tipo_log
            if not diretorio.exists():
                continue
            for arquivo in diretorio.glob(f"{tipo_log}_*.log"):
                try:
                    data_str = arquivo.stem.split("_", 1)[1]
                    data_arquivo = self.timezone_sp.localize(datetime.strptime(data_str, "%Y-%m-%d"))
                except (IndexError, ValueError):
                    continue
                if (agora - data_arquivo).days <= self.retencao_arquivo_dias:
                    continue
                arquivo_gz = arquivo.with_suffix(".log.gz")
                with open(arquivo, "rb") as f_in, gzip.open(arquivo_gz, "wb") as f_out:
                    shutil.copyfileobj(f_in, f_out)
                arquivo.unlink()

    def finalizar(self) -> None:
        """Fecha os handlers (libera os arquivos)."""
        desconectar_arquivos()
        for handler in self.handlers_modulo.values():
            handler.close()
        self.handlers_modulo.clear()
        for logger in self.loggers.values():
            for handler in list(logger.handlers):
                handler.close()
                logger.removeHandler(handler)
        self.loggers.clear()
