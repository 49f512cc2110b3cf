"""
Classe base para todos os plugins do sistema.

Cada etapa do pipeline (formas, vistas, dados sintéticos, treino, índice,
consulta, experimentos) é um Plugin com o mesmo ciclo de vida:

- rodar() envolve executar() com estado, logs e telemetria
- exceções viram um resultado de erro com a exceção original anexada
- cancelamento gracioso consultado pelas etapas longas
- context manager (__enter__ e __exit__) para uso fora do GerenciadorPlugins
"""

from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Protocol, runtime_checkable
import logging
import time


# ============================================================
# ENUM PARA STATUS DE EXECUÇÃO
# ============================================================

class StatusExecucao(Enum):
    """Status de execução de plugins (evita strings soltas)."""
    OK = "ok"
    ERRO = "erro"
    AVISO = "aviso"
    CANCELADO = "cancelado"

    def __str__(self):
        return self.value


# ============================================================
# PROTOCOL DO GERENCIADOR DE LOG
# ============================================================

@runtime_checkable
class GerenciadorLogProtocol(Protocol):
    """Interface mínima esperada do GerenciadorLog."""

    def get_logger(
        self,
        nome: str,
        tipo_log: str = "system",
        nivel: int = logging.INFO,
    ) -> logging.Logger:
        ...


# ============================================================
# TIPOS DE PLUGIN
# ============================================================

class TipoPlugin(Enum):
    """
    Etapa do pipeline a que o plugin pertence; define o tipo de log.

    - GEOMETRIA: corpus de formas e malhas
    - RENDERIZACAO: vistas em tons de cinza
    - DADOS: imagens coloridas sintéticas e manifesto
    - TREINO: rede siamesa
    - AVALIACAO: índice, consultas e experimentos
    - AUXILIAR: utilitários
    """
    GEOMETRIA = "geometria"
    RENDERIZACAO = "renderizacao"
    DADOS = "dados"
    TREINO = "treino"
    AVALIACAO = "avaliacao"
    AUXILIAR = "auxiliar"

    def __str__(self):
        return self.value


# Tipo de plugin -> tipo de log do GerenciadorLog
TIPO_LOG_POR_PLUGIN = {
    TipoPlugin.GEOMETRIA: "geometria",
    TipoPlugin.RENDERIZACAO: "render",
    TipoPlugin.DADOS: "dados",
    TipoPlugin.TREINO: "treino",
    TipoPlugin.AVALIACAO: "avaliacao",
    TipoPlugin.AUXILIAR: "system",
}


# ============================================================
# TELEMETRIA
# ============================================================

@dataclass
class TelemetriaPlugin:
    """Contadores e tempos (s) das chamadas a rodar()."""
    total_execucoes: int = 0
    execucoes_sucesso: int = 0
    execucoes_erro: int = 0
    falhas_consecutivas: int = 0
    tempo_total: float = 0.0
    tempo_maximo: float = 0.0
    ultimo_status: Optional[str] = None

    def registrar(self, status: StatusExecucao, duracao: float) -> None:
        self.total_execucoes += 1
        self.ultimo_status = status.value
        if status is StatusExecucao.ERRO:
            self.execucoes_erro += 1
            self.falhas_consecutivas += 1
        else:
            self.execucoes_sucesso += 1
            self.falhas_consecutivas = 0
        self.tempo_total += duracao
        self.tempo_maximo = max(self.tempo_maximo, duracao)

    def resumo(self) -> Dict[str, Any]:
        """Campos acumulados mais tempo_medio e taxa_sucesso (0.0 a 1.0)."""
        dados = asdict(self)
        n = self.total_execucoes
        dados["tempo_medio"] = self.tempo_total / n if n else 0.0
        dados["taxa_sucesso"] = self.execucoes_sucesso / n if n else 0.0
        return dados


# ============================================================
# CLASSE BASE PLUGIN
# ============================================================

class Plugin(ABC):
    """
    Classe base abstrata para as etapas do pipeline.

    Ciclo de vida:
    1. Inicialização: __init__ -> inicializar()
    2. Execução: rodar() -> executar()
    3. Finalização: finalizar()

    Attributes:
        PLUGIN_NAME (str): Nome único do plugin
        plugin_versao (str): Versão SemVer (vX.Y.Z)
        plugin_tipo (TipoPlugin): Etapa do pipeline
        ultimo_resultado (dict): Resultado da última chamada a rodar()
        logger: Logger do plugin (via GerenciadorLog)
    """

    PLUGIN_NAME: str = "PluginBase"
    plugin_versao: str = "v1.0.0"
    plugin_tipo: TipoPlugin = TipoPlugin.AUXILIAR

    def __init__(
        self,
        gerenciador_log: Optional[GerenciadorLogProtocol] = None,
        config: Optional[Dict[str, Any]] = None,
    ):
        """
        Args:
            gerenciador_log: Instância do GerenciadorLog (injetada pelo GerenciadorPlugins)
            config: Configuração do plugin (seções do ConfigManager)
        """
        self.PLUGIN_NAME = self.__class__.__name__
        self.gerenciador_log: Optional[GerenciadorLogProtocol] = gerenciador_log
        self.config: Dict[str, Any] = config or {}
        self.ultimo_resultado: Dict[str, Any] = {}

        self._inicializado: bool = False
        self._em_execucao: bool = False
        self._cancelamento_solicitado: bool = False

        self.logger: Optional[logging.Logger] = None
        self.telemetria = TelemetriaPlugin()

    def inicializar(self) -> bool:
        """
        Obtém o logger da etapa e chama _inicializar_interno().

        Returns:
            bool: True se inicializado com sucesso
        """
        try:
            if self.gerenciador_log:
                tipo_log = TIPO_LOG_POR_PLUGIN.get(self.plugin_tipo, "system")
                self.logger = self.gerenciador_log.get_logger(self.PLUGIN_NAME, tipo_log)

            self._cancelamento_solicitado = False
            resultado = self._inicializar_interno()

            if resultado:
                self._inicializado = True
                if self.logger:
                    self.logger.debug(
                        f"[{self.PLUGIN_NAME}] Plugin inicializado (versão: {self.plugin_versao})"
                    )

            return resultado
        except Exception as e:
            if self.logger:
                self.logger.critical(
                    f"[{self.PLUGIN_NAME}] Erro ao inicializar plugin: {e}",
                    exc_info=True,
                )
            return False

    def _inicializar_interno(self) -> bool:
        """Sobrescreva para validar configuração e preparar estruturas."""
        return True

    @abstractmethod
    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Executa a etapa do pipeline.

        Args:
            dados_entrada: Parâmetros da etapa (caminhos, sementes, contagens)

        Returns:
            dict: {"status": "ok" | "aviso" | "cancelado", "dados": {...}, "plugin": PLUGIN_NAME}
        """

    def _resultado_erro(self, mensagem: str, excecao: Optional[BaseException] = None) -> Dict[str, Any]:
        resultado = {"status": StatusExecucao.ERRO.value, "mensagem": mensagem, "plugin": self.PLUGIN_NAME}
        if excecao is not None:
            resultado["tipo_erro"] = type(excecao).__name__
            resultado["excecao"] = excecao
        return resultado

    def rodar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Executa a etapa registrando status e duração.

        Nunca propaga exceções: elas voltam como {"status": "erro",
        "mensagem", "tipo_erro", "excecao"} e a CLI relança "excecao" para
        escolher o código de saída.
        """
        if not self._inicializado:
            return self._resultado_erro("Plugin não inicializado")
        if self._em_execucao:
            if self.logger:
                self.logger.warning(f"[{self.PLUGIN_NAME}] rodar() reentrante ignorado")
            return self._resultado_erro("Execução já em andamento")

        self._em_execucao = True
        inicio = time.perf_counter()
        if self.logger:
            self.logger.info(f"[{self.PLUGIN_NAME}] início")

        try:
            resultado = self.executar(dados_entrada)
            try:
                status = StatusExecucao(resultado.get("status", "ok"))
            except ValueError:
                status = StatusExecucao.ERRO
        except Exception as e:
            resultado, status = self._resultado_erro(str(e), e), StatusExecucao.ERRO
        finally:
            self._em_execucao = False

        duracao = time.perf_counter() - inicio
        self.telemetria.registrar(status, duracao)
        self.ultimo_resultado = resultado
        if self.logger:
            if "excecao" in resultado:
                self.logger.error(f"[{self.PLUGIN_NAME}] {resultado['tipo_erro']}: {resultado['mensagem']} ({duracao:.2f}s)")
            else:
                self.logger.info(f"[{self.PLUGIN_NAME}] fim: {status} em {duracao:.2f}s")
        return resultado

    def obter_telemetria(self) -> Dict[str, Any]:
        return self.telemetria.resumo()

    def solicitar_cancelamento(self):
        """As etapas longas consultam a flag entre épocas, imagens ou braços."""
        self._cancelamento_solicitado = True

    def cancelamento_solicitado(self) -> bool:
        return self._cancelamento_solicitado

    def finalizar(self) -> bool:
        """Cancela o que estiver em andamento e chama _finalizar_interno()."""
        self.solicitar_cancelamento()
        try:
            ok = self._finalizar_interno()
        except Exception as e:
            if self.logger:
                self.logger.error(f"[{self.PLUGIN_NAME}] falha ao finalizar: {e}", exc_info=True)
            return False
        if ok:
            self._inicializado = False
        return ok

    def _finalizar_interno(self) -> bool:
        return True

    @property
    def esta_inicializado(self) -> bool:
        return self._inicializado

    @property
    def esta_em_execucao(self) -> bool:
        return self._em_execucao

    # ============================================================
    # CONTEXT MANAGER
    # ============================================================

    def __enter__(self):
        # with PluginVistas(gerenciador_log) as plugin: plugin.rodar({...})
        if not self._inicializado and not self.inicializar():
            raise RuntimeError(f"{self.PLUGIN_NAME}: inicialização falhou")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._inicializado:
            self.finalizar()
        return False

    def __repr__(self) -> str:
        return f"<{self.PLUGIN_NAME} {self.plugin_versao} inicializado={self._inicializado}>"
