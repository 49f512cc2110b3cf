"""
Gerenciador de Plugins.

Registra as etapas do pipeline (formas, vistas, dados, treino, índice,
experimentos), injeta log e configuração e executa uma etapa por comando
da CLI. Ao finalizar, registra a telemetria de cada etapa que rodou.
"""

import logging
import time
from datetime import datetime
from typing import Any, Dict, Optional

from plugins.base_plugin import Plugin
from plugins.gerenciadores.gerenciador import GerenciadorBase
from plugins.gerenciadores.gerenciador_log import CategoriaLog


class GerenciadorPlugins(GerenciadorBase):
    """
    Attributes:
        plugins (dict): {PLUGIN_NAME: instância}, em ordem de registro
        config (dict): Seções do ConfigManager entregues a cada plugin
    """

    GERENCIADOR_NAME: str = "GerenciadorPlugins"

    def __init__(self, gerenciador_log=None, config: Optional[Dict[str, Any]] = None):
        super().__init__()
        self.gerenciador_log = gerenciador_log
        self.config = config or {}
        self.plugins: Dict[str, Plugin] = {}
        self.logger: Optional[logging.Logger] = None

    def inicializar(self) -> bool:
        if self.gerenciador_log:
            self.logger = self.gerenciador_log.get_logger(self.GERENCIADOR_NAME, "system", logging.DEBUG)
        self._inicializado = True
        self._timestamp_inicio = datetime.now()
        return True

    def registrar_plugin(self, plugin: Plugin) -> bool:
        """
        Injeta log e configuração e inicializa o plugin.

        Returns:
            bool: False se não for Plugin, se o nome já existir ou se a
            inicialização falhar
        """
        if not isinstance(plugin, Plugin):
            if self.logger:
                self.logger.error(f"[{self.GERENCIADOR_NAME}] Objeto não é Plugin: {type(plugin)}")
            return False

        nome = plugin.PLUGIN_NAME
        if nome in self.plugins:
            if self.logger:
                self.logger.warning(f"[{self.GERENCIADOR_NAME}] Plugin '{nome}' já registrado")
            return False

        plugin.gerenciador_log = self.gerenciador_log
        plugin.config = self.config
        if not plugin.inicializar():
            if self.logger:
                self.logger.error(f"[{self.GERENCIADOR_NAME}] Falha ao inicializar plugin '{nome}'")
            return False

        self.plugins[nome] = plugin
        if self.logger:
            self.logger.debug(f"[{self.GERENCIADOR_NAME}] Plugin '{nome}' registrado")
        return True

    def obter_plugin(self, nome: str) -> Optional[Plugin]:
        return self.plugins.get(nome)

    def executar_plugin(self, nome: str, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Roda um plugin registrado e anota `tempo_execucao_ms` no resultado.

        Raises:
            KeyError: plugin não registrado
        """
        if nome not in self.plugins:
            raise KeyError(f"plugin não registrado: {nome}")
        plugin = self.plugins[nome]

        inicio = time.perf_counter()
        resultado = plugin.rodar(dados_entrada or {})
        resultado["tempo_execucao_ms"] = (time.perf_counter() - inicio) * 1000

        if self.logger:
            self.logger.debug(
                f"[{self.GERENCIADOR_NAME}] '{nome}' -> {resultado.get('status')} "
                f"({resultado['tempo_execucao_ms']:.2f} ms)"
            )
        return resultado

    def executar(self, nome: str, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        return self.executar_plugin(nome, dados_entrada)

    def telemetria(self) -> Dict[str, Dict[str, Any]]:
        """{PLUGIN_NAME: resumo} dos plugins que rodaram ao menos uma vez."""
        return {
            nome: plugin.obter_telemetria()
            for nome, plugin in self.plugins.items()
            if plugin.telemetria.total_execucoes
        }

    def cancelar_todos(self) -> None:
        """Pede cancelamento a todos os plugins (Ctrl+C na CLI)."""
        for plugin in self.plugins.values():
            plugin.solicitar_cancelamento()

    def finalizar(self) -> bool:
        """Finaliza os plugins na ordem reversa de registro.

        A telemetria vai para o arquivo de system em DEBUG (o console só a
        mostra com --verbose).
        """
        if self.gerenciador_log:
            for nome, resumo in self.telemetria().items():
                self.gerenciador_log.log_categoria(
                    categoria=CategoriaLog.PLUGIN,
                    nome_origem=self.GERENCIADOR_NAME,
                    mensagem="telemetria",
                    detalhes={
                        "execucoes": resumo["total_execucoes"],
                        "erros": resumo["execucoes_erro"],
                        "tempo_medio_s": f"{resumo['tempo_medio']:.3f}",
                        "taxa_sucesso": f"{resumo['taxa_sucesso']:.2f}",
                    },
                    nivel=logging.DEBUG,
                    plugin_nome=nome,
                )
        ok = True
        for nome in reversed(list(self.plugins)):
            if not self.plugins[nome].finalizar():
                ok = False
                if self.logger:
                    self.logger.error(f"[{self.GERENCIADOR_NAME}] Erro ao finalizar plugin '{nome}'")
        if self.logger:
            self.logger.debug(f"[{self.GERENCIADOR_NAME}] Plugins finalizados após {self.tempo_ativo:.1f}s")
        self._inicializado = False
        return ok
