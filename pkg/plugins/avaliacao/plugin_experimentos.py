"""
Plugin de Experimentos - varreduras controladas (mistura de dados,
compartilhamento de parâmetros, número de objetos) com várias sementes.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from plugins.avaliacao.experimentos import NOME_RESULTADOS, NOME_RESULTADOS_SEMENTE, EspecExperimento, run_experiment
from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin


class PluginExperimentos(Plugin):
    """
    Entrada: {"spec": path, "saida": dir, "sobrescritas": {chave: valor}}
    Saída (dados): {"resultados", "resultados_por_semente", "tabela": DataFrame}
    """

    PLUGIN_NAME = "PluginExperimentos"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.AVALIACAO

    def _inicializar_interno(self) -> bool:
        self.threads = int(self.config.get("sistema", {}).get("threads", 1))
        return True

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        spec = EspecExperimento.de_arquivo(dados_entrada["spec"], dados_entrada.get("sobrescritas"))
        saida = Path(dados_entrada["saida"])

        if self.logger:
            self.logger.info(f"[{self.PLUGIN_NAME}] {spec.tipo.value} ({spec.modo.value}), sementes {list(spec.seeds)}")
        tabela = run_experiment(spec, saida, self.threads)

        return {
            "status": StatusExecucao.OK.value,
            "dados": {
                "resultados": str(saida / NOME_RESULTADOS),
                "resultados_por_semente": str(saida / NOME_RESULTADOS_SEMENTE),
                "tabela": tabela,
            },
            "plugin": self.PLUGIN_NAME,
        }
