"""
Plugin de Treino - treina a rede siamesa a partir de um manifesto e grava
o melhor checkpoint e o log de estatísticas por época.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin
from plugins.dados.manifesto import Manifesto
from plugins.rede.checkpoint import save_checkpoint
from plugins.treino.config import ConfigTreino
from plugins.treino.treinador import train

SUFIXO_STATS = ".stats.tsv"


def caminho_stats(checkpoint) -> Path:
    """`modelo.srck` -> `modelo.stats.tsv`"""
    return Path(checkpoint).with_suffix(SUFIXO_STATS)


class PluginTreino(Plugin):
    """
    Entrada:
        {"config": path|None, "manifesto": path, "saida": ckpt,
         "sobrescritas": {chave de arquivo: valor}}
    Saída (dados):
        {"checkpoint", "stats", "melhor_epoca", "top1", "perda_final", "cancelado"}

    Ctrl+C (solicitar_cancelamento) encerra o treino ao fim da época corrente
    e ainda grava o melhor checkpoint obtido.
    """

    PLUGIN_NAME = "PluginTreino"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.TREINO

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        config = ConfigTreino.de_arquivo(dados_entrada.get("config"), dados_entrada.get("sobrescritas"))
        manifesto = Manifesto.carregar(dados_entrada["manifesto"])
        saida = Path(dados_entrada["saida"])
        stats = caminho_stats(saida)

        if self.logger:
            self.logger.debug(f"[{self.PLUGIN_NAME}] Configuração: {config.para_chaves()}")

        resultado = train(config, manifesto, stats, cancelado=self.cancelamento_solicitado)
        save_checkpoint(resultado.params, resultado.estado, saida)

        cancelado = len(resultado.estatisticas) < config.epocas
        if self.logger:
            self.logger.info(
                f"[{self.PLUGIN_NAME}] checkpoint da época {resultado.melhor_epoca} "
                f"(top1 {resultado.melhor.top1:.3f}) em {saida}"
            )
        return {
            "status": StatusExecucao.AVISO.value if cancelado else StatusExecucao.OK.value,
            "dados": {
                "checkpoint": str(saida),
                "stats": str(stats),
                "melhor_epoca": resultado.melhor_epoca,
                "top1": resultado.melhor.top1,
                "perda_final": resultado.estatisticas[-1].perda,
                "cancelado": cancelado,
            },
            "plugin": self.PLUGIN_NAME,
        }
