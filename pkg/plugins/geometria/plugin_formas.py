"""
Plugin de Formas - gera o corpus sintético de malhas normalizadas.

Grava `<saida>/<object_id>.obj` para cada forma e `<saida>/ids.txt` com um
identificador por linha, na ordem de geração.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin
from plugins.geometria.formas import gerar_corpus
from plugins.geometria.malha import save_obj

NOME_LISTA_IDS = "ids.txt"


class PluginFormas(Plugin):
    """
    Entrada: {"saida": dir, "quantidade": N, "semente": S}
    Saída (dados): {"meshes": dir, "object_ids": [...], "lista_ids": path}
    """

    PLUGIN_NAME = "PluginFormas"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.GEOMETRIA

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        if self.cancelamento_solicitado():
            return {"status": StatusExecucao.CANCELADO.value, "mensagem": "Cancelamento solicitado", "plugin": self.PLUGIN_NAME}

        saida = Path(dados_entrada["saida"])
        quantidade = int(dados_entrada["quantidade"])
        semente = int(dados_entrada.get("semente", 0))

        saida.mkdir(parents=True, exist_ok=True)
        malhas = gerar_corpus(quantidade, semente)
        for malha in malhas:
            save_obj(malha, saida / f"{malha.nome}.obj")
            if self.logger:
                self.logger.debug(
                    f"[{self.PLUGIN_NAME}] {malha.nome}: {malha.n_vertices} vértices, {malha.n_triangulos} triângulos"
                )

        ids = [malha.nome for malha in malhas]
        lista = saida / NOME_LISTA_IDS
        lista.write_text("".join(f"{i}\n" for i in ids), encoding="utf-8")

        if self.logger:
            self.logger.info(f"[{self.PLUGIN_NAME}] {len(ids)} formas (semente {semente}) em {saida}")
        return {
            "status": StatusExecucao.OK.value,
            "dados": {"meshes": str(saida), "object_ids": ids, "lista_ids": str(lista)},
            "plugin": self.PLUGIN_NAME,
        }
