"""
Plugin de Vistas - renderiza as vistas em tons de cinza de uma malha.

Arquivos: `<saida>/vista_00.png`, `vista_01.png`, ... na ordem fixa do rig.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin
from plugins.geometria.malha import load_obj, normalize_mesh, rig_icosaedrico
from plugins.renderizacao.imagem import salvar_png
from plugins.renderizacao.vistas import RESOLUCAO_VISTAS, render_views


class PluginVistas(Plugin):
    """
    Entrada: {"malha": path, "saida": dir, "n_vistas": 12|20|42, "resolucao": px}
    Saída (dados): {"vistas": [paths]}
    """

    PLUGIN_NAME = "PluginVistas"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.RENDERIZACAO

    def _inicializar_interno(self) -> bool:
        config_render = self.config.get("render", {})
        self.n_vistas_padrao = int(config_render.get("n_vistas", 12))
        self.resolucao_padrao = int(config_render.get("resolucao", RESOLUCAO_VISTAS))
        self.raio = float(config_render.get("raio", 3.0))
        self.threads = int(self.config.get("sistema", {}).get("threads", 1))
        return True

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        caminho_malha = Path(dados_entrada["malha"])
        saida = Path(dados_entrada["saida"])
        n_vistas = int(dados_entrada.get("n_vistas") or self.n_vistas_padrao)
        resolucao = int(dados_entrada.get("resolucao") or self.resolucao_padrao)

        malha = normalize_mesh(load_obj(caminho_malha))
        rig = rig_icosaedrico(n_vistas, self.raio)
        vistas = render_views(malha, rig, resolucao, n_threads=self.threads)

        saida.mkdir(parents=True, exist_ok=True)
        caminhos = [str(salvar_png(vista, saida / f"vista_{i:02d}.png")) for i, vista in enumerate(vistas)]

        if self.logger:
            self.logger.info(
                f"[{self.PLUGIN_NAME}] {malha.nome}: {len(caminhos)} vistas {resolucao}x{resolucao} em {saida}"
            )
        return {"status": StatusExecucao.OK.value, "dados": {"vistas": caminhos}, "plugin": self.PLUGIN_NAME}
