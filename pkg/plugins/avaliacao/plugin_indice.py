"""
Plugins de recuperação: construção do índice, consulta e avaliação Top-k.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from plugins.avaliacao.indice import build_index, carregar_indice, query, salvar_indice
from plugins.avaliacao.metricas import consultar_manifesto, detalhes_consultas, tabela_topk
from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin
from plugins.dados.manifesto import Manifesto
from plugins.dados.plugin_dados_sinteticos import carregar_diretorio_malhas
from plugins.geometria.malha import rig_icosaedrico
from plugins.rede.checkpoint import load_checkpoint
from plugins.renderizacao.imagem import carregar_png, redimensionar
from plugins.renderizacao.vistas import RESOLUCAO_VISTAS
from utils.erros import ErroVersaoIncompativel

KS_PADRAO = (1, 2, 5)


def carregar_par(checkpoint, indice):
    """
    Checkpoint e índice compatíveis.

    Raises:
        ErroVersaoIncompativel: dimensão do índice diferente do embedding
    """
    params, _ = load_checkpoint(checkpoint)
    descritores = carregar_indice(indice, params.hash)
    if len(descritores) and descritores.dimensao != params.dim_embedding:
        raise ErroVersaoIncompativel(
            f"{indice}: dimensão {descritores.dimensao}, checkpoint usa {params.dim_embedding}"
        )
    return params, descritores


class PluginIndice(Plugin):
    """
    Entrada: {"checkpoint": path, "meshes": dir, "saida": path}
    Saída (dados): {"indice": path, "n_objetos": int}
    """

    PLUGIN_NAME = "PluginIndice"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.AVALIACAO

    def _inicializar_interno(self) -> bool:
        config_render = self.config.get("render", {})
        self.resolucao = int(config_render.get("resolucao", RESOLUCAO_VISTAS))
        self.n_vistas_padrao = int(config_render.get("n_vistas", 12))
        self.raio = float(config_render.get("raio", 3.0))
        self.threads = int(self.config.get("sistema", {}).get("threads", 1))
        return True

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        params, _ = load_checkpoint(dados_entrada["checkpoint"])
        catalogo = carregar_diretorio_malhas(dados_entrada["meshes"])
        rig = rig_icosaedrico(params.n_vistas or self.n_vistas_padrao, self.raio)

        indice = build_index(params, catalogo, rig, self.resolucao, self.threads)
        caminho = salvar_indice(indice, dados_entrada["saida"])
        if self.logger:
            self.logger.info(f"[{self.PLUGIN_NAME}] {len(indice)} objetos indexados em {caminho}")
        return {
            "status": StatusExecucao.OK.value,
            "dados": {"indice": str(caminho), "n_objetos": len(indice)},
            "plugin": self.PLUGIN_NAME,
        }


class PluginConsulta(Plugin):
    """
    Consulta uma imagem ("acao": "query") ou avalia um manifesto ("acao": "eval").

    query -> Entrada: {"checkpoint", "indice", "imagem", "topk"}
             Saída (dados): {"ranking": [(object_id, score), ...]}
    eval  -> Entrada: {"checkpoint", "indice", "manifesto", "ks", "detalhes": path|None}
             Saída (dados): {"acuracias": {k: valor}, "n_consultas": int}
    """

    PLUGIN_NAME = "PluginConsulta"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.AVALIACAO

    def _inicializar_interno(self) -> bool:
        self.ks_padrao = tuple(self.config.get("avaliacao", {}).get("topk", KS_PADRAO))
        self.threads = int(self.config.get("sistema", {}).get("threads", 1))
        return True

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        params, indice = carregar_par(dados_entrada["checkpoint"], dados_entrada["indice"])
        if dados_entrada.get("acao", "query") == "eval":
            dados = self._avaliar(params, indice, dados_entrada)
        else:
            dados = self._consultar(params, indice, dados_entrada)
        return {"status": StatusExecucao.OK.value, "dados": dados, "plugin": self.PLUGIN_NAME}

    def _consultar(self, params, indice, dados_entrada: Dict[str, Any]) -> Dict[str, Any]:
        caminho = Path(dados_entrada["imagem"])
        tamanho = params.tamanho_entrada
        imagem = redimensionar(carregar_png(caminho, canais=3), tamanho, tamanho)
        resultado = query(indice, params, imagem, int(dados_entrada.get("topk", 5)), caminho.name)
        if self.logger:
            self.logger.debug(f"[{self.PLUGIN_NAME}] {caminho.name}: top1 {resultado.top1}")
        return {"ranking": list(resultado.ranking)}

    def _avaliar(self, params, indice, dados_entrada: Dict[str, Any]) -> Dict[str, Any]:
        ks: Sequence[int] = tuple(dados_entrada.get("ks") or self.ks_padrao)
        manifesto = Manifesto.carregar(dados_entrada["manifesto"])
        resultados, verdade = consultar_manifesto(indice, params, manifesto, self.threads)
        acuracias = tabela_topk(resultados, verdade, ks, indice.ids)

        detalhes = dados_entrada.get("detalhes")
        if detalhes:
            detalhes = Path(detalhes)
            detalhes.parent.mkdir(parents=True, exist_ok=True)
            linhas = detalhes_consultas(resultados, verdade)
            detalhes.write_text(
                "".join(f"{consulta}\t{alvo}\t{posicao}\t{top1}\n" for consulta, alvo, posicao, top1 in linhas),
                encoding="utf-8",
            )

        if self.logger:
            self.logger.info(
                f"[{self.PLUGIN_NAME}] {len(resultados)} consultas: "
                + " ".join(f"top{k} {v:.3f}" for k, v in acuracias.items())
            )
        return {"acuracias": acuracias, "n_consultas": len(resultados)}
