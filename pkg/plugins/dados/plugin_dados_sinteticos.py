"""
Plugin de Dados Sintéticos - imagens coloridas randomizadas e manifesto.

Lê todas as malhas `*.obj` de um diretório (ordem alfabética; o nome do
arquivo sem extensão é o object_id), normaliza e chama generate_dataset.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin
from plugins.dados.cena import RESOLUCAO_CENA
from plugins.dados.manifesto import NOME_MANIFESTO, generate_dataset
from plugins.geometria.malha import load_obj, normalize_mesh
from utils.erros import ErroParametroInvalido


def carregar_diretorio_malhas(diretorio) -> Dict[str, Any]:
    """
    {object_id: Malha normalizada} para cada `*.obj` do diretório.

    Raises:
        ErroParametroInvalido: diretório inexistente ou sem malhas
    """
    diretorio = Path(diretorio)
    if not diretorio.is_dir():
        raise ErroParametroInvalido(f"diretório de malhas não encontrado: {diretorio}")
    arquivos = sorted(diretorio.glob("*.obj"))
    if not arquivos:
        raise ErroParametroInvalido(f"nenhuma malha .obj em {diretorio}")
    return {arquivo.stem: normalize_mesh(load_obj(arquivo, arquivo.stem)) for arquivo in arquivos}


class PluginDadosSinteticos(Plugin):
    """
    Entrada: {"meshes": dir, "saida": dir, "por_objeto": N, "mix": F, "semente": S}
    Saída (dados): {"manifesto": path, "n_imagens": int, "n_objetos": int}
    """

    PLUGIN_NAME = "PluginDadosSinteticos"
    plugin_versao = "v1.0.0"
    plugin_tipo = TipoPlugin.DADOS

    def _inicializar_interno(self) -> bool:
        self.resolucao = int(self.config.get("dados", {}).get("tamanho_entrada", RESOLUCAO_CENA))
        self.threads = int(self.config.get("sistema", {}).get("threads", 1))
        return True

    def executar(self, dados_entrada: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        dados_entrada = dados_entrada or {}
        catalogo = carregar_diretorio_malhas(dados_entrada["meshes"])
        saida = Path(dados_entrada["saida"])

        manifesto = generate_dataset(
            catalogo,
            int(dados_entrada["por_objeto"]),
            float(dados_entrada.get("mix", 0.5)),
            int(dados_entrada.get("semente", 0)),
            saida,
            self.threads,
            self.resolucao,
        )
        if self.logger:
            self.logger.info(f"[{self.PLUGIN_NAME}] manifesto com {len(manifesto)} entradas em {saida}")
        return {
            "status": StatusExecucao.OK.value,
            "dados": {
                "manifesto": str(saida / NOME_MANIFESTO),
                "n_imagens": len(manifesto),
                "n_objetos": len(catalogo),
            },
            "plugin": self.PLUGIN_NAME,
        }
