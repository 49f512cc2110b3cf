"""
Ponto de entrada do ShapeRetrieval.

Recuperação de formas 3D a partir de imagens coloridas: cada comando da CLI
é um invólucro fino sobre um plugin do pipeline.

    gen-shapes -> render-views / gen-data -> train -> build-index -> query / eval
    experiment (varreduras controladas de ponta a ponta)

Dados vão para stdout ou arquivos; logs e progresso vão para stderr.
Códigos de saída: 0 sucesso, 2 erro de uso/configuração, 1 erro de execução.
"""

import os
import sys

# ================================
# 1. THREADS DE BLAS (antes de importar numpy)
# ================================
_VARIAVEIS_BLAS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _fixar_threads_blas(argv) -> None:
    """`--threads 1` fixa BLAS em uma thread (reprodutibilidade bit a bit)."""
    for i, arg in enumerate(argv):
        valor = arg.split("=", 1)[1] if arg.startswith("--threads=") else (
            argv[i + 1] if arg == "--threads" and i + 1 < len(argv) else None
        )
        if valor == "1":
            for variavel in _VARIAVEIS_BLAS:
                os.environ[variavel] = "1"


if __name__ == "__main__":
    _fixar_threads_blas(sys.argv[1:])

import argparse
import copy
import logging
import signal
from typing import Any, Dict, List, Optional, Sequence

from plugins.avaliacao.plugin_experimentos import PluginExperimentos
from plugins.avaliacao.plugin_indice import PluginConsulta, PluginIndice
from plugins.dados.plugin_dados_sinteticos import PluginDadosSinteticos
from plugins.geometria.plugin_formas import PluginFormas
from plugins.gerenciadores.gerenciador_log import CategoriaLog, GerenciadorLog
from plugins.gerenciadores.gerenciador_plugins import GerenciadorPlugins
from plugins.renderizacao.plugin_vistas import PluginVistas
from plugins.treino.plugin_treino import PluginTreino
from utils.erros import ErroConfiguracao, ErroShapeRetrieval
from utils.logging_config import definir_nivel_global
from utils.main_config import carregar_config
from utils.progress_helper import disable_progress

NOME_SISTEMA = "ShapeRetrieval"

EXIT_OK = 0
EXIT_ERRO = 1
EXIT_USO = 2


class ErroUso(Exception):
    """Flags inválidas: argparse sai com 2, aqui só transportamos a mensagem."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ErroUso(f"{self.prog}: {message}")


def lista_inteiros(texto: str) -> List[int]:
    """'1,2,5' -> [1, 2, 5]"""
    try:
        valores = [int(parte) for parte in texto.split(",") if parte.strip()]
    except ValueError as e:
        raise ErroConfiguracao(f"lista de inteiros inválida: '{texto}'") from e
    if not valores or min(valores) < 1:
        raise ErroConfiguracao(f"valores de top-k devem ser >= 1: '{texto}'")
    return valores


# ============================================================
# PARSER
# ============================================================

def construir_parser() -> argparse.ArgumentParser:
    comuns = _Parser(add_help=False)
    comuns.add_argument("--threads", type=int, default=None, help="threads de trabalho (1 = reprodutível)")
    comuns.add_argument("--log-dir", default=None, help="diretório base dos logs")
    verbosidade = comuns.add_mutually_exclusive_group()
    verbosidade.add_argument("--verbose", "-v", action="store_true", help="console em DEBUG")
    verbosidade.add_argument("--quiet", "-q", action="store_true", help="console só com avisos, sem barras")

    parser = _Parser(prog="shape-retrieval", description="Recuperação de formas 3D por imagens.")
    sub = parser.add_subparsers(dest="comando", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-shapes", parents=[comuns], help="gera o corpus de formas (OBJ)")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("render-views", parents=[comuns], help="renderiza as vistas de uma malha (PNG)")
    p.add_argument("--mesh", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--views", type=int, choices=(12, 20, 42), default=None)
    p.add_argument("--res", type=int, default=None)

    p = sub.add_parser("gen-data", parents=[comuns], help="gera imagens sintéticas e o manifesto")
    p.add_argument("--meshes", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-object", type=int, required=True)
    p.add_argument("--mix", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", parents=[comuns], help="treina a rede siamesa")
    p.add_argument("--config", default=None, help="arquivo key=value")
    p.add_argument("--data", required=True, help="manifesto (arquivo ou diretório)")
    p.add_argument("--val", type=int, default=None, help="semente da divisão de validação")
    p.add_argument("--out", required=True, help="checkpoint de saída")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--share-mode", choices=("shared", "separate"), default=None)
    p.add_argument("--precision", choices=("float32", "float64"), default=None)

    p = sub.add_parser("build-index", parents=[comuns], help="indexa um diretório de malhas")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--meshes", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("query", parents=[comuns], help="ranqueia o índice para uma imagem")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--topk", type=int, default=5)

    p = sub.add_parser("eval", parents=[comuns], help="Top-k de um manifesto de consultas")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--topk", default="1,2,5")
    p.add_argument("--details", default=None, help="relatório por consulta (TSV)")

    p = sub.add_parser("experiment", parents=[comuns], help="executa uma varredura controlada")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)

    return parser


# ============================================================
# ORQUESTRADOR
# ============================================================

class ShapeRetrieval:
    """
    Orquestra configuração, gerenciadores e plugins para um comando da CLI.

    Ordem: configuração -> GerenciadorLog -> GerenciadorPlugins (registra
    todos os plugins) -> comando -> finalizar.
    """

    PLUGINS = (
        PluginFormas,
        PluginVistas,
        PluginDadosSinteticos,
        PluginTreino,
        PluginIndice,
        PluginConsulta,
        PluginExperimentos,
    )

    def __init__(self, saida=None):
        self.saida = saida or sys.stdout
        self.config: Optional[Dict[str, Any]] = None
        self.gerenciador_log: Optional[GerenciadorLog] = None
        self.gerenciador_plugins: Optional[GerenciadorPlugins] = None
        self.logger: Optional[logging.Logger] = None

    def inicializar(self, threads: Optional[int] = None, log_dir: Optional[str] = None, nivel_console: Optional[int] = None) -> bool:
        self.config = copy.deepcopy(carregar_config())
        sistema = self.config["sistema"]
        if threads is not None:
            if threads < 1:
                raise ErroConfiguracao(f"--threads deve ser >= 1 (recebido {threads})")
            sistema["threads"] = threads
        nivel = nivel_console if nivel_console is not None else sistema["log_nivel"]
        definir_nivel_global(nivel)

        self.gerenciador_log = GerenciadorLog(base_path=log_dir or sistema["log_dir"], nivel_console=nivel)
        self.gerenciador_log.conectar_modulos()
        self.logger = self.gerenciador_log.get_logger(NOME_SISTEMA, "system")

        self.gerenciador_plugins = GerenciadorPlugins(gerenciador_log=self.gerenciador_log, config=self.config)
        self.gerenciador_plugins.inicializar()
        for classe in self.PLUGINS:
            if not self.gerenciador_plugins.registrar_plugin(classe()):
                self.gerenciador_log.log_inicializacao(classe.__name__, False)
                return False

        self.gerenciador_log.log_categoria(
            CategoriaLog.CORE,
            NOME_SISTEMA,
            f"{len(self.gerenciador_plugins.plugins)} plugins registrados",
            nivel=logging.DEBUG,
            detalhes={"threads": sistema["threads"]},
        )
        return True

    def _rodar(self, plugin: str, dados: Dict[str, Any]) -> Dict[str, Any]:
        """Roda o plugin e relança a exceção original em caso de erro."""
        resultado = self.gerenciador_plugins.executar_plugin(plugin, dados)
        if resultado.get("status") == "erro":
            excecao = resultado.get("excecao")
            if isinstance(excecao, BaseException):
                raise excecao
            raise RuntimeError(resultado.get("mensagem", f"{plugin} falhou"))
        if resultado.get("status") == "aviso" and self.logger:
            self.logger.warning(f"[{NOME_SISTEMA}] {plugin} terminou com aviso")
        return resultado.get("dados", {})

    def _escrever(self, linha: str) -> None:
        self.saida.write(linha + "\n")

    # ============================================================
    # COMANDOS
    # ============================================================

    def cmd_gen_shapes(self, args) -> int:
        self._rodar("PluginFormas", {"saida": args.out, "quantidade": args.count, "semente": args.seed})
        return EXIT_OK

    def cmd_render_views(self, args) -> int:
        self._rodar(
            "PluginVistas",
            {"malha": args.mesh, "saida": args.out, "n_vistas": args.views, "resolucao": args.res},
        )
        return EXIT_OK

    def cmd_gen_data(self, args) -> int:
        self._rodar(
            "PluginDadosSinteticos",
            {"meshes": args.meshes, "saida": args.out, "por_objeto": args.per_object, "mix": args.mix, "semente": args.seed},
        )
        return EXIT_OK

    def cmd_train(self, args) -> int:
        sobrescritas = {
            "val_seed": args.val,
            "epochs": args.epochs,
            "seed": args.seed,
            "share_mode": args.share_mode,
            "precision": args.precision,
            "threads": args.threads,
        }
        self._rodar(
            "PluginTreino",
            {"config": args.config, "manifesto": args.data, "saida": args.out, "sobrescritas": sobrescritas},
        )
        return EXIT_OK

    def cmd_build_index(self, args) -> int:
        self._rodar("PluginIndice", {"checkpoint": args.ckpt, "meshes": args.meshes, "saida": args.out})
        return EXIT_OK

    def cmd_query(self, args) -> int:
        dados = self._rodar(
            "PluginConsulta",
            {"acao": "query", "checkpoint": args.ckpt, "indice": args.index, "imagem": args.image, "topk": args.topk},
        )
        for posicao, (object_id, score) in enumerate(dados["ranking"], start=1):
            self._escrever(f"{posicao}\t{object_id}\t{score:.6f}")
        return EXIT_OK

    def cmd_eval(self, args) -> int:
        dados = self._rodar(
            "PluginConsulta",
            {
                "acao": "eval",
                "checkpoint": args.ckpt,
                "indice": args.index,
                "manifesto": args.manifest,
                "ks": lista_inteiros(args.topk),
                "detalhes": args.details,
            },
        )
        self._escrever("k\taccuracy")
        for k, valor in dados["acuracias"].items():
            self._escrever(f"{k}\t{valor:.6f}")
        return EXIT_OK

    def cmd_experiment(self, args) -> int:
        dados = self._rodar("PluginExperimentos", {"spec": args.spec, "saida": args.out})
        self.saida.write(dados["tabela"].to_csv(sep="\t", index=False, float_format="%.6f"))
        return EXIT_OK

    def executar_comando(self, args) -> int:
        metodo = getattr(self, "cmd_" + args.comando.replace("-", "_"))
        return metodo(args)

    def finalizar(self) -> None:
        if self.gerenciador_plugins:
            self.gerenciador_plugins.finalizar()
        if self.gerenciador_log:
            self.gerenciador_log.finalizar()


# ============================================================
# MAIN
# ============================================================

def main(argv: Optional[Sequence[str]] = None, saida=None) -> int:
    """Executa um comando; devolve o código de saída."""
    argv = list(sys.argv[1:] if argv is None else argv)

    sistema = ShapeRetrieval(saida)
    try:
        try:
            args = construir_parser().parse_args(argv)
        except SystemExit as e:
            # --help
            return EXIT_OK if not e.code else EXIT_USO

        nivel = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else None
        if args.quiet:
            disable_progress()

        if not sistema.inicializar(args.threads, args.log_dir, nivel):
            sys.stderr.write(f"erro: falha ao inicializar {NOME_SISTEMA}\n")
            return EXIT_ERRO

        def cancelar(sig, frame):
            # Segundo Ctrl+C interrompe de vez
            signal.signal(signal.SIGINT, signal.default_int_handler)
            sys.stderr.write("\ninterrompendo após a etapa corrente...\n")
            sistema.gerenciador_plugins.cancelar_todos()

        anterior = signal.signal(signal.SIGINT, cancelar)
        try:
            return sistema.executar_comando(args)
        finally:
            signal.signal(signal.SIGINT, anterior)

    except (ErroUso, ErroConfiguracao) as e:
        sys.stderr.write(f"erro: {e}\n")
        return EXIT_USO
    except KeyboardInterrupt:
        sys.stderr.write("erro: interrompido\n")
        return EXIT_ERRO
    except Exception as e:
        if sistema.gerenciador_log:
            sistema.gerenciador_log.log_erro(NOME_SISTEMA, f"{type(e).__name__}: {e}", exc_info=True)
            if not isinstance(e, ErroShapeRetrieval):
                sistema.gerenciador_log.log_erro_critico(NOME_SISTEMA, f"falha inesperada: {type(e).__name__}: {e}")
        sys.stderr.write(f"erro: {type(e).__name__}: {e}\n")
        return EXIT_ERRO
    finally:
        sistema.finalizar()


if __name__ == "__main__":
    sys.exit(main())
