"""
Manifesto do dataset e geração de imagens coloridas sintéticas.

Formato do manifesto (UTF-8, uma entrada por linha):
    caminho/relativo.png<TAB>object_id<TAB>modo

Semente por imagem: SeedSequence([semente_raiz, índice_objeto, índice_imagem]).
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

import numpy as np

from plugins.dados.cena import ModoCena, randomize_scene, render_colour, RESOLUCAO_CENA
from plugins.geometria.malha import Malha, load_obj, save_obj
from plugins.renderizacao.imagem import salvar_png
from utils.erros import ErroArquivoCorrompido, ErroObjetoDesconhecido, ErroParametroInvalido
from utils.logging_config import get_logger
from utils.progress_helper import get_progress_helper

logger = get_logger(__name__)

NOME_MANIFESTO = "manifesto.tsv"
DIRETORIO_IMAGENS = "imagens"
DIRETORIO_MALHAS = "malhas"


@dataclass(frozen=True)
class EntradaManifesto:
    caminho: str
    object_id: str
    modo: ModoCena


@dataclass
class Manifesto:
    """Entradas (caminho relativo, object_id, modo) sob um diretório raiz."""

    raiz: Path
    entradas: List[EntradaManifesto] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entradas)

    @property
    def object_ids(self) -> List[str]:
        """Ids na ordem da primeira ocorrência."""
        return list(dict.fromkeys(e.object_id for e in self.entradas))

    def por_objeto(self) -> Dict[str, List[EntradaManifesto]]:
        grupos: Dict[str, List[EntradaManifesto]] = {}
        for entrada in self.entradas:
            grupos.setdefault(entrada.object_id, []).append(entrada)
        return grupos

    def caminho_absoluto(self, entrada: EntradaManifesto) -> Path:
        return self.raiz / entrada.caminho

    def caminho_malha(self, object_id: str) -> Path:
        return self.raiz / DIRETORIO_MALHAS / f"{object_id}.obj"

    def carregar_catalogo(self) -> Dict[str, Malha]:
        """Malhas de `<raiz>/malhas/<id>.obj` para todos os ids do manifesto."""
        catalogo = {}
        for object_id in self.object_ids:
            caminho = self.caminho_malha(object_id)
            if not caminho.exists():
                raise ErroObjetoDesconhecido(f"malha ausente para {object_id}: {caminho}")
            catalogo[object_id] = load_obj(caminho, nome=object_id)
        return catalogo

    def salvar(self, caminho: Union[str, Path, None] = None) -> Path:
        caminho = Path(caminho) if caminho else self.raiz / NOME_MANIFESTO
        caminho.parent.mkdir(parents=True, exist_ok=True)
        linhas = [f"{e.caminho}\t{e.object_id}\t{e.modo.value}\n" for e in self.entradas]
        caminho.write_text("".join(linhas), encoding="utf-8")
        return caminho

    @classmethod
    def carregar(cls, caminho: Union[str, Path]) -> "Manifesto":
        """
        Lê um manifesto; aceita o arquivo ou o diretório que o contém.

        Raises:
            ErroArquivoCorrompido: linha sem três campos ou modo inválido
        """
        caminho = Path(caminho)
        if caminho.is_dir():
            caminho = caminho / NOME_MANIFESTO
        entradas = []
        for numero, linha in enumerate(caminho.read_text(encoding="utf-8").splitlines(), start=1):
            if not linha.strip():
                continue
            campos = linha.split("\t")
            if len(campos) != 3:
                raise ErroArquivoCorrompido(f"{caminho}:{numero}: esperado 3 campos, recebido {len(campos)}")
            try:
                modo = ModoCena(campos[2])
            except ValueError as e:
                raise ErroArquivoCorrompido(f"{caminho}:{numero}: modo inválido '{campos[2]}'") from e
            entradas.append(EntradaManifesto(campos[0], campos[1], modo))
        return cls(caminho.parent, entradas)


def semente_imagem(semente_raiz: int, indice_objeto: int, indice_imagem: int) -> int:
    """Divisão documentada da semente raiz por (objeto, imagem)."""
    sequencia = np.random.SeedSequence([semente_raiz & 0xFFFFFFFFFFFFFFFF, indice_objeto, indice_imagem])
    return int(sequencia.generate_state(1, dtype=np.uint64)[0])


def quantidade_estruturadas(por_objeto: int, mix: float) -> int:
    """round(mix·n) com meio arredondado para cima."""
    return int(np.floor(mix * por_objeto + 0.5))


def generate_dataset(
    catalogo: Mapping[str, Malha],
    por_objeto: int,
    mix: float,
    semente: int,
    saida: Union[str, Path],
    n_threads: int = 1,
    resolucao: int = RESOLUCAO_CENA,
) -> Manifesto:
    """
    Gera `por_objeto` imagens coloridas por objeto, as primeiras
    round(mix·por_objeto) no modo estruturado, e grava o manifesto.

    Também grava as malhas em `<saida>/malhas/<id>.obj`.

    Raises:
        ErroParametroInvalido: catálogo vazio, por_objeto < 2 ou mix fora de [0, 1]
    """
    if not catalogo:
        raise ErroParametroInvalido("conjunto de objetos vazio")
    if por_objeto < 2:
        raise ErroParametroInvalido(f"por_objeto deve ser >= 2 (recebido {por_objeto})")
    if not 0.0 <= mix <= 1.0:
        raise ErroParametroInvalido(f"mix deve estar em [0, 1] (recebido {mix})")

    saida = Path(saida)
    saida.mkdir(parents=True, exist_ok=True)
    n_estruturadas = quantidade_estruturadas(por_objeto, mix)

    trabalhos: List[Tuple[str, ModoCena, int, str]] = []
    for indice_objeto, (object_id, malha) in enumerate(catalogo.items()):
        save_obj(malha, saida / DIRETORIO_MALHAS / f"{object_id}.obj")
        for j in range(por_objeto):
            modo = ModoCena.ESTRUTURADO if j < n_estruturadas else ModoCena.CAOTICO
            caminho = f"{DIRETORIO_IMAGENS}/{object_id}/{j:04d}.png"
            trabalhos.append((object_id, modo, semente_imagem(semente, indice_objeto, j), caminho))

    def renderizar(trabalho) -> EntradaManifesto:
        object_id, modo, semente_img, caminho = trabalho
        spec = randomize_scene(object_id, modo, semente_img, resolucao)
        salvar_png(render_colour(spec, catalogo), saida / caminho)
        logger.debug(f"[dados] {caminho} ({modo.value})")
        return EntradaManifesto(caminho, object_id, modo)

    entradas: List[EntradaManifesto] = [None] * len(trabalhos)
    progresso = get_progress_helper()
    with progresso.progress_bar(len(trabalhos), "Gerando imagens sintéticas"):
        if n_threads <= 1:
            for indice, trabalho in enumerate(trabalhos):
                entradas[indice] = renderizar(trabalho)
                progresso.update()
        else:
            with ThreadPoolExecutor(max_workers=n_threads) as executor:
                futuros = {executor.submit(renderizar, t): i for i, t in enumerate(trabalhos)}
                for futuro in as_completed(futuros):
                    entradas[futuros[futuro]] = futuro.result()
                    progresso.update()

    manifesto = Manifesto(saida, entradas)
    manifesto.salvar()
    logger.info(
        f"[dados] {len(entradas)} imagens para {len(catalogo)} objetos "
        f"({n_estruturadas} estruturadas/objeto) em {saida}"
    )
    return manifesto
