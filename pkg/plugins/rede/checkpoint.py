"""
Checkpoint binário little-endian.

    magic "SRCK" | versão u32 | modo u8 | hash da arquitetura u64
    registros até o fim do arquivo:
        tamanho do nome u16 | nome UTF-8 | rank u8 | dims u32×rank | dados f32×n

Registros `meta.*` guardam tamanho de entrada e número de vistas; registros
`adam.t`, `adam.m.<nome>` e `adam.v.<nome>` guardam o estado do otimizador.
"""

import struct
from pathlib import Path
from typing import BinaryIO, Dict, Iterator, Optional, Tuple, Union

import numpy as np

from plugins.autograd.otimizador import EstadoAdam
from plugins.autograd.tensor import parametro, precisao_padrao
from plugins.rede.siamesa import ModoCompartilhamento, ParametrosRede
from utils.erros import ErroArquivoCorrompido, ErroFormaIncompativel, ErroVersaoIncompativel

MAGIC_CHECKPOINT = b"SRCK"
VERSAO_CHECKPOINT = 1

_MODOS = {ModoCompartilhamento.SHARED: 0, ModoCompartilhamento.SEPARATE: 1}
_MODOS_INVERSO = {v: k for k, v in _MODOS.items()}

_PREFIXO_ADAM = "adam."
_PREFIXO_META = "meta."


# ============================================================
# REGISTROS
# ============================================================

def escrever_registro(arquivo: BinaryIO, nome: str, valores: np.ndarray) -> None:
    nome_bytes = nome.encode("utf-8")
    valores = np.asarray(valores)
    arquivo.write(struct.pack("<H", len(nome_bytes)))
    arquivo.write(nome_bytes)
    arquivo.write(struct.pack("<B", valores.ndim))
    if valores.ndim:
        arquivo.write(struct.pack(f"<{valores.ndim}I", *valores.shape))
    arquivo.write(np.ascontiguousarray(valores, dtype="<f4").tobytes())


class _Leitor:
    """Leitura sequencial que acusa truncamento."""

    def __init__(self, dados: bytes, caminho):
        self.dados = dados
        self.posicao = 0
        self.caminho = caminho

    @property
    def fim(self) -> bool:
        return self.posicao >= len(self.dados)

    def ler(self, n: int) -> bytes:
        if self.posicao + n > len(self.dados):
            raise ErroArquivoCorrompido(f"{self.caminho}: arquivo truncado no byte {self.posicao}")
        bloco = self.dados[self.posicao:self.posicao + n]
        self.posicao += n
        return bloco

    def unpack(self, formato: str) -> tuple:
        return struct.unpack(formato, self.ler(struct.calcsize(formato)))

    def registro(self) -> Tuple[str, np.ndarray]:
        (tamanho_nome,) = self.unpack("<H")
        try:
            nome = self.ler(tamanho_nome).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ErroArquivoCorrompido(f"{self.caminho}: nome inválido") from e
        (rank,) = self.unpack("<B")
        dims = self.unpack(f"<{rank}I") if rank else ()
        contagem = int(np.prod(dims)) if rank else 1
        valores = np.frombuffer(self.ler(4 * contagem), dtype="<f4").reshape(dims)
        return nome, valores

    def registros(self) -> Iterator[Tuple[str, np.ndarray]]:
        while not self.fim:
            yield self.registro()


# ============================================================
# CHECKPOINT
# ============================================================

def save_checkpoint(
    params: ParametrosRede,
    estado: Optional[EstadoAdam],
    caminho: Union[str, Path],
) -> Path:
    """Grava parâmetros (e estado Adam, se houver) em float32."""
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    with open(caminho, "wb") as arquivo:
        arquivo.write(MAGIC_CHECKPOINT)
        arquivo.write(struct.pack("<IBQ", VERSAO_CHECKPOINT, _MODOS[params.modo], params.hash))
        for nome, tensor in params.tensores.items():
            escrever_registro(arquivo, nome, tensor.dados)
        escrever_registro(arquivo, f"{_PREFIXO_META}tamanho_entrada", np.float32(params.tamanho_entrada))
        escrever_registro(arquivo, f"{_PREFIXO_META}n_vistas", np.float32(params.n_vistas or 0))
        if estado is not None:
            escrever_registro(arquivo, f"{_PREFIXO_ADAM}t", np.float32(estado.t))
            for nome in params.tensores:
                if nome in estado.m:
                    escrever_registro(arquivo, f"{_PREFIXO_ADAM}m.{nome}", estado.m[nome])
                    escrever_registro(arquivo, f"{_PREFIXO_ADAM}v.{nome}", estado.v[nome])
    return caminho


def load_checkpoint(
    caminho: Union[str, Path],
    hash_esperado: Optional[int] = None,
    dtype=None,
) -> Tuple[ParametrosRede, Optional[EstadoAdam]]:
    """
    Lê um checkpoint.

    Raises:
        ErroArquivoCorrompido: magic errado, truncado, parâmetros faltando/sobrando
        ErroVersaoIncompativel: versão de formato ou hash de arquitetura divergente
    """
    caminho = Path(caminho)
    try:
        conteudo = caminho.read_bytes()
    except OSError as e:
        raise ErroArquivoCorrompido(f"falha ao ler checkpoint {caminho}: {e}") from e
    leitor = _Leitor(conteudo, caminho)
    if leitor.ler(4) != MAGIC_CHECKPOINT:
        raise ErroArquivoCorrompido(f"{caminho}: não é um checkpoint (magic inválido)")
    versao, codigo_modo, hash_arquivo = leitor.unpack("<IBQ")
    if versao != VERSAO_CHECKPOINT:
        raise ErroVersaoIncompativel(f"{caminho}: versão {versao}, esperado {VERSAO_CHECKPOINT}")
    if codigo_modo not in _MODOS_INVERSO:
        raise ErroArquivoCorrompido(f"{caminho}: modo de compartilhamento inválido {codigo_modo}")

    dtype = dtype or precisao_padrao()
    tensores: Dict[str, np.ndarray] = {}
    meta: Dict[str, float] = {}
    adam: Dict[str, np.ndarray] = {}
    for nome, valores in leitor.registros():
        if nome.startswith(_PREFIXO_META):
            meta[nome[len(_PREFIXO_META):]] = float(valores.reshape(-1)[0])
        elif nome.startswith(_PREFIXO_ADAM):
            adam[nome[len(_PREFIXO_ADAM):]] = valores
        elif nome in tensores:
            raise ErroArquivoCorrompido(f"{caminho}: parâmetro repetido {nome}")
        else:
            tensores[nome] = valores

    n_vistas = int(meta.get("n_vistas", 0)) or None
    try:
        params = ParametrosRede(
            {nome: parametro(valores.copy(), dtype=dtype) for nome, valores in tensores.items()},
            _MODOS_INVERSO[codigo_modo],
            int(meta.get("tamanho_entrada", 64)),
            n_vistas,
        )
    except ErroFormaIncompativel as e:
        raise ErroArquivoCorrompido(f"{caminho}: {e}") from e

    if params.hash != hash_arquivo:
        raise ErroVersaoIncompativel(f"{caminho}: hash de arquitetura {hash_arquivo:#x} ≠ {params.hash:#x}")
    if hash_esperado is not None and hash_esperado != hash_arquivo:
        raise ErroVersaoIncompativel(f"{caminho}: hash {hash_arquivo:#x} ≠ esperado {hash_esperado:#x}")

    estado = None
    if "t" in adam:
        estado = EstadoAdam(t=int(adam.pop("t").reshape(-1)[0]))
        for chave, valores in adam.items():
            tipo, _, nome = chave.partition(".")
            if nome not in params.tensores or tipo not in ("m", "v"):
                raise ErroArquivoCorrompido(f"{caminho}: estado Adam desconhecido '{chave}'")
            getattr(estado, tipo)[nome] = valores.astype(dtype)
    return params, estado
