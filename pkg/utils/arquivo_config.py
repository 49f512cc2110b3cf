"""
Arquivos de configuração `chave=valor` (UTF-8).

Linhas em branco e comentários `#` são ignorados; o parser é o do
python-dotenv, o mesmo usado para o `.env`. Chaves desconhecidas e valores
que não convertem para o tipo do padrão levantam ErroConfiguracao.

Precedência: flag da CLI > arquivo > padrão.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import dotenv_values

from utils.erros import ErroConfiguracao

_VERDADEIROS = {"1", "true", "sim", "yes", "on"}
_FALSOS = {"0", "false", "nao", "não", "no", "off"}


def ler_chave_valor(caminho: Union[str, Path]) -> Dict[str, str]:
    """
    Lê o arquivo preservando a ordem das chaves.

    Raises:
        ErroConfiguracao: arquivo ausente ou linha sem valor
    """
    caminho = Path(caminho)
    if not caminho.is_file():
        raise ErroConfiguracao(f"arquivo de configuração não encontrado: {caminho}")
    try:
        valores = dotenv_values(caminho, encoding="utf-8")
    except UnicodeDecodeError:
        valores = dotenv_values(caminho, encoding="latin-1")
    sem_valor = [chave for chave, valor in valores.items() if valor is None]
    if sem_valor:
        raise ErroConfiguracao(f"{caminho}: chave sem valor: {sem_valor[0]}")
    return {chave.strip(): valor.strip() for chave, valor in valores.items()}


def coagir(chave: str, valor: Any, padrao: Any) -> Any:
    """Converte `valor` para o tipo de `padrao` (tuplas: elemento a elemento)."""
    if not isinstance(valor, str):
        return valor
    try:
        if isinstance(padrao, bool):
            texto = valor.lower()
            if texto in _VERDADEIROS:
                return True
            if texto in _FALSOS:
                return False
            raise ValueError(valor)
        if isinstance(padrao, Enum):
            return type(padrao)(valor)
        if isinstance(padrao, int):
            return int(valor)
        if isinstance(padrao, float):
            return float(valor)
        if isinstance(padrao, (tuple, list)):
            tipo = type(padrao[0]) if padrao else str
            return tuple(tipo(parte.strip()) for parte in valor.split(",") if parte.strip())
    except ValueError as e:
        raise ErroConfiguracao(f"valor inválido para '{chave}': {valor!r}") from e
    return valor


def mesclar(
    padroes: Mapping[str, Any],
    *camadas: Optional[Mapping[str, Any]],
    origem: str = "configuração",
) -> Dict[str, Any]:
    """
    Aplica as camadas sobre os padrões, da menos para a mais prioritária.

    Valores None em uma camada são ignorados (flag não informada).

    Raises:
        ErroConfiguracao: chave desconhecida ou valor inconvertível
    """
    resultado = dict(padroes)
    for camada in camadas:
        if not camada:
            continue
        for chave, valor in camada.items():
            if chave not in padroes:
                raise ErroConfiguracao(f"{origem}: chave desconhecida '{chave}'")
            if valor is None:
                continue
            resultado[chave] = coagir(chave, valor, padroes[chave])
    return resultado
