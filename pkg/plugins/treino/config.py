"""Configuração de treino e tradução das chaves de arquivo/flag."""

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from plugins.geometria.malha import direcoes_rig
from plugins.rede.siamesa import ModoCompartilhamento
from utils.arquivo_config import ler_chave_valor, mesclar
from utils.erros import ErroConfiguracao, ErroParametroInvalido

# chave de arquivo -> campo
CHAVES_TREINO = {
    "margin": "margem",
    "learning_rate": "taxa_aprendizado",
    "weight_decay": "weight_decay",
    "pairs_per_anchor": "pares_por_ancora",
    "epochs": "epocas",
    "seed": "semente",
    "val_seed": "semente_validacao",
    "input_size": "tamanho_entrada",
    "view_count": "n_vistas",
    "share_mode": "modo_compartilhamento",
    "val_fraction": "fracao_validacao",
    "render_resolution": "resolucao_render",
    "precision": "precisao",
    "threads": "threads",
}


@dataclass
class ConfigTreino:
    margem: float = 1.0
    taxa_aprendizado: float = 5e-5
    weight_decay: float = 1e-5
    pares_por_ancora: int = 12
    epocas: int = 25
    semente: int = 0
    semente_validacao: int = 0
    tamanho_entrada: int = 64
    n_vistas: int = 12
    modo_compartilhamento: str = "shared"
    fracao_validacao: float = 0.1
    resolucao_render: int = 128
    precisao: str = "float32"
    threads: int = 1

    def __post_init__(self):
        self.validar()

    def validar(self) -> None:
        """
        Raises:
            ErroConfiguracao: valor fora da faixa
        """
        if self.pares_por_ancora < 2 or self.pares_por_ancora % 2:
            raise ErroConfiguracao(f"pairs_per_anchor deve ser par e >= 2 (recebido {self.pares_por_ancora})")
        if self.epocas < 1:
            raise ErroConfiguracao(f"epochs deve ser >= 1 (recebido {self.epocas})")
        if self.margem <= 0 or self.taxa_aprendizado <= 0 or self.weight_decay < 0:
            raise ErroConfiguracao("margin e learning_rate devem ser > 0; weight_decay >= 0")
        if self.tamanho_entrada < 8 or self.tamanho_entrada % 8:
            raise ErroConfiguracao(f"input_size deve ser múltiplo de 8 (recebido {self.tamanho_entrada})")
        try:
            direcoes_rig(self.n_vistas)
        except ErroParametroInvalido as e:
            raise ErroConfiguracao(f"view_count inválido: {e}") from e
        try:
            ModoCompartilhamento(self.modo_compartilhamento)
        except ValueError as e:
            raise ErroConfiguracao(f"share_mode inválido: {self.modo_compartilhamento}") from e
        if not 0.0 <= self.fracao_validacao < 1.0:
            raise ErroConfiguracao(f"val_fraction deve estar em [0, 1) (recebido {self.fracao_validacao})")
        if self.precisao not in ("float32", "float64"):
            raise ErroConfiguracao(f"precision deve ser float32 ou float64 (recebido {self.precisao})")
        if self.resolucao_render < 8 or self.threads < 1:
            raise ErroConfiguracao("render_resolution >= 8 e threads >= 1")

    @property
    def positivos_por_ancora(self) -> int:
        return self.pares_por_ancora // 2

    @property
    def modo(self) -> ModoCompartilhamento:
        return ModoCompartilhamento(self.modo_compartilhamento)

    @classmethod
    def de_chaves(cls, *camadas: Optional[Mapping[str, Any]], origem: str = "config de treino") -> "ConfigTreino":
        """Monta a partir de camadas com chaves de arquivo (`margin`, `epochs`, ...)."""
        padrao = cls()
        padroes = {chave: getattr(padrao, campo) for chave, campo in CHAVES_TREINO.items()}
        valores = mesclar(padroes, *camadas, origem=origem)
        return cls(**{CHAVES_TREINO[chave]: valor for chave, valor in valores.items()})

    @classmethod
    def de_arquivo(
        cls,
        caminho: Optional[Union[str, Path]] = None,
        sobrescritas: Optional[Mapping[str, Any]] = None,
    ) -> "ConfigTreino":
        arquivo = ler_chave_valor(caminho) if caminho else None
        return cls.de_chaves(arquivo, sobrescritas, origem=str(caminho or "config de treino"))

    def para_chaves(self) -> Dict[str, Any]:
        inverso = {campo: chave for chave, campo in CHAVES_TREINO.items()}
        return {inverso[f.name]: getattr(self, f.name) for f in fields(self)}
