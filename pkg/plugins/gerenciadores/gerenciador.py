"""
Classe base dos gerenciadores (log, plugins).

Ciclo de vida: inicializar -> executar -> finalizar, também via `with`.
"""

from abc import ABC, abstractmethod
from datetime import datetime
from typing import Optional


class GerenciadorBase(ABC):
    """
    Attributes:
        GERENCIADOR_NAME (str): Nome do gerenciador nos logs
        _inicializado (bool): inicializar() concluído com sucesso
        _timestamp_inicio (datetime): Momento da última inicialização
    """

    GERENCIADOR_NAME: str = "GerenciadorBase"

    def __init__(self):
        self._inicializado: bool = False
        self._timestamp_inicio: Optional[datetime] = None

    @abstractmethod
    def inicializar(self) -> bool:
        ...

    @abstractmethod
    def executar(self, *args, **kwargs):
        ...

    @abstractmethod
    def finalizar(self) -> bool:
        ...

    @property
    def esta_inicializado(self) -> bool:
        return self._inicializado

    @property
    def tempo_ativo(self) -> float:
        """Segundos desde a inicialização (0 se não inicializado)."""
        if self._timestamp_inicio is None:
            return 0.0
        return (datetime.now() - self._timestamp_inicio).total_seconds()

    def __enter__(self):
        if not self._inicializado and not self.inicializar():
            raise RuntimeError(f"[{self.GERENCIADOR_NAME}] Falha ao inicializar")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._inicializado:
            self.finalizar()
        return False
