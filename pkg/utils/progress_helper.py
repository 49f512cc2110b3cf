"""
Barras de progresso (rich) das etapas longas: geração de imagens sintéticas
e épocas de treino.

Tudo vai para stderr; stdout fica reservado para dados (resultados de
consulta, tabelas de avaliação).
"""

from contextlib import contextmanager
from typing import Iterator, Optional

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TaskID, TextColumn, TimeElapsedColumn, TimeRemainingColumn


class ProgressHelper:
    """Uma barra ativa por vez; update() sem barra ativa não faz nada."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.console = Console(stderr=True)
        self._progress: Optional[Progress] = None
        self._tarefa: Optional[TaskID] = None

    @contextmanager
    def progress_bar(self, total: int, description: str = "Processando") -> Iterator[Optional[TaskID]]:
        """
        Args:
            total: imagens, pares ou âncoras a processar
            description: rótulo da etapa (ex.: "Época 3/15")
        """
        if not self.enabled or total <= 0:
            yield None
            return

        colunas = (
            TextColumn("{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            TimeRemainingColumn(),
        )
        try:
            with Progress(*colunas, console=self.console, transient=True) as progress:
                self._progress = progress
                self._tarefa = progress.add_task(description, total=total)
                yield self._tarefa
        finally:
            self._progress = None
            self._tarefa = None

    def update(self, advance: int = 1) -> None:
        # TaskID 0 é válido
        if self._progress is not None and self._tarefa is not None:
            self._progress.update(self._tarefa, advance=advance)


_progress_helper = ProgressHelper()


def get_progress_helper() -> ProgressHelper:
    return _progress_helper


def disable_progress() -> None:
    """Desliga as barras (testes, --quiet)."""
    _progress_helper.enabled = False


def enable_progress() -> None:
    _progress_helper.enabled = True
