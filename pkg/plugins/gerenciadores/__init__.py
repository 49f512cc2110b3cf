"""
Gerenciadores do sistema:
- GerenciadorLog: logs por etapa do pipeline
- GerenciadorPlugins: registro e execução das etapas
"""

from plugins.gerenciadores.gerenciador import GerenciadorBase
from plugins.gerenciadores.gerenciador_log import CategoriaLog, GerenciadorLog
from plugins.gerenciadores.gerenciador_plugins import GerenciadorPlugins

__all__ = [
    "CategoriaLog",
    "GerenciadorBase",
    "GerenciadorLog",
    "GerenciadorPlugins",
]
