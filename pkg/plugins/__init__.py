"""
Plugins do ShapeRetrieval, um sub-pacote por etapa:
- geometria: malhas, OBJ, corpus de formas, rig de câmeras
- renderizacao: rasterizador e vistas em tons de cinza
- dados: cenas randomizadas, texturas, aumento, manifesto
- autograd: tensores com diferenciação reversa e Adam
- rede: rede siamesa e checkpoints
- treino: amostragem de pares e laço de treino
- avaliacao: índice, Top-k e experimentos
- gerenciadores: log e orquestração de plugins
"""

__version__ = "1.0.0"

from plugins.base_plugin import Plugin, StatusExecucao, TipoPlugin

__all__ = [
    "Plugin",
    "StatusExecucao",
    "TipoPlugin",
]
