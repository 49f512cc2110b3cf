from plugins.dados.aumento import ParametrosAumento, amostrar_parametros_aumento, aplicar_aumento, augment
from plugins.dados.cena import EspecCena, ModoCena, randomize_scene, render_colour
from plugins.dados.manifesto import EntradaManifesto, Manifesto, generate_dataset
from plugins.dados.texturas import EspecTextura, TipoTextura, avaliar_textura

__all__ = [
    "ParametrosAumento",
    "amostrar_parametros_aumento",
    "aplicar_aumento",
    "augment",
    "EspecCena",
    "ModoCena",
    "randomize_scene",
    "render_colour",
    "EntradaManifesto",
    "Manifesto",
    "generate_dataset",
    "EspecTextura",
    "TipoTextura",
    "avaliar_textura",
]
