from plugins.renderizacao.imagem import Imagem, carregar_png, redimensionar, salvar_png
from plugins.renderizacao.rasterizador import (
    Camera,
    ModoSombreamento,
    ResultadoRasterizacao,
    Sombreamento,
    project_vertex,
    rasterize,
)
from plugins.renderizacao.vistas import crop_to_extent, render_views

__all__ = [
    "Imagem",
    "carregar_png",
    "salvar_png",
    "redimensionar",
    "Camera",
    "ModoSombreamento",
    "Sombreamento",
    "ResultadoRasterizacao",
    "project_vertex",
    "rasterize",
    "crop_to_extent",
    "render_views",
]
