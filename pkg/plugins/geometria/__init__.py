from plugins.geometria.formas import FamiliaForma, gerar_corpus, generate_toy_shape, icosfera
from plugins.geometria.malha import (
    Malha,
    RigCameras,
    TransformacaoRigida,
    icosahedron_vertices,
    load_obj,
    look_at,
    normalize_mesh,
    rig_icosaedrico,
    save_obj,
)

__all__ = [
    "FamiliaForma",
    "gerar_corpus",
    "generate_toy_shape",
    "icosfera",
    "Malha",
    "RigCameras",
    "TransformacaoRigida",
    "icosahedron_vertices",
    "load_obj",
    "look_at",
    "normalize_mesh",
    "rig_icosaedrico",
    "save_obj",
]
