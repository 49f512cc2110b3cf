"""
Texturas procedurais (sólida, gradiente, xadrez, value noise).

Cada textura é avaliada em coordenadas 2D (u, v) ou 3D (posições no espaço
do objeto, projetadas em dois eixos ortogonais derivados da semente).
Os valores resultantes são combinações convexas das cores, logo ficam em [0, 1].
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from utils.erros import ErroParametroInvalido

# Lado da grade periódica do value noise
_LADO_RUIDO = 64


class TipoTextura(str, Enum):
    SOLIDA = "solid"
    GRADIENTE = "gradient"
    XADREZ = "checker"
    RUIDO = "value_noise"

    def __str__(self):
        return self.value


Cor = Tuple[float, float, float]


@dataclass(frozen=True)
class EspecTextura:
    """
    Attributes:
        tipo: família procedural
        cores: duas cores RGB em [0, 1] (a segunda é ignorada por `solid`)
        escala: frequência espacial (repetições por unidade)
        orientacao: ângulo em radianos no plano (u, v)
        semente: define eixos de projeção 3D e a grade do ruído
    """

    tipo: TipoTextura
    cores: Tuple[Cor, Cor]
    escala: float = 1.0
    orientacao: float = 0.0
    semente: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tipo", TipoTextura(self.tipo))
        cores = tuple(tuple(float(c) for c in cor) for cor in self.cores)
        if len(cores) == 1:
            cores = (cores[0], cores[0])
        if len(cores) != 2 or any(len(cor) != 3 for cor in cores):
            raise ErroParametroInvalido("textura exige duas cores RGB")
        if any(not 0.0 <= c <= 1.0 for cor in cores for c in cor):
            raise ErroParametroInvalido(f"cores fora de [0, 1]: {cores}")
        if self.escala <= 0:
            raise ErroParametroInvalido(f"escala deve ser positiva: {self.escala}")
        object.__setattr__(self, "cores", cores)

    def __call__(self, coordenadas: np.ndarray) -> np.ndarray:
        return avaliar_textura(self, coordenadas)

    def escurecida(self, fator: float) -> "EspecTextura":
        """Mesma textura com cores multiplicadas por `fator` (piso correlato à parede)."""
        cores = tuple(tuple(c * fator for c in cor) for cor in self.cores)
        return EspecTextura(self.tipo, cores, self.escala, self.orientacao, self.semente)


def _eixos_projecao(semente: int) -> np.ndarray:
    """Dois eixos ortonormais (2, 3) determinísticos para a semente."""
    rng = np.random.default_rng([semente, 0x7E47])
    a = rng.normal(size=3)
    a /= np.linalg.norm(a)
    b = rng.normal(size=3)
    b -= a * np.dot(a, b)
    b /= np.linalg.norm(b)
    return np.stack([a, b])


def _coordenadas_uv(espec: EspecTextura, coordenadas: np.ndarray) -> np.ndarray:
    coordenadas = np.asarray(coordenadas, dtype=np.float64)
    if coordenadas.ndim == 1:
        coordenadas = coordenadas[None]
    if coordenadas.shape[-1] == 3:
        uv = coordenadas @ _eixos_projecao(espec.semente).T
    elif coordenadas.shape[-1] == 2:
        uv = coordenadas
    else:
        raise ErroParametroInvalido(f"coordenadas devem ter 2 ou 3 componentes: {coordenadas.shape}")
    c, s = np.cos(espec.orientacao), np.sin(espec.orientacao)
    rotacao = np.array([[c, -s], [s, c]])
    return uv @ rotacao.T * espec.escala


def _grade_ruido(semente: int) -> np.ndarray:
    return np.random.default_rng([semente, 0x401]).random((_LADO_RUIDO, _LADO_RUIDO))


def _value_noise(uv: np.ndarray, semente: int) -> np.ndarray:
    grade = _grade_ruido(semente)
    base = np.floor(uv)
    frac = uv - base
    i = base[:, 0].astype(np.int64) % _LADO_RUIDO
    j = base[:, 1].astype(np.int64) % _LADO_RUIDO
    i1 = (i + 1) % _LADO_RUIDO
    j1 = (j + 1) % _LADO_RUIDO
    # smoothstep
    su = frac[:, 0] ** 2 * (3.0 - 2.0 * frac[:, 0])
    sv = frac[:, 1] ** 2 * (3.0 - 2.0 * frac[:, 1])
    topo = grade[i, j] * (1 - su) + grade[i1, j] * su
    base_v = grade[i, j1] * (1 - su) + grade[i1, j1] * su
    return topo * (1 - sv) + base_v * sv


def avaliar_textura(espec: EspecTextura, coordenadas: np.ndarray) -> np.ndarray:
    """Avalia a textura: (N, 2|3) -> (N, 3) com valores em [0, 1]."""
    c0, c1 = (np.asarray(cor) for cor in espec.cores)
    uv = _coordenadas_uv(espec, coordenadas)

    if espec.tipo == TipoTextura.SOLIDA:
        return np.broadcast_to(c0, (len(uv), 3)).copy()
    if espec.tipo == TipoTextura.GRADIENTE:
        # Onda triangular ao longo de u: periódica e contínua
        fase = np.mod(uv[:, 0], 2.0)
        t = 1.0 - np.abs(fase - 1.0)
    elif espec.tipo == TipoTextura.XADREZ:
        t = np.mod(np.floor(uv[:, 0]) + np.floor(uv[:, 1]), 2.0)
    else:
        t = _value_noise(uv, espec.semente)
    t = np.clip(t, 0.0, 1.0)[:, None]
    return (1.0 - t) * c0 + t * c1


def textura_aleatoria(rng: np.random.Generator) -> EspecTextura:
    """Sorteia tipo, cores, escala, orientação e semente."""
    tipo = list(TipoTextura)[int(rng.integers(len(TipoTextura)))]
    cores = (tuple(rng.random(3).tolist()), tuple(rng.random(3).tolist()))
    return EspecTextura(
        tipo=tipo,
        cores=cores,
        escala=float(rng.uniform(0.5, 6.0)),
        orientacao=float(rng.uniform(0.0, np.pi)),
        semente=int(rng.integers(0, 2**31 - 1)),
    )
