from collections import Counter

import numpy as np
import pytest

from plugins.geometria.formas import FamiliaForma, gerar_corpus, generate_toy_shape, icosfera
from utils.erros import ErroParametroInvalido

PARAMETROS_VALIDOS = {
    "box": [1.0, 2.0, 3.0],
    "cylinder": [0.5, 2.0, 16],
    "cone": [0.8, 1.5, 12],
    "torus": [1.0, 0.3, 16, 8],
    "lspline": [2.0, 0.5, 0.3, 12, 6],
}


def volume_assinado(malha) -> float:
    v = malha.vertices[malha.triangulos]
    return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)


def arestas_fechadas(malha) -> bool:
    """Cada aresta orientada aparece uma vez e a oposta também."""
    arestas = Counter()
    for a, b, c in malha.triangulos:
        arestas.update([(a, b), (b, c), (c, a)])
    return all(n == 1 and arestas.get((b, a)) == 1 for (a, b), n in arestas.items())


class TestGenerateToyShape:
    @pytest.mark.parametrize("familia", list(PARAMETROS_VALIDOS))
    def test_malha_fechada_e_orientada_para_fora(self, familia):
        malha = generate_toy_shape(familia, PARAMETROS_VALIDOS[familia], semente=3)
        assert malha.n_triangulos > 0
        assert arestas_fechadas(malha)
        assert volume_assinado(malha) > 0

    def test_volume_da_caixa(self):
        assert volume_assinado(generate_toy_shape("box", [1.0, 2.0, 3.0])) == pytest.approx(6.0)

    def test_volume_do_cilindro_aproxima_o_analitico(self):
        malha = generate_toy_shape(FamiliaForma.CYLINDER, [0.5, 2.0, 256])
        assert volume_assinado(malha) == pytest.approx(np.pi * 0.25 * 2.0, rel=1e-3)

    def test_deterministico(self):
        a = generate_toy_shape("lspline", PARAMETROS_VALIDOS["lspline"], semente=7)
        b = generate_toy_shape("lspline", PARAMETROS_VALIDOS["lspline"], semente=7)
        np.testing.assert_array_equal(a.vertices, b.vertices)
        np.testing.assert_array_equal(a.triangulos, b.triangulos)

    def test_semente_altera_so_lspline(self):
        a = generate_toy_shape("lspline", PARAMETROS_VALIDOS["lspline"], semente=1)
        b = generate_toy_shape("lspline", PARAMETROS_VALIDOS["lspline"], semente=2)
        assert not np.allclose(a.vertices, b.vertices)
        c = generate_toy_shape("torus", PARAMETROS_VALIDOS["torus"], semente=1)
        d = generate_toy_shape("torus", PARAMETROS_VALIDOS["torus"], semente=2)
        np.testing.assert_array_equal(c.vertices, d.vertices)

    def test_nome_padrao_e_familia(self):
        assert generate_toy_shape("cone", PARAMETROS_VALIDOS["cone"]).nome == "cone"
        assert generate_toy_shape("cone", PARAMETROS_VALIDOS["cone"], nome="x").nome == "x"

    @pytest.mark.parametrize(
        "familia, params",
        [
            ("pyramid", [1.0]),
            ("box", [1.0, 2.0]),
            ("box", [1.0, -2.0, 1.0]),
            ("cylinder", [0.5, 1.0, 2]),
            ("cylinder", [0.5, 1.0, 3.5]),
            ("torus", [0.3, 1.0, 16, 8]),
            ("lspline", [2.0, 0.5, 0.95, 12, 6]),
            ("lspline", [2.0, 0.5, 0.3, 12, 1]),
        ],
    )
    def test_parametros_invalidos(self, familia, params):
        with pytest.raises(ErroParametroInvalido):
            generate_toy_shape(familia, params)


class TestCorpus:
    def test_ids_alternam_familias(self):
        corpus = gerar_corpus(7, semente=0)
        assert [m.nome for m in corpus] == [
            "box_000", "cylinder_001", "cone_002", "torus_003", "lspline_004", "box_005", "cylinder_006",
        ]

    def test_formas_normalizadas(self):
        for malha in gerar_corpus(5, semente=11):
            minimo, maximo = malha.caixa_envolvente()
            assert np.max(maximo - minimo) == pytest.approx(2.0)
            np.testing.assert_allclose((minimo + maximo) / 2.0, 0.0, atol=1e-12)

    def test_determinismo_por_semente(self):
        a = gerar_corpus(5, semente=4)
        b = gerar_corpus(5, semente=4)
        c = gerar_corpus(5, semente=5)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.vertices, y.vertices)
        assert any(
            x.n_vertices != z.n_vertices or not np.array_equal(x.vertices, z.vertices) for x, z in zip(a, c)
        )

    def test_prefixo_estavel(self):
        curto = gerar_corpus(3, semente=9)
        longo = gerar_corpus(6, semente=9)
        for x, y in zip(curto, longo):
            np.testing.assert_array_equal(x.vertices, y.vertices)

    def test_quantidade_invalida(self):
        with pytest.raises(ErroParametroInvalido):
            gerar_corpus(0, semente=0)


class TestIcosfera:
    def test_vertices_na_esfera_unitaria(self, esfera):
        np.testing.assert_allclose(np.linalg.norm(esfera.vertices, axis=1), 1.0)
        np.testing.assert_allclose(esfera.normais, esfera.vertices)

    def test_contagem_por_subdivisao(self):
        assert icosfera(0).n_triangulos == 20
        assert icosfera(1).n_triangulos == 80
        assert icosfera(1).n_vertices == 42

    def test_fechada_e_orientada(self, esfera):
        assert arestas_fechadas(esfera)
        assert volume_assinado(esfera) == pytest.approx(4.0 / 3.0 * np.pi, rel=0.1)
