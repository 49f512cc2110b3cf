import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from plugins.geometria.formas import generate_toy_shape
from plugins.geometria.malha import Malha, TransformacaoRigida, normalize_mesh, rig_icosaedrico
from plugins.renderizacao.imagem import Imagem, carregar_png, redimensionar, salvar_png
from plugins.renderizacao.rasterizador import (
    Camera,
    ModoSombreamento,
    Sombreamento,
    project_vertex,
    rasterize,
)
from plugins.renderizacao.vistas import crop_to_extent, render_views
from utils.erros import (
    ErroArquivoCorrompido,
    ErroAtrasDaCamera,
    ErroFormaIncompativel,
    ErroMascaraVazia,
    ErroParametroInvalido,
    ErroResolucaoZero,
)
from utils.log_helper import TRACE_LEVEL


def camera_frontal(resolucao=(100, 100), fov=np.pi / 2, distancia=3.0):
    return Camera.olhando_para([0.0, 0.0, distancia], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], fov, resolucao)


def triangulo(z: float, escala: float = 1.0, nome: str = "tri") -> Malha:
    vertices = np.array([[-1.0, -1.0, z], [1.0, -1.0, z], [0.0, 1.0, z]]) * [escala, escala, 1.0]
    return Malha.de_arrays(vertices, [[0, 1, 2]], nome)


def triangulos_aleatorios(rng, n: int) -> Malha:
    """n triângulos independentes (sem vértices compartilhados) em [-1, 1]^3."""
    vertices = rng.uniform(-1.0, 1.0, size=(3 * n, 3))
    return Malha.de_arrays(vertices, np.arange(3 * n).reshape(n, 3))


class TestProjecao:
    def test_centro_e_deslocamento(self):
        camera = camera_frontal()
        assert camera.focal_px == pytest.approx(50.0)
        np.testing.assert_allclose(project_vertex(camera, [0.0, 0.0, 0.0]), (50.0, 50.0, 3.0))
        x, y, _ = project_vertex(camera, [1.0, 1.0, 0.0])
        assert x == pytest.approx(50.0 + 50.0 / 3.0)
        # y de tela cresce para baixo
        assert y == pytest.approx(50.0 - 50.0 / 3.0)

    def test_ponto_atras_da_camera(self):
        with pytest.raises(ErroAtrasDaCamera):
            project_vertex(camera_frontal(), [0.0, 0.0, 5.0])

    def test_camera_valida_parametros(self):
        with pytest.raises(ErroParametroInvalido):
            camera_frontal(fov=0.0)
        with pytest.raises(ErroParametroInvalido):
            Camera(camera_frontal().pose, 1.0, perto=2.0, longe=1.0)


class TestRasterize:
    def test_headlight_frontal_satura(self, cubo):
        resultado = rasterize(cubo, camera_frontal(), Sombreamento())
        centro = resultado.imagem.dados[50, 50, 0]
        assert centro == pytest.approx(0.15 + 0.85, abs=1e-3)
        assert resultado.profundidade[50, 50] == pytest.approx(2.0)
        assert resultado.mascara[50, 50]
        assert not resultado.mascara[0, 0]
        assert np.isinf(resultado.profundidade[0, 0])

    def test_rasterize_emite_trace(self, cubo, coletor_trace):
        rasterize(cubo, camera_frontal((16, 16)), Sombreamento())
        mensagens = coletor_trace.mensagens(TRACE_LEVEL)
        assert any(m.startswith("[render] cubo: 12 triângulos") for m in mensagens)

    def test_fundo_e_canais(self, cubo):
        resultado = rasterize(cubo, camera_frontal(), Sombreamento(), fundo=[0.2, 0.4, 0.6])
        assert resultado.imagem.canais == 3
        np.testing.assert_allclose(resultado.imagem.dados[0, 0], [0.2, 0.4, 0.6])

    def test_teste_de_profundidade(self):
        perto = triangulo(0.5, nome="perto")
        longe = triangulo(-0.5, escala=2.0, nome="longe")
        juntos = Malha.de_arrays(
            np.vstack([longe.vertices, perto.vertices]), [[0, 1, 2], [3, 4, 5]]
        )
        resultado = rasterize(juntos, camera_frontal(), Sombreamento())
        assert resultado.profundidade[55, 50] == pytest.approx(2.5)
        # fora do triângulo menor, o maior aparece
        assert resultado.profundidade[70, 30] == pytest.approx(3.5)

    def test_profundidade_em_pares_aleatorios(self, rng):
        camera = camera_frontal((32, 32))
        for _ in range(100):
            par = triangulos_aleatorios(rng, 2)
            a = Malha.de_arrays(par.vertices[:3], [[0, 1, 2]])
            b = Malha.de_arrays(par.vertices[3:], [[0, 1, 2]])
            ra, rb, juntos = (rasterize(m, camera, Sombreamento()) for m in (a, b, par))

            np.testing.assert_array_equal(juntos.mascara, ra.mascara | rb.mascara)
            np.testing.assert_array_equal(juntos.profundidade, np.minimum(ra.profundidade, rb.profundidade))
            # onde as profundidades diferem, vence o sombreamento do mais próximo
            a_na_frente = ra.profundidade < rb.profundidade - 1e-9
            b_na_frente = rb.profundidade < ra.profundidade - 1e-9
            np.testing.assert_array_equal(juntos.imagem.dados[a_na_frente], ra.imagem.dados[a_na_frente])
            np.testing.assert_array_equal(juntos.imagem.dados[b_na_frente], rb.imagem.dados[b_na_frente])

    def test_recorte_no_plano_proximo(self):
        # triângulo atravessa o plano da câmera
        malha = Malha.de_arrays([[-1.0, -1.0, 0.0], [1.0, -1.0, 0.0], [0.0, -1.0, 6.0]], [[0, 1, 2]])
        camera = Camera.olhando_para([0.0, 0.0, 3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], np.pi / 2, (64, 64))
        resultado = rasterize(malha, camera, Sombreamento())
        assert resultado.mascara.any()
        assert np.all(resultado.profundidade[resultado.mascara] >= camera.perto)

    def test_malha_vazia_devolve_fundo(self):
        resultado = rasterize(Malha.vazia(), camera_frontal((8, 6)), Sombreamento(), fundo=0.25)
        assert resultado.imagem.dados.shape == (6, 8, 1)
        np.testing.assert_allclose(resultado.imagem.dados, 0.25)
        assert not resultado.mascara.any()

    def test_resolucao_zero(self, cubo):
        with pytest.raises(ErroResolucaoZero):
            rasterize(cubo, camera_frontal((0, 10)), Sombreamento())

    def test_luz_direcional_de_costas_fica_no_ambiente(self, cubo):
        sombreamento = Sombreamento(ModoSombreamento.DIRECIONAL, direcao_luz=[0.0, 0.0, -1.0], ambiente=0.2, albedo=0.8)
        resultado = rasterize(cubo, camera_frontal(), sombreamento)
        assert resultado.imagem.dados[50, 50, 0] == pytest.approx(0.2)

    def test_albedo_textura(self, cubo):
        sombreamento = Sombreamento(albedo=lambda p: np.tile([1.0, 0.0, 0.0], (len(p), 1)), ambiente=0.3)
        resultado = rasterize(cubo, camera_frontal(), sombreamento)
        np.testing.assert_allclose(resultado.imagem.dados[50, 50], [1.0, 0.0, 0.0], atol=1e-3)


class TestVistas:
    def test_doze_vistas_quadradas(self, cubo):
        vistas = render_views(cubo, rig_icosaedrico(12), resolucao=32)
        assert len(vistas) == 12
        for vista in vistas:
            assert vista.dados.shape == (32, 32, 1)
            assert vista.dados.max() > 0.15

    def test_fracao_de_preenchimento(self, cubo):
        vista = render_views(cubo, rig_icosaedrico(12), resolucao=64, fracao=0.5)[0]
        ocupado = vista.dados[:, :, 0] > 0.05
        linhas = np.nonzero(ocupado.any(axis=1))[0]
        colunas = np.nonzero(ocupado.any(axis=0))[0]
        extensao = max(linhas[-1] - linhas[0] + 1, colunas[-1] - colunas[0] + 1)
        assert abs(extensao - 32) <= 3

    def test_regra_de_recorte_em_malhas_aleatorias(self, rng):
        camera = camera_frontal((64, 64))
        for _ in range(50):
            mascara = rasterize(triangulos_aleatorios(rng, 6), camera, Sombreamento()).mascara
            linhas = np.nonzero(mascara.any(axis=1))[0]
            colunas = np.nonzero(mascara.any(axis=0))[0]
            # retângulo da caixa da máscara: o limiar 0.5 do bilinear cai na borda contínua
            retangulo = np.zeros((64, 64, 1))
            retangulo[linhas[0]:linhas[-1] + 1, colunas[0]:colunas[-1] + 1] = 1.0
            fracao = float(rng.uniform(0.3, 1.0))
            lado = int(rng.integers(24, 80))

            saida = crop_to_extent(Imagem(retangulo), mascara, fracao, lado_saida=lado).dados[:, :, 0] > 0.5
            linhas_s = np.nonzero(saida.any(axis=1))[0]
            colunas_s = np.nonzero(saida.any(axis=0))[0]
            altura_s = linhas_s[-1] - linhas_s[0] + 1
            largura_s = colunas_s[-1] - colunas_s[0] + 1
            assert abs(max(altura_s, largura_s) - fracao * lado) <= 1.0
            assert abs((linhas_s[0] + linhas_s[-1] + 1) / 2.0 - lado / 2.0) <= 1.0
            assert abs((colunas_s[0] + colunas_s[-1] + 1) / 2.0 - lado / 2.0) <= 1.0

    def test_equivariancia_a_rotacoes(self):
        malha = normalize_mesh(generate_toy_shape("cone", [0.6, 1.5, 9], nome="cone"))
        rig = rig_icosaedrico(12)
        referencia = render_views(malha, rig, resolucao=24)
        for rotacao in Rotation.random(20, 7).as_matrix():
            girada = malha.transformar(TransformacaoRigida(rotacao, np.zeros(3)))
            vistas = render_views(girada, rig.rotacionar(rotacao), resolucao=24)
            for a, b in zip(referencia, vistas):
                assert np.max(np.abs(a.dados - b.dados)) <= 1e-6

    def test_esfera_gera_vistas_quase_iguais(self, esfera):
        vistas = render_views(esfera, rig_icosaedrico(12), resolucao=48)
        referencia = vistas[0].dados
        for vista in vistas[1:]:
            assert np.mean(np.abs(vista.dados - referencia)) < 0.05

    def test_threads_nao_mudam_resultado(self, cubo):
        rig = rig_icosaedrico(12)
        sequencial = render_views(cubo, rig, resolucao=24)
        paralelo = render_views(cubo, rig, resolucao=24, n_threads=3)
        for a, b in zip(sequencial, paralelo):
            np.testing.assert_array_equal(a.dados, b.dados)

    def test_lado_saida(self, cubo):
        vistas = render_views(cubo, rig_icosaedrico(12), resolucao=40, lado_saida=16)
        assert vistas[0].dados.shape == (16, 16, 1)

    def test_crop_mascara_vazia(self):
        with pytest.raises(ErroMascaraVazia):
            crop_to_extent(Imagem.preenchida(8, 8), np.zeros((8, 8), dtype=bool))

    def test_crop_fracao_invalida(self):
        mascara = np.ones((8, 8), dtype=bool)
        with pytest.raises(ErroParametroInvalido):
            crop_to_extent(Imagem.preenchida(8, 8), mascara, fracao=1.5)


class TestImagem:
    def test_rejeita_valores_fora_da_faixa(self):
        with pytest.raises(ErroParametroInvalido):
            Imagem(np.full((2, 2), 1.5))
        with pytest.raises(ErroFormaIncompativel):
            Imagem(np.zeros((2, 2, 2)))

    def test_quantizacao_na_exportacao(self):
        imagem = Imagem(np.array([[0.0, 0.5, 1.0]]))
        np.testing.assert_array_equal(imagem.para_uint8()[0, :, 0], [0, 128, 255])

    def test_png_cinza_e_rgb(self, tmp_path):
        imagem = Imagem(np.linspace(0.0, 1.0, 12).reshape(3, 4))
        caminho = salvar_png(imagem, tmp_path / "a" / "x.png")
        cinza = carregar_png(caminho, canais=1)
        np.testing.assert_allclose(cinza.dados, imagem.dados, atol=0.5 / 255 + 1e-12)
        rgb = carregar_png(caminho, canais=3)
        assert rgb.canais == 3
        np.testing.assert_allclose(rgb.dados[:, :, 1], cinza.dados[:, :, 0])

    def test_png_corrompido(self, tmp_path):
        caminho = tmp_path / "ruim.png"
        caminho.write_bytes(b"isto nao e png")
        with pytest.raises(ErroArquivoCorrompido):
            carregar_png(caminho)

    def test_redimensionar(self):
        imagem = Imagem(np.full((8, 8, 3), 0.4))
        assert redimensionar(imagem, 8, 8) is imagem
        menor = redimensionar(imagem, 4, 2)
        assert menor.dados.shape == (2, 4, 3)
        np.testing.assert_allclose(menor.dados, 0.4)
