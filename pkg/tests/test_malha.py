import numpy as np
import pytest

from plugins.geometria.malha import (
    Malha,
    RigCameras,
    TransformacaoRigida,
    calcular_normais,
    direcoes_rig,
    icosahedron_vertices,
    load_obj,
    look_at,
    normalize_mesh,
    rig_icosaedrico,
    save_obj,
)
from utils.erros import (
    ErroDirecaoDegenerada,
    ErroExtensaoDegenerada,
    ErroMalhaVazia,
    ErroParametroInvalido,
    ErroParseObj,
)

QUADRADO = """\
# quadrado no plano z = 0
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
f 1 2 3 4
"""

CUBO_OITO_VERTICES = """\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 4 8 7 3
f 1 5 8 4
f 2 3 7 6
"""


class TestLoadObj:
    def test_cubo_sem_vn_tem_normais_nos_eixos(self, arquivo_obj):
        malha = load_obj(arquivo_obj(CUBO_OITO_VERTICES))
        assert malha.n_triangulos == 12
        eixo = np.tile([0.0, 0.0, 1.0], (malha.n_vertices, 1))
        np.testing.assert_allclose(np.sort(np.abs(malha.normais), axis=1), eixo, atol=1e-12)
        # cada normal aponta para fora do centro da face
        centro_faces = malha.vertices[malha.triangulos].mean(axis=1) - 0.5
        normais_faces = malha.normais[malha.triangulos[:, 0]]
        assert np.all(np.sum(centro_faces * normais_faces, axis=1) > 0)
        eixos = {tuple(np.round(n).astype(int)) for n in malha.normais}
        assert len(eixos) == 6

    def test_quad_triangulado_em_leque(self, arquivo_obj):
        malha = load_obj(arquivo_obj(QUADRADO))
        assert malha.n_vertices == 4
        np.testing.assert_array_equal(malha.triangulos, [[0, 1, 2], [0, 2, 3]])
        np.testing.assert_allclose(malha.normais, np.tile([0.0, 0.0, 1.0], (4, 1)))
        assert malha.nome == "malha"

    def test_indices_negativos(self, arquivo_obj):
        texto = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n"
        malha = load_obj(arquivo_obj(texto))
        np.testing.assert_array_equal(malha.triangulos, [[0, 1, 2]])

    def test_registros_ignorados_e_formas_de_canto(self, arquivo_obj):
        texto = (
            "mtllib x.mtl\no objeto\ng grupo\ns off\n"
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 2\n"
            "usemtl m\nf 1/1/1 2/1/1 3/1/1\n"
        )
        malha = load_obj(arquivo_obj(texto), nome="tri")
        assert malha.nome == "tri"
        assert malha.n_triangulos == 1
        # vn é normalizada
        np.testing.assert_allclose(malha.normais, np.tile([0.0, 0.0, 1.0], (3, 1)))

    def test_indice_zero_rejeitado_com_linha(self, arquivo_obj):
        texto = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"
        with pytest.raises(ErroParseObj) as info:
            load_obj(arquivo_obj(texto))
        assert info.value.linha == 4

    def test_indice_fora_do_intervalo(self, arquivo_obj):
        with pytest.raises(ErroParseObj):
            load_obj(arquivo_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n"))

    def test_coordenada_invalida(self, arquivo_obj):
        with pytest.raises(ErroParseObj):
            load_obj(arquivo_obj("v 0 abc 0\n"))

    def test_face_curta(self, arquivo_obj):
        with pytest.raises(ErroParseObj):
            load_obj(arquivo_obj("v 0 0 0\nv 1 0 0\nf 1 2\n"))

    @pytest.mark.parametrize("texto", ["", "# só comentário\n", "v 0 0 0\nv 1 0 0\nv 0 1 0\n"])
    def test_arquivo_sem_faces(self, arquivo_obj, texto):
        with pytest.raises(ErroMalhaVazia):
            load_obj(arquivo_obj(texto))

    def test_save_obj_preserva_geometria(self, cubo, tmp_path):
        caminho = save_obj(cubo, tmp_path / "sub" / "cubo.obj")
        relida = load_obj(caminho)
        assert relida.n_triangulos == cubo.n_triangulos
        np.testing.assert_allclose(np.sort(relida.vertices, axis=0), np.sort(cubo.vertices, axis=0))
        assert caminho.read_text(encoding="utf-8").count("\nf ") == cubo.n_triangulos


class TestNormais:
    def test_vertice_isolado_recebe_z(self):
        vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 5, 5]], dtype=float)
        normais = calcular_normais(vertices, np.array([[0, 1, 2]]))
        np.testing.assert_allclose(normais[3], [0.0, 0.0, 1.0])

    def test_normais_unitarias(self, cubo):
        np.testing.assert_allclose(np.linalg.norm(cubo.normais, axis=1), 1.0)

    def test_malha_rejeita_indice_invalido(self):
        with pytest.raises(ErroParametroInvalido):
            Malha.de_arrays(np.zeros((3, 3)), [[0, 1, 3]])


class TestNormalizeMesh:
    def test_maior_lado_dois_e_centrado(self):
        malha = Malha.de_arrays(
            [[1, 1, 1], [2, 1, 1], [1, 5, 1], [1, 1, 3]],
            [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
        )
        normalizada = normalize_mesh(malha)
        minimo, maximo = normalizada.caixa_envolvente()
        np.testing.assert_allclose((minimo + maximo) / 2.0, 0.0, atol=1e-12)
        assert np.max(maximo - minimo) == pytest.approx(2.0)
        np.testing.assert_allclose(maximo - minimo, [0.5, 2.0, 1.0])

    def test_idempotente(self, cubo):
        np.testing.assert_allclose(normalize_mesh(cubo).vertices, cubo.vertices, atol=1e-12)

    def test_malha_vazia(self):
        with pytest.raises(ErroMalhaVazia):
            normalize_mesh(Malha.vazia())

    def test_extensao_degenerada(self):
        malha = Malha(np.ones((3, 3)), np.tile([0.0, 0.0, 1.0], (3, 1)), [[0, 1, 2]])
        with pytest.raises(ErroExtensaoDegenerada):
            normalize_mesh(malha)


class TestTransformacaoRigida:
    def test_inversa_e_composicao(self, rng):
        pose = look_at([1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        pontos = rng.normal(size=(10, 3))
        np.testing.assert_allclose(pose.inversa().aplicar(pose.aplicar(pontos)), pontos, atol=1e-12)
        identidade = pose.compor(pose.inversa())
        np.testing.assert_allclose(identidade.rotacao, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(identidade.translacao, 0.0, atol=1e-12)

    def test_validar_rejeita_reflexao(self):
        with pytest.raises(ErroParametroInvalido):
            TransformacaoRigida(np.diag([1.0, 1.0, -1.0]), np.zeros(3)).validar()


class TestLookAt:
    def test_alvo_fica_em_menos_z(self):
        pose = look_at([0.0, 0.0, 3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        pose.validar()
        np.testing.assert_allclose(pose.aplicar(np.zeros((1, 3))), [[0.0, 0.0, -3.0]], atol=1e-12)
        np.testing.assert_allclose(pose.origem_inversa, [0.0, 0.0, 3.0], atol=1e-12)
        # +Y do mundo continua para cima na câmera
        assert pose.aplicar_direcoes(np.array([0.0, 1.0, 0.0]))[1] > 0.99

    def test_olho_no_alvo(self):
        with pytest.raises(ErroDirecaoDegenerada):
            look_at([1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [0.0, 1.0, 0.0])

    def test_up_paralelo(self):
        with pytest.raises(ErroDirecaoDegenerada):
            look_at([0.0, 3.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])


class TestRig:
    def test_vertices_do_icosaedro(self):
        vertices = icosahedron_vertices()
        assert vertices.shape == (12, 3)
        np.testing.assert_allclose(np.linalg.norm(vertices, axis=1), 1.0)
        distancias = np.linalg.norm(vertices[:, None] - vertices[None], axis=2)
        np.fill_diagonal(distancias, np.inf)
        # cada vértice tem exatamente 5 vizinhos à menor distância
        assert ((distancias - distancias.min()) < 1e-9).sum(axis=1).tolist() == [5] * 12

    @pytest.mark.parametrize("n", [12, 20, 42])
    def test_direcoes_unitarias_e_distintas(self, n):
        direcoes = direcoes_rig(n)
        assert direcoes.shape == (n, 3)
        np.testing.assert_allclose(np.linalg.norm(direcoes, axis=1), 1.0)
        distancias = np.linalg.norm(direcoes[:, None] - direcoes[None], axis=2)
        np.fill_diagonal(distancias, np.inf)
        assert distancias.min() > 1e-3

    @pytest.mark.parametrize("n", [12, 20, 42])
    def test_rig_balanceado(self, n):
        np.testing.assert_allclose(direcoes_rig(n).sum(axis=0), 0.0, atol=1e-9)

    def test_quarenta_e_dois_comecam_pelos_vertices(self):
        np.testing.assert_array_equal(direcoes_rig(42)[:12], direcoes_rig(12))

    def test_contagem_nao_suportada(self):
        with pytest.raises(ErroParametroInvalido):
            direcoes_rig(16)

    def test_rig_valida_entrada(self):
        with pytest.raises(ErroParametroInvalido):
            RigCameras(np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
        with pytest.raises(ErroParametroInvalido):
            RigCameras(np.array([[2.0, 0.0, 0.0]]))
        with pytest.raises(ErroParametroInvalido):
            rig_icosaedrico(12, raio=0.0)

    def test_rotacionar_preserva_contagem(self):
        angulo = np.pi / 5
        rotacao = np.array([
            [np.cos(angulo), 0.0, np.sin(angulo)],
            [0.0, 1.0, 0.0],
            [-np.sin(angulo), 0.0, np.cos(angulo)],
        ])
        rig = rig_icosaedrico(12).rotacionar(rotacao)
        assert rig.n_vistas == 12
        np.testing.assert_allclose(rig.olhos, direcoes_rig(12) @ rotacao.T)
