import struct

import numpy as np
import pytest

from plugins.autograd import EstadoAdam, contrastive_loss, precisao, sem_grad
from plugins.rede.checkpoint import load_checkpoint, save_checkpoint
from plugins.rede.siamesa import (
    RAMO_IMAGEM,
    RAMO_VISTA,
    ModoCompartilhamento,
    ParametrosRede,
    caracteristicas_agrupadas,
    embed_image,
    embed_shape,
    init_params,
    pair_distance,
)
from utils.erros import ErroArquivoCorrompido, ErroFormaIncompativel, ErroParametroInvalido, ErroVersaoIncompativel

CANAIS_PEQUENOS = (2, 2, 2, 4)
LADO = 8


def rede(modo="shared", semente=0, **kwargs):
    return init_params(semente, modo, tamanho_entrada=LADO, n_vistas=4, canais=CANAIS_PEQUENOS, dim=4, **kwargs)


@pytest.fixture
def vistas(rng):
    return [rng.random((LADO, LADO, 1)) for _ in range(4)]


@pytest.fixture
def imagem(rng):
    return rng.random((LADO, LADO, 3))


class TestParametros:
    def test_armazenamentos_por_modo(self):
        compartilhada = rede("shared")
        separada = rede("separate")
        assert compartilhada.n_armazenamentos() == 14
        assert separada.n_armazenamentos() == 20
        assert compartilhada.n_parametros_por_ramo() == separada.n_parametros_por_ramo()

    def test_trunk_e_head_sao_o_mesmo_tensor(self):
        p = rede("shared")
        img, vista = p.do_ramo(RAMO_IMAGEM), p.do_ramo(RAMO_VISTA)
        assert img["trunk.conv3.peso"] is vista["trunk.conv3.peso"]
        assert img["head.peso"] is vista["head.peso"]
        assert img["stem.conv1.peso"] is not vista["stem.conv1.peso"]

    def test_ramos_separados_independentes(self):
        p = rede("separate")
        img, vista = p.do_ramo(RAMO_IMAGEM), p.do_ramo(RAMO_VISTA)
        assert set(img) == set(vista)
        assert all(img[nome] is not vista[nome] for nome in img)

    def test_hash_depende_do_modo_e_das_formas(self):
        assert rede("shared").hash != rede("separate").hash
        assert rede("shared").hash == rede("shared", semente=5).hash
        outra = init_params(0, "shared", LADO, 4, canais=(2, 2, 2, 8), dim=4)
        assert outra.hash != rede("shared").hash

    def test_inicializacao_deterministica(self):
        a, b, c = rede(semente=3), rede(semente=3), rede(semente=4)
        for nome in a.tensores:
            np.testing.assert_array_equal(a.tensores[nome].dados, b.tensores[nome].dados)
        assert any(not np.array_equal(a.tensores[n].dados, c.tensores[n].dados) for n in a.tensores)
        assert not a.tensores["head.vies"].dados.any()

    def test_parametros_inconsistentes(self):
        p = rede()
        tensores = dict(p.tensores)
        tensores.pop("head.vies")
        with pytest.raises(ErroFormaIncompativel):
            ParametrosRede(tensores, ModoCompartilhamento.SHARED, LADO, 4)

    def test_copiar_e_independente(self):
        p = rede()
        copia = p.copiar()
        copia.tensores["head.peso"].dados[...] = 0.0
        assert p.tensores["head.peso"].dados.any()


class TestEmbeddings:
    def test_embedding_unitario(self, imagem, vistas):
        p = rede()
        u = embed_image(p, imagem)
        v = embed_shape(p, vistas)
        assert u.shape == (4,) and v.shape == (4,)
        assert np.linalg.norm(u.dados) == pytest.approx(1.0, abs=1e-5)
        assert np.linalg.norm(v.dados) == pytest.approx(1.0, abs=1e-5)

    def test_invariante_a_ordem_das_vistas(self, vistas):
        p = rede()
        np.testing.assert_array_equal(embed_shape(p, vistas).dados, embed_shape(p, vistas[::-1]).dados)

    def test_permutacoes_de_doze_vistas_sao_identicas(self, rng):
        p = init_params(2, "shared", tamanho_entrada=LADO, n_vistas=12, canais=CANAIS_PEQUENOS, dim=4)
        doze = [rng.random((LADO, LADO, 1)) for _ in range(12)]
        referencia = embed_shape(p, doze).dados
        for _ in range(100):
            ordem = rng.permutation(12)
            assert np.array_equal(embed_shape(p, [doze[i] for i in ordem]).dados, referencia)

    def test_vista_extra_nunca_reduz_caracteristica(self, rng):
        p = rede(semente=6)
        treze = [rng.random((LADO, LADO, 1)) for _ in range(13)]
        doze = caracteristicas_agrupadas(p, treze[:12]).dados
        todas = caracteristicas_agrupadas(p, treze).dados
        assert np.all(todas >= doze)

    def test_imagem_cinza_equivale_a_rgb_replicada(self, vistas):
        p = rede()
        cinza = vistas[0]
        np.testing.assert_array_equal(
            embed_image(p, cinza).dados, embed_image(p, np.repeat(cinza, 3, axis=2)).dados
        )

    def test_tamanho_errado(self, rng):
        with pytest.raises(ErroFormaIncompativel):
            embed_image(rede(), rng.random((LADO * 2, LADO * 2, 3)))

    def test_contagem_de_vistas(self, vistas):
        with pytest.raises(ErroParametroInvalido):
            embed_shape(rede(), vistas[:3], n_esperado=4)
        with pytest.raises(ErroParametroInvalido):
            embed_shape(rede(), [])

    def test_distancia_na_faixa(self, imagem, vistas):
        d = pair_distance(rede(), vistas, imagem).item()
        assert 0.0 <= d <= 2.0

    def test_gradiente_chega_aos_dois_ramos(self, imagem, vistas):
        p = rede("shared")
        pair_distance(p, vistas, imagem).backward()
        for nome in ("stem_img.conv1.peso", "stem_view.conv1.peso", "trunk.conv4.peso", "head.peso"):
            assert p.tensores[nome].grad is not None, nome

    @pytest.mark.parametrize("igual", [0, 1])
    def test_gradiente_ponta_a_ponta_por_diferencas_finitas(self, rng, igual):
        passo = 1e-6
        with precisao(np.float64):
            p = rede("shared", semente=11, dtype=np.float64)
            vistas = [rng.random((LADO, LADO, 1)) for _ in range(4)]
            imagem = rng.random((LADO, LADO, 3))

            def perda():
                return contrastive_loss(pair_distance(p, vistas, imagem), igual, margem=2.0)

            perda().backward()
            analiticos, numericos = [], []
            for tensor in p.tensores.values():
                gradiente = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.dados)
                sorteados = rng.choice(tensor.size, size=min(6, tensor.size), replace=False)
                for indice in sorteados:
                    posicao = np.unravel_index(indice, tensor.shape)
                    original = tensor.dados[posicao]
                    valores = []
                    for sinal in (1.0, -1.0):
                        tensor.dados[posicao] = original + sinal * passo
                        with sem_grad():
                            valores.append(perda().item())
                    tensor.dados[posicao] = original
                    analiticos.append(gradiente[posicao])
                    numericos.append((valores[0] - valores[1]) / (2 * passo))
        analiticos, numericos = np.array(analiticos), np.array(numericos)
        erro = np.linalg.norm(analiticos - numericos) / (np.linalg.norm(analiticos) + np.linalg.norm(numericos))
        assert np.linalg.norm(analiticos) > 0.0
        assert erro < 1e-4


class TestCheckpoint:
    def test_preserva_parametros_e_modo(self, tmp_path):
        p = rede("separate")
        caminho = save_checkpoint(p, None, tmp_path / "ck" / "modelo.ckpt")
        carregado, estado = load_checkpoint(caminho)
        assert estado is None
        assert carregado.modo == ModoCompartilhamento.SEPARATE
        assert carregado.tamanho_entrada == LADO and carregado.n_vistas == 4
        assert carregado.hash == p.hash
        for nome, tensor in p.tensores.items():
            np.testing.assert_array_equal(carregado.tensores[nome].dados, tensor.dados)

    def test_compartilhamento_restaurado(self, tmp_path):
        carregado, _ = load_checkpoint(save_checkpoint(rede("shared"), None, tmp_path / "m.ckpt"))
        assert carregado.n_armazenamentos() == 14
        assert carregado.do_ramo(RAMO_IMAGEM)["trunk.conv3.peso"] is carregado.do_ramo(RAMO_VISTA)["trunk.conv3.peso"]

    def test_estado_adam(self, tmp_path):
        p = rede()
        estado = EstadoAdam(t=7)
        for nome, tensor in p.tensores.items():
            estado.m[nome] = np.full(tensor.shape, 0.5, dtype=np.float32)
            estado.v[nome] = np.full(tensor.shape, 0.25, dtype=np.float32)
        _, relido = load_checkpoint(save_checkpoint(p, estado, tmp_path / "m.ckpt"))
        assert relido.t == 7
        assert set(relido.m) == set(p.tensores)
        np.testing.assert_array_equal(relido.v["head.peso"], estado.v["head.peso"])

    def test_precisao_da_carga(self, tmp_path):
        caminho = save_checkpoint(rede(), None, tmp_path / "m.ckpt")
        with precisao(np.float64):
            carregado, _ = load_checkpoint(caminho)
        assert carregado.tensores["head.peso"].dtype == np.float64

    def test_magic_invalido(self, tmp_path):
        caminho = tmp_path / "ruim.ckpt"
        caminho.write_bytes(b"XXXX" + bytes(32))
        with pytest.raises(ErroArquivoCorrompido):
            load_checkpoint(caminho)

    def test_truncado(self, tmp_path):
        caminho = save_checkpoint(rede(), None, tmp_path / "m.ckpt")
        caminho.write_bytes(caminho.read_bytes()[:-3])
        with pytest.raises(ErroArquivoCorrompido):
            load_checkpoint(caminho)

    def test_versao_incompativel(self, tmp_path):
        caminho = save_checkpoint(rede(), None, tmp_path / "m.ckpt")
        conteudo = bytearray(caminho.read_bytes())
        conteudo[4:8] = struct.pack("<I", 99)
        caminho.write_bytes(bytes(conteudo))
        with pytest.raises(ErroVersaoIncompativel):
            load_checkpoint(caminho)

    def test_hash_esperado_divergente(self, tmp_path):
        caminho = save_checkpoint(rede("shared"), None, tmp_path / "m.ckpt")
        with pytest.raises(ErroVersaoIncompativel):
            load_checkpoint(caminho, hash_esperado=rede("separate").hash)

    def test_arquivo_ausente(self, tmp_path):
        with pytest.raises(ErroArquivoCorrompido):
            load_checkpoint(tmp_path / "nao_existe.ckpt")
