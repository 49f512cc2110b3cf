from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from plugins.autograd.otimizador import Adam
from plugins.dados.manifesto import generate_dataset
from plugins.geometria.formas import gerar_corpus
from plugins.rede.checkpoint import load_checkpoint, save_checkpoint
from plugins.rede.siamesa import init_params
from plugins.renderizacao.imagem import Imagem
from plugins.treino.amostragem import ConjuntoTreino, sample_anchor_batch
from plugins.treino.config import ConfigTreino
from plugins.treino.treinador import train, train_step
from utils.erros import ErroConfiguracao, ErroImagensInsuficientes, ErroObjetoDesconhecido
from utils.log_helper import TRACE_LEVEL


def imagem_constante(valor: float, lado: int = 8) -> Imagem:
    return Imagem(np.full((lado, lado, 3), valor))


@pytest.fixture
def conjunto():
    return ConjuntoTreino({
        "a": [imagem_constante(0.1 * i) for i in range(4)],
        "b": [imagem_constante(0.5)] * 3,
        "c": [imagem_constante(0.9)] * 3,
    })


@pytest.fixture
def config_minima():
    return ConfigTreino(
        epocas=2,
        pares_por_ancora=2,
        tamanho_entrada=8,
        resolucao_render=16,
        fracao_validacao=0.34,
        taxa_aprendizado=1e-3,
    )


@pytest.fixture
def manifesto_pequeno(tmp_path):
    catalogo = {m.nome: m for m in gerar_corpus(2, semente=0)}
    return generate_dataset(catalogo, por_objeto=3, mix=0.5, semente=0, saida=tmp_path / "dados", resolucao=16)


class TestConfigTreino:
    def test_padroes(self):
        config = ConfigTreino()
        assert config.margem == 1.0
        assert config.taxa_aprendizado == pytest.approx(5e-5)
        assert config.weight_decay == pytest.approx(1e-5)
        assert config.pares_por_ancora == 12 and config.positivos_por_ancora == 6

    def test_arquivo_com_sobrescritas(self, tmp_path):
        caminho = tmp_path / "treino.cfg"
        caminho.write_text("# comentário\nmargin=0.5\nepochs=3\nshare_mode=separate\n", encoding="utf-8")
        config = ConfigTreino.de_arquivo(caminho, {"epochs": 7, "seed": None})
        assert config.margem == 0.5
        assert config.epocas == 7
        assert config.semente == 0
        assert config.modo_compartilhamento == "separate"

    def test_chave_desconhecida(self, tmp_path):
        caminho = tmp_path / "treino.cfg"
        caminho.write_text("learning_rat=0.1\n", encoding="utf-8")
        with pytest.raises(ErroConfiguracao):
            ConfigTreino.de_arquivo(caminho)

    def test_valor_inconvertivel(self, tmp_path):
        caminho = tmp_path / "treino.cfg"
        caminho.write_text("epochs=muitas\n", encoding="utf-8")
        with pytest.raises(ErroConfiguracao):
            ConfigTreino.de_arquivo(caminho)

    def test_arquivo_ausente(self, tmp_path):
        with pytest.raises(ErroConfiguracao):
            ConfigTreino.de_arquivo(tmp_path / "nao_existe.cfg")

    @pytest.mark.parametrize(
        "campos",
        [
            {"pares_por_ancora": 3},
            {"epocas": 0},
            {"tamanho_entrada": 12},
            {"n_vistas": 16},
            {"modo_compartilhamento": "parcial"},
            {"fracao_validacao": 1.0},
            {"precisao": "float16"},
        ],
    )
    def test_validacao(self, campos):
        with pytest.raises(ErroConfiguracao):
            ConfigTreino(**campos)

    def test_para_chaves(self):
        chaves = ConfigTreino(epocas=4).para_chaves()
        assert chaves["epochs"] == 4
        assert ConfigTreino.de_chaves(chaves) == ConfigTreino(epocas=4)


class TestAmostragem:
    def test_positivos_sem_reposicao_e_negativos_de_outros(self, conjunto):
        lote = sample_anchor_batch(conjunto, "a", np.random.default_rng(0), n_positivos=4)
        assert lote.n_pares == 8
        assert sorted(i for _, i in lote.origens_positivas) == [0, 1, 2, 3]
        assert all(o == "a" for o, _ in lote.origens_positivas)
        assert all(o != "a" for o, _ in lote.origens_negativas)

    def test_negativos_distintos_quando_possivel(self, conjunto):
        lote = sample_anchor_batch(conjunto, "b", np.random.default_rng(1), n_positivos=2)
        assert sorted(o for o, _ in lote.origens_negativas) == ["a", "c"]

    def test_deterministico_e_independente_do_executor(self, conjunto):
        a = sample_anchor_batch(conjunto, "a", np.random.default_rng(5), n_positivos=3)
        with ThreadPoolExecutor(max_workers=2) as executor:
            b = sample_anchor_batch(conjunto, "a", np.random.default_rng(5), n_positivos=3, executor=executor)
        assert a.origens_positivas == b.origens_positivas
        assert a.origens_negativas == b.origens_negativas
        for x, y in zip(a.positivos + a.negativos, b.positivos + b.negativos):
            assert x == y

    def test_cada_imagem_aparece_duas_vezes_por_epoca(self):
        conjunto = ConjuntoTreino({
            objeto: [imagem_constante(0.1 * i + 0.01 * j) for i in range(6)]
            for j, objeto in enumerate("abcd")
        })
        contagem = {(objeto, i): 0 for objeto in conjunto.imagens for i in range(6)}
        epocas = 10
        for epoca in range(1, epocas + 1):
            rng = np.random.default_rng([0, epoca])
            for ancora in (conjunto.object_ids[i] for i in rng.permutation(4)):
                lote = sample_anchor_batch(conjunto, ancora, rng, n_positivos=6)
                for origem in lote.origens_positivas + lote.origens_negativas:
                    contagem[origem] += 1
        por_epoca = np.array(list(contagem.values())) / epocas
        assert por_epoca.mean() == pytest.approx(2.0)
        assert np.all(np.abs(por_epoca - 2.0) <= 1.0)

    def test_imagens_insuficientes(self, conjunto):
        with pytest.raises(ErroImagensInsuficientes):
            sample_anchor_batch(conjunto, "b", np.random.default_rng(0), n_positivos=4)

    def test_um_unico_objeto(self):
        sozinho = ConjuntoTreino({"a": [imagem_constante(0.2)] * 3})
        with pytest.raises(ErroImagensInsuficientes):
            sample_anchor_batch(sozinho, "a", np.random.default_rng(0), n_positivos=1)

    def test_ancora_desconhecida(self, conjunto):
        with pytest.raises(ErroObjetoDesconhecido):
            sample_anchor_batch(conjunto, "z", np.random.default_rng(0))

    def test_separacao_de_validacao(self, manifesto_pequeno):
        conjunto = ConjuntoTreino.do_manifesto(manifesto_pequeno, 8, fracao_validacao=0.34, minimo_treino=1)
        assert conjunto.n_validacao == 2
        assert all(len(v) == 2 for v in conjunto.imagens.values())
        assert conjunto.imagens[conjunto.object_ids[0]][0].dados.shape == (8, 8, 3)

    def test_validacao_respeita_minimo_de_treino(self, manifesto_pequeno):
        conjunto = ConjuntoTreino.do_manifesto(manifesto_pequeno, 8, fracao_validacao=0.9, minimo_treino=2)
        assert all(len(v) == 2 for v in conjunto.imagens.values())
        assert conjunto.n_validacao == 2


class TestTrainStep:
    def test_atualiza_parametros_e_devolve_perda(self, conjunto):
        params = init_params(3, tamanho_entrada=8, n_vistas=2, canais=(4, 4, 4, 4), dim=8)
        antes = {nome: t.dados.copy() for nome, t in params.tensores.items()}
        vistas = [Imagem(np.full((8, 8, 1), v)) for v in (0.2, 0.7)]
        lote = sample_anchor_batch(conjunto, "a", np.random.default_rng(0), n_positivos=2, vistas=vistas)
        otimizador = Adam(params.tensores, lr=1e-2)

        perda = train_step(params, lote, ConfigTreino(tamanho_entrada=8), otimizador)

        assert np.isfinite(perda) and perda >= 0.0
        assert otimizador.estado.t == 1
        assert any(not np.array_equal(antes[n], t.dados) for n, t in params.tensores.items())

    def test_passo_emite_trace(self, conjunto, coletor_trace):
        params = init_params(3, tamanho_entrada=8, n_vistas=2, canais=(4, 4, 4, 4), dim=8)
        vistas = [Imagem(np.full((8, 8, 1), v)) for v in (0.2, 0.7)]
        lote = sample_anchor_batch(conjunto, "a", np.random.default_rng(0), n_positivos=2, vistas=vistas)
        train_step(params, lote, ConfigTreino(tamanho_entrada=8), Adam(params.tensores, lr=1e-3))
        mensagens = coletor_trace.mensagens(TRACE_LEVEL)
        assert any(m.startswith("[treino] passo 1 da âncora a") and m.endswith("(4 pares)") for m in mensagens)
        assert any(m.startswith("[autograd] conv2d") for m in mensagens)

    def test_perda_cai_no_mesmo_lote(self, conjunto):
        params = init_params(4, tamanho_entrada=8, n_vistas=2, canais=(4, 4, 4, 4), dim=8)
        vistas = [Imagem(np.full((8, 8, 1), v)) for v in (0.3, 0.6)]
        lote = sample_anchor_batch(conjunto, "a", np.random.default_rng(2), n_positivos=2, vistas=vistas)
        otimizador = Adam(params.tensores, lr=1e-2, weight_decay=0.0)
        perdas = [train_step(params, lote, ConfigTreino(tamanho_entrada=8), otimizador) for _ in range(30)]
        assert perdas[-1] < perdas[0]


class TestTrain:
    def test_registra_uma_linha_por_epoca(self, config_minima, manifesto_pequeno, tmp_path):
        stats = tmp_path / "saida" / "treino.stats.tsv"
        resultado = train(config_minima, manifesto_pequeno, stats)
        linhas = stats.read_text(encoding="utf-8").splitlines()
        assert [int(linha.split("\t")[0]) for linha in linhas] == [1, 2]
        assert all(len(linha.split("\t")) == 5 for linha in linhas)
        assert len(resultado.estatisticas) == 2
        assert resultado.melhor_epoca in (1, 2)
        melhor = resultado.melhor
        assert melhor.top1 == max(s.top1 for s in resultado.estatisticas)
        assert 0.0 <= melhor.top1 <= melhor.top2 <= melhor.top5 <= 1.0

    def test_deterministico(self, config_minima, manifesto_pequeno):
        a = train(config_minima, manifesto_pequeno)
        b = train(config_minima, manifesto_pequeno)
        assert [s.perda for s in a.estatisticas] == [s.perda for s in b.estatisticas]
        for nome, tensor in a.params.tensores.items():
            np.testing.assert_array_equal(tensor.dados, b.params.tensores[nome].dados)

    def test_cancelamento_encerra_apos_a_epoca(self, config_minima, manifesto_pequeno):
        resultado = train(config_minima, manifesto_pequeno, cancelado=lambda: True)
        assert len(resultado.estatisticas) == 1
        assert resultado.melhor_epoca == 1

    def test_sem_validacao_mantem_primeira_epoca(self, config_minima, manifesto_pequeno):
        config_minima.fracao_validacao = 0.0
        resultado = train(config_minima, manifesto_pequeno)
        assert all(s.top1 == 0.0 for s in resultado.estatisticas)
        assert resultado.melhor_epoca == 1

    def test_checkpoint_do_treino_recarrega(self, config_minima, manifesto_pequeno, tmp_path):
        resultado = train(config_minima, manifesto_pequeno)
        caminho = save_checkpoint(resultado.params, resultado.estado, tmp_path / "m.ckpt")
        params, estado = load_checkpoint(caminho)
        assert params.n_vistas == config_minima.n_vistas
        assert params.tamanho_entrada == 8
        assert estado.t == resultado.estado.t > 0

    def test_checkpoint_regravado_e_identico(self, config_minima, manifesto_pequeno, tmp_path):
        resultado = train(config_minima, manifesto_pequeno)
        primeiro = save_checkpoint(resultado.params, resultado.estado, tmp_path / "a.ckpt")
        params, estado = load_checkpoint(primeiro)
        segundo = save_checkpoint(params, estado, tmp_path / "b.ckpt")
        assert primeiro.read_bytes() == segundo.read_bytes()

    @pytest.mark.lento
    def test_perda_media_cai_ao_longo_das_epocas(self, manifesto_pequeno):
        config = ConfigTreino(
            epocas=5,
            pares_por_ancora=2,
            tamanho_entrada=8,
            resolucao_render=16,
            fracao_validacao=0.0,
            taxa_aprendizado=1e-3,
        )
        resultado = train(config, manifesto_pequeno)
        assert resultado.estatisticas[-1].perda < resultado.estatisticas[0].perda

    def test_imagens_insuficientes(self, manifesto_pequeno):
        config = ConfigTreino(epocas=1, pares_por_ancora=12, tamanho_entrada=8, resolucao_render=16)
        with pytest.raises(ErroImagensInsuficientes):
            train(config, manifesto_pequeno)
