import logging

import pytest

from plugins.avaliacao.plugin_indice import PluginIndice
from plugins.dados.plugin_dados_sinteticos import PluginDadosSinteticos
from utils.arquivo_config import coagir, ler_chave_valor, mesclar
from utils.erros import ErroConfiguracao
from utils.log_helper import TRACE_LEVEL
from utils.logging_config import nivel_de_texto
from utils.main_config import ConfigManager, carregar_config


@pytest.fixture
def ambiente_limpo(monkeypatch):
    for chave in ("SHAPE_RETRIEVAL_LOG_DIR", "SHAPE_RETRIEVAL_LOG_LEVEL", "SHAPE_RETRIEVAL_THREADS"):
        monkeypatch.delenv(chave, raising=False)
    yield monkeypatch
    monkeypatch.undo()
    carregar_config(force_reload=True)


class TestConfigManager:
    def test_singleton(self):
        assert ConfigManager() is ConfigManager()

    def test_padroes(self, ambiente_limpo):
        config = carregar_config(force_reload=True)
        assert config["sistema"] == {"log_dir": "logs", "log_nivel": logging.INFO, "threads": 1}
        assert config["render"]["n_vistas"] == 12
        assert set(config) == {"sistema", "render", "dados", "avaliacao"}
        assert config["avaliacao"]["topk"] == [1, 2, 5]

    def test_chaves_lidas_pelos_plugins(self, ambiente_limpo):
        config = carregar_config(force_reload=True)
        assert set(config["render"]) == {"raio", "resolucao", "n_vistas"}
        assert set(config["dados"]) == {"tamanho_entrada"}
        alterada = {**config, "render": {"raio": 2.0, "resolucao": 32, "n_vistas": 20}, "dados": {"tamanho_entrada": 16}}
        indice = PluginIndice(config=alterada)
        dados = PluginDadosSinteticos(config=alterada)
        assert indice.inicializar() and dados.inicializar()
        assert (indice.raio, indice.resolucao, indice.n_vistas_padrao) == (2.0, 32, 20)
        assert dados.resolucao == 16

    def test_variaveis_de_ambiente(self, ambiente_limpo):
        ambiente_limpo.setenv("SHAPE_RETRIEVAL_THREADS", "4")
        ambiente_limpo.setenv("SHAPE_RETRIEVAL_LOG_LEVEL", "debug")
        ambiente_limpo.setenv("SHAPE_RETRIEVAL_LOG_DIR", "/tmp/outros_logs")
        config = carregar_config(force_reload=True)
        assert config["sistema"]["threads"] == 4
        assert config["sistema"]["log_nivel"] == logging.DEBUG
        assert config["sistema"]["log_dir"] == "/tmp/outros_logs"

    def test_cache(self, ambiente_limpo):
        primeira = carregar_config(force_reload=True)
        ambiente_limpo.setenv("SHAPE_RETRIEVAL_THREADS", "8")
        assert carregar_config() is primeira
        assert carregar_config(force_reload=True)["sistema"]["threads"] == 8

    @pytest.mark.parametrize("valor", ["0", "duas"])
    def test_threads_invalidas(self, ambiente_limpo, valor):
        ambiente_limpo.setenv("SHAPE_RETRIEVAL_THREADS", valor)
        with pytest.raises(ValueError):
            carregar_config(force_reload=True)


class TestNivelDeTexto:
    @pytest.mark.parametrize(
        "entrada, esperado",
        [("DEBUG", logging.DEBUG), ("warning", logging.WARNING), ("TRACE", TRACE_LEVEL), (None, logging.INFO), (15, 15)],
    )
    def test_conversao(self, entrada, esperado):
        assert nivel_de_texto(entrada) == esperado

    def test_nome_desconhecido_usa_padrao(self):
        assert nivel_de_texto("barulhento", padrao=logging.ERROR) == logging.ERROR


class TestArquivoChaveValor:
    def test_leitura_com_comentarios(self, tmp_path):
        caminho = tmp_path / "a.cfg"
        caminho.write_text("# cabeçalho\nkind = data_mix\n\nseeds=0,1\n", encoding="utf-8")
        assert ler_chave_valor(caminho) == {"kind": "data_mix", "seeds": "0,1"}

    def test_chave_sem_valor(self, tmp_path):
        caminho = tmp_path / "a.cfg"
        caminho.write_text("epochs\n", encoding="utf-8")
        with pytest.raises(ErroConfiguracao):
            ler_chave_valor(caminho)

    @pytest.mark.parametrize(
        "valor, padrao, esperado",
        [("yes", False, True), ("0", True, False), ("3", 1, 3), ("0.25", 1.0, 0.25), ("1, 2,5", (0,), (1, 2, 5)), ("x", "y", "x")],
    )
    def test_coagir(self, valor, padrao, esperado):
        assert coagir("chave", valor, padrao) == esperado

    def test_coagir_invalido(self):
        with pytest.raises(ErroConfiguracao):
            coagir("epochs", "talvez", 1)
        with pytest.raises(ErroConfiguracao):
            coagir("include_instance_reference", "talvez", False)

    def test_mesclar_prioridade_e_none(self):
        padroes = {"a": 1, "b": 2.0}
        resultado = mesclar(padroes, {"a": "5", "b": "3.5"}, {"a": 7, "b": None})
        assert resultado == {"a": 7, "b": 3.5}

    def test_mesclar_chave_desconhecida(self):
        with pytest.raises(ErroConfiguracao):
            mesclar({"a": 1}, {"c": "2"})
