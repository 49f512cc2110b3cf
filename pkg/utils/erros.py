"""
Hierarquia de exceções do sistema ShapeRetrieval.

Cada módulo levanta a exceção específica do seu domínio; a CLI converte
ErroConfiguracao em código de saída 2 (uso) e qualquer outro erro em 1.
"""


class ErroShapeRetrieval(Exception):
    """Raiz de todas as exceções do sistema."""


# ============================================================
# GEOMETRIA
# ============================================================

class ErroParseObj(ErroShapeRetrieval, ValueError):
    """Registro OBJ malformado ou índice fora do intervalo."""

    def __init__(self, mensagem: str, linha: int = 0):
        self.linha = linha
        prefixo = f"linha {linha}: " if linha else ""
        super().__init__(f"{prefixo}{mensagem}")


class ErroMalhaVazia(ErroShapeRetrieval, ValueError):
    """Arquivo sem vértices ou sem faces."""


class ErroExtensaoDegenerada(ErroShapeRetrieval, ValueError):
    """Todos os vértices coincidem (extensão nula)."""


class ErroDirecaoDegenerada(ErroShapeRetrieval, ValueError):
    """Vetor up paralelo à direção de visada, ou olho igual ao alvo."""


class ErroParametroInvalido(ErroShapeRetrieval, ValueError):
    """Parâmetro fora da faixa documentada."""


# ============================================================
# RENDERIZAÇÃO
# ============================================================

class ErroResolucaoZero(ErroShapeRetrieval, ValueError):
    """Câmera com largura ou altura nula."""


class ErroMascaraVazia(ErroShapeRetrieval, ValueError):
    """Máscara de cobertura sem nenhum pixel."""


class ErroAtrasDaCamera(ErroShapeRetrieval, ValueError):
    """Ponto com profundidade menor ou igual ao plano próximo."""


# ============================================================
# TENSORES / REDE
# ============================================================

class ErroFormaIncompativel(ErroShapeRetrieval, ValueError):
    """Formas de tensores ou imagens incompatíveis."""


class ErroBackwardNaoEscalar(ErroShapeRetrieval, ValueError):
    """backward() chamado sobre tensor com mais de um elemento."""


# ============================================================
# DADOS / TREINO
# ============================================================

class ErroObjetoDesconhecido(ErroShapeRetrieval, KeyError):
    """object_id sem malha correspondente no catálogo."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "objeto desconhecido"


class ErroImagensInsuficientes(ErroShapeRetrieval, ValueError):
    """Âncora com menos imagens que o necessário, ou manifesto com um só objeto."""


class ErroArquivoCorrompido(ErroShapeRetrieval, ValueError):
    """Checkpoint ou índice truncado/ilegível."""


class ErroVersaoIncompativel(ErroShapeRetrieval, ValueError):
    """Versão de formato ou hash de arquitetura divergente."""


# ============================================================
# AVALIAÇÃO
# ============================================================

class ErroVerdadeAusente(ErroShapeRetrieval, KeyError):
    """Consulta sem rótulo de verdade."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "verdade ausente"


class ErroContagemInvalida(ErroShapeRetrieval, ValueError):
    """Quantidade de objetos retidos inválida para a divisão."""


class ErroProtocolo(ErroShapeRetrieval):
    """Objeto de teste encontrado no manifesto de treino de um braço zero-shot."""


# ============================================================
# CONFIGURAÇÃO / USO
# ============================================================

class ErroConfiguracao(ErroShapeRetrieval, ValueError):
    """Chave desconhecida ou valor inválido em arquivo de configuração/flag."""
