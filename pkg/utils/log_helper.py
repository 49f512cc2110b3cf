"""
Funcionalidades avançadas de log compartilhadas pelo GerenciadorLog e por
utils.logging_config.

Inclui:
- Nível TRACE (5) para rastreio fino de kernels (conv2d, rasterização)
- Cores ANSI no console (stderr)
- Formatador que troca [NIVEL] por [CATEGORIA] quando a mensagem começa
  com uma categoria (ex.: "[TREINO] época 3 ...")
"""

import logging
import sys
from datetime import datetime
from typing import Optional, Tuple

import pytz

# ============================
#   NÍVEL DE LOG: TRACE
# ============================
TRACE_LEVEL = 5
logging.addLevelName(TRACE_LEVEL, "TRACE")


def trace(self, message, *args, **kws):
    """Método trace para Logger."""
    if self.isEnabledFor(TRACE_LEVEL):
        self._log(TRACE_LEVEL, message, args, **kws)


logging.Logger.trace = trace


# ============================
#   CORES (ANSI)
# ============================
COLORS = {
    "RESET": "\033[0m",
    "BOLD": "\033[1m",
    "INFO": "\033[38;5;39m",      # azul
    "DEBUG": "\033[38;5;244m",     # cinza
    "TRACE": "\033[38;5;245m",     # cinza claro
    "WARNING": "\033[38;5;214m",   # amarelo
    "ERROR": "\033[38;5;196m",     # vermelho
    "CRITICAL": "\033[48;5;196m\033[38;5;231m",
    "TREINO": "\033[38;5;35m",     # verde
    "AVALIACAO": "\033[38;5;141m", # lilás
}


def extrair_categoria(mensagem: str) -> Tuple[Optional[str], str]:
    """'[CAT] texto' -> ('CAT', 'texto'); sem prefixo -> (None, mensagem)."""
    if mensagem.startswith("[") and "]" in mensagem:
        fim = mensagem.find("]")
        if fim > 1:
            return mensagem[1:fim], mensagem[fim + 1:].strip()
    return None, mensagem


# ============================
#   FORMATADOR CUSTOM COM CORES
# ============================
class SmartFormatter(logging.Formatter):
    """
    Formatador com fuso de São Paulo, categoria no lugar do nível e cores
    ANSI opcionais (só quando o stream é um terminal).
    """

    def __init__(self, fmt=None, datefmt=None, timezone_sp=None, use_colors=True, stream=None):
        """
        Args:
            fmt: Formato da mensagem
            datefmt: Formato da data
            timezone_sp: Fuso (pytz); None usa o horário local
            use_colors: Cores ANSI (console) ou texto puro (arquivo)
            stream: Stream de destino usado para detectar terminal (padrão: stderr)
        """
        super().__init__(fmt, datefmt)
        self.timezone_sp = timezone_sp
        self.use_colors = use_colors
        self.stream = stream or sys.stderr

    def formatTime(self, record, datefmt=None):
        if self.timezone_sp:
            dt_utc = datetime.fromtimestamp(record.created, tz=pytz.UTC)
            dt_sp = dt_utc.astimezone(self.timezone_sp)
            return dt_sp.strftime(datefmt or self.default_time_format)
        return super().formatTime(record, datefmt)

    def format(self, record):
        categoria = getattr(record, "_categoria_log", None)
        if isinstance(record.msg, str) and not record.args:
            extraida, texto = extrair_categoria(record.msg)
            if categoria and extraida == categoria:
                record.msg = texto
            elif categoria is None and extraida is not None and extraida.isupper():
                categoria, record.msg = extraida, texto

        msg_formatada = super().format(record)

        nivel = record.levelname
        rotulo = categoria or nivel
        if categoria and f"[{nivel}]" in msg_formatada:
            msg_formatada = msg_formatada.replace(f"[{nivel}]", f"[{categoria}]", 1)

        if self.use_colors and getattr(self.stream, "isatty", lambda: False)():
            cor = COLORS.get(rotulo.split(":")[0], COLORS.get(nivel, COLORS["RESET"]))
            msg_formatada = msg_formatada.replace(f"[{rotulo}]", f"{cor}[{rotulo}]{COLORS['RESET']}", 1)

        return msg_formatada
