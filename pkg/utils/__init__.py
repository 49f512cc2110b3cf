"""
Utilitários do sistema.

Contém funções e classes auxiliares para:
- Configuração (main_config.py, arquivo_config.py)
- Exceções (erros.py)
- Logging (logging_config.py, log_helper.py)
- Progresso (progress_helper.py)
"""

__version__ = "1.0.0"
