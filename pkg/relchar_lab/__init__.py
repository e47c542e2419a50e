"""Laboratório p-ádico de caracteres relativos para (PGL₂, GL₁).

Calcula H_{π,χ}(1_τ^T) por força bruta no modelo de Kirillov, pela tabela
fechada e pela integral na hipérbole, e compara os três.
"""

__version__ = "0.1.0"
