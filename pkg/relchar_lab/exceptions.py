"""Hierarquia de exceções do laboratório de caracteres relativos.

Toda falha detectada pelas rotinas de cálculo deriva de ``LabError``. As
mensagens seguem o padrão ``[COMPONENTE] descrição`` para que o log da linha
de comando identifique rapidamente a camada que falhou.
"""

from __future__ import annotations


class LabError(Exception):
    """Erro base de todas as rotinas do laboratório."""


class ConfigError(LabError):
    """Configuração de job inválida ou hipótese do teorema violada."""


class EvenPrimeError(LabError):
    """Primo par solicitado; apenas característica residual ímpar é suportada."""


class NotPrimeError(LabError):
    """O parâmetro ``p`` não é primo."""


class NotNonResidueError(LabError):
    """O parâmetro ``u`` da extensão não ramificada é um quadrado mod p."""


class PrecisionError(LabError):
    """A precisão de trabalho não comporta o cálculo pedido."""


class NoSolutionError(LabError):
    """Não foi encontrado α_χ satisfazendo a identidade de aproximação aditiva."""


class NonGenericPairError(LabError):
    """Par (χ₀, χ⁻¹) não genérico: algum fator passa a ser não ramificado."""


class LFactorPresentError(LabError):
    """O fator γ não é um monômio porque um fator L não trivial aparece."""


class PreconditionError(LabError):
    """Pré-condição de uma operação não satisfeita."""


class OutOfRegimeError(LabError):
    """Parâmetros fora do regime em que a tabela fechada se aplica."""


class UnsupportedTestFunctionError(LabError):
    """Função teste fora da família com transformada de Fourier exata."""


class CorpusError(LabError):
    """Caso do corpus ausente ou corrompido."""
