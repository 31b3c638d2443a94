"""Decide M-bigness of finite subgroups of GL_n(F_q)."""

from bigcheck.bigness import BignessReport, check_m_big
from bigcheck.ff import FieldElement, FieldSpec, make_field
from bigcheck.group import MatrixGroup, adjoin_scalars, close
from bigcheck.matrix import Matrix

__all__ = ["BignessReport", "FieldElement", "FieldSpec", "Matrix", "MatrixGroup",
           "adjoin_scalars", "check_m_big", "close", "make_field"]
__version__ = "0.1.0"
