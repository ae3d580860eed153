"""
SOS 证书模块
Sum-of-squares certification

把 SOS、SOS-matrix、SOS-convex 判定化为 Gram 矩阵半定可行性问题，返回显式证书。
"""

from .gram import GramLink, gram_links, links_for_basis, attach_targets, gram_polynomial, polish_gram, link_residual, prune_basis
from .certify import (
    CertConfig,
    SosCertificate,
    SosVerdict,
    certify_gram,
    is_sos,
    is_sos_matrix,
    is_sos_convex,
    scalarize,
)

__all__ = [
    "GramLink",
    "gram_links",
    "links_for_basis",
    "attach_targets",
    "gram_polynomial",
    "polish_gram",
    "link_residual",
    "prune_basis",
    "CertConfig",
    "SosCertificate",
    "SosVerdict",
    "certify_gram",
    "is_sos",
    "is_sos_matrix",
    "is_sos_convex",
    "scalarize",
]
