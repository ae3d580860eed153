"""
锥规划文本转储
Sparse text dump of a conic program

格式（下标从 0 开始，PSD 块只写上三角）::

    # <name>
    blocks psd <s1> <s2> ... nonneg <l> free <f>
    rows <m>
    <row> <block> <i> <j> <value>      block 为 psd0, psd1, ..., nonneg, free
    rhs <row> <value>
    obj <block> <i> <j> <value>        目标为最大化

非负块与自由块的 i = j = 变量下标。值用 repr 输出，可精确回读。
"""

from __future__ import annotations
from pathlib import Path
from typing import Dict, List, TextIO, Tuple, Union

import numpy as np

from ..exceptions import InputError
from .program import ConicProgram, ProgramBuilder


def _block_entries(prog: ConicProgram):
    for k, Ak in enumerate(prog.a_psd):
        s = prog.psd_blocks[k]
        iu, ju = np.triu_indices(s)
        yield f"psd{k}", Ak[:, iu, ju], iu, ju
    idx = np.arange(prog.nonneg_dim)
    yield "nonneg", prog.a_nonneg, idx, idx
    idx = np.arange(prog.free_dim)
    yield "free", prog.a_free, idx, idx


def write_program(prog: ConicProgram, out: TextIO) -> None:
    out.write(f"# {prog.name or 'conic program'}\n")
    out.write(
        "blocks psd " + " ".join(str(s) for s in prog.psd_blocks)
        + f" nonneg {prog.nonneg_dim} free {prog.free_dim}\n"
    )
    out.write(f"rows {prog.num_rows}\n")
    for name, coef, iu, ju in _block_entries(prog):
        rows, cols = np.nonzero(coef)
        for r, t in zip(rows, cols):
            out.write(f"{r} {name} {iu[t]} {ju[t]} {float(coef[r, t])!r}\n")
    for r, v in enumerate(prog.b):
        if v != 0.0:
            out.write(f"rhs {r} {float(v)!r}\n")
    for k, Ck in enumerate(prog.c_psd):
        for i, j in zip(*np.nonzero(np.triu(Ck))):
            out.write(f"obj psd{k} {i} {j} {float(Ck[i, j])!r}\n")
    for name, vec in (("nonneg", prog.c_nonneg), ("free", prog.c_free)):
        for i in np.flatnonzero(vec):
            out.write(f"obj {name} {i} {i} {float(vec[i])!r}\n")


def dump_program(prog: ConicProgram, path: Union[str, Path]) -> Path:
    p = Path(path)
    with p.open("w", encoding="utf-8") as fh:
        write_program(prog, fh)
    return p


def load_program(path: Union[str, Path]) -> ConicProgram:
    """读回 dump_program 写出的文件"""
    lines = [ln.split() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    try:
        head = lines[0]
        k_nn = head.index("nonneg")
        sizes = [int(t) for t in head[2:k_nn]]
        builder = ProgramBuilder(sizes, int(head[k_nn + 1]), int(head[k_nn + 3]))
        m = int(lines[1][1])
        rows: List[Tuple[Dict, Dict, Dict]] = [({}, {}, {}) for _ in range(m)]
        rhs = np.zeros(m)
        obj: Tuple[Dict, Dict, Dict] = ({}, {}, {})
        for ln in lines[2:]:
            if ln[0] == "rhs":
                rhs[int(ln[1])] = float(ln[2])
                continue
            target = obj if ln[0] == "obj" else rows[int(ln[0])]
            block, i, j, v = ln[1], int(ln[2]), int(ln[3]), float(ln[4])
            if block.startswith("psd"):
                target[0].setdefault(int(block[3:]), {})[(i, j)] = v
            elif block == "nonneg":
                target[1][i] = v
            elif block == "free":
                target[2][i] = v
            else:
                raise InputError(f"unknown block {block!r}")
    except (IndexError, ValueError) as e:
        raise InputError(f"malformed program dump: {e}", str(path)) from e
    for r, (psd, nonneg, free) in enumerate(rows):
        builder.add_row(rhs[r], psd=psd, nonneg=nonneg, free=free)
    builder.set_objective(psd=obj[0], nonneg=obj[1], free=obj[2])
    return builder.build()
