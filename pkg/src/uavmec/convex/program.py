"""Canonical smooth convex programs built from packed atom banks.

A program is a variable vector with box bounds, an objective and inequality
rows (f_i(z) <= 0) that are sums of atoms, plus linear equalities A z = b.
Atom taxonomy (each convex on its domain, with analytic derivatives):

    affine       b + w.z
    quad         alpha ||M z + c||^2
    normcube     alpha ||M z + c||^3            (2-row map)
    qol          alpha (1 + ||M z + c||^2/g2) / z[t], z[t] > 0
    cube         alpha (w.z + b)^3 on w.z + b >= 0
    neglog       -alpha log(w.z + b), w.z + b > 0
    logsuminv    alpha log(a0 + sum_j c_j / (z_ij + h_j)), z_ij + h_j > 0

Atoms of one kind are packed into flat CSR-style arrays (a "bank") so the
evaluation kernels can run over them without touching Python objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels

OBJECTIVE = -1  # sentinel row id for objective atoms


def _csr(chunks, dtype=np.float64):
    off = np.zeros(len(chunks) + 1, dtype=np.int64)
    for i, c in enumerate(chunks):
        off[i + 1] = off[i] + len(c)
    flat = (np.concatenate(chunks).astype(dtype) if chunks
            else np.zeros(0, dtype=dtype))
    return off, flat


@dataclass
class _Bank:
    """Packed arrays of one atom kind; see the builder for field meaning."""

    kind: str
    row: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    arrays: dict = field(default_factory=dict)

    @property
    def natoms(self) -> int:
        return len(self.row)


class ProgramBuilder:
    """Incrementally assemble a ConvexProgram."""

    def __init__(self):
        self._nvar = 0
        self._names = []
        self._lb = []
        self._ub = []
        self._scale = []
        self._rows = []          # constraint labels
        self._row_scale = []
        self._eq_rows = []       # (idx, w, rhs)
        self._atoms = {k: [] for k in (
            "affine", "quad", "normcube", "qol", "cube", "neglog",
            "logsuminv")}
        self.objective_const = 0.0

    # -- variables ---------------------------------------------------------

    def add_var(self, name: str, size: int, lb=-np.inf, ub=np.inf,
                scale: float = 1.0) -> np.ndarray:
        idx = np.arange(self._nvar, self._nvar + size, dtype=np.int64)
        self._nvar += size
        lb = np.broadcast_to(np.asarray(lb, float), (size,))
        ub = np.broadcast_to(np.asarray(ub, float), (size,))
        for i in range(size):
            self._names.append(f"{name}[{i}]" if size > 1 else name)
            self._lb.append(float(lb[i]))
            self._ub.append(float(ub[i]))
            self._scale.append(float(scale))
        return idx

    # -- rows ----------------------------------------------------------------

    def constraint(self, label: str, scale: float = 1.0) -> int:
        self._rows.append(label)
        self._row_scale.append(float(scale))
        return len(self._rows) - 1

    def equality(self, idx, w, rhs: float) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        w = np.asarray(w, dtype=float)
        if len(idx) == 0:
            raise ValueError("empty equality row")
        self._eq_rows.append((idx, w, float(rhs)))

    # -- atoms ---------------------------------------------------------------

    def affine(self, row: int, idx, w, const: float = 0.0) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        w = np.asarray(w, dtype=float)
        if len(idx) == 0:
            if row == OBJECTIVE:
                self.objective_const += const
                return
            raise ValueError("affine atom needs at least one variable")
        self._atoms["affine"].append((row, idx, w, float(const)))

    def quad(self, row: int, idx, mat, c, alpha: float = 1.0) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        mat = np.atleast_2d(np.asarray(mat, dtype=float))
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if mat.shape != (len(c), len(idx)):
            raise ValueError("quad atom shape mismatch")
        if alpha < 0:
            raise ValueError("quad atom must have nonnegative weight")
        self._atoms["quad"].append((row, idx, mat, c, float(alpha)))

    def normcube(self, row: int, idx, mat, c, alpha: float) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        mat = np.asarray(mat, dtype=float)
        c = np.asarray(c, dtype=float)
        if mat.shape != (2, len(idx)) or c.shape != (2,):
            raise ValueError("normcube atom needs a 2-row map")
        if alpha < 0:
            raise ValueError("normcube atom must have nonnegative weight")
        self._atoms["normcube"].append((row, idx, mat, c, float(alpha)))

    def qol(self, row: int, idx, mat, c, tau_idx: int, alpha: float,
            g2: float) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        mat = np.asarray(mat, dtype=float)
        c = np.asarray(c, dtype=float)
        if mat.shape != (2, len(idx)) or c.shape != (2,):
            raise ValueError("qol atom needs a 2-row map")
        if alpha < 0 or g2 <= 0:
            raise ValueError("qol atom weights out of range")
        self._atoms["qol"].append(
            (row, idx, mat, c, int(tau_idx), float(alpha), float(g2)))

    def cube(self, row: int, idx, w, const: float, alpha: float) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        w = np.asarray(w, dtype=float)
        if alpha < 0:
            raise ValueError("cube atom must have nonnegative weight")
        self._atoms["cube"].append((row, idx, w, float(const), float(alpha)))

    def neglog(self, row: int, idx, w, const: float, alpha: float) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        w = np.asarray(w, dtype=float)
        if alpha < 0:
            raise ValueError("neglog atom must have nonnegative weight")
        self._atoms["neglog"].append((row, idx, w, float(const), float(alpha)))

    def logsuminv(self, row: int, idx, cj, hj, a0: float,
                  alpha: float) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        cj = np.asarray(cj, dtype=float)
        hj = np.asarray(hj, dtype=float)
        if np.any(cj < 0) or a0 <= 0 or alpha < 0:
            raise ValueError("logsuminv atom weights out of range")
        self._atoms["logsuminv"].append(
            (row, idx, cj, hj, float(a0), float(alpha)))

    # -- assembly ------------------------------------------------------------

    def _pack(self) -> dict:
        banks = {}
        ncon = len(self._rows)

        def rows_of(atoms):
            return np.array([ncon if a[0] == OBJECTIVE else a[0]
                             for a in atoms], dtype=np.int64)

        at = self._atoms["affine"]
        off, idx = _csr([a[1] for a in at], np.int64)
        _, w = _csr([a[2] for a in at])
        banks["affine"] = _Bank("affine", rows_of(at), {
            "off": off, "idx": idx, "w": w,
            "const": np.array([a[3] for a in at], dtype=float),
        })

        for kind in ("quad", "normcube", "qol"):
            at = self._atoms[kind]
            off, idx = _csr([a[1] for a in at], np.int64)
            moff, mflat = _csr([a[2].ravel() for a in at])
            mtmoff, mtm = _csr([(a[2].T @ a[2]).ravel() for a in at])
            coff, cflat = _csr([a[3] for a in at])
            arrays = {
                "off": off, "idx": idx, "moff": moff, "mflat": mflat,
                "mtmoff": mtmoff, "mtm": mtm, "coff": coff, "cflat": cflat,
                "mrows": np.array([a[2].shape[0] for a in at], dtype=np.int64),
                "alpha": np.array([a[4] for a in at], dtype=float),
            }
            if kind == "qol":
                arrays["tidx"] = np.array([a[4] for a in at], dtype=np.int64)
                arrays["alpha"] = np.array([a[5] for a in at], dtype=float)
                arrays["g2"] = np.array([a[6] for a in at], dtype=float)
            banks[kind] = _Bank(kind, rows_of(at), arrays)

        for kind in ("cube", "neglog"):
            at = self._atoms[kind]
            off, idx = _csr([a[1] for a in at], np.int64)
            _, w = _csr([a[2] for a in at])
            banks[kind] = _Bank(kind, rows_of(at), {
                "off": off, "idx": idx, "w": w,
                "const": np.array([a[3] for a in at], dtype=float),
                "alpha": np.array([a[4] for a in at], dtype=float),
            })

        at = self._atoms["logsuminv"]
        off, idx = _csr([a[1] for a in at], np.int64)
        _, cj = _csr([a[2] for a in at])
        _, hj = _csr([a[3] for a in at])
        banks["logsuminv"] = _Bank("logsuminv", rows_of(at), {
            "off": off, "idx": idx, "cj": cj, "hj": hj,
            "a0": np.array([a[4] for a in at], dtype=float),
            "alpha": np.array([a[5] for a in at], dtype=float),
        })
        return banks

    def build(self) -> "ConvexProgram":
        n = self._nvar
        ncon = len(self._rows)
        banks = self._pack()

        neq = len(self._eq_rows)
        a_eq = np.zeros((neq, n))
        b_eq = np.zeros(neq)
        for i, (idx, w, rhs) in enumerate(self._eq_rows):
            a_eq[i, idx] += w
            b_eq[i] = rhs

        # Per-row nonzero pattern: union of the member atoms' variables,
        # used by the barrier's rank-one Hessian accumulation.
        per_row = [set() for _ in range(ncon)]
        for kind, atoms in self._atoms.items():
            for a in atoms:
                if a[0] == OBJECTIVE:
                    continue
                per_row[a[0]].update(int(i) for i in a[1])
                if kind == "qol":
                    per_row[a[0]].add(int(a[4]))
        con_off, con_idx = _csr(
            [np.array(sorted(s), dtype=np.int64) for s in per_row], np.int64)

        return ConvexProgram(
            nvar=n,
            ncon=ncon,
            names=list(self._names),
            lb=np.array(self._lb), ub=np.array(self._ub),
            scale=np.array(self._scale),
            row_labels=list(self._rows),
            row_scale=np.array(self._row_scale),
            a_eq=a_eq, b_eq=b_eq,
            banks=banks,
            con_off=con_off, con_idx=con_idx,
            objective_const=self.objective_const,
        )


@dataclass
class ConvexProgram:
    """Immutable packed program; see ProgramBuilder for construction."""

    nvar: int
    ncon: int
    names: list
    lb: np.ndarray
    ub: np.ndarray
    scale: np.ndarray
    row_labels: list
    row_scale: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    banks: dict
    con_off: np.ndarray
    con_idx: np.ndarray
    objective_const: float = 0.0

    # -- evaluation (kernel dispatch) ---------------------------------------

    def row_values(self, z: np.ndarray):
        """(values over rows 0..ncon with objective last, domain_ok)."""
        out = np.zeros(self.ncon + 1)
        bad = 0
        k = kernels
        b = self.banks["affine"]
        if b.natoms:
            bad += k.affine_value(b.arrays["off"], b.arrays["idx"],
                                  b.arrays["w"], b.arrays["const"],
                                  b.row, z, out)
        for kind in ("quad", "normcube"):
            b = self.banks[kind]
            if b.natoms:
                fn = k.quad_value if kind == "quad" else k.normcube_value
                bad += fn(b.arrays["off"], b.arrays["idx"], b.arrays["moff"],
                          b.arrays["mflat"], b.arrays["coff"],
                          b.arrays["cflat"], b.arrays["mrows"],
                          b.arrays["alpha"], b.row, z, out)
        b = self.banks["qol"]
        if b.natoms:
            bad += k.qol_value(b.arrays["off"], b.arrays["idx"],
                               b.arrays["moff"], b.arrays["mflat"],
                               b.arrays["coff"], b.arrays["cflat"],
                               b.arrays["tidx"], b.arrays["alpha"],
                               b.arrays["g2"], b.row, z, out)
        for kind in ("cube", "neglog"):
            b = self.banks[kind]
            if b.natoms:
                fn = k.cube_value if kind == "cube" else k.neglog_value
                bad += fn(b.arrays["off"], b.arrays["idx"], b.arrays["w"],
                          b.arrays["const"], b.arrays["alpha"], b.row, z, out)
        b = self.banks["logsuminv"]
        if b.natoms:
            bad += k.logsuminv_value(b.arrays["off"], b.arrays["idx"],
                                     b.arrays["cj"], b.arrays["hj"],
                                     b.arrays["a0"], b.arrays["alpha"],
                                     b.row, z, out)
        return out, bad == 0

    def row_gradients(self, z: np.ndarray, gc: np.ndarray) -> None:
        """Accumulate per-row gradients into gc, shape (ncon + 1, nvar)."""
        k = kernels
        b = self.banks["affine"]
        if b.natoms:
            k.affine_grad(b.arrays["off"], b.arrays["idx"], b.arrays["w"],
                          b.row, z, gc)
        for kind in ("quad", "normcube"):
            b = self.banks[kind]
            if b.natoms:
                fn = k.quad_grad if kind == "quad" else k.normcube_grad
                fn(b.arrays["off"], b.arrays["idx"], b.arrays["moff"],
                   b.arrays["mflat"], b.arrays["coff"], b.arrays["cflat"],
                   b.arrays["mrows"], b.arrays["alpha"], b.row, z, gc)
        b = self.banks["qol"]
        if b.natoms:
            k.qol_grad(b.arrays["off"], b.arrays["idx"], b.arrays["moff"],
                       b.arrays["mflat"], b.arrays["coff"], b.arrays["cflat"],
                       b.arrays["tidx"], b.arrays["alpha"], b.arrays["g2"],
                       b.row, z, gc)
        for kind in ("cube", "neglog"):
            b = self.banks[kind]
            if b.natoms:
                fn = k.cube_grad if kind == "cube" else k.neglog_grad
                fn(b.arrays["off"], b.arrays["idx"], b.arrays["w"],
                   b.arrays["const"], b.arrays["alpha"], b.row, z, gc)
        b = self.banks["logsuminv"]
        if b.natoms:
            k.logsuminv_grad(b.arrays["off"], b.arrays["idx"],
                             b.arrays["cj"], b.arrays["hj"], b.arrays["a0"],
                             b.arrays["alpha"], b.row, z, gc)

    def weighted_hessian(self, z: np.ndarray, roww: np.ndarray,
                         h_out: np.ndarray) -> None:
        """Accumulate sum_r roww[r] * hess(row r atoms) into h_out."""
        k = kernels
        b = self.banks["quad"]
        if b.natoms:
            k.quad_hess(b.arrays["off"], b.arrays["idx"], b.arrays["mtmoff"],
                        b.arrays["mtm"], b.arrays["alpha"], b.row, roww, h_out)
        b = self.banks["normcube"]
        if b.natoms:
            k.normcube_hess(b.arrays["off"], b.arrays["idx"],
                            b.arrays["moff"], b.arrays["mflat"],
                            b.arrays["mtmoff"], b.arrays["mtm"],
                            b.arrays["coff"], b.arrays["cflat"],
                            b.arrays["alpha"], b.row, roww, z, h_out)
        b = self.banks["qol"]
        if b.natoms:
            k.qol_hess(b.arrays["off"], b.arrays["idx"], b.arrays["moff"],
                       b.arrays["mflat"], b.arrays["mtmoff"], b.arrays["mtm"],
                       b.arrays["coff"], b.arrays["cflat"], b.arrays["tidx"],
                       b.arrays["alpha"], b.arrays["g2"], b.row, roww, z,
                       h_out)
        for kind in ("cube", "neglog"):
            b = self.banks[kind]
            if b.natoms:
                fn = k.cube_hess if kind == "cube" else k.neglog_hess
                fn(b.arrays["off"], b.arrays["idx"], b.arrays["w"],
                   b.arrays["const"], b.arrays["alpha"], b.row, roww, z,
                   h_out)
        b = self.banks["logsuminv"]
        if b.natoms:
            k.logsuminv_hess(b.arrays["off"], b.arrays["idx"],
                             b.arrays["cj"], b.arrays["hj"], b.arrays["a0"],
                             b.arrays["alpha"], b.row, roww, z, h_out)

    def rank_one_hessian(self, gc: np.ndarray, w2: np.ndarray,
                         h_out: np.ndarray) -> None:
        kernels.rank1_hess(gc, w2, self.con_off, self.con_idx, h_out)

    # -- convenience ---------------------------------------------------------

    def objective(self, z: np.ndarray) -> float:
        vals, ok = self.row_values(z)
        if not ok:
            return np.inf
        return vals[self.ncon] + self.objective_const

    def constraints(self, z: np.ndarray) -> np.ndarray:
        vals, ok = self.row_values(z)
        if not ok:
            raise FloatingPointError("point outside atom domains")
        return vals[: self.ncon]

    def in_domain(self, z: np.ndarray) -> bool:
        _, ok = self.row_values(z)
        return bool(ok)

    def natoms(self) -> int:
        return sum(b.natoms for b in self.banks.values())

    def describe(self) -> str:
        """Plain-text dump for offline inspection (not load-bearing)."""
        lines = [f"variables: {self.nvar}", f"constraints: {self.ncon}",
                 f"equalities: {len(self.b_eq)}"]
        for kind, bank in self.banks.items():
            lines.append(f"atoms[{kind}]: {bank.natoms}")
        finite_lb = np.isfinite(self.lb).sum()
        finite_ub = np.isfinite(self.ub).sum()
        lines.append(f"finite bounds: {finite_lb} lower, {finite_ub} upper")
        for i, name in enumerate(self.names):
            lines.append(
                f"  z[{i}] {name} in [{self.lb[i]:g}, {self.ub[i]:g}] "
                f"scale {self.scale[i]:g}")
        for i, lab in enumerate(self.row_labels):
            lines.append(f"  row[{i}] {lab} scale {self.row_scale[i]:g}")
        return "\n".join(lines)

    # -- phase I -------------------------------------------------------------

    def with_slack(self):
        """Augmented program min s with every row relaxed to f_i - s <= 0.

        Returns (program, slack_index).  The original objective atoms are
        dropped.  Used by the solver's phase I.
        """
        import copy
        aug = copy.copy(self)
        s_idx = self.nvar
        aug.nvar = self.nvar + 1
        aug.names = self.names + ["phase1_slack"]
        aug.lb = np.append(self.lb, -10.0)
        aug.ub = np.append(self.ub, np.inf)
        aug.scale = np.append(self.scale, 1.0)
        aug.a_eq = np.hstack([self.a_eq, np.zeros((len(self.b_eq), 1))])
        banks = {k: _filter_bank(b, b.row != self.ncon)
                 for k, b in self.banks.items()}
        # one affine atom -s per constraint row, plus objective = s
        bank = banks["affine"]
        extra = self.ncon + 1
        bank.row = np.concatenate([
            bank.row, np.arange(self.ncon, dtype=np.int64),
            np.array([self.ncon], dtype=np.int64)])
        old_nnz = bank.arrays["off"][-1]
        bank.arrays["off"] = np.concatenate([
            bank.arrays["off"],
            old_nnz + 1 + np.arange(extra, dtype=np.int64)])
        bank.arrays["idx"] = np.concatenate([
            bank.arrays["idx"], np.full(extra, s_idx, dtype=np.int64)])
        bank.arrays["w"] = np.concatenate([
            bank.arrays["w"], np.full(self.ncon, -1.0), np.array([1.0])])
        bank.arrays["const"] = np.concatenate([
            bank.arrays["const"], np.zeros(extra)])
        aug.banks = banks
        aug.objective_const = 0.0
        # the slack enters every row's nonzero pattern
        chunks = [np.append(self.con_idx[self.con_off[i]:self.con_off[i + 1]],
                            s_idx) for i in range(self.ncon)]
        aug.con_off, aug.con_idx = _csr(chunks, np.int64)
        return aug, s_idx


_BANK_CSR_GROUPS = {
    "affine": [("off", ("idx", "w"))],
    "quad": [("off", ("idx",)), ("moff", ("mflat",)),
             ("mtmoff", ("mtm",)), ("coff", ("cflat",))],
    "normcube": [("off", ("idx",)), ("moff", ("mflat",)),
                 ("mtmoff", ("mtm",)), ("coff", ("cflat",))],
    "qol": [("off", ("idx",)), ("moff", ("mflat",)),
            ("mtmoff", ("mtm",)), ("coff", ("cflat",))],
    "cube": [("off", ("idx", "w"))],
    "neglog": [("off", ("idx", "w"))],
    "logsuminv": [("off", ("idx", "cj", "hj"))],
}


def _filter_bank(bank: _Bank, keep: np.ndarray) -> _Bank:
    """Copy of a bank with only the atoms where ``keep`` is true."""
    groups = _BANK_CSR_GROUPS[bank.kind]
    offset_names = {off for off, _ in groups}
    arrays = {}
    for off_name, flat_names in groups:
        off = bank.arrays[off_name]
        lengths = np.diff(off)[keep]
        new_off = np.zeros(len(lengths) + 1, dtype=np.int64)
        np.cumsum(lengths, out=new_off[1:])
        arrays[off_name] = new_off
        sel = np.concatenate(
            [np.arange(off[i], off[i + 1]) for i in range(len(keep))
             if keep[i]]) if keep.any() else np.zeros(0, dtype=np.int64)
        for name in flat_names:
            arrays[name] = bank.arrays[name][sel]
    for name, arr in bank.arrays.items():
        if name not in arrays and name not in offset_names:
            arrays[name] = arr[keep]
    return _Bank(bank.kind, bank.row[keep], arrays)


def _atom_eval_points(program: ConvexProgram):
    """(value_fn, grad_fn, idx) per atom, python-path, for derivative checks."""
    out = []
    for kind, bank in program.banks.items():
        for i in range(bank.natoms):
            out.append(_single_atom(kind, bank, i))
    return out


def _single_atom(kind: str, bank: _Bank, i: int):
    a = bank.arrays
    idx = a["off"][i], a["off"][i + 1]
    sub = a["idx"][idx[0]:idx[1]].copy()
    d = len(sub)
    if kind == "affine":
        w = a["w"][idx[0]:idx[1]].copy()
        const = a["const"][i]
        return (lambda zs: const + w @ zs, lambda zs: w.copy(), sub, kind)
    if kind in ("quad", "normcube"):
        m = int(a["mrows"][i]) if kind == "quad" else 2
        mat = a["mflat"][a["moff"][i]:a["moff"][i + 1]].reshape(m, d)
        c = a["cflat"][a["coff"][i]:a["coff"][i + 1]]
        alpha = a["alpha"][i]
        if kind == "quad":
            return (lambda zs: alpha * np.sum((mat @ zs + c) ** 2),
                    lambda zs: 2 * alpha * mat.T @ (mat @ zs + c), sub, kind)

        def nc_val(zs):
            return alpha * np.linalg.norm(mat @ zs + c) ** 3

        def nc_grad(zs):
            u = mat @ zs + c
            return 3 * alpha * np.linalg.norm(u) * (mat.T @ u)
        return (nc_val, nc_grad, sub, kind)
    if kind == "qol":
        mat = a["mflat"][a["moff"][i]:a["moff"][i + 1]].reshape(2, d)
        c = a["cflat"][a["coff"][i]:a["coff"][i + 1]]
        alpha, g2, tidx = a["alpha"][i], a["g2"][i], int(a["tidx"][i])
        sub_t = np.append(sub, tidx)

        def q_val(zs):
            u = mat @ zs[:-1] + c
            return alpha * (1 + u @ u / g2) / zs[-1]

        def q_grad(zs):
            u = mat @ zs[:-1] + c
            g = np.zeros(d + 1)
            g[:-1] = 2 * alpha / (g2 * zs[-1]) * (mat.T @ u)
            g[-1] = -alpha * (1 + u @ u / g2) / zs[-1] ** 2
            return g
        return (q_val, q_grad, sub_t, kind)
    if kind in ("cube", "neglog"):
        w = a["w"][idx[0]:idx[1]].copy()
        const, alpha = a["const"][i], a["alpha"][i]
        if kind == "cube":
            return (lambda zs: alpha * (w @ zs + const) ** 3,
                    lambda zs: 3 * alpha * (w @ zs + const) ** 2 * w,
                    sub, kind)
        return (lambda zs: -alpha * np.log(w @ zs + const),
                lambda zs: -alpha * w / (w @ zs + const), sub, kind)
    if kind == "logsuminv":
        cj = a["cj"][idx[0]:idx[1]].copy()
        hj = a["hj"][idx[0]:idx[1]].copy()
        a0, alpha = a["a0"][i], a["alpha"][i]

        def ls_val(zs):
            return alpha * np.log(a0 + np.sum(cj / (zs + hj)))

        def ls_grad(zs):
            s = a0 + np.sum(cj / (zs + hj))
            return alpha * (-cj / (zs + hj) ** 2) / s
        return (ls_val, ls_grad, sub, kind)
    raise ValueError(kind)


def check_derivatives(program: ConvexProgram, point: np.ndarray,
                      step: float = 1e-6) -> float:
    """Worst relative error of analytic atom gradients vs central differences.

    The point must lie strictly inside every atom domain.
    """
    if not program.in_domain(point):
        raise ValueError("point outside atom domains")
    worst = 0.0
    for val_fn, grad_fn, sub, _kind in _atom_eval_points(program):
        zs = point[sub].astype(float)
        analytic = grad_fn(zs)
        fd = np.zeros_like(analytic)
        for j in range(len(zs)):
            h = step * max(1.0, abs(zs[j]))
            zp, zm = zs.copy(), zs.copy()
            zp[j] += h
            zm[j] -= h
            fd[j] = (val_fn(zp) - val_fn(zm)) / (2 * h)
        denom = max(np.linalg.norm(analytic), 1e-8)
        worst = max(worst, float(np.linalg.norm(analytic - fd) / denom))
    return worst
