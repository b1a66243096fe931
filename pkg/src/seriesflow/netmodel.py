"""Network data model: case parsing, admittance assembly, bus partitioning.

Case files use a restricted MATPOWER-style text format: a ``baseMVA``
scalar plus ``bus``, ``gen`` and ``branch`` matrices. Column meanings:

* bus:    id, type (1=PQ, 2=PV, 3=REF), Pd, Qd, Gs, Bs, Vm, Va(deg)
* gen:    bus, Pg, Vg, status
* branch: from, to, r, x, b, ratio, angle(deg), status

Unrecognized trailing columns are ignored. Power columns are MW/MVAr and
are normalized to per-unit on baseMVA at parse time; branch impedances are
already per-unit. Sign convention: injections are generation-positive, so
loads are stored as negative injections and direction entries (dp, dq)
are injection increments per unit of the loading parameter.

The sidecar is a JSON document with two optional keys::

    {"zip": [{"bus": 3, "az": .., "ai": .., "ap": ..,
              "bz": .., "bi": .., "bp": ..,
              "z_re": .., "z_im": .., "i_re": .., "i_im": ..}, ...],
     "direction": [{"bus": 3, "dp": .., "dq": ..}, ...]}

PQ buses absent from ``zip`` default to pure constant power; buses absent
from ``direction`` default to dp = dq = 0.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property

import numpy as np

from .errors import CaseSemanticError, CaseSyntaxError, DegenerateBranchError

ZIP_FRACTION_TOL = 1e-12


class BusKind(IntEnum):
    PQ = 0
    PV = 1
    REF = 2


_KIND_OF_CODE = {1: BusKind.PQ, 2: BusKind.PV, 3: BusKind.REF}
_CODE_OF_KIND = {v: k for k, v in _KIND_OF_CODE.items()}


@dataclass(frozen=True)
class BusRecord:
    """One bus row. p_sp/q_sp hold the bus-level injection excluding
    generators, i.e. the load with its sign flipped (per-unit)."""

    bus_id: int
    kind: BusKind
    p_sp: float
    q_sp: float
    gs: float
    bs: float
    vm: float
    va_deg: float


@dataclass(frozen=True)
class BranchRecord:
    from_bus: int
    to_bus: int
    r: float
    x: float
    charging_b: float
    tap: float
    shift_deg: float
    status: int


@dataclass(frozen=True)
class GenRecord:
    bus: int
    p_sp: float
    v_sp: float
    status: int


@dataclass(frozen=True)
class CaseData:
    name: str
    base_mva: float
    buses: tuple[BusRecord, ...]
    branches: tuple[BranchRecord, ...]
    gens: tuple[GenRecord, ...]

    @cached_property
    def bus_position(self) -> dict[int, int]:
        """Bus id -> declaration index."""
        return {b.bus_id: i for i, b in enumerate(self.buses)}

    @property
    def n_bus(self) -> int:
        return len(self.buses)


@dataclass(frozen=True)
class BusOrdering:
    """Permutation from declaration order to internal solver order:
    PQ buses first, then PV, reference bus last."""

    external_ids: tuple[int, ...]  # internal index -> bus id
    perm: tuple[int, ...]          # internal index -> declaration index
    n_pq: int

    @cached_property
    def internal_index(self) -> dict[int, int]:
        return {bid: i for i, bid in enumerate(self.external_ids)}

    @property
    def n_bus(self) -> int:
        return len(self.external_ids)

    def to_internal_bus(self, values: np.ndarray) -> np.ndarray:
        """Reorder a per-bus vector from declaration order to internal order."""
        values = np.asarray(values)
        return values[list(self.perm)]

    def to_external_bus(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        out = np.empty_like(values)
        out[list(self.perm)] = values
        return out

    def to_internal_state(self, values: np.ndarray) -> np.ndarray:
        """Reorder an interleaved (e_i, f_i) state vector to internal order."""
        values = np.asarray(values)
        out = np.empty_like(values)
        for internal, decl in enumerate(self.perm):
            out[2 * internal] = values[2 * decl]
            out[2 * internal + 1] = values[2 * decl + 1]
        return out

    def to_external_state(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        out = np.empty_like(values)
        for internal, decl in enumerate(self.perm):
            out[2 * decl] = values[2 * internal]
            out[2 * decl + 1] = values[2 * internal + 1]
        return out


@dataclass(frozen=True)
class ZipEntry:
    """ZIP composition for one PQ bus: active fractions (az, ai, ap),
    reactive fractions (bz, bi, bp), and the specified phasors."""

    az: float
    ai: float
    ap: float
    bz: float
    bi: float
    bp: float
    z_sp: complex
    i_sp: complex
    s_sp: complex

    @staticmethod
    def constant_power(s_sp: complex) -> "ZipEntry":
        return ZipEntry(0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0j, 0j, s_sp)


@dataclass(frozen=True)
class ZipConfig:
    """ZIP entries keyed by bus id; exactly the PQ buses of the case."""

    entries: dict[int, ZipEntry] = field(default_factory=dict)

    @staticmethod
    def constant_power(case: CaseData) -> "ZipConfig":
        p_net, q_net = net_injections(case)
        entries = {
            b.bus_id: ZipEntry.constant_power(complex(p_net[i], q_net[i]))
            for i, b in enumerate(case.buses)
            if b.kind is BusKind.PQ
        }
        return ZipConfig(entries=entries)

    def is_constant_power(self) -> bool:
        return all(e.ap == 1.0 and e.bp == 1.0 for e in self.entries.values())


@dataclass(frozen=True)
class DirectionVector:
    """Injection increments per unit of the loading parameter, keyed by
    bus id. Entries at the reference bus never enter the equations."""

    dp: dict[int, float] = field(default_factory=dict)
    dq: dict[int, float] = field(default_factory=dict)

    @staticmethod
    def zeros() -> "DirectionVector":
        return DirectionVector()

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.dp.values()) and all(
            v == 0.0 for v in self.dq.values()
        )


@dataclass(frozen=True)
class Specified:
    """Set-point arrays in internal bus order. v_sp is NaN for PQ buses
    (no magnitude set-point exists there)."""

    p_sp: np.ndarray
    q_sp: np.ndarray
    v_sp: np.ndarray
    e_sp: float
    f_sp: float


@dataclass
class Network:
    """Everything the solvers need, with buses in internal order
    (PQ block, PV block, reference last). Treated as immutable."""

    ordering: BusOrdering
    kinds: np.ndarray          # BusKind values, internal order
    ybus: np.ndarray           # complex (N, N), internal order
    p_sp: np.ndarray
    q_sp: np.ndarray
    v_sp: np.ndarray
    e_sp: float
    f_sp: float
    dp: np.ndarray
    dq: np.ndarray
    zip_az: np.ndarray
    zip_ai: np.ndarray
    zip_ap: np.ndarray
    zip_bz: np.ndarray
    zip_bi: np.ndarray
    zip_bp: np.ndarray
    zip_z: np.ndarray          # complex impedance phasors
    zip_i: np.ndarray          # complex current phasors
    base_mva: float = 1.0
    name: str = ""

    def __post_init__(self) -> None:
        self.g = np.ascontiguousarray(self.ybus.real)
        self.b = np.ascontiguousarray(self.ybus.imag)
        # Re(z)/|z|^2 and Im(z)/|z|^2, zero where no impedance component
        # exists (validation guarantees |z| > 0 whenever az or bz != 0).
        mag2 = self.zip_z.real**2 + self.zip_z.imag**2
        safe = np.where(mag2 > 0.0, mag2, 1.0)
        self.zfac_re = np.where(mag2 > 0.0, self.zip_z.real / safe, 0.0)
        self.zfac_im = np.where(mag2 > 0.0, self.zip_z.imag / safe, 0.0)

    @property
    def n_bus(self) -> int:
        return len(self.kinds)

    @property
    def n_pq(self) -> int:
        return self.ordering.n_pq

    @property
    def n_state(self) -> int:
        return 2 * self.n_bus

    @property
    def slack(self) -> int:
        return self.n_bus - 1

    def kind_of(self, i: int) -> BusKind:
        return BusKind(int(self.kinds[i]))


# ---------------------------------------------------------------------------
# case-file parsing

_ASSIGN_RE = re.compile(r"^\s*(?:mpc\.)?(\w+)\s*=\s*(.*)$")


def _strip_comment(line: str) -> str:
    pos = line.find("%")
    return line if pos < 0 else line[:pos]


def _parse_numbers(line: str, lineno: int) -> list[list[float]]:
    """Split one matrix line into rows of floats (';' separates rows)."""
    rows: list[list[float]] = []
    current: list[float] = []
    col = 1
    for tok in re.finditer(r"[^\s;]+|;", line):
        text = tok.group(0)
        col = tok.start() + 1
        if text == ";":
            if current:
                rows.append(current)
                current = []
            continue
        try:
            current.append(float(text))
        except ValueError:
            raise CaseSyntaxError(
                f"expected number, found {text!r}", line=lineno, col=col
            ) from None
    if current:
        rows.append(current)
    return rows


def _scan_case(text: str) -> tuple[str, dict[str, object]]:
    """Collect the baseMVA scalar and the bus/gen/branch matrices."""
    name = ""
    sections: dict[str, object] = {}
    matrix_name: str | None = None
    matrix_rows: list[list[float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue

        if matrix_name is not None:
            body = line
            closed = False
            if "]" in body:
                body, _, _ = body.partition("]")
                closed = True
            matrix_rows.extend(_parse_numbers(body, lineno))
            if closed:
                sections[matrix_name] = matrix_rows
                matrix_name, matrix_rows = None, []
            continue

        if line.lstrip().startswith("function"):
            m = re.search(r"=\s*(\w+)", line)
            name = m.group(1) if m else ""
            continue

        m = _ASSIGN_RE.match(line)
        if m is None:
            raise CaseSyntaxError(
                f"expected assignment or matrix row, found {line.strip()!r}",
                line=lineno,
                col=1,
            )
        key, value = m.group(1), m.group(2).strip()
        if value.startswith("["):
            body = value[1:]
            if "]" in body:
                body, _, _ = body.partition("]")
                sections[key] = _parse_numbers(body, lineno)
            else:
                matrix_name = key
                matrix_rows = _parse_numbers(body, lineno)
            continue
        if value.startswith("'") or value.startswith('"'):
            continue  # string metadata such as a version tag
        value = value.rstrip(";").strip()
        try:
            sections[key] = float(value)
        except ValueError:
            raise CaseSyntaxError(
                f"expected number, found {value!r}", line=lineno, col=len(line) - len(value) + 1
            ) from None

    if matrix_name is not None:
        raise CaseSyntaxError(f"matrix {matrix_name!r} not closed with ']'", line=lineno)
    return name, sections


def _require_columns(rows: list[list[float]], n: int, section: str) -> None:
    for row in rows:
        if len(row) < n:
            raise CaseSyntaxError(
                f"{section} row has {len(row)} columns, expected at least {n}"
            )


def parse_case(text: str) -> CaseData:
    """Parse restricted MATPOWER-style case text into per-unit CaseData."""
    name, sections = _scan_case(text)

    for required in ("baseMVA", "bus", "branch"):
        if required not in sections:
            raise CaseSyntaxError(f"missing required section {required!r}")
    base = sections["baseMVA"]
    if not isinstance(base, float):
        raise CaseSyntaxError("baseMVA must be a scalar")
    if base <= 0:
        raise CaseSemanticError(f"baseMVA must be positive, got {base}")

    bus_rows = sections["bus"]
    gen_rows = sections.get("gen", [])
    branch_rows = sections["branch"]
    _require_columns(bus_rows, 8, "bus")
    _require_columns(gen_rows, 4, "gen")
    _require_columns(branch_rows, 8, "branch")

    buses = []
    seen: set[int] = set()
    for row in bus_rows:
        bus_id = int(row[0])
        code = int(row[1])
        if row[1] != code or code not in _KIND_OF_CODE:
            raise CaseSemanticError(f"bus {bus_id}: kind code {row[1]} not in {{1,2,3}}")
        if bus_id in seen:
            raise CaseSemanticError(f"duplicate bus id {bus_id}")
        seen.add(bus_id)
        buses.append(
            BusRecord(
                bus_id=bus_id,
                kind=_KIND_OF_CODE[code],
                p_sp=-row[2] / base,
                q_sp=-row[3] / base,
                gs=row[4] / base,
                bs=row[5] / base,
                vm=row[6],
                va_deg=row[7],
            )
        )
    refs = [b.bus_id for b in buses if b.kind is BusKind.REF]
    if len(refs) != 1:
        raise CaseSemanticError(
            f"expected exactly one reference bus, found {len(refs)} ({refs})"
        )

    gens = []
    for row in gen_rows:
        bus_id = int(row[0])
        if bus_id not in seen:
            raise CaseSemanticError(f"generator at unknown bus {bus_id}")
        gens.append(
            GenRecord(bus=bus_id, p_sp=row[1] / base, v_sp=row[2], status=int(row[3]))
        )

    branches = []
    for row in branch_rows:
        fb, tb = int(row[0]), int(row[1])
        if fb not in seen or tb not in seen:
            missing = fb if fb not in seen else tb
            raise CaseSemanticError(f"branch {fb}-{tb} references unknown bus {missing}")
        ratio = row[5]
        if ratio < 0:
            raise CaseSemanticError(f"branch {fb}-{tb}: negative tap ratio {ratio}")
        status = int(row[7])
        if status not in (0, 1):
            raise CaseSemanticError(f"branch {fb}-{tb}: status must be 0 or 1, got {row[7]}")
        branches.append(
            BranchRecord(
                from_bus=fb,
                to_bus=tb,
                r=row[2],
                x=row[3],
                charging_b=row[4],
                tap=ratio if ratio != 0 else 1.0,
                shift_deg=row[6],
                status=status,
            )
        )

    return CaseData(
        name=name,
        base_mva=base,
        buses=tuple(buses),
        branches=tuple(branches),
        gens=tuple(gens),
    )


def serialize_case(case: CaseData) -> str:
    """Emit case text that parses back to an identical CaseData."""
    base = case.base_mva
    lines = []
    if case.name:
        lines.append(f"function mpc = {case.name}")
    lines.append(f"mpc.baseMVA = {base!r};")
    lines.append("mpc.bus = [")
    for b in case.buses:
        lines.append(
            f"  {b.bus_id}  {_CODE_OF_KIND[b.kind]}  {-b.p_sp * base!r}  {-b.q_sp * base!r}"
            f"  {b.gs * base!r}  {b.bs * base!r}  {b.vm!r}  {b.va_deg!r};"
        )
    lines.append("];")
    lines.append("mpc.gen = [")
    for g in case.gens:
        lines.append(f"  {g.bus}  {g.p_sp * base!r}  {g.v_sp!r}  {g.status};")
    lines.append("];")
    lines.append("mpc.branch = [")
    for br in case.branches:
        lines.append(
            f"  {br.from_bus}  {br.to_bus}  {br.r!r}  {br.x!r}  {br.charging_b!r}"
            f"  {br.tap!r}  {br.shift_deg!r}  {br.status};"
        )
    lines.append("];")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# derived quantities

def net_injections(case: CaseData) -> tuple[np.ndarray, np.ndarray]:
    """Net per-unit injections (generation minus load) in declaration order."""
    n = case.n_bus
    p = np.array([b.p_sp for b in case.buses], dtype=float)
    q = np.array([b.q_sp for b in case.buses], dtype=float)
    for g in case.gens:
        if g.status:
            p[case.bus_position[g.bus]] += g.p_sp
    return p, q


def build_ybus(case: CaseData) -> np.ndarray:
    """Dense bus admittance matrix in declaration order.

    Standard pi model per branch: series admittance 1/(r + jx), half the
    charging susceptance at each terminal, off-nominal tap and phase shift
    applied on the from side; bus shunts land on the diagonal.
    """
    n = case.n_bus
    ybus = np.zeros((n, n), dtype=complex)
    pos = case.bus_position
    for br in case.branches:
        if not br.status:
            continue
        if br.r == 0.0 and br.x == 0.0:
            raise DegenerateBranchError(
                f"branch {br.from_bus}-{br.to_bus} has zero series impedance"
            )
        ys = 1.0 / complex(br.r, br.x)
        ytt = ys + 0.5j * br.charging_b
        tap = br.tap * np.exp(1j * math.radians(br.shift_deg))
        f, t = pos[br.from_bus], pos[br.to_bus]
        ybus[f, f] += ytt / (br.tap * br.tap)
        ybus[f, t] += -ys / np.conj(tap)
        ybus[t, f] += -ys / tap
        ybus[t, t] += ytt
    for i, b in enumerate(case.buses):
        ybus[i, i] += complex(b.gs, b.bs)
    return ybus


def partition_and_specify(case: CaseData) -> tuple[BusOrdering, Specified]:
    """Order buses (PQ, PV, REF) and collect the specified set-points.

    Voltage set-points for PV/REF buses come from the first in-service
    generator at the bus when one exists, otherwise from the bus Vm column.
    """
    order = sorted(range(case.n_bus), key=lambda i: (int(case.buses[i].kind), i))
    perm = tuple(order)
    external_ids = tuple(case.buses[i].bus_id for i in order)
    n_pq = sum(1 for b in case.buses if b.kind is BusKind.PQ)
    ordering = BusOrdering(external_ids=external_ids, perm=perm, n_pq=n_pq)

    gen_v: dict[int, float] = {}
    for g in case.gens:
        if g.status and g.bus not in gen_v:
            gen_v[g.bus] = g.v_sp

    p_decl, q_decl = net_injections(case)
    p_sp = ordering.to_internal_bus(p_decl)
    q_sp = ordering.to_internal_bus(q_decl)
    v_sp = np.full(case.n_bus, np.nan)
    e_sp = f_sp = 0.0
    for internal, decl in enumerate(perm):
        bus = case.buses[decl]
        if bus.kind is BusKind.PQ:
            continue
        v = gen_v.get(bus.bus_id, bus.vm)
        v_sp[internal] = v
        if bus.kind is BusKind.REF:
            theta = math.radians(bus.va_deg)
            e_sp = v * math.cos(theta)
            f_sp = v * math.sin(theta)
    return ordering, Specified(p_sp=p_sp, q_sp=q_sp, v_sp=v_sp, e_sp=e_sp, f_sp=f_sp)


# ---------------------------------------------------------------------------
# sidecar parsing

def _check_fraction_sum(total: float, bus_id: int, label: str) -> None:
    if abs(total - 1.0) > ZIP_FRACTION_TOL:
        raise CaseSemanticError(
            f"ZIP entry at bus {bus_id}: {label} fractions sum to {total!r}, expected 1"
        )


def parse_sidecar(text: str, case: CaseData) -> tuple[ZipConfig, DirectionVector]:
    """Parse the JSON sidecar against a case.

    PQ buses without a ZIP entry default to pure constant power; buses
    without a direction entry default to dp = dq = 0.
    """
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise CaseSyntaxError(exc.msg, line=exc.lineno, col=exc.colno) from None
    if not isinstance(doc, dict):
        raise CaseSyntaxError("sidecar must be a JSON object")
    unknown = set(doc) - {"zip", "direction"}
    if unknown:
        raise CaseSemanticError(f"unknown sidecar keys: {sorted(unknown)}")

    kinds = {b.bus_id: b.kind for b in case.buses}
    p_net, q_net = net_injections(case)
    s_of = {
        b.bus_id: complex(p_net[i], q_net[i]) for i, b in enumerate(case.buses)
    }

    entries: dict[int, ZipEntry] = {}
    for item in doc.get("zip", []):
        bus_id = item.get("bus")
        if bus_id not in kinds:
            raise CaseSemanticError(f"ZIP entry references unknown bus {bus_id}")
        if kinds[bus_id] is not BusKind.PQ:
            raise CaseSemanticError(
                f"ZIP entry at bus {bus_id}: only PQ buses may carry ZIP load"
            )
        if bus_id in entries:
            raise CaseSemanticError(f"duplicate ZIP entry for bus {bus_id}")
        try:
            az, ai, ap = float(item["az"]), float(item["ai"]), float(item["ap"])
            bz, bi, bp = float(item["bz"]), float(item["bi"]), float(item["bp"])
        except KeyError as exc:
            raise CaseSemanticError(
                f"ZIP entry at bus {bus_id}: missing fraction {exc.args[0]!r}"
            ) from None
        _check_fraction_sum(az + ai + ap, bus_id, "active")
        _check_fraction_sum(bz + bi + bp, bus_id, "reactive")
        z = complex(float(item.get("z_re", 0.0)), float(item.get("z_im", 0.0)))
        cur = complex(float(item.get("i_re", 0.0)), float(item.get("i_im", 0.0)))
        if (az != 0.0 or bz != 0.0) and abs(z) == 0.0:
            raise CaseSemanticError(
                f"ZIP entry at bus {bus_id}: impedance fraction present but z_sp is zero"
            )
        entries[bus_id] = ZipEntry(az, ai, ap, bz, bi, bp, z, cur, s_of[bus_id])

    for bus_id, kind in kinds.items():
        if kind is BusKind.PQ and bus_id not in entries:
            entries[bus_id] = ZipEntry.constant_power(s_of[bus_id])

    dp: dict[int, float] = {}
    dq: dict[int, float] = {}
    for item in doc.get("direction", []):
        bus_id = item.get("bus")
        if bus_id not in kinds:
            raise CaseSemanticError(f"direction entry references unknown bus {bus_id}")
        if bus_id in dp:
            raise CaseSemanticError(f"duplicate direction entry for bus {bus_id}")
        dpv = float(item.get("dp", 0.0))
        dqv = float(item.get("dq", 0.0))
        if not (math.isfinite(dpv) and math.isfinite(dqv)):
            raise CaseSemanticError(f"direction entry at bus {bus_id} is not finite")
        if dqv != 0.0 and kinds[bus_id] is not BusKind.PQ:
            raise CaseSemanticError(
                f"direction entry at bus {bus_id}: dq must be 0 on {kinds[bus_id].name} buses"
            )
        dp[bus_id] = dpv
        dq[bus_id] = dqv

    return ZipConfig(entries=entries), DirectionVector(dp=dp, dq=dq)


# ---------------------------------------------------------------------------
# solver-facing bundle

def compile_network(
    case: CaseData,
    zip_cfg: ZipConfig | None = None,
    direction: DirectionVector | None = None,
) -> Network:
    """Assemble the internally-ordered Network used by the solvers."""
    if zip_cfg is None:
        zip_cfg = ZipConfig.constant_power(case)
    if direction is None:
        direction = DirectionVector.zeros()

    ordering, spec = partition_and_specify(case)
    n = case.n_bus
    ybus = build_ybus(case)
    p = list(ordering.perm)
    ybus_int = ybus[np.ix_(p, p)]
    kinds = np.array(
        [int(case.buses[decl].kind) for decl in ordering.perm], dtype=np.int8
    )

    dp = np.zeros(n)
    dq = np.zeros(n)
    for bus_id, val in direction.dp.items():
        dp[ordering.internal_index[bus_id]] = val
    for bus_id, val in direction.dq.items():
        dq[ordering.internal_index[bus_id]] = val

    az = np.zeros(n)
    ai = np.zeros(n)
    ap = np.zeros(n)
    bz = np.zeros(n)
    bi = np.zeros(n)
    bp = np.zeros(n)
    z = np.zeros(n, dtype=complex)
    cur = np.zeros(n, dtype=complex)
    for bus_id, entry in zip_cfg.entries.items():
        if case.buses[case.bus_position[bus_id]].kind is not BusKind.PQ:
            raise CaseSemanticError(
                f"ZIP entry at bus {bus_id}: only PQ buses may carry ZIP load"
            )
        i = ordering.internal_index[bus_id]
        az[i], ai[i], ap[i] = entry.az, entry.ai, entry.ap
        bz[i], bi[i], bp[i] = entry.bz, entry.bi, entry.bp
        z[i] = entry.z_sp
        cur[i] = entry.i_sp
    for i in range(ordering.n_pq):
        if az[i] == ai[i] == ap[i] == 0.0:
            ap[i] = 1.0
            bp[i] = 1.0

    return Network(
        ordering=ordering,
        kinds=kinds,
        ybus=ybus_int,
        p_sp=spec.p_sp,
        q_sp=spec.q_sp,
        v_sp=spec.v_sp,
        e_sp=spec.e_sp,
        f_sp=spec.f_sp,
        dp=dp,
        dq=dq,
        zip_az=az,
        zip_ai=ai,
        zip_ap=ap,
        zip_bz=bz,
        zip_bi=bi,
        zip_bp=bp,
        zip_z=z,
        zip_i=cur,
        base_mva=case.base_mva,
        name=case.name,
    )
