"""Configuration-driven experiments: per-step observable series and tables.

An experiment evolves the Neel state under a built Trotter circuit family
and records the staggered magnetization after every Trotter step, on any
combination of backends (noiseless state vector with optional mitigation
pipeline, MPS, exact Krylov oracle).  Outputs are a fixed-schema CSV and a
JSON file with full provenance; both are written atomically and are byte
identical for identical config + seed.

CSV schema (version 1), one row per Trotter step:

    step, t, value_raw_s1, value_raw_s3, value_raw_s5, value_zne,
    value_exact, value_mps, discarded_weight

Without a mitigation section, the noiseless state-vector expectation goes
in ``value_raw_s1`` (it is the scale-1 circuit estimate at infinite shots);
with mitigation, raw columns hold uncorrected per-scale twirl averages and
``value_zne`` the pipeline output.  Absent values are empty fields.
Readout-mitigated per-scale inputs to the ZNE fit and per-copy values live
in the JSON only.
"""

from __future__ import annotations

import configparser
import json
import os
from dataclasses import dataclass, field

from . import mitigation as mit
from .builders import build_circuit, build_second_order_merged
from .chain import ChainSpec, FIRST_ORDER, SECOND_ORDER_MERGED, TrotterPlan, hamiltonian_terms
from .circuits import Circuit, cnot_count, lower, metrics
from .errors import ConfigError
from .mps import mps_apply, mps_init_neel, mps_staggered_magnetization
from .statevector import StateVector, apply, exact_evolve, init_neel, staggered_magnetization

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "step",
    "t",
    "value_raw_s1",
    "value_raw_s3",
    "value_raw_s5",
    "value_zne",
    "value_exact",
    "value_mps",
    "discarded_weight",
)

BACKEND_STATEVECTOR = "statevector"
BACKEND_MPS = "mps"
BACKEND_EXACT = "exact-oracle"
_BACKENDS = (BACKEND_STATEVECTOR, BACKEND_MPS, BACKEND_EXACT)


@dataclass
class ExperimentConfig:
    spec: ChainSpec
    plan: TrotterPlan
    backends: tuple[str, ...]
    chi_max: int = 512
    svd_cutoff: float = 1e-12
    mitigation: mit.MitigationPlan | None = None
    noise: mit.NoiseModel | None = None
    csv_path: str = "series.csv"
    json_path: str = "series.json"

    @property
    def seed(self) -> int:
        return self.mitigation.seed if self.mitigation else 0


@dataclass
class StepRecord:
    step: int
    time: float
    raw_per_scale: dict[int, float] | None = None
    corrected_per_scale: dict[int, float] | None = None
    zne: float | None = None
    exact: float | None = None
    mps: float | None = None
    discarded_weight: float | None = None
    per_copy_corrected: dict[int, list[float]] | None = None
    shots: int | None = None


@dataclass
class ResultSeries:
    records: list[StepRecord]
    provenance: dict
    config_echo: dict = field(default_factory=dict)

    def __post_init__(self):
        times = [r.time for r in self.records]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("step times must be strictly increasing")

    def times(self) -> list[float]:
        return [r.time for r in self.records]

    def column(self, name: str) -> list[float | None]:
        out = []
        for r in self.records:
            if name == "value_zne":
                out.append(r.zne)
            elif name == "value_exact":
                out.append(r.exact)
            elif name == "value_mps":
                out.append(r.mps)
            elif name.startswith("value_raw_s"):
                scale = int(name.removeprefix("value_raw_s"))
                out.append(None if r.raw_per_scale is None else r.raw_per_scale.get(scale))
            elif name == "discarded_weight":
                out.append(r.discarded_weight)
            else:
                raise ValueError(f"unknown column {name!r}")
        return out

    def primary_column(self) -> str:
        """The series' headline estimate: zne, else raw_s1, else mps, else exact."""
        for name in ("value_zne", "value_raw_s1", "value_mps", "value_exact"):
            if any(v is not None for v in self.column(name)):
                return name
        raise ValueError("series has no populated value column")


# --- config file ------------------------------------------------------------

_SECTION_KEYS = {
    "chain": {"n_sites", "boundary", "j1", "j2", "delta"},
    "plan": {"order", "dt", "steps", "time"},
    "backend": {"kind", "chi_max", "svd_cutoff"},
    "mitigation": {
        "twirl_copies",
        "fold_scales",
        "shots",
        "readout_mitigation",
        "trajectories",
        "seed",
        "depolarizing_p",
        "coherent_zz",
        "readout_p01",
        "readout_p10",
    },
    "output": {"csv", "json"},
}


def _get(section, key, cast, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r} in [{section.name}]")
        return default
    raw = section[key]
    try:
        if cast is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r} in [{section.name}]: {raw!r}") from exc


def load_config(path) -> ExperimentConfig:
    """Parse and validate an experiment config file (INI sections, strict keys)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - _SECTION_KEYS[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)}")
    for required in ("chain", "plan", "backend"):
        if required not in parser:
            raise ConfigError(f"missing required section [{required}]")

    sec = parser["chain"]
    try:
        spec = ChainSpec(
            n_sites=_get(sec, "n_sites", int, required=True),
            boundary=_get(sec, "boundary", str, default="obc").lower(),
            j1=_get(sec, "j1", float, default=1.0),
            j2=_get(sec, "j2", float, default=0.0),
            delta=_get(sec, "delta", float, default=1.0),
        )
        sec = parser["plan"]
        plan = TrotterPlan(
            order=_get(sec, "order", str, required=True).lower(),
            steps=_get(sec, "steps", int, required=True),
            dt=_get(sec, "dt", float, required=True),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    target = _get(parser["plan"], "time", float)
    if target is not None and abs(target - plan.total_time) > 1e-9:
        raise ConfigError(
            f"[plan] time={target} disagrees with steps*dt={plan.total_time}"
        )

    sec = parser["backend"]
    kinds = tuple(k.strip() for k in _get(sec, "kind", str, required=True).split(","))
    for kind in kinds:
        if kind not in _BACKENDS:
            raise ConfigError(f"unknown backend {kind!r}; choose from {_BACKENDS}")
    if len(set(kinds)) != len(kinds):
        raise ConfigError("duplicate backend kinds")
    chi_max = _get(sec, "chi_max", int, default=512)
    svd_cutoff = _get(sec, "svd_cutoff", float, default=1e-12)

    mitigation = None
    noise = None
    if "mitigation" in parser:
        sec = parser["mitigation"]
        scales = tuple(
            int(s.strip()) for s in _get(sec, "fold_scales", str, default="1, 3, 5").split(",")
        )
        try:
            mitigation = mit.MitigationPlan(
                twirl_copies=_get(sec, "twirl_copies", int, default=10),
                fold_scales=scales,
                shots=_get(sec, "shots", int, default=10_000),
                readout_mitigation=_get(sec, "readout_mitigation", bool, default=True),
                trajectories=_get(sec, "trajectories", int, default=50),
                seed=_get(sec, "seed", int, default=0),
            )
            p01 = _get(sec, "readout_p01", float, default=0.0)
            p10 = _get(sec, "readout_p10", float, default=0.0)
            noise = mit.NoiseModel(
                two_qubit_depolarizing_p=_get(sec, "depolarizing_p", float, default=0.0),
                coherent_zz_overrotation=_get(sec, "coherent_zz", float, default=0.0),
                readout_flip=mit.uniform_readout_flip(spec.n_sites, p01, p10),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if BACKEND_STATEVECTOR not in kinds:
            raise ConfigError("the mitigation pipeline needs the statevector backend")

    csv_path, json_path = "series.csv", "series.json"
    if "output" in parser:
        csv_path = _get(parser["output"], "csv", str, default=csv_path)
        json_path = _get(parser["output"], "json", str, default=json_path)

    return ExperimentConfig(
        spec=spec,
        plan=plan,
        backends=kinds,
        chi_max=chi_max,
        svd_cutoff=svd_cutoff,
        mitigation=mitigation,
        noise=noise,
        csv_path=csv_path,
        json_path=json_path,
    )


def _config_echo(config: ExperimentConfig, seed: int) -> dict:
    echo = {
        "chain": {
            "n_sites": config.spec.n_sites,
            "boundary": config.spec.boundary,
            "j1": config.spec.j1,
            "j2": config.spec.j2,
            "delta": config.spec.delta,
        },
        "plan": {
            "order": config.plan.order,
            "steps": config.plan.steps,
            "dt": config.plan.dt,
        },
        "backend": {
            "kind": list(config.backends),
            "chi_max": config.chi_max,
            "svd_cutoff": config.svd_cutoff,
        },
        "seed": seed,
    }
    if config.mitigation:
        echo["mitigation"] = {
            "twirl_copies": config.mitigation.twirl_copies,
            "fold_scales": list(config.mitigation.fold_scales),
            "shots": config.mitigation.shots,
            "readout_mitigation": config.mitigation.readout_mitigation,
            "trajectories": config.mitigation.trajectories,
            "depolarizing_p": config.noise.two_qubit_depolarizing_p,
            "coherent_zz": config.noise.coherent_zz_overrotation,
            "readout_flip": [list(f) for f in config.noise.readout_flip],
        }
    return echo


# --- the runner -------------------------------------------------------------


def _per_step_circuits(config: ExperimentConfig):
    """Yield one applicable circuit per Trotter step for incremental evolution.

    First-order families slice one M-step circuit at its step bounds.  For
    the merged second order, applying the single-step merged circuit (half,
    full, half) repeatedly is unitarily identical to the M-step merged
    circuit family, by the even/odd layer merging identity.
    """
    spec, plan = config.spec, config.plan
    if plan.order == SECOND_ORDER_MERGED:
        one = build_second_order_merged(spec, TrotterPlan(plan.order, 1, plan.dt))
        for _ in range(plan.steps):
            yield one
        return
    full = build_circuit(spec, plan)
    start = 0
    for bound in full.step_bounds:
        yield Circuit(full.n_qubits, full.gates[start:bound], full.level)
        start = bound


def run(config: ExperimentConfig, seed: int | None = None) -> ResultSeries:
    """Execute every requested backend per Trotter step and collect rows."""
    spec, plan = config.spec, config.plan
    seed = config.seed if seed is None else seed
    records = [
        StepRecord(step=k, time=k * plan.dt, shots=config.mitigation.shots if config.mitigation else None)
        for k in range(1, plan.steps + 1)
    ]
    provenance: dict = {"schema_version": SCHEMA_VERSION, "columns": {}}

    if BACKEND_EXACT in config.backends:
        terms = hamiltonian_terms(spec)
        state = init_neel(spec.n_sites)
        for rec in records:
            exact_evolve(terms, state, plan.dt)
            rec.exact = staggered_magnetization(state)
        provenance["columns"]["value_exact"] = "krylov exact evolution"

    if BACKEND_MPS in config.backends:
        mps = mps_init_neel(spec.n_sites, config.chi_max, config.svd_cutoff)
        for rec, circ in zip(records, _per_step_circuits(config)):
            mps_apply(circ, mps)
            rec.mps = mps_staggered_magnetization(mps)
            rec.discarded_weight = mps.total_discarded_weight
        provenance["columns"]["value_mps"] = (
            f"mps circuit evolution, chi_max={config.chi_max}, cutoff={config.svd_cutoff}"
        )
        provenance["mps_max_bond_dim"] = mps.max_bond_dim

    if BACKEND_STATEVECTOR in config.backends:
        if config.mitigation is None:
            state = init_neel(spec.n_sites)
            for rec, circ in zip(records, _per_step_circuits(config)):
                apply(circ, state)
                rec.raw_per_scale = {1: staggered_magnetization(state)}
            provenance["columns"]["value_raw_s1"] = "noiseless statevector expectation"
        else:
            root_seeds = [seed + 1000 * k for k in range(1, plan.steps + 1)]
            for rec, step_seed in zip(records, root_seeds):
                step_plan = TrotterPlan(plan.order, rec.step, plan.dt)
                circ = lower(build_circuit(spec, step_plan))
                est = mit.run_mitigated(
                    circ, config.noise, config.mitigation, init_neel(spec.n_sites), seed=step_seed
                )
                rec.raw_per_scale = est.raw_per_scale
                rec.corrected_per_scale = est.corrected_per_scale
                rec.zne = est.zne
                rec.per_copy_corrected = est.per_copy_corrected
            provenance["columns"]["value_raw_s1"] = "uncorrected per-scale twirl average"
            provenance["columns"]["value_zne"] = (
                "quadratic zero-noise extrapolation of readout-mitigated per-scale averages"
            )

    return ResultSeries(records, provenance, _config_echo(config, seed))


# --- output writers ---------------------------------------------------------


def _fmt(value) -> str:
    return "" if value is None else repr(value)


def _atomic_write(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def series_to_csv(series: ResultSeries) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for rec in series.records:
        raw = rec.raw_per_scale or {}
        lines.append(
            ",".join(
                [
                    str(rec.step),
                    repr(rec.time),
                    _fmt(raw.get(1)),
                    _fmt(raw.get(3)),
                    _fmt(raw.get(5)),
                    _fmt(rec.zne),
                    _fmt(rec.exact),
                    _fmt(rec.mps),
                    _fmt(rec.discarded_weight),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def series_to_json(series: ResultSeries) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": series.config_echo,
        "provenance": series.provenance,
        "records": [
            {
                "step": rec.step,
                "t": rec.time,
                "raw_per_scale": rec.raw_per_scale,
                "corrected_per_scale": rec.corrected_per_scale,
                "zne": rec.zne,
                "exact": rec.exact,
                "mps": rec.mps,
                "discarded_weight": rec.discarded_weight,
                "per_copy_corrected": rec.per_copy_corrected,
                "shots": rec.shots,
            }
            for rec in series.records
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_outputs(series: ResultSeries, config: ExperimentConfig, out_dir=".") -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, config.csv_path)
    json_path = os.path.join(out_dir, config.json_path)
    _atomic_write(csv_path, series_to_csv(series))
    _atomic_write(json_path, series_to_json(series))
    return csv_path, json_path


def load_series_csv(path) -> ResultSeries:
    """Rehydrate a ResultSeries from the fixed-schema CSV (for compare)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise ValueError(f"{path} is not a schema-version-{SCHEMA_VERSION} series CSV")
    records = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ValueError(f"malformed CSV row: {ln!r}")
        num = [None if cell == "" else float(cell) for cell in cells[2:]]
        raw = {s: v for s, v in zip((1, 3, 5), num[0:3]) if v is not None}
        records.append(
            StepRecord(
                step=int(cells[0]),
                time=float(cells[1]),
                raw_per_scale=raw or None,
                zne=num[3],
                exact=num[4],
                mps=num[5],
                discarded_weight=num[6],
            )
        )
    return ResultSeries(records, {"schema_version": SCHEMA_VERSION, "columns": {}}, {})


# --- compare ----------------------------------------------------------------


@dataclass
class ComparisonReport:
    times: list[float]
    deviations: list[float]
    column_a: str
    column_b: str
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    @property
    def mean_deviation(self) -> float:
        return sum(self.deviations) / len(self.deviations)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def render(self) -> str:
        lines = [f"comparing {self.column_a} vs {self.column_b}, tolerance {self.tolerance}"]
        for t, d in zip(self.times, self.deviations):
            lines.append(f"  t={t:g} |delta|={d:.3e}")
        lines.append(f"max {self.max_deviation:.3e}  mean {self.mean_deviation:.3e}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def compare(
    series_a: ResultSeries,
    series_b: ResultSeries,
    tolerance: float,
    column_a: str | None = None,
    column_b: str | None = None,
) -> ComparisonReport:
    """Per-time absolute deviations between two series' headline columns."""
    ta, tb = series_a.times(), series_b.times()
    if len(ta) != len(tb) or any(abs(x - y) > 1e-9 for x, y in zip(ta, tb)):
        raise ValueError(f"time grids differ: {ta} vs {tb}")
    column_a = column_a or series_a.primary_column()
    column_b = column_b or series_b.primary_column()
    va = series_a.column(column_a)
    vb = series_b.column(column_b)
    if any(v is None for v in va) or any(v is None for v in vb):
        raise ValueError(f"column {column_a!r} or {column_b!r} has missing values")
    devs = [abs(x - y) for x, y in zip(va, vb)]
    return ComparisonReport(ta, devs, column_a, column_b, tolerance)


# --- appendix tables --------------------------------------------------------

# Published CNOT counts for the merged second-order isotropic circuits,
# steps 1..8 per column (golden values the builders must reproduce).
HISO_CNOT_GOLDEN = {
    (20, "obc"): (87, 144, 201, 258, 315, 372, 429, 486),
    (100, "obc"): (447, 744, 1041, 1338, 1635, 1932, 2229, 2526),
    (20, "pbc"): (90, 150, 210, 270, 330, 390, 450, 510),
    (96, "pbc"): (432, 720, 1008, 1296, 1584, 1872, 2160, 2448),
}

# Raw lowered counts for the Dimer construction (3 CNOTs per block or swap;
# transpiler-merged published counts are intentionally not targeted).
DIMER_CNOT_GOLDEN = {
    (20, "obc"): tuple(171 * m for m in range(1, 6)),
    (100, "obc"): tuple(891 * m for m in range(1, 6)),
    (20, "pbc"): tuple(180 * m for m in range(1, 6)),
    (96, "pbc"): tuple(864 * m for m in range(1, 6)),
}


@dataclass
class TablesReport:
    hiso: dict
    dimer: dict
    depth_increments: dict

    @property
    def all_match(self) -> bool:
        cells = list(self.hiso.values()) + list(self.dimer.values())
        return all(entry["match"] for entry in cells)

    def render(self) -> str:
        lines = ["CNOT counts, merged second order (isotropic chain):"]
        for (n, bc), entry in sorted(self.hiso.items()):
            status = "ok" if entry["match"] else f"MISMATCH expected {entry['expected']}"
            lines.append(f"  N={n} {bc.upper()} steps 1-8: {entry['built']}  [{status}]")
        lines.append("CNOT counts, raw lowered Dimer construction:")
        for (n, bc), entry in sorted(self.dimer.items()):
            status = "ok" if entry["match"] else f"MISMATCH expected {entry['expected']}"
            lines.append(f"  N={n} {bc.upper()} steps 1-5: {entry['built']}  [{status}]")
        lines.append("block-level depth added per step (constant across N):")
        for family, inc in sorted(self.depth_increments.items()):
            lines.append(f"  {family}: {inc}")
        return "\n".join(lines)


def emit_tables() -> TablesReport:
    """Rebuild the appendix gate-count tables and diff against goldens."""
    hiso = {}
    for (n, bc), expected in HISO_CNOT_GOLDEN.items():
        built = tuple(
            cnot_count(lower(build_second_order_merged(
                ChainSpec(n, bc), TrotterPlan(SECOND_ORDER_MERGED, steps, 0.5)
            )))
            for steps in range(1, 9)
        )
        hiso[(n, bc)] = {"built": built, "expected": expected, "match": built == expected}
    dimer_table = {}
    for (n, bc), expected in DIMER_CNOT_GOLDEN.items():
        built = tuple(
            cnot_count(lower(build_circuit(
                ChainSpec(n, bc, j2=0.5), TrotterPlan(FIRST_ORDER, steps, 0.2)
            )))
            for steps in range(1, 6)
        )
        dimer_table[(n, bc)] = {"built": built, "expected": expected, "match": built == expected}
    depth_increments = {}
    for family, spec_kw, order in (
        ("isotropic-first", {}, FIRST_ORDER),
        ("isotropic-second-merged", {}, SECOND_ORDER_MERGED),
        ("dimer-first", {"j2": 0.5}, FIRST_ORDER),
    ):
        increments = set()
        for n in (8, 20, 40, 100):
            circ = build_circuit(ChainSpec(n, "obc", **spec_kw), TrotterPlan(order, 3, 0.5))
            increments.add(metrics(circ).per_step_depth)
        depth_increments[family] = sorted(increments)
    return TablesReport(hiso, dimer_table, depth_increments)
