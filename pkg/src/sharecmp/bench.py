"""Instrumented benchmark comparing the two protocol variants.

Timings cover the comparison protocol only; key generation and decryption
table construction happen before the clock starts. Counters are recorded
per comparison and must be identical across repetitions (they are a pure
function of l), which the runner asserts.
"""

import statistics
import time
from dataclasses import dataclass, field

from .cipher import BsgsDecoder, DecryptionTable
from .errors import ProtocolError
from .keys import PublicKey, SecretKey
from .messages import ComparisonOutcome
from .protocol import Variant, run_comparison, sessions_for_values
from .rng import Rng


@dataclass
class VariantStats:
    """Per-variant results: per-comparison timings and operation counts."""

    variant: str
    mean_ms: float
    median_ms: float
    counters_a: dict[str, int]
    counters_b: dict[str, int]


@dataclass
class BenchReport:
    k: int
    t: int
    l: int
    reps: int
    seed: int
    stats: dict[str, VariantStats] = field(default_factory=dict)

    _COUNTER_KEYS = ("encryptions", "full_decryptions", "zero_checks", "modexps")

    def to_table(self) -> str:
        header = (
            f"{'variant':<8} {'mean ms':>10} {'median ms':>10} "
            f"{'A enc':>6} {'A dec':>6} {'A zk':>6} {'A mexp':>7} "
            f"{'B enc':>6} {'B dec':>6} {'B zk':>6} {'B mexp':>7}"
        )
        lines = [header, "-" * len(header)]
        for name in sorted(self.stats):
            s = self.stats[name]
            a, b = s.counters_a, s.counters_b
            lines.append(
                f"{s.variant:<8} {s.mean_ms:>10.3f} {s.median_ms:>10.3f} "
                f"{a['encryptions']:>6} {a['full_decryptions']:>6} "
                f"{a['zero_checks']:>6} {a['modexps']:>7} "
                f"{b['encryptions']:>6} {b['full_decryptions']:>6} "
                f"{b['zero_checks']:>6} {b['modexps']:>7}"
            )
        return "\n".join(lines)

    def to_machine(self) -> str:
        """Line-oriented key=value records, lossless under from_machine."""
        lines = [
            f"record=params k={self.k} t={self.t} l={self.l} "
            f"reps={self.reps} seed={self.seed}"
        ]
        for name in sorted(self.stats):
            s = self.stats[name]
            parts = [
                f"record=variant name={s.variant}",
                f"mean_ms={s.mean_ms!r}",
                f"median_ms={s.median_ms!r}",
            ]
            parts += [f"a_{key}={s.counters_a[key]}" for key in self._COUNTER_KEYS]
            parts += [f"b_{key}={s.counters_b[key]}" for key in self._COUNTER_KEYS]
            lines.append(" ".join(parts))
        return "\n".join(lines)

    @classmethod
    def from_machine(cls, text: str) -> "BenchReport":
        report = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            fields = dict(part.split("=", 1) for part in line.split())
            kind = fields.pop("record", None)
            if kind == "params":
                report = cls(
                    k=int(fields["k"]), t=int(fields["t"]), l=int(fields["l"]),
                    reps=int(fields["reps"]), seed=int(fields["seed"]),
                )
            elif kind == "variant":
                if report is None:
                    raise ValueError("variant record before params record")
                name = fields["name"]
                report.stats[name] = VariantStats(
                    variant=name,
                    mean_ms=float(fields["mean_ms"]),
                    median_ms=float(fields["median_ms"]),
                    counters_a={
                        key: int(fields[f"a_{key}"]) for key in cls._COUNTER_KEYS
                    },
                    counters_b={
                        key: int(fields[f"b_{key}"]) for key in cls._COUNTER_KEYS
                    },
                )
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        if report is None:
            raise ValueError("no params record found")
        return report


def run_bench(
    pk: PublicKey,
    sk: SecretKey,
    table: DecryptionTable | BsgsDecoder,
    reps: int,
    seed: int,
    batched: bool = True,
) -> BenchReport:
    """Time both variants over the same random input pairs.

    Every repetition gets fresh sessions (and fresh counters); the two
    variants see identical (x, y) inputs and their outcomes are
    cross-checked against each other.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    params = pk.params
    l = params.l
    input_rng = Rng(seed)
    pairs = [
        (input_rng.uniform_below(1 << l), input_rng.uniform_below(1 << l))
        for _ in range(reps)
    ]
    session_seeds = [input_rng.getrandbits(64) for _ in range(reps)]

    report = BenchReport(k=params.k, t=params.t, l=params.l, reps=reps, seed=seed)
    outcomes: dict[str, list[ComparisonOutcome]] = {}
    for variant in (Variant.P1, Variant.P3):
        times = []
        counters_a = counters_b = None
        results = []
        for (x, y), session_seed in zip(pairs, session_seeds):
            session_a, session_b = sessions_for_values(
                pk, sk, table, x, y, session_seed
            )
            start = time.perf_counter()
            outcome = run_comparison(variant, session_a, session_b, batched=batched)
            times.append((time.perf_counter() - start) * 1e3)
            results.append(outcome)
            snap_a = session_a.counters.as_dict()
            snap_b = session_b.counters.as_dict()
            if counters_a is None:
                counters_a, counters_b = snap_a, snap_b
            elif (counters_a, counters_b) != (snap_a, snap_b):
                raise ProtocolError(
                    f"{variant.value} counters vary across repetitions"
                )
        outcomes[variant.value] = results
        report.stats[variant.value] = VariantStats(
            variant=variant.value,
            mean_ms=statistics.fmean(times),
            median_ms=statistics.median(times),
            counters_a=counters_a,
            counters_b=counters_b,
        )
    if outcomes["p1"] != outcomes["p3"]:
        raise ProtocolError("variants disagree on at least one input pair")
    return report
