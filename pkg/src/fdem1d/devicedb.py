"""Catalog of commercial EMI device configurations.

Ships a seed catalog of nine common instruments and persists user
extensions to a single JSON store.  Entries expand into measurement
elements (orientation, spacing, frequency, height) for the forward
model, honoring per-orientation spacing lists and multi-frequency
selections.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .earthmodel import GeometryElement, ORIENTATIONS
from .forward import DeviceScale


class DeviceError(ValueError):
    pass


@dataclass(frozen=True)
class DeviceRow:
    """One coil arrangement of a device: orientation plus its spacings,
    at a fixed frequency or (for multi-frequency systems) a range."""

    orientation: str
    spacings: tuple            # m, sorted ascending
    frequency: float | None = None        # Hz, fixed-frequency devices
    frequency_range: tuple | None = None  # (min, max) Hz

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise DeviceError(f"unknown orientation {self.orientation!r}")
        sp = tuple(float(x) for x in self.spacings)
        if not sp or any(x <= 0 for x in sp) or list(sp) != sorted(sp):
            raise DeviceError("spacings must be positive and sorted")
        object.__setattr__(self, "spacings", sp)
        if (self.frequency is None) == (self.frequency_range is None):
            raise DeviceError(
                "exactly one of frequency / frequency_range required")
        if self.frequency is not None and self.frequency <= 0:
            raise DeviceError("frequency must be positive")
        if self.frequency_range is not None:
            lo, hi = (float(x) for x in self.frequency_range)
            if not 0 < lo < hi:
                raise DeviceError("frequency range must satisfy 0 < min < max")
            object.__setattr__(self, "frequency_range", (lo, hi))


@dataclass(frozen=True)
class DeviceEntry:
    manufacturer: str
    name: str
    rows: tuple
    q_unit: str = "mS/m"
    p_unit: str = "ppt"
    default_frequencies: tuple | None = None
    seed: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.rows:
            raise DeviceError("device needs at least one coil arrangement")
        if self.default_frequencies is not None:
            freqs = tuple(float(f) for f in self.default_frequencies)
            if any(f <= 0 for f in freqs):
                raise DeviceError("default frequencies must be positive")
            object.__setattr__(self, "default_frequencies", freqs)

    @property
    def scale(self) -> DeviceScale:
        return DeviceScale(self.q_unit, self.p_unit)

    def frequencies_for(self, row: DeviceRow, frequencies=None) -> tuple:
        if frequencies is not None:
            chosen = tuple(float(f) for f in frequencies)
            if row.frequency_range is not None:
                lo, hi = row.frequency_range
                for f in chosen:
                    if not lo <= f <= hi:
                        raise DeviceError(
                            f"{f} Hz outside the {self.name} range "
                            f"{lo}-{hi} Hz")
            return chosen
        if row.frequency is not None:
            return (row.frequency,)
        if self.default_frequencies:
            return self.default_frequencies
        raise DeviceError(
            f"{self.name} is multi-frequency: select frequencies")

    def elements(self, heights, frequencies=None) -> tuple:
        """Measurement elements in row order, then spacing, frequency,
        height."""
        if isinstance(heights, (int, float)):
            heights = (heights,)
        out = []
        for row in self.rows:
            freqs = self.frequencies_for(row, frequencies)
            for rho in row.spacings:
                for f in freqs:
                    for h in heights:
                        out.append(GeometryElement(
                            row.orientation, rho, float(f), float(h)))
        return tuple(out)


def seed_defaults() -> tuple:
    """The built-in catalog of commercial devices."""
    gf = "Gf Instruments"
    entries = [
        DeviceEntry(gf, "CMD Mini-Explorer", (
            DeviceRow("HCP", (0.32, 0.71, 1.18), frequency=30_000.0),
            DeviceRow("VCP", (0.32, 0.71, 1.18), frequency=30_000.0),
        ), seed=True),
        DeviceEntry(gf, "CMD Explorer", (
            DeviceRow("HCP", (1.48, 2.82, 4.49), frequency=10_000.0),
            DeviceRow("VCP", (1.48, 2.82, 4.49), frequency=10_000.0),
        ), seed=True),
        DeviceEntry(gf, "CMD DUO", (
            DeviceRow("HCP", (10.0, 20.0, 40.0), frequency=925.0),
            DeviceRow("VCP", (10.0, 20.0, 40.0), frequency=925.0),
        ), seed=True),
        DeviceEntry("Dualem Inc.", "Dualem-21", (
            DeviceRow("HCP", (1.0, 2.0), frequency=9_000.0),
            DeviceRow("PERP", (1.1, 2.1), frequency=9_000.0),
        ), seed=True),
        DeviceEntry("Dualem Inc.", "Dualem-21H", (
            DeviceRow("HCP", (0.5, 1.0, 2.0), frequency=9_000.0),
            DeviceRow("PERP", (0.6, 1.1, 2.1), frequency=9_000.0),
        ), seed=True),
        DeviceEntry("Dualem Inc.", "Dualem-421", (
            DeviceRow("HCP", (1.0, 2.0, 4.0), frequency=9_000.0),
            DeviceRow("PERP", (1.1, 2.1, 4.1), frequency=9_000.0),
        ), seed=True),
        DeviceEntry("Geonics Limited", "EM38-MK2", (
            DeviceRow("HCP", (0.5, 1.0), frequency=14_500.0),
            DeviceRow("VCP", (0.5, 1.0), frequency=14_500.0),
        ), seed=True),
        DeviceEntry("Geonics Limited", "EM31-MK2", (
            DeviceRow("HCP", (3.66,), frequency=9_800.0),
        ), seed=True),
        # Example six-frequency selection, not a manufacturer preset.
        DeviceEntry("Geophex Ltd.", "GEM-2", (
            DeviceRow("HCP", (1.66,), frequency_range=(30.0, 93_000.0)),
            DeviceRow("VCP", (1.66,), frequency_range=(30.0, 93_000.0)),
        ), q_unit="ppm", p_unit="ppm",
            default_frequencies=(1275.0, 4250.0, 12525.0, 28725.0,
                                 54150.0, 82150.0), seed=True),
    ]
    return tuple(entries)


def _row_to_dict(row: DeviceRow) -> dict:
    out = {"orientation": row.orientation, "spacings_m": list(row.spacings)}
    if row.frequency is not None:
        out["frequency_Hz"] = row.frequency
    else:
        out["frequency_range_Hz"] = list(row.frequency_range)
    return out


def _row_from_dict(data: dict) -> DeviceRow:
    rng = data.get("frequency_range_Hz")
    return DeviceRow(
        orientation=data["orientation"],
        spacings=data["spacings_m"],
        frequency=data.get("frequency_Hz"),
        frequency_range=tuple(rng) if rng else None,
    )


def entry_to_dict(entry: DeviceEntry) -> dict:
    out = {
        "manufacturer": entry.manufacturer,
        "name": entry.name,
        "rows": [_row_to_dict(r) for r in entry.rows],
        "q_unit": entry.q_unit,
        "p_unit": entry.p_unit,
        "seed": entry.seed,
    }
    if entry.default_frequencies:
        out["default_frequencies_Hz"] = list(entry.default_frequencies)
    return out


def entry_from_dict(data: dict) -> DeviceEntry:
    try:
        return DeviceEntry(
            manufacturer=data["manufacturer"],
            name=data["name"],
            rows=tuple(_row_from_dict(r) for r in data["rows"]),
            q_unit=data.get("q_unit", "mS/m"),
            p_unit=data.get("p_unit", "ppt"),
            default_frequencies=tuple(data["default_frequencies_Hz"])
            if data.get("default_frequencies_Hz") else None,
            seed=bool(data.get("seed", False)),
        )
    except KeyError as exc:
        raise DeviceError(f"device record missing field {exc}") from exc


def default_store_path() -> Path:
    root = os.environ.get("FDEM1D_DATA_DIR")
    base = Path(root) if root else Path.home() / ".fdem1d"
    return base / "devices.json"


class DeviceCatalog:
    """JSON-backed device store: seeded once, user-extendable.

    Single-writer: mutations are serialized through one lock and each
    mutation rewrites the store file.
    """

    def __init__(self, path=None, autoload: bool = True):
        self.path = Path(path) if path else default_store_path()
        self._lock = threading.Lock()
        self._entries: dict = {}
        if autoload:
            self.load()

    # -- persistence --------------------------------------------------
    def load(self) -> None:
        if self.path.exists():
            data = json.loads(self.path.read_text())
            entries = [entry_from_dict(e) for e in data.get("devices", [])]
            self._entries = {e.name: e for e in entries}
        else:
            self._entries = {e.name: e for e in seed_defaults()}
            self._persist()

    def _persist(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        body = {"devices": [entry_to_dict(e) for e in self.list()]}
        self.path.write_text(json.dumps(body, indent=2) + "\n")

    # -- queries ------------------------------------------------------
    def list(self) -> list:
        return sorted(self._entries.values(),
                      key=lambda e: (e.manufacturer, e.name))

    def lookup(self, name: str) -> DeviceEntry:
        try:
            return self._entries[name]
        except KeyError:
            matches = [e for e in self._entries.values()
                       if e.name.lower() == name.lower()]
            if matches:
                return matches[0]
            raise DeviceError(f"device {name!r} not in catalog") from None

    # -- mutations ----------------------------------------------------
    def upsert(self, entry: DeviceEntry) -> None:
        with self._lock:
            self._entries[entry.name] = entry
            self._persist()

    def remove(self, name: str, force: bool = False) -> None:
        with self._lock:
            entry = self.lookup(name)
            if entry.seed and not force:
                raise DeviceError(
                    f"{entry.name} is a seed device; pass force to remove")
            del self._entries[entry.name]
            self._persist()

    def reseed(self, force: bool = False) -> None:
        """Restore missing seed entries; with force, overwrite modified
        ones as well."""
        with self._lock:
            for e in seed_defaults():
                if force or e.name not in self._entries:
                    self._entries[e.name] = e
            self._persist()
