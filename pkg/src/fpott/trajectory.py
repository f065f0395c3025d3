"""NGSIM-schema trajectory data model and plumbing.

Covers CSV ingestion/emission in the reduced 12-column NGSIM layout,
maneuver labeling from lane-id transitions, sliding-window extraction,
vehicle-atomic client sharding, and trajectory-level train/val/test splits.
All containers are immutable after construction; every operation is a pure
function of its inputs (plus an explicit seed where noted).
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .seeding import child_seed, rng_from

DT = 0.1  # NGSIM capture interval, seconds (10 Hz)

CSV_COLUMNS = (
    "Vehicle_ID",
    "Frame_ID",
    "Local_X",
    "Local_Y",
    "v_Vel",
    "v_Acc",
    "Lane_ID",
    "v_Length",
    "Preceding",
    "Following",
    "Space_Headway",
    "Time_Headway",
)

_INT_FIELDS = ("vehicle_id", "frame_id", "lane_id", "preceding_id", "following_id")


class TrajectoryError(Exception):
    """Base for trajectory-data errors."""


class MalformedRowError(TrajectoryError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateFrameError(TrajectoryError):
    pass


class EmptyInputError(TrajectoryError):
    pass


class OutOfRangeError(TrajectoryError):
    pass


class BadFractionsError(TrajectoryError):
    pass


class ManeuverLabel(enum.IntEnum):
    LANE_KEEP = 0
    LANE_CHANGE_LEFT = 1
    LANE_CHANGE_RIGHT = 2


class Origin(enum.Enum):
    REAL = "real"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class VehicleState:
    """One kinematic record for one vehicle at one 10 Hz frame.

    Positions are in feet (local_x lateral, local_y longitudinal), speeds in
    ft/s, accelerations in ft/s^2. lane_id 1 is the leftmost lane.
    preceding_id/following_id of 0 mean "none".
    """

    vehicle_id: int
    frame_id: int
    local_x: float
    local_y: float
    velocity: float
    acceleration: float
    lane_id: int
    vehicle_length: float
    preceding_id: int = 0
    following_id: int = 0
    space_headway: float = 0.0
    time_headway: float = 0.0

    def validate(self) -> None:
        """Check the schema invariants (used by the parser and validators).

        Not run at construction: post-processing intermediates may hold
        transiently out-of-range values until normalization.
        """
        if self.vehicle_id < 1:
            raise ValueError(f"vehicle_id must be positive, got {self.vehicle_id}")
        if self.frame_id < 0:
            raise ValueError(f"frame_id must be non-negative, got {self.frame_id}")
        if self.velocity < 0:
            raise ValueError(f"velocity must be >= 0, got {self.velocity}")
        if self.vehicle_length <= 0:
            raise ValueError(f"vehicle_length must be > 0, got {self.vehicle_length}")
        if self.lane_id < 1:
            raise ValueError(f"lane_id must be >= 1, got {self.lane_id}")
        if self.space_headway < 0:
            raise ValueError(f"space_headway must be >= 0, got {self.space_headway}")


@dataclass(frozen=True)
class Trajectory:
    """Ordered per-vehicle state sequence with contiguous frame ids."""

    vehicle_id: int
    states: tuple[VehicleState, ...]

    def __post_init__(self):
        for s in self.states:
            if s.vehicle_id != self.vehicle_id:
                raise ValueError(
                    f"state vehicle_id {s.vehicle_id} != trajectory {self.vehicle_id}"
                )
        for a, b in zip(self.states, self.states[1:]):
            if b.frame_id != a.frame_id + 1:
                raise ValueError(
                    f"vehicle {self.vehicle_id}: frames not contiguous "
                    f"({a.frame_id} -> {b.frame_id})"
                )

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Window:
    """k contiguous context states plus the maneuver label at the horizon."""

    context: tuple[VehicleState, ...]
    label: ManeuverLabel
    source_vehicle: int


@dataclass(frozen=True)
class Dataset:
    trajectories: tuple[Trajectory, ...]
    origin: Origin = Origin.REAL
    dt: float = DT

    def __post_init__(self):
        ids = [t.vehicle_id for t in self.trajectories]
        if len(ids) != len(set(ids)):
            raise ValueError("vehicle_ids must be unique within a dataset")

    def __len__(self) -> int:
        return len(self.trajectories)

    def n_states(self) -> int:
        return sum(len(t) for t in self.trajectories)


def _parse_cell(name: str, raw: str, line_no: int):
    raw = raw.strip()
    try:
        value = float(raw)
    except ValueError:
        raise MalformedRowError(line_no, f"non-numeric {name} field {raw!r}") from None
    if name in _INT_FIELDS:
        if value != int(value):
            raise MalformedRowError(line_no, f"non-integer {name} field {raw!r}")
        return int(value)
    return value


_COLUMN_TO_FIELD = {
    "Vehicle_ID": "vehicle_id",
    "Frame_ID": "frame_id",
    "Local_X": "local_x",
    "Local_Y": "local_y",
    "v_Vel": "velocity",
    "v_Acc": "acceleration",
    "Lane_ID": "lane_id",
    "v_Length": "vehicle_length",
    "Preceding": "preceding_id",
    "Following": "following_id",
    "Space_Headway": "space_headway",
    "Time_Headway": "time_headway",
}


def parse_ngsim_csv(text: str, origin: Origin = Origin.REAL) -> Dataset:
    """Parse NGSIM-style CSV text into a Dataset.

    The header must name at least the 12 schema columns (extras are
    ignored). Rows may arrive in any order; they are grouped by vehicle and
    sorted by frame. Raises MalformedRowError (with line number),
    DuplicateFrameError, or EmptyInputError.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EmptyInputError("input has no header row")

    header = [h.strip() for h in lines[0].split(",")]
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise MalformedRowError(1, f"header missing columns {missing}")
    col_index = {c: header.index(c) for c in CSV_COLUMNS}

    by_vehicle: dict[int, dict[int, VehicleState]] = {}
    for offset, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise MalformedRowError(
                offset, f"expected {len(header)} columns, got {len(cells)}"
            )
        kwargs = {
            _COLUMN_TO_FIELD[col]: _parse_cell(_COLUMN_TO_FIELD[col], cells[idx], offset)
            for col, idx in col_index.items()
        }
        state = VehicleState(**kwargs)
        try:
            state.validate()
        except ValueError as exc:
            raise MalformedRowError(offset, str(exc)) from None
        frames = by_vehicle.setdefault(state.vehicle_id, {})
        if state.frame_id in frames:
            raise DuplicateFrameError(
                f"vehicle {state.vehicle_id} frame {state.frame_id} appears twice"
            )
        frames[state.frame_id] = state

    trajectories = tuple(
        Trajectory(vid, tuple(frames[f] for f in sorted(frames)))
        for vid, frames in sorted(by_vehicle.items())
    )
    return Dataset(trajectories, origin=origin)


def _format_row(s: VehicleState) -> str:
    return ",".join(
        (
            str(s.vehicle_id),
            str(s.frame_id),
            f"{s.local_x:.4f}",
            f"{s.local_y:.4f}",
            f"{s.velocity:.4f}",
            f"{s.acceleration:.4f}",
            str(s.lane_id),
            f"{s.vehicle_length:.4f}",
            str(s.preceding_id),
            str(s.following_id),
            f"{s.space_headway:.4f}",
            f"{s.time_headway:.4f}",
        )
    )


def write_ngsim_csv(ds: Dataset) -> str:
    """Emit the dataset as NGSIM CSV: header plus one row per state, sorted
    by (vehicle_id, frame_id), floats at 4 fractional digits, LF endings."""
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS))
    out.write("\n")
    for traj in sorted(ds.trajectories, key=lambda t: t.vehicle_id):
        for s in traj.states:
            out.write(_format_row(s))
            out.write("\n")
    return out.getvalue()


def load_ngsim_csv(path, origin: Origin = Origin.REAL) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ngsim_csv(fh.read(), origin=origin)


def save_ngsim_csv(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_ngsim_csv(ds))


def derive_label(traj: Trajectory, t: int, horizon: int) -> ManeuverLabel:
    """Maneuver label at frame index t looking `horizon` frames ahead.

    Lane 1 is the leftmost lane, so a decreasing lane_id is a left change.
    """
    if t < 0 or t + horizon >= len(traj.states):
        raise OutOfRangeError(
            f"t={t} horizon={horizon} outside trajectory of length {len(traj.states)}"
        )
    now = traj.states[t].lane_id
    later = traj.states[t + horizon].lane_id
    if later < now:
        return ManeuverLabel.LANE_CHANGE_LEFT
    if later > now:
        return ManeuverLabel.LANE_CHANGE_RIGHT
    return ManeuverLabel.LANE_KEEP


def extract_windows(ds: Dataset, k: int, horizon: int, stride: int = 1) -> list[Window]:
    """Sliding windows of k context states with labels at the last context
    frame. Window starts step by `stride`; short trajectories yield none."""
    if k < 1 or horizon < 1 or stride < 1:
        raise ValueError("k, horizon, and stride must all be >= 1")
    windows: list[Window] = []
    for traj in ds.trajectories:
        length = len(traj.states)
        start = 0
        while start + k + horizon <= length:
            context = traj.states[start : start + k]
            label = derive_label(traj, start + k - 1, horizon)
            windows.append(Window(context, label, traj.vehicle_id))
            start += stride
    return windows


def shard_for_clients(
    windows: Sequence[Window], n_clients: int, seed: int
) -> list[list[Window]]:
    """Partition windows across clients, keeping each vehicle on one client.

    Assignment is a seeded hash of the vehicle id, so shards are disjoint,
    cover the input, and are stable for a given seed.
    """
    if n_clients < 1:
        raise ValueError("n_clients must be >= 1")
    shards: list[list[Window]] = [[] for _ in range(n_clients)]
    assignment: dict[int, int] = {}
    for w in windows:
        client = assignment.get(w.source_vehicle)
        if client is None:
            client = child_seed(seed, w.source_vehicle) % n_clients
            assignment[w.source_vehicle] = client
        shards[client].append(w)
    return shards


def split_train_val_test(
    ds: Dataset, fractions: tuple[float, float, float], seed: int
) -> tuple[Dataset, Dataset, Dataset]:
    """Trajectory-level split with a seeded shuffle.

    Rounding rule: val and test sizes round half-up from fraction * n, the
    train split takes the remainder.
    """
    f_tr, f_val, f_te = fractions
    if min(f_tr, f_val, f_te) <= 0 or abs(f_tr + f_val + f_te - 1.0) > 1e-9:
        raise BadFractionsError(f"fractions must be positive and sum to 1, got {fractions}")
    n = len(ds.trajectories)
    n_val = int(f_val * n + 0.5)
    n_te = int(f_te * n + 0.5)
    n_tr = n - n_val - n_te
    if n_tr < 0:
        raise BadFractionsError(f"rounded val+test ({n_val}+{n_te}) exceed {n}")
    order = rng_from(seed, "split").permutation(n)
    shuffled = [ds.trajectories[i] for i in order]

    def _mk(trajs: Iterable[Trajectory]) -> Dataset:
        return Dataset(tuple(trajs), origin=ds.origin, dt=ds.dt)

    return (
        _mk(shuffled[:n_tr]),
        _mk(shuffled[n_tr : n_tr + n_val]),
        _mk(shuffled[n_tr + n_val :]),
    )
