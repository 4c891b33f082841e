"""Reader for the benchmark CSV schema.

Expected header:
run_id,method,p_min,p_max,dofs,err_l2,err_h1,err_dg,max_sigma_interior,
max_sigma_global,cond2,iters,wall_ms
"""

import csv
from dataclasses import dataclass

REQUIRED_COLUMNS = (
    "run_id",
    "method",
    "p_min",
    "p_max",
    "dofs",
    "err_l2",
    "err_h1",
    "err_dg",
    "max_sigma_interior",
    "max_sigma_global",
    "cond2",
    "iters",
    "wall_ms",
)

_FLOAT_COLUMNS = {
    "err_l2",
    "err_h1",
    "err_dg",
    "max_sigma_interior",
    "max_sigma_global",
    "cond2",
    "wall_ms",
}
_INT_COLUMNS = {"p_min", "p_max", "dofs", "iters"}


class CsvError(ValueError):
    pass


@dataclass
class Runs:
    rows: list

    @property
    def methods(self):
        seen = []
        for row in self.rows:
            if row["method"] not in seen:
                seen.append(row["method"])
        return seen

    def column(self, method, name):
        return [row[name] for row in self.rows if row["method"] == method]


def read_runs(path) -> Runs:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CsvError(f"{path}: empty file")
        missing = set(REQUIRED_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise CsvError(f"{path}: missing columns {sorted(missing)}")
        rows = []
        for raw in reader:
            row = dict(raw)
            try:
                for c in _FLOAT_COLUMNS:
                    row[c] = float(raw[c])
                for c in _INT_COLUMNS:
                    row[c] = int(raw[c])
            except (TypeError, ValueError) as exc:
                raise CsvError(f"{path}: bad numeric value in row {raw}: {exc}") from None
            rows.append(row)
    if not rows:
        raise CsvError(f"{path}: no data rows")
    return Runs(rows)
