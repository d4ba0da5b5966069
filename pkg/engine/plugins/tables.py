"""Atomic table and text output.

   Every table goes out twice: a display copy rounded to the run's precision and a `_full`
   companion carrying 17 significant digits.
"""
import os
import tempfile
import typing

import pandas

FULL_FORMAT = "%.17g"


def write_text_atomic(path: str, text: str):
    """Writes to a temporary file next to `path` and renames it into place"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def frame_text(frame: pandas.DataFrame, float_format: str) -> str:
    return frame.to_csv(index=False, float_format=float_format, na_rep="", lineterminator="\n")


def write_table(out_dir: str, name: str, frame: pandas.DataFrame, precision: int) -> typing.List[str]:
    """Writes <name>.csv at display precision and <name>_full.csv at full precision"""
    display = os.path.join(out_dir, f"{name}.csv")
    full = os.path.join(out_dir, f"{name}_full.csv")
    write_text_atomic(display, frame_text(frame, f"%.{precision}f"))
    write_text_atomic(full, frame_text(frame, FULL_FORMAT))
    print(f"Wrote {display} and {full}")
    return [display, full]
