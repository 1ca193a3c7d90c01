import logging
import os

import pandas as pd

from functools import lru_cache
from importlib.resources import files

from src.logforms.errors import PreconditionError

logger = logging.getLogger(__name__)

# Environment variable naming a CSV that replaces the packaged moduli table.
TABLE_ENV_VAR = "LOGFORMS_FIELD_TABLE"


def table_path():
    """Return the path of the field moduli table in use.

    Returns:
        The value of LOGFORMS_FIELD_TABLE when set, else the packaged
        field_moduli.csv.
    """
    override = os.environ.get(TABLE_ENV_VAR)
    if override:
        return override
    return files("src.logforms.data").joinpath("field_moduli.csv")


@lru_cache(maxsize=8)
def _read_table(path: str) -> pd.DataFrame:
    return_df = pd.read_csv(path, dtype={"p": int, "k": int, "modulus": str})
    return_df["modulus"] = return_df["modulus"].apply(
        lambda x: tuple(int(i) for i in x.split())
    )
    return return_df


def field_moduli() -> pd.DataFrame:
    """Load the field moduli table.

    Each row holds a prime p, a degree k and the coefficients of a monic
    irreducible polynomial of degree k over F_p, low degree first.

    Returns:
        A pandas data frame with columns p, k and modulus.
    """
    return _read_table(str(table_path()))


def default_modulus(p: int, k: int) -> tuple[int, ...] | None:
    """Look up the tabulated modulus for F_{p^k}.

    Args:
        p: Characteristic.
        k: Extension degree.

    Returns:
        The modulus coefficients low degree first, or None when the table has
        no entry.
    """
    table = field_moduli()
    rows = table.query("p == @p and k == @k")
    if rows.empty:
        logger.info("no tabulated modulus for p=%d k=%d", p, k)
        return None
    modulus = rows.iloc[0]["modulus"]
    if len(modulus) != k + 1 or modulus[-1] != 1:
        raise PreconditionError(
            f"Field table entry for p={p}, k={k} is not monic of degree {k}: {modulus}"
        )
    return modulus
