import os
import tempfile
import unittest

from unittest import mock

from src.logforms import field_table

import pandas as pd


class TestFieldTable(unittest.TestCase):
    """Test the functions in field_table.py."""

    def __init__(self, method_name: str = "runTest") -> None:
        """Initialize test class."""
        super().__init__(method_name)

    def test_field_moduli(self) -> None:
        """Test that field_moduli.csv loads as expected."""
        test_data = field_table.field_moduli()
        self.assertIsInstance(test_data, pd.DataFrame)
        self.assertEqual(list(test_data.columns), ["p", "k", "modulus"])
        self.assertEqual(test_data.query("p == 2 and k == 2").iloc[0]["modulus"], (1, 1, 1))

    def test_default_modulus(self) -> None:
        """Check that tabulated moduli are monic of the right degree."""
        self.assertEqual(field_table.default_modulus(3, 2), (2, 2, 1))
        self.assertEqual(field_table.default_modulus(5, 3), (3, 3, 0, 1))
        for row in field_table.field_moduli().itertuples():
            self.assertEqual(len(row.modulus), row.k + 1)
            self.assertEqual(row.modulus[-1], 1)

    def test_default_modulus_missing(self) -> None:
        """Check that a missing entry gives None."""
        self.assertIsNone(field_table.default_modulus(2, 11))

    def test_environment_override(self) -> None:
        """Check that LOGFORMS_FIELD_TABLE replaces the packaged table."""
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "moduli.csv")
            with open(path, "w") as handle:
                handle.write('p,k,modulus\n3,2,"1 0 1"\n2,2,"1 1"\n')
            with mock.patch.dict(os.environ, {field_table.TABLE_ENV_VAR: path}):
                self.assertEqual(str(field_table.table_path()), path)
                self.assertEqual(field_table.default_modulus(3, 2), (1, 0, 1))
                self.assertIsNone(field_table.default_modulus(5, 2))
                with self.assertRaises(ValueError):
                    field_table.default_modulus(2, 2)
        self.assertEqual(field_table.default_modulus(3, 2), (2, 2, 1))
