"""
Unit tests for data loader utilities
"""

import json
import pytest
import pandas as pd
from fractions import Fraction
from pathlib import Path
import tempfile

# Import the module to test
import sys
sys.path.append(str(Path(__file__).parent.parent / "src"))
from config.settings import EXAMPLES_DIR
from quadrature.polynomial import Polynomial, SmoothWeight
from utils.data_loader import (DataLoader, dumps, is_primitive, load_polytope, load_weight, parse_number,
                               save_json, to_serializable)


class TestDataLoader:
    """Test cases for DataLoader class"""

    def setup_method(self):
        """Set up test fixtures"""
        self.temp_dir = tempfile.mkdtemp()
        self.loader = DataLoader(self.temp_dir)
        self.sample_data = pd.DataFrame({
            'eps': ['0', '1/16'],
            'delta': ['2/3', '1/2'],
            'status': ['Optimal', 'Optimal']
        })

    def teardown_method(self):
        """Clean up test fixtures"""
        import shutil
        shutil.rmtree(self.temp_dir)

    def test_load_json(self):
        """Test loading a JSON document"""
        json_path = Path(self.temp_dir) / "doc.json"
        json_path.write_text('{"a": "1/2"}', encoding="utf-8")

        assert self.loader.load_data(json_path) == {"a": "1/2"}

    def test_load_csv_keeps_strings(self):
        """Test loading CSV file"""
        csv_path = Path(self.temp_dir) / "test.csv"
        self.sample_data.to_csv(csv_path, index=False)

        loaded_data = self.loader.load_data(csv_path)

        assert isinstance(loaded_data, pd.DataFrame)
        pd.testing.assert_frame_equal(loaded_data, self.sample_data)

    def test_missing_and_unsupported(self):
        """Test missing files and unsupported formats"""
        with pytest.raises(FileNotFoundError):
            self.loader.load_data(Path(self.temp_dir) / "missing.json")
        text_path = Path(self.temp_dir) / "notes.txt"
        text_path.write_text("x", encoding="utf-8")
        with pytest.raises(ValueError):
            self.loader.load_data(text_path)

    def test_save_data(self):
        """Test saving JSON, CSV and markdown"""
        json_path = self.loader.save_data({"b": Fraction(1, 3), "a": 2}, Path(self.temp_dir) / "out.json")
        assert json.loads(json_path.read_text()) == {"a": "2", "b": "1/3"}

        csv_path = self.loader.save_data(self.sample_data, Path(self.temp_dir) / "out.csv")
        pd.testing.assert_frame_equal(self.loader.load_data(csv_path), self.sample_data)

        md_path = self.loader.save_data("# Title\n", Path(self.temp_dir) / "out.md")
        assert md_path.read_text() == "# Title\n"

        with pytest.raises(ValueError):
            self.loader.save_data("x", Path(self.temp_dir) / "out.xlsx")

    def test_save_result_content_hash(self):
        """Test content-hash filenames for results"""
        first = self.loader.save_result("check", "{}\n", "json")
        second = self.loader.save_result("check", "{}\n", "json")
        other = self.loader.save_result("check", "[]\n", "json")
        assert first == second
        assert first != other
        assert first.name.startswith("check-")
        assert len(first.stem) == len("check-") + 12

    def test_load_polytope(self):
        """Test loading a polytope"""
        P = self.loader.load_polytope(EXAMPLES_DIR / "square.json")
        assert P.volume == 4
        assert self.loader.load_polytope(EXAMPLES_DIR / "simplex.json").volume == Fraction(1, 2)

    def test_load_weight(self):
        """Test loading default, polynomial and smooth weights"""
        assert self.loader.load_weight(None, 2) == Polynomial.constant(2, 1)
        tilted = self.loader.load_weight(EXAMPLES_DIR / "tilted_weight.json", 2)
        assert tilted.evaluate((2, 0)) == 3
        gaussian = self.loader.load_weight(EXAMPLES_DIR / "gaussian_weight.json", 2, quadrature_degree=9)
        assert isinstance(gaussian, SmoothWeight)
        assert gaussian.quadrature_degree == 9

    def test_load_weight_dimension_mismatch(self):
        """Test weight dimension validation"""
        with pytest.raises(ValueError):
            self.loader.load_weight(EXAMPLES_DIR / "tilted_weight.json", 1)

    def test_load_cuts(self):
        """Test loading cut and facet shift lists"""
        assert self.loader.load_cuts(None) == []
        assert self.loader.load_cuts(EXAMPLES_DIR / "corner_cut.json") == [((-1, -1), Fraction(2), Fraction(1))]
        assert self.loader.load_cuts(EXAMPLES_DIR / "facet_shift.json") == [((1, 0), None, Fraction(-1))]

    def test_load_pl_function(self):
        """Test loading a PL function"""
        P = self.loader.load_polytope(EXAMPLES_DIR / "square.json")
        f = self.loader.load_pl_function(EXAMPLES_DIR / "hinge.json", P)
        assert f((Fraction(1, 2), 0)) == Fraction(1, 2)

    def test_raw_normals(self):
        """Test reading normals before normalization"""
        path = Path(self.temp_dir) / "scaled.json"
        path.write_text(json.dumps({"halfspaces": [{"normal": [2, 0], "offset": "2"},
                                                   {"normal": [-1, 0], "offset": "1"}]}))
        normals = self.loader.raw_normals(path)
        assert normals == [(2, 0), (-1, 0)]
        assert not is_primitive(normals[0])
        assert is_primitive(normals[1])


class TestSerialization:
    """Test cases for rational and float serialization"""

    def test_to_serializable(self):
        """Test rational and float serialization"""
        assert to_serializable(Fraction(-3, 4)) == "-3/4"
        assert to_serializable(5) == "5"
        assert to_serializable(0.12345678901234567) == 0.123456789012
        assert to_serializable({"x": [Fraction(1, 2), None, True]}) == {"x": ["1/2", None, True]}

    def test_parse_number(self):
        """Test parsing serialized numbers"""
        assert parse_number("1/3") == Fraction(1, 3)
        assert parse_number("7") == Fraction(7)
        assert parse_number("0.25") == 0.25
        assert parse_number("1e-3") == 0.001
        assert parse_number("") is None
        assert parse_number(None) is None

    def test_dumps_is_canonical(self):
        """Test canonical JSON output"""
        assert dumps({"b": 1, "a": Fraction(1, 2)}) == dumps({"a": Fraction(1, 2), "b": 1})
        assert dumps({}).endswith("\n")


class TestConvenienceFunctions:
    """Test cases for convenience functions"""

    def setup_method(self):
        """Set up test fixtures"""
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        """Clean up test fixtures"""
        import shutil
        shutil.rmtree(self.temp_dir)

    def test_load_polytope_function(self):
        """Test load_polytope convenience function"""
        assert load_polytope(EXAMPLES_DIR / "interval.json").vertices == ((0,), (1,))

    def test_load_weight_function(self):
        """Test load_weight convenience function"""
        assert load_weight(None, 1) == Polynomial.constant(1, 1)

    def test_save_json_function(self):
        """Test save_json convenience function"""
        path = save_json({"eps": Fraction(1, 8)}, Path(self.temp_dir) / "eps.json")
        assert path.exists()
        assert json.loads(path.read_text()) == {"eps": "1/8"}


if __name__ == "__main__":
    pytest.main([__file__])
