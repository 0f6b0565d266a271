"""
Data loading and persistence for polytopes, weights, PL functions, cut lists and result records
"""

import hashlib
import json
import logging
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd

from config.settings import DATA_DIR, FLOAT_SIGNIFICANT_DIGITS, HASH_PREFIX_LENGTH
from geometry.linalg import to_fraction
from geometry.polytope import Polytope, format_rational, polytope_from_dict
from quadrature.polynomial import Polynomial, Weight, weight_from_dict
from stability.pl_functions import PLConvexFunction

logger = logging.getLogger(__name__)

# offset None marks a shift of an existing facet
Cut = Tuple[Tuple[int, ...], Optional[Fraction], Fraction]


def round_float(value: float) -> float:
    """Round to FLOAT_SIGNIFICANT_DIGITS significant digits"""
    return float(f"{value:.{FLOAT_SIGNIFICANT_DIGITS}g}")


def to_serializable(value: Any) -> Any:
    """Rationals become "p/q" strings, floats keep FLOAT_SIGNIFICANT_DIGITS digits"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    if isinstance(value, float):
        return round_float(value)
    if isinstance(value, dict):
        return {str(k): to_serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_serializable(v) for v in value]
    if hasattr(value, "item"):
        return to_serializable(value.item())
    return value


def parse_number(value: Any) -> Any:
    """Inverse of to_serializable for a scalar: "p/q" strings are rationals, numbers are floats"""
    if value is None:
        return None
    if isinstance(value, float):
        return None if value != value else value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    text = str(value).strip()
    if not text or text.lower() == "nan":
        return None
    if any(ch in text for ch in ".eE") and "/" not in text:
        return float(text)
    return Fraction(text)


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline"""
    return json.dumps(to_serializable(data), indent=2, sort_keys=True) + "\n"


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class DataLoader:
    """Utility class for loading and saving toolkit files"""

    def __init__(self, data_dir: Union[str, Path] = None):
        """
        Initialize DataLoader

        Args:
            data_dir: Directory for result files
        """
        self.data_dir = Path(data_dir) if data_dir else DATA_DIR
        self.supported_formats = [".json", ".csv", ".md"]

    def load_data(self, file_path: Union[str, Path]) -> Union[Dict, List, pd.DataFrame]:
        """
        Load a JSON document or a CSV table

        Args:
            file_path: Path to the data file

        Returns:
            Parsed JSON, or a DataFrame of strings for CSV
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")

        file_extension = file_path.suffix.lower()

        try:
            if file_extension == ".json":
                with open(file_path, encoding="utf-8") as handle:
                    return json.load(handle)
            elif file_extension == ".csv":
                return pd.read_csv(file_path, dtype=str, keep_default_na=False)
            else:
                raise ValueError(f"Unsupported file format: {file_extension}")

        except Exception as e:
            logger.error(f"Error loading file {file_path}: {str(e)}")
            raise

    def save_data(self, data: Union[Dict, List, pd.DataFrame, str], file_path: Union[str, Path]) -> Path:
        """
        Save a JSON document, a DataFrame as CSV, or text as markdown

        Args:
            data: Object to save
            file_path: Path where to save the file
        """
        file_path = Path(file_path)
        file_extension = file_path.suffix.lower()

        file_path.parent.mkdir(parents=True, exist_ok=True)

        try:
            if file_extension == ".json":
                file_path.write_text(data if isinstance(data, str) else dumps(data), encoding="utf-8")
            elif file_extension == ".csv":
                data.to_csv(file_path, index=False)
            elif file_extension == ".md":
                file_path.write_text(data, encoding="utf-8")
            else:
                raise ValueError(f"Unsupported file format: {file_extension}")

            logger.info(f"Data saved successfully to {file_path}")
            return file_path

        except Exception as e:
            logger.error(f"Error saving file {file_path}: {str(e)}")
            raise

    def save_result(self, kind: str, text: str, extension: str) -> Path:
        """Write text to <kind>-<sha256 prefix>.<extension> inside data_dir"""
        digest = content_hash(text)[:HASH_PREFIX_LENGTH]
        path = self.data_dir / f"{kind}-{digest}.{extension}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {path}")
        return path

    def load_polytope(self, file_path: Union[str, Path]) -> Polytope:
        data = self.load_data(file_path)
        try:
            return polytope_from_dict(data)
        except Exception as e:
            logger.error(f"Invalid polytope in {file_path}: {str(e)}")
            raise

    def load_weight(self, file_path: Optional[Union[str, Path]], dim: int,
                    quadrature_degree: Optional[int] = None) -> Weight:
        """Weight from a polynomial or smooth-weight file; the constant 1 when no file is given"""
        if file_path is None:
            return Polynomial.constant(dim, 1)
        weight = weight_from_dict(self.load_data(file_path), dim)
        if quadrature_degree is not None and not isinstance(weight, Polynomial):
            weight = weight.with_degree(quadrature_degree)
        return weight

    def load_pl_function(self, file_path: Union[str, Path], domain: Polytope) -> PLConvexFunction:
        return PLConvexFunction.from_dict(self.load_data(file_path), domain)

    def load_cuts(self, file_path: Optional[Union[str, Path]]) -> List[Cut]:
        """
        Cut list {"cuts": [{"normal": [...], "offset": "a", "rate": "r"}, ...],
        "shifts": [{"normal": [...], "rate": "r"}, ...]}.

        Each cut is <u, y> + a - eps * r >= 0; each shift moves the facet with
        normal u to <u, y> + a_F - eps * r >= 0 and is returned with offset
        None. Rates default to 1.
        """
        if file_path is None:
            return []
        data = self.load_data(file_path)
        entries = data.get("cuts", []) if isinstance(data, dict) else data
        shifts = data.get("shifts", []) if isinstance(data, dict) else []
        cuts = []
        for entry in entries:
            normal = tuple(int(x) for x in entry["normal"])
            cuts.append((normal, to_fraction(entry["offset"]), to_fraction(entry.get("rate", 1))))
        for entry in shifts:
            normal = tuple(int(x) for x in entry["normal"])
            cuts.append((normal, None, to_fraction(entry.get("rate", 1))))
        return cuts

    def raw_normals(self, file_path: Union[str, Path]) -> List[Tuple[int, ...]]:
        """Normals exactly as written, before normalization"""
        data = self.load_data(file_path)
        return [tuple(to_fraction(x) for x in h["normal"]) for h in data.get("halfspaces", [])]


def is_primitive(normal) -> bool:
    if any(Fraction(x).denominator != 1 for x in normal):
        return False
    g = 0
    for x in normal:
        g = gcd(g, abs(int(x)))
    return g == 1


# Convenience functions
def load_polytope(file_path: Union[str, Path]) -> Polytope:
    """Load a polytope JSON file"""
    loader = DataLoader()
    return loader.load_polytope(file_path)


def load_weight(file_path: Optional[Union[str, Path]], dim: int) -> Weight:
    """Load a weight JSON file"""
    loader = DataLoader()
    return loader.load_weight(file_path, dim)


def save_json(data: Any, file_path: Union[str, Path]) -> Path:
    """Save a JSON document"""
    loader = DataLoader()
    return loader.save_data(data, file_path)
