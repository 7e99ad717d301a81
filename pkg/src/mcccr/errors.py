"""Exception types shared across the package."""


class McccrError(ValueError):
    """Base class for all validation and data errors raised by mcccr."""


class DimensionMismatch(McccrError):
    def __init__(self, len_a: int, len_b: int):
        super().__init__(f"feature vectors have different lengths: {len_a} vs {len_b}")
        self.len_a = len_a
        self.len_b = len_b


class DegenerateGeometry(McccrError):
    """All cleaning spheres collapsed to zero radius; generation weights undefined."""


class DatasetFormatError(McccrError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class ConfigError(McccrError):
    def __init__(self, key_path: str, message: str):
        super().__init__(f"{key_path}: {message}")
        self.key_path = key_path
