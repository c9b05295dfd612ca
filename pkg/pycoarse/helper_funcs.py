from fractions import Fraction


def value_to_str(value):
    val_type = type(value)
    if val_type is str:
        return value
    if val_type is bool:
        return "true" if value else "false"
    if val_type is Fraction:
        return f"{value.numerator}/{value.denominator}"
    if val_type in (list, tuple):
        return " ".join(value_to_str(item) for item in value)
    if val_type in (set, frozenset):
        return " ".join(str(item) for item in sorted(value))
    if val_type in (int, float):
        return str(value)
    if callable(getattr(value, "describe", None)):
        return value.describe()
    return str(value)


def parse_fraction(text: str) -> Fraction:
    """Parse "p/q" or an integer into an exact Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def as_index_map(f, size):
    """Evaluate a callable or a sequence on range(size) as a list."""
    if callable(f):
        return [int(f(i)) for i in range(size)]
    values = [int(v) for v in f]
    if len(values) < size:
        raise IndexError(f"index map covers {len(values)} of {size} indices")
    return values[:size]


def grid_coords(index, shape):
    coords = []
    for side in reversed(shape):
        index, coord = divmod(index, side)
        coords.append(coord)
    return tuple(reversed(coords))
