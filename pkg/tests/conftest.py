import pathlib

VECTOR_DIR = pathlib.Path(__file__).parent / "vectors"


def load_vectors(name: str) -> list[tuple[int, int, int, int]]:
    """Parse 'key plaintext rounds ciphertext' golden files."""
    rows = []
    for line in (VECTOR_DIR / name).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, pt, rounds, ct = line.split()
        rows.append((int(key, 16), int(pt, 16), int(rounds), int(ct, 16)))
    return rows
