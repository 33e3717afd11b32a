"""Exceptions shared across the package."""


class InputError(ValueError):
    """Malformed input file or inconsistent user data."""

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class BudgetExceeded(RuntimeError):
    """A configured size or search budget was exhausted."""


class VerificationError(AssertionError):
    """An instance-level check failed; carries the report that failed."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class Report:
    """Ordered list of violations. Empty means the check passed."""

    def __init__(self, name=""):
        self.name = name
        self.violations = []
        self.note = None

    def add(self, kind, **witness):
        self.violations.append((kind, witness))

    def extend(self, other):
        self.violations.extend(other.violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __len__(self):
        return len(self.violations)

    def kinds(self):
        return sorted({k for k, _ in self.violations})

    def as_dict(self, limit=20):
        return {
            "check": self.name,
            "ok": self.ok,
            "violations": [
                {"kind": k, "witness": {a: _plain(b) for a, b in w.items()}}
                for k, w in self.violations[:limit]
            ],
            "n_violations": len(self.violations),
            **({"note": self.note} if self.note else {}),
        }

    def __repr__(self):
        return f"Report({self.name!r}, {len(self.violations)} violations)"


def _plain(x):
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(y) for y in x)
    if isinstance(x, (int, str, float, bool)) or x is None:
        return x
    return str(x)
