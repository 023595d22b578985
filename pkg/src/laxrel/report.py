from dataclasses import dataclass, field


@dataclass
class LawResult:
    name: str
    passed: bool
    checked: int = 0
    witness: object = None
    required: bool = True
    note: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        if not self.required:
            status = "INFO " + ("yes" if self.passed else "no")
        text = f"{status} {self.name} ({self.checked} checked)"
        if self.note:
            text += f" [{self.note}]"
        if not self.passed and self.witness is not None:
            text += f" witness={self.witness}"
        return text


@dataclass
class LawReport:
    """Per-law verdicts; failures carry a witness instead of raising."""

    subject: str
    results: list = field(default_factory=list)

    def add(self, name, passed, checked=0, witness=None, required=True, note=""):
        res = LawResult(name, bool(passed), checked, witness, required, note)
        self.results.append(res)
        return res

    @property
    def ok(self):
        return all(r.passed for r in self.results if r.required)

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name):
        return any(r.name == name for r in self.results)

    def failures(self):
        return [r for r in self.results if r.required and not r.passed]

    def to_dict(self):
        return {
            "subject": self.subject,
            "ok": self.ok,
            "laws": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "checked": r.checked,
                    "required": r.required,
                    "note": r.note,
                    "witness": None if r.witness is None else repr(r.witness),
                }
                for r in self.results
            ],
        }

    def __str__(self):
        head = f"{self.subject}: {'ok' if self.ok else 'FAILED'}"
        return "\n".join([head] + ["  " + r.line() for r in self.results])
