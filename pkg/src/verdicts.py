"""
Трёхзначные вердикты условий и отчёты фильтра
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Union


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    UNKNOWN = "UNKNOWN"

    def __str__(self) -> str:
        return self.value


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """FAIL если есть FAIL, иначе UNKNOWN если есть UNKNOWN, иначе PASS"""
    verdicts = list(verdicts)
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.UNKNOWN in verdicts:
        return Verdict.UNKNOWN
    return Verdict.PASS


def witness_text(**values) -> str:
    """Свидетель без пробелов: "n=1,count=-39" """
    return ",".join(f"{k}={v}" for k, v in values.items())


@dataclass(frozen=True)
class ConditionResult:
    name: str
    verdict: Verdict
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def format(self) -> str:
        text = f"cond:{self.name}={self.verdict}"
        if self.witness:
            text += f":{self.witness}"
        return text


@dataclass
class FilterReport:
    """Вердикты условий по одному входу; каждое условие ровно один раз"""

    input_id: Union[int, str]
    conditions: Dict[str, ConditionResult] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)

    def add(self, result: ConditionResult) -> ConditionResult:
        if result.name in self.conditions:
            raise ValueError(f"условие {result.name} уже в отчёте")
        self.conditions[result.name] = result
        return result

    def note(self, key: str, value) -> None:
        self.notes[key] = str(value)

    def __getitem__(self, name: str) -> ConditionResult:
        return self.conditions[name]

    def __contains__(self, name: str) -> bool:
        return name in self.conditions

    @property
    def overall(self) -> Verdict:
        return combine(c.verdict for c in self.conditions.values())

    def failures(self) -> List[ConditionResult]:
        return [c for c in self.conditions.values() if c.verdict is Verdict.FAIL]

    def format_record(self) -> str:
        """id=<id> overall=<V> cond:<name>=<V>[:witness] ... note:<key>=<value>"""
        parts = [f"id={self.input_id}", f"overall={self.overall}"]
        parts += [c.format() for c in self.conditions.values()]
        parts += [f"note:{k}={v}" for k, v in self.notes.items()]
        return " ".join(parts)

    def format_table(self) -> str:
        width = max([len(n) for n in self.conditions] + [7])
        lines = [f"input {self.input_id}: {self.overall}"]
        for c in self.conditions.values():
            line = f"  {c.name:<{width}}  {str(c.verdict):<7}"
            if c.witness:
                line += f"  {c.witness}"
            lines.append(line.rstrip())
        for k, v in self.notes.items():
            lines.append(f"  # {k} = {v}")
        return "\n".join(lines)
