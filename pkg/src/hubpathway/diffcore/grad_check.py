"""Central-finite-difference verification of reverse-mode gradients."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .tensor import Parameter, Tape


@dataclass
class GradCheckReport:
    passed: bool
    max_rel_err: float
    worst_param: str = ""
    worst_index: int = -1
    diagnostics: list[str] = field(default_factory=list)

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        msg = f"grad_check {status}: max rel err {self.max_rel_err:.3e}"
        if self.worst_param:
            msg += f" at {self.worst_param}[{self.worst_index}]"
        if self.diagnostics:
            msg += "; " + "; ".join(self.diagnostics)
        return msg


def grad_check(f, params, h: float = 1e-5, tol: float = 1e-6) -> GradCheckReport:
    """Compare reverse-mode gradients of f against central differences.

    f is a zero-argument callable returning a scalar Tensor; it must be a
    deterministic function of the parameter values (freeze any noise before
    calling). Error per coordinate is |ad - fd| / max(1, |ad|, |fd|), i.e.
    relative for large gradients and absolute below 1.

    Parameters are perturbed in place one coordinate at a time and restored
    bit-exactly from the saved original value.
    """
    if isinstance(params, Parameter):
        params = [params]
    params = list(params)

    for p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = f()
        if not math.isfinite(float(loss.data)):
            return GradCheckReport(
                False, math.inf, diagnostics=[f"non-finite loss {float(loss.data)}"]
            )
        tape.backward(loss)

    analytic = [
        p.grad.copy() if p.grad is not None else p.data * 0.0 for p in params
    ]

    report = GradCheckReport(True, 0.0)
    for p, ad in zip(params, analytic):
        flat = p.data.reshape(-1)
        adf = ad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            fp = float(f().data)
            flat[i] = orig - h
            fm = float(f().data)
            flat[i] = orig
            if not (math.isfinite(fp) and math.isfinite(fm)):
                report.passed = False
                report.max_rel_err = math.inf
                report.diagnostics.append(
                    f"non-finite evaluation at {p.name}[{i}]"
                )
                return report
            fd = (fp - fm) / (2.0 * h)
            err = abs(adf[i] - fd) / max(1.0, abs(adf[i]), abs(fd))
            if err > report.max_rel_err:
                report.max_rel_err = err
                report.worst_param = p.name
                report.worst_index = i
    report.passed = report.max_rel_err <= tol
    return report
