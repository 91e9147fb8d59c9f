"""
qosc command line
Derived parameters, spectra, eigenvectors, the partner hierarchy and the
verification battery, written as JSON or CSV on stdout
"""

import argparse
import io
import json
import sys
from typing import Dict, List, Optional, TextIO, Tuple

import jsonschema
import pandas as pd
import structlog
from pydantic import ValidationError

from common.exceptions import DeformationDomainError, OscillatorError, QOverflowError, VerificationFailure
from common.logging import configure_logging
from . import deformation, eigenstates, spectrum
from .output_schemas import SCHEMAS
from .schemas import RunConfig, SpectrumRequest, VerificationReport
from .verification import run_verification

logger = structlog.get_logger()

COMMANDS = ("params", "spectrum", "eigvec", "hierarchy", "verify")
CSV_FLOAT_FORMAT = "%.17g"


def _parse_fault(value: str) -> Tuple[int, int]:
    try:
        n, m = (int(part) for part in value.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected N,M, got {value!r}") from e
    return n, m


class QoscRunner:
    """Runs one command and returns its JSON document plus the CSV table"""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dp = deformation.derive(deformation.make_params(cfg.alpha, cfg.beta))
        self.report: Optional[VerificationReport] = None

    def _header(self) -> Dict:
        return {
            "command": self.cfg.command,
            "alpha": self.dp.alpha,
            "beta": self.dp.beta,
            "regime": self.dp.regime.value,
        }

    @property
    def log_levels(self) -> bool:
        return self.cfg.log_domain or deformation.hierarchy_overflows(self.dp, self.cfg.levels)

    def _level_rows(self) -> List[Dict]:
        if self.log_levels:
            return [level.model_dump() for level in deformation.hierarchy_log(self.dp, self.cfg.levels)]
        return [level.model_dump() for level in deformation.hierarchy(self.dp, self.cfg.levels)]

    def cmd_params(self) -> Tuple[Dict, pd.DataFrame]:
        dp = self.dp
        p2, x2, constant = deformation.partner_h1(dp)
        scalars = {
            "k": dp.k, "gamma": dp.gamma, "g": dp.g, "s": dp.s, "q": dp.q, "log_q": dp.log_q,
            "u": dp.u, "v": dp.v, "t": dp.t, "one_minus_t2": dp.one_minus_t2, "d": dp.d,
            "K": dp.big_k, "eps0": dp.eps0,
            "hyperbola": deformation.hyperbola_constant(dp) if dp.gamma is not None else None,
        }
        document = {
            **self._header(),
            **scalars,
            "partner_h1": {"p2": p2, "x2": x2, "constant": constant},
            "log_domain": self.log_levels,
            "levels": self._level_rows(),
        }
        table = pd.DataFrame([{**self._header(), **scalars}])
        return document, table

    def cmd_spectrum(self) -> Tuple[Dict, pd.DataFrame]:
        request = SpectrumRequest(dp=self.dp, n_max=self.cfg.n_max, log_domain=self.cfg.log_domain)
        rows = [row.model_dump(exclude_none=True) for row in spectrum.spectrum_table(request)]
        document = {**self._header(), "log_domain": self.cfg.log_domain, "rows": rows}
        columns = ["n", "log_e_n", "log_excitation"] if self.cfg.log_domain else ["n", "e_n", "excitation"]
        return document, pd.DataFrame(rows).reindex(columns=columns)

    def cmd_eigvec(self) -> Tuple[Dict, pd.DataFrame]:
        expansion = eigenstates.eigenstate_fock(
            self.dp, self.cfg.state, sigma_max=self.cfg.sigma_max, tail_tol=self.cfg.tol
        )
        coefficients = [
            {"index": index, "value": value}
            for index, value in zip(expansion.fock_indices(), expansion.coeffs)
        ]
        document = {
            **self._header(),
            "n": expansion.n,
            "parity": expansion.parity,
            "sigma_max": expansion.sigma_max,
            "tail_bound": expansion.tail_bound,
            "norm_squared": expansion.norm_squared(),
            "closed_form_norm": expansion.closed_form_norm,
            "coefficients": coefficients,
        }
        return document, pd.DataFrame(coefficients, columns=["index", "value"])

    def cmd_hierarchy(self) -> Tuple[Dict, pd.DataFrame]:
        rows = self._level_rows()
        return {**self._header(), "log_domain": self.log_levels, "levels": rows}, pd.DataFrame(rows)

    def cmd_verify(self) -> Tuple[Dict, pd.DataFrame]:
        report = run_verification(
            self.dp,
            n_max=self.cfg.n_max,
            dim=self.cfg.dim,
            sigma_max=self.cfg.sigma_max,
            fault=self.cfg.inject_fault,
        )
        checks = [check.model_dump() for check in report.checks]
        document = {**self._header(), "passed": report.passed, "checks": checks}
        self.report = report
        return document, pd.DataFrame(checks, columns=["name", "status", "residual", "tolerance", "detail"])

    def run(self) -> Tuple[Dict, pd.DataFrame]:
        logger.info("command started", command=self.cfg.command, alpha=self.cfg.alpha, beta=self.cfg.beta)
        try:
            document, table = getattr(self, f"cmd_{self.cfg.command}")()
        except OverflowError as e:
            if isinstance(e, OscillatorError):
                raise
            raise QOverflowError(f"{self.cfg.command} overflowed in double precision: {e}") from e
        logger.info("command finished", command=self.cfg.command)
        return document, table


def write_result(document: Dict, table: pd.DataFrame, fmt: str, stream: TextIO) -> None:
    """Write one result; JSON documents are checked against their schema first"""
    if fmt == "json":
        jsonschema.validate(document, SCHEMAS[document["command"]])
        json.dump(document, stream, indent=2, allow_nan=False)
        stream.write("\n")
    else:
        buffer = io.StringIO()
        table.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        stream.write(buffer.getvalue())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qosc",
        description="Solve the harmonic oscillator with [X, P] = i(1 + alpha X^2 + beta P^2)",
    )
    parser.add_argument('command', choices=COMMANDS, help='What to compute')
    parser.add_argument('--alpha', type=float, required=True, help='Position deformation alpha >= 0')
    parser.add_argument('--beta', type=float, required=True, help='Momentum deformation beta >= 0')
    parser.add_argument('--n-max', type=int, default=10, help='Highest level in tables and checks (default: 10)')
    parser.add_argument('--dim', type=int, default=400, help='Truncated Fock dimension for the oracle (default: 400)')
    parser.add_argument('--sigma-max', type=int, default=None, help='Fock expansion length (default: adaptive)')
    parser.add_argument('--levels', type=int, default=5, help='Hierarchy levels to report (default: 5)')
    parser.add_argument('--tol', type=float, default=1e-10, help='Tail tolerance for eigenvectors (default: 1e-10)')
    parser.add_argument('--format', choices=("json", "csv"), default="json", help='Output format (default: json)')
    parser.add_argument('--log-domain', action='store_true', help='Report spectra and hierarchy levels as logarithms')
    parser.add_argument('--state', type=int, default=0, help='Eigenstate index for eigvec (default: 0)')
    parser.add_argument('--log-level', type=str, default=None, help='Log level (default: QOSC_LOG_LEVEL)')
    parser.add_argument('--inject-fault', type=_parse_fault, default=None, help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[List[str]] = None, stream: Optional[TextIO] = None) -> int:
    """Entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    stream = stream or sys.stdout

    try:
        try:
            cfg = RunConfig(
                command=args.command,
                alpha=args.alpha,
                beta=args.beta,
                n_max=args.n_max,
                dim=args.dim,
                sigma_max=args.sigma_max,
                levels=args.levels,
                tol=args.tol,
                format=args.format,
                log_domain=args.log_domain,
                state=args.state,
                inject_fault=args.inject_fault,
            )
        except ValidationError as e:
            raise DeformationDomainError(f"invalid arguments: {e.errors()[0]['msg']}") from e

        runner = QoscRunner(cfg)
        document, table = runner.run()
        write_result(document, table, cfg.format, stream)
        if cfg.command == "verify":
            runner.report.raise_for_errors()
            if not runner.report.passed:
                raise VerificationFailure(f"failed checks: {', '.join(runner.report.failed_checks())}")
    except OscillatorError as e:
        logger.debug("command failed", error=str(e), exit_code=e.exit_code)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
