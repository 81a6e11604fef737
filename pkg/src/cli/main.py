from __future__ import annotations
import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from errores import ColaError, ConfigError, ParseError
from experimentos.barrido import sweep
from experimentos.configuracion import ExperimentConfig, RunConfig, load_config
from experimentos.construccion import (
    build_problem,
    run_diging_from_config,
    run_from_config,
    validate_run_config,
)
from experimentos.referencia import cached_reference
from experimentos.traza import emit_diging

logger = logging.getLogger("cli")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# códigos de salida
EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _out_dir(exp: ExperimentConfig) -> Path:
    return exp.resolved_output_dir


def _trace_path(exp: ExperimentConfig, override: Optional[str], name: str) -> Path:
    if override:
        return Path(override)
    if exp.run.output:
        return Path(exp.run.output)
    return _out_dir(exp) / name


# -------------------------------------------------------
# Subcomandos
# -------------------------------------------------------

def cmd_run(args: argparse.Namespace, exp: ExperimentConfig) -> int:
    cfg = exp.run
    if cfg.baseline == "diging":
        result = run_diging_from_config(cfg)
        emit_diging(result, _trace_path(exp, args.output, "diging.csv"))
        print(f"DIGing α={result.alpha:g}  F_B final={result.objective[-1]:.12g}")
        return EXIT_OK
    out = _trace_path(exp, args.output, "traza.csv")
    trace = run_from_config(cfg, output=out, certs_output=Path(args.certs) if args.certs else None)
    last = trace.records[-1]
    print(f"{len(trace)} rondas  F_A={last.FA:.12g}  H_A={last.HA:.12g}  G_H={last.gap:.3e}  -> {out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, exp: ExperimentConfig) -> int:
    if args.output_dir:
        exp = replace(exp, output_dir=args.output_dir)
    if exp.sweep.empty:
        logger.warning("el barrido no tiene ejes: se ejecuta un solo punto")
    for point in sweep(exp, keep_traces=False):
        print(point.path)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace, exp: ExperimentConfig) -> int:
    cfg: RunConfig = exp.run
    if args.epsilon is not None:
        cfg = replace(cfg, cert_epsilon=args.epsilon)
    if cfg.cert_epsilon is None:
        raise ConfigError("certify necesita cert_epsilon en la config o --epsilon")
    out = _trace_path(exp, args.output, "traza.csv")
    certs = Path(args.certs) if args.certs else out.with_name("certs.csv")
    trace = run_from_config(cfg, output=out, certs_output=certs)
    first = trace.first_all_pass()
    if first is None:
        print(f"ningún certificado completo con ε={cfg.cert_epsilon:g} en {len(trace) - 1} rondas")
    else:
        print(f"todas las condiciones locales se cumplen desde la ronda {first} (ε={cfg.cert_epsilon:g})")
    return EXIT_OK


def cmd_reference(args: argparse.Namespace, exp: ExperimentConfig) -> int:
    cfg = exp.run
    problem = build_problem(cfg)
    cache = Path(args.cache_dir) if args.cache_dir else _out_dir(exp) / "cache"
    ref = cached_reference(problem, cfg.reference_budget, cache, gap_target=cfg.reference_gap)
    summary = {
        "f_star": ref.f_star,
        "updates": ref.updates,
        "gap": ref.gap,
        "converged": ref.converged,
        "warning": ref.warning,
    }
    text = json.dumps(summary, indent=2)
    if args.output:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, exp: ExperimentConfig) -> int:
    built, pre = validate_run_config(exp.run)
    print(
        f"config válida: n={built.problem.n} d={built.problem.d} K={pre.K} "
        f"β={pre.beta:.6g} σ′={pre.sigma_prime:.6g}"
    )
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "reference": cmd_reference,
    "validate-config": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cola",
        description="Entrenamiento descentralizado CoLa: ejecuciones, barridos y certificados.",
    )
    p.add_argument("--log-level", default="INFO",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                   help="Nivel de logging (por defecto INFO).")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="Fichero JSON de configuración.")
        return sp

    sp = with_config("run", "Ejecuta una configuración y escribe la traza CSV.")
    sp.add_argument("--output", help="Ruta de la traza (sustituye a 'output').")
    sp.add_argument("--certs", help="Ruta de certs.csv.")

    sp = with_config("sweep", "Recorre los ejes κ / topología / p.")
    sp.add_argument("--output-dir", help="Directorio de salida del barrido.")

    sp = with_config("certify", "Ejecuta con certificados locales activos.")
    sp.add_argument("--epsilon", type=float, help="Precisión ε objetivo.")
    sp.add_argument("--output", help="Ruta de la traza.")
    sp.add_argument("--certs", help="Ruta de certs.csv.")

    sp = with_config("reference", "Calcula (o lee de caché) el óptimo de referencia F_A★.")
    sp.add_argument("--cache-dir", help="Directorio de la caché.")
    sp.add_argument("--output", help="Escribe el resumen JSON en esta ruta.")

    with_config("validate-config", "Valida la config y pasa los chequeos previos.")
    return p


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada; devuelve el código de salida en vez de salir."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        # argparse ya escribió el diagnóstico
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG

    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)
    try:
        exp = load_config(args.config)
        return COMMANDS[args.command](args, exp)
    except (ConfigError, ParseError) as exc:
        logger.error("%s", exc)
        print(f"error de configuración: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ColaError, OSError) as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
