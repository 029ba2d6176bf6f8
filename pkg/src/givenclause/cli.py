"""Command-line interface.

Subcommands:
  run                  drive an agent through episodes, write statistics
  report               render reward-curve figures from statistics files
  serve-env            expose one environment over JSON lines (stdio/TCP)
  serve-stub-embedder  loopback embedding service with stub vectors
  relay                listen for a client-style prover and guide it

Exit codes: 0 success, 1 validation problem, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import shlex
import sys

from .env import EnvConfig
from .runner import ConfigError, ExperimentConfig, run_experiment
from .tptp import ProblemFileError

VALIDATION_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(VALIDATION_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="givenclause", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--agent", choices=("random", "thompson"), default="random")
    run.add_argument("--backend", choices=("embedded", "stdio", "relay"),
                     default="embedded")
    run.add_argument("--problem", default=None, help="TPTP problem path")
    run.add_argument("--max-clauses", type=int, default=1000)
    run.add_argument("--episodes", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--wrapper", choices=("none", "bandit"), default="none")
    run.add_argument("--step-limit", type=int, default=None)
    run.add_argument("--out", default=None, help="statistics file (JSON lines)")
    run.add_argument("--plot", action="store_true",
                     help="also render the reward curve next to --out")
    run.add_argument("--stdio-command", default=None,
                     help="prover command template; {problem} is substituted "
                          "(default: the bundled stdio double)")
    run.add_argument("--relay-port", type=int, default=0,
                     help="relay listener port (0 picks a free one)")
    run.add_argument("--relay-client", choices=("double", "external"),
                     default="double",
                     help="who connects to the relay: the bundled embedded "
                          "double, or an externally launched prover")

    report = sub.add_parser("report", help="render reward-curve figures")
    report.add_argument("stats", nargs="+", help="statistics files from 'run'")
    report.add_argument("--out", default=None, help="figure path (.png/.pdf)")
    report.add_argument("--title", default=None)

    serve = sub.add_parser("serve-env", help="serve one environment over JSON lines")
    serve.add_argument("--port", type=int, default=None,
                       help="serve over TCP instead of stdio")
    serve.add_argument("--max-clauses", type=int, default=1000)
    serve.add_argument("--problem", default=None)
    serve.add_argument("--backend", choices=("embedded", "stdio", "relay"),
                       default="embedded")
    serve.add_argument("--stdio-command", default=None,
                       help="prover command template for --backend stdio")
    serve.add_argument("--relay-port", type=int, default=0)
    serve.add_argument("--relay-client", choices=("double", "external"),
                       default="external")

    stub = sub.add_parser("serve-stub-embedder", help="loopback stub embedding service")
    stub.add_argument("--port", type=int, default=8350)
    stub.add_argument("--dimension", type=int, default=256)

    relay = sub.add_parser("relay", help="relay listener guiding a prover client")
    relay.add_argument("--port", type=int, required=True)
    relay.add_argument("--agent", choices=("random", "thompson"), default="random")
    relay.add_argument("--wrapper", choices=("none", "bandit"), default="none")
    relay.add_argument("--problem", default=None)
    relay.add_argument("--max-clauses", type=int, default=1000)
    relay.add_argument("--episodes", type=int, default=1)
    relay.add_argument("--seed", type=int, default=0)
    relay.add_argument("--out", default=None)
    relay.add_argument("--accept-timeout", type=float, default=30.0)
    return parser


def _stdio_factory(args):
    from .stdio import StdioAdapterConfig, StdioProverAdapter

    if args.stdio_command:
        parts = shlex.split(args.stdio_command)
        if not parts:
            raise ConfigError("--stdio-command is empty")
        executable, rest = parts[0], parts[1:]
        if not any("{problem}" in part for part in rest):
            rest.append("{problem}")
    else:
        executable = sys.executable
        rest = ["-m", "givenclause.stdio_double", "{problem}"]
    config = StdioAdapterConfig(
        executable_path=executable, argument_template=tuple(rest)
    )
    return lambda: StdioProverAdapter(config)


def _relay_factory(args, accept_timeout=30.0):
    from .relay import RelayBackend, RelayServer, launch_embedded_client_thread

    server = RelayServer(port=args.relay_port if hasattr(args, "relay_port") else args.port,
                         accept_timeout=accept_timeout)
    launcher = None
    if getattr(args, "relay_client", "external") == "double":
        launcher = launch_embedded_client_thread("127.0.0.1", server.port)
    print(f"relay listening on {server.address[0]}:{server.port}", file=sys.stderr)
    return server, (lambda: RelayBackend(server, client_launcher=launcher))


def cmd_run(args) -> int:
    config = ExperimentConfig(
        agent=args.agent,
        backend=args.backend,
        problem=args.problem,
        max_clauses=args.max_clauses,
        episodes=args.episodes,
        seed=args.seed,
        wrapper=args.wrapper,
        step_limit=args.step_limit,
        out=args.out,
    )
    server = None
    if args.backend == "stdio":
        config.backend_factory = _stdio_factory(args)
    elif args.backend == "relay":
        server, config.backend_factory = _relay_factory(args)
    try:
        result = run_experiment(config)
    finally:
        if server is not None:
            server.close()
    print(
        f"{args.agent} agent, {len(result.records)} episode(s), "
        f"mean reward {result.mean_reward:.3f}"
        + (f", out: {result.out_path}" if result.out_path else "")
    )
    if args.plot:
        if not args.out:
            raise ConfigError("--plot needs --out to know where the statistics are")
        from .report import default_figure_path, render_reward_curves

        figure = render_reward_curves([args.out], default_figure_path(args.out))
        print(f"figure: {figure}")
    return 0


def cmd_report(args) -> int:
    from .report import default_figure_path, render_reward_curves

    out = args.out or default_figure_path(args.stats[0])
    figure = render_reward_curves(args.stats, out, title=args.title)
    print(f"figure: {figure}")
    return 0


def cmd_serve_env(args) -> int:
    from .envserver import serve_socket, serve_stdio

    backend = "embedded"
    server = None
    if args.backend == "stdio":
        backend = _stdio_factory(args)
    elif args.backend == "relay":
        server, backend = _relay_factory(args)
    config = EnvConfig(
        max_clauses=args.max_clauses, problem_path=args.problem, backend=backend
    )
    try:
        if args.port is not None:
            return serve_socket(args.port, config=config)
        return serve_stdio(config=config)
    finally:
        if server is not None:
            server.close()


def cmd_serve_stub(args) -> int:
    from .embeddings import StubEmbeddingServer

    server = StubEmbeddingServer(port=args.port, dimension=args.dimension)
    print(f"stub embedding service on http://127.0.0.1:{server.port} "
          f"(dimension {args.dimension})", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def cmd_relay(args) -> int:
    from .relay import RelayBackend, RelayServer

    server = RelayServer(port=args.port, accept_timeout=args.accept_timeout)
    print(f"relay listening on {server.address[0]}:{server.port}", file=sys.stderr)
    config = ExperimentConfig(
        agent=args.agent,
        backend="relay",
        problem=args.problem,
        max_clauses=args.max_clauses,
        episodes=args.episodes,
        seed=args.seed,
        wrapper=args.wrapper,
        out=args.out,
        backend_factory=lambda: RelayBackend(server, client_launcher=None),
    )
    try:
        result = run_experiment(config)
    finally:
        server.close()
    print(f"served {len(result.records)} episode(s), mean reward "
          f"{result.mean_reward:.3f}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": cmd_run,
        "report": cmd_report,
        "serve-env": cmd_serve_env,
        "serve-stub-embedder": cmd_serve_stub,
        "relay": cmd_relay,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, ProblemFileError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except KeyboardInterrupt:
        return RUNTIME_EXIT
    except Exception as exc:  # runtime failures keep a distinct exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
