"""Command-line front end for the automatic sharing simulator.

Every subcommand builds a :class:`ScenarioSpec`, hands it to
:func:`run_scenario`, prints the summary, and exits with the scenario's
code: 0 for success or a POSITIVE verdict, 2 for a NEGATIVE verdict,
3 for a visibility violation found under --audit, 1 for usage or input
errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from asgs.formats import (
    ParseError,
    bulletin_from_doc,
    bulletin_to_doc,
    decode_vector,
    dump_document,
    encode_vector,
    key_assignment_from_doc,
    key_assignment_to_doc,
    load_document,
    mask_set_to_doc,
    read_fixture_file,
    safe_state_from_doc,
    safe_state_to_doc,
    share_set_from_doc,
    share_set_to_doc,
    transcript_from_doc,
    transcript_to_doc,
)
from asgs.kgh import (
    AsgsError,
    AuthorizedShareSet,
    SchemeParams,
    SetRole,
    generate_mask_set,
)
from asgs.protocol import (
    MESSAGE_KINDS,
    ProtocolEnv,
    ROLE_ACCUMULATOR,
    ROLE_DEALER,
    ROLE_OWNER,
    TamperRule,
    activate_shares,
    check_visibility,
    equal_set_replicate,
    fast_share,
    parse_party,
    safe_shares,
    set_generate_m,
    set_replicate_to_bigger,
    set_replicate_to_smaller,
)
from asgs.pvss import (
    Verdict,
    distribute_shares_and_keys,
    recover_xored_keys,
    verify,
)

SOURCE_ROLES = (ROLE_DEALER, ROLE_OWNER, ROLE_ACCUMULATOR)


def default_bits() -> int:
    """CLI default bit width; ASGS_DEFAULT_BITS overrides the built-in 128."""
    raw = os.environ.get("ASGS_DEFAULT_BITS")
    if raw is None or not raw.strip():
        return 128
    try:
        bits = int(raw)
    except ValueError:
        raise ParseError(f"ASGS_DEFAULT_BITS must be an integer, got {raw!r}") from None
    if bits < 1:
        raise ParseError(f"ASGS_DEFAULT_BITS must be >= 1, got {bits}")
    return bits


def parse_tamper_rule(text: str) -> TamperRule:
    """Parse party:kind:occurrence:bit:index into a tamper rule."""
    parts = text.split(":")
    if len(parts) != 5 or parts[3] != "bit":
        raise ParseError(
            f"tamper rule must look like party:kind:occurrence:bit:index, got {text!r}"
        )
    party_text, kind, occurrence_text, _, bit_text = parts
    try:
        parse_party(party_text)
    except ValueError as exc:
        raise ParseError(f"tamper rule {text!r}: {exc}") from exc
    if kind not in MESSAGE_KINDS:
        raise ParseError(f"tamper rule {text!r}: unknown message kind {kind!r}")
    try:
        occurrence = int(occurrence_text)
        bit = int(bit_text)
    except ValueError:
        raise ParseError(f"tamper rule {text!r}: occurrence and bit must be integers") from None
    if occurrence < 1:
        raise ParseError(f"tamper rule {text!r}: occurrence counts from 1")
    if bit < 0:
        raise ParseError(f"tamper rule {text!r}: bit index must be >= 0")
    return TamperRule(party_text, kind, occurrence, bit)


@dataclass
class ScenarioSpec:
    """One fully described run: command, parameters, randomness, outputs."""

    command: str
    bits: int | None = None
    seed: int | None = None
    fixtures: dict[str, str] = field(default_factory=dict)
    out_dir: str = "."
    audit: bool = False
    tamper: tuple[str, ...] = ()
    n: int | None = None
    d: int | None = None
    secret_hex: str | None = None
    mode: str | None = None
    in_path: str | None = None
    state_path: str | None = None
    set1_path: str | None = None
    set2_path: str | None = None
    bulletin_path: str | None = None
    keys_path: str | None = None
    transcript_path: str | None = None
    start: str | None = None
    then: tuple[str, ...] = ()


@dataclass
class RunResult:
    exit_code: int
    artifacts: dict[str, Path]
    summary: list[str]


def _build_env(spec: ScenarioSpec, bits: int) -> ProtocolEnv:
    params = SchemeParams.binary(bits)
    rules = tuple(parse_tamper_rule(t) for t in spec.tamper)
    if spec.seed is not None and spec.fixtures:
        raise ParseError("--seed and --fixture are mutually exclusive")
    if not spec.fixtures:
        # Runs stay reproducible when neither flag is given: seed 0.
        return ProtocolEnv.seeded(spec.seed if spec.seed is not None else 0, bits,
                                  tamper_rules=rules)
    vectors = {}
    for role, path in spec.fixtures.items():
        vectors[role] = read_fixture_file(path, params)
    summary = {"fixture_paths": dict(sorted(spec.fixtures.items()))} if spec.fixtures else None
    return ProtocolEnv.with_fixtures(
        params,
        dealer=vectors.get(ROLE_DEALER),
        owner=vectors.get(ROLE_OWNER),
        accumulator=vectors.get(ROLE_ACCUMULATOR),
        tamper_rules=rules,
        config=summary,
    )


def _resolve_bits(spec: ScenarioSpec, *doc_bits: int) -> int:
    """Document-driven commands take their width from the documents."""
    agreed = set(doc_bits)
    if len(agreed) > 1:
        raise ParseError(f"input documents disagree on bit width: {sorted(agreed)}")
    if doc_bits:
        bits = doc_bits[0]
        if spec.bits is not None and spec.bits != bits:
            raise ParseError(
                f"--bits {spec.bits} conflicts with input documents at {bits} bits"
            )
        return bits
    return spec.bits if spec.bits is not None else default_bits()


def _require(value, flag: str):
    if value is None:
        raise ParseError(f"missing required option {flag}")
    return value


def _write(artifacts: dict[str, Path], out_dir: Path, name: str, document: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = dump_document(document, out_dir / name)
    artifacts[name] = path
    return path


def _finish(
    spec: ScenarioSpec,
    env: ProtocolEnv | None,
    artifacts: dict[str, Path],
    summary: list[str],
    base_exit: int = 0,
) -> RunResult:
    """Write the transcript, run the optional audit, settle the exit code."""
    exit_code = base_exit
    if env is not None:
        _write(artifacts, Path(spec.out_dir), "transcript.json", transcript_to_doc(env.transcript))
        summary.append(f"transcript -> {artifacts['transcript.json']}")
        if spec.audit:
            violations = check_visibility(env.transcript)
            for v in violations:
                summary.append(
                    f"violation: seq={v.seq} recipient={v.recipient} "
                    f"class={v.value_class} kind={v.kind}"
                )
            if violations:
                exit_code = 3
            else:
                summary.append("audit: no visibility violations")
    return RunResult(exit_code, artifacts, summary)


def run_scenario(spec: ScenarioSpec) -> RunResult:
    artifacts: dict[str, Path] = {}
    summary: list[str] = []
    out_dir = Path(spec.out_dir)

    if spec.command == "audit":
        path = _require(spec.transcript_path, "transcript path")
        transcript = transcript_from_doc(load_document(path, "transcript"))
        violations = check_visibility(transcript)
        for v in violations:
            summary.append(
                f"violation: seq={v.seq} recipient={v.recipient} "
                f"class={v.value_class} kind={v.kind}"
            )
        if not violations:
            summary.append("no visibility violations")
        return RunResult(3 if violations else 0, artifacts, summary)

    if spec.command == "gen-m":
        count = _require(spec.n, "--n")
        bits = _resolve_bits(spec)
        env = _build_env(spec, bits)
        env.note_operation("generate_mask_set", n=count)
        masks = generate_mask_set(count, env.source(ROLE_ACCUMULATOR), env.params)
        _write(artifacts, out_dir, "masks.json", mask_set_to_doc(masks))
        summary.append(f"mask set of {count} vectors ({bits} bits) -> {artifacts['masks.json']}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "set-generate":
        template_count = _require(spec.d, "--d")
        master_count = _require(spec.n, "--n")
        bits = _resolve_bits(spec)
        env = _build_env(spec, bits)
        template, master = set_generate_m(template_count, master_count, env)
        _write(artifacts, out_dir, "u1.json", share_set_to_doc(template))
        _write(artifacts, out_dir, "u2.json", share_set_to_doc(master))
        summary.append(f"template set ({template_count} shares) -> {artifacts['u1.json']}")
        summary.append(f"master set ({master_count} shares) -> {artifacts['u2.json']}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "replicate":
        mode = _require(spec.mode, "--mode")
        source_path = _require(spec.in_path, "--in")
        source_set = share_set_from_doc(load_document(source_path, "share_set"))
        bits = _resolve_bits(spec, source_set.params.dimension)
        env = _build_env(spec, bits)
        if mode == "equal":
            derived = equal_set_replicate(source_set, env)
        elif mode == "bigger":
            derived = set_replicate_to_bigger(source_set, _require(spec.d, "--d"), env)
        elif mode == "smaller":
            derived = set_replicate_to_smaller(source_set, _require(spec.d, "--d"), env)
        else:
            raise ParseError(f"unknown replication mode {mode!r}")
        _write(artifacts, out_dir, "derived.json", share_set_to_doc(derived))
        summary.append(f"derived set ({len(derived.shares)} shares) -> {artifacts['derived.json']}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "fastshare":
        count = _require(spec.n, "--n")
        secret_hex = _require(spec.secret_hex, "--secret")
        bits = _resolve_bits(spec)
        env = _build_env(spec, bits)
        secret = decode_vector(secret_hex, env.params)
        shares = fast_share(secret, count, env)
        _write(artifacts, out_dir, "shares.json", share_set_to_doc(shares))
        summary.append(f"owner set ({count} shares) -> {artifacts['shares.json']}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "safeshares":
        count = _require(spec.n, "--n")
        secret_hex = _require(spec.secret_hex, "--secret")
        bits = _resolve_bits(spec)
        env = _build_env(spec, bits)
        secret = decode_vector(secret_hex, env.params)
        state = safe_shares(secret, count, env)
        _write(artifacts, out_dir, "state.json", safe_state_to_doc(state))
        _write(artifacts, out_dir, "protected.json", share_set_to_doc(state.protected_set()))
        summary.append(f"protected set ({count} shares) -> {artifacts['protected.json']}")
        summary.append(f"full pre-positioning state -> {artifacts['state.json']}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "activate":
        state_path = _require(spec.state_path, "--state")
        state = safe_state_from_doc(load_document(state_path, "safe_state"))
        bits = _resolve_bits(spec, state.params.dimension)
        env = _build_env(spec, bits)
        activated = activate_shares(state, env)
        _write(artifacts, out_dir, "activated.json", share_set_to_doc(activated))
        summary.append(
            f"activated set ({len(activated.shares)} shares) -> {artifacts['activated.json']}"
        )
        return _finish(spec, env, artifacts, summary)

    if spec.command == "pvss-distribute":
        set1 = share_set_from_doc(load_document(_require(spec.set1_path, "--set1"), "share_set"))
        set2 = share_set_from_doc(load_document(_require(spec.set2_path, "--set2"), "share_set"))
        bits = _resolve_bits(spec, set1.params.dimension, set2.params.dimension)
        env = _build_env(spec, bits)
        bulletin, assignment = distribute_shares_and_keys(set1, set2, env)
        _write(artifacts, out_dir, "bulletin.json", bulletin_to_doc(bulletin))
        _write(artifacts, out_dir, "keys.json", key_assignment_to_doc(assignment, bits))
        summary.append(
            f"bulletin ({len(set1.shares)}+{len(set2.shares)} entries) -> "
            f"{artifacts['bulletin.json']}"
        )
        summary.append(f"key assignment -> {artifacts['keys.json']}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "pvss-recover-keys":
        keys_doc = load_document(_require(spec.keys_path, "--keys"), "key_assignment")
        assignment = key_assignment_from_doc(keys_doc)
        bits = _resolve_bits(spec, keys_doc["bits"])
        env = _build_env(spec, bits)
        result = recover_xored_keys(
            assignment, assignment.count_for("1"), assignment.count_for("2"), env
        )
        summary.append(f"xored_keys={encode_vector(result)}")
        return _finish(spec, env, artifacts, summary)

    if spec.command == "pvss-verify":
        bulletin_doc = load_document(_require(spec.bulletin_path, "--bulletin"), "bulletin")
        keys_doc = load_document(_require(spec.keys_path, "--keys"), "key_assignment")
        bulletin = bulletin_from_doc(bulletin_doc)
        assignment = key_assignment_from_doc(keys_doc)
        bits = _resolve_bits(spec, bulletin_doc["bits"], keys_doc["bits"])
        env = _build_env(spec, bits)
        result = verify(bulletin, assignment, env)
        summary.append(f"xored_encrypted_shares={encode_vector(result.xored_encrypted_shares)}")
        summary.append(f"xored_keys={encode_vector(result.xored_keys)}")
        summary.append(f"verdict={result.verdict.value}")
        base_exit = 0 if result.verdict is Verdict.POSITIVE else 2
        return _finish(spec, env, artifacts, summary, base_exit)

    if spec.command == "simulate":
        return _run_simulation(spec, artifacts, summary)

    raise ParseError(f"unknown command {spec.command!r}")


def _parse_then_step(token: str) -> tuple[str, tuple[str, int | None] | None]:
    if token in ("activate", "pvss"):
        return token, None
    if token.startswith("replicate-"):
        rest = token[len("replicate-"):]
        if rest == "equal":
            return "replicate", ("equal", None)
        for mode in ("bigger", "smaller"):
            prefix = mode + "="
            if rest.startswith(prefix):
                try:
                    return "replicate", (mode, int(rest[len(prefix):]))
                except ValueError:
                    break
    raise ParseError(
        f"unknown pipeline step {token!r}; expected activate, pvss, replicate-equal, "
        "replicate-bigger=N, or replicate-smaller=N"
    )


def _run_simulation(
    spec: ScenarioSpec, artifacts: dict[str, Path], summary: list[str]
) -> RunResult:
    """Run a chained scenario in one environment and one transcript."""
    start = _require(spec.start, "a starting algorithm")
    steps = [_parse_then_step(t) for t in spec.then]
    bits = _resolve_bits(spec)
    env = _build_env(spec, bits)
    out_dir = Path(spec.out_dir)
    verdicts: list[Verdict] = []

    reference: AuthorizedShareSet | None = None  # what pvss compares against
    current: AuthorizedShareSet | None = None

    if start == "safeshares":
        count = _require(spec.n, "--n")
        secret = decode_vector(_require(spec.secret_hex, "--secret"), env.params)
        state = safe_shares(secret, count, env)
        _write(artifacts, out_dir, "state.json", safe_state_to_doc(state))
        _write(artifacts, out_dir, "protected.json", share_set_to_doc(state.protected_set()))
        summary.append(f"safeshares: protected set of {count} shares")
        reference = AuthorizedShareSet.from_shares(SetRole.TEMPLATE, [secret])
        current = state.protected_set()
    elif start == "set-generate":
        template_count = _require(spec.d, "--d")
        master_count = _require(spec.n, "--n")
        template, master = set_generate_m(template_count, master_count, env)
        _write(artifacts, out_dir, "u1.json", share_set_to_doc(template))
        _write(artifacts, out_dir, "u2.json", share_set_to_doc(master))
        summary.append(
            f"set-generate: template of {template_count}, master of {master_count}"
        )
        reference = template
        current = master
    else:
        raise ParseError(
            f"unknown starting algorithm {start!r}; expected safeshares or set-generate"
        )

    for step, arg in steps:
        if step == "activate":
            if start != "safeshares":
                raise ParseError("activate only follows safeshares")
            current = activate_shares(state, env)
            _write(artifacts, out_dir, "activated.json", share_set_to_doc(current))
            summary.append(f"activate: {len(current.shares)} shares activated")
        elif step == "replicate":
            assert arg is not None
            mode, target = arg
            if mode == "equal":
                current = equal_set_replicate(current, env)
            elif mode == "bigger":
                current = set_replicate_to_bigger(current, target, env)
            else:
                current = set_replicate_to_smaller(current, target, env)
            _write(artifacts, out_dir, "derived.json", share_set_to_doc(current))
            summary.append(f"replicate-{mode}: derived set of {len(current.shares)} shares")
        elif step == "pvss":
            bulletin, assignment = distribute_shares_and_keys(reference, current, env)
            _write(artifacts, out_dir, "bulletin.json", bulletin_to_doc(bulletin))
            _write(artifacts, out_dir, "keys.json", key_assignment_to_doc(assignment, bits))
            result = verify(bulletin, assignment, env)
            verdicts.append(result.verdict)
            summary.append(f"pvss: verdict={result.verdict.value}")
    base_exit = 2 if Verdict.NEGATIVE in verdicts else 0
    return _finish(spec, env, artifacts, summary, base_exit)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--bits",
        type=int,
        default=None,
        help="vector width in bits (default 128, or ASGS_DEFAULT_BITS)",
    )
    parser.add_argument("--seed", type=int, default=None, help="64-bit run seed")
    parser.add_argument(
        "--fixture",
        action="append",
        default=[],
        metavar="PARTY:PATH",
        help="fixture vector file for one party (dealer, owner, accumulator); repeatable",
    )
    parser.add_argument("--out", default=".", metavar="DIR", help="output directory")
    parser.add_argument(
        "--audit", action="store_true", help="audit the transcript for visibility violations"
    )
    parser.add_argument(
        "--tamper",
        action="append",
        default=[],
        metavar="RULE",
        help="bit-flip rule party:kind:occurrence:bit:index; repeatable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="asgs", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("gen-m", help="generate a zero-sum mask set")
    _add_common(sub)
    sub.add_argument("--n", type=int, required=True, help="mask set cardinality")

    sub = commands.add_parser(
        "set-generate", help="create two share sets of a fresh unseen secret"
    )
    _add_common(sub)
    sub.add_argument("--d", type=int, required=True, help="template set cardinality")
    sub.add_argument("--n", type=int, required=True, help="master set cardinality")

    sub = commands.add_parser("replicate", help="derive a fresh share set from an existing one")
    _add_common(sub)
    sub.add_argument("--mode", choices=("equal", "bigger", "smaller"), required=True)
    sub.add_argument("--d", type=int, default=None, help="target cardinality (bigger/smaller)")
    sub.add_argument("--in", dest="in_path", required=True, metavar="PATH",
                     help="share_set document to replicate")

    sub = commands.add_parser("fastshare", help="split an owner secret into shares")
    _add_common(sub)
    sub.add_argument("--secret", required=True, metavar="HEX", help="secret vector in hex")
    sub.add_argument("--n", type=int, required=True, help="share count")

    sub = commands.add_parser(
        "safeshares", help="pre-position protected shares that need later activation"
    )
    _add_common(sub)
    sub.add_argument("--secret", required=True, metavar="HEX", help="secret vector in hex")
    sub.add_argument("--n", type=int, required=True, help="share count")

    sub = commands.add_parser("activate", help="release keys and activate protected shares")
    _add_common(sub)
    sub.add_argument("--state", dest="state_path", required=True, metavar="PATH",
                     help="safe_state document from a safeshares run")

    pvss_parser = commands.add_parser("pvss", help="publicly verifiable consistency checks")
    pvss_commands = pvss_parser.add_subparsers(dest="pvss_command", required=True)

    sub = pvss_commands.add_parser("distribute", help="publish encrypted shares and deal keys")
    _add_common(sub)
    sub.add_argument("--set1", dest="set1_path", required=True, metavar="PATH")
    sub.add_argument("--set2", dest="set2_path", required=True, metavar="PATH")

    sub = pvss_commands.add_parser("recover-keys", help="recover the XOR of all dealt keys")
    _add_common(sub)
    sub.add_argument("--keys", dest="keys_path", required=True, metavar="PATH")

    sub = pvss_commands.add_parser("verify", help="compare bulletin XOR against key XOR")
    _add_common(sub)
    sub.add_argument("--bulletin", dest="bulletin_path", required=True, metavar="PATH")
    sub.add_argument("--keys", dest="keys_path", required=True, metavar="PATH")

    sub = commands.add_parser("simulate", help="run a chained scenario in one transcript")
    _add_common(sub)
    sub.add_argument("start", choices=("safeshares", "set-generate"),
                     help="first algorithm of the chain")
    sub.add_argument("--secret", default=None, metavar="HEX")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument(
        "--then",
        action="append",
        default=[],
        metavar="STEP",
        help="next pipeline step: activate, pvss, replicate-equal, "
        "replicate-bigger=N, replicate-smaller=N; repeatable",
    )

    sub = commands.add_parser("audit", help="audit a transcript document")
    sub.add_argument("transcript", metavar="PATH", help="transcript document to audit")

    return parser


def _spec_from_args(args: argparse.Namespace) -> ScenarioSpec:
    fixtures = {}
    for item in getattr(args, "fixture", []):
        party, sep, path = item.partition(":")
        if not sep or party not in SOURCE_ROLES:
            raise ParseError(
                f"--fixture wants PARTY:PATH with party in {'/'.join(SOURCE_ROLES)}, got {item!r}"
            )
        fixtures[party] = path
    command = args.command
    if command == "pvss":
        command = f"pvss-{args.pvss_command}"
    return ScenarioSpec(
        command=command,
        bits=getattr(args, "bits", None),
        seed=getattr(args, "seed", None),
        fixtures=fixtures,
        out_dir=getattr(args, "out", "."),
        audit=getattr(args, "audit", False),
        tamper=tuple(getattr(args, "tamper", [])),
        n=getattr(args, "n", None),
        d=getattr(args, "d", None),
        secret_hex=getattr(args, "secret", None),
        mode=getattr(args, "mode", None),
        in_path=getattr(args, "in_path", None),
        state_path=getattr(args, "state_path", None),
        set1_path=getattr(args, "set1_path", None),
        set2_path=getattr(args, "set2_path", None),
        bulletin_path=getattr(args, "bulletin_path", None),
        keys_path=getattr(args, "keys_path", None),
        transcript_path=getattr(args, "transcript", None),
        start=getattr(args, "start", None),
        then=tuple(getattr(args, "then", [])),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = run_scenario(_spec_from_args(args))
    except (AsgsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in result.summary:
        print(line)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
