"""Command line access to the pipeline.

Exit codes: 0 success, 2 unreadable input, 64 bad flags, 65 action-script
parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_USAGE = 64
EXIT_SCRIPT = 65

SCRIPT_LINE = re.compile(
    r"^segment\s+(?P<index>\d+)\s*:\s*"
    r"(?P<action>reuse|text\s+\"(?P<text>[^\"]*)\"|speech\s+(?P<fixture>[\w-]+))"
    r"(?:\s+yaw\s+(?P<yaw>-?\d+(?:\.\d+)?))?\s*$"
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad flags exit 64, not argparse's default 2
        self.print_usage(sys.stderr)
        raise CliError(message, EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="panoloop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="project flat PNG frames onto 2:1 panoramas")
    p.add_argument("input", help="PNG file or directory of PNG frames")
    p.add_argument("out_dir")
    p.add_argument("--width", type=int, default=2048)
    p.add_argument("--blur-frac", type=float, default=0.05)
    p.add_argument("--fg-frac", type=float, default=0.75)
    p.add_argument("--band-frac", type=float, default=0.05)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("recenter", help="circularly shift panorama frames by yaw")
    p.add_argument("in_dir")
    p.add_argument("out_dir")
    p.add_argument("--yaw", type=float, required=True)

    p = sub.add_parser("concat", help="concatenate frame directories")
    p.add_argument("in_dirs", nargs="+")
    p.add_argument("out_dir")

    p = sub.add_parser("seam", help="print the left/right continuity metric")
    p.add_argument("input", help="PNG file or directory")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("chain", help="run the co-creation loop headlessly (mock backends)")
    p.add_argument("--prompt", required=True)
    p.add_argument("--image", help="initial PNG (omit for the neutral canvas)")
    p.add_argument("--segments", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--yaw-script", help="action script, one 'segment k: ...' line each")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=2048)
    p.add_argument("--fps", type=int, default=24)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--root", default="./panoloop-sessions")
    p.add_argument("--port", type=int, default=8360)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--backend", choices=("mock", "remote"), default="mock")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ui-dir", default=None)

    p = sub.add_parser("bench", help="measure recenter and projection throughput")
    p.add_argument("--width", type=int, default=2048)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    return parser


def _load_frame(path: Path):
    from .store import load_frame

    if not path.is_file():
        raise CliError(f"cannot read {path}", EXIT_INPUT)
    try:
        return load_frame(path)
    except Exception as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT)


def _input_frames(input_path: str):
    path = Path(input_path)
    if path.is_dir():
        files = sorted(path.glob("*.png"))
        if not files:
            raise CliError(f"no PNG frames under {path}", EXIT_INPUT)
        return files
    if path.is_file():
        return [path]
    raise CliError(f"cannot read {input_path}", EXIT_INPUT)


def _write_manifest(out_dir: Path, payload: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(json.dumps(payload, indent=2, sort_keys=True))


def _read_manifest(path: Path) -> dict:
    mpath = path / "manifest.json"
    if mpath.exists():
        return json.loads(mpath.read_text())
    return {}


def cmd_convert(args) -> int:
    from .projection import ProjectionParams, seam_continuity, to_equirect
    from .store import save_frame

    try:
        params = ProjectionParams(
            out_width=args.width,
            blur_sigma_frac=args.blur_frac,
            fg_height_frac=args.fg_frac,
            blend_band_frac=args.band_frac,
        )
    except Exception as exc:
        raise CliError(str(exc), EXIT_USAGE)
    files = _input_frames(args.input)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scores = []
    for i, f in enumerate(files):
        frame = to_equirect(_load_frame(f), params)
        save_frame(frame, out_dir / f"frame_{i:05d}.png")
        score = seam_continuity(frame)
        scores.append(score)
        if not args.json:
            print(f"frame_{i:05d}.png seam={score:.6f}")
    _write_manifest(out_dir, {
        "frames": len(files),
        "width": params.out_width,
        "height": params.out_height,
        "cumulative_yaw": 0.0,
        "seam_scores": [round(s, 6) for s in scores],
    })
    if args.json:
        print(json.dumps({"frames": len(files), "seam_scores": scores}))
    return EXIT_OK


def cmd_recenter(args) -> int:
    from .store import load_frame, save_frame
    from .yaw import YawAngle, recenter

    files = _input_frames(args.in_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    yaw = YawAngle(args.yaw)
    for i, f in enumerate(files):
        frame = load_frame(f, equirect=True)
        save_frame(recenter(frame, yaw), out_dir / f"frame_{i:05d}.png")
    manifest = _read_manifest(Path(args.in_dir))
    cumulative = YawAngle(manifest.get("cumulative_yaw", 0.0) + args.yaw)
    manifest.update({"frames": len(files), "cumulative_yaw": cumulative.degrees})
    _write_manifest(out_dir, manifest)
    print(f"recentered {len(files)} frames by {yaw.degrees:+.1f} deg "
          f"(cumulative {cumulative.degrees:+.1f})")
    return EXIT_OK


def cmd_concat(args) -> int:
    from .store import load_frame, save_frame

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = 0
    size = None
    for d in args.in_dirs:
        for f in _input_frames(d):
            frame = load_frame(f)
            if size is None:
                size = (frame.width, frame.height)
            elif (frame.width, frame.height) != size:
                raise CliError(
                    f"{f} is {frame.width}x{frame.height}, expected {size[0]}x{size[1]}",
                    EXIT_INPUT,
                )
            save_frame(frame, out_dir / f"frame_{n:05d}.png")
            n += 1
    first = _read_manifest(Path(args.in_dirs[0]))
    _write_manifest(out_dir, {
        "frames": n,
        "width": size[0] if size else 0,
        "height": size[1] if size else 0,
        "cumulative_yaw": first.get("cumulative_yaw", 0.0),
    })
    print(f"wrote {n} frames")
    return EXIT_OK


def cmd_seam(args) -> int:
    from .projection import seam_continuity
    from .store import load_frame

    files = _input_frames(args.input)
    scores = {}
    for f in files:
        scores[f.name] = seam_continuity(load_frame(f))
    if args.json:
        print(json.dumps({"scores": scores, "mean": sum(scores.values()) / len(scores)}))
    else:
        for name, score in scores.items():
            print(f"{name} seam={score:.6f}")
    return EXIT_OK


def parse_yaw_script(text: str, max_segments: int) -> dict:
    """Parse 'segment k: reuse|text "..."|speech id [yaw d]' lines."""
    actions = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = SCRIPT_LINE.match(stripped)
        if not m:
            raise CliError(f"script line {lineno}: cannot parse {stripped!r}", EXIT_SCRIPT)
        index = int(m.group("index"))
        if index < 1 or index >= max_segments:
            raise CliError(
                f"script line {lineno}: segment {index} out of range 1..{max_segments - 1}",
                EXIT_SCRIPT,
            )
        if index in actions:
            raise CliError(f"script line {lineno}: duplicate segment {index}", EXIT_SCRIPT)
        yaw = float(m.group("yaw")) if m.group("yaw") is not None else None
        if m.group("action") == "reuse":
            actions[index] = ("reuse", None, yaw)
        elif m.group("text") is not None:
            actions[index] = ("text", m.group("text"), yaw)
        else:
            actions[index] = ("speech", m.group("fixture"), yaw)
    return actions


def cmd_chain(args) -> int:
    from .audio import read_wav
    from .backends import BackendSuite, fixture_audio_path
    from .projection import ProjectionParams
    from .session import FeedbackAction, SessionEngine
    from .store import save_frame

    script_text = ""
    if args.yaw_script:
        spath = Path(args.yaw_script)
        if not spath.is_file():
            raise CliError(f"cannot read {spath}", EXIT_INPUT)
        script_text = spath.read_text()
    actions = parse_yaw_script(script_text, args.segments)

    try:
        engine = SessionEngine(
            BackendSuite.mock(),
            projection=ProjectionParams(out_width=args.width),
            target_segments=args.segments,
            segment_duration_s=args.duration,
            fps=args.fps,
            seed=args.seed,
        )
    except Exception as exc:
        raise CliError(str(exc), EXIT_USAGE)

    image = _load_frame(Path(args.image)) if args.image else None
    session = engine.start_session(args.prompt, image)
    engine.run_generation(session, 0)
    _require_ready(session, 0)
    for k in range(1, args.segments):
        kind, value, yaw = actions.get(k, ("reuse", None, None))
        if kind == "reuse":
            action = FeedbackAction.reuse_prompt(recenter=yaw)
        elif kind == "text":
            action = FeedbackAction.typed(value, recenter=yaw)
        else:
            try:
                audio = read_wav(fixture_audio_path(value))
            except Exception as exc:
                raise CliError(f"segment {k}: {exc}", EXIT_SCRIPT)
            action = FeedbackAction.spoken(audio, recenter=yaw)
        engine.apply_feedback(session, action)
        engine.run_generation(session, k)
        _require_ready(session, k)
    final = engine.finalize(session)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256()
    for i, frame in enumerate(final.frames):
        save_frame(frame, out_dir / f"frame_{i:05d}.png")
        digest.update(frame.pixels.tobytes())
    sha = digest.hexdigest()
    _write_manifest(out_dir, {
        "frames": len(final),
        "fps": final.fps,
        "width": final.width,
        "height": final.height,
        "duration_seconds": final.duration_seconds,
        "sha256": sha,
        "seed": args.seed,
    })
    if args.json:
        print(json.dumps({"frames": len(final), "sha256": sha,
                          "duration_seconds": final.duration_seconds}))
    else:
        print(f"final clip: {len(final)} frames, {final.duration_seconds:.1f}s, sha256={sha}")
    return EXIT_OK


def _require_ready(session, index) -> None:
    from .session import SegmentStatus

    seg = session.segments[index]
    if seg.status is not SegmentStatus.READY:
        raise CliError(f"segment {index} failed: {seg.error}", EXIT_INPUT)


def cmd_serve(args) -> int:
    import uvicorn

    from .backends import BackendSuite
    from .server import create_app

    backends = BackendSuite.mock() if args.backend == "mock" else BackendSuite.from_env()
    app = create_app(args.root, backends=backends, seed=args.seed, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_benchmarks

    results = run_benchmarks(width=args.width, seed=args.seed)
    if args.json:
        print(json.dumps({"results": results}))
    else:
        for r in results:
            status = "pass" if r["pass"] else "BELOW TARGET"
            print(f"{r['name']}: {r['fps']:.2f} fps at {r['width']}px "
                  f"(target {r['target_fps']}, floor {r['floor_fps']}) {status}")
    return EXIT_OK


_COMMANDS = {
    "convert": cmd_convert,
    "recenter": cmd_recenter,
    "concat": cmd_concat,
    "seam": cmd_seam,
    "chain": cmd_chain,
    "serve": cmd_serve,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
