"""Photonic-crystal teleportation simulator – Flask API server.

Endpoints
---------
POST /api/teleport        – run the teleportation circuit for one input qubit.
POST /api/tomography      – forward model plus inversion for Bloch angles, or
                            inversion of supplied (delta, p1) measurements.
GET  /api/health          – Simple health-check / readiness probe.

Every endpoint uses the default run configuration (environment overrides
included).
"""

from __future__ import annotations

from functools import lru_cache
import os
import sys
from pathlib import Path

from flask import Flask, jsonify, request
from flask_cors import CORS

# ---------------------------------------------------------------------------
# Path setup so the src/ packages are importable regardless of working dir
# ---------------------------------------------------------------------------
ROOT = Path(__file__).resolve().parent
SRC = str(ROOT / "src")
if SRC not in sys.path:
    sys.path.insert(0, SRC)

from cli_io.commands import RunContext                                  # noqa: E402
from cli_io.config import parse_config                                  # noqa: E402
from quantum_core.errors import ConfigError, ProfileError, SimulationError  # noqa: E402
from quantum_core.models import BlochAngles                             # noqa: E402
from quantum_core.state_dump import format_state_dump                   # noqa: E402
from quantum_core.states import bloch_to_qubit                          # noqa: E402
from readout_engine.propagator import excitation_probability            # noqa: E402
from reporting.report import teleport_json, tomography_json             # noqa: E402
from shot_sim.estimator import estimate_from_p1                         # noqa: E402
from teleport_engine.engine import run_teleport                         # noqa: E402

app = Flask(__name__)
CORS(app, resources={r"/api/*": {"origins": "*"}})


@lru_cache(maxsize=1)
def _context() -> RunContext:
    return RunContext(parse_config(None), "api")


def _error(exc: SimulationError):
    status = 400 if isinstance(exc, (ConfigError, ProfileError)) else 422
    return jsonify({"error": str(exc), "kind": type(exc).__name__}), status


def _angles(body):
    try:
        theta, phi = float(body["theta"]), float(body["phi"])
        return BlochAngles(theta, phi), None
    except (TypeError, ValueError) as exc:
        return None, (jsonify({"error": f"Invalid Bloch angles: {exc}"}), 400)


# ---------------------------------------------------------------------------
# Health check
# ---------------------------------------------------------------------------
@app.get("/api/health")
def health():
    return jsonify({"status": "ok"})


# ---------------------------------------------------------------------------
# Teleportation
# ---------------------------------------------------------------------------
@app.post("/api/teleport")
def teleport():
    """Teleport the qubit (theta, phi) from atom A to atom B.

    Expected JSON body::

        {"theta": <float>, "phi": <float>, "outcome": 0 | 1 (optional, default 1)}
    """
    body = request.get_json(silent=True) or {}
    missing = [k for k in ("theta", "phi") if k not in body]
    if missing:
        return jsonify({"error": f"Missing fields: {', '.join(missing)}"}), 400
    angles, bad = _angles(body)
    if bad:
        return bad
    outcome = body.get("outcome", 1)
    if outcome not in (0, 1):
        return jsonify({"error": "outcome must be 0 or 1"}), 400

    try:
        ctx = _context()
        result = run_teleport(ctx.teleport_config, bloch_to_qubit(angles), outcome,
                              calibration=ctx.calibration, with_traces=False)
    except SimulationError as exc:
        return _error(exc)

    return jsonify({
        **teleport_json(result),
        "conditional_state": format_state_dump(result.conditional_state).splitlines(),
    })


# ---------------------------------------------------------------------------
# Tomography
# ---------------------------------------------------------------------------
@app.post("/api/tomography")
def tomography():
    """Recover Bloch angles through the readout circuit.

    Expected JSON body, either::

        {"theta": <float>, "phi": <float>}

    to invert the noiseless forward model at the chosen detunings, or::

        {"measurements": [{"delta": <rad/s>, "p1": <float>}, ...]}
    """
    body = request.get_json(silent=True) or {}
    try:
        ctx = _context()
        if "measurements" in body:
            rows = body["measurements"]
            try:
                deltas = [float(r["delta"]) for r in rows]
                p1 = [float(r["p1"]) for r in rows]
            except (KeyError, TypeError, ValueError):
                return jsonify({"error": "measurements need numeric 'delta' and 'p1'"}), 400
            transfers = ctx.circuit.transfers(deltas)
        elif "theta" in body and "phi" in body:
            angles, bad = _angles(body)
            if bad:
                return bad
            state = bloch_to_qubit(angles)
            deltas = list(ctx.deltas)
            transfers = ctx.transfers
            p1 = [excitation_probability(state, m) for m in transfers]
        else:
            return jsonify({"error": "Missing fields: theta, phi or measurements"}), 400
        result = estimate_from_p1(deltas, p1, transfers, max_condition=ctx.config.tomography.max_condition)
    except SimulationError as exc:
        return _error(exc)

    return jsonify(tomography_json(result, deltas))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------
if __name__ == "__main__":
    port = int(os.environ.get("PORT", 5000))
    debug = os.environ.get("FLASK_DEBUG", "0").strip() == "1"
    app.run(host="0.0.0.0", port=port, debug=debug)
