from flask import Flask, jsonify, request, send_from_directory, json
from flask_swagger_ui import get_swaggerui_blueprint
from flask_cors import CORS
from src import config
from src.exceptions import LoopAlgebraException, ValidationError
from src.repositories import CatalogRepository, ModelFileRepository
from src.services import ModelService
import typing as t

app = Flask(__name__)
CORS(app, supports_credentials=True)

# Models are built lazily and cached by the catalog repository
app.model_service = ModelService(CatalogRepository(), ModelFileRepository())


@app.route("/spec.yaml")
def spec():
    """Serve OpenAPI spec file."""
    return send_from_directory(".", "spec.yaml")


# Swagger UI
SWAGGER_URL = "/docs"
API_URL = "/spec.yaml"
swaggerui_blueprint = get_swaggerui_blueprint(
    SWAGGER_URL, API_URL, config={"app_name": "Loop Algebra API"})
app.register_blueprint(swaggerui_blueprint, url_prefix=SWAGGER_URL)


@app.errorhandler(LoopAlgebraException)
def handle_domain_error(e: LoopAlgebraException):
    app.logger.info("%s: %s", type(e).__name__, e.message)
    body = {"error": e.message}
    position = getattr(e, "position", None)
    if position is not None:
        body["position"] = position
    return app.response_class(response=json.dumps(body), status=e.status_code, mimetype="application/json")


def _int_arg(name: str, default: t.Optional[int] = None) -> t.Optional[int]:
    raw = request.args.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{name} must be an integer")


def _window(default: t.Optional[t.Tuple[int, int]] = None) -> t.Tuple[int, int]:
    lo, hi = _int_arg("lo"), _int_arg("hi")
    if lo is None or hi is None:
        if default is None:
            raise ValidationError("lo and hi are required")
        return default
    return lo, hi


def _body(*keys: str) -> t.Dict[str, t.Any]:
    body = request.get_json(silent=True)
    if not body:
        raise ValidationError("no body")
    missing = [k for k in keys if k not in body]
    if missing:
        raise ValidationError(f"Missing field(s): {', '.join(missing)}")
    return body


# --- Model endpoints ----------------------------------------------------

@app.route("/models", methods=["GET"])
def list_models():
    return jsonify(app.model_service.list_models())


@app.route("/models/<string:model_id>", methods=["GET"])
def show_model(model_id: str):
    return jsonify(app.model_service.show(model_id))


@app.route("/models/<string:model_id>/export", methods=["GET"])
def export_model(model_id: str):
    return jsonify(app.model_service.export(model_id))


@app.route("/models/<string:model_id>/golden", methods=["GET"])
def golden_table(model_id: str):
    return jsonify(app.model_service.golden(model_id))


# --- Evaluation endpoints -----------------------------------------------

@app.route("/models/<string:model_id>/delta", methods=["POST"])
def delta(model_id: str):
    """
    Evaluate the BV operator. Expected JSON body:
    {"expr": str, "path": "eq1" | "deriv" | "both"}
    """
    body = _body("expr")
    return jsonify(app.model_service.delta(model_id, str(body["expr"]), str(body.get("path", "eq1"))))


@app.route("/models/<string:model_id>/mul", methods=["POST"])
def mul(model_id: str):
    """Loop product. Expected JSON body: {"left": str, "right": str}"""
    body = _body("left", "right")
    return jsonify(app.model_service.mul(model_id, str(body["left"]), str(body["right"])))


@app.route("/models/<string:model_id>/hilbert", methods=["GET"])
def hilbert(model_id: str):
    side = request.args.get("side", "omega")
    oracle = request.args.get("oracle", "false").lower() in {"1", "true", "yes"}
    table = app.model_service.hilbert(model_id, side, _window(), oracle, _int_arg("word_length"))
    return jsonify(json.loads(table.reset_index().to_json(orient="records")))


@app.route("/models/<string:model_id>/homology", methods=["GET"])
def homology(model_id: str):
    table = app.model_service.delta_homology(model_id, _window())
    return jsonify(json.loads(table.reset_index().to_json(orient="records")))


@app.route("/models/<string:model_id>/verify", methods=["GET"])
def verify(model_id: str):
    report = app.model_service.verify(
        model_id,
        _window(config.DEFAULT_WINDOW),
        _int_arg("word_length", config.DEFAULT_WORD_LENGTH),
        _int_arg("seed", config.DEFAULT_SEED),
        _int_arg("cases", config.DEFAULT_CASES),
    )
    return jsonify(report)


if __name__ == "__main__":
    app.run(host="0.0.0.0", port=5000)
