"""Checks the sidecar schema and the provider wire protocol against the CLI.

A mock provider validates every request the CLI sends and answers with
schema-valid bodies. Usage: check_wire.py BINARY FIXTURES_DIR SCHEMAS_DIR
"""

import json
import os
import re
import shutil
import subprocess
import sys
import tempfile
import threading
import zlib
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import jsonschema

NAME = re.compile(r"\b[A-Z][a-zé]+ [A-Z][a-zá]+\b")
PRONOUN = re.compile(r"\b(?:he|she|his|her|He|She|His|Her)\b")
DIM = 32


def embed(text):
    v = [0.0] * DIM
    for w in re.findall(r"[a-z0-9]+", text.lower()):
        v[zlib.crc32(w.encode()) % DIM] += 1.0
    return v


def coref(text):
    """Nearest preceding two-word name for each pronoun, as pairs or clusters."""
    pairs, clusters = [], []
    for m in PRONOUN.finditer(text):
        names = [n for n in NAME.finditer(text, 0, m.start())]
        if not names:
            continue
        e = names[-1]
        pairs.append({"entity_start": e.start(), "pronoun_end": m.end(), "entity_text": e.group(), "pronoun_text": m.group()})
        clusters.append([[e.start(), e.end()], [m.start(), m.end()]])
    return {"pairs": pairs} if len(text) % 2 else {"clusters": clusters}


class Provider:
    def __init__(self, wire):
        self.wire = wire
        self.errors = []
        self.calls = {"/embed": 0, "/coref": 0, "/health": 0}
        self.auth = set()
        self.healthy = True
        self.served_dim = DIM
        self.lock = threading.Lock()
        provider = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def reply(self, kind, body):
                provider.validate(kind, body)
                data = json.dumps(body).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                provider.count(self.path, self.headers)
                if self.path != "/health":
                    self.send_error(404)
                    return
                self.reply("health_response", {"ok": provider.healthy, "models": {"embedding": "crc32-bow", "coref": "nearest-name"}})

            def do_POST(self):
                provider.count(self.path, self.headers)
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                if self.path == "/embed":
                    provider.validate("embed_request", body)
                    self.reply("embed_response", {"dim": provider.served_dim,
                                                  "vectors": [embed(t)[:provider.served_dim] for t in body["texts"]]})
                elif self.path == "/coref":
                    provider.validate("coref_request", body)
                    self.reply("coref_response", coref(body["text"]))
                else:
                    self.send_error(404)

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}"
        threading.Thread(target=self.server.serve_forever, daemon=True).start()

    def count(self, path, headers):
        with self.lock:
            if path in self.calls:
                self.calls[path] += 1
            if headers.get("Authorization"):
                self.auth.add(headers["Authorization"])

    def validate(self, kind, body):
        schema = {"$ref": f"#/$defs/{kind}", "$defs": self.wire["$defs"]}
        try:
            jsonschema.validate(body, schema)
        except jsonschema.ValidationError as e:
            with self.lock:
                self.errors.append(f"{kind}: {e.message}")


def check(cond, message, failures):
    print(("ok    " if cond else "FAIL  ") + message)
    if not cond:
        failures.append(message)


def main():
    binary, fixtures, schemas = (Path(a) for a in sys.argv[1:4])
    sidecar_schema = json.loads((schemas / "sidecar.schema.json").read_text())
    wire = json.loads((schemas / "provider_wire.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(sidecar_schema)
    jsonschema.Draft202012Validator.check_schema(wire)
    failures = []

    for path in sorted((fixtures / "corpus").glob("*.json")):
        errors = list(jsonschema.Draft202012Validator(sidecar_schema).iter_errors(json.loads(path.read_text())))
        check(not errors, f"sidecar {path.name} matches the schema", failures)
    bad = {"blocks": [[0, 5, "paragraph"]], "coref_pairs": [{"entity_start": -1}]}
    check(not jsonschema.Draft202012Validator(sidecar_schema).is_valid(bad), "schema rejects a malformed sidecar", failures)

    provider = Provider(wire)
    with tempfile.TemporaryDirectory(prefix="adaptchunk-wire-") as tmp:
        tmp = Path(tmp)
        corpus = tmp / "corpus"
        corpus.mkdir()
        english = []
        for md in sorted((fixtures / "corpus").glob("*.md")):
            shutil.copy(md, corpus / md.name)
            side = json.loads(md.with_suffix(".json").read_text())
            side.pop("coref_pairs", None)
            if side.get("language", "en") == "en":
                english.append(md.stem)
            (corpus / f"{md.stem}.json").write_text(json.dumps(side))

        def run(*args, dimension=DIM):
            config = {"corpus_dir": "corpus", "output_dir": "out", "token_counter": "whitespace", "workers": 2,
                      "embedding": {"provider": "remote", "url": provider.url, "dimension": dimension, "batch_size": 7},
                      "coref": {"url": provider.url}}
            (tmp / "config.json").write_text(json.dumps(config))
            env = dict(os.environ, ADAPTCHUNK_EMBED_API_KEY="wire-test-key")
            return subprocess.run([str(binary), *args, "--config", str(tmp / "config.json")], env=env,
                                  capture_output=True, text=True, timeout=600)

        r = run("chunk", "--method", "recursive-600")
        check(r.returncode == 0, f"chunk exits 0 (got {r.returncode}) {r.stderr.strip()}", failures)
        r = run("score")
        check(r.returncode == 0, f"score exits 0 against the mock provider (got {r.returncode}) {r.stderr.strip()}", failures)
        check(provider.calls["/health"] >= 2, f"health checked for both services ({provider.calls['/health']} calls)", failures)
        check(provider.calls["/embed"] > 0, f"/embed called ({provider.calls['/embed']} calls)", failures)
        check(provider.calls["/coref"] == len(english),
              f"/coref called once per English document ({provider.calls['/coref']} of {len(english)})", failures)
        check(not provider.errors, "every request and response matches the wire schema" +
              ("" if not provider.errors else ": " + "; ".join(provider.errors[:3])), failures)
        check(provider.auth == {"Bearer wire-test-key"}, f"API key sent as a bearer token ({sorted(provider.auth)})", failures)

        rows = [json.loads(line) for line in (tmp / "out/scores/recursive-600+pp.jsonl").read_text().splitlines() if line]
        by_id = {row["doc_id"]: row for row in rows}
        check(all(by_id[d]["icc"] is not None for d in by_id), "ICC scored with remote embeddings", failures)
        resolved = [d for d in english if by_id[d]["rc"] is not None]
        check(len(resolved) > 0, f"RC scored from remote coref pairs ({', '.join(resolved)})", failures)

        r = run("score", dimension=16)
        check(r.returncode == 1 and "dimension" in r.stderr, f"dimension mismatch exits 1 (got {r.returncode})", failures)
        provider.healthy = False
        r = run("score")
        check(r.returncode == 1 and "healthy" in r.stderr, f"unhealthy provider exits 1 (got {r.returncode})", failures)

    provider.server.shutdown()
    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
