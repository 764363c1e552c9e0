"""HTTP play protocol: plain request/response JSON, one context per session.

Turn-based play needs no streaming. Every request touching a session takes
that session's lock, so concurrent clients of one session are serialized
while separate sessions stay independent.
"""

from __future__ import annotations

import json
import secrets
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .catalog import game_metadata, list_games, resolve_game_path
from .engine import advance, compile_game, initial_context, legal_moves, playout
from .expand import load_file
from .views import legal_view, state_view, topology_view


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class Session:
    def __init__(self, game, ctx, display_name: str):
        self.game = game
        self.ctx = ctx
        self.display_name = display_name
        self.lock = threading.Lock()


class PlayService:
    """Protocol logic, independent of HTTP plumbing (tests drive it directly)."""

    def __init__(self):
        self.sessions: dict = {}
        self._guard = threading.Lock()

    def _session(self, token) -> Session:
        if not token:
            raise ApiError(400, 'missing session')
        with self._guard:
            s = self.sessions.get(token)
        if s is None:
            raise ApiError(404, f'unknown session {token!r}')
        return s

    # -- endpoints ---------------------------------------------------------

    def new_game(self, body: dict) -> dict:
        name = body.get('game')
        if not name:
            raise ApiError(400, 'missing game')
        selections = list(body.get('options') or [])
        ruleset = body.get('ruleset')
        if ruleset:
            selections.insert(0, ruleset)
        seed = int(body.get('seed') or 0)
        try:
            path = resolve_game_path(name)
            root = load_file(path, selections)
            game = compile_game(root)
        except Exception as e:
            raise ApiError(400, str(e))
        ctx = initial_context(game, seed=seed)
        token = secrets.token_hex(8)
        with self._guard:
            self.sessions[token] = Session(game, ctx, name)
        return {'session': token, 'stateView': state_view(ctx)}

    def state(self, token) -> dict:
        s = self._session(token)
        with s.lock:
            return state_view(s.ctx)

    def legal(self, token) -> dict:
        s = self._session(token)
        with s.lock:
            return {'moves': legal_view(legal_moves(s.ctx))}

    def move(self, body: dict) -> dict:
        s = self._session(body.get('session'))
        with s.lock:
            ms = legal_moves(s.ctx)
            move_id = body.get('moveId')
            if not isinstance(move_id, int) or not 0 <= move_id < len(ms):
                raise ApiError(400, f'moveId {move_id!r} out of range '
                                    f'({len(ms)} legal moves)')
            advance(s.ctx, ms[move_id])
            return state_view(s.ctx)

    def finish_random(self, body: dict) -> dict:
        s = self._session(body.get('session'))
        with s.lock:
            playout(s.ctx)
            return state_view(s.ctx)

    def topology(self, token) -> dict:
        s = self._session(token)
        return topology_view(s.game)

    def games(self) -> dict:
        out = []
        for name in list_games():
            out.append(game_metadata(resolve_game_path(name)))
        return {'games': out}


def make_handler(service: PlayService):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):   # keep the test output quiet
            pass

        def _send(self, status: int, payload: dict) -> None:
            data = json.dumps(payload).encode('utf-8')
            self.send_response(status)
            self.send_header('Content-Type', 'application/json')
            self.send_header('Content-Length', str(len(data)))
            self.send_header('Access-Control-Allow-Origin', '*')
            self.send_header('Access-Control-Allow-Headers', 'Content-Type')
            self.send_header('Access-Control-Allow-Methods',
                             'GET, POST, OPTIONS')
            self.end_headers()
            self.wfile.write(data)

        def _body(self) -> dict:
            length = int(self.headers.get('Content-Length') or 0)
            if length == 0:
                return {}
            try:
                return json.loads(self.rfile.read(length))
            except json.JSONDecodeError:
                raise ApiError(400, 'request body is not valid JSON')

        def _dispatch(self, method: str) -> None:
            url = urlparse(self.path)
            q = {k: v[0] for k, v in parse_qs(url.query).items()}
            try:
                if method == 'GET' and url.path == '/state':
                    self._send(200, service.state(q.get('session')))
                elif method == 'GET' and url.path == '/legal':
                    self._send(200, service.legal(q.get('session')))
                elif method == 'GET' and url.path == '/topology':
                    self._send(200, service.topology(q.get('session')))
                elif method == 'GET' and url.path == '/games':
                    self._send(200, service.games())
                elif method == 'POST' and url.path == '/new':
                    self._send(200, service.new_game(self._body()))
                elif method == 'POST' and url.path == '/move':
                    self._send(200, service.move(self._body()))
                elif method == 'POST' and url.path == '/playout':
                    self._send(200, service.finish_random(self._body()))
                else:
                    self._send(404, {'error': f'no route {method} {url.path}'})
            except ApiError as e:
                self._send(e.status, {'error': str(e)})
            except Exception as e:
                self._send(500, {'error': f'{type(e).__name__}: {e}'})

        def do_GET(self):
            self._dispatch('GET')

        def do_POST(self):
            self._dispatch('POST')

        def do_OPTIONS(self):
            self._send(200, {})

    return Handler


def run_server(host: str = '127.0.0.1', port: int = 8000) -> None:
    service = PlayService()
    server = ThreadingHTTPServer((host, port), make_handler(service))
    print(f'serving on http://{host}:{port}')
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
